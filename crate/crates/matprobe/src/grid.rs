//! Periodic spatial/frequency lattice. Points live at i/n₁ in [0,1)^d and
//! frequencies occupy the centered band {-ξ₀,…,ξ₀}^d with n₁ = 2ξ₀+1, so the
//! grid has as many points as frequencies.

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Grid {
    dim: usize,
    band: i64,
}

impl Grid {
    pub fn new(dim: usize, band: i64) -> Result<Grid> {
        if dim != 1 && dim != 2 {
            return Err(Error::Validation(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if band < 1 {
            return Err(Error::Validation(format!("band limit must be ≥ 1, got {band}")));
        }
        Ok(Grid { dim, band })
    }

    pub fn new_1d(band: i64) -> Result<Grid> {
        Grid::new(1, band)
    }

    pub fn new_2d(band: i64) -> Result<Grid> {
        Grid::new(2, band)
    }

    /// Grid from an odd per-axis point count n₁ = 2ξ₀+1.
    pub fn from_axis_len(dim: usize, n1: usize) -> Result<Grid> {
        if n1 < 3 || n1 % 2 == 0 {
            return Err(Error::Validation(format!(
                "per-axis point count must be odd and ≥ 3, got {n1}"
            )));
        }
        Grid::new(dim, ((n1 - 1) / 2) as i64)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Band limit ξ₀.
    pub fn band(&self) -> i64 {
        self.band
    }

    /// Points per axis, n₁ = 2ξ₀+1.
    pub fn axis_len(&self) -> usize {
        (2 * self.band + 1) as usize
    }

    /// Total number of points n = n₁^d.
    pub fn len(&self) -> usize {
        self.axis_len().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.axis_len(); self.dim]
    }

    /// Spatial point for a flat row-major index, second component 0 in 1D.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let n1 = self.axis_len();
        match self.dim {
            1 => [flat as f64 / n1 as f64, 0.0],
            _ => [(flat / n1) as f64 / n1 as f64, (flat % n1) as f64 / n1 as f64],
        }
    }

    /// Centered frequency for a flat row-major index, second component 0 in 1D.
    pub fn frequency(&self, flat: usize) -> [i64; 2] {
        let n1 = self.axis_len() as i64;
        match self.dim {
            1 => [flat as i64 - self.band, 0],
            _ => [
                (flat as i64 / n1) - self.band,
                (flat as i64 % n1) - self.band,
            ],
        }
    }

    /// Flat index of a centered frequency, wrapping out-of-band components
    /// back into the window (the discrete torus identification).
    pub fn frequency_index(&self, f: [i64; 2]) -> usize {
        let n1 = self.axis_len() as i64;
        let wrap = |x: i64| -> i64 {
            let m = (x + self.band).rem_euclid(n1);
            m
        };
        match self.dim {
            1 => wrap(f[0]) as usize,
            _ => (wrap(f[0]) * n1 + wrap(f[1])) as usize,
        }
    }

    /// Wrap a frequency component into the centered window [-ξ₀, ξ₀].
    pub fn wrap_component(&self, x: i64) -> i64 {
        let n1 = self.axis_len() as i64;
        (x + self.band).rem_euclid(n1) - self.band
    }

    pub fn wrap_frequency(&self, f: [i64; 2]) -> [i64; 2] {
        [
            self.wrap_component(f[0]),
            if self.dim == 2 { self.wrap_component(f[1]) } else { 0 },
        ]
    }

    /// ‖ξ‖² for a flat frequency index.
    pub fn frequency_norm_sqr(&self, flat: usize) -> f64 {
        let f = self.frequency(flat);
        (f[0] * f[0] + f[1] * f[1]) as f64
    }

    /// Order weight ⟨ξ⟩^m with ⟨ξ⟩ = ‖ξ‖; at ξ = 0 the weight is 1 for m = 0
    /// and 0 otherwise (negative orders must annihilate the DC mode, positive
    /// orders vanish there anyway).
    pub fn order_weight(&self, flat: usize, m: f64) -> f64 {
        if m == 0.0 {
            return 1.0;
        }
        let r2 = self.frequency_norm_sqr(flat);
        if r2 == 0.0 {
            0.0
        } else {
            r2.powf(m / 2.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match() {
        let g = Grid::new_1d(5).unwrap();
        assert_eq!(g.axis_len(), 11);
        assert_eq!(g.len(), 11);
        let g = Grid::new_2d(2).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.shape(), vec![5, 5]);
    }

    #[test]
    fn frequency_round_trips() {
        let g = Grid::new_2d(3).unwrap();
        for flat in 0..g.len() {
            let f = g.frequency(flat);
            assert_eq!(g.frequency_index(f), flat);
        }
    }

    #[test]
    fn wrapping_is_periodic() {
        let g = Grid::new_1d(2).unwrap(); // band 2, n1 = 5
        assert_eq!(g.wrap_component(3), -2);
        assert_eq!(g.wrap_component(-3), 2);
        assert_eq!(g.wrap_component(5), 0);
        assert_eq!(g.wrap_component(2), 2);
    }

    #[test]
    fn order_weight_dc_convention() {
        let g = Grid::new_1d(2).unwrap();
        let dc = 2; // flat index of ξ=0
        assert_eq!(g.order_weight(dc, 0.0), 1.0);
        assert_eq!(g.order_weight(dc, -2.0), 0.0);
        assert_eq!(g.order_weight(dc, 2.0), 0.0);
        let idx = g.frequency_index([2, 0]);
        assert!((g.order_weight(idx, -2.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(3, 1).is_err());
        assert!(Grid::new(1, 0).is_err());
        assert!(Grid::from_axis_len(1, 10).is_err());
    }
}
