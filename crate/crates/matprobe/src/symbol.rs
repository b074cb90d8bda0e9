//! Discrete pseudodifferential symbols a(x,ξ) on periodic grids and their
//! calculus: application to vectors, the Fourier-basis matrix form, trace,
//! adjoint and composition. Frequency arguments that leave the band are
//! wrapped back into the centered window, which is the unique reading
//! consistent with the discrete Fourier basis.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::{dft, unit_phase, Cpx, Direction, Mat};

/// Dense symbol table over X×Ξ; rows are spatial points, columns frequencies.
#[derive(Clone, Debug)]
pub struct DiscreteSymbol {
    grid: Grid,
    values: Mat,
}

impl DiscreteSymbol {
    pub fn new(grid: Grid, values: Mat) -> Result<DiscreteSymbol> {
        let n = grid.len();
        if values.rows() != n || values.cols() != n {
            return Err(Error::Dimension(format!(
                "symbol table must be {n}x{n}, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if !values.is_finite() {
            return Err(Error::NonFinite("symbol table"));
        }
        Ok(DiscreteSymbol { grid, values })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2], [i64; 2]) -> Cpx) -> DiscreteSymbol {
        let n = grid.len();
        let values = Mat::from_fn(n, n, |ix, ixi| f(grid.point(ix), grid.frequency(ixi)));
        DiscreteSymbol { grid, values }
    }

    pub fn constant(grid: Grid, value: Cpx) -> DiscreteSymbol {
        DiscreteSymbol::from_fn(grid, |_, _| value)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    /// Au(x) = Σ_ξ e^{2πiξ·x} a(x,ξ) û(ξ). O(n²) once û is known.
    pub fn apply(&self, u: &[Cpx]) -> Result<Vec<Cpx>> {
        let n = self.grid.len();
        if u.len() != n {
            return Err(Error::Dimension(format!(
                "symbol_apply: vector length {} != grid size {n}",
                u.len()
            )));
        }
        let uh = dft(u, &self.grid.shape(), Direction::Forward)?;
        let mut out = vec![Cpx::new(0.0, 0.0); n];
        for (ix, o) in out.iter_mut().enumerate() {
            let x = self.grid.point(ix);
            let row = self.values.row(ix);
            let mut acc = Cpx::new(0.0, 0.0);
            for (ixi, a) in row.iter().enumerate() {
                let f = self.grid.frequency(ixi);
                let phase = unit_phase(f[0] as f64 * x[0] + f[1] as f64 * x[1]);
                acc += phase * a * uh[ixi];
            }
            *o = acc;
        }
        Ok(out)
    }

    /// Compact form â(j,ξ) = (1/n) Σ_x a(x,ξ) e^{-2πij·x}; rows are centered
    /// frequency offsets j, columns ξ.
    fn hat(&self) -> Result<Mat> {
        let n = self.grid.len();
        let shape = self.grid.shape();
        let mut out = Mat::zeros(n, n);
        for ixi in 0..n {
            let col = self.values.col(ixi);
            let colh = dft(&col, &shape, Direction::Forward)?;
            out.set_col(ixi, &colh);
        }
        Ok(out)
    }

    fn from_hat(grid: Grid, hat: &Mat) -> Result<DiscreteSymbol> {
        let n = grid.len();
        let shape = grid.shape();
        let mut values = Mat::zeros(n, n);
        for ixi in 0..n {
            let col = hat.col(ixi);
            let back = dft(&col, &shape, Direction::Inverse)?;
            values.set_col(ixi, &back);
        }
        DiscreteSymbol::new(grid, values)
    }

    /// Fourier-basis matrix A_{ηξ} = â(η−ξ, ξ), differences wrapped into the
    /// band. The matrix acts on forward-transformed vectors.
    pub fn to_matrix(&self) -> Result<Mat> {
        let n = self.grid.len();
        let hat = self.hat()?;
        let mut a = Mat::zeros(n, n);
        for ieta in 0..n {
            let eta = self.grid.frequency(ieta);
            for ixi in 0..n {
                let xi = self.grid.frequency(ixi);
                let j = [eta[0] - xi[0], eta[1] - xi[1]];
                a[(ieta, ixi)] = hat[(self.grid.frequency_index(j), ixi)];
            }
        }
        Ok(a)
    }

    /// Dense spatial-basis matrix of the operator:
    /// A[x,y] = (1/n) Σ_ξ a(x,ξ) e^{2πiξ·(x−y)}, i.e. row x is the inverse
    /// transform of a(x,·) read at the circular offset x − y. One inverse
    /// FFT per row, O(n² log n) overall.
    pub fn dense_spatial(&self) -> Result<Mat> {
        let n = self.grid.len();
        let n1 = self.grid.axis_len();
        let shape = self.grid.shape();
        let scale = 1.0 / n as f64;
        let mut out = Mat::zeros(n, n);
        for ix in 0..n {
            let row = self.values.row(ix).to_vec();
            let f = dft(&row, &shape, Direction::Inverse)?;
            let (x1, x2) = (ix / n1, ix % n1);
            let orow = out.row_mut(ix);
            if self.grid.dim() == 1 {
                for (iy, slot) in orow.iter_mut().enumerate() {
                    *slot = f[(ix + n - iy) % n] * scale;
                }
            } else {
                for (iy, slot) in orow.iter_mut().enumerate() {
                    let (y1, y2) = (iy / n1, iy % n1);
                    let z = ((x1 + n1 - y1) % n1) * n1 + (x2 + n1 - y2) % n1;
                    *slot = f[z] * scale;
                }
            }
        }
        Ok(out)
    }

    /// Inverse of `to_matrix`: a(x,ξ) = e^{-2πiξ·x} Σ_η e^{2πiη·x} A_{ηξ}.
    pub fn from_matrix(a: &Mat, grid: Grid) -> Result<DiscreteSymbol> {
        let n = grid.len();
        if a.rows() != n || a.cols() != n {
            return Err(Error::Dimension(format!(
                "from_matrix: expected {n}x{n}, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let mut hat = Mat::zeros(n, n);
        for ixi in 0..n {
            let xi = grid.frequency(ixi);
            for ieta in 0..n {
                let eta = grid.frequency(ieta);
                let j = [eta[0] - xi[0], eta[1] - xi[1]];
                hat[(grid.frequency_index(j), ixi)] = a[(ieta, ixi)];
            }
        }
        DiscreteSymbol::from_hat(grid, &hat)
    }

    /// tr(A) = Σ_ξ â(0,ξ) = Σ_ξ (1/n) Σ_x a(x,ξ).
    pub fn trace(&self) -> Cpx {
        let n = self.grid.len();
        let mut acc = Cpx::new(0.0, 0.0);
        for ix in 0..n {
            for v in self.values.row(ix) {
                acc += v;
            }
        }
        acc / n as f64
    }

    /// Symbol of the adjoint operator: ĉ(j,ξ) = conj(â(−j, j+ξ)).
    pub fn adjoint(&self) -> Result<DiscreteSymbol> {
        let n = self.grid.len();
        let hat = self.hat()?;
        let mut chat = Mat::zeros(n, n);
        for ij in 0..n {
            let j = self.grid.frequency(ij);
            let neg = self.grid.frequency_index([-j[0], -j[1]]);
            for ixi in 0..n {
                let xi = self.grid.frequency(ixi);
                let shifted = self.grid.frequency_index([j[0] + xi[0], j[1] + xi[1]]);
                chat[(ij, ixi)] = hat[(neg, shifted)].conj();
            }
        }
        DiscreteSymbol::from_hat(self.grid, &chat)
    }

    /// Symbol of the product AB: ĉ(j,ξ) = Σ_ζ â(j+ξ−ζ, ζ) b̂(ζ−ξ, ξ).
    pub fn compose(&self, other: &DiscreteSymbol) -> Result<DiscreteSymbol> {
        if self.grid != other.grid {
            return Err(Error::Dimension("compose: grids differ".into()));
        }
        let n = self.grid.len();
        let ahat = self.hat()?;
        let bhat = other.hat()?;
        let mut chat = Mat::zeros(n, n);
        for ij in 0..n {
            let j = self.grid.frequency(ij);
            for ixi in 0..n {
                let xi = self.grid.frequency(ixi);
                let mut acc = Cpx::new(0.0, 0.0);
                for izeta in 0..n {
                    let zeta = self.grid.frequency(izeta);
                    let a_row = self
                        .grid
                        .frequency_index([j[0] + xi[0] - zeta[0], j[1] + xi[1] - zeta[1]]);
                    let b_row = self.grid.frequency_index([zeta[0] - xi[0], zeta[1] - xi[1]]);
                    acc += ahat[(a_row, izeta)] * bhat[(b_row, ixi)];
                }
                chat[(ij, ixi)] = acc;
            }
        }
        DiscreteSymbol::from_hat(self.grid, &chat)
    }

    /// Tabular serialization: `# grid` header, then x-index, ξ-index, re, im.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# matprobe symbol dim={} band={}", self.grid.dim(), self.grid.band())?;
        writeln!(w, "x_index,xi_index,re,im")?;
        let n = self.grid.len();
        for ix in 0..n {
            for ixi in 0..n {
                let v = self.values[(ix, ixi)];
                writeln!(w, "{ix},{ixi},{},{}", fmt17(v.re), fmt17(v.im))?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: &mut R) -> Result<DiscreteSymbol> {
        let mut grid: Option<Grid> = None;
        let mut values: Option<Mat> = None;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(spec) = rest.strip_prefix("matprobe symbol ") {
                    let mut dim = None;
                    let mut band = None;
                    for tok in spec.split_whitespace() {
                        if let Some(v) = tok.strip_prefix("dim=") {
                            dim = v.parse::<usize>().ok();
                        } else if let Some(v) = tok.strip_prefix("band=") {
                            band = v.parse::<i64>().ok();
                        }
                    }
                    match (dim, band) {
                        (Some(d), Some(b)) => {
                            let g = Grid::new(d, b)?;
                            values = Some(Mat::zeros(g.len(), g.len()));
                            grid = Some(g);
                        }
                        _ => return Err(Error::Parse("bad symbol header".into())),
                    }
                }
                continue;
            }
            if line.starts_with("x_index") {
                continue;
            }
            let vals = values
                .as_mut()
                .ok_or_else(|| Error::Parse("symbol data before grid header".into()))?;
            let mut parts = line.split(',');
            let ix: usize = next_field(&mut parts)?;
            let ixi: usize = next_field(&mut parts)?;
            let re: f64 = next_field(&mut parts)?;
            let im: f64 = next_field(&mut parts)?;
            if ix >= vals.rows() || ixi >= vals.cols() {
                return Err(Error::Parse(format!("index ({ix},{ixi}) outside table")));
            }
            vals[(ix, ixi)] = Cpx::new(re, im);
        }
        match (grid, values) {
            (Some(g), Some(v)) => DiscreteSymbol::new(g, v),
            _ => Err(Error::Parse("missing symbol header".into())),
        }
    }
}

fn next_field<T: std::str::FromStr>(parts: &mut std::str::Split<'_, char>) -> Result<T> {
    parts
        .next()
        .ok_or_else(|| Error::Parse("truncated symbol row".into()))?
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Parse("bad symbol field".into()))
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, norm2, RandomStream, SequenceKind};

    fn random_symbol(grid: Grid, seed: u64) -> DiscreteSymbol {
        let mut s = RandomStream::new(seed);
        DiscreteSymbol::from_fn(grid, |_, _| c64(s.gaussian(), s.gaussian()))
    }

    fn random_vec(n: usize, seed: u64) -> Vec<Cpx> {
        let mut s = RandomStream::new(seed);
        let re = s.draw_sequence(n, SequenceKind::Gaussian);
        let im = s.draw_sequence(n, SequenceKind::Gaussian);
        re.iter().zip(&im).map(|(a, b)| c64(a.re, b.re)).collect()
    }

    /// Dense application path: inverse-DFT ∘ matrix ∘ DFT.
    fn apply_via_matrix(sym: &DiscreteSymbol, u: &[Cpx]) -> Vec<Cpx> {
        let shape = sym.grid().shape();
        let uh = dft(u, &shape, Direction::Forward).unwrap();
        let wh = sym.to_matrix().unwrap().mul_vec(&uh);
        dft(&wh, &shape, Direction::Inverse).unwrap()
    }

    fn laplacian_symbol(grid: Grid) -> DiscreteSymbol {
        DiscreteSymbol::from_fn(grid, |_, f| {
            c64(-4.0 * std::f64::consts::PI.powi(2) * (f[0] * f[0] + f[1] * f[1]) as f64, 0.0)
        })
    }

    #[test]
    fn identity_symbol_is_identity() {
        let grid = Grid::new_1d(3).unwrap();
        let sym = DiscreteSymbol::constant(grid, c64(1.0, 0.0));
        let u = random_vec(grid.len(), 1);
        let v = sym.apply(&u).unwrap();
        for (a, b) in v.iter().zip(&u) {
            assert!((a - b).norm() < 1e-12);
        }
        let m = sym.to_matrix().unwrap();
        assert!(m.sub(&Mat::identity(grid.len())).max_abs() < 1e-12);
    }

    #[test]
    fn laplacian_symbol_eigenfunction() {
        let grid = Grid::new_1d(4).unwrap();
        let n = grid.len();
        let sym = laplacian_symbol(grid);
        let u: Vec<Cpx> = (0..n).map(|i| unit_phase(i as f64 / n as f64)).collect();
        let v = sym.apply(&u).unwrap();
        let want = -4.0 * std::f64::consts::PI.powi(2);
        for (a, b) in v.iter().zip(&u) {
            assert!((a - b * want).norm() < 1e-9, "{a} vs {}", b * want);
        }
    }

    #[test]
    fn laplacian_matrix_is_diagonal() {
        let grid = Grid::new_1d(2).unwrap();
        let m = laplacian_symbol(grid).to_matrix().unwrap();
        for i in 0..5 {
            let xi = i as i64 - 2;
            for j in 0..5 {
                let want = if i == j {
                    c64(-4.0 * std::f64::consts::PI.powi(2) * (xi * xi) as f64, 0.0)
                } else {
                    c64(0.0, 0.0)
                };
                assert!((m[(i, j)] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn modulation_symbol_shifts_frequencies() {
        // a(x,ξ) = e^{2πix} moves frequency ξ to ξ+1 (wrapped at the band edge)
        let grid = Grid::new_1d(2).unwrap();
        let sym = DiscreteSymbol::from_fn(grid, |x, _| unit_phase(x[0]));
        let m = sym.to_matrix().unwrap();
        for ixi in 0..5 {
            let xi = ixi as i64 - 2;
            let target = grid.frequency_index([xi + 1, 0]);
            for ieta in 0..5 {
                let want = if ieta == target { 1.0 } else { 0.0 };
                assert!(
                    (m[(ieta, ixi)] - c64(want, 0.0)).norm() < 1e-12,
                    "eta={ieta} xi={ixi}"
                );
            }
        }
    }

    #[test]
    fn apply_matches_dense_path() {
        for (dim, band) in [(1usize, 2i64), (1, 5), (2, 2)] {
            let grid = Grid::new(dim, band).unwrap();
            let sym = random_symbol(grid, 10 + band as u64);
            let u = random_vec(grid.len(), 3);
            let fast = sym.apply(&u).unwrap();
            let dense = apply_via_matrix(&sym, &u);
            let err: f64 = fast
                .iter()
                .zip(&dense)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err / norm2(&dense) < 1e-10, "dim={dim} band={band}");
        }
    }

    #[test]
    fn dense_spatial_matches_column_assembly() {
        for (dim, band) in [(1usize, 3i64), (2, 2)] {
            let grid = Grid::new(dim, band).unwrap();
            let sym = random_symbol(grid, 61);
            let n = grid.len();
            let fast = sym.dense_spatial().unwrap();
            let mut cols = Mat::zeros(n, n);
            let mut e = vec![c64(0.0, 0.0); n];
            for c in 0..n {
                e[c] = c64(1.0, 0.0);
                cols.set_col(c, &sym.apply(&e).unwrap());
                e[c] = c64(0.0, 0.0);
            }
            assert!(fast.sub(&cols).max_abs() < 1e-10 * cols.max_abs(), "dim={dim}");
        }
    }

    #[test]
    fn matrix_round_trip() {
        for (dim, band) in [(1usize, 2i64), (1, 5), (2, 2)] {
            let grid = Grid::new(dim, band).unwrap();
            let sym = random_symbol(grid, 77);
            let m = sym.to_matrix().unwrap();
            let back = DiscreteSymbol::from_matrix(&m, grid).unwrap();
            assert!(back.values().sub(sym.values()).max_abs() < 1e-10);
            let m2 = back.to_matrix().unwrap();
            assert!(m2.sub(&m).max_abs() < 1e-10);
        }
    }

    #[test]
    fn trace_examples() {
        let grid = Grid::new_1d(2).unwrap();
        let sym = DiscreteSymbol::constant(grid, c64(1.0, 0.0));
        assert!((sym.trace() - c64(5.0, 0.0)).norm() < 1e-12);

        let grid = Grid::new_1d(1).unwrap();
        let lap = laplacian_symbol(grid);
        let want = -8.0 * std::f64::consts::PI.powi(2);
        assert!((lap.trace() - c64(want, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn trace_matches_dense() {
        let grid = Grid::new_2d(2).unwrap();
        let sym = random_symbol(grid, 5);
        let dense_tr = sym.to_matrix().unwrap().trace();
        assert!((sym.trace() - dense_tr).norm() < 1e-10 * dense_tr.norm().max(1.0));
    }

    #[test]
    fn adjoint_of_real_multiplier_is_itself() {
        let grid = Grid::new_1d(3).unwrap();
        let sym = DiscreteSymbol::from_fn(grid, |_, f| c64((f[0] * f[0]) as f64, 0.0));
        let adj = sym.adjoint().unwrap();
        assert!(adj.values().sub(sym.values()).max_abs() < 1e-10);
    }

    #[test]
    fn adjoint_is_involution_and_matches_dense() {
        for (dim, band) in [(1usize, 3i64), (2, 2)] {
            let grid = Grid::new(dim, band).unwrap();
            let sym = random_symbol(grid, 21);
            let adj = sym.adjoint().unwrap();
            let twice = adj.adjoint().unwrap();
            assert!(twice.values().sub(sym.values()).max_abs() < 1e-12);
            let dense = sym.to_matrix().unwrap().adjoint();
            assert!(adj.to_matrix().unwrap().sub(&dense).max_abs() < 1e-10);
        }
    }

    #[test]
    fn compose_identity_and_multipliers() {
        let grid = Grid::new_1d(3).unwrap();
        let a = random_symbol(grid, 31);
        let one = DiscreteSymbol::constant(grid, c64(1.0, 0.0));
        let c = a.compose(&one).unwrap();
        assert!(c.values().sub(a.values()).max_abs() < 1e-10);

        let g1 = DiscreteSymbol::from_fn(grid, |_, f| c64(1.0 + (f[0] * f[0]) as f64, 0.0));
        let g2 = DiscreteSymbol::from_fn(grid, |_, f| c64(0.5, f[0] as f64));
        let prod = g1.compose(&g2).unwrap();
        let want = DiscreteSymbol::from_fn(grid, |_, f| {
            c64(1.0 + (f[0] * f[0]) as f64, 0.0) * c64(0.5, f[0] as f64)
        });
        assert!(prod.values().sub(want.values()).max_abs() < 1e-10);
    }

    #[test]
    fn compose_matches_dense_product() {
        let grid = Grid::new_1d(3).unwrap();
        let a = random_symbol(grid, 41);
        let b = random_symbol(grid, 42);
        let c = a.compose(&b).unwrap();
        let dense = a.to_matrix().unwrap().mul(&b.to_matrix().unwrap());
        let got = c.to_matrix().unwrap();
        assert!(got.sub(&dense).max_abs() <= 1e-9 * dense.max_abs().max(1.0));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = random_symbol(Grid::new_1d(2).unwrap(), 1);
        let b = random_symbol(Grid::new_1d(3).unwrap(), 2);
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let grid = Grid::new_1d(2).unwrap();
        let sym = random_symbol(grid, 50);
        let mut buf = Vec::new();
        sym.write_csv(&mut buf).unwrap();
        let mut cursor = std::io::Cursor::new(buf);
        let back = DiscreteSymbol::read_csv(&mut cursor).unwrap();
        assert_eq!(back.grid(), grid);
        assert!(back.values().sub(sym.values()).max_abs() < 1e-15);
    }
}
