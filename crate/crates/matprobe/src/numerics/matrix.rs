//! Dense complex matrices, row-major. Desk scale by design: nothing here is
//! blocked or parallel, and nothing should be asked to hold more than a few
//! thousand rows.

use crate::numerics::Cpx;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Cpx>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Mat { rows, cols, data: vec![Cpx::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cpx::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cpx) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[Cpx]) -> Mat {
        let mut m = Mat::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Cpx] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Cpx] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Cpx] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<Cpx> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Cpx]) {
        assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = other.row(k);
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cpx]) -> Vec<Cpx> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scaled(&self, s: Cpx) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn trace(&self) -> Cpx {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// max |M - M*| entrywise.
    pub fn hermitian_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Frobenius inner product <self, other> = tr(self* other).
    pub fn frobenius_inner(&self, other: &Mat) -> Cpx {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut acc = Cpx::new(0.0, 0.0);
        for (a, b) in self.data.iter().zip(&other.data) {
            acc += a.conj() * b;
        }
        acc
    }

    pub fn kron(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self[(i, j)];
                for a in 0..other.rows {
                    for b in 0..other.cols {
                        out[(i * other.rows + a, j * other.cols + b)] = s * other[(a, b)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Cpx;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cpx {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cpx {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn product_and_adjoint() {
        let a = Mat::from_fn(2, 3, |i, j| c64((i + j) as f64, i as f64 - j as f64));
        let b = Mat::from_fn(3, 2, |i, j| c64(1.0 + i as f64 * j as f64, 0.5));
        let ab = a.mul(&b);
        let ba_adj = b.adjoint().mul(&a.adjoint());
        let diff = ab.adjoint().sub(&ba_adj);
        assert!(diff.max_abs() < 1e-14);
    }

    #[test]
    fn kron_of_identities() {
        let i2 = Mat::identity(2);
        let i3 = Mat::identity(3);
        assert_eq!(i2.kron(&i3), Mat::identity(6));
    }
}
