//! Self-contained dense complex linear algebra, arbitrary-length FFTs and
//! reproducible random sequences. Everything else in the crate sits on top of
//! this module; none of it depends on an external solver.

pub mod fft;
pub mod lstsq;
pub mod matrix;
pub mod rng;
pub mod spectral;

pub use fft::{dft, Direction};
pub use lstsq::{least_squares, LeastSquaresSolution};
pub use matrix::Mat;
pub use rng::{RandomStream, SequenceKind};
pub use spectral::{hermitian_eigenvalues, singular_values, svd, Svd};

/// Complex scalar used throughout the crate.
pub type Cpx = num_complex::Complex64;

pub fn c64(re: f64, im: f64) -> Cpx {
    Cpx::new(re, im)
}

/// Conjugated dot product `a* b`. Component arithmetic with two running
/// partial sums; the hot loops of the Gram/QR/SVD paths all land here.
pub fn dot(a: &[Cpx], b: &[Cpx]) -> Cpx {
    debug_assert_eq!(a.len(), b.len());
    let (mut re0, mut im0, mut re1, mut im1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut ai = a.chunks_exact(2);
    let mut bi = b.chunks_exact(2);
    for (pa, pb) in (&mut ai).zip(&mut bi) {
        re0 += pa[0].re * pb[0].re + pa[0].im * pb[0].im;
        im0 += pa[0].re * pb[0].im - pa[0].im * pb[0].re;
        re1 += pa[1].re * pb[1].re + pa[1].im * pb[1].im;
        im1 += pa[1].re * pb[1].im - pa[1].im * pb[1].re;
    }
    for (x, y) in ai.remainder().iter().zip(bi.remainder()) {
        re0 += x.re * y.re + x.im * y.im;
        im0 += x.re * y.im - x.im * y.re;
    }
    Cpx::new(re0 + re1, im0 + im1)
}

pub fn norm2(a: &[Cpx]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn all_finite(a: &[Cpx]) -> bool {
    a.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// e^{2πi t} evaluated from the fractional part of `t`, so large arguments do
/// not lose precision.
pub fn unit_phase(t: f64) -> Cpx {
    let f = t - t.floor();
    let arg = 2.0 * std::f64::consts::PI * f;
    Cpx::new(arg.cos(), arg.sin())
}
