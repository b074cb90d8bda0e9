use matprobe::basis::make_fourier_family;
use matprobe::numerics::{c64, singular_values, Mat, RandomStream};
use matprobe::operators::{elliptic_operator, mean_filter, EllipticMedia, LinearOperator};
use matprobe::probing::{backward_probe, reconstruct, ProbeConfig};
use matprobe::{Grid, SequenceKind};
use std::time::Instant;

fn main() {
    let grid = Grid::new_2d(10).unwrap();
    let op = elliptic_operator(EllipticMedia::TwoDim { contrast: 1e4, roughness: 2 }, grid).unwrap();
    let t = Instant::now();
    let ad = op.dense().unwrap();
    println!("A dense: {:?}", t.elapsed());
    let t = Instant::now();
    let sv = singular_values(&ad).unwrap();
    println!("svd(A): {:?} (smax={:.3e})", t.elapsed(), sv[0]);
    let fam = make_fourier_family(grid, 3, 3, -2.0).unwrap();
    let t = Instant::now();
    let cfg = ProbeConfig::new(4, 1, SequenceKind::Gaussian);
    let r = backward_probe(&op, &mean_filter(grid), &fam, &cfg).unwrap();
    println!("backward probe J=3 q=4: {:?}", t.elapsed());
    let t = Instant::now();
    let c = reconstruct(&fam, &r.coefficients).unwrap();
    let cd = c.dense().unwrap();
    println!("C dense: {:?}", t.elapsed());
    let t = Instant::now();
    let ca = cd.mul(&ad);
    println!("CA matmul: {:?}", t.elapsed());
    let t = Instant::now();
    let sv2 = singular_values(&ca).unwrap();
    println!("svd(CA): {:?} ({:.3e})", t.elapsed(), sv2[0]);
    // large-p probe timing (foveation-scale gram)
    let mut s = RandomStream::new(3);
    let m = Mat::from_fn(800, 700, |_, _| c64(s.gaussian(), s.gaussian()));
    let t = Instant::now();
    let _ = matprobe::numerics::lstsq::least_squares(&m, &m.col(0)).unwrap();
    println!("QR 800x700: {:?}", t.elapsed());
}
