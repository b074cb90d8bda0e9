//! Arbitrary-length FFT with the crate's fixed transform convention:
//! forward carries the 1/n factor and returns coefficients over the centered
//! frequency window, the inverse carries no factor. Odd lengths (the native
//! grid sizes 2ξ₀+1) go through a Bluestein chirp-z reduction to a
//! power-of-two core transform.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::numerics::Cpx;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Inverse,
}

enum PlanKind {
    Pow2 {
        // twiddles[s] holds e^{-2πi k / 2^{s+1}} for the stage of width 2^{s+1}
        stages: Vec<Vec<Cpx>>,
    },
    Bluestein {
        chirp: Vec<Cpx>,        // e^{-πi j²/n}
        filter_hat: Vec<Cpx>,   // core-transform of the chirp filter, prescaled by 1/m
        core: Arc<Plan>,
    },
}

pub struct Plan {
    len: usize,
    kind: PlanKind,
}

fn plan_cache() -> &'static Mutex<HashMap<usize, Arc<Plan>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn plan(len: usize) -> Arc<Plan> {
    assert!(len >= 1);
    if let Some(p) = plan_cache().lock().unwrap().get(&len) {
        return p.clone();
    }
    let p = Arc::new(Plan::build(len));
    plan_cache().lock().unwrap().insert(len, p.clone());
    p
}

impl Plan {
    fn build(len: usize) -> Plan {
        if len.is_power_of_two() {
            let log2 = len.trailing_zeros() as usize;
            let mut stages = Vec::with_capacity(log2);
            for s in 0..log2 {
                let width = 1usize << (s + 1);
                let half = width / 2;
                let mut tw = Vec::with_capacity(half);
                for k in 0..half {
                    let arg = -2.0 * std::f64::consts::PI * k as f64 / width as f64;
                    tw.push(Cpx::new(arg.cos(), arg.sin()));
                }
                stages.push(tw);
            }
            return Plan { len, kind: PlanKind::Pow2 { stages } };
        }
        // Bluestein: X_k = conj(c_k) Σ_j (c_j x_j) b_{k-j}, b_j = conj(c_j) = e^{+πi j²/n},
        // computed as a circular convolution of length m = next_pow2(2n-1).
        let m = (2 * len - 1).next_power_of_two();
        let core = plan(m);
        let mut chirp = Vec::with_capacity(len);
        for j in 0..len {
            // j² mod 2n keeps the phase argument small and exact.
            let q = (j * j) % (2 * len);
            let arg = -std::f64::consts::PI * q as f64 / len as f64;
            chirp.push(Cpx::new(arg.cos(), arg.sin()));
        }
        let mut filter = vec![Cpx::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for j in 1..len {
            let v = chirp[j].conj();
            filter[j] = v;
            filter[m - j] = v;
        }
        core.forward_in_place(&mut filter);
        let scale = 1.0 / m as f64;
        for v in filter.iter_mut() {
            *v *= scale;
        }
        Plan {
            len,
            kind: PlanKind::Bluestein { chirp, filter_hat: filter, core },
        }
    }

    /// Unnormalized standard DFT: X_k = Σ_j x_j e^{-2πi jk/n}.
    pub fn forward_in_place(&self, buf: &mut [Cpx]) {
        assert_eq!(buf.len(), self.len);
        match &self.kind {
            PlanKind::Pow2 { stages } => pow2_fft(buf, stages),
            PlanKind::Bluestein { chirp, filter_hat, core } => {
                let m = core.len;
                let mut work = vec![Cpx::new(0.0, 0.0); m];
                for j in 0..self.len {
                    work[j] = buf[j] * chirp[j];
                }
                core.forward_in_place(&mut work);
                for (w, f) in work.iter_mut().zip(filter_hat) {
                    *w *= f;
                }
                // inverse core transform via conjugation; 1/m is folded into filter_hat
                for w in work.iter_mut() {
                    *w = w.conj();
                }
                core.forward_in_place(&mut work);
                for k in 0..self.len {
                    buf[k] = work[k].conj() * chirp[k];
                }
            }
        }
    }

    /// Unnormalized inverse DFT: x_j = Σ_k X_k e^{+2πi jk/n}.
    pub fn inverse_in_place(&self, buf: &mut [Cpx]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward_in_place(buf);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
    }
}

fn pow2_fft(buf: &mut [Cpx], stages: &[Vec<Cpx>]) {
    let n = buf.len();
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            buf.swap(i, j);
        }
        let mut bit = n >> 1;
        while bit > 0 && j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
    }
    for tw in stages {
        let half = tw.len();
        let width = half * 2;
        let mut start = 0;
        while start < n {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * tw[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
            start += width;
        }
    }
}

/// Index shift between the centered frequency window and standard DFT order.
/// Centered index t ∈ 0..len stands for frequency t - half where
/// half = len/2 (even) or (len-1)/2 (odd).
pub fn centered_half(len: usize) -> usize {
    len / 2
}

fn transform_axes(data: &mut [Cpx], shape: &[usize], inverse: bool) {
    for axis in 0..shape.len() {
        let len = shape[axis];
        if len == 1 {
            continue;
        }
        let p = plan(len);
        let after: usize = shape[axis + 1..].iter().product();
        let before: usize = shape[..axis].iter().product();
        let mut line = vec![Cpx::new(0.0, 0.0); len];
        for l in 0..before * after {
            let block = l / after;
            let offset = l % after;
            let base = block * len * after + offset;
            for k in 0..len {
                line[k] = data[base + k * after];
            }
            if inverse {
                p.inverse_in_place(&mut line);
            } else {
                p.forward_in_place(&mut line);
            }
            for k in 0..len {
                data[base + k * after] = line[k];
            }
        }
    }
}

fn reorder(data: &[Cpx], shape: &[usize], to_centered: bool) -> Vec<Cpx> {
    let n: usize = shape.iter().product();
    let d = shape.len();
    let mut out = vec![Cpx::new(0.0, 0.0); n];
    let mut idx = vec![0usize; d];
    for flat in 0..n {
        // map per-axis index between centered and standard order:
        // centered position of standard index k is (k + half) % len
        let mut mapped = 0usize;
        for a in 0..d {
            let len = shape[a];
            let half = centered_half(len);
            let t = idx[a];
            let m = if to_centered { (t + half) % len } else { (t + len - half) % len };
            mapped = mapped * len + m;
        }
        out[mapped] = data[flat];
        // increment odometer
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < shape[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

/// Discrete Fourier transform under the crate convention.
///
/// Forward: û(ξ) = (1/n) Σ_x u(x) e^{-2πi ξ·x} over the centered frequency
/// window per axis; inverse: u(x) = Σ_ξ û(ξ) e^{+2πi ξ·x}. Inverse ∘ forward
/// is the identity. Any axis length ≥ 1 is supported.
pub fn dft(v: &[Cpx], shape: &[usize], direction: Direction) -> Result<Vec<Cpx>> {
    let n: usize = shape.iter().product();
    if shape.is_empty() || shape.iter().any(|&s| s == 0) {
        return Err(Error::Validation("dft shape axes must all be ≥ 1".into()));
    }
    if n != v.len() {
        return Err(Error::Dimension(format!(
            "dft: shape {:?} implies length {n}, vector has {}",
            shape,
            v.len()
        )));
    }
    match direction {
        Direction::Forward => {
            let mut work = v.to_vec();
            transform_axes(&mut work, shape, false);
            let mut out = reorder(&work, shape, true);
            let scale = 1.0 / n as f64;
            for x in out.iter_mut() {
                *x *= scale;
            }
            Ok(out)
        }
        Direction::Inverse => {
            let mut work = reorder(v, shape, false);
            transform_axes(&mut work, shape, true);
            Ok(work)
        }
    }
}
