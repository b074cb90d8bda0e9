//! Reproducible random sequences. One stream is a (seed, stream-index) pair
//! over ChaCha8; Gaussians come from Box-Muller on the uniform stream, so a
//! given (seed, stream, counter) always yields the same draw. Monte Carlo
//! code derives one stream per trial instead of sharing a stream.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::Cpx;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SequenceKind {
    Gaussian,
    Rademacher,
}

impl SequenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::Gaussian => "gaussian",
            SequenceKind::Rademacher => "rademacher",
        }
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(SequenceKind::Gaussian),
            "rademacher" => Ok(SequenceKind::Rademacher),
            other => Err(crate::error::Error::Parse(format!(
                "unknown sequence kind {other:?} (expected gaussian|rademacher)"
            ))),
        }
    }
}

/// Deterministic random stream with an explicit draw counter.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub const ALGORITHM: &'static str = "chacha8/box-muller";

    pub fn new(seed: u64) -> RandomStream {
        RandomStream::substream(seed, 0)
    }

    /// Stream `index` of the family rooted at `seed`; distinct indices give
    /// statistically independent sequences.
    pub fn substream(seed: u64, index: u64) -> RandomStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        RandomStream { seed, stream: index, counter: 0, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of uniform words drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.rng.next_u64()
    }

    /// Uniform on (0, 1].
    pub fn uniform(&mut self) -> f64 {
        let bits = self.next_u64() >> 11;
        1.0 - bits as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller; consumes two uniform words per draw.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// ±1 with equal probability.
    pub fn rademacher(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Real-valued probe sequence of length `n`, stored as complex entries.
    pub fn draw_sequence(&mut self, n: usize, kind: SequenceKind) -> Vec<Cpx> {
        assert!(n >= 1);
        (0..n)
            .map(|_| {
                let x = match kind {
                    SequenceKind::Gaussian => self.gaussian(),
                    SequenceKind::Rademacher => self.rademacher(),
                };
                Cpx::new(x, 0.0)
            })
            .collect()
    }
}

/// Stable 64-bit mix used to derive per-trial seeds in experiment sweeps.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
