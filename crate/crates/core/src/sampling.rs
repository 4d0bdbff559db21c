//! Deterministic parallel sampling.
//!
//! Sample `i` of a run draws from its own ChaCha8 stream: the key is derived
//! from the run seed and the stream id is `i`. Workers own contiguous index
//! ranges and their tallies are merged in range order, so a run's result
//! depends only on `(seed, sample_count)` and never on `worker_count`.

use num_bigint::BigInt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclo::{BoxSpec, CyclotomicInt};
use crate::error::{Error, Result};

pub type SampleRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub sample_count: u64,
    pub worker_count: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, sample_count: u64, worker_count: usize) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        if worker_count == 0 {
            return Err(Error::InvalidParameter("worker count must be positive".into()));
        }
        Ok(Self { seed, sample_count, worker_count })
    }

    pub fn with_samples(&self, sample_count: u64) -> Self {
        Self { sample_count, ..*self }
    }
}

/// The random stream for sample `index` of a run seeded with `seed`.
pub fn sample_stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Partial result that can absorb another partial result covering the
/// indices that immediately follow it.
pub trait Tally: Default + Send {
    fn merge(&mut self, later: Self);
}

impl Tally for u64 {
    fn merge(&mut self, later: Self) {
        *self += later;
    }
}

impl<T: Send> Tally for Vec<T> {
    fn merge(&mut self, mut later: Self) {
        self.append(&mut later);
    }
}

impl Tally for BigInt {
    fn merge(&mut self, later: Self) {
        *self += later;
    }
}

impl<A: Tally, B: Tally> Tally for (A, B) {
    fn merge(&mut self, later: Self) {
        self.0.merge(later.0);
        self.1.merge(later.1);
    }
}

fn run_range<T, F>(seed: u64, range: std::ops::Range<u64>, f: &F) -> Result<T>
where
    T: Tally,
    F: Fn(&mut T, u64, &mut SampleRng) -> Result<()>,
{
    let mut tally = T::default();
    for i in range {
        let mut rng = sample_stream(seed, i);
        f(&mut tally, i, &mut rng)?;
    }
    Ok(tally)
}

/// Runs `f` once per sample index and merges the per-worker tallies in index
/// order. With one worker everything runs on the calling thread.
pub fn tally_samples<T, F>(cfg: &SamplerConfig, f: F) -> Result<T>
where
    T: Tally,
    F: Fn(&mut T, u64, &mut SampleRng) -> Result<()> + Sync,
{
    let total = cfg.sample_count;
    let workers = (cfg.worker_count as u64).clamp(1, total.max(1));
    if workers == 1 {
        return run_range(cfg.seed, 0..total, &f);
    }
    let chunk = total.div_ceil(workers);
    let ranges: Vec<_> = (0..workers)
        .map(|w| (w * chunk).min(total)..((w + 1) * chunk).min(total))
        .collect();
    let parts: Vec<Result<T>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| {
                let f = &f;
                scope.spawn(move || run_range(cfg.seed, r, f))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    });
    let mut acc = T::default();
    for part in parts {
        acc.merge(part?);
    }
    Ok(acc)
}

/// Uniform vertex of 𝒱(p,N): p − 1 independent fair signs times N.
pub fn sample_vertex<R: RngCore>(b: &BoxSpec, rng: &mut R) -> CyclotomicInt {
    let n = BigInt::from(b.n());
    let neg = -n.clone();
    let mut coeffs = Vec::with_capacity(b.dim());
    let mut bits = 0u64;
    for j in 0..b.dim() {
        if j % 64 == 0 {
            bits = rng.next_u64();
        }
        coeffs.push(if bits & 1 == 1 { n.clone() } else { neg.clone() });
        bits >>= 1;
    }
    CyclotomicInt::from_parts(b.p(), coeffs)
}

/// Uniform point of 𝓑(p,N): coefficients i.i.d. uniform on {−N,…,N}.
pub fn sample_box_point<R: RngCore>(b: &BoxSpec, rng: &mut R) -> CyclotomicInt {
    let n = b.n() as i64;
    let coeffs = (0..b.dim()).map(|_| BigInt::from(rng.gen_range(-n..=n))).collect();
    CyclotomicInt::from_parts(b.p(), coeffs)
}
