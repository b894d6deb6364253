//! Compensated summation and deterministic parallel reduction.
//!
//! Every floating-point sum in this crate goes through a Neumaier
//! accumulator, and every parallel sum partitions its index range into
//! fixed-width chunks that are reduced in ascending order. The combination
//! makes results independent of the worker count: the same bits come out
//! of a run with 1 thread or 64.

use rayon::prelude::*;

/// Chunk width used by all parallel range sums. Fixed (not derived from
/// the thread count) so partial sums are grouped identically on every run.
pub const CHUNK_WIDTH: u64 = 1 << 16;

/// Neumaier's improved Kahan accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in index order.
pub fn sum_slice(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Split the inclusive range `[lo, hi]` into `CHUNK_WIDTH`-sized chunks,
/// map each chunk in parallel, and return the per-chunk results in
/// ascending chunk order.
pub fn par_chunks<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    debug_assert!(lo <= hi);
    let n_chunks = (hi - lo) / CHUNK_WIDTH + 1;
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let c_lo = lo + c * CHUNK_WIDTH;
            let c_hi = (c_lo + CHUNK_WIDTH - 1).min(hi);
            f(c_lo, c_hi)
        })
        .collect()
}

/// Deterministic parallel sum of `f(n)` over the inclusive range `[lo, hi]`.
pub fn par_range_sum<F>(lo: u64, hi: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let partials = par_chunks(lo, hi, |a, b| {
        let mut acc = Neumaier::new();
        for n in a..=b {
            acc.add(f(n));
        }
        acc.value()
    });
    sum_slice(&partials)
}
