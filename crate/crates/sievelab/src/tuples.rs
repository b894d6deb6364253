//! Admissible k-tuples and the sparse interval-system geometry.
//!
//! A tuple of offsets `H = {h_1 < ... < h_k}` is admissible when, for every
//! prime `p`, the offsets cover fewer than `p` residue classes mod `p`.
//! The check only needs primes `p <= k`: for `p > k` at most `k < p`
//! classes can be covered.
//!
//! The interval system stacks windows `I_v = [H_v, H_v + H_v^eps]` whose
//! base points grow so fast that any two offsets drawn from distinct upper
//! half-windows differ by an element of the later interval. That spacing
//! property is what [`pick_tuple_in_windows`] guarantees for its output.

use crate::error::{Error, Result};
use crate::primes::{is_prime, primes_up_to};
use serde::Serialize;

/// A sorted set of k distinct non-negative offsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct KTuple {
    offsets: Vec<u64>,
}

impl KTuple {
    /// Build from offsets in any order; rejects duplicates and empty input.
    pub fn new(mut offsets: Vec<u64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidTuple);
        }
        offsets.sort_unstable();
        if offsets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTuple);
        }
        Ok(KTuple { offsets })
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn min(&self) -> u64 {
        self.offsets[0]
    }

    pub fn max(&self) -> u64 {
        *self.offsets.last().unwrap()
    }

    /// h_k − h_1.
    pub fn diameter(&self) -> u64 {
        self.max() - self.min()
    }

    pub fn contains(&self, h: u64) -> bool {
        self.offsets.binary_search(&h).is_ok()
    }

    /// The tuple with `m` inserted, or `None` if `m` is already present.
    pub fn with_offset(&self, m: u64) -> Option<KTuple> {
        if self.contains(m) {
            return None;
        }
        let mut offsets = self.offsets.clone();
        let pos = offsets.partition_point(|&h| h < m);
        offsets.insert(pos, m);
        Some(KTuple { offsets })
    }
}

impl std::fmt::Display for KTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.offsets.iter().map(|h| h.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Number of distinct residue classes mod `p` covered by the offsets.
pub fn residues_covered(tuple: &KTuple, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(residues_covered_unchecked(tuple.offsets(), p))
}

fn residues_covered_unchecked(offsets: &[u64], p: u64) -> u64 {
    if p as usize > offsets.len() {
        // residues can still collide, so count properly; only the p > diameter
        // shortcut is free
        if p > offsets[offsets.len() - 1] - offsets[0] {
            return offsets.len() as u64;
        }
    }
    let mut seen: Vec<u64> = offsets.iter().map(|h| h % p).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len() as u64
}

/// Admissibility: every prime `p <= k` must miss at least one residue class.
pub fn is_admissible(tuple: &KTuple) -> bool {
    let k = tuple.k() as u64;
    primes_up_to(k)
        .into_iter()
        .all(|p| residues_covered_unchecked(tuple.offsets(), p) < p)
}

/// The tuple length demanded by a window exponent: `ceil((6/eps)^2)`.
pub fn k_from_epsilon(eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let v = (6.0 / eps).powi(2).ceil();
    if v > u64::MAX as f64 {
        return Err(Error::Overflow("k_from_epsilon"));
    }
    Ok(v as u64)
}

/// Tracks per-prime residue coverage so greedy tuple construction can test
/// a candidate in O(π(k)) without rescanning the partial tuple.
struct CoverageSieve {
    /// (p, covered-flags, covered-count) for each prime p <= k_target
    primes: Vec<(u64, Vec<bool>, u64)>,
    accepted: Vec<u64>,
}

impl CoverageSieve {
    fn new(k_target: usize) -> Self {
        let primes = primes_up_to(k_target as u64)
            .into_iter()
            .map(|p| (p, vec![false; p as usize], 0u64))
            .collect();
        CoverageSieve {
            primes,
            accepted: Vec::with_capacity(k_target),
        }
    }

    /// Would the tuple stay admissible if `c` were appended? Only primes
    /// `p <= len + 1` constrain the answer.
    fn admits(&self, c: u64) -> bool {
        let next_len = (self.accepted.len() + 1) as u64;
        for (p, covered, count) in &self.primes {
            if *p > next_len {
                break;
            }
            let extra = u64::from(!covered[(c % p) as usize]);
            if count + extra >= *p {
                return false;
            }
        }
        true
    }

    fn accept(&mut self, c: u64) {
        for (p, covered, count) in &mut self.primes {
            let r = (c % *p) as usize;
            if !covered[r] {
                covered[r] = true;
                *count += 1;
            }
        }
        self.accepted.push(c);
    }
}

/// First-fit greedy tuple construction: scan candidates in ascending order,
/// accept whenever the partial tuple stays admissible, stop at `k` offsets.
pub fn greedy_admissible(k: usize, candidates: &[u64]) -> Result<KTuple> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".to_string()));
    }
    if candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "candidates must be strictly increasing".to_string(),
        ));
    }
    let mut sieve = CoverageSieve::new(k);
    for &c in candidates {
        if sieve.admits(c) {
            sieve.accept(c);
            if sieve.accepted.len() == k {
                let tuple = KTuple::new(sieve.accepted)?;
                debug_assert!(is_admissible(&tuple));
                return Ok(tuple);
            }
        }
    }
    Err(Error::CandidatesExhausted {
        accepted: sieve.accepted.len(),
        needed: k,
    })
}

/// One rung of the interval system: base point `h`, the full interval
/// `I = [h, h + floor(h^eps)]`, and the upper half-window `I'`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntervalEntry {
    pub h: u64,
    pub interval: (u64, u64),
    pub window: (u64, u64),
}

/// The stacked intervals `I_1, I_2, ...` with doubly-exponential growth.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalSystem {
    pub epsilon: f64,
    pub entries: Vec<IntervalEntry>,
}

/// floor(h^eps) with exact integer arithmetic whenever `1/eps` is an integer
/// (the common cases eps = 1, 1/2, 1/3, ...); falls back to f64 otherwise.
fn floor_pow(h: u64, eps: f64) -> u64 {
    if let Some(m) = recip_exponent(eps) {
        if m == 1 {
            return h;
        }
        // largest w with w^m <= h, by binary search in u128
        let mut lo = 1u64;
        let mut hi = 1u64 << (64 / m as u32 + 1).min(63);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if checked_pow_u128(mid, m).map(|v| v <= h as u128) == Some(true) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    } else {
        (h as f64).powf(eps).floor() as u64
    }
}

/// Least H with H^eps > c, again exact when `1/eps` is an integer.
fn least_with_pow_above(c: u64, eps: f64) -> Result<u64> {
    if let Some(m) = recip_exponent(eps) {
        let target = checked_pow_u128(c, m).ok_or(Error::Overflow("interval base"))?;
        let next = target + 1;
        if next > u64::MAX as u128 {
            return Err(Error::Overflow("interval base"));
        }
        return Ok(next as u64);
    }
    let x = (c as f64).powf(1.0 / eps);
    if !x.is_finite() || x >= u64::MAX as f64 {
        return Err(Error::Overflow("interval base"));
    }
    // f64 guess, then nudge to the exact boundary
    let mut h = (x.floor() as u64).saturating_sub(2).max(2);
    while (h as f64).powf(eps) <= c as f64 {
        h += 1;
    }
    Ok(h)
}

fn recip_exponent(eps: f64) -> Option<u64> {
    let m = (1.0 / eps).round();
    ((1.0 / eps - m).abs() < 1e-9 && m >= 1.0).then_some(m as u64)
}

fn checked_pow_u128(base: u64, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
        if acc > u128::from(u64::MAX).pow(2) {
            return None;
        }
    }
    Some(acc)
}

/// Build `count` interval entries starting from `H_1 = h1`. Each later base
/// is the least integer with `H^eps > 2 * H_prev`, which makes the geometry
/// canonical. Window lower ends round halves up.
pub fn interval_system(eps: f64, h1: u64, count: usize) -> Result<IntervalSystem> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if h1 < 2 {
        return Err(Error::InvalidArgument("h1 must be at least 2".to_string()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument(
            "count must be at least 1".to_string(),
        ));
    }
    let mut entries = Vec::with_capacity(count);
    let mut h = h1;
    for i in 0..count {
        let width = floor_pow(h, eps);
        let end = h
            .checked_add(width)
            .ok_or(Error::Overflow("interval end"))?;
        entries.push(IntervalEntry {
            h,
            interval: (h, end),
            window: (h + width.div_ceil(2), end),
        });
        if i + 1 < count {
            let doubled = h.checked_mul(2).ok_or(Error::Overflow("interval base"))?;
            h = least_with_pow_above(doubled, eps)?;
        }
    }
    Ok(IntervalSystem {
        epsilon: eps,
        entries,
    })
}

/// Choose one offset per upper half-window, first-fit, keeping the partial
/// tuple admissible and every pairwise difference `h_u - h_v` (v < u) inside
/// the interval `I_u`. The scan for window `u` therefore starts no lower
/// than `H_u + h_{u-1}`. Reports the 1-based window index if a window has
/// no viable offset.
pub fn pick_tuple_in_windows(sys: &IntervalSystem, k: usize) -> Result<KTuple> {
    if k == 0 || k > sys.entries.len() {
        return Err(Error::InvalidArgument(format!(
            "k must be in 1..={}",
            sys.entries.len()
        )));
    }
    let mut sieve = CoverageSieve::new(k);
    let mut prev: Option<u64> = None;
    for (idx, entry) in sys.entries.iter().take(k).enumerate() {
        let spacing_lo = match prev {
            // h - prev >= H  <=>  h >= H + prev; differences to earlier
            // offsets are then even larger
            Some(p) => entry
                .h
                .checked_add(p)
                .ok_or(Error::Overflow("window spacing"))?,
            None => 0,
        };
        let lo = entry.window.0.max(spacing_lo);
        let mut chosen = None;
        for c in lo..=entry.window.1 {
            if sieve.admits(c) {
                chosen = Some(c);
                break;
            }
        }
        match chosen {
            Some(c) => {
                sieve.accept(c);
                prev = Some(c);
            }
            None => return Err(Error::WindowExhausted { index: idx + 1 }),
        }
    }
    let tuple = KTuple::new(sieve.accepted)?;
    debug_assert!(is_admissible(&tuple));
    Ok(tuple)
}
