//! Segmented prime generation and primality/counting/gap queries.
//!
//! Everything downstream (tuple admissibility, sieve weights, Goldbach and
//! Maillet scans) funnels its prime questions through this module. Two
//! complementary mechanisms are provided:
//!
//! * [`PrimeTable`] — a bit-packed primality map for one window `[lo, hi]`,
//!   built by a segmented sieve of Eratosthenes. Odd integers get one bit
//!   each; 2 is special-cased. Immutable after construction, cheap to share
//!   across workers.
//! * [`is_prime`] — deterministic Miller–Rabin for isolated 64-bit queries.
//!   The witness set `{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}` is
//!   deterministic for all inputs below 3.3 · 10^24, which covers `u64`.
//!
//! Counting and streaming queries (`prime_count`, `nth_prime`, `gaps`) run
//! the segmented sieve window by window with a fixed default span, so memory
//! stays flat no matter how far out the query reaches.

use crate::error::{Error, Result};

/// Default width of one sieve segment (integers per window).
pub const SEGMENT_SPAN: u64 = 1 << 20;

/// Largest window a single [`PrimeTable`] may cover. A table stores one bit
/// per odd integer, so this cap bounds the bitmap at 256 MiB.
pub const TABLE_SPAN_CAP: u64 = 1 << 32;

/// Simple sieve of Eratosthenes, used for base primes and small ranges.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::with_capacity(estimated_pi(limit));
    primes.push(2);
    let mut p = 3usize;
    while p * p <= n {
        if !composite[p] {
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += 2 * p;
            }
        }
        p += 2;
    }
    let mut q = 3usize;
    while q <= n {
        if !composite[q] {
            primes.push(q as u64);
        }
        q += 2;
    }
    primes
}

fn estimated_pi(x: u64) -> usize {
    if x < 10 {
        return 8;
    }
    let xf = x as f64;
    (1.3 * xf / xf.ln()) as usize
}

/// Bit-packed primality over one inclusive window `[lo, hi]`.
///
/// Bits cover only odd integers; `is_prime(2)` is answered specially. The
/// table is immutable once built.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    /// bit i == 1  <=>  first_odd + 2i is prime
    words: Vec<u64>,
    first_odd: u64,
}

impl PrimeTable {
    /// Sieve the window `[lo, hi]` (inclusive) with the default span cap.
    pub fn sieve(lo: u64, hi: u64) -> Result<Self> {
        Self::sieve_capped(lo, hi, TABLE_SPAN_CAP)
    }

    /// Sieve with an explicit memory cap on the window width.
    pub fn sieve_capped(lo: u64, hi: u64, cap: u64) -> Result<Self> {
        Self::sieve_with_base(lo, hi, cap, None)
    }

    /// `base`, when supplied, must hold every prime up to `isqrt(hi)`.
    fn sieve_with_base(lo: u64, hi: u64, cap: u64, base: Option<&[u64]>) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        let span = hi - lo;
        if span > cap {
            return Err(Error::RangeTooLarge { span, cap });
        }
        let first_odd = if lo.is_multiple_of(2) { lo + 1 } else { lo };
        let n_bits = if first_odd > hi {
            0
        } else {
            ((hi - first_odd) / 2 + 1) as usize
        };
        let mut words = vec![u64::MAX; n_bits.div_ceil(64).max(1)];
        // clear slack bits past n_bits
        for b in n_bits..words.len() * 64 {
            words[b / 64] &= !(1u64 << (b % 64));
        }
        let mut table = PrimeTable {
            lo,
            hi,
            words,
            first_odd,
        };
        // 1 (and 0) are not prime
        if first_odd <= 1 {
            table.clear(1.max(first_odd));
        }
        if n_bits > 0 {
            let root = hi.isqrt();
            let own_base;
            let base = match base {
                Some(b) => b,
                None => {
                    own_base = primes_up_to(root);
                    &own_base
                }
            };
            for &p in base.iter().skip(1) {
                if p > root {
                    break;
                }
                // first odd multiple of p that is >= max(p^2, first_odd)
                let mut start = p * p;
                if start < first_odd {
                    start = first_odd.div_ceil(p) * p;
                    if start % 2 == 0 {
                        start += p;
                    }
                }
                let mut m = start;
                while m <= hi {
                    table.clear(m);
                    m += 2 * p;
                }
            }
        }
        Ok(table)
    }

    #[inline]
    fn clear(&mut self, odd: u64) {
        let i = ((odd - self.first_odd) / 2) as usize;
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Primality of `n`. Panics if `n` is outside `[lo, hi]`.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            self.lo <= n && n <= self.hi,
            "PrimeTable query {n} outside [{}, {}]",
            self.lo,
            self.hi
        );
        if n == 2 {
            return true;
        }
        if n < 2 || n.is_multiple_of(2) {
            return false;
        }
        let i = ((n - self.first_odd) / 2) as usize;
        self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    /// Ascending primes in the window.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let two = (self.lo <= 2 && 2 <= self.hi).then_some(2u64);
        let odds = self
            .words
            .iter()
            .enumerate()
            .flat_map(move |(w, &word)| SetBits { word, base: w * 64 })
            .map(move |bit| self.first_odd + 2 * bit as u64);
        two.into_iter().chain(odds)
    }

    pub fn count(&self) -> u64 {
        let two = u64::from(self.lo <= 2 && 2 <= self.hi);
        two + self
            .words
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum::<u64>()
    }
}

struct SetBits {
    word: u64,
    base: usize,
}

impl Iterator for SetBits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

/// Sieve the inclusive window `[lo, hi]` into a fresh [`PrimeTable`].
pub fn sieve_segment(lo: u64, hi: u64) -> Result<PrimeTable> {
    PrimeTable::sieve(lo, hi)
}

/// Endless stream of primes `>= lo`, sieving one segment at a time. Base
/// primes are computed once and extended only when a segment's square root
/// outgrows them, so memory and per-segment cost stay flat.
pub struct PrimeStream {
    buffer: std::vec::IntoIter<u64>,
    next_lo: u64,
    base: Vec<u64>,
    base_limit: u64,
    done: bool,
}

impl PrimeStream {
    pub fn starting_at(lo: u64) -> Self {
        PrimeStream {
            buffer: Vec::new().into_iter(),
            next_lo: lo,
            base: Vec::new(),
            base_limit: 0,
            done: false,
        }
    }

    fn refill(&mut self) {
        let lo = self.next_lo;
        let hi = lo.saturating_add(SEGMENT_SPAN - 1);
        if hi <= lo || hi == u64::MAX {
            self.done = true;
        }
        if hi <= lo {
            return;
        }
        let root = hi.isqrt();
        if root > self.base_limit {
            // grow generously so the rebuild stays rare
            self.base_limit = (root * 2).max(1 << 12);
            self.base = primes_up_to(self.base_limit);
        }
        let segment = PrimeTable::sieve_with_base(lo, hi, TABLE_SPAN_CAP, Some(&self.base))
            .expect("segment span is below the cap");
        self.buffer = segment.iter().collect::<Vec<_>>().into_iter();
        self.next_lo = hi.saturating_add(1);
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(p) = self.buffer.next() {
                return Some(p);
            }
            if self.done {
                return None;
            }
            self.refill();
        }
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for any `u64` (Miller–Rabin with a witness set
/// proven exact far beyond 2^64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// π(x): the number of primes not exceeding `x`.
pub fn prime_count(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let mut count = 0u64;
    let mut lo = 0u64;
    while lo <= x {
        let hi = lo.saturating_add(SEGMENT_SPAN - 1).min(x);
        if hi == lo {
            count += u64::from(is_prime(lo));
            break;
        }
        count += PrimeTable::sieve(lo, hi)
            .expect("segment span is below the cap")
            .count();
        if hi == x {
            break;
        }
        lo = hi + 1;
    }
    count
}

/// The i-th prime, with `nth_prime(1) == 2`.
pub fn nth_prime(i: u64) -> Result<u64> {
    if i == 0 {
        return Err(Error::InvalidArgument(
            "prime indices start at 1".to_string(),
        ));
    }
    let mut seen = 0u64;
    for p in PrimeStream::starting_at(0) {
        seen += 1;
        if seen == i {
            return Ok(p);
        }
    }
    Err(Error::Overflow("nth_prime"))
}

/// Consecutive prime pairs `(p, q)` with `p` in `[lo, hi)`. The successor
/// `q` may fall beyond `hi`.
pub fn gaps(lo: u64, hi: u64) -> Result<Vec<(u64, u64)>> {
    if lo >= hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let mut out = Vec::new();
    let mut prev: Option<u64> = None;
    for p in PrimeStream::starting_at(lo) {
        if let Some(q) = prev {
            out.push((q, p));
        }
        if p >= hi {
            break;
        }
        prev = Some(p);
    }
    Ok(out)
}

/// Outcome of one Brun–Titchmarsh check: π(x+y) − π(x) against 2y/log y.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BtCheck {
    pub x: u64,
    pub y: u64,
    pub pi_diff: u64,
    pub bound: f64,
    pub holds: bool,
}

/// Compare the short-interval prime count π(x+y) − π(x) with the sieve
/// bound 2y/log y. Requires `y >= 3`; below that the bound degenerates.
pub fn bt_check(x: u64, y: u64) -> Result<BtCheck> {
    if x < 1 {
        return Err(Error::InvalidArgument("bt_check needs x >= 1".to_string()));
    }
    if y < 3 {
        return Err(Error::DegenerateBound(y));
    }
    let end = x.checked_add(y).ok_or(Error::Overflow("x + y"))?;
    let pi_diff = prime_count(end) - prime_count(x);
    let bound = 2.0 * y as f64 / (y as f64).ln();
    Ok(BtCheck {
        x,
        y,
        pi_diff,
        bound,
        holds: (pi_diff as f64) <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn segment_0_30_matches_trial_division() {
        let t = sieve_segment(0, 30).unwrap();
        let got: Vec<u64> = t.iter().collect();
        assert_eq!(got, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        for n in 0..=30 {
            assert_eq!(t.is_prime(n), trial_is_prime(n), "n={n}");
        }
    }

    #[test]
    fn segment_endpoints_inclusive() {
        let t = sieve_segment(89, 97).unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![89, 97]);
    }

    #[test]
    fn segment_millions_window() {
        // trial-division oracle over the window fixes the count at 75
        let t = sieve_segment(1_000_000, 1_001_000).unwrap();
        assert_eq!(t.count(), 75);
        for n in 1_000_000..=1_001_000 {
            assert_eq!(t.is_prime(n), trial_is_prime(n), "n={n}");
        }
    }

    #[test]
    fn segment_agrees_with_trial_division_high() {
        let lo = 1_000_000_000u64;
        let t = sieve_segment(lo, lo + 2_000).unwrap();
        for n in lo..=lo + 2_000 {
            assert_eq!(t.is_prime(n), trial_is_prime(n), "n={n}");
        }
    }

    #[test]
    fn segment_rejects_bad_ranges() {
        assert!(matches!(
            sieve_segment(5, 5),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            PrimeTable::sieve_capped(0, 1 << 22, 1 << 20),
            Err(Error::RangeTooLarge { .. })
        ));
    }

    #[test]
    fn miller_rabin_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007u64.wrapping_mul(3)));
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n={n}");
        }
    }

    #[test]
    fn prime_count_examples() {
        assert_eq!(prime_count(1), 0);
        assert_eq!(prime_count(100), 25);
        assert_eq!(prime_count(1_000_000), 78_498);
    }

    #[test]
    fn nth_prime_examples() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(6).unwrap(), 13);
        assert_eq!(nth_prime(10_000).unwrap(), 104_729);
        assert!(nth_prime(0).is_err());
    }

    #[test]
    fn count_inverts_nth_prime() {
        // prime_count(nth_prime(i)) == i, checked in one streaming pass
        let mut i = 0u64;
        for p in PrimeStream::starting_at(0) {
            i += 1;
            if i > 10_000 {
                break;
            }
            if i.is_multiple_of(997) || i <= 10 || i == 10_000 {
                assert_eq!(prime_count(p), i, "p={p}");
            }
        }
    }

    #[test]
    fn gap_pairs_small() {
        assert_eq!(gaps(2, 10).unwrap(), vec![(2, 3), (3, 5), (5, 7), (7, 11)]);
        assert_eq!(gaps(23, 29).unwrap(), vec![(23, 29)]);
        assert!(gaps(10, 10).is_err());
    }

    #[test]
    fn gap_pairs_window_count() {
        // oracle: 81 primes in [10^5, 10^5 + 10^3), one pair per prime
        let pairs = gaps(100_000, 101_000).unwrap();
        assert_eq!(pairs.len(), 81);
        for w in pairs.windows(2) {
            assert!(w[0].1 == w[1].0, "pairs must chain consecutively");
        }
        for &(p, q) in &pairs {
            assert!(p < q);
            assert!(is_prime(p) && is_prime(q));
        }
    }

    #[test]
    fn bt_check_examples() {
        let r = bt_check(1, 100).unwrap();
        assert_eq!(r.pi_diff, 26); // pi(101) - pi(1), fixed by the sieve oracle
        assert!((r.bound - 200.0 / 100f64.ln()).abs() < 1e-12);
        assert!(r.holds);

        let r = bt_check(10_000, 1_000).unwrap();
        assert!(r.holds);

        let r = bt_check(1, 3).unwrap();
        assert!((r.bound - 6.0 / 3f64.ln()).abs() < 1e-12);
        assert!(r.holds);

        assert!(matches!(bt_check(1, 2), Err(Error::DegenerateBound(2))));
    }

    #[test]
    fn prime_count_is_monotone() {
        let mut last = 0;
        for x in (0..2_000).step_by(37) {
            let c = prime_count(x);
            assert!(c >= last);
            last = c;
        }
    }
}
