//! Goldbach/Maillet classification with witnesses, interval coverage scans,
//! de Polignac gap counts, and normalized gap histograms.
//!
//! An integer is a Goldbach number if it is a sum of two primes and a
//! Maillet number if it is a difference of two primes. Witness searches run
//! in ascending `q`, so the returned witness is canonical. A failed Maillet
//! search is *inconclusive*: only `q` up to the search bound were tried, so
//! scan reports speak of "unrepresented under the bound", never of a
//! disproof.

use crate::error::{Error, Result};
use crate::primes::{is_prime, prime_count, PrimeStream};
use crate::sum::par_chunks;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// p + q = n
    Goldbach,
    /// p - q = n
    Maillet,
}

/// A verified representation of `n` by two primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub kind: WitnessKind,
}

impl Witness {
    /// Both entries prime and the defining equation exact.
    pub fn verify(&self) -> bool {
        is_prime(self.p)
            && is_prime(self.q)
            && match self.kind {
                WitnessKind::Goldbach => self.p.checked_add(self.q) == Some(self.n),
                WitnessKind::Maillet => self.p.checked_sub(self.q) == Some(self.n),
            }
    }
}

/// Smallest-q Goldbach witness: the least prime `q` with `n - q` prime.
pub fn goldbach_witness(n: u64) -> Option<Witness> {
    if n < 4 {
        return None;
    }
    for q in PrimeStream::starting_at(2) {
        if q > n - 2 {
            return None;
        }
        if is_prime(n - q) {
            return Some(Witness {
                n,
                p: n - q,
                q,
                kind: WitnessKind::Goldbach,
            });
        }
    }
    None
}

/// Smallest-q Maillet witness under a search bound: the least prime
/// `q <= bound` with `q + n` prime. `None` means no witness below the
/// bound, which never disproves representability.
pub fn maillet_witness(n: u64, bound: u64) -> Option<Witness> {
    if n == 0 {
        return None;
    }
    for q in PrimeStream::starting_at(2) {
        if q > bound {
            return None;
        }
        let p = q.checked_add(n)?;
        if is_prime(p) {
            return Some(Witness {
                n,
                p,
                q,
                kind: WitnessKind::Maillet,
            });
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    All,
}

/// Outcome of a coverage scan over `[x, x + len]`.
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub interval: (u64, u64),
    pub search_bound: u64,
    pub parity: Parity,
    pub scanned: u64,
    pub represented: u64,
    /// the n with no witness under the bound, ascending
    pub exceptions: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Witness>>,
}

/// Classify every `n` of the chosen parity in the inclusive interval
/// `[x, x + len]` via the bounded Maillet search. Scans run in parallel and
/// merge in ascending order, so exception lists are reproducible
/// bit-for-bit whatever the worker count.
pub fn scan_interval(
    x: u64,
    len: u64,
    bound: u64,
    parity: Parity,
    keep_witnesses: bool,
) -> Result<ScanReport> {
    if x == 0 {
        return Err(Error::InvalidArgument(
            "scan starts at n >= 1 (0 = p - p is excluded)".to_string(),
        ));
    }
    let end = x.checked_add(len).ok_or(Error::Overflow("x + len"))?;
    // small primes are reused by every worker
    let qs: Vec<u64> = crate::primes::primes_up_to(bound);
    if qs.is_empty() {
        return Err(Error::InvalidArgument(
            "search bound admits no primes".to_string(),
        ));
    }
    let per_chunk = par_chunks(x, end, |a, b| {
        let mut witnesses = Vec::new();
        let mut exceptions = Vec::new();
        let mut scanned = 0u64;
        for n in a..=b {
            if parity == Parity::Even && n % 2 != 0 {
                continue;
            }
            scanned += 1;
            let hit = qs.iter().copied().find_map(|q| {
                let p = q.checked_add(n)?;
                is_prime(p).then_some(Witness {
                    n,
                    p,
                    q,
                    kind: WitnessKind::Maillet,
                })
            });
            match hit {
                Some(w) => witnesses.push(w),
                None => exceptions.push(n),
            }
        }
        (scanned, witnesses, exceptions)
    });
    let mut scanned = 0u64;
    let mut witnesses = Vec::new();
    let mut exceptions = Vec::new();
    for (s, ws, es) in per_chunk {
        scanned += s;
        witnesses.extend(ws);
        exceptions.extend(es);
    }
    Ok(ScanReport {
        interval: (x, end),
        search_bound: bound,
        parity,
        scanned,
        represented: scanned - exceptions.len() as u64,
        exceptions,
        witnesses: keep_witnesses.then_some(witnesses),
    })
}

/// Count consecutive prime pairs at distance `d`:
/// `#{ (p, p') consecutive : p' - p = d, p' <= x }`. Odd `d >= 3` can only
/// be realized by the pair (2, 2+d), which is never consecutive, so those
/// counts are 0.
pub fn polignac_count(d: u64, x: u64) -> u64 {
    let mut count = 0u64;
    let mut prev: Option<u64> = None;
    for p in PrimeStream::starting_at(0) {
        if p > x {
            break;
        }
        if let Some(q) = prev {
            if p - q == d {
                count += 1;
            }
        }
        prev = Some(p);
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapNormalizer {
    /// (p' - p) / log p
    LogP,
    /// (p' - p) / log n, where p is the n-th prime
    LogN,
}

/// Histogram of normalized gaps with fixed-width bins starting at 0.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub normalizer: GapNormalizer,
    /// count of samples in `[i * bin_width, (i+1) * bin_width)`
    pub counts: Vec<u64>,
    pub samples: u64,
}

impl Histogram {
    pub fn bin_range(&self, i: usize) -> (f64, f64) {
        (i as f64 * self.bin_width, (i + 1) as f64 * self.bin_width)
    }
}

/// Bucket the normalized gaps of all consecutive prime pairs lying wholly
/// inside `[lo, hi]`. Under the index normalizer the pair starting at the
/// very first prime (index 1, log 1 = 0) is skipped.
pub fn normalized_gap_histogram(
    lo: u64,
    hi: u64,
    bin_width: f64,
    normalizer: GapNormalizer,
) -> Result<Histogram> {
    if lo >= hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    // index of the first prime >= lo
    let mut index = prime_count(lo.saturating_sub(1));
    let mut counts: Vec<u64> = Vec::new();
    let mut samples = 0u64;
    let mut prev: Option<(u64, u64)> = None; // (prime, its index)
    for p in PrimeStream::starting_at(lo) {
        if p > hi {
            break;
        }
        index += 1;
        if let Some((q, qi)) = prev {
            let gap = (p - q) as f64;
            let denom = match normalizer {
                GapNormalizer::LogP => (q as f64).ln(),
                GapNormalizer::LogN => {
                    if qi == 1 {
                        prev = Some((p, index));
                        continue;
                    }
                    (qi as f64).ln()
                }
            };
            let sample = gap / denom;
            let bin = (sample / bin_width).floor() as usize;
            if counts.len() <= bin {
                counts.resize(bin + 1, 0);
            }
            counts[bin] += 1;
            samples += 1;
        }
        prev = Some((p, index));
    }
    Ok(Histogram {
        bin_width,
        normalizer,
        counts,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goldbach_examples() {
        let w = goldbach_witness(4).unwrap();
        assert_eq!((w.p, w.q), (2, 2));
        assert!(w.verify());
        assert!(goldbach_witness(11).is_none());
        let w = goldbach_witness(1_000_000).unwrap();
        assert_eq!(w.q, 17); // smallest q, fixed by the sieve oracle
        assert_eq!(w.p, 999_983);
        assert!(w.verify());
    }

    #[test]
    fn maillet_examples() {
        let w = maillet_witness(2, 100).unwrap();
        assert_eq!((w.q, w.p), (3, 5)); // q=2 fails: 4 is composite
        assert!(w.verify());
        assert!(maillet_witness(7, 10_000).is_none());
        let w = maillet_witness(9, 100).unwrap();
        assert_eq!((w.q, w.p), (2, 11));
    }

    #[test]
    fn maillet_witness_monotone_in_bound() {
        for n in [2u64, 6, 9, 30, 100, 1234] {
            if let Some(w) = maillet_witness(n, 50) {
                let w2 = maillet_witness(n, 500).unwrap();
                assert_eq!(w, w2, "bigger bound must keep the smallest witness");
            }
        }
    }

    #[test]
    fn odd_maillet_forces_q2() {
        // odd n is representable iff n + 2 is prime
        for n in (1..10_000u64).step_by(2) {
            let w = maillet_witness(n, 10_000);
            assert_eq!(w.is_some(), is_prime(n + 2), "n={n}");
            if let Some(w) = w {
                assert_eq!(w.q, 2);
            }
        }
    }

    #[test]
    fn scan_small_even_interval_has_no_exceptions() {
        let rep = scan_interval(4, 96, 100, Parity::Even, true).unwrap();
        assert_eq!(rep.scanned, 49);
        assert_eq!(rep.represented, 49);
        assert!(rep.exceptions.is_empty());
        for w in rep.witnesses.as_deref().unwrap() {
            assert!(w.verify());
            assert!(w.q <= 100);
        }
    }

    #[test]
    fn scan_single_point() {
        let rep = scan_interval(3, 0, 100, Parity::All, true).unwrap();
        assert_eq!(rep.scanned, 1);
        assert_eq!(rep.represented, 1);
        let w = &rep.witnesses.as_deref().unwrap()[0];
        assert_eq!((w.q, w.p), (2, 5));
    }

    #[test]
    fn scan_counts_are_consistent() {
        let rep = scan_interval(3, 50, 30, Parity::All, false).unwrap();
        assert_eq!(rep.represented + rep.exceptions.len() as u64, rep.scanned);
        assert!(rep.exceptions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn polignac_examples() {
        assert_eq!(polignac_count(2, 20), 4);
        assert_eq!(polignac_count(1, 1_000_000), 1);
        assert_eq!(polignac_count(2, 10_000), 205);
        assert_eq!(polignac_count(3, 10_000), 0); // odd gaps above 1 are impossible
    }

    #[test]
    fn histogram_single_pair() {
        let h = normalized_gap_histogram(3, 5, 0.5, GapNormalizer::LogP).unwrap();
        assert_eq!(h.samples, 1);
        // 2 / log 3 = 1.8204... lands in bin [1.5, 2.0)
        assert_eq!(h.counts.iter().position(|&c| c == 1), Some(3));
    }

    #[test]
    fn histogram_to_100_has_24_samples() {
        // 25 primes up to 100 give 24 gaps wholly inside [2, 100]
        let h = normalized_gap_histogram(2, 100, 0.5, GapNormalizer::LogP).unwrap();
        assert_eq!(h.samples, 24);
        assert_eq!(h.counts.iter().sum::<u64>(), h.samples);
    }

    #[test]
    fn histogram_mass_is_conserved() {
        for norm in [GapNormalizer::LogP, GapNormalizer::LogN] {
            let h = normalized_gap_histogram(1_000, 20_000, 0.25, norm).unwrap();
            assert_eq!(h.counts.iter().sum::<u64>(), h.samples);
            assert!(h.samples > 0);
        }
    }

    #[test]
    fn histogram_log_n_skips_the_unit_index() {
        // starting at 2, the pair (2,3) has index 1 and log 1 = 0
        let with_first = normalized_gap_histogram(2, 100, 0.5, GapNormalizer::LogN).unwrap();
        assert_eq!(with_first.samples, 23);
    }

    #[test]
    fn scan_rejects_zero_start() {
        assert!(scan_interval(0, 5, 100, Parity::All, false).is_err());
    }

    #[test]
    fn table_backed_and_mr_agree() {
        let t = crate::primes::PrimeTable::sieve(0, 3_000).unwrap();
        for n in 0..=3_000u64 {
            assert_eq!(t.is_prime(n), is_prime(n));
        }
    }
}
