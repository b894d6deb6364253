//! Rigorous-enclosure evaluation of the singular series
//! `S(H) = prod_p (1 - 1/p)^{-k} (1 - nu_p(H)/p)` and its windowed averages.
//!
//! Products are evaluated in log space with compensated summation. Factors
//! for `p <= P0` are exact; for `p > P0` (with `P0` past the tuple diameter,
//! so `nu_p = k` there) the omitted log mass is bounded by
//!
//! ```text
//! |log[(1 - k/p)(1 - 1/p)^{-k}]| <= k^2/p^2 * (1 + k/P0),
//! sum_{p > P0} 1/p^2 < 1.1 / (P0 log P0)
//! ```
//!
//! which yields a certified interval `[value * exp(-tail), value * exp(tail)]`
//! around the true infinite product.

use crate::error::{Error, Result};
use crate::primes::primes_up_to;
use crate::sum::Neumaier;
use crate::tuples::{is_admissible, KTuple};
use serde::Serialize;

/// A truncated singular-series value together with a bound on the omitted
/// log mass. The true value lies in `[lower(), upper()]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_prime: u64,
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn lower(&self) -> f64 {
        self.value * (-self.tail_bound).exp()
    }

    pub fn upper(&self) -> f64 {
        self.value * self.tail_bound.exp()
    }

    pub fn width(&self) -> f64 {
        self.upper() - self.lower()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

fn tail_bound(k: u64, p0: u64) -> f64 {
    if k <= 1 {
        // every omitted factor is exactly 1
        return 0.0;
    }
    let kf = k as f64;
    let p0f = p0 as f64;
    kf * kf * (1.0 + kf / p0f) * 1.1 / (p0f * p0f.ln())
}

fn required_p0(tuple: &KTuple) -> u64 {
    (2 * tuple.k() as u64).max(tuple.diameter() + 1)
}

/// Exact-factor singular series over `p <= p0` plus a certified tail bound.
/// Needs `p0 >= max(2k, diameter + 1)` so the tail may assume `nu_p = k`.
/// Returns value 0 (with zero tail) exactly when the tuple is inadmissible.
pub fn singular_series(tuple: &KTuple, p0: u64) -> Result<SeriesValue> {
    let required = required_p0(tuple);
    if p0 < required {
        return Err(Error::TruncationTooSmall { p0, required });
    }
    let k = tuple.k() as u64;
    let kf = k as f64;
    let diameter = tuple.diameter();
    let mut log_acc = Neumaier::new();
    for p in primes_up_to(p0) {
        let nu = if p > diameter {
            k
        } else {
            distinct_residues(tuple.offsets(), p)
        };
        if nu == p {
            return Ok(SeriesValue {
                value: 0.0,
                truncation_prime: p0,
                tail_bound: 0.0,
            });
        }
        let pf = p as f64;
        log_acc.add(-kf * (-1.0 / pf).ln_1p());
        log_acc.add((-(nu as f64) / pf).ln_1p());
    }
    Ok(SeriesValue {
        value: log_acc.value().exp(),
        truncation_prime: p0,
        tail_bound: tail_bound(k, p0),
    })
}

fn distinct_residues(offsets: &[u64], p: u64) -> u64 {
    let mut rs: Vec<u64> = offsets.iter().map(|h| h % p).collect();
    rs.sort_unstable();
    rs.dedup();
    rs.len() as u64
}

/// Certified lower bound for
/// `c1(k) = prod_{p <= 2k} 1/p * prod_{p > 2k} (1 - k/p)(1 - 1/p)^{-k}`,
/// the uniform floor under `S(H)` for every admissible k-tuple.
pub fn c1_lower_bound(k: u64, p0: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".to_string()));
    }
    if p0 <= 2 * k {
        return Err(Error::TruncationTooSmall {
            p0,
            required: 2 * k + 1,
        });
    }
    let kf = k as f64;
    let mut log_acc = Neumaier::new();
    for p in primes_up_to(p0) {
        let pf = p as f64;
        if p <= 2 * k {
            log_acc.add(-pf.ln());
        } else {
            log_acc.add((-kf / pf).ln_1p());
            log_acc.add(-kf * (-1.0 / pf).ln_1p());
        }
    }
    // the omitted factors can shift the product by at most exp(+-tail);
    // subtract the tail to stay a certified lower bound
    Ok((log_acc.value() - tail_bound(k, p0)).exp())
}

/// Shared per-prime tables for ratio evaluations against a fixed tuple:
/// `nu_p(H)`, the offsets' residues, and the two candidate log factors of
/// `S(H ∪ {m}) / S(H)` (collision / no collision at `p`).
struct RatioContext<'a> {
    tuple: &'a KTuple,
    primes: Vec<u64>,
    /// residues `h mod p`, k entries per prime
    hmod: Vec<u64>,
    /// `-ln(1 - 1/p)`, added for every prime
    base_term: Vec<f64>,
    /// `ln(1 - 1/(p - nu_p))`, added only when `m` misses all residues
    miss_term: Vec<f64>,
}

impl<'a> RatioContext<'a> {
    fn build(tuple: &'a KTuple, p0_max: u64) -> Self {
        let primes = primes_up_to(p0_max);
        let k = tuple.k();
        let mut hmod = Vec::with_capacity(primes.len() * k);
        let mut base_term = Vec::with_capacity(primes.len());
        let mut miss_term = Vec::with_capacity(primes.len());
        for &p in &primes {
            let start = hmod.len();
            for &h in tuple.offsets() {
                hmod.push(h % p);
            }
            let mut rs: Vec<u64> = hmod[start..].to_vec();
            rs.sort_unstable();
            rs.dedup();
            let nu = rs.len() as f64;
            let pf = p as f64;
            base_term.push(-(-1.0 / pf).ln_1p());
            // -inf when nu = p - 1; only ever selected for inadmissible
            // unions, which are filtered out before evaluation
            miss_term.push((-1.0 / (pf - nu)).ln_1p());
        }
        RatioContext {
            tuple,
            primes,
            hmod,
            base_term,
            miss_term,
        }
    }

    /// Truncated-product ratio for one extra offset `m`, over `p <= p0_eff`.
    /// Caller guarantees `m` is not an offset and the union is admissible.
    fn ratio(&self, m: u64, p0_eff: u64) -> f64 {
        let k = self.tuple.k();
        let mut acc = Neumaier::new();
        for (i, &p) in self.primes.iter().enumerate() {
            if p > p0_eff {
                break;
            }
            let r = m % p;
            let collides = self.hmod[i * k..(i + 1) * k].contains(&r);
            acc.add(self.base_term[i]);
            if !collides {
                acc.add(self.miss_term[i]);
            }
        }
        acc.value().exp()
    }
}

fn ratio_p0_eff(tuple: &KTuple, union: &KTuple, p0: u64) -> u64 {
    p0.max(required_p0(union)).max(2 * (tuple.k() as u64 + 1))
}

/// `S(H ∪ {m}) / S(H)` as a ratio of truncated products over a shared prime
/// range. Returns 1 when `m` is already an offset and 0 when the union is
/// inadmissible. The truncation deepens automatically when the union's
/// diameter exceeds `p0`.
pub fn series_ratio(tuple: &KTuple, m: u64, p0: u64) -> Result<f64> {
    if !is_admissible(tuple) {
        return Err(Error::InadmissibleTuple);
    }
    let union = match tuple.with_offset(m) {
        None => return Ok(1.0),
        Some(u) => u,
    };
    if !is_admissible(&union) {
        return Ok(0.0);
    }
    let p0_eff = ratio_p0_eff(tuple, &union, p0);
    let ctx = RatioContext::build(tuple, p0_eff);
    Ok(ctx.ratio(m, p0_eff))
}

/// The individual `(m, ratio)` pairs behind [`windowed_average`]: series
/// ratios for every `m` in the inclusive window `[m_start, m_start + len]`,
/// evaluated in parallel and returned in ascending order.
pub fn window_ratios(tuple: &KTuple, m_start: u64, len: u64, p0: u64) -> Result<Vec<(u64, f64)>> {
    if !is_admissible(tuple) {
        return Err(Error::InadmissibleTuple);
    }
    let m_end = m_start
        .checked_add(len)
        .ok_or(Error::Overflow("window end"))?;
    // the union diameter peaks at one of the window ends
    let p0_max = [m_start, m_end]
        .into_iter()
        .filter_map(|m| tuple.with_offset(m).map(|u| ratio_p0_eff(tuple, &u, p0)))
        .max()
        .unwrap_or(p0.max(required_p0(tuple)))
        .max(p0.max(required_p0(tuple)));
    let ctx = RatioContext::build(tuple, p0_max);
    let chunks = crate::sum::par_chunks(m_start, m_end, |a, b| {
        (a..=b)
            .map(|m| {
                let r = match tuple.with_offset(m) {
                    None => 1.0,
                    Some(union) => {
                        if is_admissible(&union) {
                            ctx.ratio(m, ratio_p0_eff(tuple, &union, p0))
                        } else {
                            0.0
                        }
                    }
                };
                (m, r)
            })
            .collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Arithmetic mean of `series_ratio(tuple, m, p0)` over the inclusive window
/// `m in [m_start, m_start + len]` (`len + 1` terms).
pub fn windowed_average(tuple: &KTuple, m_start: u64, len: u64, p0: u64) -> Result<f64> {
    let ratios = window_ratios(tuple, m_start, len, p0)?;
    let mut acc = Neumaier::new();
    for &(_, r) in &ratios {
        acc.add(r);
    }
    Ok(acc.value() / (len as f64 + 1.0))
}
