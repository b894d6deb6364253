//! sievelab: exact desk-scale computations around prime k-tuples.
//!
//! The crate bundles five cooperating toolkits:
//!
//! * [`primes`] — segmented sieving, deterministic primality, prime
//!   counting, and consecutive-gap queries;
//! * [`tuples`] — admissible k-tuples, greedy construction, and the sparse
//!   interval-system geometry with its spacing guarantee;
//! * [`series`] — singular series values with certified enclosures, uniform
//!   lower bounds, and windowed ratio averages;
//! * [`gpy`] — truncated divisor-sum sieve weights, the sums `A` and `S_i`
//!   with two independent evaluation strategies, analytic main terms, and
//!   the inequality ledger for the weighted double sum over prime-free
//!   rows;
//! * [`maillet`] — Goldbach/Maillet witness searches, interval coverage
//!   scans, de Polignac gap counts, and normalized gap histograms.
//!
//! All parallel reductions are deterministic: fixed chunking plus ordered
//! combining makes every public number independent of the thread count.

pub mod error;
pub mod gpy;
pub mod maillet;
pub mod primes;
pub mod series;
pub mod sum;
pub mod tuples;

pub use error::{Error, Result};
pub use gpy::{
    analytic_b, contradiction_ledger, ratio_report, sum_a, sum_prime_shift, weight, LedgerReport,
    RatioReport, SieveParams, SumStrategy,
};
pub use maillet::{
    goldbach_witness, maillet_witness, normalized_gap_histogram, polignac_count, scan_interval,
    GapNormalizer, Histogram, Parity, ScanReport, Witness, WitnessKind,
};
pub use primes::{
    bt_check, gaps, is_prime, nth_prime, prime_count, sieve_segment, BtCheck, PrimeTable,
};
pub use series::{
    c1_lower_bound, series_ratio, singular_series, window_ratios, windowed_average, SeriesValue,
};
pub use tuples::{
    greedy_admissible, interval_system, is_admissible, k_from_epsilon, pick_tuple_in_windows,
    residues_covered, IntervalSystem, KTuple,
};
