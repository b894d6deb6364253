//! Browser bindings for the interactive demo page.
//!
//! Three operations are exposed: tuple inspection (admissibility, residue
//! coverage, singular series enclosure), normalized prime-gap histograms,
//! and windowed singular-series ratio curves. Each returns a JSON string —
//! either a payload or `{"error": ...}` — so the page never has to deal
//! with thrown exceptions. Inputs are capped to sizes a single-threaded
//! browser tab handles comfortably.

use serde_json::{json, Value};
use sievelab::{
    greedy_admissible, is_admissible, normalized_gap_histogram, residues_covered, singular_series,
    window_ratios, GapNormalizer, KTuple,
};
use wasm_bindgen::prelude::*;

const MAX_SPAN: u64 = 5_000_000;
const MAX_P0: u64 = 2_000_000;
const MAX_WINDOW: u64 = 20_000;

fn err(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn parse_offsets(text: &str) -> Result<KTuple, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse::<u64>()
                .map_err(|e| format!("bad offset {part:?}: {e}"))?,
        );
    }
    KTuple::new(out).map_err(|e| e.to_string())
}

fn tuple_report_value(offsets: &str, p0: u64) -> Result<Value, String> {
    let tuple = parse_offsets(offsets)?;
    let p0 = p0
        .max(2 * tuple.k() as u64)
        .max(tuple.diameter() + 1)
        .min(MAX_P0);
    let admissible = is_admissible(&tuple);
    let nu_table: Vec<Value> = (2..=tuple.k() as u64)
        .filter(|&p| sievelab::is_prime(p))
        .map(|p| {
            let nu = residues_covered(&tuple, p).expect("p is prime");
            json!({ "p": p, "nu": nu, "saturated": nu == p })
        })
        .collect();
    let series = singular_series(&tuple, p0).map_err(|e| e.to_string())?;
    Ok(json!({
        "offsets": tuple.offsets(),
        "k": tuple.k(),
        "diameter": tuple.diameter(),
        "admissible": admissible,
        "nu_table": nu_table,
        "series": {
            "p0": p0,
            "value": series.value,
            "lower": series.lower(),
            "upper": series.upper(),
            "width": series.width(),
        },
    }))
}

fn mine_tuple_value(k: usize, max_candidate: u64) -> Result<Value, String> {
    if k == 0 || k > 64 {
        return Err("k must lie in 1..=64".to_string());
    }
    let candidates: Vec<u64> = (0..=max_candidate.min(1_000_000)).collect();
    let tuple = greedy_admissible(k, &candidates).map_err(|e| e.to_string())?;
    Ok(json!({
        "k": k,
        "offsets": tuple.offsets(),
        "diameter": tuple.diameter(),
    }))
}

fn gap_histogram_value(lo: u64, hi: u64, width: f64, norm: &str) -> Result<Value, String> {
    if hi.saturating_sub(lo) > MAX_SPAN {
        return Err(format!("range too wide for the demo (max {MAX_SPAN})"));
    }
    let normalizer = match norm {
        "log_p" => GapNormalizer::LogP,
        "log_n" => GapNormalizer::LogN,
        other => return Err(format!("unknown normalizer {other:?}")),
    };
    let h = normalized_gap_histogram(lo, hi, width, normalizer).map_err(|e| e.to_string())?;
    let bins: Vec<Value> = h
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let (blo, bhi) = h.bin_range(i);
            json!({ "lo": blo, "hi": bhi, "count": c })
        })
        .collect();
    Ok(json!({
        "lo": lo,
        "hi": hi,
        "bin_width": h.bin_width,
        "normalizer": norm,
        "samples": h.samples,
        "bins": bins,
    }))
}

fn series_window_value(offsets: &str, m_start: u64, len: u64, p0: u64) -> Result<Value, String> {
    if len > MAX_WINDOW {
        return Err(format!("window too long for the demo (max {MAX_WINDOW})"));
    }
    let tuple = parse_offsets(offsets)?;
    let p0 = p0.clamp(2, MAX_P0);
    let ratios = window_ratios(&tuple, m_start, len, p0).map_err(|e| e.to_string())?;
    let mut sum = 0.0;
    let mut max_ratio: f64 = 0.0;
    for &(_, r) in &ratios {
        sum += r;
        max_ratio = max_ratio.max(r);
    }
    let points: Vec<Value> = ratios
        .iter()
        .map(|&(m, r)| json!({ "m": m, "ratio": r }))
        .collect();
    Ok(json!({
        "offsets": tuple.offsets(),
        "m_start": m_start,
        "len": len,
        "p0": p0,
        "mean": sum / ratios.len() as f64,
        "max_ratio": max_ratio,
        "points": points,
    }))
}

/// Tuple inspection: admissibility, residue coverage, series enclosure.
#[wasm_bindgen]
pub fn tuple_report(offsets: &str, p0: u32) -> String {
    match tuple_report_value(offsets, p0 as u64) {
        Ok(v) => v.to_string(),
        Err(e) => err(e),
    }
}

/// First-fit greedy admissible tuple from candidates 0..=max_candidate.
#[wasm_bindgen]
pub fn mine_tuple(k: u32, max_candidate: u32) -> String {
    match mine_tuple_value(k as usize, max_candidate as u64) {
        Ok(v) => v.to_string(),
        Err(e) => err(e),
    }
}

/// Histogram of (p' - p) / log p (or / log n) over [lo, hi].
#[wasm_bindgen]
pub fn gap_histogram(lo: u32, hi: u32, width: f64, norm: &str) -> String {
    match gap_histogram_value(lo as u64, hi as u64, width, norm) {
        Ok(v) => v.to_string(),
        Err(e) => err(e),
    }
}

/// Singular-series ratio curve over the window [m_start, m_start + len].
#[wasm_bindgen]
pub fn series_window(offsets: &str, m_start: u32, len: u32, p0: u32) -> String {
    match series_window_value(offsets, m_start as u64, len as u64, p0 as u64) {
        Ok(v) => v.to_string(),
        Err(e) => err(e),
    }
}
