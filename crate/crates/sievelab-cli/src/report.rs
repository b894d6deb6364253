//! Report envelope: every subcommand emits one JSON document on stdout
//! containing a manifest (resolved parameters, tool version, optional
//! timings) next to its numeric payload. Keys are emitted in a fixed order
//! and floats use the shortest round-trip representation, so identical
//! manifests produce byte-identical output.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Serialize)]
pub struct Report {
    pub manifest: Manifest,
    pub report: Value,
}

pub struct ManifestBuilder {
    subcommand: String,
    parameters: BTreeMap<String, Value>,
    started: std::time::Instant,
    timings: Option<BTreeMap<String, f64>>,
}

impl ManifestBuilder {
    pub fn new(subcommand: &str, with_timings: bool) -> Self {
        ManifestBuilder {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            started: std::time::Instant::now(),
            timings: with_timings.then(BTreeMap::new),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }

    pub fn phase(&mut self, name: &str) {
        if let Some(t) = self.timings.as_mut() {
            t.insert(name.to_string(), self.started.elapsed().as_secs_f64() * 1e3);
        }
    }

    pub fn finish(mut self, payload: Value) -> Report {
        self.phase("total_ms");
        Report {
            manifest: Manifest {
                subcommand: self.subcommand,
                parameters: self.parameters,
                tool_version: env!("CARGO_PKG_VERSION"),
                timings: self.timings,
            },
            report: payload,
        }
    }
}

pub fn print_report(report: &Report) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    // normalizing through Value sorts every object key, so the document
    // round-trips byte-for-byte through any JSON parser
    let text = serde_json::to_string_pretty(&serde_json::to_value(report)?)?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// One CSV table: header plus stringified rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
