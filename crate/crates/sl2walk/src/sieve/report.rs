//! Report persistence: JSON-lines records with a versioned schema and a
//! CSV export for plotting. Reports are deterministic from
//! (config, seed); the wall-clock metadata record is emitted last and
//! excluded from determinism comparisons.

use serde::{Deserialize, Serialize};
use std::time::{SystemTime, UNIX_EPOCH};

use super::config::ExperimentConfig;
use super::fit::ShapeFit;
use crate::walker::RNG_ID;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportHeader {
    pub schema: u32,
    pub experiment: String,
    pub rng_id: String,
    pub config: ExperimentConfig,
    /// Free-pair certificate summary when the driver walked with a
    /// certified pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_pair: Option<FreePairSummary>,
    /// Free parameters left open by the method, echoed for the record.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreePairSummary {
    pub x: String,
    pub y: String,
    pub certified_depth: usize,
    pub degree_bound: usize,
}

/// One experiment row. Unused fields stay unserialized, so the same
/// record type covers the sieve drivers and the expander survey.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Ring descriptor, or a product summary for CRT moduli.
    pub modulus: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// True when every number in the row is exact (no sampling, no
    /// fallback densities).
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_hi: Option<f64>,
    /// Factors bounded by the fallback density rather than a census.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback_factors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub girth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bipartite: Option<bool>,
    /// Whether the measured girth meets the degree/entry-growth bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub girth_bound_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub header: ReportHeader,
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ShapeFit>,
    pub wall_clock_ms: u128,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        ExperimentReport {
            header: ReportHeader {
                schema: SCHEMA_VERSION,
                experiment: experiment.into(),
                rng_id: RNG_ID.into(),
                config: config.clone(),
                free_pair: None,
                notes: Vec::new(),
            },
            rows: Vec::new(),
            fit: None,
            wall_clock_ms: 0,
        }
    }

    /// JSON-lines: header record, one record per row, optional fit
    /// record, then the metadata record (timestamp + wall clock) last.
    pub fn to_json_lines(&self) -> String {
        let mut out = self.deterministic_json_lines();
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push_str(&format!(
            "{{\"meta\":{{\"timestamp\":{ts},\"wall_clock_ms\":{}}}}}\n",
            self.wall_clock_ms
        ));
        out
    }

    /// Everything except the metadata record: identical config + seed
    /// must reproduce these bytes exactly.
    pub fn deterministic_json_lines(&self) -> String {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&self.header).expect("serializable"));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("serializable"));
            out.push('\n');
        }
        if let Some(fit) = &self.fit {
            out.push_str(&format!(
                "{{\"fit\":{}}}\n",
                serde_json::to_string(fit).expect("serializable")
            ));
        }
        out
    }

    /// Plot-ready CSV of the row table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "l,modulus,factor_count,bound,exact,estimate,ci_lo,ci_hi,fallback_factors,order,girth,rho,bipartite,girth_bound_ok\n",
        );
        let opt = |x: &Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
        let opt_u = |x: &Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                opt_u(&r.l),
                csv_field(&r.modulus),
                opt_u(&r.factor_count),
                opt(&r.bound),
                r.exact,
                opt(&r.estimate),
                opt(&r.ci_lo),
                opt(&r.ci_hi),
                opt_u(&r.fallback_factors),
                csv_field(r.order.as_deref().unwrap_or("")),
                csv_field(r.girth.as_deref().unwrap_or("")),
                opt(&r.rho),
                r.bipartite.map(|b| b.to_string()).unwrap_or_default(),
                r.girth_bound_ok.map(|b| b.to_string()).unwrap_or_default(),
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Strip the metadata record so two runs can be compared byte-for-byte.
pub fn strip_meta(json_lines: &str) -> String {
    json_lines
        .lines()
        .filter(|l| !l.starts_with("{\"meta\""))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::config::ExperimentConfig;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
            p = 3
            predicate = "trace-2"
            l_schedule = [4, 8]
            [modulus_strategy]
            kind = "explicit-degrees"
            degrees = [2]
        "#,
        )
        .unwrap()
    }

    #[test]
    fn meta_record_stripped_for_comparison() {
        let mut rep = ExperimentReport::new("small-sieve", &cfg());
        rep.rows.push(ReportRow {
            l: Some(4),
            modulus: "p=3;f=1,0,1".into(),
            bound: Some(0.5),
            exact: true,
            ..Default::default()
        });
        rep.wall_clock_ms = 123;
        let full = rep.to_json_lines();
        assert!(full.contains("\"meta\""));
        assert_eq!(strip_meta(&full), rep.deterministic_json_lines());
    }

    #[test]
    fn header_carries_schema_and_rng() {
        let rep = ExperimentReport::new("survey", &cfg());
        let line = rep.deterministic_json_lines();
        assert!(line.contains("\"schema\":1"));
        assert!(line.contains("\"rng_id\":\"chacha8\""));
    }

    #[test]
    fn csv_has_one_line_per_row_plus_header() {
        let mut rep = ExperimentReport::new("small-sieve", &cfg());
        for l in [4usize, 8] {
            rep.rows.push(ReportRow {
                l: Some(l),
                modulus: "p=3;f=1,0,1".into(),
                bound: Some(0.1),
                exact: true,
                ..Default::default()
            });
        }
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("l,modulus"));
    }

    #[test]
    fn json_lines_parse_back() {
        let mut rep = ExperimentReport::new("big-sieve", &cfg());
        rep.rows.push(ReportRow {
            l: Some(8),
            modulus: "p=3;degrees=3*5".into(),
            factor_count: Some(2),
            bound: Some(0.42),
            exact: false,
            fallback_factors: Some(1),
            ..Default::default()
        });
        for line in rep.deterministic_json_lines().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.is_object());
        }
    }
}
