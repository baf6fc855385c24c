//! Report documents, CSV tables and exit-code policy.

use flexscrew::Verdict;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{execute, Outcome, Table};
use crate::canonical;
use crate::scenario::{Analysis, Scenario};
use crate::sweep::run_sweep;

pub const TOOL: &str = "flexscrew";

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRecord {
    pub index: usize,
    pub request: Analysis,
    pub outcome: Result<Outcome, String>,
}

impl AnalysisRecord {
    pub fn verdict(&self) -> Option<Verdict> {
        self.outcome.as_ref().ok().and_then(|o| o.verdict)
    }

    fn severity(&self) -> i32 {
        match &self.outcome {
            Err(_) => 2,
            Ok(o) if o.verdict == Some(Verdict::Fail) => 1,
            Ok(_) => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub scenario: Scenario,
    pub digest: String,
    pub records: Vec<AnalysisRecord>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Run the requested analyses in declared order. With `sweeps_only`, plain
/// analyses are skipped.
pub fn evaluate(
    scenario: Scenario,
    source: &[u8],
    jobs: Option<usize>,
    sweeps_only: bool,
) -> Evaluation {
    let records = scenario
        .analyses
        .iter()
        .enumerate()
        .filter(|(_, a)| !sweeps_only || matches!(a, Analysis::Sweep { .. }))
        .map(|(index, a)| AnalysisRecord {
            index,
            request: a.clone(),
            outcome: match a {
                Analysis::Sweep { analysis, axes } => {
                    run_sweep(&scenario.inputs, analysis, axes, jobs).map(|t| Outcome {
                        verdict: t.verdict(),
                        result: serde_json::to_value(&t).expect("sweep serializes"),
                        metrics: Default::default(),
                        table: None,
                    })
                }
                _ => execute(&scenario.inputs, a),
            },
        })
        .collect();
    Evaluation {
        digest: digest(source),
        scenario,
        records,
    }
}

impl Evaluation {
    /// Highest severity: 2 for an analysis error, 1 for a FAIL, else 0.
    pub fn exit_code(&self) -> i32 {
        self.records
            .iter()
            .map(AnalysisRecord::severity)
            .max()
            .unwrap_or(0)
    }

    pub fn verdict(&self) -> Option<Verdict> {
        let verdicts: Vec<Verdict> = self.records.iter().filter_map(|r| r.verdict()).collect();
        if self.records.iter().any(|r| r.outcome.is_err()) {
            return Some(Verdict::Fail);
        }
        if verdicts.is_empty() {
            None
        } else {
            Some(Verdict::from_pass(verdicts.iter().all(|v| v.is_pass())))
        }
    }

    pub fn report(&self) -> Value {
        let analyses: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                let mut v = json!({
                    "index": r.index,
                    "type": r.request.kind(),
                    "request": serde_json::to_value(&r.request).expect("request serializes"),
                });
                match &r.outcome {
                    Ok(o) => {
                        v["verdict"] = serde_json::to_value(o.verdict).expect("verdict");
                        v["metrics"] = serde_json::to_value(&o.metrics).expect("metrics");
                        v["result"] = o.result.clone();
                    }
                    Err(e) => {
                        v["verdict"] = Value::Null;
                        v["error"] = Value::String(e.clone());
                    }
                }
                v
            })
            .collect();
        json!({
            "schema_version": self.scenario.schema_version,
            "scenario": self.scenario.name,
            "provenance": {
                "tool": TOOL,
                "version": env!("CARGO_PKG_VERSION"),
                "scenario_sha256": self.digest,
            },
            "inputs": serde_json::to_value(&self.scenario.inputs).expect("inputs serialize"),
            "analyses": analyses,
            "verdict": serde_json::to_value(self.verdict()).expect("verdict"),
        })
    }

    pub fn report_text(&self) -> String {
        canonical::to_string(&self.report())
    }

    /// `(file name, contents)` for every station-array result.
    pub fn csv_files(&self) -> Vec<(String, String)> {
        self.records
            .iter()
            .filter_map(|r| {
                let t = r.outcome.as_ref().ok()?.table.as_ref()?;
                let name = format!(
                    "{}.{:02}_{}.csv",
                    self.scenario.name,
                    r.index,
                    r.request.kind()
                );
                Some((name, csv_text(t)))
            })
            .collect()
    }

    /// One console line per analysis.
    pub fn summary_lines(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| {
                let head = format!("[{}] {}", r.index, r.request.kind());
                match &r.outcome {
                    Err(e) => format!("{head}: ERROR {e}"),
                    Ok(o) => {
                        let verdict = o.verdict.map_or("INFO".to_string(), |v| v.to_string());
                        let metrics: Vec<String> = o
                            .metrics
                            .iter()
                            .map(|(k, v)| format!("{k}={}", canonical::format_f64(*v)))
                            .collect();
                        if metrics.is_empty() {
                            format!("{head}: {verdict}")
                        } else {
                            format!("{head}: {verdict} ({})", metrics.join(", "))
                        }
                    }
                }
            })
            .collect()
    }
}

pub fn csv_text(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row.iter().map(|v| canonical::format_f64(*v)))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
