use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use sdd1_core::det_bounds::DetBracket;
use sdd1_core::lcp::CornerProbe;
use sdd1_core::{BoundCertificate, ClassReport, Error, RowBounds, SchurResult};

#[derive(Debug, Serialize)]
pub struct ReportError {
    pub operation: String,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct SchurSummary {
    #[serde(flatten)]
    pub result: SchurResult,
    pub exact_dominance: Option<RowBounds>,
    pub complement_is_sdd: bool,
    pub complement_is_sdd1: bool,
}

#[derive(Debug, Serialize)]
pub struct ExperimentSummary {
    pub generator: String,
    pub seed: u64,
    pub samples: usize,
    pub violations: usize,
    pub failures: usize,
    pub max_norm: f64,
    pub corners: Option<CornerProbe>,
}

#[derive(Debug, Serialize)]
pub struct Skipped {
    pub operation: String,
    pub reason: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub input: Option<String>,
    pub input_digest: Option<String>,
    pub order: Option<usize>,
    pub classification: Option<ClassReport>,
    pub certificates: Vec<BoundCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<DetBracket>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub schur_summaries: Vec<SchurSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<Skipped>,
    pub errors: Vec<ReportError>,
    /// Wall time per operation in seconds. The only non-deterministic field.
    pub timing: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    /// Runs `f`, records its wall time under `operation` and turns an
    /// error into a report entry.
    pub fn run<T>(&mut self, operation: &str, f: impl FnOnce() -> Result<T, Error>) -> Option<T> {
        let start = Instant::now();
        let out = f();
        *self.timing.entry(operation.to_string()).or_default() += start.elapsed().as_secs_f64();
        match out {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(operation, &e);
                None
            }
        }
    }

    pub fn error(&mut self, operation: &str, e: &Error) {
        self.errors.push(ReportError {
            operation: operation.to_string(),
            kind: e.kind(),
            message: e.to_string(),
        });
    }

    pub fn skip(&mut self, operation: &str, e: &Error) {
        self.skipped.push(Skipped {
            operation: operation.to_string(),
            reason: e.to_string(),
        });
    }
}
