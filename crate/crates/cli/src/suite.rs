use hyperhs::identities::{run_identity, IdentityReport, RunConfig};
use hyperhs::Execution;
use serde::{Deserialize, Serialize};

use crate::config::{Format, SuiteConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Errored,
}

/// Outcome of one configured check. Errored checks carry the message in
/// place of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub identity_id: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<IdentityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub schema_version: u32,
    pub tool_version: String,
    pub config_digest: String,
    pub summary: Summary,
    pub reports: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errored == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

/// Runs every check, concurrently across checks, and assembles results in
/// config order.
pub fn run_suite(config: &SuiteConfig) -> SuiteResult {
    let reports = Execution::Parallel.map(config.checks.len(), |i| {
        let spec = &config.checks[i];
        let cfg = RunConfig {
            seed: spec.seed.unwrap_or(config.seed),
            samples: spec.samples,
            tol: spec.tol,
            eps: spec.eps,
            exec: Execution::Parallel,
        };
        match run_identity(&spec.id, &spec.params, &cfg) {
            Ok(mut report) => {
                if !config.timing {
                    report.runtime_ms = 0;
                }
                CheckResult {
                    identity_id: spec.id.clone(),
                    status: if report.pass { Status::Passed } else { Status::Failed },
                    report: Some(report),
                    error: None,
                }
            }
            Err(e) => CheckResult {
                identity_id: spec.id.clone(),
                status: Status::Errored,
                report: None,
                error: Some(e.to_string()),
            },
        }
    });
    let mut summary = Summary::default();
    for r in &reports {
        match r.status {
            Status::Passed => summary.passed += 1,
            Status::Failed => summary.failed += 1,
            Status::Errored => summary.errored += 1,
        }
    }
    SuiteResult {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: config.digest(),
        summary,
        reports,
    }
}

pub const CSV_HEADER: [&str; 6] = ["identity_id", "ratio_re", "ratio_im", "stderr", "pass", "runtime_ms"];

pub fn emit_report(result: &SuiteResult, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(result).expect("suite result serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for r in &result.reports {
                let row = match &r.report {
                    Some(rep) => [
                        r.identity_id.clone(),
                        format!("{:?}", rep.ratio.re),
                        format!("{:?}", rep.ratio.im),
                        format!("{:?}", rep.stderr),
                        rep.pass.to_string(),
                        rep.runtime_ms.to_string(),
                    ],
                    None => [
                        r.identity_id.clone(),
                        String::new(),
                        String::new(),
                        String::new(),
                        "false".into(),
                        String::new(),
                    ],
                };
                w.write_record(&row).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

pub fn parse_json(bytes: &[u8]) -> serde_json::Result<SuiteResult> {
    serde_json::from_slice(bytes)
}
