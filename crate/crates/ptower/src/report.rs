//! Deterministic run reports.
//!
//! Every command produces a [`Report`]: the tool version, the echoed
//! config, and one [`CheckResult`] per check performed. Reports render to
//! aligned text or to JSON with the fixed schema
//!
//! ```text
//! {"version", "config", "command", "results": [{"check", "status",
//!  "window", "witness"}], "elapsed_ms"}
//! ```
//!
//! Both renderings are pure functions of the config and seed: no clocks
//! (`elapsed_ms` is pinned to 0), no pointers, no map iteration order.
//! Running the same command on the same document twice gives
//! byte-identical output, which is what makes reports diffable across
//! machines and revisions.

use serde::Serialize;

use crate::config::JobConfig;

/// Outcome of one check, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckStatus {
    /// The check passed or reached a definite positive answer.
    Pass,
    /// The window could not decide the question.
    Unknown,
    /// The check failed with a witness.
    Fail,
}

impl CheckStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Unknown => "unknown",
            CheckStatus::Fail => "fail",
        }
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    /// What was checked, e.g. `axiom (b) at stages 0 -> 1`.
    pub check: String,
    pub status: CheckStatus,
    /// The window the answer is valid on, or `-`.
    pub window: String,
    /// A witness, presentation, or explanation, or `-`.
    pub witness: String,
}

/// The result of one command run.
#[derive(Debug, Clone)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    pub config: JobConfig,
    pub results: Vec<CheckResult>,
    /// Tabular export, set by commands that have one (limcm).
    pub csv: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: &JobConfig) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            results: Vec::new(),
            csv: None,
        }
    }

    pub fn push(
        &mut self,
        check: impl Into<String>,
        status: CheckStatus,
        window: impl Into<String>,
        witness: impl Into<String>,
    ) {
        self.results.push(CheckResult {
            check: check.into(),
            status,
            window: window.into(),
            witness: witness.into(),
        });
    }

    /// The worst status across all results; an empty report passes.
    pub fn status(&self) -> CheckStatus {
        self.results
            .iter()
            .map(|r| r.status)
            .max()
            .unwrap_or(CheckStatus::Pass)
    }

    /// Process exit code: 0 passed, 1 failed with witness, 2 undecided.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            CheckStatus::Pass => 0,
            CheckStatus::Fail => 1,
            CheckStatus::Unknown => 2,
        }
    }

    /// Human-readable rendering; ends with an `overall:` line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("ptower {}\n", self.version));
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str("config:\n");
        for line in self.config.render().lines() {
            out.push_str(&format!("  {line}\n"));
        }
        out.push_str("results:\n");
        for r in &self.results {
            out.push_str(&format!(
                "  [{}] {} | {} | {}\n",
                r.status.label(),
                r.check,
                r.window,
                r.witness
            ));
        }
        out.push_str(&format!("overall: {}", self.status().label()));
        out
    }

    /// Fixed-schema JSON rendering.
    pub fn render_json(&self) -> String {
        let doc = JsonReport {
            version: self.version,
            config: JsonConfig {
                p: self.config.p,
                precision: self.config.precision,
                cap: self.config.cap,
                variables: &self.config.variables,
                ideal: &self.config.ideal,
                mode: self.config.mode_name(),
                levels: self.config.levels,
                sop: self.config.sop.as_deref(),
                seed: self.config.seed,
            },
            command: &self.command,
            results: self
                .results
                .iter()
                .map(|r| JsonResult {
                    check: &r.check,
                    status: r.status.label(),
                    window: &r.window,
                    witness: &r.witness,
                })
                .collect(),
            elapsed_ms: 0,
        };
        serde_json::to_string_pretty(&doc).expect("report serialization is infallible")
    }
}

// Shadow structs fix the JSON field order to the documented schema.
#[derive(Serialize)]
struct JsonReport<'a> {
    version: &'a str,
    config: JsonConfig<'a>,
    command: &'a str,
    results: Vec<JsonResult<'a>>,
    elapsed_ms: u64,
}

#[derive(Serialize)]
struct JsonConfig<'a> {
    p: u64,
    precision: u32,
    cap: u32,
    variables: &'a [String],
    ideal: &'a [String],
    mode: &'a str,
    levels: u32,
    sop: Option<&'a [String]>,
    seed: u64,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    check: &'a str,
    status: &'a str,
    window: &'a str,
    witness: &'a str,
}
