use std::fmt::Write as _;

use csweights_core::cs::{HypothesisReport, VerdictReport};
use csweights_core::monodromy::CenteredFiltration;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

/// Process exit codes. `USAGE` follows the sysexits convention.
pub mod exit {
    pub const OK: i32 = 0;
    pub const HYPOTHESES_DIRTY: i32 = 2;
    pub const NOT_EXACT: i32 = 3;
    pub const MALFORMED: i32 = 4;
    pub const USAGE: i32 = 64;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub parse_ms: f64,
    pub check_ms: f64,
    pub total_ms: f64,
}

// f64 fields never hold NaN here.
impl Eq for Timing {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub jordan_type: Vec<usize>,
    pub filtration: CenteredFiltration,
    pub axioms_hold: bool,
    /// Whether the input's own filtration is the computed one.
    pub input_is_centered: bool,
    /// Present when the input is centered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_bounds_hold: Option<bool>,
    /// Present with `--cross-check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursive_agrees: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub randomized_agrees: Option<bool>,
}

impl MonodromyResult {
    pub fn passes(&self) -> bool {
        self.axioms_hold
            && self.weight_bounds_hold != Some(false)
            && self.recursive_agrees != Some(false)
            && self.randomized_agrees != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    /// `sha256:<hex>` of the raw input bytes.
    pub input_digest: Option<String>,
    pub hypotheses: Option<HypothesisReport>,
    pub verdicts: Vec<VerdictReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<MonodromyResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Null unless timing was requested, so reports are reproducible.
    pub timing: Option<Timing>,
    pub exit_status: i32,
}

impl Report {
    pub fn new(command: &str, input: &[u8]) -> Self {
        Report {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            input_digest: Some(digest(input)),
            hypotheses: None,
            verdicts: Vec::new(),
            monodromy: None,
            error: None,
            timing: None,
            exit_status: exit::OK,
        }
    }

    pub fn malformed(mut self, msg: impl Into<String>) -> Self {
        self.error = Some(msg.into());
        self.exit_status = exit::MALFORMED;
        self
    }

    /// The status implied by the report's content. `run` always stores this,
    /// so the exit code can be re-derived from a saved report.
    pub fn derived_status(&self) -> i32 {
        if self.error.is_some() && self.hypotheses.is_none() && self.monodromy.is_none() {
            return exit::MALFORMED;
        }
        if self.error.is_some() || self.hypotheses.as_ref().is_some_and(|h| !h.is_clean()) {
            return exit::HYPOTHESES_DIRTY;
        }
        if self.verdicts.iter().any(|v| !v.exact) || self.monodromy.as_ref().is_some_and(|m| !m.passes()) {
            return exit::NOT_EXACT;
        }
        exit::OK
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "csweights {} {}", self.tool_version, self.command);
        if let Some(d) = &self.input_digest {
            let _ = writeln!(out, "input {d}");
        }
        if let Some(h) = &self.hypotheses {
            match h.first_failure() {
                None => out.push_str("hypotheses: clean\n"),
                Some(f) => {
                    let tags: Vec<_> = h.failed().into_iter().map(|t| t.tag()).collect();
                    let _ = writeln!(out, "hypotheses: dirty [{}], first: {f}", tags.join(", "));
                }
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        for v in &self.verdicts {
            let status = if v.exact { "exact" } else { "NOT exact" };
            let _ = write!(out, "{:?} k={} at {}: {status}", v.claim, v.degree, v.node);
            if let Some(w) = &v.witness {
                let w: Vec<_> = w.iter().map(ToString::to_string).collect();
                let _ = write!(out, " witness [{}]", w.join(", "));
            }
            out.push('\n');
        }
        if let Some(m) = &self.monodromy {
            let _ = writeln!(out, "jordan type {:?}, axioms hold: {}", m.jordan_type, m.axioms_hold);
            for (w, d) in m.filtration.filtration.graded_dims() {
                let _ = writeln!(out, "  dim Gr_{w} = {d}");
            }
        }
        if let Some(t) = &self.timing {
            let _ = writeln!(out, "time {:.1} ms", t.total_ms);
        }
        let _ = writeln!(out, "exit {}", self.exit_status);
        out
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}
