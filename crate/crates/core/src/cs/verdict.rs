//! Verdict engines for the four exactness propositions and the three
//! theorems built from them.
//!
//! Every gated entry point re-checks the hypotheses and refuses to report on a
//! dirty instance. [`evaluate_conclusion`] is the ungated variant used when
//! probing what happens once a hypothesis is dropped.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::hypotheses::{check_instance_hypotheses, node_label, Hypothesis, HypothesisReport};
use super::instance::{CsInstance, Family, Profile};
use crate::linalg::{self, column_space, kernel, serde_vector, Exactness, Scalar};

/// The four three-term sequences.
///
/// * `P1`: `A_k → P_k → P_k(-1)`, exact at `P_k`.
/// * `P2`: `P_k → P_k(-1) → B_{k+2}`, exact at `P_k(-1)`.
/// * `P3`: `P_k(-1) → B_{k+2} → A_{k+2}`, exact at `B_{k+2}`.
/// * `P4`: `B_k → A_k → P_k`, exact at `A_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Proposition {
    P1,
    P2,
    P3,
    P4,
}

impl Proposition {
    pub const ALL: [Proposition; 4] = [Proposition::P1, Proposition::P2, Proposition::P3, Proposition::P4];

    /// Hypotheses the argument for this proposition leans on.
    pub fn weights_used(self) -> Vec<Hypothesis> {
        let bound = match self {
            Proposition::P1 | Proposition::P4 => Hypothesis::ABound,
            Proposition::P2 | Proposition::P3 => Hypothesis::BBound,
        };
        vec![bound, Hypothesis::PCentering, Hypothesis::Strictness]
    }

    /// Degrees `k` at which the sequence has a node inside the range. For
    /// `P3` that node is `B_{k+2}`.
    pub fn valid_degrees(self, inst: &CsInstance) -> std::ops::RangeInclusive<i64> {
        let r = inst.range();
        match self {
            Proposition::P3 => r.lo - 2..=r.hi - 2,
            _ => r.lo..=r.hi,
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Proposition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "P1" => Ok(Proposition::P1),
            "P2" => Ok(Proposition::P2),
            "P3" => Ok(Proposition::P3),
            "P4" => Ok(Proposition::P4),
            _ => Err(format!("unknown proposition `{s}`")),
        }
    }
}

/// What a verdict is about: a single proposition or one of the theorems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Claim {
    P1,
    P2,
    P3,
    P4,
    T1,
    T2,
    T3,
}

impl From<Proposition> for Claim {
    fn from(p: Proposition) -> Self {
        match p {
            Proposition::P1 => Claim::P1,
            Proposition::P2 => Claim::P2,
            Proposition::P3 => Claim::P3,
            Proposition::P4 => Claim::P4,
        }
    }
}

/// Exactness verdict at one node; `witness` is present iff `exact` is false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub claim: Claim,
    pub degree: i64,
    pub node: String,
    pub exact: bool,
    #[serde(default, with = "serde_vector::option", skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub weights_used: Vec<Hypothesis>,
}

impl VerdictReport {
    fn from_exactness(claim: Claim, degree: i64, node: String, e: Exactness, used: Vec<Hypothesis>) -> Self {
        VerdictReport {
            claim,
            degree,
            node,
            exact: e.is_exact(),
            failure: e.describe().map(str::to_owned),
            witness: e.witness().map(<[Scalar]>::to_vec),
            weights_used: used,
        }
    }

    fn relabel(mut self, claim: Claim) -> Self {
        self.claim = claim;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("hypotheses not satisfied: {}", failed_list(.0))]
    HypothesesNotSatisfied(Box<HypothesisReport>),
    #[error("{claim:?} has no node at degree {degree} inside the range")]
    DegreeOutOfRange { claim: Claim, degree: i64 },
    #[error("instance is not flagged as geometric")]
    NotGeometric,
}

fn failed_list(r: &HypothesisReport) -> String {
    r.failed().into_iter().map(Hypothesis::tag).collect::<Vec<_>>().join(", ")
}

/// Exactness of the named sequence at degree `k`, without checking any
/// hypothesis first.
pub fn evaluate_conclusion(inst: &CsInstance, which: Proposition, k: i64) -> VerdictReport {
    use Family::*;
    let (f, g, node) = match which {
        Proposition::P1 => (inst.a_to_p(k), inst.n(k), node_label(P, k, false)),
        Proposition::P2 => (inst.n(k), inst.p_to_b(k), node_label(P, k, true)),
        Proposition::P3 => (inst.p_to_b(k), inst.b(k + 2), node_label(B, k + 2, false)),
        Proposition::P4 => (inst.b(k), inst.a_to_p(k), node_label(A, k, false)),
    };
    let e = linalg::exactness(&f, &g).expect("composite shapes agree");
    VerdictReport::from_exactness(which.into(), k, node, e, which.weights_used())
}

/// An instance whose hypothesis report is clean. The verdict methods on it
/// carry the guarantee of the propositions.
#[derive(Clone, Debug)]
pub struct CleanInstance<'a> {
    inst: &'a CsInstance,
    report: HypothesisReport,
}

impl CsInstance {
    pub fn clean(&self) -> Result<CleanInstance<'_>, VerifyError> {
        let report = check_instance_hypotheses(self);
        if report.is_clean() {
            Ok(CleanInstance { inst: self, report })
        } else {
            Err(VerifyError::HypothesesNotSatisfied(Box::new(report)))
        }
    }
}

impl<'a> CleanInstance<'a> {
    pub fn instance(&self) -> &'a CsInstance {
        self.inst
    }

    pub fn report(&self) -> &HypothesisReport {
        &self.report
    }

    pub fn proposition(&self, which: Proposition, k: i64) -> Result<VerdictReport, VerifyError> {
        if !which.valid_degrees(self.inst).contains(&k) {
            return Err(VerifyError::DegreeOutOfRange {
                claim: which.into(),
                degree: k,
            });
        }
        Ok(evaluate_conclusion(self.inst, which, k))
    }

    /// Every proposition at every valid degree, ordered by proposition then degree.
    pub fn all_propositions(&self) -> Vec<VerdictReport> {
        let tasks: Vec<(Proposition, i64)> = Proposition::ALL
            .into_iter()
            .flat_map(|p| p.valid_degrees(self.inst).map(move |k| (p, k)))
            .collect();
        tasks
            .into_par_iter()
            .map(|(p, k)| evaluate_conclusion(self.inst, p, k))
            .collect()
    }

    /// The spliced sequence
    /// `… → A_k → P_k → P_k(-1) → B_{k+2} → A_{k+2} → …`, one per parity of
    /// `k`, checked at every node that lies in the range.
    pub fn les(&self) -> Vec<VerdictReport> {
        let r = self.inst.range();
        let mut tasks = Vec::new();
        for parity in 0..2 {
            for k in (r.lo..=r.hi).filter(|k| (k - r.lo).rem_euclid(2) == parity) {
                tasks.push((Proposition::P3, k - 2));
                tasks.push((Proposition::P4, k));
                tasks.push((Proposition::P1, k));
                tasks.push((Proposition::P2, k));
            }
        }
        tasks
            .into_par_iter()
            .map(|(p, k)| evaluate_conclusion(self.inst, p, k).relabel(Claim::T1))
            .collect()
    }

    /// `B_k → A_k → ker N_k → 0`: exactness at `A_k` and `A_k` onto the
    /// monodromy invariants `ker N_k`.
    pub fn invariant_cycles(&self, k: i64) -> Result<VerdictReport, VerifyError> {
        if !self.inst.range().contains(k) {
            return Err(VerifyError::DegreeOutOfRange {
                claim: Claim::T2,
                degree: k,
            });
        }
        let at_a = evaluate_conclusion(self.inst, Proposition::P4, k).relabel(Claim::T2);
        if !at_a.exact {
            return Ok(at_a);
        }
        let image = column_space(&self.inst.a_to_p(k));
        let invariants = kernel(&self.inst.n(k));
        let mut used = Proposition::P1.weights_used();
        used.dedup();
        let witness = invariants.first_outside(&image).or_else(|| image.first_outside(&invariants));
        Ok(VerdictReport {
            claim: Claim::T2,
            degree: k,
            node: format!("ker N_{k}"),
            exact: witness.is_none(),
            failure: witness.as_ref().map(|_| "A_k does not map onto ker N_k".to_owned()),
            witness,
            weights_used: used,
        })
    }

    /// The spliced sequence for an instance standing for geometric cohomology.
    pub fn unipotent_cs(&self) -> Result<Vec<VerdictReport>, VerifyError> {
        if self.inst.profile() != Profile::Geometric {
            return Err(VerifyError::NotGeometric);
        }
        Ok(self.les().into_iter().map(|v| v.relabel(Claim::T3)).collect())
    }
}

pub fn verify_proposition(inst: &CsInstance, which: Proposition, k: i64) -> Result<VerdictReport, VerifyError> {
    inst.clean()?.proposition(which, k)
}

pub fn verify_all_propositions(inst: &CsInstance) -> Result<Vec<VerdictReport>, VerifyError> {
    Ok(inst.clean()?.all_propositions())
}

pub fn assemble_and_verify_les(inst: &CsInstance) -> Result<Vec<VerdictReport>, VerifyError> {
    Ok(inst.clean()?.les())
}

pub fn verify_invariant_cycles(inst: &CsInstance, k: i64) -> Result<VerdictReport, VerifyError> {
    inst.clean()?.invariant_cycles(k)
}

pub fn verify_unipotent_cs(inst: &CsInstance) -> Result<Vec<VerdictReport>, VerifyError> {
    inst.clean()?.unipotent_cs()
}
