//! The hypothesis set under which the propositions are claimed: both long
//! exact sequences, the weight bounds on `A`, `B`, the centering of `P`, and
//! strictness of every map.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{CsInstance, Family};
use crate::filtered::{FilteredMap, FilteredSpace};
use crate::linalg::{self, serde_vector, Exactness, Matrix, Scalar};
use crate::monodromy::{monodromy_filtration, NilpotentOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hypothesis {
    #[serde(rename = "column_exact")]
    ColumnExact,
    #[serde(rename = "row_exact")]
    RowExact,
    #[serde(rename = "A_bound")]
    ABound,
    #[serde(rename = "B_bound")]
    BBound,
    #[serde(rename = "P_centering")]
    PCentering,
    #[serde(rename = "strictness")]
    Strictness,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 6] = [
        Hypothesis::ColumnExact,
        Hypothesis::RowExact,
        Hypothesis::ABound,
        Hypothesis::BBound,
        Hypothesis::PCentering,
        Hypothesis::Strictness,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Hypothesis::ColumnExact => "column_exact",
            Hypothesis::RowExact => "row_exact",
            Hypothesis::ABound => "A_bound",
            Hypothesis::BBound => "B_bound",
            Hypothesis::PCentering => "P_centering",
            Hypothesis::Strictness => "strictness",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Hypothesis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Hypothesis::ALL
            .into_iter()
            .find(|h| h.tag() == s)
            .ok_or_else(|| format!("unknown hypothesis `{s}`"))
    }
}

/// Exactness at one node of a long exact sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeVerdict {
    pub degree: i64,
    pub node: String,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(default, with = "serde_vector::option", skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Scalar>>,
}

impl NodeVerdict {
    pub(crate) fn from_exactness(degree: i64, node: String, e: &Exactness) -> Self {
        NodeVerdict {
            degree,
            node,
            exact: e.is_exact(),
            failure: e.describe().map(str::to_owned),
            witness: e.witness().map(<[Scalar]>::to_vec),
        }
    }
}

/// Weight conditions at one degree: `A_k ≤ k+w`, `B_k ≥ k+w`, and `P_k`
/// filtered by the monodromy filtration of `N_k` centered at `k+w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightBoundVerdict {
    pub degree: i64,
    pub a_leq: bool,
    pub b_geq: bool,
    pub p_centered: bool,
}

impl WeightBoundVerdict {
    pub fn passes(&self) -> bool {
        self.a_leq && self.b_geq && self.p_centered
    }
}

/// Compatibility and strictness of one structure map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapVerdict {
    pub degree: i64,
    pub map: String,
    pub compatible: bool,
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
    #[serde(default, with = "serde_vector::option", skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Scalar>>,
}

impl MapVerdict {
    pub fn passes(&self) -> bool {
        self.compatible && self.strict
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub column_exact: Vec<NodeVerdict>,
    pub row_exact: Vec<NodeVerdict>,
    pub weight_bounds: Vec<WeightBoundVerdict>,
    pub strictness: Vec<MapVerdict>,
}

impl HypothesisReport {
    pub fn is_clean(&self) -> bool {
        self.failed().is_empty()
    }

    pub fn failed(&self) -> BTreeSet<Hypothesis> {
        let mut out = BTreeSet::new();
        if self.column_exact.iter().any(|v| !v.exact) {
            out.insert(Hypothesis::ColumnExact);
        }
        if self.row_exact.iter().any(|v| !v.exact) {
            out.insert(Hypothesis::RowExact);
        }
        if self.weight_bounds.iter().any(|v| !v.a_leq) {
            out.insert(Hypothesis::ABound);
        }
        if self.weight_bounds.iter().any(|v| !v.b_geq) {
            out.insert(Hypothesis::BBound);
        }
        if self.weight_bounds.iter().any(|v| !v.p_centered) {
            out.insert(Hypothesis::PCentering);
        }
        if self.strictness.iter().any(|v| !v.passes()) {
            out.insert(Hypothesis::Strictness);
        }
        out
    }

    /// Human-readable location of the first failing verdict.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(v) = self.column_exact.iter().find(|v| !v.exact) {
            return Some(format!("column exactness at {}", v.node));
        }
        if let Some(v) = self.row_exact.iter().find(|v| !v.exact) {
            return Some(format!("row exactness at {}", v.node));
        }
        if let Some(v) = self.weight_bounds.iter().find(|v| !v.passes()) {
            return Some(format!("weight bounds in degree {}", v.degree));
        }
        self.strictness
            .iter()
            .find(|v| !v.passes())
            .map(|v| format!("strictness of {}_{}", v.map, v.degree))
    }

    /// Degrees at which the weight bounds fail.
    pub fn weight_failures(&self) -> Vec<i64> {
        self.weight_bounds
            .iter()
            .filter(|v| !v.passes())
            .map(|v| v.degree)
            .collect()
    }
}

pub(crate) fn node_label(family: Family, k: i64, twisted: bool) -> String {
    let f = match family {
        Family::A => "A",
        Family::B => "B",
        Family::C => "C",
        Family::P => "P",
    };
    if twisted {
        format!("{f}_{k}(-1)")
    } else {
        format!("{f}_{k}")
    }
}

fn exact_node(inst_degree: i64, node: String, f: &Matrix, g: &Matrix) -> NodeVerdict {
    let e = linalg::exactness(f, g).expect("instance shapes are validated");
    NodeVerdict::from_exactness(inst_degree, node, &e)
}

fn map_verdict(degree: i64, map: &str, source: FilteredSpace, target: FilteredSpace, m: Matrix) -> MapVerdict {
    match FilteredMap::new(source, target, m, 0) {
        Err(crate::filtered::FilterError::NotCompatible { weight, witness }) => MapVerdict {
            degree,
            map: map.to_owned(),
            compatible: false,
            strict: false,
            weight: Some(weight),
            witness: Some(witness),
        },
        Err(e) => panic!("instance shapes are validated: {e}"),
        Ok(f) => {
            let defect = f.strictness_defect();
            MapVerdict {
                degree,
                map: map.to_owned(),
                compatible: true,
                strict: defect.is_none(),
                weight: defect.as_ref().map(|d| d.0),
                witness: defect.map(|d| d.1),
            }
        }
    }
}

struct DegreeChecks {
    column: Vec<NodeVerdict>,
    row: Vec<NodeVerdict>,
    weights: WeightBoundVerdict,
    maps: Vec<MapVerdict>,
}

fn check_degree(inst: &CsInstance, k: i64) -> DegreeChecks {
    use Family::*;
    let column = vec![
        exact_node(k, node_label(B, k, false), &inst.c(k - 1), &inst.b(k)),
        exact_node(k, node_label(A, k, false), &inst.b(k), &inst.a(k)),
        exact_node(k, node_label(C, k, false), &inst.a(k), &inst.c(k)),
    ];
    let row = vec![
        exact_node(k, node_label(C, k, false), &inst.r(k), &inst.s(k)),
        exact_node(k, node_label(P, k, false), &inst.s(k), &inst.n(k)),
        exact_node(k, node_label(P, k, true), &inst.n(k), &inst.r(k + 1)),
    ];

    let w = inst.purity();
    let p = inst.space(P, k);
    let op = NilpotentOp::new(p.clone(), inst.n(k)).expect("N is validated nilpotent");
    let weights = WeightBoundVerdict {
        degree: k,
        a_leq: inst.space(A, k).weights_leq(k + w),
        b_geq: inst.space(B, k).weights_geq(k + w),
        p_centered: monodromy_filtration(&op, k + w).filtration == *p,
    };

    let sp = |f: Family, j: i64| inst.space(f, j).clone();
    let maps = vec![
        map_verdict(k, "N", sp(P, k), inst.p_twisted(k), inst.n(k)),
        map_verdict(k, "b", sp(B, k), sp(A, k), inst.b(k)),
        map_verdict(k, "a", sp(A, k), sp(C, k), inst.a(k)),
        map_verdict(k, "c", sp(C, k), sp(B, k + 1), inst.c(k)),
        map_verdict(k, "r", inst.p_twisted(k - 1), sp(C, k), inst.r(k)),
        map_verdict(k, "s", sp(C, k), sp(P, k), inst.s(k)),
    ];
    DegreeChecks {
        column,
        row,
        weights,
        maps,
    }
}

/// Checks every hypothesis at every degree of the range. Nodes outside the
/// range are zero, so boundary exactness is checked against zero spaces.
pub fn check_instance_hypotheses(inst: &CsInstance) -> HypothesisReport {
    let per_degree: Vec<DegreeChecks> = inst
        .range()
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| check_degree(inst, k))
        .collect();
    let mut report = HypothesisReport {
        column_exact: Vec::new(),
        row_exact: Vec::new(),
        weight_bounds: Vec::new(),
        strictness: Vec::new(),
    };
    for d in per_degree {
        report.column_exact.extend(d.column);
        report.row_exact.extend(d.row);
        report.weight_bounds.push(d.weights);
        report.strictness.extend(d.maps);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::instance::DegreeRange;

    #[test]
    fn zero_instance_is_clean() {
        let z = CsInstance::zero(DegreeRange::new(0, 3).unwrap());
        let r = check_instance_hypotheses(&z);
        assert!(r.is_clean());
        assert_eq!(r.column_exact.len(), 12);
        assert_eq!(r.strictness.len(), 24);
    }

    #[test]
    fn hypothesis_tags_round_trip() {
        for h in Hypothesis::ALL {
            assert_eq!(h.tag().parse::<Hypothesis>().unwrap(), h);
            let j = serde_json::to_string(&h).unwrap();
            assert_eq!(j, format!("\"{}\"", h.tag()));
        }
        assert!("A-bound".parse::<Hypothesis>().is_err());
    }

    #[test]
    fn b_node_below_its_degree_fails_b_bound() {
        // A single pure B_1 of weight 0 mapped isomorphically onto A_1 of
        // weight 0: exact and strict, but B_1 must have weights >= 1.
        let s = r#"{"range":[0,2],
            "A":{"1":{"dim":1,"steps":{"0":[["1"]]}}},
            "B":{"1":{"dim":1,"steps":{"0":[["1"]]}}},
            "col":{"b":{"1":{"matrix":[["1"]]}}}}"#;
        let inst = CsInstance::from_json(s).unwrap();
        let r = check_instance_hypotheses(&inst);
        assert_eq!(r.failed(), BTreeSet::from([Hypothesis::BBound]));
        assert_eq!(r.weight_failures(), vec![1]);
    }
}
