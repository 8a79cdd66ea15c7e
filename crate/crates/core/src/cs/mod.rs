//! Clemens–Schmid instances, their hypotheses, and the exactness verdicts.

mod hypotheses;
mod instance;
mod verdict;

pub use hypotheses::{
    check_instance_hypotheses, Hypothesis, HypothesisReport, MapVerdict, NodeVerdict, WeightBoundVerdict,
};
pub use instance::{CsError, CsInstance, DegreeData, DegreeRange, Family, Profile, TwistedMatrix};
pub use verdict::{
    assemble_and_verify_les, evaluate_conclusion, verify_all_propositions, verify_invariant_cycles,
    verify_proposition, verify_unipotent_cs, Claim, CleanInstance, Proposition, VerdictReport, VerifyError,
};
