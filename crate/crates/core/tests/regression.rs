//! Pinned adversarial instance on which dropping the A-weight bound breaks
//! exactness at `A_2`.

use csweights_core::cs::{check_instance_hypotheses, evaluate_conclusion, verify_proposition, Proposition};
use csweights_core::gen::{gen_adversarial, LoadBearingFind};
use csweights_core::linalg::{column_space, is_zero_vector};

fn find() -> LoadBearingFind {
    serde_json::from_str(include_str!("fixtures/load_bearing_a_bound.json")).expect("fixture parses")
}

#[test]
fn fixture_is_reproducible_from_its_profile() {
    let f = find();
    assert_eq!(gen_adversarial(&f.profile).unwrap(), f.adversarial);
}

#[test]
fn only_the_weight_bound_is_broken() {
    let f = find();
    let failed = check_instance_hypotheses(&f.adversarial.instance).failed();
    assert_eq!(failed.into_iter().collect::<Vec<_>>(), vec![f.adversarial.broken]);
    assert!(verify_proposition(&f.adversarial.instance, Proposition::P4, f.verdict.degree).is_err());
}

#[test]
fn stored_witness_still_breaks_exactness() {
    let f = find();
    let inst = &f.adversarial.instance;
    let k = f.verdict.degree;
    assert_eq!(evaluate_conclusion(inst, Proposition::P4, k), f.verdict);
    let w = f.verdict.witness.as_deref().expect("non-exact verdicts carry a witness");
    // In ker(A_k → P_k) but not in im(B_k → A_k).
    assert!(is_zero_vector(&inst.a_to_p(k).apply(w)));
    assert!(!column_space(&inst.b(k)).contains(w));
}
