use csweights_core::cs::{check_instance_hypotheses, verify_proposition, CsInstance, Family, Hypothesis, Proposition};
use csweights_core::degenerations::{betti, curve_cs_instance, intersection_matrix, DualGraph};
use csweights_core::filtered::{check_exact_at, induced_on_sub_quotient, FilteredMap, FilteredSpace};
use csweights_core::gen::{gen_adversarial, gen_centered_mhs, gen_cs_instance, GenProfile};
use csweights_core::linalg::{canonicalize, column_space, exactness, kernel, Matrix, Scalar, Subspace};
use csweights_core::monodromy::{
    ker_coker_weight_bounds, monodromy_filtration, BoundsVerdict, CenteredFiltration, NilpotentOp,
};
use proptest::prelude::*;

fn matrix_with_cols(rows: std::ops::RangeInclusive<usize>, c: usize) -> impl Strategy<Value = Matrix> {
    rows.prop_flat_map(move |r| {
        // Mostly zero entries so that rank deficiency is common.
        prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], r * c)
            .prop_map(move |xs| Matrix::from_fn(r, c, |i, j| Scalar::from(xs[i * c + j])))
    })
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_cols).prop_flat_map(move |c| matrix_with_cols(0..=max_rows, c))
}

fn subspaces(n: usize, ambient: usize) -> impl Strategy<Value = Vec<Subspace>> {
    prop::collection::vec(matrix_with_cols(0..=4, ambient).prop_map(|m| canonicalize(&m)), n)
}

/// Membership by rank alone: `v ∈ S` iff appending `v` keeps the rank.
fn member_by_rank(s: &Subspace, v: &[Scalar]) -> bool {
    let stacked = s.basis().vstack(&Matrix::from_rows_with_cols(vec![v.to_vec()], s.ambient_dim()).unwrap()).unwrap();
    stacked.rank() == s.dim()
}

fn contained_by_rank(a: &Subspace, b: &Subspace) -> bool {
    a.vectors().all(|v| member_by_rank(b, v))
}

fn small_profile(seed: u64) -> GenProfile {
    GenProfile::new(seed).with_max_dim(4).with_range(-1, 2)
}

fn connected_graph() -> impl Strategy<Value = DualGraph> {
    (1usize..=5).prop_flat_map(|v| {
        let parents = prop::collection::vec(any::<prop::sample::Index>(), v - 1);
        let extra = prop::collection::vec((0..v, 0..v), 0..=3);
        (Just(v), parents, extra).prop_map(|(v, parents, extra)| {
            let mut edges: Vec<[usize; 2]> = parents.iter().enumerate().map(|(i, p)| [p.index(i + 1), i + 1]).collect();
            edges.extend(extra.into_iter().map(|(a, b)| [a, b]));
            DualGraph::new(v, edges)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn modular_dimension_identity(s in subspaces(3, 5)) {
        let (a, b, c) = (&s[0], &s[1], &s[2]);
        let sum = a.sum(b).unwrap();
        let meet = a.intersect(b).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), a.dim() + b.dim());
        // Modular law proper: for a ⊆ c, a + (b ∩ c) = (a + b) ∩ c.
        let a_in_c = a.intersect(c).unwrap();
        let lhs = a_in_c.sum(&b.intersect(c).unwrap()).unwrap();
        let rhs = a_in_c.sum(b).unwrap().intersect(c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_form_is_idempotent(m in matrix(6, 6)) {
        let once = canonicalize(&m);
        prop_assert_eq!(canonicalize(once.basis()), once.clone());
        prop_assert_eq!(once.dim(), m.rank());
    }

    #[test]
    fn rank_nullity(m in matrix(10, 10)) {
        prop_assert_eq!(m.rank() + kernel(&m).dim(), m.ncols());
        prop_assert_eq!(column_space(&m).dim(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn structural_equality_is_set_equality(s in subspaces(2, 4)) {
        let (a, b) = (&s[0], &s[1]);
        let same_set = contained_by_rank(a, b) && contained_by_rank(b, a);
        prop_assert_eq!(a == b, same_set);
        prop_assert_eq!(a.is_subspace_of(b).unwrap(), contained_by_rank(a, b));
    }

    #[test]
    fn exactness_matches_rank_oracle(k in subspaces(1, 5), drop_col in any::<bool>(), extra in matrix_with_cols(0..=1, 5)) {
        // Build g with ker g = K and f with im f = K, then maybe spoil one side.
        let k = &k[0];
        let cols: Vec<&[Scalar]> = k.vectors().skip(usize::from(drop_col)).collect();
        let f = Matrix::from_fn(5, cols.len(), |i, j| cols[j][i].clone());
        let g = k.annihilator().vstack(&extra).unwrap();
        let e = exactness(&f, &g).unwrap();
        let gf_zero = (&g * &f).is_zero();
        let oracle = gf_zero && f.rank() + g.rank() == 5;
        prop_assert_eq!(e.is_exact(), oracle);
        if let Some(w) = e.witness() {
            let in_image = member_by_rank(&column_space(&f), w);
            let in_kernel = g.apply(w).iter().all(|x| *x == Scalar::from(0));
            prop_assert!(in_image != in_kernel, "witness must separate image and kernel");
        }
        // The filtered check reduces to the same question on pure spaces.
        let src = FilteredSpace::pure(f.ncols(), 0);
        let mid = FilteredSpace::pure(5, 0);
        let tgt = FilteredSpace::pure(g.nrows(), 0);
        let ff = FilteredMap::new(src, mid.clone(), f.clone(), 0).unwrap();
        let gg = FilteredMap::new(mid, tgt, g.clone(), 0).unwrap();
        prop_assert_eq!(check_exact_at(&ff, &gg).unwrap().is_exact(), oracle);
    }

    #[test]
    fn tate_twist_shifts_graded_dims(seed in any::<u64>(), dim in 0usize..=6, n in -3i64..=3) {
        let (space, _) = gen_centered_mhs(seed, dim, 0);
        let twisted = space.tate_twist(n);
        prop_assert_eq!(twisted.dim(), space.dim());
        let shifted: Vec<(i64, usize)> = space.graded_dims().into_iter().map(|(w, d)| (w - 2 * n, d)).collect();
        prop_assert_eq!(twisted.graded_dims().into_iter().collect::<Vec<_>>(), shifted);
    }

    #[test]
    fn centered_filtrations_are_symmetric(seed in any::<u64>(), dim in 0usize..=8, k in -3i64..=3) {
        let (space, n) = gen_centered_mhs(seed, dim, k);
        let gr = space.graded_dims();
        for (w, d) in &gr {
            prop_assert_eq!(gr.get(&(2 * k - w)).copied().unwrap_or(0), *d);
        }
        prop_assert_eq!(ker_coker_weight_bounds(&n, k).unwrap(), BoundsVerdict::Holds);
    }

    #[test]
    fn monodromy_filtration_is_conjugation_equivariant(
        seed in any::<u64>(),
        dim in 1usize..=6,
        entries in prop::collection::vec(-2i64..=2, 36),
    ) {
        let (_, n) = gen_centered_mhs(seed, dim, 0);
        let p = Matrix::from_fn(dim, dim, |i, j| Scalar::from(entries[i * 6 + j] + i64::from(i == j) * 3));
        let p_inv = p.inverse();
        prop_assume!(p_inv.is_some());
        let conj = &(&p * n.matrix()) * &p_inv.unwrap();
        let m = monodromy_filtration(&n, 0).filtration;
        let moved = NilpotentOp::new(m.transform(&p).unwrap(), conj).unwrap();
        let expected = CenteredFiltration { center: 0, filtration: m.transform(&p).unwrap() };
        prop_assert_eq!(monodromy_filtration(&moved, 0), expected);
    }

    #[test]
    fn nilpotent_json_round_trip(seed in any::<u64>(), dim in 0usize..=6, k in -2i64..=2) {
        let (_, n) = gen_centered_mhs(seed, dim, k);
        let back: NilpotentOp = serde_json::from_str(&serde_json::to_string(&n).unwrap()).unwrap();
        prop_assert_eq!(back, n);
    }

    #[test]
    fn graph_properties(g in connected_graph()) {
        let (b0, b1) = betti(&g).unwrap();
        prop_assert_eq!(b0, 1);
        prop_assert_eq!(b1 + g.vertices, g.edges.len() + 1);
        let m = intersection_matrix(&g);
        prop_assert_eq!(m.clone(), m.transpose());
        prop_assert_eq!(kernel(&m).dim(), 1);

        let inst = curve_cs_instance(&g).unwrap();
        prop_assert!(check_instance_hypotheses(&inst).is_clean());
        let dims: Vec<usize> = (0..=2).map(|k| inst.space(Family::A, k).dim()).collect();
        prop_assert_eq!(dims[0] + dims[2], 1 + g.vertices + dims[1] - b1);
        let t2 = inst.clean().unwrap().invariant_cycles(1).unwrap();
        prop_assert!(t2.exact);
        prop_assert_eq!(column_space(&inst.a_to_p(1)).dim(), b1);
        prop_assert!(inst.clean().unwrap().unipotent_cs().unwrap().iter().all(|v| v.exact));

        let back: DualGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_instances_are_clean_and_deterministic(seed in any::<u64>()) {
        let p = small_profile(seed);
        let inst = gen_cs_instance(&p).unwrap();
        prop_assert_eq!(&gen_cs_instance(&p).unwrap(), &inst);
        let back = CsInstance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(&back, &inst);
        let clean = inst.clean().unwrap();
        prop_assert!(clean.all_propositions().iter().all(|v| v.exact));
        prop_assert!(clean.les().iter().all(|v| v.exact));
    }

    #[test]
    fn strict_maps_are_graded_additive(seed in any::<u64>()) {
        let inst = gen_cs_instance(&small_profile(seed)).unwrap();
        for k in inst.range().iter() {
            let maps = [
                FilteredMap::new(inst.space(Family::A, k).clone(), inst.space(Family::C, k).clone(), inst.a(k), 0),
                FilteredMap::new(inst.space(Family::C, k).clone(), inst.space(Family::P, k).clone(), inst.s(k), 0),
                FilteredMap::new(inst.space(Family::C, k).clone(), inst.space(Family::B, k + 1).clone(), inst.c(k), 0),
            ];
            for f in maps {
                let f = f.unwrap();
                prop_assert!(f.is_strict());
                let sq = induced_on_sub_quotient(&f).unwrap();
                let weights = f.source().graded_dims().into_keys()
                    .chain(sq.kernel.graded_dims().into_keys())
                    .chain(sq.image.graded_dims().into_keys());
                for w in weights {
                    prop_assert_eq!(f.source().graded_dim(w), sq.kernel.graded_dim(w) + sq.image.graded_dim(w));
                }
            }
        }
    }

    /// The weight arguments behind the propositions, checked node by node.
    #[test]
    fn weight_mechanics(seed in any::<u64>()) {
        let inst = gen_cs_instance(&small_profile(seed)).unwrap();
        let w = inst.purity();
        for k in inst.range().lo - 1..=inst.range().hi {
            // (a) A_k → C_k hits exactly the weights <= k of C_k.
            let a_image = column_space(&inst.a(k));
            prop_assert_eq!(&a_image, &inst.space(Family::C, k).step(k + w));
            // (b) C_{k+1} → B_{k+2} is injective away from weights <= k+1.
            let c_kernel = kernel(&inst.c(k + 1));
            prop_assert!(c_kernel.is_subspace_of(&inst.space(Family::C, k + 1).step(k + 1 + w)).unwrap());
            // (c) C_{k+1} → P_{k+1} vanishes on graded pieces of weight >= k+2.
            let s_image = column_space(&inst.s(k + 1));
            prop_assert!(s_image.is_subspace_of(&inst.space(Family::P, k + 1).step(k + 1 + w)).unwrap());
        }
    }

    #[test]
    fn nodes_outside_the_range_are_zero(seed in any::<u64>()) {
        let inst = gen_cs_instance(&small_profile(seed)).unwrap();
        let r = inst.range();
        for k in [r.lo - 3, r.lo - 1, r.hi + 1, r.hi + 4] {
            for fam in [Family::A, Family::B, Family::C, Family::P] {
                prop_assert_eq!(inst.space(fam, k).dim(), 0);
            }
            prop_assert!(inst.n(k).nrows() == 0 && inst.a(k).nrows() == 0);
        }
    }

    #[test]
    fn dirty_instances_never_get_verdicts(seed in any::<u64>(), which in 0usize..6) {
        let h = Hypothesis::ALL[which];
        let adv = gen_adversarial(&small_profile(seed).with_broken(h)).unwrap();
        let report = check_instance_hypotheses(&adv.instance);
        prop_assert_eq!(report.failed().into_iter().collect::<Vec<_>>(), vec![h]);
        for p in Proposition::ALL {
            for k in p.valid_degrees(&adv.instance) {
                prop_assert!(verify_proposition(&adv.instance, p, k).is_err());
            }
        }
    }
}
