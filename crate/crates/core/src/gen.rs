//! Seeded construction of clean and adversarial instances.
//!
//! Instances are built graded first: every node gets a basis of homogeneous
//! vectors and every map sends basis vectors to basis vectors of the same
//! weight, or to zero. Each node is then moved by a random isomorphism onto a
//! filtered space in general position, so nothing stays visibly split.
//!
//! Graded skeleton, with `w` the purity weight:
//!
//! * `P_k` is a sum of Jordan chains; vector `j` of a chain of length `m` has
//!   weight `k+w+m-1-2j`. Only degrees `k <= hi-2` carry chains, since
//!   exactness at the top of the range forces the rest to vanish.
//! * `C_k` has one piece per chain top of `P_{k-1}` (weight `k+w+m`) and one
//!   per chain bottom of `P_k` (weight `k+w-m+1`); `r_k` and `s_k` are the
//!   obvious inclusion and projection.
//! * A piece of weight `<= k+w` is hit by `A_k`; any other piece maps
//!   injectively to `B_{k+1}`.
//! * Fillers are pairs of vectors in `B_k` and `A_k` of weight `k+w` joined by
//!   `b_k`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cs::{
    check_instance_hypotheses, evaluate_conclusion, CsInstance, DegreeData, DegreeRange, Hypothesis, Profile,
    Proposition, TwistedMatrix, VerdictReport,
};
use crate::filtered::FilteredSpace;
use num_traits::Zero;

use crate::linalg::{self, Matrix, Scalar};
use crate::monodromy::{monodromy_filtration, NilpotentOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("generator produced an inconsistent instance: expected failures {expected:?}, found {found:?}")]
    Inconsistent {
        expected: Vec<Hypothesis>,
        found: Vec<Hypothesis>,
    },
}

fn default_max_dim() -> usize {
    6
}

fn default_range() -> DegreeRange {
    DegreeRange { lo: 0, hi: 4 }
}

fn default_spread() -> usize {
    2
}

/// Knobs for [`gen_cs_instance`] and [`gen_adversarial`]. `weight_spread` is
/// the largest Jordan block length minus one, so `0` makes every `N_k` zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenProfile {
    pub seed: u64,
    #[serde(default = "default_max_dim")]
    pub max_dim_per_node: usize,
    #[serde(default = "default_range")]
    pub degree_range: DegreeRange,
    #[serde(default = "default_spread")]
    pub weight_spread: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broken_hypothesis: Option<Hypothesis>,
    #[serde(default)]
    pub purity: i64,
}

impl GenProfile {
    pub fn new(seed: u64) -> Self {
        GenProfile {
            seed,
            max_dim_per_node: default_max_dim(),
            degree_range: default_range(),
            weight_spread: default_spread(),
            broken_hypothesis: None,
            purity: 0,
        }
    }

    pub fn with_max_dim(mut self, d: usize) -> Self {
        self.max_dim_per_node = d;
        self
    }

    pub fn with_range(mut self, lo: i64, hi: i64) -> Self {
        self.degree_range = DegreeRange { lo, hi };
        self
    }

    pub fn with_spread(mut self, s: usize) -> Self {
        self.weight_spread = s;
        self
    }

    pub fn with_broken(mut self, h: Hypothesis) -> Self {
        self.broken_hypothesis = Some(h);
        self
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.degree_range.is_empty() {
            return Err(GenError::InvalidProfile(format!(
                "empty degree range {}",
                self.degree_range
            )));
        }
        Ok(())
    }
}

/// SplitMix64 step: decorrelated per-task seeds from one base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    linalg::ratio(rng.gen_range(-7..=7), rng.gen_range(1..=7))
}

fn nonzero_small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let p = rng.gen_range(1..=7) * if rng.gen_bool(0.5) { 1 } else { -1 };
    linalg::ratio(p, rng.gen_range(1..=7))
}

/// A random invertible matrix and its inverse: a diagonal scaling, a
/// permutation and `2n` elementary transvections with small rational
/// entries. Entries stay far smaller than for a dense draw.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let mut h = Matrix::identity(n);
    let mut h_inv = Matrix::identity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for (i, &j) in perm.iter().enumerate() {
        let d = nonzero_small_rational(rng);
        h[(i, i)] = Scalar::zero();
        h_inv[(i, i)] = Scalar::zero();
        h[(i, j)] = d.clone();
        h_inv[(j, i)] = d.recip();
    }
    if n < 2 {
        return (h, h_inv);
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = linalg::int(rng.gen_range(1..=7) * if rng.gen_bool(0.5) { 1 } else { -1 });
        // h ← (I + c·E_ij)·h, h_inv ← h_inv·(I - c·E_ij)
        for col in 0..n {
            let t = &c * &h[(j, col)];
            h[(i, col)] += t;
        }
        for row in 0..n {
            let t = &c * &h_inv[(row, i)];
            h_inv[(row, j)] -= t;
        }
    }
    (h, h_inv)
}

/// Random partition of `total` into parts of size at most `max_part`.
fn random_partition(rng: &mut ChaCha8Rng, total: usize, max_part: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut left = total;
    while left > 0 {
        let m = rng.gen_range(1..=left.min(max_part.max(1)));
        parts.push(m);
        left -= m;
    }
    parts
}

/// A homogeneous basis moved into general position by `t`.
struct Frame {
    weights: Vec<i64>,
    t: Matrix,
    t_inv: Matrix,
}

impl Frame {
    /// `t = h·g` with `h` invertible and `g` unipotent, adding lower-weight
    /// components to each basis vector.
    fn random(rng: &mut ChaCha8Rng, weights: Vec<i64>) -> Self {
        let n = weights.len();
        let mut g = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if weights[j] < weights[i] && rng.gen_bool(0.5) {
                    g[(j, i)] = small_rational(rng);
                }
            }
        }
        let (h, h_inv) = random_invertible(rng, n);
        let g_inv = g.inverse().expect("unipotent");
        Frame {
            weights,
            t: &h * &g,
            t_inv: &g_inv * &h_inv,
        }
    }

    fn space(&self) -> FilteredSpace {
        let vecs: Vec<(i64, Vec<Scalar>)> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (w, self.t.column(i)))
            .collect();
        FilteredSpace::from_weighted_basis(self.weights.len(), &vecs).expect("frame is a basis")
    }

    fn dim(&self) -> usize {
        self.weights.len()
    }
}

fn transport(target: &Frame, f: &Matrix, source: &Frame) -> Matrix {
    &(&target.t * f) * &source.t_inv
}

/// Jordan-form nilpotent with chains `[v, Nv, …]` laid out consecutively, and
/// the homogeneous weights of the monodromy filtration centered at `k`.
fn jordan_skeleton(blocks: &[usize], k: i64) -> (Vec<i64>, Matrix) {
    let dim: usize = blocks.iter().sum();
    let mut weights = Vec::with_capacity(dim);
    let mut n = Matrix::zeros(dim, dim);
    let mut off = 0;
    for &m in blocks {
        for j in 0..m {
            weights.push(k + m as i64 - 1 - 2 * j as i64);
            if j + 1 < m {
                n[(off + j + 1, off + j)] = num_traits::One::one();
            }
        }
        off += m;
    }
    (weights, n)
}

/// A random space of dimension `dim` whose weight filtration is the monodromy
/// filtration of the returned operator centered at `k`.
pub fn gen_centered_mhs(seed: u64, dim: usize, k: i64) -> (FilteredSpace, NilpotentOp) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = random_partition(&mut rng, dim, dim);
    let (weights, n0) = jordan_skeleton(&blocks, k);
    let frame = Frame::random(&mut rng, weights);
    let space = frame.space();
    let n = transport(&frame, &n0, &frame);
    let op = NilpotentOp::new(space.clone(), n).expect("conjugate of a nilpotent");
    assert_eq!(
        monodromy_filtration(&op, k).filtration,
        space,
        "generated filtration is not centered"
    );
    (space, op)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    FromA,
    ToB,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    weight: i64,
    route: Route,
    top: bool,
    chain: usize,
}

#[derive(Clone, Copy, Debug)]
struct Filler {
    a_weight: i64,
    b_weight: i64,
    linked: bool,
}

/// The graded data before conjugation, indexed by `k - lo`.
#[derive(Clone, Debug)]
struct Skeleton {
    range: DegreeRange,
    purity: i64,
    chains: Vec<Vec<usize>>,
    shift: Vec<i64>,
    fillers: Vec<Vec<Filler>>,
    /// `(k, piece)` whose route is the opposite of the weight rule.
    flips: BTreeSet<(i64, usize)>,
    /// `(k, piece)` bottom pieces that `s_k` kills.
    dropped_s: BTreeSet<(i64, usize)>,
}

impl Skeleton {
    fn idx(&self, k: i64) -> Option<usize> {
        self.range.contains(k).then(|| (k - self.range.lo) as usize)
    }

    fn chains_at(&self, k: i64) -> &[usize] {
        self.idx(k).map_or(&[], |i| &self.chains[i])
    }

    fn shift_at(&self, k: i64) -> i64 {
        self.idx(k).map_or(0, |i| self.shift[i])
    }

    fn fillers_at(&self, k: i64) -> &[Filler] {
        self.idx(k).map_or(&[], |i| &self.fillers[i])
    }

    fn center(&self, k: i64) -> i64 {
        k + self.purity
    }

    fn pieces(&self, k: i64) -> Vec<Piece> {
        let mut out = Vec::new();
        for (chain, &m) in self.chains_at(k - 1).iter().enumerate() {
            out.push(Piece {
                weight: self.center(k) + m as i64 + self.shift_at(k - 1),
                route: Route::ToB,
                top: true,
                chain,
            });
        }
        for (chain, &m) in self.chains_at(k).iter().enumerate() {
            out.push(Piece {
                weight: self.center(k) - m as i64 + 1 + self.shift_at(k),
                route: Route::ToB,
                top: false,
                chain,
            });
        }
        for (i, p) in out.iter_mut().enumerate() {
            let from_a = (p.weight <= self.center(k)) != self.flips.contains(&(k, i));
            p.route = if from_a { Route::FromA } else { Route::ToB };
        }
        out
    }

    fn p_weights(&self, k: i64) -> Vec<i64> {
        let (w, _) = jordan_skeleton(self.chains_at(k), self.center(k));
        w.into_iter().map(|x| x + self.shift_at(k)).collect()
    }

    fn chain_offsets(&self, k: i64) -> Vec<usize> {
        self.chains_at(k)
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m;
                Some(o)
            })
            .collect()
    }

    /// Indices into `pieces(k)` that come from `A_k`, and those sent to `B_{k+1}`.
    fn split(&self, k: i64) -> (Vec<usize>, Vec<usize>) {
        let pieces = self.pieces(k);
        let from_a = (0..pieces.len()).filter(|&i| pieces[i].route == Route::FromA).collect();
        let to_b = (0..pieces.len()).filter(|&i| pieces[i].route == Route::ToB).collect();
        (from_a, to_b)
    }

    fn a_weights(&self, k: i64) -> Vec<i64> {
        let pieces = self.pieces(k);
        let (from_a, _) = self.split(k);
        from_a
            .iter()
            .map(|&i| pieces[i].weight)
            .chain(self.fillers_at(k).iter().map(|f| f.a_weight))
            .collect()
    }

    fn b_weights(&self, k: i64) -> Vec<i64> {
        let prev = self.pieces(k - 1);
        let (_, to_b) = self.split(k - 1);
        to_b.iter()
            .map(|&i| prev[i].weight)
            .chain(self.fillers_at(k).iter().map(|f| f.b_weight))
            .collect()
    }

    fn realize(&self, rng: &mut ChaCha8Rng, profile: Profile) -> CsInstance {
        let r = self.range;
        assert!(
            self.pieces(r.hi).iter().all(|p| p.route == Route::FromA),
            "C_hi must not map past the range"
        );
        let frames: Vec<[Frame; 4]> = r
            .iter()
            .map(|k| {
                [
                    Frame::random(rng, self.a_weights(k)),
                    Frame::random(rng, self.b_weights(k)),
                    Frame::random(rng, self.pieces(k).iter().map(|p| p.weight).collect()),
                    Frame::random(rng, self.p_weights(k)),
                ]
            })
            .collect();
        let empty = Frame {
            weights: Vec::new(),
            t: Matrix::zeros(0, 0),
            t_inv: Matrix::zeros(0, 0),
        };
        let frame = |k: i64, which: usize| -> &Frame {
            if r.contains(k) {
                &frames[(k - r.lo) as usize][which]
            } else {
                &empty
            }
        };
        let (fa, fb, fc, fp) = (0, 1, 2, 3);

        let degrees = r
            .iter()
            .map(|k| {
                let pieces = self.pieces(k);
                let (from_a, to_b) = self.split(k);
                let offsets = self.chain_offsets(k);
                let prev_offsets = self.chain_offsets(k - 1);
                let n_fill_a = from_a.len();
                let prev_to_b = self.split(k - 1).1.len();

                let (_, n) = jordan_skeleton(self.chains_at(k), 0);

                let mut b = Matrix::zeros(frame(k, fa).dim(), frame(k, fb).dim());
                for (i, f) in self.fillers_at(k).iter().enumerate() {
                    if f.linked {
                        b[(n_fill_a + i, prev_to_b + i)] = num_traits::One::one();
                    }
                }
                let mut a = Matrix::zeros(frame(k, fc).dim(), frame(k, fa).dim());
                for (col, &piece) in from_a.iter().enumerate() {
                    a[(piece, col)] = num_traits::One::one();
                }
                let mut c = Matrix::zeros(frame(k + 1, fb).dim(), frame(k, fc).dim());
                for (row, &piece) in to_b.iter().enumerate() {
                    c[(row, piece)] = num_traits::One::one();
                }
                let mut rm = Matrix::zeros(frame(k, fc).dim(), frame(k - 1, fp).dim());
                let mut s = Matrix::zeros(frame(k, fp).dim(), frame(k, fc).dim());
                for (i, p) in pieces.iter().enumerate() {
                    if p.top {
                        rm[(i, prev_offsets[p.chain])] = num_traits::One::one();
                    } else if !self.dropped_s.contains(&(k, i)) {
                        let m = self.chains_at(k)[p.chain];
                        s[(offsets[p.chain] + m - 1, i)] = num_traits::One::one();
                    }
                }

                DegreeData {
                    a: frame(k, fa).space(),
                    b: frame(k, fb).space(),
                    c: frame(k, fc).space(),
                    p: frame(k, fp).space(),
                    n: TwistedMatrix::new(transport(frame(k, fp), &n, frame(k, fp)), -1),
                    col_b: TwistedMatrix::plain(transport(frame(k, fa), &b, frame(k, fb))),
                    col_a: TwistedMatrix::plain(transport(frame(k, fc), &a, frame(k, fa))),
                    col_c: TwistedMatrix::plain(transport(frame(k + 1, fb), &c, frame(k, fc))),
                    row_r: TwistedMatrix::plain(transport(frame(k, fc), &rm, frame(k - 1, fp))),
                    row_s: TwistedMatrix::plain(transport(frame(k, fp), &s, frame(k, fc))),
                }
            })
            .collect();
        CsInstance::new(r, profile, self.purity, degrees).expect("skeleton shapes agree")
    }
}

fn random_skeleton(rng: &mut ChaCha8Rng, profile: &GenProfile, range: DegreeRange) -> Skeleton {
    let len = range.len();
    let max_dim = profile.max_dim_per_node;
    let mut sk = Skeleton {
        range,
        purity: profile.purity,
        chains: vec![Vec::new(); len],
        shift: vec![0; len],
        fillers: vec![Vec::new(); len],
        flips: BTreeSet::new(),
        dropped_s: BTreeSet::new(),
    };
    for k in range.iter().filter(|&k| k <= range.hi - 2) {
        let d = rng.gen_range(0..=max_dim / 2);
        sk.chains[(k - range.lo) as usize] = random_partition(rng, d, profile.weight_spread + 1);
    }
    for k in range.iter() {
        let used = sk.split(k).0.len().max(sk.split(k - 1).1.len());
        let room = max_dim.saturating_sub(used);
        let count = rng.gen_range(0..=room);
        let w = sk.center(k);
        sk.fillers[(k - range.lo) as usize] = vec![
            Filler {
                a_weight: w,
                b_weight: w,
                linked: true,
            };
            count
        ];
    }
    sk
}

fn ensure_chain(rng: &mut ChaCha8Rng, sk: &mut Skeleton, k: i64, spread: usize) {
    let i = sk.idx(k).expect("degree in range");
    if sk.chains[i].is_empty() {
        sk.chains[i].push(rng.gen_range(1..=spread + 1));
    }
}

fn expect_failures(inst: &CsInstance, expected: &[Hypothesis]) -> Result<(), GenError> {
    let found: Vec<Hypothesis> = check_instance_hypotheses(inst).failed().into_iter().collect();
    if found != expected {
        return Err(GenError::Inconsistent {
            expected: expected.to_vec(),
            found,
        });
    }
    Ok(())
}

/// A clean instance. The result is checked against the hypotheses before it
/// is returned; a mismatch is a generator bug and surfaces as an error.
pub fn gen_cs_instance(profile: &GenProfile) -> Result<CsInstance, GenError> {
    profile.validate()?;
    if profile.broken_hypothesis.is_some() {
        return Err(GenError::InvalidProfile(
            "broken_hypothesis is set; use gen_adversarial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let sk = random_skeleton(&mut rng, profile, profile.degree_range);
    let inst = sk.realize(&mut rng, Profile::Abstract);
    expect_failures(&inst, &[])?;
    Ok(inst)
}

/// An instance failing exactly one hypothesis, and the degree that was tampered with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adversarial {
    pub instance: CsInstance,
    pub broken: Hypothesis,
    pub degree: i64,
}

/// Perturbs a clean skeleton so that exactly `profile.broken_hypothesis`
/// fails. Breaking the centering of `P` or exactness of the row needs a
/// degree `k` with `k+2` in range, so ranges shorter than three degrees are
/// extended upward.
pub fn gen_adversarial(profile: &GenProfile) -> Result<Adversarial, GenError> {
    profile.validate()?;
    let broken = profile
        .broken_hypothesis
        .ok_or_else(|| GenError::InvalidProfile("no broken_hypothesis given".into()))?;
    let mut range = profile.degree_range;
    if matches!(broken, Hypothesis::PCentering | Hypothesis::RowExact) && range.len() < 3 {
        range.hi = range.lo + 2;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let mut sk = random_skeleton(&mut rng, profile, range);
    let spread = profile.weight_spread;
    let (lo, hi) = (range.lo, range.hi);
    let long = range.len() >= 3;
    let degree = match broken {
        Hypothesis::ABound if long && rng.gen_bool(0.5) => {
            // A chain top of P_{t-1} lands in C_t with weight above t; hit it from A_t.
            let t = rng.gen_range(lo + 1..=hi - 1);
            ensure_chain(&mut rng, &mut sk, t - 1, spread);
            sk.flips.insert((t, 0));
            t
        }
        Hypothesis::ABound => {
            let t = rng.gen_range(lo..=hi);
            let w = sk.center(t) + 1;
            sk.fillers[(t - lo) as usize].push(Filler {
                a_weight: w,
                b_weight: w,
                linked: true,
            });
            t
        }
        Hypothesis::BBound if long && rng.gen_bool(0.5) => {
            // A chain bottom of P_t, weight at most t, sent on to B_{t+1}.
            let t = rng.gen_range(lo..=hi - 2);
            ensure_chain(&mut rng, &mut sk, t, spread);
            sk.flips.insert((t, sk.chains_at(t - 1).len()));
            t + 1
        }
        Hypothesis::BBound => {
            let t = rng.gen_range(lo..=hi);
            let w = sk.center(t) - 1;
            sk.fillers[(t - lo) as usize].push(Filler {
                a_weight: w,
                b_weight: w,
                linked: true,
            });
            t
        }
        Hypothesis::PCentering => {
            let t = rng.gen_range(lo..=hi - 2);
            ensure_chain(&mut rng, &mut sk, t, spread);
            sk.shift[(t - lo) as usize] = *[-1, 1].choose(&mut rng).unwrap();
            t
        }
        Hypothesis::RowExact => {
            let t = rng.gen_range(lo..=hi - 2);
            ensure_chain(&mut rng, &mut sk, t, spread);
            sk.dropped_s.insert((t, sk.chains_at(t - 1).len()));
            t
        }
        Hypothesis::ColumnExact => {
            let t = rng.gen_range(lo..=hi);
            let w = sk.center(t);
            let fillers = &mut sk.fillers[(t - lo) as usize];
            if fillers.is_empty() {
                fillers.push(Filler {
                    a_weight: w,
                    b_weight: w,
                    linked: true,
                });
            }
            fillers[0].linked = false;
            t
        }
        Hypothesis::Strictness => {
            // b_t: weight t+1 onto weight t is compatible but not strict.
            let t = rng.gen_range(lo..=hi);
            let w = sk.center(t);
            sk.fillers[(t - lo) as usize].push(Filler {
                a_weight: w,
                b_weight: w + 1,
                linked: true,
            });
            t
        }
    };
    let instance = sk.realize(&mut rng, Profile::Abstract);
    expect_failures(&instance, &[broken])?;
    Ok(Adversarial {
        instance,
        broken,
        degree,
    })
}

/// An adversarial instance on which a proposition's conclusion fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadBearingFind {
    pub attempt: usize,
    pub profile: GenProfile,
    pub adversarial: Adversarial,
    pub verdict: VerdictReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub budget: usize,
    pub tried: usize,
    pub found: Option<LoadBearingFind>,
}

/// Draws up to `budget` instances with a weight hypothesis broken (`A_bound`
/// or `P_centering`, alternately) and stops at the first one on which the
/// first or fourth proposition is not exact.
pub fn search_load_bearing(budget: usize, seed: u64) -> SearchOutcome {
    for attempt in 0..budget {
        let s = derive_seed(seed, attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let broken = if attempt % 2 == 0 {
            Hypothesis::ABound
        } else {
            Hypothesis::PCentering
        };
        let profile = GenProfile::new(s)
            .with_max_dim(rng.gen_range(2..=8))
            .with_spread(rng.gen_range(0..=2))
            .with_broken(broken);
        let Ok(adv) = gen_adversarial(&profile) else {
            continue;
        };
        let inst = &adv.instance;
        let bad = [Proposition::P1, Proposition::P4]
            .into_iter()
            .flat_map(|p| p.valid_degrees(inst).map(move |k| (p, k)))
            .map(|(p, k)| evaluate_conclusion(inst, p, k))
            .find(|v| !v.exact);
        if let Some(verdict) = bad {
            return SearchOutcome {
                budget,
                tried: attempt + 1,
                found: Some(LoadBearingFind {
                    attempt,
                    profile,
                    adversarial: adv,
                    verdict,
                }),
            };
        }
    }
    SearchOutcome {
        budget,
        tried: budget,
        found: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::verify_all_propositions;
    use crate::monodromy::verify_centered_axioms;

    #[test]
    fn centered_mhs_small_cases() {
        let (v, n) = gen_centered_mhs(1, 0, 3);
        assert_eq!(v, FilteredSpace::zero());
        assert_eq!(n.dim(), 0);
        for seed in 0..20 {
            let (v, n) = gen_centered_mhs(seed, 5, -1);
            assert_eq!(gen_centered_mhs(seed, 5, -1), (v.clone(), n.clone()));
            let f = monodromy_filtration(&n, -1);
            assert!(verify_centered_axioms(&f, &n).holds());
        }
    }

    #[test]
    fn derive_seed_spreads() {
        let seeds: BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn clean_instances_verify() {
        for seed in 0..10 {
            let p = GenProfile::new(seed);
            let inst = gen_cs_instance(&p).unwrap();
            assert_eq!(inst.to_json(), gen_cs_instance(&p).unwrap().to_json());
            assert!(verify_all_propositions(&inst).unwrap().iter().all(|v| v.exact));
        }
    }

    #[test]
    fn max_dim_zero_is_the_zero_instance() {
        let p = GenProfile::new(3).with_max_dim(0).with_range(-2, 3);
        assert_eq!(gen_cs_instance(&p).unwrap(), CsInstance::zero(p.degree_range));
    }

    #[test]
    fn each_hypothesis_can_be_broken_alone() {
        for h in Hypothesis::ALL {
            for seed in 0..8 {
                let adv = gen_adversarial(&GenProfile::new(seed).with_broken(h)).unwrap();
                assert_eq!(adv.broken, h);
            }
        }
        let short = GenProfile::new(0).with_range(0, 0).with_broken(Hypothesis::PCentering);
        assert_eq!(gen_adversarial(&short).unwrap().instance.range().len(), 3);
    }

    #[test]
    fn profile_json_defaults() {
        let p: GenProfile = serde_json::from_str(r#"{"seed":9}"#).unwrap();
        assert_eq!(p, GenProfile::new(9));
        assert!(serde_json::from_str::<GenProfile>(r#"{"seed":9,"extra":1}"#).is_err());
    }
}
