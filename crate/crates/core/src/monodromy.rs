//! Nilpotent operators and the monodromy filtration centered at a weight `k`.
//!
//! Two independent constructions are provided: one assigns weights along
//! Jordan chains, the other is the classical recursion through
//! `ker N^m / im N^m`. Both must produce the same filtration, which is unique.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtered::{induced_on_sub_quotient, FilterError, FilteredMap, FilteredSpace};
use crate::linalg::{self, column_space, int, kernel, Matrix, Scalar, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("operator is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator acts on Q^{op} but the space has dimension {space}")]
    SpaceMismatch { op: usize, space: usize },
    #[error("operator is not nilpotent")]
    NotNilpotent,
}

/// `N: V → V(-1)` with `N` nilpotent. The filtration on `space` is carried
/// along but not constrained here; compatibility with `V(-1)` is checked by
/// [`NilpotentOp::as_filtered_map`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawNilpotent", into = "RawNilpotent")]
pub struct NilpotentOp {
    space: FilteredSpace,
    matrix: Matrix,
    /// Smallest `q` with `N^q = 0`.
    order: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNilpotent {
    space: FilteredSpace,
    matrix: Matrix,
}

impl TryFrom<RawNilpotent> for NilpotentOp {
    type Error = String;

    fn try_from(raw: RawNilpotent) -> Result<Self, String> {
        let d = raw.space.dim();
        let m = raw.matrix.conform(d, d).map_err(|e| e.to_string())?;
        NilpotentOp::new(raw.space, m).map_err(|e| e.to_string())
    }
}

impl From<NilpotentOp> for RawNilpotent {
    fn from(n: NilpotentOp) -> Self {
        RawNilpotent {
            space: n.space,
            matrix: n.matrix,
        }
    }
}

impl NilpotentOp {
    pub fn new(space: FilteredSpace, matrix: Matrix) -> Result<Self, MonodromyError> {
        if !matrix.is_square() {
            return Err(MonodromyError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() != space.dim() {
            return Err(MonodromyError::SpaceMismatch {
                op: matrix.nrows(),
                space: space.dim(),
            });
        }
        let order = nilpotency_order(&matrix).ok_or(MonodromyError::NotNilpotent)?;
        Ok(NilpotentOp { space, matrix, order })
    }

    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Smallest `q` with `N^q = 0` (0 only on the zero space).
    pub fn order(&self) -> usize {
        self.order
    }

    /// `N` as a filtered map `V → V(-1)`; fails unless `N·W_i ⊆ W_{i-2}`.
    pub fn as_filtered_map(&self) -> Result<FilteredMap, FilterError> {
        FilteredMap::new(
            self.space.clone(),
            self.space.tate_twist(-1),
            self.matrix.clone(),
            -1,
        )
    }

    /// Same operator, different filtration on the underlying space.
    pub fn with_space(&self, space: FilteredSpace) -> Result<Self, MonodromyError> {
        NilpotentOp::new(space, self.matrix.clone())
    }
}

/// Smallest `q` with `m^q = 0`, or `None` if `m` is not nilpotent.
pub fn nilpotency_order(m: &Matrix) -> Option<usize> {
    let n = m.nrows();
    let mut p = Matrix::identity(n);
    for q in 0..=n {
        if p.is_zero() {
            return Some(q);
        }
        p = &p * m;
    }
    None
}

/// A filtration together with the weight it is centered at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenteredFiltration {
    pub center: i64,
    pub filtration: FilteredSpace,
}

/// Jordan chains `[v, Nv, …, N^{m-1}v]` whose union is a basis, built from the
/// flag of kernels `ker N^j`.
pub fn jordan_chains(n: &Matrix) -> Vec<Vec<Vec<Scalar>>> {
    let dim = n.nrows();
    let order = nilpotency_order(n).expect("jordan_chains needs a nilpotent matrix");
    let mut kernels = vec![Subspace::zero(dim)];
    let mut power = Matrix::identity(dim);
    for _ in 1..=order {
        power = &power * n;
        kernels.push(kernel(&power));
    }
    let mut chains: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for level in (1..=order).rev() {
        let covered: Vec<&Vec<Scalar>> = chains
            .iter()
            .filter(|c| c.len() > level)
            .map(|c| &c[c.len() - level])
            .collect();
        let mut span = kernels[level - 1]
            .sum(&Subspace::span(dim, &covered).unwrap())
            .unwrap();
        for top in kernels[level].vectors() {
            if span.contains(top) {
                continue;
            }
            span = span.sum(&Subspace::span(dim, &[top]).unwrap()).unwrap();
            let mut chain = vec![top.to_vec()];
            for _ in 1..level {
                let next = n.apply(chain.last().unwrap());
                chain.push(next);
            }
            chains.push(chain);
        }
    }
    chains
}

/// Sizes of the Jordan blocks, largest first.
pub fn jordan_type(n: &Matrix) -> Vec<usize> {
    let mut t: Vec<usize> = jordan_chains(n).iter().map(Vec::len).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// Monodromy filtration centered at `k`: a chain of length `m` gets weights
/// `k+m-1, k+m-3, …, k-m+1` from its top down.
pub fn monodromy_filtration(n: &NilpotentOp, k: i64) -> CenteredFiltration {
    let dim = n.dim();
    let mut weighted = Vec::with_capacity(dim);
    for chain in jordan_chains(n.matrix()) {
        let m = chain.len() as i64;
        for (pos, v) in chain.into_iter().enumerate() {
            weighted.push((k + m - 1 - 2 * pos as i64, v));
        }
    }
    let filtration = if dim == 0 {
        FilteredSpace::zero()
    } else {
        FilteredSpace::from_weighted_basis(dim, &weighted).expect("Jordan chains form a basis")
    };
    CenteredFiltration { center: k, filtration }
}

/// How the recursive construction picks coordinates on `ker N^m / im N^m`
/// and a linear section back into `ker N^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionChoice {
    /// Greedy complement taken from the canonical basis.
    Canonical,
    /// Random recombination of the canonical complement plus random
    /// components along `im N^m`, seeded.
    Randomized(u64),
}

pub fn monodromy_filtration_recursive(n: &NilpotentOp, k: i64) -> CenteredFiltration {
    monodromy_filtration_recursive_with(n, k, SectionChoice::Canonical)
}

pub fn monodromy_filtration_recursive_with(
    n: &NilpotentOp,
    k: i64,
    section: SectionChoice,
) -> CenteredFiltration {
    let mut rng = match section {
        SectionChoice::Canonical => None,
        SectionChoice::Randomized(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let steps = recursive_steps(n.matrix(), k, &mut rng);
    let filtration = if n.dim() == 0 {
        FilteredSpace::zero()
    } else {
        FilteredSpace::new(n.dim(), steps).expect("recursive steps form a filtration")
    };
    CenteredFiltration { center: k, filtration }
}

fn recursive_steps(n: &Matrix, k: i64, rng: &mut Option<ChaCha8Rng>) -> BTreeMap<i64, Subspace> {
    let dim = n.nrows();
    let mut steps = BTreeMap::new();
    let order = nilpotency_order(n).expect("nilpotent");
    if order <= 1 {
        steps.insert(k, Subspace::full(dim));
        return steps;
    }
    let m = (order - 1) as i64;
    let nm = n.pow(order - 1);
    let ker = kernel(&nm);
    let im = column_space(&nm);
    let r = ker.dim();
    let coords = |v: &[Scalar]| ker.coordinates(v).expect("vector lies in ker N^m");

    // Quotient ker/im in ker-coordinates: basis [im ; complement], projection
    // reads the complement coordinates, the section is the complement itself.
    let im_k: Vec<Vec<Scalar>> = im.vectors().map(coords).collect();
    let im_sub = Subspace::span(r, &im_k).unwrap();
    let mut comp = im_sub.complement_in(&Subspace::full(r)).unwrap();
    if let Some(rng) = rng.as_mut() {
        comp = scramble_complement(&comp, &im_k, rng);
    }
    let q = comp.len();
    let mut frame = im_k.clone();
    frame.extend(comp.iter().cloned());
    let frame_inv = Matrix::from_rows_with_cols(frame, r)
        .unwrap()
        .inverse()
        .expect("image plus complement spans ker N^m");
    let d = im_k.len();
    let proj = Matrix::from_fn(q, r, |t, j| frame_inv[(j, d + t)].clone());

    // Induced operator on the quotient.
    let ker_basis = ker.basis();
    let mut induced_cols = Vec::with_capacity(q);
    for c in &comp {
        let lift = Matrix::from_rows_with_cols(vec![c.clone()], r).unwrap();
        let ambient = (&lift * ker_basis).row(0).to_vec();
        induced_cols.push(proj.apply(&coords(&n.apply(&ambient))));
    }
    let induced = Matrix::from_fn(q, q, |i, j| induced_cols[j][i].clone());

    steps.insert(k - m, im.clone());
    if q > 0 {
        let inner = recursive_steps(&induced, k, rng);
        let inner_space = FilteredSpace::new(q, inner).unwrap();
        for i in (k - m + 1)..=(k + m - 1) {
            let pre = linalg::preimage(&proj, &inner_space.step(i)).unwrap();
            let lifted = if pre.is_zero() {
                Subspace::zero(dim)
            } else {
                linalg::canonicalize(&(pre.basis() * ker_basis))
            };
            steps.insert(i, lifted);
        }
    }
    steps.insert(k + m - 1, ker);
    steps.insert(k + m, Subspace::full(dim));
    steps
}

fn scramble_complement(comp: &[Vec<Scalar>], im: &[Vec<Scalar>], rng: &mut ChaCha8Rng) -> Vec<Vec<Scalar>> {
    let q = comp.len();
    loop {
        let mix = Matrix::from_fn(q, q, |_, _| small_coefficient(rng));
        if mix.rank() < q {
            continue;
        }
        return (0..q)
            .map(|i| {
                let mut v = vec![Scalar::zero(); comp.first().map_or(0, Vec::len)];
                for (j, c) in comp.iter().enumerate() {
                    axpy(&mut v, &mix[(i, j)], c);
                }
                for w in im {
                    axpy(&mut v, &small_coefficient(rng), w);
                }
                v
            })
            .collect();
    }
}

fn axpy(acc: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (y, xi) in acc.iter_mut().zip(x) {
        *y += a * xi;
    }
}

// Integer coefficients keep entries small through the recursion; any
// invertible mix is an equally valid section choice.
fn small_coefficient(rng: &mut ChaCha8Rng) -> Scalar {
    linalg::int(rng.gen_range(-3..=3))
}

/// Result of checking the two defining axioms of a centered monodromy filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomVerdict {
    Holds,
    /// `N·M_i ⊄ M_{i-2}`; the witness is an image vector outside `M_{i-2}`.
    ShiftFails { weight: i64, witness: Vec<Scalar> },
    /// `N^i: Gr_{k+i} → Gr_{k-i}` is not an isomorphism.
    IsomorphismFails {
        power: i64,
        source_dim: usize,
        target_dim: usize,
        rank: usize,
    },
    /// The filtration and the operator live on different spaces.
    AmbientMismatch,
}

impl AxiomVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, AxiomVerdict::Holds)
    }
}

pub fn verify_centered_axioms(f: &CenteredFiltration, n: &NilpotentOp) -> AxiomVerdict {
    let filt = &f.filtration;
    if filt.dim() != n.dim() {
        return AxiomVerdict::AmbientMismatch;
    }
    let (Some(lo), Some(hi)) = (filt.min_weight(), filt.max_weight()) else {
        return AxiomVerdict::Holds;
    };
    let nm = n.matrix();
    for i in lo..=hi + 2 {
        let img = linalg::image(nm, &filt.step(i)).unwrap();
        let below = filt.step(i - 2);
        if let Some(witness) = img.first_outside(&below) {
            return AxiomVerdict::ShiftFails { weight: i, witness };
        }
    }
    let k = f.center;
    let reach = (hi - k).max(k - lo) + 1;
    let mut power = nm.clone();
    for i in 1..=reach {
        let upper = filt.graded_piece(k + i);
        let lower = filt.graded_piece(k - i);
        if upper.dim != 0 || lower.dim != 0 {
            let induced = &(&lower.projection * &power) * &upper.lift.transpose();
            let rank = induced.rank();
            if upper.dim != lower.dim || rank != upper.dim {
                return AxiomVerdict::IsomorphismFails {
                    power: i,
                    source_dim: upper.dim,
                    target_dim: lower.dim,
                    rank,
                };
            }
        }
        power = &power * nm;
    }
    AxiomVerdict::Holds
}

/// Outcome of the kernel/cokernel weight-bound check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundsVerdict {
    Holds,
    /// The space's weight filtration is not the monodromy filtration centered at `k`.
    HypothesisNotSatisfied,
    /// A vector of `ker N` outside `W_k`.
    KernelBoundFails { witness: Vec<Scalar> },
    /// The cokernel of `N: V → V(-1)` has a nonzero `W_{k+1}`.
    CokernelBoundFails,
}

/// `ker N` has weights `<= k` and `coker(N: V → V(-1))` has weights `>= k+2`,
/// provided the weight filtration on `V` is the monodromy filtration centered at `k`.
pub fn ker_coker_weight_bounds(n: &NilpotentOp, k: i64) -> Result<BoundsVerdict, FilterError> {
    if monodromy_filtration(n, k).filtration != *n.space() {
        return Ok(BoundsVerdict::HypothesisNotSatisfied);
    }
    let sq = induced_on_sub_quotient(&n.as_filtered_map()?)?;
    if !sq.kernel.weights_leq(k) {
        let wk = n.space().step(k);
        let witness = sq.kernel_basis.first_outside(&wk).expect("kernel escapes W_k");
        return Ok(BoundsVerdict::KernelBoundFails { witness });
    }
    if !sq.cokernel.weights_geq(k + 2) {
        return Ok(BoundsVerdict::CokernelBoundFails);
    }
    Ok(BoundsVerdict::Holds)
}

/// `T = exp(N)`, the unipotent monodromy whose logarithm is `N`.
pub fn unipotent_monodromy(n: &NilpotentOp) -> Matrix {
    let dim = n.dim();
    let mut total = Matrix::identity(dim);
    let mut term = Matrix::identity(dim);
    let mut fact = Scalar::one();
    for j in 1..n.order().max(1) {
        term = &term * n.matrix();
        fact *= int(j as i64);
        total = &total + &term.scale(&fact.recip());
    }
    total
}

/// Monodromy invariants, computed as `ker N`.
pub fn monodromy_invariants(n: &NilpotentOp) -> Subspace {
    kernel(n.matrix())
}

/// Jordan-form nilpotent with the given block sizes, acting on the pure space of weight `center`.
pub fn jordan_block_op(blocks: &[usize], center: i64) -> NilpotentOp {
    let dim: usize = blocks.iter().sum();
    let mut m = Matrix::zeros(dim, dim);
    let mut off = 0;
    for &b in blocks {
        for j in 0..b.saturating_sub(1) {
            m[(off + j + 1, off + j)] = Scalar::one();
        }
        off += b;
    }
    NilpotentOp::new(FilteredSpace::pure(dim, center), m).expect("Jordan blocks are nilpotent")
}
