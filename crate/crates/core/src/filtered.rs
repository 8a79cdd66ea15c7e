//! Finite-dimensional rational spaces with finite increasing weight
//! filtrations, and the weight-compatible maps between them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    self, column_space, kernel, Exactness, LinalgError, Matrix, Scalar, Subspace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("filtration step W_{weight} lives in Q^{found}, expected Q^{dim}")]
    StepAmbient { weight: i64, found: usize, dim: usize },
    #[error("filtration is not increasing: W_{lower} is not contained in W_{upper}")]
    NotNested { lower: i64, upper: i64 },
    #[error("filtration is not exhaustive: top step has dimension {top} in a space of dimension {dim}")]
    NotExhaustive { top: usize, dim: usize },
    #[error("map is not weight-compatible: it moves W_{weight} of the source outside W_{weight} of the target")]
    NotCompatible { weight: i64, witness: Vec<Scalar> },
    #[error("map is not strict at weight {weight}")]
    NotStrict { weight: i64, witness: Vec<Scalar> },
    #[error("maps do not compose: target of the first differs from source of the second")]
    NotComposable,
    #[error("weighted vectors do not form a basis of Q^{dim}")]
    NotABasis { dim: usize },
}

/// `Q^dim` with a weight filtration stored by its jumps: `W_i` is the step at
/// the greatest key `<= i`, zero below the first key, everything from the last
/// key on. Only weights where the filtration actually grows are kept, so equal
/// filtrations have equal representations.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFilteredSpace", into = "RawFilteredSpace")]
pub struct FilteredSpace {
    dim: usize,
    steps: BTreeMap<i64, Subspace>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilteredSpace {
    dim: usize,
    #[serde(default)]
    steps: BTreeMap<i64, Matrix>,
}

impl TryFrom<RawFilteredSpace> for FilteredSpace {
    type Error = FilterError;

    fn try_from(raw: RawFilteredSpace) -> Result<Self, FilterError> {
        let steps = raw
            .steps
            .into_iter()
            .map(|(w, m)| {
                let m = m.conform_cols(raw.dim)?;
                Ok((w, linalg::canonicalize(&m)))
            })
            .collect::<Result<BTreeMap<_, _>, FilterError>>()?;
        FilteredSpace::new(raw.dim, steps)
    }
}

impl From<FilteredSpace> for RawFilteredSpace {
    fn from(v: FilteredSpace) -> Self {
        RawFilteredSpace {
            dim: v.dim,
            steps: v.steps.into_iter().map(|(w, s)| (w, s.basis().clone())).collect(),
        }
    }
}

impl Matrix {
    fn conform_cols(self, cols: usize) -> Result<Matrix, LinalgError> {
        let rows = self.nrows();
        self.conform(rows, cols)
    }
}

/// `Gr_i = W_i / W_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece {
    pub weight: i64,
    pub dim: usize,
    /// Rows lifting a basis of `Gr_i` into `W_i`.
    pub lift: Matrix,
    /// `dim × ambient`; on `W_i` its kernel is exactly `W_{i-1}`, and it sends
    /// the rows of `lift` to the standard basis.
    pub projection: Matrix,
}

/// Proof that a filtered space is pure of a single weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurityCertificate {
    pub space: FilteredSpace,
    pub weight: i64,
}

impl FilteredSpace {
    /// The zero space.
    pub const ZERO: FilteredSpace = FilteredSpace {
        dim: 0,
        steps: BTreeMap::new(),
    };

    pub fn new(dim: usize, steps: BTreeMap<i64, Subspace>) -> Result<Self, FilterError> {
        let mut kept = BTreeMap::new();
        let mut prev: Option<(i64, &Subspace)> = None;
        for (&w, s) in &steps {
            if s.ambient_dim() != dim {
                return Err(FilterError::StepAmbient {
                    weight: w,
                    found: s.ambient_dim(),
                    dim,
                });
            }
            if let Some((pw, ps)) = prev {
                if !ps.is_subspace_of(s)? {
                    return Err(FilterError::NotNested { lower: pw, upper: w });
                }
                if ps.dim() == s.dim() {
                    prev = Some((w, s));
                    continue;
                }
            }
            if !s.is_zero() {
                kept.insert(w, s.clone());
            }
            prev = Some((w, s));
        }
        let top = steps.values().next_back().map_or(0, Subspace::dim);
        if top != dim {
            return Err(FilterError::NotExhaustive { top, dim });
        }
        Ok(FilteredSpace { dim, steps: kept })
    }

    pub fn zero() -> Self {
        FilteredSpace {
            dim: 0,
            steps: BTreeMap::new(),
        }
    }

    /// `Q^dim` pure of the given weight.
    pub fn pure(dim: usize, weight: i64) -> Self {
        let mut steps = BTreeMap::new();
        if dim > 0 {
            steps.insert(weight, Subspace::full(dim));
        }
        FilteredSpace { dim, steps }
    }

    /// Filtration with `W_i` spanned by the given vectors of weight `<= i`.
    /// The vectors must form a basis of `Q^dim`.
    pub fn from_weighted_basis(dim: usize, vectors: &[(i64, Vec<Scalar>)]) -> Result<Self, FilterError> {
        let all: Vec<&Vec<Scalar>> = vectors.iter().map(|(_, v)| v).collect();
        if vectors.len() != dim || Subspace::span(dim, &all)?.dim() != dim {
            return Err(FilterError::NotABasis { dim });
        }
        let mut weights: Vec<i64> = vectors.iter().map(|(w, _)| *w).collect();
        weights.sort_unstable();
        weights.dedup();
        let mut steps = BTreeMap::new();
        for w in weights {
            let below: Vec<&Vec<Scalar>> =
                vectors.iter().filter(|(x, _)| *x <= w).map(|(_, v)| v).collect();
            steps.insert(w, Subspace::span(dim, &below)?);
        }
        FilteredSpace::new(dim, steps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weights where the filtration jumps, with `W` at each.
    pub fn jumps(&self) -> &BTreeMap<i64, Subspace> {
        &self.steps
    }

    pub fn min_weight(&self) -> Option<i64> {
        self.steps.keys().next().copied()
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.steps.keys().next_back().copied()
    }

    /// `W_i`.
    pub fn step(&self, i: i64) -> Subspace {
        self.steps
            .range(..=i)
            .next_back()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Subspace::zero(self.dim))
    }

    fn step_dim(&self, i: i64) -> usize {
        self.steps.range(..=i).next_back().map_or(0, |(_, s)| s.dim())
    }

    /// `dim Gr_i` for every weight with a nonzero graded piece.
    pub fn graded_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        let mut prev = 0;
        for (&w, s) in &self.steps {
            out.insert(w, s.dim() - prev);
            prev = s.dim();
        }
        out
    }

    pub fn graded_dim(&self, i: i64) -> usize {
        self.step_dim(i) - self.step_dim(i - 1)
    }

    pub fn graded_piece(&self, i: i64) -> GradedPiece {
        let lower = self.step(i - 1);
        let upper = self.step(i);
        let comp = lower.complement_in(&upper).expect("filtration steps share the ambient");
        let g = comp.len();
        // Extend lower ∪ comp to a basis of the ambient; the projection reads off
        // the comp-coordinates.
        let mut basis: Vec<Vec<Scalar>> = lower.vectors().map(<[Scalar]>::to_vec).collect();
        basis.extend(comp.iter().cloned());
        let span_so_far = Subspace::span(self.dim, &basis).unwrap();
        basis.extend(span_so_far.complement_in(&Subspace::full(self.dim)).unwrap());
        let e = Matrix::from_rows_with_cols(basis, self.dim).unwrap();
        let inv = e.inverse().expect("completed basis is invertible");
        let d = lower.dim();
        let projection = Matrix::from_fn(g, self.dim, |t, j| inv[(j, d + t)].clone());
        let lift = Matrix::from_rows_with_cols(comp, self.dim).unwrap();
        GradedPiece {
            weight: i,
            dim: g,
            lift,
            projection,
        }
    }

    /// Models `V(n)`: same space, every weight shifted by `-2n`.
    pub fn tate_twist(&self, n: i64) -> FilteredSpace {
        FilteredSpace {
            dim: self.dim,
            steps: self.steps.iter().map(|(w, s)| (w - 2 * n, s.clone())).collect(),
        }
    }

    /// Shifts every weight by `delta` (no parity constraint, unlike a twist).
    pub fn shift_weights(&self, delta: i64) -> FilteredSpace {
        FilteredSpace {
            dim: self.dim,
            steps: self.steps.iter().map(|(w, s)| (w + delta, s.clone())).collect(),
        }
    }

    /// True iff `W_k` is everything.
    pub fn weights_leq(&self, k: i64) -> bool {
        self.step_dim(k) == self.dim
    }

    /// True iff `W_{k-1}` is zero.
    pub fn weights_geq(&self, k: i64) -> bool {
        self.step_dim(k - 1) == 0
    }

    pub fn purity(&self) -> Option<PurityCertificate> {
        match self.steps.len() {
            1 => Some(PurityCertificate {
                space: self.clone(),
                weight: *self.steps.keys().next().unwrap(),
            }),
            _ => None,
        }
    }

    /// The filtration transported by an invertible change of coordinates.
    pub fn transform(&self, t: &Matrix) -> Result<FilteredSpace, FilterError> {
        let steps = self
            .steps
            .iter()
            .map(|(w, s)| Ok((*w, s.map(t)?)))
            .collect::<Result<BTreeMap<_, _>, LinalgError>>()?;
        FilteredSpace::new(t.nrows(), steps)
    }

    /// Induced filtration `W_i ∩ sub` on a subspace, in the coordinates of its
    /// canonical basis.
    pub fn restrict_to(&self, sub: &Subspace) -> Result<FilteredSpace, FilterError> {
        let d = sub.dim();
        let mut steps = BTreeMap::new();
        for (&w, s) in &self.steps {
            let meet = s.intersect(sub)?;
            let coords: Vec<Vec<Scalar>> = meet
                .vectors()
                .map(|v| sub.coordinates(v).expect("intersection lies in the subspace"))
                .collect();
            steps.insert(w, Subspace::span(d, &coords)?);
        }
        if d == 0 {
            return Ok(FilteredSpace::zero());
        }
        FilteredSpace::new(d, steps)
    }

    /// Quotient filtration along a surjection `proj: Q^dim → Q^m`.
    pub fn push_forward(&self, proj: &Matrix) -> Result<FilteredSpace, FilterError> {
        let m = proj.nrows();
        if m == 0 {
            return Ok(FilteredSpace::zero());
        }
        let steps = self
            .steps
            .iter()
            .map(|(w, s)| Ok((*w, s.map(proj)?)))
            .collect::<Result<BTreeMap<_, _>, LinalgError>>()?;
        FilteredSpace::new(m, steps)
    }
}

/// A weight-compatible linear map. `twist` is a bookkeeping tag recording that
/// the target was obtained by an `n`-fold Tate twist; the target weights are
/// already the twisted ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredMap {
    source: FilteredSpace,
    target: FilteredSpace,
    matrix: Matrix,
    twist: i64,
}

impl FilteredMap {
    pub fn new(
        source: FilteredSpace,
        target: FilteredSpace,
        matrix: Matrix,
        twist: i64,
    ) -> Result<Self, FilterError> {
        if matrix.ncols() != source.dim() {
            return Err(LinalgError::DimensionMismatch {
                context: "map columns vs source",
                left: matrix.ncols(),
                right: source.dim(),
            }
            .into());
        }
        if matrix.nrows() != target.dim() {
            return Err(LinalgError::DimensionMismatch {
                context: "map rows vs target",
                left: matrix.nrows(),
                right: target.dim(),
            }
            .into());
        }
        for (&w, s) in source.jumps() {
            let tgt = target.step(w);
            if let Some(v) = s.vectors().map(|v| matrix.apply(v)).find(|v| !tgt.contains(v)) {
                return Err(FilterError::NotCompatible { weight: w, witness: v });
            }
        }
        Ok(FilteredMap {
            source,
            target,
            matrix,
            twist,
        })
    }

    pub fn identity(space: &FilteredSpace) -> Self {
        FilteredMap {
            source: space.clone(),
            target: space.clone(),
            matrix: Matrix::identity(space.dim()),
            twist: 0,
        }
    }

    pub fn source(&self) -> &FilteredSpace {
        &self.source
    }

    pub fn target(&self) -> &FilteredSpace {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    /// First weight where `im f ∩ W_i(target) ≠ f(W_i(source))`, with a vector
    /// of the former outside the latter.
    pub fn strictness_defect(&self) -> Option<(i64, Vec<Scalar>)> {
        let im = column_space(&self.matrix);
        let mut weights: Vec<i64> = self
            .source
            .jumps()
            .keys()
            .chain(self.target.jumps().keys())
            .copied()
            .collect();
        weights.sort_unstable();
        weights.dedup();
        for w in weights {
            let hit = linalg::image(&self.matrix, &self.source.step(w)).unwrap();
            let meet = im.intersect(&self.target.step(w)).unwrap();
            if let Some(v) = meet.first_outside(&hit) {
                return Some((w, v));
            }
        }
        None
    }

    pub fn is_strict(&self) -> bool {
        self.strictness_defect().is_none()
    }
}

pub fn is_strict(f: &FilteredMap) -> bool {
    f.is_strict()
}

/// Exactness of `f` followed by `g` at their shared middle space.
pub fn check_exact_at(f: &FilteredMap, g: &FilteredMap) -> Result<Exactness, FilterError> {
    if f.target() != g.source() {
        return Err(FilterError::NotComposable);
    }
    Ok(linalg::exactness(f.matrix(), g.matrix())?)
}

/// Kernel, image and cokernel of a strict map with their induced filtrations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubQuotient {
    /// `W_i(ker) = ker ∩ W_i(source)`, in coordinates of `kernel_basis`.
    pub kernel: FilteredSpace,
    pub kernel_basis: Subspace,
    /// `W_i(im) = im ∩ W_i(target)`, in coordinates of `image_basis`.
    pub image: FilteredSpace,
    pub image_basis: Subspace,
    /// Quotient filtration on `target / im`, via `cokernel_projection`.
    pub cokernel: FilteredSpace,
    pub cokernel_projection: Matrix,
}

pub fn induced_on_sub_quotient(f: &FilteredMap) -> Result<SubQuotient, FilterError> {
    if let Some((weight, witness)) = f.strictness_defect() {
        return Err(FilterError::NotStrict { weight, witness });
    }
    let kernel_basis = kernel(f.matrix());
    let image_basis = column_space(f.matrix());
    let cokernel_projection = image_basis.annihilator();
    Ok(SubQuotient {
        kernel: f.source().restrict_to(&kernel_basis)?,
        image: f.target().restrict_to(&image_basis)?,
        cokernel: f.target().push_forward(&cokernel_projection)?,
        kernel_basis,
        image_basis,
        cokernel_projection,
    })
}
