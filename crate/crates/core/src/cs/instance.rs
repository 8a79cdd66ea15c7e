//! The data of a Clemens–Schmid situation: four families of filtered spaces
//! indexed by degree, joined by a column and a row long exact sequence.
//!
//! ```text
//! column:  … → B_k --b_k--> A_k --a_k--> C_k --c_k--> B_{k+1} → …
//! row:     … → P_{k-1}(-1) --r_k--> C_k --s_k--> P_k --N_k--> P_k(-1) --r_{k+1}--> C_{k+1} → …
//! ```
//!
//! `A` models special-fiber cohomology, `B` cohomology supported on the special
//! fiber, `C` the punctured-neighbourhood term and `P` nearby cycles. Every
//! family vanishes outside `range`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtered::FilteredSpace;
use crate::linalg::Matrix;
use crate::monodromy::nilpotency_order;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsError {
    #[error("empty degree range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("expected {expected} degree records, found {found}")]
    DegreeCount { expected: usize, found: usize },
    #[error("{map}_{degree} has shape {found_rows}x{found_cols}, expected {rows}x{cols}")]
    Shape {
        map: &'static str,
        degree: i64,
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("{family}_{degree} lies outside the degree range")]
    OutOfRange { family: &'static str, degree: i64 },
    #[error("N_{0} is not nilpotent")]
    NotNilpotent(i64),
}

/// Inclusive range of cohomological degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct DegreeRange {
    pub lo: i64,
    pub hi: i64,
}

impl From<[i64; 2]> for DegreeRange {
    fn from([lo, hi]: [i64; 2]) -> Self {
        DegreeRange { lo, hi }
    }
}

impl From<DegreeRange> for [i64; 2] {
    fn from(r: DegreeRange) -> Self {
        [r.lo, r.hi]
    }
}

impl DegreeRange {
    pub fn new(lo: i64, hi: i64) -> Result<Self, CsError> {
        if lo > hi {
            return Err(CsError::EmptyRange { lo, hi });
        }
        Ok(DegreeRange { lo, hi })
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for DegreeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Whether the nodes are abstract or stand for the geometric cohomology
/// groups `H^k(X_0)`, `H^k_{X_0}(X)`, `H^k(X_∞)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Abstract,
    Geometric,
}

/// A matrix with its Tate-twist bookkeeping tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedMatrix {
    pub matrix: Matrix,
    #[serde(default)]
    pub twist: i64,
}

impl TwistedMatrix {
    pub fn new(matrix: Matrix, twist: i64) -> Self {
        TwistedMatrix { matrix, twist }
    }

    pub fn plain(matrix: Matrix) -> Self {
        TwistedMatrix { matrix, twist: 0 }
    }
}

/// Everything attached to one degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeData {
    pub a: FilteredSpace,
    pub b: FilteredSpace,
    pub c: FilteredSpace,
    pub p: FilteredSpace,
    /// `N_k: P_k → P_k(-1)`.
    pub n: TwistedMatrix,
    /// `b_k: B_k → A_k`.
    pub col_b: TwistedMatrix,
    /// `a_k: A_k → C_k`.
    pub col_a: TwistedMatrix,
    /// `c_k: C_k → B_{k+1}`.
    pub col_c: TwistedMatrix,
    /// `r_k: P_{k-1}(-1) → C_k`.
    pub row_r: TwistedMatrix,
    /// `s_k: C_k → P_k`.
    pub row_s: TwistedMatrix,
}

/// Node families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    P,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct CsInstance {
    range: DegreeRange,
    profile: Profile,
    purity: i64,
    degrees: Vec<DegreeData>,
}

static ZERO_SPACE: FilteredSpace = FilteredSpace::ZERO;

impl CsInstance {
    /// `degrees[i]` holds degree `range.lo + i`. Shapes are checked against the
    /// neighbouring spaces; `c` at the top degree must have zero rows and `r`
    /// at the bottom degree zero columns.
    pub fn new(
        range: DegreeRange,
        profile: Profile,
        purity: i64,
        degrees: Vec<DegreeData>,
    ) -> Result<Self, CsError> {
        if range.is_empty() {
            return Err(CsError::EmptyRange {
                lo: range.lo,
                hi: range.hi,
            });
        }
        if degrees.len() != range.len() {
            return Err(CsError::DegreeCount {
                expected: range.len(),
                found: degrees.len(),
            });
        }
        let inst = CsInstance {
            range,
            profile,
            purity,
            degrees,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), CsError> {
        for k in self.range.iter() {
            let d = self.data(k).unwrap();
            let dim = |f: Family, j: i64| self.space(f, j).dim();
            let checks: [(&'static str, &Matrix, usize, usize); 6] = [
                ("N", &d.n.matrix, dim(Family::P, k), dim(Family::P, k)),
                ("b", &d.col_b.matrix, dim(Family::A, k), dim(Family::B, k)),
                ("a", &d.col_a.matrix, dim(Family::C, k), dim(Family::A, k)),
                ("c", &d.col_c.matrix, dim(Family::B, k + 1), dim(Family::C, k)),
                ("r", &d.row_r.matrix, dim(Family::C, k), dim(Family::P, k - 1)),
                ("s", &d.row_s.matrix, dim(Family::P, k), dim(Family::C, k)),
            ];
            for (map, m, rows, cols) in checks {
                if m.nrows() != rows || m.ncols() != cols {
                    return Err(CsError::Shape {
                        map,
                        degree: k,
                        rows,
                        cols,
                        found_rows: m.nrows(),
                        found_cols: m.ncols(),
                    });
                }
            }
            if nilpotency_order(&d.n.matrix).is_none() {
                return Err(CsError::NotNilpotent(k));
            }
        }
        Ok(())
    }

    pub fn range(&self) -> DegreeRange {
        self.range
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn purity(&self) -> i64 {
        self.purity
    }

    pub fn degrees(&self) -> &[DegreeData] {
        &self.degrees
    }

    pub fn data(&self, k: i64) -> Option<&DegreeData> {
        if self.range.contains(k) {
            Some(&self.degrees[(k - self.range.lo) as usize])
        } else {
            None
        }
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    /// The node `family_k`; the zero space outside the range.
    pub fn space(&self, family: Family, k: i64) -> &FilteredSpace {
        match self.data(k) {
            None => &ZERO_SPACE,
            Some(d) => match family {
                Family::A => &d.a,
                Family::B => &d.b,
                Family::C => &d.c,
                Family::P => &d.p,
            },
        }
    }

    /// `P_k(-1)`.
    pub fn p_twisted(&self, k: i64) -> FilteredSpace {
        self.space(Family::P, k).tate_twist(-1)
    }

    fn map_or_zero(&self, k: i64, pick: impl Fn(&DegreeData) -> &Matrix, rows: usize, cols: usize) -> Matrix {
        self.data(k).map_or_else(|| Matrix::zeros(rows, cols), |d| pick(d).clone())
    }

    /// `N_k: P_k → P_k(-1)`.
    pub fn n(&self, k: i64) -> Matrix {
        let d = self.space(Family::P, k).dim();
        self.map_or_zero(k, |x| &x.n.matrix, d, d)
    }

    /// `b_k: B_k → A_k`.
    pub fn b(&self, k: i64) -> Matrix {
        let (r, c) = (self.space(Family::A, k).dim(), self.space(Family::B, k).dim());
        self.map_or_zero(k, |x| &x.col_b.matrix, r, c)
    }

    /// `a_k: A_k → C_k`.
    pub fn a(&self, k: i64) -> Matrix {
        let (r, c) = (self.space(Family::C, k).dim(), self.space(Family::A, k).dim());
        self.map_or_zero(k, |x| &x.col_a.matrix, r, c)
    }

    /// `c_k: C_k → B_{k+1}`.
    pub fn c(&self, k: i64) -> Matrix {
        let (r, c) = (self.space(Family::B, k + 1).dim(), self.space(Family::C, k).dim());
        self.map_or_zero(k, |x| &x.col_c.matrix, r, c)
    }

    /// `r_k: P_{k-1}(-1) → C_k`.
    pub fn r(&self, k: i64) -> Matrix {
        let (r, c) = (self.space(Family::C, k).dim(), self.space(Family::P, k - 1).dim());
        self.map_or_zero(k, |x| &x.row_r.matrix, r, c)
    }

    /// `s_k: C_k → P_k`.
    pub fn s(&self, k: i64) -> Matrix {
        let (r, c) = (self.space(Family::P, k).dim(), self.space(Family::C, k).dim());
        self.map_or_zero(k, |x| &x.row_s.matrix, r, c)
    }

    /// `A_k → P_k`, the composite `s_k ∘ a_k`.
    pub fn a_to_p(&self, k: i64) -> Matrix {
        &self.s(k) * &self.a(k)
    }

    /// `P_k(-1) → B_{k+2}`, the composite `c_{k+1} ∘ r_{k+1}`.
    pub fn p_to_b(&self, k: i64) -> Matrix {
        &self.c(k + 1) * &self.r(k + 1)
    }

    /// Largest node dimension.
    pub fn max_node_dim(&self) -> usize {
        self.degrees
            .iter()
            .flat_map(|d| [d.a.dim(), d.b.dim(), d.c.dim(), d.p.dim()])
            .max()
            .unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawColumn {
    #[serde(default)]
    b: BTreeMap<i64, TwistedMatrix>,
    #[serde(default)]
    a: BTreeMap<i64, TwistedMatrix>,
    #[serde(default)]
    c: BTreeMap<i64, TwistedMatrix>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRow {
    #[serde(default)]
    r: BTreeMap<i64, TwistedMatrix>,
    #[serde(default)]
    s: BTreeMap<i64, TwistedMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    range: DegreeRange,
    #[serde(default)]
    profile: Profile,
    #[serde(rename = "A", default)]
    a: BTreeMap<i64, FilteredSpace>,
    #[serde(rename = "B", default)]
    b: BTreeMap<i64, FilteredSpace>,
    #[serde(rename = "C", default)]
    c: BTreeMap<i64, FilteredSpace>,
    #[serde(rename = "P", default)]
    p: BTreeMap<i64, FilteredSpace>,
    #[serde(rename = "N", default)]
    n: BTreeMap<i64, TwistedMatrix>,
    #[serde(default)]
    col: RawColumn,
    #[serde(default)]
    row: RawRow,
    #[serde(default)]
    purity: i64,
}

impl TryFrom<RawInstance> for CsInstance {
    type Error = CsError;

    fn try_from(mut raw: RawInstance) -> Result<Self, CsError> {
        let range = DegreeRange::new(raw.range.lo, raw.range.hi)?;
        let families: [(&'static str, &BTreeMap<i64, FilteredSpace>); 4] =
            [("A", &raw.a), ("B", &raw.b), ("C", &raw.c), ("P", &raw.p)];
        for (family, m) in families {
            if let Some(&degree) = m.keys().find(|k| !range.contains(**k)) {
                return Err(CsError::OutOfRange { family, degree });
            }
        }
        let maps: [(&'static str, &BTreeMap<i64, TwistedMatrix>); 6] = [
            ("N", &raw.n),
            ("b", &raw.col.b),
            ("a", &raw.col.a),
            ("c", &raw.col.c),
            ("r", &raw.row.r),
            ("s", &raw.row.s),
        ];
        for (family, m) in maps {
            if let Some(&degree) = m.keys().find(|k| !range.contains(**k)) {
                return Err(CsError::OutOfRange { family, degree });
            }
        }
        let dim = |m: &BTreeMap<i64, FilteredSpace>, k: i64| m.get(&k).map_or(0, FilteredSpace::dim);
        let take = |m: &mut BTreeMap<i64, TwistedMatrix>,
                    name: &'static str,
                    k: i64,
                    rows: usize,
                    cols: usize|
         -> Result<TwistedMatrix, CsError> {
            match m.remove(&k) {
                None => Ok(TwistedMatrix::plain(Matrix::zeros(rows, cols))),
                Some(t) => {
                    let (fr, fc) = (t.matrix.nrows(), t.matrix.ncols());
                    let matrix = t.matrix.conform(rows, cols).map_err(|_| CsError::Shape {
                        map: name,
                        degree: k,
                        rows,
                        cols,
                        found_rows: fr,
                        found_cols: fc,
                    })?;
                    Ok(TwistedMatrix::new(matrix, t.twist))
                }
            }
        };
        let mut degrees = Vec::with_capacity(range.len());
        for k in range.iter() {
            let (da, db, dc, dp) = (dim(&raw.a, k), dim(&raw.b, k), dim(&raw.c, k), dim(&raw.p, k));
            let db_next = if k < range.hi { dim(&raw.b, k + 1) } else { 0 };
            let dp_prev = if k > range.lo { dim(&raw.p, k - 1) } else { 0 };
            let n = take(&mut raw.n, "N", k, dp, dp)?;
            let col_b = take(&mut raw.col.b, "b", k, da, db)?;
            let col_a = take(&mut raw.col.a, "a", k, dc, da)?;
            let col_c = take(&mut raw.col.c, "c", k, db_next, dc)?;
            let row_r = take(&mut raw.row.r, "r", k, dc, dp_prev)?;
            let row_s = take(&mut raw.row.s, "s", k, dp, dc)?;
            degrees.push(DegreeData {
                a: raw.a.remove(&k).unwrap_or_else(FilteredSpace::zero),
                b: raw.b.get(&k).cloned().unwrap_or_else(FilteredSpace::zero),
                c: raw.c.remove(&k).unwrap_or_else(FilteredSpace::zero),
                p: raw.p.get(&k).cloned().unwrap_or_else(FilteredSpace::zero),
                n,
                col_b,
                col_a,
                col_c,
                row_r,
                row_s,
            });
        }
        CsInstance::new(range, raw.profile, raw.purity, degrees)
    }
}

impl From<CsInstance> for RawInstance {
    fn from(inst: CsInstance) -> Self {
        let mut raw = RawInstance {
            range: inst.range,
            profile: inst.profile,
            a: BTreeMap::new(),
            b: BTreeMap::new(),
            c: BTreeMap::new(),
            p: BTreeMap::new(),
            n: BTreeMap::new(),
            col: RawColumn::default(),
            row: RawRow::default(),
            purity: inst.purity,
        };
        for (k, d) in inst.range.iter().zip(inst.degrees) {
            raw.a.insert(k, d.a);
            raw.b.insert(k, d.b);
            raw.c.insert(k, d.c);
            raw.p.insert(k, d.p);
            raw.n.insert(k, d.n);
            raw.col.b.insert(k, d.col_b);
            raw.col.a.insert(k, d.col_a);
            raw.col.c.insert(k, d.col_c);
            raw.row.r.insert(k, d.row_r);
            raw.row.s.insert(k, d.row_s);
        }
        raw
    }
}

impl CsInstance {
    /// The all-zero instance on a range.
    pub fn zero(range: DegreeRange) -> Self {
        let degrees = range
            .iter()
            .map(|_| DegreeData {
                a: FilteredSpace::zero(),
                b: FilteredSpace::zero(),
                c: FilteredSpace::zero(),
                p: FilteredSpace::zero(),
                n: TwistedMatrix::new(Matrix::zeros(0, 0), -1),
                col_b: TwistedMatrix::plain(Matrix::zeros(0, 0)),
                col_a: TwistedMatrix::plain(Matrix::zeros(0, 0)),
                col_c: TwistedMatrix::plain(Matrix::zeros(0, 0)),
                row_r: TwistedMatrix::plain(Matrix::zeros(0, 0)),
                row_s: TwistedMatrix::plain(Matrix::zeros(0, 0)),
            })
            .collect();
        CsInstance {
            range,
            profile: Profile::Abstract,
            purity: 0,
            degrees,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialises")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_instance_round_trips() {
        let z = CsInstance::zero(DegreeRange::new(-1, 2).unwrap());
        let back = CsInstance::from_json(&z.to_json()).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn sparse_json_fills_zeros() {
        let s = r#"{"range":[0,1],"A":{"0":{"dim":1,"steps":{"0":[["1"]]}}},
                    "C":{"0":{"dim":1,"steps":{"0":[["1"]]}}},
                    "col":{"a":{"0":{"matrix":[["1"]]}}}}"#;
        let inst = CsInstance::from_json(s).unwrap();
        assert_eq!(inst.space(Family::A, 0).dim(), 1);
        assert_eq!(inst.space(Family::B, 1).dim(), 0);
        assert_eq!(inst.c(0), Matrix::zeros(0, 1));
        assert_eq!(inst.a(0), Matrix::identity(1));
        assert_eq!(inst.purity(), 0);
    }

    #[test]
    fn malformed_json_is_rejected() {
        let bad_shape = r#"{"range":[0,0],"A":{"0":{"dim":1,"steps":{"0":[["1"]]}}},
                           "col":{"a":{"0":{"matrix":[["1"]]}}}}"#;
        assert!(CsInstance::from_json(bad_shape).is_err());
        let out_of_range = r#"{"range":[0,0],"A":{"3":{"dim":0,"steps":{}}}}"#;
        assert!(CsInstance::from_json(out_of_range).is_err());
        let empty = r#"{"range":[2,1]}"#;
        assert!(CsInstance::from_json(empty).is_err());
        let not_nilpotent = r#"{"range":[0,0],"P":{"0":{"dim":1,"steps":{"0":[["1"]]}}},
                              "N":{"0":{"matrix":[["1"]]}}}"#;
        assert!(CsInstance::from_json(not_nilpotent).is_err());
        let unknown = r#"{"range":[0,0],"Q":{}}"#;
        assert!(CsInstance::from_json(unknown).is_err());
    }
}
