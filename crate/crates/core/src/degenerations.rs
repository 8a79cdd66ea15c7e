//! Fixtures from totally degenerate curve fibres.
//!
//! A semistable fibre whose components are all rational is recorded by its
//! dual graph: one vertex per component, one edge per node. Every number in
//! the resulting instance comes from graph combinatorics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cs::{
    check_instance_hypotheses, CsInstance, DegreeData, DegreeRange, Profile, TwistedMatrix,
};
use crate::filtered::FilteredSpace;
use crate::linalg::{int, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("edge {edge} mentions vertex {vertex}, but there are only {vertices}")]
    EdgeOutOfRange { edge: usize, vertex: usize, vertices: usize },
    #[error("expected {expected} self-intersections, found {found}")]
    SelfLength { expected: usize, found: usize },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("fixture fails its hypotheses: {0}")]
    Inconsistent(String),
}

/// Dual graph of a degenerate fibre. Loops and multiple edges are allowed.
/// `self_intersections` defaults to minus the degree, a loop counting twice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualGraph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(rename = "self", default, skip_serializing_if = "Option::is_none")]
    pub self_intersections: Option<Vec<i64>>,
}

impl DualGraph {
    pub fn new(vertices: usize, edges: Vec<[usize; 2]>) -> Self {
        DualGraph {
            vertices,
            edges,
            self_intersections: None,
        }
    }

    /// The `I_n` fibre: an `n`-cycle, a single loop for `n = 1`.
    pub fn cycle(n: usize) -> Self {
        DualGraph::new(n, (0..n).map(|i| [i, (i + 1) % n]).collect())
    }

    /// Two vertices joined by three edges.
    pub fn theta() -> Self {
        DualGraph::new(2, vec![[0, 1]; 3])
    }

    /// A chain of `n` components; a tree, so `b1 = 0`.
    pub fn path(n: usize) -> Self {
        DualGraph::new(n, (1..n).map(|i| [i - 1, i]).collect())
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.vertices == 0 {
            return Err(GraphError::NoVertices);
        }
        for (edge, e) in self.edges.iter().enumerate() {
            if let Some(&vertex) = e.iter().find(|&&x| x >= self.vertices) {
                return Err(GraphError::EdgeOutOfRange {
                    edge,
                    vertex,
                    vertices: self.vertices,
                });
            }
        }
        if let Some(s) = &self.self_intersections {
            if s.len() != self.vertices {
                return Err(GraphError::SelfLength {
                    expected: self.vertices,
                    found: s.len(),
                });
            }
        }
        Ok(())
    }

    fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut count = self.vertices;
        for &[i, j] in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| e.iter().filter(|&&x| x == v).count()).sum()
    }
}

/// `(b0, b1)` of a connected graph, `b1 = e - v + 1`.
pub fn betti(g: &DualGraph) -> Result<(usize, usize), GraphError> {
    g.validate()?;
    let components = g.components();
    if components != 1 {
        return Err(GraphError::Disconnected { components });
    }
    Ok((1, g.edges.len() + 1 - g.vertices))
}

/// Off the diagonal, the number of edges between two components; on it, the
/// self-intersection plus twice the number of loops.
pub fn intersection_matrix(g: &DualGraph) -> Matrix {
    let v = g.vertices;
    let mut m = Matrix::zeros(v, v);
    for &[i, j] in &g.edges {
        if i == j {
            m[(i, i)] += int(2);
        } else {
            m[(i, j)] += int(1);
            m[(j, i)] += int(1);
        }
    }
    for i in 0..v {
        let s = g
            .self_intersections
            .as_ref()
            .map_or(-(g.degree(i) as i64), |s| s[i]);
        m[(i, i)] += int(s);
    }
    m
}

/// `Q^n` with the standard basis vector `e_i` of weight `weights[i]`.
fn weighted(weights: &[i64]) -> FilteredSpace {
    let n = weights.len();
    let basis: Vec<_> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (w, (0..n).map(|j| int((i == j) as i64)).collect()))
        .collect();
    FilteredSpace::from_weighted_basis(n, &basis).expect("standard basis")
}

fn plain(m: Matrix) -> TwistedMatrix {
    TwistedMatrix::plain(m)
}

/// The Clemens–Schmid instance of the fibre on degrees `0..=4`.
pub fn curve_cs_instance(g: &DualGraph) -> Result<CsInstance, GraphError> {
    let (_, b1) = betti(g)?;
    let v = g.vertices;
    let one = || int(1);

    let a = [
        FilteredSpace::pure(1, 0),
        FilteredSpace::pure(b1, 0),
        FilteredSpace::pure(v, 2),
        FilteredSpace::zero(),
        FilteredSpace::zero(),
    ];
    let b = [
        FilteredSpace::zero(),
        FilteredSpace::zero(),
        FilteredSpace::pure(v, 2),
        FilteredSpace::pure(b1, 4),
        FilteredSpace::pure(1, 4),
    ];
    // P_1: coordinates 0..b1 have weight 0, b1..2b1 weight 2; N pairs them.
    let p1 = weighted(&[vec![0; b1], vec![2; b1]].concat());
    let p = [
        FilteredSpace::pure(1, 0),
        p1,
        FilteredSpace::pure(1, 2),
        FilteredSpace::zero(),
        FilteredSpace::zero(),
    ];
    let mut n1 = Matrix::zeros(2 * b1, 2 * b1);
    for i in 0..b1 {
        n1[(i, b1 + i)] = one();
    }
    // C_k = coker N_{k-1} ⊕ ker N_k, cokernel coordinates first.
    let c1 = weighted(&[vec![2], vec![0; b1]].concat());
    let c2 = weighted(&[vec![4; b1], vec![2]].concat());
    let c = [
        FilteredSpace::pure(1, 0),
        c1,
        c2,
        FilteredSpace::pure(1, 4),
        FilteredSpace::zero(),
    ];

    let zero_map = |rows: usize, cols: usize| Matrix::zeros(rows, cols);

    let mut a1 = zero_map(1 + b1, b1);
    let mut s1 = zero_map(2 * b1, 1 + b1);
    for j in 0..b1 {
        a1[(1 + j, j)] = one();
        s1[(j, 1 + j)] = one();
    }
    let mut r1 = zero_map(1 + b1, 1);
    r1[(0, 0)] = one();
    let c1_map = Matrix::from_fn(v, 1 + b1, |_, j| int((j == 0) as i64));
    let a2 = Matrix::from_fn(b1 + 1, v, |i, _| int((i == b1) as i64));
    let mut r2 = zero_map(b1 + 1, 2 * b1);
    let mut c2_map = zero_map(b1, b1 + 1);
    for i in 0..b1 {
        r2[(i, b1 + i)] = one();
        c2_map[(i, i)] = one();
    }
    let s2 = Matrix::from_fn(1, b1 + 1, |_, j| int((j == b1) as i64));

    let n = [
        zero_map(1, 1),
        n1,
        zero_map(1, 1),
        zero_map(0, 0),
        zero_map(0, 0),
    ];
    let col_b = [
        zero_map(1, 0),
        zero_map(b1, 0),
        intersection_matrix(g),
        zero_map(0, b1),
        zero_map(0, 1),
    ];
    let col_a = [Matrix::identity(1), a1, a2, zero_map(1, 0), zero_map(0, 0)];
    let col_c = [
        zero_map(0, 1),
        c1_map,
        c2_map,
        Matrix::identity(1),
        zero_map(0, 0),
    ];
    let row_r = [zero_map(1, 0), r1, r2, Matrix::identity(1), zero_map(0, 0)];
    let row_s = [
        Matrix::identity(1),
        s1,
        s2,
        zero_map(0, 1),
        zero_map(0, 0),
    ];

    let degrees = (0..5)
        .map(|k| DegreeData {
            a: a[k].clone(),
            b: b[k].clone(),
            c: c[k].clone(),
            p: p[k].clone(),
            n: TwistedMatrix::new(n[k].clone(), -1),
            col_b: plain(col_b[k].clone()),
            col_a: plain(col_a[k].clone()),
            col_c: plain(col_c[k].clone()),
            row_r: plain(row_r[k].clone()),
            row_s: plain(row_s[k].clone()),
        })
        .collect();
    let inst = CsInstance::new(DegreeRange { lo: 0, hi: 4 }, Profile::Geometric, 0, degrees)
        .map_err(|e| GraphError::Inconsistent(e.to_string()))?;
    let report = check_instance_hypotheses(&inst);
    if let Some(at) = report.first_failure() {
        return Err(GraphError::Inconsistent(at));
    }
    Ok(inst)
}
