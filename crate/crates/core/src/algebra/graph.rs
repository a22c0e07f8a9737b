use std::collections::BTreeSet;

use super::family::UnitaryFamily;
use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// A PI (sub)algebra basis: the base vectors `|m⟩⟨n| ⊗ U_mn` for every edge
/// `(m, n)` of the graph. Loops are always present.
#[derive(Clone, Debug)]
pub struct AlgebraGraph {
    family: UnitaryFamily,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub closed: bool,
    /// Compositions `(a, d)` of present edges `(a, b)`, `(b, d)` that are absent.
    pub missing_edges: Vec<(usize, usize)>,
    pub self_adjoint: bool,
}

impl AlgebraGraph {
    pub fn new(family: UnitaryFamily, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let d_a = family.d_a();
        let mut set: BTreeSet<(usize, usize)> = (0..d_a).map(|m| (m, m)).collect();
        for (m, n) in edges {
            family.check_index("edge source", m)?;
            family.check_index("edge target", n)?;
            set.insert((m, n));
        }
        Ok(Self { family, edges: set })
    }

    /// All `d_A²` edges: the full PI matrix algebra.
    pub fn full(family: UnitaryFamily) -> Self {
        let d_a = family.d_a();
        let edges = (0..d_a).flat_map(|m| (0..d_a).map(move |n| (m, n))).collect();
        Self { family, edges }
    }

    /// Smallest closed, self-adjoint graph containing `edges`.
    pub fn generated(family: UnitaryFamily, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(family, edges)?;
        let reversed: Vec<_> = g.edges.iter().map(|&(m, n)| (n, m)).collect();
        g.edges.extend(reversed);
        g.edges = compose_to_fixed_point(g.edges);
        Ok(g)
    }

    pub fn family(&self) -> &UnitaryFamily {
        &self.family
    }

    pub fn d_a(&self) -> usize {
        self.family.d_a()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn contains(&self, m: usize, n: usize) -> bool {
        self.edges.contains(&(m, n))
    }

    pub fn closure_check(&self) -> ClosureReport {
        let mut missing = BTreeSet::new();
        for &(a, b) in &self.edges {
            for &(b2, d) in self.edges.range((b, 0)..=(b, usize::MAX)) {
                debug_assert_eq!(b, b2);
                if !self.edges.contains(&(a, d)) {
                    missing.insert((a, d));
                }
            }
        }
        let self_adjoint = self.edges.iter().all(|&(m, n)| self.edges.contains(&(n, m)));
        ClosureReport {
            closed: missing.is_empty(),
            missing_edges: missing.into_iter().collect(),
            self_adjoint,
        }
    }

    /// Composition closure of the edge set, without adding reverse edges.
    pub fn closure(&self) -> Self {
        Self {
            family: self.family.clone(),
            edges: compose_to_fixed_point(self.edges.clone()),
        }
    }

    /// Minimal superset closed under both reversal and composition. The
    /// input must already be closed.
    pub fn self_adjoint_extension(&self) -> Result<Self> {
        let report = self.closure_check();
        if !report.closed {
            return Err(Error::NotClosed(report.missing_edges));
        }
        let mut edges = self.edges.clone();
        loop {
            let before = edges.len();
            let reversed: Vec<_> = edges.iter().map(|&(m, n)| (n, m)).collect();
            edges.extend(reversed);
            edges = compose_to_fixed_point(edges);
            if edges.len() == before {
                break;
            }
        }
        let out = Self {
            family: self.family.clone(),
            edges,
        };
        let check = out.closure_check();
        assert!(check.closed && check.self_adjoint, "self-adjoint extension failed to close");
        Ok(out)
    }

    /// Dense base vector `|m⟩⟨n| ⊗ U_mn`.
    pub fn base_vector(&self, m: usize, n: usize) -> Result<CMatrix> {
        if !self.contains(m, n) {
            return Err(Error::MissingEdge(m, n));
        }
        Ok(base_vector(&self.family, m, n))
    }

    /// Product of base vectors along a chained path of edges.
    pub fn path_product(&self, path: &[(usize, usize)]) -> Result<CMatrix> {
        let mut iter = path.iter().enumerate();
        let Some((_, &(m0, n0))) = iter.next() else {
            return Err(Error::InvalidParameter("empty path".into()));
        };
        let mut acc = self.base_vector(m0, n0)?;
        let mut col = n0;
        for (step, &(m, n)) in iter {
            if m != col {
                return Err(Error::BrokenPath(step));
            }
            acc = acc.matmul(&self.base_vector(m, n)?);
            col = n;
        }
        Ok(acc)
    }
}

fn base_vector(family: &UnitaryFamily, m: usize, n: usize) -> CMatrix {
    CMatrix::unit(family.d_a(), m, n).kron(&family.edge(m, n))
}

fn compose_to_fixed_point(mut edges: BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    loop {
        let mut added = Vec::new();
        for &(a, b) in &edges {
            for &(_, d) in edges.range((b, 0)..=(b, usize::MAX)) {
                if !edges.contains(&(a, d)) {
                    added.push((a, d));
                }
            }
        }
        if added.is_empty() {
            return edges;
        }
        edges.extend(added);
    }
}
