//! Hypergraph instances, incidence queries and feasibility predicates.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An immutable hypergraph on vertices `0..num_vertices`.
///
/// Edges are kept as sorted vertex lists in input order; the edge index is the
/// canonical order used for every tie-break in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidInstance(
                "num_vertices must be positive".into(),
            ));
        }
        let mut sorted_edges = Vec::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); num_vertices];
        for (idx, mut edge) in edges.into_iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::InvalidInstance(format!("edge {idx} is empty")));
            }
            edge.sort_unstable();
            if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!(
                    "edge {idx} repeats vertex {}",
                    w[0]
                )));
            }
            if let Some(&v) = edge.last().filter(|&&v| v >= num_vertices) {
                return Err(Error::InvalidInstance(format!(
                    "edge {idx} uses vertex {v} but num_vertices = {num_vertices}"
                )));
            }
            for &v in &edge {
                incidence[v].push(idx);
            }
            sorted_edges.push(edge);
        }
        Ok(Self {
            num_vertices,
            edges: sorted_edges,
            incidence,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<&[usize]> {
        self.check_edge(e)?;
        Ok(&self.edges[e])
    }

    pub fn edge_size(&self, e: usize) -> Result<usize> {
        self.edge(e).map(<[usize]>::len)
    }

    /// `N(e)`: every other edge sharing at least one vertex with `e`, ascending.
    pub fn neighborhood(&self, e: usize) -> Result<Vec<usize>> {
        self.check_edge(e)?;
        let mut out: Vec<usize> = self.edges[e]
            .iter()
            .flat_map(|&v| self.incidence[v].iter().copied())
            .filter(|&f| f != e)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// `δ(v)`: edges containing `v`, ascending.
    pub fn incident_edges(&self, v: usize) -> Result<&[usize]> {
        if v >= self.num_vertices {
            return Err(Error::IndexOutOfRange {
                kind: "vertex",
                index: v,
                len: self.num_vertices,
            });
        }
        Ok(&self.incidence[v])
    }

    pub(crate) fn check_edge(&self, e: usize) -> Result<()> {
        if e >= self.edges.len() {
            return Err(Error::IndexOutOfRange {
                kind: "edge",
                index: e,
                len: self.edges.len(),
            });
        }
        Ok(())
    }
}

/// Nonnegative rational weight per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeights(Vec<Rational>);

impl EdgeWeights {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some((index, value)) = values.iter().enumerate().find(|(_, w)| w.is_negative()) {
            return Err(Error::NegativeWeight {
                index,
                value: value.clone(),
            });
        }
        Ok(Self(values))
    }

    pub fn unit(num_edges: usize) -> Self {
        Self(vec![Rational::one(); num_edges])
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for EdgeWeights {
    type Output = Rational;
    fn index(&self, e: usize) -> &Rational {
        &self.0[e]
    }
}

/// Vertex capacities `b(v) ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCapacities(Vec<u32>);

impl VertexCapacities {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if let Some(v) = values.iter().position(|&b| b == 0) {
            return Err(Error::InvalidInstance(format!(
                "capacity of vertex {v} is 0"
            )));
        }
        Ok(Self(values))
    }

    pub fn unit(num_vertices: usize) -> Self {
        Self(vec![1; num_vertices])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First vertex with `b(v) != 1`, if any.
    pub fn first_non_unit(&self) -> Option<(usize, u32)> {
        self.0.iter().copied().enumerate().find(|&(_, b)| b != 1)
    }
}

impl std::ops::Index<usize> for VertexCapacities {
    type Output = u32;
    fn index(&self, v: usize) -> &u32 {
        &self.0[v]
    }
}

/// A point `x ∈ [0,1]^E`. Capacity feasibility is checked separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalPoint(Vec<Rational>);

impl FractionalPoint {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some((index, value)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !rational::in_unit_interval(x))
        {
            return Err(Error::OutOfUnitInterval {
                what: "x",
                index,
                value: value.clone(),
            });
        }
        Ok(Self(values))
    }

    pub fn zeros(num_edges: usize) -> Self {
        Self(vec![Rational::zero(); num_edges])
    }

    pub fn uniform(num_edges: usize, value: Rational) -> Result<Self> {
        Self::new(vec![value; num_edges])
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `supp(x)`: indices with `x(e) > 0`.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_positive())
            .map(|(e, _)| e)
            .collect()
    }

    /// `x(F)` for a set of edge indices.
    pub fn sum_over(&self, edges: &[usize]) -> Rational {
        edges
            .iter()
            .fold(Rational::zero(), |acc, &e| acc + &self.0[e])
    }
}

impl std::ops::Index<usize> for FractionalPoint {
    type Output = Rational;
    fn index(&self, e: usize) -> &Rational {
        &self.0[e]
    }
}

/// A set of edge indices, sorted ascending, that respects some capacities.
///
/// Ordering is lexicographic on the sorted index list, so `∅` is the smallest.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BMatching(Vec<usize>);

impl BMatching {
    /// Builds and validates a b-matching against `h` and `b`.
    pub fn new(h: &Hypergraph, b: &VertexCapacities, edges: Vec<usize>) -> Result<Self> {
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        check_b_matching(h, b, &edges)?;
        Ok(Self(edges))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub(crate) fn from_sorted_unchecked(edges: Vec<usize>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Self(edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self, w: &EdgeWeights) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, &e| acc + &w[e])
    }
}

fn check_dims(h: &Hypergraph, b: &VertexCapacities) -> Result<()> {
    if b.len() != h.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "capacities",
            expected: h.num_vertices(),
            found: b.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_point_dims(h: &Hypergraph, x: &FractionalPoint) -> Result<()> {
    if x.len() != h.num_edges() {
        return Err(Error::DimensionMismatch {
            what: "fractional point",
            expected: h.num_edges(),
            found: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_weight_dims(h: &Hypergraph, w: &EdgeWeights) -> Result<()> {
    if w.len() != h.num_edges() {
        return Err(Error::DimensionMismatch {
            what: "weights",
            expected: h.num_edges(),
            found: w.len(),
        });
    }
    Ok(())
}

/// `x(δ(v))` for every vertex.
pub fn vertex_loads(h: &Hypergraph, x: &FractionalPoint) -> Result<Vec<Rational>> {
    check_point_dims(h, x)?;
    let mut loads = vec![Rational::zero(); h.num_vertices()];
    for (edge, xe) in h.edges().iter().zip(x.as_slice()) {
        for &v in edge {
            loads[v] += xe;
        }
    }
    Ok(loads)
}

/// Like [`is_fractional_b_matching`] but reports the first violated vertex.
pub fn check_fractional_b_matching(
    h: &Hypergraph,
    b: &VertexCapacities,
    x: &FractionalPoint,
) -> Result<()> {
    check_dims(h, b)?;
    let loads = vertex_loads(h, x)?;
    if let Some((index, value)) = x
        .as_slice()
        .iter()
        .enumerate()
        .find(|(_, xe)| !rational::in_unit_interval(xe))
    {
        return Err(Error::OutOfUnitInterval {
            what: "x",
            index,
            value: value.clone(),
        });
    }
    for (vertex, load) in loads.into_iter().enumerate() {
        if load > rational::int(b[vertex] as i64) {
            return Err(Error::InfeasiblePoint {
                vertex,
                load,
                capacity: b[vertex],
            });
        }
    }
    Ok(())
}

/// True iff `x ∈ [0,1]^E` and `x(δ(v)) ≤ b(v)` for every vertex, exactly.
pub fn is_fractional_b_matching(
    h: &Hypergraph,
    b: &VertexCapacities,
    x: &FractionalPoint,
) -> Result<bool> {
    match check_fractional_b_matching(h, b, x) {
        Ok(()) => Ok(true),
        Err(Error::InfeasiblePoint { .. } | Error::OutOfUnitInterval { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn check_b_matching(h: &Hypergraph, b: &VertexCapacities, edges: &[usize]) -> Result<()> {
    check_dims(h, b)?;
    let mut count = vec![0usize; h.num_vertices()];
    for &e in edges {
        for &v in h.edge(e)? {
            count[v] += 1;
        }
    }
    match count.iter().enumerate().find(|&(v, &c)| c > b[v] as usize) {
        Some((vertex, &count)) => Err(Error::NotABMatching {
            vertex,
            count,
            capacity: b[vertex],
        }),
        None => Ok(()),
    }
}

/// True iff `|δ(v) ∩ M| ≤ b(v)` for every vertex. Repeated indices count twice.
pub fn is_b_matching(h: &Hypergraph, b: &VertexCapacities, edges: &[usize]) -> Result<bool> {
    match check_b_matching(h, b, edges) {
        Ok(()) => Ok(true),
        Err(Error::NotABMatching { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `g(e) = |e| − (|e| − 1)·x(e)`, the loss factor of the rounding guarantee.
pub fn guarantee_g(edge_size: usize, xe: &Rational) -> Result<Rational> {
    if edge_size == 0 {
        return Err(Error::InvalidInstance(
            "edge size must be at least 1".into(),
        ));
    }
    if !rational::in_unit_interval(xe) {
        return Err(Error::OutOfUnitInterval {
            what: "x(e)",
            index: 0,
            value: xe.clone(),
        });
    }
    let k = rational::int(edge_size as i64);
    Ok(&k - (&k - Rational::one()) * xe)
}

/// `Σ w(e)·x(e)`.
pub fn lp_value(w: &EdgeWeights, x: &FractionalPoint) -> Result<Rational> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            what: "fractional point",
            expected: w.len(),
            found: x.len(),
        });
    }
    Ok(w.as_slice()
        .iter()
        .zip(x.as_slice())
        .fold(Rational::zero(), |acc, (we, xe)| acc + we * xe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn path() -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::new(3, vec![vec![]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 0]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![3]]).is_err());
        assert!(Hypergraph::new(0, vec![]).is_err());
    }

    #[test]
    fn edges_are_sorted() {
        let h = Hypergraph::new(4, vec![vec![3, 0, 2]]).unwrap();
        assert_eq!(h.edge(0).unwrap(), &[0, 2, 3]);
    }

    #[test]
    fn neighborhood_examples() {
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(single.neighborhood(0).unwrap().is_empty());
        assert_eq!(triangle().neighborhood(0).unwrap(), vec![1, 2]);
        assert!(triangle().neighborhood(3).is_err());
    }

    #[test]
    fn incident_edge_examples() {
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(single.incident_edges(0).unwrap(), &[0]);
        assert_eq!(triangle().incident_edges(1).unwrap(), &[0, 1]);
        assert!(triangle().incident_edges(3).is_err());
    }

    #[test]
    fn fractional_feasibility() {
        let h = triangle();
        let b = VertexCapacities::unit(3);
        let half = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        let two_thirds = FractionalPoint::uniform(3, ratio(2, 3)).unwrap();
        assert!(is_fractional_b_matching(&h, &b, &half).unwrap());
        assert!(!is_fractional_b_matching(&h, &b, &two_thirds).unwrap());
        assert!(is_fractional_b_matching(&h, &b, &FractionalPoint::zeros(3)).unwrap());
        assert!(is_fractional_b_matching(&h, &b, &FractionalPoint::zeros(2)).is_err());
        match check_fractional_b_matching(&h, &b, &two_thirds) {
            Err(Error::InfeasiblePoint {
                vertex: 0, load, ..
            }) => assert_eq!(load, ratio(4, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn point_entries_must_be_in_unit_interval() {
        assert!(FractionalPoint::new(vec![ratio(3, 2)]).is_err());
        assert!(FractionalPoint::new(vec![ratio(-1, 2)]).is_err());
    }

    #[test]
    fn integral_feasibility() {
        let b1 = VertexCapacities::unit(3);
        assert!(!is_b_matching(&triangle(), &b1, &[0, 1]).unwrap());
        assert!(is_b_matching(&triangle(), &b1, &[]).unwrap());
        let b = VertexCapacities::new(vec![1, 2, 1]).unwrap();
        assert!(is_b_matching(&path(), &b, &[0, 1]).unwrap());
        assert!(is_b_matching(&path(), &b, &[7]).is_err());
    }

    #[test]
    fn guarantee_examples() {
        assert_eq!(guarantee_g(3, &int(1)).unwrap(), int(1));
        assert_eq!(guarantee_g(2, &ratio(1, 2)).unwrap(), ratio(3, 2));
        let g = guarantee_g(3, &ratio(1, 3)).unwrap();
        assert_eq!(g, ratio(7, 3));
        // k − 1 + 1/k at k = 3
        assert_eq!(g, int(2) + ratio(1, 3));
        assert!(guarantee_g(2, &ratio(3, 2)).is_err());
        assert!(guarantee_g(0, &int(0)).is_err());
    }

    #[test]
    fn lp_value_examples() {
        let w = EdgeWeights::unit(3);
        assert_eq!(lp_value(&w, &FractionalPoint::zeros(3)).unwrap(), int(0));
        let half = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        assert_eq!(lp_value(&w, &half).unwrap(), ratio(3, 2));
        let third = FractionalPoint::uniform(7, ratio(1, 3)).unwrap();
        assert_eq!(
            lp_value(&EdgeWeights::unit(7), &third).unwrap(),
            ratio(7, 3)
        );
    }

    #[test]
    fn negative_weights_rejected() {
        assert!(EdgeWeights::new(vec![int(1), int(-1)]).is_err());
        assert!(VertexCapacities::new(vec![1, 0]).is_err());
    }
}
