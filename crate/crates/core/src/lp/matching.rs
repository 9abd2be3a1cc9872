use num_traits::One;

use super::{solve, LinearProgram, LpOutcome, Relation, Sense};
use crate::error::{Error, Result};
use crate::hypergraph::{
    check_fractional_b_matching, check_weight_dims, vertex_loads, EdgeWeights, FractionalPoint,
    Hypergraph, VertexCapacities,
};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingLpSolution {
    pub x: FractionalPoint,
    pub value: Rational,
}

/// Builds `max Σ w(e)x(e)` over `{x ∈ [0,1]^E : x(δ(v)) ≤ b(v)}`.
///
/// Upper bounds `x(e) ≤ 1` are only added for edges whose every vertex has
/// `b(v) ≥ 2`; otherwise a capacity row already implies them.
pub fn fractional_bmatching_lp(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
) -> Result<LinearProgram> {
    check_weight_dims(h, w)?;
    if b.len() != h.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "capacities",
            expected: h.num_vertices(),
            found: b.len(),
        });
    }
    let m = h.num_edges();
    let mut lp = LinearProgram::new(Sense::Maximize, w.as_slice().to_vec());
    for v in 0..h.num_vertices() {
        let incident = h.incident_edges(v)?;
        if incident.is_empty() {
            continue;
        }
        let mut row = vec![rational::zero(); m];
        for &e in incident {
            row[e] = Rational::one();
        }
        lp.add_constraint(row, Relation::Le, rational::int(b[v] as i64));
    }
    for (e, edge) in h.edges().iter().enumerate() {
        if edge.iter().all(|&v| b[v] >= 2) {
            lp.set_upper_bound(e, Rational::one());
        }
    }
    Ok(lp)
}

/// An optimal extreme point of the fractional b-matching polytope.
pub fn solve_fractional_bmatching(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
) -> Result<MatchingLpSolution> {
    let lp = fractional_bmatching_lp(h, w, b)?;
    match solve(&lp)? {
        LpOutcome::Optimal { solution, value } => Ok(MatchingLpSolution {
            x: FractionalPoint::new(solution)?,
            value,
        }),
        other => Err(Error::Internal(format!(
            "matching LP is feasible and bounded, solver returned {other:?}"
        ))),
    }
}

/// `Q = {v : x(δ(v)) = b(v)}`.
pub fn tight_vertices(
    h: &Hypergraph,
    b: &VertexCapacities,
    x: &FractionalPoint,
) -> Result<Vec<usize>> {
    check_fractional_b_matching(h, b, x)?;
    Ok(vertex_loads(h, x)?
        .into_iter()
        .enumerate()
        .filter(|(v, load)| *load == rational::int(b[*v] as i64))
        .map(|(v, _)| v)
        .collect())
}
