//! Weight-ordered greedy b-matching and exact checks of its LP guarantee.
//!
//! Edges are scanned in non-increasing weight order and kept whenever the
//! partial solution stays a b-matching. For any fractional b-matching `x` the
//! result satisfies `Σ_{e∈M} g(e)·w(e) ≥ Σ_e w(e)·x(e)` with
//! `g(e) = |e| − (|e|−1)·x(e)`; the verifiers here evaluate that bound and the
//! charging inequalities behind it with exact rationals.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{
    check_fractional_b_matching, check_weight_dims, guarantee_g, lp_value, BMatching, EdgeWeights,
    FractionalPoint, Hypergraph, VertexCapacities,
};
use crate::rational::{self, Rational};

/// Record of one greedy run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyTrace {
    /// Edge indices in processing order.
    pub order: Vec<usize>,
    /// `accepted[k]` tells whether `order[k]` was added.
    pub accepted: Vec<bool>,
    /// Per edge index: the saturated vertex that blocked it, `None` if accepted.
    pub blocking_vertex: Vec<Option<usize>>,
}

impl GreedyTrace {
    pub fn matching(&self) -> BMatching {
        let mut edges: Vec<usize> = self
            .order
            .iter()
            .zip(&self.accepted)
            .filter(|(_, &a)| a)
            .map(|(&e, _)| e)
            .collect();
        edges.sort_unstable();
        BMatching::from_sorted_unchecked(edges)
    }
}

/// Canonical processing order: weight descending, then index ascending.
pub fn weight_order(w: &EdgeWeights) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].cmp(&w[a]).then(a.cmp(&b)));
    order
}

/// Greedy over the canonical order.
pub fn greedy(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
) -> Result<(BMatching, GreedyTrace)> {
    check_weight_dims(h, w)?;
    greedy_in_order(h, w, b, weight_order(w))
}

/// Greedy over a caller-supplied order, which must be a permutation of the
/// edges with non-increasing weights.
pub fn greedy_in_order(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
    order: Vec<usize>,
) -> Result<(BMatching, GreedyTrace)> {
    check_weight_dims(h, w)?;
    if b.len() != h.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "capacities",
            expected: h.num_vertices(),
            found: b.len(),
        });
    }
    check_order(h, w, &order)?;
    let mut load = vec![0u32; h.num_vertices()];
    let mut accepted = Vec::with_capacity(order.len());
    let mut blocking_vertex = vec![None; h.num_edges()];
    for &e in &order {
        let edge = &h.edges()[e];
        // Edges are sorted, so the first saturated vertex is the smallest.
        match edge.iter().copied().find(|&v| load[v] >= b[v]) {
            Some(v) => {
                blocking_vertex[e] = Some(v);
                accepted.push(false);
            }
            None => {
                for &v in edge {
                    load[v] += 1;
                }
                accepted.push(true);
            }
        }
    }
    let trace = GreedyTrace {
        order,
        accepted,
        blocking_vertex,
    };
    Ok((trace.matching(), trace))
}

fn check_order(h: &Hypergraph, w: &EdgeWeights, order: &[usize]) -> Result<()> {
    let m = h.num_edges();
    if order.len() != m {
        return Err(Error::TraceMismatch(format!(
            "order has {} entries for {m} edges",
            order.len()
        )));
    }
    let mut seen = vec![false; m];
    for &e in order {
        if e >= m || std::mem::replace(&mut seen[e], true) {
            return Err(Error::TraceMismatch(format!(
                "order is not a permutation (edge {e})"
            )));
        }
    }
    if let Some(k) = order.windows(2).position(|p| w[p[0]] < w[p[1]]) {
        return Err(Error::TraceMismatch(format!(
            "order increases in weight at position {}",
            k + 1
        )));
    }
    Ok(())
}

/// Both sides of the greedy guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyBound {
    pub holds: bool,
    /// `Σ_{e∈M} g(e)·w(e)`
    pub lhs: Rational,
    /// `Σ_e w(e)·x(e)`
    pub rhs: Rational,
    pub slack: Rational,
}

pub fn verify_greedy_bound(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
    x: &FractionalPoint,
    m: &BMatching,
) -> Result<GreedyBound> {
    check_weight_dims(h, w)?;
    check_fractional_b_matching(h, b, x)?;
    let m = BMatching::new(h, b, m.edges().to_vec())?;
    let mut lhs = Rational::zero();
    for &e in m.edges() {
        lhs += guarantee_g(h.edges()[e].len(), &x[e])? * &w[e];
    }
    let rhs = lp_value(w, x)?;
    let slack = &lhs - &rhs;
    Ok(GreedyBound {
        holds: !slack.is_negative(),
        lhs,
        rhs,
        slack,
    })
}

/// Slack of one inequality instance, keyed by the edge or vertex it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Slack {
    pub index: usize,
    #[serde(with = "rational::serde_str")]
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityFamily {
    pub holds: bool,
    pub slacks: Vec<Slack>,
}

impl InequalityFamily {
    fn from_slacks(slacks: Vec<Slack>) -> Self {
        Self {
            holds: slacks.iter().all(|s| !s.slack.is_negative()),
            slacks,
        }
    }

    pub fn min_slack(&self) -> Option<&Rational> {
        self.slacks.iter().map(|s| &s.slack).min()
    }
}

/// The three exact inequalities of the charging argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChargingReport {
    /// `w(f) ≤ min{w(e) : e ∈ δ(v_f) ∩ M}` for every rejected `f`, keyed by `f`.
    pub domination: InequalityFamily,
    /// `Σ_{f∈δ(v)∖M} x(f) ≤ Σ_{e∈δ(v)∩M} (1 − x(e))` for every saturated `v`, keyed by `v`.
    pub vertex_load: InequalityFamily,
    /// `Σ_{f∉M} w(f)x(f) ≤ Σ_{e∈M} |e|·w(e)·(1 − x(e))`.
    pub total_charge: InequalityFamily,
}

impl ChargingReport {
    pub fn holds(&self) -> bool {
        self.domination.holds && self.vertex_load.holds && self.total_charge.holds
    }
}

pub fn verify_charging_chain(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
    x: &FractionalPoint,
    trace: &GreedyTrace,
) -> Result<ChargingReport> {
    check_weight_dims(h, w)?;
    check_fractional_b_matching(h, b, x)?;
    check_order(h, w, &trace.order)?;
    if trace.accepted.len() != trace.order.len() || trace.blocking_vertex.len() != h.num_edges() {
        return Err(Error::TraceMismatch(
            "trace vectors have inconsistent lengths".into(),
        ));
    }
    let m = BMatching::new(h, b, trace.matching().edges().to_vec())
        .map_err(|e| Error::TraceMismatch(format!("accepted edges: {e}")))?;

    let mut in_m = vec![false; h.num_edges()];
    for &e in m.edges() {
        in_m[e] = true;
    }
    let saturated = |v: usize| -> Result<bool> {
        let count = h.incident_edges(v)?.iter().filter(|&&e| in_m[e]).count();
        Ok(count == b[v] as usize)
    };

    let mut domination = Vec::new();
    for f in 0..h.num_edges() {
        match (in_m[f], trace.blocking_vertex[f]) {
            (true, None) => {}
            (false, Some(v)) => {
                if !h.edges()[f].contains(&v) || !saturated(v)? {
                    return Err(Error::TraceMismatch(format!(
                        "vertex {v} cannot have blocked edge {f}"
                    )));
                }
                let lightest = h
                    .incident_edges(v)?
                    .iter()
                    .filter(|&&e| in_m[e])
                    .map(|&e| &w[e])
                    .min()
                    .expect("saturated vertex has b(v) ≥ 1 matched edges");
                domination.push(Slack {
                    index: f,
                    slack: lightest - &w[f],
                });
            }
            _ => {
                return Err(Error::TraceMismatch(format!(
                    "edge {f} acceptance disagrees with its blocking record"
                )))
            }
        }
    }

    let mut vertex_load = Vec::new();
    for v in 0..h.num_vertices() {
        if !saturated(v)? {
            continue;
        }
        let (mut outside, mut room) = (Rational::zero(), Rational::zero());
        for &e in h.incident_edges(v)? {
            if in_m[e] {
                room += Rational::one() - &x[e];
            } else {
                outside += &x[e];
            }
        }
        vertex_load.push(Slack {
            index: v,
            slack: room - outside,
        });
    }

    let mut charged = Rational::zero();
    let mut capacity = Rational::zero();
    for (e, edge) in h.edges().iter().enumerate() {
        if in_m[e] {
            capacity += rational::int(edge.len() as i64) * &w[e] * (Rational::one() - &x[e]);
        } else {
            charged += &w[e] * &x[e];
        }
    }

    Ok(ChargingReport {
        domination: InequalityFamily::from_slacks(domination),
        vertex_load: InequalityFamily::from_slacks(vertex_load),
        total_charge: InequalityFamily::from_slacks(vec![Slack {
            index: 0,
            slack: capacity - charged,
        }]),
    })
}
