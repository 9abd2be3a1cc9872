//! Brute-force ground truth for small instances.

use crate::error::{Error, Result};
use crate::hypergraph::{BMatching, EdgeWeights, Hypergraph, VertexCapacities};
use crate::rational::Rational;

/// Largest edge count the exhaustive oracles accept.
pub const MAX_ENUMERATION_EDGES: usize = 25;

fn guard(h: &Hypergraph, b: &VertexCapacities, what: &'static str) -> Result<()> {
    if h.num_edges() > MAX_ENUMERATION_EDGES {
        return Err(Error::GuardExceeded {
            what,
            limit: MAX_ENUMERATION_EDGES,
            found: h.num_edges(),
        });
    }
    if b.len() != h.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "capacities",
            expected: h.num_vertices(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Depth-first enumeration of every b-matching, `∅` first.
///
/// Sets are produced in lexicographic order of their sorted edge lists.
pub struct BMatchings<'a> {
    h: &'a Hypergraph,
    b: &'a VertexCapacities,
    load: Vec<u32>,
    chosen: Vec<usize>,
    /// Next candidate edge for each open depth.
    frontier: Vec<usize>,
    started: bool,
}

impl BMatchings<'_> {
    fn fits(&self, e: usize) -> bool {
        self.h.edges()[e].iter().all(|&v| self.load[v] < self.b[v])
    }

    fn set_load(&mut self, e: usize, add: bool) {
        for &v in &self.h.edges()[e] {
            if add {
                self.load[v] += 1;
            } else {
                self.load[v] -= 1;
            }
        }
    }
}

impl Iterator for BMatchings<'_> {
    type Item = BMatching;

    fn next(&mut self) -> Option<BMatching> {
        if !self.started {
            self.started = true;
            self.frontier.push(0);
            return Some(BMatching::empty());
        }
        let m = self.h.num_edges();
        while let Some(&start) = self.frontier.last() {
            match (start..m).find(|&e| self.fits(e)) {
                Some(e) => {
                    *self.frontier.last_mut().expect("nonempty") = e + 1;
                    self.chosen.push(e);
                    self.set_load(e, true);
                    self.frontier.push(e + 1);
                    return Some(BMatching::from_sorted_unchecked(self.chosen.clone()));
                }
                None => {
                    self.frontier.pop();
                    if let Some(e) = self.chosen.pop() {
                        self.set_load(e, false);
                    }
                }
            }
        }
        None
    }
}

pub fn enumerate_b_matchings<'a>(
    h: &'a Hypergraph,
    b: &'a VertexCapacities,
) -> Result<BMatchings<'a>> {
    guard(h, b, "b-matching enumeration")?;
    Ok(BMatchings {
        h,
        b,
        load: vec![0; h.num_vertices()],
        chosen: Vec::new(),
        frontier: Vec::new(),
        started: false,
    })
}

/// Maximum-weight b-matching; ties go to the lexicographically smallest set.
pub fn brute_force_max_bmatching(
    h: &Hypergraph,
    w: &EdgeWeights,
    b: &VertexCapacities,
) -> Result<(BMatching, Rational)> {
    if w.len() != h.num_edges() {
        return Err(Error::DimensionMismatch {
            what: "weights",
            expected: h.num_edges(),
            found: w.len(),
        });
    }
    let mut best: Option<(BMatching, Rational)> = None;
    for m in enumerate_b_matchings(h, b)? {
        let value = m.weight(w);
        // Enumeration is lexicographic, so only a strict improvement replaces.
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((m, value));
        }
    }
    Ok(best.expect("the empty set is always enumerated"))
}
