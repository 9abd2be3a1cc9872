//! JSON instance and fractional-point files.
//!
//! ```json
//! { "num_vertices": 3,
//!   "edges": [ { "vertices": [0, 1], "weight": "3" }, { "vertices": [1, 2], "weight": "2" } ],
//!   "capacities": [1, 2, 1] }
//! ```
//!
//! `capacities` may be omitted (all ones). Fractional points are stored as
//! `{ "x": ["1/2", "0", ...] }`.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeWeights, FractionalPoint, Hypergraph, VertexCapacities};
use crate::rational::{self, Rational};

/// A hypergraph together with edge weights and vertex capacities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub hypergraph: Hypergraph,
    pub weights: EdgeWeights,
    pub capacities: VertexCapacities,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    vertices: Vec<usize>,
    #[serde(with = "rational::serde_str", default = "Rational::one")]
    weight: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    num_vertices: usize,
    edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    capacities: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    #[serde(with = "rational::serde_vec")]
    x: Vec<Rational>,
}

impl Instance {
    pub fn new(
        hypergraph: Hypergraph,
        weights: EdgeWeights,
        capacities: VertexCapacities,
    ) -> Result<Self> {
        if weights.len() != hypergraph.num_edges() {
            return Err(Error::DimensionMismatch {
                what: "weights",
                expected: hypergraph.num_edges(),
                found: weights.len(),
            });
        }
        if capacities.len() != hypergraph.num_vertices() {
            return Err(Error::DimensionMismatch {
                what: "capacities",
                expected: hypergraph.num_vertices(),
                found: capacities.len(),
            });
        }
        Ok(Self {
            hypergraph,
            weights,
            capacities,
        })
    }

    /// Unit weights and unit capacities.
    pub fn unweighted(hypergraph: Hypergraph) -> Self {
        let weights = EdgeWeights::unit(hypergraph.num_edges());
        let capacities = VertexCapacities::unit(hypergraph.num_vertices());
        Self {
            hypergraph,
            weights,
            capacities,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: InstanceRecord = serde_json::from_str(text)?;
        let (vertices, weights): (Vec<_>, Vec<_>) = record
            .edges
            .into_iter()
            .map(|e| (e.vertices, e.weight))
            .unzip();
        let hypergraph = Hypergraph::new(record.num_vertices, vertices)?;
        let capacities = match record.capacities {
            Some(b) => VertexCapacities::new(b)?,
            None => VertexCapacities::unit(hypergraph.num_vertices()),
        };
        Self::new(hypergraph, EdgeWeights::new(weights)?, capacities)
    }

    /// Pretty-printed JSON; capacities are omitted when they are all 1.
    pub fn to_json(&self) -> String {
        let record = InstanceRecord {
            num_vertices: self.hypergraph.num_vertices(),
            edges: self
                .hypergraph
                .edges()
                .iter()
                .zip(self.weights.as_slice())
                .map(|(v, w)| EdgeRecord {
                    vertices: v.clone(),
                    weight: w.clone(),
                })
                .collect(),
            capacities: self
                .capacities
                .first_non_unit()
                .map(|_| self.capacities.as_slice().to_vec()),
        };
        serde_json::to_string_pretty(&record).expect("instance serializes")
    }
}

pub fn point_from_json(text: &str) -> Result<FractionalPoint> {
    let record: PointRecord = serde_json::from_str(text)?;
    FractionalPoint::new(record.x)
}

pub fn point_to_json(x: &FractionalPoint) -> String {
    serde_json::to_string_pretty(&PointRecord {
        x: x.as_slice().to_vec(),
    })
    .expect("point serializes")
}
