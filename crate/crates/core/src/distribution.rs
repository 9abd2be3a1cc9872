//! Explicit distributions over b-matchings with per-edge marginal floors.
//!
//! For a fractional b-matching `x` the target is `p(e) = x(e)/g(e)`. We look
//! for `λ ≥ 0` over b-matchings with `Σλ = 1` and `Σ_{S∋e} λ_S ≥ p(e)`. The
//! search is column generation over a finite family of b-matchings: solve the
//! restricted LP; if it is infeasible, its Farkas certificate is a dual point
//! `(y, μ)` with `Σ p(e)y(e) − μ = 1` and `y(S) ≤ μ` on the family. Greedy on
//! the adjusted weights `max(y(e)/g(e), 0)` then returns a b-matching with
//! `y(S) ≥ Σ p(e)y(e) > μ`, which is new, so the loop terminates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::greedy;
use crate::hypergraph::{
    check_fractional_b_matching, check_point_dims, guarantee_g, is_b_matching, BMatching,
    EdgeWeights, FractionalPoint, Hypergraph, VertexCapacities,
};
use crate::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::{self, Rational};

/// Per-edge marginal floors `p(e) ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalTarget(Vec<Rational>);

impl MarginalTarget {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some((index, value)) = values
            .iter()
            .enumerate()
            .find(|(_, p)| !rational::in_unit_interval(p))
        {
            return Err(Error::OutOfUnitInterval {
                what: "p",
                index,
                value: value.clone(),
            });
        }
        Ok(Self(values))
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

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `Σ p(e)·y(e)`.
    pub fn dot(&self, y: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(y)
            .fold(Rational::zero(), |acc, (p, y)| acc + p * y)
    }
}

/// `p(e) = x(e) / (|e| − (|e|−1)·x(e))`.
pub fn marginal_target_from(x: &FractionalPoint, h: &Hypergraph) -> Result<MarginalTarget> {
    check_point_dims(h, x)?;
    let values = h
        .edges()
        .iter()
        .zip(x.as_slice())
        .map(|(edge, xe)| Ok(xe / guarantee_g(edge.len(), xe)?))
        .collect::<Result<_>>()?;
    MarginalTarget::new(values)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub matching: BMatching,
    pub lambda: Rational,
}

/// A finite convex combination of b-matchings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingDistribution {
    pub atoms: Vec<Atom>,
}

impl MatchingDistribution {
    pub fn new(atoms: Vec<(BMatching, Rational)>) -> Self {
        Self {
            atoms: atoms
                .into_iter()
                .map(|(matching, lambda)| Atom { matching, lambda })
                .collect(),
        }
    }

    /// The point mass on `∅`.
    pub fn empty_matching() -> Self {
        Self::new(vec![(BMatching::empty(), Rational::one())])
    }

    pub fn support_size(&self) -> usize {
        self.atoms.iter().filter(|a| a.lambda.is_positive()).count()
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms
            .iter()
            .fold(Rational::zero(), |acc, a| acc + &a.lambda)
    }

    /// `Σ_{S∋e} λ_S` for each edge. Out-of-range indices are ignored.
    pub fn marginals(&self, num_edges: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); num_edges];
        for atom in &self.atoms {
            for &e in atom.matching.edges() {
                if let Some(m) = out.get_mut(e) {
                    *m += &atom.lambda;
                }
            }
        }
        out
    }

    /// Combines repeated atoms, keeping first-occurrence order.
    pub fn merge_duplicates(&self) -> Self {
        let mut index: BTreeMap<&BMatching, usize> = BTreeMap::new();
        let mut atoms: Vec<Atom> = Vec::new();
        for atom in &self.atoms {
            match index.get(&atom.matching) {
                Some(&k) => atoms[k].lambda += &atom.lambda,
                None => {
                    index.insert(&atom.matching, atoms.len());
                    atoms.push(atom.clone());
                }
            }
        }
        Self { atoms }
    }

    /// Inverse-CDF draw from one uniform `u64`: atom `k` is chosen for the
    /// first `k` with `r / 2^64 < λ_1 + … + λ_k`, compared exactly. Each
    /// realized probability is within `2^-64` of its `λ`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Option<&BMatching> {
        let r = BigInt::from(rng.next_u64());
        let scale = BigInt::one() << 64;
        let mut cumulative = Rational::zero();
        let mut last = None;
        for atom in self.atoms.iter().filter(|a| a.lambda.is_positive()) {
            cumulative += &atom.lambda;
            last = Some(&atom.matching);
            if &r * cumulative.denom() < cumulative.numer() * &scale {
                return last;
            }
        }
        last
    }
}

/// A dual point `(y, μ)`; produced certificates satisfy `Σ p·y − μ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualIterate {
    pub y: Vec<Rational>,
    pub mu: Rational,
}

/// Greedy on `w̄(e) = max(y(e)/g(e), 0)`, keeping only edges with `w̄(e) > 0`.
///
/// The result satisfies `Σ_{e∈M} y(e) ≥ Σ_e p(e)·y(e)` for `p` derived from `x`.
pub fn separation_oracle(
    h: &Hypergraph,
    b: &VertexCapacities,
    y: &[Rational],
    x: &FractionalPoint,
) -> Result<BMatching> {
    check_point_dims(h, x)?;
    if y.len() != h.num_edges() {
        return Err(Error::DimensionMismatch {
            what: "dual weights",
            expected: h.num_edges(),
            found: y.len(),
        });
    }
    if let Some((index, value)) = y.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::NegativeWeight {
            index,
            value: value.clone(),
        });
    }
    let adjusted: Vec<Rational> = h
        .edges()
        .iter()
        .zip(y)
        .zip(x.as_slice())
        .map(|((edge, ye), xe)| {
            let w = ye / guarantee_g(edge.len(), xe)?;
            Ok(if w.is_negative() { Rational::zero() } else { w })
        })
        .collect::<Result<_>>()?;
    let (greedy_set, _) = greedy(h, &EdgeWeights::new(adjusted.clone())?, b)?;
    let kept = greedy_set
        .edges()
        .iter()
        .copied()
        .filter(|&e| adjusted[e].is_positive())
        .collect();
    Ok(BMatching::from_sorted_unchecked(kept))
}

/// Output of [`build_distribution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionBuild {
    pub distribution: MatchingDistribution,
    pub target: MarginalTarget,
    /// Number of oracle calls (restricted LPs that came back infeasible).
    pub iterations: usize,
    /// Every b-matching that entered the restricted LP, in order.
    pub family: Vec<BMatching>,
    /// The normalized dual point behind each oracle call.
    pub duals: Vec<DualIterate>,
}

/// Restricted primal: `λ ≥ 0`, `Σ_{S∋e} λ_S ≥ p(e)` for each edge, `Σλ = 1`.
fn restricted_lp(family: &[BMatching], p: &MarginalTarget) -> LinearProgram {
    let k = family.len();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); k]);
    for (e, pe) in p.as_slice().iter().enumerate() {
        let row = family
            .iter()
            .map(|s| {
                if s.contains(e) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        lp.add_constraint(row, Relation::Ge, pe.clone());
    }
    lp.add_constraint(vec![Rational::one(); k], Relation::Eq, Rational::one());
    lp
}

fn positive_atoms(family: &[BMatching], lambda: Vec<Rational>) -> MatchingDistribution {
    MatchingDistribution {
        atoms: family
            .iter()
            .zip(lambda)
            .filter(|(_, l)| l.is_positive())
            .map(|(s, l)| Atom {
                matching: s.clone(),
                lambda: l,
            })
            .collect(),
    }
}

/// A distribution over b-matchings of `h` whose marginals dominate
/// `x(e)/g(e)` exactly.
pub fn build_distribution(
    h: &Hypergraph,
    b: &VertexCapacities,
    x: &FractionalPoint,
) -> Result<DistributionBuild> {
    check_fractional_b_matching(h, b, x)?;
    let target = marginal_target_from(x, h)?;
    if target.is_zero() {
        return Ok(DistributionBuild {
            distribution: MatchingDistribution::empty_matching(),
            target,
            iterations: 0,
            family: vec![BMatching::empty()],
            duals: Vec::new(),
        });
    }

    let (seed_set, _) = greedy(h, &EdgeWeights::new(x.as_slice().to_vec())?, b)?;
    let mut family = vec![seed_set];
    if !family[0].is_empty() {
        family.push(BMatching::empty());
    }
    let mut duals = Vec::new();
    let m = h.num_edges();
    loop {
        let lp = restricted_lp(&family, &target);
        match lp::solve(&lp)? {
            LpOutcome::Optimal { solution, .. } => {
                return Ok(DistributionBuild {
                    distribution: positive_atoms(&family, solution),
                    target,
                    iterations: duals.len(),
                    family,
                    duals,
                });
            }
            LpOutcome::Infeasible(cert) => {
                let y_raw = &cert.row_multipliers[..m];
                let mu_raw = &cert.row_multipliers[m];
                let gap = target.dot(y_raw) - mu_raw;
                if !gap.is_positive() {
                    return Err(Error::Internal(format!(
                        "certificate has nonpositive dual objective {gap}"
                    )));
                }
                let dual = DualIterate {
                    y: y_raw.iter().map(|v| v / &gap).collect(),
                    mu: mu_raw / &gap,
                };
                let set = separation_oracle(h, b, &dual.y, x)?;
                let value = set
                    .edges()
                    .iter()
                    .fold(Rational::zero(), |acc, &e| acc + &dual.y[e]);
                if value <= dual.mu || family.contains(&set) {
                    return Err(Error::Internal(format!(
                        "oracle set {:?} does not separate (y(S) = {value}, mu = {})",
                        set.edges(),
                        dual.mu
                    )));
                }
                family.push(set);
                duals.push(dual);
            }
            LpOutcome::Unbounded { .. } => {
                return Err(Error::Internal("restricted LP has a zero objective".into()))
            }
        }
    }
}

/// Per-edge and global checks of a distribution against a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionReport {
    pub dimensions_match: bool,
    pub lambdas_nonnegative: bool,
    pub total_mass: Rational,
    /// Indices of atoms that are not b-matchings of the instance.
    pub invalid_atoms: Vec<usize>,
    pub marginals: Vec<Rational>,
    /// `marginal(e) − p(e)`.
    pub slacks: Vec<Rational>,
    pub failing_edges: Vec<usize>,
}

impl DistributionReport {
    pub fn passes(&self) -> bool {
        self.dimensions_match
            && self.lambdas_nonnegative
            && self.total_mass.is_one()
            && self.invalid_atoms.is_empty()
            && self.failing_edges.is_empty()
    }
}

pub fn verify_distribution(
    dist: &MatchingDistribution,
    p: &MarginalTarget,
    h: &Hypergraph,
    b: &VertexCapacities,
) -> DistributionReport {
    let m = h.num_edges();
    let invalid_atoms = dist
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| !matches!(is_b_matching(h, b, a.matching.edges()), Ok(true)))
        .map(|(i, _)| i)
        .collect();
    let marginals = dist.marginals(m);
    let slacks: Vec<Rational> = marginals
        .iter()
        .zip(p.as_slice())
        .map(|(got, want)| got - want)
        .collect();
    let failing_edges = slacks
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_negative())
        .map(|(e, _)| e)
        .collect();
    DistributionReport {
        dimensions_match: p.len() == m,
        lambdas_nonnegative: dist.atoms.iter().all(|a| !a.lambda.is_negative()),
        total_mass: dist.total_mass(),
        invalid_atoms,
        marginals,
        slacks,
        failing_edges,
    }
}

/// A basic feasible re-weighting over the input's atoms, with at most
/// `|E| + 1` atoms of positive weight. Duplicate atoms are merged first.
pub fn reduce_support(
    dist: &MatchingDistribution,
    p: &MarginalTarget,
) -> Result<MatchingDistribution> {
    let m = p.len();
    if dist.atoms.iter().any(|a| a.lambda.is_negative()) {
        return Err(Error::InvalidDistribution("negative coefficient".into()));
    }
    if !dist.total_mass().is_one() {
        return Err(Error::InvalidDistribution(format!(
            "coefficients sum to {}",
            dist.total_mass()
        )));
    }
    if let Some(e) = dist
        .atoms
        .iter()
        .flat_map(|a| a.matching.edges())
        .find(|&&e| e >= m)
    {
        return Err(Error::InvalidDistribution(format!(
            "atom uses unknown edge {e}"
        )));
    }
    if let Some((e, (got, want))) = dist
        .marginals(m)
        .iter()
        .zip(p.as_slice())
        .enumerate()
        .find(|(_, (got, want))| got < want)
    {
        return Err(Error::InvalidDistribution(format!(
            "marginal of edge {e} is {got} < {want}"
        )));
    }
    let merged = MatchingDistribution {
        atoms: dist
            .merge_duplicates()
            .atoms
            .into_iter()
            .filter(|a| a.lambda.is_positive())
            .collect(),
    };
    if merged.atoms.len() <= 1 {
        return Ok(merged);
    }
    let family: Vec<BMatching> = merged.atoms.iter().map(|a| a.matching.clone()).collect();
    match lp::solve(&restricted_lp(&family, p))? {
        LpOutcome::Optimal { solution, .. } => {
            let reduced = positive_atoms(&family, solution);
            // A basic solution can only be larger than the input when the
            // input was already small; never grow the support.
            Ok(if reduced.atoms.len() <= merged.atoms.len() {
                reduced
            } else {
                merged
            })
        }
        other => Err(Error::Internal(format!(
            "restricted LP over a feasible distribution returned {other:?}"
        ))),
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    edges: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    lambda: Rational,
}

#[derive(Serialize, Deserialize)]
struct DistributionRecord {
    atoms: Vec<AtomRecord>,
    #[serde(with = "rational::serde_vec")]
    p: Vec<Rational>,
}

pub fn distribution_to_json(dist: &MatchingDistribution, p: &MarginalTarget) -> String {
    let record = DistributionRecord {
        atoms: dist
            .atoms
            .iter()
            .map(|a| AtomRecord {
                edges: a.matching.edges().to_vec(),
                lambda: a.lambda.clone(),
            })
            .collect(),
        p: p.as_slice().to_vec(),
    };
    serde_json::to_string_pretty(&record).expect("distribution serializes")
}

/// Parses a distribution file. Atoms are not checked against any instance;
/// use [`verify_distribution`] for that.
pub fn distribution_from_json(text: &str) -> Result<(MatchingDistribution, MarginalTarget)> {
    let record: DistributionRecord = serde_json::from_str(text)?;
    let atoms = record
        .atoms
        .into_iter()
        .map(|a| {
            let mut edges = a.edges;
            edges.sort_unstable();
            edges.dedup();
            (BMatching::from_sorted_unchecked(edges), a.lambda)
        })
        .collect();
    Ok((
        MatchingDistribution::new(atoms),
        MarginalTarget::new(record.p)?,
    ))
}
