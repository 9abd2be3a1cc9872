//! Exponential-clocks rounding of a fractional matching.
//!
//! Every edge `e` in the support draws `Z_e ~ Exp(x(e))`; an edge is kept when
//! its clock beats the clock of every overlapping support edge. This gives
//! `Pr[e ∈ M] = x(e) / (x(e) + x(N(e)))` exactly, which is at least
//! `x(e) / g(e)`.
//!
//! Clocks are `f64` and compared lexicographically on `(z, edge index)`. All
//! marginal verification goes through the exact closed form instead.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{
    check_fractional_b_matching, guarantee_g, BMatching, FractionalPoint, Hypergraph,
    VertexCapacities,
};
use crate::rational::{self, Rational};

/// Samples per replica stream in [`estimate_marginals`].
pub const SAMPLES_PER_REPLICA: u64 = 1 << 14;

/// A seed plus a stream index; equal pairs give bit-identical draws.
///
/// The generator is ChaCha8 seeded from `seed`, with `replica` selecting the
/// ChaCha stream, so distinct replicas are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed {
    pub seed: u64,
    pub replica: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, replica: 0 }
    }

    pub fn with_replica(self, replica: u64) -> Self {
        Self { replica, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.replica);
        rng
    }
}

/// One realization of the support clocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockRealization {
    /// `(z_e, e)` for every support edge, in edge order.
    pub clocks: Vec<(f64, usize)>,
}

/// Inverse-CDF exponential variate with the given rate.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u = loop {
        // 1 − [0, 1) lies in (0, 1]
        let u = 1.0 - rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    -u.ln() / rate
}

fn beats(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn require_unit_capacities(h: &Hypergraph, x: &FractionalPoint) -> Result<()> {
    check_fractional_b_matching(h, &VertexCapacities::unit(h.num_vertices()), x)
}

/// Precomputed support and overlap structure for repeated sampling.
#[derive(Debug, Clone)]
pub struct ClockSampler {
    num_edges: usize,
    support: Vec<usize>,
    rates: Vec<f64>,
    /// Overlapping support edges, as positions into `support`.
    rivals: Vec<Vec<usize>>,
}

impl ClockSampler {
    /// Fails unless `x` is a fractional matching of `h` (capacities all 1).
    pub fn new(h: &Hypergraph, x: &FractionalPoint) -> Result<Self> {
        require_unit_capacities(h, x)?;
        let support = x.support();
        let mut position = vec![usize::MAX; h.num_edges()];
        for (k, &e) in support.iter().enumerate() {
            position[e] = k;
        }
        let rates = support.iter().map(|&e| rational::to_f64(&x[e])).collect();
        let rivals = support
            .iter()
            .map(|&e| {
                Ok(h.neighborhood(e)?
                    .into_iter()
                    .filter(|&f| position[f] != usize::MAX)
                    .map(|f| position[f])
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            num_edges: h.num_edges(),
            support,
            rates,
            rivals,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ClockRealization {
        ClockRealization {
            clocks: self
                .support
                .iter()
                .zip(&self.rates)
                .map(|(&e, &rate)| (exponential(rng, rate), e))
                .collect(),
        }
    }

    /// Support edges whose clock beats all overlapping support clocks.
    pub fn winners(&self, realization: &ClockRealization) -> BMatching {
        let clocks = &realization.clocks;
        let edges = (0..clocks.len())
            .filter(|&k| self.rivals[k].iter().all(|&r| beats(clocks[k], clocks[r])))
            .map(|k| clocks[k].1)
            .collect();
        BMatching::from_sorted_unchecked(edges)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BMatching {
        self.winners(&self.draw(rng))
    }

    fn count_wins(&self, replica: RngSeed, samples: u64) -> Vec<u64> {
        let mut rng = replica.rng();
        let mut counts = vec![0u64; self.num_edges];
        for _ in 0..samples {
            for &e in self.sample(&mut rng).edges() {
                counts[e] += 1;
            }
        }
        counts
    }
}

/// One draw of the rounding, reproducible from `seed`.
pub fn sample_matching(h: &Hypergraph, x: &FractionalPoint, seed: RngSeed) -> Result<BMatching> {
    let sampler = ClockSampler::new(h, x)?;
    Ok(sampler.sample(&mut seed.rng()))
}

/// Exact `Pr[e ∈ M] = x(e) / (x(e) + x(N(e)))`, and 0 off the support.
pub fn analytic_marginal(h: &Hypergraph, x: &FractionalPoint, e: usize) -> Result<Rational> {
    h.check_edge(e)?;
    require_unit_capacities(h, x)?;
    closed_form(h, x, e)
}

fn closed_form(h: &Hypergraph, x: &FractionalPoint, e: usize) -> Result<Rational> {
    let xe = &x[e];
    if xe.is_zero() {
        return Ok(Rational::zero());
    }
    let rivals = x.sum_over(&h.neighborhood(e)?);
    Ok(xe / (xe + rivals))
}

/// The guaranteed floor `x(e) / g(e)`.
pub fn marginal_lower_bound(h: &Hypergraph, x: &FractionalPoint, e: usize) -> Result<Rational> {
    let size = h.edge_size(e)?;
    require_unit_capacities(h, x)?;
    Ok(&x[e] / guarantee_g(size, &x[e])?)
}

/// Empirical inclusion frequencies over `samples` independent draws.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalEstimate {
    pub samples: u64,
    pub counts: Vec<u64>,
}

impl MarginalEstimate {
    pub fn frequency(&self, e: usize) -> f64 {
        self.counts[e] as f64 / self.samples as f64
    }

    /// `sqrt(p̂(1 − p̂)/N)` with the empirical frequency `p̂`.
    pub fn std_error(&self, e: usize) -> f64 {
        let p = self.frequency(e);
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// Monte Carlo estimate of every edge's inclusion probability.
///
/// Draws are split into replicas of [`SAMPLES_PER_REPLICA`]; replica `k` uses
/// stream `(seed.replica << 32) | k`. Replicas run in parallel and the counts
/// are summed, so the result does not depend on the thread count.
pub fn estimate_marginals(
    h: &Hypergraph,
    x: &FractionalPoint,
    num_samples: u64,
    seed: RngSeed,
) -> Result<MarginalEstimate> {
    if num_samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let sampler = ClockSampler::new(h, x)?;
    let replicas = num_samples.div_ceil(SAMPLES_PER_REPLICA);
    let counts = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let take = SAMPLES_PER_REPLICA.min(num_samples - k * SAMPLES_PER_REPLICA);
            sampler.count_wins(seed.with_replica((seed.replica << 32) | k), take)
        })
        .reduce(
            || vec![0u64; h.num_edges()],
            |mut acc, part| {
                acc.iter_mut().zip(part).for_each(|(a, p)| *a += p);
                acc
            },
        );
    Ok(MarginalEstimate {
        samples: num_samples,
        counts,
    })
}

/// `|freq − p| ≤ k·sqrt(p(1−p)/N)` using the exact marginal `p`.
pub fn within_sigmas(frequency: f64, p: &Rational, samples: u64, k: f64) -> bool {
    let p = rational::to_f64(p);
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    (frequency - p).abs() <= k * sigma
}

/// One CSV row of a marginal report.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalRow {
    pub edge_index: usize,
    pub edge_size: usize,
    pub x: Rational,
    pub analytic_marginal: Rational,
    pub lower_bound: Rational,
    pub frequency: f64,
    pub std_error: f64,
}

pub const MARGINAL_CSV_HEADER: &str =
    "edge_index,edge_size,x,analytic_marginal,lower_bound,frequency,std_error";

impl MarginalRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.edge_index,
            self.edge_size,
            self.x,
            self.analytic_marginal,
            self.lower_bound,
            self.frequency,
            self.std_error
        )
    }
}

pub fn marginal_report(
    h: &Hypergraph,
    x: &FractionalPoint,
    estimate: &MarginalEstimate,
) -> Result<Vec<MarginalRow>> {
    require_unit_capacities(h, x)?;
    (0..h.num_edges())
        .map(|e| {
            Ok(MarginalRow {
                edge_index: e,
                edge_size: h.edge_size(e)?,
                x: x[e].clone(),
                analytic_marginal: closed_form(h, x, e)?,
                lower_bound: &x[e] / guarantee_g(h.edge_size(e)?, &x[e])?,
                frequency: estimate.frequency(e),
                std_error: estimate.std_error(e),
            })
        })
        .collect()
}

pub fn marginal_csv(rows: &[MarginalRow]) -> String {
    let mut out = String::from(MARGINAL_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::is_b_matching;
    use crate::rational::{int, ratio};

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn fano() -> Hypergraph {
        Hypergraph::new(
            7,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![1, 4, 6],
                vec![2, 3, 6],
                vec![2, 4, 5],
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_always_wins() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let x = FractionalPoint::new(vec![int(1)]).unwrap();
        for s in 0..20 {
            assert_eq!(
                sample_matching(&h, &x, RngSeed::new(s)).unwrap().edges(),
                &[0]
            );
        }
        let est = estimate_marginals(&h, &x, 100, RngSeed::new(3)).unwrap();
        assert_eq!(est.frequency(0), 1.0);
        assert_eq!(analytic_marginal(&h, &x, 0).unwrap(), int(1));
    }

    #[test]
    fn zero_point_never_samples() {
        let h = triangle();
        let x = FractionalPoint::zeros(3);
        assert!(sample_matching(&h, &x, RngSeed::new(1)).unwrap().is_empty());
        let est = estimate_marginals(&h, &x, 10, RngSeed::new(1)).unwrap();
        assert!(est.counts.iter().all(|&c| c == 0));
        assert_eq!(marginal_lower_bound(&h, &x, 0).unwrap(), int(0));
    }

    #[test]
    fn triangle_always_has_exactly_one_winner() {
        let h = triangle();
        let x = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        let sampler = ClockSampler::new(&h, &x).unwrap();
        let mut rng = RngSeed::new(11).rng();
        for _ in 0..1000 {
            assert_eq!(sampler.sample(&mut rng).len(), 1);
        }
    }

    #[test]
    fn triangle_and_fano_marginals() {
        let h = triangle();
        let x = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        for e in 0..3 {
            assert_eq!(analytic_marginal(&h, &x, e).unwrap(), ratio(1, 3));
            assert_eq!(marginal_lower_bound(&h, &x, e).unwrap(), ratio(1, 3));
        }
        let f = fano();
        let third = FractionalPoint::uniform(7, ratio(1, 3)).unwrap();
        for e in 0..7 {
            assert_eq!(analytic_marginal(&f, &third, e).unwrap(), ratio(1, 7));
            assert_eq!(marginal_lower_bound(&f, &third, e).unwrap(), ratio(1, 7));
        }
    }

    #[test]
    fn triangle_frequencies_match() {
        let h = triangle();
        let x = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        let n = 1_000_000;
        let est = estimate_marginals(&h, &x, n, RngSeed::new(1)).unwrap();
        assert_eq!(est.counts.iter().sum::<u64>(), n);
        for e in 0..3 {
            assert!(
                within_sigmas(est.frequency(e), &ratio(1, 3), n, 4.0),
                "{est:?}"
            );
        }
    }

    #[test]
    fn ties_are_broken_by_index() {
        let h = triangle();
        let x = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        let sampler = ClockSampler::new(&h, &x).unwrap();
        let tied = ClockRealization {
            clocks: vec![(0.5, 0), (0.5, 1), (0.5, 2)],
        };
        assert_eq!(sampler.winners(&tied).edges(), &[0]);
    }

    #[test]
    fn refuses_infeasible_or_capacitated() {
        let h = triangle();
        let x = FractionalPoint::uniform(3, ratio(2, 3)).unwrap();
        assert!(matches!(
            sample_matching(&h, &x, RngSeed::new(0)),
            Err(Error::InfeasiblePoint { .. })
        ));
        assert!(analytic_marginal(&h, &x, 0).is_err());
        let ok = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        assert!(analytic_marginal(&h, &ok, 5).is_err());
        assert!(matches!(
            estimate_marginals(&h, &ok, 0, RngSeed::new(0)),
            Err(Error::ZeroSamples)
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let h = fano();
        let x = FractionalPoint::uniform(7, ratio(1, 3)).unwrap();
        let a = estimate_marginals(&h, &x, 40_000, RngSeed::new(9)).unwrap();
        let b = estimate_marginals(&h, &x, 40_000, RngSeed::new(9)).unwrap();
        let c = estimate_marginals(&h, &x, 40_000, RngSeed::new(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let s1 = RngSeed::new(4).with_replica(2);
        assert_eq!(
            sample_matching(&h, &x, s1).unwrap(),
            sample_matching(&h, &x, s1).unwrap()
        );
    }

    #[test]
    fn samples_are_matchings() {
        let h = fano();
        let x = FractionalPoint::uniform(7, ratio(1, 3)).unwrap();
        let b = VertexCapacities::unit(7);
        let sampler = ClockSampler::new(&h, &x).unwrap();
        let mut rng = RngSeed::new(5).rng();
        for _ in 0..500 {
            assert!(is_b_matching(&h, &b, sampler.sample(&mut rng).edges()).unwrap());
        }
    }

    #[test]
    fn csv_layout() {
        let h = triangle();
        let x = FractionalPoint::uniform(3, ratio(1, 2)).unwrap();
        let est = MarginalEstimate {
            samples: 4,
            counts: vec![1, 2, 1],
        };
        let csv = marginal_csv(&marginal_report(&h, &x, &est).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], MARGINAL_CSV_HEADER);
        assert_eq!(lines[2], "1,2,1/2,1/3,1/3,0.5,0.25");
    }
}
