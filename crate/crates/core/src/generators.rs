//! Instance generators: projective planes and random non-uniform hypergraphs.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeWeights, FractionalPoint, Hypergraph, VertexCapacities};
use crate::instance::Instance;
use crate::rational::{self, Rational};

/// Largest projective-plane order the generator builds.
pub const MAX_PLANE_ORDER: u32 = 7;

/// The Fano plane with its usual line labelling, unit weights and capacities.
pub fn gen_fano() -> Instance {
    let lines = vec![
        vec![0, 1, 2],
        vec![0, 3, 4],
        vec![0, 5, 6],
        vec![1, 3, 5],
        vec![1, 4, 6],
        vec![2, 3, 6],
        vec![2, 4, 5],
    ];
    Instance::unweighted(Hypergraph::new(7, lines).expect("fano plane is well formed"))
}

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Normalized representatives of the 1-dimensional subspaces of `GF(q)^3`
/// (first nonzero coordinate equal to 1).
fn projective_points(q: u32) -> Vec<[u32; 3]> {
    let mut points = Vec::new();
    for a in 0..q {
        for b in 0..q {
            points.push([1, a, b]);
        }
    }
    for b in 0..q {
        points.push([0, 1, b]);
    }
    points.push([0, 0, 1]);
    points
}

/// `PG(2, q)` for prime `q ≤ 7`: `q²+q+1` points and as many lines of size `q+1`.
///
/// Lines are indexed by the same representatives as points; point `p` lies on
/// line `l` iff `p·l ≡ 0 (mod q)`.
pub fn gen_projective_plane(q: u32) -> Result<Instance> {
    if !is_prime(q) {
        return Err(Error::InvalidConfig(format!(
            "plane order {q} is not prime"
        )));
    }
    if q > MAX_PLANE_ORDER {
        return Err(Error::InvalidConfig(format!(
            "plane order {q} exceeds the limit of {MAX_PLANE_ORDER}"
        )));
    }
    let points = projective_points(q);
    let lines = points
        .iter()
        .map(|l| {
            points
                .iter()
                .enumerate()
                .filter(|(_, p)| (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % q == 0)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    Ok(Instance::unweighted(Hypergraph::new(points.len(), lines)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightDistribution {
    Unit,
    /// Integer weights uniform in `low..=high`.
    UniformInt {
        low: u64,
        high: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub min_edge_size: usize,
    pub max_edge_size: usize,
    pub weights: WeightDistribution,
    /// Capacities are drawn uniformly from `1..=max_capacity`.
    pub max_capacity: u32,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(num_vertices: usize, num_edges: usize, sizes: (usize, usize), seed: u64) -> Self {
        Self {
            num_vertices,
            num_edges,
            min_edge_size: sizes.0,
            max_edge_size: sizes.1,
            weights: WeightDistribution::Unit,
            max_capacity: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_vertices == 0 {
            return bad("num_vertices must be positive".into());
        }
        if self.min_edge_size == 0 || self.min_edge_size > self.max_edge_size {
            return bad(format!(
                "edge size range {}..={} is empty or includes 0",
                self.min_edge_size, self.max_edge_size
            ));
        }
        if self.max_edge_size > self.num_vertices {
            return bad(format!(
                "max edge size {} exceeds num_vertices {}",
                self.max_edge_size, self.num_vertices
            ));
        }
        if self.max_capacity == 0 {
            return bad("max_capacity must be at least 1".into());
        }
        if let WeightDistribution::UniformInt { low, high } = self.weights {
            if low > high {
                return bad(format!("weight range {low}..={high} is empty"));
            }
        }
        Ok(())
    }
}

/// A random instance, reproducible from `config.seed`. Parallel and nested
/// edges may occur.
pub fn gen_random(config: &GeneratorConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut edges = Vec::with_capacity(config.num_edges);
    let mut weights = Vec::with_capacity(config.num_edges);
    for _ in 0..config.num_edges {
        let size = rng.random_range(config.min_edge_size..=config.max_edge_size);
        edges.push(index::sample(&mut rng, config.num_vertices, size).into_vec());
        weights.push(match config.weights {
            WeightDistribution::Unit => rational::one(),
            WeightDistribution::UniformInt { low, high } => {
                Rational::from_integer(rng.random_range(low..=high).into())
            }
        });
    }
    let capacities = (0..config.num_vertices)
        .map(|_| rng.random_range(1..=config.max_capacity))
        .collect();
    Instance::new(
        Hypergraph::new(config.num_vertices, edges)?,
        EdgeWeights::new(weights)?,
        VertexCapacities::new(capacities)?,
    )
}

/// A random fractional b-matching by rejection sampling.
///
/// Candidates have entries `k / (denominator·2^t)` with `k` uniform in
/// `0..=denominator`, starting at `t = 0`; infeasible candidates are rejected,
/// and after `tries_per_scale` rejections `t` grows by one. Once `2^t` reaches
/// the maximum vertex degree every candidate is feasible, so this always
/// terminates.
pub fn random_feasible_point<R: Rng + ?Sized>(
    h: &Hypergraph,
    b: &VertexCapacities,
    rng: &mut R,
    denominator: u32,
    tries_per_scale: u32,
) -> Result<FractionalPoint> {
    if b.len() != h.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "capacities",
            expected: h.num_vertices(),
            found: b.len(),
        });
    }
    let denominator = u64::from(denominator.max(1));
    let mut numerators = vec![0u64; h.num_edges()];
    let mut loads = vec![0u64; h.num_vertices()];
    for shift in 0u32.. {
        let common = denominator << shift;
        for _ in 0..tries_per_scale.max(1) {
            numerators
                .iter_mut()
                .for_each(|k| *k = rng.random_range(0..=denominator));
            loads.iter_mut().for_each(|l| *l = 0);
            for (edge, &k) in h.edges().iter().zip(&numerators) {
                for &v in edge {
                    loads[v] += k;
                }
            }
            // x(δ(v)) ≤ b(v)  ⇔  Σ k ≤ b(v)·denominator·2^shift
            if loads
                .iter()
                .enumerate()
                .all(|(v, &l)| l <= u64::from(b[v]) * common)
            {
                let values = numerators
                    .iter()
                    .map(|&k| Rational::new(k.into(), common.into()))
                    .collect();
                return FractionalPoint::new(values);
            }
        }
    }
    unreachable!("the shift loop only ends by returning")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{is_fractional_b_matching, FractionalPoint};
    use crate::lp::solve_fractional_bmatching;
    use crate::oracles::brute_force_max_bmatching;
    use crate::rational::{int, ratio};

    fn check_plane(inst: &Instance, q: usize) {
        let h = &inst.hypergraph;
        let n = q * q + q + 1;
        assert_eq!(h.num_vertices(), n);
        assert_eq!(h.num_edges(), n);
        assert!(h.edges().iter().all(|e| e.len() == q + 1));
        for v in 0..n {
            assert_eq!(h.incident_edges(v).unwrap().len(), q + 1);
        }
        for (i, a) in h.edges().iter().enumerate() {
            for b in &h.edges()[i + 1..] {
                assert_eq!(a.iter().filter(|v| b.contains(v)).count(), 1);
            }
        }
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn fano_structure() {
        check_plane(&gen_fano(), 2);
    }

    #[test]
    fn pg2_is_fano() {
        let pg = gen_projective_plane(2).unwrap();
        check_plane(&pg, 2);
        let mut target: Vec<Vec<usize>> = gen_fano().hypergraph.edges().to_vec();
        target.sort();
        let found = permutations(7).into_iter().any(|perm| {
            let mut mapped: Vec<Vec<usize>> = pg
                .hypergraph
                .edges()
                .iter()
                .map(|e| {
                    let mut m: Vec<usize> = e.iter().map(|&v| perm[v]).collect();
                    m.sort();
                    m
                })
                .collect();
            mapped.sort();
            mapped == target
        });
        assert!(found, "no isomorphism onto the fano plane");
    }

    #[test]
    fn planes_of_prime_order() {
        for q in [3usize, 5, 7] {
            check_plane(&gen_projective_plane(q as u32).unwrap(), q);
        }
        for bad in [0, 1, 4, 9, 11] {
            assert!(gen_projective_plane(bad).is_err());
        }
    }

    #[test]
    fn uniform_point_value_is_k_minus_one_plus_one_over_k() {
        for q in [2i64, 3, 5, 7] {
            let inst = gen_projective_plane(q as u32).unwrap();
            let k = q + 1;
            let x = FractionalPoint::uniform(inst.hypergraph.num_edges(), ratio(1, k)).unwrap();
            let value = crate::hypergraph::lp_value(&inst.weights, &x).unwrap();
            assert_eq!(value, ratio(q * q + q + 1, k));
            assert_eq!(value, int(k - 1) + ratio(1, k));
        }
    }

    #[test]
    fn fano_gap() {
        let inst = gen_fano();
        let lp =
            solve_fractional_bmatching(&inst.hypergraph, &inst.weights, &inst.capacities).unwrap();
        let (_, best) =
            brute_force_max_bmatching(&inst.hypergraph, &inst.weights, &inst.capacities).unwrap();
        assert_eq!(lp.value, ratio(7, 3));
        assert_eq!(best, int(1));
    }

    #[test]
    fn random_instances() {
        let empty = gen_random(&GeneratorConfig::new(5, 0, (1, 2), 1)).unwrap();
        assert_eq!(empty.hypergraph.num_edges(), 0);

        let cfg = GeneratorConfig::new(8, 12, (2, 4), 7);
        let a = gen_random(&cfg).unwrap();
        assert_eq!(a, gen_random(&cfg).unwrap());
        assert!(a
            .hypergraph
            .edges()
            .iter()
            .all(|e| (2..=4).contains(&e.len())));
        assert_eq!(Instance::from_json(&a.to_json()).unwrap(), a);

        let weighted = GeneratorConfig {
            weights: WeightDistribution::UniformInt { low: 1, high: 9 },
            max_capacity: 3,
            ..cfg
        };
        let b = gen_random(&weighted).unwrap();
        assert!(b
            .weights
            .as_slice()
            .iter()
            .all(|w| *w >= int(1) && *w <= int(9)));
        assert!(b.capacities.as_slice().iter().all(|c| (1..=3).contains(c)));
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            GeneratorConfig::new(0, 1, (1, 1), 0),
            GeneratorConfig::new(3, 1, (0, 2), 0),
            GeneratorConfig::new(3, 1, (3, 2), 0),
            GeneratorConfig::new(3, 1, (2, 4), 0),
        ] {
            assert!(gen_random(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn feasible_points_are_feasible() {
        let inst = gen_random(&GeneratorConfig {
            max_capacity: 3,
            ..GeneratorConfig::new(8, 14, (2, 4), 3)
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let x =
                random_feasible_point(&inst.hypergraph, &inst.capacities, &mut rng, 12, 4).unwrap();
            assert!(is_fractional_b_matching(&inst.hypergraph, &inst.capacities, &x).unwrap());
        }
    }
}
