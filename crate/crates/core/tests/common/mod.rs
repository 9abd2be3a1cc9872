//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use hypermatch::rational::{self, Rational};
use hypermatch::{FractionalPoint, Hypergraph, VertexCapacities};
use num_traits::{One, Signed, Zero};

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a -= &f * b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves a square system, `None` if singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
                let bc = b[c].clone();
                b[r] -= &f * bc;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// All inequality rows `a·x ≤ β` of the fractional b-matching polytope.
pub fn polytope_rows(h: &Hypergraph, b: &VertexCapacities) -> Vec<(Vec<Rational>, Rational)> {
    let m = h.num_edges();
    let mut rows = Vec::new();
    for v in 0..h.num_vertices() {
        let mut a = vec![Rational::zero(); m];
        for &e in h.incident_edges(v).unwrap() {
            a[e] = Rational::one();
        }
        rows.push((a, rational::int(b[v] as i64)));
    }
    for e in 0..m {
        let mut up = vec![Rational::zero(); m];
        up[e] = Rational::one();
        rows.push((up.clone(), Rational::one()));
        let down = up.into_iter().map(|v| -v).collect();
        rows.push((down, Rational::zero()));
    }
    rows
}

/// Every vertex of the fractional b-matching polytope, by solving all
/// `m`-subsets of rows as equalities.
pub fn polytope_vertices(h: &Hypergraph, b: &VertexCapacities) -> Vec<Vec<Rational>> {
    let m = h.num_edges();
    let rows = polytope_rows(h, b);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for subset in combinations(rows.len(), m) {
        let a = subset.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs = subset.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(x) = solve_square(a, rhs) {
            let feasible = rows.iter().all(|(a, beta)| {
                a.iter()
                    .zip(&x)
                    .fold(Rational::zero(), |s, (p, q)| s + p * q)
                    <= *beta
            });
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// True iff the active rows at `x` have full rank `|E|`.
pub fn is_extreme_point(h: &Hypergraph, b: &VertexCapacities, x: &FractionalPoint) -> bool {
    let active: Vec<Vec<Rational>> = polytope_rows(h, b)
        .into_iter()
        .filter(|(a, beta)| {
            a.iter()
                .zip(x.as_slice())
                .fold(Rational::zero(), |s, (p, q)| s + p * q)
                == *beta
        })
        .map(|(a, _)| a)
        .collect();
    h.num_edges() == 0 || rank(active) == h.num_edges()
}

pub fn nonnegative(v: &Rational) -> bool {
    !v.is_negative()
}
