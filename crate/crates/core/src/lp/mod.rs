//! Exact rational linear programming.
//!
//! [`solve`] runs a two-phase primal simplex on a dense tableau with Bland's
//! pivot rule. Every outcome carries something checkable: an optimal basic
//! solution, a Farkas certificate of infeasibility, or an improving ray.

mod matching;
mod simplex;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use matching::{solve_fractional_bmatching, tight_vertices, MatchingLpSolution};
pub use simplex::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn activity(&self, x: &[Rational]) -> Rational {
        dot(&self.coefficients, x)
    }

    fn holds(&self, x: &[Rational]) -> bool {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// `optimize c·x` subject to rows `a·x (≤|≥|=) b` and `l ≤ x ≤ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Rational>,
    pub upper_bounds: Vec<Option<Rational>>,
}

impl LinearProgram {
    /// A program with the given objective, no rows, and bounds `0 ≤ x`.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![Rational::zero(); n],
            upper_bounds: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn set_upper_bound(&mut self, var: usize, bound: Rational) {
        self.upper_bounds[var] = Some(bound);
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n || self.upper_bounds.len() != n {
            return Err(Error::MalformedLp(format!(
                "bound vectors have lengths {}/{} but there are {n} variables",
                self.lower_bounds.len(),
                self.upper_bounds.len()
            )));
        }
        if let Some(i) = self
            .constraints
            .iter()
            .position(|c| c.coefficients.len() != n)
        {
            return Err(Error::MalformedLp(format!(
                "row {i} has {} coefficients, expected {n}",
                self.constraints[i].coefficients.len()
            )));
        }
        Ok(())
    }

    /// Exact check of every row and bound.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.constraints.iter().all(|c| c.holds(x))
            && x.iter().zip(&self.lower_bounds).all(|(v, l)| v >= l)
            && x.iter()
                .zip(&self.upper_bounds)
                .all(|(v, u)| u.as_ref().is_none_or(|u| v <= u))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        solution: Vec<Rational>,
        value: Rational,
    },
    Infeasible(FarkasCertificate),
    Unbounded {
        /// A feasible point from which `ray` improves without bound.
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

/// Multipliers proving a [`LinearProgram`] has no feasible point.
///
/// Each row is read in `≤` form (`≥` rows are negated). `row_multipliers[i]`
/// is nonnegative for inequality rows and free for equality rows;
/// `upper_bound_multipliers[j]` weights the row `x_j ≤ u_j`. The aggregate
/// `c·x ≤ d` has `c ≥ 0`, so over `x ≥ l` it forces `c·l ≤ d`; a valid
/// certificate has `d < c·l`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub row_multipliers: Vec<Rational>,
    pub upper_bound_multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    /// Aggregated coefficients `c` and right-hand side `d`.
    pub fn aggregate(&self, lp: &LinearProgram) -> (Vec<Rational>, Rational) {
        let n = lp.num_vars();
        let mut coeffs = vec![Rational::zero(); n];
        let mut rhs = Rational::zero();
        for (row, y) in lp.constraints.iter().zip(&self.row_multipliers) {
            let scale = match row.relation {
                Relation::Ge => -y,
                Relation::Le | Relation::Eq => y.clone(),
            };
            for (c, a) in coeffs.iter_mut().zip(&row.coefficients) {
                *c += &scale * a;
            }
            rhs += &scale * &row.rhs;
        }
        for (j, z) in self.upper_bound_multipliers.iter().enumerate() {
            if let Some(u) = &lp.upper_bounds[j] {
                coeffs[j] += z;
                rhs += z * u;
            }
        }
        (coeffs, rhs)
    }

    /// Exact verification against `lp`.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if self.row_multipliers.len() != lp.constraints.len()
            || self.upper_bound_multipliers.len() != lp.num_vars()
        {
            return false;
        }
        let signs_ok = lp
            .constraints
            .iter()
            .zip(&self.row_multipliers)
            .all(|(row, y)| row.relation == Relation::Eq || !y.is_negative());
        let bounds_ok = self
            .upper_bound_multipliers
            .iter()
            .zip(&lp.upper_bounds)
            .all(|(z, u)| !z.is_negative() && (u.is_some() || z.is_zero()));
        if !signs_ok || !bounds_ok {
            return false;
        }
        let (coeffs, rhs) = self.aggregate(lp);
        coeffs.iter().all(|c| !c.is_negative()) && rhs < dot(&coeffs, &lp.lower_bounds)
    }
}

/// Exact check that `ray` is a recession direction that improves the objective.
pub fn verify_ray(lp: &LinearProgram, ray: &[Rational]) -> bool {
    if ray.len() != lp.num_vars() {
        return false;
    }
    let rows_ok = lp.constraints.iter().all(|c| {
        let a = c.activity(ray);
        match c.relation {
            Relation::Le => !a.is_positive(),
            Relation::Ge => !a.is_negative(),
            Relation::Eq => a.is_zero(),
        }
    });
    let bounds_ok = ray
        .iter()
        .zip(&lp.upper_bounds)
        .all(|(r, u)| !r.is_negative() && (u.is_none() || r.is_zero()));
    let gain = lp.objective_value(ray);
    let improving = match lp.sense {
        Sense::Maximize => gain.is_positive(),
        Sense::Minimize => gain.is_negative(),
    };
    rows_ok && bounds_ok && improving
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}
