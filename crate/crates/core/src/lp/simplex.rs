use num_traits::{Signed, Zero};

use super::{FarkasCertificate, LinearProgram, LpOutcome, Relation, Sense};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy)]
enum Origin {
    Row(usize),
    Upper(usize),
}

struct StdRow {
    coefficients: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
    /// -1 when the row was negated to make its right-hand side nonnegative.
    flipped: bool,
    origin: Origin,
}

enum Status {
    Optimal,
    Unbounded(usize),
}

/// Dense tableau `B⁻¹[A | b]` with the basic column of each row.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
    pivots: u64,
    cap: u64,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    /// Reduced profits `c_j − c_B·B⁻¹A_j`.
    fn price(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj = cost.to_vec();
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o -= cb * a;
                }
            }
        }
        obj
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (r, &bv)| {
                acc + &cost[bv] * self.rhs(r)
            })
    }

    fn pivot(&mut self, obj: Option<&mut Vec<Rational>>, r: usize, j: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.cap {
            return Err(Error::IterationCap { cap: self.cap });
        }
        let inv = self.rows[r][j].recip();
        for a in self.rows[r].iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let factor = row[j].clone();
            for (a, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &factor * p;
                }
            }
        }
        if let Some(obj) = obj {
            let factor = obj[j].clone();
            if !factor.is_zero() {
                for (o, p) in obj.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *o -= &factor * p;
                    }
                }
            }
        }
        self.basis[r] = j;
        Ok(())
    }

    /// Maximizes `cost` with Bland's rule over the allowed columns.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<(Status, Vec<Rational>)> {
        let mut obj = self.price(cost);
        loop {
            let Some(j) = (0..self.width).find(|&j| allowed[j] && obj[j].is_positive()) else {
                return Ok((Status::Optimal, obj));
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                None => return Ok((Status::Unbounded(j), obj)),
                Some((r, _)) => self.pivot(Some(&mut obj), r, j)?,
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.width];
        for (r, &bv) in self.basis.iter().enumerate() {
            x[bv] = self.rhs(r).clone();
        }
        x
    }
}

fn pivot_cap(columns: usize) -> u64 {
    10u64 << columns.min(20)
}

/// Solves `lp` exactly. Optimal solutions are basic, hence vertices of the
/// feasible region.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();
    let lower = &lp.lower_bounds;

    let mut std_rows: Vec<StdRow> = Vec::new();
    for (i, c) in lp.constraints.iter().enumerate() {
        let shifted = &c.rhs - super::dot(&c.coefficients, lower);
        std_rows.push(StdRow {
            coefficients: c.coefficients.clone(),
            relation: c.relation,
            rhs: shifted,
            flipped: false,
            origin: Origin::Row(i),
        });
    }
    for (j, u) in lp.upper_bounds.iter().enumerate() {
        if let Some(u) = u {
            let mut coefficients = vec![Rational::zero(); n];
            coefficients[j] = Rational::from_integer(1.into());
            std_rows.push(StdRow {
                coefficients,
                relation: Relation::Le,
                rhs: u - &lower[j],
                flipped: false,
                origin: Origin::Upper(j),
            });
        }
    }
    for row in &mut std_rows {
        if row.rhs.is_negative() {
            row.flipped = true;
            row.rhs = -&row.rhs;
            for a in &mut row.coefficients {
                *a = -&*a;
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Column layout: structural | slacks | artificials.
    let m = std_rows.len();
    let num_slacks = std_rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let num_art = std_rows
        .iter()
        .filter(|r| r.relation != Relation::Le)
        .count();
    let width = n + num_slacks + num_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut initial_col = Vec::with_capacity(m);
    let mut is_art = vec![false; width];
    let (mut next_slack, mut next_art) = (n, n + num_slacks);
    for row in &std_rows {
        let mut t = vec![Rational::zero(); width + 1];
        t[..n].clone_from_slice(&row.coefficients);
        t[width] = row.rhs.clone();
        let basic = match row.relation {
            Relation::Le => {
                t[next_slack] = Rational::from_integer(1.into());
                next_slack += 1;
                next_slack - 1
            }
            Relation::Ge | Relation::Eq => {
                if row.relation == Relation::Ge {
                    t[next_slack] = Rational::from_integer((-1).into());
                    next_slack += 1;
                }
                t[next_art] = Rational::from_integer(1.into());
                is_art[next_art] = true;
                next_art += 1;
                next_art - 1
            }
        };
        rows.push(t);
        basis.push(basic);
        initial_col.push(basic);
    }

    let mut tab = Tableau {
        rows,
        basis,
        width,
        pivots: 0,
        cap: pivot_cap(width),
    };

    if num_art > 0 {
        let cost: Vec<Rational> = is_art
            .iter()
            .map(|&a| Rational::from_integer(if a { -1 } else { 0 }.into()))
            .collect();
        let allowed = vec![true; width];
        let (status, obj) = tab.optimize(&cost, &allowed)?;
        if let Status::Unbounded(_) = status {
            return Err(Error::Internal("phase one cannot be unbounded".into()));
        }
        if tab.value(&cost).is_negative() {
            return Ok(LpOutcome::Infeasible(farkas(
                lp,
                &std_rows,
                &initial_col,
                &cost,
                &obj,
            )));
        }
        drive_out_artificials(&mut tab, &is_art)?;
    }

    let mut cost = vec![Rational::zero(); width];
    for (c, o) in cost.iter_mut().zip(&lp.objective) {
        *c = match lp.sense {
            Sense::Maximize => o.clone(),
            Sense::Minimize => -o,
        };
    }
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    let (status, _) = tab.optimize(&cost, &allowed)?;
    let shifted = tab.primal();
    let point: Vec<Rational> = shifted[..n].iter().zip(lower).map(|(x, l)| x + l).collect();
    match status {
        Status::Optimal => {
            let value = lp.objective_value(&point);
            Ok(LpOutcome::Optimal {
                solution: point,
                value,
            })
        }
        Status::Unbounded(j) => {
            let mut direction = vec![Rational::zero(); width];
            direction[j] = Rational::from_integer(1.into());
            for (r, &bv) in tab.basis.iter().enumerate() {
                direction[bv] = -&tab.rows[r][j];
            }
            direction.truncate(n);
            Ok(LpOutcome::Unbounded {
                point,
                ray: direction,
            })
        }
    }
}

/// Pivots basic artificials (all at level zero) out of the basis, dropping
/// rows that turn out to be redundant.
fn drive_out_artificials(tab: &mut Tableau, is_art: &[bool]) -> Result<()> {
    let mut r = 0;
    while r < tab.rows.len() {
        if !is_art[tab.basis[r]] {
            r += 1;
            continue;
        }
        match (0..tab.width).find(|&j| !is_art[j] && !tab.rows[r][j].is_zero()) {
            Some(j) => {
                tab.pivot(None, r, j)?;
                r += 1;
            }
            None => {
                tab.rows.remove(r);
                tab.basis.remove(r);
            }
        }
    }
    Ok(())
}

/// Reads phase-one duals `π_r = c_j − d_j` off each row's initial basic
/// column and maps them back onto the caller's rows in `≤` form.
fn farkas(
    lp: &LinearProgram,
    std_rows: &[StdRow],
    initial_col: &[usize],
    cost: &[Rational],
    obj: &[Rational],
) -> FarkasCertificate {
    let mut row_multipliers = vec![Rational::zero(); lp.constraints.len()];
    let mut upper_bound_multipliers = vec![Rational::zero(); lp.num_vars()];
    for (row, &col) in std_rows.iter().zip(initial_col) {
        let dual = &cost[col] - &obj[col];
        let flip_sign = if row.flipped { -dual } else { dual };
        match row.origin {
            Origin::Row(i) => {
                row_multipliers[i] = match lp.constraints[i].relation {
                    Relation::Ge => -flip_sign,
                    Relation::Le | Relation::Eq => flip_sign,
                };
            }
            Origin::Upper(j) => upper_bound_multipliers[j] = flip_sign,
        }
    }
    FarkasCertificate {
        row_multipliers,
        upper_bound_multipliers,
    }
}
