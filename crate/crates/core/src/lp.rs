//! Dense two-phase simplex with Bland's rule.
//!
//! Programs are stated as maximizations over variables with optional bounds.
//! Internally every variable is rewritten over nonnegative columns:
//!
//! * `lo ≤ 0 ≤ hi` (either side possibly open): `x = y⁺ − y⁻` with
//!   `y⁺ ≤ hi`, `y⁻ ≤ −lo` as rows;
//! * `lo > 0`: `x = lo + y`, `y ≤ hi − lo`;
//! * `hi < 0`: `x = hi − y`, `y ≤ hi − lo`.
//!
//! The first case keeps box-bounded homogeneous programs (every decision LP
//! in this crate) feasible at the slack basis, so phase one is skipped.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const FREE: Bounds = Bounds {
        lower: None,
        upper: None,
    };
    pub const NONNEG: Bounds = Bounds {
        lower: Some(0.0),
        upper: None,
    };

    pub fn boxed(lower: f64, upper: f64) -> Self {
        Bounds {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

/// `maximize objective · x` subject to the constraints and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    /// A program over `n` free variables with zero objective.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            constraints: Vec::new(),
            bounds: vec![Bounds::FREE; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn bound(&mut self, var: usize, bounds: Bounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        solve(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { solution: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

/// How an original variable is expressed over internal columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = pos − neg`
    Split { pos: usize, neg: usize },
    /// `x = offset + sign · col`
    Shifted { col: usize, offset: f64, sign: f64 },
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    validate(lp)?;
    let n = lp.n_vars();

    // Variable rewriting.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    // Extra rows `col ≤ cap` produced by bounds.
    let mut caps: Vec<(usize, f64)> = Vec::new();
    for b in &lp.bounds {
        let lo = b.lower.unwrap_or(f64::NEG_INFINITY);
        let hi = b.upper.unwrap_or(f64::INFINITY);
        if lo > hi {
            return Ok(LpOutcome::Infeasible);
        }
        if lo <= 0.0 && hi >= 0.0 {
            let (pos, neg) = (ncols, ncols + 1);
            ncols += 2;
            if hi.is_finite() {
                caps.push((pos, hi));
            }
            if lo.is_finite() {
                caps.push((neg, -lo));
            }
            maps.push(VarMap::Split { pos, neg });
        } else if lo > 0.0 {
            let col = ncols;
            ncols += 1;
            if hi.is_finite() {
                caps.push((col, hi - lo));
            }
            maps.push(VarMap::Shifted {
                col,
                offset: lo,
                sign: 1.0,
            });
        } else {
            let col = ncols;
            ncols += 1;
            if lo.is_finite() {
                caps.push((col, hi - lo));
            }
            maps.push(VarMap::Shifted {
                col,
                offset: hi,
                sign: -1.0,
            });
        }
    }
    let n_struct = ncols;

    // Rows over structural columns, with rhs made nonnegative.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &lp.constraints {
        let mut row = vec![0.0; n_struct];
        let mut rhs = c.rhs;
        for (j, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
                VarMap::Shifted { col, offset, sign } => {
                    row[col] += a * sign;
                    rhs -= a * offset;
                }
            }
        }
        rows.push((row, c.relation, rhs));
    }
    for &(col, cap) in &caps {
        let mut row = vec![0.0; n_struct];
        row[col] = 1.0;
        rows.push((row, Relation::Le, cap));
    }
    for (row, rel, rhs) in rows.iter_mut() {
        // `a·y ≥ 0` is `−a·y ≤ 0`, which the slack basis already satisfies.
        if *rhs < 0.0 || (*rhs == 0.0 && *rel == Relation::Ge) {
            row.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let mut obj = vec![0.0; n_struct];
    for (j, &cj) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Split { pos, neg } => {
                obj[pos] += cj;
                obj[neg] -= cj;
            }
            VarMap::Shifted { col, sign, .. } => obj[col] += cj * sign,
        }
    }

    // A program over a box cannot be unbounded.
    let boxed = lp.bounds.iter().all(|b| b.lower.is_some() && b.upper.is_some());
    let mut tab = Tableau::build(&rows, n_struct);
    let iter_limit = 50_000 + 200 * (tab.width() + tab.m);
    let mut iterations = 0usize;

    if tab.n_art > 0 {
        // Phase one: maximize −Σ artificials.
        let mut phase1 = vec![0.0; tab.width()];
        for a in tab.art_start..tab.width() {
            phase1[a] = -1.0;
        }
        tab.set_objective(&phase1);
        if tab.run(&mut iterations, iter_limit, tab.width(), true)?.is_none() {
            return Err(Error::IllFormed("phase one reported an unbounded ray".into()));
        }
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if tab.obj_value < -tol::LP_FEASIBILITY * scale {
            return Ok(LpOutcome::Infeasible);
        }
        tab.expel_artificials();
    }

    let mut phase2 = vec![0.0; tab.width()];
    phase2[..n_struct].copy_from_slice(&obj);
    tab.set_objective(&phase2);
    // Artificial columns may no longer enter.
    let allowed = tab.art_start;
    if tab.run(&mut iterations, iter_limit, allowed, boxed)?.is_none() {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![0.0; tab.width()];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rhs(i).max(0.0);
    }
    let solution: Vec<f64> = maps
        .iter()
        .zip(&lp.bounds)
        .map(|(map, b)| {
            let x = match *map {
                VarMap::Split { pos, neg } => y[pos] - y[neg],
                VarMap::Shifted { col, offset, sign } => offset + sign * y[col],
            };
            // Remove round-off beyond the declared bounds.
            let x = b.lower.map_or(x, |lo| x.max(lo));
            b.upper.map_or(x, |hi| x.min(hi))
        })
        .collect();
    let value = lp.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
    Ok(LpOutcome::Optimal { solution, value })
}

fn validate(lp: &LinearProgram) -> Result<()> {
    let n = lp.n_vars();
    if lp.bounds.len() != n {
        return Err(Error::IllFormed(format!(
            "{} bounds for {n} variables",
            lp.bounds.len()
        )));
    }
    if lp.objective.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllFormed("non-finite objective coefficient".into()));
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::IllFormed(format!(
                "constraint {i} has {} coefficients, expected {n}",
                c.coeffs.len()
            )));
        }
        if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
            return Err(Error::IllFormed(format!("constraint {i} is not finite")));
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if b.lower.is_some_and(|v| v.is_nan() || v == f64::INFINITY)
            || b.upper.is_some_and(|v| v.is_nan() || v == f64::NEG_INFINITY)
        {
            return Err(Error::IllFormed(format!("bad bound on variable {j}")));
        }
    }
    Ok(())
}

/// Row-major dense tableau `[A | b]` with a reduced-cost row.
struct Tableau {
    m: usize,
    /// Columns: structural, then slack/surplus, then artificial.
    n_cols: usize,
    art_start: usize,
    n_art: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    obj_value: f64,
    removed: Vec<bool>,
}

impl Tableau {
    fn build(rows: &[(Vec<f64>, Relation, f64)], n_struct: usize) -> Self {
        let m = rows.len();
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let art_start = n_struct + n_slack;
        let n_cols = art_start + n_art;
        let stride = n_cols + 1;
        let mut data = vec![0.0; m * stride];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (n_struct, art_start);
        for (i, (row, rel, rhs)) in rows.iter().enumerate() {
            let r = &mut data[i * stride..(i + 1) * stride];
            r[..n_struct].copy_from_slice(row);
            r[n_cols] = *rhs;
            match rel {
                Relation::Le => {
                    r[s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    r[s] = -1.0;
                    s += 1;
                    r[a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    r[a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        Tableau {
            m,
            n_cols,
            art_start,
            n_art,
            data,
            basis,
            reduced: vec![0.0; n_cols],
            obj_value: 0.0,
            removed: vec![false; m],
        }
    }

    fn width(&self) -> usize {
        self.n_cols
    }

    fn stride(&self) -> usize {
        self.n_cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.stride() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.stride() + self.n_cols]
    }

    /// Installs cost vector `c` and prices out the current basis.
    fn set_objective(&mut self, c: &[f64]) {
        self.reduced.copy_from_slice(c);
        self.obj_value = 0.0;
        for i in 0..self.m {
            if self.removed[i] {
                continue;
            }
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                let off = i * self.stride();
                for j in 0..self.n_cols {
                    self.reduced[j] -= cb * self.data[off + j];
                }
                self.obj_value += cb * self.data[off + self.n_cols];
            }
        }
    }

    /// Bland iterations on columns `< allowed`. `Ok(None)` means unbounded.
    ///
    /// With `bounded` set the objective is known to be bounded, so a column
    /// with a positive reduced cost but no positive pivot only carries
    /// round-off; it is skipped until the next pivot instead of reported.
    fn run(
        &mut self,
        iterations: &mut usize,
        limit: usize,
        allowed: usize,
        bounded: bool,
    ) -> Result<Option<()>> {
        let mut noise = vec![false; allowed];
        loop {
            let Some(enter) =
                (0..allowed).find(|&j| !noise[j] && self.reduced[j] > tol::LP_PIVOT)
            else {
                return Ok(Some(()));
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if self.removed[i] {
                    continue;
                }
                let a = self.at(i, enter);
                if a > tol::LP_PIVOT {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr || (ratio == lr && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                if bounded {
                    noise[enter] = true;
                    continue;
                }
                return Ok(None);
            };
            noise.iter_mut().for_each(|f| *f = false);
            self.pivot(row, enter);
            *iterations += 1;
            if *iterations > limit {
                return Err(Error::IterationLimit(limit));
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let stride = self.stride();
        let p = self.at(row, col);
        let off = row * stride;
        for j in 0..stride {
            self.data[off + j] /= p;
        }
        self.data[off + col] = 1.0;
        let pivot_row: Vec<f64> = self.data[off..off + stride].to_vec();
        for i in 0..self.m {
            if i == row || self.removed[i] {
                continue;
            }
            let o = i * stride;
            let f = self.data[o + col];
            if f != 0.0 {
                for j in 0..stride {
                    self.data[o + j] -= f * pivot_row[j];
                }
                self.data[o + col] = 0.0;
            }
        }
        let f = self.reduced[col];
        if f != 0.0 {
            for j in 0..self.n_cols {
                self.reduced[j] -= f * pivot_row[j];
            }
            self.reduced[col] = 0.0;
            self.obj_value += f * pivot_row[self.n_cols];
        }
        self.basis[row] = col;
    }

    /// Pivots basic artificials out after phase one; rows where that is
    /// impossible are linearly redundant and dropped.
    fn expel_artificials(&mut self) {
        for i in 0..self.m {
            if self.removed[i] || self.basis[i] < self.art_start {
                continue;
            }
            let col = (0..self.art_start)
                .filter(|&j| self.at(i, j).abs() > tol::LP_PIVOT)
                .max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()));
            match col {
                Some(j) => self.pivot(i, j),
                None => self.removed[i] = true,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable_bound() {
        let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0)
            .constrain(vec![1.0], Relation::Ge, 0.0);
        let out = lp.solve().unwrap();
        assert_eq!(out.status(), LpStatus::Optimal);
        assert!((out.solution().unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Ge, 0.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn contradictory_constraints() {
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 1.0]);
        lp.bound(0, Bounds::boxed(0.0, 1.0))
            .bound(1, Bounds::boxed(0.0, 1.0))
            .constrain(vec![1.0, 1.0], Relation::Le, 1.0)
            .constrain(vec![1.0, 1.0], Relation::Ge, 2.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn equality_and_redundant_rows() {
        // x + y = 2 stated twice, maximize x with x ≤ 1.5.
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 0.0]);
        lp.bound(0, Bounds::NONNEG)
            .bound(1, Bounds::NONNEG)
            .constrain(vec![1.0, 1.0], Relation::Eq, 2.0)
            .constrain(vec![2.0, 2.0], Relation::Eq, 4.0)
            .constrain(vec![1.0, 0.0], Relation::Le, 1.5);
        let out = lp.solve().unwrap();
        assert!((out.value().unwrap() - 1.5).abs() < 1e-12);
        let s = out.solution().unwrap();
        assert!((s[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_bounds_and_shifts() {
        // maximize -x - y over x ∈ [-3, -1], y ∈ [2, 5]: optimum at (-3, 2).
        let mut lp = LinearProgram::new(2).maximize(vec![-1.0, -1.0]);
        lp.bound(0, Bounds::boxed(-3.0, -1.0))
            .bound(1, Bounds::boxed(2.0, 5.0));
        let out = lp.solve().unwrap();
        assert_eq!(out.solution().unwrap(), &[-3.0, 2.0]);
        assert!((out.value().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverted_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.bound(0, Bounds::boxed(1.0, 0.0));
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn ill_formed_inputs() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(Error::IllFormed(_))));
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![f64::NAN], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(Error::IllFormed(_))));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let mut lp = LinearProgram::new(4).maximize(vec![0.75, -150.0, 0.02, -6.0]);
        for j in 0..4 {
            lp.bound(j, Bounds::NONNEG);
        }
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .constrain(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .constrain(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let out = lp.solve().unwrap();
        assert!((out.value().unwrap() - 0.05).abs() < 1e-9);
    }
}
