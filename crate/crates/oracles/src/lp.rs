//! Vertex-enumeration oracle for small box-bounded linear programs.
//!
//! Every basic solution is formed by choosing `n` active hyperplanes out of
//! the constraint rows and the `2n` bound planes, solving the square system
//! and keeping the feasible ones. With finite box bounds the feasible region
//! is a polytope, so it is either empty or attains its maximum at a vertex.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleRelation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct OracleConstraint {
    pub row: Vec<f64>,
    pub relation: OracleRelation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Infeasible,
    Optimal { value: f64, point: Vec<f64> },
}

const FEAS_TOL: f64 = 1e-9;

/// Maximizes `objective · x` over `lower ≤ x ≤ upper` and the constraints.
pub fn vertex_enumeration(
    objective: &[f64],
    constraints: &[OracleConstraint],
    lower: &[f64],
    upper: &[f64],
) -> OracleOutcome {
    let n = objective.len();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);

    // Hyperplanes: constraint rows first, then x_j = lower_j, x_j = upper_j.
    let mut planes: Vec<(Vec<f64>, f64)> = constraints
        .iter()
        .map(|c| (c.row.clone(), c.rhs))
        .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lower[j]));
        planes.push((e, upper[j]));
    }
    let feasible = |x: &[f64]| -> bool {
        for j in 0..n {
            if x[j] < lower[j] - FEAS_TOL || x[j] > upper[j] + FEAS_TOL {
                return false;
            }
        }
        constraints.iter().all(|c| {
            let lhs: f64 = c.row.iter().zip(x).map(|(a, b)| a * b).sum();
            let scale = 1.0 + c.rhs.abs();
            match c.relation {
                OracleRelation::Le => lhs <= c.rhs + FEAS_TOL * scale,
                OracleRelation::Ge => lhs >= c.rhs - FEAS_TOL * scale,
                OracleRelation::Eq => (lhs - c.rhs).abs() <= FEAS_TOL * scale,
            }
        })
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut chosen = Vec::with_capacity(n);
    for_each_combination(planes.len(), n, &mut chosen, &mut |subset| {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                let v: f64 = objective.iter().zip(&x).map(|(c, x)| c * x).sum();
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, x));
                }
            }
        }
    });
    match best {
        Some((value, point)) => OracleOutcome::Optimal { value, point },
        None => OracleOutcome::Infeasible,
    }
}

fn for_each_combination(
    total: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    let start = chosen.last().map_or(0, |&i| i + 1);
    let remaining = k - chosen.len();
    for i in start..=total.saturating_sub(remaining) {
        if i >= total {
            break;
        }
        chosen.push(i);
        for_each_combination(total, k, chosen, visit);
        chosen.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-11 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}
