//! Vertex enumeration for small polytopes given by exact linear constraints.
//!
//! A vertex is a feasible point where the equalities plus some subset of the
//! inequalities form a nonsingular square system. Every such subset is tried,
//! which is fine for the handful of variables the oracle produces.

use crate::lp::{LinearConstraint, Sense};
use crate::rational::Rational;

/// Solves `rows * x = rhs` by Gauss-Jordan elimination. Returns `None` if
/// the system is inconsistent or does not pin down a unique solution.
pub fn solve_unique(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>, n: usize) -> Option<Vec<Rational>> {
    let m = rows.len();
    let mut pivot_row = 0;
    let mut pivot_cols = Vec::with_capacity(n);
    for col in 0..n {
        let Some(p) = (pivot_row..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for v in rows[pivot_row].iter_mut() {
            *v *= &inv;
        }
        rhs[pivot_row] *= &inv;
        let prow = rows[pivot_row].clone();
        let prhs = rhs[pivot_row].clone();
        for r in 0..m {
            if r == pivot_row || rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            for (v, p) in rows[r].iter_mut().zip(&prow) {
                *v -= &(&f * p);
            }
            rhs[r] -= &(&f * &prhs);
        }
        pivot_cols.push(col);
        pivot_row += 1;
    }
    if rhs[pivot_row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    if pivot_cols.len() < n {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = rhs[r].clone();
    }
    Some(x)
}

fn rank(rows: &[Vec<Rational>], n: usize) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let prow = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &prow[col];
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= &(&f * p);
            }
        }
        rank += 1;
    }
    rank
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Vertices of `{x : constraints}` in `n` dimensions, sorted and deduplicated.
/// Nonnegativity is not implied; include it explicitly if needed.
pub fn vertices(n: usize, constraints: &[LinearConstraint]) -> Vec<Vec<Rational>> {
    let (eqs, ineqs): (Vec<&LinearConstraint>, Vec<&LinearConstraint>) =
        constraints.iter().partition(|c| c.sense == Sense::Eq);
    let eq_rows: Vec<Vec<Rational>> = eqs.iter().map(|c| c.coeffs.clone()).collect();
    let eq_rank = rank(&eq_rows, n);
    let need = n - eq_rank.min(n);
    let mut found = Vec::new();
    combinations(ineqs.len(), need, |subset| {
        let mut rows = eq_rows.clone();
        let mut rhs: Vec<Rational> = eqs.iter().map(|c| c.rhs.clone()).collect();
        for &i in subset {
            rows.push(ineqs[i].coeffs.clone());
            rhs.push(ineqs[i].rhs.clone());
        }
        if let Some(x) = solve_unique(rows, rhs, n) {
            if constraints.iter().all(|c| c.is_satisfied(&x)) {
                found.push(x);
            }
        }
    });
    found.sort();
    found.dedup();
    found
}
