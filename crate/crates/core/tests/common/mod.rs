#![allow(dead_code)]

//! Shared generators and an independent brute-force mediated optimum.
//!
//! The oracle below shares no code with the library's simplex or polytope
//! modules: it rebuilds the incentive constraints from the utility tables and
//! enumerates basic solutions with its own elimination over `BigRational`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use vom_core::{Game, Rational, Table, Welfare};

pub fn small_rat() -> impl Strategy<Value = Rational> + Clone {
    (-6i64..=6, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
}

pub fn nonneg_rat() -> impl Strategy<Value = Rational> + Clone {
    (0i64..=6, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
}

pub fn table(rows: usize, cols: usize, cell: impl Strategy<Value = Rational> + Clone) -> impl Strategy<Value = Table> {
    prop::collection::vec(prop::collection::vec(cell, cols), rows)
}

pub fn prior(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i64..=5, n).prop_map(|w| {
        let total: i64 = w.iter().sum();
        w.iter().map(|&x| Rational::new(x, total)).collect()
    })
}

pub fn game(types: std::ops::RangeInclusive<usize>, actions: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Game> {
    (types, actions).prop_flat_map(|(n, m)| {
        (prior(n), table(n, m, small_rat()), table(n, m, small_rat()))
            .prop_map(|(q, us, ur)| Game::unlabeled(q, us, ur).expect("generated game is valid"))
    })
}

/// Games whose utilities are all nonnegative, so `u_s`/`u_r` are welfare tables.
pub fn nonneg_game(types: std::ops::RangeInclusive<usize>, actions: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Game> {
    (types, actions).prop_flat_map(|(n, m)| {
        (prior(n), table(n, m, nonneg_rat()), table(n, m, nonneg_rat()))
            .prop_map(|(q, us, ur)| Game::unlabeled(q, us, ur).expect("generated game is valid"))
    })
}

pub fn game_with_welfare(
    types: std::ops::RangeInclusive<usize>,
    actions: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Game, Welfare)> {
    game(types, actions).prop_flat_map(|g| {
        let (n, m) = (g.num_types(), g.num_actions());
        table(n, m, nonneg_rat()).prop_map(move |w| {
            let welfare = Welfare::new(&g, w).expect("nonnegative");
            (g.clone(), welfare)
        })
    })
}

fn big(r: &Rational) -> BigRational {
    r.as_big().clone()
}

type Rows = Vec<(Vec<BigRational>, BigRational)>;

/// Rows `a . x >= b` (inequalities) and `a . x = b` (equalities) of the
/// mediated equilibrium polytope, with `x[t * m + a] = mu(a | t)`.
fn mediated_system(game: &Game) -> (Rows, Rows) {
    let (n, m) = (game.num_types(), game.num_actions());
    let idx = |t: usize, a: usize| t * m + a;
    let zero = || vec![BigRational::zero(); n * m];
    let mut ge = Vec::new();
    let mut eq = Vec::new();
    for t in 0..n {
        for r in 0..n {
            if t == r {
                continue;
            }
            // type t reporting t instead of r
            let mut row = zero();
            for a in 0..m {
                row[idx(t, a)] += big(game.u_s(t, a));
                row[idx(r, a)] -= big(game.u_s(t, a));
            }
            ge.push((row, BigRational::zero()));
        }
    }
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            let mut row = zero();
            for t in 0..n {
                row[idx(t, a)] = big(&game.prior()[t]) * (big(game.u_r(t, a)) - big(game.u_r(t, b)));
            }
            ge.push((row, BigRational::zero()));
        }
    }
    for v in 0..n * m {
        let mut row = zero();
        row[v] = BigRational::one();
        ge.push((row, BigRational::zero()));
    }
    for t in 0..n {
        let mut row = zero();
        for a in 0..m {
            row[idx(t, a)] = BigRational::one();
        }
        eq.push((row, BigRational::one()));
    }
    (ge, eq)
}

fn solve(mut rows: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>, n: usize) -> Option<Vec<BigRational>> {
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
                let d = &f * &rhs[r];
                rhs[i] -= d;
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    if pivots.len() < n || rhs[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, c) in pivots {
        x[c] = &rhs[r] / &rows[r][c];
    }
    Some(x)
}

fn subsets(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f);
}

fn dot(a: &[BigRational], x: &[BigRational]) -> BigRational {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

/// Maximum welfare over mediated equilibrium outcomes, by enumerating every
/// basic feasible solution. Only for tiny games.
pub fn brute_force_mediated_max(game: &Game, welfare: &Welfare) -> Rational {
    let (n, m) = (game.num_types(), game.num_actions());
    let dim = n * m;
    let (ge, eq) = mediated_system(game);
    let objective: Vec<BigRational> = (0..n)
        .flat_map(|t| (0..m).map(move |a| (t, a)))
        .map(|(t, a)| big(&game.prior()[t]) * big(welfare.get(t, a)))
        .collect();
    // The n stochasticity rows are independent.
    let need = dim - n;
    let mut best: Option<BigRational> = None;
    subsets(ge.len(), need, &mut |s| {
        let mut rows: Vec<Vec<BigRational>> = eq.iter().map(|e| e.0.clone()).collect();
        let mut rhs: Vec<BigRational> = eq.iter().map(|e| e.1.clone()).collect();
        for &i in s {
            rows.push(ge[i].0.clone());
            rhs.push(ge[i].1.clone());
        }
        if let Some(x) = solve(rows, rhs, dim) {
            if ge.iter().all(|(a, b)| dot(a, &x) >= *b) {
                let v = dot(&objective, &x);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    });
    Rational::from_big(best.expect("babbling is always feasible"))
}
