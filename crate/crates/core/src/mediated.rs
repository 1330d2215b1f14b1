//! Canonical mediated equilibria.
//!
//! In the canonical protocol the sender reports its type to the mediator, the
//! mediator draws an action from the outcome row of the reported type and
//! suggests it to the receiver, and the receiver plays the suggestion. The
//! profile is an equilibrium iff two families of linear inequalities hold:
//!
//! * truthfulness: no type gains by reporting another type;
//! * obedience: conditional on any suggestion, the receiver does not gain by
//!   playing a different action.
//!
//! Outcome entries are the LP variables (row-major, `type * |A| + action`).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{Game, Outcome, Welfare};
use crate::lp::{LinearProgram, LpOutcome, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintLabel {
    /// Type `from` prefers reporting truthfully over reporting `to`.
    Truthfulness { from: usize, to: usize },
    /// When `recommended` is suggested, playing it beats playing `played`.
    Obedience { recommended: usize, played: usize },
    /// Row `type_index` of the outcome sums to one.
    Stochasticity { type_index: usize },
}

impl ConstraintLabel {
    pub fn is_incentive(&self) -> bool {
        !matches!(self, ConstraintLabel::Stochasticity { .. })
    }
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintLabel::Truthfulness { from, to } => write!(f, "truthfulness({from}->{to})"),
            ConstraintLabel::Obedience {
                recommended,
                played,
            } => write!(f, "obedience({recommended}->{played})"),
            ConstraintLabel::Stochasticity { type_index } => {
                write!(f, "stochasticity({type_index})")
            }
        }
    }
}

impl Serialize for ConstraintLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub label: ConstraintLabel,
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub bound: Rational,
}

impl Constraint {
    pub fn slack(&self, x: &[Rational]) -> Rational {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        lhs - &self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub num_types: usize,
    pub num_actions: usize,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn num_variables(&self) -> usize {
        self.num_types * self.num_actions
    }

    pub fn variable(&self, type_index: usize, action: usize) -> usize {
        type_index * self.num_actions + action
    }

    pub fn incentive_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.label.is_incentive())
    }

    pub fn count(&self, pred: impl Fn(&ConstraintLabel) -> bool) -> usize {
        self.constraints.iter().filter(|c| pred(&c.label)).count()
    }

    /// LP over outcome entries with the given objective.
    pub fn to_lp(&self, objective: Vec<Rational>) -> LinearProgram {
        let mut lp = LinearProgram::new(objective);
        for c in &self.constraints {
            lp.add_constraint(c.coeffs.clone(), c.sense, c.bound.clone());
        }
        lp
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlackEntry {
    pub label: ConstraintLabel,
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "labels", rename_all = "snake_case")]
pub enum Verdict {
    Equilibrium,
    Violated(Vec<ConstraintLabel>),
}

/// Slack of every truthfulness and obedience constraint at an outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumCertificate {
    pub slacks: Vec<SlackEntry>,
    pub verdict: Verdict,
}

impl EquilibriumCertificate {
    fn from_slacks(slacks: Vec<SlackEntry>) -> Self {
        let violated: Vec<ConstraintLabel> = slacks
            .iter()
            .filter(|e| e.slack.is_negative())
            .map(|e| e.label)
            .collect();
        let verdict = if violated.is_empty() {
            Verdict::Equilibrium
        } else {
            Verdict::Violated(violated)
        };
        EquilibriumCertificate { slacks, verdict }
    }

    pub fn is_equilibrium(&self) -> bool {
        matches!(self.verdict, Verdict::Equilibrium)
    }

    pub fn violated(&self) -> &[ConstraintLabel] {
        match &self.verdict {
            Verdict::Equilibrium => &[],
            Verdict::Violated(v) => v,
        }
    }

    pub fn slack(&self, label: ConstraintLabel) -> Option<&Rational> {
        self.slacks.iter().find(|e| e.label == label).map(|e| &e.slack)
    }
}

pub fn build_constraints(game: &Game) -> ConstraintSystem {
    let (nt, na) = (game.num_types(), game.num_actions());
    let var = |t: usize, a: usize| t * na + a;
    let mut constraints = Vec::new();

    // sum_a mu(a|w) u_s(w,a) - sum_a mu(a|w') u_s(w,a) >= 0
    for from in 0..nt {
        for to in (0..nt).filter(|&to| to != from) {
            let mut coeffs = vec![Rational::zero(); nt * na];
            for a in 0..na {
                coeffs[var(from, a)] += game.u_s(from, a);
                coeffs[var(to, a)] -= game.u_s(from, a);
            }
            constraints.push(Constraint {
                label: ConstraintLabel::Truthfulness { from, to },
                coeffs,
                sense: Sense::Ge,
                bound: Rational::zero(),
            });
        }
    }

    // sum_w q(w) mu(a|w) (u_r(w,a) - u_r(w,a')) >= 0; kept even when a is
    // never recommended (then it reads 0 >= 0).
    for recommended in 0..na {
        for played in (0..na).filter(|&p| p != recommended) {
            let mut coeffs = vec![Rational::zero(); nt * na];
            for t in 0..nt {
                coeffs[var(t, recommended)] =
                    &game.prior()[t] * (game.u_r(t, recommended) - game.u_r(t, played));
            }
            constraints.push(Constraint {
                label: ConstraintLabel::Obedience {
                    recommended,
                    played,
                },
                coeffs,
                sense: Sense::Ge,
                bound: Rational::zero(),
            });
        }
    }

    for t in 0..nt {
        let mut coeffs = vec![Rational::zero(); nt * na];
        for a in 0..na {
            coeffs[var(t, a)] = Rational::one();
        }
        constraints.push(Constraint {
            label: ConstraintLabel::Stochasticity { type_index: t },
            coeffs,
            sense: Sense::Eq,
            bound: Rational::one(),
        });
    }

    ConstraintSystem {
        num_types: nt,
        num_actions: na,
        constraints,
    }
}

fn flatten(outcome: &Outcome) -> Vec<Rational> {
    outcome.rows().iter().flatten().cloned().collect()
}

pub fn check_equilibrium(game: &Game, outcome: &Outcome) -> Result<EquilibriumCertificate> {
    if outcome.num_types() != game.num_types() || outcome.num_actions() != game.num_actions() {
        return Err(Error::DimensionMismatch(format!(
            "outcome is {}x{}, game is {}x{}",
            outcome.num_types(),
            outcome.num_actions(),
            game.num_types(),
            game.num_actions()
        )));
    }
    Ok(certify(&build_constraints(game), outcome))
}

fn certify(system: &ConstraintSystem, outcome: &Outcome) -> EquilibriumCertificate {
    let x = flatten(outcome);
    EquilibriumCertificate::from_slacks(
        system
            .incentive_constraints()
            .map(|c| SlackEntry {
                label: c.label,
                slack: c.slack(&x),
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WelfareOptimum {
    pub value: Rational,
    pub outcome: Outcome,
    pub certificate: EquilibriumCertificate,
}

fn welfare_objective(game: &Game, welfare: &Welfare) -> Vec<Rational> {
    (0..game.num_types())
        .flat_map(|t| (0..game.num_actions()).map(move |a| (t, a)))
        .map(|(t, a)| &game.prior()[t] * welfare.get(t, a))
        .collect()
}

/// Maximum expected welfare over mediated equilibrium outcomes, attained at
/// the lexicographically smallest optimal outcome table.
pub fn maximize_welfare(game: &Game, welfare: &Welfare) -> Result<WelfareOptimum> {
    let system = build_constraints(game);
    maximize_over(game, &system, welfare)
}

/// Same as [`maximize_welfare`] with constraints supplied by the caller,
/// e.g. reordered.
pub fn maximize_over(
    game: &Game,
    system: &ConstraintSystem,
    welfare: &Welfare,
) -> Result<WelfareOptimum> {
    if welfare.table().len() != game.num_types()
        || welfare.table().iter().any(|r| r.len() != game.num_actions())
    {
        return Err(Error::DimensionMismatch("welfare shape differs from game".into()));
    }
    let lp = system.to_lp(welfare_objective(game, welfare));
    let (value, point) = match lp.maximize_lexmin() {
        LpOutcome::Optimal { value, point } => (value, point),
        LpOutcome::Infeasible => {
            return Err(Error::SolverInvariant(
                "equilibrium polytope reported empty".into(),
            ))
        }
        LpOutcome::Unbounded => {
            return Err(Error::SolverInvariant("bounded LP reported unbounded".into()))
        }
    };
    let table = point
        .chunks(game.num_actions())
        .map(<[Rational]>::to_vec)
        .collect();
    let outcome = Outcome::new(table)
        .map_err(|e| Error::SolverInvariant(format!("LP optimum is not an outcome: {e}")))?;
    let certificate = certify(system, &outcome);
    if !certificate.is_equilibrium() {
        return Err(Error::SolverInvariant(format!(
            "LP optimum violates {:?}",
            certificate.violated()
        )));
    }
    let recomputed = game.expected_welfare(welfare, &outcome)?;
    if recomputed != value {
        return Err(Error::SolverInvariant(format!(
            "LP value {value} differs from expected welfare {recomputed}"
        )));
    }
    Ok(WelfareOptimum {
        value,
        outcome,
        certificate,
    })
}

/// Point mass on an action maximizing the receiver's no-information payoff;
/// this outcome is always an equilibrium.
pub fn babbling_outcome(game: &Game) -> Outcome {
    let payoff = |a: usize| -> Rational {
        (0..game.num_types())
            .map(|t| &game.prior()[t] * game.u_r(t, a))
            .sum()
    };
    let best = (0..game.num_actions())
        .map(|a| (a, payoff(a)))
        .fold(None::<(usize, Rational)>, |acc, (a, v)| match acc {
            Some((_, ref bv)) if *bv >= v => acc,
            _ => Some((a, v)),
        })
        .map(|(a, _)| a)
        .unwrap_or(0);
    Outcome::constant(game.num_types(), game.num_actions(), best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    fn counts(system: &ConstraintSystem) -> (usize, usize) {
        (
            system.count(|l| matches!(l, ConstraintLabel::Truthfulness { .. })),
            system.count(|l| matches!(l, ConstraintLabel::Obedience { .. })),
        )
    }

    #[test]
    fn constraint_counts() {
        let (g1, _) = fixtures::non_monotone_binary();
        assert_eq!(counts(&build_constraints(&g1)), (2, 2));
        let (g2, _) = fixtures::cyclic_three_action();
        assert_eq!(counts(&build_constraints(&g2)), (6, 6));
    }

    #[test]
    fn cyclic_mediated_outcome_is_equilibrium() {
        let (game, _) = fixtures::cyclic_three_action();
        let cert = check_equilibrium(&game, &fixtures::cyclic_mediated_outcome()).unwrap();
        assert_eq!(cert.slacks.len(), 12);
        assert!(cert.slacks.iter().all(|e| !e.slack.is_negative()));
        assert!(cert.is_equilibrium());
    }

    #[test]
    fn binary_fixture_certificates() {
        let (game, _) = fixtures::non_monotone_binary();
        let mu = Outcome::from_action0_probabilities(&[rat(1, 2), rat(0, 1)]).unwrap();
        assert!(check_equilibrium(&game, &mu).unwrap().is_equilibrium());

        // Always playing 1 earns the receiver 1/2 while deviating to 0 earns 3/4.
        let always1 = Outcome::constant(2, 2, 1);
        let cert = check_equilibrium(&game, &always1).unwrap();
        let label = ConstraintLabel::Obedience {
            recommended: 1,
            played: 0,
        };
        assert_eq!(cert.violated(), &[label]);
        assert_eq!(cert.slack(label), Some(&rat(-1, 4)));
    }

    #[test]
    fn cyclic_full_revelation_is_not_equilibrium() {
        let (game, _) = fixtures::cyclic_three_action();
        // Point mass on the sender's favourite: the receiver disobeys.
        let identity = Outcome::new(
            (0..3)
                .map(|t| crate::game::point_mass(3, t))
                .collect(),
        )
        .unwrap();
        let cert = check_equilibrium(&game, &identity).unwrap();
        assert!(!cert.is_equilibrium());
        assert!(cert
            .violated()
            .iter()
            .all(|l| matches!(l, ConstraintLabel::Obedience { .. })));
        // Point mass on the receiver's favourite: type t_i reports t_{i-1}.
        let shifted = Outcome::new(
            (0..3)
                .map(|t| crate::game::point_mass(3, (t + 1) % 3))
                .collect(),
        )
        .unwrap();
        let cert = check_equilibrium(&game, &shifted).unwrap();
        for t in 0..3 {
            let lie = ConstraintLabel::Truthfulness {
                from: t,
                to: (t + 2) % 3,
            };
            assert_eq!(cert.slack(lie), Some(&rat(-1, 1)));
        }
    }

    #[test]
    fn welfare_optimum_binary_fixture() {
        let (game, w) = fixtures::non_monotone_binary();
        let opt = maximize_welfare(&game, &w).unwrap();
        assert_eq!(opt.value, rat(1, 4));
        assert_eq!(
            opt.outcome,
            Outcome::from_action0_probabilities(&[rat(1, 2), rat(0, 1)]).unwrap()
        );
        assert!(opt.certificate.is_equilibrium());

        let (_, w_eps) = fixtures::non_monotone_binary_eps();
        assert_eq!(maximize_welfare(&game, &w_eps).unwrap().value, rat(13, 50));
    }

    #[test]
    fn cyclic_sum_optimum_is_the_split_outcome() {
        let (game, _) = fixtures::cyclic_three_action();
        let opt = maximize_welfare(&game, &Welfare::sum(&game).unwrap()).unwrap();
        assert_eq!(opt.value, Rational::one());
        assert_eq!(opt.outcome, fixtures::cyclic_mediated_outcome());
    }

    #[test]
    fn babbling_is_always_an_equilibrium() {
        let (game, _) = fixtures::non_monotone_binary();
        let b = babbling_outcome(&game);
        assert_eq!(b, Outcome::constant(2, 2, 0));
        assert!(check_equilibrium(&game, &b).unwrap().is_equilibrium());
    }

    #[test]
    fn shape_errors() {
        let (game, w) = fixtures::non_monotone_binary();
        assert!(matches!(
            check_equilibrium(&game, &Outcome::constant(3, 2, 0)),
            Err(Error::DimensionMismatch(_))
        ));
        let (g3, _) = fixtures::cyclic_three_action();
        assert!(maximize_welfare(&g3, &w).is_err());
        let _ = game;
    }
}
