//! Brute-force ground truth for one-round cheap talk.
//!
//! The sender sends one message from a finite alphabet, the receiver plays an
//! action depending on the message. Equilibria are found by enumerating every
//! pure sender rule up to message relabeling and, for each, every extreme
//! receiver best response: the receiver may mix over actions that tie at the
//! posterior, and the set of mixtures that keep the sender honest is a
//! polytope whose vertices are enumerated exactly.
//!
//! Off-path messages are answered like message 0, so deviating to them is
//! never better than deviating to message 0. Because of this, alphabets
//! larger than the number of types add no outcomes.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary::{convex_order, Point};
use crate::error::{Error, Result};
use crate::game::{point_mass, Game, Outcome, Player, Table, Welfare};
use crate::lp::{LinearConstraint, Sense};
use crate::polytope;
use crate::rational::Rational;

/// Hard cap on the requested alphabet; anything above the number of types is
/// equivalent, so this only guards against absurd inputs.
pub const MAX_ALPHABET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OneRoundProtocol {
    pub alphabet_size: usize,
    /// `sender_rule[type][message]`.
    pub sender_rule: Table,
    /// `receiver_rule[message][action]`.
    pub receiver_rule: Table,
}

fn is_distribution(row: &[Rational]) -> bool {
    row.iter().all(|p| !p.is_negative()) && row.iter().sum::<Rational>() == Rational::one()
}

impl OneRoundProtocol {
    pub fn new(game: &Game, sender_rule: Table, receiver_rule: Table) -> Result<Self> {
        let alphabet_size = receiver_rule.len();
        if alphabet_size == 0 || alphabet_size > game.num_types() + 1 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size {alphabet_size} outside 1..={}",
                game.num_types() + 1
            )));
        }
        if sender_rule.len() != game.num_types()
            || sender_rule.iter().any(|r| r.len() != alphabet_size)
            || receiver_rule.iter().any(|r| r.len() != game.num_actions())
        {
            return Err(Error::DimensionMismatch("protocol shape differs from game".into()));
        }
        for (i, row) in sender_rule.iter().chain(&receiver_rule).enumerate() {
            if !is_distribution(row) {
                return Err(Error::NonStochasticRow { row: i });
            }
        }
        Ok(OneRoundProtocol {
            alphabet_size,
            sender_rule,
            receiver_rule,
        })
    }

    /// Re-checks a deserialized protocol against a game.
    pub fn validated(self, game: &Game) -> Result<Self> {
        if self.alphabet_size != self.receiver_rule.len() {
            return Err(Error::DimensionMismatch(
                "alphabet_size disagrees with receiver_rule".into(),
            ));
        }
        OneRoundProtocol::new(game, self.sender_rule, self.receiver_rule)
    }

    /// Pure rules: type -> message, message -> action.
    pub fn pure(game: &Game, messages: &[usize], actions: &[usize]) -> Result<Self> {
        let k = actions.len();
        if messages.iter().any(|&m| m >= k) || actions.iter().any(|&a| a >= game.num_actions()) {
            return Err(Error::InvalidArgument("message or action out of range".into()));
        }
        OneRoundProtocol::new(
            game,
            messages.iter().map(|&m| point_mass(k, m)).collect(),
            actions.iter().map(|&a| point_mass(game.num_actions(), a)).collect(),
        )
    }

    /// Single message; the receiver plays `action`.
    pub fn babbling(game: &Game, action: usize) -> Result<Self> {
        OneRoundProtocol::pure(game, &vec![0; game.num_types()], &[action])
    }

    /// Each type sends its own index; the receiver answers message `m` with
    /// `response[m]`.
    pub fn revealing(game: &Game, response: &[usize]) -> Result<Self> {
        let msgs: Vec<usize> = (0..game.num_types()).collect();
        OneRoundProtocol::pure(game, &msgs, response)
    }

    pub fn num_types(&self) -> usize {
        self.sender_rule.len()
    }

    pub fn num_actions(&self) -> usize {
        self.receiver_rule.first().map_or(0, Vec::len)
    }

    /// `mu(a|t) = sum_m sender(t, m) receiver(m, a)`.
    pub fn induced_outcome(&self) -> Outcome {
        let table = self
            .sender_rule
            .iter()
            .map(|s| {
                (0..self.num_actions())
                    .map(|a| {
                        s.iter()
                            .zip(&self.receiver_rule)
                            .map(|(sm, r)| sm * &r[a])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Outcome::new(table).expect("composition of stochastic maps is stochastic")
    }

    pub fn with_sender_rule(&self, sender_rule: Table) -> Self {
        OneRoundProtocol {
            sender_rule,
            ..self.clone()
        }
    }

    pub fn with_receiver_rule(&self, receiver_rule: Table) -> Self {
        OneRoundProtocol {
            receiver_rule,
            ..self.clone()
        }
    }
}

/// `p[i][j]` = probability that the type is `i` and the action is `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct JointOutcomeTable(pub Table);

impl JointOutcomeTable {
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.0[i][j]
    }

    pub fn total(&self) -> Rational {
        self.0.iter().flatten().sum()
    }

    /// `sum_{i,j} p[i][j] table[i][j]`.
    pub fn expectation(&self, table: &Table) -> Rational {
        self.0
            .iter()
            .zip(table)
            .flat_map(|(p, u)| p.iter().zip(u).map(|(x, y)| x * y))
            .sum()
    }
}

pub fn joint_outcome(game: &Game, protocol: &OneRoundProtocol) -> JointOutcomeTable {
    let mu = protocol.induced_outcome();
    JointOutcomeTable(
        mu.rows()
            .iter()
            .zip(game.prior())
            .map(|(row, q)| row.iter().map(|m| q * m).collect())
            .collect(),
    )
}

pub fn expected_payoff(game: &Game, protocol: &OneRoundProtocol, player: Player) -> Rational {
    joint_outcome(game, protocol).expectation(game.utility(player))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "player", content = "rule", rename_all = "lowercase")]
pub enum DeviationRule {
    /// Message sent by each type.
    Sender(Vec<usize>),
    /// Action played on each message.
    Receiver(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub rule: DeviationRule,
    pub gain: Rational,
}

impl Deviation {
    /// Protocol with the deviating player's rule swapped in.
    pub fn apply(&self, game: &Game, protocol: &OneRoundProtocol) -> OneRoundProtocol {
        match &self.rule {
            DeviationRule::Sender(msgs) => protocol.with_sender_rule(
                msgs.iter()
                    .map(|&m| point_mass(protocol.alphabet_size, m))
                    .collect(),
            ),
            DeviationRule::Receiver(acts) => protocol.with_receiver_rule(
                acts.iter()
                    .map(|&a| point_mass(game.num_actions(), a))
                    .collect(),
            ),
        }
    }
}

fn argmax(values: impl Iterator<Item = Rational>) -> (usize, Rational) {
    values
        .enumerate()
        .fold(None::<(usize, Rational)>, |acc, (i, v)| match acc {
            Some((_, ref best)) if *best >= v => acc,
            _ => Some((i, v)),
        })
        .expect("nonempty choice set")
}

/// Largest payoff gain from a unilateral pure deviation within the one-round
/// class. Mixed deviations are averages of pure ones and cannot do better.
pub fn best_deviation(game: &Game, protocol: &OneRoundProtocol, player: Player) -> Deviation {
    match player {
        Player::Sender => {
            let mut rule = Vec::with_capacity(game.num_types());
            let mut gain = Rational::zero();
            for (t, s) in protocol.sender_rule.iter().enumerate() {
                let value_of = |m: usize| -> Rational {
                    protocol.receiver_rule[m]
                        .iter()
                        .enumerate()
                        .map(|(a, r)| r * game.u_s(t, a))
                        .sum()
                };
                let current: Rational = s
                    .iter()
                    .enumerate()
                    .map(|(m, p)| p * value_of(m))
                    .sum();
                let (m, best) = argmax((0..protocol.alphabet_size).map(value_of));
                rule.push(m);
                gain += &game.prior()[t] * (best - current);
            }
            Deviation {
                rule: DeviationRule::Sender(rule),
                gain,
            }
        }
        Player::Receiver => {
            let mut rule = Vec::with_capacity(protocol.alphabet_size);
            let mut gain = Rational::zero();
            for (m, r) in protocol.receiver_rule.iter().enumerate() {
                let value_of = |a: usize| -> Rational {
                    (0..game.num_types())
                        .map(|t| &game.prior()[t] * &protocol.sender_rule[t][m] * game.u_r(t, a))
                        .sum()
                };
                let current: Rational = r.iter().enumerate().map(|(a, p)| p * value_of(a)).sum();
                let (a, best) = argmax((0..game.num_actions()).map(value_of));
                rule.push(a);
                gain += best - current;
            }
            Deviation {
                rule: DeviationRule::Receiver(rule),
                gain,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumMember {
    pub protocol: OneRoundProtocol,
    pub outcome: Outcome,
    pub u_s: Rational,
    pub u_r: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welfare: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumSet {
    pub alphabet_size: usize,
    pub members: Vec<EquilibriumMember>,
}

/// Restricted growth strings: canonical message labels by order of first use.
fn sender_rules(num_types: usize, alphabet: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next_new = prefix.iter().max().map_or(0, |m| m + 1);
        for m in 0..=next_new.min(k - 1) {
            prefix.push(m);
            extend(prefix, n, k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(num_types), num_types, alphabet, &mut out);
    out
}

/// Receiver best responses to a fixed pure sender rule that keep every type
/// honest; one protocol per vertex of that polytope.
fn equilibria_for_rule(game: &Game, messages: &[usize], alphabet: usize) -> Vec<OneRoundProtocol> {
    let used = messages.iter().max().map_or(0, |m| m + 1);
    let na = game.num_actions();

    // Posterior-optimal actions per used message.
    let best_sets: Vec<Vec<usize>> = (0..used)
        .map(|m| {
            let value = |a: usize| -> Rational {
                messages
                    .iter()
                    .enumerate()
                    .filter(|(_, &mm)| mm == m)
                    .map(|(t, _)| &game.prior()[t] * game.u_r(t, a))
                    .sum()
            };
            let values: Vec<Rational> = (0..na).map(value).collect();
            let top = values.iter().max().expect("at least one action").clone();
            (0..na).filter(|&a| values[a] == top).collect()
        })
        .collect();

    // Variable layout: (message, action) pairs from the best sets.
    let vars: Vec<(usize, usize)> = best_sets
        .iter()
        .enumerate()
        .flat_map(|(m, set)| set.iter().map(move |&a| (m, a)))
        .collect();
    let n = vars.len();
    let mut constraints = Vec::new();
    for m in 0..used {
        let coeffs = vars
            .iter()
            .map(|&(vm, _)| if vm == m { Rational::one() } else { Rational::zero() })
            .collect();
        constraints.push(LinearConstraint::new(coeffs, Sense::Eq, Rational::one()));
    }
    for i in 0..n {
        let coeffs = (0..n)
            .map(|j| if i == j { Rational::one() } else { Rational::zero() })
            .collect();
        constraints.push(LinearConstraint::new(coeffs, Sense::Ge, Rational::zero()));
    }
    for (t, &own) in messages.iter().enumerate() {
        for other in (0..used).filter(|&m| m != own) {
            let coeffs = vars
                .iter()
                .map(|&(m, a)| {
                    if m == own {
                        game.u_s(t, a).clone()
                    } else if m == other {
                        -game.u_s(t, a)
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            constraints.push(LinearConstraint::new(coeffs, Sense::Ge, Rational::zero()));
        }
    }

    let effective = alphabet.min(game.num_types());
    polytope::vertices(n, &constraints)
        .into_iter()
        .map(|x| {
            let mut receiver_rule = vec![vec![Rational::zero(); na]; effective];
            for (&(m, a), v) in vars.iter().zip(&x) {
                receiver_rule[m][a] = v.clone();
            }
            for m in used..effective {
                receiver_rule[m] = receiver_rule[0].clone();
            }
            let sender_rule = messages.iter().map(|&m| point_mass(effective, m)).collect();
            OneRoundProtocol::new(game, sender_rule, receiver_rule)
                .expect("enumerated protocol is well formed")
        })
        .collect()
}

/// Every distinct equilibrium outcome of one-round cheap talk with pure
/// sender rules over `alphabet` messages.
pub fn enumerate_equilibria(
    game: &Game,
    alphabet: usize,
    welfare: Option<&Welfare>,
) -> Result<EquilibriumSet> {
    if alphabet == 0 {
        return Err(Error::InvalidArgument("alphabet size must be at least 1".into()));
    }
    if alphabet > MAX_ALPHABET {
        return Err(Error::AlphabetTooLarge {
            requested: alphabet,
            limit: MAX_ALPHABET,
        });
    }
    let effective = alphabet.min(game.num_types());
    let rules = sender_rules(game.num_types(), effective);
    let candidates: Vec<Vec<OneRoundProtocol>> = rules
        .par_iter()
        .map(|rule| equilibria_for_rule(game, rule, effective))
        .collect();

    let mut seen = BTreeSet::new();
    let mut members = Vec::new();
    for protocol in candidates.into_iter().flatten() {
        for player in [Player::Sender, Player::Receiver] {
            let dev = best_deviation(game, &protocol, player);
            if !dev.gain.is_zero() {
                return Err(Error::SolverInvariant(format!(
                    "enumerated profile admits a {player:?} deviation gaining {}",
                    dev.gain
                )));
            }
        }
        let outcome = protocol.induced_outcome();
        if !seen.insert(outcome.clone()) {
            continue;
        }
        let joint = joint_outcome(game, &protocol);
        members.push(EquilibriumMember {
            u_s: joint.expectation(game.utility(Player::Sender)),
            u_r: joint.expectation(game.utility(Player::Receiver)),
            welfare: welfare.map(|w| joint.expectation(w.table())),
            outcome,
            protocol,
        });
    }
    Ok(EquilibriumSet {
        alphabet_size: effective,
        members,
    })
}

/// Best welfare over one-round equilibria (a lower bound on the cheap-talk
/// maximum).
pub fn best_welfare(game: &Game, welfare: &Welfare) -> Result<Rational> {
    let set = enumerate_equilibria(game, game.num_types(), Some(welfare))?;
    set.members
        .iter()
        .filter_map(|m| m.welfare.clone())
        .max()
        .ok_or_else(|| Error::SolverInvariant("no one-round equilibrium found".into()))
}

/// Convex closure of the equilibrium payoffs, as reached by public
/// randomization over equilibria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PayoffHull {
    /// `(u_s, u_r)` hull vertices, counter-clockwise.
    pub vertices: Vec<Point>,
    pub max_u_s: Rational,
    pub max_u_r: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welfare_range: Option<(Rational, Rational)>,
}

impl EquilibriumSet {
    pub fn payoff_hull(&self) -> PayoffHull {
        let points: Vec<Point> = self
            .members
            .iter()
            .map(|m| (m.u_s.clone(), m.u_r.clone()))
            .collect();
        let welfare: Vec<&Rational> = self.members.iter().filter_map(|m| m.welfare.as_ref()).collect();
        let welfare_range = (!welfare.is_empty()).then(|| {
            (
                (*welfare.iter().min().unwrap()).clone(),
                (*welfare.iter().max().unwrap()).clone(),
            )
        });
        PayoffHull {
            max_u_s: points.iter().map(|p| p.0.clone()).max().unwrap_or_default(),
            max_u_r: points.iter().map(|p| p.1.clone()).max().unwrap_or_default(),
            vertices: convex_order(points),
            welfare_range,
        }
    }

    pub fn outcomes(&self) -> BTreeSet<Outcome> {
        self.members.iter().map(|m| m.outcome.clone()).collect()
    }
}

fn require_cyclic(game: &Game, protocol: &OneRoundProtocol) -> Result<usize> {
    let n = game.num_types();
    if n != game.num_actions() || !game.has_uniform_prior() {
        return Err(Error::NonUniformPrior);
    }
    if protocol.num_types() != n || protocol.num_actions() != n {
        return Err(Error::DimensionMismatch("protocol shape differs from game".into()));
    }
    Ok(n)
}

/// Type `t_i` behaves exactly as type `t_{i-1}` would.
pub fn shift_sender(game: &Game, protocol: &OneRoundProtocol) -> Result<OneRoundProtocol> {
    let n = require_cyclic(game, protocol)?;
    let rule = (0..n)
        .map(|i| protocol.sender_rule[(i + n - 1) % n].clone())
        .collect();
    Ok(protocol.with_sender_rule(rule))
}

/// Whenever the receiver would play `i`, it plays `i+1` instead.
pub fn shift_receiver(game: &Game, protocol: &OneRoundProtocol) -> Result<OneRoundProtocol> {
    let n = require_cyclic(game, protocol)?;
    let rule = protocol
        .receiver_rule
        .iter()
        .map(|r| (0..n).map(|a| r[(a + n - 1) % n].clone()).collect())
        .collect();
    Ok(protocol.with_receiver_rule(rule))
}
