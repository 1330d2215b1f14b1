//! Finite sender-receiver games with exact utilities.
//!
//! Both players' utilities depend only on the sender's type and the receiver's
//! action. A [`Game`] is immutable once validated; [`Outcome`] and [`Welfare`]
//! are tables over `types x actions`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Table = Vec<Vec<Rational>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Sender,
    Receiver,
}

/// On-disk game description. Rationals are `"p/q"` strings or integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawGame {
    pub types: Vec<String>,
    pub prior: Vec<Rational>,
    pub actions: Vec<String>,
    pub u_s: Table,
    pub u_r: Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub welfare: Option<Table>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    types: Vec<String>,
    prior: Vec<Rational>,
    actions: Vec<String>,
    u_s: Table,
    u_r: Table,
}

/// Nonnegative welfare table over `types x actions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Welfare(Table);

/// Row-stochastic map from sender types to distributions over actions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Outcome(Table);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MonotoneCheck {
    Monotone,
    /// `dominating` is weakly better for both players than `dominated`, yet
    /// has strictly lower welfare. Pairs are `(type index, action index)`.
    Violation {
        dominating: (usize, usize),
        dominated: (usize, usize),
    },
}

impl MonotoneCheck {
    pub fn is_monotone(&self) -> bool {
        matches!(self, MonotoneCheck::Monotone)
    }
}

fn check_table(name: &str, table: &Table, rows: usize, cols: usize) -> Result<()> {
    if table.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} rows, expected {rows}",
            table.len()
        )));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{name} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
    }
    Ok(())
}

impl Game {
    pub fn new(
        types: Vec<String>,
        prior: Vec<Rational>,
        actions: Vec<String>,
        u_s: Table,
        u_r: Table,
    ) -> Result<Self> {
        if types.is_empty() || actions.is_empty() {
            return Err(Error::DimensionMismatch(
                "a game needs at least one type and one action".into(),
            ));
        }
        if prior.len() != types.len() {
            return Err(Error::DimensionMismatch(format!(
                "prior has {} entries for {} types",
                prior.len(),
                types.len()
            )));
        }
        check_table("u_s", &u_s, types.len(), actions.len())?;
        check_table("u_r", &u_r, types.len(), actions.len())?;
        if let Some(p) = prior.iter().find(|p| p.is_negative()) {
            return Err(Error::NonStochasticPrior(format!("negative entry {p}")));
        }
        let total: Rational = prior.iter().sum();
        if total != Rational::one() {
            return Err(Error::NonStochasticPrior(format!("entries sum to {total}")));
        }
        if let Some(i) = prior.iter().position(Rational::is_zero) {
            return Err(Error::ZeroProbabilityType(types[i].clone()));
        }
        Ok(Game {
            types,
            prior,
            actions,
            u_s,
            u_r,
        })
    }

    /// Game with labels `t0, t1, ...` and `0, 1, ...`.
    pub fn unlabeled(prior: Vec<Rational>, u_s: Table, u_r: Table) -> Result<Self> {
        let types = (0..prior.len()).map(|i| format!("t{i}")).collect();
        let actions = (0..u_s.first().map_or(0, Vec::len))
            .map(|a| a.to_string())
            .collect();
        Game::new(types, prior, actions, u_s, u_r)
    }

    /// Uniform prior over `u_s.len()` types.
    pub fn uniform(u_s: Table, u_r: Table) -> Result<Self> {
        let n = u_s.len().max(1) as i64;
        Game::unlabeled(vec![Rational::new(1, n); u_s.len()], u_s, u_r)
    }

    /// Validates a parsed description, returning the game and its welfare
    /// table when one is attached.
    pub fn from_raw(raw: RawGame) -> Result<(Game, Option<Welfare>)> {
        let game = Game::new(raw.types, raw.prior, raw.actions, raw.u_s, raw.u_r)?;
        let welfare = raw.welfare.map(|w| Welfare::new(&game, w)).transpose()?;
        Ok((game, welfare))
    }

    pub fn from_json(text: &str) -> Result<(Game, Option<Welfare>)> {
        Game::from_raw(serde_json::from_str(text)?)
    }

    pub fn to_raw(&self, welfare: Option<&Welfare>) -> RawGame {
        RawGame {
            types: self.types.clone(),
            prior: self.prior.clone(),
            actions: self.actions.clone(),
            u_s: self.u_s.clone(),
            u_r: self.u_r.clone(),
            welfare: welfare.map(|w| w.0.clone()),
        }
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn prior(&self) -> &[Rational] {
        &self.prior
    }

    pub fn utility(&self, player: Player) -> &Table {
        match player {
            Player::Sender => &self.u_s,
            Player::Receiver => &self.u_r,
        }
    }

    pub fn u_s(&self, t: usize, a: usize) -> &Rational {
        &self.u_s[t][a]
    }

    pub fn u_r(&self, t: usize, a: usize) -> &Rational {
        &self.u_r[t][a]
    }

    pub fn is_binary(&self) -> bool {
        self.actions.len() == 2
    }

    pub fn has_uniform_prior(&self) -> bool {
        self.prior.iter().all(|p| p == &self.prior[0])
    }

    fn check_outcome(&self, outcome: &Outcome) -> Result<()> {
        check_table("outcome", &outcome.0, self.num_types(), self.num_actions())
    }

    /// `sum_t q(t) sum_a mu(a|t) table(t, a)`.
    pub fn expectation(&self, table: &Table, outcome: &Outcome) -> Result<Rational> {
        self.check_outcome(outcome)?;
        check_table("table", table, self.num_types(), self.num_actions())?;
        Ok(self
            .prior
            .iter()
            .zip(outcome.rows())
            .zip(table)
            .map(|((q, mu), row)| {
                let inner: Rational = mu.iter().zip(row).map(|(m, u)| m * u).sum();
                q * inner
            })
            .sum())
    }

    pub fn expected_utility(&self, outcome: &Outcome, player: Player) -> Result<Rational> {
        self.expectation(self.utility(player), outcome)
    }

    pub fn expected_welfare(&self, welfare: &Welfare, outcome: &Outcome) -> Result<Rational> {
        self.expectation(&welfare.0, outcome)
    }

    /// Scans all ordered pairs of cells in row-major order and returns the
    /// first one that breaks monotonicity.
    pub fn check_monotone(&self, welfare: &Welfare) -> Result<MonotoneCheck> {
        check_table("welfare", &welfare.0, self.num_types(), self.num_actions())?;
        let cells: Vec<(usize, usize)> = (0..self.num_types())
            .flat_map(|t| (0..self.num_actions()).map(move |a| (t, a)))
            .collect();
        for &(t, a) in &cells {
            for &(t2, a2) in &cells {
                let dominates =
                    self.u_r[t][a] >= self.u_r[t2][a2] && self.u_s[t][a] >= self.u_s[t2][a2];
                if dominates && welfare.0[t][a] < welfare.0[t2][a2] {
                    return Ok(MonotoneCheck::Violation {
                        dominating: (t, a),
                        dominated: (t2, a2),
                    });
                }
            }
        }
        Ok(MonotoneCheck::Monotone)
    }

    /// Serialized form as a pretty JSON string.
    pub fn to_json(&self, welfare: Option<&Welfare>) -> String {
        serde_json::to_string_pretty(&self.to_raw(welfare)).expect("game serializes")
    }
}

impl Welfare {
    pub fn new(game: &Game, table: Table) -> Result<Self> {
        check_table("welfare", &table, game.num_types(), game.num_actions())?;
        for (t, row) in table.iter().enumerate() {
            for (a, w) in row.iter().enumerate() {
                if w.is_negative() {
                    return Err(Error::NegativeWelfare {
                        type_index: t,
                        action: a,
                        value: w.clone(),
                    });
                }
            }
        }
        Ok(Welfare(table))
    }

    /// `alpha * u_s + beta * u_r`; fails if the result has a negative entry.
    pub fn linear(game: &Game, alpha: &Rational, beta: &Rational) -> Result<Self> {
        let table = (0..game.num_types())
            .map(|t| {
                (0..game.num_actions())
                    .map(|a| alpha * game.u_s(t, a) + beta * game.u_r(t, a))
                    .collect()
            })
            .collect();
        Welfare::new(game, table)
    }

    pub fn sender(game: &Game) -> Result<Self> {
        Welfare::new(game, game.u_s.clone())
    }

    pub fn receiver(game: &Game) -> Result<Self> {
        Welfare::new(game, game.u_r.clone())
    }

    pub fn sum(game: &Game) -> Result<Self> {
        Welfare::linear(game, &Rational::one(), &Rational::one())
    }

    pub fn constant(game: &Game, c: Rational) -> Result<Self> {
        Welfare::new(game, vec![vec![c; game.num_actions()]; game.num_types()])
    }

    /// Adds `eps` to every entry.
    pub fn shifted(&self, eps: &Rational) -> Welfare {
        Welfare(
            self.0
                .iter()
                .map(|row| row.iter().map(|w| w + eps).collect())
                .collect(),
        )
    }

    pub fn table(&self) -> &Table {
        &self.0
    }

    pub fn get(&self, t: usize, a: usize) -> &Rational {
        &self.0[t][a]
    }
}

impl Outcome {
    pub fn new(table: Table) -> Result<Self> {
        let width = table.first().map_or(0, Vec::len);
        for (i, row) in table.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch(format!(
                    "outcome row {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            let total: Rational = row.iter().sum();
            if row.iter().any(Rational::is_negative) || total != Rational::one() {
                return Err(Error::NonStochasticRow { row: i });
            }
        }
        Ok(Outcome(table))
    }

    /// Every type mapped to a point mass on `action`.
    pub fn constant(num_types: usize, num_actions: usize, action: usize) -> Self {
        Outcome(vec![point_mass(num_actions, action); num_types])
    }

    /// Same distribution for every type.
    pub fn constant_distribution(num_types: usize, dist: Vec<Rational>) -> Result<Self> {
        Outcome::new(vec![dist; num_types])
    }

    /// Binary outcome from per-type probabilities of playing action 0.
    pub fn from_action0_probabilities(probs: &[Rational]) -> Result<Self> {
        Outcome::new(
            probs
                .iter()
                .map(|p| vec![p.clone(), Rational::one() - p])
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.0
    }

    pub fn get(&self, t: usize, a: usize) -> &Rational {
        &self.0[t][a]
    }

    pub fn num_types(&self) -> usize {
        self.0.len()
    }

    pub fn num_actions(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Outcome, lambda: &Rational) -> Result<Outcome> {
        if self.0.len() != other.0.len() || self.num_actions() != other.num_actions() {
            return Err(Error::DimensionMismatch("outcomes differ in shape".into()));
        }
        let rest = Rational::one() - lambda;
        Outcome::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(r, s)| r.iter().zip(s).map(|(x, y)| lambda * x + &rest * y).collect())
                .collect(),
        )
    }

    pub fn into_table(self) -> Table {
        self.0
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let table = Table::deserialize(deserializer)?;
        Outcome::new(table).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn point_mass(len: usize, at: usize) -> Vec<Rational> {
    (0..len)
        .map(|i| if i == at { Rational::one() } else { Rational::zero() })
        .collect()
}
