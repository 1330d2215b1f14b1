//! Bundled games used by the tests, the acceptance suite and the CLI.
//!
//! * `non_monotone_binary`: two types, two actions, similar preferences, and
//!   a welfare table that is positive only where neither player gains.
//! * `cyclic_three_action`: three types and actions where each player's
//!   favourite action differs in every state; a mediator splitting between
//!   the two favourites gives both players 1/2.
//! * `monotone_gap`: binary game with a welfare table that is monotone in the
//!   two utilities but not linear; the best mediated outcome has one type
//!   mixing, which the sender-preferred outcome does not reach.

use crate::game::{Game, Outcome, Welfare};
use crate::rational::Rational;
use crate::vom::CertifiedValue;

pub const NON_MONOTONE_BINARY_JSON: &str = include_str!("../fixtures/non_monotone_binary.json");
pub const NON_MONOTONE_BINARY_EPS_JSON: &str =
    include_str!("../fixtures/non_monotone_binary_eps.json");
pub const NON_MONOTONE_BINARY_CT_JSON: &str =
    include_str!("../fixtures/non_monotone_binary.ct.json");
pub const NON_MONOTONE_BINARY_EPS_CT_JSON: &str =
    include_str!("../fixtures/non_monotone_binary_eps.ct.json");
pub const CYCLIC_THREE_ACTION_JSON: &str = include_str!("../fixtures/cyclic_three_action.json");
pub const MONOTONE_GAP_JSON: &str = include_str!("../fixtures/monotone_gap.json");
pub const CYCLIC_THREE_ACTION_OUTCOME_JSON: &str =
    include_str!("../fixtures/cyclic_three_action.outcome.json");

pub fn non_monotone_binary() -> (Game, Welfare) {
    let (game, welfare) = Game::from_json(NON_MONOTONE_BINARY_JSON).expect("bundled fixture");
    (game, welfare.expect("fixture carries welfare"))
}

/// Same game with welfare `w + 1/100`.
pub fn non_monotone_binary_eps() -> (Game, Welfare) {
    let (game, welfare) = Game::from_json(NON_MONOTONE_BINARY_EPS_JSON).expect("bundled fixture");
    (game, welfare.expect("fixture carries welfare"))
}

pub fn non_monotone_binary_ct() -> CertifiedValue {
    serde_json::from_str(NON_MONOTONE_BINARY_CT_JSON).expect("bundled fixture")
}

pub fn non_monotone_binary_eps_ct() -> CertifiedValue {
    serde_json::from_str(NON_MONOTONE_BINARY_EPS_CT_JSON).expect("bundled fixture")
}

pub fn monotone_gap() -> (Game, Welfare) {
    let (game, welfare) = Game::from_json(MONOTONE_GAP_JSON).expect("bundled fixture");
    (game, welfare.expect("fixture carries welfare"))
}

/// The cyclic game; no welfare is attached to the fixture file.
pub fn cyclic_three_action() -> (Game, Option<Welfare>) {
    Game::from_json(CYCLIC_THREE_ACTION_JSON).expect("bundled fixture")
}

/// Each state `t_i` mapped to the uniform distribution over actions `i` and `i+1`.
pub fn cyclic_mediated_outcome() -> Outcome {
    serde_json::from_str(CYCLIC_THREE_ACTION_OUTCOME_JSON).expect("bundled fixture")
}

/// `n` types, `n` actions, uniform prior, both players get 1 iff action == type.
pub fn common_interest(n: usize) -> Game {
    let table: Vec<Vec<Rational>> = (0..n)
        .map(|t| {
            (0..n)
                .map(|a| if a == t { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    Game::uniform(table.clone(), table).expect("valid game")
}
