//! Exact analysis of sender-receiver information transmission games: the
//! polytope of mediated equilibria, the binary-action cheap-talk structure,
//! a brute-force one-round cheap-talk oracle, a seeded protocol simulator,
//! and the value of mediation.
//!
//! All game quantities are exact rationals; floating point appears only in
//! simulation statistics and CSV output.

pub mod binary;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod lp;
pub mod mediated;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod report;
pub mod sim;
pub mod vom;

pub use error::{Error, Result};
pub use game::{Game, MonotoneCheck, Outcome, Player, RawGame, Table, Welfare};
pub use rational::{rat, Rational};
