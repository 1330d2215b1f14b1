//! Seeded execution of mediated and one-round cheap-talk protocols.
//!
//! Every trial owns a ChaCha8 stream: the generator is seeded with the run
//! seed and switched to stream `trial index`, so a trial's draws do not depend
//! on scheduling. Probabilities are sampled exactly by drawing a uniform
//! integer below the common denominator of a row.
//!
//! Trials only contribute to integer `(type, action)` counts, and all
//! estimates are computed from those counts, which keeps parallel runs
//! bit-identical to sequential ones.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Outcome, Player, Table, Welfare};
use crate::oracle::OneRoundProtocol;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Sender,
    Mediator,
    Receiver,
    Environment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Report { type_index: usize },
    Suggest { action: usize },
    Message { message: usize },
    Play { action: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub round: usize,
    pub from: Party,
    pub to: Party,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub seed: u64,
    pub trial: u64,
    pub type_index: usize,
    pub action: usize,
    pub steps: Vec<Step>,
}

impl Transcript {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }
}

/// Mean and standard error of a payoff table over simulated trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalEstimate {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    /// The sample mean before rounding.
    pub sample_mean: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Rational>,
}

impl EmpiricalEstimate {
    /// Estimate of `table` under the empirical `(type, action)` frequencies.
    pub fn from_counts(counts: &[Vec<u64>], table: &Table, exact: Option<Rational>) -> Self {
        let trials: u64 = counts.iter().flatten().sum();
        let mut sum = Rational::zero();
        let mut sum_sq = Rational::zero();
        for (row, vals) in counts.iter().zip(table) {
            for (&c, v) in row.iter().zip(vals) {
                if c == 0 {
                    continue;
                }
                let c = Rational::from_big(BigInt::from(c).into());
                sum += &c * v;
                sum_sq += &c * v * v;
            }
        }
        let n = Rational::from_big(BigInt::from(trials).into());
        let sample_mean = &sum / &n;
        let std_error = if trials > 1 {
            // Unbiased sample variance over n, then the square root.
            let var = (sum_sq - &sample_mean * &sum) / (&n - Rational::one());
            (var / n).to_f64().max(0.0).sqrt()
        } else {
            0.0
        };
        EmpiricalEstimate {
            trials,
            mean: sample_mean.to_f64(),
            std_error,
            sample_mean,
            exact,
        }
    }

    /// Distance to the exact value in standard errors; zero-variance
    /// estimates must match exactly.
    pub fn within(&self, num_se: f64) -> Option<bool> {
        let exact = self.exact.as_ref()?;
        if self.std_error == 0.0 {
            return Some(&self.sample_mean == exact);
        }
        Some((self.mean - exact.to_f64()).abs() <= num_se * self.std_error)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub trials: u64,
    /// `counts[type][action]`.
    pub counts: Vec<Vec<u64>>,
    pub u_s: EmpiricalEstimate,
    pub u_r: EmpiricalEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welfare: Option<EmpiricalEstimate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub transcripts: Vec<Transcript>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    /// Number of leading trials whose transcripts are kept.
    pub keep_transcripts: u64,
}

impl SimConfig {
    pub fn new(seed: u64, trials: u64) -> Self {
        SimConfig {
            seed,
            trials,
            keep_transcripts: 0,
        }
    }

    pub fn with_transcripts(mut self, n: u64) -> Self {
        self.keep_transcripts = n;
        self
    }
}

/// Exact sampler for one distribution: cumulative integer weights over the
/// least common denominator.
#[derive(Debug, Clone)]
enum Sampler {
    Small { cumulative: Vec<u64>, total: u64 },
    Big { cumulative: Vec<BigUint>, total: BigUint },
}

impl Sampler {
    fn new(dist: &[Rational]) -> Sampler {
        let lcm = dist.iter().fold(BigInt::one(), |acc, p| {
            num_integer::Integer::lcm(&acc, p.denom())
        });
        let mut acc = BigInt::zero();
        let cumulative: Vec<BigInt> = dist
            .iter()
            .map(|p| {
                acc += p.numer() * (&lcm / p.denom());
                acc.clone()
            })
            .collect();
        let small: Option<Vec<u64>> = cumulative.iter().map(|c| c.to_u64()).collect();
        match (small, lcm.to_u64()) {
            (Some(cumulative), Some(total)) => Sampler::Small { cumulative, total },
            _ => Sampler::Big {
                cumulative: cumulative
                    .into_iter()
                    .map(|c| c.to_biguint().expect("nonnegative weight"))
                    .collect(),
                total: lcm.to_biguint().expect("positive denominator"),
            },
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        // First index whose cumulative weight exceeds the draw; zero-weight
        // entries repeat the previous cumulative value and are never picked.
        match self {
            Sampler::Small { cumulative, total } => {
                let u = rng.gen_range(0..*total);
                cumulative.partition_point(|&c| c <= u)
            }
            Sampler::Big { cumulative, total } => {
                let u = rng.gen_biguint_below(total);
                cumulative.partition_point(|c| *c <= u)
            }
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One trial: the realized `(type, action)` and, on request, its steps.
type TrialFn<'a> = dyn Fn(&mut ChaCha8Rng, bool) -> (usize, usize, Vec<Step>) + Sync + 'a;

fn run(game: &Game, welfare: Option<&Welfare>, config: SimConfig, exact: [Option<Rational>; 3], trial: &TrialFn) -> Result<SimulationReport> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (nt, na) = (game.num_types(), game.num_actions());
    let counts = (0..config.trials)
        .into_par_iter()
        .fold(
            || vec![vec![0u64; na]; nt],
            |mut acc, i| {
                let (t, a, _) = trial(&mut trial_rng(config.seed, i), false);
                acc[t][a] += 1;
                acc
            },
        )
        .reduce(
            || vec![vec![0u64; na]; nt],
            |mut x, y| {
                for (rx, ry) in x.iter_mut().zip(&y) {
                    for (cx, cy) in rx.iter_mut().zip(ry) {
                        *cx += cy;
                    }
                }
                x
            },
        );
    let transcripts = (0..config.keep_transcripts.min(config.trials))
        .map(|i| {
            let (type_index, action, steps) = trial(&mut trial_rng(config.seed, i), true);
            Transcript {
                seed: config.seed,
                trial: i,
                type_index,
                action,
                steps,
            }
        })
        .collect();
    let [es, er, ew] = exact;
    Ok(SimulationReport {
        seed: config.seed,
        trials: config.trials,
        u_s: EmpiricalEstimate::from_counts(&counts, game.utility(Player::Sender), es),
        u_r: EmpiricalEstimate::from_counts(&counts, game.utility(Player::Receiver), er),
        welfare: welfare.map(|w| EmpiricalEstimate::from_counts(&counts, w.table(), ew)),
        counts,
        transcripts,
    })
}

fn check_support(report: &SimulationReport, outcome: &Outcome, game: &Game) -> Result<()> {
    for (t, row) in report.counts.iter().enumerate() {
        for (a, &c) in row.iter().enumerate() {
            if c > 0 && (outcome.get(t, a).is_zero() || game.prior()[t].is_zero()) {
                return Err(Error::SolverInvariant(format!(
                    "simulation realized ({t}, {a}) which has probability zero"
                )));
            }
        }
    }
    Ok(())
}

/// Runs the canonical mediated protocol: the sender reports its type, the
/// mediator draws a recommendation from `outcome`, the receiver plays it.
pub fn run_mediated(
    game: &Game,
    outcome: &Outcome,
    welfare: Option<&Welfare>,
    config: SimConfig,
) -> Result<SimulationReport> {
    if outcome.num_types() != game.num_types() || outcome.num_actions() != game.num_actions() {
        return Err(Error::DimensionMismatch("outcome shape differs from game".into()));
    }
    let prior = Sampler::new(game.prior());
    let rows: Vec<Sampler> = outcome.rows().iter().map(|r| Sampler::new(r)).collect();
    let trial = |rng: &mut ChaCha8Rng, record: bool| {
        let t = prior.sample(rng);
        let a = rows[t].sample(rng);
        let steps = if record {
            vec![
                Step {
                    round: 0,
                    from: Party::Sender,
                    to: Party::Mediator,
                    payload: Payload::Report { type_index: t },
                },
                Step {
                    round: 1,
                    from: Party::Mediator,
                    to: Party::Receiver,
                    payload: Payload::Suggest { action: a },
                },
                Step {
                    round: 2,
                    from: Party::Receiver,
                    to: Party::Environment,
                    payload: Payload::Play { action: a },
                },
            ]
        } else {
            Vec::new()
        };
        (t, a, steps)
    };
    let exact = [
        Some(game.expected_utility(outcome, Player::Sender)?),
        Some(game.expected_utility(outcome, Player::Receiver)?),
        welfare.map(|w| game.expected_welfare(w, outcome)).transpose()?,
    ];
    let report = run(game, welfare, config, exact, &trial)?;
    check_support(&report, outcome, game)?;
    Ok(report)
}

/// Runs a one-round cheap-talk protocol: the sender draws a message, the
/// receiver draws an action given the message.
pub fn run_cheaptalk(
    game: &Game,
    protocol: &OneRoundProtocol,
    welfare: Option<&Welfare>,
    config: SimConfig,
) -> Result<SimulationReport> {
    let protocol = protocol.clone().validated(game)?;
    let prior = Sampler::new(game.prior());
    let senders: Vec<Sampler> = protocol.sender_rule.iter().map(|r| Sampler::new(r)).collect();
    let receivers: Vec<Sampler> = protocol.receiver_rule.iter().map(|r| Sampler::new(r)).collect();
    let trial = |rng: &mut ChaCha8Rng, record: bool| {
        let t = prior.sample(rng);
        let m = senders[t].sample(rng);
        let a = receivers[m].sample(rng);
        let steps = if record {
            vec![
                Step {
                    round: 0,
                    from: Party::Sender,
                    to: Party::Receiver,
                    payload: Payload::Message { message: m },
                },
                Step {
                    round: 1,
                    from: Party::Receiver,
                    to: Party::Environment,
                    payload: Payload::Play { action: a },
                },
            ]
        } else {
            Vec::new()
        };
        (t, a, steps)
    };
    let outcome = protocol.induced_outcome();
    let exact = [
        Some(game.expected_utility(&outcome, Player::Sender)?),
        Some(game.expected_utility(&outcome, Player::Receiver)?),
        welfare.map(|w| game.expected_welfare(w, &outcome)).transpose()?,
    ];
    let report = run(game, welfare, config, exact, &trial)?;
    check_support(&report, &outcome, game)?;
    Ok(report)
}
