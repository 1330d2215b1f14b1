//! `vom`: command-line front end for mediated and cheap-talk analysis of
//! sender-receiver games.
//!
//! Exit codes: 0 success, 2 invalid input, 3 internal solver invariant.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use vom_core::binary;
use vom_core::mediated;
use vom_core::oracle::{self, OneRoundProtocol};
use vom_core::report::{self, points_csv, CSV_HEADER};
use vom_core::sim::{self, SimConfig, SimulationReport};
use vom_core::vom::{value_of_mediation, CertifiedValue, CtSource, CtValue, VomValue};
use vom_core::{Error, Game, Outcome, Welfare};

#[derive(Parser)]
#[command(name = "vom", version, about = "Value of mediation for sender-receiver games")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Game description (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    game: Option<PathBuf>,
    /// Welfare: us, ur, sum, game (table in the game file) or a JSON file.
    #[arg(long, global = true, value_name = "SPEC")]
    welfare: Option<String>,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output; decimals are rounded.
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cheap-talk value established elsewhere: {"value": "p/q", "citation": "..."}.
    #[arg(long, global = true, value_name = "FILE")]
    ct_certified: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file (and welfare, if given).
    Validate,
    /// Welfare-maximizing mediated equilibrium, or a certificate for a given outcome.
    Mediate {
        /// Check this outcome instead of optimizing.
        #[arg(long, value_name = "FILE")]
        outcome: Option<PathBuf>,
    },
    /// Partition, coefficients, case and feasible region of a two-action game.
    AnalyzeBinary,
    /// Enumerate one-round cheap-talk equilibria.
    Oracle {
        #[arg(long)]
        alphabet: Option<usize>,
        /// Include every equilibrium in the output.
        #[arg(long)]
        emit_equilibria: bool,
        /// Include the convex hull of equilibrium payoffs.
        #[arg(long)]
        convex_hull: bool,
    },
    /// Monte Carlo run of a mediated outcome or a one-round protocol.
    Simulate {
        #[arg(long, value_name = "FILE", conflicts_with = "protocol", required_unless_present = "protocol")]
        outcome: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        protocol: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Print the first N transcripts as JSON lines before the summary.
        #[arg(long, value_name = "N", default_value_t = 0)]
        emit_transcripts: u64,
    },
    /// Value of mediation.
    Vom {
        /// Use only the two-action characterization; fails on other games.
        #[arg(long, conflicts_with = "ct_certified")]
        force_theorem: bool,
    },
    /// Full analysis bundle.
    Report,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// CLI failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_validation() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn load_game(global: &Global) -> Result<(Game, Option<Welfare>), Failure> {
    let path = global
        .game
        .as_ref()
        .ok_or_else(|| input_error("--game FILE is required".into()))?;
    Ok(Game::from_json(&read(path)?)?)
}

/// Resolves `--welfare`; `None` means nothing was given and the game file has
/// no table either.
fn resolve_welfare(global: &Global, game: &Game, from_file: Option<Welfare>) -> Result<Option<Welfare>, Failure> {
    let Some(spec) = global.welfare.as_deref() else {
        return Ok(from_file);
    };
    let w = match spec {
        "us" => Welfare::sender(game)?,
        "ur" => Welfare::receiver(game)?,
        "sum" => Welfare::sum(game)?,
        "game" => from_file.ok_or_else(|| input_error("game file has no welfare table".into()))?,
        path => {
            let value: Value = serde_json::from_str(&read(Path::new(path))?).map_err(Error::from)?;
            // Either a bare table or an object with a `welfare` field.
            let table = value.get("welfare").cloned().unwrap_or(value);
            Welfare::new(game, serde_json::from_value(table).map_err(Error::from)?)?
        }
    };
    Ok(Some(w))
}

fn welfare_or_sum(w: Option<Welfare>, game: &Game) -> Result<Welfare, Failure> {
    Ok(match w {
        Some(w) => w,
        None => Welfare::sum(game)?,
    })
}

fn ct_source(global: &Global, force_theorem: bool) -> Result<CtSource, Failure> {
    if let Some(path) = &global.ct_certified {
        return Ok(CtSource::Certified(CertifiedValue::from_json(&read(path)?)?));
    }
    Ok(if force_theorem {
        CtSource::ForceTheorem
    } else {
        CtSource::Auto
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output serializes")
}

fn table_csv(section: &str, table: &[Vec<vom_core::Rational>]) -> String {
    let mut out = String::new();
    for (t, row) in table.iter().enumerate() {
        for (a, v) in row.iter().enumerate() {
            out += &format!("{section},{t},{a},{}\n", v.to_f64());
        }
    }
    out
}

fn sim_csv(r: &SimulationReport) -> String {
    let mut out = String::from("# decimal rendering, lossy\nquantity,trials,mean,std_error,exact\n");
    let mut row = |name: &str, e: &sim::EmpiricalEstimate| {
        let exact = e.exact.as_ref().map(|x| x.to_f64().to_string()).unwrap_or_default();
        out += &format!("{name},{},{},{},{exact}\n", e.trials, e.mean, e.std_error);
    };
    row("u_s", &r.u_s);
    row("u_r", &r.u_r);
    if let Some(w) = &r.welfare {
        row("welfare", w);
    }
    out
}

enum Output {
    Json(Value),
    Text(String),
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let format = if g.csv { Format::Csv } else { Format::Json };
    match cli.command {
        Command::Validate => {
            let (game, file_w) = load_game(g)?;
            let welfare = resolve_welfare(g, &game, file_w)?;
            let mut out = json!({
                "valid": true,
                "types": game.types(),
                "actions": game.actions(),
                "prior": game.prior(),
                "binary": game.is_binary(),
            });
            if let Some(w) = &welfare {
                out["monotone"] = to_value(&game.check_monotone(w)?);
            }
            Ok(Output::Json(out))
        }
        Command::Mediate { outcome } => {
            let (game, file_w) = load_game(g)?;
            if let Some(path) = outcome {
                let mu: Outcome = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                let cert = mediated::check_equilibrium(&game, &mu)?;
                return Ok(match format {
                    Format::Json => Output::Json(to_value(&cert)),
                    Format::Csv => {
                        let mut out = String::from("# decimal rendering, lossy\nconstraint,slack\n");
                        for e in &cert.slacks {
                            out += &format!("{},{}\n", e.label, e.slack.to_f64());
                        }
                        Output::Text(out)
                    }
                });
            }
            let w = welfare_or_sum(resolve_welfare(g, &game, file_w)?, &game)?;
            let opt = mediated::maximize_welfare(&game, &w)?;
            Ok(match format {
                Format::Json => Output::Json(to_value(&opt)),
                Format::Csv => Output::Text(format!(
                    "# decimal rendering, lossy\nsection,type,action,value\n{}",
                    table_csv("outcome", opt.outcome.rows())
                )),
            })
        }
        Command::AnalyzeBinary => {
            let (game, _) = load_game(g)?;
            let analysis = binary::classify(&game)?;
            Ok(match format {
                Format::Json => Output::Json(to_value(&analysis)),
                Format::Csv => Output::Text(format!("{CSV_HEADER}{}", points_csv("region", &analysis.region_vertices))),
            })
        }
        Command::Oracle {
            alphabet,
            emit_equilibria,
            convex_hull,
        } => {
            let (game, file_w) = load_game(g)?;
            let welfare = resolve_welfare(g, &game, file_w)?;
            let k = alphabet.unwrap_or(game.num_types());
            let set = oracle::enumerate_equilibria(&game, k, welfare.as_ref())?;
            let hull = set.payoff_hull();
            if format == Format::Csv {
                let mut out = String::from("# decimal rendering, lossy\nindex,u_s,u_r,welfare\n");
                for (i, m) in set.members.iter().enumerate() {
                    let w = m.welfare.as_ref().map(|w| w.to_f64().to_string()).unwrap_or_default();
                    out += &format!("{i},{},{},{w}\n", m.u_s.to_f64(), m.u_r.to_f64());
                }
                if convex_hull {
                    out += "\nsection,index,x,y\n";
                    out += &points_csv("hull", &hull.vertices);
                }
                return Ok(Output::Text(out));
            }
            let mut out = json!({
                "requested_alphabet": k,
                "alphabet_size": set.alphabet_size,
                "equilibria": set.members.len(),
                "max_u_s": hull.max_u_s,
                "max_u_r": hull.max_u_r,
                "bound": "lower",
            });
            if let Some(range) = &hull.welfare_range {
                out["max_welfare"] = to_value(&range.1);
            }
            if emit_equilibria {
                out["members"] = to_value(&set.members);
            }
            if convex_hull {
                out["convex_hull"] = to_value(&hull.vertices);
            }
            Ok(Output::Json(out))
        }
        Command::Simulate {
            outcome,
            protocol,
            trials,
            emit_transcripts,
        } => {
            let (game, file_w) = load_game(g)?;
            let welfare = resolve_welfare(g, &game, file_w)?;
            let cfg = SimConfig::new(g.seed, trials).with_transcripts(emit_transcripts);
            let report = match (outcome, protocol) {
                (Some(path), _) => {
                    let mu: Outcome = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                    sim::run_mediated(&game, &mu, welfare.as_ref(), cfg)?
                }
                (None, Some(path)) => {
                    let p: OneRoundProtocol = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                    sim::run_cheaptalk(&game, &p, welfare.as_ref(), cfg)?
                }
                (None, None) => return Err(input_error("--outcome or --protocol is required".into())),
            };
            if format == Format::Csv {
                return Ok(Output::Text(sim_csv(&report)));
            }
            if emit_transcripts > 0 {
                let mut out = String::new();
                for t in &report.transcripts {
                    out += &t.to_json_line();
                    out.push('\n');
                }
                let summary = SimulationReport {
                    transcripts: Vec::new(),
                    ..report
                };
                out += &serde_json::to_string(&json!({ "summary": to_value(&summary) })).expect("serializes");
                return Ok(Output::Text(out));
            }
            Ok(Output::Json(to_value(&report)))
        }
        Command::Vom { force_theorem } => {
            let (game, file_w) = load_game(g)?;
            let w = welfare_or_sum(resolve_welfare(g, &game, file_w)?, &game)?;
            let v = value_of_mediation(&game, &w, &ct_source(g, force_theorem)?)?;
            Ok(match format {
                Format::Json => Output::Json(to_value(&v)),
                Format::Csv => {
                    let ct = match &v.ct_value {
                        CtValue::Exact { value } | CtValue::Certified { value, .. } => {
                            format!("{},{}", value.to_f64(), value.to_f64())
                        }
                        CtValue::Bracket { lower, upper } => format!("{},{}", lower.to_f64(), upper.to_f64()),
                    };
                    let (lo, hi) = match &v.value {
                        VomValue::Finite { value } => (value.to_f64(), value.to_f64()),
                        VomValue::PlusInfinity => (f64::INFINITY, f64::INFINITY),
                        VomValue::FiniteInterval { lo, hi } => (lo.to_f64(), hi.to_f64()),
                        VomValue::UnboundedAbove { lo } => (lo.to_f64(), f64::INFINITY),
                    };
                    Output::Text(format!(
                        "# decimal rendering, lossy\nmediated,ct_lower,ct_upper,vom_lower,vom_upper\n{},{ct},{lo},{hi}\n",
                        v.mediated_value.to_f64()
                    ))
                }
            })
        }
        Command::Report => {
            let (game, file_w) = load_game(g)?;
            let welfare = resolve_welfare(g, &game, file_w)?;
            let r = report::report(&game, welfare.as_ref(), &ct_source(g, false)?)?;
            Ok(match format {
                Format::Json => Output::Json(to_value(&r)),
                Format::Csv => Output::Text(r.to_csv()),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Output::Json(v)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            ExitCode::SUCCESS
        }
        Ok(Output::Text(s)) => {
            print!("{s}");
            if !s.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
