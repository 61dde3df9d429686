//! `entmeter` command-line tool.
//!
//! Exactly one JSON document (or CSV table) goes to stdout; diagnostics go to
//! stderr. Exit codes: 0 success, 2 input error, 3 certification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use entmeter::invariants::ObservableSpec;
use entmeter::mixedbounds::{concurrence_lower_bound, inequality_audit, v_operator, werner_sweep, BoundConfig};
use entmeter::monotones::{concurrence_pure, definition, evaluate_monotone, MonotoneKind, Normalization};
use entmeter::oracles::{
    ckw_tangle, convex_roof_search, negativity, reduced_entropy, schmidt_g_concurrence, wootters_concurrence,
    GConvention, RoofSearch,
};
use entmeter::report::BoundReport;
use entmeter::source_sim::{run_experiment, ExperimentConfig};
use entmeter::tensorkit::io::{load_state, LoadedState, StateFile};
use entmeter::tensorkit::LegLayout;

const EXIT_INPUT: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "entmeter", version, about = "Entanglement monotones from multi-copy invariant observables")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "ENTMETER_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a pure-state monotone.
    Pure {
        /// State file or built-in name (singlet, ghz, w, maxent3, maxent4, ...).
        #[arg(long)]
        state: String,
        #[arg(long)]
        monotone: MonotoneKind,
        /// Report the uncalibrated root.
        #[arg(long)]
        raw: bool,
    },
    /// Lower bound on the concurrence of a bipartite state.
    Bound {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.5)]
        alpha1: f64,
        /// Report the signed root of a negative trace instead of 0.
        #[arg(long)]
        no_clamp: bool,
        /// Random tuples used to certify the bound operator.
        #[arg(long, default_value_t = 1000)]
        audit_trials: usize,
    },
    /// Check the product inequality behind the concurrence bound.
    Audit {
        #[arg(long, default_value_t = 0.5)]
        alpha1: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Negate the operator (negative control).
        #[arg(long, hide = true)]
        flip_sign: bool,
    },
    /// Bound versus closed-form concurrence across the Werner family.
    SweepWerner {
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha1: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a simulated measurement from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-form or brute-force reference values.
    Oracle {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum)]
        which: OracleKind,
        /// Iterations for the convex-roof search.
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
    },
    /// Write a state file for a built-in state.
    State {
        #[arg(long)]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Wootters,
    Tangle,
    Gconc,
    Negativity,
    Entropy,
    Roof,
}

enum Failure {
    Input(String),
    Certification(String),
}

impl From<entmeter::Error> for Failure {
    fn from(e: entmeter::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Output::Json(v)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            ExitCode::SUCCESS
        }
        Ok(Output::Text(t)) => {
            print!("{t}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Certification(msg)) => {
            eprintln!("certification failed: {msg}");
            ExitCode::from(EXIT_CERTIFICATION)
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match cli.command {
        Command::Pure { state, monotone, raw } => {
            let psi = match load_state(&state)? {
                LoadedState::Pure(psi) => psi,
                LoadedState::Density(_) => {
                    return Err(Failure::Input("pure monotones need a pure state, got a density matrix".into()))
                }
            };
            let norm = if raw { Normalization::Raw } else { Normalization::Calibrated };
            let e = evaluate_monotone(definition(monotone), &psi, norm)?;
            Ok(Output::Json(json!({
                "monotone": monotone.name(),
                "value": e.value,
                "raw_expectation": e.raw_expectation,
            })))
        }
        Command::Bound { state, alpha1, no_clamp, audit_trials } => {
            let config = BoundConfig { alpha1, clamp: !no_clamp, ..BoundConfig::default() };
            config.validate()?;
            let rho = load_state(&state)?.to_density();
            let b = concurrence_lower_bound(&rho, &config)?;
            let oracle = (rho.layout().dims() == [2, 2]).then(|| wootters_concurrence(&rho)).transpose()?;
            let (certified, violations) = if audit_trials > 0 {
                let dims = rho.layout().dims();
                let a = inequality_audit(
                    &v_operator(&config)?,
                    &LegLayout::bipartite(dims[0], dims[1])?,
                    concurrence_pure,
                    audit_trials,
                    &mut rng,
                )?;
                (a.certified, a.violations)
            } else {
                (false, 0)
            };
            let report = BoundReport {
                bound: b.bound,
                raw_trace: b.raw_trace,
                alpha1,
                oracle,
                certified,
                violations,
                ..Default::default()
            };
            Ok(Output::Json(to_value(&report)))
        }
        Command::Audit { alpha1, trials, flip_sign } => {
            let mut spec: ObservableSpec = v_operator(&BoundConfig::new(alpha1)?)?;
            if flip_sign {
                spec = spec.scaled(-1.0);
            }
            let a = inequality_audit(&spec, &LegLayout::bipartite(2, 2)?, concurrence_pure, trials, &mut rng)?;
            let doc = json!({
                "alpha1": alpha1,
                "trials": a.trials,
                "violations": a.violations,
                "worst_margin": a.worst_margin,
                "certified": a.certified,
            });
            if a.certified {
                Ok(Output::Json(doc))
            } else {
                // the report still goes to stdout so scripts can inspect it
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                Err(Failure::Certification(format!("{} of {} tuples violate the inequality", a.violations, a.trials)))
            }
        }
        Command::SweepWerner { points, alpha1, format } => {
            let rows = werner_sweep(points, &BoundConfig::new(alpha1)?)?;
            Ok(match format {
                Format::Json => Output::Json(to_value(&rows)),
                Format::Csv => {
                    let mut out = String::from("p,bound,wootters,gap\n");
                    for r in rows {
                        out.push_str(&format!("{},{},{},{}\n", r.p, r.bound, r.wootters, r.gap));
                    }
                    Output::Text(out)
                }
            })
        }
        Command::Experiment { config } => {
            let text =
                std::fs::read_to_string(&config).map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            Ok(Output::Json(to_value(&run_experiment(&cfg)?)))
        }
        Command::Oracle { state, which, iterations } => {
            let loaded = load_state(&state)?;
            let pure = || match &loaded {
                LoadedState::Pure(p) => Ok(p.clone()),
                LoadedState::Density(_) => Err(Failure::Input("this oracle needs a pure state".into())),
            };
            let (name, value) = match which {
                OracleKind::Wootters => ("wootters", wootters_concurrence(&loaded.to_density())?),
                OracleKind::Tangle => ("tangle", ckw_tangle(&pure()?)?),
                OracleKind::Gconc => ("gconc", schmidt_g_concurrence(&pure()?, GConvention::Normalized)?),
                OracleKind::Negativity => ("negativity", negativity(&loaded.to_density(), &[0])?),
                OracleKind::Entropy => ("entropy", reduced_entropy(&pure()?, &[0])?),
                OracleKind::Roof => {
                    let settings = RoofSearch { iterations, ..RoofSearch::default() };
                    let rho = loaded.to_density();
                    ("roof", convex_roof_search(&rho, concurrence_pure, settings, &mut rng)?.0)
                }
            };
            Ok(Output::Json(json!({ "which": name, "value": value })))
        }
        Command::State { name } => {
            let loaded = load_state(&name)?;
            Ok(Output::Text(StateFile::from_loaded(&loaded).to_json()? + "\n"))
        }
    }
}
