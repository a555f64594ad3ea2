mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use timed_parity::gamefile::{load_game, GameFileError, GameSpec};
use timed_parity::model::Q;
use timed_parity::reduction::{build_finite_game, BuildOptions, FiniteGame, Mode};
use timed_parity::robust::{
    compare_modes, solve_bounded_robust, solve_exact, solve_limit_robust, BoundedRobustParams,
    RobustError, StartState,
};

const WIN: u8 = 0;
const LOSE: u8 = 10;
const USAGE: u8 = 11;
const INPUT: u8 = 12;
const RESOURCES: u8 = 13;
const SOLVER: u8 = 14;
const INCLUSION: u8 = 15;
const OUTPUT: u8 = 16;

#[derive(Parser)]
#[command(
    name = "tpg",
    version,
    about = "Winning sets of timed automaton parity games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether player 1 wins from the initial state.
    #[command(group(ArgGroup::new("mode").required(true).args(["exact", "limit_robust", "bounded_robust"])))]
    Solve {
        game: PathBuf,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        limit_robust: bool,
        #[arg(long, requires_all = ["jitter", "response"])]
        bounded_robust: bool,
        /// Jitter, as `p/q` or an integer.
        #[arg(long, value_parser = parse_rational)]
        jitter: Option<Q>,
        /// Minimum response time, as `p/q` or an integer.
        #[arg(long, value_parser = parse_rational)]
        response: Option<Q>,
        /// Print wall time to stderr.
        #[arg(long)]
        timing: bool,
    },
    /// Write the exact-mode finite game in PGSolver format.
    Export { game: PathBuf, out: PathBuf },
    /// Compare bounded-robust, limit-robust and exact winning.
    Compare {
        game: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        jitter: Q,
        #[arg(long, value_parser = parse_rational)]
        response: Q,
        /// Print wall time to stderr.
        #[arg(long)]
        timing: bool,
    },
}

fn parse_rational(s: &str) -> Result<Q, String> {
    s.trim()
        .parse::<Q>()
        .map_err(|e| format!("`{s}` is not a rational of the form p/q: {e}"))
}

/// Failure of a command, with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<GameFileError> for Failure {
    fn from(e: GameFileError) -> Failure {
        Failure {
            code: INPUT,
            message: e.to_string(),
        }
    }
}

impl From<RobustError> for Failure {
    fn from(e: RobustError) -> Failure {
        let code = match &e {
            RobustError::Build(timed_parity::reduction::BuildError::ResourceLimit { .. }) => {
                RESOURCES
            }
            RobustError::SolverDisagreement { .. } | RobustError::Certificate(_) => SOLVER,
            _ => INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn start_of(spec: &GameSpec) -> StartState {
    StartState {
        location: spec.initial_location,
        valuation: spec.initial_valuation.clone(),
    }
}

fn timing(enabled: bool, started: Instant) {
    if enabled {
        eprintln!("wall_time_ms={}", started.elapsed().as_millis());
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve {
            game,
            exact: _,
            limit_robust,
            bounded_robust,
            jitter,
            response,
            timing: show_time,
        } => {
            let started = Instant::now();
            let spec = load_game(&game)?;
            let start = start_of(&spec);
            let (text, member) = if bounded_robust {
                let p = BoundedRobustParams {
                    jitter: jitter.expect("clap requires --jitter"),
                    response: response.expect("clap requires --response"),
                };
                let r = solve_bounded_robust(&spec.game, p, &[start])?;
                (report::bounded(&game, &spec, p, &r), r.result.member)
            } else if limit_robust {
                let r = solve_limit_robust(&spec.game, &[start])?;
                (report::mode(&game, &spec, "limit-robust", &r), r.member)
            } else {
                let r = solve_exact(&spec.game, &[start])?;
                (report::mode(&game, &spec, "exact", &r), r.member)
            };
            print!("{text}");
            timing(show_time, started);
            Ok(if member { WIN } else { LOSE })
        }
        Command::Export { game, out } => {
            let spec = load_game(&game)?;
            let fg = exact_game(&spec)?;
            let text = fg.to_pgsolver();
            std::fs::write(&out, &text).map_err(|e| Failure {
                code: OUTPUT,
                message: format!("{}: {e}", out.display()),
            })?;
            print!("{}", report::export(&game, &out, &fg));
            Ok(WIN)
        }
        Command::Compare {
            game,
            jitter,
            response,
            timing: show_time,
        } => {
            let started = Instant::now();
            let spec = load_game(&game)?;
            let p = BoundedRobustParams { jitter, response };
            let r = compare_modes(&spec.game, &start_of(&spec), p)?;
            print!("{}", report::compare(&game, &spec, p, &r));
            timing(show_time, started);
            if r.chain_holds() {
                Ok(WIN)
            } else {
                Err(Failure {
                    code: INCLUSION,
                    message: "inclusion chain violated; see the report above".into(),
                })
            }
        }
    }
}

fn exact_game(spec: &GameSpec) -> Result<FiniteGame, Failure> {
    let space = timed_parity::regions::RegionSpace::for_game(&spec.game);
    let r0 = FiniteGame::start_region(&space, spec.initial_location, &spec.initial_valuation);
    build_finite_game(&spec.game, &[r0], &BuildOptions::new(Mode::Exact))
        .map_err(|e| Failure::from(RobustError::from(e)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { WIN };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
