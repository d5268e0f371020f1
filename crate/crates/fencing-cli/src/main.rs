//! `fencing` — command-line front end for the verification toolkit.
//!
//! Exit codes: 0 = positive verdict, 1 = negative verdict or witness found,
//! 2 = input or usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fencing_core::fence::CrossMonotonicity;
use fencing_core::mechanism::MechanismError;
use fencing_core::scheme::MechanismOutcome;
use fencing_core::{
    budget, check_fence_monotonicity, find_stable_pair, fixtures, gsp, io as fio,
    recover_stable_pair, run_fencing, run_moulin, stable_pairs, verify_gsp_sampled, BidVector,
    CostFunction, CostSharingScheme, FencingMechanism, Money, PlayerSet, SchemeFile,
};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "fencing",
    version,
    about = "Verification toolkit for cost-sharing schemes and mechanisms"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BidArgs {
    /// Bids inline, comma-separated rationals: `3/2,-1,2`.
    #[arg(long, allow_hyphen_values = true)]
    bids: Option<String>,
    /// Bids from a JSON file: an array of rationals.
    #[arg(long)]
    bids_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check Fence Monotonicity, reporting every violated (L, U, condition).
    CheckFm {
        /// Scheme file (JSON).
        scheme: PathBuf,
        /// Refuse larger instances unless raised explicitly.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Run the Fencing Mechanism at a bid vector.
    Run {
        scheme: PathBuf,
        #[command(flatten)]
        bids: BidArgs,
    },
    /// Run the iterative-withdrawal mechanism (cross-monotonic schemes only).
    Moulin {
        scheme: PathBuf,
        #[command(flatten)]
        bids: BidArgs,
    },
    /// Find the stable pair at a bid vector, diagnosing none/multiple.
    StablePair {
        scheme: PathBuf,
        #[command(flatten)]
        bids: BidArgs,
    },
    /// Recover the stable pair from a mechanism outcome and cross-check it
    /// against the direct search.
    Recover {
        scheme: PathBuf,
        #[command(flatten)]
        bids: BidArgs,
        /// Served set to recover from, e.g. `1,2`; defaults to the set the
        /// Fencing Mechanism serves at the bids.
        #[arg(long)]
        served: Option<String>,
    },
    /// Verify group-strategyproofness of the Fencing Mechanism over the
    /// scheme's bid grid.
    VerifyGsp {
        scheme: PathBuf,
        /// Refuse larger instances unless raised explicitly (exhaustive
        /// search grows steeply with n).
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Sample this many grid vectors instead of exhausting the grid.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify voluntary participation, no positive transfers and consumer
    /// sovereignty over the bid grid.
    VerifyAxioms { scheme: PathBuf },
    /// Budget-balance report of a scheme against a cost function.
    Bb {
        scheme: PathBuf,
        /// Cost file (JSON).
        cost: PathBuf,
        /// Only score served sets the Fencing Mechanism actually reaches.
        #[arg(long)]
        reachable_only: bool,
        /// Require every set to recover at least this fraction of its cost.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Name a constraint the scheme violates on the 3-player x-family.
    RefuteLow {
        scheme: PathBuf,
        /// Family parameter, a rational ≥ 1.
        #[arg(long)]
        x: String,
    },
    /// Randomized search for Fence Monotone schemes meeting a recovery
    /// ratio against a cost function.
    SearchBb {
        cost: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the bundled example schemes as JSON files.
    Fixtures {
        /// Output directory.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input_err(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn negative(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_NEGATIVE, message: message.into() }
}

fn load_scheme(path: &Path) -> Result<CostSharingScheme, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    let file = SchemeFile::from_json(&text)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    file.build().map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_cost(path: &Path) -> Result<CostFunction, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    let file = fio::CostFile::from_json(&text)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    file.build().map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_bids(args: &BidArgs, n: usize) -> Result<BidVector, Failure> {
    let bids = match (&args.bids, &args.bids_file) {
        (Some(inline), None) => fio::parse_bids_inline(inline)
            .map_err(|e| input_err(format!("bad bids: {e}")))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
            fio::parse_bids_json(&text)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?
        }
        _ => unreachable!("clap enforces exactly one bid source"),
    };
    if bids.num_players() != n {
        return Err(input_err(format!(
            "{} bids for a {n}-player scheme",
            bids.num_players()
        )));
    }
    Ok(bids)
}

fn parse_money(text: &str, what: &str) -> Result<Money, Failure> {
    Money::parse(text).map_err(|e| input_err(format!("bad {what}: {e}")))
}

fn parse_players(text: &str) -> Result<PlayerSet, Failure> {
    let mut set = PlayerSet::EMPTY;
    for part in text.split(',') {
        let p: usize = part
            .trim()
            .parse()
            .map_err(|_| input_err(format!("bad player {part:?} in served set")))?;
        if p == 0 || p > fencing_core::MAX_PLAYERS {
            return Err(input_err(format!("player {p} out of range")));
        }
        set = set.with(p);
    }
    Ok(set)
}

fn mech_failure(e: MechanismError) -> Failure {
    match e {
        MechanismError::BidCountMismatch { .. } => input_err(e.to_string()),
        _ => negative(e.to_string()),
    }
}

fn print_outcome(format: Format, out: &MechanismOutcome) {
    match format {
        Format::Text => println!("{out}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(out).unwrap()),
    }
}

fn run_cmd(format: Format, cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::CheckFm { scheme, max_n } => {
            let s = load_scheme(&scheme)?;
            if s.num_players() > max_n {
                return Err(input_err(format!(
                    "scheme has {} players; raise --max-n to check instances this large",
                    s.num_players()
                )));
            }
            let report = check_fence_monotonicity(&s);
            match format {
                Format::Text => {
                    if report.is_fence_monotone() {
                        println!(
                            "Fence Monotonicity holds ({} pairs checked)",
                            report.pairs_checked
                        );
                    } else {
                        for v in &report.violations {
                            println!("{v}");
                        }
                    }
                }
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            if report.is_fence_monotone() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::Run { scheme, bids } => {
            let s = load_scheme(&scheme)?;
            let b = load_bids(&bids, s.num_players())?;
            let out = run_fencing(&s, &b).map_err(mech_failure)?;
            let pair = find_stable_pair(&s, &b).map_err(mech_failure)?;
            match format {
                Format::Text => {
                    println!("stable pair {pair}");
                    println!("{out}");
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "stable_pair": pair,
                        "outcome": out,
                    }))
                    .unwrap()
                ),
            }
            Ok(())
        }
        Cmd::Moulin { scheme, bids } => {
            let s = load_scheme(&scheme)?;
            let b = load_bids(&bids, s.num_players())?;
            if let CrossMonotonicity::Violated { player, smaller, larger } =
                fencing_core::check_cross_monotonicity(&s)
            {
                return Err(negative(format!(
                    "scheme is not cross-monotonic: player {player} pays more in {larger} \
                     than in {smaller}"
                )));
            }
            let out = run_moulin(&s, &b).map_err(mech_failure)?;
            print_outcome(format, &out);
            Ok(())
        }
        Cmd::StablePair { scheme, bids } => {
            let s = load_scheme(&scheme)?;
            let b = load_bids(&bids, s.num_players())?;
            let pairs = stable_pairs(&s, &b).map_err(mech_failure)?;
            match format {
                Format::Text => match pairs.as_slice() {
                    [] => println!("none: no (L, U) is stable at {b}"),
                    [p] => println!("{p}"),
                    many => {
                        println!("multiple: {} stable pairs at {b}", many.len());
                        for p in many {
                            println!("  {p}");
                        }
                    }
                },
                Format::Json => println!("{}", serde_json::to_string_pretty(&pairs).unwrap()),
            }
            if pairs.len() == 1 {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::Recover { scheme, bids, served } => {
            let s = load_scheme(&scheme)?;
            let b = load_bids(&bids, s.num_players())?;
            let out = match served {
                Some(text) => MechanismOutcome::from_scheme(&s, parse_players(&text)?),
                None => run_fencing(&s, &b).map_err(mech_failure)?,
            };
            let recovered = recover_stable_pair(&s, &b, &out).map_err(mech_failure)?;
            let direct = find_stable_pair(&s, &b).map_err(mech_failure)?;
            match format {
                Format::Text => {
                    println!("recovered {recovered}");
                    println!(
                        "direct search {direct}: {}",
                        if recovered == direct { "agrees" } else { "DISAGREES" }
                    );
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "recovered": recovered,
                        "direct": direct,
                        "agrees": recovered == direct,
                    }))
                    .unwrap()
                ),
            }
            if recovered == direct {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::VerifyGsp { scheme, max_n, samples, seed } => {
            let s = load_scheme(&scheme)?;
            let fm = check_fence_monotonicity(&s);
            if !fm.is_fence_monotone() {
                return Err(input_err(format!(
                    "scheme is not Fence Monotone ({} violations); the Fencing Mechanism \
                     is undefined on it",
                    fm.violations.len()
                )));
            }
            let grid = gsp::build_grid(&s);
            let m = FencingMechanism::new(&s);
            let verdict = match samples {
                Some(k) => verify_gsp_sampled(&m, &grid, k, seed),
                None => gsp::verify_gsp_with_cap(&m, &grid, max_n).map_err(|e| {
                    input_err(format!("{e}; raise --max-n or pass --samples"))
                })?,
            };
            match format {
                Format::Text => match &verdict {
                    gsp::GspVerdict::GspOnGrid { vectors_checked } => {
                        println!("GSP-on-grid ({vectors_checked} truth vectors checked)")
                    }
                    gsp::GspVerdict::Witness(w) => println!("{w}"),
                },
                Format::Json => println!("{}", serde_json::to_string_pretty(&verdict).unwrap()),
            }
            if verdict.is_gsp_on_grid() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::VerifyAxioms { scheme } => {
            let s = load_scheme(&scheme)?;
            let fm = check_fence_monotonicity(&s);
            if !fm.is_fence_monotone() {
                return Err(input_err(format!(
                    "scheme is not Fence Monotone ({} violations); the Fencing Mechanism \
                     is undefined on it",
                    fm.violations.len()
                )));
            }
            let grid = gsp::build_grid(&s);
            let m = FencingMechanism::new(&s);
            let report = gsp::verify_axioms(&m, &grid, &s);
            match format {
                Format::Text => {
                    let line = |name: &str, v: &Option<gsp::AxiomWitness>| match v {
                        None => println!("{name}: pass"),
                        Some(w) => println!(
                            "{name}: FAIL for player {} at {} -> {}",
                            w.player, w.bids, w.outcome
                        ),
                    };
                    line("voluntary participation", &report.vp_violation);
                    line("no positive transfers", &report.npt_violation);
                    line("consumer sovereignty", &report.cs_violation);
                    println!("({} bid vectors checked)", report.vectors_checked);
                }
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            if report.all_pass() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::Bb { scheme, cost, reachable_only, alpha } => {
            let s = load_scheme(&scheme)?;
            let c = load_cost(&cost)?;
            let report = if reachable_only {
                budget::budget_balance_ratio_reachable(&s, &c)
            } else {
                budget::budget_balance_ratio(&s, &c)
            }
            .map_err(|e| input_err(e.to_string()))?;
            match format {
                Format::Text => print!("{report}"),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            let ok = match alpha {
                Some(a) => report.is_alpha_budget_balanced(&parse_money(&a, "alpha")?),
                None => !report.any_overcharge,
            };
            if ok {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::RefuteLow { scheme, x } => {
            let s = load_scheme(&scheme)?;
            let x = parse_money(&x, "x")?;
            let violation =
                budget::find_family_violation(&s, &x).map_err(|e| input_err(e.to_string()))?;
            match format {
                Format::Text => println!("{violation}"),
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&violation).unwrap())
                }
            }
            // Naming a violated constraint is the negative verdict: every
            // 3-player scheme has one on this family.
            Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
        }
        Cmd::SearchBb { cost, alpha, trials, seed } => {
            let c = load_cost(&cost)?;
            let a = parse_money(&alpha, "alpha")?;
            let result = budget::search_bb_schemes(&c, &a, trials, seed);
            match format {
                Format::Text => match &result.best {
                    Some((s, ratio)) => {
                        println!(
                            "best ratio {ratio} after {} trials ({} candidates kept){}",
                            result.trials,
                            result.fence_monotone_found,
                            if result.meets_target { "" } else { " — below target" },
                        );
                        print!("{s:?}");
                    }
                    None => println!(
                        "no Fence Monotone, never-overcharging scheme in {} trials",
                        result.trials
                    ),
                },
                Format::Json => {
                    let best = result.best.as_ref().map(|(s, ratio)| {
                        json!({
                            "scheme": serde_json::to_value(
                                serde_json::from_str::<serde_json::Value>(
                                    &SchemeFile::from_scheme(s).to_json()
                                )
                                .unwrap()
                            )
                            .unwrap(),
                            "alpha": ratio,
                        })
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "trials": result.trials,
                            "meets_target": result.meets_target,
                            "best": best,
                        }))
                        .unwrap()
                    );
                }
            }
            if result.meets_target {
                Ok(())
            } else {
                Err(Failure { code: EXIT_NEGATIVE, message: String::new() })
            }
        }
        Cmd::Fixtures { out_dir } => {
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| input_err(format!("cannot create {}: {e}", out_dir.display())))?;
            let all = [
                ("ex_a.json", fixtures::ex_a()),
                ("ex_b.json", fixtures::ex_b()),
                ("ex_c.json", fixtures::ex_c()),
                ("cm2.json", fixtures::cm2()),
            ];
            for (name, s) in all {
                let path = out_dir.join(name);
                std::fs::write(&path, SchemeFile::from_scheme(&s).to_json())
                    .map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("cannot size thread pool: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run_cmd(cli.format, cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
