use ames::adaptive::{complete, next_unstable_budget, strategies};
use ames::ejr::{cohesive_groups, ejr_check, DEFAULT_PROJECT_LIMIT};
use ames::election::Election;
use ames::mes::mes;
use ames::pabulib::parse_pabulib;
use ames::rational::{display, parse_decimal, Ratio};
use ames::search::{ames as ames_search, ames_tie_consistent};
use ames::serialize::{
    certificate_from_json, certificate_to_json, completion_to_json, outcome_to_json,
    trace_to_json,
};
use ames::solution::EqualSharesSolution;
use ames::stability::{verify, verify_certificate, CertificateReject};
use ames::experiment::{experiment_topup, report_to_csv, DEFAULT_RUNS};
use clap::{Args, Parser, Subcommand};
use num::BigInt;
use std::path::PathBuf;
use std::process::ExitCode;

/// Adaptive equal-shares participatory budgeting toolkit.
#[derive(Parser)]
#[command(name = "ames", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Pabulib .pb election file
    file: PathBuf,
    /// Override the total budget (decimal or fraction)
    #[arg(long)]
    budget: Option<String>,
    /// File with one project id per line, highest priority first
    #[arg(long)]
    tie_order: Option<PathBuf>,
    /// Machine-readable JSON on stdout
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive search from scratch
    Run {
        #[command(flatten)]
        input: InputArgs,
        /// Write the step trace as JSON to this path
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Resolve priority ties by trading towards higher priority
        #[arg(long)]
        tie_consistent: bool,
    },
    /// Run the baseline method of equal shares
    Mes {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Raise a virtual budget until the real one is exhausted
    Complete {
        #[command(flatten)]
        input: InputArgs,
        /// restart-mes, adaptive-ames or skip-ames
        #[arg(long, default_value = "adaptive-ames")]
        strategy: String,
        /// Per-voter budget increment
        #[arg(long)]
        step: Option<String>,
    },
    /// Check a stability certificate; exits 0 on accept, 2 on reject
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Certificate JSON produced by `certify`
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Compute the outcome and emit its stability certificate
    Certify {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Print the next total budget at which the outcome can change
    Skip {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Brute-force extended-justified-representation check of the outcome
    Ejr {
        #[command(flatten)]
        input: InputArgs,
        /// Maximum project count the oracle will attempt
        #[arg(long)]
        max_projects: Option<usize>,
    },
    /// Top-up experiment; CSV on stdout
    Experiment {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_RUNS)]
        runs: usize,
    },
}

fn load_election(input: &InputArgs) -> Result<Election, String> {
    let text = std::fs::read_to_string(&input.file)
        .map_err(|e| format!("cannot read {}: {e}", input.file.display()))?;
    let mut election = parse_pabulib(&text).map_err(|e| e.to_string())?.election;
    if let Some(budget) = &input.budget {
        let budget = parse_decimal(budget).map_err(|e| e.to_string())?;
        election = election.with_budget(budget).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &input.tie_order {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let order: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        election = election.with_priority_order(&order).map_err(|e| e.to_string())?;
    }
    Ok(election)
}

fn print_outcome(
    election: &Election,
    solution: &EqualSharesSolution,
    json: bool,
) -> Result<(), String> {
    let outcome = solution.outcome();
    if json {
        let payments: Vec<(usize, usize, Ratio)> = solution
            .iter()
            .flat_map(|(p, voters)| {
                let price = election.cost(p) / BigInt::from(voters.len());
                voters
                    .iter()
                    .map(move |&i| (i, p, price.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let text =
            outcome_to_json(&outcome, &payments, election).map_err(|e| e.to_string())?;
        println!("{text}");
    } else {
        for &p in &outcome {
            let price = election.cost(p) / BigInt::from(solution.supporter_count(p));
            println!(
                "{}\tcost {}\tsupporters {}\tprice {}",
                election.project(p).id,
                display(election.cost(p)),
                solution.supporter_count(p),
                display(&price)
            );
        }
        println!("total {}", display(&election.total_cost(&outcome)));
    }
    Ok(())
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            input,
            trace,
            tie_consistent,
        } => {
            let election = load_election(&input)?;
            let empty = EqualSharesSolution::empty();
            let (solution, steps) = if tie_consistent {
                ames_tie_consistent(&election, &empty)
            } else {
                ames_search(&election, &empty)
            }
            .map_err(|e| e.to_string())?;
            if let Some(path) = trace {
                let text = trace_to_json(&steps, &election).map_err(|e| e.to_string())?;
                std::fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            print_outcome(&election, &solution, input.json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mes { input } => {
            let election = load_election(&input)?;
            let (w, loads) = mes(&election);
            if input.json {
                let payments: Vec<(usize, usize, Ratio)> = loads
                    .iter()
                    .map(|(i, p, x)| (i, p, x.clone()))
                    .collect();
                let text =
                    outcome_to_json(&w, &payments, &election).map_err(|e| e.to_string())?;
                println!("{text}");
            } else {
                for &p in &w {
                    println!(
                        "{}\tcost {}",
                        election.project(p).id,
                        display(election.cost(p))
                    );
                }
                println!("total {}", display(&election.total_cost(&w)));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Complete {
            input,
            strategy,
            step,
        } => {
            let election = load_election(&input)?;
            let step = match step {
                Some(s) => Some(parse_decimal(&s).map_err(|e| e.to_string())?),
                None => None,
            };
            let known: Vec<&str> = strategies().iter().map(|s| s.name()).collect();
            if !known.contains(&strategy.as_str()) {
                return Err(format!(
                    "unknown strategy {strategy:?}; expected one of {}",
                    known.join(", ")
                ));
            }
            let result =
                complete(&election, &strategy, step).map_err(|e| e.to_string())?;
            if input.json {
                let text =
                    completion_to_json(&result, &election).map_err(|e| e.to_string())?;
                println!("{text}");
            } else {
                println!(
                    "strategy {} final virtual budget {} ({} iterations)",
                    result.strategy,
                    display(&result.virtual_budget),
                    result.iterations.len()
                );
                for &p in &result.final_outcome {
                    println!("{}", election.project(p).id);
                }
                println!(
                    "total {} of {}{}",
                    display(&election.total_cost(&result.final_outcome)),
                    display(&result.real_budget),
                    if result.exhaustive { " (exhaustive)" } else { "" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, certificate } => {
            let election = load_election(&input)?;
            let text = std::fs::read_to_string(&certificate)
                .map_err(|e| format!("cannot read {}: {e}", certificate.display()))?;
            let cert = match certificate_from_json(&text, &election) {
                Ok(c) => c,
                Err(e) => {
                    let reject = CertificateReject::MalformedSolution(e.to_string());
                    print_verdict(input.json, Some(&reject));
                    return Ok(ExitCode::from(2));
                }
            };
            match verify_certificate(&cert, &election) {
                Ok(()) => {
                    print_verdict(input.json, None);
                    Ok(ExitCode::SUCCESS)
                }
                Err(reject) => {
                    print_verdict(input.json, Some(&reject));
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Certify { input } => {
            let election = load_election(&input)?;
            let (solution, _) =
                ames_search(&election, &EqualSharesSolution::empty()).map_err(|e| e.to_string())?;
            let (verdict, cert) = verify(&solution, &election).map_err(|e| e.to_string())?;
            if verdict.is_err() {
                return Err("search result unexpectedly unstable".into());
            }
            let text = certificate_to_json(&cert, &election).map_err(|e| e.to_string())?;
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Skip { input } => {
            let election = load_election(&input)?;
            let (solution, _) =
                ames_search(&election, &EqualSharesSolution::empty()).map_err(|e| e.to_string())?;
            let next = next_unstable_budget(&solution, &election).map_err(|e| e.to_string())?;
            match next {
                Some(b) => {
                    if input.json {
                        println!("{{\"next_unstable_budget\": \"{}\"}}", display(&b));
                    } else {
                        println!("{}", display(&b));
                    }
                }
                None => {
                    if input.json {
                        println!("{{\"next_unstable_budget\": null}}");
                    } else {
                        println!("never");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ejr {
            input,
            max_projects,
        } => {
            let election = load_election(&input)?;
            let limit = max_projects
                .or_else(|| {
                    std::env::var("AMES_MAX_ORACLE_PROJECTS")
                        .ok()
                        .and_then(|v| v.parse().ok())
                })
                .unwrap_or(DEFAULT_PROJECT_LIMIT);
            let (solution, _) =
                ames_search(&election, &EqualSharesSolution::empty()).map_err(|e| e.to_string())?;
            let outcome = solution.outcome();
            let verdict = ejr_check(&election, &outcome, limit).map_err(|e| e.to_string())?;
            let groups = cohesive_groups(&election, limit).map_err(|e| e.to_string())?;
            match verdict {
                None => {
                    println!(
                        "pass ({} cohesive group{})",
                        groups.len(),
                        if groups.len() == 1 { "" } else { "s" }
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Some(v) => {
                    let ids: Vec<&str> = v
                        .projects
                        .iter()
                        .map(|&p| election.project(p).id.as_str())
                        .collect();
                    println!(
                        "violation: projects {{{}}} group size {} max utility {} < {}",
                        ids.join(","),
                        v.group.len(),
                        v.max_utility,
                        v.required
                    );
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Experiment { input, runs } => {
            let election = load_election(&input)?;
            let report = experiment_topup(&election, runs).map_err(|e| e.to_string())?;
            print!("{}", report_to_csv(&report));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_verdict(json: bool, reject: Option<&CertificateReject>) {
    match reject {
        None => {
            if json {
                println!("{{\"verdict\": \"accept\"}}");
            } else {
                println!("accept");
            }
        }
        Some(r) => {
            if json {
                println!(
                    "{{\"verdict\": \"reject\", \"reason\": {}}}",
                    serde_json::to_string(&r.to_string()).unwrap()
                );
            } else {
                println!("reject: {r}");
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
