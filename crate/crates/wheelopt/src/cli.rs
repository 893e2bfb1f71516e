//! Command-line front end.
//!
//! Exit codes are a stable contract: 0 for success (and feasible results),
//! 1 for usage or input errors, 2 for infeasible outcomes.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::datagen::{generate_schedule, DemandGenSpec};
use crate::experiments::{default_initial_wheel, run_sweep};
use crate::ilp::{relaxed_total_cost, solve_instance, IlpSolution};
use crate::io::{
    format_f64, parse_wheel, read_demand_csv, read_instance, read_sweep_spec, wheel_to_string,
    write_demand_csv, write_sweep_csv, Instance,
};
use crate::model::{DemandSchedule, ProductWheel};
use crate::sa::{optimize, SaConfig};
use crate::simulator::{simulate, simulate_no_skip, SimulationResult};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT_ERROR: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "wheelopt",
    version,
    about = "Product wheel scheduling: simulate, optimize, and sweep"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a demand CSV from an instance's demand parameters.
    GenDemand {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one wheel under the trigger-point skipping policy.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        /// Demand CSV; defaults to the instance's demand section.
        #[arg(long)]
        demand: Option<PathBuf>,
        /// Batch counts, comma-separated, one per item.
        #[arg(long)]
        wheel: String,
    },
    /// Optimize the wheel with the exact no-skip solver or annealing.
    Optimize {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        demand: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Initial wheel for annealing (defaults to a demand-balanced start).
        #[arg(long)]
        wheel: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Annealing iterations W.
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        /// Cooling constant C (defaults to 5% of the initial feasible RMS).
        #[arg(long)]
        cooling: Option<f64>,
        /// Maximum per-coordinate proposal perturbation.
        #[arg(long, default_value_t = 1)]
        step: i64,
        /// Search box bound for the exact solver.
        #[arg(long = "lambda-max", default_value_t = 100)]
        lambda_max: i64,
        /// Optional machine-readable result file (TOML).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep from a spec file and write a result CSV.
    Sweep {
        /// Sweep spec file (TOML).
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ilp,
    Sa,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT_ERROR,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT_ERROR
        }
    }
}

fn dispatch(command: Command) -> Result<u8, String> {
    match command {
        Command::GenDemand {
            instance,
            seed,
            out,
        } => cmd_gen_demand(&instance, seed, &out),
        Command::Simulate {
            instance,
            demand,
            wheel,
        } => cmd_simulate(&instance, demand.as_deref(), &wheel),
        Command::Optimize {
            instance,
            demand,
            method,
            wheel,
            seed,
            iterations,
            cooling,
            step,
            lambda_max,
            out,
        } => cmd_optimize(
            &instance,
            demand.as_deref(),
            method,
            wheel.as_deref(),
            seed,
            iterations,
            cooling,
            step,
            lambda_max,
            out.as_deref(),
        ),
        Command::Sweep { spec, out } => cmd_sweep(&spec, &out),
    }
}

fn load_instance_and_demand(
    instance_path: &Path,
    demand_path: Option<&Path>,
) -> Result<(Instance, DemandSchedule), String> {
    let instance = read_instance(instance_path).map_err(|e| e.to_string())?;
    let schedule = match demand_path {
        Some(path) => read_demand_csv(path).map_err(|e| e.to_string())?,
        None => instance.demand.clone().ok_or_else(|| {
            format!(
                "{} has no demand section; pass --demand <csv>",
                instance_path.display()
            )
        })?,
    };
    schedule
        .matches(&instance.config)
        .map_err(|e| format!("demand schedule: {e}"))?;
    Ok((instance, schedule))
}

fn cmd_gen_demand(instance_path: &Path, seed: u64, out: &Path) -> Result<u8, String> {
    let instance = read_instance(instance_path).map_err(|e| e.to_string())?;
    let spec = DemandGenSpec::from_items(&instance.items, instance.config.num_periods, seed);
    let schedule = generate_schedule(&spec).map_err(|e| e.to_string())?;
    write_demand_csv(out, &schedule).map_err(|e| e.to_string())?;
    println!(
        "wrote {} demand rows ({} items x {} periods, seed {seed}) to {}",
        schedule.num_items() * schedule.num_periods(),
        schedule.num_items(),
        schedule.num_periods(),
        out.display()
    );
    Ok(EXIT_OK)
}

fn print_simulation_report(result: &SimulationResult) {
    println!("feasible: {}", result.feasible);
    if let Some(violation) = &result.violation {
        println!("violation: {violation}");
    }
    println!("rms_wheel_time: {}", format_f64(result.rms_wheel_time));
    println!("total_cost: {}", format_f64(result.total_cost));
    println!("period,wheel_time,cycles,produced,setup_cost,inventory_cost");
    for record in &result.periods {
        let produced: String = record
            .produced
            .iter()
            .map(|&p| if p { '1' } else { '0' })
            .collect();
        println!(
            "{},{},{},{},{},{}",
            record.period_index,
            format_f64(record.period_wheel_time),
            record.cycles,
            produced,
            format_f64(record.setup_cost),
            format_f64(record.inventory_cost),
        );
    }
}

fn cmd_simulate(
    instance_path: &Path,
    demand_path: Option<&Path>,
    wheel_text: &str,
) -> Result<u8, String> {
    let (instance, schedule) = load_instance_and_demand(instance_path, demand_path)?;
    let wheel = parse_wheel(wheel_text).map_err(|e| e.to_string())?;
    if wheel.len() != instance.items.len() {
        return Err(format!(
            "wheel: expected {} batch counts, got {}",
            instance.items.len(),
            wheel.len()
        ));
    }
    let result = simulate(&wheel, &schedule, &instance.items, &instance.config)
        .map_err(|e| e.to_string())?;
    print_simulation_report(&result);
    Ok(if result.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

#[derive(Serialize)]
struct OptimizeReport {
    method: String,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wheel: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rms_wheel_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relaxed_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulated_total_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulated_feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    at_lambda_max: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accepted: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_iteration: Option<String>,
}

fn write_report(out: Option<&Path>, report: &OptimizeReport) -> Result<(), String> {
    if let Some(path) = out {
        let text = toml::to_string(report).map_err(|e| e.to_string())?;
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    instance_path: &Path,
    demand_path: Option<&Path>,
    method: MethodArg,
    wheel_text: Option<&str>,
    seed: u64,
    iterations: usize,
    cooling: Option<f64>,
    step: i64,
    lambda_max: i64,
    out: Option<&Path>,
) -> Result<u8, String> {
    let (instance, schedule) = load_instance_and_demand(instance_path, demand_path)?;
    let items = &instance.items;
    let config = &instance.config;

    match method {
        MethodArg::Ilp => {
            if lambda_max < 1 {
                return Err("lambda-max: must be >= 1".to_string());
            }
            let solution =
                solve_instance(&schedule, items, config, lambda_max).map_err(|e| e.to_string())?;
            println!("method: ilp");
            match solution {
                IlpSolution::Infeasible => {
                    println!("status: infeasible");
                    write_report(
                        out,
                        &OptimizeReport {
                            method: "ilp".to_string(),
                            feasible: false,
                            wheel: None,
                            rms_wheel_time: None,
                            relaxed_cost: None,
                            simulated_total_cost: None,
                            simulated_feasible: None,
                            at_lambda_max: None,
                            iterations: None,
                            accepted: None,
                            best_iteration: None,
                        },
                    )?;
                    Ok(EXIT_INFEASIBLE)
                }
                IlpSolution::Optimal(opt) => {
                    let relaxed = relaxed_total_cost(&opt.wheel, &schedule, items, config)
                        .map_err(|e| e.to_string())?;
                    let sim = simulate_no_skip(&opt.wheel, &schedule, items, config)
                        .map_err(|e| e.to_string())?;
                    println!("status: optimal");
                    println!("wheel: {}", wheel_to_string(&opt.wheel));
                    println!("wheel_time: {}", format_f64(opt.objective));
                    println!("relaxed_cost: {}", format_f64(relaxed));
                    println!(
                        "simulated_rms_wheel_time: {}",
                        format_f64(sim.rms_wheel_time)
                    );
                    println!("simulated_total_cost: {}", format_f64(sim.total_cost));
                    println!("simulated_feasible: {}", sim.feasible);
                    println!("at_lambda_max: {}", opt.at_lambda_max);
                    write_report(
                        out,
                        &OptimizeReport {
                            method: "ilp".to_string(),
                            feasible: true,
                            wheel: Some(opt.wheel.batches().to_vec()),
                            rms_wheel_time: Some(opt.objective),
                            relaxed_cost: Some(relaxed),
                            simulated_total_cost: Some(sim.total_cost),
                            simulated_feasible: Some(sim.feasible),
                            at_lambda_max: Some(opt.at_lambda_max),
                            iterations: None,
                            accepted: None,
                            best_iteration: None,
                        },
                    )?;
                    Ok(EXIT_OK)
                }
            }
        }
        MethodArg::Sa => {
            let explicit = match wheel_text {
                Some(text) => {
                    let wheel = parse_wheel(text).map_err(|e| e.to_string())?;
                    if wheel.len() != items.len() {
                        return Err(format!(
                            "wheel: expected {} batch counts, got {}",
                            items.len(),
                            wheel.len()
                        ));
                    }
                    Some(wheel)
                }
                None => None,
            };
            let ladder = default_initial_wheel(&schedule, items, config);

            let initial: ProductWheel = match (&explicit, &ladder) {
                (Some(wheel), _) => wheel.clone(),
                (None, Some((wheel, _))) => wheel.clone(),
                (None, None) => {
                    println!("method: sa");
                    println!("status: infeasible");
                    println!("note: no feasible starting wheel found");
                    return Ok(EXIT_INFEASIBLE);
                }
            };

            let cooling = match cooling {
                Some(c) if c > 0.0 => c,
                Some(c) => return Err(format!("cooling: must be > 0, got {c}")),
                None => {
                    // Calibrate from the initial wheel when it is feasible,
                    // else from the ladder's feasible start.
                    let initial_sim =
                        simulate(&initial, &schedule, items, config).map_err(|e| e.to_string())?;
                    let rms = if initial_sim.feasible {
                        Some(initial_sim.rms_wheel_time)
                    } else {
                        ladder.as_ref().map(|(_, rms)| *rms)
                    };
                    match rms {
                        Some(rms) if rms > 0.0 => 0.05 * rms,
                        _ => {
                            return Err(
                                "cooling: no feasible wheel to calibrate from; pass --cooling"
                                    .to_string(),
                            )
                        }
                    }
                }
            };

            let sa_config = SaConfig {
                cooling,
                iterations,
                max_proposal_attempts: SaConfig::DEFAULT_MAX_PROPOSAL_ATTEMPTS,
                proposal_step: step,
                seed,
            };
            sa_config.validate().map_err(|e| e.to_string())?;

            println!("method: sa");
            match optimize(&initial, &schedule, items, config, &sa_config) {
                Err(err) => {
                    println!("status: infeasible");
                    println!("note: {err}");
                    Ok(EXIT_INFEASIBLE)
                }
                Ok(trace) => {
                    let sim = simulate(&trace.best_wheel, &schedule, items, config)
                        .map_err(|e| e.to_string())?;
                    let best_iteration = trace
                        .best_iteration
                        .map(|k| k.to_string())
                        .unwrap_or_else(|| "initial".to_string());
                    println!("status: feasible");
                    println!("wheel: {}", wheel_to_string(&trace.best_wheel));
                    println!("rms_wheel_time: {}", format_f64(trace.best_rms));
                    println!("simulated_total_cost: {}", format_f64(sim.total_cost));
                    println!("cooling: {}", format_f64(cooling));
                    println!("iterations: {}", trace.iterations.len());
                    println!("accepted: {}", trace.accepted_count());
                    println!("best_iteration: {best_iteration}");
                    println!("bootstrap_attempts: {}", trace.bootstrap_attempts);
                    write_report(
                        out,
                        &OptimizeReport {
                            method: "sa".to_string(),
                            feasible: true,
                            wheel: Some(trace.best_wheel.batches().to_vec()),
                            rms_wheel_time: Some(trace.best_rms),
                            relaxed_cost: None,
                            simulated_total_cost: Some(sim.total_cost),
                            simulated_feasible: Some(sim.feasible),
                            at_lambda_max: None,
                            iterations: Some(trace.iterations.len()),
                            accepted: Some(trace.accepted_count()),
                            best_iteration: Some(best_iteration),
                        },
                    )?;
                    Ok(EXIT_OK)
                }
            }
        }
    }
}

fn cmd_sweep(spec_path: &Path, out: &Path) -> Result<u8, String> {
    let spec = read_sweep_spec(spec_path).map_err(|e| e.to_string())?;
    let rows = run_sweep(&spec).map_err(|e| e.to_string())?;
    write_sweep_csv(out, &rows).map_err(|e| e.to_string())?;
    let feasible = rows.iter().filter(|r| r.feasible).count();
    println!(
        "wrote {} rows ({} feasible) to {}",
        rows.len(),
        feasible,
        out.display()
    );
    Ok(EXIT_OK)
}
