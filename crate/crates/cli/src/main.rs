//! `ltlf-rl`: compile LTLf task files, train strategy/seed matrices and run
//! the verification suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ltlf_rl::experiment::{
    compile_task, matrix, run_matrix, summarize, verify, write_runs, ExperimentError, RunOptions, TaskFile,
};

/// Directory that receives all outputs; `./out` when unset.
const OUT_ENV: &str = "LTLF_RL_OUT";

#[derive(Parser)]
#[command(name = "ltlf-rl", version, about = "LTLf-specified tasks for off-policy reinforcement learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a task file and write its DFA, DOT, RDDL and rank artifacts.
    Compile { task: PathBuf },
    /// Train every (strategy, seed) run of a task and summarize them.
    Train {
        task: PathBuf,
        /// Concurrent runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Overrides the task's strategy list.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        strategies: Option<Vec<String>>,
        /// Overrides the task's seed list.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Overrides the task's step budget.
        #[arg(long)]
        total_steps: Option<usize>,
        /// Advance the automaton on the pre-step label instead of the post-step one.
        #[arg(long)]
        delayed_automaton_step: bool,
    },
    /// Run the acceptance checks and print one line per criterion.
    Verify {
        /// Include the multi-seed training comparisons.
        #[arg(long)]
        full: bool,
        /// Run only these criteria.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

fn out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"))
}

fn compile(path: &Path) -> Result<(), ExperimentError> {
    let task = TaskFile::load(path)?;
    let compiled = compile_task(&task)?;
    let dir = out_root().join(&task.name);
    compiled.write_artifacts(&dir, task.reward)?;
    print!("{}", compiled.describe());
    println!("artifacts written to {}", dir.display());
    Ok(())
}

fn train(
    path: &Path,
    jobs: usize,
    strategies: Option<Vec<String>>,
    seeds: Option<Vec<u64>>,
    total_steps: Option<usize>,
    delayed: bool,
) -> Result<(), ExperimentError> {
    let mut task = TaskFile::load(path)?;
    if let Some(s) = strategies {
        task.strategies = s;
    }
    if let Some(s) = seeds {
        task.seeds = s;
    }
    if total_steps.is_some() {
        task.total_steps = total_steps;
    }
    for s in &task.strategies {
        ltlf_rl::learn::strategy(s).map_err(|e| ExperimentError::Config(e.to_string()))?;
    }
    task.train_config("BASE", 0, task.alpha)
        .validate()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let compiled = compile_task(&task)?;
    let dir = out_root().join(&task.name);
    compiled.write_artifacts(&dir, task.reward)?;

    let specs = matrix(&task, &task.strategies, &task.seeds);
    eprintln!("{} runs on {} thread(s)", specs.len(), jobs.max(1));
    let opts = RunOptions {
        delayed_automaton_step: delayed,
    };
    let runs = run_matrix(&task, &compiled, &specs, jobs, opts)?;
    write_runs(&dir.join("runs"), &runs)?;
    let censor = task.train_config("BASE", 0, task.alpha).total_steps + 1;
    let summary = summarize(&runs, censor);
    summary.write(&dir)?;
    println!("strategy  alpha  runs  first-success  reward/1k-steps  steps-to-80%  success-rate");
    for g in &summary.groups {
        println!(
            "{:<8}  {:<5}  {:>4}  {:>13}  {:>15.3}  {:>12}  {:>12.3}",
            g.strategy,
            g.alpha,
            g.runs,
            g.median_first_success,
            g.median_reward_per_kstep,
            g.median_steps_to_80,
            g.mean_success_rate
        );
    }
    if let Some(p) = summary.ec_vs_base_percent {
        println!("EC vs BASE reward per step: {p:+.2}%");
    }
    println!("results written to {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile { task } => compile(&task),
        Command::Train {
            task,
            jobs,
            strategies,
            seeds,
            total_steps,
            delayed_automaton_step,
        } => train(&task, jobs, strategies, seeds, total_steps, delayed_automaton_step),
        Command::Verify { full, only } => {
            let reports = match only {
                Some(ids) => ids.into_iter().map(verify::run_criterion).collect(),
                None => verify::run_all(full),
            };
            let mut ok = true;
            for r in &reports {
                println!("{r}");
                ok &= r.passed;
            }
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(2) };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
