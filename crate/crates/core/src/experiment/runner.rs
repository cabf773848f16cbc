//! Seeded training matrices and the summary tables derived from their
//! per-run logs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::task::{CompiledTask, TaskFile};
use super::ExperimentError;
use crate::learn::{median, train, MetricsLog};

/// One cell of the training matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub strategy: String,
    pub alpha: f64,
    pub seed: u64,
}

impl RunSpec {
    pub fn file_name(&self) -> String {
        format!("{}_a{}_s{}.csv", self.strategy, self.alpha, self.seed)
    }

    /// Inverse of [`RunSpec::file_name`].
    pub fn parse_file_name(name: &str) -> Option<RunSpec> {
        let stem = name.strip_suffix(".csv")?;
        let (rest, seed) = stem.rsplit_once("_s")?;
        let (strategy, alpha) = rest.rsplit_once("_a")?;
        Some(RunSpec {
            strategy: strategy.to_string(),
            alpha: alpha.parse().ok()?,
            seed: seed.parse().ok()?,
        })
    }
}

/// Strategies crossed with seeds; EC additionally crossed with the swept
/// exponents.
pub fn matrix(task: &TaskFile, strategies: &[String], seeds: &[u64]) -> Vec<RunSpec> {
    let mut out = Vec::new();
    for s in strategies {
        let mut alphas = vec![task.alpha];
        if s.eq_ignore_ascii_case("EC") {
            alphas.extend(task.alphas.iter().copied().filter(|a| *a != task.alpha));
        }
        for &alpha in &alphas {
            for &seed in seeds {
                out.push(RunSpec {
                    strategy: s.to_uppercase(),
                    alpha,
                    seed,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub delayed_automaton_step: bool,
}

pub fn run_one(task: &TaskFile, compiled: &CompiledTask, spec: &RunSpec, opts: RunOptions) -> Result<MetricsLog, ExperimentError> {
    let mut cfg = task.train_config(&spec.strategy, spec.seed, spec.alpha);
    cfg.delayed_automaton_step |= opts.delayed_automaton_step;
    let env = task.env.build(spec.seed)?;
    Ok(train(env, compiled.dfa.clone(), compiled.ranks.clone(), &cfg)?.metrics)
}

/// Runs `specs` on up to `jobs` threads; results keep the order of `specs`.
pub fn run_matrix(
    task: &TaskFile,
    compiled: &CompiledTask,
    specs: &[RunSpec],
    jobs: usize,
    opts: RunOptions,
) -> Result<Vec<(RunSpec, MetricsLog)>, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    pool.install(|| {
        specs
            .par_iter()
            .map(|s| run_one(task, compiled, s, opts).map(|m| (s.clone(), m)))
            .collect()
    })
}

pub fn write_runs(dir: &Path, runs: &[(RunSpec, MetricsLog)]) -> Result<(), ExperimentError> {
    let io = |e: std::io::Error| ExperimentError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for (spec, log) in runs {
        let f = fs::File::create(dir.join(spec.file_name())).map_err(io)?;
        log.write_csv(f).map_err(|e| ExperimentError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Reads every run log in `dir`, sorted by file name.
pub fn read_runs(dir: &Path) -> Result<Vec<(RunSpec, MetricsLog)>, ExperimentError> {
    let io = |e: std::io::Error| ExperimentError::Io(format!("{}: {e}", dir.display()));
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| RunSpec::parse_file_name(n).is_some())
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let f = fs::File::open(dir.join(&n)).map_err(io)?;
            let log = MetricsLog::read_csv(f).map_err(ExperimentError::Io)?;
            Ok((RunSpec::parse_file_name(&n).unwrap(), log))
        })
        .collect()
}

/// Aggregates for one (strategy, alpha) group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub strategy: String,
    pub alpha: f64,
    pub runs: usize,
    pub median_first_success: f64,
    pub median_reward_per_kstep: f64,
    pub median_steps_to_80: f64,
    pub mean_success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub groups: Vec<GroupSummary>,
    /// `(strategy, alpha, episode, mean raw return)`.
    pub episode_curve: Vec<(String, f64, usize, f64)>,
    /// `(strategy, alpha, step bin end, mean raw reward per 1000 steps)`.
    pub step_curve: Vec<(String, f64, usize, f64)>,
    /// Percent improvement of EC over BASE in reward per step.
    pub ec_vs_base_percent: Option<f64>,
}

pub const STEP_BINS: usize = 50;

/// Pure function of the run logs; `censor` replaces missing events.
pub fn summarize(runs: &[(RunSpec, MetricsLog)], censor: usize) -> Summary {
    let mut groups: BTreeMap<(String, u64), Vec<&MetricsLog>> = BTreeMap::new();
    for (s, m) in runs {
        groups.entry((s.strategy.clone(), s.alpha.to_bits())).or_default().push(m);
    }
    let mut out = Summary::default();
    for ((strategy, abits), logs) in &groups {
        let alpha = f64::from_bits(*abits);
        let col = |f: &dyn Fn(&MetricsLog) -> f64| logs.iter().map(|m| f(m)).collect::<Vec<_>>();
        out.groups.push(GroupSummary {
            strategy: strategy.clone(),
            alpha,
            runs: logs.len(),
            median_first_success: median(&col(&|m| m.steps_to_first_success(censor) as f64)),
            median_reward_per_kstep: median(&col(&|m| m.reward_per_kstep())),
            median_steps_to_80: median(&col(&|m| m.steps_to_success_rate(0.8, 20, censor) as f64)),
            mean_success_rate: col(&|m| m.success_rate()).iter().sum::<f64>() / logs.len() as f64,
        });
        let longest = logs.iter().map(|m| m.episodes.len()).max().unwrap_or(0);
        for ep in 0..longest {
            let vals: Vec<f64> = logs.iter().filter_map(|m| m.episodes.get(ep)).map(|e| e.raw_return).collect();
            out.episode_curve.push((strategy.clone(), alpha, ep, vals.iter().sum::<f64>() / vals.len() as f64));
        }
        let total = logs.iter().map(|m| m.total_steps()).max().unwrap_or(0);
        let width = total.div_ceil(STEP_BINS).max(1);
        let mut sums = vec![0.0; STEP_BINS];
        for m in logs {
            for e in &m.episodes {
                let b = (e.steps.saturating_sub(1) / width).min(STEP_BINS - 1);
                sums[b] += e.raw_return;
            }
        }
        for (b, s) in sums.iter().enumerate() {
            let end = ((b + 1) * width).min(total);
            let len = end.saturating_sub(b * width);
            if len > 0 {
                out.step_curve.push((strategy.clone(), alpha, end, 1000.0 * s / (len * logs.len()) as f64));
            }
        }
    }
    let find = |name: &str| out.groups.iter().find(|g| g.strategy == name).map(|g| g.median_reward_per_kstep);
    if let (Some(ec), Some(base)) = (find("EC"), find("BASE")) {
        if base != 0.0 {
            out.ec_vs_base_percent = Some(100.0 * (ec - base) / base.abs());
        }
    }
    out
}

impl Summary {
    pub fn write(&self, dir: &Path) -> Result<(), ExperimentError> {
        let err = |e: csv::Error| ExperimentError::Io(e.to_string());
        fs::create_dir_all(dir).map_err(|e| ExperimentError::Io(e.to_string()))?;
        let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(err)?;
        w.write_record([
            "strategy",
            "alpha",
            "runs",
            "medianStepsToFirstSuccess",
            "medianRewardPerKStep",
            "medianStepsTo80",
            "meanSuccessRate",
            "ecVsBasePercent",
        ])
        .map_err(err)?;
        let pct = self.ec_vs_base_percent.map(|p| format!("{p:.2}")).unwrap_or_default();
        for g in &self.groups {
            w.write_record([
                g.strategy.clone(),
                g.alpha.to_string(),
                g.runs.to_string(),
                g.median_first_success.to_string(),
                format!("{:.4}", g.median_reward_per_kstep),
                g.median_steps_to_80.to_string(),
                format!("{:.4}", g.mean_success_rate),
                pct.clone(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| ExperimentError::Io(e.to_string()))?;
        for (file, rows, col) in [
            ("curve_episodes.csv", &self.episode_curve, "episode"),
            ("curve_steps.csv", &self.step_curve, "steps"),
        ] {
            let mut w = csv::Writer::from_path(dir.join(file)).map_err(err)?;
            w.write_record(["strategy", "alpha", col, "value"]).map_err(err)?;
            for (s, a, x, v) in rows {
                w.write_record([s.clone(), a.to_string(), x.to_string(), format!("{v:.6}")]).map_err(err)?;
            }
            w.flush().map_err(|e| ExperimentError::Io(e.to_string()))?;
        }
        Ok(())
    }
}
