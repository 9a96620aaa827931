//! Multi-seed execution, persistence and aggregation.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use rislab_core::environment::ChannelSet;
use rislab_core::neural::Mlp;
use rislab_core::numerics::SeededRng;
use rislab_core::oracle::{random_search, SearchResult};
use rislab_core::sac::{streams, StepRecord, Trainer};

use crate::checkpoint;
use crate::config::{ExperimentConfig, RunScenario};
use crate::records;
use crate::stats::{self, AggregateSummary, FINAL_WINDOW};

/// Substream for the random-search floor, disjoint from the agent streams.
pub const RANDOM_SEARCH_STREAM: u64 = 8;

/// Per-run knobs that do not change the run record.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Reuse a complete CSV on disk after re-running this many leading steps
    /// and checking them bitwise against it.
    pub reuse_verified_prefix: Option<u64>,
    /// Also write the final actor network.
    pub save_actor: bool,
    /// Initial actor parameters.
    pub load_actor: Option<Mlp>,
    /// Train on this realization instead of drawing one from the seed.
    pub channels: Option<ChannelSet>,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: RunScenario,
    pub seed: u64,
    pub records: Vec<StepRecord>,
    pub wall_clock: Duration,
    pub csv: PathBuf,
    /// Loaded from disk rather than trained in this process.
    pub reused: bool,
}

impl RunRecord {
    pub fn true_rates(&self) -> Vec<f64> {
        records::true_rates(&self.records)
    }
}

fn trainer(cfg: &ExperimentConfig, scenario: RunScenario, seed: u64, opts: &RunOptions) -> Result<Trainer> {
    let mut t = Trainer::new(
        &cfg.system_for(scenario),
        cfg.agent_for(scenario),
        cfg.steps,
        seed,
        opts.channels.clone(),
    )?;
    if let Some(net) = &opts.load_actor {
        if !net.same_architecture(&t.agent.policy.net) {
            bail!("loaded actor does not match the configured architecture");
        }
        t.agent.policy.net = net.clone();
    }
    Ok(t)
}

fn try_reuse(
    cfg: &ExperimentConfig,
    scenario: RunScenario,
    seed: u64,
    opts: &RunOptions,
    csv: &Path,
) -> Result<Option<Vec<StepRecord>>> {
    let Some(prefix) = opts.reuse_verified_prefix else {
        return Ok(None);
    };
    if !csv.exists() {
        return Ok(None);
    }
    let cached = records::read_csv(csv)?;
    if cached.len() as u64 != cfg.steps {
        return Ok(None);
    }
    let fresh = trainer(cfg, scenario, seed, opts)?.run(prefix)?;
    if fresh[..] != cached[..fresh.len()] {
        bail!(
            "{} disagrees with a fresh run in its first {} steps",
            csv.display(),
            fresh.len()
        );
    }
    Ok(Some(cached))
}

/// One full training run for `seed`, persisted under `cfg.out_dir`.
pub fn run_seed(cfg: &ExperimentConfig, scenario: RunScenario, seed: u64, opts: &RunOptions) -> Result<RunRecord> {
    std::fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let stem = cfg.run_stem(scenario, seed);
    let csv = cfg.out_dir.join(format!("{stem}.csv"));
    let start = Instant::now();
    if let Some(records) = try_reuse(cfg, scenario, seed, opts, &csv)? {
        return Ok(RunRecord {
            scenario,
            seed,
            records,
            wall_clock: start.elapsed(),
            csv,
            reused: true,
        });
    }
    let mut t = trainer(cfg, scenario, seed, opts)?;
    let records = t.run_to_end()?;
    let wall_clock = start.elapsed();
    records::write_csv(&csv, &records)?;
    if let Some(ch) = t.env.channels() {
        checkpoint::save_channels(&cfg.out_dir.join(format!("{stem}.channels")), ch)?;
    }
    if opts.save_actor {
        checkpoint::save_mlp(&cfg.out_dir.join(format!("{stem}.actor")), &t.agent.policy.net)?;
    }
    let meta = format!(
        "# scenario = {}\n# seed = {seed}\n# wall_clock_seconds = {:.3}\n{}",
        scenario.name(),
        wall_clock.as_secs_f64(),
        cfg.with_scenario(scenario).to_text()
    );
    std::fs::write(cfg.out_dir.join(format!("{stem}.cfg")), meta)?;
    Ok(RunRecord {
        scenario,
        seed,
        records,
        wall_clock,
        csv,
        reused: false,
    })
}

fn worker_count(cfg: &ExperimentConfig, jobs: usize) -> usize {
    let n = if cfg.threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cfg.threads
    };
    n.clamp(1, jobs.max(1))
}

/// Every (scenario, seed) pair, seeds in parallel. Completed runs stay on
/// disk when another fails; the first failure is returned.
pub fn run_experiment(cfg: &ExperimentConfig, scenarios: &[RunScenario], opts: &RunOptions) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let jobs: Vec<(RunScenario, u64)> = scenarios
        .iter()
        .flat_map(|&s| cfg.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let results: Mutex<Vec<(usize, Result<RunRecord>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..worker_count(cfg, jobs.len()) {
            scope.spawn(|| loop {
                if failed.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(scenario, seed)) = jobs.get(i) else {
                    break;
                };
                let r = run_seed(cfg, scenario, seed, opts).with_context(|| format!("{} seed {seed}", scenario.name()));
                match &r {
                    Ok(run) => log::info!(
                        "{} seed {seed}: last-{FINAL_WINDOW} mean {:.4} ({:.1}s{})",
                        scenario.name(),
                        stats::final_mean(&run.true_rates(), FINAL_WINDOW).map_or(f64::NAN, |m| m.0),
                        run.wall_clock.as_secs_f64(),
                        if run.reused { ", cached" } else { "" }
                    ),
                    Err(_) => failed.store(true, Ordering::Relaxed),
                }
                results.lock().unwrap().push((i, r));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, r)| r).collect()
}

#[derive(Debug, Clone)]
pub struct ScenarioSummary {
    pub scenario: RunScenario,
    pub summary: AggregateSummary,
}

#[derive(Debug, Clone)]
pub struct SuiteSummary {
    pub scenarios: Vec<ScenarioSummary>,
    /// β-space gain relative to the golden/mismatch gap, in percent.
    pub performance_increase: Option<f64>,
}

impl SuiteSummary {
    pub fn mean(&self, scenario: RunScenario) -> Option<f64> {
        self.scenarios
            .iter()
            .find(|s| s.scenario == scenario)
            .map(|s| s.summary.interval.mean)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("scenario,mean,ci95_half_width,seeds\n");
        for s in &self.scenarios {
            out += &format!(
                "{},{},{},{}\n",
                s.scenario.name(),
                s.summary.interval.mean,
                s.summary.interval.half_width,
                s.summary.per_seed.len()
            );
        }
        match self.performance_increase {
            Some(p) => out += &format!("# performance_increase_percent = {p}\n"),
            None => out += "# performance_increase_percent = undefined (golden <= mismatch)\n",
        }
        out
    }
}

pub fn aggregate(runs: &[RunRecord]) -> Result<SuiteSummary> {
    let mut scenarios = Vec::new();
    for scenario in RunScenario::ALL {
        let mut mine: Vec<&RunRecord> = runs.iter().filter(|r| r.scenario == scenario).collect();
        if mine.is_empty() {
            continue;
        }
        mine.sort_by_key(|r| r.seed);
        let summary = stats::summarize(&mine.iter().map(|r| r.true_rates()).collect::<Vec<_>>(), FINAL_WINDOW)?;
        if summary.short_runs {
            log::warn!(
                "{}: runs shorter than {FINAL_WINDOW} steps, averaging all steps",
                scenario.name()
            );
        }
        scenarios.push(ScenarioSummary { scenario, summary });
    }
    let mut s = SuiteSummary {
        scenarios,
        performance_increase: None,
    };
    if let (Some(g), Some(m), Some(b)) = (
        s.mean(RunScenario::Golden),
        s.mean(RunScenario::Mismatch),
        s.mean(RunScenario::BetaSpace),
    ) {
        s.performance_increase = stats::performance_increase(b, m, g);
    }
    Ok(s)
}

/// Best of `budget` uniform random actions on the channels seed `seed`
/// trains on.
pub fn random_search_floor(cfg: &ExperimentConfig, seed: u64, budget: usize) -> Result<SearchResult> {
    let sys = cfg.system_for(RunScenario::Golden);
    let channels =
        rislab_core::environment::generate_channels(&sys, &mut SeededRng::new(seed).substream(streams::CHANNELS))?;
    Ok(random_search(
        &sys,
        &channels,
        budget,
        &mut SeededRng::new(seed).substream(RANDOM_SEARCH_STREAM),
    )?)
}
