use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rislab::checkpoint;
use rislab::config::{ExperimentConfig, RunScenario};
use rislab::experiment::{aggregate, random_search_floor, run_experiment, run_seed, RunOptions, RunRecord};
use rislab::plot::{render_svg, Series};
use rislab::records;
use rislab::stats::{self, curve_band};
use rislab_core::environment::{generate_channels, sum_rate, SystemConfig};
use rislab_core::numerics::{CVector, SeededRng};
use rislab_core::oracle::{brute_force_phases, lossy_reflection, matched_filter, reference_rate, GridSpec};

#[derive(Parser)]
#[command(name = "rislab", about = "Train and evaluate RIS sum-rate agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set beta_min=0.6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Reuse complete CSVs whose first N steps match a fresh run.
    #[arg(long, value_name = "N")]
    reuse_verified: Option<u64>,
    /// Write each run's final actor network.
    #[arg(long)]
    save_actor: bool,
    /// Start every run from this actor checkpoint.
    #[arg(long)]
    load_actor: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_text(&text)?;
        }
        cfg.apply_overrides(&self.overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn options(&self) -> Result<RunOptions> {
        Ok(RunOptions {
            reuse_verified_prefix: self.reuse_verified,
            save_actor: self.save_actor,
            load_actor: self.load_actor.as_deref().map(checkpoint::load_mlp).transpose()?,
            channels: None,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the configured scenario for every seed.
    Train(ConfigArgs),
    /// Train all three scenarios, aggregate and plot.
    Suite(ConfigArgs),
    /// Run the suite at every power in `power_sweep`.
    Sweep(ConfigArgs),
    /// Cross-check the rate kernel and report random-search floors.
    Oracle {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 10_000)]
        instances: usize,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
    },
    /// Plot learning curves from run CSVs grouped by scenario.
    Plot {
        csvs: Vec<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 25)]
        window: usize,
        #[arg(long, default_value = "Sum rate")]
        title: String,
    },
    /// Re-train one seed on a saved channel realization.
    Replay {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Channel dump written next to a run CSV.
        #[arg(long)]
        channels: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Compare the result bitwise with this CSV.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn curves_svg(title: &str, groups: &[(String, Vec<Vec<f64>>)], window: usize) -> Result<String> {
    let bands = groups
        .iter()
        .map(|(_, runs)| {
            let smoothed: Vec<Vec<f64>> = runs.iter().map(|r| stats::smooth(r, window)).collect();
            curve_band(&smoothed, 0.95)
        })
        .collect::<Result<Vec<_>>>()?;
    let series: Vec<Series<'_>> = groups
        .iter()
        .zip(&bands)
        .enumerate()
        .map(|(i, ((label, _), band))| Series {
            label,
            color: COLORS[i % COLORS.len()],
            band,
        })
        .collect();
    render_svg(title, "step", "sum rate", &series)
}

fn suite(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<()> {
    let runs = run_experiment(cfg, &RunScenario::ALL, opts)?;
    let summary = aggregate(&runs)?;
    let hash = cfg.setting_hash();
    let text = summary.to_text();
    print!("{text}");
    std::fs::write(cfg.out_dir.join(format!("summary_{hash}.csv")), &text)?;
    let groups: Vec<(String, Vec<Vec<f64>>)> = RunScenario::ALL
        .iter()
        .map(|&s| {
            let runs: Vec<Vec<f64>> = runs
                .iter()
                .filter(|r| r.scenario == s)
                .map(RunRecord::true_rates)
                .collect();
            (s.label().to_string(), runs)
        })
        .collect();
    let title = format!(
        "beta_min = {}, L = {}, P = {} dBm",
        cfg.system.beta_min, cfg.system.elements, cfg.system.power_dbm
    );
    std::fs::write(
        cfg.out_dir.join(format!("curves_{hash}.svg")),
        curves_svg(&title, &groups, 25)?,
    )?;
    Ok(())
}

fn oracle(cfg: &ExperimentConfig, instances: usize, budget: usize) -> Result<()> {
    let mut rng = SeededRng::new(0);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let sys = SystemConfig {
            users: 1 + rng.index(3),
            antennas: 1 + rng.index(3),
            elements: 1 + rng.index(4),
            beta_min: rng.uniform_range(0.0, 1.0),
            ..SystemConfig::default()
        };
        let ch = generate_channels(&sys, &mut rng)?;
        let g = matched_filter(&sys, &ch)?;
        let phases: Vec<f64> = (0..sys.elements)
            .map(|_| rng.uniform_range(0.0, std::f64::consts::TAU))
            .collect();
        let phi = lossy_reflection(&phases, &sys);
        let a = reference_rate(&phi, &ch.cascaded, &g, sys.noise_power, sys.log_base)?;
        let b = sum_rate(&CVector::from_vec(phi), &ch.cascaded, &g, sys.noise_power, sys.log_base)?;
        worst = worst.max((a - b).abs());
    }
    println!("kernel agreement over {instances} instances: max |diff| = {worst:e}");
    let tiny = SystemConfig {
        users: 2,
        antennas: 2,
        elements: 3,
        ..cfg.system.clone()
    };
    let ch = generate_channels(&tiny, &mut SeededRng::new(1))?;
    let best = brute_force_phases(&tiny, &ch, &matched_filter(&tiny, &ch)?, GridSpec { levels: 16 })?;
    println!(
        "brute force (K=M=2, L=3, 16 levels): rate {} at phases {:?}",
        best.rate, best.phases
    );
    for &seed in &cfg.seeds {
        let floor = random_search_floor(cfg, seed, budget)?;
        println!(
            "seed {seed}: random-search floor over {budget} actions = {}",
            floor.best_rate
        );
    }
    if worst > 1e-9 {
        bail!("rate kernels disagree by {worst:e}");
    }
    Ok(())
}

fn plot(csvs: &[PathBuf], out: &Path, window: usize, title: &str) -> Result<()> {
    let mut groups: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    for path in csvs {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let group = stem.rsplit_once('_').map_or(stem, |(g, _)| g).to_string();
        let rates = records::true_rates(&records::read_csv(path)?);
        match groups.iter_mut().find(|(g, _)| *g == group) {
            Some((_, runs)) => runs.push(rates),
            None => groups.push((group, vec![rates])),
        }
    }
    std::fs::write(out, curves_svg(title, &groups, window)?)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let cfg = args.load()?;
            for r in run_experiment(&cfg, &[cfg.scenario], &args.options()?)? {
                println!("{}", r.csv.display());
            }
        }
        Command::Suite(args) => suite(&args.load()?, &args.options()?)?,
        Command::Sweep(args) => {
            let cfg = args.load()?;
            let opts = args.options()?;
            for &p in &cfg.power_sweep {
                println!("# power_dbm = {p}");
                suite(&cfg.with_power(p), &opts)?;
            }
        }
        Command::Oracle { cfg, instances, budget } => oracle(&cfg.load()?, instances, budget)?,
        Command::Plot {
            csvs,
            out,
            window,
            title,
        } => plot(&csvs, &out, window, &title)?,
        Command::Replay {
            cfg,
            channels,
            seed,
            expect,
        } => {
            let exp = cfg.load()?;
            let opts = RunOptions {
                channels: Some(checkpoint::load_channels(&channels)?),
                ..cfg.options()?
            };
            let run = run_seed(&exp, exp.scenario, seed, &opts)?;
            println!("{}", run.csv.display());
            if let Some(path) = expect {
                if records::read_csv(&path)? != run.records {
                    bail!("replay differs from {}", path.display());
                }
                println!("replay matches {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
