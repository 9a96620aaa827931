//! Acceptance suite: one line per criterion.
//!
//! Any FAIL makes the process exit non-zero. Criteria 7–10 read cached
//! 20000-step runs from `target/acceptance-runs` (override with
//! `RISLAB_ACCEPTANCE_DIR`), checking each cached CSV against a fresh run of
//! its first steps. Missing runs are trained only with
//! `RISLAB_ACCEPTANCE_FULL=1`; otherwise those criteria report NOT RUN.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{ensure, Result};
use rislab::config::{ExperimentConfig, RunScenario};
use rislab::experiment::{aggregate, random_search_floor, run_experiment, RunOptions, RunRecord, SuiteSummary};
use rislab::records;
use rislab::stats::{final_mean, FINAL_WINDOW};
use rislab_core::environment::{amplitude, decode_action, generate_channels, sum_rate, Scenario, SystemConfig};
use rislab_core::explorer::PerturbationMode;
use rislab_core::neural::{gradcheck, Mlp};
use rislab_core::numerics::{trace_gram, CMatrix, CVector, SeededRng, C64};
use rislab_core::oracle::{brute_force_phases, lossy_reflection, matched_filter, reference_rate, GridSpec};
use rislab_core::sac::{train_loop, AgentConfig, CriticEval, ExplorerConfig, SacAgent};

const PREFIX_CHECK: u64 = 100;
const SEEDS: &str = "seeds=0..5";

enum Verdict {
    Pass(String),
    Fail(String),
    NotRun(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn as_verdict(r: Result<String>) -> Verdict {
    match r {
        Ok(d) => Verdict::Pass(d),
        Err(e) => Verdict::Fail(format!("{e:#}")),
    }
}

// 1 ------------------------------------------------------------------------

fn amplitude_model() -> Result<String> {
    let mut rng = SeededRng::new(1);
    for _ in 0..200 {
        let cfg = SystemConfig {
            beta_min: rng.uniform(),
            mu: rng.uniform_range(-3.0, 3.0),
            kappa: rng.uniform_range(0.1, 4.0),
            ..SystemConfig::default()
        };
        for _ in 0..200 {
            let p = rng.uniform_range(-20.0, 20.0);
            let b = amplitude(p, &cfg);
            ensure!(
                b >= cfg.beta_min - 1e-12 && b <= 1.0 + 1e-12,
                "β({p}) = {b} outside [β_min, 1]"
            );
            ensure!((amplitude(p + TAU, &cfg) - b).abs() < 1e-9, "not 2π-periodic at {p}");
        }
        ensure!(
            (amplitude(cfg.mu + FRAC_PI_2, &cfg) - 1.0).abs() < 1e-12,
            "peak is not 1"
        );
        ensure!(
            (amplitude(cfg.mu + 3.0 * FRAC_PI_2, &cfg) - cfg.beta_min).abs() < 1e-9,
            "trough is not β_min"
        );
    }
    let reference = amplitude(
        0.0,
        &SystemConfig {
            beta_min: 0.3,
            mu: 0.0,
            kappa: 1.5,
            ..SystemConfig::default()
        },
    );
    ensure!((reference - 0.547487).abs() <= 1e-6, "β(0; 0.3, 0, 1.5) = {reference}");
    Ok(format!(
        "β(0; 0.3, 0, 1.5) = {reference:.6}, bounds/period/extremes on 40000 samples"
    ))
}

// 2 ------------------------------------------------------------------------

fn constraint_projection() -> Result<String> {
    let cfg = SystemConfig::default();
    let p = cfg.power_watts();
    let mut rng = SeededRng::new(2);
    let (mut worst_p, mut worst_u): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let raw: Vec<f64> = (0..cfg.action_dim()).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        let d = decode_action(&raw, &cfg)?;
        worst_p = worst_p.max((trace_gram(&d.beamformer) - p).abs());
        for z in d.unit.iter() {
            worst_u = worst_u.max((z.norm() - 1.0).abs());
        }
    }
    ensure!(
        worst_p <= 1e-9 && worst_u <= 1e-12,
        "power error {worst_p:e}, modulus error {worst_u:e}"
    );
    Ok(format!(
        "10000 actions: max |tr(GGᴴ) − P_t| = {worst_p:.1e}, max ||φ̂| − 1| = {worst_u:.1e}"
    ))
}

// 3 ------------------------------------------------------------------------

/// Random offsets on every parameter keep zero-initialized biases off ReLU
/// kinks, where the loss is not differentiable.
fn jittered(mut agent: SacAgent, rng: &mut SeededRng) -> SacAgent {
    let [c1, c2] = &mut agent.critics;
    let nets = [&mut agent.policy.net, c1, c2];
    let explorer = agent.explorer.as_mut().map(|e| &mut e.online);
    for net in nets.into_iter().chain(explorer) {
        for p in net.params_mut() {
            *p += 0.05 * rng.standard_normal();
        }
    }
    agent
}

fn gradient_checks() -> Result<String> {
    const H: f64 = 1e-5;
    const TOL: f64 = 1e-4;
    let sys = SystemConfig {
        users: 2,
        antennas: 2,
        elements: 3,
        scenario: Scenario::Mismatch,
        ..SystemConfig::default()
    };
    let cfg = AgentConfig {
        hidden: 8,
        explorer: Some(ExplorerConfig {
            lambda0: 0.3,
            mode: PerturbationMode::Blended,
            beta_lo: 0.3,
        }),
        ..AgentConfig::default()
    };
    let (sd, ad) = (sys.state_dim(), sys.action_dim());
    let mut worst: f64 = 0.0;
    let mut record = |label: &str, point: u64, w: Option<gradcheck::Mismatch>| -> Result<()> {
        if let Some(w) = w {
            ensure!(w.relative < TOL, "{label} at point {point}: {w:?}");
            worst = worst.max(w.relative);
        }
        Ok(())
    };
    let normals = |n: usize, rng: &mut SeededRng| (0..n).map(|_| rng.standard_normal()).collect::<Vec<f64>>();
    let with = |net: &Mlp, p: &[f64]| {
        let mut n = net.clone();
        n.params_mut().copy_from_slice(p);
        n
    };
    for point in 0..10 {
        let mut rng = SeededRng::new(1000 + point);
        let agent = jittered(SacAgent::new(&sys, cfg.clone(), point)?, &mut rng);
        let n = 3;
        let states = normals(n * sd, &mut rng);
        let noise = normals(n * ad, &mut rng);
        let actions: Vec<f64> = (0..n * ad).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        let targets = normals(n, &mut rng);

        // actor: loss parameters, and states through a generic upstream
        let sample = agent.policy.sample_with_noise(&states, n, noise.clone())?;
        let (_, g) = agent.actor_loss_and_gradient(&sample, &states, None)?;
        record(
            "actor parameters",
            point,
            gradcheck::compare(agent.policy.net.params(), &g, H, |p| {
                let mut a = agent.clone();
                a.policy.net.params_mut().copy_from_slice(p);
                let s = a.policy.sample_with_noise(&states, n, noise.clone()).unwrap();
                a.actor_loss_and_gradient(&s, &states, None).unwrap().0
            }),
        )?;
        let (wa, wl) = (normals(n * ad, &mut rng), normals(n, &mut rng));
        let objective = |s: &[f64]| {
            let x = agent.policy.sample_with_noise(s, n, noise.clone()).unwrap();
            x.actions.iter().zip(&wa).map(|(a, w)| a * w).sum::<f64>()
                + x.log_probs.iter().zip(&wl).map(|(l, w)| l * w).sum::<f64>()
        };
        let full = agent.policy.backward_full(&sample, &wa, &wl)?;
        record(
            "actor input",
            point,
            gradcheck::compare(&states, &full.input, H, objective),
        )?;

        // critics: TD-loss parameters, action input, full input
        for (c, critic) in agent.critics.iter().enumerate() {
            let loss = |net: &Mlp, act: &[f64]| {
                let e = CriticEval::new(net, &states, act, n).unwrap();
                e.values()
                    .iter()
                    .zip(&targets)
                    .map(|(q, y)| (q - y) * (q - y))
                    .sum::<f64>()
                    / n as f64
            };
            let e = CriticEval::new(critic, &states, &actions, n)?;
            let up: Vec<f64> = e
                .values()
                .iter()
                .zip(&targets)
                .map(|(q, y)| 2.0 * (q - y) / n as f64)
                .collect();
            record(
                &format!("critic {} parameters", c + 1),
                point,
                gradcheck::compare(critic.params(), &e.param_gradient(&up)?, H, |p| {
                    loss(&with(critic, p), &actions)
                }),
            )?;
            record(
                &format!("critic {} action input", c + 1),
                point,
                gradcheck::compare(&actions, &e.action_gradient(&up)?, H, |a| loss(critic, a)),
            )?;
            let x: Vec<f64> = states[..sd].iter().chain(&actions[..ad]).copied().collect();
            let gi = critic.backward(&x, &[1.0])?;
            record(
                &format!("critic {} input", c + 1),
                point,
                gradcheck::compare(&x, &gi.input, H, |x| critic.forward(x).unwrap()[0]),
            )?;
        }

        // explorer: TD-error objective parameters, network input
        let ex = agent.explorer.as_ref().expect("explorer configured");
        let lambda = rng.uniform_range(0.05, 1.0);
        let mode = if point % 2 == 0 {
            PerturbationMode::Blended
        } else {
            PerturbationMode::Literal
        };
        let critics = [&agent.critics[0], &agent.critics[1]];
        let (_, g) = ex.objective_and_gradient(&states, &actions, &targets, lambda, mode, critics)?;
        record(
            "explorer parameters",
            point,
            gradcheck::compare(ex.online.params(), &g.params, H, |p| {
                let mut e = ex.clone();
                e.online.params_mut().copy_from_slice(p);
                e.objective_and_gradient(&states, &actions, &targets, lambda, mode, critics)
                    .unwrap()
                    .0
            }),
        )?;
        let u = normals(sys.elements, &mut rng);
        let gi = ex.online.backward(&states[..sd], &u)?;
        record(
            "explorer input",
            point,
            gradcheck::compare(&states[..sd], &gi.input, H, |x| {
                ex.online.forward(x).unwrap().iter().zip(&u).map(|(o, w)| o * w).sum()
            }),
        )?;
    }
    Ok(format!(
        "actor, critics 1–2, explorer at 10 points each: worst relative error {worst:.1e}"
    ))
}

// 4 ------------------------------------------------------------------------

fn oracle_equivalence() -> Result<String> {
    let mut rng = SeededRng::new(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (k, m, l) = (1 + rng.index(3), 1 + rng.index(3), 1 + rng.index(4));
        let cfg = SystemConfig {
            users: k,
            antennas: m,
            elements: l,
            beta_min: rng.uniform(),
            power_dbm: rng.uniform_range(0.0, 40.0),
            ..SystemConfig::default()
        };
        let ch = generate_channels(&cfg, &mut rng)?;
        let g = CMatrix::from_row_major(
            m,
            k,
            (0..m * k)
                .map(|_| C64::new(rng.standard_normal(), rng.standard_normal()))
                .collect(),
        )?;
        let phases: Vec<f64> = (0..l).map(|_| rng.uniform_range(0.0, TAU)).collect();
        let phi = lossy_reflection(&phases, &cfg);
        let a = reference_rate(&phi, &ch.cascaded, &g, cfg.noise_power, cfg.log_base)?;
        let b = sum_rate(&CVector::from_vec(phi), &ch.cascaded, &g, cfg.noise_power, cfg.log_base)?;
        worst = worst.max((a - b).abs());
    }
    ensure!(worst <= 1e-9, "kernels differ by {worst:e}");
    let mut grid_points = 0u64;
    for seed in 0..5 {
        let cfg = SystemConfig {
            users: 2,
            antennas: 2,
            elements: 3,
            ..SystemConfig::default()
        };
        let ch = generate_channels(&cfg, &mut SeededRng::new(seed))?;
        let g = matched_filter(&cfg, &ch)?;
        let grid = GridSpec { levels: 12 };
        let best = brute_force_phases(&cfg, &ch, &g, grid)?;
        grid.for_each(cfg.elements, |p| {
            let r = reference_rate(
                &lossy_reflection(p, &cfg),
                &ch.cascaded,
                &g,
                cfg.noise_power,
                cfg.log_base,
            )?;
            grid_points += 1;
            if r > best.rate {
                return Err(rislab_core::Error::State("grid point exceeds the brute-force maximum"));
            }
            Ok(())
        })?;
    }
    Ok(format!(
        "10000 instances: max |Δ| = {worst:.1e}; brute force dominates {grid_points} grid points"
    ))
}

// 5, 6 --------------------------------------------------------------------

fn reduced() -> (SystemConfig, AgentConfig) {
    (
        SystemConfig {
            users: 2,
            antennas: 2,
            elements: 4,
            scenario: Scenario::Mismatch,
            ..SystemConfig::default()
        },
        AgentConfig {
            hidden: 32,
            ..AgentConfig::default()
        },
    )
}

fn reduction_identity() -> Result<String> {
    let (sys, cfg) = reduced();
    let vanilla = train_loop(&sys, cfg.clone(), 2000, 5)?;
    let disabled = AgentConfig {
        explorer: Some(ExplorerConfig {
            lambda0: 0.0,
            mode: PerturbationMode::Blended,
            beta_lo: sys.beta_min,
        }),
        ..cfg.clone()
    };
    ensure!(
        train_loop(&sys, disabled, 2000, 5)? == vanilla,
        "β-space path with λ₀ = 0 diverges from vanilla"
    );
    let ideal = SystemConfig {
        beta_min: 1.0,
        error_variance: 0.0,
        ..sys
    };
    let rec = train_loop(&ideal, cfg, 2000, 5)?;
    let bad = rec.iter().filter(|r| r.training_reward != r.true_sum_rate).count();
    ensure!(bad == 0, "{bad} steps with mismatch reward ≠ true reward");
    Ok("2000-step records bitwise equal; β_min = 1, σ_e² = 0 reward equals true reward at all 2000 steps".into())
}

fn determinism() -> Result<String> {
    let (sys, cfg) = reduced();
    let sys = SystemConfig {
        scenario: Scenario::Golden,
        ..sys
    };
    let a = train_loop(&sys, cfg.clone(), 20_000, 6)?;
    let b = train_loop(&sys, cfg, 20_000, 6)?;
    ensure!(a.len() == 20_000, "{} rows", a.len());
    ensure!(a == b, "records differ");
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("run.csv");
    records::write_csv(&path, &a)?;
    ensure!(records::read_csv(&path)? == a, "CSV round trip is lossy");
    Ok("two 20000-row runs (K = M = 2, L = 4, 32 hidden units) bitwise identical, CSV round trip exact".into())
}

// 7–10 ----------------------------------------------------------------------

type Check = fn() -> Result<String>;
type Loaded = std::result::Result<Option<Suite>, String>;

struct Suite {
    cfg: ExperimentConfig,
    runs: Vec<RunRecord>,
    summary: SuiteSummary,
}

impl Suite {
    fn mean(&self, s: RunScenario) -> f64 {
        self.summary.mean(s).unwrap_or(f64::NAN)
    }

    fn half_width(&self, s: RunScenario) -> f64 {
        self.summary
            .scenarios
            .iter()
            .find(|x| x.scenario == s)
            .map_or(f64::NAN, |x| x.summary.interval.half_width)
    }

    fn describe(&self) -> String {
        let p = self
            .summary
            .performance_increase
            .map_or("undefined".to_string(), |p| format!("{p:.1}%"));
        format!(
            "golden {:.3} ± {:.3}, mismatch {:.3} ± {:.3}, β-space {:.3} ± {:.3}, increase {p}",
            self.mean(RunScenario::Golden),
            self.half_width(RunScenario::Golden),
            self.mean(RunScenario::Mismatch),
            self.half_width(RunScenario::Mismatch),
            self.mean(RunScenario::BetaSpace),
            self.half_width(RunScenario::BetaSpace),
        )
    }
}

fn cache_root() -> PathBuf {
    std::env::var_os("RISLAB_ACCEPTANCE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/acceptance-runs")))
}

/// `Ok(None)` when runs are missing and training them was not requested.
fn load_suite(tag: &str, overrides: &[&str]) -> Result<Option<Suite>> {
    let mut cfg = ExperimentConfig::default();
    cfg.apply_overrides(&[SEEDS])?;
    cfg.apply_overrides(overrides)?;
    cfg.out_dir = cache_root().join(tag);
    let complete = RunScenario::ALL.iter().all(|&s| {
        cfg.seeds
            .iter()
            .all(|&seed| cfg.out_dir.join(format!("{}.csv", cfg.run_stem(s, seed))).exists())
    });
    if !complete && std::env::var_os("RISLAB_ACCEPTANCE_FULL").is_none() {
        return Ok(None);
    }
    let opts = RunOptions {
        reuse_verified_prefix: Some(PREFIX_CHECK),
        ..RunOptions::default()
    };
    let runs = run_experiment(&cfg, &RunScenario::ALL, &opts)?;
    let summary = aggregate(&runs)?;
    Ok(Some(Suite { cfg, runs, summary }))
}

fn missing(tag: &str) -> Verdict {
    Verdict::NotRun(format!(
        "no cached runs under {}; set RISLAB_ACCEPTANCE_FULL=1 to train them",
        cache_root().join(tag).display()
    ))
}

fn criterion7(s: &Suite) -> Verdict {
    let (g, m, b) = (
        s.mean(RunScenario::Golden),
        s.mean(RunScenario::Mismatch),
        s.mean(RunScenario::BetaSpace),
    );
    let inc = s.summary.performance_increase;
    let ok = g >= b && b > m && inc.is_some_and(|p| p >= 40.0);
    let stretch = (g - 8.16).abs() <= 1.4 && (m - 6.37).abs() <= 1.2 && (b - 7.88).abs() <= 1.1;
    verdict(
        ok,
        format!(
            "{}; stretch bands {}",
            s.describe(),
            if stretch { "met" } else { "missed" }
        ),
    )
}

fn criterion8(low: &Suite, high: &Suite) -> Verdict {
    let gap = |s: &Suite| s.mean(RunScenario::Golden) - s.mean(RunScenario::Mismatch);
    let ok = gap(high) < gap(low) && high.summary.performance_increase.is_some_and(|p| p >= 40.0);
    verdict(
        ok,
        format!(
            "β_min 0.6: {}; gap {:.3} vs {:.3} at β_min 0.3",
            high.describe(),
            gap(high),
            gap(low)
        ),
    )
}

fn criterion9(p5: &Suite, p30: &Suite) -> Verdict {
    let rising = p5.mean(RunScenario::Golden) < p30.mean(RunScenario::Golden);
    let beta_wins = [p5, p30]
        .iter()
        .all(|s| s.mean(RunScenario::BetaSpace) > s.mean(RunScenario::Mismatch));
    verdict(
        rising && beta_wins,
        format!("5 dBm: {}; 30 dBm: {}", p5.describe(), p30.describe()),
    )
}

fn criterion10(s: &Suite) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in s.runs.iter().filter(|r| r.scenario == RunScenario::Golden) {
        let agent = match final_mean(&r.true_rates(), FINAL_WINDOW) {
            Ok((m, _)) => m,
            Err(e) => return Verdict::Fail(format!("{e:#}")),
        };
        let floor = match random_search_floor(&s.cfg, r.seed, 20_000) {
            Ok(f) => f.best_rate,
            Err(e) => return Verdict::Fail(format!("{e:#}")),
        };
        ok &= agent > floor;
        parts.push(format!("seed {}: {agent:.3} vs {floor:.3}", r.seed));
    }
    verdict(
        ok,
        format!(
            "golden last-1000 mean vs best of 20000 random actions: {}",
            parts.join(", ")
        ),
    )
}

fn main() {
    let mut failed = false;
    let mut report = |n: u8, title: &str, v: Verdict, started: Instant| {
        let secs = started.elapsed().as_secs_f64();
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed = true;
                ("FAIL", d)
            }
            Verdict::NotRun(d) => ("NOT RUN", d),
        };
        println!("criterion {n:>2} {tag:<7} {title} ({secs:.1}s): {detail}");
    };

    let suite_start = Instant::now();
    let hard: [(u8, &str, Check); 6] = [
        (1, "amplitude model", amplitude_model),
        (2, "constraint projection", constraint_projection),
        (3, "gradient checks", gradient_checks),
        (4, "oracle equivalence", oracle_equivalence),
        (5, "reduction identity", reduction_identity),
        (6, "determinism", determinism),
    ];
    for (n, title, f) in hard {
        let t = Instant::now();
        report(n, title, as_verdict(f()), t);
    }
    println!("property suite finished in {:.1}s", suite_start.elapsed().as_secs_f64());

    let t = Instant::now();
    let load = |tag: &str, o: &[&str]| load_suite(tag, o).map_err(|e| format!("{e:#}"));
    let b03 = load("b03", &[]);
    let b06 = load("b06", &["beta_min=0.6"]);
    let p05 = load("p05", &["power_dbm=5"]);
    let run = |r: &Loaded, tag: &str, f: &dyn Fn(&Suite) -> Verdict| match r {
        Ok(Some(s)) => f(s),
        Ok(None) => missing(tag),
        Err(e) => Verdict::Fail(e.clone()),
    };
    report(7, "β_min 0.3 ordering and gain", run(&b03, "b03", &criterion7), t);
    let t = Instant::now();
    report(
        8,
        "β_min 0.6 gap and gain",
        run(&b03, "b03", &|low| run(&b06, "b06", &|high| criterion8(low, high))),
        t,
    );
    let t = Instant::now();
    report(
        9,
        "power sweep 5/30 dBm",
        run(&b03, "b03", &|p30| run(&p05, "p05", &|p5| criterion9(p5, p30))),
        t,
    );
    let t = Instant::now();
    report(10, "random-search floor", run(&b03, "b03", &criterion10), t);

    if failed {
        std::process::exit(1);
    }
}
