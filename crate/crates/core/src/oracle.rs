//! Learning-free references: a scalar re-implementation of the sum rate,
//! exhaustive phase enumeration on tiny instances, and random search.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::environment::{decode_action, sum_rate, ChannelSet, DecodedAction, LogBase, SystemConfig};
use crate::error::{check_len, Error, Result};
use crate::numerics::{CMatrix, SeededRng, C64};

/// Largest grid `levels^L` that brute force will enumerate.
pub const MAX_GRID_POINTS: u64 = 1_000_000;

/// Reflection amplitude, written out independently of the environment.
pub fn reference_amplitude(phase: f64, beta_min: f64, mu: f64, kappa: f64) -> f64 {
    let s = libm::sin(phase - mu);
    let x = ((1.0 + s) * 0.5).clamp(0.0, 1.0);
    beta_min + (1.0 - beta_min) * libm::exp(kappa * libm::log(x))
}

/// Sum rate on plain `(re, im)` arithmetic.
///
/// `phi[l]`, `cascaded[k]` is `L × M`, `beamformer` is `M × K`.
pub fn reference_rate(
    phi: &[C64],
    cascaded: &[CMatrix],
    beamformer: &CMatrix,
    noise_power: f64,
    log_base: LogBase,
) -> Result<f64> {
    if !(noise_power > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "noise power must be > 0, got {noise_power}"
        )));
    }
    let users = cascaded.len();
    check_len("reference_rate users", beamformer.cols(), users)?;
    let antennas = beamformer.rows();
    let mut power = vec![0.0f64; users];
    for (k, d) in cascaded.iter().enumerate() {
        check_len("reference_rate elements", phi.len(), d.rows())?;
        check_len("reference_rate antennas", antennas, d.cols())?;
        for j in 0..users {
            let (mut re, mut im) = (0.0, 0.0);
            for m in 0..antennas {
                // (φᵀ D_k)_m
                let (mut cr, mut ci) = (0.0, 0.0);
                for (l, p) in phi.iter().enumerate() {
                    let z = d[(l, m)];
                    cr += p.re * z.re - p.im * z.im;
                    ci += p.re * z.im + p.im * z.re;
                }
                let g = beamformer[(m, j)];
                re += cr * g.re - ci * g.im;
                im += cr * g.im + ci * g.re;
            }
            power[k] += re * re + im * im;
        }
    }
    let total: f64 = power.iter().sum();
    let mut rate = 0.0;
    for &p in &power {
        let sinr = p / (total - p + noise_power);
        rate += match log_base {
            LogBase::Two => libm::log2(1.0 + sinr),
            LogBase::Natural => libm::log(1.0 + sinr),
        };
    }
    Ok(rate)
}

/// Quantized phase grid for brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Phases `2π·i/levels`, `i = 0 … levels − 1`, per element.
    pub levels: usize,
}

impl GridSpec {
    pub fn points(&self, elements: usize) -> Result<u64> {
        if self.levels == 0 {
            return Err(Error::Domain("grid needs at least one level".into()));
        }
        let mut n: u64 = 1;
        for _ in 0..elements {
            n = n.saturating_mul(self.levels as u64);
            if n > MAX_GRID_POINTS {
                return Err(Error::TooLarge(alloc::format!(
                    "{}^{} phase grid exceeds {MAX_GRID_POINTS} points",
                    self.levels,
                    elements
                )));
            }
        }
        Ok(n)
    }

    pub fn phase(&self, index: usize) -> f64 {
        TAU * index as f64 / self.levels as f64
    }

    /// Calls `f(phases)` for every grid point in lexicographic order.
    pub fn for_each(&self, elements: usize, mut f: impl FnMut(&[f64]) -> Result<()>) -> Result<()> {
        let total = self.points(elements)?;
        let mut idx = vec![0usize; elements];
        let mut phases = vec![0.0; elements];
        for _ in 0..total {
            for (p, &i) in phases.iter_mut().zip(&idx) {
                *p = self.phase(i);
            }
            f(&phases)?;
            for i in idx.iter_mut().rev() {
                *i += 1;
                if *i < self.levels {
                    break;
                }
                *i = 0;
            }
        }
        Ok(())
    }
}

/// `φ_l = β(θ_l)·e^{jθ_l}` under the configured amplitude model.
pub fn lossy_reflection(phases: &[f64], cfg: &SystemConfig) -> Vec<C64> {
    phases
        .iter()
        .map(|&t| C64::from_polar(reference_amplitude(t, cfg.beta_min, cfg.mu, cfg.kappa), t))
        .collect()
}

/// Matched filter to the effective channel with all reflections at 1,
/// scaled to `tr(GGᴴ) = P_t`.
pub fn matched_filter(cfg: &SystemConfig, channels: &ChannelSet) -> Result<CMatrix> {
    channels.check_dims(cfg)?;
    let mut g = CMatrix::zeros(cfg.antennas, cfg.users);
    let mut power = 0.0;
    for (k, d) in channels.cascaded.iter().enumerate() {
        for m in 0..cfg.antennas {
            let h: C64 = (0..cfg.elements).map(|l| d[(l, m)]).sum();
            g[(m, k)] = h.conj();
            power += h.norm_sqr();
        }
    }
    if power > 0.0 {
        g.scale_real(libm::sqrt(cfg.power_watts() / power));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOptimum {
    pub phases: Vec<f64>,
    pub rate: f64,
}

/// Exhaustive maximization of the true sum rate over the phase grid for a
/// fixed beamformer (first maximum in lexicographic order).
pub fn brute_force_phases(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    beamformer: &CMatrix,
    grid: GridSpec,
) -> Result<PhaseOptimum> {
    channels.check_dims(cfg)?;
    let mut best = PhaseOptimum {
        phases: Vec::new(),
        rate: f64::NEG_INFINITY,
    };
    grid.for_each(cfg.elements, |phases| {
        let phi = lossy_reflection(phases, cfg);
        let rate = reference_rate(&phi, &channels.cascaded, beamformer, cfg.noise_power, cfg.log_base)?;
        if rate > best.rate {
            best.rate = rate;
            best.phases = phases.to_vec();
        }
        Ok(())
    })?;
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: DecodedAction,
    pub best_rate: f64,
    /// Best true rate after each sample.
    pub best_so_far: Vec<f64>,
}

/// Best true sum rate over `budget` uniform raw actions in `[−1, 1]^d`.
pub fn random_search(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    budget: usize,
    rng: &mut SeededRng,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Domain("random search needs a budget of at least 1".into()));
    }
    channels.check_dims(cfg)?;
    let mut best: Option<(DecodedAction, f64)> = None;
    let mut best_so_far = Vec::with_capacity(budget);
    let mut raw = vec![0.0; cfg.action_dim()];
    for _ in 0..budget {
        for x in raw.iter_mut() {
            *x = rng.uniform_range(-1.0, 1.0);
        }
        let action = decode_action(&raw, cfg)?;
        let rate = sum_rate(
            &action.lossy,
            &channels.cascaded,
            &action.beamformer,
            cfg.noise_power,
            cfg.log_base,
        )?;
        if best.as_ref().is_none_or(|(_, r)| rate > *r) {
            best = Some((action, rate));
        }
        best_so_far.push(best.as_ref().map_or(rate, |(_, r)| *r));
    }
    let (best, best_rate) = best.ok_or(Error::State("empty search"))?;
    Ok(SearchResult {
        best,
        best_rate,
        best_so_far,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{amplitude, generate_channels};
    use crate::numerics::CVector;

    fn tiny(beta_min: f64, elements: usize) -> SystemConfig {
        SystemConfig {
            users: 1,
            antennas: 1,
            elements,
            beta_min,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn amplitude_matches_environment() {
        let cfg = SystemConfig::default();
        for i in 0..100 {
            let t = TAU * i as f64 / 100.0;
            let a = reference_amplitude(t, cfg.beta_min, cfg.mu, cfg.kappa);
            assert!((a - amplitude(t, &cfg)).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_limits() {
        assert_eq!(GridSpec { levels: 16 }.points(2).unwrap(), 256);
        assert!(matches!(GridSpec { levels: 16 }.points(5), Err(Error::TooLarge(_))));
        let mut count = 0;
        GridSpec { levels: 3 }
            .for_each(3, |_| {
                count += 1;
                Ok(())
            })
            .unwrap();
        assert_eq!(count, 27);
    }

    #[test]
    fn brute_force_dominates_grid_and_agrees_with_environment() {
        let cfg = tiny(0.3, 2);
        let channels = generate_channels(&cfg, &mut SeededRng::new(4)).unwrap();
        let g = matched_filter(&cfg, &channels).unwrap();
        let grid = GridSpec { levels: 16 };
        let best = brute_force_phases(&cfg, &channels, &g, grid).unwrap();
        grid.for_each(2, |phases| {
            let phi = lossy_reflection(phases, &cfg);
            let oracle = reference_rate(&phi, &channels.cascaded, &g, cfg.noise_power, cfg.log_base)?;
            let env = sum_rate(
                &CVector::from_vec(phi),
                &channels.cascaded,
                &g,
                cfg.noise_power,
                cfg.log_base,
            )?;
            assert!((oracle - env).abs() <= 1e-9);
            assert!(oracle <= best.rate);
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn ideal_hardware_dominates_lossy() {
        let ideal = tiny(1.0, 2);
        let lossy = tiny(0.3, 2);
        let channels = generate_channels(&ideal, &mut SeededRng::new(9)).unwrap();
        let g = matched_filter(&ideal, &channels).unwrap();
        let grid = GridSpec { levels: 8 };
        let a = brute_force_phases(&ideal, &channels, &g, grid).unwrap();
        let b = brute_force_phases(&lossy, &channels, &g, grid).unwrap();
        assert!(a.rate >= b.rate);
    }

    #[test]
    fn single_element_optimum_aligns_path() {
        // one user, no interference: rate grows with |φ d g|, maximized when |φ| = 1
        let cfg = tiny(1.0, 1);
        let channels = generate_channels(&cfg, &mut SeededRng::new(2)).unwrap();
        let g = matched_filter(&cfg, &channels).unwrap();
        let best = brute_force_phases(&cfg, &channels, &g, GridSpec { levels: 32 }).unwrap();
        let gain = (channels.cascaded[0][(0, 0)] * g[(0, 0)]).norm_sqr();
        let expected = libm::log2(1.0 + gain / cfg.noise_power);
        assert!((best.rate - expected).abs() < 1e-9);
    }

    #[test]
    fn random_search_budget_one_and_monotone() {
        let cfg = SystemConfig::default();
        let channels = generate_channels(&cfg, &mut SeededRng::new(5)).unwrap();
        let one = random_search(&cfg, &channels, 1, &mut SeededRng::new(6)).unwrap();
        let rate = sum_rate(
            &one.best.lossy,
            &channels.cascaded,
            &one.best.beamformer,
            cfg.noise_power,
            cfg.log_base,
        )
        .unwrap();
        assert_eq!(one.best_rate, rate);
        let many = random_search(&cfg, &channels, 200, &mut SeededRng::new(6)).unwrap();
        assert_eq!(many.best_so_far[0], one.best_rate);
        assert!(many.best_so_far.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(*many.best_so_far.last().unwrap(), many.best_rate);
        assert!(random_search(&cfg, &channels, 0, &mut SeededRng::new(6)).is_err());
    }
}
