use alloc::vec;
use alloc::vec::Vec;

use super::action::DecodedAction;
use super::channels::ChannelSet;
use super::config::{Scenario, SystemConfig};
use super::rate::received_powers;
use crate::error::{check_len, Result};
use crate::numerics::CVector;

pub const WHITEN_EPS: f64 = 1e-8;

/// Reflection vector the agent of `scenario` believes was applied.
pub fn agent_phi(action: &DecodedAction, scenario: Scenario) -> &CVector {
    match scenario {
        Scenario::Golden => &action.lossy,
        Scenario::Mismatch => action.scaled.as_ref().unwrap_or(&action.unit),
    }
}

/// Raw state: `[K transmit powers | K receive powers | previous raw action |
/// Re/Im of the known cascaded channels]`.
pub fn build_state(channels: &ChannelSet, prev: &DecodedAction, cfg: &SystemConfig) -> Result<Vec<f64>> {
    check_len("build_state action", cfg.action_dim(), prev.raw.len())?;
    let mut state = Vec::with_capacity(cfg.state_dim());
    let g = &prev.beamformer;
    for user in 0..g.cols() {
        state.push(g.column(user).iter().map(|z| z.norm_sqr()).sum());
    }
    let known = channels.known(cfg.scenario);
    state.extend(received_powers(agent_phi(prev, cfg.scenario), known, g)?);
    state.extend_from_slice(&prev.raw);
    for d in known {
        for z in d.as_slice() {
            state.push(z.re);
            state.push(z.im);
        }
    }
    check_len("build_state length", cfg.state_dim(), state.len())?;
    Ok(state)
}

/// Per-dimension running mean and variance (Welford).
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenStats {
    mean: Vec<f64>,
    m2: Vec<f64>,
    count: u64,
}

impl WhitenStats {
    pub fn new(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
            count: 0,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self, i: usize) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2[i] / self.count as f64
        }
    }

    fn update(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = v - *mean;
            *mean += delta / n;
            *m2 += delta * (v - *mean);
        }
    }
}

/// Folds `raw` into the running statistics, then standardizes it.
pub fn whiten(raw: &[f64], stats: &mut WhitenStats) -> Result<Vec<f64>> {
    check_len("whiten", stats.mean.len(), raw.len())?;
    stats.update(raw);
    Ok(raw
        .iter()
        .enumerate()
        .map(|(i, x)| (x - stats.mean[i]) / libm::sqrt(stats.variance(i) + WHITEN_EPS))
        .collect())
}
