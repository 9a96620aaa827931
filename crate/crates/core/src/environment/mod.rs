//! RIS-aided MU-MISO downlink: channels, amplitude model, action decoding,
//! state construction and the sum-rate objectives.

mod action;
mod channels;
mod config;
mod rate;
mod state;

use alloc::vec::Vec;

pub use action::{decode_action, encode_action, DecodedAction};
pub use channels::{generate_channels, ChannelSet};
pub use config::{amplitude, dbm_to_watts, LogBase, Scenario, SystemConfig};
pub use rate::{received_powers, sum_rate};
pub use state::{agent_phi, build_state, whiten, WhitenStats, WHITEN_EPS};

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, SeededRng};

/// What the agent sees after reset or a step.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvObservation {
    /// Whitened state.
    pub state: Vec<f64>,
    /// State before whitening.
    pub raw_state: Vec<f64>,
    /// Training reward under the configured scenario.
    pub reward: f64,
    /// True sum rate (actual amplitudes, true channels) of the executed action.
    pub true_sum_rate: f64,
}

/// A continuing (non-episodic) environment over one frozen channel draw.
#[derive(Debug, Clone)]
pub struct Environment {
    cfg: SystemConfig,
    channels: Option<ChannelSet>,
    stats: WhitenStats,
}

/// Reset action: `G = I` (first min(M, K) columns, power-normalized), `φ̂ = 1`.
pub fn initial_action(cfg: &SystemConfig) -> Result<DecodedAction> {
    let mut g = CMatrix::zeros(cfg.antennas, cfg.users);
    for i in 0..cfg.antennas.min(cfg.users) {
        g[(i, i)] = crate::numerics::C64::new(1.0, 0.0);
    }
    let ones = CVector::from_vec(alloc::vec![crate::numerics::C64::new(1.0, 0.0); cfg.elements]);
    // decoding applies the power normalization
    let raw = encode_action(&g, &ones);
    let normalized = decode_action(&raw, cfg)?;
    decode_action(&encode_action(&normalized.beamformer, &normalized.unit), cfg)
}

impl Environment {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let dim = cfg.state_dim();
        Ok(Self {
            cfg,
            channels: None,
            stats: WhitenStats::new(dim),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn channels(&self) -> Option<&ChannelSet> {
        self.channels.as_ref()
    }

    /// Draws a fresh channel realization and returns the initial observation.
    pub fn reset(&mut self, rng: &mut SeededRng) -> Result<EnvObservation> {
        let channels = generate_channels(&self.cfg, rng)?;
        self.reset_with_channels(channels)
    }

    /// Resets onto a given channel realization (used for replays).
    pub fn reset_with_channels(&mut self, channels: ChannelSet) -> Result<EnvObservation> {
        channels.check_dims(&self.cfg)?;
        self.channels = Some(channels);
        self.stats = WhitenStats::new(self.cfg.state_dim());
        let action = initial_action(&self.cfg)?;
        self.observe(&action)
    }

    /// Executes a raw action; `scaling` carries the explorer's per-element
    /// multipliers on `φ̂` (mismatch scenario only).
    pub fn step(&mut self, raw: &[f64], scaling: Option<&[f64]>) -> Result<EnvObservation> {
        if self.channels.is_none() {
            return Err(Error::State("environment stepped before reset"));
        }
        let mut action = decode_action(raw, &self.cfg)?;
        if let Some(multipliers) = scaling {
            if self.cfg.scenario == Scenario::Golden {
                return Err(Error::State("explorer scaling requires the mismatch scenario"));
            }
            action = action.with_scaling(multipliers)?;
        }
        self.observe(&action)
    }

    /// Reward of `action` under the configured scenario.
    pub fn reward(&self, action: &DecodedAction) -> Result<f64> {
        let channels = self.channels.as_ref().ok_or(Error::State("no channels"))?;
        sum_rate(
            agent_phi(action, self.cfg.scenario),
            channels.known(self.cfg.scenario),
            &action.beamformer,
            self.cfg.noise_power,
            self.cfg.log_base,
        )
    }

    /// Sum rate of `action` under the true amplitude model and channels.
    pub fn true_sum_rate(&self, action: &DecodedAction) -> Result<f64> {
        let channels = self.channels.as_ref().ok_or(Error::State("no channels"))?;
        sum_rate(
            &action.lossy,
            &channels.cascaded,
            &action.beamformer,
            self.cfg.noise_power,
            self.cfg.log_base,
        )
    }

    fn observe(&mut self, action: &DecodedAction) -> Result<EnvObservation> {
        let channels = self.channels.as_ref().ok_or(Error::State("no channels"))?;
        let reward = self.reward(action)?;
        let true_sum_rate = self.true_sum_rate(action)?;
        let raw_state = build_state(channels, action, &self.cfg)?;
        let state = whiten(&raw_state, &mut self.stats)?;
        Ok(EnvObservation {
            state,
            raw_state,
            reward,
            true_sum_rate,
        })
    }
}
