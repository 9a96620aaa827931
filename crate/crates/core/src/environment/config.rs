use crate::error::{Error, Result};

/// Which objective the agent is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Perfect channels and the true phase-dependent amplitude model.
    Golden,
    /// Noisy cascaded-channel estimates and assumed lossless reflections.
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogBase {
    Two,
    Natural,
}

impl LogBase {
    pub fn log1p(self, x: f64) -> f64 {
        match self {
            LogBase::Two => libm::log2(1.0 + x),
            LogBase::Natural => libm::log1p(x),
        }
    }
}

/// Scenario scalars for one downlink system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// K single-antenna users.
    pub users: usize,
    /// M base-station antennas.
    pub antennas: usize,
    /// L RIS elements.
    pub elements: usize,
    /// P_t in dBm.
    pub power_dbm: f64,
    /// σ_w², linear.
    pub noise_power: f64,
    /// σ_e², linear.
    pub error_variance: f64,
    pub beta_min: f64,
    /// μ in radians.
    pub mu: f64,
    pub kappa: f64,
    pub scenario: Scenario,
    pub log_base: LogBase,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            users: 4,
            antennas: 4,
            elements: 16,
            power_dbm: 30.0,
            noise_power: 1e-2,
            error_variance: 1e-2,
            beta_min: 0.3,
            mu: 0.0,
            kappa: 1.5,
            scenario: Scenario::Golden,
            log_base: LogBase::Two,
        }
    }
}

/// `10^((p − 30)/10)` watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::Domain(msg));
        if self.users == 0 || self.antennas == 0 || self.elements == 0 {
            return fail(alloc::format!(
                "K, M, L must be >= 1 (got {}, {}, {})",
                self.users,
                self.antennas,
                self.elements
            ));
        }
        if !(0.0..=1.0).contains(&self.beta_min) {
            return fail(alloc::format!("beta_min must lie in [0, 1], got {}", self.beta_min));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return fail(alloc::format!("kappa must be >= 0, got {}", self.kappa));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return fail(alloc::format!("mu must be >= 0, got {}", self.mu));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return fail(alloc::format!("noise power must be > 0, got {}", self.noise_power));
        }
        if !(self.error_variance >= 0.0 && self.error_variance.is_finite()) {
            return fail(alloc::format!(
                "error variance must be >= 0, got {}",
                self.error_variance
            ));
        }
        let p = self.power_watts();
        if !(p > 0.0 && p.is_finite()) {
            return fail(alloc::format!("transmit power must be > 0 W, got {p}"));
        }
        Ok(())
    }

    pub fn power_watts(&self) -> f64 {
        dbm_to_watts(self.power_dbm)
    }

    /// `2MK + 2L`.
    pub fn action_dim(&self) -> usize {
        2 * self.antennas * self.users + 2 * self.elements
    }

    /// `2KLM + 2MK + 2L + 2K`.
    pub fn state_dim(&self) -> usize {
        2 * self.users * self.elements * self.antennas + self.action_dim() + 2 * self.users
    }

    /// Length of the beamformer slice at the front of an action vector.
    pub fn beamformer_dim(&self) -> usize {
        2 * self.antennas * self.users
    }
}

/// Phase-dependent reflection amplitude
/// `(1 − β_min)·((sin(φ − μ) + 1)/2)^κ + β_min`.
pub fn amplitude(phase: f64, cfg: &SystemConfig) -> f64 {
    let base = (libm::sin(phase - cfg.mu) + 1.0) / 2.0;
    // sin can overshoot 1 or undershoot −1 by an ulp
    let base = base.clamp(0.0, 1.0);
    (1.0 - cfg.beta_min) * libm::pow(base, cfg.kappa) + cfg.beta_min
}
