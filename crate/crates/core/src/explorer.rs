//! β-space exploration: a deterministic explorer network that predicts
//! per-element reflection losses and scales the phase part of the policy's
//! actions, trained to maximize the twin critics' TD error.

use alloc::vec;
use alloc::vec::Vec;

use crate::environment::SystemConfig;
use crate::error::{check_len, Error, Result};
use crate::neural::{polyak_update, Adam, Direction, GradientBundle, Mlp, OutputActivation};
use crate::numerics::SeededRng;
use crate::sac::CriticEval;

/// How the explorer output is composed with an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationMode {
    /// `a ⊙ ((1 − λ)·1 + λ·ξ)`: λ → 0 recovers the raw action.
    Blended,
    /// `a ⊙ (λ·ξ)`, the formula taken verbatim.
    Literal,
}

/// Linear decay `λ(t) = λ₀·max(0, 1 − t/T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSchedule {
    initial: f64,
    total_steps: u64,
    step: u64,
}

impl LambdaSchedule {
    pub fn new(initial: f64, total_steps: u64) -> Self {
        Self {
            initial,
            total_steps,
            step: 0,
        }
    }

    pub fn value_at(&self, t: u64) -> f64 {
        if self.total_steps == 0 {
            return 0.0;
        }
        let frac = 1.0 - t as f64 / self.total_steps as f64;
        self.initial * frac.max(0.0)
    }

    pub fn current(&self) -> f64 {
        self.value_at(self.step)
    }

    /// Returns λ at the current step and advances.
    pub fn advance(&mut self) -> f64 {
        let lambda = self.current();
        self.step += 1;
        lambda
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Domain(alloc::format!("lambda must lie in [0, 1], got {lambda}")))
    }
}

/// Per-entry factor applied to an action for explorer output `xi`.
///
/// Entries where `xi == 1` (the beamformer prefix) are left exactly 1 in
/// blended mode.
pub fn perturbation_factors(xi: &[f64], lambda: f64, mode: PerturbationMode) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    Ok(xi
        .iter()
        .map(|&x| match mode {
            PerturbationMode::Blended if x == 1.0 => 1.0,
            PerturbationMode::Blended => ((1.0 - lambda) + lambda * x).min(1.0),
            PerturbationMode::Literal => lambda * x,
        })
        .collect())
}

/// `a_β̂`: the action scaled entrywise by the perturbation factors.
pub fn perturb(action: &[f64], xi: &[f64], lambda: f64, mode: PerturbationMode) -> Result<Vec<f64>> {
    check_len("perturb", action.len(), xi.len())?;
    let factors = perturbation_factors(xi, lambda, mode)?;
    Ok(action.iter().zip(&factors).map(|(a, f)| a * f).collect())
}

/// One multiplier per RIS element, read from the phase part of a factor
/// vector (both entries of a pair carry the same factor).
pub fn element_multipliers(factors: &[f64], beamformer_dim: usize) -> Vec<f64> {
    factors[beamformer_dim..].iter().step_by(2).copied().collect()
}

/// Explorer network `ξ_ω` with its Polyak target `ξ_ω′`.
#[derive(Debug, Clone)]
pub struct ExplorerNet {
    pub online: Mlp,
    pub target: Mlp,
    opt: Adam,
    beta_lo: f64,
    beamformer_dim: usize,
    elements: usize,
}

impl ExplorerNet {
    pub fn new(cfg: &SystemConfig, hidden: usize, beta_lo: f64, lr: f64, rng: &mut SeededRng) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta_lo) {
            return Err(Error::Domain(alloc::format!(
                "beta_lo must lie in [0, 1], got {beta_lo}"
            )));
        }
        let online = Mlp::new(
            &[cfg.state_dim(), hidden, hidden, cfg.elements],
            OutputActivation::Tanh,
            rng,
        )?;
        Self::from_net(cfg, online, beta_lo, lr)
    }

    /// Wraps an existing network; the target starts as an exact copy.
    pub fn from_net(cfg: &SystemConfig, online: Mlp, beta_lo: f64, lr: f64) -> Result<Self> {
        check_len("ExplorerNet input", cfg.state_dim(), online.input_size())?;
        check_len("ExplorerNet output", cfg.elements, online.output_size())?;
        Ok(Self {
            target: online.clone(),
            opt: Adam::new(online.num_params(), lr),
            online,
            beta_lo,
            beamformer_dim: cfg.beamformer_dim(),
            elements: cfg.elements,
        })
    }

    pub fn optimizer_mut(&mut self) -> &mut Adam {
        &mut self.opt
    }

    pub fn beta_lo(&self) -> f64 {
        self.beta_lo
    }

    pub fn action_dim(&self) -> usize {
        self.beamformer_dim + 2 * self.elements
    }

    /// `β̂ = β_lo + (1 − β_lo)(x + 1)/2` for tanh outputs `x`.
    pub fn beta_from_output(&self, x: f64) -> f64 {
        self.beta_lo + (1.0 - self.beta_lo) * (x + 1.0) / 2.0
    }

    /// `[1 … 1 | β̂₁ β̂₁ … β̂_L β̂_L]` for each row of tanh outputs.
    fn assemble(&self, outputs: &[f64]) -> Vec<f64> {
        let mut xi = Vec::with_capacity(outputs.len() / self.elements * self.action_dim());
        for row in outputs.chunks_exact(self.elements) {
            xi.extend(core::iter::repeat_n(1.0, self.beamformer_dim));
            for &x in row {
                let b = self.beta_from_output(x);
                xi.push(b);
                xi.push(b);
            }
        }
        xi
    }

    /// Assembled `ξ_ω(s)` for one state.
    pub fn predict_beta(&self, state: &[f64]) -> Result<Vec<f64>> {
        Ok(self.assemble(&self.online.forward(state)?))
    }

    /// Assembled `ξ` for a batch of states, from the online or target net.
    pub fn predict_batch(&self, states: &[f64], batch: usize, use_target: bool) -> Result<Vec<f64>> {
        let net = if use_target { &self.target } else { &self.online };
        Ok(self.assemble(net.forward_batch(states, batch)?.output()))
    }

    /// `J(ω) = Σ_i (1/N)·‖y − Q_i(s, a ⊙ f(λ, ξ_ω(s)))‖²` with `y` held
    /// fixed, and its gradient w.r.t. the online parameters.
    ///
    /// `actions` are fresh policy actions on `states`.
    pub fn objective_and_gradient(
        &self,
        states: &[f64],
        actions: &[f64],
        targets: &[f64],
        lambda: f64,
        mode: PerturbationMode,
        critics: [&Mlp; 2],
    ) -> Result<(f64, GradientBundle)> {
        let n = targets.len();
        let ad = self.action_dim();
        check_len("explorer update actions", n * ad, actions.len())?;
        let trace = self.online.forward_batch(states, n)?;
        let xi = self.assemble(trace.output());
        let factors = perturbation_factors(&xi, lambda, mode)?;
        let perturbed: Vec<f64> = actions.iter().zip(&factors).map(|(a, f)| a * f).collect();

        let mut objective = 0.0;
        let mut d_perturbed = vec![0.0; n * ad];
        for critic in critics {
            let eval = CriticEval::new(critic, states, &perturbed, n)?;
            let q = eval.values();
            objective += q.iter().zip(targets).map(|(q, y)| (y - q) * (y - q)).sum::<f64>() / n as f64;
            // dJ/dq = 2(q − y)/N
            let upstream: Vec<f64> = q.iter().zip(targets).map(|(q, y)| 2.0 * (q - y) / n as f64).collect();
            for (d, g) in d_perturbed.iter_mut().zip(eval.action_gradient(&upstream)?) {
                *d += g;
            }
        }

        // chain through a ⊙ factor(ξ); d factor/dξ = λ in both modes
        let mut d_outputs = vec![0.0; n * self.elements];
        let scale = (1.0 - self.beta_lo) / 2.0;
        for row in 0..n {
            for l in 0..self.elements {
                let base = row * ad + self.beamformer_dim + 2 * l;
                let d_beta = (d_perturbed[base] * actions[base] + d_perturbed[base + 1] * actions[base + 1]) * lambda;
                d_outputs[row * self.elements + l] = d_beta * scale;
            }
        }
        Ok((objective, self.online.backward_batch(&trace, &d_outputs, true)?))
    }

    /// One gradient-ascent step on the objective of
    /// [`Self::objective_and_gradient`]; returns `J(ω)` before the step.
    pub fn update(
        &mut self,
        states: &[f64],
        actions: &[f64],
        targets: &[f64],
        lambda: f64,
        mode: PerturbationMode,
        critics: [&Mlp; 2],
    ) -> Result<f64> {
        let (objective, grads) = self.objective_and_gradient(states, actions, targets, lambda, mode, critics)?;
        self.opt.step_mlp(&mut self.online, &grads, Direction::Ascend)?;
        Ok(objective)
    }

    pub fn update_target(&mut self, tau: f64) -> Result<()> {
        polyak_update(&mut self.target, &self.online, tau)
    }
}
