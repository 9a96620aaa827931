use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Result};
use crate::neural::{GradientBundle, Mlp, OutputActivation, Trace};
use crate::numerics::SeededRng;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Tanh-squashed diagonal Gaussian policy.
///
/// The network emits `[mean head | log-std head]`. The mean head goes
/// through tanh, the log-std head is clamped to `[log_std_min, log_std_max]`.
#[derive(Debug, Clone)]
pub struct GaussianPolicy {
    pub net: Mlp,
    action_dim: usize,
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub squash_eps: f64,
}

/// Reparameterized samples together with what the backward pass needs.
#[derive(Debug, Clone)]
pub struct PolicySample {
    pub batch: usize,
    /// `a = tanh(u)`, `batch × action_dim`.
    pub actions: Vec<f64>,
    pub log_probs: Vec<f64>,
    noise: Vec<f64>,
    mean_head: Vec<f64>,
    std: Vec<f64>,
    log_std_free: Vec<bool>,
    trace: Trace,
}

impl GaussianPolicy {
    pub fn new(state_dim: usize, action_dim: usize, hidden: usize, rng: &mut SeededRng) -> Result<Self> {
        let net = Mlp::new(
            &[state_dim, hidden, hidden, 2 * action_dim],
            OutputActivation::Linear,
            rng,
        )?;
        Self::from_net(net)
    }

    pub fn from_net(net: Mlp) -> Result<Self> {
        let out = net.output_size();
        check_len("policy head (even)", out - out % 2, out)?;
        Ok(Self {
            action_dim: out / 2,
            net,
            log_std_min: -20.0,
            log_std_max: 2.0,
            squash_eps: 1e-6,
        })
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    /// Draws one action per state: `u = mean + std·ε`, `a = tanh(u)`,
    /// `log π(a|s) = Σ [log N(u; mean, std²) − log(1 − a² + ε_sq)]`.
    pub fn sample(&self, states: &[f64], batch: usize, rng: &mut SeededRng) -> Result<PolicySample> {
        let noise: Vec<f64> = (0..batch * self.action_dim).map(|_| rng.standard_normal()).collect();
        self.sample_with_noise(states, batch, noise)
    }

    /// Same as [`Self::sample`] with caller-provided standard-normal noise.
    pub fn sample_with_noise(&self, states: &[f64], batch: usize, noise: Vec<f64>) -> Result<PolicySample> {
        let d = self.action_dim;
        check_len("policy noise", batch * d, noise.len())?;
        let trace = self.net.forward_batch(states, batch)?;
        let out = trace.output();
        let mut actions = Vec::with_capacity(batch * d);
        let mut log_probs = Vec::with_capacity(batch);
        let mut mean_head = Vec::with_capacity(batch * d);
        let mut std = Vec::with_capacity(batch * d);
        let mut log_std_free = Vec::with_capacity(batch * d);
        for row in 0..batch {
            let head = &out[row * 2 * d..(row + 1) * 2 * d];
            let mut lp = 0.0;
            for i in 0..d {
                let mean = libm::tanh(head[i]);
                let raw_ls = head[d + i];
                let ls = raw_ls.clamp(self.log_std_min, self.log_std_max);
                let sd = libm::exp(ls);
                let eps = noise[row * d + i];
                let a = libm::tanh(mean + sd * eps);
                lp += -0.5 * eps * eps - ls - HALF_LN_2PI - libm::log(1.0 - a * a + self.squash_eps);
                actions.push(a);
                mean_head.push(mean);
                std.push(sd);
                log_std_free.push(raw_ls >= self.log_std_min && raw_ls <= self.log_std_max);
            }
            log_probs.push(lp);
        }
        Ok(PolicySample {
            batch,
            actions,
            log_probs,
            noise,
            mean_head,
            std,
            log_std_free,
            trace,
        })
    }

    /// One action and its log-probability for a single state.
    pub fn select_action(&self, state: &[f64], rng: &mut SeededRng) -> Result<(Vec<f64>, f64)> {
        let s = self.sample(state, 1, rng)?;
        Ok((s.actions, s.log_probs[0]))
    }

    /// Parameter gradient of `Σ_i [⟨d_actions_i, a_i⟩ + d_log_probs_i·log π(a_i|s_i)]`
    /// through the reparameterized sample.
    pub fn backward(&self, sample: &PolicySample, d_actions: &[f64], d_log_probs: &[f64]) -> Result<GradientBundle> {
        let upstream = self.head_upstream(sample, d_actions, d_log_probs)?;
        self.net.param_gradient_batch(&sample.trace, &upstream)
    }

    /// As [`Self::backward`], plus the gradient w.r.t. the states.
    pub fn backward_full(
        &self,
        sample: &PolicySample,
        d_actions: &[f64],
        d_log_probs: &[f64],
    ) -> Result<GradientBundle> {
        let upstream = self.head_upstream(sample, d_actions, d_log_probs)?;
        self.net.backward_batch(&sample.trace, &upstream, true)
    }

    fn head_upstream(&self, sample: &PolicySample, d_actions: &[f64], d_log_probs: &[f64]) -> Result<Vec<f64>> {
        let d = self.action_dim;
        let n = sample.batch;
        check_len("policy d_actions", n * d, d_actions.len())?;
        check_len("policy d_log_probs", n, d_log_probs.len())?;
        let mut upstream = vec![0.0; n * 2 * d];
        for row in 0..n {
            let gl = d_log_probs[row];
            for i in 0..d {
                let k = row * d + i;
                let a = sample.actions[k];
                let one_minus = 1.0 - a * a;
                // d/du of the squash correction −log(1 − a² + ε) is 2a(1 − a²)/(1 − a² + ε)
                let du = d_actions[k] * one_minus + gl * 2.0 * a * one_minus / (one_minus + self.squash_eps);
                let mean = sample.mean_head[k];
                upstream[row * 2 * d + i] = du * (1.0 - mean * mean);
                upstream[row * 2 * d + d + i] = if sample.log_std_free[k] {
                    du * sample.std[k] * sample.noise[k] - gl
                } else {
                    0.0
                };
            }
        }
        Ok(upstream)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_policy(seed: u64, state_dim: usize, action_dim: usize) -> GaussianPolicy {
        GaussianPolicy::new(state_dim, action_dim, 16, &mut SeededRng::new(seed)).unwrap()
    }

    #[test]
    fn actions_strictly_inside_unit_cube() {
        let p = toy_policy(1, 3, 4);
        let mut rng = SeededRng::new(2);
        let states: Vec<f64> = (0..3 * 64).map(|_| rng.uniform_range(-3.0, 3.0)).collect();
        let s = p.sample(&states, 64, &mut rng).unwrap();
        assert!(s.actions.iter().all(|a| a.abs() < 1.0));
        assert!(s.log_probs.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn vanishing_noise_gives_tanh_of_mean() {
        // bias of the log-std head forced to −30, clamped to −20
        let mut p = toy_policy(3, 2, 2);
        let n = p.net.num_params();
        p.net.params_mut()[n - 2..].copy_from_slice(&[-30.0, -30.0]);
        let state = [0.4, -0.9];
        let head = p.net.forward(&state).unwrap();
        let (a1, _) = p.select_action(&state, &mut SeededRng::new(5)).unwrap();
        let (a2, _) = p.select_action(&state, &mut SeededRng::new(6)).unwrap();
        for i in 0..2 {
            let expected = libm::tanh(libm::tanh(head[i]));
            assert!((a1[i] - expected).abs() < 1e-6);
            assert!((a1[i] - a2[i]).abs() < 1e-6);
        }
    }

    /// Density of `a` via the probability of a small box around it,
    /// integrated exactly in pre-squash space with the Gaussian CDF.
    #[test]
    fn log_prob_matches_box_probability() {
        let p = toy_policy(7, 3, 2);
        let state = [0.2, -0.5, 1.0];
        let head = p.net.forward(&state).unwrap();
        let s = p.sample(&state, 1, &mut SeededRng::new(9)).unwrap();
        let h = 1e-4;
        let mut log_density = 0.0;
        for i in 0..2 {
            let mean = libm::tanh(head[i]);
            let sd = libm::exp(head[2 + i].clamp(-20.0, 2.0));
            let a = s.actions[i];
            let cdf = |u: f64| 0.5 * (1.0 + libm::erf((u - mean) / (sd * core::f64::consts::SQRT_2)));
            let mass = cdf(libm::atanh(a + h)) - cdf(libm::atanh(a - h));
            log_density += libm::log(mass / (2.0 * h));
        }
        // the policy adds ε = 1e-6 inside the squash correction
        assert!(
            (log_density - s.log_probs[0]).abs() < 1e-4,
            "{log_density} vs {}",
            s.log_probs[0]
        );
    }

    #[test]
    fn backward_matches_finite_differences() {
        let p = toy_policy(11, 3, 2);
        let mut rng = SeededRng::new(12);
        let states: Vec<f64> = (0..3 * 4).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        let noise: Vec<f64> = (0..8).map(|_| rng.standard_normal()).collect();
        let wa: Vec<f64> = (0..8).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        let wl: Vec<f64> = (0..4).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        let objective = |pol: &GaussianPolicy| {
            let s = pol.sample_with_noise(&states, 4, noise.clone()).unwrap();
            s.actions.iter().zip(&wa).map(|(a, w)| a * w).sum::<f64>()
                + s.log_probs.iter().zip(&wl).map(|(l, w)| l * w).sum::<f64>()
        };
        let sample = p.sample_with_noise(&states, 4, noise.clone()).unwrap();
        let g = p.backward(&sample, &wa, &wl).unwrap();
        let h = 1e-5;
        for i in 0..p.net.num_params() {
            let mut plus = p.clone();
            plus.net.params_mut()[i] += h;
            let mut minus = p.clone();
            minus.net.params_mut()[i] -= h;
            let numeric = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let rel = (numeric - g.params[i]).abs() / numeric.abs().max(g.params[i].abs()).max(1e-6);
            assert!(rel < 1e-4, "param {i}: {numeric} vs {}", g.params[i]);
        }
    }
}
