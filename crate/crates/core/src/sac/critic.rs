use alloc::vec::Vec;

use crate::error::{check_len, Result};
use crate::neural::{Mlp, Trace};

/// Row-wise concatenation `[state ‖ action]` for `n` rows.
pub fn critic_input(states: &[f64], actions: &[f64], n: usize) -> Vec<f64> {
    let sd = states.len() / n.max(1);
    let ad = actions.len() / n.max(1);
    let mut x = Vec::with_capacity(n * (sd + ad));
    for (s, a) in states.chunks_exact(sd).zip(actions.chunks_exact(ad)) {
        x.extend_from_slice(s);
        x.extend_from_slice(a);
    }
    x
}

/// A critic evaluated on a batch of `(s, a)` pairs, ready for backprop.
pub struct CriticEval<'a> {
    critic: &'a Mlp,
    trace: Trace,
    state_dim: usize,
}

impl<'a> CriticEval<'a> {
    pub fn new(critic: &'a Mlp, states: &[f64], actions: &[f64], n: usize) -> Result<Self> {
        check_len("critic output", 1, critic.output_size())?;
        check_len("critic input", critic.input_size() * n, states.len() + actions.len())?;
        let trace = critic.forward_batch(&critic_input(states, actions, n), n)?;
        Ok(Self {
            critic,
            trace,
            state_dim: states.len() / n.max(1),
        })
    }

    pub fn values(&self) -> &[f64] {
        self.trace.output()
    }

    /// `∂/∂a Σ_i upstream_i·Q(s_i, a_i)`, `n × action_dim`.
    pub fn action_gradient(&self, upstream: &[f64]) -> Result<Vec<f64>> {
        let g = self.critic.backward_batch(&self.trace, upstream, false)?;
        let width = self.critic.input_size();
        Ok(g.input
            .chunks_exact(width)
            .flat_map(|row| row[self.state_dim..].iter().copied())
            .collect())
    }

    /// Parameter gradient of `Σ_i upstream_i·Q(s_i, a_i)`.
    pub fn param_gradient(&self, upstream: &[f64]) -> Result<Vec<f64>> {
        Ok(self.critic.param_gradient_batch(&self.trace, upstream)?.params)
    }
}
