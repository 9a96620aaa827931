use alloc::vec;
use alloc::vec::Vec;

use super::mlp::{GradientBundle, Mlp};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Descend,
    Ascend,
}

/// Adam optimizer state for one parameter buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(num_params: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
        }
    }

    pub fn with_moments(mut self, beta1: f64, beta2: f64, eps: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self.eps = eps;
        self
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update of `params`.
    ///
    /// Rejects non-finite gradients without touching any state.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], direction: Direction) -> Result<()> {
        check_len("Adam::step params", self.m.len(), params.len())?;
        check_len("Adam::step grads", self.m.len(), grads.len())?;
        if grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        self.step += 1;
        let t = self.step as f64;
        let inv_bc1 = 1.0 / (1.0 - libm::pow(self.beta1, t));
        let inv_bc2 = 1.0 / (1.0 - libm::pow(self.beta2, t));
        let (b1, b2) = (self.beta1, self.beta2);
        let sign = match direction {
            Direction::Descend => 1.0,
            Direction::Ascend => -1.0,
        };
        for (((p, &g0), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            let g = sign * g0;
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= self.lr * (*m * inv_bc1) / (sqrt(*v * inv_bc2) + self.eps);
        }
        Ok(())
    }

    /// Applies the parameter part of `grads` to `net`.
    pub fn step_mlp(&mut self, net: &mut Mlp, grads: &GradientBundle, direction: Direction) -> Result<()> {
        self.step(net.params_mut(), &grads.params, direction)
    }
}

#[inline(always)]
fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.sqrt();
    #[cfg(not(feature = "std"))]
    return libm::sqrt(x);
}

/// `target ← (1 − τ)·target + τ·online`.
pub fn polyak_update(target: &mut Mlp, online: &Mlp, tau: f64) -> Result<()> {
    if !target.same_architecture(online) {
        return Err(Error::Shape {
            context: "polyak_update parameters",
            expected: target.num_params(),
            found: online.num_params(),
        });
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Domain(alloc::format!("tau must lie in (0, 1], got {tau}")));
    }
    for (t, o) in target.params_mut().iter_mut().zip(online.params()) {
        *t = (1.0 - tau) * *t + tau * o;
    }
    Ok(())
}
