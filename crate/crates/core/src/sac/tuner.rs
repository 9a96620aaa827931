use crate::error::{Error, Result};
use crate::neural::{Adam, Direction};

/// Learned entropy temperature `α = exp(log α)`.
#[derive(Debug, Clone)]
pub struct EntropyTuner {
    log_alpha: f64,
    target_entropy: f64,
    opt: Adam,
}

impl EntropyTuner {
    pub fn new(initial_alpha: f64, target_entropy: f64, lr: f64) -> Result<Self> {
        Self::with_optimizer(initial_alpha, target_entropy, Adam::new(1, lr))
    }

    pub fn with_optimizer(initial_alpha: f64, target_entropy: f64, opt: Adam) -> Result<Self> {
        if !(initial_alpha > 0.0 && initial_alpha.is_finite()) {
            return Err(Error::Domain(alloc::format!(
                "initial alpha must be positive, got {initial_alpha}"
            )));
        }
        Ok(Self {
            log_alpha: libm::log(initial_alpha),
            target_entropy,
            opt,
        })
    }

    pub fn alpha(&self) -> f64 {
        libm::exp(self.log_alpha)
    }

    pub fn log_alpha(&self) -> f64 {
        self.log_alpha
    }

    pub fn target_entropy(&self) -> f64 {
        self.target_entropy
    }

    /// One descent step on `J = mean(−α·(log π + target))` w.r.t. `log α`.
    pub fn update(&mut self, log_probs: &[f64]) -> Result<f64> {
        if log_probs.is_empty() {
            return Ok(self.alpha());
        }
        let alpha = self.alpha();
        let grad = log_probs
            .iter()
            .map(|lp| -alpha * (lp + self.target_entropy))
            .sum::<f64>()
            / log_probs.len() as f64;
        let mut param = [self.log_alpha];
        self.opt.step(&mut param, &[grad], Direction::Descend)?;
        self.log_alpha = param[0];
        Ok(self.alpha())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    #[test]
    fn fixed_point_leaves_alpha() {
        let mut t = EntropyTuner::new(0.2, -4.0, 1e-3).unwrap();
        let a0 = t.alpha();
        t.update(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(t.alpha(), a0);
    }

    #[test]
    fn too_deterministic_policy_raises_alpha() {
        let mut t = EntropyTuner::new(0.2, -4.0, 1e-3).unwrap();
        let a0 = t.alpha();
        t.update(&[6.0, 7.0]).unwrap();
        assert!(t.alpha() > a0);
        let mut t = EntropyTuner::new(0.2, -4.0, 1e-3).unwrap();
        t.update(&[1.0, 2.0]).unwrap();
        assert!(t.alpha() < a0);
    }

    #[test]
    fn alpha_stays_positive() {
        let mut t = EntropyTuner::new(0.2, -4.0, 1e-2).unwrap();
        let mut rng = SeededRng::new(5);
        for _ in 0..10_000 {
            let lp = [rng.uniform_range(-50.0, 50.0), rng.uniform_range(-50.0, 50.0)];
            t.update(&lp).unwrap();
            assert!(t.alpha() > 0.0);
        }
    }

    #[test]
    fn rejects_non_positive_alpha() {
        assert!(EntropyTuner::new(0.0, -1.0, 1e-3).is_err());
    }
}
