use alloc::vec::Vec;

use super::agent::{streams, AgentConfig, SacAgent};
use super::replay::Transition;
use crate::environment::{ChannelSet, EnvObservation, Environment, Scenario, SystemConfig};
use crate::error::{Error, Result};
use crate::explorer::LambdaSchedule;
use crate::numerics::SeededRng;

/// One row of a run record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    /// Sum rate under the true amplitude model and true channels.
    pub true_sum_rate: f64,
    /// Reward the agent was trained on.
    pub training_reward: f64,
    pub lambda: f64,
    /// Temperature after this step's update.
    pub alpha: f64,
}

/// Steppable training loop: act, execute, store, update.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub env: Environment,
    pub agent: SacAgent,
    schedule: Option<LambdaSchedule>,
    obs: EnvObservation,
    step: u64,
    total_steps: u64,
}

impl Trainer {
    /// Fresh environment and agent for `seed`; channels are drawn from the
    /// seed unless given.
    pub fn new(
        sys: &SystemConfig,
        agent_cfg: AgentConfig,
        total_steps: u64,
        seed: u64,
        channels: Option<ChannelSet>,
    ) -> Result<Self> {
        if agent_cfg.explorer.is_some() && sys.scenario != Scenario::Mismatch {
            return Err(Error::Domain("the explorer requires the mismatch scenario".into()));
        }
        let mut env = Environment::new(sys.clone())?;
        let obs = match channels {
            Some(c) => env.reset_with_channels(c)?,
            None => env.reset(&mut SeededRng::new(seed).substream(streams::CHANNELS))?,
        };
        let agent = SacAgent::new(sys, agent_cfg, seed)?;
        Ok(Self {
            schedule: agent.lambda_schedule(total_steps),
            env,
            agent,
            obs,
            step: 0,
            total_steps,
        })
    }

    pub fn steps_done(&self) -> u64 {
        self.step
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.total_steps
    }

    pub fn step(&mut self) -> Result<StepRecord> {
        let lambda = self.schedule.as_mut().map_or(0.0, LambdaSchedule::advance);
        let act = self.agent.act(&self.obs.state, lambda)?;
        let next = self.env.step(&act.action, act.multipliers.as_deref())?;
        if !next.reward.is_finite() || !next.true_sum_rate.is_finite() {
            return Err(Error::NonFinite("reward"));
        }
        self.agent.observe(&Transition {
            state: core::mem::take(&mut self.obs.state),
            action: act.action,
            executed: act.executed,
            reward: next.reward,
            next_state: next.state.clone(),
        })?;
        self.agent.update(lambda)?;
        let record = StepRecord {
            step: self.step,
            true_sum_rate: next.true_sum_rate,
            training_reward: next.reward,
            lambda,
            alpha: self.agent.alpha(),
        };
        self.obs = next;
        self.step += 1;
        Ok(record)
    }

    /// Runs `n` more steps (or until done).
    pub fn run(&mut self, n: u64) -> Result<Vec<StepRecord>> {
        let n = n.min(self.total_steps - self.step);
        (0..n).map(|_| self.step()).collect()
    }

    pub fn run_to_end(&mut self) -> Result<Vec<StepRecord>> {
        self.run(self.total_steps - self.step)
    }
}

/// Full run of `steps` steps for one seed.
pub fn train_loop(sys: &SystemConfig, agent_cfg: AgentConfig, steps: u64, seed: u64) -> Result<Vec<StepRecord>> {
    Trainer::new(sys, agent_cfg, steps, seed, None)?.run_to_end()
}
