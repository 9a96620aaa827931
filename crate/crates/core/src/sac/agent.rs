use alloc::vec;
use alloc::vec::Vec;

use super::critic::CriticEval;
use super::policy::{GaussianPolicy, PolicySample};
use super::replay::{Batch, ReplayBuffer, Transition};
use super::reward::RewardTracker;
use super::tuner::EntropyTuner;
use crate::environment::SystemConfig;
use crate::error::{Error, Result};
use crate::explorer::{element_multipliers, perturbation_factors, ExplorerNet, LambdaSchedule, PerturbationMode};
use crate::neural::{polyak_update, Adam, Direction, Mlp, OutputActivation};
use crate::numerics::SeededRng;

/// Independent RNG substreams derived from one run seed.
pub mod streams {
    pub const CHANNELS: u64 = 0;
    pub const ACTOR_INIT: u64 = 1;
    pub const CRITIC1_INIT: u64 = 2;
    pub const CRITIC2_INIT: u64 = 3;
    pub const EXPLORER_INIT: u64 = 4;
    pub const ACTING: u64 = 5;
    pub const UPDATES: u64 = 6;
    pub const EXPLORER_UPDATES: u64 = 7;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorerConfig {
    pub lambda0: f64,
    pub mode: PerturbationMode,
    /// Lower end of the predicted amplitude range.
    pub beta_lo: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub hidden: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub gamma: f64,
    pub tau: f64,
    pub initial_alpha: f64,
    /// `None` means `−action_dim`.
    pub target_entropy: Option<f64>,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub squash_eps: f64,
    /// Constant every bias starts at.
    pub bias_init: f64,
    pub explorer: Option<ExplorerConfig>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            hidden: 256,
            lr: 1e-3,
            batch_size: 16,
            buffer_capacity: 20_000,
            gamma: 1.0,
            tau: 1e-3,
            initial_alpha: 0.2,
            target_entropy: None,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            log_std_min: -20.0,
            log_std_max: 2.0,
            squash_eps: 1e-6,
            bias_init: 0.0,
            explorer: None,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return Err(Error::Domain(
                "hidden, batch size and buffer capacity must be positive, capacity ≥ batch".into(),
            ));
        }
        if !(self.lr > 0.0) || !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Domain(alloc::format!(
                "invalid lr {} or tau {}",
                self.lr,
                self.tau
            )));
        }
        if !(self.log_std_min < self.log_std_max) || !(self.squash_eps >= 0.0) {
            return Err(Error::Domain(
                "log-std bounds must be increasing and squash epsilon non-negative".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) || !(self.adam_eps > 0.0) {
            return Err(Error::Domain(
                "Adam moments must lie in [0, 1) with positive epsilon".into(),
            ));
        }
        if let Some(ex) = &self.explorer {
            if !(0.0..=1.0).contains(&ex.lambda0) || !(0.0..=1.0).contains(&ex.beta_lo) {
                return Err(Error::Domain(alloc::format!(
                    "lambda0 {} and beta_lo {} must lie in [0, 1]",
                    ex.lambda0,
                    ex.beta_lo
                )));
            }
        }
        Ok(())
    }
}

/// Chosen action for one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Act {
    pub action: Vec<f64>,
    /// `a_β̂`; equal to `action` without an explorer.
    pub executed: Vec<f64>,
    /// Per-element multipliers on the unit-modulus RIS vector.
    pub multipliers: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateStats {
    pub critic_losses: [f64; 2],
    pub actor_loss: f64,
    pub explorer_objective: Option<f64>,
    pub alpha: f64,
}

/// Twin-critic SAC with average-reward targets and optional β-space explorer.
#[derive(Debug, Clone)]
pub struct SacAgent {
    cfg: AgentConfig,
    pub policy: GaussianPolicy,
    pub critics: [Mlp; 2],
    pub target_critics: [Mlp; 2],
    pub explorer: Option<ExplorerNet>,
    pub tuner: EntropyTuner,
    pub buffer: ReplayBuffer,
    pub rewards: RewardTracker,
    policy_opt: Adam,
    critic_opts: [Adam; 2],
    mode: PerturbationMode,
    beamformer_dim: usize,
    act_rng: SeededRng,
    update_rng: SeededRng,
    explorer_rng: SeededRng,
}

impl SacAgent {
    pub fn new(sys: &SystemConfig, cfg: AgentConfig, seed: u64) -> Result<Self> {
        sys.validate()?;
        cfg.validate()?;
        let base = SeededRng::new(seed);
        let (sd, ad, h) = (sys.state_dim(), sys.action_dim(), cfg.hidden);
        let actor_sizes = [sd, h, h, 2 * ad];
        let mut actor = Mlp::new(
            &actor_sizes,
            OutputActivation::Linear,
            &mut base.substream(streams::ACTOR_INIT),
        )?;
        actor.fill_biases(cfg.bias_init);
        let mut policy = GaussianPolicy::from_net(actor)?;
        policy.log_std_min = cfg.log_std_min;
        policy.log_std_max = cfg.log_std_max;
        policy.squash_eps = cfg.squash_eps;
        let critic = |stream| -> Result<Mlp> {
            let mut net = Mlp::new(
                &[sd + ad, h, h, 1],
                OutputActivation::Linear,
                &mut base.substream(stream),
            )?;
            net.fill_biases(cfg.bias_init);
            Ok(net)
        };
        let critics = [critic(streams::CRITIC1_INIT)?, critic(streams::CRITIC2_INIT)?];
        let adam = |n: usize| Adam::new(n, cfg.lr).with_moments(cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
        let (explorer, mode) = match &cfg.explorer {
            Some(ex) => {
                let mut net = Mlp::new(
                    &[sd, h, h, sys.elements],
                    OutputActivation::Tanh,
                    &mut base.substream(streams::EXPLORER_INIT),
                )?;
                net.fill_biases(cfg.bias_init);
                let mut explorer = ExplorerNet::from_net(sys, net, ex.beta_lo, cfg.lr)?;
                *explorer.optimizer_mut() = adam(explorer.online.num_params());
                (Some(explorer), ex.mode)
            }
            None => (None, PerturbationMode::Blended),
        };
        let target_entropy = cfg.target_entropy.unwrap_or(-(ad as f64));
        Ok(Self {
            tuner: EntropyTuner::with_optimizer(cfg.initial_alpha, target_entropy, adam(1))?,
            buffer: ReplayBuffer::new(cfg.buffer_capacity, sd, ad),
            rewards: RewardTracker::new(),
            policy_opt: adam(policy.net.num_params()),
            critic_opts: [adam(critics[0].num_params()), adam(critics[1].num_params())],
            target_critics: critics.clone(),
            critics,
            policy,
            explorer,
            mode,
            beamformer_dim: sys.beamformer_dim(),
            act_rng: base.substream(streams::ACTING),
            update_rng: base.substream(streams::UPDATES),
            explorer_rng: base.substream(streams::EXPLORER_UPDATES),
            cfg,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.cfg
    }

    pub fn alpha(&self) -> f64 {
        self.tuner.alpha()
    }

    /// Linear λ schedule over `total_steps`, or `None` without an explorer.
    pub fn lambda_schedule(&self, total_steps: u64) -> Option<LambdaSchedule> {
        self.cfg
            .explorer
            .as_ref()
            .map(|ex| LambdaSchedule::new(ex.lambda0, total_steps))
    }

    /// Samples `a ∼ π(·|s)` and, with an explorer, the perturbed `a_β̂`.
    pub fn act(&mut self, state: &[f64], lambda: f64) -> Result<Act> {
        let (action, _) = self.policy.select_action(state, &mut self.act_rng)?;
        match &self.explorer {
            Some(ex) => {
                let factors = perturbation_factors(&ex.predict_beta(state)?, lambda, self.mode)?;
                let executed = action.iter().zip(&factors).map(|(a, f)| a * f).collect();
                let multipliers = element_multipliers(&factors, self.beamformer_dim);
                Ok(Act {
                    action,
                    executed,
                    multipliers: Some(multipliers),
                })
            }
            None => Ok(Act {
                executed: action.clone(),
                action,
                multipliers: None,
            }),
        }
    }

    /// Stores a transition and folds its raw reward into the running average.
    pub fn observe(&mut self, t: &Transition) -> Result<()> {
        self.buffer.push(t)?;
        self.rewards.record(t.reward);
        Ok(())
    }

    /// Factors from the online (`use_target = false`) or target explorer.
    fn factors(&self, states: &[f64], n: usize, lambda: f64, use_target: bool) -> Result<Option<Vec<f64>>> {
        match &self.explorer {
            Some(ex) => Ok(Some(perturbation_factors(
                &ex.predict_batch(states, n, use_target)?,
                lambda,
                self.mode,
            )?)),
            None => Ok(None),
        }
    }

    /// One full update: critics, actor, explorer, α, then Polyak targets.
    /// Returns `None` while the buffer holds fewer than one mini-batch.
    pub fn update(&mut self, lambda: f64) -> Result<Option<UpdateStats>> {
        let Some(batch) = self.buffer.sample(self.cfg.batch_size, &mut self.update_rng) else {
            return Ok(None);
        };
        let (critic_losses, targets) = self.critic_update(&batch, lambda)?;
        let (actor_loss, log_probs) = self.actor_update(&batch, lambda)?;
        let explorer_objective = self.explorer_update(&batch, &targets, lambda)?;
        let alpha = self.tuner.update(&log_probs)?;
        for (target, online) in self.target_critics.iter_mut().zip(&self.critics) {
            polyak_update(target, online, self.cfg.tau)?;
        }
        if let Some(ex) = &mut self.explorer {
            ex.update_target(self.cfg.tau)?;
        }
        Ok(Some(UpdateStats {
            critic_losses,
            actor_loss,
            explorer_objective,
            alpha,
        }))
    }

    /// TD targets `y = r̃ + γ(min_i Q′_i(s′, a′ ⊙ f′) − α log π(a′|s′))`.
    pub fn critic_targets(&mut self, batch: &Batch, lambda: f64) -> Result<Vec<f64>> {
        let n = batch.size;
        let next = self.policy.sample(&batch.next_states, n, &mut self.update_rng)?;
        // target explorer is evaluated on s, not s′
        let next_actions = apply(next.actions, self.factors(&batch.states, n, lambda, true)?);
        let q1 = CriticEval::new(&self.target_critics[0], &batch.next_states, &next_actions, n)?;
        let q2 = CriticEval::new(&self.target_critics[1], &batch.next_states, &next_actions, n)?;
        let alpha = self.alpha();
        let r_bar = self.rewards.mean();
        Ok((0..n)
            .map(|i| {
                let soft = q1.values()[i].min(q2.values()[i]) - alpha * next.log_probs[i];
                (batch.rewards[i] - r_bar) + self.cfg.gamma * soft
            })
            .collect())
    }

    fn critic_update(&mut self, batch: &Batch, lambda: f64) -> Result<([f64; 2], Vec<f64>)> {
        let n = batch.size;
        let targets = self.critic_targets(batch, lambda)?;
        let mut losses = [0.0; 2];
        for i in 0..2 {
            let eval = CriticEval::new(&self.critics[i], &batch.states, &batch.executed, n)?;
            let q = eval.values();
            losses[i] = q.iter().zip(&targets).map(|(q, y)| (y - q) * (y - q)).sum::<f64>() / n as f64;
            let upstream: Vec<f64> = q.iter().zip(&targets).map(|(q, y)| 2.0 * (q - y) / n as f64).collect();
            let grads = eval.param_gradient(&upstream)?;
            self.critic_opts[i].step(self.critics[i].params_mut(), &grads, Direction::Descend)?;
        }
        Ok((losses, targets))
    }

    /// Loss `mean(α log π(â|s) − min_j Q_j(s, â ⊙ f))` and its gradient
    /// w.r.t. the policy parameters, without stepping.
    pub fn actor_loss_and_gradient(
        &self,
        sample: &PolicySample,
        states: &[f64],
        factors: Option<&[f64]>,
    ) -> Result<(f64, Vec<f64>)> {
        let n = sample.batch;
        let ad = self.policy.action_dim();
        let perturbed = match factors {
            Some(f) => sample.actions.iter().zip(f).map(|(a, f)| a * f).collect(),
            None => sample.actions.clone(),
        };
        let evals = [
            CriticEval::new(&self.critics[0], states, &perturbed, n)?,
            CriticEval::new(&self.critics[1], states, &perturbed, n)?,
        ];
        let alpha = self.alpha();
        let mut loss = 0.0;
        let mut upstream = [vec![0.0; n], vec![0.0; n]];
        for i in 0..n {
            let (q1, q2) = (evals[0].values()[i], evals[1].values()[i]);
            let j = usize::from(q2 < q1);
            loss += alpha * sample.log_probs[i] - q1.min(q2);
            upstream[j][i] = -1.0 / n as f64;
        }
        loss /= n as f64;
        let mut d_actions = vec![0.0; n * ad];
        for (eval, up) in evals.iter().zip(&upstream) {
            if up.iter().all(|&u| u == 0.0) {
                continue;
            }
            for (d, g) in d_actions.iter_mut().zip(eval.action_gradient(up)?) {
                *d += g;
            }
        }
        if let Some(f) = factors {
            for (d, f) in d_actions.iter_mut().zip(f) {
                *d *= f;
            }
        }
        let d_log_probs = vec![alpha / n as f64; n];
        let grads = self.policy.backward(sample, &d_actions, &d_log_probs)?;
        Ok((loss, grads.params))
    }

    fn actor_update(&mut self, batch: &Batch, lambda: f64) -> Result<(f64, Vec<f64>)> {
        let n = batch.size;
        let sample = self.policy.sample(&batch.states, n, &mut self.update_rng)?;
        let factors = self.factors(&batch.states, n, lambda, false)?;
        let (loss, grads) = self.actor_loss_and_gradient(&sample, &batch.states, factors.as_deref())?;
        self.policy_opt
            .step(self.policy.net.params_mut(), &grads, Direction::Descend)?;
        Ok((loss, sample.log_probs))
    }

    fn explorer_update(&mut self, batch: &Batch, targets: &[f64], lambda: f64) -> Result<Option<f64>> {
        let Some(ex) = &mut self.explorer else {
            return Ok(None);
        };
        let n = batch.size;
        let fresh = self.policy.sample(&batch.states, n, &mut self.explorer_rng)?;
        let objective = ex.update(
            &batch.states,
            &fresh.actions,
            targets,
            lambda,
            self.mode,
            [&self.critics[0], &self.critics[1]],
        )?;
        Ok(Some(objective))
    }
}

fn apply(actions: Vec<f64>, factors: Option<Vec<f64>>) -> Vec<f64> {
    match factors {
        Some(f) => actions.iter().zip(&f).map(|(a, f)| a * f).collect(),
        None => actions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_sys() -> SystemConfig {
        SystemConfig {
            users: 1,
            antennas: 2,
            elements: 2,
            ..SystemConfig::default()
        }
    }

    fn tiny_cfg() -> AgentConfig {
        AgentConfig {
            hidden: 8,
            batch_size: 4,
            buffer_capacity: 64,
            ..AgentConfig::default()
        }
    }

    fn filled(agent: &mut SacAgent, sys: &SystemConfig, n: usize, seed: u64) {
        let mut rng = SeededRng::new(seed);
        for _ in 0..n {
            let state: Vec<f64> = (0..sys.state_dim()).map(|_| rng.standard_normal()).collect();
            let action: Vec<f64> = (0..sys.action_dim()).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
            let next_state: Vec<f64> = (0..sys.state_dim()).map(|_| rng.standard_normal()).collect();
            agent
                .observe(&Transition {
                    state,
                    executed: action.clone(),
                    action,
                    reward: rng.uniform_range(0.0, 3.0),
                    next_state,
                })
                .unwrap();
        }
    }

    #[test]
    fn update_waits_for_one_batch() {
        let sys = tiny_sys();
        let mut agent = SacAgent::new(&sys, tiny_cfg(), 1).unwrap();
        filled(&mut agent, &sys, 3, 2);
        assert_eq!(agent.update(0.0).unwrap(), None);
        filled(&mut agent, &sys, 1, 3);
        assert!(agent.update(0.0).unwrap().is_some());
    }

    #[test]
    fn identical_critics_have_identical_losses() {
        let sys = tiny_sys();
        let mut agent = SacAgent::new(&sys, tiny_cfg(), 4).unwrap();
        agent.critics[1] = agent.critics[0].clone();
        agent.target_critics = [agent.critics[0].clone(), agent.critics[0].clone()];
        filled(&mut agent, &sys, 8, 5);
        let stats = agent.update(0.0).unwrap().unwrap();
        assert_eq!(stats.critic_losses[0], stats.critic_losses[1]);
        assert_eq!(agent.critics[0].params(), agent.critics[1].params());
    }

    #[test]
    fn zero_target_critics_give_reward_minus_entropy_term() {
        let sys = tiny_sys();
        let mut agent = SacAgent::new(&sys, tiny_cfg(), 6).unwrap();
        let zero = Mlp::zeros(agent.critics[0].sizes(), OutputActivation::Linear).unwrap();
        agent.target_critics = [zero.clone(), zero];
        filled(&mut agent, &sys, 8, 7);
        let batch = agent.buffer.sample(4, &mut SeededRng::new(8)).unwrap();
        let mut probe = agent.clone();
        let next = probe
            .policy
            .sample(&batch.next_states, 4, &mut probe.update_rng)
            .unwrap();
        let targets = agent.critic_targets(&batch, 0.0).unwrap();
        let r_bar = agent.rewards.mean();
        for i in 0..4 {
            let expected = batch.rewards[i] - r_bar - agent.alpha() * next.log_probs[i];
            assert_eq!(targets[i], expected);
        }
    }

    #[test]
    fn single_transition_td_loss_by_hand() {
        let sys = tiny_sys();
        let cfg = AgentConfig {
            batch_size: 1,
            buffer_capacity: 4,
            ..tiny_cfg()
        };
        let mut agent = SacAgent::new(&sys, cfg, 9).unwrap();
        filled(&mut agent, &sys, 1, 10);
        let t = agent.buffer.get(0).unwrap();
        let mut probe = agent.clone();
        let batch = probe.buffer.sample(1, &mut probe.update_rng).unwrap();
        let y = probe.critic_targets(&batch, 0.0).unwrap()[0];
        let mut x = t.state.clone();
        x.extend_from_slice(&t.executed);
        let q = agent.critics[0].forward(&x).unwrap()[0];
        let stats = agent.update(0.0).unwrap().unwrap();
        assert!((stats.critic_losses[0] - (y - q) * (y - q)).abs() < 1e-12);
    }

    #[test]
    fn zero_critics_actor_loss_is_entropy_term() {
        let sys = tiny_sys();
        let mut agent = SacAgent::new(&sys, tiny_cfg(), 11).unwrap();
        let zero = Mlp::zeros(agent.critics[0].sizes(), OutputActivation::Linear).unwrap();
        agent.critics = [zero.clone(), zero];
        let mut rng = SeededRng::new(12);
        let states: Vec<f64> = (0..4 * sys.state_dim()).map(|_| rng.standard_normal()).collect();
        let sample = agent.policy.sample(&states, 4, &mut rng).unwrap();
        let (loss, _) = agent.actor_loss_and_gradient(&sample, &states, None).unwrap();
        let expected = agent.alpha() * sample.log_probs.iter().sum::<f64>() / 4.0;
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn explorer_disabled_act_is_unperturbed() {
        let sys = tiny_sys();
        let mut agent = SacAgent::new(&sys, tiny_cfg(), 13).unwrap();
        let act = agent.act(&vec![0.1; sys.state_dim()], 0.3).unwrap();
        assert_eq!(act.action, act.executed);
        assert!(act.multipliers.is_none());
    }

    #[test]
    fn explorer_act_scales_only_phase_part() {
        let sys = SystemConfig {
            scenario: crate::environment::Scenario::Mismatch,
            ..tiny_sys()
        };
        let cfg = AgentConfig {
            explorer: Some(ExplorerConfig {
                lambda0: 0.3,
                mode: PerturbationMode::Blended,
                beta_lo: sys.beta_min,
            }),
            ..tiny_cfg()
        };
        let mut agent = SacAgent::new(&sys, cfg, 14).unwrap();
        let act = agent.act(&vec![0.1; sys.state_dim()], 1.0).unwrap();
        let bd = sys.beamformer_dim();
        assert_eq!(act.action[..bd], act.executed[..bd]);
        let m = act.multipliers.unwrap();
        assert_eq!(m.len(), sys.elements);
        for (l, &f) in m.iter().enumerate() {
            assert!((sys.beta_min..=1.0).contains(&f));
            assert_eq!(act.executed[bd + 2 * l], act.action[bd + 2 * l] * f);
        }
    }
}
