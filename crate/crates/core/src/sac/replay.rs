use alloc::vec::Vec;

use crate::error::{check_len, Result};
use crate::numerics::SeededRng;

/// One replay record: `(s, a, a_β̂, r, s′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    /// Policy action before any perturbation.
    pub action: Vec<f64>,
    /// Action actually executed; equals `action` without an explorer.
    pub executed: Vec<f64>,
    /// Raw instantaneous reward.
    pub reward: f64,
    pub next_state: Vec<f64>,
}

/// Mini-batch in row-major, structure-of-arrays form.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub size: usize,
    pub states: Vec<f64>,
    pub actions: Vec<f64>,
    pub executed: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<f64>,
}

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    state_dim: usize,
    action_dim: usize,
    states: Vec<f64>,
    actions: Vec<f64>,
    executed: Vec<f64>,
    rewards: Vec<f64>,
    next_states: Vec<f64>,
    len: usize,
    // slot the next push writes to
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, state_dim: usize, action_dim: usize) -> Self {
        Self {
            capacity,
            state_dim,
            action_dim,
            states: Vec::new(),
            actions: Vec::new(),
            executed: Vec::new(),
            rewards: Vec::new(),
            next_states: Vec::new(),
            len: 0,
            head: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: &Transition) -> Result<()> {
        check_len("replay state", self.state_dim, t.state.len())?;
        check_len("replay next state", self.state_dim, t.next_state.len())?;
        check_len("replay action", self.action_dim, t.action.len())?;
        check_len("replay executed action", self.action_dim, t.executed.len())?;
        if self.capacity == 0 {
            return Ok(());
        }
        if self.len < self.capacity {
            self.states.extend_from_slice(&t.state);
            self.actions.extend_from_slice(&t.action);
            self.executed.extend_from_slice(&t.executed);
            self.rewards.push(t.reward);
            self.next_states.extend_from_slice(&t.next_state);
            self.len += 1;
        } else {
            let (sd, ad, i) = (self.state_dim, self.action_dim, self.head);
            self.states[i * sd..(i + 1) * sd].copy_from_slice(&t.state);
            self.actions[i * ad..(i + 1) * ad].copy_from_slice(&t.action);
            self.executed[i * ad..(i + 1) * ad].copy_from_slice(&t.executed);
            self.rewards[i] = t.reward;
            self.next_states[i * sd..(i + 1) * sd].copy_from_slice(&t.next_state);
        }
        self.head = (self.head + 1) % self.capacity;
        Ok(())
    }

    /// Transition stored in slot `i` (insertion order until the ring wraps).
    pub fn get(&self, i: usize) -> Option<Transition> {
        if i >= self.len {
            return None;
        }
        let (sd, ad) = (self.state_dim, self.action_dim);
        Some(Transition {
            state: self.states[i * sd..(i + 1) * sd].to_vec(),
            action: self.actions[i * ad..(i + 1) * ad].to_vec(),
            executed: self.executed[i * ad..(i + 1) * ad].to_vec(),
            reward: self.rewards[i],
            next_state: self.next_states[i * sd..(i + 1) * sd].to_vec(),
        })
    }

    /// `n` uniform draws with replacement; `None` while fewer than `n` are stored.
    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> Option<Batch> {
        if self.len < n || n == 0 {
            return None;
        }
        let (sd, ad) = (self.state_dim, self.action_dim);
        let mut b = Batch {
            size: n,
            states: Vec::with_capacity(n * sd),
            actions: Vec::with_capacity(n * ad),
            executed: Vec::with_capacity(n * ad),
            rewards: Vec::with_capacity(n),
            next_states: Vec::with_capacity(n * sd),
        };
        for _ in 0..n {
            let i = rng.index(self.len);
            b.states.extend_from_slice(&self.states[i * sd..(i + 1) * sd]);
            b.actions.extend_from_slice(&self.actions[i * ad..(i + 1) * ad]);
            b.executed.extend_from_slice(&self.executed[i * ad..(i + 1) * ad]);
            b.rewards.push(self.rewards[i]);
            b.next_states.extend_from_slice(&self.next_states[i * sd..(i + 1) * sd]);
        }
        Some(b)
    }
}
