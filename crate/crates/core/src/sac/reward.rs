/// Running average of all instantaneous rewards seen so far.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RewardTracker {
    sum: f64,
    count: u64,
}

impl RewardTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean of recorded rewards (0 when empty).
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn record(&mut self, r: f64) {
        self.sum += r;
        self.count += 1;
    }

    /// `r − r̄` against the rewards recorded strictly before `r`, then records `r`.
    pub fn adjust(&mut self, r: f64) -> f64 {
        let adjusted = r - self.mean();
        self.record(r);
        adjusted
    }
}
