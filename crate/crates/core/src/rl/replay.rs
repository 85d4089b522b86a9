//! FIFO replay buffer with uniform without-replacement batch sampling.

use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_obs: Vec<f64>,
    pub done: bool,
}

#[derive(Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    ring: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        Self { capacity, ring: Vec::with_capacity(capacity.min(1 << 20)), cursor: 0 }
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.ring.len() < self.capacity {
            self.ring.push(t);
        } else {
            self.ring[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// Uniform sample of `batch_size` distinct stored transitions.
    pub fn sample<'a>(&'a self, rng: &mut ChaCha12Rng, batch_size: usize) -> Vec<&'a Transition> {
        assert!(batch_size <= self.ring.len(), "not enough transitions buffered");
        rand::seq::index::sample(rng, self.ring.len(), batch_size)
            .into_iter()
            .map(|i| &self.ring[i])
            .collect()
    }
}
