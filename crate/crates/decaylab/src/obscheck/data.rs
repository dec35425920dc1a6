//! Initial-data suites for the observability and inequality checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::wavesim::InitialData;

/// A labeled collection of initial data in mode form. The checks in this
/// module run over a whole set and aggregate per-datum results by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    entries: Vec<(String, InitialData)>,
}

impl DataSet {
    pub fn new() -> Self {
        DataSet { entries: Vec::new() }
    }

    /// Pure single-mode data `1..=max_mode`, unit position coefficient.
    pub fn single_modes(max_mode: usize) -> Self {
        let mut set = DataSet::new();
        for n in 1..=max_mode {
            set.push(format!("mode {n}"), InitialData::single_mode(n, 1.0, 0.0));
        }
        set
    }

    /// The fixed suite: every single mode up to `max_mode`, octave-spaced
    /// two-mode mixtures, and a few position/velocity mixtures, so the
    /// inequalities are exercised across frequency scales.
    pub fn deterministic(max_mode: usize) -> Self {
        let mut set = DataSet::single_modes(max_mode);
        let mut n = 1;
        while 2 * n <= max_mode {
            let mut w = vec![0.0; 2 * n];
            w[n - 1] = 1.0;
            w[2 * n - 1] = -0.5;
            set.push(format!("modes {n}+{}", 2 * n), InitialData::Modes { w, v: Vec::new() });
            n *= 2;
        }
        for n in [1usize, 3, 7, 15, 31] {
            if n + 1 > max_mode {
                break;
            }
            let mut w = vec![0.0; n];
            w[n - 1] = 0.8;
            let mut v = vec![0.0; n + 1];
            v[n] = 0.6;
            set.push(format!("mode {n} against velocity {}", n + 1), InitialData::Modes { w, v });
        }
        set
    }

    /// Seeded random suite: each datum excites up to three distinct modes
    /// with coefficients in `(-1, 1)` on both components, rejecting
    /// near-zero draws.
    pub fn random(seed: u64, count: usize, max_mode: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = DataSet::new();
        for i in 0..count {
            loop {
                let k = rng.gen_range(1..=3usize.min(max_mode));
                let picks = rand::seq::index::sample(&mut rng, max_mode, k);
                let top = picks.iter().max().unwrap() + 1;
                let mut w = vec![0.0f64; top];
                let mut v = vec![0.0f64; top];
                for p in picks.iter() {
                    w[p] = rng.gen_range(-1.0..1.0);
                    v[p] = rng.gen_range(-1.0..1.0);
                }
                let scale = w.iter().chain(v.iter()).fold(0.0f64, |m, &c| m.max(c.abs()));
                if scale >= 0.1 {
                    let mut modes: Vec<String> =
                        picks.iter().map(|p| (p + 1).to_string()).collect();
                    modes.sort();
                    set.push(
                        format!("random {i}: modes {}", modes.join(",")),
                        InitialData::Modes { w, v },
                    );
                    break;
                }
            }
        }
        set
    }

    pub fn push(&mut self, label: impl Into<String>, data: InitialData) {
        self.entries.push((label.into(), data));
    }

    pub fn entries(&self) -> &[(String, InitialData)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for DataSet {
    fn default() -> Self {
        DataSet::new()
    }
}
