//! Deterministic instance sets for verification campaigns.
//!
//! Every sample is derived from `(seed, index)` alone, so campaigns can be split
//! across workers in any way and still reproduce the same instances.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::model::{random_instance, ModelError, NetworkInstance, QuantizerB};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub index: usize,
    pub seed: u64,
    pub users: usize,
    pub bss: usize,
    pub tx: usize,
    pub rx: usize,
    pub snr_db: f64,
}

impl InstanceSpec {
    pub fn instance(&self) -> NetworkInstance {
        random_instance(self.seed, self.users, self.bss, self.tx, self.rx, self.snr_db)
    }

    /// `½Σ⁻¹` and a random interior quantizer with whitened eigenvalues in `[0.02, 0.98]`.
    pub fn quantizers(&self, instance: &NetworkInstance) -> Result<[QuantizerB; 2], ModelError> {
        Ok([QuantizerB::half_inverse_noise(instance)?, QuantizerB::random(instance, self.seed ^ 0x9e37_79b9_7f4a_7c15, 0.02, 0.98)?])
    }
}

/// Dimension ranges for a campaign; each sample draws uniformly from them.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignDims {
    pub users: Vec<usize>,
    pub bss: Vec<usize>,
    pub tx: Vec<usize>,
    pub rx: Vec<usize>,
    pub snr_db: Vec<f64>,
}

impl Default for CampaignDims {
    fn default() -> Self {
        Self {
            users: alloc::vec![1, 2, 3],
            bss: alloc::vec![1, 2, 3],
            tx: alloc::vec![1, 2],
            rx: alloc::vec![1, 2],
            snr_db: alloc::vec![0.0, 10.0, 20.0],
        }
    }
}

impl CampaignDims {
    pub fn sample(&self, seed: u64, index: usize) -> InstanceSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut pick = |n: usize| (rng.next_u64() % n as u64) as usize;
        let users = self.users[pick(self.users.len())];
        let bss = self.bss[pick(self.bss.len())];
        let tx = self.tx[pick(self.tx.len())];
        let rx = self.rx[pick(self.rx.len())];
        let snr_db = self.snr_db[pick(self.snr_db.len())];
        let seed = rng.next_u64();
        InstanceSpec { index, seed, users, bss, tx, rx, snr_db }
    }

    pub fn specs(&self, seed: u64, count: usize) -> Vec<InstanceSpec> {
        (0..count).map(|i| self.sample(seed, i)).collect()
    }
}
