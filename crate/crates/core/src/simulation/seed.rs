use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Master seed of a Monte-Carlo run.
///
/// Replication `i` draws from ChaCha8 keyed by `master_seed`, on stream `i`.
/// Streams are disjoint, so results do not depend on how replications are
/// scheduled across workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(replication);
        rng
    }

    /// Independent seed for a labelled sub-experiment (SplitMix64 finalizer over
    /// the master seed and the label).
    pub fn derive(&self, label: &str) -> SeedSpec {
        let mut h = self.master_seed;
        for byte in label.bytes() {
            h = splitmix64(h ^ u64::from(byte));
        }
        SeedSpec::new(splitmix64(h))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
