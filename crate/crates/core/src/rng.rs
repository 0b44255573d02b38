//! Deterministic stream derivation from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Logical random streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Positions,
    Fading,
    Interference,
    Combiner,
}

impl Stream {
    fn label(self) -> u64 {
        match self {
            Stream::Positions => 0x706f_7369_7469_6f6e,
            Stream::Fading => 0x6661_6469_6e67_0000,
            Stream::Interference => 0x7070_705f_6669_656c,
            Stream::Combiner => 0x636f_6d62_696e_6572,
        }
    }
}

/// splitmix64 finalizer, used to decorrelate the seed from the label.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child RNG for `stream` within trial `trial`.
pub fn trial_stream(master_seed: u64, stream: Stream, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(master_seed ^ mix(stream.label())));
    rng.set_stream(trial);
    rng
}

/// The four child streams of one trial.
pub struct TrialRngs {
    pub positions: ChaCha8Rng,
    pub fading: ChaCha8Rng,
    pub interference: ChaCha8Rng,
    pub combiner: ChaCha8Rng,
}

impl TrialRngs {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        Self {
            positions: trial_stream(master_seed, Stream::Positions, trial),
            fading: trial_stream(master_seed, Stream::Fading, trial),
            interference: trial_stream(master_seed, Stream::Interference, trial),
            combiner: trial_stream(master_seed, Stream::Combiner, trial),
        }
    }
}
