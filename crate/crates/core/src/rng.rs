//! Seeded random streams.
//!
//! Every consumer of randomness draws from its own ChaCha stream so that, for
//! example, adding agents to an instance never perturbs the map raster or the
//! goal refresh sequence of another run with the same seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes that get their own stream for a given seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    MapRaster = 1,
    MapLayout = 2,
    InstancePlacement = 3,
    GoalRefresh = 4,
    Policy = 5,
}

/// A generator for `(seed, purpose)`.
pub fn stream(seed: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}
