//! Counter-based random streams.
//!
//! Every random draw is addressed by `(seed, domain, counter, slot)`: the seed
//! and domain form the ChaCha key, the counter selects the stream and the slot
//! selects a fixed-size window of words inside it. A draw therefore never
//! depends on how many other draws happened before it or on which thread
//! made them.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words reserved per slot; a slot may draw up to 8 `f64`s.
const WORDS_PER_SLOT: u128 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Domain {
    AoJitter = 0x414f_4a49_5454_4552,
    SurfaceSample = 0x5355_5246_5341_4d50,
}

pub(crate) struct KeyedRng(ChaCha8Rng);

impl KeyedRng {
    pub(crate) fn new(seed: u64, domain: Domain, counter: u64, slot: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(counter);
        rng.set_word_pos(u128::from(slot) * WORDS_PER_SLOT);
        KeyedRng(rng)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub(crate) fn unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addressable_and_reproducible() {
        let a = KeyedRng::new(1, Domain::AoJitter, 5, 2).unit();
        let b = KeyedRng::new(1, Domain::AoJitter, 5, 2).unit();
        assert_eq!(a, b);
        assert_ne!(a, KeyedRng::new(1, Domain::AoJitter, 5, 3).unit());
        assert_ne!(a, KeyedRng::new(1, Domain::AoJitter, 6, 2).unit());
        assert_ne!(a, KeyedRng::new(2, Domain::AoJitter, 5, 2).unit());
        assert_ne!(a, KeyedRng::new(1, Domain::SurfaceSample, 5, 2).unit());
    }

    #[test]
    fn unit_range() {
        let mut rng = KeyedRng::new(9, Domain::SurfaceSample, 0, 0);
        for _ in 0..1000 {
            let u = rng.unit();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
