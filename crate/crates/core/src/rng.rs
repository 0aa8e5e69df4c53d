//! Counter-based random streams.
//!
//! Every stream is keyed by `(master_seed, stream_index)` and positioned by a
//! monotone draw counter. The backing generator is ChaCha8, whose keystream is
//! a pure function of key, nonce and block counter, so any draw can be
//! reproduced from the triple alone and distinct indices never share state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Bits reserved for the per-family path index inside a stream index.
pub const FAMILY_SHIFT: u32 = 40;

/// Builds the stream index for path `index` of stream family `family`.
///
/// Families let one master seed drive many independent batches.
pub fn family_index(family: u32, index: u64) -> u64 {
    debug_assert!(index < (1u64 << FAMILY_SHIFT));
    ((family as u64) << FAMILY_SHIFT) | index
}

#[derive(Clone, Debug)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

/// Opens stream `stream_index` of the generator keyed by `master_seed`.
pub fn make_stream(master_seed: u64, stream_index: u64) -> RandomStream {
    RandomStream::new(master_seed, stream_index)
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    /// Reopens a stream positioned at `counter` (in 32-bit words).
    pub fn at(master_seed: u64, stream_index: u64, counter: u128) -> Self {
        let mut s = Self::new(master_seed, stream_index);
        s.rng.set_word_pos(counter);
        s
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Current draw counter, in 32-bit keystream words.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on the open interval `(0, 1)`; safe to take logs of.
    #[inline]
    pub fn open_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    #[inline]
    pub fn exponential(&mut self) -> f64 {
        Exp1.sample(&mut self.rng)
    }

    /// Fair ±1.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.rng.next_u32() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Norm of three independent standard Gaussians (Maxwell law).
    pub fn maxwell(&mut self) -> f64 {
        let (a, b, c) = (self.gaussian(), self.gaussian(), self.gaussian());
        (a * a + b * b + c * c).sqrt()
    }
}
