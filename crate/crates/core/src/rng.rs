//! Source of the `(r1, r2)` words drawn for every channel sample.
//!
//! Deterministic mode is counter-addressed: each word is the ChaCha20
//! keystream word selected by `(level, y, x, channel, slot)` under the seed,
//! so draws are a pure function of their address and can be taken in any
//! order or in parallel. OS-entropy mode reads the system CSPRNG.

use std::fmt;

use rand::rngs::OsRng;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use zeroize::{Zeroize, Zeroizing};

use crate::error::{Error, Result};
use crate::word::{BitDepth, ChannelWord, RandomPair, Sample};

pub const SEED_LEN: usize = 32;

/// Channel stride in the keystream layout; one more than the largest
/// supported channel index.
const CHANNEL_STRIDE: u128 = 4;
/// Words per channel sample: slot 0 is `r1`, slot 1 is `r2`.
const SLOTS: u128 = 2;

/// 32-byte key for deterministic mode. Zeroed on drop.
#[derive(Clone)]
pub struct Seed(Zeroizing<[u8; SEED_LEN]>);

impl Seed {
    pub fn from_bytes(bytes: [u8; SEED_LEN]) -> Self {
        Seed(Zeroizing::new(bytes))
    }

    /// Parses exactly 64 hex characters.
    pub fn from_hex(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.len() != 2 * SEED_LEN {
            return Err(Error::InvalidSeed(format!(
                "expected {} hex characters, got {}",
                2 * SEED_LEN,
                text.len()
            )));
        }
        let mut bytes = Zeroizing::new([0u8; SEED_LEN]);
        hex::decode_to_slice(text, &mut bytes[..])
            .map_err(|e| Error::InvalidSeed(e.to_string()))?;
        Ok(Seed(bytes))
    }

    pub fn random() -> Self {
        let mut bytes = Zeroizing::new([0u8; SEED_LEN]);
        OsRng.fill_bytes(&mut bytes[..]);
        Seed(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0[..])
    }

    pub fn as_bytes(&self) -> &[u8; SEED_LEN] {
        &self.0
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Seed(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngMode {
    OsEntropy,
    Deterministic,
}

/// Position of one channel sample in the draw space. `level` separates the
/// successive re-splits of a multi-share split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DrawAddress {
    pub level: u32,
    pub x: u64,
    pub y: u32,
    pub channel: u8,
}

/// Bounds a draw address must fall within.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddressSpace {
    pub width: u64,
    pub height: u32,
    pub channels: u8,
}

impl AddressSpace {
    fn check(&self, addr: &DrawAddress) -> Result<()> {
        let oob = |what, value: u64, bound: u64| Error::AddressOutOfBounds { what, value, bound };
        if addr.x >= self.width {
            return Err(oob("x", addr.x, self.width));
        }
        if addr.y >= self.height {
            return Err(oob("y", addr.y as u64, self.height as u64));
        }
        if addr.channel >= self.channels || addr.channel as u128 >= CHANNEL_STRIDE {
            return Err(oob("channel", addr.channel as u64, self.channels as u64));
        }
        Ok(())
    }
}

enum Source {
    Os,
    Keyed(Seed),
    Wiped,
}

/// Supplies random pairs; see the module docs for the two modes.
///
/// Draws take `&self` and may run concurrently; [`wipe`](Self::wipe) needs
/// `&mut self`, so it cannot overlap a draw.
pub struct RandomnessContext {
    source: Source,
    mode: RngMode,
}

impl RandomnessContext {
    pub fn os_entropy() -> Self {
        RandomnessContext {
            source: Source::Os,
            mode: RngMode::OsEntropy,
        }
    }

    pub fn deterministic(seed: Seed) -> Self {
        RandomnessContext {
            source: Source::Keyed(seed),
            mode: RngMode::Deterministic,
        }
    }

    pub fn mode(&self) -> RngMode {
        self.mode
    }

    pub fn is_wiped(&self) -> bool {
        matches!(self.source, Source::Wiped)
    }

    /// Drops the seed (zeroing it) and refuses all later draws. Idempotent.
    pub fn wipe(&mut self) {
        if let Source::Keyed(seed) = &mut self.source {
            seed.0.zeroize();
        }
        self.source = Source::Wiped;
    }

    pub fn draw_pair(
        &self,
        addr: DrawAddress,
        space: AddressSpace,
        depth: BitDepth,
    ) -> Result<RandomPair> {
        space.check(&addr)?;
        let (w1, w2) = match &self.source {
            Source::Wiped => return Err(Error::ContextWiped),
            Source::Os => (OsRng.next_u32(), OsRng.next_u32()),
            Source::Keyed(seed) => {
                let mut rng = keystream(seed, addr.level, addr.y);
                rng.set_word_pos(word_pos(addr.x, addr.channel, 0));
                (rng.next_u32(), rng.next_u32())
            }
        };
        let mask = depth.mask();
        RandomPair::new(
            ChannelWord::new(w1 & mask, depth)?,
            ChannelWord::new(w2 & mask, depth)?,
        )
    }

    /// Fills `r1` and `r2` for the `r1.len() / channels` consecutive pixels
    /// starting at `(x0, y)`, interleaved by channel like raster samples.
    ///
    /// Equivalent to calling [`draw_pair`](Self::draw_pair) per sample.
    pub fn fill_span<T: Sample>(
        &self,
        level: u32,
        y: u32,
        x0: u64,
        space: AddressSpace,
        r1: &mut [T],
        r2: &mut [T],
    ) -> Result<()> {
        let channels = space.channels as usize;
        assert_eq!(r1.len(), r2.len());
        assert!(channels > 0 && r1.len().is_multiple_of(channels));
        let pixels = (r1.len() / channels) as u64;
        if pixels == 0 {
            return Ok(());
        }
        let last = DrawAddress {
            level,
            x: x0 + pixels - 1,
            y,
            channel: space.channels - 1,
        };
        space.check(&DrawAddress {
            x: x0,
            channel: 0,
            ..last
        })?;
        space.check(&last)?;

        match &self.source {
            Source::Wiped => Err(Error::ContextWiped),
            Source::Os => {
                // only as many bytes as the sample width needs
                let width = (T::DEPTH.bits() / 8) as usize;
                let mut bytes = Zeroizing::new(vec![0u8; 2 * width * r1.len()]);
                OsRng.fill_bytes(&mut bytes);
                let le = |b: &[u8]| b.iter().rev().fold(0u32, |acc, &v| acc << 8 | v as u32);
                for (i, pair) in bytes.chunks_exact(2 * width).enumerate() {
                    r1[i] = T::from_low_bits(le(&pair[..width]));
                    r2[i] = T::from_low_bits(le(&pair[width..]));
                }
                Ok(())
            }
            Source::Keyed(seed) => {
                let mut rng = keystream(seed, level, y);
                rng.set_word_pos(word_pos(x0, 0, 0));
                let per_pixel = (CHANNEL_STRIDE * SLOTS) as usize;
                let mut words = Zeroizing::new(vec![0u32; per_pixel]);
                for (a, b) in r1
                    .chunks_exact_mut(channels)
                    .zip(r2.chunks_exact_mut(channels))
                {
                    for w in words.iter_mut() {
                        *w = rng.next_u32();
                    }
                    for c in 0..channels {
                        a[c] = T::from_low_bits(words[2 * c]);
                        b[c] = T::from_low_bits(words[2 * c + 1]);
                    }
                }
                Ok(())
            }
        }
    }
}

impl Drop for RandomnessContext {
    fn drop(&mut self) {
        self.wipe();
    }
}

impl fmt::Debug for RandomnessContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RandomnessContext")
            .field("mode", &self.mode)
            .field("wiped", &self.is_wiped())
            .finish()
    }
}

fn keystream(seed: &Seed, level: u32, y: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::from_seed(*seed.as_bytes());
    rng.set_stream(((level as u64) << 32) | y as u64);
    rng
}

fn word_pos(x: u64, channel: u8, slot: u8) -> u128 {
    (x as u128 * CHANNEL_STRIDE + channel as u128) * SLOTS + slot as u128
}
