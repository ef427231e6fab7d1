use std::fmt;

use num_traits::{PrimInt, Unsigned};
use serde::{Deserialize, Serialize};
use zeroize::Zeroize;

use crate::error::{Error, Result};

/// Bits per channel sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::UnsupportedDepth(other)),
        }
    }

    pub const fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    /// All-ones word of this depth.
    pub const fn mask(self) -> u32 {
        (1u32 << self.bits()) - 1
    }
}

impl fmt::Display for BitDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-bit", self.bits())
    }
}

impl TryFrom<u32> for BitDepth {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        BitDepth::from_bits(bits)
    }
}

impl From<BitDepth> for u32 {
    fn from(depth: BitDepth) -> u32 {
        depth.bits()
    }
}

/// Unsigned channel scalar the splitting arithmetic is generic over.
///
/// Bitwise NOT on the implementing type is already confined to the sample
/// width, so no extra masking is needed in generic code.
pub trait Sample:
    PrimInt + Unsigned + Default + Zeroize + fmt::Debug + Send + Sync + 'static
{
    const DEPTH: BitDepth;

    /// Keeps the low `DEPTH` bits of a 32-bit random word.
    fn from_low_bits(word: u32) -> Self;

    fn widen(self) -> u32;
}

impl Sample for u8 {
    const DEPTH: BitDepth = BitDepth::Eight;

    #[inline]
    fn from_low_bits(word: u32) -> Self {
        word as u8
    }

    #[inline]
    fn widen(self) -> u32 {
        self as u32
    }
}

impl Sample for u16 {
    const DEPTH: BitDepth = BitDepth::Sixteen;

    #[inline]
    fn from_low_bits(word: u32) -> Self {
        word as u16
    }

    #[inline]
    fn widen(self) -> u32 {
        self as u32
    }
}

/// One channel sample of one pixel, tagged with its depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelWord {
    value: u32,
    depth: BitDepth,
}

impl ChannelWord {
    pub fn new(value: u32, depth: BitDepth) -> Result<Self> {
        if value > depth.mask() {
            return Err(Error::ValueOutOfRange { value, depth });
        }
        Ok(ChannelWord { value, depth })
    }

    pub fn u8(value: u8) -> Self {
        Self::of(value)
    }

    pub fn u16(value: u16) -> Self {
        Self::of(value)
    }

    pub fn of<T: Sample>(value: T) -> Self {
        ChannelWord {
            value: value.widen(),
            depth: T::DEPTH,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn depth(self) -> BitDepth {
        self.depth
    }

    pub(crate) fn same_depth(self, other: ChannelWord) -> Result<BitDepth> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: other.depth,
            });
        }
        Ok(self.depth)
    }
}

/// The two random words drawn for one channel sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomPair {
    r1: ChannelWord,
    r2: ChannelWord,
}

impl RandomPair {
    pub fn new(r1: ChannelWord, r2: ChannelWord) -> Result<Self> {
        r1.same_depth(r2)?;
        Ok(RandomPair { r1, r2 })
    }

    pub fn of<T: Sample>(r1: T, r2: T) -> Self {
        RandomPair {
            r1: ChannelWord::of(r1),
            r2: ChannelWord::of(r2),
        }
    }

    pub fn r1(&self) -> ChannelWord {
        self.r1
    }

    pub fn r2(&self) -> ChannelWord {
        self.r2
    }

    pub fn depth(&self) -> BitDepth {
        self.r1.depth
    }
}
