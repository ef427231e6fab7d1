//! Lossless n-of-n splitting of color raster images into noise-like shadow
//! images.
//!
//! Every channel sample `p` of the source is split with two random words
//! `r1`, `r2` into
//!
//! ```text
//! s1 = (p AND r1) OR (NOT p AND r2)
//! s2 = p XOR s1
//! ```
//!
//! so that `s1 XOR s2 = p` restores the source bit-exactly. More than two
//! shares are produced by re-splitting the second share. The [`analysis`]
//! module measures how much a single share reveals, both statistically and
//! against an attacker who can replay the random draws.
//!
//! The arithmetic is generic over the channel scalar ([`Sample`], implemented
//! for `u8` and `u16`); the aliases below name the concrete instantiations.

pub mod analysis;
pub mod bitwise;
mod error;
pub mod io;
pub mod manifest;
pub mod raster;
pub mod rng;
pub mod scheme;
mod word;

pub use error::{Error, Result};
pub use manifest::ShareManifest;
pub use raster::{Geometry, Raster, RasterImage};
pub use rng::{DrawAddress, RandomnessContext, RngMode, Seed};
pub use scheme::{combine, combine_bytes, split2, split_bytes, split_n, ShareSet, SplitRequest};
pub use word::{BitDepth, ChannelWord, RandomPair, Sample};

/// 8-bit-per-channel raster.
pub type Raster8 = Raster<u8>;
/// 16-bit-per-channel raster.
pub type Raster16 = Raster<u16>;
