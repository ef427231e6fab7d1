//! Whole-image splitting into `n >= 2` shares and XOR recombination.
//!
//! Two shares come from one pass of [`share_word`] over every sample. For
//! `n > 2` the second share is split again at the next level, `n - 1`
//! levels in total, each level drawing from its own address range. The
//! shares are emitted as `s1` of every level followed by the last `s2`.
//!
//! Nothing here can tell a complete share set from an incomplete or foreign
//! one: combining the wrong shares simply yields noise.

use rand::rngs::OsRng;
use rand::RngCore;
use rayon::prelude::*;
use zeroize::Zeroizing;

use crate::bitwise::share_word;
use crate::error::{Error, Result};
use crate::manifest::ShareManifest;
use crate::raster::{Raster, RasterImage};
use crate::rng::{AddressSpace, RandomnessContext};
use crate::word::Sample;

/// Pixels drawn per call into the randomness context.
const SPAN_PIXELS: usize = 1024;

pub struct SplitRequest<'a> {
    pub source: &'a RasterImage,
    pub total_shares: usize,
    pub rng: &'a RandomnessContext,
    /// Stamp every manifest with the same random `group_id`.
    pub link_shares: bool,
}

/// Shares of one split, in share-index order, with their manifests.
#[derive(Debug, Clone)]
pub struct ShareSet {
    shares: Vec<RasterImage>,
    manifests: Vec<ShareManifest>,
}

impl ShareSet {
    pub fn shares(&self) -> &[RasterImage] {
        &self.shares
    }

    pub fn manifests(&self) -> &[ShareManifest] {
        &self.manifests
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn into_parts(self) -> (Vec<RasterImage>, Vec<ShareManifest>) {
        (self.shares, self.manifests)
    }
}

/// One level of the split over a row-major sample buffer.
fn split_level<T: Sample>(
    samples: &[T],
    space: AddressSpace,
    level: u32,
    rng: &RandomnessContext,
) -> Result<(Vec<T>, Vec<T>)> {
    let channels = space.channels as usize;
    let row_len = space.width as usize * channels;
    let mut first = vec![T::zero(); samples.len()];
    let mut second = vec![T::zero(); samples.len()];
    if samples.is_empty() {
        return Ok((first, second));
    }
    first
        .par_chunks_mut(row_len)
        .zip(second.par_chunks_mut(row_len))
        .zip(samples.par_chunks(row_len))
        .enumerate()
        .try_for_each(|(y, ((s1_row, s2_row), src_row))| {
            let span = SPAN_PIXELS * channels;
            let mut r1 = Zeroizing::new(vec![T::zero(); span]);
            let mut r2 = Zeroizing::new(vec![T::zero(); span]);
            for (k, ((s1, s2), src)) in s1_row
                .chunks_mut(span)
                .zip(s2_row.chunks_mut(span))
                .zip(src_row.chunks(span))
                .enumerate()
            {
                let n = src.len();
                let x0 = (k * SPAN_PIXELS) as u64;
                rng.fill_span(level, y as u32, x0, space, &mut r1[..n], &mut r2[..n])?;
                for i in 0..n {
                    let (a, b) = share_word(src[i], r1[i], r2[i]);
                    s1[i] = a;
                    s2[i] = b;
                }
            }
            Ok::<_, Error>(())
        })?;
    Ok((first, second))
}

fn split_samples<T: Sample>(
    samples: &[T],
    space: AddressSpace,
    total_shares: usize,
    rng: &RandomnessContext,
) -> Result<Vec<Vec<T>>> {
    if total_shares < 2 {
        return Err(Error::InvalidShareCount(total_shares));
    }
    let levels =
        u32::try_from(total_shares - 1).map_err(|_| Error::InvalidShareCount(total_shares))?;
    let mut shares = Vec::with_capacity(total_shares);
    let mut rest = Zeroizing::new(samples.to_vec());
    for level in 0..levels {
        let (s1, s2) = split_level(&rest, space, level, rng)?;
        shares.push(s1);
        *rest = s2;
    }
    shares.push(std::mem::take(&mut *rest));
    Ok(shares)
}

fn space_of<T: Sample>(r: &Raster<T>) -> AddressSpace {
    AddressSpace {
        width: r.width() as u64,
        height: r.height(),
        channels: r.channels(),
    }
}

/// Splits a raster into `total_shares` shares of the same geometry.
pub fn split_raster<T: Sample>(
    source: &Raster<T>,
    total_shares: usize,
    rng: &RandomnessContext,
) -> Result<Vec<Raster<T>>> {
    split_samples(source.samples(), space_of(source), total_shares, rng)?
        .into_iter()
        .map(|s| Raster::new(source.width(), source.height(), source.channels(), s))
        .collect()
}

/// XOR-folds rasters of identical geometry.
pub fn combine_rasters<T: Sample>(shares: &[Raster<T>]) -> Result<Raster<T>> {
    let (head, tail) = match shares {
        [] | [_] => return Err(Error::TooFewShares(shares.len())),
        [head, tail @ ..] => (head, tail),
    };
    let expected = head.geometry();
    let mut out = head.clone();
    for (i, share) in tail.iter().enumerate() {
        if share.geometry() != expected {
            return Err(Error::GeometryMismatch {
                index: i + 1,
                expected,
                found: share.geometry(),
            });
        }
        out.samples_mut()
            .par_iter_mut()
            .zip(share.samples().par_iter())
            .for_each(|(acc, s)| *acc = *acc ^ *s);
    }
    Ok(out)
}

/// Splits `source` into exactly two shares.
pub fn split2(source: &RasterImage, rng: &RandomnessContext) -> Result<(RasterImage, RasterImage)> {
    let shares = split_image(source, 2, rng)?;
    let mut it = shares.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

fn split_image(
    source: &RasterImage,
    total_shares: usize,
    rng: &RandomnessContext,
) -> Result<Vec<RasterImage>> {
    Ok(match source {
        RasterImage::Eight(r) => split_raster(r, total_shares, rng)?
            .into_iter()
            .map(RasterImage::from)
            .collect(),
        RasterImage::Sixteen(r) => split_raster(r, total_shares, rng)?
            .into_iter()
            .map(RasterImage::from)
            .collect(),
    })
}

/// Splits into `req.total_shares` shares and builds their manifests.
pub fn split_n(req: &SplitRequest<'_>) -> Result<ShareSet> {
    let shares = split_image(req.source, req.total_shares, req.rng)?;
    // group ids always come from the OS, never from a deterministic seed
    let group_id = req.link_shares.then(|| {
        let mut id = [0u8; 16];
        OsRng.fill_bytes(&mut id);
        hex::encode(id)
    });
    let geometry = req.source.geometry();
    let manifests = (0..shares.len())
        .map(|i| ShareManifest::new(i, shares.len(), geometry, group_id.clone()))
        .collect::<Result<_>>()?;
    Ok(ShareSet { shares, manifests })
}

/// XOR-folds any number (at least two) of equal-geometry shares.
pub fn combine(shares: &[RasterImage]) -> Result<RasterImage> {
    if shares.len() < 2 {
        return Err(Error::TooFewShares(shares.len()));
    }
    let expected = shares[0].geometry();
    if let Some((index, found)) = shares
        .iter()
        .map(RasterImage::geometry)
        .enumerate()
        .find(|(_, g)| *g != expected)
    {
        return Err(Error::GeometryMismatch {
            index,
            expected,
            found,
        });
    }
    Ok(match &shares[0] {
        RasterImage::Eight(_) => {
            let rasters: Vec<_> = shares
                .iter()
                .filter_map(|s| s.as_eight().cloned())
                .collect();
            combine_rasters(&rasters)?.into()
        }
        RasterImage::Sixteen(_) => {
            let rasters: Vec<_> = shares
                .iter()
                .filter_map(|s| s.as_sixteen().cloned())
                .collect();
            combine_rasters(&rasters)?.into()
        }
    })
}

/// Splits a byte string as if it were a 1 x len single-channel 8-bit image.
pub fn split_bytes(
    data: &[u8],
    total_shares: usize,
    rng: &RandomnessContext,
) -> Result<Vec<Vec<u8>>> {
    let space = AddressSpace {
        width: data.len() as u64,
        height: 1,
        channels: 1,
    };
    split_samples(data, space, total_shares, rng)
}

pub fn combine_bytes<B: AsRef<[u8]>>(parts: &[B]) -> Result<Vec<u8>> {
    let (head, tail) = match parts {
        [] | [_] => return Err(Error::TooFewShares(parts.len())),
        [head, tail @ ..] => (head.as_ref(), tail),
    };
    let mut out = head.to_vec();
    for (i, part) in tail.iter().enumerate() {
        let part = part.as_ref();
        if part.len() != out.len() {
            return Err(Error::LengthMismatch {
                index: i + 1,
                expected: out.len(),
                found: part.len(),
            });
        }
        out.iter_mut().zip(part).for_each(|(a, b)| *a ^= b);
    }
    Ok(out)
}
