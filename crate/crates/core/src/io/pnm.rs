//! Netpbm P2/P3/P5/P6 at 8 bits per sample.

use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{Raster, RasterImage};
use crate::word::BitDepth;

pub(super) fn decode(bytes: &[u8], path: &Path) -> Result<RasterImage> {
    let corrupt = |reason: &str| Error::Corrupt {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let (channels, binary) = match &bytes[..2] {
        b"P2" => (1u8, false),
        b"P3" => (3, false),
        b"P5" => (1, true),
        b"P6" => (3, true),
        _ => return Err(corrupt("bad magic")),
    };
    let mut cursor = Tokens { bytes, pos: 2 };
    let width = cursor.number().ok_or_else(|| corrupt("missing width"))?;
    let height = cursor.number().ok_or_else(|| corrupt("missing height"))?;
    let maxval = cursor.number().ok_or_else(|| corrupt("missing maxval"))?;
    if maxval == 0 {
        return Err(corrupt("maxval must be positive"));
    }
    if maxval > 255 {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            format: format!("PNM with maxval {maxval} (only 8-bit is supported; use PNG)"),
        });
    }
    let count = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(channels as usize))
        .ok_or_else(|| corrupt("dimensions overflow"))?;

    let samples = if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = cursor.pos + 1;
        let data = bytes
            .get(start..start + count)
            .ok_or_else(|| corrupt("truncated raster data"))?;
        data.to_vec()
    } else {
        let mut samples = Vec::with_capacity(count);
        for _ in 0..count {
            let v = cursor
                .number()
                .ok_or_else(|| corrupt("truncated raster data"))?;
            samples.push(u8::try_from(v).map_err(|_| corrupt("sample exceeds 255"))?);
        }
        samples
    };
    if samples.iter().any(|&s| s as u32 > maxval) {
        return Err(corrupt("sample exceeds maxval"));
    }
    Ok(Raster::new(width, height, channels, samples)?.into())
}

pub(super) fn encode(img: &RasterImage, path: &Path) -> Result<Vec<u8>> {
    let geometry = img.geometry();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase();
    let magic = match (ext.as_str(), geometry.channels, geometry.depth) {
        ("ppm" | "pnm", 3, BitDepth::Eight) => "P6",
        ("pgm" | "pnm", 1, BitDepth::Eight) => "P5",
        _ => {
            return Err(Error::UnsupportedCombination {
                path: path.to_path_buf(),
                geometry,
                format: match ext.as_str() {
                    "pgm" => "PGM (8-bit gray only)",
                    "ppm" => "PPM (8-bit RGB only)",
                    _ => "PNM (8-bit gray or RGB only)",
                },
            })
        }
    };
    let RasterImage::Eight(r) = img else {
        unreachable!("depth checked above")
    };
    let mut out = format!("{magic}\n{} {}\n255\n", geometry.width, geometry.height).into_bytes();
    out.extend_from_slice(r.samples());
    Ok(out)
}

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Tokens<'_> {
    /// Next decimal number, skipping whitespace and `#` comments. Leaves
    /// `pos` on the byte right after the digits.
    fn number(&mut self) -> Option<u32> {
        loop {
            match self.bytes.get(self.pos)? {
                b'#' => {
                    while *self.bytes.get(self.pos)? != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}
