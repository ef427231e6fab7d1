//! Lossless raster persistence: PNG at 8 and 16 bits, and binary/plain
//! PPM/PGM at 8 bits for dependency-free fixtures.

mod png;
mod pnm;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::RasterImage;

/// Container chosen for an output path, by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// `.ppm` (RGB), `.pgm` (gray) or `.pnm` (either, by channel count).
    Pnm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "png" => Ok(ImageFormat::Png),
            "ppm" | "pgm" | "pnm" => Ok(ImageFormat::Pnm),
            "jpg" | "jpeg" | "jpe" | "jfif" => Err(Error::LossyFormat {
                path: path.to_path_buf(),
                format: "JPEG",
            }),
            "webp" => Err(Error::LossyFormat {
                path: path.to_path_buf(),
                format: "WebP",
            }),
            "" => Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                format: "no file extension".into(),
            }),
            other => Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                format: format!(".{other}"),
            }),
        }
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, path)
}

/// Decodes an in-memory file; `path` is used only in error messages.
pub fn decode_image(bytes: &[u8], path: &Path) -> Result<RasterImage> {
    match sniff(bytes) {
        Sniffed::Png => png::decode(bytes, path),
        Sniffed::Pnm => pnm::decode(bytes, path),
        Sniffed::Jpeg => Err(Error::LossyFormat {
            path: path.to_path_buf(),
            format: "JPEG",
        }),
        Sniffed::Other(format) => Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            format: format.into(),
        }),
    }
}

pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_image(img, path)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Encodes for the container selected by `path`'s extension.
pub fn encode_image(img: &RasterImage, path: &Path) -> Result<Vec<u8>> {
    match ImageFormat::from_path(path)? {
        ImageFormat::Png => png::encode(img, path),
        ImageFormat::Pnm => pnm::encode(img, path),
    }
}

enum Sniffed {
    Png,
    Pnm,
    Jpeg,
    Other(&'static str),
}

fn sniff(bytes: &[u8]) -> Sniffed {
    match bytes {
        [0x89, b'P', b'N', b'G', ..] => Sniffed::Png,
        [0xFF, 0xD8, 0xFF, ..] => Sniffed::Jpeg,
        [b'P', b'2' | b'3' | b'5' | b'6', ..] => Sniffed::Pnm,
        [b'P', b'1' | b'4', ..] => Sniffed::Other("PBM bitmap"),
        [b'P', b'7', ..] => Sniffed::Other("PAM"),
        [b'G', b'I', b'F', b'8', ..] => Sniffed::Other("GIF"),
        [b'B', b'M', ..] => Sniffed::Other("BMP"),
        [b'I', b'I', 42, 0, ..] | [b'M', b'M', 0, 42, ..] => Sniffed::Other("TIFF"),
        [b'R', b'I', b'F', b'F', _, _, _, _, b'W', b'E', b'B', b'P', ..] => Sniffed::Other("WebP"),
        [] => Sniffed::Other("empty file"),
        _ => Sniffed::Other("unrecognized"),
    }
}
