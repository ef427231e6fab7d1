use std::io::Cursor;
use std::path::Path;

use png::{BitDepth as PngDepth, ColorType, Decoder, Encoder, Transformations};

use crate::error::{Error, Result};
use crate::raster::{Raster, RasterImage};

pub(super) fn decode(bytes: &[u8], path: &Path) -> Result<RasterImage> {
    let corrupt = |reason: String| Error::Corrupt {
        path: path.to_path_buf(),
        reason,
    };
    let mut decoder = Decoder::new(Cursor::new(bytes));
    // palette and sub-byte gray become 8-bit samples; 16-bit is kept as is
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| corrupt(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| corrupt("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| corrupt(e.to_string()))?;
    buf.truncate(info.buffer_size());

    let channels: u8 = match info.color_type {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => return Err(corrupt("palette was not expanded".into())),
    };
    let row_bytes = info.width as usize * channels as usize * info.bit_depth as usize / 8;
    let rows = buf
        .chunks_exact(info.line_size)
        .take(info.height as usize)
        .map(|row| &row[..row_bytes]);
    match info.bit_depth {
        PngDepth::Eight => {
            let samples: Vec<u8> = rows.flatten().copied().collect();
            Ok(Raster::new(info.width, info.height, channels, samples)?.into())
        }
        PngDepth::Sixteen => {
            let samples: Vec<u16> = rows
                .flat_map(|row| row.chunks_exact(2))
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect();
            Ok(Raster::new(info.width, info.height, channels, samples)?.into())
        }
        other => Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            format: format!("PNG at {} bits per sample", other as u8),
        }),
    }
}

pub(super) fn encode(img: &RasterImage, path: &Path) -> Result<Vec<u8>> {
    let geometry = img.geometry();
    let color = match geometry.channels {
        1 => ColorType::Grayscale,
        2 => ColorType::GrayscaleAlpha,
        3 => ColorType::Rgb,
        _ => ColorType::Rgba,
    };
    let (depth, data) = match img {
        RasterImage::Eight(r) => (PngDepth::Eight, r.samples().to_vec()),
        RasterImage::Sixteen(r) => (
            PngDepth::Sixteen,
            r.samples().iter().flat_map(|s| s.to_be_bytes()).collect(),
        ),
    };
    let fail = |e: png::EncodingError| Error::Corrupt {
        path: path.to_path_buf(),
        reason: format!("PNG encoding failed: {e}"),
    };
    let mut out = Vec::new();
    {
        let mut encoder = Encoder::new(&mut out, geometry.width, geometry.height);
        encoder.set_color(color);
        encoder.set_depth(depth);
        let mut writer = encoder.write_header().map_err(fail)?;
        writer.write_image_data(&data).map_err(fail)?;
        writer.finish().map_err(fail)?;
    }
    Ok(out)
}
