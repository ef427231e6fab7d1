use std::fmt;

use crate::error::{Error, Result};
use crate::word::{BitDepth, Sample};

/// Width, height, channel count and depth of a raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub depth: BitDepth,
}

impl Geometry {
    pub fn sample_count(&self) -> usize {
        self.width as usize * self.height as usize * self.channels as usize
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let layout = match self.channels {
            1 => "gray",
            2 => "gray+alpha",
            3 => "RGB",
            4 => "RGBA",
            _ => "?",
        };
        write!(
            f,
            "{}x{} {}{}",
            self.width,
            self.height,
            layout,
            self.depth.bits()
        )
    }
}

/// Row-major, channel-interleaved grid of samples. Channels are gray,
/// gray+alpha, RGB or RGBA for counts 1 to 4.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster<T: Sample> {
    width: u32,
    height: u32,
    channels: u8,
    samples: Vec<T>,
}

impl<T: Sample> Raster<T> {
    pub fn new(width: u32, height: u32, channels: u8, samples: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(1..=4).contains(&channels) {
            return Err(Error::InvalidImage(format!(
                "channel count must be 1 to 4, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if samples.len() != expected {
            return Err(Error::InvalidImage(format!(
                "expected {expected} samples for {width}x{height}x{channels}, got {}",
                samples.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            channels,
            samples,
        })
    }

    /// Builds a raster from `f(x, y, channel)`.
    pub fn from_fn(
        width: u32,
        height: u32,
        channels: u8,
        mut f: impl FnMut(u32, u32, u8) -> T,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width as usize * height as usize * channels as usize);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    samples.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, channels, samples)
    }

    pub fn filled(width: u32, height: u32, pixel: &[T]) -> Result<Self> {
        let channels = u8::try_from(pixel.len())
            .map_err(|_| Error::InvalidImage("too many channels".into()))?;
        Self::from_fn(width, height, channels, |_, _, c| pixel[c as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            width: self.width,
            height: self.height,
            channels: self.channels,
            depth: T::DEPTH,
        }
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn row_len(&self) -> usize {
        self.width as usize * self.channels as usize
    }

    pub fn sample(&self, x: u32, y: u32, channel: u8) -> T {
        self.samples[self.index(x, y, channel)]
    }

    pub fn set_sample(&mut self, x: u32, y: u32, channel: u8, value: T) {
        let i = self.index(x, y, channel);
        self.samples[i] = value;
    }

    fn index(&self, x: u32, y: u32, channel: u8) -> usize {
        assert!(x < self.width && y < self.height && channel < self.channels);
        (y as usize * self.width as usize + x as usize) * self.channels as usize + channel as usize
    }
}

impl<T: Sample> fmt::Debug for Raster<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Raster")
            .field("geometry", &self.geometry())
            .finish_non_exhaustive()
    }
}

/// A raster of either supported depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RasterImage {
    Eight(Raster<u8>),
    Sixteen(Raster<u16>),
}

impl RasterImage {
    pub fn geometry(&self) -> Geometry {
        match self {
            RasterImage::Eight(r) => r.geometry(),
            RasterImage::Sixteen(r) => r.geometry(),
        }
    }

    pub fn depth(&self) -> BitDepth {
        self.geometry().depth
    }

    pub fn as_eight(&self) -> Option<&Raster<u8>> {
        match self {
            RasterImage::Eight(r) => Some(r),
            RasterImage::Sixteen(_) => None,
        }
    }

    pub fn as_sixteen(&self) -> Option<&Raster<u16>> {
        match self {
            RasterImage::Sixteen(r) => Some(r),
            RasterImage::Eight(_) => None,
        }
    }

    /// Samples widened to `u32`, in storage order.
    pub fn samples_u32(&self) -> Vec<u32> {
        match self {
            RasterImage::Eight(r) => r.samples().iter().map(|s| *s as u32).collect(),
            RasterImage::Sixteen(r) => r.samples().iter().map(|s| *s as u32).collect(),
        }
    }
}

impl From<Raster<u8>> for RasterImage {
    fn from(r: Raster<u8>) -> Self {
        RasterImage::Eight(r)
    }
}

impl From<Raster<u16>> for RasterImage {
    fn from(r: Raster<u16>) -> Self {
        RasterImage::Sixteen(r)
    }
}
