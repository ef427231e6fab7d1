//! Sidecar metadata written beside each share image as `<stem>.vcs.json`.
//!
//! The manifest holds bookkeeping only. It never carries anything computed
//! from the source image, and unknown keys are rejected so a digest cannot
//! ride along unnoticed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Geometry;
use crate::word::BitDepth;

pub const FORMAT_VERSION: &str = "1";
pub const MANIFEST_SUFFIX: &str = ".vcs.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareManifest {
    pub format_version: String,
    pub share_index: usize,
    pub total_shares: usize,
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub bit_depth: BitDepth,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_id: Option<String>,
}

impl ShareManifest {
    pub fn new(
        share_index: usize,
        total_shares: usize,
        geometry: Geometry,
        group_id: Option<String>,
    ) -> Result<Self> {
        let m = ShareManifest {
            format_version: FORMAT_VERSION.to_string(),
            share_index,
            total_shares,
            width: geometry.width,
            height: geometry.height,
            channels: geometry.channels,
            bit_depth: geometry.depth,
            group_id,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            width: self.width,
            height: self.height,
            channels: self.channels,
            depth: self.bit_depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidManifest(format!(
                "format_version {:?} is not {FORMAT_VERSION:?}",
                self.format_version
            )));
        }
        if self.total_shares < 2 {
            return Err(Error::InvalidManifest(format!(
                "total_shares must be at least 2, got {}",
                self.total_shares
            )));
        }
        if self.share_index >= self.total_shares {
            return Err(Error::InvalidManifest(format!(
                "share_index {} out of range for total_shares {}",
                self.share_index, self.total_shares
            )));
        }
        if self.width == 0 || self.height == 0 || !(1..=4).contains(&self.channels) {
            return Err(Error::InvalidManifest(format!(
                "invalid geometry {}x{}x{}",
                self.width, self.height, self.channels
            )));
        }
        if let Some(id) = &self.group_id {
            if id.len() != 32 || !id.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(Error::InvalidManifest(format!(
                    "group_id must be 32 hex characters, got {id:?}"
                )));
            }
        }
        Ok(())
    }

    /// Fails unless the manifest describes an image of exactly `geometry`.
    pub fn check_geometry(&self, geometry: Geometry) -> Result<()> {
        if self.geometry() != geometry {
            return Err(Error::InvalidManifest(format!(
                "manifest describes {}, image is {}",
                self.geometry(),
                geometry
            )));
        }
        Ok(())
    }
}

/// `dir/share_0.png` -> `dir/share_0.vcs.json`.
pub fn manifest_path_for(image: &Path) -> PathBuf {
    let stem = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    image.with_file_name(format!("{stem}{MANIFEST_SUFFIX}"))
}

pub fn write_manifest(m: &ShareManifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    m.validate()?;
    let mut text = serde_json::to_string_pretty(m).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<ShareManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, path)
}

/// Parses manifest text; `path` is used only in error messages.
pub fn parse_manifest(text: &str, path: &Path) -> Result<ShareManifest> {
    let malformed = |reason: String| Error::MalformedManifest {
        path: path.to_path_buf(),
        reason,
    };
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let version = value
        .get("format_version")
        .ok_or_else(|| malformed("missing format_version".into()))?;
    match version.as_str() {
        Some(FORMAT_VERSION) => {}
        Some(other) => {
            return Err(Error::ManifestVersion {
                path: path.to_path_buf(),
                found: other.to_string(),
            })
        }
        None => {
            return Err(Error::ManifestVersion {
                path: path.to_path_buf(),
                found: version.to_string(),
            })
        }
    }
    let m: ShareManifest = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
    m.validate()?;
    Ok(m)
}
