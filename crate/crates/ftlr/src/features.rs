//! Feature extraction. The embedding is deliberately pluggable: the tracker
//! only needs a deterministic `Patch -> FeatureMap` mapping, so the gating and
//! recovery machinery can be studied independently of any particular learned
//! representation. Two reference extractors are provided, plus a binary
//! feature-map format for externally produced maps.

use crate::census::{census_transform, rotate_expand};
use crate::geom::Patch;
use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("feature map values must be finite")]
    NonFinite,
    #[error("feature map shape {h}x{w}x{c} does not match value count {got}")]
    ShapeMismatch {
        h: usize,
        w: usize,
        c: usize,
        got: usize,
    },
    #[error("unknown extractor {0:?}")]
    UnknownExtractor(String),
    #[error("census extraction failed: {0}")]
    Census(#[from] crate::census::CensusError),
    #[error("feature map io: {0}")]
    Io(#[from] io::Error),
    #[error("feature map file has degenerate shape {h}x{w}x{c}")]
    BadHeader { h: u32, w: u32, c: u32 },
}

/// Multi-channel real-valued grid, stored row-major with the channel index
/// minor: `values[(row * width + col) * channels + ch]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub values: Vec<f32>,
}

impl FeatureMap {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        values: Vec<f32>,
    ) -> Result<Self, FeatureError> {
        if values.len() != height * width * channels {
            return Err(FeatureError::ShapeMismatch {
                h: height,
                w: width,
                c: channels,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite);
        }
        Ok(Self {
            height,
            width,
            channels,
            values,
        })
    }

    pub fn get(&self, x: usize, y: usize, ch: usize) -> f32 {
        self.values[(y * self.width + x) * self.channels + ch]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    pub fn channel_mean(&self, ch: usize) -> f64 {
        let mut sum = 0.0f64;
        for i in 0..self.height * self.width {
            sum += f64::from(self.values[i * self.channels + ch]);
        }
        sum / (self.height * self.width) as f64
    }
}

/// Deterministic mapping from a patch to a feature map. Implementations must
/// be pure: equal patches yield bit-identical maps, and the output spatial
/// size is a fixed function of the input side.
pub trait FeatureExtractor: Send + Sync {
    fn name(&self) -> &'static str;
    fn channel_count(&self) -> usize;
    fn extract(&self, patch: &Patch) -> Result<FeatureMap, FeatureError>;
}

/// Raw intensities, zero-meaned and scaled to unit variance. The variance is
/// clamped at 1e-12 so constant patches map to all-zero features.
pub struct GrayscaleExtractor;

impl FeatureExtractor for GrayscaleExtractor {
    fn name(&self) -> &'static str {
        "grayscale"
    }

    fn channel_count(&self) -> usize {
        1
    }

    fn extract(&self, patch: &Patch) -> Result<FeatureMap, FeatureError> {
        let n = patch.pixels.len();
        let mean = patch.pixels.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64;
        let var = patch
            .pixels
            .iter()
            .map(|&v| (f64::from(v) - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        let inv_std = 1.0 / var.max(1e-12).sqrt();
        let values = patch
            .pixels
            .iter()
            .map(|&v| ((f64::from(v) - mean) * inv_std) as f32)
            .collect();
        FeatureMap::new(patch.side, patch.side, 1, values)
    }
}

/// Census codes expanded to 4 channels, scaled into `[0,1]` and zero-meaned
/// per channel. A hand-crafted stand-in for a learned first layer.
pub struct CensusExtractor;

impl FeatureExtractor for CensusExtractor {
    fn name(&self) -> &'static str {
        "census"
    }

    fn channel_count(&self) -> usize {
        4
    }

    fn extract(&self, patch: &Patch) -> Result<FeatureMap, FeatureError> {
        let channels = rotate_expand(&census_transform(patch)?);
        let n = channels.height * channels.width;
        let mut values = vec![0.0f32; n * 4];
        for ch in 0..4 {
            let mut sum = 0.0f64;
            for i in 0..n {
                sum += f64::from(channels.values[i * 4 + ch]) / 255.0;
            }
            let mean = sum / n as f64;
            for i in 0..n {
                values[i * 4 + ch] =
                    (f64::from(channels.values[i * 4 + ch]) / 255.0 - mean) as f32;
            }
        }
        FeatureMap::new(channels.height, channels.width, 4, values)
    }
}

pub fn extractor_by_name(name: &str) -> Result<Box<dyn FeatureExtractor>, FeatureError> {
    match name {
        "grayscale" => Ok(Box::new(GrayscaleExtractor)),
        "census" => Ok(Box::new(CensusExtractor)),
        other => Err(FeatureError::UnknownExtractor(other.to_string())),
    }
}

/// Writes a map as `H, W, C` (u32 little-endian) followed by the values as
/// f32 little-endian, row-major, channel-minor.
pub fn write_feature_map(w: &mut impl Write, map: &FeatureMap) -> Result<(), FeatureError> {
    for dim in [map.height as u32, map.width as u32, map.channels as u32] {
        w.write_all(&dim.to_le_bytes())?;
    }
    for v in &map.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_feature_map(r: &mut impl Read) -> Result<FeatureMap, FeatureError> {
    let mut buf4 = [0u8; 4];
    let mut dims = [0u32; 3];
    for d in &mut dims {
        r.read_exact(&mut buf4)?;
        *d = u32::from_le_bytes(buf4);
    }
    let (h, w, c) = (dims[0], dims[1], dims[2]);
    if h == 0 || w == 0 || c == 0 {
        return Err(FeatureError::BadHeader { h, w, c });
    }
    let count = h as usize * w as usize * c as usize;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut buf4)?;
        values.push(f32::from_le_bytes(buf4));
    }
    FeatureMap::new(h as usize, w as usize, c as usize, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoundingBox;

    fn patch(side: usize, pixels: Vec<f32>) -> Patch {
        Patch {
            pixels,
            side,
            source_box: BoundingBox::new(0.0, 0.0, side as f64, side as f64).unwrap(),
        }
    }

    #[test]
    fn grayscale_constant_patch_is_all_zero() {
        let p = patch(8, vec![0.7; 64]);
        let m = GrayscaleExtractor.extract(&p).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grayscale_offset_invariance() {
        let base: Vec<f32> = (0..64).map(|i| (i % 7) as f32 * 0.1).collect();
        let a = GrayscaleExtractor.extract(&patch(8, base.clone())).unwrap();
        let b = GrayscaleExtractor
            .extract(&patch(8, base.iter().map(|v| v + 0.1).collect()))
            .unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn grayscale_two_by_two_normalization() {
        // mean 0.25, variance 3/16
        let p = Patch {
            pixels: vec![0.0, 0.0, 0.0, 1.0],
            side: 2,
            source_box: BoundingBox::new(0.0, 0.0, 2.0, 2.0).unwrap(),
        };
        let m = GrayscaleExtractor.extract(&p).unwrap();
        let std = (3.0f64 / 16.0).sqrt();
        let expect = [-0.25 / std, -0.25 / std, -0.25 / std, 0.75 / std];
        for (got, want) in m.values.iter().zip(expect.iter()) {
            assert!((f64::from(*got) - want).abs() < 1e-6);
        }
        assert!(m.channel_mean(0).abs() < 1e-6);
    }

    #[test]
    fn census_extractor_matches_composition() {
        let px: Vec<f32> = (0..256).map(|i| ((i * 53 + 7) % 101) as f32 / 100.0).collect();
        let p = patch(16, px);
        let m = CensusExtractor.extract(&p).unwrap();
        // compose the census ops by hand and normalize
        let ch = rotate_expand(&census_transform(&p).unwrap());
        for c in 0..4 {
            let mean: f64 = (0..256)
                .map(|i| f64::from(ch.values[i * 4 + c]) / 255.0)
                .sum::<f64>()
                / 256.0;
            for i in 0..256 {
                let want = f64::from(ch.values[i * 4 + c]) / 255.0 - mean;
                assert!((f64::from(m.values[i * 4 + c]) - want).abs() < 1e-6);
            }
            assert!(m.channel_mean(c).abs() < 1e-6, "channel {c} not zero-mean");
        }
    }

    #[test]
    fn census_extractor_constant_patch_is_all_zero() {
        let m = CensusExtractor.extract(&patch(8, vec![0.3; 64])).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn census_extractor_gamma_invariance() {
        let px: Vec<f32> = (0..144).map(|i| ((i * 89 + 3) % 71) as f32 / 70.0).collect();
        let a = CensusExtractor.extract(&patch(12, px.clone())).unwrap();
        let b = CensusExtractor
            .extract(&patch(12, px.iter().map(|v| v.powf(1.7)).collect()))
            .unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn extractor_determinism() {
        let px: Vec<f32> = (0..100).map(|i| ((i * 31) % 50) as f32 / 49.0).collect();
        for name in ["grayscale", "census"] {
            let e = extractor_by_name(name).unwrap();
            let a = e.extract(&patch(10, px.clone())).unwrap();
            let b = e.extract(&patch(10, px.clone())).unwrap();
            assert_eq!(a.values, b.values);
            assert_eq!(e.channel_count(), a.channels);
        }
        assert!(extractor_by_name("resnet").is_err());
    }

    #[test]
    fn feature_map_roundtrips_through_binary_format() {
        let m = FeatureMap::new(3, 4, 2, (0..24).map(|i| i as f32 * 0.5 - 3.0).collect()).unwrap();
        let mut buf = Vec::new();
        write_feature_map(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 12 + 24 * 4);
        let back = read_feature_map(&mut buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn read_rejects_zero_dims() {
        let mut buf = Vec::new();
        buf.extend_from_slice(&0u32.to_le_bytes());
        buf.extend_from_slice(&4u32.to_le_bytes());
        buf.extend_from_slice(&1u32.to_le_bytes());
        assert!(matches!(
            read_feature_map(&mut buf.as_slice()),
            Err(FeatureError::BadHeader { .. })
        ));
    }
}
