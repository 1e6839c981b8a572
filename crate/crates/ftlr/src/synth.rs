//! Seeded synthetic sequences: a textured square target moving over a
//! textured background, with optional jump, occlusion, and gamma events. The
//! generator is the test bed for recovery behavior — a jump larger than the
//! default search radius reproduces the lock-on-background failure that the
//! gated tracker is supposed to survive.

use crate::config::{ConfigError, KeyValues};
use crate::eval::SequenceDataset;
use crate::geom::{BoundingBox, Frame};
use crate::tracker::{TrackerConfig, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("spec field {field}: {message}")]
    BadField {
        field: &'static str,
        message: String,
    },
    #[error("target leaves the frame at frame {frame}: top-left ({x:.2}, {y:.2})")]
    OutOfBounds { frame: usize, x: f64, y: f64 },
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("io on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("png encode on {path}: {source}")]
    Png {
        path: PathBuf,
        source: image::ImageError,
    },
}

/// Jump: from `frame` (1-based) onward the target position is displaced by
/// `(dx, dy)` pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub frame: usize,
    pub dx: f64,
    pub dy: f64,
}

/// Occluder covering `coverage` of the target area for `duration` frames
/// starting at `start` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcclusionEvent {
    pub start: usize,
    pub duration: usize,
    pub coverage: f64,
}

/// From `frame` onward intensities are raised to `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEvent {
    pub frame: usize,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub target_side: usize,
    pub target_seed: u64,
    pub background_seed: u64,
    /// Initial top-left corner of the target.
    pub start_x: f64,
    pub start_y: f64,
    pub velocity_x: f64,
    pub velocity_y: f64,
    pub jump_events: Vec<JumpEvent>,
    pub occlusion_events: Vec<OcclusionEvent>,
    pub gamma_events: Vec<GammaEvent>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            frame_count: 60,
            width: 160,
            height: 120,
            target_side: 24,
            target_seed: 7,
            background_seed: 99,
            start_x: 68.0,
            start_y: 48.0,
            velocity_x: 0.0,
            velocity_y: 0.0,
            jump_events: Vec::new(),
            occlusion_events: Vec::new(),
            gamma_events: Vec::new(),
            noise_sigma: 0.01,
            seed: 1,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |field: &'static str, message: String| -> Result<(), SynthError> {
            Err(SynthError::BadField { field, message })
        };
        if self.frame_count < 2 {
            return fail("frame_count", format!("must be >= 2, got {}", self.frame_count));
        }
        if self.target_side < 4 {
            return fail("target_side", format!("must be >= 4, got {}", self.target_side));
        }
        if self.width <= self.target_side || self.height <= self.target_side {
            return fail(
                "width",
                format!(
                    "frame {}x{} cannot hold a {}px target",
                    self.width, self.height, self.target_side
                ),
            );
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma < 0.5) {
            return fail(
                "noise_sigma",
                format!("must lie in [0, 0.5), got {}", self.noise_sigma),
            );
        }
        for e in &self.jump_events {
            if e.frame < 2 || e.frame > self.frame_count {
                return fail(
                    "jump_events",
                    format!("jump frame {} outside 2..={}", e.frame, self.frame_count),
                );
            }
        }
        for e in &self.occlusion_events {
            if e.start < 1 || e.start > self.frame_count || e.duration == 0 {
                return fail(
                    "occlusion_events",
                    format!(
                        "occlusion at frame {} duration {} is invalid",
                        e.start, e.duration
                    ),
                );
            }
            if !(0.0..=1.0).contains(&e.coverage) {
                return fail(
                    "occlusion_events",
                    format!("coverage {} outside [0,1]", e.coverage),
                );
            }
        }
        for e in &self.gamma_events {
            if !(e.gamma > 0.0) || e.frame < 1 || e.frame > self.frame_count {
                return fail(
                    "gamma_events",
                    format!("gamma event ({}, {}) is invalid", e.frame, e.gamma),
                );
            }
        }
        // the whole trajectory must stay inside the frame
        for k in 1..=self.frame_count {
            let (x, y) = self.position(k);
            if x < 0.0
                || y < 0.0
                || x > (self.width - self.target_side) as f64
                || y > (self.height - self.target_side) as f64
            {
                return Err(SynthError::OutOfBounds { frame: k, x, y });
            }
        }
        Ok(())
    }

    /// Target top-left at 1-based frame `k`. Positions are quantized to
    /// multiples of 2^-32 px so the 1-based on-disk coordinates convert back
    /// to 0-based without rounding (floats near `x + 1` are sparser than
    /// floats near `x`, so unquantized positions cannot round-trip exactly).
    pub fn position(&self, k: usize) -> (f64, f64) {
        let t = (k - 1) as f64;
        let mut x = self.start_x + self.velocity_x * t;
        let mut y = self.start_y + self.velocity_y * t;
        for e in &self.jump_events {
            if k >= e.frame {
                x += e.dx;
                y += e.dy;
            }
        }
        let quantum = (1u64 << 32) as f64;
        ((x * quantum).round() / quantum, (y * quantum).round() / quantum)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("frame_count", self.frame_count);
        kv.set("width", self.width);
        kv.set("height", self.height);
        kv.set("target_side", self.target_side);
        kv.set("target_seed", self.target_seed);
        kv.set("background_seed", self.background_seed);
        kv.set("start_x", self.start_x);
        kv.set("start_y", self.start_y);
        kv.set("velocity_x", self.velocity_x);
        kv.set("velocity_y", self.velocity_y);
        kv.set("noise_sigma", self.noise_sigma);
        kv.set("seed", self.seed);
        if !self.jump_events.is_empty() {
            let items: Vec<String> = self
                .jump_events
                .iter()
                .map(|e| format!("{}:{}:{}", e.frame, e.dx, e.dy))
                .collect();
            kv.set("jump_events", items.join(";"));
        }
        if !self.occlusion_events.is_empty() {
            let items: Vec<String> = self
                .occlusion_events
                .iter()
                .map(|e| format!("{}:{}:{}", e.start, e.duration, e.coverage))
                .collect();
            kv.set("occlusion_events", items.join(";"));
        }
        if !self.gamma_events.is_empty() {
            let items: Vec<String> = self
                .gamma_events
                .iter()
                .map(|e| format!("{}:{}", e.frame, e.gamma))
                .collect();
            kv.set("gamma_events", items.join(";"));
        }
        kv
    }

    pub fn from_key_values(kv: &mut KeyValues) -> Result<Self, SynthError> {
        let mut spec = SynthSpec::default();
        if let Some(v) = kv.take_parsed("frame_count")? {
            spec.frame_count = v;
        }
        if let Some(v) = kv.take_parsed("width")? {
            spec.width = v;
        }
        if let Some(v) = kv.take_parsed("height")? {
            spec.height = v;
        }
        if let Some(v) = kv.take_parsed("target_side")? {
            spec.target_side = v;
        }
        if let Some(v) = kv.take_parsed("target_seed")? {
            spec.target_seed = v;
        }
        if let Some(v) = kv.take_parsed("background_seed")? {
            spec.background_seed = v;
        }
        if let Some(v) = kv.take_parsed("start_x")? {
            spec.start_x = v;
        }
        if let Some(v) = kv.take_parsed("start_y")? {
            spec.start_y = v;
        }
        if let Some(v) = kv.take_parsed("velocity_x")? {
            spec.velocity_x = v;
        }
        if let Some(v) = kv.take_parsed("velocity_y")? {
            spec.velocity_y = v;
        }
        if let Some(v) = kv.take_parsed("noise_sigma")? {
            spec.noise_sigma = v;
        }
        if let Some(v) = kv.take_parsed("seed")? {
            spec.seed = v;
        }
        if let Some(raw) = kv.take("jump_events") {
            spec.jump_events = parse_events(&raw, "jump_events", 3)?
                .into_iter()
                .map(|f| JumpEvent {
                    frame: f[0] as usize,
                    dx: f[1],
                    dy: f[2],
                })
                .collect();
        }
        if let Some(raw) = kv.take("occlusion_events") {
            spec.occlusion_events = parse_events(&raw, "occlusion_events", 3)?
                .into_iter()
                .map(|f| OcclusionEvent {
                    start: f[0] as usize,
                    duration: f[1] as usize,
                    coverage: f[2],
                })
                .collect();
        }
        if let Some(raw) = kv.take("gamma_events") {
            spec.gamma_events = parse_events(&raw, "gamma_events", 2)?
                .into_iter()
                .map(|f| GammaEvent {
                    frame: f[0] as usize,
                    gamma: f[1],
                })
                .collect();
        }
        Ok(spec)
    }
}

fn parse_events(raw: &str, field: &'static str, arity: usize) -> Result<Vec<Vec<f64>>, SynthError> {
    let mut out = Vec::new();
    for item in raw.split(';').filter(|s| !s.trim().is_empty()) {
        let fields: Result<Vec<f64>, _> =
            item.split(':').map(|p| p.trim().parse::<f64>()).collect();
        let fields = fields.map_err(|_| SynthError::BadField {
            field,
            message: format!("cannot parse event {item:?}"),
        })?;
        if fields.len() != arity {
            return Err(SynthError::BadField {
                field,
                message: format!("event {item:?} needs {arity} fields"),
            });
        }
        out.push(fields);
    }
    Ok(out)
}

/// Smoothed value noise in `[0,1]`: octaves of seeded lattice noise,
/// bilinearly interpolated and contrast-stretched.
struct NoiseTexture {
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl NoiseTexture {
    fn generate(width: usize, height: usize, seed: u64, octaves: &[(f64, f64)], gain: f64) -> Self {
        let mut values = vec![0.5f64; width * height];
        for (oct, &(spacing, weight)) in octaves.iter().enumerate() {
            let gw = (width as f64 / spacing).ceil() as usize + 2;
            let gh = (height as f64 / spacing).ceil() as usize + 2;
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (0x5bd1_e995u64.wrapping_mul(oct as u64 + 1)));
            let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.gen::<f64>()).collect();
            for y in 0..height {
                let gy = y as f64 / spacing;
                let y0 = gy.floor() as usize;
                let fy = gy - y0 as f64;
                for x in 0..width {
                    let gx = x as f64 / spacing;
                    let x0 = gx.floor() as usize;
                    let fx = gx - x0 as f64;
                    let v00 = lattice[y0 * gw + x0];
                    let v01 = lattice[y0 * gw + x0 + 1];
                    let v10 = lattice[(y0 + 1) * gw + x0];
                    let v11 = lattice[(y0 + 1) * gw + x0 + 1];
                    let v = v00 * (1.0 - fx) * (1.0 - fy)
                        + v01 * fx * (1.0 - fy)
                        + v10 * (1.0 - fx) * fy
                        + v11 * fx * fy;
                    values[y * width + x] += weight * (v - 0.5);
                }
            }
        }
        let values = values
            .into_iter()
            .map(|v| ((0.5 + (v - 0.5) * gain).clamp(0.0, 1.0)) as f32)
            .collect();
        Self {
            width,
            height,
            values,
        }
    }

    fn sample_bilinear(&self, x: f64, y: f64) -> f32 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = (x - x0 as f64) as f32;
        let fy = (y - y0 as f64) as f32;
        let v00 = self.values[y0 * self.width + x0];
        let v01 = self.values[y0 * self.width + x1];
        let v10 = self.values[y1 * self.width + x0];
        let v11 = self.values[y1 * self.width + x1];
        v00 * (1.0 - fx) * (1.0 - fy) + v01 * fx * (1.0 - fy) + v10 * (1.0 - fx) * fy + v11 * fx * fy
    }
}

/// Renders the sequence in memory: frames plus one ground-truth box per
/// frame. Deterministic in the spec.
pub fn render_sequence(spec: &SynthSpec) -> Result<(Vec<Frame>, Vec<BoundingBox>), SynthError> {
    spec.validate()?;
    // background correlates over tens of pixels, the target over a few, so
    // the two stay distinguishable at any overlap
    let background = NoiseTexture::generate(
        spec.width,
        spec.height,
        spec.background_seed,
        &[(24.0, 0.3), (11.0, 0.3), (5.0, 0.25), (2.5, 0.15)],
        1.8,
    );
    let tex_side = spec.target_side + 2;
    let target = NoiseTexture::generate(
        tex_side,
        tex_side,
        spec.target_seed,
        &[(4.0, 0.6), (2.0, 0.4)],
        2.4,
    );

    let mut frames = Vec::with_capacity(spec.frame_count);
    let mut boxes = Vec::with_capacity(spec.frame_count);
    for k in 1..=spec.frame_count {
        let (tx, ty) = spec.position(k);
        let mut pixels = background.values.clone();

        // target drawn with sub-pixel placement
        let side = spec.target_side as f64;
        let x_lo = tx.floor().max(0.0) as usize;
        let y_lo = ty.floor().max(0.0) as usize;
        let x_hi = ((tx + side).ceil() as usize).min(spec.width);
        let y_hi = ((ty + side).ceil() as usize).min(spec.height);
        for py in y_lo..y_hi {
            for px in x_lo..x_hi {
                let lx = px as f64 - tx;
                let ly = py as f64 - ty;
                if lx >= 0.0 && ly >= 0.0 && lx < side && ly < side {
                    pixels[py * spec.width + px] = target.sample_bilinear(lx, ly);
                }
            }
        }

        // active occluder, centered on the target
        for occ in &spec.occlusion_events {
            if k >= occ.start && k < occ.start + occ.duration && occ.coverage > 0.0 {
                let occ_side = side * occ.coverage.sqrt();
                let cx = tx + side / 2.0;
                let cy = ty + side / 2.0;
                let ox0 = (cx - occ_side / 2.0).round().max(0.0) as usize;
                let oy0 = (cy - occ_side / 2.0).round().max(0.0) as usize;
                let ox1 = ((cx + occ_side / 2.0).round() as usize).min(spec.width);
                let oy1 = ((cy + occ_side / 2.0).round() as usize).min(spec.height);
                for py in oy0..oy1 {
                    for px in ox0..ox1 {
                        pixels[py * spec.width + px] = 0.25;
                    }
                }
            }
        }

        // latest gamma event at or before k wins
        let gamma = spec
            .gamma_events
            .iter()
            .rfind(|e| e.frame <= k)
            .map(|e| e.gamma);
        if let Some(g) = gamma {
            for v in &mut pixels {
                *v = v.powf(g as f32);
            }
        }

        if spec.noise_sigma > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(
                spec.seed
                    .wrapping_add((k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            );
            let normal = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
            for v in &mut pixels {
                *v = (*v + normal.sample(&mut rng) as f32).clamp(0.0, 1.0);
            }
        } else {
            for v in &mut pixels {
                *v = v.clamp(0.0, 1.0);
            }
        }

        frames.push(Frame::new(spec.width, spec.height, pixels, k).expect("rendered in range"));
        boxes.push(BoundingBox {
            x: tx,
            y: ty,
            w: side,
            h: side,
        });
    }
    Ok((frames, boxes))
}

/// Renders and writes the sequence in the loader's directory layout:
/// `img/0001.png ...` plus `groundtruth_rect.txt` with 1-based coordinates at
/// full precision, so loading restores the boxes exactly.
pub fn generate_synthetic(spec: &SynthSpec, dir: &Path) -> Result<SequenceDataset, SynthError> {
    let (frames, boxes) = render_sequence(spec)?;
    let img_dir = dir.join("img");
    fs::create_dir_all(&img_dir).map_err(|e| SynthError::Io {
        path: img_dir.clone(),
        source: e,
    })?;

    let mut frame_paths = Vec::with_capacity(frames.len());
    for frame in &frames {
        let bytes: Vec<u8> = frame
            .pixels()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        let img = image::GrayImage::from_raw(frame.width() as u32, frame.height() as u32, bytes)
            .expect("pixel count matches");
        let path = img_dir.join(format!("{:04}.png", frame.index));
        img.save(&path).map_err(|e| SynthError::Png {
            path: path.clone(),
            source: e,
        })?;
        frame_paths.push(path);
    }

    let mut gt = String::new();
    for b in &boxes {
        let _ = writeln!(gt, "{},{},{},{}", b.x + 1.0, b.y + 1.0, b.w, b.h);
    }
    let gt_path = dir.join("groundtruth_rect.txt");
    fs::write(&gt_path, gt).map_err(|e| SynthError::Io {
        path: gt_path,
        source: e,
    })?;

    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "synthetic".to_string());
    Ok(SequenceDataset {
        name,
        frame_paths,
        gt_boxes: boxes,
        attributes: vec!["synthetic".to_string()],
    })
}

/// Tracker configuration the jump suite is calibrated for. Recovery from a
/// jump of 1.5x the search radius needs the enlarged crop to admit a valid
/// template placement centered on the target: the placement reach is
/// `R*sqrt(multiplier) - template_half`, so the context must be wide enough
/// that this exceeds `1.5*R/sqrt(2)` per axis. The stock 2.0 context cannot
/// satisfy that for any target size; 3.5 leaves a few pixels of margin.
pub fn jump_suite_config(variant: Variant) -> TrackerConfig {
    TrackerConfig {
        variant,
        search_context: 3.5,
        search_side: 224,
        ..TrackerConfig::default()
    }
}

/// The seeded jump suite: one diagonal jump of 1.5x the default search
/// radius per sequence, placed mid-sequence. The jump lands outside the
/// default search crop but inside the doubled-area crop, which is exactly the
/// regime the failure mode exists for. Sized for [`jump_suite_config`].
pub fn jump_suite(master_seed: u64, count: usize) -> Vec<SynthSpec> {
    let search_context = jump_suite_config(Variant::FtlrSa).search_context;
    let mut specs = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed.wrapping_add(i as u64));
        let target_side = 24usize;
        // the default search crop radius is context * sqrt(w*h) / 2; a
        // diagonal jump of 1.5x that radius leaves the default crop but stays
        // within the sqrt(2)-enlarged one
        let radius = search_context * target_side as f64 / 2.0;
        let magnitude = 1.5 * radius;
        let component = magnitude / std::f64::consts::SQRT_2;
        let sign_x = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let sign_y = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let velocity_x = rng.gen_range(-0.2..0.2);
        let velocity_y = rng.gen_range(-0.2..0.2);

        let frame_count = 100usize;
        let jump_frame = 50usize;
        let width = 200usize;
        let height = 160usize;
        // start opposite the jump so the whole trajectory stays in frame
        let cx = (width - target_side) as f64 / 2.0;
        let cy = (height - target_side) as f64 / 2.0;
        let start_x = cx - sign_x * (component / 2.0 + 6.0) - velocity_x * frame_count as f64 / 2.0;
        let start_y = cy - sign_y * (component / 2.0 + 6.0) - velocity_y * frame_count as f64 / 2.0;

        specs.push(SynthSpec {
            frame_count,
            width,
            height,
            target_side,
            target_seed: master_seed.wrapping_mul(31).wrapping_add(i as u64),
            background_seed: master_seed.wrapping_mul(67).wrapping_add(1000 + i as u64),
            start_x,
            start_y,
            velocity_x,
            velocity_y,
            jump_events: vec![JumpEvent {
                frame: jump_frame,
                dx: sign_x * component,
                dy: sign_y * component,
            }],
            occlusion_events: Vec::new(),
            gamma_events: Vec::new(),
            noise_sigma: 0.01,
            seed: master_seed.wrapping_mul(101).wrapping_add(i as u64),
        });
    }
    specs
}
