//! Image and geometry primitives shared by the whole pipeline: grayscale
//! frames, axis-aligned bounding boxes, square patches, and the two
//! trajectory metrics (IoU and center error).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("frame must be at least 1x1, got {width}x{height}")]
    DegenerateFrame { width: usize, height: usize },
    #[error("frame pixel count {got} does not match {width}x{height}")]
    PixelCountMismatch {
        width: usize,
        height: usize,
        got: usize,
    },
    #[error("frame intensity {value} at index {index} is outside [0,1]")]
    IntensityOutOfRange { index: usize, value: f32 },
    #[error("bounding box dimensions must be positive, got w={w} h={h}")]
    InvalidBox { w: f64, h: f64 },
    #[error("area factor must be >= 1, got {0}")]
    InvalidAreaFactor(f64),
    #[error("context scale must be > 0, got {0}")]
    InvalidContextScale(f64),
    #[error("patch side must be >= {min}, got {got}")]
    PatchTooSmall { min: usize, got: usize },
}

/// A grayscale video frame with intensities in `[0,1]`, row-major.
#[derive(Debug, Clone)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f32>,
    /// 1-based position within its sequence.
    pub index: usize,
}

impl Frame {
    pub fn new(
        width: usize,
        height: usize,
        pixels: Vec<f32>,
        index: usize,
    ) -> Result<Self, GeomError> {
        if width < 1 || height < 1 {
            return Err(GeomError::DegenerateFrame { width, height });
        }
        if pixels.len() != width * height {
            return Err(GeomError::PixelCountMismatch {
                width,
                height,
                got: pixels.len(),
            });
        }
        for (i, &v) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(GeomError::IntensityOutOfRange { index: i, value: v });
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
            index,
        })
    }

    /// Builds a frame from 8-bit intensities, normalizing by 255.
    pub fn from_luma8(width: usize, height: usize, bytes: &[u8], index: usize) -> Result<Self, GeomError> {
        let pixels = bytes.iter().map(|&b| f32::from(b) / 255.0).collect();
        Self::new(width, height, pixels, index)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    pub fn mean_intensity(&self) -> f32 {
        let sum: f64 = self.pixels.iter().map(|&v| f64::from(v)).sum();
        (sum / self.pixels.len() as f64) as f32
    }
}

/// Axis-aligned object hypothesis in frame pixels. `x`/`y` are the top-left
/// corner; the box may extend outside the frame (cropping pads).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeomError> {
        if !(w > 0.0) || !(h > 0.0) || !w.is_finite() || !h.is_finite() {
            return Err(GeomError::InvalidBox { w, h });
        }
        Ok(Self { x, y, w, h })
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn with_center(&self, cx: f64, cy: f64) -> Self {
        Self {
            x: cx - self.w / 2.0,
            y: cy - self.h / 2.0,
            w: self.w,
            h: self.h,
        }
    }
}

/// A square crop, resampled to a fixed side, remembering the frame region it
/// covers. `source_box.w / side` converts cell displacements back to frame
/// pixels.
#[derive(Debug, Clone)]
pub struct Patch {
    pub pixels: Vec<f32>,
    pub side: usize,
    pub source_box: BoundingBox,
}

impl Patch {
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.side + x]
    }

    /// Frame pixels per patch cell.
    pub fn scale(&self) -> f64 {
        self.source_box.w / self.side as f64
    }
}

/// Crops a square region centered on `center_box`, covering a source side of
/// `context_scale * sqrt(w*h) * sqrt(area_factor)` frame pixels, and resamples
/// it to `out_side` by bilinear interpolation. Pixels outside the frame read
/// as the frame's mean intensity, so the padding carries no structure of its
/// own. The `sqrt(area_factor)` law makes `area_factor = 2` double the covered
/// area rather than the side.
pub fn crop_patch(
    frame: &Frame,
    center_box: &BoundingBox,
    area_factor: f64,
    out_side: usize,
    context_scale: f64,
) -> Result<Patch, GeomError> {
    if !(center_box.w > 0.0) || !(center_box.h > 0.0) {
        return Err(GeomError::InvalidBox {
            w: center_box.w,
            h: center_box.h,
        });
    }
    if !(area_factor >= 1.0) {
        return Err(GeomError::InvalidAreaFactor(area_factor));
    }
    if !(context_scale > 0.0) {
        return Err(GeomError::InvalidContextScale(context_scale));
    }
    if out_side < 8 {
        return Err(GeomError::PatchTooSmall {
            min: 8,
            got: out_side,
        });
    }

    let source_side = context_scale * (center_box.w * center_box.h).sqrt() * area_factor.sqrt();
    let (cx, cy) = center_box.center();
    let x0 = cx - source_side / 2.0;
    let y0 = cy - source_side / 2.0;
    let step = source_side / out_side as f64;
    let pad = frame.mean_intensity();

    let mut pixels = Vec::with_capacity(out_side * out_side);
    for row in 0..out_side {
        // Pixel centers: frame pixel (px, py) sits at (px + 0.5, py + 0.5).
        let sy = y0 + (row as f64 + 0.5) * step - 0.5;
        for col in 0..out_side {
            let sx = x0 + (col as f64 + 0.5) * step - 0.5;
            pixels.push(bilinear(frame, sx, sy, pad));
        }
    }

    Ok(Patch {
        pixels,
        side: out_side,
        source_box: BoundingBox {
            x: x0,
            y: y0,
            w: source_side,
            h: source_side,
        },
    })
}

fn bilinear(frame: &Frame, x: f64, y: f64, pad: f32) -> f32 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = (x - x0) as f32;
    let fy = (y - y0) as f32;
    let sample = |ix: i64, iy: i64| -> f32 {
        if ix < 0 || iy < 0 || ix >= frame.width() as i64 || iy >= frame.height() as i64 {
            pad
        } else {
            frame.get(ix as usize, iy as usize)
        }
    };
    let ix = x0 as i64;
    let iy = y0 as i64;
    let top = sample(ix, iy) * (1.0 - fx) + sample(ix + 1, iy) * fx;
    let bot = sample(ix, iy + 1) * (1.0 - fx) + sample(ix + 1, iy + 1) * fx;
    top * (1.0 - fy) + bot * fy
}

/// Intersection-over-union of two boxes; 0 when disjoint. All areas come
/// from the same rounded corner coordinates, so identical boxes score
/// exactly 1.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax2, ay2) = (a.x + a.w, a.y + a.h);
    let (bx2, by2) = (b.x + b.w, b.y + b.h);
    let ix = ax2.min(bx2) - a.x.max(b.x);
    let iy = ay2.min(by2) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    let union = (ax2 - a.x) * (ay2 - a.y) + (bx2 - b.x) * (by2 - b.y) - inter;
    inter / union
}

/// Euclidean distance between box centers, in pixels.
pub fn center_error(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
}
