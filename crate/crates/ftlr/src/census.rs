//! Census transform backup matching. Each pixel gets an 8-bit code recording
//! which of its eight neighbors is strictly darker; codes are invariant to any
//! strictly increasing intensity change, which is what makes the backup
//! matcher robust exactly when the appearance model has gone stale.

use crate::correlation::{zncc_engine, Grid};
use crate::geom::Patch;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census transform needs at least a 3x3 image, got {side}x{side}")]
    ImageTooSmall { side: usize },
    #[error("census template ({th}x{tw}) must be strictly smaller than search ({sh}x{sw})")]
    TemplateTooLarge {
        th: usize,
        tw: usize,
        sh: usize,
        sw: usize,
    },
}

/// Per-pixel 8-bit census codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusImage {
    pub height: usize,
    pub width: usize,
    pub codes: Vec<u8>,
}

/// Census codes expanded into 4 decimal channels by repeated 2-bit left
/// rotation, stored channel-minor in `[0,255]`.
#[derive(Debug, Clone)]
pub struct CensusChannels {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f32>,
}

impl CensusChannels {
    pub fn get(&self, x: usize, y: usize, ch: usize) -> f32 {
        self.values[(y * self.width + x) * 4 + ch]
    }
}

// Neighbor order is row-major over the 3x3 window, center excluded; the first
// (top-left) neighbor lands in the most significant bit.
const NEIGHBORS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

pub fn census_transform(image: &Patch) -> Result<CensusImage, CensusError> {
    census_transform_counted(image).map(|(img, _)| img)
}

/// Same as [`census_transform`] but also reports the number of pixel
/// comparisons performed, which is exactly `8 * width * height`.
pub fn census_transform_counted(image: &Patch) -> Result<(CensusImage, u64), CensusError> {
    let side = image.side;
    if side < 3 {
        return Err(CensusError::ImageTooSmall { side });
    }
    let mut codes = Vec::with_capacity(side * side);
    let mut comparisons = 0u64;
    let clamp = |v: i64| -> usize { v.clamp(0, side as i64 - 1) as usize };
    for y in 0..side {
        for x in 0..side {
            let center = image.get(x, y);
            let mut code = 0u8;
            for (bit, (dx, dy)) in NEIGHBORS.iter().enumerate() {
                // replicate padding at borders
                let nx = clamp(x as i64 + dx);
                let ny = clamp(y as i64 + dy);
                comparisons += 1;
                if image.get(nx, ny) < center {
                    code |= 1 << (7 - bit);
                }
            }
            codes.push(code);
        }
    }
    Ok((
        CensusImage {
            height: side,
            width: side,
            codes,
        },
        comparisons,
    ))
}

/// Expands each code `b` into the channel tuple
/// `(b, rotl2(b), rotl4(b), rotl6(b))`.
pub fn rotate_expand(census: &CensusImage) -> CensusChannels {
    let mut values = Vec::with_capacity(census.codes.len() * 4);
    for &code in &census.codes {
        values.push(f32::from(code));
        values.push(f32::from(code.rotate_left(2)));
        values.push(f32::from(code.rotate_left(4)));
        values.push(f32::from(code.rotate_left(6)));
    }
    CensusChannels {
        height: census.height,
        width: census.width,
        values,
    }
}

/// Correlates census channels of a template against a search window (valid
/// mode, zero-mean normalized per channel, summed over the 4 channels) and
/// returns the displacement of the peak from the search center together with
/// the peak score. Ties prefer the smallest displacement magnitude, then
/// row-major order.
pub fn census_backup_match(
    template: &CensusChannels,
    search: &CensusChannels,
) -> Result<((i64, i64), f64), CensusError> {
    if template.height >= search.height || template.width >= search.width {
        return Err(CensusError::TemplateTooLarge {
            th: template.height,
            tw: template.width,
            sh: search.height,
            sw: search.width,
        });
    }
    let tgrid = Grid::from_f32(template.height, template.width, 4, &template.values);
    let sgrid = Grid::from_f32(search.height, search.width, 4, &search.values);
    let resp = zncc_engine(&tgrid, &sgrid, false);

    let center_row = (resp.height - 1) / 2;
    let center_col = (resp.width - 1) / 2;
    let mut best_val = f64::NEG_INFINITY;
    let mut best_mag = i64::MAX;
    let mut best = (0i64, 0i64);
    for r in 0..resp.height {
        for c in 0..resp.width {
            let v = resp.values[r * resp.width + c];
            let dx = c as i64 - center_col as i64;
            let dy = r as i64 - center_row as i64;
            let mag = dx * dx + dy * dy;
            if v > best_val || (v == best_val && mag < best_mag) {
                best_val = v;
                best_mag = mag;
                best = (dx, dy);
            }
        }
    }
    Ok((best, best_val))
}

/// Dumps the code grid as a binary 8-bit PGM for eyeballing in any image
/// viewer.
pub fn write_pgm(census: &CensusImage, w: &mut impl Write) -> io::Result<()> {
    write!(w, "P5\n{} {}\n255\n", census.width, census.height)?;
    w.write_all(&census.codes)
}
