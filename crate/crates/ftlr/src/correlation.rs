//! Valid-mode zero-mean normalized cross-correlation with an FFT numerator.
//! Wraparound is avoided by zero-padding to at least the search size, so the
//! response never contains circular-aliasing peaks. Per-window sums come from
//! summed-area tables. Everything runs in f64 with fixed summation order, so
//! results are bit-identical regardless of thread count.

use crate::features::FeatureMap;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("channel count mismatch: template {template} vs search {search}")]
    ChannelMismatch { template: usize, search: usize },
    #[error("template ({th}x{tw}) must be strictly smaller than search ({sh}x{sw})")]
    TemplateTooLarge {
        th: usize,
        tw: usize,
        sh: usize,
        sw: usize,
    },
    #[error("motion window strength {0} outside [0,1]")]
    BadStrength(f64),
}

/// Multi-channel f64 grid used by the correlation engine (channel-minor).
#[derive(Debug, Clone)]
pub struct Grid {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn from_f32(height: usize, width: usize, channels: usize, values: &[f32]) -> Self {
        Self {
            height,
            width,
            channels,
            values: values.iter().map(|&v| f64::from(v)).collect(),
        }
    }

    pub fn from_feature_map(map: &FeatureMap) -> Self {
        Self::from_f32(map.height, map.width, map.channels, &map.values)
    }

    fn channel_plane(&self, ch: usize) -> Vec<f64> {
        let n = self.height * self.width;
        let mut plane = Vec::with_capacity(n);
        for i in 0..n {
            plane.push(self.values[i * self.channels + ch]);
        }
        plane
    }
}

/// Correlation surface over all valid template placements. The cell at
/// `center` corresponds to zero displacement (template centered in search).
#[derive(Debug, Clone)]
pub struct ResponseMap {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
    pub center: (usize, usize),
}

impl ResponseMap {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// First global maximum in row-major order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0usize;
        for i in 1..self.values.len() {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        (best / self.width, best % self.width)
    }

    /// Displacement `(dx, dy)` of a cell from the zero-displacement center.
    pub fn displacement_of(&self, row: usize, col: usize) -> (i64, i64) {
        (
            col as i64 - self.center.1 as i64,
            row as i64 - self.center.0 as i64,
        )
    }
}

/// Cross-correlates a template feature map against a search feature map:
/// per-channel ZNCC summed over channels and renormalized by channel count,
/// so values stay within `[-1, 1]` up to rounding.
pub fn cross_correlate(
    template: &FeatureMap,
    search: &FeatureMap,
) -> Result<ResponseMap, CorrelationError> {
    if template.channels != search.channels {
        return Err(CorrelationError::ChannelMismatch {
            template: template.channels,
            search: search.channels,
        });
    }
    if template.height >= search.height || template.width >= search.width {
        return Err(CorrelationError::TemplateTooLarge {
            th: template.height,
            tw: template.width,
            sh: search.height,
            sw: search.width,
        });
    }
    Ok(zncc_engine(
        &Grid::from_feature_map(template),
        &Grid::from_feature_map(search),
        true,
    ))
}

// Relative variance floor: windows whose centered energy is this small next
// to their raw energy are treated as constant (the difference is cancellation
// noise at f64 scale, not signal).
const VAR_FLOOR: f64 = 1e-12;

/// Core ZNCC: per-channel zero-mean normalized correlation over all valid
/// placements, summed across channels. `normalize_by_channels` divides by the
/// channel count.
pub(crate) fn zncc_engine(template: &Grid, search: &Grid, normalize_by_channels: bool) -> ResponseMap {
    debug_assert_eq!(template.channels, search.channels);
    let (th, tw) = (template.height, template.width);
    let (sh, sw) = (search.height, search.width);
    let out_h = sh - th + 1;
    let out_w = sw - tw + 1;
    let n_cells = (th * tw) as f64;

    let mut acc = vec![0.0f64; out_h * out_w];
    for ch in 0..template.channels {
        let tplane = template.channel_plane(ch);
        let splane = search.channel_plane(ch);

        // zero-mean the template; its raw energy anchors the variance floor
        let tmean = tplane.iter().sum::<f64>() / n_cells;
        let traw: f64 = tplane.iter().map(|v| v * v).sum();
        let tzero: Vec<f64> = tplane.iter().map(|v| v - tmean).collect();
        let tnorm2: f64 = tzero.iter().map(|v| v * v).sum();
        if tnorm2 <= VAR_FLOOR * traw.max(1.0) {
            continue; // constant template: this channel contributes nothing
        }

        let numer = fft_valid_correlation(&tzero, th, tw, &splane, sh, sw);

        // per-window sums via summed-area tables
        let sat = Sat::build(&splane, sh, sw);
        let sat2 = Sat::build_squared(&splane, sh, sw);

        for r in 0..out_h {
            for c in 0..out_w {
                let wsum = sat.window(r, c, th, tw);
                let wraw = sat2.window(r, c, th, tw);
                let wvar = (wraw - wsum * wsum / n_cells).max(0.0);
                if wvar <= VAR_FLOOR * wraw.max(1.0) {
                    continue;
                }
                let den = (tnorm2 * wvar).sqrt();
                acc[r * out_w + c] += numer[r * out_w + c] / den;
            }
        }
    }

    if normalize_by_channels {
        let inv = 1.0 / template.channels as f64;
        for v in &mut acc {
            *v *= inv;
        }
    }

    ResponseMap {
        height: out_h,
        width: out_w,
        values: acc,
        center: ((out_h - 1) / 2, (out_w - 1) / 2),
    }
}

/// Blends a response with its Hann-windowed copy:
/// `(1-strength)*r + strength*(r*hann2d)`. Strength 0 is the identity.
pub fn apply_motion_window(
    response: &ResponseMap,
    strength: f64,
) -> Result<ResponseMap, CorrelationError> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(CorrelationError::BadStrength(strength));
    }
    if strength == 0.0 {
        return Ok(response.clone());
    }
    let hann = |i: usize, n: usize| -> f64 {
        if n < 2 {
            1.0
        } else {
            0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        }
    };
    let mut values = Vec::with_capacity(response.values.len());
    for r in 0..response.height {
        let hr = hann(r, response.height);
        for c in 0..response.width {
            let v = response.get(r, c);
            let w = hr * hann(c, response.width);
            values.push((1.0 - strength) * v + strength * v * w);
        }
    }
    Ok(ResponseMap {
        height: response.height,
        width: response.width,
        values,
        center: response.center,
    })
}

struct Sat {
    width: usize,
    table: Vec<f64>, // (h+1) x (w+1)
}

impl Sat {
    fn build(plane: &[f64], h: usize, w: usize) -> Self {
        Self::build_with(plane, h, w, |v| v)
    }

    fn build_squared(plane: &[f64], h: usize, w: usize) -> Self {
        Self::build_with(plane, h, w, |v| v * v)
    }

    fn build_with(plane: &[f64], h: usize, w: usize, f: impl Fn(f64) -> f64) -> Self {
        let tw = w + 1;
        let mut table = vec![0.0f64; (h + 1) * tw];
        for y in 0..h {
            let mut row_sum = 0.0f64;
            for x in 0..w {
                row_sum += f(plane[y * w + x]);
                table[(y + 1) * tw + (x + 1)] = table[y * tw + (x + 1)] + row_sum;
            }
        }
        Self { width: tw, table }
    }

    fn window(&self, top: usize, left: usize, h: usize, w: usize) -> f64 {
        let tw = self.width;
        self.table[(top + h) * tw + (left + w)] + self.table[top * tw + left]
            - self.table[top * tw + (left + w)]
            - self.table[(top + h) * tw + left]
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Valid-mode cross-correlation of `t` (zero-meaned template) against `s`:
/// `out[r][c] = sum_ij t[i][j] * s[r+i][c+j]`, computed in the frequency
/// domain with zero padding so no wraparound reaches the valid region.
fn fft_valid_correlation(
    t: &[f64],
    th: usize,
    tw: usize,
    s: &[f64],
    sh: usize,
    sw: usize,
) -> Vec<f64> {
    let ph = next_pow2(sh);
    let pw = next_pow2(sw);

    let mut tbuf = embed(t, th, tw, ph, pw);
    let mut sbuf = embed(s, sh, sw, ph, pw);
    fft2(&mut tbuf, ph, pw, false);
    fft2(&mut sbuf, ph, pw, false);

    // correlation theorem: IFFT(FFT(s) * conj(FFT(t)))
    for (sv, tv) in sbuf.iter_mut().zip(tbuf.iter()) {
        *sv *= tv.conj();
    }
    fft2(&mut sbuf, ph, pw, true);

    let scale = 1.0 / (ph * pw) as f64;
    let out_h = sh - th + 1;
    let out_w = sw - tw + 1;
    let mut out = Vec::with_capacity(out_h * out_w);
    for r in 0..out_h {
        for c in 0..out_w {
            out.push(sbuf[r * pw + c].re * scale);
        }
    }
    out
}

fn embed(plane: &[f64], h: usize, w: usize, ph: usize, pw: usize) -> Vec<Complex<f64>> {
    let mut buf = vec![Complex::new(0.0, 0.0); ph * pw];
    for y in 0..h {
        for x in 0..w {
            buf[y * pw + x].re = plane[y * w + x];
        }
    }
    buf
}

fn fft2(buf: &mut [Complex<f64>], h: usize, w: usize, inverse: bool) {
    let row_fft = plan(w, inverse);
    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = plan(h, inverse);
    let mut col = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }
}
