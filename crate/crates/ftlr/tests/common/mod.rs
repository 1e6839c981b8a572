//! Independent reference implementations used as oracles. Everything here is
//! deliberately written the slow, obvious way — plain nested loops, no FFT,
//! no summed-area tables — so it shares no code path with the library.

#![allow(dead_code)]

use ftlr::correlation::ResponseMap;
use ftlr::features::FeatureMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_map(rng: &mut ChaCha8Rng, h: usize, w: usize, c: usize) -> FeatureMap {
    let values: Vec<f32> = (0..h * w * c).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FeatureMap::new(h, w, c, values).unwrap()
}

/// Brute-force valid-mode zero-mean normalized cross-correlation, channel by
/// channel, window statistics recomputed from scratch at every placement.
pub fn direct_zncc(template: &FeatureMap, search: &FeatureMap, normalize_by_channels: bool) -> Vec<f64> {
    assert_eq!(template.channels, search.channels);
    let (th, tw) = (template.height, template.width);
    let out_h = search.height - th + 1;
    let out_w = search.width - tw + 1;
    let n = (th * tw) as f64;
    let mut out = vec![0.0f64; out_h * out_w];

    for ch in 0..template.channels {
        let mut tvals = Vec::with_capacity(th * tw);
        for ty in 0..th {
            for tx in 0..tw {
                tvals.push(f64::from(template.get(tx, ty, ch)));
            }
        }
        let tmean = tvals.iter().sum::<f64>() / n;
        let traw: f64 = tvals.iter().map(|v| v * v).sum();
        let tnorm2: f64 = tvals.iter().map(|v| (v - tmean) * (v - tmean)).sum();
        if tnorm2 <= 1e-12 * traw.max(1.0) {
            continue;
        }
        for r in 0..out_h {
            for c in 0..out_w {
                let mut wsum = 0.0f64;
                let mut wraw = 0.0f64;
                let mut cross = 0.0f64;
                for ty in 0..th {
                    for tx in 0..tw {
                        let sv = f64::from(search.get(c + tx, r + ty, ch));
                        wsum += sv;
                        wraw += sv * sv;
                        cross += (tvals[ty * tw + tx] - tmean) * sv;
                    }
                }
                let wvar = (wraw - wsum * wsum / n).max(0.0);
                if wvar <= 1e-12 * wraw.max(1.0) {
                    continue;
                }
                out[r * out_w + c] += cross / (tnorm2 * wvar).sqrt();
            }
        }
    }
    if normalize_by_channels {
        for v in &mut out {
            *v /= template.channels as f64;
        }
    }
    out
}

/// All strict 8-neighborhood local maxima of a response surface, sorted by
/// value descending (ties row-major).
pub fn local_maxima_2d(resp: &ResponseMap) -> Vec<((usize, usize), f64)> {
    let mut out = Vec::new();
    for r in 0..resp.height {
        for c in 0..resp.width {
            let v = resp.get(r, c);
            let mut is_max = true;
            'outer: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let nr = r as i64 + dr;
                    let nc = c as i64 + dc;
                    if nr < 0 || nc < 0 || nr >= resp.height as i64 || nc >= resp.width as i64 {
                        continue;
                    }
                    if resp.get(nr as usize, nc as usize) >= v {
                        is_max = false;
                        break 'outer;
                    }
                }
            }
            if is_max {
                out.push(((r, c), v));
            }
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

/// Reference two-peak selection: global argmax plus the best strict 2D local
/// maximum at least `min_separation` away.
pub type ScoredPeak = ((usize, usize), f64);

pub fn brute_force_two_peaks(
    resp: &ResponseMap,
    min_separation: usize,
) -> (ScoredPeak, Option<ScoredPeak>) {
    let mut best = ((0usize, 0usize), f64::NEG_INFINITY);
    for r in 0..resp.height {
        for c in 0..resp.width {
            let v = resp.get(r, c);
            if v > best.1 {
                best = ((r, c), v);
            }
        }
    }
    let min_sep2 = (min_separation * min_separation) as i64;
    let second = local_maxima_2d(resp).into_iter().find(|((r, c), _)| {
        let dr = *r as i64 - best.0 .0 as i64;
        let dc = *c as i64 - best.0 .1 as i64;
        dr * dr + dc * dc >= min_sep2
    });
    (best, second)
}

/// Per-row / per-column max projection computed by a plain scan.
pub fn reference_profiles(resp: &ResponseMap) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..resp.width)
        .map(|c| {
            (0..resp.height)
                .map(|r| resp.get(r, c))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let y: Vec<f64> = (0..resp.height)
        .map(|r| {
            (0..resp.width)
                .map(|c| resp.get(r, c))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    (x, y)
}

/// Strict interior peaks by direct neighbor comparison.
pub fn reference_strict_peaks(profile: &[f64]) -> Vec<usize> {
    (1..profile.len().saturating_sub(1))
        .filter(|&i| profile[i] > profile[i - 1] && profile[i] > profile[i + 1])
        .collect()
}

/// Sum of planted 2D Gaussians as a response surface.
pub fn gaussian_response(h: usize, w: usize, peaks: &[(f64, f64, f64, f64)]) -> ResponseMap {
    let mut values = vec![0.0f64; h * w];
    for r in 0..h {
        for c in 0..w {
            for &(pr, pc, amp, sigma) in peaks {
                let d2 = (r as f64 - pr).powi(2) + (c as f64 - pc).powi(2);
                values[r * w + c] += amp * (-d2 / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    ResponseMap {
        height: h,
        width: w,
        values,
        center: ((h - 1) / 2, (w - 1) / 2),
    }
}

/// Scalar unrolling of the simple running average; returns the final value
/// starting from `q1` over the given stream.
pub fn scalar_simple(q1: f32, stream: &[f32], alpha: f32) -> f32 {
    let mut q = q1;
    for &f in stream {
        let v = q + alpha * (f - q);
        q = v.clamp(q.min(f), q.max(f));
    }
    q
}

/// Scalar unrolling of the smooth running average (incoming map index m
/// starts at 2).
pub fn scalar_smooth(q1: f32, stream: &[f32], alpha: f64) -> f32 {
    let mut q = q1;
    for (i, &f) in stream.iter().enumerate() {
        let m = (i + 2) as f64;
        let coef = (0.5 / m + alpha) as f32;
        let v = q + coef * (f - q);
        q = v.clamp(q.min(f), q.max(f));
    }
    q
}

/// Symbolic weight of the first map after `n` simple updates.
pub fn simple_first_frame_weight(alpha: f64, updates: usize) -> f64 {
    (1.0 - alpha).powi(updates as i32)
}

/// Symbolic weight of the first map after `n` smooth updates.
pub fn smooth_first_frame_weight(alpha: f64, updates: usize) -> f64 {
    let mut w = 1.0;
    for i in 0..updates {
        let m = (i + 2) as f64;
        w *= 1.0 - 0.5 / m - alpha;
    }
    w
}
