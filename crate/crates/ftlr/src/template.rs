//! Running-average query model. Two update rules are supported: a plain
//! exponential running average, and a smooth average whose early blend weight
//! carries an extra `0.5/m` term so the model bootstraps from many initial
//! frames instead of being dominated by the first one. The per-step blend
//! coefficients differ by exactly `0.5/m`, so the rules converge as the
//! stream grows.

use crate::features::{read_feature_map, write_feature_map, FeatureError, FeatureMap};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("alpha must lie in (0, 0.5), got {0}")]
    BadAlpha(f64),
    #[error("update shape {gh}x{gw}x{gc} does not match model {mh}x{mw}x{mc}")]
    ShapeMismatch {
        mh: usize,
        mw: usize,
        mc: usize,
        gh: usize,
        gw: usize,
        gc: usize,
    },
    #[error("feature values must be finite")]
    NonFinite,
}

/// Which running-average formula drives accepted updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateRule {
    /// `Q_n = (1-a) Q_{n-1} + a F_n`
    Simple,
    /// `Q_n = (1 - 0.5/n - a) Q_{n-1} + (0.5/n + a) F_n`
    Smooth,
}

/// The template the tracker correlates against, together with the count of
/// accepted updates. `n` advances only when an update is actually applied;
/// frames rejected by the confidence gate leave both the map and `n` alone.
#[derive(Debug, Clone)]
pub struct QueryModel {
    map: FeatureMap,
    n: u64,
    alpha: f64,
}

impl QueryModel {
    /// `Q_1 = F_1` for both update rules; the smooth rule has no consistent
    /// reading at n=1, so initialization is shared.
    pub fn init(first: FeatureMap, alpha: f64) -> Result<Self, TemplateError> {
        check_alpha(alpha)?;
        Ok(Self {
            map: first,
            n: 1,
            alpha,
        })
    }

    /// Rebuilds a model mid-sequence from a dumped map and its bookkeeping.
    pub fn resume(map: FeatureMap, alpha: f64, n: u64) -> Result<Self, TemplateError> {
        check_alpha(alpha)?;
        Ok(Self {
            map,
            n: n.max(1),
            alpha,
        })
    }

    pub fn map(&self) -> &FeatureMap {
        &self.map
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Blend coefficient the next accepted update would use.
    pub fn next_coefficient(&self, rule: UpdateRule) -> f64 {
        let m = self.n + 1;
        match rule {
            UpdateRule::Simple => self.alpha,
            UpdateRule::Smooth => 0.5 / m as f64 + self.alpha,
        }
    }

    pub fn update(&mut self, incoming: &FeatureMap, rule: UpdateRule) -> Result<(), TemplateError> {
        if !self.map.same_shape(incoming) {
            return Err(TemplateError::ShapeMismatch {
                mh: self.map.height,
                mw: self.map.width,
                mc: self.map.channels,
                gh: incoming.height,
                gw: incoming.width,
                gc: incoming.channels,
            });
        }
        if incoming.values.iter().any(|v| !v.is_finite()) {
            return Err(TemplateError::NonFinite);
        }
        let coef = self.next_coefficient(rule) as f32;
        debug_assert!(
            (0.0..=1.0).contains(&coef),
            "blend coefficient {coef} escaped [0,1]"
        );
        for (q, &f) in self.map.values.iter_mut().zip(incoming.values.iter()) {
            *q = blend(*q, f, coef);
        }
        self.n += 1;
        Ok(())
    }

    pub fn update_simple(&mut self, incoming: &FeatureMap) -> Result<(), TemplateError> {
        self.update(incoming, UpdateRule::Simple)
    }

    pub fn update_smooth(&mut self, incoming: &FeatureMap) -> Result<(), TemplateError> {
        self.update(incoming, UpdateRule::Smooth)
    }

    /// Dumps the current map in the shared binary feature-map format, for
    /// reproducible mid-sequence restarts via [`QueryModel::resume`].
    pub fn write_map_to(&self, w: &mut impl Write) -> Result<(), FeatureError> {
        write_feature_map(w, &self.map)
    }

    pub fn read_map_from(r: &mut impl Read) -> Result<FeatureMap, FeatureError> {
        read_feature_map(r)
    }
}

/// Convex blend `(1-coef)*q + coef*f`, computed as `q + coef*(f-q)` so equal
/// inputs are exact fixed points, then clamped to the hull of its inputs so
/// the convexity bound holds even at the last ulp.
fn blend(q: f32, f: f32, coef: f32) -> f32 {
    let v = q + coef * (f - q);
    v.clamp(q.min(f), q.max(f))
}

fn check_alpha(alpha: f64) -> Result<(), TemplateError> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(TemplateError::BadAlpha(alpha));
    }
    Ok(())
}
