//! Confidence machinery: the response surface is max-projected onto its two
//! coordinate planes, the profiles are double-differenced to find local
//! maxima, and the two dominant peaks feed a nearest-neighbour distance
//! ratio decision. The global argmax is always kept as a candidate, because a
//! peak whose row or column maximum is shadowed by the other peak can vanish
//! from the projections.

use crate::correlation::ResponseMap;
use std::collections::BTreeSet;

/// The two dominant peaks of a response surface. `p2` is absent when no
/// second candidate lies at least `min_separation` cells away from `p1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakPair {
    pub p1_pos: (usize, usize),
    pub p1_val: f64,
    pub p2_pos: Option<(usize, usize)>,
    pub p2_val: Option<f64>,
}

/// Outcome of the NNDR gate. `degenerate` marks responses whose top peak is
/// not even positive; those are treated as ambiguous regardless of the ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceDecision {
    pub confident: bool,
    pub ratio: f64,
    pub threshold: f64,
    pub degenerate: bool,
}

/// Max-projects the surface onto the two coordinate planes:
/// `x_profile[c] = max over rows`, `y_profile[r] = max over columns`.
pub fn project_profiles(response: &ResponseMap) -> (Vec<f64>, Vec<f64>) {
    let mut x_profile = vec![f64::NEG_INFINITY; response.width];
    let mut y_profile = vec![f64::NEG_INFINITY; response.height];
    for (r, row_max) in y_profile.iter_mut().enumerate() {
        for (c, col_max) in x_profile.iter_mut().enumerate() {
            let v = response.get(r, c);
            if v > *col_max {
                *col_max = v;
            }
            if v > *row_max {
                *row_max = v;
            }
        }
    }
    (x_profile, y_profile)
}

/// Interior local maxima of a 1D profile via discrete differentiation: the
/// first difference turns from positive to non-positive and the second
/// difference is negative. Plateaus report their leftmost cell; endpoints are
/// excluded.
pub fn find_profile_maxima(profile: &[f64]) -> Vec<usize> {
    let n = profile.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    for i in 1..n - 1 {
        let rising = profile[i] - profile[i - 1] > 0.0;
        let falling = profile[i + 1] - profile[i] <= 0.0;
        let curvature = profile[i + 1] - 2.0 * profile[i] + profile[i - 1];
        if rising && falling && curvature < 0.0 {
            out.push(i);
        }
    }
    out
}

/// Selects the two dominant peaks: candidates are the cross product of the
/// profile maxima plus the global argmax, scored by their response value.
pub fn top_two_peaks(response: &ResponseMap, min_separation: usize) -> PeakPair {
    let (x_profile, y_profile) = project_profiles(response);
    let x_maxima = find_profile_maxima(&x_profile);
    let y_maxima = find_profile_maxima(&y_profile);

    let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &r in &y_maxima {
        for &c in &x_maxima {
            candidates.insert((r, c));
        }
    }
    candidates.insert(response.argmax());

    // P1: highest value, row-major on ties; matches argmax by construction.
    let p1_pos = *candidates
        .iter()
        .max_by(|a, b| {
            let va = response.get(a.0, a.1);
            let vb = response.get(b.0, b.1);
            va.partial_cmp(&vb)
                .unwrap()
                .then_with(|| b.cmp(a)) // prefer the row-major earlier cell
        })
        .expect("argmax always present");
    let p1_val = response.get(p1_pos.0, p1_pos.1);

    let min_sep2 = (min_separation * min_separation) as i64;
    let far_enough = |pos: &(usize, usize)| {
        let dr = pos.0 as i64 - p1_pos.0 as i64;
        let dc = pos.1 as i64 - p1_pos.1 as i64;
        dr * dr + dc * dc >= min_sep2
    };
    let p2_pos = candidates
        .iter()
        .filter(|pos| far_enough(pos))
        .max_by(|a, b| {
            let va = response.get(a.0, a.1);
            let vb = response.get(b.0, b.1);
            va.partial_cmp(&vb).unwrap().then_with(|| b.cmp(a))
        })
        .copied();

    PeakPair {
        p1_pos,
        p1_val,
        p2_pos,
        p2_val: p2_pos.map(|(r, c)| response.get(r, c)),
    }
}

/// Thresholds the peak ratio. The ratio is `p1/p2`, or infinite when no
/// meaningful second peak exists; a non-positive top peak makes the whole
/// response junk and the decision ambiguous by fiat.
pub fn nndr_decision(pair: &PeakPair, threshold: f64) -> ConfidenceDecision {
    if pair.p1_val <= 0.0 {
        return ConfidenceDecision {
            confident: false,
            ratio: 0.0,
            threshold,
            degenerate: true,
        };
    }
    let ratio = match pair.p2_val {
        Some(p2) if p2 > 0.0 => pair.p1_val / p2,
        _ => f64::INFINITY,
    };
    ConfidenceDecision {
        confident: ratio > threshold,
        ratio,
        threshold,
        degenerate: false,
    }
}
