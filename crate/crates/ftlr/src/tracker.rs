//! The per-frame tracking state machine. Every frame is located by
//! correlating the query model against a search crop; the peak ratio then
//! gates what happens next. A confident frame follows the top peak, updates
//! the running average, and keeps the default search area. An ambiguous frame
//! freezes the model, enlarges the next search area, and updates the box
//! through the selected failure action (hold, extrapolate, census backup, or
//! ground truth).

use crate::census::{census_backup_match, census_transform, rotate_expand, CensusError};
use crate::correlation::{apply_motion_window, cross_correlate, CorrelationError};
use crate::features::{extractor_by_name, FeatureError, FeatureExtractor};
use crate::geom::{crop_patch, BoundingBox, Frame, GeomError};
use crate::peaks::{nndr_decision, top_two_peaks, ConfidenceDecision, PeakPair};
use crate::template::{QueryModel, TemplateError, UpdateRule};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("invalid config: {field}: {message}")]
    InvalidConfig {
        field: &'static str,
        message: String,
    },
    #[error("variant ftlr_gt needs a ground-truth box for every frame")]
    MissingGroundTruth,
    #[error("ground truth has {got} boxes for {expected} frames")]
    GroundTruthMisaligned { expected: usize, got: usize },
    #[error("a sequence needs at least 2 frames, got {0}")]
    SequenceTooShort(usize),
}

/// Failure-mode behavior. Names follow the config/CLI spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// No gate at all: always follow the top peak and always update.
    Baseline,
    /// Hold the box until confidence returns.
    Ftlr0,
    /// Extrapolate the center linearly from the last two centers.
    Ftlr1,
    /// Census backup matching, simple running average.
    Ftlr,
    /// Census backup matching, smooth running average.
    FtlrSa,
    /// Oracle backup: ground truth replaces the box on ambiguous frames.
    FtlrGt,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Ftlr0 => "ftlr_0",
            Variant::Ftlr1 => "ftlr_1",
            Variant::Ftlr => "ftlr",
            Variant::FtlrSa => "ftlr_sa",
            Variant::FtlrGt => "ftlr_gt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "baseline" => Some(Variant::Baseline),
            "ftlr_0" => Some(Variant::Ftlr0),
            "ftlr_1" => Some(Variant::Ftlr1),
            "ftlr" => Some(Variant::Ftlr),
            "ftlr_sa" => Some(Variant::FtlrSa),
            "ftlr_gt" => Some(Variant::FtlrGt),
            _ => None,
        }
    }

    pub const ALL: [Variant; 6] = [
        Variant::Baseline,
        Variant::Ftlr0,
        Variant::Ftlr1,
        Variant::Ftlr,
        Variant::FtlrSa,
        Variant::FtlrGt,
    ];

    /// `ftlr` and `ftlr_sa` pin their update rule; the others leave it to the
    /// configuration.
    fn forced_rule(&self) -> Option<UpdateRule> {
        match self {
            Variant::Ftlr => Some(UpdateRule::Simple),
            Variant::FtlrSa => Some(UpdateRule::Smooth),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub nndr_threshold: f64,
    pub alpha: f64,
    pub default_area_factor: f64,
    pub failure_area_multiplier: f64,
    pub variant: Variant,
    pub update_rule: UpdateRule,
    pub extractor: String,
    pub min_separation: usize,
    pub motion_window_strength: f64,
    /// Minimum summed census correlation for the backup displacement to be
    /// trusted; below it the box holds. A genuine re-match of the previous
    /// frame's appearance scores near the channel count, placement noise
    /// scores well under 1.
    pub census_min_score: f64,
    /// Grow the search resize side by sqrt(area_factor/default) so the pixel
    /// scale of an enlarged search stays matched to the template. With a
    /// fixed resize side, doubling the area shrinks the target by sqrt(2) in
    /// the crop and the correlation peak collapses right when recovery
    /// depends on it.
    pub scale_compensated_search: bool,
    pub template_side: usize,
    pub search_side: usize,
    pub template_context: f64,
    pub search_context: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            nndr_threshold: 1.2,
            alpha: 0.005,
            default_area_factor: 1.0,
            failure_area_multiplier: 2.0,
            variant: Variant::FtlrSa,
            update_rule: UpdateRule::Smooth,
            extractor: "grayscale".to_string(),
            min_separation: 3,
            motion_window_strength: 0.0,
            census_min_score: 1.0,
            scale_compensated_search: true,
            template_side: 64,
            search_side: 128,
            template_context: 1.0,
            search_context: 2.0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), TrackerError> {
        let fail = |field: &'static str, message: String| -> Result<(), TrackerError> {
            Err(TrackerError::InvalidConfig { field, message })
        };
        if !(self.nndr_threshold > 1.0) {
            return fail("nndr_threshold", format!("must be > 1, got {}", self.nndr_threshold));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return fail("alpha", format!("must lie in (0, 0.5), got {}", self.alpha));
        }
        if !(self.default_area_factor >= 1.0) {
            return fail(
                "default_area_factor",
                format!("must be >= 1, got {}", self.default_area_factor),
            );
        }
        if !(self.failure_area_multiplier >= 1.0) {
            return fail(
                "failure_area_multiplier",
                format!("must be >= 1, got {}", self.failure_area_multiplier),
            );
        }
        if self.min_separation < 1 {
            return fail("min_separation", "must be >= 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.motion_window_strength) {
            return fail(
                "motion_window_strength",
                format!("must lie in [0,1], got {}", self.motion_window_strength),
            );
        }
        if !self.census_min_score.is_finite() {
            return fail(
                "census_min_score",
                format!("must be finite, got {}", self.census_min_score),
            );
        }
        if self.template_side < 8 || self.search_side < 8 {
            return fail("template_side", "patch sides must be >= 8".to_string());
        }
        if self.template_side >= self.search_side {
            return fail(
                "search_side",
                format!(
                    "search side {} must exceed template side {}",
                    self.search_side, self.template_side
                ),
            );
        }
        if !(self.template_context > 0.0) || !(self.search_context > 0.0) {
            return fail("template_context", "context scales must be > 0".to_string());
        }
        extractor_by_name(&self.extractor)?;
        Ok(())
    }

    /// The rule actually applied on confident frames, after variant forcing.
    pub fn effective_update_rule(&self) -> UpdateRule {
        self.variant.forced_rule().unwrap_or(self.update_rule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Normal,
    Failure,
}

/// Mutable per-sequence state. For the gated variants `area_factor` is a
/// two-state automaton: the default after a confident step, `multiplier *
/// default` after an ambiguous one. The baseline ignores the gate and keeps
/// the default forever.
#[derive(Debug)]
pub struct TrackerState {
    pub current_box: BoundingBox,
    pub previous_box: BoundingBox,
    pub area_factor: f64,
    pub mode: Mode,
    pub model: QueryModel,
    pub frame_index: usize,
    prev_frame: Frame,
}

/// Everything a single step produced, for tracing and evaluation.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub bbox: BoundingBox,
    pub decision: ConfidenceDecision,
    pub used_backup: bool,
    pub peak_pair: PeakPair,
}

pub struct Tracker {
    config: TrackerConfig,
    extractor: Box<dyn FeatureExtractor>,
    state: TrackerState,
}

impl Tracker {
    /// Initializes from the first frame: crops the template at `b0`, extracts
    /// features, and seeds the query model with them.
    pub fn new(frame: &Frame, b0: BoundingBox, config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        let extractor = extractor_by_name(&config.extractor)?;
        let template = crop_patch(frame, &b0, 1.0, config.template_side, config.template_context)?;
        let first_map = extractor.extract(&template)?;
        let model = QueryModel::init(first_map, config.alpha)?;
        let state = TrackerState {
            current_box: b0,
            previous_box: b0,
            area_factor: config.default_area_factor,
            mode: Mode::Normal,
            model,
            frame_index: frame.index,
            prev_frame: frame.clone(),
        };
        Ok(Self {
            config,
            extractor,
            state,
        })
    }

    pub fn state(&self) -> &TrackerState {
        &self.state
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Advances one frame. `gt` is consulted only by the `ftlr_gt` variant.
    pub fn step(&mut self, frame: &Frame, gt: Option<&BoundingBox>) -> Result<StepOutcome, TrackerError> {
        self.step_traced(frame, gt).map(|(outcome, _)| outcome)
    }

    /// Like [`Tracker::step`] but also hands back the response surface the
    /// decision was made on, for debugging dumps.
    pub fn step_traced(
        &mut self,
        frame: &Frame,
        gt: Option<&BoundingBox>,
    ) -> Result<(StepOutcome, crate::correlation::ResponseMap), TrackerError> {
        let cfg = &self.config;
        if cfg.variant == Variant::FtlrGt && gt.is_none() {
            return Err(TrackerError::MissingGroundTruth);
        }

        let search = crop_patch(
            frame,
            &self.state.current_box,
            self.state.area_factor,
            self.search_out_side(),
            cfg.search_context,
        )?;
        let search_map = self.extractor.extract(&search)?;
        let response = cross_correlate(self.state.model.map(), &search_map)?;
        let response = apply_motion_window(&response, cfg.motion_window_strength)?;
        let pair = top_two_peaks(&response, cfg.min_separation);
        let decision = nndr_decision(&pair, cfg.nndr_threshold);

        let follow_peak = |state: &TrackerState| -> BoundingBox {
            let (dx_cells, dy_cells) = response.displacement_of(pair.p1_pos.0, pair.p1_pos.1);
            let scale = search.scale();
            let (cx, cy) = state.current_box.center();
            state
                .current_box
                .with_center(cx + dx_cells as f64 * scale, cy + dy_cells as f64 * scale)
        };

        let mut used_backup = false;
        let new_box;
        if cfg.variant == Variant::Baseline {
            // pure ungated behavior: the decision is recorded but ignored
            new_box = follow_peak(&self.state);
            let template = crop_patch(frame, &new_box, 1.0, cfg.template_side, cfg.template_context)?;
            let map = self.extractor.extract(&template)?;
            self.state.model.update(&map, cfg.effective_update_rule())?;
        } else if decision.confident {
            new_box = follow_peak(&self.state);
            let template = crop_patch(frame, &new_box, 1.0, cfg.template_side, cfg.template_context)?;
            let map = self.extractor.extract(&template)?;
            self.state.model.update(&map, cfg.effective_update_rule())?;
            self.state.area_factor = cfg.default_area_factor;
        } else {
            new_box = match cfg.variant {
                Variant::Ftlr0 => self.state.current_box,
                Variant::Ftlr1 => {
                    let (cx1, cy1) = self.state.current_box.center();
                    let (cx2, cy2) = self.state.previous_box.center();
                    self.state
                        .current_box
                        .with_center(2.0 * cx1 - cx2, 2.0 * cy1 - cy2)
                }
                Variant::Ftlr | Variant::FtlrSa => {
                    used_backup = true;
                    self.census_backup(frame)?
                }
                Variant::FtlrGt => {
                    used_backup = true;
                    *gt.expect("checked above")
                }
                Variant::Baseline => unreachable!(),
            };
            self.state.area_factor = cfg.failure_area_multiplier * cfg.default_area_factor;
        }

        self.state.mode = if decision.confident {
            Mode::Normal
        } else {
            Mode::Failure
        };
        self.state.previous_box = self.state.current_box;
        self.state.current_box = new_box;
        self.state.prev_frame = frame.clone();
        self.state.frame_index = frame.index;

        Ok((
            StepOutcome {
                bbox: new_box,
                decision,
                used_backup,
                peak_pair: pair,
            },
            response,
        ))
    }

    fn search_out_side(&self) -> usize {
        let cfg = &self.config;
        if cfg.scale_compensated_search {
            let growth = (self.state.area_factor / cfg.default_area_factor).sqrt();
            ((cfg.search_side as f64) * growth).round() as usize
        } else {
            cfg.search_side
        }
    }

    /// Census backup: the freshest uncontaminated evidence is the previous
    /// frame's appearance at the last reported box, matched against this
    /// frame's (possibly enlarged) search region at the same pixel scale.
    fn census_backup(&self, frame: &Frame) -> Result<BoundingBox, TrackerError> {
        let cfg = &self.config;
        let template_patch = crop_patch(
            &self.state.prev_frame,
            &self.state.current_box,
            1.0,
            cfg.template_side,
            cfg.template_context,
        )?;
        let span_ratio = cfg.search_context * self.state.area_factor.sqrt() / cfg.template_context;
        let search_side = (cfg.template_side as f64 * span_ratio).round() as usize;
        let search_patch = crop_patch(
            frame,
            &self.state.current_box,
            self.state.area_factor,
            search_side,
            cfg.search_context,
        )?;

        let template = rotate_expand(&census_transform(&template_patch)?);
        let search = rotate_expand(&census_transform(&search_patch)?);
        let ((dx_cells, dy_cells), score) = census_backup_match(&template, &search)?;
        if score < cfg.census_min_score {
            // nothing in the search region resembles the lost appearance;
            // moving on placement noise would only widen the loss
            return Ok(self.state.current_box);
        }

        let scale = search_patch.scale();
        let (cx, cy) = self.state.current_box.center();
        Ok(self
            .state
            .current_box
            .with_center(cx + dx_cells as f64 * scale, cy + dy_cells as f64 * scale))
    }
}

/// Result of tracking a whole sequence.
#[derive(Debug, Clone)]
pub struct SequenceRun {
    /// One box per frame; the first entry is the initial box.
    pub trajectory: Vec<BoundingBox>,
    /// One outcome per frame after the first.
    pub trace: Vec<StepOutcome>,
    /// Frames per second over compute time only (no decode, no disk).
    pub fps: f64,
}

/// Runs a tracker over decoded frames. `gt_track` must align with `frames`
/// and is mandatory for the `ftlr_gt` variant; other variants never read it.
pub fn run_sequence(
    frames: &[Frame],
    b0: BoundingBox,
    config: &TrackerConfig,
    gt_track: Option<&[BoundingBox]>,
) -> Result<SequenceRun, TrackerError> {
    if frames.len() < 2 {
        return Err(TrackerError::SequenceTooShort(frames.len()));
    }
    if let Some(gt) = gt_track {
        if gt.len() != frames.len() {
            return Err(TrackerError::GroundTruthMisaligned {
                expected: frames.len(),
                got: gt.len(),
            });
        }
    }
    if config.variant == Variant::FtlrGt && gt_track.is_none() {
        return Err(TrackerError::MissingGroundTruth);
    }

    let started = Instant::now();
    let mut tracker = Tracker::new(&frames[0], b0, config.clone())?;
    let mut trajectory = Vec::with_capacity(frames.len());
    let mut trace = Vec::with_capacity(frames.len() - 1);
    trajectory.push(b0);
    for (i, frame) in frames.iter().enumerate().skip(1) {
        let gt = gt_track.map(|g| &g[i]);
        let outcome = tracker.step(frame, gt)?;
        trajectory.push(outcome.bbox);
        trace.push(outcome);
    }
    let elapsed = started.elapsed().as_secs_f64();
    let fps = if elapsed > 0.0 {
        frames.len() as f64 / elapsed
    } else {
        f64::INFINITY
    };

    Ok(SequenceRun {
        trajectory,
        trace,
        fps,
    })
}
