//! Benchmark harness: sequence ingestion in the OTB directory layout,
//! one-pass and temporal-robustness protocols, success/precision curves, and
//! throughput aggregation. Scoring is shared between the protocols, so a
//! single-segment TRE run reproduces OPE bit for bit.

use crate::geom::{center_error, iou, BoundingBox, Frame};
use crate::tracker::{run_sequence, TrackerConfig, TrackerError, Variant};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("io on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("image decode on {path}: {source}")]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{path}:{line}: cannot parse ground-truth line {text:?}")]
    GtParse {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("{dir}: {frames} frames but {boxes} ground-truth boxes")]
    CountMismatch {
        dir: PathBuf,
        frames: usize,
        boxes: usize,
    },
    #[error("{0}: no frames found under img/")]
    NoFrames(PathBuf),
    #[error("{0}: missing groundtruth_rect.txt")]
    NoGroundTruth(PathBuf),
    #[error("no sequences found under {0}")]
    NoSequences(PathBuf),
    #[error("tracker failed at frame {frame} of {sequence}: {source}")]
    Tracker {
        sequence: String,
        frame: usize,
        source: TrackerError,
    },
    #[error("cannot aggregate results from mixed protocols")]
    ProtocolMix,
    #[error("cannot aggregate an empty result list")]
    EmptyAggregate,
    #[error("sequence too short: {frames} frames leave no feasible segment")]
    NoFeasibleSegment { frames: usize },
    #[error("invalid bounding box in ground truth: {0}")]
    BadBox(#[from] crate::geom::GeomError),
}

/// A sequence on disk: ordered frame paths plus one ground-truth box per
/// frame.
#[derive(Debug, Clone)]
pub struct SequenceDataset {
    pub name: String,
    pub frame_paths: Vec<PathBuf>,
    pub gt_boxes: Vec<BoundingBox>,
    pub attributes: Vec<String>,
}

impl SequenceDataset {
    /// Decodes every frame up front so tracking time excludes image I/O.
    pub fn load_frames(&self) -> Result<Vec<Frame>, EvalError> {
        let mut frames = Vec::with_capacity(self.frame_paths.len());
        for (i, path) in self.frame_paths.iter().enumerate() {
            let img = image::open(path)
                .map_err(|e| EvalError::Image {
                    path: path.clone(),
                    source: e,
                })?
                .to_luma8();
            let frame = Frame::from_luma8(
                img.width() as usize,
                img.height() as usize,
                img.as_raw(),
                i + 1,
            )?;
            frames.push(frame);
        }
        Ok(frames)
    }
}

/// Loads a sequence directory: numbered frames under `img/`, boxes in
/// `groundtruth_rect.txt` (comma, tab, or whitespace separated; coordinates
/// 1-based on disk, converted to 0-based here).
pub fn load_otb_sequence(dir: &Path) -> Result<SequenceDataset, EvalError> {
    let img_dir = dir.join("img");
    let mut numbered: Vec<(u64, PathBuf)> = Vec::new();
    let entries = fs::read_dir(&img_dir).map_err(|e| EvalError::Io {
        path: img_dir.clone(),
        source: e,
    })?;
    for entry in entries {
        let entry = entry.map_err(|e| EvalError::Io {
            path: img_dir.clone(),
            source: e,
        })?;
        let path = entry.path();
        let ext = path
            .extension()
            .map(|e| e.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if !matches!(ext.as_str(), "png" | "jpg" | "jpeg" | "bmp") {
            continue;
        }
        let stem = path.file_stem().unwrap_or_default().to_string_lossy();
        let digits: String = stem.chars().filter(|c| c.is_ascii_digit()).collect();
        if let Ok(n) = digits.parse::<u64>() {
            numbered.push((n, path));
        }
    }
    if numbered.is_empty() {
        return Err(EvalError::NoFrames(dir.to_path_buf()));
    }
    numbered.sort();
    let frame_paths: Vec<PathBuf> = numbered.into_iter().map(|(_, p)| p).collect();

    let gt_path = dir.join("groundtruth_rect.txt");
    if !gt_path.exists() {
        return Err(EvalError::NoGroundTruth(dir.to_path_buf()));
    }
    let text = fs::read_to_string(&gt_path).map_err(|e| EvalError::Io {
        path: gt_path.clone(),
        source: e,
    })?;
    let mut gt_boxes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(|c: char| c == ',' || c == '\t' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .filter_map(|s| s.parse::<f64>().ok())
            .collect();
        if fields.len() != 4 {
            return Err(EvalError::GtParse {
                path: gt_path.clone(),
                line: i + 1,
                text: line.to_string(),
            });
        }
        gt_boxes.push(BoundingBox::new(
            fields[0] - 1.0,
            fields[1] - 1.0,
            fields[2],
            fields[3],
        )?);
    }
    if gt_boxes.len() != frame_paths.len() {
        return Err(EvalError::CountMismatch {
            dir: dir.to_path_buf(),
            frames: frame_paths.len(),
            boxes: gt_boxes.len(),
        });
    }

    let attributes = fs::read_to_string(dir.join("attributes.txt"))
        .map(|t| t.lines().map(|l| l.trim().to_string()).collect())
        .unwrap_or_default();

    Ok(SequenceDataset {
        name: dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sequence".to_string()),
        frame_paths,
        gt_boxes,
        attributes,
    })
}

/// Finds every subdirectory of `root` that loads as a sequence, sorted by
/// name.
pub fn discover_sequences(root: &Path) -> Result<Vec<SequenceDataset>, EvalError> {
    let mut out = Vec::new();
    let entries = fs::read_dir(root).map_err(|e| EvalError::Io {
        path: root.to_path_buf(),
        source: e,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && p.join("img").is_dir())
        .collect();
    dirs.sort();
    for dir in dirs {
        out.push(load_otb_sequence(&dir)?);
    }
    if out.is_empty() {
        return Err(EvalError::NoSequences(root.to_path_buf()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Ope,
    Tre,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Ope => "ope",
            Protocol::Tre => "tre",
        }
    }
}

pub const SUCCESS_THRESHOLDS: usize = 21;
pub const PRECISION_THRESHOLDS: usize = 51;

/// Scores for one protocol run over one sequence.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub protocol: Protocol,
    /// Fraction of frames with IoU strictly above `i * 0.05`, i = 0..=20.
    pub success_curve: Vec<f64>,
    /// Fraction of frames with center error at most `d` px, d = 0..=50.
    pub precision_curve: Vec<f64>,
    pub success_auc: f64,
    pub precision_at_20: f64,
    pub fps: f64,
    /// Frames scored (initialization frames are never scored).
    pub frames_scored: usize,
    /// Executed tracker runs (1 for OPE, up to `segments` for TRE).
    pub runs: usize,
    /// Segments skipped because the sequence was too short.
    pub skipped_segments: usize,
}

/// Per-frame (IoU, center error) pairs for a trajectory against ground
/// truth; the first frame of a run is the initialization and is skipped.
pub fn score_trajectory(trajectory: &[BoundingBox], gt: &[BoundingBox]) -> Vec<(f64, f64)> {
    trajectory
        .iter()
        .zip(gt.iter())
        .skip(1)
        .map(|(t, g)| (iou(t, g), center_error(t, g)))
        .collect()
}

/// Folds scored pairs into the success/precision curves.
pub fn curves_from_pairs(pairs: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let n = pairs.len().max(1) as f64;
    let success: Vec<f64> = (0..SUCCESS_THRESHOLDS)
        .map(|i| {
            let t = i as f64 * 0.05;
            pairs.iter().filter(|(overlap, _)| *overlap > t).count() as f64 / n
        })
        .collect();
    let precision: Vec<f64> = (0..PRECISION_THRESHOLDS)
        .map(|d| {
            let t = d as f64;
            pairs.iter().filter(|(_, ce)| *ce <= t).count() as f64 / n
        })
        .collect();
    (success, precision)
}

pub fn result_from_pairs(
    protocol: Protocol,
    pairs: &[(f64, f64)],
    fps: f64,
    runs: usize,
    skipped_segments: usize,
) -> EvalResult {
    let (success_curve, precision_curve) = curves_from_pairs(pairs);
    let success_auc = success_curve.iter().sum::<f64>() / success_curve.len() as f64;
    let precision_at_20 = precision_curve[20];
    EvalResult {
        protocol,
        success_curve,
        precision_curve,
        success_auc,
        precision_at_20,
        fps,
        frames_scored: pairs.len(),
        runs,
        skipped_segments,
    }
}

/// Scored pairs plus the elapsed compute seconds and covered frame count of
/// one run.
type RunScores = (Vec<(f64, f64)>, f64, usize);

fn run_from(
    dataset: &SequenceDataset,
    frames: &[Frame],
    config: &TrackerConfig,
    start: usize,
) -> Result<RunScores, EvalError> {
    let seg_frames = &frames[start..];
    let seg_gt = &dataset.gt_boxes[start..];
    let gt_arg = (config.variant == Variant::FtlrGt).then_some(seg_gt);
    let run = run_sequence(seg_frames, seg_gt[0], config, gt_arg).map_err(|e| EvalError::Tracker {
        sequence: dataset.name.clone(),
        frame: start + 1,
        source: e,
    })?;
    let pairs = score_trajectory(&run.trajectory, seg_gt);
    let elapsed = seg_frames.len() as f64 / run.fps;
    Ok((pairs, elapsed, seg_frames.len()))
}

/// One-pass evaluation: a single run initialized from the first ground-truth
/// box, scored over every subsequent frame.
pub fn run_ope(dataset: &SequenceDataset, config: &TrackerConfig) -> Result<EvalResult, EvalError> {
    let frames = dataset.load_frames()?;
    run_protocol(dataset, &frames, config, Protocol::Ope, &[0], 0)
}

/// Temporal robustness: the tracker restarts from `segments` evenly spaced
/// frames, each run scored to the end, all pairs pooled before the curves.
pub fn run_tre(
    dataset: &SequenceDataset,
    config: &TrackerConfig,
    segments: usize,
) -> Result<EvalResult, EvalError> {
    let frames = dataset.load_frames()?;
    run_tre_on_frames(dataset, &frames, config, segments)
}

/// TRE core, reusable when frames are already decoded.
pub fn run_tre_on_frames(
    dataset: &SequenceDataset,
    frames: &[Frame],
    config: &TrackerConfig,
    segments: usize,
) -> Result<EvalResult, EvalError> {
    let n = frames.len();
    let segments = segments.max(1);
    let mut starts: Vec<usize> = (0..segments)
        .map(|i| i * n.saturating_sub(1) / segments)
        .filter(|&s| s + 2 <= n)
        .collect();
    starts.dedup();
    let skipped = segments - starts.len();
    if starts.is_empty() {
        return Err(EvalError::NoFeasibleSegment { frames: n });
    }
    run_protocol(dataset, frames, config, Protocol::Tre, &starts, skipped)
}

/// OPE core, reusable when frames are already decoded.
pub fn run_ope_on_frames(
    dataset: &SequenceDataset,
    frames: &[Frame],
    config: &TrackerConfig,
) -> Result<EvalResult, EvalError> {
    run_protocol(dataset, frames, config, Protocol::Ope, &[0], 0)
}

fn run_protocol(
    dataset: &SequenceDataset,
    frames: &[Frame],
    config: &TrackerConfig,
    protocol: Protocol,
    starts: &[usize],
    skipped_segments: usize,
) -> Result<EvalResult, EvalError> {
    let mut pooled = Vec::new();
    let mut total_frames = 0usize;
    let mut total_elapsed = 0.0f64;
    for &start in starts {
        let (pairs, elapsed, frame_count) = run_from(dataset, frames, config, start)?;
        pooled.extend(pairs);
        total_elapsed += elapsed;
        total_frames += frame_count;
    }
    let fps = if total_elapsed > 0.0 {
        total_frames as f64 / total_elapsed
    } else {
        f64::INFINITY
    };
    Ok(result_from_pairs(
        protocol,
        &pooled,
        fps,
        starts.len(),
        skipped_segments,
    ))
}

/// One summary line: a sequence evaluated under one variant and protocol.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub sequence: String,
    pub variant: Variant,
    pub result: EvalResult,
}

/// Evaluates sequences in parallel (rayon decides scheduling; results are
/// folded in sequence-name order so worker count never changes the output).
pub fn evaluate_all(
    datasets: &[SequenceDataset],
    configs: &[TrackerConfig],
    protocol: Protocol,
    segments: usize,
) -> Result<Vec<SummaryRow>, EvalError> {
    let jobs: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..configs.len()).map(move |c| (d, c)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(d, c)| {
            let dataset = &datasets[d];
            let config = &configs[c];
            let result = match protocol {
                Protocol::Ope => run_ope(dataset, config)?,
                Protocol::Tre => run_tre(dataset, config, segments)?,
            };
            Ok(SummaryRow {
                sequence: dataset.name.clone(),
                variant: config.variant,
                result,
            })
        })
        .collect::<Result<Vec<SummaryRow>, EvalError>>()?;
    rows.sort_by(|a, b| {
        a.sequence
            .cmp(&b.sequence)
            .then_with(|| a.variant.as_str().cmp(b.variant.as_str()))
    });
    Ok(rows)
}

/// Mean scores across sequences, grouped by variant. Rows must share a
/// protocol.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub variant: Variant,
    pub protocol: Protocol,
    pub mean_success_auc: f64,
    pub mean_precision_at_20: f64,
    pub mean_fps: f64,
    pub sequences: usize,
}

pub fn aggregate_results(rows: &[SummaryRow]) -> Result<Vec<AggregateRow>, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyAggregate);
    }
    let protocol = rows[0].result.protocol;
    if rows.iter().any(|r| r.result.protocol != protocol) {
        return Err(EvalError::ProtocolMix);
    }
    let mut variants: Vec<Variant> = Vec::new();
    for row in rows {
        if !variants.contains(&row.variant) {
            variants.push(row.variant);
        }
    }
    variants.sort_by_key(|v| v.as_str());
    let mut out = Vec::new();
    for variant in variants {
        let group: Vec<&SummaryRow> = rows.iter().filter(|r| r.variant == variant).collect();
        let n = group.len() as f64;
        out.push(AggregateRow {
            variant,
            protocol,
            mean_success_auc: group.iter().map(|r| r.result.success_auc).sum::<f64>() / n,
            mean_precision_at_20: group.iter().map(|r| r.result.precision_at_20).sum::<f64>() / n,
            mean_fps: group.iter().map(|r| r.result.fps).sum::<f64>() / n,
            sequences: group.len(),
        });
    }
    Ok(out)
}

/// `summary.csv`: per-sequence rows followed by one `mean` row per variant.
pub fn summary_csv(rows: &[SummaryRow]) -> Result<String, EvalError> {
    let mut out = String::from("sequence,variant,protocol,success_auc,precision_at_20,fps\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.1}",
            r.sequence,
            r.variant.as_str(),
            r.result.protocol.as_str(),
            r.result.success_auc,
            r.result.precision_at_20,
            r.result.fps
        );
    }
    for a in aggregate_results(rows)? {
        let _ = writeln!(
            out,
            "mean,{},{},{},{},{:.1}",
            a.variant.as_str(),
            a.protocol.as_str(),
            a.mean_success_auc,
            a.mean_precision_at_20,
            a.mean_fps
        );
    }
    Ok(out)
}

/// `curves.csv` in long format, one point per line.
pub fn curves_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("sequence,variant,kind,threshold,value\n");
    for r in rows {
        for (i, v) in r.result.success_curve.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},success,{:.2},{}",
                r.sequence,
                r.variant.as_str(),
                i as f64 * 0.05,
                v
            );
        }
        for (d, v) in r.result.precision_curve.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},precision,{},{}",
                r.sequence,
                r.variant.as_str(),
                d,
                v
            );
        }
    }
    out
}
