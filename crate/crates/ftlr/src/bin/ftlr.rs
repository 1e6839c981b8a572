//! Batch CLI for the tracking toolkit: run a tracker over a sequence,
//! evaluate datasets, synthesize test sequences, calibrate the confidence
//! threshold, and plot result curves.
//!
//! Exit codes: 0 success, 2 usage (from the argument parser), 3 bad
//! configuration or spec, 4 ingest failure, 5 tracker/evaluation failure,
//! 6 output write failure.

use clap::{Args, Parser, Subcommand};
use ftlr::config::{apply_tracker_keys, tracker_keys, ConfigError, KeyValues};
use ftlr::correlation::ResponseMap;
use ftlr::eval::{
    curves_csv, discover_sequences, evaluate_all, load_otb_sequence, score_trajectory, EvalError,
    Protocol, SummaryRow,
};
use ftlr::geom::BoundingBox;
use ftlr::plot::{render_svg, CurveSeries};
use ftlr::synth::{
    generate_synthetic, jump_suite, jump_suite_config, render_sequence, SynthError, SynthSpec,
};
use ftlr::tracker::{run_sequence, StepOutcome, Tracker, TrackerConfig, TrackerError, Variant};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ftlr",
    version,
    about = "Confidence-gated correlation tracking with fast target-loss recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track one sequence and write trajectory/trace CSVs.
    Run(RunArgs),
    /// Evaluate every sequence under a dataset root (OPE or TRE).
    Eval(EvalArgs),
    /// Render a synthetic sequence from a spec file.
    Synth(SynthArgs),
    /// Sweep confidence thresholds over the synthetic jump suite.
    CalibrateNndr(CalibrateArgs),
    /// Render success/precision SVG plots from a curves.csv.
    Plot(PlotArgs),
}

#[derive(Args, Clone)]
struct TrackerFlags {
    /// Tracker variant: baseline, ftlr_0, ftlr_1, ftlr, ftlr_sa, ftlr_gt.
    #[arg(long)]
    variant: Option<String>,
    /// Confidence threshold on the peak ratio (> 1).
    #[arg(long)]
    nndr: Option<f64>,
    /// Running-average update factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Update rule: simple or smooth.
    #[arg(long)]
    update_rule: Option<String>,
    /// Search-area multiplier applied after an ambiguous frame.
    #[arg(long)]
    area_multiplier: Option<f64>,
    /// Feature extractor: grayscale or census.
    #[arg(long)]
    extractor: Option<String>,
}

impl TrackerFlags {
    fn as_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        if let Some(v) = &self.variant {
            kv.set("variant", v);
        }
        if let Some(v) = self.nndr {
            kv.set("nndr_threshold", v);
        }
        if let Some(v) = self.alpha {
            kv.set("alpha", v);
        }
        if let Some(v) = &self.update_rule {
            kv.set("update_rule", v);
        }
        if let Some(v) = self.area_multiplier {
            kv.set("failure_area_multiplier", v);
        }
        if let Some(v) = &self.extractor {
            kv.set("extractor", v);
        }
        kv
    }
}

#[derive(Args)]
struct RunArgs {
    /// Sequence directory (img/ + groundtruth_rect.txt).
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "ftlr-out")]
    out: PathBuf,
    /// Initial box "x,y,w,h" (0-based); defaults to the first ground truth.
    #[arg(long)]
    init_box: Option<String>,
    /// Dump each frame's response surface as a CSV grid under out/responses/.
    #[arg(long)]
    dump_response: bool,
    #[command(flatten)]
    tracker: TrackerFlags,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset root containing sequence subdirectories.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "ftlr-out")]
    out: PathBuf,
    /// Evaluation protocol: ope or tre.
    #[arg(long, default_value = "ope")]
    protocol: String,
    /// Restart segments for TRE.
    #[arg(long, default_value_t = 20)]
    segments: usize,
    /// Worker threads; results are identical for any value.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Comma-separated variant list; overrides the single-variant flag.
    #[arg(long, value_delimiter = ',')]
    variants: Vec<String>,
    /// Also render success/precision SVG plots.
    #[arg(long)]
    plots: bool,
    #[command(flatten)]
    tracker: TrackerFlags,
}

#[derive(Args)]
struct SynthArgs {
    /// Spec file (key=value).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output sequence directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the spec's noise seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Evaluate over an existing dataset root instead of the built-in suite.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value = "ftlr-out")]
    out: PathBuf,
    /// Seed for the built-in jump suite.
    #[arg(long, default_value_t = 2024)]
    suite_seed: u64,
    /// Sequence count for the built-in jump suite.
    #[arg(long, default_value_t = 20)]
    suite_count: usize,
    /// Threshold sweep: start.
    #[arg(long, default_value_t = 1.05)]
    sweep_from: f64,
    /// Threshold sweep: end (inclusive).
    #[arg(long, default_value_t = 2.0)]
    sweep_to: f64,
    /// Threshold sweep: step.
    #[arg(long, default_value_t = 0.05)]
    sweep_step: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    tracker: TrackerFlags,
}

#[derive(Args)]
struct PlotArgs {
    /// curves.csv produced by `eval`.
    #[arg(long)]
    curves: PathBuf,
    #[arg(long, default_value = "ftlr-out")]
    out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Ingest(#[from] EvalError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 3,
            CliError::Synth(e) => match e {
                SynthError::Io { .. } | SynthError::Png { .. } => 6,
                _ => 3,
            },
            CliError::Ingest(e) => match e {
                EvalError::Tracker { .. } | EvalError::ProtocolMix | EvalError::EmptyAggregate => 5,
                _ => 4,
            },
            CliError::Tracker(e) => match e {
                TrackerError::InvalidConfig { .. } | TrackerError::MissingGroundTruth => 3,
                _ => 5,
            },
            CliError::Output { .. } => 6,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Synth(args) => cmd_synth(args),
        Command::CalibrateNndr(args) => cmd_calibrate(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// defaults <- FTLR_CONFIG file <- --config file <- flags
fn resolve_config(
    config_path: Option<&Path>,
    flags: &KeyValues,
) -> Result<(TrackerConfig, KeyValues), CliError> {
    let mut merged = KeyValues::default();
    if let Ok(env_path) = std::env::var("FTLR_CONFIG") {
        let text = fs::read_to_string(&env_path)
            .map_err(|e| CliError::Usage(format!("FTLR_CONFIG file {env_path}: {e}")))?;
        merged.merge_overrides(&KeyValues::parse(&text)?);
    }
    if let Some(path) = config_path {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        merged.merge_overrides(&KeyValues::parse(&text)?);
    }
    merged.merge_overrides(flags);

    let mut cfg = TrackerConfig::default();
    apply_tracker_keys(&mut cfg, &mut merged)?;
    cfg.validate()?;
    // anything left belongs to the subcommand, which takes it from `merged`
    Ok((cfg, merged))
}

fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Output {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    fs::write(path, contents).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_resolved_config(
    out_dir: &Path,
    cfg: &TrackerConfig,
    extra: &[(&str, String)],
) -> Result<(), CliError> {
    let mut kv = tracker_keys(cfg);
    for (k, v) in extra {
        kv.set(k, v);
    }
    write_out(&out_dir.join("resolved_config.txt"), &kv.render())
}

fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

fn trajectory_csv(trajectory: &[BoundingBox], trace: &[StepOutcome]) -> String {
    let mut out = String::from("frame_index,x,y,w,h,confident,ratio,used_backup\n");
    let b = &trajectory[0];
    let _ = writeln!(out, "1,{},{},{},{},1,inf,0", b.x, b.y, b.w, b.h);
    for (i, step) in trace.iter().enumerate() {
        let b = &step.bbox;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            i + 2,
            b.x,
            b.y,
            b.w,
            b.h,
            step.decision.confident as u8,
            fmt_float(step.decision.ratio),
            step.used_backup as u8
        );
    }
    out
}

fn trace_csv(trace: &[StepOutcome]) -> String {
    let mut out = String::from(
        "frame_index,confident,degenerate,ratio,p1_row,p1_col,p1_val,p2_row,p2_col,p2_val,used_backup\n",
    );
    for (i, step) in trace.iter().enumerate() {
        let p = &step.peak_pair;
        let (p2r, p2c, p2v) = match (p.p2_pos, p.p2_val) {
            (Some((r, c)), Some(v)) => (r.to_string(), c.to_string(), fmt_float(v)),
            _ => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            i + 2,
            step.decision.confident as u8,
            step.decision.degenerate as u8,
            fmt_float(step.decision.ratio),
            p.p1_pos.0,
            p.p1_pos.1,
            fmt_float(p.p1_val),
            p2r,
            p2c,
            p2v,
            step.used_backup as u8
        );
    }
    out
}

fn response_csv(resp: &ResponseMap) -> String {
    let mut out = String::new();
    for r in 0..resp.height {
        let row: Vec<String> = (0..resp.width)
            .map(|c| format!("{}", resp.get(r, c)))
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn parse_box(text: &str) -> Result<BoundingBox, CliError> {
    let fields: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("cannot parse box {text:?}; expected x,y,w,h")))?;
    if fields.len() != 4 {
        return Err(CliError::Usage(format!(
            "box {text:?} needs 4 fields, got {}",
            fields.len()
        )));
    }
    BoundingBox::new(fields[0], fields[1], fields[2], fields[3])
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let (cfg, mut rest) = resolve_config(args.config.as_deref(), &args.tracker.as_key_values())?;
    let sequence_dir = match (&args.sequence, rest.take("sequence")) {
        (Some(dir), _) => dir.clone(),
        (None, Some(from_cfg)) => PathBuf::from(from_cfg),
        (None, None) => {
            return Err(CliError::Usage(
                "a sequence directory is required (--sequence or sequence= in the config)".into(),
            ))
        }
    };
    let init_box = match (&args.init_box, rest.take("init_box")) {
        (Some(text), _) => Some(parse_box(text)?),
        (None, Some(text)) => Some(parse_box(&text)?),
        (None, None) => None,
    };
    let dump_response = args.dump_response || rest.take("dump_response").as_deref() == Some("true");
    rest.reject_leftovers()?;

    let dataset = load_otb_sequence(&sequence_dir)?;
    let b0 = match init_box {
        Some(b) => b,
        None => dataset.gt_boxes[0],
    };
    let frames = dataset.load_frames()?;

    let (trajectory, trace, fps) = if dump_response {
        // traced path: slower, writes one response grid per frame
        let responses_dir = args.out.join("responses");
        let mut tracker = Tracker::new(&frames[0], b0, cfg.clone())?;
        let mut trajectory = vec![b0];
        let mut trace = Vec::new();
        let started = std::time::Instant::now();
        for (i, frame) in frames.iter().enumerate().skip(1) {
            let gt = (cfg.variant == Variant::FtlrGt).then(|| &dataset.gt_boxes[i]);
            let (outcome, response) = tracker.step_traced(frame, gt)?;
            write_out(
                &responses_dir.join(format!("frame_{:04}.csv", i + 1)),
                &response_csv(&response),
            )?;
            trajectory.push(outcome.bbox);
            trace.push(outcome);
        }
        let fps = frames.len() as f64 / started.elapsed().as_secs_f64().max(1e-9);
        (trajectory, trace, fps)
    } else {
        let gt = (cfg.variant == Variant::FtlrGt).then_some(dataset.gt_boxes.as_slice());
        let run = run_sequence(&frames, b0, &cfg, gt)?;
        (run.trajectory, run.trace, run.fps)
    };

    write_out(
        &args.out.join("trajectory.csv"),
        &trajectory_csv(&trajectory, &trace),
    )?;
    write_out(&args.out.join("trace.csv"), &trace_csv(&trace))?;
    let mut extra = vec![("sequence", sequence_dir.display().to_string())];
    if let Some(b) = init_box {
        extra.push(("init_box", format!("{},{},{},{}", b.x, b.y, b.w, b.h)));
    }
    if dump_response {
        extra.push(("dump_response", "true".to_string()));
    }
    write_resolved_config(&args.out, &cfg, &extra)?;
    println!(
        "{}: {} frames, {:.1} fps",
        dataset.name,
        trajectory.len(),
        fps
    );
    Ok(())
}

fn parse_protocol(text: &str) -> Result<Protocol, CliError> {
    match text {
        "ope" => Ok(Protocol::Ope),
        "tre" => Ok(Protocol::Tre),
        other => Err(CliError::Usage(format!(
            "unknown protocol {other:?}; expected ope or tre"
        ))),
    }
}

fn in_worker_pool<T: Send>(
    workers: usize,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    pool.install(f)
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let (base_cfg, mut rest) =
        resolve_config(args.config.as_deref(), &args.tracker.as_key_values())?;
    let dataset_root = match (&args.dataset, rest.take("dataset")) {
        (Some(dir), _) => dir.clone(),
        (None, Some(from_cfg)) => PathBuf::from(from_cfg),
        (None, None) => {
            return Err(CliError::Usage(
                "a dataset root is required (--dataset or dataset= in the config)".into(),
            ))
        }
    };
    let protocol = parse_protocol(
        &rest
            .take("protocol")
            .unwrap_or_else(|| args.protocol.clone()),
    )?;
    let segments = match rest.take_parsed::<usize>("segments")? {
        Some(v) => v,
        None => args.segments,
    };
    let variant_names: Vec<String> = if !args.variants.is_empty() {
        args.variants.clone()
    } else if let Some(list) = rest.take("variants") {
        list.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        vec![base_cfg.variant.as_str().to_string()]
    };
    rest.take("workers");
    rest.reject_leftovers()?;

    let mut configs = Vec::new();
    for name in &variant_names {
        let variant = Variant::parse(name)
            .ok_or_else(|| CliError::Usage(format!("unknown variant {name:?}")))?;
        let mut cfg = base_cfg.clone();
        cfg.variant = variant;
        cfg.validate()?;
        configs.push(cfg);
    }

    let datasets = discover_sequences(&dataset_root)?;
    let rows = in_worker_pool(args.workers, || {
        evaluate_all(&datasets, &configs, protocol, segments).map_err(CliError::from)
    })?;

    let summary = ftlr::eval::summary_csv(&rows)?;
    write_out(&args.out.join("summary.csv"), &summary)?;
    write_out(&args.out.join("curves.csv"), &curves_csv(&rows))?;
    if args.plots {
        let (success, precision) = curve_plots(&rows);
        write_out(&args.out.join("success.svg"), &success)?;
        write_out(&args.out.join("precision.svg"), &precision)?;
    }
    write_resolved_config(
        &args.out,
        &base_cfg,
        &[
            ("dataset", dataset_root.display().to_string()),
            ("protocol", protocol.as_str().to_string()),
            ("segments", segments.to_string()),
            ("variants", variant_names.join(",")),
            ("workers", args.workers.to_string()),
        ],
    )?;
    print!("{summary}");
    Ok(())
}

/// Mean curve per variant across sequences, rendered as two SVGs.
fn curve_plots(rows: &[SummaryRow]) -> (String, String) {
    let mut success: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    let mut precision: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    for row in rows {
        success
            .entry(row.variant.as_str())
            .or_default()
            .push(row.result.success_curve.clone());
        precision
            .entry(row.variant.as_str())
            .or_default()
            .push(row.result.precision_curve.clone());
    }
    let mean_series = |curves: &BTreeMap<&str, Vec<Vec<f64>>>, x_step: f64| -> Vec<CurveSeries> {
        curves
            .iter()
            .map(|(label, group)| {
                let len = group[0].len();
                let points = (0..len)
                    .map(|i| {
                        let mean = group.iter().map(|c| c[i]).sum::<f64>() / group.len() as f64;
                        (i as f64 * x_step, mean)
                    })
                    .collect();
                CurveSeries {
                    label: label.to_string(),
                    points,
                }
            })
            .collect()
    };
    let success_svg = render_svg(
        "Success plot",
        "overlap threshold",
        "success rate",
        1.0,
        &mean_series(&success, 0.05),
    );
    let precision_svg = render_svg(
        "Precision plot",
        "location error threshold (px)",
        "precision",
        50.0,
        &mean_series(&precision, 1.0),
    );
    (success_svg, precision_svg)
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("spec file {}: {e}", path.display())))?;
            let mut kv = KeyValues::parse(&text)?;
            let spec = SynthSpec::from_key_values(&mut kv)?;
            kv.reject_leftovers()?;
            spec
        }
        None => SynthSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    generate_synthetic(&spec, &args.out)?;
    write_out(
        &args.out.join("resolved_config.txt"),
        &spec.to_key_values().render(),
    )?;
    println!(
        "{}: {} frames at {}x{}",
        args.out.display(),
        spec.frame_count,
        spec.width,
        spec.height
    );
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let base_cfg = {
        let mut kv = args.tracker.as_key_values();
        let mut cfg = jump_suite_config(Variant::FtlrSa);
        apply_tracker_keys(&mut cfg, &mut kv)?;
        kv.reject_leftovers()?;
        cfg.validate()?;
        cfg
    };

    // (frames, gt) per sequence, either from disk or the built-in suite
    let mut sequences = Vec::new();
    if let Some(root) = &args.dataset {
        for dataset in discover_sequences(root)? {
            let frames = dataset.load_frames()?;
            sequences.push((frames, dataset.gt_boxes.clone()));
        }
    } else {
        for spec in jump_suite(args.suite_seed, args.suite_count) {
            sequences.push(render_sequence(&spec)?);
        }
    }

    if !(args.sweep_step > 0.0) || args.sweep_to < args.sweep_from {
        return Err(CliError::Usage("bad sweep range".into()));
    }
    let mut thresholds = Vec::new();
    let mut t = args.sweep_from;
    while t <= args.sweep_to + 1e-9 {
        thresholds.push((t * 1000.0).round() / 1000.0);
        t += args.sweep_step;
    }

    let results = in_worker_pool(args.workers, || {
        use rayon::prelude::*;
        thresholds
            .par_iter()
            .map(|&threshold| {
                let mut cfg = base_cfg.clone();
                cfg.nndr_threshold = threshold;
                let mut ambiguous = 0usize;
                let mut steps = 0usize;
                let mut recovered = 0usize;
                for (frames, gt) in &sequences {
                    let run = run_sequence(frames, gt[0], &cfg, None)?;
                    ambiguous += run.trace.iter().filter(|o| !o.decision.confident).count();
                    steps += run.trace.len();
                    // recovered when the tracker ends the sequence on target
                    let pairs = score_trajectory(&run.trajectory, gt);
                    let tail = &pairs[pairs.len().saturating_sub(10)..];
                    let tail_iou = tail.iter().map(|p| p.0).sum::<f64>() / tail.len() as f64;
                    if tail_iou > 0.5 {
                        recovered += 1;
                    }
                }
                Ok((
                    threshold,
                    ambiguous as f64 / steps.max(1) as f64,
                    recovered as f64 / sequences.len().max(1) as f64,
                ))
            })
            .collect::<Result<Vec<_>, TrackerError>>()
            .map_err(CliError::from)
    })?;

    let mut csv = String::from("threshold,failure_entry_rate,recovery_rate\n");
    for (t, entry, recovery) in &results {
        let _ = writeln!(csv, "{t},{entry},{recovery}");
    }
    write_out(&args.out.join("calibration.csv"), &csv)?;
    write_resolved_config(
        &args.out,
        &base_cfg,
        &[
            ("suite_seed", args.suite_seed.to_string()),
            ("suite_count", args.suite_count.to_string()),
            ("sweep_from", args.sweep_from.to_string()),
            ("sweep_to", args.sweep_to.to_string()),
            ("sweep_step", args.sweep_step.to_string()),
            ("workers", args.workers.to_string()),
        ],
    )?;
    print!("{csv}");
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.curves)
        .map_err(|e| CliError::Usage(format!("curves file {}: {e}", args.curves.display())))?;
    // sequence,variant,kind,threshold,value
    let mut success: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut precision: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Usage(format!(
                "{}:{}: expected 5 columns",
                args.curves.display(),
                i + 1
            )));
        }
        let (variant, kind, value) = (fields[1], fields[2], fields[4]);
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("bad value {value:?} on line {}", i + 1)))?;
        let bucket = match kind {
            "success" => &mut success,
            "precision" => &mut precision,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown curve kind {other:?} on line {}",
                    i + 1
                )))
            }
        };
        bucket
            .entry(variant.to_string())
            .or_default()
            .entry(fields[0].to_string())
            .or_default()
            .push(value);
    }

    let to_series =
        |bucket: &BTreeMap<String, BTreeMap<String, Vec<f64>>>, x_step: f64| -> Vec<CurveSeries> {
            bucket
                .iter()
                .map(|(variant, by_seq)| {
                    let len = by_seq.values().map(|v| v.len()).max().unwrap_or(0);
                    let points = (0..len)
                        .map(|i| {
                            let vals: Vec<f64> =
                                by_seq.values().filter_map(|v| v.get(i).copied()).collect();
                            let mean = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
                            (i as f64 * x_step, mean)
                        })
                        .collect();
                    CurveSeries {
                        label: variant.clone(),
                        points,
                    }
                })
                .collect()
        };
    let success_svg = render_svg(
        "Success plot",
        "overlap threshold",
        "success rate",
        1.0,
        &to_series(&success, 0.05),
    );
    let precision_svg = render_svg(
        "Precision plot",
        "location error threshold (px)",
        "precision",
        50.0,
        &to_series(&precision, 1.0),
    );
    write_out(&args.out.join("success.svg"), &success_svg)?;
    write_out(&args.out.join("precision.svg"), &precision_svg)?;
    let mut kv = KeyValues::default();
    kv.set("curves", args.curves.display());
    write_out(&args.out.join("resolved_config.txt"), &kv.render())?;
    println!("wrote {}", args.out.join("success.svg").display());
    println!("wrote {}", args.out.join("precision.svg").display());
    Ok(())
}
