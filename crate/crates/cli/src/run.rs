use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use hhebin::baseline::otsu_binarize;
use hhebin::evalmetrics::{confusion, scores, MetricsRow, METRICS_HEADER};
use hhebin::hierarchy::HheParams;
use hhebin::pixmap::{load_image, save_image, BinaryImage};
use hhebin::preprocess::median3x3;
use hhebin::{hhe_run, GrayImage, LevelRange};
use log::{error, info, warn};
use rayon::prelude::*;

use crate::{Method, RunArgs};

const EXTENSIONS: [&str; 3] = ["png", "pgm", "ppm"];

/// Expands directories (non-recursively, sorted by name) and keeps files as
/// given. Unreadable directories are reported as failed inputs.
fn expand_inputs(inputs: &[PathBuf]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for input in inputs {
        if !input.is_dir() {
            out.push(input.clone());
            continue;
        }
        match fs::read_dir(input) {
            Ok(entries) => {
                let mut files: Vec<PathBuf> = entries
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.is_file() && has_image_extension(p))
                    .collect();
                files.sort();
                out.extend(files);
            }
            Err(_) => out.push(input.clone()),
        }
    }
    out
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

/// `<base>.truth.pgm` or `<base>.truth.png`, where base drops a trailing
/// `.gray` from the stem; otherwise the input's own file name.
fn find_truth(dir: &Path, input: &Path) -> Option<PathBuf> {
    let s = stem(input);
    let base = s.strip_suffix(".gray").unwrap_or(&s);
    let mut candidates: Vec<PathBuf> = ["pgm", "png"]
        .iter()
        .map(|ext| dir.join(format!("{base}.truth.{ext}")))
        .collect();
    if let Some(name) = input.file_name() {
        candidates.push(dir.join(name));
    }
    candidates.into_iter().find(|p| p.is_file())
}

/// Creates the output directory and proves it is writable.
fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let probe = dir.join(".hhebin-probe");
    fs::write(&probe, b"").with_context(|| format!("cannot write to {}", dir.display()))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

fn panel(parts: &[&GrayImage]) -> GrayImage {
    let (w, h) = parts[0].dimensions();
    GrayImage::from_fn(w * parts.len(), h, |x, y| parts[x / w].get(x % w, y))
}

struct Config {
    method: Method,
    range: LevelRange,
    threshold: f64,
    median: bool,
    compare: bool,
    dump_levels: bool,
    truth: Option<PathBuf>,
    out: PathBuf,
}

/// Binarizes one input and writes its files. Returns its metric rows.
fn process(cfg: &Config, input: &Path) -> Result<Vec<MetricsRow>> {
    let gray = load_image(input)?.into_gray();
    let name = stem(input);
    let prepared = if cfg.median {
        median3x3(&gray)
    } else {
        gray.clone()
    };

    let need_hhe = cfg.method == Method::Hhe || cfg.compare;
    let need_otsu = cfg.method == Method::Otsu || cfg.compare;

    let mut hhe: Option<BinaryImage> = None;
    if need_hhe {
        let params = HheParams {
            range: cfg.range,
            threshold: cfg.threshold,
            median: false,
        };
        let result = hhe_run(&prepared, &params);
        if cfg.dump_levels {
            for (level, map) in result.stack.iter() {
                save_image(map, cfg.out.join(format!("{name}.L{level}.pgm")))?;
            }
        }
        hhe = Some(result.binary);
    }
    let otsu = need_otsu.then(|| otsu_binarize(&prepared));

    let primary = match cfg.method {
        Method::Hhe => hhe.as_ref(),
        Method::Otsu => otsu.as_ref(),
    }
    .expect("primary method was computed");
    save_image(primary, cfg.out.join(format!("{name}.bin.png")))?;

    if cfg.compare {
        let (h, o) = (hhe.as_ref().unwrap(), otsu.as_ref().unwrap());
        save_image(o, cfg.out.join(format!("{name}.otsu.png")))?;
        let panel = panel(&[&gray, &h.to_gray(), &o.to_gray()]);
        save_image(&panel, cfg.out.join(format!("{name}.panel.png")))?;
    }

    let mut rows = Vec::new();
    if let Some(dir) = &cfg.truth {
        let path = find_truth(dir, input).ok_or_else(|| {
            anyhow!(
                "no ground truth for {} in {}",
                input.display(),
                dir.display()
            )
        })?;
        let truth = BinaryImage::from_gray(load_image(&path)?.into_gray())
            .with_context(|| format!("ground truth {} is not two-tone", path.display()))?;
        let methods = [(Method::Hhe, &hhe), (Method::Otsu, &otsu)];
        for (method, result) in methods {
            let Some(pred) = result else { continue };
            let levels = match method {
                Method::Hhe => cfg.range.to_string(),
                Method::Otsu => String::new(),
            };
            rows.push(MetricsRow {
                image: name.clone(),
                method: method.name().into(),
                levels,
                scores: scores(&confusion(pred, &truth)?),
            });
        }
    }
    Ok(rows)
}

/// Appends rows, writing the header only when the file is new or empty.
fn append_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(METRICS_HEADER)?;
    }
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &RunArgs) -> ExitCode {
    let range = match args.level_range() {
        Ok(r) => r,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(2);
        }
    };
    if args.method == Method::Otsu && args.dump_levels && !args.compare {
        warn!("--dump-levels has no effect with --method otsu unless --compare is given");
    }
    if let Err(e) = prepare_out_dir(&args.out) {
        error!("{e:#}");
        return ExitCode::from(2);
    }
    let cfg = Config {
        method: args.method,
        range,
        threshold: args.threshold,
        median: !args.no_median,
        compare: args.compare,
        dump_levels: args.dump_levels,
        truth: args.truth.clone(),
        out: args.out.clone(),
    };

    let inputs = expand_inputs(&args.inputs);
    let results: Vec<Result<Vec<MetricsRow>>> = inputs
        .par_iter()
        .map(|input| process(&cfg, input))
        .collect();

    let mut failed = 0usize;
    let mut rows = Vec::new();
    for (input, result) in inputs.iter().zip(results) {
        match result {
            Ok(r) => {
                info!("{}: done", input.display());
                rows.extend(r);
            }
            Err(e) => {
                failed += 1;
                error!("{}: {e:#}", input.display());
            }
        }
    }

    if cfg.truth.is_some() {
        let path = args
            .metrics
            .clone()
            .unwrap_or_else(|| args.out.join("metrics.csv"));
        if let Err(e) = append_metrics(&path, &rows) {
            error!("{e:#}");
            return ExitCode::from(2);
        }
    } else if args.metrics.is_some() {
        warn!("--metrics has no effect without --truth");
    }

    if inputs.is_empty() {
        warn!("no input images found");
    }
    if failed > 0 {
        error!("{failed} of {} inputs failed", inputs.len());
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
