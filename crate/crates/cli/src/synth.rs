use std::fs;
use std::process::ExitCode;

use anyhow::{Context, Result};
use hhebin::evalmetrics::{corpus_specs, synth_plate, DegradationRanges};
use hhebin::pixmap::save_image;
use log::{error, info};
use rayon::prelude::*;

use crate::SynthArgs;

fn write_corpus(args: &SynthArgs) -> Result<usize> {
    let ranges = DegradationRanges {
        amplitude: args.amplitude,
        noise_rate: args.noise,
        blur_radius: args.blur,
    };
    let specs = corpus_specs(args.count, &ranges, args.seed)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    specs
        .par_iter()
        .enumerate()
        .try_for_each(|(i, spec)| -> Result<()> {
            let (gray, truth) = synth_plate(spec, args.width, args.height)?;
            save_image(&gray, args.out.join(format!("{i:04}.gray.pgm")))?;
            save_image(&truth, args.out.join(format!("{i:04}.truth.pgm")))?;
            info!("{i:04}: {spec:?}");
            Ok(())
        })?;
    Ok(specs.len())
}

pub fn synth(args: &SynthArgs) -> ExitCode {
    match write_corpus(args) {
        Ok(n) => {
            info!("wrote {n} plates to {}", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
