//! Command-line harness: dataset validation, synthetic dataset
//! generation, and randomized-split experiments driven by flat key-value
//! config files.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error,
//! 3 numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use spdset::config::ExperimentConfig;
use spdset::dataset::{decode_frame, load_dataset};
use spdset::experiment::{emit_results, run_experiment};
use spdset::synth::{write_dataset, SynthSpec};

#[derive(Parser)]
#[command(
    name = "spdset",
    version,
    about = "Image-set recognition with kernel-matrix covariance descriptors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a randomized-split experiment and write a result report.
    Run {
        /// Flat key-value experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Dataset root laid out as root/class/set/frames.
        #[arg(long)]
        data: PathBuf,
        /// Where to write the result report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a dataset tree is loadable and report its shape.
    Validate {
        /// Dataset root laid out as root/class/set/frames.
        #[arg(long)]
        data: PathBuf,
    },
    /// Generate a synthetic dataset of oriented Gaussian textures.
    Synth {
        /// Root directory of the generated tree.
        #[arg(long)]
        out: PathBuf,
        /// Number of texture classes.
        #[arg(long, default_value_t = 3)]
        classes: usize,
        /// Image sets per class.
        #[arg(long, default_value_t = 10)]
        sets: usize,
        /// Frames per image set.
        #[arg(long, default_value_t = 8)]
        frames: usize,
        /// RNG seed; the tree is a pure function of the arguments.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side length of the square frames.
        #[arg(long, default_value_t = 24)]
        frame_size: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successes; everything else is a
            // usage error.
            let code: u8 = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> spdset::Result<()> {
    match command {
        Command::Run { config, data, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let manifest = load_dataset(&data)?;
            let result = run_experiment(&cfg, &manifest)?;
            emit_results(&result, &out)?;
            println!(
                "{} + {} on {}: {} over {} split(s), report written to {}",
                cfg.descriptor,
                cfg.classifier,
                data.display(),
                result.summary(),
                result.outcomes.len(),
                out.display()
            );
            if !result.failures.is_empty() {
                println!("{} split(s) failed; see the report", result.failures.len());
            }
            Ok(())
        }
        Command::Validate { data } => {
            let manifest = load_dataset(&data)?;
            let mut frames_total = 0usize;
            let mut undecodable = 0usize;
            for class in manifest.classes() {
                let mut frames_in_class = 0usize;
                for set in &class.sets {
                    for frame in &set.frames {
                        match decode_frame(&frame.path) {
                            Ok(_) => frames_in_class += 1,
                            Err(e) => {
                                undecodable += 1;
                                log::warn!("{e}");
                            }
                        }
                    }
                }
                println!(
                    "class {} (label {}): {} sets, {} decodable frames",
                    class.name,
                    class.label,
                    class.sets.len(),
                    frames_in_class
                );
                frames_total += frames_in_class;
            }
            println!(
                "{} classes, {} sets, {} decodable frames, {} undecodable",
                manifest.n_classes(),
                manifest.n_sets(),
                frames_total,
                undecodable
            );
            println!("ok");
            Ok(())
        }
        Command::Synth {
            out,
            classes,
            sets,
            frames,
            seed,
            frame_size,
        } => {
            let spec = SynthSpec {
                classes,
                sets_per_class: sets,
                frames_per_set: frames,
                frame_size,
                seed,
            };
            write_dataset(&spec, &out)?;
            println!(
                "wrote {classes} classes x {sets} sets x {frames} frames ({frame_size}x{frame_size}, seed {seed}) under {}",
                out.display()
            );
            Ok(())
        }
    }
}
