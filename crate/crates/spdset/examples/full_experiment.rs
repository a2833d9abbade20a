//! The complete evaluation protocol in memory: generate a synthetic
//! dataset, run randomized train/test splits for several classifiers,
//! and print the rendered report of the last run.
//!
//! ```sh
//! cargo run --release --example full_experiment
//! ```

use spdset::config::{ClassifierKind, ExperimentConfig};
use spdset::experiment::{render_results, run_experiment_on_sets};
use spdset::synth::{generate_sets, SynthSpec};

fn main() -> spdset::Result<()> {
    let sets = generate_sets(&SynthSpec {
        classes: 3,
        sets_per_class: 8,
        frames_per_set: 8,
        frame_size: 24,
        seed: 4,
    })?;
    println!("generated {} image sets", sets.len());

    let mut cfg = ExperimentConfig {
        splits: 5,
        train_per_class: 4,
        ..ExperimentConfig::default()
    };

    let mut last = None;
    for classifier in ClassifierKind::ALL {
        cfg.classifier = classifier;
        let result = run_experiment_on_sets(&cfg, &sets)?;
        println!(
            "{} + {}: {} over {} splits",
            cfg.descriptor,
            classifier,
            result.summary(),
            result.outcomes.len()
        );
        last = Some(result);
    }

    if let Some(result) = last {
        println!("\nfull report of the last run:\n");
        print!("{}", render_results(&result)?);
    }
    Ok(())
}
