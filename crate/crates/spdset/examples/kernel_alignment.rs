//! Learning order weights by kernel-target alignment: build the
//! alignment problem from labeled representations, solve it in closed
//! form, and binarize the weights.
//!
//! ```sh
//! cargo run --example kernel_alignment
//! ```

use spdset::alignment::{alignment, binarize_weights, build_problem, solve_weights};
use spdset::kernels::{center_gram, GramMatrix};
use spdset::pipeline::{build_covds_s, PipelineConfig};
use spdset::synth::{generate_sets, SynthSpec};

fn main() -> spdset::Result<()> {
    // Labeled representations of synthetic texture sets, keeping the
    // per-order Gram components so they can be re-weighted.
    let sets = generate_sets(&SynthSpec {
        classes: 3,
        sets_per_class: 4,
        frames_per_set: 6,
        frame_size: 16,
        seed: 2,
    })?;
    let cfg = PipelineConfig {
        win: 4,
        stride: 3,
        keep_locals: true,
        ..PipelineConfig::default()
    };
    cfg.validate()?;
    let equal = vec![1.0; cfg.orders.len()];
    let reps: Vec<_> = sets
        .iter()
        .map(|s| build_covds_s(s, &cfg, &equal))
        .collect::<spdset::Result<_>>()?;
    let labels: Vec<u32> = sets.iter().map(|s| s.label()).collect();

    // The problem pits each order's set-level kernel against the ideal
    // target built from the labels.
    let problem = build_problem(&reps, &labels)?;
    println!(
        "alignment problem: {} orders, {} training sets",
        problem.orders().len(),
        problem.target().dim()
    );
    for (r, k) in problem.orders().iter().zip(problem.local_kernels()) {
        let centered = center_gram(k)?;
        let a = alignment(&centered, problem.target())?;
        println!("  order {r} alone: alignment {a:.4}");
    }

    // The closed-form solution maximizes alignment over unit-norm
    // weight vectors.
    let weights = solve_weights(&problem)?;
    println!("solved weights: {:?}", weights.raw());
    let combined = combined_kernel(&problem, weights.raw())?;
    println!(
        "combined alignment: {:.4}",
        alignment(&center_gram(&combined)?, problem.target())?
    );

    // Binarization keeps the k strongest orders with unit weight.
    let binary = binarize_weights(&weights, 2)?;
    println!(
        "binarized to k = 2: mask {:?} -> orders {:?}",
        binary.mask(),
        binary.selected_orders()
    );
    Ok(())
}

/// Weighted sum of the problem's set-level kernels.
fn combined_kernel(
    problem: &spdset::alignment::AlignmentProblem,
    w: &[f64],
) -> spdset::Result<GramMatrix> {
    let n = problem.target().dim();
    let mut sum = nalgebra::DMatrix::zeros(n, n);
    for (k, &wi) in problem.local_kernels().iter().zip(w) {
        sum += k.entries() * wi;
    }
    GramMatrix::new(sum, None)
}
