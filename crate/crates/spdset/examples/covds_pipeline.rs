//! From an image set to its descriptors: sliding windows, Gaussian
//! embedding, and the kernel-matrix representation, next to the plain
//! covariance descriptor.
//!
//! ```sh
//! cargo run --example covds_pipeline
//! ```

use spdset::pipeline::{
    build_covds_s, extract_subsets, finalize_representation, gaussian_embed, traditional_covds,
    window_grid, PipelineConfig,
};
use spdset::spd::sym_eig;
use spdset::synth::{generate_sets, SynthSpec};

fn main() -> spdset::Result<()> {
    // A synthetic image set: 8 frames of 24x24 oriented texture.
    let sets = generate_sets(&SynthSpec::default())?;
    let set = &sets[0];
    println!(
        "image set {:?}: {} frames of {:?}",
        set.source_id(),
        set.n_frames(),
        set.frame_dims()
    );

    // The plain covariance descriptor treats each frame as one long
    // vector: a 576x576 SPD matrix for 24x24 frames.
    let covds = traditional_covds(set, 1e-3)?;
    println!("plain covariance descriptor: {0}x{0}", covds.dim());

    // Sliding 6x6 windows with stride 2 tile the frame into 100
    // sub-image sets.
    let cfg = PipelineConfig::default();
    let (frame_h, frame_w) = set.frame_dims();
    let (rows, cols) = window_grid(frame_h, frame_w, cfg.win, cfg.stride)?;
    println!("window grid: {rows} x {cols} = {} sub-image sets", rows * cols);
    let subs = extract_subsets(set, cfg.win, cfg.stride)?;
    println!(
        "each sub-image set stacks {} window pixels over {} frames",
        subs[0].features().nrows(),
        subs[0].features().ncols()
    );

    // One sub-image set becomes a (w^2+1) x (w^2+1) SPD matrix through
    // the Gaussian embedding of its mean and covariance.
    let descriptor = gaussian_embed(&subs[0], cfg.beta, cfg.lambda_frac)?;
    println!(
        "Gaussian embedding of window {:?}: {1}x{1} SPD",
        subs[0].window_origin(),
        descriptor.matrix.dim()
    );

    // The full representation: per-order arc-cosine Grams over the
    // mean-centralized embeddings, combined into one kernel matrix.
    let weights = vec![1.0; cfg.orders.len()];
    let rep = build_covds_s(set, &cfg, &weights)?;
    let gram = rep.matrix();
    println!(
        "kernel-matrix representation: {0}x{0}, orders {1:?}",
        gram.dim(),
        rep.orders_used()
    );
    let spd = finalize_representation(&rep, cfg.eig_floor)?;
    let eig = sym_eig(spd.sym())?;
    println!(
        "finalized SPD representation: eigenvalues in [{:.3e}, {:.3e}]",
        eig.values.last().unwrap(),
        eig.values[0]
    );
    Ok(())
}
