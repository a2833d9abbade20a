//! Image-set recognition on the manifold of symmetric positive definite
//! (SPD) matrices.
//!
//! An image set (the frames of a video clip, or a pile of still shots of the
//! same object) is summarised by covariance-style descriptors that live on
//! the SPD manifold, and sets are compared through log-Euclidean geometry:
//! matrix logarithms flatten the manifold so that ordinary inner products,
//! distances and kernels apply. On top of the classical covariance
//! descriptor this crate builds a kernel-matrix representation: each set is
//! cut into sub-image sets by a sliding window, every sub-image set becomes
//! a Gaussian descriptor (covariance plus mean, embedded as an SPD matrix),
//! and the set as a whole is represented by the Gram matrix of arc-cosine
//! kernels between its sub-image descriptors. A small quadratic program
//! aligns the per-order kernel Grams with the label structure of the
//! training data to pick which kernel orders matter.
//!
//! The crate is organised bottom-up:
//!
//! - [`spd`]: symmetric/SPD matrix types, eigendecomposition, matrix log and
//!   exp, mean centralization.
//! - [`metrics`]: affine-invariant, Stein, Jeffrey and log-Euclidean
//!   dissimilarities between SPD matrices.
//! - [`kernels`]: log-Euclidean kernels (linear, arc-cosine of orders 0-3,
//!   polynomial/exponential/Gaussian variants) and Gram matrix assembly.
//! - [`pipeline`]: image sets, sliding-window sub-image sets, Gaussian
//!   embedding, and the kernel-matrix set representation.
//! - [`alignment`]: kernel-target alignment and kernel weight learning.
//! - [`classify`]: nearest-neighbour and one-vs-all kernel SVM classifiers.
//! - [`dataset`], [`synth`], [`config`], [`experiment`]: dataset loading and
//!   preprocessing, synthetic dataset generation, experiment configuration
//!   and the end-to-end evaluation protocol.
//!
//! Every major capability has a runnable example under `examples/`:
//! `spd_basics`, `manifold_metrics`, `loge_kernels`, `covds_pipeline`,
//! `kernel_alignment`, `kernel_svm` and `full_experiment`. The `spdset`
//! binary exposes the same machinery as a small command-line tool (`run`,
//! `validate`, `synth`).

pub mod alignment;
pub mod classify;
pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod kernels;
pub mod metrics;
pub mod pipeline;
pub mod spd;
pub mod synth;

pub use error::{Error, Result};
