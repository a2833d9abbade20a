//! Synthetic dataset generation: class-correlated Gaussian textures.
//!
//! Each class is an oriented random texture: white Gaussian noise filtered
//! by an anisotropic Gaussian kernel whose long axis points along the
//! class orientation `θ_c = π·c / classes`. Filtering correlates nearby
//! pixels along the orientation, so sub-image covariances carry a strong
//! class signature while individual frames remain random. Frames are
//! standardized to mean 0.5 and standard deviation 0.15, clamped to
//! `[0, 1]`, and quantized to the 8-bit grid so that the in-memory
//! generator and a dataset written to disk as PGM files agree exactly.
//!
//! Every frame derives its own RNG stream from
//! `(seed, class, set, frame)`, so any subset of the dataset can be
//! regenerated independently and the tree is reproducible bit for bit.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pipeline::ImageSet;

/// Half-width of the anisotropic filter; the kernel is 13×13.
const FILTER_RADIUS: usize = 6;

/// Standard deviation along the class orientation (pixels).
const SIGMA_LONG: f64 = 4.0;

/// Standard deviation across the class orientation (pixels).
const SIGMA_SHORT: f64 = 0.5;

/// Target intensity mean after standardization.
const TARGET_MEAN: f64 = 0.5;

/// Target intensity standard deviation after standardization.
const TARGET_STD: f64 = 0.15;

/// Shape and seeding of a synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub classes: usize,
    pub sets_per_class: usize,
    pub frames_per_set: usize,
    /// Frames are square `frame_size × frame_size` images.
    pub frame_size: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            classes: 3,
            sets_per_class: 10,
            frames_per_set: 8,
            frame_size: 24,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 {
            return Err(Error::InvalidInput("need at least one class".into()));
        }
        if self.sets_per_class < 2 {
            return Err(Error::InvalidInput(
                "need at least two sets per class".into(),
            ));
        }
        if self.frames_per_set < 2 {
            return Err(Error::InvalidInput(
                "need at least two frames per set".into(),
            ));
        }
        if self.frame_size < 6 {
            return Err(Error::InvalidInput(format!(
                "frame size {} is too small for windowed descriptors",
                self.frame_size
            )));
        }
        Ok(())
    }

    /// Texture orientation of `class`, radians in `[0, π)`.
    pub fn orientation(&self, class: usize) -> f64 {
        std::f64::consts::PI * class as f64 / self.classes as f64
    }
}

/// Independent RNG stream per frame: the 32-byte ChaCha seed packs the
/// dataset seed and the (class, set, frame) coordinates.
fn frame_rng(seed: u64, class: usize, set: usize, frame: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(class as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(set as u64).to_le_bytes());
    key[24..32].copy_from_slice(&(frame as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Normalized anisotropic Gaussian kernel with the long axis at `theta`.
fn oriented_kernel(theta: f64) -> DMatrix<f64> {
    let size = 2 * FILTER_RADIUS + 1;
    let (sin, cos) = theta.sin_cos();
    let mut k = DMatrix::from_fn(size, size, |i, j| {
        let dy = i as f64 - FILTER_RADIUS as f64;
        let dx = j as f64 - FILTER_RADIUS as f64;
        // Coordinates in the rotated frame: u along the orientation.
        let u = dx * cos + dy * sin;
        let v = -dx * sin + dy * cos;
        (-0.5 * (u * u / (SIGMA_LONG * SIGMA_LONG) + v * v / (SIGMA_SHORT * SIGMA_SHORT))).exp()
    });
    let total: f64 = k.iter().sum();
    k /= total;
    k
}

/// Generates one frame deterministically from its coordinates.
///
/// White noise on a padded grid is convolved with the class kernel
/// (yielding exactly `frame_size × frame_size` valid samples),
/// standardized to mean 0.5 / std 0.15, clamped to `[0, 1]`, and snapped
/// to the 8-bit grid `k/255`.
pub fn generate_frame(spec: &SynthSpec, class: usize, set: usize, frame: usize) -> DMatrix<f64> {
    let n = spec.frame_size;
    let pad = 2 * FILTER_RADIUS;
    let mut rng = frame_rng(spec.seed, class, set, frame);
    let noise = DMatrix::from_fn(n + pad, n + pad, |_, _| -> f64 {
        StandardNormal.sample(&mut rng)
    });
    let kernel = oriented_kernel(spec.orientation(class));
    let size = 2 * FILTER_RADIUS + 1;
    let mut out = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = 0.0;
            for i in 0..size {
                for j in 0..size {
                    acc += kernel[(i, j)] * noise[(r + i, c + j)];
                }
            }
            out[(r, c)] = acc;
        }
    }
    let mean = out.mean();
    let var = out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / out.len() as f64;
    let std = var.sqrt();
    let scale = if std > 1e-12 { TARGET_STD / std } else { 0.0 };
    for v in out.iter_mut() {
        let standardized = TARGET_MEAN + (*v - mean) * scale;
        let clamped = standardized.clamp(0.0, 1.0);
        *v = (clamped * 255.0).round() / 255.0;
    }
    out
}

/// Generates the full dataset in memory as labeled [`ImageSet`]s, in
/// (class, set) order with source ids matching the on-disk layout.
pub fn generate_sets(spec: &SynthSpec) -> Result<Vec<ImageSet>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.classes * spec.sets_per_class);
    for class in 0..spec.classes {
        for set in 0..spec.sets_per_class {
            let frames: Vec<DMatrix<f64>> = (0..spec.frames_per_set)
                .map(|frame| generate_frame(spec, class, set, frame))
                .collect();
            let source_id = format!("{}/{}", class_dir(class), set_dir(set));
            out.push(ImageSet::new(class as u32, frames, source_id)?);
        }
    }
    Ok(out)
}

fn class_dir(class: usize) -> String {
    format!("class_{class:03}")
}

fn set_dir(set: usize) -> String {
    format!("set_{set:03}")
}

/// Writes the dataset as a `root/class/set/frame.pgm` tree of binary PGM
/// (P5) files. Zero-padded names keep lexicographic and numeric order
/// identical, so a manifest scan reproduces generation order and labels.
pub fn write_dataset(spec: &SynthSpec, root: &Path) -> Result<()> {
    spec.validate()?;
    for class in 0..spec.classes {
        for set in 0..spec.sets_per_class {
            let dir = root.join(class_dir(class)).join(set_dir(set));
            std::fs::create_dir_all(&dir)?;
            for frame in 0..spec.frames_per_set {
                let m = generate_frame(spec, class, set, frame);
                let path = dir.join(format!("frame_{frame:03}.pgm"));
                write_pgm(&path, &m)?;
            }
        }
    }
    Ok(())
}

/// Writes an intensity matrix in `[0, 1]` as a binary PGM (P5) file.
fn write_pgm(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let (h, w) = m.shape();
    let mut buf = Vec::with_capacity(h * w + 32);
    write!(buf, "P5\n{w} {h}\n255\n")?;
    for r in 0..h {
        for c in 0..w {
            buf.push((m[(r, c)] * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    std::fs::write(path, buf)?;
    Ok(())
}
