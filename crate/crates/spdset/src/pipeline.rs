//! From image sets to SPD-kernel set representations.
//!
//! The classical covariance descriptor summarises an image set by the
//! sample covariance of its vectorized frames: for frames `s₁ … sₙ` (as
//! `d`-vectors) with mean `s̄`,
//!
//! ```text
//! C = S̃ S̃ᵀ,   S̃ = (n−1)^{-1/2} (S − s̄ 1ᵀ),
//! ```
//!
//! regularized as `C* = C + λI` with `λ = lambda_frac · tr(C)`.
//!
//! The kernel-matrix representation goes further. A sliding window cuts
//! every frame into patches; the stack of a given window across all frames
//! is a *sub-image set*, vectorized into a `win²×n` feature matrix. Each
//! sub-image set becomes a Gaussian descriptor — its feature mean `μ` and
//! covariance `Σ` embedded as an SPD matrix
//!
//! ```text
//! G(β) = [ Σ + β²μμᵀ   βμ ]
//!        [ βμᵀ          1 ],
//! ```
//!
//! which is congruent to `Diag(Σ, 1)` and therefore SPD exactly when `Σ`
//! is. After mean centralization of each descriptor, the whole image set is
//! represented by the `N×N` Gram matrices of arc-cosine kernels between its
//! `N` sub-image descriptors, one Gram `C_r` per order `r`, combined as
//! `Σ_r w_r C_r`. The combined matrix is itself PSD whenever the weights
//! are nonnegative, so image sets become points on (the closure of) the SPD
//! manifold again — and the manifold machinery applies one level up.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{arc_grams_from_logs, GramMatrix, LogFeature, MAX_ARC_ORDER};
use crate::spd::{double_center, sym_eig, SpdMatrix, SymMatrix, CLAMP_REL_FLOOR};

/// An image set: at least two grayscale frames of equal size with
/// intensities in `[0, 1]`, tagged with its class label and a free-form
/// source identifier used in diagnostics.
#[derive(Debug, Clone)]
pub struct ImageSet {
    label: u32,
    frames: Vec<DMatrix<f64>>,
    source_id: String,
}

impl ImageSet {
    pub fn new(label: u32, frames: Vec<DMatrix<f64>>, source_id: impl Into<String>) -> Result<Self> {
        let source_id = source_id.into();
        if frames.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "image set {source_id:?} needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        let (h, w) = (frames[0].nrows(), frames[0].ncols());
        if h == 0 || w == 0 {
            return Err(Error::InvalidInput(format!(
                "image set {source_id:?} has empty frames"
            )));
        }
        for (k, f) in frames.iter().enumerate() {
            if f.nrows() != h || f.ncols() != w {
                return Err(Error::InvalidInput(format!(
                    "image set {source_id:?}: frame {k} is {}x{}, expected {h}x{w}",
                    f.nrows(),
                    f.ncols()
                )));
            }
            if f.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
                return Err(Error::InvalidInput(format!(
                    "image set {source_id:?}: frame {k} has intensities outside [0, 1]"
                )));
            }
        }
        Ok(ImageSet {
            label,
            frames,
            source_id,
        })
    }

    pub fn label(&self) -> u32 {
        self.label
    }

    pub fn frames(&self) -> &[DMatrix<f64>] {
        &self.frames
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Frame size as `(height, width)`.
    pub fn frame_dims(&self) -> (usize, usize) {
        (self.frames[0].nrows(), self.frames[0].ncols())
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }
}

/// One sliding-window position across all frames: a `d×n` feature matrix
/// whose column `j` is the window of frame `j`, vectorized row-major
/// (`d = win²` when produced by [`extract_subsets`]).
#[derive(Debug, Clone)]
pub struct SubImageSet {
    window_origin: (usize, usize),
    features: DMatrix<f64>,
}

impl SubImageSet {
    /// Wraps an explicit feature matrix; columns are observations.
    pub fn new(window_origin: (usize, usize), features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() < 2 {
            return Err(Error::InvalidInput(format!(
                "sub-image set needs a nonempty feature dimension and at least 2 columns, got {}x{}",
                features.nrows(),
                features.ncols()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "sub-image set features contain non-finite values".into(),
            ));
        }
        Ok(SubImageSet {
            window_origin,
            features,
        })
    }

    /// Window origin as `(row, col)` of the top-left pixel.
    pub fn window_origin(&self) -> (usize, usize) {
        self.window_origin
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }
}

/// An SPD descriptor of one sub-image set.
#[derive(Debug, Clone)]
pub struct SubSetDescriptor {
    pub matrix: SpdMatrix,
    /// Whether [`crate::spd::mean_centralize`] has been applied.
    pub centralized: bool,
}

/// Kernel-matrix representation of an image set: the combined Gram matrix
/// `Σ_r w_r C_r` over its sub-image descriptors, plus the orders and
/// weights that built it and (optionally) the per-order Grams themselves.
#[derive(Debug, Clone)]
pub struct CovDsS {
    matrix: GramMatrix,
    orders_used: Vec<usize>,
    weights: Vec<f64>,
    locals: Option<Vec<GramMatrix>>,
}

impl CovDsS {
    /// Assembles a representation from parts, e.g. in tests or when the
    /// combined matrix comes from elsewhere.
    pub fn from_parts(
        matrix: GramMatrix,
        orders_used: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if orders_used.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} orders vs {} weights",
                orders_used.len(),
                weights.len()
            )));
        }
        Ok(CovDsS {
            matrix,
            orders_used,
            weights,
            locals: None,
        })
    }

    /// The combined `N×N` Gram matrix.
    pub fn matrix(&self) -> &GramMatrix {
        &self.matrix
    }

    pub fn orders_used(&self) -> &[usize] {
        &self.orders_used
    }

    /// The weight actually applied to each order's Gram.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Per-order Grams, present when the pipeline ran with
    /// [`PipelineConfig::keep_locals`].
    pub fn locals(&self) -> Option<&[GramMatrix]> {
        self.locals.as_deref()
    }

    /// Re-combines the stored per-order Grams under new weights. Requires
    /// the locals to have been kept.
    pub fn reweight(&self, weights: &[f64]) -> Result<CovDsS> {
        let locals = self.locals.as_ref().ok_or_else(|| {
            Error::InvalidInput("reweighting needs per-order Grams (keep_locals)".into())
        })?;
        let combined = combine_grams(locals, weights)?;
        Ok(CovDsS {
            matrix: combined,
            orders_used: self.orders_used.clone(),
            weights: weights.to_vec(),
            locals: self.locals.clone(),
        })
    }
}

/// Weighted sum of Gram matrices. The result is validated again (PSD is
/// guaranteed only for nonnegative weights).
fn combine_grams(locals: &[GramMatrix], weights: &[f64]) -> Result<GramMatrix> {
    if locals.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} Grams vs {} weights",
            locals.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidInput("non-finite kernel weight".into()));
    }
    let n = locals[0].dim();
    let mut combined = DMatrix::zeros(n, n);
    for (k, w) in locals.iter().zip(weights) {
        combined += k.entries() * *w;
    }
    GramMatrix::new(combined, None)
}

/// Everything the set-representation pipeline needs to know.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Sliding-window side length, in pixels.
    pub win: usize,
    /// Sliding-window step, in pixels.
    pub stride: usize,
    /// Mean-embedding strength β of the Gaussian descriptor.
    pub beta: f64,
    /// Covariance regularization as a fraction of the trace.
    pub lambda_frac: f64,
    /// Arc-cosine kernel orders evaluated per sub-image pair.
    pub orders: Vec<usize>,
    /// Relative eigenvalue floor applied when a combined representation is
    /// finalized back into a strict SPD matrix.
    pub eig_floor: f64,
    /// Keep the per-order Grams inside the produced [`CovDsS`].
    pub keep_locals: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            win: 6,
            stride: 2,
            beta: 1.0,
            lambda_frac: 1e-3,
            orders: vec![0, 1, 2, 3],
            eig_floor: 1e-8,
            keep_locals: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.win == 0 {
            return Err(Error::InvalidInput("window size must be >= 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::InvalidInput("stride must be >= 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "beta must be positive and finite, got {}",
                self.beta
            )));
        }
        if !(self.lambda_frac >= 0.0 && self.lambda_frac.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "lambda fraction must be nonnegative and finite, got {}",
                self.lambda_frac
            )));
        }
        if self.orders.is_empty() {
            return Err(Error::InvalidInput("at least one kernel order".into()));
        }
        for &r in &self.orders {
            if r > MAX_ARC_ORDER {
                return Err(Error::InvalidKernelSpec(format!(
                    "order {r} exceeds the maximum {MAX_ARC_ORDER}"
                )));
            }
        }
        let mut sorted = self.orders.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.orders.len() {
            return Err(Error::InvalidInput("duplicate kernel orders".into()));
        }
        if !(self.eig_floor > 0.0 && self.eig_floor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eigenvalue floor must be positive and finite, got {}",
                self.eig_floor
            )));
        }
        Ok(())
    }
}

/// Number of window positions per axis: `⌊(extent − win)/stride⌋ + 1`
/// along each of height and width.
pub fn window_grid(
    height: usize,
    width: usize,
    win: usize,
    stride: usize,
) -> Result<(usize, usize)> {
    if win == 0 || stride == 0 {
        return Err(Error::InvalidInput(
            "window size and stride must be >= 1".into(),
        ));
    }
    if win > height || win > width {
        return Err(Error::InvalidInput(format!(
            "window {win} larger than frame {height}x{width}"
        )));
    }
    Ok(((height - win) / stride + 1, (width - win) / stride + 1))
}

/// The classical covariance descriptor `C* = S̃S̃ᵀ + λI` of an image set,
/// with `λ = lambda_frac · tr(S̃S̃ᵀ)`.
///
/// With `lambda_frac = 0` the result reproduces the unregularized sample
/// covariance exactly; it is then only positive *semi*definite whenever
/// `n − 1 < d`, and downstream operations requiring strict positive
/// definiteness will reject it.
pub fn traditional_covds(set: &ImageSet, lambda_frac: f64) -> Result<SpdMatrix> {
    if !(lambda_frac >= 0.0 && lambda_frac.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lambda fraction must be nonnegative and finite, got {lambda_frac}"
        )));
    }
    let (h, w) = set.frame_dims();
    let d = h * w;
    let n = set.n_frames();
    // Column j is frame j vectorized row-major: pixel (r, c) -> r*w + c.
    let mut s = DMatrix::zeros(d, n);
    for (j, f) in set.frames().iter().enumerate() {
        for r in 0..h {
            for c in 0..w {
                s[(r * w + c, j)] = f[(r, c)];
            }
        }
    }
    let mean = s.column_mean();
    let scale = 1.0 / ((n - 1) as f64).sqrt();
    for j in 0..n {
        let mut col = s.column_mut(j);
        col -= &mean;
        col *= scale;
    }
    let c = &s * s.transpose();
    let c = SymMatrix::new(c)?;
    let tr = c.as_matrix().trace();
    if tr <= 0.0 {
        return Err(Error::DegenerateSet(format!(
            "image set {:?} has zero covariance trace (constant frames)",
            set.source_id()
        )));
    }
    let lambda = lambda_frac * tr;
    let mut out = c.into_matrix();
    for i in 0..d {
        out[(i, i)] += lambda;
    }
    // PSD by construction; strictly PD whenever lambda > 0.
    Ok(SpdMatrix::assume_spd(SymMatrix::new(out)?))
}

/// Cuts an image set into sub-image sets with a square sliding window.
/// Windows are enumerated row-major over their origins, `stride` pixels
/// apart; each yields a `win²×n` feature matrix (window pixels vectorized
/// row-major, one column per frame).
pub fn extract_subsets(set: &ImageSet, win: usize, stride: usize) -> Result<Vec<SubImageSet>> {
    let (h, w) = set.frame_dims();
    let (rows, cols) = window_grid(h, w, win, stride)?;
    let n = set.n_frames();
    let d = win * win;
    let mut out = Vec::with_capacity(rows * cols);
    for gy in 0..rows {
        for gx in 0..cols {
            let (oy, ox) = (gy * stride, gx * stride);
            let mut features = DMatrix::zeros(d, n);
            for (j, f) in set.frames().iter().enumerate() {
                for wr in 0..win {
                    for wc in 0..win {
                        features[(wr * win + wc, j)] = f[(oy + wr, ox + wc)];
                    }
                }
            }
            out.push(SubImageSet {
                window_origin: (oy, ox),
                features,
            });
        }
    }
    Ok(out)
}

/// Feature mean and regularized covariance of a sub-image set:
/// `μ`, `Σ + λI` with `λ = lambda_frac · tr(Σ)`.
fn feature_stats(
    sub: &SubImageSet,
    lambda_frac: f64,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let f = sub.features();
    let (d, n) = (f.nrows(), f.ncols());
    if n < 2 {
        return Err(Error::InvalidInput(
            "covariance needs at least 2 observations".into(),
        ));
    }
    let mu = f.column_mean();
    let mut centered = f.clone();
    for j in 0..n {
        let mut col = centered.column_mut(j);
        col -= &mu;
    }
    let mut sigma = (&centered * centered.transpose()) / (n as f64 - 1.0);
    let tr = sigma.trace();
    if tr <= 0.0 {
        return Err(Error::DegenerateSet(format!(
            "window {:?} has zero covariance trace (constant features)",
            sub.window_origin()
        )));
    }
    let lambda = lambda_frac * tr;
    for i in 0..d {
        sigma[(i, i)] += lambda;
    }
    Ok((mu, sigma))
}

/// The Gaussian-embedding matrix before SPD validation.
fn embed_sym(sub: &SubImageSet, beta: f64, lambda_frac: f64) -> Result<SymMatrix> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    if !(lambda_frac >= 0.0 && lambda_frac.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lambda fraction must be nonnegative and finite, got {lambda_frac}"
        )));
    }
    let (mu, sigma) = feature_stats(sub, lambda_frac)?;
    let d = mu.len();
    let mut g = DMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = sigma[(i, j)] + beta * beta * mu[i] * mu[j];
        }
        g[(i, d)] = beta * mu[i];
        g[(d, i)] = beta * mu[i];
    }
    g[(d, d)] = 1.0;
    SymMatrix::new(g)
}

/// Embeds a sub-image set as a Gaussian SPD descriptor
///
/// ```text
/// G(β) = [ Σ + β²μμᵀ  βμ ]
///        [ βμᵀ         1 ]
/// ```
///
/// of size `(d+1)×(d+1)`. `G` is congruent to `Diag(Σ + λI, 1)`, hence SPD
/// whenever the regularized covariance is; validation clamps eigenvalues
/// below `1e-10` of the largest (the clamp stays inactive for `λ > 0` on
/// non-degenerate data).
pub fn gaussian_embed(sub: &SubImageSet, beta: f64, lambda_frac: f64) -> Result<SubSetDescriptor> {
    let g = embed_sym(sub, beta, lambda_frac)?;
    let matrix = SpdMatrix::clamped(g, CLAMP_REL_FLOOR)?;
    Ok(SubSetDescriptor {
        matrix,
        centralized: false,
    })
}

/// Builds the kernel-matrix representation of an image set: sliding-window
/// sub-image sets, Gaussian embedding, mean centralization, one arc-cosine
/// Gram `C_r` per configured order, combined as `Σ_r weights[r] · C_r`.
///
/// `weights` pairs with `cfg.orders` (typically a learned 0/1 mask; see
/// [`crate::alignment`]). Errors from individual windows carry the window
/// origin as context.
pub fn build_covds_s(set: &ImageSet, cfg: &PipelineConfig, weights: &[f64]) -> Result<CovDsS> {
    cfg.validate()?;
    if weights.len() != cfg.orders.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights vs {} orders",
            weights.len(),
            cfg.orders.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidInput("non-finite kernel weight".into()));
    }
    let subsets = extract_subsets(set, cfg.win, cfg.stride)?;
    // Fused embed -> clamp -> log -> double-center: one eigendecomposition
    // per window instead of four. Pinned to the public op composition by a
    // unit test below.
    let mut feats = Vec::with_capacity(subsets.len());
    for sub in &subsets {
        let feat = centered_log_feature(sub, cfg).map_err(|e| {
            e.with_context(format!(
                "set {:?}, window {:?}",
                set.source_id(),
                sub.window_origin()
            ))
        })?;
        feats.push(feat);
    }
    let locals = arc_grams_from_logs(&feats, &cfg.orders)
        .map_err(|e| e.with_context(format!("set {:?}", set.source_id())))?;
    let combined = combine_grams(&locals, weights)
        .map_err(|e| e.with_context(format!("set {:?}", set.source_id())))?;
    Ok(CovDsS {
        matrix: combined,
        orders_used: cfg.orders.clone(),
        weights: weights.to_vec(),
        locals: cfg.keep_locals.then_some(locals),
    })
}

/// One window of the fused pipeline path: the double-centered log of the
/// (clamped) Gaussian embedding.
fn centered_log_feature(sub: &SubImageSet, cfg: &PipelineConfig) -> Result<LogFeature> {
    let g = embed_sym(sub, cfg.beta, cfg.lambda_frac)?;
    let eig = sym_eig(&g)?;
    let max = eig.values[0];
    if max <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "embedding eigenvalues top out at {max:.6e}"
        )));
    }
    let floor = CLAMP_REL_FLOOR * max;
    let log = eig.map(|e| e.max(floor).ln());
    let centered = SymMatrix::new(double_center(log.as_matrix()))?;
    Ok(LogFeature::from_centered_log(centered))
}

/// Clamps a combined representation back into the strict SPD cone:
/// eigenvalues below `eig_floor` times the largest are lifted to that
/// floor. Representations that are already strictly SPD pass through
/// unchanged; an all-zero representation is refused.
pub fn finalize_representation(rep: &CovDsS, eig_floor: f64) -> Result<SpdMatrix> {
    let sym = SymMatrix::new(rep.matrix().entries().clone())?;
    SpdMatrix::clamped(sym, eig_floor).map_err(|e| match e {
        Error::NotPositiveDefinite(msg) => {
            Error::DegenerateRepresentation(format!("combined kernel matrix collapsed: {msg}"))
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram, KernelSpec};
    use crate::spd::{mean_centralize, spd_log};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(h: usize, w: usize, f: impl FnMut(usize, usize) -> f64) -> DMatrix<f64> {
        DMatrix::from_fn(h, w, f)
    }

    fn random_image_set(
        label: u32,
        h: usize,
        w: usize,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> ImageSet {
        let frames: Vec<DMatrix<f64>> = (0..n)
            .map(|_| frame(h, w, |_, _| rng.random::<f64>()))
            .collect();
        ImageSet::new(label, frames, format!("random-{label}")).unwrap()
    }

    #[test]
    fn image_set_validation() {
        let f = frame(2, 2, |_, _| 0.5);
        assert!(matches!(
            ImageSet::new(0, vec![f.clone()], "one"),
            Err(Error::InvalidInput(_))
        ));
        let other = frame(3, 2, |_, _| 0.5);
        assert!(matches!(
            ImageSet::new(0, vec![f.clone(), other], "sizes"),
            Err(Error::InvalidInput(_))
        ));
        let hot = frame(2, 2, |_, _| 1.5);
        assert!(matches!(
            ImageSet::new(0, vec![f.clone(), hot], "range"),
            Err(Error::InvalidInput(_))
        ));
        assert!(ImageSet::new(0, vec![f.clone(), f], "ok").is_ok());
    }

    #[test]
    fn traditional_covds_hand_example() {
        // Frames (1x2 grids) [1, 0] and [0, 0]: columns (1,0), (0,0);
        // mean (。5, 0); centered/scaled columns (±0.5, 0); C = [[0.5,0],[0,0]].
        let set = ImageSet::new(
            0,
            vec![
                DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
                DMatrix::from_row_slice(1, 2, &[0.0, 0.0]),
            ],
            "hand",
        )
        .unwrap();
        let c = traditional_covds(&set, 0.0).unwrap();
        let m = c.as_matrix();
        assert_eq!(m[(0, 0)], 0.5);
        assert_eq!(m[(0, 1)], 0.0);
        assert_eq!(m[(1, 1)], 0.0);

        // Regularization adds lambda = 1e-3 * 0.5 on the diagonal.
        let c = traditional_covds(&set, 1e-3).unwrap();
        assert_relative_eq!(c.as_matrix()[(0, 0)], 0.5 + 5e-4, max_relative = 1e-15);
        assert_relative_eq!(c.as_matrix()[(1, 1)], 5e-4, max_relative = 1e-15);
    }

    #[test]
    fn traditional_covds_matches_entrywise_covariance() {
        // The matrix product route must agree with the direct entrywise
        // sample covariance.
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let set = random_image_set(0, 4, 3, 6, &mut rng);
        let c = traditional_covds(&set, 0.0).unwrap();
        let (h, w) = set.frame_dims();
        let d = h * w;
        let n = set.n_frames();
        let pixel = |idx: usize, j: usize| {
            let (r, col) = (idx / w, idx % w);
            set.frames()[j][(r, col)]
        };
        for a in 0..d {
            for b in 0..d {
                let ma: f64 = (0..n).map(|j| pixel(a, j)).sum::<f64>() / n as f64;
                let mb: f64 = (0..n).map(|j| pixel(b, j)).sum::<f64>() / n as f64;
                let cov: f64 = (0..n)
                    .map(|j| (pixel(a, j) - ma) * (pixel(b, j) - mb))
                    .sum::<f64>()
                    / (n - 1) as f64;
                assert_relative_eq!(c.as_matrix()[(a, b)], cov, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn traditional_covds_rejects_constant_set() {
        let f = frame(2, 2, |_, _| 0.25);
        let set = ImageSet::new(0, vec![f.clone(), f], "flat").unwrap();
        assert!(matches!(
            traditional_covds(&set, 1e-3),
            Err(Error::DegenerateSet(_))
        ));
    }

    #[test]
    fn window_grid_counts() {
        // The two standard layouts: 24x24 frames, window 6.
        assert_eq!(window_grid(24, 24, 6, 2).unwrap(), (10, 10));
        assert_eq!(window_grid(24, 24, 6, 3).unwrap(), (7, 7));
        // Non-square odds and ends.
        assert_eq!(window_grid(7, 5, 3, 2).unwrap(), (3, 2));
        assert!(window_grid(4, 4, 5, 1).is_err());
        assert!(window_grid(4, 4, 2, 0).is_err());
    }

    #[test]
    fn extract_subsets_layout_and_content() {
        // 4x4 frames holding their own coordinates (scaled into [0,1]).
        let enc = |r: usize, c: usize| (r as f64 * 4.0 + c as f64) / 16.0;
        let f0 = frame(4, 4, enc);
        let f1 = frame(4, 4, |r, c| enc(r, c) / 2.0);
        let set = ImageSet::new(0, vec![f0, f1], "coords").unwrap();
        let subs = extract_subsets(&set, 2, 2).unwrap();
        assert_eq!(subs.len(), 4);
        let origins: Vec<_> = subs.iter().map(|s| s.window_origin()).collect();
        assert_eq!(origins, vec![(0, 0), (0, 2), (2, 0), (2, 2)]);
        // Window at (2, 0), frame 0, window pixel (1, 1) -> global (3, 1),
        // feature row 1*2+1 = 3.
        let s = &subs[2];
        assert_eq!(s.features().nrows(), 4);
        assert_eq!(s.features().ncols(), 2);
        assert_eq!(s.features()[(3, 0)], enc(3, 1));
        assert_eq!(s.features()[(3, 1)], enc(3, 1) / 2.0);
    }

    proptest! {
        #[test]
        fn window_count_formula_matches_enumeration(
            h in 1usize..40,
            w in 1usize..40,
            win in 1usize..10,
            stride in 1usize..5,
        ) {
            prop_assume!(win <= h && win <= w);
            let (rows, cols) = window_grid(h, w, win, stride).unwrap();
            let mut count_rows = 0;
            let mut oy = 0;
            while oy + win <= h {
                count_rows += 1;
                oy += stride;
            }
            let mut count_cols = 0;
            let mut ox = 0;
            while ox + win <= w {
                count_cols += 1;
                ox += stride;
            }
            prop_assert_eq!(rows, count_rows);
            prop_assert_eq!(cols, count_cols);
        }
    }

    #[test]
    fn gaussian_embed_scalar_example() {
        // d = 1 features (1, 2, 3): mu = 2, unbiased sigma = 1; with
        // beta = 1, lambda = 0 the embedding is [[1+4, 2], [2, 1]].
        let sub = SubImageSet::new((0, 0), DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]))
            .unwrap();
        let desc = gaussian_embed(&sub, 1.0, 0.0).unwrap();
        let g = desc.matrix.as_matrix();
        assert_relative_eq!(g[(0, 0)], 5.0, max_relative = 1e-14);
        assert_relative_eq!(g[(0, 1)], 2.0, max_relative = 1e-14);
        assert_relative_eq!(g[(1, 1)], 1.0, max_relative = 1e-14);
        assert!(!desc.centralized);
    }

    #[test]
    fn gaussian_embed_rejects_degenerate_and_bad_params() {
        let flat = SubImageSet::new((0, 0), DMatrix::from_element(2, 3, 0.7)).unwrap();
        assert!(matches!(
            gaussian_embed(&flat, 1.0, 1e-3),
            Err(Error::DegenerateSet(_))
        ));
        let sub = SubImageSet::new((0, 0), DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]))
            .unwrap();
        assert!(matches!(
            gaussian_embed(&sub, 0.0, 1e-3),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            gaussian_embed(&sub, 1.0, -0.1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn gaussian_embed_is_strictly_spd_across_beta_range() {
        // Even with n-1 < d (singular raw covariance) the trace
        // regularization keeps the congruence argument intact for any beta.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let features = DMatrix::from_fn(9, 4, |_, _| rng.random::<f64>());
        let sub = SubImageSet::new((0, 0), features).unwrap();
        for beta in [0.05, 0.9, 14.0] {
            let desc = gaussian_embed(&sub, beta, 1e-3).unwrap();
            // Strict validation must pass without any clamping.
            assert!(
                SpdMatrix::try_new(desc.matrix.sym().clone()).is_ok(),
                "embedding at beta {beta} not strictly SPD"
            );
        }
    }

    fn small_config() -> PipelineConfig {
        PipelineConfig {
            win: 3,
            stride: 2,
            beta: 0.9,
            lambda_frac: 1e-3,
            orders: vec![0, 1, 2, 3],
            eig_floor: 1e-8,
            keep_locals: true,
        }
    }

    /// Largest relative deviation between the fused pipeline Grams and the
    /// public op composition (embed -> clamp -> centralize -> gram).
    fn fused_vs_naive_gap(set: &ImageSet, cfg: &PipelineConfig) -> f64 {
        let rep = build_covds_s(set, cfg, &vec![1.0; cfg.orders.len()]).unwrap();
        let descs: Vec<SpdMatrix> = extract_subsets(set, cfg.win, cfg.stride)
            .unwrap()
            .iter()
            .map(|sub| {
                let d = gaussian_embed(sub, cfg.beta, cfg.lambda_frac).unwrap();
                mean_centralize(&d.matrix).unwrap()
            })
            .collect();
        let mut worst: f64 = 0.0;
        for (r, local) in cfg.orders.iter().zip(rep.locals().unwrap()) {
            let naive = gram(&descs, &KernelSpec::Arc { order: *r }).unwrap();
            let diff = (naive.entries() - local.entries()).amax();
            let scale = naive.entries().amax().max(1.0);
            worst = worst.max(diff / scale);
        }
        worst
    }

    #[test]
    fn fused_path_matches_public_op_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let set = random_image_set(0, 9, 9, 5, &mut rng);

        // With a healthy regularization the embedding is well-conditioned
        // and the two routes agree almost to machine precision.
        let mut cfg = small_config();
        cfg.lambda_frac = 0.1;
        let gap = fused_vs_naive_gap(&set, &cfg);
        assert!(gap < 1e-12, "well-conditioned fused vs naive gap {gap}");

        // At the production regularization (1e-3 of the trace) the naive
        // route's extra exp/log round trip loses a few digits to the
        // embedding's condition number; the routes still agree far beyond
        // what any downstream decision can notice.
        cfg.lambda_frac = 1e-3;
        let gap = fused_vs_naive_gap(&set, &cfg);
        assert!(gap < 1e-7, "production fused vs naive gap {gap}");
    }

    #[test]
    fn covds_s_diagonal_reference_values() {
        // After centralization every descriptor has a well-defined log with
        // theta(x, x) = 0, so the order-0 Gram has unit diagonal and the
        // order-1 diagonal carries the squared log norms.
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let set = random_image_set(0, 9, 9, 5, &mut rng);
        let cfg = small_config();
        let rep = build_covds_s(&set, &cfg, &[1.0; 4]).unwrap();
        let locals = rep.locals().unwrap();

        let descs: Vec<SpdMatrix> = extract_subsets(&set, cfg.win, cfg.stride)
            .unwrap()
            .iter()
            .map(|sub| {
                let d = gaussian_embed(sub, cfg.beta, cfg.lambda_frac).unwrap();
                mean_centralize(&d.matrix).unwrap()
            })
            .collect();
        for (i, desc) in descs.iter().enumerate() {
            assert_relative_eq!(locals[0].entries()[(i, i)], 1.0, epsilon = 1e-9);
            let sq = spd_log(desc).unwrap().frobenius_norm().powi(2);
            assert_relative_eq!(locals[1].entries()[(i, i)], sq, max_relative = 1e-9);
        }
    }

    #[test]
    fn covds_s_invariant_under_frame_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let set = random_image_set(0, 9, 9, 5, &mut rng);
        let cfg = small_config();
        let rep = build_covds_s(&set, &cfg, &[1.0; 4]).unwrap();

        let mut frames = set.frames().to_vec();
        frames.reverse();
        frames.swap(0, 2);
        let permuted = ImageSet::new(0, frames, "permuted").unwrap();
        let rep_p = build_covds_s(&permuted, &cfg, &[1.0; 4]).unwrap();
        // High-order Gram entries scale like the sixth power of the log
        // norms, so compare relative to the largest entry.
        let diff = (rep.matrix().entries() - rep_p.matrix().entries()).amax();
        let scale = rep.matrix().entries().amax().max(1.0);
        assert!(
            diff / scale < 1e-10,
            "frame order leaked into the Gram: {diff} on scale {scale}"
        );
    }

    #[test]
    fn covds_s_weights_combine_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let set = random_image_set(0, 9, 9, 4, &mut rng);
        let cfg = small_config();
        let rep = build_covds_s(&set, &cfg, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let locals = rep.locals().unwrap();
        let expect = locals[0].entries() + locals[3].entries() * 2.0;
        assert_relative_eq!(rep.matrix().entries(), &expect, epsilon = 1e-12);

        // Reweighting recombines the stored locals.
        let re = rep.reweight(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(re.matrix().entries(), locals[1].entries(), epsilon = 1e-12);
        assert_eq!(re.weights(), &[0.0, 1.0, 0.0, 0.0]);

        assert!(matches!(
            build_covds_s(&set, &cfg, &[1.0; 3]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn finalize_lifts_rank_deficient_representations() {
        let diag = DMatrix::from_partial_diagonal(3, 3, &[1.0, 1.0, 0.0]);
        let rep = CovDsS::from_parts(
            GramMatrix::new(diag, None).unwrap(),
            vec![0],
            vec![1.0],
        )
        .unwrap();
        let spd = finalize_representation(&rep, 1e-8).unwrap();
        let eig = sym_eig(spd.sym()).unwrap();
        assert_relative_eq!(eig.values[2], 1e-8, max_relative = 1e-6);
        assert_relative_eq!(eig.values[0], 1.0, max_relative = 1e-12);

        // Strictly SPD input passes through unchanged.
        let already = DMatrix::from_partial_diagonal(2, 2, &[2.0, 1.0]);
        let rep = CovDsS::from_parts(
            GramMatrix::new(already.clone(), None).unwrap(),
            vec![0],
            vec![1.0],
        )
        .unwrap();
        let spd = finalize_representation(&rep, 1e-8).unwrap();
        assert_eq!(spd.as_matrix(), &already);

        // All-zero representations are refused.
        let zero = DMatrix::zeros(2, 2);
        let rep = CovDsS::from_parts(
            GramMatrix::new(zero, None).unwrap(),
            vec![0],
            vec![0.0],
        )
        .unwrap();
        assert!(matches!(
            finalize_representation(&rep, 1e-8),
            Err(Error::DegenerateRepresentation(_))
        ));
    }

    #[test]
    fn pipeline_config_validation() {
        let mut cfg = PipelineConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.orders = vec![0, 0];
        assert!(cfg.validate().is_err());
        cfg.orders = vec![5];
        assert!(cfg.validate().is_err());
        cfg.orders = vec![0];
        cfg.beta = -1.0;
        assert!(cfg.validate().is_err());
    }
}
