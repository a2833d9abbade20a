//! Log-Euclidean kernels on the SPD manifold.
//!
//! All kernels here act on matrix logarithms, i.e. they are ordinary
//! Euclidean kernels evaluated in the flat image of the SPD cone under
//! `log`. The base inner product is
//!
//! ```text
//! k_LE(X, Y) = tr(log X · log Y),
//! ```
//!
//! and on top of it sit the arc-cosine kernels of integer order `r`,
//!
//! ```text
//! k_r(X, Y) = (1/π) ‖log X‖_F^r ‖log Y‖_F^r J_r(θ),
//! θ = arccos( tr(log X · log Y) / (‖log X‖_F ‖log Y‖_F) ),
//! ```
//!
//! with the angular functions
//!
//! ```text
//! J₀(θ) = π − θ
//! J₁(θ) = sin θ + (π − θ) cos θ
//! J₂(θ) = 3 sin θ cos θ + (π − θ)(1 + 2 cos²θ)
//! J₃(θ) = 4 sin³θ + 15 sin θ cos²θ + 9(π − θ) sin²θ cos θ + 15(π − θ) cos³θ
//! ```
//!
//! which satisfy `J_{r+1}(θ) = sin θ · d/dθ [ J_r(θ) / sin θ ] · (−sin θ)`
//! …more usefully stated: each `J_{r+1}` follows from `J_r` by the
//! derivative recursion checked numerically in the acceptance suite.
//! At the endpoints, `J_r(0) = (2r−1)!!·π` and `J_r(π) = 0`.
//!
//! Plus three standard variants of the base kernel: polynomial
//! `(γ·k_LE + c)^d`, exponential `exp(γ·k_LE)` and Gaussian
//! `exp(−γ‖log X − log Y‖²_F)`. Every family is positive semidefinite
//! (the Gram assembly verifies this spectrally).

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spd::{double_center, spd_log, sym_eig, SpdMatrix, SymMatrix};

/// Largest arc-cosine order with a closed-form angular function.
pub const MAX_ARC_ORDER: usize = 3;

/// How far outside `[-1, 1]` a computed cosine may fall before it is
/// treated as a genuine numerical failure instead of rounding noise.
const COS_EXCESS_TOL: f64 = 1e-9;

/// How asymmetric a matrix may be and still be accepted as a Gram matrix.
const GRAM_SYM_TOL: f64 = 1e-10;

/// A Gram matrix is accepted as PSD when its smallest eigenvalue is at
/// least `-PSD_REL_TOL * max(1, largest eigenvalue)`.
const PSD_REL_TOL: f64 = 1e-8;

/// Identifies a kernel on the SPD manifold together with its
/// hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `tr(log X · log Y)` — the log-Euclidean inner product.
    Linear,
    /// Arc-cosine kernel of the given order (0 through [`MAX_ARC_ORDER`]).
    Arc { order: usize },
    /// `(γ · tr(log X · log Y) + c)^degree`.
    Polynomial { gamma: f64, offset: f64, degree: u32 },
    /// `exp(γ · tr(log X · log Y))`.
    Exponential { gamma: f64 },
    /// `exp(−γ ‖log X − log Y‖²_F)`.
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    /// Checks hyperparameter ranges: orders within the closed-form set,
    /// bandwidths positive, polynomial offset nonnegative and degree at
    /// least one (both required for positive semidefiniteness).
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Arc { order } => {
                if order > MAX_ARC_ORDER {
                    Err(Error::InvalidKernelSpec(format!(
                        "arc-cosine order {order} exceeds the closed-form maximum {MAX_ARC_ORDER}"
                    )))
                } else {
                    Ok(())
                }
            }
            KernelSpec::Polynomial {
                gamma,
                offset,
                degree,
            } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    Err(Error::InvalidKernelSpec(format!(
                        "polynomial kernel needs gamma > 0, got {gamma}"
                    )))
                } else if !(offset >= 0.0 && offset.is_finite()) {
                    Err(Error::InvalidKernelSpec(format!(
                        "polynomial kernel needs offset >= 0, got {offset}"
                    )))
                } else if degree == 0 {
                    Err(Error::InvalidKernelSpec(
                        "polynomial kernel needs degree >= 1".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            KernelSpec::Exponential { gamma } | KernelSpec::Gaussian { gamma } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    Err(Error::InvalidKernelSpec(format!(
                        "kernel bandwidth must be positive, got {gamma}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The conventional bandwidth default `γ = 1 / mean(‖log Xᵢ‖²_F)` over
    /// a collection of SPD matrices.
    pub fn default_gamma(items: &[SpdMatrix]) -> Result<f64> {
        if items.is_empty() {
            return Err(Error::InvalidInput(
                "default bandwidth needs at least one matrix".into(),
            ));
        }
        let mut mean_sq = 0.0;
        for (i, x) in items.iter().enumerate() {
            let l = spd_log(x).map_err(|e| e.with_context(format!("item {i}")))?;
            mean_sq += l.frobenius_norm().powi(2);
        }
        mean_sq /= items.len() as f64;
        if mean_sq <= 0.0 {
            return Err(Error::InvalidInput(
                "all matrix logs vanish; bandwidth undefined".into(),
            ));
        }
        Ok(1.0 / mean_sq)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "loge-linear"),
            KernelSpec::Arc { order } => write!(f, "loge-arc(r={order})"),
            KernelSpec::Polynomial {
                gamma,
                offset,
                degree,
            } => write!(f, "loge-pol(gamma={gamma}, c={offset}, d={degree})"),
            KernelSpec::Exponential { gamma } => write!(f, "loge-exp(gamma={gamma})"),
            KernelSpec::Gaussian { gamma } => write!(f, "loge-gau(gamma={gamma})"),
        }
    }
}

/// Angular function `J_r(θ)` of the arc-cosine kernel family, for
/// `r ∈ {0, 1, 2, 3}` and `θ ∈ [0, π]` (a slack of 1e-12 outside the
/// interval is clamped).
pub fn angular_j(r: usize, theta: f64) -> Result<f64> {
    if r > MAX_ARC_ORDER {
        return Err(Error::InvalidKernelSpec(format!(
            "no closed form for J_{r}; maximum order is {MAX_ARC_ORDER}"
        )));
    }
    if !theta.is_finite() || !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&theta) {
        return Err(Error::InvalidInput(format!(
            "angle {theta} outside [0, pi]"
        )));
    }
    let t = theta.clamp(0.0, std::f64::consts::PI);
    let pi_t = std::f64::consts::PI - t;
    let (s, c) = (t.sin(), t.cos());
    Ok(match r {
        0 => pi_t,
        1 => s + pi_t * c,
        2 => 3.0 * s * c + pi_t * (1.0 + 2.0 * c * c),
        3 => {
            4.0 * s * s * s
                + 15.0 * s * c * c
                + 9.0 * pi_t * s * s * c
                + 15.0 * pi_t * c * c * c
        }
        _ => unreachable!(),
    })
}

/// Angle between two feature vectors with the zero-norm convention: if
/// either norm vanishes the angle is defined as π/2 (so order-0 kernels
/// give ½ and higher orders vanish through the norm factors).
fn angle_between(dot: f64, norm_x: f64, norm_y: f64, what: &str) -> Result<f64> {
    if norm_x == 0.0 || norm_y == 0.0 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    // Divide twice rather than by the product, which could underflow for
    // very small norms.
    let cos = dot / norm_x / norm_y;
    if !cos.is_finite() || cos.abs() > 1.0 + COS_EXCESS_TOL {
        return Err(Error::Numerical(format!(
            "{what}: cosine {cos} strays outside [-1, 1] beyond tolerance"
        )));
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// `J_r(0) / π = (2r−1)!!` for the closed-form orders.
const SELF_PAIR_FACTOR: [f64; MAX_ARC_ORDER + 1] = [1.0, 1.0, 3.0, 15.0];

/// `same` marks a pair known to be one item twice; its angle is zero by
/// definition, which sidesteps the steep `arccos` sensitivity at cos ≈ 1
/// (a one-ulp cosine deficit already costs ~1e-8 in angle). Zero-norm
/// items still follow the orthogonality convention.
fn arc_value(r: usize, dot: f64, norm_x: f64, norm_y: f64, same: bool, what: &str) -> Result<f64> {
    if same && norm_x > 0.0 {
        return Ok(norm_x.powi(2 * r as i32) * SELF_PAIR_FACTOR[r]);
    }
    let theta = angle_between(dot, norm_x, norm_y, what)?;
    let j = angular_j(r, theta)?;
    // 0^0 = 1 keeps the order-0 kernel well-defined at zero norms.
    let scale = norm_x.powi(r as i32) * norm_y.powi(r as i32);
    Ok(scale * j / std::f64::consts::PI)
}

/// Arc-cosine kernel of order `r` between plain Euclidean vectors:
/// `(1/π) ‖x‖^r ‖y‖^r J_r(θ)` with `θ` the angle between `x` and `y`.
pub fn arccos_kernel(x: &[f64], y: &[f64], r: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("empty feature vectors".into()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "feature vectors contain non-finite entries".into(),
        ));
    }
    KernelSpec::Arc { order: r }.validate()?;
    let same = std::ptr::eq(x.as_ptr(), y.as_ptr());
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    arc_value(r, dot, nx, ny, same, "arc-cosine kernel")
}

/// Per-item cache of what every log-Euclidean kernel consumes: the matrix
/// log and its Frobenius norm.
#[derive(Debug, Clone)]
pub(crate) struct LogFeature {
    pub(crate) log: DMatrix<f64>,
    pub(crate) norm: f64,
}

impl LogFeature {
    pub(crate) fn of(x: &SpdMatrix) -> Result<LogFeature> {
        let l = spd_log(x)?;
        let norm = l.frobenius_norm();
        Ok(LogFeature {
            log: l.into_matrix(),
            norm,
        })
    }

    pub(crate) fn from_centered_log(l: SymMatrix) -> LogFeature {
        let norm = l.frobenius_norm();
        LogFeature {
            log: l.into_matrix(),
            norm,
        }
    }
}

fn eval_from_logs(lx: &LogFeature, ly: &LogFeature, spec: &KernelSpec, same: bool) -> Result<f64> {
    let dot = lx.log.dotc(&ly.log);
    Ok(match *spec {
        KernelSpec::Linear => dot,
        KernelSpec::Arc { order } => {
            arc_value(order, dot, lx.norm, ly.norm, same, "arc kernel")?
        }
        KernelSpec::Polynomial {
            gamma,
            offset,
            degree,
        } => (gamma * dot + offset).powi(degree as i32),
        KernelSpec::Exponential { gamma } => (gamma * dot).exp(),
        KernelSpec::Gaussian { gamma } => {
            if same {
                1.0
            } else {
                let sq = (&lx.log - &ly.log).norm_squared();
                (-gamma * sq).exp()
            }
        }
    })
}

/// Log-Euclidean inner product `tr(log X · log Y)`.
pub fn loge_linear_kernel(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    kernel_eval(x, y, &KernelSpec::Linear)
}

/// Log-Euclidean arc-cosine kernel of order `r`.
pub fn loge_arc_kernel(x: &SpdMatrix, y: &SpdMatrix, r: usize) -> Result<f64> {
    kernel_eval(x, y, &KernelSpec::Arc { order: r })
}

/// Polynomial, exponential or Gaussian kernel on the matrix logs.
pub fn loge_variant_kernel(x: &SpdMatrix, y: &SpdMatrix, spec: &KernelSpec) -> Result<f64> {
    match spec {
        KernelSpec::Polynomial { .. } | KernelSpec::Exponential { .. } | KernelSpec::Gaussian { .. } => {
            kernel_eval(x, y, spec)
        }
        other => Err(Error::InvalidKernelSpec(format!(
            "{other} is not a variant kernel"
        ))),
    }
}

/// Evaluates any kernel family on a pair of SPD matrices.
pub fn kernel_eval(x: &SpdMatrix, y: &SpdMatrix, spec: &KernelSpec) -> Result<f64> {
    spec.validate()?;
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if std::ptr::eq(x, y) {
        let lx = LogFeature::of(x)?;
        return eval_from_logs(&lx, &lx, spec, true);
    }
    let lx = LogFeature::of(x)?;
    let ly = LogFeature::of(y)?;
    eval_from_logs(&lx, &ly, spec, false)
}

/// A validated kernel Gram matrix: square, symmetric (asymmetry beyond
/// 1e-10 is rejected, anything below is symmetrized away) and positive
/// semidefinite up to `-1e-8 · max(1, largest eigenvalue)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
    source: Option<KernelSpec>,
}

impl GramMatrix {
    /// Validates and wraps a candidate Gram matrix. `source` records which
    /// kernel produced it, when there is a single meaningful answer.
    pub fn new(entries: DMatrix<f64>, source: Option<KernelSpec>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.is_empty() {
            return Err(Error::InvalidInput(format!(
                "Gram matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let n = entries.nrows();
        let mut max_asym: f64 = 0.0;
        for i in 0..n {
            if !entries[(i, i)].is_finite() {
                return Err(Error::InvalidInput(
                    "Gram matrix contains non-finite entries".into(),
                ));
            }
            for j in 0..i {
                if !entries[(i, j)].is_finite() || !entries[(j, i)].is_finite() {
                    return Err(Error::InvalidInput(
                        "Gram matrix contains non-finite entries".into(),
                    ));
                }
                max_asym = max_asym.max((entries[(i, j)] - entries[(j, i)]).abs());
            }
        }
        if max_asym > GRAM_SYM_TOL {
            return Err(Error::KernelNotPsd(format!(
                "matrix is asymmetric by {max_asym:.3e}"
            )));
        }
        let sym = SymMatrix::new(entries)?;
        let eig = sym_eig(&sym)?;
        let max = eig.values[0];
        let min = eig.values[eig.values.len() - 1];
        if min < -PSD_REL_TOL * max.max(1.0) {
            return Err(Error::KernelNotPsd(format!(
                "smallest eigenvalue {min:.6e} (largest {max:.6e})"
            )));
        }
        Ok(GramMatrix {
            entries: sym.into_matrix(),
            source,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn source(&self) -> Option<&KernelSpec> {
        self.source.as_ref()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Frobenius inner product `tr(K₁ K₂)` between two Gram matrices.
    pub fn frobenius_dot(&self, other: &GramMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.entries.dotc(&other.entries))
    }

    /// Smallest and largest eigenvalues, mostly for diagnostics and tests.
    pub fn eigen_extrema(&self) -> Result<(f64, f64)> {
        let sym = SymMatrix::new(self.entries.clone())?;
        let eig = sym_eig(&sym)?;
        Ok((eig.values[eig.values.len() - 1], eig.values[0]))
    }
}

/// Gram matrix of `spec` over a list of SPD matrices. Each matrix log is
/// computed exactly once; failures carry the index of the offending item.
pub fn gram(items: &[SpdMatrix], spec: &KernelSpec) -> Result<GramMatrix> {
    spec.validate()?;
    if items.is_empty() {
        return Err(Error::InvalidInput("Gram of an empty list".into()));
    }
    let dim = items[0].dim();
    let mut logs = Vec::with_capacity(items.len());
    for (i, x) in items.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: x.dim(),
            });
        }
        logs.push(LogFeature::of(x).map_err(|e| e.with_context(format!("item {i}")))?);
    }
    gram_from_logs(&logs, spec)
}

pub(crate) fn gram_from_logs(logs: &[LogFeature], spec: &KernelSpec) -> Result<GramMatrix> {
    let n = logs.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = eval_from_logs(&logs[i], &logs[j], spec, i == j)
                .map_err(|e| e.with_context(format!("items ({i}, {j})")))?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    GramMatrix::new(entries, Some(spec.clone()))
}

/// Arc-cosine Grams for several orders over one list of SPD matrices,
/// sharing a single pass of matrix logs.
pub fn arc_grams(items: &[SpdMatrix], orders: &[usize]) -> Result<Vec<GramMatrix>> {
    if items.is_empty() {
        return Err(Error::InvalidInput("Gram of an empty list".into()));
    }
    if orders.is_empty() {
        return Err(Error::InvalidInput("no arc-cosine orders requested".into()));
    }
    let dim = items[0].dim();
    let mut logs = Vec::with_capacity(items.len());
    for (i, x) in items.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: x.dim(),
            });
        }
        logs.push(LogFeature::of(x).map_err(|e| e.with_context(format!("item {i}")))?);
    }
    arc_grams_from_logs(&logs, orders)
}

pub(crate) fn arc_grams_from_logs(
    logs: &[LogFeature],
    orders: &[usize],
) -> Result<Vec<GramMatrix>> {
    orders
        .iter()
        .map(|&r| gram_from_logs(logs, &KernelSpec::Arc { order: r }))
        .collect()
}

/// Double-centers a Gram matrix: `K̂ = P K P` with `P = I − (1/n) 1 1ᵀ`.
/// Every row and column of the result sums to zero; positive
/// semidefiniteness survives (P K P is a congruence).
pub fn center_gram(k: &GramMatrix) -> Result<GramMatrix> {
    let centered = double_center(k.entries());
    GramMatrix::new(centered, k.source.clone())
}
