//! Kernel-target alignment and kernel weight learning.
//!
//! Given per-order Grams `C_r^i` for every training image set `i`, the
//! question is which orders' kernels actually separate the classes. Each
//! order induces a kernel *between image sets*,
//!
//! ```text
//! [K_w^r]_{ij} = tr(C_r^i C_r^j),
//! ```
//!
//! and the ideal kernel, the one a perfect classifier would produce, is
//! `K_T = Y Yᵀ` for the one-hot label matrix `Y` (entries 1 for same-class
//! pairs, 0 otherwise). The alignment between a kernel and the target is a
//! normalized Frobenius inner product,
//!
//! ```text
//! ρ(K, K_T) = ⟨K, K_T⟩_F / √(⟨K, K⟩_F ⟨K_T, K_T⟩_F),
//! ```
//!
//! and the weight vector `W` maximizing the alignment of `Σ_r w_r K̂_w^r`
//! (with centered kernels `K̂`) solves the normal equations
//!
//! ```text
//! Ω W = β,   Ω_{rs} = ⟨K̂_w^r, K̂_w^s⟩_F,   β_r = ⟨K̂_w^r, K_T⟩_F,
//! ```
//!
//! normalized to `‖W‖ = 1`. The solved weights are then binarized: the `k`
//! largest magnitudes become 1, the rest 0, and that mask is what the
//! pipeline applies when combining per-order Grams.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{center_gram, GramMatrix};
use crate::pipeline::CovDsS;

/// A learned weighting of kernel orders: the unit-norm solution of the
/// alignment problem plus a 0/1 selection mask over the same orders.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    orders: Vec<usize>,
    raw: Vec<f64>,
    mask: Vec<f64>,
}

impl KernelWeights {
    /// The kernel orders the entries refer to, in the order they appear.
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Unit-norm solved weights, one per order.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// The 0/1 selection mask, one entry per order. Fresh solutions start
    /// with every order selected; [`binarize_weights`] narrows it to `k`.
    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    /// Convenience view of the mask as the weight slice
    /// [`crate::pipeline::build_covds_s`] consumes.
    pub fn mask_values(&self) -> Vec<f64> {
        self.mask.clone()
    }

    pub fn selected_orders(&self) -> Vec<usize> {
        self.orders
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| **m != 0.0)
            .map(|(r, _)| *r)
            .collect()
    }
}

/// The data of one weight-learning instance: per-order set-level kernels
/// `K_w^r` over the training sets and the label target `K_T = Y Yᵀ`.
#[derive(Debug, Clone)]
pub struct AlignmentProblem {
    orders: Vec<usize>,
    local_kernels: Vec<GramMatrix>,
    target: GramMatrix,
}

impl AlignmentProblem {
    /// Assembles a problem from explicit parts: one set-level Gram per
    /// order, and the 0/1 target. All matrices must agree in size.
    pub fn new(
        orders: Vec<usize>,
        local_kernels: Vec<GramMatrix>,
        target: GramMatrix,
    ) -> Result<Self> {
        if orders.is_empty() || orders.len() != local_kernels.len() {
            return Err(Error::InvalidInput(format!(
                "{} orders vs {} kernels",
                orders.len(),
                local_kernels.len()
            )));
        }
        let m = target.dim();
        for (r, k) in orders.iter().zip(&local_kernels) {
            if k.dim() != m {
                return Err(Error::DimMismatch {
                    left: k.dim(),
                    right: m,
                });
            }
            let _ = r;
        }
        Ok(AlignmentProblem {
            orders,
            local_kernels,
            target,
        })
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn local_kernels(&self) -> &[GramMatrix] {
        &self.local_kernels
    }

    pub fn target(&self) -> &GramMatrix {
        &self.target
    }
}

/// Kernel-target alignment `ρ(K, K_T)`: the cosine between two kernels
/// under the Frobenius inner product. Zero-norm operands are refused.
pub fn alignment(k: &GramMatrix, target: &GramMatrix) -> Result<f64> {
    let num = k.frobenius_dot(target)?;
    let nk = k.frobenius_norm();
    let nt = target.frobenius_norm();
    if nk == 0.0 || nt == 0.0 {
        return Err(Error::DegenerateAlignment(
            "kernel with zero Frobenius norm".into(),
        ));
    }
    Ok(num / nk / nt)
}

/// Builds the weight-learning problem from training representations: for
/// every order `r`, the set-level kernel `[K_w^r]_{ij} = tr(C_r^i C_r^j)`,
/// and the label target `K_T = Y Yᵀ`.
///
/// Every representation must carry its per-order Grams
/// ([`crate::pipeline::PipelineConfig::keep_locals`]) over the same order
/// list; `labels` pairs with `train` by position.
pub fn build_problem(train: &[CovDsS], labels: &[u32]) -> Result<AlignmentProblem> {
    if train.len() < 2 {
        return Err(Error::InvalidInput(
            "weight learning needs at least 2 training sets".into(),
        ));
    }
    if train.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} training sets vs {} labels",
            train.len(),
            labels.len()
        )));
    }
    let orders = train[0].orders_used().to_vec();
    let mut per_set: Vec<&[GramMatrix]> = Vec::with_capacity(train.len());
    for (i, rep) in train.iter().enumerate() {
        if rep.orders_used() != orders.as_slice() {
            return Err(Error::InvalidInput(format!(
                "training set {i} used orders {:?}, expected {orders:?}",
                rep.orders_used()
            )));
        }
        let locals = rep.locals().ok_or_else(|| {
            Error::InvalidInput(format!(
                "training set {i} carries no per-order Grams (keep_locals)"
            ))
        })?;
        per_set.push(locals);
    }

    let m = train.len();
    let mut local_kernels = Vec::with_capacity(orders.len());
    for (ri, r) in orders.iter().enumerate() {
        let mut entries = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = per_set[i][ri]
                    .frobenius_dot(&per_set[j][ri])
                    .map_err(|e| e.with_context(format!("order {r}, sets ({i}, {j})")))?;
                entries[(i, j)] = v;
                entries[(j, i)] = v;
            }
        }
        local_kernels.push(
            GramMatrix::new(entries, None)
                .map_err(|e| e.with_context(format!("set-level kernel for order {r}")))?,
        );
    }

    let target = DMatrix::from_fn(m, m, |i, j| if labels[i] == labels[j] { 1.0 } else { 0.0 });
    let target = GramMatrix::new(target, None)?;
    Ok(AlignmentProblem {
        orders,
        local_kernels,
        target,
    })
}

/// Solves the centered alignment normal equations `Ω W = β` and returns the
/// unit-norm weights (all orders still selected in the mask).
///
/// The system is assembled and solved with each centered kernel scaled to
/// unit Frobenius norm, then the solution is mapped back to the original
/// parametrization. Kernels of different orders can differ in magnitude
/// by many decades (an arc kernel of order `r` scales like the feature
/// norm to the `2r`), and on the raw system any uniform ridge large
/// enough to matter for the big orders would drown the small ones; the
/// optimizer is exactly scale-covariant, so solving the normalized system
/// changes nothing mathematically while keeping the Gramian's diagonal at
/// unit scale. There a tiny ridge (`1e-10 · tr(Ω)/R`) keeps nearly
/// collinear kernels solvable; truly degenerate systems are reported as
/// ill-conditioned. The sign is fixed so the resulting alignment is
/// nonnegative (`βᵀW ≥ 0`), which a direct solve of a positive definite
/// system already satisfies.
pub fn solve_weights(problem: &AlignmentProblem) -> Result<KernelWeights> {
    let r_count = problem.local_kernels.len();
    let mut centered = Vec::with_capacity(r_count);
    for (r, k) in problem.orders.iter().zip(&problem.local_kernels) {
        centered.push(
            center_gram(k).map_err(|e| e.with_context(format!("centering order {r}")))?,
        );
    }

    // A zero centered kernel (constant kernel) carries no alignment
    // information; scale 1 leaves its β and Ω entries at zero and the
    // ridge pins its weight to zero.
    let scales: Vec<f64> = centered
        .iter()
        .map(|k| {
            let n = k.frobenius_norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();

    let mut beta = DVector::zeros(r_count);
    for (ri, k) in centered.iter().enumerate() {
        beta[ri] = k.frobenius_dot(problem.target())? / scales[ri];
    }
    let mut omega = DMatrix::zeros(r_count, r_count);
    for i in 0..r_count {
        for j in 0..=i {
            let v = centered[i].frobenius_dot(&centered[j])? / (scales[i] * scales[j]);
            omega[(i, j)] = v;
            omega[(j, i)] = v;
        }
    }

    let trace = omega.trace();
    if !trace.is_finite() || trace <= 0.0 {
        return Err(Error::IllConditioned(
            "every centered kernel has zero energy".into(),
        ));
    }
    let ridge = 1e-10 * trace / r_count as f64;
    for i in 0..r_count {
        omega[(i, i)] += ridge;
    }

    let chol = Cholesky::new(omega).ok_or_else(|| {
        Error::IllConditioned("centered kernel Gramian is not positive definite".into())
    })?;
    let solved = chol.solve(&beta);
    // Orientation: keep the alignment nonnegative. The projection has the
    // same sign in either parametrization.
    let projected: f64 = solved.iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
    // Back to weights on the unscaled kernels.
    let mut raw: Vec<f64> = solved
        .iter()
        .zip(&scales)
        .map(|(w, s)| w / s)
        .collect();
    let norm = raw.iter().map(|w| w * w).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::IllConditioned(format!(
            "weight solution has norm {norm}"
        )));
    }
    let flip = if projected < 0.0 { -1.0 } else { 1.0 };
    for v in &mut raw {
        *v *= flip / norm;
    }
    Ok(KernelWeights {
        orders: problem.orders.clone(),
        mask: vec![1.0; raw.len()],
        raw,
    })
}

/// Keeps the `k` largest-magnitude weights (ties resolved toward the lower
/// order) as a 0/1 mask; `1 ≤ k ≤ R`.
pub fn binarize_weights(weights: &KernelWeights, k: usize) -> Result<KernelWeights> {
    let r_count = weights.raw.len();
    if k == 0 || k > r_count {
        return Err(Error::InvalidInput(format!(
            "mask size {k} outside 1..={r_count}"
        )));
    }
    let mut ranked: Vec<usize> = (0..r_count).collect();
    ranked.sort_by(|&a, &b| {
        weights.raw[b]
            .abs()
            .partial_cmp(&weights.raw[a].abs())
            .expect("finite weights compare")
            .then(weights.orders[a].cmp(&weights.orders[b]))
    });
    let mut mask = vec![0.0; r_count];
    for &idx in ranked.iter().take(k) {
        mask[idx] = 1.0;
    }
    Ok(KernelWeights {
        orders: weights.orders.clone(),
        raw: weights.raw.clone(),
        mask,
    })
}
