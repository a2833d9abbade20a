//! Classifiers over SPD representations: nearest neighbour under any of the
//! manifold dissimilarities, and a one-vs-all kernel SVM on the
//! log-Euclidean inner product.
//!
//! The SVM solves the standard C-SVC dual per class,
//!
//! ```text
//! min ½ αᵀQα − 1ᵀα,   Q_pq = y_p y_q K(x_p, x_q),
//! s.t. 0 ≤ α_p ≤ C,  Σ_p α_p y_p = 0,
//! ```
//!
//! with `K(x, z) = tr(log x · log z)` precomputed as a Gram matrix, by
//! sequential minimal optimization with maximal-violating-pair selection.
//! Convergence is declared when the KKT violation gap drops to 1e-3.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::metrics::MetricKind;
use crate::spd::{spd_log, SpdMatrix};

/// KKT violation gap at which SMO declares convergence.
const SMO_TOL: f64 = 1e-3;

/// Curvature floor for the two-variable subproblem.
const SMO_TAU: f64 = 1e-12;

/// Nearest-neighbour classification of `query` against labeled training
/// representations. Ties (equal distances) resolve toward the smaller
/// class id, so the result does not depend on training order.
pub fn nn_classify(
    train: &[(SpdMatrix, u32)],
    query: &SpdMatrix,
    metric: MetricKind,
) -> Result<u32> {
    if train.is_empty() {
        return Err(Error::InvalidInput(
            "nearest neighbour needs at least one training sample".into(),
        ));
    }
    let mut best: Option<(f64, u32)> = None;
    for (i, (rep, label)) in train.iter().enumerate() {
        let d = metric
            .distance(rep, query)
            .map_err(|e| e.with_context(format!("training sample {i}")))?;
        best = match best {
            None => Some((d, *label)),
            Some((bd, bl)) if d < bd || (d == bd && *label < bl) => Some((d, *label)),
            keep => keep,
        };
    }
    Ok(best.expect("nonempty training list").1)
}

/// A trained one-vs-all kernel SVM over SPD representations.
///
/// Keeps the training matrix logs so prediction only has to take the log
/// of the query.
#[derive(Debug, Clone)]
pub struct SvmModel {
    classes: Vec<u32>,
    train_logs: Vec<DMatrix<f64>>,
    /// Per class: `α_p y_p` for every training sample `p`.
    coeffs: Vec<Vec<f64>>,
    /// Per class: the decision bias.
    bias: Vec<f64>,
    c: f64,
}

impl SvmModel {
    /// Class ids, ascending; `coeffs`/`bias` rows pair with this order.
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn cost(&self) -> f64 {
        self.c
    }

    /// Signed coefficients `α_p y_p` of the binary problem for `classes()[k]`.
    pub fn coefficients(&self, k: usize) -> &[f64] {
        &self.coeffs[k]
    }

    pub fn bias(&self, k: usize) -> f64 {
        self.bias[k]
    }
}

/// Trains the one-vs-all SVM on labeled SPD representations with box
/// parameter `c`. The log-Euclidean Gram of the training set is validated
/// (a non-PSD kernel is refused) and each class's dual is solved by SMO.
pub fn svm_train(reps: &[SpdMatrix], labels: &[u32], c: f64) -> Result<SvmModel> {
    if reps.is_empty() || reps.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} representations vs {} labels",
            reps.len(),
            labels.len()
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "SVM cost must be positive and finite, got {c}"
        )));
    }
    let mut classes: Vec<u32> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidInput(
            "SVM training needs at least two classes".into(),
        ));
    }
    let dim = reps[0].dim();
    let n = reps.len();
    let mut train_logs = Vec::with_capacity(n);
    for (i, rep) in reps.iter().enumerate() {
        if rep.dim() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: rep.dim(),
            });
        }
        train_logs.push(
            spd_log(rep)
                .map_err(|e| e.with_context(format!("training representation {i}")))?
                .into_matrix(),
        );
    }
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = train_logs[i].dotc(&train_logs[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    // Validation only; the solver reads the raw entries.
    let gram = GramMatrix::new(k, Some(crate::kernels::KernelSpec::Linear))
        .map_err(|e| e.with_context("training kernel"))?;
    let k = gram.entries();

    let mut coeffs = Vec::with_capacity(classes.len());
    let mut bias = Vec::with_capacity(classes.len());
    for &cls in &classes {
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == cls { 1.0 } else { -1.0 })
            .collect();
        let (alpha, b) =
            smo_binary(k, &y, c).map_err(|e| e.with_context(format!("class {cls}")))?;
        coeffs.push(
            alpha
                .iter()
                .zip(&y)
                .map(|(a, yy)| a * yy)
                .collect::<Vec<f64>>(),
        );
        bias.push(b);
    }
    Ok(SvmModel {
        classes,
        train_logs,
        coeffs,
        bias,
        c,
    })
}

/// SMO with maximal-violating-pair working set selection for one binary
/// problem. Returns the dual variables and the decision bias.
fn smo_binary(k: &DMatrix<f64>, y: &[f64], c: f64) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    // Gradient of the dual objective; starts at −1 everywhere.
    let mut g = vec![-1.0; n];
    let max_iter = 100_000.max(1000 * n);

    let mut last_gap = f64::INFINITY;
    let mut converged = false;
    for _ in 0..max_iter {
        // i maximizes −y g over I_up, j minimizes −y g over I_low.
        let mut i_best: Option<(usize, f64)> = None;
        let mut j_best: Option<(usize, f64)> = None;
        for p in 0..n {
            let v = -y[p] * g[p];
            let in_up = (y[p] > 0.0 && alpha[p] < c) || (y[p] < 0.0 && alpha[p] > 0.0);
            let in_low = (y[p] > 0.0 && alpha[p] > 0.0) || (y[p] < 0.0 && alpha[p] < c);
            if in_up && i_best.is_none_or(|(_, m)| v > m) {
                i_best = Some((p, v));
            }
            if in_low && j_best.is_none_or(|(_, m)| v < m) {
                j_best = Some((p, v));
            }
        }
        let ((i, m), (j, m_low)) = match (i_best, j_best) {
            (Some(a), Some(b)) => (a, b),
            // One side empty: every sample is optimally pinned.
            _ => {
                converged = true;
                break;
            }
        };
        last_gap = m - m_low;
        if last_gap <= SMO_TOL {
            converged = true;
            break;
        }

        // Two-variable subproblem along α_i += y_i d, α_j −= y_j d.
        let quad = (k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)]).max(SMO_TAU);
        let mut d = last_gap / quad;
        let room_i = if y[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if y[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        d = d.min(room_i).min(room_j);

        // Clamps keep rounding from creeping outside the box.
        alpha[i] = (alpha[i] + y[i] * d).clamp(0.0, c);
        alpha[j] = (alpha[j] - y[j] * d).clamp(0.0, c);
        for p in 0..n {
            g[p] += y[p] * d * (k[(p, i)] - k[(p, j)]);
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(format!(
            "SMO stopped after {max_iter} iterations with KKT gap {last_gap:.3e} (tolerance {SMO_TOL})"
        )));
    }

    // Bias from the free support vectors; fall back to the violation
    // midpoint when none are strictly inside the box.
    let mut b_sum = 0.0;
    let mut b_count = 0usize;
    for p in 0..n {
        if alpha[p] > 1e-8 * c && alpha[p] < c * (1.0 - 1e-8) {
            b_sum += -y[p] * g[p];
            b_count += 1;
        }
    }
    let b = if b_count > 0 {
        b_sum / b_count as f64
    } else {
        let mut m = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for p in 0..n {
            let v = -y[p] * g[p];
            let in_up = (y[p] > 0.0 && alpha[p] < c) || (y[p] < 0.0 && alpha[p] > 0.0);
            let in_low = (y[p] > 0.0 && alpha[p] > 0.0) || (y[p] < 0.0 && alpha[p] < c);
            if in_up {
                m = m.max(v);
            }
            if in_low {
                m_low = m_low.min(v);
            }
        }
        if m.is_finite() && m_low.is_finite() {
            (m + m_low) / 2.0
        } else {
            0.0
        }
    };
    Ok((alpha, b))
}

/// Predicts the class of an SPD representation: evaluates every one-vs-all
/// decision function and returns the class with the largest value, ties
/// toward the smaller class id.
pub fn svm_predict(model: &SvmModel, rep: &SpdMatrix) -> Result<u32> {
    let dim = model.train_logs[0].nrows();
    if rep.dim() != dim {
        return Err(Error::DimMismatch {
            left: dim,
            right: rep.dim(),
        });
    }
    let lq = spd_log(rep)?.into_matrix();
    let kq: Vec<f64> = model.train_logs.iter().map(|lt| lt.dotc(&lq)).collect();
    let mut best: Option<(f64, u32)> = None;
    for (k, &cls) in model.classes.iter().enumerate() {
        let f: f64 = model.coeffs[k]
            .iter()
            .zip(&kq)
            .map(|(co, kv)| co * kv)
            .sum::<f64>()
            + model.bias[k];
        best = match best {
            None => Some((f, cls)),
            Some((bf, _)) if f > bf => Some((f, cls)),
            keep => keep,
        };
    }
    Ok(best.expect("at least two classes").1)
}
