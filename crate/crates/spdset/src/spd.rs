//! Symmetric and symmetric positive definite (SPD) matrices, and the
//! spectral calculus on them.
//!
//! Everything in this crate ultimately reduces to the eigendecomposition of
//! a symmetric matrix `A = U diag(e) Uᵀ`. Matrix functions are defined
//! spectrally:
//!
//! ```text
//! log(X) = U diag(ln e₁, …, ln eₙ) Uᵀ      (X SPD)
//! exp(A) = U diag(exp e₁, …, exp eₙ) Uᵀ    (A symmetric)
//! ```
//!
//! `log` maps the SPD cone onto the vector space of symmetric matrices and
//! `exp` maps it back; the two are mutual inverses. The log-Euclidean
//! framework works in that flat image space, so the accuracy of the whole
//! crate rests on the round-trip `exp(log(X)) ≈ X`.
//!
//! Mean centralization of an SPD matrix removes the first-order statistics
//! of its log: with `ln_c(X) = P log(X) P` for the centering projector
//! `P = I - (1/n) 1 1ᵀ`,
//!
//! ```text
//! centralize(X) = exp(P log(X) P),
//! ```
//!
//! i.e. the matrix log is double-centered (every row and column of the
//! result sums to zero) and mapped back to the cone.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a matrix is rejected as not
/// positive definite: `min eig <= SPD_REL_TOL * max eig` fails validation.
pub const SPD_REL_TOL: f64 = 1e-12;

/// Default relative eigenvalue floor used when clamping internally produced
/// matrices back into the SPD cone.
pub const CLAMP_REL_FLOOR: f64 = 1e-10;

/// Largest eigenvalue `sym_exp` accepts; `exp(700)` is still finite in f64,
/// anything noticeably larger overflows.
pub const EXP_EIG_LIMIT: f64 = 700.0;

/// A real symmetric matrix.
///
/// Construction symmetrizes its argument as `(A + Aᵀ)/2` and rejects
/// non-square or non-finite input, so a value of this type is always exactly
/// symmetric and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from an arbitrary square matrix by
    /// symmetrizing `(A + Aᵀ)/2`.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidInput(format!(
                "symmetric matrix must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.is_empty() {
            return Err(Error::InvalidInput("matrix dimension must be >= 1".into()));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "matrix contains non-finite entries".into(),
            ));
        }
        let sym = (&a + a.transpose()) * 0.5;
        Ok(SymMatrix { data: sym })
    }

    /// Builds the matrix entrywise from `f(i, j)`; only the lower triangle
    /// of `f` is consulted so the result is symmetric by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix::new(m)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Frobenius inner product `<A, B> = tr(AᵀB)`, which for symmetric
    /// operands equals `tr(AB)`.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.data.dotc(&other.data))
    }
}

/// A symmetric positive definite matrix.
///
/// The constructors differ in how they establish positive definiteness:
/// [`SpdMatrix::try_new`] verifies it spectrally and rejects, while
/// [`SpdMatrix::clamped`] lifts offending eigenvalues up to a relative
/// floor. [`SpdMatrix::assume_spd`] skips the check for matrices that are
/// SPD by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    sym: SymMatrix,
}

impl SpdMatrix {
    /// Validates that `a` is strictly positive definite: every eigenvalue
    /// must exceed [`SPD_REL_TOL`] times the largest one.
    pub fn try_new(a: SymMatrix) -> Result<Self> {
        let eig = sym_eig(&a)?;
        let max = eig.values[0];
        let min = eig.values[eig.values.len() - 1];
        if max <= 0.0 || min <= SPD_REL_TOL * max {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue range [{min:.6e}, {max:.6e}]"
            )));
        }
        Ok(SpdMatrix { sym: a })
    }

    /// Repairs a nearly-SPD matrix by raising every eigenvalue below
    /// `rel_floor * max eig` up to that floor. Fails if the largest
    /// eigenvalue is not positive (nothing to anchor the floor to).
    ///
    /// When no eigenvalue needs lifting the input is returned bit-for-bit,
    /// so already-SPD matrices pass through unchanged.
    pub fn clamped(a: SymMatrix, rel_floor: f64) -> Result<Self> {
        if !(rel_floor > 0.0 && rel_floor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eigenvalue floor must be positive and finite, got {rel_floor}"
            )));
        }
        let eig = sym_eig(&a)?;
        let max = eig.values[0];
        if max <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "largest eigenvalue {max:.6e} is not positive; clamping cannot repair this"
            )));
        }
        let floor = rel_floor * max;
        if eig.values[eig.values.len() - 1] >= floor {
            return Ok(SpdMatrix { sym: a });
        }
        let repaired = eig.map(|e| e.max(floor));
        Ok(SpdMatrix { sym: repaired })
    }

    /// Wraps a matrix the caller guarantees to be SPD (e.g. produced by a
    /// congruence of an SPD matrix, or `exp` of a symmetric one). No check
    /// is performed; downstream spectral operations will surface a
    /// violation as [`Error::NotPositiveDefinite`].
    pub fn assume_spd(a: SymMatrix) -> Self {
        SpdMatrix { sym: a }
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix {
            sym: SymMatrix::identity(n),
        }
    }

    /// Draws a random SPD matrix `U diag(e) Uᵀ` with eigenvalues uniform in
    /// `[eig_min, eig_max]` and `U` the orthogonal factor of a random
    /// Gaussian matrix. Useful for tests and examples.
    pub fn random(n: usize, eig_min: f64, eig_max: f64, rng: &mut impl Rng) -> Result<Self> {
        if !(0.0 < eig_min && eig_min <= eig_max && eig_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eigenvalue range [{eig_min}, {eig_max}] must be positive and ordered"
            )));
        }
        let gauss = DMatrix::from_fn(n, n, |_, _| {
            // Box-Muller keeps the dependency surface small; the tails do
            // not matter here, only that the matrix is generic.
            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        });
        let q = gauss.qr().q();
        let values = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                rng.random_range(eig_min..=eig_max)
            } else {
                0.0
            }
        });
        let m = &q * values * q.transpose();
        Ok(SpdMatrix {
            sym: SymMatrix::new(m)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.sym.as_matrix()
    }

    pub fn into_sym(self) -> SymMatrix {
        self.sym
    }
}

/// Eigendecomposition of a symmetric matrix: `A = U diag(values) Uᵀ` with
/// eigenvalues sorted in descending order.
///
/// The eigenvector signs are normalised (the first component of magnitude
/// above `1e-12` is made nonnegative) so repeated decompositions of equal
/// input are bitwise identical, which keeps downstream results
/// reproducible.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` pairing with `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl EigenPair {
    /// Reassembles `U diag(f(e)) Uᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &e) in self.values.iter().enumerate() {
            let fe = f(e);
            for i in 0..n {
                scaled[(i, k)] *= fe;
            }
        }
        let m = &scaled * self.vectors.transpose();
        // Reassembly is symmetric up to rounding; symmetrize exactly.
        SymMatrix::new(m).expect("eigen reassembly of a finite map is finite")
    }
}

/// Eigendecomposition of a symmetric matrix, deterministic across calls.
pub fn sym_eig(a: &SymMatrix) -> Result<EigenPair> {
    let n = a.dim();
    let src = a.as_matrix();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| src[(i, j)]);
    let eig = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigendecomposition failed: {e:?}")))?;
    let raw_values = eig.S();
    let raw_vectors = eig.U();
    if (0..n).any(|i| !raw_values[i].is_finite()) {
        return Err(Error::Numerical(
            "eigendecomposition produced non-finite eigenvalues".into(),
        ));
    }
    // faer returns eigenvalues in ascending order; reverse to descending
    // and normalise eigenvector signs (first component with magnitude above
    // 1e-12 made nonnegative) so equal inputs decompose identically.
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for dst in 0..n {
        let src_col = n - 1 - dst;
        values.push(raw_values[src_col]);
        let flip = (0..n)
            .map(|i| raw_vectors[(i, src_col)])
            .find(|v| v.abs() > 1e-12)
            .map_or(1.0, |v| if v < 0.0 { -1.0 } else { 1.0 });
        for i in 0..n {
            vectors[(i, dst)] = raw_vectors[(i, src_col)] * flip;
        }
    }
    if values.windows(2).any(|w| w[0] < w[1]) {
        // Defensive: the descending order is relied upon everywhere.
        return Err(Error::Numerical(
            "eigenvalues not returned in sorted order".into(),
        ));
    }
    Ok(EigenPair { values, vectors })
}

/// Principal matrix logarithm of an SPD matrix: `U diag(ln e) Uᵀ`.
pub fn spd_log(x: &SpdMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(x.sym())?;
    if let Some(&bad) = eig.values.iter().find(|v| **v <= 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "matrix log requires positive eigenvalues, found {bad:.6e}"
        )));
    }
    Ok(eig.map(f64::ln))
}

/// Matrix exponential of a symmetric matrix: `U diag(exp e) Uᵀ`. Always
/// SPD. Eigenvalues above [`EXP_EIG_LIMIT`] are refused rather than allowed
/// to overflow.
pub fn sym_exp(a: &SymMatrix) -> Result<SpdMatrix> {
    let eig = sym_eig(a)?;
    if let Some(&big) = eig.values.iter().find(|v| **v > EXP_EIG_LIMIT) {
        return Err(Error::ExpOverflow {
            eigenvalue: big,
            limit: EXP_EIG_LIMIT,
        });
    }
    // exp of a symmetric matrix has eigenvalues exp(e) > 0, hence SPD.
    Ok(SpdMatrix::assume_spd(eig.map(f64::exp)))
}

/// Double-centers a square matrix: subtracts row means and column means and
/// adds back the grand mean, so every row and column of the result sums to
/// zero. Symmetry is preserved.
pub(crate) fn double_center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| m.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| m.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] - row_means[i] - col_means[j] + grand)
}

/// Mean centralization of an SPD matrix: the matrix log is double-centered
/// and mapped back through `exp`,
///
/// ```text
/// centralize(X) = exp(P log(X) P),   P = I - (1/n) 1 1ᵀ.
/// ```
///
/// The operation is idempotent (centering a centered log changes nothing)
/// and maps the identity to itself.
pub fn mean_centralize(x: &SpdMatrix) -> Result<SpdMatrix> {
    let l = spd_log(x)?;
    let centered = double_center(l.as_matrix());
    let centered = SymMatrix::new(centered)?;
    sym_exp(&centered)
}
