//! Dissimilarity measures between SPD matrices.
//!
//! Four ways of comparing `X, Y` in the SPD cone, each the square root of a
//! classical divergence or squared geodesic distance:
//!
//! ```text
//! AIRM     d(X, Y) = ‖log(X^{-1/2} Y X^{-1/2})‖_F        (affine-invariant)
//! Stein    d(X, Y) = √( ln det((X+Y)/2) − ½ ln det(XY) )
//! Jeffrey  d(X, Y) = √( ½ tr(X⁻¹Y) + ½ tr(Y⁻¹X) − n )
//! LEM      d(X, Y) = ‖log X − log Y‖_F                    (log-Euclidean)
//! ```
//!
//! All four vanish exactly when `X = Y` and are symmetric in their
//! arguments. AIRM and LEM are true geodesic distances (AIRM additionally
//! invariant under congruence `X ↦ AXAᵀ` and inversion); Stein and Jeffrey
//! are square roots of symmetrized divergences that behave similarly at a
//! fraction of the cost.
//!
//! The divergence-based forms can come out a hair negative in floating
//! point when `X ≈ Y`; values in `(-1e-10, 0)` are clamped to zero, anything
//! more negative is reported as a numerical error.

use std::fmt;

use crate::error::{Error, Result};
use crate::spd::{spd_log, sym_eig, SpdMatrix};

/// Negative values of a squared distance closer to zero than this are
/// treated as rounding noise and clamped; anything beyond is an error.
const NEGATIVE_SQ_TOL: f64 = 1e-10;

/// Selects one of the four SPD dissimilarities by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Airm,
    Stein,
    Jeffrey,
    Lem,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Airm,
        MetricKind::Stein,
        MetricKind::Jeffrey,
        MetricKind::Lem,
    ];

    /// Evaluates this dissimilarity on a pair of SPD matrices.
    pub fn distance(&self, x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
        match self {
            MetricKind::Airm => airm_dist(x, y),
            MetricKind::Stein => stein_div(x, y),
            MetricKind::Jeffrey => jeffrey_div(x, y),
            MetricKind::Lem => lem_dist(x, y),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Airm => "airm",
            MetricKind::Stein => "stein",
            MetricKind::Jeffrey => "jeffrey",
            MetricKind::Lem => "lem",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "airm" => Ok(MetricKind::Airm),
            "stein" => Ok(MetricKind::Stein),
            "jeffrey" => Ok(MetricKind::Jeffrey),
            "lem" => Ok(MetricKind::Lem),
            other => Err(Error::InvalidInput(format!(
                "unknown metric {other:?}; expected airm, stein, jeffrey or lem"
            ))),
        }
    }
}

fn check_dims(x: &SpdMatrix, y: &SpdMatrix) -> Result<usize> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(x.dim())
}

/// Interprets a squared distance that may be slightly negative from
/// rounding: small negatives clamp to zero, large ones are refused.
fn sqrt_clamped(sq: f64, what: &str) -> Result<f64> {
    if !sq.is_finite() {
        return Err(Error::Numerical(format!("{what} is not finite")));
    }
    if sq < -NEGATIVE_SQ_TOL {
        return Err(Error::Numerical(format!(
            "squared {what} is {sq:.6e}, below the -{NEGATIVE_SQ_TOL:e} tolerance"
        )));
    }
    Ok(sq.max(0.0).sqrt())
}

/// Affine-invariant Riemannian distance
/// `‖log(X^{-1/2} Y X^{-1/2})‖_F = √Σ ln² λᵢ` over the eigenvalues `λᵢ` of
/// the whitened matrix.
pub fn airm_dist(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    check_dims(x, y)?;
    let ex = sym_eig(x.sym())?;
    if ex.values[ex.values.len() - 1] <= 0.0 {
        return Err(Error::NotPositiveDefinite(
            "first operand of the affine-invariant distance".into(),
        ));
    }
    let inv_sqrt = ex.map(|e| 1.0 / e.sqrt());
    let whitened = inv_sqrt.as_matrix() * y.as_matrix() * inv_sqrt.as_matrix();
    let whitened = crate::spd::SymMatrix::new(whitened)?;
    let ew = sym_eig(&whitened)?;
    let mut sq = 0.0;
    for &lambda in &ew.values {
        if lambda <= 0.0 {
            return Err(Error::NotPositiveDefinite(
                "second operand of the affine-invariant distance".into(),
            ));
        }
        sq += lambda.ln().powi(2);
    }
    sqrt_clamped(sq, "affine-invariant distance")
}

/// Log-determinant `ln det X` via the eigenvalues; errors if any is
/// nonpositive.
fn log_det(x: &SpdMatrix, role: &str) -> Result<f64> {
    let eig = sym_eig(x.sym())?;
    let mut ld = 0.0;
    for &e in &eig.values {
        if e <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "{role} has eigenvalue {e:.6e}"
            )));
        }
        ld += e.ln();
    }
    Ok(ld)
}

/// Square root of the Stein (S-) divergence
/// `ln det((X+Y)/2) − ½ ln det(XY)`.
pub fn stein_div(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    check_dims(x, y)?;
    let mid = (x.as_matrix() + y.as_matrix()) * 0.5;
    let mid = SpdMatrix::assume_spd(crate::spd::SymMatrix::new(mid)?);
    let ld_mid = log_det(&mid, "midpoint (X+Y)/2")?;
    let ld_x = log_det(x, "first operand")?;
    let ld_y = log_det(y, "second operand")?;
    sqrt_clamped(ld_mid - 0.5 * (ld_x + ld_y), "Stein divergence")
}

/// `tr(X⁻¹ Y)` through the eigendecomposition of `X`: with `X = U D Uᵀ`,
/// `tr(X⁻¹Y) = Σᵢ (UᵀYU)ᵢᵢ / dᵢ`. No explicit inverse is formed.
fn trace_inv_prod(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    let ex = sym_eig(x.sym())?;
    if ex.values[ex.values.len() - 1] <= 0.0 {
        return Err(Error::NotPositiveDefinite(
            "operand inverted by the Jeffrey divergence".into(),
        ));
    }
    let rotated = ex.vectors.transpose() * y.as_matrix() * &ex.vectors;
    let mut tr = 0.0;
    for (i, &d) in ex.values.iter().enumerate() {
        tr += rotated[(i, i)] / d;
    }
    Ok(tr)
}

/// Square root of the Jeffrey (symmetrized Kullback-Leibler) divergence
/// `½ tr(X⁻¹Y) + ½ tr(Y⁻¹X) − n`.
pub fn jeffrey_div(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    let n = check_dims(x, y)?;
    let sq = 0.5 * trace_inv_prod(x, y)? + 0.5 * trace_inv_prod(y, x)? - n as f64;
    sqrt_clamped(sq, "Jeffrey divergence")
}

/// Log-Euclidean distance `‖log X − log Y‖_F`.
pub fn lem_dist(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    check_dims(x, y)?;
    let lx = spd_log(x)?;
    let ly = spd_log(y)?;
    Ok((lx.as_matrix() - ly.as_matrix()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spd::SymMatrix;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spd_diag(values: &[f64]) -> SpdMatrix {
        let n = values.len();
        SpdMatrix::try_new(
            SymMatrix::from_fn(n, |i, j| if i == j { values[i] } else { 0.0 }).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_at_identical_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = SpdMatrix::random(5, 0.2, 5.0, &mut rng).unwrap();
        for m in MetricKind::ALL {
            let d = m.distance(&x, &x).unwrap();
            assert!(d.abs() < 1e-6, "{m} at (X, X) gave {d}");
        }
    }

    #[test]
    fn airm_analytic_diagonal() {
        // X = I, Y = Diag(e², e⁻²): whitened eigenvalues are e², e⁻², so
        // the squared distance is 2² + (−2)² = 8.
        let x = SpdMatrix::identity(2);
        let y = spd_diag(&[f64::exp(2.0), f64::exp(-2.0)]);
        assert_relative_eq!(
            airm_dist(&x, &y).unwrap(),
            8f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn stein_analytic_scalar() {
        // 1x1 case X = 1, Y = 4: ln(2.5) − ½ ln 4 = ln(2.5/2) = ln 1.25.
        let d = stein_div(&spd_diag(&[1.0]), &spd_diag(&[4.0])).unwrap();
        assert_relative_eq!(d, 1.25f64.ln().sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn jeffrey_analytic_scalar() {
        // 1x1 case X = 1, Y = 2: ½·2 + ½·½ − 1 = ¼.
        let d = jeffrey_div(&spd_diag(&[1.0]), &spd_diag(&[2.0])).unwrap();
        assert_relative_eq!(d, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn lem_analytic_diagonal() {
        // X = I, Y = Diag(e², 1): log difference is Diag(2, 0).
        let d = lem_dist(&SpdMatrix::identity(2), &spd_diag(&[f64::exp(2.0), 1.0])).unwrap();
        assert_relative_eq!(d, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x = SpdMatrix::random(4, 0.2, 4.0, &mut rng).unwrap();
            let y = SpdMatrix::random(4, 0.2, 4.0, &mut rng).unwrap();
            for m in MetricKind::ALL {
                let dxy = m.distance(&x, &y).unwrap();
                let dyx = m.distance(&y, &x).unwrap();
                assert_relative_eq!(dxy, dyx, max_relative = 1e-9, epsilon = 1e-12);
                assert!(dxy > 0.0);
            }
        }
    }

    #[test]
    fn airm_affine_and_inversion_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let x = SpdMatrix::random(4, 0.3, 3.0, &mut rng).unwrap();
            let y = SpdMatrix::random(4, 0.3, 3.0, &mut rng).unwrap();
            let d = airm_dist(&x, &y).unwrap();

            // Congruence by a random invertible A (SPD + identity keeps it
            // comfortably invertible).
            let a = SpdMatrix::random(4, 0.5, 2.0, &mut rng).unwrap();
            let ax = a.as_matrix() * x.as_matrix() * a.as_matrix();
            let ay = a.as_matrix() * y.as_matrix() * a.as_matrix();
            let ax = SpdMatrix::assume_spd(SymMatrix::new(ax).unwrap());
            let ay = SpdMatrix::assume_spd(SymMatrix::new(ay).unwrap());
            let d_cong = airm_dist(&ax, &ay).unwrap();
            assert!(
                (d_cong - d).abs() < 1e-7 * (1.0 + d),
                "congruence moved the distance: {d} vs {d_cong}"
            );

            // Inversion invariance: d(X⁻¹, Y⁻¹) = d(X, Y).
            let xi = sym_eig(x.sym()).unwrap().map(|e| 1.0 / e);
            let yi = sym_eig(y.sym()).unwrap().map(|e| 1.0 / e);
            let d_inv = airm_dist(
                &SpdMatrix::assume_spd(xi),
                &SpdMatrix::assume_spd(yi),
            )
            .unwrap();
            assert!(
                (d_inv - d).abs() < 1e-7 * (1.0 + d),
                "inversion moved the distance: {d} vs {d_inv}"
            );
        }
    }

    #[test]
    fn lem_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let x = SpdMatrix::random(3, 0.1, 8.0, &mut rng).unwrap();
            let y = SpdMatrix::random(3, 0.1, 8.0, &mut rng).unwrap();
            let z = SpdMatrix::random(3, 0.1, 8.0, &mut rng).unwrap();
            let dxz = lem_dist(&x, &z).unwrap();
            let dxy = lem_dist(&x, &y).unwrap();
            let dyz = lem_dist(&y, &z).unwrap();
            assert!(dxz <= dxy + dyz + 1e-10);
        }
    }

    #[test]
    fn jeffrey_matches_explicit_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let x = SpdMatrix::random(5, 0.2, 5.0, &mut rng).unwrap();
            let y = SpdMatrix::random(5, 0.2, 5.0, &mut rng).unwrap();
            let xi = x.as_matrix().clone().try_inverse().unwrap();
            let yi = y.as_matrix().clone().try_inverse().unwrap();
            let sq = 0.5 * (&xi * y.as_matrix()).trace() + 0.5 * (&yi * x.as_matrix()).trace()
                - 5.0;
            assert_relative_eq!(
                jeffrey_div(&x, &y).unwrap(),
                sq.sqrt(),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let x = SpdMatrix::identity(2);
        let y = SpdMatrix::identity(3);
        for m in MetricKind::ALL {
            assert!(matches!(
                m.distance(&x, &y),
                Err(Error::DimMismatch { left: 2, right: 3 })
            ));
        }
    }

    #[test]
    fn metric_names_round_trip() {
        for m in MetricKind::ALL {
            let parsed: MetricKind = m.name().parse().unwrap();
            assert_eq!(parsed, m);
        }
        assert!("mahalanobis".parse::<MetricKind>().is_err());
    }
}
