//! The four dissimilarities between SPD matrices, and the invariances
//! that distinguish them.
//!
//! ```sh
//! cargo run --example manifold_metrics
//! ```

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spdset::metrics::MetricKind;
use spdset::spd::{SpdMatrix, SymMatrix};

fn main() -> spdset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = SpdMatrix::random(4, 0.5, 3.0, &mut rng)?;
    let y = SpdMatrix::random(4, 0.5, 3.0, &mut rng)?;

    println!("pairwise dissimilarities between two random SPD matrices:");
    for metric in MetricKind::ALL {
        let d = metric.distance(&x, &y)?;
        println!("  {metric:>8}: {d:.6}");
    }

    // Every dissimilarity vanishes on identical arguments and is
    // symmetric in its inputs.
    for metric in MetricKind::ALL {
        assert!(metric.distance(&x, &x)? < 1e-7);
        let forward = metric.distance(&x, &y)?;
        let backward = metric.distance(&y, &x)?;
        assert!((forward - backward).abs() < 1e-10);
    }
    println!("self-distance ~ 0 and symmetry hold for all four");

    // The affine-invariant distance ignores congruence transformations
    // X -> A X A^T; the log-Euclidean distance generally does not.
    let a = DMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            1.0 + 0.3 * i as f64
        } else if i < j {
            0.4
        } else {
            0.0
        }
    });
    let congruence = |m: &SpdMatrix| -> spdset::Result<SpdMatrix> {
        let t = &a * m.as_matrix() * a.transpose();
        SpdMatrix::try_new(SymMatrix::new(t)?)
    };
    let xa = congruence(&x)?;
    let ya = congruence(&y)?;
    let airm_before = MetricKind::Airm.distance(&x, &y)?;
    let airm_after = MetricKind::Airm.distance(&xa, &ya)?;
    let lem_before = MetricKind::Lem.distance(&x, &y)?;
    let lem_after = MetricKind::Lem.distance(&xa, &ya)?;
    println!("congruence X -> AXA^T:");
    println!("  AIRM before {airm_before:.8}, after {airm_after:.8} (invariant)");
    println!("  LEM  before {lem_before:.8}, after {lem_after:.8} (not invariant)");
    assert!((airm_before - airm_after).abs() < 1e-8);
    Ok(())
}
