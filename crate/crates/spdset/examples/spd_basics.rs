//! Core SPD operations: construction, eigendecomposition, the matrix
//! log/exp pair, and mean centralization.
//!
//! ```sh
//! cargo run --example spd_basics
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spdset::spd::{mean_centralize, spd_log, sym_eig, sym_exp, SpdMatrix, SymMatrix};

fn main() -> spdset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // A random SPD matrix with eigenvalues in [0.5, 4].
    let x = SpdMatrix::random(5, 0.5, 4.0, &mut rng)?;
    let eig = sym_eig(x.sym())?;
    println!("eigenvalues of X (descending): {:.4?}", eig.values);

    // log maps the manifold to the symmetric matrices; exp maps back.
    let lx = spd_log(&x)?;
    let back = sym_exp(&lx)?;
    let roundtrip = (back.as_matrix() - x.as_matrix()).norm() / x.as_matrix().norm();
    println!("relative log/exp roundtrip error: {roundtrip:.3e}");

    // Symmetric matrices with negative eigenvalues still exponentiate:
    // exp lands on the manifold from anywhere in the tangent space.
    let tangent = SymMatrix::from_fn(5, |i, j| if i == j { -1.5 } else { 0.2 })?;
    let point = sym_exp(&tangent)?;
    let smallest = sym_eig(point.sym())?.values.last().copied().unwrap();
    println!("exp of an indefinite symmetric matrix is SPD: min eig = {smallest:.4}");

    // Mean centralization: after the operation the matrix log has zero
    // row and column sums.
    let centered = mean_centralize(&x)?;
    let lc = spd_log(&centered)?;
    let worst_row_sum = (0..5)
        .map(|r| lc.as_matrix().row(r).sum().abs())
        .fold(0.0f64, f64::max);
    println!("largest |row sum| of log(centralized X): {worst_row_sum:.3e}");

    // Centralizing twice changes nothing: the operation is idempotent.
    let twice = mean_centralize(&centered)?;
    let drift = (twice.as_matrix() - centered.as_matrix()).norm();
    println!("idempotence drift: {drift:.3e}");
    Ok(())
}
