//! Log-Euclidean kernels: the linear kernel, the arc-cosine family, and
//! the polynomial/exponential/Gaussian variants, plus Gram matrices and
//! their positive semi-definiteness.
//!
//! ```sh
//! cargo run --example loge_kernels
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spdset::kernels::{angular_j, gram, kernel_eval, KernelSpec};
use spdset::spd::SpdMatrix;

fn main() -> spdset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let items: Vec<SpdMatrix> = (0..12)
        .map(|_| SpdMatrix::random(6, 0.3, 3.0, &mut rng))
        .collect::<spdset::Result<_>>()?;

    // The angular dependence function behind the arc-cosine family:
    // J_r at the right angle, for each implemented order.
    println!("J_r(pi/2):");
    for r in 0..=3 {
        println!("  r = {r}: {:.6}", angular_j(r, std::f64::consts::FRAC_PI_2)?);
    }

    // Kernel values between two fixed items under every family.
    let gamma = KernelSpec::default_gamma(&items)?;
    println!("data-derived gamma = {gamma:.6}");
    let specs = [
        KernelSpec::Linear,
        KernelSpec::Arc { order: 0 },
        KernelSpec::Arc { order: 1 },
        KernelSpec::Arc { order: 2 },
        KernelSpec::Arc { order: 3 },
        KernelSpec::Polynomial {
            gamma,
            offset: 1.0,
            degree: 2,
        },
        KernelSpec::Exponential { gamma },
        KernelSpec::Gaussian { gamma },
    ];
    println!("k(X0, X1) under each kernel:");
    for spec in &specs {
        println!("  {spec}: {:.6}", kernel_eval(&items[0], &items[1], spec)?);
    }

    // Every family is Mercer on the log-Euclidean feature space: the
    // Gram matrix construction validates symmetry and PSD-ness.
    println!("Gram matrices over {} items:", items.len());
    for spec in &specs {
        let g = gram(&items, spec)?;
        let (min_eig, max_eig) = g.eigen_extrema()?;
        println!("  {spec}: min eig {min_eig:.3e}, max eig {max_eig:.3e}");
    }
    Ok(())
}
