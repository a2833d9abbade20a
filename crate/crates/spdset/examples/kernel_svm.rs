//! Classifying SPD representations: nearest neighbour under the four
//! dissimilarities and the one-vs-all SVM on the log-Euclidean kernel.
//!
//! ```sh
//! cargo run --example kernel_svm
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdset::classify::{nn_classify, svm_predict, svm_train};
use spdset::metrics::MetricKind;
use spdset::spd::{sym_exp, SpdMatrix, SymMatrix};

/// SPD samples whose matrix logs cluster around a class-specific anchor.
fn sample(class: u32, rng: &mut ChaCha8Rng) -> spdset::Result<SpdMatrix> {
    let anchor = SymMatrix::from_fn(4, |i, j| {
        let diag = if i == j && i as u32 == class { 1.2 } else { 0.0 };
        diag + 0.15 * (rng.random::<f64>() - 0.5)
    })?;
    sym_exp(&anchor)
}

fn main() -> spdset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let classes = 3u32;
    let per_class = 8usize;
    let mut train = Vec::new();
    let mut train_labels = Vec::new();
    for class in 0..classes {
        for _ in 0..per_class {
            train.push(sample(class, &mut rng)?);
            train_labels.push(class);
        }
    }
    let queries: Vec<(SpdMatrix, u32)> = (0..30)
        .map(|i| {
            let class = i % classes;
            Ok((sample(class, &mut rng)?, class))
        })
        .collect::<spdset::Result<_>>()?;

    // Nearest neighbour under each dissimilarity.
    let pairs: Vec<(SpdMatrix, u32)> = train
        .iter()
        .cloned()
        .zip(train_labels.iter().copied())
        .collect();
    for metric in MetricKind::ALL {
        let correct = queries
            .iter()
            .filter(|(q, label)| nn_classify(&pairs, q, metric).is_ok_and(|p| p == *label))
            .count();
        println!("nn-{metric}: {correct}/{} correct", queries.len());
    }

    // One-vs-all SVM on the precomputed log-Euclidean Gram.
    let model = svm_train(&train, &train_labels, 10.0)?;
    println!("svm classes: {:?}", model.classes());
    let correct = queries
        .iter()
        .filter(|(q, label)| svm_predict(&model, q).is_ok_and(|p| p == *label))
        .count();
    println!("ker-svm: {correct}/{} correct", queries.len());

    // Decision details for one query.
    let (q, label) = &queries[0];
    println!(
        "query of class {label} -> predicted {}",
        svm_predict(&model, q)?
    );
    Ok(())
}
