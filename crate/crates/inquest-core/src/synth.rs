//! Seeded synthetic designs used by the test suites and the stability
//! benchmarks.

use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::Matrix;
use crate::math;
use crate::sampling;

fn clamp_unit(v: f64) -> f64 {
    math::fmin(math::fmax(v, 0.01), 0.99)
}

/// Score-like design with a few informative columns and the rest noise.
/// Labels alternate balanced. Informative columns carry the label signal
/// with enough independent jitter that no single column separates the
/// classes alone, so a tuned sparse fit must keep all of them.
pub fn informative_noise_design(
    n: usize,
    n_informative: usize,
    n_noise: usize,
    seed: u64,
) -> (Matrix, Vec<Label>) {
    let h = n_informative + n_noise;
    let mut rng = sampling::derive_rng(seed, 7_100);
    let mut labels: Vec<Label> = (0..n)
        .map(|i| if i % 2 == 0 { Label::Relevant } else { Label::Irrelevant })
        .collect();
    sampling::shuffle(&mut rng, &mut labels);
    let mut x = Matrix::zeros(n, h);
    for i in 0..n {
        let y = labels[i].value();
        for j in 0..n_informative {
            let v = 0.5 + 0.25 * y + 0.30 * math::standard_normal(&mut rng);
            x.set(i, j, clamp_unit(v));
        }
        for j in n_informative..h {
            let v = 0.5 + 0.15 * math::standard_normal(&mut rng);
            x.set(i, j, clamp_unit(v));
        }
    }
    (x, labels)
}

/// Correlated-cluster design: `clusters` latent factors, each duplicated
/// into `members` noisy copies; the label is the sign of the factor sum
/// plus a noisy threshold. Every cluster is informative but its members
/// are nearly interchangeable, so sparse fits pick arbitrary
/// representatives; the threshold noise keeps full-data coefficients from
/// being a clean function of realized cluster strength.
pub fn correlated_clusters_design(
    n: usize,
    clusters: usize,
    members: usize,
    noise_sd: f64,
    label_noise_sd: f64,
    seed: u64,
) -> (Matrix, Vec<Label>) {
    let h = clusters * members;
    let mut rng = sampling::derive_rng(seed, 7_200);
    let mut x = Matrix::zeros(n, h);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut total = 0.0;
        for c in 0..clusters {
            let z = math::standard_normal(&mut rng);
            total += z;
            for m in 0..members {
                x.set(i, c * members + m, z + noise_sd * math::standard_normal(&mut rng));
            }
        }
        total += label_noise_sd * math::standard_normal(&mut rng);
        labels.push(if total >= 0.0 { Label::Relevant } else { Label::Irrelevant });
    }
    (x, labels)
}

/// Independent, equally informative columns: each feature is the label
/// signal plus noise, no correlation structure.
pub fn independent_informative_design(
    n: usize,
    h: usize,
    signal: f64,
    seed: u64,
) -> (Matrix, Vec<Label>) {
    let mut rng = sampling::derive_rng(seed, 7_300);
    let mut labels: Vec<Label> = (0..n)
        .map(|i| if i % 2 == 0 { Label::Relevant } else { Label::Irrelevant })
        .collect();
    sampling::shuffle(&mut rng, &mut labels);
    let mut x = Matrix::zeros(n, h);
    for i in 0..n {
        let y = labels[i].value();
        for j in 0..h {
            x.set(i, j, signal * y + math::standard_normal(&mut rng));
        }
    }
    (x, labels)
}

/// Tiny random instance for optimizer oracles: n in 2..=max_n rows (both
/// classes guaranteed), h in 1..=max_h features in [-1, 1].
pub fn tiny_instance(max_n: usize, max_h: usize, seed: u64) -> (Matrix, Vec<Label>) {
    let mut rng = sampling::derive_rng(seed, 7_400);
    let n = 2 + sampling::below(&mut rng, max_n.saturating_sub(1));
    let h = 1 + sampling::below(&mut rng, max_h);
    let mut x = Matrix::zeros(n, h);
    for i in 0..n {
        for j in 0..h {
            x.set(i, j, sampling::unit_f64(&mut rng) * 2.0 - 1.0);
        }
    }
    let mut labels: Vec<Label> = (0..n)
        .map(|i| if i % 2 == 0 { Label::Relevant } else { Label::Irrelevant })
        .collect();
    sampling::shuffle(&mut rng, &mut labels);
    (x, labels)
}

/// Balanced labels with features shuffled independently of them; nothing
/// to learn.
pub fn label_shuffled_design(n: usize, h: usize, seed: u64) -> (Matrix, Vec<Label>) {
    let mut rng = sampling::derive_rng(seed, 7_500);
    let mut x = Matrix::zeros(n, h);
    for i in 0..n {
        for j in 0..h {
            x.set(i, j, sampling::unit_f64(&mut rng));
        }
    }
    let mut labels: Vec<Label> = (0..n)
        .map(|i| if i % 2 == 0 { Label::Relevant } else { Label::Irrelevant })
        .collect();
    sampling::shuffle(&mut rng, &mut labels);
    (x, labels)
}
