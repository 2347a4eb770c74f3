#![allow(dead_code)]

use dimsel::corpus::Vocabulary;
use dimsel::eval::{SimilarityBenchmark, SimilarityPair};
use dimsel::EmbeddingMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> EmbeddingMatrix {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    EmbeddingMatrix::from_vec(rows, cols, data).unwrap()
}

/// `w0, w1, ...` with descending counts.
pub fn word_vocab(n: usize) -> Vocabulary {
    Vocabulary::from_counts((0..n).map(|i| (format!("w{i}"), (n - i) as u64)).collect()).unwrap()
}

/// Random pairs over `w0..w{vocab}` plus a few out-of-vocabulary words.
/// Scores are drawn from a small set so ties are common.
pub fn random_benchmark(rng: &mut ChaCha8Rng, vocab: usize, pairs: usize) -> SimilarityBenchmark {
    let word = |rng: &mut ChaCha8Rng| {
        let i = rng.random_range(0..vocab + vocab / 10 + 1);
        if i < vocab {
            format!("w{i}")
        } else {
            format!("oov{i}")
        }
    };
    let pairs = (0..pairs)
        .map(|_| SimilarityPair {
            word1: word(rng),
            word2: word(rng),
            score: rng.random_range(0..20) as f64 / 2.0,
        })
        .collect();
    SimilarityBenchmark {
        name: "random".into(),
        pairs,
    }
}

/// Symmetric eigenvalues by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// `EᵀE`.
pub fn gram_of_columns(e: &EmbeddingMatrix) -> Vec<Vec<f64>> {
    let n = e.cols();
    let mut g = vec![vec![0.0; n]; n];
    for r in 0..e.rows() {
        let row = e.row(r);
        for i in 0..n {
            for j in 0..n {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    g
}

/// Brute-force average rank: 1 + (number smaller) + (ties - 1) / 2.
pub fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Textbook Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}
