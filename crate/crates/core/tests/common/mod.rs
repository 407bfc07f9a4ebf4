//! Helpers shared by the integration tests: an independent eigensolver, fixture
//! generators and the finite-difference gradient check.
#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sentaxis::axis::DistanceMatrix;
use sentaxis::embedding::{sgns_loss, sgns_step, SgnsSample};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues in descending order and the matching unit eigenvectors as
/// columns.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].total_cmp(&a[[i, i]]));
    let values = order.iter().map(|&i| a[[i, i]]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    (values, vectors)
}

/// First principal component scores of the distance-matrix rows, computed
/// with the Jacobi solver.
pub fn oracle_pc1(dm: &DistanceMatrix) -> (Array1<f64>, f64, f64) {
    let k = dm.len();
    let means = dm.d.mean_axis(Axis(0)).unwrap();
    let x = &dm.d - &means.insert_axis(Axis(0));
    let cov = x.t().dot(&x) / (k as f64 - 1.0);
    let (values, vectors) = jacobi_eigen(&cov);
    (x.dot(&vectors.column(0)), values[0], values.get(1).copied().unwrap_or(0.0))
}

/// Random `k × k` distance matrix: half the time cosine distances of random
/// vectors, otherwise independent uniform entries in `[0, 2]`.
pub fn random_distance_matrix(rng: &mut ChaCha8Rng, k: usize) -> DistanceMatrix {
    let words: Vec<String> = (0..k).map(|i| format!("w{i}")).collect();
    let mut d = Array2::zeros((k, k));
    if rng.gen_bool(0.5) {
        let dim = rng.gen_range(2..=10);
        let vs: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        for i in 0..k {
            for j in i + 1..k {
                let c = sentaxis::embedding::cosine_distance(&vs[i], &vs[j]).unwrap();
                d[[i, j]] = c;
                d[[j, i]] = c;
            }
        }
    } else {
        for i in 0..k {
            for j in i + 1..k {
                let c = rng.gen_range(0.0..2.0);
                d[[i, j]] = c;
                d[[j, i]] = c;
            }
        }
    }
    DistanceMatrix::new(words, d).unwrap()
}

/// Largest component-wise difference between power-iteration pc1 and the
/// oracle's, up to a global sign, over `count` random fixtures of size 3..=8.
pub fn pca_suite(count: usize, seed: u64) -> Vec<(usize, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(3..=8);
        let dm = random_distance_matrix(&mut rng, k);
        let got = sentaxis::axis::principal_axis(&dm).unwrap();
        let (want, l1, l2) = oracle_pc1(&dm);
        let diff = |sign: f64| {
            got.pc1
                .iter()
                .zip(want.iter())
                .map(|(a, b)| (a - sign * b).abs())
                .fold(0.0, f64::max)
        };
        out.push((k, diff(1.0).min(diff(-1.0)), l2 / l1));
    }
    out
}

pub struct SgnsFixture {
    pub dim: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub sample: SgnsSample,
}

pub fn sgns_fixture() -> SgnsFixture {
    let text = std::fs::read_to_string(fixture("sgns5.txt")).unwrap();
    let mut input = Vec::new();
    let mut output = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let mut f = line.split_whitespace();
        let name = f.next().unwrap();
        let values = f.map(|x| x.parse::<f64>().unwrap());
        if name.starts_with("in") {
            input.extend(values);
        } else {
            output.extend(values);
        }
    }
    SgnsFixture {
        dim: 6,
        input,
        output,
        sample: SgnsSample {
            center: 0,
            context: 1,
            negatives: vec![2, 3, 4],
        },
    }
}

/// Largest relative error between the trainer's update direction and
/// central finite differences of the loss, over every input and output
/// weight.
pub fn sgns_gradient_error(fx: &SgnsFixture) -> f64 {
    let lr = 1e-3;
    let mut inp = fx.input.clone();
    let mut out = fx.output.clone();
    sgns_step(&mut inp, &mut out, fx.dim, &fx.sample, lr);
    let analytic_in: Vec<f64> = inp.iter().zip(&fx.input).map(|(a, b)| (a - b) / -lr).collect();
    let analytic_out: Vec<f64> = out.iter().zip(&fx.output).map(|(a, b)| (a - b) / -lr).collect();

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut check = |analytic: f64, numeric: f64| {
        let scale = analytic.abs().max(numeric.abs());
        let err = if scale < 1e-7 { (analytic - numeric).abs() } else { (analytic - numeric).abs() / scale };
        worst = worst.max(err);
    };
    for i in 0..fx.input.len() {
        let mut plus = fx.input.clone();
        let mut minus = fx.input.clone();
        plus[i] += h;
        minus[i] -= h;
        let numeric = (sgns_loss(&plus, &fx.output, fx.dim, &fx.sample)
            - sgns_loss(&minus, &fx.output, fx.dim, &fx.sample))
            / (2.0 * h);
        check(analytic_in[i], numeric);
    }
    for i in 0..fx.output.len() {
        let mut plus = fx.output.clone();
        let mut minus = fx.output.clone();
        plus[i] += h;
        minus[i] -= h;
        let numeric = (sgns_loss(&fx.input, &plus, fx.dim, &fx.sample)
            - sgns_loss(&fx.input, &minus, fx.dim, &fx.sample))
            / (2.0 * h);
        check(analytic_out[i], numeric);
    }
    worst
}
