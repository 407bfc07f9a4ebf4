//! Leading eigenpairs of a symmetric positive semi-definite matrix by power
//! iteration with deflation.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIteration {
    /// Convergence threshold on the largest component change of the
    /// normalized iterate.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// An eigenvalue below `relative_floor` times the largest one is
    /// reported as exactly zero with a zero eigenvector.
    pub relative_floor: f64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tolerance: 1e-10,
            max_iterations: 10_000,
            relative_floor: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Array1<f64>,
    pub iterations: usize,
}

/// Flips `v` so that its largest-magnitude component is positive (the
/// first one on ties).
pub fn canonical_sign(v: &mut Array1<f64>) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.mapv_inplace(|x| -x);
    }
}

impl PowerIteration {
    /// The `k` largest eigenpairs of the symmetric PSD `matrix`; each found
    /// pair is deflated from the matrix before the next one.
    pub fn top_eigenpairs(&self, matrix: &Array2<f64>, k: usize) -> Result<Vec<EigenPair>> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::Config(format!(
                "power iteration needs a non-empty square matrix, got {:?}",
                matrix.dim()
            )));
        }
        let mut work = matrix.to_owned();
        let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
        for _ in 0..k.min(n) {
            let floor = pairs.first().map_or(0.0, |p| p.value * self.relative_floor);
            let pair = self.dominant(&work, floor)?;
            if pair.value > 0.0 {
                let v = &pair.vector;
                for i in 0..n {
                    for j in 0..n {
                        work[[i, j]] -= pair.value * v[i] * v[j];
                    }
                }
            }
            pairs.push(pair);
        }
        Ok(pairs)
    }

    /// Runs from the all-ones start and from a fixed quasi-random start and
    /// keeps the larger eigenvalue, so a start vector orthogonal to the
    /// dominant eigenvector cannot settle on a smaller one. Starts whose
    /// iterate collapses to zero are replaced by standard basis vectors.
    fn dominant(&self, matrix: &Array2<f64>, floor: f64) -> Result<EigenPair> {
        let n = matrix.nrows();
        let scale = matrix.iter().map(|x| x * x).sum::<f64>().sqrt();
        let collapse = floor.max(scale * 1e-13);
        if scale == 0.0 || scale <= floor {
            return Ok(zero_pair(n, 0));
        }

        let ones = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
        let golden = 0.618_033_988_749_894_9;
        let mut quasi = Array1::from_shape_fn(n, |i| ((i + 1) as f64 * golden).fract() - 0.5);
        let len = quasi.dot(&quasi).sqrt();
        quasi /= len;

        let mut best: Option<EigenPair> = None;
        for start in [ones, quasi] {
            if let Some(pair) = self.iterate(matrix, start, collapse)? {
                let better = match &best {
                    None => true,
                    Some(b) => pair.value > b.value + 1e-9 * b.value.abs().max(1e-300),
                };
                if better {
                    best = Some(pair);
                }
            }
        }
        if best.is_none() {
            for i in 0..n {
                let mut e = Array1::zeros(n);
                e[i] = 1.0;
                if let Some(pair) = self.iterate(matrix, e, collapse)? {
                    best = Some(pair);
                    break;
                }
            }
        }
        Ok(best.unwrap_or_else(|| zero_pair(n, 0)))
    }

    fn iterate(&self, matrix: &Array2<f64>, start: Array1<f64>, collapse: f64) -> Result<Option<EigenPair>> {
        let mut v = start;
        let mut last_delta = f64::INFINITY;
        for iteration in 1..=self.max_iterations {
            let w = matrix.dot(&v);
            let len = w.dot(&w).sqrt();
            if len <= collapse {
                return Ok(None);
            }
            let next = w / len;
            last_delta = next
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = next;
            if last_delta < self.tolerance {
                let value = v.dot(&matrix.dot(&v));
                canonical_sign(&mut v);
                return Ok(Some(EigenPair {
                    value,
                    vector: v,
                    iterations: iteration,
                }));
            }
        }
        Err(Error::NonConvergence {
            iterations: self.max_iterations,
            last_delta,
        })
    }
}

fn zero_pair(n: usize, iterations: usize) -> EigenPair {
    EigenPair {
        value: 0.0,
        vector: Array1::zeros(n),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn diagonal_matrix() {
        let m = array![[5.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 1.0]];
        let pairs = PowerIteration::default().top_eigenpairs(&m, 2).unwrap();
        assert_abs_diff_eq!(pairs[0].value, 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[0].vector[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[1].value, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[1].vector[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn two_by_two_closed_form() {
        // eigenvalues 3 and 1, eigenvectors (1, 1)/√2 and (1, -1)/√2
        let m = array![[2.0, 1.0], [1.0, 2.0]];
        let pairs = PowerIteration::default().top_eigenpairs(&m, 2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(pairs[0].value, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[0].vector[0], r, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[0].vector[1], r, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[1].value, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[1].vector[0].abs(), r, epsilon = 1e-9);
    }

    #[test]
    fn start_orthogonal_to_second_eigenvector() {
        // after deflating (1, 1) the all-ones start is in the null space
        let m = array![[2.0, 1.0], [1.0, 2.0]];
        let pairs = PowerIteration::default().top_eigenpairs(&m, 2).unwrap();
        assert_abs_diff_eq!(pairs[1].value, 1.0, epsilon = 1e-9);
        assert!(pairs[1].vector.iter().all(|x| x.abs() > 0.7));
    }

    #[test]
    fn start_orthogonal_to_dominant_eigenvector() {
        // (1, -1, 0) has eigenvalue 4; the all-ones start sees only 1 and 2
        let m = array![[2.5, -1.5, 0.0], [-1.5, 2.5, 0.0], [0.0, 0.0, 2.0]];
        let pairs = PowerIteration::default().top_eigenpairs(&m, 1).unwrap();
        assert_abs_diff_eq!(pairs[0].value, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pairs[0].vector[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn rank_one_reports_zero_second_pair() {
        let u = array![1.0, 2.0, -2.0];
        let m = Array2::from_shape_fn((3, 3), |(i, j)| u[i] * u[j]);
        let pairs = PowerIteration::default().top_eigenpairs(&m, 2).unwrap();
        assert_abs_diff_eq!(pairs[0].value, 9.0, epsilon = 1e-9);
        assert_eq!(pairs[1].value, 0.0);
        assert!(pairs[1].vector.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let m = array![[1.0, 0.0], [0.0, 0.999]];
        let opts = PowerIteration {
            max_iterations: 3,
            ..PowerIteration::default()
        };
        match opts.top_eigenpairs(&m, 1) {
            Err(Error::NonConvergence { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sign_convention() {
        let mut v = array![0.1, -0.9, 0.3];
        canonical_sign(&mut v);
        assert_eq!(v, array![-0.1, 0.9, -0.3]);
    }
}
