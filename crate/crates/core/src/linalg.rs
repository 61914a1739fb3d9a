//! Direct solver for tridiagonal systems.

use crate::error::{Error, Result};

/// LU factors of a tridiagonal matrix whose row `i` is
/// `(lower[i], diag[i], upper[i])` acting on `(x[i-1], x[i], x[i+1])`;
/// `lower[0]` and `upper[n-1]` are ignored.
///
/// Elimination runs without pivoting, which is stable for the diagonally
/// dominant M-matrices assembled by the radiation solver.
#[derive(Debug, Clone, Default)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    inv_pivots: Vec<f64>,
    c_prime: Vec<f64>,
}

impl Tridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let mut lu = Tridiagonal {
            lower: Vec::new(),
            inv_pivots: Vec::new(),
            c_prime: Vec::new(),
        };
        lu.refactor(lower, diag, upper)?;
        Ok(lu)
    }

    /// Replaces the factors with those of a new matrix, reusing storage.
    pub fn refactor(&mut self, lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<()> {
        let n = diag.len();
        self.lower.clear();
        self.lower.extend_from_slice(&lower[..n]);
        self.inv_pivots.resize(n, 0.0);
        self.c_prime.resize(n, 0.0);
        let mut carried = 0.0;
        for i in 0..n {
            let pivot = if i > 0 { diag[i] - lower[i] * carried } else { diag[0] };
            if !(pivot.is_finite() && pivot != 0.0) {
                return Err(Error::SingularSystem { row: i });
            }
            let inv = 1.0 / pivot;
            carried = if i + 1 < n { upper[i] * inv } else { 0.0 };
            self.inv_pivots[i] = inv;
            self.c_prime[i] = carried;
        }
        Ok(())
    }

    /// Factors the M-matrix with off-diagonals `lower, upper ≤ 0` and row sums
    /// `excess ≥ 0`, so that `diag = excess - lower - upper`.
    ///
    /// The pivots are carried as `excess'_i - upper_i` with the updated excess
    /// `excess'_i = excess_i - lower_i excess'_{i-1} / pivot_{i-1}`, a sum of
    /// nonnegative terms. The reaction part of the diagonal thus survives even
    /// when the off-diagonals exceed it by many orders of magnitude.
    pub fn refactor_m_matrix(&mut self, lower: &[f64], upper: &[f64], excess: &[f64]) -> Result<()> {
        let n = excess.len();
        self.lower.clear();
        self.lower.extend_from_slice(&lower[..n]);
        self.inv_pivots.resize(n, 0.0);
        self.c_prime.resize(n, 0.0);
        let mut carried_excess = 0.0;
        let mut inv_previous = 0.0;
        for i in 0..n {
            let up = if i + 1 < n { upper[i] } else { 0.0 };
            let gained = if i > 0 { -lower[i] * carried_excess * inv_previous } else { 0.0 };
            carried_excess = excess[i] + gained;
            let pivot = carried_excess - up;
            if !(pivot.is_finite() && pivot > 0.0) {
                return Err(Error::SingularSystem { row: i });
            }
            inv_previous = 1.0 / pivot;
            self.inv_pivots[i] = inv_previous;
            self.c_prime[i] = up * inv_previous;
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Overwrites `x`, holding the right-hand side, with the solution.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.inv_pivots.len();
        let mut previous = 0.0;
        for i in 0..n {
            let carried = if i > 0 { self.lower[i] * previous } else { 0.0 };
            previous = (x[i] - carried) * self.inv_pivots[i];
            x[i] = previous;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.c_prime[i] * x[i + 1];
        }
    }
}

/// Solves `A x = rhs` for the tridiagonal matrix described in [`Tridiagonal`].
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    Ok(Tridiagonal::factor(lower, diag, upper)?.solve(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn m_matrix_factors_match_plain_factors() {
        let lower = [0.0, -1.0, -2.0, -0.5];
        let upper = [-1.0, -2.0, -0.5, 0.0];
        let excess = [0.3, 1e-3, 2.0, 0.7];
        let diag: Vec<f64> = (0..4).map(|i| excess[i] - lower[i] - upper[i]).collect();
        let rhs = [1.0, -2.0, 0.5, 3.0];
        let plain = Tridiagonal::factor(&lower, &diag, &upper).unwrap().solve(&rhs);
        let mut lu = Tridiagonal::default();
        lu.refactor_m_matrix(&lower, &upper, &excess).unwrap();
        for (a, b) in lu.solve(&rhs).iter().zip(&plain) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn m_matrix_factors_keep_a_tiny_reaction() {
        let n = 5;
        let w = 1e20;
        let lower: Vec<f64> = (0..n).map(|i| if i > 0 { -w } else { 0.0 }).collect();
        let upper: Vec<f64> = (0..n).map(|i| if i + 1 < n { -w } else { 0.0 }).collect();
        let excess = vec![1.0; n];
        let mut lu = Tridiagonal::default();
        lu.refactor_m_matrix(&lower, &upper, &excess).unwrap();
        for x in lu.solve(&vec![1.0; n]) {
            assert!((x - 1.0).abs() < 1e-8, "{x}");
        }
    }

    #[test]
    fn solves_small_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] has x = [1 1 1].
        let x = solve_tridiagonal(&[0.0, -1.0, -1.0], &[2.0; 3], &[-1.0, -1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_detected() {
        let r = solve_tridiagonal(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::SingularSystem { row: 1 })));
    }

    proptest! {
        #[test]
        fn m_matrix_solution_positive_and_accurate(
            off in prop::collection::vec(0.0f64..10.0, 2..50),
            extra in prop::collection::vec(1e-6f64..5.0, 51),
            rhs in prop::collection::vec(1e-8f64..1.0, 51),
        ) {
            let n = off.len() + 1;
            let mut lower = vec![0.0; n];
            let mut upper = vec![0.0; n];
            let mut diag = vec![0.0; n];
            for k in 0..n - 1 {
                upper[k] = -off[k];
                lower[k + 1] = -off[k];
                diag[k] += off[k];
                diag[k + 1] += off[k];
            }
            for i in 0..n {
                diag[i] += extra[i];
            }
            let x = solve_tridiagonal(&lower, &diag, &upper, &rhs[..n]).unwrap();
            for i in 0..n {
                prop_assert!(x[i] > 0.0);
                let mut ax = diag[i] * x[i];
                if i > 0 { ax += lower[i] * x[i - 1]; }
                if i + 1 < n { ax += upper[i] * x[i + 1]; }
                prop_assert!((ax - rhs[i]).abs() <= 1e-9 * (rhs[i] + diag[i] * x[i]));
            }
        }
    }
}
