//! Thomas algorithm with a reusable factorization.

/// Pre-factored tridiagonal matrix `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`.
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    /// Modified super-diagonal `c'`.
    upper_mod: Vec<f64>,
    /// Reciprocal of the modified pivots.
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// Factors the matrix. Panics on a zero pivot; the matrices used here are
    /// strictly diagonally dominant.
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        assert!(n > 0 && lower.len() == n && upper.len() == n);
        let mut upper_mod = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut pivot = diag[0];
        assert!(pivot != 0.0, "zero pivot");
        inv_pivot[0] = 1.0 / pivot;
        upper_mod[0] = upper[0] * inv_pivot[0];
        for i in 1..n {
            pivot = diag[i] - lower[i] * upper_mod[i - 1];
            assert!(pivot != 0.0, "zero pivot");
            inv_pivot[i] = 1.0 / pivot;
            upper_mod[i] = if i + 1 < n { upper[i] * inv_pivot[i] } else { 0.0 };
        }
        Self { lower: lower.to_vec(), upper_mod, inv_pivot }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
    }
}
