use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Mass matrices with a larger 2-norm condition number are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Ratio of extreme singular values; infinite for a singular matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 || !min.is_finite() || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `a·x = b` by LU with partial pivoting after a conditioning check.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let condition = condition_number(a);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::SingularMassMatrix { condition });
    }
    let rhs = DVector::from_column_slice(b);
    a.clone().lu().solve(&rhs).map(|x| x.as_slice().to_vec()).ok_or(Error::SingularMassMatrix { condition })
}

pub(crate) fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum()).collect()
}
