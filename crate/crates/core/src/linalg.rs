use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::kernels::JITTER;

/// Cholesky factor of `matrix + JITTER·I`.
pub(crate) fn jittered_cholesky(mut matrix: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    for i in 0..matrix.nrows() {
        matrix[(i, i)] += JITTER;
    }
    Cholesky::new(matrix).ok_or_else(|| Error::Numerical(format!("{what} is not positive definite")))
}

pub(crate) fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
}
