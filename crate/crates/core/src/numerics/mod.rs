//! Numerical building blocks: quadrature, polynomial roots, symmetric
//! eigenvalue helpers.

pub mod poly;
pub mod quadrature;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Ascending eigenvalues and eigenvectors of a symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Eigensolver("matrix is not square".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }
    let eig = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Eigensolver("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}
