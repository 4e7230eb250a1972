use nalgebra::{DMatrix, DVector};

/// Minimum-norm least-squares solution `A⁺ p` via a dense SVD.
pub fn pseudoinverse_solve(a: &DMatrix<f64>, p: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-13;
    svd.solve(p, cutoff).expect("svd solve")
}
