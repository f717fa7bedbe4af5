//! Small dense linear algebra on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numerics::rng::RngStream;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Solve `A x = b` for symmetric positive definite `A` by Cholesky.
pub fn solve_spd(a: &Matrix, b: &Vector) -> Result<Vector> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::domain(format!(
            "shape mismatch: {}x{} matrix with vector of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let chol = cholesky(a)?;
    Ok(chol.solve(b))
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    let inv = cholesky(a)?.inverse();
    Ok(symmetrize(&inv))
}

fn cholesky(a: &Matrix) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    if !is_symmetric(a, 1e-12) {
        return Err(Error::Singular("matrix is not symmetric".into()));
    }
    Cholesky::new(a.clone()).ok_or_else(|| Error::Singular("Cholesky factorization failed".into()))
}

pub fn is_symmetric(a: &Matrix, rel_tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= rel_tol * scale))
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(a)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(a: &Matrix) -> f64 {
    symmetric_eigenvalues(a)[0]
}

/// Checks the Fisher-matrix contract: symmetric to 1e-12 relative and positive definite.
pub fn check_fisher(a: &Matrix) -> Result<()> {
    if !is_symmetric(a, 1e-12) {
        return Err(Error::Singular("Fisher matrix is not symmetric".into()));
    }
    let lo = min_eigenvalue(a);
    if !(lo > 0.0) {
        return Err(Error::Singular(format!("Fisher matrix is not positive definite (smallest eigenvalue {lo:e})")));
    }
    Ok(())
}

pub fn from_rows(rows: &[&[f64]]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    Matrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Random SPD matrix `A A' + 0.1 I` with entries of `A` uniform on (-1, 1).
pub fn random_spd(k: usize, rng: &mut RngStream) -> Matrix {
    let a = Matrix::from_fn(k, k, |_, _| 2.0 * rng.open01() - 1.0);
    symmetrize(&(&a * a.transpose() + Matrix::identity(k, k) * 0.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn identity_solve() {
        let x = solve_spd(&Matrix::identity(2, 2), &Vector::from_vec(vec![3.0, 4.0])).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn cox_matrix_solve() {
        let a = from_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let b = Vector::from_vec(vec![1.0, 0.0]);
        let x = solve_spd(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] + 1.0).abs() < 1e-14);
        assert!((&a * &x - &b).norm() < 1e-14);
    }

    #[test]
    fn diagonal_solve() {
        let a = from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let x = solve_spd(&a, &Vector::from_vec(vec![0.0, 2.0])).unwrap();
        assert!(x[0].abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_spd_is_singular() {
        let a = from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(solve_spd(&a, &Vector::zeros(2)), Err(Error::Singular(_))));
        let asym = from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(matches!(solve_spd(&asym, &Vector::zeros(2)), Err(Error::Singular(_))));
    }

    #[test]
    fn fisher_contract() {
        assert!(check_fisher(&from_rows(&[&[2.0, 1.0], &[1.0, 1.0]])).is_ok());
        assert!(check_fisher(&from_rows(&[&[1.0, 1.0], &[1.0, 1.0]])).is_err());
    }

    proptest! {
        #[test]
        fn solve_then_multiply_back(k in 1usize..=6, seed in 0u64..1000) {
            let mut rng = RngStream::new(seed, 0);
            let a = random_spd(k, &mut rng);
            let b = Vector::from_fn(k, |_, _| rng.random_range(-5.0..5.0));
            let x = solve_spd(&a, &b).unwrap();
            let resid = (&a * &x - &b).norm();
            prop_assert!(resid <= 1e-9 * b.norm().max(1e-300));
            prop_assert!(resid <= 1e-10 * (a.norm() * x.norm() + b.norm()));
        }
    }
}
