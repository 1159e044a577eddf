//! Named operators used by the tests, benches and examples.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::{model_i, model_ii};
use crate::matrix::Matrix;
use crate::scalar::{GaussRational as Q, Scalar};
use crate::vertex::{random_unitary, VertexOperator};

pub fn sigma_x() -> Matrix<Q> {
    Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])
}

pub fn sigma_z() -> Matrix<Q> {
    Matrix::from_i64_rows(&[&[1, 0], &[0, -1]])
}

/// Rotation by a quarter turn, order 4.
pub fn rotation() -> Matrix<Q> {
    Matrix::from_i64_rows(&[&[0, -1], &[1, 0]])
}

/// `I_4` with `m = n = 2`.
pub fn identity4() -> VertexOperator<Q> {
    VertexOperator::new(2, 2, Matrix::identity(4), 0.0).expect("invertible")
}

/// `Σ e_ij ⊗ e_ji`: unitary, not a biunitary.
pub fn swap() -> VertexOperator<Q> {
    let mut s = Matrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            s = s.add(&Matrix::unit(2, i, j).kron(&Matrix::unit(2, j, i)).without_legs()).expect("same shape");
        }
    }
    VertexOperator::new(2, 2, s, 0.0).expect("invertible")
}

/// `e_11 ⊗ I + e_22 ⊗ σx`
pub fn f1() -> VertexOperator<Q> {
    model_i(&[Matrix::identity(2), sigma_x()], 0.0).expect("group model")
}

/// `I ⊗ e_11 + R ⊗ e_22` with `R` the quarter turn.
pub fn f2() -> VertexOperator<Q> {
    model_ii(&[Matrix::identity(2), rotation()], 0.0).expect("group model")
}

/// `e_11 ⊗ I + e_22 ⊗ R`
pub fn f3() -> VertexOperator<Q> {
    model_i(&[Matrix::identity(2), rotation()], 0.0).expect("group model")
}

/// `Σ e_ii ⊗ g_i` with `g = (I, σx, σz)`; `m = 3`, `n = 2`.
pub fn s3() -> VertexOperator<Q> {
    model_i(&[Matrix::identity(2), sigma_x(), sigma_z()], 0.0).expect("group model")
}

/// Exact operator copied into approximate arithmetic.
pub fn to_approx(u: &VertexOperator<Q>, tol: f64) -> VertexOperator<Complex64> {
    let mat = Matrix::from_fn(u.mat().rows(), u.mat().cols(), |i, j| u.mat()[(i, j)].to_c64());
    VertexOperator::new(u.m(), u.n(), mat, tol).expect("invertible")
}

/// `(A⊗B) u (A⊗B)*` for Haar-random unitaries `A`, `B`: a dense biunitary
/// whenever `u` is one.
pub fn dense_conjugate(u: &VertexOperator<Q>, seed: u64, tol: f64) -> VertexOperator<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_unitary(u.m(), &mut rng);
    let b = random_unitary(u.n(), &mut rng);
    let ab = a.kron(&b).without_legs();
    let v = to_approx(u, tol);
    let mat = ab.mul(&v.mat().clone().without_legs()).mul(&ab.adjoint());
    VertexOperator::new(u.m(), u.n(), mat, tol).expect("invertible")
}
