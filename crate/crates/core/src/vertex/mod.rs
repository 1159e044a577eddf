//! Vertex-model operators `u ∈ L(V) ⊗ L(W)` and the operators derived from them.
//!
//! Entries follow `u^{ax}_{by}` at row `a·n + x`, column `b·n + y` (zero based).
//! An operator carries a leg signature; the first `v_legs` legs make up `V`,
//! the rest make up `W`. Plain operators have one leg on each side, derived
//! ones (`u′`, cables) carry several.

pub mod twisted;

use crate::error::{Error, Result};
use crate::matrix::{leg_product, Leg, Matrix};
use crate::scalar::Scalar;

pub use twisted::{check_twisted, find_twist, twisted_forms, random_unitary, twisted_sequence_check, TwistQ};

/// An invertible operator on `V ⊗ W` with its inverse cached.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexOperator<S: Scalar> {
    mat: Matrix<S>,
    inv: Matrix<S>,
    v_legs: usize,
    tol: f64,
}

impl<S: Scalar> VertexOperator<S> {
    /// `mat` of size `m·n`, with legs `(m)` and `(n)`.
    pub fn new(m: usize, n: usize, mat: Matrix<S>, tol: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dimension("vertex operator dimensions must be positive".into()));
        }
        let mat = mat.without_legs().with_legs(vec![Leg::new(m), Leg::new(n)])?;
        Self::from_legs(mat, 1, tol)
    }

    /// `mat` must already carry a signature whose first `v_legs` legs are `V`.
    pub fn from_legs(mat: Matrix<S>, v_legs: usize, tol: f64) -> Result<Self> {
        let nlegs = mat.legs().map(|l| l.len()).unwrap_or(0);
        if v_legs == 0 || v_legs >= nlegs {
            return Err(Error::Dimension(format!("{v_legs} V legs out of {nlegs}")));
        }
        let inv = mat.inverse(tol)?.with_legs(mat.legs_or_flat())?;
        Ok(VertexOperator { mat, inv, v_legs, tol })
    }

    /// Skips inversion; the caller vouches that `inv` is the inverse.
    fn from_parts(mat: Matrix<S>, inv: Matrix<S>, v_legs: usize, tol: f64) -> Self {
        VertexOperator { mat, inv, v_legs, tol }
    }

    pub fn mat(&self) -> &Matrix<S> {
        &self.mat
    }
    pub fn inverse(&self) -> &Matrix<S> {
        &self.inv
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    pub fn legs(&self) -> &[Leg] {
        self.mat.legs().expect("vertex operators carry legs")
    }
    pub fn v_legs(&self) -> &[Leg] {
        &self.legs()[..self.v_legs]
    }
    pub fn w_legs(&self) -> &[Leg] {
        &self.legs()[self.v_legs..]
    }
    pub fn v_leg_count(&self) -> usize {
        self.v_legs
    }
    pub fn m(&self) -> usize {
        leg_product(self.v_legs())
    }
    pub fn n(&self) -> usize {
        leg_product(self.w_legs())
    }
    /// Threshold for identities that compose two inversions.
    pub fn star_tol(&self) -> f64 {
        10.0 * self.tol
    }

    /// `u^{ax}_{by}`
    pub fn entry(&self, a: usize, x: usize, b: usize, y: usize) -> &S {
        let n = self.n();
        &self.mat[(a * n + x, b * n + y)]
    }

    fn v_positions(&self) -> Vec<usize> {
        (0..self.v_legs).collect()
    }
    fn w_positions(&self) -> Vec<usize> {
        (self.v_legs..self.legs().len()).collect()
    }

    /// `(t⊗id)x` for a matrix on the same legs.
    pub fn transpose_v(&self, x: &Matrix<S>) -> Matrix<S> {
        x.clone().with_legs(self.legs().to_vec()).and_then(|x| x.partial_transpose(&self.v_positions())).expect("legs match")
    }

    /// `(id⊗t)x` for a matrix on the same legs.
    pub fn transpose_w(&self, x: &Matrix<S>) -> Matrix<S> {
        x.clone().with_legs(self.legs().to_vec()).and_then(|x| x.partial_transpose(&self.w_positions())).expect("legs match")
    }

    /// `(t⊗id)u⁻¹`, with the `V` legs marked dual.
    pub fn make_uhat(&self) -> Result<Self> {
        Self::from_legs(self.transpose_v(&self.inv), self.v_legs, self.tol)
    }

    /// `(id⊗t)u⁻¹`, with the `W` legs marked dual.
    pub fn make_ubar(&self) -> Result<Self> {
        Self::from_legs(self.transpose_w(&self.inv), self.v_legs, self.tol)
    }

    /// `u_0 = u`, `u_{k+1} = (t⊗id)u_k⁻¹` up to `u_len`, stopping at the
    /// first singular term.
    pub fn star_sequence(&self, len: usize) -> StarSequence<S> {
        let mut terms = vec![self.clone()];
        while terms.len() <= len {
            let last = terms.last().expect("nonempty");
            match last.make_uhat() {
                Ok(next) => terms.push(next),
                Err(Error::Singular { pivot }) => {
                    let index = terms.len();
                    return StarSequence { terms, singular: Some(SingularReport { index, pivot }) };
                }
                Err(e) => unreachable!("partial transpose of a square operator: {e}"),
            }
        }
        StarSequence { terms, singular: None }
    }

    /// `(t⊗id)u⁻¹ = ((t⊗id)u)⁻¹`, with `(t⊗id)u` required to be invertible.
    pub fn check_star(&self) -> bool {
        let tu = self.transpose_v(&self.mat);
        let Ok(tu_inv) = tu.inverse(self.tol) else {
            return false;
        };
        self.transpose_v(&self.inv).approx_eq(&tu_inv, self.star_tol())
    }

    fn require_star(&self) -> Result<()> {
        if self.check_star() {
            Ok(())
        } else {
            Err(Error::StarFails)
        }
    }

    fn require_derived_star(op: Self, what: &str) -> Result<Self> {
        if op.check_star() {
            Ok(op)
        } else {
            Err(Error::Inconsistent(format!("{what} of a star operator fails the star condition")))
        }
    }

    /// `u_{12} ū_{13}` on `V ⊗ W ⊗ W*`.
    pub fn make_uprime(&self) -> Result<Self> {
        self.require_star()?;
        let op = self.horizontal_cable_unchecked(2)?;
        Self::require_derived_star(op, "u′")
    }

    /// `u_{12} ū_{13} u_{14} …` with `i` factors, on `V ⊗ W ⊗ W* ⊗ W …`.
    pub fn horizontal_cable(&self, i: usize) -> Result<Self> {
        self.require_star()?;
        if i == 1 {
            return Ok(self.clone());
        }
        let op = self.horizontal_cable_unchecked(i)?;
        Self::require_derived_star(op, "horizontal cable")
    }

    fn horizontal_cable_unchecked(&self, i: usize) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidArgument("cable length must be positive".into()));
        }
        let ubar = self.make_ubar()?;
        let w = self.w_legs().len();
        let mut sig: Vec<Leg> = self.v_legs().to_vec();
        for k in 0..i {
            let src = if k % 2 == 0 { self.w_legs() } else { ubar.w_legs() };
            sig.extend_from_slice(src);
        }
        let mut mat = Matrix::identity(leg_product(&sig));
        let mut inv = mat.clone();
        for k in 0..i {
            let f = if k % 2 == 0 { self } else { &ubar };
            let mut pos = self.v_positions();
            pos.extend(self.v_legs + k * w..self.v_legs + (k + 1) * w);
            mat = mat.mul(&f.mat.embed_on_legs(&pos, &sig)?);
            inv = f.inv.embed_on_legs(&pos, &sig)?.mul(&inv);
        }
        let mat = mat.with_legs(sig.clone())?;
        let inv = inv.with_legs(sig)?;
        Ok(Self::from_parts(mat, inv, self.v_legs, self.tol))
    }

    /// `u_{1,i+1} û_{2,i+1} u_{3,i+1} …` with `i` factors, on `V ⊗ V* ⊗ V … ⊗ W`.
    pub fn vertical_cable(&self, i: usize) -> Result<Self> {
        self.require_star()?;
        if i == 1 {
            return Ok(self.clone());
        }
        let op = self.vertical_cable_unchecked(i)?;
        Self::require_derived_star(op, "vertical cable")
    }

    /// Same product without the star checks; used for towers where the
    /// caller has already validated `u`.
    pub fn vertical_cable_unchecked(&self, i: usize) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidArgument("cable length must be positive".into()));
        }
        let uhat = self.make_uhat()?;
        let v = self.v_legs;
        let mut sig: Vec<Leg> = Vec::new();
        for k in 0..i {
            let src = if k % 2 == 0 { self.v_legs() } else { uhat.v_legs() };
            sig.extend_from_slice(src);
        }
        sig.extend_from_slice(self.w_legs());
        let w_pos: Vec<usize> = (i * v..sig.len()).collect();
        let mut mat = Matrix::identity(leg_product(&sig));
        let mut inv = mat.clone();
        for k in 0..i {
            let f = if k % 2 == 0 { self } else { &uhat };
            let mut pos: Vec<usize> = (k * v..(k + 1) * v).collect();
            pos.extend(&w_pos);
            mat = mat.mul(&f.mat.embed_on_legs(&pos, &sig)?);
            inv = f.inv.embed_on_legs(&pos, &sig)?.mul(&inv);
        }
        let mat = mat.with_legs(sig.clone())?;
        let inv = inv.with_legs(sig)?;
        Ok(Self::from_parts(mat, inv, i * v, self.tol))
    }

    pub fn is_unitary(&self) -> bool {
        self.mat.is_unitary(self.star_tol())
    }
}

/// Where the star sequence hit a non-invertible term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularReport {
    /// Index `k` of the term `u_k` that could not be formed.
    pub index: usize,
    pub pivot: f64,
}

#[derive(Clone, Debug)]
pub struct StarSequence<S: Scalar> {
    pub terms: Vec<VertexOperator<S>>,
    pub singular: Option<SingularReport>,
}

impl<S: Scalar> StarSequence<S> {
    /// `u_{k+2} = u_k` wherever both terms exist.
    pub fn has_period_two(&self) -> bool {
        self.terms
            .windows(3)
            .all(|w| w[2].mat.approx_eq(&w[0].mat, w[0].star_tol()))
    }
}
