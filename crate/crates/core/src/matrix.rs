//! Dense matrices with optional tensor-leg signatures.
//!
//! Row-major storage. A matrix on `L(V_1 ⊗ … ⊗ V_k)` carries one [`Leg`] per
//! tensor factor; the first leg is the most significant digit of the row and
//! column index, so `u^{ax}_{by}` of an operator on `V ⊗ W` sits at row
//! `a·n + x`, column `b·n + y` (zero-based).

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{GaussRational, Mode, Scalar};
use num_complex::Complex64;

/// One tensor factor: its dimension and whether it is a dual space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Leg {
    pub dim: usize,
    pub dual: bool,
}

impl Leg {
    pub fn new(dim: usize) -> Self {
        Leg { dim, dual: false }
    }
    pub fn dual(dim: usize) -> Self {
        Leg { dim, dual: true }
    }
    pub fn flipped(self) -> Self {
        Leg { dim: self.dim, dual: !self.dual }
    }
}

pub fn leg_product(legs: &[Leg]) -> usize {
    legs.iter().map(|l| l.dim).product()
}

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
    legs: Option<Vec<Leg>>,
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} legs={:?}", self.rows, self.cols, self.legs)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:?}", self[(r, c)].to_c64())).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

/// Mixed-radix digits of `index` over `dims` (most significant first).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = index % d;
        index /= d;
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols], legs: None }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = S::one();
        }
        m
    }

    /// Matrix unit `e_{ij}` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = S::one();
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data, legs: None })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data, legs: None }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| S::from_i64(rows[i][j]))
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (k, e) in entries.iter().enumerate() {
            m[(k, k)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn data(&self) -> &[S] {
        &self.data
    }
    pub fn into_data(self) -> Vec<S> {
        self.data
    }
    pub fn legs(&self) -> Option<&[Leg]> {
        self.legs.as_deref()
    }

    /// Attaches a leg signature; the matrix must be square of the matching size.
    pub fn with_legs(mut self, legs: Vec<Leg>) -> Result<Self> {
        let d = leg_product(&legs);
        if !self.is_square() || self.rows != d || legs.iter().any(|l| l.dim == 0) {
            return Err(Error::Dimension(format!(
                "legs of total dimension {d} on a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.legs = Some(legs);
        Ok(self)
    }

    pub fn without_legs(mut self) -> Self {
        self.legs = None;
        self
    }

    /// Leg signature, or a single plain leg when none is attached.
    pub fn legs_or_flat(&self) -> Vec<Leg> {
        self.legs.clone().unwrap_or_else(|| vec![Leg::new(self.rows)])
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("{what} needs a square matrix, got {}x{}", self.rows, self.cols)))
        }
    }

    pub fn matmul(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out: Matrix<S> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_exact_zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    if !b.is_exact_zero() {
                        o.mul_add_assign(a, b);
                    }
                }
            }
        }
        if self.legs.is_some() && self.legs == other.legs {
            out.legs = self.legs.clone();
        }
        Ok(out)
    }

    /// Product that panics on shape mismatch; for internal use on operands
    /// whose shapes are fixed by construction.
    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        self.matmul(other).expect("matrix shapes checked by caller")
    }

    fn zip_with(&self, other: &Matrix<S>, f: impl Fn(&S, &S) -> S) -> Result<Matrix<S>> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "elementwise op on {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data, legs: self.legs.clone() })
    }

    pub fn add(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul(s)).collect(),
            legs: self.legs.clone(),
        }
    }

    /// Conjugate transpose. Leg signatures are kept (same spaces).
    pub fn adjoint(&self) -> Matrix<S> {
        let mut out = Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj());
        out.legs = self.legs.clone();
        out
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut out = Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone());
        out.legs = self.legs.as_ref().map(|l| l.iter().map(|x| x.flipped()).collect());
        out
    }

    pub fn trace(&self) -> Result<S> {
        self.require_square("trace")?;
        let mut t = S::zero();
        for k in 0..self.rows {
            t = t.add(&self[(k, k)]);
        }
        Ok(t)
    }

    /// Trace divided by the dimension.
    pub fn ntrace(&self) -> Result<S> {
        let t = self.trace()?;
        Ok(t.mul(&S::from_ratio(1, self.rows as i64)))
    }

    /// Kronecker product; leg signatures concatenate.
    pub fn kron(&self, other: &Matrix<S>) -> Matrix<S> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_exact_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = &other[(k, l)];
                        if !b.is_exact_zero() {
                            out[(i * other.rows + k, j * other.cols + l)] = a.mul(b);
                        }
                    }
                }
            }
        }
        if self.is_square() && other.is_square() {
            let mut legs = self.legs_or_flat();
            legs.extend(other.legs_or_flat());
            out.legs = Some(legs);
        }
        out
    }

    /// `x` acting on the tensor legs `positions` of `signature`, identity elsewhere.
    /// The k-th leg of `x` goes to `signature[positions[k]]`.
    pub fn embed_on_legs(&self, positions: &[usize], signature: &[Leg]) -> Result<Matrix<S>> {
        self.require_square("embed_on_legs")?;
        let mut seen = vec![false; signature.len()];
        for &p in positions {
            if p >= signature.len() {
                return Err(Error::Dimension(format!("leg {p} outside a {}-leg signature", signature.len())));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::RepeatedLeg(p));
            }
        }
        let sub_dims: Vec<usize> = positions.iter().map(|&p| signature[p].dim).collect();
        if sub_dims.iter().product::<usize>() != self.rows {
            return Err(Error::Dimension(format!(
                "operator of size {} on legs of dimensions {sub_dims:?}",
                self.rows
            )));
        }
        if let Some(own) = &self.legs {
            let own_dims: Vec<usize> = own.iter().map(|l| l.dim).collect();
            if own_dims != sub_dims {
                return Err(Error::Dimension(format!("operator legs {own_dims:?} vs target legs {sub_dims:?}")));
            }
        }
        let all_dims: Vec<usize> = signature.iter().map(|l| l.dim).collect();
        let total: usize = all_dims.iter().product();
        let stride = strides(&all_dims);
        let pos_stride: Vec<usize> = positions.iter().map(|&p| stride[p]).collect();
        let others: Vec<usize> = (0..signature.len()).filter(|&p| !seen[p]).collect();
        let other_dims: Vec<usize> = others.iter().map(|&p| all_dims[p]).collect();
        let other_count: usize = other_dims.iter().product();

        let offset_of = |index: usize, dims: &[usize], st: &[usize]| {
            let mut buf = vec![0; dims.len()];
            digits(index, dims, &mut buf);
            buf.iter().zip(st).map(|(d, s)| d * s).sum::<usize>()
        };
        let sub_offsets: Vec<usize> = (0..self.rows).map(|r| offset_of(r, &sub_dims, &pos_stride)).collect();
        let other_stride: Vec<usize> = others.iter().map(|&p| stride[p]).collect();
        let other_offsets: Vec<usize> = (0..other_count).map(|o| offset_of(o, &other_dims, &other_stride)).collect();

        let mut out = Matrix::zeros(total, total);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let x = &self[(r, c)];
                if x.is_exact_zero() {
                    continue;
                }
                for &o in &other_offsets {
                    out[(o + sub_offsets[r], o + sub_offsets[c])] = x.clone();
                }
            }
        }
        out.legs = Some(signature.to_vec());
        Ok(out)
    }

    /// Transposition on the listed legs; their dual flags flip.
    pub fn partial_transpose(&self, which: &[usize]) -> Result<Matrix<S>> {
        let legs = self
            .legs
            .clone()
            .ok_or_else(|| Error::Dimension("partial transpose needs a leg signature".into()))?;
        for &w in which {
            if w >= legs.len() {
                return Err(Error::Dimension(format!("leg {w} outside a {}-leg signature", legs.len())));
            }
        }
        let dims: Vec<usize> = legs.iter().map(|l| l.dim).collect();
        let stride = strides(&dims);
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        let mut rd = vec![0; dims.len()];
        let mut cd = vec![0; dims.len()];
        for r in 0..n {
            digits(r, &dims, &mut rd);
            for c in 0..n {
                let x = &self[(r, c)];
                if x.is_exact_zero() {
                    continue;
                }
                digits(c, &dims, &mut cd);
                let (mut nr, mut nc) = (0, 0);
                for k in 0..dims.len() {
                    let (a, b) = if which.contains(&k) { (cd[k], rd[k]) } else { (rd[k], cd[k]) };
                    nr += a * stride[k];
                    nc += b * stride[k];
                }
                out[(nr, nc)] = x.clone();
            }
        }
        let mut new_legs = legs;
        for &w in which {
            new_legs[w] = new_legs[w].flipped();
        }
        out.legs = Some(new_legs);
        Ok(out)
    }

    /// `(t ⊗ id)x` for a two-leg operator.
    pub fn partial_transpose_first(&self) -> Result<Matrix<S>> {
        match &self.legs {
            Some(l) if l.len() == 2 => self.partial_transpose(&[0]),
            _ => Err(Error::Dimension("partial_transpose_first needs exactly two legs".into())),
        }
    }

    /// Gauss–Jordan inverse. In approximate mode a pivot below `tol` times the
    /// largest entry counts as singular; the offending magnitude is reported.
    pub fn inverse(&self, tol: f64) -> Result<Matrix<S>> {
        self.require_square("inverse")?;
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone().without_legs();
        let mut inv = Matrix::<S>::identity(n);
        for col in 0..n {
            let pivot_row = if S::EXACT {
                (col..n).find(|&r| !a[(r, col)].is_exact_zero())
            } else {
                (col..n)
                    .max_by(|&x, &y| {
                        a[(x, col)]
                            .magnitude()
                            .partial_cmp(&a[(y, col)].magnitude())
                            .unwrap()
                            .then(y.cmp(&x))
                    })
                    .filter(|&r| a[(r, col)].magnitude() > tol * scale)
            };
            let Some(p) = pivot_row else {
                let best = (col..n).map(|r| a[(r, col)].magnitude()).fold(0.0, f64::max);
                return Err(Error::Singular { pivot: best });
            };
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pinv = a[(col, col)].inv().ok_or(Error::Singular { pivot: 0.0 })?;
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)].clone();
                if f.is_exact_zero() {
                    continue;
                }
                let f = f.neg();
                a.axpy_row(r, col, &f);
                inv.axpy_row(r, col, &f);
            }
        }
        inv.legs = self.legs.clone();
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &S) {
        for c in 0..self.cols {
            let x = &mut self.data[r * self.cols + c];
            if !x.is_exact_zero() {
                *x = x.mul(s);
            }
        }
    }

    /// row[target] += f * row[source]
    fn axpy_row(&mut self, target: usize, source: usize, f: &S) {
        for c in 0..self.cols {
            let s = self.data[source * self.cols + c].clone();
            if !s.is_exact_zero() {
                self.data[target * self.cols + c].mul_add_assign(f, &s);
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Max-norm distance; `f64::INFINITY` for shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix<S>) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b).magnitude()).fold(0.0, f64::max)
    }

    /// Entrywise equality: exact in exact mode, within `tol` otherwise.
    pub fn approx_eq(&self, other: &Matrix<S>, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        if S::EXACT {
            self.data == other.data
        } else {
            self.max_abs_diff(other) <= tol
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_zero_tol(tol))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&Matrix::identity(self.rows), tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.mul(&self.adjoint()).is_identity(tol)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Matrix<S>) -> Matrix<S> {
        self.mul(other).sub(&other.mul(self)).expect("square operands of equal size")
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_exact_zero()).count()
    }

    pub fn to_dyn(&self) -> DynMatrix {
        S::wrap_matrix(self.clone())
    }
}

/// A matrix whose arithmetic mode is only known at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum DynMatrix {
    Exact(Matrix<GaussRational>),
    Approx(Matrix<Complex64>),
}

impl DynMatrix {
    pub fn mode(&self) -> Mode {
        match self {
            DynMatrix::Exact(_) => Mode::Exact,
            DynMatrix::Approx(_) => Mode::Approx,
        }
    }

    pub fn kron(&self, other: &DynMatrix) -> Result<DynMatrix> {
        match (self, other) {
            (DynMatrix::Exact(a), DynMatrix::Exact(b)) => Ok(DynMatrix::Exact(a.kron(b))),
            (DynMatrix::Approx(a), DynMatrix::Approx(b)) => Ok(DynMatrix::Approx(a.kron(b))),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn matmul(&self, other: &DynMatrix) -> Result<DynMatrix> {
        match (self, other) {
            (DynMatrix::Exact(a), DynMatrix::Exact(b)) => a.matmul(b).map(DynMatrix::Exact),
            (DynMatrix::Approx(a), DynMatrix::Approx(b)) => a.matmul(b).map(DynMatrix::Approx),
            _ => Err(Error::ModeMismatch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational as Q;

    type M = Matrix<Q>;

    fn sx() -> M {
        M::from_i64_rows(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn kron_identity_and_unit() {
        assert_eq!(M::identity(2).kron(&M::identity(2)).without_legs(), M::identity(4));
        let k = M::unit(2, 0, 0).kron(&sx());
        let want = M::from_i64_rows(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        assert_eq!(k.clone().without_legs(), want);
        assert_eq!(k.legs().unwrap(), &[Leg::new(2), Leg::new(2)]);
    }

    #[test]
    fn embed_full_and_single_leg() {
        let sig = [Leg::new(2), Leg::new(2)];
        let u = M::from_fn(4, 4, |i, j| Q::from_i64((i * 4 + j) as i64));
        assert_eq!(u.embed_on_legs(&[0, 1], &sig).unwrap().without_legs(), u);
        let e = sx().embed_on_legs(&[0], &sig).unwrap();
        assert_eq!(e.without_legs(), sx().kron(&M::identity(2)).without_legs());
        let e2 = sx().embed_on_legs(&[1], &sig).unwrap();
        assert_eq!(e2.without_legs(), M::identity(2).kron(&sx()).without_legs());
    }

    #[test]
    fn embed_errors() {
        let sig = [Leg::new(2), Leg::new(3)];
        assert!(matches!(sx().embed_on_legs(&[1], &sig), Err(Error::Dimension(_))));
        let u = M::identity(4);
        assert_eq!(u.embed_on_legs(&[0, 0], &[Leg::new(2), Leg::new(2)]), Err(Error::RepeatedLeg(0)));
    }

    #[test]
    fn partial_transpose_of_swap_is_rank_one() {
        // swap = Σ e_ij ⊗ e_ji
        let swap = M::from_fn(4, 4, |r, c| {
            let (a, x, b, y) = (r / 2, r % 2, c / 2, c % 2);
            Q::from_i64((a == y && x == b) as i64)
        })
        .with_legs(vec![Leg::new(2), Leg::new(2)])
        .unwrap();
        let t = swap.partial_transpose_first().unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let (a, x, b, y) = (r / 2, r % 2, c / 2, c % 2);
                assert_eq!(t[(r, c)], Q::from_i64((a == x && b == y) as i64));
            }
        }
        assert_eq!(t.legs().unwrap()[0], Leg::dual(2));
        assert!(matches!(t.inverse(0.0), Err(Error::Singular { .. })));
        assert_eq!(t.partial_transpose_first().unwrap(), swap);
        assert!(M::identity(8).with_legs(vec![Leg::new(2); 3]).unwrap().partial_transpose_first().is_err());
    }

    #[test]
    fn inverse_unitary_ntrace() {
        assert_eq!(M::identity(4).inverse(0.0).unwrap(), M::identity(4));
        assert!(sx().is_unitary(0.0));
        assert!(!M::from_i64_rows(&[&[1, 1], &[0, 1]]).is_unitary(0.0));
        for d in [1, 2, 4, 8] {
            assert_eq!(M::identity(d).ntrace().unwrap(), Q::one());
        }
        let a = M::from_i64_rows(&[&[2, 1], &[7, 4]]);
        assert!(a.mul(&a.inverse(0.0).unwrap()).is_identity(0.0));
        let s = Matrix::<Complex64>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        match s.inverse(1e-9) {
            Err(Error::Singular { pivot }) => assert!(pivot < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dyn_mode_mismatch() {
        let e = DynMatrix::Exact(M::identity(2));
        let a = DynMatrix::Approx(Matrix::identity(2));
        assert_eq!(e.kron(&a), Err(Error::ModeMismatch));
        assert!(e.kron(&e).is_ok());
        assert_eq!(M::identity(2).to_dyn().mode(), Mode::Exact);
        assert_eq!(Matrix::<Complex64>::identity(2).to_dyn().mode(), Mode::Approx);
    }
}
