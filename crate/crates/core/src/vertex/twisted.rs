//! Twisted biunitaries: unitaries satisfying the star condition up to
//! conjugation by a positive diagonal `Q` on `V`.
//!
//! `Q` is given by its diagonal in an eigenbasis and `u` must already be
//! written in that basis. Since `Q` is diagonal, `Qᵗ = Q`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::VertexOperator;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Diagonal positive operator `Q = diag(q_1, …, q_m)` on `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistQ<S: Scalar> {
    q: Vec<S>,
}

impl<S: Scalar> TwistQ<S> {
    pub fn new(q: Vec<S>, tol: f64) -> Result<Self> {
        if q.is_empty() || !q.iter().all(|x| x.is_positive_real(tol)) {
            return Err(Error::NonPositiveTwist);
        }
        Ok(TwistQ { q })
    }

    pub fn identity(m: usize) -> Self {
        TwistQ { q: vec![S::one(); m] }
    }

    pub fn q(&self) -> &[S] {
        &self.q
    }

    pub fn is_identity(&self) -> bool {
        self.q.iter().all(|x| *x == S::one())
    }

    /// Diagonal of `Q^k ⊗ 1_n`.
    fn diag_power(&self, k: i32, n: usize) -> Vec<S> {
        let mut out = Vec::with_capacity(self.q.len() * n);
        for x in &self.q {
            let base = if k < 0 { x.inv().expect("positive") } else { x.clone() };
            let mut p = S::one();
            for _ in 0..k.unsigned_abs() {
                p = p.mul(&base);
            }
            out.extend(std::iter::repeat_n(p, n));
        }
        out
    }

    /// Spread of `Q`; residuals of conjugated identities scale with its square.
    fn ratio(&self) -> f64 {
        let mags: Vec<f64> = self.q.iter().map(|x| x.magnitude()).collect();
        let hi = mags.iter().cloned().fold(0.0, f64::max);
        let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    }
}

/// `(Q^k ⊗ 1) x (Q^{-k} ⊗ 1)`
fn conj_q<S: Scalar>(x: &Matrix<S>, q: &TwistQ<S>, k: i32, n: usize) -> Matrix<S> {
    let l = q.diag_power(k, n);
    let r = q.diag_power(-k, n);
    let mut out = x.clone();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            if !out[(i, j)].is_exact_zero() {
                out[(i, j)] = l[i].mul(&out[(i, j)]).mul(&r[j]);
            }
        }
    }
    out
}

fn require_unitary_with<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>) -> Result<()> {
    if q.q.len() != u.m() {
        return Err(Error::Dimension(format!("twist of length {} for dim V = {}", q.q.len(), u.m())));
    }
    if !u.is_unitary() {
        return Err(Error::NotUnitary);
    }
    Ok(())
}

fn twisted_tol<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>) -> f64 {
    u.star_tol() * q.ratio().powi(2)
}

/// `(Q^{-2}⊗1)((t⊗id)u⁻¹)(Q²⊗1) = ((t⊗id)u)⁻¹`
fn operator_form<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>) -> bool {
    let Ok(tu_inv) = u.transpose_v(u.mat()).inverse(u.tol()) else {
        return false;
    };
    let lhs = conj_q(&u.transpose_v(u.inverse()), q, -2, u.n());
    lhs.approx_eq(&tu_inv, twisted_tol(u, q))
}

/// `Σ_{b,x} q_b² conj(u^{ax}_{by}) u^{cx}_{bz} = q_a² δ_{ac} δ_{yz}`, the
/// entrywise expansion of the operator form for unitary `u`.
fn coordinate_form<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>) -> bool {
    let (m, n) = (u.m(), u.n());
    let q2: Vec<S> = q.q.iter().map(|x| x.mul(x)).collect();
    let tol = twisted_tol(u, q) * q.q.iter().map(|x| x.magnitude().powi(2)).fold(0.0, f64::max);
    for a in 0..m {
        for c in 0..m {
            for y in 0..n {
                for z in 0..n {
                    let mut s = S::zero();
                    for b in 0..m {
                        for x in 0..n {
                            let l = u.entry(a, x, b, y);
                            let r = u.entry(c, x, b, z);
                            if l.is_exact_zero() || r.is_exact_zero() {
                                continue;
                            }
                            s.mul_add_assign(&q2[b], &l.conj().mul(r));
                        }
                    }
                    if a == c && y == z {
                        s = s.sub(&q2[a]);
                    }
                    if !s.is_zero_tol(tol) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Twisted biunitarity of a unitary `u` for the twist `q`, evaluated both as
/// an operator identity and entrywise; the two must agree.
pub fn check_twisted<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>) -> Result<bool> {
    require_unitary_with(u, q)?;
    let op = operator_form(u, q);
    let coord = coordinate_form(u, q);
    if op != coord {
        return Err(Error::Inconsistent(format!(
            "operator form says {op}, coordinate form says {coord}"
        )));
    }
    Ok(op)
}

/// Three equivalent formulations of twisted biunitarity, evaluated separately:
/// `(Q⊗1)û(Q⁻¹⊗1)` unitary, `(Q⁻¹⊗1)((t⊗id)u)(Q⊗1)` unitary, and the operator form.
pub fn twisted_forms<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>) -> Result<(bool, bool, bool)> {
    require_unitary_with(u, q)?;
    let tol = twisted_tol(u, q);
    let n = u.n();
    let first = conj_q(&u.transpose_v(u.inverse()), q, 1, n).without_legs().is_unitary(tol);
    let second = conj_q(&u.transpose_v(u.mat()), q, -1, n).without_legs().is_unitary(tol);
    Ok((first, second, operator_form(u, q)))
}

/// Compares `u_0, …, u_{2N+1}` against
/// `u_{2k} = (Q^{2k}⊗1)u(Q^{-2k}⊗1)` and `u_{2k+1} = (Q^{-2k}⊗1)u_1(Q^{2k}⊗1)`.
pub fn twisted_sequence_check<S: Scalar>(u: &VertexOperator<S>, q: &TwistQ<S>, len: usize) -> Result<bool> {
    if len == 0 {
        return Err(Error::InvalidArgument("sequence length must be positive".into()));
    }
    if !check_twisted(u, q)? {
        return Err(Error::TwistedFails);
    }
    let seq = u.star_sequence(2 * len + 1);
    if seq.singular.is_some() {
        return Ok(false);
    }
    let n = u.n();
    let tol = twisted_tol(u, q);
    let u1 = seq.terms[1].mat().clone().without_legs();
    let u0 = u.mat().clone().without_legs();
    for k in 1..=len {
        let k2 = 2 * k as i32;
        let even = conj_q(&u0, q, k2, n);
        let odd = conj_q(&u1, q, -k2, n);
        let ok_even = seq.terms[2 * k].mat().clone().without_legs().approx_eq(&even, tol);
        let ok_odd = seq.terms[2 * k + 1].mat().clone().without_legs().approx_eq(&odd, tol);
        if !(ok_even && ok_odd) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Components of the graph on `V` indices with `a ~ b` when the `W` block
/// `u_{ab}` is nonzero.
fn block_components<S: Scalar>(u: &VertexOperator<S>) -> Vec<usize> {
    let (m, n) = (u.m(), u.n());
    let mut comp: Vec<usize> = (0..m).collect();
    fn root(c: &mut [usize], mut a: usize) -> usize {
        while c[a] != a {
            c[a] = c[c[a]];
            a = c[a];
        }
        a
    }
    for a in 0..m {
        for b in 0..m {
            let nonzero = (0..n).any(|x| (0..n).any(|y| !u.entry(a, x, b, y).is_zero_tol(u.tol())));
            if nonzero {
                let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
                comp[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let roots: Vec<usize> = (0..m).map(|a| root(&mut comp, a)).collect();
    let mut labels: Vec<usize> = Vec::new();
    roots
        .iter()
        .map(|r| match labels.iter().position(|l| l == r) {
            Some(p) => p,
            None => {
                labels.push(*r);
                labels.len() - 1
            }
        })
        .collect()
}

/// Looks for a non-identity twist: one distinct positive value per block
/// component of `u`, checked against the first unitarity form. Returns the
/// identity twist when `u` has a single component and it is a biunitary, and
/// `None` when no candidate passes.
pub fn find_twist<S: Scalar>(u: &VertexOperator<S>, seed: u64) -> Result<Option<TwistQ<S>>> {
    let comps = block_components(u);
    let count = comps.iter().max().map_or(0, |c| c + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<S> = Vec::new();
    let mut seen: Vec<(i64, i64)> = Vec::new();
    while values.len() < count {
        if S::EXACT {
            let (p, d) = (rng.random_range(1..=9i64), rng.random_range(1..=9i64));
            let g = num_integer_gcd(p, d);
            if seen.contains(&(p / g, d / g)) {
                continue;
            }
            seen.push((p / g, d / g));
            values.push(S::from_ratio(p, d));
        } else {
            let x: f64 = rng.random_range(0.5..2.0);
            values.push(S::from_real_estimate(x).expect("approximate values are kept"));
        }
    }
    let candidate = if count <= 1 {
        TwistQ::identity(u.m())
    } else {
        TwistQ { q: comps.iter().map(|&c| values[c].clone()).collect() }
    };
    let (first, _, _) = twisted_forms(u, &candidate)?;
    Ok(first.then_some(candidate))
}

fn num_integer_gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Haar-distributed unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Matrix<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for c in &cols {
            let dot: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Twist with entries drawn uniformly from `(0.5, 2)`.
pub fn random_twist(m: usize, rng: &mut impl Rng) -> TwistQ<Complex64> {
    TwistQ { q: (0..m).map(|_| Complex64::new(rng.random_range(0.5..2.0), 0.0)).collect() }
}
