//! Finite-dimensional *-algebras of matrices: center, simple blocks,
//! inclusion matrices.

pub mod graph;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linsolve::{RowReducer, Span};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub use graph::{bratteli, principal_graph, Bratteli, PrincipalGraph};

/// Number of seeds tried before a decomposition gives up.
pub const DECOMPOSE_ATTEMPTS: u64 = 8;

/// A unital *-closed subalgebra of `M_D`, given by a linearly independent basis.
#[derive(Clone, Debug)]
pub struct MatrixStarAlgebra<S: Scalar> {
    ambient: usize,
    basis: Vec<Matrix<S>>,
    tol: f64,
}

impl<S: Scalar> MatrixStarAlgebra<S> {
    /// Checks independence, the unit, adjoints and all pairwise products.
    pub fn new(ambient: usize, basis: Vec<Matrix<S>>, tol: f64) -> Result<Self> {
        let alg = Self::from_closed_basis(ambient, basis, tol)?;
        let span = alg.span();
        for a in &alg.basis {
            for b in &alg.basis {
                if !span.contains(&a.mul(b)) {
                    return Err(Error::NotStarAlgebra("not closed under multiplication".into()));
                }
            }
        }
        Ok(alg)
    }

    /// Like [`MatrixStarAlgebra::new`] but trusts multiplicative closure,
    /// which holds by construction for commutants and intertwiner algebras.
    pub fn from_closed_basis(ambient: usize, basis: Vec<Matrix<S>>, tol: f64) -> Result<Self> {
        if basis.iter().any(|b| b.rows() != ambient || b.cols() != ambient) {
            return Err(Error::Dimension(format!("basis elements must be {ambient}x{ambient}")));
        }
        let basis: Vec<Matrix<S>> = basis.into_iter().map(|b| b.without_legs()).collect();
        let alg = MatrixStarAlgebra { ambient, basis, tol };
        let span = alg.span();
        if span.dim() != alg.basis.len() {
            return Err(Error::NotStarAlgebra("basis is linearly dependent".into()));
        }
        if !span.contains(&Matrix::identity(ambient)) {
            return Err(Error::NotStarAlgebra("identity not in span".into()));
        }
        if !alg.basis.iter().all(|b| span.contains(&b.adjoint())) {
            return Err(Error::NotStarAlgebra("not closed under adjoint".into()));
        }
        Ok(alg)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Matrix<S>] {
        &self.basis
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    pub fn span(&self) -> Span<S> {
        Span::of_matrices(&self.basis, self.ambient * self.ambient, self.tol)
    }

    /// Image under `x ↦ f(x)`, an injective unital *-homomorphism into `M_ambient`.
    pub fn map(&self, ambient: usize, f: impl Fn(&Matrix<S>) -> Matrix<S>) -> Self {
        MatrixStarAlgebra { ambient, basis: self.basis.iter().map(|b| f(b).without_legs()).collect(), tol: self.tol }
    }

    fn zero_tol(&self) -> f64 {
        10.0 * self.tol * self.basis.iter().map(|b| b.max_abs()).fold(1.0, f64::max)
    }

    /// Basis of the center, in the coordinates `Σ c_j b_j`.
    ///
    /// Commutators with the basis are added in doubling batches; after each
    /// batch the candidate solutions are tested against the whole basis, and
    /// the loop stops as soon as they all commute.
    pub fn center(&self) -> Vec<Matrix<S>> {
        let k = self.dim();
        let d2 = self.ambient * self.ambient;
        let mut red: RowReducer<S> = RowReducer::new(k, self.tol);
        let (mut next, mut batch) = (0, 1);
        let ztol = self.zero_tol();
        loop {
            let end = (next + batch).min(k);
            for i in next..end {
                let comms: Vec<Matrix<S>> = self.basis.iter().map(|b| b.commutator(&self.basis[i])).collect();
                for e in 0..d2 {
                    let row: Vec<(usize, S)> = comms
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.data()[e].is_exact_zero())
                        .map(|(j, c)| (j, c.data()[e].clone()))
                        .collect();
                    if !row.is_empty() {
                        red.push(&row);
                    }
                }
            }
            next = end;
            batch *= 2;
            let cands: Vec<Matrix<S>> = red.nullspace().iter().map(|c| self.combine(c)).collect();
            if next == k || cands.iter().all(|z| self.basis.iter().all(|b| z.commutator(b).is_zero(ztol))) {
                return cands;
            }
        }
    }

    fn combine(&self, coeffs: &[S]) -> Matrix<S> {
        let mut out = Matrix::zeros(self.ambient, self.ambient);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_exact_zero() {
                out = out.add(&b.scale(c)).expect("same shape");
            }
        }
        out
    }
}

/// One simple summand `M_d ⊗ 1_m` with its minimal central projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Block<S: Scalar> {
    pub d: usize,
    pub m: usize,
    pub p: Matrix<S>,
}

#[derive(Clone, Debug)]
pub struct SemisimpleDecomposition<S: Scalar> {
    pub ambient: usize,
    pub dim: usize,
    pub blocks: Vec<Block<S>>,
    /// Seed that produced the splitting.
    pub seed: u64,
}

impl<S: Scalar> SemisimpleDecomposition<S> {
    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.d, b.m)).collect()
    }

    /// Image under a unital amplification into a bigger ambient; multiplicities
    /// grow by the ratio of ambient sizes.
    pub fn map(&self, ambient: usize, f: impl Fn(&Matrix<S>) -> Matrix<S>) -> Self {
        let factor = ambient / self.ambient;
        SemisimpleDecomposition {
            ambient,
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| Block { d: b.d, m: b.m * factor, p: f(&b.p).without_legs() }).collect(),
            seed: self.seed,
        }
    }
}

/// Nonnegative integer `x`: exact in exact mode, within `thr` otherwise.
fn as_count<S: Scalar>(x: &S, thr: f64) -> Option<usize> {
    let c = x.to_c64();
    let r = c.re.round();
    if r < 0.0 {
        return None;
    }
    let ok = if S::EXACT { *x == S::from_i64(r as i64) } else { (c - Complex64::new(r, 0.0)).norm() <= thr };
    ok.then_some(r as usize)
}

fn eigenvalues_hermitian<S: Scalar>(h: &Matrix<S>) -> Vec<f64> {
    let n = h.rows();
    let m = DMatrix::from_fn(n, n, |i, j| h[(i, j)].to_c64());
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

/// Groups sorted values whose gaps are at most `gap`; returns cluster means.
fn cluster(sorted: &[f64], gap: f64) -> Vec<f64> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some(c) if x - c.last().expect("nonempty") <= gap => c.push(x),
            _ => out.push(vec![x]),
        }
    }
    out.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
}

/// Splits a central self-adjoint `h` with `r` distinct eigenvalues into its
/// spectral projections.
fn spectral_projections<S: Scalar>(h: &Matrix<S>, r: usize, tol: f64) -> std::result::Result<Vec<Matrix<S>>, String> {
    let ev = eigenvalues_hermitian(h);
    let scale = ev.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let means = cluster(&ev, 1e-6 * scale);
    if means.len() != r {
        return Err(format!("{} distinct eigenvalues for a center of dimension {r}", means.len()));
    }
    let lambdas: Vec<S> = means
        .iter()
        .map(|&x| S::from_real_estimate(x).ok_or_else(|| format!("eigenvalue {x} has no exact form")))
        .collect::<std::result::Result<_, _>>()?;
    let n = h.rows();
    let id = Matrix::<S>::identity(n);
    let mut projs = Vec::with_capacity(r);
    for (k, lk) in lambdas.iter().enumerate() {
        let mut p = id.clone();
        for (l, ll) in lambdas.iter().enumerate() {
            if l == k {
                continue;
            }
            let denom = lk.sub(ll).inv().ok_or("coincident eigenvalues")?;
            let factor = h.sub(&id.scale(ll)).expect("square").scale(&denom);
            p = p.mul(&factor);
        }
        projs.push(p);
    }
    let ptol = 10.0 * tol * n as f64 * scale;
    let mut sum = Matrix::zeros(n, n);
    for p in &projs {
        if !p.mul(p).approx_eq(p, ptol) {
            return Err("spectral projection is not idempotent".into());
        }
        sum = sum.add(p).expect("square");
    }
    if !sum.is_identity(ptol) {
        return Err("spectral projections do not sum to the identity".into());
    }
    Ok(projs)
}

/// Simple blocks of `alg`, sorted by `(d, m)`.
///
/// A random self-adjoint central element `h` (small integer coefficients,
/// seeded) is diagonalized; its spectral projections are the minimal central
/// projections when it separates the blocks. Failing seeds are retried up to
/// [`DECOMPOSE_ATTEMPTS`] times.
pub fn decompose<S: Scalar>(alg: &MatrixStarAlgebra<S>, seed: u64) -> Result<SemisimpleDecomposition<S>> {
    let n = alg.ambient;
    let center = alg.center();
    let r = center.len();
    if r == 0 {
        return Err(Error::Decomposition("empty center".into()));
    }
    let mut diagnostics: Vec<String> = Vec::new();
    let mut used_seed = seed;
    let projs = if r == 1 {
        vec![Matrix::identity(n)]
    } else {
        let mut found = None;
        for attempt in 0..DECOMPOSE_ATTEMPTS {
            let s = seed.wrapping_add(attempt);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut h = Matrix::zeros(n, n);
            // both z + z* and i(z − z*): either alone can vanish on a skew or self-adjoint z
            let i_unit = S::imag_unit();
            for z in &center {
                let (c, c2): (i64, i64) = (rng.random_range(-4..=4), rng.random_range(-4..=4));
                let zs = z.adjoint();
                let re = z.add(&zs).expect("square");
                let im = z.sub(&zs).expect("square").scale(&i_unit);
                h = h.add(&re.scale(&S::from_i64(c))).expect("square");
                h = h.add(&im.scale(&S::from_i64(c2))).expect("square");
            }
            match spectral_projections(&h, r, alg.tol) {
                Ok(p) => {
                    found = Some((s, p));
                    break;
                }
                Err(e) => diagnostics.push(format!("seed {s}: {e}")),
            }
        }
        match found {
            Some((s, p)) => {
                used_seed = s;
                p
            }
            None => return Err(Error::Decomposition(diagnostics.join("; "))),
        }
    };
    let thr = 10.0 * alg.tol * n as f64;
    let mut blocks = Vec::with_capacity(r);
    for p in projs {
        let cut: Vec<Matrix<S>> = alg.basis.iter().map(|b| b.mul(&p)).collect();
        let d2 = Span::of_matrices(&cut, n * n, alg.tol).dim();
        let d = (d2 as f64).sqrt().round() as usize;
        if d * d != d2 || d == 0 {
            return Err(Error::Decomposition(format!("block of dimension {d2} is not a square")));
        }
        let tr = p.trace()?;
        let t = as_count(&tr, thr).ok_or_else(|| Error::Decomposition(format!("projection trace {:?}", tr.to_c64())))?;
        if t % d != 0 {
            return Err(Error::Decomposition(format!("trace {t} not divisible by block size {d}")));
        }
        blocks.push(Block { d, m: t / d, p });
    }
    blocks.sort_by_key(|b| (b.d, b.m));
    let dim_sum: usize = blocks.iter().map(|b| b.d * b.d).sum();
    let amb_sum: usize = blocks.iter().map(|b| b.d * b.m).sum();
    if dim_sum != alg.dim() || amb_sum != n {
        return Err(Error::Decomposition(format!(
            "block sizes {:?} inconsistent with dim {} in M_{n}",
            blocks.iter().map(|b| (b.d, b.m)).collect::<Vec<_>>(),
            alg.dim()
        )));
    }
    Ok(SemisimpleDecomposition { ambient: n, dim: alg.dim(), blocks, seed: used_seed })
}

/// Multiplicities `Λ_{kl}` of the small algebra's block `k` in the big one's block `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<usize>,
}

impl InclusionMatrix {
    pub fn get(&self, k: usize, l: usize) -> usize {
        self.entries[k * self.cols + l]
    }
    pub fn row(&self, k: usize) -> Vec<usize> {
        (0..self.cols).map(|l| self.get(k, l)).collect()
    }
    pub fn col(&self, l: usize) -> Vec<usize> {
        (0..self.rows).map(|k| self.get(k, l)).collect()
    }
}

/// `Λ_{kl} = tr(p_k q_l) / (d_k · m_l)`: a minimal projection of small block `k`
/// has trace `tr(p_k)/d_k`, and big block `l` has minimal projections of trace `m_l`.
pub fn inclusion_matrix<S: Scalar>(
    small: &MatrixStarAlgebra<S>,
    small_dec: &SemisimpleDecomposition<S>,
    big: &MatrixStarAlgebra<S>,
    big_dec: &SemisimpleDecomposition<S>,
) -> Result<InclusionMatrix> {
    if small.ambient != big.ambient || small_dec.ambient != big_dec.ambient || small.ambient != small_dec.ambient {
        return Err(Error::Dimension("inclusion needs a common ambient algebra".into()));
    }
    let span = big.span();
    if !small.basis.iter().all(|b| span.contains(b)) {
        return Err(Error::NotIncluded);
    }
    let thr = 10.0 * small.tol.max(big.tol) * small.ambient as f64;
    let (rows, cols) = (small_dec.blocks.len(), big_dec.blocks.len());
    let mut entries = Vec::with_capacity(rows * cols);
    for pk in &small_dec.blocks {
        for ql in &big_dec.blocks {
            let tr = pk.p.mul(&ql.p).trace()?;
            let x = tr.mul(&S::from_ratio(1, (pk.d * ql.m) as i64));
            match as_count(&x, thr) {
                Some(c) => entries.push(c),
                None => return Err(Error::NonIntegral(x.to_c64().re)),
            }
        }
    }
    let lam = InclusionMatrix { rows, cols, entries };
    for (l, ql) in big_dec.blocks.iter().enumerate() {
        let through: usize = (0..rows).map(|k| lam.get(k, l) * small_dec.blocks[k].d).sum();
        if through != ql.d {
            return Err(Error::Inconsistent(format!("block {l} of size {} receives {through}", ql.d)));
        }
    }
    Ok(lam)
}
