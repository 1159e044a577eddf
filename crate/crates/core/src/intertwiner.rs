//! Intertwiners between tensor words over a fixed vertex operator, and the
//! grid of their endomorphism algebras.
//!
//! A word `v_1 ⊗ … ⊗ v_k` over letters `X` (the base operator) and `X̂` (its
//! hat) is realized as `(v_1)_{1,k+1} (v_2)_{2,k+1} ⋯ (v_k)_{k,k+1}` on
//! `V^{⊗k} ⊗ W`. `Hom(v, w)` is the set of `T` with `(T⊗1)v = w(T⊗1)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Config;
use crate::linsolve::{RowReducer, Span};
use crate::matrix::{leg_product, Leg, Matrix};
use crate::scalar::Scalar;
use crate::vertex::VertexOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    X,
    XHat,
}

impl Letter {
    /// Letter `p` (one based) of the alternating word `X X̂ X X̂ …`.
    pub fn alternating(p: usize) -> Letter {
        if p % 2 == 1 {
            Letter::X
        } else {
            Letter::XHat
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::X => "X",
            Letter::XHat => "X^",
        })
    }
}

/// The base operator and its hat, shared by every word built over it.
#[derive(Debug)]
pub struct Base<S: Scalar> {
    pub u: VertexOperator<S>,
    pub uhat: VertexOperator<S>,
}

impl<S: Scalar> Base<S> {
    pub fn new(u: &VertexOperator<S>) -> Result<Arc<Self>> {
        if !u.check_star() {
            return Err(Error::StarFails);
        }
        Ok(Arc::new(Base { u: u.clone(), uhat: u.make_uhat()? }))
    }

    fn letter(&self, l: Letter) -> &VertexOperator<S> {
        match l {
            Letter::X => &self.u,
            Letter::XHat => &self.uhat,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TensorWord<S: Scalar> {
    base: Arc<Base<S>>,
    letters: Vec<Letter>,
    realized: Matrix<S>,
}

impl<S: Scalar> TensorWord<S> {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }
    pub fn realized(&self) -> &Matrix<S> {
        &self.realized
    }
    pub fn base(&self) -> &Arc<Base<S>> {
        &self.base
    }
    /// Dimension of `V_w`.
    pub fn space_dim(&self) -> usize {
        self.base.u.m().pow(self.letters.len() as u32)
    }
    pub fn w_dim(&self) -> usize {
        self.base.u.n()
    }
    fn same_base(&self, other: &TensorWord<S>) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || self.base.u == other.base.u
    }
}

/// Leg signature of a word: the `V` legs of each letter, then the `W` legs.
fn word_signature<S: Scalar>(base: &Base<S>, letters: &[Letter]) -> Vec<Leg> {
    let mut sig: Vec<Leg> = Vec::new();
    for &l in letters {
        sig.extend_from_slice(base.letter(l).v_legs());
    }
    sig.extend_from_slice(base.u.w_legs());
    sig
}

pub fn realize_word_on<S: Scalar>(base: &Arc<Base<S>>, letters: &[Letter]) -> Result<TensorWord<S>> {
    if letters.is_empty() {
        return Err(Error::EmptyWord);
    }
    let sig = word_signature(base, letters);
    let v = base.u.v_leg_count();
    let k = letters.len();
    let w_pos: Vec<usize> = (k * v..sig.len()).collect();
    let mut realized: Matrix<S> = Matrix::identity(leg_product(&sig));
    for (p, &l) in letters.iter().enumerate() {
        let mut pos: Vec<usize> = (p * v..(p + 1) * v).collect();
        pos.extend(&w_pos);
        realized = realized.mul(&base.letter(l).mat().embed_on_legs(&pos, &sig)?);
    }
    let realized = realized.with_legs(sig)?;
    Ok(TensorWord { base: base.clone(), letters: letters.to_vec(), realized })
}

/// Realizes a word over `u`; `u` must satisfy the star condition.
pub fn realize_word<S: Scalar>(u: &VertexOperator<S>, letters: &[Letter]) -> Result<TensorWord<S>> {
    realize_word_on(&Base::new(u)?, letters)
}

/// Basis of `Hom(source, target)`: matrices of shape `dim V_target × dim V_source`.
#[derive(Clone, Debug)]
pub struct HomBasis<S: Scalar> {
    pub source: Vec<Letter>,
    pub target: Vec<Letter>,
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<Matrix<S>>,
}

impl<S: Scalar> HomBasis<S> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn span(&self, tol: f64) -> Span<S> {
        Span::of_matrices(&self.basis, self.rows * self.cols, tol)
    }
}

/// `x_{αβ}` with `(x_{αβ})_{rs} = x[(r, α), (s, β)]`.
fn w_block<S: Scalar>(x: &Matrix<S>, n: usize, alpha: usize, beta: usize) -> Matrix<S> {
    let d = x.rows() / n;
    Matrix::from_fn(d, d, |r, s| x[(r * n + alpha, s * n + beta)].clone())
}

pub fn hom_space<S: Scalar>(source: &TensorWord<S>, target: &TensorWord<S>, tol: f64) -> Result<HomBasis<S>> {
    if !source.same_base(target) {
        return Err(Error::BaseMismatch);
    }
    let n = source.w_dim();
    let (a, b) = (source.space_dim(), target.space_dim());
    // T is b × a, unknown T_{rs} at r·a + s.
    let mut red: RowReducer<S> = RowReducer::new(a * b, tol);
    let mut seen: Vec<(Matrix<S>, Matrix<S>)> = Vec::new();
    'pairs: for alpha in 0..n {
        for beta in 0..n {
            let vb = w_block(source.realized(), n, alpha, beta);
            let wb = w_block(target.realized(), n, alpha, beta);
            if vb.is_zero(0.0) && wb.is_zero(0.0) {
                continue;
            }
            if seen.iter().any(|(v, w)| *v == vb && *w == wb) {
                continue;
            }
            // (T v - w T)_{rc} = Σ_s T_{rs} v_{sc} - Σ_s w_{rs} T_{sc}
            for r in 0..b {
                for c in 0..a {
                    let mut row: Vec<(usize, S)> = Vec::new();
                    for s in 0..a {
                        let x = &vb[(s, c)];
                        if !x.is_exact_zero() {
                            row.push((r * a + s, x.clone()));
                        }
                    }
                    for s in 0..b {
                        let x = &wb[(r, s)];
                        if !x.is_exact_zero() {
                            row.push((s * a + c, x.neg()));
                        }
                    }
                    row.sort_by_key(|(i, _)| *i);
                    merge_duplicates(&mut row);
                    if !row.is_empty() {
                        red.push(&row);
                    }
                    if red.is_full() {
                        break 'pairs;
                    }
                }
            }
            seen.push((vb, wb));
        }
    }
    let basis = red
        .nullspace()
        .into_iter()
        .map(|v| Matrix::from_vec(b, a, v).expect("sized by construction"))
        .collect();
    Ok(HomBasis { source: source.letters.clone(), target: target.letters.clone(), rows: b, cols: a, basis })
}

fn merge_duplicates<S: Scalar>(row: &mut Vec<(usize, S)>) {
    let mut out: Vec<(usize, S)> = Vec::with_capacity(row.len());
    for (i, x) in row.drain(..) {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y = y.add(&x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !x.is_exact_zero());
    *row = out;
}

pub fn end_algebra<S: Scalar>(word: &TensorWord<S>, tol: f64) -> Result<HomBasis<S>> {
    hom_space(word, word, tol)
}

/// Letters `j+1 … i` of `X X̂ X X̂ …`.
pub fn lattice_word(i: usize, j: usize) -> Vec<Letter> {
    (j + 1..=i).map(Letter::alternating).collect()
}

/// `End` algebras of the alternating words, cell `(i, j)` for `0 ≤ j ≤ i ≤ depth`.
#[derive(Clone, Debug)]
pub struct LatticeGrid<S: Scalar> {
    pub depth: usize,
    /// `dim V` of the base.
    pub m: usize,
    cells: Vec<Vec<HomBasis<S>>>,
}

impl<S: Scalar> LatticeGrid<S> {
    pub fn cell(&self, i: usize, j: usize) -> &HomBasis<S> {
        &self.cells[i][j]
    }

    pub fn dim(&self, i: usize, j: usize) -> usize {
        self.cells[i][j].dim()
    }

    /// Dimensions along row `j`, columns `j ..= depth`.
    pub fn row_dims(&self, j: usize) -> Vec<usize> {
        (j..=self.depth).map(|i| self.dim(i, j)).collect()
    }

    /// Dimensions for every cell in `(i, j)` order.
    pub fn all_dims(&self) -> Vec<((usize, usize), usize)> {
        let mut out = Vec::new();
        for i in 0..=self.depth {
            for j in 0..=i {
                out.push(((i, j), self.dim(i, j)));
            }
        }
        out
    }
}

fn scalars<S: Scalar>() -> HomBasis<S> {
    HomBasis { source: vec![], target: vec![], rows: 1, cols: 1, basis: vec![Matrix::identity(1)] }
}

/// Fills the lattice of `u` (intended: `u′` of the input) and verifies the
/// horizontal `T ↦ T⊗1` and vertical `T ↦ 1⊗T` inclusions.
pub fn lattice<S: Scalar>(u: &VertexOperator<S>, depth: usize, cfg: &Config) -> Result<LatticeGrid<S>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("lattice depth must be positive".into()));
    }
    let (m, n) = (u.m(), u.n());
    let needed = m.checked_pow(2 * depth as u32).and_then(|x| x.checked_mul(n * n)).unwrap_or(usize::MAX);
    cfg.check_cap(needed)?;
    let base = Base::new(u)?;
    let tol = cfg.tol;
    let keys: Vec<(usize, usize)> = (0..=depth).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let solved = cfg.exec.map(keys.clone(), |(i, j)| -> Result<HomBasis<S>> {
        if i == j {
            return Ok(scalars());
        }
        let w = realize_word_on(&base, &lattice_word(i, j))?;
        end_algebra(&w, tol)
    });
    let mut cells: Vec<Vec<HomBasis<S>>> = (0..=depth).map(|_| Vec::new()).collect();
    for ((i, _), cell) in keys.into_iter().zip(solved) {
        cells[i].push(cell?);
    }
    let grid = LatticeGrid { depth, m, cells };
    check_inclusions(&grid, tol)?;
    Ok(grid)
}

fn check_inclusions<S: Scalar>(grid: &LatticeGrid<S>, tol: f64) -> Result<()> {
    let id = Matrix::<S>::identity(grid.m);
    for i in 0..grid.depth {
        for j in 0..=i {
            let big = grid.cell(i + 1, j).span(tol);
            if !grid.cell(i, j).basis.iter().all(|t| big.contains(&t.kron(&id).without_legs())) {
                return Err(Error::Inconsistent(format!("cell ({i},{j}) ⊗ 1 not inside cell ({},{j})", i + 1)));
            }
        }
    }
    for i in 1..=grid.depth {
        for j in 0..i {
            let big = grid.cell(i, j).span(tol);
            if !grid.cell(i, j + 1).basis.iter().all(|t| big.contains(&id.kron(t).without_legs())) {
                return Err(Error::Inconsistent(format!("1 ⊗ cell ({i},{}) not inside cell ({i},{j})", j + 1)));
            }
        }
    }
    Ok(())
}
