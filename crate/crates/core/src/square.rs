//! The commuting square of a vertex operator and the relative commutants of
//! its tower, computed directly from the operators `U^k`.
//!
//! The direct path solves `U⁻¹(T⊗1)U ∈ A⊗1` for `T ∈ A = L(V ⊗ V* ⊗ …)`; the
//! intertwiner path computes `End` of alternating words over `u′`. The two
//! must give the same algebra cell by cell, and [`compare_paths`] checks it.

use crate::algebra::{decompose, MatrixStarAlgebra};
use crate::error::{Error, Result};
use crate::exec::Config;
use crate::intertwiner::{end_algebra, lattice_word, realize_word_on, Base};
use crate::linsolve::RowReducer;
use crate::matrix::{Leg, Matrix};
use crate::scalar::Scalar;
use crate::vertex::VertexOperator;

/// Outcome of the expectation test on `1⊗L(W)` and `u(L(V)⊗1)u⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareReport {
    pub is_commuting: bool,
    /// Largest entry of `E_N(y) − τ(y)1` or `E_P(x) − τ(x)1` over the bases.
    pub residual: f64,
    pub algebras: [String; 4],
}

/// Orthogonal projection onto `span(basis)` for `⟨a, b⟩ = τ(a* b)`.
pub struct Expectation<S: Scalar> {
    basis: Vec<Matrix<S>>,
    gram_inv: Matrix<S>,
}

impl<S: Scalar> Expectation<S> {
    pub fn new(basis: Vec<Matrix<S>>, tol: f64) -> Result<Self> {
        let k = basis.len();
        let gram = Matrix::from_fn(k, k, |i, j| inner(&basis[i], &basis[j]));
        let gram_inv = gram.inverse(tol)?;
        Ok(Expectation { basis, gram_inv })
    }

    pub fn apply(&self, x: &Matrix<S>) -> Matrix<S> {
        let k = self.basis.len();
        let rhs: Vec<S> = self.basis.iter().map(|b| inner(b, x)).collect();
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..k {
            let mut c = S::zero();
            for (j, r) in rhs.iter().enumerate() {
                c.mul_add_assign(&self.gram_inv[(i, j)], r);
            }
            if !c.is_exact_zero() {
                out = out.add(&self.basis[i].scale(&c)).expect("same shape");
            }
        }
        out
    }
}

/// `τ(a* b)` with `τ` the normalized trace.
fn inner<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> S {
    let mut s = S::zero();
    for (x, y) in a.data().iter().zip(b.data()) {
        if !x.is_exact_zero() && !y.is_exact_zero() {
            s.mul_add_assign(&x.conj(), y);
        }
    }
    s.mul(&S::from_ratio(1, a.rows() as i64))
}

/// Tests whether `E_N` maps `P` to scalars and `E_P` maps `N` to scalars,
/// for `N = 1⊗L(W)` and `P = u(L(V)⊗1)u⁻¹` inside `L(V)⊗L(W)`.
pub fn check_commuting_square<S: Scalar>(u: &VertexOperator<S>) -> Result<SquareReport> {
    let (m, n) = (u.m(), u.n());
    let d = m * n;
    let tol = u.tol();
    let n_basis: Vec<Matrix<S>> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| Matrix::identity(m).kron(&Matrix::unit(n, a, b)).without_legs())
        .collect();
    let p_basis: Vec<Matrix<S>> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .map(|(a, b)| {
            let e = Matrix::unit(m, a, b).kron(&Matrix::identity(n)).without_legs();
            u.mat().mul(&e).mul(u.inverse()).without_legs()
        })
        .collect();
    let en = Expectation::new(n_basis.clone(), tol)?;
    let ep = Expectation::new(p_basis.clone(), tol)?;
    let id = Matrix::<S>::identity(d);
    let mut residual: f64 = 0.0;
    let mut exact_ok = true;
    for (e, xs) in [(&en, &p_basis), (&ep, &n_basis)] {
        for x in xs {
            let want = id.scale(&x.ntrace()?);
            let got = e.apply(x);
            residual = residual.max(got.max_abs_diff(&want));
            exact_ok &= got.data() == want.data();
        }
    }
    let is_commuting = if S::EXACT { exact_ok } else { residual <= u.star_tol() };
    Ok(SquareReport {
        is_commuting,
        residual,
        algebras: [
            format!("L(V)⊗L(W) = M_{m}⊗M_{n}"),
            format!("1⊗L(W) ≅ M_{n}"),
            format!("u(L(V)⊗1)u⁻¹ ≅ M_{m}"),
            "scalars".to_string(),
        ],
    })
}

/// `U^k = v_{1,k+1} v̂_{2,k+1} v_{3,k+1} …` on `V ⊗ V* ⊗ … ⊗ W`.
#[derive(Clone, Debug)]
pub struct TowerLevel<S: Scalar> {
    pub level: usize,
    pub u: VertexOperator<S>,
}

pub fn build_tower<S: Scalar>(u: &VertexOperator<S>, level: usize) -> Result<TowerLevel<S>> {
    if !u.check_star() {
        return Err(Error::StarFails);
    }
    Ok(TowerLevel { level, u: u.vertical_cable_unchecked(level)? })
}

/// `d⁻¹ Σ_{ij} e_ij ⊗ e_ij` on `C^d ⊗ (C^d)*`.
pub fn jones_projection<S: Scalar>(d: usize) -> Matrix<S> {
    let mut e = Matrix::zeros(d * d, d * d);
    let w = S::from_ratio(1, d as i64);
    for i in 0..d {
        for j in 0..d {
            e[(i * d + i, j * d + j)] = w.clone();
        }
    }
    e.with_legs(vec![Leg::new(d), Leg::dual(d)]).expect("square")
}

/// `ad(v_{13} v̂_{23})(e⊗1) = e⊗1` on `V ⊗ V* ⊗ W` for `v = u` and `v = û`.
pub fn check_jones_identity<S: Scalar>(u: &VertexOperator<S>) -> Result<bool> {
    if !u.check_star() {
        return Err(Error::StarFails);
    }
    let uhat = u.make_uhat()?;
    let (m, n) = (u.m(), u.n());
    let e = jones_projection::<S>(m);
    if !e.mul(&e).approx_eq(&e, u.star_tol()) {
        return Err(Error::Inconsistent("Jones projection is not idempotent".into()));
    }
    let sig = [Leg::new(m), Leg::dual(m), Leg::new(n)];
    let e1 = e.kron(&Matrix::identity(n)).without_legs();
    for (v, vh) in [(u, &uhat), (&uhat, u)] {
        let x = v.mat().embed_on_legs(&[0, 2], &sig)?.mul(&vh.mat().embed_on_legs(&[1, 2], &sig)?);
        let xinv = vh.inverse().embed_on_legs(&[1, 2], &sig)?.mul(&v.inverse().embed_on_legs(&[0, 2], &sig)?);
        if !x.mul(&e1).mul(&xinv).approx_eq(&e1, u.star_tol()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn scalars<S: Scalar>(tol: f64) -> MatrixStarAlgebra<S> {
    MatrixStarAlgebra::from_closed_basis(1, vec![Matrix::identity(1)], tol).expect("scalars")
}

/// `{T ∈ A : U⁻¹(T⊗1)U ∈ A⊗1}` for cell `(i, j)`: `A` has `i − j` alternating
/// `V`, `V*` legs and `U` is the tower operator of `u` (even `j`) or `û` (odd `j`).
pub fn relative_commutant_direct<S: Scalar>(
    u: &VertexOperator<S>,
    i: usize,
    j: usize,
    cfg: &Config,
) -> Result<MatrixStarAlgebra<S>> {
    if j > i {
        return Err(Error::InvalidArgument(format!("cell ({i},{j}) needs j ≤ i")));
    }
    if !u.check_star() {
        return Err(Error::StarFails);
    }
    if i == j {
        return Ok(scalars(cfg.tol));
    }
    let k = i - j;
    let (m, n) = (u.m(), u.n());
    let big = m.checked_pow(k as u32).ok_or(Error::CapExceeded { needed: usize::MAX, cap: cfg.cap })?;
    let needed = big.checked_mul(n).and_then(|x| x.checked_mul(x)).unwrap_or(usize::MAX);
    cfg.check_cap(needed)?;
    let v = if j.is_multiple_of(2) { u.clone() } else { u.make_uhat()? };
    let tower = v.vertical_cable_unchecked(k)?;
    let (uu, ui) = (tower.mat(), tower.inverse());
    // coefficient of T_{rs} in M[(p,α),(q,β)] is Σ_γ Uinv[(p,α),(r,γ)] U[(s,γ),(q,β)]
    let mut red: RowReducer<S> = RowReducer::new(big * big, cfg.tol);
    let entry_row = |p: usize, a: usize, q: usize, b: usize| -> Vec<S> {
        let mut coef = vec![S::zero(); big * big];
        for g in 0..n {
            let left: Vec<(usize, &S)> =
                (0..big).map(|r| (r, &ui[(p * n + a, r * n + g)])).filter(|(_, x)| !x.is_exact_zero()).collect();
            if left.is_empty() {
                continue;
            }
            let right: Vec<(usize, &S)> =
                (0..big).map(|s| (s, &uu[(s * n + g, q * n + b)])).filter(|(_, x)| !x.is_exact_zero()).collect();
            for (r, x) in &left {
                for (s, y) in &right {
                    coef[r * big + s].mul_add_assign(x, y);
                }
            }
        }
        coef
    };
    let to_sparse = |v: Vec<S>| -> Vec<(usize, S)> {
        v.into_iter().enumerate().filter(|(_, x)| !x.is_exact_zero()).collect()
    };
    for a in 0..n {
        for b in 0..n {
            for p in 0..big {
                for q in 0..big {
                    let row = if a != b {
                        to_sparse(entry_row(p, a, q, b))
                    } else if a > 0 {
                        let d0 = entry_row(p, 0, q, 0);
                        let da = entry_row(p, a, q, a);
                        to_sparse(da.iter().zip(&d0).map(|(x, y)| x.sub(y)).collect())
                    } else {
                        continue;
                    };
                    if !row.is_empty() {
                        red.push(&row);
                    }
                }
            }
        }
    }
    let basis: Vec<Matrix<S>> =
        red.nullspace().into_iter().map(|c| Matrix::from_vec(big, big, c).expect("sized")).collect();
    MatrixStarAlgebra::from_closed_basis(big, basis, cfg.tol)
}

/// One lattice cell seen from both paths.
#[derive(Clone, Debug, PartialEq)]
pub struct CellComparison {
    pub i: usize,
    pub j: usize,
    pub direct_dim: usize,
    pub intertwiner_dim: usize,
    pub direct_blocks: Vec<(usize, usize)>,
    pub intertwiner_blocks: Vec<(usize, usize)>,
    /// The two subspaces of `L(V^{⊗(i−j)})` coincide.
    pub same_span: bool,
}

impl CellComparison {
    pub fn matches(&self) -> bool {
        self.direct_dim == self.intertwiner_dim && self.direct_blocks == self.intertwiner_blocks && self.same_span
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathComparison {
    pub depth: usize,
    pub cells: Vec<CellComparison>,
}

impl PathComparison {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.matches())
    }

    pub fn mismatches(&self) -> Vec<&CellComparison> {
        self.cells.iter().filter(|c| !c.matches()).collect()
    }
}

/// Compares, for every `0 ≤ j ≤ i ≤ depth`, the direct relative commutant of
/// `u` with `End` of the matching word over `u′`: dimension, block structure
/// and the subspaces themselves.
pub fn compare_paths<S: Scalar>(u: &VertexOperator<S>, depth: usize, cfg: &Config) -> Result<PathComparison> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    let up = u.make_uprime()?;
    let needed = up
        .m()
        .checked_pow(2 * depth as u32)
        .and_then(|x| x.checked_mul(up.n() * up.n()))
        .unwrap_or(usize::MAX);
    cfg.check_cap(needed)?;
    let base = Base::new(&up)?;
    let keys: Vec<(usize, usize)> = (0..=depth).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let cells = cfg.exec.map(keys, |(i, j)| -> Result<CellComparison> {
        let direct = relative_commutant_direct(u, i, j, cfg)?;
        let inter = if i == j {
            scalars(cfg.tol)
        } else {
            let w = realize_word_on(&base, &lattice_word(i, j))?;
            let end = end_algebra(&w, cfg.tol)?;
            MatrixStarAlgebra::from_closed_basis(end.rows, end.basis, cfg.tol)?
        };
        let (ds, is) = (direct.span(), inter.span());
        let same_span = direct.dim() == inter.dim()
            && direct.basis().iter().all(|b| is.contains(b))
            && inter.basis().iter().all(|b| ds.contains(b));
        Ok(CellComparison {
            i,
            j,
            direct_dim: direct.dim(),
            intertwiner_dim: inter.dim(),
            direct_blocks: decompose(&direct, cfg.seed)?.dims(),
            intertwiner_blocks: decompose(&inter, cfg.seed)?.dims(),
            same_span,
        })
    });
    Ok(PathComparison { depth, cells: cells.into_iter().collect::<Result<_>>()? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational as Q;

    fn op(rows: &[&[i64]]) -> VertexOperator<Q> {
        VertexOperator::new(2, 2, Matrix::from_i64_rows(rows), 0.0).unwrap()
    }
    fn id4() -> VertexOperator<Q> {
        VertexOperator::new(2, 2, Matrix::identity(4), 0.0).unwrap()
    }
    fn f1() -> VertexOperator<Q> {
        op(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]])
    }
    fn swap() -> VertexOperator<Q> {
        op(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]])
    }
    fn exact() -> Config {
        Config { tol: 0.0, ..Config::default() }
    }

    #[test]
    fn commuting_square_verdicts() {
        for u in [id4(), f1()] {
            let r = check_commuting_square(&u).unwrap();
            assert!(r.is_commuting);
            assert_eq!(r.residual, 0.0);
        }
        let r = check_commuting_square(&swap()).unwrap();
        assert!(!r.is_commuting);
        assert!(r.residual > 0.1);
    }

    #[test]
    fn expectation_properties() {
        let basis = vec![Matrix::<Q>::unit(2, 0, 0), Matrix::unit(2, 1, 1)];
        let e = Expectation::new(basis, 0.0).unwrap();
        let x = Matrix::<Q>::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let ex = e.apply(&x);
        assert_eq!(ex, Matrix::from_i64_rows(&[&[1, 0], &[0, 4]]));
        assert_eq!(e.apply(&ex), ex);
        assert_eq!(ex.ntrace().unwrap(), x.ntrace().unwrap());
    }

    #[test]
    fn jones() {
        let e = jones_projection::<Q>(2);
        assert_eq!(e.mul(&e).data(), e.data());
        assert_eq!(e.trace().unwrap(), Q::one());
        assert!(check_jones_identity(&id4()).unwrap());
        assert!(check_jones_identity(&f1()).unwrap());
        assert_eq!(check_jones_identity(&swap()), Err(Error::StarFails));
    }

    #[test]
    fn tower() {
        assert_eq!(build_tower(&f1(), 1).unwrap().u.mat().data(), f1().mat().data());
        assert!(build_tower(&id4(), 3).unwrap().u.mat().is_identity(0.0));
    }

    #[test]
    fn direct_commutants() {
        let cfg = exact();
        assert_eq!(relative_commutant_direct(&id4(), 2, 0, &cfg).unwrap().dim(), 16);
        assert_eq!(relative_commutant_direct(&id4(), 3, 2, &cfg).unwrap().dim(), 4);
        assert_eq!(relative_commutant_direct(&f1(), 1, 0, &cfg).unwrap().dim(), 2);
        assert_eq!(relative_commutant_direct(&f1(), 2, 0, &cfg).unwrap().dim(), 8);
    }

    #[test]
    fn both_paths_agree() {
        let cmp = compare_paths(&f1(), 3, &exact()).unwrap();
        assert_eq!(cmp.cells.len(), 10);
        assert!(cmp.all_match(), "{:?}", cmp.mismatches());
        let row0: Vec<usize> = cmp.cells.iter().filter(|c| c.j == 0).map(|c| c.direct_dim).collect();
        assert_eq!(row0, vec![1, 2, 8, 32]);
    }
}
