//! Group-like vertex models and a counting oracle for their lattices.
//!
//! For `u = Σ e_ii ⊗ h_i` every alternating word is diagonal on `V^{⊗k}` with
//! group elements as entries, so `dim End` is `Σ_h mult(h)²` over the multiset
//! of products. The oracle enumerates those multisets with the group table,
//! independently of any linear solving.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::intertwiner::{lattice_word, Letter};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::vertex::VertexOperator;

pub const DEFAULT_GROUP_CAP: usize = 64;

fn common_dim<S: Scalar>(gens: &[Matrix<S>]) -> Result<usize> {
    let d = gens.first().ok_or_else(|| Error::InvalidArgument("no generators".into()))?.rows();
    if gens.iter().any(|g| g.rows() != d || g.cols() != d) {
        return Err(Error::Dimension("generators must be square of a common size".into()));
    }
    Ok(d)
}

fn star_checked<S: Scalar>(u: VertexOperator<S>) -> Result<VertexOperator<S>> {
    if u.check_star() {
        Ok(u)
    } else {
        Err(Error::Inconsistent("group-like model fails the star condition".into()))
    }
}

/// `Σ e_ii ⊗ g_i ∈ M_r ⊗ M_d`
pub fn model_i<S: Scalar>(gens: &[Matrix<S>], tol: f64) -> Result<VertexOperator<S>> {
    let d = common_dim(gens)?;
    let r = gens.len();
    let mut mat = Matrix::zeros(r * d, r * d);
    for (i, g) in gens.iter().enumerate() {
        g.inverse(tol)?;
        mat = mat.add(&Matrix::unit(r, i, i).kron(g).without_legs())?;
    }
    star_checked(VertexOperator::new(r, d, mat, tol)?)
}

/// `Σ g_i ⊗ e_ii ∈ M_d ⊗ M_r`
pub fn model_ii<S: Scalar>(gens: &[Matrix<S>], tol: f64) -> Result<VertexOperator<S>> {
    let d = common_dim(gens)?;
    let r = gens.len();
    let mut mat = Matrix::zeros(r * d, r * d);
    for (i, g) in gens.iter().enumerate() {
        g.inverse(tol)?;
        mat = mat.add(&g.kron(&Matrix::unit(r, i, i)).without_legs())?;
    }
    star_checked(VertexOperator::new(d, r, mat, tol)?)
}

/// `g_i ⊗ (g_i⁻¹)ᵗ`: the blocks of `u′` for `u = Σ e_ii ⊗ g_i`.
pub fn pgl_generators<S: Scalar>(gens: &[Matrix<S>], tol: f64) -> Result<Vec<Matrix<S>>> {
    common_dim(gens)?;
    gens.iter().map(|g| Ok(g.kron(&g.inverse(tol)?.transpose()).without_legs())).collect()
}

/// `g_k g_1⁻¹` for `k ≥ 2`, or the identity alone when there is one generator.
pub fn model_ii_group<S: Scalar>(gens: &[Matrix<S>], tol: f64) -> Result<Vec<Matrix<S>>> {
    let d = common_dim(gens)?;
    let g1inv = gens[0].inverse(tol)?;
    let out: Vec<Matrix<S>> = gens[1..].iter().map(|g| g.mul(&g1inv).without_legs()).collect();
    Ok(if out.is_empty() { vec![Matrix::identity(d)] } else { out })
}

/// Representatives of `PGL`: a matrix divided by its first nonzero entry.
pub struct ProjectiveReduction;

impl ProjectiveReduction {
    pub fn reduce<S: Scalar>(g: &Matrix<S>) -> Matrix<S> {
        match g.data().iter().find(|x| !x.is_exact_zero()) {
            Some(x) => g.scale(&x.inv().expect("nonzero")).without_legs(),
            None => g.clone().without_legs(),
        }
    }

    /// Number of distinct projective classes among the elements.
    pub fn order<S: Scalar>(group: &FiniteGroupClosure<S>) -> usize {
        let mut reps: Vec<Matrix<S>> = Vec::new();
        for g in &group.elements {
            let r = Self::reduce(g);
            if !reps.contains(&r) {
                reps.push(r);
            }
        }
        reps.len()
    }
}

/// A finite matrix group with its multiplication table; element 0 is the identity.
#[derive(Clone, Debug)]
pub struct FiniteGroupClosure<S: Scalar> {
    pub elements: Vec<Matrix<S>>,
    /// `table[a][b]` is the index of `elements[a] · elements[b]`.
    pub table: Vec<Vec<usize>>,
    pub generators: Vec<usize>,
    pub cap: usize,
}

impl<S: Scalar> FiniteGroupClosure<S> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &Matrix<S>) -> Option<usize> {
        self.elements.iter().position(|e| e.data() == g.data())
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        self.table[a].iter().position(|&c| c == 0).expect("finite groups contain inverses")
    }
}

/// Breadth-first closure under right multiplication by the generators.
pub fn close_group<S: Scalar>(gens: &[Matrix<S>], cap: usize) -> Result<FiniteGroupClosure<S>> {
    if !S::EXACT {
        return Err(Error::ApproxGroup);
    }
    let d = common_dim(gens)?;
    let gens: Vec<Matrix<S>> = gens.iter().map(|g| g.clone().without_legs()).collect();
    let mut elements: Vec<Matrix<S>> = vec![Matrix::identity(d)];
    let find = |els: &[Matrix<S>], x: &Matrix<S>| els.iter().position(|e| e.data() == x.data());
    let mut frontier = 0;
    while frontier < elements.len() {
        let g = elements[frontier].clone();
        for h in &gens {
            let p = g.mul(h);
            if find(&elements, &p).is_none() {
                if elements.len() == cap {
                    return Err(Error::CapExceeded { needed: cap + 1, cap });
                }
                elements.push(p);
            }
        }
        frontier += 1;
    }
    let table: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| find(&elements, &a.mul(b)).expect("closed")).collect())
        .collect();
    let generators = gens.iter().map(|g| find(&elements, g).expect("generator present")).collect();
    Ok(FiniteGroupClosure { elements, table, generators, cap })
}

/// Group element attached to each `V` index, for `X` and for `X̂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub x: Vec<usize>,
    pub xhat: Vec<usize>,
}

impl Assignment {
    fn letter(&self, l: Letter) -> &[usize] {
        match l {
            Letter::X => &self.x,
            Letter::XHat => &self.xhat,
        }
    }
}

/// Reads `u = Σ e_aa ⊗ h_a` (so `û = Σ e_aa ⊗ h_a⁻¹`), closes the `h_a` into a
/// group and returns the per-letter assignment.
pub fn diagonal_assignment<S: Scalar>(
    u: &VertexOperator<S>,
    cap: usize,
) -> Result<(FiniteGroupClosure<S>, Assignment)> {
    let (m, n) = (u.m(), u.n());
    for a in 0..m {
        for b in 0..m {
            if a != b && (0..n).any(|x| (0..n).any(|y| !u.entry(a, x, b, y).is_exact_zero())) {
                return Err(Error::NonDiagonal);
            }
        }
    }
    let blocks: Vec<Matrix<S>> =
        (0..m).map(|a| Matrix::from_fn(n, n, |x, y| u.entry(a, x, a, y).clone())).collect();
    let g = close_group(&blocks, cap)?;
    let x: Vec<usize> = blocks.iter().map(|b| g.index_of(b).expect("generator")).collect();
    let xhat = x.iter().map(|&i| g.inverse_of(i)).collect();
    Ok((g, Assignment { x, xhat }))
}

/// `dim End` of the word `letters` from the multiset of diagonal products.
pub fn oracle_end_dim<S: Scalar>(g: &FiniteGroupClosure<S>, asg: &Assignment, letters: &[Letter]) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::from([(0, 1)]);
    for &l in letters {
        let mut next = BTreeMap::new();
        for (&h, &c) in &counts {
            for &a in asg.letter(l) {
                *next.entry(g.table[h][a]).or_insert(0) += c;
            }
        }
        counts = next;
    }
    counts.values().map(|c| c * c).sum()
}

/// Oracle dimensions of every lattice cell `(i, j)`, `0 ≤ j ≤ i ≤ depth`.
pub fn group_lattice_oracle<S: Scalar>(
    g: &FiniteGroupClosure<S>,
    asg: &Assignment,
    depth: usize,
) -> Vec<((usize, usize), usize)> {
    let mut out = Vec::new();
    for i in 0..=depth {
        for j in 0..=i {
            out.push(((i, j), oracle_end_dim(g, asg, &lattice_word(i, j))));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational as Q;
    use num_complex::Complex64;

    fn sx() -> Matrix<Q> {
        Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])
    }
    fn rot() -> Matrix<Q> {
        Matrix::from_i64_rows(&[&[0, -1], &[1, 0]])
    }

    #[test]
    fn models() {
        let u = model_i(&[Matrix::<Q>::identity(2)], 0.0).unwrap();
        assert_eq!((u.m(), u.n()), (1, 2));
        assert!(u.mat().is_identity(0.0));
        let f1 = model_i(&[Matrix::identity(2), sx()], 0.0).unwrap();
        let want = Matrix::<Q>::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        assert_eq!(f1.mat().data(), want.data());
        assert!(model_ii(&[Matrix::identity(2), rot()], 0.0).unwrap().check_star());
        let sing = Matrix::<Q>::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert!(matches!(model_i(&[Matrix::identity(2), sing], 0.0), Err(Error::Singular { .. })));
        assert!(matches!(model_i(&[Matrix::<Q>::identity(2), Matrix::identity(3)], 0.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn closures() {
        assert_eq!(close_group(&[sx()], 64).unwrap().order(), 2);
        let c4 = close_group(&[rot()], 64).unwrap();
        assert_eq!(c4.order(), 4);
        assert_eq!(ProjectiveReduction::order(&c4), 2);
        let unip = Matrix::<Q>::from_i64_rows(&[&[1, 1], &[0, 1]]);
        assert_eq!(close_group(&[unip], 64).unwrap_err(), Error::CapExceeded { needed: 65, cap: 64 });
        let approx = vec![Matrix::<Complex64>::identity(2)];
        assert_eq!(close_group(&approx, 64).unwrap_err(), Error::ApproxGroup);
    }

    #[test]
    fn generator_lists() {
        let pg = pgl_generators(&[Matrix::identity(2), sx()], 0.0).unwrap();
        assert!(pg[0].is_identity(0.0));
        assert_eq!(pg[1].data(), sx().kron(&sx()).data());
        assert_eq!(close_group(&pg, 64).unwrap().order(), 2);
        // the PGL image of ⟨rotation⟩ has order 2
        let pr = pgl_generators(&[Matrix::identity(2), rot()], 0.0).unwrap();
        assert_eq!(close_group(&pr, 64).unwrap().order(), 2);
        let same = model_ii_group(&[sx(), sx()], 0.0).unwrap();
        assert_eq!(same.len(), 1);
        assert!(same[0].is_identity(0.0));
    }

    #[test]
    fn projective_reduction() {
        let g = rot().scale(&Q::from_i64(-3));
        assert_eq!(ProjectiveReduction::reduce(&g), ProjectiveReduction::reduce(&rot()));
        assert!(ProjectiveReduction::reduce(&Matrix::<Q>::identity(2).scale(&Q::i())).is_identity(0.0));
    }

    #[test]
    fn oracle_grid_for_group_model() {
        let f1 = model_i(&[Matrix::identity(2), sx()], 0.0).unwrap();
        let (g, asg) = diagonal_assignment(&f1.make_uprime().unwrap(), 64).unwrap();
        assert_eq!(g.order(), 2);
        let grid = group_lattice_oracle(&g, &asg, 3);
        let row0: Vec<usize> = grid.iter().filter(|((_, j), _)| *j == 0).map(|(_, d)| *d).collect();
        assert_eq!(row0, vec![1, 2, 8, 32]);
        let swap = VertexOperator::new(
            2,
            2,
            Matrix::<Q>::from_i64_rows(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]),
            0.0,
        )
        .unwrap();
        assert_eq!(diagonal_assignment(&swap, 64).unwrap_err(), Error::NonDiagonal);
    }
}
