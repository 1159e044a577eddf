//! Row reduction on sparse rows, nullspaces, spans.
//!
//! [`RowReducer`] keeps its rows in reduced row-echelon form and accepts
//! equations one at a time, so callers can stream large, sparse systems and
//! stop early once the rank saturates. Pivoting is deterministic: the first
//! nonzero column in exact mode, the first column of maximal magnitude in
//! approximate mode.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Sparse row: `(column, value)` pairs, strictly increasing columns, no zeros.
pub type SparseRow<S> = Vec<(usize, S)>;

#[derive(Clone, Debug)]
pub struct RowReducer<S: Scalar> {
    ncols: usize,
    tol: f64,
    scale: f64,
    rows: Vec<(usize, SparseRow<S>)>,
    pivot_of_col: Vec<Option<usize>>,
}

impl<S: Scalar> RowReducer<S> {
    pub fn new(ncols: usize, tol: f64) -> Self {
        RowReducer { ncols, tol, scale: 0.0, rows: Vec::new(), pivot_of_col: vec![None; ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    fn drop_threshold(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            self.tol * self.scale.max(1.0)
        }
    }

    /// Residual of `row` after elimination against the current pivots.
    pub fn reduce(&self, row: &[(usize, S)]) -> SparseRow<S> {
        let mut buf = vec![S::zero(); self.ncols];
        let mut touched = vec![false; self.ncols];
        for (c, v) in row {
            buf[*c] = buf[*c].add(v);
            touched[*c] = true;
        }
        // pivot rows are fully reduced, so only the input's own columns need elimination
        for (c, _) in row {
            if let Some(p) = self.pivot_of_col[*c] {
                let coef = buf[*c].clone();
                if coef.is_exact_zero() {
                    continue;
                }
                let neg = coef.neg();
                for (pc, pv) in &self.rows[p].1 {
                    buf[*pc].mul_add_assign(&neg, pv);
                    touched[*pc] = true;
                }
                buf[*c] = S::zero();
            }
        }
        let thr = self.drop_threshold();
        (0..self.ncols)
            .filter(|&c| touched[c])
            .filter_map(|c| {
                let v = std::mem::replace(&mut buf[c], S::zero());
                let keep = if S::EXACT { !v.is_exact_zero() } else { v.magnitude() > thr };
                keep.then_some((c, v))
            })
            .collect()
    }

    /// Adds an equation; returns whether the rank grew.
    pub fn push(&mut self, row: &[(usize, S)]) -> bool {
        if !S::EXACT {
            let m = row.iter().map(|(_, v)| v.magnitude()).fold(0.0, f64::max);
            self.scale = self.scale.max(m);
        }
        let res = self.reduce(row);
        if res.is_empty() {
            return false;
        }
        let k = if S::EXACT {
            0
        } else {
            let mut best = 0;
            for (k, (_, v)) in res.iter().enumerate() {
                if v.magnitude() > res[best].1.magnitude() {
                    best = k;
                }
            }
            best
        };
        let pcol = res[k].0;
        let pinv = res[k].1.inv().expect("nonzero pivot");
        let new_row: SparseRow<S> = res
            .into_iter()
            .map(|(c, v)| if c == pcol { (c, S::one()) } else { (c, v.mul(&pinv)) })
            .collect();
        let thr = self.drop_threshold();
        for (_, r) in self.rows.iter_mut() {
            if let Ok(pos) = r.binary_search_by_key(&pcol, |(c, _)| *c) {
                let coef = r[pos].1.neg();
                *r = axpy(r, &coef, &new_row, thr);
            }
        }
        self.pivot_of_col[pcol] = Some(self.rows.len());
        self.rows.push((pcol, new_row));
        true
    }

    /// Whether `row` lies in the row space.
    pub fn contains(&self, row: &[(usize, S)]) -> bool {
        self.reduce(row).is_empty()
    }

    /// Basis of the solution space of the pushed equations, one dense vector
    /// per free column, in increasing column order.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        (0..self.ncols)
            .filter(|&f| self.pivot_of_col[f].is_none())
            .map(|f| {
                let mut v = vec![S::zero(); self.ncols];
                v[f] = S::one();
                for (pc, r) in &self.rows {
                    if let Ok(pos) = r.binary_search_by_key(&f, |(c, _)| *c) {
                        v[*pc] = r[pos].1.neg();
                    }
                }
                v
            })
            .collect()
    }
}

/// `a + coef * b` on sorted sparse rows.
fn axpy<S: Scalar>(a: &[(usize, S)], coef: &S, b: &[(usize, S)], thr: f64) -> SparseRow<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (c, v) = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            i += 1;
            (a[i - 1].0, a[i - 1].1.clone())
        } else if i >= a.len() || b[j].0 < a[i].0 {
            j += 1;
            (b[j - 1].0, coef.mul(&b[j - 1].1))
        } else {
            let mut v = a[i].1.clone();
            v.mul_add_assign(coef, &b[j].1);
            i += 1;
            j += 1;
            (a[i - 1].0, v)
        };
        let keep = if S::EXACT { !v.is_exact_zero() } else { v.magnitude() > thr };
        if keep {
            out.push((c, v));
        }
    }
    out
}

pub fn sparse_from_dense<S: Scalar>(v: &[S]) -> SparseRow<S> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_exact_zero())
        .map(|(c, x)| (c, x.clone()))
        .collect()
}

/// Basis of `{x : M x = 0}`.
pub fn nullspace<S: Scalar>(m: &Matrix<S>, tol: f64) -> Vec<Vec<S>> {
    let mut red = RowReducer::new(m.cols(), tol);
    for r in 0..m.rows() {
        let row = sparse_from_dense(&m.data()[r * m.cols()..(r + 1) * m.cols()]);
        red.push(&row);
        if red.is_full() {
            break;
        }
    }
    red.nullspace()
}

/// Linear span of a set of equal-shaped matrices, with membership tests.
#[derive(Clone, Debug)]
pub struct Span<S: Scalar> {
    reducer: RowReducer<S>,
}

impl<S: Scalar> Span<S> {
    pub fn new(len: usize, tol: f64) -> Self {
        Span { reducer: RowReducer::new(len, tol) }
    }

    pub fn of_matrices<'a>(ms: impl IntoIterator<Item = &'a Matrix<S>>, len: usize, tol: f64) -> Self {
        let mut s = Span::new(len, tol);
        for m in ms {
            s.insert(m);
        }
        s
    }

    pub fn insert(&mut self, m: &Matrix<S>) -> bool {
        self.reducer.push(&sparse_from_dense(m.data()))
    }

    pub fn contains(&self, m: &Matrix<S>) -> bool {
        m.data().len() == self.reducer.ncols() && self.reducer.contains(&sparse_from_dense(m.data()))
    }

    pub fn dim(&self) -> usize {
        self.reducer.rank()
    }
}

/// Rank of a family of matrices viewed as vectors.
pub fn rank_of<'a, S: Scalar>(ms: impl IntoIterator<Item = &'a Matrix<S>>, len: usize, tol: f64) -> usize {
    Span::of_matrices(ms, len, tol).dim()
}
