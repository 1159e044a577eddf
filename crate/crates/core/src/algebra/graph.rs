//! Bratteli diagrams along a lattice row and the principal graph read off them.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{decompose, inclusion_matrix, InclusionMatrix, MatrixStarAlgebra};
use crate::error::Result;
use crate::exec::Config;
use crate::intertwiner::LatticeGrid;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// The tower `cell(j, j) ⊂ cell(j+1, j) ⊂ …` of one lattice row.
#[derive(Clone, Debug, PartialEq)]
pub struct Bratteli {
    pub row: usize,
    /// `(d, m)` of every block, level by level, in canonical order.
    pub levels: Vec<Vec<(usize, usize)>>,
    /// `inclusions[t]` maps level `t` into level `t + 1`.
    pub inclusions: Vec<InclusionMatrix>,
}

/// Decomposes every cell of row `j` and the inclusions `T ↦ T ⊗ 1` between them.
pub fn bratteli<S: Scalar>(grid: &LatticeGrid<S>, row: usize, cfg: &Config) -> Result<Bratteli> {
    if row >= grid.depth {
        return Err(crate::Error::InvalidArgument(format!("row {row} has no inclusions at depth {}", grid.depth)));
    }
    let m = grid.m;
    let cols: Vec<usize> = (row..=grid.depth).collect();
    let decs = cfg.exec.map(cols.clone(), |i| -> Result<_> {
        let ambient = m.pow((i - row) as u32);
        let alg = MatrixStarAlgebra::from_closed_basis(ambient, grid.cell(i, row).basis.clone(), cfg.tol)?;
        let dec = decompose(&alg, cfg.seed)?;
        Ok((alg, dec))
    });
    let decs: Vec<_> = decs.into_iter().collect::<Result<_>>()?;
    let id = Matrix::<S>::identity(m);
    let pairs: Vec<usize> = (0..decs.len() - 1).collect();
    let inclusions = cfg.exec.map(pairs, |t| {
        let (small, sdec) = &decs[t];
        let (big, bdec) = &decs[t + 1];
        let amb = big.ambient();
        let lift = |x: &Matrix<S>| x.kron(&id);
        inclusion_matrix(&small.map(amb, lift), &sdec.map(amb, lift), big, bdec)
    });
    Ok(Bratteli {
        row,
        levels: decs.iter().map(|(_, d)| d.dims()).collect(),
        inclusions: inclusions.into_iter().collect::<Result<_>>()?,
    })
}

impl Bratteli {
    pub fn to_dot(&self) -> String {
        let mut s = format!("graph bratteli_row{} {{\n  rankdir=TB;\n", self.row);
        for (t, lvl) in self.levels.iter().enumerate() {
            for (b, (d, m)) in lvl.iter().enumerate() {
                let _ = writeln!(s, "  \"{t}:{b}\" [label=\"d={d} m={m}\"];");
            }
        }
        for (t, lam) in self.inclusions.iter().enumerate() {
            for k in 0..lam.rows {
                for l in 0..lam.cols {
                    let c = lam.get(k, l);
                    if c > 0 {
                        let _ = writeln!(s, "  \"{t}:{k}\" -- \"{}:{l}\" [label=\"{c}\"];", t + 1);
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Bipartite graph on the blocks that are not reflections of blocks two levels down.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalGraph {
    /// `(level, block)`; vertex 0 is the scalars.
    pub vertices: Vec<(usize, usize)>,
    /// `(u, v, multiplicity)` with `u < v` indexing `vertices`.
    pub edges: Vec<(usize, usize, usize)>,
    /// First level with no new blocks, if one was reached.
    pub stabilized_at: Option<usize>,
    /// Squared norm of the adjacency matrix.
    pub index_estimate: f64,
}

/// Marks every block that reflects a block two levels down: block `b` at
/// level `t+1` is old when column `b` of `Λ_{t+1}` equals row `c` of `Λ_t`
/// for an unused block `c` at level `t-1`. Matching is greedy in canonical
/// order. This heuristic cannot see beyond the computed depth.
pub fn principal_graph(br: &Bratteli) -> PrincipalGraph {
    let nlev = br.levels.len();
    let mut is_new: Vec<Vec<bool>> = br.levels.iter().map(|l| vec![true; l.len()]).collect();
    let mut stabilized_at = None;
    for t in 1..nlev.saturating_sub(1) {
        let (prev, next) = (&br.inclusions[t - 1], &br.inclusions[t]);
        let mut used = vec![false; prev.rows];
        for b in 0..next.cols {
            let col = next.col(b);
            if let Some(c) = (0..prev.rows).find(|&c| !used[c] && prev.row(c) == col) {
                used[c] = true;
                is_new[t + 1][b] = false;
            }
        }
        if stabilized_at.is_none() && t + 1 >= 2 && is_new[t + 1].iter().all(|x| !x) {
            stabilized_at = Some(t + 1);
        }
    }
    let mut vertices = Vec::new();
    let mut index_of: Vec<Vec<Option<usize>>> = Vec::new();
    for (t, flags) in is_new.iter().enumerate() {
        let row = flags
            .iter()
            .enumerate()
            .map(|(b, &nw)| {
                (nw && stabilized_at.is_none_or(|s| t < s)).then(|| {
                    vertices.push((t, b));
                    vertices.len() - 1
                })
            })
            .collect();
        index_of.push(row);
    }
    let mut edges = Vec::new();
    for (t, lam) in br.inclusions.iter().enumerate() {
        for k in 0..lam.rows {
            for l in 0..lam.cols {
                if let (Some(u), Some(v)) = (index_of[t][k], index_of[t + 1][l]) {
                    let c = lam.get(k, l);
                    if c > 0 {
                        edges.push((u.min(v), u.max(v), c));
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    let n = vertices.len();
    let mut adj = DMatrix::<f64>::zeros(n, n);
    for &(u, v, c) in &edges {
        adj[(u, v)] += c as f64;
        adj[(v, u)] += c as f64;
    }
    let norm = if n == 0 { 0.0 } else { adj.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max) };
    PrincipalGraph { vertices, edges, stabilized_at, index_estimate: norm * norm }
}

impl PrincipalGraph {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph principal {\n");
        if self.stabilized_at.is_none() {
            s.push_str("  label=\"unstabilized\";\n");
        }
        for (i, (t, b)) in self.vertices.iter().enumerate() {
            let shape = if t % 2 == 0 { "circle" } else { "box" };
            let _ = writeln!(s, "  v{i} [label=\"{t}:{b}\" shape={shape}];");
        }
        for &(u, v, c) in &self.edges {
            let _ = writeln!(s, "  v{u} -- v{v} [label=\"{c}\"];");
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(rows: usize, cols: usize, entries: &[usize]) -> InclusionMatrix {
        InclusionMatrix { rows, cols, entries: entries.to_vec() }
    }

    #[test]
    fn four_cycle() {
        let br = Bratteli {
            row: 0,
            levels: vec![vec![(1, 1)], vec![(1, 1), (1, 1)], vec![(2, 1), (2, 1)], vec![(4, 1), (4, 1)]],
            inclusions: vec![lam(1, 2, &[1, 1]), lam(2, 2, &[1, 1, 1, 1]), lam(2, 2, &[1, 1, 1, 1])],
        };
        let g = principal_graph(&br);
        assert_eq!(g.vertices.len(), 4);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.stabilized_at, Some(3));
        assert!((g.index_estimate - 4.0).abs() < 1e-9);
    }

    #[test]
    fn double_edge() {
        let br = Bratteli {
            row: 0,
            levels: vec![vec![(1, 1)], vec![(2, 1)], vec![(4, 1)]],
            inclusions: vec![lam(1, 1, &[2]), lam(1, 1, &[2])],
        };
        let g = principal_graph(&br);
        assert_eq!(g.edges, vec![(0, 1, 2)]);
        assert_eq!(g.stabilized_at, Some(2));
        assert!((g.index_estimate - 4.0).abs() < 1e-9);
        assert!(g.to_dot().contains("v0 -- v1 [label=\"2\"]"));
    }

    #[test]
    fn lattice_towers() {
        use crate::intertwiner::lattice;
        use crate::scalar::GaussRational as Q;
        use crate::vertex::VertexOperator;
        let cfg = Config { tol: 0.0, ..Config::default() };
        let rows: &[&[i64]] = &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]];
        let f1 = VertexOperator::new(2, 2, Matrix::<Q>::from_i64_rows(rows), 0.0).unwrap();
        let grid = lattice(&f1.make_uprime().unwrap(), 3, &cfg).unwrap();
        let br = bratteli(&grid, 0, &cfg).unwrap();
        assert_eq!(br.levels[2], vec![(2, 1), (2, 1)]);
        let g = principal_graph(&br);
        assert_eq!((g.vertices.len(), g.edges.len(), g.stabilized_at), (4, 4, Some(3)));
        assert!((g.index_estimate - 4.0).abs() < 1e-9);

        let id = VertexOperator::new(2, 2, Matrix::<Q>::identity(4), 0.0).unwrap();
        let grid = lattice(&id.make_uprime().unwrap(), 3, &cfg).unwrap();
        let g = principal_graph(&bratteli(&grid, 0, &cfg).unwrap());
        assert_eq!(g.edges, vec![(0, 1, 2)]);
    }

    #[test]
    fn short_tower_is_unstabilized() {
        let br = Bratteli { row: 0, levels: vec![vec![(1, 1)], vec![(1, 1), (1, 1)]], inclusions: vec![lam(1, 2, &[1, 1])] };
        let g = principal_graph(&br);
        assert_eq!(g.stabilized_at, None);
        assert!(g.to_dot().contains("unstabilized"));
    }
}
