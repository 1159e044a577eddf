//! One function per subcommand. Each returns a JSON report and a verdict.

use std::path::Path;

use biunitary::algebra::{bratteli, decompose, principal_graph, MatrixStarAlgebra};
use biunitary::group::{
    close_group, diagonal_assignment, group_lattice_oracle, model_ii_group, pgl_generators, DEFAULT_GROUP_CAP,
};
use biunitary::intertwiner::lattice;
use biunitary::square::{compare_paths, relative_commutant_direct};
use biunitary::vertex::{check_twisted, twisted_forms};
use biunitary::{Config, Error, Result, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::input::{GroupModel, Model};

/// Terms of `u_0, u_1, …` formed by `check`.
pub const SEQUENCE_LEN: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    /// `false` maps to exit code 1.
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub i: usize,
    pub j: usize,
    pub dim: usize,
    /// `[d, m]` per simple block, sorted.
    pub blocks: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub depth: usize,
    pub m: usize,
    pub cells: Vec<CellReport>,
}

fn blocks_of<S: Scalar>(alg: &MatrixStarAlgebra<S>, seed: u64) -> Result<Vec<[usize; 2]>> {
    Ok(decompose(alg, seed)?.dims().into_iter().map(|(d, m)| [d, m]).collect())
}

fn cells(depth: usize) -> Vec<(usize, usize)> {
    (0..=depth).flat_map(|i| (0..=i).map(move |j| (i, j))).collect()
}

/// Fixed precision keeps reports stable against last-bit noise.
fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn check<S: Scalar>(model: &Model<S>) -> Result<Outcome> {
    let u = &model.u;
    let seq = u.star_sequence(SEQUENCE_LEN);
    let star = u.check_star();
    let singular = seq.singular.map(|s| {
        let pivot = if S::EXACT { json!(s.pivot.to_string()) } else { json!(s.pivot) };
        json!({ "index": s.index, "pivot": pivot })
    });
    let twisted = match &model.twist {
        Some(q) => {
            let (a, b, c) = twisted_forms(u, q)?;
            Some(json!({ "holds": check_twisted(u, q)?, "forms": [a, b, c] }))
        }
        None => None,
    };
    let ok = match &twisted {
        Some(t) => t["holds"] == json!(true),
        None => star,
    };
    Ok(Outcome {
        report: json!({
            "m": u.m(),
            "n": u.n(),
            "scalar": if S::EXACT { "exact" } else { "approx" },
            "unitary": u.is_unitary(),
            "star": star,
            "sequence": {
                "formed": seq.terms.len(),
                "singular": singular,
                "period_two": seq.has_period_two(),
            },
            "twisted": twisted,
        }),
        ok,
    })
}

pub fn lattice_report<S: Scalar>(model: &Model<S>, cfg: &Config, depth: usize) -> Result<LatticeReport> {
    let up = model.u.make_uprime()?;
    let grid = lattice(&up, depth, cfg)?;
    let m = grid.m;
    let out = cfg.exec.map(cells(depth), |(i, j)| -> Result<CellReport> {
        let alg = MatrixStarAlgebra::from_closed_basis(m.pow((i - j) as u32), grid.cell(i, j).basis.clone(), cfg.tol)?;
        Ok(CellReport { i, j, dim: alg.dim(), blocks: blocks_of(&alg, cfg.seed)? })
    });
    Ok(LatticeReport { depth, m, cells: out.into_iter().collect::<Result<_>>()? })
}

pub fn lattice_cmd<S: Scalar>(model: &Model<S>, cfg: &Config, depth: usize) -> Result<Outcome> {
    let rep = lattice_report(model, cfg, depth)?;
    Ok(Outcome { report: serde_json::to_value(rep).expect("serializable"), ok: true })
}

/// Direct relative commutants; a single cell when `cell` is given.
pub fn oracle<S: Scalar>(model: &Model<S>, cfg: &Config, depth: usize, cell: Option<(usize, usize)>) -> Result<Outcome> {
    let keys = match cell {
        Some((i, j)) if j > i => return Err(Error::InvalidArgument(format!("cell ({i},{j}) needs j <= i"))),
        Some(c) => vec![c],
        None => cells(depth),
    };
    let out = cfg.exec.map(keys, |(i, j)| -> Result<CellReport> {
        let alg = relative_commutant_direct(&model.u, i, j, cfg)?;
        Ok(CellReport { i, j, dim: alg.dim(), blocks: blocks_of(&alg, cfg.seed)? })
    });
    let out: Vec<CellReport> = out.into_iter().collect::<Result<_>>()?;
    Ok(Outcome { report: json!({ "cells": out }), ok: true })
}

pub fn compare<S: Scalar>(model: &Model<S>, cfg: &Config, depth: usize) -> Result<Outcome> {
    let cmp = compare_paths(&model.u, depth, cfg)?;
    let cells: Vec<Value> = cmp
        .cells
        .iter()
        .map(|c| {
            json!({
                "i": c.i,
                "j": c.j,
                "direct_dim": c.direct_dim,
                "intertwiner_dim": c.intertwiner_dim,
                "direct_blocks": c.direct_blocks,
                "intertwiner_blocks": c.intertwiner_blocks,
                "same_span": c.same_span,
                "matches": c.matches(),
            })
        })
        .collect();
    let ok = cmp.all_match();
    Ok(Outcome {
        report: json!({ "depth": depth, "all_match": ok, "mismatches": cmp.mismatches().len(), "cells": cells }),
        ok,
    })
}

/// Writes `bratteli.dot` and `principal.dot` into `out` when given.
pub fn graph<S: Scalar>(model: &Model<S>, cfg: &Config, depth: usize, row: usize, out: Option<&Path>) -> Result<Outcome> {
    let up = model.u.make_uprime()?;
    let grid = lattice(&up, depth, cfg)?;
    let br = bratteli(&grid, row, cfg)?;
    let pg = principal_graph(&br);
    if let Some(dir) = out {
        let write = |name: &str, text: String| {
            std::fs::write(dir.join(name), text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))
        };
        write("bratteli.dot", br.to_dot())?;
        write("principal.dot", pg.to_dot())?;
    }
    let inclusions: Vec<Vec<Vec<usize>>> =
        br.inclusions.iter().map(|lam| (0..lam.rows).map(|k| lam.row(k)).collect()).collect();
    Ok(Outcome {
        report: json!({
            "row": row,
            "depth": depth,
            "levels": br.levels,
            "inclusions": inclusions,
            "principal": {
                "vertices": pg.vertices,
                "edges": pg.edges,
                "stabilized_at": pg.stabilized_at,
                "index_estimate": round9(pg.index_estimate),
            },
        }),
        ok: true,
    })
}

/// Intertwiner grid, direct-commutant grid and, for model (i), the group oracle.
pub fn group<S: Scalar>(model: &Model<S>, cfg: &Config, depth: usize) -> Result<Outcome> {
    let Some((kind, gens)) = &model.group else {
        return Err(Error::InvalidArgument("input has no group block".into()));
    };
    let up = model.u.make_uprime()?;
    let inter = lattice(&up, depth, cfg)?.all_dims();
    let cmp = compare_paths(&model.u, depth, cfg)?;
    let direct: Vec<((usize, usize), usize)> = cmp.cells.iter().map(|c| ((c.i, c.j), c.direct_dim)).collect();
    let (order, oracle) = match kind {
        GroupModel::I => {
            let g = close_group(&pgl_generators(gens, cfg.tol)?, DEFAULT_GROUP_CAP)?;
            let (diag, asg) = diagonal_assignment(&up, DEFAULT_GROUP_CAP)?;
            (g.order(), Some(group_lattice_oracle(&diag, &asg, depth)))
        }
        GroupModel::Ii => (close_group(&model_ii_group(gens, cfg.tol)?, DEFAULT_GROUP_CAP)?.order(), None),
    };
    let agree = inter == direct && cmp.all_match() && oracle.as_ref().is_none_or(|o| *o == inter);
    let grid = |v: &[((usize, usize), usize)]| -> Vec<[usize; 3]> { v.iter().map(|&((i, j), d)| [i, j, d]).collect() };
    Ok(Outcome {
        report: json!({
            "model": match kind { GroupModel::I => "i", GroupModel::Ii => "ii" },
            "group_order": order,
            "depth": depth,
            "intertwiner": grid(&inter),
            "direct": grid(&direct),
            "oracle": oracle.as_deref().map(grid),
            "agree": agree,
        }),
        ok: agree,
    })
}
