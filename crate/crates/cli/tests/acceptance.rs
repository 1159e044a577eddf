//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use biunitary::algebra::{bratteli, decompose, MatrixStarAlgebra};
use biunitary::fixtures::{dense_conjugate, f1, f2, f3, identity4, s3, swap, to_approx};
use biunitary::group::{diagonal_assignment, group_lattice_oracle, DEFAULT_GROUP_CAP};
use biunitary::intertwiner::{lattice, LatticeGrid};
use biunitary::square::{check_commuting_square, check_jones_identity, compare_paths, jones_projection};
use biunitary::vertex::twisted::random_twist;
use biunitary::vertex::{check_twisted, find_twist, twisted_forms, random_unitary, twisted_sequence_check};
use biunitary::{Config, GaussRational as Q, Matrix, Scalar, TwistQ, VertexOperator};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const TAU: f64 = 1e-9;

fn exact() -> Config {
    Config { tol: 0.0, ..Config::default() }
}

fn approx() -> Config {
    Config { tol: TAU, ..Config::default() }
}

fn star_fixtures() -> Vec<(&'static str, VertexOperator<Q>)> {
    vec![("I4", identity4()), ("F1", f1()), ("F2", f2()), ("F3", f3()), ("S3", s3())]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

fn star_closure() -> Check {
    let start = Instant::now();
    for (name, u) in star_fixtures() {
        ensure(u.check_star(), || format!("{name} fails star"))?;
        let derived = [
            ("uhat", u.make_uhat()),
            ("ubar", u.make_ubar()),
            ("uprime", u.make_uprime()),
        ];
        for (what, v) in derived {
            let v = v.map_err(err(what))?;
            ensure(v.check_star(), || format!("{name} {what} fails star"))?;
        }
        for i in 1..=3 {
            ensure(u.horizontal_cable(i).map_err(err("cable"))?.check_star(), || format!("{name} horizontal cable {i}"))?;
            ensure(u.vertical_cable(i).map_err(err("cable"))?.check_star(), || format!("{name} vertical cable {i}"))?;
        }
    }
    let sw = swap();
    let seq = sw.star_sequence(4);
    ensure(!sw.check_star(), || "swap passes star".into())?;
    ensure(seq.singular.map(|s| s.index) == Some(1), || format!("swap singular at {:?}", seq.singular))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("5 fixtures x 9 derived operators, swap singular at u_1, {t:.2?}"))
}

fn paths_agree() -> Check {
    let mut notes = Vec::new();
    let mut run = |name: &str, depth: usize, f: &dyn Fn() -> biunitary::Result<biunitary::square::PathComparison>| {
        let start = Instant::now();
        let cmp = f().map_err(err(name))?;
        let t = start.elapsed();
        ensure(cmp.all_match(), || format!("{name}: mismatches {:?}", cmp.mismatches()))?;
        ensure(cmp.cells.len() == (depth + 1) * (depth + 2) / 2, || format!("{name}: cell count"))?;
        ensure(t < Duration::from_secs(60), || format!("{name} took {t:?}"))?;
        notes.push(format!("{name}@{depth} {t:.1?}"));
        Ok::<_, String>(())
    };
    for (name, u) in star_fixtures() {
        let depth = if u.m() == 2 && u.n() == 2 { 4 } else { 3 };
        run(name, depth, &|| compare_paths(&u, depth, &exact()))?;
    }
    let dense = dense_conjugate(&f1(), 11, TAU);
    run("F1 dense approx", 3, &|| compare_paths(&dense, 3, &approx()))?;
    Ok(notes.join(", "))
}

fn group_oracle() -> Check {
    let depth = 3;
    let mut notes = Vec::new();
    for (name, u) in [("F1", f1()), ("F3", f3())] {
        let up = u.make_uprime().map_err(err("uprime"))?;
        let (g, asg) = diagonal_assignment(&up, DEFAULT_GROUP_CAP).map_err(err("assignment"))?;
        let oracle = group_lattice_oracle(&g, &asg, depth);
        let inter = lattice(&up, depth, &exact()).map_err(err("lattice"))?.all_dims();
        let cmp = compare_paths(&u, depth, &exact()).map_err(err("compare"))?;
        let direct: Vec<_> = cmp.cells.iter().map(|c| ((c.i, c.j), c.direct_dim)).collect();
        ensure(oracle == inter, || format!("{name}: oracle {oracle:?} vs intertwiner {inter:?}"))?;
        ensure(oracle == direct, || format!("{name}: oracle {oracle:?} vs direct {direct:?}"))?;
        let row0: Vec<usize> = oracle.iter().filter(|((_, j), _)| *j == 0).map(|(_, d)| *d).collect();
        if name == "F1" {
            ensure(row0 == [1, 2, 8, 32], || format!("F1 row 0 {row0:?}"))?;
        }
        notes.push(format!("{name} row0 {row0:?}"));
    }
    Ok(notes.join(", "))
}

fn jones() -> Check {
    for (name, u) in star_fixtures() {
        ensure(check_jones_identity(&u).map_err(err(name))?, || format!("{name} exact"))?;
        let a = to_approx(&u, TAU);
        ensure(check_jones_identity(&a).map_err(err(name))?, || format!("{name} approx"))?;
    }
    let d = dense_conjugate(&f3(), 5, TAU);
    ensure(check_jones_identity(&d).map_err(err("dense"))?, || "dense F3".into())?;
    for dim in 1..=4 {
        let e = jones_projection::<Q>(dim);
        ensure(e.mul(&e) == e, || format!("e^2 != e for d={dim}"))?;
        ensure(e.adjoint().data() == e.data(), || format!("e* != e for d={dim}"))?;
        ensure(e.trace().map_err(err("trace"))? == Q::one(), || format!("tr e != 1 for d={dim}"))?;
    }
    Ok("5 fixtures exact and approx, dense F3; e idempotent, self-adjoint, trace 1 for d<=4".into())
}

fn commuting_square() -> Check {
    let mut cases: Vec<(String, bool, bool)> = Vec::new();
    let mut all = star_fixtures();
    all.push(("swap", swap()));
    for (name, u) in &all {
        let sq = check_commuting_square(u).map_err(err(name))?;
        cases.push((name.to_string(), sq.is_commuting, u.check_star()));
    }
    for (name, base) in [("F3", f3()), ("swap", swap())] {
        let d = dense_conjugate(&base, 9, TAU);
        let sq = check_commuting_square(&d).map_err(err(name))?;
        cases.push((format!("dense {name}"), sq.is_commuting, d.check_star()));
    }
    let bad: Vec<_> = cases.iter().filter(|(_, a, b)| a != b).collect();
    ensure(bad.is_empty(), || format!("verdicts differ: {bad:?}"))?;
    let falses = cases.iter().filter(|c| !c.2).count();
    ensure(falses == 2, || format!("expected 2 non-biunitary cases, got {falses}"))?;
    Ok(format!("{} operators, {} of them not biunitary", cases.len(), falses))
}

fn random_pair(seed: u64) -> (VertexOperator<Complex64>, TwistQ<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (2 + (seed as usize / 2) % 2, 2);
    let u = if seed.is_multiple_of(2) {
        let gens: Vec<_> = (0..m).map(|_| random_unitary(n, &mut rng)).collect();
        biunitary::group::model_i(&gens, TAU).expect("unitary blocks")
    } else {
        VertexOperator::new(m, n, random_unitary(m * n, &mut rng), TAU).expect("unitary")
    };
    (u, random_twist(m, &mut rng))
}

fn twisted() -> Check {
    let mut holds = 0;
    for seed in 0..50 {
        let (u, q) = random_pair(seed);
        let (a, b, c) = twisted_forms(&u, &q).map_err(err("forms"))?;
        ensure(a == b && b == c, || format!("seed {seed}: forms {a} {b} {c}"))?;
        holds += a as usize;
    }
    let mut all = star_fixtures();
    all.push(("swap", swap()));
    for (name, u) in &all {
        let q = TwistQ::identity(u.m());
        ensure(check_twisted(u, &q).map_err(err(name))? == u.check_star(), || format!("{name}: Q=I differs"))?;
    }
    let mut found = Vec::new();
    for (name, u) in star_fixtures() {
        if let Some(q) = find_twist(&u, 0).map_err(err(name))? {
            ensure(twisted_sequence_check(&u, &q, 3).map_err(err(name))?, || format!("{name}: sequence fails"))?;
            if !q.is_identity() {
                found.push(name);
            }
        }
    }
    Ok(format!("50 pairs agree ({holds} twisted), Q=I matches star, non-trivial twists {found:?} pass to N=3"))
}

fn check_grid<S: Scalar>(name: &str, grid: &LatticeGrid<S>, cfg: &Config) -> std::result::Result<usize, String> {
    let m = grid.m;
    let id = Matrix::<S>::identity(m);
    let mut count = 0;
    for i in 0..=grid.depth {
        for j in 0..=i {
            let amb = m.pow((i - j) as u32);
            let alg = MatrixStarAlgebra::from_closed_basis(amb, grid.cell(i, j).basis.clone(), cfg.tol)
                .map_err(err(name))?;
            let dims = decompose(&alg, cfg.seed).map_err(err(name))?.dims();
            ensure(dims.iter().map(|(d, _)| d * d).sum::<usize>() == alg.dim(), || format!("{name} ({i},{j}) sum d^2"))?;
            ensure(dims.iter().map(|(d, k)| d * k).sum::<usize>() == amb, || format!("{name} ({i},{j}) sum d m"))?;
            count += 1;
            if i < grid.depth {
                let big = grid.cell(i + 1, j).span(cfg.tol);
                let ok = grid.cell(i, j).basis.iter().all(|t| big.contains(&t.kron(&id).without_legs()));
                ensure(ok, || format!("{name} ({i},{j}) T⊗1"))?;
            }
            if j < i {
                let big = grid.cell(i, j).span(cfg.tol);
                let ok = grid.cell(i, j + 1).basis.iter().all(|t| big.contains(&id.kron(t).without_legs()));
                ensure(ok, || format!("{name} ({i},{}) 1⊗T", j + 1))?;
            }
        }
    }
    for row in 0..grid.depth {
        let br = bratteli(grid, row, cfg).map_err(err(name))?;
        for (t, lam) in br.inclusions.iter().enumerate() {
            for (l, &(d_big, _)) in br.levels[t + 1].iter().enumerate() {
                let s: usize = (0..lam.rows).map(|k| lam.get(k, l) * br.levels[t][k].0).sum();
                ensure(s == d_big, || format!("{name} row {row} level {t}: block {l} size"))?;
            }
        }
    }
    Ok(count)
}

fn bookkeeping() -> Check {
    let mut cells = 0;
    for (name, u) in star_fixtures() {
        let depth = if u.m() == 2 { 3 } else { 2 };
        let grid = lattice(&u.make_uprime().map_err(err(name))?, depth, &exact()).map_err(err(name))?;
        cells += check_grid(name, &grid, &exact())?;
    }
    let d = dense_conjugate(&f3(), 13, TAU);
    let grid = lattice(&d.make_uprime().map_err(err("dense"))?, 3, &approx()).map_err(err("dense"))?;
    cells += check_grid("dense F3", &grid, &approx())?;
    Ok(format!("{cells} cells decomposed; inclusions integral and lattice embeddings hold"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn cli_bytes(args: &[&str], dot_dir: Option<&Path>) -> std::result::Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biunitary"));
    cmd.args(args);
    if let Some(d) = dot_dir {
        cmd.arg("--out").arg(d);
    }
    let o = cmd.output().map_err(err("spawn"))?;
    ensure(o.status.code() == Some(0), || format!("{args:?} exit {:?}", o.status.code()))?;
    let mut bytes = o.stdout;
    if let Some(d) = dot_dir {
        for f in ["bratteli.dot", "principal.dot"] {
            bytes.extend(std::fs::read(d.join(f)).map_err(err(f))?);
        }
    }
    Ok(bytes)
}

fn determinism() -> Check {
    let tmp = std::env::temp_dir().join(format!("biunitary-acceptance-{}", std::process::id()));
    let (a, b) = (tmp.join("a"), tmp.join("b"));
    std::fs::create_dir_all(&a).map_err(err("tmp"))?;
    std::fs::create_dir_all(&b).map_err(err("tmp"))?;
    let mut runs = 0;
    let inputs = ["f1.json", "f2.json", "s3.json", "f1_approx.json", "f1_twisted.json"];
    let result = (|| {
        for input in inputs {
            let path = data(input);
            let p = path.to_str().expect("utf-8 path");
            for cmd in [vec!["check", p], vec!["lattice", p], vec!["oracle", p, "--depth", "2"], vec!["compare", p, "--depth", "2"]] {
                let x = cli_bytes(&cmd, None)?;
                let y = cli_bytes(&cmd, None)?;
                ensure(x == y, || format!("{cmd:?} differs"))?;
                runs += 1;
            }
            let seq = ["lattice", p, "--sequential"];
            ensure(cli_bytes(&seq, None)? == cli_bytes(&seq[..2], None)?, || format!("{input}: sequential differs"))?;
            let x = cli_bytes(&["graph", p], Some(&a))?;
            let y = cli_bytes(&["graph", p], Some(&b))?;
            ensure(x == y, || format!("{input}: graph differs"))?;
            runs += 2;
        }
        let g = data("group_f1.json");
        let gp = g.to_str().expect("utf-8 path");
        ensure(cli_bytes(&["group", gp], None)? == cli_bytes(&["group", gp], None)?, || "group differs".into())?;
        Ok::<_, String>(())
    })();
    let _ = std::fs::remove_dir_all(&tmp);
    result?;
    Ok(format!("{} command pairs byte-identical, sequential equals parallel", runs + 1))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("star closure", star_closure),
        ("intertwiner and direct paths agree", paths_agree),
        ("group oracle three-way agreement", group_oracle),
        ("Jones identity", jones),
        ("commuting square iff star", commuting_square),
        ("twisted conditions", twisted),
        ("structure bookkeeping", bookkeeping),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(note) => println!("criterion {}: PASS {name}: {note}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
