use biunitary::algebra::{decompose, MatrixStarAlgebra};
use biunitary::fixtures::{dense_conjugate, f1, f2, f3, identity4, s3, swap, to_approx};
use biunitary::group::{diagonal_assignment, group_lattice_oracle, DEFAULT_GROUP_CAP};
use biunitary::intertwiner::{lattice, realize_word, Letter};
use biunitary::square::{check_commuting_square, check_jones_identity, compare_paths};
use biunitary::vertex::{check_twisted, find_twist, twisted_sequence_check};
use biunitary::{Config, GaussRational as Q, Matrix, Scalar, TwistQ, VertexOperator};

fn exact_cfg() -> Config {
    Config { tol: 0.0, ..Config::default() }
}

fn star_fixtures() -> Vec<(&'static str, VertexOperator<Q>)> {
    vec![("I4", identity4()), ("F1", f1()), ("F2", f2()), ("F3", f3()), ("S3", s3())]
}

#[test]
fn derived_operators_stay_biunitary() {
    for (name, u) in star_fixtures() {
        assert!(u.check_star(), "{name}");
        assert!(u.make_uhat().unwrap().check_star(), "{name} uhat");
        assert!(u.make_ubar().unwrap().check_star(), "{name} ubar");
        assert!(u.make_uprime().unwrap().check_star(), "{name} uprime");
        for i in 1..=3 {
            assert!(u.horizontal_cable(i).unwrap().check_star(), "{name} h{i}");
            assert!(u.vertical_cable(i).unwrap().check_star(), "{name} v{i}");
        }
    }
    let seq = swap().star_sequence(4);
    assert_eq!(seq.singular.map(|s| s.index), Some(1));
}

#[test]
fn ubar_is_conjugate_entrywise() {
    for u in [f1(), f3()] {
        let ub = u.make_ubar().unwrap();
        let (m, n) = (u.m(), u.n());
        for a in 0..m {
            for x in 0..n {
                for b in 0..m {
                    for y in 0..n {
                        assert_eq!(*ub.entry(a, x, b, y), u.entry(a, x, b, y).conj());
                    }
                }
            }
        }
    }
}

#[test]
fn lattice_matches_group_oracle() {
    let cfg = exact_cfg();
    for (u, depth) in [(f1(), 3), (f3(), 3), (s3(), 2)] {
        let up = u.make_uprime().unwrap();
        let grid = lattice(&up, depth, &cfg).unwrap();
        let (g, asg) = diagonal_assignment(&up, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(grid.all_dims(), group_lattice_oracle(&g, &asg, depth));
    }
    let grid = lattice(&f1().make_uprime().unwrap(), 3, &cfg).unwrap();
    assert_eq!(grid.row_dims(0), vec![1, 2, 8, 32]);
}

#[test]
fn both_paths_agree_on_three_by_three() {
    let cmp = compare_paths(&s3(), 2, &exact_cfg()).unwrap();
    assert!(cmp.all_match(), "{:?}", cmp.mismatches());
}

#[test]
fn approx_paths_agree_after_dense_base_change() {
    let u = dense_conjugate(&f1(), 7, 1e-9);
    let cfg = Config { tol: 1e-9, ..Config::default() };
    let cmp = compare_paths(&u, 2, &cfg).unwrap();
    assert!(cmp.all_match(), "{:?}", cmp.mismatches());
    let exact = lattice(&f1().make_uprime().unwrap(), 2, &exact_cfg()).unwrap();
    let approx = lattice(&u.make_uprime().unwrap(), 2, &cfg).unwrap();
    assert_eq!(exact.all_dims(), approx.all_dims());
}

#[test]
fn commuting_square_iff_star() {
    let mut all = star_fixtures();
    all.push(("swap", swap()));
    for (name, u) in all {
        assert_eq!(check_commuting_square(&u).unwrap().is_commuting, u.check_star(), "{name}");
    }
    let d = dense_conjugate(&f3(), 3, 1e-9);
    assert!(d.check_star());
    assert!(check_commuting_square(&d).unwrap().is_commuting);
    let ds = dense_conjugate(&swap(), 3, 1e-9);
    assert!(!ds.check_star());
    assert!(!check_commuting_square(&ds).unwrap().is_commuting);
}

#[test]
fn jones_identity_on_fixtures() {
    for (name, u) in star_fixtures() {
        assert!(check_jones_identity(&u).unwrap(), "{name}");
        assert!(check_jones_identity(&to_approx(&u, 1e-9)).unwrap(), "{name} approx");
    }
}

#[test]
fn identity_twist_is_star() {
    let mut all = star_fixtures();
    all.push(("swap", swap()));
    for (name, u) in all {
        let q = TwistQ::identity(u.m());
        assert_eq!(check_twisted(&u, &q).unwrap(), u.check_star(), "{name}");
    }
}

#[test]
fn found_twists_pass_sequence_check() {
    for (name, u) in star_fixtures() {
        if let Some(q) = find_twist(&u, 0).unwrap() {
            assert!(twisted_sequence_check(&u, &q, 3).unwrap(), "{name}");
        }
    }
}

#[test]
fn decompositions_add_up() {
    let cfg = exact_cfg();
    let grid = lattice(&f3().make_uprime().unwrap(), 3, &cfg).unwrap();
    for i in 0..=3 {
        for j in 0..i {
            let ambient = 2usize.pow((i - j) as u32);
            let alg = MatrixStarAlgebra::from_closed_basis(ambient, grid.cell(i, j).basis.clone(), 0.0).unwrap();
            let dec = decompose(&alg, 0).unwrap();
            let dims = dec.dims();
            assert_eq!(dims.iter().map(|(d, _)| d * d).sum::<usize>(), alg.dim());
            assert_eq!(dims.iter().map(|(d, m)| d * m).sum::<usize>(), ambient);
        }
    }
}

#[test]
fn realized_word_matches_leg_embedding() {
    // X X̂ over F1: u_{13} û_{23} on V ⊗ V* ⊗ W.
    let u = f1();
    let w = realize_word(&u, &[Letter::X, Letter::XHat]).unwrap();
    let uhat = u.make_uhat().unwrap();
    let sig = [biunitary::Leg::new(2), biunitary::Leg::dual(2), biunitary::Leg::new(2)];
    let expect = u
        .mat()
        .embed_on_legs(&[0, 2], &sig)
        .unwrap()
        .mul(&uhat.mat().embed_on_legs(&[1, 2], &sig).unwrap());
    let got: Matrix<Q> = w.realized().clone().without_legs();
    assert_eq!(got, expect.without_legs());
}
