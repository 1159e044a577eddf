use biunitary::group::model_i;
use biunitary::vertex::twisted::random_twist;
use biunitary::vertex::{check_twisted, twisted_forms, random_unitary};
use biunitary::VertexOperator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Even seeds: block-diagonal u = Σ e_aa ⊗ g_a, twisted for every diagonal Q.
// Odd seeds: a Haar unitary on V⊗W, which generically is not.
#[test]
fn three_forms_agree_on_random_pairs() {
    let mut truths = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (2 + (seed as usize / 2) % 2, 2);
        let u = if seed.is_multiple_of(2) {
            let gens: Vec<_> = (0..m).map(|_| random_unitary(n, &mut rng)).collect();
            model_i(&gens, 1e-9).unwrap()
        } else {
            VertexOperator::new(m, n, random_unitary(m * n, &mut rng), 1e-9).unwrap()
        };
        let q = random_twist(m, &mut rng);
        let (a, b, c) = twisted_forms(&u, &q).unwrap();
        assert!(a == b && b == c, "seed {seed}: {a} {b} {c}");
        assert_eq!(check_twisted(&u, &q).unwrap(), a);
        truths += a as usize;
    }
    assert_eq!(truths, 25);
}
