mod common;

use auvkit::allocator::allocate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_brute_force_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut max_iter = 0;
    for k in 0..1000 {
        let p = common::random_problem(&mut rng);
        let r = allocate(&p);
        for i in 0..5 {
            assert!(
                r.f[i] >= p.f_min[i] && r.f[i] <= p.f_max[i],
                "problem {k}: box violated"
            );
        }
        let (oracle, _) = common::brute_force_achieved(&p.b0, &p.tau, &p.f_min, &p.f_max);
        let err = (r.achieved(&p) - oracle).norm() / (1.0 + oracle.norm());
        worst = worst.max(err);
        max_iter = max_iter.max(r.iterations);
        assert!(err <= 1e-4, "problem {k}: mismatch {err:.3e}\n{p:?}\n{r:?}");
    }
    assert!(max_iter <= 5, "{max_iter} clamp iterations");
    println!("worst relative mismatch {worst:.2e}, max iterations {max_iter}");
}
