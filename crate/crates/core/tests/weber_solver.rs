use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use star_steiner::search::random_instance;
use star_steiner::weber::{
    optimality_residual, solve, steiner_star_length, vertex_pull, Start, WeberOptions,
};
use star_steiner::{Configuration, Point};

fn instances() -> impl Iterator<Item = (u64, Configuration)> {
    (0..200u64).map(|seed| {
        let n = 3 + (seed as usize * 7) % 20;
        let d = 2 + (seed as usize % 2);
        (seed, random_instance(seed, n, d).unwrap())
    })
}

#[test]
fn no_perturbation_improves_the_center() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (seed, c) in instances() {
        let w = solve(&c, &WeberOptions::default());
        assert!(w.converged, "seed {seed}");
        let sigma = 0.01 * c.diameter();
        let normal = Normal::new(0.0, sigma).unwrap();
        for _ in 0..100 {
            let moved: Vec<f64> = w
                .center
                .coords()
                .iter()
                .map(|x| x + normal.sample(&mut rng))
                .collect();
            let len = steiner_star_length(&c, &Point::new(moved).unwrap()).unwrap();
            assert!(
                len >= w.steiner_length * (1.0 - 1e-9),
                "seed {seed}: {len} < {}",
                w.steiner_length
            );
        }
    }
}

#[test]
fn restart_from_random_point_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (seed, c) in instances().take(100) {
        let base = solve(&c, &WeberOptions::default());
        let start: Vec<f64> = (0..c.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let opts = WeberOptions {
            start: Start::At(Point::new(start).unwrap()),
            ..Default::default()
        };
        let other = solve(&c, &opts);
        assert!(other.converged);
        let scale = base.steiner_length.max(1.0);
        assert!(
            (base.steiner_length - other.steiner_length).abs() <= 1e-7 * scale,
            "seed {seed}"
        );
    }
}

#[test]
fn interior_centers_meet_residual_tolerance() {
    for (seed, c) in instances() {
        let opts = WeberOptions::default();
        let w = solve(&c, &opts);
        match w.anchored_index {
            None => {
                let r = optimality_residual(&c, &w.center).unwrap();
                assert!(r <= opts.tol * c.len() as f64, "seed {seed}: residual {r}");
            }
            Some(k) => assert!(
                vertex_pull(&c, k).unwrap().is_optimal(opts.tol),
                "seed {seed}"
            ),
        }
    }
}

#[test]
fn dominant_vertex_anchors_the_center() {
    // A heavy stack at the origin outweighs the three far points.
    let mut rows = vec![vec![0.0, 0.0]; 4];
    rows.extend([vec![5.0, 1.0], vec![-2.0, 4.0], vec![1.0, -6.0]]);
    let c = Configuration::from_rows(rows).unwrap();
    let w = solve(&c, &WeberOptions::default());
    let k = w.anchored_index.expect("anchored");
    assert_eq!(c.points()[k].coords(), &[0.0, 0.0]);
    let pull = vertex_pull(&c, k).unwrap();
    assert!(pull.norm <= pull.multiplicity as f64);
}

#[test]
fn traces_are_monotone() {
    for (seed, c) in instances().take(50) {
        let opts = WeberOptions {
            record_trace: true,
            ..Default::default()
        };
        let w = solve(&c, &opts);
        for pair in w.trace.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "seed {seed}");
        }
    }
}
