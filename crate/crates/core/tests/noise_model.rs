use geneo_core::bounds::{standard_bound, expected_bound, min_gap_prob, BoundInputs};
use geneo_core::geneo::snap_shift;
use geneo_core::noise::{min_gap, mother_bump, DEFAULT_SIGMA};
use geneo_core::trial::uniform_points;
use geneo_core::{max_shift, min_shift, EdgePolicy, Grid, NoiseSampler, NoiseSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sampled(seed: u64) -> NoiseSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    NoiseSampler::demo(20.0, DEFAULT_SIGMA).sample(&mut rng).unwrap()
}

fn centers(spec: &NoiseSpec) -> Vec<f64> {
    let mut c: Vec<f64> = spec.impulses().iter().map(|i| i.center).collect();
    c.sort_by(f64::total_cmp);
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_noise_splits_into_copies(seed in any::<u64>(), t in 0.0..1.0f64) {
        let spec = sampled(seed);
        let lambda = spec.sigma / spec.beta();
        // a single bump has no neighbour; keep the shift on the grid anyway
        let eta = spec.eta().min(20.0);
        let rho = lambda + t * (eta / 2.0 - 2.0 * lambda);
        let step = 0.004;
        let grid = Grid::spanning(-30.0, 30.0, step).unwrap();
        let rendered = spec.render(grid, EdgePolicy::ZeroExtend);
        // compare against copies placed at the shift actually applied on the grid
        let applied = snap_shift(rho, step) as f64 * step;
        prop_assume!(applied >= lambda && applied <= eta / 2.0 - lambda);

        let tol = 1e-9 * spec.alpha_bar();
        let lo = min_shift(&rendered, rho).unwrap();
        let lo_closed = spec.min_shift_closed_form(applied).render(grid, EdgePolicy::ZeroExtend);
        prop_assert!(lo.sup_dist(&lo_closed).unwrap() <= tol);
        prop_assert!(lo.values().iter().all(|&v| v <= 0.0));

        let hi = max_shift(&rendered, rho).unwrap();
        let hi_closed = spec.max_shift_closed_form(applied).render(grid, EdgePolicy::ZeroExtend);
        prop_assert!(hi.sup_dist(&hi_closed).unwrap() <= tol);
        prop_assert!(hi.values().iter().all(|&v| v >= 0.0));

        // the copies are again separated by at least 2 lambda
        for closed in [spec.min_shift_closed_form(rho), spec.max_shift_closed_form(rho)] {
            let c = centers(&closed);
            prop_assert!(c.windows(2).all(|w| w[1] - w[0] >= 2.0 * lambda * (1.0 - 1e-12)));
            prop_assert!(closed.impulses().iter().all(|i| i.squeeze >= spec.beta()));
        }
    }

    #[test]
    fn rendered_noise_is_bounded_and_supported(seed in any::<u64>()) {
        let spec = sampled(seed);
        prop_assert!(spec.eta() > 8.0 * spec.sigma / spec.beta());
        prop_assert!(spec.in_family(8.0 * spec.sigma / spec.beta(), spec.beta()));
        let grid = Grid::spanning(-30.0, 30.0, 0.01).unwrap();
        let r = spec.render(grid, EdgePolicy::ZeroExtend);
        prop_assert!(r.sup_norm() <= spec.len() as f64 * spec.alpha_bar());
        let support = spec.support_set();
        for (x, v) in grid.points().zip(r.values()) {
            if !support.contains(x) {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }
}

#[test]
fn mother_bump_axioms() {
    for i in -2000..=2000 {
        let x = i as f64 / 1000.0;
        let v = mother_bump(x);
        assert!((0.0..=1.0).contains(&v));
        if x.abs() >= 1.0 {
            assert_eq!(v, 0.0);
        }
    }
    assert_eq!(mother_bump(0.0), 1.0);
}

#[test]
fn sampling_is_deterministic() {
    assert_eq!(sampled(77), sampled(77));
    assert_ne!(sampled(77), sampled(78));
}

#[test]
fn min_gap_law_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 20_000;
    for (k, ell, eta) in [(5usize, 20.0, 1.0), (3, 10.0, 2.5), (2, 10.0, 7.0)] {
        let hits = (0..draws)
            .filter(|_| min_gap(&uniform_points(&mut rng, k, ell)) > eta)
            .count();
        let p = min_gap_prob(k as u32, ell, eta);
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let emp = hits as f64 / draws as f64;
        assert!((emp - p).abs() <= 3.0 * se + 1e-12, "k={k} eta={eta}: {emp} vs {p}");
    }
}

#[test]
fn expected_bound_dominates_deterministic_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let l = rng.random_range(0.5..10.0);
        let beta = rng.random_range(3.0..13.0);
        let k = rng.random_range(2..6);
        let inp = BoundInputs { bumps: k, ell: 20.0, alpha_bar: 80.0, ..BoundInputs::standard(l, 1.1, beta) };
        let r = expected_bound(&inp);
        assert!(r.value >= standard_bound(l, 1.1, beta));
        assert!(r.value <= standard_bound(l, 1.1, beta) + k as f64 * 80.0 + 1e-9);
    }
}
