use num_complex::Complex64;
use proptest::prelude::*;

use plate_semigroup::block::{
    block_abscissa, block_spectrum, build_mode_block, dissipativity_defect, energy, evolve_mode,
    weighted_norm, StateVec,
};
use plate_semigroup::regularity::fit_loglog_slope;
use plate_semigroup::resolvent::{
    explicit_mu_nu, resolvent_block_norm, resolvent_norm, resolvent_residual, resolvent_solve,
    state_from_mu_nu, unit_plate_force,
};
use plate_semigroup::witness::{
    choose_lambda, q_roots, witness_sequence, Normalization, WitnessCase,
};
use plate_semigroup::{ModeSpectrum, SystemParams};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..=hi.log10()).prop_map(|e| 10f64.powf(e))
}

prop_compose! {
    fn params(min_delta: f64)(
        alpha in log_uniform(0.1, 10.0),
        gamma in log_uniform(0.1, 10.0),
        flip in any::<bool>(),
        delta in min_delta..5.0,
        kappa in log_uniform(0.1, 10.0),
        theta in 0.0..=1.0,
        beta in 0.05..=1.0,
    ) -> SystemParams {
        let g = if flip { -gamma } else { gamma };
        SystemParams::new(alpha, g, delta, kappa, theta, beta).unwrap()
    }
}

fn conservative() -> impl Strategy<Value = SystemParams> {
    params(0.0).prop_map(|p| p.with_delta(0.0).unwrap())
}

prop_compose! {
    fn state()(c in prop::array::uniform8(-1.0..1.0f64)) -> StateVec {
        StateVec::new(
            Complex64::new(c[0], c[1]),
            Complex64::new(c[2], c[3]),
            Complex64::new(c[4], c[5]),
            Complex64::new(c[6], c[7]),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dissipativity_identity(p in params(0.0), sigma in log_uniform(1.0, 1e6), u in state()) {
        let b = build_mode_block(&p, sigma).unwrap();
        let scale = energy(&u, &b) * (1.0 + p.damping(sigma));
        prop_assert!(dissipativity_defect(&u, &b, &p).abs() <= 1e-12 * scale);
    }

    #[test]
    fn solve_matches_closed_form(p in params(0.01), sigma in log_uniform(1.0, 1e6), lambda in -1e4..1e4f64) {
        let b = build_mode_block(&p, sigma).unwrap();
        let f = unit_plate_force();
        let u = resolvent_solve(&b, lambda, &f).unwrap();
        let (mu, nu) = explicit_mu_nu(&p, sigma, lambda).unwrap();
        let want = state_from_mu_nu(mu, nu, lambda);
        let nu_w = weighted_norm(&u, &b);
        prop_assert!(weighted_norm(&(u - want), &b) <= 1e-9 * nu_w);
        let res = resolvent_residual(&b, lambda, &u, &f);
        prop_assert!(res <= 1e-10 * (weighted_norm(&f, &b) + lambda.abs() * nu_w));
    }

    #[test]
    fn operator_norm_dominates_the_solution(p in params(0.01), sigma in log_uniform(1.0, 1e6), lambda in -1e4..1e4f64) {
        let b = build_mode_block(&p, sigma).unwrap();
        let f = unit_plate_force();
        let u = resolvent_solve(&b, lambda, &f).unwrap();
        let ratio = weighted_norm(&u, &b) / weighted_norm(&f, &b);
        prop_assert!(ratio <= resolvent_block_norm(&b, lambda).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn damped_blocks_are_stable(p in params(0.01), sigma in log_uniform(1e-2, 1e6)) {
        let b = build_mode_block(&p, sigma).unwrap();
        prop_assert!(block_abscissa(&b).unwrap() <= 1e-9 * b.scaled_matrix().norm());
    }

    #[test]
    fn conservative_spectrum_is_q_roots(p in conservative(), sigma in log_uniform(1e-2, 1e4)) {
        let b = build_mode_block(&p, sigma).unwrap();
        let ev = block_spectrum(&b).unwrap();
        let (lo, hi) = q_roots(&p, sigma);
        let mut squares: Vec<f64> = ev.iter().filter(|z| z.im > 0.0).map(|z| z.im * z.im).collect();
        squares.sort_by(f64::total_cmp);
        prop_assert_eq!(squares.len(), 2);
        prop_assert!((squares[0] - lo).abs() <= 1e-9 * lo);
        prop_assert!((squares[1] - hi).abs() <= 1e-9 * hi);
        let scale = b.scaled_matrix().norm();
        for z in ev {
            prop_assert!(z.re.abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn energy_never_increases(p in params(0.0), sigma in log_uniform(1.0, 1e4), u in state(), t1 in 0.0..5.0f64, dt in 0.0..5.0f64) {
        let b = build_mode_block(&p, sigma).unwrap();
        let e1 = energy(&evolve_mode(&b, &u, t1), &b);
        let e2 = energy(&evolve_mode(&b, &u, t1 + dt), &b);
        prop_assert!(e2 <= e1 * (1.0 + 1e-10) + 1e-300);
    }

    #[test]
    fn conservative_evolution_keeps_norm(p in conservative(), sigma in log_uniform(1.0, 1e4), u in state(), t in 0.0..10.0f64) {
        let b = build_mode_block(&p, sigma).unwrap();
        let n0 = weighted_norm(&u, &b);
        let n1 = weighted_norm(&evolve_mode(&b, &u, t), &b);
        prop_assert!((n1 - n0).abs() <= 1e-10 * n0);
    }

    #[test]
    fn smaller_root_first(p in params(0.0), sigma in log_uniform(1e-2, 1e8)) {
        let (lo, hi) = q_roots(&p, sigma);
        prop_assert!(0.0 < lo && lo <= hi);
        let q = p.with_exponents(0.25, 1.0).unwrap();
        let l1 = choose_lambda(WitnessCase::Case1, &q, sigma).unwrap();
        let l2 = choose_lambda(WitnessCase::Case2, &q, sigma).unwrap();
        prop_assert!(l1 <= l2);
    }

    #[test]
    fn witness_points_solve_their_equation(p in params(0.1), case_idx in 0usize..4, sigma in log_uniform(1e2, 1e8)) {
        let case = WitnessCase::ALL[case_idx];
        let (theta, beta) = match case {
            WitnessCase::Case1 => (0.3, 0.6),
            WitnessCase::Case2 => (0.25, 1.0),
            WitnessCase::Case3 => (0.75, 1.0),
            WitnessCase::Case4 => (0.9, 0.5),
        };
        let p = p.with_exponents(theta, beta).unwrap();
        let spec = ModeSpectrum::from_list(vec![sigma]).unwrap();
        let pt = witness_sequence(case, &p, &spec, Normalization::ResolventRatio).unwrap()[0];
        prop_assert!(pt.relative_residual <= 1e-9);
        prop_assert!(pt.product > 0.0 && pt.product.is_finite());
        // The witness ratio is a lower bound for the resolvent norm there.
        let b = build_mode_block(&p, sigma).unwrap();
        let ratio = pt.norm_u / pt.norm_f;
        prop_assert!(resolvent_block_norm(&b, pt.lambda).unwrap() >= ratio * (1.0 - 1e-9));
    }

    #[test]
    fn power_laws_fit_exactly(power in -3.0..3.0f64, scale in log_uniform(1e-3, 1e3), window in 0.2..=1.0f64) {
        let xs: Vec<f64> = (0..50).map(|i| 10f64.powf(i as f64 / 7.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| scale * x.powf(power)).collect();
        prop_assert!((fit_loglog_slope(&xs, &ys, window).unwrap() - power).abs() <= 1e-10);
    }

    #[test]
    fn adding_modes_never_lowers_the_sup(p in params(0.01), lambda in 1.0..1e3f64, n in 2usize..40, extra in 1usize..40) {
        let short = ModeSpectrum::dirichlet_1d(1.0, n).unwrap();
        let long = ModeSpectrum::dirichlet_1d(1.0, n + extra).unwrap();
        let a = resolvent_norm(&p, lambda, &short).unwrap().norm;
        let b = resolvent_norm(&p, lambda, &long).unwrap().norm;
        prop_assert!(b >= a);
    }
}
