//! Checks against independent oracles: exact rational arithmetic and
//! frozen high-precision values.

// Frozen constants keep all their reference digits.
#![allow(clippy::excessive_precision)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plate_semigroup::block::{
    block_spectrum, build_mode_block, dissipativity_defect, evolve_mode, evolve_mode_series,
    StateVec,
};
use plate_semigroup::witness::{choose_lambda, q_poly_coeffs, q_roots, WitnessCase};
use plate_semigroup::SystemParams;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    SystemParams::new(
        10f64.powf(rng.random_range(-1.0..1.0)),
        sign * 10f64.powf(rng.random_range(-1.0..1.0)),
        rng.random_range(0.0..5.0),
        10f64.powf(rng.random_range(-1.0..1.0)),
        rng.random_range(0.0..=1.0),
        rng.random_range(0.05..=1.0),
    )
    .unwrap()
}

/// Re⟨BU,U⟩_W + d|z|² in exact arithmetic from the f64 entries of B, W,
/// U and d.
fn exact_defect(
    b: &nalgebra::Matrix4<f64>,
    w: [f64; 4],
    damping: f64,
    u: &[Complex64; 4],
) -> BigRational {
    let re: Vec<BigRational> = u.iter().map(|c| exact(c.re)).collect();
    let im: Vec<BigRational> = u.iter().map(|c| exact(c.im)).collect();
    let mut total = BigRational::zero();
    for i in 0..4 {
        let mut bu_re = BigRational::zero();
        let mut bu_im = BigRational::zero();
        for j in 0..4 {
            let e = exact(b[(i, j)]);
            bu_re += &e * &re[j];
            bu_im += &e * &im[j];
        }
        // Re((a + ib)(c − id)) = ac + bd
        total += exact(w[i]) * (bu_re * &re[i] + bu_im * &im[i]);
    }
    total + exact(damping) * (&re[3] * &re[3] + &im[3] * &im[3])
}

#[test]
fn dissipativity_defect_matches_exact_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let p = random_params(&mut rng);
        let sigma = 10f64.powf(rng.random_range(0.0..6.0));
        let b = build_mode_block(&p, sigma).unwrap();
        let comps: [Complex64; 4] = std::array::from_fn(|_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let u = StateVec::new(comps[0], comps[1], comps[2], comps[3]);
        let oracle = exact_defect(b.matrix(), b.weights(), p.damping(sigma), &comps);
        let got = dissipativity_defect(&u, &b, &p);

        let energy: f64 = comps
            .iter()
            .zip(b.weights())
            .map(|(c, w)| w * c.norm_sqr())
            .sum();
        let scale = energy * (1.0 + p.damping(sigma));
        // The exact defect of the rounded entries is itself roundoff-sized,
        // and the f64 evaluation reproduces it.
        assert!(
            to_f64(&oracle.abs()) <= 1e-12 * scale,
            "exact defect {}",
            to_f64(&oracle)
        );
        assert!((got - to_f64(&oracle)).abs() <= 1e-12 * scale);
    }
}

fn unit_block_rational() -> [[BigRational; 4]; 4] {
    let z = || ratio(0, 1);
    [
        [z(), z(), ratio(1, 1), z()],
        [z(), z(), z(), ratio(1, 1)],
        [ratio(-1, 2), z(), z(), ratio(-1, 2)],
        [z(), ratio(-1, 1), ratio(1, 1), ratio(-1, 1)],
    ]
}

/// exp(tB)x by 60 exact Taylor terms; the remainder is below 4^61/61!.
fn exact_exp_apply(
    b: &[[BigRational; 4]; 4],
    x: [BigRational; 4],
    t: &BigRational,
) -> [BigRational; 4] {
    let mut term = x.clone();
    let mut sum = x;
    for k in 1..=60 {
        let next: [BigRational; 4] = std::array::from_fn(|i| {
            let mut acc = BigRational::zero();
            for (j, tj) in term.iter().enumerate() {
                acc += &b[i][j] * tj;
            }
            acc * t / BigRational::from_integer(BigInt::from(k))
        });
        for i in 0..4 {
            sum[i] += &next[i];
        }
        term = next;
    }
    sum
}

#[test]
fn unit_block_matches_rational_matrix() {
    let b = build_mode_block(&SystemParams::unit(1.0, 1.0).unwrap(), 1.0).unwrap();
    let want = unit_block_rational();
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert_eq!(&exact(b.matrix()[(i, j)]), w);
        }
    }
}

#[test]
fn evolution_matches_exact_series() {
    let b = build_mode_block(&SystemParams::unit(1.0, 1.0).unwrap(), 1.0).unwrap();
    let rb = unit_block_rational();
    let e1 = || [ratio(1, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1)];
    for (t_num, t_den) in [(1, 1), (1, 10), (5, 2)] {
        let t = t_num as f64 / t_den as f64;
        let oracle: Vec<f64> = exact_exp_apply(&rb, e1(), &ratio(t_num, t_den))
            .iter()
            .map(to_f64)
            .collect();
        let norm: f64 = oracle.iter().map(|x| x * x).sum::<f64>().sqrt();
        for got in [
            evolve_mode(&b, &StateVec::real(1.0, 0.0, 0.0, 0.0), t),
            evolve_mode_series(&b, &StateVec::real(1.0, 0.0, 0.0, 0.0), t),
        ] {
            for (c, o) in got.components().iter().zip(&oracle) {
                assert!((c.re - o).abs() <= 1e-10 * norm, "t={t}: {} vs {o}", c.re);
                assert!(c.im.abs() <= 1e-10 * norm);
            }
        }
    }
}

#[test]
fn evolution_at_t1_matches_frozen_value() {
    // exp(B)e₁ for the unit block, 28 digits.
    let frozen = [
        0.768_204_286_598_544_057_610_882_477_9,
        -0.059_981_822_372_424_659_974_728_869_4,
        -0.430_211_853_801_475_124_746_667_212_8,
        -0.155_604_138_768_153_824_309_010_770_8,
    ];
    let b = build_mode_block(&SystemParams::unit(1.0, 1.0).unwrap(), 1.0).unwrap();
    let got = evolve_mode(&b, &StateVec::real(1.0, 0.0, 0.0, 0.0), 1.0);
    for (c, f) in got.components().iter().zip(frozen) {
        assert!((c.re - f).abs() <= 1e-10 * f.abs().max(0.1));
    }
}

#[test]
fn conservative_spectrum_matches_high_precision_roots() {
    // √((52 ∓ √1424)/10) to 40 digits.
    let low = 1.194_323_049_755_533_469_529_861_273_476_567_519_484;
    let high = 2.995_595_508_880_102_711_743_297_781_682_871_648_198;
    let p = SystemParams::unit(1.0, 1.0)
        .unwrap()
        .with_delta(0.0)
        .unwrap();
    let ev = block_spectrum(&build_mode_block(&p, 4.0).unwrap()).unwrap();
    let mut freqs: Vec<f64> = ev.iter().map(|z| z.im).collect();
    freqs.sort_by(f64::total_cmp);
    for (got, want) in freqs.iter().zip([-high, -low, low, high]) {
        assert!((got - want).abs() <= 1e-9 * want.abs());
    }
    for z in ev {
        assert!(z.re.abs() <= 1e-12);
    }
    let l1 = choose_lambda(
        WitnessCase::Case1,
        &p.with_exponents(0.5, 1.0).unwrap(),
        4.0,
    )
    .unwrap();
    let l2 = choose_lambda(
        WitnessCase::Case2,
        &p.with_exponents(0.25, 1.0).unwrap(),
        4.0,
    )
    .unwrap();
    assert!((l1 - low).abs() <= 1e-15 * low);
    assert!((l2 - high).abs() <= 1e-15 * high);
}

#[test]
fn q_coefficients_match_exact_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        // Integer parameters with β = 1 keep every coefficient exact.
        let (alpha, gamma, kappa) = (
            rng.random_range(1..6) as f64,
            rng.random_range(1..6) as f64,
            rng.random_range(1..6) as f64,
        );
        let sigma = rng.random_range(1..50) as f64;
        let p = SystemParams::new(alpha, gamma, 1.0, kappa, 0.5, 1.0).unwrap();
        let (a, b, c) = q_poly_coeffs(&p, sigma);
        assert_eq!(a, 1.0 + kappa * sigma);
        assert_eq!(
            b,
            -(alpha * (sigma + kappa * sigma * sigma) + (alpha + gamma * gamma) * sigma * sigma)
        );
        assert_eq!(c, alpha * alpha * sigma * sigma * sigma);
    }
}

#[test]
fn q_discriminant_is_positive_in_exact_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let p = random_params(&mut rng);
        let sigma = 10f64.powf(rng.random_range(-2.0..8.0));
        let (a, b, c) = q_poly_coeffs(&p, sigma);
        let disc = exact(b) * exact(b) - ratio(4, 1) * exact(a) * exact(c);
        assert!(disc.is_positive(), "sigma={sigma}");
        let (lo, hi) = q_roots(&p, sigma);
        assert!(0.0 < lo && lo <= hi);
        // Each root annihilates q to roundoff relative to its terms.
        for s in [lo, hi] {
            let terms = (a * s * s).abs() + (b * s).abs() + c.abs();
            assert!((a * s * s + b * s + c).abs() <= 1e-12 * terms);
        }
    }
}
