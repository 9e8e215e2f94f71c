//! Explicit lower-bound sequences for the resolvent on the imaginary axis.
//!
//! Each case picks a frequency λ_n per mode, solves (iλ_n − B)U_n = F_n in
//! closed form with F_n = (0, 0, −e_n, 0), and tracks |λ_n|·‖U_n‖/‖F_n‖.
//! Unbounded growth of that product rules out analyticity of the semigroup.

use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::block::{build_mode_block, weighted_norm};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::regularity::fit_loglog_slope;
use crate::resolvent::{explicit_mu_nu, resolvent_residual, state_from_mu_nu, unit_plate_force};
use crate::spectrum::ModeSpectrum;

/// Relative residual every witness point must meet.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-9;
/// Witness growth is fitted over the top half of the log-λ range.
pub const DEFAULT_WITNESS_WINDOW: f64 = 0.5;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessCase {
    /// λ² = s⁻, the smaller root of q; needs θ + β ≤ 3/2.
    Case1,
    /// λ² = s⁺, the larger root of q; needs β = 1, θ < 1/2.
    Case2,
    /// p₁(λ²) = 0; needs β = 1, θ > 1/2.
    Case3,
    /// p₁(λ²) = 0; needs 2θ + β > 2, β < 1.
    Case4,
}

impl WitnessCase {
    pub const ALL: [WitnessCase; 4] = [
        WitnessCase::Case1,
        WitnessCase::Case2,
        WitnessCase::Case3,
        WitnessCase::Case4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            WitnessCase::Case1 => "case1",
            WitnessCase::Case2 => "case2",
            WitnessCase::Case3 => "case3",
            WitnessCase::Case4 => "case4",
        }
    }

    pub fn lambda_rule(&self) -> &'static str {
        match self {
            WitnessCase::Case1 => "lambda^2 = smaller root of q",
            WitnessCase::Case2 => "lambda^2 = larger root of q",
            WitnessCase::Case3 | WitnessCase::Case4 => {
                "lambda^2 = alpha sigma^2 / (1 + kappa sigma^beta)"
            }
        }
    }

    pub fn applies(&self, theta: f64, beta: f64) -> bool {
        if !((0.0..=1.0).contains(&theta) && beta > 0.0 && beta <= 1.0) {
            return false;
        }
        let beta_one = (beta - 1.0).abs() <= EPS;
        match self {
            WitnessCase::Case1 => theta + beta <= 1.5 + EPS,
            WitnessCase::Case2 => beta_one && theta < 0.5 - EPS,
            WitnessCase::Case3 => beta_one && theta > 0.5 + EPS,
            WitnessCase::Case4 => 2.0 * theta + beta > 2.0 + EPS && beta < 1.0 - EPS,
        }
    }

    fn require(&self, theta: f64, beta: f64) -> Result<()> {
        if self.applies(theta, beta) {
            Ok(())
        } else {
            Err(Error::Inapplicable {
                what: format!("witness {}", self.name()),
                theta,
                beta,
            })
        }
    }
}

impl std::fmt::Display for WitnessCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WitnessCase {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "case1" => Ok(WitnessCase::Case1),
            "2" | "case2" => Ok(WitnessCase::Case2),
            "3" | "case3" => Ok(WitnessCase::Case3),
            "4" | "case4" => Ok(WitnessCase::Case4),
            other => Err(format!(
                "unknown witness case `{other}` (expected case1..case4)"
            )),
        }
    }
}

/// Coefficients of q(s) = a s² + b s + c, whose roots are the squared
/// frequencies of the undamped block.
pub fn q_poly_coeffs(params: &SystemParams, sigma: f64) -> (f64, f64, f64) {
    let (alpha, gamma, kappa, beta) = (
        params.alpha(),
        params.gamma(),
        params.kappa(),
        params.beta(),
    );
    let a = 1.0 + kappa * sigma.powf(beta);
    let b = -(alpha * (sigma + kappa * sigma.powf(1.0 + beta))
        + (alpha + gamma * gamma) * sigma * sigma);
    let c = alpha * alpha * sigma.powi(3);
    (a, b, c)
}

/// Roots (s⁻, s⁺) of q. Both are positive: q(0) > 0 > q(ασ).
pub fn q_roots(params: &SystemParams, sigma: f64) -> (f64, f64) {
    let (a, b, c) = q_poly_coeffs(params, sigma);
    let root_disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let big = -b + root_disc;
    (2.0 * c / big, big / (2.0 * a))
}

pub fn choose_lambda(case: WitnessCase, params: &SystemParams, sigma: f64) -> Result<f64> {
    case.require(params.theta(), params.beta())?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(
            "sigma",
            format!("must be positive and finite, got {sigma}"),
        ));
    }
    let lambda = match case {
        WitnessCase::Case1 => q_roots(params, sigma).0.sqrt(),
        WitnessCase::Case2 => q_roots(params, sigma).1.sqrt(),
        WitnessCase::Case3 | WitnessCase::Case4 => {
            (params.alpha() * sigma * sigma / params.inertia(sigma)).sqrt()
        }
    };
    Ok(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// e_n of unit norm in D(A^{β/2}): everything scales by σ^{−β/2}.
    ScaledForce,
    /// e_n of unit L² norm; ‖F‖ is the weighted norm of (0, 0, −1, 0).
    #[default]
    ResolventRatio,
}

impl FromStr for Normalization {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dbeta" | "scaled_force" => Ok(Normalization::ScaledForce),
            "ratio" | "resolvent_ratio" => Ok(Normalization::ResolventRatio),
            other => Err(format!(
                "unknown normalization `{other}` (expected dbeta or resolvent_ratio)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessPoint {
    pub sigma: f64,
    pub lambda: f64,
    pub mu: Complex64,
    pub nu: Complex64,
    pub norm_u: f64,
    pub norm_f: f64,
    /// |λ|·‖U‖/‖F‖.
    pub product: f64,
    /// ‖(iλ − B)U − F‖ / (‖F‖ + |λ|‖U‖), both in the unit-L² scaling.
    pub relative_residual: f64,
}

fn witness_point(
    case: WitnessCase,
    params: &SystemParams,
    sigma: f64,
    normalization: Normalization,
) -> Result<WitnessPoint> {
    let lambda = choose_lambda(case, params, sigma)?;
    let (mu, nu) = explicit_mu_nu(params, sigma, lambda)?;
    let block = build_mode_block(params, sigma)?;
    let state = state_from_mu_nu(mu, nu, lambda);
    let force = unit_plate_force();

    let raw_u = weighted_norm(&state, &block);
    let raw_f = weighted_norm(&force, &block);
    let residual = resolvent_residual(&block, lambda, &state, &force);
    let relative_residual = residual / (raw_f + lambda.abs() * raw_u);
    if !(relative_residual <= WITNESS_RESIDUAL_TOL) {
        return Err(Error::ResidualViolation {
            sigma,
            residual: relative_residual,
        });
    }

    let (norm_u, norm_f) = match normalization {
        Normalization::ResolventRatio => (raw_u, raw_f),
        Normalization::ScaledForce => {
            let beta = params.beta();
            (
                raw_u * sigma.powf(-beta / 2.0),
                (sigma.powf(-beta) + params.kappa()).sqrt(),
            )
        }
    };
    Ok(WitnessPoint {
        sigma,
        lambda,
        mu,
        nu,
        norm_u,
        norm_f,
        product: lambda.abs() * norm_u / norm_f,
        relative_residual,
    })
}

/// One witness point per mode of `spectrum`, in spectrum order.
pub fn witness_sequence(
    case: WitnessCase,
    params: &SystemParams,
    spectrum: &ModeSpectrum,
    normalization: Normalization,
) -> Result<Vec<WitnessPoint>> {
    case.require(params.theta(), params.beta())?;
    if case == WitnessCase::Case1 && params.delta() == 0.0 {
        return Err(Error::param(
            "delta",
            "case1 needs delta > 0 (the p1 damping term carries the solution)",
        ));
    }
    spectrum
        .sigmas()
        .par_iter()
        .map(|&s| witness_point(case, params, s, normalization))
        .collect()
}

/// Exponent of |λ_n|·‖U_n‖ claimed for each case.
pub fn predicted_witness_exponent(case: WitnessCase, theta: f64, beta: f64) -> Result<f64> {
    case.require(theta, beta)?;
    Ok(match case {
        WitnessCase::Case1 => 5.0 - 4.0 * beta - 2.0 * theta,
        WitnessCase::Case2 => 1.0 - 2.0 * theta,
        WitnessCase::Case3 => 2.0 * theta - 1.0,
        WitnessCase::Case4 => (beta + 2.0 * theta - 2.0) / (2.0 - beta),
    })
}

/// Case1 exponent from an independent order count of μ_n (|μ_n| ≈
/// |λ_n|^{1−2β−2θ} rather than |λ_n|^{3−4β−2θ}). Reported next to the
/// claimed value; neither is asserted.
pub fn case1_alternative_exponent(theta: f64, beta: f64) -> Result<f64> {
    WitnessCase::Case1.require(theta, beta)?;
    Ok(3.0 - 2.0 * beta - 2.0 * theta)
}

/// Log-log slope of the product against λ.
pub fn witness_growth_fit(points: &[WitnessPoint], window: f64) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.product).collect();
    fit_loglog_slope(&xs, &ys, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::block_spectrum;

    #[test]
    fn q_coefficients_example() {
        let p = SystemParams::unit(1.0, 1.0).unwrap();
        assert_eq!(q_poly_coeffs(&p, 4.0), (5.0, -52.0, 64.0));
    }

    #[test]
    fn q_factorizes_as_p1_p2_for_weak_coupling() {
        let p = SystemParams::new(2.0, 1e-9, 1.0, 1e-12, 0.5, 0.7).unwrap();
        let sigma = 3.0;
        let (lo, hi) = q_roots(&p, sigma);
        assert!((lo - 2.0 * sigma).abs() < 1e-8);
        assert!((hi - 2.0 * sigma * sigma).abs() < 1e-8);
    }

    #[test]
    fn lambda_examples() {
        let p = SystemParams::unit(0.5, 1.0).unwrap();
        let l1 = choose_lambda(WitnessCase::Case1, &p, 4.0).unwrap();
        assert!((l1 - 1.194_323_049_755_533_5).abs() < 1e-14);
        let p = SystemParams::unit(1.0, 1.0).unwrap();
        let l3 = choose_lambda(WitnessCase::Case3, &p, 4.0).unwrap();
        assert!((l3 - 1.788_854_381_999_831_8).abs() < 1e-14);
    }

    #[test]
    fn lambda_ignores_delta() {
        let p = SystemParams::unit(0.2, 1.0).unwrap();
        for case in [WitnessCase::Case1, WitnessCase::Case2] {
            let a = choose_lambda(case, &p, 17.0).unwrap();
            let b = choose_lambda(case, &p.with_delta(7.5).unwrap(), 17.0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn applicability() {
        assert!(WitnessCase::Case1.applies(0.5, 1.0));
        assert!(!WitnessCase::Case1.applies(0.6, 1.0));
        assert!(WitnessCase::Case2.applies(0.0, 1.0));
        assert!(!WitnessCase::Case2.applies(0.5, 1.0));
        assert!(!WitnessCase::Case2.applies(0.25, 0.9));
        assert!(WitnessCase::Case3.applies(1.0, 1.0));
        assert!(!WitnessCase::Case3.applies(0.5, 1.0));
        assert!(WitnessCase::Case4.applies(0.9, 0.5));
        assert!(!WitnessCase::Case4.applies(0.75, 0.5));
        assert!(!WitnessCase::Case4.applies(1.0, 1.0));
        let p = SystemParams::unit(0.25, 1.0).unwrap();
        assert!(matches!(
            choose_lambda(WitnessCase::Case3, &p, 4.0),
            Err(Error::Inapplicable { .. })
        ));
    }

    #[test]
    fn predicted_exponent_examples() {
        assert!(
            (predicted_witness_exponent(WitnessCase::Case2, 0.25, 1.0).unwrap() - 0.5).abs()
                < 1e-15
        );
        assert!(
            (predicted_witness_exponent(WitnessCase::Case3, 0.75, 1.0).unwrap() - 0.5).abs()
                < 1e-15
        );
        assert!(
            (predicted_witness_exponent(WitnessCase::Case4, 0.9, 0.5).unwrap() - 0.2).abs() < 1e-15
        );
        assert!(predicted_witness_exponent(WitnessCase::Case4, 0.25, 1.0).is_err());
    }

    #[test]
    fn case3_mu_example() {
        let p = SystemParams::unit(1.0, 1.0).unwrap();
        let spec = ModeSpectrum::from_list(vec![4.0]).unwrap();
        let pt = witness_sequence(WitnessCase::Case3, &p, &spec, Normalization::ResolventRatio)
            .unwrap()[0];
        assert!((pt.mu.re - 0.078125).abs() < 1e-14);
        assert!((pt.mu.im - 0.698_771_242_968_684_3).abs() < 1e-14);
        assert!((pt.mu.norm() - 0.703125).abs() < 1e-14);
    }

    #[test]
    fn roots_ordered_and_match_conservative_spectrum() {
        let p = SystemParams::new(1.3, 0.7, 0.0, 2.1, 0.3, 0.6).unwrap();
        for sigma in [0.5, 4.0, 90.0, 1e4] {
            let (lo, hi) = q_roots(&p, sigma);
            assert!(lo <= hi);
            let freqs: Vec<f64> = block_spectrum(&build_mode_block(&p, sigma).unwrap())
                .unwrap()
                .iter()
                .filter(|z| z.im > 0.0)
                .map(|z| z.im)
                .collect();
            for (case, s) in [(WitnessCase::Case1, lo), (WitnessCase::Case2, hi)] {
                let l = s.sqrt();
                let nearest = freqs
                    .iter()
                    .map(|f| (f - l).abs() / l)
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-9, "{case} sigma={sigma}");
            }
        }
    }

    #[test]
    fn case2_needs_damping() {
        let p = SystemParams::unit(0.25, 1.0)
            .unwrap()
            .with_delta(0.0)
            .unwrap();
        let spec = ModeSpectrum::from_list(vec![4.0]).unwrap();
        assert!(
            witness_sequence(WitnessCase::Case2, &p, &spec, Normalization::ResolventRatio).is_err()
        );
        assert!(
            witness_sequence(WitnessCase::Case1, &p, &spec, Normalization::ResolventRatio).is_err()
        );
    }

    #[test]
    fn normalizations_share_the_product() {
        let p = SystemParams::unit(0.9, 0.5).unwrap();
        let spec = ModeSpectrum::geometric(10.0, 1e5, 12).unwrap();
        let a =
            witness_sequence(WitnessCase::Case4, &p, &spec, Normalization::ResolventRatio).unwrap();
        let b = witness_sequence(WitnessCase::Case4, &p, &spec, Normalization::ScaledForce).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.product - y.product).abs() <= 1e-12 * x.product);
            let want = (x.sigma.powf(-0.5) + 1.0).sqrt();
            assert!((y.norm_f - want).abs() < 1e-15);
        }
    }

    #[test]
    fn growth_fit_on_synthetic_points() {
        let pts: Vec<WitnessPoint> = (1..=10)
            .map(|i| {
                let l = 10f64.powi(i);
                WitnessPoint {
                    sigma: l,
                    lambda: l,
                    mu: Complex64::new(0.0, 0.0),
                    nu: Complex64::new(0.0, 0.0),
                    norm_u: 1.0,
                    norm_f: 1.0,
                    product: l.sqrt(),
                    relative_residual: 0.0,
                }
            })
            .collect();
        assert!((witness_growth_fit(&pts, 0.5).unwrap() - 0.5).abs() < 1e-10);
        assert!(witness_growth_fit(&pts[..2], 1.0).is_err());
    }
}
