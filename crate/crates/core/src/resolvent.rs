//! Resolvent (iλI − B)⁻¹ on the imaginary axis.
//!
//! Per-mode solves and weighted operator norms, the closed-form solution for
//! the forcing F = (0, 0, −e_n, 0), and the supremum over modes that gives
//! the norm of the full (block-diagonal) resolvent.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::block::{build_mode_block, ModeBlock, StateVec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix4};
use crate::params::SystemParams;
use crate::spectrum::{log_space, ModeSpectrum, SigmaBand};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Smallest singular value of iλI − K, relative to its largest, below which
/// the system is reported singular.
const SINGULAR_RTOL: f64 = 4.0 * f64::EPSILON;

fn shifted_scaled(block: &ModeBlock, lambda: f64) -> CMatrix4 {
    CMatrix4::identity() * (I * lambda) - linalg::complexify(block.scaled_matrix())
}

fn singular_error(block: &ModeBlock, lambda: f64) -> Error {
    let target = I * lambda;
    let eigenvalue = crate::block::block_spectrum(block)
        .ok()
        .and_then(|ev| {
            ev.into_iter()
                .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        })
        .unwrap_or(target);
    Error::Singular {
        lambda,
        sigma: block.sigma(),
        eigenvalue,
    }
}

fn check_nonsingular(block: &ModeBlock, lambda: f64, m: &CMatrix4) -> Result<()> {
    let smax = linalg::largest_singular_value(m);
    let smin = linalg::smallest_singular_value(m);
    if !(smin > SINGULAR_RTOL * smax) {
        return Err(singular_error(block, lambda));
    }
    Ok(())
}

/// Solves (iλI − B)U = F for one mode.
pub fn resolvent_solve(block: &ModeBlock, lambda: f64, force: &StateVec) -> Result<StateVec> {
    let m = shifted_scaled(block, lambda);
    check_nonsingular(block, lambda, &m)?;
    let rhs = block.to_scaled(force);
    let y = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| singular_error(block, lambda))?;
    Ok(block.unscale(&y))
}

/// Solves the stationary problem BU = F for one mode.
pub fn stationary_solve(block: &ModeBlock, force: &StateVec) -> Result<StateVec> {
    let m = linalg::complexify(block.scaled_matrix());
    check_nonsingular(block, 0.0, &m)?;
    let y = m
        .lu()
        .solve(&block.to_scaled(force))
        .ok_or_else(|| singular_error(block, 0.0))?;
    Ok(block.unscale(&y))
}

/// ‖(iλI − B)U − F‖_W evaluated with the unscaled block matrix.
pub fn resolvent_residual(
    block: &ModeBlock,
    lambda: f64,
    state: &StateVec,
    force: &StateVec,
) -> f64 {
    let bu = block.apply(state);
    let r = *state * (I * lambda) - bu - *force;
    crate::block::weighted_norm(&r, block)
}

/// Closed-form coefficients (μ, ν) with U = (μ, ν, iλμ, iλν) solving
/// (iλI − B)U = (0, 0, −1, 0) in mode coordinates.
pub fn explicit_mu_nu(
    params: &SystemParams,
    sigma: f64,
    lambda: f64,
) -> Result<(Complex64, Complex64)> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(
            "sigma",
            format!("must be positive and finite, got {sigma}"),
        ));
    }
    let m = params.inertia(sigma);
    let s = lambda * lambda;
    let p1 = s * m - params.alpha() * sigma * sigma;
    let p2 = s - params.alpha() * sigma;
    let coupling = params.gamma().powi(2) * s * sigma * sigma;
    let damping = params.damping(sigma) * lambda;

    let d = Complex64::new(p1 * p2 - coupling, -damping * p1);
    let scale = (p1 * p2).abs() + coupling + (damping * p1).abs();
    if !(d.norm() > 1e-12 * scale) {
        return Err(Error::ZeroDenominator { sigma, lambda });
    }
    let mu = Complex64::new(p2, -damping) * m / d;
    let nu = Complex64::new(0.0, -params.gamma() * lambda * sigma * m) / d;
    Ok((mu, nu))
}

/// Forcing (0, 0, −1, 0).
pub fn unit_plate_force() -> StateVec {
    StateVec::real(0.0, 0.0, -1.0, 0.0)
}

/// The state (μ, ν, iλμ, iλν).
pub fn state_from_mu_nu(mu: Complex64, nu: Complex64, lambda: f64) -> StateVec {
    StateVec::new(mu, nu, I * lambda * mu, I * lambda * nu)
}

/// Weighted operator norm of the block resolvent: largest singular value
/// of D(iλI − B)⁻¹D⁻¹ = (iλI − DBD⁻¹)⁻¹.
pub fn resolvent_block_norm(block: &ModeBlock, lambda: f64) -> Result<f64> {
    let m = shifted_scaled(block, lambda);
    check_nonsingular(block, lambda, &m)?;
    let inv = m
        .try_inverse()
        .ok_or_else(|| singular_error(block, lambda))?;
    Ok(linalg::largest_singular_value(&inv))
}

fn norm_at(params: &SystemParams, lambda: f64, sigma: f64) -> Result<f64> {
    resolvent_block_norm(&build_mode_block(params, sigma)?, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventSample {
    pub lambda: f64,
    pub norm: f64,
    /// Index into the spectrum; `None` for a band envelope.
    pub argmax_mode: Option<usize>,
    pub argmax_sigma: f64,
    /// The supremum sits on the last mode (or the band's upper edge), so a
    /// longer truncation could raise it.
    pub at_boundary: bool,
}

/// Supremum of the block norms over a discrete spectrum.
pub fn resolvent_norm(
    params: &SystemParams,
    lambda: f64,
    spectrum: &ModeSpectrum,
) -> Result<ResolventSample> {
    let norms = spectrum
        .sigmas()
        .iter()
        .map(|&s| norm_at(params, lambda, s))
        .collect::<Result<Vec<_>>>()?;
    let (idx, &norm) = norms
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, n)| match best {
            Some((_, b)) if *b >= *n => best,
            _ => Some((i, n)),
        })
        .expect("spectrum is never empty");
    Ok(ResolventSample {
        lambda,
        norm,
        argmax_mode: Some(idx),
        argmax_sigma: spectrum.sigmas()[idx],
        at_boundary: idx + 1 == spectrum.len() && spectrum.len() > 1,
    })
}

/// Grid density for the envelope scan.
const ENVELOPE_POINTS_PER_DECADE: f64 = 48.0;
const ENVELOPE_MIN_POINTS: usize = 200;
const ENVELOPE_REFINED_PEAKS: usize = 6;

/// Supremum of the block norm over every σ in the band.
///
/// The norm as a function of σ has sharp peaks where an undamped block
/// frequency crosses λ, much narrower than any practical mode spacing. The
/// scan therefore seeds a log grid with the roots in σ of q_σ(λ²), p₁ and
/// p₂ plus a ladder of relative offsets around each root, then refines the
/// leading local maxima by golden-section search in log σ.
pub fn resolvent_envelope(
    params: &SystemParams,
    lambda: f64,
    band: &SigmaBand,
) -> Result<ResolventSample> {
    let decades = (band.max() / band.min()).log10();
    let count = ((decades * ENVELOPE_POINTS_PER_DECADE).ceil() as usize).max(ENVELOPE_MIN_POINTS);
    let mut sigmas = log_space(band.min(), band.max(), count);

    for root in resonance_roots(params, lambda, &sigmas) {
        sigmas.push(root);
        for k in 1..=15 {
            let eps = 10f64.powi(-k);
            for cand in [root * (1.0 - eps), root * (1.0 + eps)] {
                if band.contains(cand) {
                    sigmas.push(cand);
                }
            }
        }
    }
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();

    let values = sigmas
        .iter()
        .map(|&s| norm_at(params, lambda, s))
        .collect::<Result<Vec<_>>>()?;

    let n = values.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == n || values[i] >= values[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    peaks.truncate(ENVELOPE_REFINED_PEAKS);

    let mut best = (values[peaks[0]], sigmas[peaks[0]]);
    for &i in &peaks {
        let lo = sigmas[i.saturating_sub(1)];
        let hi = sigmas[(i + 1).min(n - 1)];
        let (v, s) = golden_max(
            |s| norm_at(params, lambda, s),
            lo,
            hi,
            (values[i], sigmas[i]),
        )?;
        if v > best.0 {
            best = (v, s);
        }
    }

    let top_cell = sigmas[n.saturating_sub(2)];
    Ok(ResolventSample {
        lambda,
        norm: best.0,
        argmax_mode: None,
        argmax_sigma: best.1,
        at_boundary: best.1 >= top_cell,
    })
}

/// Golden-section maximization of `f` over log σ ∈ [ln lo, ln hi].
fn golden_max(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    start: (f64, f64),
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = start;
    if hi <= lo {
        return Ok(best);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c.exp())?;
    let mut fd = f(d.exp())?;
    for _ in 0..90 {
        if (b - a) < 1e-15 * a.abs().max(1.0) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d.exp())?;
        }
        for (v, x) in [(fc, c), (fd, d)] {
            if v > best.0 {
                best = (v, x.exp());
            }
        }
    }
    Ok(best)
}

/// Roots in σ of the undamped resonance conditions at frequency λ, located
/// by sign changes on the grid and refined by bisection.
fn resonance_roots(params: &SystemParams, lambda: f64, grid: &[f64]) -> Vec<f64> {
    let s = lambda * lambda;
    let (alpha, gamma, kappa, beta) = (
        params.alpha(),
        params.gamma(),
        params.kappa(),
        params.beta(),
    );
    let q = |sigma: f64| {
        let a = 1.0 + kappa * sigma.powf(beta);
        let b = -(alpha * (sigma + kappa * sigma.powf(1.0 + beta))
            + (alpha + gamma * gamma) * sigma * sigma);
        let c = alpha * alpha * sigma.powi(3);
        a * s * s + b * s + c
    };
    let p1 = |sigma: f64| s * (1.0 + kappa * sigma.powf(beta)) - alpha * sigma * sigma;

    let mut roots = Vec::new();
    for g in [&q as &dyn Fn(f64) -> f64, &p1] {
        let vals: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
        for i in 0..grid.len().saturating_sub(1) {
            if vals[i] == 0.0 {
                roots.push(grid[i]);
            } else if vals[i].signum() != vals[i + 1].signum() && vals[i + 1] != 0.0 {
                roots.push(bisect(g, grid[i], grid[i + 1], vals[i]));
            }
        }
    }
    let p2_root = s / alpha;
    if p2_root >= grid[0] && p2_root <= grid[grid.len() - 1] {
        roots.push(p2_root);
    }
    roots
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut glo: f64) -> f64 {
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Upper σ for a band expected to contain every resonance up to λ_max,
/// including the mode-count rule σ_max ≥ 10·λ_max^{2/(2−β)}.
pub fn adequate_sigma_max(params: &SystemParams, lambda_max: f64) -> f64 {
    let (alpha, gamma, kappa, beta) = (
        params.alpha(),
        params.gamma(),
        params.kappa(),
        params.beta(),
    );
    let l2 = lambda_max * lambda_max;
    let candidates = [
        lambda_max.abs().powf(2.0 / (2.0 - beta)),
        l2 * (kappa * alpha + alpha + gamma * gamma) / (alpha * alpha),
        (l2 * (1.0 + kappa) / alpha).powf(1.0 / (2.0 - beta)),
    ];
    10.0 * candidates.into_iter().fold(1.0, f64::max)
}

/// Where the supremum over modes is taken.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeSource {
    Discrete(ModeSpectrum),
    Band(SigmaBand),
}

impl ModeSource {
    pub fn describe(&self) -> String {
        match self {
            ModeSource::Discrete(s) => format!("discrete:{}", s.label()),
            ModeSource::Band(b) => format!("envelope:[{}, {}]", b.min(), b.max()),
        }
    }
}

pub fn resolvent_sample(
    params: &SystemParams,
    lambda: f64,
    source: &ModeSource,
) -> Result<ResolventSample> {
    match source {
        ModeSource::Discrete(s) => resolvent_norm(params, lambda, s),
        ModeSource::Band(b) => resolvent_envelope(params, lambda, b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// λ grid with exact endpoints. Log spacing needs min > 0.
pub fn lambda_grid(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::param("lambda_points", "must be at least 1"));
    }
    if !(min.is_finite() && max.is_finite()) || (points > 1 && max <= min) {
        return Err(Error::param(
            "lambda_max",
            format!("need finite min < max, got [{min}, {max}]"),
        ));
    }
    match spacing {
        Spacing::Log => {
            if min <= 0.0 {
                return Err(Error::param(
                    "lambda_min",
                    format!("log spacing needs lambda_min > 0, got {min}"),
                ));
            }
            Ok(log_space(min, max, points))
        }
        Spacing::Linear => {
            if points == 1 {
                return Ok(vec![min]);
            }
            let step = (max - min) / (points - 1) as f64;
            Ok((0..points)
                .map(|i| {
                    if i == points - 1 {
                        max
                    } else {
                        min + step * i as f64
                    }
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventCurve {
    pub params: SystemParams,
    pub samples: Vec<ResolventSample>,
    pub mode_policy: String,
}

impl ResolventCurve {
    pub fn lambdas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.lambda).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm).collect()
    }

    pub fn any_at_boundary(&self) -> bool {
        self.samples.iter().any(|s| s.at_boundary)
    }
}

/// One sample per grid point, evaluated in parallel; the output order is
/// the grid order.
pub fn resolvent_curve(
    params: &SystemParams,
    lambda_grid: &[f64],
    source: &ModeSource,
) -> Result<ResolventCurve> {
    if lambda_grid.is_empty() {
        return Err(Error::param("lambda_grid", "must be nonempty"));
    }
    if lambda_grid.iter().any(|l| !l.is_finite()) || lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "lambda_grid",
            "must be finite and strictly increasing",
        ));
    }
    let samples = lambda_grid
        .par_iter()
        .map(|&l| resolvent_sample(params, l, source))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolventCurve {
        params: *params,
        samples,
        mode_policy: source.describe(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCheck {
    pub required_sigma_max: f64,
    pub sigma_max: f64,
    pub sigma_rule: bool,
    pub tail_monotone: bool,
}

impl TruncationCheck {
    pub fn adequate(&self) -> bool {
        self.sigma_rule && self.tail_monotone
    }
}

/// σ_max ≥ 10·λ_max^{2/(2−β)}, and block norms at λ_max non-increasing over
/// the final 10% of modes.
pub fn check_truncation(
    params: &SystemParams,
    spectrum: &ModeSpectrum,
    lambda_max: f64,
) -> Result<TruncationCheck> {
    let required = 10.0 * lambda_max.abs().powf(2.0 / (2.0 - params.beta()));
    let sigmas = spectrum.sigmas();
    let tail_len = (sigmas.len() / 10).max(2).min(sigmas.len());
    let tail = &sigmas[sigmas.len() - tail_len..];
    let norms = tail
        .iter()
        .map(|&s| norm_at(params, lambda_max, s))
        .collect::<Result<Vec<_>>>()?;
    let tail_monotone = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    Ok(TruncationCheck {
        required_sigma_max: required,
        sigma_max: spectrum.sigma_max(),
        sigma_rule: spectrum.sigma_max() >= required,
        tail_monotone,
    })
}
