//! Growth exponents of resolvent curves and the (θ, β) regime map.

use rayon::prelude::*;

use crate::block::{block_abscissa, build_mode_block};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::resolvent::{
    adequate_sigma_max, check_truncation, lambda_grid, resolvent_curve, ModeSource, ResolventCurve,
    Spacing,
};
use crate::spectrum::{ModeSpectrum, SigmaBand};

/// Slack on the analyticity threshold: analytic when slope ≤ −1 + 0.1.
pub const ANALYTIC_SLACK: f64 = 0.1;
/// Slack on the Gevrey comparison: slope ≤ −φ + 0.05.
pub const GEVREY_SLACK: f64 = 0.05;
/// A curve counts as bounded when its fitted slope is at most this.
pub const BOUNDED_SLOPE: f64 = 0.05;
pub const DEFAULT_FIT_WINDOW: f64 = 0.4;

/// Slack for region boundary inequalities evaluated in floating point.
const REGION_EPS: f64 = 1e-12;

/// Least-squares slope of ln y against ln x, using only the points in the
/// top `window` fraction of the ln x range.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64], window: f64) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::param(
            "ys",
            format!("length {} differs from xs length {}", ys.len(), xs.len()),
        ));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::param(
            "fit_window",
            format!("must lie in (0,1], got {window}"),
        ));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::param(
            "xs",
            "log-log fit needs positive finite values",
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let (lo, hi) = lx
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let cutoff = hi - window * (hi - lo) - 1e-12 * hi.abs().max(1.0);
    let pts: Vec<(f64, f64)> = lx
        .iter()
        .zip(ys)
        .filter(|(x, _)| **x >= cutoff)
        .map(|(&x, &y)| (x, y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints { needed: 3, got: 1 });
    }
    Ok(sxy / sxx)
}

/// Region memberships at one (θ, β).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionFlags {
    /// Lack of analyticity: the whole domain except (1/2, 1).
    pub in_rl: bool,
    /// 2 ≤ θ + 2β, 0 < θ ≤ 1, 0 < β < 1.
    pub in_rg1: bool,
    /// 3θ/4 + β/2 ≤ 1, 0 < θ ≤ 1, 0 < β < 1.
    pub in_rg2: bool,
    /// Exponential decay: the whole domain.
    pub in_re: bool,
}

fn check_domain(theta: f64, beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param(
            "theta",
            format!("must lie in [0,1], got {theta}"),
        ));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::param(
            "beta",
            format!("must lie in (0,1], got {beta}"),
        ));
    }
    Ok(())
}

pub fn region_membership(theta: f64, beta: f64) -> Result<RegionFlags> {
    check_domain(theta, beta)?;
    let gevrey_strip = theta > 0.0 && beta < 1.0;
    let analytic_point = (theta - 0.5).abs() <= REGION_EPS && beta == 1.0;
    Ok(RegionFlags {
        in_rl: !analytic_point,
        in_rg1: gevrey_strip && theta + 2.0 * beta >= 2.0 - REGION_EPS,
        in_rg2: gevrey_strip && 0.75 * theta + 0.5 * beta <= 1.0 + REGION_EPS,
        in_re: true,
    })
}

/// Φ_{s1} = 2·max{(1−β)/(3−β), θ/(2+θ−β)}.
pub fn gevrey_exponent_rg1(theta: f64, beta: f64) -> f64 {
    2.0 * ((1.0 - beta) / (3.0 - beta)).max(theta / (2.0 + theta - beta))
}

/// φ₂ = θ / (2(2+θ−β)).
pub fn gevrey_exponent_rg2(theta: f64, beta: f64) -> f64 {
    theta / (2.0 * (2.0 + theta - beta))
}

/// The Gevrey exponent φ (class s > 1/φ) claimed at (θ, β): the larger of
/// the two region exponents on the intersection, the one region's exponent
/// elsewhere in R_G, and `None` outside R_G (including θ = 0 or β = 1).
pub fn predicted_gevrey_exponent(theta: f64, beta: f64) -> Result<Option<f64>> {
    let flags = region_membership(theta, beta)?;
    let phi = match (flags.in_rg1, flags.in_rg2) {
        (true, true) => {
            Some(gevrey_exponent_rg1(theta, beta).max(gevrey_exponent_rg2(theta, beta)))
        }
        (true, false) => Some(gevrey_exponent_rg1(theta, beta)),
        (false, true) => Some(gevrey_exponent_rg2(theta, beta)),
        (false, false) => None,
    };
    Ok(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Analytic,
    GevreyOnly,
    StableNotAnalytic,
    Unstable,
    /// A truncation warning fired; the measured slope may be an artifact.
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Analytic => "Analytic",
            Verdict::GevreyOnly => "GevreyOnly",
            Verdict::StableNotAnalytic => "StableNotAnalytic",
            Verdict::Unstable => "Unstable",
            Verdict::Unknown => "Unknown",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the mode supremum and the spectral abscissa are taken.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumPolicy {
    /// A fixed finite spectrum for both.
    Discrete(ModeSpectrum),
    /// Continuous band from `sigma_min` up to an automatically sized upper
    /// edge; the abscissa is scanned on `abscissa_modes` geometric samples.
    Envelope {
        sigma_min: f64,
        abscissa_modes: usize,
    },
}

impl Default for SpectrumPolicy {
    fn default() -> Self {
        SpectrumPolicy::Envelope {
            sigma_min: 1.0,
            abscissa_modes: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifySettings {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub spacing: Spacing,
    pub fit_window: f64,
    pub policy: SpectrumPolicy,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        ClassifySettings {
            lambda_min: 1e3,
            lambda_max: 1e7,
            lambda_points: 64,
            spacing: Spacing::Log,
            fit_window: DEFAULT_FIT_WINDOW,
            policy: SpectrumPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub theta: f64,
    pub beta: f64,
    pub in_rl: bool,
    pub in_rg1: bool,
    pub in_rg2: bool,
    pub in_re: bool,
    pub predicted_phi: Option<f64>,
    pub measured_slope: f64,
    pub spectral_abscissa: f64,
    pub truncation_suspect: bool,
    pub verdict: Verdict,
}

/// Mode source and abscissa spectrum a policy resolves to for λ up to
/// `lambda_max`.
pub fn resolve_policy(
    params: &SystemParams,
    policy: &SpectrumPolicy,
    lambda_max: f64,
) -> Result<(ModeSource, ModeSpectrum)> {
    match policy {
        SpectrumPolicy::Discrete(s) => Ok((ModeSource::Discrete(s.clone()), s.clone())),
        SpectrumPolicy::Envelope {
            sigma_min,
            abscissa_modes,
        } => {
            let top = adequate_sigma_max(params, lambda_max).max(10.0 * sigma_min);
            let band = SigmaBand::new(*sigma_min, top)?;
            Ok((ModeSource::Band(band), band.sample(*abscissa_modes)))
        }
    }
}

/// Largest eigenvalue real part over every block of the spectrum.
pub fn spectral_abscissa(params: &SystemParams, spectrum: &ModeSpectrum) -> Result<f64> {
    let values = spectrum
        .sigmas()
        .par_iter()
        .map(|&s| block_abscissa(&build_mode_block(params, s)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Resolvent curve for the settings' λ grid, plus whether a truncation
/// warning fired.
pub fn settings_curve(
    params: &SystemParams,
    settings: &ClassifySettings,
) -> Result<(ResolventCurve, bool, ModeSpectrum)> {
    let grid = lambda_grid(
        settings.lambda_min,
        settings.lambda_max,
        settings.lambda_points,
        settings.spacing,
    )?;
    let (source, abscissa_spectrum) =
        resolve_policy(params, &settings.policy, settings.lambda_max)?;
    let curve = resolvent_curve(params, &grid, &source)?;
    let mut suspect = curve.any_at_boundary();
    if let ModeSource::Discrete(spec) = &source {
        suspect |= !check_truncation(params, spec, settings.lambda_max)?.adequate();
    }
    Ok((curve, suspect, abscissa_spectrum))
}

pub fn classify_point(params: &SystemParams, settings: &ClassifySettings) -> Result<RegionReport> {
    if settings.lambda_min < 1.0 {
        return Err(Error::param(
            "lambda_min",
            format!("must be >= 1, got {}", settings.lambda_min),
        ));
    }
    let (theta, beta) = (params.theta(), params.beta());
    let flags = region_membership(theta, beta)?;
    let predicted_phi = predicted_gevrey_exponent(theta, beta)?;

    let (curve, suspect, abscissa_spectrum) = settings_curve(params, settings)?;
    let measured_slope = fit_loglog_slope(&curve.lambdas(), &curve.norms(), settings.fit_window)?;
    let spectral_abscissa = spectral_abscissa(params, &abscissa_spectrum)?;
    let bounded = curve.norms().iter().all(|n| n.is_finite()) && measured_slope <= BOUNDED_SLOPE;

    let verdict = if suspect {
        Verdict::Unknown
    } else if measured_slope <= -1.0 + ANALYTIC_SLACK {
        Verdict::Analytic
    } else if predicted_phi.is_some_and(|phi| measured_slope <= -phi + GEVREY_SLACK) {
        Verdict::GevreyOnly
    } else if spectral_abscissa < 0.0 && bounded {
        Verdict::StableNotAnalytic
    } else {
        Verdict::Unstable
    };

    Ok(RegionReport {
        theta,
        beta,
        in_rl: flags.in_rl,
        in_rg1: flags.in_rg1,
        in_rg2: flags.in_rg2,
        in_re: flags.in_re,
        predicted_phi,
        measured_slope,
        spectral_abscissa,
        truncation_suspect: suspect,
        verdict,
    })
}

/// (λ, λ^φ·‖R(iλ)‖) along a resolvent curve. Bounded output is the Gevrey
/// estimate of order φ.
pub fn gevrey_scaled_curve(curve: &ResolventCurve, phi: f64) -> Vec<(f64, f64)> {
    curve
        .samples
        .iter()
        .map(|s| (s.lambda, s.lambda.abs().powf(phi) * s.norm))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub theta: f64,
    pub beta: f64,
    pub report: Result<RegionReport>,
}

/// Classifies every (θ, β) in `thetas × betas` (θ-major order) with the
/// remaining coefficients taken from `base`. A failing point is recorded and
/// the sweep continues.
pub fn region_sweep(
    base: &SystemParams,
    thetas: &[f64],
    betas: &[f64],
    settings: &ClassifySettings,
) -> Vec<SweepEntry> {
    let points: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| betas.iter().map(move |&b| (t, b)))
        .collect();
    points
        .par_iter()
        .map(|&(theta, beta)| SweepEntry {
            theta,
            beta,
            report: base
                .with_exponents(theta, beta)
                .and_then(|p| classify_point(&p, settings)),
        })
        .collect()
}
