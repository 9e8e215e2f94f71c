//! Eigenvalue sequences σ_n of the positive operator A.
//!
//! Each mode is an L²-orthonormal eigendirection of A; the generator splits
//! into one 4×4 block per σ_n. A [`ModeSpectrum`] is a finite prefix of that
//! sequence, a [`SigmaBand`] a continuous interval used when the supremum over
//! modes should not depend on where individual eigenvalues happen to fall.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    sigmas: Vec<f64>,
    label: String,
}

impl ModeSpectrum {
    /// A = −d²/dx² on (0, length) with Dirichlet conditions: σ_n = (nπ/length)².
    pub fn dirichlet_1d(length: f64, count: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidSpectrum(
                "mode count must be at least 1".into(),
            ));
        }
        let k = PI / length;
        let sigmas = (1..=count).map(|n| (n as f64 * k).powi(2)).collect();
        Ok(ModeSpectrum {
            sigmas,
            label: format!("dirichlet_1d(length={length}, count={count})"),
        })
    }

    pub fn from_list(values: impl Into<Vec<f64>>) -> Result<Self> {
        let sigmas = values.into();
        validate(&sigmas)?;
        let label = format!("list({} modes)", sigmas.len());
        Ok(ModeSpectrum { sigmas, label })
    }

    /// `count` log-uniformly spaced values from `min` to `max` inclusive.
    pub fn geometric(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && max.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "geometric range must be positive and finite, got [{min}, {max}]"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidSpectrum(
                "mode count must be at least 1".into(),
            ));
        }
        if count > 1 && max <= min {
            return Err(Error::InvalidSpectrum(format!(
                "geometric range needs max > min, got [{min}, {max}]"
            )));
        }
        let sigmas = log_space(min, max, count);
        validate(&sigmas)?;
        Ok(ModeSpectrum {
            sigmas,
            label: format!("geometric(min={min}, max={max}, count={count})"),
        })
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn sigma_max(&self) -> f64 {
        *self.sigmas.last().expect("spectrum is never empty")
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigmas[0]
    }
}

fn validate(sigmas: &[f64]) -> Result<()> {
    if sigmas.is_empty() {
        return Err(Error::InvalidSpectrum("spectrum must be nonempty".into()));
    }
    for (i, &s) in sigmas.iter().enumerate() {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "sigma[{i}] = {s} must be positive and finite"
            )));
        }
    }
    for (i, w) in sigmas.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::InvalidSpectrum(format!(
                "sigmas must be strictly increasing: sigma[{}] = {} >= sigma[{}] = {}",
                i,
                w[0],
                i + 1,
                w[1]
            )));
        }
    }
    Ok(())
}

/// Log-uniform points with exact endpoints.
pub(crate) fn log_space(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let (a, b) = (min.log10(), max.log10());
    let step = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| match i {
            0 => min,
            _ if i == count - 1 => max,
            _ => 10f64.powf(a + step * i as f64),
        })
        .collect()
}

/// Closed interval of mode eigenvalues treated as a continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBand {
    min: f64,
    max: f64,
}

impl SigmaBand {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && max.is_finite() && max > min) {
            return Err(Error::InvalidSpectrum(format!(
                "band needs 0 < min < max < inf, got [{min}, {max}]"
            )));
        }
        Ok(SigmaBand { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn contains(&self, sigma: f64) -> bool {
        sigma >= self.min && sigma <= self.max
    }

    /// Geometric sample of the band, e.g. for spectral abscissa scans.
    pub fn sample(&self, count: usize) -> ModeSpectrum {
        ModeSpectrum {
            sigmas: log_space(self.min, self.max, count.max(2)),
            label: format!(
                "band_sample(min={}, max={}, count={})",
                self.min,
                self.max,
                count.max(2)
            ),
        }
    }
}
