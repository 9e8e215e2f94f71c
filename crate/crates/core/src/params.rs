//! Physical and fractional coefficients of the coupled plate / network model
//!
//! ```text
//! u_tt + κ A^β u_tt + α A² u + γ A v_t = 0
//! v_tt + α A v − γ A u_t + δ A^θ v_t   = 0
//! ```

use crate::error::{Error, Result};

/// The six model coefficients. Construction validates every range, so a
/// `SystemParams` value is always admissible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    alpha: f64,
    gamma: f64,
    delta: f64,
    kappa: f64,
    theta: f64,
    beta: f64,
}

impl SystemParams {
    pub fn new(
        alpha: f64,
        gamma: f64,
        delta: f64,
        kappa: f64,
        theta: f64,
        beta: f64,
    ) -> Result<Self> {
        let finite = |name: &'static str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be finite"))
            }
        };
        finite("alpha", alpha)?;
        finite("gamma", gamma)?;
        finite("delta", delta)?;
        finite("kappa", kappa)?;
        finite("theta", theta)?;
        finite("beta", beta)?;
        if alpha <= 0.0 {
            return Err(Error::param("alpha", format!("must be > 0, got {alpha}")));
        }
        if gamma == 0.0 {
            return Err(Error::param("gamma", "must be nonzero"));
        }
        if delta < 0.0 {
            return Err(Error::param("delta", format!("must be >= 0, got {delta}")));
        }
        if kappa <= 0.0 {
            return Err(Error::param("kappa", format!("must be > 0, got {kappa}")));
        }
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
        Ok(SystemParams {
            alpha,
            gamma,
            delta,
            kappa,
            theta,
            beta,
        })
    }

    /// Unit coefficients α = γ = δ = κ = 1 at the given exponents.
    pub fn unit(theta: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, 1.0, theta, beta)
    }

    /// Same coefficients, different exponents.
    pub fn with_exponents(&self, theta: f64, beta: f64) -> Result<Self> {
        Self::new(self.alpha, self.gamma, self.delta, self.kappa, theta, beta)
    }

    /// Same parameters with the damping strength replaced.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(
            self.alpha, self.gamma, delta, self.kappa, self.theta, self.beta,
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Inertia factor 1 + κσ^β of mode σ.
    pub fn inertia(&self, sigma: f64) -> f64 {
        1.0 + self.kappa * sigma.powf(self.beta)
    }

    /// Damping rate δσ^θ of mode σ.
    pub fn damping(&self, sigma: f64) -> f64 {
        self.delta * sigma.powf(self.theta)
    }
}
