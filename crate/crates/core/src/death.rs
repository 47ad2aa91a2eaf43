//! Time-fractional linear death process with immigration (λ = 0).
//!
//! Starting empty, the chain lives on `{0, 1}`: immigration at rate `α`
//! fills it and death at rate `μ` empties it. With `E = E_ν(-(α+μ)t^ν)`,
//!
//! ```text
//! p₀ = (αE + μ)/(α + μ),   p₁ = α(1 - E)/(α + μ).
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{mittag_leffler, FracOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeathParams {
    pub alpha: f64,
    pub mu: f64,
    pub nu: FracOrder,
}

impl DeathParams {
    pub fn new(alpha: f64, mu: f64, nu: FracOrder) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parameter(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { alpha, mu, nu })
    }

    fn relaxation(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        mittag_leffler(self.nu, -(self.alpha + self.mu) * t.powf(self.nu.get()))
    }
}

/// `(p₀(t), p₁(t))`.
pub fn pmf_death(t: f64, p: &DeathParams) -> Result<(f64, f64)> {
    let e = p.relaxation(t)?;
    let s = p.alpha + p.mu;
    let p1 = p.alpha * (1.0 - e) / s;
    // complement keeps p₀ + p₁ = 1 to the last bit
    Ok((1.0 - p1, p1))
}

/// Residuals of `D^ν p₀ = -αp₀ + μp₁` and `D^ν p₁ = αp₀ - μp₁`, with the
/// Caputo derivative `D^ν p₀ = -αE_ν(-(α+μ)t^ν)` taken analytically.
pub fn caputo_residual_death(t: f64, p: &DeathParams) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let e = p.relaxation(t)?;
    let (p0, p1) = pmf_death(t, p)?;
    let d0 = -p.alpha * e;
    let flow = -p.alpha * p0 + p.mu * p1;
    Ok((d0 - flow, -d0 + flow))
}
