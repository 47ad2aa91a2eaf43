//! Special functions: the one-parameter Mittag-Leffler function and its
//! derivative, log-gamma, and the Riemann-Liouville integral of a power.
//!
//! `E_ν(x) = Σ_k x^k / Γ(kν + 1)` is evaluated by one of four routes:
//!
//! * `ν` within `1e-12` of one: `exp(x)`;
//! * small `|x|` and every positive `x`: the Taylor series, compensated;
//! * large negative `x`: the algebraic asymptotic expansion
//!   `E_ν(x) ~ -Σ_{j≥1} x^{-j} / Γ(1 - jν)`, truncated at its smallest term;
//! * everything in between: the real-line integral representation
//!
//!   ```text
//!   E_ν(-x) = sin(νπ)/(νπ) ∫_0^∞ exp(-(u x)^{1/ν}) / (u² + 2u cos(νπ) + 1) du
//!   ```
//!
//!   which has a positive integrand and therefore no cancellation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::summation::CompensatedSum;

/// Orders this close to one are evaluated as the classical (exponential) case.
pub const CLASSICAL_TOLERANCE: f64 = 1e-12;

/// Most negative argument accepted by [`mittag_leffler`].
pub const NEGATIVE_LIMIT: f64 = -1e6;

/// Largest positive argument accepted for any order.
pub const POSITIVE_LIMIT: f64 = 50.0;

// E_ν(x) ≈ exp(x^{1/ν})/ν for large positive x, so x^{1/ν} must stay below
// the log of the largest double.
const POSITIVE_EXPONENT_LIMIT: f64 = 700.0;

// Taylor evaluation of E_ν(-x) is used while E_ν(x) (the peak partial sum)
// stays below this bound.
const TAYLOR_PEAK: f64 = 1e3;

/// Fractional order `ν ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder(f64);

impl FracOrder {
    pub const ONE: FracOrder = FracOrder(1.0);

    pub fn new(nu: f64) -> Result<Self> {
        if nu > 0.0 && nu <= 1.0 {
            Ok(Self(nu))
        } else {
            Err(Error::Domain(format!(
                "fractional order must satisfy 0 < nu <= 1, got {nu}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// True when the order is numerically indistinguishable from one.
    pub fn is_classical(self) -> bool {
        self.0 >= 1.0 - CLASSICAL_TOLERANCE
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;
    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<FracOrder> for f64 {
    fn from(nu: FracOrder) -> f64 {
        nu.0
    }
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma(x: f64) -> (f64, i32) {
    libm::lgamma_r(x)
}

/// `Γ(x)` through log-gamma with sign tracking.
pub fn gamma(x: f64) -> f64 {
    let (lg, sign) = ln_gamma(x);
    f64::from(sign) * lg.exp()
}

/// `1/Γ(x)`, zero at the poles `x = 0, -1, -2, …`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 0.0 {
        let (lg, _) = ln_gamma(x);
        return (-lg).exp();
    }
    // reflection: 1/Γ(x) = Γ(1-x) sin(πx) / π
    let (lg, sign) = ln_gamma(1.0 - x);
    f64::from(sign) * lg.exp() * sin_pi(x) / PI
}

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor(); // r in [0, 2)
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        -(PI * (r - 1.0)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Value,
    Derivative,
}

/// The Mittag-Leffler function `E_{ν,1}(x)`.
///
/// Accurate to about `1e-13` relative (and `1e-15` absolute near the origin)
/// for `x ∈ [NEGATIVE_LIMIT, positive_limit(ν)]`; outside that range an
/// [`Error::OutOfRange`] is returned.
pub fn mittag_leffler(nu: FracOrder, x: f64) -> Result<f64> {
    evaluate(nu, x, Kind::Value)
}

/// `dE_{ν,1}/dx`, equal to `E_{ν,ν}(x)/ν`.
pub fn mittag_leffler_deriv(nu: FracOrder, x: f64) -> Result<f64> {
    evaluate(nu, x, Kind::Derivative)
}

/// Largest positive argument for which `E_ν(x)` is representable.
pub fn positive_limit(nu: FracOrder) -> f64 {
    POSITIVE_LIMIT.min(POSITIVE_EXPONENT_LIMIT.powf(nu.get()))
}

fn evaluate(nu: FracOrder, x: f64, kind: Kind) -> Result<f64> {
    let what = match kind {
        Kind::Value => "mittag_leffler",
        Kind::Derivative => "mittag_leffler_deriv",
    };
    if x.is_nan() || x < NEGATIVE_LIMIT || x > positive_limit(nu) {
        return Err(Error::OutOfRange { what, x });
    }
    if nu.is_classical() {
        return Ok(x.exp());
    }
    if x == 0.0 {
        return Ok(match kind {
            Kind::Value => 1.0,
            Kind::Derivative => recip_gamma(nu.get() + 1.0),
        });
    }
    if x > 0.0 {
        return Ok(taylor(nu.get(), x, kind).value());
    }
    let nu = nu.get();
    let scaled = (-x).powf(1.0 / nu);
    if scaled.exp() / nu <= TAYLOR_PEAK {
        return Ok(taylor(nu, x, kind).value());
    }
    if let Some(v) = asymptotic(nu, -x, scaled, kind) {
        return Ok(v);
    }
    integral(nu, -x, kind)
}

fn taylor(nu: f64, x: f64, kind: Kind) -> CompensatedSum {
    let ln_abs = x.abs().ln();
    let negative = x < 0.0;
    let mut sum = CompensatedSum::new();
    let start = match kind {
        Kind::Value => 0,
        Kind::Derivative => 1,
    };
    let mut past_peak = false;
    let mut prev = f64::NEG_INFINITY;
    for k in start..200_000usize {
        let kf = k as f64;
        let power = match kind {
            Kind::Value => kf,
            Kind::Derivative => kf - 1.0,
        };
        let mut ln_term = power * ln_abs - ln_gamma(kf * nu + 1.0).0;
        if kind == Kind::Derivative {
            ln_term += kf.ln();
        }
        let mag = ln_term.exp();
        let odd = negative && (power as u64) % 2 == 1;
        sum.add(if odd { -mag } else { mag });
        if ln_term < prev {
            past_peak = true;
        }
        prev = ln_term;
        if past_peak && mag <= 1e-18 * sum.value().abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if past_peak && mag == 0.0 {
            break;
        }
    }
    sum
}

/// Asymptotic expansion of `E_ν(-x)` (or its derivative); `None` when the
/// smallest term is not negligible at this argument.
fn asymptotic(nu: f64, x: f64, scaled: f64, kind: Kind) -> Option<f64> {
    // The expansion omits contributions of order exp(-x^{1/ν}).
    if scaled < 40.0 {
        return None;
    }
    let ln_x = x.ln();
    let mut sum = CompensatedSum::new();
    let mut prev_bound = f64::INFINITY;
    let mut smallest = f64::INFINITY;
    for j in 1..400usize {
        let jf = j as f64;
        // |1/Γ(1 - jν)| <= Γ(jν)/π bounds the size of every later term
        let mut ln_bound = ln_gamma(jf * nu).0 - PI.ln() - jf * ln_x;
        if kind == Kind::Derivative {
            ln_bound += jf.ln() - ln_x;
        }
        let bound = ln_bound.exp();
        if bound > prev_bound {
            break;
        }
        prev_bound = bound;
        smallest = bound;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let coeff = recip_gamma(1.0 - jf * nu);
        let term = match kind {
            // (-1)^{j+1} x^{-j} / Γ(1 - jν)
            Kind::Value => sign * coeff * (-jf * ln_x).exp(),
            // E'(-x) ~ Σ j (-1)^{j+1} x^{-j-1} / Γ(1 - jν)
            Kind::Derivative => sign * jf * coeff * (-(jf + 1.0) * ln_x).exp(),
        };
        sum.add(term);
        if bound < 1e-30 * sum.value().abs() {
            break;
        }
    }
    let v = sum.value();
    if v > 0.0 && smallest <= 1e-15 * v {
        Some(v)
    } else {
        None
    }
}

fn integral(nu: f64, x: f64, kind: Kind) -> Result<f64> {
    let inv_nu = 1.0 / nu;
    let half_cos = (0.5 * nu * PI).cos();
    let gap = 4.0 * half_cos * half_cos; // 2(1 + cos νπ), computed without cancellation
    let denom = |u: f64| (u - 1.0) * (u - 1.0) + gap * u;
    let weight = |s: f64| match kind {
        Kind::Value => (-s).exp(),
        Kind::Derivative => s * (-s).exp(),
    };
    let inner = |u: f64| weight((u * x).powf(inv_nu)) / denom(u);
    let outer = |w: f64| {
        if w == 0.0 {
            0.0
        } else {
            weight((x / w).powf(inv_nu)) / denom(w)
        }
    };
    let cfg = QuadConfig {
        abs_tol: 0.0,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    // For x > 1 the inner integrand lives on u ≲ 1/x: rescale s = u x and cut
    // the range where exp(-s^{1/ν}) < e^{-64}.
    let a = if x > 1.0 {
        let upper = x.min(64f64.powf(nu));
        integrate(|s| inner(s / x), 0.0, upper, cfg)?.value / x
    } else {
        integrate(inner, 0.0, 1.0, cfg)?.value
    };
    let b = integrate(outer, 0.0, 1.0, cfg)?.value;
    let prefactor = match kind {
        Kind::Value => (nu * PI).sin() / (nu * PI),
        Kind::Derivative => (nu * PI).sin() / (nu * nu * PI * x),
    };
    Ok(prefactor * (a + b))
}

/// Riemann-Liouville integral of a power: `I^ν t^{δ-1} = Γ(δ) t^{δ+ν-1} / Γ(δ+ν)`.
pub fn frac_integral_power(nu: f64, delta: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0) || !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "frac_integral_power needs nu > 0 and delta > 0, got nu={nu}, delta={delta}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    let exponent = delta + nu - 1.0;
    let ln_ratio = ln_gamma(delta).0 - ln_gamma(delta + nu).0;
    if t == 0.0 {
        return Ok(if exponent > 0.0 {
            0.0
        } else if exponent == 0.0 {
            ln_ratio.exp()
        } else {
            f64::INFINITY
        });
    }
    Ok((ln_ratio + exponent * t.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    #[test]
    fn frac_order_domain() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0 + 1e-9).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
        assert!(FracOrder::new(1.0).unwrap().is_classical());
        assert!(FracOrder::new(1.0 - 1e-13).unwrap().is_classical());
        assert!(!FracOrder::new(0.999).unwrap().is_classical());
    }

    #[test]
    fn gamma_helpers() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-12);
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert!((recip_gamma(-0.5) * gamma(-0.5) - 1.0).abs() < 1e-14);
        assert!((recip_gamma(-2.5) * gamma(-2.5) - 1.0).abs() < 1e-13);
        assert!((recip_gamma(1.5) * gamma(1.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_order_is_exp() {
        let v = mittag_leffler(FracOrder::ONE, 1.0).unwrap();
        assert_eq!(v, std::f64::consts::E);
        let v = mittag_leffler(nu(1.0 - 1e-13), -3.0).unwrap();
        assert_eq!(v, (-3.0f64).exp());
    }

    #[test]
    fn value_at_origin() {
        for v in [0.1, 0.5, 0.75, 1.0] {
            assert_eq!(mittag_leffler(nu(v), 0.0).unwrap(), 1.0);
        }
        let d = mittag_leffler_deriv(nu(0.5), 0.0).unwrap();
        assert!((d - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_at_their_boundaries() {
        // Taylor vs integral, and integral vs asymptotic, evaluated directly.
        for &v in &[0.3, 0.5, 0.7, 0.9] {
            for &x in &[3.0, 6.0, 12.0] {
                let t = taylor(v, -x, Kind::Value).value();
                let scale = taylor(v, -x, Kind::Value).cancellation_estimate();
                let i = integral(v, x, Kind::Value).unwrap();
                if scale < 1e-10 {
                    assert!((t - i).abs() < 1e-10, "nu={v} x={x}: {t} vs {i}");
                }
            }
            for &x in &[200.0f64, 1e3, 1e4] {
                let scaled = x.powf(1.0 / v);
                let i = integral(v, x, Kind::Value).unwrap();
                if let Some(a) = asymptotic(v, x, scaled, Kind::Value) {
                    assert!(((a - i) / i).abs() < 1e-10, "nu={v} x={x}: {a} vs {i}");
                }
                let id = integral(v, x, Kind::Derivative).unwrap();
                if let Some(ad) = asymptotic(v, x, scaled, Kind::Derivative) {
                    assert!(((ad - id) / id).abs() < 1e-10, "deriv nu={v} x={x}: {ad} vs {id}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_arguments() {
        assert!(matches!(mittag_leffler(nu(0.5), -2e6), Err(Error::OutOfRange { .. })));
        assert!(matches!(mittag_leffler(nu(0.5), 40.0), Err(Error::OutOfRange { .. })));
        assert!(mittag_leffler(nu(0.5), 26.0).unwrap().is_finite());
        assert!(mittag_leffler(nu(0.9), 50.0).unwrap().is_finite());
        assert!(mittag_leffler(nu(0.5), f64::NAN).is_err());
    }

    #[test]
    fn frac_integral_power_edges() {
        assert!(frac_integral_power(0.0, 1.0, 1.0).is_err());
        assert!(frac_integral_power(0.5, -1.0, 1.0).is_err());
        assert!(frac_integral_power(0.5, 1.0, -1.0).is_err());
        assert_eq!(frac_integral_power(0.5, 1.0, 0.0).unwrap(), 0.0);
        assert!((frac_integral_power(0.5, 0.5, 0.0).unwrap() - gamma(0.5)).abs() < 1e-14);
        assert!(frac_integral_power(0.2, 0.3, 0.0).unwrap().is_infinite());
    }
}
