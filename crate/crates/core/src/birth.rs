//! Time-fractional linear birth process with immigration (μ = 0).
//!
//! With `x = t^ν` the state probabilities are
//!
//! ```text
//! p(0,t) = E_ν(-αx)
//! p(n,t) = Σ_{k=1}^{n} (-1)^k C(n-1,k-1) α/(kλ-α) (E_ν(-kλx) - E_ν(-αx)),   n ≥ 1
//! ```
//!
//! The alternating sum loses roughly `C(n-1, n/2)` in relative precision. When
//! its cancellation estimate is too large, [`pmf_closed`] switches to an
//! equivalent integral that has no cancellation: for `ν = 1` the convolution
//! of the exponential immigration time with a Yule process, and for `ν < 1`
//! the inverse Laplace transform collapsed onto the branch cut,
//!
//! ```text
//! p(n,t) = (1/π) ∫_0^∞ e^{-rt} Im[q p̂(n,q)] / r dr,   q = r^ν e^{iνπ},
//! p̂(n,q) = α/(q+α) · (n-1)! λ^{n-1} / Π_{m=1}^{n} (q + mλ),
//! ```
//!
//! where `p̂` is the Laplace transform of the classical (`ν = 1`) chain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::special::{ln_gamma, mittag_leffler, mittag_leffler_deriv, FracOrder};
use crate::summation::CompensatedSum;

/// Largest state accepted by [`pmf_closed`].
pub const MAX_STATE: usize = 100;

/// Relative gap `|kλ - α| / max(kλ, α)` below which a term uses its limit.
pub const RESONANCE_TOLERANCE: f64 = 1e-8;

// Direct-sum cancellation estimates above this trigger the integral route.
const DIRECT_TOLERANCE: f64 = 1e-13;

/// Rates of the pure-birth variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthParams {
    pub alpha: f64,
    pub lambda: f64,
    pub nu: FracOrder,
}

impl BirthParams {
    pub fn new(alpha: f64, lambda: f64, nu: FracOrder) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { alpha, lambda, nu })
    }

    fn resonant(&self, k: usize) -> bool {
        let kl = k as f64 * self.lambda;
        (kl - self.alpha).abs() <= RESONANCE_TOLERANCE * kl.max(self.alpha)
    }
}

/// `C(n, k)`; exact for `n ≤ 64`, via log-gamma beyond.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 64 {
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        return c as f64;
    }
    let ln = ln_gamma(n as f64 + 1.0).0 - ln_gamma(k as f64 + 1.0).0 - ln_gamma((n - k) as f64 + 1.0).0;
    ln.exp().round()
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `p(n,t)` of the birth process.
pub fn pmf_closed(n: usize, t: f64, p: &BirthParams) -> Result<f64> {
    check_time(t)?;
    if n > MAX_STATE {
        return Err(Error::Domain(format!(
            "state {n} exceeds {MAX_STATE}: the alternating sum is meaningless in double precision"
        )));
    }
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let x = t.powf(p.nu.get());
    if n == 0 {
        return mittag_leffler(p.nu, -p.alpha * x);
    }
    let (value, err) = direct_sum(n, x, p)?;
    let (value, err) = if err > DIRECT_TOLERANCE {
        integral_route(n, t, p)?
    } else {
        (value, err)
    };
    if value < -err || value > 1.0 + err {
        return Err(Error::AccuracyLoss {
            what: format!("birth pmf p({n}, t={t}) = {value:e} outside [0, 1]"),
            estimate: err,
            threshold: DIRECT_TOLERANCE,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

// Alternating sum with its cancellation estimate.
fn direct_sum(n: usize, x: f64, p: &BirthParams) -> Result<(f64, f64)> {
    let e_alpha = mittag_leffler(p.nu, -p.alpha * x)?;
    let mut sum = CompensatedSum::new();
    let mut spread = 0.0;
    for k in 1..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * binomial(n - 1, k - 1);
        if p.resonant(k) {
            let d = mittag_leffler_deriv(p.nu, -p.alpha * x)?;
            sum.add(-c * p.alpha * x * d);
        } else {
            let kl = k as f64 * p.lambda;
            let w = c * p.alpha / (kl - p.alpha);
            let e_k = mittag_leffler(p.nu, -kl * x)?;
            sum.add(w * e_k);
            sum.add(-w * e_alpha);
            // the difference E(-kλx) - E(-αx) is itself cancellative near resonance
            spread += (w * e_alpha).abs();
        }
    }
    let err = 4.0 * sum.cancellation_estimate() + f64::EPSILON * spread;
    Ok((sum.value(), err))
}

fn integral_route(n: usize, t: f64, p: &BirthParams) -> Result<(f64, f64)> {
    if p.nu.is_classical() {
        convolution(n, t, p)
    } else {
        branch_cut(n, t, p)
    }
}

// ∫_0^t α e^{-αu} e^{-λs} (1 - e^{-λs})^{n-1} du with s = t - u
fn convolution(n: usize, t: f64, p: &BirthParams) -> Result<(f64, f64)> {
    let (a, l) = (p.alpha, p.lambda);
    let f = |u: f64| {
        let s = t - u;
        let y = -(-l * s).exp_m1();
        a * (-a * u - l * s).exp() * y.powi(n as i32 - 1)
    };
    let cfg = QuadConfig {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let r = integrate(f, 0.0, t, cfg)?;
    Ok((r.value, r.abs_error + 1e-15 * r.value.abs()))
}

/// Laplace transform of the classical (`ν = 1`) birth pmf at complex `q`.
fn classical_transform(n: usize, q: Complex64, p: &BirthParams) -> Complex64 {
    let immigration = p.alpha / (q + p.alpha);
    if n == 0 {
        return immigration / p.alpha;
    }
    let mut prod = immigration;
    for m in 1..=n {
        let ml = m as f64 * p.lambda;
        // (m-1)λ / (q + mλ), with the m = n factor carrying no numerator
        prod *= if m < n {
            ml / (q + ml)
        } else {
            Complex64::new(1.0, 0.0) / (q + ml)
        };
    }
    prod
}

// Branch-cut integral after r = v/t; v ∈ [0,1] uses v = w^{1/ν} to remove
// the v^{ν-1} endpoint singularity.
fn branch_cut(n: usize, t: f64, p: &BirthParams) -> Result<(f64, f64)> {
    let nu = p.nu.get();
    let phase = Complex64::from_polar(1.0, nu * std::f64::consts::PI);
    // Im[q p̂(n,q)] at r = v/t
    let g = |v: f64| {
        let q = phase * (v / t).powf(nu);
        (q * classical_transform(n, q, p)).im
    };
    let near = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        let v = w.powf(1.0 / nu);
        (-v).exp() * g(v) / (nu * w)
    };
    let far = |v: f64| (-v).exp() * g(v) / v;
    let cfg = QuadConfig {
        abs_tol: 1e-16,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let a = integrate(near, 0.0, 1.0, cfg)?;
    let b = integrate(far, 1.0, 50.0, cfg)?;
    let value = (a.value + b.value) / std::f64::consts::PI;
    // e^{-50} bounds the omitted tail
    let err = (a.abs_error + b.abs_error) / std::f64::consts::PI + 2e-22;
    Ok((value, err))
}

/// Series component `p_k(n,t)` of the birth process.
///
/// The coefficient `α Σ_r (-1)^{r+k} C(n-1,r-1) ((rλ)^k - α^k)/(rλ - α)` is
/// generated by the equivalent recurrence `C[n,k] = -nλ C[n,k-1] + λ_{n-1} C[n-1,k-1]`
/// (`λ_0 = α`), whose two terms always share a sign; this removes the
/// cancellation of the binomial sum and covers `rλ = α` continuously. The
/// factor `t^{kν}/Γ(kν+1)` is folded into the recurrence to avoid overflow.
pub fn series_component_birth(n: usize, k: usize, p: &BirthParams, t: f64) -> f64 {
    if n > k {
        return 0.0;
    }
    if t == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let nu = p.nu.get();
    let ln_t = t.ln();
    // step factor from order j-1 to j: t^ν Γ((j-1)ν+1) / Γ(jν+1)
    let step = |j: usize| (nu * ln_t + ln_gamma((j - 1) as f64 * nu + 1.0).0 - ln_gamma(j as f64 * nu + 1.0).0).exp();
    let rate = |m: usize| if m == 0 { p.alpha } else { m as f64 * p.lambda };
    // column[m] holds the scaled component for state m at the current order
    let mut column = vec![0.0; n + 1];
    column[0] = 1.0;
    for j in 1..=k {
        let s = step(j);
        for m in (0..=n.min(j)).rev() {
            let from_below = if m == 0 { 0.0 } else { rate(m - 1) * column[m - 1] };
            column[m] = (-rate(m) * column[m] + from_below) * s;
        }
    }
    column[n]
}

/// `Σ_{k=n}^{K} p_k(n,t)` of the birth process.
pub fn series_sum_birth(n: usize, order: usize, p: &BirthParams, t: f64) -> f64 {
    (n..=order)
        .map(|k| series_component_birth(n, k, p, t))
        .collect::<CompensatedSum>()
        .value()
}

/// Laplace transform of `p(n,·)` at `z > 0`.
pub fn laplace_state(n: usize, z: f64, p: &BirthParams) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("Laplace variable must be positive, got {z}")));
    }
    let nu = p.nu.get();
    let zn = z.powf(nu);
    let zm = z.powf(nu - 1.0);
    let base = zm / (zn + p.alpha);
    if n == 0 {
        return Ok(base);
    }
    let mut sum = CompensatedSum::new();
    for k in 1..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * binomial(n - 1, k - 1);
        if p.resonant(k) {
            // d/dβ [z^{ν-1}/(z^ν+β)] at β = α, times α
            sum.add(-c * p.alpha * zm / (zn + p.alpha).powi(2));
        } else {
            let kl = k as f64 * p.lambda;
            let w = c * p.alpha / (kl - p.alpha);
            sum.add(w * zm / (zn + kl));
            sum.add(-w * base);
        }
    }
    let value = sum.value();
    if 4.0 * sum.cancellation_estimate() > DIRECT_TOLERANCE * value.abs().max(f64::MIN_POSITIVE) {
        return Ok(zm * classical_transform(n, Complex64::new(zn, 0.0), p).re);
    }
    Ok(value)
}

/// `E N(t) = α/(α+λ) (E_ν(λt^ν) - E_ν(-αt^ν))`.
pub fn mean_birth(t: f64, p: &BirthParams) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = t.powf(p.nu.get());
    let up = mittag_leffler(p.nu, p.lambda * x)?;
    let down = mittag_leffler(p.nu, -p.alpha * x)?;
    Ok(p.alpha / (p.alpha + p.lambda) * (up - down))
}

/// Second factorial moment `E N(t)(N(t)-1)`.
pub fn second_factorial_moment_birth(t: f64, p: &BirthParams) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let (a, l) = (p.alpha, p.lambda);
    let x = t.powf(p.nu.get());
    let e2 = mittag_leffler(p.nu, 2.0 * l * x)?;
    let e1 = mittag_leffler(p.nu, l * x)?;
    let e0 = mittag_leffler(p.nu, -a * x)?;
    let inner = (a + l) * e2 / (l * (a + 2.0 * l)) - e1 / l + e0 / (a + 2.0 * l);
    Ok(2.0 * a * l / (a + l) * inner)
}

/// `Var N(t) = m₂ + m - m²`.
pub fn variance_birth(t: f64, p: &BirthParams) -> Result<f64> {
    let m = mean_birth(t, p)?;
    let m2 = second_factorial_moment_birth(t, p)?;
    Ok(m2 + m - m * m)
}

/// First-order-in-α approximation of `p(n,t)`, intended for `α ≪ λ`.
///
/// No remainder estimate is attempted; accuracy is `O(α²)` at best.
pub fn small_alpha_pmf(n: usize, t: f64, p: &BirthParams) -> Result<f64> {
    check_time(t)?;
    let nu = p.nu.get();
    if n == 0 {
        return Ok(1.0 - t.powf(nu) * p.alpha * (-ln_gamma(1.0 + nu).0).exp());
    }
    let x = t.powf(nu);
    let mut sum = CompensatedSum::new();
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum.add(sign * binomial(n, k) * mittag_leffler(p.nu, -(k as f64) * p.lambda * x)?);
    }
    Ok(p.alpha / (n as f64 * p.lambda) * sum.value())
}

/// `Pr{T > s} = E_ν(-αs^ν)` for the first-immigration time `T`.
pub fn waiting_time_survival(s: f64, p: &BirthParams) -> Result<f64> {
    pmf_closed(0, s, p)
}

/// Laplace transform in `t` of the pgf `Σ_n u^n p(n,t)` at `z > 0`.
///
/// The integral over `x ∈ [0, ∞)` is mapped to `[0, 1]` by `1 - w = e^{-λx}`,
/// which gives `(u z^{ν-1}/λ) ∫_0^1 y^a / (1 - u + u y) dy` with `a = z^ν/λ`
/// and `y = 1 - w`; a further `y = v^{1/a}` removes the endpoint singularity
/// at `u = 1`.
pub fn pgf_laplace(u: f64, z: f64, p: &BirthParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("u must lie in [0, 1], got {u}")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("Laplace variable must be positive, got {z}")));
    }
    let nu = p.nu.get();
    let zn = z.powf(nu);
    let zm = z.powf(nu - 1.0);
    let head = zm / (zn + p.alpha);
    if u == 0.0 {
        return Ok(head);
    }
    let a = zn / p.lambda;
    let f = |v: f64| {
        let y = v.powf(1.0 / a);
        y / (1.0 - u + u * y)
    };
    let r = integrate(f, 0.0, 1.0, QuadConfig::absolute(1e-8))?;
    let integral = u * zm / p.lambda * r.value / a;
    Ok(head + p.alpha / (zn + p.alpha) * integral)
}
