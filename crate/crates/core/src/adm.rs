//! Adomian-decomposition series for the time-fractional linear birth-death
//! process with immigration at extinction.
//!
//! Applying the fractional integral `I^ν` to the master equations and
//! splitting `p(n,t) = Σ_k p_k(n,t)` gives components of the form
//!
//! ```text
//! p_k(n,t) = C[n,k] · t^{kν} / Γ(kν + 1),
//! C[n,k]   = -(λ_n + μ_n) C[n,k-1] + λ_{n-1} C[n-1,k-1] + μ_{n+1} C[n+1,k-1],
//! ```
//!
//! with `C[0,0] = 1`, `λ_0 = α`, `λ_n = nλ`, `μ_n = nμ`. Components vanish for
//! `n > k`. When `α = λ = μ` the coefficients are `(-1)^{k-n} c[n,k] λ^k` for a
//! triangle of nonnegative integers `c`, which [`coeff_table_equal_rates`]
//! builds exactly.
//!
//! The resulting series alternate and their terms grow before they decay, so
//! every evaluation reports a tail estimate (first omitted component) and a
//! cancellation estimate, and refuses when cancellation exceeds
//! [`CANCELLATION_LIMIT`].

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{frac_integral_power, ln_gamma, FracOrder};
use crate::summation::CompensatedSum;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 60;

/// Largest order accepted for exact coefficient tables.
pub const MAX_EXACT_ORDER: usize = 400;

/// Cancellation estimates above this are reported as accuracy loss.
pub const CANCELLATION_LIMIT: f64 = 1e-6;

/// Rates `(α, λ, μ)` and fractional order `ν` of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: FracOrder,
}

impl ModelParams {
    pub fn new(alpha: f64, lambda: f64, mu: f64, nu: FracOrder) -> Result<Self> {
        let p = Self::unchecked(alpha, lambda, mu, nu)?;
        if lambda == 0.0 && mu == 0.0 {
            return Err(Error::Parameter(
                "lambda and mu are both zero; use ModelParams::immigration_only".into(),
            ));
        }
        Ok(p)
    }

    /// The degenerate chain with no births or deaths after the first immigration.
    pub fn immigration_only(alpha: f64, nu: FracOrder) -> Result<Self> {
        Self::unchecked(alpha, 0.0, 0.0, nu)
    }

    /// `α = λ = μ = rate`.
    pub fn equal_rates(rate: f64, nu: FracOrder) -> Result<Self> {
        Self::new(rate, rate, rate, nu)
    }

    fn unchecked(alpha: f64, lambda: f64, mu: f64, nu: FracOrder) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Parameter(format!("mu must be >= 0, got {mu}")));
        }
        Ok(Self { alpha, lambda, mu, nu })
    }

    pub fn is_equal_rates(&self) -> bool {
        self.alpha == self.lambda && self.lambda == self.mu
    }

    /// Upward rate out of state `n`.
    pub fn birth_rate(&self, n: usize) -> f64 {
        if n == 0 {
            self.alpha
        } else {
            n as f64 * self.lambda
        }
    }

    /// Downward rate out of state `n`.
    pub fn death_rate(&self, n: usize) -> f64 {
        n as f64 * self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    EqualRates,
    General,
}

/// Triangular array of series coefficients, rows `k = 0..=max_order`.
///
/// Row `k` holds entries `n = 0..=k`; entries with `n > k` are zero and not
/// stored.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    max_order: usize,
    flavor: Flavor,
    exact_rows: Vec<Vec<BigUint>>,
    general_rows: Vec<Vec<f64>>,
    // ln|coefficient| and sign, shared by both flavors for evaluation
    ln_abs: Vec<Vec<f64>>,
    negative: Vec<Vec<bool>>,
}

impl CoefficientTable {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Exact rows (equal-rates flavor only).
    pub fn exact_rows(&self) -> &[Vec<BigUint>] {
        &self.exact_rows
    }

    /// Exact `c[n,k]`; zero for `n > k`. `None` for general tables or `k` out of range.
    pub fn exact(&self, n: usize, k: usize) -> Option<BigUint> {
        let row = self.exact_rows.get(k)?;
        Some(row.get(n).cloned().unwrap_or_else(BigUint::zero))
    }

    /// Real rows (general flavor only).
    pub fn general_rows(&self) -> &[Vec<f64>] {
        &self.general_rows
    }

    /// Real `C[n,k]`; zero for `n > k`. `None` for equal-rates tables or `k` out of range.
    pub fn general(&self, n: usize, k: usize) -> Option<f64> {
        let row = self.general_rows.get(k)?;
        Some(row.get(n).copied().unwrap_or(0.0))
    }

    /// `ln|coef|` and sign of the stored coefficient, with the alternating sign
    /// `(-1)^{k-n}` applied for equal-rates tables. `None` when `n > k`.
    fn ln_signed(&self, n: usize, k: usize) -> Option<(f64, bool)> {
        let ln = *self.ln_abs.get(k)?.get(n)?;
        Some((ln, self.negative[k][n]))
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().map_or(f64::INFINITY, f64::ln)
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Exact integer triangle for `α = λ = μ`:
/// `c[0,k+1] = c[0,k] + c[1,k]`, `c[1,k+1] = c[0,k] + 2(c[1,k] + c[2,k])`,
/// `c[n,k+1] = (n-1)c[n-1,k] + 2n c[n,k] + (n+1)c[n+1,k]`.
pub fn coeff_table_equal_rates(max_order: usize) -> Result<CoefficientTable> {
    if max_order > MAX_EXACT_ORDER {
        return Err(Error::Resource(format!(
            "exact coefficient order {max_order} exceeds limit {MAX_EXACT_ORDER}"
        )));
    }
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_order + 1);
    rows.push(vec![BigUint::from(1u32)]);
    for k in 0..max_order {
        let prev = &rows[k];
        let at = |i: usize| prev.get(i);
        let mut next = Vec::with_capacity(k + 2);
        for n in 0..=k + 1 {
            let mut v = BigUint::zero();
            match n {
                0 => {
                    v += &prev[0];
                    if let Some(c) = at(1) {
                        v += c;
                    }
                }
                1 => {
                    v += &prev[0];
                    if let Some(c) = at(1) {
                        v += c * 2u32;
                    }
                    if let Some(c) = at(2) {
                        v += c * 2u32;
                    }
                }
                _ => {
                    if let Some(c) = at(n - 1) {
                        v += c * (n as u64 - 1);
                    }
                    if let Some(c) = at(n) {
                        v += c * (2 * n as u64);
                    }
                    if let Some(c) = at(n + 1) {
                        v += c * (n as u64 + 1);
                    }
                }
            }
            next.push(v);
        }
        rows.push(next);
    }
    let ln_abs = rows.iter().map(|row| row.iter().map(ln_biguint).collect()).collect();
    let negative = rows
        .iter()
        .enumerate()
        .map(|(k, row)| (0..row.len()).map(|n| (k - n) % 2 == 1).collect())
        .collect();
    Ok(CoefficientTable {
        max_order,
        flavor: Flavor::EqualRates,
        exact_rows: rows,
        general_rows: Vec::new(),
        ln_abs,
        negative,
    })
}

/// Floating-point coefficient triangle for arbitrary rates.
pub fn coeff_table_general(params: &ModelParams, max_order: usize) -> Result<CoefficientTable> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(max_order + 1);
    rows.push(vec![1.0]);
    for k in 1..=max_order {
        let prev = &rows[k - 1];
        let at = |i: usize| prev.get(i).copied().unwrap_or(0.0);
        let mut next = Vec::with_capacity(k + 1);
        for n in 0..=k {
            let out = params.birth_rate(n) + params.death_rate(n);
            let from_below = if n == 0 {
                0.0
            } else {
                params.birth_rate(n - 1) * at(n - 1)
            };
            let from_above = params.death_rate(n + 1) * at(n + 1);
            let v = -out * at(n) + from_below + from_above;
            if !v.is_finite() {
                return Err(Error::Overflow { n, k });
            }
            next.push(v);
        }
        rows.push(next);
    }
    let ln_abs = rows
        .iter()
        .map(|row| row.iter().map(|c| c.abs().ln()).collect())
        .collect();
    let negative = rows
        .iter()
        .map(|row| row.iter().map(|c| c.is_sign_negative()).collect())
        .collect();
    Ok(CoefficientTable {
        max_order,
        flavor: Flavor::General,
        exact_rows: Vec::new(),
        general_rows: rows,
        ln_abs,
        negative,
    })
}

/// A truncated series value with its error diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub value: f64,
    pub order_used: usize,
    /// Magnitude of the first omitted term.
    pub tail_estimate: f64,
    /// Rounding: largest partial-sum magnitude times machine epsilon plus
    /// the accumulated per-term evaluation error.
    pub cancellation_estimate: f64,
}

impl TruncatedSeries {
    pub fn error_bound(&self) -> f64 {
        self.tail_estimate + self.cancellation_estimate
    }

    fn exact(value: f64, order_used: usize) -> Self {
        Self {
            value,
            order_used,
            tail_estimate: 0.0,
            cancellation_estimate: 0.0,
        }
    }

    fn check(self, what: impl FnOnce() -> String) -> Result<Self> {
        if self.cancellation_estimate > CANCELLATION_LIMIT {
            return Err(Error::AccuracyLoss {
                what: what(),
                estimate: self.cancellation_estimate,
                threshold: CANCELLATION_LIMIT,
            });
        }
        Ok(self)
    }
}

/// State probabilities at one time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    pub time: f64,
    pub probs: Vec<f64>,
    /// `|Σ probs - 1|`.
    pub regularity_defect: f64,
    pub per_state_error: Vec<f64>,
}

impl Pmf {
    pub(crate) fn from_parts(time: f64, probs: Vec<f64>, per_state_error: Vec<f64>) -> Self {
        let total: CompensatedSum = probs.iter().copied().collect();
        Self {
            time,
            regularity_defect: (total.value() - 1.0).abs(),
            probs,
            per_state_error,
        }
    }

    /// Sum of the per-state error estimates.
    pub fn error_budget(&self) -> f64 {
        self.per_state_error.iter().sum()
    }

    /// `Σ n·p(n)` over the stored states.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .collect::<CompensatedSum>()
            .value()
    }

    /// `Σ (n - m)²·p(n)` with `m` the stored-state mean.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64 - m).powi(2) * p)
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Series evaluator bound to one parameter set and truncation order.
///
/// The coefficient table is built once (to order `K + 1`, for tail estimates)
/// and is immutable afterwards, so a solver can be shared between threads.
#[derive(Debug, Clone)]
pub struct AdmSolver {
    params: ModelParams,
    order: usize,
    table: CoefficientTable,
}

impl AdmSolver {
    /// Exact integer coefficients when `α = λ = μ`, floating otherwise.
    pub fn new(params: ModelParams, order: usize) -> Result<Self> {
        let table = if params.is_equal_rates() {
            coeff_table_equal_rates(order + 1)?
        } else {
            coeff_table_general(&params, order + 1)?
        };
        Ok(Self { params, order, table })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    /// `ln|C[n,k]|` and sign of `C[n,k]` including rates.
    fn ln_coefficient(&self, n: usize, k: usize) -> Option<(f64, bool)> {
        let (ln, neg) = self.table.ln_signed(n, k)?;
        match self.table.flavor {
            Flavor::EqualRates => Some((ln + k as f64 * self.params.lambda.ln(), neg)),
            Flavor::General => Some((ln, neg)),
        }
    }

    /// The component `p_k(n,t) = C[n,k] t^{kν} / Γ(kν+1)`.
    pub fn component(&self, n: usize, k: usize, t: f64) -> Result<f64> {
        if k > self.table.max_order {
            return Err(Error::Domain(format!(
                "component order {k} exceeds table order {}",
                self.table.max_order
            )));
        }
        Ok(self.component_unchecked(n, k, t))
    }

    fn component_unchecked(&self, n: usize, k: usize, t: f64) -> f64 {
        self.component_rounded(n, k, t).0
    }

    // component and a bound on its rounding error; the magnitude is exp(L),
    // so an absolute error ε|L| in the exponent becomes a relative error
    fn component_rounded(&self, n: usize, k: usize, t: f64) -> (f64, f64) {
        let Some((ln_c, neg)) = self.ln_coefficient(n, k) else {
            return (0.0, 0.0);
        };
        if ln_c == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        let sign = if neg { -1.0 } else { 1.0 };
        if k == 0 {
            let v = ln_c.exp();
            return (sign * v, v * f64::EPSILON * (2.0 + ln_c.abs()));
        }
        if t == 0.0 {
            return (0.0, 0.0);
        }
        let kn = k as f64 * self.params.nu.get();
        let (a, b, c) = (ln_c, kn * t.ln(), ln_gamma(kn + 1.0).0);
        let mag = (a + b - c).exp();
        (sign * mag, mag * f64::EPSILON * (4.0 + a.abs() + b.abs() + c.abs()))
    }

    /// Truncated series for `p(n,t)` summing components `k = n..=K`.
    pub fn state_probability(&self, n: usize, t: f64) -> Result<TruncatedSeries> {
        check_time(t)?;
        if n > self.order {
            return Err(Error::Domain(format!(
                "state {n} exceeds truncation order {}",
                self.order
            )));
        }
        if t == 0.0 {
            return Ok(TruncatedSeries::exact(if n == 0 { 1.0 } else { 0.0 }, self.order));
        }
        let mut sum = CompensatedSum::new();
        let mut rounding = 0.0;
        for k in n..=self.order {
            let (c, e) = self.component_rounded(n, k, t);
            sum.add(c);
            rounding += e;
        }
        TruncatedSeries {
            value: sum.value(),
            order_used: self.order,
            tail_estimate: self.component_unchecked(n, self.order + 1, t).abs(),
            cancellation_estimate: sum.cancellation_estimate() + rounding,
        }
        .check(|| format!("p({n}, t={t})"))
    }

    /// State probabilities for `n = 0..=n_max`.
    pub fn pmf(&self, t: f64, n_max: usize) -> Result<Pmf> {
        if n_max > self.order {
            return Err(Error::Domain(format!(
                "n_max {n_max} exceeds truncation order {}",
                self.order
            )));
        }
        let mut probs = Vec::with_capacity(n_max + 1);
        let mut errs = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let s = self.state_probability(n, t)?;
            probs.push(s.value);
            errs.push(s.error_bound());
        }
        Ok(Pmf::from_parts(t, probs, errs))
    }

    fn require_equal_rates(&self, what: &str) -> Result<()> {
        if self.params.is_equal_rates() {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "{what} series is only available for alpha = lambda = mu"
            )))
        }
    }

    // Σ_{k=0}^{K} c[0,k] (-x)^{k+shift} / Γ((k+shift)ν+1), x = λt^ν, scaled by `factor`.
    fn moment_series(&self, t: f64, shift: usize, factor: f64, what: &str) -> Result<TruncatedSeries> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(TruncatedSeries::exact(0.0, self.order));
        }
        let nu = self.params.nu.get();
        let ln_x = self.params.lambda.ln() + nu * t.ln();
        // term and its rounding bound
        let term = |k: usize| {
            let p = k + shift;
            let (ln_c, _) = self.table.ln_signed(0, k).expect("row 0 is always present");
            let (a, b, c) = (ln_c, p as f64 * ln_x, ln_gamma(p as f64 * nu + 1.0).0);
            let mag = factor.abs() * (a + b - c).exp();
            let sign = if p % 2 == 1 { -1.0 } else { 1.0 };
            (
                factor.signum() * sign * mag,
                mag * f64::EPSILON * (4.0 + a.abs() + b.abs() + c.abs()),
            )
        };
        let mut sum = CompensatedSum::new();
        let mut rounding = 0.0;
        for k in 0..=self.order {
            let (v, e) = term(k);
            sum.add(v);
            rounding += e;
        }
        TruncatedSeries {
            value: sum.value(),
            order_used: self.order,
            tail_estimate: term(self.order + 1).0.abs(),
            cancellation_estimate: sum.cancellation_estimate() + rounding,
        }
        .check(|| format!("{what}(t={t})"))
    }

    /// `E N(t) = -Σ_k c[0,k] (-λt^ν)^{k+1} / Γ((k+1)ν+1)`; equal rates only.
    pub fn mean(&self, t: f64) -> Result<TruncatedSeries> {
        self.require_equal_rates("mean")?;
        self.moment_series(t, 1, -1.0, "mean")
    }

    /// `E N(t)(N(t)-1) = 2 Σ_k c[0,k] (-λt^ν)^{k+2} / Γ((k+2)ν+1)`; equal rates only.
    pub fn second_factorial_moment(&self, t: f64) -> Result<TruncatedSeries> {
        self.require_equal_rates("second factorial moment")?;
        self.moment_series(t, 2, 2.0, "second_factorial_moment")
    }

    /// `Var N(t) = m₂ + m - m²`; equal rates only.
    pub fn variance(&self, t: f64) -> Result<TruncatedSeries> {
        let m = self.mean(t)?;
        let m2 = self.second_factorial_moment(t)?;
        let value = m2.value + m.value - m.value * m.value;
        let spread = 1.0 + 2.0 * m.value.abs();
        Ok(TruncatedSeries {
            value,
            order_used: self.order,
            tail_estimate: m2.tail_estimate + spread * m.tail_estimate,
            cancellation_estimate: m2.cancellation_estimate
                + spread * m.cancellation_estimate
                + f64::EPSILON * (m2.value.abs() + m.value.abs() + m.value * m.value),
        })
    }

    /// Residual of the integrated master equation for the truncated series:
    ///
    /// `R(n,t) = p_K(n,t) - p(n,0) - I^ν[-(λ_n+μ_n)p_K(n) + λ_{n-1}p_K(n-1) + μ_{n+1}p_K(n+1)](t)`
    ///
    /// with `I^ν` applied term by term through [`frac_integral_power`]. The
    /// recurrence makes every order up to `K` cancel, leaving minus the first
    /// omitted component, so `|R|` should not exceed `tail_estimate` by more
    /// than `cancellation_estimate`. No accuracy-loss check is applied.
    pub fn integrated_residual(&self, n: usize, t: f64) -> Result<TruncatedSeries> {
        check_time(t)?;
        if n + 1 > self.order {
            return Err(Error::Domain(format!("state {n} needs order > {}", self.order)));
        }
        let nu = self.params.nu.get();
        // I^ν of t^{kν}/Γ(kν+1)
        let integrated = |k: usize| -> Result<f64> {
            let delta = k as f64 * nu + 1.0;
            Ok(frac_integral_power(nu, delta, t)? * (-ln_gamma(delta).0).exp())
        };
        let mut sum = CompensatedSum::new();
        let mut rounding = 0.0;
        for k in n..=self.order {
            let (c, e) = self.component_rounded(n, k, t);
            sum.add(c);
            rounding += e;
        }
        if n == 0 {
            sum.add(-1.0);
        }
        let neighbours = [
            (n, -(self.params.birth_rate(n) + self.params.death_rate(n))),
            (
                n.wrapping_sub(1),
                if n == 0 { 0.0 } else { self.params.birth_rate(n - 1) },
            ),
            (n + 1, self.params.death_rate(n + 1)),
        ];
        for (m, rate) in neighbours {
            if rate == 0.0 {
                continue;
            }
            for k in m..=self.order {
                let Some((ln_c, neg)) = self.ln_coefficient(m, k) else {
                    continue;
                };
                if ln_c == f64::NEG_INFINITY {
                    continue;
                }
                let c = if neg { -ln_c.exp() } else { ln_c.exp() };
                let term = -rate * c * integrated(k)?;
                sum.add(term);
                let delta = k as f64 * nu + 1.0;
                let logs = ln_c.abs()
                    + 2.0 * ln_gamma(delta).0.abs()
                    + ln_gamma(delta + nu).0.abs()
                    + ((delta + nu - 1.0) * t.ln()).abs();
                rounding += term.abs() * f64::EPSILON * (8.0 + logs);
            }
        }
        Ok(TruncatedSeries {
            value: sum.value(),
            order_used: self.order,
            tail_estimate: self.component_unchecked(n, self.order + 1, t).abs(),
            cancellation_estimate: sum.cancellation_estimate() + rounding,
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `p_k(n,t)` for a single `(n, k)`.
pub fn series_component(n: usize, k: usize, params: &ModelParams, t: f64) -> Result<f64> {
    check_time(t)?;
    AdmSolver::new(*params, k)?.component(n, k, t)
}

/// `p(n,t)` truncated at order `K`.
pub fn state_probability(n: usize, t: f64, params: &ModelParams, order: usize) -> Result<TruncatedSeries> {
    AdmSolver::new(*params, order)?.state_probability(n, t)
}

/// Probabilities of states `0..=n_max` truncated at order `K`.
pub fn pmf(t: f64, params: &ModelParams, order: usize, n_max: usize) -> Result<Pmf> {
    AdmSolver::new(*params, order)?.pmf(t, n_max)
}

pub fn mean(t: f64, params: &ModelParams, order: usize) -> Result<TruncatedSeries> {
    AdmSolver::new(*params, order)?.mean(t)
}

pub fn second_factorial_moment(t: f64, params: &ModelParams, order: usize) -> Result<TruncatedSeries> {
    AdmSolver::new(*params, order)?.second_factorial_moment(t)
}

pub fn variance(t: f64, params: &ModelParams, order: usize) -> Result<TruncatedSeries> {
    AdmSolver::new(*params, order)?.variance(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, l: f64, m: f64, nu: f64) -> ModelParams {
        ModelParams::new(a, l, m, FracOrder::new(nu).unwrap()).unwrap()
    }

    fn row(table: &CoefficientTable, k: usize) -> Vec<u64> {
        table.exact_rows()[k].iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn first_rows_of_the_triangle() {
        let t = coeff_table_equal_rates(3).unwrap();
        assert_eq!(row(&t, 0), vec![1]);
        assert_eq!(row(&t, 1), vec![1, 1]);
        assert_eq!(row(&t, 2), vec![2, 3, 1]);
        assert_eq!(row(&t, 3), vec![5, 10, 7, 2]);
        assert_eq!(t.exact(4, 3), Some(BigUint::zero()));
        assert_eq!(t.exact(0, 4), None);
    }

    #[test]
    fn order_zero_table() {
        let t = coeff_table_equal_rates(0).unwrap();
        assert_eq!(t.exact_rows().len(), 1);
        assert_eq!(row(&t, 0), vec![1]);
    }

    #[test]
    fn exact_order_limit() {
        assert!(matches!(
            coeff_table_equal_rates(MAX_EXACT_ORDER + 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn general_table_low_orders() {
        let (a, l, m) = (0.7, 1.3, 0.4);
        let p = params(a, l, m, 0.5);
        let t = coeff_table_general(&p, 4).unwrap();
        let c = |n, k| t.general(n, k).unwrap();
        assert_eq!(c(0, 0), 1.0);
        assert!((c(0, 1) + a).abs() < 1e-15);
        assert!((c(1, 1) - a).abs() < 1e-15);
        assert!((c(0, 2) - a * (a + m)).abs() < 1e-14);
        assert!((c(1, 2) + a * (a + l + m)).abs() < 1e-14);
        assert!((c(2, 2) - a * l).abs() < 1e-14);
        let c03 = -a * (a * a + 2.0 * a * m + l * m + m * m);
        assert!((c(0, 3) - c03).abs() < 1e-14);
        assert_eq!(c(5, 3), 0.0);
    }

    #[test]
    fn general_table_overflow_is_reported() {
        let p = params(1e150, 1e150, 1e150, 1.0);
        match coeff_table_general(&p, 10) {
            Err(Error::Overflow { n, k }) => assert!(k >= 2 && n <= k),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn params_validation() {
        let nu = FracOrder::ONE;
        assert!(ModelParams::new(0.0, 1.0, 1.0, nu).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, nu).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0, nu).is_err());
        assert!(ModelParams::immigration_only(1.0, nu).is_ok());
        assert!(ModelParams::new(1.0, 0.0, 1.0, nu).is_ok());
        let p = ModelParams::equal_rates(2.0, nu).unwrap();
        assert!(p.is_equal_rates());
        assert_eq!(p.birth_rate(0), 2.0);
        assert_eq!(p.birth_rate(3), 6.0);
        assert_eq!(p.death_rate(0), 0.0);
    }

    #[test]
    fn initial_condition() {
        let s = AdmSolver::new(params(1.0, 1.0, 1.0, 0.5), 10).unwrap();
        assert_eq!(s.state_probability(0, 0.0).unwrap().value, 1.0);
        assert_eq!(s.state_probability(3, 0.0).unwrap().value, 0.0);
        let p = s.pmf(0.0, 5).unwrap();
        assert_eq!(p.probs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.regularity_defect, 0.0);
        assert_eq!(s.mean(0.0).unwrap().value, 0.0);
        assert_eq!(s.variance(0.0).unwrap().value, 0.0);
    }

    #[test]
    fn argument_errors() {
        let s = AdmSolver::new(params(1.0, 1.0, 1.0, 1.0), 5).unwrap();
        assert!(s.state_probability(6, 0.1).is_err());
        assert!(s.state_probability(0, -0.1).is_err());
        assert!(s.pmf(0.1, 6).is_err());
        assert!(s.component(0, 7, 0.1).is_err());
        let g = AdmSolver::new(params(1.0, 2.0, 1.0, 1.0), 5).unwrap();
        assert!(matches!(g.mean(0.5), Err(Error::Parameter(_))));
        assert!(matches!(g.variance(0.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn accuracy_loss_is_refused() {
        // fractional order, moderate time: the terms grow to ~1e16 before K=60
        let s = AdmSolver::new(params(1.0, 1.0, 1.0, 0.7), 60).unwrap();
        assert!(matches!(s.state_probability(0, 0.5), Err(Error::AccuracyLoss { .. })));
    }

    #[test]
    fn variance_identity() {
        let s = AdmSolver::new(params(1.0, 1.0, 1.0, 0.9), 40).unwrap();
        let t = 0.3;
        let m = s.mean(t).unwrap().value;
        let m2 = s.second_factorial_moment(t).unwrap().value;
        let v = s.variance(t).unwrap().value;
        assert!((v - (m2 + m - m * m)).abs() <= 1e-12 * v.abs());
    }
}
