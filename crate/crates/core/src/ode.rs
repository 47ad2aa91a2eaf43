//! Classical (`ν = 1`) oracle: RK4 on the truncated master equations, plus a
//! Laplace-transform quadrature helper.
//!
//! States `0..=n_max` are integrated exactly; the birth flux out of `n_max`
//! is routed into an extra absorbing sink so that conservation can still be
//! checked. The mass reaching the boundary state is tracked over the whole run.

use serde::{Deserialize, Serialize};

use crate::adm::{ModelParams, Pmf};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};

/// Largest boundary-state probability tolerated during integration.
pub const BOUNDARY_LIMIT: f64 = 1e-10;

/// Largest tolerated `|Σ p + sink - 1|`.
pub const DRIFT_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub n_max: usize,
    pub step: f64,
    pub t_end: f64,
}

impl OdeConfig {
    /// Step chosen by the default rule `1e-3 · min(1, 1/(n_max(λ+μ) + α))`.
    pub fn new(params: &ModelParams, n_max: usize, t_end: f64) -> Result<Self> {
        let scale = n_max as f64 * (params.lambda + params.mu) + params.alpha;
        Self::with_step(n_max, 1e-3 * (1.0 / scale).min(1.0), t_end)
    }

    /// Explicit step, bypassing the default rule.
    pub fn with_step(n_max: usize, step: f64, t_end: f64) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::Parameter(format!("n_max must be >= 2, got {n_max}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parameter(format!("step must be positive, got {step}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Domain(format!("t_end must be finite and >= 0, got {t_end}")));
        }
        Ok(Self { n_max, step, t_end })
    }
}

/// Terminal distribution with truncation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub pmf: Pmf,
    /// Largest `p(n_max, s)` seen for `s ∈ [0, t_end]`.
    pub boundary_mass: f64,
    /// Mass that left through the truncation boundary.
    pub sink_mass: f64,
    /// Largest `|Σ p + sink - 1|` seen.
    pub max_drift: f64,
    pub steps: usize,
}

struct Generator {
    down_in: Vec<f64>,
    up_in: Vec<f64>,
    out: Vec<f64>,
    escape: f64,
}

impl Generator {
    fn new(params: &ModelParams, n_max: usize) -> Self {
        let out = (0..=n_max)
            .map(|n| params.birth_rate(n) + params.death_rate(n))
            .collect();
        // inflow to n from n-1 (birth) and from n+1 (death)
        let up_in = (0..=n_max)
            .map(|n| if n == 0 { 0.0 } else { params.birth_rate(n - 1) })
            .collect();
        let down_in = (0..=n_max)
            .map(|n| if n == n_max { 0.0 } else { params.death_rate(n + 1) })
            .collect();
        Self {
            down_in,
            up_in,
            out,
            escape: params.birth_rate(n_max),
        }
    }

    // state vector holds p(0..=n_max) followed by the sink
    fn apply(&self, p: &[f64], dp: &mut [f64]) {
        let m = self.out.len() - 1;
        for n in 0..=m {
            let mut v = -self.out[n] * p[n];
            if n > 0 {
                v += self.up_in[n] * p[n - 1];
            }
            if n < m {
                v += self.down_in[n] * p[n + 1];
            }
            dp[n] = v;
        }
        dp[m + 1] = self.escape * p[m];
    }
}

/// RK4 solution of the classical master equations at `config.t_end`.
pub fn integrate_classical(params: &ModelParams, config: &OdeConfig) -> Result<OdeSolution> {
    if !params.nu.is_classical() {
        return Err(Error::Parameter(format!(
            "the ODE oracle needs nu = 1, got {}",
            params.nu.get()
        )));
    }
    let n_max = config.n_max;
    let gen = Generator::new(params, n_max);
    let len = n_max + 2;
    let mut p = vec![0.0; len];
    p[0] = 1.0;
    let steps = (config.t_end / config.step).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { config.t_end / steps as f64 };
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut tmp = vec![0.0; len];
    let mut boundary_mass: f64 = 0.0;
    let mut max_drift: f64 = 0.0;
    for _ in 0..steps {
        gen.apply(&p, &mut k1);
        for i in 0..len {
            tmp[i] = p[i] + 0.5 * h * k1[i];
        }
        gen.apply(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = p[i] + 0.5 * h * k2[i];
        }
        gen.apply(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = p[i] + h * k3[i];
        }
        gen.apply(&tmp, &mut k4);
        for i in 0..len {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        boundary_mass = boundary_mass.max(p[n_max].abs());
        let total: f64 = p.iter().sum();
        max_drift = max_drift.max((total - 1.0).abs());
        if max_drift > DRIFT_LIMIT {
            return Err(Error::StepDrift {
                drift: max_drift,
                limit: DRIFT_LIMIT,
            });
        }
    }
    if boundary_mass > BOUNDARY_LIMIT {
        return Err(Error::Truncation {
            mass: boundary_mass,
            limit: BOUNDARY_LIMIT,
        });
    }
    let sink_mass = p[n_max + 1];
    p.truncate(n_max + 1);
    let errs = vec![sink_mass + boundary_mass; n_max + 1];
    Ok(OdeSolution {
        pmf: Pmf::from_parts(config.t_end, p, errs),
        boundary_mass,
        sink_mass,
        max_drift,
        steps,
    })
}

/// `∫_0^{t_max} e^{-zt} f(t) dt` to absolute tolerance `tol`.
///
/// The caller chooses `t_max` so that the omitted tail is below `tol`.
pub fn laplace_quadrature<F: Fn(f64) -> f64>(f: F, z: f64, t_max: f64, tol: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("Laplace variable must be positive, got {z}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!("t_max must be positive, got {t_max}")));
    }
    let cfg = QuadConfig {
        abs_tol: tol,
        rel_tol: 0.0,
        max_intervals: 10_000,
    };
    Ok(integrate(|t| (-z * t).exp() * f(t), 0.0, t_max, cfg)?.value)
}
