//! Monte Carlo oracle for `N(L_ν(t))`.
//!
//! Each replica draws one inverse-stable time `L_ν(t) = (t/S)^ν`, with `S` a
//! positive `ν`-stable variate (`E e^{-zS} = e^{-z^ν}`, Kanter's
//! representation), and runs a Gillespie walk of the classical chain up to
//! that time. Replica `i` reads streams `2i` and `2i+1` of a ChaCha8 generator
//! keyed by the master seed, and counts are reduced as integers, so the result
//! does not depend on how replicas are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adm::ModelParams;
use crate::error::{Error, Result};
use crate::special::FracOrder;

/// States above this abort a trajectory.
pub const RUNAWAY_LIMIT: u64 = 10_000_000;

pub const DEFAULT_STATE_CAP: usize = 64;

fn check_uniforms((u1, u2): (f64, f64)) -> Result<()> {
    if u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("uniforms must lie in (0, 1), got ({u1}, {u2})")))
    }
}

// ln S for Kanter's representation S = (A(U)/W)^{(1-ν)/ν},
// A(U) = sin((1-ν)U) sin(νU)^{ν/(1-ν)} / sin(U)^{1/(1-ν)}, U = πu₁, W = -ln u₂.
fn ln_stable(nu: f64, (u1, u2): (f64, f64)) -> f64 {
    let u = std::f64::consts::PI * u1;
    let w = -u2.ln();
    let c = 1.0 - nu;
    let ln_a = ((c * u).sin()).ln() + nu / c * (nu * u).sin().ln() - u.sin().ln() / c;
    c / nu * (ln_a - w.ln())
}

/// Positive `ν`-stable variate from two uniforms in `(0, 1)`.
pub fn sample_stable(nu: FracOrder, uniforms: (f64, f64)) -> Result<f64> {
    if nu.is_classical() {
        return Err(Error::Domain(
            "the stable law degenerates at nu = 1; use the identity time change".into(),
        ));
    }
    check_uniforms(uniforms)?;
    Ok(ln_stable(nu.get(), uniforms).exp().max(f64::MIN_POSITIVE))
}

/// `L_ν(t) = (t/S)^ν`; returns `t` itself when `ν = 1`.
pub fn sample_inverse_subordinator(nu: FracOrder, t: f64, uniforms: (f64, f64)) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    if nu.is_classical() {
        return Ok(t);
    }
    check_uniforms(uniforms)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let v = nu.get();
    Ok((v * (t.ln() - ln_stable(v, uniforms))).exp())
}

// uniform in the open interval (0, 1)
fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// State at `horizon` of the classical chain started empty (Gillespie).
pub fn simulate_lbdpwi<R: Rng + ?Sized>(params: &ModelParams, horizon: f64, rng: &mut R) -> Result<u64> {
    if !(horizon >= 0.0) {
        return Err(Error::Domain(format!("horizon must be >= 0, got {horizon}")));
    }
    let mut n: u64 = 0;
    let mut clock = 0.0;
    loop {
        let up = if n == 0 { params.alpha } else { n as f64 * params.lambda };
        let down = n as f64 * params.mu;
        let total = up + down;
        if total == 0.0 {
            return Ok(n);
        }
        clock += -open01(rng).ln() / total;
        if clock > horizon {
            return Ok(n);
        }
        if rng.random::<f64>() * total < up {
            n += 1;
            if n > RUNAWAY_LIMIT {
                return Err(Error::Runaway { limit: RUNAWAY_LIMIT });
            }
        } else {
            n -= 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub horizon: f64,
    pub replicas: u64,
    pub master_seed: u64,
    pub state_cap: usize,
}

impl SimConfig {
    pub fn new(params: ModelParams, horizon: f64, replicas: u64, master_seed: u64) -> Result<Self> {
        let c = Self {
            params,
            horizon,
            replicas,
            master_seed,
            state_cap: DEFAULT_STATE_CAP,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Parameter("replicas must be >= 1".into()));
        }
        if self.state_cap == 0 {
            return Err(Error::Parameter("state_cap must be >= 1".into()));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::Domain(format!(
                "horizon must be finite and >= 0, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Histogram of simulated states `0..=state_cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub probs: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub replicas: u64,
    /// Fraction of replicas that ended above `state_cap`.
    pub overflow_mass: f64,
    pub master_seed: u64,
}

impl EmpiricalPmf {
    fn from_counts(counts: &[u64], overflow: u64, replicas: u64, master_seed: u64) -> Self {
        let r = replicas as f64;
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / r).collect();
        let std_errors = probs.iter().map(|p| (p * (1.0 - p) / r).sqrt()).collect();
        Self {
            probs,
            std_errors,
            replicas,
            overflow_mass: overflow as f64 / r,
            master_seed,
        }
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

fn replica_rngs(master_seed: u64, i: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut clock = ChaCha8Rng::seed_from_u64(master_seed);
    clock.set_stream(2 * i);
    let mut walk = ChaCha8Rng::seed_from_u64(master_seed);
    walk.set_stream(2 * i + 1);
    (clock, walk)
}

/// One replica of `N(L_ν(t))`.
pub fn sample_replica(config: &SimConfig, i: u64) -> Result<u64> {
    let (mut clock, mut walk) = replica_rngs(config.master_seed, i);
    let nu = config.params.nu;
    let time = if nu.is_classical() {
        config.horizon
    } else {
        let pair = (open01(&mut clock), open01(&mut clock));
        sample_inverse_subordinator(nu, config.horizon, pair)?
    };
    simulate_lbdpwi(&config.params, time, &mut walk)
}

struct Tally {
    counts: Vec<u64>,
    overflow: u64,
    first_error: Option<(u64, Error)>,
}

impl Tally {
    fn new(cap: usize) -> Self {
        Self {
            counts: vec![0; cap + 1],
            overflow: 0,
            first_error: None,
        }
    }

    fn record(mut self, i: u64, outcome: Result<u64>) -> Self {
        match outcome {
            Ok(n) => match self.counts.get_mut(n as usize) {
                Some(c) => *c += 1,
                None => self.overflow += 1,
            },
            Err(e) => {
                if self.first_error.as_ref().is_none_or(|(j, _)| i < *j) {
                    self.first_error = Some((i, e));
                }
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self.first_error = match (self.first_error, other.first_error) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Empirical pmf over `config.replicas` replicas, on the global rayon pool.
///
/// The first failing replica (by index) determines the reported error.
pub fn empirical_pmf(config: &SimConfig) -> Result<EmpiricalPmf> {
    config.validate()?;
    let cap = config.state_cap;
    let tally = (0..config.replicas)
        .into_par_iter()
        .fold(|| Tally::new(cap), |t, i| t.record(i, sample_replica(config, i)))
        .reduce(|| Tally::new(cap), Tally::merge);
    if let Some((_, e)) = tally.first_error {
        return Err(e);
    }
    Ok(EmpiricalPmf::from_counts(
        &tally.counts,
        tally.overflow,
        config.replicas,
        config.master_seed,
    ))
}

/// As [`empirical_pmf`], on a dedicated pool of `threads` workers.
pub fn empirical_pmf_with_threads(config: &SimConfig, threads: usize) -> Result<EmpiricalPmf> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    pool.install(|| empirical_pmf(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    #[test]
    fn stable_is_positive() {
        for &u1 in &[1e-9, 0.2, 0.5, 0.9, 1.0 - 1e-9] {
            for &u2 in &[1e-9, 0.3, 1.0 - 1e-9] {
                for v in [0.1, 0.5, 0.95] {
                    assert!(sample_stable(nu(v), (u1, u2)).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn stable_rejects_bad_input() {
        assert!(sample_stable(FracOrder::ONE, (0.5, 0.5)).is_err());
        assert!(sample_stable(nu(0.5), (0.0, 0.5)).is_err());
        assert!(sample_stable(nu(0.5), (0.5, 1.0)).is_err());
    }

    // ν = 1/2 has the closed form S = 1/(4G²) with G standard normal, so
    // Kanter's map can be checked against it through its distribution function
    #[test]
    fn half_stable_distribution_function() {
        // P(S ≤ s) = erfc(1/(2√s)); compare on a grid of s via a fine u-sweep
        let mut samples = Vec::new();
        let m = 400;
        for i in 0..m {
            for j in 0..m {
                let pair = ((i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64);
                samples.push(sample_stable(nu(0.5), pair).unwrap());
            }
        }
        samples.sort_by(f64::total_cmp);
        let median = samples[samples.len() / 2];
        // erfc(x) = 1/2 at x = 0.476936..., so median S = 1/(4·0.476936²)
        let want = 1.0 / (4.0 * 0.476_936_276_204_470_f64.powi(2));
        assert!((median / want - 1.0).abs() < 0.01, "{median} vs {want}");
    }

    #[test]
    fn inverse_subordinator_edges() {
        assert_eq!(sample_inverse_subordinator(nu(0.6), 0.0, (0.3, 0.3)).unwrap(), 0.0);
        assert_eq!(
            sample_inverse_subordinator(FracOrder::ONE, 0.7, (0.3, 0.3)).unwrap(),
            0.7
        );
        assert!(sample_inverse_subordinator(nu(0.6), -1.0, (0.3, 0.3)).is_err());
    }

    #[test]
    fn walk_at_zero_horizon() {
        let p = ModelParams::equal_rates(1.0, FracOrder::ONE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(simulate_lbdpwi(&p, 0.0, &mut rng).unwrap(), 0);
    }

    #[test]
    fn runaway_guard() {
        let p = ModelParams::new(1.0, 100.0, 0.0, FracOrder::ONE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            simulate_lbdpwi(&p, 5.0, &mut rng).unwrap_err(),
            Error::Runaway { limit: RUNAWAY_LIMIT }
        );
    }

    #[test]
    fn single_replica_is_one_hot() {
        let p = ModelParams::equal_rates(1.0, nu(0.7)).unwrap();
        let cfg = SimConfig::new(p, 0.5, 1, 99).unwrap();
        let e = empirical_pmf(&cfg).unwrap();
        let ones = e.probs.iter().filter(|&&x| x == 1.0).count();
        assert_eq!(ones + (e.overflow_mass == 1.0) as usize, 1);
    }

    #[test]
    fn config_validation() {
        let p = ModelParams::equal_rates(1.0, FracOrder::ONE).unwrap();
        assert!(SimConfig::new(p, 0.5, 0, 1).is_err());
        assert!(SimConfig::new(p, -0.5, 10, 1).is_err());
        let mut c = SimConfig::new(p, 0.5, 10, 1).unwrap();
        c.state_cap = 0;
        assert!(empirical_pmf(&c).is_err());
    }
}
