//! Invariant suites behind `fracbdi verify`.

use fracbdi::adm::{coeff_table_equal_rates, AdmSolver, ModelParams};
use fracbdi::birth::{laplace_state, pgf_laplace, pmf_closed, BirthParams};
use fracbdi::death::{pmf_death, DeathParams};
use fracbdi::mc::{empirical_pmf, SimConfig};
use fracbdi::ode::{integrate_classical, laplace_quadrature, OdeConfig};
use fracbdi::special::FracOrder;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::CliResult;
use crate::run::Run;
use crate::table::{fmt_float, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Coeffs,
    Regularity,
    Oracles,
    Laplace,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Coeffs => "coeffs",
            Suite::Regularity => "regularity",
            Suite::Oracles => "oracles",
            Suite::Laplace => "laplace",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Suite::Coeffs,
            Suite::Regularity,
            Suite::Oracles,
            Suite::Laplace,
            Suite::All,
        ]
        .into_iter()
        .find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub passed: bool,
}

pub fn report(checks: &[Check]) -> Table {
    let mut t = Table::new(&["suite", "check", "expected", "actual", "tolerance", "passed"]);
    for c in checks {
        t.push(vec![
            c.suite.into(),
            c.name.as_str().into(),
            c.expected.as_str().into(),
            c.actual.as_str().into(),
            c.tolerance.as_str().into(),
            if c.passed { "true" } else { "false" }.into(),
        ]);
    }
    t
}

const TRIANGLE: [&[u64]; 9] = [
    &[1],
    &[1, 1],
    &[2, 3, 1],
    &[5, 10, 7, 2],
    &[15, 39, 44, 26, 6],
    &[54, 181, 293, 268, 126, 24],
    &[235, 1002, 2157, 2698, 1932, 744, 120],
    &[1237, 6553, 17724, 28230, 27270, 15888, 5160, 720],
    &[7790, 49791, 162139, 313908, 382290, 298920, 146400, 41040, 5040],
];

struct Checks {
    suite: &'static str,
    out: Vec<Check>,
}

impl Checks {
    fn exact(&mut self, name: String, expected: String, actual: String) {
        let passed = expected == actual;
        self.out.push(Check {
            suite: self.suite,
            name,
            expected,
            actual,
            tolerance: "exact".into(),
            passed,
        });
    }

    fn within(&mut self, name: String, expected: f64, actual: fracbdi::Result<f64>, tol: f64) {
        let (actual, passed) = match actual {
            Ok(x) => (fmt_float(x), (x - expected).abs() <= tol),
            Err(e) => (e.to_string(), false),
        };
        self.out.push(Check {
            suite: self.suite,
            name,
            expected: fmt_float(expected),
            actual,
            tolerance: fmt_float(tol),
            passed,
        });
    }

    fn below(&mut self, name: String, actual: fracbdi::Result<f64>, limit: f64) {
        let (actual, passed) = match actual {
            Ok(x) => (fmt_float(x), x <= limit),
            Err(e) => (e.to_string(), false),
        };
        self.out.push(Check {
            suite: self.suite,
            name,
            expected: "0".into(),
            actual,
            tolerance: fmt_float(limit),
            passed,
        });
    }
}

fn join(row: impl Iterator<Item = String>) -> String {
    row.collect::<Vec<_>>().join(" ")
}

fn coeffs(c: &mut Checks) -> CliResult<()> {
    let table = coeff_table_equal_rates(50)?;
    for (k, row) in TRIANGLE.iter().enumerate() {
        c.exact(
            format!("row {k}"),
            join(row.iter().map(u64::to_string)),
            join((0..=k).map(|n| table.exact(n, k).unwrap().to_string())),
        );
    }
    for k in 2..=50 {
        let mut sum = BigInt::zero();
        for n in 0..=k {
            let v = BigInt::from(table.exact(n, k).unwrap());
            if (k - n) % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        c.exact(format!("alternating sum of row {k}"), "0".into(), sum.to_string());
    }
    let mut factorial = BigUint::one();
    for k in 1..=20usize {
        if k > 1 {
            factorial *= k - 1;
        }
        c.exact(
            format!("c[{k},{k}] = ({k}-1)!"),
            factorial.to_string(),
            table.exact(k, k).unwrap().to_string(),
        );
    }
    let solver = AdmSolver::new(ModelParams::equal_rates(1.0, FracOrder::ONE)?, 20)?;
    for k in 0..=20 {
        for n in k + 1..=20 {
            c.exact(
                format!("p_{k}({n}, 1) vanishes"),
                fmt_float(0.0),
                fmt_float(solver.component(n, k, 1.0)?),
            );
        }
    }
    Ok(())
}

fn regularity(c: &mut Checks, run: &Run) -> CliResult<()> {
    let params = ModelParams::new(run.alpha, run.lambda, run.mu, FracOrder::new(run.nu)?)?;
    let solver = AdmSolver::new(params, run.order)?;
    for &t in &run.times {
        c.below(
            format!("defect at t={t}, K={}, n_max={}", run.order, run.n_max),
            solver.pmf(t, run.n_max).map(|p| p.regularity_defect),
            1e-8,
        );
    }
    Ok(())
}

fn oracles(c: &mut Checks, run: &Run) -> CliResult<()> {
    let classical = ModelParams::new(run.alpha, run.lambda, run.mu, FracOrder::ONE)?;
    let solver = AdmSolver::new(classical, run.order)?;
    let death = DeathParams::new(run.alpha, run.mu, FracOrder::new(run.nu)?)?;
    let death_chain = ModelParams::new(run.alpha, 0.0, run.mu, death.nu)?;
    for &t in &run.times {
        let ode = integrate_classical(&classical, &OdeConfig::with_step(100, 1e-4, t)?)?;
        for n in 0..=run.n_max.min(100) {
            c.within(
                format!("ADM vs ODE p({n}, {t})"),
                ode.pmf.probs[n],
                solver.state_probability(n, t).map(|s| s.value),
                1e-6,
            );
        }
        let emp = empirical_pmf(&SimConfig::new(classical, t, run.replicas, run.seed)?)?;
        for n in 0..=run.n_max.min(8) {
            let q = ode.pmf.probs[n];
            let sigma = (q * (1.0 - q) / run.replicas as f64).sqrt();
            c.within(format!("MC vs ODE p({n}, {t})"), q, Ok(emp.probs[n]), 3.0 * sigma);
        }
        let emp = empirical_pmf(&SimConfig::new(death_chain, t, run.replicas, run.seed)?)?;
        let (_, p1) = pmf_death(t, &death)?;
        let sigma = (p1 * (1.0 - p1) / run.replicas as f64).sqrt();
        c.within(format!("MC vs death p1 at t={t}"), p1, Ok(emp.probs[1]), 3.0 * sigma);
    }
    Ok(())
}

fn laplace(c: &mut Checks, run: &Run) -> CliResult<()> {
    let nu = FracOrder::new(run.nu)?;
    // the second set resonates at k = 2
    let sets = [
        BirthParams::new(run.alpha, run.lambda, nu)?,
        BirthParams::new(2.0 * run.lambda, run.lambda, nu)?,
    ];
    for p in &sets {
        for z in [1.0f64, 2.0] {
            let tol = 1e-8;
            let t_max = -(tol * z).ln() / z;
            for n in 0..=4 {
                let lhs = laplace_quadrature(|t| pmf_closed(n, t, p).unwrap_or(f64::NAN), z, t_max, tol);
                c.within(
                    format!("transform of p({n}) at z={z}, alpha={}, lambda={}", p.alpha, p.lambda),
                    laplace_state(n, z, p)?,
                    lhs,
                    1e-4,
                );
            }
            c.within(format!("pgf at u=1, z={z}"), 1.0 / z, pgf_laplace(1.0, z, p), 1e-6);
        }
    }
    Ok(())
}

pub fn run_suite(suite: Suite, run: &Run) -> CliResult<Vec<Check>> {
    let all = [Suite::Coeffs, Suite::Regularity, Suite::Oracles, Suite::Laplace];
    let suites: &[Suite] = if suite == Suite::All {
        &all
    } else {
        std::slice::from_ref(&suite)
    };
    let mut out = Vec::new();
    for &s in suites {
        let mut c = Checks {
            suite: s.name(),
            out: Vec::new(),
        };
        match s {
            Suite::Coeffs => coeffs(&mut c)?,
            Suite::Regularity => regularity(&mut c, run)?,
            Suite::Oracles => oracles(&mut c, run)?,
            Suite::Laplace => laplace(&mut c, run)?,
            Suite::All => unreachable!(),
        }
        out.extend(c.out);
    }
    Ok(out)
}
