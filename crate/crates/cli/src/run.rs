//! A fully resolved invocation and the tables it produces.

use std::collections::BTreeMap;

use fracbdi::adm::{coeff_table_equal_rates, AdmSolver, ModelParams};
use fracbdi::birth::{mean_birth, pmf_closed, second_factorial_moment_birth, variance_birth, BirthParams};
use fracbdi::death::{pmf_death, DeathParams};
use fracbdi::mc::{empirical_pmf, SimConfig};
use fracbdi::special::FracOrder;

use crate::error::{CliError, CliResult};
use crate::grid::{format_grid, parse_grid};
use crate::manifest::{ManifestParams, RunManifest, TOOL_VERSION};
use crate::table::{Cell, Format, Table};
use crate::verify::{self, Suite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Variant {
    /// Birth, death and immigration at extinction.
    #[default]
    Tflbdpwi,
    /// Pure birth with immigration (mu = 0).
    Tflbpwi,
    /// Two-state death with immigration (lambda = 0).
    Tfldpwi,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Tflbdpwi => "tflbdpwi",
            Variant::Tflbpwi => "tflbpwi",
            Variant::Tfldpwi => "tfldpwi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Variant::Tflbdpwi, Variant::Tflbpwi, Variant::Tfldpwi]
            .into_iter()
            .find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Pmf,
    Components,
    Moments,
    Simulate,
    Verify(Suite),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Pmf => "pmf",
            Command::Components => "components",
            Command::Moments => "moments",
            Command::Simulate => "simulate",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub command: Command,
    pub variant: Variant,
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub times: Vec<f64>,
    pub order: usize,
    pub n_max: usize,
    pub replicas: u64,
    pub seed: u64,
    pub state_cap: usize,
    pub format: Format,
    pub out: Option<String>,
}

/// Table plus, for `verify`, a description of the first failed check.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<String>,
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn option<'a>(m: &'a BTreeMap<String, String>, key: &str) -> CliResult<&'a str> {
    m.get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::Usage(format!("manifest lacks option {key:?}")))
}

fn number<T: std::str::FromStr>(m: &BTreeMap<String, String>, key: &str) -> CliResult<T> {
    let s = option(m, key)?;
    s.parse()
        .map_err(|_| CliError::Usage(format!("manifest option {key} = {s:?} is not a number")))
}

impl Run {
    /// The effective rates: the birth variant has no deaths, the death variant
    /// no births.
    pub fn rates(&self) -> (f64, f64, f64) {
        match (self.command, self.variant) {
            (Command::Pmf | Command::Moments, Variant::Tflbpwi) => (self.alpha, self.lambda, 0.0),
            (Command::Pmf | Command::Moments, Variant::Tfldpwi) => (self.alpha, 0.0, self.mu),
            _ => (self.alpha, self.lambda, self.mu),
        }
    }

    fn order_param(&self) -> CliResult<FracOrder> {
        FracOrder::new(self.nu).map_err(CliError::from)
    }

    fn model(&self) -> CliResult<ModelParams> {
        let (a, l, m) = self.rates();
        Ok(ModelParams::new(a, l, m, self.order_param()?)?)
    }

    pub fn options(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("format".into(), self.format.name().into());
        m.insert("t".into(), format_grid(&self.times));
        m.insert("order".into(), self.order.to_string());
        m.insert("nmax".into(), self.n_max.to_string());
        m.insert("variant".into(), self.variant.name().into());
        m.insert("replicas".into(), self.replicas.to_string());
        m.insert("state_cap".into(), self.state_cap.to_string());
        if let Command::Verify(s) = self.command {
            m.insert("suite".into(), s.name().into());
        }
        m
    }

    pub fn manifest(&self, output_path: &str) -> RunManifest {
        let (alpha, lambda, mu) = self.rates();
        RunManifest {
            subcommand: self.command.name().into(),
            params: ManifestParams {
                alpha,
                lambda,
                mu,
                nu: self.nu,
            },
            options: self.options(),
            output_path: output_path.into(),
            tool_version: TOOL_VERSION.into(),
            master_seed: Some(self.seed),
        }
    }

    pub fn from_manifest(m: &RunManifest) -> CliResult<Self> {
        let o = &m.options;
        let command = match m.subcommand.as_str() {
            "coeffs" => Command::Coeffs,
            "pmf" => Command::Pmf,
            "components" => Command::Components,
            "moments" => Command::Moments,
            "simulate" => Command::Simulate,
            "verify" => {
                let s = option(o, "suite")?;
                Command::Verify(Suite::parse(s).ok_or_else(|| CliError::Usage(format!("unknown suite {s:?}")))?)
            }
            other => return usage(format!("unknown subcommand {other:?} in manifest")),
        };
        let variant = option(o, "variant")?;
        let format = option(o, "format")?;
        Ok(Run {
            command,
            variant: Variant::parse(variant).ok_or_else(|| CliError::Usage(format!("unknown variant {variant:?}")))?,
            alpha: m.params.alpha,
            lambda: m.params.lambda,
            mu: m.params.mu,
            nu: m.params.nu,
            times: parse_grid(option(o, "t")?).map_err(|e| CliError::Usage(e.to_string()))?,
            order: number(o, "order")?,
            n_max: number(o, "nmax")?,
            replicas: number(o, "replicas")?,
            seed: m.master_seed.unwrap_or(0),
            state_cap: number(o, "state_cap")?,
            format: Format::parse(format).ok_or_else(|| CliError::Usage(format!("unknown format {format:?}")))?,
            out: Some(m.output_path.clone()),
        })
    }

    pub fn execute(&self) -> CliResult<Outcome> {
        let table = match self.command {
            Command::Coeffs => self.coeffs()?,
            Command::Pmf => self.pmf()?,
            Command::Components => self.components()?,
            Command::Moments => self.moments()?,
            Command::Simulate => self.simulate()?,
            Command::Verify(suite) => {
                let checks = verify::run_suite(suite, self)?;
                let failure = checks
                    .iter()
                    .find(|c| !c.passed)
                    .map(|c| format!("{}: {}", c.suite, c.name));
                return Ok(Outcome {
                    table: verify::report(&checks),
                    failure,
                });
            }
        };
        Ok(Outcome { table, failure: None })
    }

    fn coeffs(&self) -> CliResult<Table> {
        let t = coeff_table_equal_rates(self.order)?;
        let mut out = Table::new(&["k", "n", "c", "flag"]);
        for k in 0..=self.order {
            for n in 0..=k {
                let c = t.exact(n, k).expect("entry inside the triangle");
                out.push(vec![k.into(), n.into(), Cell::Big(c.to_string()), "exact".into()]);
            }
        }
        Ok(out)
    }

    fn pmf(&self) -> CliResult<Table> {
        let mut out = Table::new(&["t", "n", "p", "tail", "cancellation", "defect", "flag"]);
        let (a, l, m) = self.rates();
        let nu = self.order_param()?;
        let mut emit = |t: f64, probs: Vec<(f64, f64, f64)>, flag: &str| {
            let defect = (probs.iter().map(|p| p.0).sum::<f64>() - 1.0).abs();
            for (n, (p, tail, cancel)) in probs.into_iter().enumerate() {
                out.push(vec![
                    t.into(),
                    n.into(),
                    p.into(),
                    tail.into(),
                    cancel.into(),
                    defect.into(),
                    flag.into(),
                ]);
            }
        };
        match self.variant {
            Variant::Tflbdpwi => {
                let solver = AdmSolver::new(self.model()?, self.order)?;
                for &t in &self.times {
                    let probs = (0..=self.n_max)
                        .map(|n| {
                            solver
                                .state_probability(n, t)
                                .map(|s| (s.value, s.tail_estimate, s.cancellation_estimate))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    emit(t, probs, "series");
                }
            }
            Variant::Tflbpwi => {
                let p = BirthParams::new(a, l, nu)?;
                for &t in &self.times {
                    let probs = (0..=self.n_max)
                        .map(|n| pmf_closed(n, t, &p).map(|x| (x, 0.0, 0.0)))
                        .collect::<Result<Vec<_>, _>>()?;
                    emit(t, probs, "closed-form");
                }
            }
            Variant::Tfldpwi => {
                let p = DeathParams::new(a, m, nu)?;
                for &t in &self.times {
                    let (p0, p1) = pmf_death(t, &p)?;
                    emit(t, vec![(p0, 0.0, 0.0), (p1, 0.0, 0.0)], "closed-form");
                }
            }
        }
        Ok(out)
    }

    fn components(&self) -> CliResult<Table> {
        let solver = AdmSolver::new(self.model()?, self.order)?;
        let mut out = Table::new(&["n", "t", "k", "component", "flag"]);
        for n in 0..=self.n_max {
            for &t in &self.times {
                for k in 0..=self.order {
                    let c = solver.component(n, k, t)?;
                    let flag = if k < n { "vanishing" } else { "series" };
                    out.push(vec![n.into(), t.into(), k.into(), c.into(), flag.into()]);
                }
            }
        }
        Ok(out)
    }

    fn moments(&self) -> CliResult<Table> {
        let mut out = Table::new(&[
            "t",
            "mean",
            "mean_error",
            "factorial2",
            "factorial2_error",
            "variance",
            "variance_error",
            "flag",
        ]);
        let (a, l, m) = self.rates();
        let nu = self.order_param()?;
        for &t in &self.times {
            let (row, flag) = match self.variant {
                Variant::Tflbdpwi => {
                    let solver = AdmSolver::new(self.model()?, self.order)?;
                    let mean = solver.mean(t)?;
                    let f2 = solver.second_factorial_moment(t)?;
                    let var = solver.variance(t)?;
                    (
                        [
                            mean.value,
                            mean.error_bound(),
                            f2.value,
                            f2.error_bound(),
                            var.value,
                            var.error_bound(),
                        ],
                        "series",
                    )
                }
                Variant::Tflbpwi => {
                    let p = BirthParams::new(a, l, nu)?;
                    (
                        [
                            mean_birth(t, &p)?,
                            0.0,
                            second_factorial_moment_birth(t, &p)?,
                            0.0,
                            variance_birth(t, &p)?,
                            0.0,
                        ],
                        "closed-form",
                    )
                }
                Variant::Tfldpwi => {
                    let (_, p1) = pmf_death(t, &DeathParams::new(a, m, nu)?)?;
                    ([p1, 0.0, 0.0, 0.0, p1 * (1.0 - p1), 0.0], "closed-form")
                }
            };
            let mut cells: Vec<Cell> = vec![t.into()];
            cells.extend(row.iter().map(|&x| Cell::from(x)));
            cells.push(flag.into());
            out.push(cells);
        }
        Ok(out)
    }

    fn simulate(&self) -> CliResult<Table> {
        let [t] = self.times[..] else {
            return usage("simulate takes a single time");
        };
        let mut cfg = SimConfig::new(self.model()?, t, self.replicas, self.seed)?;
        cfg.state_cap = self.state_cap;
        cfg.validate()?;
        let emp = empirical_pmf(&cfg)?;
        let mut out = Table::new(&["state", "p", "std_error", "flag"]);
        for (n, (p, se)) in emp.probs.iter().zip(&emp.std_errors).enumerate() {
            out.push(vec![n.into(), (*p).into(), (*se).into(), "count".into()]);
        }
        let q = emp.overflow_mass;
        let se = (q * (1.0 - q) / emp.replicas as f64).sqrt();
        out.push(vec![
            Cell::Text(format!(">{}", self.state_cap)),
            q.into(),
            se.into(),
            "overflow".into(),
        ]);
        Ok(out)
    }
}
