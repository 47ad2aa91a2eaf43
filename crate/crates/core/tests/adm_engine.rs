use fracbdi::adm::{
    coeff_table_equal_rates, coeff_table_general, mean, pmf, second_factorial_moment, series_component,
    state_probability, variance, AdmSolver, ModelParams,
};
use fracbdi::mc::{empirical_pmf, SimConfig};
use fracbdi::ode::{integrate_classical, OdeConfig};
use fracbdi::special::{gamma, FracOrder};
use fracbdi::Error;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

fn nu(v: f64) -> FracOrder {
    FracOrder::new(v).unwrap()
}

fn equal(v: f64) -> ModelParams {
    ModelParams::equal_rates(1.0, nu(v)).unwrap()
}

fn ode_pmf(t: f64) -> Vec<f64> {
    let p = equal(1.0);
    integrate_classical(&p, &OdeConfig::with_step(100, 1e-4, t).unwrap())
        .unwrap()
        .pmf
        .probs
}

fn ode_moments(t: f64) -> (f64, f64, f64) {
    let probs = ode_pmf(t);
    let m: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let f2: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
        .sum();
    let var: f64 = probs.iter().enumerate().map(|(n, p)| (n as f64 - m).powi(2) * p).sum();
    (m, f2, var)
}

#[test]
fn triangle_rows() {
    let t = coeff_table_equal_rates(3).unwrap();
    let rows: Vec<Vec<u64>> = t
        .exact_rows()
        .iter()
        .map(|r| r.iter().map(|c| c.to_u64().unwrap()).collect())
        .collect();
    assert_eq!(rows, vec![vec![1], vec![1, 1], vec![2, 3, 1], vec![5, 10, 7, 2]]);

    let t = coeff_table_equal_rates(8).unwrap();
    let row8: Vec<u64> = t.exact_rows()[8].iter().map(|c| c.to_u64().unwrap()).collect();
    assert_eq!(row8, [7790, 49791, 162139, 313908, 382290, 298920, 146400, 41040, 5040]);

    let t = coeff_table_equal_rates(12).unwrap();
    assert_eq!(t.exact(12, 12).unwrap(), BigUint::from(39_916_800u32));
}

#[test]
fn general_coefficients_match_closed_expressions() {
    let (a, l, m) = (0.7, 1.3, 0.4);
    let p = ModelParams::new(a, l, m, nu(0.5)).unwrap();
    let t = coeff_table_general(&p, 4).unwrap();
    let rel = |x: f64, y: f64| ((x - y) / y).abs();
    assert!(rel(t.general(0, 2).unwrap(), a * (a + m)) < 1e-14);
    let c13 = a * (a * a + a * l + 2.0 * a * m + 2.0 * l * m + (l + m).powi(2));
    assert!(rel(t.general(1, 3).unwrap(), c13) < 1e-14);
}

#[test]
fn general_table_reduces_to_triangle() {
    let p = equal(0.5);
    let g = coeff_table_general(&p, 8).unwrap();
    let e = coeff_table_equal_rates(8).unwrap();
    for k in 0..=8 {
        for n in 0..=k {
            let c = e.exact(n, k).unwrap().to_f64().unwrap();
            let signed = if (k - n) % 2 == 0 { c } else { -c };
            assert_eq!(g.general(n, k).unwrap(), signed, "n={n} k={k}");
        }
    }
}

#[test]
fn component_examples() {
    let p = ModelParams::new(0.8, 1.1, 0.6, nu(0.7)).unwrap();
    let t = 0.9f64;
    let want = 0.8 * t.powf(0.7) / gamma(1.7);
    assert!((series_component(1, 1, &p, t).unwrap() - want).abs() < 1e-15);
    assert_eq!(series_component(5, 3, &p, t).unwrap(), 0.0);

    let (a, l, m) = (0.8, 1.1, 0.6);
    let p = ModelParams::new(a, l, m, FracOrder::ONE).unwrap();
    let c04 =
        a * (a.powi(3) + 3.0 * a * a * m + 2.0 * a * l * m + 3.0 * a * m * m + 2.0 * l * m * m + (l + m).powi(2) * m);
    let got = series_component(0, 4, &p, 1.0).unwrap();
    assert!((got - c04 / 24.0).abs() < 1e-14 * c04);
}

#[test]
fn initial_condition() {
    for v in [0.3, 0.7, 1.0] {
        let p = ModelParams::new(0.5, 2.0, 1.0, nu(v)).unwrap();
        assert_eq!(state_probability(0, 0.0, &p, 60).unwrap().value, 1.0);
        assert_eq!(state_probability(4, 0.0, &p, 60).unwrap().value, 0.0);
        let pm = pmf(0.0, &p, 60, 10).unwrap();
        assert_eq!(pm.probs[0], 1.0);
        assert_eq!(pm.regularity_defect, 0.0);
    }
    let p = equal(0.6);
    assert_eq!(mean(0.0, &p, 60).unwrap().value, 0.0);
    assert_eq!(second_factorial_moment(0.0, &p, 60).unwrap().value, 0.0);
    assert_eq!(variance(0.0, &p, 60).unwrap().value, 0.0);
}

#[test]
fn extinction_probability_against_ode() {
    let s = state_probability(0, 0.5, &equal(1.0), 60).unwrap();
    assert!((s.value - ode_pmf(0.5)[0]).abs() < 1e-6);
}

#[test]
fn state_probability_against_monte_carlo() {
    let params = equal(0.5);
    let cfg = SimConfig::new(params, 0.4, 100_000, 11).unwrap();
    let emp = empirical_pmf(&cfg).unwrap();
    let s = state_probability(2, 0.4, &params, 60).unwrap();
    assert!((s.value - emp.probs[2]).abs() <= 3.0 * emp.std_errors[2]);
}

#[test]
fn regularity_at_fractional_order() {
    let p = pmf(0.6, &equal(0.75), 60, 30).unwrap();
    assert!(p.regularity_defect < 1e-8, "{}", p.regularity_defect);
}

#[test]
fn pmf_against_ode_at_unit_time() {
    let p = pmf(1.0, &equal(1.0), 60, 20).unwrap();
    let ode = ode_pmf(1.0);
    for (n, (a, b)) in p.probs.iter().zip(&ode).enumerate() {
        assert!((a - b).abs() < 1e-6, "n={n}: {a} vs {b}");
    }
}

#[test]
fn classical_moments_against_ode() {
    let p = equal(1.0);
    let (m, f2, var) = ode_moments(0.5);
    assert!((mean(0.5, &p, 60).unwrap().value - m).abs() < 1e-6);
    assert!((second_factorial_moment(0.5, &p, 60).unwrap().value - f2).abs() < 1e-6);
    assert!((variance(0.5, &p, 60).unwrap().value - var).abs() < 1e-6);
}

fn pmf_moments(v: f64, t: f64) -> ((f64, f64), (f64, f64)) {
    let p = pmf(t, &equal(v), 60, 60).unwrap();
    let mut m = (0.0, 0.0);
    let mut f2 = (0.0, 0.0);
    for (n, (x, e)) in p.probs.iter().zip(&p.per_state_error).enumerate() {
        let n = n as f64;
        m = (m.0 + n * x, m.1 + n * e);
        f2 = (f2.0 + n * (n - 1.0) * x, f2.1 + n * (n - 1.0) * e);
    }
    (m, f2)
}

#[test]
fn fractional_mean_against_pmf() {
    let s = mean(0.4, &equal(0.5), 60).unwrap();
    let ((m, err), _) = pmf_moments(0.5, 0.4);
    assert!((s.value - m).abs() <= s.error_bound() + err);
}

#[test]
fn fractional_second_moment_against_pmf() {
    let s = second_factorial_moment(0.6, &equal(0.75), 60).unwrap();
    let (_, (f2, err)) = pmf_moments(0.75, 0.6);
    assert!((s.value - f2).abs() <= s.error_bound() + err);
}

#[test]
fn variance_identity_holds_in_floating_point() {
    for v in [0.8, 0.9, 1.0] {
        for t in [0.1, 0.2, 0.3] {
            let p = equal(v);
            let m = mean(t, &p, 40).unwrap().value;
            let f2 = second_factorial_moment(t, &p, 40).unwrap().value;
            let var = variance(t, &p, 40).unwrap().value;
            assert!((var - (f2 + m - m * m)).abs() <= 1e-12 * var.abs());
        }
    }
}

#[test]
fn general_rate_moments_are_refused() {
    let p = ModelParams::new(1.0, 2.0, 1.0, nu(0.5)).unwrap();
    assert!(matches!(mean(0.3, &p, 60), Err(Error::Parameter(_))));
    assert!(matches!(second_factorial_moment(0.3, &p, 60), Err(Error::Parameter(_))));
    assert!(matches!(variance(0.3, &p, 60), Err(Error::Parameter(_))));
}

#[test]
fn accuracy_loss_is_reported_not_hidden() {
    match state_probability(0, 0.5, &equal(0.7), 60) {
        Err(Error::AccuracyLoss {
            estimate, threshold, ..
        }) => assert!(estimate > threshold),
        other => panic!("expected accuracy loss, got {other:?}"),
    }
}

// Σ_{n≤K} p_K(n,t) = 1 exactly when n_max = K (row sums vanish), so the
// meaningful monotonicity check truncates the state space below K.
#[test]
fn defect_grows_with_time() {
    let solver = AdmSolver::new(equal(1.0), 20).unwrap();
    for n_max in [3, 20] {
        let defects: Vec<f64> = [0.4, 0.6, 0.8, 0.9, 1.0]
            .iter()
            .map(|&t| solver.pmf(t, n_max).unwrap().regularity_defect)
            .collect();
        for w in defects.windows(2) {
            assert!(w[0] <= w[1] + 1e-12, "n_max={n_max}: {defects:?}");
        }
    }
}

#[test]
fn general_table_overflow_names_the_entry() {
    let p = ModelParams::new(1e200, 1e200, 1e200, FracOrder::ONE).unwrap();
    assert!(matches!(coeff_table_general(&p, 5), Err(Error::Overflow { .. })));
}
