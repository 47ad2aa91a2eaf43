//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl QuadConfig {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Self::default()
        }
    }
}

/// Value of an integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = (fc * WGK[7]).abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let mut error = ((kron - gauss) * half).abs();
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Segment {
        a,
        b,
        value,
        error,
        abs_value: abs_k * half.abs(),
    }
}

/// Integrate `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error meets `max(abs_tol, rel_tol * |I|)`, or the round-off floor of the
/// accumulated sum is reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadEstimate> {
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.abs_value;
    heap.push(first);

    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        let floor = 50.0 * f64::EPSILON * total_abs;
        if total_err <= target || total_err <= floor {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::NonConvergence {
                estimate: total,
                achieved: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval cannot be split further in floating point
            heap.push(Segment { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        // recompute from scratch occasionally to avoid drift in the running sums
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_abs = heap.iter().map(|s| s.abs_value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        } else {
            total_err += left.error + right.error - worst.error;
        }
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                estimate: total,
                achieved: f64::INFINITY,
            });
        }
    }
    let value: f64 = {
        let mut segs: Vec<f64> = heap.iter().map(|s| s.value).collect();
        segs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
        crate::summation::compensated_sum(&segs)
    };
    Ok(QuadEstimate {
        value,
        abs_error: total_err.max(0.0),
        intervals: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadConfig::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
        let r = integrate(|x| x.powi(6), -1.0, 1.0, QuadConfig::default()).unwrap();
        assert!((r.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, QuadConfig::relative(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn resolves_narrow_peak() {
        // Lorentzian of width 1e-4 centred at 0.3
        let w = 1e-4;
        let f = |x: f64| w / ((x - 0.3) * (x - 0.3) + w * w);
        let exact = (0.7f64 / w).atan() + (0.3f64 / w).atan();
        let r = integrate(f, 0.0, 1.0, QuadConfig::relative(1e-12)).unwrap();
        assert!((r.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(|x| x.exp(), 1.0, 0.0, QuadConfig::default()).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadConfig {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, cfg).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
