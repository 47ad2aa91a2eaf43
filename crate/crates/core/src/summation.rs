//! Compensated (Neumaier) summation with cancellation tracking.
//!
//! Every alternating series in this crate is accumulated through
//! [`CompensatedSum`], which also records the largest partial-sum magnitude
//! seen so that callers can report how much precision cancellation cost.

/// Running Kahan-Babuska-Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    max_partial: f64,
    abs_total: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
        self.abs_total += term.abs();
        let partial = (self.sum + self.compensation).abs();
        if partial > self.max_partial {
            self.max_partial = partial;
        }
        if term.abs() > self.max_partial {
            // a single huge term is as damaging as a huge partial sum
            self.max_partial = term.abs();
        }
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Largest magnitude reached by any partial sum (or single term).
    pub fn max_partial(&self) -> f64 {
        self.max_partial
    }

    /// Sum of the magnitudes of all terms added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs_total
    }

    /// `max_partial * f64::EPSILON`: the precision lost to cancellation.
    pub fn cancellation_estimate(&self) -> f64 {
        self.max_partial * f64::EPSILON
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value()
}
