//! Small floating-point helpers shared across the crate.

/// Compensated (Kahan) accumulator.
///
/// Used wherever a long series of rate terms is summed and the result is
/// later compared against a closed-form product at tight tolerance; plain
/// left-to-right summation drifts by more than 1e-12 over 10^4 terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// log(Σ exp(x_i)) with the maximum subtracted before exponentiation.
///
/// Returns -inf for an empty slice or when every entry is -inf.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_matches_product_for_repeated_constant() {
        let mut s = KahanSum::new();
        for _ in 0..10_000 {
            s.add(0.01);
        }
        assert!((s.value() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_large_negative_inputs() {
        // Direct exponentiation of these underflows to zero.
        let v = [-1000.0, -1000.0 + (2.0f64).ln()];
        let expected = -1000.0 + (3.0f64).ln();
        assert!((log_sum_exp(&v) - expected).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_of_zeros_is_ln_n() {
        let v = [0.0; 5];
        assert!((log_sum_exp(&v) - (5.0f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_empty_is_neg_infinity() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
