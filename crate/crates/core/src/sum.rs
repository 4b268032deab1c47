//! Compensated summation.
//!
//! Criterion slacks near equality are differences of sums that agree to many
//! digits, so every partial sum in the crate goes through [`NeumaierSum`].

/// Kahan–Babuška (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        // The compensation is NaN once an infinite term has been added.
        if self.sum.is_infinite() {
            self.sum
        } else {
            self.sum + self.comp
        }
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = NeumaierSum::new();
    acc.extend(iter);
    acc.value()
}

/// Running compensated sums: `out[i] = values[0] + ... + values[i]`.
pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = NeumaierSum::new();
    values
        .iter()
        .map(|&v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}

/// Running compensated suffix sums: `out[i] = values[i] + ... + values[last]`.
pub fn suffix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let mut acc = NeumaierSum::new();
    for (slot, &v) in out.iter_mut().zip(values).rev() {
        acc.add(v);
        *slot = acc.value();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_terms() {
        assert_eq!(sum([1.0, f64::INFINITY, 2.0]), f64::INFINITY);
        assert_eq!(sum([-1.0, f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn harmonic_prefix_matches_reverse_order() {
        let terms: Vec<f64> = (1..=100_000).map(|k| 1.0 / k as f64).collect();
        let forward = *prefix_sums(&terms).last().unwrap();
        let backward = suffix_sums(&terms)[0];
        assert!((forward - backward).abs() <= 1e-15 * forward);
    }
}
