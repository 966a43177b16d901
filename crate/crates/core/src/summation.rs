//! Compensated summation built on the error-free TwoSum transformation.

/// Returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Running sum that carries the accumulated rounding error separately
/// (cascaded summation, "Sum2"). The result is as accurate as if the
/// sum had been computed in twice the working precision and then rounded.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.err += e;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.err
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
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().total()
}

/// Arithmetic mean with compensated accumulation. `NaN` for an empty input.
pub fn compensated_mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_sum_is_error_free() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn recovers_cancelled_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(v.iter().sum::<f64>(), 1.0);
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn many_small_terms() {
        // 0.1 is not representable; naive accumulation drifts by ~1e-10.
        let total = compensated_sum(std::iter::repeat_n(0.1, 1_000_000));
        assert!((total - 100_000.0).abs() < 1e-9);
        assert_eq!(compensated_mean(&[2.0, 4.0]), 3.0);
        assert!(compensated_mean(&[]).is_nan());
    }

    proptest! {
        #[test]
        fn order_independent(mut v in prop::collection::vec(-1e3f64..1e3, 1..200), seed in any::<u64>()) {
            let forward = compensated_sum(v.iter().copied());
            // deterministic shuffle
            let mut s = seed;
            for i in (1..v.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            let shuffled = compensated_sum(v.iter().copied());
            let scale = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!((forward - shuffled).abs() <= 1e-14 * scale);
        }
    }
}
