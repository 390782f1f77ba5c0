// SPDX-License-Identifier: Apache-2.0

//! Small numeric helpers shared across modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum(a.iter().zip(b).map(|(x, y)| x * y))
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// SplitMix64 finaliser. Used to derive independent child seeds from a
/// master seed and a tuple of counters.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(master), |acc, &p| mix64(acc ^ mix64(p)))
}

/// Uniform value in [-0.5, 0.5) from a hashed counter.
pub(crate) fn hash_unit(a: u64, b: u64) -> f64 {
    let h = derive_seed(a, &[b]);
    (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1.0e16, 1.0, -1.0e16];
        values.extend(std::iter::repeat_n(1.0, 10));
        assert_eq!(sum(values), 11.0);
    }

    #[test]
    fn derived_seeds_differ_by_path() {
        assert_ne!(derive_seed(0, &[1, 2]), derive_seed(0, &[2, 1]));
        assert_eq!(derive_seed(7, &[3]), derive_seed(7, &[3]));
    }
}
