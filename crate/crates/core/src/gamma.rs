//! Gamma approximation of the normalized interference coefficient
//!
//! `Z = Σ_k |h_ijk|² |h_ij*k|² / Σ_{i'} Σ_k |h_i'jk|²`
//!
//! seen by the target user `j*` from the beam an RRH `i` sends to another
//! user `j` served by `N` RRHs of `M` antennas each.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use crate::error::{Error, Result};
use crate::params::SeedSpec;

/// Shape `k` and scale `s` of a Gamma law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub k: f64,
    pub s: f64,
}

impl GammaParams {
    pub fn new(k: f64, s: f64) -> Result<Self> {
        if !(k > 0.0 && s > 0.0 && k.is_finite() && s.is_finite()) {
            return Err(Error::domain(format!("invalid Gamma parameters k = {k}, s = {s}")));
        }
        Ok(GammaParams { k, s })
    }

    /// Moment matching: `k = mean² / var`, `s = var / mean`.
    pub fn from_moments(mean: f64, var: f64) -> Result<Self> {
        GammaParams::new(mean * mean / var, var / mean)
    }

    pub fn mean(&self) -> f64 {
        self.k * self.s
    }

    pub fn variance(&self) -> f64 {
        self.k * self.s * self.s
    }

    /// `(1 - j t s)^{-k}` on the principal branch, computed in polar form.
    pub fn cf(&self, t: f64) -> Complex64 {
        cf_gamma(self.k, self.s * t)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        Gamma::new(self.k, 1.0 / self.s).expect("validated parameters").cdf(x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rand_distr::Gamma::new(self.k, self.s)
            .expect("validated parameters")
            .sample(rng)
    }
}

/// `(1 - j y)^{-k}`: modulus `(1 + y²)^{-k/2}`, phase `k atan(y)`.
#[inline]
pub fn cf_gamma(k: f64, y: f64) -> Complex64 {
    let modulus = (-0.5 * k * y.mul_add(y, 1.0).ln()).exp();
    Complex64::from_polar(modulus, k * y.atan())
}

/// The published moment-matched parameters.
///
/// For `N > 1` their mean is `1 / (M N²)`; compare [`exact_ratio_moments`].
///
/// # Panics
///
/// Panics if `m == 0` or `n == 0`.
pub fn gamma_params(m: u32, n: u32) -> GammaParams {
    assert!(m >= 1 && n >= 1, "M and N must be at least 1");
    let (m, n) = (m as f64, n as f64);
    if n == 1.0 {
        let q = m * m + 2.0 * m - 1.0;
        GammaParams { k: q / (2.0 * m), s: 2.0 * m / q }
    } else {
        GammaParams {
            k: (m * n - 1.0) / (3.0 * m * n * (n - 1.0)),
            s: 3.0 * (n - 1.0) / (n * (m * n - 1.0)),
        }
    }
}

/// Exact mean and variance of `Z`.
///
/// The weights `|h_ijk|² / Σ` are one block of a flat Dirichlet vector of
/// length `M N` independent of the numerator factors, so `E[Z] = 1/N` and
/// `E[Z²] = (M + 3) / (N (N M + 1))`.
pub fn exact_ratio_moments(m: u32, n: u32) -> (f64, f64) {
    let (m, n) = (m as f64, n as f64);
    let mean = 1.0 / n;
    let second = (m + 3.0) / (n * (n * m + 1.0));
    (mean, second - mean * mean)
}

/// Where the per-`N` Gamma parameters come from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum GammaModel {
    /// The published closed forms (default).
    #[default]
    Printed,
    /// Moment matching on the exact moments of `Z`.
    ExactMoments,
    /// Moment matching on Monte Carlo moments of `Z`.
    Empirical { samples: usize, seed: u64 },
}

impl GammaModel {
    pub fn params(&self, m: u32, n: u32) -> Result<GammaParams> {
        match *self {
            GammaModel::Printed => Ok(gamma_params(m, n)),
            GammaModel::ExactMoments => {
                let (mean, var) = exact_ratio_moments(m, n);
                GammaParams::from_moments(mean, var)
            }
            GammaModel::Empirical { samples, seed } => {
                let (mean, var) = ratio_moments_oracle(m, n, samples, SeedSpec::new(seed, u64::from(n)))?;
                GammaParams::from_moments(mean, var)
            }
        }
    }

    /// Parameters for `N = 1..=n_max`; entry `N - 1` holds `N`.
    pub fn table(&self, m: u32, n_max: usize) -> Result<Vec<GammaParams>> {
        (1..=n_max.max(1) as u32).map(|n| self.params(m, n)).collect()
    }
}

/// One draw of `Z` with all fading magnitudes i.i.d. `exp(1)`.
pub fn sample_ratio<R: Rng + ?Sized>(m: u32, n: u32, rng: &mut R) -> f64 {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for _ in 0..m {
        let a: f64 = Exp1.sample(rng);
        let b: f64 = Exp1.sample(rng);
        numerator += a * b;
        denominator += a;
    }
    for _ in 0..(n - 1) * m {
        let a: f64 = Exp1.sample(rng);
        denominator += a;
    }
    numerator / denominator
}

const BLOCK: usize = 1 << 14;

/// `n_samples` draws of `Z`, generated in fixed-size blocks with one seed
/// stream per block so the output does not depend on the thread count.
pub fn ratio_samples(m: u32, n: u32, n_samples: usize, seed: SeedSpec) -> Vec<f64> {
    assert!(m >= 1 && n >= 1, "M and N must be at least 1");
    let blocks = n_samples.div_ceil(BLOCK);
    let chunks: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.child(b as u64).rng();
            let len = BLOCK.min(n_samples - b * BLOCK);
            (0..len).map(|_| sample_ratio(m, n, &mut rng)).collect()
        })
        .collect();
    chunks.concat()
}

/// Monte Carlo mean and unbiased variance of `Z`.
pub fn ratio_moments_oracle(m: u32, n: u32, n_samples: usize, seed: SeedSpec) -> Result<(f64, f64)> {
    if n_samples < 10_000 {
        return Err(Error::domain("the ratio oracle needs at least 10^4 samples"));
    }
    Ok(crate::stats::mean_var(&ratio_samples(m, n, n_samples, seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_reference_values() {
        assert_eq!(gamma_params(1, 1), GammaParams { k: 1.0, s: 1.0 });
        let p = gamma_params(2, 1);
        assert!((p.k - 7.0 / 4.0).abs() < 1e-15 && (p.s - 4.0 / 7.0).abs() < 1e-15);
        let p = gamma_params(1, 2);
        assert!((p.k - 1.0 / 6.0).abs() < 1e-15 && (p.s - 1.5).abs() < 1e-15);
    }

    #[test]
    fn printed_mean_scales_like_inverse_square() {
        for m in 1..=4 {
            for n in 2..=4 {
                let p = gamma_params(m, n);
                assert!((p.mean() - 1.0 / (m * n * n) as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_moments_at_unit_case() {
        assert_eq!(exact_ratio_moments(1, 1), (1.0, 1.0));
        let p = GammaModel::ExactMoments.params(1, 1).unwrap();
        assert!((p.k - 1.0).abs() < 1e-15 && (p.s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_moments_match_sampling() {
        for (m, n) in [(1, 3), (2, 2), (4, 1), (3, 4)] {
            let (mean, var) = ratio_moments_oracle(m, n, 400_000, SeedSpec::new(9, 0)).unwrap();
            let (em, ev) = exact_ratio_moments(m, n);
            assert!((mean - em).abs() / em < 0.01, "{m} {n}: {mean} vs {em}");
            assert!((var - ev).abs() / ev < 0.03, "{m} {n}: {var} vs {ev}");
        }
    }

    #[test]
    fn oracle_unit_case() {
        let (mean, var) = ratio_moments_oracle(1, 1, 1_000_000, SeedSpec::new(1, 0)).unwrap();
        assert!((0.99..=1.01).contains(&mean), "{mean}");
        assert!((0.97..=1.03).contains(&var), "{var}");
    }

    #[test]
    fn oracle_positive_on_grid() {
        for m in 1..=4 {
            for n in 1..=4 {
                let (mean, var) = ratio_moments_oracle(m, n, 10_000, SeedSpec::new(2, 0)).unwrap();
                assert!(mean > 0.0 && var > 0.0 && mean.is_finite() && var.is_finite());
            }
        }
    }

    #[test]
    fn oracle_rejects_small_budgets() {
        assert!(ratio_moments_oracle(1, 1, 9_999, SeedSpec::new(0, 0)).is_err());
    }

    #[test]
    fn cf_matches_closed_forms() {
        let g = GammaParams::new(1.0, 1.0).unwrap();
        let z = g.cf(1.0);
        assert!((z - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        let g = GammaParams::new(2.5, 0.3).unwrap();
        let direct = (Complex64::new(1.0, -0.3 * 1.7)).powf(-2.5);
        assert!((g.cf(1.7) - direct).norm() < 1e-14);
        assert_eq!(g.cf(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sampling_is_thread_count_independent() {
        let seed = SeedSpec::new(77, 3);
        let a = ratio_samples(2, 3, 40_000, seed);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| ratio_samples(2, 3, 40_000, seed));
        assert_eq!(a, b);
    }

    proptest::proptest! {
        #[test]
        fn cf_is_bounded_and_hermitian(k in 0.01f64..20.0, s in 0.01f64..10.0, t in -100.0f64..100.0) {
            let g = GammaParams::new(k, s).unwrap();
            proptest::prop_assert!(g.cf(t).norm() <= 1.0 + 1e-15);
            proptest::prop_assert!((g.cf(-t) - g.cf(t).conj()).norm() < 1e-14);
        }
    }
}
