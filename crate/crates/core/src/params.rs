//! Model parameters, truncation policy and the random-seed contract.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Scalar parameters of the network model, in SI units. Missing fields
/// deserialize to the single-antenna [`presets::antenna_study`] values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkParams {
    /// RRH density (m⁻²).
    pub lambda_r: f64,
    /// User density (m⁻²).
    pub lambda_u: f64,
    /// Antennas per RRH.
    pub antennas: u32,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Exclusion radius around every RRH where no user is deployed (m).
    pub r0: f64,
    /// Cooperation radius (m).
    pub r1: f64,
    /// Noise power (W).
    pub noise: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        presets::antenna_study(1)
    }
}

impl NetworkParams {
    /// Returns the parameters unchanged if every invariant holds, otherwise
    /// the first violated one.
    pub fn validate(self) -> Result<Self, ParamError> {
        for (name, value) in [
            ("lambda_r", self.lambda_r),
            ("lambda_u", self.lambda_u),
            ("alpha", self.alpha),
            ("r0", self.r0),
            ("r1", self.r1),
            ("noise", self.noise),
        ] {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name, value });
            }
        }
        if self.alpha <= 2.0 {
            return Err(ParamError::PathLossExponent(self.alpha));
        }
        if self.r0 <= 0.0 {
            return Err(ParamError::ExclusionRadius(self.r0));
        }
        if self.r0 >= self.r1 {
            return Err(ParamError::RadiusOrder {
                r0: self.r0,
                r1: self.r1,
            });
        }
        if self.lambda_r <= 0.0 {
            return Err(ParamError::RrhDensity(self.lambda_r));
        }
        if self.lambda_u <= 0.0 {
            return Err(ParamError::UserDensity(self.lambda_u));
        }
        if self.antennas < 1 {
            return Err(ParamError::Antennas);
        }
        if self.noise < 0.0 {
            return Err(ParamError::Noise(self.noise));
        }
        Ok(self)
    }

    /// Area of the annulus `r0 ≤ |x| ≤ r1` holding a user's serving RRHs.
    pub fn annulus_area(&self) -> f64 {
        PI * (self.r1 * self.r1 - self.r0 * self.r0)
    }

    /// Area of the full cooperation disk.
    pub fn disk_area(&self) -> f64 {
        PI * self.r1 * self.r1
    }

    /// Mean number of RRHs in a cooperative set.
    pub fn mean_rrhs_per_set(&self) -> f64 {
        self.lambda_r * self.annulus_area()
    }

    /// Mean number of users in a cooperative set.
    pub fn mean_users_per_set(&self) -> f64 {
        self.lambda_u * self.annulus_area()
    }

    /// Density giving `mean` nodes per cooperation annulus.
    pub fn density_for_mean(mean: f64, r0: f64, r1: f64) -> f64 {
        mean / (PI * (r1 * r1 - r0 * r0))
    }

    pub fn with_antennas(mut self, antennas: u32) -> Self {
        self.antennas = antennas;
        self
    }

    pub fn with_densities(mut self, lambda_r: f64, lambda_u: f64) -> Self {
        self.lambda_r = lambda_r;
        self.lambda_u = lambda_u;
        self
    }
}

/// Reference parameter sets used by the experiments.
pub mod presets {
    use super::NetworkParams;

    /// Antenna study: about 4 RRHs and 1 user per cooperative set,
    /// `alpha = 2.01`, noiseless.
    pub fn antenna_study(antennas: u32) -> NetworkParams {
        NetworkParams {
            lambda_r: 1.27e-4,
            lambda_u: 3.18e-5,
            antennas,
            alpha: 2.01,
            r0: 1.0,
            r1: 100.0,
            noise: 0.0,
        }
    }

    /// Density studies (interference ratio and spectral efficiency maps):
    /// `M = 1`, `alpha = 3`, noiseless, `r1 = 100 m`.
    pub fn density_study(lambda_r: f64, lambda_u: f64) -> NetworkParams {
        NetworkParams {
            lambda_r,
            lambda_u,
            antennas: 1,
            alpha: 3.0,
            r0: 1.0,
            r1: 100.0,
            noise: 0.0,
        }
    }
}

/// How infinite series and integrals are cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationPolicy {
    /// Largest probability mass any Poisson-type series may neglect.
    pub tail_mass_eps: f64,
    /// Hard cap on any series index.
    pub max_terms: usize,
    /// Relative tolerance of every quadrature.
    pub quad_rel_tol: f64,
    /// Characteristic-function modulus below which the Gil-Pelaez integral
    /// is truncated.
    pub t_max_heuristic: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tail_mass_eps: 1e-6,
            max_terms: 400,
            quad_rel_tol: 1e-6,
            t_max_heuristic: 1e-8,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(self) -> Result<Self, ParamError> {
        if !(self.tail_mass_eps > 0.0 && self.tail_mass_eps < 1e-3) {
            return Err(ParamError::TailMass(self.tail_mass_eps));
        }
        if self.max_terms < 1 {
            return Err(ParamError::MaxTerms);
        }
        // Tighter than a few ulps cannot be met and only burns panels.
        if !(self.quad_rel_tol >= 1e-14 && self.quad_rel_tol < 1.0) {
            return Err(ParamError::QuadTolerance(self.quad_rel_tol));
        }
        if !(self.t_max_heuristic > 0.0 && self.t_max_heuristic < 1.0) {
            return Err(ParamError::CfFloor(self.t_max_heuristic));
        }
        Ok(self)
    }

    /// Last index kept for a Poisson series of the given mean: the smallest
    /// `n` with `P(N > n) <= tail_mass_eps`, capped at `max_terms`.
    pub fn poisson_cutoff(&self, mean: f64) -> usize {
        if mean <= 0.0 {
            return 0;
        }
        let mut pmf = (-mean).exp();
        let mut cdf = pmf;
        let mut n = 0;
        // Far-right starting pmf underflows for huge means; walk in log space then.
        if pmf == 0.0 {
            let mut log_pmf = -mean;
            while cdf < 1.0 - self.tail_mass_eps && n < self.max_terms {
                n += 1;
                log_pmf += mean.ln() - (n as f64).ln();
                cdf += log_pmf.exp();
            }
            return n;
        }
        while cdf < 1.0 - self.tail_mass_eps && n < self.max_terms {
            n += 1;
            pmf *= mean / n as f64;
            cdf += pmf;
        }
        n
    }
}

/// Seed of one Monte Carlo realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub realization_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, realization_index: u64) -> Self {
        SeedSpec {
            master_seed,
            realization_index,
        }
    }

    /// Stream seed, a pure function of `(master_seed, realization_index)`.
    pub fn stream_seed(&self) -> u64 {
        splitmix64(splitmix64(self.master_seed) ^ self.realization_index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream_seed())
    }

    /// Seed of an independent sub-experiment derived from this one.
    pub fn child(&self, salt: u64) -> SeedSpec {
        SeedSpec::new(splitmix64(self.stream_seed() ^ splitmix64(salt)), 0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
