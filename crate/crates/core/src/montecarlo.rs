//! Monte Carlo evaluation of the SINR at a user placed at the origin.
//!
//! Each realization draws RRHs on the window minus the disk `D(0, r0)`,
//! users on the window thinned within `r0` of any RRH, then adds the target
//! user at the origin. Realization `idx` uses the generator of
//! `SeedSpec::new(master_seed, idx)` and results are collected in index
//! order, so the output does not depend on the number of workers.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{mrt_weights, received_power_exact, sample_fading, NetworkRealization, PowerSplit};
use crate::coverage::CoverageCurve;
use crate::error::{Error, Result};
use crate::gamma::{GammaModel, GammaParams};
use crate::geometry::{build_assignment, sample_ppp_annulus, sample_users_with, Point, PointSet, SimWindow};
use crate::params::{NetworkParams, SeedSpec};
use crate::stats::wilson_interval;

/// How the interference at the target is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Full MRT superposition, cross terms included.
    #[default]
    Exact,
    /// Each interfering beam adds `[Σ_k |h_ijk|² |h_ij*k|²] r_ij^{-α} / |g_j|²
    /// · r_ij*^{-α}`, so beams of the same user add in power.
    NoCrossTerms,
    /// As above with the bracketed coefficient replaced by a Gamma variable
    /// whose parameters depend on the size of the interfered user's set.
    GammaApprox,
}

/// Monte Carlo run settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub mode: SimMode,
    pub realizations: usize,
    pub master_seed: u64,
    /// Window radius; `None` uses [`SimWindow::default_for`].
    pub window: Option<f64>,
    /// Gamma parameters of [`SimMode::GammaApprox`].
    pub gamma: GammaModel,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: SimMode::Exact,
            realizations: 10_000,
            master_seed: 1,
            window: None,
            gamma: GammaModel::Printed,
            workers: 0,
        }
    }
}

impl SimConfig {
    pub fn window_for(&self, params: &NetworkParams) -> Result<SimWindow> {
        match self.window {
            Some(radius) => Ok(SimWindow::new(radius, params.r1)?),
            None => Ok(SimWindow::default_for(params)),
        }
    }
}

/// Runs `f(idx)` for every realization index and returns results in order.
pub fn run_indexed<T, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let job = || (0..n as u64).into_par_iter().map(&f).collect::<Vec<T>>();
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// One realization's view from the target user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetSample {
    pub split: PowerSplit,
    /// RRHs serving the target.
    pub n_r: u32,
    /// Other users within `r1` of the target.
    pub n_u: u32,
}

/// Per-realization results of [`simulate_sinr`].
#[derive(Debug, Clone, Serialize)]
pub struct SinrSamples {
    pub mode: SimMode,
    pub samples: Vec<TargetSample>,
}

impl SinrSamples {
    pub fn sinr(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.split.sinr()).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn sample_network<R: Rng + ?Sized>(params: &NetworkParams, window: SimWindow, rng: &mut R) -> (PointSet, PointSet) {
    let rrhs = sample_ppp_annulus(params.lambda_r, params.r0, window.radius, rng);
    let mut users = sample_users_with(params.lambda_u, window, &rrhs, params.r0, rng);
    users.prepend(Point::ORIGIN);
    (rrhs, users)
}

fn one_realization(params: &NetworkParams, window: SimWindow, config: &SimConfig, gammas: &[GammaParams], seed: SeedSpec) -> TargetSample {
    let mut rng = seed.rng();
    let (rrhs, users) = sample_network(params, window, &mut rng);
    let assignment = build_assignment(&rrhs, &users, params.r1);
    let target = 0;
    let n_r = assignment.serving[target].len() as u32;
    let n_u = users.iter().skip(1).filter(|p| p.norm() <= params.r1).count() as u32;
    let alpha = params.alpha;
    let m = params.antennas as usize;
    let split = match config.mode {
        SimMode::Exact => {
            let fading = sample_fading(rrhs.len(), users.len(), m, &mut rng);
            let real = NetworkRealization {
                rrhs,
                users,
                fading,
                alpha,
            };
            let weights = mrt_weights(&real, &assignment);
            received_power_exact(&real, &assignment, &weights, target, params.noise)
        }
        SimMode::NoCrossTerms => {
            let fading = sample_fading(rrhs.len(), users.len(), m, &mut rng);
            let real = NetworkRealization {
                rrhs,
                users,
                fading,
                alpha,
            };
            no_cross_split(&real, &assignment.serving, target, params.noise)
        }
        SimMode::GammaApprox => gamma_split(params, &rrhs, &assignment.serving, gammas, &mut rng),
    };
    TargetSample { split, n_r, n_u }
}

fn no_cross_split(real: &NetworkRealization, serving: &[Vec<usize>], target: usize, noise: f64) -> PowerSplit {
    let origin = real.users[target];
    let gain = |i: usize, j: usize| -> f64 {
        let p = real.users[j];
        real.fading.link(i, j).iter().map(Complex64::norm_sqr).sum::<f64>() * real.amplitude(i, &p).powi(2)
    };
    let target_set = &serving[target];
    let useful: f64 = target_set.iter().map(|&i| gain(i, target)).sum();
    let (mut inner, mut outer) = (0.0, 0.0);
    for (j, set) in serving.iter().enumerate() {
        if j == target || set.is_empty() {
            continue;
        }
        let user = real.users[j];
        let norm2: f64 = set.iter().map(|&i| gain(i, j)).sum();
        for &i in set {
            let coupling: f64 = real
                .fading
                .link(i, j)
                .iter()
                .zip(real.fading.link(i, target))
                .map(|(a, b)| a.norm_sqr() * b.norm_sqr())
                .sum();
            let term = coupling * real.amplitude(i, &user).powi(2) / norm2 * real.amplitude(i, &origin).powi(2);
            if target_set.binary_search(&i).is_ok() {
                inner += term;
            } else {
                outer += term;
            }
        }
    }
    PowerSplit {
        useful,
        inner,
        outer,
        noise,
        signed_inner: false,
    }
}

fn gamma_split<R: Rng + ?Sized>(
    params: &NetworkParams,
    rrhs: &PointSet,
    serving: &[Vec<usize>],
    gammas: &[GammaParams],
    rng: &mut R,
) -> PowerSplit {
    let alpha = params.alpha;
    let decay = |i: usize| rrhs[i].norm().powf(-alpha);
    let fade = rand_distr::Gamma::new(f64::from(params.antennas), 1.0).expect("positive shape");
    let target_set = &serving[0];
    let useful: f64 = target_set.iter().map(|&i| fade.sample(rng) * decay(i)).sum();
    let (mut inner, mut outer) = (0.0, 0.0);
    for set in serving.iter().skip(1) {
        if set.is_empty() {
            continue;
        }
        let g = &gammas[(set.len() - 1).min(gammas.len() - 1)];
        for &i in set {
            let term = g.sample(rng) * decay(i);
            if target_set.binary_search(&i).is_ok() {
                inner += term;
            } else {
                outer += term;
            }
        }
    }
    PowerSplit {
        useful,
        inner,
        outer,
        noise: params.noise,
        signed_inner: false,
    }
}

/// SINR samples at the target user under the configured mode.
pub fn simulate_sinr(params: &NetworkParams, config: &SimConfig) -> Result<SinrSamples> {
    let params = params.validate()?;
    let window = config.window_for(&params)?;
    let gammas = match config.mode {
        // Cooperative sets larger than this have negligible probability on
        // any window the simulator can hold in memory.
        SimMode::GammaApprox => config.gamma.table(params.antennas, 400)?,
        _ => Vec::new(),
    };
    let samples = run_indexed(config.realizations, config.workers, |idx| {
        one_realization(&params, window, config, &gammas, SeedSpec::new(config.master_seed, idx))
    })?;
    Ok(SinrSamples {
        mode: config.mode,
        samples,
    })
}

/// Empirical `P(SINR > theta)` with 95% Wilson bands.
pub fn empirical_coverage(samples: &SinrSamples, thetas: &[f64], label: impl Into<String>) -> CoverageCurve {
    let sinr = samples.sinr();
    let n = sinr.len();
    let mut values = Vec::with_capacity(thetas.len());
    let mut lower = Vec::with_capacity(thetas.len());
    let mut upper = Vec::with_capacity(thetas.len());
    for &th in thetas {
        let hits = sinr.iter().filter(|&&s| s > th).count();
        let (center, half) = wilson_interval(hits, n);
        values.push(if n == 0 { 0.0 } else { hits as f64 / n as f64 });
        lower.push((center - half).max(0.0));
        upper.push((center + half).min(1.0));
    }
    CoverageCurve {
        label: label.into(),
        thetas: thetas.to_vec(),
        values,
        lower: Some(lower),
        upper: Some(upper),
    }
}

/// `E[P_I1] / E[P_I2]` with the sample means it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub mean_inner: f64,
    pub mean_outer: f64,
    /// Delta-method standard error of `ratio`.
    pub std_error: f64,
    pub realizations: usize,
    /// Realizations without any out-of-set interference.
    pub zero_outer: usize,
}

/// Ratio of mean in-set to mean out-of-set interference. The ratio is
/// `+inf` when no realization saw out-of-set interference; `zero_outer`
/// records how often that happened.
pub fn interference_ratio(params: &NetworkParams, config: &SimConfig) -> Result<RatioEstimate> {
    Ok(ratio_of(&simulate_sinr(params, config)?))
}

pub fn ratio_of(samples: &SinrSamples) -> RatioEstimate {
    let n = samples.len();
    let inner: Vec<f64> = samples.samples.iter().map(|s| s.split.inner).collect();
    let outer: Vec<f64> = samples.samples.iter().map(|s| s.split.outer).collect();
    let zero_outer = outer.iter().filter(|&&x| x == 0.0).count();
    let (mi, vi) = crate::stats::mean_var(&inner);
    let (mo, vo) = crate::stats::mean_var(&outer);
    let cov = if n > 1 {
        inner.iter().zip(&outer).map(|(a, b)| (a - mi) * (b - mo)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let (ratio, std_error) = if mo > 0.0 {
        let r = mi / mo;
        let var = (vi - 2.0 * r * cov + r * r * vo) / (mo * mo * n as f64);
        (r, var.max(0.0).sqrt())
    } else {
        (f64::INFINITY, f64::NAN)
    };
    RatioEstimate {
        ratio,
        mean_inner: mi,
        mean_outer: mo,
        std_error,
        realizations: n,
        zero_outer,
    }
}

/// Cooperative-set counts around a tagged serving RRH at `(r, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SetCounts {
    /// Other users within `r1` of the target.
    pub n_u: u32,
    /// Other users served by the tagged RRH.
    pub n_u_prime: u32,
    /// RRHs serving the target, tagged one included.
    pub n_r: u32,
    /// Serving-set size of a uniformly chosen other user of the tagged RRH.
    pub n_r_prime: Option<u32>,
}

/// Samples [`SetCounts`] with the target at the origin and a tagged RRH at
/// distance `r`. The other RRHs form a PPP off `D(0, r0)`; the window is
/// large enough for every count to be exact.
pub fn empirical_set_counts(params: &NetworkParams, r: f64, realizations: usize, master_seed: u64) -> Result<Vec<SetCounts>> {
    let params = params.validate()?;
    if !(r >= params.r0 && r <= params.r1) {
        return Err(Error::domain(format!("tagged distance {r} outside [r0, r1]")));
    }
    let window = SimWindow::new(r + 2.0 * params.r1 + 1.0, params.r1)?;
    let tagged = Point::new(r, 0.0);
    run_indexed(realizations, 0, |idx| {
        let mut rng = SeedSpec::new(master_seed, idx).rng();
        let mut rrhs = sample_ppp_annulus(params.lambda_r, params.r0, window.radius, &mut rng);
        rrhs.prepend(tagged);
        let users = sample_users_with(params.lambda_u, window, &rrhs, params.r0, &mut rng);
        let r1 = params.r1;
        let n_u = users.iter().filter(|p| p.norm() <= r1).count() as u32;
        let others: Vec<Point> = users.iter().filter(|p| p.dist(&tagged) <= r1).copied().collect();
        let n_r = rrhs.iter().filter(|p| p.norm() <= r1).count() as u32;
        let n_r_prime = if others.is_empty() {
            None
        } else {
            let pick = others[rng.random_range(0..others.len())];
            Some(rrhs.iter().filter(|p| p.dist(&pick) <= r1).count() as u32)
        };
        SetCounts {
            n_u,
            n_u_prime: others.len() as u32,
            n_r,
            n_r_prime,
        }
    })
}

/// Empirical `p(x | given)` from `(given, x)` pairs, with the number of
/// pairs that matched `given`.
pub fn conditional_frequencies(pairs: impl Iterator<Item = (u32, u32)>, given: u32, max: usize) -> (Vec<f64>, usize) {
    let mut counts = vec![0usize; max + 1];
    let mut total = 0;
    for (g, x) in pairs {
        if g == given {
            total += 1;
            if (x as usize) <= max {
                counts[x as usize] += 1;
            }
        }
    }
    let freq = counts.iter().map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 }).collect();
    (freq, total)
}

/// Largest coverage difference between the configured window and one 1.5
/// times larger, on the given thresholds.
pub fn window_bias(params: &NetworkParams, config: &SimConfig, thetas: &[f64]) -> Result<f64> {
    let base = config.window_for(params)?;
    let a = simulate_sinr(params, config)?;
    let big = SimConfig {
        window: Some(1.5 * base.radius),
        ..*config
    };
    let b = simulate_sinr(params, &big)?;
    Ok(empirical_coverage(&a, thetas, "base").max_gap(&empirical_coverage(&b, thetas, "large")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::presets;

    fn small(mode: SimMode) -> SimConfig {
        SimConfig {
            mode,
            realizations: 300,
            master_seed: 5,
            ..SimConfig::default()
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = presets::antenna_study(2);
        for mode in [SimMode::Exact, SimMode::NoCrossTerms, SimMode::GammaApprox] {
            let a = simulate_sinr(&p, &SimConfig { workers: 1, ..small(mode) }).unwrap();
            let b = simulate_sinr(&p, &SimConfig { workers: 3, ..small(mode) }).unwrap();
            assert_eq!(a.sinr(), b.sinr());
        }
    }

    #[test]
    fn modes_share_geometry() {
        let p = presets::antenna_study(1);
        let a = simulate_sinr(&p, &small(SimMode::Exact)).unwrap();
        let b = simulate_sinr(&p, &small(SimMode::NoCrossTerms)).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!((x.n_r, x.n_u), (y.n_r, y.n_u));
            // Same fading draws, so the useful power agrees too.
            assert!((x.split.useful - y.split.useful).abs() <= 1e-12 * x.split.useful.max(1e-300));
        }
    }

    #[test]
    fn unserved_target_has_zero_sinr() {
        let p = presets::antenna_study(1);
        let s = simulate_sinr(&p, &small(SimMode::Exact)).unwrap();
        assert!(s.samples.iter().any(|t| t.n_r == 0));
        for t in &s.samples {
            if t.n_r == 0 {
                assert_eq!(t.split.sinr(), 0.0);
            } else {
                assert!(t.split.useful > 0.0);
            }
        }
    }

    #[test]
    fn no_cross_terms_keep_mean_interference() {
        // Cross terms vanish in expectation given the geometry.
        let p = presets::density_study(3e-4, 1.5e-4);
        let cfg = |mode| SimConfig {
            mode,
            realizations: 4000,
            master_seed: 11,
            window: Some(300.0),
            ..SimConfig::default()
        };
        let a = ratio_of(&simulate_sinr(&p, &cfg(SimMode::Exact)).unwrap());
        let b = ratio_of(&simulate_sinr(&p, &cfg(SimMode::NoCrossTerms)).unwrap());
        let rel = |x: f64, y: f64| (x - y).abs() / y;
        assert!(rel(a.mean_outer, b.mean_outer) < 0.1, "{a:?} {b:?}");
    }

    #[test]
    fn empirical_coverage_is_monotone_with_bands() {
        let p = presets::antenna_study(1);
        let s = simulate_sinr(&p, &small(SimMode::GammaApprox)).unwrap();
        let thetas = [0.0, 0.1, 1.0, 10.0];
        let c = empirical_coverage(&s, &thetas, "mc");
        assert!(c.values.windows(2).all(|w| w[0] >= w[1]));
        let (lo, hi) = (c.lower.unwrap(), c.upper.unwrap());
        for k in 0..thetas.len() {
            assert!(lo[k] <= c.values[k] && c.values[k] <= hi[k]);
        }
    }

    #[test]
    fn ratio_without_outer_interference_is_infinite() {
        let p = presets::antenna_study(1);
        let cfg = SimConfig {
            realizations: 20,
            window: Some(100.0),
            mode: SimMode::GammaApprox,
            ..SimConfig::default()
        };
        // With the window equal to the cooperation disk every interfering
        // RRH serves the target as well.
        let r = interference_ratio(&p, &cfg).unwrap();
        assert_eq!(r.zero_outer, 20);
        assert!(r.ratio.is_infinite());
    }

    #[test]
    fn set_counts_are_consistent() {
        let p = presets::antenna_study(1);
        let counts = empirical_set_counts(&p, 50.0, 500, 3).unwrap();
        for c in &counts {
            assert!(c.n_r >= 1);
            match c.n_r_prime {
                Some(k) => assert!(c.n_u_prime >= 1 && k >= 1),
                None => assert_eq!(c.n_u_prime, 0),
            }
        }
        assert!(empirical_set_counts(&p, 150.0, 10, 3).is_err());
    }

    #[test]
    fn conditional_frequencies_normalize() {
        let pairs = [(1, 0), (1, 2), (2, 1), (1, 2)];
        let (f, n) = conditional_frequencies(pairs.into_iter(), 1, 3);
        assert_eq!(n, 3);
        assert_eq!(f, vec![1.0 / 3.0, 0.0, 2.0 / 3.0, 0.0]);
    }
}
