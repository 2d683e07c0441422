//! Counting distributions over cooperative sets.
//!
//! Besides plain and zero-truncated Poisson laws this module holds the
//! overlap-conditional laws used by the in-set interference: given that an
//! RRH at distance `r` serves the target user, how many users does it serve
//! (`n_U'` given `n_U`), and how many RRHs serve one of those users
//! (`n_R'` given `n_R`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lens_area_exact, lens_area_linearized};
use crate::params::TruncationPolicy;
use crate::quad::CompositeRule;

/// `ln n!`, exact summation for small `n` and Stirling's series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 64 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // ln Γ(x) for x >= 65; the series error is below 1e-15.
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Poisson pmf, evaluated in log space.
pub fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mean.ln() - mean - ln_factorial(n)).exp()
}

/// `P(N = 0), ..., P(N = last)` for `N ~ Poisson(mean)`.
pub fn poisson_pmf_vec(mean: f64, last: usize) -> Vec<f64> {
    (0..=last).map(|n| poisson_pmf(mean, n)).collect()
}

/// `Binomial(n, q)` pmf on `0..=n`.
pub fn binomial_pmf_vec(n: usize, q: f64) -> Vec<f64> {
    let q = q.clamp(0.0, 1.0);
    if q == 0.0 || q == 1.0 {
        let mut v = vec![0.0; n + 1];
        v[if q == 0.0 { 0 } else { n }] = 1.0;
        return v;
    }
    let (lq, lp) = (q.ln(), (1.0 - q).ln());
    (0..=n)
        .map(|k| {
            (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k) + k as f64 * lq + (n - k) as f64 * lp)
                .exp()
        })
        .collect()
}

/// Mean number of points of a PPP in the annulus `r0 ≤ |x| ≤ r1`.
pub fn annulus_mean(density: f64, r0: f64, r1: f64) -> f64 {
    density * PI * (r1 * r1 - r0 * r0)
}

/// Probability of `n` points of a PPP in the annulus `r0 ≤ |x| ≤ r1`.
pub fn annulus_poisson_pmf(density: f64, r0: f64, r1: f64, n: usize) -> f64 {
    poisson_pmf(annulus_mean(density, r0, r1), n)
}

/// Zero-truncated Poisson law of the annulus count: the number of RRHs
/// serving a user that is known to be served.
pub fn truncated_poisson_pmf(density: f64, r0: f64, r1: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("truncated support starts at 1"));
    }
    let mu = annulus_mean(density, r0, r1);
    Ok(poisson_pmf(mu, m) / -(-mu).exp_m1())
}

/// Linear model `chi + zeta r` of the fraction of a cooperation disk shared
/// by the disk of the target user and the disk of a user served by an RRH at
/// distance `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensCoeffs {
    pub chi: f64,
    /// Slope, in 1/m.
    pub zeta: f64,
}

impl LensCoeffs {
    /// Shared fraction at distance `r`, clamped to `[0, 1]`.
    pub fn fraction(&self, r: f64) -> f64 {
        (self.chi + self.zeta * r).clamp(0.0, 1.0)
    }
}

/// Both available `(chi, zeta)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiZeta {
    /// The closed forms as published. Both coefficients are negative, so the
    /// clamped fraction is identically zero.
    pub printed: LensCoeffs,
    /// Line through the exact lens fraction at the two end points `r = 0`
    /// and `r = r1`, with the served user placed at `r1/2` from its RRH
    /// perpendicular to the RRH direction (lens distance `sqrt(r² + r1²/4)`).
    pub rederived: LensCoeffs,
}

pub fn chi_zeta(r1: f64) -> ChiZeta {
    let chi_p = 2.0 * (5f64.sqrt() / 4.0).acos() - 1.25 * (4.0f64 - 0.25).sqrt();
    let zeta_p = (chi_p - 2.0 * 0.25f64.acos() + 0.25 * (4.0f64 - 0.25).sqrt()) / r1;
    let frac = |r: f64| lens_area_exact((r * r + 0.25 * r1 * r1).sqrt(), r1) / (PI * r1 * r1);
    let (f0, f1) = (frac(0.0), frac(r1));
    ChiZeta {
        printed: LensCoeffs {
            chi: chi_p,
            zeta: zeta_p,
        },
        rederived: LensCoeffs {
            chi: f0,
            zeta: (f1 - f0) / r1,
        },
    }
}

/// Where the shared fraction of the RRH-side disks comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LensChoice {
    /// Numerically re-derived linear coefficients (default).
    #[default]
    Rederived,
    /// The published coefficients (degenerate: zero overlap).
    Printed,
    /// Exact lens areas averaged over the position of the served user,
    /// uniform in the RRH's cooperation disk. Diagnostic only.
    ExactMixture,
}

/// Law of the number `k` of RRHs shared by the two cooperative sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharedCount {
    /// Independent Poisson region counts conditioned on `k ≥ 1`:
    /// `k ~ Binomial(n_R, q)` restricted to `k ≥ 1` (default).
    #[default]
    ConditionedPoisson,
    /// The serving RRH is shared for sure and the other `n_R - 1` are
    /// shared independently: `k = 1 + Binomial(n_R - 1, q)`.
    Tagged,
}

/// Law of the serving-set size `N` of a user interfered by a given RRH.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferedSetLaw {
    /// The cooperative-set count conditioned on being non-empty (default).
    #[default]
    ZeroTruncated,
    /// The interfering RRH plus an independent Poisson count of others,
    /// `N = 1 + Poisson(mu_R)`: the law seen from a point of the RRH process.
    Tagged,
}

impl InterferedSetLaw {
    /// `(N, P(N))` for `N ≥ 1`, cut where the neglected mass is at most
    /// `tail_mass_eps`.
    pub fn pmf(&self, mu_r: f64, policy: &TruncationPolicy) -> Vec<(usize, f64)> {
        let cut = policy.poisson_cutoff(mu_r);
        match self {
            InterferedSetLaw::ZeroTruncated => {
                let norm = -(-mu_r).exp_m1();
                (1..=cut.max(1)).map(|m| (m, poisson_pmf(mu_r, m) / norm)).collect()
            }
            InterferedSetLaw::Tagged => (0..=cut).map(|k| (k + 1, poisson_pmf(mu_r, k))).collect(),
        }
    }
}

/// Options of the RRH-side conditional law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RrhOverlapModel {
    pub lens: LensChoice,
    pub shared: SharedCount,
}

/// `P(n_U' | n_U, r)`: users in the disk of an RRH at distance `r`, given
/// `n_U` users in the disk of the target user.
///
/// The shared region gets the linearized lens area and each exclusive region
/// the rest of its disk, so that `n_U` and `n_U'` are both
/// `Poisson(lambda_u pi r1²)`. Given `n_U`, the shared count is then
/// `Binomial(n_U, A_shared / (pi r1²))`.
pub fn cond_user_count_pmf(n_uprime: usize, n_u: usize, r: f64, lambda_u: f64, r1: f64) -> f64 {
    let disk = PI * r1 * r1;
    let shared = lens_area_linearized(r, r1).min(disk);
    let shared_law = binomial_pmf_vec(n_u, shared / disk);
    let exclusive = lambda_u * (disk - shared);
    (0..=n_u.min(n_uprime))
        .map(|k| shared_law[k] * poisson_pmf(exclusive, n_uprime - k))
        .sum()
}

/// The whole law `P(n_U' = 0..=last | n_U, r)`, truncated per `policy`.
pub fn cond_user_count_dist(n_u: usize, r: f64, lambda_u: f64, r1: f64, policy: &TruncationPolicy) -> Vec<f64> {
    let disk = PI * r1 * r1;
    let shared = lens_area_linearized(r, r1).min(disk);
    let exclusive = lambda_u * (disk - shared);
    convolve_shared(&binomial_pmf_vec(n_u, shared / disk), exclusive, policy)
}

/// `P(n_R' | n_R, r)`: RRHs serving a user served by an RRH at distance `r`
/// from the target, given `n_R ≥ 1` RRHs serving the target.
pub fn cond_rrh_count_pmf(
    n_rprime: usize,
    n_r: usize,
    r: f64,
    lambda_r: f64,
    r1: f64,
    model: &RrhOverlapModel,
) -> Result<f64> {
    if n_rprime == 0 {
        return Err(Error::domain("user j must have >= 1 serving RRH"));
    }
    if n_r == 0 {
        return Err(Error::domain("the target user must have >= 1 serving RRH"));
    }
    let policy = TruncationPolicy {
        max_terms: usize::MAX / 2,
        ..TruncationPolicy::default()
    };
    let dist = cond_rrh_count_dist(n_r, r, lambda_r, r1, model, &policy);
    Ok(dist.get(n_rprime).copied().unwrap_or(0.0))
}

/// The whole law `P(n_R' = 0..=last | n_R, r)` (entry 0 is always zero).
///
/// # Panics
///
/// Panics if `n_r == 0`.
pub fn cond_rrh_count_dist(
    n_r: usize,
    r: f64,
    lambda_r: f64,
    r1: f64,
    model: &RrhOverlapModel,
    policy: &TruncationPolicy,
) -> Vec<f64> {
    assert!(n_r >= 1, "the target user must have at least one serving RRH");
    let disk = PI * r1 * r1;
    let fixed = |q: f64| {
        let k_law = shared_rrh_law(n_r, q, model.shared);
        convolve_shared(&k_law, lambda_r * disk * (1.0 - q), policy)
    };
    match model.lens {
        LensChoice::Rederived => fixed(chi_zeta(r1).rederived.fraction(r)),
        LensChoice::Printed => fixed(chi_zeta(r1).printed.fraction(r)),
        LensChoice::ExactMixture => {
            // Served user at distance r' (density 2r'/r1²) and angle phi from
            // the RRH; the lens distance is |r + r' e^{i phi}|.
            let radial = CompositeRule::new(0.0, r1, 2);
            let angular = CompositeRule::new(0.0, PI, 1);
            let mut acc: Vec<f64> = Vec::new();
            for (&rp, &wr) in radial.nodes.iter().zip(&radial.weights) {
                for (&phi, &wp) in angular.nodes.iter().zip(&angular.weights) {
                    let d = (r * r + rp * rp + 2.0 * r * rp * phi.cos()).sqrt();
                    let w = wr * 2.0 * rp / (r1 * r1) * wp / PI;
                    let part = fixed(lens_area_exact(d, r1) / disk);
                    if acc.len() < part.len() {
                        acc.resize(part.len(), 0.0);
                    }
                    acc.iter_mut().zip(&part).for_each(|(a, p)| *a += w * p);
                }
            }
            acc
        }
    }
}

/// Law of the shared RRH count `k ∈ 1..=n_r` given the shared fraction `q`.
fn shared_rrh_law(n_r: usize, q: f64, shared: SharedCount) -> Vec<f64> {
    match shared {
        SharedCount::ConditionedPoisson => {
            let mut law = binomial_pmf_vec(n_r, q);
            let positive = 1.0 - law[0];
            if positive <= 0.0 {
                // q = 0: the conditioning event has no mass; the only
                // consistent reading keeps the tagged RRH.
                let mut point = vec![0.0; n_r + 1];
                point[1] = 1.0;
                return point;
            }
            law[0] = 0.0;
            law.iter_mut().for_each(|p| *p /= positive);
            law
        }
        SharedCount::Tagged => {
            let mut law = vec![0.0];
            law.extend(binomial_pmf_vec(n_r - 1, q));
            law
        }
    }
}

/// Law of `k + P` with `k` distributed as `k_law` and `P ~ Poisson(mean)`,
/// the Poisson part cut at the policy's tail mass.
fn convolve_shared(k_law: &[f64], mean: f64, policy: &TruncationPolicy) -> Vec<f64> {
    let tail = poisson_pmf_vec(mean, policy.poisson_cutoff(mean));
    let mut out = vec![0.0; k_law.len() + tail.len() - 1];
    for (k, &pk) in k_law.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        for (m, &pm) in tail.iter().enumerate() {
            out[k + m] += pk * pm;
        }
    }
    out
}

/// Conditional laws tabulated on a radial grid.
///
/// `user(q, n_u)` and `rrh(q, n_r)` return the law at the `q`-th node; the
/// tables are immutable once built and can be shared across threads.
#[derive(Debug, Clone)]
pub struct OverlapTables {
    pub nodes: Vec<f64>,
    user: Vec<Vec<Vec<f64>>>,
    rrh: Vec<Vec<Vec<f64>>>,
}

impl OverlapTables {
    /// Tables for `n_U ∈ 0..=n_u_max` and `n_R ∈ 1..=n_r_max`.
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        nodes: &[f64],
        lambda_u: f64,
        lambda_r: f64,
        r1: f64,
        n_u_max: usize,
        n_r_max: usize,
        model: &RrhOverlapModel,
        policy: &TruncationPolicy,
    ) -> Self {
        let user = nodes
            .iter()
            .map(|&r| {
                (0..=n_u_max)
                    .map(|n| cond_user_count_dist(n, r, lambda_u, r1, policy))
                    .collect()
            })
            .collect();
        let rrh = nodes
            .iter()
            .map(|&r| {
                (1..=n_r_max.max(1))
                    .map(|n| cond_rrh_count_dist(n, r, lambda_r, r1, model, policy))
                    .collect()
            })
            .collect();
        OverlapTables {
            nodes: nodes.to_vec(),
            user,
            rrh,
        }
    }

    pub fn user(&self, node: usize, n_u: usize) -> &[f64] {
        &self.user[node][n_u]
    }

    /// # Panics
    ///
    /// Panics if `n_r == 0`.
    pub fn rrh(&self, node: usize, n_r: usize) -> &[f64] {
        &self.rrh[node][n_r - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const R1: f64 = 100.0;
    const LR: f64 = 1.27e-4;
    const LU: f64 = 3.18e-5;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let exact: f64 = (2..=200).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(200) - exact).abs() < 1e-10);
        let exact64: f64 = (2..=64).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(64) - exact64).abs() < 1e-12);
    }

    #[test]
    fn annulus_pmf_reference_values() {
        assert!((annulus_poisson_pmf(LR, 1.0, R1, 0) - 0.018_510_379).abs() < 1e-9);
        assert!((annulus_poisson_pmf(LR, 1.0, R1, 4) - 0.195_364_08).abs() < 1e-8);
    }

    #[test]
    fn annulus_pmf_normalizes_under_policy() {
        let p = policy();
        for density in [LR, LU, 1e-3] {
            let mu = annulus_mean(density, 1.0, R1);
            let s: f64 = (0..=p.poisson_cutoff(mu)).map(|n| annulus_poisson_pmf(density, 1.0, R1, n)).sum();
            assert!(s >= 1.0 - p.tail_mass_eps);
        }
    }

    #[test]
    fn truncated_poisson_reference_values() {
        let p1 = truncated_poisson_pmf(LR, 1.0, R1, 1).unwrap();
        assert!((p1 - 0.075_238_44).abs() < 1e-8, "{p1}");
        let err = truncated_poisson_pmf(LR, 1.0, R1, 0).unwrap_err();
        assert!(err.to_string().contains("truncated support starts at 1"));
        let s: f64 = (1..60).map(|m| truncated_poisson_pmf(LR, 1.0, R1, m).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-6);
    }

    #[test]
    fn truncation_vanishes_for_large_mean() {
        let density = 30.0 / (PI * (R1 * R1 - 1.0));
        for m in [20, 30, 40] {
            let t = truncated_poisson_pmf(density, 1.0, R1, m).unwrap();
            let p = annulus_poisson_pmf(density, 1.0, R1, m);
            assert!((t - p).abs() / p < 1e-6);
        }
    }

    #[test]
    fn interfered_set_laws() {
        let p = policy();
        let mu = annulus_mean(LR, 1.0, R1);
        for law in [InterferedSetLaw::ZeroTruncated, InterferedSetLaw::Tagged] {
            let pmf = law.pmf(mu, &p);
            let total: f64 = pmf.iter().map(|x| x.1).sum();
            assert!((1.0 - total).abs() <= p.tail_mass_eps);
            assert!(pmf.iter().all(|x| x.0 >= 1));
        }
        // E[1/N] for 1 + Poisson(mu) is (1 - e^{-mu}) / mu.
        let inv: f64 = InterferedSetLaw::Tagged.pmf(mu, &p).iter().map(|(n, q)| q / *n as f64).sum();
        assert!((inv - (1.0 - (-mu).exp()) / mu).abs() < 1e-6);
    }

    #[test]
    fn chi_zeta_values() {
        let cz = chi_zeta(R1);
        // Exact lens at distance r1/2 and sqrt(5) r1/2, as disk fractions.
        assert!((cz.rederived.fraction(0.0) - 0.685_037_6).abs() < 1e-7);
        assert!((cz.rederived.fraction(R1) - 0.327_276_1).abs() < 1e-7);
        assert!((cz.printed.chi + 0.465_421).abs() < 1e-6, "{}", cz.printed.chi);
        assert!((cz.printed.zeta * R1 + 2.617_531).abs() < 1e-6);
        assert_eq!(cz.printed.fraction(50.0), 0.0);
    }

    /// Direct three-region convolution, normalized by the count of the
    /// target's disk: the textbook form the binomial shortcut replaces.
    fn user_pmf_by_regions(n_up: usize, n_u: usize, r: f64) -> f64 {
        let disk = PI * R1 * R1;
        let beta = lens_area_linearized(r, R1);
        let excl = disk - beta;
        let num: f64 = (0..=n_u.min(n_up))
            .map(|k| poisson_pmf(LU * excl, n_u - k) * poisson_pmf(LU * beta, k) * poisson_pmf(LU * excl, n_up - k))
            .sum();
        num / poisson_pmf(LU * disk, n_u)
    }

    #[test]
    fn user_pmf_matches_region_convolution() {
        for n_u in 0..6 {
            for n_up in 0..8 {
                for r in [1.0, 30.0, 77.0, 100.0] {
                    let a = cond_user_count_pmf(n_up, n_u, r, LU, R1);
                    let b = user_pmf_by_regions(n_up, n_u, r);
                    assert!((a - b).abs() < 1e-13, "{n_up} {n_u} {r}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn user_pmf_point_mass_at_zero_distance() {
        for n_u in 0..6 {
            assert!((cond_user_count_pmf(n_u, n_u, 0.0, LU, R1) - 1.0).abs() < 1e-14);
            assert_eq!(cond_user_count_pmf(n_u + 1, n_u, 0.0, LU, R1), 0.0);
        }
    }

    #[test]
    fn user_dist_normalizes_on_grid() {
        for n_u in 0..=10 {
            for k in 0..=10 {
                let r = 1.0 + (R1 - 1.0) * k as f64 / 10.0;
                let s: f64 = cond_user_count_dist(n_u, r, LU, R1, &policy()).iter().sum();
                assert!((s - 1.0).abs() <= policy().tail_mass_eps, "{n_u} {r}: {s}");
            }
        }
    }

    #[test]
    fn user_pmf_marginalizes_to_disk_poisson() {
        let mu = LU * PI * R1 * R1;
        for r in [1.0, 25.0, 50.0, 100.0] {
            for n_up in 0..6 {
                let mixed: f64 = (0..40).map(|n| poisson_pmf(mu, n) * cond_user_count_pmf(n_up, n, r, LU, R1)).sum();
                assert!((mixed - poisson_pmf(mu, n_up)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rrh_pmf_rejects_empty_set() {
        let m = RrhOverlapModel::default();
        let err = cond_rrh_count_pmf(0, 3, 50.0, LR, R1, &m).unwrap_err();
        assert!(err.to_string().contains(">= 1 serving RRH"));
    }

    /// Printed convolution form with the shared count summed from 1.
    fn rrh_pmf_by_regions(n_rp: usize, n_r: usize, r: f64) -> f64 {
        let disk = PI * R1 * R1;
        let eps = disk * chi_zeta(R1).rederived.fraction(r);
        let excl = LR * (disk - eps);
        let num: f64 = (1..=n_r.min(n_rp))
            .map(|k| poisson_pmf(excl, n_r - k) * poisson_pmf(LR * eps, k) * poisson_pmf(excl, n_rp - k))
            .sum();
        let den: f64 = (1..=n_r).map(|k| poisson_pmf(LR * eps, k) * poisson_pmf(excl, n_r - k)).sum();
        num / den
    }

    #[test]
    fn rrh_pmf_matches_region_convolution() {
        let m = RrhOverlapModel::default();
        for n_r in 1..7 {
            for n_rp in 1..10 {
                for r in [1.0, 40.0, 100.0] {
                    let a = cond_rrh_count_pmf(n_rp, n_r, r, LR, R1, &m).unwrap();
                    let b = rrh_pmf_by_regions(n_rp, n_r, r);
                    assert!((a - b).abs() < 1e-13, "{n_rp} {n_r} {r}");
                }
            }
        }
    }

    #[test]
    fn rrh_dist_normalizes_for_every_model() {
        for lens in [LensChoice::Rederived, LensChoice::Printed, LensChoice::ExactMixture] {
            for shared in [SharedCount::ConditionedPoisson, SharedCount::Tagged] {
                let m = RrhOverlapModel { lens, shared };
                for n_r in 1..=6 {
                    for r in [1.0, 50.0, 100.0] {
                        let d = cond_rrh_count_dist(n_r, r, LR, R1, &m, &policy());
                        assert_eq!(d[0], 0.0);
                        let s: f64 = d.iter().sum();
                        assert!((s - 1.0).abs() <= policy().tail_mass_eps, "{m:?} {n_r} {r}: {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn full_overlap_is_identity() {
        let d = convolve_shared(&shared_rrh_law(4, 1.0, SharedCount::ConditionedPoisson), 0.0, &policy());
        assert_eq!(d, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let d = convolve_shared(&shared_rrh_law(4, 1.0, SharedCount::Tagged), 0.0, &policy());
        assert_eq!(d, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn tables_index_like_direct_calls() {
        let nodes = [10.0, 60.0];
        let m = RrhOverlapModel::default();
        let t = OverlapTables::build(&nodes, LU, LR, R1, 3, 4, &m, &policy());
        assert_eq!(t.user(1, 2), cond_user_count_dist(2, 60.0, LU, R1, &policy()).as_slice());
        assert_eq!(t.rrh(0, 4), cond_rrh_count_dist(4, 10.0, LR, R1, &m, &policy()).as_slice());
    }

    proptest::proptest! {
        #[test]
        fn user_pmf_nonnegative(n_up in 0usize..20, n_u in 0usize..20, r in 0.0f64..300.0) {
            let p = cond_user_count_pmf(n_up, n_u, r, LU, R1);
            proptest::prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        }

        #[test]
        fn binomial_sums_to_one(n in 0usize..80, q in 0.0f64..=1.0) {
            let s: f64 = binomial_pmf_vec(n, q).iter().sum();
            proptest::prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
