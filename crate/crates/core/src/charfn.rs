//! Characteristic functions of the received powers at the target user.
//!
//! Conventions: `phi_X(t) = E[exp(j t X)]`. Gamma laws enter through
//! `(1 - j t s)^{-k}` evaluated in polar form, which stays on the principal
//! branch because the base has a positive real part.
//!
//! [`AnalyticModel`] bundles everything the coverage integrand needs (Gamma
//! table, radial rule, conditional count tables and the out-of-set
//! interference table) so that one evaluation at `t` serves every
//! `(n_R, n_U)` stratum at once.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{cf_gamma, GammaModel, GammaParams};
use crate::geometry::lens_area_linearized;
use crate::params::{NetworkParams, TruncationPolicy};
use crate::quad::{integrate_vec, kronrod_panel, CompositeRule, Tolerance};
use crate::setstats::{
    annulus_mean, chi_zeta, cond_rrh_count_dist, cond_user_count_dist, poisson_pmf, InterferedSetLaw, LensChoice,
    OverlapTables, RrhOverlapModel,
};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A characteristic function with a short description of what it models.
pub trait ComplexCf {
    fn eval(&self, t: f64) -> Complex64;

    fn description(&self) -> &str {
        ""
    }

    /// Range or assumption under which the function is meaningful.
    fn validity(&self) -> &str {
        ""
    }
}

/// Wraps a closure as a [`ComplexCf`].
pub struct FnCf<F> {
    f: F,
    description: String,
    validity: String,
}

impl<F: Fn(f64) -> Complex64> FnCf<F> {
    pub fn new(description: impl Into<String>, f: F) -> Self {
        FnCf {
            f,
            description: description.into(),
            validity: String::new(),
        }
    }

    pub fn with_validity(mut self, note: impl Into<String>) -> Self {
        self.validity = note.into();
        self
    }
}

impl<F: Fn(f64) -> Complex64> ComplexCf for FnCf<F> {
    fn eval(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }

    fn description(&self) -> &str {
        &self.description
    }

    fn validity(&self) -> &str {
        &self.validity
    }
}

/// Useful power of one serving RRH at distance `r`: `Gamma(M, r^{-alpha})`.
pub fn phi_s(t: f64, r: f64, m: u32, alpha: f64) -> Complex64 {
    cf_gamma(f64::from(m), t * r.powf(-alpha))
}

/// Interference carried by one beam of an RRH at distance `r` towards a user
/// served by `n_rprime` RRHs, with the published Gamma parameters.
pub fn phi_v(t: f64, r: f64, n_rprime: u32, alpha: f64, m: u32) -> Complex64 {
    phi_v_with(t, r, &crate::gamma::gamma_params(m, n_rprime), alpha)
}

pub fn phi_v_with(t: f64, r: f64, g: &GammaParams, alpha: f64) -> Complex64 {
    cf_gamma(g.k, t * g.s * r.powf(-alpha))
}

/// Options of the analytic pipeline beyond the network parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyticConfig {
    pub gamma: GammaModel,
    pub rrh_overlap: RrhOverlapModel,
    /// Serving-set size law of users interfered by out-of-set RRHs.
    pub interfered_set: InterferedSetLaw,
    /// Outer radius of the out-of-set interference field; `None` is the
    /// infinite plane.
    pub outer_radius: Option<f64>,
    /// Kronrod panels of the radial rule over `[ln r0, ln r1]`.
    pub radial_panels: usize,
}

impl Default for AnalyticConfig {
    fn default() -> Self {
        AnalyticConfig {
            gamma: GammaModel::Printed,
            rrh_overlap: RrhOverlapModel::default(),
            interfered_set: InterferedSetLaw::default(),
            outer_radius: None,
            radial_panels: 8,
        }
    }
}

/// Radial rule for `E[g(r)]` with `r` distributed as `2r / (r1² - r0²)` on
/// `[r0, r1]`, built in `ln r`.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    pub fn new(r0: f64, r1: f64, panels: usize) -> Self {
        let rule = CompositeRule::new(r0.ln(), r1.ln(), panels.max(1));
        let norm = 2.0 / (r1 * r1 - r0 * r0);
        let nodes: Vec<f64> = rule.nodes.iter().map(|s| s.exp()).collect();
        let weights = nodes.iter().zip(&rule.weights).map(|(r, w)| w * norm * r * r).collect();
        RadialRule { nodes, weights }
    }
}

/// Everything needed to evaluate the conditional characteristic functions.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    pub params: NetworkParams,
    pub policy: TruncationPolicy,
    pub config: AnalyticConfig,
    /// `gammas[N - 1]` holds the parameters for `N` serving RRHs.
    gammas: Vec<GammaParams>,
    radial: RadialRule,
    tables: OverlapTables,
    /// Shared fraction and exclusive mean of the user-side overlap per node.
    user_overlap: Vec<(f64, f64)>,
    n_r_max: usize,
    n_u_max: usize,
    pi2: Pi2Table,
}

impl AnalyticModel {
    pub fn new(params: NetworkParams, policy: TruncationPolicy, config: AnalyticConfig) -> Result<Self> {
        let params = params.validate()?;
        let policy = policy.validate()?;
        if let Some(radius) = config.outer_radius {
            if !(radius > params.r1) {
                return Err(crate::error::ParamError::Window { radius, r1: params.r1 }.into());
            }
        }
        let mu_r = params.mean_rrhs_per_set();
        let mu_u = params.mean_users_per_set();
        // Product truncation: each margin may drop a quarter of the budget.
        let margins = TruncationPolicy {
            tail_mass_eps: 0.25 * policy.tail_mass_eps,
            ..policy
        };
        let n_r_max = margins.poisson_cutoff(mu_r).max(1);
        let n_u_max = margins.poisson_cutoff(mu_u);
        let radial = RadialRule::new(params.r0, params.r1, config.radial_panels);
        let tables = OverlapTables::build(
            &radial.nodes,
            params.lambda_u,
            params.lambda_r,
            params.r1,
            n_u_max,
            n_r_max,
            &config.rrh_overlap,
            &policy,
        );
        let disk = PI * params.r1 * params.r1;
        let user_overlap = radial
            .nodes
            .iter()
            .map(|&r| {
                let shared = lens_area_linearized(r, params.r1).min(disk);
                (shared / disk, params.lambda_u * (disk - shared))
            })
            .collect();
        let longest_rrh = (0..radial.nodes.len())
            .flat_map(|q| (1..=n_r_max).map(move |n| (q, n)))
            .map(|(q, n)| tables.rrh(q, n).len())
            .max()
            .unwrap_or(1);
        let m_cut = policy.poisson_cutoff(mu_r).max(1);
        let n_gamma = longest_rrh.max(m_cut + 2).max(2);
        let gammas = config.gamma.table(params.antennas, n_gamma)?;
        let pi2 = Pi2Table::build(&params, &policy, &gammas, config.interfered_set)?;
        Ok(AnalyticModel {
            params,
            policy,
            config,
            gammas,
            radial,
            tables,
            user_overlap,
            n_r_max,
            n_u_max,
            pi2,
        })
    }

    pub fn gammas(&self) -> &[GammaParams] {
        &self.gammas
    }

    pub fn radial(&self) -> &RadialRule {
        &self.radial
    }

    /// Largest `n_R` and `n_U` with tabulated conditional laws.
    pub fn strata_limits(&self) -> (usize, usize) {
        (self.n_r_max, self.n_u_max)
    }

    fn gamma(&self, n: usize) -> &GammaParams {
        &self.gammas[(n - 1).min(self.gammas.len() - 1)]
    }

    /// `sum_{n_R'} p(n_R' | n_R, r) phi_V(t | n_R', r)` for a given law.
    fn psi(&self, t: f64, r: f64, law: &[f64]) -> Complex64 {
        let x = t * r.powf(-self.params.alpha);
        let mass: f64 = law.iter().sum();
        law.iter()
            .enumerate()
            .skip(1)
            .filter(|(_, p)| **p > 0.0)
            .map(|(n, &p)| {
                let g = self.gamma(n);
                p * cf_gamma(g.k, x * g.s)
            })
            .sum::<Complex64>()
            / mass
    }

    /// In-set interference carried by one serving RRH at distance `r`,
    /// as the truncated mixture over the number of users it serves.
    ///
    /// # Panics
    ///
    /// Panics if `n_r == 0`.
    pub fn phi_t(&self, t: f64, r: f64, n_r: usize, n_u: usize) -> Complex64 {
        let p = &self.params;
        let rrh = cond_rrh_count_dist(n_r, r, p.lambda_r, p.r1, &self.config.rrh_overlap, &self.policy);
        let users = cond_user_count_dist(n_u, r, p.lambda_u, p.r1, &self.policy);
        let psi = self.psi(t, r, &rrh);
        let mut power = ONE;
        let mut acc = Complex64::new(0.0, 0.0);
        for &pu in &users {
            acc += pu * power;
            power *= psi;
        }
        acc
    }

    /// Conditional characteristic function of `P_U - theta P_I1` given
    /// `n_R` serving RRHs and `n_U` users in the target's cooperative set.
    pub fn phi_pu_prime(&self, t: f64, theta: f64, n_r: usize, n_u: usize) -> Complex64 {
        if n_r == 0 {
            return ONE;
        }
        let mut out = [Complex64::new(0.0, 0.0)];
        self.eval_strata(t, theta, &[(n_r, n_u)], &mut out);
        out[0]
    }

    /// Characteristic function of the out-of-set interference `P_I2`.
    pub fn phi_pi2(&self, t: f64) -> Complex64 {
        self.pi2.eval(t, self.config.outer_radius)
    }

    /// `phi_PU'(t | n_R, n_U)` for every stratum in `strata`, written to
    /// `out`. Strata with `n_R = 0` get 1.
    ///
    /// This is the cached path: conditional laws come from the radial tables
    /// and the mixture over `n_U'` is summed in closed form through the
    /// generating function of its law, `(1 - q + q z)^{n_U} e^{mu (z - 1)}`.
    pub fn eval_strata(&self, t: f64, theta: f64, strata: &[(usize, usize)], out: &mut [Complex64]) {
        assert_eq!(strata.len(), out.len());
        let alpha = self.params.alpha;
        let m = f64::from(self.params.antennas);
        let n_r_top = strata.iter().map(|s| s.0).max().unwrap_or(0).min(self.n_r_max);
        let mut acc = vec![Complex64::new(0.0, 0.0); strata.len()];
        let mut v = Vec::new();
        let mut base = vec![ONE; n_r_top + 1];
        let mut factor = vec![ONE; n_r_top + 1];
        for (q, (&r, &w)) in self.radial.nodes.iter().zip(&self.radial.weights).enumerate() {
            let decay = r.powf(-alpha);
            let s = cf_gamma(m, t * decay);
            // Interference enters with argument -theta t.
            let x = -theta * t * decay;
            let (share, excl) = self.user_overlap[q];
            for n_r in 1..=n_r_top {
                let law = self.tables.rrh(q, n_r);
                if v.len() < law.len() {
                    v.extend((v.len()..law.len()).map(|n| {
                        let g = self.gamma(n.max(1));
                        cf_gamma(g.k, x * g.s)
                    }));
                }
                let mass: f64 = law.iter().sum();
                let psi = law.iter().zip(&v).skip(1).map(|(p, c)| p * c).sum::<Complex64>() / mass;
                base[n_r] = (1.0 - share) + share * psi;
                factor[n_r] = (excl * (psi - 1.0)).exp();
            }
            v.clear();
            for (k, &(n_r, n_u)) in strata.iter().enumerate() {
                if n_r == 0 {
                    continue;
                }
                let n_r = n_r.min(n_r_top);
                let t_val = base[n_r].powu(n_u as u32) * factor[n_r];
                acc[k] += w * s * t_val;
            }
        }
        for (k, &(n_r, _)) in strata.iter().enumerate() {
            out[k] = if n_r == 0 { ONE } else { acc[k].powu(n_r as u32) };
        }
    }

    /// Full integrand of the coverage probability for every stratum:
    /// `phi_PU'(t) phi_PI2(-theta t) e^{-j t theta N0}`.
    pub fn coverage_cf(&self, t: f64, theta: f64, strata: &[(usize, usize)], out: &mut [Complex64]) {
        self.eval_strata(t, theta, strata, out);
        let common = self.phi_pi2(-theta * t) * Complex64::from_polar(1.0, -t * theta * self.params.noise);
        out.iter_mut().for_each(|z| *z *= common);
    }

    /// Same as [`AnalyticModel::phi_pu_prime`] but integrating the series
    /// form of `phi_T` at the radial nodes. Reference path for tests.
    pub fn phi_pu_prime_series(&self, t: f64, theta: f64, n_r: usize, n_u: usize) -> Complex64 {
        if n_r == 0 {
            return ONE;
        }
        let m = self.params.antennas;
        let a: Complex64 = self
            .radial
            .nodes
            .iter()
            .zip(&self.radial.weights)
            .map(|(&r, &w)| w * phi_s(t, r, m, self.params.alpha) * self.phi_t(-theta * t, r, n_r, n_u))
            .sum();
        a.powu(n_r as u32)
    }

    /// Mean of `P_I2` by Campbell's theorem, coded from the closed-form
    /// radial integral.
    pub fn campbell_mean_pi2(&self) -> f64 {
        campbell_mean_pi2(
            &self.params,
            &self.policy,
            &self.gammas,
            self.config.interfered_set,
            self.config.outer_radius,
        )
    }

    pub fn pi2_table(&self) -> &Pi2Table {
        &self.pi2
    }
}

/// `2 pi lambda_R E[n] E[Z] ∫_{r1}^{R} r^{1-alpha} dr` with `n` the user
/// count of an RRH's disk and `Z` averaged over the interfered user's
/// serving-set size law.
pub fn campbell_mean_pi2(
    params: &NetworkParams,
    policy: &TruncationPolicy,
    gammas: &[GammaParams],
    law: InterferedSetLaw,
    outer: Option<f64>,
) -> f64 {
    let mu_u = params.mean_users_per_set();
    let mean_z: f64 = law
        .pmf(params.mean_rrhs_per_set(), policy)
        .iter()
        .map(|&(m, p)| p * gammas[(m - 1).min(gammas.len() - 1)].mean())
        .sum();
    let e = params.alpha - 2.0;
    let radial = params.r1.powf(-e) / e - outer.map_or(0.0, |big| big.powf(-e) / e);
    2.0 * PI * params.lambda_r * mu_u * mean_z * radial
}

/// `F(y) = sum_n p(n) [1 - psi(y)^n]`, the per-RRH factor of the
/// out-of-set interference exponent, with `psi` the mixture of Gamma
/// characteristic functions over the truncated serving-set size law.
#[derive(Debug, Clone)]
struct Pi2Kernel {
    user_pmf: Vec<f64>,
    mix: Vec<(f64, GammaParams)>,
    /// Below this argument `F` is evaluated from its expansion, which
    /// avoids the cancellation in `1 - psi^n`.
    y_small: f64,
    c1: Complex64,
    c2: Complex64,
}

impl Pi2Kernel {
    fn psi(&self, y: f64) -> Complex64 {
        self.mix.iter().map(|(p, g)| p * cf_gamma(g.k, y * g.s)).sum()
    }

    fn f(&self, y: f64) -> Complex64 {
        if y < self.y_small {
            return self.c1 * y + self.c2 * y * y;
        }
        let psi = self.psi(y);
        let mut power = ONE;
        let mut acc = Complex64::new(0.0, 0.0);
        for &p in self.user_pmf.iter().skip(1) {
            power *= psi;
            acc += p * (1.0 - power);
        }
        // n = 0 contributes nothing.
        acc
    }

    /// Coefficients `c1, c2` of `F(y) ≈ c1 y + c2 y²` near zero. The next
    /// real and imaginary terms are two orders higher.
    fn expansion(&self) -> (Complex64, Complex64) {
        let m1: f64 = self.mix.iter().map(|(p, g)| p * g.k * g.s).sum();
        let m2: f64 = self.mix.iter().map(|(p, g)| p * g.k * (g.k + 1.0) * g.s * g.s).sum();
        let (mut en, mut enn) = (0.0, 0.0);
        for (n, &p) in self.user_pmf.iter().enumerate() {
            en += p * n as f64;
            enn += p * (n * n.saturating_sub(1)) as f64;
        }
        let c1 = Complex64::new(0.0, -en * m1);
        let c2 = Complex64::new(0.5 * (en * m2 + enn * m1 * m1), 0.0);
        (c1, c2)
    }
}

/// Tabulated `G(u) = ∫_{-inf}^{u} F(e^s) e^{-2 s / alpha} ds`.
///
/// With `x = |t| r1^{-alpha}`, the exponent of `phi_PI2(t)` over the annulus
/// `r1 ≤ r ≤ R` is `-2 pi lambda_R (r1² / alpha) x^{2/alpha}
/// [G(ln x) - G(ln x - alpha ln(R / r1))]`, so one table serves every `t`.
/// Values between grid points use cubic Hermite interpolation with the exact
/// derivative `G'(u) = F(e^u) e^{-2u/alpha}`; below the grid the two-term
/// small-`y` expansion of `F` is integrated in closed form.
#[derive(Debug, Clone)]
pub struct Pi2Table {
    kernel: Pi2Kernel,
    alpha: f64,
    lambda_r: f64,
    r1: f64,
    lo: f64,
    step: f64,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
    c1: Complex64,
    c2: Complex64,
}

impl Pi2Table {
    fn build(
        params: &NetworkParams,
        policy: &TruncationPolicy,
        gammas: &[GammaParams],
        law: InterferedSetLaw,
    ) -> Result<Self> {
        let mu_r = params.mean_rrhs_per_set();
        let mu_u = params.mean_users_per_set();
        let user_pmf: Vec<f64> = (0..=policy.poisson_cutoff(mu_u)).map(|n| poisson_pmf(mu_u, n)).collect();
        let mut mix: Vec<(f64, GammaParams)> = law
            .pmf(mu_r, policy)
            .into_iter()
            .map(|(m, p)| (p, gammas[(m - 1).min(gammas.len() - 1)]))
            .collect();
        // Renormalize so that psi(0) = 1 exactly and F vanishes at the origin.
        let mass: f64 = mix.iter().map(|(p, _)| p).sum();
        mix.iter_mut().for_each(|(p, _)| *p /= mass);
        let scale = mix.iter().map(|(_, g)| g.s * (g.k + 1.0)).fold(0.0, f64::max);
        let mut kernel = Pi2Kernel {
            user_pmf,
            mix,
            y_small: 1e-4 / scale,
            c1: Complex64::new(0.0, 0.0),
            c2: Complex64::new(0.0, 0.0),
        };
        let (c1, c2) = kernel.expansion();
        kernel.c1 = c1;
        kernel.c2 = c2;
        let lo = kernel.y_small.ln();
        let hi = 60.0;
        let step = 0.04;
        let n_steps = ((hi - lo) / step).ceil() as usize;
        let alpha = params.alpha;
        let g_prime = |u: f64| kernel.f(u.exp()) * (-2.0 * u / alpha).exp();
        let mut values = Vec::with_capacity(n_steps + 1);
        let mut slopes = Vec::with_capacity(n_steps + 1);
        let eps = 1.0 - 2.0 / alpha;
        let mut g = c1 * (eps * lo).exp() / eps + c2 * ((2.0 - 2.0 / alpha) * lo).exp() / (2.0 - 2.0 / alpha);
        for i in 0..=n_steps {
            let u = lo + i as f64 * step;
            if i > 0 {
                let a = u - step;
                g += kronrod_panel(a, u).map(|(s, w)| w * g_prime(s)).sum::<Complex64>();
            }
            values.push(g);
            slopes.push(g_prime(u));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("out-of-set interference table is not finite"));
        }
        Ok(Pi2Table {
            kernel,
            alpha,
            lambda_r: params.lambda_r,
            r1: params.r1,
            lo,
            step,
            values,
            slopes,
            c1,
            c2,
        })
    }

    /// `G(u)` for any real `u`.
    fn big_g(&self, u: f64) -> Complex64 {
        let alpha = self.alpha;
        let eps = 1.0 - 2.0 / alpha;
        if u <= self.lo {
            let b = 2.0 - 2.0 / alpha;
            return self.c1 * (eps * u).exp() / eps + self.c2 * (b * u).exp() / b;
        }
        let last = self.values.len() - 1;
        let pos = (u - self.lo) / self.step;
        if pos >= last as f64 {
            // F is within rounding of its limit this far out; integrate the
            // remaining exponential in closed form.
            let top = self.lo + last as f64 * self.step;
            let f_top = self.slopes[last] * (2.0 * top / alpha).exp();
            let extra = 0.5 * alpha * ((-2.0 * top / alpha).exp() - (-2.0 * u / alpha).exp());
            return self.values[last] + f_top * extra;
        }
        let i = pos.floor() as usize;
        let h = self.step;
        let x = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let x2 = x * x;
        let x3 = x2 * x;
        y0 * (2.0 * x3 - 3.0 * x2 + 1.0) + d0 * (x3 - 2.0 * x2 + x) + y1 * (-2.0 * x3 + 3.0 * x2) + d1 * (x3 - x2)
    }

    /// `∫_{r1}^{R} F(|t| r^{-alpha}) r dr`, conjugated for negative `t`.
    pub fn radial_integral(&self, t: f64, outer: Option<f64>) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = t.abs() * self.r1.powf(-self.alpha);
        let u = x.ln();
        let mut g = self.big_g(u);
        if let Some(big) = outer {
            g -= self.big_g(u - self.alpha * (big / self.r1).ln());
        }
        let value = self.r1 * self.r1 / self.alpha * x.powf(2.0 / self.alpha) * g;
        if t < 0.0 {
            value.conj()
        } else {
            value
        }
    }

    pub fn eval(&self, t: f64, outer: Option<f64>) -> Complex64 {
        (-2.0 * PI * self.lambda_r * self.radial_integral(t, outer)).exp()
    }

    /// `F(y)` from the truncated double series.
    pub fn kernel(&self, y: f64) -> Complex64 {
        self.kernel.f(y)
    }

    /// `F(y)` from the user-count generating function,
    /// `1 - exp(mu_U (psi(y) - 1))`, without truncating the series in `n`.
    pub fn kernel_pgf(&self, y: f64, mu_u: f64) -> Complex64 {
        1.0 - (mu_u * (self.kernel.psi(y) - 1.0)).exp()
    }

    /// Direct adaptive evaluation of [`Pi2Table::radial_integral`] after
    /// the substitution `r = r1 v^{-1/(alpha eps)}`, `eps = 1 - 2/alpha`.
    /// Reference path for tests.
    pub fn radial_integral_direct(&self, t: f64, outer: Option<f64>, rel_tol: f64) -> Result<Complex64> {
        let alpha = self.alpha;
        let eps = 1.0 - 2.0 / alpha;
        let x = t.abs() * self.r1.powf(-alpha);
        let v_min = outer.map_or(0.0, |big| (big / self.r1).powf(-alpha * eps));
        // Break where x w crosses 1 so the transition sits on a panel edge.
        let mut breaks = vec![v_min];
        let knee = x.powf(-eps);
        if knee > v_min && knee < 1.0 {
            breaks.push(knee);
        }
        breaks.push(1.0);
        let r = integrate_vec(
            |v, out| {
                let w = v.powf(1.0 / eps);
                let val = if w == 0.0 {
                    // Limit of F(x w) / w.
                    self.c1 * x
                } else {
                    self.kernel.f(x * w) / w
                };
                out[0] = val.re;
                out[1] = val.im;
            },
            &breaks,
            2,
            &[1.0, 1.0],
            Tolerance::new(1e-300, rel_tol),
        )?;
        let value = Complex64::new(r.values[0], r.values[1]) * (self.r1 * self.r1 / (alpha * eps));
        Ok(if t < 0.0 { value.conj() } else { value })
    }
}

/// Conditional pmfs as used by the engine, for inspection.
pub fn engine_laws(model: &AnalyticModel, node: usize, n_r: usize, n_u: usize) -> (Vec<f64>, Vec<f64>) {
    (
        model.tables.rrh(node, n_r).to_vec(),
        model.tables.user(node, n_u).to_vec(),
    )
}

/// Whether a lens choice leaves the RRH-side overlap degenerate (zero
/// shared area everywhere on `[r0, r1]`).
pub fn overlap_is_degenerate(lens: LensChoice, r1: f64) -> bool {
    match lens {
        LensChoice::Printed => {
            let c = chi_zeta(r1).printed;
            c.fraction(0.0) == 0.0 && c.fraction(r1) == 0.0
        }
        _ => false,
    }
}

/// Mean number of users sharing an RRH with the target, for diagnostics.
pub fn mean_users_per_rrh(params: &NetworkParams) -> f64 {
    annulus_mean(params.lambda_u, 0.0, params.r1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::presets;

    fn fig5(m: u32) -> AnalyticModel {
        AnalyticModel::new(presets::antenna_study(m), TruncationPolicy::default(), AnalyticConfig::default()).unwrap()
    }

    #[test]
    fn phi_s_reference_values() {
        assert_eq!(phi_s(0.0, 10.0, 2, 3.0), ONE);
        let z = phi_s(1.0, 1.0, 1, 3.0);
        assert!((z - Complex64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn phi_v_reduces_to_phi_s_for_single_link() {
        for t in [-3.0, 0.1, 7.0, 1e4] {
            assert!((phi_v(t, 13.0, 1, 3.0, 1) - phi_s(t, 13.0, 1, 3.0)).norm() < 1e-15);
        }
        assert_eq!(phi_v(0.0, 13.0, 4, 3.0, 2), ONE);
    }

    #[test]
    fn phi_v_mean_by_finite_difference() {
        for (n, m) in [(1, 1), (3, 2), (5, 4)] {
            let r: f64 = 20.0;
            let g = crate::gamma::gamma_params(m, n);
            let h = 1e-5 / (g.mean() * r.powf(-3.0));
            let d = (phi_v(h, r, n, 3.0, m) - phi_v(-h, r, n, 3.0, m)) / (2.0 * h);
            let mean = (-Complex64::i() * d).re;
            let exact = g.mean() * r.powf(-3.0);
            assert!((mean - exact).abs() / exact < 1e-6, "{mean} vs {exact}");
        }
    }

    #[test]
    fn radial_rule_integrates_density() {
        let rule = RadialRule::new(1.0, 100.0, 8);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        // E[r^{-3}] = 2 (r0^{-1} - r1^{-1}) / (r1² - r0²).
        let m: f64 = rule.nodes.iter().zip(&rule.weights).map(|(r, w)| w * r.powi(-3)).sum();
        let exact = 2.0 * (1.0 - 0.01) / (1e4 - 1.0);
        assert!((m - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn phi_t_edge_cases() {
        let model = fig5(1);
        assert!((model.phi_t(0.0, 40.0, 3, 2) - ONE).norm() < 2e-6);
        // At r = 0 the user disks coincide: with n_U = 0 and no exclusive
        // region left, nobody else is served.
        let p = presets::antenna_study(1);
        let users = cond_user_count_dist(0, 0.0, p.lambda_u, p.r1, &TruncationPolicy::default());
        assert_eq!(users, vec![1.0]);
        assert!((model.phi_t(123.0, 0.0, 3, 0) - ONE).norm() < 1e-15);
    }

    #[test]
    fn cached_strata_match_series_path() {
        let model = fig5(2);
        for &(t, theta) in &[(10.0, 1.0), (3e3, 0.5), (2e5, 4.0), (-40.0, 2.0)] {
            for &(n_r, n_u) in &[(1, 0), (2, 1), (4, 3), (7, 2)] {
                let a = model.phi_pu_prime(t, theta, n_r, n_u);
                let b = model.phi_pu_prime_series(t, theta, n_r, n_u);
                assert!((a - b).norm() < 1e-5, "{t} {theta} {n_r} {n_u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn phi_pu_prime_basic_properties() {
        let model = fig5(1);
        for t in [0.5, 17.0, 900.0, 1e5] {
            assert_eq!(model.phi_pu_prime(t, 1.0, 0, 3), ONE);
            let a = model.phi_pu_prime(t, 1.0, 3, 1);
            let b = model.phi_pu_prime(-t, 1.0, 3, 1);
            assert!((a - b.conj()).norm() < 1e-12);
            assert!(a.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn radial_rule_is_converged() {
        let p = presets::antenna_study(1);
        let coarse = fig5(1);
        let fine = AnalyticModel::new(
            p,
            TruncationPolicy::default(),
            AnalyticConfig {
                radial_panels: 24,
                ..AnalyticConfig::default()
            },
        )
        .unwrap();
        for t in [1.0, 1e2, 1e4, 1e6, 1e8] {
            let a = coarse.phi_pu_prime(t, 2.0, 3, 1);
            let b = fine.phi_pu_prime(t, 2.0, 3, 1);
            assert!((a - b).norm() < 1e-7, "{t}: {a} vs {b}");
        }
    }

    #[test]
    fn pi2_kernel_series_matches_pgf() {
        let model = fig5(1);
        let mu_u = model.params.mean_users_per_set();
        for y in [1e-4, 0.3, 5.0, 1e3] {
            let a = model.pi2_table().kernel(y);
            let b = model.pi2_table().kernel_pgf(y, mu_u);
            assert!((a - b).norm() < 5e-6, "{y}: {a} vs {b}");
        }
    }

    #[test]
    fn pi2_table_matches_direct_quadrature() {
        for (params, outer) in [
            (presets::density_study(1.27e-4, 3.18e-5), None),
            (presets::density_study(4e-4, 1e-4), Some(400.0)),
            (presets::antenna_study(2), Some(500.0)),
            (presets::antenna_study(1), None),
        ] {
            let model = AnalyticModel::new(params, TruncationPolicy::default(), AnalyticConfig::default()).unwrap();
            let table = model.pi2_table();
            for t in [1e-2, 3.0, 1e3, 1e5, 1e8] {
                let a = table.radial_integral(t, outer);
                let b = table.radial_integral_direct(t, outer, 1e-10).unwrap();
                assert!((a - b).norm() <= 1e-7 * b.norm(), "{t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pi2_campbell_mean() {
        for (params, outer) in [
            (presets::density_study(1.27e-4, 3.18e-5), None),
            (presets::antenna_study(1), Some(500.0)),
            (presets::antenna_study(4), None),
        ] {
            let model = AnalyticModel::new(
                params,
                TruncationPolicy::default(),
                AnalyticConfig {
                    outer_radius: outer,
                    ..AnalyticConfig::default()
                },
            )
            .unwrap();
            let mean = model.campbell_mean_pi2();
            let h = 1e-4 / mean;
            let d = (model.phi_pi2(h) - model.phi_pi2(-h)) / (2.0 * h);
            let fd = (-Complex64::i() * d).re;
            assert!((fd - mean).abs() / mean < 1e-3, "{fd} vs {mean}");
        }
    }

    #[test]
    fn pi2_modulus_properties() {
        let model = fig5(1);
        assert_eq!(model.phi_pi2(0.0), ONE);
        let mut last = 1.0;
        for k in 0..200 {
            let t = 10f64.powf(-4.0 + k as f64 * 0.08);
            let z = model.phi_pi2(t);
            assert!(z.norm() <= last + 1e-12, "{t}");
            assert!((model.phi_pi2(-t) - z.conj()).norm() < 1e-14);
            last = z.norm();
        }
    }

    #[test]
    fn pi2_vanishes_without_users() {
        let p = NetworkParams {
            lambda_u: 1e-12,
            ..presets::antenna_study(1)
        };
        let model = AnalyticModel::new(p, TruncationPolicy::default(), AnalyticConfig::default()).unwrap();
        for t in [1.0, 1e4, 1e8] {
            assert!((model.phi_pi2(t) - ONE).norm() < 1e-6);
        }
    }

    #[test]
    fn fn_cf_carries_metadata() {
        let cf = FnCf::new("exp(1)", |t| 1.0 / Complex64::new(1.0, -t)).with_validity("all t");
        assert_eq!(cf.description(), "exp(1)");
        assert_eq!(cf.validity(), "all t");
        assert_eq!(cf.eval(0.0), ONE);
    }
}
