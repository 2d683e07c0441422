//! Coverage probability by Gil-Pelaez inversion.
//!
//! For `X` with characteristic function `phi`,
//! `P(X > c) = 1/2 + (1/pi) ∫_0^inf Im[phi(t) e^{-j t c}] / t dt`.
//! The integral runs over `s = ln t` so the slow decay of the
//! characteristic functions involved costs a few panels per decade. Below
//! `t_min` the integrand is constant to first order and contributes
//! `Im[phi(t_min)]`. When the shift is non-zero the part past one period
//! switches to linear `t` with about one panel per period.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{AnalyticModel, ComplexCf};
use crate::error::{Error, Result};
use crate::params::TruncationPolicy;
use crate::quad::{integrate_vec, Tolerance};
use crate::setstats::poisson_pmf;

/// Largest `|phi(t) - 1|` at which the small-`t` correction is trusted.
const SMALL_T_DEVIATION: f64 = 1e-6;
/// Initial panels of the linear-`t` oscillatory segment, at most.
const MAX_PANELS: usize = 100_000;

/// Outcome of one inversion.
#[derive(Debug, Clone, Serialize)]
pub struct GpResult {
    /// Per-component `P(X_c > shift)`.
    pub probabilities: Vec<f64>,
    /// Error estimate on the weighted sum of probabilities.
    pub error: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// Weighted `|phi|` at `t_max`, a bound on the truncated tail.
    pub cf_residual: f64,
    pub evaluations: usize,
}

impl GpResult {
    pub fn weighted(&self, weights: &[f64]) -> f64 {
        self.probabilities.iter().zip(weights).map(|(p, w)| p * w).sum()
    }
}

/// `P(X > shift)` for a single characteristic function.
pub fn gil_pelaez(cf: &dyn ComplexCf, shift: f64, policy: &TruncationPolicy) -> Result<f64> {
    let r = gil_pelaez_vec(|t, out| out[0] = cf.eval(t), &[1.0], shift, policy)?;
    Ok(r.probabilities[0])
}

/// Inverts several characteristic functions sharing one adaptive partition.
///
/// `cf(t, out)` fills `out` with the values at `t`; `weights` define the
/// scalar the error control applies to. Absolute accuracy on that scalar is
/// `quad_rel_tol / 2` times the total weight.
pub fn gil_pelaez_vec<F>(mut cf: F, weights: &[f64], shift: f64, policy: &TruncationPolicy) -> Result<GpResult>
where
    F: FnMut(f64, &mut [Complex64]),
{
    let dim = weights.len();
    let total_weight: f64 = weights.iter().sum();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut evaluations = 0usize;
    let mut eval = |t: f64, buf: &mut [Complex64], evaluations: &mut usize| {
        cf(t, buf);
        *evaluations += 1;
        if shift != 0.0 {
            let rot = Complex64::from_polar(1.0, -t * shift);
            buf.iter_mut().for_each(|z| *z *= rot);
        }
    };
    let norm = if total_weight > 0.0 { total_weight } else { 1.0 };
    let deviation = |buf: &[Complex64]| buf.iter().zip(weights).map(|(z, w)| w * (z - 1.0).norm()).sum::<f64>() / norm;
    let modulus = |buf: &[Complex64]| buf.iter().zip(weights).map(|(z, w)| w * z.norm()).sum::<f64>() / norm;

    // Smallest decade where the correction below t_min is accurate.
    let mut t_min = 1.0;
    eval(t_min, &mut buf, &mut evaluations);
    if deviation(&buf) > SMALL_T_DEVIATION {
        while deviation(&buf) > SMALL_T_DEVIATION {
            t_min /= 10.0;
            if t_min < 1e-300 {
                return Err(Error::domain("characteristic function does not approach 1 near the origin"));
            }
            eval(t_min, &mut buf, &mut evaluations);
        }
    } else {
        loop {
            eval(t_min * 10.0, &mut buf, &mut evaluations);
            if deviation(&buf) > SMALL_T_DEVIATION || t_min > 1e300 {
                break;
            }
            t_min *= 10.0;
        }
    }

    // t_max is the first decade below the floor whose successor is below
    // it as well.
    let tail_bound = |t: f64, buf: &[Complex64]| {
        let damp = if shift == 0.0 { 1.0 } else { (1.0 / (t * shift.abs())).min(1.0) };
        modulus(buf) * damp
    };
    let mut t_max = t_min;
    let mut below = 0;
    let mut cf_residual = f64::INFINITY;
    loop {
        let t = t_max * 10.0;
        eval(t, &mut buf, &mut evaluations);
        let bound = tail_bound(t, &buf);
        if bound <= policy.t_max_heuristic {
            below += 1;
            if below == 2 {
                break;
            }
            cf_residual = bound;
        } else {
            below = 0;
        }
        t_max = t;
        if t_max > 1e60 {
            return Err(Error::Quadrature {
                context: "Gil-Pelaez truncation point".into(),
                estimate: t_max,
                residual: cf_residual,
                tolerance: policy.t_max_heuristic,
            });
        }
    }

    let tol = Tolerance {
        abs: 0.5 * PI * policy.quad_rel_tol * norm,
        rel: 0.0,
        max_panels: 400_000,
    };
    let period = if shift == 0.0 { f64::INFINITY } else { 2.0 * PI / shift.abs() };
    let t_switch = period.min(t_max);
    let (ls, lm) = (t_min.ln(), t_switch.ln());
    let n_decades = ((lm - ls) / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=n_decades).map(|k| ls + (lm - ls) * k as f64 / n_decades as f64).collect();
    let mut values = vec![0.0; dim];
    let mut error = 0.0;
    if lm > ls {
        let r = integrate_vec(
            |s, out| {
                eval(s.exp(), &mut buf, &mut evaluations);
                for (o, z) in out.iter_mut().zip(buf.iter()) {
                    *o = z.im;
                }
            },
            &breaks,
            dim,
            weights,
            tol,
        )?;
        values.iter_mut().zip(&r.values).for_each(|(v, x)| *v += x);
        error += r.error;
    }
    if t_max > t_switch {
        // One panel per period, or wider panels past the cap; the adaptive
        // rule splits those that need it.
        let n_panels = (((t_max - t_switch) / period).ceil() as usize).clamp(1, MAX_PANELS);
        let width = (t_max - t_switch) / n_panels as f64;
        let breaks: Vec<f64> = (0..=n_panels).map(|k| t_switch + k as f64 * width).collect();
        let r = integrate_vec(
            |t, out| {
                eval(t, &mut buf, &mut evaluations);
                for (o, z) in out.iter_mut().zip(buf.iter()) {
                    *o = z.im / t;
                }
            },
            &breaks,
            dim,
            weights,
            tol,
        )?;
        values.iter_mut().zip(&r.values).for_each(|(v, x)| *v += x);
        error += r.error;
    }
    eval(t_min, &mut buf, &mut evaluations);
    let probabilities = values
        .iter()
        .zip(&buf)
        .map(|(v, z)| (0.5 + (v + z.im) / PI).clamp(0.0, 1.0))
        .collect();
    Ok(GpResult {
        probabilities,
        error: error / PI,
        t_min,
        t_max,
        cf_residual,
        evaluations,
    })
}

/// Cooperative-set strata `(n_R, n_U)` with their probabilities, in
/// descending order, keeping all but `tail_mass_eps` of the mass with
/// `n_R ≥ 1`.
#[derive(Debug, Clone)]
pub struct Strata {
    pub cells: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    /// Mass of `n_R ≥ 1` left out.
    pub neglected: f64,
}

impl Strata {
    pub fn new(model: &AnalyticModel) -> Self {
        let mu_r = model.params.mean_rrhs_per_set();
        let mu_u = model.params.mean_users_per_set();
        let (n_r_max, n_u_max) = model.strata_limits();
        let mut all: Vec<((usize, usize), f64)> = (1..=n_r_max)
            .flat_map(|r| (0..=n_u_max).map(move |u| (r, u)))
            .map(|(r, u)| ((r, u), poisson_pmf(mu_r, r) * poisson_pmf(mu_u, u)))
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let target = -(-mu_r).exp_m1();
        let eps = model.policy.tail_mass_eps;
        let mut kept = 0.0;
        let mut cells = Vec::new();
        let mut weights = Vec::new();
        for (cell, p) in all {
            if target - kept <= eps {
                break;
            }
            kept += p;
            cells.push(cell);
            weights.push(p);
        }
        Strata {
            cells,
            weights,
            neglected: (target - kept).max(0.0),
        }
    }
}

/// One evaluated point of a coverage curve.
#[derive(Debug, Clone, Serialize)]
pub struct CoveragePoint {
    pub theta: f64,
    pub coverage: f64,
    pub quad_error: f64,
    pub neglected_mass: f64,
    pub t_max: f64,
    pub cf_residual: f64,
    pub evaluations: usize,
}

/// `P(SINR > theta)` at the target user.
pub fn coverage_probability(model: &AnalyticModel, theta: f64) -> Result<CoveragePoint> {
    coverage_with_strata(model, &Strata::new(model), theta)
}

fn coverage_with_strata(model: &AnalyticModel, strata: &Strata, theta: f64) -> Result<CoveragePoint> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::domain(format!("threshold must be finite and non-negative, got {theta}")));
    }
    let served = -(-model.params.mean_rrhs_per_set()).exp_m1();
    let budget = model.policy.tail_mass_eps;
    if strata.neglected > budget * (1.0 + 1e-9) {
        return Err(Error::Truncation {
            context: "cooperative-set strata".into(),
            neglected: strata.neglected,
            budget,
        });
    }
    if theta == 0.0 {
        // The useful power is positive whenever somebody serves the user.
        return Ok(CoveragePoint {
            theta,
            coverage: served,
            quad_error: 0.0,
            neglected_mass: 0.0,
            t_max: 0.0,
            cf_residual: 0.0,
            evaluations: 0,
        });
    }
    let r = gil_pelaez_vec(
        |t, out| model.coverage_cf(t, theta, &strata.cells, out),
        &strata.weights,
        0.0,
        &model.policy,
    )
    .map_err(|e| e.in_context(format!("coverage at theta = {theta}")))?;
    Ok(CoveragePoint {
        theta,
        coverage: r.weighted(&strata.weights).clamp(0.0, 1.0),
        quad_error: r.error,
        neglected_mass: strata.neglected,
        t_max: r.t_max,
        cf_residual: r.cf_residual,
        evaluations: r.evaluations,
    })
}

/// Coverage against threshold, optionally with confidence bands.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageCurve {
    pub label: String,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

impl CoverageCurve {
    pub fn thetas_db(&self) -> Vec<f64> {
        self.thetas.iter().map(|t| 10.0 * t.log10()).collect()
    }

    /// Largest absolute difference at common thresholds.
    ///
    /// # Panics
    ///
    /// Panics if the threshold grids differ.
    pub fn max_gap(&self, other: &CoverageCurve) -> f64 {
        assert_eq!(self.thetas, other.thetas, "curves on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Analytic coverage with diagnostics at each threshold, evaluated in
/// parallel and collected in input order.
pub fn coverage_points(model: &AnalyticModel, thetas: &[f64]) -> Result<Vec<CoveragePoint>> {
    let strata = Strata::new(model);
    thetas
        .par_iter()
        .map(|&th| coverage_with_strata(model, &strata, th))
        .collect()
}

pub fn coverage_curve(model: &AnalyticModel, thetas: &[f64], label: impl Into<String>) -> Result<CoverageCurve> {
    let values = coverage_points(model, thetas)?.iter().map(|p| p.coverage).collect();
    Ok(CoverageCurve {
        label: label.into(),
        thetas: thetas.to_vec(),
        values,
        lower: None,
        upper: None,
    })
}

/// `P(log2(1 + SINR) ≤ s)`.
pub fn se_cdf(model: &AnalyticModel, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - coverage_probability(model, s.exp2() - 1.0)?.coverage)
}

/// Grid of the spectral-efficiency integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeGrid {
    /// Upper end in bit/s/Hz.
    pub s_max: f64,
    /// Even number of Simpson intervals.
    pub intervals: usize,
}

impl Default for SeGrid {
    fn default() -> Self {
        SeGrid {
            s_max: 12.0,
            intervals: 24,
        }
    }
}

/// `E[log2(1 + SINR)] = ∫_0^inf P(SE > s) ds`, by Simpson's rule on
/// `[0, s_max]` plus an exponential tail fitted to the last two points.
pub fn mean_se(model: &AnalyticModel, grid: SeGrid) -> Result<f64> {
    Ok(mean_se_with_error(model, grid)?.0)
}

/// [`mean_se`] with an error estimate: the Richardson term against the
/// same rule on every other grid point, when the interval count allows it.
pub fn mean_se_with_error(model: &AnalyticModel, grid: SeGrid) -> Result<(f64, f64)> {
    let n = grid.intervals.max(2) + grid.intervals % 2;
    let h = grid.s_max / n as f64;
    let strata = Strata::new(model);
    let ccdf = (0..=n)
        .into_par_iter()
        .map(|k| coverage_with_strata(model, &strata, (k as f64 * h).exp2() - 1.0).map(|p| p.coverage))
        .collect::<Result<Vec<_>>>()?;
    let fine = simpson_with_tail(&ccdf, h);
    let error = if n % 4 == 0 {
        let coarse: Vec<f64> = ccdf.iter().step_by(2).copied().collect();
        (fine - simpson_with_tail(&coarse, 2.0 * h)).abs() / 15.0
    } else {
        f64::NAN
    };
    Ok((fine, error))
}

fn simpson_with_tail(ccdf: &[f64], h: f64) -> f64 {
    let n = ccdf.len() - 1;
    let mut sum = ccdf[0] + ccdf[n];
    for (k, v) in ccdf.iter().enumerate().take(n).skip(1) {
        sum += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let body = sum * h / 3.0;
    // Without noise a user that sees no interference has infinite SINR, an
    // atom that keeps the ccdf flat. The decay rate is floored at one over
    // the grid length so such an atom adds at most s_max times its mass.
    let (a, b) = (ccdf[n - 1], ccdf[n]);
    let fitted = if a > b && b > 0.0 { (a / b).ln() / h } else { 0.0 };
    let rate = fitted.max(1.0 / (n as f64 * h));
    body + b / rate
}
