//! Gauss-Kronrod quadrature for real vector-valued integrands.
//!
//! Complex integrands are handled as pairs of real components. A vector
//! integrand shares its abscissae across components, which is what makes the
//! stratified coverage computation affordable: every stratum is evaluated at
//! the same `t`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae of the 21-point rule on `[-1, 1]` (non-negative half).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_292_239_512,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Weights of the embedded 10-point Gauss rule (abscissae `XGK[1], XGK[3], ...`).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// The 21 abscissae and Kronrod weights of one panel `[a, b]`.
pub fn kronrod_panel(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (0..21).map(move |idx| {
        let (x, w) = match idx.cmp(&10) {
            Ordering::Less => (-XGK[idx], WGK[idx]),
            Ordering::Equal => (0.0, WGK[10]),
            Ordering::Greater => (XGK[20 - idx], WGK[20 - idx]),
        };
        (c + h * x, h * w)
    })
}

/// Fixed composite rule: `panels` equal Kronrod panels on `[a, b]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize) -> Self {
        let width = (b - a) / panels as f64;
        let (nodes, weights) = (0..panels)
            .flat_map(|p| {
                let lo = a + p as f64 * width;
                kronrod_panel(lo, lo + width)
            })
            .unzip();
        CompositeRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Stopping rule of the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Subdivision budget.
    pub max_panels: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_panels: 4000,
        }
    }
}

/// Result of a vector integration.
#[derive(Debug, Clone)]
pub struct VecIntegral {
    pub values: Vec<f64>,
    /// Error estimate of the weighted scalar `Σ weight_c · value_c`.
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    kronrod: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss-Kronrod (21/10) integration of a `dim`-component integrand
/// `f(x, out)` over the intervals delimited by `breaks`.
///
/// Panel errors are the weighted L1 norm `Σ weight_c |K_c - G_c|`, which is
/// the error of the Gauss estimate and therefore conservative for the
/// returned Kronrod value. The panel with the largest error is bisected until
/// the total error is below `max(tol.abs, tol.rel · |Σ weight_c value_c|)`.
pub fn integrate_vec<F>(
    mut f: F,
    breaks: &[f64],
    dim: usize,
    weights: &[f64],
    tol: Tolerance,
) -> Result<VecIntegral>
where
    F: FnMut(f64, &mut [f64]),
{
    assert!(breaks.len() >= 2, "need at least one interval");
    assert_eq!(weights.len(), dim);
    let mut scratch = vec![0.0; dim];
    let mut evaluations = 0;
    let mut eval_panel = |a: f64, b: f64, evaluations: &mut usize| -> Panel {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut kronrod = vec![0.0; dim];
        let mut gauss = vec![0.0; dim];
        for (idx, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
            let abscissae: &[f64] = if idx == 10 { &[0.0] } else { &[-1.0, 1.0] };
            for &sign in abscissae {
                f(c + sign * h * x, &mut scratch);
                *evaluations += 1;
                for d in 0..dim {
                    kronrod[d] += wk * scratch[d];
                    if idx % 2 == 1 {
                        gauss[d] += WG[idx / 2] * scratch[d];
                    }
                }
            }
        }
        let mut error = 0.0;
        for d in 0..dim {
            kronrod[d] *= h;
            gauss[d] *= h;
            error += weights[d] * (kronrod[d] - gauss[d]).abs();
        }
        Panel {
            a,
            b,
            kronrod,
            error,
        }
    };

    let mut heap = BinaryHeap::new();
    let mut running = vec![0.0; dim];
    let mut running_error = 0.0;
    let add = |p: &Panel, sign: f64, running: &mut [f64], running_error: &mut f64| {
        for d in 0..dim {
            running[d] += sign * p.kronrod[d];
        }
        *running_error += sign * p.error;
    };
    for w in breaks.windows(2) {
        let p = eval_panel(w[0], w[1], &mut evaluations);
        add(&p, 1.0, &mut running, &mut running_error);
        heap.push(p);
    }
    loop {
        let scalar: f64 = running.iter().zip(weights).map(|(v, w)| v * w).sum();
        let target = tol.abs.max(tol.rel * scalar.abs());
        if running_error <= target {
            // Re-add in a fixed order so the result does not depend on the
            // refinement history.
            let (values, error) = totals(&heap, dim);
            let scalar: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum();
            if error <= tol.abs.max(tol.rel * scalar.abs()) {
                return Ok(VecIntegral {
                    values,
                    error,
                    evaluations,
                });
            }
            running = values;
            running_error = error;
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::Quadrature {
                context: format!("[{:.4e}, {:.4e}]", breaks[0], breaks[breaks.len() - 1]),
                estimate: scalar,
                residual: running_error,
                tolerance: target,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            return Err(Error::Quadrature {
                context: format!("panel [{:.6e}, {:.6e}] exhausted", worst.a, worst.b),
                estimate: scalar,
                residual: running_error,
                tolerance: target,
            });
        }
        add(&worst, -1.0, &mut running, &mut running_error);
        for p in [eval_panel(worst.a, mid, &mut evaluations), eval_panel(mid, worst.b, &mut evaluations)] {
            add(&p, 1.0, &mut running, &mut running_error);
            heap.push(p);
        }
    }
}

fn totals(heap: &BinaryHeap<Panel>, dim: usize) -> (Vec<f64>, f64) {
    // Sum in a fixed order so results do not depend on heap layout.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut values = vec![0.0; dim];
    let mut error = 0.0;
    for p in panels {
        for d in 0..dim {
            values[d] += p.kronrod[d];
        }
        error += p.error;
    }
    (values, error)
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x, out| out[0] = f(x), breaks, 1, &[1.0], tol)?;
    Ok((r.values[0], r.error))
}

/// Evenly spaced break points.
pub fn linspace(a: f64, b: f64, n_intervals: usize) -> Vec<f64> {
    (0..=n_intervals)
        .map(|k| a + (b - a) * k as f64 / n_intervals as f64)
        .collect()
}
