//! Rayleigh fading, MRT beamforming with joint per-user normalization and
//! the exact received-power split at a target user.
//!
//! The channel from RRH `i` to user `j` is `g_ij = h_ij · r_ij^{-alpha/2}`,
//! so that `|g_ij|² = |h_ij|² r_ij^{-alpha}` is the received power of a unit
//! beam. User `j` is served with `w_ij = g_ij^H / |g_j|`, where `g_j` stacks
//! the channels of all its serving RRHs.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{Assignment, Point, PointSet};

/// Fading coefficients `h[i][j][k]` for RRH `i`, user `j`, antenna `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingTensor {
    n_rrh: usize,
    n_user: usize,
    antennas: usize,
    data: Vec<Complex64>,
}

impl FadingTensor {
    pub fn from_fn(
        n_rrh: usize,
        n_user: usize,
        antennas: usize,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(n_rrh * n_user * antennas);
        for i in 0..n_rrh {
            for j in 0..n_user {
                for k in 0..antennas {
                    data.push(f(i, j, k));
                }
            }
        }
        FadingTensor {
            n_rrh,
            n_user,
            antennas,
            data,
        }
    }

    /// Coefficient vector of the link `(i, j)`.
    pub fn link(&self, i: usize, j: usize) -> &[Complex64] {
        let start = (i * self.n_user + j) * self.antennas;
        &self.data[start..start + self.antennas]
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_rrh, self.n_user, self.antennas)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// One circularly-symmetric complex Gaussian with `E|h|² = 1`.
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// I.i.d. Rayleigh fading: real and imaginary parts are independent
/// zero-mean Gaussians of variance 1/2.
pub fn sample_fading<R: Rng + ?Sized>(
    n_rrh: usize,
    n_user: usize,
    antennas: usize,
    rng: &mut R,
) -> FadingTensor {
    FadingTensor::from_fn(n_rrh, n_user, antennas, |_, _, _| sample_cn(rng))
}

/// A sampled topology with its fading draw. User 0 is the target user.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub rrhs: PointSet,
    pub users: PointSet,
    pub fading: FadingTensor,
    pub alpha: f64,
}

impl NetworkRealization {
    /// Amplitude path gain `r^{-alpha/2}` between RRH `i` and point `p`.
    pub fn amplitude(&self, i: usize, p: &Point) -> f64 {
        self.rrhs[i].dist(p).powf(-0.5 * self.alpha)
    }
}

/// MRT beams: for each user `j`, one `M`-vector per entry of `C_j`, stored
/// in the same order as `Assignment::serving[j]`.
#[derive(Debug, Clone)]
pub struct MrtWeights {
    antennas: usize,
    per_user: Vec<Vec<Complex64>>,
}

impl MrtWeights {
    /// Beam of the `pos`-th serving RRH of user `j`.
    pub fn beam(&self, j: usize, pos: usize) -> &[Complex64] {
        &self.per_user[j][pos * self.antennas..(pos + 1) * self.antennas]
    }

    /// Power `|w_ij|²` of the `pos`-th serving RRH of user `j`.
    pub fn power(&self, j: usize, pos: usize) -> f64 {
        self.beam(j, pos).iter().map(|w| w.norm_sqr()).sum()
    }

    /// Total power allocated to user `j`, `Σ_i |w_ij|²`.
    pub fn user_power(&self, j: usize) -> f64 {
        self.per_user[j].iter().map(|w| w.norm_sqr()).sum()
    }

    pub fn has_beams(&self, j: usize) -> bool {
        !self.per_user[j].is_empty()
    }
}

/// Maximum ratio transmission with joint normalization
/// `w_ij = g_ij^H / |g_j|`. Users with an empty cooperative set (or an
/// all-zero stacked channel) get no beams.
pub fn mrt_weights(real: &NetworkRealization, assignment: &Assignment) -> MrtWeights {
    let m = real.fading.antennas();
    let per_user = assignment
        .serving
        .iter()
        .enumerate()
        .map(|(j, set)| {
            let user = &real.users[j];
            let mut beams = Vec::with_capacity(set.len() * m);
            let mut norm2 = 0.0;
            for &i in set {
                let amp = real.amplitude(i, user);
                for h in real.fading.link(i, j) {
                    let g = h * amp;
                    norm2 += g.norm_sqr();
                    beams.push(g.conj());
                }
            }
            if norm2 == 0.0 {
                return Vec::new();
            }
            let inv = norm2.sqrt().recip();
            beams.iter_mut().for_each(|w| *w *= inv);
            beams
        })
        .collect();
    MrtWeights {
        antennas: m,
        per_user,
    }
}

/// Received powers at a target user.
///
/// `inner` is the interference carried by RRHs that also serve the target
/// (`P_I1`), `outer` the interference from all other RRHs (`P_I2`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PowerSplit {
    pub useful: f64,
    pub inner: f64,
    pub outer: f64,
    pub noise: f64,
    /// Set when `inner` carries the signed cross term of the exact
    /// attribution and may therefore be negative.
    pub signed_inner: bool,
}

impl PowerSplit {
    pub fn interference(&self) -> f64 {
        self.inner + self.outer
    }

    /// `P_U / (P_I + N_0)`; zero without useful power, infinite without
    /// interference and noise.
    pub fn sinr(&self) -> f64 {
        if self.useful <= 0.0 {
            return 0.0;
        }
        let denom = self.interference() + self.noise;
        if denom <= 0.0 {
            f64::INFINITY
        } else {
            self.useful / denom
        }
    }
}

/// Exact received powers at `target` from the unsplit signal model.
///
/// Each interfering user's contribution `|Σ_{i∈C_j} w_ij h_it r_it^{-alpha/2}|²`
/// is split into the partial sum `a` over RRHs that serve the target and `b`
/// over the others; `|a|² + 2 Re(a b*)` goes to `inner` and `|b|²` to
/// `outer`, so `inner + outer` is the exact total.
pub fn received_power_exact(
    real: &NetworkRealization,
    assignment: &Assignment,
    weights: &MrtWeights,
    target: usize,
    noise: f64,
) -> PowerSplit {
    let t_point = real.users[target];
    let target_set = &assignment.serving[target];
    let contribution = |j: usize, pos: usize, i: usize| -> Complex64 {
        let beam = weights.beam(j, pos);
        let h = real.fading.link(i, target);
        let dot: Complex64 = beam.iter().zip(h).map(|(w, h)| w * h).sum();
        dot * real.amplitude(i, &t_point)
    };

    let useful = if weights.has_beams(target) {
        target_set
            .iter()
            .enumerate()
            .map(|(pos, &i)| contribution(target, pos, i))
            .sum::<Complex64>()
            .norm_sqr()
    } else {
        0.0
    };

    let (mut inner, mut outer) = (0.0, 0.0);
    for (j, set) in assignment.serving.iter().enumerate() {
        if j == target || !weights.has_beams(j) {
            continue;
        }
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for (pos, &i) in set.iter().enumerate() {
            let c = contribution(j, pos, i);
            if target_set.binary_search(&i).is_ok() {
                a += c;
            } else {
                b += c;
            }
        }
        inner += a.norm_sqr() + 2.0 * (a * b.conj()).re;
        outer += b.norm_sqr();
    }
    PowerSplit {
        useful,
        inner,
        outer,
        noise,
        signed_inner: true,
    }
}

/// Total received interference straight from the unsplit model, without any
/// attribution. Used to cross-check [`received_power_exact`].
pub fn total_interference_unsplit(
    real: &NetworkRealization,
    assignment: &Assignment,
    weights: &MrtWeights,
    target: usize,
) -> f64 {
    let t_point = real.users[target];
    (0..real.users.len())
        .filter(|&j| j != target && weights.has_beams(j))
        .map(|j| {
            assignment.serving[j]
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let h = real.fading.link(i, target);
                    let dot: Complex64 = weights.beam(j, pos).iter().zip(h).map(|(w, h)| w * h).sum();
                    dot * real.amplitude(i, &t_point)
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_assignment, sample_ppp_with, SimWindow};
    use crate::stats::ks_statistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn realization(rrhs: Vec<Point>, users: Vec<Point>, m: usize, seed: u64) -> NetworkRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rrhs, users) = (PointSet::new(rrhs), PointSet::new(users));
        let fading = sample_fading(rrhs.len(), users.len(), m, &mut rng);
        NetworkRealization {
            rrhs,
            users,
            fading,
            alpha: 3.0,
        }
    }

    #[test]
    fn fading_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let f = sample_fading(100, 100, 100, &mut rng);
        let n = f.as_slice().len() as f64;
        let power: f64 = f.as_slice().iter().map(|h| h.norm_sqr()).sum::<f64>() / n;
        let mean: Complex64 = f.as_slice().iter().sum::<Complex64>() / n;
        assert!((0.997..=1.003).contains(&power), "{power}");
        assert!(mean.norm() <= 0.003, "{mean}");
        let magnitudes: Vec<f64> = f.as_slice().iter().map(|h| h.norm_sqr()).collect();
        let ks = ks_statistic(&magnitudes, |x| 1.0 - (-x).exp());
        assert!(ks < 0.005, "{ks}");
    }

    #[test]
    fn single_serving_rrh_gets_full_budget() {
        for seed in 0..20 {
            let real = realization(vec![Point::new(30.0, 40.0)], vec![Point::ORIGIN], 3, seed);
            let a = build_assignment(&real.rrhs, &real.users, 100.0);
            let w = mrt_weights(&real, &a);
            assert!((w.power(0, 0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_channels_split_evenly() {
        let mut real = realization(
            vec![Point::new(50.0, 0.0), Point::new(-50.0, 0.0)],
            vec![Point::ORIGIN],
            2,
            1,
        );
        let h = [Complex64::new(0.3, -0.4), Complex64::new(1.0, 0.2)];
        real.fading = FadingTensor::from_fn(2, 1, 2, |_, _, k| h[k]);
        let a = build_assignment(&real.rrhs, &real.users, 100.0);
        let w = mrt_weights(&real, &a);
        assert!((w.power(0, 0) - 0.5).abs() < 1e-12);
        assert!((w.power(0, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shares_follow_channel_gains() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rrhs: Vec<Point> = (0..5)
            .map(|_| Point::new(rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)))
            .collect();
        let users: Vec<Point> = (0..3)
            .map(|_| Point::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)))
            .collect();
        let real = realization(rrhs, users, 4, 5);
        let a = build_assignment(&real.rrhs, &real.users, 100.0);
        let w = mrt_weights(&real, &a);
        for j in 0..3 {
            assert_eq!(a.serving[j].len(), 5);
            assert!((w.user_power(j) - 1.0).abs() < 1e-12);
            let gains: Vec<f64> = a.serving[j]
                .iter()
                .map(|&i| {
                    let amp2 = real.amplitude(i, &real.users[j]).powi(2);
                    real.fading.link(i, j).iter().map(|h| h.norm_sqr()).sum::<f64>() * amp2
                })
                .collect();
            let total: f64 = gains.iter().sum();
            for (pos, g) in gains.iter().enumerate() {
                assert!((w.power(j, pos) - g / total).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_interferers_means_no_interference() {
        let real = realization(vec![Point::new(20.0, 0.0)], vec![Point::ORIGIN], 2, 3);
        let a = build_assignment(&real.rrhs, &real.users, 100.0);
        let w = mrt_weights(&real, &a);
        let p = received_power_exact(&real, &a, &w, 0, 0.0);
        assert_eq!((p.inner, p.outer), (0.0, 0.0));
    }

    #[test]
    fn single_link_useful_power() {
        let real = realization(vec![Point::new(0.0, 25.0)], vec![Point::ORIGIN], 1, 8);
        let a = build_assignment(&real.rrhs, &real.users, 100.0);
        let w = mrt_weights(&real, &a);
        let p = received_power_exact(&real, &a, &w, 0, 0.0);
        let expected = real.fading.link(0, 0)[0].norm_sqr() * 25f64.powf(-3.0);
        assert!((p.useful - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn split_adds_up_to_unsplit_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let w = SimWindow { radius: 180.0 };
        for seed in 0..10 {
            let mut rrhs = sample_ppp_with(10.0 / w.area(), w, &mut rng);
            rrhs.push(Point::new(10.0, 10.0));
            let mut users = sample_ppp_with(9.0 / w.area(), w, &mut rng);
            users.prepend(Point::ORIGIN);
            let mut real = realization(vec![], vec![], 2, seed);
            real.fading = sample_fading(rrhs.len(), users.len(), 2, &mut rng);
            real.rrhs = rrhs;
            real.users = users;
            let a = build_assignment(&real.rrhs, &real.users, 100.0);
            let wts = mrt_weights(&real, &a);
            let p = received_power_exact(&real, &a, &wts, 0, 0.0);
            let total = total_interference_unsplit(&real, &a, &wts, 0);
            assert!(total > 0.0);
            assert!(((p.inner + p.outer) - total).abs() <= 1e-10 * total);
            assert!(p.outer >= 0.0 && p.useful > 0.0);
        }
    }
}
