//! Point-process sampling, cooperative-set construction and lens areas.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::params::{NetworkParams, SeedSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// A finite realization of a planar point process.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    /// # Panics
    ///
    /// Panics if a coordinate is not finite.
    pub fn new(points: Vec<Point>) -> Self {
        assert!(
            points.iter().all(|p| p.x.is_finite() && p.y.is_finite()),
            "point coordinates must be finite"
        );
        PointSet { points }
    }

    pub fn empty() -> Self {
        PointSet::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn push(&mut self, p: Point) {
        assert!(p.x.is_finite() && p.y.is_finite());
        self.points.push(p);
    }

    /// Inserts `p` as the first point, shifting the others.
    pub fn prepend(&mut self, p: Point) {
        self.points.insert(0, p);
    }
}

impl std::ops::Index<usize> for PointSet {
    type Output = Point;
    fn index(&self, idx: usize) -> &Point {
        &self.points[idx]
    }
}

/// Disk of radius `radius` centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimWindow {
    pub radius: f64,
}

impl SimWindow {
    pub fn new(radius: f64, r1: f64) -> Result<Self, ParamError> {
        if !(radius >= r1) {
            return Err(ParamError::Window { radius, r1 });
        }
        Ok(SimWindow { radius })
    }

    /// `r1 + 4 / sqrt(pi lambda_u)`: the cooperation disk plus four typical
    /// inter-user distances.
    pub fn default_for(params: &NetworkParams) -> Self {
        SimWindow {
            radius: params.r1 + 4.0 / (PI * params.lambda_u).sqrt(),
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
}

/// Homogeneous PPP of the given intensity on the annulus `inner ≤ |x| ≤ outer`.
pub fn sample_ppp_annulus<R: Rng + ?Sized>(
    intensity: f64,
    inner: f64,
    outer: f64,
    rng: &mut R,
) -> PointSet {
    let (a2, b2) = (inner * inner, outer * outer);
    let n = poisson_count(intensity * PI * (b2 - a2), rng);
    let points = (0..n)
        .map(|_| {
            let rho = (a2 + (b2 - a2) * rng.random::<f64>()).sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Point::new(rho * phi.cos(), rho * phi.sin())
        })
        .collect();
    PointSet { points }
}

/// Homogeneous PPP on the window, drawn from the given generator.
pub fn sample_ppp_with<R: Rng + ?Sized>(intensity: f64, window: SimWindow, rng: &mut R) -> PointSet {
    sample_ppp_annulus(intensity, 0.0, window.radius, rng)
}

/// Homogeneous PPP on the window: Poisson count with mean
/// `intensity · pi · R²`, positions i.i.d. uniform on the disk.
pub fn sample_ppp(intensity: f64, window: SimWindow, seed: SeedSpec) -> PointSet {
    sample_ppp_with(intensity, window, &mut seed.rng())
}

/// Removes every point closer than `r0` to a point of `rrhs`.
pub fn thin_near(points: PointSet, rrhs: &PointSet, r0: f64) -> PointSet {
    if rrhs.is_empty() {
        return points;
    }
    let grid = SpatialGrid::new(rrhs, r0);
    let kept = points
        .points
        .into_iter()
        .filter(|p| grid.within(rrhs, p, r0).all(|i| rrhs[i].dist(p) >= r0))
        .collect();
    PointSet { points: kept }
}

/// Users: a PPP on the window, thinned so that no user lies within `r0` of
/// an RRH.
pub fn sample_users_with<R: Rng + ?Sized>(
    intensity: f64,
    window: SimWindow,
    rrhs: &PointSet,
    r0: f64,
    rng: &mut R,
) -> PointSet {
    thin_near(sample_ppp_with(intensity, window, rng), rrhs, r0)
}

pub fn sample_users(
    intensity: f64,
    window: SimWindow,
    rrhs: &PointSet,
    r0: f64,
    seed: SeedSpec,
) -> PointSet {
    sample_users_with(intensity, window, rrhs, r0, &mut seed.rng())
}

/// Uniform bucket grid for fixed-radius neighbor queries.
pub struct SpatialGrid {
    cell: f64,
    x0: f64,
    y0: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl SpatialGrid {
    pub fn new(points: &PointSet, radius: f64) -> Self {
        let (mut xmin, mut ymin, mut xmax, mut ymax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in points.iter() {
            xmin = xmin.min(p.x);
            ymin = ymin.min(p.y);
            xmax = xmax.max(p.x);
            ymax = ymax.max(p.y);
        }
        // About one point per bucket at most, however small the radius.
        let span = (xmax - xmin).max(ymax - ymin).max(1e-9);
        let per_side = (points.len() as f64).sqrt().ceil().max(1.0);
        let cell = radius.max(span / per_side);
        let nx = ((xmax - xmin) / cell).floor() as usize + 1;
        let ny = ((ymax - ymin) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (idx, p) in points.iter().enumerate() {
            let cx = ((p.x - xmin) / cell) as usize;
            let cy = ((p.y - ymin) / cell) as usize;
            buckets[cy.min(ny - 1) * nx + cx.min(nx - 1)].push(idx);
        }
        SpatialGrid {
            cell,
            x0: xmin,
            y0: ymin,
            nx,
            ny,
            buckets,
        }
    }

    /// Indices of the points of `points` (the set the grid was built from)
    /// within `radius` of `q`, in ascending order.
    pub fn within<'a>(
        &'a self,
        points: &'a PointSet,
        q: &'a Point,
        radius: f64,
    ) -> impl Iterator<Item = usize> + 'a {
        let reach = (radius / self.cell).ceil() as i64;
        let cx = ((q.x - self.x0) / self.cell).floor() as i64;
        let cy = ((q.y - self.y0) / self.cell).floor() as i64;
        let mut hits: Vec<usize> = Vec::new();
        for gy in (cy - reach).max(0)..=(cy + reach).min(self.ny as i64 - 1) {
            for gx in (cx - reach).max(0)..=(cx + reach).min(self.nx as i64 - 1) {
                for &idx in &self.buckets[gy as usize * self.nx + gx as usize] {
                    if points[idx].dist(q) <= radius {
                        hits.push(idx);
                    }
                }
            }
        }
        hits.sort_unstable();
        hits.into_iter()
    }
}

/// Cooperative sets `C_j` (serving RRHs of user `j`) and served-user sets
/// `B_i` (users served by RRH `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub serving: Vec<Vec<usize>>,
    pub served: Vec<Vec<usize>>,
}

impl Assignment {
    /// Whether `i ∈ C_j ⇔ j ∈ B_i` holds for every pair.
    pub fn is_dual(&self) -> bool {
        let forward = self
            .serving
            .iter()
            .enumerate()
            .all(|(j, set)| set.iter().all(|&i| self.served[i].contains(&j)));
        let backward = self
            .served
            .iter()
            .enumerate()
            .all(|(i, set)| set.iter().all(|&j| self.serving[j].contains(&i)));
        forward && backward
    }
}

/// Every user is served by the RRHs within `r1` of it (inclusive).
pub fn build_assignment(rrhs: &PointSet, users: &PointSet, r1: f64) -> Assignment {
    let mut serving = vec![Vec::new(); users.len()];
    let mut served = vec![Vec::new(); rrhs.len()];
    if !rrhs.is_empty() {
        let grid = SpatialGrid::new(rrhs, r1);
        for (j, u) in users.iter().enumerate() {
            serving[j].extend(grid.within(rrhs, u, r1));
        }
    }
    for (j, set) in serving.iter().enumerate() {
        for &i in set {
            served[i].push(j);
        }
    }
    Assignment { serving, served }
}

/// Area of the intersection of two disks of radius `r1` whose centers are
/// `d` apart.
pub fn lens_area_exact(d: f64, r1: f64) -> f64 {
    assert!(d >= 0.0, "distance must be non-negative");
    if d >= 2.0 * r1 {
        return 0.0;
    }
    2.0 * r1 * r1 * (d / (2.0 * r1)).acos() - 0.5 * d * (4.0 * r1 * r1 - d * d).sqrt()
}

/// First-order expansion of [`lens_area_exact`] around `d = 0`,
/// `pi r1² (1 - 2 d / (pi r1))`, clamped at zero beyond its root.
pub fn lens_area_linearized(d: f64, r1: f64) -> f64 {
    assert!(d >= 0.0, "distance must be non-negative");
    (PI * r1 * r1 * (1.0 - 2.0 * d / (PI * r1))).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_force(rrhs: &PointSet, users: &PointSet, r1: f64) -> Assignment {
        let serving: Vec<Vec<usize>> = users
            .iter()
            .map(|u| (0..rrhs.len()).filter(|&i| rrhs[i].dist(u) <= r1).collect())
            .collect();
        let served = (0..rrhs.len())
            .map(|i| (0..users.len()).filter(|&j| serving[j].contains(&i)).collect())
            .collect();
        Assignment { serving, served }
    }

    #[test]
    fn zero_intensity_gives_empty_set() {
        let w = SimWindow { radius: 500.0 };
        for k in 0..20 {
            assert!(sample_ppp(0.0, w, SeedSpec::new(3, k)).is_empty());
        }
    }

    #[test]
    fn fully_excluded_window_has_no_users() {
        let w = SimWindow { radius: 1.0 };
        let rrhs = PointSet::new(vec![Point::ORIGIN]);
        for k in 0..200 {
            let users = sample_users(0.5, w, &rrhs, 1.0 + 1e-12, SeedSpec::new(1, k));
            assert!(users.is_empty());
        }
    }

    #[test]
    fn no_rrhs_leaves_users_unthinned() {
        let w = SimWindow { radius: 300.0 };
        let seed = SeedSpec::new(11, 4);
        assert_eq!(
            sample_users(1e-3, w, &PointSet::empty(), 1.0, seed),
            sample_ppp(1e-3, w, seed)
        );
    }

    #[test]
    fn thinned_users_respect_exclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = SimWindow { radius: 200.0 };
        let rrhs = sample_ppp_with(2e-3, w, &mut rng);
        let users = sample_users_with(5e-3, w, &rrhs, 4.0, &mut rng);
        for u in users.iter() {
            assert!(rrhs.iter().all(|r| r.dist(u) >= 4.0));
        }
    }

    #[test]
    fn single_pair_in_range() {
        let rrhs = PointSet::new(vec![Point::new(50.0, 0.0)]);
        let users = PointSet::new(vec![Point::ORIGIN]);
        let a = build_assignment(&rrhs, &users, 100.0);
        assert_eq!(a.serving, vec![vec![0]]);
        assert_eq!(a.served, vec![vec![0]]);
    }

    #[test]
    fn single_pair_out_of_range() {
        let rrhs = PointSet::new(vec![Point::new(150.0, 0.0)]);
        let users = PointSet::new(vec![Point::ORIGIN]);
        let a = build_assignment(&rrhs, &users, 100.0);
        assert!(a.serving[0].is_empty() && a.served[0].is_empty());
    }

    #[test]
    fn grid_assignment_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let w = SimWindow { radius: 600.0 };
        let n_each = 500;
        let intensity = n_each as f64 / w.area();
        let rrhs = sample_ppp_with(intensity, w, &mut rng);
        let users = sample_ppp_with(intensity, w, &mut rng);
        assert!(rrhs.len() + users.len() > 900);
        let a = build_assignment(&rrhs, &users, 100.0);
        assert_eq!(a, brute_force(&rrhs, &users, 100.0));
        assert!(a.is_dual());
    }

    #[test]
    fn lens_special_values() {
        let r1 = 100.0;
        assert!((lens_area_exact(0.0, r1) - PI * r1 * r1).abs() < 1e-9);
        assert_eq!(lens_area_exact(2.0 * r1, r1), 0.0);
        assert_eq!(lens_area_exact(3.0 * r1, r1), 0.0);
        // r1²(2π/3 − √3/2)
        assert!((lens_area_exact(r1, r1) - 12283.7).abs() < 0.05);
    }

    #[test]
    fn linearized_lens_special_values() {
        let r1 = 100.0;
        assert!((lens_area_linearized(0.0, r1) - PI * r1 * r1).abs() < 1e-9);
        assert!((lens_area_linearized(r1, r1) - 11415.9).abs() < 0.05);
        assert_eq!(lens_area_linearized(PI * r1 / 2.0, r1), 0.0);
        assert_eq!(lens_area_linearized(2.0 * r1, r1), 0.0);
    }

    #[test]
    fn linearization_quality_on_unit_range() {
        let r1 = 100.0;
        for k in 0..=1000 {
            let d = r1 * k as f64 / 1000.0;
            let gap = (lens_area_exact(d, r1) - lens_area_linearized(d, r1)).abs() / (PI * r1 * r1);
            assert!(gap <= 0.08, "d = {d}: {gap}");
        }
    }

    proptest::proptest! {
        #[test]
        fn lens_decreasing(a in 0.0f64..200.0, b in 0.0f64..200.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            proptest::prop_assert!(lens_area_exact(lo, 100.0) >= lens_area_exact(hi, 100.0));
        }

        #[test]
        fn assignment_always_dual(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = SimWindow { radius: 400.0 };
            let rrhs = sample_ppp_with(2e-4, w, &mut rng);
            let users = sample_users_with(1e-4, w, &rrhs, 1.0, &mut rng);
            let a = build_assignment(&rrhs, &users, 100.0);
            proptest::prop_assert!(a.is_dual());
            for (j, set) in a.serving.iter().enumerate() {
                for &i in set {
                    let d = rrhs[i].dist(&users[j]);
                    proptest::prop_assert!(d >= 1.0 && d <= 100.0);
                }
            }
        }
    }
}
