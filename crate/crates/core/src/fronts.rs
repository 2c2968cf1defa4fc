//! Convex wavefronts: the involute construction off an obstacle boundary,
//! curvature transport along billiard trajectories, and the test for rays
//! that leave one convex front and hit another perpendicularly.
//!
//! Front curvature is signed so that `κ > 0` means the front diverges in
//! its direction of motion. Free flight over length `t` maps
//! `κ ↦ κ/(1 + tκ)`; a reflection with incidence cosine `cos φ` off a
//! boundary of curvature `κ_b` maps `κ ↦ κ + 2κ_b/cos φ`. Both keep
//! `κ ≥ 0`, so fronts stay convex in dispersing scenes.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::billiard::{
    flow_for, reflect, trace, BilliardError, PhasePoint, TraceOptions, TrajectoryStatus,
};
use crate::geometry::{Direction, Ellipse, Scene, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontError {
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error("front propagation undefined at grazing (obstacle {obstacle_index}, time {time})")]
    Grazing { obstacle_index: usize, time: f64 },
    #[error("front curvature must be finite and non-negative, got {0}")]
    BadCurvature(f64),
    #[error("non-smooth variation: neighbouring rays follow different itineraries")]
    NonSmooth,
    #[error("involute window leaves t outside [delta, eps0]: delta = {delta}, eps0 = {eps0}")]
    BadWindow { delta: f64, eps0: f64 },
    #[error("invalid sampled curve: {0}")]
    BadCurve(String),
    #[error("curves intersect (segments {0} and {1})")]
    CurvesIntersect(usize, usize),
    #[error("curve is not strictly convex at sample {0}")]
    NotConvex(usize),
}

/// A convex wavefront germ: a point of the front, its unit normal (the
/// propagation direction) and its curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontState {
    pub point: Vec2,
    pub dir: Direction,
    pub kappa: f64,
}

/// Orientation of arc-length parametrization along an ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

/// A curve given by samples: arc-length parameters, points, unit normals
/// and curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    params: Vec<f64>,
    points: Vec<Vec2>,
    normals: Vec<Direction>,
    curvatures: Vec<f64>,
}

impl SampledCurve {
    pub fn new(
        params: Vec<f64>,
        points: Vec<Vec2>,
        normals: Vec<Direction>,
        curvatures: Vec<f64>,
    ) -> Result<Self, FrontError> {
        let n = params.len();
        if n < 3 {
            return Err(FrontError::BadCurve(format!("{n} samples, need at least 3")));
        }
        if points.len() != n || normals.len() != n || curvatures.len() != n {
            return Err(FrontError::BadCurve("sequence lengths differ".into()));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FrontError::BadCurve("parameters not increasing".into()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(FrontError::BadCurve("repeated consecutive point".into()));
        }
        Ok(SampledCurve {
            params,
            points,
            normals,
            curvatures,
        })
    }

    /// Arc of `e` between eccentric anomalies `u_start < u_end`, with
    /// outward (or inward) normals and parameters measured in arc length
    /// from `u_start`.
    pub fn ellipse_arc(
        e: &Ellipse,
        u_start: f64,
        u_end: f64,
        n_samples: usize,
        outward: bool,
    ) -> Result<Self, FrontError> {
        if n_samples < 3 || !(u_end > u_start) {
            return Err(FrontError::BadCurve("empty arc".into()));
        }
        let arc = ArcLength::new(e);
        let base = arc.length_to(u_start);
        let sign = if outward { 1.0 } else { -1.0 };
        let mut params = Vec::with_capacity(n_samples);
        let mut points = Vec::with_capacity(n_samples);
        let mut normals = Vec::with_capacity(n_samples);
        let mut curvatures = Vec::with_capacity(n_samples);
        for k in 0..n_samples {
            let u = u_start + (u_end - u_start) * k as f64 / (n_samples - 1) as f64;
            params.push(arc.length_to(u) - base);
            points.push(e.point_at(u));
            normals.push(Direction::renormalized(e.normal_at(u).vec() * sign));
            curvatures.push(e.curvature_at(u));
        }
        SampledCurve::new(params, points, normals, curvatures)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn normals(&self) -> &[Direction] {
        &self.normals
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    /// Linear interpolation between samples `k` and `k + 1`.
    fn lerp(&self, k: usize, frac: f64) -> (f64, Vec2, Direction) {
        let p = self.params[k] + (self.params[k + 1] - self.params[k]) * frac;
        let q = self.points[k] + (self.points[k + 1] - self.points[k]) * frac;
        let n0 = self.normals[k].vec();
        let n = n0 + (self.normals[k + 1].vec() - n0) * frac;
        (p, q, Direction::renormalized(n))
    }
}

/// Arc length along an ellipse as a function of eccentric anomaly, by
/// adaptive Simpson quadrature of the speed `|x'(u)|`.
pub struct ArcLength<'a> {
    e: &'a Ellipse,
    perimeter: f64,
}

const ARC_TOL: f64 = 1e-10;

impl<'a> ArcLength<'a> {
    pub fn new(e: &'a Ellipse) -> Self {
        let mut arc = ArcLength { e, perimeter: 0.0 };
        arc.perimeter = arc.integrate(0.0, TAU);
        arc
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    fn speed(&self, u: f64) -> f64 {
        self.e.tangent_at(u).norm()
    }

    fn integrate(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        // split into quarter turns so each piece is smooth and short
        let pieces = (((b - a).abs() / (TAU / 8.0)).ceil() as usize).max(1);
        let h = (b - a) / pieces as f64;
        (0..pieces)
            .map(|k| {
                let (lo, hi) = (a + h * k as f64, a + h * (k + 1) as f64);
                let m = 0.5 * (lo + hi);
                let (fa, fm, fb) = (self.speed(lo), self.speed(m), self.speed(hi));
                let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
                self.simpson(lo, hi, fa, fm, fb, whole, ARC_TOL / pieces as f64, 40)
            })
            .sum()
    }

    #[allow(clippy::too_many_arguments)]
    fn simpson(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.speed(lm), self.speed(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        self.simpson(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + self.simpson(m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }

    /// Signed arc length from anomaly 0 to `u`.
    pub fn length_to(&self, u: f64) -> f64 {
        let turns = (u / TAU).floor();
        let rest = u - turns * TAU;
        turns * self.perimeter + self.integrate(0.0, rest)
    }

    /// Anomaly `u` with `length_to(u) = s`.
    pub fn anomaly_at(&self, s: f64) -> f64 {
        let turns = (s / self.perimeter).floor();
        let rest = s - turns * self.perimeter;
        let (mut lo, mut hi) = (0.0, TAU);
        let mut u = TAU * rest / self.perimeter;
        for _ in 0..100 {
            let f = self.integrate(0.0, u) - rest;
            if f.abs() < 1e-13 {
                break;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let next = u - f / self.speed(u);
            u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        turns * TAU + u
    }
}

/// Involute (taut-string front) off the boundary of `e`.
///
/// With `x(s)` the arc-length parametrization of the boundary (`s = 0` at
/// the major-axis endpoint `u = 0`) in the given orientation and
/// `c = s0 + eps0`, the curve is `y(s) = x(s) + (c − s)·x'(s)` for the `s`
/// with `c − s ∈ [delta, eps0]`, i.e. `s ∈ [s0, s0 + eps0 − delta]`. Its
/// normal at `y(s)` is `x'(s)` and its curvature `1/(c − s)`.
pub fn involute(
    e: &Ellipse,
    s0: f64,
    eps0: f64,
    delta: f64,
    orientation: Orientation,
    n_samples: usize,
) -> Result<SampledCurve, FrontError> {
    if !(delta > 0.0 && delta < eps0 && eps0.is_finite()) {
        return Err(FrontError::BadWindow { delta, eps0 });
    }
    if n_samples < 3 {
        return Err(FrontError::BadCurve(format!("{n_samples} samples, need at least 3")));
    }
    let arc = ArcLength::new(e);
    let sign = orientation.sign();
    let c = s0 + eps0;
    let s_end = s0 + (eps0 - delta);

    let mut params = Vec::with_capacity(n_samples);
    let mut points = Vec::with_capacity(n_samples);
    let mut normals = Vec::with_capacity(n_samples);
    let mut curvatures = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let s = s0 + (s_end - s0) * k as f64 / (n_samples - 1) as f64;
        let u = arc.anomaly_at(sign * s);
        let tangent = Direction::renormalized(e.tangent_at(u) * sign);
        let t = c - s;
        params.push(s);
        points.push(e.point_at(u) + tangent.vec() * t);
        normals.push(tangent);
        curvatures.push(1.0 / t);
    }
    SampledCurve::new(params, points, normals, curvatures)
}

/// Largest deviation from tangency of the normal lines of `y` to the
/// boundary of `e`: for each sample, `|<n_e, line direction>|` at the
/// boundary point where the line comes closest.
pub fn check_normal_tangency(y: &SampledCurve, e: &Ellipse) -> f64 {
    y.points
        .iter()
        .zip(&y.normals)
        .map(|(&p, &n)| {
            let touch = e.line_touch_point(p, n);
            e.normal_unchecked(touch).dot(n.vec()).abs()
        })
        .fold(0.0, f64::max)
}

/// Transports a convex front along the trajectory of its base ray. Returns
/// the state after each reflection and at the final point (the ball exit,
/// or the last reflection when a cap trips).
pub fn propagate_front(
    scene: &Scene,
    start: FrontState,
    opts: &TraceOptions,
) -> Result<Vec<FrontState>, FrontError> {
    if !(start.kappa.is_finite() && start.kappa >= 0.0) {
        return Err(FrontError::BadCurvature(start.kappa));
    }
    let tr = trace(scene, PhasePoint::new(start.point, start.dir), opts)?;
    let mut states = Vec::with_capacity(tr.events.len() + 1);
    let mut kappa = start.kappa;
    let mut dir = start.dir;
    let mut last_time = 0.0;
    for ev in &tr.events {
        if ev.tangential {
            return Err(FrontError::Grazing {
                obstacle_index: ev.obstacle_index,
                time: ev.time,
            });
        }
        kappa = free_flight(kappa, ev.time - last_time);
        let obstacle = &scene.obstacles()[ev.obstacle_index - 1];
        let kb = obstacle.curvature_unchecked(ev.point);
        kappa = mirror(kappa, kb, ev.cos_incidence);
        dir = reflect(dir, obstacle.normal_unchecked(ev.point)).map_err(FrontError::from)?;
        last_time = ev.time;
        states.push(FrontState {
            point: ev.point,
            dir,
            kappa,
        });
    }
    if let TrajectoryStatus::Exited { exit_time, exit } = tr.status {
        states.push(FrontState {
            point: exit.q,
            dir: exit.v,
            kappa: free_flight(kappa, exit_time - last_time),
        });
    } else if states.is_empty() {
        states.push(start);
    }
    Ok(states)
}

/// Curvature after free flight over length `t`.
#[inline]
pub fn free_flight(kappa: f64, t: f64) -> f64 {
    kappa / (1.0 + t * kappa)
}

/// Curvature just after reflecting off a boundary of curvature `kb` with
/// incidence cosine `cos_incidence`.
#[inline]
pub fn mirror(kappa: f64, kb: f64, cos_incidence: f64) -> f64 {
    kappa + 2.0 * kb / cos_incidence
}

/// Front curvature after time `duration` estimated from two neighbouring
/// rays of the front through `x` with curvature `kappa0`, launched at
/// front arc length `±h` from `x`.
pub fn finite_difference_curvature(
    scene: &Scene,
    x: PhasePoint,
    kappa0: f64,
    h: f64,
    duration: f64,
    opts: &TraceOptions,
) -> Result<f64, FrontError> {
    if !(kappa0.is_finite() && kappa0 >= 0.0) {
        return Err(FrontError::BadCurvature(kappa0));
    }
    let side = x.v.perp().vec();
    let neighbour = |offset: f64| -> PhasePoint {
        if kappa0 == 0.0 {
            PhasePoint::new(x.q + side * offset, x.v)
        } else {
            let radius = 1.0 / kappa0;
            let center = x.q - x.v.vec() * radius;
            let d = x.v.rotate(offset * kappa0);
            PhasePoint::new(center + d.vec() * radius, d)
        }
    };

    let mid = flow_for(scene, x, duration, opts)?;
    let plus = flow_for(scene, neighbour(h), duration, opts)?;
    let minus = flow_for(scene, neighbour(-h), duration, opts)?;
    if plus.itinerary != mid.itinerary || minus.itinerary != mid.itinerary {
        return Err(FrontError::NonSmooth);
    }
    if mid.tangencies + plus.tangencies + minus.tangencies > 0 {
        return Err(FrontError::NonSmooth);
    }

    let chord = plus.point.q - minus.point.q;
    let (dm, dp) = (minus.point.v.vec(), plus.point.v.vec());
    let turn = dm.cross(dp).atan2(dm.dot(dp));
    let across = mid.point.v.vec().cross(chord);
    Ok(turn / across)
}

/// Ray pairs from `y` (along its normals) that meet `x_target`
/// perpendicularly.
#[derive(Debug, Clone, PartialEq)]
pub struct PerpendicularHits {
    /// `(param on y, param on x_target)` pairs.
    pub hits: Vec<(f64, f64)>,
    /// Set when a run of three or more consecutive samples are all
    /// perpendicular hits: a continuum of common normals, as for
    /// concentric arcs, which strict convexity in opposing position rules
    /// out.
    pub degenerate: bool,
}

/// Angle residual of a ray from `origin` along `dir` against `x`: the
/// parameter on `x` where it lands and `<dir × n_x>` there.
fn ray_residual(x: &SampledCurve, origin: Vec2, dir: Direction) -> Option<(f64, f64)> {
    let d = dir.vec();
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 0..x.len() - 1 {
        let (a, b) = (x.points[k], x.points[k + 1]);
        let seg = b - a;
        let denom = d.cross(seg);
        if denom == 0.0 {
            continue;
        }
        let rel = a - origin;
        let lambda = rel.cross(seg) / denom;
        let frac = rel.cross(d) / denom;
        if lambda <= 0.0 || !(-1e-12..=1.0 + 1e-12).contains(&frac) {
            continue;
        }
        if best.is_none_or(|(l, _, _)| lambda < l) {
            let (param, _, n) = x.lerp(k, frac.clamp(0.0, 1.0));
            best = Some((lambda, param, d.cross(n.vec())));
        }
    }
    best.map(|(_, p, g)| (p, g))
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let o1 = d1.cross(q1 - p1);
    let o2 = d1.cross(q2 - p1);
    let o3 = d2.cross(p1 - q1);
    let o4 = d2.cross(p2 - q1);
    o1 * o2 <= 0.0 && o3 * o4 <= 0.0 && !(o1 == 0.0 && o2 == 0.0)
}

pub fn perpendicular_hits(
    y: &SampledCurve,
    x_target: &SampledCurve,
    tol: f64,
) -> Result<PerpendicularHits, FrontError> {
    for curve in [y, x_target] {
        if let Some(k) = curve.curvatures.iter().position(|&c| !(c > 0.0)) {
            return Err(FrontError::NotConvex(k));
        }
    }
    for i in 0..y.len() - 1 {
        for j in 0..x_target.len() - 1 {
            if segments_cross(y.points[i], y.points[i + 1], x_target.points[j], x_target.points[j + 1]) {
                return Err(FrontError::CurvesIntersect(i, j));
            }
        }
    }

    let residuals: Vec<Option<(f64, f64)>> = (0..y.len())
        .map(|i| ray_residual(x_target, y.points[i], y.normals[i]))
        .collect();

    let mut hits: Vec<(f64, f64)> = Vec::new();
    let mut run = 0usize;
    let mut degenerate = false;
    for (i, r) in residuals.iter().enumerate() {
        match r {
            Some((px, g)) if g.abs() <= tol => {
                hits.push((y.params[i], *px));
                run += 1;
                degenerate |= run >= 3;
            }
            _ => run = 0,
        }
    }

    for i in 0..y.len() - 1 {
        let (Some((_, g0)), Some((_, g1))) = (residuals[i], residuals[i + 1]) else {
            continue;
        };
        if !(g0 * g1 < 0.0) || (g0.abs() <= tol && g1.abs() <= tol) {
            continue;
        }
        // bisection along the interpolated segment of y
        let (mut lo, mut hi, mut glo) = (0.0, 1.0, g0);
        let mut found = None;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let (py, q, n) = y.lerp(i, mid);
            let Some((px, g)) = ray_residual(x_target, q, n) else {
                break;
            };
            found = Some((py, px, g));
            if g == 0.0 {
                break;
            }
            if (g < 0.0) == (glo < 0.0) {
                lo = mid;
                glo = g;
            } else {
                hi = mid;
            }
        }
        if let Some((py, px, g)) = found {
            if g.abs() <= tol {
                hits.push((py, px));
            }
        }
    }

    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let spacing = y
        .params
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(hits.len());
    for h in hits {
        match merged.last() {
            Some(last) if h.0 - last.0 < 0.5 * spacing => {}
            _ => merged.push(h),
        }
    }
    Ok(PerpendicularHits {
        hits: merged,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ray_circle_exit;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit_circle() -> Ellipse {
        Ellipse::circle(Vec2::ZERO, 1.0).unwrap()
    }

    #[test]
    fn arc_length_of_circle_and_ellipse() {
        let c = unit_circle();
        let arc = ArcLength::new(&c);
        assert!((arc.perimeter() - TAU).abs() < 1e-10);
        assert!((arc.length_to(1.0) - 1.0).abs() < 1e-10);
        assert!((arc.length_to(-1.0) + 1.0).abs() < 1e-10);
        assert!((arc.anomaly_at(2.5) - 2.5).abs() < 1e-10);

        let e = Ellipse::new(Vec2::ZERO, 2.0, 1.0, 0.3).unwrap();
        let arc = ArcLength::new(&e);
        // Ramanujan's second approximation, accurate to ~1e-9 here
        let (a, b) = (2.0f64, 1.0f64);
        let h = ((a - b) / (a + b)).powi(2);
        let ramanujan = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        assert!((arc.perimeter() - ramanujan).abs() < 1e-6);
        let u = arc.anomaly_at(1.234);
        assert!((arc.length_to(u) - 1.234).abs() < 1e-10);
    }

    #[test]
    fn involute_of_unit_circle() {
        let y = involute(&unit_circle(), 0.0, 0.5, 0.05, Orientation::CounterClockwise, 64).unwrap();
        assert!(y.points()[0].distance(Vec2::new(1.0, 0.5)) < 1e-12);
        let n = y.normals()[0];
        assert!(n.x().abs() < 1e-12 && (n.y() - 1.0).abs() < 1e-12);
        assert!((y.curvatures()[0] - 2.0).abs() < 1e-12);
        assert!((y.curvatures()[63] - 1.0 / 0.05).abs() < 1e-9);
        assert!(check_normal_tangency(&y, &unit_circle()) < 1e-8);

        // analytic circle involute: y(s) = (cos s, sin s) + (c − s)(−sin s, cos s)
        for (&s, &p) in y.params().iter().zip(y.points()) {
            let c = 0.5;
            let exact = Vec2::new(s.cos() - (c - s) * s.sin(), s.sin() + (c - s) * s.cos());
            assert!(p.distance(exact) < 1e-9);
        }
    }

    #[test]
    fn involute_clockwise_uses_other_tangent() {
        let y = involute(&unit_circle(), 0.0, 0.5, 0.05, Orientation::Clockwise, 8).unwrap();
        assert!(y.points()[0].distance(Vec2::new(1.0, -0.5)) < 1e-12);
        assert!((y.normals()[0].y() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn involute_window_errors() {
        let c = unit_circle();
        assert!(matches!(
            involute(&c, 0.0, 0.5, 0.5, Orientation::CounterClockwise, 8),
            Err(FrontError::BadWindow { .. })
        ));
        assert!(matches!(
            involute(&c, 0.0, 0.5, 0.7, Orientation::CounterClockwise, 8),
            Err(FrontError::BadWindow { .. })
        ));
        assert!(matches!(
            involute(&c, 0.0, 0.5, 0.0, Orientation::CounterClockwise, 8),
            Err(FrontError::BadWindow { .. })
        ));
    }

    #[test]
    fn involute_of_ellipse_has_tangent_normals() {
        let e = Ellipse::new(Vec2::new(0.2, -0.1), 2.0, 1.0, 0.4).unwrap();
        let y = involute(&e, 1.3, 0.6, 0.05, Orientation::CounterClockwise, 64).unwrap();
        assert!(check_normal_tangency(&y, &e) < 1e-6);
        assert!(y.curvatures().iter().all(|&k| k > 0.0));
    }

    #[test]
    fn free_flight_and_mirror_algebra() {
        assert_eq!(free_flight(0.0, 12.0), 0.0);
        assert_eq!(free_flight(1.0, 1.0), 0.5);
        let k = mirror(0.0, 1.0, 1.0);
        assert_eq!(k, 2.0);
        assert!((free_flight(k, 1.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn head_on_front_on_disc() {
        let s = Scene::new(3.0, vec![unit_circle()]).unwrap();
        let start = FrontState {
            point: Vec2::new(-3.0, 0.0),
            dir: Direction::new(1.0, 0.0).unwrap(),
            kappa: 0.0,
        };
        let states = propagate_front(&s, start, &TraceOptions::default()).unwrap();
        assert_eq!(states.len(), 2);
        assert!((states[0].kappa - 2.0).abs() < 1e-12);
        // after reflection the ray flies 2 back to the sphere
        assert!((states[1].kappa - 2.0 / 5.0).abs() < 1e-12);

        let x = PhasePoint::new(start.point, start.dir);
        let fd = finite_difference_curvature(&s, x, 0.0, 1e-5, 3.0, &TraceOptions::default()).unwrap();
        assert!((fd - 2.0 / 3.0).abs() < 1e-4, "{fd}");
        let fd = finite_difference_curvature(&s, x, 0.0, 1e-5, 2.0 + 1e-6, &TraceOptions::default()).unwrap();
        assert!((fd - 2.0).abs() < 1e-4, "{fd}");
    }

    #[test]
    fn finite_difference_free_flight() {
        let empty = Scene::empty(3.0).unwrap();
        let x = PhasePoint::new(Vec2::new(-1.0, 0.5), Direction::new(1.0, 0.3).unwrap());
        let opts = TraceOptions::default();
        for t in [0.5, 2.0, 7.0] {
            let k = finite_difference_curvature(&empty, x, 0.0, 1e-5, t, &opts).unwrap();
            assert!(k.abs() < 1e-6);
        }
        let k = finite_difference_curvature(&empty, x, 1.0, 1e-5, 1.0, &opts).unwrap();
        assert!((k - 0.5).abs() < 1e-6, "{k}");
    }

    #[test]
    fn grazing_front_is_an_error() {
        let s = Scene::new(3.0, vec![unit_circle()]).unwrap();
        let start = FrontState {
            point: Vec2::new(-2.0, 1.0),
            dir: Direction::new(1.0, 0.0).unwrap(),
            kappa: 0.0,
        };
        assert!(matches!(
            propagate_front(&s, start, &TraceOptions::default()),
            Err(FrontError::Grazing { obstacle_index: 1, .. })
        ));
        let bad = FrontState { kappa: -1.0, ..start };
        assert!(matches!(
            propagate_front(&s, bad, &TraceOptions::default()),
            Err(FrontError::BadCurvature(_))
        ));
    }

    #[test]
    fn split_rays_are_non_smooth() {
        let s = Scene::new(3.0, vec![unit_circle()]).unwrap();
        // base ray grazes at y = 1: neighbours split between hit and miss
        let x = PhasePoint::new(Vec2::new(-2.0, 1.0 - 1e-7), Direction::new(1.0, 0.0).unwrap());
        let r = finite_difference_curvature(&s, x, 0.0, 1e-5, 4.0, &TraceOptions::default());
        assert_eq!(r, Err(FrontError::NonSmooth));
        let _ = ray_circle_exit;
    }

    fn arc(center: Vec2, r: f64, mid: f64, half: f64, n: usize) -> SampledCurve {
        SampledCurve::ellipse_arc(&Ellipse::circle(center, r).unwrap(), mid - half, mid + half, n, true).unwrap()
    }

    #[test]
    fn opposing_circle_arcs_have_one_hit() {
        let y = arc(Vec2::ZERO, 1.0, 0.0, 0.5, 41);
        let x = arc(Vec2::new(5.0, 0.0), 1.0, PI, 1.2, 81);
        // oracle: dense scan of the orthogonality residual, counting sign changes
        let mut changes = 0;
        let mut prev: Option<f64> = None;
        for k in 0..=4000 {
            let a = -0.5 + k as f64 / 4000.0;
            let p = Vec2::new(a.cos(), a.sin());
            let d = Direction::from_angle(a);
            if let Some((_, g)) = ray_residual(&x, p, d) {
                if let Some(q) = prev {
                    if q * g < 0.0 {
                        changes += 1;
                    }
                }
                if g != 0.0 {
                    prev = Some(g);
                }
            }
        }
        assert_eq!(changes, 1);

        let res = perpendicular_hits(&y, &x, 1e-9).unwrap();
        assert!(!res.degenerate);
        assert_eq!(res.hits.len(), 1);
        let (py, px) = res.hits[0];
        // param 0.5 on Y is the point (1, 0); 1.2 on X is (4, 0)
        assert!((py - 0.5).abs() < 1e-9, "{py}");
        assert!((px - 1.2).abs() < 1e-6, "{px}");
    }

    #[test]
    fn concentric_arcs_are_degenerate() {
        let y = arc(Vec2::ZERO, 1.0, 0.0, 0.4, 21);
        let x = SampledCurve::ellipse_arc(&Ellipse::circle(Vec2::ZERO, 2.0).unwrap(), -0.8, 0.8, 41, false).unwrap();
        let res = perpendicular_hits(&y, &x, 1e-9).unwrap();
        assert!(res.degenerate);
        assert_eq!(res.hits.len(), 21);
    }

    #[test]
    fn facing_away_has_no_hits() {
        let y = arc(Vec2::ZERO, 1.0, PI, 0.5, 21);
        let x = arc(Vec2::new(5.0, 0.0), 1.0, 0.0, 0.5, 21);
        let res = perpendicular_hits(&y, &x, 1e-9).unwrap();
        assert!(res.hits.is_empty() && !res.degenerate);
    }

    #[test]
    fn intersecting_curves_rejected() {
        let y = arc(Vec2::ZERO, 1.0, 0.0, 1.0, 21);
        let x = arc(Vec2::new(1.5, 0.0), 1.0, PI, 1.2, 21);
        assert!(matches!(perpendicular_hits(&y, &x, 1e-9), Err(FrontError::CurvesIntersect(_, _))));
    }

    #[test]
    fn sampled_curve_invariants() {
        let p = vec![0.0, 1.0, 2.0];
        let pts = vec![Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)];
        let n = vec![Direction::from_angle(FRAC_PI_2); 3];
        assert!(SampledCurve::new(p.clone(), pts.clone(), n.clone(), vec![1.0; 3]).is_ok());
        assert!(SampledCurve::new(vec![0.0, 1.0], pts[..2].to_vec(), n[..2].to_vec(), vec![1.0; 2]).is_err());
        assert!(SampledCurve::new(vec![0.0, 0.0, 1.0], pts.clone(), n.clone(), vec![1.0; 3]).is_err());
        let dup = vec![Vec2::ZERO, Vec2::ZERO, Vec2::new(2.0, 0.0)];
        assert!(SampledCurve::new(p, dup, n, vec![1.0; 3]).is_err());
    }
}
