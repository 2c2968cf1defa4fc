//! Planar primitives: vectors, unit directions, ellipse obstacles and the
//! enclosing ball.
//!
//! Every obstacle is an ellipse. Ray intersection is done by mapping the
//! ellipse affinely onto the unit circle, where the problem is a quadratic
//! in the ray parameter. The affine map preserves ray parameters, so `t`
//! values come back in original length units.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// Default relative discriminant threshold below which a ray is classified
/// as tangent to an ellipse.
pub const DEFAULT_EPS_TAN: f64 = 1e-10;

/// Tolerance used when checking that a point lies on an ellipse boundary,
/// measured as the relative radial offset in the normalized frame.
pub const ON_BOUNDARY_TOL: f64 = 1e-9;

/// Minimum clearance between obstacles, and between an obstacle and the
/// ball, relative to the ball radius.
pub const CLEARANCE_FACTOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({x}, {y}) is not on the ellipse boundary (offset {offset:e})")]
    NotOnBoundary { x: f64, y: f64, offset: f64 },
    #[error("point ({x}, {y}) lies outside the ball of radius {radius}")]
    OutsideBall { x: f64, y: f64, radius: f64 },
    #[error("invalid ellipse: {0}")]
    InvalidEllipse(String),
    #[error("non-finite or zero-length direction ({0}, {1})")]
    DegenerateDirection(f64, f64),
}

/// Reasons a scene fails validation. Obstacle indices are 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("ball radius must be positive and finite, got {0}")]
    InvalidBall(f64),
    #[error("obstacles {0} and {1} overlap or are closer than the clearance")]
    Overlap(usize, usize),
    #[error("obstacle {0} is not strictly inside the ball")]
    TooCloseToBall(usize),
    #[error("obstacle {0} is degenerate: {1}")]
    DegenerateEllipse(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by `angle` radians.
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A unit vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vec2);

impl Direction {
    /// Normalizes `(vx, vy)` to unit length.
    pub fn new(vx: f64, vy: f64) -> Result<Self, GeometryError> {
        Self::from_vec(Vec2::new(vx, vy))
    }

    pub fn from_vec(v: Vec2) -> Result<Self, GeometryError> {
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(GeometryError::DegenerateDirection(v.x, v.y));
        }
        Ok(Direction(v * (1.0 / n)))
    }

    /// Unit vector at `angle` radians from the positive x axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Direction(Vec2::new(c, s))
    }

    /// Wraps a vector the caller knows to be unit (or nearly so) after
    /// renormalizing it.
    pub(crate) fn renormalized(v: Vec2) -> Self {
        Direction(v * (1.0 / v.norm()))
    }

    #[inline]
    pub fn vec(self) -> Vec2 {
        self.0
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.0.y
    }

    #[inline]
    pub fn dot(self, v: Vec2) -> f64 {
        self.0.dot(v)
    }

    pub fn angle(self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    pub fn perp(self) -> Direction {
        Direction(self.0.perp())
    }

    pub fn rotate(self, angle: f64) -> Direction {
        Direction::renormalized(self.0.rotate(angle))
    }
}

impl Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        Direction(-self.0)
    }
}

impl From<Direction> for Vec2 {
    fn from(d: Direction) -> Vec2 {
        d.0
    }
}

/// Outcome of intersecting a forward ray with an ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HitClass {
    Miss,
    Tangent {
        t: f64,
        point: Vec2,
    },
    Transversal {
        t_enter: f64,
        t_exit: f64,
        p_enter: Vec2,
        p_exit: Vec2,
    },
}

/// A strictly convex obstacle bounded by an ellipse.
///
/// `rotation` is the angle of the major axis; it is reduced into `[0, π)`
/// on construction since an ellipse is symmetric under a half turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    center: Vec2,
    semi_major: f64,
    semi_minor: f64,
    rotation: f64,
    cos_rot: f64,
    sin_rot: f64,
}

impl Ellipse {
    pub fn new(
        center: Vec2,
        semi_major: f64,
        semi_minor: f64,
        rotation: f64,
    ) -> Result<Self, GeometryError> {
        if !center.is_finite() {
            return Err(GeometryError::InvalidEllipse("center is not finite".into()));
        }
        if !(semi_minor.is_finite() && semi_major.is_finite() && rotation.is_finite()) {
            return Err(GeometryError::InvalidEllipse(
                "axes and rotation must be finite".into(),
            ));
        }
        if semi_minor <= 0.0 {
            return Err(GeometryError::InvalidEllipse(format!(
                "semi-minor axis {semi_minor} is not positive"
            )));
        }
        if semi_major < semi_minor {
            return Err(GeometryError::InvalidEllipse(format!(
                "semi-major axis {semi_major} is smaller than semi-minor axis {semi_minor}"
            )));
        }
        let rotation = rotation.rem_euclid(PI);
        // rem_euclid can round up to exactly PI for tiny negative inputs
        let rotation = if rotation >= PI { 0.0 } else { rotation };
        let (sin_rot, cos_rot) = rotation.sin_cos();
        Ok(Ellipse {
            center,
            semi_major,
            semi_minor,
            rotation,
            cos_rot,
            sin_rot,
        })
    }

    pub fn circle(center: Vec2, radius: f64) -> Result<Self, GeometryError> {
        Self::new(center, radius, radius, 0.0)
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn semi_major(&self) -> f64 {
        self.semi_major
    }

    pub fn semi_minor(&self) -> f64 {
        self.semi_minor
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    /// Same ellipse moved by `offset`.
    pub fn translated(&self, offset: Vec2) -> Ellipse {
        Ellipse {
            center: self.center + offset,
            ..*self
        }
    }

    /// World vector to the ellipse's axis-aligned frame (no translation).
    #[inline]
    fn local_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.cos_rot * v.x + self.sin_rot * v.y,
            -self.sin_rot * v.x + self.cos_rot * v.y,
        )
    }

    #[inline]
    fn world_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.cos_rot * v.x - self.sin_rot * v.y,
            self.sin_rot * v.x + self.cos_rot * v.y,
        )
    }

    /// World point to the normalized frame in which the ellipse is the unit
    /// circle.
    #[inline]
    fn unit_coords(&self, p: Vec2) -> Vec2 {
        let l = self.local_vec(p - self.center);
        Vec2::new(l.x / self.semi_major, l.y / self.semi_minor)
    }

    #[inline]
    fn world_point(&self, u: Vec2) -> Vec2 {
        self.center + self.world_vec(Vec2::new(u.x * self.semi_major, u.y * self.semi_minor))
    }

    /// Boundary point at eccentric anomaly `u`.
    pub fn point_at(&self, u: f64) -> Vec2 {
        let (s, c) = u.sin_cos();
        self.world_point(Vec2::new(c, s))
    }

    /// Derivative of [`Ellipse::point_at`] with respect to `u`.
    pub fn tangent_at(&self, u: f64) -> Vec2 {
        let (s, c) = u.sin_cos();
        self.world_vec(Vec2::new(-self.semi_major * s, self.semi_minor * c))
    }

    /// Outward unit normal at eccentric anomaly `u`.
    pub fn normal_at(&self, u: f64) -> Direction {
        let (s, c) = u.sin_cos();
        let g = Vec2::new(c / self.semi_major, s / self.semi_minor);
        Direction::renormalized(self.world_vec(g))
    }

    /// Curvature at eccentric anomaly `u`.
    pub fn curvature_at(&self, u: f64) -> f64 {
        let (s, c) = u.sin_cos();
        let (a, b) = (self.semi_major, self.semi_minor);
        let speed_sq = a * a * s * s + b * b * c * c;
        a * b / (speed_sq * speed_sq.sqrt())
    }

    /// Eccentric anomaly of the boundary point radially closest (in the
    /// normalized frame) to `p`.
    pub fn anomaly_of(&self, p: Vec2) -> f64 {
        let u = self.unit_coords(p);
        u.y.atan2(u.x)
    }

    /// Value of the implicit function `(x/A)² + (y/B)²` in the local frame;
    /// equals 1 on the boundary, < 1 inside.
    pub fn implicit(&self, p: Vec2) -> f64 {
        self.unit_coords(p).norm_sq()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.implicit(p) < 1.0
    }

    /// Relative radial offset of `p` from the boundary in the normalized frame.
    pub fn boundary_offset(&self, p: Vec2) -> f64 {
        (self.unit_coords(p).norm() - 1.0).abs()
    }

    /// Radial projection (in the normalized frame) of `p` onto the boundary.
    pub fn project_to_boundary(&self, p: Vec2) -> Vec2 {
        let u = self.unit_coords(p);
        let n = u.norm();
        if n == 0.0 {
            return self.point_at(0.0);
        }
        self.world_point(u * (1.0 / n))
    }

    /// Boundary point where the line through `p` along `dir` comes closest
    /// to the ellipse, measured in the normalized frame. For a tangent line
    /// this is the point of tangency.
    pub fn line_touch_point(&self, p: Vec2, dir: Direction) -> Vec2 {
        let o = self.unit_coords(p);
        let dl = self.local_vec(dir.vec());
        let d = Vec2::new(dl.x / self.semi_major, dl.y / self.semi_minor);
        let t = -o.dot(d) / d.norm_sq();
        let touch = o + d * t;
        let n = touch.norm();
        if n == 0.0 {
            return self.point_at(0.0);
        }
        self.world_point(touch * (1.0 / n))
    }

    fn check_on_boundary(&self, p: Vec2) -> Result<(), GeometryError> {
        let offset = self.boundary_offset(p);
        if offset > ON_BOUNDARY_TOL || !offset.is_finite() {
            return Err(GeometryError::NotOnBoundary {
                x: p.x,
                y: p.y,
                offset,
            });
        }
        Ok(())
    }

    /// `(cos u, sin u)` of the anomaly of `p`, without going through an
    /// angle: round-off there would seed drift along unstable orbits.
    fn anomaly_cos_sin(&self, p: Vec2) -> (f64, f64) {
        let u = self.unit_coords(p);
        let n = u.norm();
        if n == 0.0 {
            (1.0, 0.0)
        } else {
            (u.x / n, u.y / n)
        }
    }

    pub(crate) fn normal_unchecked(&self, p: Vec2) -> Direction {
        let (c, s) = self.anomaly_cos_sin(p);
        let g = Vec2::new(c / self.semi_major, s / self.semi_minor);
        Direction::renormalized(self.world_vec(g))
    }

    pub(crate) fn curvature_unchecked(&self, p: Vec2) -> f64 {
        let (c, s) = self.anomaly_cos_sin(p);
        let (a, b) = (self.semi_major, self.semi_minor);
        let speed_sq = a * a * s * s + b * b * c * c;
        a * b / (speed_sq * speed_sq.sqrt())
    }

    /// Smallest boundary curvature, attained at the minor-axis endpoints.
    pub fn min_curvature(&self) -> f64 {
        self.semi_minor / (self.semi_major * self.semi_major)
    }

    /// Farthest distance from the origin to any boundary point.
    pub fn max_distance_from_origin(&self) -> f64 {
        let f = |u: f64| self.point_at(u).norm_sq();
        maximize_periodic(f, 256).1.sqrt()
    }

    /// Radius of a circle around `center` that contains the ellipse.
    pub fn bounding_radius(&self) -> f64 {
        self.semi_major
    }
}

/// Intersects the forward ray `origin + t·dir`, `t > 0`, with `e`.
///
/// The discriminant of the reduced quadratic (in the frame where `e` is the
/// unit circle) is compared against `eps_tan` times the coefficient scale
/// to separate tangency from transversal crossings.
pub fn ray_ellipse_intersect(origin: Vec2, dir: Direction, e: &Ellipse, eps_tan: f64) -> HitClass {
    let o = e.unit_coords(origin);
    let dl = e.local_vec(dir.vec());
    let d = Vec2::new(dl.x / e.semi_major, dl.y / e.semi_minor);

    let qa = d.norm_sq();
    let half_b = o.dot(d);
    let qc = o.norm_sq() - 1.0;
    let disc = half_b * half_b - qa * qc;
    let scale = half_b * half_b + (qa * qc).abs();

    if disc < -eps_tan * scale {
        return HitClass::Miss;
    }
    if disc.abs() <= eps_tan * scale {
        let t = -half_b / qa;
        if t <= 0.0 {
            return HitClass::Miss;
        }
        let touch = o + d * t;
        let point = e.world_point(touch * (1.0 / touch.norm()));
        return HitClass::Tangent { t, point };
    }

    let root = disc.sqrt();
    // stable pair of roots
    let q = -(half_b + root.copysign(half_b));
    let (mut t1, mut t2) = if q == 0.0 {
        (-root / qa, root / qa)
    } else {
        (q / qa, qc / q)
    };
    if t1 > t2 {
        std::mem::swap(&mut t1, &mut t2);
    }
    if t1 <= 0.0 {
        // entry behind the origin: the origin is on or inside the boundary
        return HitClass::Miss;
    }
    HitClass::Transversal {
        t_enter: t1,
        t_exit: t2,
        p_enter: origin + dir.vec() * t1,
        p_exit: origin + dir.vec() * t2,
    }
}

/// Outward unit normal of `e` at boundary point `p`.
pub fn outward_normal(e: &Ellipse, p: Vec2) -> Result<Direction, GeometryError> {
    e.check_on_boundary(p)?;
    Ok(e.normal_unchecked(p))
}

/// Curvature of the boundary of `e` at `p`.
pub fn boundary_curvature(e: &Ellipse, p: Vec2) -> Result<f64, GeometryError> {
    e.check_on_boundary(p)?;
    Ok(e.curvature_unchecked(p))
}

pub fn ellipse_area(e: &Ellipse) -> f64 {
    PI * e.semi_major * e.semi_minor
}

/// First forward crossing of the circle `|p| = a`.
pub fn ray_circle_exit(origin: Vec2, dir: Direction, a: f64) -> Result<(f64, Vec2), GeometryError> {
    if origin.norm() > a + 1e-9 {
        return Err(GeometryError::OutsideBall {
            x: origin.x,
            y: origin.y,
            radius: a,
        });
    }
    let d = dir.vec();
    let half_b = origin.dot(d);
    let c = (origin.norm_sq() - a * a).min(0.0);
    let root = (half_b * half_b - c).sqrt();
    let t = if half_b > 0.0 {
        -c / (half_b + root)
    } else {
        root - half_b
    };
    Ok((t, origin + d * t))
}

/// The enclosing ball of radius `a` centered at the origin together with a
/// validated list of obstacles.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    ball_radius: f64,
    obstacles: Vec<Ellipse>,
}

impl Scene {
    /// Builds and validates a scene.
    pub fn new(ball_radius: f64, obstacles: Vec<Ellipse>) -> Result<Self, SceneError> {
        validate_scene(ball_radius, &obstacles)?;
        Ok(Scene {
            ball_radius,
            obstacles,
        })
    }

    pub fn empty(ball_radius: f64) -> Result<Self, SceneError> {
        Self::new(ball_radius, Vec::new())
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn obstacles(&self) -> &[Ellipse] {
        &self.obstacles
    }

    /// Obstacle by its 1-based index.
    pub fn obstacle(&self, index: usize) -> Option<&Ellipse> {
        index.checked_sub(1).and_then(|i| self.obstacles.get(i))
    }

    /// Area of the ball minus the obstacle areas.
    pub fn free_area(&self) -> f64 {
        PI * self.ball_radius * self.ball_radius
            - self.obstacles.iter().map(ellipse_area).sum::<f64>()
    }

    /// Same obstacles inside a ball of a different radius.
    pub fn with_ball_radius(&self, ball_radius: f64) -> Result<Scene, SceneError> {
        Scene::new(ball_radius, self.obstacles.clone())
    }
}

/// Summary of a successful validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Smallest boundary-to-boundary distance over all obstacle pairs
    /// (infinite with fewer than two obstacles).
    pub min_gap: f64,
    /// Smallest distance from any obstacle to the ball.
    pub min_ball_clearance: f64,
}

/// Checks the scene invariants: every obstacle strictly inside the ball and
/// obstacles pairwise disjoint, both with clearance `1e-6·a`.
pub fn validate_scene(
    ball_radius: f64,
    obstacles: &[Ellipse],
) -> Result<ValidationReport, SceneError> {
    if !(ball_radius.is_finite() && ball_radius > 0.0) {
        return Err(SceneError::InvalidBall(ball_radius));
    }
    let clearance = CLEARANCE_FACTOR * ball_radius;
    let mut min_ball_clearance = f64::INFINITY;
    for (i, e) in obstacles.iter().enumerate() {
        let k = e.min_curvature();
        if !(k.is_finite() && k > 0.0) {
            return Err(SceneError::DegenerateEllipse(
                i + 1,
                format!("minimum curvature {k} is not positive"),
            ));
        }
        let reach = e.max_distance_from_origin();
        let gap = ball_radius - reach;
        if gap < clearance {
            return Err(SceneError::TooCloseToBall(i + 1));
        }
        min_ball_clearance = min_ball_clearance.min(gap);
    }

    let mut min_gap = f64::INFINITY;
    for i in 0..obstacles.len() {
        for j in (i + 1)..obstacles.len() {
            let (ei, ej) = (&obstacles[i], &obstacles[j]);
            let center_gap = ei.center.distance(ej.center);
            if center_gap > ei.bounding_radius() + ej.bounding_radius() + clearance {
                min_gap = min_gap.min(center_gap - ei.bounding_radius() - ej.bounding_radius());
                continue;
            }
            if ei.contains(ej.center) || ej.contains(ei.center) {
                return Err(SceneError::Overlap(i + 1, j + 1));
            }
            let d = boundary_distance(ei, ej);
            if d < clearance {
                return Err(SceneError::Overlap(i + 1, j + 1));
            }
            min_gap = min_gap.min(d);
        }
    }
    Ok(ValidationReport {
        min_gap,
        min_ball_clearance,
    })
}

/// Minimum distance between the boundaries of two ellipses.
///
/// A coarse grid over both anomalies seeds alternating golden-section
/// refinement from the best few starts. Overlapping boundaries report a
/// distance of (nearly) zero.
pub fn boundary_distance(e1: &Ellipse, e2: &Ellipse) -> f64 {
    const GRID: usize = 96;
    let dist = |u: f64, v: f64| e1.point_at(u).distance(e2.point_at(v));
    let step = 2.0 * PI / GRID as f64;
    let mut seeds: Vec<(f64, f64, f64)> = Vec::with_capacity(GRID * GRID);
    for i in 0..GRID {
        for j in 0..GRID {
            let (u, v) = (i as f64 * step, j as f64 * step);
            seeds.push((dist(u, v), u, v));
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = seeds[0].0;
    for &(_, u0, v0) in seeds.iter().take(6) {
        let (mut u, mut v) = (u0, v0);
        let mut width = step;
        for _ in 0..200 {
            let (nu, _) = golden_min(|x| dist(x, v), u - width, u + width, 1e-13);
            let (nv, d) = golden_min(|y| dist(nu, y), v - width, v + width, 1e-13);
            let moved = (nu - u).abs() + (nv - v).abs();
            u = nu;
            v = nv;
            best = best.min(d);
            if moved < 1e-12 {
                break;
            }
            width = (moved * 4.0).clamp(1e-9, step);
        }
    }
    best
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximum of a 2π-periodic function: dense scan then golden refinement.
fn maximize_periodic(f: impl Fn(f64) -> f64, samples: usize) -> (f64, f64) {
    let step = 2.0 * PI / samples as f64;
    let (u0, _) = (0..samples)
        .map(|i| {
            let u = i as f64 * step;
            (u, f(u))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one sample");
    let (u, neg) = golden_min(|u| -f(u), u0 - step, u0 + step, 1e-12);
    (u, -neg)
}
