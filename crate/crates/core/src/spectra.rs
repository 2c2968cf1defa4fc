//! Sampling of the travelling-times spectrum over the inward boundary
//! phase space, and of sojourn times of rays entering along a direction ω.
//!
//! Boundary chart: a sample `(psi, phi)` sits at `q = a(cos psi, sin psi)`
//! with velocity equal to the inward normal `-(cos psi, sin psi)` rotated
//! counterclockwise by `phi`. `phi = 0` is the radial ray; `|phi| = π/2`
//! is tangent to the sphere.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::billiard::{
    is_grazing_angle, trace, BilliardError, PhasePoint, TraceOptions, Trajectory,
    TrajectoryStatus,
};
use crate::geometry::{Direction, Scene, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error("sojourn time is undefined for a trajectory that did not exit")]
    NotExited,
    #[error("impact parameter {b} outside (-{a}, {a})")]
    ImpactOutOfRange { b: f64, a: f64 },
}

/// Phase point on the sphere of radius `a` for the boundary sample
/// `(psi, phi)`.
pub fn boundary_phase_point(a: f64, psi: f64, phi: f64) -> PhasePoint {
    let (s, c) = psi.sin_cos();
    let q = Vec2::new(a * c, a * s);
    let inward = Vec2::new(-c, -s);
    PhasePoint::new(q, Direction::renormalized(inward.rotate(phi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumStatus {
    Finite,
    Grazing,
    Cutoff,
}

impl fmt::Display for SpectrumStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumStatus::Finite => "finite",
            SpectrumStatus::Grazing => "grazing",
            SpectrumStatus::Cutoff => "cutoff",
        })
    }
}

/// One node of the travelling-times spectrum. Cutoff records carry
/// `t = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRecord {
    pub psi: f64,
    pub phi: f64,
    pub status: SpectrumStatus,
    pub t: f64,
    pub reflections: usize,
    pub tangencies: usize,
}

/// Midpoint of cell `i` of `n` equal cells on `[lo, lo + width)`.
#[inline]
pub(crate) fn midpoint(lo: f64, width: f64, i: usize, n: usize) -> f64 {
    lo + width * (i as f64 + 0.5) / n as f64
}

pub fn psi_node(i: usize, n_psi: usize) -> f64 {
    midpoint(0.0, TAU, i, n_psi)
}

pub fn phi_node(j: usize, n_phi: usize) -> f64 {
    midpoint(-FRAC_PI_2, PI, j, n_phi)
}

/// Travelling time at one boundary sample, with event counts.
pub fn spectrum_record(
    scene: &Scene,
    psi: f64,
    phi: f64,
    opts: &TraceOptions,
) -> Result<SpectrumRecord, BilliardError> {
    if is_grazing_angle(phi) {
        return Ok(SpectrumRecord {
            psi,
            phi,
            status: SpectrumStatus::Grazing,
            t: 0.0,
            reflections: 0,
            tangencies: 0,
        });
    }
    let tr = trace(scene, boundary_phase_point(scene.ball_radius(), psi, phi), opts)?;
    let (status, t) = match tr.status {
        TrajectoryStatus::Exited { .. } => (SpectrumStatus::Finite, tr.interior_time),
        _ => (SpectrumStatus::Cutoff, f64::INFINITY),
    };
    Ok(SpectrumRecord {
        psi,
        phi,
        status,
        t,
        reflections: tr.reflection_count(),
        tangencies: tr.tangency_count(),
    })
}

/// Travelling times on the `n_psi × n_phi` midpoint grid in row-major
/// order (psi outer, phi inner).
pub fn travelling_time_spectrum(
    scene: &Scene,
    n_psi: usize,
    n_phi: usize,
    opts: &TraceOptions,
) -> Result<Vec<SpectrumRecord>, BilliardError> {
    (0..n_psi * n_phi)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n_phi, k % n_phi);
            spectrum_record(scene, psi_node(i, n_psi), phi_node(j, n_phi), opts)
        })
        .collect()
}

/// One sampled scattering ray: incoming direction angle, impact parameter,
/// outgoing direction and sojourn time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlsRecord {
    pub omega_angle: f64,
    pub b: f64,
    pub theta: Direction,
    /// NaN when the ray did not exit within the caps.
    pub sojourn: f64,
    pub reflections: usize,
    pub tangential: bool,
    pub exited: bool,
}

/// Launches the ray with direction ω from the point of the tangent line
/// `Z_ω` at signed distance `b` along `ω⊥`, and returns the traced
/// trajectory (which starts where the ray enters the ball) with its record.
pub fn shoot_from_zline(
    scene: &Scene,
    omega_angle: f64,
    b: f64,
    opts: &TraceOptions,
) -> Result<(Trajectory, SlsRecord), SpectraError> {
    shoot(scene, Direction::from_angle(omega_angle), omega_angle, b, opts)
}

fn shoot(
    scene: &Scene,
    omega: Direction,
    omega_angle: f64,
    b: f64,
    opts: &TraceOptions,
) -> Result<(Trajectory, SlsRecord), SpectraError> {
    let a = scene.ball_radius();
    if !(b.abs() < a) {
        return Err(SpectraError::ImpactOutOfRange { b, a });
    }
    let launch = omega.vec() * (-a) + omega.perp().vec() * b;
    // advance from Z_ω to the sphere: nothing lies outside the ball
    let to_sphere = a - (a * a - b * b).sqrt();
    let entry = PhasePoint::new(launch + omega.vec() * to_sphere, omega);
    let tr = trace(scene, entry, opts)?;
    let theta = tr.final_direction();
    let sojourn = if tr.exited() {
        sojourn_time(&tr, omega, theta, a)?
    } else {
        f64::NAN
    };
    let rec = SlsRecord {
        omega_angle,
        b,
        theta,
        sojourn,
        reflections: tr.reflection_count(),
        tangential: tr.tangency_count() > 0,
        exited: tr.exited(),
    };
    Ok((tr, rec))
}

/// Sojourn time of an exited ray: length of the ray between the lines
/// `Z_ω` and `Z_{-θ}` minus `2a`.
///
/// With first and last reflection points `q_f`, `q_l` and total length `Σ`
/// between them, the incoming leg from `Z_ω` is `a + <q_f, ω>` and the
/// outgoing leg to `Z_{-θ}` is `a - <q_l, θ>`.
pub fn sojourn_time(
    tr: &Trajectory,
    omega: Direction,
    theta: Direction,
    a: f64,
) -> Result<f64, SpectraError> {
    if !tr.exited() {
        return Err(SpectraError::NotExited);
    }
    let mut points = tr.reflections().map(|e| e.point);
    let Some(first) = points.next() else {
        return Ok(0.0);
    };
    let mut last = first;
    let mut between = 0.0;
    for p in points {
        between += p.distance(last);
        last = p;
    }
    let incoming = a + omega.dot(first);
    let outgoing = a - theta.dot(last);
    Ok(incoming + between + outgoing - 2.0 * a)
}

/// Sojourn samples on the product grid of `n_omega` direction angles
/// (midpoints of `[0, 2π)`) and `n_b` impact parameters (midpoints of
/// `(-a, a)`), row-major with ω outer.
pub fn sls_sample(
    scene: &Scene,
    n_omega: usize,
    n_b: usize,
    opts: &TraceOptions,
) -> Result<Vec<SlsRecord>, SpectraError> {
    let a = scene.ball_radius();
    (0..n_omega * n_b)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n_b, k % n_b);
            let omega_angle = midpoint(0.0, TAU, i, n_omega);
            let b = midpoint(-a, 2.0 * a, j, n_b);
            shoot_from_zline(scene, omega_angle, b, opts).map(|(_, r)| r)
        })
        .collect()
}

/// Reverses an exited ray: incoming direction `-θ` through the last
/// reflection point. Returns the reversed record.
pub fn reverse_ray(
    scene: &Scene,
    tr: &Trajectory,
    opts: &TraceOptions,
) -> Result<Option<SlsRecord>, SpectraError> {
    let Some(last) = tr.reflections().last() else {
        return Ok(None);
    };
    let omega = -tr.final_direction();
    let b = omega.perp().dot(last.point);
    shoot(scene, omega, omega.angle(), b, opts).map(|(_, r)| Some(r))
}
