//! The exterior billiard flow inside the ball: free flight, specular
//! reflection, tangential pass-through and exit detection.

use thiserror::Error;

use crate::geometry::{
    ray_circle_exit, ray_ellipse_intersect, Direction, GeometryError, HitClass, Scene, Vec2,
    DEFAULT_EPS_TAN,
};
use crate::spectra::boundary_phase_point;

/// Obstacle hits closer than this to the current point are ignored; this
/// stops the point just reflected from being detected again.
pub const DEPARTURE_GUARD: f64 = 1e-9;

/// Incidence cosines at or below this value mark an event as tangential.
pub const GRAZING_COS: f64 = 1e-9;

pub const DEFAULT_MAX_REFLECTIONS: usize = 10_000;
pub const DEFAULT_MAX_TIME: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BilliardError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("reflection requested with <v, n> = {0} >= 0")]
    NotIncoming(f64),
    #[error("no forward event from ({x}, {y})")]
    NoEvent { x: f64, y: f64 },
}

/// Limits applied while tracing a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub max_reflections: usize,
    pub max_time: f64,
    pub eps_tan: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            max_reflections: DEFAULT_MAX_REFLECTIONS,
            max_time: DEFAULT_MAX_TIME,
            eps_tan: DEFAULT_EPS_TAN,
        }
    }
}

impl TraceOptions {
    pub fn with_max_reflections(self, max_reflections: usize) -> Self {
        TraceOptions {
            max_reflections,
            ..self
        }
    }

    pub fn with_max_time(self, max_time: f64) -> Self {
        TraceOptions { max_time, ..self }
    }
}

/// A position together with a unit velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: Vec2,
    pub v: Direction,
}

impl PhasePoint {
    pub fn new(q: Vec2, v: Direction) -> Self {
        PhasePoint { q, v }
    }

    /// Same point, opposite velocity.
    pub fn reversed(self) -> Self {
        PhasePoint { q: self.q, v: -self.v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionEvent {
    /// Cumulative time when produced by [`trace`]; step length when
    /// produced by [`next_event`].
    pub time: f64,
    /// 1-based obstacle index.
    pub obstacle_index: usize,
    pub point: Vec2,
    /// `<-v, n>` at impact.
    pub cos_incidence: f64,
    pub tangential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    Reflection(ReflectionEvent),
    TangencyPass(ReflectionEvent),
    ExitBall { t: f64, exit: PhasePoint },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus {
    Exited { exit_time: f64, exit: PhasePoint },
    /// More than this many reflections would have been needed.
    CutoffReflections(usize),
    CutoffTime(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: PhasePoint,
    pub events: Vec<ReflectionEvent>,
    pub status: TrajectoryStatus,
    pub interior_time: f64,
    /// Velocity after the last event (the exit velocity when exited).
    pub last_direction: Direction,
}

impl Trajectory {
    pub fn exited(&self) -> bool {
        matches!(self.status, TrajectoryStatus::Exited { .. })
    }

    pub fn reflections(&self) -> impl Iterator<Item = &ReflectionEvent> {
        self.events.iter().filter(|e| !e.tangential)
    }

    pub fn reflection_count(&self) -> usize {
        self.reflections().count()
    }

    pub fn tangency_count(&self) -> usize {
        self.events.iter().filter(|e| e.tangential).count()
    }

    pub fn final_direction(&self) -> Direction {
        self.last_direction
    }
}

/// Sequence of obstacle indices hit by the non-tangential reflections.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Itinerary(pub Vec<usize>);

impl Itinerary {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Specular reflection of `v` off a surface with outward normal `n`.
pub fn reflect(v: Direction, n: Direction) -> Result<Direction, BilliardError> {
    let vn = v.dot(n.vec());
    if vn >= 0.0 {
        return Err(BilliardError::NotIncoming(vn));
    }
    Ok(Direction::renormalized(v.vec() - n.vec() * (2.0 * vn)))
}

/// Nearest forward event from `x`: an obstacle hit or the exit from the ball.
///
/// At equal times a tangency is reported before the ball exit.
pub fn next_event(scene: &Scene, x: PhasePoint, eps_tan: f64) -> Result<Event, BilliardError> {
    let mut best: Option<(f64, usize, HitClass)> = None;
    for (i, e) in scene.obstacles().iter().enumerate() {
        let hit = ray_ellipse_intersect(x.q, x.v, e, eps_tan);
        let t = match hit {
            HitClass::Miss => continue,
            HitClass::Tangent { t, .. } => t,
            HitClass::Transversal { t_enter, .. } => t_enter,
        };
        if t <= DEPARTURE_GUARD {
            continue;
        }
        if best.is_none_or(|(bt, _, _)| t < bt) {
            best = Some((t, i, hit));
        }
    }

    let (t_exit, exit_point) = ray_circle_exit(x.q, x.v, scene.ball_radius())?;
    if let Some((t, i, hit)) = best {
        if t <= t_exit {
            let e = &scene.obstacles()[i];
            return Ok(match hit {
                HitClass::Transversal { p_enter, .. } => {
                    let n = e.normal_unchecked(p_enter);
                    let cos_incidence = -x.v.dot(n.vec());
                    let ev = ReflectionEvent {
                        time: t,
                        obstacle_index: i + 1,
                        point: p_enter,
                        cos_incidence: cos_incidence.max(0.0),
                        tangential: cos_incidence <= GRAZING_COS,
                    };
                    if ev.tangential {
                        Event::TangencyPass(ev)
                    } else {
                        Event::Reflection(ev)
                    }
                }
                HitClass::Tangent { point, .. } => {
                    let n = e.normal_unchecked(point);
                    Event::TangencyPass(ReflectionEvent {
                        time: t,
                        obstacle_index: i + 1,
                        point,
                        cos_incidence: x.v.dot(n.vec()).abs().min(GRAZING_COS),
                        tangential: true,
                    })
                }
                HitClass::Miss => unreachable!("misses are skipped above"),
            });
        }
    }
    if !t_exit.is_finite() {
        return Err(BilliardError::NoEvent { x: x.q.x, y: x.q.y });
    }
    Ok(Event::ExitBall {
        t: t_exit,
        exit: PhasePoint::new(exit_point, x.v),
    })
}

/// Follows the flow from `x` until it leaves the ball or a cap trips.
pub fn trace(scene: &Scene, x: PhasePoint, opts: &TraceOptions) -> Result<Trajectory, BilliardError> {
    let mut cur = x;
    let mut time = 0.0;
    let mut reflections = 0usize;
    let mut events = Vec::new();

    let (status, interior_time) = loop {
        match next_event(scene, cur, opts.eps_tan)? {
            Event::ExitBall { t, exit } => {
                if time + t > opts.max_time {
                    break (TrajectoryStatus::CutoffTime(opts.max_time), opts.max_time);
                }
                time += t;
                break (
                    TrajectoryStatus::Exited {
                        exit_time: time,
                        exit,
                    },
                    time,
                );
            }
            Event::Reflection(mut ev) => {
                if time + ev.time > opts.max_time {
                    break (TrajectoryStatus::CutoffTime(opts.max_time), opts.max_time);
                }
                if reflections == opts.max_reflections {
                    break (TrajectoryStatus::CutoffReflections(reflections), time);
                }
                let n = scene.obstacles()[ev.obstacle_index - 1].normal_unchecked(ev.point);
                let v = reflect(cur.v, n)?;
                time += ev.time;
                ev.time = time;
                events.push(ev);
                reflections += 1;
                cur = PhasePoint::new(ev.point, v);
            }
            Event::TangencyPass(mut ev) => {
                if time + ev.time > opts.max_time {
                    break (TrajectoryStatus::CutoffTime(opts.max_time), opts.max_time);
                }
                time += ev.time;
                ev.time = time;
                events.push(ev);
                cur = PhasePoint::new(ev.point, cur.v);
            }
        }
    };

    Ok(Trajectory {
        start: x,
        events,
        status,
        interior_time,
        last_direction: cur.v,
    })
}

/// Result of the travelling-time map on a boundary phase point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TravelTime {
    Finite(f64),
    /// Launch direction tangent to the sphere; the travelling time is 0 by
    /// convention.
    Grazing,
    Cutoff,
}

impl TravelTime {
    /// Numeric value: 0 for grazing, infinity for cutoff.
    pub fn value(self) -> f64 {
        match self {
            TravelTime::Finite(t) => t,
            TravelTime::Grazing => 0.0,
            TravelTime::Cutoff => f64::INFINITY,
        }
    }
}

/// True when `phi` is within `1e-12` of `±π/2`.
pub fn is_grazing_angle(phi: f64) -> bool {
    (phi.abs() - std::f64::consts::FRAC_PI_2).abs() <= 1e-12
}

/// Time the trajectory launched from the boundary sample `(psi, phi)`
/// spends inside the ball.
pub fn travelling_time(
    scene: &Scene,
    psi: f64,
    phi: f64,
    opts: &TraceOptions,
) -> Result<TravelTime, BilliardError> {
    if is_grazing_angle(phi) {
        return Ok(TravelTime::Grazing);
    }
    let tr = trace(scene, boundary_phase_point(scene.ball_radius(), psi, phi), opts)?;
    Ok(match tr.status {
        TrajectoryStatus::Exited { .. } => TravelTime::Finite(tr.interior_time),
        _ => TravelTime::Cutoff,
    })
}

pub fn itinerary(tr: &Trajectory) -> Itinerary {
    Itinerary(tr.reflections().map(|e| e.obstacle_index).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrapClassification {
    pub forward_trapped_candidate: bool,
    pub backward_trapped_candidate: bool,
}

impl TrapClassification {
    pub fn either(&self) -> bool {
        self.forward_trapped_candidate || self.backward_trapped_candidate
    }
}

/// Flags `x` as a trapping candidate in each time direction. A cap trip is
/// only evidence: a finite run never certifies that the infinite
/// trajectory escapes or stays.
pub fn classify_trapped(
    scene: &Scene,
    x: PhasePoint,
    opts: &TraceOptions,
) -> Result<TrapClassification, BilliardError> {
    let forward = trace(scene, x, opts)?;
    let backward = trace(scene, x.reversed(), opts)?;
    Ok(TrapClassification {
        forward_trapped_candidate: !forward.exited(),
        backward_trapped_candidate: !backward.exited(),
    })
}

/// Phase point reached after flowing for `duration` from `x`, continuing
/// in a straight line once the ball is left.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub point: PhasePoint,
    pub itinerary: Itinerary,
    pub tangencies: usize,
}

pub fn flow_for(
    scene: &Scene,
    x: PhasePoint,
    duration: f64,
    opts: &TraceOptions,
) -> Result<FlowState, BilliardError> {
    let mut cur = x;
    let mut remaining = duration;
    let mut indices = Vec::new();
    let mut tangencies = 0;
    loop {
        match next_event(scene, cur, opts.eps_tan)? {
            Event::ExitBall { t, exit } => {
                if remaining <= t {
                    break;
                }
                remaining -= t;
                cur = exit;
                // nothing outside the ball can be hit again
                cur.q += cur.v.vec() * remaining;
                remaining = 0.0;
                break;
            }
            Event::Reflection(ev) | Event::TangencyPass(ev) => {
                if remaining <= ev.time {
                    break;
                }
                remaining -= ev.time;
                if ev.tangential {
                    tangencies += 1;
                    cur = PhasePoint::new(ev.point, cur.v);
                } else {
                    if indices.len() == opts.max_reflections {
                        break;
                    }
                    let n = scene.obstacles()[ev.obstacle_index - 1].normal_unchecked(ev.point);
                    cur = PhasePoint::new(ev.point, reflect(cur.v, n)?);
                    indices.push(ev.obstacle_index);
                }
            }
        }
    }
    cur.q += cur.v.vec() * remaining;
    Ok(FlowState {
        point: cur,
        itinerary: Itinerary(indices),
        tangencies,
    })
}
