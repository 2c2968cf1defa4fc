//! Command-line front end: argument parsing, dispatch and CSV emission.
//!
//! [`run`] is pure apart from reading scene files: it returns the output
//! text and exit code, and `main` decides where the text goes.

pub mod scene_file;

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::billiard::{
    reflect, trace, BilliardError, PhasePoint, TraceOptions, TrajectoryStatus, DEFAULT_MAX_REFLECTIONS,
    DEFAULT_MAX_TIME,
};
use crate::compare::{distinguish, CompareError, Verdict, DEFAULT_COMPARE_TOL};
use crate::fronts::{check_normal_tangency, involute, propagate_front, FrontError, FrontState, Orientation};
use crate::geometry::{Direction, GeometryError, Scene, Vec2, DEFAULT_EPS_TAN};
use crate::santalo::{santalo_defect, trapped_fraction, SantaloError};
use crate::spectra::{sls_sample, travelling_time_spectrum, SpectraError};

pub use scene_file::{parse_scene, serialize_scene, SceneFileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIFFERENT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

const CONVENTION: &str =
    "q = a(cos psi, sin psi); v = inward normal rotated counterclockwise by phi; angles in radians";

#[derive(Debug, Parser)]
#[command(name = "scatter", version, about = "Exterior billiards among elliptic obstacles")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Events of one trajectory from an interior phase point.
    Trace {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, allow_hyphen_values = true)]
        q: Pair,
        #[arg(long, allow_hyphen_values = true)]
        v: Pair,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Travelling times on the boundary midpoint grid.
    Spectrum {
        #[command(flatten)]
        scene: SceneArg,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sojourn times of rays launched from tangent lines.
    Sls {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value_t = 100)]
        n_omega: usize,
        #[arg(long, default_value_t = 100)]
        n_b: usize,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Liouville integral of the travelling time against the phase volume.
    Santalo {
        #[command(flatten)]
        scene: SceneArg,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fraction of Liouville samples needing more than each reflection cutoff.
    Trapped {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, default_value_t = 100_000)]
        n_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        cutoffs: Vec<usize>,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Compare the travelling-time spectra of two scenes.
    Compare {
        #[arg(long)]
        scene_a: PathBuf,
        #[arg(long)]
        scene_b: PathBuf,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = DEFAULT_COMPARE_TOL)]
        tol: f64,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Curvature of a front carried along a trajectory.
    Front {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, allow_hyphen_values = true)]
        q: Pair,
        #[arg(long, allow_hyphen_values = true)]
        v: Pair,
        #[arg(long, default_value_t = 0.0)]
        kappa0: f64,
        #[command(flatten)]
        caps: Caps,
        #[command(flatten)]
        out: OutArg,
    },
    /// Involute front unwound from an obstacle boundary.
    Involute {
        #[command(flatten)]
        scene: SceneArg,
        /// 1-based obstacle index.
        #[arg(long)]
        obstacle_index: usize,
        #[arg(long, allow_hyphen_values = true)]
        s0: f64,
        #[arg(long)]
        eps0: f64,
        /// Smallest string length kept; defaults to eps0/10.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 64)]
        n_samples: usize,
        #[arg(long, value_enum, default_value_t = Winding::Ccw)]
        orientation: Winding,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
pub struct SceneArg {
    #[arg(long)]
    pub scene: PathBuf,
}

#[derive(Debug, Args)]
pub struct Grid {
    #[arg(long, default_value_t = 200)]
    pub n_psi: usize,
    #[arg(long, default_value_t = 200)]
    pub n_phi: usize,
}

#[derive(Debug, Args)]
pub struct Caps {
    #[arg(long, default_value_t = DEFAULT_MAX_REFLECTIONS)]
    pub max_reflections: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_TIME)]
    pub max_time: f64,
    #[arg(long, default_value_t = DEFAULT_EPS_TAN)]
    pub eps_tan: f64,
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Winding {
    Ccw,
    Cw,
}

/// `X,Y` on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Pair(parse(x)?, parse(y)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BilliardError> for CliError {
    fn from(e: BilliardError) -> Self {
        match e {
            BilliardError::NoEvent { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Billiard(b) => b.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SantaloError> for CliError {
    fn from(e: SantaloError) -> Self {
        match e {
            SantaloError::Billiard(b) => b.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<CompareError> for CliError {
    fn from(e: CompareError) -> Self {
        match e {
            CompareError::Billiard(b) => b.into(),
            CompareError::BadTolerance(_) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<FrontError> for CliError {
    fn from(e: FrontError) -> Self {
        match e {
            FrontError::Billiard(b) => b.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let command_line = args.join(" ");
    match RunConfig::try_parse_from(&args) {
        Ok(config) => run(&config, &command_line),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            Outcome {
                text: e.to_string(),
                exit_code: code,
                out: None,
            }
        }
    }
}

pub fn run(config: &RunConfig, command_line: &str) -> Outcome {
    let out = match &config.command {
        Command::Trace { out, .. }
        | Command::Spectrum { out, .. }
        | Command::Sls { out, .. }
        | Command::Santalo { out, .. }
        | Command::Trapped { out, .. }
        | Command::Compare { out, .. }
        | Command::Front { out, .. }
        | Command::Involute { out, .. } => out.out.clone(),
    };
    match dispatch(&config.command, command_line) {
        Ok((text, exit_code)) => Outcome { text, exit_code, out },
        Err(e) => Outcome {
            text: format!("error: {}\n", e.message()),
            exit_code: e.exit_code(),
            out: None,
        },
    }
}

fn load_scene(path: &Path) -> Result<Scene, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_scene(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn trace_options(caps: &Caps) -> Result<TraceOptions, CliError> {
    if !(caps.max_time > 0.0) {
        return Err(CliError::Input(format!("--max-time must be positive, got {}", caps.max_time)));
    }
    if !(caps.eps_tan > 0.0 && caps.eps_tan < 1.0) {
        return Err(CliError::Input(format!("--eps-tan must lie in (0, 1), got {}", caps.eps_tan)));
    }
    Ok(TraceOptions {
        max_reflections: caps.max_reflections,
        max_time: caps.max_time,
        eps_tan: caps.eps_tan,
    })
}

fn positive(name: &str, n: usize) -> Result<usize, CliError> {
    if n == 0 {
        Err(CliError::Input(format!("--{name} must be positive")))
    } else {
        Ok(n)
    }
}

fn check_grid(grid: &Grid) -> Result<(usize, usize), CliError> {
    Ok((positive("n-psi", grid.n_psi)?, positive("n-phi", grid.n_phi)?))
}

/// A phase point given on the command line; it must lie in the free part
/// of the ball.
fn interior_point(scene: &Scene, q: Pair, v: Pair) -> Result<PhasePoint, CliError> {
    let q = Vec2::new(q.0, q.1);
    let v = Direction::new(v.0, v.1)?;
    let a = scene.ball_radius();
    if !q.is_finite() || q.norm() > a + 1e-9 {
        return Err(GeometryError::OutsideBall { x: q.x, y: q.y, radius: a }.into());
    }
    if let Some(k) = scene.obstacles().iter().position(|e| e.implicit(q) < 1.0 - 1e-9) {
        return Err(CliError::Input(format!("point {q} lies inside obstacle {}", k + 1)));
    }
    Ok(PhasePoint::new(q, v))
}

fn header(command_line: &str, seed: Option<u64>) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!(
        "# scatter {}\n# command: {command_line}\n# seed: {seed}\n# convention: {CONVENTION}\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// Appends one CSV row; `Display` on `f64` is the shortest round-trip form.
fn row(out: &mut String, fields: &[&dyn Display]) {
    for (k, f) in fields.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{f}").expect("writing to a String");
    }
    out.push('\n');
}

fn dispatch(command: &Command, command_line: &str) -> Result<(String, i32), CliError> {
    match command {
        Command::Trace { scene, q, v, caps, .. } => {
            let scene = load_scene(&scene.scene)?;
            let x = interior_point(&scene, *q, *v)?;
            let tr = trace(&scene, x, &trace_options(caps)?)?;
            let mut out = header(command_line, None);
            out.push_str("event,time,obstacle,x,y,vx,vy,cos_incidence\n");
            row(&mut out, &[&"start", &0.0, &0, &x.q.x, &x.q.y, &x.v.x(), &x.v.y(), &""]);
            let mut dir = x.v;
            for ev in &tr.events {
                let kind = if ev.tangential {
                    "tangency"
                } else {
                    let n = scene.obstacles()[ev.obstacle_index - 1].normal_unchecked(ev.point);
                    dir = reflect(dir, n)?;
                    "reflection"
                };
                row(
                    &mut out,
                    &[&kind, &ev.time, &ev.obstacle_index, &ev.point.x, &ev.point.y, &dir.x(), &dir.y(), &ev.cos_incidence],
                );
            }
            match tr.status {
                TrajectoryStatus::Exited { exit_time, exit } => row(
                    &mut out,
                    &[&"exit", &exit_time, &0, &exit.q.x, &exit.q.y, &exit.v.x(), &exit.v.y(), &""],
                ),
                TrajectoryStatus::CutoffReflections(n) => {
                    writeln!(out, "# cutoff: reflections = {n}").expect("writing to a String")
                }
                TrajectoryStatus::CutoffTime(t) => {
                    writeln!(out, "# cutoff: time = {t}").expect("writing to a String")
                }
            }
            Ok((out, EXIT_OK))
        }

        Command::Spectrum { scene, grid, caps, .. } => {
            let scene = load_scene(&scene.scene)?;
            let (n_psi, n_phi) = check_grid(grid)?;
            let records = travelling_time_spectrum(&scene, n_psi, n_phi, &trace_options(caps)?)?;
            let mut out = header(command_line, None);
            out.push_str("psi,phi,status,t,reflections,tangencies\n");
            for r in &records {
                row(&mut out, &[&r.psi, &r.phi, &r.status, &r.t, &r.reflections, &r.tangencies]);
            }
            Ok((out, EXIT_OK))
        }

        Command::Sls { scene, n_omega, n_b, caps, .. } => {
            let scene = load_scene(&scene.scene)?;
            let records = sls_sample(
                &scene,
                positive("n-omega", *n_omega)?,
                positive("n-b", *n_b)?,
                &trace_options(caps)?,
            )?;
            let mut out = header(command_line, None);
            out.push_str("omega,b,theta,sojourn,reflections,tangential,exited\n");
            for r in &records {
                row(
                    &mut out,
                    &[&r.omega_angle, &r.b, &r.theta.angle(), &r.sojourn, &r.reflections, &r.tangential, &r.exited],
                );
            }
            Ok((out, EXIT_OK))
        }

        Command::Santalo { scene, grid, caps, .. } => {
            let scene = load_scene(&scene.scene)?;
            let (n_psi, n_phi) = check_grid(grid)?;
            let r = santalo_defect(&scene, n_psi, n_phi, &trace_options(caps)?)?;
            let mut out = header(command_line, None);
            out.push_str("quantity,value\n");
            row(&mut out, &[&"n_psi", &n_psi]);
            row(&mut out, &[&"n_phi", &n_phi]);
            row(&mut out, &[&"integral", &r.integral]);
            row(&mut out, &[&"phase_volume", &r.phase_volume]);
            row(&mut out, &[&"defect", &r.defect]);
            row(&mut out, &[&"relative_defect", &r.relative_defect()]);
            row(&mut out, &[&"excluded_weight", &r.excluded_weight]);
            row(&mut out, &[&"excluded_bound", &r.excluded_bound()]);
            Ok((out, EXIT_OK))
        }

        Command::Trapped { scene, n_samples, seed, cutoffs, caps, .. } => {
            let scene = load_scene(&scene.scene)?;
            let fractions = trapped_fraction(&scene, *n_samples, *seed, cutoffs, &trace_options(caps)?)?;
            let mut out = header(command_line, Some(*seed));
            writeln!(out, "# samples: {n_samples}").expect("writing to a String");
            out.push_str("cutoff,fraction\n");
            for (cut, f) in &fractions {
                row(&mut out, &[cut, f]);
            }
            Ok((out, EXIT_OK))
        }

        Command::Compare { scene_a, scene_b, grid, tol, caps, .. } => {
            let a = load_scene(scene_a)?;
            let b = load_scene(scene_b)?;
            let (n_psi, n_phi) = check_grid(grid)?;
            let verdict = distinguish(&a, &b, n_psi, n_phi, &trace_options(caps)?, *tol)?;
            let r = verdict.report();
            let mut out = header(command_line, None);
            out.push_str("quantity,value\n");
            let (label, code) = match verdict {
                Verdict::IndistinguishableAtGrid(_) => ("indistinguishable", EXIT_OK),
                Verdict::Different(_) => ("different", EXIT_DIFFERENT),
            };
            row(&mut out, &[&"verdict", &label]);
            row(&mut out, &[&"n_psi", &n_psi]);
            row(&mut out, &[&"n_phi", &n_phi]);
            row(&mut out, &[&"tol", tol]);
            row(&mut out, &[&"compared", &r.compared]);
            row(&mut out, &[&"disagree_fraction", &r.disagree_fraction]);
            row(&mut out, &[&"max_abs_delta", &r.max_abs_delta]);
            row(&mut out, &[&"status_mismatches", &r.status_mismatches.len()]);
            if let Some(w) = r.witness {
                row(&mut out, &[&"witness_psi", &w.psi]);
                row(&mut out, &[&"witness_phi", &w.phi]);
                row(&mut out, &[&"witness_t_a", &w.t_a]);
                row(&mut out, &[&"witness_t_b", &w.t_b]);
            }
            for m in &r.status_mismatches {
                writeln!(out, "# mismatch: psi = {}, phi = {}, a = {}, b = {}", m.psi, m.phi, m.status_a, m.status_b)
                    .expect("writing to a String");
            }
            Ok((out, code))
        }

        Command::Front { scene, q, v, kappa0, caps, .. } => {
            let scene = load_scene(&scene.scene)?;
            let x = interior_point(&scene, *q, *v)?;
            let start = FrontState {
                point: x.q,
                dir: x.v,
                kappa: *kappa0,
            };
            let states = propagate_front(&scene, start, &trace_options(caps)?)?;
            let mut out = header(command_line, None);
            out.push_str("step,x,y,vx,vy,kappa\n");
            for (k, s) in std::iter::once(&start).chain(&states).enumerate() {
                row(&mut out, &[&k, &s.point.x, &s.point.y, &s.dir.x(), &s.dir.y(), &s.kappa]);
            }
            Ok((out, EXIT_OK))
        }

        Command::Involute {
            scene,
            obstacle_index,
            s0,
            eps0,
            delta,
            n_samples,
            orientation,
            ..
        } => {
            let scene = load_scene(&scene.scene)?;
            let e = scene
                .obstacle(*obstacle_index)
                .ok_or_else(|| CliError::Input(format!("no obstacle with index {obstacle_index}")))?;
            let orientation = match orientation {
                Winding::Ccw => Orientation::CounterClockwise,
                Winding::Cw => Orientation::Clockwise,
            };
            let delta = delta.unwrap_or(eps0 / 10.0);
            let y = involute(e, *s0, *eps0, delta, orientation, *n_samples)?;
            let mut out = header(command_line, None);
            writeln!(out, "# max tangency deviation: {}", check_normal_tangency(&y, e)).expect("writing to a String");
            out.push_str("s,x,y,nx,ny,kappa\n");
            for k in 0..y.len() {
                let (p, n) = (y.points()[k], y.normals()[k]);
                row(&mut out, &[&y.params()[k], &p.x, &p.y, &n.x(), &n.y(), &y.curvatures()[k]]);
            }
            Ok((out, EXIT_OK))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parsing() {
        assert_eq!("-2,1.5".parse::<Pair>(), Ok(Pair(-2.0, 1.5)));
        assert!("3".parse::<Pair>().is_err());
        assert!("a,b".parse::<Pair>().is_err());
    }

    #[test]
    fn missing_scene_file_is_an_input_error() {
        let o = run_args(["scatter", "spectrum", "--scene", "/nonexistent/x.scn"]);
        assert_eq!(o.exit_code, EXIT_INPUT);
    }

    #[test]
    fn unknown_flag_is_an_input_error() {
        let o = run_args(["scatter", "spectrum", "--bogus"]);
        assert_eq!(o.exit_code, EXIT_INPUT);
    }
}
