//! Liouville-measure quadrature of the travelling time and the
//! trapped-fraction experiment.
//!
//! On the circle of radius `a` the measure `dμ = dρ(q) dω_q |<ν(q), v>|`
//! becomes `a·cos(phi) dpsi dphi` in the boundary chart of
//! [`crate::spectra`]. Integrating `t` against it recovers the phase volume
//! `2π·(πa² − Σ|K_i|)` of the free region minus the trapped volume.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::billiard::{trace, BilliardError, TraceOptions, TrajectoryStatus};
use crate::geometry::Scene;
use crate::spectra::{boundary_phase_point, travelling_time_spectrum, SpectrumStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SantaloError {
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error("cutoffs must be non-empty and strictly increasing")]
    BadCutoffs,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Liouville integral of the travelling time together with the quadrature
/// weight of nodes that hit a cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleIntegral {
    pub integral: f64,
    pub excluded_weight: f64,
    /// Largest finite travelling time on the grid.
    pub max_t: f64,
}

/// Midpoint tensor rule for `∫ t·a·cos(phi) dpsi dphi` over
/// `[0, 2π) × [−π/2, π/2]`. Cutoff nodes add nothing to the integral and
/// their full weight to `excluded_weight`.
pub fn liouville_integral(
    scene: &Scene,
    n_psi: usize,
    n_phi: usize,
    opts: &TraceOptions,
) -> Result<LiouvilleIntegral, BilliardError> {
    let records = travelling_time_spectrum(scene, n_psi, n_phi, opts)?;
    let a = scene.ball_radius();
    let cell = (TAU / n_psi as f64) * (PI / n_phi as f64);
    let mut integral = CompensatedSum::default();
    let mut excluded = CompensatedSum::default();
    let mut max_t: f64 = 0.0;
    for r in &records {
        let w = a * r.phi.cos() * cell;
        match r.status {
            SpectrumStatus::Finite => {
                integral.add(r.t * w);
                max_t = max_t.max(r.t);
            }
            SpectrumStatus::Grazing => {}
            SpectrumStatus::Cutoff => excluded.add(w),
        }
    }
    Ok(LiouvilleIntegral {
        integral: integral.value(),
        excluded_weight: excluded.value(),
        max_t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SantaloReport {
    pub integral: f64,
    /// `2π·(πa² − Σ areas)`.
    pub phase_volume: f64,
    /// `phase_volume − integral`; estimates the trapped volume.
    pub defect: f64,
    pub excluded_weight: f64,
    pub max_t: f64,
    pub grid: (usize, usize),
}

impl SantaloReport {
    pub fn relative_defect(&self) -> f64 {
        self.defect.abs() / self.phase_volume
    }

    /// Bound on how much the cap-excluded nodes could have contributed.
    pub fn excluded_bound(&self) -> f64 {
        self.excluded_weight * self.max_t
    }
}

pub fn phase_volume(scene: &Scene) -> f64 {
    TAU * scene.free_area()
}

pub fn santalo_defect(
    scene: &Scene,
    n_psi: usize,
    n_phi: usize,
    opts: &TraceOptions,
) -> Result<SantaloReport, BilliardError> {
    let li = liouville_integral(scene, n_psi, n_phi, opts)?;
    let volume = phase_volume(scene);
    Ok(SantaloReport {
        integral: li.integral,
        phase_volume: volume,
        defect: volume - li.integral,
        excluded_weight: li.excluded_weight,
        max_t: li.max_t,
        grid: (n_psi, n_phi),
    })
}

/// Draws `(psi, phi)` distributed as the normalized Liouville measure:
/// psi uniform, phi with density `cos(phi)/2` via its inverse CDF.
pub fn sample_liouville(rng: &mut impl Rng) -> (f64, f64) {
    let psi = rng.gen_range(0.0..TAU);
    let u: f64 = rng.gen_range(-1.0..1.0);
    let phi = u.asin().clamp(-FRAC_PI_2, FRAC_PI_2);
    (psi, phi)
}

/// Share of μ-distributed samples whose trajectories need more than each
/// cutoff's number of reflections. Runs that hit the time cap count as
/// tripping every cutoff.
pub fn trapped_fraction(
    scene: &Scene,
    n_samples: usize,
    seed: u64,
    reflection_cutoffs: &[usize],
    opts: &TraceOptions,
) -> Result<Vec<(usize, f64)>, SantaloError> {
    if reflection_cutoffs.is_empty() || reflection_cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SantaloError::BadCutoffs);
    }
    let max_cut = *reflection_cutoffs.last().expect("non-empty");
    let opts = opts.with_max_reflections(max_cut);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(f64, f64)> = (0..n_samples).map(|_| sample_liouville(&mut rng)).collect();
    let a = scene.ball_radius();

    // reflections needed, saturating at max_cut + 1 for a cap trip
    let needed: Vec<usize> = samples
        .par_iter()
        .map(|&(psi, phi)| {
            let tr = trace(scene, boundary_phase_point(a, psi, phi), &opts)?;
            Ok(match tr.status {
                TrajectoryStatus::Exited { .. } => tr.reflection_count(),
                TrajectoryStatus::CutoffReflections(_) | TrajectoryStatus::CutoffTime(_) => {
                    max_cut + 1
                }
            })
        })
        .collect::<Result<_, BilliardError>>()?;

    Ok(reflection_cutoffs
        .iter()
        .map(|&cut| {
            let tripped = needed.iter().filter(|&&n| n > cut).count();
            let fraction = if n_samples == 0 {
                0.0
            } else {
                tripped as f64 / n_samples as f64
            };
            (cut, fraction)
        })
        .collect())
}
