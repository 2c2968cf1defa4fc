//! Grid comparison of travelling-time spectra.
//!
//! Two scenes whose travelling times agree almost everywhere have the same
//! obstacles, so any robust disagreement on a grid separates them. The
//! converse verdict, [`Verdict::IndistinguishableAtGrid`], only says that
//! no disagreement above the tolerance was seen at the tested resolution.

use thiserror::Error;

use crate::billiard::{BilliardError, TraceOptions};
use crate::geometry::Scene;
use crate::spectra::{travelling_time_spectrum, SpectrumRecord, SpectrumStatus};

pub const DEFAULT_COMPARE_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error("spectra are sampled on different grids ({0} vs {1} records)")]
    GridMismatch(usize, usize),
    #[error("spectra differ at node {0}: ({1}, {2}) vs ({3}, {4})")]
    NodeMismatch(usize, f64, f64, f64, f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// The largest disagreement: `(psi, phi, t_a, t_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub psi: f64,
    pub phi: f64,
    pub t_a: f64,
    pub t_b: f64,
}

/// A node where the two scenes disagree on whether the time is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatusMismatch {
    pub psi: f64,
    pub phi: f64,
    pub status_a: SpectrumStatus,
    pub status_b: SpectrumStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisagreementReport {
    pub grid: (usize, usize),
    /// Nodes finite in both spectra.
    pub compared: usize,
    pub disagree_fraction: f64,
    pub max_abs_delta: f64,
    pub witness: Option<Witness>,
    pub status_mismatches: Vec<StatusMismatch>,
}

impl DisagreementReport {
    pub fn is_different(&self) -> bool {
        self.disagree_fraction > 0.0 || !self.status_mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    IndistinguishableAtGrid(DisagreementReport),
    Different(DisagreementReport),
}

impl Verdict {
    pub fn report(&self) -> &DisagreementReport {
        match self {
            Verdict::IndistinguishableAtGrid(r) | Verdict::Different(r) => r,
        }
    }

    pub fn is_different(&self) -> bool {
        matches!(self, Verdict::Different(_))
    }
}

/// Node-wise comparison of two spectra sampled on the same grid.
pub fn compare_spectra(
    rec_a: &[SpectrumRecord],
    rec_b: &[SpectrumRecord],
    grid: (usize, usize),
    tol: f64,
) -> Result<DisagreementReport, CompareError> {
    if !(tol > 0.0) {
        return Err(CompareError::BadTolerance(tol));
    }
    if rec_a.len() != rec_b.len() || rec_a.len() != grid.0 * grid.1 {
        return Err(CompareError::GridMismatch(rec_a.len(), rec_b.len()));
    }
    let mut compared = 0usize;
    let mut disagree = 0usize;
    let mut max_abs_delta: f64 = 0.0;
    let mut witness = None;
    let mut status_mismatches = Vec::new();
    for (k, (a, b)) in rec_a.iter().zip(rec_b).enumerate() {
        if a.psi != b.psi || a.phi != b.phi {
            return Err(CompareError::NodeMismatch(k, a.psi, a.phi, b.psi, b.phi));
        }
        match (a.status, b.status) {
            (SpectrumStatus::Finite, SpectrumStatus::Finite) => {
                compared += 1;
                let delta = (a.t - b.t).abs();
                if delta > tol {
                    disagree += 1;
                }
                if delta > max_abs_delta {
                    max_abs_delta = delta;
                    witness = Some(Witness {
                        psi: a.psi,
                        phi: a.phi,
                        t_a: a.t,
                        t_b: b.t,
                    });
                }
            }
            (sa, sb) if sa != sb => status_mismatches.push(StatusMismatch {
                psi: a.psi,
                phi: a.phi,
                status_a: sa,
                status_b: sb,
            }),
            _ => {}
        }
    }
    let disagree_fraction = if compared == 0 {
        0.0
    } else {
        disagree as f64 / compared as f64
    };
    if disagree == 0 {
        witness = None;
    }
    Ok(DisagreementReport {
        grid,
        compared,
        disagree_fraction,
        max_abs_delta,
        witness,
        status_mismatches,
    })
}

/// Samples both spectra on the same grid and compares them.
pub fn distinguish(
    scene_a: &Scene,
    scene_b: &Scene,
    n_psi: usize,
    n_phi: usize,
    opts: &TraceOptions,
    tol: f64,
) -> Result<Verdict, CompareError> {
    let (ra, rb) = rayon::join(
        || travelling_time_spectrum(scene_a, n_psi, n_phi, opts),
        || travelling_time_spectrum(scene_b, n_psi, n_phi, opts),
    );
    let report = compare_spectra(&ra?, &rb?, (n_psi, n_phi), tol)?;
    Ok(if report.is_different() {
        Verdict::Different(report)
    } else {
        Verdict::IndistinguishableAtGrid(report)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipse, Vec2};
    use crate::spectra::{phi_node, psi_node};

    fn disc(c: Vec2, r: f64) -> Scene {
        Scene::new(3.0, vec![Ellipse::circle(c, r).unwrap()]).unwrap()
    }

    fn two_discs() -> Scene {
        Scene::new(
            5.0,
            vec![
                Ellipse::circle(Vec2::new(-2.0, 0.0), 1.0).unwrap(),
                Ellipse::circle(Vec2::new(2.0, 0.0), 1.0).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identical_scenes_are_indistinguishable() {
        let s = two_discs();
        let v = distinguish(&s, &s, 40, 40, &TraceOptions::default(), DEFAULT_COMPARE_TOL).unwrap();
        assert!(!v.is_different());
        assert_eq!(v.report().disagree_fraction, 0.0);
        assert!(v.report().witness.is_none());
    }

    #[test]
    fn rotated_circle_representation_is_invisible() {
        let a = disc(Vec2::ZERO, 1.0);
        let b = Scene::new(3.0, vec![Ellipse::new(Vec2::ZERO, 1.0, 1.0, 0.3).unwrap()]).unwrap();
        let v = distinguish(&a, &b, 60, 60, &TraceOptions::default(), DEFAULT_COMPARE_TOL).unwrap();
        assert!(!v.is_different(), "{:?}", v.report());
    }

    #[test]
    fn radius_change_is_detected() {
        let a = disc(Vec2::ZERO, 1.0);
        let b = disc(Vec2::ZERO, 1.05);
        let v = distinguish(&a, &b, 50, 50, &TraceOptions::default(), DEFAULT_COMPARE_TOL).unwrap();
        let r = v.report();
        assert!(v.is_different());
        // node nearest the radial ray: t = 2(a − r) per scene, so Δt ≈ 2Δr
        let w = r.witness.unwrap();
        assert!(r.max_abs_delta >= 0.1 - 1e-9, "{r:?}");
        assert!((w.t_a - w.t_b).abs() == r.max_abs_delta);
        assert!(r.status_mismatches.is_empty());
    }

    #[test]
    fn comparison_is_symmetric() {
        let a = disc(Vec2::ZERO, 1.0);
        let b = disc(Vec2::new(0.2, 0.0), 1.0);
        let opts = TraceOptions::default();
        let ab = distinguish(&a, &b, 40, 40, &opts, 1e-7).unwrap();
        let ba = distinguish(&b, &a, 40, 40, &opts, 1e-7).unwrap();
        assert!(ab.is_different());
        assert_eq!(ab.report().disagree_fraction, ba.report().disagree_fraction);
        assert_eq!(ab.report().max_abs_delta, ba.report().max_abs_delta);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let s = disc(Vec2::ZERO, 1.0);
        let opts = TraceOptions::default();
        let a = travelling_time_spectrum(&s, 10, 10, &opts).unwrap();
        let b = travelling_time_spectrum(&s, 10, 12, &opts).unwrap();
        assert!(matches!(
            compare_spectra(&a, &b, (10, 10), 1e-7),
            Err(CompareError::GridMismatch(100, 120))
        ));
        let c = travelling_time_spectrum(&s, 20, 5, &opts).unwrap();
        assert!(matches!(
            compare_spectra(&a, &c, (10, 10), 1e-7),
            Err(CompareError::NodeMismatch(..))
        ));
        assert!(matches!(compare_spectra(&a, &a, (10, 10), 0.0), Err(CompareError::BadTolerance(_))));
    }

    #[test]
    fn status_mismatches_are_listed_separately() {
        let s = disc(Vec2::ZERO, 1.0);
        let opts = TraceOptions::default();
        let a = travelling_time_spectrum(&s, 4, 4, &opts).unwrap();
        let mut b = a.clone();
        b[5].status = SpectrumStatus::Cutoff;
        b[5].t = f64::INFINITY;
        let r = compare_spectra(&a, &b, (4, 4), 1e-7).unwrap();
        assert_eq!(r.compared, 15);
        assert_eq!(r.disagree_fraction, 0.0);
        assert_eq!(r.status_mismatches.len(), 1);
        assert_eq!(r.status_mismatches[0].psi, psi_node(1, 4));
        assert_eq!(r.status_mismatches[0].phi, phi_node(1, 4));
        assert!(r.is_different());
    }

    #[test]
    fn detection_survives_refinement() {
        let opts = TraceOptions::default();
        let a = disc(Vec2::ZERO, 1.0);
        for b in [disc(Vec2::ZERO, 1.05), disc(Vec2::new(0.1, 0.0), 1.0)] {
            for n in [20, 40, 80] {
                let v = distinguish(&a, &b, n, n, &opts, DEFAULT_COMPARE_TOL).unwrap();
                assert!(v.is_different(), "n = {n}");
            }
        }
    }
}
