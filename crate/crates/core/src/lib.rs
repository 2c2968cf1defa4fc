//! Exterior billiards among strictly convex elliptic obstacles inside a
//! ball: ray tracing, travelling-time and sojourn-time spectra, Santaló
//! quadrature, convex-front transport, and a grid distinguisher for pairs
//! of scenes.
//!
//! ```
//! use obstacle_scattering::billiard::TraceOptions;
//! use obstacle_scattering::geometry::{Ellipse, Scene, Vec2};
//! use obstacle_scattering::spectra::spectrum_record;
//!
//! let scene = Scene::new(3.0, vec![Ellipse::circle(Vec2::ZERO, 1.0).unwrap()]).unwrap();
//! // radial launch from (3, 0): in to the disc and straight back out
//! let r = spectrum_record(&scene, 0.0, 0.0, &TraceOptions::default()).unwrap();
//! assert!((r.t - 4.0).abs() < 1e-12);
//! assert_eq!(r.reflections, 1);
//! ```

// NaN must fail range checks, so they are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod billiard;
pub mod cli;
pub mod compare;
pub mod fronts;
pub mod geometry;
pub mod santalo;
pub mod spectra;

// Book chapters are compiled as doctests so their snippets keep running.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/billiard.md")]
    mod billiard {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/santalo.md")]
    mod santalo {}
    #[doc = include_str!("../../../book/src/fronts.md")]
    mod fronts {}
    #[doc = include_str!("../../../book/src/compare.md")]
    mod compare {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
