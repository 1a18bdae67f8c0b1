//! Numerical laboratory for 2D conductive Helmholtz scattering at polygonal
//! corners.
//!
//! The library has three tiers:
//!
//! * low-level machinery: plane geometry ([`geometry`]), cylinder Bessel /
//!   Gamma functions and Fourier–Bessel fields ([`specfun`]),
//! * the corner analysis itself: complex-geometrical-optics probes and their
//!   moment integrals ([`cgo`]), and the recursive determinant systems that
//!   force Fourier–Bessel coefficients to vanish at an irrational corner
//!   ([`ucp`]),
//! * forward solvers and experiments: a separation-of-variables oracle for
//!   concentric disks ([`disk`]), a finite-element solver for polygonal
//!   scatterers with conductive interfaces ([`fem`]), and desk-scale
//!   invisibility / uniqueness experiments ([`experiments`]).
//!
//! File formats and the CLI surface are described in the `book/` guide; the
//! scatterer description schema lives in [`config`].

pub mod cgo;
pub mod config;
pub mod disk;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod report;
pub mod scatterer;
pub mod specfun;
pub mod ucp;

pub use geometry::{AngleClass, CellScatterer, ConvexPolygon, LinearIndex, NestScatterer, Sector, Vec2};
pub use scatterer::{FarFieldPattern, Incident, Scatterer};

// Book chapters double as doc-tests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/cgo-probes.md")]
    mod cgo_probes {}
    #[doc = include_str!("../../../book/src/corner-systems.md")]
    mod corner_systems {}
    #[doc = include_str!("../../../book/src/disk-oracle.md")]
    mod disk_oracle {}
    #[doc = include_str!("../../../book/src/fem-solver.md")]
    mod fem_solver {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
