//! Geometry of the Riemann sphere organized around the anharmonic
//! (cross-)ratio: tetrads and their ratios in full degenerate generality, the
//! Möbius group with its orientation-reversing coset, Apollonian tetrads,
//! generalized circles with least-squares fitting, and a classifier that
//! decides whether a sampled map preserving one ratio value is constant,
//! Möbius, or neither.

pub mod circles;
mod error;
pub mod json;
pub mod moebius;
mod par;
pub mod sphere;
pub mod tetrad;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use par::ExecMode;

pub mod classifier;

pub use circles::{circle_through, fit_circle, GeneralizedCircle};
pub use classifier::{
    circle_test, classify, classify_with_mode, injectivity_probe, midpoint_test, non_moebius_zoo,
    phi_test, phi_test_with_mode, CircleReport, ClassificationReport, DiskRegion, MidpointReport,
    MidpointSequence, PhiReport, PhiTestConfig, PhiWitness, ProbeOutcome, SampledMap, Verdict,
};
pub use moebius::MoebiusMap;
pub use sphere::{chordal_distance, SpherePoint, DEFAULT_TOL};
pub use tetrad::{
    apollonian_ratios, orbit, solve_fourth_point, AnharmonicRatio, Tetrad, Transposition,
};
