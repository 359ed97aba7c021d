//! Circle covariance check: Möbius maps send generalized circles to
//! generalized circles, so the image of a circle-load of sample points must
//! fit one circle to high accuracy. A map can also pass trivially by
//! crushing its whole image onto a single circle (or point); that situation
//! is detected and flagged rather than counted as evidence.

use serde::Serialize;

use crate::circles::{circle_through, fit_circle};
use crate::error::{Error, Result};
use crate::sphere::{chordal_distance, SpherePoint};

use super::rng::{self, role};
use super::sampled_map::SampledMap;

/// Attempts allowed per constructed circle.
const ATTEMPTS_PER_CIRCLE: usize = 200;

/// Attempt multiplier for on-circle, in-region sampling.
const ATTEMPTS_PER_SAMPLE: usize = 40;

/// Outcome of the circle covariance test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleReport {
    /// Every tested circle's image fit a single generalized circle.
    pub pass: bool,
    /// The full image (all circles pooled) also fit one circle, so the
    /// pass carries no information about covariance; the map may be
    /// constant or may collapse the region onto a curve.
    pub degenerate: bool,
    /// Circles actually tested.
    pub circles_tested: usize,
    /// Worst per-circle fit residual.
    pub max_fit_residual: f64,
    /// Residual of the single-circle fit to the pooled image.
    pub full_image_residual: f64,
}

/// Tests whether `f` maps circles to circles: `n_circles` random circles
/// through well-separated region points are sampled at `samples_per_circle`
/// in-region points, imaged, and fit. Pair-listed maps cannot be evaluated
/// at chosen circle points and are rejected with `InsufficientSamples`.
pub fn circle_test(
    f: &SampledMap,
    n_circles: usize,
    samples_per_circle: usize,
    tol: f64,
    seed: u64,
) -> Result<CircleReport> {
    if n_circles == 0 || samples_per_circle < 4 {
        return Err(Error::InvalidConfig(
            "need at least one circle and four samples per circle",
        ));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }
    if f.is_pairs() {
        return Err(Error::InsufficientSamples {
            needed: samples_per_circle,
            got: 0,
        });
    }

    let region = f.region();
    let min_sep = region.radius / 100.0;
    let mut rng = rng::stream(seed, role::CIRCLES);

    let mut circles_tested = 0usize;
    let mut max_fit_residual = 0.0f64;
    let mut pooled_images: Vec<SpherePoint> = Vec::new();
    let mut attempts = n_circles.saturating_mul(ATTEMPTS_PER_CIRCLE);

    while circles_tested < n_circles && attempts > 0 {
        attempts -= 1;
        let p1 = SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region));
        let p2 = SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region));
        let p3 = SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region));
        if chordal_distance(p1, p2) < min_sep
            || chordal_distance(p1, p3) < min_sep
            || chordal_distance(p2, p3) < min_sep
        {
            continue;
        }
        let Ok(circle) = circle_through(p1, p2, p3) else {
            continue;
        };
        let Some(center) = circle.center() else {
            // three collinear draws: retry rather than walk a line
            continue;
        };
        let radius = circle.radius().expect("ordinary circle has a radius");

        // anchors are on the circle and in the region by construction
        let mut points = vec![p1, p2, p3];
        let mut sample_attempts = samples_per_circle.saturating_mul(ATTEMPTS_PER_SAMPLE);
        while points.len() < samples_per_circle && sample_attempts > 0 {
            sample_attempts -= 1;
            use rand::Rng;
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            let p = SpherePoint::from_complex(
                center + num_complex::Complex64::from_polar(radius, theta),
            );
            if region.contains(p) {
                points.push(p);
            }
        }
        if points.len() < 4 {
            continue;
        }

        let images: Vec<SpherePoint> = points.iter().filter_map(|&p| f.eval(p)).collect();
        let (_, residual) = fit_circle(&images)?;
        circles_tested += 1;
        max_fit_residual = max_fit_residual.max(residual);
        pooled_images.extend_from_slice(&images);
    }

    if circles_tested < n_circles {
        return Err(Error::InsufficientSamples {
            needed: n_circles,
            got: circles_tested,
        });
    }

    let (_, full_image_residual) = fit_circle(&pooled_images)?;
    Ok(CircleReport {
        pass: max_fit_residual <= tol,
        degenerate: full_image_residual <= tol,
        circles_tested,
        max_fit_residual,
        full_image_residual,
    })
}
