//! The phi test: does a sampled map send tetrads of anharmonic ratio alpha
//! to tetrads of the same ratio?
//!
//! Tetrads are generated sequentially from a seeded stream (so results are
//! reproducible regardless of thread count) and evaluated in parallel. A
//! tetrad contributes a violation when the image ratio differs from its
//! reference by more than `tol` in chordal distance; the reported witness is
//! always the lowest-index violating tetrad.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{map_slice, ExecMode};
use crate::sphere::{chordal_distance, SpherePoint};
use crate::tetrad::{require_admissible_alpha, solve_fourth_point, Tetrad};

use super::rng::{self, role};
use super::sampled_map::SampledMap;

/// Attempt budget per requested tetrad before giving up on generation.
const ATTEMPTS_PER_TETRAD: usize = 400;

/// Parameters of a phi test (and of the classifier built on it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiTestConfig {
    /// The anharmonic ratio all generated tetrads share. Must be a finite
    /// value other than 0 and 1.
    #[serde(with = "crate::json::complex_pair")]
    pub alpha: Complex64,
    /// Number of tetrads to test.
    pub n_tetrads: usize,
    /// Chordal tolerance on the image ratio.
    pub tol: f64,
    /// Seed for the deterministic generation stream.
    pub seed: u64,
}

impl PhiTestConfig {
    /// Validated constructor.
    pub fn new(alpha: Complex64, n_tetrads: usize, tol: f64, seed: u64) -> Result<Self> {
        let cfg = PhiTestConfig {
            alpha,
            n_tetrads,
            tol,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        require_admissible_alpha(self.alpha)?;
        if self.n_tetrads == 0 {
            return Err(Error::InvalidConfig("n_tetrads must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        Ok(())
    }
}

/// A tetrad on which the map failed to preserve the ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiWitness {
    /// Index of the tetrad in the generated sequence (0-based).
    pub index: usize,
    /// The input tetrad.
    pub tetrad: Tetrad,
    /// Its image under the map.
    pub image: Tetrad,
    /// Anharmonic ratio of the image tetrad.
    pub achieved: SpherePoint,
    /// Ratio the image was expected to match: alpha for analytic maps, the
    /// input tetrad's own ratio for pair data (whose fourth points are
    /// matched within a tolerance rather than solved exactly).
    pub reference: SpherePoint,
    /// Chordal distance between achieved and reference.
    pub gap: f64,
}

/// Outcome of a phi test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiReport {
    /// No tested tetrad violated the tolerance. (Vacuously true when every
    /// tetrad was skipped; see `skipped`.)
    pub pass: bool,
    /// The ratio under test.
    #[serde(with = "crate::json::complex_pair")]
    pub alpha: Complex64,
    /// Tetrads whose image ratio was actually checked.
    pub tetrads_tested: usize,
    /// Tetrads dropped because the map was undefined on a vertex or the
    /// image had three or more coincident points (no ratio to compare).
    pub skipped: usize,
    /// Number of violations among the tested tetrads.
    pub violations: usize,
    /// Largest observed gap (0 when nothing was tested).
    pub worst_gap: f64,
    /// Lowest-index violation, when any.
    pub witness: Option<PhiWitness>,
}

struct GeneratedTetrad {
    tetrad: Tetrad,
    reference: SpherePoint,
}

enum Outcome {
    Tested {
        gap: f64,
        achieved: SpherePoint,
        image: Tetrad,
    },
    Skipped,
}

/// Runs the phi test with the default execution mode (parallel when built
/// with the `parallel` feature).
pub fn phi_test(f: &SampledMap, cfg: &PhiTestConfig) -> Result<PhiReport> {
    phi_test_with_mode(f, cfg, ExecMode::default())
}

/// Runs the phi test with an explicit execution mode. Both modes produce
/// identical reports.
pub fn phi_test_with_mode(
    f: &SampledMap,
    cfg: &PhiTestConfig,
    mode: ExecMode,
) -> Result<PhiReport> {
    cfg.validate()?;
    let generated = generate_tetrads(f, cfg)?;
    let tol = cfg.tol;
    let outcomes = map_slice(mode, &generated, |g| evaluate_one(f, g));

    let mut tested = 0usize;
    let mut skipped = 0usize;
    let mut violations = 0usize;
    let mut worst_gap = 0.0f64;
    let mut witness: Option<PhiWitness> = None;
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Outcome::Skipped => skipped += 1,
            Outcome::Tested {
                gap,
                achieved,
                image,
            } => {
                tested += 1;
                worst_gap = worst_gap.max(*gap);
                if *gap > tol {
                    violations += 1;
                    if witness.is_none() {
                        witness = Some(PhiWitness {
                            index: i,
                            tetrad: generated[i].tetrad,
                            image: *image,
                            achieved: *achieved,
                            reference: generated[i].reference,
                            gap: *gap,
                        });
                    }
                }
            }
        }
    }
    Ok(PhiReport {
        pass: violations == 0,
        alpha: cfg.alpha,
        tetrads_tested: tested,
        skipped,
        violations,
        worst_gap,
        witness,
    })
}

fn evaluate_one(f: &SampledMap, g: &GeneratedTetrad) -> Outcome {
    let mut images = [SpherePoint::Infinity; 4];
    for (slot, &p) in g.tetrad.points().iter().enumerate() {
        match f.eval(p) {
            Some(v) => images[slot] = v,
            None => return Outcome::Skipped,
        }
    }
    let image = match Tetrad::new(images) {
        Ok(t) => t,
        Err(_) => return Outcome::Skipped,
    };
    let achieved = image.cross_ratio().value();
    let gap = chordal_distance(achieved, g.reference);
    Outcome::Tested {
        gap,
        achieved,
        image,
    }
}

/// Sequential, seeded tetrad generation. For analytic maps three base points
/// are drawn uniformly from the region and the fourth is solved exactly; for
/// pair data the base points are drawn from the stored inputs and the solved
/// fourth point must match a stored input within `tol / 10`.
fn generate_tetrads(f: &SampledMap, cfg: &PhiTestConfig) -> Result<Vec<GeneratedTetrad>> {
    let mut rng = rng::stream(cfg.seed, role::PHI_TETRADS);
    let region = f.region();
    let min_sep = region.radius / 100.0;
    let mut out: Vec<GeneratedTetrad> = Vec::with_capacity(cfg.n_tetrads);
    let mut attempts = cfg
        .n_tetrads
        .saturating_mul(ATTEMPTS_PER_TETRAD)
        .max(1000);

    if f.is_pairs() {
        let inputs: Vec<SpherePoint> = f.pairs().iter().map(|&(x, _)| x).collect();
        let match_tol = cfg.tol / 10.0;
        while out.len() < cfg.n_tetrads && attempts > 0 {
            attempts -= 1;
            let Some(candidate) =
                pairs_candidate(&mut rng, &inputs, cfg.alpha, min_sep, match_tol)
            else {
                continue;
            };
            out.push(candidate);
        }
    } else {
        while out.len() < cfg.n_tetrads && attempts > 0 {
            attempts -= 1;
            let z1 = SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region));
            let z2 = SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region));
            let z3 = SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region));
            if chordal_distance(z1, z2) < min_sep
                || chordal_distance(z1, z3) < min_sep
                || chordal_distance(z2, z3) < min_sep
            {
                continue;
            }
            let Ok(z4) = solve_fourth_point(z1, z2, z3, cfg.alpha) else {
                continue;
            };
            if !region.contains(z4) {
                continue;
            }
            let Ok(tetrad) = Tetrad::new([z1, z2, z3, z4]) else {
                continue;
            };
            out.push(GeneratedTetrad {
                tetrad,
                reference: SpherePoint::Finite(cfg.alpha),
            });
        }
    }

    if out.len() * 2 < cfg.n_tetrads {
        return Err(Error::InsufficientSamples {
            needed: cfg.n_tetrads.div_ceil(2),
            got: out.len(),
        });
    }
    Ok(out)
}

fn pairs_candidate(
    rng: &mut rand_chacha::ChaCha8Rng,
    inputs: &[SpherePoint],
    alpha: Complex64,
    min_sep: f64,
    match_tol: f64,
) -> Option<GeneratedTetrad> {
    use rand::Rng;
    let n = inputs.len();
    let i1 = rng.random_range(0..n);
    let i2 = rng.random_range(0..n);
    let i3 = rng.random_range(0..n);
    if i1 == i2 || i1 == i3 || i2 == i3 {
        return None;
    }
    let (z1, z2, z3) = (inputs[i1], inputs[i2], inputs[i3]);
    if chordal_distance(z1, z2) < min_sep
        || chordal_distance(z1, z3) < min_sep
        || chordal_distance(z2, z3) < min_sep
    {
        return None;
    }
    let z4 = solve_fourth_point(z1, z2, z3, alpha).ok()?;
    let (i4, matched) = inputs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != i1 && i != i2 && i != i3)
        .map(|(i, &p)| (i, p))
        .min_by(|a, b| {
            chordal_distance(a.1, z4)
                .total_cmp(&chordal_distance(b.1, z4))
        })?;
    if chordal_distance(matched, z4) > match_tol || i4 == i1 || i4 == i2 || i4 == i3 {
        return None;
    }
    let tetrad = Tetrad::new([z1, z2, z3, matched]).ok()?;
    let reference = tetrad.cross_ratio();
    if reference.is_singular() {
        return None;
    }
    Some(GeneratedTetrad {
        tetrad,
        reference: reference.value(),
    })
}
