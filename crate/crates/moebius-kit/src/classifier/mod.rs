//! Decides what a sampled self-map of the sphere is, given that it is
//! supposed to preserve one anharmonic-ratio value `alpha` outside `{0, 1}`:
//! constant, a Möbius transformation (the only non-constant continuous
//! possibility), or a demonstrated non-preserver, with an inconclusive
//! verdict when the evidence disagrees with itself.
//!
//! Pipeline: an injectivity probe first separates constants and records
//! collisions; the phi test then hunts for ratio violations at `alpha` and
//! at a second value from its permutation orbit; the midpoint and circle
//! stages corroborate geometrically (for maps that can be evaluated at
//! chosen points); finally an explicit Möbius transformation is fitted from
//! three well-separated samples and validated against all of them. Every
//! stage draws from its own seed-derived stream, so verdicts are
//! reproducible bit-for-bit for a given seed, in both execution modes.

mod circle_check;
mod midpoint;
mod phi;
mod rng;
mod sampled_map;

pub use circle_check::{circle_test, CircleReport};
pub use midpoint::{midpoint_test, MidpointReport, MidpointSequence};
pub use phi::{phi_test, phi_test_with_mode, PhiReport, PhiTestConfig, PhiWitness};
pub use sampled_map::{DiskRegion, SampledMap};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::par::ExecMode;
use crate::sphere::{chordal_distance, SpherePoint};
use crate::tetrad::orbit;

use rng::{mix, role};

/// Samples drawn by the injectivity probe on analytic maps.
const PROBE_SAMPLES: usize = 32;

/// Samples drawn for the Möbius fit on analytic maps.
const FIT_SAMPLES: usize = 40;

/// Probes used by the midpoint stage inside `classify`.
const MIDPOINT_PROBES: usize = 40;

/// Circles and per-circle samples used by the circle stage inside `classify`.
const CLASSIFY_CIRCLES: usize = 12;
const CLASSIFY_CIRCLE_SAMPLES: usize = 12;

/// What the classifier concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The sampled outputs are all one point.
    Constant,
    /// A Möbius transformation reproduces every sample within tolerance.
    Moebius,
    /// A concrete tetrad witnesses that the ratio is not preserved.
    PhiViolating,
    /// The stages disagree; no classification is claimed.
    Inconclusive,
}

/// Result of the cheap injectivity probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOutcome {
    /// No two sampled outputs coincide.
    InjectiveLike,
    /// All sampled outputs coincide.
    ConstantLike,
    /// Distinct inputs produced coinciding outputs.
    Collision,
}

/// The accepted Möbius fit, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSummary {
    /// Whether the accepted map conjugates first (orientation-reversing).
    pub conjugating: bool,
    /// Worst chordal deviation of the fit over all samples.
    pub residual: f64,
}

/// Per-stage evidence retained in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSummaries {
    pub injectivity: ProbeOutcome,
    pub phi: Option<PhiReport>,
    pub phi_corroboration: Option<PhiReport>,
    pub midpoint: Option<MidpointReport>,
    pub circle: Option<CircleReport>,
    pub fit: Option<FitSummary>,
}

/// Full, deterministic account of a classification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    #[serde(with = "crate::json::complex_pair")]
    pub alpha: Complex64,
    pub tol: f64,
    pub n_tetrads: usize,
    pub seed: u64,
    /// The fitted transformation when the verdict is `moebius`.
    pub fitted_map: Option<MoebiusMap>,
    /// Worst sample deviation of the fitted transformation.
    pub max_residual: Option<f64>,
    /// Violating tetrad when the verdict is `phi_violating`.
    pub witness: Option<PhiWitness>,
    pub checks: StageSummaries,
    /// Human-readable notes on anything unusual.
    pub diagnostics: Vec<String>,
}

/// Samples the map and reports whether it looks injective, constant, or
/// neither. Outputs closer than `tol` (chordal) count as coincident; inputs
/// further apart than `10 * tol` with coincident outputs count as a
/// collision.
pub fn injectivity_probe(f: &SampledMap, tol: f64, seed: u64) -> Result<ProbeOutcome> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }
    let inputs = f.sample_inputs(PROBE_SAMPLES, mix(seed, role::PROBE));
    let samples: Vec<(SpherePoint, SpherePoint)> = inputs
        .iter()
        .filter_map(|&x| f.eval(x).map(|y| (x, y)))
        .collect();
    if samples.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut all_coincide = true;
    let mut collision = false;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let out_gap = chordal_distance(samples[i].1, samples[j].1);
            if out_gap > tol {
                all_coincide = false;
            } else if chordal_distance(samples[i].0, samples[j].0) > 10.0 * tol {
                collision = true;
            }
        }
    }
    Ok(if all_coincide {
        ProbeOutcome::ConstantLike
    } else if collision {
        ProbeOutcome::Collision
    } else {
        ProbeOutcome::InjectiveLike
    })
}

/// Classifies with the default execution mode.
pub fn classify(f: &SampledMap, cfg: &PhiTestConfig) -> Result<ClassificationReport> {
    classify_with_mode(f, cfg, ExecMode::default())
}

/// Classifies `f` as constant, Möbius, phi-violating, or inconclusive.
/// Both execution modes produce identical reports for the same seed.
pub fn classify_with_mode(
    f: &SampledMap,
    cfg: &PhiTestConfig,
    mode: ExecMode,
) -> Result<ClassificationReport> {
    cfg.validate()?;
    let mut diagnostics: Vec<String> = Vec::new();
    let mut checks = StageSummaries {
        injectivity: ProbeOutcome::InjectiveLike,
        phi: None,
        phi_corroboration: None,
        midpoint: None,
        circle: None,
        fit: None,
    };
    let report = |verdict: Verdict,
                  checks: StageSummaries,
                  diagnostics: Vec<String>,
                  fitted: Option<(MoebiusMap, f64)>,
                  witness: Option<PhiWitness>| {
        let (fitted_map, max_residual) = match fitted {
            Some((m, r)) => (Some(m), Some(r)),
            None => (None, None),
        };
        ClassificationReport {
            verdict,
            alpha: cfg.alpha,
            tol: cfg.tol,
            n_tetrads: cfg.n_tetrads,
            seed: cfg.seed,
            fitted_map,
            max_residual,
            witness,
            checks,
            diagnostics,
        }
    };

    // Stage 1: constants never reach the ratio machinery.
    let probe = injectivity_probe(f, cfg.tol, cfg.seed)?;
    checks.injectivity = probe;
    if probe == ProbeOutcome::ConstantLike {
        return Ok(report(Verdict::Constant, checks, diagnostics, None, None));
    }

    // Stage 2: phi test at alpha.
    let phi_main = phi_test_with_mode(f, cfg, mode)?;
    let witness = phi_main.witness.clone();
    let failed = !phi_main.pass;
    checks.phi = Some(phi_main);
    if failed {
        return Ok(report(
            Verdict::PhiViolating,
            checks,
            diagnostics,
            None,
            witness,
        ));
    }

    // Stage 3: corroborate at a second value of the permutation orbit.
    let orbit_values = orbit(cfg.alpha)?;
    if let Some(&beta) = orbit_values
        .iter()
        .find(|&&b| chordal_distance(SpherePoint::Finite(b), SpherePoint::Finite(cfg.alpha)) > 1e-9)
    {
        let beta_cfg = PhiTestConfig {
            alpha: beta,
            ..*cfg
        };
        let phi_beta = phi_test_with_mode(f, &beta_cfg, mode)?;
        let witness = phi_beta.witness.clone();
        let failed = !phi_beta.pass;
        checks.phi_corroboration = Some(phi_beta);
        if failed {
            diagnostics.push(format!(
                "ratio violation surfaced at the orbit value {beta} rather than at alpha"
            ));
            return Ok(report(
                Verdict::PhiViolating,
                checks,
                diagnostics,
                None,
                witness,
            ));
        }
    }

    // Stage 4: geometric corroboration (needs freely evaluable maps).
    if f.is_pairs() {
        diagnostics.push(
            "pair data: midpoint and circle stages skipped (map cannot be evaluated at chosen points)"
                .to_string(),
        );
    } else {
        let mid = midpoint_test(f, cfg.alpha, MIDPOINT_PROBES, cfg.tol, cfg.seed)?;
        let mid_failed = !mid.pass;
        checks.midpoint = Some(mid);
        if mid_failed {
            diagnostics.push(
                "phi test passed but the midpoint/conservation laws failed".to_string(),
            );
            return Ok(report(
                Verdict::Inconclusive,
                checks,
                diagnostics,
                None,
                None,
            ));
        }
        let circ = circle_test(
            f,
            CLASSIFY_CIRCLES,
            CLASSIFY_CIRCLE_SAMPLES,
            cfg.tol,
            cfg.seed,
        )?;
        let circ_failed = !circ.pass;
        let circ_degenerate = circ.degenerate;
        checks.circle = Some(circ);
        if circ_failed {
            diagnostics.push("phi test passed but circle covariance failed".to_string());
            return Ok(report(
                Verdict::Inconclusive,
                checks,
                diagnostics,
                None,
                None,
            ));
        }
        if circ_degenerate {
            diagnostics.push(
                "image degenerates onto a single circle; covariance carries no evidence"
                    .to_string(),
            );
        }
    }

    // A collision alongside passing ratio tests means the sampling grid is
    // too coarse to trust either signal.
    if probe == ProbeOutcome::Collision {
        diagnostics.push(
            "distinct inputs collide in the image although the phi test passed".to_string(),
        );
        return Ok(report(
            Verdict::Inconclusive,
            checks,
            diagnostics,
            None,
            None,
        ));
    }

    // Stage 5: fit an explicit transformation and validate it everywhere.
    let inputs = f.sample_inputs(FIT_SAMPLES, mix(cfg.seed, role::FIT));
    let samples: Vec<(SpherePoint, SpherePoint)> = inputs
        .iter()
        .filter_map(|&x| f.eval(x).map(|y| (x, y)))
        .collect();
    let Some(basis) = fit_basis(&samples) else {
        diagnostics.push("no three well-separated samples with distinct images".to_string());
        return Ok(report(
            Verdict::Inconclusive,
            checks,
            diagnostics,
            None,
            None,
        ));
    };
    let sources = [samples[basis[0]].0, samples[basis[1]].0, samples[basis[2]].0];
    let targets = [samples[basis[0]].1, samples[basis[1]].1, samples[basis[2]].1];

    let mut accepted: Option<(MoebiusMap, f64)> = None;
    if let Ok(direct) = MoebiusMap::from_three_points(sources, targets) {
        let residual = fit_residual(&direct, &samples);
        checks.fit = Some(FitSummary {
            conjugating: false,
            residual,
        });
        if residual <= cfg.tol {
            accepted = Some((direct, residual));
        } else if cfg.alpha.im == 0.0 {
            // a real ratio value is preserved by orientation-reversing maps
            // too, so retry against the conjugated sources
            let conj_sources = [sources[0].conj(), sources[1].conj(), sources[2].conj()];
            if let Ok(core) = MoebiusMap::from_three_points(conj_sources, targets) {
                let [a, b, c, d] = core.matrix();
                if let Ok(reflected) = MoebiusMap::conjugating(a, b, c, d) {
                    let residual = fit_residual(&reflected, &samples);
                    if residual <= cfg.tol {
                        accepted = Some((reflected, residual));
                    }
                }
            }
        }
    }

    match accepted {
        Some((map, residual)) => {
            if map.is_conjugating() && cfg.alpha.im != 0.0 {
                // cannot happen when the phi gate works: a conjugating map
                // moves a non-real ratio to its conjugate
                diagnostics.push(
                    "orientation-reversing fit at a non-real ratio contradicts the phi test"
                        .to_string(),
                );
                checks.fit = Some(FitSummary {
                    conjugating: true,
                    residual,
                });
                return Ok(report(
                    Verdict::Inconclusive,
                    checks,
                    diagnostics,
                    None,
                    None,
                ));
            }
            checks.fit = Some(FitSummary {
                conjugating: map.is_conjugating(),
                residual,
            });
            Ok(report(
                Verdict::Moebius,
                checks,
                diagnostics,
                Some((map, residual)),
                None,
            ))
        }
        None => {
            diagnostics.push(
                "every indirect test passed but no Möbius transformation fits the samples"
                    .to_string(),
            );
            Ok(report(
                Verdict::Inconclusive,
                checks,
                diagnostics,
                None,
                None,
            ))
        }
    }
}

/// Greedily selects three well-separated sample indices whose inputs and
/// outputs are each pairwise distinct.
fn fit_basis(samples: &[(SpherePoint, SpherePoint)]) -> Option<[usize; 3]> {
    if samples.len() < 3 {
        return None;
    }
    // widest input pair
    let mut best = (0usize, 1usize);
    let mut best_gap = -1.0f64;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let gap = chordal_distance(samples[i].0, samples[j].0);
            if gap > best_gap {
                best_gap = gap;
                best = (i, j);
            }
        }
    }
    let (i1, i2) = best;
    if samples[i1].1 == samples[i2].1 || samples[i1].0 == samples[i2].0 {
        return None;
    }
    // remaining candidates by distance from the chosen pair, best first
    let mut rest: Vec<usize> = (0..samples.len()).filter(|&k| k != i1 && k != i2).collect();
    rest.sort_by(|&a, &b| {
        let da = chordal_distance(samples[a].0, samples[i1].0)
            .min(chordal_distance(samples[a].0, samples[i2].0));
        let db = chordal_distance(samples[b].0, samples[i1].0)
            .min(chordal_distance(samples[b].0, samples[i2].0));
        db.total_cmp(&da)
    });
    rest.into_iter()
        .find(|&k| {
            samples[k].0 != samples[i1].0
                && samples[k].0 != samples[i2].0
                && samples[k].1 != samples[i1].1
                && samples[k].1 != samples[i2].1
        })
        .map(|i3| [i1, i2, i3])
}

/// Worst chordal deviation of `m` over the samples.
fn fit_residual(m: &MoebiusMap, samples: &[(SpherePoint, SpherePoint)]) -> f64 {
    samples
        .iter()
        .map(|&(x, y)| chordal_distance(m.apply(x), y))
        .fold(0.0, f64::max)
}

/// A named non-Möbius specimen for fuzzing and demonstrations.
#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: &'static str,
    pub map: SampledMap,
}

/// Standard zoo of maps that preserve no anharmonic ratio, all sampled on
/// the disk of radius 1 around 3 (kept away from their critical points so
/// the violation is a property of the map, not of a singularity).
pub fn non_moebius_zoo() -> Vec<ZooEntry> {
    let region = DiskRegion::new(Complex64::new(3.0, 0.0), 1.0)
        .expect("static region is valid");
    let c = |re: f64| Complex64::new(re, 0.0);
    let zero = Complex64::ZERO;
    let one = c(1.0);
    let entries = vec![
        (
            "square",
            SampledMap::rational(vec![zero, zero, one], vec![one], region),
        ),
        (
            "cube",
            SampledMap::rational(vec![zero, zero, zero, one], vec![one], region),
        ),
        (
            "near_identity_quadratic",
            SampledMap::rational(vec![zero, one, c(0.01)], vec![one], region),
        ),
        (
            "conjugate_square",
            SampledMap::conjugated_rational(vec![zero, zero, one], vec![one], region),
        ),
        (
            "inverted_cubic",
            SampledMap::rational(vec![one, zero, zero, c(0.05)], vec![zero, one], region),
        ),
        (
            "sine_perturbed_identity",
            SampledMap::rational(vec![zero, one], vec![one], region)
                .map(|m| m.with_sin_perturbation(0.1).expect("finite amplitude")),
        ),
    ];
    entries
        .into_iter()
        .map(|(name, map)| ZooEntry {
            name,
            map: map.expect("static zoo specs are valid"),
        })
        .collect()
}
