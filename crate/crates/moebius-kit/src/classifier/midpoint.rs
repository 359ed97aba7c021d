//! Midpoint characterization of Möbius-ness.
//!
//! A continuous map fixing infinity that sends every pair `{z0 + w, z0 - w}`
//! symmetric about `z0` to a pair symmetric about its image is affine. The
//! connection to anharmonic ratios: the tetrad `(z0+w, z0-w, z0, z0+cw)` has
//! ratio `beta` exactly when `c = 1/(1-2*beta)`, so a map preserving the
//! ratio `beta` transports the symmetric configuration to a `beta'`-scaled
//! one, with `beta'` the conjugate parameter `(1-beta)/(1-2*beta)`. The two
//! scale factors satisfy the product identity
//! `(1-2*beta)*(1-2*beta') = -1`, so one of the two geometric sequences
//! contracts whenever `|beta - 1/2| > 1/2`.
//!
//! On sampled maps this becomes two checks after conjugating the basepoint
//! and its image to infinity:
//!
//! * midpoint law: `g((a+b)/2)` is the midpoint of `g(a)` and `g(b)`;
//! * conservation law: `g(z0 + w_k) + g(z0 - w_k)` is constant along the
//!   contracting sequence `w_k = c^k w_0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::sphere::{chordal_distance, SpherePoint};
use crate::tetrad::require_admissible_alpha;

use super::rng::{self, role};
use super::sampled_map::SampledMap;

/// Depth of the conservation-law sequence.
const SEQUENCE_STEPS: usize = 20;

/// Attempts allowed per accepted probe.
const ATTEMPTS_PER_PROBE: usize = 200;

/// The geometric data of one symmetric midpoint configuration.
///
/// `w[k]` is the half-offset after `k` applications of the multiplier
/// `c = 1/(1 - 2*beta)`, and `pairs[k]` is the symmetric pair
/// `(z0 + w[k], z0 - w[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointSequence {
    /// The anharmonic ratio generating the sequence.
    pub beta: Complex64,
    /// Conjugate parameter `(1 - beta) / (1 - 2*beta)`.
    pub beta_prime: Complex64,
    /// Contraction ratio `|1 - 2*beta_prime| = 1 / |1 - 2*beta|`.
    pub q: f64,
    /// Half-offsets `w_0, c*w_0, ..., c^steps * w_0`.
    pub w: Vec<Complex64>,
    /// Symmetric pairs `(z0 + w_k, z0 - w_k)`.
    pub pairs: Vec<(Complex64, Complex64)>,
}

impl MidpointSequence {
    /// Builds the sequence seeded at `z0` with initial half-offset `w0`.
    /// `beta` must be an admissible ratio other than `1/2` (whose conjugate
    /// parameter is unbounded).
    pub fn new(beta: Complex64, z0: Complex64, w0: Complex64, steps: usize) -> Result<Self> {
        require_admissible_alpha(beta)?;
        let one = Complex64::new(1.0, 0.0);
        let denom = one - 2.0 * beta;
        if denom == Complex64::ZERO {
            return Err(Error::InvalidConfig(
                "beta = 1/2 has no conjugate midpoint parameter",
            ));
        }
        // the multiplier equals 2*beta_prime - 1; computing it as a single
        // reciprocal keeps q exact for exactly-representable beta
        let c = denom.finv();
        let beta_prime = (one - beta) / denom;
        let q = c.norm();
        let mut w = Vec::with_capacity(steps + 1);
        w.push(w0);
        for _ in 0..steps {
            let last = *w.last().expect("w starts nonempty");
            w.push(c * last);
        }
        let pairs = w.iter().map(|&wk| (z0 + wk, z0 - wk)).collect();
        Ok(MidpointSequence {
            beta,
            beta_prime,
            q,
            w,
            pairs,
        })
    }

    /// True when the half-offsets shrink geometrically (`q < 1`), which is
    /// equivalent to `|beta - 1/2| > 1/2`.
    pub fn is_contracting(&self) -> bool {
        self.q < 1.0
    }
}

/// Outcome of the midpoint / conservation test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MidpointReport {
    /// Both laws held within tolerance on every probe.
    pub pass: bool,
    /// Number of accepted probes.
    pub probes: usize,
    /// Contraction parameter used (alpha or its reciprocal).
    #[serde(with = "crate::json::complex_pair")]
    pub beta: Complex64,
    /// Contraction ratio of the sequence.
    pub contraction_ratio: f64,
    /// Worst midpoint-law gap observed.
    pub max_midpoint_gap: f64,
    /// Worst conservation-law gap observed; `None` when the parameter does
    /// not contract (then only the midpoint law is checked).
    pub max_conservation_gap: Option<f64>,
    /// Basepoint conjugated to infinity.
    pub basepoint: SpherePoint,
}

/// Midpoint of two sphere values, extended so that a configuration pushed to
/// infinity has midpoint infinity.
fn ext_midpoint(a: SpherePoint, b: SpherePoint) -> SpherePoint {
    match (a, b) {
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => {
            SpherePoint::from_complex((x + y) / 2.0)
        }
        _ => SpherePoint::Infinity,
    }
}

/// Extended sum for the conservation law; a pair straddling infinity sums to
/// infinity, and a doubly infinite pair has no usable sum (reported as the
/// worst possible gap by the caller).
fn ext_sum(a: SpherePoint, b: SpherePoint) -> Option<SpherePoint> {
    match (a, b) {
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => {
            Some(SpherePoint::from_complex(x + y))
        }
        (SpherePoint::Infinity, SpherePoint::Infinity) => None,
        _ => Some(SpherePoint::Infinity),
    }
}

struct Conjugated<'a> {
    f: &'a SampledMap,
    mu_inv: MoebiusMap,
    eta: MoebiusMap,
}

impl Conjugated<'_> {
    fn eval(&self, zeta: SpherePoint) -> Option<SpherePoint> {
        let x = self.mu_inv.apply(zeta);
        let y = self.f.eval(x)?;
        Some(self.eta.apply(y))
    }
}

/// Tests the midpoint law (and, for contracting parameters, the pair-sum
/// conservation law) of `f` after conjugating a basepoint and its image to
/// infinity.
///
/// `beta` is `alpha` when `|alpha| > 1` and `1/alpha` otherwise, so the
/// sequence always contracts apart from degenerate rounding at `|alpha| = 1`.
/// Pair-listed maps cannot be probed at the sequence points and are
/// rejected with `InsufficientSamples`.
pub fn midpoint_test(
    f: &SampledMap,
    alpha: Complex64,
    n_probes: usize,
    tol: f64,
    seed: u64,
) -> Result<MidpointReport> {
    require_admissible_alpha(alpha)?;
    if n_probes == 0 {
        return Err(Error::InvalidConfig("n_probes must be at least 1"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }

    let beta = if alpha.norm() > 1.0 {
        alpha
    } else {
        alpha.finv()
    };
    let region = f.region();
    let mut rng = rng::stream(seed, role::MIDPOINT);

    // basepoint: first region point where f is defined
    let mut candidates: Vec<SpherePoint> = vec![SpherePoint::Finite(region.center)];
    if f.is_pairs() {
        candidates = f
            .pairs()
            .iter()
            .map(|&(x, _)| x)
            .filter(|p| p.is_finite())
            .collect();
    } else {
        for _ in 0..16 {
            candidates.push(SpherePoint::Finite(rng::draw_in_disk(&mut rng, &region)));
        }
    }
    let (u, v) = candidates
        .iter()
        .find_map(|&p| f.eval(p).map(|val| (p, val)))
        .ok_or(Error::NormalizationFailure(
            "no region point with a defined value to conjugate to infinity",
        ))?;
    let u_c = u
        .as_finite()
        .expect("basepoint candidates are finite by construction");

    let one = Complex64::new(1.0, 0.0);
    let mu = MoebiusMap::new(Complex64::ZERO, one, one, -u_c)
        .map_err(|_| Error::NormalizationFailure("basepoint too extreme to conjugate"))?;
    let eta = match v {
        SpherePoint::Infinity => MoebiusMap::identity(),
        SpherePoint::Finite(v_c) => MoebiusMap::new(Complex64::ZERO, one, one, -v_c)
            .map_err(|_| Error::NormalizationFailure("image too extreme to conjugate"))?,
    };
    let g = Conjugated {
        f,
        mu_inv: mu.inverse(),
        eta,
    };

    // the contraction ratio depends only on beta, not on the probes
    let q = MidpointSequence::new(beta, Complex64::ZERO, Complex64::new(1.0, 0.0), 0)?.q;

    let mut probes = 0usize;
    let mut max_midpoint_gap = 0.0f64;
    let mut max_conservation_gap: Option<f64> = None;
    let mut attempts = n_probes.saturating_mul(ATTEMPTS_PER_PROBE);

    while probes < n_probes && attempts > 0 {
        attempts -= 1;
        let x0 = rng::draw_in_disk(&mut rng, &region);
        let xw = rng::draw_in_disk(&mut rng, &region);
        use rand::Rng;
        let scale: f64 = rng.random();
        let (SpherePoint::Finite(z0), SpherePoint::Finite(zw)) = (
            mu.apply(SpherePoint::Finite(x0)),
            mu.apply(SpherePoint::Finite(xw)),
        ) else {
            continue;
        };
        if !(z0.re.is_finite() && z0.im.is_finite() && zw.re.is_finite() && zw.im.is_finite()) {
            continue;
        }
        let w0 = (zw - z0) * scale;
        if w0 == Complex64::ZERO {
            continue;
        }
        let Ok(seq) = MidpointSequence::new(beta, z0, w0, SEQUENCE_STEPS) else {
            continue;
        };
        let check_sequence = seq.is_contracting();
        let depth = if check_sequence { SEQUENCE_STEPS } else { 0 };

        // every sequence point must come back inside the sampled region
        let in_region = seq.pairs[..=depth].iter().all(|&(a, b)| {
            region.contains(g.mu_inv.apply(SpherePoint::from_complex(a)))
                && region.contains(g.mu_inv.apply(SpherePoint::from_complex(b)))
        });
        if !in_region {
            continue;
        }

        let (a0, b0) = seq.pairs[0];
        let Some(g_mid) = g.eval(SpherePoint::Finite(z0)) else {
            continue;
        };
        let Some(ga0) = g.eval(SpherePoint::from_complex(a0)) else {
            continue;
        };
        let Some(gb0) = g.eval(SpherePoint::from_complex(b0)) else {
            continue;
        };
        let midpoint_gap = chordal_distance(g_mid, ext_midpoint(ga0, gb0));

        let mut conservation_gap: Option<f64> = None;
        if check_sequence {
            let mut reference: Option<SpherePoint> = None;
            let mut worst = 0.0f64;
            let mut defined = true;
            for &(a, b) in &seq.pairs[..=depth] {
                let (Some(ga), Some(gb)) = (
                    g.eval(SpherePoint::from_complex(a)),
                    g.eval(SpherePoint::from_complex(b)),
                ) else {
                    defined = false;
                    break;
                };
                let sum = ext_sum(ga, gb);
                match (sum, reference) {
                    (None, _) => worst = worst.max(2.0),
                    (Some(s), None) => reference = Some(s),
                    (Some(s), Some(r)) => worst = worst.max(chordal_distance(s, r)),
                }
            }
            if !defined {
                continue;
            }
            conservation_gap = Some(worst);
        }

        probes += 1;
        max_midpoint_gap = max_midpoint_gap.max(midpoint_gap);
        if let Some(gap) = conservation_gap {
            max_conservation_gap =
                Some(max_conservation_gap.map_or(gap, |prev: f64| prev.max(gap)));
        }
    }

    if probes * 2 < n_probes {
        return Err(Error::InsufficientSamples {
            needed: n_probes.div_ceil(2),
            got: probes,
        });
    }

    let pass =
        max_midpoint_gap <= tol && max_conservation_gap.map_or(true, |g| g <= tol);
    Ok(MidpointReport {
        pass,
        probes,
        beta,
        contraction_ratio: q,
        max_midpoint_gap,
        max_conservation_gap,
        basepoint: u,
    })
}
