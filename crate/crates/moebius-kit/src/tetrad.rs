//! Ordered tetrads and the anharmonic (cross-)ratio.
//!
//! The ratio of an ordered tetrad T = {z1, z2, z3, z4} is
//!
//! ```text
//! A(T) = (z1 - z3)(z2 - z4) / ((z3 - z2)(z4 - z1))
//! ```
//!
//! extended to the whole sphere: infinities are evaluated through the reduced
//! formulas obtained by cancelling the dominant factors (e.g. z4 = inf gives
//! A = -(z1 - z3)/(z3 - z2)), and a tetrad with one coincident pair gets the
//! limit value of A over perturbations of the coincident points. That limit
//! is path-independent and depends only on which positions coincide:
//!
//! ```text
//! z1 = z2  or  z3 = z4  ->  1
//! z1 = z3  or  z2 = z4  ->  0
//! z1 = z4  or  z2 = z3  ->  inf
//! ```
//!
//! Tetrads where three or more points coincide have no well-defined ratio and
//! cannot be constructed. A tetrad is *nonsingular* exactly when its ratio
//! avoids {0, 1, inf}.

use crate::error::{Error, Result};
use crate::sphere::{chordal_distance, SpherePoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Chordal tolerance used to deduplicate ratio-orbit members.
pub const ORBIT_DEDUP_TOL: f64 = 1e-12;

/// The two ratio values characterizing Apollonian tetrads: (1 ± i√3)/2.
pub fn apollonian_ratios() -> [Complex64; 2] {
    let h = 3.0f64.sqrt() / 2.0;
    [Complex64::new(0.5, h), Complex64::new(0.5, -h)]
}

/// The value of an anharmonic ratio, as a point on the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnharmonicRatio(SpherePoint);

impl AnharmonicRatio {
    pub fn value(&self) -> SpherePoint {
        self.0
    }

    /// A ratio is singular when it lies in {0, 1, inf}.
    pub fn is_singular(&self) -> bool {
        match self.0 {
            SpherePoint::Infinity => true,
            SpherePoint::Finite(z) => z == Complex64::ZERO || z == Complex64::ONE,
        }
    }
}

/// The transpositions of tetrad slots that act nontrivially on the ratio.
///
/// Swapping the first slot with the k-th generates the full action of S4 on
/// ratio values; the other transpositions repeat the same three values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transposition {
    /// Swap slots 1 and 2: A -> 1/A.
    S12,
    /// Swap slots 1 and 3: A -> A/(A - 1).
    S13,
    /// Swap slots 1 and 4: A -> 1 - A.
    S14,
}

/// An ordered tetrad of sphere points, at most two of which coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[SpherePoint; 4]", into = "[SpherePoint; 4]")]
pub struct Tetrad {
    points: [SpherePoint; 4],
}

impl TryFrom<[SpherePoint; 4]> for Tetrad {
    type Error = Error;

    fn try_from(points: [SpherePoint; 4]) -> Result<Self> {
        Tetrad::new(points)
    }
}

impl From<Tetrad> for [SpherePoint; 4] {
    fn from(t: Tetrad) -> Self {
        t.points
    }
}

impl Tetrad {
    /// Build a tetrad, rejecting point multisets where any value appears
    /// three or more times (coincidence is exact, not approximate: nearly
    /// coincident tetrads are legal and evaluated as-is).
    pub fn new(points: [SpherePoint; 4]) -> Result<Self> {
        for i in 0..4 {
            let copies = points.iter().filter(|p| **p == points[i]).count();
            if copies >= 3 {
                return Err(Error::InvalidTetrad(
                    "three or more coincident points have no anharmonic ratio",
                ));
            }
        }
        Ok(Tetrad { points })
    }

    /// Construct without the coincidence check, for images under injective
    /// maps where the invariant is inherited from the source tetrad.
    pub(crate) fn from_points_unchecked(points: [SpherePoint; 4]) -> Self {
        Tetrad { points }
    }

    pub fn points(&self) -> [SpherePoint; 4] {
        self.points
    }

    /// The anharmonic ratio A(T). Total on valid tetrads: coincident pairs
    /// take their limit value and infinities use the reduced formulas.
    pub fn cross_ratio(&self) -> AnharmonicRatio {
        let [z1, z2, z3, z4] = self.points;

        // Exact-coincidence patterns. With at most two coincident points, a
        // second coincident pair can only occupy the complementary slots of
        // the same partition, which yields the same limit value.
        if z1 == z2 || z3 == z4 {
            return AnharmonicRatio(SpherePoint::finite(1.0, 0.0));
        }
        if z1 == z3 || z2 == z4 {
            return AnharmonicRatio(SpherePoint::finite(0.0, 0.0));
        }
        if z1 == z4 || z2 == z3 {
            return AnharmonicRatio(SpherePoint::Infinity);
        }

        // Pairwise distinct, so at most one slot holds infinity.
        let ratio = match (z1, z2, z3, z4) {
            (SpherePoint::Infinity, q2, q3, q4) => {
                let (z2, z3, z4) = (fin(q2), fin(q3), fin(q4));
                -(z2 - z4) / (z3 - z2)
            }
            (q1, SpherePoint::Infinity, q3, q4) => {
                let (z1, z3, z4) = (fin(q1), fin(q3), fin(q4));
                -(z1 - z3) / (z4 - z1)
            }
            (q1, q2, SpherePoint::Infinity, q4) => {
                let (z1, z2, z4) = (fin(q1), fin(q2), fin(q4));
                -(z2 - z4) / (z4 - z1)
            }
            (q1, q2, q3, SpherePoint::Infinity) => {
                let (z1, z2, z3) = (fin(q1), fin(q2), fin(q3));
                -(z1 - z3) / (z3 - z2)
            }
            _ => {
                let (z1, z2, z3, z4) = (fin(z1), fin(z2), fin(z3), fin(z4));
                // quotients of differences are interleaved so that nearly
                // singular tetrads cannot underflow through a tiny product
                ((z1 - z3) / (z3 - z2)) * ((z2 - z4) / (z4 - z1))
            }
        };
        AnharmonicRatio(SpherePoint::from_complex(ratio))
    }

    /// True when A(T) avoids {0, 1, inf}.
    pub fn is_nonsingular(&self) -> bool {
        !self.cross_ratio().is_singular()
    }

    /// Swap two slots. The ratio transforms by 1/A, A/(A-1), or 1 - A for
    /// s12, s13, s14 respectively.
    pub fn permute(&self, s: Transposition) -> Tetrad {
        let mut p = self.points;
        match s {
            Transposition::S12 => p.swap(0, 1),
            Transposition::S13 => p.swap(0, 2),
            Transposition::S14 => p.swap(0, 3),
        }
        Tetrad { points: p }
    }

    /// The three distance products of the Apollonian identity
    /// |z2 - z3|·|z1 - z4|, |z3 - z1|·|z2 - z4|, |z1 - z2|·|z3 - z4|,
    /// defined only when all four points are finite.
    pub fn distance_products(&self) -> Option<[f64; 3]> {
        let [z1, z2, z3, z4] = self.points;
        let (z1, z2, z3, z4) = (
            z1.as_finite()?,
            z2.as_finite()?,
            z3.as_finite()?,
            z4.as_finite()?,
        );
        Some([
            (z2 - z3).norm() * (z1 - z4).norm(),
            (z3 - z1).norm() * (z2 - z4).norm(),
            (z1 - z2).norm() * (z3 - z4).norm(),
        ])
    }

    /// Apollonian test. For all-finite tetrads the three distance products
    /// must agree pairwise within `tol` relative error (relative to the
    /// largest product); for tetrads containing infinity the cross-ratio
    /// criterion is used instead. Requires pairwise-distinct points.
    pub fn is_apollonian(&self, tol: f64) -> Result<bool> {
        self.require_pairwise_distinct()?;
        match self.distance_products() {
            Some([p1, p2, p3]) => {
                let scale = p1.max(p2).max(p3);
                Ok((p1 - p2).abs() <= tol * scale
                    && (p2 - p3).abs() <= tol * scale
                    && (p1 - p3).abs() <= tol * scale)
            }
            None => self.is_apollonian_by_ratio(tol),
        }
    }

    /// Apollonian test through the ratio criterion alone: A(T) must lie
    /// within chordal `tol` of (1 + i√3)/2 or its conjugate.
    pub fn is_apollonian_by_ratio(&self, tol: f64) -> Result<bool> {
        self.require_pairwise_distinct()?;
        let a = self.cross_ratio().value();
        Ok(apollonian_ratios()
            .iter()
            .any(|w| chordal_distance(a, SpherePoint::Finite(*w)) <= tol))
    }

    fn require_pairwise_distinct(&self) -> Result<()> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.points[i] == self.points[j] {
                    return Err(Error::InvalidTetrad(
                        "the apollonian test requires pairwise-distinct points",
                    ));
                }
            }
        }
        Ok(())
    }
}

fn fin(p: SpherePoint) -> Complex64 {
    p.as_finite().expect("finite point expected after case split")
}

/// Admissibility check shared by ratio-parameterized operations: alpha must
/// avoid 0, 1, and infinity (non-finite components count as infinity).
pub(crate) fn require_admissible_alpha(alpha: Complex64) -> Result<()> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::DegenerateAlpha);
    }
    if alpha == Complex64::ZERO || alpha == Complex64::ONE {
        return Err(Error::DegenerateAlpha);
    }
    Ok(())
}

/// The orbit of an admissible ratio value under slot permutations:
///
/// ```text
/// P = { a, 1/a, 1 - a, 1/(1 - a), a/(a - 1), (a - 1)/a }
/// ```
///
/// deduplicated chordally at `ORBIT_DEDUP_TOL` (first occurrence kept).
/// Generic values give six members; {-1, 2, 1/2} gives three and the two
/// Apollonian values give two.
pub fn orbit(alpha: Complex64) -> Result<Vec<Complex64>> {
    require_admissible_alpha(alpha)?;
    let one = Complex64::ONE;
    let candidates = [
        alpha,
        one / alpha,
        one - alpha,
        one / (one - alpha),
        alpha / (alpha - one),
        (alpha - one) / alpha,
    ];
    let mut members: Vec<Complex64> = Vec::with_capacity(6);
    for c in candidates {
        let dup = members.iter().any(|m| {
            chordal_distance(SpherePoint::Finite(*m), SpherePoint::Finite(c)) <= ORBIT_DEDUP_TOL
        });
        if !dup {
            members.push(c);
        }
    }
    Ok(members)
}

/// The unique fourth point completing pairwise-distinct base points
/// (z1, z2, z3) to a tetrad with ratio `alpha`.
///
/// Solving A(T) = alpha for z4 inverts a single linear-fractional relation;
/// the result can legitimately be infinity (for example base points (0, 1, 2)
/// with alpha = 2).
pub fn solve_fourth_point(
    z1: SpherePoint,
    z2: SpherePoint,
    z3: SpherePoint,
    alpha: Complex64,
) -> Result<SpherePoint> {
    require_admissible_alpha(alpha)?;
    if z1 == z2 || z2 == z3 || z1 == z3 {
        return Err(Error::CollidingBasePoints(
            "solve_fourth_point needs pairwise-distinct base points",
        ));
    }

    let w = match (z1, z2, z3) {
        (SpherePoint::Infinity, q2, q3) => {
            // A = -(z2 - z4)/(z3 - z2)  =>  z4 = z2 + alpha (z3 - z2)
            let (z2, z3) = (fin(q2), fin(q3));
            z2 + alpha * (z3 - z2)
        }
        (q1, SpherePoint::Infinity, q3) => {
            // A = -(z1 - z3)/(z4 - z1)  =>  z4 = z1 - (z1 - z3)/alpha
            let (z1, z3) = (fin(q1), fin(q3));
            z1 - (z1 - z3) / alpha
        }
        (q1, q2, SpherePoint::Infinity) => {
            // A = -(z2 - z4)/(z4 - z1)  =>  z4 = (z2 - alpha z1)/(1 - alpha)
            let (z1, z2) = (fin(q1), fin(q2));
            (z2 - alpha * z1) / (Complex64::ONE - alpha)
        }
        (q1, q2, q3) => {
            // (z2 - z4)/(z4 - z1) = g with g = alpha (z3 - z2)/(z1 - z3),
            // so z4 = (z2 + g z1)/(1 + g); g = -1 sends z4 to infinity
            let (z1, z2, z3) = (fin(q1), fin(q2), fin(q3));
            let g = alpha * (z3 - z2) / (z1 - z3);
            let denom = Complex64::ONE + g;
            if denom == Complex64::ZERO {
                return Ok(SpherePoint::Infinity);
            }
            (z2 + g * z1) / denom
        }
    };
    Ok(SpherePoint::from_complex(w))
}
