//! Möbius transformations of the Riemann sphere, including the
//! orientation-reversing coset.
//!
//! A map is stored as a 2x2 complex matrix [a b; c d] normalized to
//! determinant 1, plus a `conjugating` flag. A non-conjugating map acts by
//! z -> (az + b)/(cz + d); a conjugating map conjugates its argument first,
//! z -> (a z̄ + b)/(c z̄ + d). Together these form the full group of
//! (anti-)holomorphic sphere automorphisms, PSL(2, C) extended by conjugation.
//!
//! The determinant normalization leaves a global sign ambiguity (the matrices
//! M and -M act identically), so map comparisons are always up to sign.

use crate::error::{Error, Result};
use crate::sphere::SpherePoint;
use crate::tetrad::Tetrad;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Determinant magnitude below which a scaled matrix is rejected as singular.
const MIN_DET: f64 = 1e-14;

/// Denominator magnitude below which evaluation maps to infinity.
const POLE_GUARD: f64 = 1e-300;

/// Input magnitude above which evaluation switches to the chart at infinity.
const BIG_INPUT: f64 = 1e150;

/// A Möbius transformation, possibly composed with complex conjugation.
///
/// The derived `==` is bitwise on the stored (normalized) matrix, which is
/// what determinism tests need; mathematical identity of transformations is
/// `approx_eq`, which also accepts the opposite global sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    conjugating: bool,
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    matrix: [[f64; 2]; 4],
    conjugating: bool,
}

impl TryFrom<MapRepr> for MoebiusMap {
    type Error = Error;

    fn try_from(r: MapRepr) -> Result<Self> {
        let [a, b, c, d] = r.matrix.map(|[re, im]| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(re, im))
            } else {
                Err(Error::InvalidConfig("matrix entries must be finite"))
            }
        });
        let (a, b, c, d) = (a?, b?, c?, d?);
        // Serialized maps carry the normalized matrix already. Accept those
        // verbatim — renormalizing would shift entries by an ulp and break
        // bitwise round-trips. The determinant test is scale-aware because
        // recomputing ad - bc loses absolute precision proportional to the
        // squared entry magnitude.
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        let det_tol = 32.0 * f64::EPSILON * (1.0 + scale * scale);
        if (a * d - b * c - 1.0).norm() <= det_tol {
            return Ok(MoebiusMap {
                a,
                b,
                c,
                d,
                conjugating: r.conjugating,
            });
        }
        MoebiusMap::build(a, b, c, d, r.conjugating)
    }
}

impl From<MoebiusMap> for MapRepr {
    fn from(m: MoebiusMap) -> Self {
        MapRepr {
            matrix: [m.a, m.b, m.c, m.d].map(|z| [z.re, z.im]),
            conjugating: m.conjugating,
        }
    }
}

impl MoebiusMap {
    /// Linear-fractional map z -> (az + b)/(cz + d), normalized to
    /// determinant 1. Rejects matrices whose determinant is smaller than
    /// 1e-14 in magnitude after scaling by the largest entry.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::build(a, b, c, d, false)
    }

    /// Orientation-reversing map z -> (a z̄ + b)/(c z̄ + d).
    pub fn conjugating(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::build(a, b, c, d, true)
    }

    fn build(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
        conjugating: bool,
    ) -> Result<Self> {
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if scale == 0.0 {
            return Err(Error::SingularMatrix { determinant: 0.0 });
        }
        let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
        let det = a * d - b * c;
        if det.norm() < MIN_DET {
            return Err(Error::SingularMatrix {
                determinant: det.norm(),
            });
        }
        // principal square root: Re >= 0, and Im >= 0 on the Re = 0 boundary
        let s = det.sqrt();
        Ok(MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
            conjugating,
        })
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex64::ONE,
            b: Complex64::ZERO,
            c: Complex64::ZERO,
            d: Complex64::ONE,
            conjugating: false,
        }
    }

    /// Normalized matrix entries [a, b, c, d].
    pub fn matrix(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_conjugating(&self) -> bool {
        self.conjugating
    }

    /// Evaluate the map. Total on the sphere: the pole -d/c maps to infinity
    /// (denominators within 1e-300 of zero count as the pole) and infinity
    /// maps to a/c, or stays fixed when c = 0.
    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        let p = if self.conjugating { p.conj() } else { p };
        match p {
            SpherePoint::Infinity => Self::ratio(self.a, self.c),
            SpherePoint::Finite(z) => {
                if z.norm() > BIG_INPUT {
                    // evaluate (a + b/z)/(c + d/z) to dodge overflow
                    let zi = z.inv();
                    Self::ratio(self.a + self.b * zi, self.c + self.d * zi)
                } else {
                    Self::ratio(self.a * z + self.b, self.c * z + self.d)
                }
            }
        }
    }

    fn ratio(num: Complex64, den: Complex64) -> SpherePoint {
        if den.norm() < POLE_GUARD {
            SpherePoint::Infinity
        } else {
            SpherePoint::from_complex(num / den)
        }
    }

    /// Composition self ∘ other: `other` is applied first, and
    /// `apply(compose(m1, m2), z) = apply(m1, apply(m2, z))` for all z.
    ///
    /// When self conjugates, conjugation has to be pushed through other's
    /// matrix before the matrices multiply, and the flags combine by XOR.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let (oa, ob, oc, od) = if self.conjugating {
            (
                other.a.conj(),
                other.b.conj(),
                other.c.conj(),
                other.d.conj(),
            )
        } else {
            (other.a, other.b, other.c, other.d)
        };
        Self::build(
            self.a * oa + self.b * oc,
            self.a * ob + self.b * od,
            self.c * oa + self.d * oc,
            self.c * ob + self.d * od,
            self.conjugating ^ other.conjugating,
        )
        .expect("product of unimodular matrices stays invertible")
    }

    /// The inverse map: the adjugate matrix, entrywise conjugated for
    /// conjugating maps (so that m.compose(&m.inverse()) is the identity).
    pub fn inverse(&self) -> MoebiusMap {
        let (a, b, c, d) = (self.d, -self.b, -self.c, self.a);
        let (a, b, c, d) = if self.conjugating {
            (a.conj(), b.conj(), c.conj(), d.conj())
        } else {
            (a, b, c, d)
        };
        Self::build(a, b, c, d, self.conjugating)
            .expect("adjugate of a unimodular matrix stays invertible")
    }

    /// Slotwise image of a tetrad. Möbius maps are injective, so the
    /// coincidence invariant carries over from the source.
    pub fn image_tetrad(&self, t: &Tetrad) -> Tetrad {
        Tetrad::from_points_unchecked(t.points().map(|p| self.apply(p)))
    }

    /// The unique non-conjugating map sending the pairwise-distinct points
    /// (p1, p2, p3) to (q1, q2, q3), built by factoring through the standard
    /// triple (0, 1, inf).
    pub fn from_three_points(p: [SpherePoint; 3], q: [SpherePoint; 3]) -> Result<Self> {
        let sp = standard_triple_map(p)?;
        let sq = standard_triple_map(q)?;
        Ok(sq.inverse().compose(&sp))
    }

    /// Entrywise comparison up to global sign (same orientation flag, and
    /// either M - N or M + N within `tol` in every entry).
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        if self.conjugating != other.conjugating {
            return false;
        }
        let m = self.matrix();
        let n = other.matrix();
        let gap = |sign: f64| {
            m.iter()
                .zip(n.iter())
                .map(|(x, y)| (x - sign * y).norm())
                .fold(0.0f64, f64::max)
        };
        gap(1.0) <= tol || gap(-1.0) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&MoebiusMap::identity(), tol)
    }
}

/// The map sending pairwise-distinct (z1, z2, z3) to (0, 1, inf):
/// S(z) = (z - z1)(z2 - z3) / ((z - z3)(z2 - z1)), with the finite reduced
/// forms when one of the three points is infinity.
fn standard_triple_map(p: [SpherePoint; 3]) -> Result<MoebiusMap> {
    if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
        return Err(Error::CollidingBasePoints(
            "interpolation needs pairwise-distinct points",
        ));
    }
    let one = Complex64::ONE;
    let zero = Complex64::ZERO;
    let f = |p: SpherePoint| p.as_finite().expect("finite by case split");
    let (a, b, c, d) = match p {
        [SpherePoint::Infinity, p2, p3] => {
            // (z2 - z3)/(z - z3)
            let (z2, z3) = (f(p2), f(p3));
            (zero, z2 - z3, one, -z3)
        }
        [p1, SpherePoint::Infinity, p3] => {
            // (z - z1)/(z - z3)
            let (z1, z3) = (f(p1), f(p3));
            (one, -z1, one, -z3)
        }
        [p1, p2, SpherePoint::Infinity] => {
            // (z - z1)/(z2 - z1)
            let (z1, z2) = (f(p1), f(p2));
            (one, -z1, zero, z2 - z1)
        }
        [p1, p2, p3] => {
            let (z1, z2, z3) = (f(p1), f(p2), f(p3));
            (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
        }
    };
    MoebiusMap::build(a, b, c, d, false).map_err(|_| {
        Error::CollidingBasePoints("points are numerically indistinguishable")
    })
}
