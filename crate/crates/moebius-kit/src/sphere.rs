//! Points on the Riemann sphere and the chordal metric.
//!
//! The extended complex plane is modeled as an enum: either a finite complex
//! number or the distinguished point at infinity. Infinity is symbolic — it is
//! never represented by a large float, and finite points never carry
//! non-finite components.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default tolerance for chordal equality comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Magnitude above which a finite point is pushed through the inversion chart
/// before chordal distances are taken, to avoid overflow.
const BIG: f64 = 1e150;

/// A point on the Riemann sphere: a finite complex number or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

use SpherePoint::{Finite, Infinity};

impl SpherePoint {
    /// Finite point from real and imaginary parts.
    ///
    /// Panics if either component is NaN or infinite; the point at infinity
    /// is `SpherePoint::Infinity`, never a float overflow.
    pub fn finite(re: f64, im: f64) -> Self {
        assert!(
            re.is_finite() && im.is_finite(),
            "finite sphere point requires finite components, got ({re}, {im})"
        );
        Finite(Complex64::new(re, im))
    }

    /// Classify a raw complex value: finite values map onto the plane, and
    /// overflowed (infinite-component) values land on the point at infinity.
    ///
    /// Panics on NaN components, which indicate an indeterminate form that
    /// should have been handled symbolically.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Finite(z)
        } else {
            assert!(
                !z.re.is_nan() && !z.im.is_nan(),
                "NaN component reached SpherePoint::from_complex"
            );
            Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinity)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    /// The finite value, if this point is not infinity.
    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            Finite(z) => Some(*z),
            Infinity => None,
        }
    }

    /// Complex conjugation (reflection in the real axis; fixes infinity).
    pub fn conj(&self) -> Self {
        match self {
            Finite(z) => Finite(z.conj()),
            Infinity => Infinity,
        }
    }

    /// Chordal equality at tolerance `tol`.
    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        chordal_distance(*self, *other) <= tol
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Infinity => write!(f, "inf"),
        }
    }
}

/// Chordal distance between two points on the Riemann sphere:
///
/// ```text
/// d(p, q)   = 2|p - q| / (sqrt(1 + |p|^2) * sqrt(1 + |q|^2))
/// d(p, inf) = 2 / sqrt(1 + |p|^2)
/// ```
///
/// Values lie in [0, 2]; antipodal points (such as 0 and infinity) are at
/// distance exactly 2. Stereographic inversion z -> 1/z is an isometry, and
/// that identity is used to evaluate the metric for very large finite inputs
/// without overflowing.
pub fn chordal_distance(p: SpherePoint, q: SpherePoint) -> f64 {
    match (p, q) {
        (Infinity, Infinity) => 0.0,
        (Infinity, Finite(z)) | (Finite(z), Infinity) => 2.0 / 1.0f64.hypot(z.norm()),
        (Finite(a), Finite(b)) => {
            if a.norm() > BIG || b.norm() > BIG {
                // swap to the inverted chart, where these points are small
                return chordal_distance(invert_chart(a), invert_chart(b));
            }
            2.0 * (a - b).norm() / (1.0f64.hypot(a.norm()) * 1.0f64.hypot(b.norm()))
        }
    }
}

fn invert_chart(z: Complex64) -> SpherePoint {
    if z == Complex64::ZERO {
        Infinity
    } else {
        // finv divides by the norm twice instead of by norm_sqr, which would
        // overflow to infinity for |z| beyond about 1e154
        Finite(z.finv())
    }
}

/// Extended reciprocal: 1/0 = inf, 1/inf = 0.
pub fn ext_inv(p: SpherePoint) -> SpherePoint {
    match p {
        Infinity => Finite(Complex64::ZERO),
        Finite(z) if z == Complex64::ZERO => Infinity,
        Finite(z) => SpherePoint::from_complex(z.finv()),
    }
}

/// Extended product. `inf * 0` has no limit and is rejected.
pub fn ext_mul(a: SpherePoint, b: SpherePoint) -> Result<SpherePoint> {
    match (a, b) {
        (Infinity, Finite(z)) | (Finite(z), Infinity) => {
            if z == Complex64::ZERO {
                Err(Error::IndeterminateForm("0 * inf"))
            } else {
                Ok(Infinity)
            }
        }
        (Infinity, Infinity) => Ok(Infinity),
        (Finite(x), Finite(y)) => Ok(SpherePoint::from_complex(x * y)),
    }
}

/// Extended quotient. `0/0` and `inf/inf` have no limit and are rejected;
/// division of a nonzero value by zero yields infinity.
pub fn ext_div(a: SpherePoint, b: SpherePoint) -> Result<SpherePoint> {
    match (a, b) {
        (Infinity, Infinity) => Err(Error::IndeterminateForm("inf / inf")),
        (Finite(x), Finite(y)) if x == Complex64::ZERO && y == Complex64::ZERO => {
            Err(Error::IndeterminateForm("0 / 0"))
        }
        (Infinity, Finite(_)) => Ok(Infinity),
        (Finite(_), Infinity) => Ok(Finite(Complex64::ZERO)),
        (Finite(x), Finite(y)) => {
            if y == Complex64::ZERO {
                Ok(Infinity)
            } else {
                Ok(SpherePoint::from_complex(x / y))
            }
        }
    }
}

/// Extended sum. `inf + inf` has no limit and is rejected.
pub fn ext_add(a: SpherePoint, b: SpherePoint) -> Result<SpherePoint> {
    match (a, b) {
        (Infinity, Infinity) => Err(Error::IndeterminateForm("inf + inf")),
        (Infinity, Finite(_)) | (Finite(_), Infinity) => Ok(Infinity),
        (Finite(x), Finite(y)) => Ok(SpherePoint::from_complex(x + y)),
    }
}

/// Extended difference. `inf - inf` has no limit and is rejected.
pub fn ext_sub(a: SpherePoint, b: SpherePoint) -> Result<SpherePoint> {
    match (a, b) {
        (Infinity, Infinity) => Err(Error::IndeterminateForm("inf - inf")),
        (Infinity, Finite(_)) | (Finite(_), Infinity) => Ok(Infinity),
        (Finite(x), Finite(y)) => Ok(SpherePoint::from_complex(x - y)),
    }
}

// JSON encoding: a finite point is the two-element array [re, im]; infinity
// is the string "inf".
impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Infinity => serializer.serialize_str("inf"),
            Finite(z) => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&z.re)?;
                seq.serialize_element(&z.im)?;
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = SpherePoint;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a two-element [re, im] array or the string \"inf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<SpherePoint, E> {
                if v == "inf" {
                    Ok(Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<SpherePoint, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                if !re.is_finite() || !im.is_finite() {
                    return Err(de::Error::custom(
                        "finite sphere point requires finite components",
                    ));
                }
                Ok(SpherePoint::finite(re, im))
            }
        }

        deserializer.deserialize_any(PointVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(re, im)
    }

    #[test]
    fn chordal_matches_hand_values() {
        // d(0, inf) = 2, d(1, inf) = sqrt(2), d(0, 1) = 2/sqrt(2) = sqrt(2)
        assert_eq!(chordal_distance(pt(0.0, 0.0), Infinity), 2.0);
        let s2 = 2.0f64.sqrt();
        assert!((chordal_distance(pt(1.0, 0.0), Infinity) - s2).abs() < 1e-15);
        assert!((chordal_distance(pt(0.0, 0.0), pt(1.0, 0.0)) - s2).abs() < 1e-15);
        assert_eq!(chordal_distance(Infinity, Infinity), 0.0);
    }

    #[test]
    fn chordal_at_infinity_is_the_limit_of_the_finite_formula() {
        // d(1, q) -> d(1, inf) as |q| grows
        let target = chordal_distance(pt(1.0, 0.0), Infinity);
        let mut prev_gap = f64::INFINITY;
        for k in [1e3, 1e6, 1e9, 1e12] {
            let gap = (chordal_distance(pt(1.0, 0.0), pt(k, 0.0)) - target).abs();
            assert!(gap < prev_gap, "gap should shrink as |q| grows");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-11);
    }

    #[test]
    fn chordal_survives_huge_coordinates() {
        let d = chordal_distance(pt(1e200, 0.0), pt(0.0, 1e200));
        assert!(d.is_finite() && d > 0.0 && d < 1e-150);
        assert!(chordal_distance(pt(1e300, 0.0), Infinity) < 1e-299);
        assert!((chordal_distance(pt(1e300, 0.0), pt(0.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn antipodal_bound_is_attained_only_at_antipodes() {
        assert!(chordal_distance(pt(3.0, -2.0), Infinity) < 2.0);
        // p and -1/conj(p) are antipodal
        let p = Complex64::new(0.5, 1.0);
        let anti = -p.conj().inv();
        let d = chordal_distance(Finite(p), Finite(anti));
        assert!((d - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ext_arithmetic_rules() {
        let zero = pt(0.0, 0.0);
        let two = pt(2.0, 0.0);
        assert_eq!(ext_inv(zero), Infinity);
        assert_eq!(ext_inv(Infinity), zero);
        assert_eq!(ext_inv(two), pt(0.5, 0.0));

        assert_eq!(ext_div(two, zero).unwrap(), Infinity);
        assert_eq!(ext_div(two, Infinity).unwrap(), zero);
        assert_eq!(ext_div(Infinity, two).unwrap(), Infinity);
        assert!(matches!(
            ext_div(zero, zero),
            Err(Error::IndeterminateForm(_))
        ));
        assert!(matches!(
            ext_div(Infinity, Infinity),
            Err(Error::IndeterminateForm(_))
        ));

        assert_eq!(ext_mul(Infinity, two).unwrap(), Infinity);
        assert!(matches!(
            ext_mul(Infinity, zero),
            Err(Error::IndeterminateForm(_))
        ));

        assert_eq!(ext_add(Infinity, two).unwrap(), Infinity);
        assert!(matches!(
            ext_add(Infinity, Infinity),
            Err(Error::IndeterminateForm(_))
        ));
        assert_eq!(ext_sub(two, Infinity).unwrap(), Infinity);
    }

    #[test]
    fn json_round_trip() {
        let p = pt(1.25, -3.5);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.25,-3.5]");
        assert_eq!(serde_json::from_str::<SpherePoint>(&s).unwrap(), p);

        let s = serde_json::to_string(&Infinity).unwrap();
        assert_eq!(s, "\"inf\"");
        assert_eq!(serde_json::from_str::<SpherePoint>(&s).unwrap(), Infinity);

        assert!(serde_json::from_str::<SpherePoint>("[1e999,0]").is_err());
        assert!(serde_json::from_str::<SpherePoint>("\"nope\"").is_err());
        assert!(serde_json::from_str::<SpherePoint>("[1,2,3]").is_err());
    }

    #[test]
    #[should_panic(expected = "finite sphere point")]
    fn finite_rejects_nan() {
        SpherePoint::finite(f64::NAN, 0.0);
    }
}
