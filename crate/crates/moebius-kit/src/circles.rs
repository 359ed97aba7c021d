//! Generalized circles (circles and lines) on the Riemann sphere.
//!
//! A generalized circle is the zero set of a Hermitian form
//!
//! ```text
//! A z z̄ + B̄ z + B z̄ + C = 0        (A, C real, B complex)
//! ```
//!
//! which is an ordinary circle when A != 0 and a line when A = 0; lines are
//! exactly the generalized circles through infinity. Nondegeneracy means
//! |B|^2 - AC > 0. Coefficients are stored normalized: A^2 + 2|B|^2 + C^2 = 1
//! with the sign fixed so the first nonzero of (A, Re B, Im B, C) is positive,
//! making the representation unique and independent of construction order.

use crate::error::{Error, Result};
use crate::sphere::SpherePoint;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Entries smaller than this count as zero when picking the sign pivot, and
/// normalized discriminants smaller than this count as degenerate.
const COEFF_EPS: f64 = 1e-14;

/// A nondegenerate circle or line, in normalized Hermitian form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircleRepr", into = "CircleRepr")]
pub struct GeneralizedCircle {
    a: f64,
    b: Complex64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct CircleRepr {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: [f64; 2],
    #[serde(rename = "C")]
    c: f64,
}

impl TryFrom<CircleRepr> for GeneralizedCircle {
    type Error = Error;

    fn try_from(r: CircleRepr) -> Result<Self> {
        GeneralizedCircle::from_coefficients(r.a, Complex64::new(r.b[0], r.b[1]), r.c)
    }
}

impl From<GeneralizedCircle> for CircleRepr {
    fn from(g: GeneralizedCircle) -> Self {
        CircleRepr {
            a: g.a,
            b: [g.b.re, g.b.im],
            c: g.c,
        }
    }
}

impl GeneralizedCircle {
    /// Build from raw Hermitian coefficients, normalizing scale and sign.
    /// Rejects non-finite input, the zero form, and degenerate forms
    /// (point circles and empty loci, where |B|^2 - AC <= 0).
    pub fn from_coefficients(a: f64, b: Complex64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.re.is_finite() && b.im.is_finite() && c.is_finite()) {
            return Err(Error::InvalidConfig("circle coefficients must be finite"));
        }
        let norm = (a * a + 2.0 * b.norm_sqr() + c * c).sqrt();
        if norm < COEFF_EPS {
            return Err(Error::InvalidConfig("circle coefficients are all zero"));
        }
        // skip the rescale when the input is already unit-norm, so that
        // normalization is idempotent: re-parsing serialized coefficients
        // must not drift by an ulp
        let (mut a, mut b, mut c) = if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
            (a / norm, b / norm, c / norm)
        } else {
            (a, b, c)
        };
        if b.norm_sqr() - a * c <= COEFF_EPS {
            return Err(Error::InvalidConfig(
                "degenerate circle: |B|^2 - AC must be positive",
            ));
        }
        // sign convention: first coefficient of (A, Re B, Im B, C) that is
        // meaningfully nonzero must be positive
        let pivot = [a, b.re, b.im, c]
            .into_iter()
            .find(|v| v.abs() > COEFF_EPS)
            .expect("unit-norm coefficient vector has a nonzero entry");
        if pivot < 0.0 {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(GeneralizedCircle { a, b, c })
    }

    /// Normalized coefficients (A, B, C).
    pub fn coefficients(&self) -> (f64, Complex64, f64) {
        (self.a, self.b, self.c)
    }

    /// Lines are the generalized circles through infinity.
    pub fn is_line(&self) -> bool {
        self.a.abs() <= COEFF_EPS
    }

    /// |B|^2 - AC, positive for every nondegenerate circle.
    pub fn discriminant(&self) -> f64 {
        self.b.norm_sqr() - self.a * self.c
    }

    /// Center of an ordinary circle (None for lines).
    pub fn center(&self) -> Option<Complex64> {
        if self.is_line() {
            None
        } else {
            Some(-self.b / self.a)
        }
    }

    /// Radius of an ordinary circle (None for lines).
    pub fn radius(&self) -> Option<f64> {
        if self.is_line() {
            None
        } else {
            Some(self.discriminant().sqrt() / self.a.abs())
        }
    }

    /// Absolute Hermitian residual at a point; for infinity this is |A|,
    /// the limit of the rescaled form along any path out of the plane.
    pub fn residual(&self, p: SpherePoint) -> f64 {
        match p {
            SpherePoint::Infinity => self.a.abs(),
            SpherePoint::Finite(z) => {
                (self.a * z.norm_sqr() + 2.0 * (self.b * z.conj()).re + self.c).abs()
            }
        }
    }

    /// Membership test: residual at most `tol`.
    pub fn on_circle(&self, p: SpherePoint, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    /// `n` points on the locus. Circles are parameterized by angle; lines by
    /// a tangent sweep whose final sample is the point at infinity.
    pub fn sample_points(&self, n: usize) -> Vec<SpherePoint> {
        if n == 0 {
            return Vec::new();
        }
        if let (Some(z0), Some(r)) = (self.center(), self.radius()) {
            (0..n)
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
                    SpherePoint::from_complex(z0 + Complex64::from_polar(r, theta))
                })
                .collect()
        } else {
            // closest point to the origin plus a tangent direction
            let p0 = -(self.c / 2.0) * self.b / self.b.norm_sqr();
            let dir = Complex64::i() * self.b / self.b.norm();
            let mut pts: Vec<SpherePoint> = (0..n - 1)
                .map(|k| {
                    let u = (k as f64 + 0.5) / (n as f64 - 1.0) - 0.5;
                    let t = (std::f64::consts::PI * u).tan();
                    SpherePoint::from_complex(p0 + t * dir)
                })
                .collect();
            pts.push(SpherePoint::Infinity);
            pts
        }
    }
}

/// The unique generalized circle through three pairwise-distinct points.
///
/// If one point is infinity the result is the line through the other two;
/// otherwise the coefficients are the cofactors of the classical 4x4
/// circle determinant, which collinear points reduce to a line (A = 0)
/// automatically.
pub fn circle_through(
    p1: SpherePoint,
    p2: SpherePoint,
    p3: SpherePoint,
) -> Result<GeneralizedCircle> {
    if p1 == p2 || p2 == p3 || p1 == p3 {
        return Err(Error::CollidingBasePoints(
            "circle_through needs pairwise-distinct points",
        ));
    }
    let finite: Vec<Complex64> = [p1, p2, p3].iter().filter_map(|p| p.as_finite()).collect();
    let built = if finite.len() == 2 {
        line_through(finite[0], finite[1])
    } else {
        let det3 = |m: [[f64; 3]; 3]| -> f64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let (x, y): (Vec<f64>, Vec<f64>) = finite.iter().map(|z| (z.re, z.im)).unzip();
        let s: Vec<f64> = finite.iter().map(|z| z.norm_sqr()).collect();
        let a = det3([[x[0], y[0], 1.0], [x[1], y[1], 1.0], [x[2], y[2], 1.0]]);
        let dx = -det3([[s[0], y[0], 1.0], [s[1], y[1], 1.0], [s[2], y[2], 1.0]]);
        let ey = det3([[s[0], x[0], 1.0], [s[1], x[1], 1.0], [s[2], x[2], 1.0]]);
        let f = -det3([
            [s[0], x[0], y[0]],
            [s[1], x[1], y[1]],
            [s[2], x[2], y[2]],
        ]);
        GeneralizedCircle::from_coefficients(a, Complex64::new(dx / 2.0, ey / 2.0), f)
    };
    built.map_err(|_| Error::CollidingBasePoints("points are numerically indistinguishable"))
}

fn line_through(u: Complex64, v: Complex64) -> Result<GeneralizedCircle> {
    let d = v - u;
    let n = Complex64::new(-d.im, d.re);
    let b = n / 2.0;
    let c = -(n.re * u.re + n.im * u.im);
    GeneralizedCircle::from_coefficients(0.0, b, c)
}

/// Least-squares generalized circle through a point cloud, returning the
/// fitted circle and the maximum pointwise residual.
///
/// The coefficient vector is the smallest-eigenvalue eigenvector of the
/// scatter matrix of the rows (|z|^2, 2x, 2y, 1); when infinity is among the
/// inputs, A is pinned to zero and the fit runs over lines. If the minimizing
/// eigenvector is a degenerate form, the next eigenvalue up is used instead
/// (an orthonormal basis always contains a nondegenerate direction, because
/// the degeneracy form has positive trace). Needs at least three finite
/// points.
pub fn fit_circle(points: &[SpherePoint]) -> Result<(GeneralizedCircle, f64)> {
    let finite: Vec<Complex64> = points.iter().filter_map(|p| p.as_finite()).collect();
    if finite.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: finite.len(),
        });
    }
    let force_line = finite.len() != points.len();

    // candidate coefficient vectors (A, Bx, By, C), ordered by eigenvalue
    let mut candidates: Vec<(f64, [f64; 4])> = if force_line {
        let mut scatter = Matrix3::<f64>::zeros();
        for z in &finite {
            let row = Vector3::new(2.0 * z.re, 2.0 * z.im, 1.0);
            scatter += row * row.transpose();
        }
        let eig = scatter.symmetric_eigen();
        (0..3)
            .map(|k| {
                let v = eig.eigenvectors.column(k);
                (eig.eigenvalues[k], [0.0, v[0], v[1], v[2]])
            })
            .collect()
    } else {
        let mut scatter = Matrix4::<f64>::zeros();
        for z in &finite {
            let row = Vector4::new(z.norm_sqr(), 2.0 * z.re, 2.0 * z.im, 1.0);
            scatter += row * row.transpose();
        }
        let eig = scatter.symmetric_eigen();
        (0..4)
            .map(|k| {
                let v = eig.eigenvectors.column(k);
                (eig.eigenvalues[k], [v[0], v[1], v[2], v[3]])
            })
            .collect()
    };
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0));

    let circle = candidates
        .iter()
        .find_map(|(_, [a, bx, by, c])| {
            GeneralizedCircle::from_coefficients(*a, Complex64::new(*bx, *by), *c).ok()
        })
        .expect("scatter eigenbasis always contains a nondegenerate direction");

    let max_residual = points
        .iter()
        .map(|p| circle.residual(*p))
        .fold(0.0f64, f64::max);
    Ok((circle, max_residual))
}
