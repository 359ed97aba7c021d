//! Maps given by samples: the classifier's input format.
//!
//! A map under test is either an analytic expression (a rational function,
//! optionally precomposed with conjugation and post-perturbed by a bounded
//! sine term) or a bare list of input/output pairs, together with the closed
//! disk on which the map is considered known.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::sphere::SpherePoint;

use super::rng::{self, role};

/// Closed disk `|z - center| <= radius` in the finite plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionRepr", into = "RegionRepr")]
pub struct DiskRegion {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionRepr {
    center: [f64; 2],
    radius: f64,
}

impl TryFrom<RegionRepr> for DiskRegion {
    type Error = Error;
    fn try_from(r: RegionRepr) -> Result<Self> {
        DiskRegion::new(Complex64::new(r.center[0], r.center[1]), r.radius)
    }
}

impl From<DiskRegion> for RegionRepr {
    fn from(d: DiskRegion) -> Self {
        RegionRepr {
            center: [d.center.re, d.center.im],
            radius: d.radius,
        }
    }
}

impl DiskRegion {
    /// A disk with finite center and strictly positive finite radius.
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidConfig("region center must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig("region radius must be positive"));
        }
        Ok(DiskRegion { center, radius })
    }

    /// Closed-disk membership; infinity is never inside.
    pub fn contains(&self, p: SpherePoint) -> bool {
        match p {
            SpherePoint::Infinity => false,
            SpherePoint::Finite(z) => (z - self.center).norm() <= self.radius,
        }
    }
}

/// Additive perturbation applied after the rational part.
#[derive(Debug, Clone, PartialEq)]
enum MapData {
    Rational {
        /// Numerator coefficients, constant term first; trailing zeros trimmed.
        num: Vec<Complex64>,
        /// Denominator coefficients, constant term first; never the zero polynomial.
        den: Vec<Complex64>,
        /// Evaluate the rational part at the conjugate of the input.
        conjugate: bool,
        /// Amplitude of an additive `sin(Re z)` term; `0.0` means absent.
        sin_amplitude: f64,
    },
    Pairs(Vec<(SpherePoint, SpherePoint)>),
}

/// A map known through samples on a disk: analytic formula or pair list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledMapRepr", into = "SampledMapRepr")]
pub struct SampledMap {
    data: MapData,
    region: DiskRegion,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalRepr {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
    #[serde(default)]
    conjugate: bool,
    #[serde(default, skip_serializing_if = "amplitude_is_zero")]
    sin_re: f64,
}

fn amplitude_is_zero(a: &f64) -> bool {
    *a == 0.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledMapRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rational: Option<RationalRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<[SpherePoint; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    region: Option<DiskRegion>,
}

impl TryFrom<SampledMapRepr> for SampledMap {
    type Error = Error;
    fn try_from(r: SampledMapRepr) -> Result<Self> {
        match (r.rational, r.pairs) {
            (Some(rat), None) => {
                let region = r.region.ok_or(Error::InvalidConfig(
                    "analytic maps require an explicit region",
                ))?;
                let to_complex =
                    |v: Vec<[f64; 2]>| -> Vec<Complex64> {
                        v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()
                    };
                let mut map = SampledMap::rational_full(
                    to_complex(rat.num),
                    to_complex(rat.den),
                    rat.conjugate,
                    region,
                )?;
                if rat.sin_re != 0.0 {
                    map = map.with_sin_perturbation(rat.sin_re)?;
                }
                Ok(map)
            }
            (None, Some(pairs)) => {
                let pairs = pairs.into_iter().map(|[x, y]| (x, y)).collect();
                SampledMap::from_pairs(pairs, r.region)
            }
            (Some(_), Some(_)) => Err(Error::InvalidConfig(
                "map must be either rational or pairs, not both",
            )),
            (None, None) => Err(Error::InvalidConfig(
                "map must contain a \"rational\" or a \"pairs\" entry",
            )),
        }
    }
}

impl From<SampledMap> for SampledMapRepr {
    fn from(m: SampledMap) -> Self {
        let region = Some(m.region);
        match m.data {
            MapData::Rational {
                num,
                den,
                conjugate,
                sin_amplitude,
            } => SampledMapRepr {
                rational: Some(RationalRepr {
                    num: num.into_iter().map(|z| [z.re, z.im]).collect(),
                    den: den.into_iter().map(|z| [z.re, z.im]).collect(),
                    conjugate,
                    sin_re: sin_amplitude,
                }),
                pairs: None,
                region,
            },
            MapData::Pairs(pairs) => SampledMapRepr {
                rational: None,
                pairs: Some(pairs.into_iter().map(|(x, y)| [x, y]).collect()),
                region,
            },
        }
    }
}

/// Drops trailing exact-zero coefficients.
fn trim_poly(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.last() == Some(&Complex64::ZERO) {
        coeffs.pop();
    }
    coeffs
}

/// Horner evaluation, constant term first. Empty slice is the zero polynomial.
fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::ZERO, |acc, &c| acc * z + c)
}

impl SampledMap {
    /// A rational map `num(z) / den(z)` (coefficients constant-term first)
    /// restricted to `region`.
    pub fn rational(
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        region: DiskRegion,
    ) -> Result<Self> {
        Self::rational_full(num, den, false, region)
    }

    /// A conjugated rational map `num(conj z) / den(conj z)`.
    pub fn conjugated_rational(
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        region: DiskRegion,
    ) -> Result<Self> {
        Self::rational_full(num, den, true, region)
    }

    fn rational_full(
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        conjugate: bool,
        region: DiskRegion,
    ) -> Result<Self> {
        if num
            .iter()
            .chain(den.iter())
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidConfig("polynomial coefficients must be finite"));
        }
        let num = trim_poly(num);
        let den = trim_poly(den);
        if den.is_empty() {
            return Err(Error::InvalidConfig(
                "denominator is the zero polynomial",
            ));
        }
        Ok(SampledMap {
            data: MapData::Rational {
                num,
                den,
                conjugate,
                sin_amplitude: 0.0,
            },
            region,
        })
    }

    /// Adds an additive `amplitude * sin(Re z)` term after the rational part.
    pub fn with_sin_perturbation(mut self, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidConfig("perturbation amplitude must be finite"));
        }
        match &mut self.data {
            MapData::Rational { sin_amplitude, .. } => {
                *sin_amplitude = amplitude;
                Ok(self)
            }
            MapData::Pairs(_) => Err(Error::InvalidConfig(
                "perturbations apply only to analytic maps",
            )),
        }
    }

    /// Wraps a Möbius transformation as an analytic sampled map.
    pub fn from_moebius(m: &MoebiusMap, region: DiskRegion) -> Self {
        let [a, b, c, d] = m.matrix();
        SampledMap::rational_full(vec![b, a], vec![d, c], m.is_conjugating(), region)
            .expect("a Moebius map has an invertible, finite matrix")
    }

    /// A map known only through explicit input/output pairs. Requires at
    /// least four distinct inputs and consistent outputs on duplicates; the
    /// region defaults to a disk snugly containing the finite inputs.
    pub fn from_pairs(
        pairs: Vec<(SpherePoint, SpherePoint)>,
        region: Option<DiskRegion>,
    ) -> Result<Self> {
        let mut dedup: Vec<(SpherePoint, SpherePoint)> = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            match dedup.iter().find(|(seen, _)| *seen == x) {
                Some((_, prior)) if *prior == y => {}
                Some(_) => {
                    return Err(Error::InvalidConfig(
                        "pair list repeats an input with conflicting outputs",
                    ))
                }
                None => dedup.push((x, y)),
            }
        }
        if dedup.len() < 4 {
            return Err(Error::TooFewPoints {
                needed: 4,
                got: dedup.len(),
            });
        }
        let region = match region {
            Some(r) => r,
            None => {
                let finite: Vec<Complex64> = dedup
                    .iter()
                    .filter_map(|(x, _)| x.as_finite())
                    .collect();
                let center = finite.iter().sum::<Complex64>() / finite.len() as f64;
                let max_dist = finite
                    .iter()
                    .map(|z| (z - center).norm())
                    .fold(0.0f64, f64::max);
                DiskRegion::new(center, max_dist * 1.001 + 1e-9)?
            }
        };
        Ok(SampledMap {
            data: MapData::Pairs(dedup),
            region,
        })
    }

    /// The disk on which the map is considered known.
    pub fn region(&self) -> DiskRegion {
        self.region
    }

    /// True when the map is given as explicit pairs rather than a formula.
    pub fn is_pairs(&self) -> bool {
        matches!(self.data, MapData::Pairs(_))
    }

    /// Default phi-test tolerance for this kind of input: tight for analytic
    /// formulas, loose for measured pair data.
    pub fn default_phi_tol(&self) -> f64 {
        if self.is_pairs() {
            1e-4
        } else {
            1e-7
        }
    }

    /// Evaluates the map. `None` means the value is not determined by the
    /// data: an indeterminate point of the formula (common zero of numerator
    /// and denominator) or an input absent from the pair list.
    pub fn eval(&self, p: SpherePoint) -> Option<SpherePoint> {
        match &self.data {
            MapData::Pairs(pairs) => pairs
                .iter()
                .find(|(x, _)| *x == p)
                .map(|&(_, y)| y),
            MapData::Rational {
                num,
                den,
                conjugate,
                sin_amplitude,
            } => {
                let arg = if *conjugate { p.conj() } else { p };
                let value = eval_rational(num, den, arg)?;
                if *sin_amplitude == 0.0 {
                    return Some(value);
                }
                match (p, value) {
                    // bounded perturbations do not move the point at infinity,
                    // and sin(Re z) has no limit there
                    (SpherePoint::Infinity, v) => Some(v),
                    (_, SpherePoint::Infinity) => Some(SpherePoint::Infinity),
                    (SpherePoint::Finite(z), SpherePoint::Finite(w)) => Some(
                        SpherePoint::from_complex(w + sin_amplitude * z.re.sin()),
                    ),
                }
            }
        }
    }

    /// Deterministic input set: every stored input for pair data, `n` uniform
    /// draws from the region for analytic maps.
    pub fn sample_inputs(&self, n: usize, seed: u64) -> Vec<SpherePoint> {
        match &self.data {
            MapData::Pairs(pairs) => pairs.iter().map(|&(x, _)| x).collect(),
            MapData::Rational { .. } => {
                let mut rng = rng::stream(seed, role::MAP_SAMPLES);
                (0..n)
                    .map(|_| SpherePoint::Finite(rng::draw_in_disk(&mut rng, &self.region)))
                    .collect()
            }
        }
    }

    /// Exposes the stored pairs (empty for analytic maps).
    pub fn pairs(&self) -> &[(SpherePoint, SpherePoint)] {
        match &self.data {
            MapData::Pairs(p) => p,
            MapData::Rational { .. } => &[],
        }
    }
}

/// Total rational evaluation on the sphere. Returns `None` only at a common
/// zero of numerator and denominator.
fn eval_rational(num: &[Complex64], den: &[Complex64], p: SpherePoint) -> Option<SpherePoint> {
    match p {
        SpherePoint::Infinity => {
            if num.is_empty() {
                return Some(SpherePoint::finite(0.0, 0.0));
            }
            let (dn, dd) = (num.len() - 1, den.len() - 1);
            Some(match dn.cmp(&dd) {
                std::cmp::Ordering::Greater => SpherePoint::Infinity,
                std::cmp::Ordering::Less => SpherePoint::finite(0.0, 0.0),
                std::cmp::Ordering::Equal => {
                    SpherePoint::from_complex(num[dn].fdiv(den[dd]))
                }
            })
        }
        SpherePoint::Finite(z) => {
            let p_val = horner(num, z);
            let q_val = horner(den, z);
            let finite = |w: Complex64| w.re.is_finite() && w.im.is_finite();
            if finite(p_val) && finite(q_val) {
                if q_val == Complex64::ZERO {
                    if p_val == Complex64::ZERO {
                        None
                    } else {
                        Some(SpherePoint::Infinity)
                    }
                } else {
                    Some(SpherePoint::from_complex(p_val.fdiv(q_val)))
                }
            } else {
                // Horner overflowed: evaluate through the chart at infinity,
                // p(z)/q(z) = z^(deg p - deg q) * pr(1/z)/qr(1/z) with
                // reversed coefficient lists pr, qr
                let w = z.finv();
                let pr: Vec<Complex64> = num.iter().rev().copied().collect();
                let qr: Vec<Complex64> = den.iter().rev().copied().collect();
                let top = horner(&pr, w);
                let bot = horner(&qr, w);
                if bot == Complex64::ZERO {
                    return if top == Complex64::ZERO {
                        None
                    } else {
                        Some(SpherePoint::Infinity)
                    };
                }
                let dn = num.len() as i32 - 1;
                let dd = den.len() as i32 - 1;
                Some(SpherePoint::from_complex(z.powi(dn - dd) * top.fdiv(bot)))
            }
        }
    }
}
