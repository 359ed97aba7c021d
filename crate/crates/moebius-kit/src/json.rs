//! Deterministic JSON encoding.
//!
//! Every `f64` is printed as `{:.16e}` (one leading digit plus sixteen
//! fractional digits — 17 significant digits), which round-trips every finite
//! double exactly and renders each value one way only. Struct fields
//! serialize in declaration order, so a given value has exactly one byte
//! representation: reruns with the same inputs produce byte-identical output.

use std::io;

use serde::Serialize;

/// JSON formatter that renders every float in 17-significant-digit
/// scientific notation.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.16e}", f64::from(value))
    }
}

/// Serde adapter rendering a `Complex64` field as a `[re, im]` array.
pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    #[allow(dead_code)]
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serializes `value` to a compact JSON string with deterministic float
/// formatting.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::with_capacity(128);
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("JSON serializer emits valid UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_scientific_form() {
        for &x in &[
            0.0,
            -0.0,
            1.0 / 3.0,
            2.0,
            -0.5,
            1e-300,
            f64::MAX,
            f64::MIN_POSITIVE,
            std::f64::consts::PI,
        ] {
            let text = to_json_string(&x).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
    }

    #[test]
    fn formatting_is_stable() {
        assert_eq!(to_json_string(&2.0f64).unwrap(), "2.0000000000000000e0");
        assert_eq!(to_json_string(&-0.5f64).unwrap(), "-5.0000000000000000e-1");
        let nested = serde_json::json!({"a": [1.0, 0.25], "b": "inf"});
        assert_eq!(
            to_json_string(&nested).unwrap(),
            "{\"a\":[1.0000000000000000e0,2.5000000000000000e-1],\"b\":\"inf\"}"
        );
    }
}
