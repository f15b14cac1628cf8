//! Shared serialization helpers.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::{parse_rational, rational_from_f64, rational_to_f64, rational_to_text, Rational};

/// Exact rational in JSON: written as a `"p/q"` string, read from such a
/// string or from a JSON number (converted exactly from its binary value).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    pub fn from_f64(v: f64) -> Option<Exact> {
        rational_from_f64(v).map(Exact)
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_text(&self.0))
    }
}

struct ExactVisitor;

impl Visitor<'_> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\" or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
        parse_rational(v).map(Exact).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
        Ok(Exact(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
        Ok(Exact(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
        rational_from_f64(v)
            .map(Exact)
            .ok_or_else(|| E::custom("non-finite number"))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Exact, D::Error> {
        d.deserialize_any(ExactVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_numbers_and_strings() {
        let v: Vec<Exact> = serde_json::from_str(r#"["3/6", 2, 0.5, "-7"]"#).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"["1/2","2","1/2","-7"]"#);
    }
}
