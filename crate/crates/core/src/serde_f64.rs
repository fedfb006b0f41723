//! `f64` fields that may be infinite, written as `"inf"` / `"-inf"` since
//! JSON has no literal for them.

use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Text(String),
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) => match t.as_str() {
            "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
            "-inf" | "-infinity" | "-∞" => Ok(f64::NEG_INFINITY),
            _ => Err(serde::de::Error::custom(format!("invalid number `{t}`"))),
        },
    }
}
