//! JSON (de)serialization of `f64` fields that may legitimately be infinite.
//! Plain serde_json turns non-finite floats into `null`; divergences and
//! epsilon bounds instead use the explicit strings "inf" / "-inf".

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else if *v == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        Err(serde::ser::Error::custom("NaN is not serializable"))
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match serde_json::Value::deserialize(d)? {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| D::Error::custom("expected a float")),
        serde_json::Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            other => Err(D::Error::custom(format!("bad float string '{other}'"))),
        },
        _ => Err(D::Error::custom("expected a float or \"inf\"/\"-inf\"")),
    }
}

#[cfg(test)]
mod tests {
    #[derive(serde::Serialize, serde::Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "super")]
        v: f64,
    }

    #[test]
    fn infinities_round_trip_explicitly() {
        let j = serde_json::to_string(&Holder { v: f64::INFINITY }).unwrap();
        assert_eq!(j, r#"{"v":"inf"}"#);
        let back: Holder = serde_json::from_str(&j).unwrap();
        assert_eq!(back.v, f64::INFINITY);
        let j = serde_json::to_string(&Holder { v: 2.5 }).unwrap();
        assert_eq!(j, r#"{"v":2.5}"#);
    }
}
