use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::simulate::McEstimate;

/// One plotted abscissa: a Monte Carlo estimate, a deterministic value,
/// or both, next to the bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub series: String,
    #[serde(with = "real")]
    pub x: f64,
    pub mc: Option<McEstimate>,
    #[serde(with = "real_opt", default)]
    pub value: Option<f64>,
    #[serde(with = "real_opt", default)]
    pub bound: Option<f64>,
}

impl Point {
    pub fn new(series: impl Into<String>, x: f64) -> Self {
        Self {
            series: series.into(),
            x,
            mc: None,
            value: None,
            bound: None,
        }
    }

    pub fn mc(mut self, e: McEstimate) -> Self {
        self.mc = Some(e);
        self
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub kind: String,
    pub seed: u64,
    pub reps: u64,
    pub points: Vec<Point>,
    #[serde(with = "real_map")]
    pub values: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    /// Excluded from determinism checks.
    pub wall_time_ms: u64,
    pub version: String,
}

impl ResultRecord {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub(crate) fn check_le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.assertions.push(Assertion {
            name: name.into(),
            lhs,
            rhs,
            passed: lhs <= rhs,
        });
    }

    pub(crate) fn set(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }
}

/// Non-finite floats are written as the strings `"inf"`, `"-inf"` and
/// `"nan"` so records survive JSON.
mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Text(String),
    }

    pub(super) fn to_f64(r: Repr) -> Result<f64, String> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(format!("not a number: {other}")),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        to_f64(Repr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

mod real_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize)]
    struct W<'a>(#[serde(with = "super::real")] &'a f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<super::real::Repr>::deserialize(d)?
            .map(super::real::to_f64)
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

mod real_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize)]
    struct W<'a>(#[serde(with = "super::real")] &'a f64);

    pub fn serialize<S: Serializer>(v: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|(k, x)| (k, W(x))).collect::<BTreeMap<_, _>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        BTreeMap::<String, super::real::Repr>::deserialize(d)?
            .into_iter()
            .map(|(k, r)| super::real::to_f64(r).map(|v| (k, v)))
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }
}
