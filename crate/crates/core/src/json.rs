//! JSON wire formats.
//!
//! ```text
//! point      {"b": 2, "stem": [0, 1], "tail": 1}
//! interval   {"lo": point, "hi": point}
//! tuple      {"b": 2, "depth": 2, "entries": [point, ...]}
//! filtering  {"b": 2, "depth": 2, "boundaries": [[point], [point, point, point]]}
//! surjection {"kind": "filtering", "b", "depth", "boundaries"}
//!          | {"kind": "identity", "b"}
//!          | {"kind": "chain", "outer": surjection, "inner": surjection}
//! ```
//!
//! Stems ending in the tail digit are accepted and shortened;
//! [`PointRepr::to_point_reporting`] tells callers when that happened.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cantor::Point;
use crate::error::{Error, Result};
use crate::intervals::{BoundaryTuple, ClopenInterval, Filtering};
use crate::surjections::{compose, Surjection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRepr {
    pub b: u32,
    pub stem: Vec<u32>,
    pub tail: u32,
}

impl PointRepr {
    /// The point, and whether the stem was not in canonical form.
    pub fn to_point_reporting(&self) -> Result<(Point, bool)> {
        let base = crate::cantor::check_base(self.b)?;
        let digit = |d: u32| {
            if d < self.b {
                Ok(d as u8)
            } else {
                Err(Error::DigitOutOfRange { digit: d, base })
            }
        };
        let stem = self.stem.iter().map(|&d| digit(d)).collect::<Result<Vec<_>>>()?;
        Point::new_reporting(base, stem, digit(self.tail)?)
    }
}

impl From<&Point> for PointRepr {
    fn from(p: &Point) -> Self {
        PointRepr {
            b: p.base() as u32,
            stem: p.stem().iter().map(|&d| d as u32).collect(),
            tail: p.tail() as u32,
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PointRepr::deserialize(d)?;
        repr.to_point_reporting().map(|(p, _)| p).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Point,
    hi: Point,
}

impl Serialize for ClopenInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo().clone(),
            hi: self.hi().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClopenInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        ClopenInterval::new(r.lo, r.hi).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    b: u32,
    depth: u32,
    entries: Vec<Point>,
}

impl Serialize for BoundaryTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TupleRepr {
            b: self.base() as u32,
            depth: self.depth(),
            entries: self.entries().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TupleRepr::deserialize(d)?;
        let base = crate::cantor::check_base(r.b).map_err(D::Error::custom)?;
        BoundaryTuple::new(base, r.depth, r.entries).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct FilteringRepr {
    b: u32,
    depth: u32,
    boundaries: Vec<Vec<Point>>,
}

impl FilteringRepr {
    fn build(self) -> Result<Filtering> {
        let base = crate::cantor::check_base(self.b)?;
        if self.depth as usize != self.boundaries.len() {
            return Err(Error::InvalidArgument(format!(
                "depth {} but {} boundary levels",
                self.depth,
                self.boundaries.len()
            )));
        }
        Filtering::new(base, self.boundaries)
    }
}

impl From<&Filtering> for FilteringRepr {
    fn from(f: &Filtering) -> Self {
        FilteringRepr {
            b: f.base() as u32,
            depth: f.support_depth(),
            boundaries: f.levels().to_vec(),
        }
    }
}

impl Serialize for Filtering {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FilteringRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Filtering {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FilteringRepr::deserialize(d)?.build().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SurjectionRepr {
    Identity {
        b: u32,
    },
    Filtering(FilteringRepr),
    Chain {
        outer: Box<SurjectionRepr>,
        inner: Box<SurjectionRepr>,
    },
}

impl SurjectionRepr {
    fn of(f: &Surjection) -> Self {
        match (f.as_filtering(), f.as_chain()) {
            (Some(filtering), _) if filtering.support_depth() == 0 => SurjectionRepr::Identity { b: f.base() as u32 },
            (Some(filtering), _) => SurjectionRepr::Filtering(filtering.into()),
            (None, Some((outer, inner))) => SurjectionRepr::Chain {
                outer: Box::new(Self::of(outer)),
                inner: Box::new(Self::of(inner)),
            },
            (None, None) => unreachable!("a surjection is a filtering or a chain"),
        }
    }

    fn build(self) -> Result<Surjection> {
        match self {
            SurjectionRepr::Identity { b } => Ok(Surjection::identity(crate::cantor::check_base(b)?)),
            SurjectionRepr::Filtering(f) => Surjection::from_filtering(f.build()?),
            SurjectionRepr::Chain { outer, inner } => compose(&outer.build()?, &inner.build()?),
        }
    }
}

impl Serialize for Surjection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SurjectionRepr::of(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Surjection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SurjectionRepr::deserialize(d)?.build().map_err(D::Error::custom)
    }
}

/// Collects every point in a JSON document whose stem was not canonical,
/// as `(json pointer, point)` pairs.
pub fn noncanonical_points(value: &serde_json::Value) -> Vec<(String, Point)> {
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

fn walk(value: &serde_json::Value, path: String, out: &mut Vec<(String, Point)>) {
    match value {
        serde_json::Value::Object(map) => {
            if let Ok(repr) = serde_json::from_value::<PointRepr>(value.clone()) {
                if let Ok((p, true)) = repr.to_point_reporting() {
                    out.push((path.clone(), p));
                }
            }
            for (k, v) in map {
                walk(v, format!("{path}/{k}"), out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(v, format!("{path}/{i}"), out);
            }
        }
        _ => {}
    }
}
