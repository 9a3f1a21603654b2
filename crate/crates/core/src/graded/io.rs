//! JSON-shaped documents for graded objects.
//!
//! Grades and interval endpoints are stored as exact decimal strings (or
//! `"p/q"` for rationals without a terminating expansion), so a round trip
//! through a document never perturbs a grade.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "epsilon": "0.0625",
//!   "kappa_total": "0",
//!   "prime":  { "space": [{"label": "a", "grade": "0"}], "d": {"order": ..., "entries": []} },
//!   "middle": ...,
//!   "double_prime": ...,
//!   "b": { "order": {"lo": "0", "hi": "inf", "lo_closed": true, "hi_closed": false},
//!          "entries": [["alpha", "a"]] },
//!   "c": ..., "h": ...
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::scalar::Grade;

use super::{
    Bound, DifferentialSpace, ExactTriple, GradedError, GradedSpace, OrderInterval, OrderMap,
};

pub const SCHEMA_VERSION: u32 = 1;

fn doc_err(msg: impl Into<String>) -> GradedError {
    GradedError::Document(msg.into())
}

fn parse_grade<G: Grade>(s: &str) -> Result<G, GradedError> {
    G::parse_exact(s).map_err(|e| doc_err(format!("grade {s:?}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub label: String,
    pub grade: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedSpaceDoc(pub Vec<GeneratorDoc>);

impl GradedSpaceDoc {
    pub fn from_space<G: Grade>(space: &GradedSpace<G>) -> Self {
        GradedSpaceDoc(
            space
                .iter()
                .map(|(l, g)| GeneratorDoc {
                    label: l.to_string(),
                    grade: g.to_exact_string(),
                })
                .collect(),
        )
    }

    pub fn to_space<G: Grade>(&self) -> Result<GradedSpace<G>, GradedError> {
        let gens = self
            .0
            .iter()
            .map(|g| Ok((g.label.clone(), parse_grade::<G>(&g.grade)?)))
            .collect::<Result<Vec<_>, GradedError>>()?;
        GradedSpace::new(gens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub lo: String,
    pub hi: String,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl IntervalDoc {
    pub fn from_interval<G: Grade>(i: &OrderInterval<G>) -> Self {
        let end = |b: Bound<G>| match b {
            Bound::NegInf => "-inf".to_string(),
            Bound::PosInf => "inf".to_string(),
            Bound::Finite(g) => g.to_exact_string(),
        };
        IntervalDoc {
            lo: end(i.lo()),
            hi: end(i.hi()),
            lo_closed: i.lo_closed(),
            hi_closed: i.hi_closed(),
        }
    }

    pub fn to_interval<G: Grade>(&self) -> Result<OrderInterval<G>, GradedError> {
        let end = |s: &str| -> Result<Bound<G>, GradedError> {
            Ok(match s {
                "-inf" => Bound::NegInf,
                "inf" | "+inf" => Bound::PosInf,
                _ => Bound::Finite(parse_grade(s)?),
            })
        };
        OrderInterval::new(
            end(&self.lo)?,
            end(&self.hi)?,
            self.lo_closed,
            self.hi_closed,
        )
    }
}

/// Entries and declared order of a map whose spaces are given elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    pub order: IntervalDoc,
    /// `(dst_label, src_label)` pairs.
    pub entries: Vec<(String, String)>,
}

impl MapDoc {
    pub fn from_map<G: Grade>(f: &OrderMap<G>) -> Self {
        MapDoc {
            order: IntervalDoc::from_interval(f.declared()),
            entries: f
                .labelled_entries()
                .map(|(d, s)| (d.to_string(), s.to_string()))
                .collect(),
        }
    }

    pub fn to_map<G: Grade>(
        &self,
        src: &GradedSpace<G>,
        dst: &GradedSpace<G>,
    ) -> Result<OrderMap<G>, GradedError> {
        OrderMap::new(
            src.clone(),
            dst.clone(),
            self.entries.iter().map(|(d, s)| (d.as_str(), s.as_str())),
            self.order.to_interval()?,
        )
    }
}

/// A self-contained map document, spaces included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderMapDoc {
    pub src: GradedSpaceDoc,
    pub dst: GradedSpaceDoc,
    #[serde(flatten)]
    pub map: MapDoc,
}

impl OrderMapDoc {
    pub fn from_map<G: Grade>(f: &OrderMap<G>) -> Self {
        OrderMapDoc {
            src: GradedSpaceDoc::from_space(f.src()),
            dst: GradedSpaceDoc::from_space(f.dst()),
            map: MapDoc::from_map(f),
        }
    }

    pub fn to_map<G: Grade>(&self) -> Result<OrderMap<G>, GradedError> {
        self.map
            .to_map(&self.src.to_space()?, &self.dst.to_space()?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub space: GradedSpaceDoc,
    pub d: MapDoc,
}

impl ComplexDoc {
    pub fn from_complex<G: Grade>(c: &DifferentialSpace<G>) -> Self {
        ComplexDoc {
            space: GradedSpaceDoc::from_space(c.space()),
            d: MapDoc::from_map(c.d()),
        }
    }

    pub fn to_complex<G: Grade>(&self) -> Result<DifferentialSpace<G>, GradedError> {
        let space = self.space.to_space()?;
        let d = self.d.to_map(&space, &space)?;
        DifferentialSpace::new(space, d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactTripleDoc {
    pub schema: u32,
    pub epsilon: String,
    pub kappa_total: String,
    pub prime: ComplexDoc,
    pub middle: ComplexDoc,
    pub double_prime: ComplexDoc,
    pub b: MapDoc,
    pub c: MapDoc,
    pub h: MapDoc,
}

impl ExactTripleDoc {
    pub fn from_triple<G: Grade>(t: &ExactTriple<G>) -> Self {
        ExactTripleDoc {
            schema: SCHEMA_VERSION,
            epsilon: t.epsilon().to_exact_string(),
            kappa_total: t.kappa_total().to_exact_string(),
            prime: ComplexDoc::from_complex(t.prime()),
            middle: ComplexDoc::from_complex(t.middle()),
            double_prime: ComplexDoc::from_complex(t.double_prime()),
            b: MapDoc::from_map(t.b()),
            c: MapDoc::from_map(t.c()),
            h: MapDoc::from_map(t.h()),
        }
    }

    pub fn to_triple<G: Grade>(&self) -> Result<ExactTriple<G>, GradedError> {
        if self.schema != SCHEMA_VERSION {
            return Err(doc_err(format!(
                "schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let prime = self.prime.to_complex::<G>()?;
        let middle = self.middle.to_complex::<G>()?;
        let double_prime = self.double_prime.to_complex::<G>()?;
        let b = self.b.to_map(prime.space(), middle.space())?;
        let c = self.c.to_map(middle.space(), double_prime.space())?;
        let h = self.h.to_map(prime.space(), double_prime.space())?;
        let epsilon = parse_grade(&self.epsilon)?;
        let kappa_total = parse_grade(&self.kappa_total)?;
        ExactTriple::new(prime, middle, double_prime, b, c, h, epsilon, kappa_total).map_err(|e| {
            match e {
                super::TripleError::Graded(g) => g,
                other => doc_err(other.to_string()),
            }
        })
    }
}

impl<G: Grade> Serialize for GradedSpace<G> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GradedSpaceDoc::from_space(self).serialize(s)
    }
}

impl<'de, G: Grade> Deserialize<'de> for GradedSpace<G> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        GradedSpaceDoc::deserialize(d)?
            .to_space()
            .map_err(serde::de::Error::custom)
    }
}

impl<G: Grade> Serialize for OrderInterval<G> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalDoc::from_interval(self).serialize(s)
    }
}

impl<'de, G: Grade> Deserialize<'de> for OrderInterval<G> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        IntervalDoc::deserialize(d)?
            .to_interval()
            .map_err(serde::de::Error::custom)
    }
}

impl<G: Grade> Serialize for OrderMap<G> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OrderMapDoc::from_map(self).serialize(s)
    }
}

impl<'de, G: Grade> Deserialize<'de> for OrderMap<G> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        OrderMapDoc::deserialize(d)?
            .to_map()
            .map_err(serde::de::Error::custom)
    }
}

impl<G: Grade> Serialize for ExactTriple<G> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExactTripleDoc::from_triple(self).serialize(s)
    }
}

impl<'de, G: Grade> Deserialize<'de> for ExactTriple<G> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ExactTripleDoc::deserialize(d)?
            .to_triple()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use num_rational::Rational64;

    use super::*;

    #[test]
    fn interval_round_trip() {
        let i = OrderInterval::<f64>::at_least(0.0625);
        let json = serde_json::to_string(&i).unwrap();
        assert_eq!(
            json,
            r#"{"lo":"0.0625","hi":"inf","lo_closed":true,"hi_closed":false}"#
        );
        let back: OrderInterval<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn map_round_trip_rational() {
        let src = GradedSpace::new([("a", Rational64::new(1, 3))]).unwrap();
        let dst = GradedSpace::new([("x", Rational64::new(5, 1024))]).unwrap();
        let f = OrderMap::new(src, dst, [("x", "a")], OrderInterval::everything()).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"1/3\""));
        let back: OrderMap<Rational64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = r#"[{"label":"a","grade":"zero"}]"#;
        assert!(serde_json::from_str::<GradedSpace<f64>>(bad).is_err());
        let dup = r#"[{"label":"a","grade":"0"},{"label":"a","grade":"1"}]"#;
        assert!(serde_json::from_str::<GradedSpace<f64>>(dup).is_err());
    }
}
