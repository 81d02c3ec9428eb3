//! JSON documents for matroids and polynomials.
//!
//! Matroids are `{"ground_set": [..], "bases": [[..], ..]}` or the same with
//! `"flats"`. Polynomials are `{"degree": d, "terms": [..]}`, each term a
//! reduced `"p/q"` coefficient and an exponent object keyed by comma-joined
//! labels such as `"1,4"`. Terms are emitted highest first in graded-lex
//! order, exponents in variable order.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::mixedvol::{Method, Provenance, VolPolynomial};
use crate::poly::{Monomial, Rational, RationalPoly, VarId};
use crate::set::ElementSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatroidDocument {
    pub ground_set: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flats: Option<Vec<Vec<u32>>>,
}

impl MatroidDocument {
    /// Bases form, in canonical order.
    pub fn from_matroid(m: &Matroid) -> Self {
        MatroidDocument {
            ground_set: m.elements(),
            bases: Some(m.basis_lists()),
            flats: None,
        }
    }

    /// Flats form, every flat of the lattice in canonical order.
    pub fn flats_of(m: &Matroid) -> Result<Self> {
        Ok(MatroidDocument {
            ground_set: m.elements(),
            bases: None,
            flats: Some(m.lattice()?.flats().iter().map(|f| f.to_vec()).collect()),
        })
    }

    pub fn to_matroid(&self) -> Result<Matroid> {
        match (&self.bases, &self.flats) {
            (Some(b), None) => Matroid::from_bases(&self.ground_set, b),
            (None, Some(f)) => Matroid::from_flats(&self.ground_set, f),
            _ => Err(Error::Document("give exactly one of \"bases\" or \"flats\"".into())),
        }
    }
}

pub fn parse_matroid(json: &str) -> Result<Matroid> {
    serde_json::from_str::<MatroidDocument>(json)?.to_matroid()
}

pub fn matroid_to_json(m: &Matroid) -> String {
    serde_json::to_string(&MatroidDocument::from_matroid(m)).expect("serializable")
}

/// Exponents of one term, kept in variable order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponents(pub Vec<(VarId, u32)>);

impl Serialize for Exponents {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (v, e) in &self.0 {
            map.serialize_entry(&v.0.to_string(), e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Exponents {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Exponents;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object from flat labels to exponents")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<Exponents, A::Error> {
                let mut out = Vec::new();
                while let Some((k, e)) = a.next_entry::<String, u32>()? {
                    let set: ElementSet = k.parse().map_err(serde::de::Error::custom)?;
                    if set.is_empty() {
                        return Err(serde::de::Error::custom("empty variable label"));
                    }
                    out.push((VarId(set), e));
                }
                Ok(Exponents(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub coeff: String,
    pub exponents: Exponents,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDocument {
    pub degree: usize,
    pub terms: Vec<TermDocument>,
}

fn rational_string(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Document(format!("bad coefficient {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == num_bigint::BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl PolyDocument {
    pub fn new(poly: &RationalPoly, degree: usize) -> Self {
        let terms = poly
            .terms()
            .rev()
            .map(|(m, c)| TermDocument {
                coeff: rational_string(c),
                exponents: Exponents(m.pairs().to_vec()),
            })
            .collect();
        PolyDocument { degree, terms }
    }

    /// The polynomial, checked to be homogeneous of the stated degree.
    /// Repeated monomials are summed.
    pub fn to_poly(&self) -> Result<RationalPoly> {
        let mut p = RationalPoly::zero();
        for t in &self.terms {
            if t.exponents.0.iter().any(|(_, e)| *e == 0) {
                return Err(Error::Document("zero exponent".into()));
            }
            let m = Monomial::from_pairs(t.exponents.0.iter().copied());
            p.add_term(m, parse_rational(&t.coeff)?);
        }
        if !p.is_homogeneous(self.degree) {
            return Err(Error::WrongDegree {
                expected: self.degree,
                found: p.degree().unwrap_or(0),
            });
        }
        Ok(p)
    }
}

pub fn poly_to_json(poly: &RationalPoly, degree: usize, pretty: bool) -> String {
    let doc = PolyDocument::new(poly, degree);
    if pretty {
        serde_json::to_string_pretty(&doc).expect("serializable")
    } else {
        serde_json::to_string(&doc).expect("serializable")
    }
}

pub fn vol_to_json(vol: &VolPolynomial, pretty: bool) -> String {
    poly_to_json(&vol.poly, vol.degree, pretty)
}

/// Parses a polynomial document; returns the polynomial and its degree.
pub fn parse_poly(json: &str) -> Result<(RationalPoly, usize)> {
    let doc: PolyDocument = serde_json::from_str(json)?;
    Ok((doc.to_poly()?, doc.degree))
}

/// A polynomial document as a volume over its own variables.
pub fn parse_vol(json: &str) -> Result<VolPolynomial> {
    let (poly, degree) = parse_poly(json)?;
    let universe = poly.variables();
    VolPolynomial::new(poly, degree, universe, Provenance::new(Method::Input, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixedvol::deletion_volume;
    use crate::poly::{int, q};

    const PLANE: &str = r#"{"ground_set":[1,2,3,4],"bases":[[1,2,4],[1,3,4],[2,3,4]]}"#;

    #[test]
    fn matroid_documents() {
        let m = parse_matroid(PLANE).unwrap();
        assert_eq!(matroid_to_json(&m), PLANE);
        let flats = MatroidDocument::flats_of(&m).unwrap();
        let json = serde_json::to_string(&flats).unwrap();
        assert!(json.starts_with(r#"{"ground_set":[1,2,3,4],"flats":[[],[1],"#));
        assert_eq!(parse_matroid(&json).unwrap(), m);

        let loopy = r#"{"ground_set":[1,2,3],"bases":[[1,2]]}"#;
        assert!(matches!(parse_matroid(loopy), Err(Error::Loop(3))));
        let both = r#"{"ground_set":[1],"bases":[[1]],"flats":[[],[1]]}"#;
        assert!(matches!(parse_matroid(both), Err(Error::Document(_))));
        assert!(matches!(parse_matroid(r#"{"ground_set":[1]}"#), Err(Error::Document(_))));
        assert!(matches!(parse_matroid(r#"{"ground":[1]}"#), Err(Error::Json(_))));
    }

    #[test]
    fn poly_documents() {
        let x = |l: &[u32]| RationalPoly::var(VarId::of(l));
        let p = &x(&[4]).pow(2).scale(&q(-1, 2)) + &(&x(&[4]) * &x(&[1, 4]));
        let json = poly_to_json(&p, 2, false);
        assert_eq!(
            json,
            r#"{"degree":2,"terms":[{"coeff":"-1/2","exponents":{"4":2}},{"coeff":"1","exponents":{"4":1,"1,4":1}}]}"#
        );
        assert_eq!(parse_poly(&json).unwrap(), (p.clone(), 2));

        let unreduced = r#"{"degree":1,"terms":[{"coeff":"2/4","exponents":{"1":1}},{"coeff":"3/-6","exponents":{"1":1}}]}"#;
        assert!(parse_poly(unreduced).unwrap().0.is_zero());
        let wrong = r#"{"degree":2,"terms":[{"coeff":"1","exponents":{"1":1}}]}"#;
        assert!(matches!(parse_poly(wrong), Err(Error::WrongDegree { .. })));
        let bad = r#"{"degree":1,"terms":[{"coeff":"1/0","exponents":{"1":1}}]}"#;
        assert!(matches!(parse_poly(bad), Err(Error::Document(_))));
        let one = poly_to_json(&RationalPoly::one(), 0, false);
        assert_eq!(one, r#"{"degree":0,"terms":[{"coeff":"1","exponents":{}}]}"#);
        assert_eq!(parse_poly(&one).unwrap().0.coefficient(&Monomial::one()), int(1));
    }

    #[test]
    fn volume_round_trip() {
        let vol = deletion_volume(&parse_matroid(PLANE).unwrap()).unwrap();
        let back = parse_vol(&vol_to_json(&vol, true)).unwrap();
        assert_eq!(back, vol);
        assert_eq!(vol_to_json(&back, false), vol_to_json(&vol, false));
    }
}
