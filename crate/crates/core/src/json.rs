//! JSON encodings of elements, two-form matrices and bisymplectomorphisms.
//!
//! Complex numbers are `[re, im]` pairs; type I coordinates are nested as
//! `p` rows of `q` entries. Doubles are written as shortest round-trip
//! decimals and parsed back bit-exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bisympl::{Bisymplectomorphism, CircleFunction, LinearAutomorphism, RadialPart};
use crate::error::{Error, Result};
use crate::forms::TwoFormMatrix;
use crate::triple::{Element, Family, TripleSystem, C64};

type Pair = [f64; 2];

fn pair(c: &C64) -> Pair {
    [c.re, c.im]
}

fn complex(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn rows(m: &DMatrix<C64>) -> Vec<Vec<Pair>> {
    m.row_iter().map(|r| r.iter().map(pair).collect()).collect()
}

fn matrix(rows: &[Vec<Pair>], shape: (usize, usize), what: &str) -> Result<DMatrix<C64>> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::InvalidShape(format!("{what} must be {}x{}", shape.0, shape.1)));
    }
    Ok(DMatrix::from_fn(shape.0, shape.1, |i, j| complex(&rows[i][j])))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family")]
enum ElementRepr {
    #[serde(rename = "typeI")]
    TypeI { p: usize, q: usize, coords: Vec<Vec<Pair>> },
    #[serde(rename = "polydisc")]
    Polydisc { r: usize, coords: Vec<Pair> },
}

impl From<&Element> for ElementRepr {
    fn from(z: &Element) -> Self {
        match z.system().family() {
            Family::TypeI { p, q } => ElementRepr::TypeI {
                p,
                q,
                coords: rows(&z.to_matrix().expect("type I element")),
            },
            Family::Polydisc { r } => ElementRepr::Polydisc {
                r,
                coords: z.coords().iter().map(pair).collect(),
            },
        }
    }
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        match repr {
            ElementRepr::TypeI { p, q, coords } => {
                let sys = TripleSystem::type_i(p, q)?;
                Element::from_matrix(sys, &matrix(&coords, (p, q), "coords")?)
            }
            ElementRepr::Polydisc { r, coords } => {
                let sys = TripleSystem::polydisc(r)?;
                Element::new(sys, coords.iter().map(complex).collect())
            }
        }
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Element::try_from(ElementRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TwoFormRepr {
    base: Element,
    matrix: Vec<Vec<f64>>,
}

impl Serialize for TwoFormMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TwoFormRepr {
            base: self.base.clone(),
            matrix: self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
        .serialize(s)
    }
}

impl TryFrom<TwoFormRepr> for TwoFormMatrix {
    type Error = Error;

    fn try_from(repr: TwoFormRepr) -> Result<Self> {
        let n = 2 * repr.base.system().dim();
        if repr.matrix.len() != n || repr.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidShape(format!("matrix must be {n}x{n}")));
        }
        if repr.matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TwoFormMatrix {
            base: repr.base,
            matrix: DMatrix::from_fn(n, n, |i, j| repr.matrix[i][j]),
        })
    }
}

impl<'de> Deserialize<'de> for TwoFormMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        TwoFormMatrix::try_from(TwoFormRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family")]
enum AutomorphismRepr {
    #[serde(rename = "typeI")]
    TypeI { u: Vec<Vec<Pair>>, w: Vec<Vec<Pair>> },
    #[serde(rename = "polydisc")]
    Polydisc { perm: Vec<usize>, phases: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RadialRepr {
    Coeffs(Vec<f64>),
    PerComponent(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
struct BisymplRepr {
    k: AutomorphismRepr,
    u: RadialRepr,
}

impl From<&Bisymplectomorphism> for BisymplRepr {
    fn from(phi: &Bisymplectomorphism) -> Self {
        let k = match &phi.k {
            LinearAutomorphism::TypeI { u, w } => AutomorphismRepr::TypeI { u: rows(u), w: rows(w) },
            LinearAutomorphism::Polydisc { perm, phases } => AutomorphismRepr::Polydisc {
                perm: perm.clone(),
                phases: phases.clone(),
            },
        };
        let u = match &phi.u {
            RadialPart::Uniform(u) => RadialRepr::Coeffs(u.coeffs().to_vec()),
            RadialPart::PerComponent(us) => RadialRepr::PerComponent(us.iter().map(|u| u.coeffs().to_vec()).collect()),
        };
        BisymplRepr { k, u }
    }
}

fn square(rows: &[Vec<Pair>], what: &str) -> Result<DMatrix<C64>> {
    matrix(rows, (rows.len(), rows.len()), what)
}

impl TryFrom<BisymplRepr> for Bisymplectomorphism {
    type Error = Error;

    fn try_from(repr: BisymplRepr) -> Result<Self> {
        let k = match repr.k {
            AutomorphismRepr::TypeI { u, w } => LinearAutomorphism::type_i(square(&u, "u")?, square(&w, "w")?)?,
            AutomorphismRepr::Polydisc { perm, phases } => LinearAutomorphism::polydisc(perm, phases)?,
        };
        let u = match repr.u {
            RadialRepr::Coeffs(c) => RadialPart::Uniform(CircleFunction::new(c)?),
            RadialRepr::PerComponent(cs) => {
                RadialPart::PerComponent(cs.into_iter().map(CircleFunction::new).collect::<Result<_>>()?)
            }
        };
        Bisymplectomorphism::new(k, u)
    }
}

impl Serialize for Bisymplectomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BisymplRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bisymplectomorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Bisymplectomorphism::try_from(BisymplRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

pub fn element_from_json(s: &str) -> Result<Element> {
    Ok(serde_json::from_str(s)?)
}

pub fn element_to_json(z: &Element) -> String {
    serde_json::to_string(z).expect("finite element")
}

pub fn two_form_from_json(s: &str) -> Result<TwoFormMatrix> {
    Ok(serde_json::from_str(s)?)
}

pub fn two_form_to_json(m: &TwoFormMatrix) -> String {
    serde_json::to_string(m).expect("finite matrix")
}

pub fn bisympl_from_json(s: &str) -> Result<Bisymplectomorphism> {
    Ok(serde_json::from_str(s)?)
}

pub fn bisympl_to_json(phi: &Bisymplectomorphism) -> String {
    serde_json::to_string(phi).expect("finite map")
}
