//! The JSON parameters file: field moduli, scheme sizes, how the code was
//! built and the public generator G.
//!
//! Field elements are written as packed values (base-q digits are the
//! polynomial-basis coordinates).

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, LinearCode};
use crate::ec::{AgCodeSpec, EcError, EcPoint, EllipticCurve};
use crate::field::{prime_power, BaseField, ExtField, FieldElement, FieldError};
use crate::linalg::{LinalgError, Matrix};
use crate::scheme::{PublicParams, SchemeError};

pub const FORMAT: &str = "subtag-params/1";
pub const ISOMORPHISM: &str = "polynomial-basis-little-endian";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("unsupported format {0:?}")]
    Format(String),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("stored generator does not match the code description")]
    GeneratorMismatch,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Ec(#[from] EcError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub base_modulus: Vec<u32>,
    pub l: u32,
    pub ext_modulus: Vec<u32>,
    pub isomorphism: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

/// How the code was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CodeSpec {
    /// Evaluations of polynomials of degree < kdim at the points.
    ReedSolomon { points: Vec<u32>, kdim: usize },
    /// The residue code of an elliptic curve `y^2 = x^3 + a x + b`.
    Ec {
        a: u32,
        b: u32,
        points: Vec<[u32; 2]>,
        deg: usize,
    },
    /// Only the stored generator.
    Generator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub format: String,
    pub field: FieldSpec,
    pub scheme: SchemeSpec,
    pub code: CodeSpec,
    pub generator: Vec<Vec<u32>>,
}

/// A parsed parameters file.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub params: PublicParams,
    pub ec: Option<AgCodeSpec>,
    pub spec: CodeSpec,
}

/// The field F_{q^l} with canonical moduli.
pub fn canonical_field(q: u32, l: u32) -> Result<ExtField, ParamsError> {
    let (p, m) = prime_power(q).ok_or(ParamsError::NotPrimePower(q))?;
    Ok(ExtField::new(BaseField::new(p, m)?, l)?)
}

fn element(f: &ExtField, v: u32) -> Result<FieldElement, ParamsError> {
    Ok(f.element(v as u64)?)
}

/// Builds the evaluation-point spec for a curve, using the first `v` affine
/// points in enumeration order unless points are given.
pub fn ec_spec(f: &ExtField, a: u32, b: u32, points: Option<&[[u32; 2]]>, v: usize, deg: usize) -> Result<AgCodeSpec, ParamsError> {
    let curve = EllipticCurve::new(f, element(f, a)?, element(f, b)?)?;
    let pts: Vec<EcPoint> = match points {
        Some(list) => list
            .iter()
            .map(|&[x, y]| {
                Ok(EcPoint::Affine {
                    x: element(f, x)?,
                    y: element(f, y)?,
                })
            })
            .collect::<Result<_, ParamsError>>()?,
        None => {
            let all: Vec<EcPoint> = curve.points()?.into_iter().filter(|p| !p.is_infinity()).collect();
            if all.len() < v {
                return Err(ParamsError::Invalid(format!(
                    "curve has only {} affine points, {v} requested",
                    all.len()
                )));
            }
            all[..v].to_vec()
        }
    };
    Ok(AgCodeSpec::new(curve, pts, deg)?)
}

/// The code described by `spec`, or `None` for a bare generator.
fn rebuild(f: &ExtField, spec: &CodeSpec) -> Result<(Option<LinearCode>, Option<AgCodeSpec>), ParamsError> {
    Ok(match spec {
        CodeSpec::ReedSolomon { points, kdim } => {
            let pts = points.iter().map(|&x| element(f, x)).collect::<Result<Vec<_>, _>>()?;
            (Some(LinearCode::reed_solomon(f, &pts, *kdim)?), None)
        }
        CodeSpec::Ec { a, b, points, deg } => {
            let s = ec_spec(f, *a, *b, Some(points), points.len(), *deg)?;
            (Some(s.residue_code()?), Some(s))
        }
        CodeSpec::Generator => (None, None),
    })
}

fn point_values(p: &EcPoint) -> [u32; 2] {
    match *p {
        EcPoint::Affine { x, y } => [x.value(), y.value()],
        EcPoint::Infinity => unreachable!("evaluation sets exclude O"),
    }
}

impl CodeSpec {
    pub fn from_ec(spec: &AgCodeSpec) -> Self {
        CodeSpec::Ec {
            a: spec.curve().a().value(),
            b: spec.curve().b().value(),
            points: spec.points().iter().map(point_values).collect(),
            deg: spec.degree(),
        }
    }
}

impl ParamsFile {
    pub fn new(pp: &PublicParams, code: CodeSpec) -> Self {
        let f = pp.ext();
        let g = pp.code().generator();
        ParamsFile {
            format: FORMAT.into(),
            field: FieldSpec {
                p: f.base().characteristic(),
                m: f.base().degree(),
                base_modulus: f.base().modulus().to_vec(),
                l: f.degree(),
                ext_modulus: f.modulus().to_vec(),
                isomorphism: ISOMORPHISM.into(),
            },
            scheme: SchemeSpec { n: pp.n(), m: pp.m() },
            code,
            generator: g.row_vecs().iter().map(|r| r.iter().map(|e| e.value()).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, ParamsError> {
        serde_json::from_str(text).map_err(|e| ParamsError::Json(e.to_string()))
    }

    /// Rebuilds the fields from the stored moduli, checks the generator
    /// against the code description and validates the parameters.
    pub fn load(&self) -> Result<Loaded, ParamsError> {
        if self.format != FORMAT {
            return Err(ParamsError::Format(self.format.clone()));
        }
        if self.field.isomorphism != ISOMORPHISM {
            return Err(ParamsError::Format(self.field.isomorphism.clone()));
        }
        let base = BaseField::with_modulus(self.field.p, self.field.base_modulus.clone())?;
        if base.degree() != self.field.m {
            return Err(ParamsError::Invalid("base modulus degree differs from m".into()));
        }
        let f = ExtField::with_modulus(base, self.field.ext_modulus.clone())?;
        if f.degree() != self.field.l {
            return Err(ParamsError::Invalid("extension modulus degree differs from l".into()));
        }
        let cols = self.generator.first().map_or(0, Vec::len);
        let rows = self
            .generator
            .iter()
            .map(|r| r.iter().map(|&v| element(&f, v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let stored = LinearCode::from_generator(Matrix::from_rows(&f, cols, rows)?)?;
        let (expected, ec) = rebuild(&f, &self.code)?;
        if expected.is_some_and(|c| c != stored) {
            return Err(ParamsError::GeneratorMismatch);
        }
        let params = PublicParams::new(&f, self.scheme.n, self.scheme.m, stored)?;
        Ok(Loaded {
            params,
            ec,
            spec: self.code.clone(),
        })
    }
}
