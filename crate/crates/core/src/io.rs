//! JSON instance files. Scalars are exact decimal strings `"p/q"` or
//! `{"re": ..., "im": ...}` objects; polynomials are coefficient arrays,
//! lowest degree first.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matpoly::verify_factorization;
use crate::matrix::{FieldTag, Matrix, PolyMatrix, RatMatrix};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::scalar::{fmt_rat, gauss, parse_rat, Gauss, Rat, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Real(String),
    Complex { re: String, im: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Vec<CoeffJson>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

pub fn coeff_to_json(z: &Gauss, field: FieldTag) -> CoeffJson {
    match field {
        FieldTag::Real => CoeffJson::Real(fmt_rat(&z.re)),
        FieldTag::Complex => CoeffJson::Complex {
            re: fmt_rat(&z.re),
            im: fmt_rat(&z.im),
        },
    }
}

pub fn coeff_from_json(c: &CoeffJson) -> Result<Gauss> {
    match c {
        CoeffJson::Real(s) => Ok(gauss(parse_rat(s)?, Rat::zero())),
        CoeffJson::Complex { re, im } => Ok(gauss(parse_rat(re)?, parse_rat(im)?)),
    }
}

pub fn poly_to_json<S: Scalar>(p: &Poly<S>, field: FieldTag) -> Vec<CoeffJson> {
    p.to_gauss().coeffs().iter().map(|c| coeff_to_json(c, field)).collect()
}

pub fn poly_from_json(cs: &[CoeffJson]) -> Result<Poly<Gauss>> {
    Ok(Poly::new(cs.iter().map(coeff_from_json).collect::<Result<_>>()?))
}

fn field_of<S: Scalar>(m: &PolyMatrix<S>) -> FieldTag {
    if m.entries().iter().all(Poly::is_real) {
        FieldTag::Real
    } else {
        FieldTag::Complex
    }
}

pub fn parse_field(s: &str) -> Result<FieldTag> {
    match s {
        "real" => Ok(FieldTag::Real),
        "complex" => Ok(FieldTag::Complex),
        other => Err(Error::Schema(format!("unknown field {other:?}"))),
    }
}

/// Matrix JSON; the field tag is `real` exactly when every entry is real
/// unless `field` forces `complex`.
pub fn matrix_to_json<S: Scalar>(m: &PolyMatrix<S>, field: Option<FieldTag>) -> MatrixJson {
    let field = match (field, field_of(m)) {
        (_, FieldTag::Complex) | (Some(FieldTag::Complex), _) => FieldTag::Complex,
        _ => FieldTag::Real,
    };
    MatrixJson {
        field: field.as_str().to_string(),
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| poly_to_json(m.get(i, j), field)).collect())
            .collect(),
    }
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<(FieldTag, PolyMatrix<Gauss>)> {
    let field = parse_field(&j.field)?;
    if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
        return Err(Error::Schema(format!("entries do not form a {}x{} array", j.rows, j.cols)));
    }
    let mut data = Vec::with_capacity(j.rows * j.cols);
    for row in &j.entries {
        for cs in row {
            if field == FieldTag::Real && cs.iter().any(|c| matches!(c, CoeffJson::Complex { .. })) {
                return Err(Error::Schema("complex coefficient in a real matrix".into()));
            }
            data.push(poly_from_json(cs)?);
        }
    }
    Ok((field, Matrix::new(j.rows, j.cols, data)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFnJson {
    pub num: Vec<CoeffJson>,
    pub den: Vec<CoeffJson>,
}

/// Matrix of rational functions, entries as numerator/denominator pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatMatrixJson {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<RatFnJson>>,
}

pub fn ratmatrix_to_json<S: Scalar>(m: &RatMatrix<S>) -> RatMatrixJson {
    let field = if m.entries().iter().all(|f| f.num().is_real() && f.den().is_real()) {
        FieldTag::Real
    } else {
        FieldTag::Complex
    };
    RatMatrixJson {
        field: field.as_str().to_string(),
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| RatFnJson {
                        num: poly_to_json(m.get(i, j).num(), field),
                        den: poly_to_json(m.get(i, j).den(), field),
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn ratmatrix_from_json(j: &RatMatrixJson) -> Result<RatMatrix<Gauss>> {
    if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
        return Err(Error::Schema(format!("entries do not form a {}x{} array", j.rows, j.cols)));
    }
    let mut data = Vec::with_capacity(j.rows * j.cols);
    for row in &j.entries {
        for f in row {
            let den = poly_from_json(&f.den)?;
            if den.is_zero() {
                return Err(Error::Schema("zero denominator".into()));
            }
            data.push(RatFn::new(poly_from_json(&f.num)?, den));
        }
    }
    Ok(Matrix::new(j.rows, j.cols, data))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<Vec<CoeffJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub schema_version: u32,
    pub mode: Mode,
    pub field: String,
    pub matrix: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthJson>,
}

/// Planted data shipped with generated instances.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub family: Option<String>,
    pub seed: Option<u64>,
    pub factorization: Option<PolyMatrix<Gauss>>,
    /// Representatives `g` with `g* g = det M`, one per planted class.
    pub classes: Vec<Poly<Gauss>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub mode: Mode,
    pub field: FieldTag,
    pub matrix: PolyMatrix<Gauss>,
    pub ground_truth: Option<GroundTruth>,
}

impl InstanceFile {
    pub fn new(field: FieldTag, matrix: PolyMatrix<Gauss>) -> Self {
        InstanceFile {
            mode: Mode::Exact,
            field,
            matrix,
            ground_truth: None,
        }
    }

    /// The payload over the rationals, for real instances.
    pub fn real_matrix(&self) -> Result<PolyMatrix<Rat>> {
        self.matrix.to_rat().ok_or(Error::NonRealInput)
    }

    fn validate(&self) -> Result<()> {
        if !self.matrix.is_square() {
            return Err(Error::NotSquare);
        }
        if !self.matrix.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        if self.field == FieldTag::Real && !self.matrix.is_real() {
            return Err(Error::Schema("complex payload in a real instance".into()));
        }
        if let Some(q) = self.ground_truth.as_ref().and_then(|g| g.factorization.as_ref()) {
            if !verify_factorization(q, &self.matrix)?.verified {
                return Err(Error::Schema("ground-truth factorization does not verify".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> InstanceJson {
        InstanceJson {
            schema_version: SCHEMA_VERSION,
            mode: self.mode,
            field: self.field.as_str().to_string(),
            matrix: matrix_to_json(&self.matrix, Some(self.field)),
            ground_truth: self.ground_truth.as_ref().map(|g| GroundTruthJson {
                family: g.family.clone(),
                seed: g.seed,
                factorization: g.factorization.as_ref().map(|q| matrix_to_json(q, Some(self.field))),
                classes: g.classes.iter().map(|p| poly_to_json(p, FieldTag::Complex)).collect(),
            }),
        }
    }

    pub fn from_json(j: &InstanceJson) -> Result<Self> {
        if j.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                j.schema_version
            )));
        }
        let field = parse_field(&j.field)?;
        let (mfield, matrix) = matrix_from_json(&j.matrix)?;
        if mfield != field {
            return Err(Error::Schema("matrix field differs from instance field".into()));
        }
        let ground_truth = match &j.ground_truth {
            None => None,
            Some(g) => Some(GroundTruth {
                family: g.family.clone(),
                seed: g.seed,
                factorization: g.factorization.as_ref().map(|q| matrix_from_json(q).map(|x| x.1)).transpose()?,
                classes: g.classes.iter().map(|p| poly_from_json(p)).collect::<Result<_>>()?,
            }),
        };
        let inst = InstanceFile {
            mode: j.mode,
            field,
            matrix,
            ground_truth,
        };
        inst.validate()?;
        Ok(inst)
    }
}

pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile> {
    let j: InstanceJson = serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))?;
    InstanceFile::from_json(&j)
}

/// Pretty JSON with a trailing newline; deterministic for equal input.
pub fn serialize_instance(inst: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(&inst.to_json()).expect("serializable");
    s.push('\n');
    s
}
