//! Input file schema and conversion into operators.

use std::path::Path;

use biunitary::group::{model_i, model_ii};
use biunitary::{Error, GaussRational, Matrix, Result, Scalar, TwistQ, VertexOperator};
use num_complex::Complex64;
use serde::Deserialize;

/// One scalar: `"p/q+r/si"` in exact files, `[re, im]` in approximate ones.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RawScalar {
    Text(String),
    Pair([f64; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupModel {
    I,
    Ii,
}

/// Generators `g_1 … g_r`, each `dim × dim`, row-major.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    pub model: GroupModel,
    pub dim: usize,
    pub generators: Vec<Vec<RawScalar>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub scalar: ScalarKind,
    #[serde(default)]
    pub entries: Vec<RawScalar>,
    pub twist: Option<Vec<RawScalar>>,
    pub group: Option<GroupBlock>,
}

/// Operator plus optional twist, in one arithmetic.
pub struct Model<S: Scalar> {
    pub u: VertexOperator<S>,
    pub twist: Option<TwistQ<S>>,
    pub group: Option<(GroupModel, Vec<Matrix<S>>)>,
}

pub enum Loaded {
    Exact(Model<GaussRational>),
    Approx(Model<Complex64>),
}

pub trait FromRaw: Scalar {
    fn from_raw(raw: &RawScalar) -> Result<Self>;
}

impl FromRaw for GaussRational {
    fn from_raw(raw: &RawScalar) -> Result<Self> {
        match raw {
            RawScalar::Text(s) => s.parse(),
            RawScalar::Pair(_) => Err(Error::Parse("exact files take scalars as strings".into())),
        }
    }
}

impl FromRaw for Complex64 {
    fn from_raw(raw: &RawScalar) -> Result<Self> {
        match raw {
            RawScalar::Pair([re, im]) if re.is_finite() && im.is_finite() => Ok(Complex64::new(*re, *im)),
            RawScalar::Pair(_) => Err(Error::Parse("non-finite entry".into())),
            RawScalar::Text(_) => Err(Error::Parse("approximate files take scalars as [re, im]".into())),
        }
    }
}

fn square<S: FromRaw>(raw: &[RawScalar], dim: usize) -> Result<Matrix<S>> {
    if raw.len() != dim * dim {
        return Err(Error::Dimension(format!("expected {} entries, found {}", dim * dim, raw.len())));
    }
    let vals = raw.iter().map(S::from_raw).collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(dim, dim, vals)
}

fn build<S: FromRaw>(file: &InputFile, tol: f64) -> Result<Model<S>> {
    let group = match &file.group {
        Some(g) => {
            let gens = g.generators.iter().map(|r| square::<S>(r, g.dim)).collect::<Result<Vec<_>>>()?;
            Some((g.model, gens))
        }
        None => None,
    };
    let u = match (&group, file.m, file.n, file.entries.is_empty()) {
        (Some((model, gens)), _, _, true) => match model {
            GroupModel::I => model_i(gens, tol)?,
            GroupModel::Ii => model_ii(gens, tol)?,
        },
        (_, Some(m), Some(n), false) => {
            if m == 0 || n == 0 {
                return Err(Error::InvalidArgument("m and n must be positive".into()));
            }
            VertexOperator::new(m, n, square(&file.entries, m * n)?, tol)?
        }
        _ => return Err(Error::InvalidArgument("need m, n and entries, or a group block".into())),
    };
    let twist = match &file.twist {
        Some(q) => Some(TwistQ::new(q.iter().map(S::from_raw).collect::<Result<_>>()?, tol)?),
        None => None,
    };
    Ok(Model { u, twist, group })
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Exact files ignore `tol`.
    pub fn load(&self, tol: f64) -> Result<Loaded> {
        Ok(match self.scalar {
            ScalarKind::Exact => Loaded::Exact(build(self, 0.0)?),
            ScalarKind::Approx => Loaded::Approx(build(self, tol)?),
        })
    }
}
