//! On-disk problem format.
//!
//! ```json
//! {
//!   "version": "1",
//!   "kind": "operator_pair",
//!   "payload": { "a": [[[1.0, 0.0]]], "b": [[[2.0, 0.0]]] },
//!   "tolerances": { "rank_rtol": 1e-10 }
//! }
//! ```
//!
//! Complex entries are `[re, im]`; matrices are row-major nested arrays.

use lebesgue_core::{CMatrix, CVector, Functional, PsdMatrix, SesquilinearForm, StarAlgebra, Tolerances};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;
pub type JsonVector = Vec<JsonComplex>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub version: String,
    #[serde(flatten)]
    pub problem: Problem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Problem {
    OperatorPair(OperatorPair),
    FormPair(FormPair),
    FunctionalPair(FunctionalPair),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::OperatorPair(_) => "operator_pair",
            Problem::FormPair(_) => "form_pair",
            Problem::FunctionalPair(_) => "functional_pair",
        }
    }
}

/// Decompose `b` with respect to `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorPair {
    pub a: JsonMatrix,
    pub b: JsonMatrix,
}

/// Decompose `t` with respect to `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormPair {
    pub basis: Vec<String>,
    pub t: JsonMatrix,
    pub w: JsonMatrix,
}

/// Decompose `w` with respect to `v` on the algebra with the given blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalPair {
    pub blocks: Vec<usize>,
    pub w: Vec<JsonMatrix>,
    pub v: Vec<JsonMatrix>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iter_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recon_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            rank_rtol: self.rank_rtol.unwrap_or(base.rank_rtol),
            psd_slack: self.psd_slack.unwrap_or(base.psd_slack),
            iter_tol: self.iter_tol.unwrap_or(base.iter_tol),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            recon_tol: self.recon_tol.unwrap_or(base.recon_tol),
        }
    }
}

/// Defaults, then the file's overrides, then the command-line overrides.
pub fn resolve_tolerances(
    file: Option<&ToleranceOverrides>,
    flags: &ToleranceOverrides,
) -> CliResult<Tolerances> {
    let mut tol = Tolerances::default();
    if let Some(f) = file {
        tol = f.apply(tol);
    }
    tol = flags.apply(tol);
    tol.validate()?;
    Ok(tol)
}

pub fn parse_problem(text: &str) -> CliResult<ProblemFile> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid problem file: {e}")))?;
    if file.version != SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "unsupported version {:?} (expected {SCHEMA_VERSION:?})",
            file.version
        )));
    }
    Ok(file)
}

pub fn complex_from_json(c: &JsonComplex) -> Complex64 {
    Complex64::new(c[0], c[1])
}

pub fn complex_to_json(c: Complex64) -> JsonComplex {
    [c.re, c.im]
}

pub fn matrix_from_json(m: &JsonMatrix, what: &str) -> CliResult<CMatrix> {
    let n = m.len();
    if n == 0 {
        return Err(CliError::input(format!("{what}: matrix is empty")));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::input(format!(
                "{what}: row {i} has {} entries, expected {n} (matrices must be square)",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| complex_from_json(&m[i][j])))
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_value(m: &CMatrix) -> Value {
    serde_json::to_value(matrix_to_json(m)).expect("matrices serialize")
}

pub fn vector_from_json(v: &JsonVector) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(complex_from_json))
}

pub fn vector_value(v: &CVector) -> Value {
    let out: JsonVector = v.iter().map(|&c| complex_to_json(c)).collect();
    serde_json::to_value(out).expect("vectors serialize")
}

pub fn psd_from_json(m: &JsonMatrix, what: &str, tol: &Tolerances) -> CliResult<PsdMatrix> {
    let m = matrix_from_json(m, what)?;
    PsdMatrix::new(m, tol).map_err(|e| {
        let e = CliError::from(e);
        CliError {
            message: format!("{what}: {}", e.message),
            ..e
        }
    })
}

pub fn same_dim(a: &PsdMatrix, b: &PsdMatrix, what: &str) -> CliResult<()> {
    if a.dim() != b.dim() {
        return Err(CliError::input(format!(
            "{what}: dimension mismatch ({} vs {})",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

impl OperatorPair {
    pub fn to_core(&self, tol: &Tolerances) -> CliResult<(PsdMatrix, PsdMatrix)> {
        let a = psd_from_json(&self.a, "payload.a", tol)?;
        let b = psd_from_json(&self.b, "payload.b", tol)?;
        same_dim(&a, &b, "payload")?;
        Ok((a, b))
    }
}

impl FormPair {
    pub fn to_core(&self, tol: &Tolerances) -> CliResult<(SesquilinearForm, SesquilinearForm)> {
        let t = psd_from_json(&self.t, "payload.t", tol)?;
        let w = psd_from_json(&self.w, "payload.w", tol)?;
        same_dim(&t, &w, "payload")?;
        let t = SesquilinearForm::new(self.basis.clone(), t)?;
        let w = SesquilinearForm::new(self.basis.clone(), w)?;
        Ok((t, w))
    }
}

pub fn functional_from_json(
    algebra: &StarAlgebra,
    densities: &[JsonMatrix],
    what: &str,
    tol: &Tolerances,
) -> CliResult<Functional> {
    let densities = densities
        .iter()
        .enumerate()
        .map(|(i, d)| psd_from_json(d, &format!("{what}[{i}]"), tol))
        .collect::<CliResult<Vec<_>>>()?;
    Functional::new(algebra.clone(), densities).map_err(|e| CliError::input(format!("{what}: {e}")))
}

impl FunctionalPair {
    pub fn to_core(&self, tol: &Tolerances) -> CliResult<(Functional, Functional)> {
        let algebra = StarAlgebra::new(self.blocks.clone())?;
        let w = functional_from_json(&algebra, &self.w, "payload.w", tol)?;
        let v = functional_from_json(&algebra, &self.v, "payload.v", tol)?;
        Ok((w, v))
    }
}

pub fn densities_value(f: &Functional) -> Value {
    Value::Array(f.densities().iter().map(|d| matrix_value(d.matrix())).collect())
}
