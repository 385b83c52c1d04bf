//! Bundled fixture suite.
//!
//! A fixture names an operation, its JSON input, and expected values keyed by
//! dotted paths into the operation's JSON output:
//!
//! ```json
//! { "name": "psum-identity", "op": "psum",
//!   "input": { "problem": { … } },
//!   "expect": { "result.parallel_sum": [[[0.5, 0.0], [0.0, 0.0]], …] },
//!   "tol": 1e-12 }
//! ```
//!
//! Numbers match within `tol + iter_tol · iter_scale`. `{"at_most": x}` is an
//! upper bound, loosened by the same `iter_tol · iter_scale`. Booleans and
//! strings match exactly.

use std::path::Path;

use lebesgue_core::forms::{induced_operator, form_parallel_sum, SesquilinearForm};
use lebesgue_core::functionals::{eval, gns, induced_form, AlgebraElement, StarAlgebra};
use lebesgue_core::lebesgue::{auxiliary_space, mu_a};
use lebesgue_core::parallel_sum::{ando_ac_part, spectral_ac_of_contraction, variational_value};
use lebesgue_core::psd::{eig_hermitian, frobenius, pinv, range_projection, rank};
use lebesgue_core::{loewner_leq, CMatrix, Method, PsdMatrix, Tolerances};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::commands::{check, decompose_cmd, psum, Outcome};
use crate::error::{CliError, CliResult};
use crate::schema::{
    functional_from_json, matrix_from_json, matrix_value, parse_problem, psd_from_json,
    resolve_tolerances, vector_from_json, vector_value, JsonMatrix, JsonVector, ProblemFile,
    ToleranceOverrides,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub version: String,
    pub fixtures: Vec<Fixture>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    pub op: String,
    pub input: Value,
    pub expect: serde_json::Map<String, Value>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Multiplier of `iter_tol` added to tolerances of iteration-sensitive values.
    #[serde(default)]
    pub iter_scale: f64,
}

fn default_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureFailure {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SelftestSummary {
    pub passed: usize,
    pub failures: Vec<FixtureFailure>,
}

impl SelftestSummary {
    pub fn to_value(&self) -> Value {
        json!({
            "passed": self.passed,
            "failed": self.failures.len(),
            "total": self.passed + self.failures.len(),
            "failures": self.failures.iter().map(|f| json!({"name": f.name, "reason": f.reason})).collect::<Vec<_>>(),
        })
    }
}

pub fn load_fixtures(path: &Path) -> CliResult<(Vec<u8>, FixtureFile)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read fixture file {}: {e}", path.display())))?;
    let file: FixtureFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::input(format!("invalid fixture file {}: {e}", path.display())))?;
    if file.version != crate::schema::SCHEMA_VERSION {
        return Err(CliError::input(format!("unsupported fixture file version {:?}", file.version)));
    }
    Ok((bytes, file))
}

pub fn run_suite(file: &FixtureFile, flags: &ToleranceOverrides) -> SelftestSummary {
    let mut passed = 0;
    let mut failures = Vec::new();
    for f in &file.fixtures {
        match run_fixture(f, flags) {
            Ok(()) => passed += 1,
            Err(reason) => failures.push(FixtureFailure {
                name: f.name.clone(),
                reason,
            }),
        }
    }
    SelftestSummary { passed, failures }
}

pub fn run_fixture(f: &Fixture, flags: &ToleranceOverrides) -> Result<(), String> {
    let (actual, tol) = evaluate(&f.op, &f.input, flags)?;
    let slack = tol.iter_tol * f.iter_scale;
    for (path, expected) in &f.expect {
        let got = lookup(&actual, path).ok_or_else(|| format!("output has no field {path:?}"))?;
        compare(got, expected, f.tol + slack, slack).map_err(|e| format!("{path}: {e}"))?;
    }
    Ok(())
}

fn lookup<'a>(v: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(v, |cur, key| match cur {
        Value::Object(m) => m.get(key),
        Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

fn compare(got: &Value, expected: &Value, tol: f64, slack: f64) -> Result<(), String> {
    match expected {
        Value::Object(bound) if bound.len() == 1 && bound.contains_key("at_most") => {
            let limit = bound["at_most"].as_f64().ok_or("at_most must be a number")?;
            let x = got.as_f64().ok_or_else(|| format!("expected a number, got {got}"))?;
            if x <= limit + slack {
                Ok(())
            } else {
                Err(format!("{x:e} exceeds bound {limit:e}"))
            }
        }
        Value::Number(e) => {
            let e = e.as_f64().ok_or("bad expected number")?;
            let x = got.as_f64().ok_or_else(|| format!("expected a number, got {got}"))?;
            if (x - e).abs() <= tol {
                Ok(())
            } else {
                Err(format!("got {x:e}, expected {e:e} (tolerance {tol:e})"))
            }
        }
        Value::Array(items) => {
            let got = got.as_array().ok_or_else(|| format!("expected an array, got {got}"))?;
            if got.len() != items.len() {
                return Err(format!("length {} instead of {}", got.len(), items.len()));
            }
            for (i, (g, e)) in got.iter().zip(items).enumerate() {
                compare(g, e, tol, slack).map_err(|m| format!("[{i}] {m}"))?;
            }
            Ok(())
        }
        Value::Object(fields) => {
            for (k, e) in fields {
                let g = got.get(k).ok_or_else(|| format!("missing field {k:?}"))?;
                compare(g, e, tol, slack).map_err(|m| format!("{k}: {m}"))?;
            }
            Ok(())
        }
        other => {
            if got == other {
                Ok(())
            } else {
                Err(format!("got {got}, expected {other}"))
            }
        }
    }
}

fn arg<T: DeserializeOwned>(input: &Value) -> Result<T, String> {
    T::deserialize(input).map_err(|e| format!("bad fixture input: {e}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn outcome_value(o: Outcome) -> Value {
    json!({
        "method": o.method,
        "decomposition": o.decomposition,
        "result": o.result,
        "diagnostics": o.diagnostics,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommandInput {
    problem: ProblemFile,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    cross_check: bool,
}

#[derive(Deserialize)]
struct One {
    m: JsonMatrix,
}

#[derive(Deserialize)]
struct Pair {
    a: JsonMatrix,
    b: JsonMatrix,
}

#[derive(Deserialize)]
struct Variational {
    a: JsonMatrix,
    b: JsonMatrix,
    x: JsonVector,
}

#[derive(Deserialize)]
struct Contraction {
    bt: JsonMatrix,
}

#[derive(Deserialize)]
struct MuInput {
    x: JsonMatrix,
    a: JsonMatrix,
    steps: usize,
}

#[derive(Deserialize)]
struct FormInput {
    basis: Vec<String>,
    gram: JsonMatrix,
}

#[derive(Deserialize)]
struct FormVariational {
    t: JsonMatrix,
    w: JsonMatrix,
    xs: Vec<JsonVector>,
}

#[derive(Deserialize)]
struct FunctionalInput {
    blocks: Vec<usize>,
    density: Vec<JsonMatrix>,
    #[serde(default)]
    element: Option<Vec<JsonMatrix>>,
}

#[derive(Deserialize)]
struct Raw {
    raw: String,
}

fn psd(m: &JsonMatrix, tol: &Tolerances) -> Result<PsdMatrix, String> {
    psd_from_json(m, "input", tol).map_err(err)
}

fn element(algebra: &StarAlgebra, blocks: &[JsonMatrix]) -> Result<AlgebraElement, String> {
    let blocks = blocks
        .iter()
        .map(|b| matrix_from_json(b, "element"))
        .collect::<CliResult<Vec<CMatrix>>>()
        .map_err(err)?;
    let e = AlgebraElement { blocks };
    algebra.check_element(&e).map_err(err)?;
    Ok(e)
}

/// Runs one operation and returns its JSON output and the tolerances used.
pub fn evaluate(op: &str, input: &Value, flags: &ToleranceOverrides) -> Result<(Value, Tolerances), String> {
    if matches!(op, "psum" | "decompose" | "check") {
        let c: CommandInput = arg(input)?;
        let tol = resolve_tolerances(c.problem.tolerances.as_ref(), flags).map_err(err)?;
        let out = match op {
            "psum" => psum(&c.problem, &tol),
            "check" => check(&c.problem, &tol),
            _ => {
                let method: Method = c.method.as_deref().unwrap_or("direct").parse()?;
                decompose_cmd(&c.problem, method, c.cross_check, &tol)
            }
        }
        .map_err(err)?;
        return Ok((outcome_value(out), tol));
    }

    let tol = resolve_tolerances(None, flags).map_err(err)?;
    let out = match op {
        "parse" => {
            let r: Raw = arg(input)?;
            match parse_problem(&r.raw) {
                Ok(_) => json!({ "ok": true }),
                Err(e) => json!({ "ok": false, "error_kind": e.kind_str(), "exit_code": e.exit_code() }),
            }
        }
        "eig_hermitian" => {
            let i: One = arg(input)?;
            let m = psd(&i.m, &tol)?;
            let e = eig_hermitian(&m, &tol).map_err(err)?;
            let n = e.dim();
            let abs = CMatrix::from_fn(n, n, |r, c| e.vectors[(r, c)].norm().into());
            let unitarity = frobenius(&(e.vectors.adjoint() * &e.vectors - CMatrix::identity(n, n)));
            json!({
                "eigenvalues": e.eigenvalues,
                "abs_vectors": matrix_value(&abs),
                "reconstruction_residual": frobenius(&(e.reconstruct() - m.matrix())),
                "unitarity_residual": unitarity,
            })
        }
        "pinv" => {
            let i: One = arg(input)?;
            matrix_value(pinv(&psd(&i.m, &tol)?, &tol).map_err(err)?.matrix())
        }
        "range_projection" => {
            let i: One = arg(input)?;
            matrix_value(range_projection(&psd(&i.m, &tol)?, &tol).map_err(err)?.matrix())
        }
        "loewner_leq" => {
            let i: Pair = arg(input)?;
            json!(loewner_leq(&psd(&i.a, &tol)?, &psd(&i.b, &tol)?, &tol).map_err(err)?)
        }
        "variational_value" => {
            let i: Variational = arg(input)?;
            let x = vector_from_json(&i.x);
            json!(variational_value(&psd(&i.a, &tol)?, &psd(&i.b, &tol)?, &x, &tol).map_err(err)?)
        }
        "ando_ac_part" => {
            let i: Pair = arg(input)?;
            let r = ando_ac_part(&psd(&i.a, &tol)?, &psd(&i.b, &tol)?, &tol).map_err(err)?;
            json!({
                "ac_part": matrix_value(r.ac_part.matrix()),
                "terms_used": r.terms_used,
                "final_increment": r.final_increment,
                "converged": r.converged,
            })
        }
        "spectral_ac_of_contraction" => {
            let i: Contraction = arg(input)?;
            matrix_value(spectral_ac_of_contraction(&psd(&i.bt, &tol)?, &tol).map_err(err)?.matrix())
        }
        "mu_a" => {
            let i: MuInput = arg(input)?;
            let a = psd(&i.a, &tol)?;
            let mut x = psd(&i.x, &tol)?;
            let mut seq = Vec::with_capacity(i.steps);
            for _ in 0..i.steps {
                x = mu_a(&x, &a, &tol).map_err(err)?;
                seq.push(matrix_value(x.matrix()));
            }
            Value::Array(seq)
        }
        "auxiliary_space" => {
            let i: Pair = arg(input)?;
            let aux = auxiliary_space(&psd(&i.a, &tol)?, &psd(&i.b, &tol)?, &tol).map_err(err)?;
            let eigs = |m: &PsdMatrix| eig_hermitian(m, &tol).map(|e| e.eigenvalues).map_err(err);
            let r = aux.rank;
            json!({
                "rank": r,
                "a_tilde_eigenvalues": eigs(&aux.a_tilde)?,
                "b_tilde_eigenvalues": eigs(&aux.b_tilde)?,
                "lifted_a_tilde": matrix_value(&aux.lift(aux.a_tilde.matrix())),
                "lifted_b_tilde": matrix_value(&aux.lift(aux.b_tilde.matrix())),
                "embed_gram": matrix_value(&(&aux.embed * aux.embed.adjoint())),
                "sum_residual": frobenius(&(aux.a_tilde.matrix() + aux.b_tilde.matrix() - CMatrix::identity(r, r))),
            })
        }
        "induced_operator" => {
            let i: FormInput = arg(input)?;
            let t = SesquilinearForm::new(i.basis, psd(&i.gram, &tol)?).map_err(err)?;
            matrix_value(induced_operator(&t).matrix())
        }
        "form_variational" => {
            let i: FormVariational = arg(input)?;
            let (tm, wm) = (psd(&i.t, &tol)?, psd(&i.w, &tol)?);
            let t = SesquilinearForm::with_default_basis(tm.clone());
            let w = SesquilinearForm::with_default_basis(wm.clone());
            let s = form_parallel_sum(&t, &w, &tol).map_err(err)?;
            let mut worst = 0.0f64;
            for x in &i.xs {
                let x = vector_from_json(x);
                let v = variational_value(&wm, &tm, &x, &tol).map_err(err)?;
                worst = worst.max((s.quadratic(&x) - v).abs() / (1.0 + v));
            }
            json!({ "max_relative_discrepancy": worst })
        }
        "eval" | "induced_form" | "gns" => {
            let i: FunctionalInput = arg(input)?;
            let algebra = StarAlgebra::new(i.blocks).map_err(err)?;
            let w = functional_from_json(&algebra, &i.density, "density", &tol).map_err(err)?;
            match op {
                "eval" => {
                    let a = element(&algebra, i.element.as_deref().ok_or("eval needs an element")?)?;
                    let z = eval(&w, &a).map_err(err)?;
                    json!([z.re, z.im])
                }
                "induced_form" => {
                    let t = induced_form(&w);
                    json!({
                        "gram": matrix_value(t.gram().matrix()),
                        "rank": rank(t.gram(), &tol).map_err(err)?,
                    })
                }
                _ => gns_value(&w, &algebra, i.element.as_deref(), &tol)?,
            }
        }
        other => return Err(format!("unknown op {other:?}")),
    };
    let out = match out {
        Value::Object(_) => out,
        other => json!({ "value": other }),
    };
    Ok((out, tol))
}

fn gns_value(
    w: &lebesgue_core::Functional,
    algebra: &StarAlgebra,
    probe: Option<&[JsonMatrix]>,
    tol: &Tolerances,
) -> Result<Value, String> {
    let g = gns(w, tol).map_err(err)?;
    let units: Vec<AlgebraElement> = algebra
        .matrix_unit_indices()
        .into_iter()
        .map(|(b, k, l)| algebra.matrix_unit(b, k, l))
        .collect();
    let mut reconstruction = 0.0f64;
    let mut homomorphism = 0.0f64;
    let mut trace = 0.0f64;
    for x in &units {
        let expected = eval(w, x).map_err(err)?;
        let got = g.vector_state(x).map_err(err)?;
        reconstruction = reconstruction.max((got - expected).norm());
        let rx = g.rep(x).map_err(err)?;
        homomorphism = homomorphism.max(frobenius(&(g.rep(&x.adjoint()).map_err(err)? - rx.adjoint())));
        for y in &units {
            let lhs = g.rep(&x.mul(y)).map_err(err)?;
            homomorphism = homomorphism.max(frobenius(&(lhs - &rx * g.rep(y).map_err(err)?)));
        }
        // Unitarily invariant data of π(x) against the identity representation.
        if g.space_dim() > 0 {
            let xs: Vec<&CMatrix> = x.blocks.iter().collect();
            let tr_x: num_complex::Complex64 = xs.iter().map(|m| m.trace()).sum();
            let tr_xsx: num_complex::Complex64 = xs.iter().map(|m| (m.adjoint() * *m).trace()).sum();
            trace = trace
                .max((rx.trace() - tr_x).norm())
                .max(((rx.adjoint() * &rx).trace() - tr_xsx).norm());
        }
    }
    let mut out = json!({
        "space_dim": g.space_dim(),
        "cyclic_vector": vector_value(g.cyclic_vector()),
        "unit_class_residual": (g.class_of(&algebra.unit()).map_err(err)? - g.cyclic_vector()).norm(),
        "reconstruction_residual": reconstruction,
        "homomorphism_residual": homomorphism,
        "identity_trace_residual": trace,
    });
    if let Some(p) = probe {
        let a = element(algebra, p)?;
        out["rep_of_element"] = matrix_value(&g.rep(&a).map_err(err)?);
    }
    Ok(out)
}
