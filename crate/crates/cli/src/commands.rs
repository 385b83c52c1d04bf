use lebesgue_core::lebesgue::{
    absolute_continuity_residual, auxiliary_parallel_sum_residual, auxiliary_space,
    contraction_recursion_residuals, singularity_residual, SINGULARITY_RTOL,
};
use lebesgue_core::psd::{frobenius, min_eigenvalue};
use lebesgue_core::{
    decompose, eval, form_decompose, form_parallel_sum, functional_decompose,
    functional_parallel_sum, induced_form, is_absolutely_continuous, is_singular, parallel_sum,
    range_projection, Functional, Method, PsdMatrix, Tolerances,
};
use serde_json::{json, Value};

use crate::error::CliResult;
use crate::report::Diagnostics;
use crate::schema::{densities_value, matrix_value, Problem, ProblemFile};

/// Everything in a report except provenance and timing.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub method: Option<String>,
    pub decomposition: Option<Value>,
    pub result: Option<Value>,
    pub diagnostics: Diagnostics,
}

/// The pair `(A, B)` of operators behind a problem: `B` is decomposed with
/// respect to `A`. Forms and functionals are viewed through their Gram
/// matrices.
pub fn operators(problem: &Problem, tol: &Tolerances) -> CliResult<(PsdMatrix, PsdMatrix)> {
    Ok(match problem {
        Problem::OperatorPair(p) => p.to_core(tol)?,
        Problem::FormPair(p) => {
            let (t, w) = p.to_core(tol)?;
            (w.gram().clone(), t.gram().clone())
        }
        Problem::FunctionalPair(p) => {
            let (w, v) = p.to_core(tol)?;
            (induced_form(&v).gram().clone(), induced_form(&w).gram().clone())
        }
    })
}

fn num(x: f64) -> Value {
    json!(x)
}

fn diff_norm(a: &PsdMatrix, b: &PsdMatrix) -> f64 {
    frobenius(&(a.matrix() - b.matrix()))
}

pub fn psum(file: &ProblemFile, tol: &Tolerances) -> CliResult<Outcome> {
    let (a, b) = operators(&file.problem, tol)?;
    let (result, s) = match &file.problem {
        Problem::OperatorPair(_) => {
            let s = parallel_sum(&a, &b, tol)?;
            (json!({ "parallel_sum": matrix_value(s.matrix()) }), s)
        }
        Problem::FormPair(p) => {
            let (t, w) = p.to_core(tol)?;
            let s = form_parallel_sum(&t, &w, tol)?;
            (
                json!({ "basis": p.basis, "parallel_sum": matrix_value(s.gram().matrix()) }),
                s.gram().clone(),
            )
        }
        Problem::FunctionalPair(p) => {
            let (w, v) = p.to_core(tol)?;
            let s = functional_parallel_sum(&w, &v, tol)?;
            (
                json!({ "parallel_sum": densities_value(&s) }),
                induced_form(&s).gram().clone(),
            )
        }
    };
    let mut d = Diagnostics::new();
    d.insert(
        "min_eig_a_minus_psum".into(),
        num(min_eigenvalue(&(a.matrix() - s.matrix()), tol)?),
    );
    d.insert(
        "min_eig_b_minus_psum".into(),
        num(min_eigenvalue(&(b.matrix() - s.matrix()), tol)?),
    );
    d.insert("singularity_norm".into(), num(s.frobenius()));
    let swapped = parallel_sum(&b, &a, tol)?;
    let direct = parallel_sum(&a, &b, tol)?;
    d.insert("commutativity_residual".into(), num(diff_norm(&direct, &swapped)));
    if matches!(file.problem, Problem::FunctionalPair(_)) {
        d.insert("form_consistency_residual".into(), num(diff_norm(&s, &direct)));
    }
    Ok(Outcome {
        result: Some(result),
        diagnostics: d,
        ..Outcome::default()
    })
}

/// `max |w(E) − ac(E) − sing(E)|` over matrix units.
fn functional_sum_residual(w: &Functional, ac: &Functional, sing: &Functional) -> CliResult<f64> {
    let alg = w.algebra();
    let mut worst = 0.0f64;
    for (b, k, l) in alg.matrix_unit_indices() {
        let e = alg.matrix_unit(b, k, l);
        let r = eval(w, &e)? - eval(ac, &e)? - eval(sing, &e)?;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

pub fn decompose_cmd(
    file: &ProblemFile,
    method: Method,
    cross_check: bool,
    tol: &Tolerances,
) -> CliResult<Outcome> {
    let (a, b) = operators(&file.problem, tol)?;
    let mut d = Diagnostics::new();
    let (decomposition, ac, sing, iterations, residual, converged) = match &file.problem {
        Problem::OperatorPair(_) => {
            let r = decompose(&a, &b, method, tol)?;
            let v = json!({ "ac": matrix_value(r.ac.matrix()), "sing": matrix_value(r.sing.matrix()) });
            (v, r.ac, r.sing, r.iterations, r.residual, r.converged)
        }
        Problem::FormPair(p) => {
            let (t, w) = p.to_core(tol)?;
            let r = form_decompose(&t, &w, method, tol)?;
            let v = json!({
                "basis": p.basis,
                "ac": matrix_value(r.ac.gram().matrix()),
                "sing": matrix_value(r.sing.gram().matrix()),
            });
            (v, r.ac.gram().clone(), r.sing.gram().clone(), r.iterations, r.residual, r.converged)
        }
        Problem::FunctionalPair(p) => {
            let (w, v) = p.to_core(tol)?;
            let r = functional_decompose(&w, &v, method, tol)?;
            d.insert(
                "functional_sum_residual".into(),
                num(functional_sum_residual(&w, &r.ac, &r.sing)?),
            );
            let out = json!({ "ac": densities_value(&r.ac), "sing": densities_value(&r.sing) });
            (
                out,
                induced_form(&r.ac).gram().clone(),
                induced_form(&r.sing).gram().clone(),
                r.iterations,
                r.residual,
                r.converged,
            )
        }
    };

    let sum = ac.matrix() + sing.matrix() - b.matrix();
    d.insert("sum_residual".into(), num(frobenius(&sum)));
    d.insert("singularity_norm".into(), num(singularity_residual(&a, &sing, tol)?));
    let p = range_projection(&a, tol)?;
    let leak = ac.matrix() - p.matrix() * ac.matrix() * p.matrix();
    d.insert("range_leak".into(), num(frobenius(&leak)));
    d.insert("iterations".into(), json!(iterations));
    d.insert("method_residual".into(), num(residual));
    d.insert("converged".into(), json!(converged));

    if cross_check {
        d.insert("cross_check".into(), cross_check_value(&a, &b, tol)?);
    }
    Ok(Outcome {
        method: Some(method.to_string()),
        decomposition: Some(decomposition),
        diagnostics: d,
        ..Outcome::default()
    })
}

fn cross_check_value(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> CliResult<Value> {
    let runs = Method::ALL
        .iter()
        .map(|&m| decompose(a, b, m, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = serde_json::Map::new();
    let mut worst = 0.0f64;
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let delta = diff_norm(&runs[i].sing, &runs[j].sing);
            worst = worst.max(delta);
            out.insert(format!("{}_vs_{}", runs[i].method, runs[j].method), num(delta));
        }
    }
    out.insert("max_discrepancy".into(), num(worst));
    for r in &runs {
        out.insert(format!("{}_converged", r.method), json!(r.converged));
    }
    Ok(Value::Object(out))
}

pub fn check(file: &ProblemFile, tol: &Tolerances) -> CliResult<Outcome> {
    let (a, b) = operators(&file.problem, tol)?;
    let singular = is_singular(&a, &b, tol)?;
    let ac = is_absolutely_continuous(&b, &a, tol)?;

    let mut d = Diagnostics::new();
    d.insert("singularity_norm".into(), num(singularity_residual(&a, &b, tol)?));
    d.insert(
        "singularity_threshold".into(),
        num(SINGULARITY_RTOL * (1.0 + a.frobenius() + b.frobenius())),
    );
    d.insert("ac_residual".into(), num(absolute_continuity_residual(&b, &a, tol)?));
    d.insert("ac_threshold".into(), num(tol.recon_tol * (1.0 + b.frobenius())));
    d.insert("lemma_residual".into(), num(auxiliary_parallel_sum_residual(&a, &b, tol)?));
    let aux = auxiliary_space(&a, &b, tol)?;
    d.insert("auxiliary_rank".into(), json!(aux.rank));
    let recursion = if aux.rank == 0 {
        0.0
    } else {
        contraction_recursion_residuals(&aux.b_tilde, 10, tol)?
            .into_iter()
            .fold(0.0, f64::max)
    };
    d.insert("recursion_residual".into(), num(recursion));

    Ok(Outcome {
        result: Some(json!({ "singular": singular, "absolutely_continuous": ac })),
        diagnostics: d,
        ..Outcome::default()
    })
}
