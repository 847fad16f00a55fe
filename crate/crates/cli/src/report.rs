//! Report assembly and standalone re-verification of saved reports.

use num_traits::Zero;
use serde_json::{json, Map, Value};

use sosfact::factorize::{ClassifiedFactorization, Traced, Witness};
use sosfact::io::{matrix_from_json, matrix_to_json, poly_from_json, poly_to_json, ratmatrix_from_json, ratmatrix_to_json};
use sosfact::local::CongruenceWitness;
use sosfact::matrix::{FieldTag, Matrix, PolyMatrix, RatMatrix};
use sosfact::scalar::fmt_rat;
use sosfact::twosquares::TwoSquares;
use sosfact::{Error, Gauss, Poly, Result, Scalar};

pub struct Report {
    command: &'static str,
    lines: Vec<String>,
    raw: Option<String>,
    result: Map<String, Value>,
    json: Value,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            lines: Vec::new(),
            raw: None,
            result: Map::new(),
            json: Value::Null,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Payload printed verbatim instead of the report (used by `gen`).
    pub fn raw(&mut self, s: String) {
        self.raw = Some(s);
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.result.insert(key.to_string(), v);
    }

    pub fn finish(&mut self, err: Option<Error>, code: i32) {
        let error = err.as_ref().map(|e| {
            json!({ "kind": kind(e), "message": e.to_string() })
        });
        if let Some(e) = &err {
            self.lines.push(format!("error: {e}"));
        }
        self.json = json!({
            "command": self.command,
            "status": if err.is_none() { "ok" } else { "error" },
            "exit_code": code,
            "error": error,
            "result": Value::Object(std::mem::take(&mut self.result)),
        });
    }

    pub fn json_text(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("serializable") + "\n"
    }

    pub fn render(&self) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str("--- report ---\n");
        out.push_str(&self.json_text());
        out
    }
}

fn kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn field<S: Scalar>(p: &Poly<S>) -> FieldTag {
    if p.is_real() {
        FieldTag::Real
    } else {
        FieldTag::Complex
    }
}

pub fn poly<S: Scalar>(p: &Poly<S>) -> Value {
    serde_json::to_value(poly_to_json(p, field(p))).expect("serializable")
}

pub fn matrix<S: Scalar>(m: &PolyMatrix<S>) -> Value {
    serde_json::to_value(matrix_to_json(m, None)).expect("serializable")
}

pub fn constant<S: sosfact::matrix::Coeff>(m: &Matrix<S>) -> Value {
    matrix(&PolyMatrix::from_constant(m))
}

fn ratmatrix<S: Scalar>(m: &RatMatrix<S>) -> Value {
    serde_json::to_value(ratmatrix_to_json(m)).expect("serializable")
}

fn polys<S: Scalar>(ps: &[Poly<S>]) -> Value {
    Value::Array(ps.iter().map(poly).collect())
}

pub fn congruence<S: Scalar>(w: &CongruenceWitness<S>) -> Value {
    json!({
        "T": ratmatrix(&w.t),
        "M": matrix(&w.source),
        "factors": polys(&w.factors),
        "constants": w.constants.iter().map(fmt_rat).collect::<Vec<_>>(),
        "modulus": poly(&w.modulus),
    })
}

fn witness<S: Scalar>(w: &Witness<S>) -> Value {
    json!({
        "congruence": w.congruence.as_ref().map(congruence),
        "cancellation": w.cancellation.as_ref().map(|c| json!({ "U": ratmatrix(&c.u), "Q": matrix(&c.q) })),
        "kernel_basis": w.kernel_basis.as_ref().map(matrix),
        "reflection": w.reflection.as_ref().map(ratmatrix),
    })
}

pub fn traced<S: Scalar>(rep: &mut Report, t: &Traced<S>) {
    let f = &t.factorization;
    rep.line(format!(
        "Q is {}x{}, Q* Q = M verified: {}",
        f.q.rows(),
        f.q.cols(),
        f.verified
    ));
    for i in 0..f.q.rows() {
        let row: Vec<String> = (0..f.q.cols()).map(|j| f.q.get(i, j).to_string()).collect();
        rep.line(format!("  [{}]", row.join(", ")));
    }
    rep.set("Q", matrix(&f.q));
    rep.set("M", matrix(&f.m));
    rep.set("verified", json!(f.verified));
    rep.set("witness", witness(&t.witness));
}

pub fn class_label(c: &TwoSquares) -> String {
    match c {
        TwoSquares::Real { a, b, .. } => format!("a = {a}, b = {b}"),
        TwoSquares::Complex { g, .. } => format!("g = {g}"),
    }
}

fn class_data(c: &TwoSquares) -> Value {
    match c {
        TwoSquares::Real { a, b, target } => json!({
            "kind": "real", "a": poly(a), "b": poly(b), "target": poly(target),
        }),
        TwoSquares::Complex { g, target } => json!({
            "kind": "complex", "g": poly(g), "target": poly(target),
        }),
    }
}

pub fn classified<S: Scalar>(c: &ClassifiedFactorization<S>) -> Value {
    json!({
        "class": class_label(&c.cls),
        "class_data": class_data(&c.cls),
        "Q": matrix(&c.factorization.q),
        "M": matrix(&c.factorization.m),
        "verified": c.factorization.verified,
        "v": c.v.as_deref().map(polys),
        "compression": c.compression.as_ref().map(ratmatrix),
        "witness": witness(&c.witness),
    })
}

// Re-verification from the JSON alone.

fn bad(what: &str) -> Error {
    Error::VerificationFailed(format!("report check failed: {what}"))
}

fn schema<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))
}

fn get_matrix(v: &Value) -> Result<PolyMatrix<Gauss>> {
    Ok(matrix_from_json(&schema(v)?)?.1)
}

fn get_ratmatrix(v: &Value) -> Result<RatMatrix<Gauss>> {
    ratmatrix_from_json(&schema(v)?)
}

fn get_poly(v: &Value) -> Result<Poly<Gauss>> {
    poly_from_json(&schema::<Vec<_>>(v)?)
}

fn present(v: &Value, key: &str) -> Option<Value> {
    v.get(key).filter(|x| !x.is_null()).cloned()
}

fn check_congruence(w: &Value) -> Result<usize> {
    let t = get_ratmatrix(&w["T"])?;
    let m = get_matrix(&w["M"])?;
    let factors: Vec<Poly<Gauss>> = schema::<Vec<Value>>(&w["factors"])?.iter().map(get_poly).collect::<Result<_>>()?;
    let constants: Vec<String> = schema(&w["constants"])?;
    if factors.len() != constants.len() || factors.len() != m.rows() {
        return Err(bad("congruence target size"));
    }
    let mut diag = Vec::new();
    for (a, c) in factors.iter().zip(&constants) {
        let c = sosfact::io::coeff_from_json(&sosfact::io::CoeffJson::Real(c.clone()))?;
        diag.push(a.scale(&c));
    }
    let d = Matrix::diag(&diag).to_ratfn();
    if t.star().mul(&m.to_ratfn()).mul(&t) != d {
        return Err(bad("T* M T = D"));
    }
    if t.det().is_zero() {
        return Err(bad("T singular"));
    }
    Ok(1)
}

fn check_unitary(u: &RatMatrix<Gauss>) -> Result<usize> {
    if !u.star().mul(u).is_identity() {
        return Err(bad("U* U = I"));
    }
    Ok(1)
}

fn check_witness(w: &Value) -> Result<usize> {
    let mut n = 0;
    if let Some(c) = present(w, "congruence") {
        n += check_congruence(&c)?;
    }
    if let Some(c) = present(w, "cancellation") {
        let u = get_ratmatrix(&c["U"])?;
        n += check_unitary(&u)?;
    }
    if let Some(k) = present(w, "kernel_basis") {
        let d = get_matrix(&k)?.det();
        if d.is_zero() || !d.is_constant() {
            return Err(bad("kernel basis unimodular"));
        }
        n += 1;
    }
    if let Some(r) = present(w, "reflection") {
        n += check_unitary(&get_ratmatrix(&r)?)?;
    }
    Ok(n)
}

fn check_factorization(v: &Value) -> Result<usize> {
    let q = get_matrix(&v["Q"])?;
    let m = get_matrix(&v["M"])?;
    if q.gram() != m {
        return Err(bad("Q* Q = M"));
    }
    let mut n = 1;
    if let Some(vv) = present(v, "v") {
        let vs: Vec<Poly<Gauss>> = schema::<Vec<Value>>(&vv)?.iter().map(get_poly).collect::<Result<_>>()?;
        let col = Matrix::column(&vs);
        if !q.star().mul(&col).is_zero() {
            return Err(bad("Q* v = 0"));
        }
        if col.gram().get(0, 0) != &m.det() {
            return Err(bad("v* v = det M"));
        }
        n += 2;
        if let Some(u) = present(v, "compression") {
            let u = get_ratmatrix(&u)?;
            n += check_unitary(&u)?;
        }
    }
    if let Some(c) = present(v, "class_data") {
        let target = get_poly(&c["target"])?;
        let ok = match c["kind"].as_str() {
            Some("real") => {
                let (a, b) = (get_poly(&c["a"])?, get_poly(&c["b"])?);
                &(&a * &a) + &(&b * &b) == target
            }
            Some("complex") => {
                let g = get_poly(&c["g"])?;
                &g.star() * &g == target
            }
            _ => false,
        };
        if !ok {
            return Err(bad("two-squares identity"));
        }
        n += 1;
    }
    if let Some(w) = present(v, "witness") {
        n += check_witness(&w)?;
    }
    Ok(n)
}

/// Re-check every exact identity embedded in a saved report; returns the
/// number of identities confirmed.
pub fn recheck(report: &Value) -> Result<usize> {
    if report["status"] != "ok" {
        return Err(Error::Schema("report records a failed run".into()));
    }
    let r = &report["result"];
    let mut n = 0;
    if present(r, "Q").is_some() {
        n += check_factorization(r)?;
    }
    if let Some(c) = present(r, "congruence") {
        n += check_congruence(&c)?;
    }
    if let Some(c) = present(r, "classified") {
        n += check_factorization(&c)?;
    }
    if let Some(cs) = present(r, "classes") {
        for c in schema::<Vec<Value>>(&cs)? {
            n += check_factorization(&c)?;
        }
    }
    if let Some(u) = present(r, "unitary") {
        let u = get_matrix(&u)?;
        let (q1, q2) = (get_matrix(&r["Q1"])?, get_matrix(&r["Q2"])?);
        if u.mul(&q1) != q2 || !u.star().mul(&u).is_identity() {
            return Err(bad("U Q1 = Q2 with U unitary"));
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Schema("report carries no checkable identities".into()));
    }
    Ok(n)
}
