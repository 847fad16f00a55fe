//! Command-line front end: instance I/O, generation, pipelines and reports.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use sosfact::approx::approx_fejer_riesz;
use sosfact::factorize::{
    classify_complex_factorization, classify_factorization, complex_square_factor_traced, enumerate_complex_classes,
    enumerate_real_classes, real_nplus1_factor_traced, real_square_factor_traced, Budget, ClassifiedFactorization,
};
use sosfact::generate::{generate, Family, GeneratorConfig};
use sosfact::io::{matrix_from_json, parse_instance, serialize_instance, InstanceFile, MatrixJson, Mode};
use sosfact::local::snf_congruence_with;
use sosfact::matpoly::{equivalence_witness, is_psd_matrix, verify_factorization};
use sosfact::matrix::{FieldTag, Matrix, PolyMatrix};
use sosfact::roots::{gaussian_roots, is_squarefree};
use sosfact::smith::smith_normal_form;
use sosfact::{Error, Gauss, Rat, Result};

use report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Square,
    #[value(name = "n+1")]
    NPlusOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for FieldTag {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => FieldTag::Real,
            FieldArg::Complex => FieldTag::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    PlantedUnimodular,
    PlantedGeneric,
    ScalarOnly,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::PlantedUnimodular => Family::PlantedUnimodular,
            FamilyArg::PlantedGeneric => Family::PlantedGeneric,
            FamilyArg::ScalarOnly => Family::ScalarOnly,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sosfact", version, about = "Exact hermitian-square factorization of psd matrix polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Degree bound for pivot and conic searches.
    #[arg(long, global = true)]
    budget_degree: Option<usize>,
    /// Coefficient height bound for pivot and conic searches.
    #[arg(long, global = true)]
    budget_height: Option<i64>,
    /// Working precision in bits for approx mode.
    #[arg(long, global = true, default_value_t = 256)]
    precision: u32,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum)]
    shape: Option<ShapeArg>,
    /// Override the field recorded in the instance.
    #[arg(long, global = true, value_enum)]
    field: Option<FieldArg>,
    /// Also write the machine-readable report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate an instance and report its invariants.
    Check { instance: PathBuf },
    /// Smith normal form and the semi-local congruence to it.
    Snf { instance: PathBuf },
    /// Compute a factorization.
    Factor { instance: PathBuf },
    /// One factorization per class of det M.
    Enumerate { instance: PathBuf },
    /// Two-squares class of a factorization (default: the planted one).
    Classify {
        instance: PathBuf,
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Decide whether two factorizations differ by a constant unitary.
    Equiv {
        instance: PathBuf,
        q1: PathBuf,
        q2: PathBuf,
    },
    /// Re-check a factorization file or a saved report.
    Verify {
        file: PathBuf,
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Write a planted instance.
    Gen {
        #[arg(long, value_enum, default_value = "planted-unimodular")]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of conjugate root pairs of det M.
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        /// Degree bound of the random polynomial factors.
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long)]
        no_enforce: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn budget(cli: &Cli) -> Budget {
    let mut b = Budget::default();
    if let Some(d) = cli.budget_degree {
        b.local.pivot.max_degree = d;
        b.local.conic.max_degree = d;
    }
    if let Some(h) = cli.budget_height {
        b.local.pivot.max_height = h;
        b.local.conic.max_height = h;
    }
    b
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<InstanceFile> {
    parse_instance(&read(path)?)
}

fn load_matrix(path: &Path) -> Result<PolyMatrix<Gauss>> {
    let j: MatrixJson = serde_json::from_slice(&read(path)?).map_err(|e| Error::Schema(e.to_string()))?;
    Ok(matrix_from_json(&j)?.1)
}

fn field_of(cli: &Cli, inst: &InstanceFile) -> FieldTag {
    cli.field.map(FieldTag::from).unwrap_or(inst.field)
}

fn real(inst: &InstanceFile) -> Result<PolyMatrix<Rat>> {
    inst.real_matrix()
}

fn planted(inst: &InstanceFile) -> Result<PolyMatrix<Gauss>> {
    inst.ground_truth
        .as_ref()
        .and_then(|g| g.factorization.clone())
        .ok_or_else(|| Error::Schema("no factorization given and none planted".into()))
}

fn cmd_check(inst: &InstanceFile, rep: &mut Report) -> Result<()> {
    let m = &inst.matrix;
    let d = m.det().to_rat().ok_or(Error::NotHermitian)?;
    let psd = is_psd_matrix(m)?;
    let squarefree = d.is_constant() || is_squarefree(&d);
    let roots_ok = d.is_zero() || d.is_constant() || gaussian_roots(&d).is_ok();
    let snf = smith_normal_form(m);
    rep.line(format!("{}x{} {} instance", m.rows(), m.cols(), inst.field.as_str()));
    rep.line(format!("det M = {d}"));
    rep.line(format!("psd: {psd}, square-free det: {squarefree}, roots in Q(i): {roots_ok}"));
    rep.set("psd", json!(psd));
    rep.set("det", report::poly(&d.to_gauss()));
    rep.set("squarefree", json!(squarefree));
    rep.set("roots_in_field", json!(roots_ok));
    rep.set(
        "invariant_factors",
        Value::Array(snf.invariant_factors.iter().map(report::poly).collect()),
    );
    if !psd {
        return Err(Error::NotPsd);
    }
    if let Some(q) = inst.ground_truth.as_ref().and_then(|g| g.factorization.as_ref()) {
        rep.line("planted factorization verifies");
        rep.set("planted", report::matrix(q));
    }
    Ok(())
}

fn cmd_snf(cli: &Cli, inst: &InstanceFile, rep: &mut Report) -> Result<()> {
    let snf = smith_normal_form(&inst.matrix);
    rep.set(
        "invariant_factors",
        Value::Array(snf.invariant_factors.iter().map(report::poly).collect()),
    );
    let factors: Vec<String> = snf.invariant_factors.iter().map(ToString::to_string).collect();
    rep.line(format!("invariant factors: {}", factors.join(", ")));
    let b = budget(cli);
    let w = match field_of(cli, inst) {
        FieldTag::Real => report::congruence(&snf_congruence_with(&real(inst)?, &b.local)?),
        FieldTag::Complex => report::congruence(&snf_congruence_with(&inst.matrix, &b.local)?),
    };
    rep.line("congruence T* M T = diag(c_i a_i) verified");
    rep.set("congruence", w);
    Ok(())
}

fn cmd_factor(cli: &Cli, inst: &InstanceFile, rep: &mut Report) -> Result<()> {
    let field = field_of(cli, inst);
    let mode = match cli.mode {
        Some(ModeArg::Approx) => Mode::Approx,
        Some(ModeArg::Exact) => Mode::Exact,
        None => inst.mode,
    };
    let shape = cli.shape.unwrap_or(match field {
        FieldTag::Real => ShapeArg::NPlusOne,
        FieldTag::Complex => ShapeArg::Square,
    });
    rep.set("field", json!(field.as_str()));
    rep.set("shape", json!(if shape == ShapeArg::Square { "square" } else { "n+1" }));
    if mode == Mode::Approx {
        return factor_approx(cli, inst, rep);
    }
    let b = budget(cli);
    match (field, shape) {
        (FieldTag::Real, ShapeArg::NPlusOne) => report::traced(rep, &real_nplus1_factor_traced(&real(inst)?, &b)?),
        (FieldTag::Real, ShapeArg::Square) => report::traced(rep, &real_square_factor_traced(&real(inst)?, &b)?),
        (FieldTag::Complex, ShapeArg::Square) => {
            report::traced(rep, &complex_square_factor_traced(&inst.matrix, &b)?)
        }
        (FieldTag::Complex, ShapeArg::NPlusOne) => {
            let t = complex_square_factor_traced(&inst.matrix, &b)?;
            let q = t.factorization.q.vstack(&Matrix::zeros(1, inst.matrix.cols()));
            let f = verify_factorization(&q, &inst.matrix)?;
            rep.line("square factorization padded by a zero row");
            report::traced(rep, &sosfact::factorize::Traced { factorization: f, witness: t.witness })
        }
    }
    Ok(())
}

fn factor_approx(cli: &Cli, inst: &InstanceFile, rep: &mut Report) -> Result<()> {
    if inst.matrix.rows() != 1 {
        return Err(Error::PreconditionViolated("approx mode handles scalar instances".into()));
    }
    let d = inst.matrix.get(0, 0).to_rat().ok_or(Error::NotHermitian)?;
    let f = approx_fejer_riesz(&d, cli.precision)?;
    let approx = num_traits::ToPrimitive::to_f64(&f.residual).unwrap_or(f64::NAN);
    rep.line(format!("approximate factor at {} bits, residual <= {approx:.3e}", cli.precision));
    rep.set("mode", json!("approx"));
    rep.set("g", report::poly(&f.g));
    rep.set("residual", json!(sosfact::scalar::fmt_rat(&f.residual)));
    Ok(())
}

fn cmd_enumerate(cli: &Cli, inst: &InstanceFile, rep: &mut Report) -> Result<()> {
    let b = budget(cli);
    let entries: Vec<Value> = match field_of(cli, inst) {
        FieldTag::Real => classes(rep, &enumerate_real_classes(&real(inst)?, &b)?),
        FieldTag::Complex => classes(rep, &enumerate_complex_classes(&inst.matrix, &b)?),
    };
    rep.line(format!("{} classes, pairwise inequivalent", entries.len()));
    rep.set("count", json!(entries.len()));
    rep.set("classes", Value::Array(entries));
    Ok(())
}

fn classes<S: sosfact::Scalar>(rep: &mut Report, all: &[ClassifiedFactorization<S>]) -> Vec<Value> {
    all.iter()
        .enumerate()
        .map(|(i, c)| {
            rep.line(format!("class {i}: {}", report::class_label(&c.cls)));
            report::classified(c)
        })
        .collect()
}

fn cmd_classify(cli: &Cli, inst: &InstanceFile, q: Option<&Path>, rep: &mut Report) -> Result<()> {
    let q = match q {
        Some(p) => load_matrix(p)?,
        None => planted(inst)?,
    };
    let b = budget(cli);
    let c = match field_of(cli, inst) {
        FieldTag::Real => {
            let qr = q.to_rat().ok_or(Error::NonRealInput)?;
            let m = real(inst)?;
            let known = enumerate_real_classes(&m, &b).ok();
            report::classified(&classify_factorization(&qr, &m, known.as_deref(), &b)?)
        }
        FieldTag::Complex => report::classified(&classify_complex_factorization(&q, &inst.matrix)?),
    };
    rep.line(format!("class: {}", c["class"].as_str().unwrap_or_default()));
    rep.set("classified", c);
    Ok(())
}

fn cmd_equiv(inst: &InstanceFile, q1: &Path, q2: &Path, rep: &mut Report) -> Result<()> {
    let (a, b) = (load_matrix(q1)?, load_matrix(q2)?);
    let w = equivalence_witness(&a, &b, &inst.matrix)?;
    rep.line(if w.is_some() { "equivalent" } else { "not equivalent" });
    rep.set("equivalent", json!(w.is_some()));
    rep.set("Q1", report::matrix(&a));
    rep.set("Q2", report::matrix(&b));
    if let Some(u) = w {
        rep.set("unitary", report::constant(&u));
    }
    Ok(())
}

fn cmd_verify(file: &Path, q: Option<&Path>, rep: &mut Report) -> Result<()> {
    let bytes = read(file)?;
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| Error::Schema(e.to_string()))?;
    if value.get("command").is_some() {
        let n = report::recheck(&value)?;
        rep.line(format!("report re-verified: {n} identities hold exactly"));
        rep.set("identities", json!(n));
        return Ok(());
    }
    let inst = parse_instance(&bytes)?;
    let q = match q {
        Some(p) => load_matrix(p)?,
        None => planted(&inst)?,
    };
    let f = verify_factorization(&q, &inst.matrix)?;
    rep.set("verified", json!(f.verified));
    if !f.verified {
        return Err(Error::VerificationFailed("Q* Q differs from M".into()));
    }
    rep.line("Q* Q = M holds exactly");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    cli: &Cli,
    family: FamilyArg,
    n: usize,
    pairs: usize,
    degree: usize,
    no_enforce: bool,
    out: Option<&Path>,
    rep: &mut Report,
) -> Result<()> {
    let family = Family::from(family);
    let cfg = GeneratorConfig {
        family,
        field: cli.field.map(FieldTag::from).unwrap_or(FieldTag::Real),
        n: if family == Family::ScalarOnly { 1 } else { n },
        pairs,
        degree,
        seed: cli.seed,
        enforce_admissible: !no_enforce,
        ..GeneratorConfig::default()
    };
    let inst = generate(&cfg)?;
    let text = serialize_instance(&inst);
    match out {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            rep.line(format!("wrote {}", p.display()));
        }
        None => rep.raw(text),
    }
    rep.set("family", json!(family.as_str()));
    rep.set("seed", json!(cli.seed));
    Ok(())
}

fn run(cli: &Cli, rep: &mut Report) -> Result<()> {
    match &cli.command {
        Command::Check { instance } => cmd_check(&load(instance)?, rep),
        Command::Snf { instance } => cmd_snf(cli, &load(instance)?, rep),
        Command::Factor { instance } => cmd_factor(cli, &load(instance)?, rep),
        Command::Enumerate { instance } => cmd_enumerate(cli, &load(instance)?, rep),
        Command::Classify { instance, q } => cmd_classify(cli, &load(instance)?, q.as_deref(), rep),
        Command::Equiv { instance, q1, q2 } => cmd_equiv(&load(instance)?, q1, q2, rep),
        Command::Verify { file, q } => cmd_verify(file, q.as_deref(), rep),
        Command::Gen {
            family,
            n,
            pairs,
            degree,
            no_enforce,
            out,
        } => cmd_gen(cli, *family, *n, *pairs, *degree, *no_enforce, out.as_deref(), rep),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Snf { .. } => "snf",
        Command::Factor { .. } => "factor",
        Command::Enumerate { .. } => "enumerate",
        Command::Classify { .. } => "classify",
        Command::Equiv { .. } => "equiv",
        Command::Verify { .. } => "verify",
        Command::Gen { .. } => "gen",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut rep = Report::new(command_name(&cli.command));
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&cli, &mut rep)))
        .unwrap_or_else(|_| Err(Error::VerificationFailed("internal error".into())));
    let code = match &outcome {
        Ok(()) => 0,
        Err(e) => e.exit_code(),
    };
    rep.finish(outcome.err(), code);
    print!("{}", rep.render());
    if let Some(path) = &cli.report {
        if let Err(e) = fs::write(path, rep.json_text()) {
            eprintln!("cannot write report {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code as u8)
}
