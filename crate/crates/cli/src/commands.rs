//! One function per subcommand. Each returns a report; structured negative
//! answers are reports with a negative outcome, everything else is an error.

use std::path::{Path, PathBuf};

use mdqec::algebra::{decompose_structure, generate_algebra, AlgebraBasis, AlgebraStructure};
use mdqec::channel::{Channel, KrausMap};
use mdqec::codes::{analyze_code, correction_rank, subsystem_kl, CodeError, CodeKind, CodeSubspace, TargetKind, Weights};
use mdqec::mdomain::{
    compute_md, extract_ucc_from_md, four_algebra_check, ucc_algebra_unital, verify_ucc, UccCode, FOUR_ALGEBRA_NAMES,
};
use mdqec::numerics::{ComplexMatrix, Tolerance};
use mdqec::reference::{run_all, Comparison};
use serde_json::{json, Map, Value};

use crate::files::{read_channel_file, read_matrix_file, ChannelFile, Metadata};
use crate::report::{matrices, matrix, num, nums, Outcome, Report};
use crate::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerance,
    pub seed: u64,
}

/// Where a code comes from.
#[derive(Debug, Clone)]
pub enum CodeSource {
    Projector(PathBuf),
    Isometry(PathBuf),
    Indices(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub source: CodeSource,
    pub dims: Option<(usize, usize)>,
}

/// Which algebra `decompose` works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraChoice {
    Md,
    Ucc,
    Errors,
}

impl AlgebraChoice {
    fn label(self) -> &'static str {
        match self {
            AlgebraChoice::Md => "md",
            AlgebraChoice::Ucc => "ucc",
            AlgebraChoice::Errors => "errors",
        }
    }
}

struct Loaded {
    file: ChannelFile,
    kraus: Vec<ComplexMatrix>,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let file = read_channel_file(path)?;
    let kraus = file.kraus_matrices(&path.display().to_string())?;
    Ok(Loaded { file, kraus })
}

fn load_channel(path: &Path, set: &Settings, report: &mut Report) -> Result<Channel, CliError> {
    let loaded = load(path)?;
    echo_channel(path, &loaded, report);
    Ok(Channel::validate(loaded.kraus, &set.tol)?)
}

fn echo_channel(path: &Path, loaded: &Loaded, report: &mut Report) {
    let mut echo = Map::new();
    echo.insert("file".into(), Value::String(path.display().to_string()));
    echo.insert("dim".into(), Value::from(loaded.file.dim));
    echo.insert("kraus_count".into(), Value::from(loaded.kraus.len()));
    if let Some(name) = loaded.file.metadata.as_ref().and_then(|m| m.name.clone()) {
        echo.insert("name".into(), Value::String(name));
    }
    report.input("channel", Value::Object(echo));
}

fn load_code(spec: &CodeSpec, n: usize, set: &Settings, report: &mut Report) -> Result<CodeSubspace, CliError> {
    let dims = |k: usize| spec.dims.unwrap_or((1, k));
    let (code, echo) = match &spec.source {
        CodeSource::Indices(indices) => {
            let (a, b) = dims(indices.len());
            let code = CodeSubspace::from_basis_indices(n, indices, a, b)?;
            (code, json!({ "kind": "basis-indices", "indices": indices }))
        }
        CodeSource::Projector(path) => {
            let p = read_matrix_file(path)?;
            let rank = p.trace().re.round().max(0.0) as usize;
            let (a, b) = dims(rank);
            let code = CodeSubspace::from_projector(&p, a, b, &set.tol)?;
            (code, json!({ "kind": "projector", "file": path.display().to_string() }))
        }
        CodeSource::Isometry(path) => {
            let v = read_matrix_file(path)?;
            let (a, b) = dims(v.ncols());
            let code = CodeSubspace::from_isometry(v, a, b, &set.tol)?;
            (code, json!({ "kind": "isometry", "file": path.display().to_string() }))
        }
    };
    let mut echo = echo;
    echo["dims"] = json!([code.dim_a, code.dim_b]);
    report.input("code", echo);
    if code.ambient_dim() != n {
        return Err(CodeError::DimensionMismatch {
            code: code.ambient_dim(),
            channel: n,
        }
        .into());
    }
    Ok(code)
}

/// Record a structured negative answer, or pass any other error through.
fn negative(report: &mut Report, err: CodeError) -> Result<(), CliError> {
    let detail = match err {
        CodeError::NotCorrectable { i, j, residual } => json!({
            "kind": "not-correctable",
            "worst_pair": [i, j],
            "residual": num(residual),
        }),
        CodeError::NotUcc { rank } => json!({ "kind": "not-unitarily-correctable", "correction_rank": rank }),
        other => return Err(other.into()),
    };
    report.result("violation", detail);
    report.outcome = Outcome::Negative;
    Ok(())
}

pub fn validate(path: &Path, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("validate", set.tol, set.seed);
    let loaded = load(path)?;
    echo_channel(path, &loaded, &mut report);
    let map = KrausMap::new(loaded.kraus)?;
    let tp = map.tp_residual();
    let unital = map.unital_residual();
    Channel::validate(map.kraus().to_vec(), &set.tol)?;
    report
        .result("dim", Value::from(map.dim()))
        .result("kraus_count", Value::from(map.len()))
        .result("tp_residual", num(tp))
        .result("unital_residual", num(unital))
        .result("unital", Value::Bool(unital <= set.tol.abs_eps));
    Ok(report)
}

pub fn kl(path: &Path, spec: &CodeSpec, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("kl", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    let code = load_code(spec, ch.dim(), set, &mut report)?;
    match subsystem_kl(&ch, &code, &set.tol) {
        Ok(blocks) => {
            report.result("correctable", Value::Bool(true));
            if code.is_subspace_code() {
                let r = blocks.len();
                let lambda = ComplexMatrix::from_fn(r, r, |i, j| blocks[i][j][(0, 0)]);
                report.result("lambda", matrix(&lambda));
            } else {
                let grid: Vec<Value> = blocks.iter().map(|row| matrices(row)).collect();
                report.result("blocks", Value::Array(grid));
            }
        }
        Err(e) => {
            report.result("correctable", Value::Bool(false));
            negative(&mut report, e)?;
        }
    }
    Ok(report)
}

pub fn rank(path: &Path, spec: &CodeSpec, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("rank", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    let code = load_code(spec, ch.dim(), set, &mut report)?;
    match correction_rank(&ch, &code, &set.tol) {
        Ok(r) => {
            report.result("correction_rank", Value::from(r));
        }
        Err(e) => negative(&mut report, e)?,
    }
    Ok(report)
}

pub fn recover(path: &Path, spec: &CodeSpec, output: Option<&Path>, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("recover", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    let code = load_code(spec, ch.dim(), set, &mut report)?;
    let analysis = match analyze_code(&ch, &code, &set.tol) {
        Ok(a) => a,
        Err(e) => {
            negative(&mut report, e)?;
            return Ok(report);
        }
    };
    let kind = match analysis.kind {
        CodeKind::Subspace => "subspace",
        CodeKind::Subsystem => "subsystem",
    };
    let weights = match &analysis.weights {
        Weights::Probabilities(p) => nums(p),
        Weights::Operators(d) => matrices(d),
    };
    let cert = &analysis.certificate;
    let target = match cert.target_kind {
        TargetKind::IdentityOnC => "identity",
        TargetKind::FaTensorIdB => "gauge-tensor-identity",
    };
    report
        .result("kind", Value::String(kind.into()))
        .result("correction_rank", Value::from(analysis.correction_rank))
        .result("weights", weights)
        .result("unitaries", matrices(&analysis.unitaries))
        .result("recovery_kraus_count", Value::from(analysis.recovery.len()))
        .result(
            "certificate",
            json!({
                "target": target,
                "residual": num(cert.residual),
                "identity_residual": num(cert.identity_residual),
                "gauge_residual": num(cert.fa_residual),
                "passes": cert.passes(set.tol.certify_eps()),
            }),
        );
    if let Some(out) = output {
        let meta = Metadata {
            name: Some("recovery".into()),
            ..Metadata::default()
        };
        let file = ChannelFile::from_kraus(analysis.recovery.kraus(), Some(meta));
        std::fs::write(out, file.to_json()).map_err(|e| CliError::Io {
            path: out.display().to_string(),
            message: e.to_string(),
        })?;
        report.result("recovery_file", Value::String(out.display().to_string()));
    }
    if !cert.passes(set.tol.certify_eps()) {
        report.outcome = Outcome::Failed;
    }
    Ok(report)
}

fn structure_value(alg: &AlgebraBasis, st: &AlgebraStructure) -> Value {
    let summands: Vec<Value> = st
        .summands
        .iter()
        .map(|s| json!({ "dim_a": s.dim_a, "dim_b": s.dim_b }))
        .collect();
    json!({
        "dimension": alg.len(),
        "closure_residual": num(alg.closure_residual()),
        "summands": summands,
        "null_dim": st.null_dim,
        "block_residual": num(st.block_residual(alg)),
    })
}

pub fn md(path: &Path, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("md", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    let result = compute_md(ch.as_map(), &set.tol, set.seed)?;
    report
        .result("is_unital", Value::Bool(result.is_unital))
        .result("domain", structure_value(&result.md, &result.structure));
    Ok(report)
}

fn ucc_value(ucc: &UccCode, eps: f64) -> Value {
    json!({
        "dims": [ucc.code.dim_a, ucc.code.dim_b],
        "isometry": matrix(&ucc.code.embed),
        "recovery_unitary": matrix(&ucc.recovery_unitary),
        "residual": num(ucc.residual),
        "gauge_tp_residual": num(ucc.fa_tp_residual()),
        "noiseless_up_to_unitary": ucc.gauge_is_trivial(eps),
    })
}

pub fn ucc(path: &Path, spec: Option<&CodeSpec>, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("ucc", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    let eps = set.tol.certify_eps();
    match spec {
        Some(spec) => {
            let code = load_code(spec, ch.dim(), set, &mut report)?;
            match verify_ucc(&ch, &code, &set.tol) {
                Ok(found) => {
                    report.result("code", ucc_value(&found, eps));
                }
                Err(e) => negative(&mut report, e)?,
            }
        }
        None => {
            let codes = extract_ucc_from_md(&ch, &set.tol, set.seed)?;
            report
                .result("count", Value::from(codes.len()))
                .result("codes", Value::Array(codes.iter().map(|c| ucc_value(c, eps)).collect()));
            if codes.is_empty() {
                report.outcome = Outcome::Negative;
            }
        }
    }
    Ok(report)
}

pub fn four_check(path: &Path, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("four-check", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    let found = four_algebra_check(ch.as_map(), &set.tol, set.seed)?;
    let algebras: Vec<Value> = FOUR_ALGEBRA_NAMES
        .iter()
        .zip(&found.algebras)
        .map(|(name, alg)| json!({ "name": name, "dimension": alg.len() }))
        .collect();
    let distances: Vec<Value> = found
        .distances
        .iter()
        .map(|&(i, j, d)| json!({ "pair": [FOUR_ALGEBRA_NAMES[i], FOUR_ALGEBRA_NAMES[j]], "distance": num(d) }))
        .collect();
    let agree = found.max_distance() <= set.tol.certify_eps();
    report
        .result("algebras", Value::Array(algebras))
        .result("distances", Value::Array(distances))
        .result("max_distance", num(found.max_distance()))
        .result("agree", Value::Bool(agree));
    if !agree {
        report.outcome = Outcome::Negative;
    }
    Ok(report)
}

pub fn decompose(path: &Path, choice: AlgebraChoice, set: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("decompose", set.tol, set.seed);
    let ch = load_channel(path, set, &mut report)?;
    report.input("algebra", Value::String(choice.label().into()));
    let alg = match choice {
        AlgebraChoice::Md => compute_md(ch.as_map(), &set.tol, set.seed)?.md,
        AlgebraChoice::Ucc => ucc_algebra_unital(ch.as_map(), &set.tol)?,
        AlgebraChoice::Errors => {
            let mut ops = ch.kraus().to_vec();
            ops.extend(ch.kraus().iter().map(|e| e.adjoint()));
            generate_algebra(ch.dim(), &ops, &set.tol)
        }
    };
    let st = decompose_structure(&alg, &set.tol, set.seed)?;
    report
        .result("structure", structure_value(&alg, &st))
        .result("transform", matrix(&st.transform));
    Ok(report)
}

pub fn paper_examples(set: &Settings) -> Report {
    let mut report = Report::new("paper-examples", set.tol, set.seed);
    let outcomes = run_all(set.seed);
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    let checks: Vec<Value> = outcomes
        .iter()
        .map(|c| {
            let comparison = match c.comparison {
                Comparison::AtMost => "at-most",
                Comparison::Above => "above",
                Comparison::Equals => "equals",
            };
            json!({
                "name": c.name,
                "metric": num(c.metric),
                "comparison": comparison,
                "threshold": num(c.threshold),
                "passed": c.passed,
            })
        })
        .collect();
    report
        .result("checks", Value::Array(checks))
        .result("total", Value::from(outcomes.len()))
        .result("failed", Value::from(failed));
    if failed > 0 {
        report.outcome = Outcome::Failed;
    }
    report
}
