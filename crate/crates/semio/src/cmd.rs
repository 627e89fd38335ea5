//! Command implementations. Each returns report lines plus an optional
//! data artifact and the process exit code, or a Failure whose message
//! belongs on standard error.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::rc::Rc;

use semio_core::inference::{consistency_check, entails, eval_rl, gamma, Quantifier};
use semio_core::semiotic::{integrate, OMEGA_SIGN};

use crate::emit::{
    csv_bytes, decl_from_config, fmt_value, print_workspace, read_dataset,
    workspace_from_semiotic,
};
use crate::rl::parse_formula;
use crate::workspace::{parse_value_str, CompDecl, OsetDecl, Workspace, WorkspaceError};

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

impl From<WorkspaceError> for Failure {
    fn from(e: WorkspaceError) -> Failure {
        Failure { code: e.exit_code(), message: format!("{}", e) }
    }
}

/// What a command hands back: report lines for standard output, an
/// optional artifact for `--out` (standard output otherwise), exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub data: Option<Vec<u8>>,
    pub code: i32,
}

pub fn load(path: &Path, epsilon: Option<f64>) -> Result<Workspace, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("{}: {}", path.display(), e)))?;
    let file = path.display().to_string();
    let mut ws = crate::parse::parse_spec(&file, &text).map_err(|diags| {
        let mut msg = String::new();
        for d in &diags {
            writeln!(msg, "{}", d).unwrap();
        }
        msg.truncate(msg.trim_end().len());
        Failure::new(2, msg)
    })?;
    if let Some(eps) = epsilon {
        ws.set_epsilon(eps);
    }
    Ok(ws)
}

fn parse_lambda(s: &str) -> Result<semio_core::algebra::Value, Failure> {
    parse_value_str(s).map_err(|m| Failure::new(2, m))
}

pub fn run_check(ws: &Workspace, cap: u64) -> Result<Outcome, Failure> {
    let semiotic = ws.semiotic()?;
    semiotic
        .system
        .validate()
        .map_err(|e| Failure::new(2, format!("{}", e)))?;
    let report = semiotic.validate(None, cap);
    let mut out = String::new();
    let mut cap_hit = false;
    for c in &report.checks {
        let degree = c
            .degree
            .as_ref()
            .map(|d| format!(" degree={}", fmt_value(d)))
            .unwrap_or_default();
        if c.passed {
            writeln!(out, "ok {}{}", c.name, degree).unwrap();
        } else {
            let witness = c
                .witness
                .as_ref()
                .map(|w| format!(" witness={}", w))
                .unwrap_or_default();
            writeln!(out, "FAIL {}{}{}", c.name, degree, witness).unwrap();
            if c.witness.as_deref().is_some_and(|w| w.contains("above the cap")) {
                cap_hit = true;
            }
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    writeln!(out, "passed {} of {}", passed, report.checks.len()).unwrap();
    let code = if cap_hit {
        3
    } else if report.passed() {
        0
    } else {
        1
    };
    Ok(Outcome { report: out, data: None, code })
}

pub fn run_limit(ws: &Workspace, name: &str, cap: u64, colimit: bool) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let d = ws.build_diagram(name)?;
    let table = if colimit {
        d.colimit(alg, cap)
    } else {
        d.limit(alg, cap)
    }
    .map_err(WorkspaceError::from)?;
    let decl = ws.diagram(name).expect("build_diagram resolved it");
    let table = if decl.sources.is_empty() {
        table
    } else {
        let keep: Vec<&str> = decl.sources.iter().map(|s| s.as_str()).collect();
        table.project_observable(&keep, alg).map_err(WorkspaceError::from)?
    };
    Ok(Outcome { report: String::new(), data: Some(csv_bytes(&table)), code: 0 })
}

pub fn run_commutes(
    ws: &Workspace,
    name: &str,
    sources: &[String],
    cap: u64,
) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let d = ws.build_diagram(name)?;
    let decl = ws.diagram(name).expect("build_diagram resolved it");
    let named: Vec<&str> = if sources.is_empty() {
        decl.sources.iter().map(|s| s.as_str()).collect()
    } else {
        sources.iter().map(|s| s.as_str()).collect()
    };
    if named.is_empty() {
        return Err(Failure::new(
            2,
            format!("diagram '{}' declares no sources; pass --sources", name),
        ));
    }
    let rep = d.commutativity(&named, alg, cap).map_err(WorkspaceError::from)?;
    let mut out = String::new();
    writeln!(out, "degree {}", fmt_value(&rep.degree)).unwrap();
    writeln!(out, "commutative {}", rep.commutative).unwrap();
    Ok(Outcome {
        report: out,
        data: Some(csv_bytes(&rep.profile)),
        code: if rep.commutative { 0 } else { 1 },
    })
}

pub fn run_classify(
    ws: &Workspace,
    name: &str,
    vertex: &str,
    obs: &[String],
    cap: u64,
) -> Result<Outcome, Failure> {
    let _ = cap;
    let alg = ws.require_algebra()?;
    let d = ws.build_diagram(name)?;
    let mut pairs = Vec::new();
    for o in obs {
        let (v, e) = o
            .split_once('=')
            .ok_or_else(|| Failure::new(2, format!("observation '{}' is not VERTEX=ELEMENT", o)))?;
        pairs.push((v.trim().to_string(), e.trim().to_string()));
    }
    let borrowed: Vec<(&str, &str)> =
        pairs.iter().map(|(v, e)| (v.as_str(), e.as_str())).collect();
    let table = d.classifier(vertex, &borrowed, alg).map_err(WorkspaceError::from)?;
    Ok(Outcome { report: String::new(), data: Some(csv_bytes(&table)), code: 0 })
}

pub fn run_bayes(ws: &Workspace, comp: &str) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let c = ws
        .comp(comp)
        .ok_or(WorkspaceError::Unknown { kind: "comp", name: comp.to_string() })?;
    let cond = c.table.conditional(alg).map_err(WorkspaceError::from)?;
    Ok(Outcome { report: String::new(), data: Some(csv_bytes(&cond)), code: 0 })
}

pub fn run_gamma(ws: &Workspace, left: &str, right: &str, cap: u64) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let a = ws.resolve_table(left, cap)?;
    let b = ws.resolve_table(right, cap)?;
    let (map, quality) = gamma(&a, &b, alg).map_err(WorkspaceError::from)?;
    let mut out = String::new();
    writeln!(out, "quality {}", fmt_value(&quality)).unwrap();
    Ok(Outcome { report: out, data: Some(csv_bytes(&map)), code: 0 })
}

pub fn run_consistent(
    ws: &Workspace,
    diagram: &str,
    against: &str,
    lambda: &str,
    exists: bool,
    domain: Option<&str>,
    cap: u64,
) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let lam = parse_lambda(lambda)?;
    let d = ws.resolve_table(diagram, cap)?;
    let interp = ws.resolve_table(against, cap)?;
    let dom = match domain {
        Some(n) => Some(ws.resolve_table(n, cap)?),
        None => None,
    };
    let mode = match (&dom, exists) {
        (Some(_), true) => {
            return Err(Failure::new(2, "--exists and --domain exclude each other"))
        }
        (Some(m), false) => Quantifier::ForAllOn(m),
        (None, true) => Quantifier::Exists,
        (None, false) => Quantifier::ForAll,
    };
    let rep = consistency_check(&d, &interp, &lam, mode, alg).map_err(WorkspaceError::from)?;
    let mut out = String::new();
    writeln!(out, "holds {}", rep.holds).unwrap();
    writeln!(out, "fiber {}", rep.fiber.len()).unwrap();
    Ok(Outcome {
        report: out,
        data: Some(csv_bytes(&rep.degree_map)),
        code: if rep.holds { 0 } else { 1 },
    })
}

pub fn run_answers(
    ws: &Workspace,
    pool: &str,
    diagram: &str,
    lambda: &str,
    cap: u64,
) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let lam = parse_lambda(lambda)?;
    let p = ws.build_pool(pool, cap)?;
    let pairs = semio_core::inference::answer_pairs(&p, diagram, &lam, alg)
        .map_err(WorkspaceError::from)?;
    let mut out = String::new();
    for (name, dom) in &pairs {
        match dom {
            Some(d) => writeln!(out, "{} [{}]", name, d).unwrap(),
            None => writeln!(out, "{}", name).unwrap(),
        }
    }
    if pairs.is_empty() {
        writeln!(out, "no answers at lambda {}", lambda).unwrap();
    }
    Ok(Outcome { report: out, data: None, code: 0 })
}

pub fn run_infer(
    ws: &Workspace,
    pool: &str,
    premises: &[String],
    conclusion: &str,
    lambda: &str,
    cap: u64,
) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let lam = parse_lambda(lambda)?;
    let p = ws.build_pool(pool, cap)?;
    let u: Vec<&str> = premises.iter().map(|s| s.as_str()).collect();
    let holds = entails(&p, &u, conclusion, &lam, alg).map_err(WorkspaceError::from)?;
    Ok(Outcome {
        report: format!("entails {}\n", holds),
        data: None,
        code: if holds { 0 } else { 1 },
    })
}

pub fn run_rl(
    ws: &Workspace,
    pool: &str,
    formula: &str,
    concept: &str,
    lambda: &str,
    cap: u64,
) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?;
    let lam = parse_lambda(lambda)?;
    let phi = parse_formula(formula).map_err(|m| Failure::new(2, m))?;
    let p = ws.build_pool(pool, cap)?;
    let g = ws.resolve_table(concept, cap)?;
    let holds = eval_rl(&phi, &g, &lam, &p, alg).map_err(WorkspaceError::from)?;
    Ok(Outcome {
        report: format!("satisfied {}\n", holds),
        data: None,
        code: if holds { 0 } else { 1 },
    })
}

pub fn run_integrate(
    paths: &[std::path::PathBuf],
    names: &[String],
    epsilon: Option<f64>,
) -> Result<Outcome, Failure> {
    if paths.len() < 2 {
        return Err(Failure::new(2, "integrate needs at least two .sem files"));
    }
    if !names.is_empty() && names.len() != paths.len() {
        return Err(Failure::new(2, "--names must list one name per file"));
    }
    let mut semiotics = Vec::new();
    let mut labels = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let ws = load(p, epsilon)?;
        let label = if names.is_empty() {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("part{}", i))
        } else {
            names[i].clone()
        };
        semiotics.push(ws.semiotic()?);
        labels.push(label);
    }
    let named: Vec<(&str, &semio_core::semiotic::Semiotic)> = labels
        .iter()
        .map(|l| l.as_str())
        .zip(semiotics.iter())
        .collect();
    let merged = integrate(&named).map_err(|e| Failure::new(2, format!("{}", e)))?;
    let alg_name = labels.join("_");
    let out_ws = workspace_from_semiotic(&alg_name, &merged)
        .map_err(|m| Failure::new(2, m))?;
    let text = print_workspace(&out_ws).map_err(|m| Failure::new(2, m))?;
    Ok(Outcome { report: String::new(), data: Some(text.into_bytes()), code: 0 })
}

pub fn run_encode_dataset(
    ws: &Workspace,
    csv_path: &Path,
    name: &str,
    signs: &[String],
) -> Result<Outcome, Failure> {
    let alg = ws.require_algebra()?.clone();
    if ws.comp(name).is_some() || ws.diagram(name).is_some() {
        return Err(Failure::new(2, format!("the name '{}' is already declared", name)));
    }
    let text = fs::read_to_string(csv_path)
        .map_err(|e| Failure::new(2, format!("{}: {}", csv_path.display(), e)))?;
    let (cols, rows) = read_dataset(&text, &alg).map_err(|m| Failure::new(2, m))?;
    let sign_names: Vec<String> = if signs.is_empty() { cols } else { signs.to_vec() };
    let mut semiotic = ws.semiotic()?;
    let sign_refs: Vec<&str> = sign_names.iter().map(|s| s.as_str()).collect();
    let row_refs: Vec<Vec<&str>> = rows
        .iter()
        .map(|r| r.iter().map(|s| s.as_str()).collect())
        .collect();
    let cfg = semiotic
        .encode_dataset(name, &sign_refs, &row_refs)
        .map_err(WorkspaceError::from)?;

    let mut out_ws = ws.clone();
    if !out_ws.signs.iter().any(|(n, _)| n == OMEGA_SIGN) {
        out_ws.signs.push((OMEGA_SIGN.to_string(), None));
    }
    out_ws.ontology = semiotic.system.ontology.clone();
    if out_ws.oset_for_sign(OMEGA_SIGN).is_none() {
        let set = semiotic
            .model
            .sign(OMEGA_SIGN)
            .expect("encode_dataset bound the truth sign");
        out_ws.osets.push(OsetDecl {
            name: OMEGA_SIGN.to_string(),
            sign: OMEGA_SIGN.to_string(),
            set: Rc::clone(set),
        });
    }
    let table = semiotic
        .model
        .comp(name)
        .expect("encode_dataset registered the component")
        .clone();
    out_ws.comps.push(CompDecl {
        name: name.to_string(),
        src_signs: sign_names,
        tgt_signs: vec![OMEGA_SIGN.to_string()],
        table,
    });
    // node omega-sets by this file's names, not by sign
    let mut cfg_decl = decl_from_config(&format!("{}_cfg", name), &cfg);
    for (_, oname) in &mut cfg_decl.nodes {
        let sign = oname.clone();
        *oname = out_ws
            .oset_for_sign(&sign)
            .map(|o| o.name.clone())
            .ok_or_else(|| Failure::new(2, format!("sign '{}' has no omega-set", sign)))?;
    }
    out_ws.diagrams.push(cfg_decl);
    let text = print_workspace(&out_ws).map_err(|m| Failure::new(2, m))?;
    Ok(Outcome { report: String::new(), data: Some(text.into_bytes()), code: 0 })
}
