//! Emitters: CSV for omega-maps and datasets, plus the .sem printer that
//! turns a workspace (or a freshly merged semiotic) back into source text.

use std::fmt::Write as _;

use semio_core::algebra::{Algebra, Kind, Value};
use semio_core::grammar::Configuration;
use semio_core::relation::{tuples, MultiMorphism, Port};
use semio_core::semiotic::Semiotic;

use crate::workspace::{parse_value_str, CompDecl, DiagramDecl, EdgeDecl, OsetDecl, Workspace};

/// Report form: 9 significant digits, stable across runs.
pub fn fmt_value(v: &Value) -> String {
    match v {
        Value::Num(x) => format!("{:.8e}", x),
        Value::Tuple(vs) => {
            let parts: Vec<String> = vs.iter().map(fmt_value).collect();
            format!("({})", parts.join(";"))
        }
    }
}

/// Source form: shortest text that parses back to the same number.
pub fn sem_value(v: &Value) -> String {
    match v {
        Value::Num(x) => format!("{}", x),
        Value::Tuple(vs) => {
            let parts: Vec<String> = vs.iter().map(sem_value).collect();
            format!("({})", parts.join(";"))
        }
    }
}

/// Full table of `m` as CSV: header of port names plus "value", one row
/// per support tuple, rows ordered by element names.
pub fn csv_bytes(m: &MultiMorphism) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = m.ports().iter().map(|p| p.name.as_str()).collect();
    header.push("value");
    w.write_record(&header).expect("csv in memory");
    let shape = m.shape();
    let mut rows: Vec<(Vec<&str>, String)> = tuples(&shape)
        .map(|idx| {
            let names: Vec<&str> = idx
                .iter()
                .zip(m.ports())
                .map(|(&i, p)| p.oset.elems[i].as_str())
                .collect();
            (names, fmt_value(m.entry(&idx)))
        })
        .collect();
    rows.sort();
    for (mut names, v) in rows {
        names.push(&v);
        w.write_record(&names).expect("csv in memory");
    }
    w.into_inner().expect("csv in memory")
}

/// Reads a CSV dataset: the header names the columns, an optional final
/// "value" column filters rows to those at ⊤. Returns column names and
/// the kept rows of element names.
pub fn read_dataset(text: &str, alg: &Algebra) -> Result<(Vec<String>, Vec<Vec<String>>), String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let mut cols: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
    let has_value = cols.last().map(|s| s == "value").unwrap_or(false);
    if has_value {
        cols.pop();
    }
    if cols.is_empty() {
        return Err("the dataset header names no columns".to_string());
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let fields: Vec<String> = rec.iter().map(|s| s.to_string()).collect();
        let expect = cols.len() + usize::from(has_value);
        if fields.len() != expect {
            return Err(format!(
                "a dataset row has {} fields, the header has {}",
                fields.len(),
                expect
            ));
        }
        if has_value {
            let v = parse_value_str(fields.last().unwrap())?;
            if !alg.is_top(&v) {
                continue;
            }
        }
        rows.push(fields[..cols.len()].to_vec());
    }
    Ok((cols, rows))
}

/// Algebra kind in source syntax. Interpolation-table algebras have no
/// textual form.
pub fn kind_words(alg: &Algebra) -> Result<String, String> {
    match alg.kind() {
        Kind::Boolean => Ok("boolean".to_string()),
        Kind::Godel => Ok("godel".to_string()),
        Kind::Lukasiewicz => Ok("lukasiewicz".to_string()),
        Kind::Product => Ok("product".to_string()),
        Kind::Chain(n) => Ok(format!("chain {}", n)),
        Kind::ProductOf(fs) => {
            let mut s = String::from("product_of");
            for f in fs {
                let w = kind_words(f)?;
                if w.contains(' ') {
                    write!(s, " ({})", w).unwrap();
                } else {
                    write!(s, " {}", w).unwrap();
                }
            }
            Ok(s)
        }
        Kind::Table(_) => Err("interpolation-table algebras have no source form".to_string()),
    }
}

/// The whole workspace back as .sem text. Reparsing the output yields the
/// same workspace.
pub fn print_workspace(ws: &Workspace) -> Result<String, String> {
    let mut out = String::new();
    for (name, alg) in &ws.algebras {
        writeln!(out, "algebra {} {}", name, kind_words(alg)?).unwrap();
    }
    for (name, parent) in &ws.signs {
        match parent {
            Some(p) => writeln!(out, "sign {} <= {}", name, p).unwrap(),
            None => writeln!(out, "sign {}", name).unwrap(),
        }
    }
    let alg = match ws.algebras.first() {
        Some((_, a)) => a.clone(),
        None if ws.osets.is_empty() && ws.comps.is_empty() => {
            return Ok(out);
        }
        None => return Err("no algebra to print values against".to_string()),
    };
    let top = alg.top();
    let bot = alg.bot();
    for o in &ws.osets {
        writeln!(out, "oset {} : {} {{", o.name, o.sign).unwrap();
        write!(out, "  support").unwrap();
        for e in &o.set.elems {
            write!(out, " {}", e).unwrap();
        }
        writeln!(out, " ;").unwrap();
        let n = o.set.len();
        for i in 0..n {
            for j in i..n {
                let v = o.set.sim(i, j);
                let default = if i == j { &top } else { &bot };
                if v != default {
                    writeln!(
                        out,
                        "  sim {} {} {}",
                        o.set.elems[i],
                        o.set.elems[j],
                        sem_value(v)
                    )
                    .unwrap();
                }
            }
        }
        writeln!(out, "}}").unwrap();
    }
    for c in &ws.comps {
        write!(out, "comp {} :", c.name).unwrap();
        for s in &c.src_signs {
            write!(out, " {}", s).unwrap();
        }
        write!(out, " ->").unwrap();
        for t in &c.tgt_signs {
            write!(out, " {}", t).unwrap();
        }
        writeln!(out, " {{").unwrap();
        for idx in tuples(&c.table.shape()) {
            let v = c.table.entry(&idx);
            if *v == bot {
                continue;
            }
            write!(out, "  entry").unwrap();
            for (&i, p) in idx.iter().zip(c.table.ports()) {
                write!(out, " {}", p.oset.elems[i]).unwrap();
            }
            writeln!(out, " = {}", sem_value(v)).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    for d in &ws.diagrams {
        writeln!(out, "diagram {} {{", d.name).unwrap();
        for (id, oset) in &d.nodes {
            writeln!(out, "  node {} : {}", id, oset).unwrap();
        }
        for e in &d.edges {
            write!(out, "  edge {} : {} (", e.id, e.comp).unwrap();
            for s in &e.src {
                write!(out, " {}", s).unwrap();
            }
            write!(out, " ->").unwrap();
            for t in &e.tgt {
                write!(out, " {}", t).unwrap();
            }
            writeln!(out, " )").unwrap();
        }
        if !d.sources.is_empty() {
            writeln!(out, "  sources {} ;", d.sources.join(" ")).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    for t in &ws.totals {
        writeln!(out, "total {}", t).unwrap();
    }
    for (c, d) in &ws.limitdefs {
        writeln!(out, "limitdef {} <- {}", c, d).unwrap();
    }
    for (c, d) in &ws.colimitdefs {
        writeln!(out, "colimitdef {} <- {}", c, d).unwrap();
    }
    for p in &ws.pools {
        writeln!(out, "pool {} {{", p.name).unwrap();
        if !p.diagrams.is_empty() {
            writeln!(out, "  diagrams {} ;", p.diagrams.join(" ")).unwrap();
        }
        if !p.concepts.is_empty() {
            writeln!(out, "  concepts {} ;", p.concepts.join(" ")).unwrap();
        }
        if !p.domains.is_empty() {
            writeln!(out, "  domains {} ;", p.domains.join(" ")).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    Ok(out)
}

fn sources_first(m: &MultiMorphism, alg: &Algebra) -> Result<MultiMorphism, String> {
    let k = m.ports().len();
    let mut perm: Vec<usize> = (0..k).filter(|&i| m.ports()[i].is_source).collect();
    perm.extend((0..k).filter(|&i| !m.ports()[i].is_source));
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok(m.clone());
    }
    let ports: Vec<Port> = perm.iter().map(|&i| m.ports()[i].clone()).collect();
    let mut old = vec![0usize; k];
    MultiMorphism::from_fn(ports, alg, |idx| {
        for (slot, &p) in perm.iter().enumerate() {
            old[p] = idx[slot];
        }
        m.entry(&old).clone()
    })
    .map_err(|e| e.to_string())
}

pub fn decl_from_config(name: &str, cfg: &Configuration) -> DiagramDecl {
    DiagramDecl {
        name: name.to_string(),
        nodes: cfg
            .vertices()
            .iter()
            .map(|v| (v.id.clone(), v.sign.base.clone()))
            .collect(),
        edges: cfg
            .arrows()
            .iter()
            .map(|a| EdgeDecl {
                id: a.id.clone(),
                comp: a.label.clone(),
                src: a.src.clone(),
                tgt: a.tgt.clone(),
            })
            .collect(),
        sources: cfg.free_inputs().iter().map(|v| v.id.clone()).collect(),
    }
}

/// Rebuilds workspace declarations from a semiotic so it can be printed
/// as a .sem file. Omega-sets take their sign's name; each binding's
/// configuration becomes a named diagram.
pub fn workspace_from_semiotic(alg_name: &str, s: &Semiotic) -> Result<Workspace, String> {
    let alg = &s.model.algebra;
    let mut ws = Workspace::new();
    ws.algebras.push((alg_name.to_string(), alg.clone()));
    ws.ontology = s.system.ontology.clone();
    for b in s.system.ontology.bases() {
        ws.signs.push((b.clone(), None));
    }
    for (child, parent) in s.system.ontology.strict_pairs() {
        ws.signs.push((child, Some(parent)));
    }
    for (sign, set) in s.model.signs() {
        ws.osets.push(OsetDecl {
            name: sign.clone(),
            sign: sign.clone(),
            set: set.clone(),
        });
    }
    for (name, table) in s.model.comps() {
        let table = sources_first(table, alg)?;
        let src_signs = table
            .ports()
            .iter()
            .filter(|p| p.is_source)
            .map(|p| p.sign().to_string())
            .collect();
        let tgt_signs = table
            .ports()
            .iter()
            .filter(|p| !p.is_source)
            .map(|p| p.sign().to_string())
            .collect();
        ws.comps.push(CompDecl {
            name: name.clone(),
            src_signs,
            tgt_signs,
            table,
        });
    }
    for t in &s.system.totals {
        ws.diagrams.push(decl_from_config(&t.name, &t.config));
        ws.totals.push(t.name.clone());
    }
    for b in &s.system.limit_bindings {
        let dname = format!("{}_lim", b.label);
        ws.diagrams.push(decl_from_config(&dname, &b.config));
        ws.limitdefs.push((b.label.clone(), dname));
    }
    for b in &s.system.colimit_bindings {
        let dname = format!("{}_colim", b.label);
        ws.diagrams.push(decl_from_config(&dname, &b.config));
        ws.colimitdefs.push((b.label.clone(), dname));
    }
    Ok(ws)
}
