//! Resolved contents of a .sem file and the assembly of core structures
//! (diagrams, sign systems, hypothesis pools) from them.

use std::fmt;
use std::rc::Rc;

use semio_core::algebra::{Algebra, Value};
use semio_core::diagram::{DiagramError, MultiDiagram};
use semio_core::grammar::{Configuration, GrammarError, Library, Ontology, Sign, Word};
use semio_core::inference::{HypothesisPool, InferenceError};
use semio_core::relation::{MultiMorphism, OmegaSet, Port, RelationError};
use semio_core::semiotic::{Binding, Model, Semiotic, SemioticError, SignSystem, TotalSketch};

#[derive(Clone, Debug)]
pub struct OsetDecl {
    pub name: String,
    pub sign: String,
    pub set: Rc<OmegaSet>,
}

#[derive(Clone, Debug)]
pub struct CompDecl {
    pub name: String,
    pub src_signs: Vec<String>,
    pub tgt_signs: Vec<String>,
    pub table: MultiMorphism,
}

#[derive(Clone, Debug)]
pub struct EdgeDecl {
    pub id: String,
    pub comp: String,
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct DiagramDecl {
    pub name: String,
    /// vertex id, omega-set name
    pub nodes: Vec<(String, String)>,
    pub edges: Vec<EdgeDecl>,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct PoolDecl {
    pub name: String,
    pub diagrams: Vec<String>,
    pub concepts: Vec<String>,
    pub domains: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Workspace {
    /// Declaration order; the first algebra is the active one.
    pub algebras: Vec<(String, Algebra)>,
    /// Sign declarations as written (name, optional parent), for printing.
    pub signs: Vec<(String, Option<String>)>,
    pub ontology: Ontology,
    pub osets: Vec<OsetDecl>,
    pub comps: Vec<CompDecl>,
    pub diagrams: Vec<DiagramDecl>,
    pub totals: Vec<String>,
    /// component label bound to a diagram's limit
    pub limitdefs: Vec<(String, String)>,
    pub colimitdefs: Vec<(String, String)>,
    pub pools: Vec<PoolDecl>,
}

#[derive(Debug)]
pub enum WorkspaceError {
    NoAlgebra,
    Unknown { kind: &'static str, name: String },
    Grammar(GrammarError),
    Diagram(DiagramError),
    Relation(RelationError),
    Semiotic(SemioticError),
    Inference(InferenceError),
    Other(String),
}

impl fmt::Display for WorkspaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkspaceError::NoAlgebra => write!(f, "the workspace declares no algebra"),
            WorkspaceError::Unknown { kind, name } => write!(f, "no {} named '{}'", kind, name),
            WorkspaceError::Grammar(e) => write!(f, "{}", e),
            WorkspaceError::Diagram(e) => write!(f, "{}", e),
            WorkspaceError::Relation(e) => write!(f, "{}", e),
            WorkspaceError::Semiotic(e) => write!(f, "{}", e),
            WorkspaceError::Inference(e) => write!(f, "{}", e),
            WorkspaceError::Other(m) => write!(f, "{}", m),
        }
    }
}

impl WorkspaceError {
    /// 3 when an enumeration cap was exceeded, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        let text = format!("{}", self);
        if text.contains("above the cap") {
            3
        } else {
            2
        }
    }
}

impl From<GrammarError> for WorkspaceError {
    fn from(e: GrammarError) -> Self {
        WorkspaceError::Grammar(e)
    }
}
impl From<DiagramError> for WorkspaceError {
    fn from(e: DiagramError) -> Self {
        WorkspaceError::Diagram(e)
    }
}
impl From<RelationError> for WorkspaceError {
    fn from(e: RelationError) -> Self {
        WorkspaceError::Relation(e)
    }
}
impl From<SemioticError> for WorkspaceError {
    fn from(e: SemioticError) -> Self {
        WorkspaceError::Semiotic(e)
    }
}
impl From<InferenceError> for WorkspaceError {
    fn from(e: InferenceError) -> Self {
        WorkspaceError::Inference(e)
    }
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace {
            algebras: Vec::new(),
            signs: Vec::new(),
            ontology: Ontology::discrete(&[]),
            osets: Vec::new(),
            comps: Vec::new(),
            diagrams: Vec::new(),
            totals: Vec::new(),
            limitdefs: Vec::new(),
            colimitdefs: Vec::new(),
            pools: Vec::new(),
        }
    }

    pub fn algebra(&self) -> Option<&Algebra> {
        self.algebras.first().map(|(_, a)| a)
    }

    pub fn require_algebra(&self) -> Result<&Algebra, WorkspaceError> {
        self.algebra().ok_or(WorkspaceError::NoAlgebra)
    }

    pub fn set_epsilon(&mut self, eps: f64) {
        for (_, a) in &mut self.algebras {
            *a = a.clone().with_epsilon(eps);
        }
    }

    pub fn oset(&self, name: &str) -> Option<&OsetDecl> {
        self.osets.iter().find(|o| o.name == name)
    }

    pub fn oset_for_sign(&self, sign: &str) -> Option<&OsetDecl> {
        self.osets.iter().find(|o| o.sign == sign)
    }

    pub fn comp(&self, name: &str) -> Option<&CompDecl> {
        self.comps.iter().find(|c| c.name == name)
    }

    pub fn diagram(&self, name: &str) -> Option<&DiagramDecl> {
        self.diagrams.iter().find(|d| d.name == name)
    }

    pub fn pool_decl(&self, name: &str) -> Option<&PoolDecl> {
        self.pools.iter().find(|p| p.name == name)
    }

    pub fn build_diagram(&self, name: &str) -> Result<MultiDiagram, WorkspaceError> {
        let decl = self
            .diagram(name)
            .ok_or(WorkspaceError::Unknown { kind: "diagram", name: name.to_string() })?;
        let mut d = MultiDiagram::new();
        for (id, oname) in &decl.nodes {
            let o = self
                .oset(oname)
                .ok_or(WorkspaceError::Unknown { kind: "omega-set", name: oname.clone() })?;
            d.add_vertex(id, &o.set)?;
        }
        for e in &decl.edges {
            let c = self
                .comp(&e.comp)
                .ok_or(WorkspaceError::Unknown { kind: "comp", name: e.comp.clone() })?;
            let src: Vec<&str> = e.src.iter().map(|s| s.as_str()).collect();
            let tgt: Vec<&str> = e.tgt.iter().map(|s| s.as_str()).collect();
            d.add_arrow(&e.id, c.table.clone(), &src, &tgt)?;
        }
        if !decl.sources.is_empty() {
            let srcs: Vec<&str> = decl.sources.iter().map(|s| s.as_str()).collect();
            d.set_sources(&srcs)?;
        }
        Ok(d)
    }

    /// The configuration a declared diagram denotes: vertex signs come from
    /// the omega-sets bound at each node, arrows keep their comp labels.
    pub fn config_of(&self, name: &str) -> Result<Configuration, WorkspaceError> {
        let decl = self
            .diagram(name)
            .ok_or(WorkspaceError::Unknown { kind: "diagram", name: name.to_string() })?;
        let mut cfg = Configuration::new();
        for (id, oname) in &decl.nodes {
            let o = self
                .oset(oname)
                .ok_or(WorkspaceError::Unknown { kind: "omega-set", name: oname.clone() })?;
            cfg.add_vertex(id, Sign::input(&o.sign))?;
        }
        for e in &decl.edges {
            let src: Vec<&str> = e.src.iter().map(|s| s.as_str()).collect();
            let tgt: Vec<&str> = e.tgt.iter().map(|s| s.as_str()).collect();
            cfg.add_arrow(&e.id, &e.comp, &src, &tgt)?;
        }
        Ok(cfg)
    }

    /// Library of all declared comps, requirement words read off their
    /// signatures.
    pub fn library(&self) -> Result<Library, WorkspaceError> {
        let mut lib = Library::new();
        for c in &self.comps {
            lib.add(&c.name, requirement_word(c), &self.ontology)?;
        }
        Ok(lib)
    }

    /// The whole workspace as one semiotic: ontology, library, sketch data,
    /// and the model binding every sign and comp.
    pub fn semiotic(&self) -> Result<Semiotic, WorkspaceError> {
        let alg = self.require_algebra()?;
        let mut sys = SignSystem::new(self.ontology.clone(), self.library()?);
        for t in &self.totals {
            sys.totals.push(TotalSketch { name: t.clone(), config: self.config_of(t)? });
        }
        for (label, dname) in &self.limitdefs {
            sys.limit_bindings
                .push(Binding { label: label.clone(), config: self.config_of(dname)? });
        }
        for (label, dname) in &self.colimitdefs {
            sys.colimit_bindings
                .push(Binding { label: label.clone(), config: self.config_of(dname)? });
        }
        let mut model = Model::new(alg.clone());
        for o in &self.osets {
            model.bind_sign(&o.sign, Rc::clone(&o.set));
        }
        for c in &self.comps {
            model.bind_comp(&c.name, c.table.clone());
        }
        Ok(Semiotic::new(sys, model))
    }

    /// A named table read as an Ω-map: a comp's table, or a diagram's limit
    /// projected onto its declared sources. All ports become sources.
    pub fn resolve_table(&self, name: &str, cap: u64) -> Result<MultiMorphism, WorkspaceError> {
        let alg = self.require_algebra()?;
        if let Some(c) = self.comp(name) {
            return Ok(as_concept(&c.table, alg));
        }
        if self.diagram(name).is_some() {
            let d = self.build_diagram(name)?;
            let mut m = d.limit(alg, cap)?;
            let decl = self.diagram(name).unwrap();
            if !decl.sources.is_empty() {
                let keep: Vec<&str> = decl.sources.iter().map(|s| s.as_str()).collect();
                m = m.project_observable(&keep, alg)?;
            }
            return Ok(as_concept(&m, alg));
        }
        Err(WorkspaceError::Unknown { kind: "comp or diagram", name: name.to_string() })
    }

    pub fn build_pool(&self, name: &str, cap: u64) -> Result<HypothesisPool, WorkspaceError> {
        let alg = self.require_algebra()?;
        let decl = self
            .pool_decl(name)
            .ok_or(WorkspaceError::Unknown { kind: "pool", name: name.to_string() })?;
        let mut pool = HypothesisPool::new();
        for n in &decl.diagrams {
            pool.add_diagram(n, self.resolve_table(n, cap)?, alg)?;
        }
        for n in &decl.concepts {
            pool.add_concept(n, self.resolve_table(n, cap)?, alg)?;
        }
        for n in &decl.domains {
            pool.add_domain(n, self.resolve_table(n, cap)?, alg)?;
        }
        Ok(pool)
    }
}

pub fn requirement_word(c: &CompDecl) -> Word {
    let mut w = Vec::new();
    for s in &c.src_signs {
        w.push(Sign::input(s));
    }
    for s in &c.tgt_signs {
        w.push(Sign::output(s));
    }
    Word(w)
}

/// Same table with every port flipped to a source.
pub fn as_concept(m: &MultiMorphism, alg: &Algebra) -> MultiMorphism {
    let ports: Vec<Port> =
        m.ports().iter().map(|p| Port::source(&p.name, &p.oset)).collect();
    MultiMorphism::from_fn(ports, alg, |idx| m.entry(idx).clone())
        .expect("port names unchanged")
}

/// Distinct port names for a comp signature: the sign name, with a numeric
/// suffix when a sign repeats.
pub fn port_names(signs: &[String]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for s in signs {
        let mut cand = s.clone();
        let mut k = 1;
        while names.contains(&cand) {
            k += 1;
            cand = format!("{}{}", s, k);
        }
        names.push(cand);
    }
    names
}

/// Flag value parser shared by λ thresholds and CSV cells: a float or a
/// (v;v;...) tuple.
pub fn parse_value_str(s: &str) -> Result<Value, String> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix('(') {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("unclosed tuple value '{}'", s))?;
        let mut parts = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ';' if depth == 0 => {
                    parts.push(parse_value_str(&inner[start..i])?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(parse_value_str(&inner[start..])?);
        Ok(Value::Tuple(parts))
    } else {
        t.parse::<f64>()
            .map(Value::Num)
            .map_err(|_| format!("'{}' is not a number", t))
    }
}
