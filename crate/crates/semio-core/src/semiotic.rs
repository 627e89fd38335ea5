//! Sign systems, models, validation, logic components, dataset encoding,
//! natural-transformation checks, and integration.
//!
//! A [`SignSystem`] couples a component library with sketch data: named
//! configurations required to interpret as total tables, and labels bound
//! to the limit or colimit of a configuration. A [`Model`] assigns Ω-sets
//! to signs and tables to labels; interpreting a configuration builds the
//! corresponding diagram and takes its limit with the free input vertices
//! as sources. A [`Semiotic`] is the pair, and integration combines
//! several semiotics over the product of their algebras.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{Algebra, Value};
use crate::diagram::{DiagramError, MultiDiagram};
use crate::grammar::{
    validate_configuration, word_io, Configuration, GrammarError, Library, Ontology, Semantics,
    Sign, Word,
};
use crate::relation::{MultiMorphism, OmegaSet, Port, RelationError, TotalityReport};

/// Reserved sign name interpreted as the algebra's own carrier.
pub const OMEGA_SIGN: &str = "Omega";

#[derive(Clone, Debug)]
pub enum SemioticError {
    UnboundSign(String),
    UnboundLabel(String),
    NotARelation(String),
    ValueOutsideSupport { sign: String, value: String },
    OmegaNeedsFiniteAlgebra,
    LabelClash { label: String, detail: String },
    NotEpi { which: String, witness: String },
    IntegrationConflict { left: String, right: String, name: String, witness: String },
    Grammar(GrammarError),
    Diagram(DiagramError),
    Relation(RelationError),
}

impl fmt::Display for SemioticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemioticError::UnboundSign(s) => write!(f, "sign '{}' has no interpretation", s),
            SemioticError::UnboundLabel(l) => write!(f, "label '{}' has no interpretation", l),
            SemioticError::NotARelation(d) => {
                write!(f, "configuration '{}' is not a relation (needs a single {} output)", d, OMEGA_SIGN)
            }
            SemioticError::ValueOutsideSupport { sign, value } => {
                write!(f, "value '{}' is outside the support of sign '{}'", value, sign)
            }
            SemioticError::OmegaNeedsFiniteAlgebra => {
                write!(f, "the {} sign needs an algebra with a finite carrier", OMEGA_SIGN)
            }
            SemioticError::LabelClash { label, detail } => {
                write!(f, "label '{}' already exists with a different shape: {}", label, detail)
            }
            SemioticError::NotEpi { which, witness } => {
                write!(f, "morphism '{}' is not epi (defect at {})", which, witness)
            }
            SemioticError::IntegrationConflict { left, right, name, witness } => write!(
                f,
                "'{}' and '{}' disagree on '{}' at {}",
                left, right, name, witness
            ),
            SemioticError::Grammar(e) => write!(f, "{}", e),
            SemioticError::Diagram(e) => write!(f, "{}", e),
            SemioticError::Relation(e) => write!(f, "{}", e),
        }
    }
}

impl From<GrammarError> for SemioticError {
    fn from(e: GrammarError) -> SemioticError {
        SemioticError::Grammar(e)
    }
}

impl From<DiagramError> for SemioticError {
    fn from(e: DiagramError) -> SemioticError {
        SemioticError::Diagram(e)
    }
}

impl From<RelationError> for SemioticError {
    fn from(e: RelationError) -> SemioticError {
        SemioticError::Relation(e)
    }
}

// ---------------------------------------------------------------------------
// logic components

/// The algebra's carrier as an Ω-set: elements named by their printed
/// values, similarity = biimplication. Finite carriers only.
pub fn omega_set(alg: &Algebra) -> Result<Rc<OmegaSet>, SemioticError> {
    let carrier = alg.carrier().ok_or(SemioticError::OmegaNeedsFiniteAlgebra)?;
    let names: Vec<String> = carrier.iter().map(|v| format!("{}", v)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut o = OmegaSet::crisp(OMEGA_SIGN, &refs, alg);
    for i in 0..carrier.len() {
        for j in 0..=i {
            o.set_sim(i, j, alg.biimp(&carrier[i], &carrier[j]));
        }
    }
    Ok(Rc::new(o))
}

/// One source, n targets, valued ⊗ᵢ sim(a, aᵢ).
pub fn diagonal(oset: &Rc<OmegaSet>, n: usize, alg: &Algebra) -> MultiMorphism {
    let mut ports = vec![Port::source(&oset.sign, oset)];
    for k in 0..n {
        ports.push(Port::target(&format!("{}{}", oset.sign, k + 1), oset));
    }
    MultiMorphism::from_fn(ports, alg, |idx| {
        let mut v = alg.top();
        for k in 0..n {
            v = alg.tensor(&v, oset.sim(idx[0], idx[k + 1]));
        }
        v
    })
    .expect("distinct port names")
}

/// n sources, one target: the diagonal transposed.
pub fn codiagonal(oset: &Rc<OmegaSet>, n: usize, alg: &Algebra) -> MultiMorphism {
    diagonal(oset, n, alg).transpose()
}

/// Crisp identity table relating two same-support Ω-sets, used to
/// interpret rename components.
pub fn rename(a: &Rc<OmegaSet>, b: &Rc<OmegaSet>, alg: &Algebra) -> Result<MultiMorphism, SemioticError> {
    if a.elems != b.elems {
        return Err(SemioticError::LabelClash {
            label: format!("{}->{}", a.sign, b.sign),
            detail: "rename endpoints have different supports".to_string(),
        });
    }
    Ok(MultiMorphism::from_fn(
        vec![Port::source(&a.sign, a), Port::target(&b.sign, b)],
        alg,
        |idx| if idx[0] == idx[1] { alg.top() } else { alg.bot() },
    )?)
}

/// Zero-source table over the carrier valuing each ω at ω ⇔ ⊤ = ω.
pub fn truth(alg: &Algebra) -> Result<MultiMorphism, SemioticError> {
    let omega = omega_set(alg)?;
    let carrier = alg.carrier().expect("omega_set succeeded");
    Ok(MultiMorphism::from_fn(
        vec![Port::target(OMEGA_SIGN, &omega)],
        alg,
        |idx| carrier[idx[0]].clone(),
    )?)
}

/// Graph of a value table: appends a target port over the carrier and
/// values (x̄, ω) at table(x̄) ⇔ ω. The table's entries must lie in the
/// carrier.
pub fn relation_graph(
    values: &MultiMorphism,
    omega: &Rc<OmegaSet>,
    alg: &Algebra,
) -> Result<MultiMorphism, SemioticError> {
    let carrier = alg.carrier().ok_or(SemioticError::OmegaNeedsFiniteAlgebra)?;
    for v in values.data() {
        if !carrier.iter().any(|c| alg.eq_val(c, v)) {
            return Err(SemioticError::ValueOutsideSupport {
                sign: OMEGA_SIGN.to_string(),
                value: format!("{}", v),
            });
        }
    }
    let mut ports = values.ports().to_vec();
    ports.push(Port::target(OMEGA_SIGN, omega));
    Ok(MultiMorphism::from_fn(ports, alg, |idx| {
        let (head, last) = idx.split_at(idx.len() - 1);
        alg.biimp(values.entry(head), &carrier[last[0]])
    })?)
}

/// Collapses a graph back to its value table: val(x̄) = ⋁_ω m(x̄,ω) ⊗ ω.
/// The named port must range over the carrier in carrier order.
pub fn relation_value(
    m: &MultiMorphism,
    omega_port: &str,
    alg: &Algebra,
) -> Result<MultiMorphism, SemioticError> {
    let carrier = alg.carrier().ok_or(SemioticError::OmegaNeedsFiniteAlgebra)?;
    let w = m
        .port_index(omega_port)
        .ok_or_else(|| SemioticError::UnboundSign(omega_port.to_string()))?;
    let ports: Vec<Port> = m
        .ports()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != w)
        .map(|(_, p)| p.clone())
        .collect();
    let full = m.shape();
    Ok(MultiMorphism::from_fn(ports, alg, |idx| {
        let mut acc = alg.bot();
        for k in 0..carrier.len() {
            let mut fidx = vec![0usize; full.len()];
            let mut it = idx.iter();
            for (p, slot) in fidx.iter_mut().enumerate() {
                *slot = if p == w { k } else { *it.next().unwrap() };
            }
            acc = alg.join(&acc, &alg.tensor(m.entry(&fidx), &carrier[k]));
        }
        acc
    })?)
}

/// Join over rows of the ⊗ of per-column similarities to the row's values.
/// An empty row list gives the constantly-⊥ table.
pub fn dataset_concept(
    osets: &[Rc<OmegaSet>],
    rows: &[Vec<&str>],
    alg: &Algebra,
) -> Result<MultiMorphism, SemioticError> {
    let mut row_idx: Vec<Vec<usize>> = Vec::new();
    for row in rows {
        let mut idx = Vec::new();
        for (o, v) in osets.iter().zip(row) {
            idx.push(o.index_of(v).ok_or_else(|| SemioticError::ValueOutsideSupport {
                sign: o.sign.clone(),
                value: v.to_string(),
            })?);
        }
        row_idx.push(idx);
    }
    let mut ports: Vec<Port> = Vec::new();
    for o in osets {
        let mut name = o.sign.clone();
        while ports.iter().any(|p| p.name == name) {
            name.push('\'');
        }
        ports.push(Port { name, is_source: true, oset: Rc::clone(o) });
    }
    Ok(MultiMorphism::from_fn(ports, alg, |idx| {
        let mut acc = alg.bot();
        for r in &row_idx {
            let mut t = alg.top();
            for (k, o) in osets.iter().enumerate() {
                t = alg.tensor(&t, o.sim(idx[k], r[k]));
            }
            acc = alg.join(&acc, &t);
        }
        acc
    })?)
}

// ---------------------------------------------------------------------------
// sign systems and models

#[derive(Clone, Debug)]
pub struct TotalSketch {
    pub name: String,
    pub config: Configuration,
}

#[derive(Clone, Debug)]
pub struct Binding {
    pub label: String,
    pub config: Configuration,
}

#[derive(Clone, Debug)]
pub struct SignSystem {
    pub ontology: Ontology,
    pub library: Library,
    pub totals: Vec<TotalSketch>,
    pub limit_bindings: Vec<Binding>,
    pub colimit_bindings: Vec<Binding>,
}

impl SignSystem {
    pub fn new(ontology: Ontology, library: Library) -> SignSystem {
        SignSystem {
            ontology,
            library,
            totals: Vec::new(),
            limit_bindings: Vec::new(),
            colimit_bindings: Vec::new(),
        }
    }

    /// Checks that every sketch configuration is valid in the library and
    /// every bound label exists.
    pub fn validate(&self) -> Result<(), SemioticError> {
        let all = self
            .totals
            .iter()
            .map(|t| &t.config)
            .chain(self.limit_bindings.iter().map(|b| &b.config))
            .chain(self.colimit_bindings.iter().map(|b| &b.config));
        for cfg in all {
            if let Err(issues) = validate_configuration(cfg, &self.library, &self.ontology) {
                return Err(SemioticError::Grammar(GrammarError::RuleBoundaryMismatch {
                    label: "sketch".to_string(),
                    detail: format!("{}", issues[0]),
                }));
            }
        }
        for b in self.limit_bindings.iter().chain(&self.colimit_bindings) {
            if self.library.req(&b.label).is_none() {
                return Err(SemioticError::UnboundLabel(b.label.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    pub algebra: Algebra,
    sign_map: BTreeMap<String, Rc<OmegaSet>>,
    comp_map: BTreeMap<String, MultiMorphism>,
}

impl Model {
    pub fn new(algebra: Algebra) -> Model {
        Model { algebra, sign_map: BTreeMap::new(), comp_map: BTreeMap::new() }
    }

    pub fn bind_sign(&mut self, base: &str, oset: Rc<OmegaSet>) {
        self.sign_map.insert(base.to_string(), oset);
    }

    pub fn bind_comp(&mut self, label: &str, m: MultiMorphism) {
        self.comp_map.insert(label.to_string(), m);
    }

    pub fn sign(&self, base: &str) -> Option<&Rc<OmegaSet>> {
        self.sign_map.get(base)
    }

    pub fn comp(&self, label: &str) -> Option<&MultiMorphism> {
        self.comp_map.get(label)
    }

    pub fn signs(&self) -> impl Iterator<Item = (&String, &Rc<OmegaSet>)> {
        self.sign_map.iter()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&String, &MultiMorphism)> {
        self.comp_map.iter()
    }

    /// Rebuilds a configuration as a diagram of interpreted vertices and
    /// arrows, with the free input vertices as sources.
    pub fn diagram_of(&self, cfg: &Configuration) -> Result<MultiDiagram, SemioticError> {
        let mut d = MultiDiagram::new();
        for v in cfg.vertices() {
            let oset = self
                .sign(&v.sign.base)
                .ok_or_else(|| SemioticError::UnboundSign(v.sign.base.clone()))?;
            d.add_vertex(&v.id, oset)?;
        }
        for a in cfg.arrows() {
            let m = self
                .comp(&a.label)
                .ok_or_else(|| SemioticError::UnboundLabel(a.label.clone()))?
                .clone();
            let src: Vec<&str> = a.src.iter().map(|s| s.as_str()).collect();
            let tgt: Vec<&str> = a.tgt.iter().map(|s| s.as_str()).collect();
            d.add_arrow(&a.id, m, &src, &tgt)?;
        }
        let srcs: Vec<String> = cfg.free_inputs().iter().map(|v| v.id.clone()).collect();
        let srcs: Vec<&str> = srcs.iter().map(|s| s.as_str()).collect();
        d.set_sources(&srcs)?;
        Ok(d)
    }

    /// The limit of the configuration's diagram: a table over every vertex.
    pub fn interpret(&self, cfg: &Configuration, cap: u64) -> Result<MultiMorphism, SemioticError> {
        Ok(self.diagram_of(cfg)?.limit(&self.algebra, cap)?)
    }

    pub fn interpret_colimit(
        &self,
        cfg: &Configuration,
        cap: u64,
    ) -> Result<MultiMorphism, SemioticError> {
        Ok(self.diagram_of(cfg)?.colimit(&self.algebra, cap)?)
    }

    /// The limit sup-projected onto the free boundary vertices.
    pub fn interpret_boundary(
        &self,
        cfg: &Configuration,
        cap: u64,
    ) -> Result<MultiMorphism, SemioticError> {
        let lim = self.interpret(cfg, cap)?;
        let mut keep: Vec<String> = cfg.free_inputs().iter().map(|v| v.id.clone()).collect();
        for v in cfg.free_outputs() {
            if !keep.contains(&v.id) {
                keep.push(v.id.clone());
            }
        }
        let keep: Vec<&str> = keep.iter().map(|s| s.as_str()).collect();
        Ok(lim.project_observable(&keep, &self.algebra)?)
    }

    /// Totality of the interpretation, sources = free inputs.
    pub fn totality_of(&self, cfg: &Configuration, cap: u64) -> Result<TotalityReport, SemioticError> {
        Ok(self.interpret(cfg, cap)?.totality(&self.algebra))
    }
}

/// Interprets composite labels by folding composition over their normal
/// form. Labels already bound keep their tables; unbound labels without a
/// rewrite rule are reported.
pub fn extend_model(
    atomic: &Model,
    sem: &Semantics,
    lib: &Library,
) -> Result<Model, SemioticError> {
    fn normal_form(label: &str, sem: &Semantics, out: &mut Vec<String>) {
        match sem.rule_for(label) {
            Some(rule) => {
                for l in &rule.rhs {
                    normal_form(l, sem, out);
                }
            }
            None => out.push(label.to_string()),
        }
    }
    let mut model = atomic.clone();
    for (label, _) in lib.entries() {
        if model.comp(label).is_some() {
            continue;
        }
        let mut seq = Vec::new();
        normal_form(label, sem, &mut seq);
        let mut tables = Vec::new();
        for l in &seq {
            match atomic.comp(l) {
                Some(m) => tables.push(m.clone()),
                None => return Err(SemioticError::UnboundLabel(l.clone())),
            }
        }
        let mut acc = match tables.first() {
            Some(t) => t.clone(),
            None => return Err(SemioticError::UnboundLabel(label.clone())),
        };
        for t in &tables[1..] {
            acc = MultiMorphism::compose(&acc, t, &atomic.algebra)?;
        }
        model.bind_comp(label, acc);
    }
    Ok(model)
}

// ---------------------------------------------------------------------------
// validation

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Best threshold at which the condition holds, when graded.
    pub degree: Option<Value>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn validate_model(
    sys: &SignSystem,
    model: &Model,
    sem: Option<&Semantics>,
    cap: u64,
) -> ValidationReport {
    let mut checks = Vec::new();
    let alg = &model.algebra;

    for t in &sys.totals {
        let outcome = match model.interpret(&t.config, cap) {
            Ok(lim) => {
                let rep = lim.totality(alg);
                CheckOutcome {
                    name: format!("total:{}", t.name),
                    passed: rep.holds,
                    degree: Some(rep.degree),
                    witness: rep.witness.map(|w| w.join(",")),
                }
            }
            Err(e) => CheckOutcome {
                name: format!("total:{}", t.name),
                passed: false,
                degree: None,
                witness: Some(format!("{}", e)),
            },
        };
        checks.push(outcome);
    }

    let mut bound = |bs: &[Binding], colimit: bool| {
        for b in bs {
            let name = format!(
                "{}:{}",
                if colimit { "colimit" } else { "limit" },
                b.label
            );
            let got = if colimit {
                model.interpret_colimit(&b.config, cap)
            } else {
                model.interpret(&b.config, cap)
            };
            let outcome = match (got, model.comp(&b.label)) {
                (Ok(want), Some(have)) => {
                    let witness = have.first_difference(&want, alg);
                    CheckOutcome { name, passed: witness.is_none(), degree: None, witness }
                }
                (_, None) => CheckOutcome {
                    name,
                    passed: false,
                    degree: None,
                    witness: Some(format!("label '{}' not interpreted", b.label)),
                },
                (Err(e), _) => CheckOutcome {
                    name,
                    passed: false,
                    degree: None,
                    witness: Some(format!("{}", e)),
                },
            };
            checks.push(outcome);
        }
    };
    bound(&sys.limit_bindings, false);
    bound(&sys.colimit_bindings, true);

    // requirement preservation: bound labels must match their words
    let mut req_witness = None;
    for (label, m) in model.comps() {
        let Some(req) = sys.library.req(label) else { continue };
        let (ri, ro) = word_io(req);
        let sp = m.source_positions();
        let tp = m.target_positions();
        let check_side = |positions: &[usize], signs: &Word| -> Option<String> {
            if positions.len() != signs.len() {
                return Some(format!(
                    "label '{}' has {} ports for word '{}'",
                    label,
                    positions.len(),
                    signs
                ));
            }
            for (&p, s) in positions.iter().zip(&signs.0) {
                let port = &m.ports()[p];
                if port.sign() != s.base {
                    return Some(format!(
                        "label '{}' port '{}' has sign '{}', word wants '{}'",
                        label,
                        port.name,
                        port.sign(),
                        s.base
                    ));
                }
                match model.sign(&s.base) {
                    Some(o) if o.elems == port.oset.elems => {}
                    Some(_) => {
                        return Some(format!(
                            "label '{}' port '{}' disagrees with the binding of sign '{}'",
                            label, port.name, s.base
                        ))
                    }
                    None => {
                        return Some(format!("sign '{}' has no interpretation", s.base))
                    }
                }
            }
            None
        };
        if req_witness.is_none() {
            req_witness = check_side(&sp, &ri).or_else(|| check_side(&tp, &ro));
        }
    }
    checks.push(CheckOutcome {
        name: "requirements".to_string(),
        passed: req_witness.is_none(),
        degree: None,
        witness: req_witness,
    });

    // ontology monotonicity: related signs embed with no similarity gain
    let mut ont_witness = None;
    'ont: for (a, b) in sys.ontology.strict_pairs() {
        let (Some(oa), Some(ob)) = (model.sign(&a), model.sign(&b)) else { continue };
        for (i, e) in oa.elems.iter().enumerate() {
            let Some(j) = ob.index_of(e) else {
                ont_witness = Some(format!(
                    "'{}' ≤ '{}' but element '{}' is missing from '{}'",
                    a, b, e, b
                ));
                break 'ont;
            };
            for (i2, e2) in oa.elems.iter().enumerate() {
                let Some(j2) = ob.index_of(e2) else { continue };
                if !alg.le_val(oa.sim(i, i2), ob.sim(j, j2)) {
                    ont_witness = Some(format!(
                        "'{}' ≤ '{}' but sim({},{}) grows downward",
                        a, b, e, e2
                    ));
                    break 'ont;
                }
            }
        }
    }
    checks.push(CheckOutcome {
        name: "ontology".to_string(),
        passed: ont_witness.is_none(),
        degree: None,
        witness: ont_witness,
    });

    if let Some(sem) = sem {
        for (label, _) in sys.library.entries() {
            let Some(rule) = sem.rule_for(label) else { continue };
            let name = format!("rule:{}", label);
            let outcome = (|| {
                let have = model
                    .comp(label)
                    .ok_or_else(|| SemioticError::UnboundLabel(label.clone()))?;
                let mut acc: Option<MultiMorphism> = None;
                for l in &rule.rhs {
                    let t = model
                        .comp(l)
                        .ok_or_else(|| SemioticError::UnboundLabel(l.clone()))?;
                    acc = Some(match acc {
                        None => t.clone(),
                        Some(a) => MultiMorphism::compose(&a, t, alg)?,
                    });
                }
                let folded = acc.ok_or_else(|| SemioticError::UnboundLabel(label.clone()))?;
                Ok::<Option<String>, SemioticError>(have.first_difference(&folded, alg))
            })();
            let outcome = match outcome {
                Ok(w) => CheckOutcome { name, passed: w.is_none(), degree: None, witness: w },
                Err(e) => CheckOutcome {
                    name,
                    passed: false,
                    degree: None,
                    witness: Some(format!("{}", e)),
                },
            };
            checks.push(outcome);
        }
    }

    ValidationReport { checks }
}

// ---------------------------------------------------------------------------
// semiotics and connectives

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgOp {
    Tensor,
    Implies,
    Meet,
    Join,
}

impl AlgOp {
    pub fn name(&self) -> &'static str {
        match self {
            AlgOp::Tensor => "tensor",
            AlgOp::Implies => "implies",
            AlgOp::Meet => "meet",
            AlgOp::Join => "join",
        }
    }

    pub fn apply(&self, alg: &Algebra, a: &Value, b: &Value) -> Value {
        match self {
            AlgOp::Tensor => alg.tensor(a, b),
            AlgOp::Implies => alg.implies(a, b),
            AlgOp::Meet => alg.meet(a, b),
            AlgOp::Join => alg.join(a, b),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Semiotic {
    pub system: SignSystem,
    pub model: Model,
}

impl Semiotic {
    pub fn new(system: SignSystem, model: Model) -> Semiotic {
        Semiotic { system, model }
    }

    pub fn validate(&self, sem: Option<&Semantics>, cap: u64) -> ValidationReport {
        validate_model(&self.system, &self.model, sem, cap)
    }

    /// Binds the reserved Ω sign to the algebra's carrier (idempotent).
    pub fn ensure_omega(&mut self) -> Result<Rc<OmegaSet>, SemioticError> {
        if let Some(o) = self.model.sign(OMEGA_SIGN) {
            return Ok(Rc::clone(o));
        }
        let o = omega_set(&self.model.algebra)?;
        self.system.ontology.push_base(OMEGA_SIGN);
        self.model.bind_sign(OMEGA_SIGN, Rc::clone(&o));
        Ok(o)
    }

    fn ensure_component(
        &mut self,
        label: &str,
        req: Word,
        table: MultiMorphism,
    ) -> Result<(), SemioticError> {
        match self.system.library.req(label) {
            Some(have) if have == &req => {}
            Some(have) => {
                return Err(SemioticError::LabelClash {
                    label: label.to_string(),
                    detail: format!("requirement '{}' vs '{}'", have, req),
                })
            }
            None => self.system.library.add(label, req, &self.system.ontology)?,
        }
        if self.model.comp(label).is_none() {
            self.model.bind_comp(label, table);
        }
        Ok(())
    }

    fn ensure_diagonal(&mut self, sign: &str) -> Result<String, SemioticError> {
        let label = format!("dia2_{}", sign);
        let oset = self
            .model
            .sign(sign)
            .ok_or_else(|| SemioticError::UnboundSign(sign.to_string()))?;
        let table = diagonal(oset, 2, &self.model.algebra);
        let req = Word::parse(&format!("{s} {s}+ {s}+", s = sign));
        self.ensure_component(&label, req, table)?;
        Ok(label)
    }

    fn ensure_op(&mut self, op: AlgOp) -> Result<String, SemioticError> {
        let omega = self.ensure_omega()?;
        let label = format!("op_{}", op.name());
        let alg = self.model.algebra.clone();
        let carrier = alg.carrier().ok_or(SemioticError::OmegaNeedsFiniteAlgebra)?;
        let ports = vec![
            Port::source("w0", &omega),
            Port::source("w1", &omega),
            Port::target("w", &omega),
        ];
        let table = MultiMorphism::from_fn(ports, &alg, |idx| {
            let v = op.apply(&alg, &carrier[idx[0]], &carrier[idx[1]]);
            alg.biimp(&v, &carrier[idx[2]])
        })?;
        let req = Word::parse(&format!("{o} {o} {o}+", o = OMEGA_SIGN));
        self.ensure_component(&label, req, table)?;
        Ok(label)
    }

    fn ensure_truth(&mut self) -> Result<String, SemioticError> {
        self.ensure_omega()?;
        let label = "truth".to_string();
        let table = truth(&self.model.algebra)?;
        self.ensure_component(&label, Word::parse(&format!("{}+", OMEGA_SIGN)), table)?;
        Ok(label)
    }

    fn ensure_codiagonal_omega(&mut self) -> Result<String, SemioticError> {
        let omega = self.ensure_omega()?;
        let label = format!("codia2_{}", OMEGA_SIGN);
        let table = codiagonal(&omega, 2, &self.model.algebra);
        let req = Word::parse(&format!("{o} {o} {o}+", o = OMEGA_SIGN));
        self.ensure_component(&label, req, table)?;
        Ok(label)
    }

    fn relation_output<'a>(&self, cfg: &'a Configuration, name: &str) -> Result<String, SemioticError> {
        let outs = cfg.free_outputs();
        match outs.as_slice() {
            [v] if v.sign.base == OMEGA_SIGN => Ok(v.id.clone()),
            _ => Err(SemioticError::NotARelation(name.to_string())),
        }
    }

    /// Combines two relation configurations with an algebra operator:
    /// inputs of equal sign are forked from a fresh shared vertex through a
    /// diagonal, and the two Ω outputs feed the operator component.
    pub fn connective(
        &mut self,
        op: AlgOp,
        d0: &Configuration,
        d1: &Configuration,
    ) -> Result<Configuration, SemioticError> {
        let o0 = self.relation_output(d0, "left operand")?;
        let o1 = self.relation_output(d1, "right operand")?;
        let op_label = self.ensure_op(op)?;

        let mut out = Configuration::new();
        for v in d0.vertices() {
            out.add_vertex(&v.id, v.sign.clone())?;
        }
        let mut taken: Vec<String> = d0.vertices().iter().map(|v| v.id.clone()).collect();
        let mut rename1: BTreeMap<String, String> = BTreeMap::new();
        for v in d1.vertices() {
            let mut id = v.id.clone();
            while taken.contains(&id) {
                id.push('\'');
            }
            taken.push(id.clone());
            rename1.insert(v.id.clone(), id.clone());
            out.add_vertex(&id, v.sign.clone())?;
        }
        let mut arrow_taken: Vec<String> = d0.arrows().iter().map(|a| a.id.clone()).collect();
        for a in d0.arrows() {
            let src: Vec<&str> = a.src.iter().map(|s| s.as_str()).collect();
            let tgt: Vec<&str> = a.tgt.iter().map(|s| s.as_str()).collect();
            out.add_arrow(&a.id, &a.label, &src, &tgt)?;
        }
        for a in d1.arrows() {
            let mut id = a.id.clone();
            while arrow_taken.contains(&id) {
                id.push('\'');
            }
            arrow_taken.push(id.clone());
            let src: Vec<String> = a.src.iter().map(|s| rename1[s].clone()).collect();
            let tgt: Vec<String> = a.tgt.iter().map(|s| rename1[s].clone()).collect();
            let src: Vec<&str> = src.iter().map(|s| s.as_str()).collect();
            let tgt: Vec<&str> = tgt.iter().map(|s| s.as_str()).collect();
            out.add_arrow(&id, &a.label, &src, &tgt)?;
        }

        // pair same-signed free inputs of the operands, in order
        let ins0: Vec<(String, String)> = d0
            .free_inputs()
            .iter()
            .map(|v| (v.id.clone(), v.sign.base.clone()))
            .collect();
        let ins1: Vec<(String, String)> = d1
            .free_inputs()
            .iter()
            .map(|v| (rename1[&v.id].clone(), v.sign.base.clone()))
            .collect();
        let mut used = vec![false; ins1.len()];
        let mut joins = Vec::new();
        for (id0, sign) in &ins0 {
            for (k, (id1, sign1)) in ins1.iter().enumerate() {
                if !used[k] && sign1 == sign {
                    used[k] = true;
                    joins.push((id0.clone(), id1.clone(), sign.clone()));
                    break;
                }
            }
        }
        for (n, (id0, id1, sign)) in joins.iter().enumerate() {
            let dia = self.ensure_diagonal(sign)?;
            let mut vid = format!("j{}", n);
            while taken.contains(&vid) {
                vid.push('\'');
            }
            taken.push(vid.clone());
            out.add_vertex(&vid, Sign::input(sign))?;
            let mut aid = format!("dup{}", n);
            while arrow_taken.contains(&aid) {
                aid.push('\'');
            }
            arrow_taken.push(aid.clone());
            out.add_arrow(&aid, &dia, &[vid.as_str()], &[id0.as_str(), id1.as_str()])?;
        }

        let o1 = rename1[&o1].clone();
        let mut rid = "r".to_string();
        while taken.contains(&rid) {
            rid.push('\'');
        }
        out.add_vertex(&rid, Sign::input(OMEGA_SIGN))?;
        let mut aid = "app".to_string();
        while arrow_taken.contains(&aid) {
            aid.push('\'');
        }
        out.add_arrow(&aid, &op_label, &[o0.as_str(), o1.as_str()], &[rid.as_str()])?;
        Ok(out)
    }

    /// A relation is true when the limit of it, glued to the truth constant
    /// through an Ω codiagonal, is total over the relation's inputs.
    pub fn is_true_relation(&mut self, cfg: &Configuration, name: &str, cap: u64) -> Result<bool, SemioticError> {
        let o = self.relation_output(cfg, name)?;
        let truth_label = self.ensure_truth()?;
        let codia = self.ensure_codiagonal_omega()?;
        let mut ext = cfg.clone();
        let mut tid = "t".to_string();
        while ext.vertices().iter().any(|v| v.id == tid) {
            tid.push('\'');
        }
        ext.add_vertex(&tid, Sign::input(OMEGA_SIGN))?;
        let mut wid = "tw".to_string();
        while ext.vertices().iter().any(|v| v.id == wid) {
            wid.push('\'');
        }
        ext.add_vertex(&wid, Sign::input(OMEGA_SIGN))?;
        let fresh_arrow = |ext: &Configuration, want: &str| {
            let mut id = want.to_string();
            while ext.arrows().iter().any(|a| a.id == id) {
                id.push('\'');
            }
            id
        };
        let a0 = fresh_arrow(&ext, "tc");
        ext.add_arrow(&a0, &truth_label, &[], &[&tid])?;
        let a1 = fresh_arrow(&ext, "te");
        ext.add_arrow(&a1, &codia, &[o.as_str(), tid.as_str()], &[wid.as_str()])?;
        Ok(self.model.totality_of(&ext, cap)?.holds)
    }

    /// Registers a dataset as a component whose graph joins the rows, and
    /// returns the one-arrow configuration reading it.
    pub fn encode_dataset(
        &mut self,
        name: &str,
        signs: &[&str],
        rows: &[Vec<&str>],
    ) -> Result<Configuration, SemioticError> {
        let omega = self.ensure_omega()?;
        let mut osets = Vec::new();
        for s in signs {
            osets.push(Rc::clone(self.model.sign(s).ok_or_else(|| {
                SemioticError::UnboundSign(s.to_string())
            })?));
        }
        let alg = self.model.algebra.clone();
        let concept = dataset_concept(&osets, rows, &alg)?;
        let graph = relation_graph(&concept, &omega, &alg)?;
        let mut req = Vec::new();
        for s in signs {
            req.push(Sign::input(s));
        }
        req.push(Sign::output(OMEGA_SIGN));
        self.ensure_component(name, Word(req), graph)?;

        let mut cfg = Configuration::new();
        let mut xs = Vec::new();
        for (k, s) in signs.iter().enumerate() {
            let id = format!("{}_x{}", name, k);
            cfg.add_vertex(&id, Sign::input(s))?;
            xs.push(id);
        }
        let w = format!("{}_w", name);
        cfg.add_vertex(&w, Sign::input(OMEGA_SIGN))?;
        let srcs: Vec<&str> = xs.iter().map(|s| s.as_str()).collect();
        cfg.add_arrow(&format!("{}_e", name), name, &srcs, &[w.as_str()])?;
        Ok(cfg)
    }
}

/// Pointwise oracle for connectives: shared source signs are identified,
/// the op is applied to the two value tables.
pub fn combine_relations(
    op: AlgOp,
    r0: &MultiMorphism,
    r1: &MultiMorphism,
    alg: &Algebra,
) -> Result<MultiMorphism, SemioticError> {
    let mut ports: Vec<Port> = r0.ports().to_vec();
    // map r1 ports onto existing same-sign ports or append
    let mut r1_slot = Vec::new();
    let mut claimed = vec![false; ports.len()];
    for p in r1.ports() {
        let mut found = None;
        for (k, q) in ports.iter().enumerate() {
            if !claimed[k] && q.sign() == p.sign() && q.oset.elems == p.oset.elems {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => {
                claimed[k] = true;
                r1_slot.push(k);
            }
            None => {
                let mut q = p.clone();
                while ports.iter().any(|x| x.name == q.name) {
                    q.name.push('\'');
                }
                ports.push(q);
                claimed.push(true);
                r1_slot.push(ports.len() - 1);
            }
        }
    }
    let n0 = r0.ports().len();
    Ok(MultiMorphism::from_fn(ports, alg, |idx| {
        let i0: Vec<usize> = idx[..n0].to_vec();
        let i1: Vec<usize> = r1_slot.iter().map(|&k| idx[k]).collect();
        op.apply(alg, r0.entry(&i0), r1.entry(&i1))
    })?)
}

// ---------------------------------------------------------------------------
// natural transformations

fn epi_witness(f: &MultiMorphism, alg: &Algebra) -> Result<Option<String>, SemioticError> {
    let src: Vec<Rc<OmegaSet>> = f
        .source_positions()
        .iter()
        .map(|&i| Rc::clone(&f.ports()[i].oset))
        .collect();
    let tgt: Vec<Rc<OmegaSet>> = f
        .target_positions()
        .iter()
        .map(|&i| Rc::clone(&f.ports()[i].oset))
        .collect();
    let alpha = MultiMorphism::similarity(&src, alg);
    let beta = MultiMorphism::similarity(&tgt, alg);
    let lhs = MultiMorphism::compose(
        &MultiMorphism::compose(&f.transpose(), &alpha, alg)?,
        f,
        alg,
    )?;
    Ok(lhs.first_difference(&beta, alg))
}

/// Checks f ⊗ M2(D) = M1(D) ⊗ g within epsilon, where both interpretations
/// are taken at the configuration's boundary. f and g must be epi.
pub fn check_natural_transformation(
    m1: &Model,
    m2: &Model,
    f: &MultiMorphism,
    g: &MultiMorphism,
    cfg: &Configuration,
    cap: u64,
) -> Result<bool, SemioticError> {
    let alg = &m1.algebra;
    if let Some(w) = epi_witness(f, alg)? {
        return Err(SemioticError::NotEpi { which: "f".to_string(), witness: w });
    }
    if let Some(w) = epi_witness(g, alg)? {
        return Err(SemioticError::NotEpi { which: "g".to_string(), witness: w });
    }
    let b1 = m1.interpret_boundary(cfg, cap)?;
    let b2 = m2.interpret_boundary(cfg, cap)?;
    let left = MultiMorphism::compose(f, &b2, alg)?;
    let right = MultiMorphism::compose(&b1, g, alg)?;
    Ok(left.approx_eq(&right, alg))
}

// ---------------------------------------------------------------------------
// integration

/// Component of a product-valued entry.
pub fn project_value(v: &Value, factor: usize) -> Value {
    v.tuple()[factor].clone()
}

pub fn project_oset(o: &OmegaSet, factor: usize, factor_alg: &Algebra) -> OmegaSet {
    let refs: Vec<&str> = o.elems.iter().map(|s| s.as_str()).collect();
    let mut out = OmegaSet::crisp(&o.sign, &refs, factor_alg);
    for i in 0..o.len() {
        for j in 0..=i {
            out.set_sim(i, j, project_value(o.sim(i, j), factor));
        }
    }
    out
}

pub fn project_table(
    m: &MultiMorphism,
    factor: usize,
    factor_alg: &Algebra,
) -> Result<MultiMorphism, SemioticError> {
    let ports: Vec<Port> = m
        .ports()
        .iter()
        .map(|p| Port {
            name: p.name.clone(),
            is_source: p.is_source,
            oset: Rc::new(project_oset(&p.oset, factor, factor_alg)),
        })
        .collect();
    Ok(MultiMorphism::from_fn(ports, factor_alg, |idx| {
        project_value(m.entry(idx), factor)
    })?)
}

/// Merges semiotics over the product of their algebras. Shared signs and
/// labels (apart from Ω) must agree across operands; every table is pushed
/// into the product by the ⊤-filler embedding of its owners and the
/// embeddings are ⊗-combined, so a value owned by one operand reads
/// (…,⊤,v,⊤,…) and a shared one repeats v at each owner's slot.
pub fn integrate(named: &[(&str, &Semiotic)]) -> Result<Semiotic, SemioticError> {
    assert!(!named.is_empty(), "integration needs at least one operand");
    let algs: Vec<Algebra> = named.iter().map(|(_, s)| s.model.algebra.clone()).collect();
    let prod = Algebra::product_of(algs.clone()).expect("nonempty operand list");

    // merged ontology: union of bases and of order pairs; signs bound only
    // in a model still count as bases
    let mut bases: Vec<String> = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (_, s) in named {
        for b in s.system.ontology.bases() {
            if !bases.contains(b) {
                bases.push(b.clone());
            }
        }
        for (b, _) in s.model.signs() {
            if !bases.contains(b) {
                bases.push(b.clone());
            }
        }
        for p in s.system.ontology.strict_pairs() {
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
    }
    let base_refs: Vec<&str> = bases.iter().map(|s| s.as_str()).collect();
    let pair_refs: Vec<(&str, &str)> =
        pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let ontology = Ontology::new(&base_refs, &pair_refs).map_err(|e| {
        SemioticError::IntegrationConflict {
            left: named[0].0.to_string(),
            right: named[named.len() - 1].0.to_string(),
            name: "ontology".to_string(),
            witness: format!("{}", e),
        }
    })?;

    // conflict checks on shared signs and labels
    let owners_of_sign = |base: &str| -> Vec<usize> {
        named
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.model.sign(base).is_some())
            .map(|(i, _)| i)
            .collect()
    };
    for base in &bases {
        if base == OMEGA_SIGN {
            continue;
        }
        let owners = owners_of_sign(base);
        for w in owners.windows(2) {
            let a = named[w[0]].1.model.sign(base).unwrap();
            let b = named[w[1]].1.model.sign(base).unwrap();
            if a.elems != b.elems {
                return Err(SemioticError::IntegrationConflict {
                    left: named[w[0]].0.to_string(),
                    right: named[w[1]].0.to_string(),
                    name: base.clone(),
                    witness: "different supports".to_string(),
                });
            }
            let fa = &named[w[0]].1.model.algebra;
            for i in 0..a.len() {
                for j in 0..a.len() {
                    if !fa.eq_val(a.sim(i, j), b.sim(i, j)) {
                        return Err(SemioticError::IntegrationConflict {
                            left: named[w[0]].0.to_string(),
                            right: named[w[1]].0.to_string(),
                            name: base.clone(),
                            witness: format!("sim({},{})", a.elems[i], a.elems[j]),
                        });
                    }
                }
            }
        }
    }

    let mut library = Library::new();
    let mut label_order: Vec<String> = Vec::new();
    for (idx, (nm, s)) in named.iter().enumerate() {
        for (label, req) in s.system.library.entries() {
            match library.req(label) {
                None => {
                    library.add(label, req.clone(), &ontology)?;
                    label_order.push(label.clone());
                }
                Some(have) if have == req => {}
                Some(have) => {
                    let prev = named[..idx]
                        .iter()
                        .find(|(_, t)| t.system.library.req(label).is_some())
                        .map(|(n, _)| *n)
                        .unwrap_or(named[0].0);
                    return Err(SemioticError::IntegrationConflict {
                        left: prev.to_string(),
                        right: nm.to_string(),
                        name: label.clone(),
                        witness: format!("requirements '{}' vs '{}'", have, req),
                    });
                }
            }
        }
    }
    for label in &label_order {
        let owners: Vec<usize> = named
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.model.comp(label).is_some())
            .map(|(i, _)| i)
            .collect();
        for w in owners.windows(2) {
            let a = named[w[0]].1.model.comp(label).unwrap();
            let b = named[w[1]].1.model.comp(label).unwrap();
            if let Some(witness) = a.first_difference(b, &named[w[0]].1.model.algebra) {
                return Err(SemioticError::IntegrationConflict {
                    left: named[w[0]].0.to_string(),
                    right: named[w[1]].0.to_string(),
                    name: label.clone(),
                    witness,
                });
            }
        }
    }

    // Ω handling: rebind from the product carrier when any operand uses it
    let needs_omega = named.iter().any(|(_, s)| s.model.sign(OMEGA_SIGN).is_some());
    let new_omega = if needs_omega { Some(omega_set(&prod)?) } else { None };
    // per operand: product-carrier index of each embedded operand-carrier value
    let omega_backmap: Vec<Option<BTreeMap<usize, usize>>> = named
        .iter()
        .enumerate()
        .map(|(i, (_, s))| {
            s.model.sign(OMEGA_SIGN)?;
            let fc = algs[i].carrier()?;
            let pc = prod.carrier()?;
            let mut map = BTreeMap::new();
            for (k, v) in fc.iter().enumerate() {
                let emb = prod.embed_upper(i, v);
                let pos = pc.iter().position(|c| prod.eq_val(c, &emb))?;
                map.insert(pos, k);
            }
            Some(map)
        })
        .collect();
    if needs_omega {
        for (i, (_, s)) in named.iter().enumerate() {
            if s.model.sign(OMEGA_SIGN).is_some() && omega_backmap[i].is_none() {
                return Err(SemioticError::OmegaNeedsFiniteAlgebra);
            }
        }
    }

    let mut sign_map: BTreeMap<String, Rc<OmegaSet>> = BTreeMap::new();
    for base in &bases {
        if base == OMEGA_SIGN {
            if let Some(o) = &new_omega {
                sign_map.insert(base.clone(), Rc::clone(o));
            }
            continue;
        }
        let owners = owners_of_sign(base);
        if owners.is_empty() {
            continue;
        }
        let first = named[owners[0]].1.model.sign(base).unwrap();
        let refs: Vec<&str> = first.elems.iter().map(|s| s.as_str()).collect();
        let mut merged = OmegaSet::crisp(base, &refs, &prod);
        for i in 0..first.len() {
            for j in 0..=i {
                let mut v = prod.top();
                for &o in &owners {
                    let s = named[o].1.model.sign(base).unwrap();
                    v = prod.tensor(&v, &prod.embed_upper(o, s.sim(i, j)));
                }
                merged.set_sim(i, j, v);
            }
        }
        sign_map.insert(base.clone(), Rc::new(merged));
    }

    let mut comp_map: BTreeMap<String, MultiMorphism> = BTreeMap::new();
    for label in &label_order {
        let owners: Vec<usize> = named
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.model.comp(label).is_some())
            .map(|(i, _)| i)
            .collect();
        if owners.is_empty() {
            continue;
        }
        let proto = named[owners[0]].1.model.comp(label).unwrap();
        let ports: Vec<Port> = proto
            .ports()
            .iter()
            .map(|p| {
                let oset = sign_map
                    .get(p.sign())
                    .cloned()
                    .ok_or_else(|| SemioticError::UnboundSign(p.sign().to_string()))?;
                Ok(Port { name: p.name.clone(), is_source: p.is_source, oset })
            })
            .collect::<Result<_, SemioticError>>()?;
        let omega_ports: Vec<usize> = proto
            .ports()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.sign() == OMEGA_SIGN)
            .map(|(i, _)| i)
            .collect();
        let table = MultiMorphism::from_fn(ports, &prod, |idx| {
            let mut acc = prod.top();
            for &o in &owners {
                let t = named[o].1.model.comp(label).unwrap();
                // pull Ω indices back through this owner's embedding
                let mut oidx = idx.to_vec();
                let mut ok = true;
                for &p in &omega_ports {
                    match omega_backmap[o].as_ref().and_then(|m| m.get(&idx[p])) {
                        Some(&k) => oidx[p] = k,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                let lifted = if ok {
                    prod.embed_upper(o, t.entry(&oidx))
                } else {
                    prod.bot()
                };
                acc = prod.tensor(&acc, &lifted);
            }
            acc
        })?;
        comp_map.insert(label.clone(), table);
    }

    let mut totals = Vec::new();
    let mut total_names: Vec<String> = Vec::new();
    let mut limit_bindings = Vec::new();
    let mut colimit_bindings = Vec::new();
    for (_, s) in named {
        for t in &s.system.totals {
            let mut name = t.name.clone();
            while total_names.contains(&name) {
                name.push('\'');
            }
            total_names.push(name.clone());
            totals.push(TotalSketch { name, config: t.config.clone() });
        }
        limit_bindings.extend(s.system.limit_bindings.iter().cloned());
        colimit_bindings.extend(s.system.colimit_bindings.iter().cloned());
    }

    let mut model = Model::new(prod);
    for (base, o) in sign_map {
        model.bind_sign(&base, o);
    }
    for (label, t) in comp_map {
        model.bind_comp(&label, t);
    }
    Ok(Semiotic {
        system: SignSystem { ontology, library, totals, limit_bindings, colimit_bindings },
        model,
    })
}

/// The schema value: ⊗ over vertex tables ⊗ the ⋁ over connecting arrow
/// tables. Arrow ports bind to the first result port with the same sign
/// and support. With no arrows the join term is the neutral ⊤ (alignment
/// imposes no constraint), so the result is the plain ⊗ of the vertices.
pub fn integration_schema_colimit(
    vertex_tables: &[&MultiMorphism],
    arrows: &[&MultiMorphism],
    alg: &Algebra,
    cap: u64,
) -> Result<MultiMorphism, DiagramError> {
    let mut ports: Vec<Port> = Vec::new();
    let mut spans = Vec::new();
    for t in vertex_tables {
        let start = ports.len();
        for p in t.ports() {
            let mut q = p.clone();
            while ports.iter().any(|x| x.name == q.name) {
                q.name.push('\'');
            }
            ports.push(q);
        }
        spans.push((start, t.ports().len()));
    }
    let mut required: u128 = 1;
    for p in &ports {
        required = required.saturating_mul(p.oset.len() as u128);
    }
    if required > cap as u128 {
        return Err(DiagramError::CapExceeded { required, cap });
    }

    let mut arrow_slots: Vec<Vec<usize>> = Vec::new();
    for a in arrows {
        let mut slots = Vec::new();
        for p in a.ports() {
            let found = ports.iter().enumerate().find(|(k, q)| {
                q.sign() == p.sign() && q.oset.elems == p.oset.elems && !slots.contains(k)
            });
            match found {
                Some((k, _)) => slots.push(k),
                None => {
                    return Err(DiagramError::Shape(format!(
                        "arrow port '{}' matches no vertex port",
                        p.name
                    )))
                }
            }
        }
        arrow_slots.push(slots);
    }

    Ok(MultiMorphism::from_fn(ports, alg, |idx| {
        let mut acc = alg.top();
        for (t, (start, len)) in vertex_tables.iter().zip(&spans) {
            let sub: Vec<usize> = idx[*start..*start + *len].to_vec();
            acc = alg.tensor(&acc, t.entry(&sub));
        }
        if !arrows.is_empty() {
            let mut join = alg.bot();
            for (a, slots) in arrows.iter().zip(&arrow_slots) {
                let sub: Vec<usize> = slots.iter().map(|&k| idx[k]).collect();
                join = alg.join(&join, a.entry(&sub));
            }
            acc = alg.tensor(&acc, &join);
        }
        acc
    })
    .expect("unique port names"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fabs;
    use crate::diagram::DEFAULT_CAP;
    use crate::grammar::RefineRule;
    use crate::relation::tuples;

    fn n(x: f64) -> Value {
        Value::Num(x)
    }

    fn crisp(sign: &str, elems: &[&str], alg: &Algebra) -> Rc<OmegaSet> {
        Rc::new(OmegaSet::crisp(sign, elems, alg))
    }

    #[test]
    fn diagonal_values_and_codiagonal_transpose() {
        let alg = Algebra::product();
        let mut ao = OmegaSet::crisp("a", &["0", "1", "2"], &alg);
        ao.set_sim(0, 1, n(0.5));
        let a = Rc::new(ao);
        let d = diagonal(&a, 2, &alg);
        assert!(fabs(d.entry(&[0, 0, 1]).num() - 0.5) < 1e-12);
        assert!(fabs(d.entry(&[0, 0, 0]).num() - 1.0) < 1e-12);
        assert!(fabs(d.entry(&[0, 1, 2]).num() - 0.0) < 1e-12);
        let c = codiagonal(&a, 2, &alg);
        assert_eq!(c.source_positions().len(), 2);
        assert!(alg.eq_val(c.entry(&[0, 0, 1]), d.entry(&[0, 0, 1])));
    }

    #[test]
    fn rename_round_trip_is_identity() {
        let alg = Algebra::lukasiewicz();
        let s = crisp("s", &["x", "y"], &alg);
        let u = crisp("u", &["x", "y"], &alg);
        let there = rename(&s, &u, &alg).unwrap();
        let back = rename(&u, &s, &alg).unwrap();
        let round = MultiMorphism::compose(&there, &back, &alg).unwrap();
        let id = MultiMorphism::from_fn(
            vec![Port::source("s", &s), Port::target("s2", &s)],
            &alg,
            |idx| if idx[0] == idx[1] { alg.top() } else { alg.bot() },
        )
        .unwrap();
        assert!(round.approx_eq(&id, &alg));
    }

    #[test]
    fn truth_carries_the_carrier() {
        let alg = Algebra::chain(3).unwrap();
        let t = truth(&alg).unwrap();
        assert!(fabs(t.entry(&[0]).num()) < 1e-12);
        assert!(fabs(t.entry(&[1]).num() - 0.5) < 1e-12);
        assert!(fabs(t.entry(&[2]).num() - 1.0) < 1e-12);
        assert!(omega_set(&Algebra::godel()).is_err());
    }

    #[test]
    fn graph_and_value_are_inverse() {
        let alg = Algebra::chain(5).unwrap();
        let a = crisp("a", &["u", "v"], &alg);
        let omega = omega_set(&alg).unwrap();
        let vals = MultiMorphism::from_fn(vec![Port::source("a", &a)], &alg, |idx| {
            n([0.25, 0.75][idx[0]])
        })
        .unwrap();
        let g = relation_graph(&vals, &omega, &alg).unwrap();
        // graph at the matching carrier point is top
        assert!(alg.is_top(g.entry(&[0, 1])));
        let back = relation_value(&g, OMEGA_SIGN, &alg).unwrap();
        assert!(back.approx_eq(&vals, &alg));
        // out-of-carrier table values are rejected
        let bad = MultiMorphism::from_fn(vec![Port::source("a", &a)], &alg, |_| n(0.3)).unwrap();
        assert!(relation_graph(&bad, &omega, &alg).is_err());
    }

    fn tiny_system(alg: &Algebra) -> (SignSystem, Model) {
        let onto = Ontology::discrete(&["a", "b"]);
        let mut lib = Library::new();
        lib.add("f", Word::parse("a b+"), &onto).unwrap();
        lib.add("cmp", Word::parse("a a"), &onto).unwrap();
        let sys = SignSystem::new(onto, lib);
        let model = Model::new(alg.clone());
        (sys, model)
    }

    #[test]
    fn sketch_validation_reports_totality_and_bindings() {
        let alg = Algebra::lukasiewicz();
        let (mut sys, mut model) = tiny_system(&alg);
        let a = crisp("a", &["a0", "a1"], &alg);
        let b = crisp("b", &["b0", "b1"], &alg);
        model.bind_sign("a", Rc::clone(&a));
        model.bind_sign("b", Rc::clone(&b));
        let f = MultiMorphism::from_fn(
            vec![Port::source("x", &a), Port::target("y", &b)],
            &alg,
            |idx| if idx[0] == idx[1] { n(1.0) } else { n(0.4) },
        )
        .unwrap();
        model.bind_comp("f", f.clone());
        let all_one = MultiMorphism::from_fn(
            vec![Port::source("x", &a), Port::source("x2", &a)],
            &alg,
            |_| n(1.0),
        )
        .unwrap();
        model.bind_comp("cmp", all_one);

        let mut total_cfg = Configuration::new();
        total_cfg.add_vertex("u", Sign::input("a")).unwrap();
        total_cfg.add_vertex("v", Sign::input("a")).unwrap();
        total_cfg.add_arrow("e", "cmp", &["u", "v"], &[]).unwrap();
        sys.totals.push(TotalSketch { name: "cmp_total".to_string(), config: total_cfg });

        let mut lim_cfg = Configuration::new();
        lim_cfg.add_vertex("u", Sign::input("a")).unwrap();
        lim_cfg.add_vertex("v", Sign::input("b")).unwrap();
        lim_cfg.add_arrow("e", "f", &["u"], &["v"]).unwrap();
        sys.limit_bindings.push(Binding { label: "f".to_string(), config: lim_cfg });

        sys.validate().unwrap();
        let rep = validate_model(&sys, &model, None, DEFAULT_CAP);
        assert!(rep.passed(), "{:?}", rep.checks);

        // corrupt the total table: the report names the offending tuple
        let zeroed = MultiMorphism::from_fn(
            vec![Port::source("x", &a), Port::source("x2", &a)],
            &alg,
            |idx| if idx == [0, 1] { n(0.0) } else { n(1.0) },
        )
        .unwrap();
        model.bind_comp("cmp", zeroed);
        let rep = validate_model(&sys, &model, None, DEFAULT_CAP);
        let tot = rep.checks.iter().find(|c| c.name == "total:cmp_total").unwrap();
        assert!(!tot.passed);
        assert_eq!(tot.witness.as_deref(), Some("a0,a1"));
        assert!(fabs(tot.degree.as_ref().unwrap().num()) < 1e-12);
    }

    #[test]
    fn extension_folds_normal_forms() {
        let alg = Algebra::godel();
        let onto = Ontology::discrete(&["a", "b", "c", "d"]);
        let mut lib = Library::new();
        lib.add("ab", Word::parse("a b+"), &onto).unwrap();
        lib.add("bc", Word::parse("b c+"), &onto).unwrap();
        lib.add("cd", Word::parse("c d+"), &onto).unwrap();
        lib.add("ac", Word::parse("a c+"), &onto).unwrap();
        lib.add("ad", Word::parse("a d+"), &onto).unwrap();
        let mut sizes = BTreeMap::new();
        sizes.insert("ac".to_string(), 3u64);
        sizes.insert("ad".to_string(), 4u64);
        let sem = Semantics::new(
            vec![
                RefineRule { lhs: "ac".to_string(), rhs: vec!["ab".into(), "bc".into()] },
                RefineRule {
                    lhs: "ad".to_string(),
                    rhs: vec!["ab".into(), "bc".into(), "cd".into()],
                },
            ],
            vec![],
            sizes,
            &lib,
            &onto,
        )
        .unwrap();

        let a = crisp("a", &["a0", "a1"], &alg);
        let b = crisp("b", &["b0", "b1"], &alg);
        let c = crisp("c", &["c0", "c1"], &alg);
        let d = crisp("d", &["d0", "d1"], &alg);
        let table = |s: &Rc<OmegaSet>, t: &Rc<OmegaSet>, vals: [f64; 4]| {
            MultiMorphism::from_fn(
                vec![Port::source(&s.sign, s), Port::target(&t.sign, t)],
                &alg,
                move |idx| n(vals[idx[0] * 2 + idx[1]]),
            )
            .unwrap()
        };
        let mut atomic = Model::new(alg.clone());
        atomic.bind_sign("a", Rc::clone(&a));
        atomic.bind_sign("b", Rc::clone(&b));
        atomic.bind_sign("c", Rc::clone(&c));
        atomic.bind_sign("d", Rc::clone(&d));
        let m_ab = table(&a, &b, [0.9, 0.2, 0.4, 0.8]);
        let m_bc = table(&b, &c, [0.7, 0.1, 0.3, 0.6]);
        let m_cd = table(&c, &d, [0.5, 0.9, 0.2, 0.4]);
        atomic.bind_comp("ab", m_ab.clone());
        atomic.bind_comp("bc", m_bc.clone());
        atomic.bind_comp("cd", m_cd.clone());

        let ext = extend_model(&atomic, &sem, &lib).unwrap();
        let want_ac = MultiMorphism::compose(&m_ab, &m_bc, &alg).unwrap();
        assert!(ext.comp("ac").unwrap().approx_eq(&want_ac, &alg));
        let left = MultiMorphism::compose(&want_ac, &m_cd, &alg).unwrap();
        let right =
            MultiMorphism::compose(&m_ab, &MultiMorphism::compose(&m_bc, &m_cd, &alg).unwrap(), &alg)
                .unwrap();
        assert!(ext.comp("ad").unwrap().approx_eq(&left, &alg));
        assert!(ext.comp("ad").unwrap().approx_eq(&right, &alg));

        // refinement does not change the boundary interpretation
        let mut sizes2 = BTreeMap::new();
        sizes2.insert("ac".to_string(), 3u64);
        let sem2 = Semantics::new(
            vec![RefineRule { lhs: "ac".to_string(), rhs: vec!["ab".into(), "bc".into()] }],
            vec![],
            sizes2,
            &lib,
            &onto,
        )
        .unwrap();
        let mut cfg = Configuration::new();
        cfg.add_vertex("x", Sign::input("a")).unwrap();
        cfg.add_vertex("y", Sign::input("c")).unwrap();
        cfg.add_arrow("e", "ac", &["x"], &["y"]).unwrap();
        let refined = crate::grammar::refine(&cfg, &sem2, &lib, &onto).unwrap();
        let before = ext.interpret_boundary(&cfg, DEFAULT_CAP).unwrap();
        let after = ext.interpret_boundary(&refined, DEFAULT_CAP).unwrap();
        assert!(before.approx_eq(&after, &alg));
    }

    fn relation_semiotic(alg: &Algebra) -> Semiotic {
        let onto = Ontology::discrete(&["a"]);
        let lib = Library::new();
        let sys = SignSystem::new(onto, lib);
        let mut model = Model::new(alg.clone());
        model.bind_sign("a", crisp("a", &["u", "v"], alg));
        Semiotic::new(sys, model)
    }

    fn register_relation(s: &mut Semiotic, name: &str, vals: [f64; 2]) -> Configuration {
        let alg = s.model.algebra.clone();
        let omega = s.ensure_omega().unwrap();
        let a = Rc::clone(s.model.sign("a").unwrap());
        let table =
            MultiMorphism::from_fn(vec![Port::source("a", &a)], &alg, |idx| n(vals[idx[0]]))
                .unwrap();
        let graph = relation_graph(&table, &omega, &alg).unwrap();
        s.ensure_component(name, Word::parse(&format!("a {}+", OMEGA_SIGN)), graph)
            .unwrap();
        let mut cfg = Configuration::new();
        cfg.add_vertex(&format!("{}_x", name), Sign::input("a")).unwrap();
        cfg.add_vertex(&format!("{}_w", name), Sign::input(OMEGA_SIGN)).unwrap();
        cfg.add_arrow(
            &format!("{}_e", name),
            name,
            &[&format!("{}_x", name)],
            &[&format!("{}_w", name)],
        )
        .unwrap();
        cfg
    }

    #[test]
    fn connectives_track_the_pointwise_oracle() {
        let alg = Algebra::chain(5).unwrap();
        let mut s = relation_semiotic(&alg);
        let d0 = register_relation(&mut s, "r0", [0.25, 0.75]);
        let d1 = register_relation(&mut s, "r1", [0.5, 0.5]);
        let a = Rc::clone(s.model.sign("a").unwrap());
        let v0 = MultiMorphism::from_fn(vec![Port::source("a", &a)], &alg, |idx| {
            n([0.25, 0.75][idx[0]])
        })
        .unwrap();
        let v1 = MultiMorphism::from_fn(vec![Port::source("a", &a)], &alg, |idx| {
            n([0.5, 0.5][idx[0]])
        })
        .unwrap();

        for op in [AlgOp::Tensor, AlgOp::Implies, AlgOp::Meet, AlgOp::Join] {
            let cfg = s.connective(op, &d0, &d1).unwrap();
            let boundary = s.model.interpret_boundary(&cfg, DEFAULT_CAP).unwrap();
            let omega_port = boundary
                .ports()
                .iter()
                .find(|p| p.sign() == OMEGA_SIGN)
                .unwrap()
                .name
                .clone();
            let got = relation_value(&boundary, &omega_port, &alg).unwrap();
            let want = combine_relations(op, &v0, &v1, &alg).unwrap();
            assert!(got.approx_eq(&want, &alg), "op {:?}", op);
        }

        // meet below join, pointwise
        let meet = combine_relations(AlgOp::Meet, &v0, &v1, &alg).unwrap();
        let join = combine_relations(AlgOp::Join, &v0, &v1, &alg).unwrap();
        assert!(meet.approx_le(&join, &alg));

        // self-implication is constantly top
        let cfg = s.connective(AlgOp::Implies, &d0, &d0).unwrap();
        let boundary = s.model.interpret_boundary(&cfg, DEFAULT_CAP).unwrap();
        let omega_port = boundary
            .ports()
            .iter()
            .find(|p| p.sign() == OMEGA_SIGN)
            .unwrap()
            .name
            .clone();
        let got = relation_value(&boundary, &omega_port, &alg).unwrap();
        for v in got.data() {
            assert!(alg.is_top(v));
        }
    }

    #[test]
    fn truth_of_relations() {
        let alg = Algebra::chain(3).unwrap();
        let mut s = relation_semiotic(&alg);
        let full = register_relation(&mut s, "full", [1.0, 1.0]);
        assert!(s.is_true_relation(&full, "full", DEFAULT_CAP).unwrap());
        let gap = register_relation(&mut s, "gap", [0.0, 1.0]);
        assert!(!s.is_true_relation(&gap, "gap", DEFAULT_CAP).unwrap());
    }

    #[test]
    fn dataset_concept_marks_rows() {
        let alg = Algebra::boolean();
        let a = crisp("A", &["1.0"], &alg);
        let b = crisp("B", &["0.5", "1.0"], &alg);
        let c = crisp("C", &["0.0", "0.2"], &alg);
        let d = crisp("D", &["0.2"], &alg);
        let osets = [a, b, c, d];
        let rows = vec![
            vec!["1.0", "0.5", "0.2", "0.2"],
            vec!["1.0", "1.0", "0.2", "0.2"],
            vec!["1.0", "1.0", "0.0", "0.2"],
        ];
        let concept = dataset_concept(&osets, &rows, &alg).unwrap();
        let mut tops = Vec::new();
        for idx in tuples(&concept.shape()) {
            if alg.is_top(concept.entry(&idx)) {
                tops.push(idx.clone());
            }
        }
        assert_eq!(tops, vec![vec![0, 0, 1, 0], vec![0, 1, 0, 0], vec![0, 1, 1, 0]]);
        let empty = dataset_concept(&osets, &[], &alg).unwrap();
        assert!(empty.data().iter().all(|v| alg.is_bot(v)));
        let one = dataset_concept(&osets, &rows[..1], &alg).unwrap();
        assert_eq!(one.data().iter().filter(|v| alg.is_top(v)).count(), 1);
        assert!(dataset_concept(&osets, &[vec!["1.0", "0.7", "0.0", "0.2"]], &alg).is_err());
    }

    #[test]
    fn dataset_encoding_through_the_model() {
        let alg = Algebra::boolean();
        let onto = Ontology::discrete(&["A", "B"]);
        let sys = SignSystem::new(onto, Library::new());
        let mut model = Model::new(alg.clone());
        model.bind_sign("A", crisp("A", &["x", "y"], &alg));
        model.bind_sign("B", crisp("B", &["p", "q"], &alg));
        let mut s = Semiotic::new(sys, model);
        let cfg = s
            .encode_dataset("data", &["A", "B"], &[vec!["x", "p"], vec!["y", "q"]])
            .unwrap();
        let boundary = s.model.interpret_boundary(&cfg, DEFAULT_CAP).unwrap();
        let got = relation_value(&boundary, "data_w", &alg).unwrap();
        let a = Rc::clone(s.model.sign("A").unwrap());
        let b = Rc::clone(s.model.sign("B").unwrap());
        let want = dataset_concept(&[a, b], &[vec!["x", "p"], vec!["y", "q"]], &alg).unwrap();
        assert!(got.approx_eq(&want, &alg));
    }

    #[test]
    fn natural_transformation_checks() {
        let alg = Algebra::boolean();
        let onto = Ontology::discrete(&["a", "b"]);
        let mut lib = Library::new();
        lib.add("f0", Word::parse("a b+"), &onto).unwrap();
        let sys = SignSystem::new(onto, lib);

        let a1 = crisp("a", &["u0", "u1"], &alg);
        let b1 = crisp("b", &["u0", "u1"], &alg);
        let a2 = crisp("a", &["w0", "w1"], &alg);
        let b2 = crisp("b", &["w0", "w1"], &alg);
        let perm = |s: &Rc<OmegaSet>, t: &Rc<OmegaSet>, map: [usize; 2]| {
            MultiMorphism::from_fn(
                vec![Port::source("x", s), Port::target("y", t)],
                &alg,
                move |idx| if map[idx[0]] == idx[1] { n(1.0) } else { n(0.0) },
            )
            .unwrap()
        };
        let mut m1 = Model::new(alg.clone());
        m1.bind_sign("a", Rc::clone(&a1));
        m1.bind_sign("b", Rc::clone(&b1));
        m1.bind_comp("f0", perm(&a1, &b1, [1, 0]));
        let mut m2 = Model::new(alg.clone());
        m2.bind_sign("a", Rc::clone(&a2));
        m2.bind_sign("b", Rc::clone(&b2));
        m2.bind_comp("f0", perm(&a2, &b2, [1, 0]));

        let mut cfg = Configuration::new();
        cfg.add_vertex("x", Sign::input("a")).unwrap();
        cfg.add_vertex("y", Sign::input("b")).unwrap();
        cfg.add_arrow("e", "f0", &["x"], &["y"]).unwrap();
        let _ = &sys;

        // identity components relate a model to itself
        let id_a = MultiMorphism::from_fn(
            vec![Port::source("x", &a1), Port::target("y", &a1)],
            &alg,
            |idx| if idx[0] == idx[1] { n(1.0) } else { n(0.0) },
        )
        .unwrap();
        let id_b = MultiMorphism::from_fn(
            vec![Port::source("x", &b1), Port::target("y", &b1)],
            &alg,
            |idx| if idx[0] == idx[1] { n(1.0) } else { n(0.0) },
        )
        .unwrap();
        assert!(check_natural_transformation(&m1, &m1, &id_a, &id_b, &cfg, DEFAULT_CAP).unwrap());

        // a support bijection intertwines the two crisp models
        let f = perm(&a1, &a2, [0, 1]);
        let g = perm(&b1, &b2, [0, 1]);
        assert!(check_natural_transformation(&m1, &m2, &f, &g, &cfg, DEFAULT_CAP).unwrap());
        let g_swapped = perm(&b1, &b2, [1, 0]);
        assert!(!check_natural_transformation(&m1, &m2, &f, &g_swapped, &cfg, DEFAULT_CAP).unwrap());

        // a non-surjective table fails the epi gate
        let collapse = MultiMorphism::from_fn(
            vec![Port::source("x", &a1), Port::target("y", &a2)],
            &alg,
            |idx| if idx[1] == 0 { n(1.0) } else { n(0.0) },
        )
        .unwrap();
        assert!(matches!(
            check_natural_transformation(&m1, &m2, &collapse, &g, &cfg, DEFAULT_CAP),
            Err(SemioticError::NotEpi { .. })
        ));
    }

    fn one_comp_semiotic(alg: &Algebra, sign: &str, label: &str, vals: [f64; 4]) -> Semiotic {
        let onto = Ontology::discrete(&[sign]);
        let mut lib = Library::new();
        lib.add(label, Word::parse(&format!("{s} {s}+", s = sign)), &onto).unwrap();
        let mut model = Model::new(alg.clone());
        let o = crisp(sign, &["e0", "e1"], alg);
        model.bind_sign(sign, Rc::clone(&o));
        let t = MultiMorphism::from_fn(
            vec![Port::source("x", &o), Port::target("y", &o)],
            alg,
            move |idx| n(vals[idx[0] * 2 + idx[1]]),
        )
        .unwrap();
        model.bind_comp(label, t);
        Semiotic::new(SignSystem::new(onto, lib), model)
    }

    #[test]
    fn integration_embeds_and_projects() {
        let g = Algebra::godel();
        let p = Algebra::product();
        let s1 = one_comp_semiotic(&g, "a", "r1", [1.0, 0.3, 0.0, 1.0]);
        let s2 = one_comp_semiotic(&p, "b", "r2", [0.8, 0.1, 0.5, 1.0]);
        let merged = integrate(&[("left", &s1), ("right", &s2)]).unwrap();
        let r1 = merged.model.comp("r1").unwrap();
        let r2 = merged.model.comp("r2").unwrap();
        let v = r1.entry(&[0, 1]).tuple();
        assert!(fabs(v[0].num() - 0.3) < 1e-12);
        assert!(fabs(v[1].num() - 1.0) < 1e-12);
        let v = r2.entry(&[1, 0]).tuple();
        assert!(fabs(v[0].num() - 1.0) < 1e-12);
        assert!(fabs(v[1].num() - 0.5) < 1e-12);

        let back1 = project_table(r1, 0, &g).unwrap();
        assert!(back1.approx_eq(s1.model.comp("r1").unwrap(), &g));
        let back2 = project_table(r2, 1, &p).unwrap();
        assert!(back2.approx_eq(s2.model.comp("r2").unwrap(), &p));

        // a semiotic integrated with itself repeats values at both slots
        let twice = integrate(&[("one", &s1), ("two", &s1)]).unwrap();
        let r = twice.model.comp("r1").unwrap();
        let v = r.entry(&[0, 1]).tuple();
        assert!(fabs(v[0].num() - 0.3) < 1e-12 && fabs(v[1].num() - 0.3) < 1e-12);
        let back = project_table(r, 0, &g).unwrap();
        assert!(back.approx_eq(s1.model.comp("r1").unwrap(), &g));

        // label clash with a different requirement word
        let s3 = {
            let onto = Ontology::discrete(&["a"]);
            let mut lib = Library::new();
            lib.add("r1", Word::parse("a a a+"), &onto).unwrap();
            Semiotic::new(SignSystem::new(onto, lib), Model::new(g.clone()))
        };
        match integrate(&[("left", &s1), ("third", &s3)]) {
            Err(SemioticError::IntegrationConflict { left, right, name, .. }) => {
                assert_eq!(left, "left");
                assert_eq!(right, "third");
                assert_eq!(name, "r1");
            }
            other => panic!("expected a conflict, got {:?}", other.map(|_| ())),
        }

        // same sign with different similarity is a named conflict
        let s4 = one_comp_semiotic(&g, "a", "r4", [1.0, 0.0, 0.0, 1.0]);
        let mut s4b = s4.clone();
        {
            let o = crisp("a", &["e0", "e1"], &g);
            let mut o2 = (*o).clone();
            o2.set_sim(0, 1, n(0.9));
            s4b.model.bind_sign("a", Rc::new(o2));
        }
        assert!(matches!(
            integrate(&[("left", &s1), ("fourth", &s4b)]),
            Err(SemioticError::IntegrationConflict { .. })
        ));
    }

    #[test]
    fn schema_colimit_formula() {
        let alg = Algebra::product();
        let a = crisp("a", &["a0", "a1"], &alg);
        let b = crisp("b", &["b0", "b1"], &alg);
        let t0 = MultiMorphism::from_fn(vec![Port::target("x", &a)], &alg, |idx| {
            n([0.9, 0.4][idx[0]])
        })
        .unwrap();
        let t1 = MultiMorphism::from_fn(vec![Port::target("y", &b)], &alg, |idx| {
            n([0.5, 1.0][idx[0]])
        })
        .unwrap();

        let single = integration_schema_colimit(&[&t0], &[], &alg, 1000).unwrap();
        assert!(single.approx_eq(&t0, &alg));

        let pair = integration_schema_colimit(&[&t0, &t1], &[], &alg, 1000).unwrap();
        assert!(fabs(pair.entry(&[0, 1]).num() - 0.9) < 1e-12);
        assert!(fabs(pair.entry(&[1, 0]).num() - 0.2) < 1e-12);

        let c = MultiMorphism::from_fn(
            vec![Port::source("u", &a), Port::target("v", &b)],
            &alg,
            |idx| if idx[0] == idx[1] { n(1.0) } else { n(0.0) },
        )
        .unwrap();
        let linked = integration_schema_colimit(&[&t0, &t1], &[&c], &alg, 1000).unwrap();
        assert!(fabs(linked.entry(&[0, 0]).num() - 0.45) < 1e-12);
        assert!(fabs(linked.entry(&[0, 1]).num()) < 1e-12);
    }
}
