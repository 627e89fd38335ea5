//! Diagrams of truth-valued relations and their limit-style aggregates.
//!
//! A [`MultiDiagram`] binds vertices to Ω-sets and arrows to multi-morphisms
//! whose port signatures match the vertices they touch. The limit of a
//! diagram is the Ω-map over all vertex supports valuing each tuple by the
//! product extent ⊗-combined with every arrow's table entry; the colimit
//! replaces the ⊗ over arrows by a join. Commutativity compares the
//! sup-projection of the limit onto designated source vertices against the
//! sup-projection of the bare extent, pointwise by biimplication.
//!
//! Tables are enumerated densely, so every operation guards the product of
//! support sizes with a configurable cap and fails loudly instead of
//! truncating.

use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{Algebra, Value};
use crate::relation::{offset, tuples, MultiMorphism, OmegaSet, Port, RelationError};

pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub enum DiagramError {
    CapExceeded { required: u128, cap: u64 },
    DuplicateId(String),
    UnknownVertex(String),
    ArrowSignatureMismatch { arrow: String, detail: String },
    MissingObservation(String),
    UnknownElement { vertex: String, elem: String },
    NotDivisible,
    ArrowNotTotal { arrow: String },
    ArrowNotFaithful { arrow: String },
    ConceptExceedsExtent { witness: String },
    Shape(String),
    Relation(RelationError),
}

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramError::CapExceeded { required, cap } => write!(
                f,
                "enumeration needs {} tuples, above the cap of {}",
                required, cap
            ),
            DiagramError::DuplicateId(id) => write!(f, "duplicate id '{}'", id),
            DiagramError::UnknownVertex(v) => write!(f, "unknown vertex '{}'", v),
            DiagramError::ArrowSignatureMismatch { arrow, detail } => {
                write!(f, "arrow '{}' does not fit its vertices: {}", arrow, detail)
            }
            DiagramError::MissingObservation(v) => {
                write!(f, "no observed element for vertex '{}'", v)
            }
            DiagramError::UnknownElement { vertex, elem } => {
                write!(f, "element '{}' is not in the support of vertex '{}'", elem, vertex)
            }
            DiagramError::NotDivisible => {
                write!(f, "this construction needs a divisible algebra")
            }
            DiagramError::ArrowNotTotal { arrow } => write!(f, "arrow '{}' is not total", arrow),
            DiagramError::ArrowNotFaithful { arrow } => {
                write!(f, "arrow '{}' is not faithful", arrow)
            }
            DiagramError::ConceptExceedsExtent { witness } => {
                write!(f, "concept exceeds the extent at {}", witness)
            }
            DiagramError::Shape(m) => write!(f, "{}", m),
            DiagramError::Relation(e) => write!(f, "{}", e),
        }
    }
}

impl From<RelationError> for DiagramError {
    fn from(e: RelationError) -> DiagramError {
        DiagramError::Relation(e)
    }
}

#[derive(Clone, Debug)]
pub struct DiagArrow {
    pub id: String,
    pub morphism: MultiMorphism,
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct MultiDiagram {
    vertices: Vec<(String, Rc<OmegaSet>)>,
    arrows: Vec<DiagArrow>,
    sources: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CommutativityReport {
    /// Biimplication of the two sup-projections, per source tuple.
    pub profile: MultiMorphism,
    /// Infimum of the profile: the best λ for which the diagram commutes.
    pub degree: Value,
    pub commutative: bool,
}

impl MultiDiagram {
    pub fn new() -> MultiDiagram {
        MultiDiagram { vertices: Vec::new(), arrows: Vec::new(), sources: Vec::new() }
    }

    pub fn add_vertex(&mut self, id: &str, oset: &Rc<OmegaSet>) -> Result<(), DiagramError> {
        if self.vertex_index(id).is_some() {
            return Err(DiagramError::DuplicateId(id.to_string()));
        }
        self.vertices.push((id.to_string(), Rc::clone(oset)));
        Ok(())
    }

    /// Adds an arrow binding `morphism` to the named vertices. The
    /// morphism's source ports must match `src` in order (sign and support),
    /// and its target ports `tgt`; either list may be empty.
    pub fn add_arrow(
        &mut self,
        id: &str,
        morphism: MultiMorphism,
        src: &[&str],
        tgt: &[&str],
    ) -> Result<(), DiagramError> {
        if self.arrows.iter().any(|a| a.id == id) {
            return Err(DiagramError::DuplicateId(id.to_string()));
        }
        let check = |ports: &[usize], verts: &[&str], m: &MultiMorphism| -> Result<(), DiagramError> {
            if ports.len() != verts.len() {
                return Err(DiagramError::ArrowSignatureMismatch {
                    arrow: id.to_string(),
                    detail: format!(
                        "{} ports bound to {} vertices",
                        ports.len(),
                        verts.len()
                    ),
                });
            }
            for (&p, v) in ports.iter().zip(verts) {
                let oset = self
                    .vertex(v)
                    .ok_or_else(|| DiagramError::UnknownVertex(v.to_string()))?;
                let port = &m.ports()[p];
                if port.sign() != oset.sign || port.oset.elems != oset.elems {
                    return Err(DiagramError::ArrowSignatureMismatch {
                        arrow: id.to_string(),
                        detail: format!(
                            "port '{}' has sign '{}' but vertex '{}' has sign '{}'",
                            port.name,
                            port.sign(),
                            v,
                            oset.sign
                        ),
                    });
                }
            }
            Ok(())
        };
        check(&morphism.source_positions(), src, &morphism)?;
        check(&morphism.target_positions(), tgt, &morphism)?;
        self.arrows.push(DiagArrow {
            id: id.to_string(),
            morphism,
            src: src.iter().map(|s| s.to_string()).collect(),
            tgt: tgt.iter().map(|s| s.to_string()).collect(),
        });
        Ok(())
    }

    pub fn set_sources(&mut self, ids: &[&str]) -> Result<(), DiagramError> {
        for id in ids {
            if self.vertex_index(id).is_none() {
                return Err(DiagramError::UnknownVertex(id.to_string()));
            }
        }
        self.sources = ids.iter().map(|s| s.to_string()).collect();
        Ok(())
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|(v, _)| v == id)
    }

    pub fn vertex(&self, id: &str) -> Option<&Rc<OmegaSet>> {
        self.vertices.iter().find(|(v, _)| v == id).map(|(_, o)| o)
    }

    pub fn vertices(&self) -> &[(String, Rc<OmegaSet>)] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[DiagArrow] {
        &self.arrows
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    fn shape(&self) -> Vec<usize> {
        self.vertices.iter().map(|(_, o)| o.len()).collect()
    }

    fn guard_cap(&self, cap: u64) -> Result<(), DiagramError> {
        let mut required: u128 = 1;
        for (_, o) in &self.vertices {
            required = required.saturating_mul(o.len() as u128);
        }
        if required > cap as u128 {
            return Err(DiagramError::CapExceeded { required, cap });
        }
        Ok(())
    }

    /// Positions of each arrow's morphism ports inside the vertex tuple.
    fn arrow_bindings(&self, arrow: &DiagArrow) -> Vec<usize> {
        let m = &arrow.morphism;
        let mut map = vec![0usize; m.ports().len()];
        for (k, &p) in m.source_positions().iter().enumerate() {
            map[p] = self.vertex_index(&arrow.src[k]).expect("validated on add");
        }
        for (k, &p) in m.target_positions().iter().enumerate() {
            map[p] = self.vertex_index(&arrow.tgt[k]).expect("validated on add");
        }
        map
    }

    fn result_ports(&self) -> Vec<Port> {
        self.vertices
            .iter()
            .map(|(id, o)| {
                if self.sources.iter().any(|s| s == id) {
                    Port::source(id, o)
                } else {
                    Port::target(id, o)
                }
            })
            .collect()
    }

    fn aggregate(
        &self,
        alg: &Algebra,
        cap: u64,
        join_arrows: bool,
    ) -> Result<MultiMorphism, DiagramError> {
        self.guard_cap(cap)?;
        let bindings: Vec<Vec<usize>> =
            self.arrows.iter().map(|a| self.arrow_bindings(a)).collect();
        let shape = self.shape();
        let mut out = MultiMorphism::new(self.result_ports(), alg)?;
        for idx in tuples(&shape) {
            let mut ext = alg.top();
            for (p, (_, o)) in self.vertices.iter().enumerate() {
                ext = alg.tensor(&ext, o.extent(idx[p]));
            }
            let v = if join_arrows {
                if self.arrows.is_empty() {
                    ext
                } else {
                    let mut acc = alg.bot();
                    for (a, map) in self.arrows.iter().zip(&bindings) {
                        let ai: Vec<usize> = map.iter().map(|&vp| idx[vp]).collect();
                        acc = alg.join(&acc, a.morphism.entry(&ai));
                    }
                    alg.tensor(&ext, &acc)
                }
            } else {
                let mut acc = ext;
                for (a, map) in self.arrows.iter().zip(&bindings) {
                    let ai: Vec<usize> = map.iter().map(|&vp| idx[vp]).collect();
                    acc = alg.tensor(&acc, a.morphism.entry(&ai));
                }
                acc
            };
            let o = offset(&shape, &idx);
            out.set_entry_at(o, v);
        }
        Ok(out)
    }

    /// Limit: extent ⊗ every arrow value, tabulated over all vertices.
    /// Source vertices become source ports of the result.
    pub fn limit(&self, alg: &Algebra, cap: u64) -> Result<MultiMorphism, DiagramError> {
        self.aggregate(alg, cap, false)
    }

    /// Colimit: extent ⊗ the join of arrow values; with no arrows it
    /// degenerates to the extent, same as the limit.
    pub fn colimit(&self, alg: &Algebra, cap: u64) -> Result<MultiMorphism, DiagramError> {
        self.aggregate(alg, cap, true)
    }

    /// Sup-projection of an all-vertices Ω-map onto the named vertices.
    pub fn sup_project(
        &self,
        table: &MultiMorphism,
        keep: &[&str],
        alg: &Algebra,
    ) -> Result<MultiMorphism, DiagramError> {
        Ok(table.project_observable(keep, alg)?)
    }

    /// Compares the limit and the bare extent after sup-projecting both
    /// onto `sources` (empty list = global sup). The degree is the infimum
    /// over source tuples of the pointwise biimplication; the diagram is
    /// commutative when the degree is top, and λ-commutative exactly for
    /// λ ≤ degree.
    pub fn commutativity(
        &self,
        srcs: &[&str],
        alg: &Algebra,
        cap: u64,
    ) -> Result<CommutativityReport, DiagramError> {
        for id in srcs {
            if self.vertex_index(id).is_none() {
                return Err(DiagramError::UnknownVertex(id.to_string()));
            }
        }
        let lim = self.limit(alg, cap)?;
        let discrete = MultiDiagram {
            vertices: self.vertices.clone(),
            arrows: Vec::new(),
            sources: self.sources.clone(),
        };
        let ext = discrete.limit(alg, cap)?;
        let lhs = lim.project_observable(srcs, alg)?;
        let rhs = ext.project_observable(srcs, alg)?;
        let shape = lhs.shape();
        let mut profile = lhs.clone();
        let mut degree = alg.top();
        for idx in tuples(&shape) {
            let b = alg.biimp(lhs.entry(&idx), rhs.entry(&idx));
            degree = alg.meet(&degree, &b);
            let o = offset(&shape, &idx);
            profile.set_entry_at(o, b);
        }
        let commutative = alg.is_top(&degree);
        Ok(CommutativityReport { profile, degree, commutative })
    }

    /// Conditional table over the unobserved vertex `v1` given one element
    /// per remaining vertex: for each candidate b,
    /// [observations] ⇒ ⊗ over arrows of (source extent ⊗ conditional at b).
    /// Needs a divisible algebra and arrows that are total and faithful.
    pub fn classifier(
        &self,
        v1: &str,
        observations: &[(&str, &str)],
        alg: &Algebra,
    ) -> Result<MultiMorphism, DiagramError> {
        if !alg.is_divisible() {
            return Err(DiagramError::NotDivisible);
        }
        let v1_pos = self
            .vertex_index(v1)
            .ok_or_else(|| DiagramError::UnknownVertex(v1.to_string()))?;
        let mut obs_idx: Vec<Option<usize>> = vec![None; self.vertices.len()];
        for (v, e) in observations {
            let p = self
                .vertex_index(v)
                .ok_or_else(|| DiagramError::UnknownVertex(v.to_string()))?;
            let o = &self.vertices[p].1;
            let i = o.index_of(e).ok_or_else(|| DiagramError::UnknownElement {
                vertex: v.to_string(),
                elem: e.to_string(),
            })?;
            obs_idx[p] = Some(i);
        }
        for (p, (id, _)) in self.vertices.iter().enumerate() {
            if p != v1_pos && obs_idx[p].is_none() {
                return Err(DiagramError::MissingObservation(id.clone()));
            }
        }

        let mut conds = Vec::new();
        for a in &self.arrows {
            let t = a.morphism.totality(alg);
            if !t.holds {
                return Err(DiagramError::ArrowNotTotal { arrow: a.id.clone() });
            }
            if !a.morphism.faithfulness(alg).holds {
                return Err(DiagramError::ArrowNotFaithful { arrow: a.id.clone() });
            }
            conds.push(a.morphism.conditional(alg)?);
        }

        // extent of the observed tuple
        let mut obs_ext = alg.top();
        for (p, (_, o)) in self.vertices.iter().enumerate() {
            if p != v1_pos {
                obs_ext = alg.tensor(&obs_ext, o.extent(obs_idx[p].unwrap()));
            }
        }

        let bindings: Vec<Vec<usize>> =
            self.arrows.iter().map(|a| self.arrow_bindings(a)).collect();
        let v1_oset = &self.vertices[v1_pos].1;
        let out_ports = vec![Port::target(v1, v1_oset)];
        let mut out = MultiMorphism::new(out_ports, alg)?;
        for b in 0..v1_oset.len() {
            let mut acc = alg.top();
            for ((a, cond), map) in self.arrows.iter().zip(&conds).zip(&bindings) {
                let idx: Vec<usize> = map
                    .iter()
                    .map(|&vp| if vp == v1_pos { b } else { obs_idx[vp].unwrap() })
                    .collect();
                let mut src_ext = alg.top();
                for &p in &a.morphism.source_positions() {
                    let vp = map[p];
                    let o = &self.vertices[vp].1;
                    src_ext = alg.tensor(&src_ext, o.extent(idx[p]));
                }
                acc = alg.tensor(&acc, &alg.tensor(&src_ext, cond.entry(&idx)));
            }
            let v = alg.implies(&obs_ext, &acc);
            out.set_entry(&[b], v);
        }
        Ok(out)
    }
}

impl Default for MultiDiagram {
    fn default() -> Self {
        MultiDiagram::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KanKind {
    Equalizer,
    Pullback,
    Coequalizer,
    Pushout,
}

/// The four classical shapes as direct table constructions.
///
/// Equalizer and coequalizer take a parallel pair (same port signature):
/// extent ⊗ R ⊗ S, respectively extent ⊗ (R ∨ S). Pullback and pushout
/// take relations with a shared codomain: over (x̄, ū, ȳ),
/// extent ⊗ R(x̄,ū) ⊗ S(ȳ,ū), respectively extent ⊗ (R(x̄,ū) ∨ S(ȳ,ū)).
pub fn kan_construct(
    kind: KanKind,
    r: &MultiMorphism,
    s: &MultiMorphism,
    alg: &Algebra,
) -> Result<MultiMorphism, DiagramError> {
    match kind {
        KanKind::Equalizer | KanKind::Coequalizer => {
            let same = r.ports().len() == s.ports().len()
                && r.ports().iter().zip(s.ports()) .all(|(a, b)| {
                    a.is_source == b.is_source
                        && a.sign() == b.sign()
                        && a.oset.elems == b.oset.elems
                });
            if !same {
                return Err(DiagramError::Shape(
                    "equalizer/coequalizer need a parallel pair".to_string(),
                ));
            }
            let shape = r.shape();
            let mut out = MultiMorphism::new(r.ports().to_vec(), alg)?;
            for idx in tuples(&shape) {
                let ext = r.tuple_extent(&idx, alg);
                let v = match kind {
                    KanKind::Equalizer => {
                        alg.tensor(&ext, &alg.tensor(r.entry(&idx), s.entry(&idx)))
                    }
                    _ => alg.tensor(&ext, &alg.join(r.entry(&idx), s.entry(&idx))),
                };
                let o = offset(&shape, &idx);
                out.set_entry_at(o, v);
            }
            Ok(out)
        }
        KanKind::Pullback | KanKind::Pushout => {
            let rt = r.target_positions();
            let st = s.target_positions();
            let aligned = rt.len() == st.len()
                && rt.iter().zip(&st).all(|(&a, &b)| {
                    r.ports()[a].sign() == s.ports()[b].sign()
                        && r.ports()[a].oset.elems == s.ports()[b].oset.elems
                });
            if !aligned {
                return Err(DiagramError::Shape(
                    "pullback/pushout need matching codomains".to_string(),
                ));
            }
            let rs = r.source_positions();
            let ss = s.source_positions();
            let mut ports: Vec<Port> = Vec::new();
            let mut push = |p: &Port| {
                let mut q = p.clone();
                while ports.iter().any(|x| x.name == q.name) {
                    q.name.push('\'');
                }
                ports.push(q);
            };
            for &i in &rs {
                push(&r.ports()[i]);
            }
            for &i in &rt {
                push(&r.ports()[i]);
            }
            for &i in &ss {
                push(&s.ports()[i]);
            }
            let mut out = MultiMorphism::new(ports, alg)?;
            let shape = out.shape();
            let rshape = r.shape();
            let sshape = s.shape();
            for idx in tuples(&shape) {
                let mut ridx = vec![0usize; rshape.len()];
                for (k, &p) in rs.iter().enumerate() {
                    ridx[p] = idx[k];
                }
                for (k, &p) in rt.iter().enumerate() {
                    ridx[p] = idx[rs.len() + k];
                }
                let mut sidx = vec![0usize; sshape.len()];
                for (k, &p) in st.iter().enumerate() {
                    sidx[p] = idx[rs.len() + k];
                }
                for (k, &p) in ss.iter().enumerate() {
                    sidx[p] = idx[rs.len() + rt.len() + k];
                }
                let mut ext = alg.top();
                for (k, p) in out.ports().iter().enumerate() {
                    ext = alg.tensor(&ext, p.oset.extent(idx[k]));
                }
                let rv = r.entry(&ridx);
                let sv = s.entry(&sidx);
                let v = match kind {
                    KanKind::Pullback => alg.tensor(&ext, &alg.tensor(rv, sv)),
                    _ => alg.tensor(&ext, &alg.join(rv, sv)),
                };
                let o = offset(&shape, &idx);
                out.set_entry_at(o, v);
            }
            Ok(out)
        }
    }
}

/// Rebuilds an admissible concept (an Ω-map bounded by its extent) as a
/// single-arrow diagram whose limit reproduces it: the arrow table is
/// extent ⇒ concept, from the first port's vertex into the rest.
pub fn concept_to_diagram(
    g: &MultiMorphism,
    alg: &Algebra,
) -> Result<MultiDiagram, DiagramError> {
    if !alg.is_divisible() {
        return Err(DiagramError::NotDivisible);
    }
    if g.ports().is_empty() {
        return Err(DiagramError::Shape("concept needs at least one port".to_string()));
    }
    let shape = g.shape();
    for idx in tuples(&shape) {
        let ext = g.tuple_extent(&idx, alg);
        if !alg.le_val(g.entry(&idx), &ext) {
            let names: Vec<String> = g
                .ports()
                .iter()
                .zip(&idx)
                .map(|(p, &i)| p.oset.elems[i].clone())
                .collect();
            return Err(DiagramError::ConceptExceedsExtent { witness: names.join(",") });
        }
    }
    let mut ports: Vec<Port> = Vec::new();
    for (k, p) in g.ports().iter().enumerate() {
        let mut q = p.clone();
        q.is_source = k == 0;
        ports.push(q);
    }
    let f = MultiMorphism::from_fn(ports, alg, |idx| {
        let ext = g.tuple_extent(idx, alg);
        alg.implies(&ext, g.entry(idx))
    })?;

    let mut d = MultiDiagram::new();
    let mut ids: Vec<String> = Vec::new();
    for p in g.ports() {
        let mut id = p.name.clone();
        while ids.iter().any(|x| x == &id) {
            id.push('\'');
        }
        d.add_vertex(&id, &p.oset)?;
        ids.push(id);
    }
    let src: Vec<&str> = ids[..1].iter().map(|s| s.as_str()).collect();
    let tgt: Vec<&str> = ids[1..].iter().map(|s| s.as_str()).collect();
    d.add_arrow("f", f, &src, &tgt)?;
    d.set_sources(&src)?;
    Ok(d)
}
