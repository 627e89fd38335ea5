//! Polarized sign ontologies, words, word gluing, component libraries,
//! configurations, diagram gluing, and rewrite-driven refinement.
//!
//! Signs carry a polarity: plain signs are inputs, `+`-suffixed signs are
//! outputs, and the two families are in bijection through the dual. An
//! ontology orders the underlying sign names; the order lifts to both
//! polarities unchanged, so taking duals preserves it. Words are ordered
//! sign sequences; gluing cancels outputs of the left word against
//! matching inputs of the right word and concatenates what survives.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sign {
    pub base: String,
    pub output: bool,
}

impl Sign {
    pub fn input(base: &str) -> Sign {
        Sign { base: base.to_string(), output: false }
    }

    pub fn output(base: &str) -> Sign {
        Sign { base: base.to_string(), output: true }
    }

    pub fn dual(&self) -> Sign {
        Sign { base: self.base.clone(), output: !self.output }
    }

    /// Parses `name` or `name+`.
    pub fn parse(tok: &str) -> Sign {
        match tok.strip_suffix('+') {
            Some(base) => Sign::output(base),
            None => Sign::input(tok),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.base, if self.output { "+" } else { "" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Sign>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Whitespace-separated sign tokens; outputs end in `+`.
    pub fn parse(s: &str) -> Word {
        Word(s.split_whitespace().map(Sign::parse).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn inputs(&self) -> Word {
        Word(self.0.iter().filter(|s| !s.output).cloned().collect())
    }

    pub fn outputs(&self) -> Word {
        Word(self.0.iter().filter(|s| s.output).cloned().collect())
    }

    /// Polarity-insensitive content, for order-independent comparisons.
    pub fn multiset(&self) -> Vec<(String, bool)> {
        let mut v: Vec<(String, bool)> =
            self.0.iter().map(|s| (s.base.clone(), s.output)).collect();
        v.sort();
        v
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum GrammarError {
    UnknownSign(String),
    UnknownLabel(String),
    OrderCycle(String),
    DuplicateId(String),
    OutputVertexLabel { vertex: String },
    UnknownVertex { arrow: String, vertex: String },
    RuleNotDecreasing { label: String },
    RuleBoundaryMismatch { label: String, detail: String },
}

impl fmt::Display for GrammarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarError::UnknownSign(s) => write!(f, "unknown sign '{}'", s),
            GrammarError::UnknownLabel(l) => write!(f, "unknown label '{}'", l),
            GrammarError::OrderCycle(s) => {
                write!(f, "sign order has a cycle through '{}'", s)
            }
            GrammarError::DuplicateId(s) => write!(f, "duplicate id '{}'", s),
            GrammarError::OutputVertexLabel { vertex } => {
                write!(f, "vertex '{}' must carry an input sign", vertex)
            }
            GrammarError::UnknownVertex { arrow, vertex } => {
                write!(f, "arrow '{}' references unknown vertex '{}'", arrow, vertex)
            }
            GrammarError::RuleNotDecreasing { label } => {
                write!(f, "rewrite rule for '{}' does not shrink the size measure", label)
            }
            GrammarError::RuleBoundaryMismatch { label, detail } => {
                write!(f, "rewrite rule for '{}' changes the boundary: {}", label, detail)
            }
        }
    }
}

/// Finite sign vocabulary with a partial order on sign names. The order
/// applies within each polarity; duals of comparable signs stay comparable.
#[derive(Clone, Debug)]
pub struct Ontology {
    bases: Vec<String>,
    le: Vec<bool>,
}

impl Ontology {
    /// `parents` lists (child, parent) pairs, child ≤ parent.
    pub fn new(bases: &[&str], parents: &[(&str, &str)]) -> Result<Ontology, GrammarError> {
        let names: Vec<String> = bases.iter().map(|s| s.to_string()).collect();
        for (i, b) in names.iter().enumerate() {
            if names[..i].contains(b) {
                return Err(GrammarError::DuplicateId(b.clone()));
            }
        }
        let n = names.len();
        let pos = |s: &str| names.iter().position(|b| b == s);
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (c, p) in parents {
            let ci = pos(c).ok_or_else(|| GrammarError::UnknownSign(c.to_string()))?;
            let pi = pos(p).ok_or_else(|| GrammarError::UnknownSign(p.to_string()))?;
            le[ci * n + pi] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i * n + j] && le[j * n + i] {
                    return Err(GrammarError::OrderCycle(names[i].clone()));
                }
            }
        }
        Ok(Ontology { bases: names, le })
    }

    pub fn discrete(bases: &[&str]) -> Ontology {
        Ontology::new(bases, &[]).expect("no edges, no cycles")
    }

    pub fn bases(&self) -> &[String] {
        &self.bases
    }

    pub fn contains(&self, base: &str) -> bool {
        self.bases.iter().any(|b| b == base)
    }

    pub fn le_base(&self, a: &str, b: &str) -> bool {
        let n = self.bases.len();
        match (
            self.bases.iter().position(|x| x == a),
            self.bases.iter().position(|x| x == b),
        ) {
            (Some(i), Some(j)) => self.le[i * n + j],
            _ => false,
        }
    }

    pub fn le(&self, a: &Sign, b: &Sign) -> bool {
        a.output == b.output && self.le_base(&a.base, &b.base)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), GrammarError> {
        for s in &w.0 {
            if !self.contains(&s.base) {
                return Err(GrammarError::UnknownSign(s.base.clone()));
            }
        }
        Ok(())
    }

    /// Appends a base related only to itself. No-op when already present.
    pub fn push_base(&mut self, base: &str) {
        if self.contains(base) {
            return;
        }
        let n = self.bases.len();
        let mut le = vec![false; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                le[i * (n + 1) + j] = self.le[i * n + j];
            }
        }
        le[n * (n + 1) + n] = true;
        self.bases.push(base.to_string());
        self.le = le;
    }

    /// All strict related pairs (a, b) with a ≤ b and a ≠ b.
    pub fn strict_pairs(&self) -> Vec<(String, String)> {
        let n = self.bases.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.le[i * n + j] {
                    out.push((self.bases[i].clone(), self.bases[j].clone()));
                }
            }
        }
        out
    }
}

/// Cancels outputs of `w` against inputs of `w2`: repeatedly drop the first
/// output sign of `w` whose dual, or a generalization of its dual, occurs
/// in `w2` (leftmost occurrence), then concatenate the residues. Total and
/// unit-lawful: gluing with the empty word on either side is the identity.
pub fn glue_words(w: &Word, w2: &Word, onto: &Ontology) -> Word {
    let mut a = w.0.clone();
    let mut b = w2.0.clone();
    loop {
        let mut hit = None;
        'scan: for (i, s) in a.iter().enumerate() {
            if !s.output {
                continue;
            }
            for (j, t) in b.iter().enumerate() {
                if !t.output && onto.le_base(&s.base, &t.base) {
                    hit = Some((i, j));
                    break 'scan;
                }
            }
        }
        match hit {
            Some((i, j)) => {
                a.remove(i);
                b.remove(j);
            }
            None => break,
        }
    }
    a.extend(b);
    Word(a)
}

pub fn word_io(w: &Word) -> (Word, Word) {
    (w.inputs(), w.outputs())
}

/// Ordered map from component labels to their requirement words.
#[derive(Clone, Debug, Default)]
pub struct Library {
    entries: Vec<(String, Word)>,
}

impl Library {
    pub fn new() -> Library {
        Library { entries: Vec::new() }
    }

    pub fn add(&mut self, label: &str, req: Word, onto: &Ontology) -> Result<(), GrammarError> {
        if self.entries.iter().any(|(l, _)| l == label) {
            return Err(GrammarError::DuplicateId(label.to_string()));
        }
        onto.check_word(&req)?;
        self.entries.push((label.to_string(), req));
        Ok(())
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn req(&self, label: &str) -> Option<&Word> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, w)| w)
    }

    pub fn entries(&self) -> &[(String, Word)] {
        &self.entries
    }

    /// True when every label of `self` appears in `other` with the same
    /// requirement word.
    pub fn included_in(&self, other: &Library) -> bool {
        self.entries
            .iter()
            .all(|(l, w)| other.req(l).map_or(false, |w2| w2 == w))
    }
}

/// Left fold of word gluing over the requirement words of `labels`.
/// The empty sequence gives the empty word.
pub fn closure_requirements(
    lib: &Library,
    labels: &[&str],
    onto: &Ontology,
) -> Result<Word, GrammarError> {
    let mut acc = Word::empty();
    for l in labels {
        let req = lib
            .req(l)
            .ok_or_else(|| GrammarError::UnknownLabel(l.to_string()))?;
        acc = glue_words(&acc, req, onto);
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct ConfigVertex {
    pub id: String,
    pub sign: Sign,
}

#[derive(Clone, Debug)]
pub struct ConfigArrow {
    pub id: String,
    pub label: String,
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

/// A multigraph whose vertices carry input signs and whose arrows carry
/// component labels.
#[derive(Clone, Debug, Default)]
pub struct Configuration {
    vertices: Vec<ConfigVertex>,
    arrows: Vec<ConfigArrow>,
}

#[derive(Clone, Debug)]
pub enum ConfigIssue {
    UnknownLabel { arrow: String, label: String },
    ArityMismatch { arrow: String, expected: (usize, usize), got: (usize, usize) },
    SignIncompatible { arrow: String, vertex: String, found: String, required: String },
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigIssue::UnknownLabel { arrow, label } => {
                write!(f, "arrow '{}' uses unknown label '{}'", arrow, label)
            }
            ConfigIssue::ArityMismatch { arrow, expected, got } => write!(
                f,
                "arrow '{}' binds {}->{} vertices but its component needs {}->{}",
                arrow, got.0, got.1, expected.0, expected.1
            ),
            ConfigIssue::SignIncompatible { arrow, vertex, found, required } => write!(
                f,
                "arrow '{}': vertex '{}' has sign '{}', not compatible with required '{}'",
                arrow, vertex, found, required
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConfigReport {
    pub input_word: Word,
    pub output_word: Word,
}

impl Configuration {
    pub fn new() -> Configuration {
        Configuration::default()
    }

    pub fn add_vertex(&mut self, id: &str, sign: Sign) -> Result<(), GrammarError> {
        if sign.output {
            return Err(GrammarError::OutputVertexLabel { vertex: id.to_string() });
        }
        if self.vertices.iter().any(|v| v.id == id) {
            return Err(GrammarError::DuplicateId(id.to_string()));
        }
        self.vertices.push(ConfigVertex { id: id.to_string(), sign });
        Ok(())
    }

    pub fn add_arrow(
        &mut self,
        id: &str,
        label: &str,
        src: &[&str],
        tgt: &[&str],
    ) -> Result<(), GrammarError> {
        if self.arrows.iter().any(|a| a.id == id) {
            return Err(GrammarError::DuplicateId(id.to_string()));
        }
        for v in src.iter().chain(tgt) {
            if !self.vertices.iter().any(|x| &x.id == v) {
                return Err(GrammarError::UnknownVertex {
                    arrow: id.to_string(),
                    vertex: v.to_string(),
                });
            }
        }
        self.arrows.push(ConfigArrow {
            id: id.to_string(),
            label: label.to_string(),
            src: src.iter().map(|s| s.to_string()).collect(),
            tgt: tgt.iter().map(|s| s.to_string()).collect(),
        });
        Ok(())
    }

    pub fn vertices(&self) -> &[ConfigVertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[ConfigArrow] {
        &self.arrows
    }

    pub fn vertex(&self, id: &str) -> Option<&ConfigVertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// Vertices never fed by an arrow, in declaration order.
    pub fn free_inputs(&self) -> Vec<&ConfigVertex> {
        self.vertices
            .iter()
            .filter(|v| !self.arrows.iter().any(|a| a.tgt.contains(&v.id)))
            .collect()
    }

    /// Vertices never consumed by an arrow, in declaration order.
    pub fn free_outputs(&self) -> Vec<&ConfigVertex> {
        self.vertices
            .iter()
            .filter(|v| !self.arrows.iter().any(|a| a.src.contains(&v.id)))
            .collect()
    }

    pub fn input_word(&self) -> Word {
        Word(self.free_inputs().iter().map(|v| v.sign.clone()).collect())
    }

    pub fn output_word(&self) -> Word {
        Word(self.free_outputs().iter().map(|v| v.sign.dual()).collect())
    }
}

/// Checks every arrow against its component requirement. Source vertices
/// may specialize the required input sign (vertex ≤ requirement); target
/// vertices may generalize the produced sign (requirement ≤ vertex).
pub fn validate_configuration(
    cfg: &Configuration,
    lib: &Library,
    onto: &Ontology,
) -> Result<ConfigReport, Vec<ConfigIssue>> {
    let mut issues = Vec::new();
    for a in cfg.arrows() {
        let req = match lib.req(&a.label) {
            Some(r) => r,
            None => {
                issues.push(ConfigIssue::UnknownLabel {
                    arrow: a.id.clone(),
                    label: a.label.clone(),
                });
                continue;
            }
        };
        let (ri, ro) = word_io(req);
        if ri.len() != a.src.len() || ro.len() != a.tgt.len() {
            issues.push(ConfigIssue::ArityMismatch {
                arrow: a.id.clone(),
                expected: (ri.len(), ro.len()),
                got: (a.src.len(), a.tgt.len()),
            });
            continue;
        }
        for (v, r) in a.src.iter().zip(&ri.0) {
            let sign = &cfg.vertex(v).expect("checked on add").sign;
            if !onto.le_base(&sign.base, &r.base) {
                issues.push(ConfigIssue::SignIncompatible {
                    arrow: a.id.clone(),
                    vertex: v.clone(),
                    found: sign.to_string(),
                    required: r.to_string(),
                });
            }
        }
        for (v, r) in a.tgt.iter().zip(&ro.0) {
            let sign = &cfg.vertex(v).expect("checked on add").sign;
            if !onto.le_base(&r.base, &sign.base) {
                issues.push(ConfigIssue::SignIncompatible {
                    arrow: a.id.clone(),
                    vertex: v.clone(),
                    found: sign.to_string(),
                    required: r.to_string(),
                });
            }
        }
    }
    if issues.is_empty() {
        Ok(ConfigReport {
            input_word: cfg.input_word(),
            output_word: cfg.output_word(),
        })
    } else {
        Err(issues)
    }
}

fn fresh_id(taken: &mut Vec<String>, want: &str) -> String {
    let mut id = want.to_string();
    while taken.iter().any(|t| t == &id) {
        id.push('\'');
    }
    taken.push(id.clone());
    id
}

/// Glues `d2` after `d`: free outputs of `d` are identified with free
/// inputs of `d2` that carry the same sign, matched positionally in
/// declaration order. Unmatched vertices stay free.
pub fn glue_diagrams(d: &Configuration, d2: &Configuration) -> Configuration {
    let outs: Vec<String> = d.free_outputs().iter().map(|v| v.id.clone()).collect();
    let ins: Vec<String> = d2.free_inputs().iter().map(|v| v.id.clone()).collect();
    let mut matched: Vec<(String, String)> = Vec::new();
    let mut used = vec![false; ins.len()];
    for o in &outs {
        let osign = &d.vertex(o).unwrap().sign;
        for (k, i) in ins.iter().enumerate() {
            if !used[k] && &d2.vertex(i).unwrap().sign == osign {
                used[k] = true;
                matched.push((o.clone(), i.clone()));
                break;
            }
        }
    }

    let mut out = Configuration::new();
    let mut taken: Vec<String> = Vec::new();
    for v in d.vertices() {
        let id = fresh_id(&mut taken, &v.id);
        out.add_vertex(&id, v.sign.clone()).unwrap();
    }
    // d ids are unique and taken first, so they are never renamed
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for v in d2.vertices() {
        if let Some((o, _)) = matched.iter().find(|(_, i)| i == &v.id) {
            rename.insert(v.id.clone(), o.clone());
        } else {
            let id = fresh_id(&mut taken, &v.id);
            rename.insert(v.id.clone(), id.clone());
            out.add_vertex(&id, v.sign.clone()).unwrap();
        }
    }
    let mut arrow_taken: Vec<String> =
        d.arrows().iter().map(|a| a.id.clone()).collect();
    for a in d.arrows() {
        let src: Vec<&str> = a.src.iter().map(|s| s.as_str()).collect();
        let tgt: Vec<&str> = a.tgt.iter().map(|s| s.as_str()).collect();
        out.add_arrow(&a.id, &a.label, &src, &tgt).unwrap();
    }
    for a in d2.arrows() {
        let id = fresh_id(&mut arrow_taken, &a.id);
        let src: Vec<String> = a.src.iter().map(|s| rename[s].clone()).collect();
        let tgt: Vec<String> = a.tgt.iter().map(|s| rename[s].clone()).collect();
        let src: Vec<&str> = src.iter().map(|s| s.as_str()).collect();
        let tgt: Vec<&str> = tgt.iter().map(|s| s.as_str()).collect();
        out.add_arrow(&id, &a.label, &src, &tgt).unwrap();
    }
    out
}

#[derive(Clone, Debug)]
pub struct RefineRule {
    pub lhs: String,
    pub rhs: Vec<String>,
}

/// Oriented label rewrites with a strictly decreasing size measure, plus
/// declared word equivalences used to justify rules whose glued
/// requirement differs textually from the original.
#[derive(Clone, Debug)]
pub struct Semantics {
    label_rules: Vec<RefineRule>,
    word_rules: Vec<(Word, Word)>,
    sizes: BTreeMap<String, u64>,
}

impl Semantics {
    pub fn new(
        label_rules: Vec<RefineRule>,
        word_rules: Vec<(Word, Word)>,
        sizes: BTreeMap<String, u64>,
        lib: &Library,
        onto: &Ontology,
    ) -> Result<Semantics, GrammarError> {
        let size_of = |l: &str| sizes.get(l).copied().unwrap_or(1);
        for r in &label_rules {
            if lib.req(&r.lhs).is_none() {
                return Err(GrammarError::UnknownLabel(r.lhs.clone()));
            }
            for l in &r.rhs {
                if lib.req(l).is_none() {
                    return Err(GrammarError::UnknownLabel(l.clone()));
                }
            }
            let rhs_size: u64 = r.rhs.iter().map(|l| size_of(l)).sum();
            if size_of(&r.lhs) <= rhs_size {
                return Err(GrammarError::RuleNotDecreasing { label: r.lhs.clone() });
            }
            let rhs_labels: Vec<&str> = r.rhs.iter().map(|s| s.as_str()).collect();
            let folded = closure_requirements(lib, &rhs_labels, onto)?;
            let orig = lib.req(&r.lhs).unwrap();
            let coherent = &folded == orig
                || word_rules
                    .iter()
                    .any(|(a, b)| (a == orig && b == &folded) || (a == &folded && b == orig));
            if !coherent {
                return Err(GrammarError::RuleBoundaryMismatch {
                    label: r.lhs.clone(),
                    detail: format!(
                        "requirement '{}' but replacement glues to '{}'",
                        orig, folded
                    ),
                });
            }
            let (fi, fo) = word_io(&folded);
            let (oi, oo) = word_io(orig);
            if fi.len() != oi.len() || fo.len() != oo.len() {
                return Err(GrammarError::RuleBoundaryMismatch {
                    label: r.lhs.clone(),
                    detail: format!(
                        "arity {}->{} became {}->{}",
                        oi.len(),
                        oo.len(),
                        fi.len(),
                        fo.len()
                    ),
                });
            }
        }
        Ok(Semantics { label_rules, word_rules, sizes })
    }

    pub fn rule_for(&self, label: &str) -> Option<&RefineRule> {
        self.label_rules.iter().find(|r| r.lhs == label)
    }

    pub fn word_rules(&self) -> &[(Word, Word)] {
        &self.word_rules
    }

    pub fn size_of(&self, label: &str) -> u64 {
        self.sizes.get(label).copied().unwrap_or(1)
    }
}

// One sign occurrence during a provenance-tracking fold: which replacement
// arrow owns it and at which position of that arrow's requirement word.
#[derive(Clone, Debug)]
struct Occ {
    sign: Sign,
    owner: usize,
    port: usize,
}

fn expand_arrow(
    cfg: &Configuration,
    arrow_pos: usize,
    rule: &RefineRule,
    lib: &Library,
    onto: &Ontology,
) -> Result<Configuration, GrammarError> {
    let arrow = &cfg.arrows[arrow_pos];
    let words: Vec<&Word> = rule
        .rhs
        .iter()
        .map(|l| lib.req(l).ok_or_else(|| GrammarError::UnknownLabel(l.clone())))
        .collect::<Result<_, _>>()?;

    // replay the left fold of glue_words, remembering which occurrences
    // cancelled against which
    let mut state: Vec<Occ> = Vec::new();
    let mut links: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for (k, w) in words.iter().enumerate() {
        let mut incoming: Vec<Occ> = w
            .0
            .iter()
            .enumerate()
            .map(|(p, s)| Occ { sign: s.clone(), owner: k, port: p })
            .collect();
        if k == 0 {
            state = incoming;
            continue;
        }
        loop {
            let mut hit = None;
            'scan: for (i, o) in state.iter().enumerate() {
                if !o.sign.output {
                    continue;
                }
                for (j, t) in incoming.iter().enumerate() {
                    if !t.sign.output && onto.le_base(&o.sign.base, &t.sign.base) {
                        hit = Some((i, j));
                        break 'scan;
                    }
                }
            }
            match hit {
                Some((i, j)) => {
                    let a = state.remove(i);
                    let b = incoming.remove(j);
                    links.push(((a.owner, a.port), (b.owner, b.port)));
                }
                None => break,
            }
        }
        state.extend(incoming);
    }

    let survivors_in: Vec<&Occ> = state.iter().filter(|o| !o.sign.output).collect();
    let survivors_out: Vec<&Occ> = state.iter().filter(|o| o.sign.output).collect();
    if survivors_in.len() != arrow.src.len() || survivors_out.len() != arrow.tgt.len() {
        return Err(GrammarError::RuleBoundaryMismatch {
            label: rule.lhs.clone(),
            detail: format!(
                "replacement exposes {}->{} ports, arrow '{}' binds {}->{}",
                survivors_in.len(),
                survivors_out.len(),
                arrow.id,
                arrow.src.len(),
                arrow.tgt.len()
            ),
        });
    }

    let mut vertex_of: BTreeMap<(usize, usize), String> = BTreeMap::new();
    for (o, v) in survivors_in.iter().zip(&arrow.src) {
        vertex_of.insert((o.owner, o.port), v.clone());
    }
    for (o, v) in survivors_out.iter().zip(&arrow.tgt) {
        vertex_of.insert((o.owner, o.port), v.clone());
    }

    let mut out = Configuration::new();
    let mut taken: Vec<String> = cfg.vertices.iter().map(|v| v.id.clone()).collect();
    for v in cfg.vertices() {
        out.add_vertex(&v.id, v.sign.clone())?;
    }
    for (n, (from, to)) in links.iter().enumerate() {
        let sign = Sign::input(&words[from.0].0[from.1].base);
        let id = fresh_id(&mut taken, &format!("{}.n{}", arrow.id, n));
        out.add_vertex(&id, sign)?;
        vertex_of.insert(*from, id.clone());
        vertex_of.insert(*to, id);
    }

    let mut arrow_taken: Vec<String> = cfg
        .arrows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != arrow_pos)
        .map(|(_, a)| a.id.clone())
        .collect();
    for (i, a) in cfg.arrows.iter().enumerate() {
        if i == arrow_pos {
            for (k, label) in rule.rhs.iter().enumerate() {
                let w = words[k];
                let mut src = Vec::new();
                let mut tgt = Vec::new();
                for (p, s) in w.0.iter().enumerate() {
                    let v = vertex_of[&(k, p)].clone();
                    if s.output {
                        tgt.push(v);
                    } else {
                        src.push(v);
                    }
                }
                let id = fresh_id(&mut arrow_taken, &format!("{}.{}", arrow.id, k));
                let src: Vec<&str> = src.iter().map(|s| s.as_str()).collect();
                let tgt: Vec<&str> = tgt.iter().map(|s| s.as_str()).collect();
                out.add_arrow(&id, label, &src, &tgt)?;
            }
        } else {
            let src: Vec<&str> = a.src.iter().map(|s| s.as_str()).collect();
            let tgt: Vec<&str> = a.tgt.iter().map(|s| s.as_str()).collect();
            out.add_arrow(&a.id, &a.label, &src, &tgt)?;
        }
    }
    Ok(out)
}

/// Rewrites arrows whose labels have rules until none is left. The size
/// measure guarantees termination; arrows without rules are atomic, so a
/// second pass changes nothing.
pub fn refine(
    cfg: &Configuration,
    sem: &Semantics,
    lib: &Library,
    onto: &Ontology,
) -> Result<Configuration, GrammarError> {
    let mut cur = cfg.clone();
    loop {
        let pos = cur
            .arrows
            .iter()
            .position(|a| sem.rule_for(&a.label).is_some());
        match pos {
            Some(p) => {
                let rule = sem.rule_for(&cur.arrows[p].label).unwrap().clone();
                cur = expand_arrow(&cur, p, &rule, lib, onto)?;
            }
            None => return Ok(cur),
        }
    }
}
