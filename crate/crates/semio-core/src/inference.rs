//! Graded consistency between concepts and interpreted relations, answer
//! sets over finite hypothesis pools, the box/diamond operators, interior
//! and closure of a concept, the consequence relation, and a small modal
//! formula evaluator on top of them.
//!
//! A concept is an Ω-map: a table whose ports are all sources. A pool holds
//! finitely many named tables, all over one shared support, and every
//! quantifier in this module ranges over the pool's contents. That finite
//! relativization is deliberate; the operators below are closure-style
//! constructions whose laws survive it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{Algebra, Value};
use crate::relation::{tuples, MultiMorphism, Port, RelationError};
use crate::semiotic::{combine_relations, AlgOp, SemioticError};

#[derive(Clone, Debug)]
pub enum InferenceError {
    SupportMismatch(String),
    NotAnOmegaMap { name: String },
    EmptyDomain { name: String },
    DuplicateName(String),
    UnknownName(String),
    BadValue { name: String, detail: String },
    ModalUnderConnective,
    Relation(RelationError),
}

impl fmt::Display for InferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InferenceError::SupportMismatch(d) => write!(f, "supports do not align: {}", d),
            InferenceError::NotAnOmegaMap { name } => {
                write!(f, "'{}' has target ports; concepts take sources only", name)
            }
            InferenceError::EmptyDomain { name } => {
                write!(f, "domain '{}' has an empty top fiber", name)
            }
            InferenceError::DuplicateName(n) => write!(f, "name '{}' already in the pool", n),
            InferenceError::UnknownName(n) => write!(f, "no pool entry named '{}'", n),
            InferenceError::BadValue { name, detail } => {
                write!(f, "'{}' holds a value outside the algebra: {}", name, detail)
            }
            InferenceError::ModalUnderConnective => {
                write!(f, "modal operators cannot appear under a connective")
            }
            InferenceError::Relation(e) => write!(f, "{}", e),
        }
    }
}

impl From<RelationError> for InferenceError {
    fn from(e: RelationError) -> InferenceError {
        InferenceError::Relation(e)
    }
}

/// Pointwise biimplication of two Ω-maps plus its meet, the graded degree
/// to which the two tables describe the same thing. When the supports
/// differ, the smaller table must embed into the larger by sign and
/// support; its values are then broadcast over the extra ports.
pub fn gamma(
    d0: &MultiMorphism,
    d1: &MultiMorphism,
    alg: &Algebra,
) -> Result<(MultiMorphism, Value), InferenceError> {
    let (big, small) = if d0.ports().len() >= d1.ports().len() { (d0, d1) } else { (d1, d0) };
    let mut used = vec![false; big.ports().len()];
    let mut slot = Vec::with_capacity(small.ports().len());
    for p in small.ports() {
        let found = big.ports().iter().enumerate().find(|(k, q)| {
            !used[*k] && q.sign() == p.sign() && q.oset.elems == p.oset.elems
        });
        match found {
            Some((k, _)) => {
                used[k] = true;
                slot.push(k);
            }
            None => {
                return Err(InferenceError::SupportMismatch(format!(
                    "no counterpart for port '{}' of sign '{}'",
                    p.name,
                    p.sign()
                )))
            }
        }
    }
    let map = MultiMorphism::from_fn(big.ports().to_vec(), alg, |idx| {
        let sidx: Vec<usize> = slot.iter().map(|&k| idx[k]).collect();
        alg.biimp(big.entry(idx), small.entry(&sidx))
    })?;
    let quality = alg.inf(map.data());
    Ok((map, quality))
}

/// How an interpretation must cover a concept for the check to hold.
#[derive(Clone, Copy, Debug)]
pub enum Quantifier<'a> {
    /// Degree at least λ on the whole support.
    ForAll,
    /// Degree at least λ somewhere.
    Exists,
    /// Degree at least λ on the top fiber of the given domain table.
    ForAllOn(&'a MultiMorphism),
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub holds: bool,
    /// Pointwise degree table Γ(d, interp).
    pub degree_map: MultiMorphism,
    /// Index tuples whose degree reaches λ.
    pub fiber: Vec<Vec<usize>>,
}

pub fn consistency_check(
    d: &MultiMorphism,
    interp: &MultiMorphism,
    lambda: &Value,
    mode: Quantifier<'_>,
    alg: &Algebra,
) -> Result<ConsistencyReport, InferenceError> {
    let (map, _) = gamma(d, interp, alg)?;
    let shape = map.shape();
    let mut fiber = Vec::new();
    for idx in tuples(&shape) {
        if alg.le_val(lambda, map.entry(&idx)) {
            fiber.push(idx);
        }
    }
    let holds = match mode {
        Quantifier::ForAll => fiber.len() == map.data().len(),
        Quantifier::Exists => !fiber.is_empty(),
        Quantifier::ForAllOn(dom) => {
            if dom.shape() != shape {
                return Err(InferenceError::SupportMismatch(
                    "domain table has a different shape".to_string(),
                ));
            }
            let mut ok = true;
            for idx in tuples(&shape) {
                if alg.is_top(dom.entry(&idx)) && !alg.le_val(lambda, map.entry(&idx)) {
                    ok = false;
                    break;
                }
            }
            ok
        }
    };
    Ok(ConsistencyReport { holds, degree_map: map, fiber })
}

/// Finitely many named Ω-maps over one shared support: candidate relation
/// interpretations, candidate concepts, and optional domain restrictions.
#[derive(Clone, Debug, Default)]
pub struct HypothesisPool {
    ports: Vec<Port>,
    diagrams: Vec<(String, MultiMorphism)>,
    concepts: Vec<(String, MultiMorphism)>,
    domains: Vec<(String, MultiMorphism)>,
}

impl HypothesisPool {
    pub fn new() -> HypothesisPool {
        HypothesisPool::default()
    }

    fn admit(
        &mut self,
        name: &str,
        table: &MultiMorphism,
        alg: &Algebra,
    ) -> Result<(), InferenceError> {
        let taken = self
            .diagrams
            .iter()
            .chain(&self.concepts)
            .chain(&self.domains)
            .any(|(n, _)| n == name);
        if taken {
            return Err(InferenceError::DuplicateName(name.to_string()));
        }
        if !table.ports().iter().all(|p| p.is_source) {
            return Err(InferenceError::NotAnOmegaMap { name: name.to_string() });
        }
        for v in table.data() {
            if let Err(e) = alg.check_value(v) {
                return Err(InferenceError::BadValue {
                    name: name.to_string(),
                    detail: format!("{}", e),
                });
            }
        }
        if self.ports.is_empty() {
            self.ports = table.ports().to_vec();
            return Ok(());
        }
        self.check_query(table)
    }

    /// Whether a table rides the pool's support: same ports in the same
    /// order, matched by sign and element list.
    pub fn check_query(&self, table: &MultiMorphism) -> Result<(), InferenceError> {
        if table.ports().len() != self.ports.len() {
            return Err(InferenceError::SupportMismatch(format!(
                "{} ports, pool has {}",
                table.ports().len(),
                self.ports.len()
            )));
        }
        for (p, q) in table.ports().iter().zip(&self.ports) {
            if p.sign() != q.sign() || p.oset.elems != q.oset.elems {
                return Err(InferenceError::SupportMismatch(format!(
                    "port '{}' does not match the pool port '{}'",
                    p.name, q.name
                )));
            }
        }
        Ok(())
    }

    pub fn add_diagram(
        &mut self,
        name: &str,
        table: MultiMorphism,
        alg: &Algebra,
    ) -> Result<(), InferenceError> {
        self.admit(name, &table, alg)?;
        self.diagrams.push((name.to_string(), table));
        Ok(())
    }

    pub fn add_concept(
        &mut self,
        name: &str,
        table: MultiMorphism,
        alg: &Algebra,
    ) -> Result<(), InferenceError> {
        self.admit(name, &table, alg)?;
        self.concepts.push((name.to_string(), table));
        Ok(())
    }

    /// Domains whose top fiber is empty would make every restricted check
    /// vacuous, so they are rejected outright.
    pub fn add_domain(
        &mut self,
        name: &str,
        table: MultiMorphism,
        alg: &Algebra,
    ) -> Result<(), InferenceError> {
        self.admit(name, &table, alg)?;
        if !table.data().iter().any(|v| alg.is_top(v)) {
            return Err(InferenceError::EmptyDomain { name: name.to_string() });
        }
        self.domains.push((name.to_string(), table));
        Ok(())
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn diagrams(&self) -> &[(String, MultiMorphism)] {
        &self.diagrams
    }

    pub fn concepts(&self) -> &[(String, MultiMorphism)] {
        &self.concepts
    }

    pub fn domains(&self) -> &[(String, MultiMorphism)] {
        &self.domains
    }

    pub fn diagram(&self, name: &str) -> Option<&MultiMorphism> {
        self.diagrams.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn concept(&self, name: &str) -> Option<&MultiMorphism> {
        self.concepts.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn domain(&self, name: &str) -> Option<&MultiMorphism> {
        self.domains.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    fn constant(&self, v: Value, alg: &Algebra) -> MultiMorphism {
        MultiMorphism::from_fn(self.ports.clone(), alg, |_| v.clone())
            .expect("pool ports are valid")
    }
}

/// f ≤ g pointwise, restricted to the top fiber of the domain when one is
/// given. Tables of a different shape never compare.
fn le_on(
    f: &MultiMorphism,
    g: &MultiMorphism,
    dom: Option<&MultiMorphism>,
    alg: &Algebra,
) -> bool {
    if f.shape() != g.shape() {
        return false;
    }
    for (i, (a, b)) in f.data().iter().zip(g.data()).enumerate() {
        let in_fiber = match dom {
            None => true,
            Some(d) => alg.is_top(&d.data()[i]),
        };
        if in_fiber && !alg.le_val(a, b) {
            return false;
        }
    }
    true
}

/// f with `off` written outside the domain's top fiber; f itself when no
/// domain is given.
fn masked(
    f: &MultiMorphism,
    dom: Option<&MultiMorphism>,
    off: &Value,
    alg: &Algebra,
) -> MultiMorphism {
    match dom {
        None => f.clone(),
        Some(d) => MultiMorphism::from_fn(f.ports().to_vec(), alg, |idx| {
            if alg.is_top(d.entry(idx)) {
                f.entry(idx).clone()
            } else {
                off.clone()
            }
        })
        .expect("ports cloned from a valid table"),
    }
}

fn resolve<'a>(
    pool: &'a HypothesisPool,
    pair: &(String, Option<String>),
) -> (&'a MultiMorphism, Option<&'a MultiMorphism>) {
    let f = pool.concept(&pair.0).expect("pair produced from this pool");
    let d = pair.1.as_ref().map(|n| pool.domain(n).expect("pair produced from this pool"));
    (f, d)
}

/// All (concept, domain) pairs answering the named diagram at λ: the
/// concept covers the diagram's interpretation on that domain. Without
/// domains the coverage is global and the domain slot is empty.
pub fn answer_pairs(
    pool: &HypothesisPool,
    diagram: &str,
    lambda: &Value,
    alg: &Algebra,
) -> Result<Vec<(String, Option<String>)>, InferenceError> {
    let interp = pool
        .diagram(diagram)
        .ok_or_else(|| InferenceError::UnknownName(diagram.to_string()))?;
    let mut out = Vec::new();
    for (gn, g) in pool.concepts() {
        if pool.domains().is_empty() {
            if consistency_check(g, interp, lambda, Quantifier::ForAll, alg)?.holds {
                out.push((gn.clone(), None));
            }
        } else {
            for (dn, dt) in pool.domains() {
                if consistency_check(g, interp, lambda, Quantifier::ForAllOn(dt), alg)?.holds {
                    out.push((gn.clone(), Some(dn.clone())));
                }
            }
        }
    }
    Ok(out)
}

/// Concept names answering the diagram, deduplicated, pool order.
pub fn answers(
    pool: &HypothesisPool,
    diagram: &str,
    lambda: &Value,
    alg: &Algebra,
) -> Result<Vec<String>, InferenceError> {
    let mut out: Vec<String> = Vec::new();
    for (g, _) in answer_pairs(pool, diagram, lambda, alg)? {
        if !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

/// Diagrams all of whose answers stay below g on their domains.
pub fn box_set(
    pool: &HypothesisPool,
    g: &MultiMorphism,
    lambda: &Value,
    alg: &Algebra,
) -> Result<Vec<String>, InferenceError> {
    pool.check_query(g)?;
    let mut out = Vec::new();
    for (dn, _) in pool.diagrams() {
        let pairs = answer_pairs(pool, dn, lambda, alg)?;
        if pairs.iter().all(|p| {
            let (f, dom) = resolve(pool, p);
            le_on(f, g, dom, alg)
        }) {
            out.push(dn.clone());
        }
    }
    Ok(out)
}

/// Diagrams some answer of which dominates g on its domain.
pub fn diamond_set(
    pool: &HypothesisPool,
    g: &MultiMorphism,
    lambda: &Value,
    alg: &Algebra,
) -> Result<Vec<String>, InferenceError> {
    pool.check_query(g)?;
    let mut out = Vec::new();
    for (dn, _) in pool.diagrams() {
        let pairs = answer_pairs(pool, dn, lambda, alg)?;
        if pairs.iter().any(|p| {
            let (f, dom) = resolve(pool, p);
            le_on(g, f, dom, alg)
        }) {
            out.push(dn.clone());
        }
    }
    Ok(out)
}

/// Join of every answer of every diagram in U, each masked to bottom
/// outside its domain. Empty U (or no answers) gives the bottom map.
pub fn ans_set(
    pool: &HypothesisPool,
    u: &[&str],
    lambda: &Value,
    alg: &Algebra,
) -> Result<MultiMorphism, InferenceError> {
    let mut acc = pool.constant(alg.bot(), alg);
    for name in u {
        for pair in answer_pairs(pool, name, lambda, alg)? {
            let (f, dom) = resolve(pool, &pair);
            let m = masked(f, dom, &alg.bot(), alg);
            acc = MultiMorphism::from_fn(acc.ports().to_vec(), alg, |idx| {
                alg.join(acc.entry(idx), m.entry(idx))
            })?;
        }
    }
    Ok(acc)
}

/// U ⊢ D: every answer of D is already covered by the joined answers of U
/// on its own domain.
pub fn entails(
    pool: &HypothesisPool,
    u: &[&str],
    diagram: &str,
    lambda: &Value,
    alg: &Algebra,
) -> Result<bool, InferenceError> {
    let s = ans_set(pool, u, lambda, alg)?;
    let pairs = answer_pairs(pool, diagram, lambda, alg)?;
    Ok(pairs.iter().all(|p| {
        let (f, dom) = resolve(pool, p);
        le_on(f, &s, dom, alg)
    }))
}

/// The diagrams entailed by U, pool order.
pub fn consequences(
    pool: &HypothesisPool,
    u: &[&str],
    lambda: &Value,
    alg: &Algebra,
) -> Result<Vec<String>, InferenceError> {
    let mut out = Vec::new();
    for (dn, _) in pool.diagrams() {
        if entails(pool, u, dn, lambda, alg)? {
            out.push(dn.clone());
        }
    }
    Ok(out)
}

/// Meet of the pool concepts whose box lies inside U; top map when none
/// qualifies.
pub fn mod_set(
    pool: &HypothesisPool,
    u: &[&str],
    lambda: &Value,
    alg: &Algebra,
) -> Result<MultiMorphism, InferenceError> {
    for name in u {
        if pool.diagram(name).is_none() {
            return Err(InferenceError::UnknownName(name.to_string()));
        }
    }
    let mut acc = pool.constant(alg.top(), alg);
    for (_, g) in pool.concepts() {
        let bx = box_set(pool, g, lambda, alg)?;
        if bx.iter().all(|d| u.iter().any(|n| n == d)) {
            acc = MultiMorphism::from_fn(acc.ports().to_vec(), alg, |idx| {
                alg.meet(acc.entry(idx), g.entry(idx))
            })?;
        }
    }
    Ok(acc)
}

/// Join of the masked answers of every diagram whose answers all stay
/// below g; always below g itself.
pub fn interior(
    pool: &HypothesisPool,
    g: &MultiMorphism,
    lambda: &Value,
    alg: &Algebra,
) -> Result<MultiMorphism, InferenceError> {
    let bx = box_set(pool, g, lambda, alg)?;
    let names: Vec<&str> = bx.iter().map(|s| s.as_str()).collect();
    ans_set(pool, &names, lambda, alg)
}

/// Meet of the answers dominating g, each widened to top outside its
/// domain; always above g itself.
pub fn closure(
    pool: &HypothesisPool,
    g: &MultiMorphism,
    lambda: &Value,
    alg: &Algebra,
) -> Result<MultiMorphism, InferenceError> {
    pool.check_query(g)?;
    let mut acc = pool.constant(alg.top(), alg);
    for (dn, _) in pool.diagrams() {
        for pair in answer_pairs(pool, dn, lambda, alg)? {
            let (f, dom) = resolve(pool, &pair);
            if le_on(g, f, dom, alg) {
                let m = masked(f, dom, &alg.top(), alg);
                acc = MultiMorphism::from_fn(acc.ports().to_vec(), alg, |idx| {
                    alg.meet(acc.entry(idx), m.entry(idx))
                })?;
            }
        }
    }
    Ok(acc)
}

/// Modal formulas over pool diagrams. Atoms name pool diagrams; the boxed
/// operators pass the concept through interior or closure first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RLFormula {
    Atom(String),
    Interior(alloc::boxed::Box<RLFormula>),
    Closure(alloc::boxed::Box<RLFormula>),
    Tensor(alloc::boxed::Box<RLFormula>, alloc::boxed::Box<RLFormula>),
    Implies(alloc::boxed::Box<RLFormula>, alloc::boxed::Box<RLFormula>),
    And(alloc::boxed::Box<RLFormula>, alloc::boxed::Box<RLFormula>),
    Or(alloc::boxed::Box<RLFormula>, alloc::boxed::Box<RLFormula>),
}

/// The table a connective formula denotes: atoms read the pool, compound
/// formulas combine pointwise. Modal operators have no table.
fn formula_table(
    phi: &RLFormula,
    pool: &HypothesisPool,
    alg: &Algebra,
) -> Result<MultiMorphism, InferenceError> {
    let combine = |op: AlgOp, a: &RLFormula, b: &RLFormula| -> Result<MultiMorphism, InferenceError> {
        let ta = formula_table(a, pool, alg)?;
        let tb = formula_table(b, pool, alg)?;
        combine_relations(op, &ta, &tb, alg).map_err(|e| match e {
            SemioticError::Relation(r) => InferenceError::Relation(r),
            other => InferenceError::SupportMismatch(format!("{}", other)),
        })
    };
    match phi {
        RLFormula::Atom(name) => pool
            .diagram(name)
            .cloned()
            .ok_or_else(|| InferenceError::UnknownName(name.clone())),
        RLFormula::Tensor(a, b) => combine(AlgOp::Tensor, a, b),
        RLFormula::Implies(a, b) => combine(AlgOp::Implies, a, b),
        RLFormula::And(a, b) => combine(AlgOp::Meet, a, b),
        RLFormula::Or(a, b) => combine(AlgOp::Join, a, b),
        RLFormula::Interior(_) | RLFormula::Closure(_) => {
            Err(InferenceError::ModalUnderConnective)
        }
    }
}

/// Whether the concept satisfies the formula at λ: the degree between the
/// concept and the formula's table reaches λ, with interior/closure applied
/// to the concept for the modal cases.
pub fn eval_rl(
    phi: &RLFormula,
    g: &MultiMorphism,
    lambda: &Value,
    pool: &HypothesisPool,
    alg: &Algebra,
) -> Result<bool, InferenceError> {
    match phi {
        RLFormula::Interior(inner) => {
            let gi = interior(pool, g, lambda, alg)?;
            eval_rl(inner, &gi, lambda, pool, alg)
        }
        RLFormula::Closure(inner) => {
            let gc = closure(pool, g, lambda, alg)?;
            eval_rl(inner, &gc, lambda, pool, alg)
        }
        _ => {
            let t = formula_table(phi, pool, alg)?;
            let (_, quality) = gamma(g, &t, alg)?;
            Ok(alg.le_val(lambda, &quality))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fabs;
    use crate::relation::OmegaSet;
    use alloc::boxed::Box;
    use alloc::rc::Rc;
    use proptest::prelude::*;

    fn n(x: f64) -> Value {
        Value::Num(x)
    }

    fn support(alg: &Algebra) -> Vec<Port> {
        let a = Rc::new(OmegaSet::crisp("a", &["a0", "a1"], alg));
        let b = Rc::new(OmegaSet::crisp("b", &["b0", "b1", "b2"], alg));
        vec![Port::source("x", &a), Port::source("y", &b)]
    }

    fn table(ports: &[Port], vals: &[f64], alg: &Algebra) -> MultiMorphism {
        MultiMorphism::from_fn(ports.to_vec(), alg, |idx| {
            n(vals[idx[0] * 3 + idx[1]])
        })
        .unwrap()
    }

    #[test]
    fn gamma_frozen_example_and_reflexivity() {
        let alg = Algebra::product();
        let a = Rc::new(OmegaSet::crisp("a", &["e"], &alg));
        let one = |v: f64| {
            MultiMorphism::from_fn(vec![Port::source("x", &a)], &alg, |_| n(v)).unwrap()
        };
        let (map, q) = gamma(&one(0.8), &one(0.4), &alg).unwrap();
        assert!(fabs(map.entry(&[0]).num() - 0.5) < 1e-12);
        assert!(fabs(q.num() - 0.5) < 1e-12);

        let ports = support(&alg);
        let d = table(&ports, &[0.1, 0.5, 0.9, 0.3, 0.7, 1.0], &alg);
        let (_, q) = gamma(&d, &d, &alg).unwrap();
        assert!(alg.is_top(&q));
    }

    #[test]
    fn gamma_broadcasts_projections() {
        let alg = Algebra::godel();
        let ports = support(&alg);
        let d = table(&ports, &[0.2, 0.4, 0.6, 0.2, 0.4, 0.6], &alg);
        let proj = MultiMorphism::from_fn(vec![ports[1].clone()], &alg, |idx| {
            n([0.2, 0.4, 0.6][idx[0]])
        })
        .unwrap();
        let (map, q) = gamma(&d, &proj, &alg).unwrap();
        assert_eq!(map.ports().len(), 2);
        assert!(alg.is_top(&q));
        let (_, q2) = gamma(&proj, &d, &alg).unwrap();
        assert!(alg.eq_val(&q, &q2));

        let c = Rc::new(OmegaSet::crisp("c", &["z"], &alg));
        let alien = MultiMorphism::from_fn(vec![Port::source("w", &c)], &alg, |_| n(1.0)).unwrap();
        assert!(matches!(
            gamma(&d, &alien, &alg),
            Err(InferenceError::SupportMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn gamma_quality_is_a_tensor_similarity(
            v0 in proptest::collection::vec(0..5usize, 6),
            v1 in proptest::collection::vec(0..5usize, 6),
            v2 in proptest::collection::vec(0..5usize, 6),
            luk in proptest::bool::ANY,
        ) {
            let alg = if luk { Algebra::lukasiewicz() } else { Algebra::product() };
            let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
            let ports = support(&alg);
            let to_table = |v: &Vec<usize>| {
                let vals: Vec<f64> = v.iter().map(|&i| grid[i]).collect();
                table(&ports, &vals, &alg)
            };
            let (d0, d1, d2) = (to_table(&v0), to_table(&v1), to_table(&v2));
            let q = |a: &MultiMorphism, b: &MultiMorphism| gamma(a, b, &alg).unwrap().1;
            prop_assert!(alg.is_top(&q(&d0, &d0)));
            prop_assert!(alg.eq_val(&q(&d0, &d1), &q(&d1, &d0)));
            let chained = alg.tensor(&q(&d0, &d1), &q(&d1, &d2));
            prop_assert!(alg.le_val(&chained, &q(&d0, &d2)));
        }
    }

    #[test]
    fn consistency_modes_and_monotonicity() {
        let alg = Algebra::lukasiewicz();
        let ports = support(&alg);
        let interp = table(&ports, &[1.0, 0.8, 0.6, 0.4, 0.2, 0.0], &alg);

        let rep = consistency_check(&interp, &interp, &n(1.0), Quantifier::ForAll, &alg).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.fiber.len(), 6);

        let d = table(&ports, &[1.0, 0.8, 0.6, 0.4, 0.2, 0.5], &alg);
        let r_high = consistency_check(&d, &interp, &n(0.9), Quantifier::ForAll, &alg).unwrap();
        assert!(!r_high.holds);
        let r_low = consistency_check(&d, &interp, &n(0.5), Quantifier::ForAll, &alg).unwrap();
        assert!(r_low.holds);
        assert!(r_high.fiber.len() <= r_low.fiber.len());
        assert!(consistency_check(&d, &interp, &n(0.9), Quantifier::Exists, &alg)
            .unwrap()
            .holds);

        // restriction to a domain missing the offending tuple
        let dom = table(&ports, &[1.0, 1.0, 1.0, 1.0, 1.0, 0.0], &alg);
        let r_dom = consistency_check(
            &d,
            &interp,
            &n(0.9),
            Quantifier::ForAllOn(&dom),
            &alg,
        )
        .unwrap();
        assert!(r_dom.holds);
    }

    // four diagrams, four concepts, no domains, over the 2x3 support
    fn fixture(alg: &Algebra) -> HypothesisPool {
        let ports = support(alg);
        let mut pool = HypothesisPool::new();
        let d0 = [1.0, 0.0, 0.5, 0.0, 1.0, 0.0];
        let d1 = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        let d2 = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let dj = [1.0, 0.5, 0.5, 0.5, 1.0, 0.5]; // pointwise join of d0 and d1
        pool.add_diagram("D0", table(&ports, &d0, alg), alg).unwrap();
        pool.add_diagram("D1", table(&ports, &d1, alg), alg).unwrap();
        pool.add_diagram("D2", table(&ports, &d2, alg), alg).unwrap();
        pool.add_diagram("Dj", table(&ports, &dj, alg), alg).unwrap();
        pool.add_concept("g0", table(&ports, &d0, alg), alg).unwrap();
        pool.add_concept("g1", table(&ports, &d1, alg), alg).unwrap();
        pool.add_concept("gj", table(&ports, &dj, alg), alg).unwrap();
        pool.add_concept("top", table(&ports, &[1.0; 6], alg), alg).unwrap();
        pool
    }

    #[test]
    fn answers_contain_the_interpretation_and_shrink_with_lambda() {
        let alg = Algebra::lukasiewicz();
        let pool = fixture(&alg);
        let at = |l: f64, d: &str| answers(&pool, d, &n(l), &alg).unwrap();
        assert!(at(1.0, "D0").contains(&"g0".to_string()));
        for d in ["D0", "D1", "D2", "Dj"] {
            let hi = at(0.9, d);
            let lo = at(0.4, d);
            for g in &hi {
                assert!(lo.contains(g), "answer {} lost at lower lambda", g);
            }
        }
        assert!(answers(&pool, "nope", &n(0.5), &alg).is_err());
    }

    #[test]
    fn box_and_diamond_on_the_fixture() {
        let alg = Algebra::lukasiewicz();
        let pool = fixture(&alg);
        let g0 = pool.concept("g0").unwrap().clone();
        let lam = n(1.0);
        // at top threshold only exact matches answer, so D0's answers are {g0}
        let bx = box_set(&pool, &g0, &lam, &alg).unwrap();
        let dm = diamond_set(&pool, &g0, &lam, &alg).unwrap();
        assert!(bx.contains(&"D0".to_string()));
        assert!(dm.contains(&"D0".to_string()));

        // box grows as lambda grows, diamond shrinks
        let lams = [0.0, 0.25, 0.5, 0.75, 1.0];
        for g in ["g0", "g1", "gj"] {
            let gt = pool.concept(g).unwrap().clone();
            for w in lams.windows(2) {
                let b_lo = box_set(&pool, &gt, &n(w[0]), &alg).unwrap();
                let b_hi = box_set(&pool, &gt, &n(w[1]), &alg).unwrap();
                for d in &b_lo {
                    assert!(b_hi.contains(d), "box lost {} raising lambda", d);
                }
                let m_lo = diamond_set(&pool, &gt, &n(w[0]), &alg).unwrap();
                let m_hi = diamond_set(&pool, &gt, &n(w[1]), &alg).unwrap();
                for d in &m_hi {
                    assert!(m_lo.contains(d), "diamond gained {} raising lambda", d);
                }
            }
        }

        // join closure: both operands in the box put their pointwise join in it
        let gj = pool.concept("gj").unwrap().clone();
        let bx = box_set(&pool, &gj, &lam, &alg).unwrap();
        if bx.contains(&"D0".to_string()) && bx.contains(&"D1".to_string()) {
            assert!(bx.contains(&"Dj".to_string()));
        }
    }

    #[test]
    fn interior_and_closure_bracket_the_concept() {
        let alg = Algebra::lukasiewicz();
        let pool = fixture(&alg);
        for g in ["g0", "g1", "gj", "top"] {
            let gt = pool.concept(g).unwrap().clone();
            for l in [0.5, 1.0] {
                let lam = n(l);
                let int = interior(&pool, &gt, &lam, &alg).unwrap();
                let cl = closure(&pool, &gt, &lam, &alg).unwrap();
                assert!(le_on(&int, &gt, None, &alg), "interior above {} at {}", g, l);
                assert!(le_on(&gt, &cl, None, &alg), "closure below {} at {}", g, l);
                let int2 = interior(&pool, &int, &lam, &alg).unwrap();
                assert!(int.approx_eq(&int2, &alg), "interior not idempotent on {}", g);
                let cl2 = closure(&pool, &cl, &lam, &alg).unwrap();
                assert!(cl.approx_eq(&cl2, &alg), "closure not idempotent on {}", g);
            }
        }
        // a represented concept is open: its interior is itself
        let g0 = pool.concept("g0").unwrap().clone();
        let int = interior(&pool, &g0, &n(1.0), &alg).unwrap();
        assert!(int.approx_eq(&g0, &alg));
    }

    #[test]
    fn entailment_inclusion_monotony_cut() {
        let alg = Algebra::lukasiewicz();
        let pool = fixture(&alg);
        let lam = n(0.75);
        for d in ["D0", "D1", "D2", "Dj"] {
            assert!(entails(&pool, &[d], d, &lam, &alg).unwrap(), "inclusion at {}", d);
            assert!(
                entails(&pool, &["D0", "D1", "D2", "Dj"], d, &lam, &alg).unwrap(),
                "monotony at {}",
                d
            );
        }
        // cut: V |- D and U+{D} |- D' imply U+V |- D'
        let (v, u) = (["D0", "D1"], ["D2"]);
        for d in ["D0", "D1", "D2", "Dj"] {
            if !entails(&pool, &v, d, &lam, &alg).unwrap() {
                continue;
            }
            for dp in ["D0", "D1", "D2", "Dj"] {
                if entails(&pool, &["D2", d], dp, &lam, &alg).unwrap() {
                    let uv: Vec<&str> = u.iter().chain(&v).cloned().collect();
                    assert!(entails(&pool, &uv, dp, &lam, &alg).unwrap(), "cut {} {}", d, dp);
                }
            }
        }
        // the soundness spot check: entailed atoms hold of the answer join
        let s = ans_set(&pool, &["D0"], &lam, &alg).unwrap();
        if entails(&pool, &["D0"], "D0", &lam, &alg).unwrap() {
            let phi = RLFormula::Atom("D0".to_string());
            let (_, q) = gamma(&s, pool.diagram("D0").unwrap(), &alg).unwrap();
            assert!(eval_rl(&phi, &s, &q, &pool, &alg).unwrap());
        }
    }

    fn pool_from(
        alg: &Algebra,
        diagrams: &[Vec<usize>],
        concepts: &[Vec<usize>],
        domains: &[Vec<usize>],
    ) -> HypothesisPool {
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let ports = support(alg);
        let mut pool = HypothesisPool::new();
        for (k, v) in diagrams.iter().enumerate() {
            let vals: Vec<f64> = v.iter().map(|&i| grid[i]).collect();
            pool.add_diagram(&format!("D{}", k), table(&ports, &vals, alg), alg).unwrap();
        }
        for (k, v) in concepts.iter().enumerate() {
            let vals: Vec<f64> = v.iter().map(|&i| grid[i]).collect();
            pool.add_concept(&format!("g{}", k), table(&ports, &vals, alg), alg).unwrap();
        }
        for (k, v) in domains.iter().enumerate() {
            let mut vals: Vec<f64> = v.iter().map(|&i| grid[i]).collect();
            vals[0] = 1.0; // keep the top fiber nonempty
            pool.add_domain(&format!("dom{}", k), table(&ports, &vals, alg), alg).unwrap();
        }
        pool
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn pool_laws_hold_on_random_pools(
            diagrams in proptest::collection::vec(proptest::collection::vec(0..5usize, 6), 1..4),
            concepts in proptest::collection::vec(proptest::collection::vec(0..5usize, 6), 1..4),
            domains in proptest::collection::vec(proptest::collection::vec(0..5usize, 6), 0..3),
            li in 0..5usize,
            luk in proptest::bool::ANY,
        ) {
            let alg = if luk { Algebra::lukasiewicz() } else { Algebra::godel() };
            let pool = pool_from(&alg, &diagrams, &concepts, &domains);
            let lam = n([0.0, 0.25, 0.5, 0.75, 1.0][li]);
            let names: Vec<String> = pool.diagrams().iter().map(|(n, _)| n.clone()).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();

            // inclusion and monotony
            for d in &refs {
                prop_assert!(entails(&pool, &[d], d, &lam, &alg).unwrap());
                prop_assert!(entails(&pool, &refs, d, &lam, &alg).unwrap());
            }

            // the answer join distributes over unions
            if refs.len() >= 2 {
                let (u, v) = refs.split_at(1);
                let su = ans_set(&pool, u, &lam, &alg).unwrap();
                let sv = ans_set(&pool, v, &lam, &alg).unwrap();
                let joined = MultiMorphism::from_fn(su.ports().to_vec(), &alg, |idx| {
                    alg.join(su.entry(idx), sv.entry(idx))
                }).unwrap();
                let total = ans_set(&pool, &refs, &lam, &alg).unwrap();
                prop_assert!(total.approx_eq(&joined, &alg));
            }

            // consequence operator: monotone and idempotent
            let a_one = consequences(&pool, &refs[..1], &lam, &alg).unwrap();
            let a_all = consequences(&pool, &refs, &lam, &alg).unwrap();
            for d in &a_one {
                prop_assert!(a_all.contains(d));
            }
            let a_refs: Vec<&str> = a_one.iter().map(|s| s.as_str()).collect();
            let a_again = consequences(&pool, &a_refs, &lam, &alg).unwrap();
            prop_assert!(a_one == a_again);

            // answers and diamond are antitone in lambda, box is monotone
            let lam_hi = n(1.0);
            for d in &refs {
                let lo = answers(&pool, d, &lam, &alg).unwrap();
                let hi = answers(&pool, d, &lam_hi, &alg).unwrap();
                for g in &hi {
                    prop_assert!(lo.contains(g));
                }
            }
            let g = pool.concepts()[0].1.clone();
            let b_lo = box_set(&pool, &g, &lam, &alg).unwrap();
            let b_hi = box_set(&pool, &g, &lam_hi, &alg).unwrap();
            for d in &b_lo {
                prop_assert!(b_hi.contains(d));
            }
            let m_lo = diamond_set(&pool, &g, &lam, &alg).unwrap();
            let m_hi = diamond_set(&pool, &g, &lam_hi, &alg).unwrap();
            for d in &m_hi {
                prop_assert!(m_lo.contains(d));
            }

            // interior and closure bracket, monotone, idempotent
            let h = pool.concepts()[pool.concepts().len() - 1].1.clone();
            let (small, large) = {
                let gs = MultiMorphism::from_fn(g.ports().to_vec(), &alg, |idx| {
                    alg.meet(g.entry(idx), h.entry(idx))
                }).unwrap();
                let gl = MultiMorphism::from_fn(g.ports().to_vec(), &alg, |idx| {
                    alg.join(g.entry(idx), h.entry(idx))
                }).unwrap();
                (gs, gl)
            };
            let int_s = interior(&pool, &small, &lam, &alg).unwrap();
            let int_l = interior(&pool, &large, &lam, &alg).unwrap();
            prop_assert!(le_on(&int_s, &small, None, &alg));
            prop_assert!(le_on(&int_s, &int_l, None, &alg));
            let int_again = interior(&pool, &int_s, &lam, &alg).unwrap();
            prop_assert!(int_s.approx_eq(&int_again, &alg));
            let cl_s = closure(&pool, &small, &lam, &alg).unwrap();
            let cl_l = closure(&pool, &large, &lam, &alg).unwrap();
            prop_assert!(le_on(&small, &cl_s, None, &alg));
            prop_assert!(le_on(&cl_s, &cl_l, None, &alg));
            let cl_again = closure(&pool, &cl_s, &lam, &alg).unwrap();
            prop_assert!(cl_s.approx_eq(&cl_again, &alg));
        }
    }

    #[test]
    fn formula_evaluation() {
        let alg = Algebra::lukasiewicz();
        let pool = fixture(&alg);
        let g0 = pool.concept("g0").unwrap().clone();

        let atom = RLFormula::Atom("D0".to_string());
        assert!(eval_rl(&atom, &g0, &n(1.0), &pool, &alg).unwrap());
        let g1 = pool.concept("g1").unwrap().clone();
        assert!(!eval_rl(&atom, &g1, &n(1.0), &pool, &alg).unwrap());

        // connectives match the pointwise oracle on the combined table
        let compound = RLFormula::And(
            Box::new(RLFormula::Atom("D0".to_string())),
            Box::new(RLFormula::Atom("D1".to_string())),
        );
        let combined = combine_relations(
            AlgOp::Meet,
            pool.diagram("D0").unwrap(),
            pool.diagram("D1").unwrap(),
            &alg,
        )
        .unwrap();
        let (_, q) = gamma(&g0, &combined, &alg).unwrap();
        assert!(eval_rl(&compound, &g0, &q, &pool, &alg).unwrap());
        let above = alg.join(&q, &n(0.05));
        let strictly_above = alg.tensor(&above, &n(1.0));
        if !alg.eq_val(&q, &strictly_above) {
            assert!(!eval_rl(&compound, &g0, &strictly_above, &pool, &alg).unwrap());
        }

        // an open concept keeps its atom verdicts under the interior modality
        let boxed = RLFormula::Interior(Box::new(RLFormula::Atom("D0".to_string())));
        let int = interior(&pool, &g0, &n(1.0), &alg).unwrap();
        assert!(int.approx_eq(&g0, &alg));
        assert_eq!(
            eval_rl(&boxed, &g0, &n(1.0), &pool, &alg).unwrap(),
            eval_rl(&atom, &g0, &n(1.0), &pool, &alg).unwrap()
        );

        let bad = RLFormula::Tensor(
            Box::new(RLFormula::Interior(Box::new(RLFormula::Atom("D0".to_string())))),
            Box::new(RLFormula::Atom("D1".to_string())),
        );
        assert!(matches!(
            eval_rl(&bad, &g0, &n(0.5), &pool, &alg),
            Err(InferenceError::ModalUnderConnective)
        ));
    }

    #[test]
    fn pool_rejects_bad_entries() {
        let alg = Algebra::boolean();
        let ports = support(&alg);
        let mut pool = HypothesisPool::new();
        pool.add_diagram("D", table(&ports, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0], &alg), &alg)
            .unwrap();
        assert!(matches!(
            pool.add_diagram("D", table(&ports, &[1.0; 6], &alg), &alg),
            Err(InferenceError::DuplicateName(_))
        ));
        assert!(matches!(
            pool.add_domain("empty", table(&ports, &[0.0; 6], &alg), &alg),
            Err(InferenceError::EmptyDomain { .. })
        ));
        // boolean algebra rejects off-grid values
        assert!(matches!(
            pool.add_concept("g", table(&ports, &[0.5; 6], &alg), &alg),
            Err(InferenceError::BadValue { .. })
        ));
        // a different support is turned away
        let c = Rc::new(OmegaSet::crisp("c", &["z"], &alg));
        let alien =
            MultiMorphism::from_fn(vec![Port::source("w", &c)], &alg, |_| n(1.0)).unwrap();
        assert!(matches!(
            pool.add_concept("h", alien, &alg),
            Err(InferenceError::SupportMismatch(_))
        ));

        // domain-restricted answers: a concept agreeing on the domain only
        let alg = Algebra::lukasiewicz();
        let ports = support(&alg);
        let mut pool = HypothesisPool::new();
        pool.add_diagram("D", table(&ports, &[1.0, 0.8, 0.6, 0.4, 0.2, 0.0], &alg), &alg)
            .unwrap();
        pool.add_concept("g", table(&ports, &[1.0, 0.8, 0.0, 0.0, 0.0, 0.0], &alg), &alg)
            .unwrap();
        pool.add_domain("front", table(&ports, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0], &alg), &alg)
            .unwrap();
        let pairs = answer_pairs(&pool, "D", &n(1.0), &alg).unwrap();
        assert_eq!(pairs, vec![("g".to_string(), Some("front".to_string()))]);
    }
}
