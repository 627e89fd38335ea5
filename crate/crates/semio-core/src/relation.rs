//! Truth-valued sets and relations.
//!
//! An [`OmegaSet`] is a finite support with a truth-valued similarity that is
//! symmetric and should be ⊗-transitive (violations are reported, not
//! rejected: several useful tables are only approximately transitive). The
//! diagonal of the similarity is the extent (membership degree).
//!
//! A [`MultiMorphism`] is a dense truth-valued table over a list of named
//! ports, each bound to an Ω-set and flagged source or target. Composition
//! contracts the target ports of the left operand against the source ports
//! of the right operand that share a sign name, sup-⊗ style. Ports with
//! signs private to one operand survive untouched, so disjoint composition
//! degenerates to a pure tensor.

use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{Algebra, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum RelationError {
    DuplicatePortName(String),
    BoundaryAmbiguity { sign: String },
    SupportMismatch { sign: String },
    UnknownElement { set: String, elem: String },
    UnknownPort(String),
    KeyMissing { sign: String },
    NotTotal { witness: String },
    NotDivisible,
    ShapeMismatch(String),
}

impl fmt::Display for RelationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationError::DuplicatePortName(n) => write!(f, "duplicate port name '{}'", n),
            RelationError::BoundaryAmbiguity { sign } => write!(
                f,
                "sign '{}' occurs more than once on a composition boundary; contraction is ambiguous",
                sign
            ),
            RelationError::SupportMismatch { sign } => {
                write!(f, "supports for sign '{}' differ between operands", sign)
            }
            RelationError::UnknownElement { set, elem } => {
                write!(f, "element '{}' is not in the support of '{}'", elem, set)
            }
            RelationError::UnknownPort(n) => write!(f, "no port named '{}'", n),
            RelationError::KeyMissing { sign } => {
                write!(f, "operand lacks a port with key sign '{}'", sign)
            }
            RelationError::NotTotal { witness } => {
                write!(f, "relation is not total; worst source tuple: {}", witness)
            }
            RelationError::NotDivisible => {
                write!(f, "conditional tables need a divisible algebra")
            }
            RelationError::ShapeMismatch(m) => write!(f, "shape mismatch: {}", m),
        }
    }
}

/// Finite support with a symmetric truth-valued similarity.
#[derive(Clone, Debug)]
pub struct OmegaSet {
    pub sign: String,
    pub elems: Vec<String>,
    sim: Vec<Value>,
}

impl OmegaSet {
    /// Crisp set: similarity is top on the diagonal, bottom elsewhere.
    pub fn crisp(sign: &str, elems: &[&str], alg: &Algebra) -> OmegaSet {
        let n = elems.len();
        let mut sim = vec![alg.bot(); n * n];
        for i in 0..n {
            sim[i * n + i] = alg.top();
        }
        OmegaSet {
            sign: sign.to_string(),
            elems: elems.iter().map(|e| e.to_string()).collect(),
            sim,
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, elem: &str) -> Option<usize> {
        self.elems.iter().position(|e| e == elem)
    }

    pub fn sim(&self, i: usize, j: usize) -> &Value {
        &self.sim[i * self.elems.len() + j]
    }

    /// Sets sim(i,j) and sim(j,i); similarity stays symmetric by construction.
    pub fn set_sim(&mut self, i: usize, j: usize, v: Value) {
        let n = self.elems.len();
        self.sim[i * n + j] = v.clone();
        self.sim[j * n + i] = v;
    }

    /// Extent (membership degree) of element `i`.
    pub fn extent(&self, i: usize) -> &Value {
        self.sim(i, i)
    }

    /// Whether element `i` is global: extent = top.
    pub fn is_global(&self, i: usize, alg: &Algebra) -> bool {
        alg.is_top(self.extent(i))
    }

    /// Triples (i,j,k) with sim(i,j)⊗sim(j,k) > sim(i,k): ⊗-transitivity
    /// failures. Empty when the similarity is a genuine ⊗-similarity.
    pub fn transitivity_violations(&self, alg: &Algebra) -> Vec<(usize, usize, usize)> {
        let n = self.elems.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let chained = alg.tensor(self.sim(i, j), self.sim(j, k));
                    if !alg.le_val(&chained, self.sim(i, k)) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Componentwise product set: tuple elements, similarity = ⊗ of factors.
    pub fn product(sign: &str, factors: &[&OmegaSet], alg: &Algebra) -> OmegaSet {
        let sizes: Vec<usize> = factors.iter().map(|o| o.len()).collect();
        let mut elems = Vec::new();
        let mut idxs = Vec::new();
        for idx in tuples(&sizes) {
            let name: Vec<&str> = idx
                .iter()
                .enumerate()
                .map(|(p, &i)| factors[p].elems[i].as_str())
                .collect();
            elems.push(name.join("|"));
            idxs.push(idx);
        }
        let n = elems.len();
        let mut sim = vec![alg.bot(); n * n];
        for (r, ri) in idxs.iter().enumerate() {
            for (c, ci) in idxs.iter().enumerate() {
                let mut v = alg.top();
                for (p, f) in factors.iter().enumerate() {
                    v = alg.tensor(&v, f.sim(ri[p], ci[p]));
                }
                sim[r * n + c] = v;
            }
        }
        OmegaSet {
            sign: sign.to_string(),
            elems,
            sim,
        }
    }
}

/// Iterator over index tuples of a shape, last coordinate fastest.
pub fn tuples(sizes: &[usize]) -> TupleIter {
    TupleIter {
        sizes: sizes.to_vec(),
        cur: vec![0; sizes.len()],
        fresh: true,
        done: sizes.iter().any(|&s| s == 0),
    }
}

pub struct TupleIter {
    sizes: Vec<usize>,
    cur: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.cur.clone());
        }
        let mut p = self.sizes.len();
        loop {
            if p == 0 {
                self.done = true;
                return None;
            }
            p -= 1;
            self.cur[p] += 1;
            if self.cur[p] < self.sizes[p] {
                break;
            }
            self.cur[p] = 0;
        }
        Some(self.cur.clone())
    }
}

pub fn table_len(sizes: &[usize]) -> usize {
    sizes.iter().product()
}

pub fn offset(sizes: &[usize], idx: &[usize]) -> usize {
    let mut o = 0;
    for (s, i) in sizes.iter().zip(idx) {
        o = o * s + i;
    }
    o
}

#[derive(Clone, Debug)]
pub struct Port {
    pub name: String,
    pub is_source: bool,
    pub oset: Rc<OmegaSet>,
}

impl Port {
    pub fn source(name: &str, oset: &Rc<OmegaSet>) -> Port {
        Port {
            name: name.to_string(),
            is_source: true,
            oset: Rc::clone(oset),
        }
    }

    pub fn target(name: &str, oset: &Rc<OmegaSet>) -> Port {
        Port {
            name: name.to_string(),
            is_source: false,
            oset: Rc::clone(oset),
        }
    }

    pub fn sign(&self) -> &str {
        &self.oset.sign
    }
}

/// Report of a totality (or faithfulness) check.
#[derive(Clone, Debug)]
pub struct TotalityReport {
    pub holds: bool,
    /// Infimum over source tuples of biimp(sup over targets, extent): the
    /// best threshold at which the relation counts as total.
    pub degree: Value,
    /// Worst source tuple (element names) when the check fails.
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default)]
pub struct MorphismClass {
    pub total: bool,
    pub faithful: bool,
    pub epi: bool,
    pub mono: bool,
    pub iso: bool,
    pub orthogonal: bool,
    pub adjoint: bool,
}

/// Dense truth-valued table over named, Ω-set-bound ports.
#[derive(Clone, Debug)]
pub struct MultiMorphism {
    ports: Vec<Port>,
    data: Vec<Value>,
}

impl MultiMorphism {
    pub fn new(ports: Vec<Port>, alg: &Algebra) -> Result<MultiMorphism, RelationError> {
        for (i, p) in ports.iter().enumerate() {
            if ports[..i].iter().any(|q| q.name == p.name) {
                return Err(RelationError::DuplicatePortName(p.name.clone()));
            }
        }
        let len = table_len(&ports.iter().map(|p| p.oset.len()).collect::<Vec<_>>());
        Ok(MultiMorphism {
            ports,
            data: vec![alg.bot(); len],
        })
    }

    pub fn from_fn(
        ports: Vec<Port>,
        alg: &Algebra,
        mut f: impl FnMut(&[usize]) -> Value,
    ) -> Result<MultiMorphism, RelationError> {
        let mut m = MultiMorphism::new(ports, alg)?;
        let sizes = m.shape();
        for idx in tuples(&sizes) {
            let v = f(&idx);
            let o = offset(&sizes, &idx);
            m.data[o] = v;
        }
        Ok(m)
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn shape(&self) -> Vec<usize> {
        self.ports.iter().map(|p| p.oset.len()).collect()
    }

    pub fn entry(&self, idx: &[usize]) -> &Value {
        &self.data[offset(&self.shape(), idx)]
    }

    pub fn set_entry(&mut self, idx: &[usize], v: Value) {
        let o = offset(&self.shape(), idx);
        self.data[o] = v;
    }

    pub fn set_entry_at(&mut self, offset: usize, v: Value) {
        self.data[offset] = v;
    }

    pub fn data(&self) -> &[Value] {
        &self.data
    }

    pub fn port_index(&self, name: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.name == name)
    }

    pub fn source_positions(&self) -> Vec<usize> {
        (0..self.ports.len()).filter(|&i| self.ports[i].is_source).collect()
    }

    pub fn target_positions(&self) -> Vec<usize> {
        (0..self.ports.len()).filter(|&i| !self.ports[i].is_source).collect()
    }

    /// Same table with source and target roles swapped.
    pub fn transpose(&self) -> MultiMorphism {
        let mut m = self.clone();
        for p in &mut m.ports {
            p.is_source = !p.is_source;
        }
        m
    }

    /// Extent of an index tuple: ⊗ of the per-port extents.
    pub fn tuple_extent(&self, idx: &[usize], alg: &Algebra) -> Value {
        let mut v = alg.top();
        for (p, &i) in self.ports.iter().zip(idx) {
            v = alg.tensor(&v, p.oset.extent(i));
        }
        v
    }

    fn extent_at(&self, positions: &[usize], idx: &[usize], alg: &Algebra) -> Value {
        let mut v = alg.top();
        for &p in positions {
            v = alg.tensor(&v, self.ports[p].oset.extent(idx[p]));
        }
        v
    }

    /// Identity on an Ω-set: its similarity read as a one-in one-out table.
    pub fn identity(oset: &Rc<OmegaSet>, alg: &Algebra) -> MultiMorphism {
        Self::similarity(&[Rc::clone(oset)], alg)
    }

    /// Similarity of a product of Ω-sets as a morphism: n source ports and
    /// n primed target ports, valued ⊗ of the componentwise similarities.
    pub fn similarity(osets: &[Rc<OmegaSet>], alg: &Algebra) -> MultiMorphism {
        let mut ports = Vec::new();
        for o in osets {
            ports.push(Port::source(&o.sign, o));
        }
        for o in osets {
            ports.push(Port::target(&format!("{}'", o.sign), o));
        }
        let n = osets.len();
        MultiMorphism::from_fn(ports, alg, |idx| {
            let mut v = alg.top();
            for (k, o) in osets.iter().enumerate() {
                v = alg.tensor(&v, o.sim(idx[k], idx[n + k]));
            }
            v
        })
        .expect("similarity ports are distinct by construction")
    }

    fn contraction_pairs(
        f: &MultiMorphism,
        g: &MultiMorphism,
        restrict: Option<&[&str]>,
    ) -> Result<Vec<(usize, usize)>, RelationError> {
        let f_t = f.target_positions();
        let g_s = g.source_positions();
        let mut shared: Vec<String> = Vec::new();
        for &i in &f_t {
            let sign = f.ports[i].sign();
            if g_s.iter().any(|&j| g.ports[j].sign() == sign) && !shared.iter().any(|s| s == sign)
            {
                if restrict.map_or(true, |ks| ks.contains(&sign)) {
                    shared.push(sign.to_string());
                }
            }
        }
        if let Some(ks) = restrict {
            for k in ks {
                if !shared.iter().any(|s| s == k) {
                    return Err(RelationError::KeyMissing { sign: k.to_string() });
                }
            }
        }
        let mut pairs = Vec::new();
        for sign in &shared {
            let fi: Vec<usize> = f_t
                .iter()
                .copied()
                .filter(|&i| f.ports[i].sign() == sign)
                .collect();
            let gi: Vec<usize> = g_s
                .iter()
                .copied()
                .filter(|&j| g.ports[j].sign() == sign)
                .collect();
            if fi.len() > 1 || gi.len() > 1 {
                return Err(RelationError::BoundaryAmbiguity { sign: sign.clone() });
            }
            if f.ports[fi[0]].oset.elems != g.ports[gi[0]].oset.elems {
                return Err(RelationError::SupportMismatch { sign: sign.clone() });
            }
            pairs.push((fi[0], gi[0]));
        }
        Ok(pairs)
    }

    fn compose_impl(
        f: &MultiMorphism,
        g: &MultiMorphism,
        restrict: Option<&[&str]>,
        alg: &Algebra,
    ) -> Result<MultiMorphism, RelationError> {
        let pairs = Self::contraction_pairs(f, g, restrict)?;
        let in_boundary_f = |i: usize| pairs.iter().any(|&(a, _)| a == i);
        let in_boundary_g = |j: usize| pairs.iter().any(|&(_, b)| b == j);

        // result ports: f sources, g surviving sources, f surviving targets,
        // g targets; colliding names from g get primed.
        #[derive(Clone, Copy)]
        enum Side {
            F(usize),
            G(usize),
        }
        let mut picks: Vec<Side> = Vec::new();
        for i in f.source_positions() {
            picks.push(Side::F(i));
        }
        for j in g.source_positions() {
            if !in_boundary_g(j) {
                picks.push(Side::G(j));
            }
        }
        for i in f.target_positions() {
            if !in_boundary_f(i) {
                picks.push(Side::F(i));
            }
        }
        for j in g.target_positions() {
            picks.push(Side::G(j));
        }

        let mut ports: Vec<Port> = Vec::new();
        for pick in &picks {
            let mut port = match pick {
                Side::F(i) => f.ports[*i].clone(),
                Side::G(j) => g.ports[*j].clone(),
            };
            while ports.iter().any(|p| p.name == port.name) {
                port.name.push('\'');
            }
            ports.push(port);
        }

        // map each operand port to a result slot or a boundary slot
        let nf = f.ports.len();
        let mut f_from = vec![usize::MAX; nf]; // result index positions
        let mut g_from = vec![usize::MAX; g.ports.len()];
        for (r, pick) in picks.iter().enumerate() {
            match pick {
                Side::F(i) => f_from[*i] = r,
                Side::G(j) => g_from[*j] = r,
            }
        }
        let bsizes: Vec<usize> = pairs.iter().map(|&(a, _)| f.ports[a].oset.len()).collect();

        let fshape = f.shape();
        let gshape = g.shape();
        let mut out = MultiMorphism::new(ports, alg)?;
        let osizes = out.shape();
        for ridx in tuples(&osizes) {
            let mut acc = alg.bot();
            for bidx in tuples(&bsizes) {
                let mut fi = vec![0usize; fshape.len()];
                for i in 0..fshape.len() {
                    fi[i] = if f_from[i] != usize::MAX {
                        ridx[f_from[i]]
                    } else {
                        let slot = pairs.iter().position(|&(a, _)| a == i).unwrap();
                        bidx[slot]
                    };
                }
                let mut gi = vec![0usize; gshape.len()];
                for j in 0..gshape.len() {
                    gi[j] = if g_from[j] != usize::MAX {
                        ridx[g_from[j]]
                    } else {
                        let slot = pairs.iter().position(|&(_, b)| b == j).unwrap();
                        bidx[slot]
                    };
                }
                let v = alg.tensor(f.entry(&fi), g.entry(&gi));
                acc = alg.join(&acc, &v);
            }
            let o = offset(&osizes, &ridx);
            out.data[o] = acc;
        }
        Ok(out)
    }

    /// Sup-⊗ composition contracting every sign shared between the left
    /// operand's targets and the right operand's sources.
    pub fn compose(
        f: &MultiMorphism,
        g: &MultiMorphism,
        alg: &Algebra,
    ) -> Result<MultiMorphism, RelationError> {
        Self::compose_impl(f, g, None, alg)
    }

    /// Composition contracting only the named key signs; other shared signs
    /// survive as separate ports.
    pub fn keyed_join(
        f: &MultiMorphism,
        g: &MultiMorphism,
        keys: &[&str],
        alg: &Algebra,
    ) -> Result<MultiMorphism, RelationError> {
        Self::compose_impl(f, g, Some(keys), alg)
    }

    /// Join of a family along one shared key sign: the key port is kept
    /// once and values are ⊗-combined at equal key elements. Left fold,
    /// exactly associative.
    pub fn indexed_product(
        fs: &[&MultiMorphism],
        key_sign: &str,
        alg: &Algebra,
    ) -> Result<MultiMorphism, RelationError> {
        if fs.is_empty() {
            return Err(RelationError::ShapeMismatch("empty family".to_string()));
        }
        let mut key_ports = Vec::new();
        for f in fs {
            let ks: Vec<usize> = (0..f.ports.len())
                .filter(|&i| f.ports[i].sign() == key_sign)
                .collect();
            if ks.len() != 1 {
                return Err(if ks.is_empty() {
                    RelationError::KeyMissing { sign: key_sign.to_string() }
                } else {
                    RelationError::BoundaryAmbiguity { sign: key_sign.to_string() }
                });
            }
            if f.ports[ks[0]].oset.elems != fs[0].ports[key_ports.first().copied().unwrap_or(0)]
                .oset
                .elems
                && !key_ports.is_empty()
            {
                return Err(RelationError::SupportMismatch { sign: key_sign.to_string() });
            }
            key_ports.push(ks[0]);
        }

        let mut ports = vec![fs[0].ports[key_ports[0]].clone()];
        let mut slots: Vec<Vec<usize>> = Vec::new(); // per f, per port, result slot
        for (fi, f) in fs.iter().enumerate() {
            let mut per = vec![0usize; f.ports.len()];
            for (pi, p) in f.ports.iter().enumerate() {
                if pi == key_ports[fi] {
                    per[pi] = 0;
                } else {
                    let mut port = p.clone();
                    while ports.iter().any(|q| q.name == port.name) {
                        port.name.push('\'');
                    }
                    ports.push(port);
                    per[pi] = ports.len() - 1;
                }
            }
            slots.push(per);
        }

        let mut out = MultiMorphism::new(ports, alg)?;
        let osizes = out.shape();
        for ridx in tuples(&osizes) {
            let mut acc = alg.top();
            for (fi, f) in fs.iter().enumerate() {
                let idx: Vec<usize> = (0..f.ports.len()).map(|pi| ridx[slots[fi][pi]]).collect();
                acc = alg.tensor(&acc, f.entry(&idx));
            }
            let o = offset(&osizes, &ridx);
            out.data[o] = acc;
        }
        Ok(out)
    }

    /// Sup-projection onto the named ports: hidden ports (source or target)
    /// are summed out by join.
    pub fn project_observable(
        &self,
        keep: &[&str],
        alg: &Algebra,
    ) -> Result<MultiMorphism, RelationError> {
        let mut keep_pos = Vec::new();
        for k in keep {
            match self.port_index(k) {
                Some(i) => keep_pos.push(i),
                None => return Err(RelationError::UnknownPort(k.to_string())),
            }
        }
        let ports: Vec<Port> = keep_pos.iter().map(|&i| self.ports[i].clone()).collect();
        let drop_pos: Vec<usize> =
            (0..self.ports.len()).filter(|i| !keep_pos.contains(i)).collect();
        let dsizes: Vec<usize> = drop_pos.iter().map(|&i| self.ports[i].oset.len()).collect();
        let shape = self.shape();
        let mut out = MultiMorphism::new(ports, alg)?;
        let osizes = out.shape();
        for ridx in tuples(&osizes) {
            let mut acc = alg.bot();
            for didx in tuples(&dsizes) {
                let mut idx = vec![0usize; shape.len()];
                for (k, &p) in keep_pos.iter().enumerate() {
                    idx[p] = ridx[k];
                }
                for (k, &p) in drop_pos.iter().enumerate() {
                    idx[p] = didx[k];
                }
                acc = alg.join(&acc, self.entry(&idx));
            }
            let o = offset(&osizes, &ridx);
            out.data[o] = acc;
        }
        Ok(out)
    }

    fn coverage(&self, over_sources: bool, alg: &Algebra) -> TotalityReport {
        let outer = if over_sources {
            self.source_positions()
        } else {
            self.target_positions()
        };
        let inner: Vec<usize> =
            (0..self.ports.len()).filter(|i| !outer.contains(i)).collect();
        let osz: Vec<usize> = outer.iter().map(|&i| self.ports[i].oset.len()).collect();
        let isz: Vec<usize> = inner.iter().map(|&i| self.ports[i].oset.len()).collect();
        let shape = self.shape();
        let mut degree = alg.top();
        let mut holds = true;
        let mut witness = None;
        for oidx in tuples(&osz) {
            let mut idx = vec![0usize; shape.len()];
            for (k, &p) in outer.iter().enumerate() {
                idx[p] = oidx[k];
            }
            let mut sup = alg.bot();
            for iidx in tuples(&isz) {
                for (k, &p) in inner.iter().enumerate() {
                    idx[p] = iidx[k];
                }
                sup = alg.join(&sup, self.entry(&idx));
            }
            let want = self.extent_at(&outer, &idx, alg);
            let grade = alg.biimp(&sup, &want);
            if !alg.eq_val(&sup, &want) && holds {
                holds = false;
                witness = Some(
                    outer
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| self.ports[p].oset.elems[oidx[k]].clone())
                        .collect(),
                );
            }
            degree = alg.meet(&degree, &grade);
        }
        TotalityReport { holds, degree, witness }
    }

    /// Total: for every source tuple, sup over targets equals the extent.
    pub fn totality(&self, alg: &Algebra) -> TotalityReport {
        self.coverage(true, alg)
    }

    /// Faithful: for every target tuple, sup over sources equals the extent.
    pub fn faithfulness(&self, alg: &Algebra) -> TotalityReport {
        self.coverage(false, alg)
    }

    /// Conditional table toward the targets: extent(sources) ⇒ entry.
    /// Needs a divisible algebra and totality; with both, the entry is
    /// recovered as extent ⊗ conditional.
    pub fn conditional(&self, alg: &Algebra) -> Result<MultiMorphism, RelationError> {
        if !alg.is_divisible() {
            return Err(RelationError::NotDivisible);
        }
        let t = self.totality(alg);
        if !t.holds {
            return Err(RelationError::NotTotal {
                witness: t.witness.map(|w| w.join(",")).unwrap_or_default(),
            });
        }
        let src = self.source_positions();
        let mut out = self.clone();
        let shape = self.shape();
        for idx in tuples(&shape) {
            let ext = self.extent_at(&src, &idx, alg);
            let v = alg.implies(&ext, self.entry(&idx));
            let o = offset(&shape, &idx);
            out.data[o] = v;
        }
        Ok(out)
    }

    /// Port alignment of `other` onto `self` by role, sign and support;
    /// names break remaining ties. None when the ports cannot be matched.
    fn align(&self, other: &MultiMorphism) -> Option<Vec<usize>> {
        if self.ports.len() != other.ports.len() {
            return None;
        }
        let mut used = vec![false; other.ports.len()];
        let mut perm = Vec::with_capacity(self.ports.len());
        for p in &self.ports {
            let cands: Vec<usize> = (0..other.ports.len())
                .filter(|&j| {
                    !used[j]
                        && other.ports[j].is_source == p.is_source
                        && other.ports[j].sign() == p.sign()
                        && other.ports[j].oset.elems == p.oset.elems
                })
                .collect();
            let pick = match cands.len() {
                0 => return None,
                1 => cands[0],
                _ => cands
                    .iter()
                    .copied()
                    .find(|&j| other.ports[j].name == p.name)
                    .unwrap_or(cands[0]),
            };
            used[pick] = true;
            perm.push(pick);
        }
        Some(perm)
    }

    /// Table equality up to port order (alignment by role/sign/support),
    /// entrywise within the algebra tolerance.
    pub fn approx_eq(&self, other: &MultiMorphism, alg: &Algebra) -> bool {
        let Some(perm) = self.align(other) else {
            return false;
        };
        let shape = self.shape();
        let oshape = other.shape();
        for idx in tuples(&shape) {
            let mut oidx = vec![0usize; idx.len()];
            for (mine, &theirs) in perm.iter().enumerate() {
                oidx[theirs] = idx[mine];
            }
            if !alg.eq_val(self.entry(&idx), &other.data[offset(&oshape, &oidx)]) {
                return false;
            }
        }
        true
    }

    /// First tuple (element names, comma-joined) where the tables disagree,
    /// or a note when the port signatures cannot be aligned at all.
    /// None means the tables agree within epsilon.
    pub fn first_difference(&self, other: &MultiMorphism, alg: &Algebra) -> Option<String> {
        let Some(perm) = self.align(other) else {
            return Some("port signature mismatch".to_string());
        };
        let shape = self.shape();
        let oshape = other.shape();
        for idx in tuples(&shape) {
            let mut oidx = vec![0usize; idx.len()];
            for (mine, &theirs) in perm.iter().enumerate() {
                oidx[theirs] = idx[mine];
            }
            let a = self.entry(&idx);
            let b = &other.data[offset(&oshape, &oidx)];
            if !alg.eq_val(a, b) {
                let names: Vec<String> = self
                    .ports
                    .iter()
                    .zip(&idx)
                    .map(|(p, &i)| p.oset.elems[i].clone())
                    .collect();
                return Some(format!("({}): {} vs {}", names.join(","), a, b));
            }
        }
        None
    }

    /// Entrywise order up to port alignment.
    pub fn approx_le(&self, other: &MultiMorphism, alg: &Algebra) -> bool {
        let Some(perm) = self.align(other) else {
            return false;
        };
        let shape = self.shape();
        let oshape = other.shape();
        for idx in tuples(&shape) {
            let mut oidx = vec![0usize; idx.len()];
            for (mine, &theirs) in perm.iter().enumerate() {
                oidx[theirs] = idx[mine];
            }
            if !alg.le_val(self.entry(&idx), &other.data[offset(&oshape, &oidx)]) {
                return false;
            }
        }
        true
    }

    fn side_osets(&self, sources: bool) -> Vec<Rc<OmegaSet>> {
        let pos = if sources {
            self.source_positions()
        } else {
            self.target_positions()
        };
        pos.iter().map(|&i| Rc::clone(&self.ports[i].oset)).collect()
    }

    /// Structural classification against the source/target similarities.
    /// Requires source signs pairwise distinct and target signs pairwise
    /// distinct (contraction is by sign).
    pub fn classify(&self, alg: &Algebra) -> Result<MorphismClass, RelationError> {
        let alpha = MultiMorphism::similarity(&self.side_osets(true), alg);
        let beta = MultiMorphism::similarity(&self.side_osets(false), alg);
        let ft = self.transpose();

        let epi_lhs = Self::compose(&Self::compose(&ft, &alpha, alg)?, self, alg)?;
        let epi = epi_lhs.approx_eq(&beta, alg);

        let mono_rhs = Self::compose(&Self::compose(self, &beta, alg)?, &ft, alg)?;
        let mono = alpha.approx_eq(&mono_rhs, alg);

        let ff = Self::compose(self, &ft, alg)?;
        let tf = Self::compose(&ft, self, alg)?;
        let orthogonal = ff.approx_eq(&alpha, alg) && tf.approx_eq(&beta, alg);
        let adjoint = alpha.approx_le(&ff, alg) && tf.approx_le(&beta, alg);

        let t = self.totality(alg);
        let f = self.faithfulness(alg);

        Ok(MorphismClass {
            total: t.holds,
            faithful: f.holds,
            epi,
            mono,
            iso: epi && mono,
            orthogonal,
            adjoint,
        })
    }
}
