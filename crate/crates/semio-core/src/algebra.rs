//! Truth-value algebras: bounded commutative residuated lattices.
//!
//! A carrier of truth values with a commutative monoidal conjunction `⊗`
//! (unit = top), its right adjoint residuum `⇒` (x⊗y ≤ z iff x ≤ y⇒z),
//! and lattice join/meet. Built-ins: the two-point boolean algebra, finite
//! evenly spaced chains, the three classical [0,1] logics (min, Łukasiewicz,
//! product), finite chains with a custom conjunction table, and finite
//! products of algebras acting componentwise on tuple values.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub(crate) fn fabs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// A truth value: a scalar for plain algebras, a tuple for product algebras.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn num(&self) -> f64 {
        match self {
            Value::Num(x) => *x,
            Value::Tuple(_) => panic!("tuple value where a scalar was required"),
        }
    }

    pub fn tuple(&self) -> &[Value] {
        match self {
            Value::Tuple(xs) => xs,
            Value::Num(_) => panic!("scalar value where a tuple was required"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{}", x),
            Value::Tuple(xs) => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Finite chain with a user-supplied conjunction table.
///
/// `carrier` must be strictly increasing; its first element is bottom and
/// its last is top. `tensor` is row-major over carrier indices and must be
/// closed (every entry a valid index). The residuum is derived as
/// `x ⇒ y = max { z : x⊗z ≤ y }`, which exists because the carrier is a
/// chain. Law compliance is not forced at construction; run
/// [`Algebra::validate`] to obtain a report.
#[derive(Clone, Debug, PartialEq)]
pub struct TableAlgebra {
    pub carrier: Vec<f64>,
    pub tensor: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    Boolean,
    /// Evenly spaced chain {0, 1/(n-1), ..., 1} with min/residuum ops; n ≥ 2.
    Chain(usize),
    Godel,
    Lukasiewicz,
    Product,
    Table(TableAlgebra),
    ProductOf(Vec<Algebra>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraError {
    ChainTooShort(usize),
    EmptyProduct,
    BadTable(String),
    BadValue(String),
    NotDivisible(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::ChainTooShort(n) => {
                write!(f, "chain algebra needs at least 2 levels, got {}", n)
            }
            AlgebraError::EmptyProduct => write!(f, "product algebra needs at least one factor"),
            AlgebraError::BadTable(m) => write!(f, "bad table algebra: {}", m),
            AlgebraError::BadValue(m) => write!(f, "value outside the algebra carrier: {}", m),
            AlgebraError::NotDivisible(m) => write!(f, "operation needs a divisible algebra: {}", m),
        }
    }
}

/// Outcome of one law check over a sample of the carrier.
#[derive(Clone, Debug)]
pub struct LawReport {
    pub law: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    kind: Kind,
    eps: f64,
}

pub const DEFAULT_EPSILON: f64 = 1e-9;

impl Algebra {
    pub fn new(kind: Kind) -> Result<Algebra, AlgebraError> {
        match &kind {
            Kind::Chain(n) if *n < 2 => return Err(AlgebraError::ChainTooShort(*n)),
            Kind::ProductOf(fs) if fs.is_empty() => return Err(AlgebraError::EmptyProduct),
            Kind::Table(t) => {
                let n = t.carrier.len();
                if n < 2 {
                    return Err(AlgebraError::BadTable("carrier needs at least 2 values".into()));
                }
                if t.carrier.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(AlgebraError::BadTable(
                        "carrier must be strictly increasing".into(),
                    ));
                }
                if t.tensor.len() != n * n {
                    return Err(AlgebraError::BadTable(format!(
                        "tensor table must have {} entries, got {}",
                        n * n,
                        t.tensor.len()
                    )));
                }
                if t.tensor.iter().any(|&i| i >= n) {
                    return Err(AlgebraError::BadTable("tensor entry out of range".into()));
                }
            }
            _ => {}
        }
        Ok(Algebra { kind, eps: DEFAULT_EPSILON })
    }

    pub fn boolean() -> Algebra {
        Algebra::new(Kind::Boolean).unwrap()
    }

    pub fn godel() -> Algebra {
        Algebra::new(Kind::Godel).unwrap()
    }

    pub fn lukasiewicz() -> Algebra {
        Algebra::new(Kind::Lukasiewicz).unwrap()
    }

    pub fn product() -> Algebra {
        Algebra::new(Kind::Product).unwrap()
    }

    pub fn chain(n: usize) -> Result<Algebra, AlgebraError> {
        Algebra::new(Kind::Chain(n))
    }

    pub fn product_of(factors: Vec<Algebra>) -> Result<Algebra, AlgebraError> {
        Algebra::new(Kind::ProductOf(factors))
    }

    pub fn with_epsilon(mut self, eps: f64) -> Algebra {
        self.eps = eps;
        if let Kind::ProductOf(fs) = &mut self.kind {
            for a in fs {
                *a = a.clone().with_epsilon(eps);
            }
        }
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn factors(&self) -> Option<&[Algebra]> {
        match &self.kind {
            Kind::ProductOf(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn top(&self) -> Value {
        match &self.kind {
            Kind::ProductOf(fs) => Value::Tuple(fs.iter().map(|a| a.top()).collect()),
            Kind::Table(t) => Value::Num(*t.carrier.last().unwrap()),
            _ => Value::Num(1.0),
        }
    }

    pub fn bot(&self) -> Value {
        match &self.kind {
            Kind::ProductOf(fs) => Value::Tuple(fs.iter().map(|a| a.bot()).collect()),
            Kind::Table(t) => Value::Num(t.carrier[0]),
            _ => Value::Num(0.0),
        }
    }

    /// Checks that `v` lies in the carrier (grid membership for finite
    /// algebras, [0,1] for the continuous ones, componentwise for products).
    pub fn check_value(&self, v: &Value) -> Result<(), AlgebraError> {
        match (&self.kind, v) {
            (Kind::ProductOf(fs), Value::Tuple(xs)) => {
                if fs.len() != xs.len() {
                    return Err(AlgebraError::BadValue(format!(
                        "tuple arity {} does not match {} product factors",
                        xs.len(),
                        fs.len()
                    )));
                }
                for (a, x) in fs.iter().zip(xs) {
                    a.check_value(x)?;
                }
                Ok(())
            }
            (Kind::ProductOf(_), Value::Num(x)) => Err(AlgebraError::BadValue(format!(
                "product algebra needs a tuple value, got {}",
                x
            ))),
            (_, Value::Tuple(_)) => Err(AlgebraError::BadValue(
                "scalar algebra cannot hold a tuple value".to_string(),
            )),
            (Kind::Boolean, Value::Num(x)) => {
                if fabs(*x) <= self.eps || fabs(*x - 1.0) <= self.eps {
                    Ok(())
                } else {
                    Err(AlgebraError::BadValue(format!("{} is not boolean", x)))
                }
            }
            (Kind::Chain(n), Value::Num(x)) => {
                let step = 1.0 / (*n as f64 - 1.0);
                let k = (*x / step + 0.5) as i64;
                if k >= 0 && (k as usize) < *n && fabs(*x - k as f64 * step) <= self.eps {
                    Ok(())
                } else {
                    Err(AlgebraError::BadValue(format!("{} is not on the {}-chain", x, n)))
                }
            }
            (Kind::Table(t), Value::Num(x)) => {
                if t.carrier.iter().any(|c| fabs(c - x) <= self.eps) {
                    Ok(())
                } else {
                    Err(AlgebraError::BadValue(format!("{} is not in the table carrier", x)))
                }
            }
            (_, Value::Num(x)) => {
                if *x >= -self.eps && *x <= 1.0 + self.eps {
                    Ok(())
                } else {
                    Err(AlgebraError::BadValue(format!("{} is outside [0,1]", x)))
                }
            }
        }
    }

    fn table_index(t: &TableAlgebra, x: f64, eps: f64) -> usize {
        t.carrier
            .iter()
            .position(|c| fabs(c - x) <= eps)
            .expect("value outside the table carrier")
    }

    /// Monoidal conjunction.
    pub fn tensor(&self, a: &Value, b: &Value) -> Value {
        match &self.kind {
            Kind::Boolean | Kind::Chain(_) | Kind::Godel => {
                Value::Num(a.num().min(b.num()))
            }
            Kind::Lukasiewicz => Value::Num((a.num() + b.num() - 1.0).max(0.0)),
            Kind::Product => Value::Num(a.num() * b.num()),
            Kind::Table(t) => {
                let i = Self::table_index(t, a.num(), self.eps);
                let j = Self::table_index(t, b.num(), self.eps);
                Value::Num(t.carrier[t.tensor[i * t.carrier.len() + j]])
            }
            Kind::ProductOf(fs) => Value::Tuple(
                fs.iter()
                    .zip(a.tuple().iter().zip(b.tuple()))
                    .map(|(alg, (x, y))| alg.tensor(x, y))
                    .collect(),
            ),
        }
    }

    /// Residuum: the largest z with a⊗z ≤ b.
    pub fn implies(&self, a: &Value, b: &Value) -> Value {
        match &self.kind {
            Kind::Boolean | Kind::Chain(_) | Kind::Godel => {
                if a.num() <= b.num() {
                    Value::Num(1.0)
                } else {
                    Value::Num(b.num())
                }
            }
            Kind::Lukasiewicz => Value::Num((1.0 - a.num() + b.num()).min(1.0)),
            Kind::Product => {
                if a.num() <= b.num() {
                    Value::Num(1.0)
                } else {
                    Value::Num(b.num() / a.num())
                }
            }
            Kind::Table(t) => {
                let n = t.carrier.len();
                let i = Self::table_index(t, a.num(), self.eps);
                let j = Self::table_index(t, b.num(), self.eps);
                let z = (0..n).rev().find(|&z| t.tensor[i * n + z] <= j).unwrap_or(0);
                Value::Num(t.carrier[z])
            }
            Kind::ProductOf(fs) => Value::Tuple(
                fs.iter()
                    .zip(a.tuple().iter().zip(b.tuple()))
                    .map(|(alg, (x, y))| alg.implies(x, y))
                    .collect(),
            ),
        }
    }

    pub fn join(&self, a: &Value, b: &Value) -> Value {
        match &self.kind {
            Kind::ProductOf(fs) => Value::Tuple(
                fs.iter()
                    .zip(a.tuple().iter().zip(b.tuple()))
                    .map(|(alg, (x, y))| alg.join(x, y))
                    .collect(),
            ),
            _ => Value::Num(a.num().max(b.num())),
        }
    }

    pub fn meet(&self, a: &Value, b: &Value) -> Value {
        match &self.kind {
            Kind::ProductOf(fs) => Value::Tuple(
                fs.iter()
                    .zip(a.tuple().iter().zip(b.tuple()))
                    .map(|(alg, (x, y))| alg.meet(x, y))
                    .collect(),
            ),
            _ => Value::Num(a.num().min(b.num())),
        }
    }

    pub fn neg(&self, a: &Value) -> Value {
        self.implies(a, &self.bot())
    }

    /// Biimplication (a⇒b)⊗(b⇒a); the symmetric grade of equality.
    pub fn biimp(&self, a: &Value, b: &Value) -> Value {
        self.tensor(&self.implies(a, b), &self.implies(b, a))
    }

    /// Equality within the configured tolerance, componentwise on tuples.
    pub fn eq_val(&self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Num(x), Value::Num(y)) => fabs(x - y) <= self.eps,
            (Value::Tuple(xs), Value::Tuple(ys)) => {
                xs.len() == ys.len()
                    && match &self.kind {
                        Kind::ProductOf(fs) => fs
                            .iter()
                            .zip(xs.iter().zip(ys))
                            .all(|(alg, (x, y))| alg.eq_val(x, y)),
                        _ => false,
                    }
            }
            _ => false,
        }
    }

    /// Lattice order within tolerance, componentwise on tuples.
    pub fn le_val(&self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Num(x), Value::Num(y)) => *x <= *y + self.eps,
            (Value::Tuple(xs), Value::Tuple(ys)) => {
                xs.len() == ys.len()
                    && match &self.kind {
                        Kind::ProductOf(fs) => fs
                            .iter()
                            .zip(xs.iter().zip(ys))
                            .all(|(alg, (x, y))| alg.le_val(x, y)),
                        _ => false,
                    }
            }
            _ => false,
        }
    }

    pub fn is_top(&self, a: &Value) -> bool {
        self.eq_val(a, &self.top())
    }

    pub fn is_bot(&self, a: &Value) -> bool {
        self.eq_val(a, &self.bot())
    }

    /// Fold of `join` over an iterator; empty folds to bottom.
    pub fn sup<'a, I: IntoIterator<Item = &'a Value>>(&self, vs: I) -> Value {
        let mut acc = self.bot();
        for v in vs {
            acc = self.join(&acc, v);
        }
        acc
    }

    /// Fold of `meet` over an iterator; empty folds to top.
    pub fn inf<'a, I: IntoIterator<Item = &'a Value>>(&self, vs: I) -> Value {
        let mut acc = self.top();
        for v in vs {
            acc = self.meet(&acc, v);
        }
        acc
    }

    /// Whether x⊗(x⇒y) = x∧y is promised by construction (checked
    /// numerically for table algebras).
    pub fn is_divisible(&self) -> bool {
        match &self.kind {
            Kind::Boolean | Kind::Chain(_) | Kind::Godel | Kind::Lukasiewicz | Kind::Product => {
                true
            }
            Kind::ProductOf(fs) => fs.iter().all(|a| a.is_divisible()),
            Kind::Table(_) => {
                let sample = self.sample(0);
                sample.iter().all(|x| {
                    sample.iter().all(|y| {
                        let lhs = self.tensor(x, &self.implies(x, y));
                        self.eq_val(&lhs, &self.meet(x, y))
                    })
                })
            }
        }
    }

    /// Full carrier for finite algebras.
    pub fn carrier(&self) -> Option<Vec<Value>> {
        match &self.kind {
            Kind::Boolean => Some(vec![Value::Num(0.0), Value::Num(1.0)]),
            Kind::Chain(n) => {
                let step = 1.0 / (*n as f64 - 1.0);
                Some((0..*n).map(|k| Value::Num(k as f64 * step)).collect())
            }
            Kind::Table(t) => Some(t.carrier.iter().map(|&c| Value::Num(c)).collect()),
            Kind::ProductOf(fs) => {
                let parts: Option<Vec<Vec<Value>>> = fs.iter().map(|a| a.carrier()).collect();
                let parts = parts?;
                let mut out = vec![Vec::new()];
                for p in &parts {
                    let mut next = Vec::with_capacity(out.len() * p.len());
                    for pre in &out {
                        for v in p {
                            let mut t = pre.clone();
                            t.push(v.clone());
                            next.push(t);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(Value::Tuple).collect())
            }
            _ => None,
        }
    }

    /// Sample of the carrier for law checking: the whole carrier when
    /// finite, otherwise `n` evenly spaced values (n = 0 defaults to 21).
    pub fn sample(&self, n: usize) -> Vec<Value> {
        if let Some(c) = self.carrier() {
            return c;
        }
        match &self.kind {
            Kind::ProductOf(fs) => {
                let parts: Vec<Vec<Value>> = fs.iter().map(|a| a.sample(n)).collect();
                let mut out = vec![Vec::new()];
                for p in &parts {
                    let mut next = Vec::with_capacity(out.len() * p.len());
                    for pre in &out {
                        for v in p {
                            let mut t = pre.clone();
                            t.push(v.clone());
                            next.push(t);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Value::Tuple).collect()
            }
            _ => {
                let n = if n < 2 { 21 } else { n };
                (0..n)
                    .map(|k| Value::Num(k as f64 / (n as f64 - 1.0)))
                    .collect()
            }
        }
    }

    /// Checks the residuated-lattice laws over a carrier sample and reports
    /// one entry per law, with a witness for the first failure found.
    ///
    /// Pair and triple laws run over sample² and sample³; the congruence
    /// inequalities over sample⁴. Pass a small `sample_size` for continuous
    /// algebras if the default 21-point grid is too slow.
    pub fn validate(&self, sample_size: usize) -> Vec<LawReport> {
        let s = self.sample(sample_size);
        let mut out = Vec::new();

        let report = |law: &str, witness: Option<String>| LawReport {
            law: law.to_string(),
            passed: witness.is_none(),
            witness,
        };

        // bounds
        let mut w = None;
        for a in &s {
            if !(self.le_val(&self.bot(), a) && self.le_val(a, &self.top())) {
                w = Some(format!("a={}", a));
                break;
            }
        }
        out.push(report("bounds: bot <= a <= top", w));

        // tensor unit
        let mut w = None;
        for a in &s {
            if !self.eq_val(&self.tensor(a, &self.top()), a) {
                w = Some(format!("a={}", a));
                break;
            }
        }
        out.push(report("tensor unit: a (x) top = a", w));

        // tensor commutativity
        let mut w = None;
        'c: for a in &s {
            for b in &s {
                if !self.eq_val(&self.tensor(a, b), &self.tensor(b, a)) {
                    w = Some(format!("a={} b={}", a, b));
                    break 'c;
                }
            }
        }
        out.push(report("tensor commutative", w));

        // lattice laws on pairs
        let mut w = None;
        'l: for a in &s {
            for b in &s {
                let ok = self.eq_val(&self.join(a, b), &self.join(b, a))
                    && self.eq_val(&self.meet(a, b), &self.meet(b, a))
                    && self.eq_val(&self.join(a, &self.meet(a, b)), a)
                    && self.eq_val(&self.meet(a, &self.join(a, b)), a);
                if !ok {
                    w = Some(format!("a={} b={}", a, b));
                    break 'l;
                }
            }
        }
        out.push(report("lattice: commutativity and absorption", w));

        // order vs implication: a <= b iff a=>b = top
        let mut w = None;
        'o: for a in &s {
            for b in &s {
                let le = self.le_val(a, b);
                let imp_top = self.is_top(&self.implies(a, b));
                if le != imp_top {
                    w = Some(format!("a={} b={}", a, b));
                    break 'o;
                }
            }
        }
        out.push(report("order: a <= b iff (a => b) = top", w));

        // modus ponens inequality x(x=>y) <= x/\y
        let mut w = None;
        'm: for a in &s {
            for b in &s {
                let lhs = self.tensor(a, &self.implies(a, b));
                if !self.le_val(&lhs, &self.meet(a, b)) {
                    w = Some(format!("x={} y={}", a, b));
                    break 'm;
                }
            }
        }
        out.push(report("x (x) (x => y) <= x /\\ y", w));

        // tensor associativity
        let mut w = None;
        'a: for a in &s {
            for b in &s {
                for c in &s {
                    let l = self.tensor(&self.tensor(a, b), c);
                    let r = self.tensor(a, &self.tensor(b, c));
                    if !self.eq_val(&l, &r) {
                        w = Some(format!("a={} b={} c={}", a, b, c));
                        break 'a;
                    }
                }
            }
        }
        out.push(report("tensor associative", w));

        // tensor monotone
        let mut w = None;
        't: for a in &s {
            for b in &s {
                if !self.le_val(a, b) {
                    continue;
                }
                for c in &s {
                    if !self.le_val(&self.tensor(a, c), &self.tensor(b, c)) {
                        w = Some(format!("a={} b={} c={}", a, b, c));
                        break 't;
                    }
                }
            }
        }
        out.push(report("tensor monotone in each argument", w));

        // residuation adjunction
        let mut w = None;
        'r: for a in &s {
            for b in &s {
                for c in &s {
                    let l = self.le_val(&self.tensor(a, b), c);
                    let r = self.le_val(a, &self.implies(b, c));
                    if l != r {
                        w = Some(format!("a={} b={} c={}", a, b, c));
                        break 'r;
                    }
                }
            }
        }
        out.push(report("residuation: a(x)b <= c iff a <= b=>c", w));

        // implication transitivity inequality
        let mut w = None;
        'i: for a in &s {
            for b in &s {
                for c in &s {
                    let lhs = self.tensor(&self.implies(a, b), &self.implies(b, c));
                    if !self.le_val(&lhs, &self.implies(a, c)) {
                        w = Some(format!("x={} y={} z={}", a, b, c));
                        break 'i;
                    }
                }
            }
        }
        out.push(report("(x=>y)(x)(y=>z) <= x=>z", w));

        // congruence of connectives wrt biimplication (quadruples)
        let ops: [(&str, fn(&Algebra, &Value, &Value) -> Value); 4] = [
            ("tensor", Algebra::tensor),
            ("meet", Algebra::meet),
            ("join", Algebra::join),
            ("implies", Algebra::implies),
        ];
        for (name, op) in ops {
            let mut w = None;
            'q: for a in &s {
                for b in &s {
                    let ab = self.biimp(a, b);
                    for c in &s {
                        for d in &s {
                            let lhs = self.tensor(&ab, &self.biimp(c, d));
                            let rhs = self.biimp(&op(self, a, c), &op(self, b, d));
                            if !self.le_val(&lhs, &rhs) {
                                w = Some(format!("a={} b={} c={} d={}", a, b, c, d));
                                break 'q;
                            }
                        }
                    }
                }
            }
            out.push(report(
                &format!("(a<=>b)(x)(c<=>d) <= (a {o} c)<=>(b {o} d)", o = name),
                w,
            ));
        }

        // divisibility (informative when the algebra does not promise it)
        let mut w = None;
        'd: for a in &s {
            for b in &s {
                let lhs = self.tensor(a, &self.implies(a, b));
                if !self.eq_val(&lhs, &self.meet(a, b)) {
                    w = Some(format!("x={} y={}", a, b));
                    break 'd;
                }
            }
        }
        out.push(report("divisibility: x (x) (x=>y) = x /\\ y", w));

        out
    }

    /// Tuple with `v` at `slot` and top elsewhere: the unit-preserving
    /// embedding of one factor into the product algebra.
    pub fn embed_upper(&self, slot: usize, v: &Value) -> Value {
        match &self.kind {
            Kind::ProductOf(fs) => Value::Tuple(
                fs.iter()
                    .enumerate()
                    .map(|(i, a)| if i == slot { v.clone() } else { a.top() })
                    .collect(),
            ),
            _ => panic!("embed_upper needs a product algebra"),
        }
    }

    /// Tuple with `v` at `slot` and bottom elsewhere.
    pub fn embed_lower(&self, slot: usize, v: &Value) -> Value {
        match &self.kind {
            Kind::ProductOf(fs) => Value::Tuple(
                fs.iter()
                    .enumerate()
                    .map(|(i, a)| if i == slot { v.clone() } else { a.bot() })
                    .collect(),
            ),
            _ => panic!("embed_lower needs a product algebra"),
        }
    }

    /// Component of a tuple value.
    pub fn project(&self, slot: usize, v: &Value) -> Value {
        match &self.kind {
            Kind::ProductOf(_) => v.tuple()[slot].clone(),
            _ => panic!("project needs a product algebra"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: f64) -> Value {
        Value::Num(x)
    }

    #[test]
    fn lukasiewicz_frozen_values() {
        let a = Algebra::lukasiewicz();
        assert!(fabs(a.tensor(&n(0.7), &n(0.6)).num() - 0.3) < 1e-12);
        assert!(fabs(a.implies(&n(0.7), &n(0.6)).num() - 0.9) < 1e-12);
        assert!(fabs(a.biimp(&n(0.7), &n(0.4)).num() - 0.7) < 1e-12);
        // biimp in Lukasiewicz is 1 - |x - y|
        assert!(fabs(a.biimp(&n(0.2), &n(0.9)).num() - (1.0 - 0.7)) < 1e-12);
    }

    #[test]
    fn product_frozen_values() {
        let a = Algebra::product();
        assert!(fabs(a.implies(&n(0.5), &n(0.25)).num() - 0.5) < 1e-12);
        assert!(fabs(a.implies(&n(0.25), &n(0.5)).num() - 1.0) < 1e-12);
        assert!(fabs(a.biimp(&n(0.8), &n(0.4)).num() - 0.5) < 1e-12);
        // scaled-table biimp: (0.8v <=> v) = 0.8 for v > 0
        for v in [0.1, 0.5, 1.0] {
            assert!(fabs(a.biimp(&n(0.8 * v), &n(v)).num() - 0.8) < 1e-12);
        }
    }

    #[test]
    fn godel_frozen_values() {
        let a = Algebra::godel();
        assert!(fabs(a.implies(&n(0.8), &n(0.3)).num() - 0.3) < 1e-12);
        assert!(fabs(a.implies(&n(0.3), &n(0.8)).num() - 1.0) < 1e-12);
        assert!(fabs(a.tensor(&n(0.8), &n(0.3)).num() - 0.3) < 1e-12);
    }

    #[test]
    fn product_of_componentwise() {
        let a = Algebra::product_of(vec![Algebra::product(), Algebra::godel()]).unwrap();
        let x = Value::Tuple(vec![n(0.5), n(0.4)]);
        let y = Value::Tuple(vec![n(0.5), n(1.0)]);
        let t = a.tensor(&x, &y);
        assert!(a.eq_val(&t, &Value::Tuple(vec![n(0.25), n(0.4)])));
        assert!(a.eq_val(&a.embed_upper(0, &n(0.3)), &Value::Tuple(vec![n(0.3), n(1.0)])));
        assert!(a.eq_val(&a.embed_lower(1, &n(0.3)), &Value::Tuple(vec![n(0.0), n(0.3)])));
        assert!(a.eq_val(&a.project(0, &x), &n(0.5)));
    }

    #[test]
    fn chain_is_finite_godel() {
        let a = Algebra::chain(5).unwrap();
        let c = a.carrier().unwrap();
        assert_eq!(c.len(), 5);
        assert!(a.eq_val(&a.implies(&n(0.75), &n(0.25)), &n(0.25)));
        assert!(a.check_value(&n(0.5)).is_ok());
        assert!(a.check_value(&n(0.3)).is_err());
        assert!(Algebra::chain(1).is_err());
    }

    #[test]
    fn all_builtins_pass_laws() {
        let algs = [
            Algebra::boolean(),
            Algebra::chain(4).unwrap(),
            Algebra::godel(),
            Algebra::lukasiewicz(),
            Algebra::product(),
        ];
        for a in &algs {
            for r in a.validate(9) {
                assert!(r.passed, "law failed: {} at {:?} ({:?})", r.law, r.witness, a.kind());
            }
            assert!(a.is_divisible());
        }
    }

    #[test]
    fn table_algebra_residuum_is_max() {
        // 3-chain with Lukasiewicz-like collapse: 0.5 (x) 0.5 = 0
        let t = TableAlgebra {
            carrier: vec![0.0, 0.5, 1.0],
            tensor: vec![0, 0, 0, 0, 0, 1, 0, 1, 2],
        };
        let a = Algebra::new(Kind::Table(t)).unwrap();
        // 0.5 => 0 = max{z : 0.5(x)z <= 0} = 0.5
        assert!(a.eq_val(&a.implies(&n(0.5), &n(0.0)), &n(0.5)));
        for r in a.validate(0) {
            assert!(r.passed, "law failed: {} at {:?}", r.law, r.witness);
        }
    }

    #[test]
    fn sup_inf_folds() {
        let a = Algebra::godel();
        let vs = [n(0.2), n(0.7), n(0.4)];
        assert!(a.eq_val(&a.sup(vs.iter()), &n(0.7)));
        assert!(a.eq_val(&a.inf(vs.iter()), &n(0.2)));
        assert!(a.is_bot(&a.sup([].iter())));
        assert!(a.is_top(&a.inf([].iter())));
    }
}
