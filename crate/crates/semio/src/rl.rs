//! Text form of relevance-logic formulas. Atoms name pool diagrams;
//! connectives are `*` (tensor), `&`, `|`, `->` (right associative, lowest
//! precedence); `[I]` and `[C]` are the interior and closure operators and
//! bind tightest.

use semio_core::inference::RLFormula;

#[derive(Clone, Debug, PartialEq)]
enum RlTok {
    Name(String),
    Star,
    Amp,
    Bar,
    Arrow,
    Interior,
    Closure,
    LParen,
    RParen,
}

fn rl_tokens(text: &str) -> Result<Vec<RlTok>, String> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {}
            '*' => toks.push(RlTok::Star),
            '&' => toks.push(RlTok::Amp),
            '|' => toks.push(RlTok::Bar),
            '(' => toks.push(RlTok::LParen),
            ')' => toks.push(RlTok::RParen),
            '[' => {
                let op = chars.next();
                let close = chars.next();
                match (op, close) {
                    (Some('I'), Some(']')) => toks.push(RlTok::Interior),
                    (Some('C'), Some(']')) => toks.push(RlTok::Closure),
                    _ => return Err("expected '[I]' or '[C]'".to_string()),
                }
            }
            ']' => return Err("']' without a matching '['".to_string()),
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                toks.push(RlTok::Arrow);
            }
            _ => {
                let mut name = String::new();
                name.push(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || matches!(d, '*' | '&' | '|' | '(' | ')' | '[' | ']') {
                        break;
                    }
                    if d == '-' {
                        let mut ahead = chars.clone();
                        ahead.next();
                        if ahead.peek() == Some(&'>') {
                            break;
                        }
                    }
                    name.push(d);
                    chars.next();
                }
                toks.push(RlTok::Name(name));
            }
        }
    }
    Ok(toks)
}

struct RlCur {
    toks: Vec<RlTok>,
    i: usize,
}

impl RlCur {
    fn peek(&self) -> Option<&RlTok> {
        self.toks.get(self.i)
    }

    fn eat(&mut self, t: &RlTok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }
}

pub fn parse_formula(text: &str) -> Result<RLFormula, String> {
    let toks = rl_tokens(text)?;
    if toks.is_empty() {
        return Err("the formula is empty".to_string());
    }
    let mut cur = RlCur { toks, i: 0 };
    let f = implies(&mut cur)?;
    match cur.peek() {
        None => Ok(f),
        Some(t) => Err(format!("trailing {:?} after the formula", t)),
    }
}

fn implies(cur: &mut RlCur) -> Result<RLFormula, String> {
    let lhs = or(cur)?;
    if cur.eat(&RlTok::Arrow) {
        let rhs = implies(cur)?;
        Ok(RLFormula::Implies(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn or(cur: &mut RlCur) -> Result<RLFormula, String> {
    let mut f = and(cur)?;
    while cur.eat(&RlTok::Bar) {
        let rhs = and(cur)?;
        f = RLFormula::Or(Box::new(f), Box::new(rhs));
    }
    Ok(f)
}

fn and(cur: &mut RlCur) -> Result<RLFormula, String> {
    let mut f = tensor(cur)?;
    while cur.eat(&RlTok::Amp) {
        let rhs = tensor(cur)?;
        f = RLFormula::And(Box::new(f), Box::new(rhs));
    }
    Ok(f)
}

fn tensor(cur: &mut RlCur) -> Result<RLFormula, String> {
    let mut f = unary(cur)?;
    while cur.eat(&RlTok::Star) {
        let rhs = unary(cur)?;
        f = RLFormula::Tensor(Box::new(f), Box::new(rhs));
    }
    Ok(f)
}

fn unary(cur: &mut RlCur) -> Result<RLFormula, String> {
    if cur.eat(&RlTok::Interior) {
        return Ok(RLFormula::Interior(Box::new(unary(cur)?)));
    }
    if cur.eat(&RlTok::Closure) {
        return Ok(RLFormula::Closure(Box::new(unary(cur)?)));
    }
    if cur.eat(&RlTok::LParen) {
        let f = implies(cur)?;
        if !cur.eat(&RlTok::RParen) {
            return Err("missing ')'".to_string());
        }
        return Ok(f);
    }
    match cur.peek().cloned() {
        Some(RlTok::Name(n)) => {
            cur.i += 1;
            Ok(RLFormula::Atom(n))
        }
        Some(t) => Err(format!("expected a diagram name, found {:?}", t)),
        None => Err("the formula ends where a diagram name is expected".to_string()),
    }
}
