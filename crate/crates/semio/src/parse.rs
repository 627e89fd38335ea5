//! The .sem reader: a line-oriented tokenizer, statement grouping, and
//! resolution into a Workspace. Parsing is total; problems come back as a
//! list of diagnostics with source positions and the rest of the file is
//! still examined.

use std::rc::Rc;

use semio_core::algebra::{Algebra, Value};
use semio_core::diagram::MultiDiagram;
use semio_core::grammar::Ontology;
use semio_core::relation::{MultiMorphism, OmegaSet, Port};

use crate::span::{Diagnostic, SourceSpan};
use crate::workspace::{
    port_names, CompDecl, DiagramDecl, EdgeDecl, OsetDecl, PoolDecl, Workspace,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokKind {
    Word,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Eq,
    Comma,
    Arrow,
    LArrow,
    Le,
}

#[derive(Clone, Debug)]
pub struct Tok {
    pub kind: TokKind,
    pub text: String,
    pub line: usize,
    pub col: usize,
}

impl Tok {
    fn span(&self, file: &str) -> SourceSpan {
        SourceSpan::new(file, self.line, self.col, self.col + self.text.chars().count())
    }
}

fn is_special(c: char) -> bool {
    matches!(c, '{' | '}' | '(' | ')' | ':' | ';' | '=' | ',' | '#' | '<')
}

pub fn tokenize(text: &str) -> Vec<Tok> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let start_col = col;
        match c {
            '\n' => {
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => col += 1,
            '#' => {
                for d in chars.by_ref() {
                    if d == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
            }
            '{' | '}' | '(' | ')' | ':' | ';' | '=' | ',' => {
                let kind = match c {
                    '{' => TokKind::LBrace,
                    '}' => TokKind::RBrace,
                    '(' => TokKind::LParen,
                    ')' => TokKind::RParen,
                    ':' => TokKind::Colon,
                    ';' => TokKind::Semi,
                    '=' => TokKind::Eq,
                    _ => TokKind::Comma,
                };
                toks.push(Tok { kind, text: c.to_string(), line, col: start_col });
                col += 1;
            }
            '<' => {
                let (kind, text, width) = match chars.peek() {
                    Some('-') => {
                        chars.next();
                        (TokKind::LArrow, "<-", 2)
                    }
                    Some('=') => {
                        chars.next();
                        (TokKind::Le, "<=", 2)
                    }
                    _ => (TokKind::Word, "<", 1),
                };
                toks.push(Tok { kind, text: text.to_string(), line, col: start_col });
                col += width;
            }
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                toks.push(Tok {
                    kind: TokKind::Arrow,
                    text: "->".to_string(),
                    line,
                    col: start_col,
                });
                col += 2;
            }
            _ => {
                let mut word = String::new();
                word.push(c);
                col += 1;
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || is_special(d) {
                        break;
                    }
                    if d == '-' {
                        // a word never swallows the arrow token
                        let mut ahead = chars.clone();
                        ahead.next();
                        if ahead.peek() == Some(&'>') {
                            break;
                        }
                    }
                    word.push(d);
                    chars.next();
                    col += 1;
                }
                toks.push(Tok { kind: TokKind::Word, text: word, line, col: start_col });
            }
        }
    }
    toks
}

/// Statements: one per line, except that an open `{` extends the statement
/// to its matching `}`.
pub fn group_statements(toks: Vec<Tok>) -> Vec<Vec<Tok>> {
    let mut out: Vec<Vec<Tok>> = Vec::new();
    let mut cur: Vec<Tok> = Vec::new();
    let mut depth = 0usize;
    for t in toks {
        if let Some(last) = cur.last() {
            if depth == 0 && t.line > last.line {
                out.push(std::mem::take(&mut cur));
            }
        }
        match t.kind {
            TokKind::LBrace => depth += 1,
            TokKind::RBrace => depth = depth.saturating_sub(1),
            _ => {}
        }
        let closes = t.kind == TokKind::RBrace && depth == 0;
        cur.push(t);
        if closes {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Cur<'a> {
    toks: &'a [Tok],
    i: usize,
    file: &'a str,
}

impl<'a> Cur<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.i)
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.i);
        self.i += 1;
        t
    }

    fn end_span(&self) -> SourceSpan {
        match self.toks.last() {
            Some(t) => t.span(self.file),
            None => SourceSpan::new(self.file, 1, 1, 1),
        }
    }

    fn err_here(&self, msg: String) -> Diagnostic {
        match self.peek() {
            Some(t) => Diagnostic::new(t.span(self.file), msg),
            None => Diagnostic::new(self.end_span(), format!("{} (statement ended)", msg)),
        }
    }

    fn expect_word(&mut self, what: &str) -> Result<&'a Tok, Diagnostic> {
        match self.peek() {
            Some(t) if t.kind == TokKind::Word => {
                self.i += 1;
                Ok(t)
            }
            Some(t) => Err(Diagnostic::new(
                t.span(self.file),
                format!("expected {}, found '{}'", what, t.text),
            )),
            None => Err(self.err_here(format!("expected {}", what))),
        }
    }

    fn expect_kind(&mut self, kind: TokKind, what: &str) -> Result<&'a Tok, Diagnostic> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.i += 1;
                Ok(t)
            }
            Some(t) => Err(Diagnostic::new(
                t.span(self.file),
                format!("expected {}, found '{}'", what, t.text),
            )),
            None => Err(self.err_here(format!("expected {}", what))),
        }
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), Diagnostic> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Diagnostic::new(
                t.span(self.file),
                format!("unexpected '{}' after a complete statement", t.text),
            )),
        }
    }

    /// Words until the end of the slice, commas skipped.
    fn name_list(&mut self) -> Result<Vec<&'a Tok>, Diagnostic> {
        let mut names = Vec::new();
        while let Some(t) = self.peek() {
            match t.kind {
                TokKind::Word => {
                    names.push(t);
                    self.i += 1;
                }
                TokKind::Comma => {
                    self.i += 1;
                }
                _ => {
                    return Err(Diagnostic::new(
                        t.span(self.file),
                        format!("expected a name, found '{}'", t.text),
                    ))
                }
            }
        }
        Ok(names)
    }
}

fn parse_value(cur: &mut Cur) -> Result<Value, Diagnostic> {
    match cur.peek() {
        Some(t) if t.kind == TokKind::LParen => {
            cur.bump();
            let mut parts = vec![parse_value(cur)?];
            while cur.peek().map(|t| t.kind) == Some(TokKind::Semi) {
                cur.bump();
                parts.push(parse_value(cur)?);
            }
            cur.expect_kind(TokKind::RParen, "')' closing a tuple value")?;
            Ok(Value::Tuple(parts))
        }
        _ => {
            let t = cur.expect_word("a value")?;
            t.text.parse::<f64>().map(Value::Num).map_err(|_| {
                Diagnostic::new(t.span(cur.file), format!("'{}' is not a number", t.text))
            })
        }
    }
}

fn parse_algebra_kind(cur: &mut Cur) -> Result<Algebra, Diagnostic> {
    if cur.peek().map(|t| t.kind) == Some(TokKind::LParen) {
        cur.bump();
        let a = parse_algebra_kind(cur)?;
        cur.expect_kind(TokKind::RParen, "')' closing an algebra kind")?;
        return Ok(a);
    }
    let t = cur.expect_word("an algebra kind")?;
    match t.text.as_str() {
        "boolean" => Ok(Algebra::boolean()),
        "godel" => Ok(Algebra::godel()),
        "lukasiewicz" => Ok(Algebra::lukasiewicz()),
        "product" => Ok(Algebra::product()),
        "chain" => {
            let n = cur.expect_word("the chain length")?;
            let len: usize = n.text.parse().map_err(|_| {
                Diagnostic::new(n.span(cur.file), format!("'{}' is not a length", n.text))
            })?;
            Algebra::chain(len)
                .map_err(|e| Diagnostic::new(n.span(cur.file), format!("{}", e)))
        }
        "product_of" => {
            let mut factors = Vec::new();
            while matches!(
                cur.peek().map(|t| t.kind),
                Some(TokKind::Word) | Some(TokKind::LParen)
            ) {
                factors.push(parse_algebra_kind(cur)?);
            }
            Algebra::product_of(factors)
                .map_err(|e| Diagnostic::new(t.span(cur.file), format!("{}", e)))
        }
        other => Err(Diagnostic::new(
            t.span(cur.file),
            format!(
                "unknown algebra kind '{}' (boolean, godel, lukasiewicz, product, chain, product_of)",
                other
            ),
        )),
    }
}

/// Splits a block body into clauses at semicolons and line breaks, both
/// only outside parentheses.
fn clauses<'a>(body: &'a [Tok]) -> Vec<&'a [Tok]> {
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut depth = 0usize;
    for (i, t) in body.iter().enumerate() {
        match t.kind {
            TokKind::LParen => depth += 1,
            TokKind::RParen => depth = depth.saturating_sub(1),
            _ => {}
        }
        if depth == 0 && t.kind == TokKind::Semi {
            if i > start {
                out.push(&body[start..i]);
            }
            start = i + 1;
            continue;
        }
        if depth == 0 && i > start && t.line > body[i - 1].line {
            out.push(&body[start..i]);
            start = i;
        }
    }
    if start < body.len() {
        out.push(&body[start..]);
    }
    out
}

/// Reads `{ ... }` off the cursor and returns the body slice.
fn block_body<'a>(cur: &mut Cur<'a>) -> Result<&'a [Tok], Diagnostic> {
    cur.expect_kind(TokKind::LBrace, "'{'")?;
    let start = cur.i;
    let mut depth = 1usize;
    while let Some(t) = cur.bump() {
        match t.kind {
            TokKind::LBrace => depth += 1,
            TokKind::RBrace => {
                depth -= 1;
                if depth == 0 {
                    return Ok(&cur.toks[start..cur.i - 1]);
                }
            }
            _ => {}
        }
    }
    Err(cur.err_here("unclosed '{' block".to_string()))
}

// raw statements before cross-reference resolution

struct RawOset<'a> {
    name: &'a Tok,
    sign: &'a Tok,
    support: Vec<&'a Tok>,
    sims: Vec<(&'a Tok, &'a Tok, Value)>,
}

struct RawComp<'a> {
    name: &'a Tok,
    src: Vec<&'a Tok>,
    tgt: Vec<&'a Tok>,
    entries: Vec<(Vec<&'a Tok>, Value)>,
}

struct RawDiagram<'a> {
    name: &'a Tok,
    nodes: Vec<(&'a Tok, &'a Tok)>,
    edges: Vec<RawEdge<'a>>,
    sources: Vec<&'a Tok>,
}

struct RawEdge<'a> {
    id: &'a Tok,
    comp: &'a Tok,
    src: Vec<&'a Tok>,
    tgt: Vec<&'a Tok>,
}

struct RawPool<'a> {
    name: &'a Tok,
    diagrams: Vec<&'a Tok>,
    concepts: Vec<&'a Tok>,
    domains: Vec<&'a Tok>,
}

enum Raw<'a> {
    Algebra(&'a Tok, Algebra),
    Sign(&'a Tok, Option<&'a Tok>),
    Oset(RawOset<'a>),
    Comp(RawComp<'a>),
    Diagram(RawDiagram<'a>),
    Total(&'a Tok),
    LimitDef(&'a Tok, &'a Tok),
    ColimitDef(&'a Tok, &'a Tok),
    Pool(RawPool<'a>),
}

fn parse_statement<'a>(stmt: &'a [Tok], file: &'a str) -> Result<Raw<'a>, Diagnostic> {
    let mut cur = Cur { toks: stmt, i: 0, file };
    let head = cur.expect_word("a statement keyword")?;
    match head.text.as_str() {
        "algebra" => {
            let name = cur.expect_word("the algebra name")?;
            let alg = parse_algebra_kind(&mut cur)?;
            cur.expect_end()?;
            Ok(Raw::Algebra(name, alg))
        }
        "sign" => {
            let name = cur.expect_word("the sign name")?;
            let parent = if cur.at_end() {
                None
            } else {
                cur.expect_kind(TokKind::Le, "'<=' before the parent sign")?;
                Some(cur.expect_word("the parent sign")?)
            };
            cur.expect_end()?;
            Ok(Raw::Sign(name, parent))
        }
        "oset" => {
            let name = cur.expect_word("the omega-set name")?;
            cur.expect_kind(TokKind::Colon, "':' before the sign")?;
            let sign = cur.expect_word("the sign")?;
            let body = block_body(&mut cur)?;
            cur.expect_end()?;
            let mut support = Vec::new();
            let mut sims = Vec::new();
            for clause in clauses(body) {
                let mut c = Cur { toks: clause, i: 0, file };
                let kw = c.expect_word("'support' or 'sim'")?;
                match kw.text.as_str() {
                    "support" => {
                        support = c.name_list()?;
                    }
                    "sim" => {
                        let a = c.expect_word("an element")?;
                        let b = c.expect_word("an element")?;
                        let v = parse_value(&mut c)?;
                        c.expect_end()?;
                        sims.push((a, b, v));
                    }
                    other => {
                        return Err(Diagnostic::new(
                            kw.span(file),
                            format!("expected 'support' or 'sim', found '{}'", other),
                        ))
                    }
                }
            }
            Ok(Raw::Oset(RawOset { name, sign, support, sims }))
        }
        "comp" => {
            let name = cur.expect_word("the comp name")?;
            cur.expect_kind(TokKind::Colon, "':' before the signature")?;
            let mut src = Vec::new();
            while cur.peek().map(|t| t.kind) == Some(TokKind::Word) {
                src.push(cur.bump().unwrap());
            }
            cur.expect_kind(TokKind::Arrow, "'->' in the signature")?;
            let mut tgt = Vec::new();
            while cur.peek().map(|t| t.kind) == Some(TokKind::Word) {
                tgt.push(cur.bump().unwrap());
            }
            let body = block_body(&mut cur)?;
            cur.expect_end()?;
            let mut entries = Vec::new();
            for clause in clauses(body) {
                let mut c = Cur { toks: clause, i: 0, file };
                let kw = c.expect_word("'entry'")?;
                if kw.text != "entry" {
                    return Err(Diagnostic::new(
                        kw.span(file),
                        format!("expected 'entry', found '{}'", kw.text),
                    ));
                }
                let mut elems = Vec::new();
                while c.peek().map(|t| t.kind) == Some(TokKind::Word) {
                    elems.push(c.bump().unwrap());
                }
                c.expect_kind(TokKind::Eq, "'=' before the value")?;
                let v = parse_value(&mut c)?;
                c.expect_end()?;
                entries.push((elems, v));
            }
            Ok(Raw::Comp(RawComp { name, src, tgt, entries }))
        }
        "diagram" => {
            let name = cur.expect_word("the diagram name")?;
            let body = block_body(&mut cur)?;
            cur.expect_end()?;
            let mut nodes = Vec::new();
            let mut edges = Vec::new();
            let mut sources = Vec::new();
            for clause in clauses(body) {
                let mut c = Cur { toks: clause, i: 0, file };
                let kw = c.expect_word("'node', 'edge' or 'sources'")?;
                match kw.text.as_str() {
                    "node" => {
                        let id = c.expect_word("the vertex id")?;
                        c.expect_kind(TokKind::Colon, "':' before the omega-set")?;
                        let oset = c.expect_word("the omega-set name")?;
                        c.expect_end()?;
                        nodes.push((id, oset));
                    }
                    "edge" => {
                        let id = c.expect_word("the arrow id")?;
                        c.expect_kind(TokKind::Colon, "':' before the comp name")?;
                        let comp = c.expect_word("the comp name")?;
                        c.expect_kind(TokKind::LParen, "'(' before the vertex bindings")?;
                        let mut src = Vec::new();
                        while matches!(
                            c.peek().map(|t| t.kind),
                            Some(TokKind::Word) | Some(TokKind::Comma)
                        ) {
                            let t = c.bump().unwrap();
                            if t.kind == TokKind::Word {
                                src.push(t);
                            }
                        }
                        c.expect_kind(TokKind::Arrow, "'->' between sources and targets")?;
                        let mut tgt = Vec::new();
                        while matches!(
                            c.peek().map(|t| t.kind),
                            Some(TokKind::Word) | Some(TokKind::Comma)
                        ) {
                            let t = c.bump().unwrap();
                            if t.kind == TokKind::Word {
                                tgt.push(t);
                            }
                        }
                        c.expect_kind(TokKind::RParen, "')' closing the vertex bindings")?;
                        c.expect_end()?;
                        edges.push(RawEdge { id, comp, src, tgt });
                    }
                    "sources" => {
                        sources = c.name_list()?;
                    }
                    other => {
                        return Err(Diagnostic::new(
                            kw.span(file),
                            format!("expected 'node', 'edge' or 'sources', found '{}'", other),
                        ))
                    }
                }
            }
            Ok(Raw::Diagram(RawDiagram { name, nodes, edges, sources }))
        }
        "total" => {
            let d = cur.expect_word("the diagram name")?;
            cur.expect_end()?;
            Ok(Raw::Total(d))
        }
        "limitdef" | "colimitdef" => {
            let comp = cur.expect_word("the comp name")?;
            cur.expect_kind(TokKind::LArrow, "'<-' before the diagram")?;
            let d = cur.expect_word("the diagram name")?;
            cur.expect_end()?;
            if head.text == "limitdef" {
                Ok(Raw::LimitDef(comp, d))
            } else {
                Ok(Raw::ColimitDef(comp, d))
            }
        }
        "pool" => {
            let name = cur.expect_word("the pool name")?;
            let body = block_body(&mut cur)?;
            cur.expect_end()?;
            let mut diagrams = Vec::new();
            let mut concepts = Vec::new();
            let mut domains = Vec::new();
            for clause in clauses(body) {
                let mut c = Cur { toks: clause, i: 0, file };
                let kw = c.expect_word("'diagrams', 'concepts' or 'domains'")?;
                let list = c.name_list()?;
                match kw.text.as_str() {
                    "diagrams" => diagrams = list,
                    "concepts" => concepts = list,
                    "domains" => domains = list,
                    other => {
                        return Err(Diagnostic::new(
                            kw.span(file),
                            format!(
                                "expected 'diagrams', 'concepts' or 'domains', found '{}'",
                                other
                            ),
                        ))
                    }
                }
            }
            Ok(Raw::Pool(RawPool { name, diagrams, concepts, domains }))
        }
        other => Err(Diagnostic::new(
            head.span(file),
            format!("unknown statement '{}'", other),
        )),
    }
}

pub fn parse_spec(file: &str, text: &str) -> Result<Workspace, Vec<Diagnostic>> {
    let toks = tokenize(text);
    let stmts = group_statements(toks);
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut raws: Vec<Raw> = Vec::new();
    for stmt in &stmts {
        match parse_statement(stmt, file) {
            Ok(r) => raws.push(r),
            Err(d) => diags.push(d),
        }
    }

    let mut ws = Workspace::new();

    for r in &raws {
        if let Raw::Algebra(name, alg) = r {
            if ws.algebras.iter().any(|(n, _)| n == &name.text) {
                diags.push(Diagnostic::new(
                    name.span(file),
                    format!("algebra '{}' is declared twice", name.text),
                ));
            } else {
                ws.algebras.push((name.text.clone(), alg.clone()));
            }
        }
    }

    // signs first, so every later statement may reference them
    let mut sign_names: Vec<String> = Vec::new();
    let mut sign_edges: Vec<(String, String)> = Vec::new();
    let mut first_sign_span: Option<SourceSpan> = None;
    for r in &raws {
        if let Raw::Sign(name, parent) = r {
            if first_sign_span.is_none() {
                first_sign_span = Some(name.span(file));
            }
            if !sign_names.contains(&name.text) {
                sign_names.push(name.text.clone());
            }
            if let Some(p) = parent {
                sign_edges.push((name.text.clone(), p.text.clone()));
            }
            ws.signs.push((name.text.clone(), parent.map(|p| p.text.clone())));
        }
    }
    for r in &raws {
        if let Raw::Sign(_, Some(p)) = r {
            if !sign_names.contains(&p.text) {
                diags.push(Diagnostic::new(
                    p.span(file),
                    format!("parent sign '{}' is never declared", p.text),
                ));
            }
        }
    }
    {
        let names: Vec<&str> = sign_names.iter().map(|s| s.as_str()).collect();
        // dangling parents already carry their own diagnostic
        let edges: Vec<(&str, &str)> = sign_edges
            .iter()
            .filter(|(_, p)| sign_names.contains(p))
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        match Ontology::new(&names, &edges) {
            Ok(o) => ws.ontology = o,
            Err(e) => {
                let span = first_sign_span
                    .unwrap_or_else(|| SourceSpan::new(file, 1, 1, 1));
                diags.push(Diagnostic::new(span, format!("{}", e)));
            }
        }
    }

    let alg = ws.algebras.first().map(|(_, a)| a.clone());
    let need_algebra = |diags: &mut Vec<Diagnostic>, span: SourceSpan| {
        diags.push(Diagnostic::new(
            span,
            "this needs an algebra, but the file declares none".to_string(),
        ));
    };

    for r in &raws {
        if let Raw::Oset(o) = r {
            let alg = match &alg {
                Some(a) => a,
                None => {
                    need_algebra(&mut diags, o.name.span(file));
                    continue;
                }
            };
            if ws.oset(&o.name.text).is_some() {
                diags.push(Diagnostic::new(
                    o.name.span(file),
                    format!("omega-set '{}' is declared twice", o.name.text),
                ));
                continue;
            }
            if !ws.ontology.contains(&o.sign.text) {
                diags.push(Diagnostic::new(
                    o.sign.span(file),
                    format!("sign '{}' is never declared", o.sign.text),
                ));
                continue;
            }
            if let Some(prev) = ws.oset_for_sign(&o.sign.text) {
                diags.push(Diagnostic::new(
                    o.name.span(file),
                    format!(
                        "sign '{}' is already interpreted by omega-set '{}'",
                        o.sign.text, prev.name
                    ),
                ));
                continue;
            }
            let mut elems: Vec<&str> = Vec::new();
            let mut dup = false;
            for e in &o.support {
                if elems.contains(&e.text.as_str()) {
                    diags.push(Diagnostic::new(
                        e.span(file),
                        format!("element '{}' appears twice in the support", e.text),
                    ));
                    dup = true;
                } else {
                    elems.push(&e.text);
                }
            }
            if dup {
                continue;
            }
            let mut set = OmegaSet::crisp(&o.sign.text, &elems, alg);
            let mut ok = true;
            for (a, b, v) in &o.sims {
                let ia = match set.index_of(&a.text) {
                    Some(i) => i,
                    None => {
                        diags.push(Diagnostic::new(
                            a.span(file),
                            format!("element '{}' is not in the support", a.text),
                        ));
                        ok = false;
                        continue;
                    }
                };
                let ib = match set.index_of(&b.text) {
                    Some(i) => i,
                    None => {
                        diags.push(Diagnostic::new(
                            b.span(file),
                            format!("element '{}' is not in the support", b.text),
                        ));
                        ok = false;
                        continue;
                    }
                };
                if let Err(e) = alg.check_value(v) {
                    diags.push(Diagnostic::new(a.span(file), format!("{}", e)));
                    ok = false;
                    continue;
                }
                set.set_sim(ia, ib, v.clone());
            }
            if ok {
                ws.osets.push(OsetDecl {
                    name: o.name.text.clone(),
                    sign: o.sign.text.clone(),
                    set: Rc::new(set),
                });
            }
        }
    }

    for r in &raws {
        if let Raw::Comp(c) = r {
            let alg = match &alg {
                Some(a) => a,
                None => {
                    need_algebra(&mut diags, c.name.span(file));
                    continue;
                }
            };
            if ws.comp(&c.name.text).is_some() {
                diags.push(Diagnostic::new(
                    c.name.span(file),
                    format!("comp '{}' is declared twice", c.name.text),
                ));
                continue;
            }
            let mut ports: Vec<Port> = Vec::new();
            let mut sig: Vec<String> = Vec::new();
            let mut ok = true;
            for (tok, is_source) in c
                .src
                .iter()
                .map(|t| (*t, true))
                .chain(c.tgt.iter().map(|t| (*t, false)))
            {
                match ws.oset_for_sign(&tok.text) {
                    Some(o) => {
                        sig.push(tok.text.clone());
                        // placeholder name, renamed below once all are known
                        let p = if is_source {
                            Port::source(&format!("p{}", ports.len()), &o.set)
                        } else {
                            Port::target(&format!("p{}", ports.len()), &o.set)
                        };
                        ports.push(p);
                    }
                    None => {
                        diags.push(Diagnostic::new(
                            tok.span(file),
                            format!("sign '{}' has no omega-set", tok.text),
                        ));
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            let names = port_names(&sig);
            for (p, n) in ports.iter_mut().zip(&names) {
                p.name = n.clone();
            }
            let mut table = match MultiMorphism::new(ports, alg) {
                Ok(t) => t,
                Err(e) => {
                    diags.push(Diagnostic::new(c.name.span(file), format!("{}", e)));
                    continue;
                }
            };
            let mut ok = true;
            for (elems, v) in &c.entries {
                if elems.len() != table.ports().len() {
                    let span = elems
                        .first()
                        .map(|t| t.span(file))
                        .unwrap_or_else(|| c.name.span(file));
                    diags.push(Diagnostic::new(
                        span,
                        format!(
                            "entry names {} elements, the signature has {}",
                            elems.len(),
                            table.ports().len()
                        ),
                    ));
                    ok = false;
                    continue;
                }
                let mut idx = Vec::with_capacity(elems.len());
                let mut good = true;
                for (tok, port) in elems.iter().zip(table.ports()) {
                    match port.oset.index_of(&tok.text) {
                        Some(i) => idx.push(i),
                        None => {
                            diags.push(Diagnostic::new(
                                tok.span(file),
                                format!(
                                    "element '{}' is not in the support of sign '{}'",
                                    tok.text,
                                    port.sign()
                                ),
                            ));
                            good = false;
                            break;
                        }
                    }
                }
                if !good {
                    ok = false;
                    continue;
                }
                if let Err(e) = alg.check_value(v) {
                    diags.push(Diagnostic::new(
                        elems.first().map(|t| t.span(file)).unwrap_or_else(|| c.name.span(file)),
                        format!("{}", e),
                    ));
                    ok = false;
                    continue;
                }
                table.set_entry(&idx, v.clone());
            }
            if ok {
                ws.comps.push(CompDecl {
                    name: c.name.text.clone(),
                    src_signs: c.src.iter().map(|t| t.text.clone()).collect(),
                    tgt_signs: c.tgt.iter().map(|t| t.text.clone()).collect(),
                    table,
                });
            }
        }
    }

    for r in &raws {
        if let Raw::Diagram(d) = r {
            if ws.diagram(&d.name.text).is_some() {
                diags.push(Diagnostic::new(
                    d.name.span(file),
                    format!("diagram '{}' is declared twice", d.name.text),
                ));
                continue;
            }
            let decl = DiagramDecl {
                name: d.name.text.clone(),
                nodes: d
                    .nodes
                    .iter()
                    .map(|(id, o)| (id.text.clone(), o.text.clone()))
                    .collect(),
                edges: d
                    .edges
                    .iter()
                    .map(|e| EdgeDecl {
                        id: e.id.text.clone(),
                        comp: e.comp.text.clone(),
                        src: e.src.iter().map(|t| t.text.clone()).collect(),
                        tgt: e.tgt.iter().map(|t| t.text.clone()).collect(),
                    })
                    .collect(),
                sources: d.sources.iter().map(|t| t.text.clone()).collect(),
            };
            // dry-build now so arity and reference problems carry a span
            ws.diagrams.push(decl);
            let check = build_check(&ws, &d.name.text);
            if let Err(msg) = check {
                ws.diagrams.pop();
                diags.push(Diagnostic::new(d.name.span(file), msg));
            }
        }
    }

    for r in &raws {
        match r {
            Raw::Total(d) => {
                if ws.diagram(&d.text).is_none() {
                    diags.push(Diagnostic::new(
                        d.span(file),
                        format!("no diagram named '{}'", d.text),
                    ));
                } else {
                    ws.totals.push(d.text.clone());
                }
            }
            Raw::LimitDef(c, d) | Raw::ColimitDef(c, d) => {
                let mut ok = true;
                if ws.comp(&c.text).is_none() {
                    diags.push(Diagnostic::new(
                        c.span(file),
                        format!("no comp named '{}'", c.text),
                    ));
                    ok = false;
                }
                if ws.diagram(&d.text).is_none() {
                    diags.push(Diagnostic::new(
                        d.span(file),
                        format!("no diagram named '{}'", d.text),
                    ));
                    ok = false;
                }
                if ok {
                    if matches!(r, Raw::LimitDef(..)) {
                        ws.limitdefs.push((c.text.clone(), d.text.clone()));
                    } else {
                        ws.colimitdefs.push((c.text.clone(), d.text.clone()));
                    }
                }
            }
            Raw::Pool(p) => {
                if ws.pool_decl(&p.name.text).is_some() {
                    diags.push(Diagnostic::new(
                        p.name.span(file),
                        format!("pool '{}' is declared twice", p.name.text),
                    ));
                    continue;
                }
                let mut ok = true;
                for t in p.diagrams.iter().chain(&p.concepts).chain(&p.domains) {
                    if ws.comp(&t.text).is_none() && ws.diagram(&t.text).is_none() {
                        diags.push(Diagnostic::new(
                            t.span(file),
                            format!("no comp or diagram named '{}'", t.text),
                        ));
                        ok = false;
                    }
                }
                if ok {
                    ws.pools.push(PoolDecl {
                        name: p.name.text.clone(),
                        diagrams: p.diagrams.iter().map(|t| t.text.clone()).collect(),
                        concepts: p.concepts.iter().map(|t| t.text.clone()).collect(),
                        domains: p.domains.iter().map(|t| t.text.clone()).collect(),
                    });
                }
            }
            _ => {}
        }
    }

    if diags.is_empty() {
        Ok(ws)
    } else {
        Err(diags)
    }
}

/// Structural rebuild of a just-declared diagram, used to surface binding
/// errors at parse time. Returns the error text only.
fn build_check(ws: &Workspace, name: &str) -> Result<MultiDiagram, String> {
    ws.build_diagram(name).map_err(|e| format!("{}", e))
}
