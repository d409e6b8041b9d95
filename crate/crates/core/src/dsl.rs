//! Text format for ultragraph presentations, points, and bitstreams.
//!
//! ```text
//! # comment
//! vertexfamily u
//! vertexfamily w domain n = 0
//! edgefamily e(k) {
//!   domain k >= 0;
//!   source u[k];
//!   range k = 0 => { u[2*j] : j >= 1 };
//!   range k >= 1 => u[k+1];
//! }
//! grading u = 1*n + 0
//! ```
//!
//! Index sets are unions (`|`) of `k = 3`, `k in {1, 4}`, `k in 2..5`,
//! `k >= 2`, `k >= 2 step 3`, `k >= 2 mod 4 in {1, 3}`, `all`, `none`; the
//! leading variable is optional.
//!
//! Points: `ep:PREFIX|CYCLE`, `tail:PREFIX|FAMILY@START`,
//! `code:PREFIX|C1|C2|BITS`, `fin:PREFIX|SET`, where edge lists are
//! dot-separated (`e[0].e[2]`) and a set is a comma-separated union of
//! `u[3]`, `r(e[0])`, and `{ u[2*j] : j >= 1 }`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::bits::{Bitstream, JPresentation, PeriodicBits};
use crate::error::Error;
use crate::index_set::IndexSet;
use crate::path::{BinaryCoded, InfinitePath, ShiftPoint, Ultrapath};
use crate::ultragraph::{
    Affine, EdgeFamily, EdgeId, Grading, Level, RangeClause, RangeItem, SourceRule, Ultragraph, VertexFamily,
};
use crate::vertex_set::{VertexId, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: [{}] {}", self.line, self.column, self.code, self.message)
    }
}

pub type Diagnostics = Vec<Diagnostic>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 20] =
    ["=>", ">=", "..", "{", "}", "[", "]", "(", ")", ";", ",", ":", "=", "|", "*", "+", "-", "%", "@", "."];

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut line = line0;
    let mut col = col0;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            // long binary words overflow; `number` rejects them
            let n = s.parse::<u64>().unwrap_or(u64::MAX);
            out.push(Token { tok: Tok::Num(n), text: s, line: start_line, col: start_col });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            out.push(Token { tok: Tok::Ident(word.clone()), text: word, line: start_line, col: start_col });
            col += j - i;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), text: s.to_string(), line: start_line, col: start_col });
                col += s.len();
                i += s.len();
            }
            None => {
                return Err(Diagnostic {
                    line,
                    column: col,
                    code: "syntax",
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, text: String::new(), line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Parser::at(text, 1)
    }

    /// A parser for a fragment starting at column `col` of line 1.
    fn at(text: &str, col: usize) -> PResult<Self> {
        Ok(Parser { toks: lex(text, 1, col)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, code: &'static str, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self.here();
        Err(Diagnostic { line, column, code, message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.err("syntax", format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{w}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    fn number(&mut self) -> PResult<u64> {
        match *self.peek() {
            Tok::Num(_) if self.toks[self.pos].text.parse::<u64>().is_err() => {
                self.err("number", format!("number `{}` is too large", self.toks[self.pos].text))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn number_list(&mut self) -> PResult<Vec<u64>> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        if !self.eat_sym("}") {
            loop {
                out.push(self.number()?);
                if self.eat_sym("}") {
                    break;
                }
                self.expect_sym(",")?;
            }
        }
        Ok(out)
    }

    /// An index set; `var`, when given, may prefix each atom.
    fn iset(&mut self, var: Option<&str>) -> PResult<IndexSet> {
        let mut acc = self.iset_atom(var)?;
        while self.eat_sym("|") {
            acc = acc.union(&self.iset_atom(var)?);
        }
        Ok(acc)
    }

    fn iset_atom(&mut self, var: Option<&str>) -> PResult<IndexSet> {
        if self.is_word("all") {
            self.bump();
            return Ok(IndexSet::naturals());
        }
        if self.is_word("none") {
            self.bump();
            return Ok(IndexSet::empty());
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if name != "in" {
                match var {
                    Some(v) if v == name => {
                        self.bump();
                    }
                    Some(v) => return self.err("unknown-variable", format!("expected variable `{v}`, found `{name}`")),
                    None => {
                        self.bump();
                    }
                }
            }
        }
        if self.eat_sym("=") {
            return Ok(IndexSet::singleton(self.number()?));
        }
        if self.eat_sym(">=") {
            let from = self.number()?;
            if self.is_word("step") {
                self.bump();
                let step = self.number()?;
                if step == 0 {
                    return self.err("syntax", "step must be positive");
                }
                return Ok(IndexSet::from_parts(from, [], step, [from % step]));
            }
            if self.is_word("mod") {
                self.bump();
                let p = self.number()?;
                if p == 0 {
                    return self.err("syntax", "modulus must be positive");
                }
                self.expect_word("in")?;
                let (line, column) = self.here();
                let residues = self.number_list()?;
                if residues.iter().any(|&r| r >= p) {
                    return Err(Diagnostic {
                        line,
                        column,
                        code: "syntax",
                        message: format!("residues must be below {p}"),
                    });
                }
                return Ok(IndexSet::at_least(from).intersect(&IndexSet::from_parts(0, [], p, residues)));
            }
            return Ok(IndexSet::at_least(from));
        }
        if self.is_word("in") {
            self.bump();
        }
        if self.is_sym("{") {
            return Ok(IndexSet::finite(self.number_list()?));
        }
        if let Tok::Num(a) = *self.peek() {
            self.bump();
            if self.eat_sym("..") {
                let b = self.number()?;
                return Ok(IndexSet::finite(a..=b));
            }
            return Ok(IndexSet::singleton(a));
        }
        self.unexpected("an index set")
    }

    /// `a*var + b` with non-negative integer coefficients.
    fn affine(&mut self, var: &str) -> PResult<Affine> {
        let (mut coef, mut offset) = (0u64, 0u64);
        loop {
            if self.is_sym("-") {
                return self.err("non-affine", "negative terms are not supported in index expressions");
            }
            match self.peek().clone() {
                Tok::Num(n) => {
                    self.bump();
                    let mult = self.eat_sym("*");
                    match self.peek().clone() {
                        Tok::Ident(v) if v == var => {
                            self.bump();
                            coef += n;
                        }
                        Tok::Ident(v) => return self.err("unknown-variable", format!("unknown variable `{v}`")),
                        _ if mult => return self.unexpected(&format!("`{var}`")),
                        _ => offset += n,
                    }
                }
                Tok::Ident(v) if v == var => {
                    self.bump();
                    if self.is_sym("*") {
                        return self.err("non-affine", format!("`{var}` may only appear linearly"));
                    }
                    coef += 1;
                }
                Tok::Ident(v) => return self.err("unknown-variable", format!("unknown variable `{v}`")),
                _ => return self.unexpected("an index expression"),
            }
            if !self.eat_sym("+") {
                break;
            }
        }
        if self.is_sym("*") || self.is_sym("%") {
            return self.err("non-affine", "index expressions must be affine");
        }
        Ok(Affine::new(coef, offset))
    }

    /// `{ fam[a*j+b] : j-set }`.
    fn comprehension(&mut self) -> PResult<(String, IndexSet, (usize, usize))> {
        self.expect_sym("{")?;
        let at = self.here();
        let family = self.ident()?;
        self.expect_sym("[")?;
        let var = match self.peek_at(0).clone() {
            Tok::Ident(v) => v,
            Tok::Num(_) => match self.peek_at(1).clone() {
                Tok::Sym("*") => match self.peek_at(2).clone() {
                    Tok::Ident(v) => v,
                    _ => "j".to_string(),
                },
                Tok::Ident(v) => v,
                _ => "j".to_string(),
            },
            _ => "j".to_string(),
        };
        let map = self.affine(&var)?;
        self.expect_sym("]")?;
        self.expect_sym(":")?;
        let dom = self.iset(Some(&var))?;
        self.expect_sym("}")?;
        Ok((family, map.image(&dom), at))
    }

    fn edge(&mut self) -> PResult<EdgeId> {
        let family = self.ident()?;
        if self.eat_sym("[") {
            let i = self.number()?;
            self.expect_sym("]")?;
            Ok(EdgeId::new(family, i))
        } else {
            Ok(EdgeId::new(family, 0))
        }
    }

    fn edge_list(&mut self) -> PResult<Vec<EdgeId>> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Ident(_)) {
            out.push(self.edge()?);
            while self.eat_sym(".") {
                out.push(self.edge()?);
            }
        }
        Ok(out)
    }

    fn expect_eof(&self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }
}

/// Source positions of declarations, for validation diagnostics.
#[derive(Default)]
struct Positions {
    families: HashMap<String, (usize, usize)>,
    duplicates: HashMap<String, (usize, usize)>,
    refs: Vec<(String, (usize, usize))>,
    grading: Option<(usize, usize)>,
}

pub fn parse_ultragraph(text: &str) -> Result<Ultragraph, Diagnostics> {
    let mut p = Parser::new(text).map_err(|d| vec![d])?;
    let mut pos = Positions::default();
    let mut vertex_families = Vec::new();
    let mut edge_families = Vec::new();
    let mut grading: Option<Grading> = None;
    let mut declare = |pos: &mut Positions, name: &str, at: (usize, usize)| {
        if pos.families.contains_key(name) {
            pos.duplicates.entry(name.to_string()).or_insert(at);
        } else {
            pos.families.insert(name.to_string(), at);
        }
    };
    loop {
        let at = p.here();
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) if kw == "vertexfamily" => {
                p.bump();
                let name_at = p.here();
                let name = p.ident().map_err(|d| vec![d])?;
                declare(&mut pos, &name, name_at);
                let domain = if p.is_word("domain") {
                    p.bump();
                    p.iset(None).map_err(|d| vec![d])?
                } else {
                    IndexSet::naturals()
                };
                p.eat_sym(";");
                vertex_families.push(VertexFamily { name, domain });
            }
            Tok::Ident(kw) if kw == "edgefamily" => {
                p.bump();
                let ef = parse_edge_family(&mut p, &mut pos, &mut declare).map_err(|d| vec![d])?;
                edge_families.push(ef);
            }
            Tok::Ident(kw) if kw == "grading" => {
                p.bump();
                pos.grading.get_or_insert(at);
                let (family, level) = parse_grading(&mut p).map_err(|d| vec![d])?;
                pos.refs.push((family.clone(), at));
                grading.get_or_insert_with(Grading::default).levels.insert(family, level);
                p.eat_sym(";");
            }
            _ => return Err(vec![p.unexpected::<()>("`vertexfamily`, `edgefamily` or `grading`").unwrap_err()]),
        }
    }
    let mut diags = Vec::new();
    for (name, at) in &pos.duplicates {
        diags.push(Diagnostic {
            line: at.0,
            column: at.1,
            code: "duplicate-family",
            message: format!("family `{name}` is declared twice"),
        });
    }
    let vertex_names: BTreeSet<&str> = vertex_families.iter().map(|f: &VertexFamily| f.name.as_str()).collect();
    for (name, at) in &pos.refs {
        if !vertex_names.contains(name.as_str()) {
            diags.push(Diagnostic {
                line: at.0,
                column: at.1,
                code: "unknown-family",
                message: format!("`{name}` is not a declared vertex family"),
            });
        }
    }
    if !diags.is_empty() {
        diags.sort_by_key(|d| (d.line, d.column));
        return Err(diags);
    }
    Ultragraph::new(vertex_families, edge_families, grading).map_err(|e| vec![locate(&e, &pos)])
}

fn parse_edge_family(
    p: &mut Parser,
    pos: &mut Positions,
    declare: &mut impl FnMut(&mut Positions, &str, (usize, usize)),
) -> PResult<EdgeFamily> {
    let name_at = p.here();
    let name = p.ident()?;
    declare(pos, &name, name_at);
    p.expect_sym("(")?;
    let var = p.ident()?;
    p.expect_sym(")")?;
    p.expect_sym("{")?;
    let mut domain = None;
    let mut source = None;
    let mut ranges = Vec::new();
    while !p.eat_sym("}") {
        match p.peek().clone() {
            Tok::Ident(kw) if kw == "domain" => {
                p.bump();
                domain = Some(p.iset(Some(&var))?);
            }
            Tok::Ident(kw) if kw == "source" => {
                p.bump();
                let fam_at = p.here();
                let family = p.ident()?;
                pos.refs.push((family.clone(), fam_at));
                p.expect_sym("[")?;
                let index = p.affine(&var)?;
                p.expect_sym("]")?;
                source = Some(SourceRule { family, index });
            }
            Tok::Ident(kw) if kw == "range" => {
                p.bump();
                let guard = p.iset(Some(&var))?;
                p.expect_sym("=>")?;
                let mut items = Vec::new();
                loop {
                    if p.is_sym("{") {
                        let (family, set, fam_at) = p.comprehension()?;
                        pos.refs.push((family.clone(), fam_at));
                        items.push(RangeItem::Set { family, set });
                    } else {
                        let fam_at = p.here();
                        let family = p.ident()?;
                        pos.refs.push((family.clone(), fam_at));
                        p.expect_sym("[")?;
                        let index = p.affine(&var)?;
                        p.expect_sym("]")?;
                        items.push(RangeItem::Vertex { family, index });
                    }
                    if !p.eat_sym(",") {
                        break;
                    }
                }
                ranges.push(RangeClause { guard, items });
            }
            Tok::Eof => return p.unexpected("`}`"),
            _ => return p.unexpected("`domain`, `source`, `range` or `}`"),
        }
        if !p.eat_sym(";") && !p.is_sym("}") {
            return p.unexpected("`;`");
        }
    }
    let Some(domain) = domain else {
        return Err(Diagnostic {
            line: name_at.0,
            column: name_at.1,
            code: "missing-domain",
            message: format!("edge family `{name}` has no domain"),
        });
    };
    let Some(source) = source else {
        return Err(Diagnostic {
            line: name_at.0,
            column: name_at.1,
            code: "missing-source",
            message: format!("edge family `{name}` has no source rule"),
        });
    };
    Ok(EdgeFamily { name, var, domain, source, ranges })
}

/// `NAME = a*n + b` with signed integers.
fn parse_grading(p: &mut Parser) -> PResult<(String, Level)> {
    let family = p.ident()?;
    p.expect_sym("=")?;
    let (mut coef, mut offset) = (0i64, 0i64);
    let mut sign = if p.eat_sym("-") { -1 } else { 1 };
    loop {
        match p.peek().clone() {
            Tok::Num(n) => {
                p.bump();
                let n = n as i64 * sign;
                let mult = p.eat_sym("*");
                if let Tok::Ident(_) = p.peek() {
                    p.bump();
                    coef += n;
                } else if mult {
                    return p.unexpected("a variable");
                } else {
                    offset += n;
                }
            }
            Tok::Ident(_) => {
                p.bump();
                coef += sign;
            }
            _ => return p.unexpected("a level expression"),
        }
        if p.eat_sym("+") {
            sign = 1;
        } else if p.eat_sym("-") {
            sign = -1;
        } else {
            break;
        }
    }
    Ok((family, Level { coef, offset }))
}

fn locate(e: &Error, pos: &Positions) -> Diagnostic {
    let at_family = |name: &str| pos.families.get(name).copied().unwrap_or((1, 1));
    let (code, at) = match e {
        Error::UnknownFamily(name) => ("unknown-family", at_family(name)),
        Error::DuplicateFamily(name) => ("duplicate-family", at_family(name)),
        Error::InvalidEdgeFamily { family, message } => {
            let code = if message.contains("overlap") {
                "guard-overlap"
            } else if message.contains("cover") {
                "guard-gap"
            } else {
                "invalid-family"
            };
            (code, at_family(family))
        }
        Error::Sink(v) => ("sink", at_family(v.split('[').next().unwrap_or(v))),
        Error::GradingViolation { .. } => ("grading", pos.grading.unwrap_or((1, 1))),
        _ => ("invalid", (1, 1)),
    };
    Diagnostic { line: at.0, column: at.1, code, message: e.to_string() }
}

/// An index set in the DSL's canonical spelling.
pub fn render_iset(s: &IndexSet, var: &str) -> String {
    let mut atoms = Vec::new();
    let explicit: Vec<u64> = s.explicit().iter().copied().collect();
    match explicit.as_slice() {
        [] => {}
        [one] => atoms.push(format!("{var} = {one}")),
        many => {
            let items: Vec<String> = many.iter().map(u64::to_string).collect();
            atoms.push(format!("{var} in {{{}}}", items.join(", ")))
        }
    }
    if !s.residues().is_empty() {
        let t = s.threshold();
        if s.period() == 1 {
            atoms.push(format!("{var} >= {t}"));
        } else {
            let rs: Vec<String> = s.residues().iter().map(u64::to_string).collect();
            atoms.push(format!("{var} >= {t} mod {} in {{{}}}", s.period(), rs.join(", ")));
        }
    }
    if atoms.is_empty() {
        "none".into()
    } else {
        atoms.join(" | ")
    }
}

fn render_item(item: &RangeItem, var: &str) -> String {
    match item {
        RangeItem::Vertex { family, index } => format!("{family}[{}]", index.render(var)),
        RangeItem::Set { family, set } => format!("{{ {family}[j] : {} }}", render_iset(set, "j")),
    }
}

pub fn serialize_ultragraph(g: &Ultragraph) -> String {
    let mut out = String::new();
    for vf in g.vertex_families() {
        if vf.domain == IndexSet::naturals() {
            out.push_str(&format!("vertexfamily {}\n", vf.name));
        } else {
            out.push_str(&format!("vertexfamily {} domain {}\n", vf.name, render_iset(&vf.domain, "n")));
        }
    }
    for ef in g.edge_families() {
        let v = &ef.var;
        out.push_str(&format!("edgefamily {}({v}) {{\n", ef.name));
        out.push_str(&format!("  domain {};\n", render_iset(&ef.domain, v)));
        out.push_str(&format!("  source {}[{}];\n", ef.source.family, ef.source.index.render(v)));
        for clause in &ef.ranges {
            let items: Vec<String> = clause.items.iter().map(|i| render_item(i, v)).collect();
            out.push_str(&format!("  range {} => {};\n", render_iset(&clause.guard, v), items.join(", ")));
        }
        out.push_str("}\n");
    }
    if let Some(grading) = g.grading() {
        for (family, level) in &grading.levels {
            let sign = if level.offset < 0 { '-' } else { '+' };
            out.push_str(&format!("grading {family} = {}*n {sign} {}\n", level.coef, level.offset.abs()));
        }
    }
    out
}

/// A vertex set: comma-separated `u[3]`, `r(e[0])`, `{ u[2*j] : j >= 1 }`.
fn parse_vertex_set(p: &mut Parser, g: &Ultragraph) -> PResult<VertexSet> {
    let mut acc = VertexSet::empty();
    loop {
        let at = p.here();
        if p.is_sym("{") {
            let (family, set, _) = p.comprehension()?;
            acc = acc.union(&VertexSet::from_family(&family, set));
        } else if p.is_word("r") && matches!(p.peek_at(1), Tok::Sym("(")) {
            p.bump();
            p.bump();
            let e = p.edge()?;
            p.expect_sym(")")?;
            let r = g.range(&e).map_err(|err| Diagnostic {
                line: at.0,
                column: at.1,
                code: "invalid-path",
                message: err.to_string(),
            })?;
            acc = acc.union(&r);
        } else {
            let family = p.ident()?;
            p.expect_sym("[")?;
            let i = p.number()?;
            p.expect_sym("]")?;
            acc = acc.union(&VertexSet::singleton(&VertexId::new(family, i)));
        }
        if !p.eat_sym(",") {
            return Ok(acc);
        }
    }
}

fn periodic_bits(p: &mut Parser) -> PResult<PeriodicBits> {
    // lexed as numbers: "01(10)" → Num(1)? digits are read whole, so use the raw text
    let (line, column) = p.here();
    let mut prefix = String::new();
    if let Tok::Num(_) = p.peek() {
        prefix = raw_digits(p)?;
    }
    p.expect_sym("(")?;
    let cycle = raw_digits(p)?;
    p.expect_sym(")")?;
    let to_bits = |s: &str| s.chars().map(|c| c == '1').collect::<Vec<bool>>();
    PeriodicBits::new(to_bits(&prefix), to_bits(&cycle)).map_err(|e| Diagnostic {
        line,
        column,
        code: "bitstream",
        message: e.to_string(),
    })
}

/// Digits of the next number token exactly as written.
fn raw_digits(p: &mut Parser) -> PResult<String> {
    let t = &p.toks[p.pos];
    let Tok::Num(_) = t.tok else { return p.unexpected("binary digits") };
    let text = t.text.clone();
    if text.chars().any(|c| c != '0' && c != '1') {
        return p.err("bitstream", format!("`{text}` is not a binary word"));
    }
    p.bump();
    Ok(text)
}

fn j_presentation(p: &mut Parser) -> PResult<JPresentation> {
    let at = p.here();
    let name = p.ident()?;
    let wrap = |r: crate::Result<JPresentation>| {
        r.map_err(|e| Diagnostic { line: at.0, column: at.1, code: "j-set", message: e.to_string() })
    };
    match name.as_str() {
        "naturals" => Ok(JPresentation::naturals()),
        "shift" => {
            p.expect_sym("[")?;
            let mut prefix = Vec::new();
            if !p.eat_sym("]") {
                loop {
                    prefix.push(p.number()?);
                    if p.eat_sym("]") {
                        break;
                    }
                    p.expect_sym(",")?;
                }
            }
            p.expect_sym("+")?;
            let offset = p.number()?;
            wrap(JPresentation::shifted(prefix, offset))
        }
        "sel" => {
            p.expect_sym("{")?;
            let bits = periodic_bits(p)?;
            p.expect_sym("}")?;
            Ok(JPresentation::selector(bits))
        }
        other => p.err("j-set", format!("unknown set form `{other}`")),
    }
}

fn bitstream(p: &mut Parser) -> PResult<Bitstream> {
    let at = p.here();
    match p.peek().clone() {
        Tok::Num(_) | Tok::Sym("(") => Ok(Bitstream::Periodic(periodic_bits(p)?)),
        Tok::Ident(name) => {
            p.bump();
            p.expect_sym("{")?;
            let out = match name.as_str() {
                "f" => Bitstream::f_code(j_presentation(p)?),
                "bal" => Bitstream::balanced(bitstream(p)?),
                "beta" => {
                    let alpha = bitstream(p)?;
                    p.expect_sym(";")?;
                    let gamma = bitstream(p)?;
                    Bitstream::beta(alpha, gamma).map_err(|e| Diagnostic {
                        line: at.0,
                        column: at.1,
                        code: "bitstream",
                        message: e.to_string(),
                    })?
                }
                other => return p.err("bitstream", format!("unknown bitstream form `{other}`")),
            };
            p.expect_sym("}")?;
            Ok(out)
        }
        _ => p.unexpected("a bitstream"),
    }
}

pub fn parse_bitstream(text: &str) -> Result<Bitstream, Diagnostics> {
    let run = || {
        let mut p = Parser::new(text)?;
        let b = bitstream(&mut p)?;
        p.expect_eof()?;
        Ok(b)
    };
    run().map_err(|d| vec![d])
}

pub fn parse_j(text: &str) -> Result<JPresentation, Diagnostics> {
    let run = || {
        let mut p = Parser::new(text)?;
        let j = j_presentation(&mut p)?;
        p.expect_eof()?;
        Ok(j)
    };
    run().map_err(|d| vec![d])
}

/// Parses and validates a point against `g`.
pub fn parse_point(text: &str, g: &Ultragraph) -> Result<ShiftPoint, Diagnostics> {
    let (kind, body) = text.split_once(':').ok_or_else(|| {
        vec![Diagnostic {
            line: 1,
            column: 1,
            code: "point-kind",
            message: "expected `ep:`, `tail:`, `code:` or `fin:`".into(),
        }]
    })?;
    let offset = kind.len() + 2;
    let mut parts: Vec<(usize, &str)> = Vec::new();
    let limit = match kind {
        "code" => 4,
        "ep" | "tail" | "fin" => 2,
        other => {
            return Err(vec![Diagnostic {
                line: 1,
                column: 1,
                code: "point-kind",
                message: format!("unknown point kind `{other}`"),
            }])
        }
    };
    let mut start = 0;
    for piece in body.splitn(limit, '|') {
        parts.push((offset + start, piece));
        start += piece.len() + 1;
    }
    if parts.len() != limit {
        return Err(vec![Diagnostic {
            line: 1,
            column: offset,
            code: "syntax",
            message: format!("`{kind}:` takes {limit} `|`-separated parts"),
        }]);
    }
    let sub = |col: usize, s: &str| Parser::at(s, col);
    let edges = |col: usize, s: &str| -> PResult<Vec<EdgeId>> {
        let mut p = sub(col, s)?;
        let out = p.edge_list()?;
        p.expect_eof()?;
        Ok(out)
    };
    let build = || -> PResult<ShiftPoint> {
        let prefix = edges(parts[0].0, parts[0].1)?;
        Ok(match kind {
            "ep" => {
                let cycle = edges(parts[1].0, parts[1].1)?;
                if cycle.is_empty() {
                    return Err(Diagnostic {
                        line: 1,
                        column: parts[1].0,
                        code: "invalid-path",
                        message: "empty cycle".into(),
                    });
                }
                ShiftPoint::Infinite(InfinitePath::periodic(prefix, cycle))
            }
            "tail" => {
                let mut p = sub(parts[1].0, parts[1].1)?;
                let family = p.ident()?;
                p.expect_sym("@")?;
                let start = p.number()?;
                p.expect_eof()?;
                ShiftPoint::Infinite(InfinitePath::tail(prefix, family, start))
            }
            "code" => {
                let c1 = edges(parts[1].0, parts[1].1)?;
                let c2 = edges(parts[2].0, parts[2].1)?;
                let mut p = sub(parts[3].0, parts[3].1)?;
                let bits = bitstream(&mut p)?;
                p.expect_eof()?;
                let Some(first) = c1.first() else {
                    return Err(Diagnostic {
                        line: 1,
                        column: parts[1].0,
                        code: "invalid-path",
                        message: "empty block".into(),
                    });
                };
                let vertex = g.source(first).map_err(|e| Diagnostic {
                    line: 1,
                    column: parts[1].0,
                    code: "invalid-path",
                    message: e.to_string(),
                })?;
                let mut b = BinaryCoded::new(vertex, c1, c2, bits);
                b.prefix = prefix;
                ShiftPoint::Infinite(InfinitePath::BinaryCoded(b))
            }
            _ => {
                let mut p = sub(parts[1].0, parts[1].1)?;
                let set = parse_vertex_set(&mut p, g)?;
                p.expect_eof()?;
                ShiftPoint::Finite(Ultrapath::new(prefix, set))
            }
        })
    };
    let point = build().map_err(|d| vec![d])?;
    point.validate(g).map_err(|e| {
        let code = if matches!(e, Error::NotMinimalEmitter(_)) { "not-minimal-emitter" } else { "invalid-path" };
        vec![Diagnostic { line: 1, column: 1, code, message: e.to_string() }]
    })?;
    Ok(point)
}

/// `u[3]`.
pub fn parse_vertex(text: &str) -> Result<VertexId, Diagnostics> {
    let run = || {
        let mut p = Parser::new(text)?;
        let family = p.ident()?;
        p.expect_sym("[")?;
        let i = p.number()?;
        p.expect_sym("]")?;
        p.expect_eof()?;
        Ok(VertexId::new(family, i))
    };
    run().map_err(|d| vec![d])
}

/// `e[0].e[2]`; empty text is the empty list.
pub fn parse_edges(text: &str) -> Result<Vec<EdgeId>, Diagnostics> {
    let run = || {
        let mut p = Parser::new(text)?;
        let edges = p.edge_list()?;
        p.expect_eof()?;
        Ok(edges)
    };
    run().map_err(|d| vec![d])
}

pub fn render_edges(edges: &[EdgeId]) -> String {
    edges.iter().map(EdgeId::to_string).collect::<Vec<_>>().join(".")
}

pub fn render_vertex_set(s: &VertexSet) -> String {
    let items: Vec<String> = s
        .atoms()
        .iter()
        .flat_map(|(family, set)| {
            if set.is_finite() {
                set.iter().map(|i| format!("{family}[{i}]")).collect()
            } else {
                vec![format!("{{ {family}[j] : {} }}", render_iset(set, "j"))]
            }
        })
        .collect();
    items.join(", ")
}

/// The point in `parse_point` syntax.
pub fn render_point(x: &ShiftPoint) -> String {
    match x {
        ShiftPoint::Finite(p) => format!("fin:{}|{}", render_edges(&p.edges), render_vertex_set(&p.terminal)),
        ShiftPoint::Infinite(InfinitePath::EventuallyPeriodic { prefix, cycle }) => {
            format!("ep:{}|{}", render_edges(prefix), render_edges(cycle))
        }
        ShiftPoint::Infinite(InfinitePath::FamilyTail { prefix, family, start }) => {
            format!("tail:{}|{family}@{start}", render_edges(prefix))
        }
        ShiftPoint::Infinite(InfinitePath::BinaryCoded(b)) => {
            let mut s =
                format!("code:{}|{}|{}|{}", render_edges(&b.prefix), render_edges(&b.c1), render_edges(&b.c2), b.bits);
            if b.consumed > 0 {
                s.push_str(&format!(" (after {} blocks)", b.consumed));
            }
            s
        }
    }
}
