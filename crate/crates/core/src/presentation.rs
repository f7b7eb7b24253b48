//! Quivers with relations and their text format.
//!
//! Paths compose right to left: the word `u*v` means "`u` after `v`", so
//! the source of `u*v` is the source of `v`. A [`Path`] stores its arrows
//! in written order, leftmost arrow first.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::ParseError;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Quiver, ParseError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(ParseError::InvalidQuiver(format!("duplicate vertex `{v}`")));
            }
        }
        for a in &arrows {
            if !seen.insert(a.name.as_str()) {
                return Err(ParseError::InvalidQuiver(format!(
                    "arrow name `{}` repeats another vertex or arrow",
                    a.name
                )));
            }
            if a.source >= vertices.len() || a.target >= vertices.len() {
                return Err(ParseError::InvalidQuiver(format!(
                    "arrow `{}` has an endpoint outside the vertex set",
                    a.name
                )));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn vertex_path(&self, v: usize) -> Path {
        Path::vertex(v)
    }

    pub fn arrow_path(&self, a: usize) -> Path {
        let arrow = &self.arrows[a];
        Path {
            source: arrow.source,
            target: arrow.target,
            arrows: vec![a],
        }
    }

    /// `u * v`, or `None` when `u` cannot follow `v`.
    pub fn compose(&self, u: &Path, v: &Path) -> Option<Path> {
        if u.source != v.target {
            return None;
        }
        let mut arrows = u.arrows.clone();
        arrows.extend_from_slice(&v.arrows);
        Some(Path {
            source: v.source,
            target: u.target,
            arrows,
        })
    }

    /// Builds a path from arrows in written order; `None` if not composable.
    pub fn path_from_arrows(&self, arrows: &[usize]) -> Option<Path> {
        let (&first, rest) = arrows.split_first()?;
        let mut p = self.arrow_path(first);
        for &a in rest {
            p = self.compose(&p, &self.arrow_path(a))?;
        }
        Some(p)
    }

    /// Sub-path `arrows[range]` of `p`, or the idempotent at the junction
    /// vertex when the range is empty.
    pub fn subpath(&self, p: &Path, start: usize, end: usize) -> Path {
        if start == end {
            let v = if start == 0 {
                p.target
            } else {
                self.arrows[p.arrows[start - 1]].source
            };
            return Path::vertex(v);
        }
        let first = &self.arrows[p.arrows[start]];
        let last = &self.arrows[p.arrows[end - 1]];
        Path {
            source: last.source,
            target: first.target,
            arrows: p.arrows[start..end].to_vec(),
        }
    }

    /// Vertices visited by `p`, in order from target to source.
    pub fn visited(&self, p: &Path) -> Vec<usize> {
        let mut out = vec![p.target];
        for &a in &p.arrows {
            out.push(self.arrows[a].source);
        }
        out
    }

    pub fn display_path(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            return self.vertices[p.source].clone();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < p.arrows.len() {
            let mut j = i;
            while j < p.arrows.len() && p.arrows[j] == p.arrows[i] {
                j += 1;
            }
            let name = &self.arrows[p.arrows[i]].name;
            if j - i > 1 {
                parts.push(format!("{name}^{}", j - i));
            } else {
                parts.push(name.clone());
            }
            i = j;
        }
        parts.join("*")
    }

    pub fn display_poly(&self, p: &PathPoly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (path, c)) in p.terms().iter().rev().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&self.display_path(path));
        }
        out
    }
}

/// A path in the quiver; the trivial path at `v` has no arrows and
/// `source == target == v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn vertex(v: usize) -> Path {
        Path {
            source: v,
            target: v,
            arrows: Vec::new(),
        }
    }

    /// Number of arrows; vertex paths have length zero (see `is_vertex`).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.source, self.target)
    }

    /// Start offsets where `sub` occurs as a contiguous arrow word.
    pub fn occurrences(&self, sub: &Path) -> Vec<usize> {
        let n = sub.arrows.len();
        if n == 0 || n > self.arrows.len() {
            return Vec::new();
        }
        (0..=self.arrows.len() - n)
            .filter(|&i| self.arrows[i..i + n] == sub.arrows[..])
            .collect()
    }
}

/// Length-lexicographic order: shorter paths first, then lexicographic on
/// arrow indices (declaration order); trivial paths by vertex index.
impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| self.arrows.cmp(&other.arrows))
            .then_with(|| self.source.cmp(&other.source))
            .then_with(|| self.target.cmp(&other.target))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite linear combination of paths. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathPoly {
    field: Field,
    terms: BTreeMap<Path, Scalar>,
}

impl PathPoly {
    pub fn zero(field: Field) -> PathPoly {
        PathPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: Field, path: Path, coeff: Scalar) -> PathPoly {
        let mut p = PathPoly::zero(field);
        p.add_term(path, &coeff);
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Path, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, p: &Path) -> Scalar {
        self.terms.get(p).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> Option<(&Path, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, path: Path, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&path) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&path);
                }
            }
            None => {
                self.terms.insert(path, coeff.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, coeff: &Scalar, other: &PathPoly) {
        for (p, c) in &other.terms {
            self.add_term(p.clone(), &(coeff * c));
        }
    }

    pub fn scale(&self, coeff: &Scalar) -> PathPoly {
        let mut out = PathPoly::zero(self.field);
        out.add_scaled(coeff, self);
        out
    }

    pub fn remove(&mut self, path: &Path) -> Option<Scalar> {
        self.terms.remove(path)
    }

    /// The common (source, target) of all terms, if there is one.
    pub fn endpoints(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(Path::endpoints);
        let first = it.next()?;
        it.all(|e| e == first).then_some(first)
    }

    /// Product in the path algebra; non-composable pairs contribute zero.
    pub fn mul(&self, other: &PathPoly, quiver: &Quiver) -> PathPoly {
        let mut out = PathPoly::zero(self.field);
        for (p, c) in &self.terms {
            for (q, d) in &other.terms {
                if let Some(pq) = quiver.compose(p, q) {
                    out.add_term(pq, &(c * d));
                }
            }
        }
        out
    }
}

/// A quiver with scalar parameters, relations and an optional order on
/// the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub field: Field,
    pub quiver: Quiver,
    /// Parameters in declaration order.
    pub params: Vec<(String, Scalar)>,
    pub relations: Vec<PathPoly>,
    /// Covering pairs `(lower, upper)` from `ORDER` lines, as vertex indices.
    pub order: Vec<(usize, usize)>,
}

impl Presentation {
    pub fn param(&self, name: &str) -> Option<&Scalar> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn max_relation_degree(&self) -> usize {
        self.relations.iter().map(PathPoly::degree).max().unwrap_or(0)
    }

    /// Renders the presentation in the text format accepted by
    /// [`parse_presentation`]. Parameters have already been substituted into
    /// the relations, which therefore carry explicit coefficients.
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self.field {
            Field::Rational => out.push_str("FIELD rational\n"),
            Field::Prime(p) => out.push_str(&format!("FIELD prime {p}\n")),
        }
        for (name, value) in &self.params {
            out.push_str(&format!("PARAM {name} = {value}\n"));
        }
        out.push_str(&format!("VERTICES {}\n", self.quiver.vertices.join(" ")));
        for a in &self.quiver.arrows {
            out.push_str(&format!(
                "ARROW {} : {} -> {}\n",
                a.name, self.quiver.vertices[a.source], self.quiver.vertices[a.target]
            ));
        }
        for r in &self.relations {
            out.push_str(&format!("REL {}\n", self.quiver.display_poly(r)));
        }
        for &(lo, hi) in &self.order {
            out.push_str(&format!(
                "ORDER {} < {}\n",
                self.quiver.vertices[lo], self.quiver.vertices[hi]
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Number(String),
    Sym(char),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token::Number(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^=".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                line,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

struct RelationParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    field: Field,
    quiver: &'a Quiver,
    params: &'a HashMap<String, Scalar>,
}

impl RelationParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn number(&mut self) -> Result<Scalar, ParseError> {
        let Some(Token::Number(n)) = self.next() else {
            return Err(syntax(self.line, "expected a number"));
        };
        let mut literal = n;
        if self.peek() == Some(&Token::Sym('/')) {
            self.pos += 1;
            let Some(Token::Number(d)) = self.next() else {
                return Err(syntax(self.line, "expected a denominator after `/`"));
            };
            literal = format!("{literal}/{d}");
        }
        self.field.parse(&literal).map_err(|source| ParseError::Scalar {
            line: self.line,
            source,
        })
    }

    fn exponent(&mut self) -> Result<usize, ParseError> {
        if self.peek() != Some(&Token::Sym('^')) {
            return Ok(1);
        }
        self.pos += 1;
        match self.next() {
            Some(Token::Number(n)) => n
                .parse()
                .map_err(|_| syntax(self.line, format!("bad exponent `{n}`"))),
            _ => Err(syntax(self.line, "expected an exponent after `^`")),
        }
    }

    /// One product term: scalars and path symbols joined by `*`.
    fn term(&mut self) -> Result<(Scalar, Path, String), ParseError> {
        let mut coeff = self.field.one();
        let mut path: Option<Path> = None;
        let mut text = Vec::new();
        loop {
            match self.peek().cloned() {
                Some(Token::Number(_)) => coeff = &coeff * &self.number()?,
                Some(Token::Ident(name)) => {
                    self.pos += 1;
                    let power = self.exponent()?;
                    if let Some(v) = self.params.get(&name) {
                        coeff = &coeff * &v.pow(power as u64);
                    } else {
                        let factor = if let Some(a) = self.quiver.arrow_index(&name) {
                            self.quiver.arrow_path(a)
                        } else if let Some(v) = self.quiver.vertex_index(&name) {
                            Path::vertex(v)
                        } else {
                            return Err(ParseError::UnknownSymbol {
                                line: self.line,
                                symbol: name,
                            });
                        };
                        for _ in 0..power {
                            text.push(name.clone());
                            path = Some(match path {
                                None => factor.clone(),
                                Some(p) => self.quiver.compose(&p, &factor).ok_or_else(|| {
                                    ParseError::NonComposablePath {
                                        line: self.line,
                                        path: text.join("*"),
                                    }
                                })?,
                            });
                        }
                    }
                }
                _ => return Err(syntax(self.line, "expected a scalar or path symbol")),
            }
            if self.peek() == Some(&Token::Sym('*')) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let path = path.ok_or_else(|| syntax(self.line, "term has no path factor"))?;
        Ok((coeff, path, text.join("*")))
    }

    /// Signed sum of terms up to `=` or end of input.
    fn side(&mut self, into: &mut Vec<(Scalar, Path, String)>, sign: &Scalar) -> Result<(), ParseError> {
        let mut first = true;
        loop {
            let mut s = sign.clone();
            match self.peek() {
                Some(Token::Sym('+')) => {
                    self.pos += 1;
                }
                Some(Token::Sym('-')) => {
                    self.pos += 1;
                    s = -s;
                }
                _ if !first => break,
                _ => {}
            }
            if self.peek() == Some(&Token::Number("0".into()))
                && matches!(self.tokens.get(self.pos + 1), None | Some(Token::Sym('=')))
            {
                self.pos += 1;
                break;
            }
            let (c, p, t) = self.term()?;
            into.push((&s * &c, p, t));
            first = false;
            if !matches!(self.peek(), Some(Token::Sym('+')) | Some(Token::Sym('-'))) {
                break;
            }
        }
        Ok(())
    }

    fn relation(&mut self) -> Result<PathPoly, ParseError> {
        let mut terms = Vec::new();
        let one = self.field.one();
        self.side(&mut terms, &one)?;
        if self.peek() == Some(&Token::Sym('=')) {
            self.pos += 1;
            self.side(&mut terms, &-one)?;
        }
        if self.pos < self.tokens.len() {
            return Err(syntax(self.line, "trailing input in relation"));
        }
        let mut poly = PathPoly::zero(self.field);
        let mut first: Option<(usize, usize, String)> = None;
        for (c, p, text) in terms {
            match &first {
                None => first = Some((p.source, p.target, text.clone())),
                Some((s, t, ftext)) => {
                    if (p.source, p.target) != (*s, *t) {
                        return Err(ParseError::NonHomogeneousRelation {
                            line: self.line,
                            first: ftext.clone(),
                            second: text,
                        });
                    }
                }
            }
            poly.add_term(p, &c);
        }
        Ok(poly)
    }
}

/// Parses a presentation file.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    parse_presentation_with(text, &[])
}

/// Parses a presentation file, replacing `PARAM` values by `overrides`
/// (`name`, literal) before relations are read.
pub fn parse_presentation_with(
    text: &str,
    overrides: &[(String, String)],
) -> Result<Presentation, ParseError> {
    let mut field = Field::Rational;
    let mut field_seen = false;
    let mut param_lines: Vec<(usize, String, String)> = Vec::new();
    let mut vertices: Option<Vec<String>> = None;
    let mut arrow_lines: Vec<(usize, String, String, String)> = Vec::new();
    let mut rel_lines: Vec<(usize, String)> = Vec::new();
    let mut order_lines: Vec<(usize, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        match keyword {
            "FIELD" => {
                if field_seen {
                    return Err(syntax(line, "duplicate FIELD line"));
                }
                field_seen = true;
                let words: Vec<&str> = rest.split_whitespace().collect();
                field = match words.as_slice() {
                    ["rational"] => Field::Rational,
                    ["prime", p] => {
                        let p: u64 = p.parse().map_err(|_| syntax(line, format!("bad prime `{p}`")))?;
                        Field::prime(p).map_err(|source| ParseError::Scalar { line, source })?
                    }
                    _ => return Err(syntax(line, "expected `FIELD rational` or `FIELD prime <p>`")),
                };
            }
            "PARAM" => {
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax(line, "expected `PARAM <name> = <value>`"))?;
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(syntax(line, format!("bad parameter name `{name}`")));
                }
                param_lines.push((line, name.to_string(), value.trim().to_string()));
            }
            "VERTICES" => {
                if vertices.is_some() {
                    return Err(syntax(line, "duplicate VERTICES line"));
                }
                let vs: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if vs.is_empty() {
                    return Err(syntax(line, "VERTICES needs at least one vertex"));
                }
                if let Some(bad) = vs.iter().find(|v| !is_identifier(v)) {
                    return Err(syntax(line, format!("bad vertex name `{bad}`")));
                }
                vertices = Some(vs);
            }
            "ARROW" => {
                let (name, ends) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(line, "expected `ARROW <name> : <src> -> <tgt>`"))?;
                let (src, tgt) = ends
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "expected `<src> -> <tgt>`"))?;
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(syntax(line, format!("bad arrow name `{name}`")));
                }
                arrow_lines.push((
                    line,
                    name.to_string(),
                    src.trim().to_string(),
                    tgt.trim().to_string(),
                ));
            }
            "REL" => rel_lines.push((line, rest.to_string())),
            "ORDER" => {
                let (lo, hi) = rest
                    .split_once('<')
                    .ok_or_else(|| syntax(line, "expected `ORDER <x> < <y>`"))?;
                order_lines.push((line, lo.trim().to_string(), hi.trim().to_string()));
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let vertices = vertices.ok_or_else(|| syntax(0, "missing VERTICES line"))?;
    let lookup_vertex = |line: usize, name: &str| {
        vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| ParseError::UnknownSymbol {
                line,
                symbol: name.to_string(),
            })
    };
    let mut arrows = Vec::new();
    for (line, name, src, tgt) in &arrow_lines {
        arrows.push(Arrow {
            name: name.clone(),
            source: lookup_vertex(*line, src)?,
            target: lookup_vertex(*line, tgt)?,
        });
    }
    let quiver = Quiver::new(vertices.clone(), arrows)?;

    let mut params = Vec::new();
    let mut param_map = HashMap::new();
    for (line, name, value) in &param_lines {
        if quiver.vertex_index(name).is_some() || quiver.arrow_index(name).is_some() {
            return Err(syntax(*line, format!("parameter `{name}` shadows a quiver symbol")));
        }
        if param_map.contains_key(name) {
            return Err(syntax(*line, format!("duplicate parameter `{name}`")));
        }
        let literal = overrides
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
            .unwrap_or(value);
        let v = field
            .parse(literal)
            .map_err(|source| ParseError::Scalar { line: *line, source })?;
        param_map.insert(name.clone(), v.clone());
        params.push((name.clone(), v));
    }
    if let Some((name, _)) = overrides.iter().find(|(n, _)| !param_map.contains_key(n)) {
        return Err(ParseError::UnknownSymbol {
            line: 0,
            symbol: name.clone(),
        });
    }

    let mut relations = Vec::new();
    for (line, body) in &rel_lines {
        let mut parser = RelationParser {
            tokens: tokenize(body, *line)?,
            pos: 0,
            line: *line,
            field,
            quiver: &quiver,
            params: &param_map,
        };
        if parser.tokens.is_empty() {
            return Err(syntax(*line, "empty relation"));
        }
        relations.push(parser.relation()?);
    }

    let mut order = Vec::new();
    for (line, lo, hi) in &order_lines {
        order.push((lookup_vertex(*line, lo)?, lookup_vertex(*line, hi)?));
    }

    Ok(Presentation {
        field,
        quiver,
        params,
        relations,
        order,
    })
}
