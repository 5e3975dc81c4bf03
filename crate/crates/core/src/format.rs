//! Text formats: preorder specs, element and matrix literals, semilinear
//! sets, index and region literals. Printers emit what the parsers accept.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::invariants::semilinear::SemilinearSet;
use crate::linalg::Mat;
use crate::matgroup::{FiniteMatrix, WindowElement};
use crate::preorder::{BaseShape, BlockKind, BlockSpec, FinitaryPartition, Index, IndexSet, PreorderSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(i64),
    Punct(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => f.write_str(w),
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Punct(p) => f.write_str(p),
            Tok::End => f.write_str("<end of input>"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const PUNCT: [&str; 12] = ["..", "{", "}", "[", "]", "(", ")", ",", ";", "=", ":", "|"];

fn lex(src: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line_no = ln + 1;
        let line = line.split('#').next().unwrap_or("");
        let b = line.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '-' && b.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                i += 1;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &line[start..i];
                let n = text.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    token: text.into(),
                    msg: "integer out of range".into(),
                })?;
                toks.push((Tok::Int(n), line_no));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'-') {
                    i += 1;
                }
                toks.push((Tok::Word(line[start..i].to_string()), line_no));
            } else if let Some(p) = PUNCT.iter().find(|p| line[i..].starts_with(**p)) {
                toks.push((Tok::Punct(p), line_no));
                i += p.len();
            } else {
                return Err(Error::Parse {
                    line: line_no,
                    token: c.to_string(),
                    msg: "unexpected character".into(),
                });
            }
        }
    }
    let last = src.lines().count().max(1);
    toks.push((Tok::End, last));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn line(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line(),
            token: self.peek().to_string(),
            msg: msg.into(),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(self.error(msg))
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn punct(&mut self, p: &str) -> Result<()> {
        if self.at_punct(p) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.next();
                Ok(w)
            }
            _ => self.err("expected a word"),
        }
    }

    fn keyword(&mut self, w: &str) -> Result<()> {
        if self.at_word(w) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{w}`"))
        }
    }

    fn int(&mut self) -> Result<i64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let n = self.int()?;
        if n < 0 {
            self.pos -= 1;
            return self.err("expected a nonnegative integer");
        }
        Ok(n as u64)
    }

    fn end(&mut self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    /// `open item (sep item)* close`, possibly empty.
    fn list<T>(&mut self, open: &str, close: &str, sep: &str, mut item: impl FnMut(&mut Lexer) -> Result<T>) -> Result<Vec<T>> {
        self.punct(open)?;
        let mut out = Vec::new();
        if self.at_punct(close) {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.at_punct(sep) {
                self.next();
            } else {
                self.punct(close)?;
                return Ok(out);
            }
        }
    }
}

fn at_line<T>(line: usize, token: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Parse { .. } => e,
        e => Error::Parse {
            line,
            token: token.into(),
            msg: e.to_string(),
        },
    })
}

fn parse_block(lx: &mut Lexer) -> Result<BlockSpec> {
    let line = lx.line();
    lx.keyword("block")?;
    lx.punct("(")?;
    let size = lx.nat()?;
    lx.punct(",")?;
    let kind = match lx.word()?.as_str() {
        "chain" => BlockKind::Chain,
        "full" => BlockKind::Full,
        "antichain" => BlockKind::Antichain,
        "pairs" => {
            let mut pairs = Vec::new();
            if lx.at_punct(":") {
                lx.next();
                loop {
                    lx.punct("(")?;
                    let a = lx.nat()? as u32;
                    lx.punct(",")?;
                    let b = lx.nat()? as u32;
                    lx.punct(")")?;
                    pairs.push((a, b));
                    if lx.at_punct(";") {
                        lx.next();
                    } else {
                        break;
                    }
                }
            }
            BlockKind::Pairs(pairs)
        }
        other => {
            lx.pos -= 1;
            return lx.err(format!("unknown block kind {other}"));
        }
    };
    lx.punct(")")?;
    if size == 0 || size > u32::MAX as u64 {
        return at_line(line, "block", Err(Error::InvalidBlock(format!("bad size {size}"))));
    }
    at_line(line, "block", BlockSpec::new(size as u32, kind))
}

fn parse_semilinear_tokens(lx: &mut Lexer) -> Result<SemilinearSet> {
    let line = lx.line();
    lx.keyword("semilinear")?;
    lx.punct("{")?;
    lx.keyword("finite")?;
    lx.punct("=")?;
    let finite = lx.list("{", "}", ",", Lexer::nat)?;
    lx.punct(";")?;
    lx.keyword("prog")?;
    lx.punct("=")?;
    let mut progs = Vec::new();
    while lx.at_punct("(") {
        lx.next();
        let b = lx.nat()?;
        lx.punct(",")?;
        let d = lx.nat()?;
        lx.punct(")")?;
        progs.push((b, d));
        if lx.at_punct(";") {
            lx.next();
        } else {
            break;
        }
    }
    lx.punct("}")?;
    at_line(line, "semilinear", SemilinearSet::new(finite, progs))
}

/// Index literal: `b:s`, or an integer position.
fn parse_index_tokens(lx: &mut Lexer, spec: &PreorderSpec) -> Result<Index> {
    let line = lx.line();
    let a = lx.int()?;
    let idx = if lx.at_punct(":") {
        lx.next();
        let s = lx.nat()?;
        Index::new(a, s as u32)
    } else {
        at_line(line, &a.to_string(), spec.index_at(a))?
    };
    at_line(line, &idx.to_string(), spec.check(&idx))?;
    Ok(idx)
}

fn parse_region_tokens(lx: &mut Lexer, spec: &PreorderSpec) -> Result<IndexSet> {
    let line = lx.line();
    if lx.at_punct("[") || lx.at_punct("{") {
        let close = if lx.at_punct("[") { "]" } else { "}" };
        let open = if close == "]" { "[" } else { "{" };
        return Ok(lx.list(open, close, ",", |l| parse_index_tokens(l, spec))?.into_iter().collect());
    }
    let a = lx.int()?;
    if lx.at_punct("..") {
        lx.next();
        let b = lx.int()?;
        return at_line(line, &format!("{a}..{b}"), spec.positions(a, b));
    }
    lx.pos -= 1;
    let mut out = vec![parse_index_tokens(lx, spec)?];
    while lx.at_punct(",") {
        lx.next();
        out.push(parse_index_tokens(lx, spec)?);
    }
    Ok(out.into_iter().collect())
}

/// Parses a preorder spec file.
pub fn parse_preorder(src: &str) -> Result<PreorderSpec> {
    let mut lx = lex(src)?;
    let mut base = BaseShape::Z;
    let mut pattern: Option<Vec<BlockSpec>> = None;
    let mut sizes: Option<SemilinearSet> = None;
    let mut exceptions = Vec::new();
    let mut coarsen: Vec<(usize, Lexer)> = Vec::new();
    while *lx.peek() != Tok::End {
        let line = lx.line();
        match lx.word()?.as_str() {
            "base" => {
                lx.punct("=")?;
                base = match lx.word()?.as_str() {
                    "Z" => BaseShape::Z,
                    "N" => BaseShape::N,
                    "NEGN" => BaseShape::NegN,
                    other => {
                        lx.pos -= 1;
                        return lx.err(format!("unknown base {other}"));
                    }
                };
            }
            "pattern" => {
                lx.punct("=")?;
                let mut blocks = vec![parse_block(&mut lx)?];
                while lx.at_punct(",") {
                    lx.next();
                    blocks.push(parse_block(&mut lx)?);
                }
                pattern = Some(blocks);
            }
            "exception" => {
                let c = lx.int()?;
                lx.punct("=")?;
                exceptions.push((line, c, parse_block(&mut lx)?));
            }
            "sizes" => {
                lx.punct("=")?;
                sizes = Some(parse_semilinear_tokens(&mut lx)?);
            }
            "coarsen" => {
                // Indices depend on the finished spec; keep the tokens.
                lx.punct("=")?;
                let start = lx.pos;
                while !matches!(lx.peek(), Tok::Word(_) | Tok::End) {
                    lx.next();
                }
                let mut toks: Vec<(Tok, usize)> = lx.toks[start..lx.pos].to_vec();
                toks.push((Tok::End, line));
                coarsen.push((line, Lexer { toks, pos: 0 }));
            }
            other => {
                lx.pos -= 1;
                return lx.err(format!("unknown statement {other}"));
            }
        }
    }
    let mut spec = match (pattern, sizes) {
        (Some(_), Some(_)) => return lx.err("`pattern` and `sizes` are mutually exclusive"),
        (Some(p), None) => PreorderSpec::from_pattern(base, p)?,
        (None, Some(s)) => PreorderSpec::from_sizes(base, s)?,
        (None, None) => PreorderSpec::plain(base),
    };
    for (line, c, blk) in exceptions {
        spec = at_line(line, "exception", spec.with_exception(c, blk))?;
    }
    for (line, mut cl) in coarsen {
        let mut parts = Vec::new();
        loop {
            let part: IndexSet = cl.list("{", "}", ",", |l| parse_index_tokens(l, &spec))?.into_iter().collect();
            parts.push(part);
            if cl.at_punct("|") {
                cl.next();
            } else {
                break;
            }
        }
        cl.end()?;
        spec = at_line(line, "coarsen", spec.coarsen(FinitaryPartition::new(parts)))?;
    }
    Ok(spec)
}

pub fn parse_semilinear(src: &str) -> Result<SemilinearSet> {
    let mut lx = lex(src)?;
    let s = parse_semilinear_tokens(&mut lx)?;
    lx.end()?;
    Ok(s)
}

pub fn parse_index(src: &str, spec: &PreorderSpec) -> Result<Index> {
    let mut lx = lex(src)?;
    let i = parse_index_tokens(&mut lx, spec)?;
    lx.end()?;
    Ok(i)
}

/// `a..b`, `[i, j, ...]`, `{i, j, ...}` or a bare comma list.
pub fn parse_region(src: &str, spec: &PreorderSpec) -> Result<IndexSet> {
    let mut lx = lex(src)?;
    if *lx.peek() == Tok::End {
        return Ok(IndexSet::empty());
    }
    let r = parse_region_tokens(&mut lx, spec)?;
    lx.end()?;
    Ok(r)
}

fn parse_rows(lx: &mut Lexer, field: &Field) -> Result<Vec<Vec<u32>>> {
    let line = lx.line();
    let rows = lx.list("[", "]", ",", |l| {
        l.list("[", "]", ",", |l| {
            let line = l.line();
            let v = l.nat()?;
            at_line(line, &v.to_string(), field.literal(v))
        })
    })?;
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return at_line(
            line,
            "core",
            Err(Error::ShapeMismatch {
                rows: n,
                cols: r.len(),
                window: n,
            }),
        );
    }
    Ok(rows)
}

/// Fields `key = value;` inside braces, any order.
fn parse_record<'a>(
    lx: &mut Lexer,
    head: &str,
    keys: &[&'a str],
    mut value: impl FnMut(&'a str, &mut Lexer) -> Result<()>,
) -> Result<()> {
    lx.keyword(head)?;
    lx.punct("{")?;
    let mut seen = Vec::new();
    loop {
        if lx.at_punct("}") {
            lx.next();
            break;
        }
        let w = lx.word()?;
        let Some(&key) = keys.iter().find(|k| **k == w) else {
            lx.pos -= 1;
            return lx.err(format!("unknown field {w}"));
        };
        if seen.contains(&key) {
            lx.pos -= 1;
            return lx.err(format!("duplicate field {key}"));
        }
        seen.push(key);
        lx.punct("=")?;
        value(key, lx)?;
        if lx.at_punct(";") {
            lx.next();
        } else {
            lx.punct("}")?;
            break;
        }
    }
    if let Some(k) = keys.iter().find(|k| !seen.contains(k)) {
        return lx.err(format!("missing field {k}"));
    }
    Ok(())
}

fn parse_field(lx: &mut Lexer) -> Result<Field> {
    let line = lx.line();
    let q = lx.nat()?;
    at_line(line, &q.to_string(), Field::new(q))
}

/// `elem { q = ..; scalar = ..; window = [..]; core = [[..],..] }`
pub fn parse_element(src: &str, spec: Arc<PreorderSpec>) -> Result<WindowElement> {
    let mut lx = lex(src)?;
    let e = parse_element_tokens(&mut lx, spec)?;
    lx.end()?;
    Ok(e)
}

fn parse_element_tokens(lx: &mut Lexer, spec: Arc<PreorderSpec>) -> Result<WindowElement> {
    let line = lx.line();
    let mut field = None;
    let mut scalar = 0u64;
    let mut window = IndexSet::empty();
    let mut rows = Vec::new();
    parse_record(lx, "elem", &["q", "scalar", "window", "core"], |key, l| {
        match key {
            "q" => field = Some(parse_field(l)?),
            "scalar" => scalar = l.nat()?,
            "window" => window = l.list("[", "]", ",", |l| parse_index_tokens(l, &spec))?.into_iter().collect(),
            _ => {
                let f = field.clone().ok_or_else(|| l.error("`q` must come before `core`"))?;
                rows = parse_rows(l, &f)?;
            }
        }
        Ok(())
    })?;
    let field = field.expect("q is required");
    let scalar = at_line(line, "scalar", field.literal(scalar))?;
    let core = Mat::from_rows(&rows);
    at_line(line, "elem", WindowElement::new(field, spec, scalar, window, core))
}

/// `matrix { q = ..; region = [..]; entries = [[..],..] }`
pub fn parse_matrix(src: &str, spec: &PreorderSpec) -> Result<(Field, FiniteMatrix)> {
    let mut lx = lex(src)?;
    let m = parse_matrix_tokens(&mut lx, spec)?;
    lx.end()?;
    Ok(m)
}

/// Several matrix literals in sequence.
pub fn parse_matrices(src: &str, spec: &PreorderSpec) -> Result<Vec<(Field, FiniteMatrix)>> {
    let mut lx = lex(src)?;
    let mut out = Vec::new();
    while *lx.peek() != Tok::End {
        out.push(parse_matrix_tokens(&mut lx, spec)?);
    }
    Ok(out)
}

fn parse_matrix_tokens(lx: &mut Lexer, spec: &PreorderSpec) -> Result<(Field, FiniteMatrix)> {
    let line = lx.line();
    let mut field = None;
    let mut region = IndexSet::empty();
    let mut rows = Vec::new();
    parse_record(lx, "matrix", &["q", "region", "entries"], |key, l| {
        match key {
            "q" => field = Some(parse_field(l)?),
            "region" => region = parse_region_tokens(l, spec)?,
            _ => {
                let f = field.clone().ok_or_else(|| l.error("`q` must come before `entries`"))?;
                rows = parse_rows(l, &f)?;
            }
        }
        Ok(())
    })?;
    let fm = at_line(line, "matrix", FiniteMatrix::new(region, Mat::from_rows(&rows)))?;
    Ok((field.expect("q is required"), fm))
}

pub fn print_index(spec: &PreorderSpec, i: &Index) -> String {
    if spec.is_unit() {
        i.block.to_string()
    } else {
        i.to_string()
    }
}

pub fn print_region(spec: &PreorderSpec, s: &IndexSet) -> String {
    let items: Vec<String> = s.iter().map(|i| print_index(spec, i)).collect();
    format!("[{}]", items.join(", "))
}

fn print_rows(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.n())
        .map(|r| format!("[{}]", m.row(r).iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

pub fn print_element(e: &WindowElement) -> String {
    format!(
        "elem {{ q = {}; scalar = {}; window = {}; core = {} }}",
        e.field().q(),
        e.scalar(),
        print_region(e.preorder(), e.window()),
        print_rows(e.core())
    )
}

pub fn print_matrix(field: &Field, spec: &PreorderSpec, m: &FiniteMatrix) -> String {
    format!(
        "matrix {{ q = {}; region = {}; entries = {} }}",
        field.q(),
        print_region(spec, &m.region),
        print_rows(&m.mat)
    )
}

pub fn print_preorder(spec: &PreorderSpec) -> String {
    let mut out = format!("base = {}\n", spec.base());
    if let Some(s) = spec.sizes() {
        out += &format!("sizes = {s}\n");
    } else {
        let blocks: Vec<String> = spec.pattern().iter().map(BlockSpec::to_string).collect();
        out += &format!("pattern = {}\n", blocks.join(", "));
    }
    for (c, b) in spec.exceptions() {
        out += &format!("exception {c} = {b}\n");
    }
    for p in spec.coarsenings() {
        let parts: Vec<String> = p
            .parts()
            .iter()
            .map(|part| format!("{{ {} }}", part.iter().map(Index::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        out += &format!("coarsen = {}\n", parts.join(" | "));
    }
    out
}

impl fmt::Display for WindowElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_element(self))
    }
}

impl fmt::Display for PreorderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_preorder(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q1: &str = "base = Z\npattern = block(10, full), block(1, full), block(1, full), block(1, full), block(1, full), \
                      block(1, full), block(1, full), block(1, full), block(1, full), block(1, full), block(1, full)\n";

    #[test]
    fn preorder_round_trip() {
        let srcs = [
            Q1.to_string(),
            "base = N\nsizes = semilinear{ finite = {2}; prog = (3,2) }\n".to_string(),
            "base = Z\npattern = block(1, chain)\nexception 2 = block(3, pairs: (0,1);(1,2))\ncoarsen = { 0:0,1:0 } | { 4:0,5:0 }\n"
                .to_string(),
        ];
        for src in srcs {
            let spec = parse_preorder(&src).unwrap();
            let printed = print_preorder(&spec);
            assert_eq!(parse_preorder(&printed).unwrap(), spec);
            assert_eq!(print_preorder(&parse_preorder(&printed).unwrap()), printed);
        }
    }

    #[test]
    fn coarsen_with_integers() {
        let spec = parse_preorder("base = Z\ncoarsen = {0, 1, 2}\n").unwrap();
        assert_eq!(spec.class(&Index::unit(1)).unwrap().len(), 3);
    }

    #[test]
    fn parse_errors_cite_line_and_token() {
        let e = parse_preorder("base = Z\npattern = block(2, wobbly)\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, ref token, .. } if token == "wobbly"), "{e:?}");
        let e = parse_preorder("base = Q\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_preorder("base = Z\n\ncoarsen = {1, 3}\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, ref msg, .. } if msg.contains("not convex")), "{e:?}");
    }

    #[test]
    fn element_round_trip_and_validation() {
        let spec = Arc::new(PreorderSpec::plain(BaseShape::Z));
        let src = "elem { q = 4; scalar = 2; window = [0, 1]; core = [[1,3],[0,2]] }";
        let e = parse_element(src, spec.clone()).unwrap();
        assert_eq!(print_element(&e), src);
        let bad = parse_element("elem { q = 2; scalar = 1; window = [1, 3]; core = [[1,0],[0,1]] }", spec.clone());
        assert!(matches!(bad, Err(Error::Parse { ref msg, .. }) if msg.contains("not strongly convex") && msg.contains("{1:0,3:0}")));
        let sing = parse_element("elem { q = 2; scalar = 1; window = [0, 1]; core = [[1,1],[1,1]] }", spec.clone());
        assert!(matches!(sing, Err(Error::Parse { ref msg, .. }) if msg.contains("singular")));
        let lit = parse_element("elem { q = 2; scalar = 1; window = [0, 1]; core = [[1,2],[0,1]] }", spec);
        assert!(matches!(lit, Err(Error::Parse { ref token, .. }) if token == "2"));
    }

    #[test]
    fn regions_and_indices() {
        let spec = parse_preorder(Q1).unwrap();
        assert_eq!(parse_index("25", &spec).unwrap(), Index::new(11, 5));
        assert_eq!(parse_index("11:5", &spec).unwrap(), Index::new(11, 5));
        assert_eq!(parse_region("10..12", &spec).unwrap().len(), 3);
        assert_eq!(parse_region("[0:0, 0:1]", &spec).unwrap().len(), 2);
        assert!(parse_index("0:10", &spec).is_err());
    }

    #[test]
    fn matrix_literal() {
        let spec = PreorderSpec::plain(BaseShape::Z);
        let (f, m) = parse_matrix("matrix { q = 5; region = 0..1; entries = [[2,0],[0,1]] }", &spec).unwrap();
        assert_eq!(f.q(), 5);
        assert_eq!(print_matrix(&f, &spec, &m), "matrix { q = 5; region = [0, 1]; entries = [[2,0],[0,1]] }");
    }

    #[test]
    fn semilinear_literal_round_trip() {
        let s = parse_semilinear("semilinear{ finite = {1,2}; prog = (3,2);(4,6) }").unwrap();
        assert_eq!(parse_semilinear(&s.to_string()).unwrap(), s);
        let empty = parse_semilinear("semilinear{ finite = {}; prog = }").unwrap();
        assert_eq!(empty, SemilinearSet::empty());
    }
}
