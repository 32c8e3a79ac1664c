//! Line-oriented rule-file parser.
//!
//! ```text
//! tiles: a b
//! lengths: W V
//! init: W=1 V=1
//! recurrence: W -> W + V ; V -> 3W
//! size a: W W
//! size b: V W
//! rule a:
//!   a at (0, 0)
//!   b at (W, 0)
//! rule b:
//!   a at (0, 0)
//! involution: swap-axes a=b b=a
//! ```
//!
//! Placement expressions are integer linear combinations of length symbols
//! plus a constant, evaluated with the symbol values of the child level.

use std::fmt;

use thiserror::Error;

use super::rule::{FusionRule, Involution, LengthSymbol, LinearExpr, Placement, TileLabel};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownLabel(String),
    UnknownSymbol(String),
    DuplicateLabel(String),
    DuplicateSymbol(String),
    MalformedExpression(String),
    Missing(String),
    Invalid(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Syntax(m) => write!(f, "syntax error: {m}"),
            Self::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            Self::UnknownSymbol(s) => write!(f, "unknown length symbol `{s}`"),
            Self::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            Self::DuplicateSymbol(s) => write!(f, "duplicate length symbol `{s}`"),
            Self::MalformedExpression(m) => write!(f, "malformed expression: {m}"),
            Self::Missing(m) => write!(f, "missing {m}"),
            Self::Invalid(m) => write!(f, "{m}"),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str, pos: usize) -> Self {
        Self { line, text, pos }
    }

    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn err<T>(&self, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError { line: self.line, column: self.column(), kind })
    }

    fn err_at<T>(&self, pos: usize, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError { line: self.line, column: self.text[..pos].chars().count() + 1, kind })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(ParseErrorKind::Syntax(format!("expected `{c}`")))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    /// Identifier: a letter or `_` followed by letters, digits, `_` or `'`.
    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let mut chars = self.rest().char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let len = chars
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\''))
            .map(|(i, _)| i)
            .unwrap_or(self.rest().len());
        self.pos += len;
        Some((start, &self.text[start..start + len]))
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(usize, &'a str)> {
        match self.ident() {
            Some(id) => Ok(id),
            None => self.err(ParseErrorKind::Syntax(format!("expected {what}"))),
        }
    }

    fn integer(&mut self) -> Option<PResult<i64>> {
        self.skip_ws();
        let digits = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return None;
        }
        let start = self.pos;
        self.pos += digits;
        Some(self.text[start..self.pos].parse().or_else(|_| {
            self.err_at(start, ParseErrorKind::MalformedExpression("integer too large".into()))
        }))
    }
}

#[derive(Default)]
struct Builder {
    labels: Option<Vec<TileLabel>>,
    symbols: Option<Vec<String>>,
    inits: Vec<Option<u64>>,
    recurrences: Vec<Option<LinearExpr>>,
    sizes: Vec<Option<(usize, usize)>>,
    children: Vec<Option<Vec<Placement>>>,
    involution: Option<Involution>,
}

impl Builder {
    fn labels(&self, cur: &Cursor) -> PResult<&[TileLabel]> {
        match &self.labels {
            Some(l) => Ok(l),
            None => cur.err(ParseErrorKind::Missing("`tiles:` declaration before use".into())),
        }
    }

    fn symbols(&self, cur: &Cursor) -> PResult<&[String]> {
        match &self.symbols {
            Some(s) => Ok(s),
            None => cur.err(ParseErrorKind::Missing("`lengths:` declaration before use".into())),
        }
    }

    fn label(&self, cur: &mut Cursor) -> PResult<usize> {
        let (pos, name) = cur.expect_ident("a tile label")?;
        self.labels(cur)?
            .iter()
            .position(|l| l.0 == name)
            .map_or_else(|| cur.err_at(pos, ParseErrorKind::UnknownLabel(name.into())), Ok)
    }

    fn symbol(&self, cur: &mut Cursor) -> PResult<usize> {
        let (pos, name) = cur.expect_ident("a length symbol")?;
        self.symbols(cur)?
            .iter()
            .position(|s| s == name)
            .map_or_else(|| cur.err_at(pos, ParseErrorKind::UnknownSymbol(name.into())), Ok)
    }

    /// Parses a linear combination up to (not including) one of `stops`.
    fn expr(&self, cur: &mut Cursor, stops: &[char]) -> PResult<LinearExpr> {
        let symbols = self.symbols(cur)?;
        let mut expr = LinearExpr::zero(symbols.len());
        let mut first = true;
        loop {
            match cur.peek() {
                None => break,
                Some(c) if stops.contains(&c) => break,
                _ => {}
            }
            let term_pos = cur.pos;
            let sign = if cur.eat('-') {
                -1
            } else if cur.eat('+') || first {
                1
            } else {
                return cur.err(ParseErrorKind::MalformedExpression(
                    "expected `+` or `-` between terms".into(),
                ));
            };
            first = false;
            let coeff = match cur.integer() {
                Some(n) => {
                    let n = n?;
                    cur.eat('*');
                    Some(n)
                }
                None => None,
            };
            let symbol = match cur.peek() {
                Some(c) if c.is_alphabetic() || c == '_' => Some(self.symbol(cur)?),
                _ => None,
            };
            match (coeff, symbol) {
                (None, None) => {
                    return cur.err(ParseErrorKind::MalformedExpression(
                        "expected a number or a length symbol".into(),
                    ))
                }
                (c, Some(s)) => expr.coeffs[s] += sign * c.unwrap_or(1),
                (Some(c), None) => expr.constant += sign * c,
            }
            if cur.pos == term_pos {
                return cur.err(ParseErrorKind::MalformedExpression("empty term".into()));
            }
        }
        if first {
            return cur.err(ParseErrorKind::MalformedExpression("empty expression".into()));
        }
        Ok(expr)
    }

    fn name_list(cur: &mut Cursor, what: &str) -> PResult<Vec<(usize, String)>> {
        let mut names: Vec<(usize, String)> = Vec::new();
        while !cur.at_end() {
            let (pos, name) = cur.expect_ident(what)?;
            names.push((pos, name.to_string()));
        }
        if names.is_empty() {
            return cur.err(ParseErrorKind::Missing(format!("at least one {what}")));
        }
        Ok(names)
    }

    fn tiles(&mut self, cur: &mut Cursor) -> PResult<()> {
        if self.labels.is_some() {
            return cur.err(ParseErrorKind::Syntax("`tiles:` declared twice".into()));
        }
        let names = Self::name_list(cur, "tile label")?;
        let mut labels: Vec<TileLabel> = Vec::new();
        for (pos, name) in names {
            if labels.iter().any(|l| l.0 == name) {
                return cur.err_at(pos, ParseErrorKind::DuplicateLabel(name));
            }
            labels.push(TileLabel(name));
        }
        let n = labels.len();
        self.labels = Some(labels);
        self.sizes = vec![None; n];
        self.children = vec![None; n];
        Ok(())
    }

    fn lengths(&mut self, cur: &mut Cursor) -> PResult<()> {
        if self.symbols.is_some() {
            return cur.err(ParseErrorKind::Syntax("`lengths:` declared twice".into()));
        }
        let names = Self::name_list(cur, "length symbol")?;
        let mut symbols: Vec<String> = Vec::new();
        for (pos, name) in names {
            if symbols.contains(&name) {
                return cur.err_at(pos, ParseErrorKind::DuplicateSymbol(name));
            }
            symbols.push(name);
        }
        self.inits = vec![None; symbols.len()];
        self.recurrences = vec![None; symbols.len()];
        self.symbols = Some(symbols);
        Ok(())
    }

    fn init(&mut self, cur: &mut Cursor) -> PResult<()> {
        while !cur.at_end() {
            let pos = cur.pos;
            let s = self.symbol(cur)?;
            cur.expect('=')?;
            let value_pos = cur.pos;
            let value = match cur.integer() {
                Some(v) => v?,
                None => return cur.err(ParseErrorKind::Syntax("expected an integer".into())),
            };
            if value < 1 {
                return cur.err_at(
                    value_pos,
                    ParseErrorKind::Invalid("initial lengths must be at least 1".into()),
                );
            }
            if self.inits[s].replace(value as u64).is_some() {
                let name = self.symbols(cur)?[s].clone();
                return cur.err_at(pos, ParseErrorKind::DuplicateSymbol(name));
            }
        }
        Ok(())
    }

    fn recurrence(&mut self, cur: &mut Cursor) -> PResult<()> {
        loop {
            let pos = cur.pos;
            let s = self.symbol(cur)?;
            if !cur.eat_str("->") {
                return cur.err(ParseErrorKind::Syntax("expected `->`".into()));
            }
            let expr_pos = cur.pos;
            let expr = self.expr(cur, &[';'])?;
            if expr.constant != 0 {
                return cur.err_at(
                    expr_pos,
                    ParseErrorKind::Invalid("recurrences may not contain constants".into()),
                );
            }
            if expr.coeffs.iter().any(|&c| c < 0) || expr.coeffs.iter().all(|&c| c == 0) {
                return cur.err_at(
                    expr_pos,
                    ParseErrorKind::Invalid(
                        "recurrence coefficients must be nonnegative and not all zero".into(),
                    ),
                );
            }
            if self.recurrences[s].replace(expr).is_some() {
                let name = self.symbols(cur)?[s].clone();
                return cur.err_at(pos, ParseErrorKind::DuplicateSymbol(name));
            }
            if !cur.eat(';') {
                break;
            }
        }
        if !cur.at_end() {
            return cur.err(ParseErrorKind::Syntax("unexpected trailing input".into()));
        }
        Ok(())
    }

    fn size(&mut self, cur: &mut Cursor) -> PResult<()> {
        let label_pos = cur.pos;
        let label = self.label(cur)?;
        cur.expect(':')?;
        let w = self.symbol(cur)?;
        let h = self.symbol(cur)?;
        if !cur.at_end() {
            return cur.err(ParseErrorKind::Syntax("unexpected trailing input".into()));
        }
        if self.sizes[label].replace((w, h)).is_some() {
            return cur.err_at(
                label_pos,
                ParseErrorKind::Invalid(format!("size of `{}` declared twice", self.label_name(label))),
            );
        }
        Ok(())
    }

    fn label_name(&self, i: usize) -> &str {
        &self.labels.as_ref().expect("labels declared")[i].0
    }

    fn placement(&self, cur: &mut Cursor) -> PResult<Placement> {
        let label = self.label(cur)?;
        if !cur.eat_str("at") {
            return cur.err(ParseErrorKind::Syntax("expected `at`".into()));
        }
        cur.expect('(')?;
        let x = self.expr(cur, &[','])?;
        cur.expect(',')?;
        let y = self.expr(cur, &[')'])?;
        cur.expect(')')?;
        if !cur.at_end() {
            return cur.err(ParseErrorKind::Syntax("unexpected trailing input".into()));
        }
        Ok(Placement { label, x, y })
    }

    fn involution(&mut self, cur: &mut Cursor) -> PResult<()> {
        if self.involution.is_some() {
            return cur.err(ParseErrorKind::Syntax("`involution:` declared twice".into()));
        }
        let n = self.labels(cur)?.len();
        let swap_axes = cur.eat_str("swap-axes");
        let mut perm: Vec<Option<usize>> = vec![None; n];
        while !cur.at_end() {
            let pos = cur.pos;
            let from = self.label(cur)?;
            cur.expect('=')?;
            let to = self.label(cur)?;
            if perm[from].replace(to).is_some() {
                return cur.err_at(
                    pos,
                    ParseErrorKind::Invalid(format!(
                        "involution maps `{}` twice",
                        self.label_name(from)
                    )),
                );
            }
        }
        let perm: Vec<usize> = perm.iter().enumerate().map(|(i, p)| p.unwrap_or(i)).collect();
        if let Some(i) = (0..n).find(|&i| perm[perm[i]] != i) {
            return cur.err(ParseErrorKind::Invalid(format!(
                "involution applied twice moves `{}`",
                self.label_name(i)
            )));
        }
        self.involution = Some(Involution { swap_axes, perm });
        Ok(())
    }

    fn finish(self, last_line: usize) -> PResult<FusionRule> {
        let missing = |what: String| ParseError {
            line: last_line,
            column: 1,
            kind: ParseErrorKind::Missing(what),
        };
        let labels = self.labels.ok_or_else(|| missing("`tiles:` declaration".into()))?;
        let symbols = self.symbols.ok_or_else(|| missing("`lengths:` declaration".into()))?;
        let mut lengths = Vec::with_capacity(symbols.len());
        for ((name, init), rec) in symbols.into_iter().zip(self.inits).zip(self.recurrences) {
            let init = init.ok_or_else(|| missing(format!("initial value for `{name}`")))?;
            let recurrence = rec.ok_or_else(|| missing(format!("recurrence for `{name}`")))?;
            lengths.push(LengthSymbol { name, init, recurrence });
        }
        let mut sizes = Vec::with_capacity(labels.len());
        let mut children = Vec::with_capacity(labels.len());
        for ((label, size), kids) in labels.iter().zip(self.sizes).zip(self.children) {
            sizes.push(size.ok_or_else(|| missing(format!("size for `{label}`")))?);
            children.push(kids.ok_or_else(|| missing(format!("rule for `{label}`")))?);
        }
        if let Some(inv) = &self.involution {
            if inv.swap_axes {
                for (i, &(w, h)) in sizes.iter().enumerate() {
                    let (iw, ih) = sizes[inv.perm[i]];
                    if (iw, ih) != (h, w) {
                        return Err(ParseError {
                            line: last_line,
                            column: 1,
                            kind: ParseErrorKind::Invalid(format!(
                                "involution image of `{}` does not have transposed size",
                                labels[i]
                            )),
                        });
                    }
                }
            }
        }
        Ok(FusionRule { labels, lengths, sizes, children, involution: self.involution })
    }
}

/// Parses a rule file. Errors carry 1-based line and column numbers.
pub fn parse_rule(text: &str) -> Result<FusionRule, ParseError> {
    let mut b = Builder::default();
    let mut open_rule: Option<(usize, Vec<Placement>)> = None;
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indented = content.starts_with([' ', '\t']);
        let mut cur = Cursor::new(line_no, content, 0);

        if indented {
            match open_rule.as_mut() {
                Some((_, kids)) => {
                    let p = b.placement(&mut cur)?;
                    kids.push(p);
                    continue;
                }
                None => {
                    cur.skip_ws();
                    return cur.err(ParseErrorKind::Syntax(
                        "indented line outside of a `rule` block".into(),
                    ));
                }
            }
        }
        if let Some((label, kids)) = open_rule.take() {
            close_rule(&mut b, label, kids, line_no)?;
        }

        let (kw_pos, keyword) = cur.expect_ident("a declaration keyword")?;
        match keyword {
            "tiles" => {
                cur.expect(':')?;
                b.tiles(&mut cur)?;
            }
            "lengths" => {
                cur.expect(':')?;
                b.lengths(&mut cur)?;
            }
            "init" => {
                cur.expect(':')?;
                b.init(&mut cur)?;
            }
            "recurrence" => {
                cur.expect(':')?;
                b.recurrence(&mut cur)?;
            }
            "involution" => {
                cur.expect(':')?;
                b.involution(&mut cur)?;
            }
            "size" => b.size(&mut cur)?,
            "rule" => {
                let label_pos = cur.pos;
                let label = b.label(&mut cur)?;
                cur.expect(':')?;
                if !cur.at_end() {
                    return cur.err(ParseErrorKind::Syntax("unexpected trailing input".into()));
                }
                if b.children[label].is_some() {
                    return cur.err_at(
                        label_pos,
                        ParseErrorKind::Invalid(format!(
                            "rule for `{}` declared twice",
                            b.label_name(label)
                        )),
                    );
                }
                open_rule = Some((label, Vec::new()));
            }
            other => {
                return cur.err_at(
                    kw_pos,
                    ParseErrorKind::Syntax(format!("unknown declaration `{other}`")),
                )
            }
        }
    }
    if let Some((label, kids)) = open_rule.take() {
        close_rule(&mut b, label, kids, last_line)?;
    }
    b.finish(last_line)
}

fn close_rule(b: &mut Builder, label: usize, kids: Vec<Placement>, line: usize) -> PResult<()> {
    if kids.is_empty() {
        return Err(ParseError {
            line,
            column: 1,
            kind: ParseErrorKind::Missing(format!("children for rule `{}`", b.label_name(label))),
        });
    }
    b.children[label] = Some(kids);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "tiles: a b\nlengths: W V\ninit: W=1 V=1\nrecurrence: W -> W + V ; V -> W\nsize a: W W\nsize b: V W\n";

    #[test]
    fn trivial_single_label_rule() {
        let rule = parse_rule(
            "tiles: a\nlengths: L\ninit: L=1\nrecurrence: L -> L\nsize a: L L\nrule a:\n  a at (0,0)\n",
        )
        .unwrap();
        assert_eq!(rule.labels.len(), 1);
        assert_eq!(rule.children[0].len(), 1);
    }

    #[test]
    fn undeclared_label_reports_line_and_name() {
        let text = format!("{HEADER}rule a:\n  a at (0, 0)\n  e at (W, 0)\nrule b:\n  a at (0,0)\n");
        let err = parse_rule(&text).unwrap_err();
        assert_eq!(err.line, 9);
        assert_eq!(err.column, 3);
        assert_eq!(err.kind, ParseErrorKind::UnknownLabel("e".into()));
        assert!(err.to_string().contains("`e`"));
    }

    #[test]
    fn duplicate_label() {
        let err = parse_rule("tiles: a b a\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateLabel("a".into()));
        assert_eq!((err.line, err.column), (1, 12));
    }

    #[test]
    fn malformed_expressions() {
        for bad in ["(W V, 0)", "(W +, 0)", "(, 0)", "(W + 2X, 0)"] {
            let text = format!("{HEADER}rule a:\n  a at {bad}\n");
            let err = parse_rule(&text).unwrap_err();
            assert_eq!(err.line, 8, "{bad}: {err}");
            assert!(
                matches!(
                    err.kind,
                    ParseErrorKind::MalformedExpression(_) | ParseErrorKind::UnknownSymbol(_)
                ),
                "{bad}: {err}"
            );
        }
    }

    #[test]
    fn expression_forms() {
        let text = format!(
            "{HEADER}rule a:\n  a at (3*W - V + 2, -1)\n  b at (2 V, W+W)\nrule b:\n  a at (0, 0)\n"
        );
        let rule = parse_rule(&text).unwrap();
        let p = &rule.children[0];
        assert_eq!(p[0].x, LinearExpr { constant: 2, coeffs: vec![3, -1] });
        assert_eq!(p[0].y, LinearExpr { constant: -1, coeffs: vec![0, 0] });
        assert_eq!(p[1].x.coeffs, vec![0, 2]);
        assert_eq!(p[1].y.coeffs, vec![2, 0]);
    }

    #[test]
    fn missing_pieces_are_reported() {
        let err = parse_rule(HEADER).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Missing(ref m) if m.contains("rule for `a`")));
        let err = parse_rule("tiles: a\nlengths: L\nrecurrence: L -> L\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Missing(ref m) if m.contains("initial value")));
    }

    #[test]
    fn bad_recurrences() {
        let err = parse_rule("tiles: a\nlengths: L\ninit: L=1\nrecurrence: L -> L - L\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Invalid(_)));
        let err = parse_rule("tiles: a\nlengths: L\ninit: L=0\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Invalid(_)));
    }

    #[test]
    fn involution_must_be_involutive() {
        let text = "tiles: a b c\nlengths: L\ninit: L=1\nrecurrence: L -> L\nsize a: L L\nsize b: L L\nsize c: L L\n\
             rule a:\n  a at (0,0)\nrule b:\n  b at (0,0)\nrule c:\n  c at (0,0)\ninvolution: a=b b=c c=a\n";
        let err = parse_rule(text).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Invalid(ref m) if m.contains("applied twice")));
    }

    #[test]
    fn stray_indentation() {
        let err = parse_rule("tiles: a\n  a at (0, 0)\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }
}
