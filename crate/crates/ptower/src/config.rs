//! Job configuration: the key-value document the command-line front end
//! consumes, its parser, and its canonical renderer.
//!
//! A document is a sequence of `key = value` lines. `#` starts a comment
//! that runs to the end of the line; blank lines are ignored. The keys:
//!
//! ```text
//! p = 2                      # the prime
//! precision = 4              # coefficient digits N (arithmetic in Z/p^N)
//! cap = 6                    # degree cap D per stage
//! variables = [x, y]         # distinct identifiers; `p` and `t` reserved
//! ideal = ["p*x", "p*y"]     # generator expressions, quoted
//! mode = torsion_reduced     # torsion_free | torsion_reduced
//! levels = 2                 # tower height
//! sop = ["x + y"]            # optional: parameter system for limcm
//! seed = 0                   # optional: rng seed, default 0
//! ```
//!
//! Generator and parameter expressions support `+ - * ^`, integer
//! coefficients, parentheses, the declared variables, and the reserved
//! symbol `p` for the prime itself. Every expression must denote an exact
//! element of the degree-`cap` window: a product that overflows the cap is
//! rejected rather than silently truncated.
//!
//! [`parse_config`] and [`JobConfig::render`] are mutually inverse on
//! valid configs: rendering and reparsing reproduces the config exactly.

use crate::deltaring::{is_prime, RingPresentation};
use crate::error::{Error, Result};
use crate::fracpoly::FracPoly;
use crate::idealkit::IdealPresentation;
use crate::tower::{TowerMode, TowerSpec};

/// A parsed and validated job description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobConfig {
    pub p: u64,
    pub precision: u32,
    pub cap: u32,
    pub variables: Vec<String>,
    /// Generator expressions, kept verbatim for faithful re-rendering.
    pub ideal: Vec<String>,
    pub mode: TowerMode,
    pub levels: u32,
    /// Optional parameter system for the limcm diagnostic.
    pub sop: Option<Vec<String>>,
    /// Seed for any randomized search; 0 when omitted.
    pub seed: u64,
}

impl JobConfig {
    /// Canonical document form; [`parse_config`] of this string returns
    /// `self` exactly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p = {}\n", self.p));
        out.push_str(&format!("precision = {}\n", self.precision));
        out.push_str(&format!("cap = {}\n", self.cap));
        out.push_str(&format!("variables = [{}]\n", self.variables.join(", ")));
        out.push_str(&format!("ideal = [{}]\n", quote_list(&self.ideal)));
        out.push_str(&format!("mode = {}\n", mode_name(self.mode)));
        out.push_str(&format!("levels = {}\n", self.levels));
        if let Some(sop) = &self.sop {
            out.push_str(&format!("sop = [{}]\n", quote_list(sop)));
        }
        out.push_str(&format!("seed = {}\n", self.seed));
        out
    }

    /// The ideal generators as exact level-0 elements.
    pub fn ideal_polys(&self) -> Result<Vec<FracPoly>> {
        self.ideal
            .iter()
            .map(|s| parse_poly(s, self.p, &self.variables, self.precision, self.cap))
            .collect()
    }

    /// The declared parameter system, parsed at level 0.
    pub fn sop_polys(&self) -> Result<Option<Vec<FracPoly>>> {
        match &self.sop {
            None => Ok(None),
            Some(list) => list
                .iter()
                .map(|s| parse_poly(s, self.p, &self.variables, self.precision, self.cap))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// The base ring presentation. The mode supplies the standing claims:
    /// a torsion-free tower asserts a p-torsion-free base, a reduced tower
    /// only that the base is reduced mod p. Both are re-checked numerically
    /// when a tower is built.
    pub fn ring(&self) -> Result<RingPresentation> {
        let torsion_free = self.mode == TowerMode::TorsionFree;
        RingPresentation::new(
            self.p,
            self.precision,
            self.cap,
            self.variables.clone(),
            self.ideal_polys()?,
            torsion_free,
            true,
        )
    }

    /// The ideal alone, for stability and torsion questions.
    pub fn ideal_presentation(&self) -> Result<IdealPresentation> {
        IdealPresentation::new(
            self.p,
            self.variables.len(),
            self.precision,
            0,
            self.ideal_polys()?,
        )
    }

    /// The tower the config describes.
    pub fn tower(&self) -> Result<TowerSpec> {
        TowerSpec::new(self.ring()?, self.mode, self.levels, self.cap)
    }

    /// The mode keyword as it appears in the document.
    pub fn mode_name(&self) -> &'static str {
        mode_name(self.mode)
    }
}

fn quote_list(items: &[String]) -> String {
    items
        .iter()
        .map(|s| format!("\"{s}\""))
        .collect::<Vec<_>>()
        .join(", ")
}

fn mode_name(mode: TowerMode) -> &'static str {
    match mode {
        TowerMode::TorsionFree => "torsion_free",
        TowerMode::TorsionReduced => "torsion_reduced",
    }
}

/// Raw entry values before validation.
enum RawValue {
    Number(u64),
    Ident(String),
    IdentList(Vec<String>),
    StringList(Vec<(String, u32, u32)>),
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    /// Skips spaces and tabs; stops at newlines.
    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\r')) {
            self.bump();
        }
    }

    /// Skips whitespace, newlines, and comments.
    fn skip_ws_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n') => {
                    self.bump();
                }
                Some(b'#') => {
                    while !matches!(self.peek(), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn ident(&mut self) -> Result<String> {
        let mut name = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                name.push(c as char);
                self.bump();
            }
            _ => return Err(self.err("expected an identifier")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                name.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        Ok(name)
    }

    fn number(&mut self) -> Result<u64> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(self.err("expected a number"));
        }
        let mut value: u64 = 0;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(c - b'0')))
                .ok_or_else(|| self.err("number too large"))?;
            self.bump();
        }
        Ok(value)
    }

    /// A double-quoted single-line string; returns the body with the
    /// position of its first character.
    fn string(&mut self) -> Result<(String, u32, u32)> {
        if self.peek() != Some(b'"') {
            return Err(self.err("expected a quoted expression"));
        }
        self.bump();
        let (line, col) = (self.line, self.col);
        let mut body = String::new();
        loop {
            match self.peek() {
                None | Some(b'\n') => {
                    return Err(self.err("unterminated string"));
                }
                Some(b'"') => {
                    self.bump();
                    return Ok((body, line, col));
                }
                Some(c) => {
                    if !c.is_ascii() || (c.is_ascii_control() && c != b'\t') {
                        return Err(self.err("strings are plain ascii"));
                    }
                    body.push(c as char);
                    self.bump();
                }
            }
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect(b'[')?;
        let mut out = Vec::new();
        self.skip_inline_ws();
        if self.peek() == Some(b']') {
            self.bump();
            return Ok(out);
        }
        loop {
            self.skip_inline_ws();
            out.push(item(self)?);
            self.skip_inline_ws();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                }
                Some(b']') => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `]`")),
            }
        }
    }

    /// After a value: only spaces, a comment, a newline, or the end.
    fn end_of_entry(&mut self) -> Result<()> {
        self.skip_inline_ws();
        match self.peek() {
            None | Some(b'\n') => Ok(()),
            Some(b'#') => {
                while !matches!(self.peek(), None | Some(b'\n')) {
                    self.bump();
                }
                Ok(())
            }
            _ => Err(self.err("expected end of line after the value")),
        }
    }
}

/// Parses and validates a config document.
///
/// Structural problems (bad syntax, unknown or duplicate keys) are
/// reported as parse errors with line and column; violated invariants
/// (composite p, precision below 2, cap below p, reserved or repeated
/// variable names, inexact generators) as validation errors naming the
/// rule.
pub fn parse_config(text: &str) -> Result<JobConfig> {
    let mut sc = Scanner::new(text);
    let mut entries: Vec<(String, RawValue)> = Vec::new();
    loop {
        sc.skip_ws_and_comments();
        if sc.peek().is_none() {
            break;
        }
        let (key_line, key_col) = (sc.line, sc.col);
        let key = sc.ident()?;
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(Error::Parse {
                line: key_line,
                col: key_col,
                msg: format!("duplicate key `{key}`"),
            });
        }
        sc.skip_inline_ws();
        sc.expect(b'=')?;
        sc.skip_inline_ws();
        let value = match key.as_str() {
            "p" | "precision" | "cap" | "levels" | "seed" => RawValue::Number(sc.number()?),
            "mode" => RawValue::Ident(sc.ident()?),
            "variables" => RawValue::IdentList(sc.list(|s| s.ident())?),
            "ideal" | "sop" => RawValue::StringList(sc.list(|s| s.string())?),
            _ => {
                return Err(Error::Parse {
                    line: key_line,
                    col: key_col,
                    msg: format!("unknown key `{key}`"),
                })
            }
        };
        sc.end_of_entry()?;
        entries.push((key, value));
    }
    assemble(entries)
}

fn assemble(entries: Vec<(String, RawValue)>) -> Result<JobConfig> {
    let mut p = None;
    let mut precision = None;
    let mut cap = None;
    let mut levels = None;
    let mut seed = None;
    let mut mode = None;
    let mut variables = None;
    let mut ideal = None;
    let mut sop = None;
    for (key, value) in entries {
        match (key.as_str(), value) {
            ("p", RawValue::Number(n)) => p = Some(n),
            ("precision", RawValue::Number(n)) => precision = Some(n),
            ("cap", RawValue::Number(n)) => cap = Some(n),
            ("levels", RawValue::Number(n)) => levels = Some(n),
            ("seed", RawValue::Number(n)) => seed = Some(n),
            ("mode", RawValue::Ident(m)) => mode = Some(m),
            ("variables", RawValue::IdentList(v)) => variables = Some(v),
            ("ideal", RawValue::StringList(v)) => ideal = Some(v),
            ("sop", RawValue::StringList(v)) => sop = Some(v),
            _ => unreachable!("key/value shapes are paired at scan time"),
        }
    }

    let p = p.ok_or_else(|| missing("p"))?;
    let precision = narrow(precision.ok_or_else(|| missing("precision"))?, "precision")?;
    let cap = narrow(cap.ok_or_else(|| missing("cap"))?, "cap")?;
    let levels = narrow(levels.ok_or_else(|| missing("levels"))?, "levels")?;
    let seed = seed.unwrap_or(0);
    let mode_name = mode.ok_or_else(|| missing("mode"))?;
    let variables = variables.ok_or_else(|| missing("variables"))?;
    let ideal_raw = ideal.ok_or_else(|| missing("ideal"))?;

    let mode = match mode_name.as_str() {
        "torsion_free" => TowerMode::TorsionFree,
        "torsion_reduced" => TowerMode::TorsionReduced,
        other => {
            return Err(Error::Validation(format!(
                "mode must be torsion_free or torsion_reduced, not `{other}`"
            )))
        }
    };

    if !is_prime(p) {
        return Err(Error::Validation(format!("p = {p} is not prime")));
    }
    if precision < 2 {
        return Err(Error::Validation(format!(
            "precision must be at least 2, got {precision}"
        )));
    }
    if u64::from(cap) < p {
        return Err(Error::Validation(format!(
            "cap must be at least p = {p}, got {cap}"
        )));
    }
    if variables.is_empty() {
        return Err(Error::Validation("at least one variable is required".into()));
    }
    for (i, name) in variables.iter().enumerate() {
        if name == "p" || name == "t" {
            return Err(Error::Validation(format!(
                "`{name}` is reserved (the prime and the tilt uniformizer)"
            )));
        }
        if variables[..i].contains(name) {
            return Err(Error::Validation(format!("variable `{name}` is repeated")));
        }
    }
    if let Some(list) = &sop {
        if list.is_empty() {
            return Err(Error::Validation(
                "sop, when given, must list at least one parameter".into(),
            ));
        }
    }

    // Every expression must parse and fit the window exactly; errors are
    // reported at the document position of the offending character.
    for (body, line, col) in ideal_raw.iter().chain(sop.iter().flatten()) {
        let poly = parse_poly_at(body, *line, *col, p, &variables, precision, cap)?;
        if poly.is_truncated() {
            return Err(Error::Validation(format!(
                "expression `{body}` overflows the degree cap {cap}"
            )));
        }
    }

    Ok(JobConfig {
        p,
        precision,
        cap,
        variables,
        ideal: ideal_raw.into_iter().map(|(s, _, _)| s).collect(),
        mode,
        levels,
        sop: sop.map(|v| v.into_iter().map(|(s, _, _)| s).collect()),
        seed,
    })
}

fn missing(key: &str) -> Error {
    Error::Validation(format!("missing required key `{key}`"))
}

fn narrow(n: u64, key: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Validation(format!("{key} = {n} is out of range")))
}

/// Parses one polynomial expression over the declared variables at level 0.
///
/// Grammar, loosest binding first: `+ -` (with leading sign), `*`, `^`
/// with an unsigned integer exponent; atoms are integer coefficients, the
/// declared variables, the prime symbol `p`, and parenthesized
/// subexpressions.
pub fn parse_poly(
    src: &str,
    p: u64,
    variables: &[String],
    prec: u32,
    cap: u32,
) -> Result<FracPoly> {
    parse_poly_at(src, 1, 1, p, variables, prec, cap)
}

fn parse_poly_at(
    src: &str,
    line: u32,
    col: u32,
    p: u64,
    variables: &[String],
    prec: u32,
    cap: u32,
) -> Result<FracPoly> {
    let mut pp = PolyParser {
        src: src.as_bytes(),
        pos: 0,
        line,
        col,
        p,
        prec,
        cap,
        variables,
    };
    pp.skip_ws();
    let value = pp.expr()?;
    pp.skip_ws();
    if pp.peek().is_some() {
        return Err(pp.err("unexpected trailing input"));
    }
    Ok(value)
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    p: u64,
    prec: u32,
    cap: u32,
    variables: &'a [String],
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        self.col += 1;
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.bump();
        }
    }

    fn expr(&mut self) -> Result<FracPoly> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    self.skip_ws();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    self.skip_ws();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FracPoly> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.bump();
                self.skip_ws();
                acc = acc.mul(&self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FracPoly> {
        if self.peek() == Some(b'-') {
            self.bump();
            self.skip_ws();
            return Ok(self.unary()?.mul_scalar(-1));
        }
        self.power()
    }

    fn power(&mut self) -> Result<FracPoly> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            self.skip_ws();
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(self.err("expected an unsigned integer exponent"));
        }
        let mut value: u32 = 0;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(c - b'0')))
                .ok_or_else(|| self.err("exponent too large"))?;
            self.bump();
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<FracPoly> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                self.skip_ws();
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let mut value: i128 = 0;
                while let Some(c) = self.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(i128::from(c - b'0')))
                        .ok_or_else(|| self.err("coefficient too large"))?;
                    self.bump();
                }
                Ok(FracPoly::constant(
                    value,
                    self.p,
                    self.variables.len(),
                    self.prec,
                    self.cap,
                ))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start_col = self.col;
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        name.push(c as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name == "p" {
                    return Ok(FracPoly::constant(
                        self.p as i128,
                        self.p,
                        self.variables.len(),
                        self.prec,
                        self.cap,
                    ));
                }
                match self.variables.iter().position(|v| *v == name) {
                    Some(j) => Ok(FracPoly::variable(
                        j,
                        self.p,
                        self.variables.len(),
                        self.prec,
                        self.cap,
                    )),
                    None => Err(Error::Parse {
                        line: self.line,
                        col: start_col,
                        msg: format!(
                            "unknown symbol `{name}`; declared variables are [{}] and `p`",
                            self.variables.join(", ")
                        ),
                    }),
                }
            }
            _ => Err(self.err("expected a coefficient, variable, or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANE_PAIR: &str = "\
# two planes meeting at the origin
p = 2
precision = 3
cap = 6
variables = [x, y, z, w]
ideal = [\"x*z\", \"x*w\", \"y*z\", \"y*w\"]
mode = torsion_free
levels = 2
sop = [\"x + z\", \"y + w\"]
seed = 0
";

    #[test]
    fn documents_round_trip_through_render() {
        let cfg = parse_config(PLANE_PAIR).unwrap();
        assert_eq!(cfg.p, 2);
        assert_eq!(cfg.variables, vec!["x", "y", "z", "w"]);
        assert_eq!(cfg.sop.as_deref().unwrap().len(), 2);
        let again = parse_config(&cfg.render()).unwrap();
        assert_eq!(cfg, again);

        let minimal = "p = 3\nprecision = 2\ncap = 3\nvariables = [u]\nideal = []\nmode = torsion_free\nlevels = 1\n";
        let cfg = parse_config(minimal).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.sop, None);
        assert_eq!(parse_config(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn expressions_evaluate_with_the_usual_precedence() {
        let vars: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let parse = |s: &str| parse_poly(s, 2, &vars, 4, 8).unwrap();
        let names = ["x", "y"];
        assert_eq!(parse("x + 2*y").render(&names), "x + 2 * y");
        assert_eq!(parse("x*y^2").render(&names), "x * y^2");
        assert_eq!(parse("(x + y)^2").render(&names), "x^2 + 2 * x * y + y^2");
        assert_eq!(parse("-x + x").render(&names), "0");
        assert_eq!(parse("p*x").render(&names), "2 * x");
        assert_eq!(parse("p^2").render(&names), "4");
        assert_eq!(parse("x - -y").render(&names), "x + y");
    }

    #[test]
    fn parse_errors_carry_document_positions() {
        let bad = "p = 2\nprecision = 4\ncap = 4\nvariables = [x]\nideal = [\"x + q\"]\nmode = torsion_free\nlevels = 1\n";
        match parse_config(bad) {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!(line, 5);
                assert_eq!(col, 15);
                assert!(msg.contains("unknown symbol `q`"), "{msg}");
            }
            other => panic!("expected a positioned parse error, got {other:?}"),
        }

        match parse_config("p = 2\np = 3\n") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("duplicate key"), "{msg}");
            }
            other => panic!("expected a duplicate-key error, got {other:?}"),
        }

        match parse_config("frobnicate = 7\n") {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("unknown key"), "{msg}"),
            other => panic!("expected an unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn invariants_are_named_in_validation_errors() {
        let template = |p: &str, prec: &str, cap: &str, vars: &str| {
            format!(
                "p = {p}\nprecision = {prec}\ncap = {cap}\nvariables = [{vars}]\nideal = []\nmode = torsion_free\nlevels = 1\n"
            )
        };
        let expect = |doc: String, needle: &str| match parse_config(&doc) {
            Err(Error::Validation(msg)) => assert!(msg.contains(needle), "{msg}"),
            other => panic!("expected validation error about {needle}, got {other:?}"),
        };
        expect(template("4", "3", "4", "x"), "not prime");
        expect(template("2", "1", "4", "x"), "precision");
        expect(template("5", "3", "4", "x"), "cap must be at least p");
        expect(template("2", "3", "4", "x, x"), "repeated");
        expect(template("2", "3", "4", "x, t"), "reserved");
        expect(
            "p = 2\nprecision = 3\ncap = 4\nvariables = [x]\nideal = []\nmode = sideways\nlevels = 1\n".to_string(),
            "mode",
        );
        expect(
            "precision = 3\ncap = 4\nvariables = [x]\nideal = []\nmode = torsion_free\nlevels = 1\n".to_string(),
            "missing required key `p`",
        );
        expect(
            "p = 2\nprecision = 3\ncap = 4\nvariables = [x]\nideal = [\"x^5\"]\nmode = torsion_free\nlevels = 1\n".to_string(),
            "overflows the degree cap",
        );
    }

    #[test]
    fn the_reduced_example_config_builds_its_tower() {
        let doc = "p = 2\nprecision = 4\ncap = 4\nvariables = [x, y]\nideal = [\"p*x\", \"p*y\"]\nmode = torsion_reduced\nlevels = 2\n";
        let cfg = parse_config(doc).unwrap();
        let tower = cfg.tower().unwrap();
        assert_eq!(tower.levels(), 2);
        let names = ["x", "y"];
        let gens = cfg.ideal_polys().unwrap();
        assert_eq!(gens[0].render(&names), "2 * x");
    }
}
