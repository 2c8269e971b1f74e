//! Hat-free expressions over the observed distribution.
//!
//! Variables are node names with a prime count, so `x'` is a summation copy
//! of `x`. Binding is lexical: a [`Estimand::Marginalize`] binds its
//! variables inside its body.
//!
//! The plain text form round-trips through [`parse_plain`]:
//!
//! ```text
//! expr    := "sum_" vars expr | product
//! product := factor+
//! factor  := "P(" list ["|" list] ")" | "[" expr ["/" expr] "]" | "1"
//! vars    := var | "{" list "}"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{is_valid_name, NodeId};

/// A node name plus a prime count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub node: NodeId,
    pub primes: u8,
}

impl Var {
    pub fn plain(node: NodeId) -> Self {
        Var { node, primes: 0 }
    }

    pub fn primed(node: NodeId, primes: u8) -> Self {
        Var { node, primes }
    }
}

impl From<&str> for Var {
    /// Parses `x''` style names; panics on malformed input.
    fn from(s: &str) -> Self {
        let name = s.trim_end_matches('\'');
        Var {
            node: NodeId::from(name),
            primes: (s.len() - name.len()) as u8,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.node)?;
        for _ in 0..self.primes {
            f.write_str("'")?;
        }
        Ok(())
    }
}

/// Expression tree. An empty [`Estimand::Product`] is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Estimand {
    /// `P(target | given)` of the observed joint.
    ObservedConditional { target: Vec<Var>, given: Vec<Var> },
    Product(Vec<Estimand>),
    Marginalize { vars: Vec<Var>, body: Box<Estimand> },
    /// Pointwise quotient; renders as `[ num / den ]`.
    Ratio {
        numerator: Box<Estimand>,
        denominator: Box<Estimand>,
    },
}

impl Estimand {
    pub fn one() -> Self {
        Estimand::Product(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Estimand::Product(f) if f.is_empty())
    }

    pub fn prob(target: Vec<Var>, given: Vec<Var>) -> Self {
        Estimand::ObservedConditional { target, given }
    }

    pub fn marginal(target: Vec<Var>) -> Self {
        Estimand::ObservedConditional { target, given: Vec::new() }
    }

    /// Flattens nested products and drops unit factors; a single factor is
    /// returned as is.
    pub fn product(factors: Vec<Estimand>) -> Self {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                Estimand::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one factor")
        } else {
            Estimand::Product(flat)
        }
    }

    /// Sums `vars` out of `body`; summing over nothing returns `body`.
    pub fn marginalize(vars: Vec<Var>, body: Estimand) -> Self {
        if vars.is_empty() {
            body
        } else {
            Estimand::Marginalize { vars, body: Box::new(body) }
        }
    }

    pub fn ratio(numerator: Estimand, denominator: Estimand) -> Self {
        Estimand::Ratio {
            numerator: Box::new(numerator),
            denominator: Box::new(denominator),
        }
    }

    /// Variables not bound by an enclosing `Marginalize`.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Estimand::ObservedConditional { target, given } => {
                target.iter().chain(given).cloned().collect()
            }
            Estimand::Product(fs) => fs.iter().flat_map(|f| f.free_vars()).collect(),
            Estimand::Marginalize { vars, body } => {
                let mut free = body.free_vars();
                for v in vars {
                    free.remove(v);
                }
                free
            }
            Estimand::Ratio { numerator, denominator } => {
                let mut free = numerator.free_vars();
                free.extend(denominator.free_vars());
                free
            }
        }
    }

    /// Every variable mentioned anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        match self {
            Estimand::ObservedConditional { target, given } => {
                target.iter().chain(given).cloned().collect()
            }
            Estimand::Product(fs) => fs.iter().flat_map(|f| f.all_vars()).collect(),
            Estimand::Marginalize { vars, body } => {
                let mut all = body.all_vars();
                all.extend(vars.iter().cloned());
                all
            }
            Estimand::Ratio { numerator, denominator } => {
                let mut all = numerator.all_vars();
                all.extend(denominator.all_vars());
                all
            }
        }
    }

    /// Replaces free occurrences of `from` by `to`.
    pub fn substitute(&self, from: &Var, to: &Var) -> Estimand {
        let swap = |vs: &[Var]| -> Vec<Var> {
            vs.iter().map(|v| if v == from { to.clone() } else { v.clone() }).collect()
        };
        match self {
            Estimand::ObservedConditional { target, given } => Estimand::ObservedConditional {
                target: swap(target),
                given: swap(given),
            },
            Estimand::Product(fs) => Estimand::Product(fs.iter().map(|f| f.substitute(from, to)).collect()),
            Estimand::Marginalize { vars, body } => {
                if vars.contains(from) {
                    self.clone()
                } else {
                    Estimand::Marginalize { vars: vars.clone(), body: Box::new(body.substitute(from, to)) }
                }
            }
            Estimand::Ratio { numerator, denominator } => Estimand::Ratio {
                numerator: Box::new(numerator.substitute(from, to)),
                denominator: Box::new(denominator.substitute(from, to)),
            },
        }
    }

    /// Primes every bound variable that collides with `reserved`, picking
    /// the fewest primes that clash with nothing free in the body.
    pub fn prime_bound(&self, reserved: &BTreeSet<Var>) -> Estimand {
        match self {
            Estimand::ObservedConditional { .. } => self.clone(),
            Estimand::Product(fs) => Estimand::Product(fs.iter().map(|f| f.prime_bound(reserved)).collect()),
            Estimand::Ratio { numerator, denominator } => Estimand::Ratio {
                numerator: Box::new(numerator.prime_bound(reserved)),
                denominator: Box::new(denominator.prime_bound(reserved)),
            },
            Estimand::Marginalize { vars, body } => {
                let mut body = (**body).clone();
                let mut renamed = Vec::with_capacity(vars.len());
                for v in vars {
                    if reserved.contains(v) {
                        let taken = body.all_vars();
                        let mut fresh = v.clone();
                        loop {
                            fresh.primes += 1;
                            if !taken.contains(&fresh) && !reserved.contains(&fresh) && !vars.contains(&fresh) {
                                break;
                            }
                        }
                        body = body.substitute(v, &fresh);
                        renamed.push(fresh);
                    } else {
                        renamed.push(v.clone());
                    }
                }
                Estimand::Marginalize { vars: renamed, body: Box::new(body.prime_bound(reserved)) }
            }
        }
    }

    /// Order-insensitive normal form: sorted variable lists and product
    /// factors. Two estimands are structurally equal iff their canonical
    /// forms are equal.
    pub fn canonical(&self) -> Estimand {
        match self {
            Estimand::ObservedConditional { target, given } => {
                let mut target = target.clone();
                let mut given = given.clone();
                target.sort();
                given.sort();
                Estimand::ObservedConditional { target, given }
            }
            Estimand::Product(fs) => {
                let mut fs: Vec<Estimand> = fs.iter().map(Estimand::canonical).collect();
                fs.sort_by_cached_key(Estimand::plain);
                Estimand::Product(fs)
            }
            Estimand::Marginalize { vars, body } => {
                let mut vars = vars.clone();
                vars.sort();
                Estimand::Marginalize { vars, body: Box::new(body.canonical()) }
            }
            Estimand::Ratio { numerator, denominator } => Estimand::Ratio {
                numerator: Box::new(numerator.canonical()),
                denominator: Box::new(denominator.canonical()),
            },
        }
    }

    pub fn structurally_eq(&self, other: &Estimand) -> bool {
        self.canonical() == other.canonical()
    }

    /// Number of `ObservedConditional` leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            Estimand::ObservedConditional { .. } => 1,
            Estimand::Product(fs) => fs.iter().map(Estimand::leaf_count).sum(),
            Estimand::Marginalize { body, .. } => body.leaf_count(),
            Estimand::Ratio { numerator, denominator } => numerator.leaf_count() + denominator.leaf_count(),
        }
    }

    pub fn plain(&self) -> String {
        let mut out = String::new();
        write_plain(self, &mut out);
        out
    }

    pub fn latex(&self) -> String {
        let mut out = String::new();
        write_latex(self, &mut out);
        out
    }
}

impl fmt::Display for Estimand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.plain())
    }
}

/// Rendering style for [`render_estimand`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Plain,
    Latex,
}

pub fn render_estimand(e: &Estimand, style: Style) -> String {
    match style {
        Style::Plain => e.plain(),
        Style::Latex => e.latex(),
    }
}

fn join_vars(vs: &[Var]) -> String {
    vs.iter().map(Var::to_string).collect::<Vec<_>>().join(",")
}

fn write_plain(e: &Estimand, out: &mut String) {
    match e {
        Estimand::ObservedConditional { target, given } => {
            out.push_str("P(");
            out.push_str(&join_vars(target));
            if !given.is_empty() {
                out.push('|');
                out.push_str(&join_vars(given));
            }
            out.push(')');
        }
        Estimand::Product(fs) if fs.is_empty() => out.push('1'),
        Estimand::Product(fs) => {
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match f {
                    Estimand::Marginalize { .. } | Estimand::Product(_) => {
                        out.push_str("[ ");
                        write_plain(f, out);
                        out.push_str(" ]");
                    }
                    _ => write_plain(f, out),
                }
            }
        }
        Estimand::Marginalize { vars, body } => {
            out.push_str("sum_");
            if vars.len() == 1 {
                out.push_str(&vars[0].to_string());
            } else {
                out.push('{');
                out.push_str(&join_vars(vars));
                out.push('}');
            }
            out.push(' ');
            write_plain(body, out);
        }
        Estimand::Ratio { numerator, denominator } => {
            out.push_str("[ ");
            write_plain(numerator, out);
            out.push_str(" / ");
            write_plain(denominator, out);
            out.push_str(" ]");
        }
    }
}

fn latex_var(v: &Var) -> String {
    v.to_string().replace('_', "\\_")
}

fn latex_vars(vs: &[Var]) -> String {
    vs.iter().map(latex_var).collect::<Vec<_>>().join(",")
}

fn write_latex(e: &Estimand, out: &mut String) {
    match e {
        Estimand::ObservedConditional { target, given } => {
            out.push_str("P(");
            out.push_str(&latex_vars(target));
            if !given.is_empty() {
                out.push_str(" \\mid ");
                out.push_str(&latex_vars(given));
            }
            out.push(')');
        }
        Estimand::Product(fs) if fs.is_empty() => out.push('1'),
        Estimand::Product(fs) => {
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                if matches!(f, Estimand::Marginalize { .. }) {
                    out.push_str("\\left[ ");
                    write_latex(f, out);
                    out.push_str(" \\right]");
                } else {
                    write_latex(f, out);
                }
            }
        }
        Estimand::Marginalize { vars, body } => {
            out.push_str("\\sum_{");
            out.push_str(&latex_vars(vars));
            out.push_str("} ");
            write_latex(body, out);
        }
        Estimand::Ratio { numerator, denominator } => {
            out.push_str("\\frac{");
            write_latex(numerator, out);
            out.push_str("}{");
            write_latex(denominator, out);
            out.push('}');
        }
    }
}

/// Error from [`parse_plain`], with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("estimand syntax error at offset {offset}: {message}")]
pub struct EstimandParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String, u8),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, EstimandParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = src[start..i].to_string();
            let mut primes = 0u8;
            while i < bytes.len() && bytes[i] == b'\'' {
                primes += 1;
                i += 1;
            }
            out.push((start, Tok::Word(word, primes)));
        } else if "()[]{},|/".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(EstimandParseError { offset: i, message: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, EstimandParseError> {
        Err(EstimandParseError { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), EstimandParseError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn var(&mut self) -> Result<Var, EstimandParseError> {
        match self.peek().cloned() {
            Some(Tok::Word(w, p)) if is_valid_name(&w) => {
                self.pos += 1;
                Ok(Var::primed(NodeId::from(w.as_str()), p))
            }
            _ => self.fail("expected a variable"),
        }
    }

    fn var_list(&mut self) -> Result<Vec<Var>, EstimandParseError> {
        let mut vs = vec![self.var()?];
        while self.peek() == Some(&Tok::Sym(',')) {
            self.pos += 1;
            vs.push(self.var()?);
        }
        Ok(vs)
    }

    fn expr(&mut self) -> Result<Estimand, EstimandParseError> {
        if let Some(Tok::Word(w, p)) = self.peek().cloned() {
            if let Some(rest) = w.strip_prefix("sum_") {
                self.pos += 1;
                let vars = if rest.is_empty() {
                    if p != 0 {
                        return self.fail("stray prime after sum_");
                    }
                    self.expect('{')?;
                    let vs = self.var_list()?;
                    self.expect('}')?;
                    vs
                } else {
                    vec![Var::primed(NodeId::from(rest), p)]
                };
                let body = self.expr()?;
                return Ok(Estimand::marginalize(vars, body));
            }
        }
        self.product()
    }

    fn product(&mut self) -> Result<Estimand, EstimandParseError> {
        let mut factors = Vec::new();
        loop {
            match self.peek().cloned() {
                Some(Tok::Word(w, 0)) if w == "P" => {
                    self.pos += 1;
                    self.expect('(')?;
                    let target = self.var_list()?;
                    let given = if self.peek() == Some(&Tok::Sym('|')) {
                        self.pos += 1;
                        self.var_list()?
                    } else {
                        Vec::new()
                    };
                    self.expect(')')?;
                    factors.push(Estimand::prob(target, given));
                }
                Some(Tok::Word(w, 0)) if w == "1" => {
                    self.pos += 1;
                    factors.push(Estimand::one());
                }
                Some(Tok::Word(w, _)) if w.starts_with("sum_") => {
                    factors.push(self.expr()?);
                    break;
                }
                Some(Tok::Sym('[')) => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    if self.peek() == Some(&Tok::Sym('/')) {
                        self.pos += 1;
                        let den = self.expr()?;
                        self.expect(']')?;
                        factors.push(Estimand::ratio(inner, den));
                    } else {
                        self.expect(']')?;
                        factors.push(inner);
                    }
                }
                _ => break,
            }
        }
        if factors.is_empty() {
            return self.fail("expected a factor");
        }
        Ok(Estimand::product(factors))
    }
}

/// Parses the plain rendering back into an [`Estimand`].
pub fn parse_plain(src: &str) -> Result<Estimand, EstimandParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Var {
        Var::from(s)
    }

    fn p(t: &[&str], g: &[&str]) -> Estimand {
        Estimand::prob(t.iter().map(|s| v(s)).collect(), g.iter().map(|s| v(s)).collect())
    }

    fn frontdoor() -> Estimand {
        Estimand::marginalize(
            vec![v("z")],
            Estimand::product(vec![
                p(&["z"], &["x"]),
                Estimand::marginalize(vec![v("x'")], Estimand::product(vec![p(&["y"], &["z", "x'"]), p(&["x'"], &[])])),
            ]),
        )
    }

    #[test]
    fn plain_rendering_of_frontdoor() {
        assert_eq!(frontdoor().plain(), "sum_z P(z|x) [ sum_x' P(y|z,x') P(x') ]");
        assert_eq!(Estimand::product(vec![p(&["y1"], &[]), p(&["y3"], &["x"])]).plain(), "P(y1) P(y3|x)");
        assert_eq!(p(&["s"], &[]).plain(), "P(s)");
    }

    #[test]
    fn plain_round_trip() {
        let ratio = Estimand::marginalize(
            vec![v("z")],
            Estimand::product(vec![
                Estimand::ratio(
                    Estimand::marginalize(vec![v("w1")], p(&["z"], &["x", "w1"])),
                    Estimand::marginalize(vec![v("z")], Estimand::marginalize(vec![v("w1")], p(&["z"], &["x", "w1"]))),
                ),
                p(&["y"], &["z"]),
            ]),
        );
        for e in [frontdoor(), ratio, Estimand::one(), Estimand::marginalize(vec![v("a"), v("b")], p(&["a", "b", "c"], &[]))] {
            let back = parse_plain(&e.plain()).unwrap();
            assert!(back.structurally_eq(&e), "{} vs {}", back, e);
        }
    }

    #[test]
    fn parse_errors_report_offsets() {
        let err = parse_plain("P(y|x").unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(parse_plain("P(y) ]").is_err());
        assert!(parse_plain("").is_err());
        assert!(parse_plain("P(y) $").is_err());
    }

    #[test]
    fn free_and_bound() {
        let fd = frontdoor();
        let free: Vec<String> = fd.free_vars().iter().map(Var::to_string).collect();
        assert_eq!(free, vec!["x", "y"]);
    }

    #[test]
    fn priming_only_touches_colliding_binders() {
        let raw = Estimand::marginalize(
            vec![v("z")],
            Estimand::product(vec![
                p(&["z"], &["x"]),
                Estimand::marginalize(vec![v("x")], Estimand::product(vec![p(&["y"], &["z", "x"]), p(&["x"], &[])])),
            ]),
        );
        let reserved: BTreeSet<Var> = [v("x"), v("y")].into_iter().collect();
        assert_eq!(raw.prime_bound(&reserved), frontdoor());
    }

    #[test]
    fn shadowed_binders_stay_consistent() {
        let raw = Estimand::marginalize(
            vec![v("x")],
            Estimand::product(vec![p(&["x"], &[]), Estimand::marginalize(vec![v("x")], p(&["x"], &["y"]))]),
        );
        let reserved: BTreeSet<Var> = [v("x")].into_iter().collect();
        let primed = raw.prime_bound(&reserved);
        assert!(primed.free_vars().is_empty() || primed.free_vars() == [v("y")].into_iter().collect());
        assert_eq!(primed.plain(), "sum_x' P(x') [ sum_x' P(x'|y) ]");
    }

    #[test]
    fn product_flattening() {
        let e = Estimand::product(vec![Estimand::one(), Estimand::product(vec![p(&["a"], &[]), p(&["b"], &[])])]);
        assert_eq!(e.plain(), "P(a) P(b)");
        assert_eq!(Estimand::product(vec![p(&["a"], &[])]), p(&["a"], &[]));
    }

    #[test]
    fn latex_rendering() {
        assert_eq!(
            frontdoor().latex(),
            "\\sum_{z} P(z \\mid x) \\left[ \\sum_{x'} P(y \\mid z,x') P(x') \\right]"
        );
    }
}
