//! Text syntax for every descriptor, with a recursive-descent parser and
//! `Display` impls that print the canonical, re-parseable form.
//!
//! ```text
//! scalar     3 | -1/2
//! event      {1, 3} | {} | co{1, 2} | omega
//! rv         {1:3, 2:-1/2 | 0} | {|2} | {2}
//! seminorm   zero | weighted(rv) | localized(event) | sup[seminorm, ...]
//! set        ball(seminorm; rv) | ball([seminorm, ...]; rv) | m_plus_ball(rv)
//!            | scale(rv; set) | translate(rv; set) | intersect[set, ...]
//! partition  finite[event, ...] | singletons_from(k) | singletons_from(k; [event, ...])
//! sequence   ec[rv, ... | rv] | diag(rv)
//! ```

use std::fmt;

use crate::concat::SequenceSpec;
use crate::error::{Error, ParseError};
use crate::measure::{AtomId, EventSet, Partition};
use crate::rv::EcRv;
use crate::scalar::{self, Scalar};
use crate::seminorm::Seminorm;
use crate::sets::SetDescriptor;

type PResult<T> = std::result::Result<T, ParseError>;

pub struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = line_column(self.src, pos);
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
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
            let msg = match self.peek() {
                Some(found) => format!("expected '{c}', found '{found}'"),
                None => format!("expected '{c}', found end of input"),
            };
            Err(self.error(msg))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn finish(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected trailing input starting with '{c}'"))),
        }
    }

    /// A lowercase identifier (`[a-z_]+`), without consuming on failure.
    pub fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_lowercase() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn keyword(&mut self) -> PResult<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        match self.ident() {
            Some(k) => Ok((start, k)),
            None => Err(self.error("expected a keyword")),
        }
    }

    fn number_token(&mut self) -> PResult<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let mut len = 0;
        let bytes = rest.as_bytes();
        if bytes.first() == Some(&b'-') {
            len += 1;
        }
        while len < bytes.len() && bytes[len].is_ascii_digit() {
            len += 1;
        }
        if len < bytes.len() && bytes[len] == b'/' {
            len += 1;
            while len < bytes.len() && bytes[len].is_ascii_digit() {
                len += 1;
            }
        }
        if len == 0 {
            return Err(self.error("expected a rational number"));
        }
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    pub fn scalar(&mut self) -> PResult<Scalar> {
        let (start, tok) = self.number_token()?;
        scalar::parse(tok).ok_or_else(|| self.error_at(start, format!("malformed rational '{tok}'")))
    }

    pub fn atom(&mut self) -> PResult<AtomId> {
        let (start, tok) = self.number_token()?;
        tok.parse::<u64>()
            .ok()
            .and_then(AtomId::try_new)
            .ok_or_else(|| self.error_at(start, format!("'{tok}' is not an atom index (integer >= 1)")))
    }

    pub fn event(&mut self) -> PResult<EventSet> {
        self.skip_ws();
        let cofinite = match self.ident() {
            None => false,
            Some("co") => true,
            Some("omega") => return Ok(EventSet::omega()),
            Some("empty") => return Ok(EventSet::empty()),
            Some(other) => return Err(self.error(format!("unknown event form '{other}'"))),
        };
        self.expect('{')?;
        let mut atoms = Vec::new();
        if !self.eat('}') {
            loop {
                atoms.push(self.atom()?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(if cofinite {
            EventSet::cofinite(atoms)
        } else {
            EventSet::finite(atoms)
        })
    }

    pub fn rv(&mut self) -> PResult<EcRv> {
        self.expect('{')?;
        if self.eat('|') {
            let tail = self.scalar()?;
            self.expect('}')?;
            return Ok(EcRv::constant(tail));
        }
        let (start, _) = self.number_token()?;
        self.pos = start;
        if !self.rest().contains(':') || self.peek_is_constant() {
            let c = self.scalar()?;
            self.expect('}')?;
            return Ok(EcRv::constant(c));
        }
        let mut overrides = std::collections::BTreeMap::new();
        loop {
            self.skip_ws();
            let at = self.pos;
            let atom = self.atom()?;
            self.expect(':')?;
            let v = self.scalar()?;
            if overrides.insert(atom, v).is_some() {
                return Err(self.error_at(at, format!("atom {atom} listed twice")));
            }
            if self.eat('|') {
                break;
            }
            self.expect(',')?;
        }
        let tail = self.scalar()?;
        self.expect('}')?;
        Ok(EcRv::new(overrides, tail))
    }

    // `{c}` as opposed to `{j: ...`
    fn peek_is_constant(&mut self) -> bool {
        let save = self.pos;
        let constant = self.number_token().is_ok() && self.peek() == Some('}');
        self.pos = save;
        constant
    }

    pub fn seminorm(&mut self) -> PResult<Seminorm> {
        let (start, kw) = self.keyword()?;
        let s = match kw {
            "zero" => Seminorm::Zero,
            "weighted" => {
                self.expect('(')?;
                let w = self.rv()?;
                self.expect(')')?;
                Seminorm::Weighted(w)
            }
            "localized" => {
                self.expect('(')?;
                let e = self.event()?;
                self.expect(')')?;
                Seminorm::Localized(e)
            }
            "sup" => Seminorm::FiniteSup(self.bracket_list(Parser::seminorm)?),
            other => return Err(self.error_at(start, format!("unknown seminorm '{other}'"))),
        };
        s.validate().map_err(|e| self.error_at(start, describe(e)))?;
        Ok(s)
    }

    fn bracket_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    /// A single seminorm or a bracketed list of them.
    pub fn seminorm_family(&mut self) -> PResult<Vec<Seminorm>> {
        if self.peek() == Some('[') {
            self.bracket_list(Parser::seminorm)
        } else {
            Ok(vec![self.seminorm()?])
        }
    }

    pub fn set(&mut self) -> PResult<SetDescriptor> {
        let (start, kw) = self.keyword()?;
        let s = match kw {
            "ball" => {
                self.expect('(')?;
                let family = self.seminorm_family()?;
                self.expect(';')?;
                let radius = self.rv()?;
                self.expect(')')?;
                SetDescriptor::Ball { family, radius }
            }
            "m_plus_ball" => {
                self.expect('(')?;
                let radius = self.rv()?;
                self.expect(')')?;
                SetDescriptor::MPlusBall(radius)
            }
            "scale" | "translate" => {
                self.expect('(')?;
                let v = self.rv()?;
                self.expect(';')?;
                let inner = Box::new(self.set()?);
                self.expect(')')?;
                if kw == "scale" {
                    SetDescriptor::Scale(v, inner)
                } else {
                    SetDescriptor::Translate(v, inner)
                }
            }
            "intersect" => SetDescriptor::Intersect(self.bracket_list(Parser::set)?),
            other => return Err(self.error_at(start, format!("unknown set '{other}'"))),
        };
        s.validate().map_err(|e| self.error_at(start, describe(e)))?;
        Ok(s)
    }

    pub fn partition(&mut self) -> PResult<Partition> {
        let (start, kw) = self.keyword()?;
        let p = match kw {
            "finite" => {
                let cells = self.bracket_list(Parser::event)?;
                Partition::finite(cells)
            }
            "singletons_from" => {
                self.expect('(')?;
                let k = self.atom()?;
                let prefix = if self.eat(';') {
                    self.bracket_list(Parser::event)?
                } else {
                    Vec::new()
                };
                self.expect(')')?;
                Partition::singleton_tail(prefix, k)
            }
            other => return Err(self.error_at(start, format!("unknown partition '{other}'"))),
        };
        p.map_err(|e| self.error_at(start, describe(e)))
    }

    /// `[event, ...]`.
    pub fn event_list(&mut self) -> PResult<Vec<EventSet>> {
        self.bracket_list(Parser::event)
    }

    /// `[x1, x2 | xtail]`, the body of an eventually constant sequence.
    pub fn ec_list(&mut self) -> PResult<(Vec<EcRv>, EcRv)> {
        self.expect('[')?;
        let mut prefix = Vec::new();
        if !self.eat('|') {
            loop {
                prefix.push(self.rv()?);
                if self.eat('|') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let tail = self.rv()?;
        self.expect(']')?;
        Ok((prefix, tail))
    }

    pub fn sequence(&mut self) -> PResult<SequenceSpec> {
        let (start, kw) = self.keyword()?;
        match kw {
            "ec" => {
                let (prefix, tail) = self.ec_list()?;
                Ok(SequenceSpec::EventuallyConstant { prefix, tail })
            }
            "diag" => {
                self.expect('(')?;
                let c = self.rv()?;
                self.expect(')')?;
                Ok(SequenceSpec::Diagonal(c))
            }
            other => Err(self.error_at(start, format!("unknown sequence '{other}'"))),
        }
    }
}

fn describe(e: Error) -> String {
    match e {
        Error::Parse(p) => p.message,
        other => other.to_string(),
    }
}

/// 1-based line and column of a byte offset.
pub fn line_column(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rsplit_once('\n')
        .map_or(before, |(_, last)| last)
        .chars()
        .count()
        + 1;
    (line, column)
}

fn parse_all<'s, T>(src: &'s str, f: impl FnOnce(&mut Parser<'s>) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(src);
    let v = f(&mut p)?;
    p.finish()?;
    Ok(v)
}

pub fn parse_scalar(src: &str) -> PResult<Scalar> {
    parse_all(src, Parser::scalar)
}

pub fn parse_event(src: &str) -> PResult<EventSet> {
    parse_all(src, Parser::event)
}

pub fn parse_rv(src: &str) -> PResult<EcRv> {
    parse_all(src, Parser::rv)
}

pub fn parse_seminorm(src: &str) -> PResult<Seminorm> {
    parse_all(src, Parser::seminorm)
}

pub fn parse_set(src: &str) -> PResult<SetDescriptor> {
    parse_all(src, Parser::set)
}

pub fn parse_partition(src: &str) -> PResult<Partition> {
    parse_all(src, Parser::partition)
}

pub fn parse_sequence(src: &str) -> PResult<SequenceSpec> {
    parse_all(src, Parser::sequence)
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_omega() {
            return f.write_str("omega");
        }
        if !self.is_finite() {
            f.write_str("co")?;
        }
        f.write_str("{")?;
        let atoms: Vec<_> = self.listed().iter().collect();
        write_list(f, &atoms)?;
        f.write_str("}")
    }
}

impl fmt::Display for EcRv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "{{{}}}", self.tail());
        }
        f.write_str("{")?;
        for (i, (a, v)) in self.overrides().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}:{v}")?;
        }
        write!(f, " | {}}}", self.tail())
    }
}

impl fmt::Display for Seminorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seminorm::Zero => f.write_str("zero"),
            Seminorm::Weighted(w) => write!(f, "weighted({w})"),
            Seminorm::Localized(a) => write!(f, "localized({a})"),
            Seminorm::FiniteSup(m) => {
                f.write_str("sup[")?;
                write_list(f, m)?;
                f.write_str("]")
            }
        }
    }
}

/// Prints a seminorm family the way `ball(...)` and `[...]` lists take it.
pub struct Family<'a>(pub &'a [Seminorm]);

impl fmt::Display for Family<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            f.write_str("[")?;
            write_list(f, self.0)?;
            f.write_str("]")
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescriptor::Ball { family, radius } => write!(f, "ball({}; {radius})", Family(family)),
            SetDescriptor::MPlusBall(r) => write!(f, "m_plus_ball({r})"),
            SetDescriptor::Scale(xi, s) => write!(f, "scale({xi}; {s})"),
            SetDescriptor::Translate(y, s) => write!(f, "translate({y}; {s})"),
            SetDescriptor::Intersect(m) => {
                f.write_str("intersect[")?;
                write_list(f, m)?;
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Partition::Finite(cells) => {
                f.write_str("finite[")?;
                write_list(f, cells)?;
                f.write_str("]")
            }
            Partition::SingletonTail { prefix, tail_start } if prefix.is_empty() => {
                write!(f, "singletons_from({tail_start})")
            }
            Partition::SingletonTail { prefix, tail_start } => {
                write!(f, "singletons_from({tail_start}; [")?;
                write_list(f, prefix)?;
                f.write_str("])")
            }
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::EventuallyConstant { prefix, tail } => {
                f.write_str("ec[")?;
                write_list(f, prefix)?;
                if !prefix.is_empty() {
                    f.write_str(" ")?;
                }
                write!(f, "| {tail}]")
            }
            SequenceSpec::Diagonal(c) => write!(f, "diag({c})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn a(n: u64) -> AtomId {
        AtomId::new(n)
    }

    #[test]
    fn rv_literals() {
        let x = parse_rv("{1:3, 2:-1/2 | 0}").unwrap();
        assert_eq!(x, EcRv::new([(a(1), int(3)), (a(2), ratio(-1, 2))], int(0)));
        assert_eq!(x.to_string(), "{1:3, 2:-1/2 | 0}");
        assert_eq!(parse_rv("{|2}").unwrap(), EcRv::constant(int(2)));
        assert_eq!(parse_rv(" { 5 } ").unwrap(), EcRv::constant(int(5)));
        assert_eq!(EcRv::zero().to_string(), "{0}");
        // overrides equal to the tail collapse
        assert_eq!(parse_rv("{1:2 | 2}").unwrap().to_string(), "{2}");
    }

    #[test]
    fn rv_errors_have_positions() {
        let e = parse_rv("{1:3, 2:x | 0}").unwrap_err();
        assert_eq!((e.line, e.column), (1, 9));
        let e = parse_rv("{1:3,\n 0:1 | 0}").unwrap_err();
        assert_eq!((e.line, e.column), (2, 2));
        assert!(parse_rv("{1:3, 1:4 | 0}").unwrap_err().message.contains("twice"));
        assert!(parse_rv("{1:3 | 0} x").is_err());
        assert!(parse_rv("{1/0}").is_err());
    }

    #[test]
    fn events() {
        assert_eq!(parse_event("{1, 3}").unwrap(), EventSet::finite([a(1), a(3)]));
        assert_eq!(parse_event("co{2}").unwrap(), EventSet::cofinite([a(2)]));
        assert_eq!(parse_event("omega").unwrap(), EventSet::omega());
        assert_eq!(parse_event("{}").unwrap(), EventSet::empty());
        assert_eq!(EventSet::cofinite([a(1), a(2)]).to_string(), "co{1, 2}");
        assert_eq!(EventSet::omega().to_string(), "omega");
        assert!(parse_event("{0}").is_err());
    }

    #[test]
    fn seminorms_and_sets() {
        let s = parse_seminorm("sup[localized({2}), weighted({|2})]").unwrap();
        assert_eq!(s.to_string(), "sup[localized({2}), weighted({2})]");
        assert!(parse_seminorm("weighted({-1})").is_err());
        assert!(parse_seminorm("sup[]").is_err());

        let u = parse_set("ball(weighted({|1}); {|1})").unwrap();
        assert_eq!(u, SetDescriptor::ball(vec![Seminorm::absolute()], EcRv::one()).unwrap());
        let u = parse_set("ball([zero, localized(co{1})]; {1:2 | 1})").unwrap();
        assert_eq!(u.to_string(), "ball([zero, localized(co{1})]; {1:2 | 1})");
        let t = parse_set("translate({1}; scale({|2}; m_plus_ball({|1})))").unwrap();
        assert_eq!(t.to_string(), "translate({1}; scale({2}; m_plus_ball({1})))");
        let i = parse_set("intersect[m_plus_ball({1}), ball(zero; {3})]").unwrap();
        assert_eq!(parse_set(&i.to_string()).unwrap(), i);
        let e = parse_set("ball(zero; {1:0 | 1})").unwrap_err();
        assert!(e.message.contains("strictly positive"), "{e}");
        assert_eq!(e.column, 1);
        assert!(parse_set("scale({0}; m_plus_ball({1}))").is_err());
    }

    #[test]
    fn partitions_and_sequences() {
        let p = parse_partition("finite[{1}, co{1}]").unwrap();
        assert_eq!(p.cell_count(), Some(2));
        let p = parse_partition("singletons_from(3; [{1}, {2}])").unwrap();
        assert_eq!(p.to_string(), "singletons_from(3; [{1}, {2}])");
        assert_eq!(parse_partition("singletons_from(1)").unwrap().to_string(), "singletons_from(1)");
        assert!(parse_partition("finite[{1}, {1, 2}]").is_err());
        assert!(parse_partition("singletons_from(3; [{1}])").is_err());

        let s = parse_sequence("ec[{3}, {5} | {0}]").unwrap();
        assert_eq!(s.to_string(), "ec[{3}, {5} | {0}]");
        assert_eq!(parse_sequence("ec[| {2}]").unwrap().to_string(), "ec[| {2}]");
        assert_eq!(parse_sequence("diag({|2})").unwrap().to_string(), "diag({2})");
    }
}
