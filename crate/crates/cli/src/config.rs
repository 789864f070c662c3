//! TOML run configuration. Object literals are strings in the descriptor
//! syntax; their parse errors are reported at the config file's line and
//! column.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use l0check::concat::SequenceSpec;
use l0check::evidence::RunParams;
use l0check::syntax::{self, Parser};
use l0check::topology::NeighborhoodBase;
use l0check::{AtomId, DiscreteSpace, EcRv, ParseError, Partition, Scalar, Seminorm, SetDescriptor};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.origin, self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    horizon: Option<u64>,
    samples: Option<usize>,
    tolerance: Option<Spanned<String>>,
    expect: Option<Spanned<String>>,
    space: Option<RawSpace>,
    base: Option<RawBase>,
    seminorm: Option<Spanned<String>>,
    set: Option<Spanned<String>>,
    seq: Option<RawSeq>,
    part: Option<RawPart>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    #[serde(default)]
    explicit: Vec<Spanned<(u64, String)>>,
    tail_coefficient: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    from_seminorms: Option<Vec<Spanned<String>>>,
    eps: Option<Spanned<String>>,
    delta: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeq {
    ec: Option<Spanned<String>>,
    diag: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPart {
    finite: Option<Spanned<String>>,
    singletons_from: Option<Spanned<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub space: DiscreteSpace,
    pub params: RunParams,
    pub expect: Expectation,
    pub base: NeighborhoodBase,
    pub seminorm: Option<Seminorm>,
    pub set: Option<SetDescriptor>,
    pub sequences: Vec<SequenceSpec>,
    pub partition: Option<Partition>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            space: DiscreteSpace::canonical(),
            params: RunParams::default(),
            expect: Expectation::Pass,
            base: NeighborhoodBase::CounterexampleFamily,
            seminorm: None,
            set: None,
            sequences: Vec::new(),
            partition: None,
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        origin: origin.clone(),
        line: 0,
        column: 0,
        message: format!("cannot read config: {e}"),
    })?;
    parse(&text, &origin)
}

struct Source<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Source<'_> {
    fn at(&self, pos: usize, message: impl Into<String>) -> ConfigError {
        let (line, column) = syntax::line_column(self.text, pos);
        ConfigError {
            origin: self.origin.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    fn span_error(&self, span: Range<usize>, message: impl Into<String>) -> ConfigError {
        self.at(span.start, message)
    }

    /// Maps an error inside a string literal back to the file.
    fn literal_error(&self, span: Range<usize>, err: ParseError) -> ConfigError {
        let raw = &self.text[span.clone()];
        let quote = if raw.starts_with("\"\"\"") || raw.starts_with("'''") { 3 } else { 1 };
        let body = &raw[quote.min(raw.len())..];
        let offset = offset_of(body, err.line, err.column);
        self.at(span.start + quote + offset, err.message)
    }

    fn literal<T>(
        &self,
        lit: &Spanned<String>,
        parse: impl FnOnce(&str) -> Result<T, ParseError>,
    ) -> Result<T, ConfigError> {
        parse(lit.get_ref()).map_err(|e| self.literal_error(lit.span(), e))
    }
}

/// Byte offset of a 1-based line and column.
fn offset_of(text: &str, line: usize, column: usize) -> usize {
    let mut start = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return start + l.char_indices().nth(column - 1).map_or(l.len(), |(b, _)| b);
        }
        start += l.len();
    }
    text.len()
}

pub fn parse(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
    let src = Source { text, origin };
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let pos = e.span().map_or(0, |s| s.start);
        src.at(pos, e.message().to_string())
    })?;
    let mut cfg = RunConfig::default();

    if let Some(seed) = raw.seed {
        cfg.params.seed = seed;
    }
    if let Some(h) = raw.horizon {
        cfg.params.horizon = h;
    }
    if let Some(n) = raw.samples {
        cfg.params.samples = n;
    }
    if let Some(t) = &raw.tolerance {
        let tol = src.literal(t, syntax::parse_scalar)?;
        if tol <= Scalar::from_integer(0.into()) {
            return Err(src.span_error(t.span(), "tolerance must be positive"));
        }
        cfg.params.tolerance = tol;
    }
    if let Some(e) = &raw.expect {
        cfg.expect = match e.get_ref().as_str() {
            "pass" => Expectation::Pass,
            "fail" => Expectation::Fail,
            other => {
                return Err(src.span_error(e.span(), format!("expect must be \"pass\" or \"fail\", got \"{other}\"")))
            }
        };
    }
    if let Some(space) = &raw.space {
        cfg.space = build_space(&src, space)?;
    }
    if let Some(base) = &raw.base {
        if let Some(family) = &base.from_seminorms {
            let members = family
                .iter()
                .map(|s| src.literal(s, syntax::parse_seminorm))
                .collect::<Result<Vec<_>, _>>()?;
            cfg.base = NeighborhoodBase::FromSeminorms(members);
        }
        if let Some(e) = &base.eps {
            cfg.params.epsilon = positive_rv(&src, e)?;
        }
        if let Some(d) = &base.delta {
            cfg.params.delta = positive_rv(&src, d)?;
        }
    }
    if let Some(s) = &raw.seminorm {
        cfg.seminorm = Some(src.literal(s, syntax::parse_seminorm)?);
    }
    if let Some(s) = &raw.set {
        cfg.set = Some(src.literal(s, syntax::parse_set)?);
    }
    if let Some(seq) = &raw.seq {
        if let Some(ec) = &seq.ec {
            let (prefix, tail) = src.literal(ec, |t| {
                let mut p = Parser::new(t);
                let v = p.ec_list()?;
                p.finish()?;
                Ok(v)
            })?;
            cfg.sequences.push(SequenceSpec::EventuallyConstant { prefix, tail });
        }
        if let Some(d) = &seq.diag {
            cfg.sequences.push(SequenceSpec::Diagonal(src.literal(d, syntax::parse_rv)?));
        }
    }
    if let Some(part) = &raw.part {
        cfg.partition = Some(build_partition(&src, part)?);
    }
    Ok(cfg)
}

fn positive_rv(src: &Source, lit: &Spanned<String>) -> Result<EcRv, ConfigError> {
    let x = src.literal(lit, syntax::parse_rv)?;
    if !x.is_strictly_positive() {
        return Err(src.span_error(lit.span(), "radius must be strictly positive everywhere"));
    }
    Ok(x)
}

fn build_space(src: &Source, raw: &RawSpace) -> Result<DiscreteSpace, ConfigError> {
    let mut weights = Vec::new();
    for (i, entry) in raw.explicit.iter().enumerate() {
        let (atom, w) = entry.get_ref();
        if *atom != i as u64 + 1 {
            return Err(src.span_error(
                entry.span(),
                format!("explicit weights must list atoms 1, 2, ... in order; expected atom {}", i + 1),
            ));
        }
        let w = syntax::parse_scalar(w).map_err(|e| src.span_error(entry.span(), e.message))?;
        weights.push(w);
    }
    let (tail, span) = match &raw.tail_coefficient {
        Some(t) => (src.literal(t, syntax::parse_scalar)?, t.span()),
        None => (Scalar::from_integer(1.into()), raw.explicit.first().map_or(0..0, |e| e.span())),
    };
    DiscreteSpace::new(weights, tail).map_err(|e| src.span_error(span, e.to_string()))
}

fn build_partition(src: &Source, raw: &RawPart) -> Result<Partition, ConfigError> {
    let cells = match &raw.finite {
        Some(lit) => Some((src.literal(lit, |t| {
            let mut p = Parser::new(t);
            let v = p.event_list()?;
            p.finish()?;
            Ok(v)
        })?, lit.span())),
        None => None,
    };
    match (&raw.singletons_from, cells) {
        (Some(k), cells) => {
            let start = AtomId::try_new(*k.get_ref())
                .ok_or_else(|| src.span_error(k.span(), "singletons_from must be at least 1"))?;
            let prefix = cells.map(|(c, _)| c).unwrap_or_default();
            Partition::singleton_tail(prefix, start).map_err(|e| src.span_error(k.span(), e.to_string()))
        }
        (None, Some((cells, span))) => Partition::finite(cells).map_err(|e| src.span_error(span, e.to_string())),
        (None, None) => Err(src.at(0, "[part] needs `finite` or `singletons_from`")),
    }
}
