use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rdf::{ns, Literal};

/// The value-space families a datatype can draw on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Integer,
    Decimal,
    Double,
    Boolean,
    String,
    LangString,
}

impl ValueKind {
    /// Datatype of the canonical literal for values of this kind.
    pub fn canonical_datatype(self) -> &'static str {
        match self {
            ValueKind::Integer => ns::XSD_INTEGER,
            ValueKind::Decimal => ns::XSD_DECIMAL,
            ValueKind::Double => ns::XSD_DOUBLE,
            ValueKind::Boolean => ns::XSD_BOOLEAN,
            ValueKind::String => ns::XSD_STRING,
            ValueKind::LangString => ns::RDF_LANG_STRING,
        }
    }
}

/// A finite-precision decimal with at least one fractional digit, normalized
/// so that equal numbers have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decimal {
    unscaled: BigInt,
    scale: u32,
}

impl Decimal {
    fn to_ratio_parts(&self) -> (BigInt, BigInt) {
        (self.unscaled.clone(), BigInt::from(10u32).pow(self.scale))
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, da) = self.to_ratio_parts();
        let (b, db) = other.to_ratio_parts();
        (a * db).cmp(&(b * da))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.unscaled.abs().to_string();
        let scale = self.scale as usize;
        let padded = if digits.len() <= scale {
            format!("{}{}", "0".repeat(scale + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - scale);
        let sign = if self.unscaled.is_negative() { "-" } else { "" };
        write!(f, "{sign}{int}.{frac}")
    }
}

/// An IEEE double compared by identity of its (normalized) bit pattern.
#[derive(Debug, Clone, Copy)]
pub struct Double(f64);

impl Double {
    pub fn new(v: f64) -> Self {
        if v.is_nan() {
            Double(f64::NAN)
        } else if v == 0.0 {
            Double(0.0)
        } else {
            Double(v)
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Double {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Double {}

impl Hash for Double {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl PartialOrd for Double {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Double {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Double {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        if v.is_nan() {
            f.write_str("NaN")
        } else if v.is_infinite() {
            f.write_str(if v > 0.0 { "INF" } else { "-INF" })
        } else {
            let s = format!("{v:E}");
            // `{:E}` omits the fraction for whole mantissas ("1E0"); XSD wants "1.0E0"
            match s.split_once('E') {
                Some((m, e)) if !m.contains('.') => write!(f, "{m}.0E{e}"),
                _ => f.write_str(&s),
            }
        }
    }
}

/// A literal's value. Integral decimals are integers, since the integers are
/// a subset of the decimal value space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Integer(BigInt),
    Decimal(Decimal),
    Double(Double),
    Boolean(bool),
    String(String),
    LangString { value: String, tag: String },
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Integer(_) => ValueKind::Integer,
            Value::Decimal(_) => ValueKind::Decimal,
            Value::Double(_) => ValueKind::Double,
            Value::Boolean(_) => ValueKind::Boolean,
            Value::String(_) => ValueKind::String,
            Value::LangString { .. } => ValueKind::LangString,
        }
    }

    /// The canonical literal denoting this value.
    pub fn canonical_literal(&self) -> Literal {
        match self {
            Value::Integer(n) => Literal::new(n.to_string(), ns::XSD_INTEGER),
            Value::Decimal(d) => Literal::new(d.to_string(), ns::XSD_DECIMAL),
            Value::Double(d) => Literal::new(d.to_string(), ns::XSD_DOUBLE),
            Value::Boolean(b) => Literal::new(b.to_string(), ns::XSD_BOOLEAN),
            Value::String(s) => Literal::string(s.clone()),
            Value::LangString { value, tag } => Literal::lang_string(value, tag),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canonical_literal().fmt(f)
    }
}

/// Lexical-to-value mapping of one datatype.
#[derive(Debug, Clone)]
pub struct Datatype {
    iri: String,
    kinds: Vec<ValueKind>,
    value_of: fn(&str) -> Option<Value>,
}

impl Datatype {
    pub fn new(iri: impl Into<String>, kinds: &[ValueKind], value_of: fn(&str) -> Option<Value>) -> Self {
        Datatype {
            iri: iri.into(),
            kinds: kinds.to_vec(),
            value_of,
        }
    }

    pub fn iri(&self) -> &str {
        &self.iri
    }

    pub fn kinds(&self) -> &[ValueKind] {
        &self.kinds
    }

    pub fn value_of(&self, lexical: &str) -> Option<Value> {
        (self.value_of)(lexical)
    }

    pub fn value_space_contains(&self, v: &Value) -> bool {
        self.kinds.contains(&v.kind())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatatypeError {
    #[error("unknown datatype <{0}>")]
    UnknownDatatype(String),
    #[error("ill-formed literal {literal}: not in the lexical space of <{datatype}>")]
    IllFormedLiteral { literal: Literal, datatype: String },
}

/// The datatypes an interpretation knows about, keyed by IRI.
#[derive(Debug, Clone)]
pub struct DatatypeRegistry {
    types: BTreeMap<String, Datatype>,
}

impl Default for DatatypeRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl DatatypeRegistry {
    pub fn empty() -> Self {
        DatatypeRegistry {
            types: BTreeMap::new(),
        }
    }

    /// `xsd:string`, `xsd:integer`, `xsd:decimal`, `xsd:double`,
    /// `xsd:boolean` and `rdf:langString`.
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        reg.register(Datatype::new(ns::XSD_STRING, &[ValueKind::String], |s| {
            Some(Value::String(s.to_owned()))
        }));
        reg.register(Datatype::new(ns::XSD_INTEGER, &[ValueKind::Integer], parse_integer));
        reg.register(Datatype::new(
            ns::XSD_DECIMAL,
            &[ValueKind::Integer, ValueKind::Decimal],
            parse_decimal,
        ));
        reg.register(Datatype::new(ns::XSD_DOUBLE, &[ValueKind::Double], parse_double));
        reg.register(Datatype::new(ns::XSD_BOOLEAN, &[ValueKind::Boolean], parse_boolean));
        reg.register(Datatype::new(ns::RDF_LANG_STRING, &[ValueKind::LangString], parse_lang_string));
        reg
    }

    pub fn register(&mut self, dt: Datatype) {
        self.types.insert(dt.iri.clone(), dt);
    }

    pub fn get(&self, iri: &str) -> Option<&Datatype> {
        self.types.get(iri)
    }

    pub fn contains(&self, iri: &str) -> bool {
        self.types.contains_key(iri)
    }

    pub fn iris(&self) -> impl Iterator<Item = &str> {
        self.types.keys().map(String::as_str)
    }

    /// Whether `v` is in the value space of datatype `iri`; unknown
    /// datatypes contain nothing.
    pub fn value_space_contains(&self, iri: &str, v: &Value) -> bool {
        self.get(iri).is_some_and(|dt| dt.value_space_contains(v))
    }

    pub fn literal_value(&self, lit: &Literal) -> Result<Value, DatatypeError> {
        let dt = self
            .get(lit.datatype())
            .ok_or_else(|| DatatypeError::UnknownDatatype(lit.datatype().to_owned()))?;
        dt.value_of(lit.lexical()).ok_or_else(|| DatatypeError::IllFormedLiteral {
            literal: lit.clone(),
            datatype: lit.datatype().to_owned(),
        })
    }
}

/// Whether `iri` is one of the standard registry's datatypes.
pub fn is_standard_datatype(iri: &str) -> bool {
    matches!(
        iri,
        ns::XSD_STRING | ns::XSD_INTEGER | ns::XSD_DECIMAL | ns::XSD_DOUBLE | ns::XSD_BOOLEAN | ns::RDF_LANG_STRING
    )
}

/// Maps a literal to its value under the given registry.
pub fn literal_value(lit: &Literal, reg: &DatatypeRegistry) -> Result<Value, DatatypeError> {
    reg.literal_value(lit)
}

fn split_sign(s: &str) -> (bool, &str) {
    match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_integer(lexical: &str) -> Option<Value> {
    let s = lexical.trim();
    let (_, digits) = split_sign(s);
    if !all_digits(digits) {
        return None;
    }
    BigInt::from_str(s.trim_start_matches('+')).ok().map(Value::Integer)
}

fn parse_decimal(lexical: &str) -> Option<Value> {
    let s = lexical.trim();
    let (negative, body) = split_sign(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !(int.is_empty() || all_digits(int))
        || !(frac.is_empty() || all_digits(frac))
    {
        return None;
    }
    let frac = frac.trim_end_matches('0');
    let mut unscaled = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
    if negative {
        unscaled = -unscaled;
    }
    if frac.is_empty() || unscaled.is_zero() {
        return Some(Value::Integer(unscaled));
    }
    Some(Value::Decimal(Decimal {
        unscaled,
        scale: frac.len() as u32,
    }))
}

fn parse_double(lexical: &str) -> Option<Value> {
    let s = lexical.trim();
    match s {
        "INF" | "+INF" => return Some(Value::Double(Double::new(f64::INFINITY))),
        "-INF" => return Some(Value::Double(Double::new(f64::NEG_INFINITY))),
        "NaN" => return Some(Value::Double(Double::new(f64::NAN))),
        _ => {}
    }
    let (_, body) = split_sign(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mantissa_ok = (all_digits(int) || int.is_empty())
        && (all_digits(frac) || frac.is_empty())
        && !(int.is_empty() && frac.is_empty());
    let exponent_ok = exponent.is_none_or(|e| all_digits(split_sign(e).1));
    if !(mantissa_ok && exponent_ok) {
        return None;
    }
    s.parse::<f64>().ok().map(|v| Value::Double(Double::new(v)))
}

fn parse_boolean(lexical: &str) -> Option<Value> {
    match lexical.trim() {
        "true" | "1" => Some(Value::Boolean(true)),
        "false" | "0" => Some(Value::Boolean(false)),
        _ => None,
    }
}

fn parse_lang_string(lexical: &str) -> Option<Value> {
    let (value, tag) = lexical.rsplit_once('@')?;
    let valid = !tag.is_empty()
        && tag.split('-').all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_alphanumeric()));
    valid.then(|| Value::LangString {
        value: value.to_owned(),
        tag: tag.to_ascii_lowercase(),
    })
}
