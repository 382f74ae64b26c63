//! A Turtle parser for the subset used by validation corpora.
//!
//! Supported: `@prefix`/`@base` (and the SPARQL-style `PREFIX`/`BASE`), IRIs,
//! prefixed names, blank node labels, `a`, predicate-object and object lists,
//! string/numeric/boolean shorthands, datatyped and language-tagged literals.
//! Collections, anonymous blank nodes and quoted triples are rejected.

use std::collections::HashMap;

use thiserror::Error;

use super::{ns, Graph, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurtleError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undefined prefix '{prefix}:'")]
    UnresolvedPrefix {
        line: usize,
        column: usize,
        prefix: String,
    },
    #[error("{line}:{column}: relative IRI <{iri}> but no base IRI is set")]
    RelativeIri {
        line: usize,
        column: usize,
        iri: String,
    },
    #[error("{line}:{column}: {construct} are not supported")]
    Unsupported {
        line: usize,
        column: usize,
        construct: &'static str,
    },
}

impl TurtleError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            TurtleError::Syntax { line, column, .. }
            | TurtleError::UnresolvedPrefix { line, column, .. }
            | TurtleError::RelativeIri { line, column, .. }
            | TurtleError::Unsupported { line, column, .. } => (*line, *column),
        }
    }
}

/// Parses a Turtle document into a graph.
///
/// Relative IRIs are resolved against `base` (or a later `@base`); with no
/// base they are an error.
pub fn parse_turtle(text: &str, base: Option<&str>) -> std::result::Result<Graph, TurtleError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        base: base.map(str::to_owned),
        prefixes: HashMap::new(),
        graph: Graph::new(),
    };
    parser.document()?;
    Ok(parser.graph)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    base: Option<String>,
    prefixes: HashMap<String, String>,
    graph: Graph,
}

type Result<T> = std::result::Result<T, TurtleError>;

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || (c as u32) > 0x7f
}

fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit() || c == '-' || c == '.' || c == '\u{b7}'
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(TurtleError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        })
    }

    fn unsupported<T>(&self, construct: &'static str) -> Result<T> {
        Err(TurtleError::Unsupported {
            line: self.line,
            column: self.column,
            construct,
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.syntax(format!("expected '{want}', found '{c}'")),
            None => self.syntax(format!("expected '{want}', found end of input")),
        }
    }

    fn looking_at_keyword(&self, keyword: &str, case_insensitive: bool) -> bool {
        let n = keyword.chars().count();
        let word: String = self.chars[self.pos..].iter().take(n).collect();
        let matches = if case_insensitive {
            word.eq_ignore_ascii_case(keyword)
        } else {
            word == keyword
        };
        matches && !self.peek_at(n).is_some_and(|c| is_name_char(c) || c == ':')
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn document(&mut self) -> Result<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            if self.peek() == Some('@') {
                if self.looking_at_keyword("@prefix", false) {
                    self.advance(7);
                    self.prefix_decl()?;
                    self.expect('.')?;
                } else if self.looking_at_keyword("@base", false) {
                    self.advance(5);
                    self.base_decl()?;
                    self.expect('.')?;
                } else {
                    return self.syntax("unknown directive");
                }
            } else if self.looking_at_keyword("PREFIX", true) {
                self.advance(6);
                self.prefix_decl()?;
            } else if self.looking_at_keyword("BASE", true) {
                self.advance(4);
                self.base_decl()?;
            } else {
                self.triples()?;
                self.expect('.')?;
            }
        }
    }

    fn prefix_decl(&mut self) -> Result<()> {
        self.skip_ws();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !is_name_char(c) {
                return self.syntax(format!("invalid character '{c}' in prefix name"));
            }
            prefix.push(c);
            self.bump();
        }
        self.expect(':')?;
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(prefix, iri);
        Ok(())
    }

    fn base_decl(&mut self) -> Result<()> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn triples(&mut self) -> Result<()> {
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<()> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> Result<()> {
        loop {
            let object = self.object()?;
            let triple = Triple::new(subject.clone(), predicate.clone(), object)
                .expect("subject and predicate positions are checked by the grammar");
            self.graph.insert(triple);
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn reject_unsupported(&self) -> Result<()> {
        match self.peek() {
            Some('[') => self.unsupported("anonymous blank nodes '[ ]'"),
            Some('(') => self.unsupported("collections '( )'"),
            Some('<') if self.peek_at(1) == Some('<') => self.unsupported("quoted triples '<< >>'"),
            _ => Ok(()),
        }
    }

    fn subject(&mut self) -> Result<Term> {
        self.skip_ws();
        self.reject_unsupported()?;
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_node(),
            Some('"') | Some('\'') => self.syntax("a literal cannot be a subject"),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                self.syntax("a literal cannot be a subject")
            }
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => self.syntax("expected a subject, found end of input"),
        }
    }

    fn verb(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.looking_at_keyword("a", false) {
            self.bump();
            return Ok(Term::iri(ns::RDF_TYPE));
        }
        self.reject_unsupported()?;
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => {
                self.syntax("a blank node cannot be a predicate")
            }
            Some('"') | Some('\'') => self.syntax("a literal cannot be a predicate"),
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => self.syntax("expected a predicate, found end of input"),
        }
    }

    fn object(&mut self) -> Result<Term> {
        self.skip_ws();
        self.reject_unsupported()?;
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_node(),
            Some('"') | Some('\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => self.numeric_literal(),
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                self.numeric_literal()
            }
            Some(_) if self.looking_at_keyword("true", false) => {
                self.advance(4);
                Ok(Term::literal("true", ns::XSD_BOOLEAN))
            }
            Some(_) if self.looking_at_keyword("false", false) => {
                self.advance(5);
                Ok(Term::literal("false", ns::XSD_BOOLEAN))
            }
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => self.syntax("expected an object, found end of input"),
        }
    }

    fn iri_ref(&mut self) -> Result<String> {
        let (line, column) = (self.line, self.column);
        if self.peek() != Some('<') {
            return self.syntax("expected '<'");
        }
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => iri.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return self.syntax(format!("invalid character '{c}' in IRI"));
                }
                Some(c) => iri.push(c),
                None => return self.syntax("unterminated IRI"),
            }
        }
        match resolve_iri(self.base.as_deref(), &iri) {
            Some(resolved) => Ok(resolved),
            None => Err(TurtleError::RelativeIri { line, column, iri }),
        }
    }

    fn unicode_escape(&mut self) -> Result<char> {
        let digits = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.syntax("invalid escape in IRI"),
        };
        self.hex_char(digits)
    }

    fn hex_char(&mut self, digits: usize) -> Result<char> {
        let mut value = 0u32;
        for _ in 0..digits {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => value = value * 16 + d,
                None => return self.syntax("invalid hexadecimal escape"),
            }
        }
        match char::from_u32(value) {
            Some(c) => Ok(c),
            None => self.syntax(format!("escape U+{value:X} is not a character")),
        }
    }

    fn prefixed_name(&mut self) -> Result<String> {
        let (line, column) = (self.line, self.column);
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !is_name_char(c) {
                return self.syntax(format!("unexpected character '{c}'"));
            }
            prefix.push(c);
            self.bump();
        }
        if self.peek() != Some(':') {
            return self.syntax(format!("unexpected token '{prefix}'"));
        }
        self.bump();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == ':' || c == '%' {
                // a trailing '.' terminates the statement instead
                if c == '.' && !self.peek_at(1).is_some_and(|n| is_name_char(n) || n == ':' || n == '%') {
                    break;
                }
                local.push(c);
                self.bump();
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return self.syntax("invalid escape in local name"),
                }
            } else {
                break;
            }
        }
        match self.prefixes.get(&prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(TurtleError::UnresolvedPrefix {
                line,
                column,
                prefix,
            }),
        }
    }

    fn blank_node(&mut self) -> Result<Term> {
        self.advance(2);
        let mut label = String::new();
        while let Some(c) = self.peek() {
            let ok = if label.is_empty() {
                is_name_start(c) || c.is_ascii_digit()
            } else {
                is_name_char(c)
            };
            if !ok || (c == '.' && !self.peek_at(1).is_some_and(is_name_char)) {
                break;
            }
            label.push(c);
            self.bump();
        }
        if label.is_empty() {
            return self.syntax("empty blank node label");
        }
        Ok(Term::Blank(label))
    }

    fn string(&mut self) -> Result<String> {
        let quote = self.bump().expect("caller checked the opening quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.advance(2);
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return self.syntax("unterminated string literal"),
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.advance(2);
                        break;
                    }
                    value.push(c);
                }
                Some('\n') | Some('\r') if !long => {
                    return self.syntax("newline in short string literal");
                }
                Some('\\') => {
                    let escaped = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return self.syntax("invalid escape in string literal"),
                    };
                    value.push(escaped);
                }
                Some(c) => value.push(c),
            }
        }
        Ok(value)
    }

    fn rdf_literal(&mut self) -> Result<Term> {
        let value = self.string()?;
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || (c == '-' && !tag.is_empty()) {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if tag.is_empty() {
                    return self.syntax("empty language tag");
                }
                Ok(Term::Literal(Literal::lang_string(&value, &tag.to_ascii_lowercase())))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.advance(2);
                let datatype = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::literal(value, datatype))
            }
            _ => Ok(Term::string(value)),
        }
    }

    fn numeric_literal(&mut self) -> Result<Term> {
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            text.push(sign);
            self.bump();
        }
        let digits = |p: &mut Parser, text: &mut String| {
            let mut n = 0;
            while let Some(c) = p.peek().filter(char::is_ascii_digit) {
                text.push(c);
                p.bump();
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut text);
        let mut frac_digits = 0;
        let mut datatype = ns::XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            frac_digits = digits(self, &mut text);
            datatype = ns::XSD_DECIMAL;
        }
        if int_digits == 0 && frac_digits == 0 {
            return self.syntax("malformed number");
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                text.push(sign);
                self.bump();
            }
            if digits(self, &mut text) == 0 {
                return self.syntax("malformed exponent");
            }
            datatype = ns::XSD_DOUBLE;
        }
        Ok(Term::literal(text, datatype))
    }
}

fn has_scheme(iri: &str) -> bool {
    let mut chars = iri.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        if c == ':' {
            return true;
        }
        if !(c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
            return false;
        }
    }
    false
}

fn remove_dot_segments(path: &str) -> String {
    let mut output: Vec<&str> = Vec::new();
    let segments: Vec<&str> = path.split('/').collect();
    let last = segments.len() - 1;
    for (i, seg) in segments.iter().enumerate() {
        match *seg {
            "." => {
                if i == last {
                    output.push("");
                }
            }
            ".." => {
                if output.len() > 1 {
                    output.pop();
                }
                if i == last {
                    output.push("");
                }
            }
            s => output.push(s),
        }
    }
    output.join("/")
}

/// Resolves `reference` against `base`. Returns `None` for a relative
/// reference with no usable base.
pub(crate) fn resolve_iri(base: Option<&str>, reference: &str) -> Option<String> {
    if has_scheme(reference) {
        return Some(reference.to_owned());
    }
    let base = base.filter(|b| has_scheme(b))?;
    let base = base.split('#').next().unwrap_or(base);
    let (scheme, rest) = base.split_once(':')?;
    let (authority, path_and_query) = match rest.strip_prefix("//") {
        Some(after) => {
            let end = after.find(['/', '?']).unwrap_or(after.len());
            (Some(&after[..end]), &after[end..])
        }
        None => (None, rest),
    };
    let (base_path, _) = path_and_query.split_once('?').unwrap_or((path_and_query, ""));
    let prefix = match authority {
        Some(a) => format!("{scheme}://{a}"),
        None => format!("{scheme}:"),
    };
    let resolved = if reference.is_empty() {
        base.to_owned()
    } else if reference.starts_with('#') {
        format!("{base}{reference}")
    } else if let Some(net) = reference.strip_prefix("//") {
        format!("{scheme}://{net}")
    } else if reference.starts_with('?') {
        format!("{prefix}{base_path}{reference}")
    } else {
        let (ref_path, tail) = match reference.find(['?', '#']) {
            Some(i) => reference.split_at(i),
            None => (reference, ""),
        };
        let merged = if ref_path.starts_with('/') {
            ref_path.to_owned()
        } else if authority.is_some() && base_path.is_empty() {
            format!("/{ref_path}")
        } else {
            match base_path.rfind('/') {
                Some(i) => format!("{}{}", &base_path[..=i], ref_path),
                None => ref_path.to_owned(),
            }
        };
        format!("{prefix}{}{tail}", remove_dot_segments(&merged))
    };
    Some(resolved)
}
