//! Reader for `.dlc` constraint files.
//!
//! A file is a sequence of lines holding a `Prefix`/`Base` declaration or
//! one axiom. An axiom may continue over several lines while parentheses
//! are open. `#` starts a comment outside IRIs and strings.

use std::collections::{BTreeSet, HashMap};

use super::{Axiom, AxiomSet, ClassExpr, ConstraintError, PropExpr};
use crate::interpretation::is_standard_datatype;
use crate::rdf::{ns, resolve_iri, Literal, Term};

type Result<T> = std::result::Result<T, ConstraintError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    Newline,
    Iri(String),
    PName(String, String),
    Blank(String),
    Str(String),
    LangTag(String),
    Carets,
    Int(String),
    Word(String),
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> ConstraintError {
        ConstraintError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let pos = self.pos();
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' => {
                    self.bump();
                    out.push((Tok::Newline, pos));
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '(' | ')' | ',' => {
                    self.bump();
                    out.push((
                        match c {
                            '(' => Tok::Open,
                            ')' => Tok::Close,
                            _ => Tok::Comma,
                        },
                        pos,
                    ));
                }
                '<' => out.push((Tok::Iri(self.iri()?), pos)),
                '"' => out.push((Tok::Str(self.string()?), pos)),
                '@' => {
                    self.bump();
                    let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                    if tag.is_empty() {
                        return Err(self.error(pos, "expected a language tag after '@'"));
                    }
                    out.push((Tok::LangTag(tag.to_ascii_lowercase()), pos));
                }
                '^' if self.peek_at(1) == Some('^') => {
                    self.bump();
                    self.bump();
                    out.push((Tok::Carets, pos));
                }
                '_' if self.peek_at(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    let label = self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
                    if label.is_empty() {
                        return Err(self.error(pos, "empty blank node label"));
                    }
                    out.push((Tok::Blank(label), pos));
                }
                c if c.is_ascii_digit() || (matches!(c, '+' | '-') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let mut s = String::new();
                    if matches!(c, '+' | '-') {
                        s.push(c);
                        self.bump();
                    }
                    s.push_str(&self.take_while(|c| c.is_ascii_digit()));
                    out.push((Tok::Int(s), pos));
                }
                c if c.is_alphabetic() || c == '_' || c == ':' => {
                    let name = self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%'));
                    match name.split_once(':') {
                        Some((prefix, local)) => out.push((Tok::PName(prefix.to_owned(), local.to_owned()), pos)),
                        None => out.push((Tok::Word(name), pos)),
                    }
                }
                other => return Err(self.error(pos, format!("unexpected character '{other}'"))),
            }
        }
        out.push((Tok::Newline, self.pos()));
        Ok(out)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| f(c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn iri(&mut self) -> Result<String> {
        let start = self.pos();
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(s),
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.error(start, format!("invalid character {c:?} in IRI")))
                }
                Some(c) => s.push(c),
                None => return Err(self.error(start, "unterminated IRI")),
            }
        }
    }

    fn string(&mut self) -> Result<String> {
        let start = self.pos();
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(s),
                Some('\\') => {
                    let esc = self.pos();
                    match self.bump() {
                        Some('n') => s.push('\n'),
                        Some('r') => s.push('\r'),
                        Some('t') => s.push('\t'),
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some(u @ ('u' | 'U')) => {
                            let width = if u == 'u' { 4 } else { 8 };
                            let hex: String = (0..width).filter_map(|_| self.bump()).collect();
                            let c = u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.error(esc, "invalid unicode escape"))?;
                            s.push(c);
                        }
                        _ => return Err(self.error(esc, "invalid string escape")),
                    }
                }
                Some('\n') | None => return Err(self.error(start, "unterminated string")),
                Some(c) => s.push(c),
            }
        }
    }
}

/// An untyped parse tree; typing happens once the axiom form is known.
#[derive(Debug, Clone)]
enum Node {
    Iri(String, Pos),
    Blank(String, Pos),
    Literal(Literal, Pos),
    Int(String, Pos),
    Word(String, Pos),
    Call(String, Vec<Node>, Pos),
}

impl Node {
    fn pos(&self) -> Pos {
        match self {
            Node::Iri(_, p)
            | Node::Blank(_, p)
            | Node::Literal(_, p)
            | Node::Int(_, p)
            | Node::Word(_, p)
            | Node::Call(_, _, p) => *p,
        }
    }

    fn describe(&self) -> String {
        match self {
            Node::Iri(iri, _) => format!("<{iri}>"),
            Node::Blank(l, _) => format!("_:{l}"),
            Node::Literal(lit, _) => lit.to_string(),
            Node::Int(n, _) => n.clone(),
            Node::Word(w, _) => w.clone(),
            Node::Call(name, _, _) => format!("{name}(...)"),
        }
    }
}

const OPERATORS: [&str; 4] = ["SubClassOf", "EquivalentTo", "SubPropertyOf", "Type"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    depth: usize,
    prefixes: HashMap<String, String>,
    base: Option<String>,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ConstraintError {
    ConstraintError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

impl Parser {
    /// Next token, skipping line breaks inside parentheses.
    fn peek(&self) -> &(Tok, Pos) {
        let mut j = self.i;
        while self.depth > 0 && self.toks[j].0 == Tok::Newline && j + 1 < self.toks.len() {
            j += 1;
        }
        &self.toks[j]
    }

    fn next(&mut self) -> (Tok, Pos) {
        while self.depth > 0 && self.toks[self.i].0 == Tok::Newline && self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        match t.0 {
            Tok::Open => self.depth += 1,
            Tok::Close => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        t
    }

    fn at_end(&self) -> bool {
        self.i + 1 >= self.toks.len()
    }

    fn expect_newline(&mut self) -> Result<()> {
        let (t, pos) = self.next();
        match t {
            Tok::Newline => Ok(()),
            other => Err(syntax(pos, format!("expected end of line, found {}", show(&other)))),
        }
    }

    fn resolve(&self, prefix: &str, local: &str, pos: Pos) -> Result<String> {
        let ns = self.prefixes.get(prefix).ok_or_else(|| ConstraintError::UnresolvedPrefix {
            line: pos.line,
            column: pos.column,
            prefix: prefix.to_owned(),
        })?;
        let local = local.replace('\\', "");
        Ok(format!("{ns}{local}"))
    }

    fn absolute(&self, iri: String, pos: Pos) -> Result<String> {
        resolve_iri(self.base.as_deref(), &iri)
            .ok_or_else(|| syntax(pos, format!("relative IRI <{iri}> but no Base is declared")))
    }

    fn iri_token(&mut self, what: &str) -> Result<(String, Pos)> {
        let (t, pos) = self.next();
        match t {
            Tok::Iri(iri) => Ok((self.absolute(iri, pos)?, pos)),
            Tok::PName(p, l) => Ok((self.resolve(&p, &l, pos)?, pos)),
            other => Err(syntax(pos, format!("expected {what}, found {}", show(&other)))),
        }
    }

    fn node(&mut self) -> Result<Node> {
        let (t, pos) = self.next();
        match t {
            Tok::Iri(iri) => Ok(Node::Iri(self.absolute(iri, pos)?, pos)),
            Tok::PName(p, l) => Ok(Node::Iri(self.resolve(&p, &l, pos)?, pos)),
            Tok::Blank(l) => Ok(Node::Blank(l, pos)),
            Tok::Int(n) => Ok(Node::Int(n, pos)),
            Tok::Str(s) => {
                let lit = match &self.peek().0 {
                    Tok::LangTag(_) => {
                        let Tok::LangTag(tag) = self.next().0 else { unreachable!() };
                        Literal::lang_string(&s, &tag)
                    }
                    Tok::Carets => {
                        self.next();
                        let (dt, _) = self.iri_token("a datatype IRI")?;
                        Literal::new(s, dt)
                    }
                    _ => Literal::string(s),
                };
                Ok(Node::Literal(lit, pos))
            }
            Tok::Word(w) => {
                if self.peek().0 != Tok::Open {
                    return Ok(Node::Word(w, pos));
                }
                self.next();
                let mut args = Vec::new();
                loop {
                    if self.peek().0 == Tok::Close {
                        self.next();
                        break;
                    }
                    if !args.is_empty() && self.peek().0 == Tok::Comma {
                        self.next();
                    }
                    if matches!(self.peek().0, Tok::Newline) {
                        let pos = self.peek().1;
                        return Err(syntax(pos, format!("unclosed '(' after {w}")));
                    }
                    args.push(self.node()?);
                }
                Ok(Node::Call(w, args, pos))
            }
            other => Err(syntax(pos, format!("unexpected {}", show(&other)))),
        }
    }

    /// One side of an axiom, accepting infix `And` between operands.
    fn side(&mut self) -> Result<Node> {
        let first = self.node()?;
        let mut items = vec![first];
        while matches!(&self.peek().0, Tok::Word(w) if w == "And") {
            self.next();
            items.push(self.node()?);
        }
        if items.len() == 1 {
            Ok(items.pop().expect("one item"))
        } else {
            let pos = items[0].pos();
            Ok(Node::Call("And".into(), items, pos))
        }
    }

    fn statement(&mut self, set: &mut AxiomSet, text: &[&str]) -> Result<()> {
        let (tok, pos) = self.peek().clone();
        match tok {
            Tok::Newline => {
                self.next();
                return Ok(());
            }
            Tok::Word(w) if w == "Prefix" || w == "PREFIX" => {
                self.next();
                let (t, p) = self.next();
                let Tok::PName(prefix, local) = t else {
                    return Err(syntax(p, "expected 'pfx:' after Prefix"));
                };
                if !local.is_empty() {
                    return Err(syntax(p, "expected 'pfx:' after Prefix"));
                }
                let (t, p) = self.next();
                let Tok::Iri(iri) = t else {
                    return Err(syntax(p, "expected <iri> in Prefix declaration"));
                };
                let iri = self.absolute(iri, p)?;
                self.prefixes.insert(prefix, iri);
                return self.expect_newline();
            }
            Tok::Word(w) if w == "Base" || w == "BASE" => {
                self.next();
                let (t, p) = self.next();
                let Tok::Iri(iri) = t else {
                    return Err(syntax(p, "expected <iri> in Base declaration"));
                };
                self.base = Some(self.absolute(iri, p)?);
                return self.expect_newline();
            }
            _ => {}
        }
        let start_line = pos.line;
        let axiom = if matches!(&tok, Tok::Word(w) if w == "Different") && self.toks.get(self.i + 1).is_some_and(|t| t.0 == Tok::Open) {
            let node = self.node()?;
            different(node)?
        } else {
            let lhs = self.side()?;
            let (op, op_pos) = self.next();
            let op = match op {
                Tok::Word(w) if OPERATORS.contains(&w.as_str()) => w,
                other => {
                    return Err(syntax(
                        op_pos,
                        format!(
                            "expected SubClassOf, EquivalentTo, SubPropertyOf or Type, found {}",
                            show(&other)
                        ),
                    ))
                }
            };
            let rhs = self.side()?;
            match op.as_str() {
                "SubClassOf" => Axiom::SubClass(class(lhs)?, class(rhs)?),
                "EquivalentTo" => Axiom::EquivClass(class(lhs)?, class(rhs)?),
                "SubPropertyOf" => Axiom::SubProp(prop(lhs)?, prop(rhs)?),
                _ => Axiom::Member(individual(lhs)?, class(rhs)?),
            }
        };
        let end_line = self.peek().1.line;
        self.expect_newline()?;
        let source = text[start_line - 1..end_line.min(text.len())]
            .iter()
            .map(|l| strip_comment(l).trim())
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        set.push(axiom, source, start_line)
    }
}

/// Drops a trailing `#` comment, ignoring `#` inside IRIs and strings.
fn strip_comment(line: &str) -> &str {
    let mut in_iri = false;
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_str => escaped = true,
            '"' if !in_iri => in_str = !in_str,
            '<' if !in_str => in_iri = true,
            '>' if !in_str => in_iri = false,
            '#' if !in_iri && !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Open => "'('".into(),
        Tok::Close => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Newline => "end of line".into(),
        Tok::Iri(i) => format!("<{i}>"),
        Tok::PName(p, l) => format!("{p}:{l}"),
        Tok::Blank(l) => format!("_:{l}"),
        Tok::Str(s) => format!("{s:?}"),
        Tok::LangTag(t) => format!("@{t}"),
        Tok::Carets => "'^^'".into(),
        Tok::Int(n) => n.clone(),
        Tok::Word(w) => format!("'{w}'"),
    }
}

fn arity(name: &str, args: &[Node], allowed: &[usize], pos: Pos) -> Result<()> {
    if allowed.contains(&args.len()) {
        return Ok(());
    }
    let want = allowed.iter().map(usize::to_string).collect::<Vec<_>>().join(" or ");
    Err(syntax(pos, format!("{name} takes {want} arguments, got {}", args.len())))
}

fn count(node: &Node) -> Result<u32> {
    match node {
        Node::Int(n, pos) if !n.starts_with('-') => n
            .trim_start_matches('+')
            .parse()
            .map_err(|_| syntax(*pos, format!("count {n} is too large"))),
        other => Err(syntax(other.pos(), format!("expected a non-negative count, found {}", other.describe()))),
    }
}

fn class(node: Node) -> Result<ClassExpr> {
    match node {
        Node::Iri(iri, _) if is_standard_datatype(&iri) => Ok(ClassExpr::Datatype(iri)),
        Node::Iri(iri, _) => Ok(ClassExpr::Named(iri)),
        Node::Word(w, _) if w == "Thing" => Ok(ClassExpr::Thing),
        Node::Call(name, args, pos) => {
            let mut it = args.clone().into_iter();
            match name.as_str() {
                "Nominal" => Ok(ClassExpr::Nominal(args.into_iter().map(nominal_member).collect::<Result<_>>()?)),
                "Datatype" => {
                    arity(&name, &args, &[1], pos)?;
                    match it.next() {
                        Some(Node::Iri(iri, _)) => Ok(ClassExpr::Datatype(iri)),
                        Some(other) => Err(syntax(other.pos(), format!("expected a datatype IRI, found {}", other.describe()))),
                        None => unreachable!(),
                    }
                }
                "And" | "Or" => {
                    if args.is_empty() {
                        return Err(syntax(pos, format!("{name} needs at least one operand")));
                    }
                    let cs = args.into_iter().map(class).collect::<Result<Vec<_>>>()?;
                    Ok(if name == "And" { ClassExpr::And(cs) } else { ClassExpr::Or(cs) })
                }
                "Not" => {
                    arity(&name, &args, &[1], pos)?;
                    Ok(ClassExpr::not(class(it.next().expect("arity"))?))
                }
                "All" | "Some" => {
                    arity(&name, &args, &[2], pos)?;
                    let p = prop(it.next().expect("arity"))?;
                    let c = class(it.next().expect("arity"))?;
                    Ok(if name == "All" { ClassExpr::all(p, c) } else { ClassExpr::some(p, c) })
                }
                "Min" | "Max" | "Exact" => {
                    arity(&name, &args, &[2, 3], pos)?;
                    let n = count(&it.next().expect("arity"))?;
                    let p = prop(it.next().expect("arity"))?;
                    let q = it.next().map(class).transpose()?;
                    Ok(match name.as_str() {
                        "Min" => ClassExpr::min(n, p, q),
                        "Max" => ClassExpr::max(n, p, q),
                        _ => ClassExpr::exact(n, p, q),
                    })
                }
                _ => Err(syntax(pos, format!("unknown class constructor '{name}'"))),
            }
        }
        Node::Blank(l, pos) => Err(syntax(pos, format!("blank node _:{l} cannot name a class"))),
        other => Err(syntax(other.pos(), format!("expected a class expression, found {}", other.describe()))),
    }
}

fn prop(node: Node) -> Result<PropExpr> {
    match node {
        Node::Iri(iri, _) => Ok(PropExpr::Named(iri)),
        Node::Call(name, args, pos) => {
            let mut it = args.clone().into_iter();
            match name.as_str() {
                "Inv" => {
                    arity(&name, &args, &[1], pos)?;
                    Ok(PropExpr::inv(prop(it.next().expect("arity"))?))
                }
                "Chain" => {
                    arity(&name, &args, &[2], pos)?;
                    let p = prop(it.next().expect("arity"))?;
                    Ok(PropExpr::chain(p, prop(it.next().expect("arity"))?))
                }
                "Restrict" => {
                    arity(&name, &args, &[2], pos)?;
                    let p = prop(it.next().expect("arity"))?;
                    Ok(PropExpr::restrict(p, class(it.next().expect("arity"))?))
                }
                _ => Err(syntax(pos, format!("unknown property constructor '{name}'"))),
            }
        }
        other => Err(syntax(other.pos(), format!("expected a property expression, found {}", other.describe()))),
    }
}

fn individual(node: Node) -> Result<Term> {
    match node {
        Node::Iri(iri, _) => Ok(Term::Iri(iri)),
        Node::Blank(l, _) => Ok(Term::Blank(l)),
        other => Err(syntax(other.pos(), format!("expected an individual, found {}", other.describe()))),
    }
}

fn nominal_member(node: Node) -> Result<Term> {
    match node {
        Node::Literal(lit, _) => Ok(Term::Literal(lit)),
        Node::Int(n, _) => Ok(Term::literal(n, ns::XSD_INTEGER)),
        other => individual(other),
    }
}

fn different(node: Node) -> Result<Axiom> {
    let Node::Call(_, args, pos) = node else { unreachable!("caller checked for a call") };
    if args.len() < 2 {
        return Err(ConstraintError::TooFewIndividuals {
            line: pos.line,
            column: pos.column,
        });
    }
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for a in args {
        let p = a.pos();
        let t = individual(a)?;
        if !seen.insert(t.clone()) {
            return Err(ConstraintError::RepeatedIndividual {
                line: p.line,
                column: p.column,
                term: t,
            });
        }
        terms.push(t);
    }
    Ok(Axiom::Different(terms))
}

/// Parses a constraint file.
pub fn parse_constraints(text: &str) -> Result<AxiomSet> {
    let toks = Lexer {
        chars: text.chars().collect(),
        i: 0,
        line: 1,
        column: 1,
    }
    .tokens()?;
    let mut parser = Parser {
        toks,
        i: 0,
        depth: 0,
        prefixes: HashMap::new(),
        base: None,
    };
    let lines: Vec<&str> = text.lines().collect();
    let mut set = AxiomSet::new();
    while !parser.at_end() {
        parser.depth = 0;
        parser.statement(&mut set, &lines)?;
    }
    Ok(set)
}
