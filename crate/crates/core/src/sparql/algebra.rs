use std::fmt::{self, Write};

use crate::rdf::Term;

/// A query variable, printed as `?name`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub String);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Var(Var),
    Term(Term),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Var(v) => v.fmt(f),
            Slot::Term(t) => t.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    IsLiteral(Var),
    /// `datatype(?v) IN (...)`, false for non-literals.
    DatatypeIn(Var, Vec<String>),
    SameTerm(Var, Var),
    Not(Box<Expr>),
    And(Vec<Expr>),
    NotExists(Box<Pattern>),
    /// `COUNT(DISTINCT ?v) >= n` or `> n`, only in HAVING.
    CountAtLeast(Var, u64),
}

/// One element of a group graph pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Triple(Slot, Slot, Slot),
    Group(Vec<Pattern>),
    Union(Vec<Pattern>),
    Filter(Expr),
    Values(Vec<Var>, Vec<Vec<Term>>),
    Minus(Box<Pattern>),
    Select(Box<Select>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Select {
    pub distinct: bool,
    pub projection: Vec<Var>,
    pub pattern: Vec<Pattern>,
    pub group_by: Vec<Var>,
    pub having: Option<Expr>,
}

struct Out<'a> {
    w: &'a mut String,
    depth: usize,
}

impl Out<'_> {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.w.push_str("  ");
        }
        self.w.push_str(text);
        self.w.push('\n');
    }
}

fn expr(e: &Expr, w: &mut String) {
    match e {
        Expr::IsLiteral(v) => write!(w, "isLiteral({v})").unwrap(),
        Expr::DatatypeIn(v, dts) => {
            write!(w, "(isLiteral({v}) && datatype({v}) IN (").unwrap();
            for (k, d) in dts.iter().enumerate() {
                if k > 0 {
                    w.push_str(", ");
                }
                write!(w, "<{d}>").unwrap();
            }
            w.push_str("))");
        }
        Expr::SameTerm(a, b) => write!(w, "sameTerm({a}, {b})").unwrap(),
        Expr::Not(e) => {
            w.push_str("!(");
            expr(e, w);
            w.push(')');
        }
        Expr::And(es) => {
            w.push('(');
            for (k, e) in es.iter().enumerate() {
                if k > 0 {
                    w.push_str(" && ");
                }
                expr(e, w);
            }
            if es.is_empty() {
                w.push_str("true");
            }
            w.push(')');
        }
        Expr::NotExists(_) => unreachable!("printed as a block"),
        Expr::CountAtLeast(v, n) => write!(w, "COUNT(DISTINCT {v}) >= {n}").unwrap(),
    }
}

fn pattern(p: &Pattern, out: &mut Out<'_>) {
    match p {
        Pattern::Triple(s, pr, o) => out.line(&format!("{s} {pr} {o} .")),
        Pattern::Group(ps) => {
            out.line("{");
            out.depth += 1;
            for p in ps {
                pattern(p, out);
            }
            out.depth -= 1;
            out.line("}");
        }
        Pattern::Union(branches) => {
            if branches.is_empty() {
                out.line("VALUES () { }");
                return;
            }
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    out.line("UNION");
                }
                let group = match b {
                    Pattern::Group(_) => b.clone(),
                    other => Pattern::Group(vec![other.clone()]),
                };
                pattern(&group, out);
            }
        }
        Pattern::Filter(Expr::NotExists(inner)) => {
            out.line("FILTER NOT EXISTS {");
            out.depth += 1;
            group_body(inner, out);
            out.depth -= 1;
            out.line("}");
        }
        Pattern::Filter(e) => {
            let mut s = String::from("FILTER(");
            expr(e, &mut s);
            s.push(')');
            out.line(&s);
        }
        Pattern::Values(vars, rows) => {
            let mut s = String::from("VALUES (");
            s.push_str(&vars.iter().map(Var::to_string).collect::<Vec<_>>().join(" "));
            s.push_str(") {");
            for row in rows {
                s.push_str(" (");
                s.push_str(&row.iter().map(Term::to_string).collect::<Vec<_>>().join(" "));
                s.push(')');
            }
            s.push_str(" }");
            out.line(&s);
        }
        Pattern::Minus(inner) => {
            out.line("MINUS {");
            out.depth += 1;
            group_body(inner, out);
            out.depth -= 1;
            out.line("}");
        }
        Pattern::Select(sel) => {
            out.line("{");
            out.depth += 1;
            select(sel, out);
            out.depth -= 1;
            out.line("}");
        }
    }
}

fn group_body(p: &Pattern, out: &mut Out<'_>) {
    match p {
        Pattern::Group(ps) => ps.iter().for_each(|p| pattern(p, out)),
        other => pattern(other, out),
    }
}

fn select(sel: &Select, out: &mut Out<'_>) {
    let vars: Vec<String> = sel.projection.iter().map(Var::to_string).collect();
    let distinct = if sel.distinct { "DISTINCT " } else { "" };
    out.line(&format!("SELECT {distinct}{} WHERE {{", vars.join(" ")));
    out.depth += 1;
    for p in &sel.pattern {
        pattern(p, out);
    }
    out.depth -= 1;
    out.line("}");
    if !sel.group_by.is_empty() {
        let vars: Vec<String> = sel.group_by.iter().map(Var::to_string).collect();
        out.line(&format!("GROUP BY {}", vars.join(" ")));
    }
    if let Some(h) = &sel.having {
        let mut s = String::from("HAVING (");
        expr(h, &mut s);
        s.push(')');
        out.line(&s);
    }
}

impl Select {
    /// The query in SPARQL 1.1 syntax.
    pub fn to_sparql(&self) -> String {
        let mut w = String::new();
        select(self, &mut Out { w: &mut w, depth: 0 });
        w
    }
}
