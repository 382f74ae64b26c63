use std::fmt::{self, Write};

use super::{Axiom, ClassExpr, PropExpr};
use crate::rdf::Term;

/// Prints expressions in the constraint syntax, abbreviating IRIs with
/// the given prefixes where the local part allows it.
#[derive(Debug, Clone, Default)]
pub struct Printer {
    prefixes: Vec<(String, String)>,
}

fn plain_local(local: &str) -> bool {
    local
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl Printer {
    pub fn with_prefixes<'a>(prefixes: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut prefixes: Vec<(String, String)> =
            prefixes.into_iter().map(|(p, ns)| (p.to_owned(), ns.to_owned())).collect();
        // longest namespace first, so the most specific prefix wins
        prefixes.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));
        Printer { prefixes }
    }

    pub fn iri<W: Write>(&self, w: &mut W, iri: &str) -> fmt::Result {
        for (prefix, ns) in &self.prefixes {
            if let Some(local) = iri.strip_prefix(ns.as_str()) {
                if plain_local(local) {
                    return write!(w, "{prefix}:{local}");
                }
            }
        }
        write!(w, "<{iri}>")
    }

    pub fn term<W: Write>(&self, w: &mut W, t: &Term) -> fmt::Result {
        match t {
            Term::Iri(iri) => self.iri(w, iri),
            Term::Blank(label) => write!(w, "_:{label}"),
            Term::Literal(lit) => {
                let plain = lit.to_string();
                // re-abbreviate the datatype IRI of a typed literal
                match plain.rsplit_once("^^<") {
                    Some((head, _)) if lit.language_parts().is_none() => {
                        w.write_str(head)?;
                        w.write_str("^^")?;
                        self.iri(w, lit.datatype())
                    }
                    _ => w.write_str(&plain),
                }
            }
        }
    }

    fn list<W: Write>(&self, w: &mut W, name: &str, items: &[ClassExpr]) -> fmt::Result {
        write!(w, "{name}(")?;
        for (i, c) in items.iter().enumerate() {
            if i > 0 {
                w.write_str(", ")?;
            }
            self.class(w, c)?;
        }
        w.write_str(")")
    }

    fn counted<W: Write>(&self, w: &mut W, name: &str, n: u32, p: &PropExpr, q: &Option<Box<ClassExpr>>) -> fmt::Result {
        write!(w, "{name}({n}, ")?;
        self.prop(w, p)?;
        if let Some(q) = q {
            w.write_str(", ")?;
            self.class(w, q)?;
        }
        w.write_str(")")
    }

    pub fn class<W: Write>(&self, w: &mut W, c: &ClassExpr) -> fmt::Result {
        match c {
            ClassExpr::Named(iri) => self.iri(w, iri),
            ClassExpr::Thing => w.write_str("Thing"),
            ClassExpr::Nominal(ts) => {
                w.write_str("Nominal(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        w.write_str(" ")?;
                    }
                    self.term(w, t)?;
                }
                w.write_str(")")
            }
            ClassExpr::Datatype(iri) => {
                w.write_str("Datatype(")?;
                self.iri(w, iri)?;
                w.write_str(")")
            }
            ClassExpr::And(cs) => self.list(w, "And", cs),
            ClassExpr::Or(cs) => self.list(w, "Or", cs),
            ClassExpr::Not(c) => self.list(w, "Not", std::slice::from_ref(c)),
            ClassExpr::All(p, c) => self.restriction(w, "All", p, c),
            ClassExpr::Some(p, c) => self.restriction(w, "Some", p, c),
            ClassExpr::Min(n, p, q) => self.counted(w, "Min", *n, p, q),
            ClassExpr::Max(n, p, q) => self.counted(w, "Max", *n, p, q),
            ClassExpr::Exact(n, p, q) => self.counted(w, "Exact", *n, p, q),
        }
    }

    fn restriction<W: Write>(&self, w: &mut W, name: &str, p: &PropExpr, c: &ClassExpr) -> fmt::Result {
        write!(w, "{name}(")?;
        self.prop(w, p)?;
        w.write_str(", ")?;
        self.class(w, c)?;
        w.write_str(")")
    }

    pub fn prop<W: Write>(&self, w: &mut W, p: &PropExpr) -> fmt::Result {
        match p {
            PropExpr::Named(iri) => self.iri(w, iri),
            PropExpr::Inv(p) => {
                w.write_str("Inv(")?;
                self.prop(w, p)?;
                w.write_str(")")
            }
            PropExpr::Chain(p, q) => {
                w.write_str("Chain(")?;
                self.prop(w, p)?;
                w.write_str(", ")?;
                self.prop(w, q)?;
                w.write_str(")")
            }
            PropExpr::Restrict(p, c) => self.restriction(w, "Restrict", p, c),
        }
    }

    pub fn axiom<W: Write>(&self, w: &mut W, a: &Axiom) -> fmt::Result {
        match a {
            Axiom::SubClass(l, r) | Axiom::EquivClass(l, r) => {
                self.class(w, l)?;
                w.write_str(if matches!(a, Axiom::SubClass(..)) { " SubClassOf " } else { " EquivalentTo " })?;
                self.class(w, r)
            }
            Axiom::SubProp(l, r) => {
                self.prop(w, l)?;
                w.write_str(" SubPropertyOf ")?;
                self.prop(w, r)
            }
            Axiom::Member(t, c) => {
                self.term(w, t)?;
                w.write_str(" Type ")?;
                self.class(w, c)
            }
            Axiom::Different(ts) => {
                w.write_str("Different(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        w.write_str(", ")?;
                    }
                    self.term(w, t)?;
                }
                w.write_str(")")
            }
        }
    }

    pub fn axiom_to_string(&self, a: &Axiom) -> String {
        let mut s = String::new();
        self.axiom(&mut s, a).expect("writing to a String cannot fail");
        s
    }

    pub fn class_to_string(&self, c: &ClassExpr) -> String {
        let mut s = String::new();
        self.class(&mut s, c).expect("writing to a String cannot fail");
        s
    }
}
