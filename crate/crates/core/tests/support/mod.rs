//! Random instances and independent reference evaluators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cwdl::constraint::{Axiom, AxiomSet, ClassExpr, PropExpr};
use cwdl::rdf::ns::{RDF_TYPE, XSD_DECIMAL, XSD_INTEGER, XSD_STRING};
use cwdl::{Graph, Term, Triple};
use proptest::prelude::*;
use proptest::strategy::{BoxedStrategy, Union};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const NS: &str = "http://example.org/t/";

pub fn iri(name: &str) -> String {
    format!("{NS}{name}")
}

pub fn node(name: &str) -> Term {
    Term::iri(iri(name))
}

/// A runner with a fixed seed and no failure persistence.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

const INDIVIDUALS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const PROPERTIES: [&str; 3] = ["p", "q", "r"];
const CLASSES: [&str; 2] = ["A", "B"];

fn literals() -> Vec<Term> {
    vec![
        Term::string("s1"),
        Term::string("s2"),
        Term::literal("1", XSD_INTEGER),
        Term::literal("2", XSD_INTEGER),
    ]
}

#[derive(Debug, Clone, Copy)]
enum Object {
    Individual(usize),
    Literal(usize),
    Class(usize),
    Property(usize),
}

/// Names a random expression may use: everything the graph binds.
#[derive(Debug, Clone)]
pub struct Env {
    pub classes: Vec<String>,
    pub properties: Vec<String>,
    pub domain: Vec<Term>,
    /// Nodes in subject or object position, the only terms axioms may name.
    pub individuals: Vec<Term>,
}

impl Env {
    pub fn of(g: &Graph) -> Env {
        let naive = Naive::new(g);
        Env {
            classes: naive.classes.iter().cloned().collect(),
            properties: naive.properties.iter().cloned().collect(),
            domain: naive.domain.iter().cloned().collect(),
            individuals: g
                .iter()
                .flat_map(|t| [t.subject(), t.object()])
                .filter(|t| !t.is_literal())
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }
}

/// Small graphs over at most eight domain elements: up to three
/// individuals, two properties and two classes plus `rdf:type`.
pub fn small_graph() -> BoxedStrategy<Graph> {
    (1..=3usize, 1..=2usize, 0..=2usize)
        .prop_flat_map(|(ni, np, nc)| {
            let object = prop_oneof![
                6 => (0..ni).prop_map(Object::Individual),
                3 => (0..4usize).prop_map(Object::Literal),
                1 => (0..np).prop_map(Object::Property),
            ];
            let object = if nc > 0 {
                prop_oneof![4 => object, 1 => (0..nc).prop_map(Object::Class)].boxed()
            } else {
                object.boxed()
            };
            let edges = prop::collection::vec((0..ni, 0..np, object), 1..10);
            let types = prop::collection::vec((0..ni, 0..nc.max(1)), 0..5);
            (edges, types, Just(nc))
        })
        .prop_map(|(edges, types, nc)| {
            let lits = literals();
            let mut g = Graph::new();
            for (s, p, o) in edges {
                let o = match o {
                    Object::Individual(k) => node(INDIVIDUALS[k]),
                    Object::Literal(k) => lits[k].clone(),
                    Object::Class(k) => node(CLASSES[k]),
                    Object::Property(k) => node(PROPERTIES[k]),
                };
                g.insert(Triple::new(node(INDIVIDUALS[s]), node(PROPERTIES[p]), o).unwrap());
            }
            if nc > 0 {
                for (s, c) in types {
                    g.insert(Triple::new(node(INDIVIDUALS[s]), Term::iri(RDF_TYPE), node(CLASSES[c])).unwrap());
                }
            }
            g
        })
        .boxed()
}

fn pick<T: Clone + std::fmt::Debug + 'static>(items: Vec<T>) -> BoxedStrategy<T> {
    prop::sample::select(items).boxed()
}

fn class_leaf(env: &Env) -> BoxedStrategy<ClassExpr> {
    let mut members = env.individuals.clone();
    members.extend(literals());
    let datatypes = vec![XSD_STRING.to_owned(), XSD_INTEGER.to_owned(), XSD_DECIMAL.to_owned()];
    let mut leaves: Vec<BoxedStrategy<ClassExpr>> = vec![
        Just(ClassExpr::Thing).boxed(),
        prop::sample::subsequence(members, 0..=2).prop_map(ClassExpr::Nominal).boxed(),
        pick(datatypes).prop_map(ClassExpr::Datatype).boxed(),
    ];
    if !env.classes.is_empty() {
        leaves.push(pick(env.classes.clone()).prop_map(ClassExpr::Named).boxed());
        leaves.push(pick(env.classes.clone()).prop_map(ClassExpr::Named).boxed());
    }
    Union::new(leaves).boxed()
}

pub fn arb_prop(env: &Env) -> BoxedStrategy<PropExpr> {
    let leaf = pick(env.properties.clone()).prop_map(PropExpr::Named);
    let domain = class_leaf(env);
    leaf.prop_recursive(2, 6, 2, move |inner| {
        prop_oneof![
            2 => inner.clone(),
            1 => inner.clone().prop_map(PropExpr::inv),
            1 => (inner.clone(), inner.clone()).prop_map(|(p, q)| PropExpr::chain(p, q)),
            1 => (inner, domain.clone()).prop_map(|(p, d)| PropExpr::restrict(p, d)),
        ]
    })
    .boxed()
}

pub fn arb_class(env: &Env) -> BoxedStrategy<ClassExpr> {
    let prop = arb_prop(env);
    class_leaf(env)
        .prop_recursive(3, 24, 2, move |inner| {
            let q = prop::option::of(inner.clone());
            prop_oneof![
                prop::collection::vec(inner.clone(), 2).prop_map(ClassExpr::And),
                prop::collection::vec(inner.clone(), 2).prop_map(ClassExpr::Or),
                inner.clone().prop_map(ClassExpr::not),
                (prop.clone(), inner.clone()).prop_map(|(p, c)| ClassExpr::all(p, c)),
                (prop.clone(), inner.clone()).prop_map(|(p, c)| ClassExpr::some(p, c)),
                (0..3u32, prop.clone(), q.clone()).prop_map(|(k, p, q)| ClassExpr::min(k, p, q)),
                (0..3u32, prop.clone(), q.clone()).prop_map(|(k, p, q)| ClassExpr::max(k, p, q)),
                (0..3u32, prop.clone(), q).prop_map(|(k, p, q)| ClassExpr::exact(k, p, q)),
            ]
        })
        .boxed()
}

pub fn arb_axiom(env: &Env) -> BoxedStrategy<Axiom> {
    let c = arb_class(env);
    let p = arb_prop(env);
    let individuals = env.individuals.clone();
    prop_oneof![
        3 => (c.clone(), c.clone()).prop_map(|(l, r)| Axiom::SubClass(l, r)),
        1 => (c.clone(), c.clone()).prop_map(|(l, r)| Axiom::EquivClass(l, r)),
        1 => (p.clone(), p).prop_map(|(l, r)| Axiom::SubProp(l, r)),
        1 => (pick(individuals), c).prop_map(|(t, c)| Axiom::Member(t, c)),
    ]
    .boxed()
}

/// A small graph with one axiom over its vocabulary.
pub fn checking_case() -> BoxedStrategy<(Graph, Axiom)> {
    small_graph()
        .prop_flat_map(|g| {
            let env = Env::of(&g);
            (Just(g), arb_axiom(&env))
        })
        .boxed()
}

/// A set-theoretic evaluator that works on graph terms directly, with no
/// interning, indexing or caching.
pub struct Naive<'g> {
    triples: Vec<&'g Triple>,
    pub domain: BTreeSet<Term>,
    pub classes: BTreeSet<String>,
    pub properties: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unevaluable;

type R<T> = Result<T, Unevaluable>;

fn has_data(c: &ClassExpr) -> bool {
    match c {
        ClassExpr::Datatype(_) => true,
        ClassExpr::Nominal(ts) => ts.iter().any(|t| matches!(t, Term::Literal(_))),
        ClassExpr::And(cs) | ClassExpr::Or(cs) => cs.iter().any(has_data),
        _ => false,
    }
}

fn in_value_space(datatype: &str, lit: &cwdl::Literal) -> bool {
    match datatype {
        XSD_DECIMAL => lit.datatype() == XSD_INTEGER || lit.datatype() == XSD_DECIMAL,
        d => lit.datatype() == d,
    }
}

impl<'g> Naive<'g> {
    pub fn new(g: &'g Graph) -> Self {
        let triples: Vec<&Triple> = g.iter().collect();
        let mut domain = BTreeSet::new();
        let mut classes = BTreeSet::new();
        let mut properties = BTreeSet::new();
        for t in &triples {
            domain.insert(t.subject().clone());
            domain.insert(t.predicate().clone());
            if !t.object().is_literal() {
                domain.insert(t.object().clone());
            }
            if let Term::Iri(p) = t.predicate() {
                properties.insert(p.clone());
                if p == RDF_TYPE {
                    if let Term::Iri(c) = t.object() {
                        classes.insert(c.clone());
                    }
                }
            }
        }
        Naive {
            triples,
            domain,
            classes,
            properties,
        }
    }

    pub fn prop(&self, p: &PropExpr) -> R<BTreeSet<(Term, Term)>> {
        Ok(match p {
            PropExpr::Named(iri) => {
                if !self.properties.contains(iri) {
                    return Err(Unevaluable);
                }
                self.triples
                    .iter()
                    .filter(|t| t.predicate() == &Term::iri(iri.as_str()))
                    .map(|t| (t.subject().clone(), t.object().clone()))
                    .collect()
            }
            PropExpr::Inv(q) => self
                .prop(q)?
                .into_iter()
                .filter(|(_, y)| !y.is_literal())
                .map(|(x, y)| (y, x))
                .collect(),
            PropExpr::Chain(a, b) => {
                let first = self.prop(a)?;
                let second = self.prop(b)?;
                let mut out = BTreeSet::new();
                for (x, y) in &first {
                    for (y2, z) in &second {
                        if y == y2 && !y.is_literal() {
                            out.insert((x.clone(), z.clone()));
                        }
                    }
                }
                out
            }
            PropExpr::Restrict(q, dom) => {
                let d = self.class(dom)?;
                self.prop(q)?.into_iter().filter(|(x, _)| d.contains(x)).collect()
            }
        })
    }

    fn fillers(&self, rel: &BTreeSet<(Term, Term)>, x: &Term) -> Vec<Term> {
        rel.iter().filter(|(s, _)| s == x).map(|(_, o)| o.clone()).collect()
    }

    /// Whether a node or literal belongs to `c`.
    pub fn has(&self, f: &Term, c: &ClassExpr) -> R<bool> {
        let nodes = self.class(c)?;
        Ok(match f {
            Term::Literal(lit) => match c {
                ClassExpr::Datatype(d) => in_value_space(d, lit),
                ClassExpr::Nominal(ts) => ts.contains(f),
                ClassExpr::And(cs) => {
                    let mut all = true;
                    for c in cs {
                        all &= self.has(f, c)?;
                    }
                    all
                }
                ClassExpr::Or(cs) => {
                    let mut any = false;
                    for c in cs {
                        any |= self.has(f, c)?;
                    }
                    any
                }
                _ => false,
            },
            node => nodes.contains(node),
        })
    }

    fn count(&self, x: &Term, p: &PropExpr, q: &Option<Box<ClassExpr>>) -> R<usize> {
        let rel = self.prop(p)?;
        let mut n = 0;
        for f in self.fillers(&rel, x) {
            if match q {
                Some(q) => self.has(&f, q)?,
                None => true,
            } {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn class(&self, c: &ClassExpr) -> R<BTreeSet<Term>> {
        let mut out = BTreeSet::new();
        match c {
            ClassExpr::Named(iri) => {
                if !self.classes.contains(iri) {
                    return Err(Unevaluable);
                }
                for t in &self.triples {
                    if t.predicate() == &Term::iri(RDF_TYPE) && t.object() == &Term::iri(iri.as_str()) {
                        out.insert(t.subject().clone());
                    }
                }
            }
            ClassExpr::Thing => out = self.domain.clone(),
            ClassExpr::Nominal(ts) => {
                for t in ts.iter().filter(|t| !t.is_literal()) {
                    if !self.domain.contains(t) {
                        return Err(Unevaluable);
                    }
                    out.insert(t.clone());
                }
            }
            ClassExpr::Datatype(_) => {}
            ClassExpr::And(cs) => {
                out = self.domain.clone();
                for c in cs {
                    let s = self.class(c)?;
                    out.retain(|x| s.contains(x));
                }
            }
            ClassExpr::Or(cs) => {
                for c in cs {
                    out.extend(self.class(c)?);
                }
            }
            ClassExpr::Not(inner) => {
                if has_data(inner) {
                    return Err(Unevaluable);
                }
                let s = self.class(inner)?;
                out = self.domain.iter().filter(|x| !s.contains(*x)).cloned().collect();
            }
            ClassExpr::All(p, q) | ClassExpr::Some(p, q) => {
                let rel = self.prop(p)?;
                self.class(q)?;
                for x in &self.domain {
                    let mut good = 0;
                    let fillers = self.fillers(&rel, x);
                    for f in &fillers {
                        good += self.has(f, q)? as usize;
                    }
                    let keep = match c {
                        ClassExpr::All(..) => good == fillers.len(),
                        _ => good > 0,
                    };
                    if keep {
                        out.insert(x.clone());
                    }
                }
            }
            ClassExpr::Min(k, p, q) | ClassExpr::Max(k, p, q) | ClassExpr::Exact(k, p, q) => {
                if let Some(q) = q {
                    self.class(q)?;
                }
                self.prop(p)?;
                for x in &self.domain {
                    let n = self.count(x, p, q)?;
                    let k = *k as usize;
                    let keep = match c {
                        ClassExpr::Min(..) => n >= k,
                        ClassExpr::Max(..) => n <= k,
                        _ => n == k,
                    };
                    if keep {
                        out.insert(x.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Number of witnesses the axiom has, zero when it holds.
    pub fn violations(&self, a: &Axiom) -> R<usize> {
        Ok(match a {
            Axiom::SubClass(l, r) => {
                let (l, r) = (self.class(l)?, self.class(r)?);
                l.difference(&r).count()
            }
            Axiom::EquivClass(l, r) => {
                let (l, r) = (self.class(l)?, self.class(r)?);
                l.symmetric_difference(&r).count()
            }
            Axiom::SubProp(l, r) => {
                let (l, r) = (self.prop(l)?, self.prop(r)?);
                l.difference(&r).count()
            }
            Axiom::Member(t, c) => {
                if !self.domain.contains(t) {
                    return Err(Unevaluable);
                }
                usize::from(!self.class(c)?.contains(t))
            }
            Axiom::Different(ts) => {
                let distinct: BTreeSet<&Term> = ts.iter().collect();
                ts.len() - distinct.len()
            }
        })
    }
}

/// Recognition instances: two to six individuals, one to three
/// properties, one or two new classes, each with one monotone definition.
pub fn recognition_case() -> BoxedStrategy<(Graph, AxiomSet)> {
    (2..=6usize, 1..=3usize, 1..=2usize)
        .prop_flat_map(|(ni, np, nc)| {
            let edges = prop::collection::vec((0..ni, 0..np, 0..ni), 0..12);
            let defs = prop::collection::vec((any::<bool>(), monotone_body(ni, np, nc)), nc);
            (Just((ni, np)), edges, defs)
        })
        .prop_map(|((ni, np), mut edges, defs)| {
            for k in 0..np.max(ni) {
                edges.push((k % ni, k % np, (k + 1) % ni));
            }
            let mut g = Graph::new();
            for (s, p, o) in edges {
                g.insert(Triple::iris(&iri(INDIVIDUALS[s]), &iri(PROPERTIES[p]), &iri(INDIVIDUALS[o])));
            }
            let axioms = defs.into_iter().enumerate().map(|(k, (equivalence, body))| {
                let name = ClassExpr::named(iri(&format!("D{k}")));
                if equivalence {
                    Axiom::EquivClass(name, body)
                } else {
                    Axiom::SubClass(name, body)
                }
            });
            (g, AxiomSet::from_axioms(axioms).unwrap())
        })
        .boxed()
}

fn monotone_body(ni: usize, np: usize, nc: usize) -> BoxedStrategy<ClassExpr> {
    let prop = prop::sample::select(PROPERTIES[..np].to_vec())
        .prop_flat_map(|p| prop_oneof![Just(PropExpr::named(iri(p))), Just(PropExpr::inv(PropExpr::named(iri(p))))]);
    let members: Vec<Term> = INDIVIDUALS[..ni].iter().map(|n| node(n)).collect();
    let leaf = prop_oneof![
        3 => (0..nc).prop_map(|k| ClassExpr::named(iri(&format!("D{k}")))),
        1 => Just(ClassExpr::Thing),
        1 => prop::sample::subsequence(members, 0..=2).prop_map(ClassExpr::Nominal),
    ];
    leaf.prop_recursive(2, 8, 2, move |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2).prop_map(ClassExpr::And),
            prop::collection::vec(inner.clone(), 2).prop_map(ClassExpr::Or),
            (prop.clone(), inner.clone()).prop_map(|(p, c)| ClassExpr::some(p, c)),
            (prop.clone(), inner.clone()).prop_map(|(p, c)| ClassExpr::all(p, c)),
            (1..3u32, prop.clone(), inner).prop_map(|(k, p, c)| ClassExpr::min(k, p, Some(c))),
        ]
    })
    .boxed()
}
