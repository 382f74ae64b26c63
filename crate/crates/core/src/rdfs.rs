//! Finite RDF/RDFS deductive closure by semi-naive forward chaining.
//!
//! The RDFS profile covers domain, range, subproperty and subclass
//! propagation and transitivity, reflexivity of `rdfs:subClassOf` and
//! `rdfs:subPropertyOf` over the classes and properties they mention, and the
//! RDF profile's `rdf:Property` typing of predicates. Axiomatic triples are
//! not materialized, so the closure of the empty graph is empty.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::rdf::{ns, Graph, Term, Triple};

/// A single forward rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `(x p y)` ⇒ `(p rdf:type rdf:Property)`
    Rdf1,
    /// `(p rdfs:domain C), (x p y)` ⇒ `(x rdf:type C)`
    Rdfs2,
    /// `(p rdfs:range C), (x p y)`, `y` not a literal ⇒ `(y rdf:type C)`
    Rdfs3,
    /// `(p rdfs:subPropertyOf q), (q rdfs:subPropertyOf r)` ⇒ `(p rdfs:subPropertyOf r)`
    Rdfs5,
    /// `(p rdfs:subPropertyOf q), (x p y)` ⇒ `(x q y)`
    Rdfs7,
    /// `(C rdfs:subClassOf D), (x rdf:type C)` ⇒ `(x rdf:type D)`
    Rdfs9,
    /// `(C rdfs:subClassOf D), (D rdfs:subClassOf E)` ⇒ `(C rdfs:subClassOf E)`
    Rdfs11,
    /// `(C rdfs:subClassOf D)` ⇒ `(C rdfs:subClassOf C), (D rdfs:subClassOf D)`
    SubClassReflexive,
    /// `(p rdfs:subPropertyOf q)` ⇒ `(p rdfs:subPropertyOf p), (q rdfs:subPropertyOf q)`
    SubPropertyReflexive,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::Rdf1,
        Rule::Rdfs2,
        Rule::Rdfs3,
        Rule::Rdfs5,
        Rule::Rdfs7,
        Rule::Rdfs9,
        Rule::Rdfs11,
        Rule::SubClassReflexive,
        Rule::SubPropertyReflexive,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileName {
    None,
    Rdf,
    Rdfs,
}

impl fmt::Display for ProfileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileName::None => "NONE",
            ProfileName::Rdf => "RDF",
            ProfileName::Rdfs => "RDFS",
        })
    }
}

impl FromStr for ProfileName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(ProfileName::None),
            "rdf" => Ok(ProfileName::Rdf),
            "rdfs" => Ok(ProfileName::Rdfs),
            other => Err(format!("unknown closure profile '{other}' (expected none, rdf or rdfs)")),
        }
    }
}

/// Which rules the closure applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureProfile {
    name: ProfileName,
    rules: Vec<Rule>,
}

impl ClosureProfile {
    pub fn none() -> Self {
        ClosureProfile {
            name: ProfileName::None,
            rules: Vec::new(),
        }
    }

    pub fn rdf() -> Self {
        ClosureProfile {
            name: ProfileName::Rdf,
            rules: vec![Rule::Rdf1],
        }
    }

    pub fn rdfs() -> Self {
        ClosureProfile {
            name: ProfileName::Rdfs,
            rules: Rule::ALL.to_vec(),
        }
    }

    pub fn named(name: ProfileName) -> Self {
        match name {
            ProfileName::None => Self::none(),
            ProfileName::Rdf => Self::rdf(),
            ProfileName::Rdfs => Self::rdfs(),
        }
    }

    /// A profile enabling exactly `rules`; used to test rules in isolation.
    pub fn custom(rules: &[Rule]) -> Self {
        let mut rules = rules.to_vec();
        rules.sort();
        rules.dedup();
        ClosureProfile {
            name: ProfileName::Rdfs,
            rules,
        }
    }

    pub fn name(&self) -> ProfileName {
        self.name
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn enables(&self, rule: Rule) -> bool {
        self.rules.contains(&rule)
    }
}

type Id = u32;
type Encoded = (Id, Id, Id);

/// Term interner plus the indexes the rules join on.
struct Store {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
    literal: Vec<bool>,
    iri: Vec<bool>,
    facts: HashSet<Encoded>,
    by_predicate: HashMap<Id, Vec<(Id, Id)>>,
    instances: HashMap<Id, Vec<Id>>,
    domains: HashMap<Id, Vec<Id>>,
    ranges: HashMap<Id, Vec<Id>>,
    super_classes: HashMap<Id, Vec<Id>>,
    sub_classes: HashMap<Id, Vec<Id>>,
    super_props: HashMap<Id, Vec<Id>>,
    sub_props: HashMap<Id, Vec<Id>>,
    rdf_type: Id,
    rdf_property: Id,
    domain: Id,
    range: Id,
    sub_class_of: Id,
    sub_property_of: Id,
}

impl Store {
    fn new() -> Self {
        let mut store = Store {
            terms: Vec::new(),
            ids: HashMap::new(),
            literal: Vec::new(),
            iri: Vec::new(),
            facts: HashSet::new(),
            by_predicate: HashMap::new(),
            instances: HashMap::new(),
            domains: HashMap::new(),
            ranges: HashMap::new(),
            super_classes: HashMap::new(),
            sub_classes: HashMap::new(),
            super_props: HashMap::new(),
            sub_props: HashMap::new(),
            rdf_type: 0,
            rdf_property: 0,
            domain: 0,
            range: 0,
            sub_class_of: 0,
            sub_property_of: 0,
        };
        store.rdf_type = store.intern(&Term::iri(ns::RDF_TYPE));
        store.rdf_property = store.intern(&Term::iri(ns::RDF_PROPERTY));
        store.domain = store.intern(&Term::iri(ns::RDFS_DOMAIN));
        store.range = store.intern(&Term::iri(ns::RDFS_RANGE));
        store.sub_class_of = store.intern(&Term::iri(ns::RDFS_SUB_CLASS_OF));
        store.sub_property_of = store.intern(&Term::iri(ns::RDFS_SUB_PROPERTY_OF));
        store
    }

    fn intern(&mut self, term: &Term) -> Id {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as Id;
        self.terms.push(term.clone());
        self.literal.push(term.is_literal());
        self.iri.push(term.as_iri().is_some());
        self.ids.insert(term.clone(), id);
        id
    }

    /// Records a fact in every index. Returns `false` if already known.
    fn add(&mut self, (s, p, o): Encoded) -> bool {
        if !self.facts.insert((s, p, o)) {
            return false;
        }
        self.by_predicate.entry(p).or_default().push((s, o));
        if p == self.rdf_type {
            self.instances.entry(o).or_default().push(s);
        } else if p == self.domain {
            self.domains.entry(s).or_default().push(o);
        } else if p == self.range {
            self.ranges.entry(s).or_default().push(o);
        } else if p == self.sub_class_of {
            self.super_classes.entry(s).or_default().push(o);
            self.sub_classes.entry(o).or_default().push(s);
        } else if p == self.sub_property_of {
            self.super_props.entry(s).or_default().push(o);
            self.sub_props.entry(o).or_default().push(s);
        }
        true
    }

    fn get(map: &HashMap<Id, Vec<Id>>, key: Id) -> &[Id] {
        map.get(&key).map_or(&[], Vec::as_slice)
    }

    /// Every conclusion in which `(s, p, o)` takes part as a premise, joined
    /// against everything currently stored.
    fn consequences(&self, profile: &ClosureProfile, (s, p, o): Encoded, out: &mut Vec<Encoded>) {
        let on = |r| profile.enables(r);
        if on(Rule::Rdf1) {
            out.push((p, self.rdf_type, self.rdf_property));
        }
        if on(Rule::Rdfs2) {
            out.extend(Self::get(&self.domains, p).iter().map(|&c| (s, self.rdf_type, c)));
        }
        if on(Rule::Rdfs3) && !self.literal[o as usize] {
            out.extend(Self::get(&self.ranges, p).iter().map(|&c| (o, self.rdf_type, c)));
        }
        if on(Rule::Rdfs7) {
            out.extend(Self::get(&self.super_props, p).iter().map(|&q| (s, q, o)));
        }
        let pairs = |prop: Id| self.by_predicate.get(&prop).map_or(&[][..], Vec::as_slice);
        if p == self.domain && on(Rule::Rdfs2) {
            out.extend(pairs(s).iter().map(|&(x, _)| (x, self.rdf_type, o)));
        }
        if p == self.range && on(Rule::Rdfs3) {
            out.extend(
                pairs(s)
                    .iter()
                    .filter(|&&(_, y)| !self.literal[y as usize])
                    .map(|&(_, y)| (y, self.rdf_type, o)),
            );
        }
        if p == self.rdf_type && on(Rule::Rdfs9) {
            out.extend(Self::get(&self.super_classes, o).iter().map(|&d| (s, self.rdf_type, d)));
        }
        if p == self.sub_class_of {
            if on(Rule::Rdfs9) {
                out.extend(Self::get(&self.instances, s).iter().map(|&x| (x, self.rdf_type, o)));
            }
            if on(Rule::Rdfs11) {
                out.extend(Self::get(&self.super_classes, o).iter().map(|&e| (s, p, e)));
                out.extend(Self::get(&self.sub_classes, s).iter().map(|&c| (c, p, o)));
            }
            if on(Rule::SubClassReflexive) {
                out.push((s, p, s));
                out.push((o, p, o));
            }
        }
        if p == self.sub_property_of {
            if on(Rule::Rdfs7) {
                out.extend(pairs(s).iter().map(|&(x, y)| (x, o, y)));
            }
            if on(Rule::Rdfs5) {
                out.extend(Self::get(&self.super_props, o).iter().map(|&r| (s, p, r)));
                out.extend(Self::get(&self.sub_props, s).iter().map(|&q| (q, p, o)));
            }
            if on(Rule::SubPropertyReflexive) {
                out.push((s, p, s));
                out.push((o, p, o));
            }
        }
    }

    fn decode(&self, (s, p, o): Encoded) -> Triple {
        let term = |id: Id| self.terms[id as usize].clone();
        Triple::new(term(s), term(p), term(o)).expect("rules only build well-formed triples")
    }
}

/// Returns `g` plus everything the profile's rules derive from it, to fixpoint.
pub fn closure(g: &Graph, profile: &ClosureProfile) -> Graph {
    if profile.rules().is_empty() {
        return g.clone();
    }
    let mut store = Store::new();
    let mut delta: Vec<Encoded> = Vec::with_capacity(g.len());
    for t in g {
        let encoded = (store.intern(t.subject()), store.intern(t.predicate()), store.intern(t.object()));
        if store.add(encoded) {
            delta.push(encoded);
        }
    }
    let mut derived = Vec::new();
    while !delta.is_empty() {
        derived.clear();
        for &fact in &delta {
            store.consequences(profile, fact, &mut derived);
        }
        // conclusions with a literal subject or a non-IRI predicate are not triples
        delta.clear();
        for &fact in &derived {
            if !store.literal[fact.0 as usize] && store.iri[fact.1 as usize] && store.add(fact) {
                delta.push(fact);
            }
        }
    }
    let mut out = g.clone();
    out.extend(
        store
            .facts
            .iter()
            .map(|&fact| store.decode(fact))
            .collect::<Vec<_>>(),
    );
    out
}

/// Splits an ontology into its `rdfs:domain`/`rdfs:range` statements and the rest.
pub fn strip_domain_range(ontology: &Graph) -> (Graph, Graph) {
    let (removed, stripped): (Vec<Triple>, Vec<Triple>) = ontology.iter().cloned().partition(|t| {
        t.predicate().is_iri(ns::RDFS_DOMAIN) || t.predicate().is_iri(ns::RDFS_RANGE)
    });
    (stripped.into_iter().collect(), removed.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    const TYPE: &str = ns::RDF_TYPE;
    const SCO: &str = ns::RDFS_SUB_CLASS_OF;
    const SPO: &str = ns::RDFS_SUB_PROPERTY_OF;

    fn g(triples: &[(&str, &str, &str)]) -> Graph {
        triples.iter().map(|(s, p, o)| Triple::iris(s, p, o)).collect()
    }

    fn only(rule: Rule, input: &Graph) -> Graph {
        closure(input, &ClosureProfile::custom(&[rule])).difference(input)
    }

    #[test]
    fn subclass_membership_is_propagated() {
        let input = g(&[("John", TYPE, "Student"), ("Student", SCO, "Person")]);
        let out = closure(&input, &ClosureProfile::rdfs());
        assert!(out.contains(&Triple::iris("John", TYPE, "Person")));
    }

    #[test]
    fn closure_of_empty_graph_is_empty() {
        for p in [ClosureProfile::none(), ClosureProfile::rdf(), ClosureProfile::rdfs()] {
            assert!(closure(&Graph::new(), &p).is_empty());
        }
    }

    #[test]
    fn none_profile_is_identity() {
        let input = g(&[("a", "p", "b"), ("p", ns::RDFS_DOMAIN, "C")]);
        assert_eq!(closure(&input, &ClosureProfile::none()), input);
    }

    #[test]
    fn rdf_rules_are_a_subset_of_rdfs() {
        let rdfs = ClosureProfile::rdfs();
        assert!(ClosureProfile::rdf().rules().iter().all(|&r| rdfs.enables(r)));
    }

    #[test]
    fn rule_rdf1() {
        assert_eq!(
            only(Rule::Rdf1, &g(&[("a", "p", "b")])),
            g(&[("p", TYPE, ns::RDF_PROPERTY), (TYPE, TYPE, ns::RDF_PROPERTY)])
        );
    }

    #[test]
    fn rule_rdfs2() {
        let input = g(&[("p", ns::RDFS_DOMAIN, "C"), ("a", "p", "b")]);
        assert_eq!(only(Rule::Rdfs2, &input), g(&[("a", TYPE, "C")]));
    }

    #[test]
    fn rule_rdfs3_skips_literal_objects() {
        let mut input = g(&[("p", ns::RDFS_RANGE, "C"), ("a", "p", "b")]);
        input.insert(Triple::new(Term::iri("a"), Term::iri("p"), Term::Literal(Literal::string("v"))).unwrap());
        assert_eq!(only(Rule::Rdfs3, &input), g(&[("b", TYPE, "C")]));
    }

    #[test]
    fn rule_rdfs5() {
        let input = g(&[("p", SPO, "q"), ("q", SPO, "r")]);
        assert_eq!(only(Rule::Rdfs5, &input), g(&[("p", SPO, "r")]));
    }

    #[test]
    fn rule_rdfs7() {
        let input = g(&[("p", SPO, "q"), ("a", "p", "b")]);
        assert_eq!(only(Rule::Rdfs7, &input), g(&[("a", "q", "b")]));
    }

    #[test]
    fn rule_rdfs9() {
        let input = g(&[("C", SCO, "D"), ("x", TYPE, "C")]);
        assert_eq!(only(Rule::Rdfs9, &input), g(&[("x", TYPE, "D")]));
    }

    #[test]
    fn rule_rdfs11() {
        let input = g(&[("C", SCO, "D"), ("D", SCO, "E")]);
        assert_eq!(only(Rule::Rdfs11, &input), g(&[("C", SCO, "E")]));
    }

    #[test]
    fn reflexivity_rules() {
        assert_eq!(
            only(Rule::SubClassReflexive, &g(&[("C", SCO, "D")])),
            g(&[("C", SCO, "C"), ("D", SCO, "D")])
        );
        assert_eq!(
            only(Rule::SubPropertyReflexive, &g(&[("p", SPO, "q")])),
            g(&[("p", SPO, "p"), ("q", SPO, "q")])
        );
    }

    #[test]
    fn long_chains_reach_fixpoint() {
        let mut triples: Vec<(String, String, String)> = (0..30)
            .map(|i| (format!("C{i}"), SCO.to_owned(), format!("C{}", i + 1)))
            .collect();
        triples.push(("x".into(), TYPE.into(), "C0".into()));
        let input: Graph = triples.iter().map(|(s, p, o)| Triple::iris(s, p, o)).collect();
        let out = closure(&input, &ClosureProfile::rdfs());
        assert!(out.contains(&Triple::iris("x", TYPE, "C30")));
        assert!(out.contains(&Triple::iris("C0", SCO, "C30")));
    }

    #[test]
    fn strip_splits_domain_and_range() {
        let onto = g(&[("p", ns::RDFS_DOMAIN, "C"), ("p", ns::RDFS_RANGE, "D"), ("C", SCO, "E")]);
        let (stripped, removed) = strip_domain_range(&onto);
        assert_eq!(stripped, g(&[("C", SCO, "E")]));
        assert_eq!(removed, g(&[("p", ns::RDFS_DOMAIN, "C"), ("p", ns::RDFS_RANGE, "D")]));

        let plain = g(&[("C", SCO, "E")]);
        assert_eq!(strip_domain_range(&plain), (plain.clone(), Graph::new()));
    }

    #[test]
    fn profile_names_parse() {
        assert_eq!("RDFS".parse::<ProfileName>(), Ok(ProfileName::Rdfs));
        assert_eq!("none".parse::<ProfileName>(), Ok(ProfileName::None));
        assert!("owl".parse::<ProfileName>().is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Applies every rule to the whole graph until nothing changes.
        fn naive(input: &Graph) -> Graph {
            let mut g = input.clone();
            loop {
                let mut new = Vec::new();
                let triples: Vec<&Triple> = g.iter().collect();
                let with = |iri: &'static str| triples.iter().filter(move |t| t.predicate().is_iri(iri));
                for t in &triples {
                    new.push((t.predicate().clone(), Term::iri(TYPE), Term::iri(ns::RDF_PROPERTY)));
                }
                for d in with(ns::RDFS_DOMAIN) {
                    for t in triples.iter().filter(|t| t.predicate() == d.subject()) {
                        new.push((t.subject().clone(), Term::iri(TYPE), d.object().clone()));
                    }
                }
                for r in with(ns::RDFS_RANGE) {
                    for t in triples.iter().filter(|t| t.predicate() == r.subject()) {
                        new.push((t.object().clone(), Term::iri(TYPE), r.object().clone()));
                    }
                }
                for a in with(SPO) {
                    new.push((a.subject().clone(), Term::iri(SPO), a.subject().clone()));
                    new.push((a.object().clone(), Term::iri(SPO), a.object().clone()));
                    for b in with(SPO).filter(|b| b.subject() == a.object()) {
                        new.push((a.subject().clone(), Term::iri(SPO), b.object().clone()));
                    }
                    for t in triples.iter().filter(|t| t.predicate() == a.subject()) {
                        new.push((t.subject().clone(), a.object().clone(), t.object().clone()));
                    }
                }
                for a in with(SCO) {
                    new.push((a.subject().clone(), Term::iri(SCO), a.subject().clone()));
                    new.push((a.object().clone(), Term::iri(SCO), a.object().clone()));
                    for b in with(SCO).filter(|b| b.subject() == a.object()) {
                        new.push((a.subject().clone(), Term::iri(SCO), b.object().clone()));
                    }
                    for t in with(TYPE).filter(|t| t.object() == a.subject()) {
                        new.push((t.subject().clone(), Term::iri(TYPE), a.object().clone()));
                    }
                }
                let before = g.len();
                for (s, p, o) in new {
                    if let Ok(t) = Triple::new(s, p, o) {
                        g.insert(t);
                    }
                }
                if g.len() == before {
                    return g;
                }
            }
        }

        fn term() -> impl Strategy<Value = Term> {
            prop_oneof![
                4 => prop::sample::select(vec!["a", "b", "c", "C", "D", "p", "q"]).prop_map(Term::iri),
                1 => Just(Term::blank("n")),
                1 => prop::sample::select(vec!["x", "y"]).prop_map(Term::string),
            ]
        }

        fn predicate() -> impl Strategy<Value = Term> {
            prop::sample::select(vec![
                "p",
                "q",
                TYPE,
                SCO,
                SPO,
                ns::RDFS_DOMAIN,
                ns::RDFS_RANGE,
            ])
            .prop_map(Term::iri)
        }

        fn graph() -> impl Strategy<Value = Graph> {
            prop::collection::vec((term(), predicate(), term()), 0..12)
                .prop_map(|ts| ts.into_iter().filter_map(|(s, p, o)| Triple::new(s, p, o).ok()).collect())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn agrees_with_naive_rule_application(g in graph()) {
                prop_assert_eq!(closure(&g, &ClosureProfile::rdfs()), naive(&g));
            }

            #[test]
            fn inflationary_and_idempotent(g in graph()) {
                let rdfs = ClosureProfile::rdfs();
                let once = closure(&g, &rdfs);
                prop_assert!(g.is_subset(&once));
                prop_assert_eq!(closure(&once, &rdfs), once);
            }

            #[test]
            fn monotone(g in graph(), extra in graph()) {
                let rdfs = ClosureProfile::rdfs();
                let bigger = g.union(&extra);
                prop_assert!(closure(&g, &rdfs).is_subset(&closure(&bigger, &rdfs)));
            }

            #[test]
            fn none_is_identity_and_rdf_below_rdfs(g in graph()) {
                prop_assert_eq!(closure(&g, &ClosureProfile::none()), g.clone());
                prop_assert!(closure(&g, &ClosureProfile::rdf()).is_subset(&closure(&g, &ClosureProfile::rdfs())));
            }
        }
    }
}
