//! The bundled example corpus: the university data, ontology and
//! constraints, the small John graph and the mutual-friend graph.

use crate::constraint::{parse_constraints, AxiomSet};
use crate::rdf::{parse_turtle, Graph};

pub const DATA_NS: &str = "http://example.org/data#";
pub const EXO: &str = "http://example.org/ontology#";
pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";

pub const UNIVERSITY_DATA: &str = include_str!("../corpus/fig1.ttl");
pub const UNIVERSITY_ONTOLOGY: &str = include_str!("../corpus/fig2.ttl");
pub const UNIVERSITY_CONSTRAINTS: &str = include_str!("../corpus/fig3.dlc");
pub const JOHN_DATA: &str = include_str!("../corpus/graph1.ttl");
pub const JOHN_DESCRIPTION: &str = include_str!("../corpus/desc3.dlc");
pub const FRIENDS_DATA: &str = include_str!("../corpus/pureperson.ttl");
pub const FRIENDS_DEFINITION: &str = include_str!("../corpus/pureperson.dlc");

/// IRI of a local individual or class.
pub fn local(name: &str) -> String {
    format!("{DATA_NS}{name}")
}

pub fn exo(name: &str) -> String {
    format!("{EXO}{name}")
}

fn graph(text: &str) -> Graph {
    parse_turtle(text, None).expect("bundled corpus parses")
}

fn constraints(text: &str) -> AxiomSet {
    parse_constraints(text).expect("bundled corpus parses")
}

pub fn university_data() -> Graph {
    graph(UNIVERSITY_DATA)
}

pub fn university_ontology() -> Graph {
    graph(UNIVERSITY_ONTOLOGY)
}

pub fn university_constraints() -> AxiomSet {
    constraints(UNIVERSITY_CONSTRAINTS)
}

pub fn john_data() -> Graph {
    graph(JOHN_DATA)
}

pub fn john_description() -> AxiomSet {
    constraints(JOHN_DESCRIPTION)
}

pub fn friends_data() -> Graph {
    graph(FRIENDS_DATA)
}

pub fn friends_definition() -> AxiomSet {
    constraints(FRIENDS_DEFINITION)
}

/// Twenty constraints over the synthetic university vocabulary. None of
/// them defines a new class.
pub const SYNTHETIC_CONSTRAINTS: &str = include_str!("../corpus/synthetic.dlc");

pub fn synthetic_constraints() -> AxiomSet {
    constraints(SYNTHETIC_CONSTRAINTS)
}

/// A university graph shaped like the example data, with at least
/// `triples` triples, built deterministically.
pub fn synthetic_university(triples: usize) -> Graph {
    use crate::rdf::ns::RDF_TYPE;
    use crate::rdf::{Term, Triple};

    let mut g = Graph::new();
    let person = |k: usize| Term::iri(local(&format!("p{k}")));
    let org = |k: usize| Term::iri(local(&format!("o{k}")));
    let typed = |g: &mut Graph, s: Term, c: &str| {
        g.insert(Triple::new(s, Term::iri(RDF_TYPE), Term::iri(exo(c))).unwrap());
    };
    let link = |g: &mut Graph, s: Term, p: &str, o: Term| {
        g.insert(Triple::new(s, Term::iri(p), o).unwrap());
    };
    // about five and a half triples per person
    let people = (triples * 2).div_ceil(11).max(10);
    let orgs = (people / 40).max(2);
    for k in 0..orgs {
        typed(&mut g, org(k), if k % 3 == 0 { "ResOrg" } else { "Uni" });
    }
    let name = format!("{FOAF}name");
    for k in 0..people {
        let p = person(k);
        let (class, faculty) = match k % 10 {
            0 => ("Faculty", true),
            1 | 2 => ("GrStudent", false),
            3 => ("Person", false),
            _ => ("UniStudent", false),
        };
        typed(&mut g, p.clone(), class);
        link(&mut g, p.clone(), &name, Term::string(format!("Person {k}")));
        link(&mut g, p.clone(), &exo("friend"), person((k + 1) % people));
        link(&mut g, p.clone(), &exo("friend"), person((k * 7 + 3) % people));
        if faculty {
            link(&mut g, p.clone(), &exo("affiliation"), org(k % orgs));
            link(&mut g, p.clone(), &exo("affiliation"), org((k / 3 + 1) % orgs));
        } else {
            link(&mut g, p.clone(), &exo("enrolled"), org(k % orgs));
            if k % 4 == 0 {
                link(&mut g, p.clone(), &exo("enrolled"), org((k + 5) % orgs));
            }
        }
        if class == "GrStudent" {
            link(&mut g, p.clone(), &exo("supervisor"), person(k - k % 10));
        }
    }
    g
}
