//! Recognition of newly defined classes as closed-world extensions.
//!
//! Certified definitions are solved by a greatest-fixpoint iteration.
//! Anything else can be solved by enumerating assignments, which is
//! exponential and therefore budgeted.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::checker::{axiom_holds, EvalError, Evaluator};
use crate::constraint::{
    definitions, dependency_graph, monotonicity_check, new_vocabulary, Axiom, AxiomSet, ClassExpr, Monotonicity,
    Polarity, PropExpr, VocabularyError,
};
use crate::interpretation::{Interpretation, NodeId, NodeSet};
use crate::rdf::Term;

/// Extensions of the new classes, keyed by class IRI.
pub type Assignment = BTreeMap<String, NodeSet>;

pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognitionError {
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error("definitions are not certified monotone: {}", .0.join(", "))]
    NonMonotoneDefinition(Vec<String>),
    #[error("brute force needs 2^{bits} candidates, over the budget of {limit}")]
    BudgetExceeded { bits: usize, limit: u64 },
    #[error("no extension of the interpretation satisfies the constraints")]
    NoModelExists,
    #[error("<{0}> is not a new class of the constraint set")]
    UnknownClass(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fixpoint,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fixpoint => "fixpoint",
            Method::BruteForce => "brute-force",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognitionResult {
    pub extensions: Assignment,
    /// Whether the extensions satisfy every axiom mentioning a new class.
    pub model_found: bool,
    pub method: Method,
    pub monotonicity: BTreeMap<String, Monotonicity>,
}

impl RecognitionResult {
    /// Members of `class` as terms, in domain order.
    pub fn members(&self, i: &Interpretation, class: &str) -> Option<Vec<Term>> {
        self.extensions
            .get(class)
            .map(|s| s.iter().map(|n| i.term(n).clone()).collect())
    }
}

/// Whether `a` mentions one of the `new` classes.
pub fn mentions_new(a: &Axiom, new: &BTreeSet<String>) -> bool {
    a.classes().iter().any(|c| new.contains(*c))
}

/// Whether every axiom mentioning a new class holds once the new classes
/// take the given extensions. Axioms over the graph vocabulary alone do not
/// depend on the extensions and are left to the checker.
pub fn axioms_hold(i: &Interpretation, assignment: &Assignment, axioms: &AxiomSet) -> Result<bool, EvalError> {
    let new: BTreeSet<String> = assignment.keys().cloned().collect();
    let mut ev = Evaluator::with_overlay(i, assignment);
    for a in axioms.iter().filter(|a| mentions_new(a, &new)) {
        if !axiom_holds(&mut ev, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn class_depth(c: &ClassExpr) -> usize {
    match c {
        ClassExpr::Named(_) | ClassExpr::Thing | ClassExpr::Nominal(_) | ClassExpr::Datatype(_) => 0,
        ClassExpr::And(cs) | ClassExpr::Or(cs) => cs.iter().map(class_depth).max().unwrap_or(0),
        ClassExpr::Not(c) => class_depth(c),
        ClassExpr::All(p, q) | ClassExpr::Some(p, q) => prop_length(p) + class_depth(q),
        ClassExpr::Min(_, p, q) | ClassExpr::Max(_, p, q) | ClassExpr::Exact(_, p, q) => {
            prop_length(p) + q.as_deref().map_or(0, class_depth)
        }
    }
}

fn prop_length(p: &PropExpr) -> usize {
    match p {
        PropExpr::Named(_) => 1,
        PropExpr::Inv(p) => prop_length(p),
        PropExpr::Chain(p, q) => prop_length(p) + prop_length(q),
        PropExpr::Restrict(p, dom) => prop_length(p).max(class_depth(dom)),
    }
}

/// Nodes within `radius` steps of `start` along `props`, in either direction.
fn neighbourhood(i: &Interpretation, start: NodeId, radius: usize, props: &[&str]) -> Vec<NodeId> {
    let rels: Vec<_> = props.iter().filter_map(|p| i.property(&Term::iri(*p))).collect();
    let mut seen = NodeSet::empty(i.domain_size());
    seen.insert(start);
    let mut frontier = vec![start];
    let mut out = vec![start];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &x in &frontier {
            for r in &rels {
                let forward = r.fillers(x).iter().filter_map(|f| f.as_node());
                for y in forward.chain(r.subjects_of(x).iter().copied()) {
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(&next);
        frontier = next;
    }
    out
}

fn topological(graph: &BTreeMap<String, BTreeSet<(String, Polarity)>>, keep: &BTreeSet<String>) -> Vec<String> {
    fn visit(
        c: &str,
        graph: &BTreeMap<String, BTreeSet<(String, Polarity)>>,
        keep: &BTreeSet<String>,
        done: &mut BTreeSet<String>,
        out: &mut Vec<String>,
    ) {
        if !keep.contains(c) || !done.insert(c.to_owned()) {
            return;
        }
        for (d, _) in &graph[c] {
            visit(d, graph, keep, done, out);
        }
        out.push(c.to_owned());
    }
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for c in keep {
        visit(c, graph, keep, &mut done, &mut out);
    }
    out
}

/// Greatest-fixpoint recognition of certified definitions.
///
/// Non-recursive classes are computed once, dependencies first. Recursive
/// classes start at the whole domain and lose members that fail one of
/// their definitions until nothing changes.
pub fn recognize_fixpoint(i: &Interpretation, axioms: &AxiomSet) -> Result<RecognitionResult, RecognitionError> {
    let new = new_vocabulary(axioms, i.vocabulary())?;
    let monotonicity = monotonicity_check(axioms, &new);
    let rejected: Vec<String> = monotonicity
        .iter()
        .filter(|(_, m)| **m == Monotonicity::NonMonotone)
        .map(|(c, _)| c.clone())
        .collect();
    if !rejected.is_empty() {
        return Err(RecognitionError::NonMonotoneDefinition(rejected));
    }
    let defs = definitions(axioms, &new);
    let graph = dependency_graph(axioms, &new);
    let n = i.domain_size();
    let mut state = Assignment::new();

    let flat: BTreeSet<String> = monotonicity
        .iter()
        .filter(|(_, m)| **m == Monotonicity::NonRecursive)
        .map(|(c, _)| c.clone())
        .collect();
    for c in topological(&graph, &flat) {
        let mut ext = NodeSet::full(n);
        {
            let mut ev = Evaluator::with_overlay(i, &state);
            for d in &defs[&c] {
                ext.intersect_with(&*ev.eval_class(d.body)?);
            }
        }
        state.insert(c, ext);
    }

    let recursive: Vec<String> = monotonicity
        .iter()
        .filter(|(_, m)| **m == Monotonicity::Monotone)
        .map(|(c, _)| c.clone())
        .collect();
    let position: BTreeMap<&str, usize> = recursive.iter().enumerate().map(|(k, c)| (c.as_str(), k)).collect();
    let mut dependents = vec![Vec::new(); recursive.len()];
    let mut radius = vec![0; recursive.len()];
    let mut props: Vec<Vec<&str>> = vec![Vec::new(); recursive.len()];
    for (b, c) in recursive.iter().enumerate() {
        for (a, _) in &graph[c] {
            if let Some(&a) = position.get(a.as_str()) {
                if !dependents[a].contains(&b) {
                    dependents[a].push(b);
                }
            }
        }
        for d in &defs[c] {
            radius[b] = radius[b].max(class_depth(d.body));
            props[b].extend(d.body.properties());
        }
        props[b].sort_unstable();
        props[b].dedup();
        state.insert(c.clone(), NodeSet::full(n));
    }

    let mut queue: VecDeque<(usize, NodeId)> = VecDeque::new();
    let mut queued: Vec<NodeSet> = (0..recursive.len()).map(|_| NodeSet::full(n)).collect();
    for k in 0..recursive.len() {
        queue.extend(i.domain().map(|x| (k, x)));
    }
    while let Some((k, x)) = queue.pop_front() {
        queued[k].remove(x);
        let class = &recursive[k];
        let holds = {
            let ev = Evaluator::with_overlay(i, &state);
            let mut holds = true;
            for d in &defs[class] {
                if !ev.member(x, d.body)? {
                    holds = false;
                    break;
                }
            }
            holds
        };
        if holds {
            continue;
        }
        state.get_mut(class).expect("initialised above").remove(x);
        for &b in &dependents[k] {
            for z in neighbourhood(i, x, radius[b], &props[b]) {
                if state[&recursive[b]].contains(z) && queued[b].insert(z) {
                    queue.push_back((b, z));
                }
            }
        }
    }

    let model_found = axioms_hold(i, &state, axioms)?;
    Ok(RecognitionResult {
        extensions: state,
        model_found,
        method: Method::Fixpoint,
        monotonicity,
    })
}

fn next_same_popcount(m: u64) -> u64 {
    let c = m & m.wrapping_neg();
    let r = m.wrapping_add(c);
    (((r ^ m) >> 2) / c) | r
}

/// All maximal assignments of the new classes under which every axiom
/// mentioning them holds.
///
/// Candidates are visited by decreasing size and any candidate inside an
/// already accepted model is skipped, so the accepted ones are pairwise
/// incomparable. Fails when the `2^(|Δ| * classes)` candidates exceed `limit`.
pub fn brute_force_maximal(i: &Interpretation, axioms: &AxiomSet, limit: u64) -> Result<Vec<Assignment>, RecognitionError> {
    let new: Vec<String> = new_vocabulary(axioms, i.vocabulary())?.into_iter().collect();
    let n = i.domain_size();
    let bits = n * new.len();
    if bits >= 64 || (1u64 << bits) > limit {
        return Err(RecognitionError::BudgetExceeded { bits, limit });
    }
    let set: BTreeSet<String> = new.iter().cloned().collect();
    let varying: Vec<&Axiom> = axioms.iter().filter(|a| mentions_new(a, &set)).collect();
    let decode = |mask: u64| -> Assignment {
        new.iter()
            .enumerate()
            .map(|(k, c)| {
                let nodes = (0..n).filter(|x| mask >> (k * n + x) & 1 == 1).map(|x| NodeId(x as u32));
                (c.clone(), NodeSet::from_nodes(n, nodes))
            })
            .collect()
    };
    let end = 1u64 << bits;
    let mut kept: Vec<u64> = Vec::new();
    for size in (0..=bits).rev() {
        let mut mask = if size == 0 { 0 } else { u64::MAX >> (64 - size) };
        while mask < end {
            if !kept.iter().any(|&m| mask & !m == 0) {
                let candidate = decode(mask);
                let mut ev = Evaluator::with_overlay(i, &candidate);
                let mut ok = true;
                for a in &varying {
                    if !axiom_holds(&mut ev, a)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    kept.push(mask);
                }
            }
            if mask == 0 {
                break;
            }
            mask = next_same_popcount(mask);
        }
    }
    Ok(kept.into_iter().map(decode).collect())
}

/// Pointwise intersection of assignments.
pub fn intersect(models: &[Assignment]) -> Option<Assignment> {
    let (first, rest) = models.split_first()?;
    let mut out = first.clone();
    for m in rest {
        for (c, ext) in out.iter_mut() {
            ext.intersect_with(&m[c]);
        }
    }
    Some(out)
}

/// Recognizes every new class of `axioms`.
///
/// Certified definitions use the fixpoint. Others fall back to brute force
/// when a budget is given, and the result is the intersection of all
/// maximal models, or empty extensions when there is no model.
pub fn recognize(i: &Interpretation, axioms: &AxiomSet, budget: Option<u64>) -> Result<RecognitionResult, RecognitionError> {
    match (recognize_fixpoint(i, axioms), budget) {
        (Err(RecognitionError::NonMonotoneDefinition(_)), Some(limit)) => {
            let new = new_vocabulary(axioms, i.vocabulary())?;
            let monotonicity = monotonicity_check(axioms, &new);
            let models = brute_force_maximal(i, axioms, limit)?;
            let (extensions, model_found) = match intersect(&models) {
                Some(ext) => (ext, true),
                None => (
                    new.iter().map(|c| (c.clone(), NodeSet::empty(i.domain_size()))).collect(),
                    false,
                ),
            };
            Ok(RecognitionResult {
                extensions,
                model_found,
                method: Method::BruteForce,
                monotonicity,
            })
        }
        (r, _) => r,
    }
}

/// The closed-world extension of one new class.
pub fn closed_world_extension(
    i: &Interpretation,
    axioms: &AxiomSet,
    class: &str,
    budget: Option<u64>,
) -> Result<NodeSet, RecognitionError> {
    let r = recognize(i, axioms, budget)?;
    if !r.model_found {
        return Err(RecognitionError::NoModelExists);
    }
    r.extensions
        .get(class)
        .cloned()
        .ok_or_else(|| RecognitionError::UnknownClass(class.to_owned()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::parse_constraints;
    use crate::interpretation::{canonical_interpretation, DatatypeRegistry};
    use crate::rdf::parse_turtle;

    fn setup(ttl: &str, dlc: &str) -> (Interpretation, AxiomSet) {
        let g = parse_turtle(&format!("@prefix : <http://example.org/> .\n{ttl}"), None).unwrap();
        let i = canonical_interpretation(&g, &DatatypeRegistry::standard()).unwrap();
        let a = parse_constraints(&format!("Prefix : <http://example.org/>\n{dlc}")).unwrap();
        (i, a)
    }

    fn names(i: &Interpretation, s: &NodeSet) -> Vec<String> {
        s.iter()
            .map(|n| i.term(n).as_iri().unwrap().trim_start_matches("http://example.org/").to_owned())
            .collect()
    }

    const A: &str = "http://example.org/A";

    #[test]
    fn mutual_friends_are_pure() {
        let (i, a) = setup(
            ":John :friend :Bill .\n:Bill :friend :John .",
            ":PurePerson EquivalentTo Min(1, :friend) And All(:friend, :PurePerson)",
        );
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert!(r.model_found);
        assert_eq!(names(&i, &r.extensions["http://example.org/PurePerson"]), ["Bill", "John"]);
        let models = brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap();
        assert_eq!(models, vec![r.extensions]);
    }

    #[test]
    fn empty_nominal_gives_empty_class() {
        let (i, a) = setup(":x :p :y .", ":A EquivalentTo Nominal()");
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert!(r.extensions[A].is_empty());
        assert_eq!(r.monotonicity[A], Monotonicity::NonRecursive);
    }

    #[test]
    fn thing_gives_the_domain() {
        let (i, a) = setup(":x :p :y .", ":A EquivalentTo Thing");
        let ext = closed_world_extension(&i, &a, A, None).unwrap();
        assert_eq!(ext.len(), i.domain_size());
    }

    #[test]
    fn self_negation_has_no_model() {
        let (i, a) = setup(":x :p :y .", ":A EquivalentTo Not(:A)");
        assert!(matches!(recognize_fixpoint(&i, &a), Err(RecognitionError::NonMonotoneDefinition(c)) if c == [A]));
        assert!(brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap().is_empty());
        assert_eq!(closed_world_extension(&i, &a, A, Some(DEFAULT_BUDGET)), Err(RecognitionError::NoModelExists));
    }

    #[test]
    fn cycle_keeps_every_node() {
        let (i, a) = setup(":a :p :b .\n:b :p :c .\n:c :p :a .", ":A EquivalentTo Min(1, :p, :A)");
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert_eq!(names(&i, &r.extensions[A]), ["a", "b", "c"]);
        let models = brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0][A], r.extensions[A]);
    }

    #[test]
    fn chain_shrinks_from_its_end() {
        let (i, a) = setup(":a :p :b .\n:b :p :c .\n:c :p :d .", ":A EquivalentTo Some(:p, :A)");
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert!(r.extensions[A].is_empty());
    }

    #[test]
    fn inclusion_is_read_broadly() {
        let (i, a) = setup(":a :p :b .\n:b :q :c .", ":A SubClassOf Some(:p, Thing)\n:B SubClassOf Or(Some(:q, :B), :A)");
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert_eq!(names(&i, &r.extensions[A]), ["a"]);
        assert_eq!(names(&i, &r.extensions["http://example.org/B"]), ["a"]);
        assert_eq!(brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap(), vec![r.extensions]);
    }

    #[test]
    fn determined_negation_is_certified() {
        let (i, a) = setup(
            ":a :p :b .\n:b :p :a .\n:c :p :c .\n:c a :X .",
            ":N EquivalentTo Some(Inv(:p), :X)\n:A EquivalentTo Some(:p, :A) And Not(:N)",
        );
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert_eq!(r.monotonicity[A], Monotonicity::Monotone);
        assert_eq!(names(&i, &r.extensions[A]), ["a", "b"]);
        assert_eq!(brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap(), vec![r.extensions]);
    }

    #[test]
    fn incomparable_models_intersect() {
        let (i, a) = setup(":a :p :b .", ":A EquivalentTo Not(:B)\n:B EquivalentTo Not(:A)");
        let models = brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap();
        // every split of the domain between A and B
        assert_eq!(models.len(), 1 << i.domain_size());
        for (k, m) in models.iter().enumerate() {
            for other in &models[k + 1..] {
                let bigger = m.iter().all(|(c, s)| other[c].is_subset(s));
                let smaller = m.iter().all(|(c, s)| s.is_subset(&other[c]));
                assert!(!bigger && !smaller);
            }
        }
        let r = recognize(&i, &a, Some(DEFAULT_BUDGET)).unwrap();
        assert_eq!(r.method, Method::BruteForce);
        assert!(r.model_found);
        assert!(r.extensions.values().all(NodeSet::is_empty));
    }

    #[test]
    fn budget_is_enforced() {
        let (i, a) = setup(":a :p :b .", ":A EquivalentTo Not(:A)");
        assert_eq!(
            brute_force_maximal(&i, &a, 4),
            Err(RecognitionError::BudgetExceeded { bits: 3, limit: 4 })
        );
    }

    #[test]
    fn other_constraints_filter_models() {
        let (i, a) = setup(
            ":a :p :b .\n:b :p :a .",
            ":A EquivalentTo Some(:p, :A)\nNominal(:a) SubClassOf Not(:A)",
        );
        let r = recognize_fixpoint(&i, &a).unwrap();
        assert!(!r.model_found);
        assert_eq!(brute_force_maximal(&i, &a, DEFAULT_BUDGET).unwrap().len(), 1);
        assert_eq!(closed_world_extension(&i, &a, A, None), Err(RecognitionError::NoModelExists));
    }
}
