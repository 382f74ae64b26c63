//! Acceptance suite. Prints one PASS or FAIL line per criterion and fails
//! the run if any criterion fails.

mod support;

use std::cell::Cell;
use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cwdl::checker::{check_axiom, eval_class, validate_with, EvalError, Evaluator, ValidateOptions, Verdict};
use cwdl::constraint::{domain_range_to_constraints, new_vocabulary, Axiom, AxiomSet};
use cwdl::corpus::{self, local};
use cwdl::interpretation::{canonical_interpretation, DatatypeRegistry, Interpretation};
use cwdl::rdf::ns::*;
use cwdl::rdf::vocabulary;
use cwdl::rdfs::{closure, strip_domain_range, Rule};
use cwdl::recognition::{brute_force_maximal, recognize_fixpoint, DEFAULT_BUDGET};
use cwdl::sparql::{compile_axiom, evaluate, normalize_literals};
use cwdl::{validate, ClosureProfile, Graph, Term, Triple};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestCaseError;
use support::{node, runner, Naive};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn short(t: &Term) -> String {
    match t {
        Term::Iri(iri) => iri.strip_prefix(corpus::DATA_NS).unwrap_or(iri).to_owned(),
        other => other.to_string(),
    }
}

fn shorts<'a>(ts: impl IntoIterator<Item = &'a Term>) -> BTreeSet<String> {
    ts.into_iter().map(short).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn university() -> cwdl::Validation {
    validate(
        &corpus::university_data(),
        &corpus::university_ontology(),
        &corpus::university_constraints(),
        ClosureProfile::rdfs(),
    )
    .map_err(|e| e.to_string())
    .unwrap()
}

fn university_checks() -> Outcome {
    let start = Instant::now();
    let v = university();
    let elapsed = start.elapsed();
    for (k, r) in v.report.axioms.iter().take(9).enumerate() {
        let expected = if k == 3 { Verdict::Violated } else { Verdict::Satisfied };
        ensure(r.verdict == expected, || format!("constraint {} is {}", k + 1, r.verdict.as_str()))?;
    }
    let row4 = &v.report.axioms[3];
    let witnesses = shorts(row4.witnesses.iter().map(|w| &w.node));
    ensure(witnesses == set(&["John"]), || format!("constraint 4 witnesses {witnesses:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("constraint 4 violated by John, 8 satisfied, {elapsed:.1?}"))
}

fn university_recognition() -> Outcome {
    let v = university();
    let rec = v.report.recognition.as_ref().ok_or("no recognition result")?;
    let members = |c: &str| shorts(&rec.members(&v.interpretation, &local(c)).unwrap_or_default());
    let hectic = members("HecticStudent");
    let friends = members("StudentFriend");
    ensure(hectic == set(&["Susan"]), || format!("HecticStudent = {hectic:?}"))?;
    ensure(friends == set(&["Amy", "Bill", "John"]), || format!("StudentFriend = {friends:?}"))?;
    Ok("HecticStudent = {Susan}, StudentFriend = {Amy, Bill, John}".into())
}

fn interpretation(g: &Graph) -> Interpretation {
    canonical_interpretation(g, &DatatypeRegistry::standard()).unwrap()
}

fn pure_person() -> Outcome {
    let i = interpretation(&corpus::friends_data());
    let axioms = corpus::friends_definition();
    let class = local("PurePerson");
    let fix = recognize_fixpoint(&i, &axioms).map_err(|e| e.to_string())?;
    let members = shorts(fix.extensions[&class].iter().map(|n| i.term(n)));
    ensure(members == set(&["Bill", "John"]), || format!("fixpoint gives {members:?}"))?;
    let models = brute_force_maximal(&i, &axioms, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(models.len() == 1, || format!("{} maximal models", models.len()))?;
    ensure(models[0] == fix.extensions, || "brute force disagrees with the fixpoint".into())?;
    Ok("fixpoint and the single maximal model give {John, Bill}".into())
}

fn explicit_domains_ranges() -> Outcome {
    let (stripped, removed) = strip_domain_range(&corpus::university_ontology());
    let derived = domain_range_to_constraints(&removed).map_err(|e| e.to_string())?;
    let v = validate(&corpus::university_data(), &stripped, &derived, ClosureProfile::rdfs()).map_err(|e| e.to_string())?;
    let statement = |p: &str, kind: &str, c: &str| {
        Triple::iris(&corpus::exo(p), &format!("{RDFS}{kind}"), &corpus::exo(c)).to_string()
    };
    let expected = [
        (statement("enrolled", "domain", "UniStudent"), set(&["Susan"])),
        (statement("enrolled", "range", "Uni"), set(&["ReindeerPoly", "SUNYOrange"])),
        (statement("affiliation", "range", "Organization"), set(&["ReindeerPoly"])),
    ];
    let mut found = Vec::new();
    for r in v.report.violated() {
        // the offending resource: the subject for domains, the filler for ranges
        let named: BTreeSet<String> = if r.source.contains("#domain>") {
            shorts(r.witnesses.iter().map(|w| &w.node))
        } else {
            shorts(r.witnesses.iter().flat_map(|w| &w.culprits))
        };
        found.push((r.source.clone(), named));
    }
    found.sort();
    let mut expected = expected.to_vec();
    expected.sort();
    ensure(found == expected, || format!("violations {found:?}"))?;
    let satisfied = v.report.axioms.iter().filter(|r| r.verdict == Verdict::Satisfied).count();
    ensure(satisfied == derived.len() - 3, || format!("{satisfied} satisfied"))?;
    Ok(format!("Susan; SUNYOrange, ReindeerPoly; ReindeerPoly; {satisfied} others satisfied"))
}

fn john_description() -> Outcome {
    let i = interpretation(&corpus::john_data());
    let description = corpus::john_description();
    let Axiom::Member(john, description) = &description.axioms()[0] else {
        return Err("description is not a membership axiom".into());
    };
    let ext = eval_class(&i, description).map_err(|e| e.to_string())?;
    let id = i.node_id(john).ok_or("John is not in the domain")?;
    ensure(ext.contains(id), || "John is not in the description".into())?;
    ensure(i.domain_size() == 6, || format!("domain has {} elements", i.domain_size()))?;
    Ok(format!("John is in the description, extension size {}", ext.len()))
}

fn fixpoint_matches_brute_force() -> Outcome {
    let start = Instant::now();
    let mut r = runner(200);
    let largest = Cell::new(0);
    r.run(&support::recognition_case(), |(g, axioms)| {
        let i = interpretation(&g);
        largest.set(largest.get().max(i.domain_size()));
        let fix = recognize_fixpoint(&i, &axioms).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let models = brute_force_maximal(&i, &axioms, DEFAULT_BUDGET).map_err(|e| TestCaseError::fail(e.to_string()))?;
        if !fix.model_found || models.len() != 1 || models[0] != fix.extensions {
            return Err(TestCaseError::fail(format!("{axioms:?}: fixpoint {:?}, models {models:?}", fix.extensions)));
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("200 instances, 0 mismatches, largest domain {}, {elapsed:.1?}", largest.get()))
}

fn checker_matches_naive() -> Outcome {
    let mut r = runner(300);
    let violated = Cell::new(0);
    let errors = Cell::new(0);
    r.run(&support::checking_case(), |(g, a)| {
        let i = interpretation(&g);
        let ours = check_axiom(&mut Evaluator::new(&i), &a, usize::MAX);
        let theirs = Naive::new(&g).violations(&a);
        match (&ours, &theirs) {
            (Ok(o), Ok(n)) if o.witness_count == *n => {
                violated.set(violated.get() + usize::from(*n > 0));
                Ok(())
            }
            (Err(EvalError::UnsupportedDataComplement(_)), Err(_)) => {
                errors.set(errors.get() + 1);
                Ok(())
            }
            _ => Err(TestCaseError::fail(format!("{a}\n{}\nchecker {ours:?}, naive {theirs:?}", g.to_ntriples()))),
        }
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("300 cases, 0 mismatches ({} violated, {} rejected complements)", violated.get(), errors.get()))
}

/// Compares a compiled query with the checker on one graph. Returns whether
/// the query was fully compiled.
fn differential(g: &Graph, axioms: &AxiomSet) -> Result<usize, String> {
    let reg = DatatypeRegistry::standard();
    let normalized = normalize_literals(g, &reg).map_err(|e| e.to_string())?;
    let i = interpretation(g);
    let new = new_vocabulary(axioms, &vocabulary(g)).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for a in axioms.iter() {
        let Ok(q) = compile_axiom(a, &new, &reg) else { continue };
        let Some(query) = &q.query else { continue };
        let verdict = check_axiom(&mut Evaluator::new(&i), a, usize::MAX).map_err(|e| e.to_string())?;
        spargebra::SparqlParser::new().parse_query(&q.text).map_err(|e| format!("{e}\n{}", q.text))?;
        let rows = evaluate(query, &normalized);
        if rows.is_empty() != (verdict.verdict == Verdict::Satisfied) || rows.len() != verdict.witness_count {
            return Err(format!("{a}: {} rows, checker {} witnesses\n{}", rows.len(), verdict.witness_count, q.text));
        }
        compared += 1;
    }
    Ok(compared)
}

fn sparql_differential() -> Outcome {
    let rdfs = ClosureProfile::rdfs();
    let closed = closure(&corpus::university_data().union(&corpus::university_ontology()), &rdfs);
    let mut corpus_queries = differential(&closed, &corpus::university_constraints())?;
    let (stripped, removed) = strip_domain_range(&corpus::university_ontology());
    let derived = domain_range_to_constraints(&removed).map_err(|e| e.to_string())?;
    corpus_queries += differential(&closure(&corpus::university_data().union(&stripped), &rdfs), &derived)?;
    corpus_queries += differential(&corpus::john_data(), &corpus::john_description())?;

    let mut r = runner(1);
    let strategy = support::checking_case();
    let mut random = 0;
    let mut attempts = 0;
    while random < 100 {
        attempts += 1;
        ensure(attempts < 10_000, || format!("only {random} comparable random cases"))?;
        let (g, a) = strategy.new_tree(&mut r).map_err(|e| e.to_string())?.current();
        if check_axiom(&mut Evaluator::new(&interpretation(&g)), &a, 0).is_err() {
            continue;
        }
        random += differential(&g, &AxiomSet::from_axioms([a]).map_err(|e| e.to_string())?)?;
    }
    Ok(format!("{corpus_queries} corpus queries and {random} random queries agree"))
}

fn rdfs_graph() -> impl Strategy<Value = Graph> {
    use proptest::prelude::*;
    let terms: Vec<Term> = ["a", "b", "c", "p", "q", "C", "D"].iter().map(|n| node(n)).collect();
    let predicates: Vec<Term> = [RDF_TYPE, RDFS_SUB_CLASS_OF, RDFS_SUB_PROPERTY_OF, RDFS_DOMAIN, RDFS_RANGE]
        .iter()
        .map(|p| Term::iri(*p))
        .chain([node("p"), node("q")])
        .collect();
    let mut objects = terms.clone();
    objects.push(Term::string("lit"));
    prop::collection::vec(
        (prop::sample::select(terms), prop::sample::select(predicates), prop::sample::select(objects)),
        0..14,
    )
    .prop_map(|ts| ts.into_iter().map(|(s, p, o)| Triple::new(s, p, o).unwrap()).collect())
}

fn per_rule_examples() -> Result<usize, String> {
    let t = |s: &str, p: &str, o: &str| Triple::iris(&iri(s), &iri(p), &iri(o));
    fn iri(n: &str) -> String {
        if n.contains(':') && n.starts_with("http") {
            n.to_owned()
        } else {
            support::iri(n)
        }
    }
    let cases: Vec<(Rule, Vec<Triple>, Vec<Triple>)> = vec![
        (
            Rule::Rdf1,
            vec![t("x", "p", "y")],
            vec![t("p", RDF_TYPE, RDF_PROPERTY), t(RDF_TYPE, RDF_TYPE, RDF_PROPERTY)],
        ),
        (Rule::Rdfs2, vec![t("p", RDFS_DOMAIN, "C"), t("x", "p", "y")], vec![t("x", RDF_TYPE, "C")]),
        (Rule::Rdfs3, vec![t("p", RDFS_RANGE, "C"), t("x", "p", "y")], vec![t("y", RDF_TYPE, "C")]),
        (
            Rule::Rdfs5,
            vec![t("p", RDFS_SUB_PROPERTY_OF, "q"), t("q", RDFS_SUB_PROPERTY_OF, "r")],
            vec![t("p", RDFS_SUB_PROPERTY_OF, "r")],
        ),
        (Rule::Rdfs7, vec![t("p", RDFS_SUB_PROPERTY_OF, "q"), t("x", "p", "y")], vec![t("x", "q", "y")]),
        (Rule::Rdfs9, vec![t("C", RDFS_SUB_CLASS_OF, "D"), t("x", RDF_TYPE, "C")], vec![t("x", RDF_TYPE, "D")]),
        (
            Rule::Rdfs11,
            vec![t("C", RDFS_SUB_CLASS_OF, "D"), t("D", RDFS_SUB_CLASS_OF, "E")],
            vec![t("C", RDFS_SUB_CLASS_OF, "E")],
        ),
        (
            Rule::SubClassReflexive,
            vec![t("C", RDFS_SUB_CLASS_OF, "D")],
            vec![t("C", RDFS_SUB_CLASS_OF, "C"), t("D", RDFS_SUB_CLASS_OF, "D")],
        ),
        (
            Rule::SubPropertyReflexive,
            vec![t("p", RDFS_SUB_PROPERTY_OF, "q")],
            vec![t("p", RDFS_SUB_PROPERTY_OF, "p"), t("q", RDFS_SUB_PROPERTY_OF, "q")],
        ),
    ];
    for (rule, input, added) in &cases {
        let g: Graph = input.iter().cloned().collect();
        let got = closure(&g, &ClosureProfile::custom(&[*rule]));
        let want: Graph = input.iter().chain(added).cloned().collect();
        ensure(got == want, || format!("{rule:?}: got\n{}", got.to_ntriples()))?;
    }
    // a literal range filler is never typed
    let g: Graph = [t("p", RDFS_RANGE, "C"), Triple::new(node("x"), node("p"), Term::string("v")).unwrap()]
        .into_iter()
        .collect();
    ensure(closure(&g, &ClosureProfile::custom(&[Rule::Rdfs3])) == g, || "range typed a literal".into())?;
    Ok(cases.len() + 1)
}

fn closure_properties() -> Outcome {
    let rdfs = ClosureProfile::rdfs();
    let mut r = runner(100);
    let strategy = (rdfs_graph(), proptest::collection::vec(proptest::bool::ANY, 14));
    r.run(&strategy, |(g, keep)| {
        let c = closure(&g, &rdfs);
        let sub: Graph = g.iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t.clone()).collect();
        let fail = |what: &str| Err(TestCaseError::fail(format!("{what} fails on\n{}", g.to_ntriples())));
        if !g.is_subset(&c) {
            return fail("inflation");
        }
        if closure(&c, &rdfs) != c {
            return fail("idempotence");
        }
        if !closure(&sub, &rdfs).is_subset(&c) {
            return fail("monotonicity");
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let rules = per_rule_examples()?;
    Ok(format!("100 graphs inflationary, idempotent and monotone; {rules} rule examples"))
}

fn timed_validation(triples: usize) -> Result<(usize, Duration), String> {
    let g = corpus::synthetic_university(triples);
    let constraints = corpus::synthetic_constraints();
    let ontology = corpus::university_ontology();
    let mut best = Duration::MAX;
    for _ in 0..2 {
        let start = Instant::now();
        let v = validate_with(&g, &ontology, &constraints, &ValidateOptions::default()).map_err(|e| e.to_string())?;
        best = best.min(start.elapsed());
        ensure(v.report.axioms.len() == 20, || "constraint count".into())?;
    }
    Ok((g.len(), best))
}

fn scaling() -> Outcome {
    let sizes = [10_000, 30_000, 100_000];
    let mut runs = Vec::new();
    for n in sizes {
        runs.push(timed_validation(n)?);
    }
    let (n_big, t_big) = runs[2];
    ensure(t_big < Duration::from_secs(10), || format!("{n_big} triples took {t_big:?}"))?;
    // floor against timer noise on the small size
    let secs = |d: Duration| d.as_secs_f64().max(1e-3);
    let overall = (secs(runs[2].1) / secs(runs[0].1)).ln() / (runs[2].0 as f64 / runs[0].0 as f64).ln();
    ensure(overall <= 2.0, || format!("growth exponent {overall:.2}"))?;
    let times: Vec<String> = runs.iter().map(|(n, t)| format!("{n}: {t:.0?}")).collect();
    Ok(format!("{}; exponent {overall:.2}", times.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("university constraints with RDFS closure", university_checks),
        ("university recognition", university_recognition),
        ("mutual-friend recognition", pure_person),
        ("explicit domain and range variant", explicit_domains_ranges),
        ("John in the closed description", john_description),
        ("fixpoint equals the unique maximal model", fixpoint_matches_brute_force),
        ("checker equals the naive evaluator", checker_matches_naive),
        ("SPARQL queries agree with the checker", sparql_differential),
        ("closure properties", closure_properties),
        ("polynomial scaling", scaling),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {title}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
