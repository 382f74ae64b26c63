//! Closed-world model checking of axioms against a canonical interpretation.

mod eval;

use std::collections::BTreeMap;

pub use eval::{check_complements, eval_class, eval_prop, mentions_data, EvalError, Evaluator, Rel};

use crate::constraint::{domain_range_to_constraints, new_vocabulary, Axiom, AxiomSet, ClassExpr, PropExpr};
use crate::interpretation::{canonical_interpretation, DatatypeRegistry, Filler, Interpretation, NodeId, NodeSet};
use crate::rdf::{Graph, Term};
use crate::rdfs::{closure, strip_domain_range, ClosureProfile};
use crate::recognition::{recognize, RecognitionResult};
use crate::Error;

pub const DEFAULT_WITNESS_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Violated => "VIOLATED",
        }
    }
}

/// One counterexample to an axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub node: Term,
    /// Second element of a violating pair, for property inclusions.
    pub object: Option<Term>,
    pub detail: String,
    /// Fillers of `node` that make the right-hand side fail.
    pub culprits: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomOutcome {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub witness_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub index: usize,
    pub source: String,
    pub line: usize,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub witness_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub axioms: Vec<AxiomReport>,
    pub recognition: Option<RecognitionResult>,
    pub overall: bool,
}

impl ValidationReport {
    pub fn violated(&self) -> impl Iterator<Item = &AxiomReport> {
        self.axioms.iter().filter(|r| r.verdict == Verdict::Violated)
    }
}

/// Whether `a` holds, without collecting witnesses.
pub fn axiom_holds(ev: &mut Evaluator<'_>, a: &Axiom) -> Result<bool, EvalError> {
    Ok(match a {
        Axiom::SubClass(l, r) => ev.eval_class(l)?.is_subset(&*ev.eval_class(r)?),
        Axiom::EquivClass(l, r) => *ev.eval_class(l)? == *ev.eval_class(r)?,
        Axiom::SubProp(l, r) => {
            let big = ev.eval_prop(r)?;
            ev.eval_prop(l)?.pairs().all(|(x, f)| big.contains(x, f))
        }
        Axiom::Member(t, c) => {
            let x = ev
                .interpretation()
                .node_id(t)
                .ok_or_else(|| EvalError::UnboundIndividual(t.clone()))?;
            ev.member(x, c)?
        }
        Axiom::Different(ts) => different_clashes(ev.interpretation(), ts)?.is_empty(),
    })
}

fn different_clashes<'t>(i: &Interpretation, ts: &'t [Term]) -> Result<Vec<(&'t Term, &'t Term)>, EvalError> {
    let mut ids = Vec::with_capacity(ts.len());
    for t in ts {
        ids.push(i.node_id(t).ok_or_else(|| EvalError::UnboundIndividual(t.clone()))?);
    }
    let mut out = Vec::new();
    for a in 0..ts.len() {
        for b in a + 1..ts.len() {
            if ids[a] == ids[b] {
                out.push((&ts[a], &ts[b]));
            }
        }
    }
    Ok(out)
}

/// Fillers of `x` responsible for `x` failing `c`.
fn culprits(ev: &Evaluator<'_>, x: NodeId, c: &ClassExpr) -> Result<Vec<Filler>, EvalError> {
    let mut out = Vec::new();
    match c {
        ClassExpr::And(cs) => {
            for c in cs {
                if !ev.member(x, c)? {
                    out.extend(culprits(ev, x, c)?);
                }
            }
            out.sort_unstable();
            out.dedup();
        }
        ClassExpr::All(p, q) => {
            for f in ev.fillers(x, p)? {
                if !ev.filler_in(f, q)? {
                    out.push(f);
                }
            }
        }
        ClassExpr::Max(k, p, q) | ClassExpr::Exact(k, p, q) => {
            let fillers = ev.qualified_fillers(x, p, q.as_deref())?;
            if fillers.len() > *k as usize {
                out = fillers;
            }
        }
        _ => {}
    }
    Ok(out)
}

struct Collector {
    cap: usize,
    count: usize,
    witnesses: Vec<Witness>,
}

impl Collector {
    fn wants_more(&self) -> bool {
        self.witnesses.len() < self.cap
    }

    fn push(&mut self, w: impl FnOnce() -> Result<Witness, EvalError>) -> Result<(), EvalError> {
        self.count += 1;
        if self.wants_more() {
            self.witnesses.push(w()?);
        }
        Ok(())
    }
}

fn subclass_witnesses(
    ev: &mut Evaluator<'_>,
    l: &ClassExpr,
    r: &ClassExpr,
    out: &mut Collector,
) -> Result<(), EvalError> {
    let bad = ev.eval_class(l)?.difference(&*ev.eval_class(r)?);
    if bad.is_empty() {
        return Ok(());
    }
    let (ls, rs) = (l.to_string(), r.to_string());
    let i = ev.interpretation();
    for x in bad.iter() {
        out.push(|| {
            let node = i.term(x).clone();
            Ok(Witness {
                detail: format!("{node} is in {ls} but not in {rs}"),
                culprits: culprits(ev, x, r)?.into_iter().map(|f| i.filler_term(f)).collect(),
                node,
                object: None,
            })
        })?;
    }
    Ok(())
}

fn subprop_witnesses(ev: &mut Evaluator<'_>, l: &PropExpr, r: &PropExpr, out: &mut Collector) -> Result<(), EvalError> {
    let big = ev.eval_prop(r)?;
    let small = ev.eval_prop(l)?;
    let i = ev.interpretation();
    for (x, f) in small.sorted_pairs() {
        if !big.contains(x, f) {
            out.push(|| {
                let (node, object) = (i.term(x).clone(), i.filler_term(f));
                Ok(Witness {
                    detail: format!("({node}, {object}) is in {l} but not in {r}"),
                    node,
                    object: Some(object),
                    culprits: Vec::new(),
                })
            })?;
        }
    }
    Ok(())
}

/// Checks one axiom, keeping at most `cap` witnesses while counting all of them.
pub fn check_axiom(ev: &mut Evaluator<'_>, a: &Axiom, cap: usize) -> Result<AxiomOutcome, EvalError> {
    check_complements(a)?;
    let mut out = Collector {
        cap,
        count: 0,
        witnesses: Vec::new(),
    };
    match a {
        Axiom::SubClass(l, r) => subclass_witnesses(ev, l, r, &mut out)?,
        Axiom::EquivClass(l, r) => {
            subclass_witnesses(ev, l, r, &mut out)?;
            subclass_witnesses(ev, r, l, &mut out)?;
        }
        Axiom::SubProp(l, r) => subprop_witnesses(ev, l, r, &mut out)?,
        Axiom::Member(t, c) => {
            if !axiom_holds(ev, a)? {
                let x = ev.interpretation().node_id(t).expect("checked by axiom_holds");
                out.push(|| {
                    Ok(Witness {
                        node: t.clone(),
                        object: None,
                        detail: format!("{t} is not in {c}"),
                        culprits: culprits(ev, x, c)?
                            .into_iter()
                            .map(|f| ev.interpretation().filler_term(f))
                            .collect(),
                    })
                })?;
            }
        }
        Axiom::Different(ts) => {
            for (s, t) in different_clashes(ev.interpretation(), ts)? {
                out.push(|| {
                    Ok(Witness {
                        node: s.clone(),
                        object: Some(t.clone()),
                        detail: format!("{s} and {t} denote the same element"),
                        culprits: Vec::new(),
                    })
                })?;
            }
        }
    }
    Ok(AxiomOutcome {
        verdict: if out.count == 0 { Verdict::Satisfied } else { Verdict::Violated },
        witnesses: out.witnesses,
        witness_count: out.count,
    })
}

/// Checks every axiom of `axioms`, reading new classes from `overlay`.
pub fn check_all(
    i: &Interpretation,
    overlay: Option<&BTreeMap<String, NodeSet>>,
    axioms: &AxiomSet,
    cap: usize,
) -> Result<Vec<AxiomReport>, EvalError> {
    let mut ev = match overlay {
        Some(o) => Evaluator::with_overlay(i, o),
        None => Evaluator::new(i),
    };
    axioms
        .iter()
        .enumerate()
        .map(|(index, a)| {
            let o = check_axiom(&mut ev, a, cap)?;
            Ok(AxiomReport {
                index,
                source: axioms.source(index).to_owned(),
                line: axioms.line(index),
                verdict: o.verdict,
                witnesses: o.witnesses,
                witness_count: o.witness_count,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub profile: ClosureProfile,
    /// Move `rdfs:domain`/`rdfs:range` out of the ontology and check them
    /// as constraints instead of inferring from them.
    pub explicit_domains_ranges: bool,
    pub witness_cap: usize,
    /// Candidate budget for brute-force recognition of definitions that
    /// are not certified monotone. `None` rejects such definitions.
    pub brute_force_budget: Option<u64>,
    pub registry: DatatypeRegistry,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            profile: ClosureProfile::rdfs(),
            explicit_domains_ranges: false,
            witness_cap: DEFAULT_WITNESS_CAP,
            brute_force_budget: None,
            registry: DatatypeRegistry::standard(),
        }
    }
}

/// Everything a validation run produced.
#[derive(Debug, Clone)]
pub struct Validation {
    pub interpretation: Interpretation,
    /// The constraints actually checked, including derived domain and range ones.
    pub constraints: AxiomSet,
    pub report: ValidationReport,
}

/// Validates `data` plus `ontology` against `constraints` under `profile`.
pub fn validate(data: &Graph, ontology: &Graph, constraints: &AxiomSet, profile: ClosureProfile) -> Result<Validation, Error> {
    validate_with(
        data,
        ontology,
        constraints,
        &ValidateOptions {
            profile,
            ..ValidateOptions::default()
        },
    )
}

pub fn validate_with(
    data: &Graph,
    ontology: &Graph,
    constraints: &AxiomSet,
    options: &ValidateOptions,
) -> Result<Validation, Error> {
    let mut effective = constraints.clone();
    let ontology = if options.explicit_domains_ranges {
        let (kept, removed) = strip_domain_range(ontology);
        effective.extend(domain_range_to_constraints(&removed)?)?;
        kept
    } else {
        ontology.clone()
    };
    let g = closure(&data.union(&ontology), &options.profile);
    let interpretation = canonical_interpretation(&g, &options.registry)?;
    let new = new_vocabulary(&effective, interpretation.vocabulary())?;
    let recognition = if new.is_empty() {
        None
    } else {
        Some(recognize(&interpretation, &effective, options.brute_force_budget)?)
    };
    let axioms = check_all(
        &interpretation,
        recognition.as_ref().map(|r| &r.extensions),
        &effective,
        options.witness_cap,
    )?;
    let overall =
        axioms.iter().all(|r| r.verdict == Verdict::Satisfied) && recognition.as_ref().is_none_or(|r| r.model_found);
    Ok(Validation {
        interpretation,
        constraints: effective,
        report: ValidationReport {
            axioms,
            recognition,
            overall,
        },
    })
}
