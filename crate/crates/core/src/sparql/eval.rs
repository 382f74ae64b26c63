//! A small evaluator for the query fragment the compiler emits: basic graph
//! patterns, groups, UNION, VALUES, FILTER (NOT EXISTS), MINUS and grouped
//! sub-selects with a distinct count. It exists to test compiled queries
//! without an external engine.

use std::collections::{BTreeMap, BTreeSet};

use super::algebra::{Expr, Pattern, Select, Slot, Var};
use crate::rdf::{Graph, Term};

pub type Solution = BTreeMap<Var, Term>;

struct Data<'g> {
    triples: Vec<(&'g Term, &'g Term, &'g Term)>,
}

/// All solutions of `q` over `g`, deduplicated when the query is DISTINCT.
pub fn evaluate(q: &Select, g: &Graph) -> Vec<Solution> {
    let data = Data {
        triples: g.iter().map(|t| (t.subject(), t.predicate(), t.object())).collect(),
    };
    select(&data, q, &Solution::new())
}

fn compatible(a: &Solution, b: &Solution) -> bool {
    a.iter().all(|(k, v)| b.get(k).is_none_or(|w| w == v))
}

fn bind(s: &mut Solution, slot: &Slot, t: &Term) -> bool {
    match slot {
        Slot::Term(u) => u == t,
        Slot::Var(v) => match s.get(v) {
            Some(u) => u == t,
            None => {
                s.insert(v.clone(), t.clone());
                true
            }
        },
    }
}

fn select(data: &Data<'_>, q: &Select, outer: &Solution) -> Vec<Solution> {
    // only projected variables are visible from outside
    let seed: Solution = outer
        .iter()
        .filter(|(k, _)| q.projection.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let rows = group(data, &q.pattern, &seed);
    let mut out: Vec<Solution> = if q.group_by.is_empty() && q.having.is_none() {
        rows.into_iter()
            .map(|r| r.into_iter().filter(|(k, _)| q.projection.contains(k)).collect())
            .collect()
    } else {
        let mut groups: BTreeMap<Vec<Option<Term>>, Vec<Solution>> = BTreeMap::new();
        for r in rows {
            let key = q.group_by.iter().map(|v| r.get(v).cloned()).collect();
            groups.entry(key).or_default().push(r);
        }
        groups
            .into_iter()
            .filter(|(_, members)| q.having.as_ref().is_none_or(|h| having(h, members)))
            .map(|(key, _)| {
                q.group_by
                    .iter()
                    .zip(key)
                    .filter_map(|(v, t)| t.map(|t| (v.clone(), t)))
                    .filter(|(v, _)| q.projection.contains(v))
                    .collect()
            })
            .collect()
    };
    if q.distinct {
        let unique: BTreeSet<Solution> = out.drain(..).collect();
        out = unique.into_iter().collect();
    }
    out.into_iter()
        .filter(|s| compatible(s, outer))
        .map(|s| {
            let mut merged = outer.clone();
            merged.extend(s);
            merged
        })
        .collect()
}

fn having(e: &Expr, members: &[Solution]) -> bool {
    match e {
        Expr::CountAtLeast(v, n) => {
            let distinct: BTreeSet<&Term> = members.iter().filter_map(|m| m.get(v)).collect();
            distinct.len() as u64 >= *n
        }
        _ => unreachable!("the compiler only emits count conditions in HAVING"),
    }
}

/// Solutions of a group extending `outer`. Filters apply to the whole group.
fn group(data: &Data<'_>, ps: &[Pattern], outer: &Solution) -> Vec<Solution> {
    let mut current = vec![outer.clone()];
    let mut filters = Vec::new();
    for p in ps {
        match p {
            Pattern::Filter(e) => filters.push(e),
            Pattern::Minus(inner) => {
                let removed = pattern(data, inner, &Solution::new());
                current.retain(|s| {
                    !removed
                        .iter()
                        .any(|r| compatible(r, s) && r.keys().any(|k| s.contains_key(k)))
                });
            }
            other => current = current.iter().flat_map(|s| pattern(data, other, s)).collect(),
        }
    }
    current.retain(|s| filters.iter().all(|e| test(data, e, s)));
    current
}

fn pattern(data: &Data<'_>, p: &Pattern, outer: &Solution) -> Vec<Solution> {
    match p {
        Pattern::Triple(s, pr, o) => data
            .triples
            .iter()
            .filter_map(|(ts, tp, to)| {
                let mut sol = outer.clone();
                (bind(&mut sol, s, ts) && bind(&mut sol, pr, tp) && bind(&mut sol, o, to)).then_some(sol)
            })
            .collect(),
        Pattern::Group(ps) => group(data, ps, outer),
        Pattern::Union(branches) => branches.iter().flat_map(|b| pattern(data, b, outer)).collect(),
        Pattern::Values(vars, rows) => rows
            .iter()
            .filter_map(|row| {
                let mut sol = outer.clone();
                vars.iter()
                    .zip(row)
                    .all(|(v, t)| bind(&mut sol, &Slot::Var(v.clone()), t))
                    .then_some(sol)
            })
            .collect(),
        Pattern::Select(q) => select(data, q, outer),
        Pattern::Filter(_) | Pattern::Minus(_) => group(data, std::slice::from_ref(p), outer),
    }
}

fn test(data: &Data<'_>, e: &Expr, s: &Solution) -> bool {
    match e {
        Expr::IsLiteral(v) => s.get(v).is_some_and(Term::is_literal),
        Expr::DatatypeIn(v, dts) => match s.get(v) {
            Some(Term::Literal(lit)) => dts.iter().any(|d| d == lit.datatype()),
            _ => false,
        },
        Expr::SameTerm(a, b) => matches!((s.get(a), s.get(b)), (Some(x), Some(y)) if x == y),
        // an unbound variable makes the inner test an error, which filters out
        Expr::Not(inner) => match inner.as_ref() {
            Expr::IsLiteral(v) | Expr::DatatypeIn(v, _) if !s.contains_key(v) => false,
            _ => !test(data, inner, s),
        },
        Expr::And(es) => es.iter().all(|e| test(data, e, s)),
        Expr::NotExists(p) => pattern(data, p, s).is_empty(),
        Expr::CountAtLeast(..) => unreachable!("only in HAVING"),
    }
}
