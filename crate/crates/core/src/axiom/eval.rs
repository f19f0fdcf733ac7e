use std::collections::BTreeSet;

use super::{AxiomError, AxiomHead, AxiomRule, RelationAtom, VarTable, Witness};
use crate::instance::{resolve_relationship, Direction, InstanceGraph};

/// Atom with relationship index and variable positions.
#[derive(Debug, Clone, Copy)]
struct Atom {
    rel: usize,
    left: usize,
    right: usize,
}

struct Compiled {
    /// Candidate nodes per variable (universals, then the existential).
    ranges: Vec<BTreeSet<usize>>,
    universals: usize,
    body: Vec<Atom>,
    head: Head,
}

enum Head {
    Holds(Atom),
    Not(Atom),
    Exists(Vec<Atom>),
}

fn compile(rule: &AxiomRule, graph: &InstanceGraph<'_>) -> Result<Compiled, AxiomError> {
    let vars = VarTable::new(rule)?;
    let universals = rule.universals.len();
    let onto = graph.ontology();
    let ws = graph.workspace();
    let resolve_err = |source| AxiomError::Resolve {
        axiom: rule.id.clone(),
        source,
    };

    let mut guards: Vec<_> = rule.universals.iter().map(|v| &v.guard).collect();
    if let AxiomHead::Exists { var, .. } = &rule.head {
        guards.push(&var.guard);
    }
    let mut ranges = Vec::with_capacity(guards.len());
    for g in guards {
        let term = ws.resolve_path(&onto.name, g).map_err(resolve_err)?;
        ranges.push(graph.members_of_resolved(&term).clone());
    }

    let atom = |a: &RelationAtom, limit: usize| -> Result<Atom, AxiomError> {
        Ok(Atom {
            rel: resolve_relationship(onto, &a.relationship).map_err(resolve_err)?,
            left: vars.position(rule, &a.left, limit)?,
            right: vars.position(rule, &a.right, limit)?,
        })
    };
    let body = rule
        .body
        .iter()
        .map(|a| atom(a, universals))
        .collect::<Result<_, _>>()?;
    let head = match &rule.head {
        AxiomHead::Holds(a) => Head::Holds(atom(a, universals)?),
        AxiomHead::Not(a) => Head::Not(atom(a, universals)?),
        AxiomHead::Exists { atoms, .. } => Head::Exists(
            atoms
                .iter()
                .map(|a| atom(a, universals + 1))
                .collect::<Result<_, _>>()?,
        ),
    };
    Ok(Compiled {
        ranges,
        universals,
        body,
        head,
    })
}

/// Binding order for the universals: start from the smallest range, then
/// repeatedly take the variable most connected to those already placed.
fn plan(c: &Compiled) -> Vec<usize> {
    let n = c.universals;
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let best = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = c
                    .body
                    .iter()
                    .filter(|a| {
                        (a.left == v && a.right != v && placed[a.right])
                            || (a.right == v && a.left != v && placed[a.left])
                    })
                    .count();
                (links, std::cmp::Reverse(c.ranges[v].len()), std::cmp::Reverse(v))
            })
            .expect("an unplaced variable remains");
        placed[best] = true;
        order.push(best);
    }
    order
}

/// Candidates for `var` given the bound variables: partners through every
/// atom that connects `var` to a bound variable, intersected with its range.
fn candidates(
    graph: &InstanceGraph<'_>,
    var: usize,
    range: &BTreeSet<usize>,
    atoms: &[Atom],
    binding: &[Option<usize>],
) -> BTreeSet<usize> {
    let mut out: Option<BTreeSet<usize>> = None;
    for a in atoms {
        let step = if a.left == var && a.right != var {
            binding[a.right].map(|t| graph.partners_idx(a.rel, t, Direction::Incoming))
        } else if a.right == var && a.left != var {
            binding[a.left].map(|s| graph.partners_idx(a.rel, s, Direction::Outgoing))
        } else {
            None
        };
        if let Some(set) = step {
            out = Some(match out {
                None => set.intersection(range).copied().collect(),
                Some(prev) => prev.intersection(set).copied().collect(),
            });
        }
    }
    out.unwrap_or_else(|| range.clone())
}

fn holds(graph: &InstanceGraph<'_>, a: &Atom, binding: &[Option<usize>]) -> bool {
    match (binding[a.left], binding[a.right]) {
        (Some(s), Some(t)) => graph.has_link(a.rel, s, t),
        _ => false,
    }
}

/// Violations of `rule` in `graph`: every assignment of the universal
/// variables that satisfies the body but not the head. Empty iff the axiom
/// holds. The result is sorted.
pub fn evaluate_axiom(rule: &AxiomRule, graph: &InstanceGraph<'_>) -> Result<Vec<Witness>, AxiomError> {
    let c = compile(rule, graph)?;
    let order = plan(&c);

    // Body atoms become checkable once both of their variables are bound.
    let mut checks: Vec<Vec<Atom>> = vec![Vec::new(); order.len()];
    let pos = |v: usize| order.iter().position(|&o| o == v).expect("universal in plan");
    for a in &c.body {
        checks[pos(a.left).max(pos(a.right))].push(*a);
    }

    let mut binding = vec![None; c.ranges.len()];
    let mut out = BTreeSet::new();
    search(graph, &c, &order, &checks, 0, &mut binding, &mut |binding| {
        if !head_holds(graph, &c, binding) {
            out.insert(Witness::new(rule.universals.iter().enumerate().map(|(i, v)| {
                (v.name.clone(), graph.node_id(binding[i].expect("universal bound")).to_string())
            })));
        }
    });
    Ok(out.into_iter().collect())
}

fn search(
    graph: &InstanceGraph<'_>,
    c: &Compiled,
    order: &[usize],
    checks: &[Vec<Atom>],
    depth: usize,
    binding: &mut Vec<Option<usize>>,
    emit: &mut dyn FnMut(&[Option<usize>]),
) {
    if depth == order.len() {
        emit(binding);
        return;
    }
    let var = order[depth];
    for node in candidates(graph, var, &c.ranges[var], &checks[depth], binding) {
        binding[var] = Some(node);
        if checks[depth].iter().all(|a| holds(graph, a, binding)) {
            search(graph, c, order, checks, depth + 1, binding, emit);
        }
    }
    binding[var] = None;
}

fn head_holds(graph: &InstanceGraph<'_>, c: &Compiled, binding: &[Option<usize>]) -> bool {
    match &c.head {
        Head::Holds(a) => holds(graph, a, binding),
        Head::Not(a) => !holds(graph, a, binding),
        Head::Exists(atoms) => {
            let w = c.universals;
            let mut scratch = binding.to_vec();
            candidates(graph, w, &c.ranges[w], atoms, binding)
                .into_iter()
                .any(|node| {
                    scratch[w] = Some(node);
                    atoms.iter().all(|a| holds(graph, a, &scratch))
                })
        }
    }
}
