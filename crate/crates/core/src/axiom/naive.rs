use std::collections::BTreeSet;

use super::{AxiomError, AxiomHead, AxiomRule, RelationAtom, VarTable, Witness};
use crate::instance::{GraphError, InstanceModel};
use crate::model::{ResolveError, TermPath, TermRef, Workspace};

/// Reference evaluator with the same contract as [`super::evaluate_axiom`].
///
/// Enumerates every tuple of nodes for the universal variables and, for an
/// existential head, every node for the bound variable. Class membership is
/// decided with [`Workspace::subsumes`] and links are found by scanning the
/// model's link list. No index is built and no branch is pruned.
pub fn evaluate_axiom_naive(
    rule: &AxiomRule,
    model: &InstanceModel,
    workspace: &Workspace,
) -> Result<Vec<Witness>, AxiomError> {
    let resolve_err = |source| AxiomError::Resolve {
        axiom: rule.id.clone(),
        source,
    };
    let onto = workspace.get(&model.conforms_to).ok_or_else(|| {
        AxiomError::Graph(GraphError::UnknownOntology {
            model: model.name.clone(),
            ontology: model.conforms_to.clone(),
        })
    })?;
    let vars = VarTable::new(rule)?;
    let n_univ = rule.universals.len();

    for atom in all_atoms(rule) {
        let n = onto.relationships_named(&atom.relationship).count();
        if n != 1 {
            let source = if n == 0 {
                ResolveError::RelationshipNotFound {
                    ontology: onto.name.clone(),
                    name: atom.relationship.clone(),
                }
            } else {
                ResolveError::AmbiguousRelationship {
                    ontology: onto.name.clone(),
                    name: atom.relationship.clone(),
                    candidates: Vec::new(),
                }
            };
            return Err(resolve_err(source));
        }
    }
    let exists_limit = n_univ + usize::from(matches!(rule.head, AxiomHead::Exists { .. }));
    let positions = |a: &RelationAtom, limit: usize| -> Result<(usize, usize), AxiomError> {
        Ok((vars.position(rule, &a.left, limit)?, vars.position(rule, &a.right, limit)?))
    };
    for a in &rule.body {
        positions(a, n_univ)?;
    }
    for a in all_atoms(rule).skip(rule.body.len()) {
        positions(a, exists_limit)?;
    }

    let nodes = &model.nodes;
    let mut guards: Vec<&TermPath> = rule.universals.iter().map(|v| &v.guard).collect();
    if let AxiomHead::Exists { var, .. } = &rule.head {
        guards.push(&var.guard);
    }
    // member[v][i]: node i satisfies the guard of variable v.
    let mut member = Vec::with_capacity(guards.len());
    for g in guards {
        let guard = workspace.resolve_path(&onto.name, g).map_err(resolve_err)?;
        let mut row = Vec::with_capacity(nodes.len());
        for node in nodes {
            let mut is = false;
            for t in &node.asserted_terms {
                let asserted = workspace
                    .resolve_term(&onto.name, t)
                    .map_err(|source| GraphError::Term {
                        node: node.id.clone(),
                        source,
                    })?;
                is |= subsumes_or_false(workspace, &guard, &asserted).map_err(resolve_err)?;
            }
            row.push(is);
        }
        member.push(row);
    }

    let link = |a: &RelationAtom, assign: &[usize]| -> Result<bool, AxiomError> {
        let (l, r) = positions(a, exists_limit)?;
        let (s, t) = (&nodes[assign[l]].id, &nodes[assign[r]].id);
        Ok(model
            .links
            .iter()
            .any(|k| k.relationship == a.relationship && &k.source == s && &k.target == t))
    };

    let mut out = BTreeSet::new();
    let mut assign = vec![0usize; exists_limit];
    if n_univ > 0 && nodes.is_empty() {
        return Ok(Vec::new());
    }
    loop {
        let guarded = (0..n_univ).all(|v| member[v][assign[v]]);
        let mut body = guarded;
        for a in &rule.body {
            body = body && link(a, &assign)?;
        }
        if body {
            let head = match &rule.head {
                AxiomHead::Holds(a) => link(a, &assign)?,
                AxiomHead::Not(a) => !link(a, &assign)?,
                AxiomHead::Exists { atoms, .. } => {
                    let mut any = false;
                    for (w, &is) in member[n_univ].iter().enumerate() {
                        assign[n_univ] = w;
                        let mut all = is;
                        for a in atoms {
                            all = all && link(a, &assign)?;
                        }
                        any |= all;
                    }
                    any
                }
            };
            if !head {
                out.insert(Witness::new(
                    rule.universals
                        .iter()
                        .enumerate()
                        .map(|(v, d)| (d.name.clone(), nodes[assign[v]].id.clone())),
                ));
            }
        }
        if !advance(&mut assign[..n_univ], nodes.len()) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

fn subsumes_or_false(ws: &Workspace, ancestor: &TermRef, descendant: &TermRef) -> Result<bool, ResolveError> {
    match ws.subsumes(ancestor, descendant) {
        Err(ResolveError::CrossOntology { .. }) => Ok(false),
        other => other,
    }
}

/// Odometer increment over `0..base` per position; false after the last tuple.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn all_atoms(rule: &AxiomRule) -> impl Iterator<Item = &RelationAtom> {
    let head: Vec<&RelationAtom> = match &rule.head {
        AxiomHead::Holds(a) | AxiomHead::Not(a) => vec![a],
        AxiomHead::Exists { atoms, .. } => atoms.iter().collect(),
    };
    rule.body.iter().chain(head)
}
