//! Checks an instance model against its ontology.
//!
//! Four families of violations, all under the closed-world reading (a link
//! that is not in the model does not exist):
//!
//! | code | meaning |
//! |------|---------|
//! | `TYPE_MISMATCH` | a link endpoint is not an instance of the relationship's endpoint term |
//! | `MULT_MIN`, `MULT_MAX` | a node has too few or too many partners through a relationship |
//! | `GENSET_DISJOINT` | a node falls under two children of a disjoint generalization set |
//! | `GENSET_INCOMPLETE` | a node of a complete set's parent falls under none of its children |
//! | `AXIOM_<id>` | an axiom of the ontology fails; the witness is attached |
//!
//! Cardinalities use the UML reading: the card written next to a term
//! bounds how many instances of that term partner one instance at the
//! other end. Links that fail typing are left out of the counts.
//!
//! In [`ValidationMode::Partial`] the model may be a fragment, so
//! `MULT_MIN` and `GENSET_INCOMPLETE` are not reported.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::axiom::{evaluate_axiom, AxiomError};
use crate::instance::{resolve_relationship, GraphError, InstanceGraph, InstanceModel};
use crate::model::{Completeness, DeclKind, Disjointness, RelationshipDef, TermPath, Workspace};
use crate::report::{Diagnostic, Report};

pub const TYPE_MISMATCH: &str = "TYPE_MISMATCH";
pub const MULT_MIN: &str = "MULT_MIN";
pub const MULT_MAX: &str = "MULT_MAX";
pub const GENSET_DISJOINT: &str = "GENSET_DISJOINT";
pub const GENSET_INCOMPLETE: &str = "GENSET_INCOMPLETE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ValidationMode {
    #[default]
    Complete,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ValidationOptions {
    pub mode: ValidationMode,
}

impl ValidationOptions {
    pub fn complete() -> Self {
        ValidationOptions {
            mode: ValidationMode::Complete,
        }
    }

    pub fn partial() -> Self {
        ValidationOptions {
            mode: ValidationMode::Partial,
        }
    }

    fn complete_mode(&self) -> bool {
        self.mode == ValidationMode::Complete
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Axiom(Box<AxiomError>),
}

impl From<AxiomError> for ValidateError {
    fn from(e: AxiomError) -> Self {
        ValidateError::Axiom(Box::new(e))
    }
}

/// Members of an endpoint term; foreign or unresolvable terms have none.
fn members<'g>(graph: &'g InstanceGraph<'_>, path: &TermPath) -> &'g BTreeSet<usize> {
    static EMPTY: BTreeSet<usize> = BTreeSet::new();
    match graph.workspace().resolve_path(&graph.ontology().name, path) {
        Ok(t) => graph.members_of_resolved(&t),
        Err(_) => &EMPTY,
    }
}

/// Link indices (into the model) whose endpoints are typed correctly.
fn typed_links(graph: &InstanceGraph<'_>, out: &mut Vec<Diagnostic>) -> Vec<(usize, usize, usize)> {
    let onto = graph.ontology();
    let model = graph.model();
    let mut ok = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, l) in model.links.iter().enumerate() {
        let (Ok(rel), Some(s), Some(t)) = (
            resolve_relationship(onto, &l.relationship),
            graph.node_index(&l.source),
            graph.node_index(&l.target),
        ) else {
            continue;
        };
        if !seen.insert((rel, s, t)) {
            continue;
        }
        let r = &onto.relationships[rel];
        let span = model.spans.get(DeclKind::Link, i).cloned();
        let mut good = true;
        for (node, other, end, role) in [(s, t, &r.source.term, "source"), (t, s, &r.target.term, "target")] {
            if !members(graph, end).contains(&node) {
                good = false;
                out.push(
                    Diagnostic::error(
                        TYPE_MISMATCH,
                        vec![
                            graph.node_id(node).to_string(),
                            r.name.clone(),
                            graph.node_id(other).to_string(),
                        ],
                        format!(
                            "{} is the {role} of \"{}\" but is not a {}",
                            graph.node_id(node),
                            r.name,
                            end
                        ),
                    )
                    .with_span(span.clone()),
                );
            }
        }
        if good {
            ok.push((rel, s, t));
        }
    }
    ok
}

/// Every link's endpoints must be instances of the relationship's endpoint
/// terms (subterms included).
pub fn check_typing(graph: &InstanceGraph<'_>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    typed_links(graph, &mut out);
    out
}

/// Partner counts per node and relationship, over well-typed links only.
pub fn check_multiplicities(graph: &InstanceGraph<'_>, options: ValidationOptions) -> Vec<Diagnostic> {
    let links = typed_links(graph, &mut Vec::new());
    let mut outgoing: HashMap<(usize, usize), usize> = HashMap::new();
    let mut incoming: HashMap<(usize, usize), usize> = HashMap::new();
    for &(rel, s, t) in &links {
        *outgoing.entry((rel, s)).or_default() += 1;
        *incoming.entry((rel, t)).or_default() += 1;
    }

    let mut out = Vec::new();
    for (ri, r) in graph.ontology().relationships.iter().enumerate() {
        // Each source instance has target_mult targets; each target
        // instance has source_mult sources.
        let checks = [
            (&r.source.term, &outgoing, r.target_mult(), &r.target.term, "targets"),
            (&r.target.term, &incoming, r.source_mult(), &r.source.term, "sources"),
        ];
        for (own_end, counts, mult, other_end, noun) in checks {
            for &n in members(graph, own_end) {
                let count = counts.get(&(ri, n)).copied().unwrap_or(0);
                let code = if mult.above_max(count) {
                    MULT_MAX
                } else if options.complete_mode() && mult.below_min(count) {
                    MULT_MIN
                } else {
                    continue;
                };
                out.push(Diagnostic::error(
                    code,
                    vec![graph.node_id(n).to_string(), r.name.clone()],
                    mult_message(graph.node_id(n), r, count, noun, other_end, mult),
                ));
            }
        }
    }
    out
}

fn mult_message(
    node: &str,
    r: &RelationshipDef,
    count: usize,
    noun: &str,
    other_end: &TermPath,
    mult: crate::model::Multiplicity,
) -> String {
    format!(
        "{node} has {count} {} {noun} through \"{}\", expected [{mult}]",
        other_end, r.name
    )
}

/// Disjointness always; completeness only in complete mode.
pub fn check_generalization_sets(graph: &InstanceGraph<'_>, options: ValidationOptions) -> Vec<Diagnostic> {
    let onto = graph.ontology();
    let canon = |n: &str| onto.canonical_name(n).unwrap_or(n).to_string();
    let mut out = Vec::new();
    for g in &onto.generalization_sets {
        let parent = canon(&g.parent);
        let children: Vec<String> = g.children.iter().map(|c| canon(c)).collect();
        for &n in members(graph, &TermPath::local(&parent)) {
            let id = graph.node_id(n);
            let under: Vec<&String> = children.iter().filter(|c| graph.is_member(n, c)).collect();
            if g.disjointness == Disjointness::Disjoint && under.len() > 1 {
                let mut subjects = vec![id.to_string(), parent.clone()];
                subjects.extend(under.iter().map(|c| c.to_string()));
                let names: Vec<&str> = under.iter().map(|c| c.as_str()).collect();
                out.push(Diagnostic::error(
                    GENSET_DISJOINT,
                    subjects,
                    format!("{id} is under disjoint subterms of \"{parent}\": {}", names.join(", ")),
                ));
            }
            if g.completeness == Completeness::Complete && options.complete_mode() && under.is_empty() {
                out.push(Diagnostic::error(
                    GENSET_INCOMPLETE,
                    vec![id.to_string(), parent.clone()],
                    format!("{id} is a \"{parent}\" but none of {}", children.join(", ")),
                ));
            }
        }
    }
    out
}

/// Axiom violations of the model's own ontology, one per witness.
pub fn check_axioms(graph: &InstanceGraph<'_>) -> Result<Vec<Diagnostic>, AxiomError> {
    let mut out = Vec::new();
    for rule in &graph.ontology().axioms {
        for w in evaluate_axiom(rule, graph)? {
            out.push(
                Diagnostic::error(
                    rule.violation_code(),
                    w.nodes().map(str::to_string).collect(),
                    format!("axiom {} fails for {w}", rule.id),
                )
                .with_witness(w),
            );
        }
    }
    Ok(out)
}

/// Runs every check and returns the canonical report.
///
/// ```
/// use ontoarch::conformance::{validate, ValidationOptions};
///
/// let ws = ontoarch::corpus::load_workspace();
/// let model = ontoarch::corpus::instance("valid.inst");
/// assert!(validate(&model, &ws, ValidationOptions::complete()).unwrap().is_pass());
/// ```
pub fn validate(model: &InstanceModel, workspace: &Workspace, options: ValidationOptions) -> Result<Report, ValidateError> {
    let graph = InstanceGraph::build(model, workspace)?;
    let mut all = Vec::new();
    typed_links(&graph, &mut all);
    all.extend(check_multiplicities(&graph, options));
    all.extend(check_generalization_sets(&graph, options));
    all.extend(check_axioms(&graph)?);
    Ok(Report::new(all))
}
