//! Instance models and their indexed, ontology-resolved view.
//!
//! [`InstanceModel`] is what the `.inst` parser produces: node ids with
//! asserted term names and relationship links, still unresolved.
//! [`InstanceGraph`] resolves it against a [`Workspace`] and indexes class
//! membership (taxonomy-aware) and link traversal in both directions.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::model::workspace_ancestors;
use crate::model::{DeclSpans, Ontology, ResolveError, TermRef, Workspace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceNode {
    pub id: String,
    pub asserted_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceLink {
    pub relationship: String,
    pub source: String,
    pub target: String,
}

impl InstanceLink {
    pub fn new(relationship: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        InstanceLink {
            relationship: relationship.into(),
            source: source.into(),
            target: target.into(),
        }
    }
}

/// A closed-world description of a micro-world: nodes classified by terms
/// of one ontology, and links instantiating its relationships.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstanceModel {
    pub name: String,
    pub conforms_to: String,
    pub nodes: Vec<InstanceNode>,
    pub links: Vec<InstanceLink>,
    pub spans: DeclSpans,
}

impl InstanceModel {
    pub fn new(name: impl Into<String>, conforms_to: impl Into<String>) -> Self {
        InstanceModel {
            name: name.into(),
            conforms_to: conforms_to.into(),
            nodes: Vec::new(),
            links: Vec::new(),
            spans: DeclSpans::default(),
        }
    }

    /// Adds a node, or extends the classification of an existing one.
    pub fn add_node<I, S>(&mut self, id: impl Into<String>, terms: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = id.into();
        let terms = terms.into_iter().map(Into::into);
        match self.nodes.iter_mut().find(|n| n.id == id) {
            Some(n) => {
                for t in terms {
                    if !n.asserted_terms.contains(&t) {
                        n.asserted_terms.push(t);
                    }
                }
            }
            None => self.nodes.push(InstanceNode {
                id,
                asserted_terms: terms.collect(),
            }),
        }
        self
    }

    /// Adds a link; links form a set, so a repeated triple is ignored.
    /// Returns whether the link was new.
    pub fn add_link(&mut self, relationship: &str, source: &str, target: &str) -> bool {
        let link = InstanceLink::new(relationship, source, target);
        if self.links.contains(&link) {
            return false;
        }
        self.links.push(link);
        true
    }

    pub fn remove_link(&mut self, link: &InstanceLink) -> bool {
        let before = self.links.len();
        self.links.retain(|l| l != link);
        before != self.links.len()
    }

    pub fn node(&self, id: &str) -> Option<&InstanceNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("model `{model}` conforms to `{ontology}`, which is not loaded")]
    UnknownOntology { model: String, ontology: String },
    #[error("node `{node}`: {source}")]
    Term {
        node: String,
        #[source]
        source: ResolveError,
    },
    #[error("node `{0}` asserts no terms")]
    Unclassified(String),
    #[error("node `{0}` is declared more than once")]
    DuplicateNode(String),
    #[error("link \"{relationship}\" refers to undeclared node `{node}`")]
    UndeclaredNode { relationship: String, node: String },
    #[error("link {0}")]
    Relationship(#[source] ResolveError),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

/// Read-only, indexed view of an [`InstanceModel`] against its ontology.
#[derive(Debug)]
pub struct InstanceGraph<'a> {
    workspace: &'a Workspace,
    ontology: &'a Ontology,
    model: &'a InstanceModel,
    node_index: HashMap<&'a str, usize>,
    /// Canonical terms each node belongs to, ancestors included.
    extension: Vec<BTreeSet<&'a str>>,
    members: HashMap<&'a str, BTreeSet<usize>>,
    outgoing: HashMap<(usize, usize), BTreeSet<usize>>,
    incoming: HashMap<(usize, usize), BTreeSet<usize>>,
}

static EMPTY: BTreeSet<usize> = BTreeSet::new();

impl<'a> InstanceGraph<'a> {
    pub fn build(model: &'a InstanceModel, workspace: &'a Workspace) -> Result<Self, GraphError> {
        let ontology = workspace
            .get(&model.conforms_to)
            .ok_or_else(|| GraphError::UnknownOntology {
                model: model.name.clone(),
                ontology: model.conforms_to.clone(),
            })?;

        let mut node_index = HashMap::new();
        let mut extension = Vec::with_capacity(model.nodes.len());
        let mut members: HashMap<&str, BTreeSet<usize>> = HashMap::new();
        for (i, node) in model.nodes.iter().enumerate() {
            if node_index.insert(node.id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateNode(node.id.clone()));
            }
            if node.asserted_terms.is_empty() {
                return Err(GraphError::Unclassified(node.id.clone()));
            }
            let mut ext = BTreeSet::new();
            for t in &node.asserted_terms {
                let canonical = resolve_local(ontology, t).map_err(|source| GraphError::Term {
                    node: node.id.clone(),
                    source,
                })?;
                ext.extend(workspace_ancestors(ontology, canonical));
            }
            for t in &ext {
                members.entry(*t).or_default().insert(i);
            }
            extension.push(ext);
        }

        let mut outgoing: HashMap<(usize, usize), BTreeSet<usize>> = HashMap::new();
        let mut incoming: HashMap<(usize, usize), BTreeSet<usize>> = HashMap::new();
        let mut seen = BTreeSet::new();
        for l in &model.links {
            let rel = resolve_relationship(ontology, &l.relationship).map_err(GraphError::Relationship)?;
            let endpoint = |id: &str| {
                node_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::UndeclaredNode {
                        relationship: l.relationship.clone(),
                        node: id.to_string(),
                    })
            };
            let (s, t) = (endpoint(&l.source)?, endpoint(&l.target)?);
            if !seen.insert((rel, s, t)) {
                continue;
            }
            outgoing.entry((rel, s)).or_default().insert(t);
            incoming.entry((rel, t)).or_default().insert(s);
        }

        Ok(InstanceGraph {
            workspace,
            ontology,
            model,
            node_index,
            extension,
            members,
            outgoing,
            incoming,
        })
    }

    pub fn workspace(&self) -> &'a Workspace {
        self.workspace
    }

    pub fn ontology(&self) -> &'a Ontology {
        self.ontology
    }

    pub fn model(&self) -> &'a InstanceModel {
        self.model
    }

    pub fn node_count(&self) -> usize {
        self.extension.len()
    }

    pub fn node_id(&self, index: usize) -> &'a str {
        &self.model.nodes[index].id
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    /// Nodes classified (directly or through subsumption) under `term`.
    /// Terms of other ontologies have no instances here.
    pub fn instances_of(&self, term: &TermRef) -> Result<BTreeSet<&'a str>, ResolveError> {
        let term = self.workspace.resolve_term(&term.ontology, &term.name)?;
        Ok(self
            .members_of_resolved(&term)
            .iter()
            .map(|&i| self.node_id(i))
            .collect())
    }

    pub(crate) fn members_of_resolved(&self, term: &TermRef) -> &BTreeSet<usize> {
        if term.ontology != self.ontology.name {
            return &EMPTY;
        }
        self.members.get(term.name.as_str()).unwrap_or(&EMPTY)
    }

    pub(crate) fn is_member(&self, node: usize, canonical_term: &str) -> bool {
        self.extension[node].contains(canonical_term)
    }

    /// Canonical terms a node belongs to, ancestors included.
    pub fn extension(&self, node: &str) -> Option<&BTreeSet<&'a str>> {
        self.node_index(node).map(|i| &self.extension[i])
    }

    pub fn partners(&self, relationship: &str, node: &str, direction: Direction) -> Result<BTreeSet<&'a str>, GraphError> {
        let rel = resolve_relationship(self.ontology, relationship).map_err(GraphError::Relationship)?;
        let n = self
            .node_index(node)
            .ok_or_else(|| GraphError::UnknownNode(node.to_string()))?;
        Ok(self
            .partners_idx(rel, n, direction)
            .iter()
            .map(|&i| self.node_id(i))
            .collect())
    }

    pub(crate) fn partners_idx(&self, rel: usize, node: usize, direction: Direction) -> &BTreeSet<usize> {
        let map = match direction {
            Direction::Outgoing => &self.outgoing,
            Direction::Incoming => &self.incoming,
        };
        map.get(&(rel, node)).unwrap_or(&EMPTY)
    }

    pub(crate) fn has_link(&self, rel: usize, source: usize, target: usize) -> bool {
        self.partners_idx(rel, source, Direction::Outgoing).contains(&target)
    }
}

/// Canonical name of a term of `ontology`, by name or synonym.
pub(crate) fn resolve_local<'o>(ontology: &'o Ontology, name: &str) -> Result<&'o str, ResolveError> {
    let found: Vec<&str> = ontology.terms.iter().filter(|t| t.answers_to(name)).map(|t| t.name.as_str()).collect();
    match found.as_slice() {
        [one] => Ok(one),
        [] => Err(ResolveError::NotFound {
            ontology: ontology.name.clone(),
            name: name.to_string(),
            candidates: Vec::new(),
        }),
        many => Err(ResolveError::Ambiguous {
            ontology: ontology.name.clone(),
            name: name.to_string(),
            candidates: many.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

/// Index of the single relationship of `ontology` named `name`.
pub(crate) fn resolve_relationship(ontology: &Ontology, name: &str) -> Result<usize, ResolveError> {
    let found: Vec<(usize, _)> = ontology.relationships_named(name).collect();
    match found.as_slice() {
        [(i, _)] => Ok(*i),
        [] => Err(ResolveError::RelationshipNotFound {
            ontology: ontology.name.clone(),
            name: name.to_string(),
        }),
        many => Err(ResolveError::AmbiguousRelationship {
            ontology: ontology.name.clone(),
            name: name.to_string(),
            candidates: many.iter().map(|(_, r)| r.to_string()).collect(),
        }),
    }
}
