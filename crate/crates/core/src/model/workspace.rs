use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{Ontology, TermPath};

/// Resolved reference to a term: owning ontology plus canonical term name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TermRef {
    pub ontology: String,
    pub name: String,
}

impl TermRef {
    pub fn new(ontology: impl Into<String>, name: impl Into<String>) -> Self {
        TermRef {
            ontology: ontology.into(),
            name: name.into(),
        }
    }
}

impl fmt::Display for TermRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.\"{}\"", self.ontology, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown ontology `{0}`")]
    UnknownOntology(String),
    #[error("no term `{name}` in {ontology}{}", candidates_suffix(.candidates))]
    NotFound {
        ontology: String,
        name: String,
        candidates: Vec<String>,
    },
    #[error("`{name}` is ambiguous in {ontology}{}", candidates_suffix(.candidates))]
    Ambiguous {
        ontology: String,
        name: String,
        candidates: Vec<String>,
    },
    #[error("{ancestor} and {descendant} belong to different ontologies")]
    CrossOntology {
        ancestor: TermRef,
        descendant: TermRef,
    },
    #[error("{term} inherits conflicting stereotypes: {}", join_refs(.candidates))]
    AmbiguousStereotype {
        term: TermRef,
        candidates: Vec<TermRef>,
    },
    #[error("no relationship `{name}` in {ontology}")]
    RelationshipNotFound { ontology: String, name: String },
    #[error("relationship `{name}` is ambiguous in {ontology}{}", candidates_suffix(.candidates))]
    AmbiguousRelationship {
        ontology: String,
        name: String,
        candidates: Vec<String>,
    },
}

fn candidates_suffix(candidates: &[String]) -> String {
    if candidates.is_empty() {
        String::new()
    } else {
        format!(" (candidates: {})", candidates.join(", "))
    }
}

fn join_refs(refs: &[TermRef]) -> String {
    refs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// A set of ontologies resolved against each other by name.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    ontologies: BTreeMap<String, Ontology>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ontology `{0}` is defined more than once")]
pub struct DuplicateOntology(pub String);

impl Workspace {
    pub fn new(ontologies: impl IntoIterator<Item = Ontology>) -> Result<Self, DuplicateOntology> {
        let mut ws = Workspace::default();
        for o in ontologies {
            ws.insert(o)?;
        }
        Ok(ws)
    }

    pub fn insert(&mut self, ontology: Ontology) -> Result<(), DuplicateOntology> {
        if self.ontologies.contains_key(&ontology.name) {
            return Err(DuplicateOntology(ontology.name));
        }
        self.ontologies.insert(ontology.name.clone(), ontology);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Ontology> {
        self.ontologies.get(name)
    }

    pub fn ontology(&self, name: &str) -> Result<&Ontology, ResolveError> {
        self.get(name)
            .ok_or_else(|| ResolveError::UnknownOntology(name.to_string()))
    }

    /// Ontologies in name order.
    pub fn iter(&self) -> impl Iterator<Item = &Ontology> {
        self.ontologies.values()
    }

    pub fn len(&self) -> usize {
        self.ontologies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ontologies.is_empty()
    }

    /// Finds the unique term in `ontology` whose name or synonym is `name`.
    pub fn resolve_term(&self, ontology: &str, name: &str) -> Result<TermRef, ResolveError> {
        let onto = self.ontology(ontology)?;
        let matches: Vec<&str> = onto.lookup_terms(name).map(|t| t.name.as_str()).collect();
        match matches.as_slice() {
            [one] => Ok(TermRef::new(ontology, *one)),
            [] => Err(ResolveError::NotFound {
                ontology: ontology.to_string(),
                name: name.to_string(),
                candidates: near_misses(onto, name),
            }),
            many => Err(ResolveError::Ambiguous {
                ontology: ontology.to_string(),
                name: name.to_string(),
                candidates: many.iter().map(|s| s.to_string()).collect(),
            }),
        }
    }

    /// Resolves a path written inside `context`.
    pub fn resolve_path(&self, context: &str, path: &TermPath) -> Result<TermRef, ResolveError> {
        self.resolve_term(path.ontology_or(context), &path.name)
    }

    /// Reflexive-transitive is-a reachability from `descendant` up to `ancestor`.
    pub fn subsumes(&self, ancestor: &TermRef, descendant: &TermRef) -> Result<bool, ResolveError> {
        let ancestor = self.resolve_term(&ancestor.ontology, &ancestor.name)?;
        let descendant = self.resolve_term(&descendant.ontology, &descendant.name)?;
        if ancestor.ontology != descendant.ontology {
            return Err(ResolveError::CrossOntology {
                ancestor,
                descendant,
            });
        }
        let onto = self.ontology(&ancestor.ontology)?;
        Ok(ancestors(onto, &descendant.name).contains(ancestor.name.as_str()))
    }

    /// The term's own stereotype, else the stereotype of the nearest
    /// ancestor that carries one.
    pub fn effective_stereotype(&self, term: &TermRef) -> Result<Option<TermRef>, ResolveError> {
        let term = self.resolve_term(&term.ontology, &term.name)?;
        let onto = self.ontology(&term.ontology)?;

        let mut seen = BTreeSet::from([term.name.clone()]);
        let mut frontier = vec![term.name.clone()];
        while !frontier.is_empty() {
            let mut found = BTreeSet::new();
            for name in &frontier {
                if let Some(path) = onto.term(name).and_then(|t| t.stereotype.as_ref()) {
                    found.insert(self.resolve_path(&onto.name, path)?);
                }
            }
            match found.len() {
                0 => {}
                1 => return Ok(found.pop_first()),
                _ => {
                    return Err(ResolveError::AmbiguousStereotype {
                        term,
                        candidates: found.into_iter().collect(),
                    })
                }
            }
            let mut next = Vec::new();
            for name in &frontier {
                for parent in onto.parents(name) {
                    if seen.insert(parent.to_string()) {
                        next.push(parent.to_string());
                    }
                }
            }
            frontier = next;
        }
        Ok(None)
    }

    /// Follows effective stereotypes from `term` until reaching a term of
    /// `target_ontology`. A term already in that ontology maps to itself.
    pub fn stereotype_in(
        &self,
        term: &TermRef,
        target_ontology: &str,
    ) -> Result<Option<TermRef>, ResolveError> {
        let mut current = self.resolve_term(&term.ontology, &term.name)?;
        let mut seen = BTreeSet::new();
        loop {
            if current.ontology == target_ontology {
                return Ok(Some(current));
            }
            if !seen.insert(current.clone()) {
                return Ok(None);
            }
            match self.effective_stereotype(&current)? {
                Some(next) => current = next,
                None => return Ok(None),
            }
        }
    }
}

/// All terms reachable from `start` through is-a links, including `start`.
pub(crate) fn ancestors<'a>(onto: &'a Ontology, start: &'a str) -> BTreeSet<&'a str> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for p in onto.parents(t) {
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    seen
}

fn near_misses(onto: &Ontology, name: &str) -> Vec<String> {
    let needle = name.to_lowercase();
    let mut out: Vec<String> = onto
        .terms
        .iter()
        .flat_map(|t| std::iter::once(&t.name).chain(&t.synonyms).map(move |n| (t, n)))
        .filter(|(_, n)| {
            let n = n.to_lowercase();
            !needle.is_empty() && (n.contains(&needle) || needle.contains(&n))
        })
        .map(|(t, _)| t.name.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}
