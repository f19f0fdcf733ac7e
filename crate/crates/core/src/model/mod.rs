//! In-memory ontology model.
//!
//! An [`Ontology`] is plain data: terms, is-a links, generalization sets,
//! non-taxonomic relationships and axioms, tagged with its [`Layer`].
//! Cross-ontology questions (term resolution, subsumption, stereotype
//! inheritance) are answered by a [`Workspace`], which holds every ontology
//! loaded together.

mod multiplicity;
pub mod wellformed;
mod workspace;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::axiom::AxiomRule;
use crate::span::SourceSpan;

pub use multiplicity::{parse_multiplicity, Multiplicity, MultiplicityError};
pub use wellformed::check_ontology_wellformedness;
pub use workspace::{DuplicateOntology, ResolveError, TermRef, Workspace};
pub(crate) use workspace::ancestors as workspace_ancestors;

/// Level of an ontology in the five-tier architecture. Lower rank is a
/// higher (more general) level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Foundational,
    Core,
    TopDomain,
    LowDomain,
    Instance,
}

impl Layer {
    pub const ALL: [Layer; 5] = [
        Layer::Foundational,
        Layer::Core,
        Layer::TopDomain,
        Layer::LowDomain,
        Layer::Instance,
    ];

    pub fn rank(self) -> u8 {
        match self {
            Layer::Foundational => 0,
            Layer::Core => 1,
            Layer::TopDomain => 2,
            Layer::LowDomain => 3,
            Layer::Instance => 4,
        }
    }

    pub fn from_rank(rank: u8) -> Option<Layer> {
        Layer::ALL.get(rank as usize).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Foundational => "foundational",
            Layer::Core => "core",
            Layer::TopDomain => "top_domain",
            Layer::LowDomain => "low_domain",
            Layer::Instance => "instance",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Layer::ALL.into_iter().find(|l| l.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Own,
    Reused,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Own => "own",
            Origin::Reused => "reused",
        }
    }
}

/// A term reference as written in source: optionally qualified by the name
/// of the ontology it lives in. Unqualified paths are local to the ontology
/// that contains them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermPath {
    pub ontology: Option<String>,
    pub name: String,
}

impl TermPath {
    pub fn local(name: impl Into<String>) -> Self {
        TermPath {
            ontology: None,
            name: name.into(),
        }
    }

    pub fn qualified(ontology: impl Into<String>, name: impl Into<String>) -> Self {
        TermPath {
            ontology: Some(ontology.into()),
            name: name.into(),
        }
    }

    /// Ontology this path points into, given the ontology it appears in.
    pub fn ontology_or<'a>(&'a self, context: &'a str) -> &'a str {
        self.ontology.as_deref().unwrap_or(context)
    }
}

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ontology {
            Some(o) => write!(f, "{}.\"{}\"", o, self.name),
            None => write!(f, "\"{}\"", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub name: String,
    pub synonyms: Vec<String>,
    pub origin: Origin,
    pub stereotype: Option<TermPath>,
}

impl Term {
    pub fn new(name: impl Into<String>, origin: Origin) -> Self {
        Term {
            name: name.into(),
            synonyms: Vec::new(),
            origin,
            stereotype: None,
        }
    }

    pub fn with_stereotype(mut self, stereotype: TermPath) -> Self {
        self.stereotype = Some(stereotype);
        self
    }

    pub fn with_synonyms<I, S>(mut self, synonyms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.synonyms = synonyms.into_iter().map(Into::into).collect();
        self
    }

    pub fn answers_to(&self, name: &str) -> bool {
        self.name == name || self.synonyms.iter().any(|s| s == name)
    }
}

/// `child` is-a `parent`, both local to the ontology.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaxonomicLink {
    pub child: String,
    pub parent: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Completeness {
    Complete,
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Disjointness {
    Disjoint,
    Overlapping,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizationSet {
    pub parent: String,
    pub children: Vec<String>,
    pub completeness: Completeness,
    pub disjointness: Disjointness,
}

/// One end of a relationship. The multiplicity bounds how many instances of
/// this end's term partner a single instance of the opposite end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub term: TermPath,
    pub multiplicity: Multiplicity,
    /// Free-form annotation such as `(Power of)`; ignored for subsumption.
    pub qualifier: Option<String>,
}

impl Endpoint {
    pub fn new(term: TermPath, multiplicity: Multiplicity) -> Self {
        Endpoint {
            term,
            multiplicity,
            qualifier: None,
        }
    }
}

/// Directed non-taxonomic relationship. Identified within its ontology by
/// `(name, source term, target term)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationshipDef {
    pub name: String,
    pub source: Endpoint,
    pub target: Endpoint,
    pub definition: Option<String>,
}

impl RelationshipDef {
    pub fn new(name: impl Into<String>, source: Endpoint, target: Endpoint) -> Self {
        RelationshipDef {
            name: name.into(),
            source,
            target,
            definition: None,
        }
    }

    /// Bounds on the number of source partners per target instance.
    pub fn source_mult(&self) -> Multiplicity {
        self.source.multiplicity
    }

    /// Bounds on the number of target partners per source instance.
    pub fn target_mult(&self) -> Multiplicity {
        self.target.multiplicity
    }

    pub fn signature(&self) -> (&str, &TermPath, &TermPath) {
        (&self.name, &self.source.term, &self.target.term)
    }
}

impl fmt::Display for RelationshipDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} \"{}\" {}",
            self.source.term, self.name, self.target.term
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub ontology: String,
    pub layer: Layer,
}

/// Kinds of declarations whose source location is remembered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeclKind {
    Header,
    Import,
    Term,
    Isa,
    Genset,
    Relationship,
    Axiom,
    Node,
    Link,
    Row,
}

/// Source locations of declarations, keyed by kind and index into the
/// corresponding list. Never participates in equality, so a reparsed
/// ontology compares equal to the original regardless of layout.
#[derive(Debug, Clone, Default)]
pub struct DeclSpans(BTreeMap<(DeclKind, usize), SourceSpan>);

impl DeclSpans {
    pub fn insert(&mut self, kind: DeclKind, index: usize, span: SourceSpan) {
        self.0.insert((kind, index), span);
    }

    pub fn get(&self, kind: DeclKind, index: usize) -> Option<&SourceSpan> {
        self.0.get(&(kind, index))
    }

    pub fn set_file(&mut self, file: &str) {
        for span in self.0.values_mut() {
            span.file = Some(file.to_string());
        }
    }
}

impl PartialEq for DeclSpans {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for DeclSpans {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    pub name: String,
    pub version: String,
    pub layer: Layer,
    pub imports: Vec<Import>,
    pub terms: Vec<Term>,
    pub taxonomy: Vec<TaxonomicLink>,
    pub generalization_sets: Vec<GeneralizationSet>,
    pub relationships: Vec<RelationshipDef>,
    pub axioms: Vec<AxiomRule>,
    pub spans: DeclSpans,
}

impl Ontology {
    pub fn new(name: impl Into<String>, version: impl Into<String>, layer: Layer) -> Self {
        Ontology {
            name: name.into(),
            version: version.into(),
            layer,
            imports: Vec::new(),
            terms: Vec::new(),
            taxonomy: Vec::new(),
            generalization_sets: Vec::new(),
            relationships: Vec::new(),
            axioms: Vec::new(),
            spans: DeclSpans::default(),
        }
    }

    /// Terms answering to `name`, by canonical name or synonym.
    pub fn lookup_terms<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Term> + 'a {
        self.terms.iter().filter(move |t| t.answers_to(name))
    }

    /// The term whose canonical name is `name`.
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    /// Canonical name of the single term answering to `name`, if exactly one does.
    pub fn canonical_name(&self, name: &str) -> Option<&str> {
        let mut found = self.terms.iter().filter(|t| t.answers_to(name));
        let first = found.next()?;
        if found.next().is_some() {
            return None;
        }
        Some(&first.name)
    }

    /// Direct parents of a term, using canonical names.
    pub fn parents<'a>(&'a self, child: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.taxonomy.iter().filter_map(move |l| {
            let c = self.canonical_name(&l.child).unwrap_or(&l.child);
            (c == child).then(|| self.canonical_name(&l.parent).unwrap_or(&l.parent))
        })
    }

    pub fn is_imported(&self, ontology: &str) -> bool {
        self.imports.iter().any(|i| i.ontology == ontology)
    }

    pub fn import(&self, ontology: &str) -> Option<&Import> {
        self.imports.iter().find(|i| i.ontology == ontology)
    }

    /// Indices of the relationships carrying `name`.
    pub fn relationships_named<'a>(
        &'a self,
        name: &'a str,
    ) -> impl Iterator<Item = (usize, &'a RelationshipDef)> + 'a {
        self.relationships
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.name == name)
    }

    pub fn own_term_count(&self) -> usize {
        self.terms.iter().filter(|t| t.origin == Origin::Own).count()
    }

    pub fn reused_term_count(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| t.origin == Origin::Reused)
            .count()
    }
}
