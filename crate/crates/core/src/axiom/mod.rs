//! Guarded first-order axioms over finite instance models.
//!
//! The fragment is
//!
//! ```text
//! forall x1:G1, ..., xn:Gn : body1 & ... & bodyk -> head
//! ```
//!
//! where guards are terms (taxonomy-aware class membership), body atoms are
//! binary relationship atoms `"rel"(x, y)`, and the head is a single atom, a
//! negated atom, or `exists w:G : atom & ...`. Evaluation is closed-world: a
//! missing link is false.
//!
//! [`evaluate_axiom`] is the indexed evaluator used by validation.
//! [`evaluate_axiom_naive`] enumerates every assignment and scans the raw
//! link list; it exists to cross-check the former.

mod eval;
mod naive;

use std::collections::BTreeMap;
use std::fmt;

use serde::{ser::SerializeMap, Serialize, Serializer};
use thiserror::Error;

use crate::instance::GraphError;
use crate::model::{ResolveError, TermPath};

pub use eval::evaluate_axiom;
pub use naive::evaluate_axiom_naive;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub guard: TermPath,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, guard: TermPath) -> Self {
        VarDecl {
            name: name.into(),
            guard,
        }
    }
}

/// `"relationship"(left, right)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationAtom {
    pub relationship: String,
    pub left: String,
    pub right: String,
}

impl RelationAtom {
    pub fn new(relationship: impl Into<String>, left: impl Into<String>, right: impl Into<String>) -> Self {
        RelationAtom {
            relationship: relationship.into(),
            left: left.into(),
            right: right.into(),
        }
    }
}

impl fmt::Display for RelationAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"({}, {})", self.relationship, self.left, self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomHead {
    Holds(RelationAtom),
    Not(RelationAtom),
    Exists { var: VarDecl, atoms: Vec<RelationAtom> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomRule {
    pub id: String,
    pub universals: Vec<VarDecl>,
    pub body: Vec<RelationAtom>,
    pub head: AxiomHead,
}

impl AxiomRule {
    /// Diagnostic code used when this axiom is violated.
    pub fn violation_code(&self) -> String {
        format!("AXIOM_{}", self.id)
    }
}

/// Assignment of the universal variables of a rule, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness {
    bindings: Vec<(String, String)>,
}

impl Witness {
    pub fn new<I, V, N>(bindings: I) -> Self
    where
        I: IntoIterator<Item = (V, N)>,
        V: Into<String>,
        N: Into<String>,
    {
        Witness {
            bindings: bindings
                .into_iter()
                .map(|(v, n)| (v.into(), n.into()))
                .collect(),
        }
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.bindings
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, n)| n.as_str())
    }

    pub fn bindings(&self) -> &[(String, String)] {
        &self.bindings
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(_, n)| n.as_str())
    }

    pub fn to_map(&self) -> BTreeMap<&str, &str> {
        self.bindings
            .iter()
            .map(|(v, n)| (v.as_str(), n.as_str()))
            .collect()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, n)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}: {n}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.bindings.len()))?;
        for (v, n) in &self.bindings {
            map.serialize_entry(v, n)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("axiom {axiom}: {source}")]
    Resolve {
        axiom: String,
        #[source]
        source: ResolveError,
    },
    #[error("axiom {axiom}: variable `{var}` is not bound")]
    UnboundVariable { axiom: String, var: String },
    #[error("axiom {axiom}: variable `{var}` is declared twice")]
    DuplicateVariable { axiom: String, var: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Variable positions for a rule: universals first, then the existential.
pub(crate) struct VarTable<'r> {
    pub names: Vec<&'r str>,
}

impl<'r> VarTable<'r> {
    pub fn new(rule: &'r AxiomRule) -> Result<Self, AxiomError> {
        let mut names: Vec<&str> = Vec::new();
        let mut declare = |name: &'r str| {
            if names.contains(&name) {
                return Err(AxiomError::DuplicateVariable {
                    axiom: rule.id.clone(),
                    var: name.to_string(),
                });
            }
            names.push(name);
            Ok(())
        };
        for v in &rule.universals {
            declare(&v.name)?;
        }
        if let AxiomHead::Exists { var, .. } = &rule.head {
            declare(&var.name)?;
        }
        Ok(VarTable { names })
    }

    /// Position of `name`, restricted to the first `limit` variables.
    pub fn position(&self, rule: &AxiomRule, name: &str, limit: usize) -> Result<usize, AxiomError> {
        self.names[..limit]
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| AxiomError::UnboundVariable {
                axiom: rule.id.clone(),
                var: name.to_string(),
            })
    }
}
