use std::collections::{BTreeMap, BTreeSet};

use super::workspace::ancestors;
use super::{DeclKind, Ontology, Origin, TermPath, Workspace};
use crate::axiom::AxiomHead;
use crate::report::{sort_canonical, Diagnostic};

pub const TAXONOMY_CYCLE: &str = "TAXONOMY_CYCLE";
pub const UNRESOLVED_IMPORT: &str = "UNRESOLVED_IMPORT";
pub const IMPORT_LAYER_MISMATCH: &str = "IMPORT_LAYER_MISMATCH";
pub const UNRESOLVED_TERM: &str = "UNRESOLVED_TERM";
pub const UNRESOLVED_RELATIONSHIP: &str = "UNRESOLVED_RELATIONSHIP";
pub const GENSET_NOT_SUBTYPE: &str = "GENSET_NOT_SUBTYPE";
pub const GENSET_DUPLICATE_CHILD: &str = "GENSET_DUPLICATE_CHILD";
pub const LAYER_VIOLATION: &str = "LAYER_VIOLATION";
pub const MULTIPLE_FOUNDATIONAL: &str = "MULTIPLE_FOUNDATIONAL";
pub const REUSED_WITHOUT_SOURCE: &str = "REUSED_WITHOUT_SOURCE";
pub const DUPLICATE_TERM: &str = "DUPLICATE_TERM";
pub const DUPLICATE_RELATIONSHIP: &str = "DUPLICATE_RELATIONSHIP";
pub const UNBOUND_VARIABLE: &str = "UNBOUND_VARIABLE";

/// Structural and layering checks for one ontology of a workspace.
///
/// The result is sorted by code, then subject, and is empty iff the
/// ontology is well formed.
pub fn check_ontology_wellformedness(ontology: &Ontology, workspace: &Workspace) -> Vec<Diagnostic> {
    let mut out = Checker {
        onto: ontology,
        ws: workspace,
        out: Vec::new(),
    };
    out.names();
    out.imports();
    out.stereotypes();
    out.taxonomy();
    out.gensets();
    out.relationships();
    out.axioms();
    let mut diags = out.out;
    sort_canonical(&mut diags);
    diags.dedup();
    diags
}

struct Checker<'a> {
    onto: &'a Ontology,
    ws: &'a Workspace,
    out: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn subject(&self, term: &str) -> String {
        format!("{}.\"{}\"", self.onto.name, term)
    }

    fn push(&mut self, code: &str, subject: String, message: String, at: Option<(DeclKind, usize)>) {
        let span = at.and_then(|(k, i)| self.onto.spans.get(k, i).cloned());
        self.out
            .push(Diagnostic::error(code, vec![subject], message).with_span(span));
    }

    fn names(&mut self) {
        let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, t) in self.onto.terms.iter().enumerate() {
            for n in std::iter::once(&t.name).chain(&t.synonyms) {
                if let Some(prev) = owner.insert(n, &t.name) {
                    let msg = format!("name `{n}` is used by both `{prev}` and `{}`", t.name);
                    self.push(DUPLICATE_TERM, self.subject(n), msg, Some((DeclKind::Term, i)));
                }
            }
        }
        let mut sigs = BTreeSet::new();
        for (i, r) in self.onto.relationships.iter().enumerate() {
            if !sigs.insert(r.signature()) {
                let msg = format!("relationship {r} is declared more than once");
                self.push(DUPLICATE_RELATIONSHIP, format!("{}.{}", self.onto.name, r.name), msg, Some((DeclKind::Relationship, i)));
            }
        }
    }

    fn imports(&mut self) {
        let me = self.onto;
        if me.layer.rank() == 0 {
            for (i, imp) in me.imports.iter().enumerate() {
                let msg = format!("foundational ontology {} cannot import {}", me.name, imp.ontology);
                self.push(LAYER_VIOLATION, me.name.clone(), msg, Some((DeclKind::Import, i)));
            }
            let others: Vec<&str> = self
                .ws
                .iter()
                .filter(|o| o.name != me.name && o.layer.rank() == 0)
                .map(|o| o.name.as_str())
                .collect();
            if !others.is_empty() {
                let msg = format!(
                    "{} is foundational but the workspace already has foundational ontologies: {}",
                    me.name,
                    others.join(", ")
                );
                self.push(MULTIPLE_FOUNDATIONAL, me.name.clone(), msg, Some((DeclKind::Header, 0)));
            }
        }
        for (i, imp) in me.imports.iter().enumerate() {
            let at = Some((DeclKind::Import, i));
            match self.ws.get(&imp.ontology) {
                None => {
                    let msg = format!("{} imports {}, which is not loaded", me.name, imp.ontology);
                    self.push(UNRESOLVED_IMPORT, imp.ontology.clone(), msg, at);
                }
                Some(target) if target.layer != imp.layer => {
                    let msg = format!(
                        "{} is declared as {} but is a {} ontology",
                        imp.ontology, imp.layer, target.layer
                    );
                    self.push(IMPORT_LAYER_MISMATCH, imp.ontology.clone(), msg, at);
                }
                Some(_) => {}
            }
            if imp.layer.rank() > me.layer.rank() {
                let msg = format!(
                    "{} ({}) cannot import the lower-level ontology {} ({})",
                    me.name, me.layer, imp.ontology, imp.layer
                );
                self.push(LAYER_VIOLATION, imp.ontology.clone(), msg, at);
            }
        }
    }

    /// Layer rank of an ontology referenced from this one, preferring the
    /// loaded ontology over the import declaration.
    fn layer_rank_of(&self, name: &str) -> Option<u8> {
        if name == self.onto.name {
            return Some(self.onto.layer.rank());
        }
        self.ws
            .get(name)
            .map(|o| o.layer.rank())
            .or_else(|| self.onto.import(name).map(|i| i.layer.rank()))
    }

    fn check_path(&mut self, path: &TermPath, subject: String, what: &str, at: Option<(DeclKind, usize)>) -> bool {
        let target = path.ontology_or(&self.onto.name);
        if target != self.onto.name && !self.onto.is_imported(target) {
            let msg = format!("{what} {path} refers to {target}, which is not imported");
            self.push(UNRESOLVED_TERM, subject, msg, at);
            return false;
        }
        if self.ws.get(target).is_none() && target != self.onto.name {
            // reported once as UNRESOLVED_IMPORT
            return false;
        }
        let resolved = if target == self.onto.name {
            self.onto.canonical_name(&path.name).is_some()
        } else {
            self.ws.resolve_path(&self.onto.name, path).is_ok()
        };
        if !resolved {
            let msg = format!("{what} {path} does not resolve");
            self.push(UNRESOLVED_TERM, subject, msg, at);
        }
        resolved
    }

    fn stereotypes(&mut self) {
        let me = self.onto;
        for (i, t) in me.terms.iter().enumerate() {
            let at = Some((DeclKind::Term, i));
            let Some(path) = &t.stereotype else {
                if t.origin == Origin::Reused {
                    let msg = format!("reused term `{}` does not name its source term", t.name);
                    self.push(REUSED_WITHOUT_SOURCE, self.subject(&t.name), msg, at);
                }
                continue;
            };
            self.check_path(path, self.subject(&t.name), "stereotype", at);
            let target = path.ontology_or(&me.name);
            let Some(rank) = self.layer_rank_of(target) else {
                continue;
            };
            let own_rank = me.layer.rank();
            let ok = match t.origin {
                Origin::Own => rank < own_rank,
                Origin::Reused => rank <= own_rank,
            };
            if !ok {
                let rule = match t.origin {
                    Origin::Own => "a strictly higher",
                    Origin::Reused => "the same or a higher",
                };
                let msg = format!(
                    "`{}` is enriched by {path}, but {} term sources must come from {rule} layer than {}",
                    t.name,
                    t.origin.as_str(),
                    me.layer
                );
                self.push(LAYER_VIOLATION, self.subject(&t.name), msg, at);
            }
        }
    }

    fn local_term(&mut self, name: &str, what: &str, at: Option<(DeclKind, usize)>) -> bool {
        if self.onto.canonical_name(name).is_some() {
            return true;
        }
        let msg = format!("{what} \"{name}\" is not a term of {}", self.onto.name);
        self.push(UNRESOLVED_TERM, self.subject(name), msg, at);
        false
    }

    fn taxonomy(&mut self) {
        let me = self.onto;
        for (i, link) in me.taxonomy.iter().enumerate() {
            let at = Some((DeclKind::Isa, i));
            self.local_term(&link.child, "is-a child", at);
            self.local_term(&link.parent, "is-a parent", at);
        }

        // A term lies on a cycle iff it is reachable from one of its parents.
        let mut on_cycle: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for t in &me.terms {
            let reach_back = me
                .parents(&t.name)
                .any(|p| ancestors(me, p).contains(t.name.as_str()));
            if reach_back {
                on_cycle.insert(&t.name, ancestors(me, &t.name));
            }
        }
        let mut reported = BTreeSet::new();
        for (&t, reach) in &on_cycle {
            if reported.contains(t) {
                continue;
            }
            let members: BTreeSet<&str> = on_cycle
                .iter()
                .filter(|(&u, ureach)| reach.contains(u) && ureach.contains(t))
                .map(|(&u, _)| u)
                .collect();
            let listed: Vec<&str> = members.iter().copied().collect();
            let msg = format!("is-a cycle through {}", listed.join(" -> "));
            let span_at = me
                .taxonomy
                .iter()
                .position(|l| me.canonical_name(&l.child) == Some(t))
                .map(|i| (DeclKind::Isa, i));
            self.push(TAXONOMY_CYCLE, self.subject(t), msg, span_at);
            reported.extend(members);
        }
    }

    fn gensets(&mut self) {
        let me = self.onto;
        for (i, g) in me.generalization_sets.iter().enumerate() {
            let at = Some((DeclKind::Genset, i));
            if !self.local_term(&g.parent, "generalization-set parent", at) {
                continue;
            }
            let parent = me.canonical_name(&g.parent).unwrap_or(&g.parent);
            let mut seen = BTreeSet::new();
            for child in &g.children {
                if !self.local_term(child, "generalization-set child", at) {
                    continue;
                }
                let child = me.canonical_name(child).unwrap_or(child);
                if !seen.insert(child) {
                    let msg = format!("`{child}` is listed twice in the generalization set of `{parent}`");
                    self.push(GENSET_DUPLICATE_CHILD, self.subject(child), msg, at);
                    continue;
                }
                if !me.parents(child).any(|p| p == parent) {
                    let msg = format!("`{child}` is in the generalization set of `{parent}` but is not declared a subtype of it");
                    self.push(GENSET_NOT_SUBTYPE, self.subject(child), msg, at);
                }
            }
        }
    }

    fn relationships(&mut self) {
        for (i, r) in self.onto.relationships.iter().enumerate() {
            let at = Some((DeclKind::Relationship, i));
            let subject = format!("{}.{}", self.onto.name, r.name);
            self.check_path(&r.source.term, subject.clone(), "relationship source", at);
            self.check_path(&r.target.term, subject, "relationship target", at);
        }
    }

    fn axioms(&mut self) {
        let me = self.onto;
        for (i, ax) in me.axioms.iter().enumerate() {
            let at = Some((DeclKind::Axiom, i));
            let subject = format!("{}.{}", me.name, ax.id);
            let mut bound: BTreeSet<&str> = BTreeSet::new();
            for v in &ax.universals {
                self.check_path(&v.guard, subject.clone(), "axiom guard", at);
                bound.insert(&v.name);
            }
            let mut atoms: Vec<(&crate::axiom::RelationAtom, bool)> =
                ax.body.iter().map(|a| (a, false)).collect();
            match &ax.head {
                AxiomHead::Holds(a) | AxiomHead::Not(a) => atoms.push((a, false)),
                AxiomHead::Exists { var, atoms: inner } => {
                    self.check_path(&var.guard, subject.clone(), "axiom guard", at);
                    atoms.extend(inner.iter().map(|a| (a, true)));
                }
            }
            let exists_var = match &ax.head {
                AxiomHead::Exists { var, .. } => Some(var.name.as_str()),
                _ => None,
            };
            for (atom, in_exists) in atoms {
                let n = me.relationships_named(&atom.relationship).count();
                if n != 1 {
                    let why = if n == 0 { "is not declared" } else { "is ambiguous" };
                    let msg = format!("axiom {} uses relationship \"{}\", which {why}", ax.id, atom.relationship);
                    self.push(UNRESOLVED_RELATIONSHIP, subject.clone(), msg, at);
                }
                for v in [&atom.left, &atom.right] {
                    let ok = bound.contains(v.as_str()) || (in_exists && exists_var == Some(v.as_str()));
                    if !ok {
                        let msg = format!("axiom {} uses unbound variable `{v}`", ax.id);
                        self.push(UNBOUND_VARIABLE, subject.clone(), msg, at);
                    }
                }
            }
        }
    }
}
