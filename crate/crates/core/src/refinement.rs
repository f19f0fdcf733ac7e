//! Relationship refinement between ontology layers.
//!
//! A [`RefinementMap`] pairs each non-taxonomic relationship of a lower
//! ontology with the upper-level relationship it specializes.
//! [`verify_refinement`] checks every pair: each lower endpoint term must,
//! through its stereotype chain, land on a term subsumed by the matching
//! upper endpoint, and the lower cardinalities must fit the upper ones.
//!
//! Two cardinality readings are available. [`Mode::Default`] only requires
//! the lower maximum to stay within the upper maximum. [`Mode::Strict`]
//! requires full interval containment.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{DeclSpans, Multiplicity, Ontology, RelationshipDef, ResolveError, TermRef, Workspace};
use crate::report::Status;

/// A relationship picked by name, optionally narrowed by its endpoint terms
/// when several relationships share the name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelSelector {
    pub name: String,
    pub endpoints: Option<(String, String)>,
}

impl RelSelector {
    pub fn named(name: impl Into<String>) -> Self {
        RelSelector {
            name: name.into(),
            endpoints: None,
        }
    }

    pub fn between(name: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        RelSelector {
            name: name.into(),
            endpoints: Some((source.into(), target.into())),
        }
    }

    fn matches(&self, onto: &Ontology, r: &RelationshipDef) -> bool {
        if r.name != self.name {
            return false;
        }
        let Some((s, t)) = &self.endpoints else {
            return true;
        };
        let canon = |n: &str| onto.canonical_name(n).unwrap_or(n).to_string();
        let local = |p: &crate::model::TermPath| match &p.ontology {
            Some(o) if *o != onto.name => p.to_string(),
            _ => canon(&p.name),
        };
        local(&r.source.term) == canon(s) && local(&r.target.term) == canon(t)
    }

    /// Finds the single relationship of `onto` this selector denotes.
    pub fn resolve<'o>(&self, onto: &'o Ontology) -> Result<(usize, &'o RelationshipDef), RefineError> {
        let found: Vec<_> = onto
            .relationships
            .iter()
            .enumerate()
            .filter(|(_, r)| self.matches(onto, r))
            .collect();
        match found.as_slice() {
            [one] => Ok(*one),
            [] => Err(RefineError::UnknownRelationship {
                ontology: onto.name.clone(),
                selector: self.clone(),
            }),
            many => Err(RefineError::AmbiguousRelationship {
                ontology: onto.name.clone(),
                selector: self.clone(),
                candidates: many.iter().map(|(_, r)| r.to_string()).collect(),
            }),
        }
    }
}

impl fmt::Display for RelSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some((s, t)) = &self.endpoints {
            write!(f, " from {s} to {t}")?;
        }
        Ok(())
    }
}

impl Serialize for RelSelector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementRow {
    pub lower: RelSelector,
    pub upper: RelSelector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementMap {
    pub lower: String,
    pub upper: String,
    pub rows: Vec<RefinementRow>,
    pub spans: DeclSpans,
}

impl RefinementMap {
    pub fn new(lower: impl Into<String>, upper: impl Into<String>) -> Self {
        RefinementMap {
            lower: lower.into(),
            upper: upper.into(),
            rows: Vec::new(),
            spans: DeclSpans::default(),
        }
    }

    pub fn push(&mut self, lower: RelSelector, upper: RelSelector) -> &mut Self {
        self.rows.push(RefinementRow { lower, upper });
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Default,
    Strict,
}

/// Whether a lower cardinality may specialize an upper one.
///
/// ```
/// use ontoarch::model::Multiplicity;
/// use ontoarch::refinement::{multiplicity_refines, Mode};
///
/// assert!(multiplicity_refines(Multiplicity::MANY, Multiplicity::ONE_OR_MORE, Mode::Default));
/// assert!(!multiplicity_refines(Multiplicity::MANY, Multiplicity::ONE_OR_MORE, Mode::Strict));
/// ```
pub fn multiplicity_refines(lower: Multiplicity, upper: Multiplicity, mode: Mode) -> bool {
    let max_ok = lower.max_within(&upper);
    match mode {
        Mode::Default => max_ok,
        Mode::Strict => max_ok && lower.min >= upper.min,
    }
}

/// Outcome of comparing one lower endpoint term with an upper one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointVerdict {
    /// The lower term's stereotype in the upper ontology, `via`, is subsumed
    /// by the upper term.
    Refines { via: TermRef },
    NotSubsumed { via: TermRef },
    /// No stereotype chain from the lower term reaches the upper ontology.
    NoStereotype,
    /// The stereotype chain could not be followed.
    Unresolved(String),
}

impl EndpointVerdict {
    pub fn ok(&self) -> bool {
        matches!(self, EndpointVerdict::Refines { .. })
    }

    pub fn reason(&self) -> Option<&'static str> {
        match self {
            EndpointVerdict::Refines { .. } => None,
            EndpointVerdict::NotSubsumed { .. } => Some("NOT_SUBSUMED"),
            EndpointVerdict::NoStereotype => Some("NO_STEREOTYPE"),
            EndpointVerdict::Unresolved(_) => Some("UNRESOLVED_STEREOTYPE"),
        }
    }
}

/// Checks that `lower` refines `upper`: the term `lower` stands for in
/// `upper`'s ontology (itself, if it already lives there; otherwise the end
/// of its stereotype chain) is subsumed by `upper`.
pub fn endpoint_refines(workspace: &Workspace, lower: &TermRef, upper: &TermRef) -> EndpointVerdict {
    let via = match workspace.stereotype_in(lower, &upper.ontology) {
        Ok(Some(via)) => via,
        Ok(None) => return EndpointVerdict::NoStereotype,
        Err(e) => return EndpointVerdict::Unresolved(e.to_string()),
    };
    match workspace.subsumes(upper, &via) {
        Ok(true) => EndpointVerdict::Refines { via },
        Ok(false) => EndpointVerdict::NotSubsumed { via },
        Err(e) => EndpointVerdict::Unresolved(e.to_string()),
    }
}

/// One side of a matrix row: cardinalities and resolved endpoint terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixSide {
    pub relationship: String,
    pub source: String,
    pub source_card: Multiplicity,
    pub target: String,
    pub target_card: Multiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowResult {
    pub row: RefinementRow,
    pub lower: MatrixSide,
    pub upper: MatrixSide,
    pub endpoint_verdicts: (EndpointVerdict, EndpointVerdict),
    pub multiplicity_verdicts: (bool, bool),
    pub notes: Vec<String>,
}

impl RowResult {
    pub fn verdict(&self) -> Status {
        let (s, t) = &self.endpoint_verdicts;
        let (ms, mt) = self.multiplicity_verdicts;
        if s.ok() && t.ok() && ms && mt {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passes(&self) -> bool {
        self.verdict() == Status::Pass
    }
}

#[derive(Serialize)]
struct PairJson {
    source: bool,
    target: bool,
}

impl Serialize for RowResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RowResult", 6)?;
        s.serialize_field(
            "endpoint_verdicts",
            &PairJson {
                source: self.endpoint_verdicts.0.ok(),
                target: self.endpoint_verdicts.1.ok(),
            },
        )?;
        s.serialize_field("lower", &self.lower)?;
        s.serialize_field(
            "multiplicity_verdicts",
            &PairJson {
                source: self.multiplicity_verdicts.0,
                target: self.multiplicity_verdicts.1,
            },
        )?;
        s.serialize_field("notes", &self.notes)?;
        s.serialize_field("upper", &self.upper)?;
        s.serialize_field("verdict", &self.verdict())?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixReport {
    pub mode: Mode,
    pub rows: Vec<RowResult>,
    /// Lower relationships no row maps, in declaration order.
    pub unmapped_lower: Vec<RelSelector>,
}

impl MatrixReport {
    pub fn status(&self) -> Status {
        if self.unmapped_lower.is_empty() && self.rows.iter().all(RowResult::passes) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &RowResult> {
        self.rows.iter().filter(|r| !r.passes())
    }
}

impl Serialize for MatrixReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MatrixReport", 4)?;
        s.serialize_field("mode", &self.mode)?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("status", &self.status())?;
        s.serialize_field("unmapped_lower", &self.unmapped_lower)?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("no relationship `{selector}` in {ontology}")]
    UnknownRelationship { ontology: String, selector: RelSelector },
    #[error("`{selector}` matches several relationships in {ontology}: {}", candidates.join("; "))]
    AmbiguousRelationship {
        ontology: String,
        selector: RelSelector,
        candidates: Vec<String>,
    },
    #[error("relationship `{0}` is mapped more than once")]
    DuplicateMapping(String),
}

/// Checks every row of `map` and reports coverage of the lower ontology.
///
/// Rows are independent; the report lists them in map order.
pub fn verify_refinement(map: &RefinementMap, workspace: &Workspace, mode: Mode) -> Result<MatrixReport, RefineError> {
    let lower = workspace.ontology(&map.lower)?;
    let upper = workspace.ontology(&map.upper)?;

    let mut mapped = vec![false; lower.relationships.len()];
    let mut rows = Vec::with_capacity(map.rows.len());
    for row in &map.rows {
        let (li, lrel) = row.lower.resolve(lower)?;
        let (_, urel) = row.upper.resolve(upper)?;
        if std::mem::replace(&mut mapped[li], true) {
            return Err(RefineError::DuplicateMapping(lrel.to_string()));
        }
        rows.push(check_row(workspace, row, lower, lrel, upper, urel, mode)?);
    }

    let unmapped_lower = lower
        .relationships
        .iter()
        .zip(&mapped)
        .filter(|(_, m)| !**m)
        .map(|(r, _)| selector_for(lower, r))
        .collect();
    Ok(MatrixReport {
        mode,
        rows,
        unmapped_lower,
    })
}

/// Shortest selector that picks `r` out of `onto`.
fn selector_for(onto: &Ontology, r: &RelationshipDef) -> RelSelector {
    if onto.relationships_named(&r.name).count() == 1 {
        RelSelector::named(&r.name)
    } else {
        RelSelector::between(&r.name, &r.source.term.name, &r.target.term.name)
    }
}

fn check_row(
    ws: &Workspace,
    row: &RefinementRow,
    lower: &Ontology,
    lrel: &RelationshipDef,
    upper: &Ontology,
    urel: &RelationshipDef,
    mode: Mode,
) -> Result<RowResult, RefineError> {
    let lsrc = ws.resolve_path(&lower.name, &lrel.source.term)?;
    let ltgt = ws.resolve_path(&lower.name, &lrel.target.term)?;
    let usrc = ws.resolve_path(&upper.name, &urel.source.term)?;
    let utgt = ws.resolve_path(&upper.name, &urel.target.term)?;

    let mut notes = Vec::new();
    for (side, e) in [("source", &urel.source), ("target", &urel.target)] {
        if let Some(q) = &e.qualifier {
            notes.push(format!("upper {side} qualified {q}"));
        }
    }
    let endpoint_verdicts = (endpoint_refines(ws, &lsrc, &usrc), endpoint_refines(ws, &ltgt, &utgt));
    for (side, v, term) in [("source", &endpoint_verdicts.0, &lsrc), ("target", &endpoint_verdicts.1, &ltgt)] {
        match v {
            EndpointVerdict::Refines { .. } => {}
            EndpointVerdict::NotSubsumed { via } => {
                notes.push(format!("{side}: {term} stands for {via}, which is not under the upper term"))
            }
            EndpointVerdict::NoStereotype => notes.push(format!("{side}: {term} has no stereotype into {}", upper.name)),
            EndpointVerdict::Unresolved(e) => notes.push(format!("{side}: {e}")),
        }
    }
    let multiplicity_verdicts = (
        multiplicity_refines(lrel.source_mult(), urel.source_mult(), mode),
        multiplicity_refines(lrel.target_mult(), urel.target_mult(), mode),
    );
    for (side, ok, l, u) in [
        ("source", multiplicity_verdicts.0, lrel.source_mult(), urel.source_mult()),
        ("target", multiplicity_verdicts.1, lrel.target_mult(), urel.target_mult()),
    ] {
        if !ok {
            notes.push(format!("{side} card {l} does not fit {u}"));
        }
    }

    Ok(RowResult {
        row: row.clone(),
        lower: side(lrel, &lsrc, &ltgt),
        upper: side(urel, &usrc, &utgt),
        endpoint_verdicts,
        multiplicity_verdicts,
        notes,
    })
}

fn side(r: &RelationshipDef, source: &TermRef, target: &TermRef) -> MatrixSide {
    MatrixSide {
        relationship: r.name.clone(),
        source: source.name.clone(),
        source_card: r.source_mult(),
        target: target.name.clone(),
        target_card: r.target_mult(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Multiplicity as M;

    fn m(s: &str) -> M {
        s.parse().unwrap()
    }

    #[test]
    fn cardinality_modes() {
        assert!(multiplicity_refines(m("1"), m("*"), Mode::Default));
        assert!(multiplicity_refines(m("1"), m("*"), Mode::Strict));
        assert!(multiplicity_refines(m("*"), m("1..*"), Mode::Default));
        assert!(!multiplicity_refines(m("*"), m("1..*"), Mode::Strict));
        assert!(multiplicity_refines(m("1..*"), m("1..*"), Mode::Strict));
        assert!(!multiplicity_refines(m("*"), m("1"), Mode::Default));
        assert!(multiplicity_refines(m("2..3"), m("1..5"), Mode::Strict));
        assert!(!multiplicity_refines(m("2..6"), m("1..5"), Mode::Default));
    }

    #[test]
    fn endpoint_examples() {
        let ws = crate::corpus::load_workspace();
        let s = |n: &str| TermRef::new("SituationCO", n);
        let t = |n: &str| TermRef::new("ThingFO", n);
        assert!(endpoint_refines(&ws, &s("Human Agent"), &t("Thing")).ok());
        assert!(endpoint_refines(&ws, &s("Specific Goal"), &t("Assertion on Particulars")).ok());
        assert!(endpoint_refines(&ws, &s("Specific Goal"), &t("Assertion")).ok());
        assert_eq!(
            endpoint_refines(&ws, &s("Target Entity"), &t("Thing Category")),
            EndpointVerdict::NotSubsumed { via: t("Thing") }
        );
        // inherited through "Space Entity" is-a "Context Entity"
        assert!(endpoint_refines(&ws, &s("Space Entity"), &t("Thing")).ok());
        assert!(endpoint_refines(&ws, &t("Thing"), &t("Thing")).ok());
    }

    #[test]
    fn missing_stereotype_is_a_failing_endpoint() {
        let mut lower = Ontology::new("L", "1", crate::model::Layer::Core);
        lower.terms.push(crate::model::Term::new("Loose", crate::model::Origin::Own));
        let mut ws = crate::corpus::load_workspace();
        ws.insert(lower).unwrap();
        let v = endpoint_refines(&ws, &TermRef::new("L", "Loose"), &TermRef::new("ThingFO", "Thing"));
        assert_eq!(v, EndpointVerdict::NoStereotype);
        assert_eq!(v.reason(), Some("NO_STEREOTYPE"));
    }

    #[test]
    fn selectors_disambiguate_shared_names() {
        let ws = crate::corpus::load_workspace();
        let thing = ws.get("ThingFO").unwrap();
        assert!(matches!(
            RelSelector::named("relates with").resolve(thing),
            Err(RefineError::AmbiguousRelationship { .. })
        ));
        let (i, _) = RelSelector::between("relates with", "Thing", "Thing").resolve(thing).unwrap();
        assert_eq!(i, 0);
        assert!(matches!(
            RelSelector::named("nope").resolve(thing),
            Err(RefineError::UnknownRelationship { .. })
        ));
    }

    #[test]
    fn bundled_matrix_default_and_strict() {
        let ws = crate::corpus::load_workspace();
        let map = crate::corpus::refinement_map();
        let report = verify_refinement(&map, &ws, Mode::Default).unwrap();
        assert_eq!(report.rows.len(), 21);
        assert!(report.unmapped_lower.is_empty());
        assert_eq!(report.status(), Status::Pass);

        let strict = verify_refinement(&map, &ws, Mode::Strict).unwrap();
        let failing: Vec<&str> = strict.failing_rows().map(|r| r.lower.relationship.as_str()).collect();
        assert_eq!(
            failing,
            [
                "works at",
                "arranges work by",
                "deals with environment",
                "deals with context category",
                "is surrounded by",
                "influences"
            ]
        );
        assert!(strict.failing_rows().all(|r| r.endpoint_verdicts.0.ok() && r.endpoint_verdicts.1.ok()));
    }

    #[test]
    fn power_of_qualifier_becomes_a_note() {
        let ws = crate::corpus::load_workspace();
        let report = verify_refinement(&crate::corpus::refinement_map(), &ws, Mode::Default).unwrap();
        let row = report.rows.iter().find(|r| r.lower.relationship == "influences").unwrap();
        assert_eq!(row.notes, vec!["upper source qualified (Power of)"]);
        assert_eq!(row.upper.source, "Thing");
    }

    #[test]
    fn coverage_and_errors() {
        let ws = crate::corpus::load_workspace();
        let mut map = crate::corpus::refinement_map();
        map.rows.retain(|r| r.lower.name != "universalizes");
        let report = verify_refinement(&map, &ws, Mode::Default).unwrap();
        assert_eq!(report.rows.len(), 20);
        assert_eq!(report.unmapped_lower, vec![RelSelector::named("universalizes")]);
        assert_eq!(report.status(), Status::Fail);

        let mut bad = crate::corpus::refinement_map();
        bad.rows[0].upper = RelSelector::named("unheard of");
        assert!(matches!(
            verify_refinement(&bad, &ws, Mode::Default),
            Err(RefineError::UnknownRelationship { .. })
        ));

        let mut twice = crate::corpus::refinement_map();
        let first = twice.rows[0].clone();
        twice.rows.push(first);
        assert!(matches!(
            verify_refinement(&twice, &ws, Mode::Default),
            Err(RefineError::DuplicateMapping(_))
        ));
    }

    #[test]
    fn empty_map_lists_every_lower_relationship() {
        let ws = crate::corpus::load_workspace();
        let report = verify_refinement(&RefinementMap::new("SituationCO", "ThingFO"), &ws, Mode::Default).unwrap();
        assert!(report.rows.is_empty());
        assert_eq!(report.unmapped_lower.len(), 21);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 0);
        assert_eq!(json["unmapped_lower"][0], "implies universals");
    }
}
