//! The bundled corpus, compiled into the library.
//!
//! The same files ship under `corpus/` at the repository root; these
//! constants hold their contents so that examples and tests do not depend
//! on the working directory.

use crate::instance::InstanceModel;
use crate::model::Workspace;
use crate::refinement::RefinementMap;
use crate::syntax::{parse_instance_model, parse_ontologies, parse_refinement_map};

pub const THING_FO: &str = include_str!("../../../corpus/ThingFO-lite.onto");
pub const SITUATION_CO: &str = include_str!("../../../corpus/SituationCO.onto");
pub const REFMAP: &str = include_str!("../../../corpus/SituationCO-vs-ThingFO.refmap");

pub const SCENARIO: &str = include_str!("../../../corpus/scenario.inst");
pub const VALID: &str = include_str!("../../../corpus/valid.inst");
pub const A1_PASS: &str = include_str!("../../../corpus/a1-pass.inst");
pub const A1_FAIL: &str = include_str!("../../../corpus/a1-fail.inst");
pub const A2_PASS: &str = include_str!("../../../corpus/a2-pass.inst");
pub const A2_FAIL: &str = include_str!("../../../corpus/a2-fail.inst");
pub const A3_PASS: &str = include_str!("../../../corpus/a3-pass.inst");
pub const A3_FAIL: &str = include_str!("../../../corpus/a3-fail.inst");

/// Every `.inst` file with its file name.
pub const INSTANCE_FIXTURES: [(&str, &str); 8] = [
    ("scenario.inst", SCENARIO),
    ("valid.inst", VALID),
    ("a1-pass.inst", A1_PASS),
    ("a1-fail.inst", A1_FAIL),
    ("a2-pass.inst", A2_PASS),
    ("a2-fail.inst", A2_FAIL),
    ("a3-pass.inst", A3_PASS),
    ("a3-fail.inst", A3_FAIL),
];

/// ThingFO, SituationCO and the supporting ontologies SituationCO imports.
///
/// ```
/// let ws = ontoarch::corpus::load_workspace();
/// assert_eq!(ws.get("SituationCO").unwrap().terms.len(), 20);
/// ```
pub fn load_workspace() -> Workspace {
    let mut all = parse_ontologies(THING_FO).expect("bundled ThingFO parses").value;
    all.extend(parse_ontologies(SITUATION_CO).expect("bundled SituationCO parses").value);
    Workspace::new(all).expect("bundled ontology names are distinct")
}

pub fn refinement_map() -> RefinementMap {
    parse_refinement_map(REFMAP).expect("bundled map parses").value
}

/// Parses one of [`INSTANCE_FIXTURES`] by file name.
pub fn instance(file: &str) -> InstanceModel {
    let (_, text) = INSTANCE_FIXTURES
        .iter()
        .find(|(name, _)| *name == file)
        .unwrap_or_else(|| panic!("no bundled fixture {file}"));
    parse_instance_model(text).expect("bundled fixture parses").value
}
