//! Toolchain for layered ontologies.
//!
//! * [`model`]: ontologies, terms, relationships and the [`Workspace`](model::Workspace)
//!   that resolves names across ontologies.
//! * [`syntax`]: parsers and writers for `.onto`, `.inst` and `.refmap` text.
//! * [`instance`]: instance models and their indexed view.
//! * [`conformance`]: validation of an instance model against its ontology.
//! * [`axiom`]: guarded first-order axioms, with an indexed and a naive evaluator.
//! * [`refinement`]: relationship refinement matrices between layers.
//! * [`corpus`]: the bundled ontologies and fixtures.
//!
//! ```
//! use ontoarch::{corpus, refinement};
//!
//! let ws = corpus::load_workspace();
//! let report = refinement::verify_refinement(&corpus::refinement_map(), &ws, refinement::Mode::Default)?;
//! assert_eq!(report.rows.len(), 21);
//! # Ok::<(), refinement::RefineError>(())
//! ```

pub mod axiom;
pub mod cli;
pub mod conformance;
pub mod corpus;
pub mod instance;
pub mod model;
pub mod refinement;
pub mod report;
pub mod span;
pub mod syntax;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/layers.md")]
    mod layers {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
    #[doc = include_str!("../../../book/src/conformance.md")]
    mod conformance {}
    #[doc = include_str!("../../../book/src/axioms.md")]
    mod axioms {}
    #[doc = include_str!("../../../book/src/refinement.md")]
    mod refinement {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
