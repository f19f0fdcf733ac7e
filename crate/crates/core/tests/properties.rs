mod common;

use std::collections::BTreeSet;

use ontoarch::axiom::{evaluate_axiom, AxiomHead, AxiomRule};
use ontoarch::conformance::{validate, ValidationOptions};
use ontoarch::corpus;
use ontoarch::instance::{Direction, InstanceGraph, InstanceModel};
use ontoarch::model::{
    check_ontology_wellformedness, Endpoint, Layer, Multiplicity, Ontology, Origin, RelationshipDef, TaxonomicLink,
    Term, TermPath, TermRef, Workspace,
};
use ontoarch::refinement::{verify_refinement, Mode, RefinementMap, RelSelector};
use ontoarch::report::Report;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(128)
}

/// Terms `T0..Tn` with is-a links only from higher to lower index, each
/// optionally stereotyped by a term of a fixed upper ontology `Up`.
fn layered_pair(seed: u64) -> Workspace {
    let mut rng = common::rng(seed);
    let mut up = Ontology::new("Up", "1", Layer::Foundational);
    for i in 0..4 {
        up.terms.push(Term::new(format!("U{i}"), Origin::Own));
    }
    up.taxonomy.push(TaxonomicLink {
        child: "U1".into(),
        parent: "U0".into(),
    });

    let mut low = Ontology::new("Low", "1", Layer::Core);
    low.imports.push(ontoarch::model::Import {
        ontology: "Up".into(),
        layer: Layer::Foundational,
    });
    let n = rng.gen_range(1..10);
    for i in 0..n {
        let mut t = Term::new(format!("T{i}"), Origin::Own);
        if rng.gen_bool(0.3) {
            t.stereotype = Some(TermPath::qualified("Up", format!("U{}", rng.gen_range(0..4))));
        }
        low.terms.push(t);
    }
    for child in 1..n {
        for parent in 0..child {
            if rng.gen_bool(0.25) {
                low.taxonomy.push(TaxonomicLink {
                    child: format!("T{child}"),
                    parent: format!("T{parent}"),
                });
            }
        }
    }
    for k in 0..rng.gen_range(0..6) {
        let end = |rng: &mut rand_chacha::ChaCha8Rng| {
            let m = Multiplicity::new(rng.gen_range(0..2), [None, Some(1), Some(3)][rng.gen_range(0..3)]).unwrap();
            Endpoint::new(TermPath::local(format!("T{}", rng.gen_range(0..n))), m)
        };
        let (s, t) = (end(&mut rng), end(&mut rng));
        low.relationships.push(RelationshipDef::new(format!("r{k}"), s, t));
    }
    Workspace::new([up, low]).unwrap()
}

fn low_terms(ws: &Workspace) -> Vec<TermRef> {
    ws.get("Low").unwrap().terms.iter().map(|t| TermRef::new("Low", &t.name)).collect()
}

fn keyed(r: &Report) -> BTreeSet<(String, Vec<String>)> {
    r.diagnostics.iter().map(|d| (d.code.clone(), d.subjects.clone())).collect()
}

fn holds(model: &InstanceModel, rel: &str, s: &str, t: &str) -> bool {
    model.links.iter().any(|l| l.relationship == rel && l.source == s && l.target == t)
}

fn is_a(ws: &Workspace, model: &InstanceModel, node: &str, guard: &TermPath) -> bool {
    let guard = ws.resolve_path("SituationCO", guard).unwrap();
    model.node(node).unwrap().asserted_terms.iter().any(|t| {
        let t = ws.resolve_term("SituationCO", t).unwrap();
        ws.subsumes(&guard, &t).unwrap_or(false)
    })
}

fn head_relationships(rule: &AxiomRule) -> Vec<&str> {
    match &rule.head {
        AxiomHead::Holds(a) => vec![a.relationship.as_str()],
        AxiomHead::Not(_) => vec![],
        AxiomHead::Exists { atoms, .. } => atoms.iter().map(|a| a.relationship.as_str()).collect(),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn subsumption_is_a_partial_order(seed in any::<u64>()) {
        let ws = layered_pair(seed);
        let terms = low_terms(&ws);
        let sub = |a: &TermRef, b: &TermRef| ws.subsumes(a, b).unwrap();
        for a in &terms {
            prop_assert!(sub(a, a));
            for b in &terms {
                if a != b {
                    prop_assert!(!(sub(a, b) && sub(b, a)), "{a} and {b} subsume each other");
                }
                for c in &terms {
                    if sub(a, b) && sub(b, c) {
                        prop_assert!(sub(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn own_stereotype_beats_inherited(seed in any::<u64>()) {
        let ws = layered_pair(seed);
        for t in &ws.get("Low").unwrap().terms {
            if let Some(own) = &t.stereotype {
                let eff = ws.effective_stereotype(&TermRef::new("Low", &t.name)).unwrap();
                prop_assert_eq!(eff, Some(TermRef::new("Up", &own.name)));
            }
        }
    }

    #[test]
    fn wellformedness_is_deterministic(seed in any::<u64>()) {
        let o = common::random_ontology(&mut common::rng(seed));
        let ws = Workspace::new([o.clone()]).unwrap();
        let first = check_ontology_wellformedness(&o, &ws);
        prop_assert_eq!(first, check_ontology_wellformedness(&o, &ws));
    }

    #[test]
    fn partners_are_symmetric(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let model = common::random_model(&mut common::rng(seed), &ws);
        let graph = InstanceGraph::build(&model, &ws).unwrap();
        let rels: BTreeSet<&str> = ws.get("SituationCO").unwrap().relationships.iter().map(|r| r.name.as_str()).collect();
        for r in rels {
            for n in &model.nodes {
                for m in graph.partners(r, &n.id, Direction::Outgoing).unwrap() {
                    prop_assert!(graph.partners(r, m, Direction::Incoming).unwrap().contains(n.id.as_str()));
                }
                for m in graph.partners(r, &n.id, Direction::Incoming).unwrap() {
                    prop_assert!(graph.partners(r, m, Direction::Outgoing).unwrap().contains(n.id.as_str()));
                }
            }
        }
    }

    #[test]
    fn instances_of_is_monotone(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let model = common::random_model(&mut common::rng(seed), &ws);
        let graph = InstanceGraph::build(&model, &ws).unwrap();
        let terms: Vec<TermRef> = ws.get("SituationCO").unwrap().terms.iter().map(|t| TermRef::new("SituationCO", &t.name)).collect();
        for a in &terms {
            for b in &terms {
                if ws.subsumes(a, b).unwrap() {
                    let (ia, ib) = (graph.instances_of(a).unwrap(), graph.instances_of(b).unwrap());
                    prop_assert!(ib.is_subset(&ia), "{b} instances not within {a}");
                }
            }
        }
    }

    #[test]
    fn validation_is_pure_and_partial_is_within_complete(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let model = common::random_model(&mut common::rng(seed), &ws);
        let complete = validate(&model, &ws, ValidationOptions::complete()).unwrap();
        let partial = validate(&model, &ws, ValidationOptions::partial()).unwrap();
        prop_assert_eq!(&complete, &validate(&model, &ws, ValidationOptions::complete()).unwrap());
        prop_assert!(keyed(&partial).is_subset(&keyed(&complete)));
    }

    #[test]
    fn subjects_name_model_or_ontology_things(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let model = common::random_model(&mut common::rng(seed), &ws);
        let onto = ws.get("SituationCO").unwrap();
        let report = validate(&model, &ws, ValidationOptions::complete()).unwrap();
        for d in &report.diagnostics {
            for s in &d.subjects {
                let known = model.node(s).is_some()
                    || onto.relationships.iter().any(|r| &r.name == s)
                    || onto.term(s).is_some();
                prop_assert!(known, "{}: unknown subject {s}", d.code);
            }
        }
    }

    #[test]
    fn deleting_a_relationship_only_adds_what_needs_it(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let mut rng = common::rng(seed);
        let mut model = common::random_model(&mut rng, &ws);
        let Some(rel) = model.links.choose(&mut rng).map(|l| l.relationship.clone()) else { return Ok(()) };
        let before = keyed(&validate(&model, &ws, ValidationOptions::complete()).unwrap());
        model.links.retain(|l| l.relationship != rel);
        let after = keyed(&validate(&model, &ws, ValidationOptions::complete()).unwrap());

        let axioms = &ws.get("SituationCO").unwrap().axioms;
        for (code, subjects) in after.difference(&before) {
            let needs_rel = axioms.iter().any(|a| &a.violation_code() == code && head_relationships(a).contains(&rel.as_str()));
            let ok = (code == "MULT_MIN" && subjects.get(1) == Some(&rel)) || needs_rel;
            prop_assert!(ok, "deleting {rel} added {code} {subjects:?}");
        }
        for (code, subjects) in &after {
            prop_assert!(!(code == "MULT_MAX" && subjects.get(1) == Some(&rel)));
        }
    }

    #[test]
    fn witnesses_are_sound(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let model = common::random_model(&mut common::rng(seed), &ws);
        let graph = InstanceGraph::build(&model, &ws).unwrap();
        for rule in &ws.get("SituationCO").unwrap().axioms {
            for w in evaluate_axiom(rule, &graph).unwrap() {
                let v = |name: &str| w.get(name).unwrap().to_string();
                for d in &rule.universals {
                    prop_assert!(is_a(&ws, &model, &v(&d.name), &d.guard));
                }
                for a in &rule.body {
                    prop_assert!(holds(&model, &a.relationship, &v(&a.left), &v(&a.right)));
                }
                match &rule.head {
                    AxiomHead::Holds(a) => prop_assert!(!holds(&model, &a.relationship, &v(&a.left), &v(&a.right))),
                    AxiomHead::Not(a) => prop_assert!(holds(&model, &a.relationship, &v(&a.left), &v(&a.right))),
                    AxiomHead::Exists { var, atoms } => {
                        for n in &model.nodes {
                            let bound = |x: &str| if x == var.name { n.id.clone() } else { v(x) };
                            let all = is_a(&ws, &model, &n.id, &var.guard)
                                && atoms.iter().all(|a| holds(&model, &a.relationship, &bound(&a.left), &bound(&a.right)));
                            prop_assert!(!all, "{} satisfies the head of {}", n.id, rule.id);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn a3_repair_removes_exactly_one_witness(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let mut rng = common::rng(seed);
        let mut model = common::random_model(&mut rng, &ws);
        let a3 = ws.get("SituationCO").unwrap().axioms.iter().find(|a| a.id == "A3").unwrap();
        let before = evaluate_axiom(a3, &InstanceGraph::build(&model, &ws).unwrap()).unwrap();
        let Some(target) = before.choose(&mut rng).cloned() else { return Ok(()) };

        model.add_node("repair", ["Particular Situation"]);
        model.add_link("deals with target", "repair", target.get("te").unwrap());
        model.add_link("deals with environment", "repair", target.get("ce").unwrap());
        let after = evaluate_axiom(a3, &InstanceGraph::build(&model, &ws).unwrap()).unwrap();
        let expected: Vec<_> = before.into_iter().filter(|w| w != &target).collect();
        prop_assert_eq!(after, expected);
    }

    #[test]
    fn refinement_verdicts_ignore_row_order(seed in any::<u64>()) {
        let ws = corpus::load_workspace();
        let mut rng = common::rng(seed);
        let mut map = corpus::refinement_map();
        map.rows.retain(|_| rng.gen_bool(0.8));
        let base = verify_refinement(&map, &ws, Mode::Strict).unwrap();
        let mut shuffled = map.clone();
        shuffled.rows.shuffle(&mut rng);
        let other = verify_refinement(&shuffled, &ws, Mode::Strict).unwrap();
        prop_assert_eq!(&base.unmapped_lower, &other.unmapped_lower);
        for r in &other.rows {
            let same = base.rows.iter().find(|b| b.row == r.row).unwrap();
            prop_assert_eq!(same, r);
        }
    }

    #[test]
    fn strict_passes_are_default_passes(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut ontologies: Vec<Ontology> = corpus::load_workspace().iter().cloned().collect();
        let situation = ontologies.iter_mut().find(|o| o.name == "SituationCO").unwrap();
        for r in &mut situation.relationships {
            for e in [&mut r.source, &mut r.target] {
                if rng.gen_bool(0.3) {
                    let min = rng.gen_range(0..3);
                    e.multiplicity = Multiplicity::new(min, [None, Some(3)][rng.gen_range(0..2)]).unwrap();
                }
            }
        }
        let ws = Workspace::new(ontologies).unwrap();
        let map = corpus::refinement_map();
        let default = verify_refinement(&map, &ws, Mode::Default).unwrap();
        let strict = verify_refinement(&map, &ws, Mode::Strict).unwrap();
        for (d, s) in default.rows.iter().zip(&strict.rows) {
            prop_assert!(!s.passes() || d.passes(), "{} passes strict only", s.lower.relationship);
        }
    }

    #[test]
    fn every_relationship_refines_itself(seed in any::<u64>()) {
        let ws = layered_pair(seed);
        let low = ws.get("Low").unwrap();
        let mut map = RefinementMap::new("Low", "Low");
        for r in &low.relationships {
            let sel = RelSelector::between(&r.name, &r.source.term.name, &r.target.term.name);
            map.push(sel.clone(), sel);
        }
        for mode in [Mode::Default, Mode::Strict] {
            let report = verify_refinement(&map, &ws, mode).unwrap();
            prop_assert!(report.rows.iter().all(|r| r.passes()));
            prop_assert!(report.unmapped_lower.is_empty());
        }
    }
}

#[test]
fn bundled_ontologies_refine_themselves() {
    let ws = corpus::load_workspace();
    for name in ["SituationCO", "ThingFO"] {
        let o = ws.get(name).unwrap();
        let mut map = RefinementMap::new(name, name);
        for r in &o.relationships {
            let sel = RelSelector::between(&r.name, &r.source.term.name, &r.target.term.name);
            map.push(sel.clone(), sel);
        }
        let report = verify_refinement(&map, &ws, Mode::Strict).unwrap();
        assert_eq!(report.failing_rows().count(), 0, "{name}");
    }
}
