//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use ontoarch::axiom::{AxiomHead, AxiomRule, RelationAtom, VarDecl};
use ontoarch::instance::InstanceModel;
use ontoarch::model::{
    Completeness, Disjointness, Endpoint, GeneralizationSet, Import, Layer, Multiplicity, Ontology, Origin,
    TaxonomicLink, Term, TermPath, Workspace,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_path(file: &str) -> String {
    format!("{}/../../corpus/{file}", env!("CARGO_MANIFEST_DIR"))
}

/// A model over SituationCO with up to 12 nodes and 40 links.
///
/// Each node gets one or two terms. Links pick a relationship and endpoints
/// at random; about two thirds respect the declared endpoint terms so that
/// axioms and multiplicities actually bite.
pub fn random_model(rng: &mut impl Rng, ws: &Workspace) -> InstanceModel {
    let onto = ws.get("SituationCO").expect("SituationCO loaded");
    let terms: Vec<&str> = onto.terms.iter().map(|t| t.name.as_str()).collect();
    let mut m = InstanceModel::new("random", "SituationCO");
    let n = rng.gen_range(0..=12);
    for i in 0..n {
        let k = if rng.gen_bool(0.25) { 2 } else { 1 };
        let picked: Vec<&str> = terms.choose_multiple(rng, k).copied().collect();
        m.add_node(format!("n{i}"), picked);
    }
    if n == 0 {
        return m;
    }
    let typed = |term: &str, m: &InstanceModel| -> Vec<String> {
        let target = ontoarch::model::TermRef::new("SituationCO", term);
        m.nodes
            .iter()
            .filter(|node| {
                node.asserted_terms.iter().any(|t| {
                    ws.resolve_term("SituationCO", t)
                        .and_then(|r| ws.subsumes(&target, &r))
                        .unwrap_or(false)
                })
            })
            .map(|node| node.id.clone())
            .collect()
    };
    let links = rng.gen_range(0..=40);
    for _ in 0..links {
        let rel = onto.relationships.choose(rng).unwrap();
        let mut s = format!("n{}", rng.gen_range(0..n));
        let mut t = format!("n{}", rng.gen_range(0..n));
        if rng.gen_bool(0.66) {
            if let Some(x) = typed(&rel.source.term.name, &m).choose(rng) {
                s = x.clone();
            }
            if let Some(x) = typed(&rel.target.term.name, &m).choose(rng) {
                t = x.clone();
            }
        }
        m.add_link(&rel.name, &s, &t);
    }
    m
}

const AWKWARD: &[&str] = &[
    "a", "b", "Thing", "x y", "quote\"d", "back\\slash", "tab\there", "line\nbreak", "é", "→", "#not a comment", "[1..*]", "{", "-",
    "", "0",
];

fn word(rng: &mut impl Rng) -> String {
    let parts = rng.gen_range(1..=3);
    (0..parts).map(|_| *AWKWARD.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn multiplicity(rng: &mut impl Rng) -> Multiplicity {
    let min = rng.gen_range(0..4);
    let max = if rng.gen_bool(0.4) { None } else { Some(rng.gen_range(min.max(1)..6)) };
    Multiplicity::new(min, max).unwrap()
}

/// A syntactically valid ontology: every local reference resolves, names and
/// synonyms are distinct, axiom atoms name relationships unambiguously.
/// Qualified references only point at imported ontologies, and reused
/// terms always name a source term in one of them.
pub fn random_ontology(rng: &mut impl Rng) -> Ontology {
    let layer = *Layer::ALL.choose(rng).unwrap();
    let mut o = Ontology::new(format!("O{}", rng.gen_range(0..1000)), word(rng), layer);

    for i in 0..rng.gen_range(1..4) {
        o.imports.push(Import {
            ontology: format!("Imp{i}_{}", rng.gen_range(0..100)),
            layer: *Layer::ALL.choose(rng).unwrap(),
        });
    }

    let mut used = std::collections::BTreeSet::new();
    let mut fresh = |rng: &mut ChaCha8Rng| loop {
        let w = word(rng);
        if used.insert(w.clone()) {
            return w;
        }
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let n_terms = rng.gen_range(1..8);
    for _ in 0..n_terms {
        let origin = if rng.gen_bool(0.5) { Origin::Own } else { Origin::Reused };
        let mut t = Term::new(fresh(&mut r), origin);
        let syn = rng.gen_range(0..3);
        t.synonyms = (0..syn).map(|_| fresh(&mut r)).collect();
        o.terms.push(t);
    }
    let names: Vec<String> = o.terms.iter().map(|t| t.name.clone()).collect();
    let imports: Vec<String> = o.imports.iter().map(|i| i.ontology.clone()).collect();
    let path = |rng: &mut ChaCha8Rng| -> TermPath {
        if rng.gen_bool(0.3) {
            TermPath::qualified(imports.choose(rng).unwrap().clone(), word(rng))
        } else {
            TermPath::local(names.choose(rng).unwrap().clone())
        }
    };

    for t in &mut o.terms {
        if t.origin == Origin::Reused {
            t.stereotype = Some(TermPath::qualified(imports.choose(&mut r).unwrap().clone(), word(&mut r)));
        } else if r.gen_bool(0.5) {
            t.stereotype = Some(path(&mut r));
        }
    }

    for child in 1..names.len() {
        if r.gen_bool(0.6) {
            let parent = r.gen_range(0..child);
            o.taxonomy.push(TaxonomicLink {
                child: names[child].clone(),
                parent: names[parent].clone(),
            });
        }
    }

    if names.len() >= 3 && r.gen_bool(0.5) {
        let mut pick: Vec<String> = names.choose_multiple(&mut r, 3).cloned().collect();
        let parent = pick.remove(0);
        o.generalization_sets.push(GeneralizationSet {
            parent,
            children: pick,
            completeness: if r.gen_bool(0.5) { Completeness::Complete } else { Completeness::Incomplete },
            disjointness: if r.gen_bool(0.5) { Disjointness::Disjoint } else { Disjointness::Overlapping },
        });
    }

    let mut sigs = std::collections::BTreeSet::new();
    for _ in 0..r.gen_range(0..6) {
        let name = word(&mut r);
        let source = path(&mut r);
        let target = path(&mut r);
        if !sigs.insert((name.clone(), source.clone(), target.clone())) {
            continue;
        }
        let mut s = Endpoint::new(source, multiplicity(&mut r));
        let t = Endpoint::new(target, multiplicity(&mut r));
        if r.gen_bool(0.2) {
            s.qualifier = Some(word(&mut r));
        }
        let mut rel = ontoarch::model::RelationshipDef::new(name, s, t);
        if r.gen_bool(0.3) {
            rel.definition = Some(word(&mut r));
        }
        o.relationships.push(rel);
    }

    let unique: Vec<String> = o
        .relationships
        .iter()
        .map(|x| x.name.clone())
        .filter(|n| o.relationships.iter().filter(|x| &x.name == n).count() == 1)
        .collect();
    if !unique.is_empty() {
        for a in 0..r.gen_range(0..3) {
            let vars: Vec<VarDecl> = (0..r.gen_range(1..4)).map(|i| VarDecl::new(format!("v{i}"), path(&mut r))).collect();
            let atom = |r: &mut ChaCha8Rng, k: usize| {
                RelationAtom::new(
                    unique.choose(r).unwrap().clone(),
                    format!("v{}", r.gen_range(0..k)),
                    format!("v{}", r.gen_range(0..k)),
                )
            };
            let body = (0..r.gen_range(1..3)).map(|_| atom(&mut r, vars.len())).collect();
            let head = match r.gen_range(0..3) {
                0 => AxiomHead::Holds(atom(&mut r, vars.len())),
                1 => AxiomHead::Not(atom(&mut r, vars.len())),
                _ => {
                    let var = VarDecl::new(format!("v{}", vars.len()), path(&mut r));
                    let atoms = (0..r.gen_range(1..3)).map(|_| atom(&mut r, vars.len() + 1)).collect();
                    AxiomHead::Exists { var, atoms }
                }
            };
            o.axioms.push(AxiomRule {
                id: format!("X{a}"),
                universals: vars,
                body,
                head,
            });
        }
    }
    o
}
