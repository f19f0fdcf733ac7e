use std::fmt::Write as _;

use crate::axiom::{AxiomHead, AxiomRule, RelationAtom, VarDecl};
use crate::instance::InstanceModel;
use crate::model::{Completeness, Disjointness, Endpoint, Ontology, Origin, TermPath};
use crate::refinement::{RefinementMap, RelSelector};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn path(p: &TermPath) -> String {
    match &p.ontology {
        Some(o) => format!("{o}.{}", quote(&p.name)),
        None => quote(&p.name),
    }
}

fn list(items: &[String]) -> String {
    items.iter().map(|s| quote(s)).collect::<Vec<_>>().join(", ")
}

fn endpoint(e: &Endpoint) -> String {
    let mut s = format!("{} [{}]", path(&e.term), e.multiplicity);
    if let Some(q) = &e.qualifier {
        write!(s, " qualifier {}", quote(q)).unwrap();
    }
    s
}

fn var(v: &VarDecl) -> String {
    format!("{} : {}", v.name, path(&v.guard))
}

fn atom(a: &RelationAtom) -> String {
    format!("{}({}, {})", quote(&a.relationship), a.left, a.right)
}

fn conjunction(atoms: &[RelationAtom]) -> String {
    atoms.iter().map(atom).collect::<Vec<_>>().join(" & ")
}

fn axiom(a: &AxiomRule) -> String {
    let vars: Vec<String> = a.universals.iter().map(var).collect();
    let head = match &a.head {
        AxiomHead::Holds(x) => atom(x),
        AxiomHead::Not(x) => format!("not {}", atom(x)),
        AxiomHead::Exists { var: v, atoms } => format!("exists {} : {}", var(v), conjunction(atoms)),
    };
    format!(
        "axiom {} forall {} :\n    {}\n    -> {}\n",
        a.id,
        vars.join(", "),
        conjunction(&a.body),
        head
    )
}

/// Canonical text of one ontology block.
pub fn write_ontology(o: &Ontology) -> String {
    let mut sections: Vec<String> = Vec::new();
    sections.push(format!("ontology {} version {} layer {}\n", o.name, quote(&o.version), o.layer));

    let mut s = String::new();
    for i in &o.imports {
        writeln!(s, "import {} layer {}", i.ontology, i.layer).unwrap();
    }
    sections.push(s);

    let mut s = String::new();
    for t in &o.terms {
        let origin = match t.origin {
            Origin::Own => "own",
            Origin::Reused => "reused",
        };
        write!(s, "term {} {origin}", quote(&t.name)).unwrap();
        if !t.synonyms.is_empty() {
            write!(s, " synonyms {}", list(&t.synonyms)).unwrap();
        }
        if let Some(st) = &t.stereotype {
            write!(s, " stereotype {}", path(st)).unwrap();
        }
        s.push('\n');
    }
    sections.push(s);

    let mut s = String::new();
    for l in &o.taxonomy {
        writeln!(s, "isa {} -> {}", quote(&l.child), quote(&l.parent)).unwrap();
    }
    sections.push(s);

    let mut s = String::new();
    for g in &o.generalization_sets {
        let c = match g.completeness {
            Completeness::Complete => "complete",
            Completeness::Incomplete => "incomplete",
        };
        let d = match g.disjointness {
            Disjointness::Disjoint => "disjoint",
            Disjointness::Overlapping => "overlapping",
        };
        writeln!(s, "genset {} {c} {d} {{ {} }}", quote(&g.parent), list(&g.children)).unwrap();
    }
    sections.push(s);

    let mut s = String::new();
    for r in &o.relationships {
        write!(s, "rel {} from {} to {}", quote(&r.name), endpoint(&r.source), endpoint(&r.target)).unwrap();
        if let Some(d) = &r.definition {
            write!(s, " definition {}", quote(d)).unwrap();
        }
        s.push('\n');
    }
    sections.push(s);

    let axioms: Vec<String> = o.axioms.iter().map(axiom).collect();
    sections.push(axioms.join("\n"));

    sections.retain(|s| !s.is_empty());
    sections.join("\n")
}

/// Canonical text of a multi-block `.onto` file.
pub fn write_ontologies(ontologies: &[Ontology]) -> String {
    ontologies.iter().map(write_ontology).collect::<Vec<_>>().join("\n")
}

pub fn write_instance_model(m: &InstanceModel) -> String {
    let mut s = format!("model {} conforms {}\n", m.name, m.conforms_to);
    if !m.nodes.is_empty() {
        s.push('\n');
    }
    for n in &m.nodes {
        writeln!(s, "{} : {}", n.id, list(&n.asserted_terms)).unwrap();
    }
    if !m.links.is_empty() {
        s.push('\n');
    }
    for l in &m.links {
        writeln!(s, "link {} {} -> {}", quote(&l.relationship), l.source, l.target).unwrap();
    }
    s
}

fn selector(sel: &RelSelector) -> String {
    match &sel.endpoints {
        Some((a, b)) => format!("{} from {} to {}", quote(&sel.name), quote(a), quote(b)),
        None => quote(&sel.name),
    }
}

pub fn write_refinement_map(m: &RefinementMap) -> String {
    let mut s = format!("refine {} onto {}\n", m.lower, m.upper);
    if !m.rows.is_empty() {
        s.push('\n');
    }
    for r in &m.rows {
        writeln!(s, "{} -> {}", selector(&r.lower), selector(&r.upper)).unwrap();
    }
    s
}
