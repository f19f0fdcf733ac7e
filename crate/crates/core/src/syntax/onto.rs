use std::collections::BTreeSet;

use super::lexer::Tok;
use super::{finish, Cursor, PResult, ParseFailure, Parsed, Stop};
use crate::axiom::{AxiomHead, AxiomRule, RelationAtom, VarDecl};
use crate::model::{
    parse_multiplicity, Completeness, DeclKind, Disjointness, Endpoint, GeneralizationSet, Import, Layer,
    Multiplicity, Ontology, Origin, TaxonomicLink, Term, TermPath,
};
use crate::span::SourceSpan;

const KEYWORDS: [&str; 7] = ["ontology", "import", "term", "isa", "genset", "rel", "axiom"];

fn is_decl_start(t: &Tok, _next: &Tok) -> bool {
    matches!(t, Tok::Ident(s) if KEYWORDS.contains(&s.as_str()))
}

/// Parses a `.onto` file holding one or more `ontology` blocks.
///
/// ```
/// let text = r#"
/// ontology Tiny version "1" layer foundational
/// term "Thing" own
/// rel "relates with" from "Thing" [*] to "Thing" [*]
/// "#;
/// let parsed = ontoarch::syntax::parse_ontologies(text).unwrap();
/// assert_eq!(parsed.value[0].relationships.len(), 1);
/// ```
pub fn parse_ontologies(text: &str) -> Result<Parsed<Vec<Ontology>>, ParseFailure> {
    let mut c = Cursor::new(text);
    let mut out: Vec<Ontology> = Vec::new();
    if c.at_eof() {
        let _ = c.fail::<()>("'ontology' header");
    }
    while !c.at_eof() {
        let r = if c.at_keyword("ontology") {
            header(&mut c, &mut out)
        } else if let Some(o) = out.last_mut() {
            decl(&mut c, o)
        } else {
            c.fail("'ontology' header")
        };
        if r.and_then(|_| c.end_decl()).is_err() {
            c.recover(is_decl_start);
        }
    }
    for o in &out {
        resolve(o, &mut c);
    }
    finish(out, c.diags)
}

/// Parses a `.onto` file and returns its first ontology. Further blocks in
/// the same file (supporting ontologies) must still be valid but are
/// dropped; use [`parse_ontologies`] to keep them.
pub fn parse_ontology(text: &str) -> Result<Parsed<Ontology>, ParseFailure> {
    let Parsed { value, warnings } = parse_ontologies(text)?;
    let first = value
        .into_iter()
        .next()
        .expect("a successful parse has at least one ontology");
    Ok(Parsed {
        value: first,
        warnings,
    })
}

fn header(c: &mut Cursor, out: &mut Vec<Ontology>) -> PResult<()> {
    let start = c.bump().span;
    // A placeholder keeps following declarations attached to a block even
    // when the header is malformed.
    let parsed = (|| -> PResult<Ontology> {
        let (name, name_span) = c.expect_ident("ontology name")?;
        c.expect_keyword("version")?;
        let (version, _) = c.expect_str("version string")?;
        c.expect_keyword("layer")?;
        let layer = layer(c)?;
        if out.iter().any(|o| o.name == name) {
            c.error(
                "DUPLICATE_ONTOLOGY",
                format!("ontology `{name}` is already defined in this file"),
                name_span,
            );
        }
        Ok(Ontology::new(name, version, layer))
    })();
    let mut o = parsed.as_ref().cloned().unwrap_or_else(|_| Ontology::new("", "", Layer::Instance));
    o.spans.insert(DeclKind::Header, 0, start);
    out.push(o);
    parsed.map(|_| ())
}

fn layer(c: &mut Cursor) -> PResult<Layer> {
    let (word, span) = c.expect_ident("layer name")?;
    word.parse().map_err(|_| {
        c.error(
            "SYNTAX_ERROR",
            format!("unknown layer `{word}` (expected foundational, core, top_domain, low_domain or instance)"),
            span,
        );
        Stop
    })
}

fn decl(c: &mut Cursor, o: &mut Ontology) -> PResult<()> {
    let start = c.peek().span.clone();
    let keyword = match &c.peek().tok {
        Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => s.clone(),
        _ => return c.fail("a declaration"),
    };
    c.bump();
    match keyword.as_str() {
        "import" => {
            let (name, span) = c.expect_ident("ontology name")?;
            c.expect_keyword("layer")?;
            let layer = layer(c)?;
            if o.is_imported(&name) {
                c.error("DUPLICATE_IMPORT", format!("`{name}` is imported twice"), span);
                return Ok(());
            }
            o.spans.insert(DeclKind::Import, o.imports.len(), start);
            o.imports.push(Import { ontology: name, layer });
        }
        "term" => term(c, o, start)?,
        "isa" => {
            let (child, _) = c.expect_str("child term")?;
            c.expect(Tok::Arrow)?;
            let (parent, _) = c.expect_str("parent term")?;
            o.spans.insert(DeclKind::Isa, o.taxonomy.len(), start);
            o.taxonomy.push(TaxonomicLink { child, parent });
        }
        "genset" => {
            let (parent, _) = c.expect_str("parent term")?;
            let completeness = if c.eat_keyword("complete") {
                Completeness::Complete
            } else if c.eat_keyword("incomplete") {
                Completeness::Incomplete
            } else {
                return c.fail("`complete` or `incomplete`");
            };
            let disjointness = if c.eat_keyword("disjoint") {
                Disjointness::Disjoint
            } else if c.eat_keyword("overlapping") {
                Disjointness::Overlapping
            } else {
                return c.fail("`disjoint` or `overlapping`");
            };
            c.expect(Tok::LBrace)?;
            let mut children = vec![c.expect_str("child term")?.0];
            while c.eat(&Tok::Comma) {
                children.push(c.expect_str("child term")?.0);
            }
            c.expect(Tok::RBrace)?;
            o.spans.insert(DeclKind::Genset, o.generalization_sets.len(), start);
            o.generalization_sets.push(GeneralizationSet {
                parent,
                children,
                completeness,
                disjointness,
            });
        }
        "rel" => {
            let (name, _) = c.expect_str("relationship name")?;
            c.expect_keyword("from")?;
            let source = endpoint(c)?;
            c.expect_keyword("to")?;
            let target = endpoint(c)?;
            let mut rel = crate::model::RelationshipDef::new(name, source, target);
            if c.eat_keyword("definition") {
                rel.definition = Some(c.expect_str("definition text")?.0);
            }
            o.spans.insert(DeclKind::Relationship, o.relationships.len(), start);
            o.relationships.push(rel);
        }
        "axiom" => axiom(c, o, start)?,
        _ => unreachable!("ontology headers are handled by the caller"),
    }
    Ok(())
}

fn term(c: &mut Cursor, o: &mut Ontology, start: SourceSpan) -> PResult<()> {
    let (name, name_span) = c.expect_str("term name")?;
    let origin = if c.eat_keyword("own") {
        Origin::Own
    } else if c.eat_keyword("reused") {
        Origin::Reused
    } else {
        return c.fail("`own` or `reused`");
    };
    let mut synonyms = Vec::new();
    if c.eat_keyword("synonyms") {
        synonyms.push(c.expect_str("synonym")?.0);
        while c.eat(&Tok::Comma) {
            synonyms.push(c.expect_str("synonym")?.0);
        }
    }
    let stereotype = if c.eat_keyword("stereotype") {
        Some(path(c)?.0)
    } else {
        None
    };

    let mut labels: Vec<&String> = vec![&name];
    labels.extend(&synonyms);
    let mut clash = None;
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) || o.terms.iter().any(|t| t.answers_to(l)) {
            clash = Some(*l);
            break;
        }
    }
    if let Some(l) = clash {
        c.error(
            "DUPLICATE_TERM",
            format!("term name or synonym \"{l}\" is already declared"),
            name_span,
        );
        return Ok(());
    }
    if origin == Origin::Reused && stereotype.is_none() {
        c.error(
            "MISSING_REUSE_SOURCE",
            format!("reused term \"{name}\" needs `stereotype <Ontology>.\"Term\"` naming its source"),
            name_span,
        );
        return Ok(());
    }
    let mut t = Term::new(name, origin).with_synonyms(synonyms);
    t.stereotype = stereotype;
    o.spans.insert(DeclKind::Term, o.terms.len(), start);
    o.terms.push(t);
    Ok(())
}

/// `"Term"` or `Onto."Term"`.
fn path(c: &mut Cursor) -> PResult<(TermPath, SourceSpan)> {
    match c.peek().tok.clone() {
        Tok::Str(name) => Ok((TermPath::local(name), c.bump().span)),
        Tok::Ident(onto) => {
            let start = c.bump().span;
            c.expect(Tok::Dot)?;
            let (name, end) = c.expect_str("term name")?;
            Ok((TermPath::qualified(onto, name), start.to(&end)))
        }
        _ => c.fail("term reference"),
    }
}

fn endpoint(c: &mut Cursor) -> PResult<Endpoint> {
    let (term, _) = path(c)?;
    let multiplicity = multiplicity(c)?;
    let mut e = Endpoint::new(term, multiplicity);
    if c.eat_keyword("qualifier") {
        e.qualifier = Some(c.expect_str("qualifier text")?.0);
    }
    Ok(e)
}

fn multiplicity(c: &mut Cursor) -> PResult<Multiplicity> {
    match c.peek().tok.clone() {
        Tok::Mult(raw) => {
            let span = c.bump().span;
            parse_multiplicity(&raw).map_err(|e| {
                c.error("MALFORMED_MULTIPLICITY", e.to_string(), span);
                Stop
            })
        }
        _ => c.fail("multiplicity such as [1..*]"),
    }
}

fn axiom(c: &mut Cursor, o: &mut Ontology, start: SourceSpan) -> PResult<()> {
    let (id, id_span) = c.expect_ident("axiom id")?;
    c.expect_keyword("forall")?;
    let mut scope: Vec<String> = Vec::new();
    let mut universals = vec![var_decl(c, &mut scope)?];
    while c.eat(&Tok::Comma) {
        universals.push(var_decl(c, &mut scope)?);
    }
    c.expect(Tok::Colon)?;
    let body = conjunction(c, &scope)?;
    c.expect(Tok::Arrow)?;
    let head = if c.eat_keyword("not") {
        AxiomHead::Not(atom(c, &scope)?)
    } else if c.eat_keyword("exists") {
        let var = var_decl(c, &mut scope)?;
        c.expect(Tok::Colon)?;
        AxiomHead::Exists {
            var,
            atoms: conjunction(c, &scope)?,
        }
    } else {
        AxiomHead::Holds(atom(c, &scope)?)
    };
    if o.axioms.iter().any(|a| a.id == id) {
        c.error("DUPLICATE_AXIOM", format!("axiom `{id}` is already declared"), id_span);
        return Ok(());
    }
    o.spans.insert(DeclKind::Axiom, o.axioms.len(), start);
    o.axioms.push(AxiomRule {
        id,
        universals,
        body,
        head,
    });
    Ok(())
}

fn var_decl(c: &mut Cursor, scope: &mut Vec<String>) -> PResult<VarDecl> {
    let (name, span) = c.expect_ident("variable name")?;
    c.expect(Tok::Colon)?;
    let (guard, _) = path(c)?;
    if scope.contains(&name) {
        c.error("DUPLICATE_VARIABLE", format!("variable `{name}` is already bound"), span);
    } else {
        scope.push(name.clone());
    }
    Ok(VarDecl::new(name, guard))
}

fn conjunction(c: &mut Cursor, scope: &[String]) -> PResult<Vec<RelationAtom>> {
    let mut atoms = vec![atom(c, scope)?];
    while c.eat(&Tok::Amp) {
        atoms.push(atom(c, scope)?);
    }
    Ok(atoms)
}

fn atom(c: &mut Cursor, scope: &[String]) -> PResult<RelationAtom> {
    let (rel, _) = c.expect_str("relationship atom such as \"rel\"(x, y)")?;
    c.expect(Tok::LParen)?;
    let left = variable(c, scope)?;
    c.expect(Tok::Comma)?;
    let right = variable(c, scope)?;
    c.expect(Tok::RParen)?;
    Ok(RelationAtom::new(rel, left, right))
}

fn variable(c: &mut Cursor, scope: &[String]) -> PResult<String> {
    let (name, span) = c.expect_ident("variable")?;
    if !scope.contains(&name) {
        c.error("UNDECLARED_VARIABLE", format!("variable `{name}` is not bound"), span);
    }
    Ok(name)
}

/// Second pass: local references and relationship identity.
fn resolve(o: &Ontology, c: &mut Cursor) {
    let span = |kind, i| o.spans.get(kind, i).cloned().unwrap_or_else(SourceSpan::start);
    let check = |c: &mut Cursor, p: &TermPath, at: SourceSpan| {
        if p.ontology.as_deref().is_some_and(|n| n != o.name) {
            return;
        }
        if o.canonical_name(&p.name).is_none() {
            c.error(
                "UNRESOLVED_REFERENCE",
                format!("no term \"{}\" in {}", p.name, o.name),
                at,
            );
        }
    };
    for (i, t) in o.terms.iter().enumerate() {
        if let Some(s) = &t.stereotype {
            check(c, s, span(DeclKind::Term, i));
        }
    }
    for (i, l) in o.taxonomy.iter().enumerate() {
        check(c, &TermPath::local(&l.child), span(DeclKind::Isa, i));
        check(c, &TermPath::local(&l.parent), span(DeclKind::Isa, i));
    }
    for (i, g) in o.generalization_sets.iter().enumerate() {
        check(c, &TermPath::local(&g.parent), span(DeclKind::Genset, i));
        for ch in &g.children {
            check(c, &TermPath::local(ch), span(DeclKind::Genset, i));
        }
    }
    let mut seen = BTreeSet::new();
    for (i, r) in o.relationships.iter().enumerate() {
        check(c, &r.source.term, span(DeclKind::Relationship, i));
        check(c, &r.target.term, span(DeclKind::Relationship, i));
        let canon = |p: &TermPath| match &p.ontology {
            Some(n) if *n != o.name => p.to_string(),
            _ => o.canonical_name(&p.name).unwrap_or(&p.name).to_string(),
        };
        if !seen.insert((r.name.clone(), canon(&r.source.term), canon(&r.target.term))) {
            c.error(
                "DUPLICATE_RELATIONSHIP",
                format!("relationship {r} is already declared"),
                span(DeclKind::Relationship, i),
            );
        }
    }
    for (i, a) in o.axioms.iter().enumerate() {
        let at = span(DeclKind::Axiom, i);
        let mut guards: Vec<&TermPath> = a.universals.iter().map(|v| &v.guard).collect();
        let mut atoms: Vec<&RelationAtom> = a.body.iter().collect();
        match &a.head {
            AxiomHead::Holds(x) | AxiomHead::Not(x) => atoms.push(x),
            AxiomHead::Exists { var, atoms: xs } => {
                guards.push(&var.guard);
                atoms.extend(xs);
            }
        }
        for g in guards {
            check(c, g, at.clone());
        }
        for x in atoms {
            match o.relationships_named(&x.relationship).count() {
                1 => {}
                0 => c.error(
                    "UNRESOLVED_REFERENCE",
                    format!("axiom {}: no relationship \"{}\" in {}", a.id, x.relationship, o.name),
                    at.clone(),
                ),
                _ => c.error(
                    "UNRESOLVED_REFERENCE",
                    format!(
                        "axiom {}: relationship name \"{}\" is ambiguous in {}",
                        a.id, x.relationship, o.name
                    ),
                    at.clone(),
                ),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(text: &str) -> Vec<&'static str> {
        parse_ontologies(text).unwrap_err().codes()
    }

    const HEAD: &str = "ontology T version \"1\" layer core\n";

    #[test]
    fn empty_input_expects_a_header() {
        let f = parse_ontologies("").unwrap_err();
        assert_eq!(f.codes(), vec!["SYNTAX_ERROR"]);
        assert!(f.diagnostics[0].message.contains("expected 'ontology' header"));
        assert_eq!(parse_ontologies("# only a comment\n").unwrap_err().codes(), vec!["SYNTAX_ERROR"]);
    }

    #[test]
    fn duplicate_term_points_at_the_second_declaration() {
        let text = format!("{HEAD}term \"Goal\" own\nterm \"Goal\" own\n");
        let f = parse_ontologies(&text).unwrap_err();
        assert_eq!(f.codes(), vec!["DUPLICATE_TERM"]);
        assert_eq!(f.diagnostics[0].span.line, 3);
        assert_eq!(f.diagnostics[0].span.column, 6);
    }

    #[test]
    fn synonym_clash_is_a_duplicate() {
        let text = format!("{HEAD}term \"Place\" own\nterm \"Space\" own synonyms \"Place\"\n");
        assert_eq!(codes(&text), vec!["DUPLICATE_TERM"]);
    }

    #[test]
    fn forward_references_resolve() {
        let text = format!("{HEAD}isa \"B\" -> \"A\"\nterm \"A\" own\nterm \"B\" own\n");
        let o = parse_ontology(&text).unwrap().value;
        assert_eq!(o.taxonomy.len(), 1);
    }

    #[test]
    fn unresolved_local_reference() {
        let text = format!("{HEAD}term \"A\" own\nrel \"r\" from \"A\" [*] to \"Missing\" [*]\n");
        let f = parse_ontologies(&text).unwrap_err();
        assert_eq!(f.codes(), vec!["UNRESOLVED_REFERENCE"]);
        assert_eq!(f.diagnostics[0].span.line, 3);
    }

    #[test]
    fn qualified_references_are_left_to_the_workspace() {
        let text = format!("{HEAD}term \"A\" own stereotype Up.\"Whatever\"\n");
        assert!(parse_ontology(&text).is_ok());
    }

    #[test]
    fn malformed_multiplicity() {
        let text = format!("{HEAD}term \"A\" own\nrel \"r\" from \"A\" [3..2] to \"A\" [*]\n");
        assert_eq!(codes(&text), vec!["MALFORMED_MULTIPLICITY"]);
    }

    #[test]
    fn reused_term_requires_a_source() {
        let text = format!("{HEAD}term \"A\" reused\n");
        assert_eq!(codes(&text), vec!["MISSING_REUSE_SOURCE"]);
    }

    #[test]
    fn recovery_reports_each_broken_line() {
        let text = format!("{HEAD}term \"A\" bogus\nterm \"B\" own\nisa \"B\" \"A\"\nterm \"B\" own\n");
        assert_eq!(codes(&text), vec!["SYNTAX_ERROR", "SYNTAX_ERROR", "DUPLICATE_TERM"]);
    }

    #[test]
    fn two_declarations_on_one_line_are_rejected() {
        let text = format!("{HEAD}term \"A\" own term \"B\" own\n");
        assert_eq!(codes(&text), vec!["SYNTAX_ERROR"]);
    }

    #[test]
    fn axiom_variable_scoping() {
        let base = format!("{HEAD}term \"A\" own\nrel \"r\" from \"A\" [*] to \"A\" [*]\n");
        let undeclared = format!("{base}axiom X forall a : \"A\" : \"r\"(a, b) -> \"r\"(b, a)\n");
        assert_eq!(codes(&undeclared), vec!["UNDECLARED_VARIABLE", "UNDECLARED_VARIABLE"]);
        let dup = format!("{base}axiom X forall a : \"A\", a : \"A\" : \"r\"(a, a) -> \"r\"(a, a)\n");
        assert_eq!(codes(&dup), vec!["DUPLICATE_VARIABLE"]);
        let exists_escapes = format!(
            "{base}axiom X forall a : \"A\" : \"r\"(a, a) -> exists w : \"A\" : \"r\"(a, w) & \"r\"(w, a)\n"
        );
        assert!(parse_ontologies(&exists_escapes).is_ok());
        let twice = format!(
            "{base}axiom X forall a : \"A\" : \"r\"(a, a) -> \"r\"(a, a)\naxiom X forall a : \"A\" : \"r\"(a, a) -> \"r\"(a, a)\n"
        );
        assert_eq!(codes(&twice), vec!["DUPLICATE_AXIOM"]);
    }

    #[test]
    fn relationships_are_identified_by_name_and_endpoints() {
        let base = format!("{HEAD}term \"A\" own\nterm \"B\" own synonyms \"Bee\"\n");
        let ok = format!("{base}rel \"r\" from \"A\" [*] to \"A\" [*]\nrel \"r\" from \"B\" [*] to \"B\" [*]\n");
        assert_eq!(parse_ontology(&ok).unwrap().value.relationships.len(), 2);
        let dup = format!("{base}rel \"r\" from \"B\" [*] to \"A\" [*]\nrel \"r\" from \"Bee\" [1] to \"A\" [1]\n");
        assert_eq!(codes(&dup), vec!["DUPLICATE_RELATIONSHIP"]);
    }

    #[test]
    fn bundled_situation_ontology() {
        let parsed = parse_ontologies(crate::corpus::SITUATION_CO).unwrap();
        assert!(parsed.warnings.is_empty());
        let names: Vec<_> = parsed.value.iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["SituationCO", "ProcessCO", "ProjectCO", "GoalCO", "PEventCO"]);
        let o = &parsed.value[0];
        assert_eq!(o.relationships.len(), 21);
        assert_eq!(o.axioms.len(), 3);
        let influences = &o.relationships[19];
        assert_eq!(influences.name, "influences");
        assert_eq!(influences.source_mult(), Multiplicity::MANY);
        assert_eq!(o.spans.get(DeclKind::Relationship, 0).unwrap().line, 72);
    }

    #[test]
    fn power_of_qualifier_is_kept_on_the_endpoint() {
        let o = parse_ontology(crate::corpus::THING_FO).unwrap().value;
        let r = o.relationships.iter().find(|r| r.name == "interacts with other").unwrap();
        assert_eq!(r.source.qualifier.as_deref(), Some("(Power of)"));
        assert_eq!(r.target.qualifier, None);
    }
}
