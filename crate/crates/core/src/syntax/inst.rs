use std::collections::{BTreeMap, BTreeSet};

use super::lexer::Tok;
use super::{finish, Cursor, PResult, ParseFailure, Parsed};
use crate::instance::{InstanceLink, InstanceModel, InstanceNode};
use crate::model::DeclKind;
use crate::span::SourceSpan;

fn is_decl_start(t: &Tok, _next: &Tok) -> bool {
    matches!(t, Tok::Ident(_))
}

/// Parses a `.inst` file.
///
/// Links may mention nodes declared further down. Term names are not
/// checked here; that happens when the model is validated against its
/// ontology.
///
/// ```
/// let text = r#"
/// model tiny conforms SituationCO
/// ps1 : "Particular Situation"
/// te1 : "Target Entity"
/// link "deals with target" ps1 -> te1
/// "#;
/// let m = ontoarch::syntax::parse_instance_model(text).unwrap().value;
/// assert_eq!((m.nodes.len(), m.links.len()), (2, 1));
/// ```
pub fn parse_instance_model(text: &str) -> Result<Parsed<InstanceModel>, ParseFailure> {
    let mut c = Cursor::new(text);
    let mut model: Option<InstanceModel> = None;
    let mut endpoints: Vec<[(String, SourceSpan); 2]> = Vec::new();
    let mut seen_links = BTreeSet::new();

    if c.at_eof() {
        let _ = c.fail::<()>("'model' header");
    }
    while !c.at_eof() {
        let r = match (&c.peek().tok, c.peek_tok(1)) {
            (Tok::Ident(kw), Tok::Ident(_)) if kw == "model" => {
                if model.is_some() {
                    let span = c.peek().span.clone();
                    c.error("SYNTAX_ERROR", "a file holds a single model", span);
                    Err(super::Stop)
                } else {
                    header(&mut c).map(|m| model = Some(m))
                }
            }
            _ => match model.as_mut() {
                None => c.fail("'model' header"),
                Some(m) => decl(&mut c, m, &mut endpoints, &mut seen_links),
            },
        };
        if r.and_then(|_| c.end_decl()).is_err() {
            c.recover(is_decl_start);
        }
    }

    let Some(model) = model else {
        return finish(InstanceModel::default(), c.diags);
    };
    let declared: BTreeSet<&str> = model.nodes.iter().map(|n| n.id.as_str()).collect();
    for (id, span) in endpoints.iter().flatten() {
        if !declared.contains(id.as_str()) {
            c.error("UNDECLARED_NODE", format!("node `{id}` is never declared"), span.clone());
        }
    }
    finish(model, c.diags)
}

fn header(c: &mut Cursor) -> PResult<InstanceModel> {
    let start = c.bump().span;
    let (name, _) = c.expect_ident("model name")?;
    c.expect_keyword("conforms")?;
    let (onto, _) = c.expect_ident("ontology name")?;
    let mut m = InstanceModel::new(name, onto);
    m.spans.insert(DeclKind::Header, 0, start);
    Ok(m)
}

fn decl(
    c: &mut Cursor,
    m: &mut InstanceModel,
    endpoints: &mut Vec<[(String, SourceSpan); 2]>,
    seen_links: &mut BTreeSet<InstanceLink>,
) -> PResult<()> {
    let start = c.peek().span.clone();
    if c.at_keyword("link") && matches!(c.peek_tok(1), Tok::Str(_)) {
        c.bump();
        let (rel, _) = c.expect_str("relationship name")?;
        let source = c.expect_ident("source node id")?;
        c.expect(Tok::Arrow)?;
        let target = c.expect_ident("target node id")?;
        let link = InstanceLink::new(rel, &source.0, &target.0);
        if !seen_links.insert(link.clone()) {
            c.warn(
                "DUPLICATE_LINK",
                format!("link \"{}\" {} -> {} repeats an earlier one", link.relationship, link.source, link.target),
                start,
            );
            return Ok(());
        }
        endpoints.push([source, target]);
        m.spans.insert(DeclKind::Link, m.links.len(), start);
        m.links.push(link);
        return Ok(());
    }

    let (id, id_span) = c.expect_ident("node declaration `id : \"Term\"` or `link`")?;
    c.expect(Tok::Colon)?;
    let mut terms = vec![c.expect_str("term name")?.0];
    while c.eat(&Tok::Comma) {
        terms.push(c.expect_str("term name")?.0);
    }
    if m.node(&id).is_some() {
        c.error("DUPLICATE_NODE", format!("node `{id}` is already declared"), id_span);
        return Ok(());
    }
    let mut unique = BTreeMap::new();
    for (i, t) in terms.into_iter().enumerate() {
        unique.entry(t).or_insert(i);
    }
    let mut terms: Vec<(String, usize)> = unique.into_iter().collect();
    terms.sort_by_key(|(_, i)| *i);
    m.spans.insert(DeclKind::Node, m.nodes.len(), start);
    m.nodes.push(InstanceNode {
        id,
        asserted_terms: terms.into_iter().map(|(t, _)| t).collect(),
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "model m conforms SituationCO\n";

    #[test]
    fn minimal_model() {
        let text = format!("{HEAD}ps1 : \"Particular Situation\"\nte1 : \"Target Entity\"\nlink \"deals with target\" ps1 -> te1\n");
        let m = parse_instance_model(&text).unwrap().value;
        assert_eq!(m.nodes.len(), 2);
        assert_eq!(m.links, vec![InstanceLink::new("deals with target", "ps1", "te1")]);
        assert_eq!(m.conforms_to, "SituationCO");
    }

    #[test]
    fn dangling_link_endpoint() {
        let text = format!("{HEAD}ps1 : \"Particular Situation\"\nlink \"deals with target\" ps1 -> zz9\n");
        let f = parse_instance_model(&text).unwrap_err();
        assert_eq!(f.codes(), vec!["UNDECLARED_NODE"]);
        let d = &f.diagnostics[0];
        assert_eq!((d.span.line, d.span.column), (3, 33));
        assert_eq!(&text[d.span.offset..d.span.offset + d.span.length], "zz9");
    }

    #[test]
    fn multiple_classification_and_keyword_like_ids() {
        let text = format!("{HEAD}link : \"Target Entity\", \"Space Entity\"\nmodel : \"Situation\"\n");
        let m = parse_instance_model(&text).unwrap().value;
        assert_eq!(m.nodes[0].id, "link");
        assert_eq!(m.nodes[0].asserted_terms, vec!["Target Entity", "Space Entity"]);
        assert_eq!(m.nodes[1].id, "model");
    }

    #[test]
    fn duplicates() {
        let text = format!("{HEAD}a : \"Situation\"\na : \"Situation\"\n");
        assert_eq!(parse_instance_model(&text).unwrap_err().codes(), vec!["DUPLICATE_NODE"]);

        let text = format!("{HEAD}a : \"Situation\"\nlink \"relates\" a -> a\nlink \"relates\" a -> a\n");
        let p = parse_instance_model(&text).unwrap();
        assert_eq!(p.value.links.len(), 1);
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.warnings[0].code, "DUPLICATE_LINK");
    }

    #[test]
    fn missing_header() {
        assert_eq!(parse_instance_model("").unwrap_err().codes(), vec!["SYNTAX_ERROR"]);
        let f = parse_instance_model("a : \"Situation\"\n").unwrap_err();
        assert!(f.diagnostics[0].message.contains("'model' header"));
    }

    #[test]
    fn bundled_scenario_has_seven_nodes() {
        let m = parse_instance_model(crate::corpus::SCENARIO).unwrap().value;
        assert_eq!(m.nodes.len(), 7);
        let terms: Vec<&str> = m.nodes.iter().map(|n| n.asserted_terms[0].as_str()).collect();
        assert_eq!(
            terms.iter().filter(|t| ["Space Entity", "Time Entity"].contains(t)).count(),
            2
        );
    }
}
