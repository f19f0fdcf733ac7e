use std::collections::BTreeMap;

use super::lexer::Tok;
use super::{finish, Cursor, PResult, ParseFailure, Parsed};
use crate::model::DeclKind;
use crate::refinement::{RefinementMap, RelSelector};

fn is_decl_start(t: &Tok, _next: &Tok) -> bool {
    matches!(t, Tok::Str(_)) || matches!(t, Tok::Ident(s) if s == "refine")
}

/// Parses a `.refmap` file: a `refine <Lower> onto <Upper>` header followed
/// by one `"lower" -> "upper"` row per line. Either side may be narrowed
/// with `from "Source" to "Target"`.
///
/// ```
/// let text = "refine SituationCO onto ThingFO\n\"conceives\" -> \"defines\"\n";
/// let map = ontoarch::syntax::parse_refinement_map(text).unwrap().value;
/// assert_eq!(map.rows.len(), 1);
/// ```
pub fn parse_refinement_map(text: &str) -> Result<Parsed<RefinementMap>, ParseFailure> {
    let mut c = Cursor::new(text);
    let mut map: Option<RefinementMap> = None;
    let mut first_span = BTreeMap::new();

    if c.at_eof() {
        let _ = c.fail::<()>("'refine' header");
    }
    while !c.at_eof() {
        let r = if c.at_keyword("refine") {
            if map.is_some() {
                let span = c.peek().span.clone();
                c.error("SYNTAX_ERROR", "a file holds a single refinement map", span);
                Err(super::Stop)
            } else {
                header(&mut c).map(|m| map = Some(m))
            }
        } else if let Some(m) = map.as_mut() {
            row(&mut c, m, &mut first_span)
        } else {
            c.fail("'refine' header")
        };
        if r.and_then(|_| c.end_decl()).is_err() {
            c.recover(is_decl_start);
        }
    }
    finish(map.unwrap_or_else(|| RefinementMap::new("", "")), c.diags)
}

fn header(c: &mut Cursor) -> PResult<RefinementMap> {
    let start = c.bump().span;
    let (lower, _) = c.expect_ident("lower ontology name")?;
    c.expect_keyword("onto")?;
    let (upper, _) = c.expect_ident("upper ontology name")?;
    let mut m = RefinementMap::new(lower, upper);
    m.spans.insert(DeclKind::Header, 0, start);
    Ok(m)
}

fn selector(c: &mut Cursor) -> PResult<RelSelector> {
    let (name, _) = c.expect_str("relationship name")?;
    if c.eat_keyword("from") {
        let (s, _) = c.expect_str("source term")?;
        c.expect_keyword("to")?;
        let (t, _) = c.expect_str("target term")?;
        Ok(RelSelector::between(name, s, t))
    } else {
        Ok(RelSelector::named(name))
    }
}

fn row(c: &mut Cursor, m: &mut RefinementMap, first_span: &mut BTreeMap<RelSelector, usize>) -> PResult<()> {
    let start = c.peek().span.clone();
    let lower = selector(c)?;
    c.expect(Tok::Arrow)?;
    let upper = selector(c)?;
    if let Some(line) = first_span.get(&lower) {
        c.error(
            "DUPLICATE_MAPPING",
            format!("\"{lower}\" is already mapped on line {line}"),
            start,
        );
        return Ok(());
    }
    first_span.insert(lower.clone(), start.line);
    m.spans.insert(DeclKind::Row, m.rows.len(), start);
    m.push(lower, upper);
    Ok(())
}
