use std::fmt::Write as _;
use std::str::FromStr;

use crate::refinement::{MatrixReport, MatrixSide};
use crate::report::{Report, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format `{other}` (expected json, csv or table)")),
        }
    }
}

/// Reports that [`serialize_report`] knows how to print.
pub trait Renderable {
    fn json(&self) -> String;
    fn csv(&self) -> String;
    fn table(&self) -> String;
}

/// Renders a diagnostic report or a refinement matrix.
///
/// JSON is the machine format with a fixed key order. CSV and table forms
/// put one row per line.
///
/// ```
/// use ontoarch::report::Report;
/// use ontoarch::syntax::{serialize_report, Format};
///
/// let empty = Report::new(Vec::new());
/// assert_eq!(serialize_report(&empty, Format::Json), r#"{"diagnostics":[],"status":"pass"}"#);
/// ```
pub fn serialize_report<R: Renderable + ?Sized>(report: &R, format: Format) -> String {
    match format {
        Format::Json => report.json(),
        Format::Csv => report.csv(),
        Format::Table => report.table(),
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

/// Left-aligned columns separated by two spaces, trailing blanks trimmed.
fn columns(rows: &[Vec<String>]) -> String {
    let n = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..n)
        .map(|i| {
            rows.iter()
                .filter_map(|r| r.get(i))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (i, cell) in r.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            let pad = widths[i] - cell.chars().count();
            line.extend(std::iter::repeat_n(' ', pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn severity(s: Severity) -> &'static str {
    match s {
        Severity::Error => "error",
        Severity::Warning => "warning",
    }
}

impl Renderable for Report {
    fn json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    fn csv(&self) -> String {
        csv_text(
            &["code", "severity", "subjects", "message", "witness"],
            self.diagnostics.iter().map(|d| {
                vec![
                    d.code.clone(),
                    severity(d.severity).into(),
                    d.subjects.join(" "),
                    d.message.clone(),
                    d.witness.as_ref().map(ToString::to_string).unwrap_or_default(),
                ]
            }),
        )
    }

    fn table(&self) -> String {
        let mut rows = vec![vec!["code".to_string(), "subjects".into(), "message".into()]];
        for d in &self.diagnostics {
            rows.push(vec![d.code.clone(), d.subjects.join(" "), d.message.clone()]);
        }
        let mut out = columns(&rows);
        writeln!(out, "status: {} ({} diagnostics)", self.status().as_str(), self.diagnostics.len()).unwrap();
        out
    }
}

fn side_cells(s: &MatrixSide) -> [String; 5] {
    [
        s.source_card.to_string(),
        s.source.clone(),
        s.relationship.clone(),
        s.target_card.to_string(),
        s.target.clone(),
    ]
}

impl Renderable for MatrixReport {
    fn json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    fn csv(&self) -> String {
        csv_text(
            &[
                "lower_source_card",
                "lower_source",
                "lower_relationship",
                "lower_target_card",
                "lower_target",
                "upper_source_card",
                "upper_source",
                "upper_relationship",
                "upper_target_card",
                "upper_target",
                "verdict",
            ],
            self.rows.iter().map(|r| {
                let mut cells: Vec<String> = side_cells(&r.lower).into();
                cells.extend(side_cells(&r.upper));
                cells.push(r.verdict().as_str().into());
                cells
            }),
        )
    }

    /// Header plus one line per row, in the matrix column order; a trailing
    /// line lists unmapped lower relationships when there are any.
    fn table(&self) -> String {
        let header = ["card", "Term 1", "relationship", "card", "Term 2"];
        let mut head: Vec<String> = header.iter().map(|h| format!("lower {h}")).collect();
        head.extend(header.iter().map(|h| format!("upper {h}")));
        head.push("verdict".into());
        let mut rows = vec![head];
        for r in &self.rows {
            let mut cells: Vec<String> = side_cells(&r.lower).into();
            cells.extend(side_cells(&r.upper));
            cells.push(r.verdict().as_str().into());
            rows.push(cells);
        }
        let mut out = columns(&rows);
        if !self.unmapped_lower.is_empty() {
            let names: Vec<String> = self.unmapped_lower.iter().map(ToString::to_string).collect();
            writeln!(out, "unmapped: {}", names.join(", ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axiom::Witness;
    use crate::refinement::{verify_refinement, Mode};
    use crate::report::Diagnostic;

    #[test]
    fn one_axiom_violation_as_json() {
        let d = Diagnostic::error("AXIOM_A1", vec!["ps1".into(), "te1".into()], "A1 violated")
            .with_witness(Witness::new([("ps", "ps1"), ("thing", "te1")]));
        let json: serde_json::Value = serde_json::from_str(&serialize_report(&Report::new(vec![d]), Format::Json)).unwrap();
        assert_eq!(json["status"], "fail");
        assert_eq!(json["diagnostics"].as_array().unwrap().len(), 1);
        assert_eq!(json["diagnostics"][0]["code"], "AXIOM_A1");
        assert_eq!(json["diagnostics"][0]["witness"]["thing"], "te1");
        assert_eq!(json["diagnostics"][0]["severity"], "error");
    }

    #[test]
    fn diagnostic_keys_are_in_fixed_order() {
        let d = Diagnostic::error("MULT_MIN", vec!["ps1".into()], "m");
        let text = serialize_report(&Report::new(vec![d]), Format::Json);
        assert_eq!(
            text,
            r#"{"diagnostics":[{"code":"MULT_MIN","message":"m","severity":"error","subjects":["ps1"]}],"status":"fail"}"#
        );
    }

    #[test]
    fn matrix_layouts() {
        let ws = crate::corpus::load_workspace();
        let report = verify_refinement(&crate::corpus::refinement_map(), &ws, Mode::Default).unwrap();

        let table = serialize_report(&report, Format::Table);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 22);
        assert!(lines[0].starts_with("lower card  lower Term 1"));
        let works: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(works[0], "1..*");
        assert_eq!(*works.last().unwrap(), "pass");

        let csv = serialize_report(&report, Format::Csv);
        assert_eq!(csv.lines().count(), 22);
        assert_eq!(
            csv.lines().nth(20).unwrap(),
            "*,Context Entity,influences,*,Target Entity,1..*,Thing,interacts with other,1..*,Thing,pass"
        );
    }

    #[test]
    fn unmapped_relationships_get_a_trailing_table_line() {
        let ws = crate::corpus::load_workspace();
        let mut map = crate::corpus::refinement_map();
        map.rows.truncate(19);
        let report = verify_refinement(&map, &ws, Mode::Default).unwrap();
        let table = serialize_report(&report, Format::Table);
        assert_eq!(table.lines().last().unwrap(), "unmapped: influences, pertains to");
    }
}
