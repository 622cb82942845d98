//! Plain-text metric tables.

use crate::formats::ScoreReport;

const COLUMNS: [&str; 5] = ["BLEU-4", "R-1", "R-2", "R-1-n", "R-2-n"];

/// Renders one aligned table with a row per report, in input order.
pub fn render_table(reports: &[ScoreReport]) -> String {
    let label_width = reports
        .iter()
        .map(|r| r.method.len())
        .chain(std::iter::once("Method".len()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{:<label_width$}", "Method"));
    for column in COLUMNS {
        out.push_str(&format!("{column:>9}"));
    }
    out.push('\n');
    for report in reports {
        let m = &report.metrics;
        out.push_str(&format!("{:<label_width$}", report.method));
        for value in [m.bleu4, m.rouge1_f1, m.rouge2_f1, m.rouge1_norm, m.rouge2_norm] {
            out.push_str(&format!("{value:>9.3}"));
        }
        out.push('\n');
    }
    out
}
