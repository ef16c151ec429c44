use serde::Serialize;

use super::Granularity;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub granularity: Granularity,
    pub features: String,
    /// Fractions in `[0, 1]`, one per column.
    pub values: Vec<f64>,
}

/// Accuracy grid: one column per weighting scheme, rows grouped by granularity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyTable {
    pub columns: Vec<String>,
    pub rows: Vec<AccuracyRow>,
}

pub(crate) fn percent(v: f64) -> String {
    format!("{:.1}", v * 100.0)
}

pub(crate) fn render_grid(header: &[String], body: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join(" | ")
    };
    let mut out = line(header);
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for row in body {
        debug_assert_eq!(row.len(), cols);
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// Plain-text rendering with accuracies in percent to one decimal.
pub fn render_accuracy_table(table: &AccuracyTable) -> String {
    let mut header = vec!["Features".to_string()];
    header.extend(table.columns.iter().cloned());
    let mut out = String::new();
    let mut groups: Vec<Granularity> = Vec::new();
    for row in &table.rows {
        if !groups.contains(&row.granularity) {
            groups.push(row.granularity);
        }
    }
    for g in groups {
        out.push_str(&format!("[{}]\n", g.name()));
        let body: Vec<Vec<String>> = table
            .rows
            .iter()
            .filter(|r| r.granularity == g)
            .map(|r| {
                let mut cells = vec![r.features.clone()];
                cells.extend(r.values.iter().map(|v| percent(*v)));
                cells
            })
            .collect();
        out.push_str(&render_grid(&header, &body));
    }
    out
}
