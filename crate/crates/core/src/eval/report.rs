use std::fmt::Write as _;

use super::Metrics;

/// `accuracy` then `sensitivity[c]`, `specificity[c]` per class.
pub fn metric_header(class_names: &[String]) -> Vec<String> {
    let mut h = vec!["accuracy".to_string()];
    for c in class_names {
        h.push(format!("sensitivity[{c}]"));
        h.push(format!("specificity[{c}]"));
    }
    h
}

/// Cells matching [`metric_header`], four decimals.
pub fn metric_cells(m: &Metrics) -> Vec<String> {
    let mut v = vec![format!("{:.4}", m.accuracy)];
    for pc in &m.per_class {
        v.push(format!("{:.4}", pc.sensitivity));
        v.push(format!("{:.4}", pc.specificity));
    }
    v
}

/// Column-aligned plain text; first column left-aligned, the rest right.
pub fn text_table(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|j| {
            rows.iter()
                .filter_map(|r| r.get(j).map(String::len))
                .chain([header[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, &w))| if j == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

/// Comma-separated rows, quoting cells that need it.
pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for line in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let cells: Vec<String> = line.iter().map(|c| csv_escape(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
