//! Deterministic table output: CSV with `.` decimals, LF line endings and
//! 12 significant digits, or the same table as a JSON document.

use crate::config::OutputFormat;

/// Format a float to at most 12 significant digits, shortest form.
/// Locale-independent and byte-stable across runs.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.11e}", x).parse().expect("rounding round-trip");
    format!("{rounded}")
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let doc = serde_json::json!({
                    "columns": self.columns,
                    "rows": self.rows,
                });
                let mut out = serde_json::to_string_pretty(&doc).expect("table to JSON");
                out.push('\n');
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_is_stable_and_short() {
        assert_eq!(sig12(8.0), "8");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(1e-3), "0.001");
        // 12 significant digits survive the round trip
        let x = 123.456789012345;
        assert_eq!(sig12(x), "123.456789012");
    }

    #[test]
    fn csv_uses_lf_only() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        let s = t.render(OutputFormat::Csv);
        assert_eq!(s, "a,b\n1,2\n");
        assert!(!s.contains('\r'));
    }
}
