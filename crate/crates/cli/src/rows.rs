//! Output tables: deterministic CSV and JSON renderings of sweep rows.

use std::fmt::Write as _;

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Float(f64),
    MaybeFloat(Option<f64>),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn write_csv(&self, out: &mut String) {
        match self {
            Cell::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Float(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::MaybeFloat(Some(v)) => {
                let _ = write!(out, "{v}");
            }
            Cell::MaybeFloat(None) => {}
            Cell::Text(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Bool(v) => {
                let _ = write!(out, "{v}");
            }
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::json!(v),
            Cell::Float(v) => serde_json::json!(v),
            Cell::MaybeFloat(v) => serde_json::json!(v),
            Cell::Text(v) => serde_json::json!(v),
            Cell::Bool(v) => serde_json::json!(v),
        }
    }
}

/// One output row; `valid` feeds the all-rows-invalid exit code and
/// `explain` the `--explain` channel.
#[derive(Debug, Clone)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub valid: bool,
    pub explain: String,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>, valid: bool, explain: String) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(Row {
            cells,
            valid,
            explain,
        });
    }

    pub fn all_invalid(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| !r.valid)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.cells.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.cells.iter().map(Cell::to_json))
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&records).expect("json rows serialize");
        text.push('\n');
        text
    }

    /// Per-row `--explain` lines: formula identifier plus the domain
    /// condition that was checked.
    pub fn explain_lines(&self) -> Vec<String> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| format!("# row {i}: {}", r.explain))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut t = Table::new(&["m", "value"]);
        t.push(vec![Cell::Int(2), Cell::Float(0.5)], true, "x".into());
        t.push(vec![Cell::Int(3), Cell::MaybeFloat(None)], false, "y".into());
        assert_eq!(t.to_csv(), "m,value\n2,0.5\n3,\n");
        assert!(!t.all_invalid());
    }

    #[test]
    fn json_mirrors_columns() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Bool(true), Cell::Text("hey".into())], true, String::new());
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["a"], serde_json::json!(true));
        assert_eq!(v[0]["b"], serde_json::json!("hey"));
    }
}
