//! Column-oriented numeric tables written as CSV with `#` comment headers.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("row has {got} values, table has {expected} columns")]
    RowLength { expected: usize, got: usize },
    #[error("column `{0}` not found")]
    ColumnMissing(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Unit string, `"1"` for dimensionless columns.
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self { name: name.to_string(), unit: unit.to_string() }
    }
}

/// A rectangular table of `f64` plus `key: value` metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub config_hash: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Extra header lines, written after the units line.
    pub notes: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(experiment: &str, config_hash: &str, columns: Vec<Column>) -> Self {
        Self {
            experiment: experiment.to_string(),
            config_hash: config_hash.to_string(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), TableError> {
        if row.len() != self.columns.len() {
            return Err(TableError::RowLength { expected: self.columns.len(), got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.columns.iter().position(|c| c.name == name).ok_or_else(|| TableError::ColumnMissing(name.into()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, TableError> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV text. Values use the shortest representation that parses back to
    /// the same `f64`; non-finite values are written as `nan`, `inf`, `-inf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# experiment: {}", self.experiment);
        let _ = writeln!(s, "# config_hash: {}", self.config_hash);
        let units: Vec<String> = self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
        let _ = writeln!(s, "# units: {}", units.join(", "));
        for (k, v) in &self.notes {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let _ = writeln!(s, "{}", names.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        let _ = writeln!(s, "# generated_by: {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# config_hash: {}", self.config_hash);
        s
    }
}

pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

/// Reads back the numeric body of [`ResultTable::to_csv`], skipping comments.
pub fn parse_csv_body(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), TableError> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<String> = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines {
        let row: Vec<f64> = line.split(',').map(|c| c.trim().parse().unwrap_or(f64::NAN)).collect();
        if row.len() != header.len() {
            return Err(TableError::RowLength { expected: header.len(), got: row.len() });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let mut t = ResultTable::new("demo", "abc123", vec![Column::new("f", "Hz"), Column::new("p", "W")]);
        t.push_row(vec![1e6, 1.4996e-16]).unwrap();
        t.push_row(vec![0.1 + 0.2, f64::NAN]).unwrap();
        t
    }

    #[test]
    fn header_and_footer() {
        let csv = table().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment: demo");
        assert_eq!(lines[1], "# config_hash: abc123");
        assert_eq!(lines[2], "# units: f [Hz], p [W]");
        assert_eq!(lines[3], "f,p");
        assert!(lines.last().unwrap().contains("abc123"));
    }

    #[test]
    fn values_round_trip() {
        let t = table();
        let (h, rows) = parse_csv_body(&t.to_csv()).unwrap();
        assert_eq!(h, vec!["f", "p"]);
        assert_eq!(rows[1][0].to_bits(), (0.1f64 + 0.2).to_bits());
        assert!(rows[1][1].is_nan());
    }

    #[test]
    fn row_length_checked() {
        let mut t = table();
        assert_eq!(t.push_row(vec![1.0]), Err(TableError::RowLength { expected: 2, got: 1 }));
        assert!(matches!(t.column("q"), Err(TableError::ColumnMissing(_))));
    }
}
