//! CSV emission shared by every subcommand: header row, 12 significant
//! digits in scientific notation, LF line endings, and an optional
//! `# config: {...}` provenance line carrying the resolved configuration.

use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sci(*x),
            Cell::Int(i) => i.to_string(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Cell::Num(x) => *x,
            Cell::Int(i) => *i as f64,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

/// `1.23456789012e-3` style; 12 significant digits.
pub fn format_sci(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0.00000000000e0"
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    /// Appends the rows of `other`, which must have the same header.
    pub fn extend(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns, "cannot merge tables with different headers");
        self.rows.extend(other.rows);
    }

    pub fn write<W: Write>(&self, out: W, provenance: Option<&impl Serialize>) -> std::io::Result<()> {
        let mut out = out;
        if let Some(cfg) = provenance {
            let json = serde_json::to_string(cfg).map_err(std::io::Error::other)?;
            writeln!(out, "# config: {json}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, provenance: Option<&impl Serialize>) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, provenance).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Drops `#` comment lines; what remains is the deterministic CSV body.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
