//! Rendering of result tables as CSV or JSON.
//!
//! Both formats are built for diffing: floats always print with 17
//! significant digits in scientific notation, rationals print as
//! `p/q`, and column order is fixed by the command that produced the
//! table, so identical runs emit identical bytes.

use bernwf::Rational;

/// One table cell. `Empty` renders as an empty CSV field and a JSON
/// null.
#[derive(Debug, Clone)]
pub enum Cell {
    Str(String),
    Float(f64),
    Int(u64),
    Rat(Rational),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    pub fn opt_int(v: Option<u64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Int)
    }

    pub fn opt_bool(v: Option<bool>) -> Cell {
        v.map_or(Cell::Empty, Cell::Bool)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| csv_escape(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| csv_escape(&csv_value(c))).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            out.push_str("  {");
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&json_string(name));
                out.push_str(": ");
                out.push_str(&json_value(cell));
            }
            out.push('}');
        }
        out.push_str("\n]\n");
        out
    }

    /// Render one row alone, for reporting bound violations on stderr.
    pub fn csv_row(&self, index: usize) -> String {
        let fields: Vec<String> = self.rows[index]
            .iter()
            .map(|c| csv_escape(&csv_value(c)))
            .collect();
        fields.join(",")
    }
}

/// Output format of every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn float_repr(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_value(cell: &Cell) -> String {
    match cell {
        Cell::Str(s) => s.clone(),
        Cell::Float(v) => float_repr(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Rat(r) => r.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_value(cell: &Cell) -> String {
    match cell {
        Cell::Str(s) => json_string(s),
        Cell::Float(v) => float_repr(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Rat(r) => json_string(&r.to_string()),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => "null".to_string(),
    }
}
