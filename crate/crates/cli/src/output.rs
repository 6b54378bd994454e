use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};

use crate::args::{Format, OutputArgs};
use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// JSON number with the same digits as [`num`]; null when not finite.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            num(x)
                .parse::<Number>()
                .expect("formatted float is a JSON number"),
        )
    } else {
        Value::Null
    }
}

pub fn jopt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, jnum)
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => jnum(*x),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Rows under a fixed header plus scalar metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Table {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(self.meta.clone()));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    /// Writes the table in the requested format. CSV goes with a JSON
    /// sidecar holding the metadata.
    pub fn emit(&self, out: &OutputArgs) -> CliResult<()> {
        match out.format {
            Format::Json => {
                let mut text =
                    serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
                text.push('\n');
                write_to(out.out.as_deref(), text.as_bytes())
            }
            Format::Csv => {
                write_to(out.out.as_deref(), &self.to_csv())?;
                let mut meta = serde_json::to_string_pretty(&Value::Object(self.meta.clone()))
                    .expect("JSON values serialize");
                meta.push('\n');
                match &out.out {
                    Some(path) => write_file(&sidecar_path(path), meta.as_bytes()),
                    None => {
                        let _ = io::stderr().write_all(meta.as_bytes());
                        Ok(())
                    }
                }
            }
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)
                .and_then(|_| lock.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.023), "2.3000000000000000e-2");
        assert_eq!(jnum(f64::NAN), Value::Null);
        assert_eq!(jnum(0.5).to_string(), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![Cell::Num(1.0), Cell::Empty, Cell::Text("x,y".into())]);
        let text = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(text, "a,b,c\n1.0000000000000000e0,,\"x,y\"\n");
    }

    #[test]
    fn sidecar_appends_extension() {
        assert_eq!(
            sidecar_path(Path::new("out/fig.csv")),
            PathBuf::from("out/fig.csv.json")
        );
    }
}
