use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use indexmap::IndexSet;

use super::Dataset;
use crate::error::{Error, Result};

/// Which input column (if any) holds the ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Last,
}

impl LabelColumn {
    fn resolve(self, width: usize) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if i < width => Ok(i),
            LabelColumn::Index(i) => Err(Error::LabelColumnOutOfRange { column: i, width }),
            LabelColumn::Last if width > 0 => Ok(width - 1),
            LabelColumn::Last => Err(Error::EmptyInput),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
    /// Every occurrence of this token (or an empty field) within one
    /// attribute maps to the same extra category of that attribute.
    pub missing_token: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            label_column: None,
            missing_token: "?".to_owned(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    pub labels: Option<Vec<String>>,
}

impl Loaded {
    /// Ground-truth labels encoded as dense indices.
    pub fn label_indices(&self) -> Option<Vec<usize>> {
        self.labels.as_deref().map(|l| encode_labels(l).0)
    }
}

/// Reads a delimited file of categorical tokens.
pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_categorical(file, path, options)
}

pub(crate) fn read_categorical<R: Read>(reader: R, path: &Path, options: &LoadOptions) -> Result<Loaded> {
    let table = read_table(reader, path, options)?;
    let label_idx = match options.label_column {
        Some(col) => Some(col.resolve(table.width)?),
        None => None,
    };
    let mut labels = label_idx.map(|_| Vec::with_capacity(table.rows.len()));
    let mut attributes = Vec::with_capacity(table.rows.len());
    for row in table.rows {
        let mut attrs = Vec::with_capacity(row.len());
        for (i, field) in row.into_iter().enumerate() {
            if Some(i) == label_idx {
                if let Some(l) = labels.as_mut() {
                    l.push(field);
                }
                continue;
            }
            attrs.push(normalize_missing(field, &options.missing_token));
        }
        attributes.push(attrs);
    }
    if attributes[0].is_empty() {
        return Err(Error::Format {
            path: path.to_owned(),
            row: 1,
            message: "no attribute columns besides the label".to_owned(),
        });
    }
    let dataset = Dataset::from_tokens(&attributes)?;
    Ok(Loaded { dataset, labels })
}

// Empty fields count as missing too.
fn normalize_missing(field: String, missing: &str) -> String {
    if field.is_empty() {
        missing.to_owned()
    } else {
        field
    }
}

struct Table {
    width: usize,
    rows: Vec<Vec<String>>,
}

fn read_table<R: Read>(reader: R, path: &Path, options: &LoadOptions) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut width = None;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Format {
                    path: path.to_owned(),
                    row: line,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
            Some(_) => {}
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    match width {
        Some(width) if !rows.is_empty() => Ok(Table { width, rows }),
        _ => Err(Error::EmptyInput),
    }
}

/// Reads one label per line; blank lines are skipped.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut labels = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if !line.is_empty() {
            labels.push(line.to_owned());
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(labels)
}

/// Maps labels to dense indices in first-appearance order. Returns the
/// indices and the distinct labels.
pub fn encode_labels<S: AsRef<str>>(labels: &[S]) -> (Vec<usize>, Vec<String>) {
    let mut seen = IndexSet::new();
    let codes = labels
        .iter()
        .map(|l| seen.insert_full(l.as_ref().to_owned()).0)
        .collect();
    (codes, seen.into_iter().collect())
}

/// Real-valued table with an optional label column, input to discretization.
#[derive(Debug, Clone)]
pub struct NumericTable {
    /// Column-major: `columns[m][n]`.
    pub columns: Vec<Vec<f64>>,
    pub labels: Option<Vec<String>>,
}

impl NumericTable {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

pub fn load_numeric_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<NumericTable> {
    let path = path.as_ref();
    let table = read_table(File::open(path)?, path, options)?;
    let label_idx = match options.label_column {
        Some(col) => Some(col.resolve(table.width)?),
        None => None,
    };
    let n_cols = table.width - usize::from(label_idx.is_some());
    let mut columns = vec![Vec::with_capacity(table.rows.len()); n_cols];
    let mut labels = label_idx.map(|_| Vec::with_capacity(table.rows.len()));
    for (r, row) in table.rows.into_iter().enumerate() {
        let mut m = 0;
        for (i, field) in row.into_iter().enumerate() {
            if Some(i) == label_idx {
                if let Some(l) = labels.as_mut() {
                    l.push(field);
                }
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Format {
                path: path.to_owned(),
                row: r + 1 + usize::from(options.has_header),
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, column: i });
            }
            columns[m].push(v);
            m += 1;
        }
    }
    Ok(NumericTable { columns, labels })
}
