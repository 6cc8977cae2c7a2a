//! Survey datasets: one row of belief values per participant.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decimal::Rational;
use crate::value::{map_likert, Value};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema error{}: {message}", row_suffix(*.row))]
    Schema { row: Option<usize>, message: String },
    #[error("row {row}, column {column}: {text:?} is not on the 11-point grid")]
    ValueOffGrid { row: usize, column: String, text: String },
    #[error("row {row}, column {column}: Likert response {text:?} outside 1..={scale}")]
    LikertOutOfRange {
        row: usize,
        column: String,
        text: String,
        scale: i64,
    },
    #[error("data item {item} has no value for argument {arg}")]
    MissingValue { item: String, arg: String },
    #[error("dataset has {size} rows; split needs a nonempty train and test side")]
    DatasetTooSmall { size: usize },
    #[error("dataset is empty")]
    EmptyDataset,
}

fn row_suffix(row: Option<usize>) -> String {
    row.map(|r| format!(" at row {r}")).unwrap_or_default()
}

/// One participant's belief values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataItem {
    pub id: String,
    values: BTreeMap<String, Value>,
}

impl DataItem {
    pub fn new<S: Into<String>>(id: impl Into<String>, values: impl IntoIterator<Item = (S, Value)>) -> DataItem {
        DataItem {
            id: id.into(),
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn get(&self, arg: &str) -> Option<Value> {
        self.values.get(arg).copied()
    }

    pub fn value(&self, arg: &str) -> Result<Value, DataError> {
        self.get(arg).ok_or_else(|| DataError::MissingValue {
            item: self.id.clone(),
            arg: arg.to_string(),
        })
    }

    pub fn values(&self) -> &BTreeMap<String, Value> {
        &self.values
    }
}

/// Ordered data items sharing one argument schema, all values on the
/// 11-point grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    arguments: Vec<String>,
    items: Vec<DataItem>,
}

impl Dataset {
    pub fn new(arguments: Vec<String>, items: Vec<DataItem>) -> Result<Dataset, DataError> {
        for (i, item) in items.iter().enumerate() {
            if item.values.len() != arguments.len() || arguments.iter().any(|a| !item.values.contains_key(a)) {
                return Err(DataError::Schema {
                    row: Some(i + 1),
                    message: format!("item {} does not match the argument schema", item.id),
                });
            }
            for (arg, v) in &item.values {
                if !v.on_tenth_grid() {
                    return Err(DataError::ValueOffGrid {
                        row: i + 1,
                        column: arg.clone(),
                        text: v.to_string(),
                    });
                }
            }
        }
        Ok(Dataset { arguments, items })
    }

    pub fn arguments(&self) -> &[String] {
        &self.arguments
    }

    pub fn items(&self) -> &[DataItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn has_argument(&self, arg: &str) -> bool {
        self.arguments.iter().any(|a| a == arg)
    }

    /// The values of one argument in row order.
    pub fn column(&self, arg: &str) -> Option<Vec<Value>> {
        self.has_argument(arg)
            .then(|| self.items.iter().map(|d| d.values[arg]).collect())
    }

    fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            arguments: self.arguments.clone(),
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
        }
    }

    /// Writes an `id` column followed by one column per argument.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string()];
        header.extend(self.arguments.iter().cloned());
        out.write_record(&header)?;
        for item in &self.items {
            let mut record = vec![item.id.clone()];
            record.extend(self.arguments.iter().map(|a| item.values[a].to_string()));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, scale_points: Option<i64>) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path)?;
    read_csv(file, scale_points)
}

/// Reads a header of argument names (optionally led by an `id` column) and
/// one row per participant. Cells are grid decimals, or raw Likert
/// responses when `scale_points` is given.
pub fn read_csv<R: Read>(reader: R, scale_points: Option<i64>) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let has_id = header
        .get(0)
        .is_some_and(|h| h.is_empty() || h.eq_ignore_ascii_case("id"));
    let arguments: Vec<String> = header.iter().skip(usize::from(has_id)).map(str::to_string).collect();
    if arguments.is_empty() {
        return Err(DataError::Schema {
            row: None,
            message: "header names no arguments".into(),
        });
    }
    if let Some(empty) = arguments.iter().position(String::is_empty) {
        return Err(DataError::Schema {
            row: None,
            message: format!("header column {} is unnamed", empty + 1 + usize::from(has_id)),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = arguments.iter().find(|a| !seen.insert(a.as_str())) {
        return Err(DataError::Schema {
            row: None,
            message: format!("argument {dup} appears twice in the header"),
        });
    }

    let mut items = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(DataError::Schema {
                row: Some(row),
                message: format!("expected {} cells, found {}", header.len(), record.len()),
            });
        }
        let id = if has_id {
            record[0].to_string()
        } else {
            format!("{row:03}")
        };
        let mut values = BTreeMap::new();
        for (arg, cell) in arguments.iter().zip(record.iter().skip(usize::from(has_id))) {
            if cell.is_empty() {
                return Err(DataError::Schema {
                    row: Some(row),
                    message: format!("missing value for {arg}"),
                });
            }
            let value = match scale_points {
                None => cell
                    .parse::<Value>()
                    .ok()
                    .filter(|v| v.on_tenth_grid())
                    .ok_or_else(|| DataError::ValueOffGrid {
                        row,
                        column: arg.clone(),
                        text: cell.to_string(),
                    })?,
                Some(scale) => {
                    let raw: i64 = cell.parse().map_err(|_| DataError::Schema {
                        row: Some(row),
                        message: format!("{arg}: {cell:?} is not an integer Likert response"),
                    })?;
                    map_likert(raw, scale).map_err(|_| DataError::LikertOutOfRange {
                        row,
                        column: arg.clone(),
                        text: cell.to_string(),
                        scale,
                    })?
                }
            };
            values.insert(arg.clone(), value);
        }
        items.push(DataItem { id, values });
    }
    Dataset::new(arguments, items)
}

/// Seeded shuffle split; the train side gets `round(ratio * |D|)` rows.
/// Both sides keep the original row order.
pub fn split(dataset: &Dataset, ratio: Rational, seed: u64) -> Result<(Dataset, Dataset), DataError> {
    let n = dataset.len();
    let too_small = DataError::DatasetTooSmall { size: n };
    if n < 2 || ratio > Rational::from_integer(1) {
        return Err(too_small);
    }
    let scaled = ratio * Rational::from_integer(n as u64);
    // half-up rounding
    let train_len = (scaled + Rational::new(1, 2)).floor().to_integer() as usize;
    if train_len == 0 || train_len >= n {
        return Err(too_small);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = order.split_at_mut(train_len);
    train.sort_unstable();
    test.sort_unstable();
    Ok((dataset.subset(train), dataset.subset(test)))
}
