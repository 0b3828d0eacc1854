//! Dataset CSV files: one column per feature plus a trailing `class`
//! column holding the grade letter. An empty field is a missing value.

use std::io::{Read, Write};
use std::path::Path;

use swarmnet_core::data::{Dataset, FeatureSchema, Grade, Sample};

use crate::error::{IoError, Result};

pub const CLASS_COLUMN: &str = "class";

pub fn read_dataset<R: Read>(reader: R, origin: &Path) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IoError::format(origin, format!("unreadable header: {e}")))?
        .clone();
    let width = header.len();
    if width < 2 || &header[width - 1] != CLASS_COLUMN {
        return Err(IoError::format(
            origin,
            format!("header must end with a `{CLASS_COLUMN}` column"),
        ));
    }
    let names: Vec<String> = header.iter().take(width - 1).map(str::to_string).collect();
    let schema = FeatureSchema::new(names).map_err(|e| IoError::format(origin, e.to_string()))?;

    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let row_err = |message: String| IoError::Row {
            path: origin.to_path_buf(),
            row,
            message,
        };
        let record = record.map_err(|e| row_err(e.to_string()))?;
        if record.len() != width {
            return Err(row_err(format!(
                "expected {width} fields, found {}",
                record.len()
            )));
        }
        let mut features = Vec::with_capacity(width - 1);
        for (c, field) in record.iter().take(width - 1).enumerate() {
            if field.is_empty() {
                features.push(f64::NAN);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                row_err(format!(
                    "column {}: invalid number `{field}`",
                    schema.names()[c]
                ))
            })?;
            features.push(v);
        }
        let label: Grade = record[width - 1]
            .parse()
            .map_err(|e| row_err(format!("{e}")))?;
        samples.push(Sample { features, label });
    }
    Ok(Dataset::new(schema, samples)?)
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    read_dataset(std::io::BufReader::new(file), path)
}

pub fn write_dataset<W: Write>(dataset: &Dataset, writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = dataset.schema.names().iter().map(String::as_str).collect();
    header.push(CLASS_COLUMN);
    w.write_record(&header)?;
    for s in &dataset.samples {
        let mut fields: Vec<String> = s
            .features
            .iter()
            .map(|v| {
                if v.is_nan() {
                    String::new()
                } else {
                    v.to_string()
                }
            })
            .collect();
        fields.push(s.label.letter().to_string());
        w.write_record(&fields)?;
    }
    w.flush()
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    write_dataset(dataset, std::io::BufWriter::new(file)).map_err(|e| IoError::io(path, e))
}
