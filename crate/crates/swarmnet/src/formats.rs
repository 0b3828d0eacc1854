//! Model, statistics, selection, trace and key=value config files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swarmnet_core::data::{FeatureSchema, MinMaxStats};
use swarmnet_core::select::Selection;
use swarmnet_core::{Network, Topology};

use crate::error::{IoError, Result};

pub const MODEL_MAGIC: &str = "swarmnet-model v1";

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| IoError::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

pub fn model_to_string(network: &Network) -> String {
    let sizes: Vec<String> = network
        .topology()
        .sizes()
        .iter()
        .map(usize::to_string)
        .collect();
    let mut out = format!("{MODEL_MAGIC}\n{}\n", sizes.join(","));
    for w in network.params() {
        // 17 significant digits round-trip every f64
        writeln!(out, "{w:.16e}").expect("writing to a String");
    }
    out
}

pub fn parse_model(text: &str, origin: &Path) -> Result<Network> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MODEL_MAGIC) {
        return Err(IoError::format(
            origin,
            format!("not a model file (expected `{MODEL_MAGIC}`)"),
        ));
    }
    let sizes_line = lines
        .next()
        .ok_or_else(|| IoError::format(origin, "missing topology line"))?;
    let sizes = sizes_line
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| IoError::format(origin, format!("bad topology `{sizes_line}`")))?;
    let topology = Topology::from_sizes(sizes)?;
    let mut params = Vec::with_capacity(topology.flat_dimension());
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            IoError::format(origin, format!("line {}: invalid weight `{line}`", i + 3))
        })?;
        params.push(v);
    }
    if params.len() != topology.flat_dimension() {
        return Err(IoError::format(
            origin,
            format!(
                "topology {topology} needs {} weights, file has {}",
                topology.flat_dimension(),
                params.len()
            ),
        ));
    }
    Ok(Network::from_params(topology, params)?)
}

pub fn save_model(network: &Network, path: &Path) -> Result<()> {
    write_text(path, &model_to_string(network))
}

pub fn load_model(path: &Path) -> Result<Network> {
    parse_model(&read_text(path)?, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub columns: Vec<ColumnRange>,
}

impl StatsFile {
    pub fn new(schema: &FeatureSchema, stats: &MinMaxStats) -> Self {
        let columns = schema
            .names()
            .iter()
            .zip(&stats.columns)
            .map(|(name, &(min, max))| ColumnRange {
                name: name.clone(),
                min,
                max,
            })
            .collect();
        Self { columns }
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn stats(&self) -> MinMaxStats {
        MinMaxStats {
            columns: self.columns.iter().map(|c| (c.min, c.max)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub expanded: Vec<usize>,
    pub expanded_merit: f64,
    pub best_merit: f64,
    pub improved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionFile {
    /// `cfs` or `preset:<name>`.
    pub method: String,
    pub indices: Vec<usize>,
    pub names: Vec<String>,
    pub merit: Option<f64>,
    pub trace: Vec<TraceEntry>,
}

impl SelectionFile {
    pub fn from_search(schema: &FeatureSchema, selection: &Selection) -> Self {
        Self {
            method: "cfs".into(),
            indices: selection.subset.indices.clone(),
            names: selection
                .subset
                .indices
                .iter()
                .map(|&i| schema.names()[i].clone())
                .collect(),
            merit: Some(selection.subset.merit),
            trace: selection
                .trace
                .iter()
                .map(|s| TraceEntry {
                    expanded: s.expanded.clone(),
                    expanded_merit: s.expanded_merit,
                    best_merit: s.best_merit,
                    improved: s.improved,
                })
                .collect(),
        }
    }
}

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    write_text(path, &text)
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| IoError::format(path, e.to_string()))
}

/// `epoch,mse` rows.
pub fn trace_to_csv(errors: &[f64], first_epoch: usize) -> String {
    let mut out = String::from("epoch,mse\n");
    for (i, e) in errors.iter().enumerate() {
        writeln!(out, "{},{e}", i + first_epoch).expect("writing to a String");
    }
    out
}

/// `key = value` lines; `#` starts a comment. Later keys override earlier.
pub fn parse_key_values(text: &str, origin: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            IoError::format(origin, format!("line {}: expected key=value", i + 1))
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn load_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_key_values(&read_text(path)?, path)
}
