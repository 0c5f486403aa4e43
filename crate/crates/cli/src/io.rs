//! Input loading (inline JSON or file paths, CSV datasets, config files)
//! and output writing.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use renyicert_core::measure::{MetricKind, MetricSpec, Point};
use renyicert_core::privacy::{CertMetric, MetricTable};
use renyicert_core::robustness::DataDistribution;
use renyicert_core::ProbabilisticMapping;

use crate::errors::{json_input_error, CliError, CliResult};

/// Parse an argument that is either inline JSON or a path to a JSON file.
pub fn load_json_arg<T: DeserializeOwned>(what: &str, arg: &str) -> CliResult<T> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        serde_json::from_str(arg).map_err(|e| json_input_error(what, e))
    } else {
        let text = fs::read_to_string(arg)
            .map_err(|e| CliError::Input(format!("{what}: cannot read '{arg}': {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| json_input_error(&format!("{what} ({arg})"), e))
    }
}

/// Parse a point argument: a comma-separated coordinate row, or a bare index
/// for finite-input mappings.
pub fn parse_point(arg: &str, finite_input: bool) -> CliResult<Point> {
    let trimmed = arg.trim();
    if finite_input {
        let index: usize = trimmed
            .parse()
            .map_err(|_| CliError::Input(format!("expected a finite-space index, got '{arg}'")))?;
        return Ok(Point::finite(index));
    }
    let coords: Result<Vec<f64>, _> = trimmed.split(',').map(|f| f.trim().parse()).collect();
    match coords {
        Ok(c) if !c.is_empty() => Ok(Point::continuous(c)),
        _ => Err(CliError::Input(format!("unparseable coordinate row '{arg}'"))),
    }
}

/// Assemble the certification metric from `--metric`/`--dimension` or
/// `--metric-table`.
pub fn build_metric(
    metric: Option<&str>,
    dimension: Option<usize>,
    metric_table: Option<&str>,
    mapping: &ProbabilisticMapping,
) -> CliResult<CertMetric> {
    match (metric, metric_table) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--metric and --metric-table are mutually exclusive".into(),
        )),
        (None, None) => Err(CliError::Usage("a metric is required (--metric or --metric-table)".into())),
        (None, Some(path)) => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct TableFile {
                distances: Vec<Vec<f64>>,
            }
            let table: TableFile = load_json_arg("metric table", path)?;
            Ok(CertMetric::Table(MetricTable::new(table.distances)?))
        }
        (Some(kind), None) => {
            let kind: MetricKind = kind
                .parse()
                .map_err(|e: renyicert_core::Error| CliError::Usage(e.to_string()))?;
            let dimension = dimension
                .or_else(|| default_dimension(mapping))
                .ok_or_else(|| {
                    CliError::Usage("--dimension is required for this mapping/metric".into())
                })?;
            Ok(CertMetric::Spec(
                MetricSpec::new(kind, dimension).map_err(|e| CliError::Usage(e.to_string()))?,
            ))
        }
    }
}

pub fn default_dimension(mapping: &ProbabilisticMapping) -> Option<usize> {
    match mapping {
        ProbabilisticMapping::InputNoise { base, .. }
        | ProbabilisticMapping::Deterministic { base }
        | ProbabilisticMapping::OutputNoise { base, .. } => {
            base.input_dim().or(Some(1))
        }
        ProbabilisticMapping::FiniteTable { .. } => Some(1),
    }
}

/// Load a dataset: a JSON `DataDistribution`, or a CSV of one point per row
/// (numeric columns are coordinates; an optional header may name a `w`
/// weight column). CSV weights are normalized to sum to one.
pub fn load_data(path: &str, finite_input: bool) -> CliResult<DataDistribution> {
    if path.ends_with(".json") || path.trim_start().starts_with('{') {
        return load_json_arg("data", path);
    }
    let file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("data: cannot open '{path}': {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(file);
    let mut records: Vec<csv::StringRecord> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            CliError::Input(format!(
                "data: CSV parse error at record {}: {e}",
                i + 1
            ))
        })?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(CliError::Input("data: empty CSV".into()));
    }
    // Header detection: a first row that does not parse as numbers.
    let first_numeric = records[0].iter().all(|f| f.trim().parse::<f64>().is_ok());
    let (header, body_start) = if first_numeric {
        (None, 0)
    } else {
        (Some(records[0].clone()), 1)
    };
    let w_col: Option<usize> = header
        .as_ref()
        .and_then(|h| h.iter().position(|name| name.trim() == "w"));
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (row_ix, rec) in records[body_start..].iter().enumerate() {
        let mut coords = Vec::new();
        let mut w = 1.0;
        for (col, field) in rec.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                CliError::Input(format!(
                    "data: row {}, column {}: '{}' is not a number",
                    body_start + row_ix + 1,
                    col + 1,
                    field
                ))
            })?;
            if Some(col) == w_col {
                w = value;
            } else {
                coords.push(value);
            }
        }
        if w < 0.0 {
            return Err(CliError::Input(format!(
                "data: row {} has negative weight",
                body_start + row_ix + 1
            )));
        }
        if finite_input {
            if coords.len() != 1 || coords[0].fract() != 0.0 || coords[0] < 0.0 {
                return Err(CliError::Input(format!(
                    "data: row {} must be a single nonnegative index for finite mappings",
                    body_start + row_ix + 1
                )));
            }
            points.push(Point::finite(coords[0] as usize));
        } else {
            points.push(Point::continuous(coords));
        }
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(CliError::Input("data: weights sum to zero".into()));
    }
    let weights = weights.iter().map(|w| w / total).collect();
    Ok(DataDistribution::FiniteWeighted { points, weights })
}

/// Write the output JSON (pretty, trailing newline) to stdout or a file.
pub fn emit(output: &serde_json::Value, path: Option<&str>) -> CliResult<()> {
    let text = format!("{:#}\n", output);
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            if let Some(parent) = Path::new(p).parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::Input(format!("cannot create '{}': {e}", parent.display())))?;
                }
            }
            fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write '{p}': {e}")))
        }
    }
}

pub fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("output types serialize")
}
