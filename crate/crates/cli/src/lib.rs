//! Command implementations behind the `wbures` binary.
//!
//! Every command produces a [`Document`]: named tables of flat records whose
//! floats are already rounded to 12 significant digits. JSON and CSV are two
//! renderings of the same document, so they always carry the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Number, Value};
use std::path::Path;
use weighted_bures::distances::FidelityConvention;
use weighted_bures::random::random_circuit;
use weighted_bures::resource::{audit_bound, Circuit};
use weighted_bures::states::{build_state, StateSpec};
use weighted_bures::table1::table1;
use weighted_bures::weighted::{sandwich_bounds, subset_distance_cache_convention, weighted_distance_from_cache};
use weighted_bures::{bures_length, DensityMatrix, Error, Execution};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Dimension(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch(..) | Error::DimensionTooLarge { .. } | Error::TooLarge { .. } => {
                CliError::Dimension(e.to_string())
            }
            Error::InvalidFactor(_)
            | Error::InvalidState(_)
            | Error::InvalidAmplitudes(_)
            | Error::InvalidGate { .. }
            | Error::InvalidPartition(_)
            | Error::QubitOutOfRange { .. }
            | Error::NotHermitian(_)
            | Error::NotPsd(_)
            | Error::NonFinite
            | Error::ParameterOutOfRange(_) => CliError::Parse(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

/// Exit code when an audited circuit violates the resource bound.
pub const BOUND_VIOLATION_EXIT: i32 = 4;

/// A table of flat records, all sharing the same keys.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    /// Rendered as a single JSON object rather than an array.
    pub single: bool,
    pub rows: Vec<Map<String, Value>>,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    pub tables: Vec<Table>,
    pub exit_code: i32,
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

fn record<T: Serialize>(row: &T) -> Map<String, Value> {
    match serde_json::to_value(row).expect("output rows serialize") {
        Value::Object(mut map) => {
            map.values_mut().for_each(round_value);
            map
        }
        other => panic!("output row is not an object: {other}"),
    }
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.into()));
        for t in &self.tables {
            let body = if t.single {
                Value::Object(t.rows.first().cloned().unwrap_or_default())
            } else {
                Value::Array(t.rows.iter().cloned().map(Value::Object).collect())
            };
            root.insert(t.name.into(), body);
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json");
        s.push('\n');
        s
    }

    /// One CSV block per table, separated by blank lines.
    pub fn to_csv(&self) -> String {
        let mut blocks = Vec::new();
        for t in &self.tables {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(first) = t.rows.first() {
                w.write_record(first.keys()).expect("csv header");
            }
            for row in &t.rows {
                w.write_record(row.values().map(csv_cell)).expect("csv row");
            }
            blocks.push(String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8"));
        }
        blocks.join("\n")
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let spec: StateSpec = read_json(path)?;
    Ok(build_state(&spec)?)
}

pub fn cmd_table1(n: usize, a: f64, b: f64) -> Result<Document, CliError> {
    #[derive(Serialize)]
    struct Row<'a> {
        case: &'a str,
        label: &'a str,
        k: Option<usize>,
        l: Option<usize>,
        a: f64,
        b: f64,
        bures: f64,
        weighted: f64,
        paper_bures: f64,
        paper_weighted: f64,
        bures_deviation: f64,
        weighted_deviation: f64,
        alt_bures: Option<f64>,
        alt_weighted: Option<f64>,
        open_question: bool,
        flagged: bool,
        partition: String,
    }
    let rows = table1(n, a, b)?
        .iter()
        .map(|r| {
            record(&Row {
                case: r.case,
                label: &r.label,
                k: r.k,
                l: r.l,
                a: r.a,
                b: r.b,
                bures: r.bures,
                weighted: r.weighted,
                paper_bures: r.paper_bures,
                paper_weighted: r.paper_weighted,
                bures_deviation: r.bures_deviation,
                weighted_deviation: r.weighted_deviation,
                alt_bures: r.alt_bures,
                alt_weighted: r.alt_weighted,
                open_question: r.open_question,
                flagged: r.flagged,
                partition: r.partition.to_string(),
            })
        })
        .collect();
    Ok(Document {
        command: "table1",
        tables: vec![Table {
            name: "rows",
            single: false,
            rows,
        }],
        exit_code: 0,
    })
}

pub fn cmd_compare(state_a: &Path, state_b: &Path) -> Result<Document, CliError> {
    let rho = read_state(state_a)?;
    let sigma = read_state(state_b)?;
    if rho.n() != sigma.n() {
        return Err(CliError::Dimension(format!("{} vs {} qubits", rho.n(), sigma.n())));
    }
    let exec = Execution::default();
    let root = subset_distance_cache_convention(&rho, &sigma, exec, FidelityConvention::Root)?;
    let squared = subset_distance_cache_convention(&rho, &sigma, exec, FidelityConvention::Squared)?;
    let result = weighted_distance_from_cache(&root);
    let global = bures_length(&rho, &sigma)?;
    let (lower, upper) = sandwich_bounds(&rho, &sigma)?;

    #[derive(Serialize)]
    struct Summary {
        n: usize,
        fidelity: f64,
        bures: f64,
        weighted: f64,
        partition: String,
        sandwich_lower: f64,
        sandwich_upper: f64,
        bures_squared_convention: f64,
        weighted_squared_convention: f64,
    }
    #[derive(Serialize)]
    struct Block {
        block: String,
        size: usize,
        bures: f64,
        contribution: f64,
    }
    let summary = record(&Summary {
        n: rho.n(),
        fidelity: global.fidelity,
        bures: global.length,
        weighted: result.value,
        partition: result.argmax_partition.to_string(),
        sandwich_lower: lower,
        sandwich_upper: upper,
        bures_squared_convention: squared.global(),
        weighted_squared_convention: weighted_distance_from_cache(&squared).value,
    });
    let blocks = result
        .per_block
        .iter()
        .map(|b| {
            record(&Block {
                block: b.mask.to_string(),
                size: b.size,
                bures: b.bures,
                contribution: b.contribution,
            })
        })
        .collect();
    Ok(Document {
        command: "compare",
        tables: vec![
            Table {
                name: "summary",
                single: true,
                rows: vec![summary],
            },
            Table {
                name: "blocks",
                single: false,
                rows: blocks,
            },
        ],
        exit_code: 0,
    })
}

pub fn cmd_audit(circuit: &Path, input: &Path) -> Result<Document, CliError> {
    let circuit: Circuit = read_json(circuit)?;
    let rho = read_state(input)?;
    if circuit.n != rho.n() {
        return Err(CliError::Dimension(format!(
            "circuit acts on {} qubits, input state has {}",
            circuit.n,
            rho.n()
        )));
    }
    let report = audit_bound(&circuit, &rho)?;

    #[derive(Serialize)]
    struct Summary {
        n: usize,
        gates: usize,
        r_u: f64,
        d_b: f64,
        d_b_general: f64,
        margin: f64,
        holds: bool,
        tau_degenerate: bool,
        partition: String,
    }
    #[derive(Serialize)]
    struct Gate {
        index: usize,
        k: usize,
        energy: f64,
        duration: f64,
        cost: f64,
        step_bures: f64,
        step_bound: f64,
    }
    let summary = record(&Summary {
        n: circuit.n,
        gates: circuit.gates.len(),
        r_u: report.r_u,
        d_b: report.d_b,
        d_b_general: report.d_b_general,
        margin: report.margin,
        holds: report.holds,
        tau_degenerate: report.tau_degenerate,
        partition: report.partition.to_string(),
    });
    let gates = report
        .per_gate
        .iter()
        .enumerate()
        .map(|(index, g)| {
            record(&Gate {
                index,
                k: g.k,
                energy: g.energy,
                duration: g.duration,
                cost: g.cost,
                step_bures: g.step_bures,
                step_bound: g.k as f64 * g.step_bures,
            })
        })
        .collect();
    Ok(Document {
        command: "audit",
        tables: vec![
            Table {
                name: "summary",
                single: true,
                rows: vec![summary],
            },
            Table {
                name: "gates",
                single: false,
                rows: gates,
            },
        ],
        exit_code: if report.holds { 0 } else { BOUND_VIOLATION_EXIT },
    })
}

/// Seeded random circuit in the input format `audit` reads.
pub fn cmd_gen_circuit(n: usize, gates: usize, seed: u64) -> Result<String, CliError> {
    if n == 0 || n > weighted_bures::states::DEFAULT_MAX_QUBITS {
        return Err(CliError::Parse(format!("n = {n} out of range")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circuit = random_circuit(n, gates, &mut rng);
    let mut s = serde_json::to_string_pretty(&circuit).expect("circuit serializes");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-1.23456789012345e-7), -1.23456789012e-7);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(2.0), 2.0);
    }

    #[test]
    fn csv_and_json_share_numbers() {
        let doc = cmd_table1(2, 0.6, 0.8).unwrap();
        let json: Value = serde_json::from_str(&doc.to_json()).unwrap();
        let csv = doc.to_csv();
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let col = header.iter().position(|h| *h == "weighted").unwrap();
        let first = lines.next().unwrap();
        let cell = first.split(',').nth(col).unwrap();
        assert_eq!(cell, json["rows"][0]["weighted"].to_string());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::DimensionMismatch(2, 4)).exit_code(), 3);
        assert_eq!(CliError::from(Error::InvalidFactor("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::ParameterOutOfRange("n".into())).exit_code(), 2);
    }
}
