//! File formats: JSON documents for models and distributions, CSV dataset
//! ingestion with recorded category mappings, and the matching writers.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::JointTable;
use crate::model::{BayesNet, Cpt, Dataset, NodeOrdering, OrderedDag, VariableSpec, Variables};

pub const FORMAT_VERSION: u32 = 1;

/// Tolerance for probability rows and arrays in loaded documents; rows
/// within it are renormalized, anything further off is rejected.
pub const DOC_SUM_TOL: f64 = 1e-9;

/// Deviations at this level are rounding dust from a writer that already
/// normalized; dividing by such a sum would only disturb the cells, so
/// loading keeps them verbatim.
const SUM_DUST_TOL: f64 = 1e-13;

fn renormalized(values: &[f64], sum: f64) -> Vec<f64> {
    if (sum - 1.0).abs() <= SUM_DUST_TOL {
        values.to_vec()
    } else {
        values.iter().map(|p| p / sum).collect()
    }
}

/// One variable of a serialized model or distribution, with the state
/// labels recorded when the data was ingested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub cardinality: usize,
    pub states: Vec<String>,
}

/// Conditional probability table of one node, row-major over the parent
/// configurations with the last parent varying fastest. Rows flagged
/// undefined carry uniform placeholders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptDoc {
    pub child: usize,
    pub rows: Vec<Vec<f64>>,
    pub defined: Vec<bool>,
}

/// Serialized Bayesian network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub variables: Vec<VariableDoc>,
    pub ordering: Vec<usize>,
    pub parents: Vec<Vec<usize>>,
    pub cpts: Vec<CptDoc>,
}

/// Serialized joint distribution: a flat row-major probability array with
/// the last variable varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionDocument {
    pub format_version: u32,
    pub variables: Vec<VariableDoc>,
    pub probs: Vec<f64>,
}

/// Numeric state labels "0", "1", ... for every variable.
pub fn canonical_states(variables: &Variables) -> Vec<Vec<String>> {
    variables
        .specs()
        .iter()
        .map(|s| (0..s.cardinality).map(|k| k.to_string()).collect())
        .collect()
}

fn variable_docs(variables: &Variables, states: &[Vec<String>]) -> Result<Vec<VariableDoc>> {
    if states.len() != variables.len() {
        return Err(Error::invalid(format!(
            "{} state lists for {} variables",
            states.len(),
            variables.len()
        )));
    }
    let mut docs = Vec::with_capacity(variables.len());
    for (spec, labels) in variables.specs().iter().zip(states) {
        if labels.len() != spec.cardinality {
            return Err(Error::invalid(format!(
                "variable {:?} has cardinality {} but {} state labels",
                spec.name,
                spec.cardinality,
                labels.len()
            )));
        }
        docs.push(VariableDoc {
            name: spec.name.clone(),
            cardinality: spec.cardinality,
            states: labels.clone(),
        });
    }
    Ok(docs)
}

fn variables_from_docs(docs: &[VariableDoc]) -> Result<Variables> {
    let mut specs = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        let spec = VariableSpec::new(doc.name.clone(), doc.cardinality)
            .map_err(|e| Error::schema(format!("variables[{i}]"), e.to_string()))?;
        if doc.states.len() != doc.cardinality {
            return Err(Error::schema(
                format!("variables[{i}].states"),
                format!(
                    "{} labels for cardinality {}",
                    doc.states.len(),
                    doc.cardinality
                ),
            ));
        }
        let mut sorted = doc.states.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::schema(
                format!("variables[{i}].states"),
                "state labels are not unique",
            ));
        }
        specs.push(spec);
    }
    Variables::new(specs).map_err(|e| Error::schema("variables", e.to_string()))
}

impl ModelDocument {
    /// Serializable form of a network, with the given state labels.
    pub fn from_network(net: &BayesNet, states: &[Vec<String>]) -> Result<ModelDocument> {
        let variables = variable_docs(net.variables(), states)?;
        let cpts = (0..net.variables().len())
            .map(|v| {
                let cpt = net.cpt(v);
                CptDoc {
                    child: v,
                    rows: (0..cpt.n_rows()).map(|j| cpt.row(j).to_vec()).collect(),
                    defined: (0..cpt.n_rows()).map(|j| cpt.is_defined(j)).collect(),
                }
            })
            .collect();
        Ok(ModelDocument {
            format_version: FORMAT_VERSION,
            variables,
            ordering: net.ordering().order().to_vec(),
            parents: net.dag().parent_sets().to_vec(),
            cpts,
        })
    }

    /// Validates the document and builds the network. Defined CPT rows must
    /// sum to 1 within `DOC_SUM_TOL` and are renormalized unless the
    /// deviation is rounding dust; the payload of undefined rows is replaced
    /// by the uniform placeholder.
    pub fn to_network(&self) -> Result<BayesNet> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::schema(
                "format_version",
                format!("found {}, supported {FORMAT_VERSION}", self.format_version),
            ));
        }
        let variables = variables_from_docs(&self.variables)?;
        let n = variables.len();
        let ordering = NodeOrdering::new(self.ordering.clone())
            .map_err(|e| Error::schema("ordering", e.to_string()))?;
        if ordering.len() != n {
            return Err(Error::schema(
                "ordering",
                format!("{} entries for {n} variables", ordering.len()),
            ));
        }
        let dag = OrderedDag::new(ordering, self.parents.clone())
            .map_err(|e| Error::schema("parents", e.to_string()))?;
        if self.cpts.len() != n {
            return Err(Error::schema(
                "cpts",
                format!("{} tables for {n} variables", self.cpts.len()),
            ));
        }
        let mut cpts = Vec::with_capacity(n);
        for (k, doc) in self.cpts.iter().enumerate() {
            if doc.child != k {
                return Err(Error::schema(
                    format!("cpts[{k}].child"),
                    format!("found {}, tables must be listed per node", doc.child),
                ));
            }
            if doc.defined.len() != doc.rows.len() {
                return Err(Error::schema(
                    format!("cpts[{k}].defined"),
                    format!("{} flags for {} rows", doc.defined.len(), doc.rows.len()),
                ));
            }
            let card = variables.cardinality(k);
            let mut rows = Vec::with_capacity(doc.rows.len());
            for (j, row) in doc.rows.iter().enumerate() {
                if row.len() != card {
                    return Err(Error::schema(
                        format!("cpts[{k}].rows[{j}]"),
                        format!("{} entries for cardinality {card}", row.len()),
                    ));
                }
                if !doc.defined[j] {
                    rows.push(vec![1.0 / card as f64; card]);
                    continue;
                }
                let sum: f64 = row.iter().sum();
                if !((sum - 1.0).abs() <= DOC_SUM_TOL) {
                    return Err(Error::schema(
                        format!("cpts[{k}].rows[{j}]"),
                        format!("row sums to {sum}"),
                    ));
                }
                rows.push(renormalized(row, sum));
            }
            let cpt = Cpt::new(&variables, k, dag.parents(k).to_vec(), rows, doc.defined.clone())
                .map_err(|e| Error::schema(format!("cpts[{k}]"), e.to_string()))?;
            cpts.push(cpt);
        }
        BayesNet::new(variables, dag, cpts).map_err(|e| Error::schema("cpts", e.to_string()))
    }

    /// Per-column state labels, in variable order.
    pub fn states(&self) -> Vec<Vec<String>> {
        self.variables.iter().map(|v| v.states.clone()).collect()
    }
}

impl DistributionDocument {
    pub fn from_joint(joint: &JointTable, states: &[Vec<String>]) -> Result<DistributionDocument> {
        Ok(DistributionDocument {
            format_version: FORMAT_VERSION,
            variables: variable_docs(joint.variables(), states)?,
            probs: joint.probs().to_vec(),
        })
    }

    /// Validates the document and builds the joint table. The total mass
    /// must be within `DOC_SUM_TOL` of 1 and is renormalized unless the
    /// deviation is rounding dust.
    pub fn to_joint(&self) -> Result<JointTable> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::schema(
                "format_version",
                format!("found {}, supported {FORMAT_VERSION}", self.format_version),
            ));
        }
        let variables = variables_from_docs(&self.variables)?;
        let scope: Vec<usize> = (0..variables.len()).collect();
        let expected = variables.state_space_size(&scope);
        if self.probs.len() as u128 != expected {
            return Err(Error::schema(
                "probs",
                format!("{} cells, the state space has {expected}", self.probs.len()),
            ));
        }
        for (i, &p) in self.probs.iter().enumerate() {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::schema("probs", format!("cell {i} is {p}")));
            }
        }
        let sum: f64 = crate::exact::neumaier_sum(self.probs.iter().copied());
        if !((sum - 1.0).abs() <= DOC_SUM_TOL) {
            return Err(Error::schema("probs", format!("mass sums to {sum}")));
        }
        JointTable::new(variables, renormalized(&self.probs, sum))
    }

    pub fn states(&self) -> Vec<Vec<String>> {
        self.variables.iter().map(|v| v.states.clone()).collect()
    }
}

struct SciPretty<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl serde_json::ser::Formatter for SciPretty<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

pub(crate) fn write_json(value: &impl Serialize, mut writer: impl Write) -> Result<()> {
    let formatter = SciPretty {
        inner: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut writer, formatter);
    value
        .serialize(&mut ser)
        .map_err(std::io::Error::from)?;
    writeln!(writer)?;
    Ok(())
}

/// Writes a model as pretty JSON with every float at 17 significant
/// digits. The document is validated first.
pub fn write_model(doc: &ModelDocument, writer: impl Write) -> Result<()> {
    doc.to_network()?;
    write_json(doc, writer)
}

/// Parses and validates a model document.
pub fn read_model(reader: impl Read) -> Result<ModelDocument> {
    let doc: ModelDocument =
        serde_json::from_reader(reader).map_err(|e| Error::schema("$", e.to_string()))?;
    doc.to_network()?;
    Ok(doc)
}

/// Writes a distribution as pretty JSON with every float at 17 significant
/// digits. The document is validated first.
pub fn write_distribution(doc: &DistributionDocument, writer: impl Write) -> Result<()> {
    doc.to_joint()?;
    write_json(doc, writer)
}

/// Parses and validates a distribution document.
pub fn read_distribution(reader: impl Read) -> Result<DistributionDocument> {
    let doc: DistributionDocument =
        serde_json::from_reader(reader).map_err(|e| Error::schema("$", e.to_string()))?;
    doc.to_joint()?;
    Ok(doc)
}

fn map_csv(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::invalid(format!("CSV: {e}"))
    }
}

fn read_csv_cells(reader: impl Read) -> Result<(Vec<String>, Vec<(u64, Vec<String>)>)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = csv_reader
        .headers()
        .map_err(map_csv)?
        .iter()
        .map(str::to_owned)
        .collect();
    let n = headers.len();
    let mut rows = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(map_csv)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != n {
            return Err(Error::RaggedRow {
                line,
                expected: n,
                found: record.len(),
            });
        }
        let mut cells = Vec::with_capacity(n);
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::MissingCell {
                    line,
                    column: headers[j].clone(),
                });
            }
            cells.push(cell.to_owned());
        }
        rows.push((line, cells));
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((headers, rows))
}

fn canonical_index(cell: &str) -> Option<usize> {
    let value: usize = cell.parse().ok()?;
    (value.to_string() == cell).then_some(value)
}

fn pad_states(states: &mut Vec<String>, cardinality: usize) {
    let mut k = 1usize;
    while states.len() < cardinality {
        let candidate = format!("state{k}");
        if !states.contains(&candidate) {
            states.push(candidate);
        }
        k += 1;
    }
}

/// Reads a complete dataset. The header row names the variables; every
/// later row is one observation. A column whose cells are all canonically
/// written nonnegative integers is taken as explicit state indices with
/// cardinality max+1; any other column is categorical, with its distinct
/// values mapped to indices in ascending lexicographic order. Returns the
/// dataset and the per-column state labels backing that mapping.
pub fn parse_dataset_csv(
    reader: impl Read,
    allow_constant: bool,
) -> Result<(Dataset, Vec<Vec<String>>)> {
    let (headers, raw) = read_csv_cells(reader)?;
    let n = headers.len();
    let mut states: Vec<Vec<String>> = Vec::with_capacity(n);
    for (j, name) in headers.iter().enumerate() {
        let mut distinct: Vec<&str> = raw.iter().map(|(_, cells)| cells[j].as_str()).collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() == 1 && !allow_constant {
            return Err(Error::CardinalityOne {
                column: name.clone(),
            });
        }
        let integer = distinct.iter().all(|cell| canonical_index(cell).is_some());
        let mut labels: Vec<String> = if integer {
            let max = distinct
                .iter()
                .map(|cell| canonical_index(cell).unwrap())
                .max()
                .unwrap();
            let cardinality = max
                .checked_add(1)
                .ok_or_else(|| Error::OutOfRange {
                    detail: format!("column {name:?} has state index {max}"),
                })?
                .max(2);
            (0..cardinality).map(|k| k.to_string()).collect()
        } else {
            distinct.iter().map(|s| s.to_string()).collect()
        };
        pad_states(&mut labels, 2);
        states.push(labels);
    }
    let specs: Result<Vec<VariableSpec>> = headers
        .iter()
        .zip(&states)
        .map(|(name, labels)| VariableSpec::new(name.clone(), labels.len()))
        .collect();
    let variables = Variables::new(specs?)?;
    let rows = encode_cells(&raw, &headers, &states)?;
    Ok((Dataset::new(variables, rows)?, states))
}

/// Reads a dataset against an existing model's variables: the header must
/// name the same variables in the same order, and every cell must be one
/// of the recorded state labels.
pub fn encode_dataset_csv(
    reader: impl Read,
    variables: &Variables,
    states: &[Vec<String>],
) -> Result<Dataset> {
    if states.len() != variables.len() {
        return Err(Error::invalid(format!(
            "{} state lists for {} variables",
            states.len(),
            variables.len()
        )));
    }
    let (headers, raw) = read_csv_cells(reader)?;
    if headers.len() != variables.len() {
        return Err(Error::invalid(format!(
            "CSV has {} columns, the model has {} variables",
            headers.len(),
            variables.len()
        )));
    }
    for (j, name) in headers.iter().enumerate() {
        if name != variables.name(j) {
            return Err(Error::invalid(format!(
                "column {j} is named {name:?}, the model expects {:?}",
                variables.name(j)
            )));
        }
    }
    let rows = encode_cells(&raw, &headers, states)?;
    Dataset::new(variables.clone(), rows)
}

fn encode_cells(
    raw: &[(u64, Vec<String>)],
    headers: &[String],
    states: &[Vec<String>],
) -> Result<Vec<Vec<usize>>> {
    let mut rows = Vec::with_capacity(raw.len());
    for (line, cells) in raw {
        let mut row = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            let index = states[j].iter().position(|s| s == cell).ok_or_else(|| {
                Error::OutOfRange {
                    detail: format!(
                        "value {cell:?} at line {line} is not a state of column {:?}",
                        headers[j]
                    ),
                }
            })?;
            row.push(index);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes a dataset with its header row, mapping state indices back to the
/// given labels.
pub fn write_dataset_csv(
    dataset: &Dataset,
    states: &[Vec<String>],
    writer: impl Write,
) -> Result<()> {
    let variables = dataset.variables();
    if states.len() != variables.len() {
        return Err(Error::invalid(format!(
            "{} state lists for {} variables",
            states.len(),
            variables.len()
        )));
    }
    for (j, labels) in states.iter().enumerate() {
        if labels.len() != variables.cardinality(j) {
            return Err(Error::invalid(format!(
                "column {:?} has cardinality {} but {} state labels",
                variables.name(j),
                variables.cardinality(j),
                labels.len()
            )));
        }
    }
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer
        .write_record(variables.specs().iter().map(|s| s.name.as_str()))
        .map_err(map_csv)?;
    for row in dataset.rows() {
        csv_writer
            .write_record(row.iter().enumerate().map(|(j, &v)| states[j][v].as_str()))
            .map_err(map_csv)?;
    }
    csv_writer.flush()?;
    Ok(())
}
