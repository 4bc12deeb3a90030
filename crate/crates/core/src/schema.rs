//! Attributes of interest, their value dictionaries, and ingestion of
//! delimiter-separated text into an [`IndexedDataset`].

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::IndexedDataset;
use crate::error::{Error, Result};

/// One categorical attribute. Codes are positions in `values`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
    /// True when the cardinality was inferred from the data rather than declared.
    #[serde(default)]
    pub inferred: bool,
}

impl Attribute {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            values,
            inferred: false,
        }
    }

    pub fn cardinality(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn code_of(&self, label: &str) -> Option<u32> {
        self.values.iter().position(|v| v == label).map(|p| p as u32)
    }

    pub fn label(&self, code: u32) -> &str {
        &self.values[code as usize]
    }
}

/// Ordered attributes of interest. Attribute order fixes pattern positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc", into = "SchemaDoc")]
pub struct Schema {
    attributes: Vec<Attribute>,
    cardinalities: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    attributes: Vec<Attribute>,
}

impl TryFrom<SchemaDoc> for Schema {
    type Error = Error;
    fn try_from(doc: SchemaDoc) -> Result<Self> {
        Schema::new(doc.attributes)
    }
}

impl From<Schema> for SchemaDoc {
    fn from(s: Schema) -> Self {
        SchemaDoc {
            attributes: s.attributes,
        }
    }
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::Config("at least one attribute is required".into()));
        }
        let mut names = HashSet::new();
        for a in &attributes {
            if !names.insert(a.name.as_str()) {
                return Err(Error::Config(format!("duplicate attribute `{}`", a.name)));
            }
            if a.values.len() < 2 {
                return Err(Error::DegenerateAttribute(a.name.clone()));
            }
            let distinct: HashSet<_> = a.values.iter().collect();
            if distinct.len() != a.values.len() {
                return Err(Error::Config(format!(
                    "attribute `{}` has duplicate value labels",
                    a.name
                )));
            }
        }
        let cardinalities = attributes.iter().map(Attribute::cardinality).collect();
        Ok(Schema {
            attributes,
            cardinalities,
        })
    }

    /// Attributes named `A1..Ad` whose labels are the decimal codes.
    pub fn with_cardinalities(cards: &[u32]) -> Result<Self> {
        Schema::new(
            cards
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    Attribute::new(format!("A{}", i + 1), (0..c).map(|v| v.to_string()).collect())
                })
                .collect(),
        )
    }

    pub fn binary(d: usize) -> Self {
        Schema::with_cardinalities(&vec![2; d]).expect("binary schema is valid")
    }

    pub fn d(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, i: usize) -> &Attribute {
        &self.attributes[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cardinalities
    }

    pub fn cardinality(&self, i: usize) -> u32 {
        self.cardinalities[i]
    }

    /// Number of full value combinations, saturating at `u64::MAX`.
    pub fn combination_count(&self) -> u64 {
        self.cardinalities
            .iter()
            .fold(1u64, |acc, &c| acc.saturating_mul(c as u64))
    }

    /// True when every attribute has at most ten values, so the one-character
    /// pattern syntax is unambiguous.
    pub fn compact_ok(&self) -> bool {
        self.cardinalities.iter().all(|&c| c <= 10)
    }
}

/// How rows with a missing value in an attribute of interest are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    #[default]
    Reject,
    /// Map missing to a dedicated extra code labelled [`MISSING_LABEL`].
    Code,
}

pub const MISSING_LABEL: &str = "<missing>";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvOptions {
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_quote")]
    pub quote: char,
    #[serde(default = "default_true")]
    pub quoting: bool,
    #[serde(default = "default_true")]
    pub trim: bool,
}

fn default_delimiter() -> char {
    ','
}
fn default_quote() -> char {
    '"'
}
fn default_true() -> bool {
    true
}
fn default_missing_tokens() -> Vec<String> {
    vec![String::new()]
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: default_delimiter(),
            quote: default_quote(),
            quoting: true,
            trim: true,
        }
    }
}

/// A half-open numeric bucket `[min, max)`; an absent bound is unbounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeBucket {
    pub label: String,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueGroup {
    pub label: String,
    pub values: Vec<String>,
}

/// Maps raw values of one attribute onto bucket codes `0..k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bucketization {
    NumericRanges { ranges: Vec<RangeBucket> },
    ValueGroups { groups: Vec<ValueGroup> },
}

impl Bucketization {
    fn validate(&self, attribute: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("attribute `{attribute}`: {msg}")));
        match self {
            Bucketization::NumericRanges { ranges } => {
                if ranges.len() < 2 {
                    return bad("numeric-ranges needs at least two buckets".into());
                }
                for (k, r) in ranges.iter().enumerate() {
                    if let (Some(lo), Some(hi)) = (r.min, r.max) {
                        if lo >= hi {
                            return bad(format!("bucket `{}` is empty", r.label));
                        }
                    }
                    if k > 0 && r.min.is_none() {
                        return bad(format!("bucket `{}` must have a lower bound", r.label));
                    }
                    if k + 1 < ranges.len() && r.max.is_none() {
                        return bad(format!("bucket `{}` must have an upper bound", r.label));
                    }
                    if k > 0 && ranges[k - 1].max != r.min {
                        return bad(format!(
                            "bucket `{}` does not start where the previous bucket ends",
                            r.label
                        ));
                    }
                }
            }
            Bucketization::ValueGroups { groups } => {
                if groups.len() < 2 {
                    return bad("value-groups needs at least two groups".into());
                }
                let mut seen = HashSet::new();
                for g in groups {
                    if g.values.is_empty() {
                        return bad(format!("group `{}` is empty", g.label));
                    }
                    for v in &g.values {
                        if !seen.insert(v.as_str()) {
                            return bad(format!("value `{v}` appears in more than one group"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn labels(&self) -> Vec<String> {
        match self {
            Bucketization::NumericRanges { ranges } => ranges.iter().map(|r| r.label.clone()).collect(),
            Bucketization::ValueGroups { groups } => groups.iter().map(|g| g.label.clone()).collect(),
        }
    }

    fn bucket_of(&self, raw: &str) -> Option<u32> {
        match self {
            Bucketization::NumericRanges { ranges } => {
                let x: f64 = raw.parse().ok()?;
                ranges
                    .iter()
                    .position(|r| r.min.is_none_or(|lo| x >= lo) && r.max.is_none_or(|hi| x < hi))
                    .map(|p| p as u32)
            }
            Bucketization::ValueGroups { groups } => groups
                .iter()
                .position(|g| g.values.iter().any(|v| v == raw))
                .map(|p| p as u32),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeConfig {
    /// Column header in the input file.
    pub column: String,
    /// Name used in reports; defaults to `column`.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub cardinality: Option<usize>,
    /// Value dictionary: label at position k gets code k.
    #[serde(default)]
    pub values: Option<Vec<String>>,
    #[serde(default)]
    pub buckets: Option<Bucketization>,
}

/// Ingestion config, usually read from a TOML document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    #[serde(default)]
    pub csv: CsvOptions,
    #[serde(default)]
    pub missing: MissingPolicy,
    #[serde(default = "default_missing_tokens")]
    pub missing_tokens: Vec<String>,
    #[serde(rename = "attribute")]
    pub attributes: Vec<AttributeConfig>,
}

impl IngestConfig {
    /// Config selecting `columns` with inferred dictionaries and default CSV options.
    pub fn for_columns<S: AsRef<str>>(columns: &[S]) -> Self {
        IngestConfig {
            csv: CsvOptions::default(),
            missing: MissingPolicy::Reject,
            missing_tokens: default_missing_tokens(),
            attributes: columns
                .iter()
                .map(|c| AttributeConfig {
                    column: c.as_ref().to_string(),
                    name: None,
                    cardinality: None,
                    values: None,
                    buckets: None,
                })
                .collect(),
        }
    }

    /// Config that reproduces `schema` exactly, with every dictionary declared.
    pub fn for_schema(schema: &Schema) -> Self {
        let mut cfg = Self::for_columns(
            &schema.attributes().iter().map(|a| a.name.as_str()).collect::<Vec<_>>(),
        );
        for (ac, a) in cfg.attributes.iter_mut().zip(schema.attributes()) {
            ac.values = Some(a.values.clone());
        }
        cfg
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: IngestConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(Error::Config("no attributes of interest selected".into()));
        }
        let mut cols = HashSet::new();
        for a in &self.attributes {
            if !cols.insert(a.column.as_str()) {
                return Err(Error::Config(format!("column `{}` selected twice", a.column)));
            }
            if let Some(b) = &a.buckets {
                if a.values.is_some() || a.cardinality.is_some() {
                    return Err(Error::Config(format!(
                        "attribute `{}`: buckets cannot be combined with values or cardinality",
                        a.column
                    )));
                }
                b.validate(&a.column)?;
            }
            if let (Some(vals), Some(c)) = (&a.values, a.cardinality) {
                if vals.len() != c {
                    return Err(Error::Config(format!(
                        "attribute `{}`: {} values listed but cardinality {} declared",
                        a.column,
                        vals.len(),
                        c
                    )));
                }
            }
        }
        Ok(())
    }
}

enum Coder<'a> {
    Dictionary(&'a [String]),
    Buckets(&'a Bucketization),
    Inferred { declared: Option<usize> },
}

/// Reads delimiter-separated text with a header row and builds the index over
/// the configured attributes. Unselected columns (labels included) are dropped.
pub fn ingest<R: Read>(reader: R, config: &IngestConfig) -> Result<IndexedDataset> {
    config.validate()?;
    let mut rdr = reader_builder(&config.csv)?.from_reader(reader);
    let headers = rdr.headers()?.clone();
    let positions = config
        .attributes
        .iter()
        .map(|a| {
            headers
                .iter()
                .position(|h| h == a.column)
                .ok_or_else(|| Error::UnknownColumn(a.column.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let names: Vec<String> = config
        .attributes
        .iter()
        .map(|a| a.name.clone().unwrap_or_else(|| a.column.clone()))
        .collect();

    // Raw cells, `None` for missing.
    let mut raw_rows: Vec<Vec<Option<String>>> = Vec::new();
    for (row_no, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(positions.len());
        for (k, &pos) in positions.iter().enumerate() {
            let cell = rec.get(pos).unwrap_or("");
            if config.missing_tokens.iter().any(|t| t == cell) {
                if config.missing == MissingPolicy::Reject {
                    return Err(Error::MissingValue {
                        row: row_no + 1,
                        attribute: names[k].clone(),
                    });
                }
                row.push(None);
            } else {
                row.push(Some(cell.to_string()));
            }
        }
        raw_rows.push(row);
    }
    if raw_rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut attributes = Vec::with_capacity(config.attributes.len());
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(config.attributes.len());
    for (k, ac) in config.attributes.iter().enumerate() {
        let coder = match (&ac.values, &ac.buckets) {
            (Some(v), _) => Coder::Dictionary(v),
            (None, Some(b)) => Coder::Buckets(b),
            (None, None) => Coder::Inferred {
                declared: ac.cardinality,
            },
        };
        let (attr, codes) = encode_column(&names[k], &coder, raw_rows.iter().map(|r| r[k].as_deref()))?;
        attributes.push(attr);
        columns.push(codes);
    }
    let schema = Schema::new(attributes)?;
    let rows = (0..raw_rows.len()).map(|r| columns.iter().map(|c| c[r]).collect::<Vec<u32>>());
    IndexedDataset::from_rows(schema, rows)
}

pub fn ingest_path(path: impl AsRef<Path>, config: &IngestConfig) -> Result<IndexedDataset> {
    ingest(std::fs::File::open(path)?, config)
}

fn reader_builder(opts: &CsvOptions) -> Result<csv::ReaderBuilder> {
    let mut builder = csv::ReaderBuilder::new();
    builder
        .delimiter(ascii_byte(opts.delimiter, "delimiter")?)
        .quote(ascii_byte(opts.quote, "quote")?)
        .quoting(opts.quoting)
        .has_headers(true)
        .trim(if opts.trim { csv::Trim::All } else { csv::Trim::None });
    Ok(builder)
}

/// Column headers of delimiter-separated text.
pub fn read_headers<R: Read>(reader: R, opts: &CsvOptions) -> Result<Vec<String>> {
    let mut rdr = reader_builder(opts)?.from_reader(reader);
    Ok(rdr.headers()?.iter().map(str::to_string).collect())
}

/// Writes rows as labelled CSV with an attribute-name header. Each row is
/// repeated by its multiplicity.
pub fn write_rows<W: Write>(writer: W, schema: &Schema, rows: &[(Vec<u32>, u64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(schema.attributes().iter().map(|a| a.name.as_str()))?;
    for (row, mult) in rows {
        let labels: Vec<&str> = row
            .iter()
            .enumerate()
            .map(|(i, &v)| schema.attribute(i).label(v))
            .collect();
        for _ in 0..*mult {
            w.write_record(&labels)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn ascii_byte(c: char, what: &str) -> Result<u8> {
    if c.is_ascii() {
        Ok(c as u8)
    } else {
        Err(Error::Config(format!("{what} must be an ASCII character")))
    }
}

fn encode_column<'a>(
    name: &str,
    coder: &Coder<'_>,
    cells: impl Iterator<Item = Option<&'a str>>,
) -> Result<(Attribute, Vec<u32>)> {
    let cells: Vec<Option<&str>> = cells.collect();
    let mut labels: Vec<String>;
    let mut inferred = false;
    let mut codes: Vec<Option<u32>> = Vec::with_capacity(cells.len());
    match coder {
        Coder::Dictionary(values) => {
            labels = values.to_vec();
            let lookup: HashMap<&str, u32> = values
                .iter()
                .enumerate()
                .map(|(i, v)| (v.as_str(), i as u32))
                .collect();
            for cell in &cells {
                codes.push(match cell {
                    None => None,
                    Some(v) => Some(*lookup.get(v).ok_or_else(|| Error::UnknownValue {
                        attribute: name.to_string(),
                        value: v.to_string(),
                    })?),
                });
            }
        }
        Coder::Buckets(b) => {
            labels = b.labels();
            for cell in &cells {
                codes.push(match cell {
                    None => None,
                    Some(v) => Some(b.bucket_of(v).ok_or_else(|| Error::Unbucketed {
                        attribute: name.to_string(),
                        value: v.to_string(),
                    })?),
                });
            }
        }
        Coder::Inferred { declared } => {
            labels = Vec::new();
            let mut lookup: HashMap<&str, u32> = HashMap::new();
            for cell in &cells {
                codes.push(cell.map(|v| {
                    *lookup.entry(v).or_insert_with(|| {
                        labels.push(v.to_string());
                        (labels.len() - 1) as u32
                    })
                }));
            }
            match declared {
                Some(c) if labels.len() > *c => {
                    return Err(Error::CardinalityExceeded {
                        attribute: name.to_string(),
                        declared: *c,
                        found: labels.len(),
                    })
                }
                Some(c) => {
                    for k in labels.len()..*c {
                        labels.push(format!("<unseen:{k}>"));
                    }
                }
                None => inferred = true,
            }
        }
    }
    let missing_code = labels.len() as u32;
    if cells.iter().any(Option::is_none) {
        labels.push(MISSING_LABEL.to_string());
    }
    if labels.len() < 2 {
        return Err(Error::DegenerateAttribute(name.to_string()));
    }
    let codes = codes.into_iter().map(|c| c.unwrap_or(missing_code)).collect();
    Ok((
        Attribute {
            name: name.to_string(),
            values: labels,
            inferred,
        },
        codes,
    ))
}
