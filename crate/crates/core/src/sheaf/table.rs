//! Trace tables and their CSV/JSON forms.
//!
//! CSV layout: a first line `# {json header}`, then a header row
//! `t,count_0,...,count_{p-1}`, then one row per point. A point is written
//! `0` for the zero element and `g^k` for the k-th power of the generator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{GroupRingElement, RouCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    H,
    F,
    A0,
    B0,
    Convolution,
    Pushforward,
}

impl TraceKind {
    /// Kind F is the only one defined at t = 0.
    pub fn includes_zero(self) -> bool {
        self == TraceKind::F
    }
}

/// Values a trace table can hold.
pub trait TraceValue: Clone + Send + Sync {
    fn embed(&self) -> Complex64;
    fn vanishes(&self) -> bool;
}

impl TraceValue for RouCounts {
    fn embed(&self) -> Complex64 {
        self.complex_embed().value
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl TraceValue for GroupRingElement {
    fn embed(&self) -> Complex64 {
        self.complex_embed().value
    }
    fn vanishes(&self) -> bool {
        self.is_zero_value()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableHeader {
    pub p: u32,
    pub r: u32,
    /// monic, little-endian
    pub modulus: Vec<u32>,
    /// coefficients of the generator in the power basis
    pub generator: Vec<u32>,
    pub kind: TraceKind,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
}

impl TableHeader {
    pub fn q(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.r)
    }
}

/// Values on K^x indexed by discrete log, plus the value at 0 for kind F.
#[derive(Debug, Clone)]
pub struct TraceTable<V> {
    pub header: TableHeader,
    pub at_zero: Option<V>,
    pub by_log: Vec<V>,
}

impl<V: TraceValue> TraceTable<V> {
    /// Value at g^k.
    pub fn at_log(&self, k: u64) -> &V {
        &self.by_log[(k % self.by_log.len() as u64) as usize]
    }

    pub fn len(&self) -> usize {
        self.by_log.len() + self.at_zero.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Complete on K^x, and at 0 exactly when the kind requires it.
    pub fn is_complete(&self) -> bool {
        match self.header.q() {
            Some(q) => {
                self.by_log.len() as u64 == q - 1 && self.at_zero.is_some() == self.header.kind.includes_zero()
            }
            None => false,
        }
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("missing or malformed header line")]
    MissingHeader,
    #[error("bad header: {0}")]
    Header(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("table incomplete: {0}")]
    Incomplete(String),
}

fn validate_header(h: &TableHeader) -> Result<u64, TableError> {
    let bad = |m: &str| TableError::Header(m.to_string());
    if !crate::field::is_prime(h.p as u64) {
        return Err(bad("p is not prime"));
    }
    if h.r == 0 {
        return Err(bad("r must be positive"));
    }
    let q = h
        .q()
        .filter(|&q| q <= crate::field::DEFAULT_TABLE_LIMIT)
        .ok_or_else(|| bad("field too large for a serialized table"))?;
    if h.modulus.len() != h.r as usize + 1 || h.modulus.last() != Some(&1) || h.modulus.iter().any(|&c| c >= h.p) {
        return Err(bad("modulus must be monic of degree r"));
    }
    if h.generator.len() > h.r as usize || h.generator.iter().any(|&c| c >= h.p) {
        return Err(bad("generator coefficients out of range"));
    }
    Ok(q)
}

enum Point {
    Zero,
    Log(u64),
}

fn parse_point(s: &str, q: u64) -> Option<Point> {
    let s = s.trim();
    if s == "0" {
        return Some(Point::Zero);
    }
    let k: u64 = s.strip_prefix("g^")?.parse().ok()?;
    (k < q - 1).then_some(Point::Log(k))
}

fn format_point(k: Option<u64>) -> String {
    match k {
        None => "0".to_string(),
        Some(k) => format!("g^{k}"),
    }
}

fn assemble(
    header: TableHeader,
    q: u64,
    rows: Vec<(Point, Vec<i64>)>,
) -> Result<TraceTable<RouCounts>, TableError> {
    let p = header.p;
    let mut at_zero = None;
    let mut slots: Vec<Option<RouCounts>> = vec![None; (q - 1) as usize];
    for (i, (pt, counts)) in rows.into_iter().enumerate() {
        let row = i + 1;
        if counts.len() != p as usize {
            return Err(TableError::Row { row, msg: format!("expected {p} counts") });
        }
        let v = RouCounts::from_counts(p, counts);
        match pt {
            Point::Zero => {
                if !header.kind.includes_zero() {
                    return Err(TableError::Row { row, msg: "kind has no value at 0".into() });
                }
                if at_zero.replace(v).is_some() {
                    return Err(TableError::Row { row, msg: "duplicate point 0".into() });
                }
            }
            Point::Log(k) => {
                if slots[k as usize].replace(v).is_some() {
                    return Err(TableError::Row { row, msg: format!("duplicate point g^{k}") });
                }
            }
        }
    }
    let by_log: Option<Vec<RouCounts>> = slots.into_iter().collect();
    let by_log = by_log.ok_or_else(|| TableError::Incomplete("missing points of K^x".into()))?;
    if header.kind.includes_zero() && at_zero.is_none() {
        return Err(TableError::Incomplete("missing value at 0".into()));
    }
    Ok(TraceTable { header, at_zero, by_log })
}

impl TraceTable<RouCounts> {
    fn rows(&self) -> impl Iterator<Item = (Option<u64>, &RouCounts)> {
        self.at_zero
            .iter()
            .map(|v| (None, v))
            .chain(self.by_log.iter().enumerate().map(|(k, v)| (Some(k as u64), v)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&serde_json::to_string(&self.header).expect("header serializes"));
        out.push('\n');
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["t".to_string()];
        head.extend((0..self.header.p).map(|i| format!("count_{i}")));
        w.write_record(&head).expect("in-memory write");
        for (k, v) in self.rows() {
            let mut rec = vec![format_point(k)];
            rec.extend(v.counts().iter().map(|c| c.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let values: Vec<serde_json::Value> = self
            .rows()
            .map(|(k, v)| serde_json::json!({ "t": format_point(k), "counts": v.counts() }))
            .collect();
        serde_json::json!({ "header": self.header, "values": values })
    }
}

pub fn parse_trace_table_csv(text: &str) -> Result<TraceTable<RouCounts>, TableError> {
    let (first, rest) = text.split_once('\n').ok_or(TableError::MissingHeader)?;
    let json = first.trim_end_matches('\r').strip_prefix("# ").ok_or(TableError::MissingHeader)?;
    let header: TableHeader = serde_json::from_str(json).map_err(|e| TableError::Header(e.to_string()))?;
    let q = validate_header(&header)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
    let cols = reader.headers()?.clone();
    if cols.len() != header.p as usize + 1 || &cols[0] != "t" {
        return Err(TableError::Header("column names do not match p".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != header.p as usize + 1 {
            return Err(TableError::Row { row, msg: "wrong number of fields".into() });
        }
        let pt = parse_point(&rec[0], q).ok_or_else(|| TableError::Row { row, msg: "bad point".into() })?;
        let counts: Result<Vec<i64>, _> = rec.iter().skip(1).map(|f| f.trim().parse::<i64>()).collect();
        let counts = counts.map_err(|e| TableError::Row { row, msg: e.to_string() })?;
        rows.push((pt, counts));
        if rows.len() as u64 > q {
            return Err(TableError::Row { row, msg: "more rows than field elements".into() });
        }
    }
    assemble(header, q, rows)
}

#[derive(Deserialize)]
struct JsonTable {
    header: TableHeader,
    values: Vec<JsonRow>,
}

#[derive(Deserialize)]
struct JsonRow {
    t: String,
    counts: Vec<i64>,
}

pub fn parse_trace_table_json(text: &str) -> Result<TraceTable<RouCounts>, TableError> {
    let raw: JsonTable = serde_json::from_str(text)?;
    let q = validate_header(&raw.header)?;
    if raw.values.len() as u64 > q {
        return Err(TableError::Row { row: q as usize + 1, msg: "more rows than field elements".into() });
    }
    let mut rows = Vec::with_capacity(raw.values.len());
    for (i, r) in raw.values.into_iter().enumerate() {
        let pt = parse_point(&r.t, q).ok_or_else(|| TableError::Row { row: i + 1, msg: "bad point".into() })?;
        rows.push((pt, r.counts));
    }
    assemble(raw.header, q, rows)
}
