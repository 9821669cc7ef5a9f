//! Degree-23 character tables of the candidate monodromy groups and the
//! trace-sequence eliminations that single out Co2.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primes for which power maps are bundled.
pub const POWER_MAP_PRIMES: [u64; 4] = [2, 3, 5, 7];

/// Environment variable overriding the character-table directory.
pub const DATA_DIR_ENV: &str = "HYPEXP_DATA_DIR";

/// File stems of the candidate groups, in report order.
pub const CANDIDATES: [&str; 7] = ["a24", "s24", "m24", "psl2_23", "pgl2_23", "co3", "co2"];

const BUNDLED: [(&str, &str); 7] = [
    ("a24", include_str!("../data/chartables/a24.json")),
    ("s24", include_str!("../data/chartables/s24.json")),
    ("m24", include_str!("../data/chartables/m24.json")),
    ("psl2_23", include_str!("../data/chartables/psl2_23.json")),
    ("pgl2_23", include_str!("../data/chartables/pgl2_23.json")),
    ("co3", include_str!("../data/chartables/co3.json")),
    ("co2", include_str!("../data/chartables/co2.json")),
];

#[derive(Debug, Error)]
pub enum FingerprintError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{group}: invariant violated at class {class}: {msg}")]
    InvariantViolation { group: String, class: String, msg: String },
    #[error("no power map for prime {prime} (class {class})")]
    MissingPowerMap { class: String, prime: u64 },
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, FingerprintError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    name: String,
    order: u64,
    size: String,
    chi: i64,
    power_maps: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    group: String,
    degree: i64,
    classes: Vec<RawClass>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassInfo {
    pub name: String,
    pub order: u64,
    pub size: u128,
    pub chi: i64,
    /// class index of c^l for l in [`POWER_MAP_PRIMES`]
    power_maps: [usize; 4],
}

/// A validated table: class data of one degree-23 rational character.
#[derive(Debug, Clone, Serialize)]
pub struct CharTable {
    pub group_name: String,
    pub degree: i64,
    pub classes: Vec<ClassInfo>,
    /// literature class number -> class name
    pub aliases: BTreeMap<String, String>,
}

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(FingerprintError::Schema(msg.into()))
}

impl CharTable {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawTable = serde_json::from_str(text).map_err(|e| FingerprintError::Schema(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawTable) -> Result<Self> {
        let index: BTreeMap<&str, usize> =
            raw.classes.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect();
        if index.len() != raw.classes.len() {
            return schema("duplicate class names");
        }
        let mut classes = Vec::with_capacity(raw.classes.len());
        for c in &raw.classes {
            let size: u128 = c
                .size
                .parse()
                .map_err(|_| FingerprintError::Schema(format!("class {}: size {:?} is not an integer", c.name, c.size)))?;
            let mut maps = [0usize; 4];
            for (slot, l) in maps.iter_mut().zip(POWER_MAP_PRIMES) {
                let Some(target) = c.power_maps.get(&l.to_string()) else {
                    return schema(format!("class {}: missing power map for {l}", c.name));
                };
                let Some(&t) = index.get(target.as_str()) else {
                    return schema(format!("class {}: power map target {target} is not a class", c.name));
                };
                *slot = t;
            }
            classes.push(ClassInfo { name: c.name.clone(), order: c.order, size, chi: c.chi, power_maps: maps });
        }
        for (k, v) in &raw.aliases {
            if !index.contains_key(v.as_str()) {
                return schema(format!("alias {k} -> {v}: no such class"));
            }
        }
        let table = CharTable { group_name: raw.group, degree: raw.degree, classes, aliases: raw.aliases };
        table.validate()?;
        Ok(table)
    }

    fn violation<T>(&self, class: &str, msg: impl Into<String>) -> Result<T> {
        Err(FingerprintError::InvariantViolation {
            group: self.group_name.clone(),
            class: class.to_string(),
            msg: msg.into(),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.degree != 23 {
            return self.violation("-", format!("degree {} is not 23", self.degree));
        }
        let ids: Vec<&ClassInfo> = self.classes.iter().filter(|c| c.order == 1).collect();
        match ids.as_slice() {
            [id] if id.chi == 23 => {}
            [id] => return self.violation(&id.name, format!("identity has chi = {}", id.chi)),
            _ => return self.violation("-", "there must be exactly one class of order 1"),
        }
        for c in &self.classes {
            if c.order == 0 || c.size == 0 {
                return self.violation(&c.name, "order and size must be positive");
            }
            for (l, &t) in POWER_MAP_PRIMES.iter().zip(&c.power_maps) {
                let want = c.order / num_integer::gcd(c.order, *l);
                if self.classes[t].order != want {
                    return self.violation(
                        &c.name,
                        format!("{l}-th power has order {}, expected {want}", self.classes[t].order),
                    );
                }
            }
        }
        let overflow = |c: &ClassInfo| self.violation::<()>(&c.name, "class-size sums overflow");
        let (mut order, mut first, mut second) = (0i128, 0i128, 0i128);
        for c in &self.classes {
            let size = i128::try_from(c.size).ok();
            let step = size.and_then(|s| {
                let chi = c.chi as i128;
                Some((s, s.checked_mul(chi)?, s.checked_mul(chi * chi)?))
            });
            let Some((s, s1, s2)) = step else { return overflow(c) };
            match (order.checked_add(s), first.checked_add(s1), second.checked_add(s2)) {
                (Some(a), Some(b), Some(d)) => (order, first, second) = (a, b, d),
                _ => return overflow(c),
            }
        }
        if first != 0 {
            return self.violation("-", format!("sum of size * chi is {first}, not 0"));
        }
        if second != order {
            return self.violation("-", format!("sum of size * chi^2 is {second}, not |G| = {order}"));
        }
        Ok(())
    }

    pub fn group_order(&self) -> u128 {
        self.classes.iter().map(|c| c.size).sum()
    }

    pub fn class_index(&self, name: &str) -> Result<usize> {
        let name = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.classes
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| FingerprintError::UnknownClass(name.to_string()))
    }

    pub fn min_chi(&self) -> i64 {
        self.classes.iter().map(|c| c.chi).min().unwrap_or(0)
    }

    /// Class of c^k, composing the prime power maps.
    pub fn power(&self, class: usize, k: u64) -> Result<usize> {
        let mut c = class;
        let mut k = k;
        for (slot, &l) in POWER_MAP_PRIMES.iter().enumerate() {
            while k.is_multiple_of(l) {
                c = self.classes[c].power_maps[slot];
                k /= l;
            }
        }
        if k != 1 {
            let prime = (2..=k).find(|d| k.is_multiple_of(*d)).unwrap_or(k);
            return Err(FingerprintError::MissingPowerMap { class: self.classes[class].name.clone(), prime });
        }
        Ok(c)
    }

    /// "14a (class 29)" when the class has an alias.
    pub fn display_name(&self, class: usize) -> String {
        let name = &self.classes[class].name;
        match self.aliases.iter().find(|(_, v)| *v == name) {
            Some((alias, _)) => format!("{name} (class {alias})"),
            None => name.clone(),
        }
    }
}

pub fn load_table(path: &Path) -> Result<CharTable> {
    let text =
        std::fs::read_to_string(path).map_err(|source| FingerprintError::Io { path: path.to_path_buf(), source })?;
    CharTable::from_json(&text)
}

/// The bundled tables, in [`CANDIDATES`] order.
pub fn bundled_tables() -> Vec<CharTable> {
    BUNDLED.iter().map(|(_, text)| CharTable::from_json(text).expect("bundled table is valid")).collect()
}

/// Candidate tables from `dir` (or `$HYPEXP_DATA_DIR`), else the bundled ones.
pub fn candidate_tables(dir: Option<&Path>) -> Result<Vec<CharTable>> {
    let from_env = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    match dir.map(Path::to_path_buf).or(from_env) {
        Some(d) => CANDIDATES.iter().map(|stem| load_table(&d.join(format!("{stem}.json")))).collect(),
        None => Ok(bundled_tables()),
    }
}

/// (chi(c), chi(c^2), ..., chi(c^kmax)).
pub fn trace_sequence_of_class(table: &CharTable, class: usize, kmax: u64) -> Result<Vec<i64>> {
    (1..=kmax).map(|k| Ok(table.classes[table.power(class, k)?].chi)).collect()
}

/// Classes whose trace sequence is exactly `seq`.
pub fn find_classes_matching(table: &CharTable, seq: &[i64]) -> Vec<usize> {
    (0..table.classes.len())
        .filter(|&c| trace_sequence_of_class(table, c, seq.len() as u64).is_ok_and(|s| s == seq))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupVerdict {
    pub group: String,
    pub admits: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eliminated: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentificationReport {
    pub sequence: Vec<i64>,
    pub verdicts: Vec<GroupVerdict>,
}

impl IdentificationReport {
    /// Groups with at least one matching class.
    pub fn survivors(&self) -> Vec<&str> {
        self.verdicts.iter().filter(|v| !v.admits.is_empty()).map(|v| v.group.as_str()).collect()
    }
}

fn elimination_reason(table: &CharTable, seq: &[i64]) -> String {
    let min = table.min_chi();
    if let Some(&v) = seq.iter().filter(|&&v| v < min).min() {
        return format!("min-value rule: chi >= {min} on {}, but the sequence contains {v}", table.group_name);
    }
    let k = seq.len() as u64;
    let last = seq[seq.len() - 1];
    let mut chains = Vec::new();
    for c in 0..table.classes.len() {
        let Ok(s) = trace_sequence_of_class(table, c, k) else { continue };
        if s[s.len() - 1] != last {
            continue;
        }
        if let Some(i) = s.iter().zip(seq).position(|(a, b)| a != b) {
            let power = table.power(c, i as u64 + 1).unwrap_or(c);
            chains.push(format!(
                "{}: power {} lies in {} with trace {}, not {}",
                table.display_name(c),
                i + 1,
                table.display_name(power),
                s[i],
                seq[i]
            ));
        }
    }
    if chains.is_empty() {
        format!("no class has trace {last} at power {k}")
    } else {
        chains.join("; ")
    }
}

/// Per-group verdicts for the trace sequence of a Frobenius element.
pub fn identify(tables: &[CharTable], seq: &[i64]) -> IdentificationReport {
    let verdicts = tables
        .iter()
        .map(|t| {
            let admits: Vec<String> = if seq.is_empty() {
                Vec::new()
            } else {
                find_classes_matching(t, seq).into_iter().map(|c| t.classes[c].name.clone()).collect()
            };
            let eliminated = match (admits.is_empty(), seq.is_empty()) {
                (false, _) => None,
                (true, true) => Some("empty sequence".to_string()),
                (true, false) => Some(elimination_reason(t, seq)),
            };
            GroupVerdict { group: t.group_name.clone(), admits, eliminated }
        })
        .collect();
    IdentificationReport { sequence: seq.to_vec(), verdicts }
}
