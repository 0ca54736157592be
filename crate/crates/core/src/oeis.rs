//! OEIS b-files: strict parsing, bundled fixtures, a local cache and term
//! comparison.
//!
//! Lookups try the bundled fixtures first, then the cache directory, and
//! only then the network (unless offline).

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "BALMAT_OEIS_CACHE";
pub const OFFLINE_ENV: &str = "BALMAT_OFFLINE";
pub const DEFAULT_ENDPOINT: &str = "https://oeis.org/A{digits}/b{digits}.txt";

const CHECKSUMS: &str = include_str!("../fixtures/oeis/SHA256SUMS");

const FIXTURES: &[(&str, &str)] = &[
    ("b002896.txt", include_str!("../fixtures/oeis/b002896.txt")),
    ("b060521.txt", include_str!("../fixtures/oeis/b060521.txt")),
    ("b172554.txt", include_str!("../fixtures/oeis/b172554.txt")),
    ("b172555.txt", include_str!("../fixtures/oeis/b172555.txt")),
    ("b172556.txt", include_str!("../fixtures/oeis/b172556.txt")),
    ("b172557.txt", include_str!("../fixtures/oeis/b172557.txt")),
    ("b172558.txt", include_str!("../fixtures/oeis/b172558.txt")),
    ("b172559.txt", include_str!("../fixtures/oeis/b172559.txt")),
    ("b172560.txt", include_str!("../fixtures/oeis/b172560.txt")),
];

/// A syntactically valid OEIS identifier such as `A002896`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OeisRef(String);

impl OeisRef {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let valid = t.len() == 7 && t.starts_with('A') && t[1..].bytes().all(|b| b.is_ascii_digit());
        if !valid {
            return Err(Error::invalid(format!(
                "{text:?} is not an OEIS id (A followed by six digits)"
            )));
        }
        Ok(OeisRef(t.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn digits(&self) -> &str {
        &self.0[1..]
    }

    pub fn bfile_name(&self) -> String {
        format!("b{}.txt", self.digits())
    }
}

impl fmt::Display for OeisRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Fixture,
    Cache(PathBuf),
    Network(String),
    Inline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFile {
    pub id: Option<OeisRef>,
    pub entries: Vec<(i64, BigInt)>,
    pub source: Source,
}

impl BFile {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &BigInt> {
        self.entries.iter().map(|(_, v)| v)
    }

    pub fn get(&self, index: i64) -> Option<&BigInt> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn first_index(&self) -> Option<i64> {
        self.entries.first().map(|(i, _)| *i)
    }

    /// The entries as one run of consecutive indices, if they form one.
    pub fn to_sequence(&self) -> Result<crate::recurrence::Sequence> {
        let offset = self.first_index().unwrap_or(0);
        for (pos, (i, _)) in self.entries.iter().enumerate() {
            if *i != offset + pos as i64 {
                return Err(Error::invalid(format!("index {i} breaks the consecutive run")));
            }
        }
        Ok(crate::recurrence::Sequence::new(
            offset,
            self.values().cloned().collect(),
        ))
    }
}

/// Parses b-file text: one `index value` pair per line, `#` comments and
/// blank lines ignored, indices strictly increasing.
pub fn parse_bfile(text: &str) -> Result<Vec<(i64, BigInt)>> {
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected two fields, found {}", fields.len()),
            });
        }
        let index: i64 = fields[0].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad index {:?}", fields[0]),
        })?;
        let value: BigInt = fields[1].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad value {:?}", fields[1]),
        })?;
        if let Some((prev, _)) = entries.last() {
            if index <= *prev {
                return Err(Error::Parse {
                    line,
                    msg: format!("index {index} does not increase on {prev}"),
                });
            }
        }
        entries.push((index, value));
    }
    Ok(entries)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn expected_checksum(name: &str) -> Option<&'static str> {
    CHECKSUMS.lines().find_map(|l| {
        let mut parts = l.split_whitespace();
        let sum = parts.next()?;
        (parts.next()? == name).then_some(sum)
    })
}

/// Ids with a bundled b-file.
pub fn bundled_ids() -> Vec<OeisRef> {
    FIXTURES
        .iter()
        .map(|(name, _)| OeisRef::parse(&format!("A{}", &name[1..7])).expect("fixture names are valid"))
        .collect()
}

/// The bundled b-file for `id`, checked against its recorded SHA-256.
pub fn bundled_bfile(id: &OeisRef) -> Result<Option<BFile>> {
    let name = id.bfile_name();
    let Some((_, text)) = FIXTURES.iter().find(|(n, _)| *n == name) else {
        return Ok(None);
    };
    let expected = expected_checksum(&name).ok_or_else(|| Error::Checksum(name.clone()))?;
    if sha256_hex(text.as_bytes()) != expected {
        return Err(Error::Checksum(name));
    }
    Ok(Some(BFile {
        id: Some(id.clone()),
        entries: parse_bfile(text)?,
        source: Source::Fixture,
    }))
}

/// Where and whether to look for b-files that are not bundled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchConfig {
    pub cache_dir: Option<PathBuf>,
    pub offline: bool,
    /// URL template; `{digits}` is replaced by the six digits of the id.
    pub endpoint: String,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            cache_dir: None,
            offline: false,
            endpoint: DEFAULT_ENDPOINT.to_string(),
        }
    }
}

impl FetchConfig {
    /// Defaults overridden by `BALMAT_OEIS_CACHE` and `BALMAT_OFFLINE`.
    pub fn from_env() -> Self {
        let offline = std::env::var(OFFLINE_ENV)
            .map(|v| !matches!(v.as_str(), "" | "0" | "false"))
            .unwrap_or(false);
        FetchConfig {
            cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from),
            offline,
            ..FetchConfig::default()
        }
    }

    pub fn url_for(&self, id: &OeisRef) -> String {
        self.endpoint.replace("{digits}", id.digits())
    }
}

fn write_atomically(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
    Ok(target)
}

/// Fixture, then cache, then network.
pub fn fetch_bfile(id: &OeisRef, config: &FetchConfig) -> Result<BFile> {
    if let Some(b) = bundled_bfile(id)? {
        return Ok(b);
    }
    if let Some(dir) = &config.cache_dir {
        let path = dir.join(id.bfile_name());
        if path.is_file() {
            let text = std::fs::read_to_string(&path)?;
            return Ok(BFile {
                id: Some(id.clone()),
                entries: parse_bfile(&text)?,
                source: Source::Cache(path),
            });
        }
    }
    if config.offline {
        return Err(Error::Unavailable(id.to_string()));
    }
    let url = config.url_for(id);
    let text = ureq::get(&url)
        .call()
        .map_err(|e| Error::Network(format!("{url}: {e}")))?
        .body_mut()
        .read_to_string()
        .map_err(|e| Error::Network(format!("{url}: {e}")))?;
    let entries = parse_bfile(&text)?;
    if let Some(dir) = &config.cache_dir {
        write_atomically(dir, &id.bfile_name(), &text)?;
    }
    Ok(BFile {
        id: Some(id.clone()),
        entries,
        source: Source::Network(url),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub index: i64,
    pub computed: BigInt,
    pub expected: BigInt,
}

/// Result of lining up computed terms against a b-file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchReport {
    pub computed_terms: usize,
    pub reference_terms: usize,
    /// Computed terms whose index also appears in the b-file, stopping at
    /// the first index the b-file lacks.
    pub compared: usize,
    pub matching_prefix: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl MatchReport {
    pub fn full_match(&self) -> bool {
        self.first_mismatch.is_none() && self.compared > 0
    }
}

/// Compares `terms[i]` with the b-file entry at index `offset + i`.
pub fn compare(terms: &[BigInt], bfile: &BFile, offset: i64) -> MatchReport {
    let lookup: BTreeMap<i64, &BigInt> = bfile.entries.iter().map(|(i, v)| (*i, v)).collect();
    let mut report = MatchReport {
        computed_terms: terms.len(),
        reference_terms: bfile.len(),
        compared: 0,
        matching_prefix: 0,
        first_mismatch: None,
    };
    for (pos, t) in terms.iter().enumerate() {
        let index = offset + pos as i64;
        let Some(&expected) = lookup.get(&index) else {
            break;
        };
        report.compared += 1;
        if report.first_mismatch.is_some() {
            continue;
        }
        if t == expected {
            report.matching_prefix += 1;
        } else {
            report.first_mismatch = Some(Mismatch {
                index,
                computed: t.clone(),
                expected: expected.clone(),
            });
        }
    }
    report
}
