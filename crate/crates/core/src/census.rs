//! Census files: one JSON object per line, fields in a fixed order, plus a
//! summary sidecar with counts and run metadata.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifiedRecord, Location, QuotientSingularity, SeriesTag};
use crate::error::{Error, Result};
use crate::weights::{FamilyKind, HypersurfaceFamily, WeightSystem};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasketEntry {
    pub r: u64,
    pub w: Vec<u64>,
    /// `vertex:i`, `edge:i,j`, `curve:i,j` or `stratum:i,j,k,...`.
    pub location: String,
    /// Number of points; absent for non-isolated entries.
    pub count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeriesField {
    pub b: [u64; 3],
    pub k: u64,
}

/// One line of a census file.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CensusRecord {
    pub weights: Vec<u64>,
    pub degree: u64,
    pub kind: FamilyKind,
    pub quasi_smooth: bool,
    pub terminal: bool,
    pub tiger_free: bool,
    pub ke: bool,
    pub series: Option<SeriesField>,
    pub basket: Vec<BasketEntry>,
}

fn join(idx: &[usize]) -> String {
    idx.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl From<&QuotientSingularity> for BasketEntry {
    fn from(q: &QuotientSingularity) -> Self {
        let (location, count) = match &q.location {
            Location::Vertex(i) => (format!("vertex:{i}"), Some(1)),
            Location::EdgePoints(i, j, c) => (format!("edge:{i},{j}"), Some(*c)),
            Location::NonIsolatedCurve(i, j) => (format!("curve:{i},{j}"), None),
            Location::NonIsolatedStratum(s) => (format!("stratum:{}", join(s)), None),
        };
        BasketEntry {
            r: q.r,
            w: q.w.clone(),
            location,
            count,
        }
    }
}

impl From<&ClassifiedRecord> for CensusRecord {
    fn from(c: &ClassifiedRecord) -> Self {
        CensusRecord {
            weights: c.family.weights().to_vec(),
            degree: c.family.degree,
            kind: c.family.kind(),
            quasi_smooth: c.quasi_smooth,
            terminal: c.terminal,
            tiger_free: c.tiger_free,
            ke: c.ke,
            series: c.series.map(|SeriesTag { b, k }| SeriesField { b, k }),
            basket: c.basket.iter().map(BasketEntry::from).collect(),
        }
    }
}

impl CensusRecord {
    pub fn family(&self) -> Result<HypersurfaceFamily> {
        Ok(HypersurfaceFamily::new(
            WeightSystem::canonicalize(&self.weights)?,
            self.degree,
        ))
    }

    fn key(&self) -> (&[u64], u64) {
        (&self.weights, self.degree)
    }
}

/// Canonical order: weights lexicographically, then degree.
pub fn sort_records(records: &mut [CensusRecord]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()));
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[CensusRecord]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<CensusRecord>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: n + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_jsonl_file(path: &Path) -> Result<Vec<CensusRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_jsonl(std::io::BufReader::new(f))
}

/// Flat CSV rendering: tuples space-separated, basket as `1/r(w)@location`.
pub fn write_csv<W: Write>(out: W, records: &[CensusRecord]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "weights",
        "degree",
        "kind",
        "quasi_smooth",
        "terminal",
        "tiger_free",
        "ke",
        "series",
        "basket",
    ])
    .map_err(io)?;
    let spaced = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    for r in records {
        let series = r
            .series
            .as_ref()
            .map(|s| format!("{};{}", spaced(&s.b), s.k))
            .unwrap_or_default();
        let basket = r
            .basket
            .iter()
            .map(|b| {
                let count = b.count.map(|c| format!("x{c}")).unwrap_or_default();
                format!("1/{}({})@{}{}", b.r, spaced(&b.w), b.location, count)
            })
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([
            spaced(&r.weights),
            r.degree.to_string(),
            r.kind.as_str().to_string(),
            r.quasi_smooth.to_string(),
            r.terminal.to_string(),
            r.tiger_free.to_string(),
            r.ke.to_string(),
            series,
            basket,
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Set comparison of two censuses keyed by `(weights, degree)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub only_in_a: Vec<CensusRecord>,
    pub only_in_b: Vec<CensusRecord>,
    pub common: usize,
    /// Keys present in both whose records differ.
    pub changed: Vec<(CensusRecord, CensusRecord)>,
}

impl DiffReport {
    pub fn identical(&self) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty() && self.changed.is_empty()
    }
}

pub fn diff(a: &[CensusRecord], b: &[CensusRecord]) -> DiffReport {
    let index = |v: &[CensusRecord]| -> BTreeMap<(Vec<u64>, u64), CensusRecord> {
        v.iter()
            .map(|r| ((r.weights.clone(), r.degree), r.clone()))
            .collect()
    };
    let (ma, mb) = (index(a), index(b));
    let mut rep = DiffReport::default();
    for (k, ra) in &ma {
        match mb.get(k) {
            None => rep.only_in_a.push(ra.clone()),
            Some(rb) => {
                rep.common += 1;
                if ra != rb {
                    rep.changed.push((ra.clone(), rb.clone()));
                }
            }
        }
    }
    rep.only_in_b = mb
        .iter()
        .filter(|(k, _)| !ma.contains_key(*k))
        .map(|(_, r)| r.clone())
        .collect();
    rep
}

/// Flag counts over a record list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub records: usize,
    pub quasi_smooth: usize,
    pub terminal: usize,
    pub tiger_free: usize,
    pub ke: usize,
    pub series_members: usize,
}

pub fn counts(records: &[CensusRecord]) -> Counts {
    let n = |f: fn(&CensusRecord) -> bool| records.iter().filter(|r| f(r)).count();
    Counts {
        records: records.len(),
        quasi_smooth: n(|r| r.quasi_smooth),
        terminal: n(|r| r.terminal),
        tiger_free: n(|r| r.tiger_free),
        ke: n(|r| r.ke),
        series_members: n(|r| r.series.is_some()),
    }
}

/// Contents of the `.summary.json` sidecar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub command: String,
    pub counts: Counts,
    /// Command-specific numbers (sporadic, series, bounds, ...).
    pub extra: serde_json::Map<String, serde_json::Value>,
    pub threads: usize,
    pub git_hash: Option<String>,
}

pub fn summary_path(census: &Path) -> PathBuf {
    let mut s = census.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// Best-effort `git rev-parse HEAD` of the working directory.
pub fn git_hash() -> Option<String> {
    let out = std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, fano};

    fn records() -> Vec<CensusRecord> {
        [
            [1, 1, 1, 1, 1],
            [1, 1, 1, 1, 2],
            [1, 1, 1, 2, 2],
            [2, 2, 3, 4, 8],
        ]
        .iter()
        .map(|w| CensusRecord::from(&classify(&fano(w).unwrap()).unwrap()))
        .collect()
    }

    #[test]
    fn field_order_is_fixed() {
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records()[1..2]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"weights\":[1,1,1,1,2],\"degree\":5,\"kind\":\"fano\",\"quasi_smooth\":true,\
             \"terminal\":true,\"tiger_free\":false,\"ke\":false,\"series\":null,\
             \"basket\":[{\"r\":2,\"w\":[1,1,1],\"location\":\"vertex:4\",\"count\":1}]}\n"
        );
    }

    #[test]
    fn round_trip() {
        let recs = records();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &recs).unwrap();
        assert_eq!(read_jsonl(&buf[..]).unwrap(), recs);
        let s = &recs[3].series;
        assert_eq!(s, &Some(SeriesField { b: [2, 3, 4], k: 1 }));
    }

    #[test]
    fn parse_errors_carry_the_line() {
        let text = "{\"weights\":[1,1,1,1,1]}\n";
        match read_jsonl(text.as_bytes()) {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records()).unwrap();
        buf.extend_from_slice(b"not json\n");
        match read_jsonl(&buf[..]) {
            Err(Error::Parse {
                line: 5, column: 2, ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diffs() {
        let recs = records();
        assert!(diff(&recs, &recs).identical());
        let rep = diff(&recs, &recs[1..]);
        assert_eq!(
            (rep.only_in_a.len(), rep.only_in_b.len(), rep.common),
            (1, 0, 3)
        );
        assert!(!rep.identical());
        let mut other = recs.clone();
        other[0].terminal = false;
        assert_eq!(diff(&recs, &other).changed.len(), 1);
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &records()[2..3]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "1 1 1 2 2,6,fano,true,true,false,false,,\"1/2(1 1 1)@edge:3,4x3\""
        );
    }

    #[test]
    fn counting() {
        let c = counts(&records());
        assert_eq!((c.records, c.quasi_smooth, c.terminal), (4, 4, 3));
        assert_eq!(c.series_members, 1);
    }
}
