//! Exhaustive search over a box of ascending weight tuples.
//!
//! This is the independent check on the structured search: no case analysis,
//! just every well-formed tuple in the box run through the quasi-smoothness
//! cascade. The only shortcut is that the largest weight is solved from the
//! vertex condition at the last coordinate instead of looped over, which can
//! be switched off.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsmooth::{first_failure, Failure};
use crate::weights::{
    gcd_all, well_formedness_defect, FamilyKind, HypersurfaceFamily, WeightSystem,
};

/// Degree relation searched for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxKind {
    /// `d = sum - 1`
    Fano,
    /// `d = sum`
    CalabiYau,
    /// `d = sum + k`
    GeneralType(u64),
}

impl BoxKind {
    fn offset(self) -> i64 {
        match self {
            BoxKind::Fano => -1,
            BoxKind::CalabiYau => 0,
            BoxKind::GeneralType(k) => k as i64,
        }
    }

    pub fn family_kind(self) -> FamilyKind {
        match self {
            BoxKind::Fano => FamilyKind::Fano,
            BoxKind::CalabiYau => FamilyKind::CalabiYau,
            BoxKind::GeneralType(_) => FamilyKind::GeneralType,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BruteConfig {
    /// Per-coordinate maxima `a_i <= bounds[i]`; the length fixes `n + 1`.
    pub bounds: Vec<u64>,
    pub kind: BoxKind,
    /// Solve the last weight from the vertex condition instead of looping.
    pub prune: bool,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Journal of finished `(a_0, a_1)` prefixes, for resuming long runs.
    pub checkpoint: Option<PathBuf>,
}

impl BruteConfig {
    pub fn new(bounds: Vec<u64>, kind: BoxKind) -> Self {
        BruteConfig {
            bounds,
            kind,
            prune: true,
            threads: None,
            checkpoint: None,
        }
    }
}

/// A stage of the filter cascade.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Ascending,
    Vertex,
    WellFormed,
    Codim2,
    Irreducible,
    Subsets,
}

/// The filter cascade applied to each tuple, cheapest first.
pub fn prune_order() -> &'static [(Stage, &'static str)] {
    &[
        (
            Stage::Ascending,
            "a_0 <= a_1 <= ... <= a_n inside the box; with pruning on, a_n is \
             taken only from divisors forced by the vertex condition at P_n",
        ),
        (
            Stage::Vertex,
            "every x_i has some x_i^m x_t of degree d (mod a_i test)",
        ),
        (
            Stage::WellFormed,
            "gcd(a_0..a_{n-1}) = 1 on the prefix, then every n weights coprime",
        ),
        (
            Stage::Codim2,
            "strata x_i = x_j = 0 with isotropy are not contained",
        ),
        (
            Stage::Irreducible,
            "no variable divides every degree-d monomial",
        ),
        (Stage::Subsets, "|T(I)| >= |I| for every subset I"),
    ]
}

/// Survivors of each stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounters {
    pub ascending: u64,
    pub vertex: u64,
    pub well_formed: u64,
    pub codim2: u64,
    pub irreducible: u64,
    pub quasi_smooth: u64,
}

#[derive(Default)]
struct AtomicCounters {
    ascending: AtomicU64,
    well_formed: AtomicU64,
    vertex: AtomicU64,
    codim2: AtomicU64,
    irreducible: AtomicU64,
    quasi_smooth: AtomicU64,
}

impl AtomicCounters {
    fn snapshot(&self) -> StageCounters {
        StageCounters {
            ascending: self.ascending.load(Ordering::Relaxed),
            well_formed: self.well_formed.load(Ordering::Relaxed),
            vertex: self.vertex.load(Ordering::Relaxed),
            codim2: self.codim2.load(Ordering::Relaxed),
            irreducible: self.irreducible.load(Ordering::Relaxed),
            quasi_smooth: self.quasi_smooth.load(Ordering::Relaxed),
        }
    }

    fn add(&self, c: &StageCounters) {
        self.ascending.fetch_add(c.ascending, Ordering::Relaxed);
        self.well_formed.fetch_add(c.well_formed, Ordering::Relaxed);
        self.vertex.fetch_add(c.vertex, Ordering::Relaxed);
        self.codim2.fetch_add(c.codim2, Ordering::Relaxed);
        self.irreducible.fetch_add(c.irreducible, Ordering::Relaxed);
        self.quasi_smooth
            .fetch_add(c.quasi_smooth, Ordering::Relaxed);
    }
}

#[derive(Clone, Debug)]
pub struct BruteOutput {
    pub families: Vec<HypersurfaceFamily>,
    pub counters: StageCounters,
    /// Prefixes restored from the checkpoint journal instead of recomputed.
    pub resumed_prefixes: usize,
}

#[derive(Serialize, Deserialize)]
struct JournalEntry {
    prefix: (u64, u64),
    counters: StageCounters,
    families: Vec<Vec<u64>>,
}

struct Searcher<'a> {
    bounds: &'a [u64],
    offset: i64,
    prune: bool,
}

impl Searcher<'_> {
    fn run_prefix(&self, a0: u64, a1: u64, out: &mut Vec<Vec<u64>>, c: &mut StageCounters) {
        let len = self.bounds.len();
        let mut w = vec![0u64; len];
        w[0] = a0;
        w[1] = a1;
        if len == 2 {
            c.ascending += 1;
            self.finish(&w, c, out);
            return;
        }
        let mut scratch = Vec::with_capacity(64);
        self.descend(&mut w, 2, a0 + a1, out, c, &mut scratch);
    }

    fn descend(
        &self,
        w: &mut [u64],
        pos: usize,
        sum: u64,
        out: &mut Vec<Vec<u64>>,
        c: &mut StageCounters,
        cands: &mut Vec<u64>,
    ) {
        let len = w.len();
        let lo = w[pos - 1];
        if pos + 1 < len {
            for a in lo..=self.bounds[pos] {
                w[pos] = a;
                self.descend(w, pos + 1, sum + a, out, c, cands);
            }
            return;
        }
        let hi = self.bounds[pos];
        if hi < lo {
            return;
        }
        c.ascending += hi - lo + 1;
        // Dropping a_n must leave coprime weights.
        if gcd_all(w[..pos].iter().copied()) > 1 {
            return;
        }
        if !self.prune {
            for a in lo..=hi {
                w[pos] = a;
                self.finish(w, c, out);
            }
            return;
        }
        cands.clear();
        let base = sum as i64 + self.offset;
        // P_n needs x_n^m x_t of degree d = sum + a_n + offset, i.e. a_n divides
        // v_t = sum + offset - a_t (with a_t = 0 standing for t = n).
        let others = w[..pos].iter().copied().chain(std::iter::once(0));
        for at in others {
            let v = base - at as i64;
            if v == 0 {
                // Every a_n passes the test at P_n.
                for a in lo..=hi {
                    w[pos] = a;
                    self.finish(w, c, out);
                }
                return;
            }
            let v_abs = v.unsigned_abs();
            if v < 0 {
                // d - a_t = a_n - |v| >= 0 forces a_n = |v| among divisors >= lo.
                if v_abs >= lo && v_abs <= hi {
                    cands.push(v_abs);
                }
                continue;
            }
            let mut k = 1u64;
            while v_abs / k >= lo {
                let (q, r) = match k {
                    1 => (v_abs, 0),
                    2 => (v_abs / 2, v_abs % 2),
                    3 => (v_abs / 3, v_abs % 3),
                    4 => (v_abs / 4, v_abs % 4),
                    _ => (v_abs / k, v_abs % k),
                };
                if r == 0 && q <= hi {
                    cands.push(q);
                }
                k += 1;
            }
        }
        cands.sort_unstable();
        cands.dedup();
        for &a in cands.iter() {
            w[pos] = a;
            self.finish(w, c, out);
        }
    }

    fn finish(&self, w: &[u64], c: &mut StageCounters, out: &mut Vec<Vec<u64>>) {
        let sum: u64 = w.iter().sum();
        let d = sum as i64 + self.offset;
        if d <= 0 {
            return;
        }
        let d = d as u64;
        if !vertex_ok(w, d) {
            return;
        }
        c.vertex += 1;
        if well_formedness_defect(w).is_some() {
            return;
        }
        c.well_formed += 1;
        let failure = first_failure(w, d);
        match failure {
            Some(Failure::Vertex(_)) => unreachable!("vertex stage already passed"),
            Some(Failure::Codim2(..)) => return,
            _ => c.codim2 += 1,
        }
        match failure {
            Some(Failure::Reducible(_)) => return,
            _ => c.irreducible += 1,
        }
        if failure.is_none() {
            c.quasi_smooth += 1;
            out.push(w.to_vec());
        }
    }
}

/// Every `P_i` has a monomial `x_i^m x_t` of degree `d`, `m >= 0`.
fn vertex_ok(w: &[u64], d: u64) -> bool {
    w.iter().rev().all(|&ai| {
        let r = d % ai;
        w.iter().any(|&at| at <= d && at % ai == r)
    })
}

fn read_journal(path: &PathBuf) -> Result<Vec<JournalEntry>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut entries = Vec::new();
    for (no, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // A torn final line from an interrupted run is simply recomputed.
        match serde_json::from_str::<JournalEntry>(&line) {
            Ok(e) => entries.push(e),
            Err(e) if e.is_eof() => break,
            Err(e) => {
                return Err(Error::Parse {
                    line: no + 1,
                    column: e.column(),
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(entries)
}

/// All quasi-smooth families with ascending weights inside the box.
pub fn brute_search(cfg: &BruteConfig) -> Result<BruteOutput> {
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            pool.install(|| brute_search_inner(cfg))
        }
        None => brute_search_inner(cfg),
    }
}

fn brute_search_inner(cfg: &BruteConfig) -> Result<BruteOutput> {
    let len = cfg.bounds.len();
    if len < 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: len,
        });
    }
    if cfg.bounds.contains(&0) {
        return Err(Error::NonPositiveWeight);
    }
    let searcher = Searcher {
        bounds: &cfg.bounds,
        offset: cfg.kind.offset(),
        prune: cfg.prune,
    };

    let journal_path = cfg
        .checkpoint
        .as_ref()
        .map(|dir| dir.join(format!("brute-{}.journal", key_for(cfg))));
    let mut done: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut found: Vec<Vec<u64>> = Vec::new();
    let totals = AtomicCounters::default();
    if let Some(path) = &journal_path {
        std::fs::create_dir_all(path.parent().expect("journal dir"))?;
        for e in read_journal(path)? {
            if done.insert(e.prefix) {
                totals.add(&e.counters);
                found.extend(e.families);
            }
        }
    }
    let resumed_prefixes = done.len();

    let prefixes: Vec<(u64, u64)> = (1..=cfg.bounds[0])
        .flat_map(|a0| (a0..=cfg.bounds[1]).map(move |a1| (a0, a1)))
        .filter(|p| !done.contains(p))
        .collect();

    let journal = match &journal_path {
        Some(p) => Some(Mutex::new(
            OpenOptions::new().create(true).append(true).open(p)?,
        )),
        None => None,
    };

    let results: Vec<Result<Vec<Vec<u64>>>> = prefixes
        .par_iter()
        .map(|&(a0, a1)| {
            let mut out = Vec::new();
            let mut c = StageCounters::default();
            searcher.run_prefix(a0, a1, &mut out, &mut c);
            totals.add(&c);
            if let Some(j) = &journal {
                let entry = JournalEntry {
                    prefix: (a0, a1),
                    counters: c,
                    families: out.clone(),
                };
                let line = serde_json::to_string(&entry).map_err(|e| Error::Io(e.to_string()))?;
                let mut f = j.lock().expect("journal lock");
                writeln!(f, "{line}")?;
            }
            Ok(out)
        })
        .collect();
    for r in results {
        found.extend(r?);
    }

    let offset = cfg.kind.offset();
    let mut families: Vec<HypersurfaceFamily> = found
        .into_iter()
        .map(|w| {
            let d = (w.iter().sum::<u64>() as i64 + offset) as u64;
            HypersurfaceFamily::new(WeightSystem::sorted(&w).expect("positive weights"), d)
        })
        .collect();
    families.sort();
    families.dedup();
    Ok(BruteOutput {
        families,
        counters: totals.snapshot(),
        resumed_prefixes,
    })
}

fn key_for(cfg: &BruteConfig) -> String {
    let b: Vec<String> = cfg.bounds.iter().map(|b| b.to_string()).collect();
    let kind = match cfg.kind {
        BoxKind::Fano => "fano".to_string(),
        BoxKind::CalabiYau => "cy".to_string(),
        BoxKind::GeneralType(k) => format!("gt{k}"),
    };
    format!(
        "{kind}-{}-{}",
        b.join("_"),
        if cfg.prune { "p" } else { "np" }
    )
}

/// Naive loop over every ascending tuple in the box (no solving, no prefix
/// tricks), full verdict on each. Exponential in the box size: tests only.
pub fn unpruned_oracle(bounds: &[u64], kind: BoxKind) -> Vec<HypersurfaceFamily> {
    fn rec(bounds: &[u64], w: &mut Vec<u64>, kind: BoxKind, out: &mut Vec<HypersurfaceFamily>) {
        let pos = w.len();
        if pos == bounds.len() {
            let ws = match WeightSystem::canonicalize(w) {
                Ok(ws) => ws,
                Err(_) => return,
            };
            let d = ws.sum() as i64 + kind.offset();
            if d <= 0 {
                return;
            }
            let fam = HypersurfaceFamily::new(ws, d as u64);
            if crate::qsmooth::is_quasi_smooth(&fam).verdict {
                out.push(fam);
            }
            return;
        }
        let lo = w.last().copied().unwrap_or(1);
        for a in lo..=bounds[pos] {
            w.push(a);
            rec(bounds, w, kind, out);
            w.pop();
        }
    }
    let mut out = Vec::new();
    rec(bounds, &mut Vec::new(), kind, &mut out);
    out.sort();
    out
}
