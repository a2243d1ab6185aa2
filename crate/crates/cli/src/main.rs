use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use wfano_core::brute::{brute_search, BoxKind, BruteConfig};
use wfano_core::census::{
    self, counts, git_hash, read_jsonl_file, sort_records, summary_path, CensusRecord, Summary,
};
use wfano_core::classify::{classify, classify_all, enumerate_48_triples};
use wfano_core::cyg::cy_search_threads;
use wfano_core::qsmooth::{is_quasi_smooth, Failure};
use wfano_core::search::{restrict_to_box, run_structured_search, StructuredConfig};
use wfano_core::weights::well_formedness_defect;
use wfano_core::{Error, HypersurfaceFamily, WeightSystem};

#[derive(Parser)]
#[command(
    name = "wfano",
    version,
    about = "Census of quasi-smooth weighted hypersurfaces"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "WFANO_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate anticanonical Fano hypersurfaces in P^4.
    Search {
        #[command(subcommand)]
        how: SearchCmd,
    },
    /// Report on one weight system.
    Check {
        /// Comma-separated weights.
        weights: String,
        /// Degree; defaults to the weight sum minus one.
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Compare two census files as sets.
    Diff { a: PathBuf, b: PathBuf },
    /// Recompute the classification fields of a census file.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The triples indexing the infinite series.
    Series {
        #[command(subcommand)]
        what: SeriesCmd,
    },
    /// Calabi–Yau hypersurfaces with bounded weights.
    Cy {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        max_weight: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Solve the vertex systems; sporadic list plus the series.
    Structured {
        /// Range of m_0 examined on the one-parameter pieces.
        #[arg(long, default_value_t = 1000)]
        line_window: u64,
        /// Keep only families inside this box, series members included.
        #[arg(long = "box")]
        within: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Every ascending tuple in a box.
    Brute {
        /// Per-coordinate maxima, comma-separated.
        #[arg(long)]
        bounds: String,
        /// Offset of d from the weight sum: -1 (Fano), 0 (CY) or k > 0.
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        offset: i64,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum SeriesCmd {
    Enumerate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Census file; a `.summary.json` sidecar is written next to it.
    /// Without it records go to stdout and the summary to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

enum Failed {
    Usage(String),
    Internal(String),
    Mismatch,
}

impl From<Error> for Failed {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::NotWellFormed { .. }
            | Error::NonPositiveWeight
            | Error::EmptyWeights
            | Error::DegreeMismatch { .. } => Failed::Usage(e.to_string()),
            _ => Failed::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failed {
    fn from(e: io::Error) -> Self {
        Failed::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failed::Mismatch) => ExitCode::from(3),
        Err(Failed::Usage(m)) => {
            eprintln!("{}", json!({ "error": "usage", "message": m }));
            ExitCode::from(1)
        }
        Err(Failed::Internal(m)) => {
            eprintln!("{}", json!({ "error": "internal", "message": m }));
            ExitCode::from(2)
        }
    }
}

/// Parses `1,2,3`; errors report the 1-based column of the bad entry.
fn parse_list(s: &str) -> Result<Vec<u64>, Error> {
    let mut out = Vec::new();
    let mut col = 1;
    for tok in s.split(',') {
        let t = tok.trim();
        match t.parse::<u64>() {
            Ok(v) if v > 0 => out.push(v),
            _ => {
                let lead = tok.len() - tok.trim_start().len();
                return Err(Error::Parse {
                    line: 1,
                    column: col + lead,
                    message: format!("expected a positive integer, found {t:?}"),
                });
            }
        }
        col += tok.len() + 1;
    }
    Ok(out)
}

fn threads(cli: &Cli) -> usize {
    cli.threads.unwrap_or_else(rayon::current_num_threads)
}

fn run(cli: &Cli) -> Result<(), Failed> {
    match &cli.cmd {
        Cmd::Search {
            how:
                SearchCmd::Structured {
                    line_window,
                    within,
                    out,
                },
        } => {
            let res = run_structured_search(&StructuredConfig {
                line_window: *line_window,
            })?;
            let fams = match within {
                None => res.sporadic.clone(),
                Some(b) => restrict_to_box(&res, &parse_list(b)?),
            };
            let records = to_records(&fams)?;
            let mut extra = Map::new();
            extra.insert("sporadic".into(), json!(res.sporadic.len()));
            extra.insert("series".into(), json!(res.series.len()));
            extra.insert(
                "series_b".into(),
                json!(res.series.iter().map(|s| s.b).collect::<Vec<_>>()),
            );
            extra.insert("series_members_removed".into(), json!(res.removed.len()));
            extra.insert(
                "filters".into(),
                serde_json::to_value(&res.filters).unwrap(),
            );
            extra.insert("line_window".into(), json!(line_window));
            emit(cli, out, "search structured", &records, extra)
        }
        Cmd::Search {
            how:
                SearchCmd::Brute {
                    bounds,
                    offset,
                    no_prune,
                    checkpoint,
                    out,
                },
        } => {
            let bounds = parse_list(bounds)?;
            let kind = match *offset {
                -1 => BoxKind::Fano,
                0 => BoxKind::CalabiYau,
                k if k > 0 => BoxKind::GeneralType(k as u64),
                k => return Err(Failed::Usage(format!("unsupported offset {k}"))),
            };
            let mut cfg = BruteConfig::new(bounds.clone(), kind);
            cfg.prune = !no_prune;
            cfg.threads = cli.threads;
            cfg.checkpoint = checkpoint.clone();
            let res = brute_search(&cfg)?;
            let records = to_records(&res.families)?;
            let mut extra = Map::new();
            extra.insert("bounds".into(), json!(bounds));
            extra.insert("offset".into(), json!(offset));
            extra.insert("prune".into(), json!(!no_prune));
            extra.insert(
                "stages".into(),
                serde_json::to_value(&res.counters).unwrap(),
            );
            extra.insert("resumed_prefixes".into(), json!(res.resumed_prefixes));
            emit(cli, out, "search brute", &records, extra)
        }
        Cmd::Check { weights, degree } => check(weights, *degree),
        Cmd::Diff { a, b } => {
            let (ra, rb) = (read_jsonl_file(a)?, read_jsonl_file(b)?);
            let rep = census::diff(&ra, &rb);
            let line = |r: &CensusRecord| format!("{:?} d={}", r.weights, r.degree);
            for r in &rep.only_in_a {
                println!("< {}", line(r));
            }
            for r in &rep.only_in_b {
                println!("> {}", line(r));
            }
            for (r, _) in &rep.changed {
                println!("! {}", line(r));
            }
            println!(
                "{}",
                json!({
                    "only_in_a": rep.only_in_a.len(),
                    "only_in_b": rep.only_in_b.len(),
                    "changed": rep.changed.len(),
                    "common": rep.common,
                    "identical": rep.identical(),
                })
            );
            if rep.identical() {
                Ok(())
            } else {
                Err(Failed::Mismatch)
            }
        }
        Cmd::Classify { input, out } => {
            let fams = read_jsonl_file(input)?
                .iter()
                .map(CensusRecord::family)
                .collect::<Result<Vec<_>, _>>()?;
            let records = to_records(&fams)?;
            let mut extra = Map::new();
            extra.insert("input".into(), json!(input.display().to_string()));
            emit(cli, out, "classify", &records, extra)
        }
        Cmd::Series {
            what: SeriesCmd::Enumerate { out },
        } => {
            let lines: Vec<String> = enumerate_48_triples()
                .iter()
                .map(|b| json!({ "b": b }).to_string())
                .collect();
            let text = lines.join("\n") + "\n";
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            eprintln!("series={}", lines.len());
            Ok(())
        }
        Cmd::Cy {
            dim,
            max_weight,
            out,
        } => {
            let res = cy_search_threads(*dim, *max_weight, cli.threads)?;
            let records = to_records(&res.families)?;
            let mut extra = Map::new();
            extra.insert("dim".into(), json!(res.n));
            extra.insert("max_weight".into(), json!(res.max_weight));
            emit(cli, out, "cy", &records, extra)
        }
    }
}

fn to_records(fams: &[HypersurfaceFamily]) -> Result<Vec<CensusRecord>, Failed> {
    let mut records: Vec<CensusRecord> =
        classify_all(fams)?.iter().map(CensusRecord::from).collect();
    sort_records(&mut records);
    Ok(records)
}

fn write_records<W: Write>(w: W, format: Format, records: &[CensusRecord]) -> Result<(), Failed> {
    match format {
        Format::Jsonl => census::write_jsonl(w, records)?,
        Format::Csv => census::write_csv(w, records)?,
    }
    Ok(())
}

fn emit(
    cli: &Cli,
    out: &OutputArgs,
    command: &str,
    records: &[CensusRecord],
    extra: Map<String, Value>,
) -> Result<(), Failed> {
    let c = counts(records);
    let summary = Summary {
        command: command.to_string(),
        counts: c.clone(),
        extra,
        threads: threads(cli),
        git_hash: git_hash(),
    };
    let summary_json = serde_json::to_string_pretty(&summary).unwrap();
    match &out.out {
        Some(path) => {
            write_records(BufWriter::new(create(path)?), out.format, records)?;
            std::fs::write(summary_path(path), summary_json + "\n")?;
        }
        None => {
            write_records(io::stdout().lock(), out.format, records)?;
            eprintln!("{summary_json}");
        }
    }
    let mut line = format!(
        "records={} quasi_smooth={} terminal={} tiger_free={} ke={} series_members={}",
        c.records, c.quasi_smooth, c.terminal, c.tiger_free, c.ke, c.series_members
    );
    for key in ["sporadic", "series"] {
        if let Some(v) = summary.extra.get(key) {
            line.push_str(&format!(" {key}={v}"));
        }
    }
    eprintln!("{line}");
    Ok(())
}

fn create(path: &Path) -> Result<File, Failed> {
    File::create(path).map_err(|e| Failed::Usage(format!("{}: {e}", path.display())))
}

fn describe(f: &Failure) -> String {
    match f {
        Failure::Vertex(i) => format!("vertex {i}"),
        Failure::Codim2(i, j) => format!("stratum x{i} = x{j} = 0"),
        Failure::Reducible(k) => format!("x{k} divides every monomial"),
        Failure::Subset(s) => format!("subset {s:?}"),
    }
}

fn check(weights: &str, degree: Option<u64>) -> Result<(), Failed> {
    let raw = parse_list(weights)?;
    let ws = WeightSystem::sorted(&raw)?;
    let d = degree.unwrap_or(ws.sum() - 1);
    let fam = HypersurfaceFamily::new(ws, d);
    let defect = well_formedness_defect(fam.weights());
    let report = is_quasi_smooth(&fam);
    let quasi_smooth = report.verdict && defect.is_none();
    let len = fam.weights().len();
    let witnesses: Vec<Value> = report
        .vertex_witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| match w {
            Some(w) => json!({
                "vertex": i,
                "exponents": w.monomial(len, i).exponents,
                "monomial": w.monomial(len, i).to_string(),
            }),
            None => Value::Null,
        })
        .collect();
    let failure = match (&report.failure, defect) {
        (Some(f), _) => Some(describe(f)),
        (None, Some((i, g))) => Some(format!("not well-formed: weights without x{i} share {g}")),
        (None, None) => None,
    };

    println!("family       {fam}");
    println!("kind         {}", fam.kind().as_str());
    println!("well_formed  {}", defect.is_none());
    println!("quasi_smooth {quasi_smooth}");
    if let Some(f) = &failure {
        println!("failure      {f}");
    }
    for w in witnesses.iter().filter(|w| !w.is_null()) {
        println!(
            "witness      P{}: {}",
            w["vertex"],
            w["monomial"].as_str().unwrap()
        );
    }
    let mut report_json = json!({
        "weights": fam.weights(),
        "degree": d,
        "kind": fam.kind(),
        "well_formed": defect.is_none(),
        "quasi_smooth": quasi_smooth,
        "failure": failure,
        "witnesses": witnesses,
    });
    if quasi_smooth {
        let rec = CensusRecord::from(&classify(&fam)?);
        for b in &rec.basket {
            let count = b.count.map(|c| format!(" x{c}")).unwrap_or_default();
            println!("basket       1/{}{:?} at {}{count}", b.r, b.w, b.location);
        }
        println!("terminal     {}", rec.terminal);
        println!("tiger_free   {}", rec.tiger_free);
        println!("ke           {}", rec.ke);
        match &rec.series {
            Some(s) => println!("series       b={:?} k={}", s.b, s.k),
            None => println!("series       none"),
        }
        let obj = report_json.as_object_mut().unwrap();
        obj.insert("basket".into(), serde_json::to_value(&rec.basket).unwrap());
        obj.insert("terminal".into(), json!(rec.terminal));
        obj.insert("tiger_free".into(), json!(rec.tiger_free));
        obj.insert("ke".into(), json!(rec.ke));
        obj.insert("series".into(), serde_json::to_value(&rec.series).unwrap());
    }
    println!("{report_json}");
    Ok(())
}
