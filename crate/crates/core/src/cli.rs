//! Command-line front end. `run` returns the exit code and the text that
//! `main` writes out, so the whole pipeline can be driven from tests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::certify::{certify_pair, Criterion};
use crate::chaos::{decide_chaos, ChaosBounds, ChaosVerdict, NotChaoticCertificate};
use crate::closed_paths::{closed_paths, cp_at_least_two, CpDecision};
use crate::dsl::{self, Diagnostic};
use crate::emitters::{minimal_infinite_emitters, EmitterOptions, EmitterTrace};
use crate::enumeration::{EnumOrder, Enumeration};
use crate::error::Error;
use crate::metric::{trajectory_csv, DistanceValue, Metric, DEFAULT_MAX_RANK};
use crate::path::{ShiftPoint, Ultrapath};
use crate::scrambled::{default_background, scrambled_set_sample, SampleFamily};
use crate::ultragraph::{Grading, Ultragraph};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ultrashift", version, about = "Ultragraph shift spaces and Li-Yorke chaos")]
pub struct Cli {
    /// Emit a versioned JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the result here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Maximum closed-path length searched on infinite ultragraphs.
    #[arg(long, global = true, env = "ULTRASHIFT_LENGTH_BOUND", default_value_t = 20)]
    pub length_bound: usize,
    /// Largest edge and vertex index searched on infinite ultragraphs.
    #[arg(long, global = true, env = "ULTRASHIFT_INDEX_BOUND", default_value_t = 50)]
    pub index_bound: u64,
    /// Coefficient range for affine gradings.
    #[arg(long, global = true, env = "ULTRASHIFT_GRADING_BOUND", default_value_t = 4)]
    pub grading_bound: i64,
    /// Ranks of the ultrapath listing scanned before a distance is reported
    /// as unresolved.
    #[arg(long, global = true, env = "ULTRASHIFT_MAX_RANK", default_value_t = DEFAULT_MAX_RANK)]
    pub max_rank: usize,
    /// Listing of ultrapaths used by the metric.
    #[arg(long, global = true, value_enum, default_value_t = OrderArg::Canonical)]
    pub order: OrderArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderArg {
    Canonical,
    Reverse,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    SPrime,
    SDoublePrime,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide Li-Yorke chaos.
    Analyze { input: PathBuf },
    /// Closed paths at a vertex.
    Cp {
        input: PathBuf,
        #[arg(long)]
        vertex: String,
        /// Maximum number of witnesses listed.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Certify whether two points form a scrambled pair.
    PairCheck {
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Sample a scrambled set and certify every pair.
    ScrambledSample {
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Edges of each point printed.
        #[arg(long, default_value_t = 12)]
        prefix_len: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::SDoublePrime)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distances d(σⁿx, σⁿy) as CSV.
    Trajectory {
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
    /// The distance d(x, y).
    Metric {
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// The first ultrapaths of the listing.
    EnumP {
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Minimal infinite emitters inside the range of a path.
    Emitters {
        input: PathBuf,
        #[arg(long)]
        path: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Cp { .. } => "cp",
            Command::PairCheck { .. } => "pair-check",
            Command::ScrambledSample { .. } => "scrambled-sample",
            Command::Trajectory { .. } => "trajectory",
            Command::Metric { .. } => "metric",
            Command::EnumP { .. } => "enum-p",
            Command::Emitters { .. } => "emitters",
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A result ready for both renderings.
struct Report {
    code: i32,
    text: String,
    json: Value,
}

struct Failure {
    code: i32,
    diagnostics: Vec<(String, Diagnostic)>,
}

impl Failure {
    fn new(code: i32, origin: &str, diagnostics: Vec<Diagnostic>) -> Self {
        Failure { code, diagnostics: diagnostics.into_iter().map(|d| (origin.to_string(), d)).collect() }
    }

    fn error(code: &'static str, origin: &str, e: impl ToString) -> Self {
        Failure::new(EXIT_DIAGNOSTICS, origin, vec![plain(code, e.to_string())])
    }
}

fn plain(code: &'static str, message: String) -> Diagnostic {
    Diagnostic { line: 0, column: 0, code, message }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DIAGNOSTICS } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let command = cli.command.name();
    let (code, stdout, stderr) = match execute(&cli) {
        Ok(r) if cli.json => (r.code, envelope(command, status(r.code), Some(r.json), &[]), String::new()),
        Ok(r) => (r.code, r.text, String::new()),
        Err(f) if cli.json => (f.code, envelope(command, status(f.code), None, &f.diagnostics), String::new()),
        Err(f) => {
            let lines: String = f
                .diagnostics
                .iter()
                .map(|(origin, d)| {
                    if d.line == 0 {
                        format!("{origin}: [{}] {}\n", d.code, d.message)
                    } else {
                        format!("{origin}:{d}\n")
                    }
                })
                .collect();
            (f.code, String::new(), lines)
        }
    };
    match &cli.output {
        Some(path) if !stdout.is_empty() => match std::fs::write(path, &stdout) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => Outcome {
                code: EXIT_DIAGNOSTICS,
                stdout: String::new(),
                stderr: format!("{}: [io] {e}\n", path.display()),
            },
        },
        _ => Outcome { code, stdout, stderr },
    }
}

fn status(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_UNKNOWN => "unknown",
        _ => "diagnostics",
    }
}

fn envelope(command: &str, status: &str, result: Option<Value>, diagnostics: &[(String, Diagnostic)]) -> String {
    let diags: Vec<Value> = diagnostics
        .iter()
        .map(|(origin, d)| json!({"origin": origin, "line": d.line, "column": d.column, "code": d.code, "message": d.message}))
        .collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "result": result.unwrap_or(Value::Null),
        "diagnostics": diags,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<Ultragraph, Failure> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::error("io", &origin, e))?;
    dsl::parse_ultragraph(&text).map_err(|d| Failure::new(EXIT_DIAGNOSTICS, &origin, d))
}

fn point(g: &Ultragraph, flag: &str, text: &str) -> Result<ShiftPoint, Failure> {
    dsl::parse_point(text, g).map_err(|d| Failure::new(EXIT_DIAGNOSTICS, flag, d))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn bounds(cli: &Cli) -> ChaosBounds {
    ChaosBounds { length_bound: cli.length_bound, index_bound: cli.index_bound, grading_bound: cli.grading_bound }
}

fn order(cli: &Cli) -> EnumOrder {
    match cli.order {
        OrderArg::Canonical => EnumOrder::Canonical,
        OrderArg::Reverse => EnumOrder::ReverseWithinLength,
    }
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Analyze { input } => analyze(cli, &load(input)?),
        Command::Cp { input, vertex, limit } => cp(cli, &load(input)?, vertex, *limit),
        Command::PairCheck { input, x, y } => {
            let g = load(input)?;
            pair_check(&g, &point(&g, "--x", x)?, &point(&g, "--y", y)?)
        }
        Command::ScrambledSample { input, count, prefix_len, family, seed } => {
            sample(cli, &load(input)?, *count, *prefix_len, *family, *seed)
        }
        Command::Trajectory { input, x, y, n_max } => {
            let g = load(input)?;
            let (x, y) = (point(&g, "--x", x)?, point(&g, "--y", y)?);
            let values = Metric::with_order(&g, order(cli)).max_rank(cli.max_rank).trajectory(&x, &y, *n_max);
            let rows: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(n, d)| json!({"n": n, "distance": to_json(d), "rank": d.csv_rank(), "value": d.value()}))
                .collect();
            Ok(Report { code: EXIT_OK, text: trajectory_csv(&values), json: json!({ "rows": rows }) })
        }
        Command::Metric { input, x, y } => {
            let g = load(input)?;
            let (x, y) = (point(&g, "--x", x)?, point(&g, "--y", y)?);
            let d = Metric::with_order(&g, order(cli)).max_rank(cli.max_rank).distance(&x, &y);
            let code = if matches!(d, DistanceValue::UnknownBeyond(_)) { EXIT_UNKNOWN } else { EXIT_OK };
            Ok(Report {
                code,
                text: format!("d = {d}\n"),
                json: json!({ "distance": to_json(&d), "value": d.value() }),
            })
        }
        Command::EnumP { input, count } => {
            let g = load(input)?;
            let paths = Enumeration::with_order(&g, order(cli)).take(*count);
            let shown: Vec<String> = paths
                .iter()
                .map(|p| format!("{}|{}", dsl::render_edges(&p.edges), dsl::render_vertex_set(&p.terminal)))
                .collect();
            let text: String = shown.iter().enumerate().map(|(i, p)| format!("{}\t{p}\n", i + 1)).collect();
            let rows: Vec<Value> =
                shown.iter().enumerate().map(|(i, p)| json!({"rank": i + 1, "ultrapath": p})).collect();
            Ok(Report { code: EXIT_OK, text, json: json!({ "ultrapaths": rows }) })
        }
        Command::Emitters { input, path } => emitters(&load(input)?, path),
    }
}

fn render_grading(g: &Grading) -> String {
    let parts: Vec<String> = g.levels.iter().map(|(f, l)| format!("{f}[n] = {}*n + {}", l.coef, l.offset)).collect();
    parts.join(", ")
}

fn analyze(cli: &Cli, g: &Ultragraph) -> Result<Report, Failure> {
    let verdict = decide_chaos(g, bounds(cli));
    let mut text = format!("verdict: {}\n", verdict.label());
    let mut verified = Value::Null;
    let code = match &verdict {
        ChaosVerdict::Chaotic { vertex, c1, c2 } => {
            text.push_str(&format!(
                "vertex: {vertex}\nc1: {}\nc2: {}\n",
                dsl::render_edges(&c1.edges),
                dsl::render_edges(&c2.edges)
            ));
            EXIT_OK
        }
        ChaosVerdict::NotChaotic { certificate: NotChaoticCertificate::FiniteExhaustive } => {
            text.push_str("certificate: exhaustive (finite ultragraph)\n");
            EXIT_OK
        }
        ChaosVerdict::NotChaotic { certificate: NotChaoticCertificate::Grading { grading } } => {
            let ok = g.verify_grading(grading).is_ok();
            verified = Value::Bool(ok);
            text.push_str(&format!("certificate: grading {}\ngrading verified: {ok}\n", render_grading(grading)));
            EXIT_OK
        }
        ChaosVerdict::Unknown { bounds } => {
            text.push_str(&format!(
                "searched: length <= {}, index <= {}, grading coefficients within {}\n",
                bounds.length_bound, bounds.index_bound, bounds.grading_bound
            ));
            EXIT_UNKNOWN
        }
    };
    Ok(Report { code, text, json: json!({ "verdict": to_json(&verdict), "grading_verified": verified }) })
}

fn cp(cli: &Cli, g: &Ultragraph, vertex: &str, limit: usize) -> Result<Report, Failure> {
    let v = dsl::parse_vertex(vertex).map_err(|d| Failure::new(EXIT_DIAGNOSTICS, "--vertex", d))?;
    if !g.has_vertex(&v) {
        return Err(Failure::error("unknown-vertex", "--vertex", format!("{v} is not a vertex")));
    }
    let decision = cp_at_least_two(g, &v, cli.length_bound, cli.index_bound);
    let search = closed_paths(g, &v, cli.length_bound, cli.index_bound, limit);
    let answer = match &decision {
        CpDecision::Yes { .. } => "yes",
        CpDecision::No { .. } => "no",
        CpDecision::Unknown => "unknown",
    };
    let mut text = format!("vertex: {v}\nat least two closed paths: {answer}\nwitnesses:\n");
    for c in &search.paths {
        text.push_str(&format!("  {}\n", dsl::render_edges(&c.edges)));
    }
    text.push_str(&format!("search exhausted: {}\nsearch complete: {}\n", search.exhausted, search.complete));
    let code = if matches!(decision, CpDecision::Unknown) { EXIT_UNKNOWN } else { EXIT_OK };
    let witnesses: Vec<String> = search.paths.iter().map(|c| dsl::render_edges(&c.edges)).collect();
    Ok(Report {
        code,
        text,
        json: json!({
            "vertex": v.to_string(),
            "decision": to_json(&decision),
            "witnesses": witnesses,
            "exhausted": search.exhausted,
            "complete": search.complete,
        }),
    })
}

fn criterion_text(c: &Option<Criterion>) -> String {
    match c {
        None => String::new(),
        Some(c) => {
            let v = to_json(c);
            let name = v["criterion"].as_str().unwrap_or_default().to_string();
            match v.get("edge") {
                Some(e) => format!(" ({name}, edge {}[{}])", e["family"].as_str().unwrap_or_default(), e["index"]),
                None => format!(" ({name})"),
            }
        }
    }
}

fn pair_check(g: &Ultragraph, x: &ShiftPoint, y: &ShiftPoint) -> Result<Report, Failure> {
    let header = format!("x: {}\ny: {}\n", dsl::render_point(x), dsl::render_point(y));
    match certify_pair(g, x, y) {
        Ok(c) => Ok(Report {
            code: EXIT_OK,
            text: format!(
                "{header}limsup positive: {}{}\nliminf zero: {}{}\nscrambled: {}\n",
                c.limsup_positive,
                criterion_text(&c.limsup_criterion),
                c.liminf_zero,
                criterion_text(&c.liminf_criterion),
                c.scrambled
            ),
            json: json!({ "x": dsl::render_point(x), "y": dsl::render_point(y), "certificate": to_json(&c) }),
        }),
        Err(Error::InsufficientMetadata(m)) => Ok(Report {
            code: EXIT_UNKNOWN,
            text: format!("{header}undecided: {m}\n"),
            json: json!({ "x": dsl::render_point(x), "y": dsl::render_point(y), "certificate": Value::Null, "undecided": m }),
        }),
        Err(e) => Err(Failure::error("invalid", "pair-check", e)),
    }
}

fn sample(
    cli: &Cli,
    g: &Ultragraph,
    count: usize,
    prefix_len: usize,
    family: FamilyArg,
    seed: u64,
) -> Result<Report, Failure> {
    let verdict = decide_chaos(g, bounds(cli));
    match verdict {
        ChaosVerdict::Chaotic { .. } => {}
        ChaosVerdict::Unknown { .. } => {
            return Ok(Report {
                code: EXIT_UNKNOWN,
                text: "verdict: Unknown; no closed-path pair to sample from\n".into(),
                json: json!({ "verdict": to_json(&verdict), "points": [], "pairs": [] }),
            })
        }
        ChaosVerdict::NotChaotic { .. } => {
            return Err(Failure::error("not-chaotic", "scrambled-sample", "the ultragraph is not Li-Yorke chaotic"))
        }
    }
    let family = match family {
        FamilyArg::SPrime => SampleFamily::SPrime,
        FamilyArg::SDoublePrime => SampleFamily::SDoublePrime,
    };
    let s = scrambled_set_sample(&verdict, family, count, seed, &default_background())
        .map_err(|e| Failure::error("sample", "scrambled-sample", e))?;
    let mut text = String::from("points:\n");
    let mut points = Vec::new();
    for (i, (j, p)) in s.j_sets.iter().zip(&s.points).enumerate() {
        let ShiftPoint::Infinite(x) = p else { unreachable!("coded points are infinite") };
        let prefix = dsl::render_edges(&x.prefix(prefix_len));
        text.push_str(&format!("  {i}: J = {j}\n     {}\n     {prefix}...\n", dsl::render_point(p)));
        points.push(json!({ "index": i, "j": j.to_string(), "point": dsl::render_point(p), "prefix": prefix }));
    }
    text.push_str("pairs:\n");
    let mut pairs = Vec::new();
    let mut all = true;
    for i in 0..s.points.len() {
        for k in i + 1..s.points.len() {
            let c = certify_pair(g, &s.points[i], &s.points[k])
                .map_err(|e| Failure::error("certify", "scrambled-sample", e))?;
            all &= c.scrambled;
            text.push_str(&format!("  ({i}, {k}) scrambled: {}\n", c.scrambled));
            pairs.push(json!({ "i": i, "k": k, "certificate": to_json(&c) }));
        }
    }
    text.push_str(&format!("balanced blocks: {}\nall pairs scrambled: {all}\n", s.balanced));
    Ok(Report {
        code: EXIT_OK,
        text,
        json: json!({
            "verdict": to_json(&verdict),
            "family": to_json(&s.family),
            "seed": seed,
            "balanced": s.balanced,
            "points": points,
            "pairs": pairs,
            "all_scrambled": all,
        }),
    })
}

fn emitters(g: &Ultragraph, path: &str) -> Result<Report, Failure> {
    let edges = dsl::parse_edges(path).map_err(|d| Failure::new(EXIT_DIAGNOSTICS, "--path", d))?;
    if edges.is_empty() {
        return Err(Failure::error("invalid-path", "--path", "the path needs at least one edge"));
    }
    let alpha = Ultrapath::from_edges(g, edges).map_err(|e| Failure::error("invalid-path", "--path", e))?;
    let search = minimal_infinite_emitters(g, &alpha.terminal, EmitterOptions::default());
    let mut text = format!("range: {}\nminimal infinite emitters:\n", dsl::render_vertex_set(&alpha.terminal));
    let mut rows = Vec::new();
    for m in &search.emitters {
        let how = match &m.trace {
            EmitterTrace::Singleton(_) => "singleton".to_string(),
            EmitterTrace::Intersection(es) => {
                let rs: Vec<String> = es.iter().map(|e| format!("r({e})")).collect();
                format!("intersection {}", rs.join(" ∩ "))
            }
        };
        text.push_str(&format!("  {}  [{how}]\n", dsl::render_vertex_set(&m.set)));
        rows.push(json!({ "set": dsl::render_vertex_set(&m.set), "trace": to_json(&m.trace) }));
    }
    text.push_str(&format!("complete: {}\n", search.complete()));
    Ok(Report {
        code: EXIT_OK,
        text,
        json: json!({
            "range": dsl::render_vertex_set(&alpha.terminal),
            "emitters": rows,
            "complete": search.complete(),
            "depth_exhausted": search.depth_exhausted,
            "catalog_truncated": search.catalog_truncated,
        }),
    })
}
