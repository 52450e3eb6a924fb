//! The `graphring` command line.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::consum::{check_theorem_5_3, ConsumError};
use crate::exactlin::{format_rational, Rational};
use crate::homology::{h1_basis, kernel_surfaces};
use crate::intersection::{linear_combination, product_table, IntersectionError};
use crate::plumbing::{normalize, parse_raw, parse_raw_json, to_json, to_text, PlumbingError, PlumbingGraph};
use crate::random::{random_tree, stream, Bounds};
use crate::trivector::{analyze, obstruct, FormError, Rank3Verdict, SplitReport, Trivector};

pub const SEED_VAR: &str = "GRAPHRING_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<PlumbingError> for CliError {
    fn from(e: PlumbingError) -> Self {
        match e {
            PlumbingError::Syntax { .. } | PlumbingError::Json(_) => CliError::Parse(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FormError> for CliError {
    fn from(e: FormError) -> Self {
        match e {
            FormError::Document(_) | FormError::NotIncreasing(..) => CliError::Parse(e.to_string()),
            FormError::Inconsistent(_) | FormError::LinAlg(_) => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ConsumError> for CliError {
    fn from(e: ConsumError) -> Self {
        match e {
            ConsumError::NotTree(_) | ConsumError::Nonorientable(_) => CliError::Validation(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<IntersectionError> for CliError {
    fn from(e: IntersectionError) -> Self {
        CliError::Internal(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "graphring", version, about = "Homology and intersection rings of graph manifolds")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First rational homology with its generator basis
    Homology { path: String },
    /// Intersection product table and 3-form
    Ring { path: String },
    /// Connected-sum presentation of a tree, checked against the direct ring
    Consum { path: String },
    /// Radical and rank-3 split analysis of a 3-form document
    AnalyzeForm { path: String },
    /// Resolve self-loops and reduce gluing matrices to ±J
    Normalize { path: String },
    /// Seeded random tree document
    RandomTree {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
        #[arg(long, default_value_t = 2)]
        max_genus: i64,
        #[arg(long, default_value_t = 2)]
        max_fibers: usize,
        #[arg(long, default_value_t = 5)]
        max_entry: i64,
        /// Allow nonorientable bases
        #[arg(long)]
        nonorientable: bool,
    },
    /// Obstruction verdict for a 3-form or for the ring of a graph
    Obstruct { path: String },
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    if path == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| CliError::Parse(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("reading {path}: {e}")))?;
    }
    Ok(text)
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Parses a text or JSON graph document, normalizing matrix gluings and
/// self-loops on the way.
pub fn load_graph(text: &str) -> Result<PlumbingGraph, CliError> {
    let raw = if is_json(text) { parse_raw_json(text)? } else { parse_raw(text)? };
    Ok(normalize(&raw)?.0)
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn homology_report(g: &PlumbingGraph) -> (Value, String) {
    let basis = h1_basis(g);
    let surfaces = kernel_surfaces(g, &basis);
    let labels = basis.labels();
    let fiber_labels: Vec<String> = basis.surviving.iter().map(|n| format!("t_{n}")).collect();
    let conn = &basis.connectivity;
    let matrix: Vec<Vec<String>> = (0..conn.matrix.rows()).map(|i| rationals(conn.matrix.row(i))).collect();
    let value = json!({
        "rank": basis.len(),
        "rank_parts": basis.rank,
        "generators": basis.generators,
        "connectivity": {"order": conn.order, "matrix": matrix},
        "fiber_expression": basis.fiber_expression.iter().map(|(n, v)| json!({"node": n, "over_surviving": rationals(v)})).collect::<Vec<_>>(),
        "surfaces": surfaces.iter().map(|s| json!({
            "fiber": s.fiber,
            "multiplicities": s.multiplicities.iter().map(|(n, c)| json!([n, c.to_string()])).collect::<Vec<_>>(),
            "klein_caps": s.klein_caps.iter().map(|(n, c)| json!([n, c.to_string()])).collect::<Vec<_>>(),
            "scale": format_rational(&s.scale),
        })).collect::<Vec<_>>(),
        "lints": g.lints(),
    });
    let mut t = String::new();
    let r = basis.rank;
    t.push_str(&format!(
        "rank {} = b {} + r {} + 2g+ {} + g- {}\n",
        basis.len(),
        r.b,
        r.r,
        r.g_plus_doubled,
        r.g_minus
    ));
    t.push_str(&format!("basis {{{}}}\n", labels.join(", ")));
    t.push_str(&format!("connectivity over ({})\n{}", conn.order.join(", "), conn.matrix));
    for (node, v) in &basis.fiber_expression {
        t.push_str(&format!("t_{node} = {}\n", linear_combination(v, &fiber_labels)));
    }
    for s in &surfaces {
        let parts: Vec<String> = s.multiplicities.iter().map(|(n, c)| format!("{c}·{n}")).collect();
        t.push_str(&format!("surface dual to t_{}: ({}) scaled by {}\n", s.fiber, parts.join(" + "), format_rational(&s.scale)));
    }
    for lint in g.lints() {
        t.push_str(&format!("warning: {lint}\n"));
    }
    (value, t)
}

fn ring_report(g: &PlumbingGraph) -> Result<(Value, String), CliError> {
    let basis = h1_basis(g);
    let surfaces = kernel_surfaces(g, &basis);
    let table = product_table(g, &basis, &surfaces);
    let w = table.to_trivector()?;
    let labels: Vec<String> = table.basis.iter().map(|d| d.label.clone()).collect();
    let mut value = table.to_json();
    value["trivector"] = w.to_json();
    value["form"] = w.render(&labels).into();
    let text = format!("{}\nω = {}\n", table.render(), w.render(&labels));
    Ok((value, text))
}

fn split_text(r: &SplitReport) -> String {
    let mut t = format!("dimension {}\nradical dimension {}\n", r.dim, r.radical_dim);
    for v in &r.radical_basis {
        t.push_str(&format!("  radical vector ({})\n", rationals(v).join(", ")));
    }
    t.push_str(&format!("rank-3 verdict {}\n", r.verdict.as_str()));
    if let Some(q) = &r.q {
        t.push_str(&format!("q = {}{}\n", format_rational(q), if r.degenerate { " (degenerate)" } else { "" }));
    }
    if r.verdict == Rank3Verdict::DoesNotSplit {
        t.push_str("no split of type uvw + xyz over Q found by this certificate\n");
    }
    if let Some(w) = &r.witness {
        let labels: Vec<String> = (0..r.dim).map(|i| format!("e{i}")).collect();
        for (k, d) in w.summands.iter().enumerate() {
            t.push_str(&format!("summand {}: {}\n", k + 1, d.render(&labels)));
        }
    }
    t
}

fn load_form_or_ring(text: &str) -> Result<Trivector, CliError> {
    if is_json(text) {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if v.get("dim").is_some() {
            return Ok(Trivector::from_json(text)?);
        }
    }
    let g = load_graph(text)?;
    let basis = h1_basis(&g);
    let surfaces = kernel_surfaces(&g, &basis);
    Ok(product_table(&g, &basis, &surfaces).to_trivector()?)
}

fn execute(cli: Cli, env_seed: Option<String>, stdin: &mut dyn Read) -> Result<String, CliError> {
    let fmt = cli.format;
    let emit = |value: Value, text: String| match fmt {
        Format::Json => serde_json::to_string_pretty(&value).expect("json") + "\n",
        Format::Table => text,
    };
    Ok(match cli.command {
        Command::Homology { path } => {
            let g = load_graph(&read_input(&path, stdin)?)?;
            let (v, t) = homology_report(&g);
            emit(v, t)
        }
        Command::Ring { path } => {
            let g = load_graph(&read_input(&path, stdin)?)?;
            let (v, t) = ring_report(&g)?;
            emit(v, t)
        }
        Command::Consum { path } => {
            let g = load_graph(&read_input(&path, stdin)?)?;
            let report = check_theorem_5_3(&g)?;
            let p = &report.presentation;
            let mut t = String::new();
            for (b, v) in &p.glue.epsilon {
                let fs: Vec<String> = (1..=v.len()).map(|k| format!("F{k}")).collect();
                t.push_str(&format!("epsilon {b} -> {}\n", linear_combination(v, &fs)));
            }
            let refs: Vec<String> = p.glue.references.iter().map(|r| format!("t_{r}")).collect();
            for (b, v) in &p.glue.fiber_identifications {
                t.push_str(&format!("t_{b} = {}\n", linear_combination(v, &refs)));
            }
            for (a, b) in &p.glue.iota {
                t.push_str(&format!("M_{a} = M_{b}\n"));
            }
            let [d0, d1, d2, d3] = p.quotient_ranks();
            t.push_str(&format!("quotient ranks ({d0}, {d1}, {d2}, {d3})\n"));
            t.push_str(&format!("connected sum form = {}\n", report.glued.render(&p.basis_labels())));
            t.push_str("matches the direct intersection ring under the reported basis map\n");
            emit(report.to_json(), t)
        }
        Command::AnalyzeForm { path } => {
            let w = Trivector::from_json(&read_input(&path, stdin)?)?;
            let r = analyze(&w)?;
            emit(r.to_json(), split_text(&r))
        }
        Command::Obstruct { path } => {
            let w = load_form_or_ring(&read_input(&path, stdin)?)?;
            let v = obstruct(&w)?;
            let t = format!("{}\n{}", v.summary(), split_text(&v.report));
            emit(v.to_json(), t)
        }
        Command::Normalize { path } => {
            let text = read_input(&path, stdin)?;
            let raw = if is_json(&text) { parse_raw_json(&text)? } else { parse_raw(&text)? };
            let (g, log) = normalize(&raw)?;
            let out = g.to_raw();
            let trace: Vec<Value> = log
                .gluings
                .iter()
                .map(|(edge, n)| {
                    json!({
                        "edge": edge,
                        "sign": n.sign.symbol().to_string(),
                        "operations": n.trace.iter().map(|op| json!({
                            "side": format!("{:?}", op.side).to_lowercase(),
                            "n": op.n,
                            "fiber": op.fiber().to_string(),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let value = json!({
                "graph": to_json(&out),
                "resolved_loops": log.resolved_loops,
                "gluings": trace,
                "lints": g.lints(),
            });
            emit(value, to_text(&out))
        }
        Command::RandomTree {
            seed,
            max_nodes,
            max_genus,
            max_fibers,
            max_entry,
            nonorientable,
        } => {
            let seed = match env_seed {
                Some(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Validation(format!("{SEED_VAR} is not an unsigned integer: {s}")))?,
                None => seed,
            };
            if max_nodes == 0 || max_genus < 0 || max_entry < 1 {
                return Err(CliError::Validation("bounds must be positive".into()));
            }
            let bounds = Bounds {
                max_nodes,
                max_genus,
                max_fibers,
                max_entry,
                orientable_only: !nonorientable,
            };
            let g = random_tree(&mut stream(seed), &bounds);
            let raw = g.to_raw();
            emit(to_json(&raw), to_text(&raw))
        }
    })
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, env_seed: Option<String>, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli, env_seed, stdin) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
