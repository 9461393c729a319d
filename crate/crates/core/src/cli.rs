//! The `cirsolve` command line, callable in-process through [`run_cli`].
//!
//! Exit codes: 0 success (or "yes" for `check`), 1 no consistent sample,
//! 2 usage error, 3 unreadable or malformed input, 4 budget exceeded.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use crate::classify::{classify, Classification, Problem};
use crate::engine::{self, SolveOptions, Solved, Solver};
use crate::error::SolveError;
use crate::exact::oracle_enumerate_with_cap;
use crate::fd::FdSet;
use crate::gadgets::{
    gadget_nm_sat, gadget_perfect_matching, gadget_sat_matching, nm_sat_fds, perfect_matching_fds, sat_matching_fds,
};
use crate::io::{parse_cir, parse_dimacs, parse_edge_list, parse_fds, write_cir, ProbFormat};
use crate::model::{sample_probability, Cir, Relation, Schema};
use crate::poly::Mpd;
use crate::rational::{to_decimal_string, to_fraction_string, Rational};
use crate::sampler::{conditional_samples, CellOrder, EngineBackend};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "cirsolve", version, about = "Consistency of uncertain relations under functional dependencies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complexity of possibility, MPD and probability for an FD set.
    Classify(ClassifyArgs),
    /// Whether some sample satisfies the FDs (exit 0 yes, 1 no).
    Check(SolveArgs),
    /// A most probable consistent sample.
    Mpd(SolveArgs),
    /// Probability that a random sample satisfies the FDs.
    Prob(SolveArgs),
    /// Samples drawn conditioned on consistency.
    Sample(SampleArgs),
    /// Full enumeration of the samples.
    Oracle(SolveArgs),
    /// Builds a hardness gadget as a CIR document.
    Gadget(GadgetArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// CIR document.
    #[arg(long)]
    input: PathBuf,
    /// FD set in the rule language, or `@path` to read it from a file.
    #[arg(long)]
    fds: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Adds wall-clock timings to the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// CIR document supplying the schema.
    #[arg(long, required_unless_present = "schema", conflicts_with = "schema")]
    input: Option<PathBuf>,
    /// Attribute names, uncertain ones with a trailing `?`.
    #[arg(long)]
    schema: Option<String>,
    #[arg(long)]
    fds: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    solver: SolverArg,
    /// Largest world count an exponential solver may face.
    #[arg(long, default_value_t = crate::exact::DEFAULT_WORLD_CAP)]
    budget: u128,
    /// Node limit for the search.
    #[arg(long)]
    node_budget: Option<u64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Args, Debug)]
struct GadgetArgs {
    #[arg(value_enum)]
    kind: GadgetKind,
    /// DIMACS CNF for the SAT gadgets, an edge list for pm-count.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the document; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Auto,
    Poly,
    Exact,
    Oracle,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Solver {
        match s {
            SolverArg::Auto => Solver::Auto,
            SolverArg::Poly => Solver::Poly,
            SolverArg::Exact => Solver::Exact,
            SolverArg::Oracle => Solver::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GadgetKind {
    NmSat,
    PmCount,
    SatMatching,
}

/// A failed run: exit code and message.
struct Failure(i32, String);

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match &e {
            SolveError::Infeasible => EXIT_NO,
            SolveError::NodeBudget { .. } | SolveError::WorldBudget { .. } => EXIT_BUDGET,
            SolveError::NoPolyPlan(_) | SolveError::Misuse(_) | SolveError::Model(_) => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

/// A rendered report; `code` is the exit status.
struct Report {
    code: i32,
    json: Json,
    table: String,
}

impl Report {
    fn ok(json: Json, table: String) -> Self {
        Report { code: EXIT_OK, json, table }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json rendering");
                s.push('\n');
                s
            }
            Format::Table => self.table.clone(),
        }
    }
}

/// Runs the command line `args` (program name first).
pub fn run_cli<I, T>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                CliOutcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((stdout, code)) => CliOutcome { code, stdout, stderr: String::new() },
        Err(Failure(code, message)) => CliOutcome { code, stdout: String::new(), stderr: format!("error: {message}\n") },
    }
}

fn dispatch(command: Command) -> Result<(String, i32), Failure> {
    let start = Instant::now();
    let (report, format, timings) = match command {
        Command::Classify(a) => (cmd_classify(&a)?, a.format, false),
        Command::Check(a) => (cmd_check(&a)?, a.common.format, a.common.timings),
        Command::Mpd(a) => (cmd_mpd(&a)?, a.common.format, a.common.timings),
        Command::Prob(a) => (cmd_prob(&a)?, a.common.format, a.common.timings),
        Command::Oracle(a) => (cmd_oracle(&a)?, a.common.format, a.common.timings),
        Command::Sample(a) => (cmd_sample(&a)?, a.solve.common.format, a.solve.common.timings),
        Command::Gadget(a) => {
            let format = a.format;
            (cmd_gadget(&a)?, format, false)
        }
    };
    let mut report = report;
    if timings {
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        report.json["timings"] = json!({ "total_ms": ms });
        let _ = writeln!(report.table, "time: {ms:.3} ms");
    }
    Ok((report.render(format), report.code))
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_fds(text: &str, schema: Arc<Schema>) -> Result<FdSet, Failure> {
    let text = match text.strip_prefix('@') {
        Some(path) => read(&PathBuf::from(path))?,
        None => text.to_string(),
    };
    parse_fds(&text, schema).map_err(|e| Failure(EXIT_PARSE, format!("fds: {e}")))
}

fn load(common: &Common) -> Result<(Cir, FdSet), Failure> {
    let cir = parse_cir(&read(&common.input)?)
        .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", common.input.display())))?;
    let fds = load_fds(&common.fds, cir.schema().clone())?;
    Ok((cir, fds))
}

fn options(a: &SolveArgs) -> SolveOptions {
    SolveOptions { solver: a.solver.into(), world_budget: a.budget, node_budget: a.node_budget }
}

fn prob_json(p: &Rational) -> Json {
    json!({ "fraction": to_fraction_string(p), "decimal": to_decimal_string(p, 12) })
}

fn prob_text(p: &Rational) -> String {
    format!("{} ({})", to_fraction_string(p), to_decimal_string(p, 12))
}

fn relation_json(r: &Relation) -> Json {
    let schema = r.schema();
    let tuples: Vec<Json> = r
        .rows()
        .map(|(tid, vals)| {
            let cells: Map<String, Json> = vals
                .iter()
                .enumerate()
                .map(|(a, v)| (schema.name(a).to_string(), Json::String(v.to_string())))
                .collect();
            json!({ "tid": tid.0, "cells": cells })
        })
        .collect();
    json!({ "tuples": tuples })
}

fn classification_json(c: &Classification) -> Json {
    let schema = c.fds.schema();
    let mut verdicts = Map::new();
    for p in Problem::ALL {
        let v = c.verdict(p);
        verdicts.insert(
            p.name().to_string(),
            json!({
                "complexity": v.complexity.to_string(),
                "theorem": v.theorem.map(|t| t.name()),
                "reason": v.theorem.map(|t| t.citation()),
                "plan": v.plan.describe(schema),
            }),
        );
    }
    let classes: Vec<String> = c.equivalence_classes.iter().map(|s| schema.display_set(*s)).collect();
    json!({ "fds": c.fds.to_dsl(), "verdicts": verdicts, "equivalence_classes": classes })
}

/// Header shared by the solving reports.
fn solve_header(command: &str, fds: &FdSet, problem: Problem, options: &SolveOptions, steps: &[String]) -> Json {
    let c = classify(fds);
    let v = c.verdict(problem);
    json!({
        "command": command,
        "fds": c.fds.to_dsl(),
        "solver": options.solver.name(),
        "complexity": v.complexity.to_string(),
        "theorem": v.theorem.map(|t| t.name()),
        "steps": steps,
    })
}

fn header_text(json: &Json) -> String {
    let mut s = format!(
        "solver: {}\ncomplexity: {}{}\n",
        json["solver"].as_str().unwrap_or(""),
        json["complexity"].as_str().unwrap_or(""),
        json["theorem"].as_str().map(|t| format!(" [{t}]")).unwrap_or_default()
    );
    for step in json["steps"].as_array().into_iter().flatten() {
        let _ = writeln!(s, "step: {}", step.as_str().unwrap_or(""));
    }
    s
}

fn cmd_classify(a: &ClassifyArgs) -> Result<Report, Failure> {
    let schema = match (&a.input, &a.schema) {
        (Some(path), _) => parse_cir(&read(path)?)
            .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?
            .schema()
            .clone(),
        (None, Some(names)) => {
            let names: Vec<&str> = names.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            Arc::new(Schema::parse_names(&names).map_err(|e| Failure(EXIT_PARSE, format!("schema: {e}")))?)
        }
        (None, None) => return Err(Failure(EXIT_USAGE, "--input or --schema is required".into())),
    };
    let fds = load_fds(&a.fds, schema)?;
    let c = classify(&fds);
    let mut json = classification_json(&c);
    json["command"] = json!("classify");
    Ok(Report::ok(json, c.to_string()))
}

fn mpd_report(command: &str, solved: Solved<Option<Mpd>>, fds: &FdSet, problem: Problem, opts: &SolveOptions) -> Report {
    let mut json = solve_header(command, fds, problem, opts, &solved.steps);
    let mut table = header_text(&json);
    let code = match &solved.value {
        Some(m) => {
            json["consistent"] = json!(true);
            json["probability"] = prob_json(&m.probability);
            json["sample"] = relation_json(&m.relation);
            let _ = write!(table, "consistent: yes\nprobability: {}\n{}", prob_text(&m.probability), m.relation);
            EXIT_OK
        }
        None => {
            json["consistent"] = json!(false);
            table.push_str("consistent: no\n");
            EXIT_NO
        }
    };
    Report { code, json, table }
}

fn cmd_check(a: &SolveArgs) -> Result<Report, Failure> {
    let (cir, fds) = load(&a.common)?;
    let opts = options(a);
    let solved = engine::possibly_consistent(&cir, &fds, &opts)?;
    Ok(mpd_report("check", solved, &fds, Problem::Possibility, &opts))
}

fn cmd_mpd(a: &SolveArgs) -> Result<Report, Failure> {
    let (cir, fds) = load(&a.common)?;
    let opts = options(a);
    let solved = engine::most_probable(&cir, &fds, &opts)?;
    Ok(mpd_report("mpd", solved, &fds, Problem::Mpd, &opts))
}

fn cmd_prob(a: &SolveArgs) -> Result<Report, Failure> {
    let (cir, fds) = load(&a.common)?;
    let opts = options(a);
    let solved = engine::probability(&cir, &fds, &opts)?;
    let mut json = solve_header("prob", &fds, Problem::Probability, &opts, &solved.steps);
    json["probability"] = prob_json(&solved.value);
    let table = format!("{}probability: {}\n", header_text(&json), prob_text(&solved.value));
    Ok(Report::ok(json, table))
}

fn cmd_oracle(a: &SolveArgs) -> Result<Report, Failure> {
    let (cir, fds) = load(&a.common)?;
    let report = oracle_enumerate_with_cap(&cir, &fds, a.budget)?;
    let mut json = json!({
        "command": "oracle",
        "fds": fds.normalize().to_dsl(),
        "solver": "oracle",
        "worlds": report.worlds.to_string(),
        "consistent_worlds": report.count.to_string(),
        "probability": prob_json(&report.total),
    });
    let mut table = format!(
        "worlds: {}\nconsistent worlds: {}\nprobability: {}\n",
        report.worlds,
        report.count,
        prob_text(&report.total)
    );
    match &report.max {
        Some(m) => {
            json["mpd"] = json!({ "probability": prob_json(&m.probability), "sample": relation_json(&m.relation) });
            let _ = write!(table, "mpd probability: {}\n{}", prob_text(&m.probability), m.relation);
        }
        None => json["mpd"] = Json::Null,
    }
    Ok(Report::ok(json, table))
}

fn cmd_sample(a: &SampleArgs) -> Result<Report, Failure> {
    let (cir, fds) = load(&a.solve.common)?;
    let opts = options(&a.solve);
    let order = CellOrder::lexicographic(&cir);
    let samples = conditional_samples(&cir, &fds, &EngineBackend(opts), a.seed, a.count, &order)?;
    let total = engine::probability(&cir, &fds, &opts)?;
    let mut json = solve_header("sample", &fds, Problem::Probability, &opts, &total.steps);
    json["seed"] = json!(a.seed);
    json["consistency_probability"] = prob_json(&total.value);
    let mut table = format!("{}seed: {}\nconsistency probability: {}\n", header_text(&json), a.seed, prob_text(&total.value));
    let mut drawn = Vec::with_capacity(samples.len());
    for (i, r) in samples.iter().enumerate() {
        let p = sample_probability(&cir, r).map_err(SolveError::from)?;
        drawn.push(json!({ "probability": prob_json(&p), "sample": relation_json(r) }));
        let _ = write!(table, "\nsample {} (probability {})\n{}", i + 1, prob_text(&p), r);
    }
    json["samples"] = Json::Array(drawn);
    Ok(Report::ok(json, table))
}

fn cmd_gadget(a: &GadgetArgs) -> Result<Report, Failure> {
    let text = read(&a.input)?;
    let bad = |e: crate::io::FormatError| Failure(EXIT_PARSE, format!("{}: {e}", a.input.display()));
    let gadget = |e: crate::gadgets::GadgetError| Failure(EXIT_USAGE, e.to_string());
    let (cir, fds, scale) = match a.kind {
        GadgetKind::NmSat => {
            let cir = gadget_nm_sat(&parse_dimacs(&text).map_err(bad)?).map_err(gadget)?;
            let fds = nm_sat_fds(&cir);
            (cir, fds, None)
        }
        GadgetKind::SatMatching => {
            let cir = gadget_sat_matching(&parse_dimacs(&text).map_err(bad)?).map_err(gadget)?;
            let fds = sat_matching_fds(&cir);
            (cir, fds, None)
        }
        GadgetKind::PmCount => {
            let (cir, scale) = gadget_perfect_matching(&parse_edge_list(&text).map_err(bad)?).map_err(gadget)?;
            let fds = perfect_matching_fds(&cir);
            (cir, fds, Some(scale))
        }
    };
    let document = write_cir(&cir, ProbFormat::Fraction);
    let mut json = json!({
        "command": "gadget",
        "fds": fds.to_dsl(),
        "tuples": cir.len(),
        "scale": scale.as_ref().map(|s| s.to_string()),
    });
    let mut table = format!("fds: {}\ntuples: {}\n", fds.to_dsl(), cir.len());
    if let Some(s) = &scale {
        let _ = writeln!(table, "scale: {s}");
    }
    match &a.output {
        Some(path) => {
            std::fs::write(path, &document).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            json["output"] = json!(path.display().to_string());
            let _ = writeln!(table, "written: {}", path.display());
        }
        None => {
            json["document"] = serde_json::from_str(&document).expect("own output");
            table = document;
        }
    }
    Ok(Report::ok(json, table))
}
