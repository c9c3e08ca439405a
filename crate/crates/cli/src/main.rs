//! `gridknot`: batch front end for grid diagrams.
//!
//! Exit codes: 0 when the command did what was asked (for `simplify`, the
//! goal was reached), 2 when a search exhausted its class, 3 when it ran out
//! of budget, 1 for usage, parse and validation failures.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gridknot::convert::{self, BraidWord, PDCode};
use gridknot::moves::{self, GridMove};
use gridknot::simplify::{self, Goal, SearchConfig, Status};
use gridknot::transcript;
use gridknot::{GridDiagram, GridError};
use gridknot_normal::{build_triangulation, coordinate_bound, reconstruct, vertex_enumerate, vertex_link, MAX_N};
use serde::Serialize;
use serde_json::{json, Value};

use manifest::Run;

#[derive(Parser, Debug)]
#[command(name = "gridknot", version, about = "Grid diagrams: validation, conversion, simplification, normal surfaces")]
struct Cli {
    /// Write the run manifest here instead of to standard error.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Worker threads for search and enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum RenderFormat {
    Ascii,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Source {
    Braid,
    Pd,
    Grid,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Target {
    Grid,
    Pd,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GoalArg {
    Trivial,
    Split,
    Reduce,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check a grid file.
    Validate {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Draw a grid as text or SVG.
    Render {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "ascii")]
        format: RenderFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert between braid words, PD codes and grids.
    Convert {
        path: PathBuf,
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Conversion report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search for the trivial grid or a disconnected one.
    Simplify {
        path: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        slack: usize,
        #[arg(long, value_enum, default_value = "trivial")]
        goal: GoalArg,
        /// Move log, one JSON move per line.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Directory for one transcript file per logged move.
        #[arg(long)]
        emit_transcripts: Option<PathBuf>,
        /// Result JSON; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand moves into Reidemeister transcripts and verify them.
    Transcript {
        path: PathBuf,
        /// Moves as a JSON array or one JSON move per line.
        #[arg(long)]
        moves: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate vertex normal surfaces of the join triangulation.
    NormalEnum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the face gluings of the triangulation.
        #[arg(long)]
        triangulation: Option<PathBuf>,
    },
    /// Apply seeded random legal moves to the trivial grid.
    Scramble {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Render { .. } => "render",
            Command::Convert { .. } => "convert",
            Command::Simplify { .. } => "simplify",
            Command::Transcript { .. } => "transcript",
            Command::NormalEnum { .. } => "normal-enum",
            Command::Scramble { .. } => "scramble",
        }
    }
}

fn parse_grid(text: &str) -> Result<GridDiagram, GridError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| GridError::Parse { line: e.line(), col: e.column(), msg: e.to_string() })
    } else {
        GridDiagram::parse(text)
    }
}

fn read_grid(run: &mut Run, path: &Path) -> Result<GridDiagram> {
    let text = run.read_input(path)?;
    parse_grid(&text).with_context(|| format!("{}", path.display()))
}

fn jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it)?);
        out.push('\n');
    }
    Ok(out)
}

fn cmd_validate(run: &mut Run, path: &Path, as_json: bool) -> Result<u8> {
    let text = run.read_input(path)?;
    let (ok, report) = match parse_grid(&text) {
        Ok(g) => (
            true,
            json!({
                "ok": true,
                "n": g.n(),
                "components": g.component_count(),
                "crossings": g.crossing_count(),
            }),
        ),
        Err(e) => {
            let violations: Vec<String> = match &e {
                GridError::Invalid(vs) => vs.iter().map(|v| v.to_string()).collect(),
                _ => Vec::new(),
            };
            (false, json!({ "ok": false, "error": e.to_string(), "violations": violations }))
        }
    };
    if as_json {
        println!("{report}");
    } else if ok {
        println!("ok: n={} components={} crossings={}", report["n"], report["components"], report["crossings"]);
    } else {
        eprintln!("invalid: {}", report["error"].as_str().unwrap_or_default());
    }
    run.manifest.details = report;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_render(run: &mut Run, path: &Path, format: RenderFormat, out: Option<&Path>) -> Result<u8> {
    let g = read_grid(run, path)?;
    let text = match format {
        RenderFormat::Ascii => g.render_ascii(),
        RenderFormat::Svg => g.render_svg(),
    };
    run.emit(out, &text)?;
    Ok(0)
}

fn cmd_convert(
    run: &mut Run,
    path: &Path,
    from: Source,
    to: Target,
    out: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<u8> {
    let text = run.read_input(path)?;
    let (body, report) = match (from, to) {
        (Source::Braid, Target::Grid) => {
            let b = BraidWord::parse(&text)?;
            let (g, rep) = convert::braid_to_grid(&b);
            (g.serialize(), serde_json::to_value(rep)?)
        }
        (Source::Braid, Target::Pd) => {
            let b = BraidWord::parse(&text)?;
            let pd = convert::braid_to_pd(&b);
            (pd.to_string(), json!({ "crossings": pd.crossings.len(), "free_loops": pd.free_loops }))
        }
        (Source::Pd, Target::Grid) => {
            let pd = PDCode::parse(&text)?;
            let (g, rep) = convert::pd_to_grid(&pd)?;
            (g.serialize(), serde_json::to_value(rep)?)
        }
        (Source::Pd, Target::Pd) => {
            let pd = PDCode::parse(&text)?;
            pd.validate()?;
            let pd = pd.normalized();
            (pd.to_string(), json!({ "crossings": pd.crossings.len(), "free_loops": pd.free_loops }))
        }
        (Source::Grid, Target::Pd) => {
            let g = parse_grid(&text)?;
            let pd = convert::grid_to_pd(&g);
            (pd.to_string(), json!({ "crossings": pd.crossings.len(), "free_loops": pd.free_loops }))
        }
        (Source::Grid, Target::Grid) => {
            let g = parse_grid(&text)?;
            let (h, log) = convert::reduce(&g);
            (h.serialize(), json!({ "arc_index_raw": g.n(), "arc_index": h.n(), "moves": log }))
        }
    };
    run.emit(out, &body)?;
    if let Some(p) = report_path {
        run.write(p, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    run.manifest.details = report;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simplify(
    run: &mut Run,
    workers: usize,
    path: &Path,
    budget: u64,
    slack: usize,
    goal: GoalArg,
    log: Option<&Path>,
    transcripts: Option<&Path>,
    out: Option<&Path>,
) -> Result<u8> {
    let g = read_grid(run, path)?;
    let cfg = SearchConfig {
        node_budget: budget,
        stabilize_slack: slack,
        goal: match goal {
            GoalArg::Trivial => Goal::Trivial,
            GoalArg::Split => Goal::Split,
            GoalArg::Reduce => Goal::Reduce,
        },
        record_moves: true,
        seed: 0,
        workers,
    };
    cfg.check()?;
    let result = simplify::simplify(&g, &cfg);
    let c = g.crossing_count();
    let caps = transcript::budget_report_exact(&g, &result.move_log, c.max(1))?;
    run.emit(out, &(serde_json::to_string_pretty(&result)? + "\n"))?;
    if let Some(p) = log {
        run.write(p, &jsonl(&result.move_log)?)?;
    }
    if let Some(dir) = transcripts {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut h = g.clone();
        for (i, m) in result.move_log.iter().enumerate() {
            let t = transcript::transcript(&h, m)?;
            let next = moves::apply(&h, m)?;
            transcript::verify(&t, &h, &next)?;
            run.write(&dir.join(format!("step-{i:06}.json")), &(serde_json::to_string(&t)? + "\n"))?;
            h = next;
        }
    }
    run.manifest.details = json!({
        "status": result.status,
        "final_n": result.final_grid.n(),
        "nodes_explored": result.nodes_explored,
        "counters": result.counters,
        "caps": caps,
    });
    Ok(match result.status {
        Status::Trivial | Status::Disconnected { .. } => 0,
        Status::Exhausted { .. } => {
            // Reduce has no target beyond exhausting the search.
            if cfg.goal == Goal::Reduce {
                0
            } else {
                2
            }
        }
        Status::BudgetExceeded => 3,
    })
}

fn cmd_transcript(run: &mut Run, path: &Path, moves_path: &Path, out: Option<&Path>) -> Result<u8> {
    let g = read_grid(run, path)?;
    let text = std::fs::read_to_string(moves_path).with_context(|| format!("reading {}", moves_path.display()))?;
    let list: Vec<GridMove> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text)?
    } else {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?
    };
    let mut h = g;
    let mut records = Vec::new();
    let mut total = 0usize;
    for (i, m) in list.iter().enumerate() {
        let next = moves::apply(&h, m).with_context(|| format!("move {i} ({m:?})"))?;
        let t = transcript::transcript(&h, m)?;
        let verified = transcript::verify(&t, &h, &next).map_err(|e| e.to_string());
        total += t.len();
        records.push(json!({
            "index": i,
            "cap": transcript::move_cap(m.kind(), h.n()),
            "verified": verified.is_ok(),
            "error": verified.err(),
            "transcript": t,
        }));
        h = next;
    }
    let all_ok = records.iter().all(|r| r["verified"] == Value::Bool(true));
    run.emit(out, &jsonl(&records)?)?;
    run.manifest.details = json!({ "moves": list.len(), "r_moves": total, "all_verified": all_ok });
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_normal_enum(run: &mut Run, workers: usize, n: usize, out: &Path, tri_out: Option<&Path>) -> Result<u8> {
    if n > MAX_N {
        bail!("refusing n={n}: vertex enumeration is limited to n <= {MAX_N}");
    }
    let tri = build_triangulation(n)?;
    if let Some(p) = tri_out {
        run.write(p, &tri.export())?;
    }
    let vs = vertex_enumerate(&tri, workers)?;
    let bound = coordinate_bound(&tri);
    let mut lines = String::new();
    let mut within = true;
    for v in &vs {
        let r = reconstruct(&tri, v)?;
        within &= v.max_coord() <= bound;
        let coords: Vec<Value> = v
            .coords
            .iter()
            .map(|c| u64::try_from(c).map_or_else(|_| Value::String(c.to_string()), Value::from))
            .collect();
        lines.push_str(&serde_json::to_string(&json!({
            "coords": coords,
            "euler": r.euler,
            "binding_weight": r.binding_weight,
        }))?);
        lines.push('\n');
    }
    let links = (0..2 * n).filter(|&k| vs.contains(&vertex_link(&tri, k))).count();
    run.write(out, &lines)?;
    run.manifest.details = json!({
        "n": n,
        "vectors": vs.len(),
        "vertex_links_present": links,
        "coordinate_bound_log2": 7 * n * n - 1,
        "all_within_bound": within,
    });
    Ok(if within { 0 } else { 1 })
}

fn cmd_scramble(run: &mut Run, seed: u64, k: usize, max_n: usize, out: Option<&Path>, log: Option<&Path>) -> Result<u8> {
    if max_n < 2 {
        bail!("--max-n must be at least 2");
    }
    let (g, moves) = simplify::scramble(seed, k, max_n);
    run.emit(out, &g.serialize())?;
    if let Some(p) = log {
        run.write(p, &jsonl(&moves)?)?;
    }
    run.manifest.details = json!({ "n": g.n(), "moves": moves.len() });
    Ok(0)
}

fn dispatch(cli: &Cli, run: &mut Run) -> Result<u8> {
    match &cli.cmd {
        Command::Validate { path, json } => cmd_validate(run, path, *json),
        Command::Render { path, format, out } => cmd_render(run, path, *format, out.as_deref()),
        Command::Convert { path, from, to, out, report } => {
            cmd_convert(run, path, *from, *to, out.as_deref(), report.as_deref())
        }
        Command::Simplify { path, budget, slack, goal, log, emit_transcripts, out } => cmd_simplify(
            run,
            cli.workers,
            path,
            *budget,
            *slack,
            *goal,
            log.as_deref(),
            emit_transcripts.as_deref(),
            out.as_deref(),
        ),
        Command::Transcript { path, moves, out } => cmd_transcript(run, path, moves, out.as_deref()),
        Command::NormalEnum { n, out, triangulation } => {
            cmd_normal_enum(run, cli.workers, *n, out, triangulation.as_deref())
        }
        Command::Scramble { seed, k, max_n, out, log } => cmd_scramble(run, *seed, *k, *max_n, out.as_deref(), log.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.workers == 0 {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(1);
    }
    let config = json!({ "workers": cli.workers, "command": &cli.cmd });
    let mut run = Run::new(cli.cmd.name(), config);
    let code = match dispatch(&cli, &mut run) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            run.manifest.details = json!({ "error": format!("{e:#}") });
            1
        }
    };
    if let Err(e) = run.finish(cli.manifest.as_deref(), code) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
