//! The `tilecheck` command line.
//!
//! Every subcommand prints one JSON object (or an indented text rendering of
//! it). Exit codes: 0 when every requested check ran and passed, 2 when a
//! condition fails, 1 on usage, input or resource errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::conditions::{
    check_equivalence, check_starstar, check_starstar_prime, SsOutcome, SsSolution, SspOutcome,
};
use crate::counterexample::{build_counterexample, verify_counterexample};
use crate::cycles::{abundance, enumerate_simple_cycles, CycleClass};
use crate::error::{Error, Result};
use crate::feasible::{fraction, integer_scale, Certificate, LinearSystem, RationalVector};
use crate::model::{parse_instance, parse_presentation, parse_tile_set, GraphFamily, WangTileSet};
use crate::oracle::{folner_audit, tile_rectangle, tile_torus, TilingGrid, DEFAULT_NODE_BUDGET};
use crate::star::{build_free_ball, check_star, StarOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILS: i32 = 2;

pub const BUDGET_ENV: &str = "TILECHECK_NODE_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "tilecheck",
    version,
    about = "Emptiness and periodicity checks for Wang tile sets"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Search node budget; defaults to $TILECHECK_NODE_BUDGET, then 10^7.
    #[arg(long, global = true)]
    pub node_budget: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Rect,
    Torus,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Free-group emptiness criterion on a graph family or tile set.
    Star {
        file: PathBuf,
        /// Also label the free-group ball of this radius from the witness.
        #[arg(long)]
        max_radius: Option<usize>,
    },
    /// Simple cycles and abundance vectors of every generator graph.
    Cycles { file: PathBuf },
    /// Cycle balance condition on a graph family or tile set.
    Ss { file: PathBuf },
    /// Color balance condition on a tile set.
    Ssp { file: PathBuf },
    /// Both balance conditions, checked against each other, with translations.
    Equiv { file: PathBuf },
    /// Searches for a rectangle or torus tiling of Z².
    Tile {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Shape::Rect)]
        shape: Shape,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
    },
    /// Tile frequencies of a torus tiling over centered boxes.
    Freq {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_radius: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
    },
    /// Tile set from a relator of a presentation, with its verification.
    Counterexample {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        relator: usize,
        /// Where to write the tile set; printed inside the report otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All conditions plus bounded tiling probes.
    Audit {
        file: PathBuf,
        /// Largest rectangle and torus width probed.
        #[arg(long, default_value_t = 4)]
        w: usize,
        /// Largest rectangle and torus height probed.
        #[arg(long, default_value_t = 4)]
        h: usize,
    },
}

/// Everything a run produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let budget = match node_budget(cli.node_budget) {
        Ok(b) => b,
        Err(msg) => {
            return Output {
                code: EXIT_ERROR,
                stdout: String::new(),
                stderr: msg + "\n",
            }
        }
    };
    match execute(&cli.command, budget) {
        Ok((code, report)) => Output {
            code,
            stdout: render(&report, cli.format),
            stderr: String::new(),
        },
        Err(e) => Output {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn node_budget(flag: Option<u64>) -> std::result::Result<u64, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("error: {BUDGET_ENV} must be a nonnegative integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn code_for(holds: bool) -> i32 {
    if holds {
        EXIT_OK
    } else {
        EXIT_FAILS
    }
}

fn execute(command: &Command, budget: u64) -> Result<(i32, Value)> {
    match command {
        Command::Star { file, max_radius } => {
            let graphs = parse_instance(&read(file)?)?.graphs();
            let report = star_report(&graphs, *max_radius);
            Ok((code_for(report["holds"] == json!(true)), report))
        }
        Command::Cycles { file } => {
            let graphs = parse_instance(&read(file)?)?.graphs();
            Ok((EXIT_OK, cycles_report(&graphs)))
        }
        Command::Ss { file } => {
            let graphs = parse_instance(&read(file)?)?.graphs();
            let outcome = check_starstar(&graphs);
            Ok((code_for(outcome.holds()), ss_report(&graphs, &outcome)))
        }
        Command::Ssp { file } => {
            let tiles = parse_tile_set(&read(file)?)?;
            let outcome = check_starstar_prime(&tiles);
            Ok((code_for(outcome.holds()), ssp_report(&tiles, &outcome)))
        }
        Command::Equiv { file } => {
            let tiles = parse_tile_set(&read(file)?)?;
            let report = check_equivalence(&tiles)?;
            let mut out = Map::new();
            out.insert("holds".into(), json!(report.holds()));
            out.insert("ss".into(), ss_report(&report.graphs, &report.ss));
            out.insert("ssp".into(), ssp_report(&tiles, &report.ssp));
            if let (Some(a), Some(b)) = (&report.ssp_from_ss, &report.ss_from_ssp) {
                out.insert(
                    "translations".into(),
                    json!({
                        "ssp_from_ss": weights_by_tile(&tiles, &a.weights),
                        "ss_from_ssp": ss_solution_json(&report.graphs, b),
                    }),
                );
            }
            Ok((code_for(report.holds()), Value::Object(out)))
        }
        Command::Tile { file, shape, w, h } => {
            let tiles = parse_tile_set(&read(file)?)?;
            let found = match shape {
                Shape::Rect => tile_rectangle(&tiles, *w, *h, budget)?,
                Shape::Torus => tile_torus(&tiles, *w, *h, budget)?,
            };
            let report = json!({
                "shape": match shape { Shape::Rect => "rect", Shape::Torus => "torus" },
                "width": w,
                "height": h,
                "found": found.is_some(),
                "rows": found.as_ref().map(|g| g.rows(&tiles)),
            });
            // a missing rectangle rules out every tiling of Z²
            let code = if found.is_none() && *shape == Shape::Rect {
                EXIT_FAILS
            } else {
                EXIT_OK
            };
            Ok((code, report))
        }
        Command::Freq {
            file,
            max_radius,
            w,
            h,
        } => {
            let tiles = parse_tile_set(&read(file)?)?;
            let Some(grid) = tile_torus(&tiles, *w, *h, budget)? else {
                return Ok((EXIT_OK, json!({ "found": false, "width": w, "height": h })));
            };
            let report = freq_report(&tiles, &grid, *max_radius)?;
            let code = code_for(
                report["within_bound"] == json!(true) && report["aligned_zero"] == json!(true),
            );
            Ok((code, report))
        }
        Command::Counterexample { file, relator, out } => {
            let pres = parse_presentation(&read(file)?)?;
            let ce = build_counterexample(&pres, *relator)?;
            let verification = verify_counterexample(&ce)?;
            let tile_file = serde_json::to_value(ce.tiles.to_file()).expect("serializable");
            let mut report = json!({
                "verification": verification,
                "graphs": serde_json::to_value(ce.graphs.to_file()).expect("serializable"),
            });
            match out {
                Some(path) => {
                    let text =
                        serde_json::to_string_pretty(&tile_file).expect("serializable") + "\n";
                    std::fs::write(path, text)
                        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    report["written"] = json!(path.display().to_string());
                }
                None => report["tiles"] = tile_file,
            }
            Ok((EXIT_OK, report))
        }
        Command::Audit { file, w, h } => audit(&parse_tile_set(&read(file)?)?, *w, *h, budget),
    }
}

fn letters(graphs: &GraphFamily, set: &[usize]) -> Vec<String> {
    set.iter().map(|&a| graphs.letter(a).to_string()).collect()
}

fn star_report(graphs: &GraphFamily, radius: Option<usize>) -> Value {
    match check_star(graphs) {
        StarOutcome::Holds(w) => {
            let choice = |map: &BTreeMap<(usize, usize), usize>| {
                let mut per_gen: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
                for (&(a, i), &b) in map {
                    per_gen
                        .entry(format!("g{}", i + 1))
                        .or_default()
                        .insert(graphs.letter(a).into(), graphs.letter(b).into());
                }
                per_gen
            };
            let mut out = json!({
                "holds": true,
                "subalphabet": letters(graphs, &w.subalphabet),
                "psi": choice(&w.forward),
                "psi_inverse": choice(&w.backward),
                "pruning_trace": [],
            });
            if let Some(r) = radius {
                let ball = build_free_ball(&w, graphs, r);
                out["ball"] = json!({ "radius": r, "nodes": ball.labels.len(), "valid": ball.is_valid(graphs) });
            }
            out
        }
        StarOutcome::Fails(trace) => {
            let rounds: Vec<Value> = (1..=trace.rounds())
                .map(|round| {
                    let removed: Vec<usize> = (0..graphs.letter_count())
                        .filter(|&a| trace.removed_in_round[a] == Some(round))
                        .collect();
                    json!({ "round": round, "removed": letters(graphs, &removed) })
                })
                .collect();
            json!({ "holds": false, "subalphabet": [], "pruning_trace": rounds })
        }
    }
}

fn cycle_json(graphs: &GraphFamily, c: &CycleClass) -> Value {
    let abundance: BTreeMap<String, usize> = abundance(c)
        .iter()
        .map(|(a, k)| (graphs.letter(a).to_string(), k))
        .collect();
    json!({ "cycle": letters(graphs, c.vertices()), "abundance": abundance })
}

fn cycles_report(graphs: &GraphFamily) -> Value {
    let per_gen: Vec<Value> = (0..graphs.generators())
        .map(|i| {
            let cycles: Vec<Value> = enumerate_simple_cycles(graphs.graph(i))
                .iter()
                .map(|c| cycle_json(graphs, c))
                .collect();
            json!({ "generator": format!("g{}", i + 1), "cycles": cycles })
        })
        .collect();
    json!({ "alphabet": graphs.alphabet(), "graphs": per_gen })
}

fn system_json(sys: &LinearSystem) -> Value {
    let equations: Vec<String> = sys.to_string().lines().map(str::to_string).collect();
    json!({ "variables": sys.variables(), "equations": equations })
}

fn fractions(v: &[BigRational]) -> Vec<String> {
    v.iter().map(fraction).collect()
}

fn certificate_json(sys: &LinearSystem, cert: &Certificate) -> Value {
    json!({
        "multipliers": fractions(&cert.multipliers),
        "combination": fractions(&sys.combine(&cert.multipliers)),
    })
}

fn ss_solution_json(graphs: &GraphFamily, sol: &SsSolution) -> Value {
    let per_gen: Vec<Value> = (0..graphs.generators())
        .map(|i| {
            let weighted: Vec<Value> = sol.cycles[i]
                .iter()
                .zip(&sol.weights[i])
                .map(|(c, w)| json!({ "cycle": letters(graphs, c.vertices()), "weight": fraction(w) }))
                .collect();
            json!({ "generator": format!("g{}", i + 1), "cycles": weighted })
        })
        .collect();
    Value::Array(per_gen)
}

fn ss_report(graphs: &GraphFamily, outcome: &SsOutcome) -> Value {
    match outcome {
        SsOutcome::Holds(sol) => {
            json!({ "holds": true, "solution": ss_solution_json(graphs, sol) })
        }
        SsOutcome::NoCycle { generator } => {
            json!({ "holds": false, "reason": format!("g{} has no cycle", generator + 1) })
        }
        SsOutcome::Infeasible {
            system,
            certificate,
        } => json!({
            "holds": false,
            "system": system_json(system),
            "certificate": certificate_json(system, certificate),
        }),
    }
}

fn weights_by_tile(tiles: &WangTileSet, weights: &[BigRational]) -> BTreeMap<String, String> {
    tiles
        .tiles()
        .iter()
        .zip(weights)
        .map(|(t, w)| (t.id.clone(), fraction(w)))
        .collect()
}

fn ssp_report(tiles: &WangTileSet, outcome: &SspOutcome) -> Value {
    match outcome {
        SspOutcome::Holds(sol) => {
            let integer: BTreeMap<String, String> = tiles
                .tiles()
                .iter()
                .zip(integer_scale(&RationalVector {
                    entries: sol.weights.clone(),
                }))
                .map(|(t, k): (_, BigInt)| (t.id.clone(), k.to_string()))
                .collect();
            json!({ "holds": true, "solution": weights_by_tile(tiles, &sol.weights), "integer_solution": integer })
        }
        SspOutcome::Infeasible {
            system,
            certificate,
        } => json!({
            "holds": false,
            "system": system_json(system),
            "certificate": certificate_json(system, certificate),
        }),
    }
}

fn freq_report(tiles: &WangTileSet, grid: &TilingGrid, max_radius: usize) -> Result<Value> {
    let radii: Vec<usize> = (1..=max_radius).collect();
    let report = folner_audit(tiles, grid, &radii)?;
    let boxes: Vec<Value> = report
        .boxes
        .iter()
        .map(|b| {
            let defects: Vec<Value> = b
                .defects
                .iter()
                .map(|d| {
                    json!({
                        "generator": format!("g{}", d.generator + 1),
                        "color": tiles.colors()[d.color],
                        "defect": fraction(&d.value),
                        "bound": fraction(&d.bound),
                        "period_aligned": d.period_aligned,
                    })
                })
                .collect();
            json!({
                "k": b.radius,
                "box_size": b.box_size,
                "frequencies": weights_by_tile(tiles, &b.frequencies),
                "defects": defects,
            })
        })
        .collect();
    Ok(json!({
        "found": true,
        "width": grid.width,
        "height": grid.height,
        "rows": grid.rows(tiles),
        "periods": [report.periods.0, report.periods.1],
        "boxes": boxes,
        "within_bound": report.all_within_bound(),
        "aligned_zero": report.aligned_defects_vanish(),
    }))
}

/// Outcome of one bounded search, as reported by `audit`.
fn probe(found: Result<Option<TilingGrid>>) -> Result<Value> {
    match found {
        Ok(g) => Ok(json!(g.is_some())),
        Err(Error::ResourceLimit { .. }) => Ok(json!("resource_limit")),
        Err(e) => Err(e),
    }
}

fn audit(tiles: &WangTileSet, w: usize, h: usize, budget: u64) -> Result<(i32, Value)> {
    let graphs = crate::model::wang_to_graphs(tiles);
    let star = check_star(&graphs).holds();
    let ssp = check_starstar_prime(tiles).holds();
    let ss = check_starstar(&graphs).holds();
    let consistent = ss == ssp;
    let oracle = if tiles.generators() == 2 {
        let mut torus = Map::new();
        for tw in 1..=w {
            for th in 1..=h {
                torus.insert(
                    format!("{tw}x{th}"),
                    probe(tile_torus(tiles, tw, th, budget))?,
                );
            }
        }
        json!({
            "rectangle_2x2": probe(tile_rectangle(tiles, 2, 2, budget))?,
            "rectangle": { "size": format!("{w}x{h}"), "found": probe(tile_rectangle(tiles, w, h, budget))? },
            "torus": torus,
        })
    } else {
        Value::Null
    };
    let report =
        json!({ "star": star, "ss": ss, "ssp": ssp, "consistent": consistent, "oracle": oracle });
    Ok((code_for(star && ss && ssp && consistent), report))
}

/// JSON with sorted keys, or an indented `key: value` rendering.
pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        Format::Text => {
            let mut out = String::new();
            render_text(value, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.is_empty() => Some("[]".into()),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => Some(
            items
                .iter()
                .map(|i| scalar(i).expect("scalar"))
                .collect::<Vec<_>>()
                .join(" "),
        ),
        _ => None,
    }
}

fn render_text(value: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(v, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).expect("scalar"))),
    }
}
