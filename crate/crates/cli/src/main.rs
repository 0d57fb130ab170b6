mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use stl_distance::aos::{aos, union_area, BoxExpr};
use stl_distance::ingest::{load_corpus, read_formula_dir, read_formula_file};
use stl_distance::milp::{build_ph_program, export_lp_checked};
use stl_distance::ph::{directed_ph, ph, ph_boxsets, BoxDistanceMode};
use stl_distance::sd::{sd, sd_boxsets, union_boxexpr};
use stl_distance::{robustness, to_nnf, Error, Formula, Rational, Result, Side, Trace};

use config::{resolve, EncodingArg, Format, NormalizerArg, Num, RunConfig, Settings, WindowArg};
use output::{aligned, envelope, exit_code, number, print_json, text};

/// Dimension cap while reading formulae before the domain is known.
const ANY_DIMS: usize = 1 << 16;

#[derive(Parser)]
#[command(name = "stldist", version, about = "Distances between signal temporal logic formulae")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// Signal bounds, e.g. `0:1,0:320`.
    #[arg(long, global = true, value_name = "LO:HI,...")]
    domain: Option<String>,
    /// Time bound T.
    #[arg(long = "horizon", short = 'T', global = true)]
    horizon: Option<usize>,
    /// Hold window for eventually in box conversion.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Per-dimension normalization constants.
    #[arg(long, global = true, value_delimiter = ',')]
    x_max: Option<Vec<String>>,
    #[arg(long, global = true, value_enum)]
    normalizer: Option<NormalizerArg>,
    #[arg(long, global = true, value_enum)]
    window: Option<WindowArg>,
    #[arg(long, global = true, value_enum)]
    encoding: Option<EncodingArg>,
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    #[arg(long, global = true)]
    split_limit: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    All,
    Directed,
    Ph,
    Sd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhMode {
    Slice,
    Normalized,
}

#[derive(Subcommand)]
enum Command {
    /// Robustness of a trace; exit 0 when satisfied, 1 when violated.
    Robustness {
        formula: PathBuf,
        trace: PathBuf,
        #[arg(long, default_value_t = 0)]
        t: usize,
    },
    /// Pompeiu-Hausdorff distance between two formulae.
    Ph {
        f1: PathBuf,
        f2: PathBuf,
        /// Also print both directed distances.
        #[arg(long)]
        directed: bool,
        /// Write the directed program of f1 to f2 in LP format instead of solving.
        #[arg(long, value_name = "PATH")]
        export_lp: Option<PathBuf>,
        /// Write the signal attaining the distance as CSV.
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Symmetric-difference distance between two formulae.
    Sd { f1: PathBuf, f2: PathBuf },
    /// Box expression of a formula.
    Aos { formula: PathBuf },
    /// Pairwise distance matrices for a directory of formulae.
    Table {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        metric: Metric,
    },
    /// Distances from the union of specification box sets to a formula.
    Specset {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long)]
        against: PathBuf,
        #[arg(long, value_enum, default_value = "slice")]
        ph_mode: PhMode,
    },
    /// Directed distance program of f1 to f2 in LP format.
    ExportLp {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

impl Flags {
    fn layer(&self) -> Result<RunConfig> {
        let domain = match &self.domain {
            None => None,
            Some(spec) => Some(
                spec.split(',')
                    .map(|part| match part.split_once(':') {
                        Some((lo, hi)) => Ok([Num::Text(lo.trim().into()), Num::Text(hi.trim().into())]),
                        None => Err(Error::InvalidConfig(format!("domain entry '{part}' is not LO:HI"))),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(RunConfig {
            domain,
            horizon: self.horizon,
            delta: self.delta.clone().map(Num::Text),
            x_max: self.x_max.as_ref().map(|v| v.iter().cloned().map(Num::Text).collect()),
            normalizer: self.normalizer,
            window: self.window,
            encoding: self.encoding,
            max_nodes: self.max_nodes,
            split_limit: self.split_limit,
            ..RunConfig::default()
        })
    }
}

struct Context {
    layers: Vec<RunConfig>,
}

impl Context {
    /// Settings for formulae read from `paths`, which must fit them.
    fn settings(&self, anchor: Option<&Path>, formulas: &[&Formula<Rational>]) -> Result<Settings> {
        let dims = formulas.iter().filter_map(|f| f.max_dim()).max().map_or(1, |d| d + 1);
        let horizon = formulas.iter().map(|f| f.horizon()).max().unwrap_or(0);
        let settings = resolve(self.layers.clone(), anchor, dims, horizon)?;
        for f in formulas {
            if let Some(d) = f.max_dim().filter(|d| *d >= settings.dims()) {
                return Err(Error::DimensionOutOfRange { index: d + 1, dims: settings.dims() });
            }
            if f.horizon() > settings.horizon {
                return Err(Error::HorizonExceeded { horizon: f.horizon(), bound: settings.horizon });
            }
        }
        Ok(settings)
    }
}

fn read(path: &Path) -> Result<Formula<Rational>> {
    read_formula_file(path, ANY_DIMS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("stldist: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let mut layers = Vec::new();
    if let Some(path) = &cli.config {
        layers.push(RunConfig::read(path)?);
    }
    let mut flags = cli.flags.layer()?;
    flags.format = cli.format;
    layers.push(flags);
    let ctx = Context { layers };
    match &cli.command {
        Command::Robustness { formula, trace, t } => cmd_robustness(&ctx, formula, trace, *t),
        Command::Ph { f1, f2, directed, export_lp, witness } => {
            cmd_ph(&ctx, f1, f2, *directed, export_lp.as_deref(), witness.as_deref())
        }
        Command::Sd { f1, f2 } => cmd_sd(&ctx, f1, f2),
        Command::Aos { formula } => cmd_aos(&ctx, formula),
        Command::Table { dir, metric } => cmd_table(&ctx, dir, *metric),
        Command::Specset { specs, against, ph_mode } => cmd_specset(&ctx, specs, against, *ph_mode),
        Command::ExportLp { f1, f2, output } => cmd_export_lp(&ctx, f1, f2, output.as_deref()),
    }
}

fn cmd_robustness(ctx: &Context, formula: &Path, trace: &Path, t: usize) -> Result<u8> {
    let f = read(formula)?;
    let anchor = if config::find_meta(formula).is_some() { formula } else { trace };
    let settings = ctx.settings(Some(anchor), &[&f])?;
    let s = Trace::read_csv_file(trace, settings.domain.clone())?;
    let rho = robustness(&s, &f, t)?;
    let satisfied = rho.satisfied();
    let value = match rho.finite() {
        Some(v) => text(v),
        None => rho.to_string(),
    };
    match settings.format {
        Format::Human => println!("{value}"),
        Format::Csv => println!("t,robustness,satisfied\n{t},{value},{satisfied}"),
        Format::Json => print_json(&envelope(
            "robustness",
            json!({ "t": t, "robustness": rho.finite().map(number).unwrap_or(json!(value)), "satisfied": satisfied }),
        )),
    }
    Ok(if satisfied { 0 } else { 1 })
}

fn write_lp(settings: &Settings, f1: &Formula<Rational>, f2: &Formula<Rational>, path: Option<&Path>) -> Result<()> {
    let program = build_ph_program(f1, f2, &settings.domain, settings.horizon, settings.ph.encoding)?;
    let export = export_lp_checked(&program.model);
    match path {
        Some(p) => {
            std::fs::write(p, &export.text).map_err(|e| Error::File { path: p.into(), message: e.to_string() })?;
            eprintln!(
                "wrote {} ({} variables, {} constraints)",
                p.display(),
                program.model.variables.len(),
                program.model.constraints.len()
            );
        }
        None => print!("{}", export.text),
    }
    if export.inexact > 0 {
        eprintln!("warning: {} value(s) rounded in the LP text", export.inexact);
    }
    Ok(())
}

fn cmd_export_lp(ctx: &Context, f1: &Path, f2: &Path, output: Option<&Path>) -> Result<u8> {
    let (a, b) = (read(f1)?, read(f2)?);
    let settings = ctx.settings(Some(f1), &[&a, &b])?;
    write_lp(&settings, &a, &b, output)?;
    Ok(0)
}

fn cmd_ph(
    ctx: &Context,
    f1: &Path,
    f2: &Path,
    directed: bool,
    export_lp: Option<&Path>,
    witness: Option<&Path>,
) -> Result<u8> {
    let (a, b) = (read(f1)?, read(f2)?);
    let settings = ctx.settings(Some(f1), &[&a, &b])?;
    if let Some(path) = export_lp {
        write_lp(&settings, &a, &b, Some(path))?;
        return Ok(0);
    }
    let r = ph(&a, &b, &settings.domain, settings.horizon, &settings.ph)?;
    if let Some(path) = witness {
        match &r.witness {
            Some((_, tr)) => {
                let file = std::fs::File::create(path).map_err(|e| Error::File { path: path.into(), message: e.to_string() })?;
                tr.write_csv(file)?;
            }
            None => eprintln!("no witness: the distance is 0"),
        }
    }
    match settings.format {
        Format::Human => {
            if directed {
                println!("1→2: {}\n2→1: {}", text(&r.directed_12), text(&r.directed_21));
            }
            println!("undirected: {}", text(&r.undirected));
        }
        Format::Csv => {
            println!("directed_12,directed_21,undirected");
            println!("{},{},{}", text(&r.directed_12), text(&r.directed_21), text(&r.undirected));
        }
        Format::Json => {
            let witness = r.witness.as_ref().map(|(side, tr)| {
                let rows: Vec<Vec<Value>> = tr.samples().iter().map(|row| row.iter().map(number).collect()).collect();
                json!({ "satisfies": if *side == Side::First { "f1" } else { "f2" }, "samples": rows })
            });
            print_json(&envelope(
                "ph",
                json!({
                    "directed_12": number(&r.directed_12),
                    "directed_21": number(&r.directed_21),
                    "undirected": number(&r.undirected),
                    "witness": witness,
                }),
            ));
        }
    }
    Ok(0)
}

fn cmd_sd(ctx: &Context, f1: &Path, f2: &Path) -> Result<u8> {
    let (a, b) = (read(f1)?, read(f2)?);
    let settings = ctx.settings(Some(f1), &[&a, &b])?;
    let r = sd(&a, &b, &settings.aos(), settings.normalizer)?;
    match settings.format {
        Format::Human => println!("{}", text(&r.distance)),
        Format::Csv => {
            println!("distance,area_1,area_2,overlap,normalizer");
            println!(
                "{},{},{},{},{}",
                text(&r.distance),
                text(&r.area_1),
                text(&r.area_2),
                text(&r.overlap),
                text(&r.normalizer)
            );
        }
        Format::Json => print_json(&envelope(
            "sd",
            json!({
                "distance": number(&r.distance),
                "area_1": number(&r.area_1),
                "area_2": number(&r.area_2),
                "overlap": number(&r.overlap),
                "normalizer": number(&r.normalizer),
                "resolutions": [r.resolutions.0, r.resolutions.1],
            }),
        )),
    }
    Ok(0)
}

fn box_expr(settings: &Settings, f: &Formula<Rational>) -> Result<BoxExpr<Rational>> {
    aos(&to_nnf(f), &settings.aos())
}

fn cmd_aos(ctx: &Context, formula: &Path) -> Result<u8> {
    let f = read(formula)?;
    let settings = ctx.settings(Some(formula), &[&f])?;
    let e = box_expr(&settings, &f)?;
    let dims = settings.dims();
    match settings.format {
        Format::Json => {
            let areas: Vec<Value> = e.resolutions().map(|r| number(&union_area(r, dims))).collect();
            print_json(&envelope(
                "aos",
                json!({
                    "dims": dims,
                    "horizon": settings.horizon,
                    "x_max": settings.x_max.iter().map(number).collect::<Vec<_>>(),
                    "resolutions": e.resolution_count(),
                    "areas": areas,
                    "expr": e.to_json(),
                }),
            ))
        }
        Format::Csv => {
            println!("resolution,lt,ut,dim,lv,uv");
            for (i, r) in e.resolutions().enumerate() {
                for b in r {
                    for d in 0..dims {
                        let (lv, uv) = b.range(d);
                        println!("{i},{},{},{},{},{}", text(&b.lt), text(&b.ut), d + 1, text(&lv), text(&uv));
                    }
                }
            }
        }
        Format::Human => {
            for (i, r) in e.resolutions().enumerate() {
                println!("resolution {i}: area {}", text(&union_area(r, dims)));
                if r.is_empty() {
                    println!("  (unsatisfiable)");
                }
                for b in r {
                    let ranges: Vec<String> = (0..dims)
                        .map(|d| {
                            let (lv, uv) = b.range(d);
                            format!("x{} in [{}, {}]", d + 1, text(&lv), text(&uv))
                        })
                        .collect();
                    println!("  t in [{}, {}]: {}", text(&b.lt), text(&b.ut), ranges.join(", "));
                }
            }
        }
    }
    Ok(0)
}

type Cell = std::result::Result<Rational, u8>;

fn cell_text(c: &Cell) -> String {
    match c {
        Ok(v) => text(v),
        Err(code) => format!("E{code}"),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Ok(v) => number(v),
        Err(code) => json!({ "error": code }),
    }
}

fn cmd_table(ctx: &Context, dir: &Path, metric: Metric) -> Result<u8> {
    let (named, settings) = if dir.join("meta.json").is_file() {
        let corpus = load_corpus::<Rational>(dir)?;
        let refs: Vec<&Formula<Rational>> = corpus.formulas.iter().map(|(_, f)| f).collect();
        let settings = ctx.settings(Some(dir), &refs)?;
        (corpus.formulas, settings)
    } else {
        let named = read_formula_dir::<Rational>(dir, ANY_DIMS)?;
        let refs: Vec<&Formula<Rational>> = named.iter().map(|(_, f)| f).collect();
        let settings = ctx.settings(None, &refs)?;
        (named, settings)
    };
    let n = named.len();
    let names: Vec<String> = named.iter().map(|(name, _)| name.clone()).collect();
    let want_ph = matches!(metric, Metric::All | Metric::Directed | Metric::Ph);
    let want_sd = matches!(metric, Metric::All | Metric::Sd);

    let directed: Vec<Vec<Cell>> = if want_ph {
        let cells: Vec<Cell> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                directed_ph(&named[i].1, &named[j].1, &settings.domain, settings.horizon, &settings.ph)
                    .map(|d| d.value)
                    .map_err(|e| exit_code(&e))
            })
            .collect();
        cells.chunks(n.max(1)).map(<[Cell]>::to_vec).collect()
    } else {
        Vec::new()
    };
    let undirected: Vec<Vec<Cell>> = directed
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, c)| match (c, &directed[j][i]) {
                    (Ok(a), Ok(b)) => Ok(if a > b { a.clone() } else { b.clone() }),
                    (Err(e), _) | (_, Err(e)) => Err(*e),
                })
                .collect()
        })
        .collect();
    let sd_table: Vec<Vec<Cell>> = if want_sd {
        let boxes: Vec<std::result::Result<BoxExpr<Rational>, u8>> =
            named.iter().map(|(_, f)| box_expr(&settings, f).map_err(|e| exit_code(&e))).collect();
        let horizon = settings.horizon_value();
        let cells: Vec<Cell> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let (a, b) = (boxes[i.min(j)].as_ref().map_err(|c| *c)?, boxes[i.max(j)].as_ref().map_err(|c| *c)?);
                sd_boxsets(a, b, settings.dims(), &horizon, settings.normalizer)
                    .map(|r| r.distance)
                    .map_err(|e| exit_code(&e))
            })
            .collect();
        cells.chunks(n.max(1)).map(<[Cell]>::to_vec).collect()
    } else {
        Vec::new()
    };

    let mut blocks: Vec<(&str, &Vec<Vec<Cell>>)> = Vec::new();
    if matches!(metric, Metric::All | Metric::Directed) {
        blocks.push(("directed_ph", &directed));
    }
    if matches!(metric, Metric::All | Metric::Ph) {
        blocks.push(("ph", &undirected));
    }
    if want_sd {
        blocks.push(("sd", &sd_table));
    }
    match settings.format {
        Format::Json => {
            let mut fields = json!({ "names": names });
            for (label, m) in &blocks {
                fields[*label] = json!(m.iter().map(|row| row.iter().map(cell_json).collect::<Vec<_>>()).collect::<Vec<_>>());
            }
            print_json(&envelope("table", fields));
        }
        Format::Csv => {
            let header: Vec<String> = ["metric".to_string(), "row".to_string()].into_iter().chain(names.iter().cloned()).collect();
            println!("{}", header.join(","));
            for (label, m) in &blocks {
                for (i, row) in m.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(cell_text).collect();
                    println!("{label},{},{}", names[i], cells.join(","));
                }
            }
        }
        Format::Human => {
            for (k, (label, m)) in blocks.iter().enumerate() {
                if k > 0 {
                    println!();
                }
                println!("{label}");
                let mut rows = vec![std::iter::once(String::new()).chain(names.iter().cloned()).collect::<Vec<_>>()];
                for (i, row) in m.iter().enumerate() {
                    rows.push(std::iter::once(names[i].clone()).chain(row.iter().map(cell_text)).collect());
                }
                print!("{}", aligned(&rows));
            }
        }
    }
    Ok(0)
}

fn cmd_specset(ctx: &Context, specs: &[PathBuf], against: &Path, mode: PhMode) -> Result<u8> {
    let formulas: Vec<Formula<Rational>> = specs.iter().map(|p| read(p)).collect::<Result<_>>()?;
    let target = read(against)?;
    let mut refs: Vec<&Formula<Rational>> = formulas.iter().collect();
    refs.push(&target);
    let settings = ctx.settings(specs.first().map(PathBuf::as_path), &refs)?;
    let exprs: Vec<BoxExpr<Rational>> = formulas.iter().map(|f| box_expr(&settings, f)).collect::<Result<_>>()?;
    let union = union_boxexpr(&exprs, settings.dims(), settings.resolution_budget)?;
    let other = box_expr(&settings, &target)?;
    let horizon = settings.horizon_value();
    let sd_r = sd_boxsets(&union, &other, settings.dims(), &horizon, settings.normalizer)?;
    let mode = match mode {
        PhMode::Slice => BoxDistanceMode::Slice,
        PhMode::Normalized => BoxDistanceMode::Normalized,
    };
    let ph_r = ph_boxsets(&union, &other, settings.dims(), &horizon, mode)?;
    match settings.format {
        Format::Human => println!("sd: {}\nph: {}", text(&sd_r.distance), text(&ph_r)),
        Format::Csv => println!("sd,ph\n{},{}", text(&sd_r.distance), text(&ph_r)),
        Format::Json => print_json(&envelope(
            "specset",
            json!({
                "specs": specs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "sd": number(&sd_r.distance),
                "ph": number(&ph_r),
                "union_area": number(&sd_r.area_1),
                "against_area": number(&sd_r.area_2),
                "union": union.to_json(),
            }),
        )),
    }
    Ok(0)
}
