use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use num_rational::BigRational;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use perc::crossing::Event;
use perc::estimate::{self, Estimate, ThresholdOptions, CSV_HEADER};
use perc::lattice::{Edge, Rect, Region, Torus};
use perc::renorm::{self, IterationMap, P0_CITED};
use perc::{oracle, rsw};

#[derive(Parser, Debug)]
#[command(name = "perc", version, about = "Bond percolation laboratory on the square lattice")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Base seed; defaults to $PERC_SEED, then 0.
    #[arg(long, env = "PERC_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// key=value file supplying defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exhaustive exact checks.
    Verify {
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        max_edges: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of one event.
    Cross {
        #[arg(long)]
        region: Region,
        #[arg(long, default_value = "h")]
        event: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Estimates over a grid of p.
    Sweep {
        #[arg(long)]
        region: Region,
        #[arg(long, default_value = "h")]
        event: String,
        /// Comma list `0.4,0.5,0.6` or range `lo:hi:points`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Share one uniform table per sample across the grid.
        #[arg(long)]
        coupled: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Bisection for the p at which an event reaches a target level.
    Threshold {
        /// Single region; alternatively use --family with --sizes.
        #[arg(long)]
        region: Option<Region>,
        /// `square` (n by n) or `wide` (n+1 by n).
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value = "h")]
        event: String,
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        /// Also measure the window from eps to 1 - eps.
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        #[arg(long, default_value_t = 1000)]
        initial_samples: u64,
        #[arg(long, default_value_t = 100_000)]
        max_samples_per_point: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Long-rectangle crossing chain against its provable bounds.
    Rsw {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Aspect bound for the printed bounds table.
        #[arg(long, default_value_t = 3)]
        rho: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Circuit in the annulus of radii n and 3n against q^4.
    Annulus {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Torus events, the covering check and the square-root trick.
    Torus {
        #[arg(long, value_enum, default_value_t = TorusMode::Event)]
        mode: TorusMode,
        /// Block size n of T_{16n} (covering, sqrt).
        #[arg(long, default_value_t = 1)]
        block: usize,
        /// Torus side (event mode).
        #[arg(long, default_value_t = 16)]
        side: usize,
        #[arg(long, default_value_t = 14)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Coarse-graining, doubling rectangles and the 1-dependent series.
    Renorm {
        #[arg(long, value_enum, default_value_t = RenormMode::Coarse)]
        mode: RenormMode,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value_t = 8)]
        height: usize,
        /// Largest doubling index K.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0.6)]
        p: f64,
        /// Density for the series; omitted means report the threshold.
        #[arg(long)]
        p0: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Largest fixed point of a renormalization map.
    Fixedpoint {
        #[arg(long, default_value = "quintic")]
        map: IterationMap,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Also iterate from this starting value.
        #[arg(long)]
        start: Option<f64>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Origin cluster reaching the boundary of [-L, L]^2.
    Theta {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TorusMode {
    Event,
    Covering,
    Sqrt,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RenormMode {
    Coarse,
    Doubling,
    Series,
    Product,
}

impl Cmd {
    fn common(&self) -> &Common {
        match self {
            Cmd::Verify { common, .. }
            | Cmd::Cross { common, .. }
            | Cmd::Sweep { common, .. }
            | Cmd::Threshold { common, .. }
            | Cmd::Rsw { common, .. }
            | Cmd::Annulus { common, .. }
            | Cmd::Torus { common, .. }
            | Cmd::Renorm { common, .. }
            | Cmd::Fixedpoint { common, .. }
            | Cmd::Theta { common, .. } => common,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Cmd::Cross { .. } | Cmd::Sweep { .. } | Cmd::Theta { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// What a subcommand produced: CSV rows or a JSON document, plus whether
/// every verdict passed.
enum Body {
    Rows(Vec<(String, String, Estimate)>),
    Doc(Value),
}

struct Outcome {
    body: Body,
    pass: bool,
}

fn doc(v: Value, pass: bool) -> Outcome {
    Outcome { body: Body::Doc(v), pass }
}

type Fallible<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn parse_grid(s: &str) -> Fallible<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].parse().map_err(err)?;
        let hi: f64 = parts[1].parse().map_err(err)?;
        let n: usize = parts[2].parse().map_err(err)?;
        if n < 2 {
            return Err("a grid range needs at least 2 points".into());
        }
        return Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect());
    }
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(err)).collect()
}

fn row_body(region: &Region, event: &Event, ests: Vec<Estimate>) -> Body {
    Body::Rows(ests.into_iter().map(|e| (region.descriptor(), event.name(), e)).collect())
}

fn family_region(family: &str, n: usize) -> Fallible<Region> {
    let r = match family {
        "square" => Rect::with_size(n, n),
        "wide" => Rect::with_size(n + 1, n),
        other => return Err(format!("unknown family `{other}` (expected square or wide)")),
    };
    r.map(Region::from).map_err(err)
}

fn run(cmd: &Cmd) -> Fallible<Outcome> {
    let seed = cmd.common().seed;
    Ok(match cmd {
        Cmd::Verify { max_edges, .. } => {
            let v = oracle::verify_suite(*max_edges);
            let pass = v["pass"].as_bool().unwrap_or(false);
            doc(v, pass)
        }
        Cmd::Cross { region, event, p, samples, .. } => {
            let ev = Event::on_region(event, region).map_err(err)?;
            let e = estimate::mc_probability(region, &ev, *p, *samples, seed).map_err(err)?;
            Outcome { body: row_body(region, &ev, vec![e]), pass: true }
        }
        Cmd::Sweep { region, event, grid, samples, coupled, .. } => {
            let ev = Event::on_region(event, region).map_err(err)?;
            let g = parse_grid(grid)?;
            let ests = estimate::sweep(region, &ev, &g, *samples, seed, *coupled).map_err(err)?;
            let monotone = !*coupled || ests.windows(2).all(|w| w[0].successes <= w[1].successes);
            Outcome { body: row_body(region, &ev, ests), pass: monotone }
        }
        Cmd::Threshold {
            region,
            family,
            sizes,
            event,
            target,
            window,
            tolerance,
            initial_samples,
            max_samples_per_point,
            budget,
            ..
        } => {
            let opts = ThresholdOptions {
                tolerance: *tolerance,
                initial_samples: *initial_samples,
                max_samples_per_point: *max_samples_per_point,
                budget: *budget,
                seed,
            };
            let regions: Vec<Region> = match (region, family) {
                (Some(r), None) => vec![r.clone()],
                (None, Some(f)) if !sizes.is_empty() => sizes.iter().map(|&n| family_region(f, n)).collect::<Fallible<_>>()?,
                _ => return Err("threshold needs either --region or --family with --sizes".into()),
            };
            let mut out = Vec::new();
            let mut pass = true;
            for r in &regions {
                let ev = Event::on_region(event, r).map_err(err)?;
                let v = match window {
                    Some(eps) => {
                        let w = estimate::threshold_window(r, &ev, *eps, &opts).map_err(err)?;
                        pass &= !w.lower.inconclusive && !w.upper.inconclusive;
                        serde_json::to_value(w).map_err(err)?
                    }
                    None => {
                        let t = estimate::find_threshold(r, &ev, *target, &opts).map_err(err)?;
                        pass &= !t.inconclusive;
                        serde_json::to_value(t).map_err(err)?
                    }
                };
                out.push(v);
            }
            doc(json!({ "results": out }), pass)
        }
        Cmd::Rsw { n, p, samples, rho, .. } => {
            let bounds = rsw::chain_bounds(*n, *rho).map_err(err)?;
            let rep = rsw::check_chain(*n, *p, *samples, seed).map_err(err)?;
            let pass = rep.pass;
            doc(json!({ "bounds": bounds, "chain": rep }), pass)
        }
        Cmd::Annulus { n, p, samples, .. } => {
            let rep = rsw::annulus_product(*n, *p, *samples, seed).map_err(err)?;
            let pass = rep.holds;
            doc(serde_json::to_value(rep).map_err(err)?, pass)
        }
        Cmd::Torus { mode, block, side, k, l, p, samples, .. } => match mode {
            TorusMode::Event => {
                let t = Torus::new(*side).map_err(err)?;
                let rep = rsw::torus_event(&t, *k, *l, *p, *samples, seed).map_err(err)?;
                let pass = rep.paired_violations == 0;
                doc(serde_json::to_value(rep).map_err(err)?, pass)
            }
            TorusMode::Covering => {
                let rep = rsw::covering_check(*block);
                let pass = rep.passed();
                doc(serde_json::to_value(rep).map_err(err)?, pass)
            }
            TorusMode::Sqrt => {
                let audit = (*samples).min(10_000);
                let rep = rsw::sqrt_trick_check(*block, *p, *samples, seed, audit).map_err(err)?;
                let pass = rep.holds && rep.audit_violations == 0;
                doc(serde_json::to_value(rep).map_err(err)?, pass)
            }
        },
        Cmd::Renorm { mode, n, width, height, k, p, p0, samples, .. } => match mode {
            RenormMode::Coarse => {
                let rep = renorm::embedding_audit(*n, *width, *height, *p, *samples, seed).map_err(err)?;
                let pass = rep.violations == 0;
                doc(serde_json::to_value(rep).map_err(err)?, pass)
            }
            RenormMode::Doubling => {
                let rep = renorm::doubling_construction(*n, *p, *k, *samples, seed).map_err(err)?;
                let pass = rep.union_consistent && rep.intersection_violations == 0;
                doc(serde_json::to_value(rep).map_err(err)?, pass)
            }
            RenormMode::Series => match p0 {
                Some(p0) => {
                    let v = renorm::one_dep_series(*p0).map_err(err)?;
                    doc(json!({ "p0": p0, "value": v }), true)
                }
                None => {
                    let t = renorm::series_threshold(1e-9).map_err(err)?;
                    doc(
                        json!({
                            "series_threshold": t,
                            "cited_p0": P0_CITED,
                            "crossing_needed_for_cited_p0": renorm::required_crossing(P0_CITED),
                        }),
                        true,
                    )
                }
            },
            RenormMode::Product => {
                let a = Edge::horizontal(0, 0);
                let b = Edge::horizontal(2, 0);
                let corr = renorm::coarse_pair_correlation(*n, a, b, *p, *samples, seed).map_err(err)?;
                let mut exact = Vec::new();
                let mut equal = true;
                for s in ["1/4", "1/2", "3/4"] {
                    let r = renorm::product_law_exact(&s.parse::<BigRational>().map_err(err)?).map_err(err)?;
                    equal &= r.joint == r.product;
                    exact.push(r.to_json());
                }
                let pass = corr.contains_zero && equal;
                doc(json!({ "exact": exact, "correlation": corr }), pass)
            }
        },
        Cmd::Fixedpoint { map, tolerance, start, steps, .. } => {
            let root = renorm::fixed_point(*map, *tolerance).map_err(err)?;
            let mut v = json!({ "map": map.name(), "root": root, "tolerance": tolerance });
            if let Some(x0) = start {
                v["sequence"] = json!(renorm::iterate(*map, *x0, *steps).map_err(err)?);
            }
            doc(v, true)
        }
        Cmd::Theta { sizes, p, samples, .. } => {
            let mut rows = Vec::new();
            let mut stats = Vec::new();
            for &l in sizes {
                let s = estimate::origin_cluster(l, *p, *samples, seed).map_err(err)?;
                let li = l as i64;
                rows.push((format!("rect:{},{},{},{}", -li, -li, li, li), "origin_to_boundary".to_string(), s.boundary));
                stats.push(s);
            }
            Outcome { body: if matches!(cmd.common().format, Some(Format::Json)) { Body::Doc(serde_json::to_value(stats).map_err(err)?) } else { Body::Rows(rows) }, pass: true }
        }
    })
}

/// Arguments as echoed in output headers: everything except the worker
/// count, which never affects results.
fn echoed_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--workers" {
            skip = true;
            continue;
        }
        if a.starts_with("--workers=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn render(outcome: &Outcome, format: Format, args: &[String], seed: u64) -> String {
    let version = env!("CARGO_PKG_VERSION");
    let argv = echoed_args(args);
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&format!("# perc {version} argv={} seed={seed}\n", argv.join(" ")));
            match &outcome.body {
                Body::Rows(rows) => {
                    s.push_str(CSV_HEADER);
                    s.push('\n');
                    for (region, event, e) in rows {
                        s.push_str(&e.csv_row(region, event));
                        s.push('\n');
                    }
                }
                Body::Doc(v) => {
                    s.push_str(&serde_json::to_string(v).unwrap());
                    s.push('\n');
                }
            }
        }
        Format::Json => {
            let header = json!({ "tool": "perc", "version": version, "argv": argv, "seed": seed });
            s.push_str(&serde_json::to_string(&header).unwrap());
            s.push('\n');
            let body = match &outcome.body {
                Body::Rows(rows) => Value::Array(rows.iter().map(|(r, ev, e)| e.to_json(r, ev)).collect()),
                Body::Doc(v) => v.clone(),
            };
            s.push_str(&serde_json::to_string(&json!({ "pass": outcome.pass, "result": body })).unwrap());
            s.push('\n');
        }
    }
    s
}

/// Splice `key=value` lines from a `--config` file into the argument list
/// for every flag not already given on the command line.
fn apply_config_file(args: Vec<String>) -> Fallible<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut out = args.clone();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("{path}:{}: expected key=value", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        let flag = format!("--{k}");
        let given = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given || k == "config" {
            continue;
        }
        match v {
            "true" => out.push(flag),
            "false" => {}
            _ => out.push(format!("{flag}={v}")),
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match apply_config_file(raw.clone()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = cli.cmd.common().clone();
    if let Some(w) = common.workers {
        if w == 0 || rayon::ThreadPoolBuilder::new().num_threads(w).build_global().is_err() {
            eprintln!("error: cannot start {w} workers");
            return ExitCode::from(2);
        }
    }
    let outcome = match run(&cli.cmd) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let format = common.format.unwrap_or_else(|| cli.cmd.default_format());
    let text = render(&outcome, format, &raw, common.seed);
    let written = match &common.output {
        Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(err),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
