//! Batch command-line front end: evaluate kernels, run verification
//! suites, and emit machine-readable reports.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 usage/config error.

use clap::{Parser, ValueEnum};
use hyperheat::bounds_verifier::{
    classify_region, dm_ratio_scan, resolvent_positivity_suite, GridSpec, RegionConstants, Spacing,
    ALL_REGIONS,
};
use hyperheat::contour_quadrature::{
    fexp_leading, GrowthFunction, QuadratureConfig, GAUSSIAN_CONSTANT_REFERENCE_ALTERNATE,
};
use hyperheat::gradient_riesz::{gradient_norm_bound, li_yau_check, riesz_range};
use hyperheat::model_kernels::{dm_quantity, heat_kernel, EvalPoint};
use hyperheat::report;
use hyperheat::Dimension;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "hyperheat",
    version,
    about = "Heat kernels, resolvents and spectral measures on real hyperbolic spaces"
)]
struct Cli {
    /// Subcommand: eval, verify-dm, verify-regions, verify-positivity,
    /// li-yau, riesz-range, grad-norm, fexp, or selftest.
    command: String,

    /// Flat key=value config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Boundary dimension n (the space is H^{n+1}).
    #[arg(long)]
    n: Option<i64>,

    /// Geodesic distance.
    #[arg(long)]
    r: Option<f64>,

    /// Time.
    #[arg(long)]
    t: Option<f64>,

    /// Spectral / regularity parameter.
    #[arg(long)]
    lambda: Option<f64>,

    /// Integrability exponent for grad-norm.
    #[arg(long)]
    q: Option<f64>,

    /// Li-Yau interpolation parameter in (1, 2).
    #[arg(long)]
    alpha: Option<f64>,

    /// Scan grid as r_min:r_max:points,t_min:t_max:points (log-spaced).
    #[arg(long)]
    grid: Option<String>,

    /// Report format.
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Report output path (stdout when omitted); written atomically.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for grid scans (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Relative quadrature tolerance override.
    #[arg(long)]
    tol: Option<f64>,
}

/// Fully resolved run configuration; round-trips losslessly through the
/// flat key=value file representation.
#[derive(Debug, Clone, PartialEq, Default)]
struct RunConfig {
    command: String,
    n: Option<i64>,
    r: Option<f64>,
    t: Option<f64>,
    lambda: Option<f64>,
    q: Option<f64>,
    alpha: Option<f64>,
    grid: Option<String>,
    format: Option<String>,
    out: Option<String>,
    threads: Option<usize>,
    tol: Option<f64>,
}

impl RunConfig {
    // Exercised by the round-trip tests; the binary itself only reads configs.
    #[cfg_attr(not(test), allow(dead_code))]
    fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        macro_rules! put {
            ($field:ident) => {
                if let Some(v) = &self.$field {
                    let _ = writeln!(s, "{}={}", stringify!($field), v);
                }
            };
        }
        put!(n);
        put!(r);
        put!(t);
        put!(lambda);
        put!(q);
        put!(alpha);
        put!(grid);
        put!(format);
        put!(out);
        put!(threads);
        put!(tol);
        s
    }

    fn from_kv(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", idx + 1))?;
            let parse = |what: &str| format!("line {}: bad {what} value {value:?}", idx + 1);
            match key.trim() {
                "command" => cfg.command = value.trim().to_string(),
                "n" => cfg.n = Some(value.trim().parse().map_err(|_| parse("integer"))?),
                "r" => cfg.r = Some(value.trim().parse().map_err(|_| parse("float"))?),
                "t" => cfg.t = Some(value.trim().parse().map_err(|_| parse("float"))?),
                "lambda" => cfg.lambda = Some(value.trim().parse().map_err(|_| parse("float"))?),
                "q" => cfg.q = Some(value.trim().parse().map_err(|_| parse("float"))?),
                "alpha" => cfg.alpha = Some(value.trim().parse().map_err(|_| parse("float"))?),
                "grid" => cfg.grid = Some(value.trim().to_string()),
                "format" => cfg.format = Some(value.trim().to_string()),
                "out" => cfg.out = Some(value.trim().to_string()),
                "threads" => cfg.threads = Some(value.trim().parse().map_err(|_| parse("integer"))?),
                "tol" => cfg.tol = Some(value.trim().parse().map_err(|_| parse("float"))?),
                other => return Err(format!("line {}: unknown key {other:?}", idx + 1)),
            }
        }
        if cfg.command.is_empty() {
            return Err("config file does not set a command".into());
        }
        Ok(cfg)
    }

    fn merge_cli(mut self, cli: &Cli) -> RunConfig {
        self.command = cli.command.clone();
        macro_rules! take {
            ($field:ident) => {
                if cli.$field.is_some() {
                    self.$field = cli.$field.clone();
                }
            };
        }
        take!(n);
        take!(r);
        take!(t);
        take!(lambda);
        take!(q);
        take!(alpha);
        take!(grid);
        take!(threads);
        take!(tol);
        if let Some(f) = cli.format {
            self.format = Some(
                match f {
                    Format::Json => "json",
                    Format::Csv => "csv",
                }
                .to_string(),
            );
        }
        if let Some(o) = &cli.out {
            self.out = Some(o.display().to_string());
        }
        self
    }

    fn require_n(&self) -> Result<Dimension, String> {
        let n = self.n.ok_or("--n is required for this command")?;
        Dimension::new(n).map_err(|e| e.to_string())
    }

    fn require(&self, name: &str, v: Option<f64>) -> Result<f64, String> {
        v.ok_or_else(|| format!("--{name} is required for this command"))
    }

    fn grid_spec(&self) -> Result<GridSpec, String> {
        let Some(text) = &self.grid else {
            return Ok(GridSpec::standard());
        };
        let (r_part, t_part) = text
            .split_once(',')
            .ok_or("grid must be r_min:r_max:points,t_min:t_max:points")?;
        let axis = |part: &str| -> Result<(f64, f64, usize), String> {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                return Err("each grid axis needs min:max:points".into());
            }
            Ok((
                fields[0].parse().map_err(|_| "bad grid bound")?,
                fields[1].parse().map_err(|_| "bad grid bound")?,
                fields[2].parse().map_err(|_| "bad grid point count")?,
            ))
        };
        let (r_min, r_max, r_points) = axis(r_part)?;
        let (t_min, t_max, t_points) = axis(t_part)?;
        let grid = GridSpec {
            r_min,
            r_max,
            t_min,
            t_max,
            r_points,
            t_points,
            spacing: Spacing::Log,
        };
        grid.validate().map_err(|e| e.to_string())?;
        Ok(grid)
    }

    fn quad(&self) -> Result<QuadratureConfig, String> {
        let mut q = QuadratureConfig::default();
        if let Some(tol) = self.tol {
            q.rel_tol = tol;
        }
        q.validate().map_err(|e| e.to_string())?;
        Ok(q)
    }

    fn format(&self) -> Result<Format, String> {
        match self.format.as_deref() {
            None | Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some(other) => Err(format!("unknown format {other:?}")),
        }
    }
}

/// Write the report to --out (atomic) or stdout, return the exit code.
fn emit<T: Serialize>(
    cfg: &RunConfig,
    command: &str,
    payload: &T,
    passed: bool,
) -> Result<u8, String> {
    let body = report::render_json(command, payload).map_err(|e| e.to_string())?;
    match &cfg.out {
        Some(path) => {
            report::write_atomic(Path::new(path), &format!("{body}\n")).map_err(|e| e.to_string())?
        }
        None => println!("{body}"),
    }
    Ok(if passed { EXIT_OK } else { EXIT_ASSERTION })
}

fn cmd_eval(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let p = EvalPoint {
        r: cfg.require("r", cfg.r)?,
        t: cfg.require("t", cfg.t)?,
    };
    p.validate().map_err(|e| e.to_string())?;
    let h = heat_kernel(dim, p).map_err(|e| e.to_string())?;
    let dm = dm_quantity(dim, p);
    let regions: Vec<String> = classify_region(p, &RegionConstants::default())
        .map_err(|e| e.to_string())?
        .iter()
        .map(|l| format!("{l:?}"))
        .collect();
    #[derive(Serialize)]
    struct EvalReport {
        n: u32,
        r: f64,
        t: f64,
        heat_kernel: f64,
        log_heat_kernel: f64,
        comparison_quantity: f64,
        log_comparison_quantity: f64,
        ratio: f64,
        regions: Vec<String>,
    }
    let payload = EvalReport {
        n: dim.n(),
        r: p.r,
        t: p.t,
        heat_kernel: h.value(),
        log_heat_kernel: h.log_magnitude,
        comparison_quantity: dm.value(),
        log_comparison_quantity: dm.log_magnitude,
        ratio: h.sign as f64 * h.log_ratio(&dm).exp(),
        regions,
    };
    emit(cfg, "eval", &payload, true)
}

fn cmd_verify_dm(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let grid = cfg.grid_spec()?;
    if cfg.format()? == Format::Csv {
        let rows = report::dm_node_rows(dim, &grid).map_err(|e| e.to_string())?;
        let text = report::render_csv(&rows);
        match &cfg.out {
            Some(path) => report::write_atomic(Path::new(path), &text).map_err(|e| e.to_string())?,
            None => print!("{text}"),
        }
        return Ok(EXIT_OK);
    }
    let rep = dm_ratio_scan(dim, &grid).map_err(|e| e.to_string())?;
    let passed = rep.inf_ratio > 0.0 && rep.sup_ratio.is_finite() && rep.inf_ratio <= rep.sup_ratio;
    emit(cfg, "verify-dm", &rep, passed)
}

fn cmd_verify_regions(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let grid = cfg.grid_spec()?;
    let constants = RegionConstants::default();
    let mut uncovered = Vec::new();
    for p in grid.nodes() {
        if classify_region(p, &constants).map_err(|e| e.to_string())?.is_empty() {
            uncovered.push((p.r, p.t));
        }
    }
    let scan = dm_ratio_scan(dim, &grid).map_err(|e| e.to_string())?;
    #[derive(Serialize)]
    struct RegionReport {
        n: u32,
        constants: RegionConstants,
        regions: Vec<String>,
        per_region_inf_sup: Vec<(String, f64, f64)>,
        uncovered_nodes: Vec<(f64, f64)>,
    }
    let payload = RegionReport {
        n: dim.n(),
        constants,
        regions: ALL_REGIONS.iter().map(|l| format!("{l:?}")).collect(),
        per_region_inf_sup: scan
            .per_region_stats
            .iter()
            .map(|(l, inf, sup)| (format!("{l:?}"), *inf, *sup))
            .collect(),
        uncovered_nodes: uncovered,
    };
    let passed = payload.uncovered_nodes.is_empty()
        && payload
            .per_region_inf_sup
            .iter()
            .all(|(_, inf, sup)| *inf > 0.0 && sup.is_finite());
    emit(cfg, "verify-regions", &payload, passed)
}

fn cmd_verify_positivity(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let mu: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let r: Vec<f64> = (1..=80).map(|i| 0.5 * i as f64).collect();
    let rep = resolvent_positivity_suite(dim, &mu, &r).map_err(|e| e.to_string())?;
    let passed = rep.all_positive && rep.derivative_growth_deviation <= 0.05;
    emit(cfg, "verify-positivity", &rep, passed)
}

fn cmd_li_yau(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let alpha = cfg.alpha.unwrap_or(1.5);
    let grid = cfg.grid_spec()?;
    let rep = li_yau_check(dim, alpha, &grid).map_err(|e| e.to_string())?;
    let passed = rep.minimal_c.is_finite();
    emit(cfg, "li-yau", &rep, passed)
}

fn cmd_riesz_range(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let lambda = cfg.require("lambda", cfg.lambda)?;
    let range = riesz_range(dim, lambda).map_err(|e| e.to_string())?;
    emit(cfg, "riesz-range", &range, true)
}

fn cmd_grad_norm(cfg: &RunConfig) -> Result<u8, String> {
    let dim = cfg.require_n()?;
    let q = cfg.q.unwrap_or(1.0);
    let t_grid: Vec<f64> = (0..33)
        .map(|i| 1e-2 * 10f64.powf(i as f64 * 4.0 / 32.0))
        .collect();
    let est = gradient_norm_bound(dim, q, &t_grid).map_err(|e| e.to_string())?;
    let n = dim.n() as f64;
    let passed = est.alpha_fit >= n * n * (q - 1.0) / (q * q) - 0.05 * n * n;
    emit(cfg, "grad-norm", &est, passed)
}

fn cmd_fexp(cfg: &RunConfig) -> Result<u8, String> {
    let t = cfg.t.unwrap_or(1.0);
    let quad = cfg.quad()?;
    let one = |_: f64| 1.0;
    let g = GrowthFunction {
        func: &one,
        growth_exponent: 0,
    };
    let f = fexp_leading(&g, t, &quad).map_err(|e| e.to_string())?;
    #[derive(Serialize)]
    struct FexpReport {
        t: f64,
        leading: f64,
        error_bound: f64,
        constant_used: f64,
        alternate_convention_constant: f64,
        alternate_convention_gap: f64,
    }
    let payload = FexpReport {
        t,
        leading: f.leading,
        error_bound: f.error_bound,
        constant_used: f.constant_used,
        alternate_convention_constant: GAUSSIAN_CONSTANT_REFERENCE_ALTERNATE,
        alternate_convention_gap: (f.constant_used - GAUSSIAN_CONSTANT_REFERENCE_ALTERNATE).abs(),
    };
    let passed = (f.leading * t.sqrt() - f.constant_used).abs() < 1e-8 * f.constant_used;
    emit(cfg, "fexp", &payload, passed)
}

fn cmd_selftest(cfg: &RunConfig) -> Result<u8, String> {
    let results = hyperheat::acceptance::run_all();
    #[derive(Serialize)]
    struct Criterion {
        id: &'static str,
        passed: bool,
        detail: String,
        seconds: f64,
    }
    let payload: Vec<Criterion> = results
        .iter()
        .map(|r| Criterion {
            id: r.id,
            passed: r.passed,
            detail: r.detail.clone(),
            seconds: r.seconds,
        })
        .collect();
    for r in &results {
        eprintln!(
            "{} {:<26} {:>7.2}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.seconds,
            r.detail
        );
    }
    let passed = results.iter().all(|r| r.passed);
    emit(cfg, "selftest", &payload, passed)
}

fn run(cfg: &RunConfig) -> Result<u8, String> {
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    if cfg.format()? == Format::Csv && cfg.command != "verify-dm" {
        return Err(format!(
            "csv output is only available for verify-dm, not {:?}",
            cfg.command
        ));
    }
    match cfg.command.as_str() {
        "eval" => cmd_eval(cfg),
        "verify-dm" => cmd_verify_dm(cfg),
        "verify-regions" => cmd_verify_regions(cfg),
        "verify-positivity" => cmd_verify_positivity(cfg),
        "li-yau" => cmd_li_yau(cfg),
        "riesz-range" => cmd_riesz_range(cfg),
        "grad-norm" => cmd_grad_norm(cfg),
        "fexp" => cmd_fexp(cfg),
        "selftest" => cmd_selftest(cfg),
        other => Err(format!("unknown command {other:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read config {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            match RunConfig::from_kv(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: bad config {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            }
        }
        None => RunConfig::default(),
    };
    let cfg = base.merge_cli(&cli);
    match run(&cfg) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
