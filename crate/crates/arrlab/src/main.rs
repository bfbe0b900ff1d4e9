use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use arrlab::classify::{analyze, bounds_report, degree_table, AnalysisReport, BoundsReport, DegreeRow};
use arrlab::conditions::ExcSolver;
use arrlab::configlib::{build_ceva_extended, build_fermat, build_generic, build_projective_space, from_json, to_json};
use arrlab::duality::{DualModule, FreenessReport};
use arrlab::geometry::Configuration;
use arrlab::idealdims::{splitting_analysis, SplittingReport};
use arrlab::{ArrError, Result};

#[derive(Parser)]
#[command(
    name = "arrlab",
    version,
    about = "Point configurations, their dual arrangements and unexpected hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named configuration as JSON.
    Build(BuildArgs),
    /// Full report: degree table, splitting type, freeness, bounds.
    Analyze(CommonArgs),
    /// Ex.C(Z,d) with an optimal partition for d = 1..dmax.
    Exc(CommonArgs),
    /// Splitting type of the dual arrangement.
    Splitting(CommonArgs),
    /// Unexpected and very unexpected degrees.
    Classify(CommonArgs),
    /// Freeness through ε_Q-surjectivity.
    Free(CommonArgs),
    /// Planar bounds at the minimal unexpected degree.
    Bounds(CommonArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Ceva configuration C_m.
    #[arg(long, value_name = "M", group = "kind")]
    ceva: Option<u32>,
    /// Fermat configuration F_m.
    #[arg(long, value_name = "M", group = "kind")]
    fermat: Option<u32>,
    /// All points of ℙⁿ over 𝔽_q.
    #[arg(long, value_name = "Q", group = "kind")]
    pg: Option<u64>,
    /// K random points with generic Hilbert function.
    #[arg(long, value_name = "K", group = "kind")]
    generic: Option<usize>,
    /// Ambient dimension n.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Seed for --generic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file, or a builder spec: ceva:M[:N], fermat:M[:N],
    /// pg:Q[:N], generic:K[:N[:SEED]].
    input: String,
    /// Largest degree examined (default |Z|).
    #[arg(long)]
    dmax: Option<u32>,
    /// First seed for the generic codimension-2 subspaces Q.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of Q samples.
    #[arg(long, default_value_t = 3)]
    samples: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn seeds(&self) -> Result<Vec<u64>> {
        if self.samples == 0 {
            return Err(ArrError::usage("--samples must be at least 1"));
        }
        Ok((0..self.samples).map(|i| self.seed + i).collect())
    }

    fn d_max(&self, cfg: &Configuration) -> u32 {
        self.dmax.unwrap_or((cfg.len() as u32).max(2))
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, spec: &str) -> Result<T> {
    s.parse()
        .map_err(|_| ArrError::usage(format!("bad number {s:?} in builder spec {spec:?}")))
}

fn from_spec(spec: &str) -> Result<Configuration> {
    let parts: Vec<&str> = spec.split(':').collect();
    let n = |i: usize| -> Result<usize> { parts.get(i).map_or(Ok(2), |s| parse_num(s, spec)) };
    if parts.len() < 2 {
        return Err(ArrError::usage(format!(
            "{spec:?} is neither a file nor a builder spec"
        )));
    }
    match parts[0] {
        "ceva" if parts.len() <= 3 => build_ceva_extended(parse_num(parts[1], spec)?, n(2)?),
        "fermat" if parts.len() <= 3 => build_fermat(parse_num(parts[1], spec)?, n(2)?),
        "pg" if parts.len() <= 3 => build_projective_space(parse_num(parts[1], spec)?, n(2)?),
        "generic" if parts.len() <= 4 => {
            let seed = parts.get(3).map_or(Ok(0), |s| parse_num(s, spec))?;
            build_generic(parse_num(parts[1], spec)?, n(2)?, seed)
        }
        _ => Err(ArrError::usage(format!("unknown builder spec {spec:?}"))),
    }
}

fn load(input: &str) -> Result<Configuration> {
    let path = Path::new(input);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| ArrError::usage(format!("cannot read {input}: {e}")))?;
        return from_json(&text).map_err(|e| match e {
            ArrError::Parse { line, column, message } => ArrError::Parse {
                line,
                column,
                message: format!("{input}: {message}"),
            },
            other => other,
        });
    }
    from_spec(input)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| ArrError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn set(v: &[u32]) -> String {
    let items: Vec<String> = v.iter().map(|d| d.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or("-".to_string(), |x| x.to_string())
}

fn header(cfg: &Configuration) -> String {
    format!(
        "{}: {} points in P^{} over {}\n",
        cfg.name.as_deref().unwrap_or("configuration"),
        cfg.len(),
        cfg.ambient_dim(),
        cfg.field()
    )
}

fn degree_rows_table(rows: &[DegreeRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.d.to_string(),
                r.hilbert.to_string(),
                r.h.to_string(),
                r.exc.to_string(),
                yes(r.unexpected).to_string(),
                yes(r.very_unexpected).to_string(),
            ]
        })
        .collect();
    table(&["d", "h_Z", "h", "Ex.C", "unexp", "very-unexp"], &cells)
}

fn table<const N: usize>(head: &[&str; N], cells: &[[String; N]]) -> String {
    let mut widths: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for row in cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |items: Vec<&str>| -> String {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{}{}", " ".repeat(w - s.chars().count()), s))
            .collect();
        format!("{}\n", padded.join(" | "))
    };
    let mut out = line(head.to_vec());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("{}\n", rule.join("-+-")));
    for row in cells {
        out.push_str(&line(row.iter().map(|s| s.as_str()).collect()));
    }
    out
}

fn bounds_text(b: &BoundsReport) -> String {
    if !b.applicable {
        return "bounds: not applicable (no unexpected degree)\n".to_string();
    }
    let mut s = format!(
        "bounds at d = {} (irreducibility proxy: {})\n",
        opt(&b.degree),
        b.irreducible_proxy.map_or("-", yes)
    );
    for c in &b.checks {
        let mut notes = Vec::new();
        if c.sharp {
            notes.push("sharp");
        }
        if c.conditional {
            notes.push("conditional");
        }
        if !c.exact {
            notes.push("lower bound");
        }
        let _ = writeln!(
            s,
            "  {:<22} {} <= {}  {}{}",
            c.name,
            c.value,
            c.bound,
            if c.holds { "holds" } else { "FAILS" },
            if notes.is_empty() {
                String::new()
            } else {
                format!(" ({})", notes.join(", "))
            }
        );
    }
    s
}

fn seeds_line(seeds: &[u64], warnings: &[String]) -> String {
    let mut s = format!("seeds: {seeds:?}\n");
    for w in warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn analysis_text(cfg: &Configuration, r: &AnalysisReport) -> String {
    let mut s = header(cfg);
    s.push_str(&degree_rows_table(&r.rows));
    let _ = writeln!(s, "splitting type: {}", r.splitting_type);
    let _ = writeln!(s, "unexpected degrees: {}", set(&r.unexpected_degrees));
    let _ = writeln!(s, "very unexpected degrees: {}", set(&r.very_unexpected_degrees));
    let _ = writeln!(s, "regularity: {}", r.regularity);
    let _ = writeln!(s, "balanced: {}", yes(r.balanced));
    if cfg.ambient_dim() == 2 {
        let _ = writeln!(s, "alpha: {}", opt(&r.alpha));
        let _ = writeln!(s, "free: {}", r.free.map_or("-", yes));
        let _ = writeln!(s, "semistable: {}", r.semistable.map_or("-", yes));
        let _ = writeln!(s, "c2: {}", opt(&r.c2));
    }
    if let Some(b) = &r.bounds {
        s.push_str(&bounds_text(b));
    }
    s.push_str(&seeds_line(&r.seeds, &r.warnings));
    s
}

#[derive(Serialize)]
struct ExcRow {
    d: u32,
    exc: u64,
    witness: Vec<(Vec<usize>, usize)>,
}

fn run_exc(cfg: &Configuration, a: &CommonArgs) -> Result<String> {
    let d_max = a.d_max(cfg);
    let solver = ExcSolver::new(cfg)?;
    let rows = (1..=d_max)
        .map(|d| {
            solver.exc(d).map(|r| ExcRow {
                d,
                exc: r.value,
                witness: r.witness.iter().map(|b| (b.indices.clone(), b.dim)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if a.format == Format::Json {
        return Ok(json(&rows));
    }
    let cells: Vec<[String; 3]> = rows
        .iter()
        .map(|r| {
            let blocks: Vec<String> = r
                .witness
                .iter()
                .map(|(idx, dim)| {
                    let items: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                    format!("{{{}}}:{dim}", items.join(","))
                })
                .collect();
            [r.d.to_string(), r.exc.to_string(), blocks.join(" ")]
        })
        .collect();
    Ok(header(cfg) + &table(&["d", "Ex.C", "witness"], &cells))
}

fn splitting_text(cfg: &Configuration, r: &SplittingReport) -> String {
    let mut s = header(cfg);
    let _ = writeln!(s, "splitting type: {}", r.splitting);
    let hs: Vec<String> = r.h.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "h(1..): {}", hs.join(" "));
    s + &seeds_line(&r.seeds, &r.warnings)
}

fn free_text(cfg: &Configuration, r: &FreenessReport) -> String {
    let mut s = header(cfg);
    let cells: Vec<[String; 3]> = r
        .degrees
        .iter()
        .map(|row| [row.d.to_string(), row.image_dim.to_string(), row.iqgg_dim.to_string()])
        .collect();
    s.push_str(&table(&["d", "dim image", "h"], &cells));
    let _ = writeln!(s, "splitting type: {}", r.splitting);
    let _ = writeln!(s, "free: {}", yes(r.free));
    if let Some(c2) = r.c2 {
        let _ = writeln!(s, "c2: {c2}");
    }
    s + &seeds_line(&r.seeds, &[])
}

#[derive(Serialize)]
struct ClassifyOut {
    rows: Vec<DegreeRow>,
    unexpected_degrees: Vec<u32>,
    very_unexpected_degrees: Vec<u32>,
    seeds: Vec<u64>,
    warnings: Vec<String>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(b) => {
            let cfg = match (b.ceva, b.fermat, b.pg, b.generic) {
                (Some(m), _, _, _) => build_ceva_extended(m, b.dim)?,
                (_, Some(m), _, _) => build_fermat(m, b.dim)?,
                (_, _, Some(q), _) => build_projective_space(q, b.dim)?,
                (_, _, _, Some(k)) => build_generic(k, b.dim, b.seed)?,
                _ => return Err(ArrError::usage("choose one of --ceva, --fermat, --pg, --generic")),
            };
            emit(&b.out, &to_json(&cfg))
        }
        Command::Analyze(a) => {
            let cfg = load(&a.input)?;
            let r = analyze(&cfg, a.d_max(&cfg), &a.seeds()?)?;
            let text = match a.format {
                Format::Json => json(&r),
                Format::Table => analysis_text(&cfg, &r),
            };
            emit(&a.out, &text)
        }
        Command::Exc(a) => {
            let cfg = load(&a.input)?;
            let text = run_exc(&cfg, &a)?;
            emit(&a.out, &text)
        }
        Command::Splitting(a) => {
            let cfg = load(&a.input)?;
            let r = splitting_analysis(&cfg, &a.seeds()?)?;
            let text = match a.format {
                Format::Json => json(&r),
                Format::Table => splitting_text(&cfg, &r),
            };
            emit(&a.out, &text)
        }
        Command::Classify(a) => {
            let cfg = load(&a.input)?;
            let t = degree_table(&cfg, a.d_max(&cfg), &a.seeds()?)?;
            let out = ClassifyOut {
                unexpected_degrees: t.unexpected().into_iter().collect(),
                very_unexpected_degrees: t.very_unexpected().into_iter().collect(),
                rows: t.rows,
                seeds: t.seeds,
                warnings: t.warnings,
            };
            let text = match a.format {
                Format::Json => json(&out),
                Format::Table => {
                    let mut s = header(&cfg) + &degree_rows_table(&out.rows);
                    let _ = writeln!(s, "unexpected degrees: {}", set(&out.unexpected_degrees));
                    let _ = writeln!(s, "very unexpected degrees: {}", set(&out.very_unexpected_degrees));
                    s + &seeds_line(&out.seeds, &out.warnings)
                }
            };
            emit(&a.out, &text)
        }
        Command::Free(a) => {
            let cfg = load(&a.input)?;
            let r = DualModule::new(&cfg)?.freeness(&a.seeds()?)?;
            let text = match a.format {
                Format::Json => json(&r),
                Format::Table => free_text(&cfg, &r),
            };
            emit(&a.out, &text)
        }
        Command::Bounds(a) => {
            let cfg = load(&a.input)?;
            let r = bounds_report(&cfg, &a.seeds()?)?;
            let text = match a.format {
                Format::Json => json(&r),
                Format::Table => header(&cfg) + &bounds_text(&r),
            };
            emit(&a.out, &text)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("ARRLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| ArrError::usage(format!("ARRLAB_THREADS must be a number, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .map_err(|e| ArrError::Environment(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ArrError::Usage(_) | ArrError::Parse { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
