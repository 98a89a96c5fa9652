use std::io::Write;
use std::time::Instant;

use clap::Args;
use padic_hilbert::index::{encode_points, DEFAULT_K_MAX};
use padic_hilbert::ingest::{self, Distribution};
use padic_hilbert::sparsity::{self, SparsityReport};
use padic_hilbert::{Curve, Exec, Prime, Variant};
use serde::Serialize;

use crate::data::{parse_variants, DataArgs};
use crate::output::{fixed, sink, Format};
use crate::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct SparsityArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Bucket capacities, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
    pub bucket: Vec<usize>,
    /// bubble, ring or both.
    #[arg(long, default_value = "both")]
    pub variant: String,
    /// Repetitions with seeds seed, seed+1, ... (generated data only).
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub kmax: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

pub fn run(a: SparsityArgs, exec: Exec) -> CliResult<()> {
    let p = Prime::new(a.p)?;
    let variants = parse_variants(&a.variant)?;
    if a.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    if a.reps > 1 && !a.data.is_generated() {
        return Err(CliError::Usage("--reps needs generated data (--dist)".into()));
    }
    let mut rows = Vec::new();
    for r in 0..a.reps {
        let cloud = a.data.load_seed(a.data.seed + r as u64)?;
        rows.extend(sparsity::report(&cloud, p, &variants, &a.bucket, a.kmax, exec)?);
    }
    let mut out = sink(None)?;
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serialisable"))?,
        Format::Csv => write_csv(&mut out, &rows)?,
        Format::Table if a.reps > 1 => write_means(&mut out, &rows, p)?,
        Format::Table => write_table(&mut out, &rows, p)?,
    }
    out.flush()?;
    Ok(())
}

fn write_table(out: &mut dyn Write, rows: &[SparsityReport], p: Prime) -> std::io::Result<()> {
    if let Some(r) = rows.first() {
        writeln!(out, "{}  |S| = {}  n = {}  p = {}", r.dataset, r.size, r.n, p.get())?;
    }
    let lg = format!("log{}R", p.get());
    writeln!(
        out,
        "{:>6} {:>8} {:>8} {:>6} {:>6} {:>4} {:>6} {:>8} {:>6}",
        "s", "variant", "leaves", "ω_st", "ω_sc", "k", "ε", lg, "ρ"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:>6} {:>8} {:>8} {:>6} {:>6} {:>4} {:>6} {:>8} {:>6}",
            r.s,
            r.variant,
            r.leaves_scaled,
            fixed(r.omega_static, 2),
            fixed(r.omega_scaled, 2),
            r.k_static,
            fixed(r.eps_p, 2),
            fixed(r.log_p_r, 2),
            fixed(r.rho, 2)
        )?;
    }
    Ok(())
}

fn write_means(out: &mut dyn Write, rows: &[SparsityReport], p: Prime) -> std::io::Result<()> {
    if let Some(r) = rows.first() {
        writeln!(out, "{}  |S| = {}  n = {}  p = {}", r.dataset, r.size, r.n, p.get())?;
    }
    writeln!(
        out,
        "{:>6} {:>8} {:>5} {:>10} {:>6} {:>6}",
        "s", "variant", "reps", "leaves", "ρ", "sd"
    )?;
    for m in sparsity::mean_rows(rows) {
        writeln!(
            out,
            "{:>6} {:>8} {:>5} {:>10} {:>6} {:>6}",
            m.s,
            m.variant,
            m.reps,
            fixed(m.leaves_scaled_mean, 1),
            fixed(m.rho_mean, 2),
            fixed(m.rho_sd, 3)
        )?;
    }
    Ok(())
}

fn write_csv(out: &mut dyn Write, rows: &[SparsityReport]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Random distribution: uniform, normal or normal-clip<c>.
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub count: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value = "bubble")]
    pub variant: String,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub kmax: usize,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Serialize)]
struct Timing {
    mode: &'static str,
    best_ms: f64,
    points_per_sec: f64,
}

pub fn bench(a: BenchArgs) -> CliResult<()> {
    let p = Prime::new(a.p)?;
    let variant: Variant = a.variant.parse()?;
    let dist: Distribution = a.dist.parse()?;
    let cloud = ingest::generate(dist, a.count, a.n, a.seed)?;
    let curve = Curve::new(p, a.n, variant)?;
    let mut out = sink(None)?;
    writeln!(
        out,
        "encode + sort of {} points, n = {}, p = {}, kmax = {}",
        a.count,
        a.n,
        p.get(),
        a.kmax
    )?;
    let modes = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];
    let mut timings = Vec::new();
    for (name, exec) in modes {
        let mut best = f64::INFINITY;
        for _ in 0..a.reps.max(1) {
            let t = Instant::now();
            let enc = encode_points(&curve, &cloud, a.kmax, exec)?;
            let sorted = enc.sorted(exec);
            std::hint::black_box(&sorted);
            best = best.min(t.elapsed().as_secs_f64());
        }
        timings.push(Timing {
            mode: name,
            best_ms: best * 1e3,
            points_per_sec: a.count as f64 / best,
        });
    }
    for t in &timings {
        writeln!(
            out,
            "{:>10}  {:>10} ms  {:>12.0} points/s",
            t.mode,
            fixed(t.best_ms, 1),
            t.points_per_sec
        )?;
    }
    if !cfg!(feature = "parallel") {
        writeln!(out, "(built without the parallel feature; both modes run sequentially)")?;
    }
    out.flush()?;
    Ok(())
}
