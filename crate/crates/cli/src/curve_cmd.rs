use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_bigint::BigUint;
use padic_hilbert::curve::{coord, CurveParams};
use padic_hilbert::{CellWord, Curve, CurveIndex, DigitVec};
use serde::Serialize;

use crate::data::{parse_coords, CurveArgs};
use crate::output::{sink, Format};
use crate::{CliError, CliResult};

/// Cells traced at most; beyond this the output is unreadable anyway.
const TRACE_LIMIT: u64 = 1 << 22;

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Curve index as one integer in [0, (p^n)^k).
    #[arg(conflicts_with = "limbs")]
    pub index: Option<String>,
    /// Curve index as k comma-separated limbs in [0, p^n), coarsest first.
    #[arg(long, value_delimiter = ',')]
    pub limbs: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Point in [0,1]^n, most significant axis first, e.g. 0.9,0.1.
    #[arg(long, conflicts_with = "cell", allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Cell word: k levels separated by ';', each n digits most significant
    /// first, e.g. "1,0;0,1".
    #[arg(long)]
    pub cell: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Svg,
    Csv,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, value_enum, default_value_t = TraceFormat::Svg)]
    pub format: TraceFormat,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Position {
    index: String,
    limbs: Vec<String>,
    /// Digits per level, most significant axis first.
    cells: Vec<Vec<u8>>,
    /// Lower corner of the cell, most significant axis first.
    coord: Vec<f64>,
    side: f64,
}

fn params(a: &CurveArgs) -> CliResult<(CurveParams, Curve)> {
    let params = CurveParams::new(a.prime()?, a.n, a.k, a.variant()?)?;
    let curve = params.curve()?;
    Ok((params, curve))
}

fn position(params: &CurveParams, idx: &CurveIndex, cell: &CellWord) -> Position {
    Position {
        index: idx.to_biguint().to_string(),
        limbs: idx.limbs().iter().map(|l| l.to_biguint().to_string()).collect(),
        cells: cell.coeffs().iter().map(DigitVec::written).collect(),
        coord: coord(cell),
        side: (params.p.get() as f64).powi(-(params.k as i32)),
    }
}

fn print_position(pos: &Position, n: usize, format: Format) -> CliResult<()> {
    let mut out = sink(None)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(pos).expect("serialisable"))?,
        Format::Table => {
            let axes: Vec<String> = (0..n).rev().map(|j| j.to_string()).collect();
            let join = |v: &[u8]| v.iter().map(u8::to_string).collect::<Vec<_>>().join(",");
            writeln!(out, "index  {}", pos.index)?;
            writeln!(out, "limbs  {}", pos.limbs.join(" "))?;
            let cells: Vec<String> = pos.cells.iter().map(|c| format!("({})", join(c))).collect();
            writeln!(out, "cell   {}", cells.join(" "))?;
            let coords: Vec<String> = pos.coord.iter().map(|c| c.to_string()).collect();
            writeln!(out, "coord  ({}) on axes ({})", coords.join(","), axes.join(","))?;
        }
        Format::Csv => {
            writeln!(out, "index,limbs,coord")?;
            let coords: Vec<String> = pos.coord.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{},{},{}", pos.index, pos.limbs.join(" "), coords.join(" "))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn encode(a: EncodeArgs) -> CliResult<()> {
    let (params, curve) = params(&a.curve)?;
    let idx = match (&a.index, &a.limbs) {
        (_, Some(limbs)) => {
            if limbs.len() != params.k {
                return Err(CliError::Usage(format!(
                    "expected {} limbs, got {}",
                    params.k,
                    limbs.len()
                )));
            }
            CurveIndex::from_u64_limbs(limbs, params.n, params.p)?
        }
        (Some(s), None) => {
            let v: BigUint = s
                .parse()
                .map_err(|_| CliError::Usage(format!("{s:?} is not a non-negative integer")))?;
            CurveIndex::from_biguint(&v, params.p, params.n, params.k)?
        }
        (None, None) => return Err(CliError::Usage("give an index or --limbs".into())),
    };
    let cell = curve.index_to_cell(&idx)?;
    print_position(&position(&params, &idx, &cell), params.n, a.format)
}

pub fn decode(a: DecodeArgs) -> CliResult<()> {
    let (params, curve) = params(&a.curve)?;
    let cell = match (&a.point, &a.cell) {
        (Some(pt), _) => {
            let x = parse_coords(pt)?;
            if x.len() != params.n {
                return Err(padic_hilbert::Error::DimensionMismatch {
                    left: params.n,
                    right: x.len(),
                }
                .into());
            }
            curve.quantize(&x, params.k)?
        }
        (None, Some(c)) => parse_cell(c, &params)?,
        (None, None) => return Err(CliError::Usage("give --point or --cell".into())),
    };
    let idx = curve.cell_to_index(&cell)?;
    print_position(&position(&params, &idx, &cell), params.n, a.format)
}

fn parse_cell(s: &str, params: &CurveParams) -> CliResult<CellWord> {
    let levels = s
        .split(';')
        .map(|lvl| {
            let digits = lvl
                .split(',')
                .map(|d| {
                    d.trim()
                        .parse::<u8>()
                        .map_err(|_| CliError::Usage(format!("{d:?} is not a digit")))
                })
                .collect::<CliResult<Vec<u8>>>()?;
            if digits.len() != params.n {
                return Err(padic_hilbert::Error::DimensionMismatch {
                    left: params.n,
                    right: digits.len(),
                }
                .into());
            }
            Ok(DigitVec::from_written(&digits, params.p)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    if levels.len() != params.k {
        return Err(CliError::Usage(format!(
            "expected {} levels, got {}",
            params.k,
            levels.len()
        )));
    }
    Ok(CellWord::new(levels)?)
}

/// Cell centres in curve order, most significant axis first.
fn centres(params: &CurveParams, curve: &Curve) -> CliResult<Vec<Vec<f64>>> {
    let total = params
        .p
        .checked_pow(params.n * params.k)
        .filter(|&t| t <= TRACE_LIMIT)
        .ok_or_else(|| CliError::Usage(format!("trace is limited to {TRACE_LIMIT} cells")))?;
    let half = 0.5 * (params.p.get() as f64).powi(-(params.k as i32));
    let base = params.p.checked_pow(params.n).expect("p^n fits");
    let mut out = Vec::with_capacity(total as usize);
    let mut limbs = vec![0u64; params.k];
    for i in 0..total {
        let mut rest = i;
        for l in limbs.iter_mut().rev() {
            *l = rest % base;
            rest /= base;
        }
        let idx = CurveIndex::from_u64_limbs(&limbs, params.n, params.p)?;
        let cell = curve.index_to_cell(&idx)?;
        out.push(coord(&cell).into_iter().map(|c| c + half).collect());
    }
    Ok(out)
}

pub fn trace(a: TraceArgs) -> CliResult<()> {
    let (params, curve) = params(&a.curve)?;
    if a.format == TraceFormat::Svg && params.n != 2 {
        return Err(padic_hilbert::Error::Contract(format!("SVG traces need n = 2, got n = {}", params.n)).into());
    }
    let pts = centres(&params, &curve)?;
    let mut out = sink(a.output.as_deref())?;
    match a.format {
        TraceFormat::Csv => {
            let header: Vec<String> = (0..params.n).rev().map(|j| format!("x{j}")).collect();
            writeln!(out, "index,{}", header.join(","))?;
            for (i, p) in pts.iter().enumerate() {
                let cols: Vec<String> = p.iter().map(|c| c.to_string()).collect();
                writeln!(out, "{i},{}", cols.join(","))?;
            }
        }
        TraceFormat::Svg => write_svg(&mut out, &pts, &params)?,
    }
    out.flush()?;
    Ok(())
}

fn write_svg(out: &mut dyn Write, pts: &[Vec<f64>], params: &CurveParams) -> std::io::Result<()> {
    const SIZE: f64 = 512.0;
    let stroke = (SIZE / (params.p.get() as f64).powi(params.k as i32) / 4.0).clamp(0.5, 4.0);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    )?;
    writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#)?;
    write!(
        out,
        r#"<polyline fill="none" stroke="black" stroke-width="{stroke}" stroke-linejoin="round" points=""#
    )?;
    for (i, p) in pts.iter().enumerate() {
        // axis 1 runs left to right, axis 0 bottom to top
        let x = p[0] * SIZE;
        let y = (1.0 - p[1]) * SIZE;
        if i > 0 {
            write!(out, " ")?;
        }
        write!(out, "{x:.3},{y:.3}")?;
    }
    writeln!(out, r#""/>"#)?;
    writeln!(out, "</svg>")
}
