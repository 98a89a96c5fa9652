use std::path::PathBuf;

use clap::{Args, ValueEnum};
use padic_hilbert::ingest::{self, CsvOptions, Distribution, IrisEncoding};
use padic_hilbert::{PointCloud, Prime, Variant};

use crate::{CliError, CliResult};

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Prime base.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Curve iteration depth.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Axis permutation family: bubble or ring.
    #[arg(long, default_value = "bubble")]
    pub variant: String,
}

impl CurveArgs {
    pub fn prime(&self) -> CliResult<Prime> {
        Ok(Prime::new(self.p)?)
    }

    pub fn variant(&self) -> CliResult<Variant> {
        Ok(self.variant.parse()?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Normalize {
    /// Rescale each axis onto [0, 1].
    Minmax,
    /// Use values as given; they must already lie in [0, 1].
    None,
}

/// Where points come from: a CSV file, the iris data, or a generator.
#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// CSV file with one point per row.
    #[arg(long, conflicts_with_all = ["iris", "dist"])]
    pub input: Option<PathBuf>,
    /// Iris encoding: original, cdf, cdf_trimmed or bch.
    #[arg(long, conflicts_with = "dist", num_args = 0..=1, default_missing_value = "original")]
    pub iris: Option<String>,
    /// Directory holding the external iris encodings.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Random distribution: uniform, normal or normal-clip<c>.
    #[arg(long)]
    pub dist: Option<String>,
    /// Points to generate.
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    /// Dimension of generated points.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// The CSV has a header row.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// Zero-based CSV columns to use, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<usize>>,
    /// How CSV input is mapped into the unit cube.
    #[arg(long, value_enum, default_value_t = Normalize::Minmax)]
    pub normalize: Normalize,
}

impl DataArgs {
    pub fn is_generated(&self) -> bool {
        self.dist.is_some()
    }

    pub fn load(&self) -> CliResult<PointCloud> {
        self.load_seed(self.seed)
    }

    pub fn load_seed(&self, seed: u64) -> CliResult<PointCloud> {
        if let Some(path) = &self.input {
            let delim = match self.delimiter.as_bytes() {
                [b] => *b,
                _ if self.delimiter == "\\t" => b'\t',
                _ => return Err(CliError::Usage("--delimiter must be one byte".into())),
            };
            let opts = CsvOptions {
                delimiter: delim,
                header: self.header,
                columns: self.columns.clone(),
            };
            let cloud = ingest::load_csv(path, &opts)?;
            return Ok(match self.normalize {
                Normalize::Minmax => ingest::normalize_minmax(&cloud)?,
                Normalize::None => cloud,
            });
        }
        if let Some(enc) = &self.iris {
            let enc: IrisEncoding = enc.parse()?;
            return Ok(ingest::load_iris(enc, self.data_dir.as_deref())?);
        }
        if let Some(d) = &self.dist {
            let dist: Distribution = d.parse()?;
            return Ok(ingest::generate(dist, self.count, self.n, seed)?);
        }
        Err(CliError::Usage(
            "choose a data source: --input, --iris or --dist".into(),
        ))
    }
}

pub fn parse_variants(s: &str) -> CliResult<Vec<Variant>> {
    match s {
        "both" => Ok(vec![Variant::Bubble, Variant::Ring]),
        other => Ok(vec![other.parse()?]),
    }
}

pub fn parse_coords(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{c:?} is not a number")))
        })
        .collect()
}
