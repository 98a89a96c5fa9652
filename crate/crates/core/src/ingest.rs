//! Point clouds: CSV loading, min-max normalisation, the bundled iris data
//! and seeded random generators.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Points stored row-major; point `i` has id `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    n: usize,
    coords: Vec<f64>,
    pub label: String,
}

impl PointCloud {
    pub fn new(n: usize, coords: Vec<f64>, label: impl Into<String>) -> Result<PointCloud> {
        if n == 0 {
            return Err(Error::range("n", 0, ">= 1"));
        }
        if !coords.len().is_multiple_of(n) {
            return Err(Error::contract(format!(
                "{} coordinates do not split into points of dimension {n}",
                coords.len()
            )));
        }
        Ok(PointCloud {
            n,
            coords,
            label: label.into(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], label: impl Into<String>) -> Result<PointCloud> {
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(n * rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: r.len(),
                });
            }
            coords.extend_from_slice(r);
        }
        PointCloud::new(n, coords, label)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.n)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// True if every coordinate lies in [0, 1].
    pub fn in_unit_cube(&self) -> bool {
        self.coords.iter().all(|v| (0.0..=1.0).contains(v))
    }

    /// Append `extra` zero columns.
    pub fn pad_zeros(&self, extra: usize) -> PointCloud {
        let n = self.n + extra;
        let mut coords = Vec::with_capacity(n * self.len());
        for p in self.points() {
            coords.extend_from_slice(p);
            coords.extend(std::iter::repeat_n(0.0, extra));
        }
        PointCloud {
            n,
            coords,
            label: self.label.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: bool,
    /// Zero-based columns to keep, in order. None keeps every column.
    pub columns: Option<Vec<usize>>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            header: false,
            columns: None,
        }
    }
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<PointCloud> {
    let file = File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, opts, label)
}

/// Parse CSV from any reader. Rows and columns in errors are 1-based and
/// count the header line.
pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions, label: impl Into<String>) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut coords = Vec::new();
    let mut width: Option<usize> = None;
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1 + opts.header as usize;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            col: 0,
            msg: e.to_string(),
        })?;
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(Error::Parse {
                    row,
                    col: rec.len().min(w) + 1,
                    msg: format!("expected {w} fields, found {}", rec.len()),
                })
            }
            _ => {}
        }
        let cols: Vec<usize> = match &opts.columns {
            Some(c) => c.clone(),
            None => (0..rec.len()).collect(),
        };
        for &c in &cols {
            let cell = rec.get(c).ok_or_else(|| Error::Parse {
                row,
                col: c + 1,
                msg: format!("row has only {} fields", rec.len()),
            })?;
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col: c + 1,
                msg: format!("{cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    col: c + 1,
                    msg: format!("{cell:?} is not finite"),
                });
            }
            coords.push(v);
        }
        n = cols.len();
    }
    if coords.is_empty() {
        return Err(Error::Data("no points in input".into()));
    }
    PointCloud::new(n, coords, label)
}

/// Rescale every axis onto [0, 1]. Constant axes become 0.
pub fn normalize_minmax(cloud: &PointCloud) -> Result<PointCloud> {
    if cloud.is_empty() {
        return Err(Error::Data("cannot normalise an empty point cloud".into()));
    }
    let n = cloud.n;
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in cloud.points() {
        for j in 0..n {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    let coords = cloud
        .points()
        .flat_map(|p| {
            (0..n).map(|j| {
                let span = hi[j] - lo[j];
                if span > 0.0 {
                    ((p[j] - lo[j]) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
        })
        .collect::<Vec<_>>();
    PointCloud::new(n, coords, cloud.label.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrisEncoding {
    Original,
    Cdf,
    CdfTrimmed,
    Bch,
}

impl IrisEncoding {
    pub const ALL: [IrisEncoding; 4] = [
        IrisEncoding::Original,
        IrisEncoding::Cdf,
        IrisEncoding::CdfTrimmed,
        IrisEncoding::Bch,
    ];

    pub fn dim(self) -> usize {
        match self {
            IrisEncoding::Original => 4,
            IrisEncoding::Cdf => 400,
            IrisEncoding::CdfTrimmed => 123,
            IrisEncoding::Bch => 431,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IrisEncoding::Original => "original",
            IrisEncoding::Cdf => "cdf",
            IrisEncoding::CdfTrimmed => "cdf_trimmed",
            IrisEncoding::Bch => "bch",
        }
    }

    /// File name looked up in the data directory for external encodings.
    pub fn file_name(self) -> String {
        format!("iris_{}.csv", self.name())
    }
}

impl FromStr for IrisEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<IrisEncoding> {
        IrisEncoding::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::range("encoding", s, "original, cdf, cdf_trimmed or bch"))
    }
}

const IRIS_CSV: &str = include_str!("../data/iris.csv");

pub const IRIS_ROWS: usize = 150;

/// Fisher's iris measurements as published in the UCI repository, min-max
/// normalised into the unit cube. Columns: sepal length, sepal width,
/// petal length, petal width.
pub fn iris_original() -> PointCloud {
    let opts = CsvOptions {
        header: true,
        columns: Some(vec![0, 1, 2, 3]),
        ..CsvOptions::default()
    };
    let raw = read_csv(IRIS_CSV.as_bytes(), &opts, "iris original").expect("bundled iris parses");
    normalize_minmax(&raw).expect("iris is non-empty")
}

/// Load an iris encoding. The original is bundled; the binary encodings
/// are external 0/1 CSV files (`iris_cdf.csv`, `iris_cdf_trimmed.csv`,
/// `iris_bch.csv`) read from `data_dir`.
pub fn load_iris(encoding: IrisEncoding, data_dir: Option<&Path>) -> Result<PointCloud> {
    if encoding == IrisEncoding::Original {
        return Ok(iris_original());
    }
    let path = iris_encoding_path(encoding, data_dir).ok_or_else(|| {
        Error::Data(format!(
            "the {} iris encoding is not bundled; supply {} in a data directory",
            encoding.name(),
            encoding.file_name()
        ))
    })?;
    let text = std::fs::read_to_string(&path)?;
    let header = text
        .lines()
        .next()
        .map(|l| l.split(',').any(|c| c.trim().parse::<f64>().is_err()))
        .unwrap_or(false);
    let opts = CsvOptions {
        header,
        ..CsvOptions::default()
    };
    let mut cloud = read_csv(text.as_bytes(), &opts, format!("iris {}", encoding.name()))?;
    if cloud.len() != IRIS_ROWS || cloud.n() != encoding.dim() {
        return Err(Error::Data(format!(
            "{}: expected {IRIS_ROWS} x {}, found {} x {}",
            path.display(),
            encoding.dim(),
            cloud.len(),
            cloud.n()
        )));
    }
    if !cloud.in_unit_cube() {
        cloud = normalize_minmax(&cloud)?;
    }
    Ok(cloud)
}

pub fn iris_encoding_path(encoding: IrisEncoding, data_dir: Option<&Path>) -> Option<PathBuf> {
    let p = data_dir?.join(encoding.file_name());
    p.is_file().then_some(p)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distribution {
    /// i.i.d. uniform on [0, 1) per axis.
    Uniform,
    /// i.i.d. standard normal per axis, min-max rescaled per batch.
    Normal,
    /// Standard normal clipped to [-c, c], then mapped linearly onto [0, 1].
    NormalClipped(f64),
}

impl Distribution {
    pub fn name(&self) -> String {
        match self {
            Distribution::Uniform => "uniform".into(),
            Distribution::Normal => "normal".into(),
            Distribution::NormalClipped(c) => format!("normal-clip{c}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Distribution> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "normal" => Ok(Distribution::Normal),
            _ => {
                if let Some(c) = s.strip_prefix("normal-clip") {
                    if let Ok(c) = c.parse::<f64>() {
                        if c > 0.0 && c.is_finite() {
                            return Ok(Distribution::NormalClipped(c));
                        }
                    }
                }
                Err(Error::range("dist", s, "uniform, normal or normal-clip<c>"))
            }
        }
    }
}

const GEN_CHUNK: usize = 4096;

/// Draw `count` points. Each chunk of 4096 points uses its own ChaCha stream
/// so the output does not depend on how generation is scheduled.
pub fn generate(dist: Distribution, count: usize, n: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::range("count", 0, ">= 1"));
    }
    if n == 0 {
        return Err(Error::range("n", 0, ">= 1"));
    }
    let mut coords = vec![0.0; count * n];
    for (c, chunk) in coords.chunks_mut(GEN_CHUNK * n).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        match dist {
            Distribution::Uniform => chunk.iter_mut().for_each(|v| *v = rng.random()),
            Distribution::Normal | Distribution::NormalClipped(_) => {
                chunk.iter_mut().for_each(|v| *v = rng.sample(StandardNormal))
            }
        }
    }
    let label = format!("{} {count}x{n} seed {seed}", dist.name());
    let cloud = PointCloud::new(n, coords, label)?;
    match dist {
        Distribution::Uniform => Ok(cloud),
        Distribution::Normal => normalize_minmax(&cloud),
        Distribution::NormalClipped(c) => {
            let coords = cloud.coords.iter().map(|&v| (v.clamp(-c, c) + c) / (2.0 * c)).collect();
            PointCloud::new(n, coords, cloud.label)
        }
    }
}
