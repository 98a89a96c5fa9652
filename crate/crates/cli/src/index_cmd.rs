use std::io::Write;

use clap::{Args, Subcommand};
use padic_hilbert::index::{encode_points, NodeInfo, TreeStats, DEFAULT_K_MAX};
use padic_hilbert::{Curve, Exec, Prime, ScaledTree, Variant};
use serde::Serialize;

use crate::data::{parse_coords, DataArgs};
use crate::output::sink;
use crate::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value = "bubble")]
    pub variant: String,
    /// Bucket capacity s.
    #[arg(long, default_value_t = 1)]
    pub bucket: usize,
    /// Maximum curve depth; the tree is at most kmax·n levels deep.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub kmax: usize,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Bulk-build the tree and print its statistics.
    Build {
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// Build, then insert one more point (id = number of points).
    Insert {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Build, then locate the node a point descends to.
    Find {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Build, then remove the point with this row id.
    Remove {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        id: u64,
    },
}

#[derive(Serialize)]
struct Output {
    dataset: String,
    p: u8,
    n: usize,
    variant: String,
    bucket: usize,
    kmax: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    found: Option<Found>,
    #[serde(skip_serializing_if = "Option::is_none")]
    before: Option<TreeStats>,
    stats: TreeStats,
}

#[derive(Serialize)]
struct Found {
    node: NodeInfo,
    /// Points under the node, by row id.
    ids: Vec<u64>,
}

impl Action {
    fn tree(&self) -> &TreeArgs {
        match self {
            Action::Build { tree }
            | Action::Insert { tree, .. }
            | Action::Find { tree, .. }
            | Action::Remove { tree, .. } => tree,
        }
    }
}

pub fn run(args: IndexArgs, exec: Exec) -> CliResult<()> {
    let a = args.action.tree();
    let p = Prime::new(a.p)?;
    let variant: Variant = a.variant.parse()?;
    let cloud = a.data.load()?;
    let n = cloud.n();
    let curve = Curve::new(p, n, variant.clone())?;
    let enc = encode_points(&curve, &cloud, a.kmax, exec)?;
    let mut tree = ScaledTree::build(p, n, a.bucket, variant.clone(), a.kmax, &enc, exec)?;
    let mut found = None;
    let mut before = None;
    match &args.action {
        Action::Build { .. } => {}
        Action::Insert { point, .. } => {
            let x = point_of(point, n)?;
            before = Some(tree.stats());
            tree.insert(cloud.len() as u64, &x)?;
        }
        Action::Remove { id, .. } => {
            before = Some(tree.stats());
            tree.remove(*id)?;
        }
        Action::Find { point, .. } => {
            let x = point_of(point, n)?;
            let node = tree.find_node(&x)?;
            let ids = tree.nearest(&x)?;
            found = Some(Found { node, ids });
        }
    }
    let out = Output {
        dataset: cloud.label.clone(),
        p: p.get(),
        n,
        variant: variant.name().to_string(),
        bucket: a.bucket,
        kmax: a.kmax,
        found,
        before,
        stats: tree.stats(),
    };
    let mut w = sink(None)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&out).expect("serialisable"))?;
    w.flush()?;
    Ok(())
}

fn point_of(s: &str, n: usize) -> CliResult<Vec<f64>> {
    let x = parse_coords(s)?;
    if x.len() != n {
        return Err(CliError::Lib(padic_hilbert::Error::DimensionMismatch {
            left: n,
            right: x.len(),
        }));
    }
    Ok(x)
}
