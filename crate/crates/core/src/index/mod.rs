//! The scaled Gray-Hilbert tree and its static baseline.
//!
//! Every point gets a path of L = k_max·n base-p digits: its curve index at
//! depth k_max, most significant digit first. A tree node at depth D is the
//! set of points sharing the first D digits. Sorting paths therefore puts
//! points in curve order, and both trees can be read off the sorted order.

mod descent;
mod tree;

pub use descent::Descent;
pub use tree::{NodeId, NodeInfo, ScaledTree, TreeStats};

use serde::Serialize;

use crate::curve::{Curve, PathScratch};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ingest::PointCloud;

/// Default number of curve iterations a tree may refine to.
pub const DEFAULT_K_MAX: usize = 20;

/// Point paths stored flat, `width` digits per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedPoints {
    pub ids: Vec<u64>,
    width: usize,
    digits: Vec<u8>,
}

impl EncodedPoints {
    #[inline]
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn path(&self, i: usize) -> &[u8] {
        &self.digits[i * self.width..(i + 1) * self.width]
    }

    /// Indices sorted by (path, id): curve order at full depth.
    pub fn sorted(&self, exec: Exec) -> SortedPaths {
        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        exec.sort_by(&mut order, |&a, &b| {
            self.path(a as usize)
                .cmp(self.path(b as usize))
                .then(self.ids[a as usize].cmp(&self.ids[b as usize]))
        });
        let lcp = std::iter::once(0)
            .chain(
                order
                    .windows(2)
                    .map(|w| common_prefix(self.path(w[0] as usize), self.path(w[1] as usize)) as u32),
            )
            .collect();
        SortedPaths {
            order,
            lcp,
            width: self.width,
        }
    }
}

#[inline]
pub(crate) fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Encode every point of `cloud` to its depth-`k_max` curve path.
pub fn encode_points(curve: &Curve, cloud: &PointCloud, k_max: usize, exec: Exec) -> Result<EncodedPoints> {
    if cloud.n() != curve.n() {
        return Err(Error::DimensionMismatch {
            left: curve.n(),
            right: cloud.n(),
        });
    }
    if k_max == 0 {
        return Err(Error::range("k_max", 0, ">= 1"));
    }
    if let Some(v) = cloud.coords().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::range("coordinate", v, "[0, 1]"));
    }
    let width = k_max * curve.n();
    let mut digits = vec![0u8; width * cloud.len()];
    exec.fill_chunks(&mut digits, width, PathScratch::default, |scratch, i, out| {
        curve
            .encode_path_into(cloud.point(i), k_max, out, scratch)
            .expect("coordinates checked above");
    });
    Ok(EncodedPoints {
        ids: (0..cloud.len() as u64).collect(),
        width,
        digits,
    })
}

/// Sorted order plus adjacent longest-common-prefix lengths:
/// `lcp[i]` = LCP(path(order[i-1]), path(order[i])), `lcp[0]` = 0.
#[derive(Clone, Debug)]
pub struct SortedPaths {
    pub order: Vec<u32>,
    pub lcp: Vec<u32>,
    width: usize,
}

/// Leaf counts of a tree over a point set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LeafCounts {
    /// Non-empty leaves.
    pub leaves: usize,
    /// Leaves holding more than s points.
    pub overfilled: usize,
}

impl SortedPaths {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Leaf counts of the scaled tree with bucket capacity `s`, without
    /// building it. A node splits while it holds more than s points and
    /// sits above depth L; chains of single-child nodes are skipped by
    /// jumping straight to the range's minimum LCP.
    pub fn scaled_leaves(&self, s: usize) -> LeafCounts {
        let mut out = LeafCounts::default();
        if self.is_empty() {
            return out;
        }
        let mut stack = vec![(0usize, self.len())];
        while let Some((lo, hi)) = stack.pop() {
            if hi - lo <= s {
                out.leaves += 1;
                continue;
            }
            let split = self.lcp[lo + 1..hi].iter().copied().min().unwrap_or(0);
            if split as usize >= self.width {
                out.leaves += 1;
                out.overfilled += 1;
                continue;
            }
            let mut start = lo;
            for i in lo + 1..hi {
                if self.lcp[i] == split {
                    stack.push((start, i));
                    start = i;
                }
            }
            stack.push((start, hi));
        }
        out
    }

    /// Group sizes of points sharing their first `depth` digits, in order.
    pub fn groups(&self, depth: usize) -> Vec<usize> {
        let mut sizes = Vec::new();
        for (i, &l) in self.lcp.iter().enumerate() {
            if i == 0 || (l as usize) < depth {
                sizes.push(1);
            } else {
                *sizes.last_mut().unwrap() += 1;
            }
        }
        sizes
    }

    /// Number of distinct full-depth paths.
    pub fn distinct(&self) -> usize {
        self.groups(self.width).len()
    }
}

/// Algorithm 1's partition: every point belongs to the class of the curve
/// iteration at which it is first told apart from all other points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaledPartition {
    /// Point ids in curve order.
    pub order: Vec<u64>,
    /// `classes[k-1]` holds the ids resolved at iteration k, in curve order.
    pub classes: Vec<Vec<u64>>,
}

impl ScaledPartition {
    /// Class (1-based iteration) of every id in `order`, parallel to it.
    pub fn class_of(&self) -> std::collections::HashMap<u64, usize> {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(k, ids)| ids.iter().map(move |&id| (id, k + 1)))
            .collect()
    }
}

/// Partition a point set into resolution classes. Exact duplicates share a
/// class (they never separate, so they land in the deepest one reached).
pub fn scaled_partition(points: &EncodedPoints, n: usize, exec: Exec) -> ScaledPartition {
    let sorted = points.sorted(exec);
    let len = sorted.len();
    let width = points.width();
    let k_max = width / n.max(1);
    // LCP with the nearest distinct path on each side of every run of
    // identical paths.
    let mut best = vec![0usize; len];
    let mut i = 0;
    while i < len {
        let mut j = i + 1;
        while j < len && sorted.lcp[j] as usize == width {
            j += 1;
        }
        let left = if i > 0 { sorted.lcp[i] as usize } else { 0 };
        let right = if j < len { sorted.lcp[j] as usize } else { 0 };
        best[i..j].fill(left.max(right));
        i = j;
    }
    let mut classes = vec![Vec::new(); k_max.max(1)];
    let mut order = Vec::with_capacity(len);
    for (pos, &idx) in sorted.order.iter().enumerate() {
        let id = points.ids[idx as usize];
        let k = (best[pos] / n + 1).min(k_max);
        classes[k - 1].push(id);
        order.push(id);
    }
    while classes.len() > 1 && classes.last().is_some_and(Vec::is_empty) {
        classes.pop();
    }
    ScaledPartition { order, classes }
}

/// The static tree: a full tree of uniform depth k chosen so that on
/// average no leaf holds more than s points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StaticStats {
    pub k: usize,
    /// k - log_p(|S|/s)/n, in [0, 1).
    pub eps: f64,
    /// log_p of the total leaf count, n·k.
    pub log_p_leaves: f64,
    pub counts: LeafCounts,
    /// Occupied group sizes in curve order.
    pub group_sizes: Vec<usize>,
}

/// Smallest k >= 1 with s·p^{nk} >= size, computed exactly.
pub fn static_k(size: usize, s: usize, n: usize, p: u8) -> Result<usize> {
    if s == 0 || s >= size {
        return Err(Error::contract(format!(
            "static tree needs 1 <= s < |S|, got s = {s}, |S| = {size}"
        )));
    }
    let target = size as u128;
    let mut k = 1;
    loop {
        // s·p^{nk} with saturation; once it passes |S| we are done.
        let mut cap = s as u128;
        for _ in 0..n * k {
            cap = cap.saturating_mul(p as u128);
            if cap >= target {
                return Ok(k);
            }
        }
        if cap >= target {
            return Ok(k);
        }
        k += 1;
    }
}

/// Static k and ε for the given sizes.
pub fn static_params(size: usize, s: usize, n: usize, p: u8) -> Result<(usize, f64)> {
    let k = static_k(size, s, n, p)?;
    let frac = ((size as f64) / (s as f64)).ln() / (p as f64).ln() / n as f64;
    let eps = (k as f64 - frac).clamp(0.0, 1.0);
    // an exact power lands on k exactly; float noise must not leave ε ≈ 1
    let eps = if eps >= 1.0 - 1e-12 { 0.0 } else { eps };
    Ok((k, eps))
}

/// Group points by their depth-k prefix without materialising the p^{nk}
/// leaves. When k exceeds the encoded depth, groups are taken at full
/// path depth (points still together there coincide in every encoded digit).
pub fn build_static(sorted: &SortedPaths, s: usize, n: usize, p: u8) -> Result<StaticStats> {
    let (k, eps) = static_params(sorted.len(), s, n, p)?;
    let depth = (k * n).min(sorted.width);
    let group_sizes = sorted.groups(depth);
    let counts = LeafCounts {
        leaves: group_sizes.len(),
        overfilled: group_sizes.iter().filter(|&&g| g > s).count(),
    };
    Ok(StaticStats {
        k,
        eps,
        log_p_leaves: (n * k) as f64,
        counts,
        group_sizes,
    })
}
