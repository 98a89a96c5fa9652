//! Storage capacity of the scaled tree against the static tree, and the
//! local sparsity measure ρ derived from it.
//!
//! Ω(T) = (1 + ω(T))·|L(T)|, with ω the share of non-empty leaves that are
//! overfilled. The static tree has p^{nk} leaves, so everything is kept in
//! log_p form.

use log::warn;
use serde::Serialize;

use crate::affine::Variant;
use crate::curve::Curve;
use crate::digits::Prime;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::{build_static, encode_points, LeafCounts, SortedPaths};
use crate::ingest::PointCloud;

/// Overfilled / non-empty leaves.
pub fn omega(counts: LeafCounts) -> Result<f64> {
    if counts.leaves == 0 {
        return Err(Error::contract("ω needs at least one non-empty leaf"));
    }
    Ok(counts.overfilled as f64 / counts.leaves as f64)
}

pub fn capacity(leaves: f64, omega: f64) -> f64 {
    (1.0 + omega) * leaves
}

/// log_p Ω from log_p |L|.
pub fn log_capacity(log_p_leaves: f64, omega: f64, p: Prime) -> f64 {
    (1.0 + omega).ln() / (p.get() as f64).ln() + log_p_leaves
}

/// ρ = (-log_p(R/s) - nε)/log_p(2s).
pub fn rho(log_p_r: f64, s: usize, n: usize, eps: f64, p: Prime) -> f64 {
    let lp = (p.get() as f64).ln();
    let log_s = (s as f64).ln() / lp;
    let log_2s = (2.0 * s as f64).ln() / lp;
    (-(log_p_r - log_s) - n as f64 * eps) / log_2s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsityReport {
    pub dataset: String,
    pub variant: String,
    pub p: u8,
    pub n: usize,
    pub size: usize,
    pub s: usize,
    pub k_static: usize,
    pub eps_p: f64,
    pub omega_static: f64,
    pub omega_scaled: f64,
    pub leaves_scaled: usize,
    pub overfilled_scaled: usize,
    pub leaves_static_nonempty: usize,
    pub log_p_leaves_static: f64,
    pub log_p_r: f64,
    pub rho: f64,
    /// ½p^{-nε} <= R <= s·p^{-nε}
    pub bounds_hold: bool,
    /// ε >= log_p(s)/n, under which R <= 1 is guaranteed.
    pub criterion: bool,
    pub scaled_more_efficient: bool,
}

/// One report row from the two trees' leaf counts.
#[allow(clippy::too_many_arguments)]
pub fn report_row(
    dataset: &str,
    variant: &str,
    p: Prime,
    n: usize,
    size: usize,
    s: usize,
    scaled: LeafCounts,
    sorted: &SortedPaths,
) -> Result<SparsityReport> {
    let st = build_static(sorted, s, n, p.get())?;
    let omega_st = omega(st.counts)?;
    let omega_sc = omega(scaled)?;
    let lp = (p.get() as f64).ln();
    let log_sc = log_capacity((scaled.leaves as f64).ln() / lp, omega_sc, p);
    let log_st = log_capacity(st.log_p_leaves, omega_st, p);
    let log_p_r = log_sc - log_st;
    let mut r = rho(log_p_r, s, n, st.eps, p);
    if (-1e-9..0.0).contains(&r) {
        r = 0.0;
    } else if r > 1.0 && r < 1.0 + 1e-9 {
        r = 1.0;
    } else if !(0.0..=1.0).contains(&r) {
        warn!("{dataset}: ρ = {r} at s = {s} lies outside [0, 1]");
    }
    let n_eps = n as f64 * st.eps;
    let log_s = (s as f64).ln() / lp;
    let log_half = -(2f64).ln() / lp;
    let tol = 1e-9;
    let bounds_hold = log_p_r >= log_half - n_eps - tol && log_p_r <= log_s - n_eps + tol;
    let criterion = st.eps >= log_s / n as f64;
    Ok(SparsityReport {
        dataset: dataset.to_string(),
        variant: variant.to_string(),
        p: p.get(),
        n,
        size,
        s,
        k_static: st.k,
        eps_p: st.eps,
        omega_static: omega_st,
        omega_scaled: omega_sc,
        leaves_scaled: scaled.leaves,
        overfilled_scaled: scaled.overfilled,
        leaves_static_nonempty: st.counts.leaves,
        log_p_leaves_static: st.log_p_leaves,
        log_p_r,
        rho: r,
        bounds_hold,
        criterion,
        scaled_more_efficient: log_p_r < 0.0,
    })
}

impl SparsityReport {
    /// (2s)^ρ as predicted by the leaf counts:
    /// |S|·(1 + ω_st) / ((1 + ω_sc)·|L_sc|).
    pub fn identity_gap(&self) -> f64 {
        let lhs = self.rho * (2.0 * self.s as f64).ln();
        let rhs = (self.size as f64).ln() + (1.0 + self.omega_static).ln()
            - (1.0 + self.omega_scaled).ln()
            - (self.leaves_scaled as f64).ln();
        (lhs - rhs).abs()
    }

    /// R <= 1 whenever the criterion holds.
    pub fn criterion_consistent(&self) -> bool {
        !self.criterion || self.log_p_r <= 1e-9
    }
}

/// Rows for every (s, variant) on one point cloud. Points are encoded once
/// per variant; each s reuses the sorted order.
pub fn report(
    cloud: &PointCloud,
    p: Prime,
    variants: &[Variant],
    s_list: &[usize],
    k_max: usize,
    exec: Exec,
) -> Result<Vec<SparsityReport>> {
    if cloud.is_empty() {
        return Err(Error::Data("empty point cloud".into()));
    }
    let mut rows = Vec::new();
    for v in variants {
        let curve = Curve::new(p, cloud.n(), v.clone())?;
        let enc = encode_points(&curve, cloud, k_max, exec)?;
        let sorted = enc.sorted(exec);
        for &s in s_list {
            let scaled = sorted.scaled_leaves(s);
            rows.push(report_row(
                &cloud.label,
                v.name(),
                p,
                cloud.n(),
                cloud.len(),
                s,
                scaled,
                &sorted,
            )?);
        }
    }
    Ok(rows)
}

/// Average of matching rows across repetitions, keyed by (variant, s).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanRow {
    pub variant: String,
    pub s: usize,
    pub reps: usize,
    pub rho_mean: f64,
    pub rho_sd: f64,
    pub leaves_scaled_mean: f64,
    pub omega_static_mean: f64,
    pub omega_scaled_mean: f64,
}

pub fn mean_rows(rows: &[SparsityReport]) -> Vec<MeanRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in rows {
        let key = (r.variant.clone(), r.s);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(variant, s)| {
            let sel: Vec<&SparsityReport> = rows.iter().filter(|r| r.variant == variant && r.s == s).collect();
            let m = sel.len() as f64;
            let mean = |f: &dyn Fn(&SparsityReport) -> f64| sel.iter().map(|r| f(r)).sum::<f64>() / m;
            let rho_mean = mean(&|r| r.rho);
            let var = sel.iter().map(|r| (r.rho - rho_mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
            MeanRow {
                variant,
                s,
                reps: sel.len(),
                rho_mean,
                rho_sd: var.sqrt(),
                leaves_scaled_mean: mean(&|r| r.leaves_scaled as f64),
                omega_static_mean: mean(&|r| r.omega_static),
                omega_scaled_mean: mean(&|r| r.omega_scaled),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{generate, Distribution};

    #[test]
    fn omega_and_capacity() {
        assert_eq!(
            omega(LeafCounts {
                leaves: 1,
                overfilled: 1
            })
            .unwrap(),
            1.0
        );
        assert_eq!(
            omega(LeafCounts {
                leaves: 5,
                overfilled: 0
            })
            .unwrap(),
            0.0
        );
        assert!(omega(LeafCounts::default()).is_err());
        assert_eq!(capacity(4.0, 1.0), 8.0);
        assert_eq!(capacity(4.0, 0.0), 4.0);
        assert_eq!(log_capacity(400.0, 0.0, Prime::TWO), 400.0);
    }

    #[test]
    fn identical_trees_have_zero_log_ratio() {
        let l = log_capacity(12.0, 0.25, Prime::TWO);
        assert_eq!(l - l, 0.0);
        // fewer scaled leaves, no overfill on either side
        assert!(log_capacity(5f64.log2(), 0.0, Prime::TWO) - log_capacity(12.0, 0.0, Prime::TWO) < 0.0);
    }

    #[test]
    fn rows_satisfy_invariants() {
        for dist in [Distribution::Uniform, Distribution::Normal] {
            let cloud = generate(dist, 3000, 3, 5).unwrap();
            let rows = report(
                &cloud,
                Prime::TWO,
                &[Variant::Bubble, Variant::Ring],
                &[1, 2, 4, 8, 16, 64],
                20,
                Exec::Parallel,
            )
            .unwrap();
            for r in &rows {
                assert!(r.identity_gap() < 1e-9, "{r:?}");
                assert!(r.bounds_hold, "{r:?}");
                assert!(r.criterion_consistent(), "{r:?}");
                assert!((0.0..=1.0).contains(&r.rho), "{r:?}");
            }
        }
    }

    #[test]
    fn padding_dimensions_lowers_ratio() {
        let cloud = generate(Distribution::Uniform, 500, 2, 3).unwrap();
        let mut last = f64::INFINITY;
        for extra in [0, 6, 14, 30] {
            let padded = cloud.pad_zeros(extra);
            let r = report(&padded, Prime::TWO, &[Variant::Bubble], &[4], 20, Exec::Sequential).unwrap();
            assert!(r[0].log_p_r <= last + 1e-12, "extra={extra}: {}", r[0].log_p_r);
            last = r[0].log_p_r;
        }
    }
}
