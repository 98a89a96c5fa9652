//! Gray-Hilbert curves of depth k for any prime p.
//!
//! A curve index is a sequence of k limbs in [0, p^n), coarsest first. Each
//! limb picks one of the p^n sub-cells of the current cell through a
//! transformed Gray code, and the limb also moves the curve state (entry
//! point, and for p = 2 the direction) that orients the next level.
//!
//! Real coordinate vectors are written most significant axis first, so
//! `x[0]` is axis n-1 and `x[n-1]` is axis 0. This is the same order
//! [`DigitVec`]'s Display uses.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::affine::{Permutation, TransformOdd, TransformP2, Variant};
use crate::digits::{gray_decode_into, gray_encode_into, is_corner, DigitVec, Prime};
use crate::error::{Error, Result};

/// Curve parameters. The variant only affects p = 2 unless a custom
/// orientation supplies τ for odd p.
#[derive(Clone, Debug)]
pub struct CurveParams {
    pub p: Prime,
    pub n: usize,
    pub k: usize,
    pub variant: Variant,
}

impl CurveParams {
    pub fn new(p: Prime, n: usize, k: usize, variant: Variant) -> Result<CurveParams> {
        if n == 0 {
            return Err(Error::range("n", n, ">= 1"));
        }
        if k == 0 {
            return Err(Error::range("k", k, ">= 1"));
        }
        Ok(CurveParams { p, n, k, variant })
    }

    pub fn curve(&self) -> Result<Curve> {
        Curve::new(self.p, self.n, self.variant.clone())
    }

    /// (p^n)^k as a big integer.
    pub fn cell_count(&self) -> BigUint {
        BigUint::from(self.p.get()).pow((self.n * self.k) as u32)
    }
}

/// A depth-k cell address: one digit vector per level, coarsest first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellWord {
    coeffs: Vec<DigitVec>,
}

impl CellWord {
    pub fn new(coeffs: Vec<DigitVec>) -> Result<CellWord> {
        let Some(first) = coeffs.first() else {
            return Err(Error::range("k", 0, ">= 1"));
        };
        let (p, n) = (first.p(), first.n());
        if let Some(bad) = coeffs.iter().find(|c| c.p() != p || c.n() != n) {
            return Err(Error::DimensionMismatch {
                left: n,
                right: bad.n(),
            });
        }
        Ok(CellWord { coeffs })
    }

    pub fn zero(p: Prime, n: usize, k: usize) -> CellWord {
        CellWord {
            coeffs: vec![DigitVec::zero(n, p); k],
        }
    }

    pub fn coeffs(&self) -> &[DigitVec] {
        &self.coeffs
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].n()
    }

    pub fn p(&self) -> Prime {
        self.coeffs[0].p()
    }

    /// The word truncated to its first `k` levels.
    pub fn truncate(&self, k: usize) -> CellWord {
        CellWord {
            coeffs: self.coeffs[..k.min(self.k())].to_vec(),
        }
    }

    /// Integer grid coordinates in [0, p^k), indexed by axis.
    pub fn grid(&self) -> Vec<u64> {
        let p = self.p().get() as u64;
        (0..self.n())
            .map(|j| self.coeffs.iter().fold(0u64, |acc, c| acc * p + c.get(j) as u64))
            .collect()
    }
}

impl fmt::Debug for CellWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellWord{self}")
    }
}

impl fmt::Display for CellWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// A position on the depth-k curve: k limbs in [0, p^n), coarsest first.
/// Each limb is kept as its n base-p digits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveIndex {
    limbs: Vec<DigitVec>,
}

impl CurveIndex {
    pub fn new(limbs: Vec<DigitVec>) -> Result<CurveIndex> {
        CellWord::new(limbs).map(|w| CurveIndex { limbs: w.coeffs })
    }

    pub fn zero(p: Prime, n: usize, k: usize) -> CurveIndex {
        CurveIndex {
            limbs: vec![DigitVec::zero(n, p); k],
        }
    }

    pub fn from_u64_limbs(limbs: &[u64], n: usize, p: Prime) -> Result<CurveIndex> {
        let limbs = limbs
            .iter()
            .map(|&l| crate::digits::bin_digits(l, n, p))
            .collect::<Result<Vec<_>>>()?;
        CurveIndex::new(limbs)
    }

    pub fn limbs(&self) -> &[DigitVec] {
        &self.limbs
    }

    pub fn k(&self) -> usize {
        self.limbs.len()
    }

    pub fn to_u64_limbs(&self) -> Result<Vec<u64>> {
        self.limbs.iter().map(DigitVec::to_u64).collect()
    }

    pub fn to_biguint(&self) -> BigUint {
        let n = self.limbs[0].n() as u32;
        let base = BigUint::from(self.limbs[0].p().get()).pow(n);
        self.limbs
            .iter()
            .fold(BigUint::zero(), |acc, l| acc * &base + l.to_biguint())
    }

    pub fn from_biguint(v: &BigUint, p: Prime, n: usize, k: usize) -> Result<CurveIndex> {
        let base = BigUint::from(p.get()).pow(n as u32);
        if *v >= base.pow(k as u32) {
            return Err(Error::range("index", v, format!("< ({p}^{n})^{k}")));
        }
        let mut rest = v.clone();
        let mut limbs = Vec::with_capacity(k);
        for _ in 0..k {
            limbs.push(DigitVec::from_biguint(&(&rest % &base), n, p)?);
            rest /= &base;
        }
        limbs.reverse();
        CurveIndex::new(limbs)
    }

    /// All base-p digits of the index, most significant first.
    pub fn path(&self) -> Vec<u8> {
        self.limbs.iter().flat_map(|l| l.written()).collect()
    }

    /// The index one level coarser (last limb dropped).
    pub fn parent(&self) -> Option<CurveIndex> {
        (self.k() > 1).then(|| CurveIndex {
            limbs: self.limbs[..self.k() - 1].to_vec(),
        })
    }
}

impl fmt::Debug for CurveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurveIndex{self}")
    }
}

impl fmt::Display for CurveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.limbs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match l.to_u64() {
                Ok(v) => write!(f, "{v}")?,
                Err(_) => write!(f, "{}", l.to_biguint())?,
            }
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveStateP2 {
    pub eps: DigitVec,
    pub delta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveStateOdd {
    pub eps: DigitVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurveState {
    P2(CurveStateP2),
    Odd(CurveStateOdd),
}

impl CurveState {
    pub fn eps(&self) -> &DigitVec {
        match self {
            CurveState::P2(s) => &s.eps,
            CurveState::Odd(s) => &s.eps,
        }
    }
}

/// Entry point ε(i) of sub-cell i in the untransformed first iteration,
/// odd p. Axis a is p-1 exactly when the digit sum of i without digit a is
/// odd; this solves ε(i+1) = ε(i)^⊥ + (gc(i+1) - gc(i)), ε(0) = 0.
pub fn entry_point(i: u64, n: usize, p: Prime) -> Result<DigitVec> {
    if p.get() == 2 {
        return Err(Error::contract("entry_point is defined for odd p"));
    }
    let x = crate::digits::bin_digits(i, n, p)?;
    let mut out = vec![0; n];
    entry_point_into(x.digits(), p.get(), &mut out);
    Ok(DigitVec::from_raw(out, p))
}

fn entry_point_into(limb: &[u8], p: u8, out: &mut [u8]) {
    let odd_total = limb.iter().filter(|&&d| d & 1 == 1).count() & 1;
    for (o, &d) in out.iter_mut().zip(limb) {
        *o = if (odd_total ^ (d as usize & 1)) == 1 { p - 1 } else { 0 };
    }
}

/// Precomputed orientation tables for one (p, n, variant).
#[derive(Clone, Debug)]
pub struct Curve {
    p: Prime,
    n: usize,
    variant: Variant,
    /// σ_d for every direction d (p = 2 only).
    sigmas: Vec<Permutation>,
    tau: Permutation,
    tau_inv: Permutation,
}

/// Mutable curve state used on hot paths: entry point digits and direction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct RawState {
    pub e: Vec<u8>,
    pub d: usize,
}

/// Reusable buffers for bulk path encoding.
#[derive(Default)]
pub(crate) struct PathScratch {
    cells: Vec<u8>,
    st: RawState,
    y: Vec<u8>,
    limb: Vec<u8>,
    tmp: Vec<u8>,
}

impl Curve {
    pub fn new(p: Prime, n: usize, variant: Variant) -> Result<Curve> {
        if n == 0 {
            return Err(Error::range("n", n, ">= 1"));
        }
        let sigmas = if p == Prime::TWO {
            (0..n).map(|d| variant.sigma(n, d)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let tau = variant.tau(n)?;
        let tau_inv = tau.inverse();
        Ok(Curve {
            p,
            n,
            variant,
            sigmas,
            tau,
            tau_inv,
        })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    /// σ_d (p = 2).
    pub fn sigma(&self, d: usize) -> &Permutation {
        &self.sigmas[d]
    }

    /// τ (odd p).
    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    pub(crate) fn tau_inv(&self) -> &Permutation {
        &self.tau_inv
    }

    /// The curve starts at the origin. For p = 2 the first direction is
    /// n-1, whose σ is the identity, so the first level is the plain Gray
    /// code.
    pub fn initial_state(&self) -> CurveState {
        let e = DigitVec::zero(self.n, self.p);
        if self.p == Prime::TWO {
            CurveState::P2(CurveStateP2 {
                eps: e,
                delta: self.n - 1,
            })
        } else {
            CurveState::Odd(CurveStateOdd { eps: e })
        }
    }

    pub(crate) fn raw_initial(&self) -> RawState {
        RawState {
            e: vec![0; self.n],
            d: self.n - 1,
        }
    }

    fn to_raw(&self, state: &CurveState) -> Result<RawState> {
        let (e, d) = match state {
            CurveState::P2(s) if self.p == Prime::TWO => {
                if s.delta >= self.n {
                    return Err(Error::range("delta", s.delta, format!("0..{}", self.n)));
                }
                (&s.eps, s.delta)
            }
            CurveState::Odd(s) if self.p != Prime::TWO => {
                if !is_corner(&s.eps) {
                    return Err(Error::contract(format!("state {} is not a corner", s.eps)));
                }
                (&s.eps, self.n - 1)
            }
            _ => return Err(Error::contract("curve state does not match the parity of p")),
        };
        if e.n() != self.n || e.p() != self.p {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: e.n(),
            });
        }
        Ok(RawState {
            e: e.digits().to_vec(),
            d,
        })
    }

    fn state_of(&self, raw: RawState) -> CurveState {
        let eps = DigitVec::from_raw(raw.e, self.p);
        if self.p == Prime::TWO {
            CurveState::P2(CurveStateP2 { eps, delta: raw.d })
        } else {
            CurveState::Odd(CurveStateOdd { eps })
        }
    }

    /// The affine transform of a p = 2 state.
    pub fn transform_p2(&self, state: &CurveStateP2) -> Result<TransformP2> {
        TransformP2::new(state.eps.clone(), state.delta, self.sigmas[state.delta].clone())
    }

    /// The affine transform of an odd-p state.
    pub fn transform_odd(&self, state: &CurveStateOdd) -> Result<TransformOdd> {
        TransformOdd::new(state.eps.clone(), self.tau.clone())
    }

    /// y = T(x).
    pub(crate) fn forward(&self, st: &RawState, x: &[u8], y: &mut [u8]) {
        if self.p == Prime::TWO {
            let sigma = &self.sigmas[st.d];
            for (j, out) in y.iter_mut().enumerate() {
                let s = sigma.apply(j);
                *out = x[s] ^ st.e[s];
            }
        } else {
            let top = self.p.get() - 1;
            for i in 0..self.n {
                y[self.tau.apply(i)] = if st.e[i] == 0 { x[i] } else { top - x[i] };
            }
        }
    }

    /// x = T^{-1}(y).
    pub(crate) fn inverse(&self, st: &RawState, y: &[u8], x: &mut [u8]) {
        if self.p == Prime::TWO {
            let sigma = &self.sigmas[st.d];
            for (j, &v) in y.iter().enumerate() {
                let s = sigma.apply(j);
                x[s] = v ^ st.e[s];
            }
        } else {
            let top = self.p.get() - 1;
            for i in 0..self.n {
                let v = y[self.tau.apply(i)];
                x[i] = if st.e[i] == 0 { v } else { top - v };
            }
        }
    }

    /// Advance the state past sub-cell `limb` (base-p digits, least
    /// significant first). `scratch` must hold 2n bytes.
    pub(crate) fn advance(&self, st: &mut RawState, limb: &[u8], scratch: &mut [u8]) {
        let n = self.n;
        let (a, b) = scratch.split_at_mut(n);
        if self.p == Prime::TWO {
            let Some(low) = limb.iter().position(|&bit| bit == 1) else {
                // limb 0: entry unchanged, relative direction 0
                st.d = self.sigmas[st.d].apply(0);
                return;
            };
            // Relative direction: trailing ones of i for odd i, trailing
            // ones of i-1 (= trailing zeros of i) for even i.
            let rel = if low == 0 {
                limb.iter().take_while(|&&bit| bit == 1).count() % n
            } else {
                low % n
            };
            // Entry of the child: gc(2⌊(i-1)/2⌋) mapped through T^{-1}.
            a.copy_from_slice(limb);
            if low == 0 {
                a[0] = 0;
            } else {
                // i - 2: borrow from bit 1 upward
                for bit in a[1..].iter_mut() {
                    if *bit == 1 {
                        *bit = 0;
                        break;
                    }
                    *bit = 1;
                }
            }
            gray_encode_into(a, 2, b);
            self.inverse(st, b, a);
            let new_d = self.sigmas[st.d].apply(rel);
            st.e.copy_from_slice(a);
            st.d = new_d;
        } else {
            entry_point_into(limb, self.p.get(), a);
            self.inverse(st, a, b);
            st.e.copy_from_slice(b);
        }
    }

    /// The state after visiting sub-cell `limb`.
    pub fn step(&self, state: &CurveState, limb: &DigitVec) -> Result<CurveState> {
        if limb.n() != self.n || limb.p() != self.p {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: limb.n(),
            });
        }
        let mut raw = self.to_raw(state)?;
        let mut scratch = vec![0; 2 * self.n];
        self.advance(&mut raw, limb.digits(), &mut scratch);
        Ok(self.state_of(raw))
    }

    pub fn index_to_cell(&self, idx: &CurveIndex) -> Result<CellWord> {
        self.check_word(idx.limbs())?;
        let n = self.n;
        let p = self.p.get();
        let mut st = self.raw_initial();
        let mut g = vec![0; n];
        let mut scratch = vec![0; 2 * n];
        let mut coeffs = Vec::with_capacity(idx.k());
        for limb in idx.limbs() {
            gray_encode_into(limb.digits(), p, &mut g);
            let mut c = vec![0; n];
            self.inverse(&st, &g, &mut c);
            coeffs.push(DigitVec::from_raw(c, self.p));
            self.advance(&mut st, limb.digits(), &mut scratch);
        }
        Ok(CellWord { coeffs })
    }

    pub fn cell_to_index(&self, w: &CellWord) -> Result<CurveIndex> {
        self.check_word(w.coeffs())?;
        let n = self.n;
        let mut st = self.raw_initial();
        let mut y = vec![0; n];
        let mut scratch = vec![0; 2 * n];
        let mut limbs = Vec::with_capacity(w.k());
        for c in w.coeffs() {
            let mut limb = vec![0; n];
            self.limb_of(&st, c.digits(), &mut y, &mut limb);
            self.advance(&mut st, &limb, &mut scratch);
            limbs.push(DigitVec::from_raw(limb, self.p));
        }
        Ok(CurveIndex { limbs })
    }

    #[inline]
    fn limb_of(&self, st: &RawState, cell: &[u8], y: &mut [u8], limb: &mut [u8]) {
        self.forward(st, cell, y);
        gray_decode_into(y, self.p.get(), limb);
    }

    fn check_word(&self, coeffs: &[DigitVec]) -> Result<()> {
        if let Some(c) = coeffs.iter().find(|c| c.n() != self.n || c.p() != self.p) {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: c.n(),
            });
        }
        Ok(())
    }

    /// Quantize a point and append its k·n curve digits (most significant
    /// first) to `out`. This is the fused quantize + cell_to_index used for
    /// bulk encoding.
    pub fn encode_path(&self, x: &[f64], k: usize, out: &mut Vec<u8>) -> Result<()> {
        let start = out.len();
        out.resize(start + k * self.n, 0);
        let mut scratch = PathScratch::default();
        self.encode_path_into(x, k, &mut out[start..], &mut scratch)
    }

    /// As `encode_path`, writing exactly k·n digits into `out` and reusing
    /// `scratch` between calls.
    pub(crate) fn encode_path_into(
        &self,
        x: &[f64],
        k: usize,
        out: &mut [u8],
        scratch: &mut PathScratch,
    ) -> Result<()> {
        let n = self.n;
        debug_assert_eq!(out.len(), k * n);
        let PathScratch {
            cells,
            st,
            y,
            limb,
            tmp,
        } = scratch;
        cells.resize(k * n, 0);
        quantize_digits_into(x, self.p, k, cells)?;
        y.resize(n, 0);
        limb.resize(n, 0);
        tmp.resize(2 * n, 0);
        st.e.clear();
        st.e.resize(n, 0);
        st.d = n - 1;
        for (level, dst) in cells.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            self.limb_of(st, level, y, limb);
            for (o, &l) in dst.iter_mut().zip(limb.iter().rev()) {
                *o = l;
            }
            self.advance(st, limb, tmp);
        }
        Ok(())
    }

    pub fn quantize(&self, x: &[f64], k: usize) -> Result<CellWord> {
        quantize(x, self.p, k)
    }
}

/// Quantize a point of [0,1]^n (written order) to its depth-k cell. Values
/// that fall a few ulps short of a grid line are snapped onto it, and 1.0
/// lands in the top cell.
pub fn quantize(x: &[f64], p: Prime, k: usize) -> Result<CellWord> {
    let n = x.len();
    let flat = quantize_digits(x, p, k)?;
    let coeffs = flat
        .chunks_exact(n)
        .map(|c| DigitVec::from_raw(c.to_vec(), p))
        .collect();
    Ok(CellWord { coeffs })
}

/// Level-major digits: entry `λ·n + j` is digit λ of axis j.
pub(crate) fn quantize_digits(x: &[f64], p: Prime, k: usize) -> Result<Vec<u8>> {
    let mut out = vec![0u8; x.len() * k];
    quantize_digits_into(x, p, k, &mut out)?;
    Ok(out)
}

fn quantize_digits_into(x: &[f64], p: Prime, k: usize, out: &mut [u8]) -> Result<()> {
    let n = x.len();
    if n == 0 {
        return Err(Error::range("n", 0, ">= 1"));
    }
    if k == 0 {
        return Err(Error::range("k", 0, ">= 1"));
    }
    let pf = p.get() as f64;
    let top = p.get() - 1;
    for (c, &v) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::range("coordinate", v, "[0, 1]"));
        }
        let axis = n - 1 - c;
        if v >= 1.0 {
            for lvl in 0..k {
                out[lvl * n + axis] = top;
            }
            continue;
        }
        let mut r = v;
        let mut scale = pf;
        for lvl in 0..k {
            let t = r * pf;
            let mut d = t.floor();
            let tol = (4.0 * f64::EPSILON * scale).min(1e-6);
            if d + 1.0 - t <= tol {
                // within float noise of the next grid line
                d += 1.0;
                r = 0.0;
            } else {
                r = t - d;
            }
            if d >= pf {
                // snapped past the end of the unit interval
                if lvl == 0 {
                    for l in 0..k {
                        out[l * n + axis] = top;
                    }
                    break;
                }
                d = pf - 1.0;
            }
            out[lvl * n + axis] = d as u8;
            scale *= pf;
        }
    }
    Ok(())
}

/// Lower-left corner of the cell, written order.
pub fn coord(w: &CellWord) -> Vec<f64> {
    let p = w.p().get() as f64;
    (0..w.n())
        .rev()
        .map(|j| {
            let mut scale = 1.0;
            w.coeffs()
                .iter()
                .map(|c| {
                    scale /= p;
                    c.get(j) as f64 * scale
                })
                .sum()
        })
        .collect()
}

/// p^{-ℓ} where ℓ is the first level at which the words differ, 0 if equal.
pub fn padic_distance(a: &CellWord, b: &CellWord) -> Result<f64> {
    if a.n() != b.n() || a.k() != b.k() || a.p() != b.p() {
        return Err(Error::contract("cell words have different parameters"));
    }
    Ok(match a.coeffs().iter().zip(b.coeffs()).position(|(x, y)| x != y) {
        Some(l) => (a.p().get() as f64).powi(-(l as i32)),
        None => 0.0,
    })
}

/// Every index of the depth-k curve in order. Only for tiny parameters.
pub fn all_indices(p: Prime, n: usize, k: usize) -> Result<impl Iterator<Item = CurveIndex>> {
    let total = p
        .checked_pow(n * k)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::range("p^(nk)", format!("{p}^{}", n * k), "<= 2^24"))?;
    let base = p.checked_pow(n).expect("p^n fits");
    Ok((0..total).map(move |mut i| {
        let mut limbs = vec![0u64; k];
        for l in limbs.iter_mut().rev() {
            *l = i % base;
            i /= base;
        }
        CurveIndex::from_u64_limbs(&limbs, n, p).expect("limbs in range")
    }))
}

/// The index just past the end of a depth-k curve, (p^n)^k.
pub fn index_end(p: Prime, n: usize, k: usize) -> BigUint {
    let mut v = BigUint::one();
    for _ in 0..n * k {
        v *= p.get();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{transformed_gray, GrayTransform};
    use crate::digits::{bin_digits, gray_encode};

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    fn w(digits: &[u8], pr: u32) -> DigitVec {
        DigitVec::from_written(digits, p(pr)).unwrap()
    }

    fn curve(pr: u32, n: usize, v: Variant) -> Curve {
        Curve::new(p(pr), n, v).unwrap()
    }

    #[test]
    fn entry_point_examples() {
        assert_eq!(entry_point(0, 2, p(3)).unwrap(), w(&[0, 0], 3));
        assert_eq!(entry_point(1, 2, p(3)).unwrap(), w(&[2, 0], 3));
        for (pr, n) in [(3, 3), (5, 2), (7, 2)] {
            let size = p(pr).checked_pow(n).unwrap();
            for i in 0..size {
                assert!(is_corner(&entry_point(i, n, p(pr)).unwrap()));
            }
            // the last sub-cell is entered at the origin, so it exits at d
            assert_eq!(entry_point(size - 1, n, p(pr)).unwrap(), DigitVec::zero(n, p(pr)));
        }
    }

    #[test]
    fn entry_point_recursion() {
        // ε(i+1) = ε(i)^⊥ + (gc(i+1) - gc(i))
        for (pr, n) in [(3, 3), (5, 3), (7, 2)] {
            let pr = p(pr);
            let size = pr.checked_pow(n).unwrap();
            for i in 0..size - 1 {
                let a = gray_encode(&bin_digits(i, n, pr).unwrap());
                let b = gray_encode(&bin_digits(i + 1, n, pr).unwrap());
                let step = b.sub(&a).unwrap();
                let prev = crate::digits::opposite(&entry_point(i, n, pr).unwrap());
                assert_eq!(entry_point(i + 1, n, pr).unwrap(), prev.add(&step).unwrap());
            }
        }
    }

    #[test]
    fn sub_cell_entry_and_exit_are_adjacent() {
        // The exit of sub-cell i (opposite of its entry, inside that cell)
        // neighbours the entry of sub-cell i+1 across their shared face.
        let (pr, n) = (p(3), 2);
        let size = pr.checked_pow(n).unwrap();
        let grid = |i: u64, corner: &DigitVec| -> Vec<i64> {
            let cell = gray_encode(&bin_digits(i, n, pr).unwrap());
            (0..n).map(|j| cell.get(j) as i64 * 3 + corner.get(j) as i64).collect()
        };
        for i in 0..size - 1 {
            let exit = crate::digits::opposite(&entry_point(i, n, pr).unwrap());
            let next = entry_point(i + 1, n, pr).unwrap();
            let a = grid(i, &exit);
            let b = grid(i + 1, &next);
            let dist: i64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
            assert_eq!(dist, 1, "i={i}");
        }
    }

    #[test]
    fn p2_state_examples() {
        let c = curve(2, 2, Variant::Bubble);
        let s0 = c.initial_state();
        let s = c.step(&s0, &w(&[0, 0], 2)).unwrap();
        assert_eq!(s.eps(), &w(&[0, 0], 2));
        let CurveState::P2(s) = c.step(&s0, &w(&[0, 1], 2)).unwrap() else {
            panic!()
        };
        // trailing ones of bin(1) is 1, the identity σ keeps axis 1
        assert_eq!(s.delta, 1);
        let s = c.step(&s0, &w(&[1, 0], 2)).unwrap();
        assert_eq!(s.eps(), &w(&[0, 0], 2));
    }

    #[test]
    fn odd_state_examples() {
        let c = curve(3, 2, Variant::Bubble);
        let s0 = c.initial_state();
        assert_eq!(c.step(&s0, &w(&[0, 0], 3)).unwrap().eps(), &w(&[0, 0], 3));
        assert_eq!(c.step(&s0, &w(&[0, 1], 3)).unwrap().eps(), &w(&[2, 0], 3));
        let mut s = s0;
        for i in [1u64, 5, 7, 3, 8, 4] {
            s = c.step(&s, &bin_digits(i, 2, p(3)).unwrap()).unwrap();
            assert!(is_corner(s.eps()));
        }
        assert!(c.step(&c.initial_state(), &w(&[0, 0, 0], 3)).is_err());
    }

    #[test]
    fn index_to_cell_matches_explicit_transforms() {
        // Level by level, the fused path equals T_state^{-1}(gc(limb)) built
        // through the affine module, with the state advanced by `step`.
        let cases: [(u32, usize, Variant); 4] = [
            (2, 3, Variant::Bubble),
            (2, 4, Variant::Ring),
            (3, 2, Variant::Bubble),
            (5, 3, Variant::Ring),
        ];
        for (pr, n, v) in cases {
            let c = curve(pr, n, v);
            let base = p(pr).checked_pow(n).unwrap();
            let limbs: Vec<u64> = (0..7u64).map(|i| (i * 2654435761) % base).collect();
            let idx = CurveIndex::from_u64_limbs(&limbs, n, p(pr)).unwrap();
            let cells = c.index_to_cell(&idx).unwrap();
            let mut s = c.initial_state();
            for (limb, cell) in idx.limbs().iter().zip(cells.coeffs()) {
                let want = match &s {
                    CurveState::P2(sp) => transformed_gray(&c.transform_p2(sp).unwrap(), limb),
                    CurveState::Odd(so) => transformed_gray(&c.transform_odd(so).unwrap(), limb),
                }
                .unwrap();
                assert_eq!(cell, &want);
                if let CurveState::Odd(so) = &s {
                    let t = c.transform_odd(so).unwrap();
                    let e = entry_point(limb.to_u64().unwrap(), n, p(pr)).unwrap();
                    let next = c.step(&s, limb).unwrap();
                    assert_eq!(next.eps(), &t.apply_inv(&e).unwrap());
                }
                s = c.step(&s, limb).unwrap();
            }
        }
    }

    #[test]
    fn first_iteration_is_gray_order() {
        for v in [Variant::Bubble, Variant::Ring] {
            let c = curve(2, 2, v);
            let cells: Vec<String> = all_indices(Prime::TWO, 2, 1)
                .unwrap()
                .map(|i| c.index_to_cell(&i).unwrap().coeffs()[0].to_string())
                .collect();
            assert_eq!(cells, ["(0,0)", "(0,1)", "(1,1)", "(1,0)"]);
        }
        let c = curve(2, 2, Variant::Bubble);
        let idx = c.cell_to_index(&CellWord::new(vec![w(&[1, 0], 2)]).unwrap()).unwrap();
        assert_eq!(idx.to_u64_limbs().unwrap(), vec![3]);
        assert_eq!(
            c.cell_to_index(&CellWord::zero(Prime::TWO, 2, 3)).unwrap(),
            CurveIndex::zero(Prime::TWO, 2, 3)
        );
    }

    fn check_locality(pr: u32, n: usize, k: usize, v: Variant) {
        let c = curve(pr, n, v);
        let mut prev: Option<Vec<u64>> = None;
        let mut seen = std::collections::HashSet::new();
        for idx in all_indices(p(pr), n, k).unwrap() {
            let cell = c.index_to_cell(&idx).unwrap();
            assert_eq!(c.cell_to_index(&cell).unwrap(), idx);
            let g = cell.grid();
            if let Some(q) = &prev {
                let diff: u64 = g.iter().zip(q).map(|(a, b)| a.abs_diff(*b)).sum();
                assert_eq!(diff, 1, "p={pr} n={n} k={k} at {idx}");
            } else {
                assert!(g.iter().all(|&x| x == 0));
            }
            assert!(seen.insert(g.clone()));
            prev = Some(g);
        }
    }

    #[test]
    fn locality_small() {
        for v in [Variant::Bubble, Variant::Ring] {
            check_locality(2, 2, 3, v.clone());
            check_locality(2, 3, 2, v.clone());
            check_locality(3, 2, 2, v.clone());
            check_locality(3, 3, 1, v.clone());
            check_locality(5, 2, 1, v);
        }
    }

    #[test]
    fn odd_end_of_curve_is_d() {
        for (pr, n, k) in [(3, 2, 2), (5, 2, 1), (3, 3, 1)] {
            let c = curve(pr, n, Variant::Bubble);
            let last = all_indices(p(pr), n, k).unwrap().last().unwrap();
            let cell = c.index_to_cell(&last).unwrap();
            assert_eq!(cell.coeffs()[0], DigitVec::all_max(n, p(pr)));
        }
    }

    #[test]
    fn coord_examples() {
        let word = CellWord::new(vec![w(&[1, 0], 2), w(&[0, 1], 2)]).unwrap();
        assert_eq!(coord(&word), vec![0.5, 0.25]);
        assert_eq!(coord(&CellWord::zero(Prime::TWO, 3, 2)), vec![0.0; 3]);
    }

    #[test]
    fn quantize_examples() {
        let q = quantize(&[0.6, 0.3], Prime::TWO, 2).unwrap();
        assert_eq!(q, CellWord::new(vec![w(&[1, 0], 2), w(&[0, 1], 2)]).unwrap());
        assert_eq!(
            quantize(&[0.0, 0.0], Prime::TWO, 3).unwrap(),
            CellWord::zero(Prime::TWO, 2, 3)
        );
        let top = quantize(&[1.0, 0.0], p(3), 2).unwrap();
        assert_eq!(top.coeffs()[0], w(&[2, 0], 3));
        assert_eq!(top.coeffs()[1], w(&[2, 0], 3));
        assert!(quantize(&[1.5, 0.0], p(3), 2).is_err());
        assert!(quantize(&[f64::NAN], p(3), 2).is_err());
    }

    #[test]
    fn quantize_snaps_float_noise() {
        // (5.1 - 4.3) / (7.9 - 4.3) is 2/9 exactly, a hair low in floats
        let v = (5.1 - 4.3) / (7.9 - 4.3);
        let exact = 2.0 / 9.0;
        assert_eq!(
            quantize(&[v], Prime::TWO, 20).unwrap(),
            quantize(&[exact], Prime::TWO, 20).unwrap()
        );
        let half = 0.5 - f64::EPSILON;
        assert_eq!(quantize(&[half], Prime::TWO, 1).unwrap().coeffs()[0].get(0), 1);
        // genuinely distinct values are kept apart
        assert_eq!(quantize(&[0.5 - 1e-9], Prime::TWO, 1).unwrap().coeffs()[0].get(0), 0);
    }

    #[test]
    fn coord_of_quantize_is_lower_corner() {
        let pr = p(3);
        let x = [0.31, 0.77, 0.05];
        let q = quantize(&x, pr, 4).unwrap();
        let c = coord(&q);
        let side = 3f64.powi(-4);
        for (a, b) in c.iter().zip(&x) {
            assert!(*a <= *b && *b < a + side);
        }
    }

    #[test]
    fn padic_distance_examples() {
        let a = CellWord::new(vec![w(&[1, 0], 3), w(&[0, 0], 3), w(&[2, 2], 3)]).unwrap();
        let b = CellWord::new(vec![w(&[1, 0], 3), w(&[0, 0], 3), w(&[2, 1], 3)]).unwrap();
        assert_eq!(padic_distance(&a, &a).unwrap(), 0.0);
        assert!((padic_distance(&a, &b).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn biguint_index_round_trip() {
        let idx = CurveIndex::from_u64_limbs(&[3, 0, 7, 1], 3, Prime::TWO).unwrap();
        let v = idx.to_biguint();
        assert_eq!(v, BigUint::from(3u32 * 512 + 7 * 8 + 1));
        assert_eq!(CurveIndex::from_biguint(&v, Prime::TWO, 3, 4).unwrap(), idx);
        assert!(CurveIndex::from_biguint(&index_end(Prime::TWO, 3, 4), Prime::TWO, 3, 4).is_err());
        assert_eq!(idx.path(), vec![0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn encode_path_matches_cell_to_index() {
        for (pr, n) in [(2, 3), (3, 2), (5, 4)] {
            for v in [Variant::Bubble, Variant::Ring] {
                let c = curve(pr, n, v);
                let x: Vec<f64> = (0..n).map(|j| (j as f64 * 0.37 + 0.11) % 1.0).collect();
                let mut path = Vec::new();
                c.encode_path(&x, 6, &mut path).unwrap();
                let want = c.cell_to_index(&c.quantize(&x, 6).unwrap()).unwrap().path();
                assert_eq!(path, want);
            }
        }
    }
}
