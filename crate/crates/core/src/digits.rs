//! Digit vectors over F_p^n and the reflected p-ary Gray code.
//!
//! A [`DigitVec`] stores digit `j` (the coefficient of p^j, and coordinate
//! axis `j`) at `digits[j]`. Display and [`DigitVec::from_written`] use the
//! written order, most significant digit first.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A small prime, validated by trial division.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u8);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u32) -> Result<Prime> {
        if !(2..=251).contains(&p) {
            return Err(Error::range("p", p, "a prime in 2..=251"));
        }
        let mut q = 2;
        while q * q <= p {
            if p.is_multiple_of(q) {
                return Err(Error::range("p", p, "a prime in 2..=251"));
            }
            q += 1;
        }
        Ok(Prime(p as u8))
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    /// p^n if it fits in a u64.
    pub fn checked_pow(self, n: usize) -> Option<u64> {
        let n = u32::try_from(n).ok()?;
        (self.0 as u64).checked_pow(n)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitVec {
    p: Prime,
    digits: Vec<u8>,
}

impl DigitVec {
    pub fn zero(n: usize, p: Prime) -> DigitVec {
        DigitVec { p, digits: vec![0; n] }
    }

    /// The vector d = (p-1, ..., p-1).
    pub fn all_max(n: usize, p: Prime) -> DigitVec {
        DigitVec {
            p,
            digits: vec![p.get() - 1; n],
        }
    }

    /// Standard unit vector e_axis.
    pub fn unit(n: usize, p: Prime, axis: usize) -> DigitVec {
        let mut v = DigitVec::zero(n, p);
        v.digits[axis] = 1;
        v
    }

    /// Build from digits stored least significant first.
    pub fn from_digits(digits: Vec<u8>, p: Prime) -> Result<DigitVec> {
        if digits.is_empty() {
            return Err(Error::range("n", 0, ">= 1"));
        }
        if let Some(&bad) = digits.iter().find(|&&d| d >= p.get()) {
            return Err(Error::range("digit", bad, format!("< {p}")));
        }
        Ok(DigitVec { p, digits })
    }

    /// Build from digits written most significant first, e.g. `[1, 0]` is
    /// the vector with x_1 = 1, x_0 = 0.
    pub fn from_written(written: &[u8], p: Prime) -> Result<DigitVec> {
        let mut digits = written.to_vec();
        digits.reverse();
        DigitVec::from_digits(digits, p)
    }

    pub(crate) fn from_raw(digits: Vec<u8>, p: Prime) -> DigitVec {
        debug_assert!(digits.iter().all(|&d| d < p.get()));
        DigitVec { p, digits }
    }

    #[inline]
    pub fn p(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.digits.len()
    }

    #[inline]
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }

    #[inline]
    pub fn get(&self, j: usize) -> u8 {
        self.digits[j]
    }

    /// Digits most significant first.
    pub fn written(&self) -> Vec<u8> {
        self.digits.iter().rev().copied().collect()
    }

    /// The integer with these base-p digits, if it fits in a u64.
    pub fn to_u64(&self) -> Result<u64> {
        digits_value(self)
    }

    pub fn to_biguint(&self) -> BigUint {
        let p = BigUint::from(self.p.get());
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &p + BigUint::from(d))
    }

    pub fn from_biguint(v: &BigUint, n: usize, p: Prime) -> Result<DigitVec> {
        let pb = BigUint::from(p.get());
        let mut rest = v.clone();
        let mut digits = Vec::with_capacity(n);
        for _ in 0..n {
            let d = (&rest % &pb).to_u8().expect("digit below p");
            digits.push(d);
            rest /= &pb;
        }
        if !rest.is_zero() {
            return Err(Error::range("index", v, format!("< {p}^{n}")));
        }
        Ok(DigitVec { p, digits })
    }

    fn check_same_shape(&self, other: &DigitVec) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        if self.p != other.p {
            return Err(Error::contract(format!("prime mismatch: {} vs {}", self.p, other.p)));
        }
        Ok(())
    }

    /// Componentwise sum mod p.
    pub fn add(&self, other: &DigitVec) -> Result<DigitVec> {
        self.check_same_shape(other)?;
        let p = self.p.get() as u16;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p) as u8)
            .collect();
        Ok(DigitVec::from_raw(digits, self.p))
    }

    /// Componentwise difference mod p.
    pub fn sub(&self, other: &DigitVec) -> Result<DigitVec> {
        self.check_same_shape(other)?;
        let p = self.p.get() as u16;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| ((a as u16 + p - b as u16) % p) as u8)
            .collect();
        Ok(DigitVec::from_raw(digits, self.p))
    }

    /// Multiply every component by -1 mod p.
    pub fn neg(&self) -> DigitVec {
        let p = self.p.get();
        let digits = self.digits.iter().map(|&d| (p - d) % p).collect();
        DigitVec::from_raw(digits, self.p)
    }
}

impl fmt::Debug for DigitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitVec[p={}]{}", self.p, self)
    }
}

impl fmt::Display for DigitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, d) in self.digits.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

/// The n base-p digits of `i`, least significant first.
pub fn bin_digits(i: u64, n: usize, p: Prime) -> Result<DigitVec> {
    if n == 0 {
        return Err(Error::range("n", 0, ">= 1"));
    }
    if let Some(size) = p.checked_pow(n) {
        if i >= size {
            return Err(Error::range("i", i, format!("< {p}^{n}")));
        }
    }
    let mut digits = vec![0u8; n];
    let pp = p.get() as u64;
    let mut rest = i;
    for d in digits.iter_mut() {
        if rest == 0 {
            break;
        }
        *d = (rest % pp) as u8;
        rest /= pp;
    }
    Ok(DigitVec::from_raw(digits, p))
}

pub fn digits_value(x: &DigitVec) -> Result<u64> {
    let p = x.p.get() as u64;
    x.digits.iter().rev().try_fold(0u64, |acc, &d| {
        acc.checked_mul(p)
            .and_then(|v| v.checked_add(d as u64))
            .ok_or_else(|| Error::range("digits_value", x, "< 2^64"))
    })
}

/// Reflected Gray encoding of digits stored least significant first,
/// written into `out`.
pub(crate) fn gray_encode_into(x: &[u8], p: u8, out: &mut [u8]) {
    let mut flip = false;
    for j in (0..x.len()).rev() {
        let g = if flip { p - 1 - x[j] } else { x[j] };
        out[j] = g;
        flip ^= g & 1 == 1;
    }
}

pub(crate) fn gray_decode_into(g: &[u8], p: u8, out: &mut [u8]) {
    if p == 2 {
        let mut acc = 0u8;
        for j in (0..g.len()).rev() {
            acc ^= g[j];
            out[j] = acc;
        }
    } else {
        gray_encode_into(g, p, out);
    }
}

pub fn gray_encode(x: &DigitVec) -> DigitVec {
    let mut out = vec![0; x.n()];
    gray_encode_into(&x.digits, x.p.get(), &mut out);
    DigitVec::from_raw(out, x.p)
}

pub fn gray_decode(g: &DigitVec) -> DigitVec {
    let mut out = vec![0; g.n()];
    gray_decode_into(&g.digits, g.p.get(), &mut out);
    DigitVec::from_raw(out, g.p)
}

/// x^⊥ = d - x.
pub fn opposite(x: &DigitVec) -> DigitVec {
    let top = x.p.get() - 1;
    DigitVec::from_raw(x.digits.iter().map(|&d| top - d).collect(), x.p)
}

pub fn is_corner(x: &DigitVec) -> bool {
    let top = x.p.get() - 1;
    x.digits.iter().all(|&d| d == 0 || d == top)
}

pub fn hamming(x: &DigitVec, y: &DigitVec) -> Result<usize> {
    x.check_same_shape(y)?;
    Ok(x.digits.iter().zip(&y.digits).filter(|(a, b)| a != b).count())
}

/// Number of consecutive digits equal to `target`, counting up from index 0.
pub fn trailing_count(x: &DigitVec, target: u8) -> usize {
    x.digits.iter().take_while(|&&d| d == target).count()
}

/// The step gc(bin(i+1)) - gc(bin(i)) as (axis, sign).
pub fn gray_delta(i: u64, n: usize, p: Prime) -> Result<(usize, i8)> {
    let x = bin_digits(i, n, p)?;
    let top = p.get() - 1;
    let axis = trailing_count(&x, top);
    if axis == n {
        return Err(Error::range("i", i, format!("< {p}^{n} - 1")));
    }
    // Only digit `axis` changes; its sign is set by the complement flag
    // accumulated from the Gray digits above it.
    let g = gray_encode(&x);
    let flip = g.digits[axis + 1..].iter().filter(|&&d| d & 1 == 1).count() & 1 == 1;
    Ok((axis, if flip { -1 } else { 1 }))
}

/// Packed fast path for p = 2 with up to 128 digits per word.
pub mod binary {
    use super::{DigitVec, Prime};

    pub fn pack(x: &DigitVec) -> Option<u128> {
        if x.p() != Prime::TWO || x.n() > 128 {
            return None;
        }
        Some(
            x.digits()
                .iter()
                .enumerate()
                .fold(0u128, |w, (j, &b)| w | ((b as u128) << j)),
        )
    }

    pub fn unpack(w: u128, n: usize) -> DigitVec {
        assert!(n <= 128);
        let digits = (0..n).map(|j| ((w >> j) & 1) as u8).collect();
        DigitVec::from_raw(digits, Prime::TWO)
    }

    #[inline]
    pub fn gray_encode(w: u128) -> u128 {
        w ^ (w >> 1)
    }

    #[inline]
    pub fn gray_decode(mut g: u128) -> u128 {
        let mut shift = 1;
        while shift < 128 {
            g ^= g >> shift;
            shift <<= 1;
        }
        g
    }

    #[inline]
    pub fn trailing_ones(w: u128) -> u32 {
        w.trailing_ones()
    }
}
