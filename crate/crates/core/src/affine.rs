//! Affine maps that move and reorient Gray-code pieces.
//!
//! For p = 2 a transform is T(x) = (x + e)^σ, where (x^σ)_j = x_{σ(j)} and
//! σ(n-1) = d. For odd p it is T(x) = A(x - e) with e a corner and A a signed
//! permutation: A e_i = -e_{τ(i)} if e_i = p-1, else +e_{τ(i)}.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digits::{gray_decode, gray_encode, is_corner, opposite, DigitVec, Prime};
use crate::error::{Error, Result};

/// Largest n for which transform families are enumerated.
pub const ENUMERATE_MAX_N: usize = 6;

/// A permutation of {0, ..., n-1}, stored as the image of each index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Permutation> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || std::mem::replace(&mut seen[m], true) {
                return Err(Error::contract(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (j, &m) in self.0.iter().enumerate() {
            inv[m] = j;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &m)| j == m)
    }

    /// All n! permutations in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(Permutation)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{:?}", self.0)
    }
}

fn check_axis(n: usize, d: usize) -> Result<()> {
    if n == 0 || d >= n {
        return Err(Error::range("d", d, format!("0..{n}")));
    }
    Ok(())
}

/// Pull axis d to the front of the coordinate list: σ(n-1) = d,
/// σ(j) = j + 1 for d <= j < n-1, σ(j) = j below d.
pub fn bubble_perm(n: usize, d: usize) -> Result<Permutation> {
    check_axis(n, d)?;
    let map = (0..n)
        .map(|j| {
            if j == n - 1 {
                d
            } else if j >= d {
                j + 1
            } else {
                j
            }
        })
        .collect();
    Ok(Permutation(map))
}

/// Rotate the ring of axes: σ(j) = (j + d + 1) mod n.
pub fn ring_perm(n: usize, d: usize) -> Result<Permutation> {
    check_axis(n, d)?;
    Ok(Permutation((0..n).map(|j| (j + d + 1) % n).collect()))
}

/// Supplies the axis permutations of a curve family.
pub trait Orientation: Send + Sync + fmt::Debug {
    /// σ_d for p = 2. Must satisfy σ(n-1) = d.
    fn sigma(&self, n: usize, d: usize) -> Permutation;

    /// τ for odd p.
    fn tau(&self, n: usize) -> Permutation {
        Permutation::identity(n)
    }
}

#[derive(Clone, Debug, Default)]
pub enum Variant {
    #[default]
    Bubble,
    Ring,
    Custom(Arc<dyn Orientation>),
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Bubble => "bubble",
            Variant::Ring => "ring",
            Variant::Custom(_) => "custom",
        }
    }

    pub fn sigma(&self, n: usize, d: usize) -> Result<Permutation> {
        let s = match self {
            Variant::Bubble => bubble_perm(n, d)?,
            Variant::Ring => ring_perm(n, d)?,
            Variant::Custom(o) => {
                check_axis(n, d)?;
                let s = Permutation::new(o.sigma(n, d).0)?;
                if s.len() != n || s.apply(n - 1) != d {
                    return Err(Error::contract(format!(
                        "custom σ for d={d} must map n-1 to d, got {s:?}"
                    )));
                }
                s
            }
        };
        Ok(s)
    }

    pub fn tau(&self, n: usize) -> Result<Permutation> {
        match self {
            Variant::Custom(o) => {
                let t = Permutation::new(o.tau(n).0)?;
                if t.len() != n {
                    return Err(Error::DimensionMismatch {
                        left: t.len(),
                        right: n,
                    });
                }
                Ok(t)
            }
            _ => Ok(Permutation::identity(n)),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "bubble" => Ok(Variant::Bubble),
            "ring" => Ok(Variant::Ring),
            _ => Err(Error::range("variant", s, "bubble or ring")),
        }
    }
}

/// Common interface of the two transform families.
pub trait GrayTransform {
    fn entry(&self) -> &DigitVec;
    fn apply(&self, x: &DigitVec) -> Result<DigitVec>;
    fn apply_inv(&self, y: &DigitVec) -> Result<DigitVec>;
}

/// T^{-1}(gc(x)).
pub fn transformed_gray<T: GrayTransform + ?Sized>(t: &T, x: &DigitVec) -> Result<DigitVec> {
    t.apply_inv(&gray_encode(x))
}

/// gc^{-1}(T(y)).
pub fn transformed_gray_inv<T: GrayTransform + ?Sized>(t: &T, y: &DigitVec) -> Result<DigitVec> {
    Ok(gray_decode(&t.apply(y)?))
}

fn check_dim(want: usize, x: &DigitVec) -> Result<()> {
    if x.n() != want {
        return Err(Error::DimensionMismatch {
            left: want,
            right: x.n(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformP2 {
    e: DigitVec,
    d: usize,
    sigma: Permutation,
}

impl TransformP2 {
    pub fn new(e: DigitVec, d: usize, sigma: Permutation) -> Result<TransformP2> {
        if e.p() != Prime::TWO {
            return Err(Error::contract("TransformP2 requires p = 2"));
        }
        let n = e.n();
        check_axis(n, d)?;
        if sigma.len() != n {
            return Err(Error::DimensionMismatch {
                left: sigma.len(),
                right: n,
            });
        }
        if sigma.apply(n - 1) != d {
            return Err(Error::contract(format!("σ(n-1) must equal d = {d}")));
        }
        Ok(TransformP2 { e, d, sigma })
    }

    pub fn with_variant(e: DigitVec, d: usize, variant: &Variant) -> Result<TransformP2> {
        let sigma = variant.sigma(e.n(), d)?;
        TransformP2::new(e, d, sigma)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }
}

impl GrayTransform for TransformP2 {
    fn entry(&self) -> &DigitVec {
        &self.e
    }

    fn apply(&self, x: &DigitVec) -> Result<DigitVec> {
        check_dim(self.e.n(), x)?;
        let (xd, ed) = (x.digits(), self.e.digits());
        let y = (0..x.n())
            .map(|j| {
                let s = self.sigma.apply(j);
                xd[s] ^ ed[s]
            })
            .collect();
        Ok(DigitVec::from_raw(y, Prime::TWO))
    }

    fn apply_inv(&self, y: &DigitVec) -> Result<DigitVec> {
        check_dim(self.e.n(), y)?;
        let (yd, ed) = (y.digits(), self.e.digits());
        let mut x = vec![0; y.n()];
        for (j, &v) in yd.iter().enumerate() {
            let s = self.sigma.apply(j);
            x[s] = v ^ ed[s];
        }
        Ok(DigitVec::from_raw(x, Prime::TWO))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformOdd {
    e: DigitVec,
    tau: Permutation,
}

impl TransformOdd {
    pub fn new(e: DigitVec, tau: Permutation) -> Result<TransformOdd> {
        if e.p().get().is_multiple_of(2) {
            return Err(Error::contract("TransformOdd requires an odd prime"));
        }
        if !is_corner(&e) {
            return Err(Error::contract(format!("entry point {e} is not a corner")));
        }
        if tau.len() != e.n() {
            return Err(Error::DimensionMismatch {
                left: tau.len(),
                right: e.n(),
            });
        }
        let t = TransformOdd { e, tau };
        if t.e.n() <= 8 {
            debug_assert!(validate_membership(&t.to_affine()));
        }
        Ok(t)
    }

    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    /// The inverse map, itself a member of the family with base point
    /// b_m = e_{τ^{-1}(m)} and permutation τ^{-1}.
    pub fn inverse(&self) -> TransformOdd {
        let inv = self.tau.inverse();
        let b = (0..self.e.n()).map(|m| self.e.get(inv.apply(m))).collect();
        TransformOdd {
            e: DigitVec::from_raw(b, self.e.p()),
            tau: inv,
        }
    }

    /// The explicit matrix form A(x - e).
    pub fn to_affine(&self) -> AffineMap {
        let n = self.e.n();
        let p = self.e.p().get();
        let mut a = vec![vec![0u8; n]; n];
        for i in 0..n {
            a[self.tau.apply(i)][i] = if self.e.get(i) == 0 { 1 } else { p - 1 };
        }
        AffineMap {
            p: self.e.p(),
            a,
            e: self.e.clone(),
        }
    }
}

impl GrayTransform for TransformOdd {
    fn entry(&self) -> &DigitVec {
        &self.e
    }

    fn apply(&self, x: &DigitVec) -> Result<DigitVec> {
        check_dim(self.e.n(), x)?;
        let top = x.p().get() - 1;
        let mut y = vec![0; x.n()];
        for (i, (&xi, &ei)) in x.digits().iter().zip(self.e.digits()).enumerate() {
            y[self.tau.apply(i)] = if ei == 0 { xi } else { top - xi };
        }
        Ok(DigitVec::from_raw(y, x.p()))
    }

    fn apply_inv(&self, y: &DigitVec) -> Result<DigitVec> {
        check_dim(self.e.n(), y)?;
        let top = y.p().get() - 1;
        let x = self
            .e
            .digits()
            .iter()
            .enumerate()
            .map(|(i, &ei)| {
                let v = y.get(self.tau.apply(i));
                if ei == 0 {
                    v
                } else {
                    top - v
                }
            })
            .collect();
        Ok(DigitVec::from_raw(x, y.p()))
    }
}

/// A general affine map x -> A(x - e) over F_p, used to check membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub p: Prime,
    /// Row-major: `a[row][col]`.
    pub a: Vec<Vec<u8>>,
    pub e: DigitVec,
}

impl AffineMap {
    pub fn apply(&self, x: &DigitVec) -> Result<DigitVec> {
        let diff = x.sub(&self.e)?;
        let p = self.p.get() as u32;
        let y = self
            .a
            .iter()
            .map(|row| {
                let s: u32 = row.iter().zip(diff.digits()).map(|(&a, &v)| a as u32 * v as u32).sum();
                (s % p) as u8
            })
            .collect();
        Ok(DigitVec::from_raw(y, self.p))
    }
}

const SAMPLED_CORNERS: usize = 4096;

/// Check that `t` belongs to the transform family of its base point:
/// T(e) = 0, T(e^⊥) = d, corners map to corners, and every unit step
/// e_i maps to a signed unit step ±e_{τ(i)} for a permutation τ.
pub fn validate_membership(t: &AffineMap) -> bool {
    let n = t.e.n();
    let p = t.p.get();
    if t.e.p() != t.p || t.a.len() != n || t.a.iter().any(|r| r.len() != n) {
        return false;
    }
    if !is_corner(&t.e) {
        return false;
    }
    // Columns must be signed unit vectors on distinct rows.
    let mut rows_hit = vec![false; n];
    for col in 0..n {
        let nonzero: Vec<usize> = (0..n).filter(|&r| t.a[r][col] != 0).collect();
        if nonzero.len() != 1 {
            return false;
        }
        let r = nonzero[0];
        let v = t.a[r][col];
        if (v != 1 && v != p - 1) || std::mem::replace(&mut rows_hit[r], true) {
            return false;
        }
    }
    let Ok(at_e) = t.apply(&t.e) else { return false };
    let Ok(at_perp) = t.apply(&opposite(&t.e)) else {
        return false;
    };
    if at_e != DigitVec::zero(n, t.p) || at_perp != DigitVec::all_max(n, t.p) {
        return false;
    }
    let corner = |bits: &dyn Fn(usize) -> bool| {
        let digits = (0..n).map(|j| if bits(j) { p - 1 } else { 0 }).collect();
        DigitVec::from_raw(digits, t.p)
    };
    let maps_to_corner = |c: DigitVec| t.apply(&c).map(|y| is_corner(&y)).unwrap_or(false);
    if n <= 12 {
        (0u32..1 << n).all(|m| maps_to_corner(corner(&|j| m >> j & 1 == 1)))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..SAMPLED_CORNERS).all(|_| {
            let bits: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            maps_to_corner(corner(&|j| bits[j]))
        })
    }
}

fn guard_n(n: usize) -> Result<()> {
    if n > ENUMERATE_MAX_N {
        return Err(Error::range("n", n, format!("<= {ENUMERATE_MAX_N} for enumeration")));
    }
    Ok(())
}

/// All (n-1)! transforms T_{(e,d)}: every σ with σ(n-1) = d.
pub fn enumerate_p2(e: &DigitVec, d: usize) -> Result<Vec<TransformP2>> {
    let n = e.n();
    guard_n(n)?;
    check_axis(n, d)?;
    Permutation::all(n)
        .filter(|s| s.apply(n - 1) == d)
        .map(|s| TransformP2::new(e.clone(), d, s))
        .collect()
}

/// All n! members of the odd-p family with base point e.
pub fn enumerate_odd(e: &DigitVec) -> Result<Vec<TransformOdd>> {
    guard_n(e.n())?;
    Permutation::all(e.n())
        .map(|t| TransformOdd::new(e.clone(), t))
        .collect()
}
