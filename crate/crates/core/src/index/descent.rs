//! Digit-by-digit tree descent.
//!
//! A tree level splits one coordinate axis. Level λ·n + m produces digit
//! n-1-m of limb λ, so the digits come out in curve order. The axis split
//! at each level is read off the current curve state: σ_δ(j) for p = 2 and
//! τ^{-1}(j) for odd p. The Gray decode runs along with a complement flag,
//! and after n digits the finished limb advances the curve state.

use crate::curve::{quantize_digits, Curve, RawState};
use crate::digits::Prime;
use crate::error::Result;

pub struct Descent<'a> {
    curve: &'a Curve,
    cells: Vec<u8>,
    k: usize,
    state: RawState,
    level: usize,
    m: usize,
    flip: bool,
    limb: Vec<u8>,
    scratch: Vec<u8>,
}

impl<'a> Descent<'a> {
    /// Descend towards `x` (written order, in [0,1]^n) through k levels of
    /// curve refinement, k·n tree levels.
    pub fn new(curve: &'a Curve, x: &[f64], k: usize) -> Result<Descent<'a>> {
        if x.len() != curve.n() {
            return Err(crate::Error::DimensionMismatch {
                left: curve.n(),
                right: x.len(),
            });
        }
        let cells = quantize_digits(x, curve.p(), k)?;
        let n = curve.n();
        Ok(Descent {
            curve,
            cells,
            k,
            state: curve.raw_initial(),
            level: 0,
            m: 0,
            flip: false,
            limb: vec![0; n],
            scratch: vec![0; 2 * n],
        })
    }

    /// Tree depth of the next digit.
    pub fn depth(&self) -> usize {
        self.level * self.curve.n() + self.m
    }

    /// The coordinate axis the next tree level splits, or None at the end.
    pub fn split_axis(&self) -> Option<usize> {
        if self.level == self.k {
            return None;
        }
        let j = self.curve.n() - 1 - self.m;
        Some(if self.curve.p() == Prime::TWO {
            self.curve.sigma(self.state.d).apply(j)
        } else {
            self.curve.tau_inv().apply(j)
        })
    }
}

impl Iterator for Descent<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        let axis = self.split_axis()?;
        let n = self.curve.n();
        let x = self.cells[self.level * n + axis];
        let e = self.state.e[axis];
        let digit = if self.curve.p() == Prime::TWO {
            let y = x ^ e;
            let bit = y ^ self.flip as u8;
            self.flip = bit == 1;
            bit
        } else {
            let top = self.curve.p().get() - 1;
            let y = if e == 0 { x } else { top - x };
            let g = if self.flip { top - y } else { y };
            self.flip ^= g & 1 == 1;
            g
        };
        self.limb[n - 1 - self.m] = digit;
        self.m += 1;
        if self.m == n {
            self.curve.advance(&mut self.state, &self.limb, &mut self.scratch);
            self.m = 0;
            self.level += 1;
            self.flip = false;
        }
        Some(digit)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.k * self.curve.n() - self.depth();
        (left, Some(left))
    }
}

impl ExactSizeIterator for Descent<'_> {}
