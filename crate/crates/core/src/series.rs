//! Truncated power series and the formal operators on them.

use std::ops::Index;

use crate::error::{Result, SeriesError};
use crate::fft::{self, Polynomial, C64, ZERO};
use crate::ledger::CostLedger;

/// A power series known modulo `x^order`. Coefficient `i` multiplies `x^i`;
/// the order is the number of stored coefficients and may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<C64>,
}

impl Index<usize> for TruncatedSeries {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.coeffs[i]
    }
}

impl From<Vec<C64>> for TruncatedSeries {
    fn from(coeffs: Vec<C64>) -> Self {
        TruncatedSeries { coeffs }
    }
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        TruncatedSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![ZERO; order])
    }

    /// `1 mod x^order`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = fft::ONE;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient `i`, or zero past the known order.
    pub fn coeff(&self, i: usize) -> C64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// `f mod x^n`. Fails when `n` exceeds the known order.
    pub fn truncate(&self, n: usize) -> Result<TruncatedSeries> {
        if n > self.order() {
            return Err(SeriesError::OrderTooLarge { requested: n, available: self.order() });
        }
        Ok(Self::new(self.coeffs[..n].to_vec()))
    }

    /// First `n` coefficients, padding with zeros if the series is shorter.
    /// For callers that know the missing terms are zero.
    pub fn zero_extend(&self, n: usize) -> TruncatedSeries {
        let mut c: Vec<C64> = self.coeffs.iter().take(n).copied().collect();
        c.resize(n, ZERO);
        Self::new(c)
    }

    /// `(f - f mod x^n) / x^n`.
    pub fn floor_div_xn(&self, n: usize) -> Result<TruncatedSeries> {
        if n > self.order() {
            return Err(SeriesError::OrderTooLarge { requested: n, available: self.order() });
        }
        Ok(Self::new(self.coeffs[n..].to_vec()))
    }

    /// The formal derivative; one order shorter.
    pub fn derivative(&self) -> TruncatedSeries {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
    }

    /// The formal integral with zero constant term; one order longer.
    pub fn integral(&self) -> TruncatedSeries {
        let recip = reciprocals(self.order() + 1);
        let mut c = Vec::with_capacity(self.order() + 1);
        c.push(ZERO);
        c.extend(self.coeffs.iter().enumerate().map(|(i, &v)| v * recip[i + 1]));
        Self::new(c)
    }

    /// `x * f'`, same order as `f`: coefficient `i` is `i * f_i`.
    pub fn euler(&self) -> TruncatedSeries {
        Self::new(self.coeffs.iter().enumerate().map(|(i, &c)| c * i as f64).collect())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> TruncatedSeries {
        Self::new(self.coeffs.iter().map(|&v| v * c).collect())
    }

    fn zip_with(&self, other: &TruncatedSeries, op: impl Fn(C64, C64) -> C64) -> Result<TruncatedSeries> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect()))
    }

    /// `(f * g) mod x^n` through an FFT product; missing terms count as zero.
    pub fn mul_mod(&self, other: &TruncatedSeries, n: usize) -> TruncatedSeries {
        self.mul_mod_metered(other, n, &mut CostLedger::new(), "mul-mod")
    }

    pub fn mul_mod_metered(
        &self,
        other: &TruncatedSeries,
        n: usize,
        ledger: &mut CostLedger,
        label: &'static str,
    ) -> TruncatedSeries {
        if n == 0 || self.order() == 0 || other.order() == 0 {
            return Self::zero(n);
        }
        let a = Polynomial::new(self.coeffs.iter().take(n).copied().collect());
        let b = Polynomial::new(other.coeffs.iter().take(n).copied().collect());
        let prod = fft::multiply(&a, &b, ledger, label);
        Self::new(prod.coeffs).zero_extend(n)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise distance to another series of the same order.
    pub fn max_abs_diff(&self, other: &TruncatedSeries) -> f64 {
        assert_eq!(self.order(), other.order(), "order mismatch");
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `1/i` for `i < n`, index 0 unused.
pub(crate) fn reciprocals(n: usize) -> Vec<f64> {
    let mut r = vec![0.0; n.max(1)];
    for (i, v) in r.iter_mut().enumerate().skip(1) {
        *v = 1.0 / i as f64;
    }
    r
}

/// Splits the first `ceil(order/k)` blocks of size `k` off a series; the
/// last block is zero padded.
pub fn split_blocks(f: &TruncatedSeries, k: usize) -> Vec<Polynomial> {
    assert!(k >= 1, "block size must be positive");
    f.coeffs()
        .chunks(k)
        .map(|chunk| {
            let mut c = chunk.to_vec();
            c.resize(k, ZERO);
            Polynomial::new(c)
        })
        .collect()
}

/// `sum_i blocks[i] * x^(i k) mod x^n`, overlaps summed.
pub fn overlap_add(blocks: &[Polynomial], k: usize, n: usize) -> TruncatedSeries {
    let mut out = vec![ZERO; n];
    for (i, b) in blocks.iter().enumerate() {
        let base = i * k;
        if base >= n {
            break;
        }
        for (j, &c) in b.coeffs.iter().enumerate() {
            if base + j >= n {
                break;
            }
            out[base + j] += c;
        }
    }
    TruncatedSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_real(v)
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(s(&[1., 2., 3.]).truncate(2).unwrap(), s(&[1., 2.]));
        assert_eq!(s(&[1., 2., 3.]).truncate(3).unwrap(), s(&[1., 2., 3.]));
        assert_eq!(s(&[0., 5.]).truncate(1).unwrap(), s(&[0.]));
        assert!(matches!(s(&[1.]).truncate(2), Err(SeriesError::OrderTooLarge { .. })));
        assert_eq!(s(&[1.]).zero_extend(3), s(&[1., 0., 0.]));
    }

    #[test]
    fn floor_div_examples() {
        assert_eq!(s(&[1., 2., 3., 4.]).floor_div_xn(2).unwrap(), s(&[3., 4.]));
        let f = s(&[4., 5.]);
        assert_eq!(f.floor_div_xn(0).unwrap(), f);
        let e = s(&[7.]).floor_div_xn(1).unwrap();
        assert_eq!(e.order(), 0);
        assert!(s(&[7.]).floor_div_xn(2).is_err());
    }

    #[test]
    fn derivative_and_integral_examples() {
        assert_eq!(s(&[1., 2., 3.]).derivative(), s(&[2., 6.]));
        assert_eq!(s(&[5.]).derivative().order(), 0);
        assert_eq!(s(&[0., 1.]).derivative(), s(&[1.]));
        assert_eq!(s(&[1., 1.]).integral(), s(&[0., 1., 0.5]));
        assert_eq!(TruncatedSeries::zero(0).integral(), s(&[0.]));
        let f = s(&[3., 1., -2., 0.5]);
        let back = f.derivative().integral();
        assert!(back.max_abs_diff(&s(&[0., 1., -2., 0.5])) < 1e-15);
        assert!(f.integral().derivative().max_abs_diff(&f) < 1e-15);
        assert_eq!(s(&[3., 1., 2.]).euler(), s(&[0., 1., 4.]));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(s(&[1., 2.]).add(&s(&[3., 4.])).unwrap(), s(&[4., 6.]));
        let f = s(&[1., -3.]);
        assert_eq!(f.sub(&f).unwrap(), s(&[0., 0.]));
        assert_eq!(s(&[1., 1.]).scale(C64::new(2.0, 0.0)), s(&[2., 2.]));
        assert_eq!(s(&[1.]).add(&s(&[1., 2.])), Err(SeriesError::OrderMismatch(1, 2)));
    }

    #[test]
    fn mul_mod_examples() {
        let r = s(&[1., 1.]).mul_mod(&s(&[1., 1.]), 2);
        assert!(r.max_abs_diff(&s(&[1., 2.])) < 1e-14);
        let f = s(&[2., -1., 4.]);
        assert!(f.mul_mod(&s(&[1.]), 2).max_abs_diff(&s(&[2., -1.])) < 1e-14);
        let r = s(&[1., 1., 1.]).mul_mod(&s(&[1., -1., 0.]), 3);
        assert!(r.max_abs_diff(&s(&[1., 0., 0.])) < 1e-14);
    }

    #[test]
    fn block_examples() {
        let b = split_blocks(&s(&[1., 2., 3., 4.]), 2);
        assert_eq!(b, vec![Polynomial::from_real(&[1., 2.]), Polynomial::from_real(&[3., 4.])]);
        let b = split_blocks(&s(&[1., 2., 3.]), 2);
        assert_eq!(b, vec![Polynomial::from_real(&[1., 2.]), Polynomial::from_real(&[3., 0.])]);
        let f = s(&[1., 2., 3.]);
        assert_eq!(split_blocks(&f, 3), vec![Polynomial::from_real(&[1., 2., 3.])]);

        assert_eq!(overlap_add(&[Polynomial::from_real(&[1., 1., 1.])], 2, 3), s(&[1., 1., 1.]));
        let blocks = [Polynomial::from_real(&[1., 0., 1.]), Polynomial::from_real(&[1., 0., 0.])];
        assert_eq!(overlap_add(&blocks, 1, 3), s(&[1., 1., 1.]));
        let f = s(&[1., 2., 3., 4., 5.]);
        assert_eq!(overlap_add(&split_blocks(&f, 2), 2, 5), f);
    }
}
