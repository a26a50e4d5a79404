//! Quadratic-time reference implementations.
//!
//! Everything here uses schoolbook convolution and coefficient recurrences
//! only, never the transform code, so the fast paths can be checked against
//! something that shares none of their machinery.

use crate::error::{Result, SeriesError};
use crate::fft::{C64, ONE, ZERO};
use crate::series::TruncatedSeries;

/// Schoolbook product, full length.
pub fn naive_product(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Schoolbook product truncated to `n` terms.
pub fn naive_mul_mod(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1/f mod x^n` by `r_j = -(1/f_0) sum_{i=1..j} f_i r_{j-i}`.
pub fn oracle_inverse(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    let f0 = f.coeff(0);
    if f0 == ZERO {
        return Err(SeriesError::NotInvertible);
    }
    let inv0 = ONE / f0;
    let mut r = vec![ZERO; n];
    if n > 0 {
        r[0] = inv0;
    }
    for j in 1..n {
        let mut acc = ZERO;
        for i in 1..=j.min(f.order().saturating_sub(1)) {
            acc += f[i] * r[j - i];
        }
        r[j] = -acc * inv0;
    }
    Ok(TruncatedSeries::new(r))
}

/// `e^h mod x^n` from `j f_j = sum_{i=1..j} i h_i f_{j-i}`.
pub fn oracle_exp(h: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    if h.coeff(0) != ZERO {
        return Err(SeriesError::Precondition("exp needs a zero constant term".into()));
    }
    let dh: Vec<C64> = (0..n).map(|i| h.coeff(i) * i as f64).collect();
    let mut f = vec![ZERO; n];
    if n > 0 {
        f[0] = ONE;
    }
    for j in 1..n {
        let mut acc = ZERO;
        for i in 1..=j {
            acc += dh[i] * f[j - i];
        }
        f[j] = acc / j as f64;
    }
    Ok(TruncatedSeries::new(f))
}

/// `ln f mod x^n` as the integral of `f' / f`.
pub fn oracle_log(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    if f.coeff(0) != ONE {
        return Err(SeriesError::Precondition("log needs constant term 1".into()));
    }
    if n == 0 {
        return Ok(TruncatedSeries::zero(0));
    }
    let inv = oracle_inverse(f, n - 1)?;
    let df = f.zero_extend(n).derivative();
    let q = naive_mul_mod(df.coeffs(), inv.coeffs(), n - 1);
    Ok(TruncatedSeries::new(q).integral())
}

/// `h^C mod x^n` for `h_0 = 1`, from `h f' = C h' f`, i.e.
/// `j f_j = sum_{i=1..j} (C i - (j - i)) h_i f_{j-i}`.
pub fn oracle_pow(h: &TruncatedSeries, c: C64, n: usize) -> Result<TruncatedSeries> {
    if h.coeff(0) != ONE {
        return Err(SeriesError::Precondition("power needs constant term 1".into()));
    }
    let hh: Vec<C64> = (0..n).map(|i| h.coeff(i)).collect();
    let mut f = vec![ZERO; n];
    if n > 0 {
        f[0] = ONE;
    }
    for j in 1..n {
        let mut acc = ZERO;
        for i in 1..=j {
            acc += (c * i as f64 - (j - i) as f64) * hh[i] * f[j - i];
        }
        f[j] = acc / j as f64;
    }
    Ok(TruncatedSeries::new(f))
}

/// `f * floor(g h / x^s) mod x^n` by full schoolbook products.
pub fn oracle_middle(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    h: &TruncatedSeries,
    s: usize,
    n: usize,
) -> TruncatedSeries {
    let gh = naive_product(g.coeffs(), h.coeffs());
    let shifted: Vec<C64> = gh.iter().skip(s).take(n).copied().collect();
    TruncatedSeries::new(naive_mul_mod(f.coeffs(), &shifted, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_real(v)
    }

    fn assert_close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) {
        assert!(a.max_abs_diff(b) <= tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn inverse_examples() {
        assert_close(&oracle_inverse(&s(&[1., -1.]), 4).unwrap(), &s(&[1., 1., 1., 1.]), 0.0);
        assert_close(&oracle_inverse(&s(&[1.]), 3).unwrap(), &s(&[1., 0., 0.]), 0.0);
        assert_close(&oracle_inverse(&s(&[1., 1.]), 4).unwrap(), &s(&[1., -1., 1., -1.]), 0.0);
        assert_eq!(oracle_inverse(&s(&[0., 1.]), 4), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn exp_examples() {
        assert_close(&oracle_exp(&s(&[0., 1.]), 4).unwrap(), &s(&[1., 1., 0.5, 1. / 6.]), 1e-16);
        assert_close(&oracle_exp(&s(&[0.]), 3).unwrap(), &s(&[1., 0., 0.]), 0.0);
        // e^(x + x^2) = 1 + x + 3/2 x^2 + 7/6 x^3 + ...
        assert_close(&oracle_exp(&s(&[0., 1., 1.]), 4).unwrap(), &s(&[1., 1., 1.5, 7. / 6.]), 1e-15);
        assert!(oracle_exp(&s(&[1., 1.]), 4).is_err());
    }

    #[test]
    fn log_examples() {
        assert_close(&oracle_log(&s(&[1., 1.]), 4).unwrap(), &s(&[0., 1., -0.5, 1. / 3.]), 1e-16);
        assert_close(&oracle_log(&s(&[1.]), 3).unwrap(), &s(&[0., 0., 0.]), 0.0);
        assert_close(&oracle_log(&s(&[1., -1.]), 4).unwrap(), &s(&[0., -1., -0.5, -1. / 3.]), 1e-16);
        assert!(oracle_log(&s(&[2., 1.]), 4).is_err());
    }

    #[test]
    fn pow_examples() {
        let c = |x: f64| C64::new(x, 0.0);
        assert_close(&oracle_pow(&s(&[1., 1.]), c(2.), 3).unwrap(), &s(&[1., 2., 1.]), 1e-15);
        assert_close(&oracle_pow(&s(&[1., 0.3, -2.]), c(0.), 4).unwrap(), &s(&[1., 0., 0., 0.]), 0.0);
        assert_close(&oracle_pow(&s(&[1., 1.]), c(0.5), 3).unwrap(), &s(&[1., 0.5, -0.125]), 1e-16);
        assert!(oracle_pow(&s(&[0., 1.]), c(2.), 3).is_err());
    }

    #[test]
    fn middle_examples() {
        // floor((1 + 2x + x^2) / x) mod x^2 = 2 + x
        let q = oracle_middle(&s(&[1.]), &s(&[1., 1.]), &s(&[1., 1.]), 1, 2);
        assert_close(&q, &s(&[2., 1.]), 0.0);
        let (f, g, h) = (s(&[1., 2.]), s(&[3., -1., 1.]), s(&[0.5, 1.]));
        let q = oracle_middle(&f, &g, &h, 0, 4);
        let fgh = naive_mul_mod(&naive_product(f.coeffs(), g.coeffs()), h.coeffs(), 4);
        assert_close(&q, &TruncatedSeries::new(fgh), 1e-15);
        // g h = x^2, floor(x^2 / x^2) = 1
        let q = oracle_middle(&s(&[1., 1.]), &s(&[0., 1.]), &s(&[0., 1.]), 2, 1);
        assert_close(&q, &s(&[1.]), 0.0);
    }
}
