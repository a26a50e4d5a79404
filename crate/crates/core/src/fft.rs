//! Complex DFTs over the supported lengths `2^a` and `3 * 2^a`.
//!
//! Forward transforms evaluate at powers of `exp(+2*pi*i/L)` and are
//! unnormalized; inverses carry the `1/L`. Plain transforms are delegated to
//! `rustfft`. The double DFT of order `(l, k)` and the order-`3k`
//! decomposition into three inner order-`k` transforms are built here, since
//! the block algorithms depend on how they are accounted.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use rustfft::{Fft, FftDirection, FftPlanner};

pub use rustfft::num_complex::Complex64;

use crate::error::{Result, SeriesError};
use crate::ledger::CostLedger;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense polynomial; coefficient `i` multiplies `x^i`. Trailing zeros are
/// allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero(len: usize) -> Self {
        Self::new(vec![ZERO; len.max(1)])
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Values of `p` at the `L`-th roots of unity.
    Plain(usize),
    /// Order-`l` DFT followed by the order-`k` DFT of `p(zeta x)`.
    Double { l: usize, k: usize },
    /// Order-`3k` DFT computed through the radix-3 split; parameter is `k`.
    Triple(usize),
}

impl SpectrumKind {
    pub fn len(&self) -> usize {
        match *self {
            SpectrumKind::Plain(l) => l,
            SpectrumKind::Double { l, k } => l + k,
            SpectrumKind::Triple(k) => 3 * k,
        }
    }
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumKind::Plain(l) => write!(f, "plain({l})"),
            SpectrumKind::Double { l, k } => write!(f, "double({l},{k})"),
            SpectrumKind::Triple(k) => write!(f, "triple({})", 3 * k),
        }
    }
}

/// DFT image of a polynomial. Pointwise products of spectra of the same kind
/// are spectra of the product polynomial, as long as its length fits.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<C64>,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn zeros(kind: SpectrumKind) -> Self {
        Spectrum { values: vec![ZERO; kind.len()], kind }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The leading `2k` values of a `double(2k,k)` spectrum, or the whole of a
    /// `plain(2k)` one: in both cases the order-`2k` DFT of the polynomial.
    pub fn order_2k_part(&self, k: usize) -> Result<&[C64]> {
        match self.kind {
            SpectrumKind::Double { l, k: kk } if l == 2 * k && kk == k => Ok(&self.values[..2 * k]),
            SpectrumKind::Plain(l) if l == 2 * k => Ok(&self.values),
            other => Err(SeriesError::KindMismatch {
                expected: format!("double({},{k}) or plain({})", 2 * k, 2 * k),
                found: other.to_string(),
            }),
        }
    }
}

/// A requested transform length and the smallest supported length covering
/// it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformSize {
    pub requested: usize,
    pub granted: usize,
}

pub fn is_supported(len: usize) -> bool {
    if len == 0 {
        return false;
    }
    let odd = len >> len.trailing_zeros();
    odd == 1 || odd == 3
}

pub fn granted_size(requested: usize) -> TransformSize {
    let n = requested.max(1);
    let p2 = n.next_power_of_two();
    // 3 * 2^a with 3 * 2^a >= n; only worthwhile below p2.
    let granted = if p2 >= 4 && 3 * (p2 / 4) >= n { 3 * (p2 / 4) } else { p2 };
    TransformSize { requested, granted }
}

fn check_supported(len: usize) -> Result<()> {
    if is_supported(len) {
        Ok(())
    } else {
        Err(SeriesError::UnsupportedSize(len))
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static ZETA_POWERS: RefCell<HashMap<usize, Rc<Vec<C64>>>> = RefCell::new(HashMap::new());
    static TWIDDLES_3K: RefCell<HashMap<usize, Rc<Vec<C64>>>> = RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    // Our forward map uses exp(+2 pi i / L), which is rustfft's inverse.
    let dir = if forward { FftDirection::Inverse } else { FftDirection::Forward };
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir))
}

/// `zeta^j` for `j < k`, with `zeta = exp(i pi / (2k))` so that `zeta^k = i`.
fn zeta_powers(k: usize) -> Rc<Vec<C64>> {
    ZETA_POWERS.with(|cache| {
        cache
            .borrow_mut()
            .entry(k)
            .or_insert_with(|| {
                Rc::new((0..k).map(|j| C64::from_polar(1.0, PI * j as f64 / (2 * k) as f64)).collect())
            })
            .clone()
    })
}

/// `omega_{3k}^j` for `j < 3k`.
fn twiddles_3k(k: usize) -> Rc<Vec<C64>> {
    TWIDDLES_3K.with(|cache| {
        cache
            .borrow_mut()
            .entry(k)
            .or_insert_with(|| {
                let n = 3 * k;
                Rc::new((0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect())
            })
            .clone()
    })
}

/// Unrecorded in-place transform of a buffer of supported length.
fn raw_forward(buf: &mut [C64]) {
    if buf.len() > 1 {
        plan(buf.len(), true).process(buf);
    }
}

fn raw_inverse(buf: &mut [C64]) {
    let len = buf.len();
    if len > 1 {
        plan(len, false).process(buf);
    }
    let scale = 1.0 / len as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Reduces `coeffs` modulo `x^len - 1` into a buffer of length `len`.
fn fold_cyclic(coeffs: &[C64], len: usize) -> Vec<C64> {
    let mut buf = vec![ZERO; len];
    for (i, &c) in coeffs.iter().enumerate() {
        buf[i % len] += c;
    }
    buf
}

/// Evaluates `p` at the `len`-th roots of unity.
pub fn dft(p: &Polynomial, len: usize, ledger: &mut CostLedger, label: &'static str) -> Result<Spectrum> {
    check_supported(len)?;
    if p.len() > len {
        return Err(SeriesError::DegreeTooLarge { len: p.len(), size: len });
    }
    let mut buf = fold_cyclic(&p.coeffs, len);
    raw_forward(&mut buf);
    ledger.record(len, label);
    Ok(Spectrum { values: buf, kind: SpectrumKind::Plain(len) })
}

pub fn inverse_dft(s: &Spectrum, ledger: &mut CostLedger, label: &'static str) -> Result<Polynomial> {
    let len = match s.kind {
        SpectrumKind::Plain(l) => l,
        other => {
            return Err(SeriesError::KindMismatch { expected: "plain".into(), found: other.to_string() })
        }
    };
    check_supported(len)?;
    let mut buf = s.values.clone();
    raw_inverse(&mut buf);
    ledger.record(len, label);
    Ok(Polynomial::new(buf))
}

/// Double DFT of order `(l, k)`: the order-`l` DFT of `p`, then the order-`k`
/// DFT of `p(zeta x)` where `zeta^k = i`. Equivalently the values of `p`
/// modulo `x^l - 1` and modulo `x^k - i`.
pub fn double_dft(
    p: &Polynomial,
    l: usize,
    k: usize,
    ledger: &mut CostLedger,
    label: &'static str,
) -> Result<Spectrum> {
    check_supported(l)?;
    check_supported(k)?;
    if p.len() > l + k {
        return Err(SeriesError::DegreeTooLarge { len: p.len(), size: l + k });
    }
    let mut head = fold_cyclic(&p.coeffs, l);
    raw_forward(&mut head);
    ledger.record(l, label);

    // p(zeta x) mod (x^k - 1): coefficient j picks up zeta^j, and
    // zeta^(j + k t) = zeta^j * i^t.
    let zeta = zeta_powers(k);
    let mut tail = vec![ZERO; k];
    let mut turn = ONE;
    for chunk in p.coeffs.chunks(k) {
        for (j, &c) in chunk.iter().enumerate() {
            tail[j] += c * zeta[j] * turn;
        }
        turn *= C64::new(0.0, 1.0);
    }
    raw_forward(&mut tail);
    ledger.record(k, label);
    ledger.count_const_mul(p.len());

    head.extend_from_slice(&tail);
    Ok(Spectrum { values: head, kind: SpectrumKind::Double { l, k } })
}

/// Inverse of [`double_dft`] for `l = 2k`. Recovers `p` of length `< 3k` from
/// `r1 = p mod (x^2k - 1)` and `r2 = p mod (x^k - i)` as `r1 + (x^2k - 1) t`
/// with `t = (r1 - r2) / 2 mod (x^k - i)`, using `x^2k = -1` there.
pub fn inverse_double_dft(s: &Spectrum, ledger: &mut CostLedger, label: &'static str) -> Result<Polynomial> {
    let (l, k) = match s.kind {
        SpectrumKind::Double { l, k } => (l, k),
        other => {
            return Err(SeriesError::KindMismatch { expected: "double".into(), found: other.to_string() })
        }
    };
    if l != 2 * k {
        return Err(SeriesError::Precondition(format!(
            "double DFT reconstruction needs l = 2k, got l={l}, k={k}"
        )));
    }
    let mut r1 = s.values[..l].to_vec();
    raw_inverse(&mut r1);
    ledger.record(l, label);
    let mut tail = s.values[l..].to_vec();
    raw_inverse(&mut tail);
    ledger.record(k, label);

    let zeta = zeta_powers(k);
    let i = C64::new(0.0, 1.0);
    let mut out = r1.clone();
    out.resize(3 * k, ZERO);
    for j in 0..k {
        let r2 = tail[j] / zeta[j];
        let r1_mod = r1[j] + i * r1[j + k];
        let t = (r1_mod - r2) * 0.5;
        out[j] -= t;
        out[j + 2 * k] += t;
    }
    ledger.count_const_mul(2 * k);
    ledger.count_add(4 * k);
    Ok(Polynomial::new(out))
}

/// Order-`3k` DFT as an outer radix-3 step over three inner order-`k`
/// transforms of the decimated parts `p_r(y)`, where
/// `p(x) = p_0(x^3) + x p_1(x^3) + x^2 p_2(x^3)`.
pub fn dft_3k(p: &Polynomial, k: usize, ledger: &mut CostLedger, label: &'static str) -> Result<Spectrum> {
    check_supported(k)?;
    let n = 3 * k;
    if p.len() > n {
        return Err(SeriesError::DegreeTooLarge { len: p.len(), size: n });
    }
    let mut parts = vec![vec![ZERO; k]; 3];
    for (i, &c) in p.coeffs.iter().enumerate() {
        parts[i % 3][i / 3] = c;
    }
    for part in parts.iter_mut() {
        raw_forward(part);
        ledger.record(k, label);
    }
    let tw = twiddles_3k(k);
    let w3 = [ONE, tw[k], tw[2 * k]];
    let mut values = vec![ZERO; n];
    for j1 in 0..k {
        let a0 = parts[0][j1];
        let a1 = parts[1][j1] * tw[j1];
        let a2 = parts[2][j1] * tw[2 * j1];
        for j2 in 0..3 {
            values[j1 + k * j2] = a0 + a1 * w3[j2] + a2 * w3[(2 * j2) % 3];
        }
    }
    ledger.count_mul(8 * k);
    ledger.count_add(6 * k);
    Ok(Spectrum { values, kind: SpectrumKind::Triple(k) })
}

/// Inverse of [`dft_3k`]: radix-3 recombination followed by three inner
/// inverse order-`k` transforms.
pub fn inverse_dft_3k(s: &Spectrum, ledger: &mut CostLedger, label: &'static str) -> Result<Polynomial> {
    let k = match s.kind {
        SpectrumKind::Triple(k) => k,
        other => {
            return Err(SeriesError::KindMismatch { expected: "triple".into(), found: other.to_string() })
        }
    };
    let n = 3 * k;
    let tw = twiddles_3k(k);
    let w3c = [ONE, tw[k].conj(), tw[2 * k].conj()];
    let mut parts = vec![vec![ZERO; k]; 3];
    for j1 in 0..k {
        let v = [s.values[j1], s.values[j1 + k], s.values[j1 + 2 * k]];
        for (r, part) in parts.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j2, &vj) in v.iter().enumerate() {
                acc += vj * w3c[(r * j2) % 3];
            }
            // Undo the twiddle and the outer 1/3.
            part[j1] = acc * tw[(r * j1) % n].conj() / 3.0;
        }
    }
    for part in parts.iter_mut() {
        raw_inverse(part);
        ledger.record(k, label);
    }
    let mut out = vec![ZERO; n];
    for (r, part) in parts.iter().enumerate() {
        for (i, &c) in part.iter().enumerate() {
            out[3 * i + r] = c;
        }
    }
    ledger.count_mul(8 * k);
    ledger.count_add(6 * k);
    Ok(Polynomial::new(out))
}

/// Product of two polynomials by two forward transforms, a pointwise product
/// and one inverse, at the granted length covering the product.
pub fn multiply(p: &Polynomial, q: &Polynomial, ledger: &mut CostLedger, label: &'static str) -> Polynomial {
    let out_len = p.len() + q.len() - 1;
    let size = granted_size(out_len).granted;
    let a = dft(p, size, ledger, label).expect("granted size is supported");
    let b = dft(q, size, ledger, label).expect("granted size is supported");
    let prod: Vec<C64> = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
    ledger.count_mul(size);
    let mut r = inverse_dft(&Spectrum { values: prod, kind: SpectrumKind::Plain(size) }, ledger, label)
        .expect("plain spectrum");
    r.coeffs.truncate(out_len);
    r
}

/// Pointwise multiply-accumulate in image space: `acc += a * b`.
pub(crate) fn mul_acc(acc: &mut [C64], a: &[C64], b: &[C64], ledger: &mut CostLedger) {
    for ((o, x), y) in acc.iter_mut().zip(a).zip(b) {
        *o += x * y;
    }
    ledger.count_mul(acc.len());
    ledger.count_add(acc.len());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    /// Direct evaluation of p at a point.
    fn eval(p: &[C64], x: C64) -> C64 {
        p.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    #[test]
    fn supported_sizes() {
        for n in [1, 2, 3, 4, 6, 8, 12, 48, 1024, 3072] {
            assert!(is_supported(n), "{n}");
        }
        for n in [0, 5, 9, 18, 27, 10] {
            assert!(!is_supported(n), "{n}");
        }
        assert_eq!(granted_size(5).granted, 6);
        assert_eq!(granted_size(7).granted, 8);
        assert_eq!(granted_size(13).granted, 16);
        assert_eq!(granted_size(1025).granted, 1536);
        assert_eq!(granted_size(1).granted, 1);
        for n in 1..2000 {
            let g = granted_size(n).granted;
            assert!(g >= n && is_supported(g) && 2 * g <= 3 * n.max(2), "{n} -> {g}");
        }
    }

    #[test]
    fn dft_examples() {
        let mut l = CostLedger::new();
        let s = dft(&Polynomial::from_real(&[1.0, 0.0]), 2, &mut l, "t").unwrap();
        assert!(close(&s.values, &[c(1., 0.), c(1., 0.)], 1e-15));
        let s = dft(&Polynomial::from_real(&[1.0, 1.0]), 2, &mut l, "t").unwrap();
        assert!(close(&s.values, &[c(2., 0.), c(0., 0.)], 1e-15));
        let s = dft(&Polynomial::from_real(&[0.0, 1.0, 0.0, 0.0]), 4, &mut l, "t").unwrap();
        assert!(close(&s.values, &[c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)], 1e-15));
        assert_eq!(l.dft_count(), 3);
        assert_eq!(dft(&Polynomial::zero(1), 5, &mut l, "t"), Err(SeriesError::UnsupportedSize(5)));
        let empty = dft(&Polynomial::new(vec![]), 4, &mut l, "t").unwrap();
        assert!(empty.values.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn inverse_dft_examples() {
        let mut l = CostLedger::new();
        let plain = |v: Vec<C64>| Spectrum { kind: SpectrumKind::Plain(v.len()), values: v };
        let p = inverse_dft(&plain(vec![c(2., 0.), c(0., 0.)]), &mut l, "t").unwrap();
        assert!(close(&p.coeffs, &[c(1., 0.), c(1., 0.)], 1e-15));
        let p = inverse_dft(&plain(vec![c(1., 0.), c(1., 0.)]), &mut l, "t").unwrap();
        assert!(close(&p.coeffs, &[c(1., 0.), c(0., 0.)], 1e-15));
        let p = inverse_dft(&plain(vec![c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)]), &mut l, "t").unwrap();
        assert!(close(&p.coeffs, &[ZERO, ONE, ZERO, ZERO], 1e-15));
        let dbl = Spectrum::zeros(SpectrumKind::Double { l: 2, k: 1 });
        assert!(matches!(inverse_dft(&dbl, &mut l, "t"), Err(SeriesError::KindMismatch { .. })));
    }

    #[test]
    fn double_dft_examples() {
        let mut l = CostLedger::new();
        let s = double_dft(&Polynomial::from_real(&[1., 1., 1.]), 2, 1, &mut l, "t").unwrap();
        assert!(close(&s.values, &[c(3., 0.), c(1., 0.), c(0., 1.)], 1e-15));
        assert_eq!(l.order_count(2), 1);
        assert_eq!(l.order_count(1), 1);
        let s = double_dft(&Polynomial::from_real(&[1.]), 2, 1, &mut l, "t").unwrap();
        assert!(close(&s.values, &[ONE, ONE, ONE], 1e-15));
        // x^2 at 1, -1, zeta, -zeta with zeta^2 = i.
        let s = double_dft(&Polynomial::from_real(&[0., 0., 1.]), 2, 2, &mut l, "t").unwrap();
        let zeta = C64::from_polar(1.0, PI / 4.0);
        let pts = [ONE, -ONE, zeta, -zeta];
        let expect: Vec<C64> = pts.iter().map(|&x| eval(&[ZERO, ZERO, ONE], x)).collect();
        assert!(close(&expect, &[ONE, ONE, c(0., 1.), c(0., 1.)], 1e-15));
        assert!(close(&s.values, &expect, 1e-15));
    }

    #[test]
    fn inverse_double_dft_examples() {
        let mut l = CostLedger::new();
        let kind = SpectrumKind::Double { l: 2, k: 1 };
        let s = Spectrum { values: vec![c(3., 0.), c(1., 0.), c(0., 1.)], kind };
        let p = inverse_double_dft(&s, &mut l, "t").unwrap();
        assert!(close(&p.coeffs, &[ONE, ONE, ONE], 1e-15));
        let s = Spectrum { values: vec![ONE; 3], kind };
        let p = inverse_double_dft(&s, &mut l, "t").unwrap();
        assert!(close(&p.coeffs, &[ONE, ZERO, ZERO], 1e-15));
        assert_eq!(l.order_count(2), 2);
        assert_eq!(l.order_count(1), 2);
    }

    #[test]
    fn dft_3k_examples() {
        let mut l = CostLedger::new();
        let s = dft_3k(&Polynomial::from_real(&[1.]), 1, &mut l, "t").unwrap();
        assert!(close(&s.values, &[ONE, ONE, ONE], 1e-15));
        let s = dft_3k(&Polynomial::from_real(&[0., 1.]), 1, &mut l, "t").unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(close(&s.values, &[ONE, w, w * w], 1e-15));
        assert_eq!(l.order_count(1), 6);
        let p = Polynomial::new((0..12).map(|i| c(i as f64, 1.0 - i as f64)).collect());
        let a = dft_3k(&p, 4, &mut l, "t").unwrap();
        let b = dft(&p, 12, &mut l, "t").unwrap();
        assert!(close(&a.values, &b.values, 1e-12));
        let back = inverse_dft_3k(&a, &mut l, "t").unwrap();
        assert!(close(&back.coeffs, &p.coeffs, 1e-12));
    }

    #[test]
    fn multiply_examples() {
        let mut l = CostLedger::new();
        let r = multiply(&Polynomial::from_real(&[1., 1.]), &Polynomial::from_real(&[1., 1.]), &mut l, "t");
        assert!(close(&r.coeffs, &[c(1., 0.), c(2., 0.), c(1., 0.)], 1e-14));
        assert_eq!(l.order_count(3), 3);
        let q = Polynomial::from_real(&[3., -1., 2.]);
        let r = multiply(&Polynomial::from_real(&[1.]), &q, &mut l, "t");
        assert!(close(&r.coeffs, &q.coeffs, 1e-14));
        let r = multiply(&Polynomial::from_real(&[1., -1.]), &Polynomial::from_real(&[1., 1., 1., 1.]), &mut l, "t");
        assert!(close(&r.coeffs, &Polynomial::from_real(&[1., 0., 0., 0., -1.]).coeffs, 1e-14));
    }

    #[test]
    fn order_2k_part_views() {
        let mut l = CostLedger::new();
        let p = Polynomial::from_real(&[1., 2., 3.]);
        let d = double_dft(&p, 4, 2, &mut l, "t").unwrap();
        let h = dft(&p, 4, &mut l, "t").unwrap();
        assert!(close(d.order_2k_part(2).unwrap(), &h.values, 1e-14));
        assert_eq!(h.order_2k_part(2).unwrap(), &h.values[..]);
        assert!(h.order_2k_part(4).is_err());
    }
}
