//! Newton iterations on whole series for standalone inverse and logarithm.

use crate::error::{Result, SeriesError};
use crate::fft::{C64, ZERO};
use crate::ledger::CostLedger;
use crate::series::TruncatedSeries;

use super::label::NEWTON;

/// `1/f mod x^n` by Newton doubling `r <- r + r (1 - f r)`.
pub fn fast_inverse(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    fast_inverse_metered(f, n, &mut CostLedger::new())
}

pub fn fast_inverse_metered(f: &TruncatedSeries, n: usize, ledger: &mut CostLedger) -> Result<TruncatedSeries> {
    let f0 = f.coeff(0);
    if f0 == ZERO {
        return Err(SeriesError::NotInvertible);
    }
    if n == 0 {
        return Ok(TruncatedSeries::zero(0));
    }
    let mut r = TruncatedSeries::new(vec![C64::new(1.0, 0.0) / f0]);
    let mut len = 1;
    while len < n {
        let next = (2 * len).min(n);
        let fr = f.zero_extend(next).mul_mod_metered(&r, next, ledger, NEWTON);
        // 1 - f r vanishes below x^len.
        let mut err = vec![ZERO; next];
        for i in len..next {
            err[i] = -fr[i];
        }
        let corr = r.mul_mod_metered(&TruncatedSeries::new(err), next, ledger, NEWTON);
        let mut c = r.zero_extend(next).into_coeffs();
        for i in len..next {
            c[i] += corr[i];
        }
        ledger.count_add(next);
        r = TruncatedSeries::new(c);
        len = next;
    }
    Ok(r)
}

/// `ln f mod x^n` as the integral of `f' / f`, for `f_0 = 1`.
pub fn fast_log(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    fast_log_metered(f, n, &mut CostLedger::new())
}

pub fn fast_log_metered(f: &TruncatedSeries, n: usize, ledger: &mut CostLedger) -> Result<TruncatedSeries> {
    if f.coeff(0) != C64::new(1.0, 0.0) {
        return Err(SeriesError::Precondition("log needs constant term 1".into()));
    }
    if n <= 1 {
        return Ok(TruncatedSeries::zero(n));
    }
    let inv = fast_inverse_metered(f, n - 1, ledger)?;
    let df = f.zero_extend(n).derivative();
    Ok(df.mul_mod_metered(&inv, n - 1, ledger, NEWTON).integral())
}
