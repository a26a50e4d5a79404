use crate::block::BlockPlan;
use crate::error::{Result, SeriesError};
use crate::fft::granted_size;

/// Up to this final order the fast routines use the quadratic recurrences.
pub const MIN_BLOCKED_ORDER: usize = 16;

/// Explicit `(k, n, m)` choices; unset fields follow the default rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlanOverrides {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanChoice {
    Blocked(BlockPlan),
    /// Order too small for blocking; the quadratic path is used instead.
    OracleFallback,
}

fn floor_pow2(x: usize) -> usize {
    if x == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - x.leading_zeros())
    }
}

/// Default plan for final order `order`: `m` is the granted size covering
/// `order/2`, `t = ceil(sqrt(log2 m))`, `k` the largest power of two not above
/// `m/t`, and `n` the largest power-of-two multiple of `k` not above `k t` or
/// `m/2` (so `n | m`).
pub fn choose_plan(order: usize, overrides: PlanOverrides) -> Result<PlanChoice> {
    if order <= MIN_BLOCKED_ORDER && overrides == PlanOverrides::default() {
        return Ok(PlanChoice::OracleFallback);
    }
    let m = overrides.m.unwrap_or_else(|| granted_size(order.div_ceil(2)).granted);
    if 2 * m < order {
        return Err(SeriesError::InvalidPlan(format!("frontier m={m} does not reach order {order}")));
    }
    let t = ((m as f64).log2().sqrt().ceil() as usize).max(1);
    let k = match overrides.k {
        Some(k) => k,
        None => floor_pow2(m / t).max(1).min(floor_pow2(m & m.wrapping_neg())),
    };
    let n = match overrides.n {
        Some(n) => n,
        None => {
            let cap = (k * t).min(m / 2).max(k);
            let mut n = k;
            while 2 * n <= cap && m % (2 * n) == 0 {
                n *= 2;
            }
            n
        }
    };
    Ok(PlanChoice::Blocked(BlockPlan::new(k, n, m)?))
}
