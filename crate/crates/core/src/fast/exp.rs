use crate::block::{short_product_2k, triple_middle_product, BlockCache, BlockPlan};
use crate::error::{Result, SeriesError};
use crate::fft::{C64, ZERO};
use crate::ledger::CostLedger;
use crate::oracle;
use crate::series::{reciprocals, TruncatedSeries};

use super::label::*;
use super::plan::{choose_plan, PlanChoice, PlanOverrides};
use super::stage::*;

/// State after the first half of the exponential.
#[derive(Clone, Debug)]
pub struct ExpHalf {
    pub plan: BlockPlan,
    /// `e^h mod x^m`.
    pub f: TruncatedSeries,
    /// `1 / f mod x^n`.
    pub r: TruncatedSeries,
    /// `x h'` to order `2m`.
    pub theta_h: TruncatedSeries,
    pub cache: BlockCache,
}

/// Extends `f` (valid below `from`) to order `to` in steps of `n`, for
/// `x f' = sigma f`, where the block spectra of `sigma` are cached under
/// `sigma_label`. When `sigma` is given its blocks are transformed as
/// needed; otherwise they must already be cached.
#[allow(clippy::too_many_arguments)]
pub(crate) fn extend_solution(
    f: &mut [C64],
    from: usize,
    to: usize,
    plan: &BlockPlan,
    sigma_label: &'static str,
    sigma: Option<&[C64]>,
    cache: &mut BlockCache,
    ledger: &mut CostLedger,
) -> Result<()> {
    let (k, n) = (plan.k, plan.n);
    let p = n / k;
    let inv = reciprocals(to);
    let mut mp = from;
    while mp < to {
        cache.ensure_block_spectra(F_BLOCKS, &f[..mp], mp / k - 1, ledger)?;
        if let Some(src) = sigma {
            cache.ensure_block_spectra(sigma_label, src, (mp + n) / k - 1, ledger)?;
        }
        let q = triple_middle_product(
            cache.spectra(R_BLOCKS, p)?,
            cache.spectra(sigma_label, (mp + n) / k)?,
            cache.spectra(F_BLOCKS, mp / k)?,
            mp / k,
            p,
            ledger,
        )?;
        // f - f~ = x^m' f~ J(q / x^m), with J dividing coefficient j by m' + j.
        let qt: Vec<C64> = (0..n).map(|j| q[j] * inv[mp + j]).collect();
        ledger.count_const_mul(n);
        let corr = short_product_2k(cache.spectra(F_BLOCKS, p)?, &qt, k, p, ledger, J_BLOCKS, RESTORE)?;
        f[mp..mp + n].copy_from_slice(&corr);
        mp += n;
    }
    Ok(())
}

/// First half of `e^h`: a bootstrap of order `n`, then blockwise extension to
/// order `m`. The bootstrap uses the quadratic recurrences, which are far
/// better conditioned than Newton doubling when `e^h` has large coefficients.
pub fn exp_first_half(h: &TruncatedSeries, plan: &BlockPlan, ledger: &mut CostLedger) -> Result<ExpHalf> {
    let (k, n, m) = (plan.k, plan.n, plan.m);
    if h.coeff(0) != ZERO {
        return Err(SeriesError::Precondition("exp needs zero constant term".into()));
    }
    let h = h.zero_extend(plan.target);
    let theta_h = h.euler();
    let prev = ledger.set_stage(BOOT_E);
    let f_n = oracle::oracle_exp(&h.truncate(n)?, n)?;
    ledger.count_mul(n * (n + 1) / 2);
    ledger.set_stage(BOOT_I);
    let r = oracle::oracle_inverse(&f_n, n)?;
    ledger.count_mul(n * (n + 1) / 2);

    ledger.set_stage(EXP_STAGE1);
    let mut cache = BlockCache::new(k);
    cache.ensure_block_spectra(R_BLOCKS, r.coeffs(), n / k - 1, ledger)?;
    let mut f = f_n.zero_extend(m).into_coeffs();
    extend_solution(&mut f, n, m, plan, DH_BLOCKS, Some(theta_h.coeffs()), &mut cache, ledger)?;
    ledger.set_stage(prev);
    Ok(ExpHalf { plan: *plan, f: TruncatedSeries::new(f), r, theta_h, cache })
}

/// Extends `x (ln f_m)'` from its known part below `x^m` to order `2m`,
/// where `f_m = f mod x^m` and the blocks of `seed` (that known part) are
/// cached under `seed_label`. Returns the coefficients of `x (ln f_m)'`
/// below `x^(2m)`.
pub(crate) fn log_extend_sigma(
    f_m: &[C64],
    seed: &[C64],
    seed_label: &'static str,
    plan: &BlockPlan,
    cache: &mut BlockCache,
    ledger: &mut CostLedger,
) -> Result<Vec<C64>> {
    let (k, n, m) = (plan.k, plan.n, plan.m);
    let (p, ratio) = (n / k, m / k);
    cache.ensure_block_spectra(seed_label, seed, ratio - 1, ledger)?;
    cache.fork(seed_label, SF_BLOCKS, ratio)?;
    cache.ensure_block_spectra(F_BLOCKS, f_m, ratio - 1, ledger)?;
    let mut sigma = seed[..m].to_vec();
    sigma.resize(2 * m, ZERO);
    let mut mp = m;
    while mp < 2 * m {
        cache.ensure_block_spectra(SF_BLOCKS, &sigma[..mp], mp / k - 1, ledger)?;
        // sigma f_m = x f_m', which vanishes from x^m on.
        let q = triple_middle_product(
            cache.spectra(R_BLOCKS, p)?,
            cache.spectra(SF_BLOCKS, mp / k)?,
            cache.spectra(F_BLOCKS, ratio)?,
            mp / k,
            p,
            ledger,
        )?;
        for j in 0..n {
            sigma[mp + j] = -q[j];
        }
        mp += n;
    }
    Ok(sigma)
}

/// `s = (ln f_m)' mod x^(2m-1)` for `f_m = half.f`, reusing the cached
/// spectra of the first half.
pub fn log_extend(half: &mut ExpHalf, ledger: &mut CostLedger) -> Result<TruncatedSeries> {
    let plan = half.plan;
    let prev = ledger.set_stage(EXP_LOG);
    let m = plan.m;
    let seed = half.theta_h.coeffs()[..m].to_vec();
    let sigma = log_extend_sigma(half.f.coeffs(), &seed, DH_BLOCKS, &plan, &mut half.cache, ledger)?;
    ledger.set_stage(prev);
    Ok(TruncatedSeries::new(sigma[1..].to_vec()))
}

/// `f_m + f_m w mod x^(2m)` for `w` supported on `[m, 2m)`, given as its
/// `m` coefficients from `x^m`.
pub(crate) fn final_multiply(
    f_m: &[C64],
    w_hat: &[C64],
    plan: &BlockPlan,
    cache: &mut BlockCache,
    ledger: &mut CostLedger,
) -> Result<Vec<C64>> {
    let (k, m) = (plan.k, plan.m);
    cache.ensure_block_spectra(F_BLOCKS, f_m, m / k - 1, ledger)?;
    let corr = short_product_2k(cache.spectra(F_BLOCKS, m / k)?, w_hat, k, m / k, ledger, W_BLOCKS, RESTORE)?;
    let mut out = f_m.to_vec();
    out.extend_from_slice(&corr);
    Ok(out)
}

/// `e^h mod x^(2m)` with the given plan.
pub fn exp_with_plan(h: &TruncatedSeries, plan: &BlockPlan, ledger: &mut CostLedger) -> Result<TruncatedSeries> {
    let mut half = exp_first_half(h, plan, ledger)?;
    let m = plan.m;
    let sigma = {
        let prev = ledger.set_stage(EXP_LOG);
        let seed = half.theta_h.coeffs()[..m].to_vec();
        let s = log_extend_sigma(half.f.coeffs(), &seed, DH_BLOCKS, plan, &mut half.cache, ledger)?;
        ledger.set_stage(prev);
        s
    };
    let prev = ledger.set_stage(EXP_FINAL);
    let inv = reciprocals(2 * m);
    let hh = h.zero_extend(2 * m);
    let w_hat: Vec<C64> = (m..2 * m).map(|i| hh[i] - sigma[i] * inv[i]).collect();
    ledger.count_const_mul(m);
    ledger.count_add(m);
    let out = final_multiply(half.f.coeffs(), &w_hat, plan, &mut half.cache, ledger)?;
    ledger.set_stage(prev);
    Ok(TruncatedSeries::new(out))
}

/// `e^h mod x^order`.
pub fn fast_exp(h: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    fast_exp_metered(h, order, PlanOverrides::default(), &mut CostLedger::new()).map(|(f, _)| f)
}

/// As [`fast_exp`], with plan overrides and DFT accounting.
pub fn fast_exp_metered(
    h: &TruncatedSeries,
    order: usize,
    overrides: PlanOverrides,
    ledger: &mut CostLedger,
) -> Result<(TruncatedSeries, PlanChoice)> {
    if h.order() < order {
        return Err(SeriesError::OrderTooLarge { requested: order, available: h.order() });
    }
    if h.coeff(0) != ZERO {
        return Err(SeriesError::Precondition("exp needs zero constant term".into()));
    }
    let choice = choose_plan(order, overrides)?;
    let h = h.truncate(order)?;
    let f = match choice {
        PlanChoice::OracleFallback => oracle::oracle_exp(&h, order)?,
        PlanChoice::Blocked(plan) => exp_with_plan(&h, &plan, ledger)?.truncate(order)?,
    };
    Ok((f, choice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::report;

    fn x() -> TruncatedSeries {
        TruncatedSeries::from_real(&[0., 1.])
    }

    fn exp_x(n: usize) -> TruncatedSeries {
        let mut c = vec![1.0; n];
        for i in 1..n {
            c[i] = c[i - 1] / i as f64;
        }
        TruncatedSeries::from_real(&c)
    }

    #[test]
    fn first_half_of_exp_x() {
        let plan = BlockPlan::new(2, 4, 16).unwrap();
        let mut l = CostLedger::new();
        let half = exp_first_half(&x(), &plan, &mut l).unwrap();
        assert!(half.f.max_abs_diff(&exp_x(16)) < 1e-13);
        // f-blocks are each transformed once.
        assert_eq!(half.cache.transformed(F_BLOCKS), 6);
        assert_eq!(l.label_units(EXP_STAGE1, F_BLOCKS, 2), 3.0 * 6.0);
    }

    #[test]
    fn log_extend_matches_log_derivative() {
        let plan = BlockPlan::new(2, 4, 8).unwrap();
        let mut l = CostLedger::new();
        let mut half = exp_first_half(&x(), &plan, &mut l).unwrap();
        let s = log_extend(&mut half, &mut l).unwrap();
        assert_eq!(s.order(), 15);
        let expect = oracle::oracle_log(&exp_x(8), 16).unwrap().derivative();
        assert!(s.max_abs_diff(&expect) < 1e-12);

        let mut half = exp_first_half(&TruncatedSeries::zero(16), &plan, &mut l).unwrap();
        let s = log_extend(&mut half, &mut l).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn log_extend_cost_band() {
        let plan = BlockPlan::new(4, 16, 128).unwrap();
        let mut l = CostLedger::new();
        let mut half = exp_first_half(&TruncatedSeries::from_real(&[0., 0.5, 0.2]), &plan, &mut l).unwrap();
        log_extend(&mut half, &mut l).unwrap();
        let units = report(&l, &plan).row(EXP_LOG).unwrap().per_fm;
        assert!((6.0..=8.0).contains(&units), "{units}");
    }

    #[test]
    fn fast_exp_examples() {
        let f = fast_exp(&x().zero_extend(32), 32).unwrap();
        assert!(f.max_abs_diff(&exp_x(32)) < 1e-12);
        assert_eq!(fast_exp(&TruncatedSeries::zero(40), 40).unwrap(), TruncatedSeries::one(40));
        assert!(matches!(
            fast_exp(&TruncatedSeries::from_real(&[1., 1.]), 2),
            Err(SeriesError::Precondition(_))
        ));
        let small = fast_exp(&x().zero_extend(5), 5).unwrap();
        assert!(small.max_abs_diff(&exp_x(5)) < 1e-15);
    }

    #[test]
    fn fast_exp_matches_oracle_on_random_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 300;
        let h = TruncatedSeries::new(
            (0..n).map(|i| if i == 0 { ZERO } else { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.5 }).collect(),
        );
        let f = fast_exp(&h, n).unwrap();
        let o = oracle::oracle_exp(&h, n).unwrap();
        assert!(f.max_abs_diff(&o) <= 1e-8 * (1.0 + o.max_abs()));
    }

    #[test]
    fn stage_costs_follow_the_model() {
        // R = 32, p = 4. Stage 1 transforms R - p blocks of f, R of x h' and
        // p of r, then spends 3(p + 2) + 4p units in each of R/p - 1 steps.
        let plan = BlockPlan::new(4, 16, 128).unwrap();
        let mut l = CostLedger::new();
        exp_with_plan(&x().zero_extend(2), &plan, &mut l).unwrap();
        let rep = report(&l, &plan);
        let (r, p) = (32.0, 4.0);
        let stage1 = 13.0 + 6.0 / p - 7.0 * p / r - 6.0 / r;
        assert!((rep.row(EXP_STAGE1).unwrap().per_fm - stage1).abs() < 1e-9, "{}", rep.to_text());
        let total = 23.0 + 12.0 / p - 7.0 * p / r - 6.0 / r;
        assert!((rep.total_per_fm("exp.") - total).abs() < 1e-9, "{}", rep.to_text());
    }
}
