use crate::block::{middle_images, middle_product_2k, short_product_2k, BlockCache, BlockKind, BlockPlan};
use crate::error::{Result, SeriesError};
use crate::fft::{C64, ONE, ZERO};
use crate::ledger::CostLedger;
use crate::oracle;
use crate::series::{reciprocals, TruncatedSeries};

use super::exp::{extend_solution, final_multiply, log_extend_sigma};
use super::label::*;
use super::plan::{choose_plan, PlanChoice, PlanOverrides};
use super::stage::*;

/// Complex exponent of a power series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowExponent(pub C64);

impl PowExponent {
    pub fn new(re: f64, im: f64) -> Self {
        PowExponent(C64::new(re, im))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

impl From<f64> for PowExponent {
    fn from(v: f64) -> Self {
        PowExponent(C64::new(v, 0.0))
    }
}

impl From<C64> for PowExponent {
    fn from(v: C64) -> Self {
        PowExponent(v)
    }
}

/// Everything the `s` iteration needs besides the cache.
struct PowInputs<'a> {
    c: C64,
    h: &'a [C64],
    theta_h: &'a [C64],
}

/// Blockwise extension of `sigma = x s = C x h' / h` from order `n` to `2m`.
/// On entry `sigma` holds its first `n` coefficients and the spectra of
/// `rho = 1/h mod x^n` are cached. Steps below `m` leave double spectra of
/// `sigma mod x^m` under `s-blocks`.
fn sigma_iteration(
    inp: &PowInputs<'_>,
    sigma: &mut [C64],
    plan: &BlockPlan,
    cache: &mut BlockCache,
    ledger: &mut CostLedger,
) -> Result<()> {
    let (k, n, m) = (plan.k, plan.n, plan.m);
    let (p, ratio) = (n / k, m / k);
    let c = inp.c;

    // First half. The window floor(C x h' / x^m') is folded into the image
    // space product with rho; it is cut into 2k-blocks when those align.
    let prev = ledger.set_stage(POW_S_FIRST);
    let (win_len, stride) = if p % 2 == 0 { (2 * k, 2) } else { (k, 1) };
    let window = &inp.theta_h[n..m];
    let mut mp = n;
    while mp < m {
        cache.ensure_block_spectra(S_BLOCKS, &sigma[..mp], mp / k - 1, ledger)?;
        cache.ensure_block_spectra(H_BLOCKS, inp.h, (mp + n) / k - 1, ledger)?;
        let first = (mp - n) / win_len;
        let last = mp / win_len;
        cache.ensure_with(WINDOW_BLOCKS, win_len, BlockKind::Double, window, last - 1, ledger)?;
        let mut scratch = middle_images(
            cache.spectra(RHO_BLOCKS, p)?,
            cache.spectra(S_BLOCKS, mp / k)?,
            cache.spectra(H_BLOCKS, (mp + n) / k)?,
            mp / k,
            p,
            ledger,
        )?;
        let w = &cache.spectra(WINDOW_BLOCKS, last)?[first..last];
        scratch.accumulate_product(-c, cache.spectra(RHO_BLOCKS, p)?, w, stride, ledger)?;
        let q = scratch.finish(ledger)?;
        for j in 0..n {
            sigma[mp + j] = -q[j];
        }
        mp += n;
    }
    cache.ensure_block_spectra(S_BLOCKS, &sigma[..m], ratio - 1, ledger)?;

    // Second half: every product fits in 2k terms.
    ledger.set_stage(POW_S_SECOND);
    let mut mp = m;
    while mp < 2 * m {
        cache.ensure_with(S_BLOCKS, k, BlockKind::Half, &sigma[..mp], mp / k - 1, ledger)?;
        cache.ensure_with(H_BLOCKS, k, BlockKind::Half, inp.h, (mp + n) / k - 1, ledger)?;
        let y = middle_product_2k(
            cache.spectra(S_BLOCKS, mp / k)?,
            cache.spectra(H_BLOCKS, (mp + n) / k)?,
            k,
            mp / k,
            p,
            ledger,
            U_RESTORE,
        )?;
        let e: Vec<C64> = (0..n).map(|j| c * inp.theta_h[mp + j] - y[j]).collect();
        ledger.count_const_mul(n);
        ledger.count_add(n);
        let corr = short_product_2k(cache.spectra(RHO_BLOCKS, p)?, &e, k, p, ledger, E_BLOCKS, RESTORE)?;
        sigma[mp..mp + n].copy_from_slice(&corr);
        mp += n;
    }
    ledger.set_stage(prev);
    Ok(())
}

/// `s = C h' / h mod x^(2m-1)` extended blockwise from its first `n - 1`
/// coefficients, given `rho = 1/h mod x^n` and `s_{..n-1}`.
pub fn s_iteration(
    h: &TruncatedSeries,
    rho: &TruncatedSeries,
    s_n: &TruncatedSeries,
    c: PowExponent,
    plan: &BlockPlan,
    cache: &mut BlockCache,
    ledger: &mut CostLedger,
) -> Result<TruncatedSeries> {
    let (k, n, m) = (plan.k, plan.n, plan.m);
    if rho.order() < n {
        return Err(SeriesError::SeriesTooShort { label: RHO_BLOCKS.into(), needed: n, available: rho.order() });
    }
    let h = h.zero_extend(2 * m);
    let theta_h = h.euler();
    let mut sigma = vec![ZERO; 2 * m];
    for i in 1..n {
        sigma[i] = s_n.coeff(i - 1);
    }
    cache.ensure_block_spectra(RHO_BLOCKS, rho.coeffs(), n / k - 1, ledger)?;
    let inp = PowInputs { c: c.value(), h: h.coeffs(), theta_h: theta_h.coeffs() };
    sigma_iteration(&inp, &mut sigma, plan, cache, ledger)?;
    Ok(TruncatedSeries::new(sigma[1..].to_vec()))
}

/// `h^C mod x^(2m)` with the given plan, for `h_0 = 1`.
pub fn pow_with_plan(
    h: &TruncatedSeries,
    c: PowExponent,
    plan: &BlockPlan,
    ledger: &mut CostLedger,
) -> Result<TruncatedSeries> {
    let (k, n, m) = (plan.k, plan.n, plan.m);
    if h.coeff(0) != ONE {
        return Err(SeriesError::Precondition("power needs constant term 1".into()));
    }
    let c = c.value();
    let h = h.zero_extend(2 * m);
    let theta_h = h.euler();

    // Bootstrap by the quadratic recurrences.
    let prev = ledger.set_stage(BOOT_I);
    let h_n = h.truncate(n)?;
    let rho = oracle::oracle_inverse(&h_n, n)?;
    ledger.count_mul(n * (n + 1) / 2);
    ledger.set_stage(BOOT_E);
    let f_n = oracle::oracle_pow(&h_n, c, n)?;
    ledger.count_mul(n * (n + 1));
    let theta_c = theta_h.truncate(n)?.scale(c);
    let sigma_n = TruncatedSeries::new(oracle::naive_mul_mod(theta_c.coeffs(), rho.coeffs(), n));
    ledger.count_mul(n * (n + 1) / 2);
    ledger.set_stage(BOOT_I);
    let r = oracle::oracle_inverse(&f_n, n)?;
    ledger.count_mul(n * (n + 1) / 2);

    let mut cache = BlockCache::new(k);
    let mut sigma = sigma_n.zero_extend(2 * m).into_coeffs();
    ledger.set_stage(POW_S_FIRST);
    cache.ensure_block_spectra(RHO_BLOCKS, rho.coeffs(), n / k - 1, ledger)?;
    let inp = PowInputs { c, h: h.coeffs(), theta_h: theta_h.coeffs() };
    sigma_iteration(&inp, &mut sigma, plan, &mut cache, ledger)?;

    ledger.set_stage(POW_F_FIRST);
    cache.ensure_block_spectra(R_BLOCKS, r.coeffs(), n / k - 1, ledger)?;
    let mut f = f_n.zero_extend(m).into_coeffs();
    extend_solution(&mut f, n, m, plan, S_BLOCKS, None, &mut cache, ledger)?;

    ledger.set_stage(POW_LOG);
    let sigma_f = log_extend_sigma(&f, &sigma[..m], S_BLOCKS, plan, &mut cache, ledger)?;

    ledger.set_stage(POW_FINAL);
    let inv = reciprocals(2 * m);
    let w_hat: Vec<C64> = (m..2 * m).map(|i| (sigma[i] - sigma_f[i]) * inv[i]).collect();
    ledger.count_const_mul(m);
    ledger.count_add(m);
    let out = final_multiply(&f, &w_hat, plan, &mut cache, ledger)?;
    ledger.set_stage(prev);
    Ok(TruncatedSeries::new(out))
}

/// `h^C mod x^order` for `h_0 = 1`.
pub fn fast_pow(h: &TruncatedSeries, c: PowExponent, order: usize) -> Result<TruncatedSeries> {
    fast_pow_metered(h, c, order, PlanOverrides::default(), &mut CostLedger::new()).map(|(f, _)| f)
}

/// As [`fast_pow`], with plan overrides and DFT accounting.
pub fn fast_pow_metered(
    h: &TruncatedSeries,
    c: PowExponent,
    order: usize,
    overrides: PlanOverrides,
    ledger: &mut CostLedger,
) -> Result<(TruncatedSeries, PlanChoice)> {
    if h.order() < order {
        return Err(SeriesError::OrderTooLarge { requested: order, available: h.order() });
    }
    if h.coeff(0) != ONE {
        return Err(SeriesError::Precondition("power needs constant term 1".into()));
    }
    let choice = choose_plan(order, overrides)?;
    let h = h.truncate(order)?;
    if c.value() == ZERO {
        return Ok((TruncatedSeries::one(order), choice));
    }
    if c.value() == ONE {
        return Ok((h, choice));
    }
    let f = match choice {
        PlanChoice::OracleFallback => oracle::oracle_pow(&h, c.value(), order)?,
        PlanChoice::Blocked(plan) => pow_with_plan(&h, c, &plan, ledger)?.truncate(order)?,
    };
    Ok((f, choice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::report;
    use rand::{Rng, SeedableRng};

    fn damped(n: usize, seed: u64) -> TruncatedSeries {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        TruncatedSeries::new(
            (0..n)
                .map(|i| {
                    if i == 0 {
                        ONE
                    } else {
                        let s = 1.0 / ((i + 1) * (i + 1)) as f64;
                        C64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)) * s
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn cube_of_one_plus_x() {
        let h = TruncatedSeries::from_real(&[1., 1.]).zero_extend(16);
        for order in [8, 16] {
            let f = fast_pow(&h, 3.0.into(), order).unwrap();
            let mut expect = vec![0.0; order];
            expect[..4].copy_from_slice(&[1., 3., 3., 1.]);
            assert!(f.max_abs_diff(&TruncatedSeries::from_real(&expect)) < 1e-12);
        }
        let plan = BlockPlan::new(2, 4, 8).unwrap();
        let f = pow_with_plan(&h, 3.0.into(), &plan, &mut CostLedger::new()).unwrap();
        let mut expect = vec![0.0; 16];
        expect[..4].copy_from_slice(&[1., 3., 3., 1.]);
        assert!(f.max_abs_diff(&TruncatedSeries::from_real(&expect)) < 1e-12);
    }

    #[test]
    fn minus_one_is_the_inverse() {
        let h = damped(512, 3);
        let f = fast_pow(&h, (-1.0).into(), 512).unwrap();
        let r = oracle::oracle_inverse(&h, 512).unwrap();
        assert!(f.max_abs_diff(&r) < 1e-8);
    }

    #[test]
    fn short_circuits_and_preconditions() {
        let h = damped(40, 1);
        assert_eq!(fast_pow(&h, 0.0.into(), 40).unwrap(), TruncatedSeries::one(40));
        assert_eq!(fast_pow(&h, 1.0.into(), 40).unwrap(), h);
        let bad = TruncatedSeries::from_real(&[2., 1.]);
        assert!(matches!(fast_pow(&bad, 0.5.into(), 2), Err(SeriesError::Precondition(_))));
    }

    #[test]
    fn s_iteration_examples() {
        let plan = BlockPlan::new(2, 4, 8).unwrap();
        let mut l = CostLedger::new();
        // h = 1 + x, C = 2: s = 2/(1+x).
        let h = TruncatedSeries::from_real(&[1., 1.]);
        let rho = oracle::oracle_inverse(&h.zero_extend(4), 4).unwrap();
        let s_n = TruncatedSeries::from_real(&[2., -2., 2.]);
        let mut cache = BlockCache::new(2);
        let s = s_iteration(&h, &rho, &s_n, 2.0.into(), &plan, &mut cache, &mut l).unwrap();
        let expect: Vec<f64> = (0..15).map(|i| if i % 2 == 0 { 2.0 } else { -2.0 }).collect();
        assert!(s.max_abs_diff(&TruncatedSeries::from_real(&expect)) < 1e-13);

        // h = 1: s = 0 for any exponent.
        let one = TruncatedSeries::one(16);
        let mut cache = BlockCache::new(2);
        let c = PowExponent::new(0.3, 0.7);
        let s = s_iteration(&one, &one.truncate(4).unwrap(), &TruncatedSeries::zero(3), c, &plan, &mut cache, &mut l).unwrap();
        assert_eq!(s.max_abs(), 0.0);

        // Random h against C h' / h.
        let plan = BlockPlan::new(4, 16, 64).unwrap();
        let h = damped(128, 11);
        let c = C64::new(0.5, 0.25);
        let inv = oracle::oracle_inverse(&h, 128).unwrap();
        let expect = h.derivative().scale(c).mul_mod(&inv, 127);
        let mut cache = BlockCache::new(4);
        let s = s_iteration(&h, &inv.truncate(16).unwrap(), &expect.truncate(15).unwrap(), c.into(), &plan, &mut cache, &mut l).unwrap();
        assert!(s.max_abs_diff(&expect) < 1e-9);
    }

    #[test]
    fn matches_oracle_for_odd_and_even_windows() {
        for (k, n, m) in [(2, 4, 16), (2, 2, 16), (4, 12, 48), (8, 32, 128)] {
            let plan = BlockPlan::new(k, n, m).unwrap();
            let h = damped(2 * m, m as u64);
            for c in [PowExponent::new(0.5, 0.0), PowExponent::new(0.3, 0.7), PowExponent::new(-2.0, 0.0)] {
                let mut l = CostLedger::new();
                let f = pow_with_plan(&h, c, &plan, &mut l).unwrap();
                let o = oracle::oracle_pow(&h, c.value(), 2 * m).unwrap();
                assert!(f.max_abs_diff(&o) < 1e-10 * (1.0 + o.max_abs()), "{k} {n} {m} {c:?}");
            }
        }
    }

    #[test]
    fn stage_costs_follow_the_model() {
        let plan = BlockPlan::new(4, 16, 128).unwrap();
        let mut l = CostLedger::new();
        pow_with_plan(&damped(256, 9), PowExponent::new(0.5, 0.0), &plan, &mut l).unwrap();
        let rep = report(&l, &plan);
        let (r, p) = (32.0, 4.0);
        let total = 40.5 - 10.5 * p / r + 20.0 / p - 12.0 / r;
        assert!((rep.total_per_fm("pow.") - total).abs() < 1e-9, "{}", rep.to_text());
    }
}
