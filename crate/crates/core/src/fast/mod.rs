//! Fast inverse, logarithm, exponential and constant power.
//!
//! The exponential and the power both run in two halves around a frontier
//! `m`. The first half extends `f mod x^m` by `n` coefficients at a time from
//! a bootstrap of order `n`, solving `f' = g f` blockwise. The second half
//! computes `ln(f mod x^m)` to order `2m` by the same kind of block
//! iteration, then finishes with one Newton step
//! `f_{..2m} = f_{..m} + f_{..m} (target - ln f_{..m})`. All block spectra
//! are cached and reused between the stages.
//!
//! Shifts by `x^(m-1)` in the underlying recurrences are made block aligned
//! by working with `x g` in place of `g`: the series `x h'` and `x s` are
//! what get cut into blocks.

mod newton;
mod exp;
mod plan;
mod pow;

pub use newton::{fast_inverse, fast_inverse_metered, fast_log, fast_log_metered};
pub use exp::{exp_first_half, exp_with_plan, fast_exp, fast_exp_metered, log_extend, ExpHalf};
pub use plan::{choose_plan, PlanChoice, PlanOverrides, MIN_BLOCKED_ORDER};
pub use pow::{fast_pow, fast_pow_metered, pow_with_plan, s_iteration, PowExponent};

/// Stage tags.
pub mod stage {
    pub const BOOT_E: &str = "bootstrap.E(n)";
    pub const BOOT_I: &str = "bootstrap.I(n)";
    pub const EXP_STAGE1: &str = "exp.stage1";
    pub const EXP_LOG: &str = "exp.log";
    pub const EXP_FINAL: &str = "exp.final";
    pub const POW_S_FIRST: &str = "pow.s.first";
    pub const POW_S_SECOND: &str = "pow.s.second";
    pub const POW_F_FIRST: &str = "pow.f.first";
    pub const POW_LOG: &str = "pow.log";
    pub const POW_FINAL: &str = "pow.final";
}

/// Series labels for block spectra and other transforms.
pub mod label {
    pub const F_BLOCKS: &str = "f-blocks";
    pub const R_BLOCKS: &str = "r-blocks";
    pub const DH_BLOCKS: &str = "dh-blocks";
    pub const S_BLOCKS: &str = "s-blocks";
    pub const SF_BLOCKS: &str = "sf-blocks";
    pub const H_BLOCKS: &str = "h-blocks";
    pub const RHO_BLOCKS: &str = "rho-blocks";
    pub const WINDOW_BLOCKS: &str = "dh-window-blocks";
    pub const J_BLOCKS: &str = "j-blocks";
    pub const W_BLOCKS: &str = "w-blocks";
    pub const E_BLOCKS: &str = "e-blocks";
    pub const RESTORE: &str = "restore";
    pub const U_RESTORE: &str = "u-restore";
    pub const NEWTON: &str = "newton";
}
