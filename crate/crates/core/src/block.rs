//! Blockwise products in DFT-image space.
//!
//! Series are cut into blocks of `k` coefficients and each block is
//! transformed once, into a spectrum of length `3k` (a double DFT of order
//! `(2k, k)` or a plain order-`3k` DFT). Products of two or three block
//! series are then assembled from pointwise products in that space, which
//! only ever costs one inverse transform per output block.
//!
//! The central routine is the triple middle product
//! `q = f * floor(g h / x^m) mod x^n` for `k | m` and `k | n`: with
//! `u_i = sum_{mu + nu = m/k + i} b_mu c_nu` and
//! `theta = floor(u_{-1} / x^k)`, one has
//! `floor(g h / x^m) = theta + sum_{i >= 0} u_i x^(ik)` and
//! `q = sum_i d_i x^(ik) mod x^n` with
//! `d_i = a_i theta + sum_{lambda + mu = i} a_lambda u_mu`.
//! Beyond the cached block spectra this takes one inverse (for `u_{-1}`), one
//! forward (for `theta`) and `n/k` inverses (for the `d_i`).

use std::collections::BTreeMap;

use crate::error::{Result, SeriesError};
use crate::fft::{self, mul_acc, Polynomial, Spectrum, SpectrumKind, C64, ZERO};
use crate::ledger::{CostLedger, THETA_INVERSE};
use crate::series::TruncatedSeries;

pub const THETA_FORWARD: &str = "theta-forward";
pub const TRIPLE_RESTORE: &str = "triple-restore";

/// Block layout for the extension algorithms: block size `k`, extension step
/// (and bootstrap order) `n`, and frontier `m`, with `k | n | m`. The
/// algorithms compute to `target = 2m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub target: usize,
}

impl BlockPlan {
    pub fn new(k: usize, n: usize, m: usize) -> Result<Self> {
        if k == 0 || !k.is_power_of_two() {
            return Err(SeriesError::InvalidPlan(format!("block size {k} must be a power of two")));
        }
        if n < k || n % k != 0 {
            return Err(SeriesError::InvalidPlan(format!("k={k} must divide n={n}")));
        }
        if m < n || m % n != 0 {
            return Err(SeriesError::InvalidPlan(format!("n={n} must divide m={m}")));
        }
        Ok(BlockPlan { k, n, m, target: 2 * m })
    }

    /// `m / k`, the number of F(k)-units in one F(m)-unit.
    pub fn ratio(&self) -> usize {
        self.m / self.k
    }

    /// Blocks per extension step, `n / k`.
    pub fn step_blocks(&self) -> usize {
        self.n / self.k
    }
}

/// How a block is taken to image space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Double DFT of order `(2k, k)`; its first `2k` values double as the
    /// order-`2k` DFT.
    Double,
    /// Order-`3k` DFT through the radix-3 split.
    Triple,
    /// Plain order-`2k` DFT, for products that fit in `2k` terms.
    Half,
}

/// Forward transform of one block, `k` being the plan's block size.
pub fn transform_block(
    p: &Polynomial,
    kind: BlockKind,
    k: usize,
    ledger: &mut CostLedger,
    label: &'static str,
) -> Result<Spectrum> {
    match kind {
        BlockKind::Double => fft::double_dft(p, 2 * k, k, ledger, label),
        BlockKind::Triple => fft::dft_3k(p, k, ledger, label),
        BlockKind::Half => fft::dft(p, 2 * k, ledger, label),
    }
}

/// Inverse transform of any block spectrum.
pub fn restore_block(s: &Spectrum, ledger: &mut CostLedger, label: &'static str) -> Result<Polynomial> {
    match s.kind {
        SpectrumKind::Double { .. } => fft::inverse_double_dft(s, ledger, label),
        SpectrumKind::Triple(_) => fft::inverse_dft_3k(s, ledger, label),
        SpectrumKind::Plain(_) => fft::inverse_dft(s, ledger, label),
    }
}

#[derive(Clone, Debug)]
struct BlockStore {
    block_len: usize,
    spectra: Vec<Spectrum>,
}

/// Block spectra per series label. Spectrum `i` of a label is the transform
/// of coefficients `[i*len, (i+1)*len)` of that series and is never
/// recomputed once stored.
#[derive(Clone, Debug)]
pub struct BlockCache {
    k: usize,
    stores: BTreeMap<&'static str, BlockStore>,
}

impl BlockCache {
    pub fn new(k: usize) -> Self {
        BlockCache { k, stores: BTreeMap::new() }
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    /// Ensures double-DFT spectra of `k`-blocks `0..=upto` of `source`. Returns
    /// the number of blocks newly transformed.
    pub fn ensure_block_spectra(
        &mut self,
        label: &'static str,
        source: &[C64],
        upto: usize,
        ledger: &mut CostLedger,
    ) -> Result<usize> {
        self.ensure_with(label, self.k, BlockKind::Double, source, upto, ledger)
    }

    /// As [`Self::ensure_block_spectra`] with an explicit block length (`k` or
    /// `2k`) and transform kind for the new blocks.
    pub fn ensure_with(
        &mut self,
        label: &'static str,
        block_len: usize,
        kind: BlockKind,
        source: &[C64],
        upto: usize,
        ledger: &mut CostLedger,
    ) -> Result<usize> {
        let k = self.k;
        let store = self
            .stores
            .entry(label)
            .or_insert_with(|| BlockStore { block_len, spectra: Vec::new() });
        if store.block_len != block_len {
            return Err(SeriesError::Precondition(format!(
                "series '{label}' uses blocks of {} coefficients, not {block_len}",
                store.block_len
            )));
        }
        let needed = (upto + 1) * block_len;
        if source.len() < needed {
            return Err(SeriesError::SeriesTooShort { label: label.to_string(), needed, available: source.len() });
        }
        let start = store.spectra.len();
        for i in start..=upto {
            let block = Polynomial::new(source[i * block_len..(i + 1) * block_len].to_vec());
            store.spectra.push(transform_block(&block, kind, k, ledger, label)?);
        }
        Ok((upto + 1).saturating_sub(start))
    }

    /// Number of blocks of `label` transformed so far.
    pub fn transformed(&self, label: &str) -> usize {
        self.stores.get(label).map_or(0, |s| s.spectra.len())
    }

    /// Spectra `0..count` of `label`.
    pub fn spectra(&self, label: &str, count: usize) -> Result<&[Spectrum]> {
        let have = self.transformed(label);
        if have < count {
            return Err(SeriesError::MissingSpectra { label: label.to_string(), index: have });
        }
        Ok(&self.stores[label].spectra[..count])
    }

    /// Starts series `to` with the first `count` spectra of `from`, without
    /// transforming anything.
    pub fn fork(&mut self, from: &str, to: &'static str, count: usize) -> Result<()> {
        let src = self.spectra(from, count)?.to_vec();
        let block_len = self.stores[from].block_len;
        self.stores.insert(to, BlockStore { block_len, spectra: src });
        Ok(())
    }
}

fn check_uniform(groups: &[&[Spectrum]]) -> Result<(SpectrumKind, usize)> {
    let mut kind = None;
    for s in groups.iter().flat_map(|g| g.iter()) {
        match kind {
            None => kind = Some(s.kind),
            Some(k) if k != s.kind => {
                return Err(SeriesError::KindMismatch { expected: k.to_string(), found: s.kind.to_string() })
            }
            _ => {}
        }
    }
    let kind = kind.ok_or_else(|| SeriesError::Precondition("no block spectra supplied".into()))?;
    let k = match kind {
        SpectrumKind::Double { l, k } if l == 2 * k => k,
        SpectrumKind::Triple(k) => k,
        other => {
            return Err(SeriesError::KindMismatch { expected: "double(2k,k) or triple(3k)".into(), found: other.to_string() })
        }
    };
    Ok((kind, k))
}

/// Image-space convolution term `sum_{mu + nu = target} b_mu * c_nu`.
fn convolve_at(
    acc: &mut [C64],
    b: &[&[C64]],
    c: &[&[C64]],
    target: usize,
    ledger: &mut CostLedger,
) {
    if b.is_empty() || c.is_empty() {
        return;
    }
    let lo = target.saturating_sub(c.len() - 1);
    let hi = target.min(b.len() - 1);
    for mu in lo..=hi {
        mul_acc(acc, b[mu], c[target - mu], ledger);
    }
}

/// Intermediate state of a triple middle product. `u_images[0]` is `u_{-1}^*`
/// and `u_images[i + 1]` is `u_i^*`; `d_images[i]` is `d_i^*`.
#[derive(Clone, Debug)]
pub struct MiddleScratch {
    pub k: usize,
    pub kind: SpectrumKind,
    pub u_images: Vec<Spectrum>,
    /// `u_{-1}` in coefficient space (zero when the shift is zero).
    pub u_minus1: Polynomial,
    pub theta: Polynomial,
    pub d_images: Vec<Spectrum>,
}

/// Steps (i) to (iv) of the triple middle product `a * floor(b c / x^(sk)) mod
/// x^(nk)` where `s = shift_blocks` and `n = out_blocks`. Missing trailing
/// blocks of any argument count as zero.
pub fn middle_images(
    a: &[Spectrum],
    b: &[Spectrum],
    c: &[Spectrum],
    shift_blocks: usize,
    out_blocks: usize,
    ledger: &mut CostLedger,
) -> Result<MiddleScratch> {
    let (kind, k) = check_uniform(&[a, b, c])?;
    let len = kind.len();
    let bv: Vec<&[C64]> = b.iter().map(|s| s.values.as_slice()).collect();
    let cv: Vec<&[C64]> = c.iter().map(|s| s.values.as_slice()).collect();

    // (i) u_i^* for i = -1 .. out_blocks - 1.
    let mut u_images = Vec::with_capacity(out_blocks + 1);
    for i in 0..=out_blocks {
        let mut acc = vec![ZERO; len];
        if let Some(target) = (shift_blocks + i).checked_sub(1) {
            convolve_at(&mut acc, &bv, &cv, target, ledger);
        }
        u_images.push(Spectrum { values: acc, kind });
    }

    // (ii), (iii): theta = floor(u_{-1} / x^k) and its image.
    let (u_minus1, theta, theta_image) = if shift_blocks == 0 {
        (Polynomial::zero(len), Polynomial::zero(k), Spectrum::zeros(kind))
    } else {
        let u = restore_block(&u_images[0], ledger, THETA_INVERSE)?;
        let theta = Polynomial::new(u.coeffs[k..2 * k].to_vec());
        let image = match kind {
            SpectrumKind::Double { .. } => transform_block(&theta, BlockKind::Double, k, ledger, THETA_FORWARD)?,
            _ => transform_block(&theta, BlockKind::Triple, k, ledger, THETA_FORWARD)?,
        };
        (u, theta, image)
    };

    // (iv) d_i^* = a_i theta^* + sum_{lambda + mu = i} a_lambda u_mu^*.
    let av: Vec<&[C64]> = a.iter().map(|s| s.values.as_slice()).collect();
    let uv: Vec<&[C64]> = u_images[1..].iter().map(|s| s.values.as_slice()).collect();
    let mut d_images = Vec::with_capacity(out_blocks);
    for i in 0..out_blocks {
        let mut acc = vec![ZERO; len];
        if let Some(ai) = av.get(i) {
            mul_acc(&mut acc, ai, &theta_image.values, ledger);
        }
        convolve_at(&mut acc, &av, &uv, i, ledger);
        d_images.push(Spectrum { values: acc, kind });
    }

    Ok(MiddleScratch { k, kind, u_images, u_minus1, theta, d_images })
}

impl MiddleScratch {
    /// `v_{sk-1}`, coefficient `sk - 1` of `b c`, read off `u_{-1}`.
    pub fn boundary_coefficient(&self) -> C64 {
        self.u_minus1.coeffs[self.k - 1]
    }

    /// Adds `coef * sum_{lambda + stride*j = i} a_lambda * w_j` to each
    /// `d_i^*`. With `stride = 2` the `w_j` are spectra of `2k`-blocks.
    pub fn accumulate_product(
        &mut self,
        coef: C64,
        a: &[Spectrum],
        w: &[Spectrum],
        stride: usize,
        ledger: &mut CostLedger,
    ) -> Result<()> {
        check_uniform(&[a, w])?;
        if let Some(s) = a.iter().chain(w).find(|s| s.kind != self.kind) {
            return Err(SeriesError::KindMismatch { expected: self.kind.to_string(), found: s.kind.to_string() });
        }
        let len = self.kind.len();
        for (i, d) in self.d_images.iter_mut().enumerate() {
            let mut acc = vec![ZERO; len];
            for (j, wj) in w.iter().enumerate() {
                let Some(lambda) = i.checked_sub(stride * j) else { break };
                if let Some(al) = a.get(lambda) {
                    mul_acc(&mut acc, &al.values, &wj.values, ledger);
                }
            }
            for (o, v) in d.values.iter_mut().zip(&acc) {
                *o += coef * v;
            }
            ledger.count_const_mul(len);
            ledger.count_add(len);
        }
        Ok(())
    }

    /// Step (v): restores every `d_i`.
    pub fn finish_blocks(&self, ledger: &mut CostLedger) -> Result<Vec<Polynomial>> {
        self.d_images.iter().map(|d| restore_block(d, ledger, TRIPLE_RESTORE)).collect()
    }

    /// Step (v) with the overlap-add: `q mod x^(n k)`.
    pub fn finish(&self, ledger: &mut CostLedger) -> Result<TruncatedSeries> {
        let blocks = self.finish_blocks(ledger)?;
        let n = self.d_images.len() * self.k;
        ledger.count_add(n);
        Ok(crate::series::overlap_add(&blocks, self.k, n))
    }
}

/// `a * floor(b c / x^(shift_blocks k)) mod x^(out_blocks k)` from cached block
/// spectra.
pub fn triple_middle_product(
    a: &[Spectrum],
    b: &[Spectrum],
    c: &[Spectrum],
    shift_blocks: usize,
    out_blocks: usize,
    ledger: &mut CostLedger,
) -> Result<TruncatedSeries> {
    middle_images(a, b, c, shift_blocks, out_blocks, ledger)?.finish(ledger)
}

/// `a * floor(b c / x^(mk - 1)) mod x^(nk)` with `m = shift_blocks >= 1`,
/// using `floor(v / x^(s-1)) = v_{s-1} + x floor(v / x^s)` for `v = b c` and
/// reading `v_{s-1}` off `u_{-1}`. `a_coeffs` holds the first `nk`
/// coefficients of `a`.
pub fn shifted_middle_product(
    a_coeffs: &[C64],
    a: &[Spectrum],
    b: &[Spectrum],
    c: &[Spectrum],
    shift_blocks: usize,
    out_blocks: usize,
    ledger: &mut CostLedger,
) -> Result<TruncatedSeries> {
    if shift_blocks == 0 {
        return Err(SeriesError::Precondition("shifted middle product needs a positive shift".into()));
    }
    let scratch = middle_images(a, b, c, shift_blocks, out_blocks, ledger)?;
    let v = scratch.boundary_coefficient();
    let aligned = scratch.finish(ledger)?;
    let n = out_blocks * scratch.k;
    let mut q = vec![ZERO; n];
    for (j, out) in q.iter_mut().enumerate() {
        let aj = a_coeffs.get(j).copied().unwrap_or(ZERO);
        *out = v * aj;
        if j > 0 {
            *out += aligned[j - 1];
        }
    }
    ledger.count_mul(n);
    ledger.count_add(n);
    Ok(TruncatedSeries::new(q))
}

/// `a * b mod x^(p k)` for `p = out_blocks`, using the order-`2k` parts of
/// the cached spectra of `a` and fresh order-`2k` transforms of the blocks of
/// `b` (`b` is read up to `p k` coefficients).
pub fn short_product_2k(
    a: &[Spectrum],
    b: &[C64],
    k: usize,
    out_blocks: usize,
    ledger: &mut CostLedger,
    forward_label: &'static str,
    restore_label: &'static str,
) -> Result<Vec<C64>> {
    let av = a.iter().take(out_blocks).map(|s| s.order_2k_part(k)).collect::<Result<Vec<_>>>()?;
    let mut bspec = Vec::with_capacity(out_blocks);
    for mu in 0..out_blocks {
        let mut blk: Vec<C64> = b.iter().skip(mu * k).take(k).copied().collect();
        blk.resize(k, ZERO);
        bspec.push(fft::dft(&Polynomial::new(blk), 2 * k, ledger, forward_label)?);
    }
    let bv: Vec<&[C64]> = bspec.iter().map(|s| s.values.as_slice()).collect();
    let mut blocks = Vec::with_capacity(out_blocks);
    for i in 0..out_blocks {
        let mut acc = vec![ZERO; 2 * k];
        convolve_at(&mut acc, &av, &bv, i, ledger);
        let e = fft::inverse_dft(&Spectrum { values: acc, kind: SpectrumKind::Plain(2 * k) }, ledger, restore_label)?;
        blocks.push(e);
    }
    let n = out_blocks * k;
    ledger.count_add(n);
    Ok(crate::series::overlap_add(&blocks, k, n).into_coeffs())
}

/// `floor(b c / x^(s k)) mod x^(p k)` for `s = shift_blocks`, `p =
/// out_blocks`, from order-`2k` parts only: each `u_i` fits in `2k` terms, so
/// `p + 1` inverse order-`2k` transforms suffice.
pub fn middle_product_2k(
    b: &[Spectrum],
    c: &[Spectrum],
    k: usize,
    shift_blocks: usize,
    out_blocks: usize,
    ledger: &mut CostLedger,
    label: &'static str,
) -> Result<Vec<C64>> {
    let bv = b.iter().map(|s| s.order_2k_part(k)).collect::<Result<Vec<_>>>()?;
    let cv = c.iter().map(|s| s.order_2k_part(k)).collect::<Result<Vec<_>>>()?;
    let n = out_blocks * k;
    let mut out = vec![ZERO; n];
    for i in 0..=out_blocks {
        let Some(target) = (shift_blocks + i).checked_sub(1) else { continue };
        let mut acc = vec![ZERO; 2 * k];
        convolve_at(&mut acc, &bv, &cv, target, ledger);
        let u = fft::inverse_dft(&Spectrum { values: acc, kind: SpectrumKind::Plain(2 * k) }, ledger, label)?;
        // u_{i-1} sits at x^((i-1)k) after the shift; i = 0 is u_{-1}.
        for (j, &cf) in u.coeffs.iter().enumerate() {
            let pos = (i * k + j).checked_sub(k);
            if let Some(pos) = pos.filter(|&p| p < n) {
                out[pos] += cf;
            }
        }
    }
    ledger.count_add(n);
    Ok(out)
}

/// Splits `f` into `count` blocks of `k` (zero padded) and transforms each.
pub fn block_spectra(
    f: &TruncatedSeries,
    k: usize,
    count: usize,
    kind: BlockKind,
    ledger: &mut CostLedger,
    label: &'static str,
) -> Result<Vec<Spectrum>> {
    let padded = f.zero_extend(count * k);
    crate::series::split_blocks(&padded, k)
        .iter()
        .map(|b| transform_block(b, kind, k, ledger, label))
        .collect()
}

/// Series-level triple middle product `f * floor(g h / x^m) mod x^n` for
/// `k | m`, `k | n`, transforming the blocks first. Only the transforms made
/// after the block spectra are attributable to the product itself; they are
/// tagged with [`THETA_INVERSE`], [`THETA_FORWARD`] and [`TRIPLE_RESTORE`].
pub fn triple_middle_product_series(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    h: &TruncatedSeries,
    m: usize,
    n: usize,
    k: usize,
    kind: BlockKind,
    ledger: &mut CostLedger,
) -> Result<TruncatedSeries> {
    if m % k != 0 || n % k != 0 || n == 0 {
        return Err(SeriesError::Precondition(format!("shift {m} and order {n} must be positive multiples of k={k}")));
    }
    let span = (m + n) / k;
    let a = block_spectra(f, k, n / k, kind, ledger, "a-blocks")?;
    let b = block_spectra(&g.zero_extend(m + n), k, span, kind, ledger, "b-blocks")?;
    let c = block_spectra(&h.zero_extend(m + n), k, span, kind, ledger, "c-blocks")?;
    triple_middle_product(&a, &b, &c, m / k, n / k, ledger)
}

/// Series-level `f * floor(g h / x^s) mod x^n` with `s + 1` a positive
/// multiple of `k` and `k | n`.
pub fn shifted_middle_product_series(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    h: &TruncatedSeries,
    s: usize,
    n: usize,
    k: usize,
    kind: BlockKind,
    ledger: &mut CostLedger,
) -> Result<TruncatedSeries> {
    let m = s + 1;
    if m % k != 0 || n % k != 0 || n == 0 {
        return Err(SeriesError::Precondition(format!("shift {s} + 1 and order {n} must be positive multiples of k={k}")));
    }
    let span = (m + n) / k;
    let a = block_spectra(f, k, n / k, kind, ledger, "a-blocks")?;
    let b = block_spectra(&g.zero_extend(m + n), k, span, kind, ledger, "b-blocks")?;
    let c = block_spectra(&h.zero_extend(m + n), k, span, kind, ledger, "c-blocks")?;
    let a_coeffs = f.zero_extend(n);
    shifted_middle_product(a_coeffs.coeffs(), &a, &b, &c, m / k, n / k, ledger)
}
