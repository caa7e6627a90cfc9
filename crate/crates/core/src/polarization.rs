//! The length-`l^n` transform `G_n = B_n G^{⊗n}`, encoding, successive
//! cancellation decoding, Bhattacharyya estimates for the synthetic
//! channels and the degradation order licensed by the curve structure.
//!
//! Rows of `G_n`, message positions and synthetic channels share one
//! 0-based index `r` in decoding order; row `r` is the evaluation of the
//! multi-index monomial `k = l^n - 1 - r` (see [`crate::codeset`]).

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{split_exact, Dmc};
use crate::codeset::{digits, MonomialIndexSet};
use crate::curve::PointedCurve;
use crate::error::{Error, Result};
use crate::galois::{FieldElement, FiniteField};
use crate::kernel::Kernel;
use crate::linalg::Matrix;

/// Largest `l^n` for permutations and encoding.
pub const MAX_LENGTH: usize = 1 << 20;
/// Largest `l^n` for materializing `G_n`.
pub const MAX_MATERIALIZED: usize = 1024;
/// Largest `q^l` for the per-stage marginalization.
pub const MAX_STAGE_INPUTS: u64 = 1 << 16;
/// Largest `l^n` for the degradation order.
pub const MAX_ORDER_INDICES: usize = 4096;
/// Samples per independently seeded Monte Carlo stream.
const CHUNK: usize = 256;

fn length(l: usize, n: usize, cap: usize) -> Result<usize> {
    l.checked_pow(n as u32)
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::TooLarge(format!("{l}^{n} exceeds {cap}")))
}

fn reverse_digits(j: usize, l: usize, n: usize) -> usize {
    let mut v = j;
    let mut out = 0;
    for _ in 0..n {
        out = out * l + v % l;
        v /= l;
    }
    out
}

/// Digit reversal on `[0, l^n)`: `perm[i]` has the base-`l` digits of `i`
/// in reverse order.
pub fn bn_permutation(l: usize, n: usize) -> Result<Vec<usize>> {
    if l < 2 || n < 1 {
        return Err(Error::PreconditionViolated(format!("l = {l}, n = {n}")));
    }
    let total = length(l, n, MAX_LENGTH)?;
    Ok((0..total).map(|j| reverse_digits(j, l, n)).collect())
}

/// `B_n · G^{⊗n}`.
pub fn gn_matrix(k: &Kernel, n: usize) -> Result<Matrix> {
    let l = k.size();
    let total = length(l, n, MAX_MATERIALIZED)?;
    let f = k.field();
    let g = k.matrix();
    let kron_entry = |r: usize, c: usize| {
        digits(r, l, n)
            .iter()
            .zip(digits(c, l, n))
            .fold(f.one(), |acc, (&a, b)| f.mul(acc, g[a][b]))
    };
    Ok((0..total)
        .map(|r| {
            let src = reverse_digits(r, l, n);
            (0..total).map(|c| kron_entry(src, c)).collect()
        })
        .collect())
}

/// Multi-index of row `row` (0-based) of `G_n`.
pub fn row_monomial(l: usize, n: usize, row: usize) -> Result<usize> {
    let total = length(l, n, usize::MAX)?;
    if row >= total {
        return Err(Error::OutOfRange(format!("row {row} of {total}")));
    }
    Ok(total - 1 - row)
}

/// Applies `G` along every axis of the `l × ⋯ × l` tensor `v` in place.
fn kron_transform(k: &Kernel, n: usize, v: &mut [FieldElement]) {
    let f = k.field();
    let g = k.matrix();
    let l = k.size();
    let total = v.len();
    let mut buf = vec![FieldElement::ZERO; l];
    let mut stride = 1;
    for _ in 0..n {
        let block = stride * l;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for (c, b) in buf.iter_mut().enumerate() {
                    *b = (0..l).fold(FieldElement::ZERO, |acc, a| {
                        f.add(acc, f.mul(v[base + off + a * stride], g[a][c]))
                    });
                }
                for (c, &b) in buf.iter().enumerate() {
                    v[base + off + c * stride] = b;
                }
            }
        }
        stride = block;
    }
}

/// `u · G_n` without materializing `G_n`.
pub fn encode(k: &Kernel, n: usize, u: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let l = k.size();
    let total = length(l, n, MAX_LENGTH)?;
    if u.len() != total {
        return Err(Error::LengthMismatch { expected: total, actual: u.len() });
    }
    // B_n commutes with G^{⊗n}: both digit reversals leave it invariant.
    let mut v = u.to_vec();
    kron_transform(k, n, &mut v);
    Ok((0..total).map(|j| v[reverse_digits(j, l, n)]).collect())
}

/// Successive-cancellation machinery for one kernel and channel alphabet.
struct Sc {
    l: usize,
    q: usize,
    add: Vec<usize>,
    /// `row_mul[a][v]`: `v · G[a]` as element indices.
    row_mul: Vec<Vec<Vec<usize>>>,
    /// `suffix[a]`: every codeword of `⟨G[a+1], …, G[l-1]⟩`, flattened,
    /// or empty when the syndrome trellis is smaller.
    suffix: Vec<Vec<usize>>,
    /// `trellis[a]`: `(states, step)` where `step[(c·q + x)·states + σ]` is
    /// the syndrome reached from `σ` by symbol `x` in column `c`.
    trellis: Vec<Option<(usize, Vec<u32>)>>,
}

impl Sc {
    fn new(k: &Kernel) -> Result<Sc> {
        let f = k.field();
        let l = k.size();
        let q = f.order() as usize;
        if (q as u64).checked_pow(l as u32).is_none_or(|t| t > MAX_STAGE_INPUTS) {
            return Err(Error::TooLarge(format!("{q}^{l} stage inputs exceed {MAX_STAGE_INPUTS}")));
        }
        let elems: Vec<FieldElement> = f.elements().collect();
        let add = (0..q * q).map(|i| f.add(elems[i / q], elems[i % q]).index()).collect();
        let row_mul = (0..l)
            .map(|a| (0..q).map(|v| k.matrix()[a].iter().map(|&x| f.mul(elems[v], x).index()).collect()).collect())
            .collect();
        let mut suffix = vec![Vec::new(); l];
        let mut trellis = vec![None; l];
        let mut words: Vec<Vec<FieldElement>> = vec![vec![FieldElement::ZERO; l]];
        for a in (0..l).rev() {
            // a+1 parity checks against q^(l-1-a) codewords
            if a + 1 < l - 1 - a {
                trellis[a] = Some(syndrome_trellis(f, &k.matrix()[a + 1..], l));
            } else {
                suffix[a] = words.iter().flatten().map(|x| x.index()).collect();
            }
            let mut next = Vec::with_capacity(words.len() * q);
            for &v in &elems {
                for w in &words {
                    let mut x = w.clone();
                    crate::linalg::axpy(f, &mut x, v, &k.matrix()[a]);
                    next.push(x);
                }
            }
            words = next;
        }
        Ok(Sc { l, q, add, row_mul, suffix, trellis })
    }

    /// Likelihoods of `v_a` given per-column likelihoods `lik(c)` and the
    /// known contribution `prefix` of `v_0, …, v_{a-1}`.
    fn stage(&self, a: usize, lik: impl Fn(usize) -> usize, liks: &[f64], prefix: &[usize], out: &mut [f64]) {
        let (l, q) = (self.l, self.q);
        let mut base = vec![0usize; l];
        let mut dp = Vec::new();
        let mut next = Vec::new();
        for (v, o) in out.iter_mut().enumerate() {
            for c in 0..l {
                base[c] = self.add[prefix[c] * q + self.row_mul[a][v][c]] * q;
            }
            if let Some((states, step)) = &self.trellis[a] {
                dp.clear();
                dp.resize(*states, 0.0);
                dp[0] = 1.0;
                for c in 0..l {
                    next.clear();
                    next.resize(*states, 0.0);
                    for x in 0..q {
                        let g = liks[lik(c) + self.add[base[c] + x]];
                        if g == 0.0 {
                            continue;
                        }
                        let row = &step[(c * q + x) * states..(c * q + x + 1) * states];
                        for (s, &p) in dp.iter().enumerate() {
                            next[row[s] as usize] += p * g;
                        }
                    }
                    std::mem::swap(&mut dp, &mut next);
                }
                *o = dp[0];
                continue;
            }
            let mut sum = 0.0;
            for s in self.suffix[a].chunks_exact(l) {
                let mut p = 1.0;
                for c in 0..l {
                    p *= liks[lik(c) + self.add[base[c] + s[c]]];
                }
                sum += p;
            }
            *o = sum;
        }
        let max = out.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            out.iter_mut().for_each(|x| *x /= max);
        } else {
            out.iter_mut().for_each(|x| *x = 1.0);
        }
    }

    /// Decodes the block whose channel likelihoods are `liks` (`len · q`
    /// values, natural order of `G^{⊗m}`). `leaf(position, likelihoods)`
    /// chooses each symbol. Returns the re-encoded block `u · G^{⊗m}`.
    fn decode(
        &self,
        m: usize,
        liks: &[f64],
        offset: usize,
        leaf: &mut dyn FnMut(usize, &[f64]) -> usize,
    ) -> Vec<usize> {
        let (l, q) = (self.l, self.q);
        if m == 0 {
            return vec![leaf(offset, liks)];
        }
        let sub = liks.len() / q / l;
        let mut prefix = vec![0usize; sub * l];
        let mut parts: Vec<Vec<usize>> = Vec::with_capacity(l);
        let mut child = vec![0.0; sub * q];
        for a in 0..l {
            for d in 0..sub {
                let pre = &prefix[d * l..(d + 1) * l];
                self.stage(a, |c| (c * sub + d) * q, liks, pre, &mut child[d * q..(d + 1) * q]);
            }
            let v = self.decode(m - 1, &child, offset + a * sub, leaf);
            for d in 0..sub {
                for c in 0..l {
                    let p = &mut prefix[d * l + c];
                    *p = self.add[*p * q + self.row_mul[a][v[d]][c]];
                }
            }
            parts.push(v);
        }
        // prefix now holds Σ_a v_a G[a] per sub-position
        let mut out = vec![0; sub * l];
        for d in 0..sub {
            for c in 0..l {
                out[c * sub + d] = prefix[d * l + c];
            }
        }
        out
    }
}

/// Transition table of the syndrome trellis of `⟨rows⟩`: states are
/// syndromes under a parity-check matrix, and a word is a codeword iff its
/// path ends at state 0.
fn syndrome_trellis(f: &FiniteField, rows: &[Vec<FieldElement>], l: usize) -> (usize, Vec<u32>) {
    let q = f.order() as usize;
    let h = crate::linalg::nullspace(f, rows, l);
    let states = q.pow(h.len() as u32);
    let elems: Vec<FieldElement> = f.elements().collect();
    let unpack = |mut s: usize| -> Vec<FieldElement> {
        (0..h.len())
            .map(|_| {
                let e = elems[s % q];
                s /= q;
                e
            })
            .collect()
    };
    let pack = |v: &[FieldElement]| -> u32 { v.iter().rev().fold(0, |acc, e| acc * q as u32 + e.index() as u32) };
    let mut step = vec![0u32; l * q * states];
    for c in 0..l {
        for (x, &xe) in elems.iter().enumerate() {
            for s in 0..states {
                let v: Vec<FieldElement> =
                    unpack(s).iter().zip(&h).map(|(&e, hr)| f.add(e, f.mul(xe, hr[c]))).collect();
                step[(c * q + x) * states + s] = pack(&v);
            }
        }
    }
    (states, step)
}

/// Channel likelihoods in the decoder's natural order.
fn natural_likelihoods(w: &Dmc, y: &[usize], l: usize, n: usize) -> Vec<f64> {
    let q = w.inputs();
    let mut liks = vec![0.0; y.len() * q];
    for (j, slot) in liks.chunks_exact_mut(q).enumerate() {
        let yj = y[reverse_digits(j, l, n)];
        for (x, s) in slot.iter_mut().enumerate() {
            *s = w.trans()[x][yj];
        }
    }
    liks
}

/// Successive-cancellation decoding. `frozen[r]` fixes message position
/// `r`; other positions take the most likely symbol, ties going to the
/// canonically smaller element.
pub fn decode_sc(
    k: &Kernel,
    n: usize,
    w: &Dmc,
    y: &[usize],
    frozen: &[Option<FieldElement>],
) -> Result<Vec<FieldElement>> {
    if **k.field() != **w.field() {
        return Err(Error::FieldMismatch);
    }
    let l = k.size();
    let total = length(l, n, MAX_LENGTH)?;
    if y.len() != total {
        return Err(Error::LengthMismatch { expected: total, actual: y.len() });
    }
    if frozen.len() != total {
        return Err(Error::LengthMismatch { expected: total, actual: frozen.len() });
    }
    if let Some(&bad) = y.iter().find(|&&v| v >= w.outputs()) {
        return Err(Error::OutOfRange(format!("channel output {bad}")));
    }
    let sc = Sc::new(k)?;
    Ok(decode_with(&sc, n, w, y, frozen))
}

fn decode_with(sc: &Sc, n: usize, w: &Dmc, y: &[usize], frozen: &[Option<FieldElement>]) -> Vec<FieldElement> {
    let liks = natural_likelihoods(w, y, sc.l, n);
    let mut u = vec![FieldElement::ZERO; y.len()];
    let mut leaf = |pos: usize, lik: &[f64]| -> usize {
        let v = match frozen[pos] {
            Some(v) => v.index(),
            None => {
                let mut best = 0;
                for (x, &p) in lik.iter().enumerate() {
                    if p > lik[best] {
                        best = x;
                    }
                }
                best
            }
        };
        u[pos] = FieldElement(v as u16);
        v
    };
    sc.decode(n, &liks, 0, &mut leaf);
    u
}

/// Monte Carlo estimates of the synthetic channels' Bhattacharyya parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZEstimates {
    pub l: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `est[k]`: estimate for the channel of multi-index `k`.
    pub est: Vec<f64>,
    /// Standard error of each estimate.
    pub se: Vec<f64>,
}

/// Genie-aided estimates: the all-zero word is sent, every earlier symbol
/// is revealed, and the likelihood ratios at each position are averaged.
/// Valid because the channel is symmetric under the field operations.
pub fn mc_estimate_z(k: &Kernel, n: usize, w: &Dmc, samples: u64, seed: u64) -> Result<ZEstimates> {
    if **k.field() != **w.field() {
        return Err(Error::FieldMismatch);
    }
    if w.sof_witnesses()?.is_none() {
        return Err(Error::NotSymmetric);
    }
    let l = k.size();
    let total = length(l, n, MAX_LENGTH)?;
    let sc = Sc::new(k)?;
    let q = w.inputs();
    let cdf: Vec<f64> = w.trans()[0]
        .iter()
        .scan(0.0, |s, &p| {
            *s += p;
            Some(*s)
        })
        .collect();
    let chunks = (samples as usize).div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK.min(samples as usize - chunk * CHUNK);
            let mut sum = vec![0.0; total];
            let mut sq = vec![0.0; total];
            let mut y = vec![0usize; total];
            for _ in 0..count {
                for yj in y.iter_mut() {
                    let r: f64 = rng.gen();
                    *yj = cdf.iter().position(|&c| r < c).unwrap_or(cdf.len() - 1);
                }
                let liks = natural_likelihoods(w, &y, l, n);
                let mut leaf = |pos: usize, lik: &[f64]| -> usize {
                    let z = if lik[0] > 0.0 {
                        lik[1..].iter().map(|&p| (p / lik[0]).sqrt()).sum::<f64>() / (q - 1) as f64
                    } else {
                        1.0
                    };
                    sum[pos] += z;
                    sq[pos] += z * z;
                    0
                };
                sc.decode(n, &liks, 0, &mut leaf);
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; total];
    let mut sq = vec![0.0; total];
    for (s, s2) in &partial {
        for r in 0..total {
            sum[r] += s[r];
            sq[r] += s2[r];
        }
    }
    let ns = samples.max(1) as f64;
    let mut est = vec![0.0; total];
    let mut se = vec![0.0; total];
    for r in 0..total {
        let mean = sum[r] / ns;
        let var = (sq[r] / ns - mean * mean).max(0.0);
        est[total - 1 - r] = mean.clamp(0.0, 1.0);
        se[total - 1 - r] = if samples > 1 { (var / (ns - 1.0)).sqrt() } else { 0.0 };
    }
    Ok(ZEstimates { l, n, samples, seed, est, se })
}

/// Exact Bhattacharyya parameters of the synthetic channels by recursive
/// one-step splits; `result[k]` belongs to multi-index `k`.
pub fn exact_z(k: &Kernel, n: usize, w: &Dmc) -> Result<Vec<f64>> {
    let l = k.size();
    let total = length(l, n, MAX_ORDER_INDICES)?;
    let mut level = vec![w.clone()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * l);
        for ch in &level {
            for i in 0..l {
                next.push(split_exact(ch, k, i)?);
            }
        }
        level = next;
    }
    // level[r] is the channel of row r (first split digit most significant)
    Ok((0..total).map(|kidx| level[total - 1 - kidx].bhattacharyya()).collect())
}

/// The `dim` multi-indices with the smallest `z[k]`; ties go to the smaller index.
pub fn select_info_set(z: &[f64], l: usize, n: usize, dim: usize) -> Result<MonomialIndexSet> {
    let total = length(l, n, MAX_LENGTH)?;
    if z.len() != total {
        return Err(Error::LengthMismatch { expected: total, actual: z.len() });
    }
    if dim > total {
        return Err(Error::OutOfRange(format!("dimension {dim} exceeds {total}")));
    }
    let mut idx: Vec<usize> = (0..total).collect();
    idx.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    MonomialIndexSet::new(l, n, idx.into_iter().take(dim))
}

/// Frozen map for an information set: every position outside it is fixed to 0.
pub fn frozen_positions(info: &MonomialIndexSet) -> Vec<Option<FieldElement>> {
    let total = info.l().pow(info.n() as u32);
    (0..total)
        .map(|r| if info.contains(total - 1 - r) { None } else { Some(FieldElement::ZERO) })
        .collect()
}

/// Block errors over `trials` random messages on the information set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlerReport {
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
}

pub fn simulate_bler(
    k: &Kernel,
    n: usize,
    w: &Dmc,
    info: &MonomialIndexSet,
    trials: u64,
    seed: u64,
) -> Result<BlerReport> {
    if **k.field() != **w.field() {
        return Err(Error::FieldMismatch);
    }
    let l = k.size();
    length(l, n, MAX_LENGTH)?;
    if info.l() != l || info.n() != n {
        return Err(Error::LengthMismatch { expected: l, actual: info.l() });
    }
    let sc = Sc::new(k)?;
    let q = w.inputs();
    let frozen = frozen_positions(info);
    let cdfs: Vec<Vec<f64>> = w
        .trans()
        .iter()
        .map(|row| {
            row.iter()
                .scan(0.0, |s, &p| {
                    *s += p;
                    Some(*s)
                })
                .collect()
        })
        .collect();
    let chunks = (trials as usize).div_ceil(CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK.min(trials as usize - chunk * CHUNK);
            let mut errs = 0u64;
            for _ in 0..count {
                let u: Vec<FieldElement> = frozen
                    .iter()
                    .map(|fz| fz.unwrap_or_else(|| FieldElement(rng.gen_range(0..q) as u16)))
                    .collect();
                let x = encode(k, n, &u).expect("length checked");
                let y: Vec<usize> = x
                    .iter()
                    .map(|xi| {
                        let r: f64 = rng.gen();
                        let cdf = &cdfs[xi.index()];
                        cdf.iter().position(|&c| r < c).unwrap_or(cdf.len() - 1)
                    })
                    .collect();
                if decode_with(&sc, n, w, &y, &frozen) != u {
                    errs += 1;
                }
            }
            errs
        })
        .sum();
    Ok(BlerReport { trials, errors, bler: errors as f64 / trials.max(1) as f64 })
}

/// A transitively closed set of edges `i → j` meaning the channel of
/// multi-index `i` is degraded with respect to that of `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegradationOrder {
    pub l: usize,
    pub n: usize,
    succ: Vec<BTreeSet<usize>>,
}

impl DegradationOrder {
    pub fn dominates(&self, i: usize, j: usize) -> bool {
        self.succ[i].contains(&j)
    }

    /// Indices whose channels are better than that of `i`.
    pub fn successors(&self, i: usize) -> &BTreeSet<usize> {
        &self.succ[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }
}

/// Edges licensed by the curve: per digit, subtracting a generator's pole
/// order or passing to a divisor (for pole orders below `l`), and moving a
/// nonzero digit to an empty lower variable; then the transitive closure.
pub fn theoretical_order(k: &Kernel, curve: &PointedCurve, n: usize) -> Result<DegradationOrder> {
    let l = curve.len();
    if k.size() != l {
        return Err(Error::LengthMismatch { expected: l, actual: k.size() });
    }
    if l < 2 * curve.genus() as usize {
        return Err(Error::PreconditionViolated(format!("l = {l} < 2g = {}", 2 * curve.genus())));
    }
    let total = length(l, n, MAX_ORDER_INDICES)?;
    let hs = curve.hstar();
    let basis = curve.basis();
    // per-digit one-step edges
    let mut digit_edges: Vec<Vec<usize>> = vec![Vec::new(); l];
    for d in 0..l {
        if hs[d] >= l as u32 {
            continue;
        }
        for g in curve.gens() {
            if let Some(e) = hs[d].checked_sub(g.pole).and_then(|m| curve.basis_index(m)) {
                digit_edges[d].push(e);
            }
        }
        for e in 0..l {
            if e != d && basis[e].divides(&basis[d]) {
                digit_edges[d].push(e);
            }
        }
        digit_edges[d].sort_unstable();
        digit_edges[d].dedup();
    }
    let pow: Vec<usize> = (0..n).map(|t| l.pow(t as u32)).collect();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); total];
    for (i, s) in succ.iter_mut().enumerate() {
        for t in 0..n {
            let d = i / pow[t] % l;
            for &e in &digit_edges[d] {
                s.insert(i - d * pow[t] + e * pow[t]);
            }
            if d == 0 {
                continue;
            }
            for lower in 0..t {
                if (i / pow[lower]).is_multiple_of(l) {
                    s.insert(i - d * pow[t] + d * pow[lower]);
                }
            }
        }
    }
    // transitive closure, processing indices in increasing order: every
    // one-step edge goes to a smaller index
    for i in 0..total {
        let direct: Vec<usize> = succ[i].iter().copied().collect();
        let mut all = BTreeSet::new();
        for j in direct {
            debug_assert!(j < i);
            all.insert(j);
            all.extend(succ[j].iter().copied());
        }
        succ[i] = all;
    }
    Ok(DegradationOrder { l, n, succ })
}
