//! Dense linear algebra over a `FiniteField` plus exhaustive weight enumeration.

use crate::error::{Error, Result};
use crate::galois::{FieldElement, FiniteField};

/// Row-major matrix of field elements.
pub type Matrix = Vec<Vec<FieldElement>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { FieldElement::ONE } else { FieldElement::ZERO }).collect())
        .collect()
}

pub fn mat_mul(f: &FiniteField, a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![FieldElement::ZERO; cols];
            for (k, &x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (o, &y) in out.iter_mut().zip(&b[k]) {
                    *o = f.add(*o, f.mul(x, y));
                }
            }
            out
        })
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

/// `dst += c * src`
#[inline]
pub fn axpy(f: &FiniteField, dst: &mut [FieldElement], c: FieldElement, src: &[FieldElement]) {
    if c.is_zero() {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = f.add(*d, f.mul(c, s));
        }
    }
}

pub fn scale(f: &FiniteField, v: &mut [FieldElement], c: FieldElement) {
    for x in v.iter_mut() {
        *x = f.mul(*x, c);
    }
}

pub fn weight(v: &[FieldElement]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(f: &FiniteField, rows: &[Vec<FieldElement>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(m[r][c]).expect("pivot is nonzero");
        scale(f, &mut m[r], inv);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let c0 = f.neg(row[c]);
                axpy(f, row, c0, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(f: &FiniteField, rows: &[Vec<FieldElement>]) -> usize {
    rref(f, rows).1.len()
}

pub fn is_nonsingular(f: &FiniteField, m: &Matrix) -> bool {
    m.iter().all(|r| r.len() == m.len()) && rank(f, m) == m.len()
}

/// Basis of `{x : rows · x = 0}`, i.e. the dual of the row space.
pub fn nullspace(f: &FiniteField, rows: &[Vec<FieldElement>], cols: usize) -> Matrix {
    if rows.is_empty() {
        return identity(cols);
    }
    let (e, pivots) = rref(f, rows);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![FieldElement::ZERO; cols];
            v[fc] = FieldElement::ONE;
            for (row, &pc) in e.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

pub fn inverse(f: &FiniteField, m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().copied().chain(id).collect())
        .collect();
    let (e, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::SingularKernel);
    }
    Ok(e.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Whether `v` lies in the row space of `rows`.
pub fn in_span(f: &FiniteField, rows: &[Vec<FieldElement>], v: &[FieldElement]) -> bool {
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rank(f, rows) == rank(f, &ext)
}

/// F_p-basis of the GF(q)-span of `gens`: each independent generator times α^b, b < r.
fn prime_field_basis(f: &FiniteField, gens: &[Vec<FieldElement>]) -> Matrix {
    let (basis, _) = rref(f, gens);
    let mut out = Vec::with_capacity(basis.len() * f.degree() as usize);
    for g in &basis {
        for b in 0..f.degree() {
            let c = f.alpha_pow(b as u64);
            out.push(g.iter().map(|&x| f.mul(c, x)).collect());
        }
    }
    out
}

/// Minimum Hamming weight over the affine set `base + span(gens)`.
///
/// With `exclude_zero`, the all-zero vector is skipped (minimum distance of a
/// linear code when `base` is zero). Returns `None` when every candidate is
/// excluded. `budget` bounds the number of enumerated vectors.
pub fn min_weight_coset(
    f: &FiniteField,
    base: &[FieldElement],
    gens: &[Vec<FieldElement>],
    exclude_zero: bool,
    budget: u64,
) -> Result<Option<usize>> {
    let basis = prime_field_basis(f, gens);
    let p = f.characteristic() as u64;
    let count = p.checked_pow(basis.len() as u32).filter(|&c| c <= budget).ok_or_else(|| {
        Error::TooLarge(format!("{}^{} vectors exceed the enumeration budget {budget}", p, basis.len()))
    })?;
    let len = base.len();
    let floor = if exclude_zero { 1 } else { 0 };
    if p == 2 && len * f.degree() as usize <= 128 {
        let bits = f.degree() as usize;
        let pack = |v: &[FieldElement]| -> u128 {
            v.iter()
                .enumerate()
                .fold(0u128, |acc, (i, &x)| acc | ((f.poly_value(x) as u128) << (i * bits)))
        };
        let mut low = 0u128;
        for i in 0..len {
            low |= 1u128 << (i * bits);
        }
        let wt = |v: u128| -> usize {
            let mut m = v;
            for b in 1..bits {
                m |= v >> b;
            }
            (m & low).count_ones() as usize
        };
        let packed: Vec<u128> = basis.iter().map(|g| pack(g)).collect();
        let mut cur = pack(base);
        let mut best: Option<usize> = None;
        let consider = |v: u128, best: &mut Option<usize>| {
            let w = wt(v);
            if !(exclude_zero && w == 0) && best.is_none_or(|b| w < b) {
                *best = Some(w);
            }
        };
        consider(cur, &mut best);
        for i in 1..count {
            if best == Some(floor) {
                break;
            }
            cur ^= packed[i.trailing_zeros() as usize];
            consider(cur, &mut best);
        }
        return Ok(best);
    }

    // Generic odometer in base p: every digit change adds its vector once.
    let mut cur = base.to_vec();
    let mut digits = vec![0u64; basis.len()];
    let mut best: Option<usize> = None;
    let consider = |v: &[FieldElement], best: &mut Option<usize>| {
        let w = weight(v);
        if !(exclude_zero && w == 0) && best.is_none_or(|b| w < b) {
            *best = Some(w);
        }
    };
    consider(&cur, &mut best);
    'outer: for _ in 1..count {
        if best == Some(floor) {
            break;
        }
        for (d, g) in digits.iter_mut().zip(&basis) {
            for (c, &x) in cur.iter_mut().zip(g) {
                *c = f.add(*c, x);
            }
            *d += 1;
            if *d < p {
                consider(&cur, &mut best);
                continue 'outer;
            }
            *d = 0;
        }
    }
    Ok(best)
}

/// Exact minimum distance of the code spanned by `gen` by enumerating all messages.
pub fn brute_min_distance(f: &FiniteField, gen: &Matrix, budget: u64) -> Result<usize> {
    let len = gen.first().map_or(0, Vec::len);
    let zero = vec![FieldElement::ZERO; len];
    min_weight_coset(f, &zero, gen, true, budget)?
        .ok_or_else(|| Error::PreconditionViolated("code has no nonzero codeword".into()))
}
