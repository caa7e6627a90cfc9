//! Sets of multi-indices describing polar codes, and their algebraic
//! structure: decreasing closures, duals, and minimum-distance bounds.
//!
//! A multi-index `k < l^n` stands for the monomial
//! `M_{k_1}(X_1) ⋯ M_{k_n}(X_n)` where `k_1` is the least significant
//! base-`l` digit and `M_d` is the curve's `d`-th basis monomial (ascending
//! pole order). It labels row `l^n - 1 - k` of `G_n`.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::curve::PointedCurve;
use crate::error::{Error, Result};
use crate::galois::FieldElement;
use crate::kernel::{subscript, Kernel};
use crate::linalg::{self, Matrix};

/// Largest `l^n · |A|` for which generator matrices are materialized.
pub const MAX_GENERATOR_ENTRIES: usize = 1 << 20;
/// Largest number of codewords enumerated by distance oracles.
pub const MAX_CODEWORDS: u64 = 1 << 20;

/// Base-`l` digits of `k`, most significant first: `[k_n, …, k_1]`.
pub fn digits(k: usize, l: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    let mut v = k;
    for slot in d.iter_mut().rev() {
        *slot = v % l;
        v /= l;
    }
    d
}

pub fn from_digits(d: &[usize], l: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * l + x)
}

/// Digit of variable `X_t` (1-based, `X_1` least significant).
pub fn digit(k: usize, l: usize, t: usize) -> usize {
    k / l.pow(t as u32 - 1) % l
}

fn with_digit(k: usize, l: usize, t: usize, d: usize) -> usize {
    let p = l.pow(t as u32 - 1);
    k - digit(k, l, t) * p + d * p
}

/// Renders a multi-index with the curve's variable names, e.g. `y₁x₂`.
/// With `n = 1` no subscripts are used.
pub fn monomial_name(curve: &PointedCurve, n: usize, k: usize) -> String {
    let l = curve.len();
    let mut s = String::new();
    for t in 1..=n {
        let m = &curve.basis()[digit(k, l, t)];
        if m.is_constant() {
            continue;
        }
        let names: Vec<String> = curve
            .var_names()
            .iter()
            .map(|v| if n == 1 { v.to_string() } else { format!("{v}{}", subscript(t)) })
            .collect();
        s.push_str(&m.render(&names));
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

/// Parses names produced by [`monomial_name`]; subscripts may also be
/// written as `_t`. Variables without a subscript belong to `X_1`.
pub fn parse_monomial(curve: &PointedCurve, n: usize, s: &str) -> Result<usize> {
    let bad = |why: &str| Error::OutOfRange(format!("monomial {s:?}: {why}"));
    let names = curve.var_names();
    let mut exps = vec![vec![0u32; names.len()]; n];
    let chars: Vec<char> = s.trim().chars().collect();
    let mut i = 0;
    if chars == ['1'] {
        return Ok(0);
    }
    while i < chars.len() {
        let rest: String = chars[i..].iter().collect();
        let (vi, name) = names
            .iter()
            .enumerate()
            .filter(|(_, nm)| rest.starts_with(*nm))
            .max_by_key(|(_, nm)| nm.len())
            .ok_or_else(|| bad("unknown variable"))?;
        i += name.chars().count();
        let mut pos = String::new();
        if i < chars.len() && chars[i] == '_' {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                pos.push(chars[i]);
                i += 1;
            }
        } else {
            while let Some(d) = chars.get(i).and_then(|c| "₀₁₂₃₄₅₆₇₈₉".chars().position(|x| x == *c)) {
                pos.push(char::from(b'0' + d as u8));
                i += 1;
            }
        }
        let t: usize = if pos.is_empty() { 1 } else { pos.parse().map_err(|_| bad("subscript"))? };
        if t == 0 || t > n {
            return Err(bad("variable position out of range"));
        }
        let mut e = 1u32;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            e = chars[start..i].iter().collect::<String>().parse().map_err(|_| bad("exponent"))?;
        }
        exps[t - 1][vi] += e;
    }
    let mut k = 0;
    for t in (1..=n).rev() {
        let d = curve
            .basis()
            .iter()
            .position(|m| m.exponents == exps[t - 1])
            .ok_or_else(|| bad("not a basis monomial"))?;
        k = k * curve.len() + d;
    }
    Ok(k)
}

/// A set of multi-indices in `[0, l^n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIndexSet {
    n: usize,
    l: usize,
    members: BTreeSet<usize>,
}

/// JSON form: members as digit lists `[k_n, …, k_1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSetJson {
    pub n: usize,
    pub l: usize,
    pub members: Vec<Vec<usize>>,
}

impl MonomialIndexSet {
    pub fn new(l: usize, n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let total = l.checked_pow(n as u32).ok_or_else(|| Error::TooLarge(format!("{l}^{n}")))?;
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&k| k >= total) {
            return Err(Error::OutOfRange(format!("index {bad} not below {l}^{n}")));
        }
        Ok(MonomialIndexSet { n, l, members })
    }

    pub fn full(l: usize, n: usize) -> Result<Self> {
        let total = l.checked_pow(n as u32).ok_or_else(|| Error::TooLarge(format!("{l}^{n}")))?;
        Self::new(l, n, 0..total)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.contains(&k)
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn insert(&mut self, k: usize) -> bool {
        assert!(k < self.l.pow(self.n as u32));
        self.members.insert(k)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn to_json(&self) -> IndexSetJson {
        IndexSetJson {
            n: self.n,
            l: self.l,
            members: self.members.iter().map(|&k| digits(k, self.l, self.n)).collect(),
        }
    }

    pub fn from_json(j: &IndexSetJson) -> Result<Self> {
        let mut ks = Vec::with_capacity(j.members.len());
        for d in &j.members {
            if d.len() != j.n {
                return Err(Error::LengthMismatch { expected: j.n, actual: d.len() });
            }
            if d.iter().any(|&x| x >= j.l) {
                return Err(Error::OutOfRange(format!("digit in {d:?} not below {}", j.l)));
            }
            ks.push(from_digits(d, j.l));
        }
        Self::new(j.l, j.n, ks)
    }

    fn check_curve(&self, curve: &PointedCurve) -> Result<()> {
        if curve.len() != self.l {
            return Err(Error::LengthMismatch { expected: curve.len(), actual: self.l });
        }
        Ok(())
    }
}

/// Basis indices `d' != d` whose monomial divides `M_d` exponent-wise.
fn proper_divisors(curve: &PointedCurve, d: usize) -> Vec<usize> {
    let b = curve.basis();
    (0..b.len()).filter(|&e| e != d && b[e].divides(&b[d])).collect()
}

/// Closed under replacing any digit by a divisor of its monomial.
pub fn is_weakly_decreasing(a: &MonomialIndexSet, curve: &PointedCurve) -> Result<bool> {
    a.check_curve(curve)?;
    let divs: Vec<Vec<usize>> = (0..a.l).map(|d| proper_divisors(curve, d)).collect();
    Ok(a.members.iter().all(|&k| {
        (1..=a.n).all(|t| divs[digit(k, a.l, t)].iter().all(|&e| a.contains(with_digit(k, a.l, t, e))))
    }))
}

/// One-step neighbours that a decreasing set must contain along with `k`:
/// per-digit divisors, and a nonzero digit moved to an empty lower variable.
fn decreasing_moves(k: usize, l: usize, n: usize, divs: &[Vec<usize>]) -> Vec<usize> {
    let mut out = Vec::new();
    for t in 1..=n {
        let d = digit(k, l, t);
        for &e in &divs[d] {
            out.push(with_digit(k, l, t, e));
        }
        if d == 0 {
            continue;
        }
        for s in 1..t {
            if digit(k, l, s) == 0 {
                out.push(with_digit(with_digit(k, l, t, 0), l, s, d));
            }
        }
    }
    out
}

/// Smallest superset closed under divisibility and moves to lower variables.
pub fn decreasing_closure(a: &MonomialIndexSet, curve: &PointedCurve) -> Result<MonomialIndexSet> {
    a.check_curve(curve)?;
    let divs: Vec<Vec<usize>> = (0..a.l).map(|d| proper_divisors(curve, d)).collect();
    let mut out = a.clone();
    let mut queue: VecDeque<usize> = a.members.iter().copied().collect();
    while let Some(k) = queue.pop_front() {
        for m in decreasing_moves(k, a.l, a.n, &divs) {
            if out.members.insert(m) {
                queue.push_back(m);
            }
        }
    }
    Ok(out)
}

pub fn is_decreasing(a: &MonomialIndexSet, curve: &PointedCurve) -> Result<bool> {
    Ok(decreasing_closure(a, curve)?.len() == a.len())
}

/// Complement of the digitwise reflection `k_t ↦ l - 1 - k_t` of `a`.
///
/// Requires `a` to be weakly decreasing; the result is then weakly
/// decreasing too, so this is an involution. The dual of a decreasing set
/// need not be decreasing: on the Hermitian curve over GF(4) the closure
/// of `{x₁x₂^3y₂}` has a dual containing `x₂^2y₂` but not `x₁^2y₁`.
pub fn dual_set(a: &MonomialIndexSet, curve: &PointedCurve) -> Result<MonomialIndexSet> {
    if !is_weakly_decreasing(a, curve)? {
        return Err(Error::NotDecreasing);
    }
    let total = a.l.pow(a.n as u32);
    let reflected: BTreeSet<usize> = a.members.iter().map(|&k| total - 1 - k).collect();
    MonomialIndexSet::new(a.l, a.n, (0..total).filter(|k| !reflected.contains(k)))
}

/// The vector `x` with `C(D, m_i Q)^⊥ = x ⋆ C(D, m_{l-i} Q)` for every `i`,
/// normalized so that its first entry is 1.
pub fn isometry_vector(curve: &PointedCurve) -> Result<Vec<FieldElement>> {
    if !curve.isometry_dual_condition()? {
        return Err(Error::PreconditionViolated("the curve fails the isometry-dual condition".into()));
    }
    let f = curve.field();
    let l = curve.len();
    let ev = curve.evaluation_matrix(curve.basis());
    let ns = linalg::nullspace(f, &ev[..l - 1], l);
    if ns.len() != 1 {
        return Err(Error::NoIsometry);
    }
    let mut x = ns[0].clone();
    let inv = f.inv(x[0]).map_err(|_| Error::NoIsometry)?;
    linalg::scale(f, &mut x, inv);
    if x.iter().any(|e| e.is_zero()) {
        return Err(Error::NoIsometry);
    }
    for a in 0..l {
        for b in 0..l.saturating_sub(1 + a) {
            let s = (0..l).fold(FieldElement::ZERO, |acc, p| {
                f.add(acc, f.mul(x[p], f.mul(ev[a][p], ev[b][p])))
            });
            if !s.is_zero() {
                return Err(Error::NoIsometry);
            }
        }
    }
    Ok(x)
}

/// Row `G_n[l^n - 1 - k]`: the evaluation of the multi-index monomial `k`.
pub fn monomial_row(k: &Kernel, n: usize, idx: usize) -> Vec<FieldElement> {
    let f = k.field();
    let l = k.size();
    let g = k.matrix();
    let total = l.pow(n as u32);
    // column digits, most significant first, pair with X_1, X_2, …
    let kd = digits(idx, l, n);
    let rows: Vec<&Vec<FieldElement>> = (0..n).map(|s| &g[l - 1 - kd[n - 1 - s]]).collect();
    (0..total)
        .map(|j| {
            let cd = digits(j, l, n);
            rows.iter().zip(&cd).fold(f.one(), |acc, (row, &c)| f.mul(acc, row[c]))
        })
        .collect()
}

/// Rows for the members of `a`, largest index first.
pub fn generator_matrix(a: &MonomialIndexSet, k: &Kernel, n: usize) -> Result<Matrix> {
    if k.size() != a.l || n != a.n {
        return Err(Error::LengthMismatch { expected: a.l, actual: k.size() });
    }
    let total = a.l.pow(n as u32);
    if total.saturating_mul(a.len()) > MAX_GENERATOR_ENTRIES {
        return Err(Error::TooLarge(format!("{} rows of length {total}", a.len())));
    }
    Ok(a.members.iter().rev().map(|&idx| monomial_row(k, n, idx)).collect())
}

/// Exact minimum distance of `C(D, mQ)`.
pub fn ag_min_distance(curve: &PointedCurve, m: u32) -> Result<usize> {
    let mons: Vec<_> = curve.basis().iter().filter(|b| b.pole_order <= m).collect();
    if mons.is_empty() {
        return Err(Error::PreconditionViolated(format!("C(D, {m}Q) is the zero code")));
    }
    let gen = curve.evaluation_matrix(mons);
    linalg::brute_min_distance(curve.field(), &gen, MAX_CODEWORDS)
}

pub fn brute_min_distance(gen: &Matrix, k: &Kernel) -> Result<usize> {
    linalg::brute_min_distance(k.field(), gen, MAX_CODEWORDS)
}

/// Product-code bounds on the minimum distance of `C_A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceBound {
    pub lower: usize,
    pub upper: Option<usize>,
    /// Largest digit per variable `X_1, …, X_n`.
    pub max_digits: Vec<usize>,
    /// `δ(C(D, m Q))` for each variable's largest digit.
    pub lower_factors: Vec<usize>,
    /// The box `[0, k']` inside `A` giving the upper bound, as digits `X_1, …, X_n`.
    pub upper_box: Option<Vec<usize>>,
    pub convention: String,
}

/// `lower = Π_t δ(C(D, m_{K_t} Q))` with `K_t` the largest digit of `X_t`
/// over `A`; `upper` is the smallest `Π_t δ(C(D, m_{k'_t} Q))` over boxes
/// `{k : k_t ≤ k'_t}` contained in `A`.
pub fn min_distance_bound(a: &MonomialIndexSet, curve: &PointedCurve) -> Result<DistanceBound> {
    if !is_decreasing(a, curve)? {
        return Err(Error::NotDecreasing);
    }
    if a.is_empty() {
        return Err(Error::PreconditionViolated("empty index set".into()));
    }
    let (l, n) = (a.l, a.n);
    let hs = curve.hstar();
    let mut dist = vec![None; l];
    let mut delta = |d: usize| -> Result<usize> {
        if let Some(v) = dist[d] {
            return Ok(v);
        }
        let v = ag_min_distance(curve, hs[d])?;
        dist[d] = Some(v);
        Ok(v)
    };
    let max_digits: Vec<usize> =
        (1..=n).map(|t| a.members.iter().map(|&k| digit(k, l, t)).max().unwrap_or(0)).collect();
    let lower_factors = max_digits.iter().map(|&d| delta(d)).collect::<Result<Vec<_>>>()?;
    // The product is symmetric in the variables, so reading the digits in
    // either order yields the same value.
    let lower = lower_factors.iter().product();

    let mut upper: Option<(usize, Vec<usize>)> = None;
    for &k in &a.members {
        let kd: Vec<usize> = (1..=n).map(|t| digit(k, l, t)).collect();
        let inside = box_members(&kd, l).all(|m| a.contains(m));
        if !inside {
            continue;
        }
        let v: usize = kd.iter().map(|&d| delta(d)).collect::<Result<Vec<_>>>()?.iter().product();
        if upper.as_ref().is_none_or(|(u, _)| v < *u) {
            upper = Some((v, kd));
        }
    }
    Ok(DistanceBound {
        lower,
        upper: upper.as_ref().map(|u| u.0),
        max_digits,
        lower_factors,
        upper_box: upper.map(|u| u.1),
        convention: "digit order X_1..X_n; the product is the same in either order".into(),
    })
}

/// Indices `k` with `k_t ≤ top[t-1]` for every variable.
fn box_members(top: &[usize], l: usize) -> impl Iterator<Item = usize> + '_ {
    let count: usize = top.iter().map(|&d| d + 1).product();
    (0..count).map(move |mut c| {
        let mut k = 0;
        let mut p = 1;
        for &d in top {
            k += (c % (d + 1)) * p;
            c /= d + 1;
            p *= l;
        }
        k
    })
}
