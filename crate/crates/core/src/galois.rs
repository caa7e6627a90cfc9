//! Exact arithmetic in GF(p^r).
//!
//! Elements are stored as their *canonical index*: index 0 is zero and
//! index `k >= 1` is `α^(k-1)` for the field's primitive element `α`.
//! Multiplication is therefore an addition of exponents; addition goes
//! through the polynomial (vector) representation over GF(p).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order (16 bits per element).
pub const MAX_ORDER: u32 = 1 << 16;

const ADD_TABLE_MAX: u32 = 256;

/// A field element as a canonical index into its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serializable description of a field: `{"p":…, "r":…, "modulus":[…]}`.
///
/// `modulus` lists coefficients from degree 0 up to degree `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldDescriptor {
    pub fn build(&self) -> Result<FiniteField> {
        FiniteField::new(self.p, self.r, self.modulus.as_deref())
    }
}

/// The finite field GF(p^r) with log/antilog tables over a fixed primitive element.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive_poly: u32,
    to_poly: Vec<u32>,
    from_poly: Vec<u16>,
    neg: Vec<u16>,
    add_table: Option<Vec<u16>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.r == other.r
            && self.modulus == other.modulus
            && self.primitive_poly == other.primitive_poly
    }
}

impl Eq for FiniteField {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteField {
    /// Builds GF(p^r). Without an explicit modulus the lexicographically
    /// least monic irreducible polynomial is used, where polynomials are
    /// compared by their coefficients from degree `r-1` down to degree 0.
    pub fn new(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::InvalidModulus("extension degree must be >= 1".into()));
        }
        let q = (p as u64).checked_pow(r).filter(|&q| q <= MAX_ORDER as u64).ok_or_else(|| {
            Error::TooLarge(format!("GF({p}^{r}) exceeds 16 bits per element"))
        })? as u32;

        let modulus = match modulus {
            Some(m) => {
                if m.len() != r as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        r + 1,
                        m.len()
                    )));
                }
                if m[r as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if let Some(c) = m.iter().find(|&&c| c >= p) {
                    return Err(Error::InvalidModulus(format!("coefficient {c} not reduced mod {p}")));
                }
                if !is_irreducible(p, m) {
                    return Err(Error::Reducible(m.to_vec()));
                }
                m.to_vec()
            }
            None => default_modulus(p, r),
        };

        let one = 1u32;
        let mut primitive_poly = None;
        let candidates: Box<dyn Iterator<Item = u32>> =
            if q == 2 { Box::new(std::iter::once(1)) } else { Box::new(2..q) };
        for g in candidates {
            if multiplicative_order(p, &modulus, g, q) == q - 1 {
                primitive_poly = Some(g);
                break;
            }
        }
        let primitive_poly = primitive_poly.expect("every finite field has a primitive element");

        let mut to_poly = Vec::with_capacity(q as usize);
        to_poly.push(0);
        let mut acc = one;
        for _ in 0..q - 1 {
            to_poly.push(acc);
            acc = poly_mulmod(p, &modulus, acc, primitive_poly);
        }
        let mut from_poly = vec![u16::MAX; q as usize];
        for (idx, &poly) in to_poly.iter().enumerate() {
            from_poly[poly as usize] = idx as u16;
        }
        debug_assert!(from_poly.iter().all(|&i| i != u16::MAX));

        let neg = (0..q)
            .map(|i| from_poly[poly_neg(p, to_poly[i as usize]) as usize])
            .collect();

        let mut field = FiniteField {
            p,
            r,
            q,
            modulus,
            primitive_poly,
            to_poly,
            from_poly,
            neg,
            add_table: None,
        };
        if q <= ADD_TABLE_MAX {
            let mut table = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] =
                        field.add_slow(FieldElement(a as u16), FieldElement(b as u16)).0;
                }
            }
            field.add_table = Some(table);
        }
        Ok(field)
    }

    /// Builds the field of order `q` with its default modulus.
    pub fn with_order(q: u32) -> Result<Self> {
        let (p, r) = prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(p, r, None)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, degree 0 first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { p: self.p, r: self.r, modulus: Some(self.modulus.clone()) }
    }

    /// Coefficients (degree 0 first) of the primitive element `α` used for the tables.
    pub fn primitive_poly(&self) -> Vec<u32> {
        poly_digits(self.p, self.r, self.primitive_poly)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// `α^k`.
    pub fn alpha_pow(&self, k: u64) -> FieldElement {
        FieldElement((1 + k % (self.q as u64 - 1)) as u16)
    }

    /// Elements in canonical order: 0, 1, α, α², …
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|i| FieldElement(i as u16))
    }

    pub fn element(&self, index: usize) -> Result<FieldElement> {
        if index < self.q as usize {
            Ok(FieldElement(index as u16))
        } else {
            Err(Error::OutOfRange(format!("element index {index} in {self}")))
        }
    }

    /// The image of the integer `c` in the prime subfield.
    pub fn from_int(&self, c: u64) -> FieldElement {
        FieldElement(self.from_poly[(c % self.p as u64) as usize])
    }

    /// Polynomial coefficients of `a` over GF(p), degree 0 first.
    pub fn to_coeffs(&self, a: FieldElement) -> Vec<u32> {
        poly_digits(self.p, self.r, self.to_poly[a.index()])
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.r as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::OutOfRange(format!("coefficients {coeffs:?} for {self}")));
        }
        let v = coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c);
        Ok(FieldElement(self.from_poly[v as usize]))
    }

    /// Integer encoding of the polynomial representation (base-p digits).
    #[inline]
    pub(crate) fn poly_value(&self, a: FieldElement) -> u32 {
        self.to_poly[a.index()]
    }

    /// Discrete logarithm to base `α`; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| a.0 as u32 - 1)
    }

    fn add_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = poly_add(self.p, self.to_poly[a.index()], self.to_poly[b.index()]);
        FieldElement(self.from_poly[s as usize])
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.add_table {
            Some(t) => FieldElement(t[a.index() * self.q as usize + b.index()]),
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let n = self.q - 1;
        FieldElement((1 + (a.0 as u32 - 1 + b.0 as u32 - 1) % n) as u16)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivideByZero);
        }
        let n = self.q - 1;
        Ok(FieldElement((1 + (n - (a.0 as u32 - 1)) % n) as u16))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let n = (self.q - 1) as u64;
        FieldElement((1 + ((a.0 as u64 - 1) * (e % n)) % n) as u16)
    }

    /// Order of the subfield GF(p)(elems) generated by adjoining `elems`.
    ///
    /// Uses the Frobenius test: `a` lies in GF(p^d) iff `a^(p^d) = a`.
    pub fn subfield_generated<I>(&self, elems: I) -> u32
    where
        I: IntoIterator<Item = FieldElement>,
    {
        let elems: Vec<FieldElement> = elems.into_iter().collect();
        for d in (1..=self.r).filter(|d| self.r.is_multiple_of(*d)) {
            let pd = (self.p as u64).pow(d);
            if elems.iter().all(|&a| self.pow(a, pd) == a) {
                return pd as u32;
            }
        }
        self.q
    }

    /// Short textual form: `0`, `1`, `a`, `a^k`.
    pub fn format(&self, a: FieldElement) -> String {
        match a.0 {
            0 => "0".into(),
            1 => "1".into(),
            2 => "a".into(),
            k => format!("a^{}", k - 1),
        }
    }
}

pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = 0;
    let mut m = q;
    while m.is_multiple_of(p) {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

fn poly_digits(p: u32, len: u32, mut v: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(len as usize);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

fn poly_add(p: u32, a: u32, b: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn poly_neg(p: u32, mut a: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    while a > 0 {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}

/// Product of two reduced polynomials (integer encoded) modulo `modulus`.
fn poly_mulmod(p: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let r = modulus.len() - 1;
    let da = poly_digits(p, r as u32, a);
    let db = poly_digits(p, r as u32, b);
    let mut prod = vec![0u32; 2 * r];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (r..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        // subtract c * x^(deg-r) * modulus (monic)
        for (k, &m) in modulus.iter().enumerate() {
            let idx = deg - r + k;
            prod[idx] = (prod[idx] + p - (c * m) % p) % p;
        }
    }
    prod[..r].iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn multiplicative_order(p: u32, modulus: &[u32], g: u32, q: u32) -> u32 {
    let mut acc = g;
    let mut k = 1;
    while acc != 1 {
        acc = poly_mulmod(p, modulus, acc, g);
        k += 1;
        if k > q {
            return 0;
        }
    }
    k
}

/// Remainder of `f` divided by monic `g` over GF(p); coefficient vectors, degree 0 first.
fn poly_rem(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let mut rem = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let c = *rem.last().unwrap();
        let shift = rem.len() - 1 - dg;
        if c != 0 {
            for (k, &gk) in g.iter().enumerate() {
                rem[shift + k] = (rem[shift + k] + p - (c * gk) % p) % p;
            }
        }
        rem.pop();
    }
    rem
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for v in 0..count {
            let mut g = poly_digits(p, d as u32, v as u32);
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    deg >= 1
}

fn default_modulus(p: u32, r: u32) -> Vec<u32> {
    let count = (p as u64).pow(r);
    for v in 0..count {
        let mut f = poly_digits(p, r, v as u32);
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
