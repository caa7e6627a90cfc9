//! Pointed curves (X, Q): rational points, Weierstrass semigroup data, H*(Q)
//! and the reduced monomial basis whose evaluations give a kernel.
//!
//! No function-field machinery is involved. Each family hard-codes its
//! reduced monomials; custom curves supply them explicitly.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{FieldDescriptor, FieldElement, FiniteField};
use crate::linalg::{self, Matrix};

/// A generator of the function algebra with its pole order at Q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub pole: u32,
}

/// A reduced monomial `t_1^e_1 ⋯ t_s^e_s` together with its pole order at Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub pole_order: u32,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>, gens: &[Generator]) -> Self {
        let pole_order = exponents.iter().zip(gens).map(|(e, g)| e * g.pole).sum();
        Monomial { exponents, pole_order }
    }

    /// Exponent-wise divisibility `self | other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exponents.len() == other.exponents.len()
            && self.exponents.iter().zip(&other.exponents).all(|(a, b)| a <= b)
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Renders e.g. `x^3y` given variable names; constants render as `1`.
    pub fn render(&self, names: &[impl AsRef<str>]) -> String {
        let mut s = String::new();
        for (e, n) in self.exponents.iter().zip(names) {
            match e {
                0 => {}
                1 => s.push_str(n.as_ref()),
                e => {
                    s.push_str(n.as_ref());
                    s.push('^');
                    s.push_str(&e.to_string());
                }
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveFamily {
    Rational,
    Hermitian,
    Custom,
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveFamily::Rational => "rational",
            CurveFamily::Hermitian => "hermitian",
            CurveFamily::Custom => "custom",
        })
    }
}

/// A pointed curve with `D = (z)_0`, `(z) = D - lQ`.
#[derive(Debug, Clone)]
pub struct PointedCurve {
    field: Arc<FiniteField>,
    family: CurveFamily,
    gens: Vec<Generator>,
    genus: u32,
    points: Vec<Vec<FieldElement>>,
    hstar: Vec<u32>,
    basis: Vec<Monomial>,
}

impl PartialEq for PointedCurve {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field
            && self.gens == other.gens
            && self.genus == other.genus
            && self.points == other.points
            && self.hstar == other.hstar
            && self.basis == other.basis
    }
}

impl fmt::Display for PointedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.field)
    }
}

impl PointedCurve {
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    /// Number of evaluation points, which is also the pole order of `z`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn semigroup_gens(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.pole).collect()
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.gens.iter().map(|g| g.name.as_str()).collect()
    }

    pub fn points(&self) -> &[Vec<FieldElement>] {
        &self.points
    }

    /// H*(Q), ascending (`m_1 = 0`).
    pub fn hstar(&self) -> &[u32] {
        &self.hstar
    }

    /// Basis monomials, ascending pole order; `basis()[i].pole_order == hstar()[i]`.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn monomial_name(&self, m: &Monomial) -> String {
        m.render(&self.var_names())
    }

    /// Index into `basis()` of the monomial with the given pole order.
    pub fn basis_index(&self, pole_order: u32) -> Option<usize> {
        self.hstar.binary_search(&pole_order).ok()
    }

    pub fn point_name(&self, idx: usize) -> String {
        self.points[idx].iter().map(|&c| short_elem(c)).collect::<Vec<_>>().join("")
    }

    pub fn evaluate(&self, m: &Monomial, point_index: usize) -> FieldElement {
        let f = &self.field;
        self.points[point_index]
            .iter()
            .zip(&m.exponents)
            .fold(f.one(), |acc, (&c, &e)| f.mul(acc, f.pow(c, e as u64)))
    }

    /// Rows are monomials, columns are the curve's points.
    pub fn evaluation_matrix<'a, I>(&self, monomials: I) -> Matrix
    where
        I: IntoIterator<Item = &'a Monomial>,
    {
        monomials
            .into_iter()
            .map(|m| (0..self.len()).map(|j| self.evaluate(m, j)).collect())
            .collect()
    }

    /// `l + 2g - 1 ∈ H*(Q)`; requires `l >= 2g - 2`.
    pub fn isometry_dual_condition(&self) -> Result<bool> {
        let l = self.len() as i64;
        let g = self.genus as i64;
        if l < 2 * g - 2 {
            return Err(Error::PreconditionViolated(format!("l = {l} < 2g - 2 = {}", 2 * g - 2)));
        }
        let target = l + 2 * g - 1;
        Ok(target >= 0 && self.hstar.binary_search(&(target as u32)).is_ok())
    }

    /// The map `m ↦ m - a` if that lies in H*(Q), else `l + m - a`.
    /// Returned as `(m, image)` pairs in ascending `m`.
    pub fn fi_map(&self, a: u32) -> Result<Vec<(u32, u32)>> {
        let l = self.len() as i64;
        if l < 2 * self.genus as i64 {
            return Err(Error::PreconditionViolated(format!(
                "l = {l} < 2g = {}",
                2 * self.genus
            )));
        }
        if !self.gens.iter().any(|g| g.pole == a) {
            return Err(Error::PreconditionViolated(format!("{a} is not a generator pole order")));
        }
        Ok(self
            .hstar
            .iter()
            .map(|&m| {
                let d = m as i64 - a as i64;
                let img = if d >= 0 && self.hstar.binary_search(&(d as u32)).is_ok() {
                    d
                } else {
                    l + d
                };
                (m, img as u32)
            })
            .collect())
    }

    pub fn descriptor(&self) -> CurveDescriptor {
        CurveDescriptor {
            family: self.family,
            field: self.field.descriptor(),
            points: Some(
                self.points.iter().map(|p| p.iter().map(|c| c.0 as u32).collect()).collect(),
            ),
            gens: Some(self.gens.clone()),
            genus: Some(self.genus),
            hstar: Some(self.hstar.clone()),
            basis: Some(self.basis.iter().map(|m| m.exponents.clone()).collect()),
        }
    }
}

fn short_elem(c: FieldElement) -> String {
    match c.0 {
        0 => "0".into(),
        1 => "1".into(),
        2 => "α".into(),
        k => format!("α{}", superscript(k as u32 - 1)),
    }
}

fn superscript(n: u32) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| SUP[c.to_digit(10).unwrap() as usize]).collect()
}

/// Whether `m` is a non-negative integer combination of `gens`.
pub fn semigroup_contains(gens: &[u32], m: u32) -> bool {
    let mut reach = vec![false; m as usize + 1];
    reach[0] = true;
    for v in 1..=m as usize {
        reach[v] = gens.iter().any(|&a| a != 0 && a as usize <= v && reach[v - a as usize]);
    }
    reach[m as usize]
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Gaps of the numerical semigroup `⟨gens⟩`; `None` if `gcd(gens) != 1`.
pub fn semigroup_gaps(gens: &[u32]) -> Option<Vec<u32>> {
    if gens.iter().copied().fold(0, gcd) != 1 {
        return None;
    }
    let min = *gens.iter().filter(|&&a| a > 0).min()?;
    let max = *gens.iter().max()?;
    // the Frobenius number is below min * max
    let bound = min * max + 1;
    let mut reach = vec![false; bound as usize];
    reach[0] = true;
    for v in 1..bound as usize {
        reach[v] = gens.iter().any(|&a| a != 0 && a as usize <= v && reach[v - a as usize]);
    }
    Some((0..bound).filter(|&v| !reach[v as usize]).collect())
}

/// `h ∈ H ⟺ 2g - 1 - h ∉ H` for all `h` in `[0, 2g)`.
pub fn is_symmetric_semigroup(gens: &[u32], genus: u32) -> bool {
    (0..2 * genus).all(|h| semigroup_contains(gens, h) != semigroup_contains(gens, 2 * genus - 1 - h))
}

/// `(H ∩ [0, l)) ∪ {l + gap}` for a semigroup with finitely many gaps.
fn hstar_from_semigroup(gens: &[u32], l: u32) -> Vec<u32> {
    let gaps = semigroup_gaps(gens).expect("gcd 1");
    let mut out: Vec<u32> = (0..l).filter(|&m| semigroup_contains(gens, m)).collect();
    out.extend(gaps.iter().map(|g| l + g));
    out.sort_unstable();
    out
}

/// The projective line over GF(q) with Q at infinity and D the q affine points.
pub fn rational_curve(field: Arc<FiniteField>) -> PointedCurve {
    let q = field.order();
    let gens = vec![Generator { name: "t".into(), pole: 1 }];
    let basis = (0..q).map(|i| Monomial::new(vec![i], &gens)).collect();
    PointedCurve {
        points: field.elements().map(|e| vec![e]).collect(),
        field,
        family: CurveFamily::Rational,
        gens,
        genus: 0,
        hstar: (0..q).collect(),
        basis,
    }
}

/// The Hermitian curve `x^(q0+1) = y^q0 + y` over GF(q0²), pointed at the
/// common pole of x and y, with D the q0³ affine rational points.
pub fn hermitian_curve(field: Arc<FiniteField>) -> Result<PointedCurve> {
    let q = field.order();
    let r = field.degree();
    if !r.is_multiple_of(2) {
        return Err(Error::NotASquare(q));
    }
    let q0 = field.characteristic().pow(r / 2);
    let f = &field;
    let mut points = Vec::new();
    for a in f.elements() {
        let lhs = f.pow(a, q0 as u64 + 1);
        for b in f.elements() {
            if f.add(f.pow(b, q0 as u64), b) == lhs {
                points.push(vec![a, b]);
            }
        }
    }
    let l = points.len() as u32;
    debug_assert_eq!(l, q0 * q0 * q0);
    let gens = vec![
        Generator { name: "x".into(), pole: q0 },
        Generator { name: "y".into(), pole: q0 + 1 },
    ];
    let hstar = hstar_from_semigroup(&[q0, q0 + 1], l);
    let basis = hstar
        .iter()
        .map(|&h| {
            let j = h % q0;
            let i = (h - j * (q0 + 1)) / q0;
            Monomial::new(vec![i, j], &gens)
        })
        .collect();
    Ok(PointedCurve {
        field,
        family: CurveFamily::Hermitian,
        gens,
        genus: q0 * (q0 - 1) / 2,
        points,
        hstar,
        basis,
    })
}

/// Curve descriptor JSON. Named families only need `family` and `field`;
/// custom curves list everything, including the reduced basis exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDescriptor {
    pub family: CurveFamily,
    pub field: FieldDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<Generator>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hstar: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<u32>>>,
}

impl CurveDescriptor {
    pub fn build(&self) -> Result<PointedCurve> {
        let field = Arc::new(self.field.build()?);
        match self.family {
            CurveFamily::Rational => Ok(rational_curve(field)),
            CurveFamily::Hermitian => hermitian_curve(field),
            CurveFamily::Custom => custom_curve(self),
        }
    }
}

/// Builds a curve from explicit data, checking every invariant.
pub fn custom_curve(desc: &CurveDescriptor) -> Result<PointedCurve> {
    let invalid = |msg: String| Err(Error::InvalidCurve(msg));
    let field = Arc::new(desc.field.build()?);
    let (Some(points), Some(gens), Some(genus), Some(hstar), Some(basis)) =
        (&desc.points, &desc.gens, desc.genus, &desc.hstar, &desc.basis)
    else {
        return invalid("custom curves need points, gens, genus, hstar and basis".into());
    };
    if gens.is_empty() {
        return invalid("no generators".into());
    }
    for (i, g) in gens.iter().enumerate() {
        if g.pole == 0 {
            return invalid(format!("generator {} has pole order 0", g.name));
        }
        if gens[..i].iter().any(|h| h.name == g.name || h.pole == g.pole) {
            return invalid(format!("generator {} duplicates a name or pole order", g.name));
        }
    }
    let poles: Vec<u32> = gens.iter().map(|g| g.pole).collect();
    match semigroup_gaps(&poles) {
        None => return invalid("generators do not have gcd 1".into()),
        Some(gaps) if gaps.len() as u32 != genus => {
            return invalid(format!("genus {genus} but the semigroup has {} gaps", gaps.len()))
        }
        _ => {}
    }
    let l = points.len();
    if l == 0 {
        return invalid("no points".into());
    }
    if hstar.len() != l || basis.len() != l {
        return invalid(format!(
            "|points| = {l}, |hstar| = {}, |basis| = {} must agree",
            hstar.len(),
            basis.len()
        ));
    }
    let mut pts = Vec::with_capacity(l);
    for p in points {
        if p.len() != gens.len() {
            return invalid(format!("point {p:?} needs {} coordinates", gens.len()));
        }
        let coords = p
            .iter()
            .map(|&c| field.element(c as usize))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidCurve(e.to_string()))?;
        if pts.contains(&coords) {
            return invalid(format!("duplicate point {p:?}"));
        }
        pts.push(coords);
    }
    if hstar.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("hstar must be strictly ascending".into());
    }
    let mut monomials = Vec::with_capacity(l);
    for (exps, &h) in basis.iter().zip(hstar) {
        if exps.len() != gens.len() {
            return invalid(format!("basis exponents {exps:?} need {} entries", gens.len()));
        }
        let m = Monomial::new(exps.clone(), gens);
        if m.pole_order != h {
            return invalid(format!("basis monomial {exps:?} has pole order {} != {h}", m.pole_order));
        }
        monomials.push(m);
    }
    let curve = PointedCurve {
        field,
        family: CurveFamily::Custom,
        gens: gens.clone(),
        genus,
        points: pts,
        hstar: hstar.clone(),
        basis: monomials,
    };
    let ev = curve.evaluation_matrix(curve.basis());
    if !linalg::is_nonsingular(&curve.field, &ev) {
        return invalid("evaluation matrix of the basis is singular".into());
    }
    Ok(curve)
}
