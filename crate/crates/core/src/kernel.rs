//! Polarization kernels: nonsingular l×l matrices, usually the evaluation
//! matrix of a curve's reduced basis, plus the operations that derive new
//! kernels from old ones and the quantities that rate them.

use std::fmt;
use std::sync::Arc;

use crate::curve::{Monomial, PointedCurve};
use crate::error::{Error, Result};
use crate::galois::{FieldElement, FiniteField};
use crate::linalg::{self, Matrix};

/// Default work budget for exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 1 << 30;

/// One factor of a row label: a monomial in named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPart {
    pub vars: Vec<String>,
    pub monomial: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowLabel {
    /// A row of a raw matrix, by its original index.
    Raw(usize),
    /// A product of monomials, one per Kronecker factor.
    Monomial(Vec<LabelPart>),
}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

pub(crate) fn subscript(n: usize) -> String {
    n.to_string().chars().map(|c| SUBSCRIPTS[c.to_digit(10).unwrap() as usize]).collect()
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Raw(i) => write!(f, "r{i}"),
            RowLabel::Monomial(parts) => {
                let clash = parts.iter().enumerate().any(|(i, p)| {
                    parts[..i].iter().any(|o| o.vars.iter().any(|v| p.vars.contains(v)))
                });
                let mut s = String::new();
                for (i, p) in parts.iter().enumerate() {
                    if p.monomial.is_constant() {
                        continue;
                    }
                    let names: Vec<String> = if clash {
                        p.vars.iter().map(|v| format!("{v}{}", subscript(i + 1))).collect()
                    } else {
                        p.vars.clone()
                    };
                    s.push_str(&p.monomial.render(&names));
                }
                if s.is_empty() {
                    s.push('1');
                }
                f.write_str(&s)
            }
        }
    }
}

/// How a kernel was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Curve(String),
    Matrix,
    Shorten(Box<Provenance>, Vec<String>),
    ShortenByFunction(Box<Provenance>, String, usize),
    Kron(Box<Provenance>, Box<Provenance>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Curve(c) => f.write_str(c),
            Provenance::Matrix => f.write_str("matrix"),
            Provenance::Shorten(inner, pts) => write!(f, "shorten({inner}, [{}])", pts.join(", ")),
            Provenance::ShortenByFunction(inner, var, j) => {
                write!(f, "shorten_by_function({inner}, {var}, {j})")
            }
            Provenance::Kron(a, b) => write!(f, "kron({a}, {b})"),
        }
    }
}

/// A nonsingular kernel with row labels (row 0 on top, largest pole order).
#[derive(Debug, Clone)]
pub struct Kernel {
    field: Arc<FiniteField>,
    matrix: Matrix,
    labels: Vec<RowLabel>,
    curve: Option<Arc<PointedCurve>>,
    column_points: Option<Vec<usize>>,
    provenance: Provenance,
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.matrix == other.matrix
    }
}

/// Result of [`Kernel::standard_form`]: `matrix = v · G · P`, where column
/// `c` of `G · P` is column `perm[c]` of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardForm {
    pub matrix: Matrix,
    pub v: Matrix,
    pub perm: Vec<usize>,
}

impl Kernel {
    pub fn from_matrix(field: Arc<FiniteField>, matrix: Matrix) -> Result<Kernel> {
        let l = matrix.len();
        if l == 0 {
            return Err(Error::PreconditionViolated("empty kernel".into()));
        }
        for row in &matrix {
            if row.len() != l {
                return Err(Error::LengthMismatch { expected: l, actual: row.len() });
            }
            if let Some(bad) = row.iter().find(|x| x.index() >= field.order() as usize) {
                return Err(Error::OutOfRange(format!("entry {} not in {field}", bad.0)));
            }
        }
        if !linalg::is_nonsingular(&field, &matrix) {
            return Err(Error::SingularKernel);
        }
        Ok(Kernel {
            field,
            labels: (0..l).map(RowLabel::Raw).collect(),
            matrix,
            curve: None,
            column_points: None,
            provenance: Provenance::Matrix,
        })
    }

    /// Evaluation matrix of the curve's basis, largest pole order on top.
    pub fn from_curve(curve: Arc<PointedCurve>) -> Kernel {
        let rows: Vec<&Monomial> = curve.basis().iter().rev().collect();
        let matrix = curve.evaluation_matrix(rows.iter().copied());
        let labels = rows.iter().map(|m| monomial_label(&curve, m)).collect();
        Kernel {
            field: curve.field().clone(),
            matrix,
            labels,
            column_points: Some((0..curve.len()).collect()),
            provenance: Provenance::Curve(curve.to_string()),
            curve: Some(curve),
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[RowLabel] {
        &self.labels
    }

    pub fn label_strings(&self) -> Vec<String> {
        self.labels.iter().map(ToString::to_string).collect()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn curve(&self) -> Option<&Arc<PointedCurve>> {
        self.curve.as_ref()
    }

    /// Original curve point index of each column, for curve-derived kernels.
    pub fn column_points(&self) -> Option<&[usize]> {
        self.column_points.as_deref()
    }

    /// Column currently holding the given curve point.
    pub fn column_of_point(&self, point: usize) -> Option<usize> {
        self.column_points.as_ref()?.iter().position(|&p| p == point)
    }

    /// Removes `column` and the lowest row that is nonzero there, after
    /// clearing that column from every row above it.
    pub fn shorten_point(&self, column: usize) -> Result<Kernel> {
        let l = self.size();
        if l < 2 {
            return Err(Error::PreconditionViolated("cannot shorten a 1×1 kernel".into()));
        }
        if column >= l {
            return Err(Error::OutOfRange(format!("column {column} of a {l}×{l} kernel")));
        }
        let f = &self.field;
        let mut m = self.matrix.clone();
        let pivot = (0..l).rev().find(|&i| !m[i][column].is_zero()).ok_or(Error::SingularKernel)?;
        let inv = f.inv(m[pivot][column])?;
        let prow = m[pivot].clone();
        for row in m.iter_mut().take(pivot) {
            let c = f.neg(f.mul(row[column], inv));
            linalg::axpy(f, row, c, &prow);
        }
        m.remove(pivot);
        for row in m.iter_mut() {
            row.remove(column);
        }
        let mut labels = self.labels.clone();
        labels.remove(pivot);
        let column_points = self.column_points.clone().map(|mut c| {
            c.remove(column);
            c
        });
        let point_name = match (&self.curve, &self.column_points) {
            (Some(c), Some(cp)) => format!("P{}", c.point_name(cp[column])),
            _ => format!("c{column}"),
        };
        let provenance = match &self.provenance {
            Provenance::Shorten(inner, pts) => {
                let mut pts = pts.clone();
                pts.push(point_name);
                Provenance::Shorten(inner.clone(), pts)
            }
            p => Provenance::Shorten(Box::new(p.clone()), vec![point_name]),
        };
        Ok(Kernel {
            field: self.field.clone(),
            matrix: m,
            labels,
            curve: self.curve.clone(),
            column_points,
            provenance,
        })
    }

    /// Shortens at a curve point given by its index on the curve.
    pub fn shorten_at(&self, point: usize) -> Result<Kernel> {
        let col = self
            .column_of_point(point)
            .ok_or_else(|| Error::OutOfRange(format!("point {point} is not a column of this kernel")))?;
        self.shorten_point(col)
    }

    /// Keeps the given rows and columns, which must form a nonsingular matrix.
    pub fn restrict(&self, rows: &[usize], cols: &[usize], provenance: Provenance) -> Result<Kernel> {
        if rows.len() != cols.len() {
            return Err(Error::LengthMismatch { expected: cols.len(), actual: rows.len() });
        }
        let l = self.size();
        if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= l) {
            return Err(Error::OutOfRange(format!("index {bad} of a {l}×{l} kernel")));
        }
        let matrix: Matrix = rows.iter().map(|&i| cols.iter().map(|&j| self.matrix[i][j]).collect()).collect();
        if rows.is_empty() || !linalg::is_nonsingular(&self.field, &matrix) {
            return Err(Error::SingularKernel);
        }
        Ok(Kernel {
            field: self.field.clone(),
            matrix,
            labels: rows.iter().map(|&i| self.labels[i].clone()).collect(),
            curve: self.curve.clone(),
            column_points: self.column_points.as_ref().map(|cp| cols.iter().map(|&j| cp[j]).collect()),
            provenance,
        })
    }

    pub fn kron(&self, other: &Kernel) -> Result<Kernel> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let (la, lb) = (self.size(), other.size());
        let mut matrix = vec![vec![FieldElement::ZERO; la * lb]; la * lb];
        for i1 in 0..la {
            for i2 in 0..lb {
                for j1 in 0..la {
                    for j2 in 0..lb {
                        matrix[i1 * lb + i2][j1 * lb + j2] = f.mul(self.matrix[i1][j1], other.matrix[i2][j2]);
                    }
                }
            }
        }
        let mut labels = Vec::with_capacity(la * lb);
        for (i1, a) in self.labels.iter().enumerate() {
            for (i2, b) in other.labels.iter().enumerate() {
                labels.push(match (a, b) {
                    (RowLabel::Monomial(pa), RowLabel::Monomial(pb)) => {
                        RowLabel::Monomial(pa.iter().chain(pb).cloned().collect())
                    }
                    _ => RowLabel::Raw(i1 * lb + i2),
                });
            }
        }
        Ok(Kernel {
            field: self.field.clone(),
            matrix,
            labels,
            curve: None,
            column_points: None,
            provenance: Provenance::Kron(Box::new(self.provenance.clone()), Box::new(other.provenance.clone())),
        })
    }

    pub fn partial_distances(&self) -> Result<Vec<usize>> {
        self.partial_distances_with_budget(DEFAULT_BUDGET)
    }

    /// `D_i = d(g_i, ⟨g_{i+1}, …, g_{l-1}⟩)` for every row, top to bottom.
    ///
    /// Each row uses the cheaper of two exact searches: enumerating the
    /// coset `g_i + ⟨rows below⟩`, or looking for the fewest parity-check
    /// columns of `⟨rows below⟩` whose span contains the syndrome of `g_i`.
    pub fn partial_distances_with_budget(&self, budget: u64) -> Result<Vec<usize>> {
        (0..self.size()).map(|i| self.partial_distance(i, budget)).collect()
    }

    pub fn partial_distance(&self, row: usize, budget: u64) -> Result<usize> {
        let l = self.size();
        let q = self.field.order() as f64;
        let coset = q.powi((l - 1 - row) as i32);
        // Cheap cosets are enumerated directly; otherwise try the syndrome
        // search first and fall back to enumeration within budget.
        if coset <= (1u64 << 26) as f64 {
            return self.partial_distance_coset(row, budget);
        }
        match self.partial_distance_syndrome(row, budget) {
            Err(Error::TooLarge(_)) if coset <= budget as f64 => self.partial_distance_coset(row, budget),
            Err(Error::TooLarge(_)) => Err(Error::TooLarge(format!(
                "partial distance of row {row} exceeds the search budget {budget}"
            ))),
            r => r,
        }
    }

    /// Partial distance by coset enumeration.
    pub fn partial_distance_coset(&self, row: usize, budget: u64) -> Result<usize> {
        // the coset never contains zero, so excluding it only enables the early exit at weight 1
        linalg::min_weight_coset(&self.field, &self.matrix[row], &self.matrix[row + 1..], true, budget)
            .map_err(|_| Error::TooLarge(format!("partial distance of row {row} exceeds the search budget {budget}")))
            .map(|d| d.expect("coset is nonempty"))
    }

    /// Partial distance by searching supports of the syndrome.
    pub fn partial_distance_syndrome(&self, row: usize, budget: u64) -> Result<usize> {
        let f = &*self.field;
        let l = self.size();
        let h = linalg::nullspace(f, &self.matrix[row + 1..], l);
        let m = h.len();
        let s: Vec<FieldElement> = h
            .iter()
            .map(|hr| {
                hr.iter()
                    .zip(&self.matrix[row])
                    .fold(FieldElement::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect();
        let columns: Vec<Vec<FieldElement>> = (0..l).map(|j| h.iter().map(|hr| hr[j]).collect()).collect();
        let mut search = SupportSearch { f, columns: &columns, nodes: 0, budget };
        for w in 1..=m {
            let mut basis = Vec::with_capacity(w);
            if search.dfs(0, w, &mut basis, &s)? {
                return Ok(w);
            }
        }
        unreachable!("the syndrome lies in the span of all parity-check columns")
    }

    /// `Σ ln D_i / (l ln l)`.
    pub fn exponent(&self) -> Result<f64> {
        self.exponent_with_budget(DEFAULT_BUDGET)
    }

    pub fn exponent_with_budget(&self, budget: u64) -> Result<f64> {
        let l = self.size();
        if l < 2 {
            return Err(Error::PreconditionViolated("exponent of a 1×1 kernel".into()));
        }
        let d = self.partial_distances_with_budget(budget)?;
        Ok(exponent_from_distances(&d))
    }

    /// Lower-triangular unit-diagonal form reached by row operations from
    /// the bottom up and a column permutation.
    pub fn standard_form(&self) -> StandardForm {
        let f = &self.field;
        let l = self.size();
        let mut g = self.matrix.clone();
        let mut v = linalg::identity(l);
        let mut pivots = vec![0usize; l];
        for i in (0..l).rev() {
            let c = (0..l).rev().find(|&c| !g[i][c].is_zero()).expect("kernel is nonsingular");
            let inv = f.inv(g[i][c]).expect("nonzero");
            linalg::scale(f, &mut g[i], inv);
            linalg::scale(f, &mut v[i], inv);
            let (grow, vrow) = (g[i].clone(), v[i].clone());
            for k in 0..i {
                let coef = f.neg(g[k][c]);
                linalg::axpy(f, &mut g[k], coef, &grow);
                linalg::axpy(f, &mut v[k], coef, &vrow);
            }
            pivots[i] = c;
        }
        let matrix = g.iter().map(|row| pivots.iter().map(|&c| row[c]).collect()).collect();
        StandardForm { matrix, v, perm: pivots }
    }

    /// Whether the kernel polarizes every symmetric channel over its field:
    /// its standard form is not the identity and its entries generate the
    /// whole field.
    pub fn polarizes_sof(&self) -> bool {
        let sf = self.standard_form();
        sf.matrix != linalg::identity(self.size())
            && self.field.subfield_generated(sf.matrix.iter().flatten().copied()) == self.field.order()
    }
}

fn monomial_label(curve: &PointedCurve, m: &Monomial) -> RowLabel {
    RowLabel::Monomial(vec![LabelPart {
        vars: curve.gens().iter().map(|g| g.name.clone()).collect(),
        monomial: m.clone(),
    }])
}

struct SupportSearch<'a> {
    f: &'a FiniteField,
    columns: &'a [Vec<FieldElement>],
    nodes: u64,
    budget: u64,
}

impl SupportSearch<'_> {
    /// Chooses `left` more linearly independent columns from `start` on and
    /// reports whether some choice puts `residual` in their span. `basis`
    /// holds the chosen columns reduced against each other with pivots.
    fn dfs(
        &mut self,
        start: usize,
        left: usize,
        basis: &mut Vec<(usize, Vec<FieldElement>)>,
        residual: &[FieldElement],
    ) -> Result<bool> {
        if left == 0 {
            return Ok(residual.iter().all(|x| x.is_zero()));
        }
        let f = self.f;
        for j in start..=self.columns.len().saturating_sub(left) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::TooLarge("support search".into()));
            }
            let mut v = self.columns[j].clone();
            for (p, b) in basis.iter() {
                let c = f.neg(v[*p]);
                linalg::axpy(f, &mut v, c, b);
            }
            let Some(p) = v.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let inv = f.inv(v[p])?;
            linalg::scale(f, &mut v, inv);
            let mut res = residual.to_vec();
            let c = f.neg(res[p]);
            linalg::axpy(f, &mut res, c, &v);
            if left == 1 && res.iter().any(|x| !x.is_zero()) {
                continue;
            }
            basis.push((p, v));
            let found = self.dfs(j + 1, left - 1, basis, &res)?;
            basis.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn exponent_from_distances(d: &[usize]) -> f64 {
    let l = d.len() as f64;
    d.iter().map(|&x| (x as f64).ln()).sum::<f64>() / (l * l.ln())
}

/// Exponent of `K1 ⊗ K2` from the factors' exponents and sizes.
pub fn kron_exponent(e1: f64, l1: usize, e2: f64, l2: usize) -> f64 {
    let (a, b) = ((l1 as f64).ln(), (l2 as f64).ln());
    (e1 * a + e2 * b) / (a + b)
}

/// The nested kernels obtained by evaluating only at points whose `var`
/// coordinate lies among the first `j` entries of `order`, keeping the rows
/// whose `var` exponent is below `j`, for `j = 1, …, |order|`.
pub fn castle_sequence(curve: &Arc<PointedCurve>, var: usize, order: &[FieldElement]) -> Result<Vec<Kernel>> {
    if var >= curve.gens().len() {
        return Err(Error::OutOfRange(format!("variable {var}")));
    }
    let full = Kernel::from_curve(curve.clone());
    let base = Box::new(full.provenance.clone());
    let name = curve.gens()[var].name.clone();
    let mut out = Vec::with_capacity(order.len());
    for j in 1..=order.len() {
        let values = &order[..j];
        let cols: Vec<usize> =
            (0..curve.len()).filter(|&p| values.contains(&curve.points()[p][var])).collect();
        let rows: Vec<usize> = (0..full.size())
            .filter(|&i| curve.basis()[full.size() - 1 - i].exponents[var] < j as u32)
            .collect();
        out.push(full.restrict(&rows, &cols, Provenance::ShortenByFunction(base.clone(), name.clone(), j))?);
    }
    Ok(out)
}

/// Whether some monomial map (column permutation and nonzero column
/// scalings) carries the row-span flag of `a` onto that of `b`: for every
/// `k` the bottom `k` rows span the same code.
pub fn is_chain_isometric(a: &Kernel, b: &Kernel, budget: u64) -> Result<bool> {
    if *a.field != *b.field {
        return Err(Error::FieldMismatch);
    }
    let l = a.size();
    if b.size() != l {
        return Err(Error::LengthMismatch { expected: l, actual: b.size() });
    }
    let f = &*a.field;
    let qm1 = f.order() as u64 - 1;
    let perms: u64 = (1..=l as u64).product();
    let total = qm1.checked_pow(l.saturating_sub(1) as u32).and_then(|s| s.checked_mul(perms));
    if total.is_none_or(|t| t > budget) {
        return Err(Error::TooLarge(format!("{l}! · {qm1}^{} candidate maps", l - 1)));
    }
    let a_inv = linalg::inverse(f, &a.matrix)?;
    let units: Vec<FieldElement> = f.elements().skip(1).collect();

    // b = T · a · M with T upper triangular; equivalently b · M⁻¹ · a⁻¹ is
    // upper triangular. Scaling the columns of b by the inverse of M's
    // entries and permuting them gives b · M⁻¹.
    let mut perm: Vec<usize> = (0..l).collect();
    let mut found = false;
    permutations(&mut perm, 0, &mut |perm| {
        let mut scales = vec![0usize; l];
        loop {
            let bm: Matrix = b
                .matrix
                .iter()
                .map(|row| (0..l).map(|c| f.mul(row[perm[c]], units[scales[c]])).collect())
                .collect();
            let t = linalg::mat_mul(f, &bm, &a_inv);
            if (0..l).all(|i| (0..i).all(|j| t[i][j].is_zero())) {
                return true;
            }
            // first column's scale is fixed: global scaling does not matter
            let mut k = 1;
            loop {
                if k >= l {
                    return false;
                }
                scales[k] += 1;
                if scales[k] < units.len() {
                    break;
                }
                scales[k] = 0;
                k += 1;
            }
        }
    }, &mut found);
    Ok(found)
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize]) -> bool, found: &mut bool) {
    if *found {
        return;
    }
    if k == p.len() {
        if visit(p) {
            *found = true;
        }
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit, found);
        p.swap(k, i);
        if *found {
            return;
        }
    }
}
