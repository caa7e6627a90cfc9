//! Discrete memoryless channels with input alphabet GF(q).

use std::collections::HashMap;
use std::sync::Arc;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{FieldDescriptor, FieldElement, FiniteField};
use crate::kernel::Kernel;

const ROW_SUM_TOL: f64 = 1e-12;
const MATCH_TOL: f64 = 1e-12;
const LP_TOL: f64 = 1e-9;

/// Largest output alphabet for the symmetry search.
pub const MAX_SYMMETRY_OUTPUTS: usize = 64;
/// Largest `M · M'` for the degradation search.
pub const MAX_DEGRADATION_VARS: usize = 4096;
/// Largest `M^l · q^i` output alphabet produced by [`split_exact`].
pub const MAX_SPLIT_OUTPUTS: u64 = 1 << 20;

/// `trans[x][y] = W(y | x)`, rows indexed by canonical field element index.
#[derive(Debug, Clone)]
pub struct Dmc {
    field: Arc<FiniteField>,
    trans: Vec<Vec<f64>>,
}

impl PartialEq for Dmc {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.trans == other.trans
    }
}

/// Channel table JSON: the field and the transition rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDescriptor {
    pub field: FieldDescriptor,
    pub trans: Vec<Vec<f64>>,
}

impl ChannelDescriptor {
    pub fn build(&self) -> Result<Dmc> {
        Dmc::new(Arc::new(self.field.build()?), self.trans.clone())
    }
}

/// Output permutations realizing the symmetry `W(π_d(y) | x + d) = W(y | x)`
/// for every `d`, and `W(σ_a(y) | a·x) = W(y | x)` for every nonzero `a`.
/// Both are indexed by canonical element index (`mul[0]` is unused and
/// holds the identity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SofWitness {
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
}

impl Dmc {
    pub fn new(field: Arc<FiniteField>, trans: Vec<Vec<f64>>) -> Result<Dmc> {
        let q = field.order() as usize;
        if trans.len() != q {
            return Err(Error::InvalidChannel(format!("{} rows for {q} inputs", trans.len())));
        }
        let m = trans[0].len();
        if m == 0 {
            return Err(Error::InvalidChannel("empty output alphabet".into()));
        }
        for (x, row) in trans.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidChannel(format!("row {x} has {} entries, expected {m}", row.len())));
            }
            if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return Err(Error::InvalidChannel(format!("row {x} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChannel(format!("row {x} sums to {s}")));
            }
        }
        Ok(Dmc { field, trans })
    }

    /// q-ary symmetric channel: correct with probability `1 - p`, otherwise
    /// uniform over the `q - 1` wrong symbols.
    pub fn qsc(field: Arc<FiniteField>, p: f64) -> Result<Dmc> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("crossover probability {p}")));
        }
        let q = field.order() as usize;
        let off = if q > 1 { p / (q - 1) as f64 } else { 0.0 };
        let trans = (0..q).map(|x| (0..q).map(|y| if x == y { 1.0 - p } else { off }).collect()).collect();
        Dmc::new(field, trans)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn inputs(&self) -> usize {
        self.trans.len()
    }

    pub fn outputs(&self) -> usize {
        self.trans[0].len()
    }

    pub fn trans(&self) -> &[Vec<f64>] {
        &self.trans
    }

    pub fn prob(&self, y: usize, x: FieldElement) -> f64 {
        self.trans[x.index()][y]
    }

    pub fn descriptor(&self) -> ChannelDescriptor {
        ChannelDescriptor { field: self.field.descriptor(), trans: self.trans.clone() }
    }

    /// `Z(W) = 1/(q(q-1)) Σ_{x ≠ x'} Σ_y sqrt(W(y|x) W(y|x'))`.
    pub fn bhattacharyya(&self) -> f64 {
        let q = self.inputs();
        if q < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for x in 0..q {
            for x2 in 0..q {
                if x != x2 {
                    s += self.trans[x].iter().zip(&self.trans[x2]).map(|(a, b)| (a * b).sqrt()).sum::<f64>();
                }
            }
        }
        s / (q * (q - 1)) as f64
    }

    /// Mutual information under uniform input, in base-q units.
    pub fn mutual_information(&self) -> f64 {
        let q = self.inputs() as f64;
        let mut i = 0.0;
        for y in 0..self.outputs() {
            let py: f64 = self.trans.iter().map(|r| r[y]).sum::<f64>() / q;
            for row in &self.trans {
                let w = row[y];
                if w > 0.0 {
                    i += w / q * (w / py).ln();
                }
            }
        }
        i / q.ln()
    }

    /// Symmetry with respect to field addition and multiplication, with
    /// witnesses; `None` if the channel lacks it.
    pub fn sof_witnesses(&self) -> Result<Option<SofWitness>> {
        let m = self.outputs();
        if m > MAX_SYMMETRY_OUTPUTS {
            return Err(Error::TooLarge(format!("{m} outputs exceed {MAX_SYMMETRY_OUTPUTS}")));
        }
        let f = &*self.field;
        let elems: Vec<FieldElement> = f.elements().collect();
        let mut add = Vec::with_capacity(elems.len());
        for &d in &elems {
            match self.output_matching(|x| f.add(x, d)) {
                Some(p) => add.push(p),
                None => return Ok(None),
            }
        }
        let mut mul = vec![(0..m).collect()];
        for &a in &elems[1..] {
            match self.output_matching(|x| f.mul(a, x)) {
                Some(p) => mul.push(p),
                None => return Ok(None),
            }
        }
        Ok(Some(SofWitness { add, mul }))
    }

    /// A permutation `π` of outputs with `W(π(y) | g(x)) = W(y | x)`.
    fn output_matching(&self, g: impl Fn(FieldElement) -> FieldElement) -> Option<Vec<usize>> {
        let m = self.outputs();
        let elems: Vec<FieldElement> = self.field.elements().collect();
        let fits = |y: usize, y2: usize| {
            elems.iter().all(|&x| (self.trans[g(x).index()][y2] - self.trans[x.index()][y]).abs() <= MATCH_TOL)
        };
        let adj: Vec<Vec<usize>> = (0..m).map(|y| (0..m).filter(|&y2| fits(y, y2)).collect()).collect();
        let matching = perfect_matching(&adj, m)?;
        Some(matching)
    }

    /// A stochastic `Φ` (rows indexed by outputs of `self`) with
    /// `other(y'|x) = Σ_y self(y|x) Φ(y, y')`, i.e. `other` is degraded with
    /// respect to `self`.
    pub fn degradation_witness(&self, other: &Dmc) -> Result<Option<Vec<Vec<f64>>>> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        let (m, m2) = (self.outputs(), other.outputs());
        if m * m2 > MAX_DEGRADATION_VARS {
            return Err(Error::TooLarge(format!("{m}·{m2} variables exceed {MAX_DEGRADATION_VARS}")));
        }
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Vec<_>> = (0..m).map(|_| (0..m2).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect()).collect();
        for row in &vars {
            let terms: Vec<_> = row.iter().map(|&v| (v, 1.0)).collect();
            lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, 1.0);
        }
        for x in 0..self.inputs() {
            for y2 in 0..m2 {
                let terms: Vec<_> = (0..m).map(|y| (vars[y][y2], self.trans[x][y])).collect();
                lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, other.trans[x][y2]);
            }
        }
        let sol = match lp.solve() {
            Ok(out) => match out.into_solution() {
                Ok(s) => s,
                Err(_) => return Err(Error::TooLarge("degradation search interrupted".into())),
            },
            Err(microlp::Error::Infeasible) => return Ok(None),
            Err(e) => return Err(Error::PreconditionViolated(format!("linear program failed: {e}"))),
        };
        let phi: Vec<Vec<f64>> =
            vars.iter().map(|row| row.iter().map(|&v| sol.var_value(v).max(0.0)).collect()).collect();
        let ok = (0..self.inputs()).all(|x| {
            (0..m2).all(|y2| {
                let s: f64 = (0..m).map(|y| self.trans[x][y] * phi[y][y2]).sum();
                (s - other.trans[x][y2]).abs() <= LP_TOL
            })
        });
        Ok(ok.then_some(phi))
    }
}

/// Kuhn's augmenting-path algorithm; `adj[y]` lists admissible partners.
fn perfect_matching(adj: &[Vec<usize>], m: usize) -> Option<Vec<usize>> {
    fn augment(y: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &y2 in &adj[y] {
            if seen[y2] {
                continue;
            }
            seen[y2] = true;
            if owner[y2].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[y2] = Some(y);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; m];
    for y in 0..adj.len() {
        let mut seen = vec![false; m];
        if !augment(y, adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut perm = vec![0; adj.len()];
    for (y2, o) in owner.iter().enumerate() {
        if let Some(y) = o {
            perm[*y] = y2;
        }
    }
    Some(perm)
}

/// The `i`-th synthetic channel of one kernel step (0-based, in decoding
/// order): input `u_i`, output `(y_0..y_{l-1}, u_0..u_{i-1})`, with later
/// inputs uniform. Outputs with proportional likelihood vectors are merged
/// and the result is sorted canonically.
pub fn split_exact(w: &Dmc, k: &Kernel, i: usize) -> Result<Dmc> {
    if *w.field != **k.field() {
        return Err(Error::FieldMismatch);
    }
    let l = k.size();
    if i >= l {
        return Err(Error::OutOfRange(format!("index {i} of a size-{l} kernel")));
    }
    let f = &*w.field;
    let q = f.order() as u64;
    let m = w.outputs() as u64;
    let outputs = m.checked_pow(l as u32).and_then(|a| a.checked_mul(q.checked_pow(i as u32)?));
    let work = m.checked_pow(l as u32).and_then(|a| a.checked_mul(q.checked_pow(l as u32)?));
    if outputs.is_none_or(|o| o > MAX_SPLIT_OUTPUTS) || work.is_none_or(|o| o > (1u64 << 34)) {
        return Err(Error::TooLarge(format!("split of a size-{l} kernel over {m} outputs")));
    }
    let g = k.matrix();
    let elems: Vec<FieldElement> = f.elements().collect();
    let ql = q.pow(l as u32) as usize;
    // every message u (digits u_0 first, most significant) and its codeword
    let codewords: Vec<Vec<FieldElement>> = (0..ql)
        .map(|code| {
            let u = digits(code, q as usize, l);
            let mut x = vec![FieldElement::ZERO; l];
            for (r, &ur) in u.iter().enumerate() {
                crate::linalg::axpy(f, &mut x, elems[ur], &g[r]);
            }
            x
        })
        .collect();
    let prefixes = q.pow(i as u32) as usize;
    let block = q.pow((l - i) as u32) as usize;
    let suffixes = block / q as usize;
    let norm = 1.0 / q.pow(l as u32 - 1) as f64;
    let mut merged = OutputMerger::default();
    let mut col = vec![0.0; q as usize];
    for ycode in 0..m.pow(l as u32) as usize {
        let y = digits(ycode, m as usize, l);
        for pre in 0..prefixes {
            for (ui, c) in col.iter_mut().enumerate() {
                let base = pre * block + ui * suffixes;
                *c = norm
                    * codewords[base..base + suffixes]
                        .iter()
                        .map(|x| x.iter().zip(&y).map(|(xj, &yj)| w.trans[xj.index()][yj]).product::<f64>())
                        .sum::<f64>();
            }
            merged.add(&col);
        }
    }
    let cols = merged.finish();
    let trans = (0..q as usize).map(|x| cols.iter().map(|c| c[x]).collect()).collect();
    Ok(Dmc { field: w.field.clone(), trans })
}

/// Normalized likelihood vectors closer than this (in every entry) are
/// the same output.
const MERGE_TOL: f64 = 1e-10;
/// Grid cell size for looking up candidates; much larger than the tolerance
/// so that a vector usually touches a single cell.
const MERGE_CELL: f64 = 1e-8;

/// Groups output columns whose normalized likelihood vectors agree within
/// [`MERGE_TOL`], including vectors on either side of a cell boundary.
#[derive(Default)]
struct OutputMerger {
    cells: HashMap<Vec<i64>, Vec<usize>>,
    reps: Vec<(Vec<i64>, Vec<f64>)>,
    sums: Vec<Vec<f64>>,
}

impl OutputMerger {
    fn add(&mut self, col: &[f64]) {
        let total: f64 = col.iter().sum();
        if total <= 0.0 {
            return;
        }
        let v: Vec<f64> = col.iter().map(|c| c / total).collect();
        let cell = |x: f64| (x / MERGE_CELL).floor() as i64;
        let key: Vec<i64> = v.iter().map(|&x| cell(x)).collect();
        // cells reachable within the tolerance, per coordinate
        let options: Vec<Vec<i64>> = v
            .iter()
            .map(|&x| {
                let (lo, hi) = (cell(x - MERGE_TOL), cell(x + MERGE_TOL));
                if lo == hi { vec![lo] } else { vec![lo, hi] }
            })
            .collect();
        let mut pick = vec![0usize; v.len()];
        let found = 'search: loop {
            let probe: Vec<i64> = options.iter().zip(&pick).map(|(o, &p)| o[p]).collect();
            if let Some(ids) = self.cells.get(&probe) {
                for &id in ids {
                    if self.reps[id].1.iter().zip(&v).all(|(a, b)| (a - b).abs() <= MERGE_TOL) {
                        break 'search Some(id);
                    }
                }
            }
            let mut t = 0;
            while t < pick.len() && pick[t] + 1 == options[t].len() {
                pick[t] = 0;
                t += 1;
            }
            if t == pick.len() {
                break None;
            }
            pick[t] += 1;
        };
        let id = found.unwrap_or_else(|| {
            self.cells.entry(key.clone()).or_default().push(self.reps.len());
            self.reps.push((key, v));
            self.sums.push(vec![0.0; col.len()]);
            self.reps.len() - 1
        });
        for (a, b) in self.sums[id].iter_mut().zip(col) {
            *a += b;
        }
    }

    /// Merged columns in canonical order of their representatives.
    fn finish(self) -> Vec<Vec<f64>> {
        let mut order: Vec<usize> = (0..self.reps.len()).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (&self.reps[a].1, &self.reps[b].1);
            ra.iter().zip(rb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        });
        order.into_iter().map(|i| self.sums[i].clone()).collect()
    }
}

fn digits(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::rational_curve;
    use crate::linalg;

    fn gf(q: u32) -> Arc<FiniteField> {
        Arc::new(FiniteField::with_order(q).unwrap())
    }

    fn arikan() -> Kernel {
        let (o, z) = (FieldElement::ONE, FieldElement::ZERO);
        Kernel::from_matrix(gf(2), vec![vec![o, z], vec![o, o]]).unwrap()
    }

    #[test]
    fn merging_across_cell_boundaries() {
        let mut m = OutputMerger::default();
        let edge = 3.0 * MERGE_CELL;
        m.add(&[edge - 1e-13, 1.0 - edge + 1e-13]);
        m.add(&[edge + 1e-13, 1.0 - edge - 1e-13]);
        m.add(&[0.5, 0.5]);
        m.add(&[1.0, 1.0]);
        let cols = m.finish();
        assert_eq!(cols.len(), 2);
        assert!((cols[0][0] + cols[0][1] - 2.0).abs() < 1e-12);
        assert_eq!(cols[1], vec![1.5, 1.5]);
    }

    #[test]
    fn qsc_values() {
        let w = Dmc::qsc(gf(4), 0.1).unwrap();
        assert!((w.prob(1, FieldElement(0)) - 0.1 / 3.0).abs() < 1e-15);
        // Z = (q-2)/(q-1) p + 2 sqrt(p(1-p)/(q-1)) for the q-ary symmetric channel
        let z = 2.0 / 3.0 * 0.1 + 2.0 * (0.1f64 * 0.9 / 3.0).sqrt();
        assert!((w.bhattacharyya() - z).abs() < 1e-12);
        assert!(Dmc::qsc(gf(4), 1.5).is_err());
    }

    #[test]
    fn bsc_information() {
        let p: f64 = 0.11;
        let w = Dmc::qsc(gf(2), p).unwrap();
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((w.mutual_information() - (1.0 - h)).abs() < 1e-12);
        assert!((w.bhattacharyya() - 2.0 * (p * (1.0 - p)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invalid_rows() {
        assert!(matches!(Dmc::new(gf(2), vec![vec![0.5, 0.4], vec![0.5, 0.5]]), Err(Error::InvalidChannel(_))));
        assert!(matches!(Dmc::new(gf(2), vec![vec![1.0]]), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn symmetry_witnesses() {
        let w = Dmc::qsc(gf(4), 0.2).unwrap();
        let wit = w.sof_witnesses().unwrap().unwrap();
        for (d, p) in wit.add.iter().enumerate() {
            for x in 0..4 {
                let xd = w.field.add(FieldElement(x), FieldElement(d as u16)).index();
                for y in 0..4 {
                    assert_eq!(w.trans[xd][p[y]], w.trans[x as usize][y]);
                }
            }
        }
        // binary erasure channel is symmetric; a skewed channel is not
        let bec = Dmc::new(gf(2), vec![vec![0.7, 0.3, 0.0], vec![0.0, 0.3, 0.7]]).unwrap();
        assert!(bec.sof_witnesses().unwrap().is_some());
        let z = Dmc::new(gf(2), vec![vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap();
        assert!(z.sof_witnesses().unwrap().is_none());
    }

    #[test]
    fn arikan_splits_of_bec() {
        // W- = BEC(2e - e²), W+ = BEC(e²); erasure channels are identified by Z
        let e = 0.3;
        let bec = Dmc::new(gf(2), vec![vec![1.0 - e, e, 0.0], vec![0.0, e, 1.0 - e]]).unwrap();
        let minus = split_exact(&bec, &arikan(), 0).unwrap();
        let plus = split_exact(&bec, &arikan(), 1).unwrap();
        assert!((minus.bhattacharyya() - (2.0 * e - e * e)).abs() < 1e-12);
        assert!((plus.bhattacharyya() - e * e).abs() < 1e-12);
        assert_eq!(minus.outputs(), 3);
        let total = minus.mutual_information() + plus.mutual_information();
        assert!((total - 2.0 * bec.mutual_information()).abs() < 1e-12);
    }

    #[test]
    fn splits_conserve_information() {
        let f = gf(4);
        let w = Dmc::qsc(f.clone(), 0.1).unwrap();
        let k = Kernel::from_curve(Arc::new(rational_curve(f)));
        let total: f64 = (0..4).map(|i| split_exact(&w, &k, i).unwrap().mutual_information()).sum();
        assert!((total - 4.0 * w.mutual_information()).abs() < 1e-9);
    }

    #[test]
    fn degradation() {
        let f = gf(2);
        let good = Dmc::qsc(f.clone(), 0.05).unwrap();
        let bad = Dmc::qsc(f.clone(), 0.2).unwrap();
        let phi = good.degradation_witness(&bad).unwrap().unwrap();
        for row in &phi {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert!(bad.degradation_witness(&good).unwrap().is_none());
        let splits = split_exact(&good, &arikan(), 0).unwrap();
        assert!(good.degradation_witness(&splits).unwrap().is_some());
        let id = Kernel::from_matrix(f, linalg::identity(2)).unwrap();
        let same = split_exact(&good, &id, 1).unwrap();
        assert_eq!(same.outputs(), 2);
        assert!((same.bhattacharyya() - good.bhattacharyya()).abs() < 1e-12);
    }
}
