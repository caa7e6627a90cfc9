//! Worked examples checked end to end.

use std::sync::Arc;

use castle_polar::codeset::{self, ag_min_distance, dual_set, generator_matrix, min_distance_bound, parse_monomial};
use castle_polar::curve::{hermitian_curve, rational_curve, PointedCurve};
use castle_polar::kernel::{castle_sequence, is_chain_isometric, kron_exponent, Kernel, DEFAULT_BUDGET};
use castle_polar::{FieldElement, FiniteField};
use castle_polar::codeset::MonomialIndexSet;
use serde_json::{json, Value};

type Check = Result<String, String>;

const HERMITIAN_TABLE: [(&str, [u16; 8]); 8] = [
    ("x^3y", [0, 0, 2, 3, 2, 3, 2, 3]),
    ("x^2y", [0, 0, 2, 3, 1, 2, 3, 1]),
    ("x^3", [0, 0, 1, 1, 1, 1, 1, 1]),
    ("xy", [0, 0, 2, 3, 3, 1, 1, 2]),
    ("x^2", [0, 0, 1, 1, 3, 3, 2, 2]),
    ("y", [0, 1, 2, 3, 2, 3, 2, 3]),
    ("x", [0, 0, 1, 1, 2, 2, 3, 3]),
    ("1", [1, 1, 1, 1, 1, 1, 1, 1]),
];

/// Monomials of the dual of {y₁x₂, x₂, y₁, x₁, 1, x₁x₂} over the Hermitian curve.
const DUAL_EXAMPLE: &str = "x_1y_1x_2^3y_2, x_1^2x_2^3y_2, y_1x_2^3y_2, x_1x_2^3y_2, x_2^3y_2, \
    x_1y_1x_2^2y_2, x_1^2x_2^2y_2, y_1x_2^2y_2, x_1x_2^2y_2, x_2^2y_2, x_1^3y_1x_2^3, x_1^2y_1x_2^3, \
    x_1^3x_2^3, x_1y_1x_2^3, x_1^2x_2^3, y_1x_2^3, x_1x_2^3, x_2^3, x_1^3y_1x_2y_2, x_1^2y_1x_2y_2, \
    x_1^3x_2y_2, x_1y_1x_2y_2, x_1^2x_2y_2, y_1x_2y_2, x_1x_2y_2, x_2y_2, x_1^3y_1x_2^2, x_1^2y_1x_2^2, \
    x_1^3x_2^2, x_1y_1x_2^2, x_1^2x_2^2, y_1x_2^2, x_1x_2^2, x_2^2, x_1^3y_1y_2, x_1^2y_1y_2, x_1^3y_2, \
    x_1y_1y_2, x_1^2y_2, y_1y_2, x_1y_2, y_2, x_1^3y_1x_2, x_1^2y_1x_2, x_1^3x_2, x_1y_1x_2, x_1^2x_2, \
    y_1x_2, x_1x_2, x_2, x_1^3y_1, x_1^2y_1, x_1^3, x_1y_1, x_1^2, y_1, x_1, 1";

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what}: {got:.6} is not within {tol} of {want}"))
}

fn hermitian() -> Arc<PointedCurve> {
    Arc::new(hermitian_curve(Arc::new(FiniteField::with_order(4).expect("GF(4)"))).expect("curve"))
}

fn rational() -> Arc<PointedCurve> {
    Arc::new(rational_curve(Arc::new(FiniteField::with_order(4).expect("GF(4)"))))
}

fn members(c: &PointedCurve, n: usize, names: &str) -> Result<MonomialIndexSet, String> {
    let ks = names
        .split(',')
        .map(|s| parse_monomial(c, n, s.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    MonomialIndexSet::new(c.len(), n, ks).map_err(|e| e.to_string())
}

fn kernel_table() -> Check {
    let k = Kernel::from_curve(hermitian());
    for (i, (label, row)) in HERMITIAN_TABLE.iter().enumerate() {
        let got: Vec<u16> = k.matrix()[i].iter().map(|e| e.0).collect();
        ensure(k.label_strings()[i] == *label && got == row, || format!("row {i} ({label}) differs"))?;
    }
    Ok("8×8 Hermitian kernel over GF(4) matches".into())
}

fn exponents() -> Check {
    let e = |k: &Kernel| k.exponent().map_err(|e| e.to_string());
    let h = Kernel::from_curve(hermitian());
    let r = Kernel::from_curve(rational());
    let short = h.shorten_at(0).and_then(|k| k.shorten_at(1)).map_err(|e| e.to_string())?;
    let (eh, er, es) = (e(&h)?, e(&r)?, e(&short)?);
    near(eh, 0.5622, 5e-5, "Hermitian")?;
    near(es, 0.5268, 5e-5, "shortened 6×6")?;
    near(er, 24f64.ln() / (4.0 * 4f64.ln()), 1e-12, "rational")?;
    let kr = kron_exponent(eh, 8, er, 4);
    near(kr, 0.5665, 5e-5, "Kronecker product")?;
    Ok(format!("{eh:.6}, {es:.6}, {er:.6}, product {kr:.6}"))
}

fn sequence() -> Check {
    let c = hermitian();
    let order: Vec<FieldElement> = c.field().elements().collect();
    let seq = castle_sequence(&c, 0, &order).map_err(|e| e.to_string())?;
    let got: Vec<f64> = seq.iter().map(|k| k.exponent()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for (g, w) in got.iter().zip([0.5, 0.5, 0.5268, 0.5622]) {
        near(*g, w, 5e-5, "sequence")?;
    }
    let h = Kernel::from_curve(c.clone());
    let short = h.shorten_at(0).and_then(|k| k.shorten_at(1)).map_err(|e| e.to_string())?;
    let iso = is_chain_isometric(&short, &seq[2], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(iso, || "shortened 6×6 kernel is not isometric to the sequence kernel".into())?;
    Ok(format!("sizes 2, 4, 6, 8 with exponents {got:.4?}"))
}

fn criterion() -> Check {
    let gf4 = Arc::new(FiniteField::with_order(4).expect("GF(4)"));
    let (o, z) = (FieldElement::ONE, FieldElement::ZERO);
    let ga = Kernel::from_matrix(gf4, vec![vec![o, z], vec![o, o]]).map_err(|e| e.to_string())?;
    let got = [
        Kernel::from_curve(hermitian()).polarizes_sof(),
        Kernel::from_curve(rational()).polarizes_sof(),
        ga.polarizes_sof(),
    ];
    ensure(got == [true, true, false], || format!("hermitian, rational, Arıkan over GF(4): {got:?}"))?;
    Ok("Hermitian and rational kernels polarize; Arıkan's kernel over GF(4) does not".into())
}

fn distances() -> Check {
    let c = hermitian();
    let d3 = ag_min_distance(&c, 3).map_err(|e| e.to_string())?;
    let d2 = ag_min_distance(&c, 2).map_err(|e| e.to_string())?;
    ensure((d3, d2) == (5, 6), || format!("δ(C(D,3Q)) = {d3}, δ(C(D,2Q)) = {d2}"))?;
    let a = members(&c, 2, "y₁x₂, x₂, y₁, x₁, 1")?;
    let bound = min_distance_bound(&a, &c).map_err(|e| e.to_string())?;
    let k = Kernel::from_curve(c.clone());
    let g = generator_matrix(&a, &k, 2).map_err(|e| e.to_string())?;
    let exact = codeset::brute_min_distance(&g, &k).map_err(|e| e.to_string())?;
    ensure(exact >= 6 && exact >= bound.lower, || format!("exact {exact}, lower bound {}", bound.lower))?;
    Ok(format!("factor distances 5 and 6; δ = {exact}, lower bound {}, at least 6", bound.lower))
}

fn duality() -> Check {
    let c = hermitian();
    let a = members(&c, 2, "y₁x₂, x₂, y₁, x₁, 1, x₁x₂")?;
    let expected = members(&c, 2, DUAL_EXAMPLE)?;
    let d = dual_set(&a, &c).map_err(|e| e.to_string())?;
    ensure(expected.len() == 58 && d == expected, || format!("dual has {} members", d.len()))?;
    Ok("58-element dual reproduced".into())
}

pub fn run() -> Value {
    let checks: [(&str, fn() -> Check); 6] = [
        ("hermitian kernel", kernel_table),
        ("exponents", exponents),
        ("shortening sequence", sequence),
        ("polarization criterion", criterion),
        ("minimum distance", distances),
        ("dual set", duality),
    ];
    let results: Vec<Value> = checks
        .iter()
        .map(|(name, f)| match f() {
            Ok(detail) => json!({"check": name, "pass": true, "detail": detail}),
            Err(why) => json!({"check": name, "pass": false, "detail": why}),
        })
        .collect();
    let passed = results.iter().all(|r| r["pass"] == json!(true));
    json!({"checks": results, "passed": passed})
}
