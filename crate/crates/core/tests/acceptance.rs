//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use castle_polar::channel::{split_exact, Dmc};
use castle_polar::codeset::{
    self, decreasing_closure, dual_set, generator_matrix, is_decreasing, min_distance_bound, parse_monomial,
    MonomialIndexSet,
};
use castle_polar::curve::{hermitian_curve, rational_curve, PointedCurve};
use castle_polar::kernel::{castle_sequence, is_chain_isometric, kron_exponent, Kernel, Provenance, DEFAULT_BUDGET};
use castle_polar::linalg::{self, Matrix};
use castle_polar::polarization::{
    bn_permutation, decode_sc, encode, exact_z, gn_matrix, mc_estimate_z, select_info_set, simulate_bler,
    theoretical_order,
};
use castle_polar::{Error, FieldElement, FiniteField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn gf(q: u32) -> Arc<FiniteField> {
    Arc::new(FiniteField::with_order(q).unwrap())
}

fn hermitian() -> Arc<PointedCurve> {
    Arc::new(hermitian_curve(gf(4)).unwrap())
}

fn rational4() -> Arc<PointedCurve> {
    Arc::new(rational_curve(gf(4)))
}

fn arikan(f: Arc<FiniteField>) -> Kernel {
    let (o, z) = (FieldElement::ONE, FieldElement::ZERO);
    Kernel::from_matrix(f, vec![vec![o, z], vec![o, o]]).unwrap()
}

/// Parses a table row written with `0`, `1`, `a`, `a2` for GF(4).
fn gf4_row(s: &str) -> Vec<FieldElement> {
    s.split_whitespace()
        .map(|t| match t {
            "0" => FieldElement(0),
            "1" => FieldElement(1),
            "a" => FieldElement(2),
            "a2" => FieldElement(3),
            _ => panic!("bad entry {t}"),
        })
        .collect()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    check((a - b).abs() <= tol, format!("{what}: {a} vs {b} (tol {tol})"))
}

fn c1_hermitian_table() -> Outcome {
    let expected: Vec<(&str, &str)> = vec![
        ("x^3y", "0 0 a a2 a a2 a a2"),
        ("x^2y", "0 0 a a2 1 a a2 1"),
        ("x^3", "0 0 1 1 1 1 1 1"),
        ("xy", "0 0 a a2 a2 1 1 a"),
        ("x^2", "0 0 1 1 a2 a2 a a"),
        ("y", "0 1 a a2 a a2 a a2"),
        ("x", "0 0 1 1 a a a2 a2"),
        ("1", "1 1 1 1 1 1 1 1"),
    ];
    let c = hermitian();
    let k = Kernel::from_curve(c.clone());
    let pts: Vec<String> = (0..8).map(|i| c.point_name(i)).collect();
    check(pts == ["00", "01", "1α", "1α²", "αα", "αα²", "α²α", "α²α²"], format!("point order {pts:?}"))?;
    for (i, (label, row)) in expected.iter().enumerate() {
        check(k.label_strings()[i] == *label, format!("row {i} label {}", k.label_strings()[i]))?;
        check(k.matrix()[i] == gf4_row(row), format!("row {label} differs"))?;
    }
    Ok("8×8 table matches entry for entry".into())
}

fn c2_exponents() -> Outcome {
    let f = gf(4);
    let ga2 = arikan(gf(2));
    close(ga2.exponent().unwrap(), 0.5, 0.0, "Arıkan")?;
    let h = Kernel::from_curve(hermitian());
    let short = h.shorten_at(0).unwrap().shorten_at(1).unwrap();
    let e6 = short.exponent().unwrap();
    close(e6, 0.5268, 5e-5, "6×6 shortened")?;
    let eh = h.exponent().unwrap();
    close(eh, 0.5622, 5e-5, "Hermitian")?;
    let r = Kernel::from_curve(rational4());
    let er = r.exponent().unwrap();
    close(er, 24f64.ln() / (4.0 * 4f64.ln()), 1e-12, "rational GF(4)")?;
    let closed = kron_exponent(eh, 8, er, 4);
    close(closed, 0.5665, 5e-5, "kron closed form")?;

    let hr = h.kron(&r).unwrap();
    let start = Instant::now();
    let cross = match hr.exponent_with_budget(DEFAULT_BUDGET) {
        Ok(e) if start.elapsed() <= Duration::from_secs(300) => {
            close(e, closed, 1e-9, "32×32 partial distances")?;
            format!("32×32 brute force {e:.6} in {:.1}s", start.elapsed().as_secs_f64())
        }
        Ok(_) | Err(Error::TooLarge(_)) => {
            let ga = arikan(f.clone());
            let ar = ga.kron(&r).unwrap();
            let e = ar.exponent().unwrap();
            let cf = kron_exponent(ga.exponent().unwrap(), 2, er, 4);
            close(e, cf, 1e-9, "G_A⊗G_R partial distances")?;
            format!("32×32 over budget; G_A⊗G_R brute force {e:.6} = closed form")
        }
        Err(e) => return Err(e.to_string()),
    };
    Ok(format!(
        "0.5, {e6:.6}, {eh:.6}, {er:.12}, kron {closed:.6}; {cross}"
    ))
}

fn c3_castle_sequence() -> Outcome {
    let c = hermitian();
    let f = c.field().clone();
    let order: Vec<FieldElement> = f.elements().collect();
    let seq = castle_sequence(&c, 0, &order).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = seq.iter().map(Kernel::size).collect();
    check(sizes == [2, 4, 6, 8], format!("sizes {sizes:?}"))?;
    let expected = [0.5, 0.5, 0.5268, 0.5622];
    let mut got = Vec::new();
    for (k, &e) in seq.iter().zip(&expected) {
        let v = k.exponent().unwrap();
        close(v, e, 5e-5, &format!("size {}", k.size()))?;
        got.push(v);
    }
    // nested: each kernel is a submatrix of the next
    for w in seq.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let cols: Vec<usize> =
            a.column_points().unwrap().iter().map(|p| b.column_of_point(*p).unwrap()).collect();
        for i in 0..a.size() {
            let row: Vec<usize> = (0..b.size()).filter(|&r| b.labels()[r] == a.labels()[i]).collect();
            check(row.len() == 1, "row labels")?;
            let sub: Vec<FieldElement> = cols.iter().map(|&j| b.matrix()[row[0]][j]).collect();
            check(sub == a.matrix()[i], format!("size {} not nested in {}", a.size(), b.size()))?;
        }
    }
    // two 6×6 kernels on the points with x ≠ 0: shortening at P00, P01 and
    // restricting to rows not divisible by x^3
    let h = Kernel::from_curve(c.clone());
    let shortened = h.shorten_at(0).unwrap().shorten_at(1).unwrap();
    let cols: Vec<usize> = (0..8).filter(|&p| !c.points()[p][0].is_zero()).collect();
    let rows: Vec<usize> = (0..8).filter(|&i| c.basis()[7 - i].exponents[0] < 3).collect();
    let support = h
        .restrict(&rows, &cols, Provenance::ShortenByFunction(Box::new(h.provenance().clone()), "x^3 - 1".into(), 3))
        .map_err(|e| e.to_string())?;
    check(
        shortened.column_points().unwrap() == support.column_points().unwrap(),
        "the two 6×6 kernels use different points",
    )?;
    let iso = is_chain_isometric(&shortened, &support, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(iso, "6×6 constructions are not isometric")?;
    // the scaling is the evaluation of x
    let scaled: Matrix = support
        .matrix()
        .iter()
        .map(|row| row.iter().zip(&cols).map(|(&v, &p)| f.mul(v, c.points()[p][0])).collect())
        .collect();
    check(scaled == *shortened.matrix(), "column scaling by x does not map one onto the other")?;
    Ok(format!("exponents {got:.4?}; 6×6 kernels isometric via column scaling by x"))
}

fn c4_kron_law() -> Outcome {
    let f = gf(4);
    let ga = arikan(f.clone());
    let r = Kernel::from_curve(rational4());
    let h = Kernel::from_curve(hermitian());
    let mut s = h.clone();
    for p in 0..4 {
        s = s.shorten_at(p).unwrap();
    }
    let kernels = [("G_A", ga), ("rational", r), ("shortened", s)];
    let mut checked = 0;
    for (na, a) in &kernels {
        for (nb, b) in &kernels {
            if a.size() * b.size() > 16 {
                continue;
            }
            let da = a.partial_distances().unwrap();
            let db = b.partial_distances().unwrap();
            let p = a.kron(b).unwrap();
            for i in 0..p.size() {
                let coset = p.partial_distance_coset(i, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                let syndrome = p.partial_distance_syndrome(i, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                let want = da[i / b.size()] * db[i % b.size()];
                check(
                    coset == want && syndrome == want,
                    format!("{na}⊗{nb} row {i}: {coset}/{syndrome} vs {want}"),
                )?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} products, every row by two exhaustive searches"))
}

fn c5_degradation() -> Outcome {
    let f = gf(4);
    let w = Dmc::qsc(f.clone(), 0.1).unwrap();
    let rc = rational4();
    let r = Kernel::from_curve(rc.clone());
    let z = exact_z(&r, 1, &w).map_err(|e| e.to_string())?;
    let order = theoretical_order(&r, &rc, 1).map_err(|e| e.to_string())?;
    for (i, j) in order.edges() {
        check(z[i] >= z[j] - 1e-9, format!("rational edge {i}→{j}: {} < {}", z[i], z[j]))?;
    }
    let redges = order.edge_count();

    let hc = hermitian();
    let h = Kernel::from_curve(hc.clone());
    let est = mc_estimate_z(&h, 1, &w, 100_000, 2024).map_err(|e| e.to_string())?;
    let order = theoretical_order(&h, &hc, 1).map_err(|e| e.to_string())?;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (i, j) in order.edges() {
        let slack = est.est[i] - est.est[j] + 4.0 * (est.se[i] + est.se[j]);
        worst = worst.max(-slack);
        check(slack >= 0.0, format!("hermitian edge {i}→{j}: {} vs {}", est.est[i], est.est[j]))?;
    }
    Ok(format!("{redges} rational edges exact; {} Hermitian edges within 4 se", order.edge_count()))
}

/// Random invertible upper-triangular `V` and permutation `P`.
fn random_vp(f: &FiniteField, l: usize, rng: &mut ChaCha8Rng) -> (Matrix, Vec<usize>) {
    let q = f.order() as u16;
    let v = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => FieldElement::ZERO,
                    std::cmp::Ordering::Equal => FieldElement(rng.gen_range(1..q)),
                    std::cmp::Ordering::Greater => FieldElement(rng.gen_range(0..q)),
                })
                .collect()
        })
        .collect();
    let mut p: Vec<usize> = (0..l).collect();
    for i in (1..l).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    (v, p)
}

fn c6_split_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases: Vec<(Kernel, Dmc, usize)> = vec![
        (arikan(gf(2)), Dmc::qsc(gf(2), 0.11).unwrap(), 2),
        (arikan(gf(4)), Dmc::qsc(gf(4), 0.1).unwrap(), 2),
        (Kernel::from_curve(rational4()), Dmc::qsc(gf(4), 0.1).unwrap(), 1),
    ];
    for (k, w, n) in &cases {
        let f = k.field().clone();
        let l = k.size();
        let total = l.pow(*n as u32);
        let recursive = exact_z(k, *n, w).map_err(|e| e.to_string())?;
        let gn = Kernel::from_matrix(f.clone(), gn_matrix(k, *n).unwrap()).unwrap();
        let mut info = 0.0;
        for r in 0..total {
            let direct = split_exact(w, &gn, r).map_err(|e| e.to_string())?;
            close(direct.bhattacharyya(), recursive[total - 1 - r], 1e-9, "recursive vs direct split")?;
            info += direct.mutual_information();
            check(direct.sof_witnesses().map_err(|e| e.to_string())?.is_some(), format!("split {r} not symmetric"))?;
        }
        close(info, total as f64 * w.mutual_information(), 1e-9, "information conservation")?;
        if *n == 1 {
            for _ in 0..5 {
                let (v, p) = random_vp(&f, l, &mut rng);
                let vg = linalg::mat_mul(&f, &v, k.matrix());
                let g2: Matrix = vg.iter().map(|row| p.iter().map(|&c| row[c]).collect()).collect();
                let k2 = Kernel::from_matrix(f.clone(), g2).unwrap();
                for i in 0..l {
                    let a = split_exact(w, k, i).unwrap().bhattacharyya();
                    let b = split_exact(w, &k2, i).unwrap().bhattacharyya();
                    close(a, b, 1e-9, "Z under V·G·P")?;
                }
            }
        }
    }
    Ok("recursive = direct, VGP invariance, symmetric splits, information conserved".into())
}

/// Closure of up to three random multi-indices whose digits are below `digit_cap`.
fn random_decreasing(c: &PointedCurve, n: usize, max: usize, digit_cap: usize, rng: &mut ChaCha8Rng) -> MonomialIndexSet {
    let l = c.len();
    loop {
        let seeds = rng.gen_range(1..=3);
        let members: Vec<usize> = (0..seeds)
            .map(|_| {
                let mut k = 0;
                for _ in 0..n {
                    k = k * l + rng.gen_range(0..l.min(digit_cap));
                }
                k
            })
            .collect();
        let a = decreasing_closure(&MonomialIndexSet::new(l, n, members).unwrap(), c).unwrap();
        if a.len() <= max {
            return a;
        }
    }
}

fn c7_min_distance() -> Outcome {
    let c = hermitian();
    let k = Kernel::from_curve(c.clone());
    let names = ["y₁x₂", "x₂", "y₁", "x₁", "1"];
    let a2 = MonomialIndexSet::new(8, 2, names.iter().map(|s| parse_monomial(&c, 2, s).unwrap())).unwrap();
    let g = generator_matrix(&a2, &k, 2).unwrap();
    let exact = codeset::brute_min_distance(&g, &k).map_err(|e| e.to_string())?;
    let bound = min_distance_bound(&a2, &c).map_err(|e| e.to_string())?;
    check(exact >= 6, format!("δ(C_A2) = {exact} < 6"))?;
    check(exact >= bound.lower, format!("δ(C_A2) = {exact} < lower bound {}", bound.lower))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for t in 0..20 {
        let n = 1 + t % 2;
        let a = random_decreasing(&c, n, 10, 5, &mut rng);
        let g = generator_matrix(&a, &k, n).unwrap();
        let d = codeset::brute_min_distance(&g, &k).map_err(|e| e.to_string())?;
        let b = min_distance_bound(&a, &c).map_err(|e| e.to_string())?;
        let upper = b.upper.unwrap_or(usize::MAX);
        check(b.lower <= d && d <= upper, format!("set {t}: {} ≤ {d} ≤ {upper} fails", b.lower))?;
    }
    Ok(format!("δ(C_A2) = {exact} ≥ lower bound {} ≥ 6; 20 random sandwiches hold", bound.lower))
}

const DUAL_58: &str = "x_1y_1x_2^3y_2, x_1^2x_2^3y_2, y_1x_2^3y_2, x_1x_2^3y_2,
	x_2^3y_2, x_1y_1x_2^2y_2, x_1^2x_2^2y_2, y_1x_2^2y_2,
	x_1x_2^2y_2, x_2^2y_2, x_1^3y_1x_2^3, x_1^2y_1x_2^3, x_1^3x_2^3, x_1y_1x_2^3, x_1^2x_2^3, y_1x_2^3, x_1x_2^3, x_2^3,
	x_1^3y_1x_2y_2, x_1^2y_1x_2y_2, x_1^3x_2y_2, x_1y_1x_2y_2, x_1^2x_2y_2, y_1x_2y_2, x_1x_2y_2, x_2y_2,
	x_1^3y_1x_2^2, x_1^2y_1x_2^2, x_1^3x_2^2, x_1y_1x_2^2, x_1^2x_2^2, y_1x_2^2, x_1x_2^2, x_2^2, x_1^3y_1y_2, x_1^2y_1y_2,
	x_1^3y_2, x_1y_1y_2, x_1^2y_2, y_1y_2, x_1y_2, y_2, x_1^3y_1x_2, x_1^2y_1x_2, x_1^3x_2, x_1y_1x_2, x_1^2x_2, y_1x_2,
	x_1x_2, x_2, x_1^3y_1, x_1^2y_1, x_1^3, x_1y_1, x_1^2, y_1, x_1, 1";

fn c8_duality() -> Outcome {
    let c = hermitian();
    let k = Kernel::from_curve(c.clone());
    let f = k.field().clone();
    let x = codeset::isometry_vector(&c).map_err(|e| e.to_string())?;
    check(x.iter().all(|&e| e == FieldElement::ONE), "isometry vector is not all-ones")?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut not_decreasing = 0;
    for t in 0..10 {
        let n = 1 + t % 2;
        let a = random_decreasing(&c, n, 64, 8, &mut rng);
        let d = dual_set(&a, &c).map_err(|e| e.to_string())?;
        if !is_decreasing(&d, &c).unwrap() {
            not_decreasing += 1;
        }
        check(dual_set(&d, &c).unwrap() == a, format!("set {t}: dual is not an involution"))?;
        let ga = generator_matrix(&a, &k, n).unwrap();
        let gd = generator_matrix(&d, &k, n).unwrap();
        let total = 8usize.pow(n as u32);
        let ra = linalg::rank(&f, &ga);
        let rd = if gd.is_empty() { 0 } else { linalg::rank(&f, &gd) };
        check(ra + rd == total, format!("set {t}: dimensions {ra} + {rd} != {total}"))?;
        if !gd.is_empty() {
            let prod = linalg::mat_mul(&f, &ga, &linalg::transpose(&gd));
            check(prod.iter().flatten().all(|e| e.is_zero()), format!("set {t}: not orthogonal"))?;
        }
    }
    let a2p: BTreeSet<usize> = ["y₁x₂", "x₂", "y₁", "x₁", "1", "x₁x₂"]
        .iter()
        .map(|s| parse_monomial(&c, 2, s).unwrap())
        .collect();
    let a2p = MonomialIndexSet::new(8, 2, a2p).unwrap();
    let expected: BTreeSet<usize> =
        DUAL_58.split(',').map(|s| parse_monomial(&c, 2, s.trim()).unwrap()).collect();
    check(expected.len() == 58, format!("listed set has {} members", expected.len()))?;
    let dual = dual_set(&a2p, &c).map_err(|e| e.to_string())?;
    check(*dual.members() == expected, "dual of A'_2 differs from the listed 58-element set")?;
    Ok(format!(
        "10 random sets orthogonal with complementary dimensions, involution holds; \
         {not_decreasing} of the duals are weakly but not fully decreasing; 58-element dual reproduced"
    ))
}

fn c9_polarization_criterion() -> Outcome {
    let h = Kernel::from_curve(hermitian()).polarizes_sof();
    let r = Kernel::from_curve(rational4()).polarizes_sof();
    let a = arikan(gf(4)).polarizes_sof();
    let id = Kernel::from_matrix(gf(4), linalg::identity(4)).unwrap().polarizes_sof();
    check(h && r && !a && !id, format!("hermitian {h}, rational {r}, G_A {a}, identity {id}"))?;
    Ok("hermitian true, rational true, G_A over GF(4) false, identity false".into())
}

fn c10_simulation() -> Outcome {
    let f = gf(4);
    let k = Kernel::from_curve(hermitian());
    let w = Dmc::qsc(f.clone(), 0.05).unwrap();
    let clean = Dmc::qsc(f.clone(), 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 1..=2 {
        let total = 8usize.pow(n as u32);
        let u: Vec<FieldElement> = (0..total).map(|_| FieldElement(rng.gen_range(0..4))).collect();
        let y: Vec<usize> = encode(&k, n, &u).unwrap().iter().map(|e| e.index()).collect();
        check(decode_sc(&k, n, &clean, &y, &vec![None; total]).unwrap() == u, "noiseless decoding failed")?;
    }
    let trials = 10_000;
    let mut bler = Vec::new();
    for (n, samples) in [(1usize, 20_000u64), (2, 4_000)] {
        let total = 8usize.pow(n as u32);
        let z = mc_estimate_z(&k, n, &w, samples, 100 + n as u64).map_err(|e| e.to_string())?;
        let info = select_info_set(&z.est, 8, n, total / 2).unwrap();
        let rep = simulate_bler(&k, n, &w, &info, trials, 200 + n as u64).map_err(|e| e.to_string())?;
        bler.push(rep.bler);
    }
    check(bler[1] < bler[0], format!("BLER N=64 {} not below N=8 {}", bler[1], bler[0]))?;
    Ok(format!("BLER N=8 {:.4}, N=64 {:.4} over {trials} trials each", bler[0], bler[1]))
}

fn c11_structure() -> Outcome {
    let mut curves = vec![
        Arc::new(rational_curve(gf(2))),
        rational4(),
        Arc::new(rational_curve(gf(9))),
        hermitian(),
        Arc::new(hermitian_curve(gf(9)).unwrap()),
        Arc::new(hermitian_curve(gf(16)).unwrap()),
    ];
    for c in curves.drain(..) {
        for g in c.gens() {
            let map = c.fi_map(g.pole).map_err(|e| e.to_string())?;
            let images: BTreeSet<u32> = map.iter().map(|p| p.1).collect();
            let domain: BTreeSet<u32> = c.hstar().iter().copied().collect();
            check(images == domain, format!("fi_map({}) on {c} is not a bijection", g.pole))?;
        }
        let oracle = rank_jump_hstar(&c);
        check(oracle == c.hstar(), format!("{c}: hstar {:?} vs rank jumps {oracle:?}", c.hstar()))?;
    }
    for (l, n) in [(2, 10), (3, 5), (4, 4), (8, 3)] {
        let p = bn_permutation(l, n).unwrap();
        check(p.iter().enumerate().all(|(i, &j)| p[j] == i), format!("B_n not an involution at l={l}"))?;
    }
    let kernels = [
        (arikan(gf(2)), 6),
        (Kernel::from_curve(rational4()), 3),
        (Kernel::from_curve(hermitian()), 2),
    ];
    for (k, nmax) in &kernels {
        for n in 1..=*nmax {
            let g = gn_matrix(k, n).unwrap();
            let total = g.len();
            let f = k.field();
            let l = k.size();
            for (r, row) in g.iter().enumerate() {
                // X_t is evaluated at the t-th most significant column digit
                let kd = codeset::digits(total - 1 - r, l, n);
                for (j, &e) in row.iter().enumerate() {
                    let cd = codeset::digits(j, l, n);
                    let prod = (0..n).fold(f.one(), |acc, t| f.mul(acc, k.matrix()[l - 1 - kd[n - 1 - t]][cd[t]]));
                    check(e == prod, format!("G_{n}[{r}][{j}] for l={l}"))?;
                }
            }
        }
    }
    Ok("fi_map bijective, hstar = rank jumps, B_n involutive, row-monomial identity holds".into())
}

/// Pole orders at which `C(D, mQ)` grows, from all monomials `Π t_i^{e_i}`
/// with pole order at most `m` (not only the reduced ones).
fn rank_jump_hstar(c: &PointedCurve) -> Vec<u32> {
    let f = c.field();
    let l = c.len();
    let poles: Vec<u32> = c.gens().iter().map(|g| g.pole).collect();
    let max = 2 * c.hstar().last().copied().unwrap() + 2;
    let mut monos: Vec<(u32, Vec<u32>)> = Vec::new();
    let mut stack = vec![(0usize, 0u32, Vec::new())];
    while let Some((i, pole, exps)) = stack.pop() {
        if i == poles.len() {
            monos.push((pole, exps));
            continue;
        }
        let mut e = 0;
        while pole + e * poles[i] <= max {
            let mut ex: Vec<u32> = exps.clone();
            ex.push(e);
            stack.push((i + 1, pole + e * poles[i], ex));
            e += 1;
        }
    }
    monos.sort();
    let mut rows: Matrix = Vec::new();
    let mut rank = 0;
    let mut out = Vec::new();
    for (pole, exps) in monos {
        let row: Vec<FieldElement> = c
            .points()
            .iter()
            .map(|p| p.iter().zip(&exps).fold(f.one(), |acc, (&x, &e)| f.mul(acc, f.pow(x, e as u64))))
            .collect();
        rows.push(row);
        let r = linalg::rank(f, &rows);
        if r > rank {
            rank = r;
            out.push(pole);
        }
        if rank == l {
            break;
        }
    }
    out
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 Hermitian kernel reproduction", c1_hermitian_table),
        ("2 exponent values", c2_exponents),
        ("3 shortening sequence", c3_castle_sequence),
        ("4 Kronecker partial-distance law", c4_kron_law),
        ("5 degradation ordering", c5_degradation),
        ("6 split identities and invariances", c6_split_identities),
        ("7 minimum distance", c7_min_distance),
        ("8 duality", c8_duality),
        ("9 polarization criterion", c9_polarization_criterion),
        ("10 end-to-end simulation", c10_simulation),
        ("11 structural lemmas", c11_structure),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(&format!("{f} "))) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
