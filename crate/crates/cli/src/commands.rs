//! One function per subcommand, each returning a JSON report.

use castle_polar::channel::{split_exact, Dmc};
use castle_polar::codeset::{
    self, digits, dual_set, generator_matrix, is_decreasing, min_distance_bound, monomial_name, MonomialIndexSet,
};
use castle_polar::curve::PointedCurve;
use castle_polar::kernel::{castle_sequence, exponent_from_distances, kron_exponent, Kernel, DEFAULT_BUDGET};
use castle_polar::polarization::{
    frozen_positions, mc_estimate_z, select_info_set, simulate_bler, theoretical_order, ZEstimates,
};
use castle_polar::{Error, FieldElement};
use serde_json::{json, Value};

use crate::inputs::{self, channel_json};
use crate::{Failure, KernelArgs, SetArgs};

fn indices(row: &[FieldElement]) -> Vec<usize> {
    row.iter().map(|e| e.index()).collect()
}

pub fn kernel_json(k: &Kernel) -> Value {
    let rows: Vec<Value> = k
        .label_strings()
        .into_iter()
        .zip(k.matrix())
        .map(|(label, row)| json!({"label": label, "values": indices(row)}))
        .collect();
    let mut v = json!({
        "field": k.field().descriptor(),
        "l": k.size(),
        "rows": rows,
        "provenance": k.provenance().to_string(),
    });
    if let (Some(c), Some(pts)) = (k.curve(), k.column_points()) {
        v["points"] = json!(pts.iter().map(|&p| c.point_name(p)).collect::<Vec<_>>());
    }
    v
}

fn set_json(a: &MonomialIndexSet, curve: Option<&PointedCurve>) -> Value {
    let mut v = serde_json::to_value(a.to_json()).expect("set serializes");
    if let Some(c) = curve {
        v["monomials"] = json!(a.members().iter().map(|&k| monomial_name(c, a.n(), k)).collect::<Vec<_>>());
    }
    v
}

fn index_entry(curve: Option<&PointedCurve>, l: usize, n: usize, k: usize) -> Value {
    let mut v = json!({"index": digits(k, l, n)});
    if let Some(c) = curve {
        v["monomial"] = json!(monomial_name(c, n, k));
    }
    v
}

pub fn kernel(args: &KernelArgs) -> Result<Value, Failure> {
    Ok(kernel_json(&args.kernel()?))
}

pub fn exponent(args: &KernelArgs, brute: bool, budget: Option<u64>) -> Result<Value, Failure> {
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    let factors = args.factors()?;
    let k = args.kernel()?;
    let mut report = json!({"kernel": k.provenance().to_string(), "l": k.size()});
    let distances = if factors.len() == 1 || brute {
        report["method"] = json!("enumeration");
        k.partial_distances_with_budget(budget)?
    } else {
        // D_{i·l_b + j}(A ⊗ B) = D_i(A) · D_j(B)
        report["method"] = json!("product of factor partial distances");
        let mut d = vec![1usize];
        for f in &factors {
            let df = f.partial_distances_with_budget(budget)?;
            d = d.iter().flat_map(|&a| df.iter().map(move |&b| a * b)).collect();
        }
        d
    };
    let e = exponent_from_distances(&distances);
    report["partial_distances"] = json!(distances);
    report["exponent"] = json!(e);
    if factors.len() > 1 {
        let mut closed = (0.0, 1usize);
        for f in &factors {
            let ef = exponent_from_distances(&f.partial_distances_with_budget(budget)?);
            closed = (kron_exponent(closed.0, closed.1, ef, f.size()), closed.1 * f.size());
        }
        report["closed_form"] = json!(closed.0);
    }
    Ok(report)
}

pub fn standard_form(args: &KernelArgs) -> Result<Value, Failure> {
    let k = args.kernel()?;
    let sf = k.standard_form();
    let rows = |m: &castle_polar::Matrix| m.iter().map(|r| indices(r)).collect::<Vec<_>>();
    Ok(json!({
        "kernel": k.provenance().to_string(),
        "matrix": rows(&sf.matrix),
        "v": rows(&sf.v),
        "perm": sf.perm,
        "subfield_order": k.field().subfield_generated(sf.matrix.iter().flatten().copied()),
        "polarizes_sof": k.polarizes_sof(),
    }))
}

pub fn shorten(args: &KernelArgs, points: Option<&str>, sequence: bool) -> Result<Value, Failure> {
    let curve = args.curve()?;
    if sequence {
        let order: Vec<FieldElement> = curve.field().elements().collect();
        let kernels = castle_sequence(&curve, 0, &order)?
            .iter()
            .map(|k| {
                Ok(json!({
                    "l": k.size(),
                    "rows": k.label_strings(),
                    "points": k.column_points().unwrap_or(&[]).iter().map(|&p| curve.point_name(p)).collect::<Vec<_>>(),
                    "exponent": k.exponent()?,
                }))
            })
            .collect::<Result<Vec<Value>, Error>>()?;
        return Ok(json!({"curve": curve.to_string(), "kernels": kernels}));
    }
    let mut k = Kernel::from_curve(curve.clone());
    for name in points.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p = (0..curve.len())
            .find(|&p| curve.point_name(p) == name)
            .ok_or_else(|| Failure::Invalid(format!("unknown point {name:?}")))?;
        k = k.shorten_at(p)?;
    }
    let d = k.partial_distances()?;
    let mut report = kernel_json(&k);
    report["exponent"] = json!(exponent_from_distances(&d));
    report["partial_distances"] = json!(d);
    Ok(report)
}

pub fn kron(args: &KernelArgs) -> Result<Value, Failure> {
    if args.kron.is_none() {
        return Err(Failure::Invalid("kron needs --kron a,b".into()));
    }
    let factors = args.factors()?;
    let k = args.kernel()?;
    let mut closed = (0.0, 1usize);
    let mut parts = Vec::new();
    for f in &factors {
        let e = f.exponent()?;
        parts.push(json!({"kernel": f.provenance().to_string(), "l": f.size(), "exponent": e}));
        closed = (kron_exponent(closed.0, closed.1, e, f.size()), closed.1 * f.size());
    }
    let mut report = kernel_json(&k);
    report["factors"] = json!(parts);
    report["closed_form_exponent"] = json!(closed.0);
    Ok(report)
}

fn channel_summary(w: &Dmc) -> Result<Value, Failure> {
    let symmetric = match w.sof_witnesses() {
        Ok(s) => json!(s.is_some()),
        Err(Error::TooLarge(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "outputs": w.outputs(),
        "bhattacharyya": w.bhattacharyya(),
        "mutual_information": w.mutual_information(),
        "symmetric": symmetric,
    }))
}

pub fn channel_info(field: &str, spec: &str) -> Result<Value, Failure> {
    let f = inputs::field(field)?;
    let w = inputs::channel(spec, &f)?;
    let mut report = channel_summary(&w)?;
    report["channel"] = channel_json(spec, &w);
    Ok(report)
}

pub fn split(args: &KernelArgs, spec: &str, index: Option<usize>) -> Result<Value, Failure> {
    let k = args.kernel()?;
    let w = inputs::channel(spec, k.field())?;
    let rows: Vec<usize> = match index {
        Some(i) if i >= k.size() => return Err(Failure::Invalid(format!("row {i} out of range"))),
        Some(i) => vec![i],
        None => (0..k.size()).collect(),
    };
    let labels = k.label_strings();
    let mut splits = Vec::new();
    let mut total_info = 0.0;
    for &i in &rows {
        let s = split_exact(&w, &k, i)?;
        total_info += s.mutual_information();
        let mut entry = channel_summary(&s)?;
        entry["row"] = json!(i);
        entry["label"] = json!(labels[i]);
        splits.push(entry);
    }
    let mut report = json!({
        "kernel": k.provenance().to_string(),
        "channel": channel_json(spec, &w),
        "splits": splits,
    });
    if index.is_none() {
        report["sum_mutual_information"] = json!(total_info);
        report["l_times_mutual_information"] = json!(k.size() as f64 * w.mutual_information());
    }
    Ok(report)
}

fn estimates(k: &Kernel, w: &Dmc, n: usize, samples: u64, seed: u64) -> Result<ZEstimates, Failure> {
    if samples == 0 {
        return Err(Failure::Invalid("--samples must be positive".into()));
    }
    Ok(mc_estimate_z(k, n, w, samples, seed)?)
}

pub fn polarize(args: &KernelArgs, spec: &str, n: usize, samples: u64, seed: u64) -> Result<Value, Failure> {
    let k = args.kernel()?;
    let curve = k.curve().cloned();
    let w = inputs::channel(spec, k.field())?;
    let z = estimates(&k, &w, n, samples, seed)?;
    let rows: Vec<Value> = (0..z.est.len())
        .map(|i| {
            let mut v = index_entry(curve.as_deref(), k.size(), n, i);
            v["est"] = json!(z.est[i]);
            v["se"] = json!(z.se[i]);
            v
        })
        .collect();
    Ok(json!({
        "kernel": k.provenance().to_string(),
        "n": n,
        "channel": channel_json(spec, &w),
        "samples": samples,
        "seed": seed,
        "z": rows,
    }))
}

pub fn select(args: &KernelArgs, spec: &str, n: usize, dim: usize, samples: u64, seed: u64) -> Result<Value, Failure> {
    let k = args.kernel()?;
    let curve = k.curve().cloned();
    let w = inputs::channel(spec, k.field())?;
    let z = estimates(&k, &w, n, samples, seed)?;
    let info = select_info_set(&z.est, k.size(), n, dim)?;
    let frozen: Vec<usize> =
        frozen_positions(&info).iter().enumerate().filter(|(_, f)| f.is_some()).map(|(r, _)| r).collect();
    let mut report = set_json(&info, curve.as_deref());
    report["kernel"] = json!(k.provenance().to_string());
    report["channel"] = channel_json(spec, &w);
    report["samples"] = json!(samples);
    report["seed"] = json!(seed);
    report["dim"] = json!(dim);
    report["frozen_positions"] = json!(frozen);
    report["decreasing"] = match &curve {
        Some(c) => json!(is_decreasing(&info, c)?),
        None => Value::Null,
    };
    Ok(report)
}

pub fn order(args: &KernelArgs, n: usize) -> Result<Value, Failure> {
    let curve = args.curve()?;
    let k = Kernel::from_curve(curve.clone());
    let ord = theoretical_order(&k, &curve, n)?;
    let l = curve.len();
    let edges: Vec<Value> = ord
        .edges()
        .map(|(i, j)| {
            json!({
                "worse": monomial_name(&curve, n, i),
                "better": monomial_name(&curve, n, j),
                "worse_index": digits(i, l, n),
                "better_index": digits(j, l, n),
            })
        })
        .collect();
    Ok(json!({"curve": curve.to_string(), "n": n, "l": l, "edge_count": ord.edge_count(), "edges": edges}))
}

pub fn distance_bound(args: &KernelArgs, set: &SetArgs) -> Result<Value, Failure> {
    let curve = args.curve()?;
    let a = set.set(&curve)?;
    let b = min_distance_bound(&a, &curve)?;
    let k = Kernel::from_curve(curve.clone());
    let exact = match generator_matrix(&a, &k, a.n()).and_then(|g| codeset::brute_min_distance(&g, &k)) {
        Ok(d) => Some(d),
        Err(Error::TooLarge(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut report = serde_json::to_value(&b).expect("bound serializes");
    report["set"] = set_json(&a, Some(&curve));
    report["oracle"] = match exact {
        Some(d) => json!({
            "exact": d,
            "lower_holds": b.lower <= d,
            "upper_holds": b.upper.is_none_or(|u| d <= u),
        }),
        None => json!({"exact": null, "reason": "too many codewords to enumerate"}),
    };
    Ok(report)
}

pub fn dual(args: &KernelArgs, set: &SetArgs) -> Result<Value, Failure> {
    let curve = args.curve()?;
    let a = set.set(&curve)?;
    let d = dual_set(&a, &curve)?;
    Ok(json!({
        "set": set_json(&a, Some(&curve)),
        "dual": set_json(&d, Some(&curve)),
        "dual_size": d.len(),
        "dual_decreasing": is_decreasing(&d, &curve)?,
    }))
}

pub fn simulate(
    args: &KernelArgs,
    spec: &str,
    n: usize,
    dim: usize,
    samples: u64,
    trials: u64,
    seed: u64,
) -> Result<Value, Failure> {
    let k = args.kernel()?;
    let w = inputs::channel(spec, k.field())?;
    let z = estimates(&k, &w, n, samples, seed)?;
    let info = select_info_set(&z.est, k.size(), n, dim)?;
    let rep = simulate_bler(&k, n, &w, &info, trials, seed.wrapping_add(1))?;
    Ok(json!({
        "kernel": k.provenance().to_string(),
        "channel": channel_json(spec, &w),
        "n": n,
        "length": z.est.len(),
        "dim": dim,
        "samples": samples,
        "seed": seed,
        "trials": rep.trials,
        "errors": rep.errors,
        "bler": rep.bler,
    }))
}
