//! Parsing and validating command-line descriptors.

use std::path::Path;
use std::sync::Arc;

use castle_polar::channel::Dmc;
use castle_polar::codeset::{parse_monomial, IndexSetJson, MonomialIndexSet};
use castle_polar::curve::{CurveDescriptor, CurveFamily, PointedCurve};
use castle_polar::kernel::Kernel;
use castle_polar::{FieldDescriptor, FiniteField};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{Failure, KernelArgs, SetArgs};

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Parses `p=<p>,r=<r>`.
pub fn field_descriptor(s: &str) -> Result<FieldDescriptor, Failure> {
    let (mut p, mut r) = (None, None);
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| invalid(format!("bad field {s:?}, expected p=<p>,r=<r>")))?;
        let v: u32 = v.trim().parse().map_err(|_| invalid(format!("bad number in field {s:?}")))?;
        match k.trim() {
            "p" => p = Some(v),
            "r" => r = Some(v),
            other => return Err(invalid(format!("unknown field parameter {other:?}"))),
        }
    }
    let p = p.ok_or_else(|| invalid("field needs p"))?;
    Ok(FieldDescriptor { p, r: r.unwrap_or(1), modulus: None })
}

pub fn field(s: &str) -> Result<Arc<FiniteField>, Failure> {
    Ok(Arc::new(field_descriptor(s)?.build()?))
}

/// A curve from `rational`, `hermitian` or `custom:<path>`.
pub fn curve(spec: &str, field: Option<&str>) -> Result<Arc<PointedCurve>, Failure> {
    let fd = field.map(field_descriptor).transpose()?;
    let desc = if let Some(path) = spec.strip_prefix("custom:") {
        let desc: CurveDescriptor = read_json(Path::new(path))?;
        if let Some(fd) = &fd {
            if (fd.p, fd.r) != (desc.field.p, desc.field.r) {
                return Err(invalid(format!("--field p={},r={} disagrees with {path}", fd.p, fd.r)));
            }
        }
        desc
    } else {
        let family = match spec {
            "rational" => CurveFamily::Rational,
            "hermitian" => CurveFamily::Hermitian,
            other => return Err(invalid(format!("unknown curve {other:?}"))),
        };
        let field = fd.ok_or_else(|| invalid(format!("--field is required for the {spec} curve")))?;
        CurveDescriptor { family, field, points: None, gens: None, genus: None, hstar: None, basis: None }
    };
    Ok(Arc::new(desc.build()?))
}

impl KernelArgs {
    pub fn curve(&self) -> Result<Arc<PointedCurve>, Failure> {
        let spec = self.curve.as_deref().ok_or_else(|| invalid("this command needs --curve"))?;
        curve(spec, self.field.as_deref())
    }

    /// The factor kernels: one for `--curve`, several for `--kron`.
    pub fn factors(&self) -> Result<Vec<Kernel>, Failure> {
        match (&self.curve, &self.kron) {
            (Some(_), _) => Ok(vec![Kernel::from_curve(self.curve()?)]),
            (None, Some(list)) => {
                let specs: Vec<&str> = list.split(',').map(str::trim).collect();
                if specs.len() < 2 {
                    return Err(invalid("--kron needs at least two kernels"));
                }
                specs
                    .iter()
                    .map(|s| Ok(Kernel::from_curve(curve(s, self.field.as_deref())?)))
                    .collect()
            }
            (None, None) => Err(invalid("give --curve or --kron")),
        }
    }

    pub fn kernel(&self) -> Result<Kernel, Failure> {
        let factors = self.factors()?;
        let mut k = factors[0].clone();
        for f in &factors[1..] {
            k = k.kron(f)?;
        }
        Ok(k)
    }
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ChannelJson {
    Qsc { p: f64 },
    Table { trans: Vec<Vec<f64>> },
}

/// A channel from `qsc:<p>` or `table:<path>` over `field`.
pub fn channel(spec: &str, field: &Arc<FiniteField>) -> Result<Dmc, Failure> {
    let parsed = if let Some(p) = spec.strip_prefix("qsc:") {
        ChannelJson::Qsc { p: p.parse().map_err(|_| invalid(format!("bad crossover probability {p:?}")))? }
    } else if let Some(path) = spec.strip_prefix("table:") {
        read_json(Path::new(path))?
    } else {
        return Err(invalid(format!("unknown channel {spec:?}, expected qsc:<p> or table:<path>")));
    };
    Ok(match parsed {
        ChannelJson::Qsc { p } => Dmc::qsc(field.clone(), p)?,
        ChannelJson::Table { trans } => Dmc::new(field.clone(), trans)?,
    })
}

pub fn channel_json(spec: &str, w: &Dmc) -> Value {
    match spec.strip_prefix("qsc:").and_then(|p| p.parse::<f64>().ok()) {
        Some(p) => json!({"type": "qsc", "q": w.inputs(), "p": p}),
        None => json!({"type": "table", "trans": w.trans()}),
    }
}

impl SetArgs {
    pub fn set(&self, curve: &PointedCurve) -> Result<MonomialIndexSet, Failure> {
        let a = match (&self.set, &self.members) {
            (Some(path), _) => MonomialIndexSet::from_json(&read_json::<IndexSetJson>(path)?)?,
            (None, Some(list)) => {
                let members = list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_monomial(curve, self.n, s))
                    .collect::<Result<Vec<_>, _>>()?;
                MonomialIndexSet::new(curve.len(), self.n, members)?
            }
            (None, None) => return Err(invalid("give --set or --members")),
        };
        if a.l() != curve.len() {
            return Err(invalid(format!("set has l = {} but the curve has {} points", a.l(), curve.len())));
        }
        Ok(a)
    }
}
