//! Instance files: the inputs that reproduce a seeded construction.

use std::path::Path;

use g2strata::classifier::Pattern;
use g2strata::field_curve::{CurvePoint, EllipticCurve, Fe};
use g2strata::{Error, Result};
use serde_json::{json, Value};

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("instance file lacks \"{key}\"")))
}

fn int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::Parse(format!("{what} must be an integer")))
}

pub fn point_from_json(e: &EllipticCurve, v: &Value) -> Result<CurvePoint> {
    match v {
        Value::String(s) if s.eq_ignore_ascii_case("o") => Ok(CurvePoint::Infinity),
        Value::Array(xy) if xy.len() == 2 => e.point(int(&xy[0], "x")?, int(&xy[1], "y")?),
        _ => Err(Error::Parse(format!("bad point {v}"))),
    }
}

pub fn read(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|err| Error::Parse(format!("{}: {err}", path.display())))?;
    serde_json::from_str(&text).map_err(|err| Error::Parse(format!("{}: {err}", path.display())))
}

pub fn write(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    std::fs::write(path, text).map_err(|err| Error::Parse(format!("{}: {err}", path.display())))
}

fn expect_kind(v: &Value, kind: &str) -> Result<()> {
    match field(v, "kind")?.as_str() {
        Some(k) if k == kind => Ok(()),
        other => Err(Error::Parse(format!("expected an instance of kind \"{kind}\", found {other:?}"))),
    }
}

fn curve_of(v: &Value) -> Result<EllipticCurve> {
    let spec = field(v, "curve")?.as_str().ok_or_else(|| Error::Parse("\"curve\" must be a string".into()))?;
    EllipticCurve::parse_spec(spec)
}

fn seed_of(v: &Value) -> Result<u64> {
    field(v, "seed")?.as_u64().ok_or_else(|| Error::Parse("\"seed\" must be a non-negative integer".into()))
}

/// Curve, `tau`, conic coefficients and seed of a case-V instance.
pub struct CaseVFile {
    pub curve: EllipticCurve,
    pub tau: CurvePoint,
    pub coefficients: [[Fe; 3]; 3],
    pub seed: u64,
}

impl CaseVFile {
    pub fn parse(v: &Value) -> Result<CaseVFile> {
        expect_kind(v, "case-v")?;
        let curve = curve_of(v)?;
        let tau = point_from_json(&curve, field(v, "tau")?)?;
        let rows = field(v, "coefficients")?
            .as_array()
            .filter(|r| r.len() == 3)
            .ok_or_else(|| Error::Parse("\"coefficients\" must be a 3x3 array".into()))?;
        let f = &curve.field;
        let mut coefficients = [[f.zero(); 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == 3).ok_or_else(|| Error::Parse("coefficient rows have 3 entries".into()))?;
            for (k, c) in row.iter().enumerate() {
                coefficients[i][k] = f.from_i64(int(c, "coefficient")?);
            }
        }
        Ok(CaseVFile { curve, tau, coefficients, seed: seed_of(v)? })
    }

    pub fn to_json(&self) -> Value {
        let e = &self.curve;
        let f = &e.field;
        json!({
            "kind": "case-v",
            "curve": e.spec(),
            "tau": e.json_point(&self.tau),
            "coefficients": self.coefficients.iter().map(|r| r.iter().map(|x| f.signed(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "seed": self.seed,
        })
    }
}

/// Curve, generator of the order-3 kernel and seed of a case-I instance.
pub struct CaseOneFile {
    pub curve: EllipticCurve,
    pub generator: CurvePoint,
    pub seed: u64,
}

impl CaseOneFile {
    pub fn parse(v: &Value) -> Result<CaseOneFile> {
        expect_kind(v, "case-i")?;
        let curve = curve_of(v)?;
        let generator = point_from_json(&curve, field(v, "kernel_generator")?)?;
        Ok(CaseOneFile { curve, generator, seed: seed_of(v)? })
    }

    pub fn to_json(&self) -> Value {
        let e = &self.curve;
        json!({
            "kind": "case-i",
            "curve": e.spec(),
            "kernel_generator": e.json_point(&self.generator),
            "seed": self.seed,
        })
    }
}

/// A split `V1 = O(p) + O(2o - p)` with `tau` and the vanishing pattern; the
/// seed redraws the sections.
pub struct SplitFile {
    pub curve: EllipticCurve,
    pub p: CurvePoint,
    pub tau: CurvePoint,
    pub pattern: Pattern,
    pub seed: u64,
}

impl SplitFile {
    pub fn parse(v: &Value) -> Result<SplitFile> {
        expect_kind(v, "split")?;
        let curve = curve_of(v)?;
        let p = point_from_json(&curve, field(v, "p")?)?;
        let tau = point_from_json(&curve, field(v, "tau")?)?;
        let pattern = field(v, "pattern")?
            .as_str()
            .ok_or_else(|| Error::Parse("\"pattern\" must be a string".into()))?
            .parse()?;
        Ok(SplitFile { curve, p, tau, pattern, seed: seed_of(v)? })
    }

    pub fn to_json(&self) -> Value {
        let e = &self.curve;
        json!({
            "kind": "split",
            "curve": e.spec(),
            "p": e.json_point(&self.p),
            "tau": e.json_point(&self.tau),
            "pattern": self.pattern.code(),
            "seed": self.seed,
        })
    }
}
