//! Named test curves.
//!
//! Every shipped curve has `p = 1 mod 4`, all three 2-torsion points
//! rational, a rational point of order 4 and a rational point of order 3.

use serde::Deserialize;

use super::curve::EllipticCurve;
use crate::error::{Error, Result};

pub const REGISTRY_ENV: &str = "G2STRATA_REGISTRY";

pub const BUILTIN: &[(&str, &str)] = &[
    ("b37", "37:0:1"),
    ("b61", "61:2:12"),
    ("b73", "73:1:10"),
    ("b97", "97:1:10"),
    ("b193", "193:1:3"),
];

/// Supports every construction, including the isogeny-invariant conic.
pub const DEFAULT_CURVE: &str = "b61";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedCurve {
    pub name: String,
    pub curve: EllipticCurve,
}

#[derive(Deserialize)]
struct RegistryFile {
    curves: Vec<RegistryEntry>,
}

#[derive(Deserialize)]
struct RegistryEntry {
    name: String,
    spec: String,
}

pub fn builtin() -> Vec<NamedCurve> {
    BUILTIN
        .iter()
        .map(|(n, s)| NamedCurve {
            name: n.to_string(),
            curve: EllipticCurve::parse_spec(s).expect("builtin registry spec is valid"),
        })
        .collect()
}

/// Registry from a JSON file `{"curves": [{"name": .., "spec": "p:a:b"}]}`.
pub fn load_file(path: &str) -> Result<Vec<NamedCurve>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("registry {path}: {e}")))?;
    let file: RegistryFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("registry {path}: {e}")))?;
    file.curves
        .into_iter()
        .map(|e| Ok(NamedCurve { curve: EllipticCurve::parse_spec(&e.spec)?, name: e.name }))
        .collect()
}

/// The override file named by the environment, else the builtin list.
pub fn active() -> Result<Vec<NamedCurve>> {
    match std::env::var(REGISTRY_ENV) {
        Ok(path) if !path.is_empty() => load_file(&path),
        _ => Ok(builtin()),
    }
}

/// Resolves a registry name or a literal "p:a:b" spec.
pub fn resolve(name_or_spec: &str) -> Result<NamedCurve> {
    if name_or_spec.contains(':') {
        return Ok(NamedCurve { name: name_or_spec.to_string(), curve: EllipticCurve::parse_spec(name_or_spec)? });
    }
    active()?
        .into_iter()
        .find(|c| c.name == name_or_spec)
        .ok_or_else(|| Error::Parse(format!("unknown curve '{name_or_spec}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_curves_have_the_advertised_torsion() {
        for nc in builtin() {
            let e = &nc.curve;
            let p = e.field.characteristic();
            assert_eq!(p % 4, 1, "{}", nc.name);
            assert!(e.n_torsion(2).complete, "{}", nc.name);
            let pts = e.points();
            assert!(pts.iter().any(|q| e.order_of(q) == 4), "{}", nc.name);
            assert!(pts.iter().any(|q| e.order_of(q) == 3), "{}", nc.name);
        }
    }
}
