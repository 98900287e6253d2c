//! Reading specs, point files and grid strings.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use mixed_milnor::family::{build_family, DeformationFamily, FamilySpec};
use mixed_milnor::poly::MixedPolynomial;
use mixed_milnor::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Raw bytes of an input file together with their digest.
pub struct Loaded {
    pub bytes: Vec<u8>,
    pub digest: String,
}

pub fn read_input(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Input)?;
    let digest = crate::report::sha256_hex(&bytes);
    Ok(Loaded { bytes, digest })
}

/// A spec file holds either a named family or an explicit polynomial.
pub enum Spec {
    Family(FamilySpec),
    Polynomial(MixedPolynomial),
}

pub fn parse_spec(bytes: &[u8]) -> Result<Spec, CliError> {
    let value: Value = serde_json::from_slice(bytes)
        .context("spec is not valid JSON")
        .map_err(CliError::Input)?;
    let spec = if value.get("family").is_some() {
        Spec::Family(serde_json::from_value(value).context("bad family spec").map_err(CliError::Input)?)
    } else {
        Spec::Polynomial(serde_json::from_value(value).context("bad polynomial spec").map_err(CliError::Input)?)
    };
    Ok(spec)
}

pub fn load_family(path: &Path) -> Result<(DeformationFamily, Loaded), CliError> {
    let loaded = read_input(path)?;
    match parse_spec(&loaded.bytes)? {
        Spec::Family(spec) => Ok((build_family(&spec).map_err(CliError::from)?, loaded)),
        Spec::Polynomial(_) => Err(CliError::Input(anyhow!(
            "{} holds a polynomial; this command needs a family spec",
            path.display()
        ))),
    }
}

/// Accepts `[[re, im], ...]` lists either bare or under a `points` key.
pub fn parse_points(bytes: &[u8]) -> Result<Vec<Vec<Complex64>>, CliError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum PointFile {
        Bare(Vec<Vec<Complex64>>),
        Keyed { points: Vec<Vec<Complex64>> },
    }
    let parsed: PointFile = serde_json::from_slice(bytes)
        .context("points file must hold a list of points, each a list of [re, im] pairs")
        .map_err(CliError::Input)?;
    Ok(match parsed {
        PointFile::Bare(p) | PointFile::Keyed { points: p } => p,
    })
}

/// `start:end:step`, a comma list, or a single value.
pub fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let num = |s: &str| -> anyhow::Result<f64> {
        s.trim().parse::<f64>().with_context(|| format!("'{s}' is not a number"))
    };
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("range grids look like start:end:step");
        }
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || hi < lo {
            bail!("range grids need step > 0 and end >= start");
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        let mut g: Vec<f64> = (0..=count).map(|k| lo + k as f64 * step).collect();
        if let Some(last) = g.last_mut() {
            if (*last - hi).abs() <= 1e-9 * step {
                *last = hi;
            }
        }
        g
    } else {
        text.split(',').map(num).collect::<anyhow::Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        bail!("t values must lie in [0, 1]");
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 1.0);
        assert_eq!(parse_grid("0.25, 0.5").unwrap(), vec![0.25, 0.5]);
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert!(parse_grid("0:2:1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn points_bare_and_keyed() {
        let a = parse_points(b"[[[1,0],[0,1]]]").unwrap();
        let b = parse_points(br#"{"points": [[[1,0],[0,1]]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0][1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn specs_dispatch_on_family_key() {
        assert!(matches!(
            parse_spec(br#"{"family": "brieskorn", "a": [2, 3], "b": [1, 0]}"#).unwrap(),
            Spec::Family(_)
        ));
        assert!(matches!(
            parse_spec(br#"{"n": 1, "monomials": [{"c": [1, 0], "nu": [2], "mu": [0]}]}"#).unwrap(),
            Spec::Polynomial(_)
        ));
        assert!(parse_spec(b"{").is_err());
    }
}
