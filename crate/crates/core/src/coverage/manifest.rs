//! JSON instance manifests.
//!
//! ```json
//! {"dim": 1, "mode": "volume",
//!  "regions": [{"name": "A", "circuit": "a.pc"}, {"name": "B", "circuit": "dim 1\n..."}],
//!  "k": 2}
//! ```
//!
//! A set-cover manifest replaces `k` with `"alpha": "p/q"` and optionally
//! `"beta": "p/q"` (default 0). A `circuit` string containing a newline is
//! inline circuit text; otherwise it is a path relative to the manifest.

use std::path::Path;

use serde::Deserialize;

use super::{CoverParams, CoverageInstance, Mode, Region};
use crate::circuit::parse_circuit;
use crate::error::{Error, Result};
use crate::scalar::{parse_fraction, Field};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    dim: usize,
    mode: RawMode,
    regions: Vec<RawRegion>,
    k: Option<usize>,
    alpha: Option<String>,
    beta: Option<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMode {
    Volume,
    Lattice,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    name: String,
    circuit: String,
}

#[derive(Clone, Debug)]
pub enum Objective<F> {
    Budget(usize),
    Cover(CoverParams<F>),
}

#[derive(Clone, Debug)]
pub struct Manifest<F> {
    pub instance: CoverageInstance,
    pub objective: Objective<F>,
}

pub fn load_manifest<F: Field>(path: &Path) -> Result<Manifest<F>> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_manifest<F: Field>(json: &str, base_dir: &Path) -> Result<Manifest<F>> {
    let raw: RawManifest = serde_json::from_str(json).map_err(|e| Error::Manifest(e.to_string()))?;
    let mode = match raw.mode {
        RawMode::Volume => Mode::Volume,
        RawMode::Lattice => Mode::Lattice,
    };
    let mut regions = Vec::with_capacity(raw.regions.len());
    for r in raw.regions {
        let text = if r.circuit.contains('\n') {
            r.circuit
        } else {
            let path = base_dir.join(&r.circuit);
            std::fs::read_to_string(&path)
                .map_err(|e| Error::Manifest(format!("region `{}`: {}: {e}", r.name, path.display())))?
        };
        let circuit = parse_circuit(&text).map_err(Error::Parse)?.circuit;
        regions.push(Region { name: r.name, circuit });
    }
    let instance = CoverageInstance::new(raw.dim, regions, mode)?;
    let objective = match (raw.k, raw.alpha, raw.beta) {
        (Some(k), None, None) => Objective::Budget(k),
        (None, Some(alpha), beta) => {
            let beta = beta.as_deref().unwrap_or("0");
            Objective::Cover(CoverParams::new(parse_fraction(&alpha)?, parse_fraction(beta)?)?)
        }
        _ => return Err(Error::Manifest("expected either `k` or `alpha` (with optional `beta`)".into())),
    };
    Ok(Manifest { instance, objective })
}
