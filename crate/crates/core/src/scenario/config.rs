//! JSON scenario configuration.
//!
//! A config names a built-in scenario and overrides any of its defaults.
//! Objects are merged key by key (`fluid`, `body`, `bc`); every other key
//! replaces the default wholesale. Errors carry the key path.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coupling::Prescribed;
use crate::fluid::{BoundaryConditions, FluidParams, Wall};
use crate::mesh::{annulus, load_mesh_json, periodic_square, unit_square, Convention, SimplicialComplex};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeshConfig {
    UnitSquare {
        res: usize,
    },
    PeriodicSquare {
        res: usize,
        length: f64,
    },
    Annulus {
        r_in: f64,
        r_out: f64,
        res: usize,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub mass: f64,
    /// Principal moments of inertia.
    pub inertia: [f64; 3],
    /// Body frame momentum `(p_omega, p_v)`.
    #[serde(default)]
    pub momentum: [f64; 6],
    #[serde(default)]
    pub position: [f64; 3],
    #[serde(default)]
    pub gravity: [f64; 3],
    /// Boundary component of the mesh occupied by the body.
    #[serde(default)]
    pub component: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub mesh: MeshConfig,
    pub fluid: FluidParams,
    pub body: BodyConfig,
    #[serde(default)]
    pub motion: Option<Prescribed>,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub bc: BTreeMap<String, Wall>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub subiterations: usize,
    /// Write every n-th row of the time series.
    #[serde(default = "one")]
    pub output_every: usize,
}

fn one() -> usize {
    1
}

const MERGED: [&str; 3] = ["fluid", "body", "bc"];

fn merge(base: &mut Value, over: Value) {
    let (Value::Object(b), Value::Object(o)) = (base, over) else { return };
    for (k, v) in o {
        match (b.get_mut(&k), v) {
            (Some(slot @ Value::Object(_)), v @ Value::Object(_)) if MERGED.contains(&k.as_str()) => {
                let (Value::Object(s), Value::Object(vo)) = (slot, v) else { unreachable!() };
                s.extend(vo);
            }
            (_, v) => {
                b.insert(k, v);
            }
        }
    }
}

fn path_error<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> Error {
    let path = e.path().to_string();
    Error::config(if path.is_empty() || path == "." || path == "?" { "<root>".into() } else { path }, e.inner().to_string())
}

impl ScenarioConfig {
    /// Parses a config, filling unspecified keys from the scenario defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let user: Value = serde_path_to_error::deserialize(de).map_err(path_error)?;
        let name = match user.get("scenario") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::config("scenario", "expected a string")),
            None => return Err(Error::config("scenario", "missing scenario name")),
        };
        let mut full = serde_json::to_value(super::defaults(&name)?)?;
        merge(&mut full, user);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(full).map_err(path_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        super::describe(&self.scenario)?;
        let positive = |x: f64, path: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive and finite, got {x}")))
            }
        };
        positive(self.dt, "dt")?;
        positive(self.t_end, "t_end")?;
        positive(self.fluid.rho, "fluid.rho")?;
        if !(self.fluid.kappa >= 0.0 && self.fluid.kappa.is_finite()) {
            return Err(Error::config("fluid.kappa", "must be non-negative"));
        }
        positive(self.body.mass, "body.mass")?;
        for (i, j) in self.body.inertia.iter().enumerate() {
            positive(*j, &format!("body.inertia[{i}]"))?;
        }
        if self.subiterations == 0 {
            return Err(Error::config("subiterations", "must be at least 1"));
        }
        if self.output_every == 0 {
            return Err(Error::config("output_every", "must be at least 1"));
        }
        match &self.mesh {
            MeshConfig::UnitSquare { res } | MeshConfig::Annulus { res, .. } | MeshConfig::PeriodicSquare { res, .. } if *res == 0 => {
                return Err(Error::config("mesh.res", "must be positive"))
            }
            MeshConfig::PeriodicSquare { length, .. } => positive(*length, "mesh.length")?,
            MeshConfig::Annulus { r_in, r_out, .. } => {
                positive(*r_in, "mesh.r_in")?;
                if !(r_out > r_in) {
                    return Err(Error::config("mesh.r_out", "must exceed r_in"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Builds the mesh, applies the body convention and checks the boundary
    /// table against the components.
    pub fn build_mesh(&self) -> Result<SimplicialComplex> {
        let mut c = match &self.mesh {
            MeshConfig::UnitSquare { res } => unit_square(*res),
            MeshConfig::PeriodicSquare { res, length } => periodic_square(*res, *length),
            MeshConfig::Annulus { r_in, r_out, res } => annulus(*r_in, *r_out, *res),
            MeshConfig::File { path } => load_mesh_json(path),
        }
        .map_err(|e| Error::config("mesh", e.to_string()))?;
        if let Some(name) = &self.body.component {
            c.set_convention(name, Convention::BodyOutward).map_err(|e| Error::config("body.component", e.to_string()))?;
        }
        for k in self.bc.keys() {
            c.component(k).map_err(|_| Error::config(format!("bc.{k}"), "no boundary component with this tag"))?;
        }
        self.boundary_conditions().check(&c)?;
        Ok(c)
    }

    pub fn boundary_conditions(&self) -> BoundaryConditions {
        BoundaryConditions { walls: self.bc.clone() }
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}
