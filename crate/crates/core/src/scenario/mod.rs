//! Built-in scenarios and their pass/fail checks.

mod config;
mod identities;
mod runs;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{BodyConfig, MeshConfig, ScenarioConfig};
pub use identities::identity_checks;

use crate::audit::{self, LedgerRow, Sample};
use crate::coupling::Prescribed;
use crate::fluid::{FluidParams, Wall};
use crate::{Error, Result};

pub const SCENARIOS: [(&str, &str); 8] = [
    ("identities", "randomized checks of the discrete calculus, transformer and wrench identities"),
    ("taylor-green", "decaying Taylor-Green vortex on a periodic square"),
    ("lid-cavity", "lid-driven cavity started from rest"),
    ("free-body", "torque-free rigid body, energy and Casimir drift"),
    ("falling-body-vacuum", "rigid body under gravity without fluid"),
    ("prescribed-cylinder", "cylinder on a prescribed path in a viscous annulus"),
    ("fsi-cylinder-2d", "freely moving cylinder coupled to the surrounding fluid"),
    ("reynolds-translate", "transport of a steady density through a translating mesh"),
];

pub fn describe(name: &str) -> Result<&'static str> {
    SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| *d)
        .ok_or_else(|| Error::config("scenario", format!("unknown scenario '{name}'; see `portflow list`")))
}

/// One pass/fail check of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    /// Passes when `value >= -tolerance`.
    pub fn at_least_zero(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value >= -tolerance }
    }

    /// Passes when `|value - target| <= tolerance`.
    pub fn near(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: (value - target).abs() <= tolerance }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {:.3e} (tol {:.1e})", if self.pass { "PASS" } else { "FAIL" }, self.name, self.value, self.tolerance)
    }
}

/// Logged time series: header and formatted rows.
#[derive(Debug, Clone, Default)]
pub struct Series {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    fn new(header: &[&str]) -> Self {
        Series { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: std::io::Write>(&self, w: W, every: usize) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        let last = self.rows.len().saturating_sub(1);
        for (i, r) in self.rows.iter().enumerate() {
            if i % every == 0 || i == last {
                out.write_record(r.iter().map(|x| format!("{x:.12e}")))?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub series: Option<Series>,
    pub ledger: Vec<LedgerRow>,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    scenario: &'a str,
    seed: u64,
    pass: bool,
    max_residual: BTreeMap<String, f64>,
    min_dissipation: Option<f64>,
    checks: &'a [Check],
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Writes `series.csv`, `ledger.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path, cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        if let Some(s) = &self.series {
            let p = dir.join("series.csv");
            s.write(std::fs::File::create(&p)?, cfg.output_every)?;
            files.push(p);
        }
        if !self.ledger.is_empty() {
            let p = dir.join("ledger.csv");
            audit::write_ledger(std::fs::File::create(&p)?, &self.ledger)?;
            files.push(p);
        }
        let sum = audit::summarize(&self.ledger);
        let file = SummaryFile {
            scenario: &self.scenario,
            seed: cfg.seed,
            pass: self.passed(),
            max_residual: sum.max_residual,
            min_dissipation: sum.min_dissipation,
            checks: &self.checks,
        };
        let p = dir.join("summary.json");
        std::fs::write(&p, serde_json::to_string_pretty(&file)? + "\n")?;
        files.push(p);
        Ok(files)
    }
}

fn ledger_of(samples: &[Sample]) -> Result<Vec<LedgerRow>> {
    audit::power_ledger(samples)
}

fn body(mass: f64, inertia: [f64; 3], momentum: [f64; 6], component: Option<&str>) -> BodyConfig {
    BodyConfig { mass, inertia, momentum, position: [0.0; 3], gravity: [0.0; 3], component: component.map(Into::into) }
}

fn walls(list: &[(&str, Wall)]) -> BTreeMap<String, Wall> {
    list.iter().map(|(k, w)| (k.to_string(), *w)).collect()
}

/// Default configuration of a built-in scenario.
pub fn defaults(name: &str) -> Result<ScenarioConfig> {
    describe(name)?;
    let fluid = FluidParams { kappa: 0.01, lambda: 0.0, rho: 1.0 };
    let base = ScenarioConfig {
        scenario: name.into(),
        mesh: MeshConfig::UnitSquare { res: 8 },
        fluid,
        body: body(1.0, [1.0, 2.0, 3.0], [0.0; 6], None),
        motion: None,
        dt: 1e-3,
        t_end: 1.0,
        bc: BTreeMap::new(),
        out: None,
        seed: 42,
        subiterations: 1,
        output_every: 1,
    };
    let cylinder = |kappa: f64| ScenarioConfig {
        mesh: MeshConfig::Annulus { r_in: 0.5, r_out: 2.0, res: 24 },
        fluid: FluidParams { kappa, lambda: 0.0, rho: 1.0 },
        body: body(8.0, [1.0, 1.0, 2.0], [0.0, 0.0, 2.0, 2.4, 0.0, 0.0], Some("inner")),
        bc: walls(&[("inner", Wall::Moving), ("outer", Wall::NoSlip)]),
        dt: 0.002,
        t_end: 0.1,
        subiterations: 3,
        ..base.clone()
    };
    Ok(match name {
        "identities" => base,
        "taylor-green" => ScenarioConfig {
            mesh: MeshConfig::PeriodicSquare { res: 64, length: 2.0 * std::f64::consts::PI },
            dt: 0.02,
            t_end: 1.0,
            ..base
        },
        "lid-cavity" => ScenarioConfig {
            mesh: MeshConfig::UnitSquare { res: 16 },
            bc: walls(&[("top", Wall::Velocity([1.0, 0.0])), ("bottom", Wall::NoSlip), ("left", Wall::NoSlip), ("right", Wall::NoSlip)]),
            dt: 0.0025,
            t_end: 0.5,
            ..base
        },
        "free-body" => ScenarioConfig {
            body: body(1.0, [1.0, 2.0, 3.0], [0.3, 1.0, -0.5, 0.2, -0.1, 0.4], None),
            dt: 1e-3,
            t_end: 10.0,
            output_every: 10,
            ..base
        },
        "falling-body-vacuum" => ScenarioConfig {
            body: BodyConfig {
                gravity: [0.0, 0.0, 9.81],
                position: [0.0, 0.0, 10.0],
                ..body(2.0, [1.0, 1.5, 2.0], [0.0, 0.0, 0.8, 1.0, 0.5, 0.0], None)
            },
            dt: 1e-3,
            t_end: 1.0,
            output_every: 10,
            ..base
        },
        "prescribed-cylinder" => ScenarioConfig {
            motion: Some(Prescribed { amplitude: [0.1, 0.0], frequency: 2.0 * std::f64::consts::PI, spin: 1.0, drift: [0.0; 2] }),
            ..cylinder(0.05)
        },
        "fsi-cylinder-2d" => cylinder(0.05),
        _ => ScenarioConfig { mesh: MeshConfig::UnitSquare { res: 384 }, dt: 0.4, t_end: 0.4, ..base },
    })
}

/// Runs a validated configuration.
pub fn run(cfg: &ScenarioConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut out = match cfg.scenario.as_str() {
        "identities" => Outcome { checks: identity_checks(cfg.seed)?, ..Default::default() },
        "taylor-green" => runs::taylor_green(cfg)?,
        "lid-cavity" => runs::lid_cavity(cfg)?,
        "free-body" => runs::free_body(cfg)?,
        "falling-body-vacuum" => runs::falling_body(cfg)?,
        "prescribed-cylinder" | "fsi-cylinder-2d" => runs::cylinder(cfg)?,
        "reynolds-translate" => runs::reynolds(cfg)?,
        other => return Err(Error::config("scenario", format!("unknown scenario '{other}'"))),
    };
    out.scenario = cfg.scenario.clone();
    Ok(out)
}
