//! Power ledger over logged channels, and a Reynolds transport verifier.
//!
//! Stored energies are logged at the step times. The ledger differentiates
//! them on the half steps, `(H[n+1] - H[n]) / dt`, a centered difference at
//! `t[n] + dt/2`, and averages the instantaneous channels of the two rows to
//! the same time. Every residual is therefore a pure function of the logged
//! series.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::forms::{
    dot_wedge, integrate, interior_product_top, partial_trace, partial_trace_vector, scalar_to_covector, star_vertex, trace, Form,
    Kind, TensorForm,
};
use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

/// One logged row of instantaneous channels. Absent channels are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub h_f: Option<f64>,
    pub h_b: Option<f64>,
    pub dissipation: Option<f64>,
    /// Power into the fluid through the external walls.
    pub p_dv: Option<f64>,
    /// Power into the fluid through the body boundary.
    pub p_db: Option<f64>,
    /// Power delivered to the body, `<W^b | T^b>`.
    pub p_body: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// `dH_f + D - P_dV - P_dB`
    Fluid,
    /// `dH_b - P_body`
    Rigid,
    /// `dH_f + dH_b + D - P_dV`
    Coupled,
    /// `dH_f - P_dV - P_dB`, must not be positive.
    Supply,
}

impl Balance {
    pub const ALL: [Balance; 4] = [Balance::Fluid, Balance::Rigid, Balance::Coupled, Balance::Supply];

    pub fn id(self) -> &'static str {
        match self {
            Balance::Fluid => "fluid",
            Balance::Rigid => "rigid",
            Balance::Coupled => "coupled",
            Balance::Supply => "supply",
        }
    }
}

/// Channels on one half step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub t: f64,
    pub hf_dot: Option<f64>,
    pub hb_dot: Option<f64>,
    pub dissipation: Option<f64>,
    pub p_dv: Option<f64>,
    pub p_db: Option<f64>,
    pub p_body: Option<f64>,
}

impl LedgerRow {
    /// Residual and its scale, or `None` when a channel is absent.
    pub fn residual(&self, b: Balance) -> Option<(f64, f64)> {
        let z = |x: Option<f64>| x.unwrap_or(0.0);
        match b {
            Balance::Fluid => {
                let (h, d, pv) = (self.hf_dot?, self.dissipation?, self.p_dv?);
                let pb = z(self.p_db);
                Some((h + d - pv - pb, scale(&[h, d, pv, pb])))
            }
            Balance::Rigid => {
                let (h, p) = (self.hb_dot?, self.p_body?);
                Some((h - p, scale(&[h, p])))
            }
            Balance::Coupled => {
                let (hf, hb, d) = (self.hf_dot?, self.hb_dot?, self.dissipation?);
                let pv = z(self.p_dv);
                Some((hf + hb + d - pv, scale(&[hf, hb, d])))
            }
            Balance::Supply => {
                let (h, pv) = (self.hf_dot?, self.p_dv?);
                let pb = z(self.p_db);
                Some((h - pv - pb, scale(&[h, pv, pb])))
            }
        }
    }

    /// `|residual| / scale`; for the supply inequality only positive excess
    /// counts.
    pub fn relative(&self, b: Balance) -> Option<f64> {
        let (r, s) = self.residual(b)?;
        let r = if b == Balance::Supply { r.max(0.0) } else { r.abs() };
        Some(r / s)
    }
}

fn scale(x: &[f64]) -> f64 {
    x.iter().fold(1e-12f64, |m, v| m.max(v.abs()))
}

fn channel(a: Option<f64>, b: Option<f64>, name: &str) -> Result<Option<(f64, f64)>> {
    match (a, b) {
        (Some(x), Some(y)) => Ok(Some((x, y))),
        (None, None) => Ok(None),
        _ => Err(Error::MissingChannel(name.into())),
    }
}

/// Half step ledger of a logged series.
pub fn power_ledger(samples: &[Sample]) -> Result<Vec<LedgerRow>> {
    samples
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let dt = b.t - a.t;
            if !(dt > 0.0) {
                return Err(Error::Snapshot(format!("times {} and {} are not increasing", a.t, b.t)));
            }
            let rate = |x, y, n| Ok::<_, Error>(channel(x, y, n)?.map(|(p, q)| (q - p) / dt));
            let mean = |x, y, n| Ok::<_, Error>(channel(x, y, n)?.map(|(p, q)| 0.5 * (p + q)));
            Ok(LedgerRow {
                t: 0.5 * (a.t + b.t),
                hf_dot: rate(a.h_f, b.h_f, "H_f")?,
                hb_dot: rate(a.h_b, b.h_b, "H_b")?,
                dissipation: mean(a.dissipation, b.dissipation, "D")?,
                p_dv: mean(a.p_dv, b.p_dv, "P_dV")?,
                p_db: mean(a.p_db, b.p_db, "P_dB")?,
                p_body: mean(a.p_body, b.p_body, "P_body")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Largest relative residual per balance id.
    pub max_residual: BTreeMap<String, f64>,
    /// Smallest dissipation over all rows.
    pub min_dissipation: Option<f64>,
    pub rows: usize,
}

pub fn summarize(rows: &[LedgerRow]) -> Summary {
    let mut s = Summary { rows: rows.len(), ..Default::default() };
    for b in Balance::ALL {
        let m = rows.iter().filter_map(|r| r.relative(b)).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        if let Some(m) = m {
            s.max_residual.insert(b.id().into(), m);
        }
    }
    s.min_dissipation = rows.iter().filter_map(|r| r.dissipation).reduce(f64::min);
    s
}

const LEDGER_HEADER: [&str; 11] =
    ["t", "dH_f", "dH_b", "D", "P_dV", "P_dB", "P_body", "res_fluid", "res_rigid", "res_coupled", "res_supply"];

fn cell(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.12e}"))
}

pub fn write_ledger<W: std::io::Write>(w: W, rows: &[LedgerRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(LEDGER_HEADER)?;
    for r in rows {
        let mut rec = vec![format!("{:.12e}", r.t)];
        rec.extend([r.hf_dot, r.hb_dot, r.dissipation, r.p_dv, r.p_db, r.p_body].map(cell));
        rec.extend(Balance::ALL.map(|b| cell(r.residual(b).map(|x| x.0))));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `ledger.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, rows: &[LedgerRow]) -> Result<Summary> {
    std::fs::create_dir_all(dir)?;
    write_ledger(std::fs::File::create(dir.join("ledger.csv"))?, rows)?;
    let s = summarize(rows);
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&s)?)?;
    Ok(s)
}

/// Reads a logged series back. Columns are matched by name: `t`, `H_f`,
/// `H_b`, `D` (or `dissipation`), `P_dV` (or `flux_dV`), `P_dB` (or
/// `flux_dB`), `P_body`.
pub fn read_samples<R: std::io::Read>(r: R) -> Result<Vec<Sample>> {
    let mut rd = csv::Reader::from_reader(r);
    let head = rd.headers()?.clone();
    let col = |names: &[&str]| head.iter().position(|h| names.contains(&h.trim()));
    let t = col(&["t"]).ok_or_else(|| Error::MissingChannel("t".into()))?;
    let cols = [col(&["H_f"]), col(&["H_b"]), col(&["D", "dissipation"]), col(&["P_dV", "flux_dV"]), col(&["P_dB", "flux_dB"]), col(&["P_body"])];
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<Option<f64>> {
            let s = rec.get(i).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| Error::config(format!("row {}, column {i}", out_len(&rec)), format!("not a number: {s}")))
        };
        let v = cols.map(|c| c.map_or(Ok(None), num));
        let [h_f, h_b, dissipation, p_dv, p_db, p_body] = v;
        out.push(Sample {
            t: num(t)?.ok_or_else(|| Error::MissingChannel("t".into()))?,
            h_f: h_f?,
            h_b: h_b?,
            dissipation: dissipation?,
            p_dv: p_dv?,
            p_db: p_db?,
            p_body: p_body?,
        });
    }
    Ok(out)
}

fn out_len(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

// Degree 5 rule on the reference triangle: barycentric points and weights.
const Q7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_770;
    const B1: f64 = 0.470_142_064_105_115;
    const A2: f64 = 0.797_426_985_353_087;
    const B2: f64 = 0.101_286_507_323_456;
    const W1: f64 = 0.132_394_152_788_506;
    const W2: f64 = 0.125_939_180_544_827;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// Primal 2-form holding the integral of `rho` over each triangle.
pub fn density_form(c: &SimplicialComplex, rho: impl Fn(Vec2) -> f64) -> Form {
    let values = (0..c.n_triangles())
        .map(|t| {
            let [a, b, d] = c.triangles()[t];
            let (pa, pb, pd) = (c.vertex(a), c.vertex(b), c.vertex(d));
            let s: f64 = Q7.iter().map(|(l, w)| w * rho(pa * l[0] + pb * l[1] + pd * l[2])).sum();
            s * c.triangle_area(t)
        })
        .collect();
    Form { degree: 2, kind: Kind::Primal, values }
}

/// Density snapshot on one mesh configuration.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub mesh: SimplicialComplex,
    pub density: Form,
    /// Eulerian rate of the density, integrated per triangle; `None` for a
    /// steady field.
    pub rate: Option<Form>,
    /// Mesh velocity per vertex.
    pub u: Vec<Vec2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReynoldsRow {
    pub t: f64,
    pub mass_rate: f64,
    pub bulk: f64,
    /// Boundary term from the trace of the interior product.
    pub boundary: f64,
    /// Boundary term from the dot wedge of the boundary effort with the
    /// mesh velocity.
    pub boundary_alt: f64,
    pub residual: f64,
}

/// Outflow of the density through the moving boundary, computed both as
/// `sum tr(i_u H)` and as `sum (rho N) . u`, in the fluid outward sense.
pub fn boundary_transport(c: &SimplicialComplex, u: &[Vec2], h: &Form) -> Result<(f64, f64)> {
    let iu = interior_product_top(c, u, h)?;
    let rho = star_vertex(c, h)?.values;
    let eff = scalar_to_covector(c, &rho);
    let vel = TensorForm::vector_field(u);
    let (mut one, mut two) = (0.0, 0.0);
    for comp in c.components() {
        let s = comp.convention.sign();
        one += s * trace(c, &iu, &comp.name)?.values.iter().sum::<f64>();
        let e = partial_trace(c, &eff, &comp.name)?;
        let v = partial_trace_vector(c, &vel, &comp.name)?;
        two += s * dot_wedge(c, &e, &v)?.values.iter().sum::<f64>();
    }
    Ok((one, two))
}

/// Forward difference residual of the transport theorem on consecutive
/// snapshots: `(M[n+1] - M[n]) / dt - int rate[n] - boundary[n]`.
pub fn reynolds_check(snaps: &[Snapshot]) -> Result<Vec<ReynoldsRow>> {
    let first = snaps.first().ok_or_else(|| Error::Snapshot("no snapshots".into()))?;
    for s in snaps {
        if s.mesh.triangles() != first.mesh.triangles() || s.mesh.n_vertices() != first.mesh.n_vertices() {
            return Err(Error::Snapshot(format!("connectivity at t={} differs", s.t)));
        }
        if s.density.degree != 2 || s.density.len() != s.mesh.n_triangles() || s.u.len() != s.mesh.n_vertices() {
            return Err(Error::Snapshot(format!("fields at t={} do not fit the mesh", s.t)));
        }
    }
    snaps
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let dt = b.t - a.t;
            if !(dt > 0.0) {
                return Err(Error::Snapshot(format!("times {} and {} are not increasing", a.t, b.t)));
            }
            let mass_rate = (integrate(&b.mesh, &b.density)? - integrate(&a.mesh, &a.density)?) / dt;
            let bulk = match &a.rate {
                Some(r) => integrate(&a.mesh, r)?,
                None => 0.0,
            };
            let (boundary, boundary_alt) = boundary_transport(&a.mesh, &a.u, &a.density)?;
            Ok(ReynoldsRow { t: a.t, mass_rate, bulk, boundary, boundary_alt, residual: mass_rate - bulk - boundary })
        })
        .collect()
}

/// Unit square mesh translating with velocity `a` through a steady
/// density; one snapshot pair per step size.
pub fn translation_study(res: usize, a: Vec2, dts: &[f64], rho: impl Fn(Vec2) -> f64 + Copy) -> Result<Vec<ReynoldsRow>> {
    let base = crate::mesh::unit_square(res)?;
    let u = vec![a; base.n_vertices()];
    let snap = |t: f64| -> Result<Snapshot> {
        let mesh = base.with_vertices(base.vertices().iter().map(|x| x + a * t).collect())?;
        Ok(Snapshot { t, density: density_form(&mesh, rho), mesh, rate: None, u: u.clone() })
    };
    let s0 = snap(0.0)?;
    dts.iter().map(|&dt| Ok(reynolds_check(&[s0.clone(), snap(dt)?])?[0])).collect()
}
