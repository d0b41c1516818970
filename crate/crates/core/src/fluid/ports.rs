use super::dynamics::{strain_correction, wall_det, Rates};
use super::{hamiltonian_with, Fluid, FluidState, Geometry, WallData};
use crate::forms::{BoundaryField, Valence};
use crate::mesh::{Convention, SimplicialComplex};
use crate::ports::{Carrier, Pairing, PowerPort};
use crate::{Result, Vec2};

pub const FLUID_HEADER: &str = "t,H_f,dissipation,flux_dV,flux_dB,div_inf";

/// Instantaneous energy budget of the fluid.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub t: f64,
    pub h: f64,
    pub dissipation: f64,
    /// Power of the wall tractions on the fluid.
    pub flux_dv: f64,
    /// Kinetic energy carried across the boundary relative to the mesh.
    pub flux_db: f64,
    /// Exact rate of change of the discrete energy.
    pub h_dot: f64,
    pub div_inf: f64,
    /// Pressure per vertex.
    pub p: Vec<f64>,
    /// Per-vertex dynamic pressure with wall values.
    pub k: Vec<f64>,
    /// Force exerted by the walls on the fluid, per boundary edge (zero on
    /// interior edges).
    pub traction: Vec<Vec2>,
    /// Power into the fluid per boundary edge; sums to `flux_dv + flux_db`.
    pub edge_power: Vec<f64>,
    pub rates: Rates,
}

impl Diagnostics {
    pub fn row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}",
            self.t, self.h, self.dissipation, self.flux_dv, self.flux_db, self.div_inf
        )
    }

    /// Energy balance defect `h_dot + D - P_V - P_B`.
    pub fn residual(&self) -> f64 {
        self.h_dot + self.dissipation - self.flux_dv - self.flux_db
    }

    /// Power into the fluid through one boundary component.
    pub fn component_power(&self, c: &SimplicialComplex, name: &str) -> Result<f64> {
        Ok(c.component(name)?.edges.iter().map(|&e| self.edge_power[e]).sum())
    }
}

fn rot(t: Vec2) -> Vec2 {
    Vec2::new(t.y, -t.x)
}

impl Fluid {
    /// Energy budget of `s` on geometry `geo` with walls `wall`.
    pub fn diagnose(&self, geo: &Geometry, s: &FluidState, wall: &WallData) -> Result<Diagnostics> {
        let c = &geo.mesh;
        let rho = self.params.rho;
        let v = &s.v.values;
        let rates = self.rates(geo, v, wall)?;
        let p = self.consistent_pressure(geo, v, &rates, wall)?;
        let lam = self.wall_reaction(geo, &rates, &p, wall);
        let g = Self::wall_rate(geo, wall);
        let acc = rates.accel(geo, rho);
        let mut traction = vec![Vec2::zeros(); c.n_edges()];
        let mut edge_power = vec![0.0; c.n_edges()];
        let (mut flux_dv, mut flux_db) = (0.0, 0.0);
        for &e in c.boundary_edges() {
            let [a, b] = c.edges()[e];
            let t_e = c.edge_vector(e);
            let n = rot(t_e) * c.boundary_sign(e);
            let vb = wall.mean_vel(e);
            let pbar = 0.5 * (p[a] + p[b]);
            let f = -pbar * n + t_e * lam[e] - strain_correction(c, wall, self.params.kappa, e);
            traction[e] = f;
            let kb = 0.5 * (rates.k[a] + rates.k[b]);
            let uvb = 0.5 * (geo.u[a].dot(&rates.vel[a]) + geo.u[b].dot(&rates.vel[b]));
            let (pv, pb) = (f.dot(&vb), -rho * (kb - uvb) * vb.dot(&n));
            flux_dv += pv;
            flux_db += pb;
            edge_power[e] = pv + pb;
        }
        let mut h_dot = 0.0;
        for e in 0..c.n_edges() {
            let vdot = if c.is_boundary_edge(e) { g[e] } else { acc[e] - (p[c.edges()[e][1]] - p[c.edges()[e][0]]) / rho };
            h_dot += rho * geo.ops.star1[e] * v[e] * vdot;
        }
        if geo.is_moving() {
            h_dot += 0.5 * rho * star_rate(geo)?.iter().zip(v).map(|(sd, x)| sd * x * x).sum::<f64>();
        }
        let dissipation = rates.kv.iter().zip(v).map(|(k, x)| k * x).sum::<f64>() - 4.0 * self.params.kappa * wall_det(c, wall);
        let div = Self::divergence(geo, v, wall);
        Ok(Diagnostics {
            t: s.t,
            h: hamiltonian_with(&geo.ops, rho, v),
            dissipation,
            flux_dv,
            flux_db,
            h_dot,
            div_inf: div.iter().fold(0.0, |m, x| m.max(x.abs())),
            p,
            k: rates.k.clone(),
            traction,
            edge_power,
            rates,
        })
    }
}

/// Time derivative of the edge Hodge star along the mesh velocity.
pub(crate) fn star_rate(geo: &Geometry) -> Result<Vec<f64>> {
    let c = &geo.mesh;
    let h = (0..c.n_edges()).map(|e| c.edge_length(e)).fold(f64::INFINITY, f64::min);
    let umax = geo.u.iter().fold(0.0f64, |m, u| m.max(u.norm()));
    if umax == 0.0 {
        return Ok(vec![0.0; c.n_edges()]);
    }
    let eps = 1e-5 * h / umax;
    let shifted = |s: f64| c.with_vertices(c.vertices().iter().zip(&geo.u).map(|(x, u)| x + u * s).collect());
    let (cp, cm) = (shifted(eps)?, shifted(-eps)?);
    Ok((0..c.n_edges())
        .map(|e| {
            let sp = cp.edge_dual_length(e) / cp.edge_length(e);
            let sm = cm.edge_dual_length(e) / cm.edge_length(e);
            (sp - sm) / (2.0 * eps)
        })
        .collect())
}

/// The three boundary ports of the fluid. On body components the kinetic
/// part `h = rho k n` pairs with the mesh velocity and the remaining stress
/// `f - h` with the fluid velocity; on fixed walls `f - h` pairs with the
/// fluid velocity. `f` is the wall traction on the fluid and `n` the fluid
/// outward normal scaled by the edge length.
#[derive(Debug, Clone)]
pub struct BoundaryPorts {
    pub body: Vec<(PowerPort, PowerPort)>,
    pub walls: Vec<PowerPort>,
}

impl BoundaryPorts {
    pub fn new(geo: &Geometry, d: &Diagnostics, wall: &WallData, rho: f64) -> Result<Self> {
        let c = &geo.mesh;
        let wv = wall.vertex_vel(c);
        let mut body = Vec::new();
        let mut walls = Vec::new();
        for comp in c.components() {
            let mut kin = Vec::with_capacity(comp.edges.len());
            let mut stress = Vec::with_capacity(comp.edges.len());
            for &e in &comp.edges {
                let [a, b] = c.edges()[e];
                // fluid outward normal times length
                let n = rot(c.edge_vector(e)) * c.boundary_sign(e);
                let h = n * (rho * 0.5 * (d.k[a] + d.k[b]));
                kin.push(h);
                stress.push(d.traction[e] - h);
            }
            let vec_field = |f: &dyn Fn(usize) -> Vec2| BoundaryField {
                component: comp.name.clone(),
                valence: Valence::Vector,
                cells: comp.vertices.clone(),
                values: comp.vertices.iter().map(|&v| f(v)).collect(),
            };
            let flow = vec_field(&|v| wv[v].unwrap_or_default());
            let mesh_flow = vec_field(&|v| geo.u[v]);
            let cov = |values: Vec<Vec2>| {
                Carrier::Boundary(BoundaryField {
                    component: comp.name.clone(),
                    valence: Valence::Covector,
                    cells: comp.edges.clone(),
                    values,
                })
            };
            match comp.convention {
                Convention::BodyOutward => body.push((
                    PowerPort::new(&format!("{}:kinetic", comp.name), cov(kin), Carrier::Boundary(mesh_flow), Pairing::BoundaryDotWedge, 1.0),
                    PowerPort::new(&format!("{}:stress", comp.name), cov(stress), Carrier::Boundary(flow), Pairing::BoundaryDotWedge, 1.0),
                )),
                Convention::FluidOutward => {
                    walls.push(PowerPort::new(&format!("{}:wall", comp.name), cov(stress), Carrier::Boundary(flow), Pairing::BoundaryDotWedge, 1.0))
                }
            }
        }
        Ok(BoundaryPorts { body, walls })
    }
}
