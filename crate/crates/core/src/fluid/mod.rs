//! Incompressible viscous flow on a (possibly moving) simplicial mesh.
//!
//! The unknown is the velocity 1-form `v` (circulation per edge). Edges on
//! the boundary carry prescribed wall data; interior edges evolve under
//! advection, dynamic pressure, viscosity and the pressure constraint that
//! keeps the discrete divergence on every dual cell at zero.
//!
//! The viscous force is `kappa d^T (dv / A)`, the gradient of the enstrophy.
//! For divergence free fields the strain dissipation differs from the
//! enstrophy by `4 kappa int det grad v`, a pure wall term, so it is
//! evaluated that way and the wall traction carries the matching
//! correction. Strain, dissipation and wall power then balance exactly, and
//! rigid motions dissipate nothing. Velocity gradients for output come from
//! per-triangle least-squares fits.

mod analysis;
mod dynamics;
mod ports;

pub use analysis::{FluidRhs, ShearStress};
pub use dynamics::{Advanced, FixedWalls, MeshDrive, Rates, StepReport};
pub use ports::{BoundaryPorts, Diagnostics, FLUID_HEADER};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::forms::{Form, Kind, Sharp};
use crate::linalg::Csr;
use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Shear viscosity.
    pub kappa: f64,
    /// Bulk viscosity; inactive for incompressible flow.
    #[serde(default)]
    pub lambda: f64,
    pub rho: f64,
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) || !(self.rho > 0.0) || !(self.lambda >= 0.0) {
            return Err(Error::config("kappa/rho", "need kappa >= 0, lambda >= 0, rho > 0"));
        }
        Ok(())
    }
}

/// Boundary condition of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wall {
    NoSlip,
    Velocity([f64; 2]),
    /// Velocity supplied every step by a rigid body.
    Moving,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundaryConditions {
    pub walls: BTreeMap<String, Wall>,
}

impl BoundaryConditions {
    pub fn check(&self, c: &SimplicialComplex) -> Result<()> {
        for comp in c.components() {
            if !self.walls.contains_key(&comp.name) {
                return Err(Error::config(&format!("bc.{}", comp.name), "boundary component has no condition"));
            }
        }
        for name in self.walls.keys() {
            c.component(name).map_err(|_| Error::config(&format!("bc.{name}"), "no such boundary component"))?;
        }
        Ok(())
    }
}

/// Velocity of the walls at one instant and its rate of change following
/// the mesh vertices. Values are kept per boundary edge end point, so a wall
/// velocity may jump at a corner.
#[derive(Debug, Clone, PartialEq)]
pub struct WallData {
    pub edge_vel: Vec<[Vec2; 2]>,
    pub edge_acc: Vec<[Vec2; 2]>,
}

impl WallData {
    /// Walls at rest, or moving with their constant prescribed velocities.
    /// Components marked [`Wall::Moving`] start at rest.
    pub fn from_bc(c: &SimplicialComplex, bc: &BoundaryConditions) -> Result<Self> {
        bc.check(c)?;
        let ne = c.n_edges();
        let mut w = WallData { edge_vel: vec![[Vec2::zeros(); 2]; ne], edge_acc: vec![[Vec2::zeros(); 2]; ne] };
        for comp in c.components() {
            if let Wall::Velocity([x, y]) = bc.walls[&comp.name] {
                for &e in &comp.edges {
                    w.edge_vel[e] = [Vec2::new(x, y); 2];
                }
            }
        }
        Ok(w)
    }

    /// Set velocity and acceleration of a component from vertex values.
    pub fn set_component(
        &mut self,
        c: &SimplicialComplex,
        component: &str,
        vel: impl Fn(usize) -> Vec2,
        acc: impl Fn(usize) -> Vec2,
    ) -> Result<()> {
        for &e in &c.component(component)?.edges {
            let [a, b] = c.edges()[e];
            self.edge_vel[e] = [vel(a), vel(b)];
            self.edge_acc[e] = [acc(a), acc(b)];
        }
        Ok(())
    }

    pub fn mean_vel(&self, e: usize) -> Vec2 {
        0.5 * (self.edge_vel[e][0] + self.edge_vel[e][1])
    }

    pub fn mean_acc(&self, e: usize) -> Vec2 {
        0.5 * (self.edge_acc[e][0] + self.edge_acc[e][1])
    }

    /// Wall velocity at a boundary vertex: the mean over its boundary edges.
    pub fn vertex_vel(&self, c: &SimplicialComplex) -> Vec<Option<Vec2>> {
        let mut sum = vec![(Vec2::zeros(), 0usize); c.n_vertices()];
        for &e in c.boundary_edges() {
            let [a, b] = c.edges()[e];
            sum[a].0 += self.edge_vel[e][0];
            sum[a].1 += 1;
            sum[b].0 += self.edge_vel[e][1];
            sum[b].1 += 1;
        }
        sum.into_iter().map(|(s, n)| (n > 0).then(|| s / n as f64)).collect()
    }
}

/// Operators that depend only on the mesh geometry.
#[derive(Debug, Clone)]
pub struct Operators {
    pub sharp: Sharp,
    pub grad: Sharp,
    /// `v_T = sum_k w_k v_{e_k}` with `w_k = (l*_{T,k} / |e_k|) t_{e_k} / A_T`.
    pub recon: Vec<[(usize, Vec2); 3]>,
    /// Diagonal Hodge star on edges.
    pub star1: Vec<f64>,
    /// Laplacian `d0^T star1 d0` restricted to interior edges.
    pub lap: Csr,
}

impl Operators {
    pub fn new(c: &SimplicialComplex) -> Result<Self> {
        let sharp = Sharp::at_vertices(c)?;
        let grad = Sharp::at_triangles(c)?;
        let star1: Vec<f64> = (0..c.n_edges()).map(|e| c.edge_dual_length(e) / c.edge_length(e)).collect();
        let recon = (0..c.n_triangles())
            .map(|t| {
                let a = c.triangle_area(t);
                let te = c.tri_edges(t);
                let mut out = [(0usize, Vec2::zeros()); 3];
                for k in 0..3 {
                    let e = te[k].0;
                    out[k] = (e, c.edge_vector(e) * (c.edge_dual_part(t, k) / (c.edge_length(e) * a)));
                }
                out
            })
            .collect();
        let mut trip = Vec::with_capacity(4 * c.n_edges());
        for (e, &[a, b]) in c.edges().iter().enumerate() {
            if c.is_boundary_edge(e) {
                continue;
            }
            let w = star1[e];
            trip.extend([(a, a, w), (b, b, w), (a, b, -w), (b, a, -w)]);
        }
        let lap = Csr::from_triplets(c.n_vertices(), trip);
        Ok(Operators { sharp, grad, recon, star1, lap })
    }
}

/// Mesh, its operators and the mesh velocity.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub mesh: SimplicialComplex,
    pub ops: Operators,
    pub u: Vec<Vec2>,
}

impl Geometry {
    pub fn fixed(mesh: SimplicialComplex) -> Result<Self> {
        let ops = Operators::new(&mesh)?;
        let u = vec![Vec2::zeros(); mesh.n_vertices()];
        Ok(Geometry { mesh, ops, u })
    }

    pub fn moving(mesh: SimplicialComplex, u: Vec<Vec2>) -> Result<Self> {
        if u.len() != mesh.n_vertices() {
            return Err(Error::InvalidMesh("mesh velocity length mismatch".into()));
        }
        let ops = Operators::new(&mesh)?;
        Ok(Geometry { mesh, ops, u })
    }

    pub fn is_moving(&self) -> bool {
        self.u.iter().any(|u| u.amax() != 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub t: f64,
    /// Velocity 1-form.
    pub v: Form,
    /// Mass per triangle.
    pub mu: Form,
}

impl FluidState {
    pub fn new(c: &SimplicialComplex, rho: f64, t: f64, v: Form) -> Result<Self> {
        if v.kind != Kind::Primal || v.degree != 1 || v.len() != c.n_edges() {
            return Err(Error::Degree("velocity must be a primal 1-form".into()));
        }
        let mu = Form { degree: 2, kind: Kind::Primal, values: (0..c.n_triangles()).map(|t| rho * c.triangle_area(t)).collect() };
        Ok(FluidState { t, v, mu })
    }
}

/// The fluid subsystem: parameters, boundary conditions and current geometry.
#[derive(Debug, Clone)]
pub struct Fluid {
    pub params: FluidParams,
    pub bc: BoundaryConditions,
    pub geo: Geometry,
}

impl Fluid {
    pub fn new(params: FluidParams, bc: BoundaryConditions, mesh: SimplicialComplex) -> Result<Self> {
        params.validate()?;
        bc.check(&mesh)?;
        Ok(Fluid { params, bc, geo: Geometry::fixed(mesh)? })
    }

    pub fn mesh(&self) -> &SimplicialComplex {
        &self.geo.mesh
    }

    pub fn walls(&self) -> Result<WallData> {
        WallData::from_bc(&self.geo.mesh, &self.bc)
    }

    /// Kinetic energy `1/2 rho sum_e star_e v_e^2`.
    pub fn hamiltonian(&self, s: &FluidState) -> f64 {
        hamiltonian_with(&self.geo.ops, self.params.rho, &s.v.values)
    }
}

pub(crate) fn hamiltonian_with(ops: &Operators, rho: f64, v: &[f64]) -> f64 {
    0.5 * rho * v.iter().zip(&ops.star1).map(|(x, s)| s * x * x).sum::<f64>()
}
