use nalgebra::Matrix2;

use super::{Fluid, FluidState, Geometry, WallData};
use crate::forms::{Form, Kind};
use crate::Result;

/// Velocity gradient, strain and viscous stress per triangle.
#[derive(Debug, Clone)]
pub struct ShearStress {
    pub grad: Vec<Matrix2<f64>>,
    /// Lie derivative of the metric, `G + G^T`.
    pub strain: Vec<Matrix2<f64>>,
    /// `kappa (G + G^T)`.
    pub stress: Vec<Matrix2<f64>>,
}

/// Time derivatives of the fluid state.
#[derive(Debug, Clone)]
pub struct FluidRhs {
    pub v_dot: Form,
    /// Mass rate per dual cell; zero for a divergence free state.
    pub mu_dot: Vec<f64>,
    pub p: Vec<f64>,
}

impl Fluid {
    pub fn hamiltonian_f(&self, s: &FluidState) -> f64 {
        self.hamiltonian(s)
    }

    /// Co-energy variables: the mass flux `rho * star v` (a dual 1-form) and
    /// the dynamic pressure `|v|^2 / 2` at vertices.
    pub fn coenergy(&self, s: &FluidState) -> Result<(Form, Form)> {
        let rho = self.params.rho;
        let flux = s.v.values.iter().zip(&self.geo.ops.star1).map(|(x, st)| rho * st * x).collect();
        let rates = self.rates(&self.geo, &s.v.values, &self.walls()?)?;
        Ok((Form { degree: 1, kind: Kind::Dual, values: flux }, Form::primal(&self.geo.mesh, 0, rates.k)?))
    }

    pub fn shear_stress(&self, s: &FluidState) -> ShearStress {
        let grad = self.geo.ops.grad.gradients(&s.v);
        let strain: Vec<_> = grad.iter().map(|g| g + g.transpose()).collect();
        let stress = strain.iter().map(|e| e * self.params.kappa).collect();
        ShearStress { grad, strain, stress }
    }

    /// Strain dissipation `(kappa / 2) int |grad v + grad v^T|^2`, evaluated
    /// as `kappa (int w^2 - 4 int det grad v)` for divergence free fields.
    /// The determinant integral reduces to the walls, which keeps the value
    /// consistent with the viscous force and exactly zero for rigid motions.
    pub fn dissipation_rate(&self, s: &FluidState) -> Result<f64> {
        Ok(self.dissipation_with(&self.geo, &s.v, &self.walls()?))
    }

    pub fn dissipation_with(&self, geo: &Geometry, v: &Form, wall: &WallData) -> f64 {
        let c = &geo.mesh;
        let kappa = self.params.kappa;
        if kappa == 0.0 {
            return 0.0;
        }
        let ens: f64 = (0..c.n_triangles())
            .map(|t| {
                let curl: f64 = c.tri_edges(t).iter().map(|&(e, sg)| sg as f64 * v.values[e]).sum();
                curl * curl / c.triangle_area(t)
            })
            .sum();
        kappa * (ens - 4.0 * super::dynamics::wall_det(c, wall))
    }

    /// Bulk stress `lambda div v` per dual cell, using the discrete
    /// divergence. Vanishes up to the projection tolerance.
    pub fn bulk_stress(&self, s: &FluidState) -> Result<Vec<f64>> {
        let c = self.mesh();
        let div = Self::divergence(&self.geo, &s.v.values, &self.walls()?);
        Ok(div.iter().enumerate().map(|(v, d)| self.params.lambda * d / c.vertex_dual_area(v)).collect())
    }

    /// Project `v` onto the divergence free fields with the configured walls.
    /// The returned pressure is the one that would have produced the
    /// correction over one step of length `dt`.
    pub fn pressure_project(&self, v: &Form, dt: f64) -> Result<(Form, Vec<f64>)> {
        let mut values = v.values.clone();
        let (phi, _) = Self::project(&self.geo, &mut values, &self.walls()?)?;
        let p = phi.iter().map(|x| self.params.rho * x / dt).collect();
        Ok((Form { values, ..v.clone() }, p))
    }

    /// Semi-discrete rates on geometry `geo`. Boundary edges follow the
    /// prescribed walls; interior edges include the consistent pressure.
    pub fn fluid_rhs_on(&self, geo: &Geometry, s: &FluidState, wall: &WallData) -> Result<FluidRhs> {
        let c = &geo.mesh;
        let rho = self.params.rho;
        let rates = self.rates(geo, &s.v.values, wall)?;
        let p = self.consistent_pressure(geo, &s.v.values, &rates, wall)?;
        let acc = rates.accel(geo, rho);
        let g = Self::wall_rate(geo, wall);
        let values: Vec<f64> = (0..c.n_edges())
            .map(|e| {
                let [a, b] = c.edges()[e];
                if c.is_boundary_edge(e) {
                    g[e]
                } else {
                    acc[e] - (p[b] - p[a]) / rho
                }
            })
            .collect();
        let mu_dot = Self::divergence(geo, &s.v.values, wall).iter().map(|d| -rho * d).collect();
        Ok(FluidRhs { v_dot: Form::primal(c, 1, values)?, mu_dot, p })
    }

    pub fn fluid_rhs(&self, s: &FluidState) -> Result<FluidRhs> {
        self.fluid_rhs_on(&self.geo, s, &self.walls()?)
    }
}
