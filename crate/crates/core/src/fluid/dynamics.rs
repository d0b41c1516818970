use super::{Fluid, FluidState, Geometry, WallData};
use crate::exec::map_indexed;
use crate::forms::Form;
use crate::linalg::{cg, CgOptions};
use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn rot(t: Vec2) -> Vec2 {
    Vec2::new(t.y, -t.x)
}

/// Right-hand sides of the momentum equation, split by origin.
#[derive(Debug, Clone)]
pub struct Rates {
    /// Advection, dynamic pressure and mesh motion terms per edge.
    pub f_nv: Vec<f64>,
    /// Viscous force `kappa d^T (dv / A)` per edge; `v . kv` is the enstrophy
    /// dissipation.
    pub kv: Vec<f64>,
    /// Dynamic pressure `|v|^2 / 2` per vertex.
    pub k: Vec<f64>,
    /// Vertex velocities, wall values on the boundary.
    pub vel: Vec<Vec2>,
    /// Vorticity per triangle.
    pub omega: Vec<f64>,
}

impl Rates {
    /// Acceleration without the pressure term.
    pub fn accel(&self, geo: &Geometry, rho: f64) -> Vec<f64> {
        self.f_nv.iter().zip(&self.kv).zip(&geo.ops.star1).map(|((f, k), s)| f - k / (rho * s)).collect()
    }
}

/// Mesh velocity and wall data as functions of the mesh configuration.
pub trait MeshDrive {
    /// Mesh velocity and walls for the mesh `mesh` at time `t`.
    fn state(&self, mesh: &SimplicialComplex, t: f64) -> Result<(Vec<Vec2>, WallData)>;
    /// Final correction of integrated positions, e.g. to put body vertices
    /// exactly on the body.
    fn settle(&self, pos: Vec<Vec2>, _t: f64) -> Vec<Vec2> {
        pos
    }
}

/// Fixed mesh with time independent walls.
pub struct FixedWalls(pub WallData);

impl MeshDrive for FixedWalls {
    fn state(&self, mesh: &SimplicialComplex, _t: f64) -> Result<(Vec<Vec2>, WallData)> {
        Ok((vec![Vec2::zeros(); mesh.n_vertices()], self.0.clone()))
    }
}

/// Result of [`Fluid::advance`].
#[derive(Debug, Clone)]
pub struct Advanced {
    pub state: FluidState,
    pub geo: Geometry,
    pub wall: WallData,
    pub report: StepReport,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    pub div_inf: f64,
    pub cfl: f64,
    pub cg_iterations: usize,
}

fn d0t(c: &SimplicialComplex, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.n_vertices()];
    for (e, &[a, b]) in c.edges().iter().enumerate() {
        out[a] -= y[e];
        out[b] += y[e];
    }
    out
}

/// Outward flux through the half boundary edges around each vertex.
fn boundary_outflow(c: &SimplicialComplex, wall: &WallData) -> Vec<f64> {
    let mut out = vec![0.0; c.n_vertices()];
    for &e in c.boundary_edges() {
        let n = rot(c.edge_vector(e)) * c.boundary_sign(e);
        let q = 0.5 * wall.mean_vel(e).dot(&n);
        let [a, b] = c.edges()[e];
        out[a] += q;
        out[b] += q;
    }
    out
}

fn solve_singular(lap: &crate::linalg::Csr, rhs: &[f64]) -> Result<(Vec<f64>, usize)> {
    let total: f64 = rhs.iter().sum();
    let scale: f64 = rhs.iter().map(|x| x.abs()).sum();
    if total.abs() > 1e-9 * scale.max(1e-300) && total.abs() > 1e-13 {
        return Err(Error::IncompatibleFlux(total));
    }
    let mut x = vec![0.0; rhs.len()];
    if scale == 0.0 {
        return Ok((x, 0));
    }
    let amax = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = (1e-13 * amax).max(1e-15);
    let it = cg(lap, rhs, &mut x, CgOptions { abs_tol: tol, singular: true, ..Default::default() })
?;
    Ok((x, it))
}

/// `1/2 * closed integral of v x dv` over all walls with linear wall
/// velocity on each edge; equals the integral of `det grad v` over the fluid.
pub(crate) fn wall_det(c: &SimplicialComplex, wall: &WallData) -> f64 {
    c.boundary_edges()
        .iter()
        .map(|&e| {
            let [va, vb] = wall.edge_vel[e];
            0.5 * c.boundary_sign(e) * cross(va, vb)
        })
        .sum()
}

/// Traction correction taking the vorticity form of the viscous stress to
/// the strain form on edge `e`; pairs with the mean wall velocity to give
/// `4 kappa` times that edge's share of [`wall_det`].
pub(crate) fn strain_correction(c: &SimplicialComplex, wall: &WallData, kappa: f64, e: usize) -> Vec2 {
    let [va, vb] = wall.edge_vel[e];
    rot(vb - va) * (2.0 * kappa * c.boundary_sign(e))
}

impl Fluid {
    /// Discrete divergence per dual cell: net outflow through the dual cell
    /// boundary including the wall parts.
    pub fn divergence(geo: &Geometry, v: &[f64], wall: &WallData) -> Vec<f64> {
        let c = &geo.mesh;
        let flux: Vec<f64> = v.iter().zip(&geo.ops.star1).map(|(x, s)| x * s).collect();
        let bo = boundary_outflow(c, wall);
        d0t(c, &flux).iter().zip(&bo).map(|(a, b)| -a + b).collect()
    }

    /// Overwrite boundary edges with the wall circulation.
    pub fn impose_walls(geo: &Geometry, v: &mut [f64], wall: &WallData) {
        let c = &geo.mesh;
        for &e in c.boundary_edges() {
            v[e] = wall.mean_vel(e).dot(&c.edge_vector(e));
        }
    }

    /// Time derivative of the wall circulation on boundary edges.
    pub fn wall_rate(geo: &Geometry, wall: &WallData) -> Vec<f64> {
        let c = &geo.mesh;
        let mut g = vec![0.0; c.n_edges()];
        for &e in c.boundary_edges() {
            let [a, b] = c.edges()[e];
            g[e] = wall.mean_acc(e).dot(&c.edge_vector(e)) + wall.mean_vel(e).dot(&(geo.u[b] - geo.u[a]));
        }
        g
    }

    /// Remove the divergent part of `v` on interior edges. Returns the
    /// potential `phi` whose gradient was subtracted.
    pub fn project(geo: &Geometry, v: &mut [f64], wall: &WallData) -> Result<(Vec<f64>, usize)> {
        Self::impose_walls(geo, v, wall);
        let div = Self::divergence(geo, v, wall);
        let rhs: Vec<f64> = div.iter().map(|x| -x).collect();
        let (phi, it) = solve_singular(&geo.ops.lap, &rhs)?;
        let c = &geo.mesh;
        for (e, &[a, b]) in c.edges().iter().enumerate() {
            if !c.is_boundary_edge(e) {
                v[e] -= phi[b] - phi[a];
            }
        }
        Ok((phi, it))
    }

    /// Momentum right-hand side without pressure, on geometry `geo` with
    /// mesh velocity `geo.u`.
    pub fn rates(&self, geo: &Geometry, v: &[f64], wall: &WallData) -> Result<Rates> {
        let c = &geo.mesh;
        let ops = &geo.ops;
        let kappa = self.params.kappa;
        let fit = ops.sharp.apply(&Form { degree: 1, kind: crate::forms::Kind::Primal, values: v.to_vec() });
        let wv = wall.vertex_vel(c);
        let vel: Vec<Vec2> = fit.iter().zip(&wv).map(|(f, w)| w.unwrap_or(*f)).collect();
        let k: Vec<f64> = vel.iter().map(|x| 0.5 * x.norm_squared()).collect();
        let uv: Vec<f64> = vel.iter().zip(&geo.u).map(|(x, u)| x.dot(u)).collect();
        // per-triangle reconstruction relative to the mesh, and vorticity
        let tri: Vec<(Vec2, f64)> = map_indexed(c.n_triangles(), |t| {
            let vt: Vec2 = ops.recon[t].iter().map(|&(e, w)| w * v[e]).sum();
            let curl: f64 = c.tri_edges(t).iter().map(|&(e, s)| s as f64 * v[e]).sum();
            let [a, b, d] = c.triangles()[t];
            let ut = (geo.u[a] + geo.u[b] + geo.u[d]) / 3.0;
            (vt - ut, curl / c.triangle_area(t))
        });
        let f_nv = map_indexed(c.n_edges(), |e| {
            let [a, b] = c.edges()[e];
            let t_e = c.edge_vector(e);
            let ld = c.edge_dual_length(e);
            let adv: f64 = c
                .edge_triangles(e)
                .iter()
                .map(|&(t, kk)| (c.edge_dual_part(t, kk) / ld) * tri[t].1 * cross(tri[t].0, t_e))
                .sum();
            -(k[b] - k[a]) + (uv[b] - uv[a]) - adv
        });
        let f_nv = if geo.is_moving() { self.ale_symmetric(geo, v, &f_nv, &tri)? } else { f_nv };
        let kv = map_indexed(c.n_edges(), |e| {
            let tris = c.edge_triangles(e);
            kappa * tris.iter().map(|&(t, kk)| c.tri_edges(t)[kk].1 as f64 * tri[t].1).sum::<f64>()
        });
        let omega = tri.iter().map(|x| x.1).collect();
        Ok(Rates { f_nv, kv, k, vel, omega })
    }

    /// Replaces the symmetric part of the discrete mesh-velocity term by
    /// minus half the metric rate, so moving the mesh exchanges no energy
    /// with the interior. The skew part is kept.
    fn ale_symmetric(&self, geo: &Geometry, v: &[f64], f_nv: &[f64], tri: &[(Vec2, f64)]) -> Result<Vec<f64>> {
        let c = &geo.mesh;
        let sd = super::ports::star_rate(geo)?;
        // vortex-term energy per triangle is omega_T (u_T x s_T)
        let us: Vec<(Vec2, f64)> = map_indexed(c.n_triangles(), |t| {
            let [a, b, d] = c.triangles()[t];
            let ut = (geo.u[a] + geo.u[b] + geo.u[d]) / 3.0;
            let st: Vec2 = c
                .tri_edges(t)
                .iter()
                .enumerate()
                .map(|(k, &(e, _))| c.edge_vector(e) * (c.edge_dual_part(t, k) / c.edge_length(e) * v[e]))
                .sum();
            (ut, cross(ut, st) / c.triangle_area(t))
        });
        Ok(map_indexed(c.n_edges(), |e| {
            let t_e = c.edge_vector(e);
            let grad: f64 = c
                .edge_triangles(e)
                .iter()
                .map(|&(t, kk)| {
                    let sign = c.tri_edges(t)[kk].1 as f64;
                    sign * us[t].1 + tri[t].1 * c.edge_dual_part(t, kk) / c.edge_length(e) * cross(us[t].0, t_e)
                })
                .sum();
            f_nv[e] - 0.5 * (grad + sd[e] * v[e]) / geo.ops.star1[e]
        }))
    }

    /// Pressure that keeps the divergence constraint satisfied in time, for
    /// the given rates and wall motion. Zero mean.
    pub fn consistent_pressure(&self, geo: &Geometry, v: &[f64], rates: &Rates, wall: &WallData) -> Result<Vec<f64>> {
        let c = &geo.mesh;
        let rho = self.params.rho;
        let acc = rates.accel(geo, rho);
        let g = Self::wall_rate(geo, wall);
        let mut y: Vec<f64> = (0..c.n_edges())
            .map(|e| geo.ops.star1[e] * if c.is_boundary_edge(e) { g[e] } else { acc[e] })
            .collect();
        let mut rhs_extra = vec![0.0; c.n_vertices()];
        if geo.is_moving() {
            for (e, sd) in super::ports::star_rate(geo)?.into_iter().enumerate() {
                y[e] += sd * v[e];
            }
        }
        for &e in c.boundary_edges() {
            let [a, b] = c.edges()[e];
            let s = c.boundary_sign(e);
            let n = rot(c.edge_vector(e)) * s;
            let n_dot = rot(geo.u[b] - geo.u[a]) * s;
            let q = 0.5 * (wall.mean_acc(e).dot(&n) + wall.mean_vel(e).dot(&n_dot));
            rhs_extra[a] += q;
            rhs_extra[b] += q;
        }
        let rhs: Vec<f64> = d0t(c, &y).iter().zip(&rhs_extra).map(|(a, b)| a - b).collect();
        let (q, _) = solve_singular(&geo.ops.lap, &rhs)?;
        Ok(q.iter().map(|x| rho * x).collect())
    }

    /// Wall reaction `star_e lambda_e` on boundary edges (zero elsewhere): the
    /// generalized force that keeps each boundary circulation on its
    /// prescribed trajectory.
    pub fn wall_reaction(&self, geo: &Geometry, rates: &Rates, p: &[f64], wall: &WallData) -> Vec<f64> {
        let c = &geo.mesh;
        let rho = self.params.rho;
        let g = Self::wall_rate(geo, wall);
        let mut out = vec![0.0; c.n_edges()];
        for &e in c.boundary_edges() {
            let [a, b] = c.edges()[e];
            let s = geo.ops.star1[e];
            out[e] = rho * s * g[e] + rates.kv[e] - rho * s * rates.f_nv[e] + s * (p[b] - p[a]);
        }
        out
    }

    fn stage(&self, geo: &Geometry, v: &[f64], wall: &WallData) -> Result<Vec<f64>> {
        Ok(self.rates(geo, v, wall)?.accel(geo, self.params.rho))
    }

    /// Heun step of the fluid velocity together with the mesh positions,
    /// with a projection after each stage. `geo_n` carries the mesh velocity
    /// and `wall_n` the walls at the start of the step; `drive` supplies both
    /// for any other configuration.
    pub fn advance(
        &self,
        s: &FluidState,
        dt: f64,
        geo_n: &Geometry,
        wall_n: &WallData,
        drive: &dyn MeshDrive,
    ) -> Result<Advanced> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::config("dt", "time step must be non-negative"));
        }
        let t1 = s.t + dt;
        let v0 = &s.v.values;
        let f1 = self.stage(geo_n, v0, wall_n)?;
        let moving = geo_n.is_moving();
        let shift = |geo: &Geometry, du: &[Vec2], t: f64| -> Result<(Geometry, WallData)> {
            let pos: Vec<Vec2> = geo_n.mesh.vertices().iter().zip(du).map(|(x, d)| x + d).collect();
            let pos = drive.settle(pos, t);
            let mesh = geo.mesh.with_vertices(pos)?;
            let (u, wall) = drive.state(&mesh, t)?;
            Ok((Geometry::moving(mesh, u)?, wall))
        };
        // predictor
        let (geo_p, wall_p) = if moving {
            let du: Vec<Vec2> = geo_n.u.iter().map(|u| u * dt).collect();
            let (g, w) = shift(geo_n, &du, t1)?;
            (std::borrow::Cow::Owned(g), w)
        } else {
            (std::borrow::Cow::Borrowed(geo_n), drive.state(&geo_n.mesh, t1)?.1)
        };
        let mut v1: Vec<f64> = v0.iter().zip(&f1).map(|(x, f)| x + dt * f).collect();
        let (_, it1) = Self::project(&geo_p, &mut v1, &wall_p)?;
        let f2 = self.stage(&geo_p, &v1, &wall_p)?;
        let mut v2: Vec<f64> = v0.iter().zip(f1.iter().zip(&f2)).map(|(x, (a, b))| x + 0.5 * dt * (a + b)).collect();
        // corrector
        let (geo_end, wall_end) = if moving || geo_p.is_moving() {
            let du: Vec<Vec2> = geo_n.u.iter().zip(&geo_p.u).map(|(a, b)| (a + b) * (0.5 * dt)).collect();
            shift(geo_n, &du, t1)?
        } else {
            (geo_n.clone(), wall_p)
        };
        let (_, it2) = Self::project(&geo_end, &mut v2, &wall_end)?;
        let div = Self::divergence(&geo_end, &v2, &wall_end);
        let div_inf = div.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if div_inf > 1e-10 || !div_inf.is_finite() {
            return Err(Error::Divergence(div_inf));
        }
        if v2.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("velocity".into()));
        }
        let c = &geo_end.mesh;
        let cfl = (0..c.n_edges()).map(|e| dt * (v2[e] / c.edge_length(e)).abs() / c.edge_length(e)).fold(0.0, f64::max);
        let v = Form { values: v2, ..s.v.clone() };
        let state = FluidState::new(c, self.params.rho, t1, v)?;
        Ok(Advanced { state, geo: geo_end, wall: wall_end, report: StepReport { div_inf, cfl, cg_iterations: it1 + it2 } })
    }

    /// Step on the fixed mesh with the configured walls.
    pub fn step(&self, s: &FluidState, dt: f64) -> Result<(FluidState, StepReport)> {
        let w = self.walls()?;
        let a = self.advance(s, dt, &self.geo, &w, &FixedWalls(w.clone()))?;
        Ok((a.state, a.report))
    }

    /// Project an initial velocity onto the constraint.
    pub fn initial_state(&self, v: Form) -> Result<FluidState> {
        let w = self.walls()?;
        let mut values = v.values.clone();
        Self::project(&self.geo, &mut values, &w)?;
        FluidState::new(self.mesh(), self.params.rho, 0.0, Form { values, ..v })
    }
}
