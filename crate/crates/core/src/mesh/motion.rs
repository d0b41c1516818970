//! ALE mesh motion by harmonic extension of boundary displacements.

use super::SimplicialComplex;
use crate::linalg::{cg, CgOptions, Csr};
use crate::{Error, Result, Vec2};

/// Vertex displacement and velocity produced by one mesh update.
#[derive(Debug, Clone)]
pub struct MeshMotion {
    pub t: f64,
    /// Displacement relative to the previous configuration.
    pub displacement: Vec<Vec2>,
    /// Mesh velocity `u` per vertex.
    pub velocity: Vec<Vec2>,
}

impl MeshMotion {
    pub fn rest(n: usize, t: f64) -> Self {
        MeshMotion { t, displacement: vec![Vec2::zeros(); n], velocity: vec![Vec2::zeros(); n] }
    }

    /// Uniform velocity `u` applied over `dt`.
    pub fn uniform(n: usize, t: f64, u: Vec2, dt: f64) -> Self {
        MeshMotion { t, displacement: vec![u * dt; n], velocity: vec![u; n] }
    }

    /// Mesh velocity restricted to the vertices of a boundary component.
    pub fn boundary_trace(&self, c: &SimplicialComplex, component: &str) -> Result<Vec<(usize, Vec2)>> {
        Ok(c.component(component)?.vertices.iter().map(|&v| (v, self.velocity[v])).collect())
    }
}

/// Harmonic extension operator assembled once on a reference mesh.
///
/// Weights are the diagonal Hodge star on edges, so the extension is the
/// discrete Laplace solution with Dirichlet data on every boundary vertex.
#[derive(Debug, Clone)]
pub struct MeshMover {
    reference: SimplicialComplex,
    interior: Vec<usize>,
    slot: Vec<Option<usize>>,
    lap: Csr,
}

impl MeshMover {
    pub fn new(reference: SimplicialComplex) -> Self {
        let nv = reference.n_vertices();
        let mut slot = vec![None; nv];
        let mut interior = Vec::new();
        for v in 0..nv {
            if !reference.is_boundary_vertex(v) {
                slot[v] = Some(interior.len());
                interior.push(v);
            }
        }
        let mut trip = Vec::new();
        for (e, &[a, b]) in reference.edges().iter().enumerate() {
            let w = reference.edge_dual_length(e) / reference.edge_length(e);
            match (slot[a], slot[b]) {
                (Some(i), Some(j)) => {
                    trip.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
                }
                (Some(i), None) | (None, Some(i)) => trip.push((i, i, w)),
                (None, None) => {}
            }
        }
        let lap = Csr::from_triplets(interior.len(), trip);
        MeshMover { reference, interior, slot, lap }
    }

    pub fn reference(&self) -> &SimplicialComplex {
        &self.reference
    }

    /// Interior extension of prescribed boundary displacements. Boundary
    /// vertices absent from `boundary` are held fixed.
    pub fn extend(&self, boundary: &[(usize, Vec2)]) -> Result<Vec<Vec2>> {
        let c = &self.reference;
        let nv = c.n_vertices();
        let mut disp = vec![Vec2::zeros(); nv];
        for &(v, d) in boundary {
            if v >= nv || !c.is_boundary_vertex(v) {
                return Err(Error::InvalidMesh(format!("vertex {v} is not a boundary vertex")));
            }
            if !(d.x.is_finite() && d.y.is_finite()) {
                return Err(Error::NonFinite(format!("displacement of vertex {v}")));
            }
            disp[v] = d;
        }
        let scale = boundary.iter().map(|x| x.1.amax()).fold(0.0, f64::max);
        if scale == 0.0 || self.interior.is_empty() {
            return Ok(disp);
        }
        let ni = self.interior.len();
        for comp in 0..2 {
            let mut rhs = vec![0.0; ni];
            for (e, &[a, b]) in c.edges().iter().enumerate() {
                let w = c.edge_dual_length(e) / c.edge_length(e);
                match (self.slot[a], self.slot[b]) {
                    (Some(i), None) => rhs[i] += w * disp[b][comp],
                    (None, Some(j)) => rhs[j] += w * disp[a][comp],
                    _ => {}
                }
            }
            let mut x = vec![0.0; ni];
            let opts = CgOptions { abs_tol: 1e-15 * scale.max(1e-300), ..Default::default() };
            cg(&self.lap, &rhs, &mut x, opts)?;
            for (k, &v) in self.interior.iter().enumerate() {
                disp[v][comp] = x[k];
            }
        }
        Ok(disp)
    }

    /// Place the mesh at `reference + extend(total_boundary_displacement)`,
    /// with mesh velocity measured against the previous positions `prev`.
    pub fn place(
        &self,
        prev: &SimplicialComplex,
        total_boundary_displacement: &[(usize, Vec2)],
        t: f64,
        dt: f64,
    ) -> Result<(SimplicialComplex, MeshMotion)> {
        let disp = self.extend(total_boundary_displacement)?;
        let pos: Vec<Vec2> = self.reference.vertices().iter().zip(&disp).map(|(x, d)| x + d).collect();
        let step: Vec<Vec2> = pos.iter().zip(prev.vertices()).map(|(a, b)| a - b).collect();
        let velocity = velocity_from(&step, dt)?;
        let next = self.reference.with_vertices(pos)?;
        Ok((next, MeshMotion { t, displacement: step, velocity }))
    }
}

fn velocity_from(step: &[Vec2], dt: f64) -> Result<Vec<Vec2>> {
    if dt > 0.0 {
        Ok(step.iter().map(|d| d / dt).collect())
    } else if step.iter().all(|d| d.amax() == 0.0) {
        Ok(vec![Vec2::zeros(); step.len()])
    } else {
        Err(Error::InvalidMesh("non-zero displacement over a zero time step".into()))
    }
}

/// Move `complex` by the harmonic extension of the given boundary
/// displacements. The mesh velocity is `displacement / dt`.
pub fn deform(
    complex: &SimplicialComplex,
    boundary_displacement: &[(usize, Vec2)],
    dt: f64,
) -> Result<(SimplicialComplex, MeshMotion)> {
    let mover = MeshMover::new(complex.clone());
    let disp = mover.extend(boundary_displacement)?;
    let velocity = velocity_from(&disp, dt)?;
    let pos = complex.vertices().iter().zip(&disp).map(|(x, d)| x + d).collect();
    let next = complex.with_vertices(pos)?;
    Ok((next, MeshMotion { t: 0.0, displacement: disp, velocity }))
}
