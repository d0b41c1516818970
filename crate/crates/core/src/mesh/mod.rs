//! Planar simplicial complexes with circumcentric duals.
//!
//! Edges are stored with ascending vertex indices and oriented from the lower
//! to the higher index. Triangles are stored counter-clockwise. A complex may
//! be periodic, in which case every geometric difference is taken with the
//! minimum-image convention.

mod generators;
mod io;
mod motion;

pub use generators::{annulus, crisscross_square, periodic_rect, periodic_square, unit_square};
pub use io::{load_mesh_json, MeshFile, TagEdge};
pub use motion::{deform, MeshMotion, MeshMover};

use std::collections::{BTreeMap, HashMap};

use crate::{Error, Result, Vec2};

/// Which side the normals of a boundary component point to.
///
/// `FluidOutward` is the convention of the control volume boundary: normals
/// leave the meshed region. `BodyOutward` is the convention of an immersed
/// body: normals leave the body and therefore point into the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    FluidOutward,
    BodyOutward,
}

impl Convention {
    /// Sign that converts a mesh-outward quantity into this convention.
    pub fn sign(self) -> f64 {
        match self {
            Convention::FluidOutward => 1.0,
            Convention::BodyOutward => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub name: String,
    /// Edge indices, in ascending order.
    pub edges: Vec<usize>,
    /// Vertex indices touched by the component, ascending.
    pub vertices: Vec<usize>,
    pub convention: Convention,
}

/// Construction policy for [`SimplicialComplex::build`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Reject meshes with a non-positive dual measure.
    pub require_well_centered: bool,
    pub period: Option<Vec2>,
    /// Named boundary components; untagged boundary edges are collected into
    /// a component called `boundary`.
    pub tags: BTreeMap<String, (Vec<usize>, Convention)>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            require_well_centered: true,
            period: None,
            tags: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    vertices: Vec<Vec2>,
    period: Option<Vec2>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    /// Edges of each triangle in the order (v0v1, v1v2, v2v0) with the sign
    /// relating the triangle's orientation to the edge orientation.
    tri_edges: Vec<[(usize, i8); 3]>,
    /// Adjacent triangles of each edge together with the index of the edge
    /// inside that triangle.
    edge_tris: Vec<Vec<(usize, usize)>>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_tris: Vec<Vec<usize>>,
    edge_len: Vec<f64>,
    tri_area: Vec<f64>,
    /// Circumcenter offsets relative to the first vertex of each triangle.
    circumcenter: Vec<Vec2>,
    /// Signed circumcenter-to-midpoint distance, per triangle and local edge.
    dual_part: Vec<[f64; 3]>,
    edge_dual: Vec<f64>,
    vertex_dual: Vec<f64>,
    boundary_edges: Vec<usize>,
    /// +1 if the stored edge orientation runs counter-clockwise around the
    /// mesh (interior on the left), -1 otherwise, 0 for interior edges.
    boundary_sign: Vec<i8>,
    is_boundary_vertex: Vec<bool>,
    components: BTreeMap<String, BoundaryComponent>,
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn circumcenter_offset(b: Vec2, c: Vec2) -> Vec2 {
    // circumcenter of (0, b, c)
    let d = 2.0 * cross(b, c);
    let b2 = b.norm_squared();
    let c2 = c.norm_squared();
    Vec2::new(c.y * b2 - b.y * c2, b.x * c2 - c.x * b2) / d
}

impl SimplicialComplex {
    /// Build a complex from vertex coordinates and top simplices.
    pub fn build(vertices: Vec<Vec2>, cells: &[[usize; 3]], opts: BuildOptions) -> Result<Self> {
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        let nv = vertices.len();
        let period = opts.period;
        let delta = |a: Vec2, b: Vec2| -> Vec2 {
            let mut d = b - a;
            if let Some(p) = period {
                d.x -= p.x * (d.x / p.x).round();
                d.y -= p.y * (d.y / p.y).round();
            }
            d
        };
        let mut triangles = Vec::with_capacity(cells.len());
        for (ci, c) in cells.iter().enumerate() {
            if c.iter().any(|&i| i >= nv) || c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                return Err(Error::InvalidMesh(format!("cell {ci} has invalid vertex indices")));
            }
            let a = cross(delta(vertices[c[0]], vertices[c[1]]), delta(vertices[c[0]], vertices[c[2]]));
            let scale = delta(vertices[c[0]], vertices[c[1]]).norm_squared();
            if a.abs() <= 1e-14 * scale.max(1e-300) {
                return Err(Error::DegenerateCell { cell: ci, measure: 0.5 * a });
            }
            triangles.push(if a > 0.0 { *c } else { [c[0], c[2], c[1]] });
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        // Deterministic edge numbering: ascending (a, b).
        let mut all: Vec<(usize, usize)> = triangles
            .iter()
            .flat_map(|t| {
                (0..3).map(move |k| {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        for (a, b) in all {
            edge_index.insert((a, b), edges.len());
            edges.push([a, b]);
        }
        let ne = edges.len();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut edge_tris: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ne];
        for (ti, t) in triangles.iter().enumerate() {
            let mut te = [(0usize, 0i8); 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = edge_index[&(a.min(b), a.max(b))];
                let s = if a < b { 1 } else { -1 };
                te[k] = (e, s);
                edge_tris[e].push((ti, k));
            }
            tri_edges.push(te);
        }
        for (e, ts) in edge_tris.iter().enumerate() {
            if ts.len() > 2 {
                return Err(Error::NonManifold(edges[e][0], edges[e][1]));
            }
            if ts.len() == 2 {
                let s0 = tri_edges[ts[0].0][ts[0].1].1;
                let s1 = tri_edges[ts[1].0][ts[1].1].1;
                if s0 == s1 {
                    return Err(Error::InconsistentOrientation(edges[e][0], edges[e][1]));
                }
            }
        }
        let mut vertex_edges = vec![Vec::new(); nv];
        for (e, ab) in edges.iter().enumerate() {
            vertex_edges[ab[0]].push(e);
            vertex_edges[ab[1]].push(e);
        }
        let mut vertex_tris = vec![Vec::new(); nv];
        for (ti, t) in triangles.iter().enumerate() {
            for &v in t {
                vertex_tris[v].push(ti);
            }
        }
        if let Some(v) = vertex_tris.iter().position(|t| t.is_empty()) {
            return Err(Error::InvalidMesh(format!("vertex {v} belongs to no cell")));
        }

        let mut boundary_edges = Vec::new();
        let mut boundary_sign = vec![0i8; ne];
        let mut is_boundary_vertex = vec![false; nv];
        for (e, ts) in edge_tris.iter().enumerate() {
            if ts.len() == 1 {
                boundary_edges.push(e);
                boundary_sign[e] = tri_edges[ts[0].0][ts[0].1].1;
                is_boundary_vertex[edges[e][0]] = true;
                is_boundary_vertex[edges[e][1]] = true;
            }
        }
        // A boundary vertex of a 2-manifold with boundary has exactly two
        // boundary edges.
        let mut bcount = vec![0usize; nv];
        for &e in &boundary_edges {
            bcount[edges[e][0]] += 1;
            bcount[edges[e][1]] += 1;
        }
        if let Some(v) = (0..nv).find(|&v| bcount[v] != 0 && bcount[v] != 2) {
            return Err(Error::InvalidMesh(format!("vertex {v} is a non-manifold boundary vertex")));
        }

        let mut c = SimplicialComplex {
            vertices,
            period,
            edges,
            triangles,
            tri_edges,
            edge_tris,
            vertex_edges,
            vertex_tris,
            edge_len: Vec::new(),
            tri_area: Vec::new(),
            circumcenter: Vec::new(),
            dual_part: Vec::new(),
            edge_dual: Vec::new(),
            vertex_dual: Vec::new(),
            boundary_edges,
            boundary_sign,
            is_boundary_vertex,
            components: BTreeMap::new(),
        };
        c.compute_geometry()?;
        if opts.require_well_centered {
            c.check_well_centered()?;
        }
        c.assign_components(opts.tags)?;
        Ok(c)
    }

    fn compute_geometry(&mut self) -> Result<()> {
        self.edge_len = (0..self.edges.len()).map(|e| self.edge_vector(e).norm()).collect();
        let nt = self.triangles.len();
        self.tri_area = Vec::with_capacity(nt);
        self.circumcenter = Vec::with_capacity(nt);
        self.dual_part = Vec::with_capacity(nt);
        self.edge_dual = vec![0.0; self.edges.len()];
        self.vertex_dual = vec![0.0; self.vertices.len()];
        for ti in 0..nt {
            let [p0, p1, p2] = self.tri_points(ti);
            let area = 0.5 * cross(p1 - p0, p2 - p0);
            if area <= 0.0 {
                return Err(Error::DegenerateCell { cell: ti, measure: area });
            }
            let off = circumcenter_offset(p1 - p0, p2 - p0);
            let cc = p0 + off;
            let pts = [p0, p1, p2];
            let mut parts = [0.0; 3];
            for (k, part) in parts.iter_mut().enumerate() {
                let a = pts[k];
                let b = pts[(k + 1) % 3];
                let t = b - a;
                // interior normal (triangle is counter-clockwise)
                let n_in = Vec2::new(-t.y, t.x) / t.norm();
                *part = (cc - 0.5 * (a + b)).dot(&n_in);
            }
            for k in 0..3 {
                let (e, _) = self.tri_edges[ti][k];
                self.edge_dual[e] += parts[k];
                let len = (pts[(k + 1) % 3] - pts[k]).norm();
                let kite = 0.25 * len * parts[k];
                let t = self.triangles[ti];
                self.vertex_dual[t[k]] += kite;
                self.vertex_dual[t[(k + 1) % 3]] += kite;
            }
            self.tri_area.push(area);
            self.circumcenter.push(off);
            self.dual_part.push(parts);
        }
        Ok(())
    }

    fn check_well_centered(&self) -> Result<()> {
        for (e, &d) in self.edge_dual.iter().enumerate() {
            if d <= 1e-12 * self.edge_len[e] {
                return Err(Error::NotWellCentered { kind: "edge", id: e, measure: d });
            }
        }
        for (v, &d) in self.vertex_dual.iter().enumerate() {
            if d <= 0.0 {
                return Err(Error::NotWellCentered { kind: "vertex", id: v, measure: d });
            }
        }
        Ok(())
    }

    fn assign_components(&mut self, tags: BTreeMap<String, (Vec<usize>, Convention)>) -> Result<()> {
        let mut owner: Vec<Option<String>> = vec![None; self.edges.len()];
        let mut comps = BTreeMap::new();
        for (name, (edges, conv)) in tags {
            let mut edges = edges;
            edges.sort_unstable();
            edges.dedup();
            for &e in &edges {
                if e >= self.edges.len() || self.boundary_sign[e] == 0 {
                    return Err(Error::InvalidMesh(format!("tag '{name}' references non-boundary edge {e}")));
                }
                if let Some(other) = &owner[e] {
                    return Err(Error::InvalidMesh(format!("edge {e} tagged by both '{other}' and '{name}'")));
                }
                owner[e] = Some(name.clone());
            }
            comps.insert(name.clone(), self.make_component(name, edges, conv));
        }
        let rest: Vec<usize> = self.boundary_edges.iter().copied().filter(|&e| owner[e].is_none()).collect();
        if !rest.is_empty() {
            let name = "boundary".to_string();
            if comps.contains_key(&name) {
                return Err(Error::InvalidMesh("tag name 'boundary' is reserved for untagged edges".into()));
            }
            comps.insert(name.clone(), self.make_component(name, rest, Convention::FluidOutward));
        }
        self.components = comps;
        Ok(())
    }

    fn make_component(&self, name: String, edges: Vec<usize>, convention: Convention) -> BoundaryComponent {
        let mut vertices: Vec<usize> = edges.iter().flat_map(|&e| self.edges[e]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        BoundaryComponent { name, edges, vertices, convention }
    }

    /// Same topology and boundary components at new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec2>) -> Result<Self> {
        let mut c = self.clone();
        c.vertices = vertices;
        match c.compute_geometry() {
            Ok(()) => Ok(c),
            Err(Error::DegenerateCell { cell, .. }) => Err(Error::MeshInversion(cell)),
            Err(e) => Err(e),
        }
    }

    /// Change the orientation convention of a boundary component.
    pub fn set_convention(&mut self, name: &str, convention: Convention) -> Result<()> {
        self.components
            .get_mut(name)
            .ok_or_else(|| Error::UnknownComponent(name.into()))?
            .convention = convention;
        Ok(())
    }

    // ---- accessors -------------------------------------------------------

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }
    /// Number of k-cells.
    pub fn n_cells(&self, k: usize) -> usize {
        match k {
            0 => self.n_vertices(),
            1 => self.n_edges(),
            2 => self.n_triangles(),
            _ => 0,
        }
    }
    pub fn dim(&self) -> usize {
        2
    }
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }
    pub fn vertex(&self, v: usize) -> Vec2 {
        self.vertices[v]
    }
    pub fn period(&self) -> Option<Vec2> {
        self.period
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn tri_edges(&self, t: usize) -> &[(usize, i8); 3] {
        &self.tri_edges[t]
    }
    pub fn edge_triangles(&self, e: usize) -> &[(usize, usize)] {
        &self.edge_tris[e]
    }
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_tris[v]
    }
    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_len[e]
    }
    pub fn triangle_area(&self, t: usize) -> f64 {
        self.tri_area[t]
    }
    pub fn edge_dual_length(&self, e: usize) -> f64 {
        self.edge_dual[e]
    }
    /// Dual length of edge `e` inside the triangle at local position `k`.
    pub fn edge_dual_part(&self, t: usize, k: usize) -> f64 {
        self.dual_part[t][k]
    }
    pub fn vertex_dual_area(&self, v: usize) -> f64 {
        self.vertex_dual[v]
    }
    /// Primal measure of a k-cell (vertices have measure 1).
    pub fn primal_measure(&self, k: usize, i: usize) -> f64 {
        match k {
            0 => 1.0,
            1 => self.edge_len[i],
            _ => self.tri_area[i],
        }
    }
    /// Measure of the dual cell of a primal k-cell.
    pub fn dual_measure(&self, k: usize, i: usize) -> f64 {
        match k {
            0 => self.vertex_dual[i],
            1 => self.edge_dual[i],
            _ => 1.0,
        }
    }
    pub fn total_area(&self) -> f64 {
        self.tri_area.iter().sum()
    }
    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_sign[e] != 0
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.is_boundary_vertex[v]
    }
    /// Orientation of a boundary edge relative to the counter-clockwise
    /// boundary orientation induced by the mesh.
    pub fn boundary_sign(&self, e: usize) -> f64 {
        self.boundary_sign[e] as f64
    }
    pub fn components(&self) -> impl Iterator<Item = &BoundaryComponent> {
        self.components.values()
    }
    pub fn component(&self, name: &str) -> Result<&BoundaryComponent> {
        self.components.get(name).ok_or_else(|| Error::UnknownComponent(name.into()))
    }

    // ---- geometry --------------------------------------------------------

    /// Minimum-image difference `b - a`.
    pub fn delta(&self, a: Vec2, b: Vec2) -> Vec2 {
        let mut d = b - a;
        if let Some(p) = self.period {
            d.x -= p.x * (d.x / p.x).round();
            d.y -= p.y * (d.y / p.y).round();
        }
        d
    }

    pub fn rel(&self, from: usize, to: usize) -> Vec2 {
        self.delta(self.vertices[from], self.vertices[to])
    }

    /// Edge vector from the first to the second stored vertex.
    pub fn edge_vector(&self, e: usize) -> Vec2 {
        let [a, b] = self.edges[e];
        self.rel(a, b)
    }

    pub fn edge_midpoint(&self, e: usize) -> Vec2 {
        let [a, _] = self.edges[e];
        self.vertices[a] + 0.5 * self.edge_vector(e)
    }

    /// Triangle corners, unwrapped around the first vertex.
    pub fn tri_points(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        let p0 = self.vertices[a];
        [p0, p0 + self.rel(a, b), p0 + self.rel(a, c)]
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let [p0, p1, p2] = self.tri_points(t);
        (p0 + p1 + p2) / 3.0
    }

    pub fn circumcenter(&self, t: usize) -> Vec2 {
        self.vertices[self.triangles[t][0]] + self.circumcenter[t]
    }

    /// Unit normal of boundary edge `e` pointing out of the mesh.
    pub fn mesh_outward_normal(&self, e: usize) -> Vec2 {
        let t = self.edge_vector(e) * self.boundary_sign(e);
        Vec2::new(t.y, -t.x) / t.norm()
    }

    /// Per-edge measures and unit normals of a boundary component, with the
    /// normals following the component's convention.
    pub fn boundary_measure(&self, name: &str) -> Result<Vec<(f64, Vec2)>> {
        let comp = self.component(name)?;
        let s = comp.convention.sign();
        Ok(comp
            .edges
            .iter()
            .map(|&e| (self.edge_len[e], self.mesh_outward_normal(e) * s))
            .collect())
    }

    /// Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    /// Signed incidence matrix of the boundary operator from k-cells to
    /// (k-1)-cells, as a dense integer matrix (rows: (k-1)-cells).
    pub fn incidence(&self, k: usize) -> Vec<Vec<i32>> {
        match k {
            1 => {
                let mut m = vec![vec![0i32; self.n_edges()]; self.n_vertices()];
                for (e, [a, b]) in self.edges.iter().enumerate() {
                    m[*a][e] -= 1;
                    m[*b][e] += 1;
                }
                m
            }
            2 => {
                let mut m = vec![vec![0i32; self.n_triangles()]; self.n_edges()];
                for (t, te) in self.tri_edges.iter().enumerate() {
                    for &(e, s) in te {
                        m[e][t] += s as i32;
                    }
                }
                m
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_triangle() -> SimplicialComplex {
        let v = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        // right triangle: dual of the hypotenuse vanishes, so skip the check
        let opts = BuildOptions { require_well_centered: false, ..Default::default() };
        SimplicialComplex::build(v, &[[0, 1, 2]], opts).unwrap()
    }

    #[test]
    fn single_triangle() {
        let c = unit_triangle();
        assert_eq!(c.boundary_edges().len(), 3);
        assert!((c.triangle_area(0) - 0.5).abs() < 1e-15);
        assert!((c.vertex_dual_area(0) + c.vertex_dual_area(1) + c.vertex_dual_area(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn right_triangle_rejected_when_strict() {
        let v = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let err = SimplicialComplex::build(v, &[[0, 1, 2]], BuildOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotWellCentered { kind: "edge", .. }));
    }

    #[test]
    fn boundary_of_boundary_is_zero() {
        for c in [unit_square(6).unwrap(), annulus(0.5, 1.5, 16).unwrap(), periodic_square(8, 1.0).unwrap()] {
            let d1 = c.incidence(1);
            let d2 = c.incidence(2);
            for v in 0..c.n_vertices() {
                for t in 0..c.n_triangles() {
                    let s: i32 = (0..c.n_edges()).map(|e| d1[v][e] * d2[e][t]).sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn crisscross_euler_characteristic() {
        let c = crisscross_square(8).unwrap();
        // brute force count
        assert_eq!(c.n_vertices(), 81 + 64);
        assert_eq!(c.n_triangles(), 4 * 64);
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn degenerate_cell_rejected() {
        let v = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)];
        let err = SimplicialComplex::build(v, &[[0, 1, 2]], BuildOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateCell { cell: 0, .. }));
    }

    #[test]
    fn non_manifold_rejected() {
        let v = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.5, 1.0),
            Vec2::new(0.5, -1.0),
            Vec2::new(0.6, 0.8),
        ];
        let opts = BuildOptions { require_well_centered: false, ..Default::default() };
        let err = SimplicialComplex::build(v, &[[0, 1, 2], [0, 3, 1], [0, 1, 4]], opts).unwrap_err();
        assert!(matches!(err, Error::NonManifold(0, 1)));
    }

    #[test]
    fn unit_square_boundary_measure() {
        let c = unit_square(8).unwrap();
        let total: f64 = c.components().map(|comp| c.boundary_measure(&comp.name).unwrap().iter().map(|m| m.0).sum::<f64>()).sum();
        assert!((total - 4.0).abs() < 1e-13);
        assert!((c.total_area() - 1.0).abs() < 1e-13);
        // normals orthogonal to edges
        for &e in c.boundary_edges() {
            let n = c.mesh_outward_normal(e);
            assert!(n.dot(&c.edge_vector(e)).abs() < 1e-12);
            assert!((n.norm() - 1.0).abs() < 1e-12);
            // outward: points away from the square center
            assert!(n.dot(&(c.edge_midpoint(e) - Vec2::new(0.5, 0.5))) > 0.0);
        }
    }

    #[test]
    fn polygon_perimeter_and_body_normals() {
        let n = 256;
        let mut c = annulus(1.0, 1.5, n).unwrap();
        c.set_convention("inner", Convention::BodyOutward).unwrap();
        let m = c.boundary_measure("inner").unwrap();
        let total: f64 = m.iter().map(|x| x.0).sum();
        let exact = 2.0 * n as f64 * (std::f64::consts::PI / n as f64).sin();
        assert!((total - exact).abs() < 1e-12);
        // body-outward normals on the inner circle point away from the origin,
        // i.e. into the fluid
        let comp = c.component("inner").unwrap();
        for (&e, (_, nrm)) in comp.edges.iter().zip(&m) {
            assert!(nrm.dot(&c.edge_midpoint(e)) > 0.0);
            assert!(c.mesh_outward_normal(e).dot(&c.edge_midpoint(e)) < 0.0);
        }
    }

    #[test]
    fn unknown_component() {
        let c = unit_square(4).unwrap();
        assert!(matches!(c.boundary_measure("lid"), Err(Error::UnknownComponent(_))));
    }
}
