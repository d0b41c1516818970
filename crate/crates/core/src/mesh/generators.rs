//! Built-in mesh generators. All of them except [`crisscross_square`]
//! produce meshes with strictly positive circumcentric duals.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{BuildOptions, Convention, SimplicialComplex};
use crate::{Error, Result, Vec2};

/// Triangulate the strip between two rows of points that are sorted along a
/// common parameter. Returns triangles as index triples into the global
/// vertex array; orientation is fixed later by the complex builder.
fn zip_rows(lower: &[(f64, usize)], upper: &[(f64, usize)], out: &mut Vec<[usize; 3]>) {
    let (mut i, mut j) = (0, 0);
    while i + 1 < lower.len() || j + 1 < upper.len() {
        let advance_lower = if i + 1 >= lower.len() {
            false
        } else if j + 1 >= upper.len() {
            true
        } else if lower[i + 1].0 == upper[j + 1].0 {
            // shared end point: close the row that lags behind first
            lower[i].0 < upper[j].0
        } else {
            lower[i + 1].0 < upper[j + 1].0
        };
        if advance_lower {
            out.push([lower[i].1, lower[i + 1].1, upper[j].1]);
            i += 1;
        } else {
            out.push([lower[i].1, upper[j + 1].1, upper[j].1]);
            j += 1;
        }
    }
}

fn edges_where(
    c: &SimplicialComplex,
    pred: impl Fn(Vec2) -> bool,
) -> Vec<usize> {
    c.boundary_edges().iter().copied().filter(|&e| pred(c.edge_midpoint(e))).collect()
}

/// Unit square `[0,1]^2` with `res` rows of height `1/res`. Odd rows are
/// shifted by half a cell so interior triangles are acute. Boundary
/// components: `bottom`, `right`, `top`, `left`.
pub fn unit_square(res: usize) -> Result<SimplicialComplex> {
    if res < 1 {
        return Err(Error::InvalidMesh("unit-square needs res >= 1".into()));
    }
    let h = 1.0 / res as f64;
    let mut vertices = Vec::new();
    let mut rows: Vec<Vec<(f64, usize)>> = Vec::new();
    for j in 0..=res {
        let y = j as f64 * h;
        let xs: Vec<f64> = if j % 2 == 0 {
            (0..=res).map(|i| i as f64 * h).collect()
        } else {
            std::iter::once(0.0)
                .chain((0..res).map(|i| (i as f64 + 0.5) * h))
                .chain(std::iter::once(1.0))
                .collect()
        };
        let row = xs
            .into_iter()
            .map(|x| {
                vertices.push(Vec2::new(x, y));
                (x, vertices.len() - 1)
            })
            .collect();
        rows.push(row);
    }
    let mut cells = Vec::new();
    for j in 0..res {
        zip_rows(&rows[j], &rows[j + 1], &mut cells);
    }
    let c = SimplicialComplex::build(vertices, &cells, BuildOptions::default())?;
    let eps = 1e-9 * h;
    let mut tags = BTreeMap::new();
    tags.insert("bottom".to_string(), (edges_where(&c, |m| m.y < eps), Convention::FluidOutward));
    tags.insert("top".to_string(), (edges_where(&c, |m| m.y > 1.0 - eps), Convention::FluidOutward));
    tags.insert("left".to_string(), (edges_where(&c, |m| m.x < eps), Convention::FluidOutward));
    tags.insert("right".to_string(), (edges_where(&c, |m| m.x > 1.0 - eps), Convention::FluidOutward));
    let opts = BuildOptions { tags, ..Default::default() };
    SimplicialComplex::build(c.vertices().to_vec(), c.triangles(), opts)
}

/// Doubly periodic square of side `length` with `res` vertices per row.
/// Rows are staggered by half a cell; `res` must be even and at least 4.
pub fn periodic_square(res: usize, length: f64) -> Result<SimplicialComplex> {
    periodic_rect(res, res, length, length)
}

/// Doubly periodic `lx` by `ly` rectangle with `nx` vertices per row and
/// `ny` staggered rows (`ny` even, both at least 4). With
/// `ly / ny = (sqrt(3) / 2) lx / nx` every triangle is equilateral.
pub fn periodic_rect(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<SimplicialComplex> {
    if nx < 4 || ny < 4 || ny % 2 != 0 {
        return Err(Error::InvalidMesh("periodic mesh needs nx >= 4 and an even ny >= 4".into()));
    }
    if !(lx > 0.0 && ly > 0.0) {
        return Err(Error::InvalidMesh("periodic mesh needs positive side lengths".into()));
    }
    let (hx, hy) = (lx / nx as f64, ly / ny as f64);
    let id = |i: usize, j: usize| (j % ny) * nx + (i % nx);
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
            vertices.push(Vec2::new((i as f64 + shift) * hx, j as f64 * hy));
        }
    }
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            if j % 2 == 0 {
                cells.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                cells.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                cells.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                cells.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    let opts = BuildOptions { period: Some(Vec2::new(lx, ly)), ..Default::default() };
    SimplicialComplex::build(vertices, &cells, opts)
}

/// Annulus `r_in <= |x| <= r_out` centered at the origin with `res` vertices
/// per ring. Ring radii grow geometrically so cells stay close to
/// equilateral; alternate rings are rotated by half an angular step.
/// Boundary components: `inner`, `outer`.
pub fn annulus(r_in: f64, r_out: f64, res: usize) -> Result<SimplicialComplex> {
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(Error::InvalidMesh("annulus needs 0 < r_in < r_out".into()));
    }
    if res < 6 {
        return Err(Error::InvalidMesh("annulus needs res >= 6".into()));
    }
    let n = res;
    let dtheta = 2.0 * PI / n as f64;
    let span = (r_out / r_in).ln();
    let rings = ((span / (0.866 * dtheta)).ceil() as usize).max(1);
    let drho = span / rings as f64;
    let mut vertices = Vec::with_capacity(n * (rings + 1));
    for k in 0..=rings {
        let r = if k == rings { r_out } else { r_in * (k as f64 * drho).exp() };
        let shift = if k % 2 == 1 { 0.5 } else { 0.0 };
        for i in 0..n {
            let th = (i as f64 + shift) * dtheta;
            vertices.push(Vec2::new(r * th.cos(), r * th.sin()));
        }
    }
    let id = |i: usize, k: usize| k * n + (i % n);
    let mut cells = Vec::with_capacity(2 * n * rings);
    for k in 0..rings {
        for i in 0..n {
            if k % 2 == 0 {
                cells.push([id(i, k), id(i + 1, k), id(i, k + 1)]);
                cells.push([id(i + 1, k), id(i + 1, k + 1), id(i, k + 1)]);
            } else {
                cells.push([id(i, k), id(i + 1, k), id(i + 1, k + 1)]);
                cells.push([id(i, k), id(i + 1, k + 1), id(i, k + 1)]);
            }
        }
    }
    let c = SimplicialComplex::build(vertices, &cells, BuildOptions::default())?;
    let mid = 0.5 * (r_in + r_out);
    let mut tags = BTreeMap::new();
    tags.insert("inner".to_string(), (edges_where(&c, |m| m.norm() < mid), Convention::FluidOutward));
    tags.insert("outer".to_string(), (edges_where(&c, |m| m.norm() > mid), Convention::FluidOutward));
    let opts = BuildOptions { tags, ..Default::default() };
    SimplicialComplex::build(c.vertices().to_vec(), c.triangles(), opts)
}

/// `n x n` squares on `[0,1]^2`, each split into four right triangles by
/// its center. Dual edge lengths vanish on the grid lines, so the
/// well-centered check is disabled.
pub fn crisscross_square(n: usize) -> Result<SimplicialComplex> {
    if n < 1 {
        return Err(Error::InvalidMesh("crisscross needs n >= 1".into()));
    }
    let h = 1.0 / n as f64;
    let grid = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec2::new(i as f64 * h, j as f64 * h));
        }
    }
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let c = vertices.len();
            vertices.push(Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h));
            let (a, b, d, e) = (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
            cells.extend([[a, b, c], [b, d, c], [d, e, c], [e, a, c]]);
        }
    }
    let opts = BuildOptions { require_well_centered: false, ..Default::default() };
    SimplicialComplex::build(vertices, &cells, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_meshes_are_well_centered() {
        for res in [2, 3, 8, 17] {
            let c = unit_square(res).unwrap();
            assert!((c.total_area() - 1.0).abs() < 1e-12);
            assert_eq!(c.euler_characteristic(), 1);
        }
        for (a, b, n) in [(0.5, 1.5, 16), (0.5, 2.0, 24), (1.0, 1.5, 256)] {
            let c = annulus(a, b, n).unwrap();
            assert_eq!(c.euler_characteristic(), 0);
            assert_eq!(c.component("inner").unwrap().edges.len(), n);
        }
        let c = periodic_square(64, 2.0 * PI).unwrap();
        assert!(c.boundary_edges().is_empty());
        assert_eq!(c.euler_characteristic(), 0);
        assert!((c.total_area() - 4.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn unit_square_components_cover_boundary() {
        let c = unit_square(5).unwrap();
        let names: Vec<_> = c.components().map(|x| x.name.clone()).collect();
        assert_eq!(names, ["bottom", "left", "right", "top"]);
        let n: usize = c.components().map(|x| x.edges.len()).sum();
        assert_eq!(n, c.boundary_edges().len());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(periodic_square(7, 1.0).is_err());
        assert!(annulus(1.0, 0.5, 16).is_err());
        assert!(unit_square(0).is_err());
    }
}
