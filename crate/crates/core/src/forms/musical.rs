use nalgebra::{DMatrix, Matrix2};

use super::{Form, Kind, TensorForm};
use crate::exec::map_indexed;
use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

/// Flat of a vertex vector field: trapezoidal line integral along each edge.
pub fn flat(c: &SimplicialComplex, v: &[Vec2]) -> Form {
    let values = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[a, b])| 0.5 * (v[a] + v[b]).dot(&c.edge_vector(e)))
        .collect();
    Form { degree: 1, kind: Kind::Primal, values }
}

/// Least-squares affine fit `v(x) = v0 + G (x - center)` to the edge values
/// of a 1-form on a patch of edges. Exact for affine fields.
#[derive(Debug, Clone)]
pub struct PatchFit {
    pub center: Vec2,
    pub edges: Vec<usize>,
    /// Pseudo-inverse columns: unknowns (v0x, v0y, Gxx, Gxy, Gyx, Gyy) per edge.
    pub coef: Vec<[f64; 6]>,
}

impl PatchFit {
    fn build(c: &SimplicialComplex, center: Vec2, edges: Vec<usize>) -> Option<Self> {
        let m = edges.len();
        if m < 6 {
            return None;
        }
        let h = edges.iter().map(|&e| c.edge_length(e)).sum::<f64>() / m as f64;
        let mut a = DMatrix::<f64>::zeros(m, 6);
        for (r, &e) in edges.iter().enumerate() {
            let t = c.edge_vector(e) / h;
            let x = c.delta(center, c.edge_midpoint(e)) / h;
            let row = [t.x, t.y, t.x * x.x, t.x * x.y, t.y * x.x, t.y * x.y];
            for (j, val) in row.iter().enumerate() {
                a[(r, j)] = *val;
            }
        }
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-8 * smax) {
            return None;
        }
        let pinv = svd.pseudo_inverse(0.0).ok()?;
        // undo the scaling: edge values scale with h, gradients with 1/h
        let coef = (0..m)
            .map(|r| {
                let mut col = [0.0; 6];
                for (j, cj) in col.iter_mut().enumerate() {
                    let s = if j < 2 { 1.0 / h } else { 1.0 / (h * h) };
                    *cj = pinv[(j, r)] * s;
                }
                col
            })
            .collect();
        Some(PatchFit { center, edges, coef })
    }

    pub fn solve(&self, a: &[f64]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (&e, col) in self.edges.iter().zip(&self.coef) {
            for j in 0..6 {
                out[j] += col[j] * a[e];
            }
        }
        out
    }

    pub fn value(&self, a: &[f64]) -> Vec2 {
        let mut v = Vec2::zeros();
        for (&e, col) in self.edges.iter().zip(&self.coef) {
            v.x += col[0] * a[e];
            v.y += col[1] * a[e];
        }
        v
    }

    /// Fitted velocity gradient, `G[(i, j)] = d v_i / d x_j`.
    pub fn gradient(&self, a: &[f64]) -> Matrix2<f64> {
        let s = self.solve(a);
        Matrix2::new(s[2], s[3], s[4], s[5])
    }
}

fn edges_of(c: &SimplicialComplex, tris: &[usize]) -> Vec<usize> {
    let mut e: Vec<usize> = tris.iter().flat_map(|&t| c.tri_edges(t).iter().map(|x| x.0)).collect();
    e.sort_unstable();
    e.dedup();
    e
}

fn grow(c: &SimplicialComplex, tris: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = tris
        .iter()
        .flat_map(|&t| c.triangles()[t].iter().flat_map(|&v| c.vertex_triangles(v).iter().copied()))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn fit_patch(c: &SimplicialComplex, center: Vec2, mut tris: Vec<usize>, kind: &'static str, id: usize) -> Result<PatchFit> {
    for _ in 0..3 {
        let edges = edges_of(c, &tris);
        if edges.len() >= 8 {
            if let Some(f) = PatchFit::build(c, center, edges) {
                return Ok(f);
            }
        }
        tris = grow(c, &tris);
    }
    Err(Error::RankDeficient { kind, id })
}

/// Precomputed reconstruction of vector fields from 1-forms.
#[derive(Debug, Clone)]
pub struct Sharp {
    pub fits: Vec<PatchFit>,
}

impl Sharp {
    /// One fit per vertex over the edges of its incident triangles.
    pub fn at_vertices(c: &SimplicialComplex) -> Result<Self> {
        let fits = map_indexed(c.n_vertices(), |v| fit_patch(c, c.vertex(v), c.vertex_triangles(v).to_vec(), "vertex", v));
        Ok(Sharp { fits: fits.into_iter().collect::<Result<_>>()? })
    }

    /// One fit per triangle, centered at its centroid, over the triangle and
    /// its edge neighbours.
    pub fn at_triangles(c: &SimplicialComplex) -> Result<Self> {
        let fits = map_indexed(c.n_triangles(), |t| {
            let mut tris: Vec<usize> = c
                .tri_edges(t)
                .iter()
                .flat_map(|&(e, _)| c.edge_triangles(e).iter().map(|x| x.0))
                .collect();
            tris.sort_unstable();
            tris.dedup();
            fit_patch(c, c.centroid(t), tris, "triangle", t)
        });
        Ok(Sharp { fits: fits.into_iter().collect::<Result<_>>()? })
    }

    pub fn apply(&self, a: &Form) -> Vec<Vec2> {
        map_indexed(self.fits.len(), |i| self.fits[i].value(&a.values))
    }

    pub fn gradients(&self, a: &Form) -> Vec<Matrix2<f64>> {
        map_indexed(self.fits.len(), |i| self.fits[i].gradient(&a.values))
    }
}

/// Sharp of a primal 1-form as a vector valued 0-form.
pub fn sharp(c: &SimplicialComplex, a: &Form) -> Result<TensorForm> {
    if a.kind != Kind::Primal || a.degree != 1 || a.len() != c.n_edges() {
        return Err(Error::Degree("sharp expects a primal 1-form".into()));
    }
    let s = Sharp::at_vertices(c)?;
    Ok(TensorForm::vector_field(&s.apply(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{annulus, periodic_square, unit_square};

    #[test]
    fn uniform_flat_is_x_extent() {
        let c = unit_square(6).unwrap();
        let f = flat(&c, &vec![Vec2::new(1.0, 0.0); c.n_vertices()]);
        for e in 0..c.n_edges() {
            assert!((f.values[e] - c.edge_vector(e).x).abs() < 1e-15);
        }
        let z = sharp(&c, &Form::zeros(&c, 1, Kind::Primal)).unwrap();
        assert!(z.comps.iter().all(|x| x.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn affine_round_trip() {
        let g = Matrix2::new(0.3, -1.2, 0.7, 0.4);
        let v0 = Vec2::new(0.5, -0.25);
        for c in [unit_square(5).unwrap(), annulus(0.5, 1.5, 16).unwrap()] {
            let field: Vec<Vec2> = c.vertices().iter().map(|x| v0 + g * x).collect();
            let back = sharp(&c, &flat(&c, &field)).unwrap().to_vecs();
            for (a, b) in field.iter().zip(&back) {
                assert!((a - b).norm() < 1e-12);
            }
            let tg = Sharp::at_triangles(&c).unwrap().gradients(&flat(&c, &field));
            for m in tg {
                assert!((m - g).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn periodic_fit_uses_minimum_image() {
        let c = periodic_square(8, 1.0).unwrap();
        let u = Vec2::new(0.3, -0.8);
        let back = sharp(&c, &flat(&c, &vec![u; c.n_vertices()])).unwrap().to_vecs();
        assert!(back.iter().all(|b| (b - u).norm() < 1e-13));
    }
}
