use super::{d, BoundaryField, BoundaryForm, Form, Kind, Sharp, TensorForm, Valence};
use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn check_field(c: &SimplicialComplex, u: &[Vec2]) -> Result<()> {
    if u.len() != c.n_vertices() {
        return Err(Error::Valence(format!("vector field has {} values, mesh has {} vertices", u.len(), c.n_vertices())));
    }
    Ok(())
}

fn check_top(c: &SimplicialComplex, h: &Form) -> Result<()> {
    if h.kind != Kind::Primal || h.degree != 2 || h.len() != c.n_triangles() {
        return Err(Error::Degree("expected a primal 2-form".into()));
    }
    Ok(())
}

/// Hodge star of a top form represented on vertices: the area weighted
/// average of the densities of the incident triangles.
pub fn star_vertex(c: &SimplicialComplex, h: &Form) -> Result<Form> {
    check_top(c, h)?;
    let values = (0..c.n_vertices())
        .map(|v| {
            let tris = c.vertex_triangles(v);
            let mass: f64 = tris.iter().map(|&t| h.values[t]).sum();
            let area: f64 = tris.iter().map(|&t| c.triangle_area(t)).sum();
            mass / area
        })
        .collect();
    Ok(Form { degree: 0, kind: Kind::Primal, values })
}

/// Flux 1-form of a vertex vector field: `u x t` per edge, i.e. the flow
/// through the edge towards its right-hand side.
pub fn flat_star(c: &SimplicialComplex, u: &[Vec2]) -> Form {
    let values = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[a, b])| cross(0.5 * (u[a] + u[b]), c.edge_vector(e)))
        .collect();
    Form { degree: 1, kind: Kind::Primal, values }
}

/// Contraction of a vector field with a top form.
pub fn interior_product_top(c: &SimplicialComplex, u: &[Vec2], h: &Form) -> Result<Form> {
    check_field(c, u)?;
    let s = star_vertex(c, h)?.values;
    let values = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[a, b])| {
            let t = c.edge_vector(e);
            let ubar = 0.5 * (u[a] + u[b]);
            0.5 * (s[a] + s[b]) * (ubar.x * t.y - ubar.y * t.x)
        })
        .collect();
    Ok(Form { degree: 1, kind: Kind::Primal, values })
}

/// Interior product of a vertex vector field with a primal k-form, k >= 1.
pub fn interior_product(c: &SimplicialComplex, u: &[Vec2], a: &Form) -> Result<Form> {
    check_field(c, u)?;
    if a.kind != Kind::Primal {
        return Err(Error::Degree("interior product expects a primal form".into()));
    }
    match a.degree {
        0 => Err(Error::Degree("interior product of a 0-form".into())),
        1 => {
            let v = Sharp::at_vertices(c)?.apply(a);
            Ok(Form { degree: 0, kind: Kind::Primal, values: u.iter().zip(&v).map(|(x, y)| x.dot(y)).collect() })
        }
        _ => interior_product_top(c, u, a),
    }
}

/// Lie derivative via Cartan's formula.
pub fn lie_derivative(c: &SimplicialComplex, u: &[Vec2], a: &Form) -> Result<Form> {
    match a.degree {
        0 => interior_product(c, u, &d(c, a)?),
        1 => d(c, &interior_product(c, u, a)?)?.add(&interior_product(c, u, &d(c, a)?)?),
        _ => d(c, &interior_product(c, u, a)?),
    }
}

/// Covector valued 1-form representing a scalar density `f` given on
/// vertices: on an edge `t` it evaluates to `f (t_y, -t_x)`, the integral of
/// `f n` over the edge for its right-hand normal.
pub fn scalar_to_covector(c: &SimplicialComplex, f: &[f64]) -> TensorForm {
    let ne = c.n_edges();
    let mut comps = [vec![0.0; ne], vec![0.0; ne]];
    for (e, &[a, b]) in c.edges().iter().enumerate() {
        let t = c.edge_vector(e);
        let fb = 0.5 * (f[a] + f[b]);
        comps[0][e] = fb * t.y;
        comps[1][e] = -fb * t.x;
    }
    TensorForm { valence: Valence::Covector, degree: 1, comps, symmetric: false }
}

fn orientation(c: &SimplicialComplex, component: &str) -> Result<(Vec<usize>, Vec<f64>)> {
    let comp = c.component(component)?;
    let s = comp.convention.sign();
    Ok((comp.edges.clone(), comp.edges.iter().map(|&e| s * c.boundary_sign(e)).collect()))
}

/// Partial trace of a covector valued 1-form: restrict to the edges of the
/// component, oriented by the component's convention, keeping the value leg.
pub fn partial_trace(c: &SimplicialComplex, sigma: &TensorForm, component: &str) -> Result<BoundaryField> {
    if sigma.valence != Valence::Covector || sigma.degree != 1 || sigma.len() != c.n_edges() {
        return Err(Error::Valence("partial trace expects a covector valued 1-form".into()));
    }
    let (edges, sign) = orientation(c, component)?;
    let values = edges.iter().zip(&sign).map(|(&e, s)| *s * sigma.at(e)).collect();
    Ok(BoundaryField { component: component.into(), valence: Valence::Covector, cells: edges, values })
}

/// Partial trace of a vector valued 0-form: restriction to the vertices of the
/// component.
pub fn partial_trace_vector(c: &SimplicialComplex, v: &TensorForm, component: &str) -> Result<BoundaryField> {
    if v.valence != Valence::Vector || v.degree != 0 || v.len() != c.n_vertices() {
        return Err(Error::Valence("partial trace expects a vector valued 0-form".into()));
    }
    let verts = c.component(component)?.vertices.clone();
    let values = verts.iter().map(|&i| v.at(i)).collect();
    Ok(BoundaryField { component: component.into(), valence: Valence::Vector, cells: verts, values })
}

/// Trace of a scalar 1-form onto a boundary component.
pub fn trace(c: &SimplicialComplex, a: &Form, component: &str) -> Result<BoundaryForm> {
    if a.kind != Kind::Primal || a.degree != 1 || a.len() != c.n_edges() {
        return Err(Error::Degree("trace expects a primal 1-form".into()));
    }
    let (edges, sign) = orientation(c, component)?;
    let values = edges.iter().zip(&sign).map(|(&e, s)| s * a.values[e]).collect();
    Ok(BoundaryForm { component: component.into(), edges, values })
}

/// Value contracting wedge of a covector valued boundary 1-form with a
/// vector valued boundary 0-form; the vector is averaged over each edge.
pub fn dot_wedge(c: &SimplicialComplex, sigma: &BoundaryField, nu: &BoundaryField) -> Result<BoundaryForm> {
    if sigma.valence != Valence::Covector || nu.valence != Valence::Vector {
        return Err(Error::Valence("dot wedge pairs a covector valued form with a vector field".into()));
    }
    if sigma.component != nu.component {
        return Err(Error::Carrier(format!("components '{}' and '{}' differ", sigma.component, nu.component)));
    }
    let mut values = Vec::with_capacity(sigma.cells.len());
    for (&e, s) in sigma.cells.iter().zip(&sigma.values) {
        let [a, b] = c.edges()[e];
        let (va, vb) = match (nu.get(a), nu.get(b)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::Carrier(format!("vector field missing on edge {e}"))),
        };
        values.push(s.dot(&(0.5 * (va + vb))));
    }
    Ok(BoundaryForm { component: sigma.component.clone(), edges: sigma.cells.clone(), values })
}

/// In-domain value contracting wedge: contraction of a covector valued
/// 1-form with a vertex vector field, giving a scalar 1-form.
pub fn dot_wedge_domain(c: &SimplicialComplex, sigma: &TensorForm, v: &TensorForm) -> Result<Form> {
    if sigma.valence != Valence::Covector || v.valence != Valence::Vector || v.degree != 0 {
        return Err(Error::Valence("dot wedge pairs a covector valued form with a vector field".into()));
    }
    if sigma.degree != 1 || sigma.len() != c.n_edges() || v.len() != c.n_vertices() {
        return Err(Error::Degree("dot wedge expects a 1-form and a vertex field".into()));
    }
    let values = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[a, b])| sigma.at(e).dot(&(0.5 * (v.at(a) + v.at(b)))))
        .collect();
    Ok(Form { degree: 1, kind: Kind::Primal, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{flat, integrate, integrate_boundary, volume_form, wedge};
    use crate::mesh::{annulus, periodic_square, unit_square};

    #[test]
    fn contraction_of_area_with_ex_is_dy() {
        let c = unit_square(6).unwrap();
        let u = vec![Vec2::new(1.0, 0.0); c.n_vertices()];
        let i = interior_product(&c, &u, &volume_form(&c)).unwrap();
        for e in 0..c.n_edges() {
            assert!((i.values[e] - c.edge_vector(e).y).abs() < 1e-15);
        }
    }

    #[test]
    fn top_contraction_equals_star_wedge_flux() {
        let c = annulus(0.5, 1.5, 16).unwrap();
        let h = Form::primal(&c, 2, (0..c.n_triangles()).map(|t| (t as f64 * 0.7).sin() * c.triangle_area(t)).collect()).unwrap();
        let u: Vec<Vec2> = c.vertices().iter().map(|x| Vec2::new(x.y.cos(), x.x * x.y)).collect();
        let a = interior_product_top(&c, &u, &h).unwrap();
        let b = wedge(&c, &star_vertex(&c, &h).unwrap(), &flat_star(&c, &u)).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn double_contraction_vanishes() {
        let c = periodic_square(8, 1.0).unwrap();
        let u = vec![Vec2::new(0.4, -0.9); c.n_vertices()];
        let h = volume_form(&c).scaled(2.5);
        let once = interior_product(&c, &u, &h).unwrap();
        let twice = interior_product(&c, &u, &once).unwrap();
        assert!(twice.max_abs() < 1e-12);
    }

    #[test]
    fn lie_of_volume_under_uniform_flow() {
        let c = unit_square(8).unwrap();
        let u = vec![Vec2::new(0.3, 0.7); c.n_vertices()];
        let l = lie_derivative(&c, &u, &volume_form(&c)).unwrap();
        assert!(l.max_abs() < 1e-10);
        let z = lie_derivative(&c, &vec![Vec2::zeros(); c.n_vertices()], &flat(&c, &u)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn unit_contraction_gives_measure() {
        let c = unit_square(4).unwrap();
        let comp = c.component("bottom").unwrap();
        let sigma = BoundaryField {
            component: "bottom".into(),
            valence: Valence::Covector,
            cells: comp.edges.clone(),
            values: comp.edges.iter().map(|&e| Vec2::new(c.edge_length(e), 0.0)).collect(),
        };
        let nu = partial_trace_vector(&c, &TensorForm::vector_field(&vec![Vec2::new(1.0, 0.0); c.n_vertices()]), "bottom").unwrap();
        let w = dot_wedge(&c, &sigma, &nu).unwrap();
        for (&e, v) in w.edges.iter().zip(&w.values) {
            assert!((v - c.edge_length(e)).abs() < 1e-15);
        }
        assert!((integrate_boundary(&w) - 1.0).abs() < 1e-14);
        let ortho = partial_trace_vector(&c, &TensorForm::vector_field(&vec![Vec2::new(0.0, 1.0); c.n_vertices()]), "bottom").unwrap();
        assert_eq!(dot_wedge(&c, &sigma, &ortho).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn interior_support_has_zero_trace() {
        let c = unit_square(5).unwrap();
        let mut s = TensorForm::zeros(&c, Valence::Covector, 1);
        for e in 0..c.n_edges() {
            if !c.is_boundary_edge(e) {
                s.comps[0][e] = 1.0;
                s.comps[1][e] = -2.0;
            }
        }
        for comp in ["bottom", "top", "left", "right"] {
            assert_eq!(partial_trace(&c, &s, comp).unwrap().max_abs(), 0.0);
        }
        assert!(matches!(partial_trace(&c, &s, "inner"), Err(Error::UnknownComponent(_))));
    }

    #[test]
    fn volume_integral() {
        let c = unit_square(9).unwrap();
        assert!((integrate(&c, &volume_form(&c)).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(integrate(&c, &Form::zeros(&c, 2, Kind::Primal)).unwrap(), 0.0);
        assert!(integrate(&c, &Form::zeros(&c, 1, Kind::Primal)).is_err());
    }
}
