use super::{BoundaryForm, Form, Kind};
use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

/// Exterior derivative. On primal forms it is the coboundary; on dual forms
/// it is the signed transpose of the primal incidence.
pub fn d(c: &SimplicialComplex, a: &Form) -> Result<Form> {
    let check = |n: usize| -> Result<()> {
        if a.len() != n {
            return Err(Error::Degree(format!("form has {} values, expected {n}", a.len())));
        }
        Ok(())
    };
    let x = &a.values;
    match (a.kind, a.degree) {
        (Kind::Primal, 0) => {
            check(c.n_vertices())?;
            let v = c.edges().iter().map(|&[p, q]| x[q] - x[p]).collect();
            Ok(Form { degree: 1, kind: Kind::Primal, values: v })
        }
        (Kind::Primal, 1) => {
            check(c.n_edges())?;
            let v = (0..c.n_triangles())
                .map(|t| c.tri_edges(t).iter().map(|&(e, s)| s as f64 * x[e]).sum())
                .collect();
            Ok(Form { degree: 2, kind: Kind::Primal, values: v })
        }
        (Kind::Dual, 0) => {
            check(c.n_triangles())?;
            let mut v = vec![0.0; c.n_edges()];
            for t in 0..c.n_triangles() {
                for &(e, s) in c.tri_edges(t) {
                    v[e] += s as f64 * x[t];
                }
            }
            Ok(Form { degree: 1, kind: Kind::Dual, values: v })
        }
        (Kind::Dual, 1) => {
            check(c.n_edges())?;
            let mut v = vec![0.0; c.n_vertices()];
            for (e, &[p, q]) in c.edges().iter().enumerate() {
                v[p] += x[e];
                v[q] -= x[e];
            }
            Ok(Form { degree: 2, kind: Kind::Dual, values: v })
        }
        (_, k) => Err(Error::Degree(format!("no exterior derivative of a {k}-form in dimension 2"))),
    }
}

/// Diagonal Hodge star. Primal k-forms map to dual (2-k)-forms and back, with
/// the sign chosen so that applying it twice gives `(-1)^{k(2-k)}`.
pub fn hodge_star(c: &SimplicialComplex, a: &Form) -> Result<Form> {
    if a.degree > 2 {
        return Err(Error::Degree(format!("degree {} exceeds the dimension 2", a.degree)));
    }
    match a.kind {
        Kind::Primal => {
            let k = a.degree;
            let v = a
                .values
                .iter()
                .enumerate()
                .map(|(i, x)| x * c.dual_measure(k, i) / c.primal_measure(k, i))
                .collect();
            Ok(Form { degree: 2 - k, kind: Kind::Dual, values: v })
        }
        Kind::Dual => {
            let k = 2 - a.degree;
            let sign = if k == 1 { -1.0 } else { 1.0 };
            let v = a
                .values
                .iter()
                .enumerate()
                .map(|(i, x)| sign * x * c.primal_measure(k, i) / c.dual_measure(k, i))
                .collect();
            Ok(Form { degree: k, kind: Kind::Primal, values: v })
        }
    }
}

/// The discrete volume form: triangle areas.
pub fn volume_form(c: &SimplicialComplex) -> Form {
    Form { degree: 2, kind: Kind::Primal, values: (0..c.n_triangles()).map(|t| c.triangle_area(t)).collect() }
}

fn average_over(c: &SimplicialComplex, f: &[f64], k: usize, i: usize) -> f64 {
    match k {
        0 => f[i],
        1 => {
            let [a, b] = c.edges()[i];
            0.5 * (f[a] + f[b])
        }
        _ => {
            let [a, b, d] = c.triangles()[i];
            (f[a] + f[b] + f[d]) / 3.0
        }
    }
}

/// Wedge product of primal forms. A 0-form factor is averaged over the
/// vertices of each cell; two 1-forms use the antisymmetrised cup product.
pub fn wedge(c: &SimplicialComplex, a: &Form, b: &Form) -> Result<Form> {
    if a.kind != Kind::Primal || b.kind != Kind::Primal {
        return Err(Error::Degree("wedge is defined for primal forms".into()));
    }
    let k = a.degree + b.degree;
    if k > 2 {
        return Err(Error::Degree(format!("wedge of degrees {} and {} overflows dimension 2", a.degree, b.degree)));
    }
    if a.len() != c.n_cells(a.degree) || b.len() != c.n_cells(b.degree) {
        return Err(Error::Degree("form length does not match the complex".into()));
    }
    let values = match (a.degree, b.degree) {
        (0, q) => (0..c.n_cells(q)).map(|i| average_over(c, &a.values, q, i) * b.values[i]).collect(),
        (p, 0) => (0..c.n_cells(p)).map(|i| a.values[i] * average_over(c, &b.values, p, i)).collect(),
        _ => (0..c.n_triangles()).map(|t| cup11(c, t, &a.values, &b.values)).collect(),
    };
    Ok(Form { degree: k, kind: Kind::Primal, values })
}

fn cup11(c: &SimplicialComplex, t: usize, a: &[f64], b: &[f64]) -> f64 {
    // oriented value on the local edge from vertex i to vertex j
    let te = c.tri_edges(t);
    let val = |f: &[f64], i: usize, j: usize| -> f64 {
        if (i + 1) % 3 == j {
            te[i].1 as f64 * f[te[i].0]
        } else {
            -(te[j].1 as f64) * f[te[j].0]
        }
    };
    const PERMS: [([usize; 3], f64); 6] =
        [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0), ([1, 0, 2], -1.0)];
    PERMS.iter().map(|(p, s)| s * val(a, p[0], p[1]) * val(b, p[1], p[2])).sum::<f64>() / 6.0
}

/// Natural pairing of a primal k-form with a dual (2-k)-form.
pub fn pair(a: &Form, b: &Form) -> Result<f64> {
    if a.kind != Kind::Primal || b.kind != Kind::Dual || a.degree + b.degree != 2 || a.len() != b.len() {
        return Err(Error::Degree("pairing needs a primal k-form and a dual (2-k)-form".into()));
    }
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum())
}

/// Integral of a top-degree form over the complex.
/// Circulation of a vector field along every edge (3-point Gauss rule).
pub fn circulation(c: &SimplicialComplex, f: impl Fn(Vec2) -> Vec2) -> Form {
    let gp = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    let values = (0..c.n_edges())
        .map(|e| {
            let t = c.edge_vector(e);
            let m = c.edge_midpoint(e);
            gp.iter().map(|&(s, w)| 0.5 * w * f(m + t * (0.5 * s)).dot(&t)).sum()
        })
        .collect();
    Form { degree: 1, kind: Kind::Primal, values }
}

pub fn integrate(c: &SimplicialComplex, a: &Form) -> Result<f64> {
    let top = match a.kind {
        Kind::Primal => a.degree == 2 && a.len() == c.n_triangles(),
        Kind::Dual => a.degree == 2 && a.len() == c.n_vertices(),
    };
    if !top {
        return Err(Error::Degree(format!("cannot integrate a {}-form over a 2-complex", a.degree)));
    }
    Ok(a.values.iter().sum())
}

/// Integral of a 1-form over a boundary component.
pub fn integrate_boundary(b: &BoundaryForm) -> f64 {
    b.values.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{annulus, periodic_square, unit_square};
    use crate::Vec2;

    #[test]
    fn d_of_coordinate_is_endpoint_difference() {
        let c = unit_square(5).unwrap();
        let x = Form::sample0(&c, |p| p.x);
        let dx = d(&c, &x).unwrap();
        for (e, &[a, b]) in c.edges().iter().enumerate() {
            assert_eq!(dx.values[e], c.vertex(b).x - c.vertex(a).x);
        }
        let dd = d(&c, &dx).unwrap();
        assert!(dd.max_abs() < 1e-16);
        assert!(d(&c, &dd).is_err());
    }

    #[test]
    fn dual_dd_vanishes() {
        let c = annulus(0.5, 1.5, 12).unwrap();
        let f = Form { degree: 0, kind: Kind::Dual, values: (0..c.n_triangles()).map(|t| (t as f64).sin()).collect() };
        let g = d(&c, &d(&c, &f).unwrap()).unwrap();
        assert!(g.max_abs() < 1e-14);
    }

    #[test]
    fn star_star_sign() {
        let c = unit_square(4).unwrap();
        for k in 0..=2 {
            let a = Form::primal(&c, k, (0..c.n_cells(k)).map(|i| 1.0 + i as f64).collect()).unwrap();
            let b = hodge_star(&c, &hodge_star(&c, &a).unwrap()).unwrap();
            let s = if k == 1 { -1.0 } else { 1.0 };
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((s * x - y).abs() < 1e-12 * x.abs());
            }
        }
    }

    #[test]
    fn star_of_one_is_area() {
        let v = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let opts = crate::mesh::BuildOptions { require_well_centered: false, ..Default::default() };
        let c = SimplicialComplex::build(v, &[[0, 1, 2]], opts).unwrap();
        let one = Form { degree: 0, kind: Kind::Dual, values: vec![1.0] };
        let s = hodge_star(&c, &one).unwrap();
        assert_eq!(s.values, vec![0.5]);
    }

    #[test]
    fn wedge_unit() {
        let c = periodic_square(8, 1.0).unwrap();
        let one = Form::sample0(&c, |_| 1.0);
        let a = Form::primal(&c, 1, (0..c.n_edges()).map(|i| (i as f64 * 0.3).cos()).collect()).unwrap();
        assert_eq!(wedge(&c, &one, &a).unwrap(), a);
        assert!(wedge(&c, &a, &volume_form(&c)).is_err());
    }

    #[test]
    fn dx_wedge_dy_integrates_to_area() {
        let c = unit_square(7).unwrap();
        let dx = d(&c, &Form::sample0(&c, |p| p.x)).unwrap();
        let dy = d(&c, &Form::sample0(&c, |p| p.y)).unwrap();
        let w = wedge(&c, &dx, &dy).unwrap();
        assert!((integrate(&c, &w).unwrap() - 1.0).abs() < 1e-13);
        for t in 0..c.n_triangles() {
            assert!((w.values[t] - c.triangle_area(t)).abs() < 1e-15);
        }
    }
}
