//! Randomized identity suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::coupling::{wrench_from_segments, ReconstructionMap};
use crate::forms::{
    d, dot_wedge, flat_star, interior_product_top, partial_trace, partial_trace_vector, scalar_to_covector, star_vertex, trace, wedge,
    BoundaryField, Form, Kind, TensorForm, Valence,
};
use crate::mesh::{annulus, unit_square, SimplicialComplex};
use crate::ports::{pair_carriers, AdjointMap, Carrier, Modulation, Pairing, Transformer};
use crate::rigidbody::{exp_so3, Pose};
use crate::{Result, Vec2, Vec3};

fn meshes() -> Result<Vec<SimplicialComplex>> {
    let mut out = vec![unit_square(8)?, annulus(0.5, 2.0, 24)?];
    // a mildly distorted square: interior vertices displaced
    let c = unit_square(6)?;
    let moved: Vec<Vec2> = c
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, x)| if c.is_boundary_vertex(v) { *x } else { x + 0.02 * Vec2::new((7.0 * x.y).sin(), (5.0 * x.x).cos()) })
        .collect();
    out.push(c.with_vertices(moved)?);
    Ok(out)
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec2 {
    Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn top_form(c: &SimplicialComplex, rng: &mut ChaCha8Rng) -> Form {
    Form { degree: 2, kind: Kind::Primal, values: (0..c.n_triangles()).map(|t| rng.gen_range(0.1..2.0) * c.triangle_area(t)).collect() }
}

/// Largest per-edge gap between `tr(i_v H)` and `ptr(T) . ptr(v)`, where
/// `T` is the covector density of `H`; and between `i_v H` and
/// `star H ^ flat_star v` on all edges.
fn contraction_gaps(c: &SimplicialComplex, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let h = top_form(c, rng);
    let u: Vec<Vec2> = (0..c.n_vertices()).map(|_| random_vec(rng)).collect();
    let iu = interior_product_top(c, &u, &h)?;
    let s = star_vertex(c, &h)?;
    let star_wedge = wedge(c, &s, &flat_star(c, &u))?;
    let top = iu.sub(&star_wedge)?.max_abs();
    let eff = scalar_to_covector(c, &s.values);
    let vel = TensorForm::vector_field(&u);
    let mut bnd = 0.0f64;
    for comp in c.components() {
        let a = trace(c, &iu, &comp.name)?;
        let b = dot_wedge(c, &partial_trace(c, &eff, &comp.name)?, &partial_trace_vector(c, &vel, &comp.name)?)?;
        for (x, y) in a.values.iter().zip(&b.values) {
            bnd = bnd.max((x - y).abs());
        }
    }
    Ok((bnd, top))
}

/// `(max |dd f|` on integer cochains, `max |dd f|` on real cochains, Stokes gap).
fn coboundary_gaps(c: &SimplicialComplex, rng: &mut ChaCha8Rng) -> Result<(f64, f64, f64)> {
    let int = Form { degree: 0, kind: Kind::Primal, values: (0..c.n_vertices()).map(|_| rng.gen_range(-1000..1000) as f64).collect() };
    let dd_int = d(c, &d(c, &int)?)?.max_abs();
    let real = Form { degree: 0, kind: Kind::Primal, values: (0..c.n_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let dual = Form { degree: 0, kind: Kind::Dual, values: (0..c.n_triangles()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let dd_real = d(c, &d(c, &real)?)?.max_abs().max(d(c, &d(c, &dual)?)?.max_abs());
    let a = Form { degree: 1, kind: Kind::Primal, values: (0..c.n_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let inside: f64 = d(c, &a)?.values.iter().sum();
    let mut around = 0.0;
    for comp in c.components() {
        around += comp.convention.sign() * trace(c, &a, &comp.name)?.values.iter().sum::<f64>();
    }
    Ok((dd_int, dd_real, (inside - around).abs()))
}

fn random6(rng: &mut ChaCha8Rng) -> [f64; 6] {
    std::array::from_fn(|_| rng.gen_range(-1.0..1.0))
}

/// Power defects of the frame change and the reconstruction map.
fn transformer_gaps(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let c = annulus(0.5, 2.0, 24)?;
    let map = ReconstructionMap::new(&c, "inner")?;
    let edges = map.edges.clone();
    let alpha = |rng: &mut ChaCha8Rng| {
        Carrier::Boundary(BoundaryField {
            component: "inner".into(),
            valence: Valence::Covector,
            cells: edges.clone(),
            values: edges.iter().map(|_| random_vec(rng)).collect(),
        })
    };
    let mut power = 0.0f64;
    for _ in 0..100 {
        let axis = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let h = Pose { r: exp_so3(&axis), xi: Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) };
        let ad = Transformer::new("ad", 0.0, Box::new(AdjointMap::new(&h)));
        let (e, f) = (Carrier::finite(&random6(rng)), Carrier::finite(&random6(rng)));
        power = power.max(ad.power_defect(0.0, &e, &f, None)?);
        let rec = Transformer::new("phi", 0.0, Box::new(map.clone()));
        power = power.max(rec.power_defect(0.0, &alpha(rng), &Carrier::finite(&random6(rng)), Some(&c))?);
    }
    let a = alpha(rng);
    let w = map.dual_apply(&a)?;
    let mut duality = 0.0f64;
    for i in 0..6 {
        let mut b = [0.0; 6];
        b[i] = 1.0;
        let lhs = pair_carriers(&a, &map.apply(&Carrier::finite(&b))?, Pairing::BoundaryDotWedge, Some(&c))?;
        let rhs = pair_carriers(&w, &Carrier::finite(&b), Pairing::FiniteDual, None)?;
        duality = duality.max((lhs - rhs).abs());
    }
    Ok((power, duality))
}

fn polygon_segments(n: usize) -> Vec<(Vec2, Vec2)> {
    let p = |k: usize| {
        let a = 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
        Vec2::new(a.cos(), a.sin())
    };
    (0..n)
        .map(|k| {
            let t = p(k + 1) - p(k);
            (0.5 * (p(k) + p(k + 1)), Vec2::new(t.y, -t.x))
        })
        .collect()
}

/// `(uniform pressure wrench / (p0 perimeter)`, linear pressure force error
/// at 256 segments, observed order from 128 to 256).
pub(crate) fn wrench_checks() -> (f64, f64, f64) {
    let p0 = 2.0;
    let segs = polygon_segments(256);
    let perimeter: f64 = segs.iter().map(|s| s.1.norm()).sum();
    let w = wrench_from_segments(&segs.iter().map(|(m, n)| (*m, -p0 * n)).collect::<Vec<_>>());
    let uniform = w.v.amax() / (p0 * perimeter);
    let err = |n: usize| {
        let f = wrench_from_segments(&polygon_segments(n).iter().map(|(m, nn)| (*m, -m.x * nn)).collect::<Vec<_>>()).force();
        ((f.x + std::f64::consts::PI).powi(2) + f.y.powi(2)).sqrt()
    };
    let (e128, e256) = (err(128), err(256));
    (uniform, e256, (e128 / e256).log2())
}

pub fn identity_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut bnd, mut top, mut dd_int, mut dd_real, mut stokes) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in meshes()? {
        for _ in 0..100 {
            let (b, t) = contraction_gaps(&c, &mut rng)?;
            bnd = bnd.max(b);
            top = top.max(t);
        }
        for _ in 0..20 {
            let (a, b, s) = coboundary_gaps(&c, &mut rng)?;
            dd_int = dd_int.max(a);
            dd_real = dd_real.max(b);
            stokes = stokes.max(s);
        }
    }
    let (power, duality) = transformer_gaps(&mut rng)?;
    let (uniform, linear, order) = wrench_checks();
    Ok(vec![
        Check::at_most("pairing identity tr(i_v H) = ptr(T).ptr(v)", bnd, 1e-12),
        Check::at_most("top form contraction i_v H = *H ^ flat_star v", top, 1e-14),
        Check::at_most("d d = 0 on integer cochains", dd_int, 0.0),
        Check::at_most("d d = 0 on real cochains", dd_real, 1e-14),
        Check::at_most("Stokes theorem", stokes, 1e-12),
        Check::at_most("transformer power preservation", power, 1e-12),
        Check::at_most("reconstruction duality on basis twists", duality, 1e-12),
        Check::at_most("uniform pressure wrench", uniform, 1e-12),
        Check::at_most("linear pressure force error", linear, 1e-3),
        Check::near("linear pressure force order", order, 2.0, 0.1),
    ])
}
