//! Rigid body kinematics on SE(3) and the body's port-Hamiltonian dynamics.
//!
//! Twists are ordered `(omega, v)`, wrenches `(tau, f)`, momenta
//! `(p_omega, p_v)`. The gravity vector `g` points *against* gravitational
//! acceleration, so standard gravity is `(0, 0, 9.81)`.

use nalgebra::{Matrix3, Matrix6, Vector6};

use crate::{Error, Result, Vec3};

pub type Vec6 = Vector6<f64>;

pub fn hat(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat`] on the skew part of `m`.
pub fn vee(m: &Matrix3<f64>) -> Vec3 {
    Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5
}

/// Rodrigues formula for `exp(hat(w))`.
pub fn exp_so3(w: &Vec3) -> Matrix3<f64> {
    let th2 = w.norm_squared();
    let th = th2.sqrt();
    let k = hat(w);
    let (a, b) = if th < 1e-6 {
        (1.0 - th2 / 6.0 + th2 * th2 / 120.0, 0.5 - th2 / 24.0 + th2 * th2 / 720.0)
    } else {
        (th.sin() / th, (1.0 - th.cos()) / th2)
    };
    Matrix3::identity() + k * a + k * k * b
}

fn orthogonality_defect(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).amax()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub r: Matrix3<f64>,
    pub xi: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose { r: Matrix3::identity(), xi: Vec3::zeros() }
    }

    pub fn new(r: Matrix3<f64>, xi: Vec3) -> Result<Self> {
        let p = Pose { r, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.iter().chain(self.xi.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("pose".into()));
        }
        let defect = orthogonality_defect(&self.r);
        if defect > 1e-10 || self.r.determinant() <= 0.0 {
            return Err(Error::InvalidPose(format!("rotation defect {defect:e}")));
        }
        Ok(())
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose { r: self.r * other.r, xi: self.xi + self.r * other.xi }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.r.transpose();
        Pose { r: rt, xi: -(rt * self.xi) }
    }

    /// Action on a point: `R q + xi`.
    pub fn apply(&self, q: &Vec3) -> Vec3 {
        self.r * q + self.xi
    }

    pub fn homogeneous(&self) -> nalgebra::Matrix4<f64> {
        let mut m = nalgebra::Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.r);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.xi);
        m
    }

    /// Nearest rotation by polar decomposition.
    fn reproject(&mut self) {
        let svd = self.r.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut r = u * vt;
        if r.determinant() < 0.0 {
            let mut u2 = u;
            u2.column_mut(2).neg_mut();
            r = u2 * vt;
        }
        self.r = r;
    }
}

/// Adjoint action mapping body twists to inertial twists.
pub fn adjoint(h: &Pose) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&h.r);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&(hat(&h.xi) * h.r));
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&h.r);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Body,
    Inertial,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Body => "body",
            Frame::Inertial => "inertial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub frame: Frame,
    pub v: Vec6,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub frame: Frame,
    pub v: Vec6,
}

impl Twist {
    pub fn omega(&self) -> Vec3 {
        self.v.fixed_rows::<3>(0).into()
    }
    pub fn linear(&self) -> Vec3 {
        self.v.fixed_rows::<3>(3).into()
    }
    pub fn to_inertial(&self, h: &Pose) -> Result<Twist> {
        expect(self.frame, Frame::Body)?;
        Ok(Twist { frame: Frame::Inertial, v: adjoint(h) * self.v })
    }
}

impl Wrench {
    pub fn zero(frame: Frame) -> Self {
        Wrench { frame, v: Vec6::zeros() }
    }
    pub fn torque(&self) -> Vec3 {
        self.v.fixed_rows::<3>(0).into()
    }
    pub fn force(&self) -> Vec3 {
        self.v.fixed_rows::<3>(3).into()
    }
    pub fn to_body(&self, h: &Pose) -> Result<Wrench> {
        expect(self.frame, Frame::Inertial)?;
        Ok(Wrench { frame: Frame::Body, v: adjoint(h).transpose() * self.v })
    }
}

pub fn pairing(w: &Wrench, t: &Twist) -> Result<f64> {
    expect(w.frame, t.frame)?;
    Ok(w.v.dot(&t.v))
}

fn expect(got: Frame, want: Frame) -> Result<()> {
    if got != want {
        return Err(Error::Frame { expected: want.name(), got: got.name() });
    }
    Ok(())
}

/// Skew matrix of the Lie-Poisson structure at momentum `p`.
pub fn jmatrix(p: &Vec6) -> Matrix6<f64> {
    let pw = hat(&p.fixed_rows::<3>(0).into());
    let pv = hat(&p.fixed_rows::<3>(3).into());
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&pw);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&pv);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&pv);
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidBodyState {
    pub h: Pose,
    pub p: Vec6,
    pub inertia: Matrix6<f64>,
    pub inv_inertia: Matrix6<f64>,
    pub mass: f64,
    pub g: Vec3,
}

impl RigidBodyState {
    pub fn new(h: Pose, p: Vec6, inertia: Matrix6<f64>, mass: f64, g: Vec3) -> Result<Self> {
        h.validate()?;
        if (inertia - inertia.transpose()).amax() > 1e-12 * inertia.amax() {
            return Err(Error::InvalidPose("inertia is not symmetric".into()));
        }
        let chol = inertia
            .cholesky()
            .ok_or_else(|| Error::InvalidPose("inertia is not positive definite".into()))?;
        Ok(RigidBodyState { h, p, inertia, inv_inertia: chol.inverse(), mass, g })
    }

    /// Body with principal moments `j` and mass `m`, at rest with pose `h`.
    pub fn principal(h: Pose, j: Vec3, mass: f64, g: Vec3) -> Result<Self> {
        let mut inertia = Matrix6::zeros();
        for i in 0..3 {
            inertia[(i, i)] = j[i];
            inertia[(i + 3, i + 3)] = mass;
        }
        Self::new(h, Vec6::zeros(), inertia, mass, g)
    }

    pub fn twist(&self) -> Twist {
        Twist { frame: Frame::Body, v: self.inv_inertia * self.p }
    }

    pub fn p_omega(&self) -> Vec3 {
        self.p.fixed_rows::<3>(0).into()
    }

    pub fn p_v(&self) -> Vec3 {
        self.p.fixed_rows::<3>(3).into()
    }
}

pub fn kinetic_energy(s: &RigidBodyState) -> f64 {
    0.5 * s.p.dot(&(s.inv_inertia * s.p))
}

pub fn hamiltonian_b(s: &RigidBodyState) -> f64 {
    kinetic_energy(s) + s.mass * s.g.dot(&s.h.xi)
}

/// Differential of the Hamiltonian with respect to the pose, as the pair
/// `(dH/dR, dH/dxi)`.
pub fn pose_gradient(s: &RigidBodyState) -> (Matrix3<f64>, Vec3) {
    (Matrix3::zeros(), s.g * s.mass)
}

/// Tangent map from a body twist to `(Rdot, xidot)`.
pub fn chi(h: &Pose, t: &Vec6) -> (Matrix3<f64>, Vec3) {
    let w: Vec3 = t.fixed_rows::<3>(0).into();
    let v: Vec3 = t.fixed_rows::<3>(3).into();
    (h.r * hat(&w), h.r * v)
}

/// Dual of [`chi`]: a wrench `W` with `<W|T> = <gamma|chi(T)>` for all `T`,
/// where the pose covector pairs with the Frobenius inner product.
pub fn chi_star(h: &Pose, gamma: &(Matrix3<f64>, Vec3)) -> Vec6 {
    let a = gamma.0.transpose() * h.r;
    let tau = Vec3::new(a[(1, 2)] - a[(2, 1)], a[(2, 0)] - a[(0, 2)], a[(0, 1)] - a[(1, 0)]);
    let f = h.r.transpose() * gamma.1;
    let mut w = Vec6::zeros();
    w.fixed_rows_mut::<3>(0).copy_from(&tau);
    w.fixed_rows_mut::<3>(3).copy_from(&f);
    w
}

/// Gravity wrench in the body frame: zero torque, force `-m R^T g`.
pub fn gravity_wrench(s: &RigidBodyState) -> Wrench {
    Wrench { frame: Frame::Body, v: -chi_star(&s.h, &pose_gradient(s)) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidRates {
    pub r_dot: Matrix3<f64>,
    pub xi_dot: Vec3,
    pub p_dot: Vec6,
    pub twist: Twist,
}

pub fn rigid_rhs(s: &RigidBodyState, w: &Wrench) -> Result<RigidRates> {
    expect(w.frame, Frame::Body)?;
    let t = s.inv_inertia * s.p;
    let (r_dot, xi_dot) = chi(&s.h, &t);
    let p_dot = gravity_wrench(s).v + jmatrix(&s.p) * t + w.v;
    Ok(RigidRates { r_dot, xi_dot, p_dot, twist: Twist { frame: Frame::Body, v: t } })
}

/// Inverse differential of the exponential for the body-frame update
/// `R = R0 exp(hat(theta))`, truncated after the terms needed for fourth order.
fn dexp_inv(theta: &Vec3, w: &Vec3) -> Vec3 {
    let c = theta.cross(w);
    w + 0.5 * c + theta.cross(&c) / 12.0
}

/// One fourth-order Runge-Kutta-Munthe-Kaas step under a constant body
/// wrench. Rotations stay on SO(3) via the exponential map.
pub fn step_rigid(s: &RigidBodyState, w: &Wrench, dt: f64) -> Result<RigidBodyState> {
    expect(w.frame, Frame::Body)?;
    if !(dt >= 0.0) {
        return Err(Error::NonFinite(format!("time step {dt}")));
    }
    if dt == 0.0 {
        return Ok(s.clone());
    }
    let r0 = s.h.r;
    let stage = |theta: &Vec3, dxi: &Vec3, dp: &Vec6| -> Result<(Vec3, Vec3, Vec6)> {
        let mut st = s.clone();
        st.h.r = r0 * exp_so3(theta);
        st.h.xi += dxi;
        st.p += dp;
        let k = rigid_rhs(&st, w)?;
        let omega = k.twist.omega();
        Ok((dexp_inv(theta, &omega) * dt, k.xi_dot * dt, k.p_dot * dt))
    };
    let z3 = Vec3::zeros();
    let (a1, x1, p1) = stage(&z3, &z3, &Vec6::zeros())?;
    let (a2, x2, p2) = stage(&(a1 * 0.5), &(x1 * 0.5), &(p1 * 0.5))?;
    let (a3, x3, p3) = stage(&(a2 * 0.5), &(x2 * 0.5), &(p2 * 0.5))?;
    let (a4, x4, p4) = stage(&a3, &x3, &p3)?;
    let mut out = s.clone();
    out.h.r = r0 * exp_so3(&((a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0));
    out.h.xi += (x1 + 2.0 * x2 + 2.0 * x3 + x4) / 6.0;
    out.p += (p1 + 2.0 * p2 + 2.0 * p3 + p4) / 6.0;
    if orthogonality_defect(&out.h.r) > 1e-10 {
        out.h.reproject();
    }
    if !out.p.iter().chain(out.h.xi.iter()).all(|x| x.is_finite()) {
        return Err(Error::NonFinite("rigid body state".into()));
    }
    Ok(out)
}

/// CSV header of the per-step state dump.
pub const STATE_HEADER: &str = "t,R11,R12,R13,R21,R22,R23,R31,R32,R33,xi1,xi2,xi3,p1,p2,p3,p4,p5,p6,H_b";

pub fn state_row(t: f64, s: &RigidBodyState) -> Vec<f64> {
    let mut row = vec![t];
    for i in 0..3 {
        for j in 0..3 {
            row.push(s.h.r[(i, j)]);
        }
    }
    row.extend(s.h.xi.iter());
    row.extend(s.p.iter());
    row.push(hamiltonian_b(s));
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rvec3(rng: &mut ChaCha8Rng) -> Vec3 {
        Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn rvec6(rng: &mut ChaCha8Rng) -> Vec6 {
        Vec6::from_fn(|_, _| rng.gen_range(-1.0..1.0))
    }

    fn rpose(rng: &mut ChaCha8Rng) -> Pose {
        Pose::new(exp_so3(&(rvec3(rng) * 3.0)), rvec3(rng) * 2.0).unwrap()
    }

    fn body(rng: &mut ChaCha8Rng) -> RigidBodyState {
        let mut s = RigidBodyState::principal(rpose(rng), Vec3::new(1.0, 2.0, 3.0), 2.0, Vec3::new(0.0, 0.0, 9.81)).unwrap();
        s.p = rvec6(rng);
        s
    }

    #[test]
    fn hat_matches_cross() {
        assert_eq!(hat(&Vec3::x()), Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0));
        assert_eq!(hat(&Vec3::zeros()), Matrix3::zeros());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (w, x) = (rvec3(&mut rng), rvec3(&mut rng));
            let h = hat(&w) * x;
            let c = Vec3::new(w.y * x.z - w.z * x.y, w.z * x.x - w.x * x.z, w.x * x.y - w.y * x.x);
            assert_eq!(h, c);
            assert!((vee(&hat(&w)) - w).norm() == 0.0);
        }
    }

    #[test]
    fn group_operations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (h1, h2) = (rpose(&mut rng), rpose(&mut rng));
            let a = rvec3(&mut rng);
            let c = h1.compose(&Pose { r: Matrix3::identity(), xi: a });
            assert!((c.xi - (h1.xi + h1.r * a)).norm() < 1e-15);
            let id = h1.compose(&h1.inverse());
            assert!((id.r - Matrix3::identity()).amax() < 1e-12 && id.xi.amax() < 1e-12);
            let hm = h1.homogeneous() * h2.homogeneous();
            assert!((h1.compose(&h2).homogeneous() - hm).amax() < 1e-13);
            let ad = adjoint(&h1.compose(&h2)) - adjoint(&h1) * adjoint(&h2);
            assert!(ad.amax() < 1e-12);
        }
        assert_eq!(adjoint(&Pose::identity()), Matrix6::identity());
    }

    #[test]
    fn adjoint_of_translation() {
        let xi = Vec3::new(0.3, -1.0, 2.0);
        let h = Pose::new(Matrix3::identity(), xi).unwrap();
        let t = Vec6::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let out = adjoint(&h) * t;
        let w = Vec3::new(1.0, 2.0, 3.0);
        let v = Vec3::new(4.0, 5.0, 6.0);
        assert_eq!(out.fixed_rows::<3>(0).into_owned(), w);
        assert!((out.fixed_rows::<3>(3).into_owned() - (xi.cross(&w) + v)).norm() < 1e-15);
    }

    #[test]
    fn jmatrix_skew() {
        assert_eq!(jmatrix(&Vec6::zeros()), Matrix6::zeros());
        let p = Vec6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(jmatrix(&p).fixed_view::<3, 3>(0, 0).into_owned(), hat(&Vec3::z()));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (p, q) = (rvec6(&mut rng), rvec6(&mut rng));
            let j = jmatrix(&p);
            assert_eq!(j + j.transpose(), Matrix6::zeros());
            assert!(((p.transpose() * j * q)[0] + (q.transpose() * j * p)[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_values_and_gradient() {
        let mut s = RigidBodyState::principal(Pose::identity(), Vec3::new(1.0, 1.0, 1.0), 2.0, Vec3::new(0.0, 0.0, 9.81)).unwrap();
        assert_eq!(hamiltonian_b(&s), 0.0);
        s.p = Vec6::new(0.0, 0.0, 0.0, 2.0, 0.0, 0.0);
        assert!((kinetic_energy(&s) - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = body(&mut rng);
        let grad = s.inv_inertia * s.p;
        for i in 0..6 {
            let eps = 1e-5;
            let (mut a, mut b) = (s.clone(), s.clone());
            a.p[i] += eps;
            b.p[i] -= eps;
            let fd = (hamiltonian_b(&a) - hamiltonian_b(&b)) / (2.0 * eps);
            assert!((fd - grad[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn gravity_duality() {
        let s0 = RigidBodyState::principal(Pose::identity(), Vec3::new(1.0, 1.0, 1.0), 3.0, Vec3::new(0.0, 0.0, 9.81)).unwrap();
        let w = gravity_wrench(&s0);
        assert_eq!(w.force(), Vec3::new(0.0, 0.0, -3.0 * 9.81));
        let mut free = s0.clone();
        free.mass = 0.0;
        assert_eq!(gravity_wrench(&free).v, Vec6::zeros());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let h = rpose(&mut rng);
            let t = rvec6(&mut rng);
            let gamma = (Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0)), rvec3(&mut rng));
            let (rd, xd) = chi(&h, &t);
            let lhs = chi_star(&h, &gamma).dot(&t);
            let rhs = gamma.0.component_mul(&rd).sum() + gamma.1.dot(&xd);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn steady_spin_about_principal_axis() {
        let mut s = RigidBodyState::principal(Pose::identity(), Vec3::new(1.0, 2.0, 3.0), 1.0, Vec3::zeros()).unwrap();
        s.p[2] = 3.0;
        let k = rigid_rhs(&s, &Wrench::zero(Frame::Body)).unwrap();
        assert_eq!(k.p_dot.fixed_rows::<3>(0).into_owned(), Vec3::zeros());
        let mut rest = s.clone();
        rest.p = Vec6::zeros();
        rest.mass = 0.0;
        let k = rigid_rhs(&rest, &Wrench::zero(Frame::Body)).unwrap();
        assert_eq!(k.p_dot, Vec6::zeros());
        assert_eq!(k.xi_dot, Vec3::zeros());
        assert_eq!(k.r_dot, Matrix3::zeros());
    }

    #[test]
    fn power_identity_along_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let s = body(&mut rng);
            let w = Wrench { frame: Frame::Body, v: rvec6(&mut rng) * 5.0 };
            let k = rigid_rhs(&s, &w).unwrap();
            let hdot = k.twist.v.dot(&k.p_dot) + s.mass * s.g.dot(&k.xi_dot);
            assert!((hdot - pairing(&w, &k.twist).unwrap()).abs() < 1e-12);
        }
        let s = body(&mut rng);
        assert!(rigid_rhs(&s, &Wrench::zero(Frame::Inertial)).is_err());
    }

    #[test]
    fn frame_conversion_commutes_with_stepping() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = body(&mut rng);
        let wv = Wrench { frame: Frame::Inertial, v: rvec6(&mut rng) };
        let wb = Wrench { frame: Frame::Body, v: adjoint(&s.h).transpose() * wv.v };
        let a = step_rigid(&s, &wv.to_body(&s.h).unwrap(), 1e-2).unwrap();
        let b = step_rigid(&s, &wb, 1e-2).unwrap();
        assert!((a.p - b.p).amax() < 1e-12);
        let tv = s.twist().to_inertial(&s.h).unwrap();
        assert!((pairing(&wv, &tv).unwrap() - pairing(&wb, &s.twist()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn zero_step_is_identity_and_rk4_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = body(&mut rng);
        let w = Wrench::zero(Frame::Body);
        assert_eq!(step_rigid(&s, &w, 0.0).unwrap(), s);
        let run = |n: usize| {
            let mut x = s.clone();
            for _ in 0..n {
                x = step_rigid(&x, &w, 0.5 / n as f64).unwrap();
            }
            x
        };
        let reference = run(1024);
        let e1 = (run(16).h.r - reference.h.r).amax() + (run(16).p - reference.p).amax();
        let e2 = (run(32).h.r - reference.h.r).amax() + (run(32).p - reference.p).amax();
        assert!(e1 / e2 > 12.0, "observed ratio {}", e1 / e2);
    }
}
