//! Fluid-structure interconnection: the reconstruction map from body twists
//! to boundary velocity fields, its dual (boundary tractions to wrenches),
//! the no-slip 1-junction and a partitioned stepper.

use serde::{Deserialize, Serialize};

use crate::fluid::{BoundaryPorts, Diagnostics, Fluid, FluidState, Geometry, MeshDrive, WallData};
use crate::forms::{BoundaryField, Valence};
use crate::mesh::{MeshMover, SimplicialComplex};
use crate::ports::{Carrier, Junction, JunctionKind, Modulation, Pairing, PowerPort};
use crate::rigidbody::{adjoint, exp_so3, rigid_rhs, step_rigid, Frame, Pose, RigidBodyState, Twist, Vec6, Wrench};
use crate::{Error, Result, Vec2, Vec3};

fn lift(x: Vec2) -> Vec3 {
    Vec3::new(x.x, x.y, 0.0)
}

fn planar(x: Vec3) -> Vec2 {
    Vec2::new(x.x, x.y)
}

/// Velocity `omega x q + v` of the points `q` under an inertial twist.
pub fn reconstruct(t: &Twist, points: &[Vec2]) -> Result<Vec<Vec2>> {
    if t.frame != Frame::Inertial {
        return Err(Error::Frame { expected: Frame::Inertial.name(), got: t.frame.name() });
    }
    let (w, v) = (t.omega(), t.linear());
    Ok(points.iter().map(|q| planar(w.cross(&lift(*q)) + v)).collect())
}

/// Inertial wrench of per-edge forces `alpha_e` acting at edge midpoints.
/// Its pairing with any twist equals the boundary pairing of `alpha` with the
/// reconstructed velocity, because that velocity is affine along each edge.
pub fn wrench_from_segments(segments: &[(Vec2, Vec2)]) -> Wrench {
    let (mut tau, mut force) = (Vec3::zeros(), Vec3::zeros());
    for (m, f) in segments {
        let (m, f) = (lift(*m), lift(*f));
        tau += m.cross(&f);
        force += f;
    }
    Wrench { frame: Frame::Inertial, v: Vec6::new(tau.x, tau.y, tau.z, force.x, force.y, force.z) }
}

pub fn wrench_from_traction(c: &SimplicialComplex, alpha: &BoundaryField) -> Result<Wrench> {
    if alpha.valence != Valence::Covector {
        return Err(Error::Valence("wrench needs a covector valued boundary form".into()));
    }
    let segs: Vec<(Vec2, Vec2)> = alpha.cells.iter().zip(&alpha.values).map(|(&e, f)| (c.edge_midpoint(e), *f)).collect();
    Ok(wrench_from_segments(&segs))
}

/// The reconstruction map of one boundary component frozen at a time tag.
#[derive(Debug, Clone)]
pub struct ReconstructionMap {
    pub component: String,
    pub vertices: Vec<usize>,
    pub points: Vec<Vec2>,
    pub edges: Vec<usize>,
    pub midpoints: Vec<Vec2>,
}

impl ReconstructionMap {
    pub fn new(c: &SimplicialComplex, component: &str) -> Result<Self> {
        let comp = c.component(component)?;
        Ok(ReconstructionMap {
            component: component.into(),
            vertices: comp.vertices.clone(),
            points: comp.vertices.iter().map(|&v| c.vertex(v)).collect(),
            edges: comp.edges.clone(),
            midpoints: comp.edges.iter().map(|&e| c.edge_midpoint(e)).collect(),
        })
    }

    pub fn field(&self, t: &Twist) -> Result<BoundaryField> {
        Ok(BoundaryField {
            component: self.component.clone(),
            valence: Valence::Vector,
            cells: self.vertices.clone(),
            values: reconstruct(t, &self.points)?,
        })
    }
}

fn six(c: &Carrier) -> Result<Vec6> {
    match c {
        Carrier::Finite(v) if v.len() == 6 => Ok(Vec6::from_column_slice(v.as_slice())),
        _ => Err(Error::Carrier("expected a 6-vector".into())),
    }
}

impl Modulation for ReconstructionMap {
    fn apply(&self, flow: &Carrier) -> Result<Carrier> {
        let t = Twist { frame: Frame::Inertial, v: six(flow)? };
        Ok(Carrier::Boundary(self.field(&t)?))
    }

    fn dual_apply(&self, effort: &Carrier) -> Result<Carrier> {
        match effort {
            Carrier::Boundary(a) if a.valence == Valence::Covector && a.cells == self.edges => {
                let segs: Vec<_> = self.midpoints.iter().copied().zip(a.values.iter().copied()).collect();
                Ok(Carrier::finite(wrench_from_segments(&segs).v.as_slice()))
            }
            _ => Err(Error::Carrier(format!("expected a covector field on '{}'", self.component))),
        }
    }

    fn input_pairing(&self) -> Pairing {
        Pairing::FiniteDual
    }

    fn output_pairing(&self) -> Pairing {
        Pairing::BoundaryDotWedge
    }
}

/// Set the walls of `component` to the rigid motion of the body: velocity
/// `omega x (q - xi) + xi_dot`, and its rate of change following the mesh
/// vertices, which move with velocity `u`. `wrench` is the body frame fluid
/// wrench that drives the body acceleration.
pub fn no_slip_apply(
    c: &SimplicialComplex,
    u: &[Vec2],
    wall: &mut WallData,
    component: &str,
    body: &RigidBodyState,
    wrench: &Wrench,
) -> Result<()> {
    let k = kinematics(body, wrench)?;
    k.assign(c, u, wall, component)
}

/// Inertial rigid kinematics of the body at one instant.
#[derive(Debug, Clone, Copy)]
pub struct Kinematics {
    pub xi: Vec3,
    pub omega: Vec3,
    pub omega_dot: Vec3,
    pub xi_dot: Vec3,
    pub xi_ddot: Vec3,
}

impl Kinematics {
    pub fn velocity(&self, q: Vec2) -> Vec2 {
        // same arithmetic as `reconstruct`, so traces agree bit for bit
        planar(self.omega.cross(&lift(q)) + (self.xi_dot - self.omega.cross(&self.xi)))
    }

    /// Material acceleration of the body point at `q`.
    pub fn acceleration(&self, q: Vec2) -> Vec2 {
        let r = lift(q) - self.xi;
        planar(self.omega_dot.cross(&r) + self.omega.cross(&self.omega.cross(&r)) + self.xi_ddot)
    }

    /// Rate of change of the body velocity field seen from a point at `q`
    /// moving with velocity `u`. Equals [`Self::acceleration`] when `u` is
    /// the body velocity at `q`.
    pub fn rate_along(&self, q: Vec2, u: Vec2) -> Vec2 {
        let r = lift(q) - self.xi;
        planar(self.omega_dot.cross(&r) + self.omega.cross(&(lift(u) - self.xi_dot)) + self.xi_ddot)
    }

    pub fn assign(&self, c: &SimplicialComplex, u: &[Vec2], wall: &mut WallData, component: &str) -> Result<()> {
        wall.set_component(c, component, |v| self.velocity(c.vertex(v)), |v| self.rate_along(c.vertex(v), u[v]))
    }

    pub fn twist(&self) -> Twist {
        let mut v = Vec6::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.omega);
        v.fixed_rows_mut::<3>(3).copy_from(&(self.xi_dot - self.omega.cross(&self.xi)));
        Twist { frame: Frame::Inertial, v }
    }
}

pub fn kinematics(body: &RigidBodyState, wrench: &Wrench) -> Result<Kinematics> {
    let r = rigid_rhs(body, wrench)?;
    let tb = r.twist.v;
    let tb_dot = body.inv_inertia * r.p_dot;
    let (wb, vb): (Vec3, Vec3) = (tb.fixed_rows::<3>(0).into(), tb.fixed_rows::<3>(3).into());
    let (wd, vd): (Vec3, Vec3) = (tb_dot.fixed_rows::<3>(0).into(), tb_dot.fixed_rows::<3>(3).into());
    let rot = body.h.r;
    Ok(Kinematics {
        xi: body.h.xi,
        omega: rot * wb,
        omega_dot: rot * wd,
        xi_dot: rot * vb,
        xi_ddot: rot * (wb.cross(&vb) + vd),
    })
}

/// Surface stress on the body: the negated wall traction on the fluid, per
/// edge of `component`. The kinetic part of the fluid boundary efforts is
/// excluded, so `alpha + e1 + e2 = 0` on every edge.
pub fn effort_constraint(c: &SimplicialComplex, d: &Diagnostics, component: &str) -> Result<BoundaryField> {
    let comp = c.component(component)?;
    Ok(BoundaryField {
        component: component.into(),
        valence: Valence::Covector,
        cells: comp.edges.clone(),
        values: comp.edges.iter().map(|&e| -d.traction[e]).collect(),
    })
}

/// The no-slip 1-junction between the body port and the two fluid ports on
/// the body boundary.
pub fn no_slip_junction(alpha: &BoundaryField, gamma: &BoundaryField, ports: &BoundaryPorts, component: &str) -> Result<Junction> {
    let (p1, p2) = ports
        .body
        .iter()
        .find(|(a, _)| a.name.starts_with(&format!("{component}:")))
        .ok_or_else(|| Error::UnknownComponent(component.into()))?;
    let body = PowerPort::new("body", Carrier::Boundary(alpha.clone()), Carrier::Boundary(gamma.clone()), Pairing::BoundaryDotWedge, 1.0);
    Ok(Junction { kind: JunctionKind::One, ports: vec![body, p1.clone(), p2.clone()] })
}

/// Body motion given as a function of time: translation
/// `xi(t) = amplitude sin(frequency t)` and a constant spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prescribed {
    pub amplitude: [f64; 2],
    pub frequency: f64,
    #[serde(default)]
    pub spin: f64,
    /// Constant drift velocity added to the oscillation.
    #[serde(default)]
    pub drift: [f64; 2],
}

impl Prescribed {
    pub fn pose(&self, t: f64) -> Pose {
        let s = (self.frequency * t).sin();
        let xi = Vec3::new(self.amplitude[0] * s + self.drift[0] * t, self.amplitude[1] * s + self.drift[1] * t, 0.0);
        Pose { r: exp_so3(&Vec3::new(0.0, 0.0, self.spin * t)), xi }
    }

    pub fn kinematics(&self, t: f64) -> Kinematics {
        let (s, co) = (self.frequency * t).sin_cos();
        let f = self.frequency;
        let a = Vec3::new(self.amplitude[0], self.amplitude[1], 0.0);
        Kinematics {
            xi: self.pose(t).xi,
            omega: Vec3::new(0.0, 0.0, self.spin),
            omega_dot: Vec3::zeros(),
            xi_dot: a * (f * co) + Vec3::new(self.drift[0], self.drift[1], 0.0),
            xi_ddot: -a * (f * f * s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Two-way coupling.
    Free,
    /// Body motion imposed, fluid wrench only recorded.
    Prescribed(Prescribed),
    /// Body moves the fluid but feels no fluid force.
    OneWay,
}

#[derive(Debug, Clone)]
pub struct CouplingState {
    pub t: f64,
    pub fluid: FluidState,
    pub body: RigidBodyState,
    /// Geometry the fluid state lives on, with the mesh velocity of the
    /// step that produced it.
    pub geo: Geometry,
    /// Fluid wrench on the body, body frame, at time `t`.
    pub wrench: Wrench,
    pub walls: WallData,
    /// Time tag of the reconstruction map currently in use.
    pub tag: f64,
}

/// Per-step record of the coupled exchange.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub diagnostics: Diagnostics,
    /// Power delivered by the fluid to the body, `<W^b | T^b>`.
    pub body_power: f64,
    /// `sum_e alpha_e . gamma_e` on the body boundary.
    pub boundary_power: f64,
    /// Largest per-edge effort sum on the no-slip junction.
    pub junction_effort: f64,
    pub junction_flow: f64,
    /// `|e1.u + e2.v + alpha.v|` on the body, the advection cancellation.
    pub advection_defect: f64,
    pub subiteration_change: f64,
    pub div_inf: f64,
}

const INITIAL_ITERATIONS: usize = 200;

pub struct Coupling {
    pub fluid: Fluid,
    pub component: String,
    pub mover: MeshMover,
    /// Body boundary vertices in body coordinates.
    body_points: Vec<(usize, Vec2)>,
    pub mode: Mode,
    pub subiterations: usize,
    pub planar: bool,
}

fn planarize_wrench(w: &mut Wrench) {
    w.v[0] = 0.0;
    w.v[1] = 0.0;
    w.v[5] = 0.0;
}

fn planarize_body(b: &mut RigidBodyState) {
    b.p[0] = 0.0;
    b.p[1] = 0.0;
    b.p[5] = 0.0;
}

struct BodyDrive<'a> {
    cp: &'a Coupling,
    k1: Kinematics,
    t1: f64,
    pose1: Pose,
}

impl MeshDrive for BodyDrive<'_> {
    fn state(&self, mesh: &SimplicialComplex, _t: f64) -> Result<(Vec<Vec2>, WallData)> {
        self.cp.mesh_state(mesh, &self.k1)
    }

    fn settle(&self, mut pos: Vec<Vec2>, t: f64) -> Vec<Vec2> {
        if t == self.t1 {
            for &(v, q) in &self.cp.body_points {
                pos[v] = planar(self.pose1.apply(&lift(q)));
            }
        }
        pos
    }
}

impl Coupling {
    /// `fluid` carries the reference mesh; `body` must be at its reference
    /// pose relative to that mesh.
    pub fn new(fluid: Fluid, component: &str, body: &RigidBodyState, mode: Mode, subiterations: usize) -> Result<Self> {
        let c = fluid.mesh().clone();
        let comp = c.component(component)?;
        let inv = body.h.inverse();
        let body_points = comp.vertices.iter().map(|&v| (v, planar(inv.apply(&lift(c.vertex(v)))))).collect();
        Ok(Coupling {
            mover: MeshMover::new(c),
            fluid,
            component: component.into(),
            body_points,
            mode,
            subiterations: subiterations.max(1),
            planar: true,
        })
    }

    /// Mesh velocity (harmonic extension of the body velocity) and walls for
    /// a mesh configuration.
    fn mesh_state(&self, mesh: &SimplicialComplex, k: &Kinematics) -> Result<(Vec<Vec2>, WallData)> {
        let bd: Vec<(usize, Vec2)> = self.body_points.iter().map(|&(v, _)| (v, k.velocity(mesh.vertex(v)))).collect();
        let u = self.mover.extend(&bd)?;
        let mut w = WallData::from_bc(mesh, &self.fluid.bc)?;
        k.assign(mesh, &u, &mut w, &self.component)?;
        Ok((u, w))
    }

    fn body_kinematics(&self, body: &RigidBodyState, wrench: &Wrench, t: f64) -> Result<Kinematics> {
        match self.mode {
            Mode::Prescribed(p) => Ok(p.kinematics(t)),
            _ => kinematics(body, wrench),
        }
    }

    /// Initial coupled state: fluid velocity projected with the body walls.
    pub fn initial(&self, body: RigidBodyState, v: crate::forms::Form) -> Result<CouplingState> {
        let zero = Wrench::zero(Frame::Body);
        let k = self.body_kinematics(&body, &zero, 0.0)?;
        let mesh = self.fluid.mesh().clone();
        let (u, walls) = self.mesh_state(&mesh, &k)?;
        let geo = Geometry::moving(mesh, u)?;
        let mut values = v.values.clone();
        Fluid::project(&geo, &mut values, &walls)?;
        let fluid = FluidState::new(&geo.mesh, self.fluid.params.rho, 0.0, crate::forms::Form { values, ..v })?;
        let mut s = CouplingState { t: 0.0, fluid, body, geo, wrench: zero, walls, tag: 0.0 };
        // consistent initial wrench and wall acceleration; the added mass
        // makes this a fixed point, iterated to convergence since it runs once
        for it in 0..INITIAL_ITERATIONS.max(self.subiterations) {
            let d = self.fluid.diagnose(&s.geo, &s.fluid, &s.walls)?;
            let w = self.fluid_wrench(&s.geo, &d, &s.body)?;
            let change = (w.v - s.wrench.v).amax();
            s.wrench = w;
            if it >= self.subiterations && change <= 1e-14 * (1.0 + w.v.amax()) {
                break;
            }
            if !change.is_finite() || change > 1e12 * (1.0 + w.v.amax()) {
                return Err(Error::CouplingDiverged(change));
            }
            let k = self.body_kinematics(&s.body, &s.wrench, 0.0)?;
            let (u, walls) = self.mesh_state(&s.geo.mesh, &k)?;
            s.geo = Geometry::moving(s.geo.mesh.clone(), u)?;
            s.walls = walls;
        }
        Ok(s)
    }

    fn fluid_wrench(&self, geo: &Geometry, d: &Diagnostics, body: &RigidBodyState) -> Result<Wrench> {
        if matches!(self.mode, Mode::OneWay | Mode::Prescribed(_)) {
            return Ok(Wrench::zero(Frame::Body));
        }
        let alpha = effort_constraint(&geo.mesh, d, &self.component)?;
        let mut w = wrench_from_traction(&geo.mesh, &alpha)?.to_body(&body.h)?;
        if self.planar {
            planarize_wrench(&mut w);
        }
        Ok(w)
    }

    /// Wrench actually exerted by the fluid, regardless of mode.
    pub fn measured_wrench(&self, s: &CouplingState, d: &Diagnostics) -> Result<Wrench> {
        let alpha = effort_constraint(&s.geo.mesh, d, &self.component)?;
        wrench_from_traction(&s.geo.mesh, &alpha)?.to_body(&s.body.h)
    }

    /// One partitioned step with sub-iterations on the end-of-step wrench.
    pub fn step(&self, s: &CouplingState, dt: f64) -> Result<(CouplingState, StepRecord)> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::config("dt", "time step must be non-negative"));
        }
        if dt == 0.0 {
            let d = self.fluid.diagnose(&s.geo, &s.fluid, &s.walls)?;
            let rec = self.record(s, d, 0.0, 0.0)?;
            return Ok((s.clone(), rec));
        }
        let t1 = s.t + dt;
        let mut w_end = s.wrench;
        let mut last: Option<CouplingState> = None;
        let mut change = 0.0;
        let mut div_inf = 0.0;
        for it in 0..self.subiterations {
            let mut wavg = Wrench { frame: Frame::Body, v: 0.5 * (s.wrench.v + w_end.v) };
            if self.planar {
                planarize_wrench(&mut wavg);
            }
            let mut body = match self.mode {
                Mode::Prescribed(p) => {
                    let mut b = s.body.clone();
                    b.h = p.pose(t1);
                    let k = p.kinematics(t1);
                    let tb = adjoint(&b.h).try_inverse().ok_or(Error::InvalidPose("singular adjoint".into()))? * k.twist().v;
                    b.p = b.inertia * tb;
                    b
                }
                _ => step_rigid(&s.body, &wavg, dt)?,
            };
            if self.planar {
                planarize_body(&mut body);
            }
            let k1 = self.body_kinematics(&body, &w_end, t1)?;
            let drive = BodyDrive { cp: self, k1, t1, pose1: body.h };
            let adv = self.fluid.advance(&s.fluid, dt, &s.geo, &s.walls, &drive)?;
            div_inf = adv.report.div_inf;
            let (fluid, geo1, walls1) = (adv.state, adv.geo, adv.wall);
            let d = self.fluid.diagnose(&geo1, &fluid, &walls1)?;
            let w_new = self.fluid_wrench(&geo1, &d, &body)?;
            change = (w_new.v - w_end.v).amax();
            w_end = w_new;
            if it + 1 == self.subiterations && !(change <= 1e6 * (1.0 + w_end.v.amax())) {
                return Err(Error::CouplingDiverged(change));
            }
            last = Some(CouplingState { t: t1, fluid, body, geo: geo1, wrench: w_end, walls: walls1, tag: t1 });
        }
        let mut next = last.expect("at least one sub-iteration");
        // wall acceleration with the converged wrench
        let k = self.body_kinematics(&next.body, &next.wrench, t1)?;
        let (u, walls) = self.mesh_state(&next.geo.mesh, &k)?;
        next.geo = Geometry::moving(next.geo.mesh.clone(), u)?;
        next.walls = walls;
        let d = self.fluid.diagnose(&next.geo, &next.fluid, &next.walls)?;
        let rec = self.record(&next, d, change, div_inf)?;
        Ok((next, rec))
    }

    fn record(&self, s: &CouplingState, d: Diagnostics, change: f64, div_inf: f64) -> Result<StepRecord> {
        let c = &s.geo.mesh;
        let map = ReconstructionMap::new(c, &self.component)?;
        let k = self.body_kinematics(&s.body, &s.wrench, s.t)?;
        let gamma = map.field(&k.twist())?;
        let alpha = effort_constraint(c, &d, &self.component)?;
        let ports = BoundaryPorts::new(&s.geo, &d, &s.walls, self.fluid.params.rho)?;
        // mesh velocity trace on the body is set to the rigid velocity
        let mut ports_rigid = ports.clone();
        for (p1, _) in ports_rigid.body.iter_mut() {
            p1.flow = Carrier::Boundary(gamma.clone());
        }
        let j = no_slip_junction(&alpha, &gamma, &ports_rigid, &self.component)?;
        let (junction_flow, junction_effort) = crate::ports::junction_residual(&j)?;
        let pw = |p: &PowerPort| crate::ports::pair_power(p, Some(c));
        let boundary_power = pw(&j.ports[0])?;
        let advection_defect = (pw(&j.ports[1])? + pw(&j.ports[2])? + boundary_power).abs();
        let w = self.measured_wrench(s, &d)?;
        let body_power = w.v.dot(&s.body.twist().v);
        Ok(StepRecord { diagnostics: d, body_power, boundary_power, junction_effort, junction_flow, advection_defect, subiteration_change: change, div_inf })
    }
}
