use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ledger_of, Check, Outcome, ScenarioConfig, Series};
use crate::audit::{translation_study, Balance, LedgerRow, Sample};
use crate::coupling::{Coupling, Mode};
use crate::fluid::{Diagnostics, Fluid};
use crate::forms::{circulation, Form, Kind};
use crate::mesh::SimplicialComplex;
use crate::rigidbody::{
    exp_so3, hamiltonian_b, pairing, rigid_rhs, step_rigid, state_row, Frame, Pose, RigidBodyState, Vec6, Wrench, STATE_HEADER,
};
use crate::{Error, Result, Vec2, Vec3};

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

fn worst(rows: &[LedgerRow], b: Balance) -> f64 {
    max_of(rows.iter().filter_map(|r| r.relative(b)))
}

fn worst_abs(rows: &[LedgerRow], b: Balance) -> f64 {
    max_of(rows.iter().filter_map(|r| r.residual(b)).map(|(r, _)| r.abs()))
}

pub(super) fn body_state(cfg: &ScenarioConfig) -> Result<RigidBodyState> {
    let b = &cfg.body;
    let pose = Pose { r: nalgebra::Matrix3::identity(), xi: Vec3::from(b.position) };
    let mut s = RigidBodyState::principal(pose, Vec3::from(b.inertia), b.mass, Vec3::from(b.gravity))?;
    s.p = Vec6::from_column_slice(&b.momentum);
    Ok(s)
}

fn fluid_of(cfg: &ScenarioConfig) -> Result<Fluid> {
    Fluid::new(cfg.fluid, cfg.boundary_conditions(), cfg.build_mesh()?)
}

/// Relative defect of the instantaneous power balance `dH/dt + D = P`.
fn balance_defect(d: &Diagnostics) -> f64 {
    let scale = [d.h_dot, d.dissipation, d.flux_dv, d.flux_db].iter().fold(1e-12f64, |m, x| m.max(x.abs()));
    d.residual().abs() / scale
}

fn fluid_sample(d: &Diagnostics) -> Sample {
    Sample {
        t: d.t,
        h_f: Some(d.h),
        dissipation: Some(d.dissipation),
        p_dv: Some(d.flux_dv),
        p_db: Some(d.flux_db),
        ..Default::default()
    }
}

/// Runs a fixed-mesh fluid scenario; `log` adds extra columns per row.
fn fixed_mesh_run(
    cfg: &ScenarioConfig,
    fluid: &Fluid,
    v0: Form,
    extra: &[&str],
    log: impl Fn(&Diagnostics) -> Vec<f64>,
) -> Result<(Series, Vec<Sample>, f64, f64)> {
    let walls = fluid.walls()?;
    let mut s = fluid.initial_state(v0)?;
    let mut header = vec!["t", "H_f", "D", "P_dV", "P_dB", "div_inf"];
    header.extend_from_slice(extra);
    let mut series = Series::new(&header);
    let mut samples = Vec::new();
    let (mut div, mut balance) = (0.0f64, 0.0f64);
    let mut record = |d: &Diagnostics, series: &mut Series| {
        balance = balance.max(balance_defect(d));
        let mut row = vec![d.t, d.h, d.dissipation, d.flux_dv, d.flux_db, d.div_inf];
        row.extend(log(d));
        series.push(row);
        samples.push(fluid_sample(d));
    };
    record(&fluid.diagnose(&fluid.geo, &s, &walls)?, &mut series);
    for _ in 0..cfg.steps() {
        let (n, rep) = fluid.step(&s, cfg.dt)?;
        div = div.max(rep.div_inf);
        s = n;
        record(&fluid.diagnose(&fluid.geo, &s, &walls)?, &mut series);
    }
    Ok((series, samples, div, balance))
}

pub fn taylor_green(cfg: &ScenarioConfig) -> Result<Outcome> {
    let start = Instant::now();
    let fluid = fluid_of(cfg)?;
    let length = match cfg.mesh {
        super::MeshConfig::PeriodicSquare { length, .. } => length,
        _ => return Err(Error::config("mesh", "taylor-green needs a periodic-square mesh")),
    };
    let k = 2.0 * std::f64::consts::PI / length;
    let nu = cfg.fluid.kappa / cfg.fluid.rho;
    let v0 = circulation(fluid.mesh(), |x| Vec2::new((k * x.x).sin() * (k * x.y).cos(), -(k * x.x).cos() * (k * x.y).sin()));
    let h0 = fluid.hamiltonian(&fluid.initial_state(v0.clone())?);
    let decay = |t: f64| (-4.0 * nu * k * k * t).exp();
    let (series, samples, div, balance) = fixed_mesh_run(cfg, &fluid, v0, &["H_exact"], |d| vec![h0 * decay(d.t)])?;
    let energy = max_of(samples.iter().map(|s| (s.h_f.unwrap() / (h0 * decay(s.t)) - 1.0).abs()));
    let ledger = ledger_of(&samples)?;
    Ok(Outcome {
        checks: vec![
            Check::at_most("kinetic energy decay vs exp(-4 nu k^2 t)", energy, 0.05),
            Check::at_most("max |d star v|", div, 1e-10),
            Check::at_least_zero("min dissipation", min_of(samples.iter().filter_map(|s| s.dissipation)), 1e-12),
            Check::at_most("fluid ledger residual", worst(&ledger, Balance::Fluid), 1e-3),
            Check::at_most("semi-discrete power balance", balance, 1e-6),
            Check::at_most("runtime [s]", start.elapsed().as_secs_f64(), 60.0),
        ],
        series: Some(series),
        ledger,
        ..Default::default()
    })
}

pub fn lid_cavity(cfg: &ScenarioConfig) -> Result<Outcome> {
    let fluid = fluid_of(cfg)?;
    let v0 = Form::zeros(fluid.mesh(), 1, Kind::Primal);
    let (series, samples, div, balance) = fixed_mesh_run(cfg, &fluid, v0, &[], |_| vec![])?;
    let ledger = ledger_of(&samples)?;
    Ok(Outcome {
        checks: vec![
            Check::at_most("max |d star v|", div, 1e-10),
            Check::at_least_zero("min dissipation", min_of(samples.iter().filter_map(|s| s.dissipation)), 1e-12),
            Check::at_most("fluid ledger residual", worst(&ledger, Balance::Fluid), 1e-3),
            Check::at_most("semi-discrete power balance", balance, 1e-6),
            Check::at_most("energy supply inequality", worst(&ledger, Balance::Supply), 1e-3),
        ],
        series: Some(series),
        ledger,
        ..Default::default()
    })
}

fn rigid_sample(t: f64, s: &RigidBodyState) -> Sample {
    Sample { t, h_b: Some(hamiltonian_b(s)), p_body: Some(0.0), ..Default::default() }
}

fn rigid_series(s: &RigidBodyState) -> Series {
    let mut series = Series::new(&STATE_HEADER.split(',').collect::<Vec<_>>());
    series.push(state_row(0.0, s));
    series
}

fn orthogonality(s: &RigidBodyState) -> f64 {
    (s.h.r.transpose() * s.h.r - nalgebra::Matrix3::identity()).norm()
}

/// `|dH_b/dt - <W|T>|` at `s` for a body frame wrench `w`.
fn power_gap(s: &RigidBodyState, w: &Wrench) -> Result<f64> {
    let r = rigid_rhs(s, w)?;
    let xi_dot = s.h.r * r.twist.linear();
    let h_dot = r.twist.v.dot(&r.p_dot) + s.mass * s.g.dot(&xi_dot);
    Ok((h_dot - pairing(w, &r.twist)?).abs())
}

pub fn free_body(cfg: &ScenarioConfig) -> Result<Outcome> {
    let mut s = body_state(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h0 = hamiltonian_b(&s);
    let (pv0, mix0) = (s.p_v().norm_squared(), s.p_omega().dot(&s.p_v()));
    let mix_scale = s.p_omega().norm() * s.p_v().norm();
    let mut series = rigid_series(&s);
    let mut samples = vec![rigid_sample(0.0, &s)];
    let (mut dh, mut pv, mut mix, mut ortho, mut gap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let free = Wrench::zero(Frame::Body);
    for n in 1..=cfg.steps() {
        let w = Wrench { frame: Frame::Body, v: Vec6::from_fn(|_, _| rng.gen_range(-1.0..1.0)) };
        gap = gap.max(power_gap(&s, &w)?);
        s = step_rigid(&s, &free, cfg.dt)?;
        let t = n as f64 * cfg.dt;
        dh = dh.max((hamiltonian_b(&s) - h0).abs() / h0.abs());
        pv = pv.max((s.p_v().norm_squared() - pv0).abs() / pv0.max(1e-300));
        mix = mix.max((s.p_omega().dot(&s.p_v()) - mix0).abs() / mix_scale.max(1e-300));
        ortho = ortho.max(orthogonality(&s));
        series.push(state_row(t, &s));
        samples.push(rigid_sample(t, &s));
    }
    let ledger = ledger_of(&samples)?;
    Ok(Outcome {
        checks: vec![
            Check::at_most("relative energy drift", dh, 1e-8),
            Check::at_most("Casimir drift |p_v|^2", pv, 1e-8),
            Check::at_most("Casimir drift p_w.p_v", mix, 1e-8),
            Check::at_most("orthogonality |R^T R - I|", ortho, 1e-10),
            Check::at_most("power theorem dH/dt - <W|T> (random wrenches)", gap, 1e-10),
        ],
        series: Some(series),
        ledger,
        ..Default::default()
    })
}

pub fn falling_body(cfg: &ScenarioConfig) -> Result<Outcome> {
    let s0 = body_state(cfg)?;
    let mut s = s0.clone();
    let h0 = hamiltonian_b(&s);
    let tw = s0.twist();
    let (omega, v0) = (tw.omega(), tw.linear());
    let mut series = rigid_series(&s);
    let mut samples = vec![rigid_sample(0.0, &s)];
    let (mut pos, mut rot, mut dh) = (0.0f64, 0.0f64, 0.0f64);
    let free = Wrench::zero(Frame::Body);
    for n in 1..=cfg.steps() {
        s = step_rigid(&s, &free, cfg.dt)?;
        let t = n as f64 * cfg.dt;
        // gravity acts through the centre of mass: free spin, parabolic
        // flight; `g` points against the acceleration
        let xi = s0.h.xi + s0.h.r * v0 * t - 0.5 * s0.g * t * t;
        let r = s0.h.r * exp_so3(&(omega * t));
        pos = pos.max((s.h.xi - xi).norm());
        rot = rot.max((s.h.r - r).norm());
        dh = dh.max((hamiltonian_b(&s) - h0).abs() / h0.abs().max(1e-300));
        series.push(state_row(t, &s));
        samples.push(rigid_sample(t, &s));
    }
    let ledger = ledger_of(&samples)?;
    let scale = s0.h.xi.norm().max(1.0);
    Ok(Outcome {
        checks: vec![
            Check::at_most("position error vs free fall", pos / scale, 1e-8),
            Check::at_most("attitude error vs free spin", rot, 1e-8),
            Check::at_most("relative energy drift", dh, 1e-8),
            Check::at_most("rigid ledger residual (absolute)", worst_abs(&ledger, Balance::Rigid), 1e-6),
        ],
        series: Some(series),
        ledger,
        ..Default::default()
    })
}

const CYLINDER_HEADER: [&str; 19] = [
    "t", "H_f", "H_b", "D", "P_dV", "P_dB", "P_body", "junction_effort", "advection_defect", "div_inf", "xi1", "xi2", "xi3", "p1",
    "p2", "p3", "p4", "p5", "p6",
];

fn coupled_sample(c: &SimplicialComplex, comp: &str, d: &Diagnostics, body: &RigidBodyState, p_body: f64) -> Result<Sample> {
    let p_db = d.component_power(c, comp)?;
    Ok(Sample {
        t: d.t,
        h_f: Some(d.h),
        h_b: Some(hamiltonian_b(body)),
        dissipation: Some(d.dissipation),
        p_dv: Some(d.flux_dv + d.flux_db - p_db),
        p_db: Some(p_db),
        p_body: Some(p_body),
    })
}

pub fn cylinder(cfg: &ScenarioConfig) -> Result<Outcome> {
    let comp = cfg.body.component.clone().ok_or_else(|| Error::config("body.component", "a cylinder run needs a body component"))?;
    let fluid = fluid_of(cfg)?;
    let body = body_state(cfg)?;
    let mode = match cfg.motion {
        Some(p) => Mode::Prescribed(p),
        None => Mode::Free,
    };
    let cp = Coupling::new(fluid, &comp, &body, mode, cfg.subiterations)?;
    let mut s = cp.initial(body, Form::zeros(cp.fluid.mesh(), 1, Kind::Primal))?;
    let mut series = Series::new(&CYLINDER_HEADER);
    let mut samples = Vec::new();
    let mut push = |series: &mut Series, smp: Sample, body: &RigidBodyState, extra: [f64; 3]| {
        let mut row = vec![smp.t, smp.h_f.unwrap(), smp.h_b.unwrap(), smp.dissipation.unwrap(), smp.p_dv.unwrap(), smp.p_db.unwrap()];
        row.push(smp.p_body.unwrap());
        row.extend(extra);
        row.extend(body.h.xi.iter());
        row.extend(body.p.iter());
        series.push(row);
        samples.push(smp);
    };
    let d0 = cp.fluid.diagnose(&s.geo, &s.fluid, &s.walls)?;
    let p0 = pairing(&s.wrench, &s.body.twist())?;
    let smp = coupled_sample(&s.geo.mesh, &comp, &d0, &s.body, p0)?;
    push(&mut series, smp, &s.body, [0.0, 0.0, d0.div_inf]);
    let (mut flow, mut effort, mut adv, mut div) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut balance = balance_defect(&d0);
    for _ in 0..cfg.steps() {
        let (n, r) = cp.step(&s, cfg.dt)?;
        flow = flow.max(r.junction_flow);
        effort = effort.max(r.junction_effort);
        adv = adv.max(r.advection_defect);
        div = div.max(r.div_inf);
        balance = balance.max(balance_defect(&r.diagnostics));
        let smp = coupled_sample(&n.geo.mesh, &comp, &r.diagnostics, &n.body, r.body_power)?;
        push(&mut series, smp, &n.body, [r.junction_effort, r.advection_defect, r.div_inf]);
        s = n;
    }
    let ledger = ledger_of(&samples)?;
    let ledger_check = match mode {
        Mode::Free => Check::at_most("coupled ledger residual", worst(&ledger, Balance::Coupled), 1e-3),
        _ => Check::at_most("fluid ledger residual", worst(&ledger, Balance::Fluid), 1e-3),
    };
    Ok(Outcome {
        checks: vec![
            ledger_check,
            Check::at_most("semi-discrete fluid power balance", balance, 1e-6),
            Check::at_most("advection cancellation on the body", adv, 1e-10),
            Check::at_most("junction flow residual", flow, 0.0),
            Check::at_most("junction effort residual", effort, 1e-12),
            Check::at_most("max |d star v|", div, 1e-10),
            Check::at_least_zero("min dissipation", min_of(samples.iter().filter_map(|s| s.dissipation)), 1e-12),
        ],
        series: Some(series),
        ledger,
        ..Default::default()
    })
}

pub fn reynolds(cfg: &ScenarioConfig) -> Result<Outcome> {
    let res = match cfg.mesh {
        super::MeshConfig::UnitSquare { res } => res,
        _ => return Err(Error::config("mesh", "reynolds-translate needs a unit-square mesh")),
    };
    let dts: Vec<f64> = (0..4).map(|i| cfg.dt / 2f64.powi(i)).collect();
    let rows = translation_study(res, Vec2::new(0.5, 0.25), &dts, |x| (x.x + 0.5 * x.y).exp())?;
    let mut series = Series::new(&["dt", "mass_rate", "bulk", "boundary", "boundary_alt", "residual"]);
    for (dt, r) in dts.iter().zip(&rows) {
        series.push(vec![*dt, r.mass_rate, r.bulk, r.boundary, r.boundary_alt, r.residual]);
    }
    let mut checks: Vec<Check> = rows
        .windows(2)
        .enumerate()
        .map(|(i, w)| Check::near(&format!("residual ratio dt/{} -> dt/{}", 1 << i, 1 << (i + 1)), w[0].residual.abs() / w[1].residual.abs(), 2.0, 0.2))
        .collect();
    let rep = max_of(rows.iter().map(|r| (r.boundary - r.boundary_alt).abs()));
    checks.push(Check::at_most("moving port representations agree", rep, 1e-12));
    Ok(Outcome { checks, series: Some(series), ..Default::default() })
}
