//! Power ports, junctions and modulated transformers.

use nalgebra::DVector;

use crate::forms::{dot_wedge, wedge, BoundaryField, Form, Kind, Valence};
use crate::mesh::SimplicialComplex;
use crate::rigidbody::{adjoint, Pose};
use crate::{Error, Result};

/// Values carried by one side of a port.
#[derive(Debug, Clone, PartialEq)]
pub enum Carrier {
    Domain(Form),
    Boundary(BoundaryField),
    Finite(DVector<f64>),
    /// The identically zero flow of a constraint (Lagrange multiplier) port.
    Zero,
}

impl Carrier {
    pub fn finite(v: &[f64]) -> Self {
        Carrier::Finite(DVector::from_column_slice(v))
    }

    /// Flattened values, used for junction residuals.
    pub fn flatten(&self) -> Vec<f64> {
        match self {
            Carrier::Domain(f) => f.values.clone(),
            Carrier::Boundary(b) => b.values.iter().flat_map(|v| [v.x, v.y]).collect(),
            Carrier::Finite(v) => v.iter().copied().collect(),
            Carrier::Zero => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Integral of the wedge (or primal-dual pairing) over the domain.
    DomainWedge,
    /// Integral of the value contracting wedge over a boundary component.
    BoundaryDotWedge,
    /// Euclidean duality of finite dimensional vectors.
    FiniteDual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPort {
    pub name: String,
    pub effort: Carrier,
    pub flow: Carrier,
    pub pairing: Pairing,
    /// Orientation sign, +1 or -1.
    pub sign: f64,
}

impl PowerPort {
    pub fn new(name: &str, effort: Carrier, flow: Carrier, pairing: Pairing, sign: f64) -> Self {
        PowerPort { name: name.into(), effort, flow, pairing, sign }
    }
}

fn carrier_err(msg: &str) -> Error {
    Error::Carrier(msg.into())
}

/// Power exchanged through a pair of carriers under the given pairing.
pub fn pair_carriers(e: &Carrier, f: &Carrier, pairing: Pairing, c: Option<&SimplicialComplex>) -> Result<f64> {
    if matches!(e, Carrier::Zero) || matches!(f, Carrier::Zero) {
        return Ok(0.0);
    }
    match (pairing, e, f) {
        (Pairing::FiniteDual, Carrier::Finite(a), Carrier::Finite(b)) => {
            if a.len() != b.len() {
                return Err(carrier_err("finite carriers differ in length"));
            }
            Ok(a.dot(b))
        }
        (Pairing::DomainWedge, Carrier::Domain(a), Carrier::Domain(b)) => {
            if a.degree + b.degree != 2 {
                return Err(carrier_err("domain carriers must have degrees summing to 2"));
            }
            match (a.kind, b.kind) {
                (Kind::Primal, Kind::Primal) => {
                    let c = c.ok_or_else(|| carrier_err("domain pairing needs a complex"))?;
                    Ok(wedge(c, a, b)?.values.iter().sum())
                }
                (Kind::Primal, Kind::Dual) => crate::forms::pair(a, b),
                (Kind::Dual, Kind::Primal) => crate::forms::pair(b, a),
                _ => Err(carrier_err("two dual carriers cannot be paired")),
            }
        }
        (Pairing::BoundaryDotWedge, Carrier::Boundary(a), Carrier::Boundary(b)) => {
            let c = c.ok_or_else(|| carrier_err("boundary pairing needs a complex"))?;
            let (s, v) = match (a.valence, b.valence) {
                (Valence::Covector, Valence::Vector) => (a, b),
                (Valence::Vector, Valence::Covector) => (b, a),
                _ => return Err(Error::Valence("boundary pairing needs dual valences".into())),
            };
            Ok(dot_wedge(c, s, v)?.values.iter().sum())
        }
        _ => Err(carrier_err("carriers do not match the pairing kind")),
    }
}

pub fn pair_power(port: &PowerPort, c: Option<&SimplicialComplex>) -> Result<f64> {
    Ok(port.sign * pair_carriers(&port.effort, &port.flow, port.pairing, c)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JunctionKind {
    /// Common flow, efforts sum to zero.
    One,
    /// Common effort, flows sum to zero.
    Zero,
}

#[derive(Debug, Clone)]
pub struct Junction {
    pub kind: JunctionKind,
    pub ports: Vec<PowerPort>,
}

/// `(flow_residual, effort_residual)`: for a 1-junction the largest deviation
/// of any flow from the first and the largest signed effort sum per cell; the
/// roles swap for a 0-junction.
pub fn junction_residual(j: &Junction) -> Result<(f64, f64)> {
    if j.ports.is_empty() {
        return Err(Error::EmptyJunction);
    }
    let flows: Vec<Vec<f64>> = j.ports.iter().map(|p| p.flow.flatten()).collect();
    let efforts: Vec<Vec<f64>> = j.ports.iter().map(|p| p.effort.flatten()).collect();
    let signs: Vec<f64> = j.ports.iter().map(|p| p.sign).collect();
    let spread = |xs: &[Vec<f64>]| -> Result<f64> {
        let n = xs[0].len();
        if xs.iter().any(|x| x.len() != n) {
            return Err(carrier_err("junction members live on different cells"));
        }
        Ok(xs.iter().flat_map(|x| x.iter().zip(&xs[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max))
    };
    let balance = |xs: &[Vec<f64>]| -> Result<f64> {
        let n = xs[0].len();
        if xs.iter().any(|x| x.len() != n) {
            return Err(carrier_err("junction members live on different cells"));
        }
        Ok((0..n).map(|i| xs.iter().zip(&signs).map(|(x, s)| s * x[i]).sum::<f64>().abs()).fold(0.0, f64::max))
    };
    match j.kind {
        JunctionKind::One => Ok((spread(&flows)?, balance(&efforts)?)),
        JunctionKind::Zero => Ok((balance(&flows)?, spread(&efforts)?)),
    }
}

/// A linear map between port spaces together with its dual.
pub trait Modulation: Send + Sync {
    fn apply(&self, flow: &Carrier) -> Result<Carrier>;
    fn dual_apply(&self, effort: &Carrier) -> Result<Carrier>;
    /// Pairing on the input side (dual effort with input flow).
    fn input_pairing(&self) -> Pairing;
    /// Pairing on the output side.
    fn output_pairing(&self) -> Pairing;
}

/// Modulated transformer: the map is valid only at the time it was built for.
pub struct Transformer {
    pub name: String,
    pub tag: f64,
    pub map: Box<dyn Modulation>,
}

impl Transformer {
    pub fn new(name: &str, tag: f64, map: Box<dyn Modulation>) -> Self {
        Transformer { name: name.into(), tag, map }
    }

    fn fresh(&self, t: f64) -> Result<()> {
        if t != self.tag {
            return Err(Error::StaleModulation { tagged: self.tag, requested: t });
        }
        Ok(())
    }

    pub fn apply(&self, t: f64, flow: &Carrier) -> Result<Carrier> {
        self.fresh(t)?;
        self.map.apply(flow)
    }

    pub fn dual_apply(&self, t: f64, effort: &Carrier) -> Result<Carrier> {
        self.fresh(t)?;
        self.map.dual_apply(effort)
    }

    /// `|<dual(e)|f> - <e|apply(f)>|` for an output effort `e` and input flow `f`.
    pub fn power_defect(&self, t: f64, effort: &Carrier, flow: &Carrier, c: Option<&SimplicialComplex>) -> Result<f64> {
        let lhs = pair_carriers(&self.dual_apply(t, effort)?, flow, self.map.input_pairing(), c)?;
        let rhs = pair_carriers(effort, &self.apply(t, flow)?, self.map.output_pairing(), c)?;
        Ok((lhs - rhs).abs())
    }
}

/// Change of frame: body twists to inertial twists, inertial wrenches to body
/// wrenches.
pub struct AdjointMap {
    pub ad: nalgebra::Matrix6<f64>,
}

impl AdjointMap {
    pub fn new(h: &Pose) -> Self {
        AdjointMap { ad: adjoint(h) }
    }
}

fn six(c: &Carrier) -> Result<nalgebra::Vector6<f64>> {
    match c {
        Carrier::Finite(v) if v.len() == 6 => Ok(nalgebra::Vector6::from_column_slice(v.as_slice())),
        _ => Err(carrier_err("expected a 6-vector")),
    }
}

impl Modulation for AdjointMap {
    fn apply(&self, flow: &Carrier) -> Result<Carrier> {
        Ok(Carrier::finite((self.ad * six(flow)?).as_slice()))
    }
    fn dual_apply(&self, effort: &Carrier) -> Result<Carrier> {
        Ok(Carrier::finite((self.ad.transpose() * six(effort)?).as_slice()))
    }
    fn input_pairing(&self) -> Pairing {
        Pairing::FiniteDual
    }
    fn output_pairing(&self) -> Pairing {
        Pairing::FiniteDual
    }
}
