//! Cochains and the exterior calculus built on them.
//!
//! A primal k-form stores one value per k-cell. A dual k-form stores one
//! value per dual k-cell, i.e. per primal (2-k)-cell. Tensor valued forms
//! keep their value leg in global Cartesian components, one scalar cochain
//! per component.

mod contract;
mod io;
mod musical;
mod ops;

pub use contract::{
    dot_wedge, dot_wedge_domain, flat_star, interior_product, interior_product_top, lie_derivative,
    partial_trace, partial_trace_vector, scalar_to_covector, star_vertex, trace,
};
pub use io::{read_cochain_csv, write_cochain_csv};
pub use musical::{flat, sharp, PatchFit, Sharp};
pub use ops::{circulation, d, hodge_star, integrate, integrate_boundary, pair, volume_form, wedge};

use crate::mesh::SimplicialComplex;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    pub degree: usize,
    pub kind: Kind,
    pub values: Vec<f64>,
}

/// Number of values carried by a form of the given degree and kind.
pub fn form_len(c: &SimplicialComplex, degree: usize, kind: Kind) -> usize {
    match kind {
        Kind::Primal => c.n_cells(degree),
        Kind::Dual => c.n_cells(2 - degree.min(2)),
    }
}

impl Form {
    pub fn new(c: &SimplicialComplex, degree: usize, kind: Kind, values: Vec<f64>) -> Result<Self> {
        if degree > 2 {
            return Err(Error::Degree(format!("degree {degree} exceeds the dimension 2")));
        }
        let n = form_len(c, degree, kind);
        if values.len() != n {
            return Err(Error::Degree(format!("{}-form needs {n} values, got {}", degree, values.len())));
        }
        Ok(Form { degree, kind, values })
    }

    pub fn primal(c: &SimplicialComplex, degree: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(c, degree, Kind::Primal, values)
    }

    pub fn zeros(c: &SimplicialComplex, degree: usize, kind: Kind) -> Self {
        Form { degree, kind, values: vec![0.0; form_len(c, degree, kind)] }
    }

    /// Primal 0-form sampled from a function of position.
    pub fn sample0(c: &SimplicialComplex, f: impl Fn(Vec2) -> f64) -> Self {
        Form { degree: 0, kind: Kind::Primal, values: c.vertices().iter().map(|&x| f(x)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Form {
        Form { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.compatible(other)?;
        Ok(Form { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.compatible(other)?;
        Ok(Form { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(), ..self.clone() })
    }

    fn compatible(&self, other: &Form) -> Result<()> {
        if self.degree != other.degree || self.kind != other.kind || self.len() != other.len() {
            return Err(Error::Degree("forms of different type".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valence {
    /// Values are vectors (e.g. velocity).
    Vector,
    /// Values are covectors (e.g. stress, energy flux).
    Covector,
}

/// A form whose values are vectors or covectors, stored as one scalar
/// cochain per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorForm {
    pub valence: Valence,
    pub degree: usize,
    pub comps: [Vec<f64>; 2],
    /// Set for symmetric 2-tensors stored as covector valued 1-forms.
    pub symmetric: bool,
}

impl TensorForm {
    pub fn new(c: &SimplicialComplex, valence: Valence, degree: usize, comps: [Vec<f64>; 2]) -> Result<Self> {
        if degree > 2 {
            return Err(Error::Degree(format!("degree {degree} exceeds the dimension 2")));
        }
        let n = c.n_cells(degree);
        if comps.iter().any(|x| x.len() != n) {
            return Err(Error::Degree(format!("tensor {degree}-form needs {n} values per component")));
        }
        Ok(TensorForm { valence, degree, comps, symmetric: false })
    }

    /// Vector valued 0-form from per-vertex vectors.
    pub fn vector_field(values: &[Vec2]) -> Self {
        TensorForm {
            valence: Valence::Vector,
            degree: 0,
            comps: [values.iter().map(|v| v.x).collect(), values.iter().map(|v| v.y).collect()],
            symmetric: false,
        }
    }

    pub fn zeros(c: &SimplicialComplex, valence: Valence, degree: usize) -> Self {
        let n = c.n_cells(degree);
        TensorForm { valence, degree, comps: [vec![0.0; n], vec![0.0; n]], symmetric: false }
    }

    pub fn len(&self) -> usize {
        self.comps[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps[0].is_empty()
    }

    pub fn at(&self, i: usize) -> Vec2 {
        Vec2::new(self.comps[0][i], self.comps[1][i])
    }

    pub fn to_vecs(&self) -> Vec<Vec2> {
        (0..self.len()).map(|i| self.at(i)).collect()
    }

    pub fn component(&self, a: usize) -> Form {
        Form { degree: self.degree, kind: Kind::Primal, values: self.comps[a].clone() }
    }
}

/// A tensor valued form restricted to a boundary component by the partial
/// trace. Vector valued fields live on the component's vertices, covector
/// valued 1-forms on its edges (oriented by the component's convention).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    pub component: String,
    pub valence: Valence,
    /// Vertex ids (vector valence) or edge ids (covector valence).
    pub cells: Vec<usize>,
    pub values: Vec<Vec2>,
}

impl BoundaryField {
    pub fn zeros_like(&self) -> Self {
        BoundaryField { values: vec![Vec2::zeros(); self.values.len()], ..self.clone() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        BoundaryField { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &BoundaryField) -> Result<Self> {
        if self.component != other.component || self.valence != other.valence || self.cells != other.cells {
            return Err(Error::Carrier("boundary fields live on different cells".into()));
        }
        Ok(BoundaryField {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.amax()))
    }

    /// Value at a given mesh cell id, if the cell is part of the field.
    pub fn get(&self, cell: usize) -> Option<Vec2> {
        self.cells.binary_search(&cell).ok().map(|i| self.values[i])
    }
}

/// A scalar (n-1)-form on a boundary component.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryForm {
    pub component: String,
    pub edges: Vec<usize>,
    pub values: Vec<f64>,
}

impl BoundaryForm {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
