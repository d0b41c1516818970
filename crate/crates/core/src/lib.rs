//! Port-Hamiltonian simulation of incompressible viscous flow around a rigid
//! body on a moving mesh.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: planar simplicial complexes with circumcentric duals, boundary
//!   components and harmonic mesh motion.
//! * [`forms`]: discrete exterior calculus on cochains, covector/vector valued
//!   forms, the partial trace and the value-contracting wedge.
//! * [`ports`]: power ports, junctions and modulated transformers.
//! * [`rigidbody`]: SE(3) kinematics and the rigid body dynamics.
//! * [`fluid`]: the incompressible Navier-Stokes subsystem and its boundary ports.
//! * [`coupling`]: the no-slip interconnection between fluid and body.
//! * [`audit`]: the power ledger that checks every balance per step.
//! * [`scenario`]: built-in scenarios and the configuration consumed by the CLI.

pub mod audit;
pub mod coupling;
pub mod error;
pub mod exec;
pub mod fluid;
pub mod forms;
pub mod linalg;
pub mod mesh;
pub mod ports;
pub mod rigidbody;
pub mod scenario;

pub use error::{Error, Result};

/// Planar vectors are used for all mesh geometry.
pub type Vec2 = nalgebra::Vector2<f64>;
/// Spatial vectors are used by the rigid body.
pub type Vec3 = nalgebra::Vector3<f64>;
