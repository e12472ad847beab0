//! Numerical construction of the genus-one helicoid.
//!
//! The surface lives on the torus `w² = (z − λ)(z² + 1)` with Weierstrass data
//! `dg/g = ρ(z − α)(z − β)/(z − a)·dz/w` and `dh = i(z − a)·dz/w`. The crate
//! solves the period problem for `(λ, a, α, β)`, evaluates and meshes the
//! surface in the flat coordinate of the torus, and checks the result
//! against closed-form helicoid and catenoid references.
//!
//! Everything numerical is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix `f64`.

pub mod curve;
pub mod error;
pub mod flow;
pub mod forms;
pub mod poly;
pub mod quad;
pub mod reference;
pub mod scalar;
pub mod solver;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};

pub type Complex = scalar::Cx<f64>;
pub type Curve = curve::HCurve<f64>;
pub type CurvePoint = curve::CurvePoint<f64>;
pub type Params = forms::HandleParams<f64>;
pub type Solution = solver::Solution<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SurfacePoint = surface::SurfacePoint<f64>;
pub type SurfaceMesh = surface::SurfaceMesh<f64>;
