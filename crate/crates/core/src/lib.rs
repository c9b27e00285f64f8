//! Mixed spline / Q2 / harmonic-polygon finite elements on hybrid 2D meshes.
//!
//! Quads with a regular one-ring carry biquadratic B-splines, other quads carry
//! Q2 (or Q1) Lagrange elements, and star-shaped polygons carry nonconforming
//! bases built from kernel functions plus quadratic monomials.

pub mod assembly;
pub mod bases;
pub mod discretization;
pub mod error;
pub mod geomap;
pub mod geometry;
pub mod mesh;
pub mod pde;
pub mod poly;
pub mod preprocess;
pub mod problem;
pub mod quadrature;
pub mod registry;
pub mod solver;

pub use error::{Error, Result};
