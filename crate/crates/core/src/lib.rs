//! Finite-difference operators on uniform and nonuniform one-dimensional
//! meshes.
//!
//! The crate evaluates the forward, backward and central first differences,
//! all nine composed second differences and a corrected nonuniform second
//! difference. It computes their Taylor consistency coefficients and
//! truncation-error bounds, measures scaled approximation errors, and solves
//! a harmonic-oscillator difference equation by forward marching.
//!
//! ```
//! use fdcheck::{diffops, functions, metrics, Mesh};
//!
//! let mesh = Mesh::uniform(0.0, 1.0, 23).unwrap();
//! let f = functions::sinusoid(-1.0, 4.0 * std::f64::consts::PI, 0.0);
//! let u = functions::sample(&f, 0, &mesh).unwrap();
//! let approx = diffops::first_difference(diffops::FirstDiffKind::Central, &u).unwrap();
//! let exact = functions::sample(&f, 1, &mesh).unwrap();
//! let series = metrics::scaled_local_difference(&exact, &approx).unwrap();
//! assert!((series.sgei - 0.0535).abs() < 1e-3);
//! ```

pub mod analysis;
pub mod diffops;
mod error;
pub mod experiments;
pub mod functions;
pub mod grid;
pub mod io;
pub mod ivp;
pub mod mesh;
pub mod metrics;
pub mod parse;

pub use error::{Error, Result};
pub use functions::AnalyticFunction;
pub use grid::GridFunction;
pub use mesh::Mesh;
