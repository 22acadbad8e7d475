//! Bakry-Émery curvature, spectra and hypercube rigidity diagnostics for
//! finite weighted graphs.
//!
//! A graph carries symmetric edge weights `w` and a positive vertex measure
//! `m`; the Laplacian is `Δf(x) = (1/m(x)) Σ_y w(x,y)(f(y) - f(x))`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod gamma;
pub mod graph;
pub mod io;
mod linalg;
pub mod obata;
pub mod rigidity;
pub mod spectral;

pub use error::{Error, Result};
pub use gamma::{cd_check, curvature, curvature_at, gamma, gamma2, laplacian_apply, local_forms, CdCheck};
pub use graph::{cartesian_product, hypercube, MeasureBound, WeightedGraph};
pub use rigidity::{almost_rigidity_report, detect_hypercube, frobenius_distance_to_cube, RigidityReport};
pub use spectral::{gap_deficit, spectrum, SpectralData};
