//! Vietoris–Rips and Čech metric thickenings of finite metric spaces.
//!
//! The crate builds simplicial complexes from finite (extended, pseudo)
//! metric spaces, realizes them as spaces of finitely-supported measures
//! under the exact Wasserstein metric, and checks how these constructions
//! interact with L∞ products, wedge sums and coproducts.

pub mod cliques;
pub mod error;
pub mod homology;
pub mod homotopy;
pub mod io;
pub mod measure;
pub mod metric_space;
pub mod sample;
pub mod simplicial_complex;
pub mod suites;
pub mod thickening;
pub mod wasserstein;

pub use error::{Error, Result};
pub use measure::FiniteMeasure;
pub use metric_space::{MetricSpace, PointedMetricSpace};
pub use simplicial_complex::SimplicialComplex;
pub use thickening::{Convention, PointedThickening, ScaleParameter, Thickening};
pub use wasserstein::{TransportPlan, WassersteinConfig};
