//! Uniform point-cloud downsampling and completion metrics.
//!
//! Three samplers share one output contract ([`SampleSelection`]):
//! iterative farthest point sampling ([`ifps`]), one-pass cell sampling
//! ([`cell_sample`]) and the hybrid [`cell_ifps`], which runs cell sampling
//! first and then corrects the sample count with a small farthest-point pass
//! so the output has exactly the requested size.
//!
//! Around the samplers sit the Chamfer metric family ([`metrics`]), the
//! completion/adversarial/joint losses ([`losses`]), ASCII point-cloud I/O and
//! synthetic data ([`dataio`]) and a timing harness ([`bench`]).

pub mod bench;
pub mod dataio;
mod error;
mod fps;
pub mod geometry;
pub mod losses;
pub mod metrics;
pub mod sampling;
pub mod spatial;

pub use error::{Error, Result};
pub use geometry::{bounding_box, centroid, normalize, Aabb, NormalizationTransform, Point3, PointCloud};
pub use metrics::{chamfer, CompletionErrorReport};
pub use sampling::{
    cell_ifps, cell_sample, estimate_cell_edge, ifps, multiscale_sample, CellIfpsConfig, MultiScaleClouds,
    RemovalMode, SampleSelection, Sampler,
};
pub use spatial::{build_grid, CellGrid, NnIndex};
