//! Temporal polynomial machinery on a time partition.

pub mod basis;
pub mod gauss;
pub mod legendre;
pub mod partition;
pub mod projection;

pub use basis::{
    legendre_eval, legendre_to_sigma, rows_legendre_to_sigma, rows_sigma_to_legendre,
    sigma_to_legendre, slab_temporal_matrices, trial_derivatives, trial_values,
    SlabTemporalMatrices,
};
pub use gauss::GaussRule;
pub use partition::{Slab, TimePartition};
pub use projection::{
    data_quadrature_points, eval_legendre_series, l2_project_time, l2_project_time_with,
    lagrange_interpolate, ptau_project, ptau_project_slab, PiecewisePolynomial,
};
