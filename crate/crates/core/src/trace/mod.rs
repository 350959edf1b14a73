//! Test functions for the trace method and the exponent bookkeeping of the
//! final bound.

mod bump;
mod pipeline;
mod spectral;
mod transform;

pub use bump::{d_power_h_l, h, h0, h_l, BumpDerivative, BumpGrid, GRID_STEP, MAX_DERIVATIVE};
pub use pipeline::{
    parse_rational, pipeline, standard_records, Affine, BoundConstants, ExponentRecord, PipelineReport, PipelineStep,
    BOUNDARY_NOTE,
};
pub use spectral::{length_scan, spectral_lower_bound, SpectralBound, SpectralRow, ALPHA};
pub use transform::{
    cancellation_check, check_spectral, dilation_gap, fourier, h0_hat, h_hat, h_l_hat, h_l_hat_direct,
    hat_cross_check, CancellationReport, HatCrossCheck, H_hat, H_hat_direct,
};
