//! Wasserstein distances: exact solvers on the line and the circle, exact and
//! entropic discrete transport, and Fourier-side upper bounds.

mod bounds;
mod circle;
mod cost;
mod fourier;
mod line;
mod planar;
mod result;
mod simplex;
mod sinkhorn;

pub use circle::{w1_circle, w1_circle_lebesgue};
pub use cost::CostMatrix;
pub use line::{w1_line, w1_line_analytic, w1_line_reference, wp_line, LineReference};
pub use result::{Method, TransportResult};
pub use simplex::{w1_exact_discrete, EXACT_SIZE_LIMIT, MASS_TOLERANCE};
pub use bounds::{rate_bound_constant, su2_borda_diagnostic, Su2Diagnostic};
pub use fourier::{
    fourier_bound_scan, fourier_bound_torus, log_grid, FourierBoundReport, TorusTarget,
    LATTICE_LIMIT,
};
pub use sinkhorn::{w1_sinkhorn, EpsSchedule};
mod auction;
pub use auction::w1_auction_planar;
pub use planar::{w1_planar, PlanarMethod, AUCTION_RELATIVE_EPS, SINKHORN_SIZE_LIMIT};
