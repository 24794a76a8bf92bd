//! Empirical and reference probability measures.

mod empirical;
mod reference;

pub use empirical::{
    circle_grid, empirical_from_family, Empirical1D, Empirical2D, EmpiricalCircle,
    EmpiricalTorus, Measure, REAL_TOLERANCE,
};
pub use reference::{
    arcsine_cdf, gamma_d_sampler, sato_tate_antiderivative, sato_tate_cdf, sato_tate_density,
    ReferenceMeasure,
};
