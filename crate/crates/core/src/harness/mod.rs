//! Experiment configs, prime sweeps, rate fits and output files.

mod clt;
mod config;
mod emit;
mod shrinking;
mod sweep;
mod weyl;

pub use clt::{clt_regime_sweep, gamma_to_gaussian, CltOptions, CltRecord};
pub use config::{
    CheckSpec, DistanceMethod, ExperimentConfig, FamilySpec, PrimeSelection, RateSpec,
    ReferenceSpec, SCHEMA_VERSION,
};
pub use emit::{
    canonical_json, emit, emit_to_path, write_clt_csv, write_records_csv, write_records_dat,
    Format,
};
pub use shrinking::shrinking_target_count;
pub use sweep::{
    fit_rate, planar_with_allowance, std_dev, sweep, CheckOutcome, PrimeRecord, RateFit,
    SweepReport,
};
pub use weyl::{weyl_vanishing_sweep, WeylException, WeylSweep};
