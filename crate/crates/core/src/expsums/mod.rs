//! Complete families of exponential sums over finite fields, torus orbits
//! and their Weyl sums.

mod family;
mod kloosterman;
mod mellin;
mod su2;
mod torus;

pub use family::{
    gaussian_period_family, rootset_family, subgroup_family_normalized, FamilyKind, SumFamily,
};
pub use kloosterman::{kloosterman_direct, kloosterman_family, DIRECT_COST_LIMIT};
pub use mellin::{mellin_direct, mellin_family};
pub use su2::{su2_character, su2_weyl_diagnostic};
pub use torus::{torus_orbit, TorusOrbit};
