//! Integer linear algebra and the torus subgroup H_Z cut out by a module of
//! additive relations.

mod matrix;
mod relations;
mod sampler;
mod snf;

pub use matrix::IntMatrix;
pub use relations::{
    relation_preset_prime, relation_preset_prime_power, Provenance, RelationModule,
};
pub use sampler::{build_sampler, sigma_pushforward_sample, TorusSubgroupSampler};
pub use snf::{smith_normal_form, smith_normal_form_capped, SnfDecomposition, DEFAULT_BIT_CAP};
