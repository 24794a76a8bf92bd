//! Finite-field arithmetic: generators, discrete logarithms, characters and
//! root finding.

mod field;
pub mod poly;
pub mod primes;

pub use field::{
    build_field, AdditiveCharacter, FieldContext, FieldOptions, MultiplicativeCharacter,
    RootScan, DEFAULT_TABLE_CAP, MAX_FIELD_ORDER,
};
pub use primes::{is_prime, prime_factors, primes_in};
