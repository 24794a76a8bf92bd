use serde::{Deserialize, Serialize};

use super::IntMatrix;
use crate::error::{Error, Result};
use crate::ff::is_prime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    PresetPrimeCyclotomic,
    PresetPrimePowerCyclotomic,
    UserSupplied,
}

/// Generators (rows) of the module of integer relations Σ α(x) x = 0 among
/// the points of Z.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationModule {
    pub z_size: usize,
    pub generators: IntMatrix,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationJson {
    z_size: usize,
    generators: Vec<Vec<i64>>,
    provenance: Provenance,
}

impl RelationModule {
    pub fn user(z_size: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != z_size) {
            return Err(Error::InvalidInput(format!(
                "every relation must have length {z_size}"
            )));
        }
        if rows.iter().any(|r| r.iter().all(|&c| c == 0)) {
            return Err(Error::InvalidInput("zero relation".into()));
        }
        Ok(RelationModule {
            z_size,
            generators: IntMatrix::from_rows(rows, z_size),
            provenance: Provenance::UserSupplied,
        })
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.generators
            .to_i64_rows()
            .expect("generators are built from i64 rows")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RelationJson {
            z_size: self.z_size,
            generators: self.rows(),
            provenance: self.provenance,
        })
        .expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RelationJson = serde_json::from_str(text)?;
        let mut m = RelationModule::user(raw.z_size, &raw.generators)?;
        m.provenance = raw.provenance;
        Ok(m)
    }
}

/// For prime d, the relations among μ_d are generated by ζ + ζ² + … + ζ^d = 0.
pub fn relation_preset_prime(d: u64) -> Result<RelationModule> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let mut m = RelationModule::user(d as usize, &[vec![1; d as usize]])?;
    m.provenance = Provenance::PresetPrimeCyclotomic;
    Ok(m)
}

/// Relations among μ_{r^b} in the ordering ζ, ζ², …, ζ^{r^b}: for each
/// m = 1..r^{b-1}, Σ_ℓ ζ^{m + ℓ r^{b-1}} = 0.
pub fn relation_preset_prime_power(r: u64, b: u32) -> Result<RelationModule> {
    if !is_prime(r) {
        return Err(Error::NotPrime(r));
    }
    if b == 0 {
        return Err(Error::InvalidInput("exponent b must be >= 1".into()));
    }
    let d = r
        .checked_pow(b)
        .filter(|&d| d <= 1 << 16)
        .ok_or_else(|| Error::InvalidInput("r^b too large".into()))? as usize;
    let s = d / r as usize;
    let rows: Vec<Vec<i64>> = (0..s)
        .map(|m| {
            let mut row = vec![0; d];
            for l in 0..r as usize {
                row[m + l * s] = 1;
            }
            row
        })
        .collect();
    let mut m = RelationModule::user(d, &rows)?;
    m.provenance = if b == 1 {
        Provenance::PresetPrimeCyclotomic
    } else {
        Provenance::PresetPrimePowerCyclotomic
    };
    Ok(m)
}
