use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsums::{
    gaussian_period_family, kloosterman_family, mellin_family, rootset_family,
    subgroup_family_normalized, SumFamily,
};
use crate::ff::{is_prime, primes_in, FieldContext};
use crate::measures::{gamma_d_sampler, Measure, ReferenceMeasure};
use crate::zlattice::{
    build_sampler, relation_preset_prime, relation_preset_prime_power, TorusSubgroupSampler,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    GaussianPeriod { d: u64 },
    RootSet { poly: Vec<i64> },
    HyperKloosterman { r: u32 },
    Mellin,
    SubgroupNormalized { d: u64 },
    /// N equally spaced points on R/Z; the swept parameter is N, not a prime.
    CircleGrid,
}

impl FamilySpec {
    pub fn build(&self, ctx: &FieldContext) -> Result<SumFamily> {
        match self {
            FamilySpec::GaussianPeriod { d } => gaussian_period_family(ctx, *d),
            FamilySpec::RootSet { poly } => rootset_family(ctx, poly),
            FamilySpec::HyperKloosterman { r } => kloosterman_family(ctx, *r),
            FamilySpec::Mellin => mellin_family(ctx),
            FamilySpec::SubgroupNormalized { d } => subgroup_family_normalized(ctx, *d),
            FamilySpec::CircleGrid => Err(Error::InvalidInput(
                "the circle grid is not a family of sums".into(),
            )),
        }
    }

    /// d with q ≡ 1 mod d required, if any.
    fn required_modulus(&self) -> Option<u64> {
        match self {
            FamilySpec::GaussianPeriod { d } | FamilySpec::SubgroupNormalized { d } => Some(*d),
            _ => None,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    SatoTate,
    ArcSine2cos,
    ComplexGaussian,
    /// σ_* Haar on H_Z for Z = μ_d, d prime.
    HaarPrime {
        d: u64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// σ_* Haar on H_Z for Z = μ_{r^b}.
    HaarPrimePower {
        r: u64,
        b: u32,
        #[serde(default = "one")]
        scale: f64,
    },
    Gamma { d: usize },
    LebesgueCircle,
    LebesgueTorus { k: usize },
}

impl ReferenceSpec {
    pub fn sampler(&self, seed: u64) -> Result<Option<TorusSubgroupSampler>> {
        let module = match self {
            ReferenceSpec::HaarPrime { d, .. } => relation_preset_prime(*d)?,
            ReferenceSpec::HaarPrimePower { r, b, .. } => relation_preset_prime_power(*r, *b)?,
            _ => return Ok(None),
        };
        build_sampler(&module, seed).map(Some)
    }

    pub fn measure(&self) -> Result<Option<ReferenceMeasure>> {
        Ok(Some(match self {
            ReferenceSpec::SatoTate => ReferenceMeasure::SatoTate,
            ReferenceSpec::ArcSine2cos => ReferenceMeasure::ArcSine2cos,
            ReferenceSpec::ComplexGaussian => ReferenceMeasure::ComplexGaussianHalfId,
            ReferenceSpec::HaarPrime { scale, .. } | ReferenceSpec::HaarPrimePower { scale, .. } => {
                ReferenceMeasure::HaarPushforward {
                    sampler: self.sampler(0)?.expect("Haar spec"),
                    scale: *scale,
                }
            }
            ReferenceSpec::Gamma { .. } => return Ok(None),
            ReferenceSpec::LebesgueCircle => ReferenceMeasure::LebesgueCircle,
            ReferenceSpec::LebesgueTorus { k } => ReferenceMeasure::LebesgueTorus(*k),
        }))
    }

    /// `m` uniform samples drawn with `seed`.
    pub fn sample(&self, m: usize, seed: u64) -> Result<Measure> {
        match self {
            ReferenceSpec::Gamma { d } => Ok(Measure::Plane(gamma_d_sampler(*d, seed, m)?)),
            _ => self.measure()?.expect("sampled spec").sample(m, seed),
        }
    }

    /// Whether W1 to this reference is computed exactly on the line.
    pub fn has_line_cdf(&self) -> bool {
        matches!(self, ReferenceSpec::SatoTate | ReferenceSpec::ArcSine2cos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Line,
    Circle,
    Exact2d,
    Sinkhorn,
    Fourier,
}

/// Which q to sweep.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSelection {
    /// Inclusive [lo, hi]; primes only.
    #[serde(default)]
    pub range: Option<[u64; 2]>,
    /// Explicit values, used as given (the circle grid takes any N ≥ 1).
    #[serde(default)]
    pub list: Option<Vec<u64>>,
    /// Keep q ≡ 1 mod this.
    #[serde(default)]
    pub congruent_one_mod: Option<u64>,
    /// With `log_spaced`, keep every candidate up to this value ...
    #[serde(default)]
    pub dense_below: Option<u64>,
    /// ... and this many roughly log-spaced candidates above it.
    #[serde(default)]
    pub log_spaced: Option<usize>,
}

impl PrimeSelection {
    pub fn values(&self) -> Result<Vec<u64>> {
        let mut out: Vec<u64> = match (&self.range, &self.list) {
            (Some([lo, hi]), None) => primes_in(*lo, *hi),
            (None, Some(list)) => list.clone(),
            _ => {
                return Err(Error::Config(
                    "give exactly one of primes.range and primes.list".into(),
                ))
            }
        };
        if let Some(m) = self.congruent_one_mod {
            if m == 0 {
                return Err(Error::Config("congruent_one_mod must be positive".into()));
            }
            out.retain(|&q| q % m == 1 % m);
        }
        out.sort_unstable();
        out.dedup();
        if let (Some(cut), Some(k)) = (self.dense_below, self.log_spaced) {
            let (dense, above): (Vec<u64>, Vec<u64>) = out.iter().partition(|&&q| q <= cut);
            out = dense;
            if let (Some(&first), Some(&last)) = (above.first(), above.last()) {
                let (lo, hi) = ((first as f64).ln(), (last as f64).ln());
                let mut picks: Vec<u64> = (0..k)
                    .filter_map(|i| {
                        let t = if k == 1 { hi } else { lo + (hi - lo) * i as f64 / (k - 1) as f64 };
                        let target = t.exp();
                        above.iter().copied().find(|&q| q as f64 >= target * (1.0 - 1e-12))
                    })
                    .collect();
                picks.dedup();
                out.extend(picks);
            }
        } else if self.dense_below.is_some() || self.log_spaced.is_some() {
            return Err(Error::Config(
                "dense_below and log_spaced go together".into(),
            ));
        }
        Ok(out)
    }
}

/// W1 ≤ constant · q^{-exponent}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSpec {
    pub constant: f64,
    pub exponent: f64,
}

/// Assertions evaluated in `--check` mode.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    #[serde(default)]
    pub max_slope: Option<f64>,
    /// Every record must satisfy the rate bound plus its allowance.
    #[serde(default)]
    pub rate_bound: bool,
}

fn default_sample_factor() -> usize {
    10
}
fn default_bootstrap() -> usize {
    5
}
fn default_threads() -> usize {
    1
}
fn default_allowance_factor() -> f64 {
    3.0
}
fn default_t_max() -> u32 {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub family: FamilySpec,
    pub primes: PrimeSelection,
    pub reference: ReferenceSpec,
    pub method: DistanceMethod,
    /// Reference sample size per atom of the family measure.
    #[serde(default = "default_sample_factor")]
    pub sample_factor: usize,
    /// Resamples used for the sampling allowance; 0 disables it.
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub max_seconds_per_prime: Option<f64>,
    #[serde(default)]
    pub rate: Option<RateSpec>,
    /// Multiple of the allowance added to the rate bound.
    #[serde(default = "default_allowance_factor")]
    pub allowance_factor: f64,
    /// Largest truncation scanned by the Fourier method.
    #[serde(default = "default_t_max")]
    pub fourier_t_max: u32,
    #[serde(default)]
    pub check: CheckSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.threads == 0 {
            return bad("threads must be >= 1");
        }
        if self.sample_factor == 0 {
            return bad("sample_factor must be >= 1");
        }
        if self.bootstrap == 1 {
            return bad("bootstrap needs 0 or at least 2 resamples");
        }
        if let Some(d) = self.family.required_modulus() {
            match self.primes.congruent_one_mod {
                Some(m) if m % d == 0 => {}
                _ => return bad("this family needs primes.congruent_one_mod divisible by d"),
            }
            if !is_prime(d) && matches!(self.family, FamilySpec::SubgroupNormalized { .. }) {
                return bad("subgroup_normalized needs a prime d");
            }
        }
        if self.family == FamilySpec::CircleGrid && self.primes.list.is_none() {
            return bad("circle_grid takes primes.list as its sizes");
        }
        use DistanceMethod as M;
        use ReferenceSpec as R;
        let ok = match self.method {
            M::Line => self.reference.has_line_cdf(),
            M::Circle => matches!(self.reference, R::LebesgueCircle),
            M::Exact2d | M::Sinkhorn => !matches!(
                self.reference,
                R::LebesgueCircle | R::LebesgueTorus { .. }
            ),
            M::Fourier => {
                matches!(self.family, FamilySpec::GaussianPeriod { .. })
                    && matches!(
                        self.reference,
                        R::HaarPrime { .. } | R::HaarPrimePower { .. } | R::LebesgueTorus { .. }
                    )
            }
        };
        if !ok {
            return bad("method and reference do not fit together");
        }
        if (self.family == FamilySpec::CircleGrid) != (self.method == M::Circle) {
            return bad("the circle method is for circle_grid");
        }
        if let Some(r) = &self.rate {
            if !(r.constant > 0.0) || !r.exponent.is_finite() {
                return bad("rate.constant must be positive");
            }
        }
        if self.check.rate_bound && self.rate.is_none() {
            return bad("check.rate_bound needs a rate");
        }
        if self.fourier_t_max == 0 {
            return bad("fourier_t_max must be positive");
        }
        self.primes.values()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "schema_version": 1,
        "family": {"kind": "gaussian_period", "d": 3},
        "primes": {"range": [7, 200], "congruent_one_mod": 3},
        "reference": {"kind": "haar_prime", "d": 3},
        "method": "exact2d"
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(c.sample_factor, 10);
        assert_eq!(c.bootstrap, 5);
        assert_eq!(c.threads, 1);
        let v = c.primes.values().unwrap();
        assert_eq!(&v[..4], &[7, 13, 19, 31]);
        assert!(v.iter().all(|q| q % 3 == 1));
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = BASE.replace("\"method\"", "\"colour\": 1, \"method\"");
        assert!(matches!(ExperimentConfig::from_json(&unknown), Err(Error::Config(_))));
        let version = BASE.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(ExperimentConfig::from_json(&version).is_err());
        let congruence = BASE.replace("\"congruent_one_mod\": 3", "\"congruent_one_mod\": 2");
        assert!(ExperimentConfig::from_json(&congruence).is_err());
        let threads = BASE.replace("\"method\": \"exact2d\"", "\"method\": \"exact2d\", \"threads\": 0");
        assert!(ExperimentConfig::from_json(&threads).is_err());
        let mismatch = BASE.replace("exact2d", "line");
        assert!(ExperimentConfig::from_json(&mismatch).is_err());
        let field = BASE.replace("\"d\": 3}", "\"d\": 3, \"e\": 1}");
        assert!(ExperimentConfig::from_json(&field).is_err());
    }

    #[test]
    fn thinning() {
        let sel = PrimeSelection {
            range: Some([7, 10_000]),
            congruent_one_mod: Some(3),
            dense_below: Some(100),
            log_spaced: Some(5),
            ..Default::default()
        };
        let v = sel.values().unwrap();
        let dense = v.iter().filter(|&&q| q <= 100).count();
        assert_eq!(dense, primes_in(7, 100).iter().filter(|q| *q % 3 == 1).count());
        assert_eq!(v.len(), dense + 5);
        assert_eq!(*v.last().unwrap(), 9973);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
}
