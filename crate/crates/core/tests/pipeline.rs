use num_complex::Complex64;

use equidist::expsums::{kloosterman_direct, kloosterman_family, su2_weyl_diagnostic};
use equidist::ff::build_field;
use equidist::harness::{
    canonical_json, emit, gamma_to_gaussian, planar_with_allowance, shrinking_target_count,
    std_dev, sweep, ExperimentConfig, Format, ReferenceSpec, SweepReport,
};
use equidist::measures::{empirical_from_family, gamma_d_sampler, Empirical1D, Empirical2D, Measure, ReferenceMeasure, REAL_TOLERANCE};
use equidist::wasserstein::{su2_borda_diagnostic, w1_line_reference, PlanarMethod};
use equidist::zlattice::{build_sampler, relation_preset_prime, sigma_pushforward_sample};

fn bytes(report: &SweepReport, f: Format) -> Vec<u8> {
    let mut buf = Vec::new();
    emit(report, f, &mut buf).unwrap();
    buf
}

const PLANAR: &str = r#"{"schema_version": 1, "family": {"kind": "gaussian_period", "d": 3},
    "primes": {"range": [7, 80], "congruent_one_mod": 3},
    "reference": {"kind": "haar_prime", "d": 3}, "method": "exact2d",
    "sample_factor": 4, "bootstrap": 3, "seed": 11}"#;

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let one = ExperimentConfig::from_json(PLANAR).unwrap();
    let mut many = one.clone();
    many.threads = 4;
    let a = sweep(&one).unwrap();
    let b = sweep(&one).unwrap();
    let mut c = sweep(&many).unwrap();
    c.config.threads = 1;
    for f in [Format::Csv, Format::Json, Format::Dat] {
        assert_eq!(bytes(&a, f), bytes(&b, f));
        assert_eq!(bytes(&a, f), bytes(&c, f));
    }
    // ν_p keeps a = 0, so the family has q atoms
    assert!(a.records.iter().all(|r| r.atoms as u64 == r.q && r.reference_atoms == 4 * r.atoms));
}

#[test]
fn json_round_trip_is_idempotent() {
    let r = sweep(&ExperimentConfig::from_json(PLANAR).unwrap()).unwrap();
    let first = canonical_json(&r).unwrap();
    let back: SweepReport = serde_json::from_str(&first).unwrap();
    assert_eq!(canonical_json(&back).unwrap(), first);
}

#[test]
fn grid_dat_lies_on_the_exact_line() {
    let c = ExperimentConfig::from_json(
        r#"{"schema_version": 1, "family": {"kind": "circle_grid"},
            "primes": {"list": [10, 100, 1000]},
            "reference": {"kind": "lebesgue_circle"}, "method": "circle"}"#,
    )
    .unwrap();
    let text = String::from_utf8(bytes(&sweep(&c).unwrap(), Format::Dat)).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .map(|l| {
            let mut it = l.split(' ').map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    for (x, y) in rows {
        assert!((y - (-x + 0.25f64.log10())).abs() < 1e-12);
    }
}

#[test]
fn shrinking_target_regression() {
    let p = 1009u64;
    let ctx = build_field(p, 1).unwrap();
    let fam = kloosterman_family(&ctx, 2).unwrap();
    let t = Complex64::new(2.0, 0.0);
    let eps = (p as f64).powf(-2.0 / 15.0);
    let count = shrinking_target_count(&fam, t, eps);
    // oracle: direct summation of every Kl_2(a)
    let direct = (1..p)
        .filter(|&a| (kloosterman_direct(&ctx, 2, a).unwrap() - t).norm() <= eps)
        .count();
    assert_eq!(count, direct);
    assert_eq!(count, 49);
}

#[test]
fn su2_diagnostic_decreases_with_p() {
    let values: Vec<f64> = [101u64, 1009, 10007]
        .iter()
        .map(|&p| {
            let ctx = build_field(p, 1).unwrap();
            let Measure::Line(m) =
                empirical_from_family(&kloosterman_family(&ctx, 2).unwrap(), true, 1.0, REAL_TOLERANCE).unwrap()
            else {
                panic!("Kl_2 is real")
            };
            let w: Vec<Complex64> =
                (1..=10).map(|n| Complex64::new(su2_weyl_diagnostic(&m.atoms, n).unwrap(), 0.0)).collect();
            su2_borda_diagnostic(&w, 10).unwrap().value
        })
        .collect();
    let inversions = values.windows(2).filter(|w| w[1] >= w[0]).count();
    assert!(inversions <= 1, "{values:?}");
    assert!(values[2] < values[0]);
}

fn energy_statistic(x: &[Complex64], y: &[Complex64]) -> f64 {
    let mean = |a: &[Complex64], b: &[Complex64]| {
        a.iter().map(|p| b.iter().map(|q| (p - q).norm()).sum::<f64>()).sum::<f64>() / (a.len() * b.len()) as f64
    };
    2.0 * mean(x, y) - mean(x, x) - mean(y, y)
}

/// Permutation p-value of the two-sample energy statistic.
fn energy_p_value(x: &[Complex64], y: &[Complex64], rounds: usize) -> f64 {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let observed = energy_statistic(x, y);
    let mut pooled: Vec<Complex64> = x.iter().chain(y).copied().collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let above = (0..rounds)
        .filter(|_| {
            pooled.shuffle(&mut rng);
            let (a, b) = pooled.split_at(x.len());
            energy_statistic(a, b) >= observed
        })
        .count();
    (above + 1) as f64 / (rounds + 1) as f64
}

#[test]
fn haar_pushforward_matches_gamma_d() {
    let d = 5u64;
    let m = 400;
    let sampler = build_sampler(&relation_preset_prime(d).unwrap(), 21).unwrap();
    let s = 1.0 / (d as f64).sqrt();
    let haar: Vec<Complex64> = sigma_pushforward_sample(&sampler, m).into_iter().map(|z| z * s).collect();
    let gamma = gamma_d_sampler(d as usize, 22, m).unwrap().points;
    assert!(energy_p_value(&haar, &gamma, 99) > 0.01);
    // negative control: without the 1/√d scale the laws differ
    let unscaled: Vec<Complex64> = haar.iter().map(|z| z / s).collect();
    assert!(energy_p_value(&unscaled, &gamma, 99) <= 0.01);
}

#[test]
fn gamma_two_is_a_scaled_arcsine_law() {
    let g = gamma_d_sampler(2, 5, 20_000).unwrap();
    assert!(g.points.iter().all(|z| z.im.abs() < 1e-12));
    let scaled = Empirical1D::uniform(g.points.iter().map(|z| z.re * 2f64.sqrt()).collect()).unwrap();
    let w = w1_line_reference(&scaled, &ReferenceMeasure::ArcSine2cos).unwrap();
    assert!(w < 0.03, "{w}");
}

#[test]
fn gamma_to_gaussian_trend() {
    let ds = [3usize, 5, 7, 11, 13];
    let w: Vec<f64> = ds.iter().map(|&d| gamma_to_gaussian(d, 1500, 3).unwrap()).collect();
    let inversions = w.windows(2).filter(|p| p[1] >= p[0]).count();
    assert!(inversions <= 1, "{w:?}");
    assert!(w[4] < w[0]);
}

#[test]
fn arcsine_to_gaussian_is_stable_across_seeds() {
    let m = 1000;
    let gauss = ReferenceSpec::ComplexGaussian;
    let as_plane = |x: Measure| match x {
        Measure::Plane(p) => p,
        _ => unreachable!(),
    };
    let values: Vec<f64> = (0..4u64)
        .map(|seed| {
            let g: Empirical2D = gamma_d_sampler(2, 100 + seed, m).unwrap();
            planar_with_allowance(&g, |s| Ok(as_plane(gauss.sample(m, s)?)), PlanarMethod::Exact, seed, 0)
                .unwrap()
                .0
        })
        .collect();
    let g = gamma_d_sampler(2, 7, m).unwrap();
    let (_, spread, _, _) =
        planar_with_allowance(&g, |s| Ok(as_plane(gauss.sample(m, s)?)), PlanarMethod::Exact, 8, 5).unwrap();
    let spread = spread.unwrap();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    assert!(values.iter().all(|v| (v - mean).abs() <= 4.0 * spread.max(std_dev(&values))), "{values:?} {spread}");
    assert!(std_dev(&values) <= 4.0 * spread, "{values:?} {spread}");
}

#[test]
fn mellin_values_are_recorded() {
    // trend data only: W1 to Sato–Tate against 1/log p
    let c = ExperimentConfig::from_json(
        r#"{"schema_version": 1, "family": {"kind": "mellin"},
            "primes": {"list": [101, 211, 401, 809]},
            "reference": {"kind": "sato_tate"}, "method": "line"}"#,
    )
    .unwrap();
    let r = sweep(&c).unwrap();
    for rec in &r.records {
        let w = rec.w1.unwrap();
        assert!(w.is_finite() && w > 0.0);
        assert_eq!(rec.atoms as u64, rec.q - 2);
        println!("p = {}: W1 = {w:.5}, W1·log p = {:.4}", rec.q, w * (rec.q as f64).ln());
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!cfg.primes.values().unwrap().is_empty());
        n += 1;
    }
    assert!(n >= 4);
}
