use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use equidist::expsums::{kloosterman_family, su2_weyl_diagnostic, torus_orbit};
use equidist::ff::build_field;
use equidist::harness::{
    canonical_json, clt_regime_sweep, emit, gamma_to_gaussian, sweep, write_clt_csv,
    CltOptions, DistanceMethod, ExperimentConfig, FamilySpec, Format, PrimeSelection,
    ReferenceSpec, SCHEMA_VERSION,
};
use equidist::measures::{empirical_from_family, EmpiricalTorus, REAL_TOLERANCE};
use equidist::wasserstein::{
    fourier_bound_scan, log_grid, rate_bound_constant, su2_borda_diagnostic, PlanarMethod,
    TorusTarget,
};
use equidist::zlattice::{smith_normal_form, IntMatrix};
use equidist::{Error, Result};

#[derive(Parser)]
#[command(name = "equidist", version, about = "Exponential sums over finite fields and Wasserstein distances to their limiting measures")]
struct Cli {
    /// Master seed for every sampler.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// Exit with status 4 when a configured assertion fails.
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Dat,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
            OutFormat::Dat => Format::Dat,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Field parameters for F_{p^n}.
    Field {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Values of a family of sums.
    Sums {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Samples from a reference measure.
    Sample {
        #[command(flatten)]
        reference: ReferenceArgs,
        #[arg(long, default_value_t = 10_000)]
        m: usize,
    },
    /// W1 between one family and a reference measure.
    Wass {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        reference: ReferenceArgs,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 10)]
        sample_factor: usize,
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
    },
    /// Upper bounds and diagnostics.
    Bound {
        #[command(subcommand)]
        kind: BoundKind,
    },
    /// Run an experiment config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Normalized subgroup sums against the complex Gaussian and γ_d.
    Clt {
        /// Comma-separated q:d pairs.
        #[arg(long, value_delimiter = ',', required = true)]
        pairs: Vec<String>,
        #[arg(long, default_value_t = 2)]
        sample_factor: usize,
        #[arg(long, default_value_t = 5)]
        bootstrap: usize,
        #[arg(long)]
        sinkhorn: bool,
        /// d values for W1(γ_d, Gaussian) at fixed sample size.
        #[arg(long, value_delimiter = ',')]
        trend_d: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        trend_m: usize,
    },
    /// Smith normal form of an integer matrix given as JSON rows.
    Snf {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
}

#[derive(Subcommand)]
enum BoundKind {
    /// Fourier-side bound for the μ_d orbit over F_q against Haar on H_Z.
    Fourier {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 12)]
        t_max: u32,
        /// Compare with Lebesgue measure on the torus instead.
        #[arg(long)]
        lebesgue: bool,
    },
    /// Constant and exponent of the rate bound.
    Rate {
        #[arg(long)]
        z_size: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 1.0)]
        cz: f64,
    },
    /// SU(2) diagnostic for the Kl_2 family over F_p.
    Su2 {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 10)]
        t: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Line,
    Circle,
    Exact2d,
    Sinkhorn,
    Fourier,
}

impl From<MethodArg> for DistanceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Line => DistanceMethod::Line,
            MethodArg::Circle => DistanceMethod::Circle,
            MethodArg::Exact2d => DistanceMethod::Exact2d,
            MethodArg::Sinkhorn => DistanceMethod::Sinkhorn,
            MethodArg::Fourier => DistanceMethod::Fourier,
        }
    }
}

#[derive(Args)]
struct FamilyArgs {
    /// gaussian_period, root_set, hyper_kloosterman, mellin,
    /// subgroup_normalized or circle_grid.
    #[arg(long)]
    family: String,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    /// Integer coefficients, lowest degree first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly: Option<Vec<i64>>,
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec> {
        let mut m = Map::new();
        m.insert("kind".into(), json!(self.family));
        if let Some(d) = self.d {
            m.insert("d".into(), json!(d));
        }
        if let Some(r) = self.r {
            m.insert("r".into(), json!(r));
        }
        if let Some(p) = &self.poly {
            m.insert("poly".into(), json!(p));
        }
        serde_json::from_value(Value::Object(m)).map_err(|e| Error::Config(format!("family: {e}")))
    }
}

#[derive(Args)]
struct ReferenceArgs {
    /// sato_tate, arc_sine2cos, complex_gaussian, haar_prime,
    /// haar_prime_power, gamma, lebesgue_circle or lebesgue_torus.
    #[arg(long)]
    reference: String,
    #[arg(long)]
    ref_d: Option<u64>,
    #[arg(long)]
    ref_r: Option<u64>,
    #[arg(long)]
    ref_b: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
}

impl ReferenceArgs {
    fn spec(&self) -> Result<ReferenceSpec> {
        let mut m = Map::new();
        m.insert("kind".into(), json!(self.reference));
        if let Some(d) = self.ref_d {
            m.insert("d".into(), json!(d));
        }
        if let Some(r) = self.ref_r {
            m.insert("r".into(), json!(r));
        }
        if let Some(b) = self.ref_b {
            m.insert("b".into(), json!(b));
        }
        if let Some(k) = self.k {
            m.insert("k".into(), json!(k));
        }
        if let Some(s) = self.scale {
            m.insert("scale".into(), json!(s));
        }
        serde_json::from_value(Value::Object(m))
            .map_err(|e| Error::Config(format!("reference: {e}")))
    }
}

enum Failure {
    Error(Error),
    /// A math guard reported inside a sweep record.
    Guard(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(out: Option<&Path>, v: &impl serde::Serialize) -> Result<()> {
    let mut w = writer(out)?;
    w.write_all(canonical_json(v)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be >= 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    let format = cli.format.map(Format::from);
    match cli.command {
        Command::Field { p, n } => {
            let ctx = build_field(p, n)?;
            write_json(
                out,
                &json!({
                    "p": ctx.p(),
                    "n": ctx.degree(),
                    "q": ctx.q(),
                    "generator": ctx.generator(),
                    "modulus_poly": ctx.modulus_poly(),
                    "has_tables": ctx.has_tables(),
                }),
            )?;
        }
        Command::Sums { family, p, n } => {
            let ctx = build_field(p, n)?;
            let fam = family.spec()?.build(&ctx)?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => write_json(out, &fam)?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    fam.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Dat => return Err(Error::Config("sums has no dat output".into()).into()),
            }
        }
        Command::Sample { reference, m } => {
            let spec = reference.spec()?;
            let measure = spec.sample(m, seed)?;
            let mut w = writer(out)?;
            measure.write_csv(&mut w)?;
            w.flush()?;
            if let Some(path) = out {
                let source = serde_json::to_string(&spec).map_err(Error::from)?;
                let mut meta = measure.sidecar(&source);
                meta["seed"] = json!(seed);
                fs::write(path.with_extension("meta.json"), canonical_json(&meta)?)?;
            }
        }
        Command::Wass {
            family,
            reference,
            q,
            method,
            sample_factor,
            bootstrap,
        } => {
            let fam = family.spec()?;
            let congruent_one_mod = match fam {
                FamilySpec::GaussianPeriod { d } | FamilySpec::SubgroupNormalized { d } => Some(d),
                _ => None,
            };
            let cfg = ExperimentConfig {
                schema_version: SCHEMA_VERSION,
                family: fam,
                primes: PrimeSelection {
                    list: Some(vec![q]),
                    congruent_one_mod,
                    ..Default::default()
                },
                reference: reference.spec()?,
                method: method.into(),
                sample_factor,
                bootstrap,
                seed,
                threads: cli.threads.unwrap_or(1),
                output: None,
                max_seconds_per_prime: None,
                rate: None,
                allowance_factor: 3.0,
                fourier_t_max: 16,
                check: Default::default(),
            };
            let report = sweep(&cfg)?;
            let rec = report
                .records
                .first()
                .ok_or_else(|| Error::InvalidInput(format!("q = {q} is not ≡ 1 mod d")))?;
            if let Some(e) = &rec.error {
                return Err(Failure::Guard(e.clone()));
            }
            write_json(out, rec)?;
        }
        Command::Bound { kind } => match kind {
            BoundKind::Fourier { q, d, t_max, lebesgue } => {
                let ctx = build_field(q, 1)?;
                let orbit = torus_orbit(&ctx, &ctx.cyclic_roots(d)?)?;
                let mu = EmpiricalTorus::from_orbit(&orbit)?;
                let sampler = ReferenceSpec::HaarPrime { d, scale: 1.0 }.sampler(seed)?;
                let target = match (&sampler, lebesgue) {
                    (Some(s), false) => TorusTarget::Haar(s),
                    _ => TorusTarget::Lebesgue,
                };
                let report = fourier_bound_scan(&mu, target, &log_grid(t_max, 4))?;
                write_json(out, &report)?;
            }
            BoundKind::Rate { z_size, degree, cz } => {
                let (constant, exponent) = rate_bound_constant(z_size, degree, cz)?;
                write_json(out, &json!({"constant": constant, "exponent": exponent}))?;
            }
            BoundKind::Su2 { p, t } => {
                let ctx = build_field(p, 1)?;
                let fam = kloosterman_family(&ctx, 2)?;
                let measure = empirical_from_family(&fam, true, 1.0, REAL_TOLERANCE)?;
                let equidist::measures::Measure::Line(line) = measure else {
                    return Err(Error::InvalidInput("Kl_2 values are not real".into()).into());
                };
                let weyl = (1..=t)
                    .map(|n| Ok(Complex64::new(su2_weyl_diagnostic(&line.atoms, n)?, 0.0)))
                    .collect::<Result<Vec<_>>>()?;
                let diag = su2_borda_diagnostic(&weyl, t)?;
                write_json(out, &diag)?;
            }
        },
        Command::Sweep { config } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(t) = cli.threads {
                cfg.threads = t;
            }
            let report = sweep(&cfg)?;
            for r in &report.records {
                eprintln!(
                    "q = {:>8}  w1 = {:<24}  {:.2}s{}",
                    r.q,
                    r.w1.map(|w| format!("{w:.10e}")).unwrap_or_else(|| "-".into()),
                    r.seconds,
                    r.error.as_ref().map(|e| format!("  ({e})")).unwrap_or_default()
                );
            }
            match &report.fit {
                Some(f) => eprintln!("slope {:.6}, intercept {:.6}", f.slope, f.intercept),
                None => eprintln!("no fit: {}", report.fit_error.as_deref().unwrap_or("")),
            }
            let target = out.map(Path::to_path_buf).or_else(|| cfg.output.clone());
            emit(&report, format.unwrap_or(Format::Json), writer(target.as_deref())?)?;
            if cli.check && !report.checks_passed() {
                let failed: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{}: {}", c.name, c.detail))
                    .collect();
                return Err(Failure::Check(failed.join("; ")));
            }
        }
        Command::Clt {
            pairs,
            sample_factor,
            bootstrap,
            sinkhorn,
            trend_d,
            trend_m,
        } => {
            let pairs = pairs
                .iter()
                .map(|s| {
                    let (q, d) = s
                        .split_once(':')
                        .ok_or_else(|| Error::Config(format!("pair {s:?} is not q:d")))?;
                    let parse = |x: &str| {
                        x.trim()
                            .parse::<u64>()
                            .map_err(|e| Error::Config(format!("pair {s:?}: {e}")))
                    };
                    Ok((parse(q)?, parse(d)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let opts = CltOptions {
                sample_factor,
                bootstrap,
                seed,
                method: if sinkhorn { PlanarMethod::Sinkhorn } else { PlanarMethod::Exact },
                ..Default::default()
            };
            let records = clt_regime_sweep(&pairs, &opts)?;
            let trend = trend_d
                .iter()
                .map(|&d| Ok(json!({"d": d, "w1": gamma_to_gaussian(d, trend_m, seed)?})))
                .collect::<Result<Vec<Value>>>()?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => write_json(out, &json!({"records": records, "trend": trend}))?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    write_clt_csv(&records, &mut w)?;
                    w.flush()?;
                    for t in &trend {
                        eprintln!("gamma_{} to Gaussian: {}", t["d"], t["w1"]);
                    }
                }
                Format::Dat => return Err(Error::Config("clt has no dat output".into()).into()),
            }
            if cli.check && !records.iter().all(|r| r.within_bound) {
                return Err(Failure::Check("a W1 to γ_d exceeds its bound".into()));
            }
        }
        Command::Snf { matrix } => {
            let rows: Vec<Vec<i64>> = serde_json::from_str(&matrix)
                .map_err(|e| Error::Config(format!("matrix: {e}")))?;
            let cols = rows.first().map_or(0, Vec::len);
            if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
                return Err(Error::Config("matrix rows must be nonempty and of equal length".into()).into());
            }
            let snf = smith_normal_form(&IntMatrix::from_rows(&rows, cols))?;
            let show = |m: &IntMatrix| -> Value {
                (0..m.rows())
                    .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
                    .into()
            };
            write_json(
                out,
                &json!({
                    "d": show(&snf.d),
                    "u": show(&snf.u),
                    "v": show(&snf.v),
                    "diagonal": snf.diagonal().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "rank": snf.rank(),
                }),
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_math_guard() { 3 } else { 2 })
        }
    }
}
