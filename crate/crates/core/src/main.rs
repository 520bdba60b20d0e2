use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use etfspectra::coding::{self, Direction, MlieMode, Model};
use etfspectra::frames::{construct, Family, FrameSpec};
use etfspectra::functionals::FunctionalSpec;
use etfspectra::harness::{self, Config, FitModel, Profile, ResultsFile, Source};
use etfspectra::manova::{manova_atoms, manova_cdf, manova_density, ManovaParams};
use etfspectra::moments::{asymptotic_moment, ewb_bound, ewb_delta, exact_expected_moment};
use etfspectra::spectra::subset_spectra_batch;
use etfspectra::{io, rng, Error, Field, Result};

#[derive(Parser)]
#[command(name = "etfspectra", version, about = "Subset spectra of frames and their MANOVA limits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    #[command(subcommand)]
    Frames(FramesCmd),
    #[command(subcommand)]
    Spectra(SpectraCmd),
    #[command(subcommand)]
    Manova(ManovaCmd),
    #[command(subcommand)]
    Functional(FunctionalCmd),
    #[command(subcommand)]
    Moments(MomentsCmd),
    #[command(subcommand)]
    Coding(CodingCmd),
    #[command(subcommand)]
    Harness(HarnessCmd),
}

#[derive(Subcommand)]
enum FramesCmd {
    /// Build a frame and write it as a JSON frame container.
    Construct {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of bases for the Alltop family.
        #[arg(long)]
        redundancy: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SpectraCmd {
    /// Eigenvalues of random k-subsets; CSV trial,index,eigenvalue.
    Sample {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ManovaCmd {
    /// Density and CDF on a grid over the support; atoms go to <out>.atoms.json.
    Density {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FunctionalCmd {
    /// Per-trial functional values; CSV trial,value.
    Eval {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolyFormat {
    Latex,
    Json,
}

#[derive(Subcommand)]
enum MomentsCmd {
    /// Asymptotic moment polynomial in (p, x).
    Asymptotic {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = PolyFormat::Latex)]
        format: PolyFormat,
    },
    /// Erasure Welch bound and its finite-n correction.
    Ewb {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Exact expected moment polynomial coefficients of a frame.
    Exact {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        d: usize,
        /// Also evaluate at this erasure probability.
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DirArg {
    Sc,
    Cc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Mp,
    Manova,
}

#[derive(Subcommand)]
enum CodingCmd {
    /// Rate (sc) or capacity (cc) curve over an SDR/SNR grid in dB.
    Curve {
        #[arg(long, value_enum)]
        direction: DirArg,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = ModelArg::Manova)]
        model: ModelArg,
        /// start:stop:step in dB, inclusive.
        #[arg(long = "sdr-db", alias = "snr-db")]
        db: String,
        #[arg(long)]
        optimize_beta: bool,
        /// Fixed redundancy when --optimize-beta is absent.
        #[arg(long)]
        beta: Option<f64>,
        /// Use a grid scan with this many points instead of golden section.
        #[arg(long)]
        grid_scan: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean logarithmic inverse energy of k-subsets of a frame.
    Mlie {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        k: usize,
        /// Monte Carlo trials; exhaustive enumeration when absent.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct HarnessArgs {
    /// Flat key = value file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated ladder overriding the profile.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum HarnessCmd {
    /// KS variance exponent of a family and of the MANOVA baseline.
    Test1(HarnessArgs),
    /// Functional convergence exponent against the MANOVA baseline.
    Test2 {
        #[arg(long)]
        functional: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        common: HarnessArgs,
    },
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn parse_db_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Param(format!("bad dB range '{s}'"))))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [v] => Ok(vec![*v]),
        [a, b, step] if *step > 0.0 && b >= a => {
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(Error::Param(format!("dB range '{s}' must be start:stop:step with step > 0"))),
    }
}

fn harness_config(a: &HarnessArgs, extra: &[(&str, Option<String>)]) -> Result<Config> {
    let mut c = match &a.config {
        Some(p) => Config::parse(&std::fs::read_to_string(p)?)?,
        None => Config::default(),
    };
    let flags = [
        ("family", a.family.clone()),
        ("beta", a.beta.map(|v| v.to_string())),
        ("gamma", a.gamma.map(|v| v.to_string())),
        ("profile", a.profile.clone()),
        ("trials", a.trials.map(|v| v.to_string())),
        ("sizes", a.sizes.clone()),
        ("seed", a.seed.map(|v| v.to_string())),
        ("field", a.field.clone()),
    ];
    for (k, v) in flags.into_iter().chain(extra.iter().map(|(k, v)| (*k, v.clone()))) {
        if let Some(v) = v {
            c.set(k, v);
        }
    }
    Ok(c)
}

struct Plan {
    source: Source,
    baseline: Source,
    sizes: Vec<usize>,
    trials: usize,
    beta: f64,
    gamma: f64,
    seed: u64,
}

fn plan(c: &Config) -> Result<Plan> {
    let profile = Profile::parse(c.get("profile").unwrap_or("desk"))?;
    let field = match c.get("field").unwrap_or("complex") {
        "real" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(Error::Param(format!("unknown field '{other}'"))),
    };
    let sizes = match c.get("sizes") {
        Some(s) => s
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| Error::Param(format!("bad size '{v}'"))))
            .collect::<Result<Vec<usize>>>()?,
        None => profile.sizes(),
    };
    Ok(Plan {
        source: Source::parse(c.get("family").unwrap_or("dss"), field)?,
        baseline: Source::ManovaEnsemble(field),
        sizes,
        trials: c.get_parsed("trials")?.unwrap_or(profile.trials()),
        beta: c.get_parsed("beta")?.unwrap_or(0.8),
        gamma: c.get_parsed("gamma")?.unwrap_or(0.5),
        seed: c.get_parsed("seed")?.unwrap_or(0),
    })
}

fn write_results(out: &PathBuf, hash: &str, records: Vec<harness::ExperimentRecord>, fits: Vec<(String, harness::FitResult)>) -> Result<()> {
    if out.extension().is_some_and(|e| e == "json") {
        let mut w = create(out)?;
        serde_json::to_writer_pretty(&mut w, &ResultsFile::new(hash, records, fits))?;
        w.flush()?;
    } else {
        harness::write_records_csv(create(out)?, &records, hash)?;
        let mut fits_path = out.clone().into_os_string();
        fits_path.push(".fits.csv");
        harness::write_fits_csv(create(&PathBuf::from(fits_path))?, &fits, hash)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    harness::init_threads()?;
    match cli.cmd {
        Cmd::Frames(FramesCmd::Construct { family, n, m, seed, redundancy, out }) => {
            let f = construct(FrameSpec { family: Family::parse(&family)?, n, m, seed, redundancy })?;
            io::write_frame(&f, &out)?;
            eprintln!("wrote {}x{} {} frame to {}", f.m(), f.n(), f.family.name(), out.display());
        }
        Cmd::Spectra(SpectraCmd::Sample { frame, k, trials, seed, out }) => {
            let f = io::read_frame(&frame)?;
            let spectra = subset_spectra_batch(&f, k, trials, seed, &[rng::tag("sample"), f.n() as u64])?;
            io::write_eigenvalues_csv(create(&out)?, &spectra)?;
        }
        Cmd::Manova(ManovaCmd::Density { beta, gamma, grid, out }) => {
            let params = ManovaParams::new(beta, gamma)?;
            let e = params.edges();
            let rows: Vec<Vec<f64>> = (0..grid)
                .map(|i| {
                    let x = e.r_minus + (e.r_plus - e.r_minus) * i as f64 / (grid.max(2) - 1) as f64;
                    vec![x, manova_density(x, &params), manova_cdf(x, &params)]
                })
                .collect();
            io::write_table(create(&out)?, &["x", "pdf", "cdf"], &rows)?;
            let mut side = out.clone().into_os_string();
            side.push(".atoms.json");
            let mut w = create(&PathBuf::from(side))?;
            serde_json::to_writer_pretty(&mut w, &serde_json::json!({ "beta": beta, "gamma": gamma, "atoms": manova_atoms(&params) }))?;
            w.flush()?;
        }
        Cmd::Functional(FunctionalCmd::Eval { kind, frame, k, trials, seed, delta, alpha, out }) => {
            let f = io::read_frame(&frame)?;
            let spec = FunctionalSpec::parse(&kind, delta, alpha)?;
            let vals = harness::functional_values(&f, spec, k, trials, seed)?;
            let rows: Vec<Vec<f64>> = vals.iter().enumerate().map(|(t, v)| vec![t as f64, *v]).collect();
            io::write_table(create(&out)?, &["trial", "value"], &rows)?;
        }
        Cmd::Moments(MomentsCmd::Asymptotic { d, format }) => {
            let poly = asymptotic_moment(d)?;
            match format {
                PolyFormat::Latex => println!("{}", poly.to_latex()),
                PolyFormat::Json => println!("{}", serde_json::to_string_pretty(&poly.to_json())?),
            }
        }
        Cmd::Moments(MomentsCmd::Ewb { gamma, p, d, n }) => {
            println!("bound = {:.15}", ewb_bound(gamma, p, d, n)?);
            println!("delta = {:.15}", ewb_delta(gamma, p, d, n)?);
        }
        Cmd::Moments(MomentsCmd::Exact { frame, d, p }) => {
            let f = io::read_frame(&frame)?;
            let e = exact_expected_moment(&f, d)?;
            for (j, a) in e.a.iter().enumerate() {
                println!("a[{j}] = {a:.15}");
            }
            if let Some(p) = p {
                println!("m({p}) = {:.15}", e.eval(p));
            }
        }
        Cmd::Coding(CodingCmd::Curve { direction, p, model, db, optimize_beta, beta, grid_scan, out }) => {
            let dir = if direction == DirArg::Sc { Direction::Source } else { Direction::Channel };
            let model = match model {
                ModelArg::Mp => Model::Mp,
                ModelArg::Manova => Model::Manova,
            };
            let fixed = if optimize_beta || grid_scan.is_some() {
                None
            } else {
                Some(beta.ok_or_else(|| Error::Param("give --beta or --optimize-beta".into()))?)
            };
            let pts = coding::curve(dir, p, model, &parse_db_range(&db)?, fixed, grid_scan)?;
            let mut w = csv::Writer::from_writer(create(&out)?);
            match dir {
                Direction::Source => {
                    w.write_record(["y_db", "beta_opt", "rate", "benchmark_rdf", "benchmark_si"])?;
                    for c in &pts {
                        w.serialize((c.y_db, c.beta_opt, c.value, c.benchmark, c.benchmark_si))?;
                    }
                }
                Direction::Channel => {
                    w.write_record(["y_db", "beta_opt", "capacity", "benchmark_capacity"])?;
                    for c in &pts {
                        w.serialize((c.y_db, c.beta_opt, c.value, c.benchmark))?;
                    }
                }
            }
            w.flush()?;
        }
        Cmd::Coding(CodingCmd::Mlie { frame, k, trials, seed }) => {
            let f = io::read_frame(&frame)?;
            let mode = trials.map_or(MlieMode::Exact, |trials| MlieMode::MonteCarlo { trials, seed });
            let r = coding::mlie(&f, k, mode)?;
            println!("mlie = {:.15}", r.value);
            println!("patterns = {}", r.patterns);
            println!("divergent = {}", r.divergent);
        }
        Cmd::Harness(HarnessCmd::Test1(a)) => {
            let c = harness_config(&a, &[])?;
            let pl = plan(&c)?;
            let mut records = Vec::new();
            let mut fits = Vec::new();
            for src in [pl.source, pl.baseline] {
                let run = harness::run_ks_batch(src, &pl.sizes, pl.beta, pl.gamma, pl.trials, pl.seed)?;
                for s in &run.skipped {
                    eprintln!("skipped: {s}");
                }
                let fit = harness::fit_power_law(&run.records, FitModel::Test1)?;
                eprintln!("{}: slope {:.4} (se {:.4}, R2 {:.4})", src.name(), fit.slope, fit.stderr, fit.r2);
                fits.push((src.name(), fit));
                records.extend(run.records);
            }
            let p = harness::t_test_equal_slopes(&fits[0].1, &fits[1].1, fits[0].1.points, fits[1].1.points)?;
            eprintln!("equal-slope p-value {p:.3e}");
            write_results(&a.out, &c.hash(), records, fits)?;
        }
        Cmd::Harness(HarnessCmd::Test2 { functional, alpha, delta, common }) => {
            let c = harness_config(
                &common,
                &[
                    ("functional", functional),
                    ("alpha", alpha.map(|v| v.to_string())),
                    ("delta", delta.map(|v| v.to_string())),
                ],
            )?;
            let pl = plan(&c)?;
            let spec = FunctionalSpec::parse(
                c.get("functional").unwrap_or("shannon"),
                c.get_parsed("delta")?.unwrap_or(0.5),
                c.get_parsed("alpha")?.unwrap_or(1.0),
            )?;
            let base = harness::run_functional_batch(pl.baseline, &pl.sizes, spec, pl.beta, pl.gamma, pl.trials, pl.seed)?;
            let b0 = harness::fit_test2_baseline(&base.records)?;
            let ratio = b0.loglog_coef.unwrap_or(0.0) / b0.slope;
            let model = FitModel::Test2 { a0_b0_ratio: ratio };
            let base_fit = harness::fit_power_law(&base.records, model)?;
            let run = harness::run_functional_batch(pl.source, &pl.sizes, spec, pl.beta, pl.gamma, pl.trials, pl.seed)?;
            for s in run.skipped.iter().chain(&base.skipped) {
                eprintln!("skipped: {s}");
            }
            let fit = harness::fit_power_law(&run.records, model)?;
            let p = harness::t_test_equal_slopes(&fit, &base_fit, fit.points, base_fit.points)?;
            eprintln!("a0/b0 = {ratio:.4}; {} slope {:.4}, baseline slope {:.4}, p = {p:.3e}", pl.source.name(), fit.slope, base_fit.slope);
            let mut records = run.records;
            records.extend(base.records);
            let fits = vec![(pl.source.name(), fit), (pl.baseline.name(), base_fit), ("baseline-two-regressor".into(), b0)];
            write_results(&common.out, &c.hash(), records, fits)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
