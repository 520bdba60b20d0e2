//! Monte Carlo experiment harness: KS and functional batches over size
//! ladders, power-law fits, slope t-tests and result export.
//!
//! Seeds: trial t at size n of experiment `label` uses the stream
//! `rng::stream(seed, [tag(label), n, t])`, so results do not depend on the
//! thread count or completion order.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{param, Error, Result};
use crate::frames::{construct, dss_parameters, Family, Field, FrameSpec};
use crate::functionals::{evaluate, limiting_value, FunctionalSpec, Limit};
use crate::manova::{EdgeLaw, ManovaParams};
use crate::numeric::{mean, ols, t_two_sided, variance};
use crate::rng;
use crate::spectra::{ks_distance, manova_ensemble_batch, subset_spectra_batch, SubsetSpectrum};

/// Where the subset spectra come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Frame(Family),
    ManovaEnsemble(Field),
}

impl Source {
    pub fn parse(s: &str, field: Field) -> Result<Source> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "manova" | "manova-ensemble" => Ok(Source::ManovaEnsemble(field)),
            other => Ok(Source::Frame(Family::parse(other)?)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Source::Frame(f) => f.name().to_string(),
            Source::ManovaEnsemble(Field::Complex) => "manova-complex".into(),
            Source::ManovaEnsemble(Field::Real) => "manova-real".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Desk,
    Full,
}

impl Profile {
    pub fn parse(s: &str) -> Result<Profile> {
        match s {
            "desk" => Ok(Profile::Desk),
            "full" => Ok(Profile::Full),
            _ => param(format!("unknown profile '{s}'")),
        }
    }

    /// Base ladder; primes = 3 mod 4 so the difference-set family exists.
    pub fn sizes(self) -> Vec<usize> {
        match self {
            Profile::Desk => vec![103, 211, 431, 863],
            Profile::Full => vec![103, 211, 431, 863, 1319, 1999],
        }
    }

    pub fn trials(self) -> usize {
        match self {
            Profile::Desk => 500,
            Profile::Full => 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Realized k/m and m/n.
    pub beta: f64,
    pub gamma: f64,
    pub trials: usize,
    /// "ks" or the functional name.
    pub statistic: String,
    /// Per-trial Delta_KS, or per-trial squared deviations from the limit.
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub mean_square: f64,
    pub seed: u64,
    /// Seconds; excluded from CSV output so that files are reproducible.
    pub wall_time: f64,
}

impl ExperimentRecord {
    fn new(source: &Source, (n, m, k): (usize, usize, usize), statistic: &str, values: Vec<f64>, seed: u64, t0: Instant) -> Result<Self> {
        if values.len() < 2 {
            return param("a variance record needs at least two trials");
        }
        Ok(ExperimentRecord {
            source: source.name(),
            n,
            m,
            k,
            beta: k as f64 / m as f64,
            gamma: m as f64 / n as f64,
            trials: values.len(),
            statistic: statistic.into(),
            mean: mean(&values),
            variance: variance(&values),
            mean_square: values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64,
            values,
            seed,
            wall_time: t0.elapsed().as_secs_f64(),
        })
    }
}

/// Frame size actually used for a requested ladder entry.
pub fn realize_size(source: Source, n: usize) -> usize {
    match source {
        Source::Frame(Family::SpikesSines | Family::SpikesHadamard) => n - n % 2,
        _ => n,
    }
}

enum Sampler {
    Frame(crate::frames::FrameMatrix),
    Ensemble(Field),
}

fn prepare(source: Source, n: usize, beta: f64, gamma: f64, seed: u64) -> Result<(Sampler, (usize, usize, usize))> {
    let n = realize_size(source, n);
    let (sampler, n, m) = match source {
        Source::ManovaEnsemble(field) => {
            let m = (gamma * n as f64).floor() as usize;
            (Sampler::Ensemble(field), n, m)
        }
        Source::Frame(family) => {
            let m = match family {
                Family::Dss => Some(dss_parameters(n)?.0),
                _ => Some(((gamma * n as f64).floor() as usize).max(1)),
            };
            let f = construct(FrameSpec { family, n, m, seed: rng::split(seed, &[rng::tag("frame"), n as u64]), redundancy: None })?;
            let (n, m) = (f.n(), f.m());
            (Sampler::Frame(f), n, m)
        }
    };
    let k = (beta * m as f64).round() as usize;
    if k == 0 || k > n {
        return param(format!("beta={beta} gives k={k} at n={n}, m={m}"));
    }
    Ok((sampler, (n, m, k)))
}

fn draw(sampler: &Sampler, (n, m, k): (usize, usize, usize), trials: usize, seed: u64, label: &str) -> Result<Vec<SubsetSpectrum>> {
    let path = [rng::tag(label), n as u64];
    match sampler {
        Sampler::Frame(f) => subset_spectra_batch(f, k, trials, seed, &path),
        Sampler::Ensemble(field) => manova_ensemble_batch(n, m, k, *field, trials, seed, &path),
    }
}

/// Outcome of a ladder run: records plus notices for skipped sizes.
#[derive(Debug, Clone, Default)]
pub struct LadderRun {
    pub records: Vec<ExperimentRecord>,
    pub skipped: Vec<String>,
}

/// KS distance of each subset spectrum to the MANOVA law at the realized
/// aspect ratios, for every size in the ladder.
pub fn run_ks_batch(source: Source, sizes: &[usize], beta: f64, gamma: f64, trials: usize, seed: u64) -> Result<LadderRun> {
    if trials < 2 {
        return param("variance of Delta_KS needs T >= 2");
    }
    let mut out = LadderRun::default();
    for &n in sizes {
        let t0 = Instant::now();
        let (sampler, dims) = match prepare(source, n, beta, gamma, seed) {
            Ok(v) => v,
            Err(Error::Param(msg)) => {
                out.skipped.push(format!("{} at n={n}: {msg}", source.name()));
                continue;
            }
            Err(e) => return Err(e),
        };
        let params = ManovaParams::from_sizes(dims.0, dims.1, dims.2)?;
        let law = EdgeLaw::manova(&params);
        let values: Vec<f64> = draw(&sampler, dims, trials, seed, "ks")?
            .iter()
            .map(|s| ks_distance(&s.eigenvalues, &law))
            .collect();
        out.records.push(ExperimentRecord::new(&source, dims, "ks", values, seed, t0)?);
    }
    Ok(out)
}

/// Squared deviations of a functional from its MANOVA limit.
pub fn run_functional_batch(
    source: Source,
    sizes: &[usize],
    spec: FunctionalSpec,
    beta: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<LadderRun> {
    let mut out = LadderRun::default();
    for &n in sizes {
        let t0 = Instant::now();
        let (sampler, dims) = match prepare(source, n, beta, gamma, seed) {
            Ok(v) => v,
            Err(Error::Param(msg)) => {
                out.skipped.push(format!("{} at n={n}: {msg}", source.name()));
                continue;
            }
            Err(e) => return Err(e),
        };
        let target = limiting_value(spec, Limit::Manova(ManovaParams::from_sizes(dims.0, dims.1, dims.2)?))?;
        let values = draw(&sampler, dims, trials, seed, spec.name())?
            .iter()
            .map(|s| evaluate(spec, s).map(|v| (v - target).powi(2)))
            .collect::<Result<Vec<f64>>>()?;
        out.records.push(ExperimentRecord::new(&source, dims, spec.name(), values, seed, t0)?);
    }
    Ok(out)
}

/// Raw functional values (no limit subtracted) at one size.
pub fn functional_values(
    f: &crate::frames::FrameMatrix,
    spec: FunctionalSpec,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    subset_spectra_batch(f, k, trials, seed, &[rng::tag(spec.name()), f.n() as u64])?
        .iter()
        .map(|s| evaluate(spec, s))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitModel {
    /// -1/2 log Var(Delta_KS) on log n.
    Test1,
    /// -log mean(Delta^2) on log n + ratio * log log n.
    Test2 { a0_b0_ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
    pub residuals: Vec<f64>,
    /// log log n coefficient when it is fitted separately.
    pub loglog_coef: Option<f64>,
    pub points: usize,
}

fn response(model: FitModel, r: &ExperimentRecord) -> f64 {
    match model {
        FitModel::Test1 => -0.5 * r.variance.ln(),
        FitModel::Test2 { .. } => -r.mean_square.ln(),
    }
}

pub fn fit_power_law(records: &[ExperimentRecord], model: FitModel) -> Result<FitResult> {
    if records.len() < 3 {
        return param(format!("a power-law fit needs at least 3 sizes, got {}", records.len()));
    }
    let y: Vec<f64> = records.iter().map(|r| response(model, r)).collect();
    let x: Vec<f64> = records
        .iter()
        .map(|r| {
            let l = (r.n as f64).ln();
            match model {
                FitModel::Test1 => l,
                FitModel::Test2 { a0_b0_ratio } => l + a0_b0_ratio * l.ln(),
            }
        })
        .collect();
    let fit = ols(&y, &[x])?;
    Ok(FitResult {
        slope: fit.coef[1],
        intercept: fit.coef[0],
        stderr: fit.stderr[1],
        r2: fit.r2,
        residuals: fit.residuals,
        loglog_coef: None,
        points: records.len(),
    })
}

/// Baseline fit of -log mean(Delta^2) on {log n, log log n}. The slope is
/// b0, `loglog_coef` is a0.
pub fn fit_test2_baseline(records: &[ExperimentRecord]) -> Result<FitResult> {
    if records.len() < 4 {
        return param(format!("the two-regressor baseline fit needs at least 4 sizes, got {}", records.len()));
    }
    let y: Vec<f64> = records.iter().map(|r| -r.mean_square.ln()).collect();
    let l: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let ll: Vec<f64> = l.iter().map(|v| v.ln()).collect();
    let fit = ols(&y, &[l, ll])?;
    Ok(FitResult {
        slope: fit.coef[1],
        intercept: fit.coef[0],
        stderr: fit.stderr[1],
        r2: fit.r2,
        residuals: fit.residuals,
        loglog_coef: Some(fit.coef[2]),
        points: records.len(),
    })
}

/// Two-sided p-value for equal slopes with N_a + N_b - 4 degrees of freedom.
pub fn t_test_equal_slopes(a: &FitResult, b: &FitResult, na: usize, nb: usize) -> Result<f64> {
    let dof = na as i64 + nb as i64 - 4;
    if dof <= 0 {
        return param(format!("t-test needs N_a + N_b > 4, got {na} + {nb}"));
    }
    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    let diff = a.slope - b.slope;
    if diff == 0.0 {
        return Ok(1.0);
    }
    if se == 0.0 {
        return Ok(0.0);
    }
    Ok(t_two_sided(diff / se, dof as f64))
}

/// Flat `key = value` configuration. Blank lines and lines starting with
/// `#` are ignored; keys are lowercase words, values run to end of line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(Error::Format(format!("config line {}: bad key '{key}'", i + 1)));
            }
            if entries.insert(key.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Format(format!("config line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(Config { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Format(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    /// Sorted `key=value` lines; the hash input.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Sizes the global rayon pool from ETFSPECTRA_THREADS when set. Returns the
/// pool size in effect.
pub fn init_threads() -> Result<usize> {
    if let Ok(v) = std::env::var("ETFSPECTRA_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Param(format!("ETFSPECTRA_THREADS='{v}' is not a count")))?;
        // A pool that is already built stays as it is.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

pub const RESULTS_FORMAT: &str = "etfspectra-results";
pub const RESULTS_VERSION: u32 = 1;

const RECORD_COLUMNS: [&str; 13] =
    ["source", "n", "m", "k", "beta", "gamma", "trials", "statistic", "mean", "variance", "mean_square", "seed", "values"];

fn header(w: &mut impl Write, config_hash: &str) -> Result<()> {
    writeln!(w, "# {RESULTS_FORMAT} v{RESULTS_VERSION}")?;
    writeln!(w, "# config-sha256 {config_hash}")?;
    Ok(())
}

fn f(v: f64) -> String {
    format!("{v:.17e}")
}

/// CSV with two `#` header lines, then one row per record; per-trial values
/// are joined with `;` in the last column.
pub fn write_records_csv<W: Write>(mut w: W, records: &[ExperimentRecord], config_hash: &str) -> Result<()> {
    header(&mut w, config_hash)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RECORD_COLUMNS)?;
    for r in records {
        out.write_record([
            r.source.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            f(r.beta),
            f(r.gamma),
            r.trials.to_string(),
            r.statistic.clone(),
            f(r.mean),
            f(r.variance),
            f(r.mean_square),
            r.seed.to_string(),
            r.values.iter().map(|v| f(*v)).collect::<Vec<_>>().join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn check_header(lines: &mut std::str::Lines) -> Result<String> {
    let want = format!("# {RESULTS_FORMAT} v{RESULTS_VERSION}");
    if lines.next() != Some(want.as_str()) {
        return Err(Error::Format("missing results header".into()));
    }
    lines
        .next()
        .and_then(|l| l.strip_prefix("# config-sha256 "))
        .map(str::to_string)
        .ok_or_else(|| Error::Format("missing config hash".into()))
}

/// Reads back [`write_records_csv`] output; `wall_time` comes back as 0.
pub fn read_records_csv<R: Read>(mut r: R) -> Result<(String, Vec<ExperimentRecord>)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    let hash = check_header(&mut lines)?;
    let body: String = lines.map(|l| format!("{l}\n")).collect();
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let s = |i: usize| rec.get(i).ok_or_else(|| Error::Format("short record".into()));
        let num = |i: usize| -> Result<f64> { s(i)?.parse().map_err(|e| Error::Format(format!("column {i}: {e}"))) };
        let int = |i: usize| -> Result<u64> { s(i)?.parse().map_err(|e| Error::Format(format!("column {i}: {e}"))) };
        let values = s(12)?
            .split(';')
            .filter(|v| !v.is_empty())
            .map(|v| v.parse().map_err(|e| Error::Format(format!("values: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        out.push(ExperimentRecord {
            source: s(0)?.to_string(),
            n: int(1)? as usize,
            m: int(2)? as usize,
            k: int(3)? as usize,
            beta: num(4)?,
            gamma: num(5)?,
            trials: int(6)? as usize,
            statistic: s(7)?.to_string(),
            mean: num(8)?,
            variance: num(9)?,
            mean_square: num(10)?,
            seed: int(11)?,
            values,
            wall_time: 0.0,
        });
    }
    Ok((hash, out))
}

pub fn write_fits_csv<W: Write>(mut w: W, fits: &[(String, FitResult)], config_hash: &str) -> Result<()> {
    header(&mut w, config_hash)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["label", "slope", "intercept", "stderr", "r2", "loglog_coef", "points"])?;
    for (label, fit) in fits {
        out.write_record([
            label.clone(),
            f(fit.slope),
            f(fit.intercept),
            f(fit.stderr),
            f(fit.r2),
            fit.loglog_coef.map(f).unwrap_or_default(),
            fit.points.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub records: Vec<ExperimentRecord>,
    pub fits: Vec<(String, FitResult)>,
}

impl ResultsFile {
    pub fn new(config_hash: &str, records: Vec<ExperimentRecord>, fits: Vec<(String, FitResult)>) -> Self {
        ResultsFile { format: RESULTS_FORMAT.into(), version: RESULTS_VERSION, config_hash: config_hash.into(), records, fits }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: ResultsFile = serde_json::from_str(s)?;
        if r.format != RESULTS_FORMAT || r.version != RESULTS_VERSION {
            return Err(Error::Format(format!("unsupported results file {} v{}", r.format, r.version)));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(ns: &[usize], f: impl Fn(f64) -> f64) -> Vec<ExperimentRecord> {
        ns.iter()
            .map(|&n| {
                let v = f(n as f64);
                ExperimentRecord {
                    source: "synthetic".into(),
                    n,
                    m: n / 2,
                    k: n / 4,
                    beta: 0.5,
                    gamma: 0.5,
                    trials: 2,
                    statistic: "ks".into(),
                    values: vec![],
                    mean: 0.0,
                    variance: v,
                    mean_square: v,
                    seed: 0,
                    wall_time: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn noiseless_power_law() {
        let recs = synthetic(&[103, 211, 431, 863], |n| 3.0 * n.powf(-2.0 * 0.93));
        let fit = fit_power_law(&recs, FitModel::Test1).unwrap();
        assert!((fit.slope - 0.93).abs() < 1e-10);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit_power_law(&recs[..2], FitModel::Test1).is_err());
    }

    #[test]
    fn baseline_recovers_both_exponents() {
        let (a, b) = (0.4, 1.7);
        let recs = synthetic(&[103, 211, 431, 863, 1723], |n| 2.0 * n.powf(-b) * n.ln().powf(-a));
        let base = fit_test2_baseline(&recs).unwrap();
        assert!((base.slope - b).abs() < 1e-8);
        assert!((base.loglog_coef.unwrap() - a).abs() < 1e-8);
        let fit = fit_power_law(&recs, FitModel::Test2 { a0_b0_ratio: a / b }).unwrap();
        assert!((fit.slope - b).abs() < 1e-8);
    }

    #[test]
    fn slope_t_test() {
        let fit = |slope, stderr| FitResult {
            slope,
            intercept: 0.0,
            stderr,
            r2: 1.0,
            residuals: vec![],
            loglog_coef: None,
            points: 4,
        };
        assert_eq!(t_test_equal_slopes(&fit(0.9, 0.1), &fit(0.9, 0.1), 4, 4).unwrap(), 1.0);
        assert!(t_test_equal_slopes(&fit(0.9, 0.1), &fit(0.5, 0.1), 2, 2).is_err());
        // t = 2.776 at 4 dof is the 97.5% quantile.
        let p = t_test_equal_slopes(&fit(2.776 * 2f64.sqrt() * 0.1, 0.1), &fit(0.0, 0.1), 4, 4).unwrap();
        assert!((p - 0.05).abs() < 1e-3);
    }

    #[test]
    fn config_grammar_and_hash() {
        let c = Config::parse("# run\nfamily = dss\n\nbeta=0.8\ngamma = 0.5 \n").unwrap();
        assert_eq!(c.get("family"), Some("dss"));
        assert_eq!(c.get_parsed::<f64>("beta").unwrap(), Some(0.8));
        assert_eq!(c.canonical(), "beta=0.8\nfamily=dss\ngamma=0.5\n");
        let d = Config::parse("gamma=0.5\nbeta=0.8\nfamily=dss").unwrap();
        assert_eq!(c.hash(), d.hash());
        assert_eq!(c.hash().len(), 64);
        assert!(Config::parse("novalue").is_err());
        assert!(Config::parse("a=1\na=2").is_err());
        assert!(Config::parse("Bad Key=1").is_err());
    }

    #[test]
    fn variance_needs_two_trials() {
        assert!(run_ks_batch(Source::Frame(Family::Dss), &[31], 0.8, 0.5, 1, 1).is_err());
    }

    #[test]
    fn ks_batch_is_deterministic_and_round_trips() {
        let run = |seed| run_ks_batch(Source::Frame(Family::Dss), &[31, 43, 10], 0.8, 0.5, 8, seed).unwrap();
        let a = run(5);
        assert_eq!(a.records.len(), 2);
        assert_eq!(a.skipped.len(), 1);
        let b = run(5);
        let bytes = |recs: &[ExperimentRecord]| {
            let mut v = Vec::new();
            write_records_csv(&mut v, recs, "h").unwrap();
            v
        };
        assert_eq!(bytes(&a.records), bytes(&b.records));
        let (hash, back) = read_records_csv(bytes(&a.records).as_slice()).unwrap();
        assert_eq!(hash, "h");
        for (x, y) in a.records.iter().zip(&back) {
            assert_eq!(ExperimentRecord { wall_time: 0.0, ..x.clone() }, *y);
        }
        let json = serde_json::to_string(&ResultsFile::new("h", a.records.clone(), vec![])).unwrap();
        assert_eq!(ResultsFile::from_json(&json).unwrap().records, a.records);
    }

    #[test]
    fn manova_baseline_decreases() {
        let run = run_ks_batch(Source::ManovaEnsemble(Field::Complex), &[31, 67, 131, 263], 0.8, 0.5, 40, 2).unwrap();
        let means: Vec<f64> = run.records.iter().map(|r| r.mean).collect();
        assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
    }

    #[test]
    fn identity_like_frame_does_not_converge() {
        // Half of the spikes-and-sines columns are coordinate vectors; subsets
        // of them have spectra far from the MANOVA law.
        let ss = run_ks_batch(Source::Frame(Family::SpikesSines), &[64, 256], 0.8, 0.5, 20, 3).unwrap();
        let dss = run_ks_batch(Source::Frame(Family::Dss), &[67, 263], 0.8, 0.5, 20, 3).unwrap();
        assert!(ss.records[1].mean > 2.0 * dss.records[1].mean);
    }
}
