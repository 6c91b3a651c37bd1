//! Monte-Carlo experiments: symbols needed to decode, coverage curves,
//! overhead statistics and histograms, written as CSV.
//!
//! Trial `t` of an experiment uses seed `mix(base_seed + t)`. Trials run in
//! parallel and are collected in trial order, so output depends only on the
//! parameters.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::baselines::Codec;
use crate::encode::Encoder;
use crate::error::{Error, Result};
use crate::ring::DataSymbol;
use crate::rng::{trial_seed, SymbolRng};
use crate::soliton::DegreeDistribution;
use crate::wordlen::{part_configs, split, SplitDecoder, SplitEncoder};

/// Default word length of the experiments.
pub const DEFAULT_W: u32 = 256;

/// Symbols a trial may consume before it counts as incomplete.
pub fn default_cutoff(n: usize) -> u64 {
    if n < 8 {
        200
    } else {
        20 * n as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub codec: String,
    pub n: usize,
    pub w: u32,
    pub seed: u64,
    /// Symbols read when the last data symbol was decoded; `None` if the
    /// cutoff came first.
    pub m_complete: Option<u64>,
    pub symbols_read: u64,
    pub redundant: u64,
    pub wall: Duration,
}

/// Random data for a trial, drawn from a stream the encoder never uses.
pub fn trial_data(n: usize, w: u32, seed: u64) -> Vec<DataSymbol> {
    let mut rng = SymbolRng::for_symbol(seed, 0);
    let words = (w as usize).div_ceil(64);
    (0..n)
        .map(|_| DataSymbol::from_words(w, (0..words).map(|_| rng.next_u64()).collect()))
        .collect()
}

fn simulate(
    codec: &Codec,
    dist: Arc<DegreeDistribution>,
    w: u32,
    seed: u64,
    limit: u64,
    mut trace: Option<&mut Vec<u32>>,
) -> Result<TrialResult> {
    let start = Instant::now();
    let n = dist.n();
    let cfg = codec.config_with(dist, w, seed)?;
    let data = trial_data(n, w, seed);
    let enc = Encoder::new(cfg.clone(), &data)?;
    let mut session = codec.session(cfg);
    let mut m_complete = None;
    let mut ell = 0;
    while ell < limit {
        ell += 1;
        if !session.is_complete() {
            session.receive(ell, &enc.encode(ell))?;
            if session.is_complete() {
                m_complete = Some(ell);
                if session.decoded_data().as_deref() != Some(&data[..]) {
                    return Err(Error::Corruption(format!("{codec} n={n} seed={seed}: wrong data decoded")));
                }
            }
        }
        match trace.as_deref_mut() {
            Some(t) => t.push(session.decoded_count() as u32),
            None if session.is_complete() => break,
            None => {}
        }
    }
    Ok(TrialResult {
        codec: codec.id(),
        n,
        w,
        seed,
        m_complete,
        symbols_read: session.progress().symbols_read,
        redundant: session.progress().redundant,
        wall: start.elapsed(),
    })
}

/// Feeds symbols `1, 2, ...` into a fresh session until everything is
/// decoded or `cutoff` symbols were read.
pub fn run_trial(codec: &Codec, n: usize, w: u32, seed: u64, cutoff: u64) -> Result<TrialResult> {
    run_trial_with(codec, Arc::new(codec.distribution(n)?), w, seed, cutoff)
}

/// [`run_trial`] with a shared distribution table.
pub fn run_trial_with(codec: &Codec, dist: Arc<DegreeDistribution>, w: u32, seed: u64, cutoff: u64) -> Result<TrialResult> {
    simulate(codec, dist, w, seed, cutoff, None)
}

/// Decoded count after each of the first `m_max` symbols.
pub fn coverage_trace(codec: &Codec, dist: Arc<DegreeDistribution>, w: u32, seed: u64, m_max: u64) -> Result<Vec<u32>> {
    let mut trace = Vec::with_capacity(m_max as usize);
    simulate(codec, dist, w, seed, m_max, Some(&mut trace))?;
    Ok(trace)
}

/// The `ceil(q N)`-th smallest element of `sorted`.
pub fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> T {
    assert!(!sorted.is_empty());
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveragePoint {
    pub m: u64,
    pub mean_decoded: f64,
    /// Decoded count reached by at least 90% of the trials.
    pub p90_decoded: f64,
}

pub fn coverage_curve(codec: &Codec, n: usize, w: u32, m_max: u64, trials: usize, base_seed: u64) -> Result<Vec<CoveragePoint>> {
    let dist = Arc::new(codec.distribution(n)?);
    let traces: Vec<Vec<u32>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| coverage_trace(codec, dist.clone(), w, trial_seed(base_seed, t), m_max))
        .collect::<Result<_>>()?;
    let mut column = vec![0u32; trials];
    Ok((0..m_max as usize)
        .map(|i| {
            for (slot, trace) in column.iter_mut().zip(&traces) {
                *slot = trace[i];
            }
            let mean = column.iter().map(|&d| d as f64).sum::<f64>() / trials as f64;
            column.sort_unstable();
            CoveragePoint {
                m: i as u64 + 1,
                mean_decoded: mean,
                p90_decoded: nearest_rank(&column, 0.1) as f64,
            }
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct ExperimentGrid {
    pub codecs: Vec<Codec>,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub w: u32,
    /// Per-trial symbol limit; `None` selects [`default_cutoff`].
    pub cutoff: Option<u64>,
    pub base_seed: u64,
}

impl ExperimentGrid {
    pub fn new(codecs: Vec<Codec>, ns: Vec<usize>, trials: usize) -> Self {
        Self {
            codecs,
            ns,
            trials,
            w: DEFAULT_W,
            cutoff: None,
            base_seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("need at least one trial".into()));
        }
        for &n in &self.ns {
            if let Some(c) = self.cutoff {
                if c < n as u64 {
                    return Err(Error::InvalidConfig(format!("cutoff {c} is below n = {n}")));
                }
            }
        }
        Ok(())
    }

    fn cutoff_for(&self, n: usize) -> u64 {
        self.cutoff.unwrap_or_else(|| default_cutoff(n))
    }
}

/// Runs every trial for one codec and `n`, in trial order.
pub fn run_trials(codec: &Codec, n: usize, w: u32, trials: usize, cutoff: u64, base_seed: u64) -> Result<Vec<TrialResult>> {
    let dist = Arc::new(codec.distribution(n)?);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial_with(codec, dist.clone(), w, trial_seed(base_seed, t), cutoff))
        .collect()
}

/// Cyclone trial at any even `w`, run through the split codec when `w + 1`
/// is not prime. `codec` only supplies the distribution and the label. Measures the cost of splitting a word into two parts.
pub fn split_trial(codec: &Codec, dist: Arc<DegreeDistribution>, w: u32, seed: u64, cutoff: u64) -> Result<TrialResult> {
    let start = Instant::now();
    let n = dist.n();
    let plan = split(w)?;
    let cfgs = part_configs(&plan, n, dist, seed)?;
    let data = trial_data(n, w, seed);
    let enc = SplitEncoder::new(plan.clone(), cfgs.clone(), &data)?;
    let mut dec = SplitDecoder::new(plan, cfgs)?;
    let mut m_complete = None;
    let mut ell = 0;
    while ell < cutoff && !dec.is_complete() {
        ell += 1;
        dec.receive(ell, &enc.encode(ell))?;
    }
    if dec.is_complete() {
        m_complete = Some(ell);
        if dec.decoded_data().as_deref() != Some(&data[..]) {
            return Err(Error::Corruption(format!("split w={w} n={n} seed={seed}: wrong data decoded")));
        }
    }
    let redundant = dec.sessions().iter().map(|s| s.progress().redundant).sum();
    Ok(TrialResult {
        codec: format!("{}-w{w}", codec.id()),
        n,
        w,
        seed,
        m_complete,
        symbols_read: ell,
        redundant,
        wall: start.elapsed(),
    })
}

/// [`split_trial`] over `trials` seeds, in trial order.
pub fn run_split_trials(codec: &Codec, n: usize, w: u32, trials: usize, cutoff: u64, base_seed: u64) -> Result<Vec<TrialResult>> {
    let dist = Arc::new(codec.distribution(n)?);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| split_trial(codec, dist.clone(), w, trial_seed(base_seed, t), cutoff))
        .collect()
}

/// Statistics of the overhead `m/n - 1` over completed trials.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadRow {
    pub codec: String,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation.
    pub std: f64,
    pub p90: f64,
    pub incomplete: usize,
}

impl OverheadRow {
    pub fn from_trials(codec: &str, n: usize, results: &[TrialResult]) -> Self {
        let mut overheads: Vec<f64> = results
            .iter()
            .filter_map(|r| r.m_complete)
            .map(|m| m as f64 / n as f64 - 1.0)
            .collect();
        overheads.sort_by(f64::total_cmp);
        let done = overheads.len();
        let (mean, median, std, p90) = if done == 0 {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = overheads.iter().sum::<f64>() / done as f64;
            let var = if done > 1 {
                overheads.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (done - 1) as f64
            } else {
                0.0
            };
            (mean, nearest_rank(&overheads, 0.5), var.sqrt(), nearest_rank(&overheads, 0.9))
        };
        Self {
            codec: codec.to_string(),
            n,
            trials: results.len(),
            mean,
            median,
            std,
            p90,
            incomplete: results.len() - done,
        }
    }
}

pub fn overhead_experiment(grid: &ExperimentGrid) -> Result<Vec<OverheadRow>> {
    grid.validate()?;
    let mut rows = Vec::new();
    for codec in &grid.codecs {
        for &n in &grid.ns {
            let results = run_trials(codec, n, grid.w, grid.trials, grid.cutoff_for(n), grid.base_seed)?;
            rows.push(OverheadRow::from_trials(&codec.id(), n, &results));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistBin {
    /// Inclusive.
    pub lo: u64,
    /// Exclusive.
    pub hi: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub codec: String,
    pub n: usize,
    pub bins: Vec<HistBin>,
    pub incomplete: usize,
}

/// Bin width for histograms of `n` data symbols.
pub fn bin_width(n: usize) -> u64 {
    (n as u64 / 50).max(1)
}

/// Histograms of the completion count for each codec and `n`. Codecs at the
/// same `n` share bin edges; the first bin starts at `n`.
pub fn histogram_experiment(grid: &ExperimentGrid) -> Result<Vec<Histogram>> {
    grid.validate()?;
    let mut out = Vec::new();
    for &n in &grid.ns {
        let runs: Vec<(String, Vec<TrialResult>)> = grid
            .codecs
            .iter()
            .map(|c| Ok((c.id(), run_trials(c, n, grid.w, grid.trials, grid.cutoff_for(n), grid.base_seed)?)))
            .collect::<Result<_>>()?;
        let width = bin_width(n);
        let top = runs
            .iter()
            .flat_map(|(_, rs)| rs.iter().filter_map(|r| r.m_complete))
            .max()
            .unwrap_or(n as u64);
        let nbins = ((top - n as u64) / width + 1) as usize;
        for (codec, results) in runs {
            let mut bins: Vec<HistBin> = (0..nbins as u64)
                .map(|b| HistBin {
                    lo: n as u64 + b * width,
                    hi: n as u64 + (b + 1) * width,
                    count: 0,
                })
                .collect();
            for m in results.iter().filter_map(|r| r.m_complete) {
                bins[((m - n as u64) / width) as usize].count += 1;
            }
            let incomplete = results.iter().filter(|r| r.m_complete.is_none()).count();
            out.push(Histogram { codec, n, bins, incomplete });
        }
    }
    Ok(out)
}

/// `%g`-style rendering with six significant digits.
pub fn fmt_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::File::create(path)?)
}

pub fn write_coverage_csv(path: &Path, points: &[CoveragePoint]) -> Result<()> {
    let mut out = String::from("m,mean_decoded,p90_decoded\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.m, fmt_g6(p.mean_decoded), fmt_g6(p.p90_decoded)));
    }
    create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_overhead_csv(path: &Path, rows: &[OverheadRow]) -> Result<()> {
    let mut out = String::from("codec,n,trials,mean,median,std,p90,incomplete\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.codec,
            r.n,
            r.trials,
            fmt_g6(r.mean),
            fmt_g6(r.median),
            fmt_g6(r.std),
            fmt_g6(r.p90),
            r.incomplete
        ));
    }
    create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_hist_csv(path: &Path, hist: &Histogram) -> Result<()> {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for b in &hist.bins {
        out.push_str(&format!("{},{},{}\n", b.lo, b.hi, b.count));
    }
    create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

pub fn coverage_file(dir: &Path, codec: &str, n: usize) -> PathBuf {
    dir.join(format!("coverage_{codec}_{n}.csv"))
}

pub fn hist_file(dir: &Path, codec: &str, n: usize) -> PathBuf {
    dir.join(format!("hist_{codec}_{n}.csv"))
}

/// The six codecs of the coverage and overhead figures.
pub fn figure_codecs() -> Vec<Codec> {
    vec![
        Codec::random(),
        Codec::pair(),
        Codec::lt_ideal(),
        Codec::lt_robust(),
        Codec::cyclone_ideal(),
        Codec::cyclone_robust(),
    ]
}

/// Sizes of the figure grids, scaled by [`PresetOptions`].
#[derive(Debug, Clone)]
pub struct PresetOptions {
    pub trials: usize,
    pub base_seed: u64,
    pub w: u32,
    /// Overhead sweep covers `n = 2^1 ..= 2^max_log_n`.
    pub max_log_n: u32,
    /// Coverage and histogram sizes.
    pub sizes: Vec<usize>,
    /// Coverage curves run to `m = coverage_factor * n`.
    pub coverage_factor: u64,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            trials: 1000,
            base_seed: 0,
            w: DEFAULT_W,
            max_log_n: 13,
            sizes: vec![10, 100, 1000, 10_000],
            coverage_factor: 3,
        }
    }
}

/// Writes coverage curves, the overhead table (including the `c = 0.03`
/// variants) and the Cyclone/LT histograms into `dir`. Returns the files
/// written.
pub fn figure_grids(dir: &Path, opts: &PresetOptions) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for &n in &opts.sizes {
        for codec in figure_codecs() {
            let points = coverage_curve(&codec, n, opts.w, opts.coverage_factor * n as u64, opts.trials, opts.base_seed)?;
            let path = coverage_file(dir, &codec.id(), n);
            write_coverage_csv(&path, &points)?;
            written.push(path);
        }
    }

    let mut codecs = figure_codecs();
    codecs.push(Codec::lt_robust().with_robust(0.03, 0.5));
    codecs.push(Codec::cyclone_robust().with_robust(0.03, 0.5));
    let mut grid = ExperimentGrid::new(codecs, (1..=opts.max_log_n).map(|i| 1usize << i).collect(), opts.trials);
    grid.w = opts.w;
    grid.base_seed = opts.base_seed;
    let rows = overhead_experiment(&grid)?;
    let path = dir.join("overhead.csv");
    write_overhead_csv(&path, &rows)?;
    written.push(path);

    let mut grid = ExperimentGrid::new(vec![Codec::cyclone_robust(), Codec::lt_robust()], opts.sizes.clone(), opts.trials);
    grid.w = opts.w;
    grid.base_seed = opts.base_seed;
    for h in histogram_experiment(&grid)? {
        let path = hist_file(dir, &h.codec, h.n);
        write_hist_csv(&path, &h)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.039, "0.039"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (518.73782, "518.738"),
            (-2.5, "-2.5"),
            (99999.96, "100000"),
            (999999.5, "1e+06"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g6(x), s, "{x}");
        }
    }

    #[test]
    fn nearest_rank_definition() {
        let xs: Vec<u32> = (1..=10).collect();
        assert_eq!(nearest_rank(&xs, 0.5), 5);
        assert_eq!(nearest_rank(&xs, 0.9), 9);
        assert_eq!(nearest_rank(&xs, 0.91), 10);
        assert_eq!(nearest_rank(&xs, 0.0), 1);
        assert_eq!(nearest_rank(&[7], 0.9), 7);
    }

    #[test]
    fn single_symbol_completes_immediately() {
        for codec in figure_codecs() {
            let r = run_trial(&codec, 1, 4, 5, default_cutoff(1)).unwrap();
            assert_eq!(r.m_complete, Some(1), "{codec}");
        }
    }

    #[test]
    fn trials_respect_the_information_bound() {
        let rs = run_trials(&Codec::cyclone_robust(), 50, 16, 40, default_cutoff(50), 3).unwrap();
        assert!(rs.iter().all(|r| r.m_complete.is_some_and(|m| m >= 50)));
    }

    #[test]
    fn coverage_is_monotone_per_trial() {
        let dist = Arc::new(Codec::pair().distribution(60).unwrap());
        let trace = coverage_trace(&Codec::pair(), dist, 16, 1, 200).unwrap();
        assert_eq!(trace.len(), 200);
        assert!(trace.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn overhead_row_statistics() {
        let mk = |m| TrialResult {
            codec: "x".into(),
            n: 10,
            w: 4,
            seed: 0,
            m_complete: m,
            symbols_read: 0,
            redundant: 0,
            wall: Duration::ZERO,
        };
        let rs = vec![mk(Some(10)), mk(Some(12)), mk(None), mk(Some(11))];
        let row = OverheadRow::from_trials("x", 10, &rs);
        assert_eq!((row.trials, row.incomplete), (4, 1));
        assert!((row.mean - 0.1).abs() < 1e-12);
        assert!((row.median - 0.1).abs() < 1e-12);
        assert!((row.std - 0.1).abs() < 1e-12);
        assert!((row.p90 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn histogram_counts_every_trial() {
        let mut grid = ExperimentGrid::new(vec![Codec::cyclone_robust(), Codec::lt_robust()], vec![10], 50);
        grid.w = 16;
        let hs = histogram_experiment(&grid).unwrap();
        assert_eq!(hs.len(), 2);
        assert_eq!(hs[0].bins, hs[0].bins.iter().copied().collect::<Vec<_>>());
        for h in &hs {
            assert_eq!(h.bins[0].lo, 10);
            assert_eq!(h.bins.iter().map(|b| b.count).sum::<usize>() + h.incomplete, 50);
            assert_eq!(h.bins.len(), hs[0].bins.len());
        }
    }
}
