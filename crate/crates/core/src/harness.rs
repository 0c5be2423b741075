//! Seeded desk-scale experiments with JSON reports and CSV tables.
//!
//! Stream layout for a master seed `s`:
//! - limit experiments: trial `t` draws `x` from stream `2t` and `y` from `2t + 1`;
//! - construction and splice: the `E_p` original from stream 0, the `F_p`
//!   original from stream 1, the splice targets from streams 2 and 3.
//!
//! Work units (trials, probes, sweep rows) run on the ambient rayon pool and
//! are collected in index order, so reports do not depend on scheduling.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digits::{self, Alpha, ConstructionSchedule, DigitSeq, SetDescriptor};
use crate::error::{param, Error, Result};
use crate::matcher::{aligned_match, log_ratio, shifted_match};
use crate::rng;
use crate::sft;
use crate::resource_budget;

pub const DEFAULT_BAND: f64 = 0.15;
pub const DEFAULT_STAGES: usize = 14;
pub const DEFAULT_SPLICE_K: usize = 32;
pub const DEFAULT_RATIO_TOLERANCE: f64 = 0.5;
pub const DEFAULT_P_MAX: u32 = 12;
pub const DEFAULT_THRESHOLD: f64 = 1.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `S_n / log_b n -> 2` for Lebesgue-almost every pair.
    GenericLimit,
    /// `L_n / log_b n -> 1` for Lebesgue-almost every pair.
    LLimit,
    Construction,
    Splice,
    SpectraSweep,
}

/// Experiment configuration, read from JSON. Unknown fields are rejected;
/// omitted optional fields take the `DEFAULT_*` values of this module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_two")]
    pub base: u32,
    /// Block parameter; the first `p` of a spectra sweep.
    #[serde(default = "default_two")]
    pub p: u32,
    /// Growth rate for construction and splice runs (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Alpha>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<usize>,
    #[serde(default = "default_one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Number of construction stages `K` probed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    /// Relative half-width of the acceptance band around `expected_limit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_limit: Option<f64>,
    /// Forces `y = x` in limit experiments.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub identical_pair: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splice_k: Option<usize>,
    /// Largest accepted ratio difference at the final splice probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u32>,
    /// Value the largest sweep lower bound must exceed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Spectral bracket width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn default_two() -> u32 {
    2
}

fn default_one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            base: 2,
            p: 2,
            alpha: None,
            checkpoints: Vec::new(),
            trials: 1,
            seed: 0,
            stages: None,
            band: None,
            expected_limit: None,
            identical_pair: false,
            splice_k: None,
            ratio_tolerance: None,
            p_max: None,
            threshold: None,
            tol: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn natural_limit(&self) -> Option<f64> {
        match self.kind {
            // 2 / H_2 with H_2 = log b for the uniform measure, in log-b units.
            ExperimentKind::GenericLimit => Some(2.0),
            ExperimentKind::LLimit => Some(1.0),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return param(format!("base must be at least 2, got {}", self.base));
        }
        if self.p < 2 {
            return param(format!("p must be at least 2, got {}", self.p));
        }
        if self.trials == 0 {
            return param("trials must be at least 1");
        }
        if let Some(w) = self.checkpoints.windows(2).find(|w| w[0] >= w[1]) {
            return param(format!("checkpoints must increase, found {} before {}", w[0], w[1]));
        }
        if let (Some(given), natural) = (self.expected_limit, self.natural_limit()) {
            if natural != Some(given) {
                return param(format!("expected_limit {given} is inconsistent with kind {:?}", self.kind));
            }
        }
        if matches!(self.band, Some(b) if b.is_nan() || b <= 0.0) {
            return param("band must be positive");
        }
        Ok(())
    }

    fn alpha_or_default(&self) -> Alpha {
        self.alpha.unwrap_or(Alpha::Finite(1.0))
    }

    fn stages_or_default(&self) -> usize {
        self.stages.unwrap_or(DEFAULT_STAGES)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Order statistics of one ratio across trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        Summary { mean: sorted.iter().sum::<f64>() / n as f64, median, min: sorted[0], max: sorted[n - 1] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub n: usize,
    /// `S_n / log_b n`
    pub shifted: Summary,
    /// `L_n / log_b n`
    pub aligned: Summary,
}

/// One probe of the inequality `ell_k <= S_n < ell_{k+1} + 2p^2` for
/// `t_k <= n < t_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichRecord {
    pub k: usize,
    pub n: usize,
    pub t_k: u64,
    pub ell_k: u64,
    pub s: usize,
    pub lower: u64,
    /// Exclusive.
    pub upper: u64,
    pub ratio: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpliceRecord {
    pub n: usize,
    pub s_original: usize,
    pub s_spliced: usize,
    pub delta: i64,
    pub ratio_original: f64,
    pub ratio_spliced: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u32,
    pub dim_ep: f64,
    pub dim_fp_lower: f64,
    pub dim_fp_upper: f64,
    pub tau: u64,
    pub brualdi_hypothesis: bool,
    pub brualdi: f64,
    pub rho_lower: f64,
    pub rho_upper: f64,
    pub lower_bound_sum: f64,
    pub sharp_sum: f64,
}

/// Wall-clock and scheduling data; excluded from determinism comparisons.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub elapsed_ms: u128,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<CheckpointStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sandwich: Vec<SandwichRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub splice: Vec<SpliceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub meta: RunMeta,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            config: config.clone(),
            verdict: Verdict::Fail,
            checkpoints: Vec::new(),
            sandwich: Vec::new(),
            splice: Vec::new(),
            sweep: Vec::new(),
            degenerate: false,
            notes: Vec::new(),
            meta: RunMeta::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// JSON with the run metadata blanked, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.meta = RunMeta::default();
        copy.to_json()
    }

    /// The experiment's main table, 6-decimal floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.config.kind {
            ExperimentKind::GenericLimit | ExperimentKind::LLimit => {
                out.push_str("n,s_mean,s_median,s_min,s_max,l_mean,l_median,l_min,l_max\n");
                for c in &self.checkpoints {
                    let (s, l) = (c.shifted, c.aligned);
                    let _ = writeln!(
                        out,
                        "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                        c.n, s.mean, s.median, s.min, s.max, l.mean, l.median, l.min, l.max
                    );
                }
            }
            ExperimentKind::Construction => {
                out.push_str("k,n,t_k,ell_k,s,lower,upper,ratio,band_lo,band_hi,pass\n");
                for r in &self.sandwich {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{}",
                        r.k, r.n, r.t_k, r.ell_k, r.s, r.lower, r.upper, r.ratio, r.band_lo, r.band_hi, r.pass
                    );
                }
            }
            ExperimentKind::Splice => {
                out.push_str("n,s_original,s_spliced,delta,ratio_original,ratio_spliced,pass\n");
                for r in &self.splice {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{:.6},{:.6},{}",
                        r.n, r.s_original, r.s_spliced, r.delta, r.ratio_original, r.ratio_spliced, r.pass
                    );
                }
            }
            ExperimentKind::SpectraSweep => {
                out.push_str(
                    "p,dim_ep,dim_fp_lower,dim_fp_upper,tau,brualdi,rho_lower,rho_upper,lower_bound_sum,sharp_sum\n",
                );
                for r in &self.sweep {
                    let _ = writeln!(
                        out,
                        "{},{:.6},{:.6},{:.6},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                        r.p,
                        r.dim_ep,
                        r.dim_fp_lower,
                        r.dim_fp_upper,
                        r.tau,
                        r.brualdi,
                        r.rho_lower,
                        r.rho_upper,
                        r.lower_bound_sum,
                        r.sharp_sum
                    );
                }
            }
        }
        out
    }
}

/// Runs the experiment named by `config.kind`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = match config.kind {
        ExperimentKind::GenericLimit | ExperimentKind::LLimit => run_generic_limit(config)?,
        ExperimentKind::Construction => run_construction(config)?,
        ExperimentKind::Splice => run_splice(config)?,
        ExperimentKind::SpectraSweep => run_spectra_sweep(config)?,
    };
    report.meta = RunMeta { elapsed_ms: started.elapsed().as_millis(), threads: rayon::current_num_threads() };
    Ok(report)
}

fn check_budget(what: &str, needed: u128) -> Result<()> {
    let budget = resource_budget();
    if needed > u128::from(budget) {
        return Err(Error::Resource { what: what.into(), needed, budget });
    }
    Ok(())
}

fn wrong_kind<T>(config: &ExperimentConfig, op: &str) -> Result<T> {
    param(format!("{op} cannot run an experiment of kind {:?}", config.kind))
}

/// Monte Carlo estimate of the almost-everywhere limits of `S_n / log_b n`
/// and `L_n / log_b n` over uniform pairs.
pub fn run_generic_limit(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let Some(expected) = config.natural_limit() else {
        return wrong_kind(config, "run_generic_limit");
    };
    config.validate()?;
    if config.checkpoints.is_empty() {
        return param("limit experiments need at least one checkpoint");
    }
    if config.checkpoints[0] < 2 {
        return param("checkpoints must be at least 2 for log_b n to be positive");
    }
    let longest = *config.checkpoints.last().expect("nonempty");
    check_budget("sequence length x trials", longest as u128 * config.trials as u128)?;

    let per_trial: Vec<Vec<(f64, f64)>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let x = digits::sample_uniform_with(config.base, longest, &mut rng::stream(config.seed, 2 * t))?;
            let y = if config.identical_pair {
                x.clone()
            } else {
                digits::sample_uniform_with(config.base, longest, &mut rng::stream(config.seed, 2 * t + 1))?
            };
            config
                .checkpoints
                .iter()
                .map(|&n| {
                    let s = shifted_match(&x, &y, n)?.length;
                    let l = aligned_match(&x, &y, n)?.length;
                    Ok((ratio(s, n, config.base), ratio(l, n, config.base)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(config);
    report.degenerate = config.identical_pair;
    report.checkpoints = config
        .checkpoints
        .iter()
        .enumerate()
        .map(|(c, &n)| {
            let s: Vec<f64> = per_trial.iter().map(|row| row[c].0).collect();
            let l: Vec<f64> = per_trial.iter().map(|row| row[c].1).collect();
            CheckpointStats { n, shifted: Summary::of(&s), aligned: Summary::of(&l) }
        })
        .collect();

    let band = config.band.unwrap_or(DEFAULT_BAND);
    let last = report.checkpoints.last().expect("nonempty");
    let median = match config.kind {
        ExperimentKind::GenericLimit => last.shifted.median,
        _ => last.aligned.median,
    };
    let (lo, hi) = (expected * (1.0 - band), expected * (1.0 + band));
    report.verdict = Verdict::from_bool((lo..=hi).contains(&median));
    report.notes.push(format!("median ratio {median:.6} at n = {}, band [{lo:.6}, {hi:.6}]", last.n));
    if config.identical_pair {
        report.notes.push("degenerate: y = x, so S_n = L_n = n".into());
    }
    Ok(report)
}

fn ratio(value: usize, n: usize, base: u32) -> f64 {
    log_ratio(value, n, base).unwrap_or(f64::NAN)
}

/// The pair `(f(x), f(y))` with `x` drawn from `E_p` and `y` from `F_p`.
#[derive(Clone, Debug)]
pub struct ConstructedPair {
    pub x: DigitSeq,
    pub y: DigitSeq,
    /// Covers `stages + 1` stages so that `ell_{K+1}` is available.
    pub schedule: ConstructionSchedule,
    /// Length of both sequences, `t_K`.
    pub len: usize,
}

pub fn construction_pair(config: &ExperimentConfig) -> Result<ConstructedPair> {
    let stages = config.stages_or_default();
    if stages == 0 {
        return param("stages must be at least 1");
    }
    let schedule = ConstructionSchedule::build(config.p, config.base, config.alpha_or_default(), stages + 1)?;
    let len = schedule.t()[stages - 1];
    check_budget("constructed sequence length", u128::from(len))?;
    let len = len as usize;
    let originals = schedule.originals_needed(len);
    let ep = SetDescriptor::Ep { base: config.base, p: config.p };
    let fp = SetDescriptor::Fp { base: config.base, p: config.p };
    let x = digits::sample_member_with(&ep, originals, &mut rng::stream(config.seed, 0))?;
    let y = digits::sample_member_with(&fp, originals, &mut rng::stream(config.seed, 1))?;
    Ok(ConstructedPair {
        x: digits::apply_f(&x, &schedule, len)?,
        y: digits::apply_f(&y, &schedule, len)?,
        schedule,
        len,
    })
}

/// Probe lengths `t_k + m_{k+1}`, `t_{k+1} - 1` and `t_{k+1}` for `k < K`.
fn probe_points(schedule: &ConstructionSchedule, stages: usize) -> Vec<usize> {
    let t = schedule.t();
    let m = schedule.m();
    let mut probes: Vec<usize> = (0..stages)
        .flat_map(|k| {
            let tk = if k == 0 { 0 } else { t[k - 1] };
            [tk + m[k], t[k] - 1, t[k]]
        })
        .map(|v| v as usize)
        .collect();
    probes.sort_unstable();
    probes.dedup();
    probes
}

/// Stage `k` with `t_k <= n < t_{k+1}` (`t_0 = 0`).
fn stage_of(schedule: &ConstructionSchedule, n: usize) -> usize {
    schedule.t().iter().take_while(|&&tk| tk <= n as u64).count()
}

fn sandwich_record(schedule: &ConstructionSchedule, n: usize, s: usize) -> SandwichRecord {
    let k = stage_of(schedule, n);
    let ell = |i: usize| if i == 0 { 0 } else { schedule.ell()[i - 1] };
    let t_k = if k == 0 { 0 } else { schedule.t()[k - 1] };
    let p2 = u64::from(schedule.p()).pow(2);
    let lower = ell(k);
    let upper = ell(k + 1) + 2 * p2;
    let log_n = (n as f64).ln() / f64::from(schedule.base()).ln();
    SandwichRecord {
        k,
        n,
        t_k,
        ell_k: lower,
        s,
        lower,
        upper,
        ratio: s as f64 / log_n,
        band_lo: lower as f64 / log_n,
        band_hi: upper as f64 / log_n,
        pass: lower <= s as u64 && (s as u64) < upper,
    }
}

/// Checks `ell_k <= S_n < ell_{k+1} + 2p^2` at every probe of `f(E_p) x f(F_p)`.
pub fn run_construction(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.kind != ExperimentKind::Construction {
        return wrong_kind(config, "run_construction");
    }
    config.validate()?;
    let pair = construction_pair(config)?;
    let stages = config.stages_or_default();
    let probes = probe_points(&pair.schedule, stages);
    let shifted: Vec<usize> = probes
        .par_iter()
        .map(|&n| Ok(shifted_match(&pair.x, &pair.y, n)?.length))
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(config);
    report.sandwich = probes.iter().zip(&shifted).map(|(&n, &s)| sandwich_record(&pair.schedule, n, s)).collect();
    let failures: Vec<_> = report.sandwich.iter().filter(|r| !r.pass).collect();
    for f in &failures {
        report.notes.push(format!("sandwich violated at k = {}, n = {}: S_n = {}", f.k, f.n, f.s));
    }
    let last = report.sandwich.last().expect("at least one probe");
    let in_band = last.band_lo <= last.ratio && last.ratio < last.band_hi;
    report.notes.push(format!(
        "ratio {:.6} at n = t_{} = {}, analytic band [{:.6}, {:.6})",
        last.ratio, last.k, last.n, last.band_lo, last.band_hi
    ));
    report.verdict = Verdict::from_bool(failures.is_empty() && in_band);
    Ok(report)
}

/// Replaces the first `k` digits of a constructed pair by random target digits
/// and compares `S_n` before and after. Changing `k` leading digits moves
/// `S_n` by at most `k`, so the ratio difference decays like `k / log_b n`.
pub fn run_splice(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.kind != ExperimentKind::Splice {
        return wrong_kind(config, "run_splice");
    }
    config.validate()?;
    let pair = construction_pair(config)?;
    let k = config.splice_k.unwrap_or(DEFAULT_SPLICE_K);
    if k > pair.len {
        return param(format!("splice point {k} exceeds the constructed length {}", pair.len));
    }
    let target_x = digits::sample_uniform_with(config.base, k.max(1), &mut rng::stream(config.seed, 2))?;
    let target_y = digits::sample_uniform_with(config.base, k.max(1), &mut rng::stream(config.seed, 3))?;
    let spliced_x = digits::splice_prefix(&target_x, &pair.x, k)?;
    let spliced_y = digits::splice_prefix(&target_y, &pair.y, k)?;
    let prefix_ok = spliced_x.digits()[..k] == target_x.digits()[..k] && spliced_y.digits()[..k] == target_y.digits()[..k];

    let probes: Vec<usize> =
        probe_points(&pair.schedule, config.stages_or_default()).into_iter().filter(|&n| n > k.max(1)).collect();
    if probes.is_empty() {
        return param("no probe lies beyond the splice point");
    }
    let mut report = ExperimentReport::new(config);
    report.splice = probes
        .par_iter()
        .map(|&n| {
            let s_original = shifted_match(&pair.x, &pair.y, n)?.length;
            let s_spliced = shifted_match(&spliced_x, &spliced_y, n)?.length;
            let delta = s_spliced as i64 - s_original as i64;
            Ok(SpliceRecord {
                n,
                s_original,
                s_spliced,
                delta,
                ratio_original: ratio(s_original, n, config.base),
                ratio_spliced: ratio(s_spliced, n, config.base),
                pass: delta.unsigned_abs() as usize <= k,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tolerance = config.ratio_tolerance.unwrap_or(DEFAULT_RATIO_TOLERANCE);
    let last = report.splice.last().expect("nonempty");
    let final_gap = (last.ratio_spliced - last.ratio_original).abs();
    let bounded = report.splice.iter().all(|r| r.pass);
    if !prefix_ok {
        report.notes.push("spliced prefix differs from the target prefix".into());
    }
    report.notes.push(format!("final ratio gap {final_gap:.6} at n = {} (tolerance {tolerance})", last.n));
    report.verdict = Verdict::from_bool(prefix_ok && bounded && final_gap <= tolerance);
    Ok(report)
}

/// Table over `p` of `dim E_p`, `dim F_p` and the two lower bounds for the
/// dimension of the level sets.
pub fn run_spectra_sweep(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.kind != ExperimentKind::SpectraSweep {
        return wrong_kind(config, "run_spectra_sweep");
    }
    config.validate()?;
    let p_max = config.p_max.unwrap_or(DEFAULT_P_MAX);
    if p_max < config.p {
        return param(format!("p_max {p_max} is below p {}", config.p));
    }
    let tol = config.tol.unwrap_or(sft::DEFAULT_TOL);
    let base = config.base;
    let rows = (config.p..=p_max)
        .into_par_iter()
        .map(|p| {
            let matrix = sft::forbidden_pairs_by_runs(base, p)?;
            let rho = sft::spectral_radius(&matrix, tol)?;
            let n = matrix.size() as u64;
            let tau = matrix.zero_count() as u64;
            let dim_ep = sft::ratio_to_f64(sft::dim_ep(p)?);
            let scale = f64::from(p) * f64::from(base).ln();
            let hypothesis = u128::from(tau) <= u128::from(n / 2) * u128::from(n - n / 2);
            let brualdi = if hypothesis { sft::brualdi_bound(n, tau)? } else { f64::NAN };
            Ok(SweepRow {
                p,
                dim_ep,
                dim_fp_lower: rho.lower.ln() / scale,
                dim_fp_upper: rho.upper.ln() / scale,
                tau,
                brualdi_hypothesis: hypothesis,
                brualdi,
                rho_lower: rho.lower,
                rho_upper: rho.upper,
                lower_bound_sum: dim_ep + brualdi.ln() / scale,
                sharp_sum: dim_ep + rho.estimate.ln() / scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let threshold = config.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let increasing = rows.windows(2).all(|w| w[0].lower_bound_sum < w[1].lower_bound_sum);
    let best = rows.iter().map(|r| r.lower_bound_sum).fold(f64::NEG_INFINITY, f64::max);
    let brualdi_ok = rows.iter().all(|r| r.brualdi_hypothesis && r.brualdi <= r.rho_lower);
    let mut report = ExperimentReport::new(config);
    report.notes.push(format!("largest lower bound {best:.6}, threshold {threshold}"));
    if !increasing {
        report.notes.push("lower bound is not increasing in p".into());
    }
    if !brualdi_ok {
        report.notes.push("Brualdi bound exceeds the spectral bracket in some row".into());
    }
    report.verdict = Verdict::from_bool(increasing && brualdi_ok && best > threshold);
    report.sweep = rows;
    Ok(report)
}
