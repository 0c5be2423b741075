//! Transfer matrix of the subshift forbidding `0^{p+1}`.
//!
//! Each `p`-digit block is one symbol of the recoded `b^p`-ary shift; the
//! pair `(u, v)` is forbidden when the `2p`-digit word `u·v` (most significant
//! digit first in each block) contains `p + 1` consecutive zeros. The matrix
//! is the all-ones matrix minus the indicator of those pairs and is never
//! stored densely.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::resource_budget;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100_000;
/// Largest word length accepted by [`admissible_count`].
pub const MAX_WORD_LENGTH: usize = 10_000;

/// `A = J - 1_Λ` over the `b^p` blocks, zeros kept row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMatrix {
    base: u32,
    block: u32,
    size: usize,
    row_start: Vec<usize>,
    zero_cols: Vec<u32>,
}

impl TransferMatrix {
    pub fn base(&self) -> u32 {
        self.base
    }

    /// Block length `p`.
    pub fn block(&self) -> u32 {
        self.block
    }

    /// Matrix dimension `b^p`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `|Λ|`.
    pub fn zero_count(&self) -> usize {
        self.zero_cols.len()
    }

    pub fn zeros(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |u| self.row_zeros(u).iter().map(move |&v| (u, v as usize)))
    }

    pub fn row_zeros(&self, u: usize) -> &[u32] {
        &self.zero_cols[self.row_start[u]..self.row_start[u + 1]]
    }

    pub fn entry(&self, u: usize, v: usize) -> u8 {
        u8::from(!self.row_zeros(u).contains(&(v as u32)))
    }

    /// `out = A v`, via `(Av)_u = sum(v) - sum_{(u,w) in Λ} v_w`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let total: f64 = v.iter().sum();
        for (u, o) in out.iter_mut().enumerate() {
            *o = total - self.row_zeros(u).iter().map(|&w| v[w as usize]).sum::<f64>();
        }
    }

    fn from_rows(base: u32, block: u32, rows: Vec<Vec<u32>>) -> Self {
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        row_start.push(0);
        let mut zero_cols = Vec::new();
        for r in &rows {
            zero_cols.extend_from_slice(r);
            row_start.push(zero_cols.len());
        }
        Self { base, block, size: rows.len(), row_start, zero_cols }
    }
}

fn validate(base: u32, p: u32) -> Result<()> {
    if base < 2 {
        return param(format!("base must be at least 2, got {base}"));
    }
    if p < 2 {
        return param(format!("block parameter p must be at least 2, got {p}"));
    }
    Ok(())
}

/// `b^p` as a block count, if it fits the budget.
fn block_count(base: u32, p: u32) -> Result<usize> {
    let budget = resource_budget();
    match u64::from(base).checked_pow(p) {
        Some(n) if n <= budget => Ok(n as usize),
        _ => Err(Error::Resource {
            what: format!("{base}^{p} blocks"),
            needed: u128::from(base).checked_pow(p).unwrap_or(u128::MAX),
            budget,
        }),
    }
}

/// Λ by testing every `2p`-digit concatenation for a `0^{p+1}` window.
///
/// Needs `b^{2p}` pair tests; refuses when that exceeds the resource budget
/// (the closed-form [`zero_count`] remains available).
pub fn forbidden_pairs(base: u32, p: u32) -> Result<TransferMatrix> {
    validate(base, p)?;
    let budget = resource_budget();
    let pairs = u128::from(base).checked_pow(2 * p).unwrap_or(u128::MAX);
    if pairs > u128::from(budget) {
        return Err(Error::Resource { what: format!("pair scan over {base}^{}", 2 * p), needed: pairs, budget });
    }
    let n = block_count(base, p)?;
    let p = p as usize;
    let blocks: Vec<Vec<u32>> = (0..n).map(|u| block_digits(u, base, p)).collect();
    let mut word = vec![0u32; 2 * p];
    let rows = blocks
        .iter()
        .map(|bu| {
            word[..p].copy_from_slice(bu);
            (0..n)
                .filter(|&v| {
                    word[p..].copy_from_slice(&blocks[v]);
                    has_zero_run(&word, p + 1)
                })
                .map(|v| v as u32)
                .collect()
        })
        .collect();
    Ok(TransferMatrix::from_rows(base, p as u32, rows))
}

/// Λ from the run lengths at the block boundary: `(u, v)` is forbidden iff
/// the trailing zeros of `u` plus the leading zeros of `v` reach `p + 1`.
/// Costs `O(b^p + |Λ|)`, so it scales far past the pair scan.
pub fn forbidden_pairs_by_runs(base: u32, p: u32) -> Result<TransferMatrix> {
    validate(base, p)?;
    let n = block_count(base, p)?;
    let b = base as usize;
    let rows = (0..n)
        .map(|u| {
            let mut trailing = 0u32;
            let mut rest = u;
            while trailing < p && rest % b == 0 {
                trailing += 1;
                rest /= b;
            }
            if trailing == 0 {
                return Vec::new();
            }
            // Leading zeros of v at least p + 1 - trailing  <=>  v < b^(trailing - 1).
            let limit = b.pow(trailing - 1);
            (0..limit as u32).collect()
        })
        .collect();
    Ok(TransferMatrix::from_rows(base, p, rows))
}

fn block_digits(mut u: usize, base: u32, p: usize) -> Vec<u32> {
    let mut d = vec![0u32; p];
    for slot in d.iter_mut().rev() {
        *slot = (u % base as usize) as u32;
        u /= base as usize;
    }
    d
}

fn has_zero_run(word: &[u32], len: usize) -> bool {
    let mut run = 0;
    for &d in word {
        run = if d == 0 { run + 1 } else { 0 };
        if run >= len {
            return true;
        }
    }
    false
}

/// `p b^{p-1} - (p-1) b^{p-2}`.
pub fn zero_count(base: u32, p: u32) -> Result<BigUint> {
    validate(base, p)?;
    let b = BigUint::from(base);
    Ok(BigUint::from(p) * b.pow(p - 1) - BigUint::from(p - 1) * b.pow(p - 2))
}

/// Collatz–Wielandt bracket on the Perron root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub iterations: usize,
}

/// Power iteration from the all-ones vector, renormalised in max-norm, until
/// `max_u (Av)_u / v_u - min_u (Av)_u / v_u <= tol`.
pub fn spectral_radius(matrix: &TransferMatrix, tol: f64) -> Result<SpectralResult> {
    if tol.is_nan() || tol <= 0.0 {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let n = matrix.size();
    let mut v = vec![1.0f64; n];
    let mut w = vec![0.0f64; n];
    for iterations in 1..=MAX_ITERATIONS {
        matrix.apply(&v, &mut w);
        let mut lower = f64::INFINITY;
        let mut upper = 0.0f64;
        let mut peak = 0.0f64;
        for (&a, &b) in w.iter().zip(&v) {
            if a.is_nan() || a <= 0.0 {
                return Err(Error::Numerical(format!("iterate lost positivity at step {iterations}")));
            }
            let r = a / b;
            lower = lower.min(r);
            upper = upper.max(r);
            peak = peak.max(a);
        }
        if upper - lower <= tol {
            return Ok(SpectralResult { lower, upper, estimate: 0.5 * (lower + upper), iterations });
        }
        for (dst, &a) in v.iter_mut().zip(&w) {
            *dst = a / peak;
        }
    }
    Err(Error::Numerical(format!("bracket wider than {tol} after {MAX_ITERATIONS} iterations")))
}

/// The `(p+1)`-state automaton tracking the current zero run:
/// `B[s][0] = b - 1`, `B[s][s+1] = 1`.
pub fn automaton_matrix(base: u32, p: u32) -> Vec<Vec<u64>> {
    let states = p as usize + 1;
    (0..states)
        .map(|s| {
            let mut row = vec![0u64; states];
            row[0] = u64::from(base) - 1;
            if s + 1 < states {
                row[s + 1] = 1;
            }
            row
        })
        .collect()
}

/// Perron root `λ` of [`automaton_matrix`], found by bisection on its
/// characteristic polynomial `λ^{p+1} - (b-1)(λ^p + ... + 1)`, whose only
/// positive root lies in `(b-1, b)`. Then `ρ(A) = λ^p`.
pub fn small_automaton_radius(base: u32, p: u32, tol: f64) -> Result<f64> {
    validate(base, p)?;
    if tol.is_nan() || tol <= 0.0 {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let c = f64::from(base - 1);
    let poly = |x: f64| {
        let mut geometric = 0.0;
        let mut lead = 1.0;
        for _ in 0..=p {
            geometric = geometric * x + 1.0;
            lead *= x;
        }
        lead - c * geometric
    };
    let (mut lo, mut hi) = (c, f64::from(base));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if poly(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower bound `(n + sqrt(n^2 - 4 tau)) / 2` on the spectral radius of any
/// `n x n` 0/1 matrix with exactly `tau` zeros, valid for
/// `tau <= floor(n/2) ceil(n/2)`.
pub fn brualdi_bound(n: u64, tau: u64) -> Result<f64> {
    let n2 = u128::from(n);
    let cap = (n2 / 2) * (n2 - n2 / 2);
    if u128::from(tau) > cap {
        return Err(Error::Domain(format!("tau = {tau} exceeds floor(n/2)*ceil(n/2) = {cap} for n = {n}")));
    }
    let disc = n2 * n2 - 4 * u128::from(tau);
    Ok(0.5 * (n as f64 + (disc as f64).sqrt()))
}

/// Number of length-`m` words over `{0..b-1}` avoiding `0^{p+1}`, by a forward
/// pass over the current trailing-zero run length.
pub fn admissible_count(base: u32, p: u32, m: usize) -> Result<BigUint> {
    validate(base, p)?;
    if m > MAX_WORD_LENGTH {
        return Err(Error::Resource {
            what: "admissible word count".into(),
            needed: m as u128,
            budget: MAX_WORD_LENGTH as u64,
        });
    }
    let nonzero = BigUint::from(base - 1);
    let mut ending = vec![BigUint::zero(); p as usize + 1];
    ending[0] = BigUint::from(1u32);
    for _ in 0..m {
        let total: BigUint = ending.iter().sum();
        ending.rotate_right(1);
        ending[0] = &nonzero * total;
    }
    // rotate_right moved the run-p bucket into slot 0 before it was overwritten.
    Ok(ending.iter().sum())
}

/// `(p^2 - p - 1) / p^2`.
pub fn dim_ep(p: u32) -> Result<Ratio<u64>> {
    if p < 2 {
        return param(format!("block parameter p must be at least 2, got {p}"));
    }
    let p = u64::from(p);
    Ok(Ratio::new(p * p - p - 1, p * p))
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A dimension value carried as an interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimBracket {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
}

/// `log ρ(A) / log b^p` with the spectral bracket pushed through the log.
pub fn dim_fp(base: u32, p: u32, tol: f64) -> Result<DimBracket> {
    let matrix = forbidden_pairs_by_runs(base, p)?;
    let rho = spectral_radius(&matrix, tol)?;
    Ok(dim_from_rho(base, p, &rho))
}

fn dim_from_rho(base: u32, p: u32, rho: &SpectralResult) -> DimBracket {
    let scale = f64::from(p) * f64::from(base).ln();
    DimBracket { lower: rho.lower.ln() / scale, upper: rho.upper.ln() / scale, estimate: rho.estimate.ln() / scale }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundSum {
    pub p: u32,
    pub dim_ep: f64,
    pub brualdi: f64,
    /// `dim E_p + log(brualdi) / log b^p`.
    pub sum: f64,
    /// Same with `ρ(A)` in place of the Brualdi bound.
    pub sharp_sum: f64,
}

/// Lower bound for the dimension of the level sets obtained from block
/// parameter `p`, in its Brualdi form and its sharper spectral form.
pub fn dimension_lower_bound_sum(base: u32, p: u32) -> Result<LowerBoundSum> {
    validate(base, p)?;
    let dim_e = ratio_to_f64(dim_ep(p)?);
    let n = u64::from(base)
        .checked_pow(p)
        .ok_or_else(|| Error::Parameter(format!("{base}^{p} overflows")))?;
    let tau = zero_count(base, p)?.to_u64().expect("tau < n^2 fits");
    let brualdi = brualdi_bound(n, tau)?;
    let scale = f64::from(p) * f64::from(base).ln();
    let sharp = dim_fp(base, p, DEFAULT_TOL)?;
    Ok(LowerBoundSum { p, dim_ep: dim_e, brualdi, sum: dim_e + brualdi.ln() / scale, sharp_sum: dim_e + sharp.estimate })
}

/// Output record of the `spectra` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraSummary {
    pub base: u32,
    pub p: u32,
    pub n: u64,
    pub tau: u64,
    pub tau_closed_form: u64,
    pub brualdi: f64,
    pub rho_lower: f64,
    pub rho_upper: f64,
    pub rho_small_automaton_pow_p: f64,
    pub dim_fp_lower: f64,
    pub dim_fp_upper: f64,
    pub dim_ep: f64,
    pub lower_bound_sum: f64,
}

pub fn spectra_summary(base: u32, p: u32, tol: f64) -> Result<SpectraSummary> {
    let matrix = forbidden_pairs(base, p)?;
    let rho = spectral_radius(&matrix, tol)?;
    let tau = matrix.zero_count() as u64;
    let n = matrix.size() as u64;
    let lambda = small_automaton_radius(base, p, tol.min(1e-13))?;
    let dim = dim_from_rho(base, p, &rho);
    let dim_e = ratio_to_f64(dim_ep(p)?);
    let brualdi = brualdi_bound(n, tau)?;
    Ok(SpectraSummary {
        base,
        p,
        n,
        tau,
        tau_closed_form: zero_count(base, p)?.to_u64().expect("fits"),
        brualdi,
        rho_lower: rho.lower,
        rho_upper: rho.upper,
        rho_small_automaton_pow_p: lambda.powi(p as i32),
        dim_fp_lower: dim.lower,
        dim_fp_upper: dim.upper,
        dim_ep: dim_e,
        lower_bound_sum: dim_e + brualdi.ln() / (f64::from(p) * f64::from(base).ln()),
    })
}
