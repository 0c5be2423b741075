//! Finite prefixes of b-ary expansions and the sequence-level constructions:
//! the sets `E_p` and `F_p`, the insertion schedule and map `f`, deletion of a
//! position set, and prefix splicing.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{param, Error, Result};
use crate::rng;

/// Prefixes longer than this are sampled from `F_p` with floating ratios
/// instead of exact big-integer completion counts.
pub const EXACT_SAMPLING_LIMIT: usize = 512;

/// A finite prefix `x_1 .. x_n` of a base-`b` digit sequence.
///
/// Digit `x_i` is stored at index `i - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDigitSeq")]
pub struct DigitSeq {
    base: u32,
    digits: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDigitSeq {
    base: u32,
    digits: Vec<u32>,
}

impl TryFrom<RawDigitSeq> for DigitSeq {
    type Error = Error;

    fn try_from(raw: RawDigitSeq) -> Result<Self> {
        DigitSeq::new(raw.base, raw.digits)
    }
}

impl DigitSeq {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if let Some((i, d)) = digits.iter().enumerate().find(|(_, &d)| d >= base) {
            return param(format!("digit {d} at position {} is not below base {base}", i + 1));
        }
        Ok(Self { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at 1-based position `pos`.
    pub fn digit(&self, pos: usize) -> Option<u32> {
        pos.checked_sub(1).and_then(|i| self.digits.get(i).copied())
    }

    pub fn prefix(&self, n: usize) -> Result<DigitSeq> {
        if n > self.len() {
            return param(format!("prefix length {n} exceeds sequence length {}", self.len()));
        }
        Ok(Self { base: self.base, digits: self.digits[..n].to_vec() })
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.digits
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("digit sequences always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Raw text form: a `b=<base> n=<len>` header line, then the digits as
    /// single characters when `base <= 10` and comma-separated otherwise.
    pub fn to_raw_text(&self) -> String {
        let body = if self.base <= 10 {
            self.digits.iter().map(|d| char::from(b'0' + *d as u8)).collect::<String>()
        } else {
            self.digits.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        };
        format!("b={} n={}\n{}\n", self.base, self.len(), body)
    }

    pub fn from_raw_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty input".into()))?;
        let mut base = None;
        let mut len = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("b", v)) => base = v.parse::<u32>().ok(),
                Some(("n", v)) => len = v.parse::<usize>().ok(),
                _ => return Err(Error::Format(format!("unexpected header field {field:?}"))),
            }
        }
        let (base, len) = match (base, len) {
            (Some(b), Some(n)) => (b, n),
            _ => return Err(Error::Format("header must read b=<base> n=<len>".into())),
        };
        check_base(base)?;
        let body: String = lines.collect::<Vec<_>>().join("");
        let body = body.trim();
        let digits = if body.is_empty() {
            Vec::new()
        } else if base <= 10 {
            body.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Format(format!("bad digit {c:?}"))))
                .collect::<Result<Vec<_>>>()?
        } else {
            body.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Format(format!("bad digit {t:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        if digits.len() != len {
            return Err(Error::Format(format!("header says n={len} but {} digits follow", digits.len())));
        }
        Self::new(base, digits)
    }

    /// Parses either serialized form, choosing by the first non-blank byte.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_raw_text(text)
        }
    }
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return param(format!("base must be at least 2, got {base}"));
    }
    Ok(())
}

fn check_p(p: u32) -> Result<()> {
    if p < 2 {
        return param(format!("block parameter p must be at least 2, got {p}"));
    }
    Ok(())
}

/// Target growth rate: a nonnegative real or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Infinity,
}

impl Alpha {
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return param(format!("alpha must be a nonnegative real, got {value}"));
        }
        Ok(Alpha::Finite(value))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Alpha::Infinity)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Alpha::Infinity),
            other => {
                let v = other.parse::<f64>().map_err(|_| Error::Parameter(format!("bad alpha {s:?}")))?;
                if v.is_infinite() && v > 0.0 {
                    Ok(Alpha::Infinity)
                } else {
                    Alpha::finite(v)
                }
            }
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Alpha::Finite(a) => serializer.serialize_f64(*a),
            Alpha::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Alpha::finite(v),
            Repr::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Stage lengths driving the insertion map `f`.
///
/// Stage `k` (1-based) copies `m_k = p^2 2^k` original digits and then inserts
/// `ell_k` ones, so that the run of ones ends exactly at output position `t_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionSchedule {
    p: u32,
    base: u32,
    alpha: Alpha,
    m: Vec<u64>,
    ell: Vec<u64>,
    t: Vec<u64>,
}

impl ConstructionSchedule {
    pub fn build(p: u32, base: u32, alpha: Alpha, stages: usize) -> Result<Self> {
        check_p(p)?;
        check_base(base)?;
        if let Alpha::Finite(a) = alpha {
            Alpha::finite(a)?;
        }
        if stages == 0 {
            return param("schedule needs at least one stage");
        }
        let p2 = u64::from(p) * u64::from(p);
        let mut m = Vec::with_capacity(stages);
        let mut ell = Vec::with_capacity(stages);
        let mut t = Vec::with_capacity(stages);
        let mut total = 0u64;
        for k in 1..=stages {
            let mk = 1u64
                .checked_shl(k as u32)
                .and_then(|v| v.checked_mul(p2))
                .ok_or_else(|| Error::Parameter(format!("m_{k} overflows u64")))?;
            let lk = insertion_length(alpha, k as u64, base)?;
            total = total
                .checked_add(mk)
                .and_then(|v| v.checked_add(lk))
                .ok_or_else(|| Error::Parameter(format!("t_{k} overflows u64")))?;
            m.push(mk);
            ell.push(lk);
            t.push(total);
        }
        Ok(Self { p, base, alpha, m, ell, t })
    }

    /// Smallest schedule whose horizon `t_K` reaches `n`.
    pub fn covering(p: u32, base: u32, alpha: Alpha, n: usize) -> Result<Self> {
        let mut stages = 1;
        loop {
            let s = Self::build(p, base, alpha, stages)?;
            if s.horizon() >= n as u64 {
                return Ok(s);
            }
            stages += 1;
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn stages(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn ell(&self) -> &[u64] {
        &self.ell
    }

    pub fn t(&self) -> &[u64] {
        &self.t
    }

    /// `t_K`, the last output position governed by the schedule.
    pub fn horizon(&self) -> u64 {
        *self.t.last().expect("at least one stage")
    }

    /// Inserted output positions (1-based) that are `<= n`, ascending.
    pub fn inserted_positions(&self, n: usize) -> Vec<usize> {
        let n = n as u64;
        let mut out = Vec::new();
        for (tk, lk) in self.t.iter().zip(&self.ell) {
            let start = tk - lk + 1;
            if start > n {
                break;
            }
            out.extend((start..=(*tk).min(n)).map(|i| i as usize));
        }
        out
    }

    pub fn inserted_count(&self, n: usize) -> usize {
        let n = n as u64;
        self.t
            .iter()
            .zip(&self.ell)
            .map(|(tk, lk)| {
                let start = tk - lk + 1;
                if start > n {
                    0
                } else {
                    ((*tk).min(n) + 1 - start) as usize
                }
            })
            .sum()
    }

    /// Number of original digits that land in the first `n` output positions.
    pub fn originals_needed(&self, n: usize) -> usize {
        n - self.inserted_count(n)
    }
}

/// `ell_k`: `floor(alpha (k+1) log_b 2)` for finite alpha, `k^2` otherwise.
fn insertion_length(alpha: Alpha, k: u64, base: u32) -> Result<u64> {
    match alpha {
        Alpha::Infinity => k.checked_mul(k).ok_or_else(|| Error::Parameter(format!("ell_{k} overflows"))),
        Alpha::Finite(0.0) => Ok(0),
        Alpha::Finite(a) => {
            let x = a * (k + 1) as f64 * (std::f64::consts::LN_2 / f64::from(base).ln());
            if !x.is_finite() || x >= u64::MAX as f64 {
                return param(format!("ell_{k} is not representable"));
            }
            // Values within rounding noise of an integer floor to that integer.
            let nearest = x.round();
            let v = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) { nearest } else { x.floor() };
            Ok(v as u64)
        }
    }
}

/// Membership descriptor for the sets the constructions draw from.
#[derive(Clone, Debug, PartialEq)]
pub enum SetDescriptor {
    /// All of `{0..b-1}^N`.
    Uniform { base: u32 },
    /// Positions `k p^2 + j` with `k >= 0`, `1 <= j <= p+1` are zero.
    Ep { base: u32, p: u32 },
    /// No window of `p + 1` consecutive zeros.
    Fp { base: u32, p: u32 },
    /// Image of the inner set under the insertion map of `schedule`.
    FImage { schedule: ConstructionSchedule, inner: Box<SetDescriptor> },
}

impl SetDescriptor {
    pub fn base(&self) -> u32 {
        match self {
            SetDescriptor::Uniform { base } | SetDescriptor::Ep { base, .. } | SetDescriptor::Fp { base, .. } => *base,
            SetDescriptor::FImage { inner, .. } => inner.base(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetDescriptor::Uniform { base } => check_base(*base),
            SetDescriptor::Ep { base, p } | SetDescriptor::Fp { base, p } => {
                check_base(*base)?;
                check_p(*p)
            }
            SetDescriptor::FImage { schedule, inner } => {
                inner.validate()?;
                if schedule.base() != inner.base() {
                    return param(format!(
                        "schedule base {} does not match inner set base {}",
                        schedule.base(),
                        inner.base()
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Whether 1-based position `i` is a forced zero of `E_p`.
pub fn ep_forced(i: usize, p: u32) -> bool {
    let p = p as usize;
    (i - 1) % (p * p) < p + 1
}

/// First `n` digits of the non-terminating base-`b` expansion of
/// `numerator / denominator` in `(0, 1]`.
pub fn expand_rational(numerator: u64, denominator: u64, base: u32, n: usize) -> Result<DigitSeq> {
    check_base(base)?;
    if denominator == 0 {
        return param("zero denominator");
    }
    if numerator == 0 || numerator > denominator {
        return param(format!("{numerator}/{denominator} is outside (0, 1]"));
    }
    if n == 0 {
        return param("need at least one digit");
    }
    let den = u128::from(denominator);
    let b = u128::from(base);
    // Remainder kept in (0, den] so terminating expansions continue with b-1.
    let mut r = u128::from(numerator);
    let digits = (0..n)
        .map(|_| {
            let scaled = r * b;
            let d = (scaled - 1) / den;
            r = scaled - d * den;
            d as u32
        })
        .collect();
    DigitSeq::new(base, digits)
}

pub fn sample_uniform(base: u32, n: usize, seed: u64) -> Result<DigitSeq> {
    sample_uniform_with(base, n, &mut rng::stream(seed, 0))
}

/// [`sample_uniform`] drawing from a caller-owned stream.
pub fn sample_uniform_with<R: Rng>(base: u32, n: usize, rng: &mut R) -> Result<DigitSeq> {
    check_base(base)?;
    if n == 0 {
        return param("need at least one digit");
    }
    let digits = (0..n).map(|_| rng.gen_range(0..base)).collect();
    DigitSeq::new(base, digits)
}

/// Draws a length-`n` prefix of a member of `desc` from stream 0 of `seed`.
///
/// `F_p` prefixes are uniform over all admissible words of length `n`.
pub fn sample_member(desc: &SetDescriptor, n: usize, seed: u64) -> Result<DigitSeq> {
    sample_member_with(desc, n, &mut rng::stream(seed, 0))
}

pub fn sample_member_with<R: Rng>(desc: &SetDescriptor, n: usize, rng: &mut R) -> Result<DigitSeq> {
    desc.validate()?;
    if n == 0 {
        return param("need at least one digit");
    }
    match desc {
        SetDescriptor::Uniform { base } => sample_uniform_with(*base, n, rng),
        SetDescriptor::Ep { base, p } => {
            let digits = (1..=n)
                .map(|i| if ep_forced(i, *p) { 0 } else { rng.gen_range(0..*base) })
                .collect();
            DigitSeq::new(*base, digits)
        }
        SetDescriptor::Fp { base, p } => {
            let digits = FpSampler::new(*base, *p, n).sample(rng);
            DigitSeq::new(*base, digits)
        }
        SetDescriptor::FImage { schedule, inner } => {
            let needed = schedule.originals_needed(n);
            let original = sample_member_with(inner, needed, rng)?;
            apply_f(&original, schedule, n)
        }
    }
}

/// Uniform sampler over words of a fixed length avoiding `0^{p+1}`.
///
/// `completions[r][s]` is the number of admissible continuations of length
/// `r` from a state whose trailing zero run has length `s`.
struct FpSampler {
    base: u32,
    p: usize,
    n: usize,
    plan: FpPlan,
}

enum FpPlan {
    Exact(Vec<Vec<BigUint>>),
    /// `completions[r][s] / completions[r][0]`
    Ratios(Vec<Vec<f64>>),
}

impl FpSampler {
    fn new(base: u32, p: u32, n: usize) -> Self {
        let p = p as usize;
        let plan = if n <= EXACT_SAMPLING_LIMIT {
            let nonzero = BigUint::from(base - 1);
            let mut table = vec![vec![BigUint::one(); p + 1]];
            for r in 1..=n {
                let prev = &table[r - 1];
                let row = (0..=p)
                    .map(|s| {
                        let mut c = &nonzero * &prev[0];
                        if s < p {
                            c += &prev[s + 1];
                        }
                        c
                    })
                    .collect();
                table.push(row);
            }
            FpPlan::Exact(table)
        } else {
            let nonzero = f64::from(base - 1);
            let mut table = vec![vec![1.0; p + 1]];
            for r in 1..=n {
                let prev = &table[r - 1];
                let raw: Vec<f64> = (0..=p).map(|s| nonzero + if s < p { prev[s + 1] } else { 0.0 }).collect();
                let head = raw[0];
                table.push(raw.into_iter().map(|v| v / head).collect());
            }
            FpPlan::Ratios(table)
        };
        Self { base, p, n, plan }
    }

    fn sample<R: RngCore>(&self, rng: &mut R) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.n);
        let mut run = 0usize;
        match &self.plan {
            FpPlan::Exact(table) => {
                // Unrank a single uniform draw below the total count.
                let mut rank = uniform_below(&table[self.n][0], rng);
                for pos in 0..self.n {
                    let rest = &table[self.n - pos - 1];
                    let zero = if run < self.p { rest[run + 1].clone() } else { BigUint::zero() };
                    if rank < zero {
                        out.push(0);
                        run += 1;
                    } else {
                        rank -= zero;
                        let d = &rank / &rest[0];
                        rank -= &d * &rest[0];
                        out.push(1 + d.to_u32().expect("digit fits"));
                        run = 0;
                    }
                }
            }
            FpPlan::Ratios(table) => {
                let nonzero = f64::from(self.base - 1);
                for pos in 0..self.n {
                    let rest = &table[self.n - pos - 1];
                    let zero = if run < self.p { rest[run + 1] } else { 0.0 };
                    if rng.gen::<f64>() * (zero + nonzero) < zero {
                        out.push(0);
                        run += 1;
                    } else {
                        out.push(rng.gen_range(1..self.base));
                        run = 0;
                    }
                }
            }
        }
        out
    }
}

/// Uniform integer in `[0, bound)` by rejection on the bit length.
fn uniform_below<R: RngCore>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let spare = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(top) = buf.last_mut() {
            *top &= 0xffu8 >> spare;
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// Finite-prefix membership: only constraints lying fully inside the prefix
/// are checked. A sequence with a different base is never a member.
pub fn check_membership(seq: &DigitSeq, desc: &SetDescriptor) -> bool {
    if seq.base() != desc.base() || desc.validate().is_err() {
        return false;
    }
    match desc {
        SetDescriptor::Uniform { .. } => true,
        SetDescriptor::Ep { p, .. } => seq.digits().iter().enumerate().all(|(i, &d)| d == 0 || !ep_forced(i + 1, *p)),
        SetDescriptor::Fp { p, .. } => longest_zero_run(seq.digits()) <= *p as usize,
        SetDescriptor::FImage { schedule, inner } => {
            // Past the horizon the finite composition leaves digits in place.
            let inserted = schedule.inserted_positions(seq.len());
            if inserted.iter().any(|&i| seq.digit(i) != Some(1)) {
                return false;
            }
            match remove_positions(seq, &inserted) {
                Ok(original) => check_membership(&original, inner),
                Err(_) => false,
            }
        }
    }
}

fn longest_zero_run(digits: &[u32]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &d in digits {
        run = if d == 0 { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

/// First `n` digits of `f(x)`: original digits in blocks of `m_k`, each block
/// followed by `ell_k` ones ending at position `t_k`.
pub fn apply_f(seq: &DigitSeq, schedule: &ConstructionSchedule, n: usize) -> Result<DigitSeq> {
    if seq.base() != schedule.base() {
        return param(format!("sequence base {} does not match schedule base {}", seq.base(), schedule.base()));
    }
    if schedule.horizon() < n as u64 {
        return Err(Error::Precondition(format!(
            "schedule horizon t_K = {} does not cover n = {n}",
            schedule.horizon()
        )));
    }
    let needed = schedule.originals_needed(n);
    if seq.len() < needed {
        return Err(Error::Precondition(format!(
            "output length {n} needs {needed} original digits, only {} given",
            seq.len()
        )));
    }
    let src = seq.digits();
    let mut out = Vec::with_capacity(n);
    let mut used = 0usize;
    for (&mk, &lk) in schedule.m().iter().zip(schedule.ell()) {
        if out.len() >= n {
            break;
        }
        let take = (mk as usize).min(n - out.len());
        out.extend_from_slice(&src[used..used + take]);
        used += take;
        let ones = (lk as usize).min(n - out.len());
        out.extend(std::iter::repeat_n(1, ones));
    }
    DigitSeq::new(seq.base(), out)
}

/// Deletes the 1-based positions in `mask` (strictly increasing).
pub fn remove_positions(seq: &DigitSeq, mask: &[usize]) -> Result<DigitSeq> {
    if let Some(w) = mask.windows(2).find(|w| w[0] >= w[1]) {
        return param(format!("mask must be strictly increasing, found {} before {}", w[0], w[1]));
    }
    if let Some(&bad) = mask.iter().find(|&&i| i == 0 || i > seq.len()) {
        return param(format!("mask position {bad} is outside 1..={}", seq.len()));
    }
    let mut skip = mask.iter().peekable();
    let digits = seq
        .digits()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            if skip.peek() == Some(&&(i + 1)) {
                skip.next();
                false
            } else {
                true
            }
        })
        .map(|(_, &d)| d)
        .collect();
    DigitSeq::new(seq.base(), digits)
}

/// Digits `1..=k` from `head`, the rest from `tail` at the same positions.
pub fn splice_prefix(head: &DigitSeq, tail: &DigitSeq, k: usize) -> Result<DigitSeq> {
    if head.base() != tail.base() {
        return param(format!("base mismatch: {} vs {}", head.base(), tail.base()));
    }
    if k > head.len() || k > tail.len() {
        return param(format!("splice point {k} exceeds a sequence length"));
    }
    let mut digits = head.digits()[..k].to_vec();
    digits.extend_from_slice(&tail.digits()[k..]);
    DigitSeq::new(head.base(), digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(base: u32, d: &[u32]) -> DigitSeq {
        DigitSeq::new(base, d.to_vec()).unwrap()
    }

    #[test]
    fn schedule_examples() {
        let s = ConstructionSchedule::build(2, 2, Alpha::Finite(1.0), 3).unwrap();
        assert_eq!(s.m(), &[8, 16, 32]);
        assert_eq!(s.ell(), &[2, 3, 4]);
        assert_eq!(s.t(), &[10, 29, 65]);

        let s = ConstructionSchedule::build(2, 2, Alpha::Finite(0.0), 2).unwrap();
        assert_eq!(s.ell(), &[0, 0]);
        assert_eq!(s.t(), &[8, 24]);

        let s = ConstructionSchedule::build(2, 2, Alpha::Infinity, 3).unwrap();
        assert_eq!(s.ell(), &[1, 4, 9]);
    }

    #[test]
    fn schedule_floor_is_guarded() {
        // log_4 2 = 1/2 and log_8 2 = 1/3 are not exact in floating point.
        let s = ConstructionSchedule::build(2, 4, Alpha::Finite(1.0), 5).unwrap();
        assert_eq!(s.ell(), &[1, 1, 2, 2, 3]);
        let s = ConstructionSchedule::build(2, 8, Alpha::Finite(3.0), 4).unwrap();
        assert_eq!(s.ell(), &[2, 3, 4, 5]);
    }

    #[test]
    fn schedule_rejects_bad_parameters() {
        assert!(ConstructionSchedule::build(1, 2, Alpha::Finite(1.0), 3).is_err());
        assert!(ConstructionSchedule::build(2, 1, Alpha::Finite(1.0), 3).is_err());
        assert!(ConstructionSchedule::build(2, 2, Alpha::Finite(1.0), 0).is_err());
        assert!(ConstructionSchedule::build(2, 2, Alpha::Finite(-1.0), 3).is_err());
        assert!(ConstructionSchedule::build(2, 2, Alpha::Finite(1.0), 80).is_err());
    }

    #[test]
    fn rational_expansions() {
        assert_eq!(expand_rational(1, 3, 2, 6).unwrap().digits(), &[0, 1, 0, 1, 0, 1]);
        assert_eq!(expand_rational(1, 2, 2, 5).unwrap().digits(), &[0, 1, 1, 1, 1]);
        assert_eq!(expand_rational(1, 1, 10, 3).unwrap().digits(), &[9, 9, 9]);
        assert_eq!(expand_rational(3, 8, 10, 5).unwrap().digits(), &[3, 7, 4, 9, 9]);
        assert!(expand_rational(1, 0, 2, 3).is_err());
        assert!(expand_rational(0, 3, 2, 3).is_err());
        assert!(expand_rational(4, 3, 2, 3).is_err());
    }

    #[test]
    fn uniform_sampling_is_deterministic_and_balanced() {
        assert_eq!(sample_uniform(2, 4, 11).unwrap(), sample_uniform(2, 4, 11).unwrap());
        let one = sample_uniform(3, 1, 5).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.digits()[0] < 3);

        let big = sample_uniform(2, 1_000_000, 99).unwrap();
        let ones = big.digits().iter().filter(|&&d| d == 1).count() as f64 / 1e6;
        assert!((0.49..=0.51).contains(&ones), "frequency of 1 was {ones}");
    }

    #[test]
    fn ep_members() {
        let d = SetDescriptor::Ep { base: 2, p: 2 };
        let x = sample_member(&d, 8, 3).unwrap();
        for i in [1, 2, 3, 5, 6, 7] {
            assert_eq!(x.digit(i), Some(0));
        }
        assert!(check_membership(&seq(2, &[0, 0, 0, 1, 0, 0, 0, 1]), &d));
        assert!(!check_membership(&seq(2, &[0, 0, 0, 1, 1, 0, 0, 1]), &d));
    }

    #[test]
    fn fp_members() {
        let d = SetDescriptor::Fp { base: 2, p: 2 };
        assert!(!check_membership(&seq(2, &[0, 0, 0]), &d));
        assert!(check_membership(&seq(2, &[1, 0, 0, 1]), &d));
        for s in 0..200 {
            let x = sample_member(&d, 3, s).unwrap();
            assert_ne!(x.digits(), &[0, 0, 0]);
            assert!(check_membership(&sample_member(&d, 4, s).unwrap(), &d));
        }
        // Long prefixes go through the ratio sampler.
        let long = sample_member(&SetDescriptor::Fp { base: 3, p: 2 }, 5000, 1).unwrap();
        assert!(check_membership(&long, &SetDescriptor::Fp { base: 3, p: 2 }));
    }

    #[test]
    fn membership_rejects_base_mismatch() {
        assert!(!check_membership(&seq(3, &[1, 2]), &SetDescriptor::Uniform { base: 2 }));
        assert!(check_membership(&seq(2, &[1, 0]), &SetDescriptor::Uniform { base: 2 }));
    }

    #[test]
    fn apply_f_layout() {
        let s = ConstructionSchedule::build(2, 2, Alpha::Finite(1.0), 3).unwrap();
        let x = seq(2, &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let y = apply_f(&x, &s, 12).unwrap();
        assert_eq!(y.digits(), &[0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0]);
        assert_eq!(s.inserted_positions(12), vec![9, 10]);
        assert_eq!(remove_positions(&y, &s.inserted_positions(12)).unwrap(), x);

        let zero = ConstructionSchedule::build(2, 2, Alpha::Finite(0.0), 3).unwrap();
        let x = sample_uniform(2, 40, 1).unwrap();
        assert_eq!(apply_f(&x, &zero, 40).unwrap(), x);
    }

    #[test]
    fn apply_f_preconditions() {
        let s = ConstructionSchedule::build(2, 2, Alpha::Finite(1.0), 2).unwrap();
        let x = sample_uniform(2, 40, 1).unwrap();
        assert!(matches!(apply_f(&x, &s, 30), Err(Error::Precondition(_))));
        assert!(matches!(apply_f(&x.prefix(5).unwrap(), &s, 12), Err(Error::Precondition(_))));
        assert!(apply_f(&sample_uniform(3, 40, 1).unwrap(), &s, 12).is_err());
    }

    #[test]
    fn f_image_members() {
        let s = ConstructionSchedule::build(2, 2, Alpha::Finite(1.0), 5).unwrap();
        let d = SetDescriptor::FImage { schedule: s.clone(), inner: Box::new(SetDescriptor::Fp { base: 2, p: 2 }) };
        let y = sample_member(&d, 100, 4).unwrap();
        assert_eq!(y.len(), 100);
        assert!(check_membership(&y, &d));
        let mut broken = y.clone().into_digits();
        broken[8] = 0;
        assert!(!check_membership(&DigitSeq::new(2, broken).unwrap(), &d));
    }

    #[test]
    fn remove_and_splice() {
        let s = seq(2, &[0, 1, 1, 0]);
        assert_eq!(remove_positions(&s, &[2, 3]).unwrap().digits(), &[0, 0]);
        assert_eq!(remove_positions(&s, &[]).unwrap(), s);
        assert!(remove_positions(&s, &[5]).is_err());
        assert!(remove_positions(&s, &[0]).is_err());
        assert!(remove_positions(&s, &[3, 2]).is_err());

        let head = seq(2, &[1, 1, 1, 1]);
        let tail = seq(2, &[0, 0, 0, 0]);
        assert_eq!(splice_prefix(&head, &tail, 2).unwrap().digits(), &[1, 1, 0, 0]);
        assert_eq!(splice_prefix(&head, &tail, 0).unwrap(), tail);
        assert!(splice_prefix(&head, &seq(3, &[0, 0]), 1).is_err());
    }

    #[test]
    fn serialized_forms() {
        let s = seq(2, &[0, 1, 1, 0]);
        assert_eq!(s.to_json(), r#"{"base":2,"digits":[0,1,1,0]}"#);
        assert_eq!(s.to_raw_text(), "b=2 n=4\n0110\n");
        assert_eq!(DigitSeq::parse(&s.to_raw_text()).unwrap(), s);
        assert_eq!(DigitSeq::parse(&s.to_json()).unwrap(), s);

        let wide = seq(12, &[11, 0, 7]);
        assert_eq!(wide.to_raw_text(), "b=12 n=3\n11,0,7\n");
        assert_eq!(DigitSeq::parse(&wide.to_raw_text()).unwrap(), wide);

        assert!(DigitSeq::parse(r#"{"base":2,"digits":[0,2]}"#).is_err());
        assert!(DigitSeq::parse(r#"{"base":2,"digits":[0],"extra":1}"#).is_err());
        assert!(DigitSeq::parse("b=2 n=3\n01\n").is_err());
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!("inf".parse::<Alpha>().unwrap(), Alpha::Infinity);
        assert_eq!("0.5".parse::<Alpha>().unwrap(), Alpha::Finite(0.5));
        assert!("-1".parse::<Alpha>().is_err());
        assert_eq!(serde_json::to_string(&Alpha::Infinity).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Alpha>("2").unwrap(), Alpha::Finite(2.0));
        assert_eq!(serde_json::from_str::<Alpha>("\"infinity\"").unwrap(), Alpha::Infinity);
    }
}
