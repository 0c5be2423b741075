//! Aligned (`L_n`) and shifted (`S_n`) longest common substrings of two
//! digit prefixes.
//!
//! `S_n` has two implementations: a quadratic dynamic program that serves as
//! the oracle, and a linear-time matcher that builds a suffix automaton of
//! `y_1..y_n` and streams `x_1..x_n` through it. Both report the same witness:
//! among all longest matches, the smallest `offset_x`, then the smallest
//! `offset_y`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::digits::DigitSeq;
use crate::error::{param, Result};

/// A common block `x_{i+1}..x_{i+l} = y_{j+1}..y_{j+l}` with `l = length`,
/// `i = offset_x`, `j = offset_y`. Length 0 means the prefixes share no digit
/// (offsets are then 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub length: usize,
    pub offset_x: usize,
    pub offset_y: usize,
}

impl MatchResult {
    const NONE: MatchResult = MatchResult { length: 0, offset_x: 0, offset_y: 0 };

    /// Re-checks the witness digit by digit against the first `n` digits.
    pub fn is_witness(&self, x: &DigitSeq, y: &DigitSeq, n: usize) -> bool {
        if self.offset_x + self.length > n || self.offset_y + self.length > n {
            return false;
        }
        let xs = &x.digits()[self.offset_x..self.offset_x + self.length];
        let ys = &y.digits()[self.offset_y..self.offset_y + self.length];
        xs == ys
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fast,
    Brute,
}

fn check_inputs(x: &DigitSeq, y: &DigitSeq, n: usize) -> Result<()> {
    if x.base() != y.base() {
        return param(format!("base mismatch: {} vs {}", x.base(), y.base()));
    }
    if n == 0 {
        return param("n must be at least 1");
    }
    if n > x.len() || n > y.len() {
        return param(format!("n = {n} exceeds a sequence length ({} / {})", x.len(), y.len()));
    }
    Ok(())
}

/// `L_n`: longest run of positions `t <= n` with `x_t = y_t`.
pub fn aligned_match(x: &DigitSeq, y: &DigitSeq, n: usize) -> Result<MatchResult> {
    check_inputs(x, y, n)?;
    let mut best = MatchResult::NONE;
    let mut run = 0usize;
    for (t, (a, b)) in x.digits()[..n].iter().zip(&y.digits()[..n]).enumerate() {
        run = if a == b { run + 1 } else { 0 };
        if run > best.length {
            let start = t + 1 - run;
            best = MatchResult { length: run, offset_x: start, offset_y: start };
        }
    }
    Ok(best)
}

/// `S_n` by the common-suffix table `D[i][j]`, kept one row at a time.
pub fn shifted_match_oracle(x: &DigitSeq, y: &DigitSeq, n: usize) -> Result<MatchResult> {
    check_inputs(x, y, n)?;
    let xs = &x.digits()[..n];
    let ys = &y.digits()[..n];
    let mut prev = vec![0usize; n + 1];
    let mut cur = vec![0usize; n + 1];
    let mut best = MatchResult::NONE;
    for i in 1..=n {
        for j in 1..=n {
            cur[j] = if xs[i - 1] == ys[j - 1] { prev[j - 1] + 1 } else { 0 };
            if cur[j] > best.length {
                best = MatchResult { length: cur[j], offset_x: i - cur[j], offset_y: j - cur[j] };
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(best)
}

/// `S_n` in `O(n)` expected time for small bases.
pub fn shifted_match(x: &DigitSeq, y: &DigitSeq, n: usize) -> Result<MatchResult> {
    check_inputs(x, y, n)?;
    let sam = SuffixAutomaton::build(y.base(), &y.digits()[..n]);
    let best = sam.longest_common(&x.digits()[..n]);
    debug_assert!(best.is_witness(x, y, n));
    Ok(best)
}

pub fn shifted_match_with(algo: Algorithm, x: &DigitSeq, y: &DigitSeq, n: usize) -> Result<MatchResult> {
    match algo {
        Algorithm::Fast => shifted_match(x, y, n),
        Algorithm::Brute => shifted_match_oracle(x, y, n),
    }
}

const NIL: u32 = u32::MAX;

/// Bases up to this size use a dense transition table.
const DENSE_BASE_LIMIT: u32 = 64;

enum Transitions {
    Dense { stride: usize, table: Vec<u32> },
    Sparse(Vec<Vec<(u32, u32)>>),
}

impl Transitions {
    fn new(base: u32, capacity: usize) -> Self {
        if base <= DENSE_BASE_LIMIT {
            Transitions::Dense { stride: base as usize, table: Vec::with_capacity(capacity * base as usize) }
        } else {
            Transitions::Sparse(Vec::with_capacity(capacity))
        }
    }

    fn push_empty(&mut self) {
        match self {
            Transitions::Dense { stride, table } => table.extend(std::iter::repeat_n(NIL, *stride)),
            Transitions::Sparse(rows) => rows.push(Vec::new()),
        }
    }

    fn push_copy(&mut self, from: u32) {
        match self {
            Transitions::Dense { stride, table } => {
                let start = from as usize * *stride;
                table.extend_from_within(start..start + *stride);
            }
            Transitions::Sparse(rows) => rows.push(rows[from as usize].clone()),
        }
    }

    #[inline]
    fn get(&self, state: u32, c: u32) -> u32 {
        match self {
            Transitions::Dense { stride, table } => table[state as usize * stride + c as usize],
            Transitions::Sparse(rows) => {
                rows[state as usize].iter().find(|(k, _)| *k == c).map_or(NIL, |&(_, v)| v)
            }
        }
    }

    #[inline]
    fn set(&mut self, state: u32, c: u32, target: u32) {
        match self {
            Transitions::Dense { stride, table } => table[state as usize * *stride + c as usize] = target,
            Transitions::Sparse(rows) => {
                let row = &mut rows[state as usize];
                match row.iter_mut().find(|(k, _)| *k == c) {
                    Some(slot) => slot.1 = target,
                    None => row.push((c, target)),
                }
            }
        }
    }
}

/// Suffix automaton of one digit string, with the first end position of every
/// state so that earliest occurrences can be reported.
struct SuffixAutomaton {
    next: Transitions,
    link: Vec<u32>,
    len: Vec<u32>,
    first_end: Vec<u32>,
}

impl SuffixAutomaton {
    fn build(base: u32, text: &[u32]) -> Self {
        let cap = 2 * text.len() + 1;
        let mut sam = Self {
            next: Transitions::new(base, cap),
            link: Vec::with_capacity(cap),
            len: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
        };
        sam.add_state(0, NIL, 0);
        sam.next.push_empty();
        let mut last = 0u32;
        for (pos, &c) in text.iter().enumerate() {
            let cur = sam.add_state(sam.len[last as usize] + 1, NIL, pos as u32);
            sam.next.push_empty();
            let mut p = last;
            while p != NIL && sam.next.get(p, c) == NIL {
                sam.next.set(p, c, cur);
                p = sam.link[p as usize];
            }
            if p == NIL {
                sam.link[cur as usize] = 0;
            } else {
                let q = sam.next.get(p, c);
                if sam.len[p as usize] + 1 == sam.len[q as usize] {
                    sam.link[cur as usize] = q;
                } else {
                    let clone = sam.add_state(sam.len[p as usize] + 1, sam.link[q as usize], sam.first_end[q as usize]);
                    sam.next.push_copy(q);
                    while p != NIL && sam.next.get(p, c) == q {
                        sam.next.set(p, c, clone);
                        p = sam.link[p as usize];
                    }
                    sam.link[q as usize] = clone;
                    sam.link[cur as usize] = clone;
                }
            }
            last = cur;
        }
        sam
    }

    fn add_state(&mut self, len: u32, link: u32, first_end: u32) -> u32 {
        self.len.push(len);
        self.link.push(link);
        self.first_end.push(first_end);
        (self.len.len() - 1) as u32
    }

    /// Longest substring of `pattern` occurring in the indexed text. The first
    /// end position in `pattern` that reaches the maximum gives the smallest
    /// pattern offset; the state's first end gives the smallest text offset.
    fn longest_common(&self, pattern: &[u32]) -> MatchResult {
        let mut best = MatchResult::NONE;
        let mut state = 0u32;
        let mut matched = 0usize;
        for (end, &c) in pattern.iter().enumerate() {
            while state != 0 && self.next.get(state, c) == NIL {
                state = self.link[state as usize];
                matched = self.len[state as usize] as usize;
            }
            let to = self.next.get(state, c);
            if to == NIL {
                matched = 0;
            } else {
                state = to;
                matched += 1;
            }
            if matched > best.length {
                best = MatchResult {
                    length: matched,
                    offset_x: end + 1 - matched,
                    offset_y: self.first_end[state as usize] as usize + 1 - matched,
                };
            }
        }
        best
    }
}

/// One checkpoint of a growth curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub n: usize,
    pub aligned: usize,
    pub shifted: usize,
    /// `S_n / log_b n`; undefined at `n = 1`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurve {
    pub base: u32,
    pub records: Vec<GrowthRecord>,
}

/// `S_n / log_b n`, or `None` when `n < 2`.
pub fn log_ratio(value: usize, n: usize, base: u32) -> Option<f64> {
    (n >= 2).then(|| value as f64 * f64::from(base).ln() / (n as f64).ln())
}

/// Powers of two up to `max`, plus `max` itself if it is not one.
pub fn geometric_checkpoints(max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |v| v.checked_mul(2)).take_while(|&v| v <= max).collect();
    if out.last() != Some(&max) && max > 0 {
        out.push(max);
    }
    out
}

pub fn growth_curve(x: &DigitSeq, y: &DigitSeq, checkpoints: &[usize]) -> Result<GrowthCurve> {
    growth_curve_with(Algorithm::Fast, x, y, checkpoints)
}

pub fn growth_curve_with(algo: Algorithm, x: &DigitSeq, y: &DigitSeq, checkpoints: &[usize]) -> Result<GrowthCurve> {
    if let Some(w) = checkpoints.windows(2).find(|w| w[0] >= w[1]) {
        return param(format!("checkpoints must increase, found {} before {}", w[0], w[1]));
    }
    let records = checkpoints
        .iter()
        .map(|&n| {
            let shifted = shifted_match_with(algo, x, y, n)?.length;
            let aligned = aligned_match(x, y, n)?.length;
            Ok(GrowthRecord { n, aligned, shifted, ratio: log_ratio(shifted, n, x.base()) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthCurve { base: x.base(), records })
}

impl GrowthCurve {
    /// `n,L,S,ratio` with the ratio at 6 decimals, blank when undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,L,S,ratio\n");
        for r in &self.records {
            let ratio = r.ratio.map(|v| format!("{v:.6}")).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", r.n, r.aligned, r.shifted, ratio);
        }
        out
    }
}
