//! Cylinder-count dimension estimates.
//!
//! For a shift-defined set the number of generation-`m` b-adic cylinders that
//! meet it is an exact combinatorial count, so `log_b(count) / m` is computed
//! without sampling.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use crate::digits::SetDescriptor;
use crate::error::{param, Result};
use crate::sft;

/// Free positions of `E_p` among `1..=m`: those `k p^2 + j` with
/// `p + 2 <= j <= p^2`.
pub fn ep_free_positions(p: u32, m: usize) -> usize {
    let period = (p as usize).pow(2);
    let forced = p as usize + 1;
    (m / period) * (period - forced) + (m % period).saturating_sub(forced)
}

pub fn cylinder_count(desc: &SetDescriptor, m: usize) -> Result<BigUint> {
    desc.validate()?;
    if m == 0 {
        return param("generation m must be at least 1");
    }
    count(desc, m)
}

fn count(desc: &SetDescriptor, m: usize) -> Result<BigUint> {
    if m == 0 {
        return Ok(BigUint::one());
    }
    match desc {
        SetDescriptor::Uniform { base } => Ok(BigUint::from(*base).pow(m as u32)),
        SetDescriptor::Ep { base, p } => Ok(BigUint::from(*base).pow(ep_free_positions(*p, m) as u32)),
        SetDescriptor::Fp { base, p } => sft::admissible_count(*base, *p, m),
        SetDescriptor::FImage { schedule, inner } => {
            if (m as u64) > schedule.horizon() {
                return param(format!("generation {m} lies past the schedule horizon {}", schedule.horizon()));
            }
            // Inserted positions are forced to 1 and contribute a factor of one.
            count(inner, schedule.originals_needed(m))
        }
    }
}

/// Natural log of a big integer, exact to f64 precision at any size.
pub fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return (v.to_u64().expect("fits").max(1) as f64).ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub m: usize,
    pub cylinder_count: BigUint,
    /// `log_b(count) / m`
    pub estimate: f64,
    pub reference: Option<f64>,
    /// For `E_p`: the estimate at the multiple of `p^2` nearest to `m`, where
    /// the oscillation of the raw value vanishes.
    pub aligned_estimate: Option<f64>,
}

pub fn dim_estimate(desc: &SetDescriptor, m: usize) -> Result<DimensionEstimate> {
    let cylinder_count = cylinder_count(desc, m)?;
    let estimate = match desc {
        // count = b^free, so the estimate is the exact ratio free / m.
        SetDescriptor::Ep { p, .. } => ep_free_positions(*p, m) as f64 / m as f64,
        _ => ln_big(&cylinder_count) / (f64::from(desc.base()).ln() * m as f64),
    };
    let aligned_estimate = match desc {
        SetDescriptor::Ep { p, .. } => {
            let period = (*p as usize).pow(2);
            let aligned = ((m + period / 2) / period).max(1) * period;
            Some(ep_free_positions(*p, aligned) as f64 / aligned as f64)
        }
        _ => None,
    };
    Ok(DimensionEstimate { m, cylinder_count, estimate, reference: reference(desc)?, aligned_estimate })
}

/// Exact dimension of the set, where known. Density-zero insertions leave the
/// dimension of the inner set unchanged.
pub fn reference(desc: &SetDescriptor) -> Result<Option<f64>> {
    Ok(match desc {
        SetDescriptor::Uniform { .. } => Some(1.0),
        SetDescriptor::Ep { p, .. } => Some(sft::ratio_to_f64(sft::dim_ep(*p)?)),
        SetDescriptor::Fp { base, p } => Some(sft::dim_fp(*base, *p, sft::DEFAULT_TOL)?.estimate),
        SetDescriptor::FImage { inner, .. } => reference(inner)?,
    })
}

/// `m,count,estimate,reference` with 6-decimal floats.
pub fn to_csv(rows: &[DimensionEstimate]) -> String {
    let mut out = String::from("m,count,estimate,reference\n");
    for r in rows {
        let reference = r.reference.map(|v| format!("{v:.6}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{:.6},{}", r.m, r.cylinder_count, r.estimate, reference);
    }
    out
}
