//! Pinned reference values for the trend checks.
//!
//! `reference.json` is produced by [`compute_reference`] at `M = 2^16`
//! (`mps-orf reference`); `half_z_radial_oracle.json` comes from
//! `tools/oracle_half_z_radial.py` in 60-digit arithmetic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagnostics::kinds;
use crate::error::{Error, Result};
use crate::scenario::builtin;

const REFERENCE: &str = include_str!("../fixtures/reference.json");
const ORACLE: &str = include_str!("../fixtures/half_z_radial_oracle.json");

/// Grid size of the reference runs.
pub const REFERENCE_M: usize = 1 << 16;

/// Threshold and the first order from which a series stays on the right side of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pin {
    pub threshold: f64,
    pub n_star: usize,
}

/// Series of the reference run kept for comparison.
pub const REFERENCE_SERIES: [&str; 6] = [
    kinds::REMAINDER_ENERGY,
    kinds::SZEGO_QUANTITY,
    kinds::SZEGO_L2_GAP,
    kinds::DUAL_SZEGO_L2_GAP,
    kinds::SUP_ERROR,
    kinds::BOUNDARY_UNIFORM_GAP,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceFixture {
    #[serde(rename = "M")]
    pub m: usize,
    pub n_max: usize,
    /// `remainder_energy < threshold` on half-z-radial.
    pub energy: Pin,
    /// `szego_quantity >= threshold` on half-z-radial.
    pub szego_quantity: Pin,
    pub l2_gap: Pin,
    pub dual_l2_gap: Pin,
    pub sup_error: Pin,
    pub boundary_gap: Pin,
    /// Smallest remainder energy of inner-stress over `n <= n_max`.
    pub inner_stress_min_energy: f64,
    /// Floor asserted for inner-stress.
    pub inner_stress_floor: f64,
    /// half-z-radial series at the reference resolution.
    pub series: BTreeMap<String, Vec<(usize, f64)>>,
}

/// 60-digit values for half-z-radial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFixture {
    pub digits: u32,
    pub gammas: Vec<[f64; 2]>,
    pub szego_quantity: Vec<f64>,
}

pub fn pinned() -> ReferenceFixture {
    serde_json::from_str(REFERENCE).expect("bundled reference fixture parses")
}

pub fn oracle() -> OracleFixture {
    serde_json::from_str(ORACLE).expect("bundled oracle fixture parses")
}

/// Pretty JSON of a fixture, as bundled.
pub fn reference_json(r: &ReferenceFixture) -> Result<String> {
    serde_json::to_string_pretty(r).map_err(|e| Error::Io(e.to_string()))
}

/// First `n` such that `pred` holds for every later entry; `None` if the
/// last entry fails.
pub fn n_star(values: &[(usize, f64)], pred: impl Fn(f64) -> bool) -> Option<usize> {
    let mut star = None;
    for (n, v) in values.iter().rev() {
        if pred(*v) {
            star = Some(*n);
        } else {
            break;
        }
    }
    star
}

/// Runs half-z-radial and inner-stress at grid size `m` and derives the pins.
pub fn compute_reference(m: usize) -> Result<ReferenceFixture> {
    let mut hz = builtin("half-z-radial").expect("built-in");
    hz.m = m;
    let r = hz.run()?;
    let mut inner = builtin("inner-stress").expect("built-in");
    inner.m = m;
    let ri = inner.run()?;
    let get = |k: &str| -> Result<&[(usize, f64)]> {
        r.series(k)
            .ok_or_else(|| Error::Validation(format!("reference run lacks {k}")))
    };
    let pin = |k: &str, threshold: f64, below: bool| -> Result<Pin> {
        let s = get(k)?;
        let n = if below {
            n_star(s, |v| v < threshold)
        } else {
            n_star(s, |v| v >= threshold)
        };
        let n_star = n.ok_or_else(|| Error::Validation(format!("{k} never settles past {threshold}")))?;
        Ok(Pin { threshold, n_star })
    };
    let series = REFERENCE_SERIES
        .iter()
        .map(|k| Ok((k.to_string(), get(k)?.to_vec())))
        .collect::<Result<_>>()?;
    let inner_min = ri
        .series(kinds::REMAINDER_ENERGY)
        .ok_or_else(|| Error::Validation("inner-stress lacks remainder_energy".into()))?
        .iter()
        .fold(f64::INFINITY, |a, (_, v)| a.min(*v));
    Ok(ReferenceFixture {
        m,
        n_max: hz.n_max,
        energy: pin(kinds::REMAINDER_ENERGY, 1e-2, true)?,
        szego_quantity: pin(kinds::SZEGO_QUANTITY, 0.99, false)?,
        l2_gap: pin(kinds::SZEGO_L2_GAP, 0.05, true)?,
        dual_l2_gap: pin(kinds::DUAL_SZEGO_L2_GAP, 0.05, true)?,
        sup_error: pin(kinds::SUP_ERROR, 0.05, true)?,
        boundary_gap: pin(kinds::BOUNDARY_UNIFORM_GAP, 0.05, true)?,
        inner_stress_min_energy: inner_min,
        inner_stress_floor: 0.1,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_star_scans_from_the_end() {
        let v = [(0, 1.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 0.0)];
        assert_eq!(n_star(&v, |x| x < 0.5), Some(3));
        assert_eq!(n_star(&v[..3], |x| x < 0.5), None);
        assert_eq!(n_star(&v[1..2], |x| x < 0.5), Some(1));
    }

    #[test]
    fn bundled_fixtures_parse() {
        let p = pinned();
        assert_eq!(p.m, REFERENCE_M);
        assert!(p.energy.n_star <= 40);
        let o = oracle();
        assert!(o.digits >= 50);
        assert_eq!(o.gammas.len(), 42);
    }
}
