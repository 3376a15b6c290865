//! Influence zone of a design beam.
//!
//! For a window of half-width `k` around design beam `d`, all loads (permanent
//! and variable) of members outside `[d − k, d + k]` are dropped. Forces at the
//! stations of `d` are summed over the remaining members for every critical
//! arrangement and the ULS check is applied once per (station, arrangement):
//!
//! ```text
//! u_cap(k) = max over s, j of D(Σ_{i∈window} w_ij·M_unit[s][i], Σ_{i∈window} w_ij·V_unit[s][i])
//! ```
//!
//! The zone size `k_max` is the smallest `k` from which every larger window
//! stays within `ε` of the full-system utilisation. The ratio can overshoot
//! and oscillate, so stopping at the first window within `ε` undercounts.

use serde::{Deserialize, Serialize};

use crate::arrangements::ArrangementSet;
use crate::design::{factored_components, governing, resistances, GAMMA_M0};
use crate::error::{Error, Result};
use crate::model::{BeamSystem, LoadCombination, Material};
use crate::solver::ResponseTable;

/// Error thresholds reported by default: 0.1, 0.5, 1, 5, 10, 20 and 50 %.
pub const DEFAULT_EPS: [f64; 7] = [0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.50];

/// Captured utilisation of one design beam as the window grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapturedCurve {
    pub design_beam: usize,
    /// u_cap for k = 0..=m.
    pub utilisations: Vec<f64>,
    /// u_cap / u_true for k = 0..=m.
    pub ratios: Vec<f64>,
    pub u_true: f64,
}

impl CapturedCurve {
    /// Builds a curve from ratios alone (u_true = 1).
    pub fn from_ratios(design_beam: usize, ratios: Vec<f64>) -> Self {
        Self {
            design_beam,
            utilisations: ratios.clone(),
            ratios,
            u_true: 1.0,
        }
    }

    /// Largest window half-width, equal to the member count.
    pub fn max_k(&self) -> usize {
        self.ratios.len().saturating_sub(1)
    }
}

/// Captured-utilisation curve of design beam `d` for k = 0..=m.
pub fn captured_curve(
    system: &BeamSystem,
    d: usize,
    table: &ResponseTable,
    arrangements: &ArrangementSet,
    combo: &LoadCombination,
    material: &Material,
) -> Result<CapturedCurve> {
    let m = system.member_count();
    if d >= m {
        return Err(Error::IndexOutOfRange { index: d, len: m });
    }
    if table.design_beam != d {
        return Err(Error::Invalid(format!(
            "response table is for beam {}, not {d}",
            table.design_beam
        )));
    }
    let (permanent, variable) = factored_components(system, combo);
    let r = resistances(system.section(d)?, material, GAMMA_M0);
    // Windows at least this wide already cover the whole system.
    let full_from = d.max(m - 1 - d);
    let mut utilisations = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k > full_from {
            let last = utilisations[full_from];
            utilisations.push(last);
            continue;
        }
        let window = d.saturating_sub(k)..(d + k + 1).min(m);
        utilisations.push(governing(table, &permanent, &variable, arrangements, window, &r).utilisation);
    }
    let u_true = utilisations[m];
    if u_true.is_nan() || u_true <= 0.0 {
        return Err(Error::Degenerate { member: d });
    }
    let ratios = utilisations.iter().map(|u| u / u_true).collect();
    Ok(CapturedCurve {
        design_beam: d,
        utilisations,
        ratios,
        u_true,
    })
}

fn within(ratio: f64, eps: f64) -> bool {
    (1.0 - ratio).abs() <= eps
}

/// Smallest `k` such that `|1 − ratio(k′)| ≤ eps` for every `k′ ≥ k`.
pub fn extract_k_max(curve: &CapturedCurve, eps: f64) -> usize {
    let mut k_max = curve.max_k();
    for k in (0..=curve.max_k()).rev() {
        if within(curve.ratios[k], eps) {
            k_max = k;
        } else {
            break;
        }
    }
    k_max
}

/// First `k` with `|1 − ratio(k)| ≤ eps`, ignoring what happens beyond it.
pub fn first_crossing_k(curve: &CapturedCurve, eps: f64) -> usize {
    (0..=curve.max_k())
        .find(|&k| within(curve.ratios[k], eps))
        .unwrap_or(curve.max_k())
}

/// Zone sizes of one design beam over an error grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneResult {
    pub system_id: usize,
    pub beam_index: usize,
    pub u_true: f64,
    pub eps: Vec<f64>,
    pub k_max: Vec<usize>,
    pub ratios: Vec<f64>,
}

impl ZoneResult {
    pub fn from_curve(system_id: usize, curve: &CapturedCurve, eps: &[f64]) -> Self {
        Self {
            system_id,
            beam_index: curve.design_beam,
            u_true: curve.u_true,
            eps: eps.to_vec(),
            k_max: eps.iter().map(|&e| extract_k_max(curve, e)).collect(),
            ratios: curve.ratios.clone(),
        }
    }

    pub fn k_max_at(&self, eps: f64) -> Option<usize> {
        self.eps
            .iter()
            .position(|&e| e == eps)
            .map(|i| self.k_max[i])
    }
}

/// Aggregate of k_max at one error threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneStatRow {
    pub eps: f64,
    pub count: usize,
    pub mean: f64,
    pub max: usize,
    /// `histogram[k]` = number of beams with k_max = k.
    pub histogram: Vec<usize>,
}

impl ZoneStatRow {
    /// Most frequent k_max; ties resolve to the smaller value.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.histogram.iter().enumerate() {
            if c > self.histogram[best] {
                best = k;
            }
        }
        best
    }

    /// Fraction of beams with k_max ≤ `k`.
    pub fn fraction_at_most(&self, k: usize) -> f64 {
        let n: usize = self.histogram.iter().take(k + 1).sum();
        n as f64 / self.count as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneSummary {
    pub rows: Vec<ZoneStatRow>,
    /// Smallest u_cap/u_true over all beams, per window half-width k.
    pub min_ratio_by_k: Vec<f64>,
}

impl ZoneSummary {
    pub fn row(&self, eps: f64) -> Option<&ZoneStatRow> {
        self.rows.iter().find(|r| r.eps == eps)
    }
}

/// Mean, maximum and histogram of k_max per error threshold.
pub fn zone_statistics(results: &[ZoneResult], eps_grid: &[f64]) -> Result<ZoneSummary> {
    if results.is_empty() {
        return Err(Error::Invalid("no zone results to summarise".into()));
    }
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let values: Vec<usize> = results
            .iter()
            .map(|r| {
                r.k_max_at(eps).ok_or_else(|| {
                    Error::Invalid(format!("result for beam {} lacks eps {eps}", r.beam_index))
                })
            })
            .collect::<Result<_>>()?;
        let max = values.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0usize; max + 1];
        for &k in &values {
            histogram[k] += 1;
        }
        rows.push(ZoneStatRow {
            eps,
            count: values.len(),
            mean: values.iter().sum::<usize>() as f64 / values.len() as f64,
            max,
            histogram,
        });
    }
    let longest = results.iter().map(|r| r.ratios.len()).max().unwrap_or(0);
    let min_ratio_by_k = (0..longest)
        .map(|k| {
            results
                .iter()
                .filter_map(|r| r.ratios.get(k).copied())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(ZoneSummary {
        rows,
        min_ratio_by_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(ratios: &[f64]) -> CapturedCurve {
        CapturedCurve::from_ratios(0, ratios.to_vec())
    }

    #[test]
    fn oscillating_curve_needs_the_suffix_rule() {
        // k = 0 entry, then the ratios reported for k = 1, 2, 3
        let mut r = vec![0.6, 1.89, 0.942, 0.998];
        r.extend([1.0; 5]);
        let c = curve(&r);
        assert_eq!(extract_k_max(&c, 0.005), 3);
        assert_eq!(first_crossing_k(&c, 0.005), 3);
        assert_eq!(extract_k_max(&c, 0.06), 2);
        assert_eq!(extract_k_max(&c, 1.0), 0);
    }

    #[test]
    fn immediate_satisfaction_gives_zero() {
        assert_eq!(extract_k_max(&curve(&[0.999, 1.001, 1.0]), 0.005), 0);
    }

    #[test]
    fn suffix_rule_direct_evaluation() {
        assert_eq!(extract_k_max(&curve(&[0.5, 0.99, 1.0, 1.0]), 0.02), 1);
    }

    #[test]
    fn first_crossing_can_undercount() {
        let c = curve(&[0.3, 0.999, 0.9, 1.0, 1.0]);
        assert_eq!(first_crossing_k(&c, 0.01), 1);
        assert_eq!(extract_k_max(&c, 0.01), 3);
    }

    #[test]
    fn singleton_statistics() {
        let r = ZoneResult {
            system_id: 0,
            beam_index: 0,
            u_true: 0.9,
            eps: vec![0.005],
            k_max: vec![2],
            ratios: vec![0.5, 0.9, 1.0],
        };
        let s = zone_statistics(&[r], &[0.005]).unwrap();
        let row = s.row(0.005).unwrap();
        assert_eq!(row.mean, 2.0);
        assert_eq!(row.max, 2);
        assert_eq!(row.histogram, vec![0, 0, 1]);
        assert_eq!(row.mode(), 2);
        assert_eq!(s.min_ratio_by_k, vec![0.5, 0.9, 1.0]);
        assert!(zone_statistics(&[], &[0.005]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ratios() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(0.0..2.0f64, 0..12).prop_map(|mut v| {
                v.push(1.0);
                v
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn suffix_rule_holds(r in ratios(), eps in 0.0..0.6f64) {
                let c = curve(&r);
                let k = extract_k_max(&c, eps);
                prop_assert!((k..r.len()).all(|j| within(r[j], eps)));
                if k > 0 {
                    prop_assert!(!within(r[k - 1], eps));
                }
            }

            #[test]
            fn first_crossing_never_exceeds_suffix_rule(r in ratios(), eps in 0.0..0.6f64) {
                let c = curve(&r);
                prop_assert!(first_crossing_k(&c, eps) <= extract_k_max(&c, eps));
            }

            #[test]
            fn k_max_is_monotone_in_eps(r in ratios(), a in 0.0..0.6f64, b in 0.0..0.6f64) {
                let c = curve(&r);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assert!(extract_k_max(&c, lo) >= extract_k_max(&c, hi));
            }
        }
    }
}
