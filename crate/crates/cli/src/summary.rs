//! `summary.json` schema and the analytic expectations that go into it.
//!
//! Everything under `expected` is computed from the state algebra and the
//! closed-form pointer moments, never from the sampled shots.

use std::collections::BTreeMap;
use std::ops::Range;

use cheshire_core::montecarlo::SummaryStats;
use cheshire_core::{
    abl_distribution, canonical_states, sequential_distribution, weak_value, Axis,
    CanonicalObservable, Detector, Result, Sampler, ShotRecord, SpectralObservable,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::preset::{observable_for, Point};

pub const RNG_DESCRIPTION: &str =
    "ChaCha8 (rand_chacha 0.9), seed_from_u64(seed), stream = shot_id";

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub expected: Expected,
    pub estimated: Estimated,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub outcome: Vec<f64>,
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Expected {
    /// Weak values of the canonical observables between the canonical states.
    pub weak_values: BTreeMap<String, ComplexValue>,
    /// Conditional outcome tables for strong measurements; keys list the
    /// observables in measurement order.
    pub abl: BTreeMap<String, Vec<OutcomeRow>>,
    pub points: Vec<PointExpected>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointExpected {
    pub g_over_s: BTreeMap<String, f64>,
    pub success_probability: f64,
    pub detector_probabilities: BTreeMap<String, f64>,
    pub axes: Vec<AxisExpected>,
    /// Horizontal lobe masses in the strong regime, from the conditional
    /// distribution of the coupled observables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizontal_lobes: Option<Vec<Lobe>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxisExpected {
    pub axis: String,
    pub observable: String,
    pub g: f64,
    pub mean: f64,
    pub variance: f64,
    pub mean_over_g: Option<f64>,
    pub weak_value: f64,
    /// `|mean/g − weak value|`
    pub weak_limit_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lobe {
    pub eigenvalue: f64,
    pub center: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimated {
    pub points: Vec<PointEstimated>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointEstimated {
    pub n_shots: u64,
    pub d1_count: u64,
    pub post_rate: f64,
    pub post_rate_std_err: f64,
    pub detector_counts: BTreeMap<String, u64>,
    pub axes: Vec<AxisEstimated>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizontal_lobes: Option<Vec<LobeFraction>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxisEstimated {
    pub axis: String,
    pub mean: f64,
    pub std_err: f64,
    pub mean_over_g: Option<f64>,
    pub std_err_over_g: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LobeFraction {
    pub eigenvalue: f64,
    pub center: f64,
    pub count: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub g_over_s: BTreeMap<String, f64>,
    pub rng: String,
    pub points: Vec<PointDiagnostics>,
    /// Ratio of consecutive weak-limit errors (sweep only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_ratio_per_decade: Option<BTreeMap<String, Vec<Option<f64>>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointDiagnostics {
    pub g_over_s: BTreeMap<String, f64>,
    pub branch_count: usize,
    pub live_branch_count: usize,
    /// Half-open range of shot ids in shots.csv.
    pub shot_ids: [u64; 2],
}

fn complex(c: num_complex::Complex64) -> ComplexValue {
    ComplexValue { re: c.re, im: c.im }
}

fn rows(d: &cheshire_core::ConditionalDistribution) -> Vec<OutcomeRow> {
    d.outcomes
        .iter()
        .map(|o| OutcomeRow {
            outcome: o.eigenvalues.clone(),
            probability: o.probability,
        })
        .collect()
}

pub fn weak_values() -> Result<BTreeMap<String, ComplexValue>> {
    let s = canonical_states();
    CanonicalObservable::ALL
        .iter()
        .map(|o| {
            Ok((
                o.name().to_string(),
                complex(weak_value(&o.operator(), &s.pre, &s.post)?),
            ))
        })
        .collect()
}

pub fn abl_tables() -> Result<BTreeMap<String, Vec<OutcomeRow>>> {
    use CanonicalObservable::{Pi1, Pi2, SigmaZ2};
    let s = canonical_states();
    let mut tables = BTreeMap::new();
    for o in CanonicalObservable::ALL {
        tables.insert(
            o.name().to_string(),
            rows(&abl_distribution(&o.spectral(), &s.pre, &s.post)?),
        );
    }
    for seq in [vec![Pi1, Pi2], vec![SigmaZ2, Pi1, Pi2], vec![Pi1, SigmaZ2]] {
        let key = seq.iter().map(|o| o.name()).collect::<Vec<_>>().join(",");
        let obs: Vec<SpectralObservable> = seq.iter().map(|o| o.spectral()).collect();
        tables.insert(key, rows(&sequential_distribution(&obs, &s.pre, &s.post)?));
    }
    Ok(tables)
}

pub fn ratios(point: &Point) -> BTreeMap<String, f64> {
    [Axis::Vertical, Axis::Horizontal]
        .into_iter()
        .filter_map(|a| {
            point
                .coupling(a)
                .map(|g| (a.name().to_string(), g / point.s))
        })
        .collect()
}

pub fn point_expected(point: &Point, sampler: &Sampler) -> Result<PointExpected> {
    let s = canonical_states();
    let moments = sampler.expected_moments()?;
    let mut axes = Vec::new();
    for (c, m) in point.experiment.couplings.iter().zip(&moments) {
        let g = c.pointer.coupling();
        let obs = observable_for(m.axis);
        let wv = weak_value(&obs.operator(), &s.pre, &s.post)?.re;
        let mean_over_g = (g > 0.0).then(|| m.mean / g);
        axes.push(AxisExpected {
            axis: m.axis.name().to_string(),
            observable: c.label.clone(),
            g,
            mean: m.mean,
            variance: m.variance,
            mean_over_g,
            weak_value: wv,
            weak_limit_error: mean_over_g.map(|r| (r - wv).abs()),
        });
    }

    let horizontal_lobes = match point.g_horizontal {
        Some(h) if h > 0.0 => {
            let obs: Vec<SpectralObservable> = point
                .experiment
                .couplings
                .iter()
                .map(|c| c.observable.clone())
                .collect();
            let index = point
                .experiment
                .axes()
                .iter()
                .position(|&a| a == Axis::Horizontal)
                .expect("horizontal pointer present");
            let joint = sequential_distribution(&obs, &s.pre, &s.post)?;
            let lobes = observable_for(Axis::Horizontal)
                .spectral()
                .eigenvalues()
                .map(|a| Lobe {
                    eigenvalue: a,
                    center: a * h,
                    mass: joint
                        .outcomes
                        .iter()
                        .filter(|o| o.eigenvalues[index] == a)
                        .map(|o| o.probability)
                        .sum(),
                })
                .collect();
            Some(lobes)
        }
        _ => None,
    };

    Ok(PointExpected {
        g_over_s: ratios(point),
        success_probability: sampler.success_probability(),
        detector_probabilities: Detector::ALL
            .iter()
            .map(|&d| (d.name().to_string(), sampler.probability(d)))
            .collect(),
        axes,
        horizontal_lobes,
    })
}

/// Fraction of D1 readouts closest to each horizontal lobe centre.
pub fn lobe_fractions(point: &Point, records: &[ShotRecord]) -> Option<Vec<LobeFraction>> {
    let h = point.g_horizontal.filter(|h| *h > 0.0)?;
    let index = point
        .experiment
        .axes()
        .iter()
        .position(|&a| a == Axis::Horizontal)?;
    let eigenvalues: Vec<f64> = observable_for(Axis::Horizontal)
        .spectral()
        .eigenvalues()
        .collect();
    let mut counts = vec![0u64; eigenvalues.len()];
    let mut total = 0u64;
    for r in records {
        if let Some(readout) = &r.readout {
            let y = readout[index];
            let nearest = eigenvalues
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| (y - *a * h).abs().total_cmp(&(y - *b * h).abs()))
                .map(|(k, _)| k)
                .expect("non-empty spectrum");
            counts[nearest] += 1;
            total += 1;
        }
    }
    Some(
        eigenvalues
            .iter()
            .zip(counts)
            .map(|(&a, count)| LobeFraction {
                eigenvalue: a,
                center: a * h,
                count,
                fraction: if total > 0 {
                    count as f64 / total as f64
                } else {
                    0.0
                },
            })
            .collect(),
    )
}

pub fn point_estimated(stats: &SummaryStats, lobes: Option<Vec<LobeFraction>>) -> PointEstimated {
    let p = stats.post_rate;
    PointEstimated {
        n_shots: stats.n_shots,
        d1_count: stats.d1_count,
        post_rate: p,
        post_rate_std_err: (p * (1.0 - p) / stats.n_shots as f64).sqrt(),
        detector_counts: stats
            .detector_counts
            .iter()
            .map(|(d, n)| (d.name().to_string(), *n))
            .collect(),
        axes: stats
            .axes
            .iter()
            .map(|a| AxisEstimated {
                axis: a.axis.name().to_string(),
                mean: a.mean,
                std_err: a.std_err,
                mean_over_g: a.mean_over_g,
                std_err_over_g: a.std_err_over_g,
            })
            .collect(),
        horizontal_lobes: lobes,
    }
}

pub fn point_diagnostics(point: &Point, sampler: &Sampler, ids: &Range<u64>) -> PointDiagnostics {
    PointDiagnostics {
        g_over_s: ratios(point),
        branch_count: sampler.branch_count(),
        live_branch_count: sampler.mixture().map_or(0, |m| m.len()),
        shot_ids: [ids.start, ids.end],
    }
}

/// Consecutive weak-limit error ratios per axis across sweep points.
pub fn error_ratios(points: &[PointExpected]) -> BTreeMap<String, Vec<Option<f64>>> {
    let mut out = BTreeMap::new();
    for axis in [Axis::Vertical, Axis::Horizontal] {
        let errors: Vec<Option<f64>> = points
            .iter()
            .map(|p| {
                p.axes
                    .iter()
                    .find(|a| a.axis == axis.name())
                    .and_then(|a| a.weak_limit_error)
            })
            .collect();
        let ratios = errors
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (Some(a), Some(b)) if b > 0.0 => Some(a / b),
                _ => None,
            })
            .collect();
        out.insert(axis.name().to_string(), ratios);
    }
    out
}
