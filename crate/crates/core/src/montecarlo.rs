//! Shot-by-shot simulation of the CCD experiment.
//!
//! Each photon is prepared, coupled to its pointers, sent through the
//! interferometer and detected. Shots that click D1 carry a pointer readout
//! drawn from the post-selected pointer density by rejection sampling.
//!
//! Randomness: shot `k` draws from a ChaCha8 stream (`rand_chacha` 0.9)
//! seeded with `seed_from_u64(seed)` and positioned at stream `k`. Within a
//! shot the draw order is fixed: detector uniform, then per rejection
//! attempt a branch uniform, one standard normal per axis in axis order, and
//! an acceptance uniform. Records therefore depend only on
//! `(experiment, seed, shot_id)`, never on how shots are grouped into shards.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optics::{Circuit, Detector};
use crate::pointer::{
    postselect_pointer, Axis, AxisMoments, CoupledState, GaussianPointer, PointerMixture,
    NULL_POSTSELECTION,
};
use crate::qstate::{canonical_states, inner, CanonicalObservable, Ket, SpectralObservable};

/// An observable measured by a pointer.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub label: String,
    pub observable: SpectralObservable,
    pub pointer: GaussianPointer,
}

impl Coupling {
    pub fn canonical(obs: CanonicalObservable, pointer: GaussianPointer) -> Self {
        Coupling {
            label: obs.name().to_string(),
            observable: obs.spectral(),
            pointer,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub pre: Ket,
    pub couplings: Vec<Coupling>,
    pub circuit: Circuit,
}

impl Experiment {
    /// Canonical pre-selection and the standard interferometer.
    pub fn cheshire(couplings: Vec<Coupling>) -> Self {
        Experiment {
            pre: canonical_states().pre,
            couplings,
            circuit: Circuit::cheshire(),
        }
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.couplings.iter().map(|c| c.pointer.axis()).collect()
    }

    pub fn coupled_state(&self) -> Result<CoupledState> {
        self.couplings
            .iter()
            .try_fold(CoupledState::new(&self.pre)?, |state, c| {
                state.couple(&c.observable, c.pointer)
            })
    }

    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(self)
    }
}

/// Per-detector pointer amplitudes after the interferometer: for each
/// output basis state `m` of the detector's mode, `w_i = ⟨m|U|branch_i⟩`.
fn detector_mixtures(
    coupled: &CoupledState,
    circuit: &Circuit,
    detector: Detector,
) -> Result<Vec<PointerMixture>> {
    let u = circuit.unitary();
    let outputs: Vec<Ket> = coupled
        .branches()
        .iter()
        .map(|b| u.apply(&b.system))
        .collect();
    let pointers = coupled.pointers();
    circuit
        .mode_of(detector)
        .indices()
        .iter()
        .map(|&m| {
            PointerMixture::new(
                pointers.iter().map(|p| p.axis()).collect(),
                pointers.iter().map(|p| p.width()).collect(),
                outputs.iter().map(|o| o.amps()[m]).collect(),
                coupled
                    .branches()
                    .iter()
                    .map(|b| b.displacements.clone())
                    .collect(),
            )
        })
        .collect()
}

/// Precomputed detector probabilities and the D1 pointer mixture.
#[derive(Debug, Clone)]
pub struct Sampler {
    axes: Vec<Axis>,
    /// Click probabilities in `Detector::ALL` order.
    probabilities: [f64; 3],
    /// Pruned D1 mixture; `None` when post-selection is null.
    mixture: Option<PointerMixture>,
    weight_norms: Vec<f64>,
    weight_total: f64,
    branch_count: usize,
}

impl Sampler {
    pub fn new(experiment: &Experiment) -> Result<Self> {
        let coupled = experiment.coupled_state()?;
        let mut probabilities = [0.0; 3];
        for (p, d) in probabilities.iter_mut().zip(Detector::ALL) {
            *p = detector_mixtures(&coupled, &experiment.circuit, d)?
                .iter()
                .map(|m| m.normalization())
                .sum::<f64>()
                .max(0.0);
        }
        let d1 = detector_mixtures(&coupled, &experiment.circuit, Detector::D1)?
            .into_iter()
            .next()
            .expect("D1 mode is one-dimensional");
        let mixture = if probabilities[0] < NULL_POSTSELECTION {
            probabilities[0] = 0.0;
            None
        } else {
            Some(d1.pruned())
        };
        let total: f64 = probabilities.iter().sum();
        for p in probabilities.iter_mut() {
            *p /= total;
        }
        let weight_norms: Vec<f64> = mixture
            .as_ref()
            .map(|m| m.weights().iter().map(|w| w.norm_sqr()).collect())
            .unwrap_or_default();
        let weight_total = weight_norms.iter().sum();
        Ok(Sampler {
            axes: experiment.axes(),
            probabilities,
            mixture,
            weight_norms,
            weight_total,
            branch_count: coupled.branches().len(),
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probability(&self, detector: Detector) -> f64 {
        self.probabilities[detector as usize]
    }

    pub fn success_probability(&self) -> f64 {
        self.probabilities[0]
    }

    pub fn mixture(&self) -> Option<&PointerMixture> {
        self.mixture.as_ref()
    }

    /// Branches of the coupled state before pruning.
    pub fn branch_count(&self) -> usize {
        self.branch_count
    }

    /// Closed-form D1 pointer moments.
    pub fn expected_moments(&self) -> Result<Vec<AxisMoments>> {
        match &self.mixture {
            Some(m) => m.moments(),
            None => Err(Error::NullPostSelection { probability: 0.0 }),
        }
    }

    fn draw_detector(&self, rng: &mut ChaCha8Rng) -> Detector {
        let u: f64 = rng.random();
        if u < self.probabilities[0] {
            Detector::D1
        } else if u < self.probabilities[0] + self.probabilities[1] {
            Detector::D2
        } else {
            Detector::D3
        }
    }

    fn draw_readout(&self, m: &PointerMixture, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut point = vec![0.0; self.axes.len()];
        loop {
            let mut v = rng.random::<f64>() * self.weight_total;
            let mut branch = self.weight_norms.len() - 1;
            for (i, w) in self.weight_norms.iter().enumerate() {
                if v < *w {
                    branch = i;
                    break;
                }
                v -= w;
            }
            let centre = &m.displacements()[branch];
            for (a, x) in point.iter_mut().enumerate() {
                let z: f64 = StandardNormal.sample(rng);
                *x = centre[a] + m.widths()[a] * z;
            }
            let target = m.amplitude(&point).norm_sqr();
            let envelope = m.envelope(&point);
            debug_assert!(
                target <= envelope * (1.0 + 1e-12) + f64::MIN_POSITIVE,
                "envelope {envelope} below density {target} at {point:?}"
            );
            if rng.random::<f64>() * envelope <= target {
                return point;
            }
        }
    }

    fn shot(&self, base: &ChaCha8Rng, shot_id: u64) -> ShotRecord {
        let mut rng = base.clone();
        rng.set_stream(shot_id);
        rng.set_word_pos(0);
        let detector = self.draw_detector(&mut rng);
        let readout = match (detector, &self.mixture) {
            (Detector::D1, Some(m)) => Some(self.draw_readout(m, &mut rng)),
            _ => None,
        };
        ShotRecord {
            shot_id,
            detector,
            readout,
        }
    }

    /// Shots `range.start..range.end`, sequentially.
    pub fn sample_range(&self, range: Range<u64>, seed: u64) -> Vec<ShotRecord> {
        let base = ChaCha8Rng::seed_from_u64(seed);
        range.map(|id| self.shot(&base, id)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub shot_id: u64,
    pub detector: Detector,
    /// Pointer positions in axis order; present exactly for D1 clicks.
    pub readout: Option<Vec<f64>>,
}

/// Contiguous shot-id ranges splitting `n` shots into `shards` pieces.
pub fn shard_ranges(n: u64, shards: usize) -> Vec<Range<u64>> {
    let k = shards.max(1) as u64;
    (0..k).map(|i| (n * i / k)..(n * (i + 1) / k)).collect()
}

/// Samples `n` shots split into `shards` pieces, one per rayon task. Shard
/// `i` covers the `i`-th id range of [`shard_ranges`].
pub fn sample_shards(
    experiment: &Experiment,
    n: u64,
    seed: u64,
    shards: usize,
) -> Result<Vec<Vec<ShotRecord>>> {
    if n == 0 {
        return Err(Error::ZeroShots);
    }
    let sampler = experiment.sampler()?;
    Ok(shard_ranges(n, shards)
        .into_par_iter()
        .map(|r| sampler.sample_range(r, seed))
        .collect())
}

pub fn sample_shots(experiment: &Experiment, n: u64, seed: u64) -> Result<Vec<ShotRecord>> {
    sample_id_range(experiment, 0..n, seed)
}

/// Shots with ids in `ids`, sampled in parallel chunks.
pub fn sample_id_range(
    experiment: &Experiment,
    ids: Range<u64>,
    seed: u64,
) -> Result<Vec<ShotRecord>> {
    let n = ids.end.saturating_sub(ids.start);
    if n == 0 {
        return Err(Error::ZeroShots);
    }
    let sampler = experiment.sampler()?;
    let shards = (n / 8192).clamp(1, 256) as usize;
    let chunks: Vec<Vec<ShotRecord>> = shard_ranges(n, shards)
        .into_par_iter()
        .map(|r| sampler.sample_range((ids.start + r.start)..(ids.start + r.end), seed))
        .collect();
    Ok(chunks.concat())
}

/// Streaming mean and variance (Welford), mergeable across shards.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn std_err(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Partial sums over shot records.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    pub n_shots: u64,
    pub detector_counts: [u64; 3],
    pub axes: Vec<RunningMoments>,
}

impl Accumulator {
    pub fn new(axis_count: usize) -> Self {
        Accumulator {
            n_shots: 0,
            detector_counts: [0; 3],
            axes: vec![RunningMoments::default(); axis_count],
        }
    }

    pub fn push(&mut self, record: &ShotRecord) {
        self.n_shots += 1;
        self.detector_counts[record.detector as usize] += 1;
        if let Some(readout) = &record.readout {
            for (acc, x) in self.axes.iter_mut().zip(readout) {
                acc.push(*x);
            }
        }
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.n_shots += other.n_shots;
        for (a, b) in self.detector_counts.iter_mut().zip(other.detector_counts) {
            *a += b;
        }
        for (a, b) in self.axes.iter_mut().zip(&other.axes) {
            a.merge(b);
        }
    }

    pub fn finish(&self, experiment: &Experiment) -> Result<SummaryStats> {
        let d1_count = self.detector_counts[0];
        if d1_count < 2 {
            return Err(Error::InsufficientData {
                d1_count: d1_count as usize,
            });
        }
        let axes = experiment
            .couplings
            .iter()
            .zip(&self.axes)
            .map(|(c, m)| {
                let g = c.pointer.coupling();
                AxisEstimate {
                    axis: c.pointer.axis(),
                    label: c.label.clone(),
                    coupling: g,
                    width: c.pointer.width(),
                    mean: m.mean,
                    std_err: m.std_err(),
                    mean_over_g: (g > 0.0).then(|| m.mean / g),
                    std_err_over_g: (g > 0.0).then(|| m.std_err() / g),
                }
            })
            .collect();
        Ok(SummaryStats {
            n_shots: self.n_shots,
            d1_count,
            detector_counts: Detector::ALL
                .into_iter()
                .map(|d| (d, self.detector_counts[d as usize]))
                .collect(),
            post_rate: d1_count as f64 / self.n_shots as f64,
            axes,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisEstimate {
    pub axis: Axis,
    /// Observable coupled to this axis.
    pub label: String,
    pub coupling: f64,
    pub width: f64,
    pub mean: f64,
    pub std_err: f64,
    /// `None` for an uncoupled (`g = 0`) pointer.
    pub mean_over_g: Option<f64>,
    pub std_err_over_g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n_shots: u64,
    pub d1_count: u64,
    pub detector_counts: BTreeMap<Detector, u64>,
    pub post_rate: f64,
    pub axes: Vec<AxisEstimate>,
}

impl SummaryStats {
    pub fn axis(&self, axis: Axis) -> Option<&AxisEstimate> {
        self.axes.iter().find(|a| a.axis == axis)
    }
}

pub fn estimate(records: &[ShotRecord], experiment: &Experiment) -> Result<SummaryStats> {
    let mut acc = Accumulator::new(experiment.couplings.len());
    for r in records {
        acc.push(r);
    }
    acc.finish(experiment)
}

/// D1 pointer mixture obtained by projecting onto the state traced back
/// from the D1 mode; equal to the optics-derived mixture up to a phase.
pub fn projected_mixture(experiment: &Experiment, post: &Ket) -> Result<(PointerMixture, f64)> {
    postselect_pointer(&experiment.coupled_state()?, post)
}

/// `|⟨post|pre⟩|²`, the weak-limit post-selection rate.
pub fn undisturbed_rate(experiment: &Experiment, post: &Ket) -> f64 {
    inner(post, &experiment.pre).norm_sqr()
}
