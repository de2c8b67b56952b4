use cheshire_core::montecarlo::{sample_shards, Accumulator};
use cheshire_core::{
    estimate, sample_shots, Axis, CanonicalObservable, Coupling, Detector, Experiment,
    GaussianPointer,
};

fn experiment(couplings: &[(CanonicalObservable, Axis, f64)]) -> Experiment {
    Experiment::cheshire(
        couplings
            .iter()
            .map(|&(obs, axis, g)| {
                Coupling::canonical(obs, GaussianPointer::new(axis, 1.0, g).unwrap())
            })
            .collect(),
    )
}

fn presets() -> Vec<(&'static str, Experiment)> {
    use CanonicalObservable::{Pi1, SigmaZ2};
    vec![
        (
            "weak-cheshire",
            experiment(&[
                (Pi1, Axis::Vertical, 1e-2),
                (SigmaZ2, Axis::Horizontal, 1e-2),
            ]),
        ),
        ("which-path", experiment(&[(Pi1, Axis::Vertical, 1e-2)])),
        (
            "smile-only",
            experiment(&[(SigmaZ2, Axis::Horizontal, 1e-2)]),
        ),
        (
            "joint-strong",
            experiment(&[
                (Pi1, Axis::Vertical, 10.0),
                (SigmaZ2, Axis::Horizontal, 10.0),
            ]),
        ),
        (
            "intermediate",
            experiment(&[(Pi1, Axis::Vertical, 1.0), (SigmaZ2, Axis::Horizontal, 1.0)]),
        ),
    ]
}

#[test]
fn sample_means_track_closed_form_moments() {
    const REPS: u64 = 100;
    const N: u64 = 10_000;
    for (name, exp) in presets() {
        let expected = exp.sampler().unwrap().expected_moments().unwrap();
        let mut hits = vec![0u32; expected.len()];
        for rep in 0..REPS {
            let records = sample_shots(&exp, N, 1000 + rep).unwrap();
            let stats = estimate(&records, &exp).unwrap();
            for (k, (est, mom)) in stats.axes.iter().zip(&expected).enumerate() {
                if (est.mean - mom.mean).abs() <= 4.0 * est.std_err {
                    hits[k] += 1;
                }
            }
        }
        for (k, h) in hits.iter().enumerate() {
            assert!(
                *h >= 95,
                "{name} axis {k}: {h}/{REPS} within 4 standard errors"
            );
        }
    }
}

#[test]
fn detector_rates_match_sampler_probabilities() {
    let n = 200_000;
    for (name, exp) in presets() {
        let sampler = exp.sampler().unwrap();
        let records = sample_shots(&exp, n, 77).unwrap();
        for d in Detector::ALL {
            let p = sampler.probability(d);
            let observed = records.iter().filter(|r| r.detector == d).count() as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (observed - p).abs() <= 4.0 * sigma,
                "{name} {d}: {observed} vs {p}"
            );
        }
    }
}

#[test]
fn readout_variance_matches_closed_form() {
    let exp = experiment(&[(CanonicalObservable::SigmaZ2, Axis::Horizontal, 1.0)]);
    let expected = exp.sampler().unwrap().expected_moments().unwrap()[0];
    let records = sample_shots(&exp, 400_000, 5).unwrap();
    let mut acc = Accumulator::new(1);
    records.iter().for_each(|r| acc.push(r));
    let m = acc.axes[0];
    // Relative standard error of a sample variance is about sqrt(2/n).
    let rel = (m.variance() - expected.variance).abs() / expected.variance;
    assert!(
        rel < 4.0 * (2.0 / m.count as f64).sqrt(),
        "{} vs {}",
        m.variance(),
        expected.variance
    );
}

#[test]
fn strong_which_path_mean_matches_closed_form() {
    let g = 10.0;
    let exp = experiment(&[(CanonicalObservable::Pi1, Axis::Vertical, g)]);
    let expected = exp.sampler().unwrap().expected_moments().unwrap()[0].mean;
    let stats = estimate(&sample_shots(&exp, 100_000, 21).unwrap(), &exp).unwrap();
    let a = &stats.axes[0];
    assert!((a.mean - expected).abs() <= 4.0 * a.std_err);
    let ratio = a.mean_over_g.unwrap();
    assert!((ratio - expected / g).abs() <= 4.0 * a.std_err_over_g.unwrap());
}

#[test]
fn shard_accumulators_merge_to_whole() {
    let (_, exp) = presets().remove(0);
    let shards = sample_shards(&exp, 20_000, 3, 8).unwrap();
    let mut merged = Accumulator::new(2);
    for shard in &shards {
        let mut acc = Accumulator::new(2);
        shard.iter().for_each(|r| acc.push(r));
        merged.merge(&acc);
    }
    let all: Vec<_> = shards.concat();
    let whole = estimate(&all, &exp).unwrap();
    let from_merge = merged.finish(&exp).unwrap();
    assert_eq!(whole.n_shots, from_merge.n_shots);
    assert_eq!(whole.detector_counts, from_merge.detector_counts);
    for (a, b) in whole.axes.iter().zip(&from_merge.axes) {
        assert!((a.mean - b.mean).abs() < 1e-12);
        assert!((a.std_err - b.std_err).abs() < 1e-12);
    }
}
