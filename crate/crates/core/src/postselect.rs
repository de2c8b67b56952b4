//! Statistics of pre- and post-selected ensembles: weak values, the
//! conditional outcome distribution of intermediate projective
//! measurements (the ABL rule) and state collapse.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{inner, Ket, Operator, SpectralObservable};
use crate::TOL;

/// `⟨post|A|pre⟩ / ⟨post|pre⟩`
pub fn weak_value(op: &Operator, pre: &Ket, post: &Ket) -> Result<Complex64> {
    let overlap = inner(post, pre);
    if overlap.norm() < TOL {
        return Err(Error::OrthogonalSelection {
            overlap: overlap.norm(),
        });
    }
    Ok(inner(post, &op.apply(pre)) / overlap)
}

/// One joint outcome of a measurement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub eigenvalues: Vec<f64>,
    pub probability: f64,
}

/// Outcome probabilities conditioned on successful post-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    pub outcomes: Vec<Outcome>,
    /// Unconditioned probability that post-selection succeeds with the
    /// measurements in place.
    pub success_probability: f64,
}

impl ConditionalDistribution {
    pub fn probability(&self, eigenvalues: &[f64]) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|o| {
                o.eigenvalues.len() == eigenvalues.len()
                    && o.eigenvalues
                        .iter()
                        .zip(eigenvalues)
                        .all(|(a, b)| (a - b).abs() <= TOL)
            })
            .map(|o| o.probability)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Outcomes with probability above `threshold`.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = &Outcome> {
        self.outcomes
            .iter()
            .filter(move |o| o.probability > threshold)
    }
}

/// ABL rule for a single intermediate measurement.
pub fn abl_distribution(
    obs: &SpectralObservable,
    pre: &Ket,
    post: &Ket,
) -> Result<ConditionalDistribution> {
    sequential_distribution(std::slice::from_ref(obs), pre, post)
}

/// Joint distribution of a sequence of projective measurements performed
/// between pre- and post-selection, first observable measured first.
pub fn sequential_distribution(
    observables: &[SpectralObservable],
    pre: &Ket,
    post: &Ket,
) -> Result<ConditionalDistribution> {
    if observables.is_empty() {
        return Err(Error::EmptyObservableList);
    }
    for s in [pre, post] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized {
                norm_sqr: s.norm_sqr(),
            });
        }
    }

    let mut histories: Vec<(Vec<f64>, Ket)> = vec![(Vec::new(), *pre)];
    for obs in observables {
        histories = histories
            .into_iter()
            .flat_map(|(values, state)| {
                obs.branches().iter().map(move |(a, p)| {
                    let mut values = values.clone();
                    values.push(*a);
                    (values, p.apply(&state))
                })
            })
            .collect();
    }

    let numerators: Vec<(Vec<f64>, f64)> = histories
        .into_iter()
        .map(|(values, state)| (values, inner(post, &state).norm_sqr()))
        .collect();
    let success_probability: f64 = numerators.iter().map(|(_, n)| n).sum();
    if success_probability < TOL * TOL {
        return Err(Error::NoValidHistory);
    }
    let outcomes = numerators
        .into_iter()
        .map(|(eigenvalues, n)| Outcome {
            eigenvalues,
            probability: n / success_probability,
        })
        .collect();
    Ok(ConditionalDistribution {
        outcomes,
        success_probability,
    })
}

/// Normalized projection of `state` onto the eigenspace of `outcome`.
pub fn collapse(obs: &SpectralObservable, outcome: f64, state: &Ket) -> Result<Ket> {
    let projected = obs.projector(outcome)?.apply(state);
    let norm = projected.norm();
    if norm < TOL {
        return Err(Error::ImpossibleOutcome {
            eigenvalue: outcome,
            norm,
        });
    }
    projected.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{canonical_states, Arm, BasisLabel, CanonicalObservable as Obs, Pol};

    fn cheshire_pair() -> (Ket, Ket) {
        let s = canonical_states();
        (s.pre, s.post)
    }

    #[test]
    fn cheshire_weak_values() {
        let (pre, post) = cheshire_pair();
        let expected = [
            (Obs::Pi1, 1.0),
            (Obs::Pi2, 0.0),
            (Obs::SigmaZ1, 0.0),
            (Obs::SigmaZ2, 1.0),
            (Obs::SigmaZ, 1.0),
        ];
        for (obs, value) in expected {
            let w = weak_value(&obs.operator(), &pre, &post).unwrap();
            assert!((w - Complex64::new(value, 0.0)).norm() < TOL, "{obs}: {w}");
        }
    }

    #[test]
    fn identity_weak_value_is_one() {
        let (pre, post) = cheshire_pair();
        let w = weak_value(&Operator::identity(), &pre, &post).unwrap();
        assert!((w - 1.0).norm() < TOL);
    }

    #[test]
    fn orthogonal_selection_is_an_error() {
        let a = Ket::basis(BasisLabel::new(Arm::One, Pol::Plus));
        let b = Ket::basis(BasisLabel::new(Arm::Two, Pol::Plus));
        assert!(matches!(
            weak_value(&Operator::identity(), &a, &b),
            Err(Error::OrthogonalSelection { .. })
        ));
    }

    #[test]
    fn photon_certainly_in_arm_one() {
        let (pre, post) = cheshire_pair();
        let d = abl_distribution(&Obs::Pi1.spectral(), &pre, &post).unwrap();
        assert!((d.probability(&[1.0]).unwrap() - 1.0).abs() < TOL);
        assert!(d.probability(&[0.0]).unwrap().abs() < TOL);
    }

    #[test]
    fn angular_momentum_found_in_arm_two() {
        let (pre, post) = cheshire_pair();
        let d = abl_distribution(&Obs::SigmaZ2.spectral(), &pre, &post).unwrap();
        assert!((d.probability(&[1.0]).unwrap() - 1.0 / 6.0).abs() < TOL);
        assert!((d.probability(&[-1.0]).unwrap() - 1.0 / 6.0).abs() < TOL);
        assert!((d.probability(&[0.0]).unwrap() - 2.0 / 3.0).abs() < TOL);
        // 1/16 + 1/16 + 1/4
        assert!((d.success_probability - 0.375).abs() < TOL);
    }

    #[test]
    fn arm_one_polarisation_is_balanced() {
        let (pre, post) = cheshire_pair();
        let d = abl_distribution(&Obs::SigmaZ1.spectral(), &pre, &post).unwrap();
        assert!((d.probability(&[1.0]).unwrap() - 0.5).abs() < TOL);
        assert!((d.probability(&[-1.0]).unwrap() - 0.5).abs() < TOL);
        assert!(d.probability(&[0.0]).unwrap().abs() < TOL);
    }

    #[test]
    fn joint_detectors_dissolve_the_paradox() {
        let (pre, post) = cheshire_pair();
        let seq = [
            Obs::SigmaZ2.spectral(),
            Obs::Pi1.spectral(),
            Obs::Pi2.spectral(),
        ];
        let d = sequential_distribution(&seq, &pre, &post).unwrap();
        assert_eq!(d.outcomes.len(), 12);
        assert!((d.probability(&[1.0, 0.0, 1.0]).unwrap() - 1.0 / 6.0).abs() < TOL);
        assert!((d.probability(&[-1.0, 0.0, 1.0]).unwrap() - 1.0 / 6.0).abs() < TOL);
        assert!((d.probability(&[0.0, 1.0, 0.0]).unwrap() - 2.0 / 3.0).abs() < TOL);
        assert!((d.total() - 1.0).abs() < TOL);
        assert_eq!(d.support(TOL).count(), 3);
    }

    #[test]
    fn probes_in_both_arms() {
        let (pre, post) = cheshire_pair();
        let seq = [Obs::Pi1.spectral(), Obs::Pi2.spectral()];
        let d = sequential_distribution(&seq, &pre, &post).unwrap();
        assert!((d.probability(&[1.0, 0.0]).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn post_equal_to_pre_gives_born_rule() {
        let (pre, _) = cheshire_pair();
        let d = abl_distribution(&Obs::Pi1.spectral(), &pre, &pre).unwrap();
        assert!((d.probability(&[1.0]).unwrap() - 0.5).abs() < TOL);
        assert!((d.probability(&[0.0]).unwrap() - 0.5).abs() < TOL);
    }

    #[test]
    fn incompatible_selection_has_no_history() {
        let pre = Ket::basis(BasisLabel::new(Arm::One, Pol::Plus));
        let post = Ket::basis(BasisLabel::new(Arm::Two, Pol::Plus));
        assert_eq!(
            abl_distribution(&Obs::Pi1.spectral(), &pre, &post),
            Err(Error::NoValidHistory)
        );
        assert_eq!(
            sequential_distribution(&[], &pre, &post),
            Err(Error::EmptyObservableList)
        );
    }

    #[test]
    fn unnormalized_states_are_rejected() {
        let (pre, _) = cheshire_pair();
        let half = pre.scale(Complex64::new(0.5, 0.0));
        assert!(abl_distribution(&Obs::Pi1.spectral(), &half, &pre).is_err());
    }

    #[test]
    fn collapse_examples() {
        let (pre, _) = cheshire_pair();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let arm2 = collapse(&Obs::Pi1.spectral(), 0.0, &pre).unwrap();
        assert!(arm2.max_abs_diff(&Ket::from_real([0.0, 0.0, h, h])) < TOL);
        assert!(arm2.is_normalized());

        let plus = collapse(&Obs::SigmaZ2.spectral(), 1.0, &pre).unwrap();
        assert!(plus.max_abs_diff(&Ket::basis(BasisLabel::new(Arm::Two, Pol::Plus))) < TOL);

        let k = Ket::basis(BasisLabel::new(Arm::Two, Pol::Plus));
        assert!(matches!(
            collapse(&Obs::Pi1.spectral(), 1.0, &k),
            Err(Error::ImpossibleOutcome { .. })
        ));
        assert!(matches!(
            collapse(&Obs::Pi1.spectral(), 7.0, &k),
            Err(Error::UnknownEigenvalue(_))
        ));
    }
}
