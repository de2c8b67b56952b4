//! Fixtures shared by the criterion benchmarks.

use cheshire_core::{Axis, CanonicalObservable, Coupling, Experiment, GaussianPointer};

/// Weak path pointer on the vertical axis and weak arm-2 polarisation pointer
/// on the horizontal axis, both with coupling `g` and unit width.
pub fn cheshire_experiment(g: f64) -> Experiment {
    let pointer = |axis| GaussianPointer::new(axis, 1.0, g).expect("valid pointer");
    Experiment::cheshire(vec![
        Coupling::canonical(CanonicalObservable::Pi1, pointer(Axis::Vertical)),
        Coupling::canonical(CanonicalObservable::SigmaZ2, pointer(Axis::Horizontal)),
    ])
}
