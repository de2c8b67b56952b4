//! Simulator for the quantum Cheshire cat: a photon pre- and post-selected
//! in a Mach-Zehnder interferometer whose path and circular polarisation are
//! probed by strong and weak measurements.
//!
//! * [`qstate`]: the four-dimensional path ⊗ polarisation space, canonical
//!   states and observables.
//! * [`optics`]: interferometer elements and detectors; a D1 click
//!   post-selects the canonical post-selected state.
//! * [`postselect`]: weak values, ABL conditional distributions, collapse.
//! * [`pointer`]: Gaussian von Neumann pointers, exact branch mixtures and
//!   their closed-form moments.
//! * [`montecarlo`]: seeded shot-by-shot CCD simulation and estimators.

pub mod error;
pub mod montecarlo;
pub mod optics;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod pointer;
pub mod postselect;
pub mod qstate;

pub use error::{Error, Result, SpectralViolation};
pub use montecarlo::{
    estimate, sample_id_range, sample_shards, sample_shots, Coupling, Experiment, Sampler,
    ShotRecord, SummaryStats,
};
pub use optics::{run_interferometer, Circuit, DetectionResult, Detector, OpticalElement};
pub use pointer::{
    mixture_density, mixture_moments, postselect_pointer, Axis, AxisMoments, CoupledState,
    GaussianPointer, PointerMixture,
};
pub use postselect::{
    abl_distribution, collapse, sequential_distribution, weak_value, ConditionalDistribution,
};
pub use qstate::{
    canonical_observables, canonical_states, inner, BasisLabel, CanonicalObservable, Ket, Operator,
    SpectralObservable,
};

/// Absolute tolerance for algebraic identities on the four-dimensional space.
pub const TOL: f64 = 1e-12;
