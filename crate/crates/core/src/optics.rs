//! The interferometer: beamsplitters, half-wave plate, polarising
//! beamsplitter and the three detectors.
//!
//! Element unitaries act on the same four-dimensional space as the photon
//! inside the interferometer. After the output beamsplitter the path index
//! labels output ports instead of arms (`Arm::One` is the left port,
//! `Arm::Two` the right port). After the polarising beamsplitter the
//! polarisation index is linear rather than circular (`Pol::Plus` slot holds
//! `H`, `Pol::Minus` slot holds `V`).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{inner, Arm, BasisLabel, Ket, Operator, Pol, DIM};
use crate::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpticalElement {
    /// 50:50 beamsplitter preparing the path superposition.
    BeamSplitterIn,
    /// Swaps `H` and `V` in one arm.
    HalfWavePlate(Arm),
    /// 50:50 beamsplitter closing the Mach-Zehnder interferometer.
    BeamSplitterOut,
    /// Converts circular to linear polarisation labels so that `H` and `V`
    /// occupy distinct output modes.
    PolarisingBS,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn balanced_mixer() -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h), c(h)], [c(h), c(-h)]]
}

const ID2: [[Complex64; 2]; 2] = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

impl OpticalElement {
    pub fn unitary(self) -> Operator {
        match self {
            OpticalElement::BeamSplitterIn | OpticalElement::BeamSplitterOut => {
                Operator::kron(balanced_mixer(), ID2)
            }
            OpticalElement::HalfWavePlate(arm) => {
                let mut d = [1.0; DIM];
                d[BasisLabel::new(arm, Pol::Minus).index()] = -1.0;
                Operator::diagonal(d)
            }
            // |+⟩, |−⟩ → (H ± V)/√2, so the H amplitude is (a₊ + a₋)/√2.
            OpticalElement::PolarisingBS => Operator::kron(ID2, balanced_mixer()),
        }
    }
}

pub fn element_unitary(e: OpticalElement) -> Operator {
    e.unitary()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Detector {
    D1,
    D2,
    D3,
}

impl Detector {
    pub const ALL: [Detector; 3] = [Detector::D1, Detector::D2, Detector::D3];

    pub fn name(self) -> &'static str {
        match self {
            Detector::D1 => "D1",
            Detector::D2 => "D2",
            Detector::D3 => "D3",
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output modes after the polarising beamsplitter. The right port is not
/// split by polarisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputMode {
    LeftH,
    LeftV,
    Right,
}

impl OutputMode {
    pub const ALL: [OutputMode; 3] = [OutputMode::LeftH, OutputMode::LeftV, OutputMode::Right];

    /// Basis indices of the output space covered by this mode.
    pub fn indices(self) -> &'static [usize] {
        match self {
            OutputMode::LeftH => &[0],
            OutputMode::LeftV => &[1],
            OutputMode::Right => &[2, 3],
        }
    }

    pub fn projector(self) -> Operator {
        let mut d = [0.0; DIM];
        for &i in self.indices() {
            d[i] = 1.0;
        }
        Operator::diagonal(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    elements: Vec<OpticalElement>,
    detectors: BTreeMap<OutputMode, Detector>,
}

impl Circuit {
    pub fn new(
        elements: Vec<OpticalElement>,
        detectors: BTreeMap<OutputMode, Detector>,
    ) -> Result<Self> {
        let circuit = Circuit {
            elements,
            detectors,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    /// Half-wave plate in arm 2, output beamsplitter, polarising beamsplitter;
    /// left-port `H` goes to D1, left-port `V` to D3 and the right port to D2.
    pub fn cheshire() -> Self {
        Circuit {
            elements: vec![
                OpticalElement::HalfWavePlate(Arm::Two),
                OpticalElement::BeamSplitterOut,
                OpticalElement::PolarisingBS,
            ],
            detectors: BTreeMap::from([
                (OutputMode::LeftH, Detector::D1),
                (OutputMode::LeftV, Detector::D3),
                (OutputMode::Right, Detector::D2),
            ]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for mode in OutputMode::ALL {
            if !self.detectors.contains_key(&mode) {
                return Err(Error::InvalidCircuit(format!(
                    "output mode {mode:?} has no detector"
                )));
            }
        }
        for d in Detector::ALL {
            let n = self.detectors.values().filter(|&&x| x == d).count();
            if n != 1 {
                return Err(Error::InvalidCircuit(format!(
                    "detector {d} is mapped {n} times"
                )));
            }
        }
        Ok(())
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn mode_of(&self, detector: Detector) -> OutputMode {
        *self
            .detectors
            .iter()
            .find(|(_, &d)| d == detector)
            .map(|(m, _)| m)
            .expect("validated circuit maps every detector")
    }

    /// Product of the element unitaries, first element applied first.
    pub fn unitary(&self) -> Operator {
        self.elements
            .iter()
            .fold(Operator::identity(), |acc, e| e.unitary() * acc)
    }

    /// `U† P_d U`: the projector, on the space inside the interferometer,
    /// whose expectation is the click probability of `detector`.
    pub fn effect(&self, detector: Detector) -> Operator {
        let u = self.unitary();
        u.adjoint() * self.mode_of(detector).projector() * u
    }

    /// Maps an output-space ket back to the space inside the interferometer.
    pub fn trace_back(&self, output: &Ket) -> Ket {
        self.unitary().adjoint().apply(output)
    }

    pub fn run(&self, state_inside: &Ket) -> Result<DetectionResult> {
        if !state_inside.is_normalized() {
            return Err(Error::NotNormalized {
                norm_sqr: state_inside.norm_sqr(),
            });
        }
        let out = self.unitary().apply(state_inside);
        let mut probabilities = BTreeMap::new();
        let mut conditional_states = BTreeMap::new();
        for d in Detector::ALL {
            let component = self.mode_of(d).projector().apply(&out);
            let p = component.norm_sqr();
            probabilities.insert(d, p);
            if p > TOL {
                conditional_states.insert(d, component.normalize()?);
            }
        }
        Ok(DetectionResult {
            probabilities,
            conditional_states,
        })
    }
}

impl Default for Circuit {
    fn default() -> Self {
        Self::cheshire()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub probabilities: BTreeMap<Detector, f64>,
    /// Normalized output-space state given a click; present only for
    /// detectors with nonzero probability.
    pub conditional_states: BTreeMap<Detector, Ket>,
}

impl DetectionResult {
    pub fn probability(&self, d: Detector) -> f64 {
        self.probabilities[&d]
    }
}

pub fn run_interferometer(state_inside: &Ket) -> Result<DetectionResult> {
    Circuit::cheshire().run(state_inside)
}

/// State inside the interferometer when a horizontally polarised photon
/// enters the first beamsplitter through its port 1.
pub fn prepared_state() -> Ket {
    let input = crate::qstate::product_ket(Arm::One, crate::qstate::horizontal());
    OpticalElement::BeamSplitterIn.unitary().apply(&input)
}

/// The state inside the interferometer that reaches D1 with certainty.
pub fn postselected_state(circuit: &Circuit) -> Ket {
    let mode = circuit.mode_of(Detector::D1);
    let mut amps = [Complex64::new(0.0, 0.0); DIM];
    amps[mode.indices()[0]] = Complex64::new(1.0, 0.0);
    circuit.trace_back(&Ket::from_amps(amps))
}

/// Probability that a click of `detector` is registered, `⟨s|E_d|s⟩`.
pub fn click_probability(circuit: &Circuit, detector: Detector, state: &Ket) -> f64 {
    inner(state, &circuit.effect(detector).apply(state)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{canonical_states, horizontal, post_selected, pre_selected, product_ket};

    const ELEMENTS: [OpticalElement; 5] = [
        OpticalElement::BeamSplitterIn,
        OpticalElement::HalfWavePlate(Arm::One),
        OpticalElement::HalfWavePlate(Arm::Two),
        OpticalElement::BeamSplitterOut,
        OpticalElement::PolarisingBS,
    ];

    #[test]
    fn elements_are_unitary() {
        for e in ELEMENTS {
            assert!(element_unitary(e).unitarity_residual() < TOL, "{e:?}");
        }
        assert!(Circuit::cheshire().unitary().is_unitary());
    }

    #[test]
    fn balanced_input_leaves_left_port() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let inside = (product_ket(Arm::One, horizontal()) + product_ket(Arm::Two, horizontal()))
            .scale(Complex64::new(h, 0.0));
        let out = OpticalElement::BeamSplitterOut.unitary().apply(&inside);
        let left_h = product_ket(Arm::One, horizontal());
        assert!(out.max_abs_diff(&left_h) < TOL);
    }

    #[test]
    fn half_wave_plate_maps_post_to_pre() {
        let out = OpticalElement::HalfWavePlate(Arm::Two)
            .unitary()
            .apply(&post_selected());
        assert!(out.max_abs_diff(&pre_selected()) < TOL);
    }

    #[test]
    fn input_beamsplitter_prepares_pre_selected_state() {
        assert!(prepared_state().max_abs_diff(&pre_selected()) < TOL);
    }

    #[test]
    fn post_selected_state_reaches_d1() {
        let r = run_interferometer(&post_selected()).unwrap();
        assert!((r.probability(Detector::D1) - 1.0).abs() < TOL);
        assert!(r.probability(Detector::D2).abs() < TOL);
        assert!(r.probability(Detector::D3).abs() < TOL);
        assert_eq!(r.conditional_states.len(), 1);
    }

    #[test]
    fn pre_selected_state_splits_quarter_half_quarter() {
        let r = run_interferometer(&pre_selected()).unwrap();
        assert!((r.probability(Detector::D1) - 0.25).abs() < TOL);
        assert!((r.probability(Detector::D2) - 0.5).abs() < TOL);
        assert!((r.probability(Detector::D3) - 0.25).abs() < TOL);
        let total: f64 = r.probabilities.values().sum();
        assert!((total - 1.0).abs() < TOL);
    }

    #[test]
    fn single_basis_state_splits_quarter_half_quarter() {
        let k = Ket::basis(BasisLabel::new(Arm::One, Pol::Plus));
        let r = run_interferometer(&k).unwrap();
        assert!((r.probability(Detector::D1) - 0.25).abs() < TOL);
        assert!((r.probability(Detector::D2) - 0.5).abs() < TOL);
        assert!((r.probability(Detector::D3) - 0.25).abs() < TOL);
        for state in r.conditional_states.values() {
            assert!((state.norm_sqr() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn d1_effect_is_projector_onto_post_selected_state() {
        let circuit = Circuit::cheshire();
        let phi = post_selected();
        let expected = Operator::outer(&phi, &phi);
        assert!(circuit.effect(Detector::D1).max_abs_diff(&expected) < TOL);
        assert!(postselected_state(&circuit).max_abs_diff(&phi) < TOL);
        let total = Detector::ALL
            .iter()
            .fold(Operator::zero(), |acc, &d| acc + circuit.effect(d));
        assert!(total.max_abs_diff(&Operator::identity()) < TOL);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let k = Ket::from_real([1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            run_interferometer(&k),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn detector_map_must_be_bijective() {
        let detectors = BTreeMap::from([
            (OutputMode::LeftH, Detector::D1),
            (OutputMode::LeftV, Detector::D1),
            (OutputMode::Right, Detector::D2),
        ]);
        assert!(Circuit::new(Circuit::cheshire().elements().to_vec(), detectors).is_err());
        let missing = BTreeMap::from([(OutputMode::LeftH, Detector::D1)]);
        assert!(Circuit::new(vec![], missing).is_err());
    }

    #[test]
    fn click_probability_matches_run() {
        let circuit = Circuit::cheshire();
        let s = canonical_states().pre;
        let r = circuit.run(&s).unwrap();
        for d in Detector::ALL {
            assert!((click_probability(&circuit, d, &s) - r.probability(d)).abs() < TOL);
        }
    }
}
