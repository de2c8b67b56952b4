use cheshire_core::optics::{postselected_state, OpticalElement};
use cheshire_core::qstate::{Arm, DIM};
use cheshire_core::{
    canonical_states, inner, run_interferometer, Circuit, Detector, Ket, Operator, TOL,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn ket_strategy() -> impl Strategy<Value = Ket> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("non-null", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let amps: [Complex64; DIM] =
                std::array::from_fn(|i| Complex64::new(v[2 * i], v[2 * i + 1]));
            Ket::from_amps(amps).normalize().unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn d1_click_post_selects_phi(s in ket_strategy()) {
        let circuit = Circuit::cheshire();
        let phi = canonical_states().post;
        let r = circuit.run(&s).unwrap();
        let overlap = inner(&phi, &s);
        prop_assert!((r.probability(Detector::D1) - overlap.norm_sqr()).abs() < TOL);
        prop_assert!((r.probabilities.values().sum::<f64>() - 1.0).abs() < TOL);

        if let Some(state) = r.conditional_states.get(&Detector::D1) {
            let traced = circuit.trace_back(state);
            let projected = phi.scale(overlap).normalize().unwrap();
            prop_assert!(traced.equals_up_to_phase(&projected, 1e-10));
        }
    }
}

#[test]
fn composed_interferometer_is_unitary() {
    let all = [
        OpticalElement::BeamSplitterIn,
        OpticalElement::HalfWavePlate(Arm::One),
        OpticalElement::HalfWavePlate(Arm::Two),
        OpticalElement::BeamSplitterOut,
        OpticalElement::PolarisingBS,
    ];
    let product = all
        .iter()
        .fold(Operator::identity(), |acc, e| e.unitary() * acc);
    assert!(product.unitarity_residual() < TOL);
    assert!(Circuit::cheshire().unitary().unitarity_residual() < TOL);
}

#[test]
fn traced_back_d1_mode_is_phi() {
    let circuit = Circuit::cheshire();
    assert!(postselected_state(&circuit).max_abs_diff(&canonical_states().post) < TOL);
    let r = run_interferometer(&canonical_states().post).unwrap();
    let traced = circuit.trace_back(&r.conditional_states[&Detector::D1]);
    assert!(traced.equals_up_to_phase(&canonical_states().post, TOL));
}
