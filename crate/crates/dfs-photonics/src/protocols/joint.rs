//! The joint phase measurement: two parity primitives with interfering
//! ancillas.
//!
//! Two independent polarization qubits enter on rails `m3` and `m4`; two
//! diagonal ancillas enter on `m2` and `m5`. Each qubit fuses with its
//! ancilla on a reflective rectilinear splitter (outputs continuing on
//! `o2` and `o3`), and the two ancilla rails then interfere on a
//! diagonal-basis splitter whose outputs `a3`, `a4` are measured in the
//! diagonal basis.
//!
//! Exactly two patterns accept — both detectors seeing `F`, or both
//! seeing `S` — each with probability 1/16 independent of the inputs.
//! The `F F` outcome leaves the product of the two qubits on `o2`, `o3`
//! untouched; the `S S` outcome imprints the correlated sign flip
//! `H -> -H` on both. Mixed `F`/`S` single-photon patterns never occur.

use crate::circuit::{qubit_state, single_state, Circuit, ElementSpec, SinglePol};
use crate::detection::{DetectionOutcome, DetectionPattern, DetectorSpec, MeasBasis};
use crate::elements::ElementKind;
use crate::error::Result;
use crate::fock::{Complex64, FockState};

/// Rails carrying the two input qubits.
pub const QUBIT_RAILS: [&str; 2] = ["m3", "m4"];
/// Rails carrying the diagonal ancilla photons.
pub const ANCILLA_RAILS: [&str; 2] = ["m2", "m5"];
/// Detector rails.
pub const HERALD_RAILS: [&str; 2] = ["a3", "a4"];
/// Rails carrying the transferred qubits on success.
pub const OUTPUT_RAILS: [&str; 2] = ["o2", "o3"];

/// The joint-phase circuit: two reflective rectilinear splitters, one
/// diagonal splitter, two diagonal-basis detectors.
pub fn joint_phase_circuit() -> Result<Circuit> {
    Circuit::new(
        &["m2", "m3", "m4", "m5", "a3", "a4", "o2", "o3"],
        vec![
            ElementSpec::four_port(ElementKind::HvPbs, "m2", "m3", "m2", "o2"),
            ElementSpec::four_port(ElementKind::HvPbs, "m5", "m4", "m5", "o3"),
            ElementSpec::four_port(ElementKind::FsPbs, "m2", "m5", "a3", "a4"),
        ],
        vec![
            DetectorSpec::new("a3", MeasBasis::Fs),
            DetectorSpec::new("a4", MeasBasis::Fs),
        ],
    )
}

/// The circuit's input for qubits `alpha1 |H> + beta1 |V>` on `m3` and
/// `alpha2 |H> + beta2 |V>` on `m4`.
pub fn joint_phase_input(
    circuit: &Circuit,
    alpha1: Complex64,
    beta1: Complex64,
    alpha2: Complex64,
    beta2: Complex64,
) -> Result<FockState> {
    let registry = circuit.registry();
    qubit_state(registry, QUBIT_RAILS[0], alpha1, beta1)?
        .tensor(&qubit_state(registry, QUBIT_RAILS[1], alpha2, beta2)?)?
        .tensor(&single_state(registry, ANCILLA_RAILS[0], SinglePol::F)?)?
        .tensor(&single_state(registry, ANCILLA_RAILS[1], SinglePol::F)?)
}

/// Run the joint phase measurement and enumerate every detection outcome.
pub fn joint_phase_run(
    alpha1: Complex64,
    beta1: Complex64,
    alpha2: Complex64,
    beta2: Complex64,
) -> Result<Vec<DetectionOutcome>> {
    let circuit = joint_phase_circuit()?;
    let input = joint_phase_input(&circuit, alpha1, beta1, alpha2, beta2)?;
    circuit.measure(&input)
}

/// True when a pattern heralds success: exactly one photon on each
/// detector rail.
pub fn is_accept(pattern: &DetectionPattern) -> bool {
    HERALD_RAILS
        .iter()
        .all(|rail| pattern.entry(rail).is_some_and(|e| e.total() == 1))
}
