//! The two-photon polarization parity check.
//!
//! An arbitrary polarization qubit enters on rail `a` and a diagonal
//! ancilla photon on rail `b`. A rectilinear polarizing beam splitter
//! (reflective geometry: rail `a` is reused as one of its outputs) lets
//! the two photons interfere; a diagonal-basis detector on rail `a` then
//! heralds success.
//!
//! When the detector sees exactly one photon, the input qubit has been
//! transferred onto rail `d`: outcome `F` leaves it intact, outcome `S`
//! imprints a known sign on the `H` component that downstream processing
//! can undo. Each of the two accepting outcomes occurs with probability
//! 1/4 regardless of the input, and the remaining probability 1/2 is
//! heralded as failure by a photon count other than one.

use crate::circuit::{qubit_state, single_state, Circuit, ElementSpec, SinglePol};
use crate::detection::{DetectionOutcome, DetectionPattern, DetectorSpec, MeasBasis};
use crate::elements::ElementKind;
use crate::error::Result;
use crate::fock::{Complex64, FockState};

/// Rail carrying the input qubit and, afterwards, the herald photon.
pub const QUBIT_RAIL: &str = "a";
/// Rail carrying the diagonal ancilla photon.
pub const ANCILLA_RAIL: &str = "b";
/// Rail carrying the transferred qubit on success.
pub const OUTPUT_RAIL: &str = "d";

/// The parity-check circuit: one reflective polarizing beam splitter and
/// one diagonal-basis detector.
pub fn parity_check_circuit() -> Result<Circuit> {
    Circuit::new(
        &[QUBIT_RAIL, ANCILLA_RAIL, OUTPUT_RAIL],
        vec![ElementSpec::four_port(
            ElementKind::HvPbs,
            QUBIT_RAIL,
            ANCILLA_RAIL,
            QUBIT_RAIL,
            OUTPUT_RAIL,
        )],
        vec![DetectorSpec::new(QUBIT_RAIL, MeasBasis::Fs)],
    )
}

/// The circuit's input for the qubit `alpha |H> + beta |V>`.
pub fn parity_check_input(circuit: &Circuit, alpha: Complex64, beta: Complex64) -> Result<FockState> {
    let registry = circuit.registry();
    qubit_state(registry, QUBIT_RAIL, alpha, beta)?
        .tensor(&single_state(registry, ANCILLA_RAIL, SinglePol::F)?)
}

/// Run the parity check on `alpha |H> + beta |V>` and enumerate every
/// detection outcome.
pub fn parity_check_run(alpha: Complex64, beta: Complex64) -> Result<Vec<DetectionOutcome>> {
    let circuit = parity_check_circuit()?;
    let input = parity_check_input(&circuit, alpha, beta)?;
    circuit.measure(&input)
}

/// True when a pattern heralds success: exactly one photon on the
/// detector rail.
pub fn is_accept(pattern: &DetectionPattern) -> bool {
    pattern.entry(QUBIT_RAIL).is_some_and(|e| e.total() == 1)
}
