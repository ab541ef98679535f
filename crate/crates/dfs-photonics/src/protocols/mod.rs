//! The three circuits of interest, wired and ready to run.
//!
//! - [`parity`]: the two-photon polarization parity check — the primitive
//!   that fuses a flying qubit with a diagonal ancilla and heralds on a
//!   single diagonal-basis detector.
//! - [`joint`]: two parity primitives whose ancillas interfere on a
//!   diagonal-basis splitter, heralding a joint phase relation between two
//!   independent qubits.
//! - [`hnsg`]: the full heralded generator that turns two Bell pairs and
//!   two ancillas into an arbitrary logical superposition on the
//!   four-photon code space.
//! - [`decoder`]: the receiver-side pair interferometers that read the
//!   logical value out of a code state in a single shot.

pub mod decoder;
pub mod hnsg;
pub mod joint;
pub mod parity;
