//! Simulation and verification of a heralded decoherence-free-subsystem
//! (DFS) photonic state generator and its decoder.
//!
//! The crate evolves multi-photon polarization states through small linear
//! optical circuits exactly, enumerates photon-number-resolving detection
//! outcomes, and verifies the amplitude-level properties of a four-photon
//! noiseless-subsystem code: block confinement under collective noise,
//! invariance of the logical coefficients, heralded preparation of an
//! arbitrary logical qubit state, and single-shot decoding.
//!
//! The main layers, bottom up:
//!
//! - [`fock`]: sparse Fock states over polarization-resolved spatial rails.
//! - [`elements`]: the catalog of unitary optical elements (polarizing beam
//!   splitters in two bases, 50/50 splitters, wave plates, rotations) and
//!   their action on states via creation-operator substitution.
//! - [`circuit`]: declarative circuits (rails, ordered elements, detector
//!   designations) plus input-state builders.
//! - [`detection`]: exact outcome enumeration and heralding on detector
//!   rails, in either the rectilinear or the diagonal measurement basis.
//! - [`dfs`]: the nine four-photon code states, logical-coefficient
//!   extraction, and collective-noise channels.
//! - [`protocols`]: builders and runners for the three circuits of
//!   interest — the two-photon parity check, the heralded generator, and
//!   the receiver-side decoder — plus decoding classification.
//! - [`cli`]: the `dfs-herald` command-line front end.
//!
//! ```
//! use dfs_photonics::protocols::hnsg::{HnsgConfig, hnsg_run};
//!
//! let report = hnsg_run(&HnsgConfig::new(0.0, 0.0)).unwrap();
//! assert!((report.accept_probability - 1.0 / 32.0).abs() < 1e-12);
//! assert!(report.target_fidelity > 1.0 - 1e-12);
//! ```

pub mod circuit;
pub mod cli;
pub mod detection;
pub mod dfs;
pub mod elements;
pub mod error;
pub mod fock;
pub mod protocols;

pub use error::{Error, Result};
pub use fock::{Complex64, FockState, ModeRegistry, Pol};

/// The mdbook guide chapters double as doc-tests so the book's examples can
/// never drift out of sync with the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(states, "../../../book/src/states.md");
    chapter!(elements, "../../../book/src/elements.md");
    chapter!(circuits, "../../../book/src/circuits.md");
    chapter!(detection, "../../../book/src/detection.md");
    chapter!(code_space, "../../../book/src/code-space.md");
    chapter!(heralding, "../../../book/src/heralding.md");
    chapter!(noise, "../../../book/src/noise.md");
    chapter!(decoding, "../../../book/src/decoding.md");
    chapter!(cli, "../../../book/src/cli.md");
    chapter!(formats, "../../../book/src/formats.md");
}
