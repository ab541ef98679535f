//! The heralded generator: two Bell pairs plus two diagonal ancillas in,
//! an arbitrary logical superposition on the four-photon code out.
//!
//! Rails `m1`/`m3` carry a polarization singlet and `m4`/`m6` a symmetric
//! Bell pair. The inner rails `m3`, `m4` each fuse with a diagonal
//! ancilla (`m2`, `m5`) on a reflective rectilinear splitter, the two
//! ancilla rails interfere on a diagonal splitter, and the interfered
//! rails pass a phase plate and a rotator (angles `phi`, `theta`) before
//! being demultiplexed onto four single-photon detectors. The outer rails
//! `m1`, `m6` travel unmodified to the first and last output rails.
//!
//! Heralding on one `H` photon at `d1` and one `F` photon at `d2` (and
//! nothing at `d3`, `d4`) leaves the four output rails in
//!
//! ```text
//! cos(theta) |2; 1> + e^{i phi} sin(theta) |1; 1>
//! ```
//!
//! with probability exactly 1/32, for every `theta` and `phi`. The
//! mirrored pattern — the `d3` detector seeing one `V` photon instead of
//! `d1` seeing `H` — occurs with the same probability and produces the
//! same state with `phi` advanced by pi, a known correctable offset.
//! A configuration with half-wave plates on the outer rails merges the
//! two logical branches into the qutrit-zero state `|0; 1>` instead.

use std::f64::consts::FRAC_PI_4;

use crate::circuit::{build_input, BellKind, Circuit, ElementSpec, InputPart, SinglePol};
use crate::detection::{
    enumerate_outcomes, DetectionOutcome, DetectionPattern, DetectorSpec, MeasBasis, PatternEntry,
};
use crate::dfs::{CollectiveUnitary, LogicalBasis, LogicalDecomposition};
use crate::elements::ElementKind;
use crate::error::{Error, Result};
use crate::fock::{Complex64, FockState};

/// The four output rails, in code order.
pub const OUTPUT_RAILS: [&str; 4] = ["o1", "o2", "o3", "o4"];
/// The four detector rails.
pub const HERALD_RAILS: [&str; 4] = ["d1", "d2", "d3", "d4"];

/// Generator configuration: the two heralded-state angles, and whether
/// the outer rails carry half-wave plates that merge the logical branches
/// into logical zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HnsgConfig {
    /// Mixing angle between the two logical branches.
    pub theta: f64,
    /// Relative phase imprinted on the second branch.
    pub phi: f64,
    /// When set, half-wave plates on the outer rails turn the equal
    /// superposition into the qutrit-zero state.
    pub merge_to_zero: bool,
}

impl HnsgConfig {
    /// Herald `cos(theta) |2; 1> + e^{i phi} sin(theta) |1; 1>`.
    pub fn new(theta: f64, phi: f64) -> HnsgConfig {
        HnsgConfig {
            theta,
            phi,
            merge_to_zero: false,
        }
    }

    /// Herald the qutrit-zero state `|0; 1>`: the equal superposition at
    /// `theta = pi/4`, `phi = 0`, merged by outer-rail half-wave plates.
    pub fn qutrit_zero() -> HnsgConfig {
        HnsgConfig {
            theta: FRAC_PI_4,
            phi: 0.0,
            merge_to_zero: true,
        }
    }
}

/// The generator circuit for a configuration.
pub fn hnsg_circuit(config: &HnsgConfig) -> Result<Circuit> {
    let mut elements = Vec::new();
    if config.merge_to_zero {
        elements.push(ElementSpec::half_wave_x("m1"));
        elements.push(ElementSpec::half_wave_x("m6"));
    }
    elements.extend([
        ElementSpec::four_port(ElementKind::HvPbs, "m2", "m3", "m2", "o2"),
        ElementSpec::four_port(ElementKind::HvPbs, "m5", "m4", "m5", "o3"),
        ElementSpec::four_port(ElementKind::FsPbs, "m2", "m5", "a3", "a4"),
        ElementSpec::phase("a4", config.phi),
        ElementSpec::pol_rot("a4", config.theta),
        ElementSpec::split(ElementKind::HvSplit, "a3", "d1", "d3"),
        ElementSpec::split(ElementKind::FsSplit, "a4", "d2", "d4"),
        ElementSpec::route("m1", "o1"),
        ElementSpec::route("m6", "o4"),
    ]);
    Circuit::new(
        &[
            "m1", "m2", "m3", "m4", "m5", "m6", "a3", "a4", "o1", "o2", "o3", "o4", "d1", "d2",
            "d3", "d4",
        ],
        elements,
        vec![
            DetectorSpec::new("d1", MeasBasis::Hv),
            DetectorSpec::new("d2", MeasBasis::Fs),
            DetectorSpec::new("d3", MeasBasis::Hv),
            DetectorSpec::new("d4", MeasBasis::Fs),
        ],
    )
}

/// The generator's fixed input: a singlet across `m1`/`m3`, a symmetric
/// pair across `m4`/`m6`, and diagonal ancillas on `m2` and `m5`.
pub fn hnsg_input(circuit: &Circuit) -> Result<FockState> {
    build_input(
        circuit.registry(),
        &[
            InputPart::Bell {
                kind: BellKind::PsiMinus,
                rails: ["m1".to_string(), "m3".to_string()],
            },
            InputPart::Single {
                rail: "m2".to_string(),
                pol: SinglePol::F,
            },
            InputPart::Bell {
                kind: BellKind::PsiPlus,
                rails: ["m4".to_string(), "m6".to_string()],
            },
            InputPart::Single {
                rail: "m5".to_string(),
                pol: SinglePol::F,
            },
        ],
    )
}

fn herald_pattern(d1: [u8; 2], d2: [u8; 2], d3: [u8; 2], d4: [u8; 2]) -> DetectionPattern {
    DetectionPattern::new([
        (
            "d1".to_string(),
            PatternEntry {
                basis: MeasBasis::Hv,
                counts: d1,
            },
        ),
        (
            "d2".to_string(),
            PatternEntry {
                basis: MeasBasis::Fs,
                counts: d2,
            },
        ),
        (
            "d3".to_string(),
            PatternEntry {
                basis: MeasBasis::Hv,
                counts: d3,
            },
        ),
        (
            "d4".to_string(),
            PatternEntry {
                basis: MeasBasis::Fs,
                counts: d4,
            },
        ),
    ])
}

/// The accepting pattern: one `H` at `d1`, one `F` at `d2`, nothing else.
pub fn accept_pattern() -> DetectionPattern {
    herald_pattern([1, 0], [1, 0], [0, 0], [0, 0])
}

/// The mirrored pattern: one `V` at `d3`, one `F` at `d2`, nothing else.
pub fn mirrored_pattern() -> DetectionPattern {
    herald_pattern([0, 0], [1, 0], [0, 1], [0, 0])
}

/// Everything one generator run establishes.
#[derive(Debug, Clone)]
pub struct HeraldReport {
    /// The configuration that was run.
    pub config: HnsgConfig,
    /// Probability of the accepting pattern (1/32 for every
    /// configuration).
    pub accept_probability: f64,
    /// The heralded state on the four output rails, normalized, expressed
    /// on the output registry.
    pub conditional: FockState,
    /// The configuration's target state on the same registry.
    pub target: FockState,
    /// `|<target | conditional>|^2`.
    pub target_fidelity: f64,
    /// Probability of the mirrored pattern.
    pub mirrored_probability: f64,
    /// Fidelity of the mirrored branch against the phase-advanced target.
    pub mirrored_fidelity: f64,
    /// Canonical-gauge decomposition of the heralded state.
    pub decomposition: LogicalDecomposition,
    /// Every detection outcome of the run, on the full circuit registry.
    pub all_outcomes: Vec<DetectionOutcome>,
}

fn branch_target(basis: &LogicalBasis, config: &HnsgConfig, phi: f64) -> Result<FockState> {
    let weight_two = Complex64::new(config.theta.cos(), 0.0);
    let weight_one = Complex64::new(0.0, phi).exp() * config.theta.sin();
    let base = basis
        .state(2, 1)
        .scaled(weight_two)
        .plus(&basis.state(1, 1).scaled(weight_one))?;
    if config.merge_to_zero {
        CollectiveUnitary::sigma_x().apply(&base, &[OUTPUT_RAILS[0], OUTPUT_RAILS[3]])
    } else {
        Ok(base)
    }
}

/// Run the generator and collect the full herald report.
pub fn hnsg_run(config: &HnsgConfig) -> Result<HeraldReport> {
    let circuit = hnsg_circuit(config)?;
    let input = hnsg_input(&circuit)?;
    let final_state = circuit.run(&input)?;
    let all_outcomes = enumerate_outcomes(&final_state, circuit.detectors())?;

    let find = |pattern: &DetectionPattern| -> Result<&DetectionOutcome> {
        all_outcomes
            .iter()
            .find(|o| o.pattern == *pattern)
            .ok_or(Error::ZeroProbabilityPattern)
    };
    let accept = find(&accept_pattern())?;
    let mirrored = find(&mirrored_pattern())?;

    let basis = LogicalBasis::new(OUTPUT_RAILS)?;
    let conditional = accept.conditional.remap(basis.registry())?;
    let target = branch_target(&basis, config, config.phi)?;
    let target_fidelity = target.inner_product(&conditional)?.norm_sqr();

    let mirrored_conditional = mirrored.conditional.remap(basis.registry())?;
    let mirrored_target = branch_target(&basis, config, config.phi + std::f64::consts::PI)?;
    let mirrored_fidelity = mirrored_target.inner_product(&mirrored_conditional)?.norm_sqr();

    let decomposition = basis.decompose(&conditional)?;

    Ok(HeraldReport {
        config: *config,
        accept_probability: accept.probability,
        conditional,
        target,
        target_fidelity,
        mirrored_probability: mirrored.probability,
        mirrored_fidelity,
        decomposition,
        all_outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accept_probability_is_exactly_one_thirty_second() {
        for (theta, phi) in [(0.0, 0.0), (0.7, 1.1), (FRAC_PI_4, -2.3), (1.4, 0.4)] {
            let report = hnsg_run(&HnsgConfig::new(theta, phi)).unwrap();
            assert!(
                (report.accept_probability - 1.0 / 32.0).abs() < 1e-12,
                "theta={theta} phi={phi}: p={}",
                report.accept_probability
            );
            assert!(report.target_fidelity > 1.0 - 1e-12);
        }
    }

    #[test]
    fn mirrored_branch_carries_the_advanced_phase() {
        let report = hnsg_run(&HnsgConfig::new(0.9, 0.3)).unwrap();
        assert!((report.mirrored_probability - 1.0 / 32.0).abs() < 1e-12);
        assert!(report.mirrored_fidelity > 1.0 - 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let report = hnsg_run(&HnsgConfig::new(0.3, 0.8)).unwrap();
        let total: f64 = report.all_outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_branches_have_pure_decompositions() {
        // theta = 0 heralds |2; 1> exactly.
        let report = hnsg_run(&HnsgConfig::new(0.0, 0.0)).unwrap();
        let probs = report.decomposition.probabilities();
        assert!(probs[0].abs() < 1e-12);
        assert!(probs[1].abs() < 1e-12);
        assert!((probs[2] - 1.0).abs() < 1e-12);
        assert!(report.decomposition.residual < 1e-10);
    }

    #[test]
    fn generic_angles_set_the_logical_weights() {
        let theta = 0.6f64;
        let report = hnsg_run(&HnsgConfig::new(theta, 1.9)).unwrap();
        let probs = report.decomposition.probabilities();
        assert!((probs[1] - theta.sin().powi(2)).abs() < 1e-12);
        assert!((probs[2] - theta.cos().powi(2)).abs() < 1e-12);
        assert!(report.decomposition.residual < 1e-10);
    }

    #[test]
    fn qutrit_zero_configuration_heralds_logical_zero() {
        let report = hnsg_run(&HnsgConfig::qutrit_zero()).unwrap();
        assert!((report.accept_probability - 1.0 / 32.0).abs() < 1e-12);
        assert!(report.target_fidelity > 1.0 - 1e-12);
        let probs = report.decomposition.probabilities();
        assert!((probs[0] - 1.0).abs() < 1e-12);
        let basis = LogicalBasis::new(OUTPUT_RAILS).unwrap();
        let overlap = basis
            .state(0, 1)
            .inner_product(&report.conditional)
            .unwrap();
        assert!((overlap.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
