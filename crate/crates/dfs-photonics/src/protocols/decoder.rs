//! Passive Bell-sign decoder for the four-photon code.
//!
//! Each pair of neighbouring code rails enters a reflective rectilinear
//! splitter followed by a balanced splitter and per-polarization
//! demultiplexers onto four photon counters. The interference makes the
//! antisymmetric Bell state `psi-` the only input that produces a
//! one-photon coincidence between the two counter pairs `(t1, t2)` /
//! `(t3, t4)`; every symmetric two-photon state lands on a disjoint set
//! of counter patterns. Classifying which half saw the antisymmetric
//! signature reads out the logical label of any code state without
//! touching a shared reference frame:
//!
//! * antisymmetric signature on the *bottom* pair — logical one,
//! * antisymmetric signature on the *top* pair — logical two,
//! * neither — logical zero.
//!
//! The pattern tables are calibrated operationally, by running the four
//! reference pair states through the physical circuit, rather than
//! hard-coding which counters fire.

use std::collections::BTreeMap;
use std::fmt;

use crate::circuit::{build_input, BellKind, Circuit, ElementSpec, InputPart, SinglePol};
use crate::detection::{DetectionPattern, DetectorSpec, MeasBasis};
use crate::elements::ElementKind;
use crate::error::{Error, Result};
use crate::fock::FockState;

/// The four code rails the decoder consumes, in code order.
pub const INPUT_RAILS: [&str; 4] = ["o1", "o2", "o3", "o4"];
/// Counter rails watching the top pair (`o1`, `o2`).
pub const TOP_COUNTERS: [&str; 4] = ["t1", "t2", "t3", "t4"];
/// Counter rails watching the bottom pair (`o3`, `o4`).
pub const BOTTOM_COUNTERS: [&str; 4] = ["b1", "b2", "b3", "b4"];

/// The decoder circuit: two independent Bell-sign analyzers.
pub fn decoder_circuit() -> Result<Circuit> {
    let elements = vec![
        ElementSpec::four_port(ElementKind::HvPbs, "o1", "o2", "o1", "o2"),
        ElementSpec::four_port(ElementKind::Bs5050, "o1", "o2", "o1", "o2"),
        ElementSpec::split(ElementKind::HvSplit, "o1", "t2", "t1"),
        ElementSpec::split(ElementKind::HvSplit, "o2", "t3", "t4"),
        ElementSpec::four_port(ElementKind::HvPbs, "o3", "o4", "o3", "o4"),
        ElementSpec::four_port(ElementKind::Bs5050, "o3", "o4", "o3", "o4"),
        ElementSpec::split(ElementKind::HvSplit, "o3", "b2", "b1"),
        ElementSpec::split(ElementKind::HvSplit, "o4", "b3", "b4"),
    ];
    let detectors = TOP_COUNTERS
        .iter()
        .chain(BOTTOM_COUNTERS.iter())
        .map(|rail| DetectorSpec::new(*rail, MeasBasis::Hv))
        .collect();
    Circuit::new(
        &[
            "o1", "o2", "o3", "o4", "t1", "t2", "t3", "t4", "b1", "b2", "b3", "b4",
        ],
        elements,
        detectors,
    )
}

/// Exchange signature of a two-photon pair state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSig {
    /// The antisymmetric Bell state.
    Singlet,
    /// Any symmetric two-photon state.
    Triplet,
}

/// Calibrated mapping from counter patterns to pair signatures, one table
/// per analyzer half.
#[derive(Debug, Clone)]
pub struct PatternTable {
    top: BTreeMap<DetectionPattern, PairSig>,
    bottom: BTreeMap<DetectionPattern, PairSig>,
}

fn restrict(pattern: &DetectionPattern, rails: &[&str]) -> DetectionPattern {
    DetectionPattern::new(rails.iter().map(|rail| {
        let entry = pattern
            .entry(rail)
            .expect("counter rails are always present in decoder patterns");
        (rail.to_string(), *entry)
    }))
}

impl PatternTable {
    /// Run the four reference pair states through each analyzer half and
    /// record which counter patterns they produce.
    pub fn calibrate(circuit: &Circuit) -> Result<PatternTable> {
        let mut top = BTreeMap::new();
        let mut bottom = BTreeMap::new();
        for (pair, counters, table) in [
            (["o1", "o2"], &TOP_COUNTERS, &mut top),
            (["o3", "o4"], &BOTTOM_COUNTERS, &mut bottom),
        ] {
            let references: [(Vec<InputPart>, PairSig); 4] = [
                (
                    vec![InputPart::Bell {
                        kind: BellKind::PsiMinus,
                        rails: [pair[0].to_string(), pair[1].to_string()],
                    }],
                    PairSig::Singlet,
                ),
                (
                    vec![InputPart::Bell {
                        kind: BellKind::PsiPlus,
                        rails: [pair[0].to_string(), pair[1].to_string()],
                    }],
                    PairSig::Triplet,
                ),
                (
                    vec![
                        InputPart::Single {
                            rail: pair[0].to_string(),
                            pol: SinglePol::V,
                        },
                        InputPart::Single {
                            rail: pair[1].to_string(),
                            pol: SinglePol::V,
                        },
                    ],
                    PairSig::Triplet,
                ),
                (
                    vec![
                        InputPart::Single {
                            rail: pair[0].to_string(),
                            pol: SinglePol::H,
                        },
                        InputPart::Single {
                            rail: pair[1].to_string(),
                            pol: SinglePol::H,
                        },
                    ],
                    PairSig::Triplet,
                ),
            ];
            for (parts, sig) in references {
                let input = build_input(circuit.registry(), &parts)?;
                for outcome in circuit.measure(&input)? {
                    let half = restrict(&outcome.pattern, counters.as_slice());
                    if let Some(prev) = table.insert(half, sig) {
                        if prev != sig {
                            return Err(Error::Format {
                                detail: "analyzer pattern shared between exchange signatures"
                                    .to_string(),
                            });
                        }
                    }
                }
            }
        }
        Ok(PatternTable { top, bottom })
    }

    /// The top-half table.
    pub fn top(&self) -> &BTreeMap<DetectionPattern, PairSig> {
        &self.top
    }

    /// The bottom-half table.
    pub fn bottom(&self) -> &BTreeMap<DetectionPattern, PairSig> {
        &self.bottom
    }
}

/// Decoder verdict for one counter pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VerdictLabel {
    /// Both halves symmetric.
    Zero,
    /// Bottom half antisymmetric.
    One,
    /// Top half antisymmetric.
    Two,
    /// Pattern outside the calibrated tables.
    Reject,
}

impl VerdictLabel {
    /// Stable lowercase name.
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictLabel::Zero => "zero",
            VerdictLabel::One => "one",
            VerdictLabel::Two => "two",
            VerdictLabel::Reject => "reject",
        }
    }
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One decoding outcome: the full counter pattern, its probability, and
/// the verdict it maps to.
#[derive(Debug, Clone)]
pub struct DecodeEvent {
    /// Verdict assigned by the calibrated tables.
    pub label: VerdictLabel,
    /// The full eight-counter pattern.
    pub pattern: DetectionPattern,
    /// Probability of seeing this pattern.
    pub probability: f64,
}

fn verdict_for(top: Option<PairSig>, bottom: Option<PairSig>) -> VerdictLabel {
    match (top, bottom) {
        (Some(PairSig::Triplet), Some(PairSig::Singlet)) => VerdictLabel::One,
        (Some(PairSig::Singlet), Some(PairSig::Triplet)) => VerdictLabel::Two,
        (Some(PairSig::Triplet), Some(PairSig::Triplet)) => VerdictLabel::Zero,
        _ => VerdictLabel::Reject,
    }
}

/// Run a four-rail state through the decoder and classify every counter
/// pattern. The state's rails must be named like [`INPUT_RAILS`]; any
/// registry carrying those rails is accepted.
pub fn decode(circuit: &Circuit, table: &PatternTable, state: &FockState) -> Result<Vec<DecodeEvent>> {
    let embedded = state.remap(circuit.registry())?;
    let outcomes = circuit.measure(&embedded)?;
    Ok(outcomes
        .into_iter()
        .map(|outcome| {
            let top = table
                .top
                .get(&restrict(&outcome.pattern, TOP_COUNTERS.as_slice()))
                .copied();
            let bottom = table
                .bottom
                .get(&restrict(&outcome.pattern, BOTTOM_COUNTERS.as_slice()))
                .copied();
            DecodeEvent {
                label: verdict_for(top, bottom),
                pattern: outcome.pattern,
                probability: outcome.probability,
            }
        })
        .collect())
}

/// Total probability per verdict, indexed `[zero, one, two, reject]`.
pub fn verdict_totals(events: &[DecodeEvent]) -> [f64; 4] {
    let mut totals = [0.0; 4];
    for event in events {
        let slot = match event.label {
            VerdictLabel::Zero => 0,
            VerdictLabel::One => 1,
            VerdictLabel::Two => 2,
            VerdictLabel::Reject => 3,
        };
        totals[slot] += event.probability;
    }
    totals
}
