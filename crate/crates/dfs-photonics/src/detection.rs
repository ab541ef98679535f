//! Photon-number-resolving detection in the rectilinear or diagonal
//! polarization basis.
//!
//! A detector claims one rail and a measurement basis. Measuring a state
//! over a set of detectors partitions it into *detection patterns* — the
//! joint photon counts seen by every detector — each with a Born
//! probability and a normalized conditional state on the undetected rails.
//!
//! Diagonal-basis detectors are modeled by rotating the detector rail with
//! the fixed basis change (so `F` maps onto the first count slot and `S`
//! onto the second) before counting; undetected rails are untouched by the
//! rotation, so conditional states remain expressed in the registry basis.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::elements::OpticalElement;
use crate::error::{Error, Result};
use crate::fock::{Complex64, FockState, ModeRegistry, Pol};

/// Patterns with probability below this threshold are treated as
/// impossible by [`herald`].
pub const ZERO_PROBABILITY_THRESHOLD: f64 = 1e-20;

/// The measurement basis of one detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MeasBasis {
    /// Count photons in the `{H, V}` basis.
    Hv,
    /// Count photons in the `{F, S}` basis.
    Fs,
}

impl MeasBasis {
    /// Canonical serialized name.
    pub fn as_str(self) -> &'static str {
        match self {
            MeasBasis::Hv => "HV",
            MeasBasis::Fs => "FS",
        }
    }

    /// Parse a canonical serialized name.
    pub fn parse(s: &str) -> Result<MeasBasis> {
        match s {
            "HV" => Ok(MeasBasis::Hv),
            "FS" => Ok(MeasBasis::Fs),
            other => Err(Error::Format {
                detail: format!("unknown measurement basis {other:?}"),
            }),
        }
    }

    /// Single-letter labels for the two count slots.
    pub fn slot_labels(self) -> [char; 2] {
        match self {
            MeasBasis::Hv => ['H', 'V'],
            MeasBasis::Fs => ['F', 'S'],
        }
    }
}

impl fmt::Display for MeasBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A photon-number-resolving detector on one rail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorSpec {
    /// The rail the detector terminates.
    pub rail: String,
    /// The basis in which it counts.
    pub basis: MeasBasis,
}

impl DetectorSpec {
    /// Convenience constructor.
    pub fn new(rail: impl Into<String>, basis: MeasBasis) -> DetectorSpec {
        DetectorSpec {
            rail: rail.into(),
            basis,
        }
    }
}

/// The counts one detector registered: `counts[0]` photons in the first
/// basis slot (`H` or `F`), `counts[1]` in the second (`V` or `S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternEntry {
    /// Basis the counts refer to.
    pub basis: MeasBasis,
    /// Photon counts per basis slot.
    pub counts: [u8; 2],
}

impl PatternEntry {
    /// Total photons this detector saw.
    pub fn total(&self) -> u32 {
        self.counts[0] as u32 + self.counts[1] as u32
    }

    fn label(&self) -> String {
        if self.total() == 0 {
            return "0".to_string();
        }
        let [a, b] = self.basis.slot_labels();
        let mut parts = Vec::new();
        for (nth, letter) in [(self.counts[0], a), (self.counts[1], b)] {
            match nth {
                0 => {}
                1 => parts.push(letter.to_string()),
                n => parts.push(format!("{n}{letter}")),
            }
        }
        parts.join("+")
    }
}

/// A joint detection pattern: each detector rail mapped to its counts.
/// Ordered and hashable so outcome listings are deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DetectionPattern {
    entries: BTreeMap<String, PatternEntry>,
}

impl DetectionPattern {
    /// Build a pattern from `(rail, entry)` pairs.
    pub fn new(entries: impl IntoIterator<Item = (String, PatternEntry)>) -> DetectionPattern {
        DetectionPattern {
            entries: entries.into_iter().collect(),
        }
    }

    /// The counts for `rail`, if that rail is part of the pattern.
    pub fn entry(&self, rail: &str) -> Option<&PatternEntry> {
        self.entries.get(rail)
    }

    /// Iterate entries in rail order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &PatternEntry)> {
        self.entries.iter().map(|(r, e)| (r.as_str(), e))
    }

    /// Number of detectors in the pattern.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when the pattern covers no detectors.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total photons across all detectors.
    pub fn total_photons(&self) -> u32 {
        self.entries.values().map(|e| e.total()).sum()
    }

    /// JSON object `{rail: {"basis": ..., "counts": [h, v]}}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (rail, entry) in &self.entries {
            map.insert(
                rail.clone(),
                json!({
                    "basis": entry.basis.as_str(),
                    "counts": [entry.counts[0], entry.counts[1]],
                }),
            );
        }
        Value::Object(map)
    }

    /// Parse the JSON object form produced by [`DetectionPattern::to_json`].
    pub fn from_json(value: &Value) -> Result<DetectionPattern> {
        let obj = value.as_object().ok_or_else(|| Error::Format {
            detail: "pattern must be an object keyed by rail".to_string(),
        })?;
        let mut entries = BTreeMap::new();
        for (rail, entry) in obj {
            let basis = MeasBasis::parse(entry["basis"].as_str().ok_or_else(|| Error::Format {
                detail: format!("pattern entry for rail {rail:?} lacks a basis"),
            })?)?;
            let counts = entry["counts"].as_array().ok_or_else(|| Error::Format {
                detail: format!("pattern entry for rail {rail:?} lacks counts"),
            })?;
            if counts.len() != 2 {
                return Err(Error::Format {
                    detail: format!("pattern counts for rail {rail:?} must have two slots"),
                });
            }
            let slot = |i: usize| -> Result<u8> {
                counts[i]
                    .as_u64()
                    .filter(|&n| n <= u8::MAX as u64)
                    .map(|n| n as u8)
                    .ok_or_else(|| Error::Format {
                        detail: format!("pattern counts for rail {rail:?} must be small non-negative integers"),
                    })
            };
            entries.insert(
                rail.clone(),
                PatternEntry {
                    basis,
                    counts: [slot(0)?, slot(1)?],
                },
            );
        }
        Ok(DetectionPattern { entries })
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (rail, entry) in &self.entries {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{rail}={}", entry.label())?;
        }
        Ok(())
    }
}

/// One branch of a measurement: the observed pattern, its Born
/// probability, and the normalized state of the undetected rails.
#[derive(Debug, Clone)]
pub struct DetectionOutcome {
    /// Joint counts across all detectors.
    pub pattern: DetectionPattern,
    /// Born probability of observing this pattern.
    pub probability: f64,
    /// Normalized post-measurement state with detector rails emptied.
    pub conditional: FockState,
}

impl DetectionOutcome {
    /// JSON object with the pattern, probability, and conditional state.
    pub fn to_json(&self) -> Value {
        json!({
            "pattern": self.pattern.to_json(),
            "probability": self.probability,
            "conditional": self.conditional.to_json(),
        })
    }
}

fn detector_validated<'d>(
    registry: &ModeRegistry,
    detectors: &'d [DetectorSpec],
) -> Result<Vec<(&'d DetectorSpec, usize, usize)>> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = Vec::with_capacity(detectors.len());
    for d in detectors {
        if seen.contains(&d.rail.as_str()) {
            return Err(Error::DuplicateRail {
                rail: d.rail.clone(),
            });
        }
        seen.push(&d.rail);
        let h = registry.mode_index(&d.rail, Pol::H)?;
        out.push((d, h, h + 1));
    }
    Ok(out)
}

/// Rotate every diagonal-basis detector rail so its `F`/`S` components sit
/// on the first/second count slots.
fn rotate_for_counting(state: &FockState, detectors: &[DetectorSpec]) -> Result<FockState> {
    let registry = state.registry();
    let s = 0.5f64.sqrt();
    // Adjoint of the fixed F/S basis change: maps F to the first slot and
    // S to the second.
    let c_dag = [
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(s, 0.0)],
    ];
    let mut rotated = state.clone();
    for d in detectors {
        if d.basis == MeasBasis::Fs {
            let rot = OpticalElement::single_rail(registry, &d.rail, c_dag)?;
            rotated = rot.apply(&rotated)?;
        }
    }
    Ok(rotated)
}

/// Enumerate every detection pattern with nonzero weight, together with
/// its probability and conditional state. Patterns are returned in their
/// canonical order; probabilities sum to the squared norm of `state`.
pub fn enumerate_outcomes(state: &FockState, detectors: &[DetectorSpec]) -> Result<Vec<DetectionOutcome>> {
    let registry = state.registry();
    let slots = detector_validated(registry, detectors)?;
    let rotated = rotate_for_counting(state, detectors)?;

    let mut groups: BTreeMap<DetectionPattern, BTreeMap<crate::fock::Occ, Complex64>> = BTreeMap::new();
    for (&occ, &amp) in &rotated.terms {
        let mut entries = BTreeMap::new();
        let mut cleared = occ;
        for (d, slot_a, slot_b) in &slots {
            entries.insert(
                d.rail.clone(),
                PatternEntry {
                    basis: d.basis,
                    counts: [occ.get(*slot_a), occ.get(*slot_b)],
                },
            );
            cleared = cleared.with(*slot_a, 0).with(*slot_b, 0);
        }
        let pattern = DetectionPattern { entries };
        *groups
            .entry(pattern)
            .or_default()
            .entry(cleared)
            .or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
    }

    let mut outcomes = Vec::with_capacity(groups.len());
    for (pattern, terms) in groups {
        let branch = FockState::from_terms(registry, terms);
        let probability = branch.norm_sq();
        if probability < ZERO_PROBABILITY_THRESHOLD {
            continue;
        }
        outcomes.push(DetectionOutcome {
            pattern,
            probability,
            conditional: branch.normalized()?,
        });
    }
    Ok(outcomes)
}

/// Project onto a single detection pattern. Every detector must have an
/// entry in `pattern` whose basis matches the detector's. Returns
/// [`Error::ZeroProbabilityPattern`] when the pattern carries no weight.
pub fn herald(
    state: &FockState,
    detectors: &[DetectorSpec],
    pattern: &DetectionPattern,
) -> Result<DetectionOutcome> {
    let registry = state.registry();
    let slots = detector_validated(registry, detectors)?;
    if pattern.len() != detectors.len() {
        return Err(Error::Format {
            detail: format!(
                "pattern covers {} rails but the circuit has {} detectors",
                pattern.len(),
                detectors.len()
            ),
        });
    }
    for (d, _, _) in &slots {
        match pattern.entry(&d.rail) {
            Some(entry) if entry.basis == d.basis => {}
            Some(entry) => {
                return Err(Error::Format {
                    detail: format!(
                        "pattern basis {} for rail {:?} does not match detector basis {}",
                        entry.basis, d.rail, d.basis
                    ),
                })
            }
            None => {
                return Err(Error::Format {
                    detail: format!("pattern lacks an entry for detector rail {:?}", d.rail),
                })
            }
        }
    }
    let rotated = rotate_for_counting(state, detectors)?;
    let mut terms: BTreeMap<crate::fock::Occ, Complex64> = BTreeMap::new();
    'term: for (&occ, &amp) in &rotated.terms {
        let mut cleared = occ;
        for (d, slot_a, slot_b) in &slots {
            let want = pattern.entry(&d.rail).expect("validated above");
            if occ.get(*slot_a) != want.counts[0] || occ.get(*slot_b) != want.counts[1] {
                continue 'term;
            }
            cleared = cleared.with(*slot_a, 0).with(*slot_b, 0);
        }
        *terms
            .entry(cleared)
            .or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
    }
    let branch = FockState::from_terms(registry, terms);
    let probability = branch.norm_sq();
    if probability < ZERO_PROBABILITY_THRESHOLD {
        return Err(Error::ZeroProbabilityPattern);
    }
    Ok(DetectionOutcome {
        pattern: pattern.clone(),
        probability,
        conditional: branch.normalized()?,
    })
}
