//! Sparse multi-photon bosonic states over polarization-resolved spatial
//! modes.
//!
//! A photonic circuit is described by a set of named spatial *rails*
//! (`"m1"`, `"a4"`, `"d1"`, ...), each of which carries two bosonic modes:
//! one for horizontal (`H`) and one for vertical (`V`) polarization. The
//! diagonal polarizations `F = (H + V)/sqrt(2)` and `S = (V - H)/sqrt(2)`
//! are superpositions of those modes, not separate modes.
//!
//! A [`FockState`] is a sparse association from photon-occupation vectors to
//! complex amplitudes. All stored amplitudes are double precision; the
//! circuits handled here are shallow enough that every documented check
//! passes at `1e-10` without symbolic arithmetic.
//!
//! ```
//! use dfs_photonics::fock::{ModeRegistry, FockState, Pol};
//!
//! let reg = ModeRegistry::from_rails(&["a", "b"]).unwrap();
//! // |psi-> = (|V_a H_b> - |H_a V_b>)/sqrt(2)
//! let vh = FockState::vacuum(&reg)
//!     .add_photon("a", Pol::V).unwrap()
//!     .add_photon("b", Pol::H).unwrap();
//! let hv = FockState::vacuum(&reg)
//!     .add_photon("a", Pol::H).unwrap()
//!     .add_photon("b", Pol::V).unwrap();
//! let psi_minus = vh.scaled((0.5f64.sqrt()).into())
//!     .plus(&hv.scaled((-(0.5f64.sqrt())).into())).unwrap();
//! assert!((psi_minus.norm() - 1.0).abs() < 1e-12);
//! ```
//!
//! States are immutable values: every operation returns a new state, so they
//! can be shared freely between threads.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};

/// Double-precision complex amplitude.
pub type Complex64 = Complex<f64>;

/// Largest number of rails a registry may hold (two modes per rail, with
/// each occupation count packed into four bits of a `u128`).
pub const MAX_RAILS: usize = 16;

/// Default total-photon cap for a registry. The largest circuit in this
/// crate carries six photons; the cap guards against combinatorial blowup
/// from misuse, not against any physical limit.
pub const DEFAULT_PHOTON_CAP: u32 = 8;

/// Default amplitude prune threshold. Terms whose magnitude falls below this
/// after an optical element are artifacts of destructive interference and
/// are dropped.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;

/// Tolerance within which a state counts as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest occupation count a single mode may hold (4-bit packing).
const MAX_COUNT: u8 = 15;

/// Polarization label of a rectilinear mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    /// Horizontal.
    H,
    /// Vertical.
    V,
}

impl Pol {
    /// Index of the polarization within a rail's mode pair.
    pub fn offset(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    /// The canonical one-letter name.
    pub fn as_str(self) -> &'static str {
        match self {
            Pol::H => "H",
            Pol::V => "V",
        }
    }

    /// Parse `"H"` or `"V"`.
    pub fn parse(s: &str) -> Result<Pol> {
        match s {
            "H" => Ok(Pol::H),
            "V" => Ok(Pol::V),
            other => Err(Error::Format {
                detail: format!("polarization must be \"H\" or \"V\", got {other:?}"),
            }),
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered declaration of the spatial rails of one circuit.
///
/// Every `(rail, polarization)` pair maps to a unique dense mode index:
/// rail `r` owns indices `2r` (`H`) and `2r + 1` (`V`). The registry is
/// immutable after construction, so indices never change once the first
/// state over it exists.
#[derive(Debug, PartialEq, Eq)]
pub struct ModeRegistry {
    rails: Vec<String>,
    photon_cap: u32,
}

impl ModeRegistry {
    /// Build a registry over the given rails with the default photon cap.
    pub fn from_rails<S: AsRef<str>>(rails: &[S]) -> Result<Arc<ModeRegistry>> {
        Self::with_photon_cap(rails, DEFAULT_PHOTON_CAP)
    }

    /// Build a registry with an explicit total-photon cap.
    pub fn with_photon_cap<S: AsRef<str>>(rails: &[S], photon_cap: u32) -> Result<Arc<ModeRegistry>> {
        if rails.is_empty() {
            return Err(Error::Format {
                detail: "registry needs at least one rail".into(),
            });
        }
        if rails.len() > MAX_RAILS {
            return Err(Error::TooManyRails {
                count: rails.len(),
                max: MAX_RAILS,
            });
        }
        let mut seen = Vec::with_capacity(rails.len());
        for r in rails {
            let r = r.as_ref();
            if seen.iter().any(|s: &String| s == r) {
                return Err(Error::DuplicateRail { rail: r.to_string() });
            }
            seen.push(r.to_string());
        }
        Ok(Arc::new(ModeRegistry {
            rails: seen,
            photon_cap,
        }))
    }

    /// The rails, in declaration order.
    pub fn rails(&self) -> &[String] {
        &self.rails
    }

    /// Number of registered modes (two per rail).
    pub fn n_modes(&self) -> usize {
        self.rails.len() * 2
    }

    /// The registry's total-photon cap.
    pub fn photon_cap(&self) -> u32 {
        self.photon_cap
    }

    /// Position of a rail in the declaration order.
    pub fn rail_index(&self, rail: &str) -> Result<usize> {
        self.rails
            .iter()
            .position(|r| r == rail)
            .ok_or_else(|| Error::UnknownRail { rail: rail.to_string() })
    }

    /// Dense index of the `(rail, pol)` mode.
    pub fn mode_index(&self, rail: &str, pol: Pol) -> Result<usize> {
        Ok(self.rail_index(rail)? * 2 + pol.offset())
    }

    /// Rail label and polarization of a dense mode index.
    pub fn mode_at(&self, index: usize) -> (&str, Pol) {
        let pol = if index.is_multiple_of(2) { Pol::H } else { Pol::V };
        (&self.rails[index / 2], pol)
    }
}

/// Packed occupation vector: mode `i` occupies bits `4i..4i+4` of a `u128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Occ(pub(crate) u128);

impl Occ {
    pub(crate) const EMPTY: Occ = Occ(0);

    pub(crate) fn get(self, mode: usize) -> u8 {
        ((self.0 >> (4 * mode)) & 0xF) as u8
    }

    pub(crate) fn with(self, mode: usize, count: u8) -> Occ {
        debug_assert!(count <= MAX_COUNT);
        let shift = 4 * mode;
        Occ((self.0 & !(0xFu128 << shift)) | ((count as u128) << shift))
    }

    pub(crate) fn total(self) -> u32 {
        let mut x = self.0;
        let mut sum = 0u32;
        while x != 0 {
            sum += (x & 0xF) as u32;
            x >>= 4;
        }
        sum
    }

    pub(crate) fn to_counts(self, n_modes: usize) -> Vec<u8> {
        (0..n_modes).map(|m| self.get(m)).collect()
    }

    pub(crate) fn from_counts(counts: &[u8]) -> Result<Occ> {
        let mut occ = Occ::EMPTY;
        for (m, &c) in counts.iter().enumerate() {
            if c > MAX_COUNT {
                return Err(Error::Format {
                    detail: format!("occupation count {c} exceeds the per-mode maximum {MAX_COUNT}"),
                });
            }
            occ = occ.with(m, c);
        }
        Ok(occ)
    }
}

/// Sparse association from occupation vectors to complex amplitudes.
///
/// A state is tied to the [`ModeRegistry`] it was built over; operations on
/// two states require structurally equal registries. States are pure values:
/// every method returns a new state.
#[derive(Debug, Clone)]
pub struct FockState {
    registry: Arc<ModeRegistry>,
    pub(crate) terms: BTreeMap<Occ, Complex64>,
}

impl FockState {
    /// The vacuum: a single all-zero occupation with amplitude one.
    pub fn vacuum(registry: &Arc<ModeRegistry>) -> FockState {
        let mut terms = BTreeMap::new();
        terms.insert(Occ::EMPTY, Complex64::new(1.0, 0.0));
        FockState {
            registry: Arc::clone(registry),
            terms,
        }
    }

    /// A state with no terms at all (the zero vector, not the vacuum).
    pub fn zero(registry: &Arc<ModeRegistry>) -> FockState {
        FockState {
            registry: Arc::clone(registry),
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn from_terms(registry: &Arc<ModeRegistry>, terms: BTreeMap<Occ, Complex64>) -> FockState {
        FockState {
            registry: Arc::clone(registry),
            terms,
        }
    }

    /// The registry this state was built over.
    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    /// Number of stored terms.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate over `(occupation counts, amplitude)` pairs in a fixed order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u8>, Complex64)> + '_ {
        let n = self.registry.n_modes();
        self.terms.iter().map(move |(occ, amp)| (occ.to_counts(n), *amp))
    }

    /// Amplitude of one occupation vector (zero if absent).
    pub fn amplitude(&self, counts: &[u8]) -> Result<Complex64> {
        if counts.len() != self.registry.n_modes() {
            return Err(Error::Format {
                detail: format!(
                    "occupation vector has {} entries, registry has {} modes",
                    counts.len(),
                    self.registry.n_modes()
                ),
            });
        }
        let occ = Occ::from_counts(counts)?;
        Ok(self.terms.get(&occ).copied().unwrap_or_default())
    }

    /// Apply one creation operator: each term's occupation at `(rail, pol)`
    /// is incremented and its amplitude multiplied by the bosonic
    /// `sqrt(n + 1)` factor. The result is *not* re-normalized.
    pub fn add_photon(&self, rail: &str, pol: Pol) -> Result<FockState> {
        let mode = self.registry.mode_index(rail, pol)?;
        let cap = self.registry.photon_cap;
        let mut terms = BTreeMap::new();
        for (&occ, &amp) in &self.terms {
            if occ.total() + 1 > cap {
                return Err(Error::PhotonCapExceeded { cap });
            }
            let n = occ.get(mode);
            if n >= MAX_COUNT {
                return Err(Error::PhotonCapExceeded { cap });
            }
            let next = occ.with(mode, n + 1);
            let factor = ((n as f64) + 1.0).sqrt();
            *terms.entry(next).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp * factor;
        }
        Ok(FockState {
            registry: Arc::clone(&self.registry),
            terms,
        })
    }

    /// Rails that carry at least one photon in at least one term.
    pub fn occupied_rails(&self) -> Vec<String> {
        let mut mask = vec![false; self.registry.rails.len()];
        for occ in self.terms.keys() {
            for (r, flag) in mask.iter_mut().enumerate() {
                if occ.get(2 * r) > 0 || occ.get(2 * r + 1) > 0 {
                    *flag = true;
                }
            }
        }
        self.registry
            .rails
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(r, _)| r.clone())
            .collect()
    }

    /// Tensor product of two states over the *same* registry whose occupied
    /// rails are disjoint: amplitudes multiply and occupations merge.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let mine = self.occupied_rails();
        for rail in other.occupied_rails() {
            if mine.contains(&rail) {
                return Err(Error::OverlappingRails { rail });
            }
        }
        let cap = self.registry.photon_cap;
        let mut terms = BTreeMap::new();
        for (&oa, &aa) in &self.terms {
            for (&ob, &ab) in &other.terms {
                let merged = Occ(oa.0 | ob.0);
                if merged.total() > cap {
                    return Err(Error::PhotonCapExceeded { cap });
                }
                *terms.entry(merged).or_insert_with(|| Complex64::new(0.0, 0.0)) += aa * ab;
            }
        }
        Ok(FockState {
            registry: Arc::clone(&self.registry),
            terms,
        })
    }

    /// `<self|other>`: conjugate-linear in `self`, linear in `other`.
    pub fn inner_product(&self, other: &FockState) -> Result<Complex64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        // Iterate over the smaller term map.
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms, true)
        } else {
            (&other.terms, &self.terms, false)
        };
        for (occ, amp) in small {
            if let Some(other_amp) = large.get(occ) {
                sum += if conj_small {
                    amp.conj() * other_amp
                } else {
                    other_amp.conj() * amp
                };
            }
        }
        Ok(sum)
    }

    /// Squared norm.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Whether the squared norm is within [`NORM_TOLERANCE`] of one.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() < NORM_TOLERANCE
    }

    /// The state scaled to unit norm.
    pub fn normalized(&self) -> Result<FockState> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// The state with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> FockState {
        FockState {
            registry: Arc::clone(&self.registry),
            terms: self.terms.iter().map(|(&o, &a)| (o, a * factor)).collect(),
        }
    }

    /// Term-wise sum of two states over the same registry.
    pub fn plus(&self, other: &FockState) -> Result<FockState> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut terms = self.terms.clone();
        for (&occ, &amp) in &other.terms {
            *terms.entry(occ).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(FockState {
            registry: Arc::clone(&self.registry),
            terms,
        })
    }

    /// Drop every term with `|amplitude| < threshold`.
    pub fn prune(&self, threshold: f64) -> FockState {
        FockState {
            registry: Arc::clone(&self.registry),
            terms: self
                .terms
                .iter()
                .filter(|(_, a)| a.norm() >= threshold)
                .map(|(&o, &a)| (o, a))
                .collect(),
        }
    }

    /// Total photon number if every term agrees on it, `None` otherwise
    /// (or for the zero state).
    pub fn uniform_photon_number(&self) -> Option<u32> {
        let mut iter = self.terms.keys();
        let first = iter.next()?.total();
        iter.all(|occ| occ.total() == first).then_some(first)
    }

    /// Re-express the state over another registry, matching modes by
    /// `(rail, polarization)` name. Every occupied rail must exist in the
    /// target registry; rails that only the target knows stay empty.
    pub fn remap(&self, target: &Arc<ModeRegistry>) -> Result<FockState> {
        if *target == self.registry {
            return Ok(FockState {
                registry: Arc::clone(target),
                terms: self.terms.clone(),
            });
        }
        // Mode translation table; unoccupied missing rails are tolerated.
        let n = self.registry.n_modes();
        let mut table: Vec<Option<usize>> = Vec::with_capacity(n);
        for m in 0..n {
            let (rail, pol) = self.registry.mode_at(m);
            table.push(target.mode_index(rail, pol).ok());
        }
        let cap = target.photon_cap;
        let mut terms = BTreeMap::new();
        for (&occ, &amp) in &self.terms {
            let mut out = Occ::EMPTY;
            for (m, slot) in table.iter().enumerate() {
                let c = occ.get(m);
                if c == 0 {
                    continue;
                }
                match slot {
                    Some(t) => out = out.with(*t, c),
                    None => {
                        let (rail, _) = self.registry.mode_at(m);
                        return Err(Error::UnknownRail { rail: rail.to_string() });
                    }
                }
            }
            if out.total() > cap {
                return Err(Error::PhotonCapExceeded { cap });
            }
            *terms.entry(out).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(FockState {
            registry: Arc::clone(target),
            terms,
        })
    }

    /// Serialize to the project state schema:
    /// `{"modes": [{"rail", "pol"}...], "terms": [{"occ", "re", "im"}...]}`.
    /// Occupation order follows the `modes` array exactly.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.registry.n_modes();
        let modes: Vec<serde_json::Value> = (0..n)
            .map(|m| {
                let (rail, pol) = self.registry.mode_at(m);
                serde_json::json!({ "rail": rail, "pol": pol.as_str() })
            })
            .collect();
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(occ, amp)| {
                serde_json::json!({
                    "occ": occ.to_counts(n),
                    "re": amp.re,
                    "im": amp.im,
                })
            })
            .collect();
        serde_json::json!({ "modes": modes, "terms": terms })
    }

    /// Deserialize from the project state schema. The file's mode order may
    /// be arbitrary; the reconstructed registry lists rails in order of
    /// first appearance, each with both polarizations.
    pub fn from_json(value: &serde_json::Value) -> Result<FockState> {
        let modes = value
            .get("modes")
            .and_then(|m| m.as_array())
            .ok_or_else(|| Error::Format {
                detail: "state object needs a \"modes\" array".into(),
            })?;
        let mut rails: Vec<String> = Vec::new();
        let mut file_modes: Vec<(String, Pol)> = Vec::with_capacity(modes.len());
        for m in modes {
            let rail = m
                .get("rail")
                .and_then(|r| r.as_str())
                .ok_or_else(|| Error::Format {
                    detail: "mode entry needs a string \"rail\"".into(),
                })?;
            let pol = Pol::parse(m.get("pol").and_then(|p| p.as_str()).unwrap_or(""))?;
            if file_modes.iter().any(|(r, p)| r == rail && *p == pol) {
                return Err(Error::Format {
                    detail: format!("mode ({rail}, {pol}) listed twice"),
                });
            }
            if !rails.iter().any(|r| r == rail) {
                rails.push(rail.to_string());
            }
            file_modes.push((rail.to_string(), pol));
        }
        let registry = ModeRegistry::from_rails(&rails)?;
        let terms_json = value
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::Format {
                detail: "state object needs a \"terms\" array".into(),
            })?;
        let mut terms = BTreeMap::new();
        for t in terms_json {
            let occ_json = t
                .get("occ")
                .and_then(|o| o.as_array())
                .ok_or_else(|| Error::Format {
                    detail: "term needs an \"occ\" array".into(),
                })?;
            if occ_json.len() != file_modes.len() {
                return Err(Error::Format {
                    detail: format!(
                        "term has {} occupation entries, file lists {} modes",
                        occ_json.len(),
                        file_modes.len()
                    ),
                });
            }
            let re = t.get("re").and_then(|x| x.as_f64()).ok_or_else(|| Error::Format {
                detail: "term needs a numeric \"re\"".into(),
            })?;
            let im = t.get("im").and_then(|x| x.as_f64()).ok_or_else(|| Error::Format {
                detail: "term needs a numeric \"im\"".into(),
            })?;
            let mut occ = Occ::EMPTY;
            let mut total = 0u64;
            for (entry, (rail, pol)) in occ_json.iter().zip(&file_modes) {
                let c = entry.as_u64().ok_or_else(|| Error::Format {
                    detail: "occupation counts must be non-negative integers".into(),
                })?;
                if c > MAX_COUNT as u64 {
                    return Err(Error::Format {
                        detail: format!("occupation count {c} exceeds the per-mode maximum {MAX_COUNT}"),
                    });
                }
                total += c;
                if c > 0 {
                    let mode = registry.mode_index(rail, *pol)?;
                    occ = occ.with(mode, c as u8);
                }
            }
            if total > registry.photon_cap() as u64 {
                return Err(Error::PhotonCapExceeded {
                    cap: registry.photon_cap(),
                });
            }
            let amp = Complex64::new(re, im);
            *terms.entry(occ).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(FockState { registry, terms })
    }

    /// Serialize to a pretty-printed JSON string.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("state JSON serialization cannot fail")
    }

    /// Parse a state from a JSON string.
    pub fn from_json_str(s: &str) -> Result<FockState> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        FockState::from_json(&value)
    }
}

impl fmt::Display for FockState {
    /// Render as a ket sum, e.g. `0.707107 |V_a H_b> - 0.707107 |H_a V_b>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (occ, amp) in &self.terms {
            let (lead, amp_str) = format_amplitude(*amp, first);
            write!(f, "{lead}{amp_str}")?;
            f.write_str(&format_ket(*occ, &self.registry))?;
            first = false;
        }
        Ok(())
    }
}

fn format_ket(occ: Occ, registry: &ModeRegistry) -> String {
    let mut parts = Vec::new();
    for m in 0..registry.n_modes() {
        let c = occ.get(m);
        if c == 0 {
            continue;
        }
        let (rail, pol) = registry.mode_at(m);
        if c == 1 {
            parts.push(format!("{pol}_{rail}"));
        } else {
            parts.push(format!("{c}x{pol}_{rail}"));
        }
    }
    if parts.is_empty() {
        "|vac>".to_string()
    } else {
        format!("|{}>", parts.join(" "))
    }
}

fn format_amplitude(amp: Complex64, first: bool) -> (&'static str, String) {
    let sep = if first { "" } else { " " };
    if amp.im.abs() < 1e-12 {
        if amp.re < 0.0 {
            (if first { "-" } else { " - " }, format!("{:.6} ", amp.re.abs()))
        } else {
            (if first { "" } else { " + " }, format!("{:.6} ", amp.re))
        }
    } else {
        (
            if first { "" } else { sep },
            format!("{}({:.6}{:+.6}i) ", if first { "" } else { "+ " }, amp.re, amp.im),
        )
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// A random sparse state over a fixed 3-rail registry.
    fn sparse_state() -> impl Strategy<Value = FockState> {
        let amp = (-1.0f64..1.0, -1.0f64..1.0);
        let occ = proptest::collection::vec(0u8..3, 6);
        proptest::collection::vec((occ, amp), 1..6).prop_map(|raw| {
            let reg = ModeRegistry::from_rails(&["a", "b", "c"]).unwrap();
            let mut state = FockState::zero(&reg);
            for (counts, (re, im)) in raw {
                if counts.iter().map(|&x| x as u32).sum::<u32>() > DEFAULT_PHOTON_CAP {
                    continue;
                }
                let occ = Occ::from_counts(&counts).unwrap();
                let mut term = std::collections::BTreeMap::new();
                term.insert(occ, c(re, im));
                state = state.plus(&FockState::from_terms(&reg, term)).unwrap();
            }
            state
        })
    }

    proptest! {
        #[test]
        fn inner_product_is_hermitian(a in sparse_state(), b in sparse_state()) {
            let ab = a.inner_product(&b).unwrap();
            let ba = b.inner_product(&a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-12);
        }

        #[test]
        fn inner_product_with_self_is_norm_sq(a in sparse_state()) {
            let aa = a.inner_product(&a).unwrap();
            prop_assert!(aa.im.abs() < 1e-12);
            prop_assert!((aa.re - a.norm_sq()).abs() < 1e-12);
        }

        #[test]
        fn prune_changes_norm_by_less_than_budget(a in sparse_state()) {
            let threshold = 1e-3;
            let pruned = a.prune(threshold);
            let budget = threshold * a.n_terms() as f64;
            prop_assert!((a.norm() - pruned.norm()).abs() <= budget);
        }
    }
}
