//! Circuits: an ordered list of optical elements over a named rail set,
//! terminated by photon-counting detectors.
//!
//! A [`Circuit`] is validated once at construction — every element
//! compiles against the rail registry, detector rails are distinct, and no
//! detector rail is consumed by an element after the last element feeding
//! it — and is immutable afterwards. Running a circuit is pure: the input
//! state is threaded through the compiled elements in order.
//!
//! The module also provides the standard input building blocks: the four
//! Bell pairs, single photons in the four linear polarizations, and an
//! arbitrary single-photon polarization qubit.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::detection::{enumerate_outcomes, DetectionOutcome, DetectorSpec, MeasBasis};
use crate::elements::{
    make_bs_5050, make_fs_pbs, make_fs_split, make_hv_pbs, make_hv_split, make_phase,
    make_pol_rotation, make_route, make_sigma_x_plate, ElementKind, OpticalElement,
};
use crate::error::{Error, Result};
use crate::fock::{Complex64, FockState, ModeRegistry, Pol, NORM_TOLERANCE};

/// A serializable element description: kind, rail arguments in canonical
/// order, and the angle parameter for the kinds that take one.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementSpec {
    /// Which catalog element this is.
    pub kind: ElementKind,
    /// Rail arguments in the element's canonical order.
    pub rails: Vec<String>,
    /// Angle parameter for `POL_ROT` (theta) and `PHASE` (phi).
    pub param: Option<f64>,
}

impl ElementSpec {
    /// A four-port element (`HV_PBS`, `FS_PBS`, `BS_5050`) with inputs
    /// `a`, `b` and outputs `c`, `d`.
    pub fn four_port(kind: ElementKind, a: &str, b: &str, c: &str, d: &str) -> ElementSpec {
        ElementSpec {
            kind,
            rails: vec![a.to_string(), b.to_string(), c.to_string(), d.to_string()],
            param: None,
        }
    }

    /// A `POL_ROT` on one rail.
    pub fn pol_rot(rail: &str, theta: f64) -> ElementSpec {
        ElementSpec {
            kind: ElementKind::PolRot,
            rails: vec![rail.to_string()],
            param: Some(theta),
        }
    }

    /// A `PHASE` on one rail.
    pub fn phase(rail: &str, phi: f64) -> ElementSpec {
        ElementSpec {
            kind: ElementKind::Phase,
            rails: vec![rail.to_string()],
            param: Some(phi),
        }
    }

    /// A `HALF_WAVE_X` plate on one rail.
    pub fn half_wave_x(rail: &str) -> ElementSpec {
        ElementSpec {
            kind: ElementKind::HalfWaveX,
            rails: vec![rail.to_string()],
            param: None,
        }
    }

    /// An `HV_SPLIT` or `FS_SPLIT` from `input` onto two output rails.
    pub fn split(kind: ElementKind, input: &str, out_first: &str, out_second: &str) -> ElementSpec {
        ElementSpec {
            kind,
            rails: vec![input.to_string(), out_first.to_string(), out_second.to_string()],
            param: None,
        }
    }

    /// A `ROUTE` connector.
    pub fn route(input: &str, output: &str) -> ElementSpec {
        ElementSpec {
            kind: ElementKind::Route,
            rails: vec![input.to_string(), output.to_string()],
            param: None,
        }
    }

    fn expect_rails(&self, n: usize) -> Result<()> {
        if self.rails.len() != n {
            return Err(Error::Format {
                detail: format!(
                    "{} takes {n} rail argument(s), got {}",
                    self.kind,
                    self.rails.len()
                ),
            });
        }
        Ok(())
    }

    fn expect_param(&self) -> Result<f64> {
        self.param.ok_or_else(|| Error::Format {
            detail: format!("{} requires an angle parameter", self.kind),
        })
    }

    /// Compile against a registry, checking arity, parameters, and rail
    /// existence.
    pub fn compile(&self, registry: &ModeRegistry) -> Result<OpticalElement> {
        let r = |i: usize| self.rails[i].as_str();
        match self.kind {
            ElementKind::HvPbs => {
                self.expect_rails(4)?;
                make_hv_pbs(registry, r(0), r(1), r(2), r(3))
            }
            ElementKind::FsPbs => {
                self.expect_rails(4)?;
                make_fs_pbs(registry, r(0), r(1), r(2), r(3))
            }
            ElementKind::Bs5050 => {
                self.expect_rails(4)?;
                make_bs_5050(registry, r(0), r(1), r(2), r(3))
            }
            ElementKind::PolRot => {
                self.expect_rails(1)?;
                make_pol_rotation(registry, r(0), self.expect_param()?)
            }
            ElementKind::Phase => {
                self.expect_rails(1)?;
                make_phase(registry, r(0), self.expect_param()?)
            }
            ElementKind::HalfWaveX => {
                self.expect_rails(1)?;
                make_sigma_x_plate(registry, r(0))
            }
            ElementKind::HvSplit => {
                self.expect_rails(3)?;
                make_hv_split(registry, r(0), r(1), r(2))
            }
            ElementKind::FsSplit => {
                self.expect_rails(3)?;
                make_fs_split(registry, r(0), r(1), r(2))
            }
            ElementKind::Route => {
                self.expect_rails(2)?;
                make_route(registry, r(0), r(1))
            }
            ElementKind::Custom => Err(Error::Format {
                detail: "CUSTOM elements cannot appear in circuit descriptions".to_string(),
            }),
        }
    }

    /// JSON object `{"kind", "rails", "params"?}`.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".to_string(), json!(self.kind.as_str()));
        obj.insert("rails".to_string(), json!(self.rails));
        if let Some(p) = self.param {
            let key = match self.kind {
                ElementKind::Phase => "phi",
                _ => "theta",
            };
            obj.insert("params".to_string(), json!({ key: p }));
        }
        Value::Object(obj)
    }

    /// Parse the object form produced by [`ElementSpec::to_json`].
    pub fn from_json(value: &Value) -> Result<ElementSpec> {
        let kind = ElementKind::parse(value["kind"].as_str().ok_or_else(|| Error::Format {
            detail: "element lacks a kind".to_string(),
        })?)?;
        let rails = value["rails"]
            .as_array()
            .ok_or_else(|| Error::Format {
                detail: "element lacks a rails array".to_string(),
            })?
            .iter()
            .map(|r| {
                r.as_str().map(str::to_string).ok_or_else(|| Error::Format {
                    detail: "element rails must be strings".to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let param = match &value["params"] {
            Value::Null => None,
            Value::Object(params) => {
                let key = match kind {
                    ElementKind::Phase => "phi",
                    _ => "theta",
                };
                Some(params.get(key).and_then(Value::as_f64).ok_or_else(|| Error::Format {
                    detail: format!("{kind} params must contain a numeric {key:?}"),
                })?)
            }
            _ => {
                return Err(Error::Format {
                    detail: "element params must be an object".to_string(),
                })
            }
        };
        Ok(ElementSpec { kind, rails, param })
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.rails.join(","))?;
        if let Some(p) = self.param {
            write!(f, "[{p:.6}]")?;
        }
        Ok(())
    }
}

/// A validated, compiled circuit.
#[derive(Debug, Clone)]
pub struct Circuit {
    registry: Arc<ModeRegistry>,
    specs: Vec<ElementSpec>,
    compiled: Vec<OpticalElement>,
    detectors: Vec<DetectorSpec>,
}

impl Circuit {
    /// Validate and compile. `rails` fixes the registry order; every
    /// element and detector must refer to rails from this list, and each
    /// detector rail must not be consumed by any element after the last
    /// element feeding it.
    pub fn new(rails: &[&str], specs: Vec<ElementSpec>, detectors: Vec<DetectorSpec>) -> Result<Circuit> {
        let registry = ModeRegistry::from_rails(rails)?;
        let compiled = specs
            .iter()
            .map(|s| s.compile(&registry))
            .collect::<Result<Vec<_>>>()?;
        let mut seen: Vec<&str> = Vec::new();
        for d in &detectors {
            if seen.contains(&d.rail.as_str()) {
                return Err(Error::DuplicateRail {
                    rail: d.rail.clone(),
                });
            }
            seen.push(&d.rail);
            registry.rail_index(&d.rail)?;
            let last_feed = compiled
                .iter()
                .rposition(|e| e.out_rails().iter().any(|r| r == &d.rail));
            let last_consume = compiled
                .iter()
                .rposition(|e| e.in_rails().iter().any(|r| r == &d.rail));
            let misordered = match (last_feed, last_consume) {
                (_, None) => false,
                (None, Some(_)) => true,
                (Some(f), Some(c)) => c > f,
            };
            if misordered {
                return Err(Error::BadPhotonLayout {
                    detail: format!(
                        "detector rail {:?} is consumed by an element after the last element feeding it",
                        d.rail
                    ),
                });
            }
        }
        Ok(Circuit {
            registry,
            specs,
            compiled,
            detectors,
        })
    }

    /// The rail registry shared by inputs and outputs of this circuit.
    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    /// The element descriptions, in application order.
    pub fn elements(&self) -> &[ElementSpec] {
        &self.specs
    }

    /// The compiled elements, in application order.
    pub fn compiled(&self) -> &[OpticalElement] {
        &self.compiled
    }

    /// The detectors terminating the circuit.
    pub fn detectors(&self) -> &[DetectorSpec] {
        &self.detectors
    }

    /// Thread `input` through every element in order.
    pub fn run(&self, input: &FockState) -> Result<FockState> {
        if *input.registry().as_ref() != *self.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut state = input.clone();
        for element in &self.compiled {
            state = element.apply(&state)?;
        }
        Ok(state)
    }

    /// Run, then enumerate every detection outcome.
    pub fn measure(&self, input: &FockState) -> Result<Vec<DetectionOutcome>> {
        enumerate_outcomes(&self.run(input)?, &self.detectors)
    }

    /// JSON object `{"rails", "elements", "detectors"}`.
    pub fn to_json(&self) -> Value {
        json!({
            "rails": self.registry.rails(),
            "elements": self.specs.iter().map(ElementSpec::to_json).collect::<Vec<_>>(),
            "detectors": self
                .detectors
                .iter()
                .map(|d| json!({"rail": d.rail, "basis": d.basis.as_str()}))
                .collect::<Vec<_>>(),
        })
    }

    /// Parse and re-validate the object form produced by
    /// [`Circuit::to_json`].
    pub fn from_json(value: &Value) -> Result<Circuit> {
        let rails = value["rails"]
            .as_array()
            .ok_or_else(|| Error::Format {
                detail: "circuit lacks a rails array".to_string(),
            })?
            .iter()
            .map(|r| {
                r.as_str().ok_or_else(|| Error::Format {
                    detail: "circuit rails must be strings".to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let specs = value["elements"]
            .as_array()
            .ok_or_else(|| Error::Format {
                detail: "circuit lacks an elements array".to_string(),
            })?
            .iter()
            .map(ElementSpec::from_json)
            .collect::<Result<Vec<_>>>()?;
        let detectors = value["detectors"]
            .as_array()
            .ok_or_else(|| Error::Format {
                detail: "circuit lacks a detectors array".to_string(),
            })?
            .iter()
            .map(|d| {
                let rail = d["rail"].as_str().ok_or_else(|| Error::Format {
                    detail: "detector lacks a rail".to_string(),
                })?;
                let basis = MeasBasis::parse(d["basis"].as_str().ok_or_else(|| Error::Format {
                    detail: "detector lacks a basis".to_string(),
                })?)?;
                Ok(DetectorSpec::new(rail, basis))
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(&rails, specs, detectors)
    }

    /// Serialize to a pretty JSON string.
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    /// Parse a JSON string produced by [`Circuit::to_json_string`].
    pub fn from_json_str(s: &str) -> Result<Circuit> {
        Circuit::from_json(&serde_json::from_str(s)?)
    }
}

/// The four Bell pairs on two rails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// `(|H H> + |V V>)/sqrt(2)`
    PhiPlus,
    /// `(|H H> - |V V>)/sqrt(2)`
    PhiMinus,
    /// `(|V H> + |H V>)/sqrt(2)`
    PsiPlus,
    /// `(|V H> - |H V>)/sqrt(2)` — the polarization singlet.
    PsiMinus,
}

impl BellKind {
    /// Canonical short name.
    pub fn as_str(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }

    /// Parse a canonical short name.
    pub fn parse(s: &str) -> Result<BellKind> {
        Ok(match s {
            "phi+" => BellKind::PhiPlus,
            "phi-" => BellKind::PhiMinus,
            "psi+" => BellKind::PsiPlus,
            "psi-" => BellKind::PsiMinus,
            other => {
                return Err(Error::Format {
                    detail: format!("unknown Bell pair {other:?} (expected phi+/phi-/psi+/psi-)"),
                })
            }
        })
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Single-photon polarizations available as inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinglePol {
    /// Horizontal.
    H,
    /// Vertical.
    V,
    /// Diagonal `(H + V)/sqrt(2)`.
    F,
    /// Antidiagonal `(V - H)/sqrt(2)`.
    S,
}

impl SinglePol {
    /// Canonical one-letter name.
    pub fn as_str(self) -> &'static str {
        match self {
            SinglePol::H => "H",
            SinglePol::V => "V",
            SinglePol::F => "F",
            SinglePol::S => "S",
        }
    }

    /// Parse a one-letter name.
    pub fn parse(s: &str) -> Result<SinglePol> {
        Ok(match s {
            "H" => SinglePol::H,
            "V" => SinglePol::V,
            "F" => SinglePol::F,
            "S" => SinglePol::S,
            other => {
                return Err(Error::Format {
                    detail: format!("unknown polarization {other:?} (expected H/V/F/S)"),
                })
            }
        })
    }
}

/// One factor of a product input state.
#[derive(Debug, Clone, PartialEq)]
pub enum InputPart {
    /// A Bell pair across two rails.
    Bell {
        /// Which pair.
        kind: BellKind,
        /// The two rails, in order.
        rails: [String; 2],
    },
    /// A single photon in a fixed linear polarization.
    Single {
        /// The rail.
        rail: String,
        /// The polarization.
        pol: SinglePol,
    },
    /// A single photon in an arbitrary polarization qubit
    /// `alpha |H> + beta |V>`.
    Qubit {
        /// The rail.
        rail: String,
        /// Amplitude on `H`.
        alpha: Complex64,
        /// Amplitude on `V`.
        beta: Complex64,
    },
}

/// A Bell pair on rails `r1`, `r2` of `registry`.
pub fn bell_state(registry: &Arc<ModeRegistry>, kind: BellKind, r1: &str, r2: &str) -> Result<FockState> {
    if r1 == r2 {
        return Err(Error::DuplicateRail { rail: r1.to_string() });
    }
    let s = Complex64::new(0.5f64.sqrt(), 0.0);
    let pair = |p1: Pol, p2: Pol| -> Result<FockState> {
        FockState::vacuum(registry)
            .add_photon(r1, p1)?
            .add_photon(r2, p2)
    };
    let (first, second, sign) = match kind {
        BellKind::PhiPlus => (pair(Pol::H, Pol::H)?, pair(Pol::V, Pol::V)?, 1.0),
        BellKind::PhiMinus => (pair(Pol::H, Pol::H)?, pair(Pol::V, Pol::V)?, -1.0),
        BellKind::PsiPlus => (pair(Pol::V, Pol::H)?, pair(Pol::H, Pol::V)?, 1.0),
        BellKind::PsiMinus => (pair(Pol::V, Pol::H)?, pair(Pol::H, Pol::V)?, -1.0),
    };
    first.scaled(s).plus(&second.scaled(s * sign))
}

/// A single photon on `rail` in one of the four linear polarizations.
pub fn single_state(registry: &Arc<ModeRegistry>, rail: &str, pol: SinglePol) -> Result<FockState> {
    let vac = FockState::vacuum(registry);
    let s = Complex64::new(0.5f64.sqrt(), 0.0);
    Ok(match pol {
        SinglePol::H => vac.add_photon(rail, Pol::H)?,
        SinglePol::V => vac.add_photon(rail, Pol::V)?,
        SinglePol::F => vac
            .clone()
            .add_photon(rail, Pol::H)?
            .scaled(s)
            .plus(&vac.add_photon(rail, Pol::V)?.scaled(s))?,
        SinglePol::S => vac
            .clone()
            .add_photon(rail, Pol::V)?
            .scaled(s)
            .plus(&vac.add_photon(rail, Pol::H)?.scaled(-s))?,
    })
}

/// A single photon on `rail` in the polarization qubit
/// `alpha |H> + beta |V>`. The amplitudes must be normalized.
pub fn qubit_state(
    registry: &Arc<ModeRegistry>,
    rail: &str,
    alpha: Complex64,
    beta: Complex64,
) -> Result<FockState> {
    let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sq });
    }
    let vac = FockState::vacuum(registry);
    vac.clone()
        .add_photon(rail, Pol::H)?
        .scaled(alpha)
        .plus(&vac.add_photon(rail, Pol::V)?.scaled(beta))
}

/// Tensor a list of input parts over disjoint rails; rails not mentioned
/// stay in vacuum.
pub fn build_input(registry: &Arc<ModeRegistry>, parts: &[InputPart]) -> Result<FockState> {
    let mut state = FockState::vacuum(registry);
    for part in parts {
        let factor = match part {
            InputPart::Bell { kind, rails } => bell_state(registry, *kind, &rails[0], &rails[1])?,
            InputPart::Single { rail, pol } => single_state(registry, rail, *pol)?,
            InputPart::Qubit { rail, alpha, beta } => qubit_state(registry, rail, *alpha, *beta)?,
        };
        state = state.tensor(&factor)?;
    }
    Ok(state)
}
