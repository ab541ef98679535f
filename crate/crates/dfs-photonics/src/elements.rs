//! The catalog of unitary linear-optical elements and their action on
//! sparse Fock states.
//!
//! Every element is stored as a small unitary matrix over the union of the
//! modes of the rails it touches. Applying an element substitutes each
//! input-mode creation operator with the corresponding linear combination
//! of output-mode creation operators inside every occupation monomial —
//! the exact multi-photon action of a passive linear element.
//!
//! # Phase conventions
//!
//! These conventions are fixed once for the whole crate and documented
//! here because heralded-state amplitudes depend on them:
//!
//! - **Polarizing beam splitters** (`HV_PBS`, `FS_PBS`) and the pure
//!   routing elements (`HV_SPLIT`, `FS_SPLIT`, `ROUTE`) are mode
//!   *permutations*: transmission and reflection both carry coefficient
//!   `+1`. With this choice the parity-check and generator circuits
//!   reproduce their reference branch amplitudes exactly, with no residual
//!   per-branch phases.
//! - **The polarization-insensitive 50/50 splitter** (`BS_5050`) uses the
//!   symmetric convention: transmit `1/sqrt(2)`, reflect `i/sqrt(2)`.
//!
//! Elements that act in the diagonal basis (`F = (H + V)/sqrt(2)`,
//! `S = (V - H)/sqrt(2)`) are built by conjugating the corresponding
//! rectilinear element with the fixed per-rail change of basis, so the
//! `{H, V}` registry basis is the single storage basis throughout.

use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{Complex64, FockState, ModeRegistry, Occ, Pol};

/// Unitarity is asserted to this tolerance at construction.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// The element kinds that may appear in serialized circuits, plus
/// [`ElementKind::Custom`] for programmatic single-rail unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    /// Polarizing beam splitter in the rectilinear basis: `H` transmits,
    /// `V` reflects.
    HvPbs,
    /// Polarizing beam splitter in the diagonal basis: `F` transmits, `S`
    /// reflects.
    FsPbs,
    /// Polarization-insensitive 50/50 beam splitter.
    Bs5050,
    /// Rotation by an angle in the diagonal basis of one rail.
    PolRot,
    /// Relative phase on the `S` component of one rail.
    Phase,
    /// Half-wave plate swapping `H` and `V` on one rail.
    HalfWaveX,
    /// One rail demultiplexed by rectilinear polarization onto two rails.
    HvSplit,
    /// One rail demultiplexed by diagonal polarization onto two rails.
    FsSplit,
    /// Identity connector from one rail to another.
    Route,
    /// A caller-supplied single-rail unitary; not serializable.
    Custom,
}

impl ElementKind {
    /// Canonical serialized name.
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::HvPbs => "HV_PBS",
            ElementKind::FsPbs => "FS_PBS",
            ElementKind::Bs5050 => "BS_5050",
            ElementKind::PolRot => "POL_ROT",
            ElementKind::Phase => "PHASE",
            ElementKind::HalfWaveX => "HALF_WAVE_X",
            ElementKind::HvSplit => "HV_SPLIT",
            ElementKind::FsSplit => "FS_SPLIT",
            ElementKind::Route => "ROUTE",
            ElementKind::Custom => "CUSTOM",
        }
    }

    /// Parse a canonical serialized name (rejects `CUSTOM`).
    pub fn parse(s: &str) -> Result<ElementKind> {
        Ok(match s {
            "HV_PBS" => ElementKind::HvPbs,
            "FS_PBS" => ElementKind::FsPbs,
            "BS_5050" => ElementKind::Bs5050,
            "POL_ROT" => ElementKind::PolRot,
            "PHASE" => ElementKind::Phase,
            "HALF_WAVE_X" => ElementKind::HalfWaveX,
            "HV_SPLIT" => ElementKind::HvSplit,
            "FS_SPLIT" => ElementKind::FsSplit,
            "ROUTE" => ElementKind::Route,
            other => {
                return Err(Error::Format {
                    detail: format!("unknown element kind {other:?}"),
                })
            }
        })
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A compiled optical element: a unitary on the modes of the rails it
/// involves. Immutable after construction; application is pure.
#[derive(Debug, Clone)]
pub struct OpticalElement {
    kind: ElementKind,
    in_rails: Vec<String>,
    out_rails: Vec<String>,
    param: Option<f64>,
    /// Dense registry indices of the involved modes, ascending.
    modes: Vec<usize>,
    /// Row-major `dim x dim`; column `j` is the image of `modes[j]`'s
    /// creation operator over the `modes` basis.
    mat: Vec<Complex64>,
}

impl OpticalElement {
    /// The element's kind.
    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    /// Rails whose photons the element consumes.
    pub fn in_rails(&self) -> &[String] {
        &self.in_rails
    }

    /// Rails onto which the element emits.
    pub fn out_rails(&self) -> &[String] {
        &self.out_rails
    }

    /// The angle parameter, for `POL_ROT` and `PHASE`.
    pub fn param(&self) -> Option<f64> {
        self.param
    }

    /// Matrix dimension (number of involved modes).
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// Matrix entry `[row][col]` over the involved-mode basis.
    pub fn matrix_entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[row * self.modes.len() + col]
    }

    /// Largest deviation of `M* M` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.modes.len();
        let mut max_dev = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    sum += self.mat[k * dim + i].conj() * self.mat[k * dim + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((sum - target).norm());
            }
        }
        max_dev
    }

    fn validated(self) -> Result<OpticalElement> {
        let dev = self.unitarity_deviation();
        if dev > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { max_dev: dev });
        }
        Ok(self)
    }

    /// A caller-supplied 2x2 unitary on the `{H, V}` mode pair of one rail.
    /// `matrix[i][j]` is the coefficient of the image of basis state `j` on
    /// basis state `i`, with index 0 = `H`, 1 = `V`.
    pub fn single_rail(registry: &ModeRegistry, rail: &str, matrix: [[Complex64; 2]; 2]) -> Result<OpticalElement> {
        let h = registry.mode_index(rail, Pol::H)?;
        let modes = vec![h, h + 1];
        let mat = vec![matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]];
        OpticalElement {
            kind: ElementKind::Custom,
            in_rails: vec![rail.to_string()],
            out_rails: vec![rail.to_string()],
            param: None,
            modes,
            mat,
        }
        .validated()
    }

    /// Apply the element to a state by creation-operator substitution.
    /// Norm and total photon number are preserved; terms below the default
    /// prune threshold are dropped afterwards.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        apply_element(state, self)
    }
}

impl fmt::Display for OpticalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({} -> {})",
            self.kind,
            self.in_rails.join(","),
            self.out_rails.join(",")
        )?;
        if let Some(p) = self.param {
            write!(f, "[{p}]")?;
        }
        Ok(())
    }
}

/// Fixed change of basis on one rail, as columns: `C e_H = F`, `C e_V = S`
/// over `(H, V)` coordinates.
fn basis_change_fs() -> [[Complex64; 2]; 2] {
    let s = 0.5f64.sqrt();
    [
        [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
    ]
}

fn mat_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

fn mat_adjoint(a: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i * dim + j] = a[j * dim + i].conj();
        }
    }
    out
}

/// Build a permutation matrix over `modes` (sorted dense indices) from the
/// `(from, to)` assignments. Unassigned domain modes are paired with
/// unassigned codomain slots in ascending order, so the result is always a
/// genuine permutation (hence unitary) on the union.
fn permutation_over(modes: &[usize], assignments: &[(usize, usize)]) -> Vec<Complex64> {
    let local = |m: usize| modes.binary_search(&m).expect("mode in union");
    let dim = modes.len();
    let mut image: Vec<Option<usize>> = vec![None; dim];
    let mut taken = vec![false; dim];
    for &(from, to) in assignments {
        let (f, t) = (local(from), local(to));
        assert!(image[f].is_none(), "mode assigned twice");
        assert!(!taken[t], "target slot assigned twice");
        image[f] = Some(t);
        taken[t] = true;
    }
    let free_slots: Vec<usize> = (0..dim).filter(|&t| !taken[t]).collect();
    let mut next_free = free_slots.into_iter();
    for slot in image.iter_mut() {
        if slot.is_none() {
            *slot = Some(next_free.next().expect("matching free slot"));
        }
    }
    let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (from, to) in image.into_iter().enumerate() {
        let to = to.expect("total map");
        mat[to * dim + from] = Complex64::new(1.0, 0.0);
    }
    mat
}

/// Union of the modes touched by the assignments, sorted ascending.
fn union_of(assignments: &[(usize, usize)]) -> Vec<usize> {
    let mut modes: Vec<usize> = assignments.iter().flat_map(|&(a, b)| [a, b]).collect();
    modes.sort_unstable();
    modes.dedup();
    modes
}

fn routing_matrix(assignments: &[(usize, usize)]) -> (Vec<usize>, Vec<Complex64>) {
    let modes = union_of(assignments);
    let mat = permutation_over(&modes, assignments);
    (modes, mat)
}

/// Conjugate a matrix over `modes` with the per-rail `{H,V} -> {F,S}` basis
/// change: `C . M . C*`. Requires each rail's mode pair to be complete in
/// `modes` (which rail-major dense indexing guarantees for rail unions).
fn conjugate_with_fs(modes: &[usize], mat: &[Complex64]) -> Vec<Complex64> {
    let dim = modes.len();
    let mut c = vec![Complex64::new(0.0, 0.0); dim * dim];
    let cb = basis_change_fs();
    let mut i = 0;
    while i < dim {
        assert!(
            i + 1 < dim && modes[i].is_multiple_of(2) && modes[i + 1] == modes[i] + 1,
            "rail mode pair must be contiguous in the union"
        );
        for r in 0..2 {
            for s in 0..2 {
                c[(i + r) * dim + (i + s)] = cb[r][s];
            }
        }
        i += 2;
    }
    let c_dag = mat_adjoint(&c, dim);
    mat_mul(&c, &mat_mul(mat, &c_dag, dim), dim)
}

fn distinct<'a>(rails: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for r in rails {
        if seen.contains(&r) {
            return Err(Error::DuplicateRail { rail: r.to_string() });
        }
        seen.push(r);
    }
    Ok(())
}

/// Polarizing beam splitter in the rectilinear basis. `H` transmits
/// (`a -> c`, `b -> d`); `V` reflects (`a -> d`, `b -> c`). Input rails must
/// be distinct and output rails must be distinct; an output may reuse an
/// input rail (reflective geometries route a photon back along its input).
pub fn make_hv_pbs(registry: &ModeRegistry, a: &str, b: &str, c: &str, d: &str) -> Result<OpticalElement> {
    distinct([a, b])?;
    distinct([c, d])?;
    let assignments = [
        (registry.mode_index(a, Pol::H)?, registry.mode_index(c, Pol::H)?),
        (registry.mode_index(b, Pol::H)?, registry.mode_index(d, Pol::H)?),
        (registry.mode_index(a, Pol::V)?, registry.mode_index(d, Pol::V)?),
        (registry.mode_index(b, Pol::V)?, registry.mode_index(c, Pol::V)?),
    ];
    let (modes, mat) = routing_matrix(&assignments);
    OpticalElement {
        kind: ElementKind::HvPbs,
        in_rails: vec![a.to_string(), b.to_string()],
        out_rails: vec![c.to_string(), d.to_string()],
        param: None,
        modes,
        mat,
    }
    .validated()
}

/// Polarizing beam splitter in the diagonal basis: `F` transmits, `S`
/// reflects. Equal to the per-rail basis change conjugation of the
/// rectilinear routing.
pub fn make_fs_pbs(registry: &ModeRegistry, a: &str, b: &str, c: &str, d: &str) -> Result<OpticalElement> {
    let hv = make_hv_pbs(registry, a, b, c, d)?;
    let mat = conjugate_with_fs(&hv.modes, &hv.mat);
    OpticalElement {
        kind: ElementKind::FsPbs,
        mat,
        ..hv
    }
    .validated()
}

/// Polarization-insensitive 50/50 beam splitter in the symmetric
/// convention: transmit `1/sqrt(2)` (`a -> c`, `b -> d`), reflect
/// `i/sqrt(2)` (`a -> d`, `b -> c`).
pub fn make_bs_5050(registry: &ModeRegistry, a: &str, b: &str, c: &str, d: &str) -> Result<OpticalElement> {
    distinct([a, b])?;
    distinct([c, d])?;
    // Union and slot layout from the pure routing map; amplitudes replaced
    // below.
    let assignments = [
        (registry.mode_index(a, Pol::H)?, registry.mode_index(c, Pol::H)?),
        (registry.mode_index(b, Pol::H)?, registry.mode_index(d, Pol::H)?),
        (registry.mode_index(a, Pol::V)?, registry.mode_index(c, Pol::V)?),
        (registry.mode_index(b, Pol::V)?, registry.mode_index(d, Pol::V)?),
    ];
    let (modes, _) = routing_matrix(&assignments);
    let dim = modes.len();
    let local = |m: usize| modes.binary_search(&m).expect("mode in union");
    let t = Complex64::new(0.5f64.sqrt(), 0.0);
    let r = Complex64::new(0.0, 0.5f64.sqrt());
    let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut remaining: Vec<usize> = (0..dim).collect();
    for pol in [Pol::H, Pol::V] {
        let (am, bm) = (
            local(registry.mode_index(a, pol)?),
            local(registry.mode_index(b, pol)?),
        );
        let (cm, dm) = (
            local(registry.mode_index(c, pol)?),
            local(registry.mode_index(d, pol)?),
        );
        mat[cm * dim + am] = t;
        mat[dm * dim + am] = r;
        mat[cm * dim + bm] = r;
        mat[dm * dim + bm] = t;
        remaining.retain(|&m| m != am && m != bm);
    }
    // Modes of output rails that are not fed (distinct-output geometries):
    // map them onto the vacated input slots so the matrix stays unitary.
    let mut vacated: Vec<usize> = (0..dim)
        .filter(|&s| (0..dim).all(|f| mat[s * dim + f].norm_sqr() == 0.0))
        .collect();
    vacated.sort_unstable();
    for from in remaining {
        let to = vacated.remove(0);
        mat[to * dim + from] = Complex64::new(1.0, 0.0);
    }
    OpticalElement {
        kind: ElementKind::Bs5050,
        in_rails: vec![a.to_string(), b.to_string()],
        out_rails: vec![c.to_string(), d.to_string()],
        param: None,
        modes,
        mat,
    }
    .validated()
}

/// Rotation by `theta` in the diagonal basis of one rail:
/// `F -> cos(theta) F - sin(theta) S`, `S -> sin(theta) F + cos(theta) S`.
/// The same matrix describes the action in the `{H, V}` basis.
pub fn make_pol_rotation(registry: &ModeRegistry, rail: &str, theta: f64) -> Result<OpticalElement> {
    let (c, s) = (theta.cos(), theta.sin());
    let mat = [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    ];
    let mut e = OpticalElement::single_rail(registry, rail, mat)?;
    e.kind = ElementKind::PolRot;
    e.param = Some(theta);
    Ok(e)
}

/// Relative phase on the diagonal basis of one rail: `F -> F`,
/// `S -> exp(i phi) S`.
pub fn make_phase(registry: &ModeRegistry, rail: &str, phi: f64) -> Result<OpticalElement> {
    let e = Complex64::new(0.0, phi).exp();
    let one = Complex64::new(1.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let mat = [
        [(one + e) * half, (one - e) * half],
        [(one - e) * half, (one + e) * half],
    ];
    let mut elem = OpticalElement::single_rail(registry, rail, mat)?;
    elem.kind = ElementKind::Phase;
    elem.param = Some(phi);
    Ok(elem)
}

/// Half-wave plate that swaps `H` and `V` on one rail.
pub fn make_sigma_x_plate(registry: &ModeRegistry, rail: &str) -> Result<OpticalElement> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut e = OpticalElement::single_rail(registry, rail, [[zero, one], [one, zero]])?;
    e.kind = ElementKind::HalfWaveX;
    Ok(e)
}

/// Demultiplex one rail by rectilinear polarization: `H -> out_h`,
/// `V -> out_v`.
pub fn make_hv_split(registry: &ModeRegistry, input: &str, out_h: &str, out_v: &str) -> Result<OpticalElement> {
    distinct([input, out_h, out_v])?;
    let assignments = [
        (registry.mode_index(input, Pol::H)?, registry.mode_index(out_h, Pol::H)?),
        (registry.mode_index(input, Pol::V)?, registry.mode_index(out_v, Pol::V)?),
    ];
    let (modes, mat) = routing_matrix(&assignments);
    OpticalElement {
        kind: ElementKind::HvSplit,
        in_rails: vec![input.to_string()],
        out_rails: vec![out_h.to_string(), out_v.to_string()],
        param: None,
        modes,
        mat,
    }
    .validated()
}

/// Demultiplex one rail by diagonal polarization: the `F` component exits
/// on `out_f` (still `F`-polarized), the `S` component on `out_s`.
pub fn make_fs_split(registry: &ModeRegistry, input: &str, out_f: &str, out_s: &str) -> Result<OpticalElement> {
    distinct([input, out_f, out_s])?;
    // In the diagonal basis this is the same routing permutation as an HV
    // split; conjugate it back into the registry basis. The union must
    // contain both modes of all three rails for the conjugation, so it is
    // listed explicitly rather than inferred from the assignments.
    let mut modes: Vec<usize> = Vec::new();
    for rail in [input, out_f, out_s] {
        let h = registry.mode_index(rail, Pol::H)?;
        modes.push(h);
        modes.push(h + 1);
    }
    modes.sort_unstable();
    let assignments = [
        (registry.mode_index(input, Pol::H)?, registry.mode_index(out_f, Pol::H)?),
        (registry.mode_index(input, Pol::V)?, registry.mode_index(out_s, Pol::V)?),
    ];
    let perm = permutation_over(&modes, &assignments);
    let mat = conjugate_with_fs(&modes, &perm);
    OpticalElement {
        kind: ElementKind::FsSplit,
        in_rails: vec![input.to_string()],
        out_rails: vec![out_f.to_string(), out_s.to_string()],
        param: None,
        modes,
        mat,
    }
    .validated()
}

/// Identity connector: both polarizations of `input` continue on `output`.
pub fn make_route(registry: &ModeRegistry, input: &str, output: &str) -> Result<OpticalElement> {
    distinct([input, output])?;
    let assignments = [
        (registry.mode_index(input, Pol::H)?, registry.mode_index(output, Pol::H)?),
        (registry.mode_index(input, Pol::V)?, registry.mode_index(output, Pol::V)?),
    ];
    let (modes, mat) = routing_matrix(&assignments);
    OpticalElement {
        kind: ElementKind::Route,
        in_rails: vec![input.to_string()],
        out_rails: vec![output.to_string()],
        param: None,
        modes,
        mat,
    }
    .validated()
}

const SQRT_FACTORIAL: [f64; 16] = {
    let mut t = [1.0f64; 16];
    let mut i = 1usize;
    let mut fact = 1.0f64;
    while i < 16 {
        fact *= i as f64;
        t[i] = fact;
        i += 1;
    }
    // Store factorials; square roots are taken at use sites (const sqrt is
    // unavailable), so this table actually holds n!.
    t
};

fn sqrt_fact(n: u8) -> f64 {
    SQRT_FACTORIAL[n as usize].sqrt()
}

/// Apply `element` to `state` by substituting each involved creation
/// operator with its image and re-expanding in the occupation basis. Norm
/// and photon number are conserved; the result is pruned at the default
/// threshold.
pub fn apply_element(state: &FockState, element: &OpticalElement) -> Result<FockState> {
    use std::collections::BTreeMap;

    let registry = state.registry();
    for rail in element.in_rails().iter().chain(element.out_rails()) {
        registry.rail_index(rail)?;
    }
    let dim = element.modes.len();
    let mut out: BTreeMap<Occ, Complex64> = BTreeMap::new();
    for (&occ, &amp) in &state.terms {
        // Occupation restricted to the element's modes, and the untouched
        // remainder.
        let mut base = occ;
        let mut ns = Vec::with_capacity(dim);
        let mut total_in = 0u32;
        for &m in &element.modes {
            let n = occ.get(m);
            ns.push(n);
            total_in += n as u32;
            base = base.with(m, 0);
        }
        if total_in == 0 {
            *out.entry(occ).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        // |n1..nd> = prod_j (a_j+)^{n_j} / sqrt(n_j!) |0>; substitute each
        // a_j+ by its image and expand the operator polynomial. Keys of
        // `poly` are occupations over the element's local mode slots.
        let mut norm_in = 1.0f64;
        for &n in &ns {
            norm_in *= sqrt_fact(n);
        }
        let mut poly: BTreeMap<Occ, Complex64> = BTreeMap::new();
        poly.insert(Occ::EMPTY, amp / norm_in);
        for (j, &n) in ns.iter().enumerate() {
            for _ in 0..n {
                let mut next: BTreeMap<Occ, Complex64> = BTreeMap::new();
                for (&k, &coeff) in &poly {
                    for i in 0..dim {
                        let u = element.mat[i * dim + j];
                        if u.norm_sqr() == 0.0 {
                            continue;
                        }
                        let bumped = k.with(i, k.get(i) + 1);
                        *next.entry(bumped).or_insert_with(|| Complex64::new(0.0, 0.0)) += coeff * u;
                    }
                }
                poly = next;
            }
        }
        for (k, coeff) in poly {
            let mut target = base;
            let mut factor = 1.0f64;
            for i in 0..dim {
                let c = k.get(i);
                if c > 0 {
                    target = target.with(element.modes[i], c);
                    factor *= sqrt_fact(c);
                }
            }
            *out.entry(target).or_insert_with(|| Complex64::new(0.0, 0.0)) += coeff * factor;
        }
    }
    let result = FockState::from_terms(registry, out);
    Ok(result.prune(crate::fock::DEFAULT_PRUNE_THRESHOLD))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockState;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_photon(reg: &Arc<ModeRegistry>, rail: &str, pol: Pol) -> FockState {
        FockState::vacuum(reg).add_photon(rail, pol).unwrap()
    }

    /// `|F> = (|H> + |V>)/sqrt(2)` on one rail.
    fn f_photon(reg: &Arc<ModeRegistry>, rail: &str) -> FockState {
        let s = c(0.5f64.sqrt(), 0.0);
        one_photon(reg, rail, Pol::H)
            .scaled(s)
            .plus(&one_photon(reg, rail, Pol::V).scaled(s))
            .unwrap()
    }

    /// `|S> = (|V> - |H>)/sqrt(2)` on one rail.
    fn s_photon(reg: &Arc<ModeRegistry>, rail: &str) -> FockState {
        let s = c(0.5f64.sqrt(), 0.0);
        one_photon(reg, rail, Pol::V)
            .scaled(s)
            .plus(&one_photon(reg, rail, Pol::H).scaled(c(-0.5f64.sqrt(), 0.0)))
            .unwrap()
    }

    fn overlap(a: &FockState, b: &FockState) -> Complex64 {
        a.inner_product(b).unwrap()
    }

    #[test]
    fn hv_pbs_transmits_h_and_reflects_v() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let pbs = make_hv_pbs(&reg, "a", "b", "c", "d").unwrap();
        let out_h = pbs.apply(&one_photon(&reg, "a", Pol::H)).unwrap();
        assert!((overlap(&one_photon(&reg, "c", Pol::H), &out_h) - c(1.0, 0.0)).norm() < 1e-14);
        let out_v = pbs.apply(&one_photon(&reg, "a", Pol::V)).unwrap();
        assert!((overlap(&one_photon(&reg, "d", Pol::V), &out_v) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hv_pbs_two_photon_product_rule() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let pbs = make_hv_pbs(&reg, "a", "b", "c", "d").unwrap();
        let input = FockState::vacuum(&reg)
            .add_photon("a", Pol::H)
            .unwrap()
            .add_photon("a", Pol::V)
            .unwrap();
        let out = pbs.apply(&input).unwrap();
        let expected = FockState::vacuum(&reg)
            .add_photon("c", Pol::H)
            .unwrap()
            .add_photon("d", Pol::V)
            .unwrap();
        assert!((overlap(&expected, &out) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hv_pbs_allows_reflective_reuse() {
        // A reflective geometry sends rail a's V photon back out along a
        // new rail while H stays on a.
        let reg = ModeRegistry::from_rails(&["a", "b", "d"]).unwrap();
        let pbs = make_hv_pbs(&reg, "a", "b", "a", "d").unwrap();
        let out = pbs.apply(&one_photon(&reg, "a", Pol::H)).unwrap();
        assert!((overlap(&one_photon(&reg, "a", Pol::H), &out) - c(1.0, 0.0)).norm() < 1e-14);
        let out = pbs.apply(&one_photon(&reg, "b", Pol::V)).unwrap();
        assert!((overlap(&one_photon(&reg, "a", Pol::V), &out) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fs_pbs_transmits_f_and_reflects_s() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let pbs = make_fs_pbs(&reg, "a", "b", "c", "d").unwrap();
        let out_f = pbs.apply(&f_photon(&reg, "a")).unwrap();
        assert!((overlap(&f_photon(&reg, "c"), &out_f) - c(1.0, 0.0)).norm() < 1e-12);
        let out_s = pbs.apply(&s_photon(&reg, "a")).unwrap();
        assert!((overlap(&s_photon(&reg, "d"), &out_s) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fs_pbs_splits_h_by_linearity() {
        // |H_a> = (|F_a> - |S_a>)/sqrt(2) -> (|F_c> - |S_d>)/sqrt(2).
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let pbs = make_fs_pbs(&reg, "a", "b", "c", "d").unwrap();
        let out = pbs.apply(&one_photon(&reg, "a", Pol::H)).unwrap();
        let srt = 0.5f64.sqrt();
        assert!((overlap(&f_photon(&reg, "c"), &out) - c(srt, 0.0)).norm() < 1e-12);
        assert!((overlap(&s_photon(&reg, "d"), &out) - c(-srt, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fs_pbs_equals_conjugated_hv_routing() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let fs = make_fs_pbs(&reg, "a", "b", "c", "d").unwrap();
        let hv = make_hv_pbs(&reg, "a", "b", "c", "d").unwrap();
        let conj = conjugate_with_fs(&hv.modes, &hv.mat);
        let dim = fs.dim();
        for i in 0..dim {
            for j in 0..dim {
                assert!((fs.mat[i * dim + j] - conj[i * dim + j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bs_5050_single_photon_convention() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let bs = make_bs_5050(&reg, "a", "b", "c", "d").unwrap();
        let out = bs.apply(&one_photon(&reg, "a", Pol::H)).unwrap();
        let srt = 0.5f64.sqrt();
        assert!((overlap(&one_photon(&reg, "c", Pol::H), &out) - c(srt, 0.0)).norm() < 1e-14);
        assert!((overlap(&one_photon(&reg, "d", Pol::H), &out) - c(0.0, srt)).norm() < 1e-14);
    }

    #[test]
    fn bs_5050_hong_ou_mandel_cancellation() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
        let bs = make_bs_5050(&reg, "a", "b", "c", "d").unwrap();
        let input = FockState::vacuum(&reg)
            .add_photon("a", Pol::H)
            .unwrap()
            .add_photon("b", Pol::H)
            .unwrap();
        let out = bs.apply(&input).unwrap();
        // No coincidence term; both photons bunch with amplitude i/sqrt(2).
        let mut coincidence = vec![0u8; reg.n_modes()];
        coincidence[reg.mode_index("c", Pol::H).unwrap()] = 1;
        coincidence[reg.mode_index("d", Pol::H).unwrap()] = 1;
        assert!(out.amplitude(&coincidence).unwrap().norm() < 1e-14);
        let mut bunched = vec![0u8; reg.n_modes()];
        bunched[reg.mode_index("c", Pol::H).unwrap()] = 2;
        assert!((out.amplitude(&bunched).unwrap() - c(0.0, 0.5f64.sqrt())).norm() < 1e-14);
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pol_rotation_matches_reference_angles() {
        let reg = ModeRegistry::from_rails(&["a"]).unwrap();
        // theta = 0: identity.
        let id = make_pol_rotation(&reg, "a", 0.0).unwrap();
        let f = f_photon(&reg, "a");
        assert!((overlap(&f, &id.apply(&f).unwrap()) - c(1.0, 0.0)).norm() < 1e-14);
        // theta = pi/2: F -> -S.
        let quarter = make_pol_rotation(&reg, "a", std::f64::consts::FRAC_PI_2).unwrap();
        let out = quarter.apply(&f).unwrap();
        assert!((overlap(&s_photon(&reg, "a"), &out) - c(-1.0, 0.0)).norm() < 1e-12);
        // theta = pi/4: F -> |H>.
        let eighth = make_pol_rotation(&reg, "a", std::f64::consts::FRAC_PI_4).unwrap();
        let out = eighth.apply(&f).unwrap();
        assert!((overlap(&one_photon(&reg, "a", Pol::H), &out) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_plate_matches_reference_angles() {
        let reg = ModeRegistry::from_rails(&["a"]).unwrap();
        // phi = 0: identity on S.
        let id = make_phase(&reg, "a", 0.0).unwrap();
        let s = s_photon(&reg, "a");
        assert!((overlap(&s, &id.apply(&s).unwrap()) - c(1.0, 0.0)).norm() < 1e-14);
        // phi = pi: S -> -S, so H -> V.
        let pi = make_phase(&reg, "a", std::f64::consts::PI).unwrap();
        let out = pi.apply(&s).unwrap();
        assert!((overlap(&s, &out) - c(-1.0, 0.0)).norm() < 1e-12);
        let out = pi.apply(&one_photon(&reg, "a", Pol::H)).unwrap();
        assert!((overlap(&one_photon(&reg, "a", Pol::V), &out) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sigma_x_plate_swaps_and_squares_to_identity() {
        let reg = ModeRegistry::from_rails(&["a"]).unwrap();
        let plate = make_sigma_x_plate(&reg, "a").unwrap();
        let h = one_photon(&reg, "a", Pol::H);
        let out = plate.apply(&h).unwrap();
        assert!((overlap(&one_photon(&reg, "a", Pol::V), &out) - c(1.0, 0.0)).norm() < 1e-14);
        let back = plate.apply(&out).unwrap();
        assert!((overlap(&h, &back) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn splits_route_by_polarization() {
        let reg = ModeRegistry::from_rails(&["x", "h", "v"]).unwrap();
        let split = make_hv_split(&reg, "x", "h", "v").unwrap();
        let out = split
            .apply(&f_photon(&reg, "x"))
            .unwrap();
        let srt = 0.5f64.sqrt();
        assert!((overlap(&one_photon(&reg, "h", Pol::H), &out) - c(srt, 0.0)).norm() < 1e-12);
        assert!((overlap(&one_photon(&reg, "v", Pol::V), &out) - c(srt, 0.0)).norm() < 1e-12);

        let reg = ModeRegistry::from_rails(&["x", "f", "s"]).unwrap();
        let split = make_fs_split(&reg, "x", "f", "s").unwrap();
        let out = split.apply(&f_photon(&reg, "x")).unwrap();
        assert!((overlap(&f_photon(&reg, "f"), &out) - c(1.0, 0.0)).norm() < 1e-12);
        let out = split.apply(&s_photon(&reg, "x")).unwrap();
        assert!((overlap(&s_photon(&reg, "s"), &out) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn route_is_an_identity_connector() {
        let reg = ModeRegistry::from_rails(&["x", "y"]).unwrap();
        let route = make_route(&reg, "x", "y").unwrap();
        let out = route.apply(&s_photon(&reg, "x")).unwrap();
        assert!((overlap(&s_photon(&reg, "y"), &out) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn all_catalog_elements_are_unitary() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c", "d", "e"]).unwrap();
        let elements = vec![
            make_hv_pbs(&reg, "a", "b", "c", "d").unwrap(),
            make_hv_pbs(&reg, "a", "b", "a", "d").unwrap(),
            make_fs_pbs(&reg, "a", "b", "c", "d").unwrap(),
            make_fs_pbs(&reg, "a", "b", "a", "d").unwrap(),
            make_bs_5050(&reg, "a", "b", "c", "d").unwrap(),
            make_bs_5050(&reg, "a", "b", "a", "b").unwrap(),
            make_pol_rotation(&reg, "a", 0.3).unwrap(),
            make_phase(&reg, "a", 1.1).unwrap(),
            make_sigma_x_plate(&reg, "a").unwrap(),
            make_hv_split(&reg, "a", "b", "c").unwrap(),
            make_fs_split(&reg, "a", "b", "c").unwrap(),
            make_route(&reg, "a", "e").unwrap(),
        ];
        for e in elements {
            assert!(
                e.unitarity_deviation() < UNITARITY_TOLERANCE,
                "{e} deviates by {}",
                e.unitarity_deviation()
            );
        }
    }

    #[test]
    fn duplicate_rails_are_rejected() {
        let reg = ModeRegistry::from_rails(&["a", "b", "c"]).unwrap();
        assert!(make_hv_pbs(&reg, "a", "a", "b", "c").is_err());
        assert!(make_hv_pbs(&reg, "a", "b", "c", "c").is_err());
        assert!(make_hv_split(&reg, "a", "a", "b").is_err());
    }

    #[test]
    fn custom_single_rail_rejects_non_unitary() {
        let reg = ModeRegistry::from_rails(&["a"]).unwrap();
        let bad = [
            [c(1.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0)],
        ];
        assert!(matches!(
            OpticalElement::single_rail(&reg, "a", bad),
            Err(Error::NotUnitary { .. })
        ));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::fock::FockState;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn random_state() -> impl Strategy<Value = FockState> {
        let amp = (-1.0f64..1.0, -1.0f64..1.0);
        let occ = proptest::collection::vec(0u8..2, 8);
        proptest::collection::vec((occ, amp), 1..6).prop_map(|raw| {
            let reg = ModeRegistry::from_rails(&["a", "b", "c", "d"]).unwrap();
            let mut state = FockState::zero(&reg);
            for (counts, (re, im)) in raw {
                let mut s = FockState::vacuum(&reg);
                for (m, &n) in counts.iter().enumerate() {
                    let (rail, pol) = (reg.mode_at(m).0.to_string(), reg.mode_at(m).1);
                    for _ in 0..n {
                        s = s.add_photon(&rail, pol).unwrap();
                    }
                }
                state = state.plus(&s.scaled(Complex64::new(re, im))).unwrap();
            }
            state
        })
    }

    fn any_element(reg: &Arc<ModeRegistry>, selector: u8, angle: f64) -> super::OpticalElement {
        match selector % 6 {
            0 => make_hv_pbs(reg, "a", "b", "c", "d").unwrap(),
            1 => make_fs_pbs(reg, "a", "b", "c", "d").unwrap(),
            2 => make_bs_5050(reg, "a", "b", "c", "d").unwrap(),
            3 => make_pol_rotation(reg, "b", angle).unwrap(),
            4 => make_phase(reg, "c", angle).unwrap(),
            _ => make_sigma_x_plate(reg, "d").unwrap(),
        }
    }

    proptest! {
        #[test]
        fn application_preserves_norm_and_photon_number(
            state in random_state(),
            selector in 0u8..6,
            angle in -3.2f64..3.2,
        ) {
            let reg = Arc::clone(state.registry());
            let element = any_element(&reg, selector, angle);
            let out = element.apply(&state).unwrap();
            prop_assert!((out.norm() - state.norm()).abs() < 1e-10);
            prop_assert_eq!(out.uniform_photon_number().is_some(), state.uniform_photon_number().is_some());
            if let (Some(a), Some(b)) = (state.uniform_photon_number(), out.uniform_photon_number()) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn rotations_compose_additively(
            t1 in -3.0f64..3.0,
            t2 in -3.0f64..3.0,
        ) {
            let reg = ModeRegistry::from_rails(&["a"]).unwrap();
            let r1 = make_pol_rotation(&reg, "a", t1).unwrap();
            let r2 = make_pol_rotation(&reg, "a", t2).unwrap();
            let sum = make_pol_rotation(&reg, "a", t1 + t2).unwrap();
            let probe = FockState::vacuum(&reg).add_photon("a", Pol::H).unwrap();
            let step = r2.apply(&r1.apply(&probe).unwrap()).unwrap();
            let direct = sum.apply(&probe).unwrap();
            let overlap = step.inner_product(&direct).unwrap();
            prop_assert!((overlap.re - 1.0).abs() < 1e-12);
        }
    }
}
