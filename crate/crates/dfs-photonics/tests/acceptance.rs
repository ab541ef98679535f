//! Acceptance gate: one test per release criterion, each printing a
//! single `[acceptance] ... PASS` line (visible with `--nocapture`) once
//! its assertions hold. Tolerances and sample counts are part of the
//! criteria and are asserted, not merely reported.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dfs_photonics::circuit::qubit_state;
use dfs_photonics::detection::{enumerate_outcomes, DetectorSpec, MeasBasis};
use dfs_photonics::dfs::{haar_unitary, CollectiveUnitary, LogicalBasis};
use dfs_photonics::elements::{
    apply_element, make_bs_5050, make_fs_pbs, make_fs_split, make_hv_pbs, make_hv_split,
    make_phase, make_pol_rotation, make_route, make_sigma_x_plate, OpticalElement,
};
use dfs_photonics::fock::{Complex64, FockState, ModeRegistry, Pol};
use dfs_photonics::protocols::{decoder, hnsg, joint, parity};

fn random_qubit(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    loop {
        let alpha = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        let beta = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm > 1e-3 {
            return (alpha / norm, beta / norm);
        }
    }
}

fn random_unit3(rng: &mut ChaCha8Rng) -> [Complex64; 3] {
    loop {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        let mut norm_sq = 0.0;
        for slot in &mut v {
            *slot = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
            norm_sq += slot.norm_sqr();
        }
        if norm_sq > 1e-6 {
            let norm = norm_sq.sqrt();
            for slot in &mut v {
                *slot /= norm;
            }
            return v;
        }
    }
}

#[test]
fn criterion_1_parity_check() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let circuit = parity::parity_check_circuit().unwrap();
    let registry = circuit.registry();
    for _ in 0..20 {
        let (alpha, beta) = random_qubit(&mut rng);
        let outcomes = circuit
            .measure(&parity::parity_check_input(&circuit, alpha, beta).unwrap())
            .unwrap();
        let plus = qubit_state(registry, parity::OUTPUT_RAIL, alpha, beta).unwrap();
        let minus = qubit_state(registry, parity::OUTPUT_RAIL, -alpha, beta).unwrap();
        let mut reject = 0.0;
        for outcome in &outcomes {
            let counts = outcome.pattern.entry(parity::QUBIT_RAIL).unwrap().counts;
            match counts {
                [1, 0] => {
                    assert!((outcome.probability - 0.25).abs() < 1e-10);
                    let fidelity = plus.inner_product(&outcome.conditional).unwrap().norm_sqr();
                    assert!(fidelity >= 1.0 - 1e-10);
                }
                [0, 1] => {
                    assert!((outcome.probability - 0.25).abs() < 1e-10);
                    let fidelity = minus.inner_product(&outcome.conditional).unwrap().norm_sqr();
                    assert!(fidelity >= 1.0 - 1e-10);
                }
                _ => reject += outcome.probability,
            }
        }
        assert!((reject - 0.5).abs() < 1e-10);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "ran in {elapsed:?}");
    println!(
        "[acceptance] criterion 1 (parity check): PASS — 20 random qubits, accept \
         probabilities 1/4 + 1/4, reject 1/2, conditional fidelities >= 1-1e-10 ({elapsed:.2?})"
    );
}

#[test]
fn criterion_2_joint_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let circuit = joint::joint_phase_circuit().unwrap();
    let registry = circuit.registry();
    for _ in 0..5 {
        let (alpha1, beta1) = random_qubit(&mut rng);
        let (alpha2, beta2) = random_qubit(&mut rng);
        let input =
            joint::joint_phase_input(&circuit, alpha1, beta1, alpha2, beta2).unwrap();
        let outcomes = circuit.measure(&input).unwrap();

        let intact = qubit_state(registry, joint::OUTPUT_RAILS[0], alpha1, beta1)
            .unwrap()
            .tensor(&qubit_state(registry, joint::OUTPUT_RAILS[1], alpha2, beta2).unwrap())
            .unwrap();
        let flipped = qubit_state(registry, joint::OUTPUT_RAILS[0], -alpha1, beta1)
            .unwrap()
            .tensor(&qubit_state(registry, joint::OUTPUT_RAILS[1], -alpha2, beta2).unwrap())
            .unwrap();

        let mut reject = 0.0;
        for outcome in &outcomes {
            if !joint::is_accept(&outcome.pattern) {
                reject += outcome.probability;
                continue;
            }
            assert!((outcome.probability - 1.0 / 16.0).abs() < 1e-10);
            let ff = joint::HERALD_RAILS
                .iter()
                .all(|rail| outcome.pattern.entry(rail).unwrap().counts == [1, 0]);
            let target = if ff { &intact } else { &flipped };
            let fidelity = target.inner_product(&outcome.conditional).unwrap().norm_sqr();
            assert!(fidelity >= 1.0 - 1e-10);
        }
        assert!((reject - 7.0 / 8.0).abs() < 1e-10);
    }
    println!(
        "[acceptance] criterion 2 (joint phase): PASS — accept probabilities 1/16 + 1/16, \
         reject 7/8, double-sign-flip conditional fidelities >= 1-1e-10"
    );
}

#[test]
fn criterion_3_generator_grid() {
    let started = Instant::now();
    let thetas = [
        0.0,
        std::f64::consts::FRAC_PI_8,
        std::f64::consts::FRAC_PI_4,
        3.0 * std::f64::consts::FRAC_PI_8,
        std::f64::consts::FRAC_PI_2,
    ];
    let phis = [
        0.0,
        std::f64::consts::FRAC_PI_3,
        std::f64::consts::PI,
        1.5 * std::f64::consts::PI,
    ];
    for theta in thetas {
        for phi in phis {
            let report = hnsg::hnsg_run(&hnsg::HnsgConfig::new(theta, phi)).unwrap();
            assert!(
                (report.accept_probability - 1.0 / 32.0).abs() < 1e-10,
                "theta={theta} phi={phi}"
            );
            assert!(report.target_fidelity >= 1.0 - 1e-10);
            assert!((report.mirrored_probability - 1.0 / 32.0).abs() < 1e-10);
            assert!(report.mirrored_fidelity >= 1.0 - 1e-10);
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "grid ran in {elapsed:?}");
    println!(
        "[acceptance] criterion 3 (heralded generator grid): PASS — 5x4 angle grid, accept \
         probability 1/32, target and mirrored fidelities >= 1-1e-10 ({elapsed:.2?})"
    );
}

#[test]
fn criterion_4_qutrit_zero() {
    let report = hnsg::hnsg_run(&hnsg::HnsgConfig::qutrit_zero()).unwrap();
    assert!((report.accept_probability - 1.0 / 32.0).abs() < 1e-10);
    assert!(report.target_fidelity >= 1.0 - 1e-10);
    let basis = LogicalBasis::new(hnsg::OUTPUT_RAILS).unwrap();
    let overlap = basis.state(0, 1).inner_product(&report.conditional).unwrap();
    assert!(overlap.norm_sqr() >= 1.0 - 1e-10);
    println!(
        "[acceptance] criterion 4 (qutrit zero): PASS — merged configuration heralds the \
         zero state at probability 1/32 with fidelity >= 1-1e-10"
    );
}

#[test]
fn criterion_5_basis_integrity() {
    let basis = LogicalBasis::new(hnsg::OUTPUT_RAILS).unwrap();
    assert!(basis.gram_deviation() < 1e-12);

    let rails = basis.rails();
    let inner = [rails[1].as_str(), rails[2].as_str()];
    let outer = [rails[0].as_str(), rails[3].as_str()];

    // Sign-flipping the two inner photons carries one gauge-2 state onto
    // minus the other.
    let flipped = CollectiveUnitary::sigma_z()
        .apply(basis.state(2, 1), &inner)
        .unwrap();
    let diff = flipped
        .plus(&basis.state(1, 1).scaled(Complex64::new(1.0, 0.0)))
        .unwrap();
    assert!(diff.norm() < 1e-12, "amplitude-level identity, diff {}", diff.norm());

    // Exchanging H and V on the two outer photons merges the equal
    // superposition of the gauge-2 states into the zero state.
    let merged = CollectiveUnitary::sigma_x()
        .apply(
            &basis
                .state(1, 1)
                .plus(basis.state(2, 1))
                .unwrap()
                .scaled(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)),
            &outer,
        )
        .unwrap();
    let diff = merged.plus(&basis.state(0, 1).scaled(Complex64::new(-1.0, 0.0))).unwrap();
    assert!(diff.norm() < 1e-12, "merge identity, diff {}", diff.norm());

    println!(
        "[acceptance] criterion 5 (basis integrity): PASS — nine-state Gram matrix is the \
         identity within 1e-12 and both amplitude-level code identities hold within 1e-12"
    );
}

#[test]
fn criterion_6_dfs_protection() {
    let basis = LogicalBasis::new(hnsg::OUTPUT_RAILS).unwrap();
    let rails: Vec<&str> = basis.rails().iter().map(|r| r.as_str()).collect();
    let signs = basis.sign_calibration().unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..100 {
        let noise = haar_unitary(&mut rng);
        for q in 0..3 {
            assert!(basis.confinement_norm(&noise, q).unwrap() < 1e-10);
        }
        let reference = basis.gauge_matrix(&noise, 0).unwrap();
        for q in 1..3 {
            let block = basis.gauge_matrix(&noise, q).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let calibrated = block[i][j] * signs[i][j];
                    assert!(
                        (calibrated - reference[i][j]).norm() < 1e-10,
                        "gauge blocks differ at ({i},{j})"
                    );
                }
            }
        }
    }

    let mut max_nu_dev = 0.0f64;
    for _ in 0..100 {
        let nu = random_unit3(&mut rng);
        let shared_row = random_unit3(&mut rng);
        let encoded = basis.encode(&nu, &[shared_row; 3]).unwrap();
        let noise = haar_unitary(&mut rng);
        let moved = noise.apply(&encoded, &rails).unwrap();
        let decomposition = basis.decompose(&moved).unwrap();

        let anchor = (0..3)
            .max_by(|&a, &b| nu[a].norm_sqr().partial_cmp(&nu[b].norm_sqr()).unwrap())
            .unwrap();
        let ratio = decomposition.nu[anchor] / nu[anchor];
        let phase = ratio / ratio.norm();
        for (q, target) in nu.iter().enumerate() {
            max_nu_dev = max_nu_dev.max((decomposition.nu[q] - phase * target).norm());
            if decomposition.nu[q].norm() > 1e-6 {
                let row_norm_sq: f64 = decomposition.omega[q]
                    .iter()
                    .map(|w| w.norm_sqr())
                    .sum();
                assert!((row_norm_sq.sqrt() - 1.0).abs() < 1e-10);
            }
        }
    }
    assert!(max_nu_dev < 1e-9, "max logical-coefficient deviation {max_nu_dev:.3e}");

    println!(
        "[acceptance] criterion 6 (collective-noise protection): PASS — 100 random noise \
         unitaries confine every block within 1e-10 with equal gauge action; 100 random \
         encoded states recover their logical coefficients within 1e-9 (max {max_nu_dev:.3e})"
    );
}

#[test]
fn criterion_7_decoder() {
    let circuit = decoder::decoder_circuit().unwrap();
    let table = decoder::PatternTable::calibrate(&circuit).unwrap();
    for half in [table.top(), table.bottom()] {
        let singlets: Vec<_> = half
            .iter()
            .filter(|(_, sig)| **sig == decoder::PairSig::Singlet)
            .collect();
        let triplets = half
            .values()
            .filter(|sig| **sig == decoder::PairSig::Triplet)
            .count();
        assert_eq!(singlets.len(), 2);
        assert_eq!(triplets, 6);
        for (pattern, _) in singlets {
            let firing: Vec<_> = pattern.iter().filter(|(_, e)| e.total() > 0).collect();
            assert_eq!(firing.len(), 2, "antisymmetric signature is a cross-counter coincidence");
            assert!(firing.iter().all(|(_, e)| e.total() == 1));
        }
    }

    let basis = LogicalBasis::new(decoder::INPUT_RAILS).unwrap();
    let rails: Vec<&str> = basis.rails().iter().map(|r| r.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..200 {
        let q = rng.random_range(0..3usize);
        let k = rng.random_range(0..3usize);
        let noise = haar_unitary(&mut rng);
        let moved = noise.apply(basis.state(q, k), &rails).unwrap();
        let events = decoder::decode(&circuit, &table, &moved).unwrap();
        let totals = decoder::verdict_totals(&events);
        let total: f64 = totals.iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "probabilities sum to {total}");
        assert!(
            (totals[q] - 1.0).abs() < 1e-10,
            "state ({q},{k}) classified {totals:?}"
        );
    }

    println!(
        "[acceptance] criterion 7 (decoder): PASS — reference patterns partition into 2 \
         antisymmetric + 6 symmetric per half; 200 noise-evolved basis states classify \
         correctly with single-shot probability 1 within 1e-10"
    );
}

#[test]
fn criterion_8_property_suites() {
    let started = Instant::now();
    let registry = ModeRegistry::from_rails(&["r1", "r2", "r3", "r4"]).unwrap();
    let rails = ["r1", "r2", "r3", "r4"];

    let pick_pair = |rng: &mut ChaCha8Rng| {
        let a = rng.random_range(0..4usize);
        let mut b = rng.random_range(0..3usize);
        if b >= a {
            b += 1;
        }
        (rails[a], rails[b])
    };
    let random_element = |rng: &mut ChaCha8Rng| -> OpticalElement {
        match rng.random_range(0..9u8) {
            0 => {
                let (a, b) = pick_pair(rng);
                make_hv_pbs(&registry, a, b, a, b).unwrap()
            }
            1 => {
                let (a, b) = pick_pair(rng);
                make_fs_pbs(&registry, a, b, a, b).unwrap()
            }
            2 => {
                let (a, b) = pick_pair(rng);
                make_bs_5050(&registry, a, b, a, b).unwrap()
            }
            3 => make_pol_rotation(&registry, rails[rng.random_range(0..4usize)], rng.random::<f64>() * 7.0).unwrap(),
            4 => make_phase(&registry, rails[rng.random_range(0..4usize)], rng.random::<f64>() * 7.0).unwrap(),
            5 => make_sigma_x_plate(&registry, rails[rng.random_range(0..4usize)]).unwrap(),
            6 => make_hv_split(&registry, "r1", "r2", "r3").unwrap(),
            7 => make_fs_split(&registry, "r2", "r3", "r4").unwrap(),
            _ => {
                let (a, b) = pick_pair(rng);
                make_route(&registry, a, b).unwrap()
            }
        }
    };
    let random_state = |rng: &mut ChaCha8Rng, photons: u32| -> FockState {
        loop {
            let mut state = FockState::zero(&registry);
            for _ in 0..3 {
                let mut ket = FockState::vacuum(&registry);
                for _ in 0..photons {
                    let rail = rails[rng.random_range(0..4usize)];
                    let pol = if rng.random::<bool>() { Pol::H } else { Pol::V };
                    ket = ket.add_photon(rail, pol).unwrap();
                }
                let amp = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
                state = state.plus(&ket.scaled(amp)).unwrap();
            }
            if state.norm() > 1e-3 {
                return state.normalized().unwrap();
            }
        }
    };

    // Suite A: every constructed element is unitary.
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    for _ in 0..125 {
        assert!(random_element(&mut rng).unitarity_deviation() < 1e-12);
    }

    // Suite B: elements preserve norm and photon number.
    let mut rng = ChaCha8Rng::seed_from_u64(802);
    for _ in 0..125 {
        let photons = rng.random_range(1..4u32);
        let state = random_state(&mut rng, photons);
        let element = random_element(&mut rng);
        let moved = apply_element(&state, &element).unwrap();
        assert!((moved.norm() - 1.0).abs() < 1e-10);
        assert_eq!(moved.uniform_photon_number(), Some(photons));
    }

    // Suite C: outcome enumeration is complete.
    let mut rng = ChaCha8Rng::seed_from_u64(803);
    for _ in 0..125 {
        let photons = rng.random_range(1..4u32);
        let state = random_state(&mut rng, photons);
        let n_detectors = rng.random_range(1..3usize);
        let detectors: Vec<DetectorSpec> = (0..n_detectors)
            .map(|i| {
                let basis = if rng.random::<bool>() { MeasBasis::Hv } else { MeasBasis::Fs };
                DetectorSpec::new(rails[i], basis)
            })
            .collect();
        let outcomes = enumerate_outcomes(&state, &detectors).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    // Suite D: decompose inverts encode.
    let mut rng = ChaCha8Rng::seed_from_u64(804);
    let basis = LogicalBasis::new(hnsg::OUTPUT_RAILS).unwrap();
    for _ in 0..125 {
        let nu = random_unit3(&mut rng);
        let omega = [
            random_unit3(&mut rng),
            random_unit3(&mut rng),
            random_unit3(&mut rng),
        ];
        let encoded = basis.encode(&nu, &omega).unwrap();
        let decomposition = basis.decompose(&encoded).unwrap();
        assert!(decomposition.residual < 1e-10);
        let rebuilt = basis
            .encode(&decomposition.nu, &decomposition.omega)
            .unwrap();
        let overlap = rebuilt.inner_product(&encoded).unwrap();
        assert!(overlap.norm_sqr() >= 1.0 - 1e-10);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "suites ran in {elapsed:?}");
    println!(
        "[acceptance] criterion 8 (property suites): PASS — 500 randomized cases across \
         unitarity, conservation, enumeration completeness, and round-trip suites ({elapsed:.2?})"
    );
}
