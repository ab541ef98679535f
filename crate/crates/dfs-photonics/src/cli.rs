//! The `dfs-herald` command-line front end.
//!
//! Six subcommands expose the protocol runners and the code-space
//! verifications for batch use:
//!
//! * `herald` — run the heralded generator, report probabilities,
//!   fidelities, and the heralded state.
//! * `parity-check` — run the single-qubit parity check.
//! * `joint-phase` — run the two-qubit joint phase measurement.
//! * `decode` — classify a state file with the Bell-sign decoder.
//! * `noise-sweep` — verify logical-coefficient invariance under random
//!   collective noise.
//! * `basis` — report the nine code basis states and their Gram matrix.
//!
//! Reports are human-readable by default and machine-readable JSON with
//! `--json`; `--output` redirects the report to a file. Complex inputs
//! are given as paired `--x-re`/`--x-im` flags and angles in radians.
//! Identical arguments (and seed) always produce byte-identical JSON, so
//! reports can be diffed and archived.
//!
//! Exit codes: `0` success, `1` runtime failure (unreadable or malformed
//! input file, zero-probability herald), `2` argument or validation
//! errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::circuit::qubit_state;
use crate::detection::{DetectionOutcome, DetectionPattern};
use crate::dfs::{haar_unitary, LogicalBasis};
use crate::error::Error;
use crate::fock::{Complex64, FockState};
use crate::protocols::{decoder, hnsg, joint, parity};

/// Schema tag carried by every JSON report.
pub const SCHEMA: &str = "dfs-herald/1";

/// Default seed for `noise-sweep`, fixed so that published reports are
/// reproducible without extra flags.
pub const DEFAULT_SEED: u64 = 7;

/// Default sample count for `noise-sweep`.
pub const DEFAULT_SAMPLES: u64 = 100;

/// Tolerance quoted by `noise-sweep` for logical-coefficient recovery.
pub const SWEEP_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "dfs-herald",
    version,
    about = "Simulate the heralded four-photon code generator, its building-block \
             measurements, and the receiver-side decoder."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the heralded generator and report the accepted state.
    Herald(HeraldArgs),
    /// Run the single-qubit parity check on alpha |H> + beta |V>.
    ParityCheck(ParityArgs),
    /// Run the joint phase measurement on a two-qubit product state.
    JointPhase(JointArgs),
    /// Classify a four-rail state file with the Bell-sign decoder.
    Decode(DecodeArgs),
    /// Verify logical-coefficient invariance under random collective noise.
    NoiseSweep(SweepArgs),
    /// Report the nine code basis states and their Gram matrix.
    Basis(BasisArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Emit the report as JSON instead of human-readable text.
    #[arg(long)]
    json: bool,
    /// Write the report to this file instead of standard output.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HeraldArgs {
    /// Mixing angle between the two logical branches, in radians.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Relative phase of the second branch, in radians.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Use the qutrit-zero configuration instead of explicit angles.
    #[arg(long, conflicts_with_all = ["theta", "phi"])]
    qutrit_zero: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ParityArgs {
    /// Real part of the H amplitude.
    #[arg(long, default_value_t = 1.0)]
    alpha_re: f64,
    /// Imaginary part of the H amplitude.
    #[arg(long, default_value_t = 0.0)]
    alpha_im: f64,
    /// Real part of the V amplitude.
    #[arg(long, default_value_t = 0.0)]
    beta_re: f64,
    /// Imaginary part of the V amplitude.
    #[arg(long, default_value_t = 0.0)]
    beta_im: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct JointArgs {
    /// Real part of the first qubit's H amplitude.
    #[arg(long, default_value_t = 1.0)]
    alpha1_re: f64,
    /// Imaginary part of the first qubit's H amplitude.
    #[arg(long, default_value_t = 0.0)]
    alpha1_im: f64,
    /// Real part of the first qubit's V amplitude.
    #[arg(long, default_value_t = 0.0)]
    beta1_re: f64,
    /// Imaginary part of the first qubit's V amplitude.
    #[arg(long, default_value_t = 0.0)]
    beta1_im: f64,
    /// Real part of the second qubit's H amplitude.
    #[arg(long, default_value_t = 1.0)]
    alpha2_re: f64,
    /// Imaginary part of the second qubit's H amplitude.
    #[arg(long, default_value_t = 0.0)]
    alpha2_im: f64,
    /// Real part of the second qubit's V amplitude.
    #[arg(long, default_value_t = 0.0)]
    beta2_re: f64,
    /// Imaginary part of the second qubit's V amplitude.
    #[arg(long, default_value_t = 0.0)]
    beta2_im: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct DecodeArgs {
    /// State file to classify: either a bare state, or a herald report
    /// whose conditional state is extracted.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Number of random noise samples.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    /// Base RNG seed; sample i uses seed + i.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BasisArgs {
    /// Also list all nine basis states amplitude by amplitude.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    out: OutputArgs,
}

/// A failure with its exit-code classification.
enum Failure {
    /// Bad or inconsistent request: exit code 2.
    Validation(String),
    /// The request was well-formed but could not be completed: exit 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        match err {
            Error::NotNormalized { .. } => Failure::Validation(err.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

struct Report {
    json: Value,
    human: String,
}

/// Parse `argv` and execute one command, writing the report to `out`.
/// Returns the process exit code; diagnostics go to standard error.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{err}");
                    0
                }
                _ => {
                    eprintln!("{err}");
                    2
                }
            };
        }
    };
    let (result, out_args) = match &cli.command {
        Command::Herald(args) => (cmd_herald(args), &args.out),
        Command::ParityCheck(args) => (cmd_parity(args), &args.out),
        Command::JointPhase(args) => (cmd_joint(args), &args.out),
        Command::Decode(args) => (cmd_decode(args), &args.out),
        Command::NoiseSweep(args) => (cmd_sweep(args), &args.out),
        Command::Basis(args) => (cmd_basis(args), &args.out),
    };
    let report = match result {
        Ok(report) => report,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let text = if out_args.json {
        let mut s = serde_json::to_string_pretty(&report.json)
            .expect("report serialization cannot fail");
        s.push('\n');
        s
    } else {
        report.human
    };
    match &out_args.output {
        Some(path) => {
            if let Err(err) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return 1;
            }
        }
        None => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
        }
    }
    0
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:+.6} {:+.6}i", z.re, z.im)
}

fn cmd_herald(args: &HeraldArgs) -> Result<Report, Failure> {
    let config = if args.qutrit_zero {
        hnsg::HnsgConfig::qutrit_zero()
    } else {
        hnsg::HnsgConfig::new(args.theta, args.phi)
    };
    let report = hnsg::hnsg_run(&config)?;
    let weights = report.decomposition.probabilities();
    let json = json!({
        "schema": SCHEMA,
        "command": "herald",
        "config": {
            "theta": config.theta,
            "phi": config.phi,
            "qutrit_zero": config.merge_to_zero,
        },
        "accept_probability": report.accept_probability,
        "target_fidelity": report.target_fidelity,
        "mirrored_probability": report.mirrored_probability,
        "mirrored_fidelity": report.mirrored_fidelity,
        "logical_weights": weights.as_slice(),
        "decomposition": report.decomposition.to_json(),
        "conditional": report.conditional.to_json(),
    });
    let mut human = String::new();
    let _ = writeln!(human, "heralded generator");
    let _ = writeln!(
        human,
        "  theta: {:.6}  phi: {:.6}  qutrit-zero: {}",
        config.theta, config.phi, config.merge_to_zero
    );
    let _ = writeln!(
        human,
        "  accept probability:   {:.12}",
        report.accept_probability
    );
    let _ = writeln!(human, "  target fidelity:      {:.12}", report.target_fidelity);
    let _ = writeln!(
        human,
        "  mirrored probability: {:.12}",
        report.mirrored_probability
    );
    let _ = writeln!(human, "  mirrored fidelity:    {:.12}", report.mirrored_fidelity);
    let _ = writeln!(
        human,
        "  logical weights: zero {:.6}  one {:.6}  two {:.6}",
        weights[0], weights[1], weights[2]
    );
    let _ = writeln!(
        human,
        "  residual outside code: {:.3e}",
        report.decomposition.residual
    );
    let _ = writeln!(human, "  heralded state: {}", report.conditional);
    Ok(Report { json, human })
}

fn accept_entry(
    outcomes: &[DetectionOutcome],
    matches: impl Fn(&DetectionPattern) -> bool,
    target: &FockState,
) -> Result<(f64, f64), Failure> {
    let outcome = outcomes
        .iter()
        .find(|o| matches(&o.pattern))
        .ok_or(Error::ZeroProbabilityPattern)?;
    let fidelity = target.inner_product(&outcome.conditional)?.norm_sqr();
    Ok((outcome.probability, fidelity))
}

fn counts_on(pattern: &DetectionPattern, rail: &str) -> [u8; 2] {
    pattern
        .entry(rail)
        .map(|entry| entry.counts)
        .unwrap_or([0, 0])
}

fn cmd_parity(args: &ParityArgs) -> Result<Report, Failure> {
    let alpha = Complex64::new(args.alpha_re, args.alpha_im);
    let beta = Complex64::new(args.beta_re, args.beta_im);
    let circuit = parity::parity_check_circuit()?;
    let input = parity::parity_check_input(&circuit, alpha, beta)?;
    let outcomes = circuit.measure(&input)?;

    let registry = circuit.registry();
    let plus = qubit_state(registry, parity::OUTPUT_RAIL, alpha, beta)?;
    let minus = qubit_state(registry, parity::OUTPUT_RAIL, -alpha, beta)?;
    let (p_f, fid_f) = accept_entry(
        &outcomes,
        |p| counts_on(p, parity::QUBIT_RAIL) == [1, 0],
        &plus,
    )?;
    let (p_s, fid_s) = accept_entry(
        &outcomes,
        |p| counts_on(p, parity::QUBIT_RAIL) == [0, 1],
        &minus,
    )?;
    let reject: f64 = outcomes
        .iter()
        .filter(|o| !parity::is_accept(&o.pattern))
        .map(|o| o.probability)
        .sum();

    let json = json!({
        "schema": SCHEMA,
        "command": "parity-check",
        "input": { "alpha": complex_json(alpha), "beta": complex_json(beta) },
        "accept_f": { "probability": p_f, "fidelity": fid_f },
        "accept_s": { "probability": p_s, "fidelity": fid_s },
        "reject_probability": reject,
    });
    let mut human = String::new();
    let _ = writeln!(human, "parity check on alpha |H> + beta |V>");
    let _ = writeln!(human, "  alpha: {}", fmt_complex(alpha));
    let _ = writeln!(human, "  beta:  {}", fmt_complex(beta));
    let _ = writeln!(
        human,
        "  accept, 1 F heralded: probability {:.12}, fidelity vs  alpha|H>+beta|V>: {:.12}",
        p_f, fid_f
    );
    let _ = writeln!(
        human,
        "  accept, 1 S heralded: probability {:.12}, fidelity vs -alpha|H>+beta|V>: {:.12}",
        p_s, fid_s
    );
    let _ = writeln!(human, "  reject: probability {:.12}", reject);
    Ok(Report { json, human })
}

fn cmd_joint(args: &JointArgs) -> Result<Report, Failure> {
    let alpha1 = Complex64::new(args.alpha1_re, args.alpha1_im);
    let beta1 = Complex64::new(args.beta1_re, args.beta1_im);
    let alpha2 = Complex64::new(args.alpha2_re, args.alpha2_im);
    let beta2 = Complex64::new(args.beta2_re, args.beta2_im);
    let circuit = joint::joint_phase_circuit()?;
    let input = joint::joint_phase_input(&circuit, alpha1, beta1, alpha2, beta2)?;
    let outcomes = circuit.measure(&input)?;

    let registry = circuit.registry();
    let intact = qubit_state(registry, joint::OUTPUT_RAILS[0], alpha1, beta1)?
        .tensor(&qubit_state(registry, joint::OUTPUT_RAILS[1], alpha2, beta2)?)?;
    let flipped = qubit_state(registry, joint::OUTPUT_RAILS[0], -alpha1, beta1)?
        .tensor(&qubit_state(registry, joint::OUTPUT_RAILS[1], -alpha2, beta2)?)?;
    let herald_counts = |p: &DetectionPattern, slot: usize| {
        joint::HERALD_RAILS
            .iter()
            .all(|rail| counts_on(p, rail)[slot] == 1 && counts_on(p, rail)[1 - slot] == 0)
    };
    let (p_ff, fid_ff) = accept_entry(&outcomes, |p| herald_counts(p, 0), &intact)?;
    let (p_ss, fid_ss) = accept_entry(&outcomes, |p| herald_counts(p, 1), &flipped)?;
    let reject: f64 = outcomes
        .iter()
        .filter(|o| !joint::is_accept(&o.pattern))
        .map(|o| o.probability)
        .sum();

    let json = json!({
        "schema": SCHEMA,
        "command": "joint-phase",
        "input": {
            "alpha1": complex_json(alpha1),
            "beta1": complex_json(beta1),
            "alpha2": complex_json(alpha2),
            "beta2": complex_json(beta2),
        },
        "accept_ff": { "probability": p_ff, "fidelity": fid_ff },
        "accept_ss": { "probability": p_ss, "fidelity": fid_ss },
        "reject_probability": reject,
    });
    let mut human = String::new();
    let _ = writeln!(human, "joint phase measurement on a two-qubit product state");
    let _ = writeln!(
        human,
        "  qubit 1: alpha {}   beta {}",
        fmt_complex(alpha1),
        fmt_complex(beta1)
    );
    let _ = writeln!(
        human,
        "  qubit 2: alpha {}   beta {}",
        fmt_complex(alpha2),
        fmt_complex(beta2)
    );
    let _ = writeln!(
        human,
        "  accept F,F: probability {:.12}, fidelity vs input product: {:.12}",
        p_ff, fid_ff
    );
    let _ = writeln!(
        human,
        "  accept S,S: probability {:.12}, fidelity vs sign-flipped product: {:.12}",
        p_ss, fid_ss
    );
    let _ = writeln!(human, "  reject: probability {:.12}", reject);
    Ok(Report { json, human })
}

fn cmd_decode(args: &DecodeArgs) -> Result<Report, Failure> {
    let text = fs::read_to_string(&args.input).map_err(|err| {
        Failure::Runtime(format!("cannot read {}: {err}", args.input.display()))
    })?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|err| Failure::Runtime(format!("malformed JSON: {err}")))?;
    let state = if value.get("schema").is_some() {
        let conditional = value.get("conditional").ok_or_else(|| {
            Failure::Runtime("report file carries no conditional state".to_string())
        })?;
        FockState::from_json(conditional)?
    } else {
        FockState::from_json(&value)?
    };

    let circuit = decoder::decoder_circuit()?;
    let table = decoder::PatternTable::calibrate(&circuit)?;
    let events = decoder::decode(&circuit, &table, &state)?;
    let totals = decoder::verdict_totals(&events);

    let events_json: Vec<Value> = events
        .iter()
        .map(|e| {
            json!({
                "label": e.label.as_str(),
                "pattern": e.pattern.to_json(),
                "probability": e.probability,
            })
        })
        .collect();
    let json = json!({
        "schema": SCHEMA,
        "command": "decode",
        "verdicts": {
            "zero": totals[0],
            "one": totals[1],
            "two": totals[2],
            "reject": totals[3],
        },
        "events": events_json,
    });
    let mut human = String::new();
    let _ = writeln!(human, "decoder verdicts");
    let _ = writeln!(human, "  zero:   {:.12}", totals[0]);
    let _ = writeln!(human, "  one:    {:.12}", totals[1]);
    let _ = writeln!(human, "  two:    {:.12}", totals[2]);
    let _ = writeln!(human, "  reject: {:.12}", totals[3]);
    let _ = writeln!(human, "  counter patterns:");
    for event in &events {
        let _ = writeln!(
            human,
            "    {:<6} {:.12}  {}",
            event.label, event.probability, event.pattern
        );
    }
    Ok(Report { json, human })
}

fn random_unit3(rng: &mut ChaCha8Rng) -> [Complex64; 3] {
    loop {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        let mut norm_sq = 0.0;
        for slot in &mut v {
            let re = rng.random::<f64>() * 2.0 - 1.0;
            let im = rng.random::<f64>() * 2.0 - 1.0;
            *slot = Complex64::new(re, im);
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

fn nu_deviation(reference: &[Complex64; 3], recovered: &[Complex64; 3]) -> f64 {
    let anchor = (0..3)
        .max_by(|&a, &b| {
            reference[a]
                .norm_sqr()
                .partial_cmp(&reference[b].norm_sqr())
                .expect("finite amplitudes compare")
        })
        .expect("three components");
    let ratio = recovered[anchor] / reference[anchor];
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (0..3)
        .map(|q| (recovered[q] - phase * reference[q]).norm())
        .fold(0.0, f64::max)
}

fn cmd_sweep(args: &SweepArgs) -> Result<Report, Failure> {
    let basis = LogicalBasis::new(hnsg::OUTPUT_RAILS)?;
    let rails: Vec<&str> = basis.rails().iter().map(|r| r.as_str()).collect();
    let mut max_nu_deviation = 0.0f64;
    let mut max_residual = 0.0f64;
    for i in 0..args.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(i));
        let nu = random_unit3(&mut rng);
        let shared_row = random_unit3(&mut rng);
        let omega = [shared_row; 3];
        let encoded = basis.encode(&nu, &omega)?;
        let noise = haar_unitary(&mut rng);
        let moved = noise.apply(&encoded, &rails)?;
        let decomposition = basis.decompose(&moved)?;
        max_nu_deviation = max_nu_deviation.max(nu_deviation(&nu, &decomposition.nu));
        max_residual = max_residual.max(decomposition.residual);
    }
    let within = max_nu_deviation < SWEEP_TOLERANCE;

    let json = json!({
        "schema": SCHEMA,
        "command": "noise-sweep",
        "samples": args.samples,
        "seed": args.seed,
        "max_nu_deviation": max_nu_deviation,
        "max_residual": max_residual,
        "tolerance": SWEEP_TOLERANCE,
        "within_tolerance": within,
    });
    let mut human = String::new();
    let _ = writeln!(human, "collective-noise sweep");
    let _ = writeln!(human, "  samples: {}  seed: {}", args.samples, args.seed);
    let _ = writeln!(
        human,
        "  max |nu_out - nu_in| (global phase aligned): {:.3e}",
        max_nu_deviation
    );
    let _ = writeln!(human, "  max residual outside code: {:.3e}", max_residual);
    let _ = writeln!(
        human,
        "  within {:.0e} tolerance: {}",
        SWEEP_TOLERANCE,
        if within { "yes" } else { "no" }
    );
    Ok(Report { json, human })
}

fn cmd_basis(args: &BasisArgs) -> Result<Report, Failure> {
    let basis = LogicalBasis::new(hnsg::OUTPUT_RAILS)?;
    let gram = basis.gram_deviation();

    let mut states_json = Vec::new();
    if args.list {
        for q in 0..3 {
            for k in 0..3 {
                states_json.push(json!({
                    "q": q,
                    "k": k,
                    "state": basis.state(q, k).to_json(),
                }));
            }
        }
    }
    let mut json = json!({
        "schema": SCHEMA,
        "command": "basis",
        "rails": basis.rails().as_slice(),
        "gram_deviation": gram,
    });
    if args.list {
        json["states"] = Value::Array(states_json);
    }

    let mut human = String::new();
    let _ = writeln!(
        human,
        "four-photon code basis on rails {}",
        basis.rails().join(" ")
    );
    let _ = writeln!(
        human,
        "  nine states; Gram-matrix max deviation from identity: {:.3e}",
        gram
    );
    if args.list {
        for q in 0..3 {
            for k in 0..3 {
                let _ = writeln!(human, "  (q={q}, k={k}): {}", basis.state(q, k));
            }
        }
    }
    Ok(Report { json, human })
}
