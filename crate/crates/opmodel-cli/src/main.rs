//! `opmodel` — command-line front end for the statistical-model toolkit.
//!
//! Every subcommand prints one report (text lines by default, JSON with
//! `--json`) and exits with 0 when the checked property holds, 1 when it is
//! certified to fail, and 2 for inconclusive verdicts or bad input.

mod mapfile;
mod render;

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use opmodel::canonical::{
    bloch_mesh, chsh_classical, chsh_quantum, chsh_random_sweep, fuzziness_profile, kernel_of_povm,
    preimage_multiplicity_demo, ChshSettings,
};
use opmodel::maps::{
    cayley_presentation_map, good_embedding_report, good_extension_report, povm_embedding,
    sic_qubit_povm, tomography_trial_report, AffineStateMap, EmbeddingReport, ExtensionScheme,
    Verdict, WitnessStatus,
};
use opmodel::operators::{effect_complement, DensityOperator, Povm, C64};
use opmodel::qubit_cayley::CayleyEffect;
use opmodel::valuations::{
    state_from_valuation, valuation_round_trip, verify_additivity, EffectValuation,
};
use opmodel::wigner::{wigner_transform, Grid1D, WaveFunction, WignerTable};

use render::{fnum, fnum_vec, sig9, sig9_vec, Emitter};

const S_CEILING: f64 = 2.8284271247461903; // 2·√2
const SIGN_BOUND: f64 = 2.0;

#[derive(Parser)]
#[command(
    name = "opmodel",
    version,
    about = "Finite-dimensional statistical models: maps, verdicts, and demos"
)]
struct Cli {
    /// RNG seed for sampled checks (falls back to OPMODEL_SEED, then 7).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit the report as JSON instead of text lines.
    #[arg(long, global = true)]
    json: bool,

    /// Omit the generation timestamp so output is byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a statistics map represents every effect faithfully.
    EmbedCheck {
        /// Built-in map to check.
        #[arg(
            long,
            value_enum,
            conflicts_with = "map",
            required_unless_present = "map"
        )]
        preset: Option<EmbedPreset>,
        /// JSON file describing a custom map (see the README for the format).
        #[arg(long, value_name = "FILE")]
        map: Option<PathBuf>,
        /// Number of randomly sampled extreme effects to test.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Decision tolerance: a failure certificate counts only when its
        /// margin exceeds this, and a claimed representation counts only when
        /// re-applying its preimage reproduces the target this closely.
        #[arg(long, default_value = "1e-8", value_name = "EPS")]
        tol: f64,
    },
    /// Decide whether a reduction scheme makes the larger model an extension.
    ExtCheck {
        #[arg(long, value_enum)]
        preset: ExtPreset,
        /// Mesh size for the measure-averaging scheme (even split of the
        /// sphere; at least 4 points).
        #[arg(long, default_value_t = 200)]
        mesh: usize,
        /// System and ancilla dimensions for the trace-out scheme, e.g. 2,2.
        #[arg(long, default_value = "2,2", value_name = "D_SYS,D_ANC")]
        dims: String,
        /// Number of random surjectivity/effect samples.
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Evaluate the two-party correlation combination on shared directions.
    Chsh {
        /// Measurement directions as four angles in the x–z plane (degrees).
        #[arg(long, value_name = "A,A2,B,B2", conflicts_with = "sweep")]
        angles: Option<String>,
        /// Named geometry (the default when no directions are given).
        #[arg(long, value_enum, conflicts_with_all = ["angles", "sweep"])]
        preset: Option<ChshPreset>,
        /// Try this many random direction quadruples and report the largest
        /// combination value found.
        #[arg(long, value_name = "TRIALS")]
        sweep: Option<usize>,
    },
    /// Present qubit statistics on a mesh of pure states: sharp effects lift
    /// to fuzzy ones, and distinct measures share a barycenter.
    Mb {
        /// Number of mesh points on the sphere (at least 4).
        #[arg(long, default_value_t = 400)]
        mesh: usize,
        /// Sharp effect to lift: z-projection, x-projection, y-projection, or
        /// a path to a JSON file {"schema":"opmodel/1","a0":…,"a":[x,y,z]}.
        #[arg(long, default_value = "z-projection", value_name = "NAME|FILE")]
        effect: String,
        /// Write the lift's decile histogram to a CSV file (columns bin_low,
        /// bin_high, count; the final bin is closed at 1).
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Number of random effects used in the preimage-multiplicity demo.
        #[arg(long, default_value_t = 64)]
        preimage_samples: usize,
    },
    /// Tabulate a phase-space quasi-density and its marginals.
    Wigner {
        #[arg(long, value_enum, default_value_t = StateKind::Hermite1)]
        state: StateKind,
        /// Number of grid points per axis (even, at least 4).
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Half-width of the position window.
        #[arg(long, default_value_t = 8.0)]
        extent: f64,
        /// Position displacement for the coherent packet.
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        /// Momentum displacement for the coherent packet.
        #[arg(long, default_value_t = 0.0)]
        p0: f64,
        /// Weight of the hermite1 component in the mixed table.
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
        /// Write the full table as CSV (columns q, p, value).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Reconstruct random states from tetrahedron measurement statistics.
    Tomography {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Round-trip additive effect valuations back to states, and verify that
    /// a non-additive valuation is caught.
    GleasonEffects {
        /// Comma-separated list of dimensions to test, e.g. 2,3.
        #[arg(long, default_value = "2,3")]
        dims: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedPreset {
    /// Four-vector presentation of qubit states (invertible, faithful).
    Cayley,
    /// Tetrahedron statistics map into four-outcome distributions.
    Sic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtPreset {
    /// Trace out an ancilla.
    Ptrace,
    /// Average measures on meshed pure states to their barycenter.
    Mb,
    /// Decode four-vector coordinates back into a density operator.
    InverseCayley,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChshPreset {
    /// Measurement geometry reaching the quantum ceiling 2·√2.
    Tsirelson,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum StateKind {
    /// Gaussian ground packet.
    Gauss,
    /// First Hermite mode (the ground packet times its coordinate).
    Hermite1,
    /// Displaced Gaussian packet centred at (q0, p0).
    Coherent,
    /// Convex mixture of the gauss and hermite1 tables.
    Mixed,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let seed = match resolve_seed(cli.seed) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let emitter = Emitter::new(cli.json, cli.no_timestamp);
    let result = match cli.command {
        Command::EmbedCheck {
            preset,
            map,
            samples,
            tol,
        } => embed_check(&emitter, preset, map, samples, tol, seed),
        Command::ExtCheck {
            preset,
            mesh,
            dims,
            samples,
        } => ext_check(&emitter, preset, mesh, &dims, samples, seed),
        Command::Chsh {
            angles,
            preset,
            sweep,
        } => chsh(&emitter, angles.as_deref(), preset, sweep, seed),
        Command::Mb {
            mesh,
            effect,
            csv,
            preimage_samples,
        } => mb(&emitter, mesh, &effect, csv, preimage_samples, seed),
        Command::Wigner {
            state,
            grid,
            extent,
            q0,
            p0,
            weight,
            out,
        } => wigner(&emitter, state, grid, extent, q0, p0, weight, out),
        Command::Tomography { trials } => tomography(&emitter, trials, seed),
        Command::GleasonEffects { dims, trials } => gleason_effects(&emitter, &dims, trials, seed),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("OPMODEL_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("OPMODEL_SEED must be a decimal u64, got {v:?}")),
        Err(std::env::VarError::NotPresent) => Ok(7),
        Err(e) => Err(format!("OPMODEL_SEED: {e}")),
    }
}

fn parse_list(raw: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!(
            "{what} needs {n} comma-separated numbers, got {raw:?}"
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| format!("{what}: {p:?} is not a number"))
        })
        .collect()
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Good => 0,
        Verdict::NotGood => 1,
        Verdict::Inconclusive => 2,
    }
}

// ---------------------------------------------------------------------------
// embed-check

#[derive(Serialize)]
struct RankInfo {
    required: usize,
    found: usize,
    has_kernel_witness: bool,
}

#[derive(Serialize)]
struct CertificateInfo {
    label: String,
    threshold: f64,
    value_at_target: f64,
    margin: f64,
}

#[derive(Serialize)]
struct WitnessCounts {
    checked: usize,
    represented: usize,
    not_represented: usize,
    invalid_image: usize,
    undecided: usize,
}

#[derive(Serialize)]
struct EmbedOut {
    map: String,
    verdict: String,
    injective: bool,
    witnesses: WitnessCounts,
    max_pairing_gap: f64,
    feasibility_tol: f64,
    membership_tol: f64,
    decision_tol: f64,
    seed: u64,
    certificates: Vec<CertificateInfo>,
    notes: Vec<String>,
}

fn witness_counts(report: &EmbeddingReport) -> WitnessCounts {
    let mut counts = WitnessCounts {
        checked: report.witnesses.len(),
        represented: 0,
        not_represented: 0,
        invalid_image: 0,
        undecided: 0,
    };
    for w in &report.witnesses {
        match w.status {
            WitnessStatus::Represented { .. } => counts.represented += 1,
            WitnessStatus::NotRepresented { .. } => counts.not_represented += 1,
            WitnessStatus::InvalidImage { .. } => counts.invalid_image += 1,
            WitnessStatus::Undecided { .. } => counts.undecided += 1,
        }
    }
    counts
}

fn first_certificates(report: &EmbeddingReport, limit: usize) -> Vec<CertificateInfo> {
    report
        .witnesses
        .iter()
        .filter_map(|w| match &w.status {
            WitnessStatus::NotRepresented { certificate } => Some(CertificateInfo {
                label: w.label.clone(),
                threshold: sig9(certificate.threshold),
                value_at_target: sig9(certificate.value_at_target),
                margin: sig9(certificate.margin()),
            }),
            _ => None,
        })
        .take(limit)
        .collect()
}

fn embed_check(
    emitter: &Emitter,
    preset: Option<EmbedPreset>,
    map_path: Option<PathBuf>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<i32, String> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err("--tol must be a positive finite number".into());
    }
    let map: AffineStateMap = if let Some(path) = map_path {
        mapfile::load_map(&path)?
    } else {
        match preset.expect("clap enforces preset xor map") {
            EmbedPreset::Cayley => cayley_presentation_map().map_err(|e| e.to_string())?,
            EmbedPreset::Sic => povm_embedding(&sic_qubit_povm()).map_err(|e| e.to_string())?,
        }
    };
    let description = format!("{} → {}", map.source().describe(), map.target().describe());
    let report = good_embedding_report(&map, samples, seed).map_err(|e| e.to_string())?;

    // Re-judge the evidence at the requested tolerance.  Certificates are
    // decisive only above the margin `tol`; claimed preimages are re-applied
    // through the dual map and must land within `tol` of their target.
    let dual = map.dual();
    let mut decisive_certificate = false;
    let mut shaky_certificates = 0usize;
    let mut any_invalid = false;
    let mut worst_preimage_gap = 0.0f64;
    for w in &report.witnesses {
        match &w.status {
            WitnessStatus::NotRepresented { certificate } => {
                if certificate.margin() > tol {
                    decisive_certificate = true;
                } else {
                    shaky_certificates += 1;
                }
            }
            WitnessStatus::Represented { preimage } => {
                let image = dual.apply(preimage);
                let gap = image
                    .iter()
                    .zip(&w.coords)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                worst_preimage_gap = worst_preimage_gap.max(gap);
            }
            WitnessStatus::InvalidImage { .. } => any_invalid = true,
            WitnessStatus::Undecided { .. } => {}
        }
    }
    let mut verdict = report.verdict;
    let mut notes = report.notes.clone();
    match verdict {
        Verdict::NotGood if !decisive_certificate && !any_invalid => {
            verdict = Verdict::Inconclusive;
            notes.push(format!(
                "{shaky_certificates} certificate(s) have margins at or below {}; \
                 nothing is decisive at this tolerance",
                fnum(sig9(tol))
            ));
        }
        Verdict::Good if report.max_pairing_gap > tol || worst_preimage_gap > tol => {
            verdict = Verdict::Inconclusive;
            notes.push(format!(
                "pairing gap {} or preimage gap {} exceeds the requested tolerance {}",
                fnum(sig9(report.max_pairing_gap)),
                fnum(sig9(worst_preimage_gap)),
                fnum(sig9(tol))
            ));
        }
        _ => {}
    }

    let out = EmbedOut {
        map: description,
        verdict: verdict.to_string(),
        injective: map.injective(),
        witnesses: witness_counts(&report),
        max_pairing_gap: sig9(report.max_pairing_gap),
        feasibility_tol: report.feasibility_tol,
        membership_tol: report.membership_tol,
        decision_tol: tol,
        seed,
        certificates: first_certificates(&report, 3),
        notes,
    };
    let mut lines = vec![
        format!("map: {}", out.map),
        format!("verdict: {}", out.verdict),
        format!("injective: {}", out.injective),
        format!(
            "witnesses: {} checked, {} represented, {} not represented, {} invalid, {} undecided",
            out.witnesses.checked,
            out.witnesses.represented,
            out.witnesses.not_represented,
            out.witnesses.invalid_image,
            out.witnesses.undecided
        ),
        format!("max pairing gap: {}", fnum(out.max_pairing_gap)),
        format!("decision tolerance: {}", fnum(out.decision_tol)),
    ];
    for c in &out.certificates {
        lines.push(format!(
            "certificate[{}]: threshold {}, value {}, margin {}",
            c.label,
            fnum(c.threshold),
            fnum(c.value_at_target),
            fnum(c.margin)
        ));
    }
    for n in &out.notes {
        lines.push(format!("note: {n}"));
    }
    emitter.emit("embed-check", &out, &lines);
    Ok(verdict_code(verdict))
}

// ---------------------------------------------------------------------------
// ext-check

#[derive(Serialize)]
struct SurjectivityInfo {
    targets_checked: usize,
    max_gap: f64,
    passed: bool,
}

#[derive(Serialize)]
struct ExtOut {
    scheme: String,
    verdict: String,
    surjectivity: Option<SurjectivityInfo>,
    rank: Option<RankInfo>,
    witnesses: WitnessCounts,
    seed: u64,
    notes: Vec<String>,
}

fn ext_check(
    emitter: &Emitter,
    preset: ExtPreset,
    mesh: usize,
    dims: &str,
    samples: usize,
    seed: u64,
) -> Result<i32, String> {
    let scheme = match preset {
        ExtPreset::Ptrace => {
            let d = parse_list(dims, 2, "--dims")?;
            let (d_sys, d_anc) = (d[0] as usize, d[1] as usize);
            if d_sys < 2 || d_anc < 2 || d[0].fract() != 0.0 || d[1].fract() != 0.0 {
                return Err("--dims needs two integers, both at least 2".into());
            }
            ExtensionScheme::PartialTrace { d_sys, d_anc }
        }
        ExtPreset::Mb => {
            if mesh < 4 {
                return Err("--mesh must be at least 4".into());
            }
            ExtensionScheme::MisraBugajski {
                mesh: bloch_mesh(mesh).map_err(|e| e.to_string())?,
            }
        }
        ExtPreset::InverseCayley => ExtensionScheme::InverseCayley,
    };
    let map = scheme.reduction_map().map_err(|e| e.to_string())?;
    let description = format!("{} → {}", map.source().describe(), map.target().describe());
    let report = good_extension_report(&scheme, samples, seed).map_err(|e| e.to_string())?;
    let out = ExtOut {
        scheme: description,
        verdict: report.verdict.to_string(),
        surjectivity: report.surjectivity.as_ref().map(|s| SurjectivityInfo {
            targets_checked: s.checked,
            max_gap: sig9(s.max_gap),
            passed: s.passed,
        }),
        rank: report.rank.as_ref().map(|r| RankInfo {
            required: r.required,
            found: r.found,
            has_kernel_witness: r.kernel_witness.is_some(),
        }),
        witnesses: witness_counts(&report),
        seed,
        notes: report.notes.clone(),
    };
    let mut lines = vec![
        format!("scheme: {}", out.scheme),
        format!("verdict: {}", out.verdict),
    ];
    if let Some(s) = &out.surjectivity {
        lines.push(format!(
            "surjectivity: {} targets, max preimage gap {}, passed {}",
            s.targets_checked,
            fnum(s.max_gap),
            s.passed
        ));
    }
    if let Some(r) = &out.rank {
        lines.push(format!("dual rank: {} of {} required", r.found, r.required));
    }
    lines.push(format!(
        "effect transport: {} checked, {} valid, {} invalid",
        out.witnesses.checked, out.witnesses.represented, out.witnesses.invalid_image
    ));
    for n in &out.notes {
        lines.push(format!("note: {n}"));
    }
    emitter.emit("ext-check", &out, &lines);
    Ok(verdict_code(report.verdict))
}

// ---------------------------------------------------------------------------
// chsh

#[derive(Serialize)]
struct ChshOut {
    mode: String,
    s_value: f64,
    sign_bound: f64,
    ceiling: f64,
    exceeds_sign_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlations: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    route_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_trials: Option<usize>,
    seed: u64,
}

fn chsh(
    emitter: &Emitter,
    angles: Option<&str>,
    preset: Option<ChshPreset>,
    sweep: Option<usize>,
    seed: u64,
) -> Result<i32, String> {
    let out = if let Some(trials) = sweep {
        if trials == 0 {
            return Err("--sweep needs at least one trial".into());
        }
        let report = chsh_random_sweep(trials, seed).map_err(|e| e.to_string())?;
        ChshOut {
            mode: format!("sweep({})", report.trials),
            s_value: sig9(report.max_s),
            sign_bound: SIGN_BOUND,
            ceiling: sig9(S_CEILING),
            exceeds_sign_bound: report.max_s > SIGN_BOUND,
            correlations: None,
            route_gap: None,
            sweep_trials: Some(report.trials),
            seed,
        }
    } else {
        let (mode, settings) = match angles {
            Some(raw) => {
                let a = parse_list(raw, 4, "--angles")?;
                (
                    format!("angles({raw})"),
                    ChshSettings::from_angles_deg([a[0], a[1], a[2], a[3]]),
                )
            }
            None => match preset.unwrap_or(ChshPreset::Tsirelson) {
                ChshPreset::Tsirelson => {
                    ("preset(tsirelson)".to_string(), ChshSettings::tsirelson())
                }
            },
        };
        let quantum = chsh_quantum(&settings).map_err(|e| e.to_string())?;
        let kernel = chsh_classical(&settings).map_err(|e| e.to_string())?;
        let route_gap = quantum
            .correlations
            .iter()
            .zip(kernel.correlations)
            .map(|(a, b)| (a - b).abs())
            .fold((quantum.s_value - kernel.s_value).abs(), f64::max);
        ChshOut {
            mode,
            s_value: sig9(quantum.s_value),
            sign_bound: SIGN_BOUND,
            ceiling: sig9(S_CEILING),
            exceeds_sign_bound: quantum.s_value > SIGN_BOUND,
            correlations: Some(sig9_vec(&quantum.correlations)),
            route_gap: Some(sig9(route_gap)),
            sweep_trials: None,
            seed,
        }
    };
    let mut lines = vec![
        format!("mode: {}", out.mode),
        format!("s value: {}", fnum(out.s_value)),
        format!("sign-combination bound: {}", fnum(out.sign_bound)),
        format!("ceiling: {}", fnum(out.ceiling)),
        format!("exceeds sign bound: {}", out.exceeds_sign_bound),
    ];
    if let Some(c) = &out.correlations {
        lines.push(format!("correlations: {}", fnum_vec(c)));
    }
    if let Some(g) = out.route_gap {
        lines.push(format!("operator/kernel route gap: {}", fnum(g)));
    }
    emitter.emit("chsh", &out, &lines);
    Ok(0)
}

// ---------------------------------------------------------------------------
// mb

#[derive(Serialize)]
struct ProfileOut {
    count: usize,
    min: f64,
    max: f64,
    deciles: Vec<usize>,
}

#[derive(Serialize)]
struct PreimageOut {
    effects_checked: usize,
    reduction_gap: f64,
    max_effect_gap: f64,
    measures_distinct: bool,
    indicator_values: (f64, f64),
}

#[derive(Serialize)]
struct MbOut {
    mesh_points: usize,
    effect: String,
    effect_coords: Vec<f64>,
    kernel_shape: (usize, usize),
    lift_profile: ProfileOut,
    preimage_demo: PreimageOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
    seed: u64,
}

fn mb(
    emitter: &Emitter,
    mesh_size: usize,
    effect_spec: &str,
    csv: Option<PathBuf>,
    preimage_samples: usize,
    seed: u64,
) -> Result<i32, String> {
    if mesh_size < 4 {
        return Err("--mesh must be at least 4".into());
    }
    let cayley = match effect_spec {
        "z-projection" => CayleyEffect::projection([0.0, 0.0, 1.0]).map_err(|e| e.to_string())?,
        "x-projection" => CayleyEffect::projection([1.0, 0.0, 0.0]).map_err(|e| e.to_string())?,
        "y-projection" => CayleyEffect::projection([0.0, 1.0, 0.0]).map_err(|e| e.to_string())?,
        path => mapfile::load_effect(std::path::Path::new(path))?,
    };
    let label = match effect_spec {
        "z-projection" | "x-projection" | "y-projection" => effect_spec.to_string(),
        path => format!("file({path})"),
    };
    let proj = cayley.to_effect();
    let mesh = bloch_mesh(mesh_size).map_err(|e| e.to_string())?;
    let povm = Povm::new(
        vec![proj.clone(), effect_complement(&proj)],
        Some(vec!["hit".into(), "miss".into()]),
    )
    .map_err(|e| e.to_string())?;
    let kernel = kernel_of_povm(&povm, &mesh).map_err(|e| e.to_string())?;
    let profile = fuzziness_profile(&proj, &mesh).map_err(|e| e.to_string())?;
    let demo = preimage_multiplicity_demo(preimage_samples, seed).map_err(|e| e.to_string())?;

    let csv_path = match &csv {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            let mut w = std::io::BufWriter::new(file);
            writeln!(w, "bin_low,bin_high,count").map_err(|e| e.to_string())?;
            for (k, count) in profile.deciles.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{}",
                    fnum(k as f64 / 10.0),
                    fnum((k + 1) as f64 / 10.0),
                    count
                )
                .map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let out = MbOut {
        mesh_points: mesh.len(),
        effect: label,
        effect_coords: sig9_vec(&cayley.coords()),
        kernel_shape: (kernel.rows(), kernel.cols()),
        lift_profile: ProfileOut {
            count: profile.count,
            min: sig9(profile.min),
            max: sig9(profile.max),
            deciles: profile.deciles.to_vec(),
        },
        preimage_demo: PreimageOut {
            effects_checked: demo.effects_checked,
            reduction_gap: sig9(demo.reduction_gap),
            max_effect_gap: sig9(demo.max_effect_gap),
            measures_distinct: demo.distinct,
            indicator_values: (sig9(demo.indicator_values.0), sig9(demo.indicator_values.1)),
        },
        csv: csv_path,
        seed,
    };
    let mut lines = vec![
        format!("mesh points: {}", out.mesh_points),
        format!(
            "effect: {} (four-vector {})",
            out.effect,
            fnum_vec(&out.effect_coords)
        ),
        format!(
            "kernel shape: {} × {}",
            out.kernel_shape.0, out.kernel_shape.1
        ),
        format!(
            "lift of the sharp effect: min {}, max {} over {} points",
            fnum(out.lift_profile.min),
            fnum(out.lift_profile.max),
            out.lift_profile.count
        ),
        format!("lift decile counts: {:?}", out.lift_profile.deciles),
        format!(
            "preimage demo: barycenter gap {}, max effect gap {}, distinct {}",
            fnum(out.preimage_demo.reduction_gap),
            fnum(out.preimage_demo.max_effect_gap),
            out.preimage_demo.measures_distinct
        ),
        format!(
            "indicator separates the measures: {} vs {}",
            fnum(out.preimage_demo.indicator_values.0),
            fnum(out.preimage_demo.indicator_values.1)
        ),
    ];
    if let Some(path) = &out.csv {
        lines.push(format!("csv: {path}"));
    }
    emitter.emit("mb", &out, &lines);
    Ok(0)
}

// ---------------------------------------------------------------------------
// wigner

#[derive(Serialize)]
struct MinEntryOut {
    value: f64,
    q: f64,
    p: f64,
}

#[derive(Serialize)]
struct WignerOut {
    state: String,
    grid_points: usize,
    extent: f64,
    position_step: f64,
    momentum_step: f64,
    total_mass: f64,
    min_entry: MinEntryOut,
    max_position_marginal_gap: f64,
    max_momentum_marginal_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn wigner(
    emitter: &Emitter,
    state: StateKind,
    grid: usize,
    extent: f64,
    q0: f64,
    p0: f64,
    weight: f64,
    out_path: Option<PathBuf>,
) -> Result<i32, String> {
    let q_grid = Grid1D::symmetric(extent, grid).map_err(|e| e.to_string())?;
    let p_grid = Grid1D::conjugate_momentum(&q_grid);

    let ground = WaveFunction::gaussian_ground(q_grid).map_err(|e| e.to_string())?;
    let excited = WaveFunction::first_excited(q_grid).map_err(|e| e.to_string())?;

    let (label, table, q_density, p_density): (String, WignerTable, Vec<f64>, Vec<f64>) =
        match state {
            StateKind::Gauss => (
                "gauss".into(),
                wigner_transform(&ground, &p_grid),
                ground.position_density(),
                ground.momentum_density(&p_grid),
            ),
            StateKind::Hermite1 => (
                "hermite1".into(),
                wigner_transform(&excited, &p_grid),
                excited.position_density(),
                excited.momentum_density(&p_grid),
            ),
            StateKind::Coherent => {
                let psi = WaveFunction::coherent(q_grid, q0, p0).map_err(|e| e.to_string())?;
                (
                    format!("coherent(q0={q0}, p0={p0})"),
                    wigner_transform(&psi, &p_grid),
                    psi.position_density(),
                    psi.momentum_density(&p_grid),
                )
            }
            StateKind::Mixed => {
                if !(0.0..=1.0).contains(&weight) {
                    return Err("--weight must lie in [0, 1]".into());
                }
                let t0 = wigner_transform(&ground, &p_grid);
                let t1 = wigner_transform(&excited, &p_grid);
                let table = WignerTable::mix(&[(1.0 - weight, &t0), (weight, &t1)])
                    .map_err(|e| e.to_string())?;
                let blend = |a: &[f64], b: &[f64]| -> Vec<f64> {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (1.0 - weight) * x + weight * y)
                        .collect()
                };
                let qd = blend(&ground.position_density(), &excited.position_density());
                let pd = blend(
                    &ground.momentum_density(&p_grid),
                    &excited.momentum_density(&p_grid),
                );
                (format!("mixed(weight={weight})"), table, qd, pd)
            }
        };

    let max_gap = |marginal: &[f64], density: &[f64]| -> f64 {
        marginal
            .iter()
            .zip(density)
            .map(|(m, d)| (m - d).abs())
            .fold(0.0, f64::max)
    };
    let q_gap = max_gap(&table.position_marginal(), &q_density);
    let p_gap = max_gap(&table.momentum_marginal(), &p_density);
    let min = table.min_entry();

    let out_file = match &out_path {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            let mut w = std::io::BufWriter::new(file);
            writeln!(w, "q,p,value").map_err(|e| e.to_string())?;
            for i in 0..q_grid.len() {
                for m in 0..p_grid.len() {
                    writeln!(
                        w,
                        "{},{},{}",
                        fnum(sig9(q_grid.point(i))),
                        fnum(sig9(p_grid.point(m))),
                        fnum(sig9(table.value(i, m)))
                    )
                    .map_err(|e| e.to_string())?;
                }
            }
            w.flush().map_err(|e| e.to_string())?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let report = WignerOut {
        state: label,
        grid_points: grid,
        extent,
        position_step: sig9(q_grid.step()),
        momentum_step: sig9(p_grid.step()),
        total_mass: sig9(table.total_mass()),
        min_entry: MinEntryOut {
            value: sig9(min.value),
            q: sig9(min.q),
            p: sig9(min.p),
        },
        max_position_marginal_gap: sig9(q_gap),
        max_momentum_marginal_gap: sig9(p_gap),
        out: out_file,
    };
    let mut lines = vec![
        format!("state: {}", report.state),
        format!(
            "grid: {} points per axis, position step {}, momentum step {}",
            report.grid_points,
            fnum(report.position_step),
            fnum(report.momentum_step)
        ),
        format!("total mass: {}", fnum(report.total_mass)),
        format!(
            "minimum entry: {} at q = {}, p = {}",
            fnum(report.min_entry.value),
            fnum(report.min_entry.q),
            fnum(report.min_entry.p)
        ),
        format!(
            "max position-marginal gap: {}",
            fnum(report.max_position_marginal_gap)
        ),
        format!(
            "max momentum-marginal gap: {}",
            fnum(report.max_momentum_marginal_gap)
        ),
    ];
    if let Some(path) = &report.out {
        lines.push(format!("csv: {path}"));
    }
    emitter.emit("wigner", &report, &lines);
    Ok(0)
}

// ---------------------------------------------------------------------------
// tomography

#[derive(Serialize)]
struct TomographyOut {
    trials: usize,
    failures: usize,
    max_state_distance: f64,
    max_residual: f64,
    seed: u64,
}

fn tomography(emitter: &Emitter, trials: usize, seed: u64) -> Result<i32, String> {
    if trials == 0 {
        return Err("--trials needs at least one trial".into());
    }
    let report =
        tomography_trial_report(&sic_qubit_povm(), trials, seed).map_err(|e| e.to_string())?;
    let out = TomographyOut {
        trials: report.trials,
        failures: report.failures,
        max_state_distance: sig9(report.max_state_distance),
        max_residual: sig9(report.max_residual),
        seed,
    };
    let lines = vec![
        format!("trials: {}", out.trials),
        format!("failures: {}", out.failures),
        format!("max state distance: {}", fnum(out.max_state_distance)),
        format!("max probability residual: {}", fnum(out.max_residual)),
    ];
    emitter.emit("tomography", &out, &lines);
    Ok(if report.failures == 0 { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// gleason-effects

#[derive(Serialize)]
struct DimOut {
    dim: usize,
    round_trip_trials: usize,
    round_trip_failures: usize,
    max_state_distance: f64,
    max_residual: f64,
    linear_additivity_defect: f64,
    counterexample_additivity_defect: f64,
    counterexample_flagged: bool,
}

#[derive(Serialize)]
struct GleasonOut {
    dims: Vec<DimOut>,
    seed: u64,
}

fn gleason_effects(
    emitter: &Emitter,
    dims_raw: &str,
    trials: usize,
    seed: u64,
) -> Result<i32, String> {
    let dims: Vec<usize> = dims_raw
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&d| d >= 2)
                .ok_or_else(|| format!("--dims: {p:?} is not a dimension of at least 2"))
        })
        .collect::<Result<_, _>>()?;
    if dims.is_empty() || trials == 0 {
        return Err("need at least one dimension and one trial".into());
    }

    let mut rows = Vec::new();
    let mut all_ok = true;
    for &d in &dims {
        let rt = valuation_round_trip(d, trials, seed).map_err(|e| e.to_string())?;

        let linear = EffectValuation::from_state(&DensityOperator::maximally_mixed(d));
        let lin_add = verify_additivity(&linear, 100, seed).map_err(|e| e.to_string())?;

        // A squared pairing is normalized but not additive; the checker must
        // refuse to read it as a state.
        let basis_vec: Vec<C64> = (0..d)
            .map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let pure = DensityOperator::pure(&basis_vec).map_err(|e| e.to_string())?;
        let squared = EffectValuation::squared_pairing(&pure);
        let sq_add = verify_additivity(&squared, 100, seed).map_err(|e| e.to_string())?;
        let sq_outcome = state_from_valuation(&squared, seed).map_err(|e| e.to_string())?;
        let flagged = sq_add.max_defect > 1e-2 || sq_outcome.residual() > 1e-3;

        all_ok &= rt.failures == 0 && lin_add.max_defect < 1e-9 && flagged;
        rows.push(DimOut {
            dim: d,
            round_trip_trials: rt.trials,
            round_trip_failures: rt.failures,
            max_state_distance: sig9(rt.max_state_distance),
            max_residual: sig9(rt.max_residual),
            linear_additivity_defect: sig9(lin_add.max_defect),
            counterexample_additivity_defect: sig9(sq_add.max_defect),
            counterexample_flagged: flagged,
        });
    }

    let out = GleasonOut { dims: rows, seed };
    let mut lines = Vec::new();
    for r in &out.dims {
        lines.push(format!(
            "dim {}: {} round trips, {} failures, max state distance {}, max residual {}",
            r.dim,
            r.round_trip_trials,
            r.round_trip_failures,
            fnum(r.max_state_distance),
            fnum(r.max_residual)
        ));
        lines.push(format!(
            "dim {}: additivity defect {} (linear), {} (squared counterexample), flagged {}",
            r.dim,
            fnum(r.linear_additivity_defect),
            fnum(r.counterexample_additivity_defect),
            r.counterexample_flagged
        ));
    }
    emitter.emit("gleason-effects", &out, &lines);
    Ok(if all_ok { 0 } else { 1 })
}
