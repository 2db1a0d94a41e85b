//! `xdiscord`: discord reports, entropy curves, family sweeps and oracle
//! audits for two-qubit X states.

mod format;
mod input;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use xdiscord_core::audit::{audit_state, summarize, AuditConfig};
use xdiscord_core::{
    ellipse_from_xstate, quantum_discord, random_xstate, reconstruct_povm, ConvexityClass, Degeneracy, DiscordResult,
    EntropyCurve, Povm, XState,
};

use format::{g12, opt};
use input::{FamilyArgs, StateArgs};

/// Bad flags, files or states (exit 2).
#[derive(Debug)]
pub enum CliError {
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
        }
    }
}

/// Command output and whether it passed (only audits can fail).
struct Output {
    text: String,
    passed: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, passed: true }
    }
}

#[derive(Parser, Debug)]
#[command(name = "xdiscord", version, about = "Quantum discord of two-qubit X states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mutual information, classical correlation, discord and the optimal POVM.
    Discord {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Horizontal entropy curve as CSV: z, s_horizontal, s_vertical, delta, d2.
    Curve {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Discord along a one-parameter family, as CSV.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Compare the decision procedure with the oracles on random states.
    Audit {
        #[arg(long, default_value_t = 500)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every audit tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Ellipse degeneracy, curve convexity and ellipse type.
    Classify {
        #[command(flatten)]
        state: StateArgs,
    },
}

#[derive(Serialize)]
struct DiscordReport {
    #[serde(flatten)]
    result: DiscordResult,
    povm: Povm,
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}

fn params_line(s: &XState) -> String {
    let [a, b, c, d, u, v] = s.params();
    format!(
        "a={} b={} c={} d={} u={} v={}",
        g12(a),
        g12(b),
        g12(c),
        g12(d),
        g12(u),
        g12(v)
    )
}

fn cmd_discord(state: &XState, json: bool) -> Result<String, CliError> {
    let result = quantum_discord(state).map_err(|e| CliError::Input(e.to_string()))?;
    let povm = reconstruct_povm(state, &result.decomposition).map_err(|e| CliError::Input(e.to_string()))?;
    if json {
        return Ok(to_json(&DiscordReport { result, povm }));
    }
    let d = &result.decomposition;
    let mut out = String::new();
    writeln!(out, "state          {}", params_line(state)).unwrap();
    writeln!(out, "I              {}", g12(result.mutual_information)).unwrap();
    writeln!(out, "C              {}", g12(result.classical_correlation)).unwrap();
    writeln!(out, "Q              {}", g12(result.discord)).unwrap();
    writeln!(out, "S_min          {}", g12(d.s_bar_min)).unwrap();
    writeln!(out, "kind           {}", d.kind.as_str()).unwrap();
    if let (Some(z), Some(p)) = (d.z_star, d.p_star) {
        writeln!(out, "z*             {}", g12(z)).unwrap();
        writeln!(out, "p*             {}", g12(p)).unwrap();
    }
    writeln!(out, "ellipse type   {}", result.ellipse_class.as_str()).unwrap();
    if result.lemma_fallback {
        writeln!(
            out,
            "warning        inflection count check failed; envelope taken from the grid oracle"
        )
        .unwrap();
    }
    writeln!(out, "components     weight, x, z").unwrap();
    for c in &d.components {
        writeln!(out, "  {}, {}, {}", g12(c.weight), g12(c.point.x), g12(c.point.z)).unwrap();
    }
    writeln!(out, "povm           t, n_x, n_z").unwrap();
    for e in povm.elements() {
        writeln!(out, "  {}, {}, {}", g12(e.t), g12(e.n.x), g12(e.n.z)).unwrap();
    }
    Ok(out)
}

fn cmd_curve(state: &XState, points: usize) -> Result<String, CliError> {
    if points < 2 {
        return Err(CliError::Input(format!("--points must be at least 2, got {points}")));
    }
    let e = ellipse_from_xstate(state);
    if !matches!(e.degeneracy, Degeneracy::Full | Degeneracy::FlatY) {
        return Err(CliError::Input(format!(
            "{:?} ellipse: the curve domain is a single height",
            e.degeneracy
        )));
    }
    let c = EntropyCurve::from(&e);
    let mut out = String::from("z,s_horizontal,s_vertical,delta,d2\n");
    let step = (c.z_g - c.z_h) / (points - 1) as f64;
    for i in 0..points {
        let z = if i == points - 1 {
            c.z_g
        } else {
            c.z_h + i as f64 * step
        };
        let sh = c.s_horizontal(z).map_err(|e| CliError::Input(e.to_string()))?;
        let sv = c.s_vertical(z).map_err(|e| CliError::Input(e.to_string()))?;
        let d2 = c.s_horizontal_d2(z).ok();
        writeln!(out, "{},{},{},{},{}", g12(z), g12(sh), g12(sv), g12(sh - sv), opt(d2)).unwrap();
    }
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    k: f64,
    mutual_information: f64,
    classical_correlation: f64,
    discord: f64,
    kind: &'static str,
    z_star: Option<f64>,
    ellipse_class: &'static str,
    transition: bool,
}

fn cmd_sweep(family: &FamilyArgs, json: bool) -> Result<String, CliError> {
    let family = family.family()?;
    let results: Vec<Result<DiscordResult, String>> = family
        .ks
        .par_iter()
        .map(|&k| {
            let s = family.spec.state_at(k).map_err(|e| e.to_string())?;
            quantum_discord(&s).map_err(|e| format!("k = {k}: {e}"))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut previous = None;
    for (&k, r) in family.ks.iter().zip(results) {
        let r = r.map_err(CliError::Input)?;
        let kind = r.decomposition.kind;
        rows.push(SweepRow {
            k,
            mutual_information: r.mutual_information,
            classical_correlation: r.classical_correlation,
            discord: r.discord,
            kind: kind.as_str(),
            z_star: r.decomposition.z_star,
            ellipse_class: r.ellipse_class.as_str(),
            transition: previous.is_some_and(|p| p != kind),
        });
        previous = Some(kind);
    }
    if json {
        return Ok(to_json(&rows));
    }
    let mut out =
        String::from("k,mutual_information,classical_correlation,discord,kind,z_star,ellipse_class,transition\n");
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            g12(r.k),
            g12(r.mutual_information),
            g12(r.classical_correlation),
            g12(r.discord),
            r.kind,
            opt(r.z_star),
            r.ellipse_class,
            u8::from(r.transition)
        )
        .unwrap();
    }
    Ok(out)
}

fn cmd_audit(states: usize, seed: u64, tolerance: Option<f64>, json: bool) -> Result<Output, CliError> {
    let mut cfg = AuditConfig::default();
    if let Some(t) = tolerance {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::Input(format!("--tolerance must be nonnegative, got {t}")));
        }
        cfg = cfg.with_tolerance(t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<XState> = (0..states).map(|_| random_xstate(&mut rng)).collect();
    let records: Vec<_> = sample.par_iter().map(|s| audit_state(s, &cfg)).collect();
    let report = summarize(&records, &cfg);
    let text = if json {
        to_json(&report)
    } else {
        let mut out = String::new();
        writeln!(out, "states                      {}", report.states).unwrap();
        writeln!(out, "seed                        {seed}").unwrap();
        writeln!(
            out,
            "max |S_min - ensemble|      {}",
            g12(report.max_ensemble_deviation)
        )
        .unwrap();
        writeln!(
            out,
            "max (S_min - von Neumann)   {}",
            g12(report.max_vonneumann_undershoot)
        )
        .unwrap();
        writeln!(out, "max two-outcome gap         {}", g12(report.max_two_outcome_gap)).unwrap();
        writeln!(out, "triangle states             {}", report.triangle_states).unwrap();
        writeln!(out, "inflection count failures   {}", report.lemma_violations).unwrap();
        writeln!(out, "errors                      {}", report.errors).unwrap();
        writeln!(
            out,
            "result                      {}",
            if report.passed { "PASS" } else { "FAIL" }
        )
        .unwrap();
        out
    };
    Ok(Output {
        text,
        passed: report.passed,
    })
}

#[derive(Serialize)]
struct Classification {
    state: XState,
    degeneracy: Degeneracy,
    convexity: Option<ConvexityClass>,
    ellipse_class: xdiscord_core::EllipseClass,
    kind: &'static str,
    z_star: Option<f64>,
    horizontal_never_above_vertical: bool,
}

fn cmd_classify(state: &XState, json: bool) -> Result<String, CliError> {
    let e = ellipse_from_xstate(state);
    let r = quantum_discord(state).map_err(|e| CliError::Input(e.to_string()))?;
    let c = Classification {
        state: *state,
        degeneracy: e.degeneracy,
        convexity: r.convexity,
        ellipse_class: r.ellipse_class,
        kind: r.decomposition.kind.as_str(),
        z_star: r.decomposition.z_star,
        horizontal_never_above_vertical: r.horizontal_never_above_vertical,
    };
    if json {
        return Ok(to_json(&c));
    }
    let convexity = match c.convexity {
        None => "n/a".to_string(),
        Some(ConvexityClass::Convex) => "Convex".into(),
        Some(ConvexityClass::Concave) => "Concave".into(),
        Some(ConvexityClass::SingleInflection { z_c, convex_below }) => format!(
            "SingleInflection z_c={} ({} below)",
            g12(z_c),
            if convex_below { "convex" } else { "concave" }
        ),
    };
    let mut out = String::new();
    writeln!(out, "state          {}", params_line(state)).unwrap();
    writeln!(
        out,
        "ellipse        l1={} l3={} z0={} z_B={}",
        g12(e.l1),
        g12(e.l3),
        g12(e.z0),
        g12(e.z_b)
    )
    .unwrap();
    writeln!(out, "degeneracy     {:?}", c.degeneracy).unwrap();
    writeln!(out, "convexity      {convexity}").unwrap();
    writeln!(out, "ellipse type   {}", c.ellipse_class.as_str()).unwrap();
    writeln!(out, "kind           {}", c.kind).unwrap();
    if let Some(z) = c.z_star {
        writeln!(out, "z*             {}", g12(z)).unwrap();
    }
    writeln!(out, "S_h <= S_v     {}", c.horizontal_never_above_vertical).unwrap();
    Ok(out)
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Discord { state } => cmd_discord(&state.state()?, cli.json).map(Output::from),
        Command::Curve { state, points } => cmd_curve(&state.state()?, *points).map(Output::from),
        Command::Sweep { family } => cmd_sweep(family, cli.json).map(Output::from),
        Command::Audit {
            states,
            seed,
            tolerance,
        } => cmd_audit(*states, *seed, *tolerance, cli.json),
        Command::Classify { state } => cmd_classify(&state.state()?, cli.json).map(Output::from),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if output.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: audit tolerances exceeded");
        ExitCode::from(1)
    }
}
