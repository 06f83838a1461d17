//! Thin command-line front end over the `etic` library.
//!
//! Four subcommands: `run` simulates one scenario and writes the standard
//! output set, `compare` runs the same scenario intermittently and against
//! the always-on periodic baseline, `params-check` evaluates the stability
//! certificate constants without simulating, and `verify-bounds` audits a
//! finished run against its decay envelopes.
//!
//! Exit codes: 0 success, 1 bad config or I/O, 2 state divergence,
//! 3 certificate or envelope failure, 64 usage error.

use etic::analysis::{
    envelope_check, j2_exceedance_check, residual_bounds, stability_constants,
    StabilityConstants,
};
use etic::config::ScenarioConfig;
use etic::output::{
    pretty_json, write_atomic, write_run_outputs, ComparisonReport, ResidualBounds,
    VerificationReport,
};
use etic::sim::{
    lyapunov_series, run_scenario, z2_sq_series, ControllerKind, RunRecord, Scenario,
};
use etic::{Error, Result};
use std::path::{Path, PathBuf};

const USAGE: &str = "\
usage: etic <command> [options]

commands:
  run            simulate a scenario, write telemetry.csv, events.jsonl,
                 summary.json
  compare        run the scenario intermittently and as an always-on
                 periodic baseline, write both summaries and comparison.json
  params-check   evaluate the stability certificate constants for a config
                 (no simulation); exits 3 if any condition fails
  verify-bounds  rerun with judgment-rate actuation and audit the energy
                 against its decay envelopes, write verification.json;
                 exits 3 on any envelope or coast-bound violation

options:
  --config <path>    scenario config JSON (required)
  --out-dir <dir>    output directory (required for run/compare/verify-bounds)
  -h, --help         print this help

exit codes: 0 ok, 1 config error, 2 divergence, 3 verification failure,
64 usage error";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(cli(&args));
}

fn cli(args: &[String]) -> i32 {
    if args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return 0;
    }
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return 64;
    };
    let opts = match parse_opts(&args[1..]) {
        Ok(o) => o,
        Err(why) => return usage_error(&why),
    };
    let outcome = match command.as_str() {
        "run" => cmd_run(&opts),
        "compare" => cmd_compare(&opts),
        "params-check" => cmd_params_check(&opts),
        "verify-bounds" => cmd_verify_bounds(&opts),
        other => return usage_error(&format!("unknown command '{other}'")),
    };
    match outcome {
        Ok(code) => code,
        Err(Usage(why)) => usage_error(&why),
        Err(Lib(e)) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn usage_error(why: &str) -> i32 {
    eprintln!("error: {why}\n\n{USAGE}");
    64
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Invalid { .. } | Error::Io(_) | Error::Json(_) => 1,
        Error::Singular { .. } | Error::Diverged { .. } => 2,
        Error::Timeline { .. } | Error::Constants { .. } => 3,
    }
}

// ─── Argument handling ────────────────────────────────────────────────────

struct Opts {
    config: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

fn parse_opts(rest: &[String]) -> std::result::Result<Opts, String> {
    let mut opts = Opts { config: None, out_dir: None };
    let mut i = 0;
    while i < rest.len() {
        let flag = rest[i].as_str();
        let slot = match flag {
            "--config" => &mut opts.config,
            "--out-dir" => &mut opts.out_dir,
            other => return Err(format!("unknown argument '{other}'")),
        };
        let Some(value) = rest.get(i + 1) else {
            return Err(format!("{flag} needs a value"));
        };
        *slot = Some(PathBuf::from(value));
        i += 2;
    }
    Ok(opts)
}

enum CmdError {
    Usage(String),
    Lib(Error),
}
use CmdError::{Lib, Usage};

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        Lib(e)
    }
}

impl Opts {
    fn config(&self, command: &str) -> std::result::Result<&Path, CmdError> {
        self.config
            .as_deref()
            .ok_or_else(|| Usage(format!("{command} needs --config <path>")))
    }

    fn out_dir(&self, command: &str) -> std::result::Result<&Path, CmdError> {
        self.out_dir
            .as_deref()
            .ok_or_else(|| Usage(format!("{command} needs --out-dir <dir>")))
    }
}

type CmdResult = std::result::Result<i32, CmdError>;

// ─── Subcommands ──────────────────────────────────────────────────────────

fn cmd_run(opts: &Opts) -> CmdResult {
    let config = ScenarioConfig::load(opts.config("run")?)?;
    let out_dir = opts.out_dir("run")?;
    let scenario = config.build()?;
    let record = run_scenario(&scenario)?;
    write_run_outputs(out_dir, &record)?;
    let s = &record.summary;
    println!(
        "run: {} samples, {} events, {} actions, final pointing error {:.4} deg",
        record.telemetry.len(),
        record.events.len(),
        s.action_count,
        s.pointing_error_final_deg,
    );
    println!("wrote telemetry.csv, events.jsonl, summary.json to {}", out_dir.display());
    Ok(0)
}

fn cmd_compare(opts: &Opts) -> CmdResult {
    let config = ScenarioConfig::load(opts.config("compare")?)?;
    let out_dir = opts.out_dir("compare")?;
    let mut intermittent = config.build()?;
    intermittent.kind = ControllerKind::Intermittent;
    let periodic = config.build_periodic_baseline()?;
    let record_i = run_scenario(&intermittent)?;
    let record_p = run_scenario(&periodic)?;
    let report = ComparisonReport::new(record_i.summary.clone(), record_p.summary.clone());
    std::fs::create_dir_all(out_dir).map_err(Error::from)?;
    write_atomic(&out_dir.join("summary_intermittent.json"), &pretty_json(&record_i.summary))?;
    write_atomic(&out_dir.join("summary_periodic.json"), &pretty_json(&record_p.summary))?;
    write_atomic(&out_dir.join("comparison.json"), &pretty_json(&report))?;
    println!(
        "intermittent: {} actions, final pointing error {:.4} deg",
        report.intermittent.action_count, report.intermittent.pointing_error_final_deg,
    );
    println!(
        "periodic:     {} actions, final pointing error {:.4} deg",
        report.periodic.action_count, report.periodic.pointing_error_final_deg,
    );
    match report.action_ratio {
        Some(r) => println!("action ratio {:.4}, accuracy delta {:+.4} deg", r, report.accuracy_delta_deg),
        None => println!("baseline never acted; no action ratio"),
    }
    println!("wrote comparison.json to {}", out_dir.display());
    Ok(0)
}

fn initial_q_e0_min(scenario: &Scenario) -> Result<f64> {
    let state = scenario.initial_state()?;
    Ok(state.q_e.w().abs().clamp(f64::MIN_POSITIVE, 1.0))
}

fn print_constants(consts: &StabilityConstants) {
    let flag = |ok: bool| if ok { "ok" } else { "VIOLATED" };
    println!("lambda_min = {}", consts.lambda_min);
    println!("lambda_max = {}", consts.lambda_max);
    println!("q_e0_min   = {}", consts.q_e0_min);
    println!("B_omega    = {}", consts.b_omega);
    println!("D0         = {}", consts.d0);
    println!("N_k        = {}", consts.n_k);
    println!("N_f        = {}", consts.n_f);
    println!("C1  = {:<22} > 0: {}", consts.c1, flag(consts.c1_positive));
    println!("C2  = {:<22} > 0: {}", consts.c2, flag(consts.c2_positive));
    println!("C3  = {:<22} > 0: {}", consts.c3, flag(consts.c3_positive));
    println!("C_t = {:<22} > 0: {}", consts.c_t, flag(consts.c_t_positive));
    println!("C_d = {:<22} > 0: {}", consts.c_d, flag(consts.c_d_positive));
}

fn cmd_params_check(opts: &Opts) -> CmdResult {
    let config = ScenarioConfig::load(opts.config("params-check")?)?;
    let scenario = config.build()?;
    let q_e0_min = initial_q_e0_min(&scenario)?;
    let consts =
        stability_constants(&scenario.gains, q_e0_min, &scenario.plant.inertia, &scenario.trigger)?;
    print_constants(&consts);
    if !consts.valid {
        println!("INVALID: {}", consts.failed_conditions().join(", "));
        return Ok(3);
    }
    let (r_on, r_off, r_final) = residual_bounds(&consts, &scenario.trigger)?;
    println!("residuals: r_on = {r_on}, r_off = {r_off}, r_final = {r_final}");
    println!("all certificate conditions hold");
    Ok(0)
}

fn cmd_verify_bounds(opts: &Opts) -> CmdResult {
    let mut config = ScenarioConfig::load(opts.config("verify-bounds")?)?;
    let out_dir = opts.out_dir("verify-bounds")?;
    // audit at full resolution: actuate at every judgment instant so the
    // envelopes are not loosened by grid reaction windows
    config.trigger.actuation_grid_s = 0.0;
    config.controller_kind = ControllerKind::Intermittent;
    let scenario = config.build()?;
    let record = run_scenario(&scenario)?;
    let report = build_verification(&scenario, &record)?;
    std::fs::create_dir_all(out_dir).map_err(Error::from)?;
    write_atomic(&out_dir.join("verification.json"), &pretty_json(&report))?;
    let clean = report.envelope.violations.is_empty() && report.j2.violations.is_empty();
    println!(
        "envelope: {} violation(s), min margin {:.6e}",
        report.envelope.violations.len(),
        report.envelope.min_margin,
    );
    println!(
        "coast bound: {} violation(s), {} permitted exceedance(s)",
        report.j2.violations.len(),
        report.j2.permitted_exceedances,
    );
    println!("wrote verification.json to {}", out_dir.display());
    if clean {
        println!("all bounds hold");
        Ok(0)
    } else {
        println!("BOUNDS VIOLATED");
        Ok(3)
    }
}

fn build_verification(scenario: &Scenario, record: &RunRecord) -> Result<VerificationReport> {
    let first = record.telemetry.first().ok_or_else(|| Error::Timeline {
        why: "run produced no telemetry".into(),
    })?;
    let q_e0_min_used = first.q_e0.abs().clamp(f64::MIN_POSITIVE, 1.0);
    let q_e0_min_observed = record
        .telemetry
        .iter()
        .map(|s| s.q_e0.abs())
        .fold(f64::INFINITY, f64::min);
    let consts = stability_constants(
        &scenario.gains,
        q_e0_min_used,
        &scenario.plant.inertia,
        &scenario.trigger,
    )?;
    let (r_on, r_off, r_final) = residual_bounds(&consts, &scenario.trigger)?;
    let samples = lyapunov_series(&record.telemetry);
    let envelope = envelope_check(&samples, &record.events, &consts, &scenario.trigger)?;
    let j2 = j2_exceedance_check(
        &samples,
        &z2_sq_series(&record.telemetry),
        &record.events,
        &scenario.trigger,
    )?;
    Ok(VerificationReport {
        constants: consts,
        residuals: ResidualBounds { r_on, r_off, r_final },
        q_e0_min_used,
        q_e0_min_observed,
        envelope,
        j2,
    })
}
