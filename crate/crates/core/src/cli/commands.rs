use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::args::{Cli, Command, GateCommand, HolonomyArgs, PulseKind, SweepArgs};
use super::config::{ExperimentConfig, ExperimentRequest, HolonomyRequest, OutputFormat};
use super::format::{csv_number, parse_matrix, MatrixJson};
use super::{EXIT_CONFIG, EXIT_DIAGNOSTICS, EXIT_OK, EXIT_PRECONDITION};
use crate::dynamics::{fidelity_sweep_with_threads, FidelityReport, SweepConfig};
use crate::error::{Error, Result};
use crate::gates::{compose_two, one_qubit_gate, synthesize_one_qubit, two_qubit_gate, AnglesJson, OneQubitGateSpec, TwoQubitGateSpec};
use crate::holonomy::compose_loop_gates;
use crate::linalg::{phase_aligned_distance, CMatrix};
use crate::models::{gudermannian, LoopSpec, PulseEnvelope, Subspace, SECH_HALF_WIDTH};

pub const THREADS_ENV: &str = "HOLONOMY_LAB_THREADS";
pub const CSV_HEADER: &str = "parameter,min_fidelity,avg_fidelity,max_fidelity,n_states,max_trace_dev";
/// Loops finer than this are not reported as coarse.
pub const COARSE_GRID: usize = 100;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Dimension(_) | Error::Model(_) | Error::UnsupportedEnvelope(_) | Error::Config(_) => EXIT_CONFIG,
        Error::Precondition(_) | Error::NotCyclic { .. } | Error::GaugeViolation(_) | Error::SpanMismatch(_) => {
            EXIT_PRECONDITION
        }
        Error::Numerical(_) | Error::Resolution(_) => EXIT_DIAGNOSTICS,
    }
}

fn fail(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Config(format!("cannot write output: {e}")))
}

fn matrix(m: &CMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixJson::from(m)).expect("plain data")
}

fn gate_output(request: &ExperimentRequest) -> Result<serde_json::Value> {
    Ok(match request {
        ExperimentRequest::OneQubitGate { theta, phi } => {
            json!({ "gate": matrix(&one_qubit_gate(&OneQubitGateSpec::from_angles(*theta, *phi)?)) })
        }
        ExperimentRequest::ComposeGate { n, m } => {
            let (n, m) = (OneQubitGateSpec::from_direction(*n)?, OneQubitGateSpec::from_direction(*m)?);
            json!({ "gate": matrix(&compose_two(&n, &m)) })
        }
        ExperimentRequest::TwoQubitGate { theta, phi } => {
            json!({ "gate": matrix(&two_qubit_gate(&TwoQubitGateSpec::new(*theta, *phi)?)) })
        }
        ExperimentRequest::Synthesize { target } => {
            let target = target.to_matrix()?;
            let (n, m) = synthesize_one_qubit(&target).map_err(|e| match e {
                Error::Precondition(s) => Error::Model(s),
                other => other,
            })?;
            let composed = compose_two(&n, &m);
            json!({
                "loops": [AnglesJson::from(n), AnglesJson::from(m)],
                "gate": matrix(&composed),
                "error": phase_aligned_distance(&target, &composed),
            })
        }
        _ => return Err(Error::Config("not a gate request".into())),
    })
}

/// `gate` subcommands. Every failure is reported as invalid input.
pub fn cmd_gate(cmd: &GateCommand, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let request = match cmd {
        GateCommand::OneQubit(a) => Ok(ExperimentRequest::OneQubitGate { theta: a.theta, phi: a.phi }),
        GateCommand::TwoQubit(a) => Ok(ExperimentRequest::TwoQubitGate { theta: a.theta, phi: a.phi }),
        GateCommand::Compose { n, m } => match (n.as_slice(), m.as_slice()) {
            ([a, b, c], [d, e, f]) => Ok(ExperimentRequest::ComposeGate { n: [*a, *b, *c], m: [*d, *e, *f] }),
            _ => Err(Error::Config("`n` and `m` take three comma-separated components".into())),
        },
        GateCommand::Synthesize { target } => read_inline_or_file(target)
            .and_then(|t| parse_matrix(&t))
            .map(|m| ExperimentRequest::Synthesize { target: MatrixJson::from(&m) }),
    };
    match request.and_then(|r| gate_output(&r)).and_then(|v| print_json(out, &v)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn read_inline_or_file(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with(['[', '{']) && path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read `{arg}`: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_angles(s: &str) -> Result<AnglesJson> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| p.parse::<f64>().map_err(|_| Error::Config(format!("`compose`: cannot parse `{s}` as THETA,PHI")));
    match parts.as_slice() {
        [t, p] => Ok(AnglesJson { theta: parse(t)?, phi: parse(p)? }),
        _ => Err(Error::Config(format!("`compose`: expected THETA,PHI, got `{s}`"))),
    }
}

fn pulse_from_flags(kind: PulseKind, strength: f64, area: Option<f64>) -> Result<PulseEnvelope> {
    if !(strength > 0.0 && strength.is_finite()) {
        return Err(Error::Config(format!("`strength` must be positive, got {strength}")));
    }
    let area = area.unwrap_or(std::f64::consts::PI);
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::Config(format!("`area` must be positive, got {area}")));
    }
    match kind {
        PulseKind::Square => PulseEnvelope::square(strength, 0.0, area / strength),
        PulseKind::Sech | PulseKind::SechRenormalized => {
            let half_width = SECH_HALF_WIDTH / strength;
            let full = 2.0 * gudermannian(strength * half_width);
            let scale = match (kind, area) {
                (PulseKind::Sech, a) if a == std::f64::consts::PI => 1.0,
                (_, a) => a / full,
            };
            let e = PulseEnvelope::Sech { beta: strength, center: 0.0, half_width, scale };
            e.validate()?;
            Ok(e)
        }
    }
}

fn holonomy_request(args: &HolonomyArgs) -> Result<HolonomyRequest> {
    if let Some(path) = &args.config {
        let cfg = ExperimentConfig::load(path)?;
        return match cfg.experiment {
            ExperimentRequest::Holonomy(h) => Ok(h),
            _ => Err(Error::Config("`experiment.type` must be `holonomy`".into())),
        };
    }
    Ok(HolonomyRequest {
        theta: args.theta,
        phi: args.phi,
        subspace: if args.two_qubit { Subspace::TwoQubit } else { Subspace::OneQubit },
        pulse: pulse_from_flags(args.pulse, args.strength, args.area)?,
        grid: args.grid,
        compose: args.compose.iter().map(|s| parse_angles(s)).collect::<Result<_>>()?,
    })
}

fn holonomy_output(req: &HolonomyRequest, err: &mut dyn Write) -> Result<serde_json::Value> {
    if req.grid == 0 {
        return Err(Error::Config("`grid` must be at least 1".into()));
    }
    if req.grid < COARSE_GRID {
        let _ = writeln!(err, "warning: coarse grid of {} steps; use at least {COARSE_GRID}", req.grid);
    }
    let angles = std::iter::once(AnglesJson { theta: req.theta, phi: req.phi }).chain(req.compose.iter().copied());
    let specs = angles
        .map(|a| {
            if !(a.theta.is_finite() && a.phi.is_finite()) {
                return Err(Error::Config("loop angles must be finite".into()));
            }
            LoopSpec::from_angles(a.theta, a.phi, req.pulse.clone(), req.subspace)
        })
        .collect::<Result<Vec<_>>>()?;
    let g = compose_loop_gates(&specs, req.grid)?;
    Ok(json!({
        "loops": specs.len(),
        "grid": req.grid,
        "holonomy": matrix(&g.holonomy),
        "gate": matrix(&g.gate),
    }))
}

/// `holonomy`: prints the holonomy in the starting dark/bright frame and the
/// gate it induces on the register.
pub fn cmd_holonomy(args: &HolonomyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match holonomy_request(args).and_then(|r| holonomy_output(&r, err)).and_then(|v| print_json(out, &v)) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(err, &e),
    }
}

fn threads_from(arg: Option<usize>, env: Option<String>) -> Result<usize> {
    if let Some(n) = arg {
        return Ok(n);
    }
    match env {
        None => Ok(0),
        Some(s) if s.trim().is_empty() => Ok(0),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{s}`"))),
    }
}

pub fn write_csv(rows: &[FidelityReport], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_number(r.parameter),
            csv_number(r.min_fidelity),
            csv_number(r.avg_fidelity),
            csv_number(r.max_fidelity),
            r.n_states,
            csv_number(r.max_trace_dev)
        )?;
    }
    Ok(())
}

fn render_rows(rows: &[FidelityReport], format: OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(rows, &mut buf).map_err(|e| Error::Config(e.to_string()))?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut buf, rows).map_err(|e| Error::Numerical(e.to_string()))?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn emit(bytes: &[u8], path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, bytes).map_err(|e| Error::Config(format!("cannot write `{}`: {e}", p.display())))
        }
        _ => out.write_all(bytes).map_err(|e| Error::Config(format!("cannot write output: {e}"))),
    }
}

fn run_sweep(sweep: &SweepConfig, cfg: &ExperimentConfig, args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let threads = match threads_from(args.threads, std::env::var(THREADS_ENV).ok()) {
        Ok(n) => n,
        Err(e) => return fail(err, &e),
    };
    let rows = match fidelity_sweep_with_threads(sweep, threads) {
        Ok(r) => r,
        Err(e) => return fail(err, &e),
    };
    let format = args.format.unwrap_or(cfg.format);
    let path = args.output.as_ref().or(cfg.output.as_ref());
    if let Err(e) = render_rows(&rows, format).and_then(|b| emit(&b, path, out)) {
        return fail(err, &e);
    }
    let mut code = EXIT_OK;
    for r in rows.iter().filter(|r| r.flagged) {
        for w in &r.warnings {
            let _ = writeln!(err, "warning: parameter {}: {w}", csv_number(r.parameter));
        }
        code = EXIT_DIAGNOSTICS;
    }
    code
}

/// `sweep <config>`: writes one CSV or JSON row per grid point.
pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(err, &e),
    };
    match &cfg.experiment {
        ExperimentRequest::Sweep(s) => run_sweep(s, &cfg, args, out, err),
        _ => fail(err, &Error::Config("`experiment.type` must be `sweep`".into())),
    }
}

/// `run <config>`: dispatches on the experiment type.
pub fn cmd_run(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(err, &e),
    };
    let result = match &cfg.experiment {
        ExperimentRequest::Sweep(s) => return run_sweep(s, &cfg, args, out, err),
        ExperimentRequest::Holonomy(h) => holonomy_output(h, err),
        other => gate_output(other),
    };
    let path = args.output.as_ref().or(cfg.output.as_ref());
    let rendered = result.and_then(|v| {
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Numerical(e.to_string()))?;
        s.push('\n');
        emit(s.as_bytes(), path, out)
    });
    match rendered {
        Ok(()) => EXIT_OK,
        Err(e) => fail(err, &e),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Gate(g) => cmd_gate(g, out, err),
        Command::Holonomy(h) => cmd_holonomy(h, out, err),
        Command::Sweep(s) => cmd_sweep(s, out, err),
        Command::Run(s) => cmd_run(s, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_setting_precedence() {
        assert_eq!(threads_from(Some(3), Some("5".into())).unwrap(), 3);
        assert_eq!(threads_from(None, Some("5".into())).unwrap(), 5);
        assert_eq!(threads_from(None, None).unwrap(), 0);
        assert!(threads_from(None, Some("many".into())).is_err());
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::NotCyclic { area: 3.0, deviation: 0.1 }), 3);
        assert_eq!(exit_code(&Error::Resolution("x".into())), 4);
    }

    #[test]
    fn flag_pulses_have_requested_area() {
        for kind in [PulseKind::Square, PulseKind::SechRenormalized] {
            let p = pulse_from_flags(kind, 2.0, None).unwrap();
            assert!((p.area() - std::f64::consts::PI).abs() < 1e-12);
        }
        let p = pulse_from_flags(PulseKind::Sech, 2.0, Some(1.0)).unwrap();
        assert!((p.area() - 1.0).abs() < 1e-12);
    }
}
