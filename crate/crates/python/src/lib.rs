use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use holonomy_lab::dynamics::{
    adiabatic_phase_gate_run, fidelity_sweep, nonadiabatic_phase_gate_run, ExperimentSettings, FidelityReport,
    PulseShape, Sampler, SweepConfig, SweepKind,
};
use holonomy_lab::gates::{self, OneQubitGateSpec, TwoQubitGateSpec};
use holonomy_lab::holonomy::{compose_loop_gates, loop_gate, DEFAULT_STEPS};
use holonomy_lab::linalg::{CMatrix, C64};
use holonomy_lab::models::{LoopSpec, PulseEnvelope, Subspace};
use holonomy_lab::state::StateVector;
use holonomy_lab::Error;

type Rows = Vec<Vec<C64>>;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) | Error::Resolution(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows must be non-empty and of equal length"));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn spec(n: [f64; 3]) -> PyResult<OneQubitGateSpec> {
    OneQubitGateSpec::new(n).map_err(py_err)
}

fn settings(steps: Option<usize>, gap_steps: Option<usize>, pulse_shape: Option<&str>) -> PyResult<ExperimentSettings> {
    let mut s = ExperimentSettings::default();
    if let Some(v) = steps {
        s.steps = v;
    }
    if let Some(v) = gap_steps {
        s.gap_steps = v;
    }
    if let Some(shape) = pulse_shape {
        s.pulse_shape = match shape {
            "sech" => PulseShape::Sech,
            "sech-renormalized" => PulseShape::SechRenormalized,
            "square" => PulseShape::Square,
            other => return Err(PyValueError::new_err(format!("unknown pulse shape `{other}`"))),
        };
    }
    s.validate().map_err(py_err)?;
    Ok(s)
}

fn qubit_state(amplitudes: [C64; 2]) -> PyResult<StateVector> {
    StateVector::from_slice(&amplitudes).normalized().map_err(py_err)
}

/// Gate of a single loop with unit coupling direction `n`.
#[pyfunction]
fn one_qubit_gate(n: [f64; 3]) -> PyResult<Rows> {
    Ok(to_rows(&gates::one_qubit_gate(&spec(n)?)))
}

/// Loop `n` followed by loop `m`.
#[pyfunction]
fn compose_two(n: [f64; 3], m: [f64; 3]) -> PyResult<Rows> {
    Ok(to_rows(&gates::compose_two(&spec(n)?, &spec(m)?)))
}

#[pyfunction]
fn two_qubit_gate(theta: f64, phi: f64) -> PyResult<Rows> {
    let s = TwoQubitGateSpec::new(theta, phi).map_err(py_err)?;
    Ok(to_rows(&gates::two_qubit_gate(&s)))
}

/// Two loop directions whose composition equals `target` up to a global phase.
#[pyfunction]
fn synthesize(target: Rows) -> PyResult<([f64; 3], [f64; 3])> {
    let (n, m) = gates::synthesize_one_qubit(&from_rows(&target)?).map_err(py_err)?;
    Ok((n.n(), m.n()))
}

/// Holonomy and register gate of one or more square π-pulse loops.
///
/// `loops` is a list of `(theta, phi)` pairs traversed in order.
#[pyfunction]
#[pyo3(signature = (loops, two_qubit = false, steps = DEFAULT_STEPS))]
fn holonomy(loops: Vec<(f64, f64)>, two_qubit: bool, steps: usize) -> PyResult<(Rows, Rows)> {
    let subspace = if two_qubit { Subspace::TwoQubit } else { Subspace::OneQubit };
    let specs = loops
        .iter()
        .map(|&(theta, phi)| {
            let pulse = PulseEnvelope::square_pi(1.0, 0.0)?;
            LoopSpec::from_angles(theta, phi, pulse, subspace)
        })
        .collect::<holonomy_lab::Result<Vec<_>>>()
        .map_err(py_err)?;
    let g = match specs.as_slice() {
        [one] => loop_gate(one, steps),
        _ => compose_loop_gates(&specs, steps),
    }
    .map_err(py_err)?;
    Ok((to_rows(&g.holonomy), to_rows(&g.gate)))
}

#[pyclass(frozen, get_all)]
struct GateRun {
    fidelity: f64,
    output: Rows,
    max_trace_dev: f64,
    warnings: Vec<String>,
}

fn wrap_run(run: holonomy_lab::dynamics::GateRun) -> GateRun {
    GateRun {
        fidelity: run.fidelity,
        output: to_rows(run.output.entries()),
        max_trace_dev: run.diagnostics.max_trace_deviation,
        warnings: run.warnings,
    }
}

/// Two-pulse phase gate at pulse strength `beta_over_gamma`.
#[pyfunction]
#[pyo3(signature = (beta_over_gamma, state, decay = true, steps = None, gap_steps = None, pulse_shape = None))]
fn nonadiabatic_run(
    py: Python<'_>,
    beta_over_gamma: f64,
    state: [C64; 2],
    decay: bool,
    steps: Option<usize>,
    gap_steps: Option<usize>,
    pulse_shape: Option<&str>,
) -> PyResult<GateRun> {
    let s = settings(steps, gap_steps, pulse_shape)?;
    let psi = qubit_state(state)?;
    let run = py.detach(|| nonadiabatic_phase_gate_run(beta_over_gamma, &s, decay, &psi)).map_err(py_err)?;
    Ok(wrap_run(run))
}

/// Adiabatic loop gate with total pulse area `omega_t`.
#[pyfunction]
#[pyo3(signature = (omega_t, state, decay = true, steps = None))]
fn adiabatic_run(py: Python<'_>, omega_t: f64, state: [C64; 2], decay: bool, steps: Option<usize>) -> PyResult<GateRun> {
    let s = settings(steps, None, None)?;
    let psi = qubit_state(state)?;
    let run = py.detach(|| adiabatic_phase_gate_run(omega_t, &s, decay, &psi)).map_err(py_err)?;
    Ok(wrap_run(run))
}

#[pyclass(frozen, get_all)]
struct SweepRow {
    parameter: f64,
    min_fidelity: f64,
    avg_fidelity: f64,
    max_fidelity: f64,
    n_states: usize,
    max_trace_dev: f64,
    flagged: bool,
}

impl From<FidelityReport> for SweepRow {
    fn from(r: FidelityReport) -> Self {
        Self {
            parameter: r.parameter,
            min_fidelity: r.min_fidelity,
            avg_fidelity: r.avg_fidelity,
            max_fidelity: r.max_fidelity,
            n_states: r.n_states,
            max_trace_dev: r.max_trace_dev,
            flagged: r.flagged,
        }
    }
}

#[pymethods]
impl SweepRow {
    fn __repr__(&self) -> String {
        format!(
            "SweepRow(parameter={}, min={:.6}, avg={:.6}, max={:.6})",
            self.parameter, self.min_fidelity, self.avg_fidelity, self.max_fidelity
        )
    }
}

/// Fidelity statistics over sampled input states for each grid value.
///
/// `kind` is one of `nonadiabatic-decay`, `adiabatic-decay`, `adiabatic-nodecay`.
#[pyfunction]
#[pyo3(signature = (kind, grid, n_states = 4000, sampler = "fibonacci", seed = 0, steps = None, gap_steps = None))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    kind: &str,
    grid: Vec<f64>,
    n_states: usize,
    sampler: &str,
    seed: u64,
    steps: Option<usize>,
    gap_steps: Option<usize>,
) -> PyResult<Vec<SweepRow>> {
    let kind = match kind {
        "nonadiabatic-decay" => SweepKind::NonadiabaticDecay,
        "adiabatic-decay" => SweepKind::AdiabaticDecay,
        "adiabatic-nodecay" => SweepKind::AdiabaticNodecay,
        other => return Err(PyValueError::new_err(format!("unknown sweep kind `{other}`"))),
    };
    let sampler = match sampler {
        "fibonacci" => Sampler::Fibonacci,
        "seeded-uniform" => Sampler::SeededUniform,
        other => return Err(PyValueError::new_err(format!("unknown sampler `{other}`"))),
    };
    let mut cfg = SweepConfig::new(kind, grid).with_states(n_states).with_settings(settings(steps, gap_steps, None)?);
    cfg.sampler = sampler;
    cfg.seed = seed;
    let rows = py.detach(|| fidelity_sweep(&cfg)).map_err(py_err)?;
    Ok(rows.into_iter().map(SweepRow::from).collect())
}

#[pymodule]
fn holonomy_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GateRun>()?;
    m.add_class::<SweepRow>()?;
    m.add_function(wrap_pyfunction!(one_qubit_gate, m)?)?;
    m.add_function(wrap_pyfunction!(compose_two, m)?)?;
    m.add_function(wrap_pyfunction!(two_qubit_gate, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(holonomy, m)?)?;
    m.add_function(wrap_pyfunction!(nonadiabatic_run, m)?)?;
    m.add_function(wrap_pyfunction!(adiabatic_run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
