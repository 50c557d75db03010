use std::f64::consts::{FRAC_1_SQRT_2, PI};

use holonomy_lab::dynamics::{
    adiabatic_phase_gate_run, bloch_sphere_sample, bloch_state, evolve_unitary, fidelity_sweep,
    nonadiabatic_phase_gate_run, AdiabaticLoopSpec, ExperimentSettings, GateProtocol, NonadiabaticPhaseGate,
    QubitChannel, Sampler, SweepConfig, SweepKind,
};
use holonomy_lab::linalg::{
    c, identity, matrix_exponential, max_abs_diff, phase_aligned_distance, CMatrix, C64,
};
use holonomy_lab::models::two_qubit::COMPUTATIONAL;
use holonomy_lab::models::{full_hamiltonian, h0, h1, two_qubit_hamiltonian, LambdaParams, PulseEnvelope, TwoQubitParams};
use holonomy_lab::state::StateVector;

fn restrict(u: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| u[(idx[i], idx[j])])
}

#[test]
fn zero_hamiltonian_evolves_to_identity() {
    let u = evolve_unitary(|_| CMatrix::zeros(4, 4), (0.0, 3.0), 7).unwrap();
    assert_eq!(u, identity(4));
}

#[test]
fn commuting_family_matches_area_exponential() {
    for env in [PulseEnvelope::sech(3.0, 1.0).unwrap(), PulseEnvelope::square(2.0, 0.0, 0.7).unwrap()] {
        let p = LambdaParams::from_angles(1.2, 2.5, env.clone()).unwrap();
        let u = evolve_unitary(|t| full_hamiltonian(&p, t).unwrap(), env.window(), 20_000).unwrap();
        let oracle = matrix_exponential(&p.coupling_operator(3), c(0.0, -env.area())).unwrap();
        assert!(max_abs_diff(&u, &oracle) < 1e-9);
    }
}

#[test]
fn two_qubit_pulse_matches_analytic_exponential() {
    let (theta, phi) = (0.9, 1.7);
    let p = TwoQubitParams::new(theta, phi, PulseEnvelope::sech(2.0, 0.0).unwrap()).unwrap();
    let u = evolve_unitary(|t| two_qubit_hamiltonian(&p, t), p.coupling.window(), 20_000).unwrap();
    let oracle = matrix_exponential(&(h0(theta, phi) + h1(theta)), c(0.0, -p.coupling.area())).unwrap();
    assert!(max_abs_diff(&u, &oracle) < 1e-9);
    let sq = TwoQubitParams::new(theta, phi, PulseEnvelope::square_pi(1.0, 0.0).unwrap()).unwrap();
    let u = evolve_unitary(|t| two_qubit_hamiltonian(&sq, t), sq.coupling.window(), 10).unwrap();
    let oracle = matrix_exponential(&(h0(theta, phi) + h1(theta)), c(0.0, -PI)).unwrap();
    assert!(max_abs_diff(&restrict(&u, &COMPUTATIONAL), &restrict(&oracle, &COMPUTATIONAL)) < 1e-12);
}

#[test]
fn sech_run_at_fifty_is_imperfect_and_converged() {
    let psi = bloch_state(1.3, 0.8);
    let coarse = nonadiabatic_phase_gate_run(50.0, &ExperimentSettings::default(), true, &psi).unwrap();
    let fine_settings = ExperimentSettings { steps: 40_000, gap_steps: 4_000, ..Default::default() };
    let fine = nonadiabatic_phase_gate_run(50.0, &fine_settings, true, &psi).unwrap();
    assert!(coarse.fidelity > 0.0 && coarse.fidelity < 1.0);
    assert!((coarse.fidelity - fine.fidelity).abs() < 1e-8);
    assert!(coarse.warnings.is_empty());
}

#[test]
fn input_dependence_of_nonadiabatic_fidelity() {
    let s = ExperimentSettings { steps: 5000, gap_steps: 500, ..Default::default() };
    let gate = NonadiabaticPhaseGate::new(20.0, &s, true).unwrap();
    let ch = QubitChannel::from_protocol(&gate, false).unwrap();
    let zero = ch.fidelity(&StateVector::basis(2, 0)).unwrap().0;
    let plus = ch.fidelity(&StateVector::from_slice(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])).unwrap().0;
    assert!((zero - plus).abs() > 1e-3);
    let best = bloch_sphere_sample(500, Sampler::Fibonacci, 0)
        .iter()
        .map(|psi| ch.fidelity(psi).unwrap().0)
        .fold(0.0, f64::max);
    assert!(best >= zero && best >= plus);
}

#[test]
fn adiabatic_limits() {
    let s = ExperimentSettings::default();
    let psi = bloch_state(2.0, 1.0);
    let slow = adiabatic_phase_gate_run(100.0, &s, false, &psi).unwrap().fidelity;
    let quick = adiabatic_phase_gate_run(5.0, &s, false, &psi).unwrap().fidelity;
    let slow_decay = adiabatic_phase_gate_run(300.0, &s, true, &psi).unwrap().fidelity;
    assert!(slow > 0.99, "{slow}");
    assert!(quick < 0.9, "{quick}");
    assert!(slow_decay > 0.98, "{slow_decay}");
}

#[test]
fn adiabatic_gate_phase_sign() {
    let spec = AdiabaticLoopSpec::new(150.0, &ExperimentSettings::default(), false).unwrap();
    let u = holonomy_lab::dynamics::projected_unitary(&spec, holonomy_lab::dynamics::StepRule::Magnus4).unwrap();
    let mut opposite = identity(2);
    opposite[(1, 1)] = C64::from_polar(1.0, PI / 2.0);
    assert!(phase_aligned_distance(&spec.target(), &u) < 0.05);
    assert!(phase_aligned_distance(&opposite, &u) > 1.0);
}

#[test]
fn single_state_sweep_collapses() {
    let s = ExperimentSettings { pulse_shape: holonomy_lab::dynamics::PulseShape::Square, gamma: 1.0, steps: 2000, gap_steps: 200, ..Default::default() };
    let cfg = SweepConfig::new(SweepKind::NonadiabaticDecay, vec![10.0, 40.0]).with_states(1).with_settings(s);
    for row in fidelity_sweep(&cfg).unwrap() {
        assert_eq!(row.min_fidelity, row.max_fidelity);
        assert_eq!(row.avg_fidelity, row.max_fidelity);
    }
}

/// Exact Bloch-sphere average of the fidelity. The fidelity is a quadratic
/// polynomial in the Bloch vector, so averaging over the six axis states is exact.
fn sphere_average(ch: &QubitChannel) -> f64 {
    let s = FRAC_1_SQRT_2;
    let axes = [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(s, 0.0), c(s, 0.0)],
        [c(s, 0.0), c(-s, 0.0)],
        [c(s, 0.0), c(0.0, s)],
        [c(s, 0.0), c(0.0, -s)],
    ];
    axes.iter().map(|a| ch.fidelity(&StateVector::from_slice(a)).unwrap().0).sum::<f64>() / 6.0
}

#[test]
fn samplers_agree_within_statistical_error() {
    let s = ExperimentSettings { steps: 5000, gap_steps: 500, ..Default::default() };
    let protocols: Vec<Box<dyn GateProtocol>> = vec![
        Box::new(NonadiabaticPhaseGate::new(5.0, &s, true).unwrap()),
        Box::new(NonadiabaticPhaseGate::new(200.0, &s, true).unwrap()),
        Box::new(AdiabaticLoopSpec::new(40.0, &s, true).unwrap()),
    ];
    let fib = bloch_sphere_sample(4000, Sampler::Fibonacci, 0);
    for p in &protocols {
        let ch = QubitChannel::from_protocol(p.as_ref(), false).unwrap();
        let exact = sphere_average(&ch);
        let f_fib: Vec<f64> = fib.iter().map(|x| ch.fidelity(x).unwrap().0).collect();
        let mean_fib = f_fib.iter().sum::<f64>() / 4000.0;
        assert!((mean_fib - exact).abs() < 1e-4, "fibonacci {mean_fib} vs exact {exact}");
        for seed in 0..3 {
            let f: Vec<f64> = bloch_sphere_sample(4000, Sampler::SeededUniform, seed)
                .iter()
                .map(|x| ch.fidelity(x).unwrap().0)
                .collect();
            let mean = f.iter().sum::<f64>() / 4000.0;
            let var = f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 3999.0;
            let se = (var / 4000.0).sqrt();
            assert!((mean - mean_fib).abs() <= (4.0 * se).max(1e-3), "seed {seed}: {mean} vs {mean_fib}, se {se}");
        }
    }
}
