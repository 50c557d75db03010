pub mod evolve;
pub mod experiments;
pub mod sampling;
pub mod sweep;

pub use evolve::{
    evolve_lindblad, evolve_lindblad_segments, evolve_unitary, evolve_unitary_segments, lindblad_rhs,
    parallel_transport_violation, DecayModel, LindbladDiagnostics, LindbladOptions, Segment, StepRule,
};
pub use experiments::{
    adiabatic_phase_gate_run, nonadiabatic_phase_gate_run, projected_unitary, protocol_transport_violation,
    run_protocol, AdiabaticLoopSpec, ExperimentSettings, GateProtocol, GateRun, NonadiabaticPhaseGate, PulseShape,
    QubitChannel, ADIABATIC_LOOP,
};
pub use sampling::{bloch_sphere_sample, bloch_state, bloch_vector, Sampler};
pub use sweep::{fidelity_sweep, fidelity_sweep_with_threads, FidelityReport, SweepConfig, SweepKind};
