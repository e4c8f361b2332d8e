//! Simulation of quantum secret sharing built on Grover search with
//! generalized (phase-Ω) reflections, together with the eavesdropping
//! analyses and closed-form probability expressions used to check it.

pub mod attack;
pub mod error;
pub mod grover;
pub mod mub;
pub mod oracles;
pub mod protocol;
pub mod reflection;
pub mod report;
pub mod state;

pub use attack::{
    aggregate, sweep, AttackSummary, MessageMode, Reduction, Strategy, SweepConfig, SweepGrid,
};
pub use error::{Error, Result};
pub use grover::{iteration_schedule, optimal_phase, success_probability, Schedule};
pub use mub::{mub_qubit, PhaseLabel};
pub use protocol::{
    chunk_message, encode, honest_run, padlock_decode, reassemble_message, variant2_decode,
    variant2_encode, InitialState, OmegaChoice, Padlock, ProtocolVariant,
};
pub use reflection::{apply_reflection, ReflectionSpec};
pub use state::{inner, outcome_probability, tensor, Amplitude, PureState};
