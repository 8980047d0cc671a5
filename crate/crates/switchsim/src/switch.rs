//! The controlled-order switch circuit that decides the EE game, plus the
//! one-way classical baseline protocol used for comparison.
//!
//! The photon's path qubit starts in `|+>` and controls the order in which
//! the two encoding unitaries act on the time-bin qudit: the `c = 0`
//! branch applies `U_A` then `U_B`, the `c = 1` branch applies `U_B` then
//! `U_A`. After a final Hadamard on the control the state is
//!
//! ```text
//! ( |0> (x) {U_A, U_B} |0>  -  |1> (x) [U_A, U_B] |0> ) / 2
//! ```
//!
//! so the commutation dichotomy sends the photon to port 0 when `EE = 0`
//! and to port 1 when `EE = 1`, with certainty in the absence of noise.

use crate::game::GameInstance;
use crate::qudit::JointState;

/// Port statistics of one noiseless switch evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchOutcome {
    /// Probability that the control qubit is measured as 0.
    pub p0: f64,
    /// Probability that the control qubit is measured as 1.
    pub p1: f64,
    /// The declared EE value: the more likely port, with ties going to 0.
    pub decision: u8,
}

/// Runs the switch circuit on an instance and returns the port statistics.
pub fn run_switch(inst: &GameInstance) -> SwitchOutcome {
    let mut state = JointState::plus_zero(inst.n()).expect("instance n is valid");
    let a = inst.alice_spec();
    let b = inst.bob_spec();
    state.apply_on_branch(0, &a).expect("matching sizes");
    state.apply_on_branch(0, &b).expect("matching sizes");
    state.apply_on_branch(1, &b).expect("matching sizes");
    state.apply_on_branch(1, &a).expect("matching sizes");
    state.hadamard_control();
    let p0 = state.control_probability(0);
    let p1 = state.control_probability(1);
    SwitchOutcome {
        p0,
        p1,
        decision: (p1 > p0) as u8,
    }
}

/// The switch's declared EE value for an instance.
pub fn decide_ee(inst: &GameInstance) -> u8 {
    run_switch(inst).decision
}

/// Result of the classical one-way baseline protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineResult {
    pub decision: u8,
    /// Total bits sent to the referee by both parties.
    pub bits_communicated: u64,
}

/// A zero-error classical protocol: Alice sends `x` and the free part of
/// `f`'s table (the values at `1..2^n`), the referee reconstructs `f(y)`
/// and forwards `x` to Bob, and Bob answers with the single bit
/// `f(y) XOR g(x)`.
pub fn classical_baseline(inst: &GameInstance) -> BaselineResult {
    let half = 1u64 << inst.n();
    let table_bits: Vec<bool> = (1..half).map(|z| inst.f().value(z)).collect();
    let f_of_y = if inst.y() == 0 {
        false
    } else {
        table_bits[(inst.y() - 1) as usize]
    };
    let decision = (f_of_y ^ inst.g().value(inst.x())) as u8;
    BaselineResult {
        decision,
        bits_communicated: (half - 1) + inst.n() as u64 + 1,
    }
}

/// Majority vote over detector counts; ties go to 0.
pub fn majority_decision(port0_counts: u64, port1_counts: u64) -> u8 {
    (port1_counts > port0_counts) as u8
}
