//! Simulator and analysis toolkit for the exchange-evaluation (EE) game
//! played through a photonic quantum switch.
//!
//! Alice and Bob hold inputs `(x, f)` and `(y, g)` where `x, y` are
//! `n`-bit strings and `f, g` are Boolean functions with `f(0) = g(0) = 0`.
//! A referee must decide `EE = f(y) XOR g(x)`. Encoding the inputs as
//! time-bin unitaries `U_A = X^x D(f)` and `U_B = X^y D(g)` on a qudit of
//! dimension `2^(n+1)` makes the pair commute on `|0>` when `EE = 0` and
//! anticommute when `EE = 1`, so a single photon routed through a
//! superposition of the two application orders decides the game.
//!
//! The crate provides:
//!
//! - [`qudit`]: dense statevector algebra for the shift and phase-flip
//!   operators and the commutator/anticommutator actions;
//! - [`game`]: game instances, the EE value, and the algebraic oracle;
//! - [`switch`]: the controlled-order switch circuit and the classical
//!   one-way baseline protocol;
//! - [`photonics`]: fiber delay tables, loss budgets, and a Monte Carlo
//!   model of the detection statistics;
//! - [`complexity`]: one-way communication bounds and the
//!   quantum-to-classical advantage ratio gamma;
//! - [`permutation`]: the cyclic-shift schedule variant built from two
//!   switch passes;
//! - [`dataset`]: bundled measurement tables and reference results.

pub mod complexity;
pub mod dataset;
pub mod error;
pub mod game;
pub mod permutation;
pub mod photonics;
pub mod qudit;
pub mod switch;

pub use error::{Error, Result};

/// Largest supported input size `n`; the qudit dimension `2^(n+1)` is
/// stored densely, so this caps memory at 2^17 amplitudes.
pub const MAX_N: u32 = 16;

/// Absolute tolerance below which a vector norm is treated as zero when
/// classifying commutator and anticommutator actions.
pub const ZERO_TOL: f64 = 1e-10;

/// Absolute tolerance on `|norm - 1|` for state normalization checks.
pub const NORM_TOL: f64 = 1e-12;

/// Validates `1 <= n <= MAX_N` and returns the qudit dimension `2^(n+1)`.
pub(crate) fn checked_dim(n: u32) -> Result<u64> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::InputSizeOutOfRange(n));
    }
    Ok(1u64 << (n + 1))
}

/// Validates `1 <= n <= MAX_N` and returns the input-space size `2^n`.
pub(crate) fn checked_inputs(n: u32) -> Result<u64> {
    checked_dim(n).map(|d| d / 2)
}
