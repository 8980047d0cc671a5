//! Dense statevector algebra for time-bin qudits of dimension `2^(n+1)`.
//!
//! The two operator families are the cyclic shift `X|z> = |z+1 mod d>`
//! and the phase flip `D(f)|z> = (-1)^(f(z)) |z>` for an augmented
//! Boolean function `f`. A party's encoding unitary applies the phase
//! flip first and then shifts by its input: `U = X^x D(f)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::AugmentedBooleanFunction;
use crate::{checked_dim, NORM_TOL};

/// A pure state of a single qudit with dimension `d = 2^(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl QuditState {
    /// Builds a state from explicit amplitudes, which must be normalized.
    pub fn new(n: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = checked_dim(n)? as usize;
        if amplitudes.len() != dim {
            return Err(Error::BadAmplitudeCount {
                len: amplitudes.len(),
                expected: dim,
            });
        }
        let deviation = (vector_norm(&amplitudes) - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { n, amplitudes })
    }

    /// The computational basis state `|z>`.
    pub fn basis(n: u32, z: u64) -> Result<Self> {
        let dim = checked_dim(n)?;
        if z >= dim {
            return Err(Error::ValueOutOfRange {
                what: "basis label",
                value: z,
                bound: dim,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; dim as usize];
        amplitudes[z as usize] = Complex64::ONE;
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u64 {
        self.amplitudes.len() as u64
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, z: u64) -> Complex64 {
        self.amplitudes[z as usize]
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.amplitudes)
    }

    /// Applies `X^x`, i.e. maps `|z>` to `|z + x mod d>`.
    pub fn shifted(&self, x: u64) -> Result<Self> {
        let dim = self.dim();
        if x >= dim {
            return Err(Error::ValueOutOfRange {
                what: "shift amount",
                value: x,
                bound: dim,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; dim as usize];
        shift_into(&self.amplitudes, x as usize, &mut amplitudes);
        Ok(Self {
            n: self.n,
            amplitudes,
        })
    }

    /// Applies `D(f)`, flipping the sign of every bin where `f(z) = 1`.
    pub fn phase_flipped(&self, f: &AugmentedBooleanFunction) -> Result<Self> {
        if f.n() != self.n {
            return Err(Error::SizeMismatch {
                left: f.n(),
                right: self.n,
            });
        }
        let mut amplitudes = self.amplitudes.clone();
        phase_in_place(&mut amplitudes, f);
        Ok(Self {
            n: self.n,
            amplitudes,
        })
    }

    /// Applies a full encoding unitary `U = X^s D(f)`.
    pub fn applied(&self, u: &UnitarySpec) -> Result<Self> {
        if u.n() != self.n {
            return Err(Error::SizeMismatch {
                left: u.n(),
                right: self.n,
            });
        }
        let mut out = self.amplitudes.clone();
        apply_in_place(&mut out, u);
        Ok(Self {
            n: self.n,
            amplitudes: out,
        })
    }
}

/// A party's encoding unitary `U = X^shift D(phase)`, determined by an
/// `n`-bit shift and an augmented phase function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitarySpec {
    shift: u64,
    phase: AugmentedBooleanFunction,
}

impl UnitarySpec {
    pub fn new(shift: u64, phase: AugmentedBooleanFunction) -> Result<Self> {
        let half = phase.domain_size() / 2;
        if shift >= half {
            return Err(Error::ValueOutOfRange {
                what: "shift",
                value: shift,
                bound: half,
            });
        }
        Ok(Self { shift, phase })
    }

    pub fn n(&self) -> u32 {
        self.phase.n()
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn phase(&self) -> &AugmentedBooleanFunction {
        &self.phase
    }
}

fn vector_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn shift_into(src: &[Complex64], x: usize, dst: &mut [Complex64]) {
    let dim = src.len();
    for (z, &a) in src.iter().enumerate() {
        dst[(z + x) % dim] = a;
    }
}

fn phase_in_place(amps: &mut [Complex64], f: &AugmentedBooleanFunction) {
    for (z, a) in amps.iter_mut().enumerate() {
        if f.value(z as u64) {
            *a = -*a;
        }
    }
}

fn apply_in_place(amps: &mut Vec<Complex64>, u: &UnitarySpec) {
    phase_in_place(amps, &u.phase);
    let mut out = vec![Complex64::ZERO; amps.len()];
    shift_into(amps, u.shift as usize, &mut out);
    *amps = out;
}

fn check_same_n(a: &UnitarySpec, b: &UnitarySpec) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

fn ordered_product_on_zero(first: &UnitarySpec, second: &UnitarySpec) -> Vec<Complex64> {
    let dim = 1usize << (first.n() + 1);
    let mut amps = vec![Complex64::ZERO; dim];
    amps[0] = Complex64::ONE;
    apply_in_place(&mut amps, first);
    apply_in_place(&mut amps, second);
    amps
}

/// The vector `[U_a, U_b] |0> = U_a U_b |0> - U_b U_a |0>`.
pub fn commutator_action(a: &UnitarySpec, b: &UnitarySpec) -> Result<Vec<Complex64>> {
    check_same_n(a, b)?;
    let ab = ordered_product_on_zero(b, a);
    let ba = ordered_product_on_zero(a, b);
    Ok(ab.iter().zip(&ba).map(|(p, q)| p - q).collect())
}

/// The vector `{U_a, U_b} |0> = U_a U_b |0> + U_b U_a |0>`.
pub fn anticommutator_action(a: &UnitarySpec, b: &UnitarySpec) -> Result<Vec<Complex64>> {
    check_same_n(a, b)?;
    let ab = ordered_product_on_zero(b, a);
    let ba = ordered_product_on_zero(a, b);
    Ok(ab.iter().zip(&ba).map(|(p, q)| p + q).collect())
}

/// Euclidean norm of `[U_a, U_b] |0>`.
pub fn commutator_norm(a: &UnitarySpec, b: &UnitarySpec) -> Result<f64> {
    commutator_action(a, b).map(|v| vector_norm(&v))
}

/// Euclidean norm of `{U_a, U_b} |0>`.
pub fn anticommutator_norm(a: &UnitarySpec, b: &UnitarySpec) -> Result<f64> {
    anticommutator_action(a, b).map(|v| vector_norm(&v))
}

/// A control qubit joined to a target qudit; amplitude `(c, z)` is stored
/// at index `c * d + z`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl JointState {
    /// The switch input state `|+> (x) |0>`.
    pub fn plus_zero(n: u32) -> Result<Self> {
        let dim = checked_dim(n)? as usize;
        let mut amplitudes = vec![Complex64::ZERO; 2 * dim];
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[0] = w;
        amplitudes[dim] = w;
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn dim(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn amplitude(&self, control: u8, z: u64) -> Complex64 {
        self.amplitudes[control as usize * self.dim() + z as usize]
    }

    /// Applies `u` to the target qudit on the branch where the control
    /// qubit equals `control`.
    pub fn apply_on_branch(&mut self, control: u8, u: &UnitarySpec) -> Result<()> {
        if u.n() != self.n {
            return Err(Error::SizeMismatch {
                left: u.n(),
                right: self.n,
            });
        }
        let dim = self.dim();
        let start = control as usize * dim;
        let mut branch = self.amplitudes[start..start + dim].to_vec();
        apply_in_place(&mut branch, u);
        self.amplitudes[start..start + dim].copy_from_slice(&branch);
        Ok(())
    }

    /// Applies a Hadamard gate to the control qubit.
    pub fn hadamard_control(&mut self) {
        let dim = self.dim();
        let w = std::f64::consts::FRAC_1_SQRT_2;
        for z in 0..dim {
            let a = self.amplitudes[z];
            let b = self.amplitudes[dim + z];
            self.amplitudes[z] = (a + b) * w;
            self.amplitudes[dim + z] = (a - b) * w;
        }
    }

    /// Probability of finding the control qubit in state `c`.
    pub fn control_probability(&self, c: u8) -> f64 {
        let dim = self.dim();
        let start = c as usize * dim;
        self.amplitudes[start..start + dim]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.amplitudes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameInstance;
    use crate::ZERO_TOL;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn shift_moves_basis_states() {
        let s = QuditState::basis(1, 0).unwrap().shifted(1).unwrap();
        assert!(close(s.amplitude(1), Complex64::ONE));

        let s = QuditState::basis(1, 3).unwrap().shifted(1).unwrap();
        assert!(close(s.amplitude(0), Complex64::ONE));

        let s = QuditState::basis(3, 5).unwrap();
        assert_eq!(s.shifted(0).unwrap(), s);
    }

    #[test]
    fn shift_rejects_out_of_range_amounts() {
        assert!(QuditState::basis(1, 0).unwrap().shifted(4).is_err());
        assert!(QuditState::basis(1, 4).is_err());
    }

    #[test]
    fn phase_flip_negates_marked_bins() {
        let f = AugmentedBooleanFunction::indicator(2, 2).unwrap();
        let s = QuditState::basis(2, 2).unwrap().phase_flipped(&f).unwrap();
        assert!(close(s.amplitude(2), -Complex64::ONE));

        let s = QuditState::basis(2, 0).unwrap().phase_flipped(&f).unwrap();
        assert!(close(s.amplitude(0), Complex64::ONE));
    }

    #[test]
    fn unitary_phases_before_shifting() {
        let f = AugmentedBooleanFunction::indicator(2, 2).unwrap();
        let u = UnitarySpec::new(1, f).unwrap();
        let s = QuditState::basis(2, 2).unwrap().applied(&u).unwrap();
        assert!(close(s.amplitude(3), -Complex64::ONE));

        let s = QuditState::basis(2, 0).unwrap().applied(&u).unwrap();
        assert!(close(s.amplitude(1), Complex64::ONE));
    }

    #[test]
    fn unitary_spec_requires_n_bit_shift() {
        let f = AugmentedBooleanFunction::zero(2).unwrap();
        assert!(UnitarySpec::new(3, f.clone()).is_ok());
        assert!(UnitarySpec::new(4, f).is_err());
    }

    #[test]
    fn commutator_vanishes_for_identical_unitaries() {
        let f = AugmentedBooleanFunction::indicator(2, 3).unwrap();
        let u = UnitarySpec::new(2, f).unwrap();
        assert_eq!(commutator_norm(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn anticommuting_example_has_norm_two() {
        let f = AugmentedBooleanFunction::indicator(2, 2).unwrap();
        let g = AugmentedBooleanFunction::zero(2).unwrap();
        let a = UnitarySpec::new(1, f).unwrap();
        let b = UnitarySpec::new(2, g).unwrap();
        assert!(anticommutator_norm(&a, &b).unwrap() < ZERO_TOL);
        assert!((commutator_norm(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        let action = commutator_action(&a, &b).unwrap();
        assert!(close(action[3], Complex64::new(-2.0, 0.0)));
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let a = UnitarySpec::new(0, AugmentedBooleanFunction::zero(1).unwrap()).unwrap();
        let b = UnitarySpec::new(0, AugmentedBooleanFunction::zero(2).unwrap()).unwrap();
        assert!(commutator_norm(&a, &b).is_err());
        let s = QuditState::basis(1, 0).unwrap();
        assert!(s.phase_flipped(b.phase()).is_err());
        assert!(s.applied(&b).is_err());
    }

    #[test]
    fn joint_state_starts_in_plus_zero() {
        let s = JointState::plus_zero(2).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.control_probability(0) - 0.5).abs() < 1e-12);
        assert!((s.control_probability(1) - 0.5).abs() < 1e-12);
    }

    fn arb_state(n: u32) -> impl Strategy<Value = QuditState> {
        let dim = 1usize << (n + 1);
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
            "norm too small",
            move |pairs| {
                let amps: Vec<Complex64> = pairs
                    .iter()
                    .map(|&(re, im)| Complex64::new(re, im))
                    .collect();
                let norm = vector_norm(&amps);
                if norm < 1e-3 {
                    return None;
                }
                let scaled = amps.iter().map(|a| a / norm).collect();
                Some(QuditState::new(n, scaled).expect("normalized"))
            },
        )
    }

    proptest! {
        /// Shifts and phase flips preserve the norm.
        #[test]
        fn operators_are_unitary(s in arb_state(3), x in 0u64..16, seed in 0u64..1000) {
            let inst = GameInstance::random(3, seed).unwrap();
            prop_assert!((s.shifted(x).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((s.phase_flipped(inst.f()).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((s.applied(&inst.alice_spec()).unwrap().norm() - 1.0).abs() < 1e-12);
        }

        /// Composing shifts adds the amounts modulo the dimension.
        #[test]
        fn shifts_compose_additively(s in arb_state(2), a in 0u64..8, b in 0u64..8) {
            let two_step = s.shifted(a).unwrap().shifted(b).unwrap();
            let one_step = s.shifted((a + b) % 8).unwrap();
            for z in 0..8 {
                prop_assert!(close(two_step.amplitude(z), one_step.amplitude(z)));
            }
        }

        /// A phase flip is an involution.
        #[test]
        fn phase_flip_is_involutive(s in arb_state(2), seed in 0u64..1000) {
            let inst = GameInstance::random(2, seed).unwrap();
            let back = s.phase_flipped(inst.g()).unwrap().phase_flipped(inst.g()).unwrap();
            for z in 0..8 {
                prop_assert!(close(back.amplitude(z), s.amplitude(z)));
            }
        }

        /// The product state U_a U_b |0> lives entirely in bin x + y,
        /// which never wraps around the doubled dimension.
        #[test]
        fn ordered_product_has_single_bin_support(seed in 0u64..2000, n in 1u32..=5) {
            let inst = GameInstance::random(n, seed).unwrap();
            let target = inst.x() + inst.y();
            prop_assert!(target < 1u64 << (n + 1));
            let amps = ordered_product_on_zero(&inst.bob_spec(), &inst.alice_spec());
            for (z, a) in amps.iter().enumerate() {
                if z as u64 == target {
                    prop_assert!((a.norm() - 1.0).abs() < 1e-12);
                } else {
                    prop_assert!(a.norm() < 1e-12);
                }
            }
        }

        /// Exactly one of the commutator and anticommutator actions on
        /// |0> vanishes, the survivor has norm 2, and the vanishing one
        /// is selected by the EE value.
        #[test]
        fn dichotomy_on_random_instances(seed in 0u64..2000, n in 1u32..=5) {
            let inst = GameInstance::random(n, seed).unwrap();
            let comm = commutator_norm(&inst.alice_spec(), &inst.bob_spec()).unwrap();
            let anti = anticommutator_norm(&inst.alice_spec(), &inst.bob_spec()).unwrap();
            if inst.ee_value() == 0 {
                prop_assert!(comm < ZERO_TOL);
                prop_assert!((anti - 2.0).abs() < 1e-12);
            } else {
                prop_assert!(anti < ZERO_TOL);
                prop_assert!((comm - 2.0).abs() < 1e-12);
            }
            prop_assert!(inst.dichotomy_holds());
        }
    }
}
