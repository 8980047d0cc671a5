//! Game instances for the exchange-evaluation (EE) task.
//!
//! An instance consists of two `n`-bit inputs `x, y` and two augmented
//! Boolean functions `f, g` on `{0, ..., 2^(n+1) - 1}`. Augmentation pads
//! an `n`-bit function to the doubled domain by forcing it to zero on the
//! upper half, which keeps the shifted photon wavepacket inside bins where
//! both parties apply trivial phases. Together with `f(0) = g(0) = 0` this
//! makes the commutation dichotomy exact.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{anticommutator_norm, commutator_norm, UnitarySpec};
use crate::{checked_dim, checked_inputs, ZERO_TOL};

/// A Boolean function on `{0, ..., 2^(n+1) - 1}` with `f(0) = 0` and
/// `f(z) = 0` for all `z >= 2^n`.
///
/// Only the table entries at `1..2^n` are free; there are `2^(2^n - 1)`
/// distinct augmented functions for each `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedBooleanFunction {
    n: u32,
    table: Vec<bool>,
}

impl AugmentedBooleanFunction {
    /// Builds a function from a full truth table of length `2^(n+1)`.
    pub fn new(n: u32, table: Vec<bool>) -> Result<Self> {
        let dim = checked_dim(n)? as usize;
        if table.len() != dim {
            return Err(Error::InvalidFunctionTable(format!(
                "table has {} entries, expected {dim}",
                table.len()
            )));
        }
        if table[0] {
            return Err(Error::InvalidFunctionTable("f(0) must be 0".into()));
        }
        if table[dim / 2..].iter().any(|&b| b) {
            return Err(Error::InvalidFunctionTable(format!(
                "f(z) must be 0 for z >= {}",
                dim / 2
            )));
        }
        Ok(Self { n, table })
    }

    /// Builds a function from 0/1 bytes, as used in the JSON encoding.
    pub fn from_bits(n: u32, bits: &[u8]) -> Result<Self> {
        let table = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidFunctionTable(format!(
                    "table entries must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::new(n, table)
    }

    /// The all-zero function.
    pub fn zero(n: u32) -> Result<Self> {
        let dim = checked_dim(n)? as usize;
        Ok(Self {
            n,
            table: vec![false; dim],
        })
    }

    /// The indicator of a single point `z` with `1 <= z < 2^n`.
    pub fn indicator(n: u32, z: u64) -> Result<Self> {
        let mut f = Self::zero(n)?;
        let half = checked_inputs(n)?;
        if z == 0 || z >= half {
            return Err(Error::ValueOutOfRange {
                what: "indicator point",
                value: z,
                bound: half,
            });
        }
        f.table[z as usize] = true;
        Ok(f)
    }

    /// Parity of the bit string `z` on the lower half, zero above.
    ///
    /// Used by the worst-case instance: no single bit of the table
    /// determines the parity of an unknown argument.
    pub fn parity(n: u32) -> Result<Self> {
        let mut f = Self::zero(n)?;
        let half = checked_inputs(n)?;
        for z in 1..half {
            f.table[z as usize] = z.count_ones() % 2 == 1;
        }
        Ok(f)
    }

    /// Enumerates all `2^(2^n - 1)` augmented functions; restricted to
    /// `n <= 4` to keep the count at most 2^15.
    pub fn enumerate(n: u32) -> Result<Vec<Self>> {
        let half = checked_inputs(n)? as usize;
        if n > 4 {
            return Err(Error::InputSizeOutOfRange(n));
        }
        let free_bits = half - 1;
        let mut out = Vec::with_capacity(1 << free_bits);
        for mask in 0u64..(1 << free_bits) {
            let mut f = Self::zero(n)?;
            for bit in 0..free_bits {
                f.table[1 + bit] = mask >> bit & 1 == 1;
            }
            out.push(f);
        }
        Ok(out)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Domain size `2^(n+1)`.
    pub fn domain_size(&self) -> u64 {
        self.table.len() as u64
    }

    /// Function value at `z`; panics if `z` is outside the domain.
    pub fn value(&self, z: u64) -> bool {
        self.table[z as usize]
    }

    /// Truth table as 0/1 bytes.
    pub fn bits(&self) -> Vec<u8> {
        self.table.iter().map(|&b| b as u8).collect()
    }
}

/// Serialized form of a game instance.
#[derive(Debug, Serialize, Deserialize)]
struct InstanceRecord {
    n: u32,
    x: u64,
    y: u64,
    f_table: Vec<u8>,
    g_table: Vec<u8>,
}

/// One complete EE game instance `(n, x, f, y, g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    n: u32,
    x: u64,
    y: u64,
    f: AugmentedBooleanFunction,
    g: AugmentedBooleanFunction,
}

impl GameInstance {
    pub fn new(
        x: u64,
        f: AugmentedBooleanFunction,
        y: u64,
        g: AugmentedBooleanFunction,
    ) -> Result<Self> {
        if f.n() != g.n() {
            return Err(Error::SizeMismatch {
                left: f.n(),
                right: g.n(),
            });
        }
        let n = f.n();
        let half = checked_inputs(n)?;
        for (what, value) in [("x", x), ("y", y)] {
            if value >= half {
                return Err(Error::ValueOutOfRange {
                    what,
                    value,
                    bound: half,
                });
            }
        }
        Ok(Self { n, x, y, f, g })
    }

    /// The hardest instance for the classical baseline: maximal inputs and
    /// parity functions, whose value cannot be pinned down from any strict
    /// subset of the table.
    pub fn worst_case(n: u32) -> Result<Self> {
        let half = checked_inputs(n)?;
        let f = AugmentedBooleanFunction::parity(n)?;
        Self::new(half - 1, f.clone(), half - 1, f)
    }

    /// A uniformly random instance drawn from a seeded generator.
    pub fn random(n: u32, seed: u64) -> Result<Self> {
        let half = checked_inputs(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = rng.random_range(0..half);
        let y = rng.random_range(0..half);
        let random_fn = |rng: &mut ChaCha8Rng| -> Result<AugmentedBooleanFunction> {
            let mut f = AugmentedBooleanFunction::zero(n)?;
            for z in 1..half as usize {
                f.table[z] = rng.random_bool(0.5);
            }
            Ok(f)
        };
        let f = random_fn(&mut rng)?;
        let g = random_fn(&mut rng)?;
        Self::new(x, f, y, g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn f(&self) -> &AugmentedBooleanFunction {
        &self.f
    }

    pub fn g(&self) -> &AugmentedBooleanFunction {
        &self.g
    }

    /// The game value `EE = f(y) XOR g(x)` as a 0/1 bit.
    pub fn ee_value(&self) -> u8 {
        (self.f.value(self.y) ^ self.g.value(self.x)) as u8
    }

    /// Alice's encoding unitary `U_A = X^x D(f)`.
    pub fn alice_spec(&self) -> UnitarySpec {
        UnitarySpec::new(self.x, self.f.clone()).expect("instance invariants")
    }

    /// Bob's encoding unitary `U_B = X^y D(g)`.
    pub fn bob_spec(&self) -> UnitarySpec {
        UnitarySpec::new(self.y, self.g.clone()).expect("instance invariants")
    }

    /// Checks the commutation dichotomy directly on the statevectors:
    /// exactly one of `[U_A, U_B]|0>` and `{U_A, U_B}|0>` vanishes, and
    /// the vanishing one is selected by the EE value.
    pub fn dichotomy_holds(&self) -> bool {
        let a = self.alice_spec();
        let b = self.bob_spec();
        let comm = commutator_norm(&a, &b).expect("matching sizes");
        let anti = anticommutator_norm(&a, &b).expect("matching sizes");
        let (should_vanish, other) = if self.ee_value() == 0 {
            (comm, anti)
        } else {
            (anti, comm)
        };
        should_vanish < ZERO_TOL && other > ZERO_TOL
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceRecord {
            n: self.n,
            x: self.x,
            y: self.y,
            f_table: self.f.bits(),
            g_table: self.g.bits(),
        })
        .expect("serializable record")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: InstanceRecord = serde_json::from_str(text)?;
        let f = AugmentedBooleanFunction::from_bits(rec.n, &rec.f_table)?;
        let g = AugmentedBooleanFunction::from_bits(rec.n, &rec.g_table)?;
        Self::new(rec.x, f, rec.y, g)
    }
}
