//! Cyclic-shift mode schedules built from two passes over a binary delay
//! network.
//!
//! A block of `2^n` input modes indexed by arrival bin `z` is routed so
//! that mode `z` leaves in bin `(z + x) mod 2^n`, offset by a fixed
//! latency. The construction uses two switch passes: the first sends only
//! the leading `2^n - x` modes through a `2^n`-bin delay, which wraps the
//! trailing `x` modes in front of them; the second delays every mode by a
//! further `x` bins to close the cycle. The resulting latency is `2^n`
//! bins regardless of `x`.

use std::io::Write;

use crate::checked_inputs;
use crate::error::{Error, Result};

/// The output schedule of one routed block: mode `z` leaves in absolute
/// bin `out_time(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSchedule {
    n: u32,
    shift: u64,
    out_time: Vec<u64>,
}

impl PermutationSchedule {
    /// Routes a block of `2^n` modes through the two-pass construction
    /// for shift `x`.
    pub fn build(n: u32, x: u64) -> Result<Self> {
        let modes = checked_inputs(n)?;
        if x >= modes {
            return Err(Error::ValueOutOfRange {
                what: "shift",
                value: x,
                bound: modes,
            });
        }
        let out_time = (0..modes)
            .map(|z| {
                let first_pass = if z < modes - x { z + modes } else { z };
                first_pass + x
            })
            .collect();
        Ok(Self {
            n,
            shift: x,
            out_time,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The cyclic shift amount realized by this schedule.
    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn modes(&self) -> u64 {
        self.out_time.len() as u64
    }

    /// Absolute output bin of mode `z`.
    pub fn out_time(&self, z: u64) -> Result<u64> {
        self.out_time
            .get(z as usize)
            .copied()
            .ok_or(Error::ValueOutOfRange {
                what: "mode index",
                value: z,
                bound: self.modes(),
            })
    }

    pub fn out_times(&self) -> &[u64] {
        &self.out_time
    }

    /// Fixed latency between a mode's permuted bin and its output bin;
    /// uniform across modes by construction.
    pub fn latency(&self) -> u64 {
        self.out_time[0] - self.shift
    }

    /// True when the schedule realizes `z -> (z + shift) mod 2^n` up to
    /// its uniform latency.
    pub fn is_cyclic_shift(&self) -> bool {
        let modes = self.modes();
        let latency = self.latency();
        self.out_time
            .iter()
            .enumerate()
            .all(|(z, &t)| t == (z as u64 + self.shift) % modes + latency)
    }

    /// Feeds this schedule's output block into `other`, producing the
    /// combined schedule. Shifts add modulo `2^n` and latencies add.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let out_time = (0..self.modes())
            .map(|z| {
                let relative = self.out_time(z)? - self.latency();
                Ok(other.out_time(relative)? + self.latency())
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(Self {
            n: self.n,
            shift: (self.shift + other.shift) % self.modes(),
            out_time,
        })
    }

    /// Writes the schedule as CSV with columns `z,out_time`.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "z,out_time")?;
        for (z, t) in self.out_time.iter().enumerate() {
            writeln!(writer, "{z},{t}")?;
        }
        Ok(())
    }
}

/// All `2^n` schedules for one block size; capped at `n <= 8` to keep
/// exhaustive sweeps small.
pub fn all_schedules(n: u32) -> Result<Vec<PermutationSchedule>> {
    let modes = checked_inputs(n)?;
    if n > 8 {
        return Err(Error::ValueOutOfRange {
            what: "exhaustive schedule size",
            value: n as u64,
            bound: 9,
        });
    }
    (0..modes).map(|x| PermutationSchedule::build(n, x)).collect()
}
