//! Photonic hardware model: binary fiber delay lines, loss budgets, and a
//! Monte Carlo model of coincidence detection.
//!
//! Each party programs its `n`-bit input into a chain of fiber segments;
//! segment `k` routes through either a long arm targeting
//! `2 * (2^(k-1) + 1)` ns or a short arm targeting 2 ns, so the relative
//! delay across the chain encodes the input as `2x` ns at a 2 ns bin
//! width. Losses accumulate additively in dB along the chosen arms and
//! combine with a fixed base loss for source, coupling, and detection.
//!
//! Detection is modeled per heralded photon: the photon survives with the
//! end-to-end efficiency, exits the interferometer at the correct port
//! with probability `(1 + V) / 2` for visibility `V`, fires its detector
//! with that detector's efficiency, and competes with dark counts that
//! fire each detector within the coincidence window. A trial yields at
//! most one recorded coincidence; if both detectors fire the tie is
//! broken by a fair coin.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameInstance;
use crate::switch::decide_ee;
use crate::MAX_N;

/// Largest tolerated absolute delay deviation across a full 12-segment
/// chain, in picoseconds.
pub const DELAY_DEVIATION_BOUND_PS: f64 = 900.0;

/// Tolerated difference between a measured arm length and its design
/// target, in nanoseconds.
const ARM_LENGTH_TOL_NS: f64 = 0.2;

/// The two parties programming fiber chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Alice => write!(f, "alice"),
            Party::Bob => write!(f, "bob"),
        }
    }
}

/// Measured lengths and losses for one switchable fiber segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSegment {
    pub long_length_ns: f64,
    pub long_length_err_ns: f64,
    pub long_loss_db: f64,
    pub long_loss_err_db: f64,
    pub short_length_ns: f64,
    pub short_length_err_ns: f64,
    pub short_loss_db: f64,
    pub short_loss_err_db: f64,
}

/// Design target for the long arm of segment `k` (1-based), in ns.
pub fn long_arm_target_ns(k: u32) -> f64 {
    2.0 * ((1u64 << (k - 1)) as f64 + 1.0)
}

/// Design target for every short arm, in ns.
pub const SHORT_ARM_TARGET_NS: f64 = 2.0;

/// One party's chain of switchable fiber segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSegmentTable")]
pub struct FiberSegmentTable {
    party: Party,
    segments: Vec<FiberSegment>,
}

#[derive(Deserialize)]
struct RawSegmentTable {
    party: Party,
    segments: Vec<FiberSegment>,
}

impl TryFrom<RawSegmentTable> for FiberSegmentTable {
    type Error = Error;

    fn try_from(raw: RawSegmentTable) -> Result<Self> {
        FiberSegmentTable::new(raw.party, raw.segments)
    }
}

impl FiberSegmentTable {
    /// Builds a table, checking segment count, loss positivity, and that
    /// every measured arm length is within tolerance of its target.
    pub fn new(party: Party, segments: Vec<FiberSegment>) -> Result<Self> {
        if segments.is_empty() || segments.len() > MAX_N as usize {
            return Err(Error::InvalidSegmentTable(format!(
                "{party} table has {} segments, expected 1..={MAX_N}",
                segments.len()
            )));
        }
        for (i, seg) in segments.iter().enumerate() {
            let k = i as u32 + 1;
            let checks = [
                ("long length", seg.long_length_ns, long_arm_target_ns(k)),
                ("short length", seg.short_length_ns, SHORT_ARM_TARGET_NS),
            ];
            for (what, measured, target) in checks {
                if !measured.is_finite() || (measured - target).abs() > ARM_LENGTH_TOL_NS {
                    return Err(Error::InvalidSegmentTable(format!(
                        "{party} segment {k} {what} {measured} ns is outside \
                         {target} +/- {ARM_LENGTH_TOL_NS} ns"
                    )));
                }
            }
            let losses = [
                ("long loss", seg.long_loss_db),
                ("short loss", seg.short_loss_db),
                ("long loss error", seg.long_loss_err_db),
                ("short loss error", seg.short_loss_err_db),
                ("long length error", seg.long_length_err_ns),
                ("short length error", seg.short_length_err_ns),
            ];
            for (what, value) in losses {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidSegmentTable(format!(
                        "{party} segment {k} {what} {value} must be nonnegative"
                    )));
                }
            }
        }
        Ok(Self { party, segments })
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn segments(&self) -> &[FiberSegment] {
        &self.segments
    }

    fn check_input(&self, bits: u32, x: u64) -> Result<()> {
        let bound = 1u64 << bits;
        if x >= bound {
            return Err(Error::ValueOutOfRange {
                what: "chain input",
                value: x,
                bound,
            });
        }
        Ok(())
    }

    /// Relative delay of input `x` against the all-short configuration,
    /// in ns: the sum of `long - short` over the set bits of `x`.
    pub fn delay_ns(&self, x: u64) -> Result<f64> {
        self.check_input(self.segments.len() as u32, x)?;
        Ok(self
            .segments
            .iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .map(|(_, seg)| seg.long_length_ns - seg.short_length_ns)
            .sum())
    }

    /// Signed deviation of the relative delay from its `2x` ns target,
    /// in ps.
    pub fn deviation_ps(&self, x: u64) -> Result<f64> {
        Ok((self.delay_ns(x)? - 2.0 * x as f64) * 1000.0)
    }

    /// Exhaustively scans all inputs and returns the one with the largest
    /// absolute delay deviation, in ps.
    pub fn max_deviation_ps(&self) -> Result<(u64, f64)> {
        let mut worst = (0u64, 0.0f64);
        for x in 0..1u64 << self.segments.len() {
            let dev = self.deviation_ps(x)?.abs();
            if dev > worst.1 {
                worst = (x, dev);
            }
        }
        Ok(worst)
    }

    /// Accumulated loss in dB of the arms selected by the low `n` bits
    /// of `x`, covering segments `1..=n` only.
    pub fn section_loss_db(&self, n: u32, x: u64) -> Result<f64> {
        if n < 1 || n as usize > self.segments.len() {
            return Err(Error::InvalidSegmentTable(format!(
                "{} table has {} segments, cannot cover n = {n}",
                self.party,
                self.segments.len()
            )));
        }
        self.check_input(n, x)?;
        Ok(self.segments[..n as usize]
            .iter()
            .enumerate()
            .map(|(i, seg)| {
                if x >> i & 1 == 1 {
                    seg.long_loss_db
                } else {
                    seg.short_loss_db
                }
            })
            .sum())
    }
}

/// The two parties' segment tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTables {
    pub alice: FiberSegmentTable,
    pub bob: FiberSegmentTable,
}

/// Full description of the photonic setup for one input size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonicConfig {
    pub n: u32,
    pub time_bin_ns: f64,
    /// Loss of everything outside the programmable chains: source,
    /// coupling, interferometer, and detection.
    pub system_base_loss_db: f64,
    /// When set, replaces the entire compositional loss budget.
    #[serde(default)]
    pub system_loss_override_db: Option<f64>,
    /// Dark count rates of detectors 0 and 1, in Hz.
    pub dark_count_rates_hz: [f64; 2],
    /// Detection probabilities of detectors 0 and 1, applied on top of
    /// the dB loss budget. Leave at 1.0 when the budget already includes
    /// detection, as the bundled reference configuration does.
    pub detector_efficiencies: [f64; 2],
    /// Two-photon interference visibility of the switch.
    pub visibility: f64,
    /// Nominal heralded pair rate, kept for rate bookkeeping only.
    pub pair_rate_hz: f64,
    pub segment_tables: SegmentTables,
}

impl PhotonicConfig {
    /// Checks every field against its allowed range.
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n > MAX_N {
            return Err(Error::InputSizeOutOfRange(self.n));
        }
        if !(self.time_bin_ns > 0.0 && self.time_bin_ns.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "time bin {} ns must be positive",
                self.time_bin_ns
            )));
        }
        if !self.system_base_loss_db.is_finite() || self.system_base_loss_db < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "base loss {} dB must be nonnegative",
                self.system_base_loss_db
            )));
        }
        if let Some(db) = self.system_loss_override_db {
            if db.is_nan() || db < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "loss override {db} dB must be nonnegative"
                )));
            }
        }
        for (what, value) in [
            ("dark rate 0", self.dark_count_rates_hz[0]),
            ("dark rate 1", self.dark_count_rates_hz[1]),
            ("pair rate", self.pair_rate_hz),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{what} {value} Hz must be nonnegative"
                )));
            }
        }
        for (i, &eff) in self.detector_efficiencies.iter().enumerate() {
            if !(0.0..=1.0).contains(&eff) {
                return Err(Error::InvalidConfig(format!(
                    "detector {i} efficiency {eff} is outside [0, 1]"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidConfig(format!(
                "visibility {} is outside [0, 1]",
                self.visibility
            )));
        }
        if self.system_loss_override_db.is_none() {
            for table in [&self.segment_tables.alice, &self.segment_tables.bob] {
                if (table.segments().len() as u32) < self.n {
                    return Err(Error::InvalidConfig(format!(
                        "{} table covers only {} segments for n = {}",
                        table.party(),
                        table.segments().len(),
                        self.n
                    )));
                }
            }
        }
        if self.segment_tables.alice.party() != Party::Alice
            || self.segment_tables.bob.party() != Party::Bob
        {
            return Err(Error::InvalidConfig(
                "segment tables are assigned to the wrong parties".into(),
            ));
        }
        Ok(())
    }

    /// The coincidence window spanning all `2^(n+1)` time bins, in ns.
    pub fn coincidence_window_ns(&self) -> f64 {
        self.time_bin_ns * (1u64 << (self.n + 1)) as f64
    }

    /// End-to-end efficiency for one instance: either the override, or
    /// the base loss plus both parties' input-dependent section losses.
    pub fn system_efficiency(&self, inst: &GameInstance) -> Result<f64> {
        if inst.n() != self.n {
            return Err(Error::SizeMismatch {
                left: inst.n(),
                right: self.n,
            });
        }
        let total_db = match self.system_loss_override_db {
            Some(db) => db,
            None => {
                self.system_base_loss_db
                    + self
                        .segment_tables
                        .alice
                        .section_loss_db(self.n, inst.x())?
                    + self.segment_tables.bob.section_loss_db(self.n, inst.y())?
            }
        };
        efficiency_from_loss_db(total_db)
    }

    fn dark_window_probabilities(&self) -> [f64; 2] {
        let window_s = self.coincidence_window_ns() * 1e-9;
        [
            (self.dark_count_rates_hz[0] * window_s).clamp(0.0, 1.0),
            (self.dark_count_rates_hz[1] * window_s).clamp(0.0, 1.0),
        ]
    }
}

/// Converts a loss in dB to a transmission efficiency `10^(-L/10)`.
/// Accepts `+inf` for a fully opaque channel.
pub fn efficiency_from_loss_db(loss_db: f64) -> Result<f64> {
    if loss_db.is_nan() || loss_db < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "loss {loss_db} dB must be nonnegative"
        )));
    }
    Ok(10f64.powf(-loss_db / 10.0))
}

/// Aggregated counts of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n: u32,
    pub x: u64,
    pub y: u64,
    pub trials: u64,
    /// Trials whose recorded coincidence hit the correct detector.
    pub correct: u64,
    /// Trials whose recorded coincidence hit the wrong detector.
    pub wrong: u64,
    /// Total dark firings across both detectors and all trials.
    pub dark: u64,
    /// Estimated error probability; 0.5 +/- 0.5 when no coincidence was
    /// recorded at all.
    pub epsilon: f64,
    pub epsilon_stderr: f64,
    pub seed: u64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    correct: u64,
    wrong: u64,
    dark: u64,
}

impl Tally {
    fn merge(self, other: Self) -> Self {
        Self {
            correct: self.correct + other.correct,
            wrong: self.wrong + other.wrong,
            dark: self.dark + other.dark,
        }
    }
}

#[derive(Clone, Copy)]
struct TrialParams {
    eta: f64,
    p_correct_port: f64,
    correct_detector: usize,
    detector_eff: [f64; 2],
    dark_prob: [f64; 2],
}

fn run_trial(rng: &mut ChaCha8Rng, p: &TrialParams) -> Tally {
    let survives = rng.random_bool(p.eta);
    let to_correct = rng.random_bool(p.p_correct_port);
    let port = if to_correct {
        p.correct_detector
    } else {
        1 - p.correct_detector
    };
    let detected = rng.random_bool(p.detector_eff[port]);
    let dark = [
        rng.random_bool(p.dark_prob[0]),
        rng.random_bool(p.dark_prob[1]),
    ];
    let photon = survives && detected;
    let fires = [
        (photon && port == 0) || dark[0],
        (photon && port == 1) || dark[1],
    ];
    let click = match (fires[0], fires[1]) {
        (false, false) => None,
        (true, false) => Some(0),
        (false, true) => Some(1),
        (true, true) => Some(rng.random_bool(0.5) as usize),
    };
    Tally {
        correct: (click == Some(p.correct_detector)) as u64,
        wrong: (click == Some(1 - p.correct_detector)) as u64,
        dark: dark[0] as u64 + dark[1] as u64,
    }
}

/// Runs the per-photon detection model for `trials` heralded photons.
///
/// Each trial draws from its own counter-based stream of the seeded
/// generator, so results are bit-identical for any number of worker
/// threads.
pub fn simulate_counts(
    inst: &GameInstance,
    config: &PhotonicConfig,
    trials: u64,
    seed: u64,
) -> Result<CountRecord> {
    config.validate()?;
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let params = TrialParams {
        eta: config.system_efficiency(inst)?,
        p_correct_port: (1.0 + config.visibility) / 2.0,
        correct_detector: decide_ee(inst) as usize,
        detector_eff: config.detector_efficiencies,
        dark_prob: config.dark_window_probabilities(),
    };
    let base = ChaCha8Rng::seed_from_u64(seed);
    let tally = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = base.clone();
            rng.set_stream(t);
            run_trial(&mut rng, &params)
        })
        .reduce(Tally::default, Tally::merge);
    let (epsilon, epsilon_stderr) =
        estimate_error_probability(tally.correct, tally.wrong).unwrap_or((0.5, 0.5));
    Ok(CountRecord {
        n: inst.n(),
        x: inst.x(),
        y: inst.y(),
        trials,
        correct: tally.correct,
        wrong: tally.wrong,
        dark: tally.dark,
        epsilon,
        epsilon_stderr,
        seed,
    })
}

/// Closed-form error probability of the detection model, for checking
/// Monte Carlo estimates against an independent route.
///
/// With photon click probabilities `q_c, q_w` at the correct and wrong
/// detectors, miss probability `p_m = 1 - q_c - q_w`, and dark window
/// probabilities `d_c, d_w`, the recorded-coincidence channels are
/// enumerated exactly and ties contribute half their weight to each side.
pub fn expected_epsilon(inst: &GameInstance, config: &PhotonicConfig) -> Result<f64> {
    config.validate()?;
    let eta = config.system_efficiency(inst)?;
    let correct = decide_ee(inst) as usize;
    let eff = config.detector_efficiencies;
    let q_c = eta * (1.0 + config.visibility) / 2.0 * eff[correct];
    let q_w = eta * (1.0 - config.visibility) / 2.0 * eff[1 - correct];
    let p_m = 1.0 - q_c - q_w;
    let dark = config.dark_window_probabilities();
    let (d_c, d_w) = (dark[correct], dark[1 - correct]);
    let only_correct = q_c * (1.0 - d_w) + p_m * d_c * (1.0 - d_w);
    let only_wrong = q_w * (1.0 - d_c) + p_m * (1.0 - d_c) * d_w;
    let both = q_c * d_w + q_w * d_c + p_m * d_c * d_w;
    let total = only_correct + only_wrong + both;
    if total <= 0.0 {
        return Err(Error::EmptyCounts("no coincidence channel is open"));
    }
    Ok((only_wrong + both / 2.0) / total)
}

/// Binomial point estimate and standard error of the error probability
/// from coincidence counts.
pub fn estimate_error_probability(correct: u64, wrong: u64) -> Result<(f64, f64)> {
    let total = correct + wrong;
    if total == 0 {
        return Err(Error::EmptyCounts("no coincidences recorded"));
    }
    let eps = wrong as f64 / total as f64;
    let stderr = (eps * (1.0 - eps) / total as f64).sqrt();
    Ok((eps, stderr))
}

/// Heralded second-order autocorrelation
/// `g2(0) = 2 C123 C1 / (C12 + C13)^2` from singles, twofold, and
/// threefold coincidence rates.
pub fn g2_estimate(c1: f64, c12: f64, c13: f64, c123: f64) -> Result<f64> {
    for (what, value) in [("C1", c1), ("C12", c12), ("C13", c13), ("C123", c123)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability {
                what,
                value,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    let heralded = c12 + c13;
    if heralded <= 0.0 {
        return Err(Error::EmptyCounts("no heralded twofold coincidences"));
    }
    Ok(2.0 * c123 * c1 / (heralded * heralded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{reference_config, Dataset};

    fn tables() -> SegmentTables {
        Dataset::embedded().fiber_tables().unwrap()
    }

    fn synthetic_segment(k: u32, long_loss: f64, short_loss: f64) -> FiberSegment {
        FiberSegment {
            long_length_ns: long_arm_target_ns(k),
            long_length_err_ns: 0.0,
            long_loss_db: long_loss,
            long_loss_err_db: 0.0,
            short_length_ns: SHORT_ARM_TARGET_NS,
            short_length_err_ns: 0.0,
            short_loss_db: short_loss,
            short_loss_err_db: 0.0,
        }
    }

    fn synthetic_table(party: Party, segments: u32) -> FiberSegmentTable {
        let segs = (1..=segments)
            .map(|k| synthetic_segment(k, 0.0, 0.0))
            .collect();
        FiberSegmentTable::new(party, segs).unwrap()
    }

    #[test]
    fn delay_reference_points() {
        let t = tables();
        assert_eq!(t.alice.delay_ns(0).unwrap(), 0.0);
        assert!((t.alice.delay_ns(1).unwrap() - 1.998).abs() < 1e-12);
        assert!((t.bob.delay_ns(2).unwrap() - 4.011).abs() < 1e-12);
        assert!(t.alice.delay_ns(1 << 12).is_err());
    }

    #[test]
    fn measured_chains_stay_inside_the_deviation_bound() {
        let t = tables();
        let (x_a, dev_a) = t.alice.max_deviation_ps().unwrap();
        assert_eq!(x_a, 4023);
        assert!((dev_a - 198.0).abs() < 1e-6);
        let (x_b, dev_b) = t.bob.max_deviation_ps().unwrap();
        assert_eq!(x_b, 4044);
        assert!((dev_b - 88.0).abs() < 1e-6);
        assert!(dev_a < DELAY_DEVIATION_BOUND_PS);
        assert!(dev_b < DELAY_DEVIATION_BOUND_PS);
    }

    #[test]
    fn exhaustive_deviation_matches_extremal_composition() {
        for table in [&tables().alice, &tables().bob] {
            let mut pos = 0.0f64;
            let mut neg = 0.0f64;
            for (i, seg) in table.segments().iter().enumerate() {
                let dev = seg.long_length_ns - seg.short_length_ns - (1u64 << (i + 1)) as f64;
                if dev > 0.0 {
                    pos += dev;
                } else {
                    neg += dev;
                }
            }
            let extremal = pos.max(-neg) * 1000.0;
            let (_, exhaustive) = table.max_deviation_ps().unwrap();
            assert!((exhaustive - extremal).abs() < 1e-9);
        }
    }

    #[test]
    fn zeroed_deviation_table_has_zero_max() {
        let table = synthetic_table(Party::Alice, 12);
        let (_, dev) = table.max_deviation_ps().unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn section_loss_reference_points() {
        let t = tables();
        assert!((t.alice.section_loss_db(12, 0).unwrap() - 0.876).abs() < 1e-9);
        assert!((t.alice.section_loss_db(12, 4095).unwrap() - 1.594).abs() < 1e-9);
        assert!((t.bob.section_loss_db(12, 0).unwrap() - 1.009).abs() < 1e-9);
        assert!((t.bob.section_loss_db(12, 4095).unwrap() - 1.7685).abs() < 1e-9);
        assert_eq!(synthetic_table(Party::Bob, 12).section_loss_db(12, 77).unwrap(), 0.0);
        assert!(t.alice.section_loss_db(13, 0).is_err());
        assert!(t.alice.section_loss_db(4, 16).is_err());
    }

    #[test]
    fn section_loss_is_monotone_when_long_arms_dominate() {
        let segs = (1..=8)
            .map(|k| synthetic_segment(k, 0.2 + 0.01 * k as f64, 0.1))
            .collect();
        let table = FiberSegmentTable::new(Party::Alice, segs).unwrap();
        for x in 0u64..256 {
            let loss = table.section_loss_db(8, x).unwrap();
            for bit in 0..8 {
                if x >> bit & 1 == 0 {
                    let more = table.section_loss_db(8, x | 1 << bit).unwrap();
                    assert!(more >= loss);
                    let delay = table.delay_ns(x).unwrap();
                    assert!(table.delay_ns(x | 1 << bit).unwrap() > delay);
                }
            }
        }
    }

    #[test]
    fn table_construction_rejects_bad_arms() {
        let mut seg = synthetic_segment(1, 0.0, 0.0);
        seg.long_length_ns = 4.5;
        assert!(FiberSegmentTable::new(Party::Alice, vec![seg]).is_err());

        let mut seg = synthetic_segment(1, 0.0, 0.0);
        seg.short_loss_db = -0.1;
        assert!(FiberSegmentTable::new(Party::Alice, vec![seg]).is_err());

        assert!(FiberSegmentTable::new(Party::Alice, vec![]).is_err());
    }

    #[test]
    fn efficiency_reference_points() {
        assert!((efficiency_from_loss_db(13.86).unwrap() - 0.04111497211045223).abs() < 1e-15);
        assert_eq!(efficiency_from_loss_db(0.0).unwrap(), 1.0);
        assert_eq!(efficiency_from_loss_db(f64::INFINITY).unwrap(), 0.0);
        assert!(efficiency_from_loss_db(-1.0).is_err());
    }

    #[test]
    fn config_validation_catches_violations() {
        let mut config = reference_config(12).unwrap();
        config.validate().unwrap();
        config.visibility = 1.2;
        assert!(config.validate().is_err());

        let mut config = reference_config(12).unwrap();
        config.dark_count_rates_hz[1] = -3.0;
        assert!(config.validate().is_err());

        let mut config = reference_config(12).unwrap();
        config.n = 13;
        assert!(config.validate().is_err());

        let mut config = reference_config(12).unwrap();
        config.detector_efficiencies[0] = 1.5;
        assert!(config.validate().is_err());
    }

    #[test]
    fn coincidence_window_spans_all_bins() {
        let config = reference_config(12).unwrap();
        assert_eq!(config.coincidence_window_ns(), 16384.0);
        let dark = config.dark_window_probabilities();
        assert!((dark[0] - 9.3 * 16384.0e-9).abs() < 1e-18);
    }

    #[test]
    fn system_efficiency_composes_losses() {
        let config = reference_config(12).unwrap();
        let inst = GameInstance::worst_case(12).unwrap();
        let loss_a = config.segment_tables.alice.section_loss_db(12, 4095).unwrap();
        let loss_b = config.segment_tables.bob.section_loss_db(12, 4095).unwrap();
        assert!((loss_a - 1.594).abs() < 1e-9 && (loss_b - 1.7685).abs() < 1e-9);
        let expected = efficiency_from_loss_db(11.62 + loss_a + loss_b).unwrap();
        assert_eq!(config.system_efficiency(&inst).unwrap(), expected);

        let mut config = reference_config(12).unwrap();
        config.system_loss_override_db = Some(15.14);
        let eta = config.system_efficiency(&inst).unwrap();
        assert!((eta - 0.030619634336906773).abs() < 1e-15);

        let config = reference_config(12).unwrap();
        let other = GameInstance::worst_case(11).unwrap();
        assert!(config.system_efficiency(&other).is_err());
    }

    fn clean_config(n: u32, visibility: f64) -> PhotonicConfig {
        PhotonicConfig {
            n,
            time_bin_ns: 2.0,
            system_base_loss_db: 0.0,
            system_loss_override_db: Some(0.0),
            dark_count_rates_hz: [0.0, 0.0],
            detector_efficiencies: [1.0, 1.0],
            visibility,
            pair_rate_hz: 1.0e5,
            segment_tables: SegmentTables {
                alice: synthetic_table(Party::Alice, 12),
                bob: synthetic_table(Party::Bob, 12),
            },
        }
    }

    #[test]
    fn perfect_visibility_never_errs() {
        let inst = GameInstance::worst_case(4).unwrap();
        let config = clean_config(4, 1.0);
        let record = simulate_counts(&inst, &config, 20_000, 11).unwrap();
        assert_eq!(record.wrong, 0);
        assert_eq!(record.correct, 20_000);
        assert_eq!(record.epsilon, 0.0);
        assert_eq!(expected_epsilon(&inst, &config).unwrap(), 0.0);
    }

    #[test]
    fn reduced_visibility_matches_the_closed_form() {
        let inst = GameInstance::worst_case(4).unwrap();
        let config = clean_config(4, 0.9);
        assert!((expected_epsilon(&inst, &config).unwrap() - 0.05).abs() < 1e-15);
        let trials = 100_000;
        let record = simulate_counts(&inst, &config, trials, 5).unwrap();
        assert_eq!(record.correct + record.wrong, trials);
        assert!((record.epsilon - 0.05).abs() < 3.0 * record.epsilon_stderr);
    }

    #[test]
    fn dark_counts_alone_guess_at_chance() {
        let mut config = clean_config(4, 0.9);
        config.system_loss_override_db = Some(f64::INFINITY);
        config.dark_count_rates_hz = [4000.0, 4000.0];
        let inst = GameInstance::worst_case(4).unwrap();
        assert_eq!(expected_epsilon(&inst, &config).unwrap(), 0.5);
        let record = simulate_counts(&inst, &config, 200_000, 3).unwrap();
        assert!(record.correct + record.wrong <= record.trials);
        assert!(record.dark > 0);
        assert!((record.epsilon - 0.5).abs() < 3.0 * record.epsilon_stderr);
    }

    #[test]
    fn no_open_channel_yields_uninformative_estimate() {
        let mut config = clean_config(2, 0.9);
        config.system_loss_override_db = Some(f64::INFINITY);
        let inst = GameInstance::worst_case(2).unwrap();
        assert!(expected_epsilon(&inst, &config).is_err());
        let record = simulate_counts(&inst, &config, 100, 3).unwrap();
        assert_eq!(record.correct + record.wrong, 0);
        assert_eq!(record.epsilon, 0.5);
        assert_eq!(record.epsilon_stderr, 0.5);
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let inst = GameInstance::worst_case(5).unwrap();
        let config = clean_config(5, 0.8);
        let a = simulate_counts(&inst, &config, 10_000, 9).unwrap();
        let b = simulate_counts(&inst, &config, 10_000, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate_counts(&inst, &config, 10_000, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_trials_is_rejected() {
        let inst = GameInstance::worst_case(4).unwrap();
        assert!(matches!(
            simulate_counts(&inst, &clean_config(4, 0.9), 0, 1),
            Err(Error::ZeroTrials)
        ));
    }

    #[test]
    fn estimator_reference_points() {
        let (eps, se) = estimate_error_probability(936, 64).unwrap();
        assert!((eps - 0.064).abs() < 1e-15);
        assert!((se - 0.0077397674383666085).abs() < 1e-15);
        assert_eq!(estimate_error_probability(100, 0).unwrap(), (0.0, 0.0));
        let (eps, se) = estimate_error_probability(50, 50).unwrap();
        assert_eq!(eps, 0.5);
        assert!((se - 0.05).abs() < 1e-15);
        assert!(estimate_error_probability(0, 0).is_err());
    }

    #[test]
    fn g2_reference_points() {
        assert_eq!(g2_estimate(1.0e6, 1.0e3, 1.0e3, 0.0).unwrap(), 0.0);
        let g2 = g2_estimate(1.0e6, 1.0e3, 1.0e3, 2.0e-2).unwrap();
        assert!((g2 - 0.01).abs() < 1e-15);
        assert!(g2_estimate(1.0e6, 0.0, 0.0, 1.0).is_err());
        assert!(g2_estimate(-1.0, 1.0, 1.0, 0.0).is_err());
    }
}
