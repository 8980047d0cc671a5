//! Bundled measurement tables and reference results, with an environment
//! override for externally supplied copies.
//!
//! The crate embeds three files: the per-segment fiber measurements for
//! both parties, the per-`n` reference results (losses, error rates,
//! transmitted information, and advantage ratios), and a default photonic
//! configuration. Setting the `SWITCHSIM_DATA` environment variable to a
//! directory containing `fiber_segments.csv` and `reference_results.csv`
//! substitutes those copies everywhere the bundled data would be used.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::complexity::ReferenceRow;
use crate::error::{Error, Result};
use crate::photonics::{
    FiberSegment, FiberSegmentTable, Party, PhotonicConfig, SegmentTables,
};

/// Environment variable naming a directory with replacement datasets.
pub const DATA_DIR_ENV: &str = "SWITCHSIM_DATA";

/// File name of the fiber segment table within a dataset directory.
pub const FIBER_SEGMENTS_FILE: &str = "fiber_segments.csv";

/// File name of the reference results within a dataset directory.
pub const REFERENCE_RESULTS_FILE: &str = "reference_results.csv";

/// The bundled fiber segment measurements.
pub const EMBEDDED_FIBER_SEGMENTS: &str = include_str!("../data/fiber_segments.csv");

/// The bundled reference results.
pub const EMBEDDED_REFERENCE_RESULTS: &str = include_str!("../data/reference_results.csv");

/// The bundled default photonic configuration.
pub const EMBEDDED_CONFIG_JSON: &str = include_str!("../data/photonic_config.json");

/// Where a dataset's bytes came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSource {
    Embedded,
    Directory(PathBuf),
}

/// Raw dataset text plus where it was loaded from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    fiber_csv: String,
    reference_csv: String,
    source: DatasetSource,
}

#[derive(Debug, Deserialize)]
struct FiberCsvRow {
    party: Party,
    segment: u32,
    option: String,
    length_ns: f64,
    length_err_ns: f64,
    loss_db: f64,
    loss_err_db: f64,
}

impl Dataset {
    /// The datasets compiled into the crate.
    pub fn embedded() -> Self {
        Self {
            fiber_csv: EMBEDDED_FIBER_SEGMENTS.to_string(),
            reference_csv: EMBEDDED_REFERENCE_RESULTS.to_string(),
            source: DatasetSource::Embedded,
        }
    }

    /// Reads both dataset files from a directory.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<String> {
            std::fs::read_to_string(dir.join(name)).map_err(|e| {
                Error::Dataset(format!("cannot read {}: {e}", dir.join(name).display()))
            })
        };
        Ok(Self {
            fiber_csv: read(FIBER_SEGMENTS_FILE)?,
            reference_csv: read(REFERENCE_RESULTS_FILE)?,
            source: DatasetSource::Directory(dir.to_path_buf()),
        })
    }

    /// Loads the dataset named by `SWITCHSIM_DATA`, or the embedded one
    /// when the variable is unset or empty.
    pub fn load() -> Result<Self> {
        Self::resolve(std::env::var_os(DATA_DIR_ENV))
    }

    fn resolve(env_value: Option<OsString>) -> Result<Self> {
        match env_value {
            Some(dir) if !dir.is_empty() => Self::from_dir(Path::new(&dir)),
            _ => Ok(Self::embedded()),
        }
    }

    pub fn source(&self) -> &DatasetSource {
        &self.source
    }

    pub fn fiber_csv(&self) -> &str {
        &self.fiber_csv
    }

    pub fn reference_csv(&self) -> &str {
        &self.reference_csv
    }

    /// Parses and validates the fiber segment tables for both parties.
    pub fn fiber_tables(&self) -> Result<SegmentTables> {
        let mut reader = csv::Reader::from_reader(self.fiber_csv.as_bytes());
        let mut partial: BTreeMap<(u8, u32), (Option<FiberCsvRow>, Option<FiberCsvRow>)> =
            BTreeMap::new();
        for row in reader.deserialize() {
            let row: FiberCsvRow = row?;
            let key = (row.party as u8, row.segment);
            let entry = partial.entry(key).or_default();
            let slot = match row.option.as_str() {
                "long" => &mut entry.0,
                "short" => &mut entry.1,
                other => {
                    return Err(Error::Dataset(format!(
                        "unknown arm option {other:?} in segment table"
                    )))
                }
            };
            if let Some(duplicate) = slot.replace(row) {
                return Err(Error::Dataset(format!(
                    "duplicate {} arm for {} segment {}",
                    duplicate.option, duplicate.party, duplicate.segment
                )));
            }
        }
        let mut tables = Vec::new();
        for party in [Party::Alice, Party::Bob] {
            let mut segments = Vec::new();
            for k in 1u32.. {
                match partial.remove(&(party as u8, k)) {
                    Some((Some(long), Some(short))) => segments.push(FiberSegment {
                        long_length_ns: long.length_ns,
                        long_length_err_ns: long.length_err_ns,
                        long_loss_db: long.loss_db,
                        long_loss_err_db: long.loss_err_db,
                        short_length_ns: short.length_ns,
                        short_length_err_ns: short.length_err_ns,
                        short_loss_db: short.loss_db,
                        short_loss_err_db: short.loss_err_db,
                    }),
                    Some(_) => {
                        return Err(Error::Dataset(format!(
                            "{party} segment {k} is missing one arm"
                        )))
                    }
                    None => break,
                }
            }
            tables.push(FiberSegmentTable::new(party, segments)?);
        }
        if !partial.is_empty() {
            return Err(Error::Dataset(
                "segment table has gaps in its segment numbering".into(),
            ));
        }
        let bob = tables.pop().expect("two tables");
        let alice = tables.pop().expect("two tables");
        Ok(SegmentTables { alice, bob })
    }

    /// Parses the reference results rows.
    pub fn reference_rows(&self) -> Result<Vec<ReferenceRow>> {
        let mut reader = csv::Reader::from_reader(self.reference_csv.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<ReferenceRow>, _>>()?;
        if rows.is_empty() {
            return Err(Error::Dataset("reference results are empty".into()));
        }
        Ok(rows)
    }
}

/// The default photonic configuration at input size `n`: measured segment
/// tables, 11.62 dB base loss, 9.3 and 8.3 Hz dark rates, and visibility
/// 0.9. Detector efficiencies stay at 1.0 because detection loss is
/// already inside the base loss budget.
pub fn reference_config(n: u32) -> Result<PhotonicConfig> {
    reference_config_from(&Dataset::embedded(), n)
}

/// Same defaults as [`reference_config`], but drawing the segment tables
/// from the given dataset.
pub fn reference_config_from(dataset: &Dataset, n: u32) -> Result<PhotonicConfig> {
    let config = PhotonicConfig {
        n,
        time_bin_ns: 2.0,
        system_base_loss_db: 11.62,
        system_loss_override_db: None,
        dark_count_rates_hz: [9.3, 8.3],
        detector_efficiencies: [1.0, 1.0],
        visibility: 0.9,
        pair_rate_hz: 1.0e5,
        segment_tables: dataset.fiber_tables()?,
    };
    config.validate()?;
    Ok(config)
}
