//! Command-line harness for the switchsim library.
//!
//! Exit status: 0 when every declared check passes, 1 when a check fails,
//! 2 on usage, configuration, or dataset errors.

use std::collections::BTreeMap;
use std::error::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use switchsim::complexity::{reproduce_table, RowComparison, WORST_CASE_EPSILON};
use switchsim::dataset::{reference_config_from, Dataset, DatasetSource};
use switchsim::game::GameInstance;
use switchsim::photonics::{
    expected_epsilon, simulate_counts, FiberSegmentTable, PhotonicConfig,
    DELAY_DEVIATION_BOUND_PS,
};
use switchsim::qudit::{anticommutator_norm, commutator_norm};
use switchsim::switch::decide_ee;

/// Seed used when `--seed` is not given, so bare runs are reproducible.
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "switchsim", version, about = "Simulator and analysis harness for the exchange-evaluation game on a time-bin quantum switch", long_about = None)]
struct Cli {
    /// Base seed for randomized work (fixed default for reproducibility).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write the result CSV here and a `<OUT>.manifest.json` beside it;
    /// without it, results go to stdout only.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Photonic configuration JSON for `simulate`; defaults to the
    /// bundled reference configuration at the requested n.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the commutation dichotomy against the switch decision over a
    /// set of game instances.
    Oracle {
        /// Input size in bits.
        #[arg(long)]
        n: u32,
        /// Instance set: every instance, or seeded random draws.
        #[arg(long, value_enum)]
        mode: OracleMode,
        /// Number of instances in random mode.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Run the Monte Carlo detection model for one game instance and emit
    /// a count record.
    Simulate {
        /// Input size in bits.
        #[arg(long)]
        n: u32,
        /// One of: worst | random:<seed> | file:<path> | bitflip:<k>.
        #[arg(long)]
        instance: String,
        /// Number of heralded photons to simulate.
        #[arg(long)]
        trials: u64,
    },
    /// Recompute a reference table and compare against the published
    /// values bundled with the crate.
    Reproduce {
        /// s2: loss/Q/gamma comparison table; fig4: per-n bound points.
        #[arg(long, value_enum)]
        target: ReproduceTarget,
    },
    /// Sweep all delay configurations of one party's fiber chain and
    /// check the deviation bound.
    Delays {
        #[arg(long, value_enum)]
        party: PartyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReproduceTarget {
    S2,
    Fig4,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartyArg {
    Alice,
    Bob,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    seed: u64,
    config: Option<PhotonicConfig>,
    dataset_source: String,
    /// SHA-256 of every dataset text the command consumed.
    dataset_versions: BTreeMap<String, String>,
    outputs: Vec<String>,
    timestamp_utc: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

type CliResult<T> = Result<T, Box<dyn Error>>;

fn run(cli: Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Oracle { n, mode, samples } => cmd_oracle(&cli, *n, *mode, *samples),
        Command::Simulate {
            n,
            instance,
            trials,
        } => cmd_simulate(&cli, *n, instance, *trials),
        Command::Reproduce { target } => cmd_reproduce(&cli, *target),
        Command::Delays { party } => cmd_delays(&cli, *party),
    }
}

#[derive(Serialize)]
struct OracleFailureRow {
    n: u32,
    x: u64,
    y: u64,
    f_table: String,
    g_table: String,
    ee: u8,
    decision: u8,
    commutator_norm: f64,
    anticommutator_norm: f64,
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn oracle_failure_row(inst: &GameInstance) -> CliResult<Option<OracleFailureRow>> {
    let comm = commutator_norm(&inst.alice_spec(), &inst.bob_spec())?;
    let anti = anticommutator_norm(&inst.alice_spec(), &inst.bob_spec())?;
    let decision = decide_ee(inst);
    let dichotomy = (comm < switchsim::ZERO_TOL) ^ (anti < switchsim::ZERO_TOL);
    if dichotomy && decision == inst.ee_value() {
        return Ok(None);
    }
    Ok(Some(OracleFailureRow {
        n: inst.n(),
        x: inst.x(),
        y: inst.y(),
        f_table: bits_string(&inst.f().bits()),
        g_table: bits_string(&inst.g().bits()),
        ee: inst.ee_value(),
        decision,
        commutator_norm: comm,
        anticommutator_norm: anti,
    }))
}

fn cmd_oracle(cli: &Cli, n: u32, mode: OracleMode, samples: u64) -> CliResult<bool> {
    let mut failures = Vec::new();
    let mut total = 0u64;
    let mode_name;
    match mode {
        OracleMode::Exhaustive => {
            mode_name = "exhaustive";
            if n > 3 {
                return Err(format!(
                    "exhaustive mode enumerates 2^(2^(n+1)+2(n-1)) instances and is \
                     limited to n <= 3; got n = {n} (use --mode random)"
                )
                .into());
            }
            let fns = switchsim::game::AugmentedBooleanFunction::enumerate(n)?;
            for x in 0..1u64 << n {
                for y in 0..1u64 << n {
                    for f in &fns {
                        for g in &fns {
                            let inst = GameInstance::new(x, f.clone(), y, g.clone())?;
                            if let Some(row) = oracle_failure_row(&inst)? {
                                failures.push(row);
                            }
                            total += 1;
                        }
                    }
                }
            }
        }
        OracleMode::Random => {
            mode_name = "random";
            for i in 0..samples {
                let inst = GameInstance::random(n, cli.seed.wrapping_add(i))?;
                if let Some(row) = oracle_failure_row(&inst)? {
                    failures.push(row);
                }
                total += 1;
            }
        }
    }

    let pass = failures.is_empty();
    println!(
        "oracle: {}/{} instances pass (n = {n}, mode = {mode_name})",
        total - failures.len() as u64,
        total
    );
    for row in failures.iter().take(20) {
        println!(
            "  FAIL x = {}, y = {}, f = {}, g = {}: ee = {}, decision = {}, \
             |comm| = {:.3e}, |anti| = {:.3e}",
            row.x,
            row.y,
            row.f_table,
            row.g_table,
            row.ee,
            row.decision,
            row.commutator_norm,
            row.anticommutator_norm
        );
    }
    if failures.len() > 20 {
        println!("  ... and {} more", failures.len() - 20);
    }

    if let Some(out) = &cli.out {
        let body = csv_string(&failures)?;
        emit(cli, out, &body, "oracle", None, &Manifest::none())?;
    }
    Ok(pass)
}

fn parse_instance(n: u32, spec: &str) -> CliResult<GameInstance> {
    if spec == "worst" {
        return Ok(GameInstance::worst_case(n)?);
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let seed: u64 = rest
            .parse()
            .map_err(|_| format!("instance spec random:<seed> needs an integer, got {rest:?}"))?;
        return Ok(GameInstance::random(n, seed)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read instance file {path}: {e}"))?;
        let inst = GameInstance::from_json(&text)?;
        if inst.n() != n {
            return Err(format!(
                "instance file has n = {}, but --n {} was requested",
                inst.n(),
                n
            )
            .into());
        }
        return Ok(inst);
    }
    if let Some(rest) = spec.strip_prefix("bitflip:") {
        let k: u32 = rest
            .parse()
            .map_err(|_| format!("instance spec bitflip:<k> needs an integer, got {rest:?}"))?;
        if k >= n {
            return Err(format!("bitflip segment index {k} is out of range for n = {n}").into());
        }
        let worst = GameInstance::worst_case(n)?;
        return Ok(GameInstance::new(
            worst.x() ^ (1 << k),
            worst.f().clone(),
            worst.y(),
            worst.g().clone(),
        )?);
    }
    Err(format!(
        "unknown instance spec {spec:?}; expected worst, random:<seed>, file:<path>, or bitflip:<k>"
    )
    .into())
}

fn cmd_simulate(cli: &Cli, n: u32, instance: &str, trials: u64) -> CliResult<bool> {
    let dataset = Dataset::load()?;
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            let config: PhotonicConfig = serde_json::from_str(&text)?;
            config.validate()?;
            if config.n != n {
                return Err(format!(
                    "config has n = {}, but --n {} was requested",
                    config.n, n
                )
                .into());
            }
            config
        }
        None => reference_config_from(&dataset, n)?,
    };
    let inst = parse_instance(n, instance)?;
    let record = simulate_counts(&inst, &config, trials, cli.seed)?;

    println!(
        "simulate: n = {n}, x = {}, y = {}, trials = {trials}, seed = {}",
        inst.x(),
        inst.y(),
        cli.seed
    );
    println!(
        "  coincidences: {} correct, {} wrong, {} dark firings",
        record.correct, record.wrong, record.dark
    );
    match expected_epsilon(&inst, &config) {
        Ok(analytic) => println!(
            "  epsilon = {:.6} +/- {:.6} (closed form {analytic:.6})",
            record.epsilon, record.epsilon_stderr
        ),
        Err(_) => println!(
            "  epsilon = {:.6} +/- {:.6} (no coincidence channel open)",
            record.epsilon, record.epsilon_stderr
        ),
    }

    if let Some(out) = &cli.out {
        let body = csv_string(&[record])?;
        emit(
            cli,
            out,
            &body,
            "simulate",
            Some(config),
            &Manifest::for_dataset(&dataset),
        )?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct S2Row {
    n: u32,
    system_loss_db: f64,
    q_published: f64,
    q_computed: f64,
    q_rel_diff: f64,
    c_classical: f64,
    c_quantum_definite: f64,
    gamma_classical_published: f64,
    gamma_classical_computed: f64,
    gamma_classical_abs_diff: f64,
    gamma_quantum_published: f64,
    gamma_quantum_computed: f64,
    gamma_quantum_abs_diff: f64,
    pass: bool,
}

impl From<&RowComparison> for S2Row {
    fn from(comp: &RowComparison) -> Self {
        Self {
            n: comp.published.n,
            system_loss_db: comp.published.system_loss_db,
            q_published: comp.published.q,
            q_computed: comp.computed.q,
            q_rel_diff: comp.q_rel_diff,
            c_classical: comp.computed.c_classical,
            c_quantum_definite: comp.computed.c_quantum_definite,
            gamma_classical_published: comp.published.gamma_classical,
            gamma_classical_computed: comp.gamma_classical_from_published_q,
            gamma_classical_abs_diff: comp.gamma_classical_abs_diff,
            gamma_quantum_published: comp.published.gamma_quantum,
            gamma_quantum_computed: comp.gamma_quantum_from_published_q,
            gamma_quantum_abs_diff: comp.gamma_quantum_abs_diff,
            pass: comp.passes(),
        }
    }
}

#[derive(Serialize)]
struct Fig4Row {
    n: u32,
    q: f64,
    c_classical: f64,
    c_quantum_definite: f64,
    gamma_classical: f64,
    gamma_quantum: f64,
    beats_quantum_definite: bool,
}

fn cmd_reproduce(cli: &Cli, target: ReproduceTarget) -> CliResult<bool> {
    let dataset = Dataset::load()?;
    let rows = dataset.reference_rows()?;
    let comps = reproduce_table(&rows, WORST_CASE_EPSILON)?;
    let mut all_pass = true;

    let body = match target {
        ReproduceTarget::S2 => {
            let mut out_rows = Vec::new();
            for comp in &comps {
                let row = S2Row::from(comp);
                println!(
                    "n = {:2}: Q {:8.3} vs {:8.3} published (rel diff {:.4}), \
                     gamma_c {:.4} vs {:.4}, gamma_q {:.4} vs {:.4}: {}",
                    row.n,
                    row.q_computed,
                    row.q_published,
                    row.q_rel_diff,
                    row.gamma_classical_computed,
                    row.gamma_classical_published,
                    row.gamma_quantum_computed,
                    row.gamma_quantum_published,
                    if row.pass { "PASS" } else { "FAIL" }
                );
                all_pass &= row.pass;
                out_rows.push(row);
            }
            println!(
                "reproduce s2: {}/{} rows within tolerance",
                out_rows.iter().filter(|r| r.pass).count(),
                out_rows.len()
            );
            csv_string(&out_rows)?
        }
        ReproduceTarget::Fig4 => {
            let mut out_rows = Vec::new();
            for comp in &comps {
                let row = Fig4Row {
                    n: comp.published.n,
                    q: comp.computed.q,
                    c_classical: comp.computed.c_classical,
                    c_quantum_definite: comp.computed.c_quantum_definite,
                    gamma_classical: comp.computed.gamma_classical,
                    gamma_quantum: comp.computed.gamma_quantum,
                    beats_quantum_definite: comp.computed.q < comp.computed.c_quantum_definite,
                };
                let expected_advantage = row.n == 12;
                println!(
                    "n = {:2}: Q {:8.3}, classical bound {:8.3}, quantum-definite bound {:8.3}, \
                     gamma_q {:.4}{}",
                    row.n,
                    row.q,
                    row.c_classical,
                    row.c_quantum_definite,
                    row.gamma_quantum,
                    if row.beats_quantum_definite {
                        " (advantage)"
                    } else {
                        ""
                    }
                );
                all_pass &= row.beats_quantum_definite == expected_advantage;
                out_rows.push(row);
            }
            println!(
                "reproduce fig4: advantage appears exactly at n = 12: {}",
                if all_pass { "PASS" } else { "FAIL" }
            );
            csv_string(&out_rows)?
        }
    };

    if let Some(out) = &cli.out {
        let name = match target {
            ReproduceTarget::S2 => "reproduce-s2",
            ReproduceTarget::Fig4 => "reproduce-fig4",
        };
        emit(cli, out, &body, name, None, &Manifest::for_dataset(&dataset))?;
    }
    Ok(all_pass)
}

#[derive(Serialize)]
struct DelayRow {
    x: u64,
    delay_ns: f64,
    target_ns: f64,
    deviation_ps: f64,
}

fn cmd_delays(cli: &Cli, party: PartyArg) -> CliResult<bool> {
    let dataset = Dataset::load()?;
    let tables = dataset.fiber_tables()?;
    let table: &FiberSegmentTable = match party {
        PartyArg::Alice => &tables.alice,
        PartyArg::Bob => &tables.bob,
    };
    let configurations = 1u64 << table.segments().len();
    let mut rows = Vec::with_capacity(configurations as usize);
    for x in 0..configurations {
        rows.push(DelayRow {
            x,
            delay_ns: table.delay_ns(x)?,
            target_ns: 2.0 * x as f64,
            deviation_ps: table.deviation_ps(x)?,
        });
    }
    let (worst_x, max_dev) = table.max_deviation_ps()?;
    let pass = max_dev < DELAY_DEVIATION_BOUND_PS;
    println!(
        "delays: {} max |deviation| = {max_dev:.1} ps at x = {worst_x} over {configurations} \
         configurations (bound {DELAY_DEVIATION_BOUND_PS} ps): {}",
        table.party(),
        if pass { "PASS" } else { "FAIL" }
    );

    if let Some(out) = &cli.out {
        let body = csv_string(&rows)?;
        emit(cli, out, &body, "delays", None, &Manifest::for_dataset(&dataset))?;
    }
    Ok(pass)
}

struct Manifest {
    dataset_source: String,
    dataset_versions: BTreeMap<String, String>,
}

impl Manifest {
    fn none() -> Self {
        Self {
            dataset_source: "none".into(),
            dataset_versions: BTreeMap::new(),
        }
    }

    fn for_dataset(dataset: &Dataset) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert(
            switchsim::dataset::FIBER_SEGMENTS_FILE.to_string(),
            sha256_hex(dataset.fiber_csv()),
        );
        versions.insert(
            switchsim::dataset::REFERENCE_RESULTS_FILE.to_string(),
            sha256_hex(dataset.reference_csv()),
        );
        let source = match dataset.source() {
            DatasetSource::Embedded => "embedded".to_string(),
            DatasetSource::Directory(dir) => dir.display().to_string(),
        };
        Self {
            dataset_source: source,
            dataset_versions: versions,
        }
    }
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn csv_string<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

/// Writes the CSV body to `out` and a manifest to `<out>.manifest.json`.
fn emit(
    cli: &Cli,
    out: &Path,
    csv_body: &str,
    command: &str,
    config: Option<PhotonicConfig>,
    manifest: &Manifest,
) -> CliResult<()> {
    std::fs::write(out, csv_body)?;
    let mut dataset_versions = manifest.dataset_versions.clone();
    if let Some(config) = &config {
        dataset_versions.insert(
            "resolved_config".to_string(),
            sha256_hex(&serde_json::to_string(config)?),
        );
    }
    let record = RunManifest {
        command: command.to_string(),
        argv: std::env::args().collect(),
        seed: cli.seed,
        config,
        dataset_source: manifest.dataset_source.clone(),
        dataset_versions,
        outputs: vec![out.display().to_string()],
        timestamp_utc: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    };
    let manifest_path = PathBuf::from(format!("{}.manifest.json", out.display()));
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&record)?)?;
    println!(
        "wrote {} and {}",
        out.display(),
        manifest_path.display()
    );
    Ok(())
}
