//! Run orchestration, persistence and verification.
//!
//! A run directory holds:
//!
//! ```text
//! manifest.json              config echo, outputs, termination state
//! diagnostics.csv            one row per diagnostic step
//! records/rec_<step>.json    full DiagnosticsRecord per row
//! checkpoints/ckpt_<step>.bin    binary field state
//! checkpoints/ckpt_<step>.json   time integration state needed to resume
//! ```

pub mod oracle;
pub mod verify;

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{lambda, LpPartition};
use crate::monitor::{
    gronwall_check, DiagnosticsRecord, EmbeddingConstants, Monitor, MonitorSettings,
};
use crate::paraproduct::sample_bernstein;
use crate::solver::config::RunConfig;
use crate::solver::initial::make_initial;
use crate::solver::{Parameters, Solver, SolverState, StepError};
use crate::spectral::codec::{read_checkpoint, write_checkpoint, VERSION as CODEC_VERSION};
use crate::spectral::{DealiasRule, Grid};

/// Samples behind the measured Bernstein constant of a run.
pub const BERNSTEIN_SAMPLES: usize = 200;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_DT_GATE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Termination {
    Completed { t: f64 },
    BlowUpDetected { t: f64 },
    DtGateFailed { t: f64, dt: f64, limit: f64 },
}

impl Termination {
    pub fn exit_code(&self) -> i32 {
        match self {
            Termination::Completed { .. } => EXIT_OK,
            Termination::BlowUpDetected { .. } => EXIT_BLOW_UP,
            Termination::DtGateFailed { .. } => EXIT_DT_GATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub diagnostics_csv: PathBuf,
    pub records: Vec<PathBuf>,
    pub checkpoints: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub crate_version: String,
    pub codec_version: u32,
    pub csv_columns: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    pub seconds: f64,
    pub steps: u64,
    pub records: usize,
    pub seconds_in_diagnostics: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub resumed_from: Option<PathBuf>,
    pub outputs: Outputs,
    pub versions: Versions,
    pub wall_clock: WallClock,
    pub termination: Termination,
    pub bernstein_constant: f64,
    pub embedding: EmbeddingConstants,
    /// fitted Gronwall constant over every record in the run directory
    pub gronwall_c: Option<f64>,
    /// records carrying at least one failed check
    pub records_with_violations: usize,
}

/// Time-integration state stored next to each checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSidecar {
    pub t: f64,
    pub step_count: u64,
    pub dissipated: f64,
    pub int_f: f64,
    /// `(t, f)` of the last diagnostic record before the checkpoint
    pub last_record: Option<(f64, f64)>,
}

pub fn sidecar_path(ckpt: &Path) -> PathBuf {
    ckpt.with_extension("json")
}

pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

pub fn csv_path(dir: &Path) -> PathBuf {
    dir.join("diagnostics.csv")
}

fn records_dir(dir: &Path) -> PathBuf {
    dir.join("records")
}

fn checkpoints_dir(dir: &Path) -> PathBuf {
    dir.join("checkpoints")
}

/// Total step count needed to reach `t_end` from zero.
fn target_steps(cfg: &RunConfig) -> u64 {
    (cfg.t_end / cfg.dt - 1e-9).ceil().max(0.0) as u64
}

pub fn monitor_settings(cfg: &RunConfig, c_b: f64) -> MonitorSettings {
    MonitorSettings {
        c0: cfg.c0,
        // ideal runs have no dissipation scale; any positive block is above it
        m: if cfg.m() > 0.0 {
            cfg.m()
        } else {
            f64::MIN_POSITIVE
        },
        s: cfg.s,
        beta: cfg.beta,
        c_b,
        fluxes: cfg.fluxes,
    }
}

pub fn partition_for(cfg: &RunConfig) -> Result<LpPartition> {
    let grid = Grid::with_rule(cfg.n, cfg.dealias).map_err(|e| Error::Config(format!("n: {e}")))?;
    LpPartition::from_kind(&grid, cfg.partition.into())
}

/// Bernstein constant of the run: configured, or measured on seeded samples.
pub fn bernstein_constant(cfg: &RunConfig, lp: &LpPartition) -> Result<f64> {
    match cfg.bernstein_constant {
        Some(c) => Ok(c),
        None => Ok(sample_bernstein(lp, BERNSTEIN_SAMPLES, cfg.seed)?.max_ratio),
    }
}

struct CsvSink {
    writer: csv::Writer<fs::File>,
}

impl CsvSink {
    /// Opens for appending; rows later than `keep_until` (a resume point)
    /// are dropped first.
    fn open(path: &Path, keep_until: Option<f64>) -> Result<Self> {
        if let (Some(t_keep), true) = (keep_until, path.exists()) {
            let mut rdr = csv::Reader::from_path(path)?;
            let rows: Vec<csv::StringRecord> = rdr
                .records()
                .filter_map(|r| r.ok())
                .filter(|r| {
                    r.get(0)
                        .and_then(|v| v.parse::<f64>().ok())
                        .is_some_and(|t| t <= t_keep + 1e-12 * t_keep.abs().max(1.0))
                })
                .collect();
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(DiagnosticsRecord::CSV_HEADER)?;
            for r in &rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        if fresh {
            writer.write_record(DiagnosticsRecord::CSV_HEADER)?;
            writer.flush()?;
        }
        Ok(CsvSink { writer })
    }

    fn push(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        self.writer
            .write_record(rec.csv_row().iter().map(|v| format!("{v:e}")))?;
        self.writer.flush()?;
        Ok(())
    }
}

/// Reads every per-record JSON sidecar of a run directory, ordered by step.
pub fn load_records(dir: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let rd = records_dir(dir);
    if !rd.exists() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(&rd)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| Ok(serde_json::from_str(&fs::read_to_string(p)?)?))
        .collect()
}

pub fn load_manifest(dir: &Path) -> Result<RunManifest> {
    Ok(serde_json::from_str(&fs::read_to_string(manifest_path(
        dir,
    ))?)?)
}

struct Run<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    monitor: Monitor,
    csv: CsvSink,
    outputs: Outputs,
    violations: usize,
    diag_seconds: f64,
    last_record: Option<(f64, f64)>,
}

impl Run<'_> {
    fn record(&mut self, state: &SolverState) -> Result<()> {
        let clock = Instant::now();
        let rec = self
            .monitor
            .record(state.step_count, state.t, &state.u, &state.b)?;
        self.csv.push(&rec)?;
        let path = records_dir(&self.dir).join(format!("rec_{:08}.json", state.step_count));
        fs::write(&path, serde_json::to_string_pretty(&rec)?)?;
        self.outputs.records.push(path);
        if !rec.violations.is_empty() {
            self.violations += 1;
        }
        self.last_record = Some((rec.t, rec.f));
        self.diag_seconds += clock.elapsed().as_secs_f64();
        Ok(())
    }

    fn checkpoint(&mut self, state: &SolverState) -> Result<()> {
        let path = checkpoints_dir(&self.dir).join(format!("ckpt_{:08}.bin", state.step_count));
        write_checkpoint(&path, state.t, self.cfg.nu, self.cfg.mu, &state.u, &state.b)?;
        let side = CheckpointSidecar {
            t: state.t,
            step_count: state.step_count,
            dissipated: state.dissipated,
            int_f: self.monitor.int_f(),
            last_record: self.last_record,
        };
        fs::write(sidecar_path(&path), serde_json::to_string_pretty(&side)?)?;
        if !self.outputs.checkpoints.contains(&path) {
            self.outputs.checkpoints.push(path);
        }
        Ok(())
    }
}

/// Loads the resume state; every failure here is a configuration error.
fn resume_state(
    cfg: &RunConfig,
    grid: &Grid,
    ckpt: &Path,
) -> Result<(SolverState, CheckpointSidecar)> {
    let ck = read_checkpoint(ckpt, cfg.dealias)?;
    if ck.u.grid() != grid {
        return Err(Error::Config(format!(
            "resume: checkpoint holds n={} but the config has n={}",
            ck.u.grid().n(),
            grid.n()
        )));
    }
    let side_path = sidecar_path(ckpt);
    let side: CheckpointSidecar =
        serde_json::from_str(&fs::read_to_string(&side_path).map_err(|e| {
            Error::Config(format!("resume: cannot read {}: {e}", side_path.display()))
        })?)
        .map_err(|e| Error::Config(format!("resume: {}: {e}", side_path.display())))?;
    let mut state = SolverState::new(ck.t, ck.u, ck.b);
    state.step_count = side.step_count;
    state.dissipated = side.dissipated;
    Ok((state, side))
}

/// Executes a run and writes its manifest. Termination events (blow-up, dt
/// gate) are reported in the manifest, not as errors; errors are setup or
/// I/O failures.
pub fn run(cfg: &RunConfig, resume: Option<&Path>) -> Result<RunManifest> {
    cfg.validate()?;
    let clock = Instant::now();
    let lp = partition_for(cfg)?;
    let grid = lp.grid().clone();

    let (mut state, side) = match resume {
        Some(ckpt) => {
            let (s, side) = resume_state(cfg, &grid, ckpt)?;
            (s, Some(side))
        }
        None => {
            let init = make_initial(&cfg.init, &grid, cfg.dealias, cfg.seed)?;
            (SolverState::new(init.t, init.u, init.b), None)
        }
    };

    let dir = cfg.output_dir.clone();
    for d in [dir.clone(), records_dir(&dir), checkpoints_dir(&dir)] {
        fs::create_dir_all(&d)?;
    }
    if resume.is_none() {
        // a fresh run owns its directory's series
        for old in load_record_paths(&dir)? {
            fs::remove_file(old)?;
        }
        if csv_path(&dir).exists() {
            fs::remove_file(csv_path(&dir))?;
        }
    }

    let c_b = bernstein_constant(cfg, &lp)?;
    let mut monitor = Monitor::new(lp, monitor_settings(cfg, c_b))?;
    if let Some(side) = &side {
        if let Some((t, f)) = side.last_record {
            monitor.resume_from(t, f, side.int_f);
        }
        drop_records_after(&dir, side.step_count)?;
    }
    let embedding = *monitor.embedding();
    let solver = Solver::new(&grid, Parameters::from_config(cfg))?;
    let mut run = Run {
        cfg,
        dir: dir.clone(),
        monitor,
        csv: CsvSink::open(&csv_path(&dir), side.map(|s| s.t))?,
        outputs: Outputs {
            diagnostics_csv: csv_path(&dir),
            records: Vec::new(),
            checkpoints: Vec::new(),
        },
        violations: 0,
        diag_seconds: 0.0,
        last_record: side.and_then(|s| s.last_record),
    };

    let target = target_steps(cfg);
    let diag_every = cfg.diag_every as u64;
    let start_step = state.step_count;
    if side.is_none() {
        run.record(&state)?;
    }
    let termination = loop {
        if state.step_count >= target {
            break Termination::Completed { t: state.t };
        }
        match solver.step(&state) {
            Ok(next) => state = next,
            Err(StepError::BlowUp { t }) => break Termination::BlowUpDetected { t },
            Err(StepError::DtGate { t, dt, limit }) => {
                break Termination::DtGateFailed { t, dt, limit }
            }
            Err(StepError::Other(e)) => return Err(e),
        }
        let at_end = state.step_count >= target;
        if state.step_count % diag_every == 0 || at_end {
            run.record(&state)?;
        }
        if cfg.checkpoint_every > 0
            && state.step_count % cfg.checkpoint_every as u64 == 0
            && !at_end
        {
            run.checkpoint(&state)?;
        }
    };
    // final (or last good) state is always saved
    run.checkpoint(&state)?;

    let all_records = load_records(&dir)?;
    let gronwall_c = gronwall_check(&all_records).ok();
    let manifest = RunManifest {
        config: cfg.clone(),
        resumed_from: resume.map(Path::to_path_buf),
        outputs: run.outputs,
        versions: Versions {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            codec_version: CODEC_VERSION,
            csv_columns: DiagnosticsRecord::CSV_HEADER
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
        wall_clock: WallClock {
            seconds: clock.elapsed().as_secs_f64(),
            steps: state.step_count - start_step,
            records: all_records.len(),
            seconds_in_diagnostics: run.diag_seconds,
        },
        termination,
        bernstein_constant: c_b,
        embedding,
        gronwall_c,
        records_with_violations: run.violations,
    };
    fs::write(
        manifest_path(&dir),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

fn load_record_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = records_dir(dir);
    if !rd.exists() {
        return Ok(Vec::new());
    }
    Ok(fs::read_dir(&rd)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect())
}

fn drop_records_after(dir: &Path, step: u64) -> Result<()> {
    for p in load_record_paths(dir)? {
        let later = p
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.strip_prefix("rec_"))
            .and_then(|s| s.parse::<u64>().ok())
            .is_some_and(|s| s > step);
        if later {
            fs::remove_file(p)?;
        }
    }
    Ok(())
}

/// Maps a setup error to the CLI exit code.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Invariant(_) => EXIT_VERIFY_FAILED,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpectrum {
    pub q: i32,
    pub lambda: f64,
    pub energy_u: f64,
    pub energy_b: f64,
}

/// Per-shell `||u_q||_2^2` and `||b_q||_2^2` of a checkpoint.
pub fn spectra(ckpt: &Path) -> Result<Vec<ShellSpectrum>> {
    let ck = read_checkpoint(ckpt, DealiasRule::default())?;
    let lp = LpPartition::build(ck.u.grid(), Default::default())?;
    Ok(lp
        .shells()
        .map(|q| {
            let (uq, bq) = (lp.shell_or_zero(&ck.u, q), lp.shell_or_zero(&ck.b, q));
            ShellSpectrum {
                q,
                lambda: lambda(q),
                energy_u: uq.inner(&uq),
                energy_b: bq.inner(&bq),
            }
        })
        .collect())
}

pub fn write_spectra(ckpt: &Path, out: &Path) -> Result<Vec<ShellSpectrum>> {
    let rows = spectra(ckpt)?;
    let mut w = csv::Writer::from_path(out)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows)
}
