//! Study dispatch shared by the CLI binary and the test suites: run one
//! named study under an optional thread cap and persist CSV + manifest.

use crate::csvio;
use crate::manifest::RunManifest;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use zeno_core::experiments::{
    approx_correlation_study, crossover_study, majorisation_study, monotonicity_study,
    scaling_study, spq_correlation_study, symmetry_study, ExperimentConfig, MonotonicityMode,
    StudyResult, SPQ_STUDY_DELTA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Approx,
    Mono,
    Symmetry,
    Crossover,
    Scaling,
    Majorisation,
    SpqCorr,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::Approx => "approx",
            StudyKind::Mono => "mono",
            StudyKind::Symmetry => "symmetry",
            StudyKind::Crossover => "crossover",
            StudyKind::Scaling => "scaling",
            StudyKind::Majorisation => "majorisation",
            StudyKind::SpqCorr => "spq-corr",
        }
    }

    pub const ALL: [StudyKind; 7] = [
        StudyKind::Approx,
        StudyKind::Mono,
        StudyKind::Symmetry,
        StudyKind::Crossover,
        StudyKind::Scaling,
        StudyKind::Majorisation,
        StudyKind::SpqCorr,
    ];
}

impl FromStr for StudyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StudyKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = StudyKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown study '{s}' (expected one of: {})",
                    names.join(", ")
                )
            })
    }
}

/// Fully resolved study invocation.
#[derive(Debug, Clone)]
pub struct StudyRun {
    pub kind: StudyKind,
    pub cfg: ExperimentConfig,
    pub mono_mode: MonotonicityMode,
    /// Thread cap; `None` uses the global rayon default.
    pub threads: Option<usize>,
}

impl StudyRun {
    pub fn new(kind: StudyKind, cfg: ExperimentConfig) -> Self {
        Self {
            kind,
            cfg,
            mono_mode: MonotonicityMode::SingleCoordinate,
            threads: None,
        }
    }

    /// Run the study. Output is identical for every thread count.
    pub fn execute(&self) -> zeno_core::Result<StudyResult> {
        let run = || -> zeno_core::Result<StudyResult> {
            match self.kind {
                StudyKind::Approx => approx_correlation_study(&self.cfg),
                StudyKind::Mono => monotonicity_study(&self.cfg, self.mono_mode),
                StudyKind::Symmetry => symmetry_study(&self.cfg),
                StudyKind::Crossover => crossover_study(self.cfg.n_min.max(2), self.cfg.n_max),
                StudyKind::Scaling => scaling_study(self.cfg.alpha, self.cfg.n_min, self.cfg.n_max),
                StudyKind::Majorisation => majorisation_study(&self.cfg),
                StudyKind::SpqCorr => spq_correlation_study(&self.cfg),
            }
        };
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("thread pool");
                pool.install(run)
            }
            None => run(),
        }
    }

    /// Manifest with every parameter needed to reproduce the outputs.
    pub fn manifest(&self, result: &StudyResult, outputs: &[PathBuf]) -> RunManifest {
        let mut m = RunManifest::new(&format!("study {}", self.kind.name()));
        m.set("study", self.kind.name());
        m.set("seed", self.cfg.seed);
        m.set("samples", self.cfg.samples as u64);
        m.set("n_min", self.cfg.n_min as u64);
        m.set("n_max", self.cfg.n_max as u64);
        m.set("t", self.cfg.t);
        m.set("g", self.cfg.g);
        m.set("alpha", self.cfg.alpha);
        if self.kind == StudyKind::Mono {
            m.set(
                "mode",
                match self.mono_mode {
                    MonotonicityMode::SingleCoordinate => "single",
                    MonotonicityMode::FullVector => "full",
                },
            );
        }
        if self.kind == StudyKind::SpqCorr {
            m.set("delta", SPQ_STUDY_DELTA);
        }
        for (key, value) in result.summary.entries() {
            m.summary.insert(key.clone(), *value);
        }
        m.outputs = outputs
            .iter()
            .map(|p| p.to_string_lossy().into_owned())
            .collect();
        m
    }

    /// Rebuild the invocation from a previously written manifest.
    pub fn from_manifest(m: &RunManifest) -> Result<Self, String> {
        let kind: StudyKind = m
            .param_str("study")
            .ok_or("manifest missing 'study'")?
            .parse()?;
        let cfg = ExperimentConfig {
            seed: m.param_u64("seed").ok_or("manifest missing 'seed'")?,
            samples: m.param_u64("samples").ok_or("manifest missing 'samples'")? as usize,
            n_min: m.param_u64("n_min").ok_or("manifest missing 'n_min'")? as usize,
            n_max: m.param_u64("n_max").ok_or("manifest missing 'n_max'")? as usize,
            t: m.param_f64("t").ok_or("manifest missing 't'")?,
            g: m.param_f64("g").ok_or("manifest missing 'g'")?,
            alpha: m.param_f64("alpha").ok_or("manifest missing 'alpha'")?,
        };
        let mono_mode = match m.param_str("mode") {
            Some("full") => MonotonicityMode::FullVector,
            _ => MonotonicityMode::SingleCoordinate,
        };
        Ok(Self {
            kind,
            cfg,
            mono_mode,
            threads: None,
        })
    }
}

/// Run a study and write `<out>.csv` and `<out>.manifest.json`.
pub fn execute_to_files(
    run: &StudyRun,
    out_base: &Path,
) -> Result<(StudyResult, PathBuf, PathBuf), StudyFileError> {
    let result = run.execute().map_err(StudyFileError::Study)?;
    let csv_path = out_base.with_extension("csv");
    let manifest_path = out_base.with_extension("manifest.json");
    csvio::write(&result, &csv_path).map_err(StudyFileError::Io)?;
    let manifest = run.manifest(&result, &[csv_path.clone(), manifest_path.clone()]);
    manifest.write(&manifest_path).map_err(StudyFileError::Io)?;
    Ok((result, csv_path, manifest_path))
}

#[derive(Debug)]
pub enum StudyFileError {
    Study(zeno_core::Error),
    Io(io::Error),
}

impl std::fmt::Display for StudyFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StudyFileError::Study(e) => write!(f, "{e}"),
            StudyFileError::Io(e) => write!(f, "{e}"),
        }
    }
}
