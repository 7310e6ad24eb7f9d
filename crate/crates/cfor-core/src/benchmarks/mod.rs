//! Initial conditions, exact solutions and drivers for the five test problems.

mod config;
mod shear;
mod shock;
mod taylor;
mod vortex;
mod wavepacket;

use std::fmt::Write as _;

pub use config::{CaseConfig, CaseKind, DEFAULT_R_RSK, LONG_RUN_TV_EPS};
pub use shear::shear_layer_init;
pub use shock::{entropy_amplitude, shock_entropy_init, EntropyMeasurement, ENTROPY_TARGET, POST_SHOCK};
pub use taylor::{pressure_ppw, taylor_exact};
pub use vortex::{vortex_exact, vortex_state};
pub use wavepacket::{wavepacket_exact, WAVEPACKET_SPECTRUM_FLOOR};

use crate::error::Result;
use crate::grid::{ErrorReport, Field};

/// Errors of one variable at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub step: usize,
    pub variable: String,
    pub report: ErrorReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub name: String,
    pub field: Field,
}

/// Everything a case run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: CaseConfig,
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
    pub log: Vec<String>,
    /// Named diagnostics (scalar results and quality gates).
    pub scalars: Vec<(String, f64)>,
    pub steps: usize,
    pub filter_events: usize,
}

impl RunOutput {
    fn new(config: &CaseConfig) -> Self {
        RunOutput {
            config: config.clone(),
            samples: Vec::new(),
            snapshots: Vec::new(),
            log: Vec::new(),
            scalars: Vec::new(),
            steps: 0,
            filter_events: 0,
        }
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|s| s.0 == name).map(|s| s.1)
    }

    fn set_scalar(&mut self, name: &str, value: f64) {
        match self.scalars.iter_mut().find(|s| s.0 == name) {
            Some(s) => s.1 = value,
            None => self.scalars.push((name.to_string(), value)),
        }
    }

    /// Error report of `variable` at the sample closest to `t`.
    pub fn error_at(&self, variable: &str, t: f64) -> Option<&ErrorReport> {
        self.samples
            .iter()
            .filter(|s| s.variable == variable)
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .map(|s| &s.report)
    }

    fn record(&mut self, t: f64, step: usize, variable: &str, report: ErrorReport) {
        self.log.push(format!(
            "t={t:.6} step={step} {variable}: L1={:.3e} L2={:.3e} Linf={:.3e}",
            report.l1, report.l2, report.linf
        ));
        self.samples.push(Sample {
            t,
            step,
            variable: variable.to_string(),
            report,
        });
    }

    fn note(&mut self, line: String) {
        log::debug!("{line}");
        self.log.push(line);
    }

    /// CSV with columns `t,step,variable,l1,l2,linf`.
    pub fn errors_csv(&self) -> String {
        let mut s = String::from("t,step,variable,l1,l2,linf\n");
        for x in &self.samples {
            let _ = writeln!(
                s,
                "{},{},{},{:.6e},{:.6e},{:.6e}",
                x.t, x.step, x.variable, x.report.l1, x.report.l2, x.report.linf
            );
        }
        s
    }

    pub fn scalars_csv(&self) -> String {
        let mut s = String::from("name,value\n");
        for (k, v) in &self.scalars {
            let _ = writeln!(s, "{k},{v:.10e}");
        }
        s
    }
}

/// Runs one configured case. Solver errors carry the case name.
pub fn run_case(cfg: &CaseConfig) -> Result<RunOutput> {
    cfg.validate().map_err(|e| e.in_case(cfg.case.name()))?;
    let out = match cfg.case {
        CaseKind::Taylor => taylor::run(cfg),
        CaseKind::ShearLayer => shear::run(cfg),
        CaseKind::Wavepacket => wavepacket::run(cfg),
        CaseKind::IsentropicVortex => vortex::run(cfg),
        CaseKind::ShockEntropy => shock::run(cfg),
    };
    out.map_err(|e| e.in_case(cfg.case.name()))
}

/// Uniform steps covering `[t0, t1]` no larger than `dt_max`.
fn segment_steps(t0: f64, t1: f64, dt_max: f64) -> (usize, f64) {
    let span = t1 - t0;
    let n = ((span / dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, span / n as f64)
}

/// Next step size for a CFL-controlled run, shortened to land on `target`.
fn clamp_step(t: f64, dt: f64, target: f64) -> f64 {
    if t + dt >= target - 1e-12 * target.abs().max(1.0) {
        target - t
    } else {
        dt
    }
}

/// `a` wrapped into `[-period/2, period/2)`.
fn min_image(a: f64, period: f64) -> f64 {
    (a + 0.5 * period).rem_euclid(period) - 0.5 * period
}
