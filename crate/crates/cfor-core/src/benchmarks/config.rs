//! Flat `key = value` case configuration.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{CforError, Result};
use crate::filters::DEFAULT_TV_EPS;
use crate::incompressible::{PoissonOperator, DEFAULT_POISSON_TOL};
use crate::kernels::{KernelFamily, KernelSpec, DEFAULT_R_HIGHPASS};
use crate::time::StepMode;

/// RSK ratio used when `kernel = rsk` and no `r` is given.
pub const DEFAULT_R_RSK: f64 = 7.5;

/// Switch threshold for long stabilized vortex runs. At the default the
/// switch reacts only after aliasing growth has cost about three decades.
pub const LONG_RUN_TV_EPS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Taylor,
    ShearLayer,
    Wavepacket,
    IsentropicVortex,
    ShockEntropy,
}

impl CaseKind {
    pub const ALL: [CaseKind; 5] = [
        CaseKind::Taylor,
        CaseKind::ShearLayer,
        CaseKind::Wavepacket,
        CaseKind::IsentropicVortex,
        CaseKind::ShockEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Taylor => "taylor",
            CaseKind::ShearLayer => "shear",
            CaseKind::Wavepacket => "wavepacket",
            CaseKind::IsentropicVortex => "vortex",
            CaseKind::ShockEntropy => "shock",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            CaseKind::Taylor => "2D incompressible Taylor vortex array (steady Euler solution)",
            CaseKind::ShearLayer => "2D incompressible double shear layer roll-up",
            CaseKind::Wavepacket => "1D linear advection of a sine-Gaussian wavepacket",
            CaseKind::IsentropicVortex => "2D compressible isentropic vortex advected diagonally",
            CaseKind::ShockEntropy => "1D Mach 3 shock hitting an entropy wave",
        }
    }
}

impl FromStr for CaseKind {
    type Err = CforError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "taylor" => Ok(CaseKind::Taylor),
            "shear" | "shear_layer" | "shearlayer" => Ok(CaseKind::ShearLayer),
            "wavepacket" | "packet" => Ok(CaseKind::Wavepacket),
            "vortex" | "isentropic_vortex" => Ok(CaseKind::IsentropicVortex),
            "shock" | "shock_entropy" => Ok(CaseKind::ShockEntropy),
            other => Err(CforError::InvalidParameter(format!("unknown case `{other}`"))),
        }
    }
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub case: CaseKind,
    /// Grid points per axis.
    pub n: usize,
    /// Taylor `k`, wavepacket `k` or pre-shock `kappa`.
    pub k: f64,
    pub step: StepMode,
    pub t_final: f64,
    /// High-pass (derivative) kernel; also the prediction half of the low-pass.
    pub kernel: KernelSpec,
    /// Restoration ratio of the conjugate low-pass.
    pub r_lp: f64,
    pub sample_times: Vec<f64>,
    /// TV-switched low-pass filtering on/off.
    pub filter: bool,
    pub tv_eps: f64,
    pub poisson: PoissonOperator,
    pub poisson_tol: f64,
    /// Shear layer thickness parameter and perturbation.
    pub thickness: f64,
    pub delta: f64,
    /// Wavepacket envelope width, advection speed and initial center.
    pub sigma: f64,
    pub speed: f64,
    pub x0: f64,
    /// Vortex strength and gradient parameter.
    pub lambda: f64,
    pub eta: f64,
    pub gamma: f64,
    /// Entropy-wave amplitude ahead of the shock.
    pub epsilon: f64,
    /// Shock-band restoration ratio and half-width in cells; `band_r = 0` disables it.
    pub band_r: f64,
    pub band: usize,
    /// Initial shock smoothing width in cells.
    pub smoothing: f64,
    pub snapshots: bool,
}

const KEYS: &[&str] = &[
    "case", "n", "k", "kappa", "dt", "cfl", "t_final", "kernel", "r", "r_hp", "r_lp", "order", "half_width",
    "samples", "filter", "tv_eps", "poisson", "poisson_tol", "thickness", "delta", "sigma", "speed", "x0",
    "lambda", "eta", "gamma", "epsilon", "band_r", "band", "smoothing", "snapshots",
];

impl CaseConfig {
    /// Reference defaults for `case` on an `n`-point grid.
    pub fn defaults(case: CaseKind, n: usize) -> Self {
        let mut c = CaseConfig {
            case,
            n,
            k: 1.0,
            step: StepMode::Cfl(0.5),
            t_final: 2.0,
            kernel: KernelSpec::hermite(DEFAULT_R_HIGHPASS),
            r_lp: 2.5,
            sample_times: Vec::new(),
            filter: true,
            tv_eps: DEFAULT_TV_EPS,
            poisson: PoissonOperator::Consistent,
            poisson_tol: DEFAULT_POISSON_TOL,
            thickness: 1.0 / 15.0,
            delta: 0.05,
            sigma: std::f64::consts::SQRT_2 / 10.0,
            speed: 1.0,
            x0: 0.0,
            lambda: 5.0,
            eta: 1.0,
            gamma: crate::euler::GAMMA,
            epsilon: 0.01,
            band_r: 1.8,
            band: 1,
            smoothing: 0.0,
            snapshots: true,
        };
        match case {
            CaseKind::Taylor => {
                c.filter = false;
                c.poisson = PoissonOperator::Compact;
                c.snapshots = false;
            }
            CaseKind::ShearLayer => {
                c.step = StepMode::FixedDt(0.002);
                c.t_final = 10.0;
                c.r_lp = 2.6;
            }
            CaseKind::Wavepacket => {
                c.k = 5.0;
                c.step = StepMode::FixedDt(1e-4);
                c.filter = false;
                c.snapshots = false;
            }
            CaseKind::IsentropicVortex => {
                // Sharp enough to filter often without eroding the core.
                c.r_lp = 3.0;
            }
            CaseKind::ShockEntropy => {
                c.k = 13.0;
                c.t_final = 1.0;
                c.r_lp = 2.55;
            }
        }
        c
    }

    /// Parses the flat format. `#` starts a comment; `case` and `n` are required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                return Err(CforError::Config {
                    line,
                    message: format!("expected `key = value`, got `{body}`"),
                });
            };
            let key = k.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(CforError::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if entries.iter().any(|e| e.1 == key) {
                return Err(CforError::Config {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            entries.push((line, key, v.trim().to_string()));
        }
        let find = |key: &str| entries.iter().find(|e| e.1 == key);
        let last_line = text.lines().count().max(1);
        let (case_line, _, case_val) = find("case").ok_or(CforError::Config {
            line: last_line,
            message: "missing required key `case`".into(),
        })?;
        let case = CaseKind::from_str(case_val).map_err(|e| CforError::Config {
            line: *case_line,
            message: e.to_string(),
        })?;
        let (n_line, _, n_val) = find("n").ok_or(CforError::Config {
            line: last_line,
            message: "missing required key `n`".into(),
        })?;
        let n = parse_num::<usize>(*n_line, "n", n_val)?;
        let mut c = CaseConfig::defaults(case, n);
        let mut samples_given = false;
        let mut r_given = false;
        for (line, key, val) in &entries {
            let line = *line;
            match key.as_str() {
                "case" | "n" => {}
                "k" | "kappa" => c.k = parse_num(line, key, val)?,
                "dt" => c.step = StepMode::FixedDt(parse_num(line, key, val)?),
                "cfl" => c.step = StepMode::Cfl(parse_num(line, key, val)?),
                "t_final" => c.t_final = parse_num(line, key, val)?,
                "kernel" => {
                    c.kernel.family = KernelFamily::from_str(val).map_err(|e| CforError::Config {
                        line,
                        message: e.to_string(),
                    })?
                }
                "r" | "r_hp" => {
                    c.kernel.r = parse_num(line, key, val)?;
                    r_given = true;
                }
                "r_lp" => c.r_lp = parse_num(line, key, val)?,
                "order" => c.kernel.order = parse_num(line, key, val)?,
                "half_width" => c.kernel.half_width = parse_num(line, key, val)?,
                "samples" => {
                    c.sample_times = val
                        .split(',')
                        .map(|s| parse_num::<f64>(line, key, s.trim()))
                        .collect::<Result<_>>()?;
                    samples_given = true;
                }
                "filter" => c.filter = parse_bool(line, key, val)?,
                "tv_eps" => c.tv_eps = parse_num(line, key, val)?,
                "poisson" => {
                    c.poisson = PoissonOperator::from_str(val).map_err(|e| CforError::Config {
                        line,
                        message: e.to_string(),
                    })?
                }
                "poisson_tol" => c.poisson_tol = parse_num(line, key, val)?,
                "thickness" => c.thickness = parse_num(line, key, val)?,
                "delta" => c.delta = parse_num(line, key, val)?,
                "sigma" => c.sigma = parse_num(line, key, val)?,
                "speed" => c.speed = parse_num(line, key, val)?,
                "x0" => c.x0 = parse_num(line, key, val)?,
                "lambda" => c.lambda = parse_num(line, key, val)?,
                "eta" => c.eta = parse_num(line, key, val)?,
                "gamma" => c.gamma = parse_num(line, key, val)?,
                "epsilon" => c.epsilon = parse_num(line, key, val)?,
                "band_r" => c.band_r = parse_num(line, key, val)?,
                "band" => c.band = parse_num(line, key, val)?,
                "smoothing" => c.smoothing = parse_num(line, key, val)?,
                "snapshots" => c.snapshots = parse_bool(line, key, val)?,
                _ => unreachable!("key list checked above"),
            }
        }
        if !r_given && c.kernel.family == KernelFamily::Rsk {
            c.kernel.r = DEFAULT_R_RSK;
        }
        if !samples_given {
            c.sample_times.clear();
        }
        c.validate()?;
        Ok(c)
    }

    /// Sample times, defaulting to `t_final` (every 2 time units for the shear layer).
    pub fn samples(&self) -> Vec<f64> {
        if !self.sample_times.is_empty() {
            return self.sample_times.clone();
        }
        if self.case == CaseKind::ShearLayer {
            let mut t = 2.0;
            let mut out = Vec::new();
            while t < self.t_final - 1e-12 {
                out.push(t);
                t += 2.0;
            }
            out.push(self.t_final);
            return out;
        }
        vec![self.t_final]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CforError::InvalidParameter(m));
        crate::grid::check_points(self.n)?;
        self.kernel.validate()?;
        crate::time::StepControl {
            mode: self.step,
            re: f64::INFINITY,
        }
        .validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        let mut prev = 0.0;
        for &t in &self.sample_times {
            if !(t > prev) || t > self.t_final * (1.0 + 1e-12) {
                return bad(format!("sample times must increase within (0, t_final], got {t}"));
            }
            prev = t;
        }
        if self.filter && !(self.r_lp > 0.0 && self.r_lp <= self.kernel.r) {
            return bad(format!("r_lp must lie in (0, r_hp = {}], got {}", self.kernel.r, self.r_lp));
        }
        if !(self.tv_eps >= 0.0) || !(self.poisson_tol > 0.0) {
            return bad("tv_eps must be >= 0 and poisson_tol > 0".into());
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if self.case == CaseKind::Taylor && (self.k.fract() != 0.0 || self.k < 1.0) {
            return bad(format!("taylor k must be a positive integer for periodicity, got {}", self.k));
        }
        Ok(())
    }

    /// Text form that parses back to the same configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "case = {}", self.case);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "k = {}", self.k);
        match self.step {
            StepMode::FixedDt(dt) => {
                let _ = writeln!(s, "dt = {dt:e}");
            }
            StepMode::Cfl(c) => {
                let _ = writeln!(s, "cfl = {c}");
            }
        }
        let _ = writeln!(s, "t_final = {}", self.t_final);
        let _ = writeln!(s, "kernel = {}", self.kernel.family);
        let _ = writeln!(s, "r = {}", self.kernel.r);
        let _ = writeln!(s, "r_lp = {}", self.r_lp);
        let _ = writeln!(s, "order = {}", self.kernel.order);
        let _ = writeln!(s, "half_width = {}", self.kernel.half_width);
        if !self.sample_times.is_empty() {
            let list: Vec<String> = self.sample_times.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "samples = {}", list.join(", "));
        }
        let _ = writeln!(s, "filter = {}", if self.filter { "on" } else { "off" });
        let _ = writeln!(s, "tv_eps = {}", self.tv_eps);
        let poisson = match self.poisson {
            PoissonOperator::Compact => "compact",
            PoissonOperator::Consistent => "consistent",
        };
        let _ = writeln!(s, "poisson = {poisson}");
        let _ = writeln!(s, "poisson_tol = {:e}", self.poisson_tol);
        for (k, v) in [
            ("thickness", self.thickness),
            ("delta", self.delta),
            ("sigma", self.sigma),
            ("speed", self.speed),
            ("x0", self.x0),
            ("lambda", self.lambda),
            ("eta", self.eta),
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
            ("band_r", self.band_r),
            ("smoothing", self.smoothing),
        ] {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "band = {}", self.band);
        let _ = writeln!(s, "snapshots = {}", if self.snapshots { "on" } else { "off" });
        s
    }
}

fn parse_num<T: FromStr>(line: usize, key: &str, val: &str) -> Result<T> {
    val.parse().map_err(|_| CforError::Config {
        line,
        message: format!("invalid value `{val}` for `{key}`"),
    })
}

fn parse_bool(line: usize, key: &str, val: &str) -> Result<bool> {
    match val.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(CforError::Config {
            line,
            message: format!("invalid value `{val}` for `{key}` (use on/off)"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_taylor() {
        let c = CaseConfig::parse("case = taylor\nn = 64\nk = 2\n").unwrap();
        assert_eq!(c.case, CaseKind::Taylor);
        assert_eq!((c.n, c.k, c.t_final), (64, 2.0, 2.0));
        assert_eq!(c.poisson, PoissonOperator::Compact);
        assert_eq!(c.samples(), vec![2.0]);
    }

    #[test]
    fn missing_n_is_line_numbered() {
        match CaseConfig::parse("# comment\ncase = vortex\n") {
            Err(CforError::Config { line: 2, message }) => assert!(message.contains("`n`")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        match CaseConfig::parse("case = vortex\nn = 40\nresolution = 3\n") {
            Err(CforError::Config { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_value_and_missing_equals() {
        assert!(matches!(
            CaseConfig::parse("case = vortex\nn = forty\n"),
            Err(CforError::Config { line: 2, .. })
        ));
        assert!(matches!(CaseConfig::parse("case vortex\n"), Err(CforError::Config { line: 1, .. })));
    }

    #[test]
    fn round_trip_through_text() {
        let c = CaseConfig::parse("case = shock\nn = 400\nkappa = 26\nsamples = 0.5, 1.0\nkernel = rsk\n").unwrap();
        assert_eq!(c.kernel.r, DEFAULT_R_RSK);
        let back = CaseConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn shear_samples_every_two() {
        let c = CaseConfig::defaults(CaseKind::ShearLayer, 64);
        assert_eq!(c.samples(), vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn rejects_out_of_order_samples() {
        assert!(CaseConfig::parse("case = vortex\nn = 40\nsamples = 1, 0.5\n").is_err());
    }
}
