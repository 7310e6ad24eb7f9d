use super::{segment_steps, CaseConfig, RunOutput, Snapshot};
use crate::error::{CforError, Result};
use crate::filters::{total_variation_raw, ConjugateFilterBank, TvPolicy, TvSwitch};
use crate::grid::{norms_raw, CompiledStencil, Field, NormConvention};
use crate::kernels::stencil;
use crate::spectral::{band_edges, predict_case_feasibility, wavepacket_spectrum, BAND_TIERS};
use crate::time::{rk4_step, StepMode};

/// Relative level at which the packet spectrum counts as ended.
pub const WAVEPACKET_SPECTRUM_FLOOR: f64 = 1e-2;

/// `sin(2 pi k xi) exp(-xi^2/sigma^2)` with `xi = x - x0 - c t` wrapped into `[-1, 1)`.
pub fn wavepacket_exact(x: f64, t: f64, k: f64, sigma: f64, c: f64, x0: f64) -> f64 {
    let xi = (x - x0 - c * t + 1.0).rem_euclid(2.0) - 1.0;
    (2.0 * std::f64::consts::PI * k * xi).sin() * (-(xi * xi) / (sigma * sigma)).exp()
}

pub(super) fn run(cfg: &CaseConfig) -> Result<RunOutput> {
    let n = cfg.n;
    let dx = 2.0 * 1.0 / n as f64;
    let x: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * dx).collect();
    let exact = |t: f64| -> Vec<f64> { x.iter().map(|&xi| wavepacket_exact(xi, t, cfg.k, cfg.sigma, cfg.speed, cfg.x0)).collect() };
    let mut out = RunOutput::new(cfg);
    let d1 = CompiledStencil::derivative(&stencil(&cfg.kernel, 1)?, dx)?;
    let dt_max = match cfg.step {
        StepMode::FixedDt(dt) => dt,
        StepMode::Cfl(c) => {
            if cfg.speed == 0.0 {
                return Err(CforError::ZeroSpeed);
            }
            c * dx / cfg.speed.abs()
        }
    };

    let edges = band_edges(&stencil(&cfg.kernel, 1)?, &BAND_TIERS)?;
    let (peak, support) = wavepacket_spectrum(cfg.k, cfg.sigma, dx, WAVEPACKET_SPECTRUM_FLOOR);
    let report = predict_case_feasibility(&edges, peak, support);
    out.set_scalar("spectral_peak", peak);
    out.set_scalar("spectral_support", support);
    if let Some(best) = report.best_tier() {
        out.set_scalar("best_inside_tier", best);
    }
    out.note(format!("wavepacket k={} N={n} dt={dt_max:e} peak={peak:.4} support={support:.4}", cfg.k));

    let lowpass = if cfg.filter {
        Some(ConjugateFilterBank::new(&cfg.kernel, cfg.r_lp)?.lowpass())
    } else {
        None
    };
    let mut u = exact(0.0);
    let mut switch = TvSwitch::new(TvPolicy { eps: cfg.tv_eps }, vec![total_variation_raw(&u, n, 1)]);
    let mut ext = Vec::with_capacity(n + 2 * d1.reach());
    let speed = cfg.speed;
    let mut rhs = |u: &[f64]| -> Result<Vec<f64>> {
        let mut du = vec![0.0; u.len()];
        d1.apply_periodic(u, &mut du, &mut ext);
        du.iter_mut().for_each(|v| *v *= -speed);
        Ok(du)
    };
    let (mut t, mut step) = (0.0, 0usize);
    for target in cfg.samples() {
        let (steps, dt) = segment_steps(t, target, dt_max);
        for _ in 0..steps {
            u = rk4_step(&u, dt, &mut rhs, step, t)?;
            step += 1;
            t += dt;
            if let Some(lp) = &lowpass {
                let tv = vec![total_variation_raw(&u, n, 1)];
                if switch.should_filter(&tv) {
                    lp.apply_all_axes(&mut u, n, 1)?;
                    switch.reset(vec![total_variation_raw(&u, n, 1)]);
                    out.filter_events += 1;
                }
            }
        }
        t = target;
        let e = exact(t);
        out.record(t, step, "u", norms_raw(&u, &e, n, 1, NormConvention::Standard)?);
        if cfg.snapshots {
            out.snapshots.push(Snapshot {
                t,
                name: "u".into(),
                field: Field::zeros_1d(n, dx, -1.0)?.with_data(u.clone())?,
            });
        }
    }
    out.steps = step;
    out.set_scalar("steps", step as f64);
    out.set_scalar("filter_events", out.filter_events as f64);
    Ok(out)
}
