//! Conjugate high-pass (derivative) and low-pass (prediction/restoration)
//! filters, plus the total-variation switch that activates the low-pass.

use crate::error::{CforError, Result};
use crate::grid::{check_points, Axis, CompiledStencil, Field};
use crate::kernels::{halfgrid_stencil, stencil, KernelSpec, StencilWeights};

/// Default relative TV growth that triggers the low-pass.
pub const DEFAULT_TV_EPS: f64 = 0.01;
/// Default restoration ratio when a case does not specify one.
pub const DEFAULT_R_LOWPASS: f64 = 2.5;

/// Periodic derivative along `axis`: `out_i = (1/dx^q) sum_j w_j f_{(i+j) mod N}`.
pub fn apply_derivative(field: &Field, weights: &StencilWeights, axis: Axis) -> Result<Field> {
    if weights.half_grid {
        return Err(CforError::InvalidParameter("derivative needs an on-grid stencil".into()));
    }
    check_points(field.points(axis))?;
    CompiledStencil::derivative(weights, field.spacing(axis))?.apply_axis(field, axis)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvPolicy {
    /// Relative growth `eps` in `tv > (1 + eps) * reference`.
    pub eps: f64,
}

impl Default for TvPolicy {
    fn default() -> Self {
        TvPolicy { eps: DEFAULT_TV_EPS }
    }
}

/// High-pass and low-pass filters generated from one kernel family and half-width.
#[derive(Debug, Clone)]
pub struct ConjugateFilterBank {
    pub highpass_q1: StencilWeights,
    pub predict: StencilWeights,
    pub restore: StencilWeights,
    pub policy: TvPolicy,
    pub r_hp: f64,
    pub r_lp: f64,
}

impl ConjugateFilterBank {
    /// Prediction and the derivative use `spec.r`; restoration uses `r_lp`.
    pub fn new(spec: &KernelSpec, r_lp: f64) -> Result<Self> {
        if r_lp > spec.r {
            return Err(CforError::InvalidParameter(format!(
                "restoration r_lp = {r_lp} must not exceed r_hp = {}",
                spec.r
            )));
        }
        let lp_spec = KernelSpec { r: r_lp, ..*spec };
        Ok(ConjugateFilterBank {
            highpass_q1: stencil(spec, 1)?,
            predict: halfgrid_stencil(spec)?,
            restore: halfgrid_stencil(&lp_spec)?,
            policy: TvPolicy::default(),
            r_hp: spec.r,
            r_lp,
        })
    }

    pub fn with_policy(mut self, policy: TvPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn lowpass(&self) -> LowPass {
        LowPass::new(&self.predict, &self.restore)
    }
}

/// Compiled two-pass low-pass. With `m_k` the value at `x_{k+1/2}`:
/// `m_k = sum_j p_j f_{k+j+1}` and `out_i = sum_j r_j m_{i+j}`, `j = -W..W-1`.
#[derive(Debug, Clone)]
pub struct LowPass {
    predict: CompiledStencil,
    restore: CompiledStencil,
    half_width: usize,
}

impl LowPass {
    pub fn new(predict: &StencilWeights, restore: &StencilWeights) -> Self {
        let w = predict.half_width() as isize;
        let pw = restore.half_width() as isize;
        LowPass {
            predict: CompiledStencil::new((-w + 1..=w).collect(), predict.weights.clone()),
            restore: CompiledStencil::new((-pw..pw).collect(), restore.weights.clone()),
            half_width: predict.half_width().max(restore.half_width()),
        }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Periodic line filter.
    pub fn apply_periodic(&self, src: &[f64], dst: &mut [f64], ext: &mut Vec<f64>, mid: &mut Vec<f64>) {
        mid.resize(src.len(), 0.0);
        self.predict.apply_periodic(src, mid, ext);
        self.restore.apply_periodic(mid, dst, ext);
    }

    /// Line filter on data padded by `2W` values on each side (`ext.len() == n + 4W`).
    pub fn apply_padded(&self, ext: &[f64], dst: &mut [f64], mid: &mut Vec<f64>) {
        let w = self.half_width;
        let n = dst.len();
        debug_assert_eq!(ext.len(), n + 4 * w);
        mid.resize(n + 2 * w, 0.0);
        self.predict.apply_padded(ext, w, mid);
        self.restore.apply_padded(mid, w, dst);
    }

    /// Periodic filter along one axis of raw row-major data.
    pub fn apply_axis_into(&self, src: &[f64], nx: usize, ny: usize, axis: Axis, dst: &mut [f64]) -> Result<()> {
        let mut mid = vec![0.0; src.len()];
        self.predict.apply_axis_into(src, nx, ny, axis, &mut mid)?;
        self.restore.apply_axis_into(&mid, nx, ny, axis, dst)
    }

    /// Filters every axis of the data in turn (x then y for 2D).
    pub fn apply_all_axes(&self, data: &mut [f64], nx: usize, ny: usize) -> Result<()> {
        let mut tmp = vec![0.0; data.len()];
        self.apply_axis_into(data, nx, ny, Axis::X, &mut tmp)?;
        if ny > 1 {
            self.apply_axis_into(&tmp, nx, ny, Axis::Y, data)?;
        } else {
            data.copy_from_slice(&tmp);
        }
        Ok(())
    }
}

/// Conjugate low-pass along one axis of a periodic field.
pub fn apply_conjugate_lowpass(field: &Field, bank: &ConjugateFilterBank, axis: Axis) -> Result<Field> {
    if bank.predict.half_width() != bank.restore.half_width() {
        return Err(CforError::InvalidParameter("prediction and restoration need the same W".into()));
    }
    check_points(field.points(axis))?;
    let mut out = field.zeros_like();
    bank.lowpass().apply_axis_into(&field.data, field.nx, field.ny, axis, &mut out.data)?;
    Ok(out)
}

/// Conjugate low-pass applied dimension by dimension.
pub fn apply_conjugate_lowpass_all(field: &Field, bank: &ConjugateFilterBank) -> Result<Field> {
    let mut out = field.clone();
    bank.lowpass().apply_all_axes(&mut out.data, field.nx, field.ny)?;
    Ok(out)
}

/// Total variation with periodic closure; 2D sums the 1D variations along both axes.
pub fn total_variation(field: &Field) -> f64 {
    total_variation_raw(&field.data, field.nx, field.ny)
}

pub fn total_variation_raw(data: &[f64], nx: usize, ny: usize) -> f64 {
    let mut tv = 0.0;
    for j in 0..ny {
        let row = &data[j * nx..(j + 1) * nx];
        for i in 0..nx {
            tv += (row[(i + 1) % nx] - row[i]).abs();
        }
    }
    if ny > 1 {
        for j in 0..ny {
            let jn = (j + 1) % ny;
            for i in 0..nx {
                tv += (data[jn * nx + i] - data[j * nx + i]).abs();
            }
        }
    }
    tv
}

/// Total variation of an open (non-periodic) line.
pub fn total_variation_open(line: &[f64]) -> f64 {
    line.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// True when `tv_current > (1 + eps) * tv_reference`.
pub fn tv_switch_decide(tv_current: f64, tv_reference: f64, policy: TvPolicy) -> bool {
    tv_current > (1.0 + policy.eps) * tv_reference
}

/// Reference TVs of a set of variables. The low-pass is due when any variable's
/// TV has grown past its own reference.
#[derive(Debug, Clone)]
pub struct TvSwitch {
    pub policy: TvPolicy,
    reference: Vec<f64>,
}

impl TvSwitch {
    pub fn new(policy: TvPolicy, initial: Vec<f64>) -> Self {
        TvSwitch {
            policy,
            reference: initial,
        }
    }

    pub fn should_filter(&self, current: &[f64]) -> bool {
        current
            .iter()
            .zip(&self.reference)
            .any(|(&c, &r)| tv_switch_decide(c, r, self.policy))
    }

    pub fn reset(&mut self, current: Vec<f64>) {
        self.reference = current;
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bank(r_lp: f64) -> ConjugateFilterBank {
        ConjugateFilterBank::new(&KernelSpec::hermite(3.05), r_lp).unwrap()
    }

    fn line(n: usize, f: impl Fn(usize) -> f64) -> Field {
        let mut fl = Field::zeros_1d(n, 2.0 * PI / n as f64, 0.0).unwrap();
        for i in 0..n {
            fl.data[i] = f(i);
        }
        fl
    }

    #[test]
    fn constant_preserved() {
        let f = line(64, |_| 3.7);
        let g = apply_conjugate_lowpass(&f, &bank(2.5), Axis::X).unwrap();
        assert!(g.data.iter().all(|v| (v - 3.7).abs() <= 1e-14 * 3.7));
    }

    #[test]
    fn low_wavenumber_passes() {
        let n = 64;
        let f = line(n, |i| (2.0 * 2.0 * PI * i as f64 / n as f64).sin());
        let g = apply_conjugate_lowpass(&f, &bank(2.5), Axis::X).unwrap();
        let amp = 2.0 * (0..n).map(|i| g.data[i] * f.data[i]).sum::<f64>() / n as f64;
        assert!((1.0 - amp).abs() <= 1e-8, "{amp}");
    }

    #[test]
    fn nyquist_mode_removed() {
        let f = line(64, |i| if i % 2 == 0 { 1.0 } else { -1.0 });
        let g = apply_conjugate_lowpass(&f, &bank(2.5), Axis::X).unwrap();
        assert!(g.max_abs() <= 1e-2, "{}", g.max_abs());
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let f = line(64, |_| 2.0);
        let s = stencil(&KernelSpec::hermite(3.05), 1).unwrap();
        let d = apply_derivative(&f, &s, Axis::X).unwrap();
        assert!(d.max_abs() <= 1e-13);
    }

    #[test]
    fn tv_examples() {
        assert_eq!(total_variation(&line(10, |_| 1.0)), 0.0);
        assert_eq!(total_variation(&line(10, |i| if i < 5 { 0.0 } else { 1.0 })), 2.0);
        let n = 64;
        let f = line(n, |i| (2.0 * PI * i as f64 / n as f64).sin());
        let direct: f64 = (0..n)
            .map(|i| {
                let a = (2.0 * PI * i as f64 / n as f64).sin();
                let b = (2.0 * PI * ((i + 1) % n) as f64 / n as f64).sin();
                (b - a).abs()
            })
            .sum();
        assert!((total_variation(&f) - direct).abs() < 1e-14);
        // Exact value 4 sin-sum identity for N divisible by 4.
        assert!((total_variation(&f) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn switch_decisions() {
        let p = TvPolicy { eps: 0.05 };
        assert!(!tv_switch_decide(1.0, 1.0, p));
        assert!(tv_switch_decide(1.10, 1.00, p));
        let mut sw = TvSwitch::new(TvPolicy::default(), vec![1.0, 2.0]);
        assert!(!sw.should_filter(&[1.005, 2.0]));
        assert!(sw.should_filter(&[1.0, 2.03]));
        sw.reset(vec![1.0, 2.03]);
        assert!(!sw.should_filter(&[1.0, 2.03]));
    }

    #[test]
    fn restore_wider_than_predict_rejected() {
        assert!(ConjugateFilterBank::new(&KernelSpec::hermite(3.05), 3.5).is_err());
    }

    #[test]
    fn padded_matches_periodic_on_periodic_data() {
        let n = 100;
        let f: Vec<f64> = (0..n).map(|i| ((i * 7) % 13) as f64).collect();
        let lp = bank(2.55).lowpass();
        let mut per = vec![0.0; n];
        lp.apply_periodic(&f, &mut per, &mut Vec::new(), &mut Vec::new());
        let w = lp.half_width();
        let ext: Vec<f64> = (0..n + 4 * w).map(|t| f[(t + n - 2 * w) % n]).collect();
        let mut pad = vec![0.0; n];
        lp.apply_padded(&ext, &mut pad, &mut Vec::new());
        for i in 0..n {
            assert!((per[i] - pad[i]).abs() < 1e-12);
        }
    }
}
