//! Discrete singular convolution kernels and the stencils built from them.
//!
//! Two kernel families are provided. The Hermite kernel is a truncated
//! Hermite-function expansion of the delta distribution under a Gaussian
//! envelope; the regularized Shannon kernel (RSK) is a sinc damped by a
//! Gaussian. Stencil weights are tabulated in grid units (spacing 1) so the
//! derivative of order `q` is `sum_j w_j f_{i+j} / dx^q`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{CforError, Result};

/// Hermite order used by every computation in the benchmarks.
pub const DEFAULT_HERMITE_ORDER: usize = 88;
/// Stencil half-width used by every computation in the benchmarks.
pub const DEFAULT_HALF_WIDTH: usize = 32;
/// Width ratio of the high-pass (derivative) and prediction stencils.
pub const DEFAULT_R_HIGHPASS: f64 = 3.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Hermite,
    Rsk,
}

impl std::str::FromStr for KernelFamily {
    type Err = CforError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hermite" | "hk" => Ok(KernelFamily::Hermite),
            "rsk" | "shannon" => Ok(KernelFamily::Rsk),
            other => Err(CforError::InvalidKernel(format!("unknown kernel family `{other}`"))),
        }
    }
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelFamily::Hermite => f.write_str("hermite"),
            KernelFamily::Rsk => f.write_str("rsk"),
        }
    }
}

/// Kernel parameters. The Gaussian width is always derived as `r * spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Stencil half-width W (2W+1 on-grid points, 2W half-grid points).
    pub half_width: usize,
    /// Ratio r = sigma / spacing.
    pub r: f64,
    /// Hermite expansion order n (even); ignored for RSK.
    pub order: usize,
    /// Grid spacing.
    pub spacing: f64,
}

impl KernelSpec {
    /// Hermite kernel with n = 88, W = 32 and unit spacing.
    pub fn hermite(r: f64) -> Self {
        KernelSpec {
            family: KernelFamily::Hermite,
            half_width: DEFAULT_HALF_WIDTH,
            r,
            order: DEFAULT_HERMITE_ORDER,
            spacing: 1.0,
        }
    }

    /// Regularized Shannon kernel with W = 32 and unit spacing.
    pub fn rsk(r: f64) -> Self {
        KernelSpec {
            family: KernelFamily::Rsk,
            half_width: DEFAULT_HALF_WIDTH,
            r,
            order: 0,
            spacing: 1.0,
        }
    }

    pub fn new(family: KernelFamily, r: f64) -> Self {
        match family {
            KernelFamily::Hermite => Self::hermite(r),
            KernelFamily::Rsk => Self::rsk(r),
        }
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn with_half_width(mut self, half_width: usize) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.r * self.spacing
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_width < 1 {
            return Err(CforError::InvalidKernel("half-width W must be >= 1".into()));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(CforError::InvalidKernel(format!("r must be positive, got {}", self.r)));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(CforError::InvalidKernel(format!(
                "grid spacing must be positive, got {}",
                self.spacing
            )));
        }
        if self.family == KernelFamily::Hermite && (self.order < 2 || self.order % 2 != 0) {
            return Err(CforError::InvalidKernel(format!(
                "Hermite order must be even and >= 2, got {}",
                self.order
            )));
        }
        Ok(())
    }
}

/// Stencil weights for a derivative of order `q` (on-grid) or for half-grid
/// interpolation (`q = 0`, offsets `j + 1/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct StencilWeights {
    pub q: u32,
    /// Offsets in grid units: `-W..=W`, or `j + 1/2` for `j = -W..W-1`.
    pub offsets: Vec<f64>,
    pub weights: Vec<f64>,
    pub half_grid: bool,
    /// True once the `1/dx^q` factor has been multiplied into the weights.
    pub includes_delta_scaling: bool,
    /// Largest parity defect removed by symmetrization (or by unit-sum rescaling
    /// for half-grid stencils, where it records `|sum - 1|`).
    pub max_asymmetry: f64,
}

impl StencilWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Half-width W of the stencil.
    pub fn half_width(&self) -> usize {
        if self.half_grid {
            self.weights.len() / 2
        } else {
            (self.weights.len() - 1) / 2
        }
    }

    /// Weight at on-grid offset `j` (`-W..=W`).
    pub fn at(&self, j: isize) -> f64 {
        let w = self.half_width() as isize;
        assert!(!self.half_grid, "half-grid stencils are indexed by position");
        self.weights[(j + w) as usize]
    }

    /// Sum over mirror pairs from the outside in, so antisymmetric weights give exactly 0.
    pub fn sum(&self) -> f64 {
        let n = self.weights.len();
        let mut acc = 0.0;
        for k in 0..n / 2 {
            acc += self.weights[k] + self.weights[n - 1 - k];
        }
        if n % 2 == 1 {
            acc += self.weights[n / 2];
        }
        acc
    }

    /// Returns a copy with the `1/dx^q` factor folded in.
    pub fn scaled(&self, spacing: f64) -> StencilWeights {
        if self.includes_delta_scaling || self.q == 0 {
            let mut s = self.clone();
            s.includes_delta_scaling = true;
            return s;
        }
        let f = spacing.powi(-(self.q as i32));
        StencilWeights {
            weights: self.weights.iter().map(|w| w * f).collect(),
            includes_delta_scaling: true,
            ..self.clone()
        }
    }

    /// Plain-text table: one `offset weight` pair per line, 17 significant digits.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# q={} half_grid={} scaled={}", self.q, self.half_grid, self.includes_delta_scaling);
        for (o, w) in self.offsets.iter().zip(&self.weights) {
            let _ = writeln!(out, "{o:.1} {w:.16e}");
        }
        out
    }
}

/// Hermite kernel and its derivatives in grid units (spacing 1, sigma = r):
/// `d^q/dt^q [ (1/r) e^{-t^2/2r^2} sum_m (-1/4)^m H_{2m}(t/(sqrt2 r)) / (sqrt(2 pi) m!) ]`.
fn hermite_unit(t: f64, r: f64, order: usize, q: u32) -> Result<f64> {
    let s2 = std::f64::consts::SQRT_2 * r;
    let y = t / s2;
    let top = order + q as usize;
    // Upward recursion H_{k+1} = 2y H_k - 2k H_{k-1}.
    let mut h_prev = 1.0;
    let mut h = 2.0 * y;
    let mut hs = Vec::with_capacity(top + 1);
    hs.push(h_prev);
    hs.push(h);
    for k in 1..top {
        let next = 2.0 * y * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
        hs.push(h);
    }
    let mut coef = 1.0 / (2.0 * PI).sqrt();
    let mut sum = 0.0;
    for m in 0..=order / 2 {
        sum += coef * hs[2 * m + q as usize];
        coef *= -0.25 / (m as f64 + 1.0);
    }
    // d/dy [e^{-y^2} H_k(y)] = -e^{-y^2} H_{k+1}(y).
    let sign = if q % 2 == 1 { -1.0 } else { 1.0 };
    let v = sign * (-y * y).exp() * sum / r / s2.powi(q as i32);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CforError::NonFinite { x: t })
    }
}

/// Regularized Shannon kernel `sinc(t) e^{-t^2/2r^2}` and its derivatives in grid units.
fn rsk_unit(t: f64, r: f64, q: u32) -> Result<f64> {
    let a = 1.0 / (r * r);
    let g = (-0.5 * a * t * t).exp();
    let g1 = -a * t * g;
    let g2 = (a * a * t * t - a) * g;
    let pt = PI * t;
    let (s0, s1, s2) = if pt.abs() < 1e-3 {
        let p2 = PI * PI;
        (
            1.0 - pt * pt / 6.0 + pt.powi(4) / 120.0,
            -p2 * t / 3.0 + p2 * p2 * t.powi(3) / 30.0,
            -p2 / 3.0 + p2 * p2 * t * t / 10.0,
        )
    } else {
        let (sn, cs) = pt.sin_cos();
        (
            sn / pt,
            cs / t - sn / (PI * t * t),
            -PI * sn / t - 2.0 * cs / (t * t) + 2.0 * sn / (PI * t.powi(3)),
        )
    };
    let v = match q {
        0 => s0 * g,
        1 => s1 * g + s0 * g1,
        2 => s2 * g + 2.0 * s1 * g1 + s0 * g2,
        other => return Err(CforError::UnsupportedOrder(other)),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CforError::NonFinite { x: t })
    }
}

/// Hermite DSC kernel value at physical offset `x`.
pub fn hermite_kernel_value(x: f64, spec: &KernelSpec) -> Result<f64> {
    hermite_kernel_derivative(x, spec, 0)
}

/// `q`-th derivative of the Hermite kernel at physical offset `x`.
pub fn hermite_kernel_derivative(x: f64, spec: &KernelSpec, q: u32) -> Result<f64> {
    check_family(spec, KernelFamily::Hermite)?;
    if q > 2 {
        return Err(CforError::UnsupportedOrder(q));
    }
    if !x.is_finite() {
        return Err(CforError::NonFinite { x });
    }
    let d = spec.spacing;
    Ok(hermite_unit(x / d, spec.r, spec.order, q)? / d.powi(q as i32 + 1))
}

/// Regularized Shannon kernel value at physical offset `x`.
pub fn rsk_kernel_value(x: f64, spec: &KernelSpec) -> Result<f64> {
    rsk_kernel_derivative(x, spec, 0)
}

/// `q`-th derivative of the regularized Shannon kernel at physical offset `x`.
pub fn rsk_kernel_derivative(x: f64, spec: &KernelSpec, q: u32) -> Result<f64> {
    check_family(spec, KernelFamily::Rsk)?;
    if q > 2 {
        return Err(CforError::UnsupportedOrder(q));
    }
    if !x.is_finite() {
        return Err(CforError::NonFinite { x });
    }
    let d = spec.spacing;
    Ok(rsk_unit(x / d, spec.r, q)? / d.powi(q as i32))
}

fn check_family(spec: &KernelSpec, want: KernelFamily) -> Result<()> {
    spec.validate()?;
    if spec.family != want {
        return Err(CforError::InvalidKernel(format!(
            "expected a {want} kernel spec, got {}",
            spec.family
        )));
    }
    Ok(())
}

/// Kernel derivative in grid units, as used for stencil weights.
fn unit_weight(spec: &KernelSpec, t: f64, q: u32) -> Result<f64> {
    match spec.family {
        KernelFamily::Hermite => hermite_unit(t, spec.r, spec.order, q),
        KernelFamily::Rsk => rsk_unit(t, spec.r, q),
    }
}

/// On-grid stencil for the `q`-th derivative: `w_j = delta^{(q)}(-j)` in grid
/// units, symmetrized to exact parity.
pub fn stencil(spec: &KernelSpec, q: u32) -> Result<StencilWeights> {
    spec.validate()?;
    if q > 2 {
        return Err(CforError::UnsupportedOrder(q));
    }
    let w = spec.half_width as isize;
    let raw = (-w..=w)
        .map(|j| unit_weight(spec, -(j as f64), q))
        .collect::<Result<Vec<f64>>>()?;
    let parity = if q % 2 == 1 { -1.0 } else { 1.0 };
    let n = raw.len();
    let mut weights = vec![0.0; n];
    let mut max_asymmetry: f64 = 0.0;
    for i in 0..n {
        let mirror = raw[n - 1 - i];
        max_asymmetry = max_asymmetry.max((raw[i] - parity * mirror).abs());
        weights[i] = 0.5 * (raw[i] + parity * mirror);
    }
    if q % 2 == 1 {
        weights[spec.half_width] = 0.0;
    }
    // Make antisymmetry bit-exact after rounding in the average.
    for i in 0..spec.half_width {
        weights[n - 1 - i] = parity * weights[i];
    }
    Ok(StencilWeights {
        q,
        offsets: (-w..=w).map(|j| j as f64).collect(),
        weights,
        half_grid: false,
        includes_delta_scaling: false,
        max_asymmetry,
    })
}

/// Half-grid interpolation stencil at offsets `(j + 1/2)`, `j = -W..W-1`,
/// rescaled to unit sum and mirrored exactly about the midpoint.
pub fn halfgrid_stencil(spec: &KernelSpec) -> Result<StencilWeights> {
    spec.validate()?;
    let w = spec.half_width as isize;
    let offsets: Vec<f64> = (-w..w).map(|j| j as f64 + 0.5).collect();
    let raw = offsets
        .iter()
        .map(|&o| unit_weight(spec, -o, 0))
        .collect::<Result<Vec<f64>>>()?;
    let n = raw.len();
    let mut weights: Vec<f64> = (0..n).map(|i| 0.5 * (raw[i] + raw[n - 1 - i])).collect();
    for i in 0..n / 2 {
        weights[n - 1 - i] = weights[i];
    }
    let sum: f64 = weights.iter().sum();
    if !((sum - 1.0).abs() < 0.5) {
        return Err(CforError::InvalidKernel(format!(
            "half-grid kernel samples sum to {sum:e}; r = {} is too small for a usable low-pass",
            spec.r
        )));
    }
    for x in &mut weights {
        *x /= sum;
    }
    Ok(StencilWeights {
        q: 0,
        offsets,
        weights,
        half_grid: true,
        includes_delta_scaling: true,
        max_asymmetry: (sum - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_center_value_matches_extended_precision() {
        // 50-digit mpmath summation with explicit H_{2m} and m!.
        let v = hermite_kernel_value(0.0, &KernelSpec::hermite(3.05)).unwrap();
        assert!((v - 0.987_336_503_555_761_4).abs() < 1e-14, "{v}");
    }

    #[test]
    fn hermite_values_and_derivatives_match_extended_precision() {
        let spec = KernelSpec::hermite(3.05);
        let cases = [
            (0.5, 0, 0.632_243_418_333_574_4),
            (1.0, 0, 0.012_373_443_154_644_403),
            (1.5, 0, -0.199_427_058_499_132_42),
            (3.0, 0, 0.010_272_911_799_601_651),
            (7.25, 0, -0.004_549_417_894_944_923_4),
            (1.0, 1, -0.973_353_782_654_278_6),
            (2.5, 1, -0.023_265_190_359_692_334),
            (0.0, 2, -3.219_479_416_772_348),
            (1.0, 2, 1.930_300_196_921_740_4),
        ];
        for (x, q, want) in cases {
            let got = hermite_kernel_derivative(x, &spec, q).unwrap();
            assert!((got - want).abs() < 1e-13 * want.abs().max(1.0), "x={x} q={q}: {got} vs {want}");
        }
    }

    #[test]
    fn rsk_values_and_derivatives_match_extended_precision() {
        let spec = KernelSpec::rsk(7.5);
        let cases = [
            (0.5, 0, 0.635_206_632_499_268_3),
            (1.0, 1, -0.991_150_500_488_284_9),
            (0.3, 1, -0.905_881_234_878_788_7),
            (0.0, 2, -3.307_645_911_474_230_7),
            (2.0, 2, -0.516_848_127_527_362_2),
            (0.7, 2, 0.296_030_961_125_682_55),
        ];
        for (x, q, want) in cases {
            let got = rsk_kernel_derivative(x, &spec, q).unwrap();
            assert!((got - want).abs() < 1e-12, "x={x} q={q}: {got} vs {want}");
        }
    }

    #[test]
    fn spacing_scales_kernel() {
        let d = 0.1;
        let unit = hermite_kernel_derivative(0.7, &KernelSpec::hermite(3.05), 1).unwrap();
        let scaled = hermite_kernel_derivative(0.07, &KernelSpec::hermite(3.05).with_spacing(d), 1).unwrap();
        assert!((scaled - unit / (d * d)).abs() < 1e-9 * scaled.abs());
    }

    #[test]
    fn rsk_is_interpolating() {
        let spec = KernelSpec::rsk(3.2);
        assert_eq!(rsk_kernel_value(0.0, &spec).unwrap(), 1.0);
        for m in 1..10 {
            assert!(rsk_kernel_value(m as f64, &spec).unwrap().abs() < 1e-15);
        }
        let s = stencil(&spec, 0).unwrap();
        assert_eq!(s.at(0), 1.0);
        assert!(s.weights.iter().enumerate().all(|(i, w)| i == 32 || w.abs() < 1e-15));
    }

    #[test]
    fn hermite_discrete_unit_sum() {
        let spec = KernelSpec::hermite(3.05);
        let s: f64 = (-32..=32).map(|j| hermite_kernel_value(j as f64, &spec).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-10, "{s}");
    }

    #[test]
    fn hermite_is_only_nearly_interpolating() {
        // Frozen from the extended-precision evaluation: |w_0 - 1| = 1.27e-2.
        let s = stencil(&KernelSpec::hermite(3.05), 0).unwrap();
        assert!((s.at(0) - 1.0).abs() <= 1.3e-2);
        let off = (1..=32).map(|j| s.at(j).abs()).fold(0.0, f64::max);
        assert!(off <= 1.3e-2, "{off}");
    }

    #[test]
    fn first_derivative_stencil_parity() {
        for spec in [KernelSpec::hermite(3.05), KernelSpec::rsk(5.4)] {
            let s = stencil(&spec, 1).unwrap();
            assert_eq!(s.at(0), 0.0);
            for j in 1..=32 {
                assert_eq!(s.at(j), -s.at(-j));
            }
            assert_eq!(s.sum(), 0.0);
            let two = stencil(&spec, 2).unwrap();
            for j in 1..=32 {
                assert_eq!(two.at(j), two.at(-j));
            }
        }
    }

    #[test]
    fn first_derivative_exact_on_linear() {
        let s = stencil(&KernelSpec::hermite(3.05), 1).unwrap();
        let d = 0.37;
        let x0 = 1.9;
        let est: f64 = (-32..=32).map(|j| s.at(j) * (x0 + j as f64 * d)).sum::<f64>() / d;
        assert!((est - 1.0).abs() < 1e-12, "{est}");
    }

    #[test]
    fn halfgrid_mirror_and_unit_sum() {
        let s = halfgrid_stencil(&KernelSpec::hermite(2.55)).unwrap();
        assert_eq!(s.len(), 64);
        assert!((s.sum() - 1.0).abs() < 1e-15);
        for i in 0..32 {
            assert_eq!(s.weights[i], s.weights[63 - i]);
        }
    }

    #[test]
    fn halfgrid_prediction_of_cosine() {
        let p = halfgrid_stencil(&KernelSpec::hermite(3.05)).unwrap();
        let n = 100;
        let f: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let mut m = 0.0;
            for (o, w) in p.offsets.iter().zip(&p.weights) {
                let idx = (k as isize + (o + 0.5) as isize).rem_euclid(n as isize) as usize;
                m += w * f[idx];
            }
            let exact = (2.0 * PI * (k as f64 + 0.5) / n as f64).cos();
            worst = worst.max((m - exact).abs());
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(stencil(&KernelSpec::hermite(3.05), 3).is_err());
        assert!(KernelSpec::hermite(3.05).with_order(7).validate().is_err());
        assert!(KernelSpec::hermite(-1.0).validate().is_err());
        assert!(KernelSpec::hermite(3.05).with_half_width(0).validate().is_err());
        assert!(hermite_kernel_value(0.0, &KernelSpec::rsk(3.0)).is_err());
        assert!(halfgrid_stencil(&KernelSpec::hermite(1.5)).is_err());
    }

    #[test]
    fn table_export_has_one_row_per_weight() {
        let s = stencil(&KernelSpec::hermite(3.05), 1).unwrap();
        let t = s.to_table();
        assert_eq!(t.lines().count(), 66);
    }
}
