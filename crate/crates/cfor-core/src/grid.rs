//! Periodic grid fields, compiled stencil operators and error norms.

use std::cell::RefCell;
use std::collections::HashMap;
use std::io::Write;

use crate::error::{CforError, Result};
use crate::kernels::{stencil, KernelFamily, KernelSpec, StencilWeights};

/// Smallest number of points along a periodic axis that the operators accept.
pub const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// A 1D or 2D periodic grid of scalars. Storage is row-major with `x` fastest:
/// value `(i, j)` lives at `data[j * nx + i]`. A 1D field has `ny == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: [f64; 2],
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros_1d(n: usize, dx: f64, x0: f64) -> Result<Self> {
        Self::zeros_2d(n, 1, dx, 1.0, [x0, 0.0])
    }

    pub fn zeros_2d(nx: usize, ny: usize, dx: f64, dy: f64, origin: [f64; 2]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(CforError::ShapeMismatch("field must have at least one point".into()));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(CforError::InvalidParameter(format!("grid spacing must be positive, got ({dx}, {dy})")));
        }
        Ok(Field {
            nx,
            ny,
            dx,
            dy,
            origin,
            data: vec![0.0; nx * ny],
        })
    }

    pub fn from_fn_1d(n: usize, dx: f64, x0: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut out = Self::zeros_1d(n, dx, x0)?;
        for i in 0..n {
            out.data[i] = f(out.x(i));
        }
        Ok(out)
    }

    pub fn from_fn_2d(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        origin: [f64; 2],
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut out = Self::zeros_2d(nx, ny, dx, dy, origin)?;
        for j in 0..ny {
            let y = out.y(j);
            for i in 0..nx {
                out.data[j * nx + i] = f(out.x(i), y);
            }
        }
        Ok(out)
    }

    /// Same geometry, new values.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        if data.len() != self.data.len() {
            return Err(CforError::ShapeMismatch(format!(
                "expected {} values, got {}",
                self.data.len(),
                data.len()
            )));
        }
        Ok(Field { data, ..self.clone() })
    }

    pub fn zeros_like(&self) -> Self {
        Field {
            data: vec![0.0; self.data.len()],
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_2d(&self) -> bool {
        self.ny > 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.origin[1] + j as f64 * self.dy
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
        }
    }

    pub fn points(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
        }
    }

    pub fn same_shape(&self, other: &Field) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Writes `x[,y],value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        if self.is_2d() {
            writeln!(w, "x,y,value")?;
            for j in 0..self.ny {
                for i in 0..self.nx {
                    writeln!(w, "{:.16e},{:.16e},{:.16e}", self.x(i), self.y(j), self.get(i, j))?;
                }
            }
        } else {
            writeln!(w, "x,value")?;
            for i in 0..self.nx {
                writeln!(w, "{:.16e},{:.16e}", self.x(i), self.data[i])?;
            }
        }
        Ok(())
    }
}

/// A stencil with integer offsets, ready to apply to periodic or padded lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledStencil {
    pub offsets: Vec<isize>,
    pub weights: Vec<f64>,
    reach: usize,
}

impl CompiledStencil {
    pub fn new(offsets: Vec<isize>, weights: Vec<f64>) -> Self {
        assert_eq!(offsets.len(), weights.len());
        let reach = offsets.iter().map(|o| o.unsigned_abs()).max().unwrap_or(0);
        CompiledStencil { offsets, weights, reach }
    }

    /// On-grid derivative stencil with `1/spacing^q` folded in.
    pub fn derivative(weights: &StencilWeights, spacing: f64) -> Result<Self> {
        if weights.half_grid {
            return Err(CforError::InvalidParameter("derivative needs an on-grid stencil".into()));
        }
        let scaled = weights.scaled(spacing);
        let w = weights.half_width() as isize;
        Ok(Self::new((-w..=w).collect(), scaled.weights))
    }

    /// Largest |offset|.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Periodic application along a line: `dst_i = sum_k w_k src_{(i + o_k) mod n}`.
    /// `ext` is scratch space. Reaches larger than the line wrap around more
    /// than once, which is the periodic extension of the same formula.
    pub fn apply_periodic(&self, src: &[f64], dst: &mut [f64], ext: &mut Vec<f64>) {
        let n = src.len();
        let r = self.reach;
        ext.clear();
        ext.extend((0..n + 2 * r).map(|t| src[(t + n * (r / n + 1) - r) % n]));
        self.apply_padded(ext, r, dst);
    }

    /// Application to a line padded with `pad >= reach` extra values on each side:
    /// `dst_i = sum_k w_k ext_{i + pad + o_k}` for `i < dst.len()`.
    pub fn apply_padded(&self, ext: &[f64], pad: usize, dst: &mut [f64]) {
        debug_assert!(pad >= self.reach);
        debug_assert!(ext.len() >= dst.len() + 2 * pad);
        dst.iter_mut().for_each(|d| *d = 0.0);
        for (&o, &w) in self.offsets.iter().zip(&self.weights) {
            let start = (pad as isize + o) as usize;
            let src = &ext[start..start + dst.len()];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }

    /// Periodic application along one axis of a field.
    pub fn apply_axis(&self, field: &Field, axis: Axis) -> Result<Field> {
        let mut out = field.zeros_like();
        self.apply_axis_into(&field.data, field.nx, field.ny, axis, &mut out.data)?;
        Ok(out)
    }

    /// Periodic application along one axis of raw row-major data.
    pub fn apply_axis_into(&self, src: &[f64], nx: usize, ny: usize, axis: Axis, dst: &mut [f64]) -> Result<()> {
        if src.len() != nx * ny || dst.len() != nx * ny {
            return Err(CforError::ShapeMismatch(format!(
                "buffer length {} / {} does not match {nx}x{ny}",
                src.len(),
                dst.len()
            )));
        }
        match axis {
            Axis::X => {
                check_points(nx)?;
                let mut ext = Vec::with_capacity(nx + 2 * self.reach);
                for (s, d) in src.chunks_exact(nx).zip(dst.chunks_exact_mut(nx)) {
                    self.apply_periodic(s, d, &mut ext);
                }
            }
            Axis::Y => {
                check_points(ny)?;
                dst.iter_mut().for_each(|d| *d = 0.0);
                let m = ny as isize;
                for j in 0..ny {
                    let out = &mut dst[j * nx..(j + 1) * nx];
                    for (&o, &w) in self.offsets.iter().zip(&self.weights) {
                        let jj = (j as isize + o).rem_euclid(m) as usize;
                        let row = &src[jj * nx..(jj + 1) * nx];
                        for (d, s) in out.iter_mut().zip(row) {
                            *d += w * s;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_points(n: usize) -> Result<()> {
    if n < MIN_POINTS {
        Err(CforError::GridTooSmall { n, min: MIN_POINTS })
    } else {
        Ok(())
    }
}

type StencilKey = (KernelFamily, usize, u64, usize, u32);

thread_local! {
    static STENCIL_CACHE: RefCell<HashMap<StencilKey, StencilWeights>> = RefCell::new(HashMap::new());
}

/// Stencil for `(spec, q)`, computed once per thread.
pub fn cached_stencil(spec: &KernelSpec, q: u32) -> Result<StencilWeights> {
    let key = (spec.family, spec.half_width, spec.r.to_bits(), spec.order, q);
    if let Some(s) = STENCIL_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(s);
    }
    let s = stencil(spec, q)?;
    STENCIL_CACHE.with(|c| c.borrow_mut().insert(key, s.clone()));
    Ok(s)
}

/// `q`-th derivative of a periodic field along `axis` with the DSC stencil of `spec`.
/// The field's own spacing is used; `spec.spacing` is ignored.
pub fn deriv(field: &Field, axis: Axis, q: u32, spec: &KernelSpec) -> Result<Field> {
    let w = cached_stencil(spec, q)?;
    crate::filters::apply_derivative(field, &w, axis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormConvention {
    /// Mean-normalized: L1 = sum|e|/M, L2 = sqrt(sum e^2 / M), Linf = max|e|.
    Standard,
    /// Sums over the closed (N+1)x(N+1) node set of a periodic grid, with node N
    /// identified with node 0: L1 = sum|e|/(N+1)^2, L2 = sqrt(sum e^2)/(N+1).
    VortexPaper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub convention: NormConvention,
}

/// Error norms of `numeric - exact`.
pub fn norms(numeric: &Field, exact: &Field, convention: NormConvention) -> Result<ErrorReport> {
    if !numeric.same_shape(exact) {
        return Err(CforError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            numeric.nx, numeric.ny, exact.nx, exact.ny
        )));
    }
    norms_raw(&numeric.data, &exact.data, numeric.nx, numeric.ny, convention)
}

pub fn norms_raw(a: &[f64], b: &[f64], nx: usize, ny: usize, convention: NormConvention) -> Result<ErrorReport> {
    if a.len() != b.len() || a.len() != nx * ny {
        return Err(CforError::ShapeMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    let linf = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let (l1, l2) = match convention {
        NormConvention::Standard => {
            let m = a.len() as f64;
            let (s1, s2) = a.iter().zip(b).fold((0.0, 0.0), |(s1, s2), (x, y)| {
                let e = (x - y).abs();
                (s1 + e, s2 + e * e)
            });
            (s1 / m, (s2 / m).sqrt())
        }
        NormConvention::VortexPaper => {
            let (mx, my) = (nx + 1, if ny > 1 { ny + 1 } else { 1 });
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for j in 0..my {
                for i in 0..mx {
                    let k = (j % ny) * nx + (i % nx);
                    let e = (a[k] - b[k]).abs();
                    s1 += e;
                    s2 += e * e;
                }
            }
            let side = (nx + 1) as f64;
            let count = (mx * my) as f64;
            (s1 / count, s2.sqrt() / side)
        }
    };
    Ok(ErrorReport { l1, l2, linf, convention })
}
