//! Frequency responses of DSC stencils and effective-band edges.
//!
//! Wavenumbers are in units of `1/dx`, so the Nyquist limit is `pi`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rustfft::num_complex::Complex64;

use crate::error::{CforError, Result};
use crate::kernels::StencilWeights;

/// Uniform samples on `[0, pi]` used by the band-edge scan.
pub const BAND_SCAN_SAMPLES: usize = 4096;
/// Band-edge tolerance tiers shown in the effective-band analysis.
pub const BAND_TIERS: [f64; 8] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3];

#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    pub omegas: Vec<f64>,
    pub values: Vec<Complex64>,
    pub q: u32,
    pub stencil: StencilWeights,
}

/// `R(w) = sum_j w_j e^{i w o_j}` with `o_j` the stencil offsets in grid units.
pub fn response_at(weights: &StencilWeights, omega: f64) -> Complex64 {
    weights
        .offsets
        .iter()
        .zip(&weights.weights)
        .map(|(&o, &w)| Complex64::from_polar(w, omega * o))
        .sum()
}

/// The response an exact operator of order `q` would have.
pub fn ideal_response(q: u32, omega: f64) -> Complex64 {
    match q {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, omega),
        _ => Complex64::new(-omega * omega, 0.0),
    }
}

/// Samples `R` at `samples` uniform wavenumbers on `[0, pi]`.
pub fn frequency_response(weights: &StencilWeights, samples: usize) -> Result<FrequencyResponse> {
    if samples < 2 {
        return Err(CforError::TooFewSamples(samples));
    }
    let omegas: Vec<f64> = (0..samples).map(|k| PI * k as f64 / (samples - 1) as f64).collect();
    let values = omegas.iter().map(|&w| response_at(weights, w)).collect();
    Ok(FrequencyResponse {
        omegas,
        values,
        q: weights.q,
        stencil: weights.clone(),
    })
}

impl FrequencyResponse {
    pub fn error_at(&self, omega: f64) -> f64 {
        (response_at(&self.stencil, omega) - ideal_response(self.q, omega)).norm()
    }

    /// `|R|` scaled to unit maximum, for plotting only.
    pub fn normalized_magnitude(&self) -> Vec<f64> {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
        self.values.iter().map(|v| v.norm() * scale).collect()
    }

    /// CSV with columns `omega,abs,re,im,ideal,abs_err`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,abs,re,im,ideal,abs_err\n");
        for (&w, v) in self.omegas.iter().zip(&self.values) {
            let ideal = ideal_response(self.q, w);
            let ideal_val = if self.q == 1 { ideal.im } else { ideal.re };
            let _ = writeln!(
                s,
                "{w:.16e},{:.16e},{:.16e},{:.16e},{ideal_val:.16e},{:.16e}",
                v.norm(),
                v.re,
                v.im,
                (v - ideal).norm()
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdge {
    pub omega: f64,
    /// False when the tolerance already fails at `omega = 0`.
    pub bracketed: bool,
}

/// Largest `w*` with `|R(w) - ideal(w)| <= tol` on all of `[0, w*]`: first
/// sample that fails, refined by bisection between it and its predecessor.
pub fn effective_band(resp: &FrequencyResponse, tol: f64) -> BandEdge {
    let scan = frequency_response(&resp.stencil, BAND_SCAN_SAMPLES).expect("scan has enough samples");
    let fails = |k: usize| (scan.values[k] - ideal_response(resp.q, scan.omegas[k])).norm() > tol;
    let Some(first) = (0..scan.omegas.len()).find(|&k| fails(k)) else {
        return BandEdge { omega: PI, bracketed: true };
    };
    if first == 0 {
        return BandEdge { omega: 0.0, bracketed: false };
    }
    let (mut lo, mut hi) = (scan.omegas[first - 1], scan.omegas[first]);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if resp.error_at(mid) > tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    BandEdge { omega: lo, bracketed: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierVerdict {
    /// The whole spectral support lies inside the band.
    Inside,
    /// The peak is inside but the tail reaches beyond the band edge.
    TailTruncated,
    /// The peak itself is outside the band.
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub peak: f64,
    pub support_edge: f64,
    /// `(tolerance, band edge, margin = edge - support_edge, verdict)` per tier.
    pub tiers: Vec<(f64, f64, f64, TierVerdict)>,
}

impl FeasibilityReport {
    /// Tightest tier whose band contains the whole signal support.
    pub fn best_tier(&self) -> Option<f64> {
        self.tiers
            .iter()
            .filter(|t| t.3 == TierVerdict::Inside)
            .map(|t| t.0)
            .fold(None, |b, t| Some(b.map_or(t, |b: f64| b.min(t))))
    }

    pub fn verdict(&self, tol: f64) -> Option<TierVerdict> {
        self.tiers.iter().find(|t| t.0 == tol).map(|t| t.3)
    }
}

/// Compares a signal's spectral extent `[.., support_edge]` with peak `peak`
/// against band edges `(tol, edge)`.
pub fn predict_case_feasibility(band_edges: &[(f64, f64)], peak: f64, support_edge: f64) -> FeasibilityReport {
    let tiers = band_edges
        .iter()
        .map(|&(tol, edge)| {
            let verdict = if support_edge <= edge {
                TierVerdict::Inside
            } else if peak <= edge {
                TierVerdict::TailTruncated
            } else {
                TierVerdict::Outside
            };
            (tol, edge, edge - support_edge, verdict)
        })
        .collect();
    FeasibilityReport {
        peak,
        support_edge,
        tiers,
    }
}

/// Band edges of `weights` at every tolerance in `tiers`.
pub fn band_edges(weights: &StencilWeights, tiers: &[f64]) -> Result<Vec<(f64, f64)>> {
    let resp = frequency_response(weights, 2)?;
    Ok(tiers.iter().map(|&t| (t, effective_band(&resp, t).omega)).collect())
}

/// Spectral peak and support edge (where the spectrum falls to `floor` of its
/// peak) of the packet `sin(2 pi k x) exp(-x^2/width^2)` on spacing `dx`, in units of `1/dx`.
pub fn wavepacket_spectrum(k: f64, width: f64, dx: f64, floor: f64) -> (f64, f64) {
    let peak = 2.0 * PI * k * dx;
    // Transform of exp(-x^2/s^2) is proportional to exp(-s^2 w^2 / 4).
    let half = 2.0 * (-floor.ln()).sqrt() / width * dx;
    (peak, peak + half)
}
