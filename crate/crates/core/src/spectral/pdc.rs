//! The remainder `M(z) = (|D|^{-z} dβ - dβ χ^z |D|^{-z}) |D|^{z+1}` of the twisted commutation of
//! `|D|^{-z}` with `dβ = [D, β]`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::hilbert::{left_mult, op_d, Component, TruncatedHilbert};
use super::ladder::qnum_f64;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::scalars::HalfInt;

/// Tolerated relative change of the interior norms under `Λ → Λ + 2`.
pub const MAX_DRIFT: f64 = 1e-2;

#[derive(Clone, Debug, Serialize)]
pub struct PdcSample {
    pub re: f64,
    pub im: f64,
    /// Operator norm of `M(z)` on the interior at cutoff `Λ`.
    pub norm: f64,
    /// The same at cutoff `Λ + 2`.
    pub norm_larger_cutoff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdcReport {
    pub beta: String,
    pub q: f64,
    pub lambda_cutoff: HalfInt,
    pub samples: Vec<PdcSample>,
    /// Least-squares fit `norm ≈ intercept + slope |Im z|`.
    pub intercept: f64,
    pub slope: f64,
    /// Added to the fit so that it bounds every sample.
    pub margin: f64,
    /// Largest relative change of a norm between `Λ` and `Λ + 2`.
    pub cutoff_drift: f64,
    pub passed: bool,
}

/// `‖M(z)‖` restricted to levels `l ≤ Λ - deg β`, where `dβ` is unaffected by the truncation.
pub fn pdc_norm(beta: &AlgebraElement, z: Complex64, basis: &Arc<TruncatedHilbert>) -> Result<f64> {
    let q = basis.q;
    let d = op_d(basis).matrix;
    let lb = left_mult(beta, basis)?.matrix;
    let db = &d * &lb - &lb * &d;
    let margin = HalfInt::from_int(beta.degree() as i64);
    let inner = basis.interior(margin);
    let abs_d: Vec<f64> = inner
        .iter()
        .map(|&i| qnum_f64(basis.basis[i].l.to_f64() + 0.5, q))
        .collect();
    let chi: Vec<f64> = inner
        .iter()
        .map(|&i| {
            if basis.basis[i].comp == Component::Plus {
                1.0 / q
            } else {
                q
            }
        })
        .collect();
    let pow = |x: f64, w: Complex64| (w * x.ln()).exp();
    let n = inner.len();
    let m = DMatrix::from_fn(n, n, |a, b| {
        let x = db[(inner[a], inner[b])];
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let bracket = pow(abs_d[a], -z) - pow(chi[b], z) * pow(abs_d[b], -z);
        bracket * pow(abs_d[b], z + 1.0) * x
    });
    let sv = m.singular_values();
    Ok(sv.iter().copied().fold(0.0, f64::max))
}

pub fn pdc_check(
    beta: &AlgebraElement,
    z_samples: &[Complex64],
    lambda: HalfInt,
    q: f64,
) -> Result<PdcReport> {
    if !beta.in_podles() {
        return Err(Error::Domain(format!("{beta} is not in the Podleś sphere")));
    }
    let basis = TruncatedHilbert::new(lambda, q)?;
    let larger = TruncatedHilbert::new(lambda + HalfInt::from_int(2), q)?;
    let samples = z_samples
        .iter()
        .map(|&z| {
            Ok(PdcSample {
                re: z.re,
                im: z.im,
                norm: pdc_norm(beta, z, &basis)?,
                norm_larger_cutoff: pdc_norm(beta, z, &larger)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (intercept, slope) = affine_fit(&samples);
    let margin = samples
        .iter()
        .map(|s| s.norm - (intercept + slope * s.im.abs()))
        .fold(0.0, f64::max)
        + 1e-12;
    let cutoff_drift = samples
        .iter()
        .map(|s| (s.norm_larger_cutoff - s.norm).abs() / s.norm.max(1e-300))
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    let passed = samples
        .iter()
        .all(|s| s.norm.is_finite() && s.norm_larger_cutoff.is_finite())
        && slope.is_finite()
        && intercept + margin > 0.0
        && cutoff_drift < MAX_DRIFT;
    Ok(PdcReport {
        beta: beta.to_string(),
        q,
        lambda_cutoff: lambda,
        samples,
        intercept,
        slope,
        margin,
        cutoff_drift,
        passed,
    })
}

fn affine_fit(samples: &[PdcSample]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.len() < 2 {
        return (samples.first().map_or(0.0, |s| s.norm), 0.0);
    }
    let mx = samples.iter().map(|s| s.im.abs()).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.norm).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.im.abs() - mx).powi(2)).sum();
    let sxy: f64 = samples
        .iter()
        .map(|s| (s.im.abs() - mx) * (s.norm - my))
        .sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}
