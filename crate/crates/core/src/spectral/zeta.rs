//! Zeta residues `Res_{r=-1/2} Tr(Δ_R^{-1} ½(1+γ) β |D|^{-3-2r})` and the spectral dimension probe.
//!
//! Both series are sums over `m = l + 1/2 ≥ 1` of terms built from `[m]_q` and `[2m]_q`. With
//! `x = q^{2m}` and `κ = q^{-1} - q` one has `[m] = q^{-m}(1-x)/κ`, `[2m] = q^{-2m}(1-x²)/κ`, so
//! every term is `q^{me}` times a power series in `x`. Summing the geometric series in `m`
//! termwise gives closed-form tails.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::hilbert::check_q;
use super::ladder::{apply_element, ln_qnum, unit};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};

/// Sample points of the Laurent fit.
pub const RESIDUE_SAMPLES: [f64; 4] = [-0.3, -0.35, -0.4, -0.45];

const MAX_LEVELS: usize = 4000;

/// Coefficients of `(1 - x²)(1 + p x + x²)^α` up to `x^n`.
fn power_series(p: f64, alpha: f64, n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n + 1];
    h[0] = 1.0;
    for k in 0..n {
        let prev = if k > 0 { h[k - 1] } else { 0.0 };
        h[k + 1] = (p * (alpha - k as f64) * h[k] + (2.0 * alpha - k as f64 + 1.0) * prev)
            / (k as f64 + 1.0);
    }
    (0..=n)
        .map(|k| h[k] - if k >= 2 { h[k - 2] } else { 0.0 })
        .collect()
}

/// Smallest modulus of a root of `1 + p x + x²`.
fn radius(p: f64) -> f64 {
    let disc = p * p - 4.0;
    if disc <= 0.0 {
        1.0
    } else {
        ((p.abs() - disc.sqrt()) / 2.0).abs()
    }
}

/// `Σ_{m ≥ m0} q^{me} (1-x²)(1 + p x + x²)^α` with `x = q^{2m}`, requiring `e > 0`.
fn geometric_tail(q: f64, e: f64, p: f64, alpha: f64, m0: usize) -> f64 {
    let x0 = q.powi(2 * m0 as i32);
    debug_assert!(x0 < radius(p));
    let mut n = 16;
    loop {
        let a = power_series(p, alpha, n);
        let mut sum = 0.0;
        let mut last = 0.0;
        for (k, ak) in a.iter().enumerate() {
            let ex = e + 2.0 * k as f64;
            last = ak * q.powf(m0 as f64 * ex) / (1.0 - q.powf(ex));
            sum += last;
        }
        if last.abs() <= 1e-18 * sum.abs().max(1e-300) || n >= 4096 {
            return sum;
        }
        n *= 2;
    }
}

/// `(1/[2m]) Σ_r q^{-2r} ⟨ξ^l_{r,1/2}, β ξ^l_{r,1/2}⟩` at `l = m - 1/2`, which tends to `ε(β)`.
fn normalized_weight(beta: &AlgebraElement, m: usize, q: f64) -> f64 {
    let l2 = 2 * m as i64 - 1;
    let mut acc = 0.0;
    for r2 in (-l2..=l2).step_by(2) {
        let label = (l2, r2, 1);
        let v = apply_element(beta, &unit(label), q, 1.0);
        if let Some(x) = v.get(&label) {
            // q^{-2r}/[2m] = κ q^{2(l-r)}/(q^{-1} - q^{4l+1}), bounded in l
            acc += x * q.powi((l2 - r2) as i32);
        }
    }
    let kappa = 1.0 / q - q;
    acc * kappa / (1.0 / q - q.powi(2 * l2 as i32 + 1))
}

/// Normalized weights `R_1, R_2, ...` until consecutive values differ by less than `tol`.
fn weights_until_stable(beta: &AlgebraElement, q: f64, tol: f64) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::new();
    for m in 1..=MAX_LEVELS {
        let w = normalized_weight(beta, m, q);
        let stable = out.last().map_or(false, |prev| (w - prev).abs() < tol) && m >= 8;
        out.push(w);
        if stable {
            return Ok(out);
        }
    }
    Err(Error::Numerical(format!(
        "diagonal weights of {beta} did not settle within {MAX_LEVELS} levels"
    )))
}

fn check_beta(beta: &AlgebraElement) -> Result<()> {
    if beta.in_podles() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{beta} is not in the Podleś sphere")))
    }
}

/// `Tr(Δ_R^{-1} ½(1+γ) β |D|^{-3-2r})` for `r > -1/2`.
pub fn zeta_series(beta: &AlgebraElement, r: f64, q: f64, tol: f64) -> Result<f64> {
    check_q(q)?;
    check_beta(beta)?;
    let weights = weights_until_stable(beta, q, tol)?;
    zeta_from_weights(&weights, r, q)
}

fn zeta_from_weights(weights: &[f64], r: f64, q: f64) -> Result<f64> {
    let e = 1.0 + 2.0 * r;
    if !(e > 0.0) {
        return Err(Error::Numerical(format!("the series diverges at r = {r}")));
    }
    let expo = -3.0 - 2.0 * r;
    let mut sum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let m = (i + 1) as f64;
        sum += w * (ln_qnum(2.0 * m, q) + expo * ln_qnum(m, q)).exp();
    }
    let kappa = 1.0 / q - q;
    let tail =
        kappa.powf(2.0 + 2.0 * r) * geometric_tail(q, e, -2.0, expo / 2.0, weights.len() + 1);
    Ok(sum + weights.last().copied().unwrap_or(0.0) * tail)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueFit {
    pub samples: Vec<(f64, f64)>,
    /// `c_{-1}` of `c_{-1}/u + c_0 + c_1 u + c_2 u²`, `u = r + ½`, through all samples.
    pub residue: f64,
    pub coefficients: [f64; 4],
    /// `c_{-1}` of the least-squares fit without the `u²` term, reported for comparison.
    pub residue_three_term: f64,
    pub levels: usize,
}

fn laurent_fit(samples: &[(f64, f64)], terms: usize) -> Result<Vec<f64>> {
    let a = DMatrix::from_fn(samples.len(), terms, |i, j| {
        let u = samples[i].0 + 0.5;
        u.powi(j as i32 - 1)
    });
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let c = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(c.iter().copied().collect())
}

/// Laurent fit of the series at [`RESIDUE_SAMPLES`]. The holomorphic part is curved enough on
/// the sample window that dropping the quadratic term biases `c_{-1}` by about `2·10^{-4}`.
pub fn zeta_residue_fit(beta: &AlgebraElement, q: f64, precision: f64) -> Result<ResidueFit> {
    check_q(q)?;
    check_beta(beta)?;
    let weights = weights_until_stable(beta, q, precision)?;
    let samples = RESIDUE_SAMPLES
        .iter()
        .map(|&r| Ok((r, zeta_from_weights(&weights, r, q)?)))
        .collect::<Result<Vec<_>>>()?;
    let c = laurent_fit(&samples, 4)?;
    let c3 = laurent_fit(&samples, 3)?;
    Ok(ResidueFit {
        samples,
        residue: c[0],
        coefficients: [c[0], c[1], c[2], c[3]],
        residue_three_term: c3[0],
        levels: weights.len(),
    })
}

pub fn zeta_residue(beta: &AlgebraElement, q: f64, precision: f64) -> Result<f64> {
    Ok(zeta_residue_fit(beta, q, precision)?.residue)
}

/// `(q^{-1} - q)/(2 ln q^{-1})`, the residue for `ε(β) = 1`.
pub fn expected_zeta_residue(q: f64) -> f64 {
    (1.0 / q - q) / (2.0 * (1.0 / q).ln())
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionProbe {
    pub s: f64,
    /// `(level cutoff Λ, partial sum up to Λ)`.
    pub partial_sums: Vec<(f64, f64)>,
    pub tail_estimate: f64,
    /// First cutoff at which the tail estimate drops below the tolerance.
    pub converged_at: Option<f64>,
    /// Limit from the termwise geometric summation, for `s > 2`.
    pub accelerated: Option<f64>,
    pub converges: bool,
    pub diverges: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub q: f64,
    pub tol: f64,
    pub probes: Vec<DimensionProbe>,
}

/// `2 [2m] (1 + [m]²)^{-s/2}`, the contribution of level `l = m - 1/2` to `Ψ_R((1+D²)^{-s/2})`.
pub fn dimension_term(m: f64, s: f64, q: f64) -> f64 {
    let ln_m = ln_qnum(m, q);
    // ln(1 + [m]²) without overflow
    let ln_1p = 2.0 * ln_m + (-2.0 * ln_m).exp().ln_1p();
    2.0 * (ln_qnum(2.0 * m, q) - 0.5 * s * ln_1p).exp()
}

/// `Σ_{m ≥ 1} 2 [2m] (1 + [m]²)^{-s/2}` by termwise geometric summation, for `s > 2`.
pub fn dimension_sum_accelerated(s: f64, q: f64) -> f64 {
    let kappa = 1.0 / q - q;
    let p = kappa * kappa - 2.0;
    let rad = radius(p);
    let mut m0 = 1;
    while q.powi(2 * m0 as i32) > rad / 4.0 {
        m0 += 1;
    }
    let head: f64 = (1..m0).map(|m| dimension_term(m as f64, s, q)).sum();
    head + 2.0 * kappa.powf(s - 1.0) * geometric_tail(q, s - 2.0, p, -s / 2.0, m0)
}

pub fn spectral_dimension_probe(q: f64, s_values: &[f64], tol: f64) -> Result<DimensionReport> {
    check_q(q)?;
    let probes = s_values.iter().map(|&s| probe_one(s, q, tol)).collect();
    Ok(DimensionReport { q, tol, probes })
}

fn probe_one(s: f64, q: f64, tol: f64) -> DimensionProbe {
    let mut partial_sums = Vec::new();
    let mut sum = 0.0;
    let mut prev_term = f64::NAN;
    let mut tail = f64::INFINITY;
    let mut checkpoint = 10;
    let mut converged_at = None;
    for m in 1..=MAX_LEVELS {
        let t = dimension_term(m as f64, s, q);
        sum += t;
        let rho = t / prev_term;
        if rho < 1.0 {
            tail = t * rho / (1.0 - rho);
        }
        prev_term = t;
        if m == checkpoint {
            partial_sums.push((m as f64 - 0.5, sum));
            checkpoint *= 2;
        }
        if s > 2.0 && tail < tol && m >= 10 && converged_at.is_none() {
            converged_at = Some(m as f64 - 0.5);
        }
        // keep going well past the tolerance so the final sum is usable as a limit
        if converged_at.is_some() && tail < 1e-15 * sum {
            partial_sums.push((m as f64 - 0.5, sum));
            break;
        }
        if !sum.is_finite() {
            partial_sums.push((m as f64 - 0.5, sum));
            break;
        }
    }
    let converges = converged_at.is_some();
    // unbounded monotone growth: increments between doubled cutoffs never shrink
    let sums: Vec<f64> = partial_sums.iter().map(|p| p.1).collect();
    let increments: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    let diverges = !converges
        && increments.len() >= 3
        && increments.iter().all(|d| *d > 0.0)
        && increments
            .windows(2)
            .all(|w| w[1] >= w[0] || !w[1].is_finite());
    DimensionProbe {
        s,
        partial_sums,
        tail_estimate: tail,
        converged_at,
        accelerated: (s > 2.0).then(|| dimension_sum_accelerated(s, q)),
        converges,
        diverges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::el;

    #[test]
    fn series_coefficients() {
        // (1 - x²)(1 - x)^{-2} = (1 + x)/(1 - x) = 1 + 2x + 2x² + ...
        let a = power_series(-2.0, -1.0, 5);
        assert_eq!(a, vec![1.0, 2.0, 2.0, 2.0, 2.0, 2.0]);
        // (1 - x²)(1 + x²)^1 = 1 - x⁴
        let b = power_series(0.0, 1.0, 6);
        assert_eq!(b, vec![1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn accelerated_matches_direct_sum() {
        for q in [0.3, 0.5, 0.8] {
            for s in [2.5, 3.0, 4.0] {
                let direct: f64 = (1..3000).map(|m| dimension_term(m as f64, s, q)).sum();
                let acc = dimension_sum_accelerated(s, q);
                assert!(
                    (direct - acc).abs() < 1e-10 * acc,
                    "q = {q}, s = {s}: {direct} vs {acc}"
                );
            }
        }
    }

    #[test]
    fn unit_series_matches_closed_form() {
        // with β = 1 the weights are exactly 1
        let q = 0.5;
        let r = 0.25;
        let direct: f64 = (1..2000)
            .map(|m| {
                let m = m as f64;
                (ln_qnum(2.0 * m, q) - (3.0 + 2.0 * r) * ln_qnum(m, q)).exp()
            })
            .sum();
        let z = zeta_series(&el("1"), r, q, 1e-14).unwrap();
        assert!((direct - z).abs() < 1e-12 * z);
    }

    #[test]
    fn residues() {
        let q = 0.5;
        let want = expected_zeta_residue(q);
        assert!((want - 1.0820).abs() < 1e-4);
        let one = zeta_residue(&el("1"), q, 1e-14).unwrap();
        assert!((one - want).abs() < 0.01 * want, "{one} vs {want}");
        for beta in ["b c", "b^2 c^2"] {
            let z = zeta_residue(&el(beta), q, 1e-14).unwrap();
            assert!(z.abs() < 1e-4, "{beta}: {z}");
        }
        let fit = zeta_residue_fit(&el("b c"), q, 1e-14).unwrap();
        assert!(fit.residue_three_term.abs() > fit.residue.abs());
    }

    #[test]
    fn probe_verdicts() {
        let rep = spectral_dimension_probe(0.5, &[2.2, 2.0, 3.0], 1e-8).unwrap();
        let [a, b, c] = &rep.probes[..] else { panic!() };
        assert!(a.converges && !a.diverges);
        assert!(b.diverges && !b.converges);
        assert!(c.converges);
        let last = c.partial_sums.last().unwrap().1;
        assert!((last - c.accelerated.unwrap()).abs() < 1e-10);
        assert!((a.partial_sums.last().unwrap().1 - a.accelerated.unwrap()).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_podles_input() {
        assert!(zeta_residue(&el("a"), 0.5, 1e-12).is_err());
        assert!(zeta_series(&el("1"), -0.5, 0.5, 1e-12).is_err());
    }
}
