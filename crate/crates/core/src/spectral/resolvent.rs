//! Degree-zero resolvent cochain on truncations, from its integral definition.
//!
//! `φ^r_0(a_0) = 2 ∫_0^∞ Tr(Δ_R^{-1} γ (1/2πi) ∫_ℓ λ^{-1-r} a_0 R_s(λ) dλ) ds` with
//! `R_s(λ) = (λ - s² - D²)^{-1}` and `ℓ` the vertical line `Re λ = c`, traversed downwards, with
//! `0 < c < s² + μ`. On the eigenspace `D² = μ` the inner integral is `(s² + μ)^{-1-r}` and the
//! outer one `Γ(½)Γ(r+½)/Γ(r+1) μ^{-r-½}`; here both integrals are done by quadrature and the
//! result is compared with the Gamma closed form.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use quadrature::double_exponential::integrate;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::hilbert::check_q;
use super::ladder::{apply_element, qnum_f64, unit};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::scalars::HalfInt;

const INNER_TOL: f64 = 1e-13;
const OUTER_TOL: f64 = 1e-12;

/// `(1/2πi) ∫_ℓ λ^{-1-r} (λ - x)^{-1} dλ` along `Re λ = x/2`, downwards.
pub fn contour_integral(x: f64, r: f64) -> Result<f64> {
    let c = x / 2.0;
    // ∫ over the whole line is -(1/π) ∫_0^∞ Re f(c + it) dt by conjugate symmetry;
    // t = c τ/(1-τ) keeps the bulk of the integrand away from τ = 1
    let f = |tau: f64| {
        if tau >= 1.0 {
            return 0.0;
        }
        let t = c * tau / (1.0 - tau);
        let lam = Complex64::new(c, t);
        let v = lam.powf(-1.0 - r) / (lam - x);
        v.re * c / ((1.0 - tau) * (1.0 - tau))
    };
    let out = integrate(f, 0.0, 1.0, INNER_TOL * x.powf(-1.0 - r));
    if !(out.error_estimate <= 1e3 * INNER_TOL * x.powf(-1.0 - r)) || !out.integral.is_finite() {
        return Err(Error::Numerical(format!(
            "contour quadrature did not converge (x = {x}, r = {r}, error {:e})",
            out.error_estimate
        )));
    }
    Ok(-out.integral / PI)
}

/// `2 ∫_0^∞ (contour integral at s² + μ) ds`.
pub fn level_integral(mu: f64, r: f64) -> Result<f64> {
    let failure = RefCell::new(None);
    let root = mu.sqrt();
    let f = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let s = root * u / (1.0 - u);
        match contour_integral(s * s + mu, r) {
            Ok(v) => 2.0 * v * root / ((1.0 - u) * (1.0 - u)),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let scale = mu.powf(-r - 0.5);
    let out = integrate(f, 0.0, 1.0, OUTER_TOL * scale);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !(out.error_estimate <= 1e3 * OUTER_TOL * scale) {
        return Err(Error::Numerical(format!(
            "s-integral did not converge (μ = {mu}, r = {r}, error {:e})",
            out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// `Γ(½)Γ(r+½)/Γ(r+1)`.
pub fn gamma_ratio(r: f64) -> f64 {
    (ln_gamma(0.5) + ln_gamma(r + 0.5) - ln_gamma(r + 1.0)).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventSample {
    pub r: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub abs_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventReport {
    pub a0: String,
    pub q: f64,
    pub lambda_cutoff: HalfInt,
    /// `Σ_r q^{-2r} (⟨ξ_+, a_0 ξ_+⟩ - ⟨ξ_-, a_0 ξ_-⟩)` per level `l = 1/2, 3/2, ...`.
    pub level_weights: Vec<f64>,
    pub samples: Vec<ResolventSample>,
}

impl ResolventReport {
    pub fn max_rel_err(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.abs_err / s.closed_form.abs().max(1.0))
            .fold(0.0, f64::max)
    }
}

fn level_weights(a0: &AlgebraElement, lambda: HalfInt, q: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut l2 = 1;
    while l2 <= lambda.twice() {
        let mut w = 0.0;
        for r2 in (-l2..=l2).step_by(2) {
            for (s2, sign) in [(1, 1.0), (-1, -1.0)] {
                let label = (l2, r2, s2);
                let v = apply_element(a0, &unit(label), q, 1.0);
                w += sign * q.powi(-r2 as i32) * v.get(&label).copied().unwrap_or(0.0);
            }
        }
        out.push(w);
        l2 += 2;
    }
    out
}

pub fn resolvent_phi0_numeric(
    a0: &AlgebraElement,
    r_samples: &[f64],
    lambda: HalfInt,
    q: f64,
) -> Result<ResolventReport> {
    check_q(q)?;
    if !a0.in_podles() {
        return Err(Error::Domain(format!("{a0} is not in the Podleś sphere")));
    }
    let weights = level_weights(a0, lambda, q);
    let mut samples = Vec::new();
    for &r in r_samples {
        if !(r > -0.5) {
            return Err(Error::Domain(format!("r = {r} must exceed -1/2")));
        }
        let (mut numeric, mut closed) = (0.0, 0.0);
        for (i, w) in weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let mu = qnum_f64(i as f64 + 1.0, q).powi(2);
            numeric += w * level_integral(mu, r)?;
            closed += w * gamma_ratio(r) * mu.powf(-r - 0.5);
        }
        samples.push(ResolventSample {
            r,
            numeric,
            closed_form: closed,
            abs_err: (numeric - closed).abs(),
        });
    }
    Ok(ResolventReport {
        a0: a0.to_string(),
        q,
        lambda_cutoff: lambda,
        level_weights: weights,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::el;

    #[test]
    fn cauchy_formula_on_the_line() {
        for (x, r) in [(1.0, 1.0), (7.3, 2.0), (0.4, 0.25), (30.0, -0.2)] {
            let got = contour_integral(x, r).unwrap();
            let want = f64::powf(x, -1.0 - r);
            assert!(
                (got - want).abs() < 1e-10 * want,
                "x = {x}, r = {r}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn gamma_ratio_values() {
        // Γ(½)Γ(3/2)/Γ(2) = π/2, Γ(½)Γ(5/2)/Γ(3) = 3π/8
        assert!((gamma_ratio(1.0) - PI / 2.0).abs() < 1e-14);
        assert!((gamma_ratio(2.0) - 3.0 * PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn identity_pairs_to_zero() {
        let rep =
            resolvent_phi0_numeric(&el("1"), &[1.0, 2.0], HalfInt::from_twice(9), 0.5).unwrap();
        assert!(rep.level_weights.iter().all(|w| w.abs() < 1e-12));
        assert!(rep.samples.iter().all(|s| s.numeric.abs() < 1e-12));
    }

    #[test]
    fn bc_matches_the_gamma_closed_form() {
        let rep =
            resolvent_phi0_numeric(&el("b c"), &[1.0, 2.0], HalfInt::from_twice(9), 0.5).unwrap();
        assert!(rep.level_weights.iter().any(|w| w.abs() > 1e-3));
        assert!(rep.max_rel_err() < 1e-6, "{rep:?}");
    }

    #[test]
    fn r_dependence_follows_the_gamma_ratio() {
        // on D² = 1 the whole r-dependence is the Gamma factor
        let got = level_integral(1.0, 2.0).unwrap() / level_integral(1.0, 1.0).unwrap();
        assert!((got - gamma_ratio(2.0) / gamma_ratio(1.0)).abs() < 1e-9);
        let mu: f64 = 6.25;
        let got = level_integral(mu, 2.0).unwrap() / level_integral(mu, 1.0).unwrap();
        assert!((got - 0.75 / mu).abs() < 1e-9);
    }
}
