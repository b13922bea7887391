//! Weighted kernel index of `P_n (D ⊗ Id)^+ P_n` on truncations.
//!
//! The range of `P_n = T T*` in `C^{2|n|+1} ⊗ H_±` is parametrized by the isometry
//! `T x = (t_k x)_k`, `t_k = t^{|n|}_{|n|-k, n}`, acting on `H_{1/2-n}` resp. `H_{-1/2-n}`
//! (the spans of `ξ^l_{r, ±1/2 - n}`). In these coordinates the compressed operator is
//! `M = T_-^* (Id ⊗ D^+) T_+`, which is block diagonal in the row index `r`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::hilbert::check_q;
use super::ladder::{apply_element, qnum_f64, unit, Label, SparseVec};
use crate::error::{Error, Result};
use crate::ktheory::{projection_pn, Projection};
use crate::scalars::HalfInt;

/// Vector in `C^N ⊗ H`, keyed by `(k, label)`.
type ModuleVec = BTreeMap<(usize, Label), f64>;

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub n: HalfInt,
    pub q: f64,
    pub lambda_cutoff: HalfInt,
    pub tau: f64,
    pub value: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub kernel_dim_plus: usize,
    pub kernel_dim_minus: usize,
    pub discarded_edge: usize,
    /// Smallest non-kernel singular value over the largest kernel one.
    pub svd_gap: f64,
    pub min_nonkernel_singular: f64,
    /// Largest deviation of `T* T` from the identity on the sampled vectors.
    pub isometry_defect: f64,
}

struct Side {
    s2: i64,
    /// Labels `(2l, 2r, s2)` of the domain basis, grouped by `2r`.
    blocks: BTreeMap<i64, Vec<Label>>,
}

fn side(s2: i64, l_max2: i64) -> Side {
    let mut blocks: BTreeMap<i64, Vec<Label>> = BTreeMap::new();
    let mut l2 = s2.abs();
    while l2 <= l_max2 {
        for r2 in (-l2..=l2).step_by(2) {
            blocks.entry(r2).or_default().push((l2, r2, s2));
        }
        l2 += 2;
    }
    Side { s2, blocks }
}

fn apply_t(p: &Projection, x: Label, q: f64) -> ModuleVec {
    let mut out = ModuleVec::new();
    for (k, t) in p.column.iter().enumerate() {
        let pre = t.prefactor.eval_f64(q);
        for (label, v) in apply_element(&t.raw, &unit(x), q, pre) {
            out.insert((k, label), v);
        }
    }
    out
}

fn module_dot(u: &ModuleVec, v: &ModuleVec) -> f64 {
    u.iter()
        .filter_map(|(key, x)| v.get(key).map(|y| x * y))
        .sum()
}

/// `⟨T x, (Δ_R^{-1} ⊗ V_{n,-i}) T x⟩` for `T x` given componentwise.
fn weight(tx: &ModuleVec, q: f64) -> f64 {
    tx.iter()
        .map(|(&(k, (_, r2, _)), v)| q.powf(-2.0 * k as f64) * q.powf(-(r2 as f64)) * v * v)
        .sum()
}

fn combine(images: &[ModuleVec], coeffs: &[f64]) -> ModuleVec {
    let mut out = ModuleVec::new();
    for (img, c) in images.iter().zip(coeffs) {
        for (key, v) in img {
            *out.entry(*key).or_insert(0.0) += c * v;
        }
    }
    out
}

/// Right null space and singular values of `m` (`rows × cols`), via an SVD of the zero-padded
/// square matrix.
fn null_space(m: &DMatrix<f64>, tau: f64) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    let n = rows.max(cols);
    let mut padded = DMatrix::zeros(n, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut kernel = Vec::new();
    let (mut small, mut large) = (Vec::new(), Vec::new());
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv < tau {
            kernel.push(v_t.row(i).iter().copied().collect());
            small.push(sv);
        } else {
            large.push(sv);
        }
    }
    (kernel, small, large)
}

pub fn kernel_index(n: HalfInt, lambda: HalfInt, q: f64) -> Result<KernelReport> {
    kernel_index_with(n, lambda, q, 1e-8)
}

pub fn kernel_index_with(n: HalfInt, lambda: HalfInt, q: f64, tau: f64) -> Result<KernelReport> {
    check_q(q)?;
    let na = n.abs();
    if lambda < na + HalfInt::from_int(4) {
        return Err(Error::Domain(format!(
            "cutoff {lambda} must be at least |n| + 4 for n = {n}"
        )));
    }
    let p = projection_pn(n)?;
    // domain levels keep T x inside the truncated module
    let l_max2 = (lambda - na).twice();
    let plus = side(1 - n.twice(), l_max2);
    let minus = side(-1 - n.twice(), l_max2);
    let edge_from = l_max2 - 2;

    let r_keys: Vec<i64> = plus
        .blocks
        .keys()
        .chain(minus.blocks.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    struct BlockOut {
        n_plus: f64,
        n_minus: f64,
        dim_plus: usize,
        dim_minus: usize,
        discarded: usize,
        small: Vec<f64>,
        large: Vec<f64>,
        defect: f64,
    }

    let outs: Vec<BlockOut> = r_keys
        .par_iter()
        .map(|r2| {
            let xs = plus.blocks.get(r2).cloned().unwrap_or_default();
            let ys = minus.blocks.get(r2).cloned().unwrap_or_default();
            let tx: Vec<ModuleVec> = xs.iter().map(|x| apply_t(&p, *x, q)).collect();
            let ty: Vec<ModuleVec> = ys.iter().map(|y| apply_t(&p, *y, q)).collect();
            let mut defect: f64 = 0.0;
            for imgs in [&tx, &ty] {
                for (i, u) in imgs.iter().enumerate() {
                    for (j, v) in imgs.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        defect = defect.max((module_dot(u, v) - want).abs());
                    }
                }
            }
            // (Id ⊗ D^+) T x: ξ^l_{r,+} ↦ [l+½] ξ^l_{r,-}
            let dtx: Vec<ModuleVec> = tx
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|(&(k, (l2, r2, s2)), x)| {
                            debug_assert_eq!(s2, plus.s2 + n.twice());
                            ((k, (l2, r2, -1)), qnum_f64(l2 as f64 / 2.0 + 0.5, q) * x)
                        })
                        .collect()
                })
                .collect();
            let m = DMatrix::from_fn(ty.len(), tx.len(), |i, j| module_dot(&ty[i], &dtx[j]));
            let (ker_p, small_p, large_p) = null_space(&m, tau);
            let (ker_m, small_m, large_m) = null_space(&m.transpose(), tau);
            let mut out = BlockOut {
                n_plus: 0.0,
                n_minus: 0.0,
                dim_plus: 0,
                dim_minus: 0,
                discarded: 0,
                small: [small_p, small_m].concat(),
                large: [large_p, large_m].concat(),
                defect,
            };
            for (vecs, labels, images, acc, dim) in [
                (&ker_p, &xs, &tx, &mut out.n_plus, &mut out.dim_plus),
                (&ker_m, &ys, &ty, &mut out.n_minus, &mut out.dim_minus),
            ] {
                for v in vecs {
                    let edge_mass: f64 = labels
                        .iter()
                        .zip(v)
                        .filter(|(lab, _)| lab.0 >= edge_from)
                        .map(|(_, c)| c * c)
                        .sum();
                    if edge_mass > 1e-6 {
                        out.discarded += 1;
                        continue;
                    }
                    *acc += weight(&combine(images, v), q);
                    *dim += 1;
                }
            }
            out
        })
        .collect();

    let small_max = outs
        .iter()
        .flat_map(|o| o.small.iter().copied())
        .fold(0.0, f64::max);
    let large_min = outs
        .iter()
        .flat_map(|o| o.large.iter().copied())
        .fold(f64::INFINITY, f64::min);
    if large_min <= tau * 1e3 {
        return Err(Error::NoSpectralGap(format!(
            "smallest non-kernel singular value {large_min:e} is within 10^3 of the threshold {tau:e}; increase the cutoff"
        )));
    }
    let n_plus: f64 = outs.iter().map(|o| o.n_plus).sum();
    let n_minus: f64 = outs.iter().map(|o| o.n_minus).sum();
    Ok(KernelReport {
        n,
        q,
        lambda_cutoff: lambda,
        tau,
        value: n_plus - n_minus,
        n_plus,
        n_minus,
        kernel_dim_plus: outs.iter().map(|o| o.dim_plus).sum(),
        kernel_dim_minus: outs.iter().map(|o| o.dim_minus).sum(),
        discarded_edge: outs.iter().map(|o| o.discarded).sum(),
        svd_gap: if small_max > 0.0 {
            large_min / small_max
        } else {
            f64::INFINITY
        },
        min_nonkernel_singular: large_min,
        isometry_defect: outs.iter().map(|o| o.defect).fold(0.0, f64::max),
    })
}

/// The range vector `T x` for a domain label, exposed for consistency checks against `P_n`.
pub fn range_vector(p: &Projection, x: Label, q: f64) -> Vec<SparseVec> {
    let mut out = vec![SparseVec::new(); p.dim()];
    for ((k, label), v) in apply_t(p, x, q) {
        out[k].insert(label, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ktheory::expected_index;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn small_cases() {
        for (t, q) in [(1, 0.5), (0, 0.3), (2, 0.5), (-1, 0.5), (-2, 0.4)] {
            let n = h(t);
            let rep = kernel_index(n, n.abs() + HalfInt::from_int(5), q).unwrap();
            let want = expected_index(n).eval_f64(q);
            assert!(
                (rep.value - want).abs() < 1e-9,
                "n = {n}: {} vs {want}",
                rep.value
            );
            assert!(rep.isometry_defect < 1e-12);
            assert_eq!(
                rep.kernel_dim_plus + rep.kernel_dim_minus,
                n.abs().twice() as usize
            );
        }
    }

    #[test]
    fn range_vectors_are_fixed_by_the_projection() {
        let q = 0.5;
        let p = projection_pn(h(1)).unwrap();
        let tx = range_vector(&p, (2, 0, 0), q);
        for r in 0..p.dim() {
            let mut acc = SparseVec::new();
            for s in 0..p.dim() {
                let entry = p.matrix.get(r, s);
                for (m, c) in entry.terms() {
                    let beta = crate::algebra::AlgebraElement::monomial(*m);
                    for (k, v) in apply_element(&beta, &tx[s], q, c.eval_f64(q)) {
                        *acc.entry(k).or_insert(0.0) += v;
                    }
                }
            }
            for (k, v) in &tx[r] {
                assert!((acc.get(k).copied().unwrap_or(0.0) - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cutoff_precondition() {
        assert!(matches!(
            kernel_index(h(2), h(6), 0.5),
            Err(Error::Domain(_))
        ));
    }
}
