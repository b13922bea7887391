//! Left multiplication on the normalized Peter-Weyl basis `ξ^l_{r,s} = t^l_{r,s}/‖t^l_{r,s}‖`.
//!
//! A generator `g = t^{1/2}_{i,j}` acts by
//! `g ξ^l_{r,s} = Σ_{l' = l ± 1/2} c ξ^{l'}_{r+i,s+j}` with
//! `c = ± q^{E/2} sqrt(f_r f_s / ([2l+1][2l'+1]))`, where `f_r = [l + 2ir + 1]` when raising the
//! spin, `f_r = [l - 2ir]` when lowering it (likewise `f_s` with `j`), and
//! `E = r + s + (j - i) ∓ (i + j)(2l + 1)`. The sign is negative only when lowering with `i ≠ j`.
//! These coefficients are checked against the symbolic engine in the tests below.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraElement, Monomial};

/// Basis label `(2l, 2r, 2s)`.
pub type Label = (i64, i64, i64);

/// Finitely supported vector in the normalized basis.
pub type SparseVec = BTreeMap<Label, f64>;

/// `ln [x]_q` for `x > 0`, stable for large `x`.
pub fn ln_qnum(x: f64, q: f64) -> f64 {
    let lq = q.ln();
    (1.0 - x) * lq + (-(q.powf(2.0 * x))).ln_1p() - (-(q * q)).ln_1p()
}

/// `[x]_q` for real `x`.
pub fn qnum_f64(x: f64, q: f64) -> f64 {
    (q.powf(-x) - q.powf(x)) / (1.0 / q - q)
}

/// Doubled row and column shifts of a generator.
fn generator_shift(g: Monomial) -> (i64, i64) {
    match g {
        Monomial::A => (-1, -1),
        Monomial::B => (-1, 1),
        Monomial::C => (1, -1),
        Monomial::D => (1, 1),
        _ => panic!("{g} is not a generator"),
    }
}

/// Coefficient of `ξ^{l'}` in `g ξ^l_{r,s}` for `l' = l + dl2/2`; zero if the target is absent.
pub fn generator_coeff(g: Monomial, (l2, r2, s2): Label, dl2: i64, q: f64) -> f64 {
    let (i2, j2) = generator_shift(g);
    let lp2 = l2 + dl2;
    if lp2 < 0 {
        return 0.0;
    }
    let (l, r, s) = (l2 as f64 / 2.0, r2 as f64 / 2.0, s2 as f64 / 2.0);
    let (i, j) = (i2 as f64 / 2.0, j2 as f64 / 2.0);
    let raising = dl2 > 0;
    let (fr, fs) = if raising {
        (l + 2.0 * i * r + 1.0, l + 2.0 * j * s + 1.0)
    } else {
        (l - 2.0 * i * r, l - 2.0 * j * s)
    };
    if fr <= 0.5 || fs <= 0.5 {
        return 0.0;
    }
    let sigma = if raising { 1.0 } else { -1.0 };
    let e = r + s + (j - i) - sigma * (i + j) * (2.0 * l + 1.0);
    let lp = lp2 as f64 / 2.0;
    let ln_c = 0.5
        * (e * q.ln() + ln_qnum(fr, q) + ln_qnum(fs, q)
            - ln_qnum(2.0 * l + 1.0, q)
            - ln_qnum(2.0 * lp + 1.0, q));
    let sign = if !raising && i2 != j2 { -1.0 } else { 1.0 };
    sign * ln_c.exp()
}

/// `g v` for a generator `g`.
pub fn apply_generator(g: Monomial, v: &SparseVec, q: f64) -> SparseVec {
    let (i2, j2) = generator_shift(g);
    let mut out = SparseVec::new();
    for (&(l2, r2, s2), &x) in v {
        for dl2 in [1, -1] {
            let c = generator_coeff(g, (l2, r2, s2), dl2, q);
            if c != 0.0 {
                *out.entry((l2 + dl2, r2 + i2, s2 + j2)).or_insert(0.0) += c * x;
            }
        }
    }
    out
}

/// `m v` for a normal-form monomial, applying the rightmost letter first.
pub fn apply_monomial(m: Monomial, v: &SparseVec, q: f64) -> SparseVec {
    let mut cur = v.clone();
    let letters = [
        (Monomial::D, m.d),
        (Monomial::C, m.c),
        (Monomial::B, m.b),
        (Monomial::A, m.a),
    ];
    for (g, e) in letters {
        for _ in 0..e {
            cur = apply_generator(g, &cur, q);
        }
    }
    cur
}

/// `β v`, with the coefficients of `β` evaluated at `q` and additionally scaled by `scale`.
pub fn apply_element(beta: &AlgebraElement, v: &SparseVec, q: f64, scale: f64) -> SparseVec {
    let mut out = SparseVec::new();
    for (m, c) in beta.terms() {
        let c = c.eval_f64(q) * scale;
        for (k, x) in apply_monomial(*m, v, q) {
            *out.entry(k).or_insert(0.0) += c * x;
        }
    }
    out.retain(|_, x| *x != 0.0);
    out
}

pub fn unit(label: Label) -> SparseVec {
    SparseVec::from([(label, 1.0)])
}

pub fn dot(u: &SparseVec, v: &SparseVec) -> f64 {
    let (small, big) = if u.len() <= v.len() { (u, v) } else { (v, u) };
    small
        .iter()
        .filter_map(|(k, x)| big.get(k).map(|y| x * y))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::el;
    use crate::peterweyl::{pw_element, PWIndex};
    use crate::scalars::HalfInt;

    fn check_against_symbolic(beta: &AlgebraElement, l_max: i64, q: f64) {
        let all = PWIndex::all_up_to(HalfInt::from_twice(l_max));
        for from in &all {
            let t = pw_element(*from).unwrap();
            let prod = beta.mul_ref(&t.raw);
            let grades = prod.bigrades();
            let v = apply_element(
                beta,
                &unit((from.l.twice(), from.r.twice(), from.s.twice())),
                q,
                1.0,
            );
            for to in &all {
                let got = v
                    .get(&(to.l.twice(), to.r.twice(), to.s.twice()))
                    .copied()
                    .unwrap_or(0.0);
                let want = if grades.contains(&to.bigrade()) {
                    // ⟨ξ', β ξ⟩ = h(t'* β t)/(‖t'‖ ‖t‖)
                    let tp = pw_element(*to).unwrap();
                    let h = tp
                        .raw
                        .star()
                        .mul_ref(&prod.component(to.bigrade().0, to.bigrade().1))
                        .haar();
                    let pre = (t.prefactor_sq.eval_f64(q) * tp.prefactor_sq.eval_f64(q)).sqrt();
                    h.eval_f64(q) * pre / (t.norm_sq.eval_f64(q) * tp.norm_sq.eval_f64(q)).sqrt()
                } else {
                    0.0
                };
                assert!(
                    (got - want).abs() < 1e-12,
                    "{beta}: {from} -> {to}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn generators_match_symbolic_products() {
        for q in [0.5, 0.3, 0.85] {
            for g in ["a", "b", "c", "d"] {
                check_against_symbolic(&el(g), 5, q);
            }
        }
    }

    #[test]
    fn words_match_symbolic_products() {
        for beta in ["q^-1 a b", "-c d", "b c", "a^2 b c - q d^2 + 3"] {
            check_against_symbolic(&el(beta), 4, 0.6);
        }
    }

    #[test]
    fn star_is_adjoint() {
        let q = 0.4;
        let x = el("a b + q c");
        let xs = x.star();
        let u = unit((3, 1, -1));
        let w = unit((4, 0, 0));
        let lhs = dot(&w, &apply_element(&x, &u, q, 1.0));
        let rhs = dot(&apply_element(&xs, &w, q, 1.0), &u);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn stable_at_high_spin() {
        let q = 0.3;
        let v = apply_element(&el("a d"), &unit((800, -400, 1)), q, 1.0);
        assert!(v.values().all(|x| x.is_finite()));
        // ad = 1 + q bc acts as a contraction of norm at most 1 + q
        let n2: f64 = v.values().map(|x| x * x).sum();
        assert!(n2.sqrt() <= 1.0 + q + 1e-12);
    }
}
