//! Equivariant projections `P_n`, circle representations `V_n` and their Chern characters.

use std::sync::Arc;

use crate::algebra::{AlgebraElement, Element};
use crate::cocycles::{index_pair, index_pair_ext, Chain3};
use crate::error::{Error, Result};
use crate::peterweyl::{PWElement, PWIndex, PeterWeyl};
use crate::scalars::{qnum, Coeff, ConstExt, HalfInt, QRat, RadScalar};

/// Square matrix with entries in the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOverAlgebra<C: Coeff> {
    pub dim: usize,
    /// Row-major.
    pub entries: Vec<Element<C>>,
}

impl<C: Coeff> MatrixOverAlgebra<C> {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Element<C>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for s in 0..dim {
                entries.push(f(r, s));
            }
        }
        MatrixOverAlgebra { dim, entries }
    }

    pub fn get(&self, r: usize, s: usize) -> &Element<C> {
        &self.entries[r * self.dim + s]
    }

    pub fn mul(&self, other: &Self) -> Self {
        MatrixOverAlgebra::from_fn(self.dim, |r, s| {
            let mut acc = Element::zero();
            for k in 0..self.dim {
                acc = &acc + &self.get(r, k).mul_ref(other.get(k, s));
            }
            acc
        })
    }

    pub fn star(&self) -> Self {
        MatrixOverAlgebra::from_fn(self.dim, |r, s| self.get(s, r).star())
    }

    pub fn with_entry(&self, r: usize, s: usize, x: Element<C>) -> Self {
        let mut m = self.clone();
        m.entries[r * self.dim + s] = x;
        m
    }
}

/// Circle action on `C^{2|n|+1}` with weights `λ_j = q^{-2j+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleRep {
    pub weights: Vec<QRat>,
}

impl CircleRep {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

pub fn rep_vn(n: HalfInt) -> CircleRep {
    let dim = n.abs().twice() as usize + 1;
    CircleRep {
        weights: (0..dim).map(|k| QRat::q_pow(-2 * k as i64)).collect(),
    }
}

/// `P_n = T T*` together with its column `T_k = t^{|n|}_{|n|-k, n}` (0-based `k`).
#[derive(Clone, Debug)]
pub struct Projection {
    pub n: HalfInt,
    pub column: Vec<Arc<PWElement>>,
    pub matrix: MatrixOverAlgebra<RadScalar>,
}

impl Projection {
    pub fn dim(&self) -> usize {
        self.column.len()
    }

    /// `raw_r raw_s*`; the entry is this times `prefactor_r prefactor_s`.
    fn raw_entry(&self, r: usize, s: usize) -> AlgebraElement {
        self.column[r].raw.mul_ref(&self.column[s].raw.star())
    }
}

/// `T* T = Σ_p t^{l*}_{p,n} t^l_{p,n}`, exact.
pub fn t_star_t(column: &[Arc<PWElement>]) -> AlgebraElement {
    let mut acc = AlgebraElement::zero();
    for t in column {
        acc = &acc + &t.raw.star().mul_ref(&t.raw).scale(&t.prefactor_sq);
    }
    acc
}

pub fn projection_pn_with(pw: &PeterWeyl, n: HalfInt) -> Result<Projection> {
    let l = n.abs();
    let column = (0..=l.twice())
        .map(|k| pw.element(PWIndex::new(l, l - HalfInt::from_int(k), n)?))
        .collect::<Result<Vec<_>>>()?;
    if !t_star_t(&column).as_scalar().is_some_and(|c| c.is_one()) {
        return Err(Error::Numerical(format!("T*T != 1 for P_{n}")));
    }
    let dim = column.len();
    let matrix = MatrixOverAlgebra::from_fn(dim, |r, s| {
        let p = &column[r].prefactor * &column[s].prefactor;
        column[r]
            .raw
            .mul_ref(&column[s].raw.star())
            .map_coeffs(|c| p.scale(c))
    });
    Ok(Projection { n, column, matrix })
}

pub fn projection_pn(n: HalfInt) -> Result<Projection> {
    projection_pn_with(PeterWeyl::global(), n)
}

/// Each entry `(r, s)` lies in `A[2(r-s), 0]`, so that `σ = ϑ^{-1}` scales it by `q^{2(s-r)}`.
pub fn equivariance_check<C: Coeff>(p: &MatrixOverAlgebra<C>, v: &CircleRep) -> bool {
    if p.dim != v.dim() {
        return false;
    }
    for r in 0..p.dim {
        for s in 0..p.dim {
            let want = (2 * (r as i64 - s as i64), 0);
            if p.get(r, s).bigrades().iter().any(|g| *g != want) {
                return false;
            }
        }
    }
    true
}

/// `Ch_0 = Σ_k (V_{-i})_{kk} (P)_{kk}`.
pub fn chern0(p: &Projection, v: &CircleRep) -> AlgebraElement {
    let mut acc = AlgebraElement::zero();
    for k in 0..p.dim() {
        let c = &v.weights[k] * &p.column[k].prefactor_sq;
        acc = &acc + &p.raw_entry(k, k).scale(&c);
    }
    acc
}

/// `Ch_2 = -2 Σ q^{-2k_0} (P_{k0k1} - ½δ) ⊗ P_{k1k2} ⊗ P_{k2k0}`, with the radical prefactors
/// collected into the rational coefficient of each term.
pub fn chern2(p: &Projection, v: &CircleRep) -> Chain3 {
    let dim = p.dim();
    let mut chain = Chain3::default();
    for k0 in 0..dim {
        for k1 in 0..dim {
            for k2 in 0..dim {
                let pre = &(&p.column[k0].prefactor_sq * &p.column[k1].prefactor_sq)
                    * &p.column[k2].prefactor_sq;
                let c = &(&v.weights[k0] * &pre) * &QRat::from_int(-2);
                let mut first = p.raw_entry(k0, k1);
                if k0 == k1 {
                    let half = QRat::ratio(1, 2)
                        .checked_div(&p.column[k0].prefactor_sq)
                        .expect("non-zero");
                    first = &first - &AlgebraElement::scalar(half);
                }
                chain.push(c, [first, p.raw_entry(k1, k2), p.raw_entry(k2, k0)]);
            }
        }
    }
    chain
}

/// `q^{-2|n|} [2n]_q`.
pub fn expected_index(n: HalfInt) -> QRat {
    &QRat::q_pow(-n.abs().twice()) * &qnum(n + n)
}

/// Exact pairing `φ_0(Ch_0) + φ_2(Ch_2)` for `P_n`.
pub fn index_symbolic(n: HalfInt) -> Result<QRat> {
    let p = projection_pn(n)?;
    let v = rep_vn(n);
    index_pair(&chern0(&p, &v), &chern2(&p, &v))
}

/// The same pairing before the `L`/`EG` cancellation is asserted.
pub fn index_symbolic_ext(n: HalfInt) -> Result<ConstExt> {
    let p = projection_pn(n)?;
    let v = rep_vn(n);
    index_pair_ext(&chern0(&p, &v), &chern2(&p, &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::el;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn small_projections() {
        let p0 = projection_pn(h(0)).unwrap();
        assert_eq!(p0.matrix.entries, vec![Element::one()]);
        let p = projection_pn(h(1)).unwrap();
        let want = ["d a", "-q d c", "b a", "-q b c"];
        for (e, w) in p.matrix.entries.iter().zip(want) {
            assert_eq!(e, &el(w).to_rad());
        }
        assert_eq!(rep_vn(h(1)).weights, vec![QRat::one(), QRat::q_pow(-2)]);
        assert_eq!(rep_vn(h(0)).weights, vec![QRat::one()]);
    }

    #[test]
    fn projections_are_selfadjoint_idempotents() {
        for t in -4..=4 {
            let p = projection_pn(h(t)).unwrap();
            assert_eq!(p.matrix.mul(&p.matrix), p.matrix, "P^2 for n = {t}/2");
            assert_eq!(p.matrix.star(), p.matrix, "P* for n = {t}/2");
            assert!(equivariance_check(&p.matrix, &rep_vn(h(t))));
        }
    }

    #[test]
    fn equivariance_detects_wrong_weight() {
        let p = projection_pn(h(1)).unwrap();
        let bad = p.matrix.with_entry(0, 1, el("a").to_rad());
        assert!(!equivariance_check(&bad, &rep_vn(h(1))));
    }

    #[test]
    fn chern_characters() {
        for t in -4..=4 {
            let n = h(t);
            let p = projection_pn(n).unwrap();
            let ch0 = chern0(&p, &rep_vn(n));
            let want = QRat::q_pow(n.twice() - n.abs().twice());
            assert_eq!(ch0, AlgebraElement::scalar(want), "n = {n}");
        }
        let p = projection_pn(h(1)).unwrap();
        assert_eq!(chern2(&p, &rep_vn(h(1))).len(), 8);
        let p0 = projection_pn(h(0)).unwrap();
        let ch = chern2(&p0, &rep_vn(h(0)));
        assert_eq!(ch.len(), 1);
        assert_eq!(ch.terms[0].1[0], el("1/2"));
    }

    #[test]
    fn index_for_small_n() {
        assert_eq!(index_symbolic(h(1)).unwrap(), QRat::q_pow(-1));
        assert!(index_symbolic(h(0)).unwrap().is_zero());
        assert_eq!(
            index_symbolic(h(-2)).unwrap(),
            -(&QRat::q_pow(-3) + &QRat::q_pow(-1))
        );
    }
}
