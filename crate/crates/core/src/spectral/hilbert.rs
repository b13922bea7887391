//! Truncations of `H = H_1 ⊕ H_{-1}` and the operators `D`, `Δ_R`, `γ`, `χ` and left multiplication.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::ladder::{apply_element, qnum_f64, unit, Label, SparseVec};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::scalars::{HalfInt, QRat};

/// Graded component: `+` is `s = 1/2`, `-` is `s = -1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Plus,
    Minus,
}

impl Component {
    pub fn s2(self) -> i64 {
        match self {
            Component::Plus => 1,
            Component::Minus => -1,
        }
    }

    pub fn other(self) -> Component {
        match self {
            Component::Plus => Component::Minus,
            Component::Minus => Component::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisVector {
    pub l: HalfInt,
    pub r: HalfInt,
    pub comp: Component,
}

impl BasisVector {
    pub fn label(self) -> Label {
        (self.l.twice(), self.r.twice(), self.comp.s2())
    }
}

/// Orthonormal basis `ξ^l_{r,±1/2}` with `l ≤ Λ`, ordered by component, then `l`, then `r`.
#[derive(Clone, Debug)]
pub struct TruncatedHilbert {
    pub cutoff: HalfInt,
    pub q: f64,
    pub basis: Vec<BasisVector>,
    /// `‖t^l_{r,s}‖ = sqrt(q^{-2r}/[2l+1])`, the normalization of each basis vector.
    pub norms: Vec<f64>,
    index: HashMap<Label, usize>,
}

impl TruncatedHilbert {
    pub fn new(cutoff: HalfInt, q: f64) -> Result<Arc<Self>> {
        check_q(q)?;
        let mut basis = Vec::new();
        for comp in [Component::Plus, Component::Minus] {
            let mut l = HalfInt::HALF;
            while l <= cutoff {
                for r in l.spin_range() {
                    basis.push(BasisVector { l, r, comp });
                }
                l = l + HalfInt::ONE;
            }
        }
        let norms = basis
            .iter()
            .map(|b| (q.powf(-b.r.to_f64() * 2.0) / qnum_f64(2.0 * b.l.to_f64() + 1.0, q)).sqrt())
            .collect();
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.label(), i))
            .collect();
        Ok(Arc::new(TruncatedHilbert {
            cutoff,
            q,
            basis,
            norms,
            index,
        }))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// Indices with `l ≤ Λ - margin`.
    pub fn interior(&self, margin: HalfInt) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.basis[i].l <= self.cutoff - margin)
            .collect()
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q = {q} is outside (0, 1)")))
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub basis: Arc<TruncatedHilbert>,
    pub matrix: DMatrix<f64>,
    pub hermitian: bool,
    /// Rows whose entries are affected by the truncation.
    pub edge_rows: Vec<bool>,
}

impl TruncatedOperator {
    fn diagonal(basis: &Arc<TruncatedHilbert>, f: impl Fn(&BasisVector) -> f64) -> Self {
        let diag = DVector::from_iterator(basis.dim(), basis.basis.iter().map(f));
        TruncatedOperator {
            basis: basis.clone(),
            matrix: DMatrix::from_diagonal(&diag),
            hermitian: true,
            edge_rows: vec![false; basis.dim()],
        }
    }

    /// Largest deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).abs().max()
    }

    /// Fails unless a hermitian-flagged operator is symmetric to 1e-12.
    pub fn check_hermitian(&self) -> Result<()> {
        if self.hermitian && self.asymmetry() > 1e-12 {
            return Err(Error::Numerical(format!(
                "operator flagged hermitian has asymmetry {:e}",
                self.asymmetry()
            )));
        }
        Ok(())
    }
}

/// `D ξ^l_{r,±} = [l+1/2] ξ^l_{r,∓}`.
pub fn op_d(basis: &Arc<TruncatedHilbert>) -> TruncatedOperator {
    let q = basis.q;
    let n = basis.dim();
    let mut m = DMatrix::zeros(n, n);
    for (i, b) in basis.basis.iter().enumerate() {
        let partner = BasisVector {
            comp: b.comp.other(),
            ..*b
        };
        let j = basis
            .position(partner.label())
            .expect("both components present");
        m[(j, i)] = qnum_f64(b.l.to_f64() + 0.5, q);
    }
    TruncatedOperator {
        basis: basis.clone(),
        matrix: m,
        hermitian: true,
        edge_rows: vec![false; n],
    }
}

/// Largest relative deviation between the eigenvalues of `D²` (dense symmetric solver) and
/// `[l+1/2]²` with multiplicity `2(2l+1)`.
pub fn d_squared_deviation(basis: &Arc<TruncatedHilbert>) -> f64 {
    let d = op_d(basis).matrix;
    let mut got: Vec<f64> = (&d * &d)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = basis
        .basis
        .iter()
        .map(|b| qnum_f64(b.l.to_f64() + 0.5, basis.q).powi(2))
        .collect();
    want.sort_by(f64::total_cmp);
    got.iter()
        .zip(&want)
        .map(|(g, e)| (g - e).abs() / e.max(1.0))
        .fold(0.0, f64::max)
}

/// `Δ_R ξ^l_{r,s} = q^{2r} ξ^l_{r,s}`.
pub fn op_delta(basis: &Arc<TruncatedHilbert>) -> TruncatedOperator {
    let q = basis.q;
    TruncatedOperator::diagonal(basis, |b| q.powf(2.0 * b.r.to_f64()))
}

/// `γ = diag(1, -1)`.
pub fn op_gamma(basis: &Arc<TruncatedHilbert>) -> TruncatedOperator {
    TruncatedOperator::diagonal(
        basis,
        |b| if b.comp == Component::Plus { 1.0 } else { -1.0 },
    )
}

/// `χ = diag(q^{-1}, q)`.
pub fn op_chi(basis: &Arc<TruncatedHilbert>) -> TruncatedOperator {
    let q = basis.q;
    TruncatedOperator::diagonal(basis, |b| {
        if b.comp == Component::Plus {
            1.0 / q
        } else {
            q
        }
    })
}

/// Weights `q^{-2r}` of `Ψ_R(T) = Tr(Δ_R^{-1/2} T Δ_R^{-1/2})`.
pub fn op_weight(basis: &TruncatedHilbert) -> Vec<f64> {
    basis
        .basis
        .iter()
        .map(|b| basis.q.powf(-2.0 * b.r.to_f64()))
        .collect()
}

/// `Ψ_R(T)` for a truncated operator.
pub fn psi_r(op: &TruncatedOperator) -> f64 {
    op_weight(&op.basis)
        .iter()
        .enumerate()
        .map(|(i, w)| w * op.matrix[(i, i)])
        .sum()
}

/// `Ψ_R(P_l) = Σ_{r=-l}^{l} q^{-2r}` for one component, exactly.
pub fn psi_r_level(l: HalfInt) -> QRat {
    l.spin_range()
        .fold(QRat::zero(), |acc, r| &acc + &QRat::q_pow(-r.twice()))
}

/// Spectral projection onto level `l` in the given components.
pub fn level_projection(
    basis: &Arc<TruncatedHilbert>,
    l: HalfInt,
    comps: &[Component],
) -> TruncatedOperator {
    TruncatedOperator::diagonal(basis, |b| {
        if b.l == l && comps.contains(&b.comp) {
            1.0
        } else {
            0.0
        }
    })
}

/// Matrix of `x ↦ β x` from component `from` to component `to`, as a `dim(to) × dim(from)` block
/// in the ordering of `basis`. Entries are exact up to rounding: products are formed in the full
/// space and only then compressed.
pub fn left_mult_block(
    beta: &AlgebraElement,
    basis: &Arc<TruncatedHilbert>,
    from: Component,
    to: Component,
) -> Result<DMatrix<f64>> {
    let shift = to.s2() - from.s2();
    for (m, _) in beta.terms() {
        if -m.bigrade().1 != shift {
            return Err(Error::Domain(format!(
                "{beta} does not map component {from:?} to {to:?}"
            )));
        }
    }
    let q = basis.q;
    let rows: Vec<usize> = (0..basis.dim())
        .filter(|&i| basis.basis[i].comp == to)
        .collect();
    let cols: Vec<usize> = (0..basis.dim())
        .filter(|&i| basis.basis[i].comp == from)
        .collect();
    let offset = rows[0];
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (jc, &j) in cols.iter().enumerate() {
        let v: SparseVec = apply_element(beta, &unit(basis.basis[j].label()), q, 1.0);
        for (label, x) in v {
            if let Some(i) = basis.position(label) {
                m[(i - offset, jc)] = x;
            }
        }
    }
    Ok(m)
}

/// Left multiplication by `β` in the Podleś sphere, acting on both components.
pub fn left_mult(
    beta: &AlgebraElement,
    basis: &Arc<TruncatedHilbert>,
) -> Result<TruncatedOperator> {
    if !beta.in_podles() {
        return Err(Error::Domain(format!(
            "{beta} does not preserve the components"
        )));
    }
    let n = basis.dim();
    let half = n / 2;
    let mut m = DMatrix::zeros(n, n);
    if !beta.is_zero() {
        let plus = left_mult_block(beta, basis, Component::Plus, Component::Plus)?;
        let minus = left_mult_block(beta, basis, Component::Minus, Component::Minus)?;
        m.view_mut((0, 0), (half, half)).copy_from(&plus);
        m.view_mut((half, half), (half, half)).copy_from(&minus);
    }
    let margin = HalfInt::from_twice(beta.degree() as i64 * 2);
    let edge_rows = basis
        .basis
        .iter()
        .map(|b| b.l + margin > basis.cutoff)
        .collect();
    Ok(TruncatedOperator {
        basis: basis.clone(),
        matrix: m,
        hermitian: false,
        edge_rows,
    })
}

/// `[D, β] - [[0, q^{-1/2} ∂_e β], [q^{1/2} ∂_f β, 0]]` restricted to interior rows, as a max norm.
pub fn commutator_defect(
    beta: &AlgebraElement,
    del_e_beta: &AlgebraElement,
    del_f_beta: &AlgebraElement,
    basis: &Arc<TruncatedHilbert>,
) -> Result<f64> {
    let q = basis.q;
    let d = op_d(basis).matrix;
    let lb = left_mult(beta, basis)?.matrix;
    let comm = &d * &lb - &lb * &d;
    let n = basis.dim();
    let half = n / 2;
    let mut want = DMatrix::zeros(n, n);
    if !del_e_beta.is_zero() {
        let e =
            left_mult_block(del_e_beta, basis, Component::Minus, Component::Plus)? * q.powf(-0.5);
        want.view_mut((0, half), (half, half)).copy_from(&e);
    }
    if !del_f_beta.is_zero() {
        let f =
            left_mult_block(del_f_beta, basis, Component::Plus, Component::Minus)? * q.powf(0.5);
        want.view_mut((half, 0), (half, half)).copy_from(&f);
    }
    let margin = HalfInt::from_twice(beta.degree() as i64 * 2);
    let mut worst: f64 = 0.0;
    for i in basis.interior(margin) {
        for j in 0..n {
            worst = worst.max((comm[(i, j)] - want[(i, j)]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{del_e, del_f, derive_with, el, DkConvention, Leg, Raising};
    use crate::scalars::qnum;

    fn space(l2: i64, q: f64) -> Arc<TruncatedHilbert> {
        TruncatedHilbert::new(HalfInt::from_twice(l2), q).unwrap()
    }

    #[test]
    fn dimensions_and_d_spectrum() {
        let h = space(13, 0.5);
        let want: usize = (1..=13).step_by(2).map(|l2| 2 * (l2 + 1) as usize).sum();
        assert_eq!(h.dim(), want);
        let d = op_d(&h);
        d.check_hermitian().unwrap();
        assert!(d_squared_deviation(&h) <= 1e-12);
        let svd = d.matrix.clone().svd(false, false);
        assert!((svd.singular_values.min() - 1.0).abs() < 1e-12);
        let gamma = op_gamma(&h).matrix;
        assert!((&gamma * &d.matrix + &d.matrix * &gamma).abs().max() == 0.0);
        let delta = op_delta(&h).matrix;
        assert!((&delta * &d.matrix - &d.matrix * &delta).abs().max() < 1e-12);
    }

    #[test]
    fn weighted_traces() {
        for l2 in [1, 3, 5, 7] {
            let l = HalfInt::from_twice(l2);
            assert_eq!(psi_r_level(l), qnum(l + l + HalfInt::ONE));
        }
        let h = space(7, 0.4);
        let l = HalfInt::from_twice(5);
        let p = level_projection(&h, l, &[Component::Plus]);
        let want = qnum(l + l + HalfInt::ONE).eval_f64(0.4);
        assert!((psi_r(&p) - want).abs() < 1e-12 * want);
        let both = level_projection(&h, l, &[Component::Plus, Component::Minus]);
        assert!((psi_r(&both) - 2.0 * want).abs() < 1e-12 * want);
    }

    #[test]
    fn left_mult_basics() {
        let h = space(7, 0.5);
        let id = left_mult(&el("1"), &h).unwrap();
        assert!(
            (id.matrix - DMatrix::<f64>::identity(h.dim(), h.dim()))
                .abs()
                .max()
                < 1e-14
        );
        let bc = left_mult(&el("b c"), &h).unwrap();
        assert!(bc.matrix.clone().svd(false, false).singular_values.max() <= 1.0);
        assert!(left_mult(&el("a"), &h).is_err());
    }

    #[test]
    fn commutator_pins_the_convention() {
        for q in [0.5, 0.3] {
            let h = space(11, q);
            for beta in ["q^-1 a b", "-c d", "-q^-1 b c"] {
                let b = el(beta);
                let defect = commutator_defect(&b, &del_e(&b), &del_f(&b), &h).unwrap();
                assert!(defect < 1e-12, "{beta}: {defect}");
                let e0 = derive_with(&b, Leg::Right, Raising::E, DkConvention::Initial);
                let f0 = derive_with(&b, Leg::Right, Raising::F, DkConvention::Initial);
                let initial = commutator_defect(&b, &e0, &f0, &h).unwrap();
                assert!(
                    initial > 1e-3,
                    "{beta}: initial convention unexpectedly passes"
                );
            }
        }
    }
}
