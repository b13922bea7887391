//! Twisted derivations from the left and right actions of `U_q(su(2))`.
//!
//! Every operator is determined by its values on generators and the twisted Leibniz rule
//! `∂(xy) = ∂(x) ∂_k(y) + ∂_k^{-1}(x) ∂(y)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use super::element::Element;
use super::monomial::Monomial;
use crate::scalars::{Coeff, QRat};

/// Normalization of the group-like operator `∂_k` on `t^l_{r,s}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DkConvention {
    /// `∂_k t^l_{r,s} = q^{-s} t^l_{r,s}`.
    Initial,
    /// `∂_k t^l_{r,s} = q^{s} t^l_{r,s}`, the only choice for which `∂_e`, `∂_f` respect the
    /// defining relations.
    Flipped,
}

/// The convention used throughout the crate.
pub const DK_CONVENTION: DkConvention = DkConvention::Flipped;

/// Which tensor leg of the Peter-Weyl matrix coefficients the operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Leg {
    /// Acts on the column index `s`.
    Right,
    /// Acts on the row index `r`.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Raising {
    E,
    F,
}

/// Exponent of `s = q^{1/2}` by which `∂_k` (or `∂'_k`) scales a monomial.
pub fn k_weight(m: Monomial, leg: Leg, conv: DkConvention) -> i64 {
    let (p, n) = m.bigrade();
    let g = match leg {
        Leg::Right => n,
        Leg::Left => p,
    };
    match conv {
        DkConvention::Initial => g,
        DkConvention::Flipped => -g,
    }
}

fn generator_image(g: Monomial, leg: Leg, kind: Raising) -> Option<Monomial> {
    use Monomial as M;
    match (leg, kind) {
        (Leg::Right, Raising::E) => match g {
            M::A => Some(M::B),
            M::C => Some(M::D),
            _ => None,
        },
        (Leg::Right, Raising::F) => match g {
            M::B => Some(M::A),
            M::D => Some(M::C),
            _ => None,
        },
        (Leg::Left, Raising::E) => match g {
            M::A => Some(M::C),
            M::B => Some(M::D),
            _ => None,
        },
        (Leg::Left, Raising::F) => match g {
            M::C => Some(M::A),
            M::D => Some(M::B),
            _ => None,
        },
    }
}

/// First letter of the normal-form word and the remaining monomial.
fn split_first(m: Monomial) -> (Monomial, Monomial) {
    let mut rest = m;
    let g = if m.a > 0 {
        rest.a -= 1;
        Monomial::A
    } else if m.b > 0 {
        rest.b -= 1;
        Monomial::B
    } else if m.c > 0 {
        rest.c -= 1;
        Monomial::C
    } else {
        rest.d -= 1;
        Monomial::D
    };
    (g, rest)
}

type Key = (Leg, Raising, DkConvention, Monomial);

fn memo() -> &'static RwLock<HashMap<Key, Element<QRat>>> {
    static MEMO: OnceLock<RwLock<HashMap<Key, Element<QRat>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// The derivation applied to a single monomial.
pub fn derive_monomial(m: Monomial, leg: Leg, kind: Raising, conv: DkConvention) -> Element<QRat> {
    if m.is_one() {
        return Element::zero();
    }
    let key = (leg, kind, conv, m);
    if let Some(v) = memo().read().unwrap().get(&key) {
        return v.clone();
    }
    let (g, rest) = split_first(m);
    let mut out = Element::zero();
    if let Some(img) = generator_image(g, leg, kind) {
        let w = k_weight(rest, leg, conv);
        let prod = Element::<QRat>::monomial(img).mul_ref(&Element::monomial(rest));
        out.add_scaled(&prod, &QRat::s_pow(w));
    }
    let tail = derive_monomial(rest, leg, kind, conv);
    if !tail.is_zero() {
        let w = -k_weight(g, leg, conv);
        let prod = Element::<QRat>::monomial(g).mul_ref(&tail);
        out.add_scaled(&prod, &QRat::s_pow(w));
    }
    memo().write().unwrap().insert(key, out.clone());
    out
}

/// Apply a derivation to an element under an explicit convention.
pub fn derive_with<C: Coeff>(
    x: &Element<C>,
    leg: Leg,
    kind: Raising,
    conv: DkConvention,
) -> Element<C> {
    let mut out = Element::zero();
    for (m, c) in x.terms() {
        for (m2, k) in derive_monomial(*m, leg, kind, conv).terms() {
            out.add_term(*m2, c.scale(k));
        }
    }
    out
}

/// `∂_k^{power}` (or `∂'_k^{power}`) under an explicit convention.
pub fn k_pow_with<C: Coeff>(
    x: &Element<C>,
    leg: Leg,
    power: i64,
    conv: DkConvention,
) -> Element<C> {
    x.map_monomials(|m| QRat::s_pow(power * k_weight(m, leg, conv)))
}

pub fn del_e<C: Coeff>(x: &Element<C>) -> Element<C> {
    derive_with(x, Leg::Right, Raising::E, DK_CONVENTION)
}

pub fn del_f<C: Coeff>(x: &Element<C>) -> Element<C> {
    derive_with(x, Leg::Right, Raising::F, DK_CONVENTION)
}

pub fn del_k<C: Coeff>(x: &Element<C>) -> Element<C> {
    k_pow_with(x, Leg::Right, 1, DK_CONVENTION)
}

pub fn del_k_inv<C: Coeff>(x: &Element<C>) -> Element<C> {
    k_pow_with(x, Leg::Right, -1, DK_CONVENTION)
}

pub fn del_e_left<C: Coeff>(x: &Element<C>) -> Element<C> {
    derive_with(x, Leg::Left, Raising::E, DK_CONVENTION)
}

pub fn del_f_left<C: Coeff>(x: &Element<C>) -> Element<C> {
    derive_with(x, Leg::Left, Raising::F, DK_CONVENTION)
}

pub fn del_k_left<C: Coeff>(x: &Element<C>) -> Element<C> {
    k_pow_with(x, Leg::Left, 1, DK_CONVENTION)
}

pub fn del_k_left_inv<C: Coeff>(x: &Element<C>) -> Element<C> {
    k_pow_with(x, Leg::Left, -1, DK_CONVENTION)
}

/// Derivation of an arbitrary word in the generators (not necessarily in normal form),
/// computed letter by letter with the Leibniz rule and normal-ordered at the end.
pub fn derive_word(
    word: &[Monomial],
    leg: Leg,
    kind: Raising,
    conv: DkConvention,
) -> Element<QRat> {
    let product = |ws: &[Monomial]| {
        ws.iter().fold(Element::<QRat>::one(), |acc, g| {
            acc.mul_ref(&Element::monomial(*g))
        })
    };
    let mut out = Element::zero();
    for (i, g) in word.iter().enumerate() {
        let Some(img) = generator_image(*g, leg, kind) else {
            continue;
        };
        // ∂ hits position i: letters before get ∂_k^{-1}, letters after get ∂_k
        let before: i64 = word[..i].iter().map(|h| -k_weight(*h, leg, conv)).sum();
        let after: i64 = word[i + 1..].iter().map(|h| k_weight(*h, leg, conv)).sum();
        let mut w = word.to_vec();
        w[i] = img;
        out.add_scaled(&product(&w), &QRat::s_pow(before + after));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::el;

    use Monomial as M;

    #[test]
    fn generator_values() {
        assert_eq!(del_e(&el("a")), el("b"));
        assert!(del_f(&el("a")).is_zero());
        assert_eq!(del_f(&el("b")), el("a"));
        assert_eq!(del_e(&el("c")), el("d"));
        assert_eq!(del_f_left(&el("c")), el("a"));
        assert!(del_f_left(&el("a")).is_zero());
        assert_eq!(del_e_left(&el("a")), el("c"));
        assert_eq!(del_k(&el("a")), el("q^(-1/2) a"));
        assert_eq!(del_k(&el("b")), el("q^(1/2) b"));
        assert_eq!(del_k_inv(&del_k(&el("a b + c"))), el("a b + c"));
    }

    #[test]
    fn twisted_leibniz_example() {
        assert_eq!(del_e(&el("a b")), el("q^(1/2) b^2"));
        let initial = derive_with(&el("a b"), Leg::Right, Raising::E, DkConvention::Initial);
        assert_eq!(initial, el("q^(-1/2) b^2"));
    }

    /// The relations `xy = λ yx` and `ad - da = (q - q^{-1}) bc` must map to zero.
    fn relation_defects(leg: Leg, kind: Raising, conv: DkConvention) -> Vec<String> {
        let rels: Vec<(Vec<M>, Vec<M>, QRat)> = vec![
            (vec![M::A, M::B], vec![M::B, M::A], QRat::q_pow(1)),
            (vec![M::A, M::C], vec![M::C, M::A], QRat::q_pow(1)),
            (vec![M::B, M::D], vec![M::D, M::B], QRat::q_pow(1)),
            (vec![M::C, M::D], vec![M::D, M::C], QRat::q_pow(1)),
            (vec![M::B, M::C], vec![M::C, M::B], QRat::one()),
        ];
        let mut bad = Vec::new();
        for (lhs, rhs, lambda) in rels {
            let l = derive_word(&lhs, leg, kind, conv);
            let r = derive_word(&rhs, leg, kind, conv).scale(&lambda);
            if l != r {
                bad.push(format!("{lhs:?} vs {rhs:?}"));
            }
        }
        let ad = derive_word(&[M::A, M::D], leg, kind, conv);
        let da = derive_word(&[M::D, M::A], leg, kind, conv);
        let bc = derive_word(&[M::B, M::C], leg, kind, conv);
        let q = &QRat::q_pow(1) - &QRat::q_pow(-1);
        if &ad - &da != bc.scale(&q) {
            bad.push("ad - da".into());
        }
        if &ad - &bc.scale(&QRat::q_pow(1)) != Element::zero() {
            bad.push("ad - q bc".into());
        }
        bad
    }

    #[test]
    fn flipped_convention_respects_relations() {
        for leg in [Leg::Right, Leg::Left] {
            for kind in [Raising::E, Raising::F] {
                let defects = relation_defects(leg, kind, DkConvention::Flipped);
                assert!(defects.is_empty(), "{leg:?} {kind:?}: {defects:?}");
            }
        }
    }

    #[test]
    fn initial_convention_breaks_relations() {
        assert!(!relation_defects(Leg::Right, Raising::E, DkConvention::Initial).is_empty());
    }

    #[test]
    fn normal_form_recursion_matches_word_rule() {
        for m in [
            M::new(2, 1, 0, 0),
            M::new(0, 1, 2, 3),
            M::new(1, 0, 2, 0),
            M::new(0, 2, 1, 1),
        ] {
            let mut word = Vec::new();
            word.extend(std::iter::repeat(M::A).take(m.a as usize));
            word.extend(std::iter::repeat(M::B).take(m.b as usize));
            word.extend(std::iter::repeat(M::C).take(m.c as usize));
            word.extend(std::iter::repeat(M::D).take(m.d as usize));
            for leg in [Leg::Right, Leg::Left] {
                for kind in [Raising::E, Raising::F] {
                    assert_eq!(
                        derive_monomial(m, leg, kind, DK_CONVENTION),
                        derive_word(&word, leg, kind, DK_CONVENTION)
                    );
                }
            }
        }
    }
}
