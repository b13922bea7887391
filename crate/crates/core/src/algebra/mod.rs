//! Normal-form arithmetic in the coordinate algebra of SU_q(2).
//!
//! Relations: `ab = qba`, `ac = qca`, `bd = qdb`, `cd = qdc`, `bc = cb`, `ad = 1 + qbc`,
//! `da = 1 + q^{-1}bc`, with `*`-structure `a* = d`, `b* = -qc`.

pub mod derivations;
mod element;
mod monomial;

pub use derivations::{
    del_e, del_e_left, del_f, del_f_left, del_k, del_k_inv, del_k_left, del_k_left_inv,
    derive_with, DkConvention, Leg, Raising, DK_CONVENTION,
};
pub use element::{el, AlgebraElement, Element};
pub use monomial::{haar_monomial, monomial_product, star_monomial, Monomial};
