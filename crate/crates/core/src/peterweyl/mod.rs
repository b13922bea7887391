//! Peter-Weyl matrix coefficients `t^l_{r,s}` as normal-form elements.
//!
//! `t^l_{l,l} = d^{2l}`; the column index is lowered with `∂_f` and the row index with `∂'_f`,
//! dividing by the `κ` factors so that `∂_f t^l_{r,s} = κ^l_s t^l_{r,s-1}` and
//! `∂'_f t^l_{r,s} = κ^l_r t^l_{r-1,s}`.

mod cache;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::algebra::{del_f, del_f_left, AlgebraElement, Element};
use crate::error::{Error, Result};
use crate::scalars::{kappa_sq, qnum, HalfInt, QRat, RadScalar};

pub use cache::{load_cache, save_cache, CacheEntry, CacheFile, CACHE_VERSION};

/// Default largest spin constructed symbolically.
pub const DEFAULT_CUTOFF: HalfInt = HalfInt::from_int(6);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PWIndex {
    pub l: HalfInt,
    pub r: HalfInt,
    pub s: HalfInt,
}

impl PWIndex {
    pub fn new(l: HalfInt, r: HalfInt, s: HalfInt) -> Result<Self> {
        let ok = l.twice() >= 0
            && r.abs() <= l
            && s.abs() <= l
            && (l - r).is_integral()
            && (l - s).is_integral();
        if !ok {
            return Err(Error::Domain(format!(
                "invalid Peter-Weyl index (l, r, s) = ({l}, {r}, {s})"
            )));
        }
        Ok(PWIndex { l, r, s })
    }

    /// Convenience constructor from doubled values.
    pub fn from_twice(l2: i64, r2: i64, s2: i64) -> Result<Self> {
        PWIndex::new(
            HalfInt::from_twice(l2),
            HalfInt::from_twice(r2),
            HalfInt::from_twice(s2),
        )
    }

    /// Bigrade `(-2r, -2s)` of `t^l_{r,s}`.
    pub fn bigrade(self) -> (i64, i64) {
        (-self.r.twice(), -self.s.twice())
    }

    /// All indices with spin at most `l_max`, ordered by `(l, r, s)`.
    pub fn all_up_to(l_max: HalfInt) -> Vec<PWIndex> {
        let mut out = Vec::new();
        for l2 in 0..=l_max.twice() {
            let l = HalfInt::from_twice(l2);
            for r in l.spin_range() {
                for s in l.spin_range() {
                    out.push(PWIndex { l, r, s });
                }
            }
        }
        out
    }
}

impl fmt::Display for PWIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{}_{{{},{}}}", self.l, self.r, self.s)
    }
}

impl fmt::Debug for PWIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `t^l_{r,s} = prefactor · raw`, with the radical part isolated in `prefactor`.
#[derive(Clone, Debug)]
pub struct PWElement {
    pub index: PWIndex,
    /// `(∏ κ)^{-1}` over both lowering chains.
    pub prefactor: RadScalar,
    /// Square of the prefactor (always rational).
    pub prefactor_sq: QRat,
    /// Lowered seed with rational coefficients.
    pub raw: AlgebraElement,
    /// `h(t* t)`.
    pub norm_sq: QRat,
}

impl PWElement {
    /// The basis vector itself, with radical coefficients.
    pub fn element(&self) -> Element<RadScalar> {
        self.raw.map_coeffs(|c| self.prefactor.scale(c))
    }

    /// `h(raw* raw)`, so that `norm_sq = prefactor_sq * raw_norm_sq`.
    pub fn raw_norm_sq(&self) -> QRat {
        self.norm_sq
            .checked_div(&self.prefactor_sq)
            .expect("non-zero prefactor")
    }
}

/// Lowering factors `∏_{j=from+1}^{l} (κ^l_j)^2`.
fn kappa_chain_sq(l: HalfInt, from: HalfInt) -> QRat {
    let mut acc = QRat::one();
    let mut j = from + HalfInt::ONE;
    while j <= l {
        acc = &acc * &kappa_sq(l, j).expect("in range");
        j = j + HalfInt::ONE;
    }
    acc
}

/// Symbolic basis builder with a shared cache.
pub struct PeterWeyl {
    cutoff: HalfInt,
    elements: RwLock<HashMap<PWIndex, Arc<PWElement>>>,
    top_rows: RwLock<HashMap<(HalfInt, HalfInt), AlgebraElement>>,
}

impl PeterWeyl {
    pub fn new(cutoff: HalfInt) -> Self {
        PeterWeyl {
            cutoff,
            elements: RwLock::new(HashMap::new()),
            top_rows: RwLock::new(HashMap::new()),
        }
    }

    /// The process-wide builder with [`DEFAULT_CUTOFF`].
    pub fn global() -> &'static PeterWeyl {
        static GLOBAL: OnceLock<PeterWeyl> = OnceLock::new();
        GLOBAL.get_or_init(|| PeterWeyl::new(DEFAULT_CUTOFF))
    }

    pub fn cutoff(&self) -> HalfInt {
        self.cutoff
    }

    fn check_cutoff(&self, l: HalfInt) -> Result<()> {
        if l > self.cutoff {
            return Err(Error::CutoffExceeded {
                requested: l.to_string(),
                cutoff: self.cutoff.to_string(),
            });
        }
        Ok(())
    }

    /// `∂_f^{l-s}(d^{2l})`, undivided.
    fn top_row(&self, l: HalfInt, s: HalfInt) -> AlgebraElement {
        if let Some(v) = self.top_rows.read().unwrap().get(&(l, s)) {
            return v.clone();
        }
        let v = if s == l {
            Element::d().pow(l.twice() as u32)
        } else {
            del_f(&self.top_row(l, s + HalfInt::ONE))
        };
        self.top_rows.write().unwrap().insert((l, s), v.clone());
        v
    }

    fn raw(&self, idx: PWIndex) -> AlgebraElement {
        if idx.r == idx.l {
            return self.top_row(idx.l, idx.s);
        }
        let above = PWIndex {
            r: idx.r + HalfInt::ONE,
            ..idx
        };
        if let Some(e) = self.elements.read().unwrap().get(&above) {
            return del_f_left(&e.raw);
        }
        del_f_left(&self.raw(above))
    }

    pub fn element(&self, idx: PWIndex) -> Result<Arc<PWElement>> {
        self.check_cutoff(idx.l)?;
        if let Some(e) = self.elements.read().unwrap().get(&idx) {
            return Ok(e.clone());
        }
        let raw = self.raw(idx);
        let chain_sq = &kappa_chain_sq(idx.l, idx.s) * &kappa_chain_sq(idx.l, idx.r);
        let prefactor_sq = chain_sq.recip()?;
        let prefactor = RadScalar::sqrt(&chain_sq)?.recip()?;
        let raw_norm = raw.star().mul_ref(&raw).haar();
        let norm_sq = &prefactor_sq * &raw_norm;
        let e = Arc::new(PWElement {
            index: idx,
            prefactor,
            prefactor_sq,
            raw,
            norm_sq,
        });
        self.elements.write().unwrap().insert(idx, e.clone());
        Ok(e)
    }

    pub fn insert_cached(&self, e: PWElement) {
        self.elements.write().unwrap().insert(e.index, Arc::new(e));
    }

    pub fn cached(&self) -> Vec<Arc<PWElement>> {
        let mut v: Vec<_> = self.elements.read().unwrap().values().cloned().collect();
        v.sort_by_key(|e| e.index);
        v
    }

    pub fn norm_sq(&self, idx: PWIndex) -> Result<QRat> {
        Ok(self.element(idx)?.norm_sq.clone())
    }

    /// Expansion `x = Σ c_idx t_idx` over spins up to `l_max`, computed blockwise with the
    /// inner product `h(u* v)` and verified by exact reconstruction.
    pub fn expand(
        &self,
        x: &AlgebraElement,
        l_max: HalfInt,
    ) -> Result<BTreeMap<PWIndex, RadScalar>> {
        let mut out = BTreeMap::new();
        for (m, n) in x.bigrades() {
            let block = x.component(m, n);
            let r = HalfInt::from_twice(-m);
            let s = HalfInt::from_twice(-n);
            let l0 = if r.abs() >= s.abs() { r.abs() } else { s.abs() };
            if !(l0 - s.abs()).is_integral() {
                return Err(Error::IncompleteExpansion { m, n });
            }
            let mut residual = block.clone();
            let mut l = l0;
            while l <= l_max && !residual.is_zero() {
                let t = self.element(PWIndex { l, r, s })?;
                // coefficient of raw is h(raw* x)/h(raw* raw); of t it is that over the prefactor
                let proj = t.raw.star().mul_ref(&block).haar();
                if !proj.is_zero() {
                    let c_raw = proj.checked_div(&t.raw_norm_sq())?;
                    residual = &residual - &t.raw.scale(&c_raw);
                    out.insert(t.index, t.prefactor.recip()?.scale(&c_raw));
                }
                l = l + HalfInt::ONE;
            }
            if !residual.is_zero() {
                return Err(Error::IncompleteExpansion { m, n });
            }
        }
        Ok(out)
    }
}

pub fn pw_element(idx: PWIndex) -> Result<Arc<PWElement>> {
    PeterWeyl::global().element(idx)
}

pub fn pw_norm_sq(idx: PWIndex) -> Result<QRat> {
    PeterWeyl::global().norm_sq(idx)
}

pub fn pw_expand(x: &AlgebraElement, l_max: HalfInt) -> Result<BTreeMap<PWIndex, RadScalar>> {
    PeterWeyl::global().expand(x, l_max)
}

/// Expected `h(t^{l*}_{r,s} t^l_{r,s}) = q^{-2r}/[2l+1]`.
pub fn expected_norm_sq(idx: PWIndex) -> QRat {
    QRat::q_pow(-idx.r.twice())
        .checked_div(&qnum(idx.l + idx.l + HalfInt::ONE))
        .expect("non-zero q-number")
}
