//! Versioned on-disk cache of constructed basis elements.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{kappa_chain_sq, PWElement, PWIndex, PeterWeyl};
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::scalars::{HalfInt, QRat, RadScalar};

/// Bumped whenever the construction or the text format changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub l2: i64,
    pub r2: i64,
    pub s2: i64,
    pub element: Element<RadScalar>,
    pub norm_sq: QRat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub q_indeterminate: String,
    pub entries: Vec<CacheEntry>,
}

impl CacheEntry {
    fn from_element(e: &PWElement) -> Self {
        CacheEntry {
            l2: e.index.l.twice(),
            r2: e.index.r.twice(),
            s2: e.index.s.twice(),
            element: e.element(),
            norm_sq: e.norm_sq.clone(),
        }
    }

    fn into_element(self) -> Result<PWElement> {
        let index = PWIndex::from_twice(self.l2, self.r2, self.s2)?;
        let chain_sq = &kappa_chain_sq(index.l, index.s) * &kappa_chain_sq(index.l, index.r);
        let prefactor = RadScalar::sqrt(&chain_sq)?.recip()?;
        let unscale = prefactor.recip()?;
        let raw = self
            .element
            .scale_coeff(&unscale)
            .to_qrat_element()
            .ok_or_else(|| Error::Cache(format!("entry {index} does not match its prefactor")))?;
        Ok(PWElement {
            index,
            prefactor,
            prefactor_sq: chain_sq.recip()?,
            raw,
            norm_sq: self.norm_sq,
        })
    }
}

pub fn save_cache(pw: &PeterWeyl, path: &Path) -> Result<()> {
    let file = CacheFile {
        version: CACHE_VERSION,
        q_indeterminate: "s".into(),
        entries: pw
            .cached()
            .iter()
            .map(|e| CacheEntry::from_element(e))
            .collect(),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Cache(e.to_string()))?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
    }
    fs::write(path, text).map_err(|e| Error::Cache(e.to_string()))
}

/// Loads entries into `pw`. Returns the number loaded; a missing file or a version mismatch
/// loads nothing.
pub fn load_cache(pw: &PeterWeyl, path: &Path) -> Result<usize> {
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(0);
    };
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| Error::Cache(e.to_string()))?;
    if file.version != CACHE_VERSION || file.q_indeterminate != "s" {
        return Ok(0);
    }
    let mut n = 0;
    for entry in file.entries {
        if HalfInt::from_twice(entry.l2) > pw.cutoff() {
            continue;
        }
        pw.insert_cached(entry.into_element()?);
        n += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_disk() {
        let pw = PeterWeyl::new(HalfInt::from_int(2));
        for i in PWIndex::all_up_to(HalfInt::from_twice(3)) {
            pw.element(i).unwrap();
        }
        let dir = std::env::temp_dir().join(format!("qsphere-pw-{}", std::process::id()));
        let path = dir.join("pw.json");
        save_cache(&pw, &path).unwrap();
        let fresh = PeterWeyl::new(HalfInt::from_int(2));
        assert_eq!(load_cache(&fresh, &path).unwrap(), 1 + 4 + 9 + 16);
        for (a, b) in pw.cached().iter().zip(fresh.cached().iter()) {
            assert_eq!(a.index, b.index);
            assert_eq!(a.raw, b.raw);
            assert_eq!(a.norm_sq, b.norm_sq);
        }
        let text = fs::read_to_string(&path)
            .unwrap()
            .replace("\"version\": 1", "\"version\": 0");
        fs::write(&path, text).unwrap();
        assert_eq!(load_cache(&PeterWeyl::new(HalfInt::ONE), &path).unwrap(), 0);
        let _ = fs::remove_dir_all(dir);
    }
}
