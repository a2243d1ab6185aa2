//! Calabi–Yau hypersurfaces (`d = sum a_i`) by bounded search, and the cone
//! construction that turns `omega_X = O(k)` into a Calabi–Yau family.

use serde::{Deserialize, Serialize};

use crate::brute::{brute_search, BoxKind, BruteConfig};
use crate::error::{Error, Result};
use crate::weights::{HypersurfaceFamily, WeightSystem};

/// Result of [`cy_search`]. No finiteness bound is known a priori, so the
/// weight cap travels with the list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CySearchOutput {
    pub n: usize,
    pub max_weight: u64,
    pub families: Vec<HypersurfaceFamily>,
}

/// Quasi-smooth, well-formed `X_d` in `P(a_0, ..., a_n)` with `d = sum a_i`
/// and every `a_i <= max_weight`, sorted.
pub fn cy_search(n: usize, max_weight: u64) -> Result<CySearchOutput> {
    cy_search_threads(n, max_weight, None)
}

pub fn cy_search_threads(
    n: usize,
    max_weight: u64,
    threads: Option<usize>,
) -> Result<CySearchOutput> {
    if n < 2 || max_weight == 0 {
        return Err(Error::UnsupportedConfiguration(format!(
            "cy search needs n >= 2 and max_weight >= 1, got n = {n}, max_weight = {max_weight}"
        )));
    }
    let mut cfg = BruteConfig::new(vec![max_weight; n + 1], BoxKind::CalabiYau);
    cfg.threads = threads;
    let out = brute_search(&cfg)?;
    Ok(CySearchOutput {
        n,
        max_weight,
        families: out.families,
    })
}

/// `X_d` in `P(a)` with `d = sum a + k` goes to `X_d` in `P(a, 1, ..., 1)`
/// (`k` ones): add `x^d` for each new variable.
pub fn cone_extend(fam: &HypersurfaceFamily, k: u64) -> Result<HypersurfaceFamily> {
    let sum = fam.ws.sum();
    if fam.degree != sum + k {
        return Err(Error::DegreeMismatch {
            degree: fam.degree,
            sum,
            k,
        });
    }
    let mut w = fam.weights().to_vec();
    w.extend(std::iter::repeat_n(1, k as usize));
    Ok(HypersurfaceFamily::new(
        WeightSystem::sorted(&w)?,
        fam.degree,
    ))
}
