//! Interaction energies and surprisal.
//!
//! Assets are treated as particles repelling each other through a pair
//! potential `u`. With `r_ij` the distance between assets `i` and `j`:
//!
//! ```text
//! U        = ½ Σ_i Σ_{j≠i} u(r_ij)                     total energy
//! U_k      = ½ Σ_{j≠k} u(r_kj)                         share of asset k, Σ_k U_k = U
//! U_ref,k  = 1/(2(N−2)) Σ_{i≠k} Σ_{j≠i,k} u(r_ij)      comparand-only energy
//!          = (U − 2 U_k) / (N − 2)
//! ```
//!
//! Under a maximum-entropy energy distribution with mean `⟨U⟩`, the
//! surprisal of a configuration relative to the infinitely-separated one is
//! `U/⟨U⟩`, and it splits per asset as `U_k/⟨U⟩`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::DistanceMatrix;
use crate::potential::PotentialSpec;
use crate::sum::accumulate;

/// Below this fraction of `U` surviving `U − 2U_k`, sums are redone directly.
/// Since `Σ_k 2U_k = 2U`, fewer than `2/(1 − g)` assets can trip it, so the
/// fallback never changes the `O(N²)` cost while bounding the loss of
/// relative precision to a factor `1/g`.
pub(crate) const CANCELLATION_GUARD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub total_u: f64,
    pub per_asset_u: Vec<f64>,
    pub reference_u: Vec<f64>,
    pub mean_u: Option<f64>,
}

fn require_assets(d: &DistanceMatrix, required: usize) -> Result<()> {
    if d.len() < required {
        Err(Error::TooFewAssets {
            n: d.len(),
            required,
        })
    } else {
        Ok(())
    }
}

fn check_index(d: &DistanceMatrix, k: usize) -> Result<()> {
    if k >= d.len() {
        Err(Error::Config(format!(
            "asset index {k} out of range for {} assets",
            d.len()
        )))
    } else {
        Ok(())
    }
}

/// `Σ_{j≠k} u(r_kj)`; `Err(j)` for the first comparand colliding with `k`.
pub(crate) fn row_sum(d: &DistanceMatrix, spec: &PotentialSpec, k: usize) -> Result<f64, usize> {
    let mut terms = Vec::with_capacity(d.len().saturating_sub(1));
    for (j, &r) in d.row(k).iter().enumerate() {
        if j == k {
            continue;
        }
        if r == 0.0 {
            return Err(j);
        }
        terms.push(spec.eval_unchecked(r));
    }
    Ok(accumulate(&terms))
}

/// `Σ_{i<j} u(r_ij)` over unordered pairs not involving `skip`.
/// `Err((i, j))` for the first coinciding pair.
pub(crate) fn pair_sum(
    d: &DistanceMatrix,
    spec: &PotentialSpec,
    skip: Option<usize>,
) -> Result<f64, (usize, usize)> {
    let n = d.len();
    let mut row_totals = Vec::with_capacity(n);
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        if Some(i) == skip {
            continue;
        }
        terms.clear();
        for (j, &r) in d.row(i).iter().enumerate().skip(i + 1) {
            if Some(j) == skip {
                continue;
            }
            if r == 0.0 {
                return Err((i, j));
            }
            terms.push(spec.eval_unchecked(r));
        }
        row_totals.push(accumulate(&terms));
    }
    Ok(accumulate(&row_totals))
}

/// Total interaction energy `U`, summed over unordered pairs.
pub fn total_energy(d: &DistanceMatrix, spec: &PotentialSpec) -> Result<f64> {
    require_assets(d, 2)?;
    pair_sum(d, spec, None).map_err(|(i, j)| Error::Collision { i, j })
}

/// Energy share `U_k` of asset `k`.
pub fn asset_energy(d: &DistanceMatrix, spec: &PotentialSpec, k: usize) -> Result<f64> {
    require_assets(d, 2)?;
    check_index(d, k)?;
    row_sum(d, spec, k)
        .map(|s| 0.5 * s)
        .map_err(|j| Error::Collision { i: k, j })
}

/// Reference energy `U_ref,k` of the comparands of `k`, scaled by
/// `1/(N−2)` to be commensurate with `U_k`.
pub fn reference_energy(d: &DistanceMatrix, spec: &PotentialSpec, k: usize) -> Result<f64> {
    require_assets(d, 3)?;
    check_index(d, k)?;
    let pairs = pair_sum(d, spec, Some(k)).map_err(|(i, j)| Error::Doubleton { i, j })?;
    Ok(pairs / (d.len() - 2) as f64)
}

/// All energies at once in `O(N²)`: per-asset shares from row sums, the
/// total from an independent pair sum, and reference energies from the
/// partition identity unless subtracting `2U_k` would cancel most of `U`.
pub fn energy_breakdown(
    d: &DistanceMatrix,
    spec: &PotentialSpec,
    mean_u: Option<f64>,
    exec: Execution,
) -> Result<EnergyBreakdown> {
    require_assets(d, 3)?;
    if let Some(m) = mean_u {
        check_mean(m)?;
    }
    let per_asset_u = exec.try_map_indices(d.len(), |k| {
        row_sum(d, spec, k)
            .map(|s| 0.5 * s)
            .map_err(|j| Error::Collision { i: k, j })
    })?;
    let total_u = total_energy(d, spec)?;
    let scale = (d.len() - 2) as f64;
    let reference_u = exec.try_map_indices(d.len(), |k| {
        let rest = total_u - 2.0 * per_asset_u[k];
        if rest < CANCELLATION_GUARD * total_u {
            pair_sum(d, spec, Some(k))
                .map(|p| p / scale)
                .map_err(|(i, j)| Error::Doubleton { i, j })
        } else {
            Ok(rest / scale)
        }
    })?;
    Ok(EnergyBreakdown {
        total_u,
        per_asset_u,
        reference_u,
        mean_u,
    })
}

fn check_mean(mean_u: f64) -> Result<()> {
    if mean_u > 0.0 && mean_u.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "mean energy must be positive and finite, got {mean_u}"
        )))
    }
}

/// Maximum-entropy density `p(U) = e^{−U/⟨U⟩}/⟨U⟩` on `U ≥ 0`.
pub fn maxent_density(u: f64, mean_u: f64) -> Result<f64> {
    check_mean(mean_u)?;
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("energy must be nonnegative, got {u}")));
    }
    Ok((-u / mean_u).exp() / mean_u)
}

/// `S = U/⟨U⟩ = −ln(p(U)/p(0))`.
pub fn surprisal_total(d: &DistanceMatrix, spec: &PotentialSpec, mean_u: f64) -> Result<f64> {
    check_mean(mean_u)?;
    Ok(total_energy(d, spec)? / mean_u)
}

/// Per-asset surprisal `U_k/⟨U⟩`. A collision yields `f64::INFINITY`
/// rather than an error.
pub fn surprisal_asset(
    d: &DistanceMatrix,
    spec: &PotentialSpec,
    k: usize,
    mean_u: f64,
) -> Result<f64> {
    check_mean(mean_u)?;
    match asset_energy(d, spec, k) {
        Ok(uk) => Ok(uk / mean_u),
        Err(Error::Collision { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}
