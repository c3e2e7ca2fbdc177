//! Originality scores.
//!
//! The standard score of asset `k` is the ratio of the comparand-only
//! reference energy to the asset's own energy,
//!
//! ```text
//! O_k = U_ref,k / U_k = 1/(N−2) · Σ_{i≠k} Σ_{j≠i,k} u(r_ij) / Σ_{j≠k} u(r_kj)
//! ```
//!
//! which under the Coulomb potential is the harmonic mean of the distances
//! from `k` to its comparands over the harmonic mean of the distances among
//! the comparands. `O_k = 1` is average originality; a collision with any
//! comparand sends it to 0. For any potential the scores of one set obey
//! `Σ_k 1/((N−2)O_k + 2) = 1`.
//!
//! Variants: the bounded transform `O/(1+O)`, power-mean ratios with
//! exponent `p ≤ 0`, a score restricted to the `J` nearest neighbours of each
//! asset, and `⟨U⟩/U_k` against a caller-supplied mean energy. Any of them
//! can be evaluated in time-ordered mode, where each asset is compared only
//! with strictly earlier ones.

use std::borrow::Cow;
use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::energy::{energy_breakdown, pair_sum, row_sum, EnergyBreakdown, CANCELLATION_GUARD};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::DistanceMatrix;
use crate::means::{check_exponent, finish_mean, generalized_mean, power_term};
use crate::potential::PotentialSpec;
use crate::sum::accumulate;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionPolicy {
    /// An asset coinciding with one of its comparands scores 0.
    #[default]
    ScoreZero,
    /// Such a collision aborts scoring.
    Error,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Standard,
    /// `O/(1+O) ∈ [0, 1)`.
    Bounded,
    /// `M_p(distances from k) / M_p(distances among comparands)`; `p` may be
    /// `-∞` (minimum-distance ratio). The potential is not used.
    GeneralizedMean {
        #[serde(serialize_with = "serialize_exponent")]
        p: f64,
    },
    /// Only the `j` nearest neighbours of each asset contribute.
    /// `include_self_row` adds row `k` itself to the numerator sum.
    JNearest { j: usize, include_self_row: bool },
    /// `⟨U⟩ / U_k`.
    MeanEnergy { mean_u: f64 },
}

fn serialize_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str(if *p < 0.0 { "-inf" } else { "inf" })
    } else {
        s.serialize_f64(*p)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ScoreConfig {
    pub potential: PotentialSpec,
    pub variant: Variant,
    pub time_ordered: bool,
    pub collision_policy: CollisionPolicy,
    /// Collapse coinciding assets onto their first occurrence before scoring.
    pub dedupe: bool,
}

impl ScoreConfig {
    pub fn new(potential: PotentialSpec, variant: Variant) -> Self {
        ScoreConfig {
            potential,
            variant,
            ..Default::default()
        }
    }

    pub fn with_policy(mut self, policy: CollisionPolicy) -> Self {
        self.collision_policy = policy;
        self
    }

    pub fn with_dedupe(mut self, dedupe: bool) -> Self {
        self.dedupe = dedupe;
        self
    }

    pub fn with_time_ordered(mut self, time_ordered: bool) -> Self {
        self.time_ordered = time_ordered;
        self
    }

    /// Checks parameters that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        match self.variant {
            Variant::GeneralizedMean { p } => check_exponent(p),
            Variant::JNearest { j: 0, .. } => Err(Error::Config("nearest-comparand count must be at least 1".into())),
            Variant::MeanEnergy { mean_u } if !(mean_u > 0.0 && mean_u.is_finite()) => Err(Error::Config(format!(
                "mean energy must be positive and finite, got {mean_u}"
            ))),
            _ => Ok(()),
        }
    }

    /// Smallest set size (asset plus comparands) the variant can score.
    fn min_assets(&self) -> usize {
        match self.variant {
            Variant::MeanEnergy { .. } => 2,
            Variant::JNearest { j, .. } => (j + 2).max(3),
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssetFlag {
    /// Scored 0 because it coincides with comparand `with`.
    Collision { with: usize },
    /// Removed by dedupe as a copy of asset `of`; scored 0.
    Duplicate { of: usize },
    /// Time-ordered mode found too few strictly earlier comparands.
    Unscorable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    /// `None` only for unscorable assets in time-ordered mode.
    pub scores: Vec<Option<f64>>,
    /// 1-based; descending score, ties broken by ascending index.
    pub ranks: Vec<Option<usize>>,
    pub flags: Vec<Option<AssetFlag>>,
    /// Present when the whole set was scored at once without collisions.
    pub energies: Option<EnergyBreakdown>,
    /// `Σ_k 1/((N−2)O_k + 2) − 1` over standard scores, when defined.
    pub normalization_residual: Option<f64>,
    pub config: ScoreConfig,
    /// Time-ordered mode: the comparands each asset was scored against.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparands: Option<Vec<Vec<usize>>>,
    /// Time-ordered mode: pairs sharing a date, never comparands of each other.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub same_date_pairs: Vec<(usize, usize)>,
}

impl ScoreReport {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// All scores, if every asset was scorable.
    pub fn complete_scores(&self) -> Option<Vec<f64>> {
        self.scores.iter().copied().collect()
    }
}

/// Result of scoring one asset before the collision policy is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Score(f64),
    Collision(usize),
}

impl Outcome {
    fn resolve(self, policy: CollisionPolicy, k: usize) -> Result<f64> {
        match (self, policy) {
            (Outcome::Score(s), _) => Ok(s),
            (Outcome::Collision(_), CollisionPolicy::ScoreZero) => Ok(0.0),
            (Outcome::Collision(j), CollisionPolicy::Error) => Err(Error::Collision { i: k, j }),
        }
    }
}

fn require(d: &DistanceMatrix, required: usize) -> Result<()> {
    if d.len() < required {
        Err(Error::TooFewAssets { n: d.len(), required })
    } else {
        Ok(())
    }
}

fn check_index(d: &DistanceMatrix, k: usize) -> Result<()> {
    if k < d.len() {
        Ok(())
    } else {
        Err(Error::Config(format!("asset index {k} out of range for {} assets", d.len())))
    }
}

fn comparand_doubleton(d: &DistanceMatrix, k: usize) -> Option<(usize, usize)> {
    (0..d.len())
        .filter(|&i| i != k)
        .find_map(|i| ((i + 1)..d.len()).find(|&j| j != k && d.get(i, j) == 0.0).map(|j| (i, j)))
}

fn first_collision(d: &DistanceMatrix, k: usize) -> Option<usize> {
    d.row(k).iter().enumerate().position(|(j, &r)| j != k && r == 0.0)
}

fn standard_one(d: &DistanceMatrix, spec: &PotentialSpec, k: usize) -> Result<Outcome> {
    require(d, 3)?;
    check_index(d, k)?;
    let pairs = pair_sum(d, spec, Some(k)).map_err(|(i, j)| Error::Doubleton { i, j })?;
    Ok(match row_sum(d, spec, k) {
        Ok(own) => Outcome::Score(2.0 * pairs / ((d.len() - 2) as f64 * own)),
        Err(j) => Outcome::Collision(j),
    })
}

/// Standard score `O_k`, evaluated directly from the comparand pair sum.
/// A collision of `k` with a comparand scores 0; coinciding comparands are
/// an error.
pub fn score_asset(d: &DistanceMatrix, spec: &PotentialSpec, k: usize) -> Result<f64> {
    score_asset_with(d, spec, k, CollisionPolicy::ScoreZero)
}

pub fn score_asset_with(
    d: &DistanceMatrix,
    spec: &PotentialSpec,
    k: usize,
    policy: CollisionPolicy,
) -> Result<f64> {
    standard_one(d, spec, k)?.resolve(policy, k)
}

fn mean_energy_one(d: &DistanceMatrix, spec: &PotentialSpec, k: usize, mean_u: f64) -> Result<Outcome> {
    require(d, 2)?;
    check_index(d, k)?;
    if !(mean_u > 0.0 && mean_u.is_finite()) {
        return Err(Error::Domain(format!("mean energy must be positive and finite, got {mean_u}")));
    }
    Ok(match row_sum(d, spec, k) {
        Ok(own) => Outcome::Score(mean_u / (0.5 * own)),
        Err(j) => Outcome::Collision(j),
    })
}

/// `⟨U⟩ / U_k`, the reciprocal of the per-asset surprisal. Collisions score 0.
pub fn score_vs_mean_energy(d: &DistanceMatrix, spec: &PotentialSpec, k: usize, mean_u: f64) -> Result<f64> {
    mean_energy_one(d, spec, k, mean_u)?.resolve(CollisionPolicy::ScoreZero, k)
}

/// Maps a score onto `[0, 1)` as `o/(1+o)`, preserving order.
pub fn bounded_score(o: f64) -> Result<f64> {
    if o.is_nan() || o < 0.0 {
        return Err(Error::Domain(format!("score must be nonnegative, got {o}")));
    }
    Ok(if o.is_infinite() { 1.0 } else { o / (1.0 + o) })
}

fn generalized_mean_one(d: &DistanceMatrix, p: f64, k: usize) -> Result<Outcome> {
    check_exponent(p)?;
    require(d, 3)?;
    check_index(d, k)?;
    let n = d.len();
    let mut among = Vec::with_capacity((n - 1) * (n - 2) / 2);
    for i in (0..n).filter(|&i| i != k) {
        for j in ((i + 1)..n).filter(|&j| j != k) {
            let r = d.get(i, j);
            if r == 0.0 {
                return Err(Error::Doubleton { i, j });
            }
            among.push(r);
        }
    }
    if let Some(j) = first_collision(d, k) {
        return Ok(Outcome::Collision(j));
    }
    let own: Vec<f64> = d.row(k).iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &r)| r).collect();
    Ok(Outcome::Score(generalized_mean(&own, p)? / generalized_mean(&among, p)?))
}

/// Ratio of the power mean of the distances from `k` to its comparands to
/// the power mean of the distances among the comparands, `p ≤ 0`.
/// `p = -1` coincides with the Coulomb standard score.
pub fn generalized_mean_score(d: &DistanceMatrix, p: f64, k: usize) -> Result<f64> {
    generalized_mean_one(d, p, k)?.resolve(CollisionPolicy::ScoreZero, k)
}

/// Sum of `u` over the `j` nearest neighbours of asset `i`, ties broken by
/// neighbour index. `Err(m)` if neighbour `m` among them coincides with `i`.
fn nearest_sum(d: &DistanceMatrix, spec: &PotentialSpec, i: usize, j: usize) -> Result<f64, usize> {
    let mut neighbours: Vec<(f64, usize)> = d
        .row(i)
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != i)
        .map(|(m, &r)| (r, m))
        .collect();
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if j < neighbours.len() {
        neighbours.select_nth_unstable_by(j - 1, by_distance);
        neighbours.truncate(j);
    }
    neighbours.sort_unstable_by(by_distance);
    let mut terms = Vec::with_capacity(j);
    for &(r, m) in &neighbours {
        if r == 0.0 {
            return Err(m);
        }
        terms.push(spec.eval_unchecked(r));
    }
    Ok(accumulate(&terms))
}

fn check_nearest(d: &DistanceMatrix, j: usize) -> Result<()> {
    require(d, 3)?;
    if j == 0 || j > d.len() - 2 {
        return Err(Error::Config(format!(
            "nearest-comparand count must lie in 1..={} for {} assets, got {j}",
            d.len() - 2,
            d.len()
        )));
    }
    Ok(())
}

fn j_nearest_one(d: &DistanceMatrix, spec: &PotentialSpec, k: usize, j: usize, include_self_row: bool) -> Result<Outcome> {
    check_nearest(d, j)?;
    check_index(d, k)?;
    if let Some((a, b)) = comparand_doubleton(d, k) {
        return Err(Error::Doubleton { i: a, j: b });
    }
    let own = match nearest_sum(d, spec, k, j) {
        Ok(s) => s,
        Err(m) => return Ok(Outcome::Collision(m)),
    };
    let mut rows = Vec::with_capacity(d.len());
    for i in (0..d.len()).filter(|&i| include_self_row || i != k) {
        rows.push(nearest_sum(d, spec, i, j).expect("collisions excluded above"));
    }
    Ok(Outcome::Score(accumulate(&rows) / ((d.len() - 1) as f64 * own)))
}

/// Score restricted to nearest neighbours: every row contributes only its
/// `j` smallest distances, and the comparand rows are averaged with a
/// `1/(N−1)` prefactor. By default row `k` is left out of the numerator;
/// `include_self_row` sums over all `N` rows instead.
pub fn j_nearest_score(
    d: &DistanceMatrix,
    spec: &PotentialSpec,
    k: usize,
    j: usize,
    include_self_row: bool,
) -> Result<f64> {
    j_nearest_one(d, spec, k, j, include_self_row)?.resolve(CollisionPolicy::ScoreZero, k)
}

fn score_single(d: &DistanceMatrix, config: &ScoreConfig, k: usize) -> Result<Outcome> {
    let spec = &config.potential;
    match config.variant {
        Variant::Standard => standard_one(d, spec, k),
        // Bounded scores are transformed after ranking; see `finish_report`.
        Variant::Bounded => standard_one(d, spec, k),
        Variant::GeneralizedMean { p } => generalized_mean_one(d, p, k),
        Variant::JNearest { j, include_self_row } => j_nearest_one(d, spec, k, j, include_self_row),
        Variant::MeanEnergy { mean_u } => mean_energy_one(d, spec, k, mean_u),
    }
}

/// Indices in `order`, minus later copies of earlier entries. Returns the
/// kept indices and `(duplicate, original)` pairs.
pub fn dedupe(d: &DistanceMatrix, order: &[usize]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut kept = Vec::with_capacity(order.len());
    let mut dups = Vec::new();
    let mut removed = vec![false; d.len()];
    for (pos, &i) in order.iter().enumerate() {
        if removed[i] {
            continue;
        }
        kept.push(i);
        for &j in &order[pos + 1..] {
            if !removed[j] && d.get(i, j) == 0.0 {
                removed[j] = true;
                dups.push((j, i));
            }
        }
    }
    dups.sort_unstable();
    (kept, dups)
}

/// Scores every asset under `config` on the default execution strategy.
pub fn score_all(d: &DistanceMatrix, config: &ScoreConfig) -> Result<ScoreReport> {
    score_all_with(d, config, Execution::default())
}

pub fn score_all_with(d: &DistanceMatrix, config: &ScoreConfig, exec: Execution) -> Result<ScoreReport> {
    config.validate()?;
    if config.time_ordered {
        return Err(Error::Config("time-ordered scoring needs dates; use time_ordered_scores".into()));
    }
    let n = d.len();
    let (kept, dups) = if config.dedupe {
        dedupe(d, &(0..n).collect::<Vec<_>>())
    } else {
        ((0..n).collect(), Vec::new())
    };
    if let (CollisionPolicy::Error, Some(&(dup, of))) = (config.collision_policy, dups.first()) {
        return Err(Error::Collision { i: dup, j: of });
    }
    let sub: Cow<DistanceMatrix> = if dups.is_empty() { Cow::Borrowed(d) } else { Cow::Owned(d.submatrix(&kept)) };
    require(&sub, config.min_assets())?;
    if let Variant::JNearest { j, .. } = config.variant {
        check_nearest(&sub, j)?;
    }

    let zero_pairs = sub.doubletons();
    let collision_free = zero_pairs.is_empty();
    if !collision_free && !matches!(config.variant, Variant::MeanEnergy { .. }) {
        let (i, j) = zero_pairs[0];
        return Err(Error::Doubleton { i: kept[i], j: kept[j] });
    }

    let outcomes = fast_scores(&sub, config, exec)?;

    let mut scores = vec![None; n];
    let mut flags = vec![None; n];
    for (pos, outcome) in outcomes.into_iter().enumerate() {
        let k = kept[pos];
        scores[k] = Some(outcome.resolve(config.collision_policy, k).map_err(|e| match e {
            Error::Collision { i, j } => Error::Collision { i, j: kept[j] },
            e => e,
        })?);
        if let Outcome::Collision(j) = outcome {
            flags[k] = Some(AssetFlag::Collision { with: kept[j] });
        }
    }
    for &(dup, of) in &dups {
        scores[dup] = Some(0.0);
        flags[dup] = Some(AssetFlag::Duplicate { of });
    }

    let (energies, normalization_residual) = if dups.is_empty() && collision_free && n >= 3 {
        let mean_u = match config.variant {
            Variant::MeanEnergy { mean_u } => Some(mean_u),
            _ => None,
        };
        let energies = energy_breakdown(d, &config.potential, mean_u, exec)?;
        let residual = match config.variant {
            Variant::Standard => normalization_residual(&scores.iter().map(|s| s.unwrap()).collect::<Vec<_>>()),
            _ => {
                let standard = standard_from_energies(&energies);
                normalization_residual(&standard)
            }
        };
        (Some(energies), Some(residual))
    } else {
        (None, None)
    };

    let (scores, ranks) = rank_then_transform(scores, &config.variant);
    Ok(ScoreReport {
        ranks,
        scores,
        flags,
        energies,
        normalization_residual,
        config: *config,
        comparands: None,
        same_date_pairs: Vec::new(),
    })
}

/// Ranks by the underlying score, then applies the bounded transform, which
/// is strictly monotone but saturates at 1 in floating point for `O ≳ 2⁵³`.
fn rank_then_transform(mut scores: Vec<Option<f64>>, variant: &Variant) -> (Vec<Option<f64>>, Vec<Option<usize>>) {
    let ranks = rank_descending(&scores);
    if *variant == Variant::Bounded {
        for s in scores.iter_mut().flatten() {
            *s = if s.is_infinite() { 1.0 } else { *s / (1.0 + *s) };
        }
    }
    (scores, ranks)
}

fn standard_from_energies(e: &EnergyBreakdown) -> Vec<f64> {
    let scale = (e.per_asset_u.len() - 2) as f64;
    e.per_asset_u.iter().map(|&uk| (e.total_u - 2.0 * uk) / (scale * uk)).collect()
}

/// `Σ_k 1/((N−2)O_k + 2) − 1`; zero for any complete set of standard scores.
pub fn normalization_residual(scores: &[f64]) -> f64 {
    let scale = scores.len() as f64 - 2.0;
    let terms: Vec<f64> = scores.iter().map(|&o| 1.0 / (scale * o + 2.0)).collect();
    accumulate(&terms) - 1.0
}

/// 1-based ranks by descending score; ties go to the lower index; `None`
/// entries are left unranked.
pub fn rank_descending(scores: &[Option<f64>]) -> Vec<Option<usize>> {
    let mut order: Vec<(usize, f64)> = scores.iter().enumerate().filter_map(|(i, s)| s.map(|s| (i, s))).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    let mut ranks = vec![None; scores.len()];
    for (rank, (i, _)) in order.into_iter().enumerate() {
        ranks[i] = Some(rank + 1);
    }
    ranks
}

/// Whole-set scoring in `O(N²)` per variant (`O(N² log N)` for nearest
/// neighbours). Requires a matrix without doubletons except for the
/// mean-energy variant.
fn fast_scores(d: &DistanceMatrix, config: &ScoreConfig, exec: Execution) -> Result<Vec<Outcome>> {
    let n = d.len();
    let spec = &config.potential;
    match config.variant {
        Variant::Standard | Variant::Bounded => {
            let rows = exec.map_indices(n, |i| row_sum(d, spec, i).expect("doubletons excluded"));
            let total = accumulate(&rows);
            let scale = (n - 2) as f64;
            Ok(exec.map_indices(n, |k| {
                let mut comparands = total - 2.0 * rows[k];
                if comparands < CANCELLATION_GUARD * total {
                    comparands = 2.0 * pair_sum(d, spec, Some(k)).expect("doubletons excluded");
                }
                Outcome::Score(comparands / (scale * rows[k]))
            }))
        }
        Variant::MeanEnergy { mean_u } => Ok(exec.map_indices(n, |k| match row_sum(d, spec, k) {
            Ok(own) => Outcome::Score(mean_u / (0.5 * own)),
            Err(j) => Outcome::Collision(j),
        })),
        Variant::GeneralizedMean { p } if p == f64::NEG_INFINITY => {
            let two_nearest: Vec<[(f64, usize); 2]> = exec.map_indices(n, |i| {
                let mut best = [(f64::INFINITY, usize::MAX); 2];
                for (j, &r) in d.row(i).iter().enumerate().filter(|&(j, _)| j != i) {
                    if r < best[0].0 {
                        best = [(r, j), best[0]];
                    } else if r < best[1].0 {
                        best[1] = (r, j);
                    }
                }
                best
            });
            Ok(exec.map_indices(n, |k| {
                let among = (0..n)
                    .filter(|&i| i != k)
                    .map(|i| {
                        let [first, second] = two_nearest[i];
                        if first.1 == k { second.0 } else { first.0 }
                    })
                    .fold(f64::INFINITY, f64::min);
                Outcome::Score(two_nearest[k][0].0 / among)
            }))
        }
        Variant::GeneralizedMean { p } => {
            let floor = d
                .as_slice()
                .iter()
                .copied()
                .filter(|&r| r > 0.0)
                .fold(f64::INFINITY, f64::min);
            let term = |r: f64| power_term(r / floor, p);
            let rows = exec.map_indices(n, |i| {
                let terms: Vec<f64> = d.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &r)| term(r)).collect();
                accumulate(&terms)
            });
            let total = accumulate(&rows);
            let pairs = (n - 1) * (n - 2) / 2;
            Ok(exec.map_indices(n, |k| {
                let mut among = 0.5 * (total - 2.0 * rows[k]);
                if among < CANCELLATION_GUARD * 0.5 * total {
                    let mut row_totals = Vec::with_capacity(n);
                    for i in (0..n).filter(|&i| i != k) {
                        let terms: Vec<f64> = ((i + 1)..n).filter(|&j| j != k).map(|j| term(d.get(i, j))).collect();
                        row_totals.push(accumulate(&terms));
                    }
                    among = accumulate(&row_totals);
                }
                Outcome::Score(finish_mean(rows[k], n - 1, p) / finish_mean(among, pairs, p))
            }))
        }
        Variant::JNearest { j, include_self_row } => {
            let rows = exec.map_indices(n, |i| nearest_sum(d, spec, i, j).expect("doubletons excluded"));
            let total = accumulate(&rows);
            let prefactor = (n - 1) as f64;
            Ok(exec.map_indices(n, |k| {
                let numerator = if include_self_row {
                    total
                } else {
                    let rest = total - rows[k];
                    if rest < CANCELLATION_GUARD * total {
                        let others: Vec<f64> = rows.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &r)| r).collect();
                        accumulate(&others)
                    } else {
                        rest
                    }
                };
                Outcome::Score(numerator / (prefactor * rows[k]))
            }))
        }
    }
}

/// Scores each asset against the assets dated strictly before it.
///
/// An asset with fewer than two earlier comparands (or too few for the
/// configured `J`) is flagged [`AssetFlag::Unscorable`] and left without a
/// score. Assets sharing a date are never comparands of one another.
pub fn time_ordered_scores<T: Ord + Sync>(d: &DistanceMatrix, dates: &[T], config: &ScoreConfig) -> Result<ScoreReport> {
    time_ordered_scores_with(d, dates, config, Execution::default())
}

pub fn time_ordered_scores_with<T: Ord + Sync>(
    d: &DistanceMatrix,
    dates: &[T],
    config: &ScoreConfig,
    exec: Execution,
) -> Result<ScoreReport> {
    config.validate()?;
    let n = d.len();
    require(d, 3)?;
    if dates.len() != n {
        return Err(Error::Config(format!("{} dates given for {n} assets", dates.len())));
    }
    let mut same_date_pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if dates[i] == dates[j] {
                same_date_pairs.push((i, j));
            }
        }
    }
    let min_assets = config.min_assets();

    type Entry = (Option<f64>, Option<AssetFlag>, Vec<usize>);
    let entries: Vec<Entry> = exec.try_map_indices(n, |k| -> Result<Entry> {
        let mut earlier: Vec<usize> = (0..n).filter(|&i| dates[i] < dates[k]).collect();
        earlier.sort_by(|&a, &b| dates[a].cmp(&dates[b]).then(a.cmp(&b)));
        if config.dedupe {
            earlier = dedupe(d, &earlier).0;
        }
        if earlier.len() + 1 < min_assets {
            return Ok((None, Some(AssetFlag::Unscorable), earlier));
        }
        let mut members = earlier.clone();
        members.push(k);
        let sub = d.submatrix(&members);
        let outcome = score_single(&sub, config, members.len() - 1).map_err(|e| match e {
            Error::Doubleton { i, j } => Error::Doubleton { i: members[i], j: members[j] },
            e => e,
        })?;
        Ok(match outcome {
            Outcome::Score(s) => (Some(s), None, earlier),
            Outcome::Collision(j) => {
                let with = members[j];
                if config.collision_policy == CollisionPolicy::Error {
                    return Err(Error::Collision { i: k, j: with });
                }
                (Some(0.0), Some(AssetFlag::Collision { with }), earlier)
            }
        })
    })?;

    let mut scores = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    let mut comparands = Vec::with_capacity(n);
    for (s, f, c) in entries {
        scores.push(s);
        flags.push(f);
        comparands.push(c);
    }
    let (scores, ranks) = rank_then_transform(scores, &config.variant);
    Ok(ScoreReport {
        ranks,
        scores,
        flags,
        energies: None,
        normalization_residual: None,
        config: *config,
        comparands: Some(comparands),
        same_date_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{emoji_matrix, equilateral, line};
    use approx::assert_relative_eq;

    const C: PotentialSpec = PotentialSpec::Coulomb;
    const EMOJI_SCORES: [f64; 6] = [0.73484, 0.79811, 0.93415, 1.02022, 1.25286, 1.52325];

    #[test]
    fn midpoint_and_endpoints() {
        let d = line(&[0.0, 0.5, 1.0]);
        assert_eq!(score_asset(&d, &C, 1).unwrap(), 0.5);
        assert_relative_eq!(score_asset(&d, &C, 0).unwrap(), 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(score_asset(&d, &C, 2).unwrap(), 4.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn equilateral_scores_one() {
        for spec in [C, PotentialSpec::Screened { alpha: 0.7 }, PotentialSpec::Power { n: 3 }] {
            let d = equilateral(5, 2.0);
            for k in 0..5 {
                assert_relative_eq!(score_asset(&d, &spec, k).unwrap(), 1.0, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn emoji_scores() {
        let d = emoji_matrix();
        for (k, &expected) in EMOJI_SCORES.iter().enumerate() {
            assert!((score_asset(&d, &C, k).unwrap() - expected).abs() < 1e-5);
        }
        let report = score_all(&d, &ScoreConfig::default()).unwrap();
        assert!(report.normalization_residual.unwrap().abs() < 1e-9);
        assert_eq!(report.ranks, vec![Some(6), Some(5), Some(4), Some(3), Some(2), Some(1)]);
    }

    #[test]
    fn score_all_line() {
        let report = score_all(&line(&[0.0, 0.5, 1.0]), &ScoreConfig::default()).unwrap();
        let s = report.complete_scores().unwrap();
        assert_relative_eq!(s[0], 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(s[1], 0.5, max_relative = 1e-14);
        assert_relative_eq!(s[2], 4.0 / 3.0, max_relative = 1e-14);
        assert!(report.normalization_residual.unwrap().abs() < 1e-12);
        assert_eq!(report.ranks, vec![Some(1), Some(3), Some(2)]);
    }

    #[test]
    fn too_few_assets() {
        let d = line(&[0.0, 1.0]);
        assert!(matches!(score_asset(&d, &C, 0), Err(Error::TooFewAssets { n: 2, required: 3 })));
        assert!(matches!(score_all(&d, &ScoreConfig::default()), Err(Error::TooFewAssets { .. })));
    }

    #[test]
    fn collision_scores_zero_and_doubleton_errors() {
        let d = line(&[0.0, 0.0, 1.0, 2.5]);
        assert_eq!(score_asset(&d, &C, 0).unwrap(), 0.0);
        assert!(matches!(
            score_asset_with(&d, &C, 0, CollisionPolicy::Error),
            Err(Error::Collision { i: 0, j: 1 })
        ));
        assert!(matches!(score_asset(&d, &C, 2), Err(Error::Doubleton { i: 0, j: 1 })));
        assert!(matches!(score_all(&d, &ScoreConfig::default()), Err(Error::Doubleton { i: 0, j: 1 })));
    }

    #[test]
    fn dedupe_collapses_copies() {
        let d = line(&[0.0, 0.0, 1.0, 2.5, 1.0]);
        let report = score_all(&d, &ScoreConfig::default().with_dedupe(true)).unwrap();
        assert_eq!(report.scores[1], Some(0.0));
        assert_eq!(report.flags[1], Some(AssetFlag::Duplicate { of: 0 }));
        assert_eq!(report.flags[4], Some(AssetFlag::Duplicate { of: 2 }));
        let kept = line(&[0.0, 1.0, 2.5]);
        assert_relative_eq!(report.scores[2].unwrap(), score_asset(&kept, &C, 1).unwrap(), max_relative = 1e-14);
        assert!(report.energies.is_none());
        assert!(matches!(
            score_all(&d, &ScoreConfig::default().with_dedupe(true).with_policy(CollisionPolicy::Error)),
            Err(Error::Collision { i: 1, j: 0 })
        ));
    }

    #[test]
    fn mean_energy_variant() {
        let d = equilateral(3, 1.0);
        assert_eq!(score_vs_mean_energy(&d, &C, 0, 1.0).unwrap(), 1.0);
        let e = emoji_matrix();
        for k in 0..6 {
            let uref = crate::energy::reference_energy(&e, &C, k).unwrap();
            assert_relative_eq!(score_vs_mean_energy(&e, &C, k, uref).unwrap(), score_asset(&e, &C, k).unwrap(), max_relative = 1e-12);
            let s1 = score_vs_mean_energy(&e, &C, k, 1.5).unwrap();
            assert_relative_eq!(score_vs_mean_energy(&e, &C, k, 3.0).unwrap(), 2.0 * s1, max_relative = 1e-15);
        }
        // Two assets suffice against an external mean.
        assert_eq!(score_vs_mean_energy(&line(&[0.0, 2.0]), &C, 0, 1.0).unwrap(), 4.0);
        // Collisions score 0 without dedupe for this variant.
        let cfg = ScoreConfig::new(C, Variant::MeanEnergy { mean_u: 1.0 });
        let report = score_all(&line(&[0.0, 0.0, 1.0]), &cfg).unwrap();
        assert_eq!(report.scores[0], Some(0.0));
        assert_eq!(report.flags[1], Some(AssetFlag::Collision { with: 0 }));
        assert_eq!(report.scores[2], Some(1.0));
    }

    #[test]
    fn bounded_values() {
        assert_eq!(bounded_score(0.0).unwrap(), 0.0);
        assert_eq!(bounded_score(1.0).unwrap(), 0.5);
        assert_relative_eq!(bounded_score(0.5).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(bounded_score(f64::INFINITY).unwrap(), 1.0);
        assert!(bounded_score(-0.1).is_err());
        assert!(bounded_score(f64::NAN).is_err());
    }

    #[test]
    fn bounded_variant_matches_energy_form() {
        let d = emoji_matrix();
        let report = score_all(&d, &ScoreConfig::new(C, Variant::Bounded)).unwrap();
        for k in 0..6 {
            let uref = crate::energy::reference_energy(&d, &C, k).unwrap();
            let uk = crate::energy::asset_energy(&d, &C, k).unwrap();
            assert_relative_eq!(report.scores[k].unwrap(), uref / (uref + uk), max_relative = 1e-12);
        }
    }

    #[test]
    fn generalized_mean_examples() {
        let e = emoji_matrix();
        assert_relative_eq!(generalized_mean_score(&e, -1.0, 5).unwrap(), score_asset(&e, &C, 5).unwrap(), max_relative = 1e-12);
        assert!((generalized_mean_score(&e, -1.0, 5).unwrap() - 1.52325).abs() < 1e-5);
        assert_relative_eq!(generalized_mean_score(&equilateral(4, 3.0), 0.0, 2).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(generalized_mean_score(&line(&[0.0, 0.5, 1.0]), f64::NEG_INFINITY, 1).unwrap(), 0.5);
        assert!(generalized_mean_score(&e, 0.5, 0).is_err());
        assert_eq!(generalized_mean_score(&line(&[0.0, 0.0, 1.0]), -2.0, 0).unwrap(), 0.0);
        assert!(matches!(generalized_mean_score(&line(&[0.0, 0.0, 1.0]), -2.0, 2), Err(Error::Doubleton { .. })));
    }

    #[test]
    fn j_nearest_examples() {
        for j in 1..=3 {
            for k in 0..5 {
                assert_relative_eq!(j_nearest_score(&equilateral(5, 1.0), &C, k, j, false).unwrap(), 1.0, max_relative = 1e-14);
            }
        }
        assert_relative_eq!(j_nearest_score(&line(&[0.0, 0.5, 1.0]), &C, 1, 1, false).unwrap(), 1.0, max_relative = 1e-15);
        // Literal reading adds row k: (2 + 2 + 2) / (2 · 2).
        assert_relative_eq!(j_nearest_score(&line(&[0.0, 0.5, 1.0]), &C, 1, 1, true).unwrap(), 1.5, max_relative = 1e-15);
        let d = line(&[0.0, 0.5, 1.0]);
        assert!(j_nearest_score(&d, &C, 0, 0, false).is_err());
        assert!(j_nearest_score(&d, &C, 0, 2, false).is_err());
    }

    #[test]
    fn j_nearest_outlier_dominates() {
        let d = line(&[0.0, 0.1, 0.25, 0.3, 0.42, 9.0]);
        let s: Vec<f64> = (0..6).map(|k| j_nearest_score(&d, &C, k, 1, false).unwrap()).collect();
        assert!(s[..5].iter().all(|&x| x < s[5]));
    }

    #[test]
    fn fast_routes_match_direct_evaluation() {
        let d = crate::testutil::random_points(37, 3, 11);
        let variants = [
            Variant::Standard,
            Variant::Bounded,
            Variant::GeneralizedMean { p: -1.0 },
            Variant::GeneralizedMean { p: 0.0 },
            Variant::GeneralizedMean { p: -3.5 },
            Variant::GeneralizedMean { p: f64::NEG_INFINITY },
            Variant::JNearest { j: 1, include_self_row: false },
            Variant::JNearest { j: 4, include_self_row: true },
            Variant::MeanEnergy { mean_u: 2.0 },
        ];
        for spec in [C, PotentialSpec::Screened { alpha: 1.3 }, PotentialSpec::Power { n: 4 }] {
            for variant in variants {
                let cfg = ScoreConfig::new(spec, variant);
                for exec in [Execution::Sequential, Execution::Parallel] {
                    let report = score_all_with(&d, &cfg, exec).unwrap();
                    for k in 0..d.len() {
                        let mut direct = score_single(&d, &cfg, k).unwrap().resolve(CollisionPolicy::Error, k).unwrap();
                        if variant == Variant::Bounded {
                            direct = bounded_score(direct).unwrap();
                        }
                        assert_relative_eq!(report.scores[k].unwrap(), direct, max_relative = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cancellation_guard_keeps_precision() {
        // Asset 0 nearly coincides with asset 1, so U is dominated by that pair.
        let d = line(&[0.0, 1e-9, 1.0, 2.0]);
        let report = score_all(&d, &ScoreConfig::default()).unwrap();
        for k in 0..4 {
            assert_relative_eq!(report.scores[k].unwrap(), score_asset(&d, &C, k).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn time_ordered_basics() {
        let d = line(&[0.0, 1.0, 0.5]);
        let report = time_ordered_scores(&d, &[1, 2, 3], &ScoreConfig::default()).unwrap();
        assert_eq!(report.scores[0], None);
        assert_eq!(report.scores[1], None);
        assert_eq!(report.flags[0], Some(AssetFlag::Unscorable));
        assert_eq!(report.scores[2], Some(0.5));
        assert_eq!(report.comparands.as_ref().unwrap()[2], vec![0, 1]);
        assert_eq!(report.ranks, vec![None, None, Some(1)]);

        let same = time_ordered_scores(&d, &[7, 7, 7], &ScoreConfig::default()).unwrap();
        assert!(same.flags.iter().all(|f| *f == Some(AssetFlag::Unscorable)));
        assert_eq!(same.same_date_pairs, vec![(0, 1), (0, 2), (1, 2)]);

        assert!(time_ordered_scores(&line(&[0.0, 1.0]), &[1, 2], &ScoreConfig::default()).is_err());
        assert!(time_ordered_scores(&d, &[1, 2], &ScoreConfig::default()).is_err());
    }

    #[test]
    fn time_ordered_collision_with_prior_asset() {
        let d = line(&[0.0, 1.0, 3.0, 1.0]);
        let report = time_ordered_scores(&d, &[1, 2, 3, 4], &ScoreConfig::default()).unwrap();
        assert_eq!(report.scores[3], Some(0.0));
        assert_eq!(report.flags[3], Some(AssetFlag::Collision { with: 1 }));
        assert!(time_ordered_scores(&d, &[1, 2, 3, 4], &ScoreConfig::default().with_policy(CollisionPolicy::Error)).is_err());
    }
}
