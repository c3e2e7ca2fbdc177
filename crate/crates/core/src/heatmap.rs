//! Originality as a field over the plane.
//!
//! Each grid cell holds the score a probe asset would get if it were placed
//! at the cell centre, compared against a fixed 2D point set. The comparand
//! energy of the fixed set does not depend on the probe, so it is computed
//! once and every cell only costs one pass over the points.

use std::io::Write;

use serde::Serialize;

use crate::distances::FeatureVectors;
use crate::energy::pair_sum;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::DistanceMatrix;
use crate::potential::PotentialSpec;
use crate::sum::accumulate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let b = Bounds { x_min, x_max, y_min, y_max };
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::Config(format!("degenerate heatmap bounds {b:?}")));
        }
        Ok(b)
    }

    /// Bounding box of `points`, widened by `pad` times its extent on every
    /// side (at least by `pad` in absolute terms when the extent is zero).
    pub fn around(points: &FeatureVectors, pad: f64) -> Result<Self> {
        check_planar(points)?;
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points.rows() {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let px = if x1 > x0 { pad * (x1 - x0) } else { pad.max(1.0) };
        let py = if y1 > y0 { pad * (y1 - y0) } else { pad.max(1.0) };
        Bounds::new(x0 - px, x1 + px, y0 - py, y1 + py)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// Scores on an `nx × ny` grid, stored row by row from `y_min` upwards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapGrid {
    pub bounds: Bounds,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl HeatmapGrid {
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        cell_center(&self.bounds, self.nx, self.ny, ix, iy)
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    /// `(ix, iy)` of the largest cell value.
    pub fn argmax(&self) -> (usize, usize) {
        let i = (0..self.values.len())
            .max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        (i % self.nx, i / self.nx)
    }

    /// `(ix, iy)` of the smallest strictly positive cell value.
    pub fn argmin_nonzero(&self) -> Option<(usize, usize)> {
        (0..self.values.len())
            .filter(|&i| self.values[i] > 0.0)
            .min_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)))
            .map(|i| (i % self.nx, i / self.nx))
    }

    /// Long-format CSV: `x,y,score`, one line per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "score"])?;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let (x, y) = self.cell_center(ix, iy);
                w.write_record([x.to_string(), y.to_string(), self.get(ix, iy).to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Binary greyscale PGM, brightest at the highest score, top row at `y_max`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let (lo, hi) = self
            .values
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        write!(out, "P5\n{} {}\n255\n", self.nx, self.ny)?;
        let mut pixels = Vec::with_capacity(self.nx * self.ny);
        for iy in (0..self.ny).rev() {
            for ix in 0..self.nx {
                let v = self.get(ix, iy);
                let level = if v.is_finite() { ((v - lo) / span * 255.0).round() } else { 255.0 };
                pixels.push(level.clamp(0.0, 255.0) as u8);
            }
        }
        out.write_all(&pixels)?;
        Ok(())
    }
}

fn cell_center(b: &Bounds, nx: usize, ny: usize, ix: usize, iy: usize) -> (f64, f64) {
    (
        b.x_min + (ix as f64 + 0.5) * (b.x_max - b.x_min) / nx as f64,
        b.y_min + (iy as f64 + 0.5) * (b.y_max - b.y_min) / ny as f64,
    )
}

fn check_planar(points: &FeatureVectors) -> Result<()> {
    if points.dim() != 2 {
        return Err(Error::Config(format!("heatmaps need 2D points, got dimension {}", points.dim())));
    }
    Ok(())
}

/// Precomputed comparand side of a probe score.
struct ProbeField<'a> {
    points: &'a [Vec<f64>],
    spec: PotentialSpec,
    numerator: f64,
}

impl<'a> ProbeField<'a> {
    fn new(points: &'a FeatureVectors, spec: &PotentialSpec) -> Result<Self> {
        check_planar(points)?;
        spec.validate()?;
        if points.len() < 2 {
            return Err(Error::TooFewAssets { n: points.len() + 1, required: 3 });
        }
        let fixed = crate::distances::euclidean_matrix_with(points, Execution::Sequential)?;
        let pairs = pair_sum(&fixed, spec, None).map_err(|(i, j)| Error::Doubleton { i, j })?;
        // N + 1 assets including the probe: prefactor 1/(N − 1) on the ordered sum.
        Ok(ProbeField {
            points: points.rows(),
            spec: *spec,
            numerator: 2.0 * pairs / (points.len() - 1) as f64,
        })
    }

    fn score(&self, x: f64, y: f64) -> f64 {
        let mut terms = Vec::with_capacity(self.points.len());
        for p in self.points {
            let r = ((p[0] - x).powi(2) + (p[1] - y).powi(2)).sqrt();
            if r == 0.0 {
                return 0.0;
            }
            terms.push(self.spec.eval_unchecked(r));
        }
        self.numerator / accumulate(&terms)
    }
}

/// Score of a probe at `(x, y)` against the fixed `points`. A probe on top
/// of a fixed point scores 0.
pub fn probe_score(points: &FeatureVectors, spec: &PotentialSpec, x: f64, y: f64) -> Result<f64> {
    Ok(ProbeField::new(points, spec)?.score(x, y))
}

pub fn heatmap_grid(points: &FeatureVectors, bounds: Bounds, resolution: (usize, usize), spec: &PotentialSpec) -> Result<HeatmapGrid> {
    heatmap_grid_with(points, bounds, resolution, spec, Execution::default())
}

pub fn heatmap_grid_with(
    points: &FeatureVectors,
    bounds: Bounds,
    (nx, ny): (usize, usize),
    spec: &PotentialSpec,
    exec: Execution,
) -> Result<HeatmapGrid> {
    let bounds = Bounds::new(bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max)?;
    if nx == 0 || ny == 0 {
        return Err(Error::Config(format!("heatmap resolution must be positive, got {nx}x{ny}")));
    }
    let field = ProbeField::new(points, spec)?;
    let rows: Vec<Vec<f64>> = exec.map_indices(ny, |iy| {
        (0..nx)
            .map(|ix| {
                let (x, y) = cell_center(&bounds, nx, ny, ix, iy);
                field.score(x, y)
            })
            .collect()
    });
    Ok(HeatmapGrid {
        bounds,
        nx,
        ny,
        values: rows.into_iter().flatten().collect(),
    })
}

/// Matrix of the fixed points plus a probe appended last; used to check
/// the grid against whole-set scoring.
pub fn with_probe(points: &FeatureVectors, x: f64, y: f64) -> Result<DistanceMatrix> {
    let mut rows = points.rows().to_vec();
    rows.push(vec![x, y]);
    crate::distances::euclidean_matrix_with(&FeatureVectors::unlabeled(rows)?, Execution::Sequential)
}
