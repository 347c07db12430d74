//! Parameter schedules and convergence sweeps.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::TraceLimits;
use crate::error::{config, Result};
use crate::hollows::ShapeSpec;
use crate::measures::{elastic_fraction, estimate_measure_unchecked, functional_f, retro_fraction, MeasureOptions, PATHOLOGY_LIMIT};

/// Default tube along the diagonal: `δ = ε²`, `a = 4/ε`.
pub fn tube_schedule(eps: f64) -> ShapeSpec {
    ShapeSpec::Tube { eps, delta: eps * eps, length: 4.0 / eps, phase: 0.0 }
}

/// Default notched angle: `β = α²`, truncated at `α²`.
pub fn notched_schedule(alpha: f64) -> ShapeSpec {
    ShapeSpec::NotchedAngle { alpha, beta: alpha * alpha, cut: alpha * alpha }
}

fn default_tol() -> f64 {
    1e-6
}

/// Grid of a sweep. Missing auxiliary lists fall back to the default
/// schedules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepGrid {
    Rectangle {
        eps: Vec<f64>,
    },
    Triangle {
        eps: Vec<f64>,
    },
    Mushroom {
        eps: Vec<f64>,
    },
    Tube {
        eps: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<Vec<f64>>,
    },
    NotchedAngle {
        alpha: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cut: Option<Vec<f64>>,
    },
}

fn aux(values: &Option<Vec<f64>>, n: usize, what: &str) -> Result<Option<Vec<f64>>> {
    match values {
        Some(v) if v.len() != n => Err(config(format!("{what} has {} entries for {n} grid points", v.len()))),
        other => Ok(other.clone()),
    }
}

impl SweepGrid {
    fn driver(&self) -> &[f64] {
        match self {
            SweepGrid::Rectangle { eps } | SweepGrid::Triangle { eps } | SweepGrid::Mushroom { eps } => eps,
            SweepGrid::Tube { eps, .. } => eps,
            SweepGrid::NotchedAngle { alpha, .. } => alpha,
        }
    }

    /// Hollows along the grid, in order.
    pub fn shapes(&self) -> Result<Vec<ShapeSpec>> {
        let d = self.driver();
        if d.is_empty() {
            return Err(config("sweep grid is empty"));
        }
        let up = d.windows(2).all(|w| w[0] < w[1]);
        let down = d.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(config("sweep grid must be strictly monotone in its driving parameter"));
        }
        let n = d.len();
        Ok(match self {
            SweepGrid::Rectangle { eps } => eps.iter().map(|&eps| ShapeSpec::Rectangle { eps }).collect(),
            SweepGrid::Triangle { eps } => eps.iter().map(|&eps| ShapeSpec::Triangle { eps }).collect(),
            SweepGrid::Mushroom { eps } => eps.iter().map(|&eps| ShapeSpec::Mushroom { eps }).collect(),
            SweepGrid::Tube { eps, delta, length } => {
                let (delta, length) = (aux(delta, n, "delta")?, aux(length, n, "length")?);
                eps.iter()
                    .enumerate()
                    .map(|(i, &e)| {
                        let ShapeSpec::Tube { delta: d0, length: l0, .. } = tube_schedule(e) else { unreachable!() };
                        ShapeSpec::Tube {
                            eps: e,
                            delta: delta.as_ref().map_or(d0, |v| v[i]),
                            length: length.as_ref().map_or(l0, |v| v[i]),
                            phase: 0.0,
                        }
                    })
                    .collect()
            }
            SweepGrid::NotchedAngle { alpha, beta, cut } => {
                let (beta, cut) = (aux(beta, n, "beta")?, aux(cut, n, "cut")?);
                alpha
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| ShapeSpec::NotchedAngle {
                        alpha: a,
                        beta: beta.as_ref().map_or(a * a, |v| v[i]),
                        cut: cut.as_ref().map_or(a * a, |v| v[i]),
                    })
                    .collect()
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub grid: SweepGrid,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub shape: ShapeSpec,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    #[serde(rename = "F")]
    pub f: f64,
    pub retro_frac: f64,
    pub elastic_frac: f64,
    pub mean_refl: f64,
    pub n_path: u64,
    /// The point exceeded the pathology limit; its values are still reported.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<SweepRow>,
}

impl ConvergenceTable {
    pub fn column(&self, f: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let names: Vec<&str> = self.rows.first().map(|r| r.shape.params().iter().map(|p| p.0).collect()).unwrap_or_default();
        let mut header = vec!["shape"];
        header.extend(&names);
        header.extend(["N", "seed", "F", "retro_frac", "elastic_frac", "mean_refl", "n_path", "flagged"]);
        writeln!(w, "{}", header.join(","))?;
        for r in &self.rows {
            let mut cells = vec![r.shape.name().to_string()];
            cells.extend(r.shape.params().iter().map(|p| p.1.to_string()));
            cells.extend([
                r.n.to_string(),
                r.seed.to_string(),
                r.f.to_string(),
                r.retro_frac.to_string(),
                r.elastic_frac.to_string(),
                r.mean_refl.to_string(),
                r.n_path.to_string(),
                r.flagged.to_string(),
            ]);
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Estimates every grid point with the same seed. A point over the pathology
/// limit is marked, not fatal.
pub fn run_sweep(spec: &SweepSpec, lim: &TraceLimits) -> Result<ConvergenceTable> {
    if spec.n == 0 {
        return Err(config("sample count must be positive"));
    }
    let shapes = spec.grid.shapes()?;
    let hollows = shapes.iter().map(|s| s.build()).collect::<Result<Vec<_>>>()?;
    let rows = hollows
        .par_iter()
        .map(|h| {
            let eta = estimate_measure_unchecked(h, spec.n, spec.seed, lim, MeasureOptions::default())?;
            Ok(SweepRow {
                shape: h.shape().clone(),
                n: eta.n_total(),
                seed: spec.seed,
                f: functional_f(&eta)?,
                retro_frac: retro_fraction(&eta, spec.tol)?,
                elastic_frac: elastic_fraction(&eta, spec.tol)?,
                mean_refl: eta.mean_reflections(),
                n_path: eta.n_pathological(),
                flagged: eta.check_pathology(PATHOLOGY_LIMIT).is_err(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { rows })
}
