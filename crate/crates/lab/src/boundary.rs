//! Planar boundary curves given as text specs:
//!
//! - `circle cx cy r`
//! - `ellipse a b [cx cy [angle]]`
//! - a path to a CSV file with a column `h`, optionally with `theta`,
//!   holding one support value per grid direction.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use mslab_core::support::{SphereGrid, SupportSlice};

#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { a: f64, b: f64, center: [f64; 2], angle: f64 },
    Samples { path: PathBuf },
}

/// The path a spec points at, if it is not a shape keyword.
pub fn file_reference(spec: &str) -> Option<PathBuf> {
    let first = spec.split_whitespace().next()?;
    match first {
        "circle" | "ellipse" => None,
        _ => Some(PathBuf::from(spec.trim())),
    }
}

impl Boundary {
    pub fn parse(spec: &str) -> Result<Self> {
        let words: Vec<&str> = spec.split_whitespace().collect();
        let Some((&kind, rest)) = words.split_first() else {
            bail!("empty boundary spec");
        };
        let nums = || -> Result<Vec<f64>> {
            rest.iter()
                .map(|w| w.parse::<f64>().with_context(|| format!("bad number {w:?} in boundary {spec:?}")))
                .collect()
        };
        match kind {
            "circle" => {
                let v = nums()?;
                ensure!(v.len() == 3, "circle needs `cx cy r`, got {spec:?}");
                ensure!(v[2] > 0.0, "circle radius must be positive, got {}", v[2]);
                Ok(Self::Circle { center: [v[0], v[1]], radius: v[2] })
            }
            "ellipse" => {
                let v = nums()?;
                ensure!(matches!(v.len(), 2 | 4 | 5), "ellipse needs `a b [cx cy [angle]]`, got {spec:?}");
                ensure!(v[0] > 0.0 && v[1] > 0.0, "ellipse semi-axes must be positive");
                let center = if v.len() >= 4 { [v[2], v[3]] } else { [0.0, 0.0] };
                let angle = v.get(4).copied().unwrap_or(0.0);
                Ok(Self::Ellipse { a: v[0], b: v[1], center, angle })
            }
            _ => Ok(Self::Samples { path: PathBuf::from(spec.trim()) }),
        }
    }

    /// Support function sampled on the circle grid. Convexity is checked
    /// later, when the slice becomes part of a problem.
    pub fn slice(&self, grid: &Arc<SphereGrid>) -> Result<SupportSlice> {
        ensure!(grid.dim_n() == 2, "boundary curves live on the circle grid");
        let h = match self {
            Self::Circle { center, radius } => grid.sample(|y| radius + center[0] * y[0] + center[1] * y[1]),
            Self::Ellipse { a, b, center, angle } => {
                let (s, c) = angle.sin_cos();
                grid.sample(|y| {
                    let u = c * y[0] + s * y[1];
                    let v = -s * y[0] + c * y[1];
                    (a * a * u * u + b * b * v * v).sqrt() + center[0] * y[0] + center[1] * y[1]
                })
            }
            Self::Samples { path } => read_samples(path, grid)?,
        };
        Ok(SupportSlice::new(grid.clone(), h)?)
    }
}

fn read_samples(path: &Path, grid: &SphereGrid) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let h_col = headers.iter().position(|h| h.trim() == "h").context("boundary CSV needs an `h` column")?;
    let theta_col = headers.iter().position(|h| h.trim() == "theta");
    let mut h = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |col: usize| -> Result<f64> {
            let field = record.get(col).context("short row")?;
            field.trim().parse::<f64>().with_context(|| format!("row {}: bad number {field:?}", row + 1))
        };
        if let Some(tc) = theta_col {
            let theta = parse(tc)?;
            let expected = grid.coords(row.min(grid.len().saturating_sub(1)))[0];
            ensure!(
                (theta - expected).abs() <= 1e-9,
                "row {}: theta {theta} does not match grid direction {expected}",
                row + 1
            );
        }
        h.push(parse(h_col)?);
    }
    ensure!(
        h.len() == grid.len(),
        "{} has {} samples but the grid has {} directions",
        path.display(),
        h.len(),
        grid.len()
    );
    Ok(h)
}
