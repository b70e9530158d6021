//! Experiment configuration: a TOML file, then `--set key=value` overrides.
//!
//! Every field has a default, so an empty file (or no file) is a valid
//! config. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for every random draw (only the lemma sampler uses one).
    pub seed: u64,
    /// Output root; the command name is appended. Overridden by `--out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub catenoid: CatenoidConfig,
    pub radial: RadialSection,
    pub ring2d: Ring2dConfig,
    pub convergence: ConvergenceConfig,
    pub lemma32: LemmaConfig,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            output_dir: None,
            catenoid: CatenoidConfig::default(),
            radial: RadialSection::default(),
            ring2d: Ring2dConfig::default(),
            convergence: ConvergenceConfig::default(),
            lemma32: LemmaConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatenoidConfig {
    pub n: usize,
    /// Outer radius of the band `[2, r_max]`.
    pub r_max: f64,
    /// Number of t-intervals.
    pub t_grid: usize,
    /// Radii for the asymptotic residual table.
    pub ladder: Vec<f64>,
}

impl Default for CatenoidConfig {
    fn default() -> Self {
        Self { n: 3, r_max: 40.0, t_grid: 128, ladder: vec![10.0, 20.0, 40.0, 80.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialSection {
    pub n: usize,
    pub r_outer: f64,
    pub r_inner: f64,
    /// Height drop between the spheres; `None` is a unit drop.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    pub t_grid: usize,
}

impl Default for RadialSection {
    fn default() -> Self {
        Self { n: 3, r_outer: 3.0, r_inner: 1.5, height: Some(0.3), t_grid: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ring2dConfig {
    /// Boundary spec, see [`crate::boundary`].
    pub outer: String,
    pub inner: String,
    pub height: f64,
    pub n_theta: usize,
    pub n_t: usize,
    /// Order of the t-stencils (2, 4 or 6).
    pub t_order: usize,
    pub solver_tol: f64,
    pub max_iter: usize,
}

impl Default for Ring2dConfig {
    fn default() -> Self {
        Self {
            outer: "circle 0 0 1".into(),
            inner: "circle 0.2 0 0.3".into(),
            height: 0.25,
            n_theta: 128,
            n_t: 128,
            t_order: 6,
            solver_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    /// Concentric ring data against the radial oracle, refining in t.
    Ring2d,
    /// Codazzi defect of a triaxial ellipsoid support function.
    Codazzi,
    /// Physical-space residual of the ring2d instance.
    Physical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub study: Study,
    /// Coarsest resolution; `None` takes the study default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doublings: Option<usize>,
    /// Declared order; `None` takes the study's natural order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared: Option<f64>,
    /// t-stencil order for the ring2d study.
    pub t_order: usize,
    /// Concentric instance of the ring2d study.
    pub r_outer: f64,
    pub r_inner: f64,
    pub height: f64,
    pub n_theta: usize,
    /// Ellipsoid of the codazzi study.
    pub axes: [f64; 3],
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            study: Study::Ring2d,
            base: None,
            doublings: None,
            declared: None,
            t_order: 2,
            r_outer: 1.0,
            r_inner: 0.3,
            height: 0.25,
            n_theta: 16,
            axes: [2.0, 1.5, 1.0],
        }
    }
}

impl ConvergenceConfig {
    /// `(base, doublings, declared order)` after study defaults.
    pub fn resolved(&self) -> (usize, usize, f64) {
        let (base, doublings, declared) = match self.study {
            Study::Ring2d => (16, 3, self.t_order as f64),
            Study::Codazzi => (32, 2, 2.0),
            Study::Physical => (32, 2, 1.0),
        };
        (self.base.unwrap_or(base), self.doublings.unwrap_or(doublings), self.declared.unwrap_or(declared))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaConfig {
    pub instances: usize,
    pub min_vars: usize,
    pub max_vars: usize,
    /// Most lattice points per instance.
    pub lattice_points: usize,
    pub ascent_sweeps: usize,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { instances: 10_000, min_vars: 2, max_vars: 6, lattice_points: 729, ascent_sweeps: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative error of catenoid quantities against their closed forms.
    pub closed_form: f64,
    /// Upper bound for the calibrated second-difference tolerance.
    pub concavity: f64,
    /// Lower bound for chordal margins.
    pub margin: f64,
    /// Sharp-case margin (2D catenoid).
    pub sharp: f64,
    /// Remark identity residual.
    pub remark: f64,
    /// Differential inequality on radial solutions.
    pub inequality: f64,
    /// Slack on the quadratic bound.
    pub lemma: f64,
    /// Ring solver against the radial oracle.
    pub oracle: f64,
    /// Allowed shortfall of an observed order.
    pub order_slack: f64,
    /// Relative deviation of `φ` from an affine function in the far band.
    pub affine: f64,
    /// Largest ratio of the scaled asymptotic residuals.
    pub asymptotic_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form: 1e-10,
            concavity: 1e-5,
            margin: 1e-6,
            sharp: 1e-10,
            remark: 1e-8,
            inequality: 1e-8,
            lemma: 1e-12,
            oracle: 1e-6,
            order_slack: 0.3,
            affine: 1e-4,
            asymptotic_ratio: 3.0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
                text.parse::<toml::Table>().with_context(|| format!("{} is not valid TOML", p.display()))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let config: Self = toml::Value::Table(value).try_into().context("invalid config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("closed_form", t.closed_form),
            ("concavity", t.concavity),
            ("margin", t.margin),
            ("sharp", t.sharp),
            ("remark", t.remark),
            ("inequality", t.inequality),
            ("lemma", t.lemma),
            ("oracle", t.oracle),
            ("order_slack", t.order_slack),
            ("affine", t.affine),
            ("asymptotic_ratio", t.asymptotic_ratio),
            ("ring2d.solver_tol", self.ring2d.solver_tol),
        ] {
            if v.is_nan() || v <= 0.0 || v.is_infinite() {
                bail!("tolerance {name} must be positive and finite, got {v}");
            }
        }
        if self.lemma32.min_vars < 1 || self.lemma32.min_vars > self.lemma32.max_vars {
            bail!("lemma32 needs 1 <= min_vars <= max_vars");
        }
        for (name, spec) in [("outer", &self.ring2d.outer), ("inner", &self.ring2d.inner)] {
            if let Some(path) = crate::boundary::file_reference(spec) {
                if !path.exists() {
                    bail!("ring2d.{name} refers to missing file {}", path.display());
                }
            }
        }
        Ok(())
    }
}

/// `a.b.c=value`; the value is parsed as TOML and falls back to a string.
fn apply_override(root: &mut toml::Table, spec: &str) -> Result<()> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!("override {spec:?} is not of the form key=value");
    };
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("override {spec:?} has an empty key segment");
    }
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut table = root;
    for p in parents {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => bail!("override {spec:?}: {p} is not a section"),
        };
    }
    table.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default() {
        assert_eq!(ExperimentConfig::load(None, &[]).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let c = ExperimentConfig::load(
            None,
            &["ring2d.n_theta=32".into(), "ring2d.inner=circle 0 0 0.4".into(), "seed=11".into()],
        )
        .unwrap();
        assert_eq!(c.ring2d.n_theta, 32);
        assert_eq!(c.ring2d.inner, "circle 0 0 0.4");
        assert_eq!(c.seed, 11);
    }

    #[test]
    fn unknown_keys_and_bad_tolerances_are_rejected() {
        assert!(ExperimentConfig::load(None, &["ring2d.bogus=1".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["tolerances.margin=-1".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["noequals".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["ring2d.outer=missing.csv".into()]).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
