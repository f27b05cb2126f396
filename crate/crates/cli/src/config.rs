//! Run configuration: a single TOML file with global lattice/gauge settings
//! and per-command blocks. Unknown keys are rejected; CLI flags override
//! file values.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use otlab_core::qtorus::{LatticeGrid, ThetaMatrix, TorusElement};
use otlab_core::young::YoungFunction;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Torus dimension.
    pub d: usize,
    /// Truncation radius in the sup norm.
    #[serde(rename = "R")]
    pub radius: i64,
    /// Strict upper triangle of the deformation matrix, row-major.
    pub theta: Vec<f64>,
    /// Sobolev order.
    pub s: f64,
    /// Young gauge descriptor, e.g. `powerlog:p=2.5,alpha=0`.
    pub phi: String,
    pub seed: u64,
    pub pde: PdeConfig,
    pub heat: HeatConfig,
    pub metric: MetricConfig,
    pub scan: ScanConfig,
    pub claims: ClaimsConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdeConfig {
    /// Potential coefficients, one row `[n_1, ..., n_d, re, im]` per mode.
    pub v: Vec<Vec<f64>>,
    /// Survey grid radius.
    pub radius: i64,
    /// Random sources per regularity survey.
    pub trials: usize,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            v: vec![vec![0.0, 0.0, 1.0, 0.0]],
            radius: 4,
            trials: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfig {
    /// Times for the smoothing surveys.
    pub t_list: Vec<f64>,
    /// Random test operators per survey.
    pub trials: usize,
    /// `[t_lo, t_hi]` window of the scaling fit.
    pub window: [f64; 2],
    /// Sample count of the scaling fit.
    pub samples: usize,
    /// Survey grid radius.
    pub radius: i64,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            t_list: vec![0.05],
            trials: 30,
            window: [1e-3, 1e-1],
            samples: 7,
            radius: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricConfig {
    /// Random density pairs per transport survey.
    pub pairs: usize,
    /// Random trace-zero candidates added to the mode pool.
    pub pool_random: usize,
    /// Survey grid radius.
    pub radius: i64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            pairs: 50,
            pool_random: 100,
            radius: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Strictly increasing radii of the optimality scan.
    pub radii: Vec<i64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            radii: vec![4, 8, 16, 32],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClaimsConfig {
    /// Grid radius of the ideal-property triples.
    pub ideal_radius: i64,
    pub ideal_triples: usize,
    /// Random families tested against the summing upper bound.
    pub families: usize,
    pub family_radius: i64,
    pub amplification_radius: i64,
    /// Radius of the singular-value decay window check.
    pub decay_radius: i64,
    /// d=1 radius of the Weyl cross-check.
    pub weyl_radius_d1: i64,
}

impl Default for ClaimsConfig {
    fn default() -> Self {
        Self {
            ideal_radius: 4,
            ideal_triples: 100,
            families: 200,
            family_radius: 4,
            amplification_radius: 4,
            decay_radius: 40,
            weyl_radius_d1: 200,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 2,
            radius: 6,
            theta: vec![0.3],
            s: 1.0,
            phi: "powerlog:p=2.5,alpha=0".into(),
            seed: 42,
            pde: PdeConfig::default(),
            heat: HeatConfig::default(),
            metric: MetricConfig::default(),
            scan: ScanConfig::default(),
            claims: ClaimsConfig::default(),
        }
    }
}

impl RunConfig {
    /// Load from TOML (or defaults) and validate. Diagnostics carry the key
    /// and line that failed.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                toml::from_str(&text)
                    .with_context(|| format!("cannot parse config {}", p.display()))?
            }
            None => Self::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&mut self) -> Result<()> {
        if self.d == 0 || self.d > 4 {
            bail!("key `d`: dimension must lie in 1..=4, got {}", self.d);
        }
        let want = self.d * (self.d - 1) / 2;
        if self.theta.len() != want {
            bail!(
                "key `theta`: expected {want} upper-triangle entries for d={}, got {}",
                self.d,
                self.theta.len()
            );
        }
        if self.radius < 0 {
            bail!("key `R`: radius must be >= 0, got {}", self.radius);
        }
        if !(self.s > 0.0) {
            bail!("key `s`: Sobolev order must be positive, got {}", self.s);
        }
        YoungFunction::parse(&self.phi)
            .map_err(|e| anyhow::anyhow!("key `phi`: {e}"))?;
        for (i, row) in self.pde.v.iter().enumerate() {
            if row.len() != self.d + 2 {
                bail!(
                    "key `pde.v[{i}]`: expected {} entries (n_1..n_d, re, im), got {}",
                    self.d + 2,
                    row.len()
                );
            }
        }
        if self.scan.radii.is_empty() || self.scan.radii.windows(2).any(|w| w[1] <= w[0]) {
            bail!("key `scan.radii`: must be a strictly increasing nonempty list");
        }
        if self.heat.t_list.is_empty() || self.heat.t_list.iter().any(|&t| !(t > 0.0)) {
            bail!("key `heat.t_list`: needs at least one positive time");
        }
        if self.pde.trials == 0 || self.metric.pairs == 0 || self.claims.ideal_triples == 0 {
            bail!("keys `pde.trials`, `metric.pairs`, `claims.ideal_triples`: must be >= 1");
        }
        if self.heat.samples < 2 {
            bail!("key `heat.samples`: the scaling fit needs at least two samples");
        }
        Ok(())
    }

    pub fn gauge(&self) -> Result<YoungFunction> {
        YoungFunction::parse(&self.phi).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn theta_matrix(&self) -> Result<ThetaMatrix> {
        ThetaMatrix::from_upper_triangle(self.d, &self.theta).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn grid(&self) -> Result<Arc<LatticeGrid>> {
        LatticeGrid::shared(self.d, self.radius).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn grid_at(&self, radius: i64) -> Result<Arc<LatticeGrid>> {
        LatticeGrid::shared(self.d, radius).map_err(|e| anyhow::anyhow!("{e}"))
    }

    /// Potential from the `pde.v` rows on the given grid.
    pub fn potential(&self, grid: &Arc<LatticeGrid>) -> Result<TorusElement> {
        let theta = self.theta_matrix()?;
        let mut v = TorusElement::zero(Arc::clone(grid), theta)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        for row in &self.pde.v {
            let mut n = Vec::with_capacity(self.d);
            for &x in &row[..self.d] {
                if x.fract() != 0.0 {
                    bail!("key `pde.v`: lattice coordinate {x} is not an integer");
                }
                n.push(x as i64);
            }
            v.set_coeff(&n, Complex64::new(row[self.d], row[self.d + 1]))
                .map_err(|e| anyhow::anyhow!("key `pde.v`: {e}"))?;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let mut cfg = RunConfig::default();
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "d = 2\nR = 6\nbogus = 1\n";
        let parsed: std::result::Result<RunConfig, _> = toml::from_str(text);
        assert!(parsed.is_err());
    }

    #[test]
    fn theta_length_checked() {
        let mut cfg = RunConfig {
            d: 3,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.theta = vec![0.1, 0.2, 0.3];
        cfg.pde.v = vec![vec![0.0, 0.0, 0.0, 1.0, 0.0]];
        cfg.validate().unwrap();
    }

    #[test]
    fn bad_phi_diagnosed() {
        let mut cfg = RunConfig {
            phi: "power:p=0.2".into(),
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("phi"), "{err}");
    }
}
