use oscillquad::{Error, OscillatorConfig, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
pub struct OmegaGrid {
    pub log10_from: f64,
    pub log10_to: f64,
    pub points: usize,
}

impl OmegaGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::Config("omega_grid needs at least one point".into()));
        }
        if !(self.log10_from.is_finite() && self.log10_to.is_finite()) {
            return Err(Error::Config("omega_grid bounds must be finite".into()));
        }
        if self.points == 1 {
            return Ok(vec![10f64.powf(self.log10_from)]);
        }
        let step = (self.log10_to - self.log10_from) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| 10f64.powf(self.log10_from + step * k as f64))
            .collect())
    }
}

/// A run description: the oscillator fields (including `omega`) sit at the
/// top level next to the quadrature settings.
#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub oscillator: OscillatorConfig,
    #[serde(default = "default_amplitude")]
    pub amplitude: String,
    #[serde(default = "default_nu")]
    pub nu: usize,
    #[serde(default)]
    pub s: usize,
    #[serde(default)]
    pub omega_grid: Option<OmegaGrid>,
    #[serde(default)]
    pub nu_grid: Option<Vec<usize>>,
    /// Largest `nu` at which `bench` and `sweep-nu` also time the dense solver.
    #[serde(default = "default_dense_max_nu")]
    pub dense_max_nu: usize,
    /// Fixed `nu` values for the frequency figure written by `plotdata`.
    #[serde(default = "default_plot_nus")]
    pub plot_nus: Vec<usize>,
}

fn default_amplitude() -> String {
    "rational_runge".into()
}

fn default_nu() -> usize {
    128
}

fn default_dense_max_nu() -> usize {
    4096
}

fn default_plot_nus() -> Vec<usize> {
    vec![4, 64, 128]
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        check_even(cfg.nu, "nu")?;
        for &nu in &cfg.plot_nus {
            check_even(nu, "plot_nus")?;
        }
        Ok(cfg)
    }

    pub fn omegas(&self) -> Result<Vec<f64>> {
        self.omega_grid
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs omega_grid".into()))?
            .values()
    }

    pub fn nus(&self) -> Result<Vec<usize>> {
        let grid = self
            .nu_grid
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs nu_grid".into()))?;
        if grid.is_empty() {
            return Err(Error::Config("nu_grid is empty".into()));
        }
        for &nu in grid {
            check_even(nu, "nu_grid")?;
        }
        Ok(grid.clone())
    }
}

fn check_even(nu: usize, what: &str) -> Result<()> {
    if nu < 2 || nu % 2 != 0 {
        return Err(Error::Config(format!("{what} values must be even and >= 2, got {nu}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattened_oscillator_and_defaults() {
        let cfg = RunConfig::parse(r#"{"type":"exponential","g":[0,1],"omega":100.0}"#).unwrap();
        assert_eq!(cfg.oscillator.omega(), 100.0);
        assert_eq!((cfg.amplitude.as_str(), cfg.nu, cfg.s), ("rational_runge", 128, 0));
        assert!(cfg.omegas().is_err());
    }

    #[test]
    fn omega_grid_is_log_spaced() {
        let g = OmegaGrid { log10_from: 1.0, log10_to: 4.0, points: 4 };
        let v = g.values().unwrap();
        assert_eq!(v.len(), 4);
        for (k, w) in v.iter().enumerate() {
            assert!((w.log10() - (1.0 + k as f64)).abs() < 1e-12);
        }
        assert!(OmegaGrid { log10_from: 1.0, log10_to: 2.0, points: 0 }.values().is_err());
    }

    #[test]
    fn rejects_odd_nu() {
        assert!(RunConfig::parse(r#"{"type":"exponential","g":[0,1],"omega":1,"nu":5}"#).is_err());
        let cfg = RunConfig::parse(r#"{"type":"exponential","g":[0,1],"omega":1,"nu_grid":[4,7]}"#).unwrap();
        assert!(cfg.nus().is_err());
        let cfg = RunConfig::parse(r#"{"type":"exponential","g":[0,1],"omega":1,"nu_grid":[]}"#).unwrap();
        assert!(cfg.nus().is_err());
    }

    #[test]
    fn bad_json_is_a_config_error() {
        assert!(matches!(RunConfig::parse("{"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse(r#"{"type":"sine","omega":1}"#), Err(Error::Config(_))));
    }
}
