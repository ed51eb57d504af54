//! TOML run configuration.
//!
//! Parsing is fail-closed: unknown keys anywhere are errors, so a typo in a
//! study definition cannot silently fall back to a default. Sections are
//! optional at parse time; each command demands the ones it needs.

use anyhow::{bail, Context, Result};
use emspect::stepper::SchemeOrder;
use emspect::GridSpec;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub domain: Option<DomainSection>,
    pub time: Option<TimeSection>,
    pub material: Option<MaterialSection>,
    pub benchmark: Option<BenchmarkSection>,
    pub custom: Option<CustomSection>,
    pub dispersion: Option<DispersionSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Initial data from the closed-form benchmark solution on [0,2]^3.
    Benchmark,
    /// Initial data restored from a field snapshot.
    Custom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
    pub n: [usize; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub tau: f64,
    pub t_end: Option<f64>,
    pub n_steps: Option<usize>,
    pub order: u32,
    /// Observer cadence in steps; absent means "final state only".
    pub cadence: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub eps: f64,
    pub mu: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSection {
    /// Mode numbers of the exact solution; defaults to (1, 2, -3).
    pub k: Option<[i64; 3]>,
    /// Time steps for `converge`.
    pub tau_list: Option<Vec<f64>>,
    /// Grid resolutions for `spatial`.
    pub n_list: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSection {
    /// Snapshot stem to restart from (`<stem>.bin` + `<stem>.meta`).
    pub snapshot: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub order: u32,
    /// Points per wavelength for the normalized-phase-velocity column scale.
    pub n_lambda: Option<f64>,
    /// Samples per kappa axis over the closed Brillouin zone.
    pub sweep: [usize; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// Worker thread hint; 0 or absent picks the library default.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if let Some(d) = &self.domain {
            // constructing the grid performs the bounds/count checks
            self.grid_with(d)?;
        }
        if let Some(t) = &self.time {
            if !(t.tau > 0.0) || !t.tau.is_finite() {
                bail!("[time] tau must be positive and finite, got {}", t.tau);
            }
            SchemeOrder::from_int(t.order).map_err(|e| anyhow::anyhow!("[time] {e}"))?;
            if t.t_end.is_none() && t.n_steps.is_none() {
                bail!("[time] needs t_end or n_steps");
            }
            if let Some(te) = t.t_end {
                if !(te >= 0.0) || !te.is_finite() {
                    bail!("[time] t_end must be nonnegative, got {te}");
                }
                if let Some(ns) = t.n_steps {
                    let implied = ns as f64 * t.tau;
                    if (implied - te).abs() > 1e-9 * te.max(1.0) {
                        bail!(
                            "[time] inconsistent: n_steps * tau = {implied} but t_end = {te}"
                        );
                    }
                }
            }
            if t.cadence == Some(0) {
                bail!("[time] cadence must be >= 1");
            }
        }
        if let Some(m) = &self.material {
            if !(m.eps > 0.0) || !(m.mu > 0.0) {
                bail!("[material] eps and mu must be positive");
            }
        }
        if let Some(d) = &self.dispersion {
            if d.n < 4 || d.n % 2 != 0 {
                bail!("[dispersion] n must be even and >= 4, got {}", d.n);
            }
            if !(d.h > 0.0) || !(d.tau > 0.0) {
                bail!("[dispersion] h and tau must be positive");
            }
            SchemeOrder::from_int(d.order).map_err(|e| anyhow::anyhow!("[dispersion] {e}"))?;
            if let Some(nl) = d.n_lambda {
                if !(nl > 2.0) {
                    bail!("[dispersion] n_lambda must exceed 2, got {nl}");
                }
            }
            if d.sweep.iter().any(|&s| s == 0) {
                bail!("[dispersion] sweep resolutions must be >= 1");
            }
        }
        if self.scenario == Scenario::Custom && self.custom.is_none() {
            bail!("scenario = \"custom\" needs a [custom] section with a snapshot path");
        }
        Ok(())
    }

    fn grid_with(&self, d: &DomainSection) -> Result<GridSpec> {
        GridSpec::new([d.x, d.y, d.z], d.n).map_err(|e| anyhow::anyhow!("[domain] {e}"))
    }

    pub fn domain(&self) -> Result<&DomainSection> {
        self.domain
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("this command needs a [domain] section"))
    }

    pub fn grid(&self) -> Result<GridSpec> {
        self.grid_with(self.domain()?)
    }

    pub fn time(&self) -> Result<&TimeSection> {
        self.time
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("this command needs a [time] section"))
    }

    pub fn material(&self) -> Result<&MaterialSection> {
        self.material
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("this command needs a [material] section"))
    }

    pub fn order(&self) -> Result<SchemeOrder> {
        Ok(SchemeOrder::from_int(self.time()?.order)?)
    }

    /// Number of steps implied by the [time] section.
    pub fn n_steps(&self) -> Result<usize> {
        let t = self.time()?;
        if let Some(ns) = t.n_steps {
            return Ok(ns);
        }
        let te = t.t_end.expect("validated: t_end or n_steps present");
        let n = (te / t.tau).round();
        if (n * t.tau - te).abs() > 1e-9 * te.max(1.0) {
            bail!("[time] t_end = {te} is not an integral number of steps of tau = {}", t.tau);
        }
        Ok(n as usize)
    }

    pub fn benchmark_k(&self) -> [i64; 3] {
        self.benchmark
            .as_ref()
            .and_then(|b| b.k)
            .unwrap_or([1, 2, -3])
    }

    pub fn out_dir(&self, cli_override: Option<&Path>) -> PathBuf {
        if let Some(p) = cli_override {
            return p.to_path_buf();
        }
        self.output
            .as_ref()
            .and_then(|o| o.dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn threads(&self, cli_override: Option<usize>) -> Option<usize> {
        cli_override
            .or_else(|| self.output.as_ref().and_then(|o| o.threads))
            .filter(|&n| n > 0)
    }
}
