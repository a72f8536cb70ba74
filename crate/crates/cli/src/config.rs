//! Run configuration: one structured file per run plus flag overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use syk_sim::evolution::Axis;
use syk_sim::observables::{log_grid, EvolutionMode};
use syk_sim::syk::{sample_seed, ModelParams, VarianceConvention};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Exact,
    Trotter,
}

/// Disorder model shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelBlock {
    pub n_majorana: usize,
    pub mu: f64,
    pub j4: f64,
    pub j2: f64,
    pub convention: VarianceConvention,
    /// Number of disorder samples `r`.
    pub samples: usize,
}

impl Default for ModelBlock {
    fn default() -> Self {
        Self {
            n_majorana: 8,
            mu: 5.0,
            j4: 1.0,
            j2: 1.0,
            convention: VarianceConvention::Single,
            samples: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl From<AxisBlock> for Axis {
    fn from(a: AxisBlock) -> Self {
        Axis::new(a.lo, a.hi, a.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TermOrder {
    /// Support-signature order with x < y < z < identity.
    #[default]
    Table,
    /// Order in which terms were generated.
    Canonical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelityBlock {
    pub sample_index: u64,
    pub ln_tau: AxisBlock,
    pub log10_n: AxisBlock,
    pub ordering: TermOrder,
}

impl Default for FidelityBlock {
    fn default() -> Self {
        let (t, n) = syk_sim::evolution::default_axes();
        Self {
            sample_index: 0,
            ln_tau: AxisBlock {
                lo: t.lo,
                hi: t.hi,
                points: t.points,
            },
            log10_n: AxisBlock {
                lo: n.lo,
                hi: n.hi,
                points: n.points,
            },
            ordering: TermOrder::Table,
        }
    }
}

/// `tau` grid evenly spaced in `ln tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGrid {
    pub ln_lo: f64,
    pub ln_hi: f64,
    pub points: usize,
}

impl Default for TauGrid {
    fn default() -> Self {
        Self {
            ln_lo: -3.0,
            ln_hi: 3.0,
            points: 30,
        }
    }
}

impl TauGrid {
    pub fn values(&self) -> Vec<f64> {
        log_grid(self.ln_lo, self.ln_hi, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationBlock {
    pub betas: Vec<f64>,
    pub mus: Vec<f64>,
    pub tau: TauGrid,
    /// Fraction of late grid points averaged for the plateau.
    pub window: f64,
    /// Realise `-mu` with the partner `(-J, C)` of each `+|mu|` sample.
    pub pair_negative_mu: bool,
    /// Prepend `tau = 0` to the grid.
    pub include_zero: bool,
}

impl Default for CorrelationBlock {
    fn default() -> Self {
        Self {
            betas: vec![0.0, 1.0, 20.0],
            mus: vec![-5.0, 0.0, 5.0],
            tau: TauGrid::default(),
            window: 0.25,
            pair_negative_mu: true,
            include_zero: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingBlock {
    pub n_list: Vec<usize>,
    pub mus: Vec<f64>,
    pub beta: f64,
    pub samples: usize,
    pub tau: TauGrid,
    pub window: f64,
}

impl Default for ScalingBlock {
    fn default() -> Self {
        Self {
            n_list: vec![6, 8, 10, 12],
            mus: vec![0.0, 5.0],
            beta: 20.0,
            samples: 8,
            tau: TauGrid::default(),
            window: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileBlock {
    pub sample_index: u64,
    /// Rotation time of each compiled term, and the target time of the
    /// resource estimate.
    pub tau: f64,
    pub epsilon: f64,
    /// Re-check every compiled term against its direct exponential.
    pub verify: bool,
}

impl Default for CompileBlock {
    fn default() -> Self {
        Self {
            sample_index: 0,
            tau: 1.0,
            epsilon: 0.01,
            verify: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrapeBlock {
    /// Spins of the default register kept in the simulation.
    pub spins: Vec<usize>,
    /// Target `exp(-i angle/2 Z..Z)` on all kept spins.
    pub zz_angle: f64,
    pub slices: usize,
    pub duration_s: f64,
    pub rf_scales: Vec<f64>,
    pub profile_scales: Vec<f64>,
    pub max_iter: usize,
    pub fidelity_goal: f64,
    pub init_sigma_hz: f64,
}

impl Default for GrapeBlock {
    fn default() -> Self {
        Self {
            spins: vec![0, 1],
            zz_angle: std::f64::consts::FRAC_PI_4,
            slices: 100,
            duration_s: 0.01,
            rf_scales: vec![0.95, 1.0, 1.05],
            profile_scales: vec![0.9, 0.95, 1.0, 1.05, 1.1],
            max_iter: 2000,
            fidelity_goal: 0.99,
            init_sigma_hz: syk_sim::nmr::DEFAULT_INIT_SIGMA_HZ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitBlock {
    pub csv: bool,
    pub json: bool,
}

impl Default for EmitBlock {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub engine: Engine,
    /// Product-formula steps per time point when `engine = trotter`.
    pub trotter_steps: u64,
    pub model: ModelBlock,
    pub fidelity: FidelityBlock,
    pub correlation: CorrelationBlock,
    pub scaling: ScalingBlock,
    pub compile: CompileBlock,
    pub grape: GrapeBlock,
    pub emit: EmitBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            engine: Engine::Exact,
            trotter_steps: 35,
            model: ModelBlock::default(),
            fidelity: FidelityBlock::default(),
            correlation: CorrelationBlock::default(),
            scaling: ScalingBlock::default(),
            compile: CompileBlock::default(),
            grape: GrapeBlock::default(),
            emit: EmitBlock::default(),
        }
    }
}

impl RunConfig {
    /// Reads TOML or JSON by extension. A run manifest is accepted too; its
    /// embedded config is used and `command` must match.
    pub fn load(path: &Path, command: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if !is_json {
            return toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())));
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let value = match value.get("config") {
            Some(cfg) if value.get("command").is_some() => {
                let recorded = value["command"].as_str().unwrap_or_default();
                if recorded != command {
                    return Err(CliError::Config(format!(
                        "manifest was written by `{recorded}`, not `{command}`"
                    )));
                }
                cfg.clone()
            }
            _ => value,
        };
        serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.model.samples == 0 {
            return bad("model.samples must be positive".into());
        }
        if self.engine == Engine::Trotter && self.trotter_steps == 0 {
            return bad("trotter_steps must be positive".into());
        }
        for (name, w) in [
            ("correlation.window", self.correlation.window),
            ("scaling.window", self.scaling.window),
        ] {
            if !(w > 0.0 && w <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {w}"));
            }
        }
        self.model_params(0).validate()?;
        Ok(())
    }

    pub fn model_params(&self, seed: u64) -> ModelParams {
        ModelParams {
            n_majorana: self.model.n_majorana,
            mu: self.model.mu,
            j4: self.model.j4,
            j2: self.model.j2,
            seed,
            convention: self.model.convention,
        }
    }

    /// Seed of disorder sample `index`.
    pub fn seed_of(&self, index: u64) -> u64 {
        sample_seed(self.master_seed, index)
    }

    pub fn evolution_mode(&self) -> EvolutionMode {
        match self.engine {
            Engine::Exact => EvolutionMode::Exact,
            Engine::Trotter => EvolutionMode::Trotter {
                steps: self.trotter_steps,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_both_formats() {
        let c = RunConfig::default();
        let t = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&t).unwrap(), c);
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&j).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults_and_rejects_typos() {
        let c: RunConfig = toml::from_str("master_seed = 7\n[model]\nsamples = 3\n").unwrap();
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.model.samples, 3);
        assert_eq!(c.model.n_majorana, 8);
        assert!(toml::from_str::<RunConfig>("[model]\nsample = 3\n").is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.model.n_majorana = 7;
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let mut c = RunConfig::default();
        c.correlation.window = 0.0;
        assert!(c.validate().is_err());
    }
}
