//! Configuration resolution: paper-value defaults, experiment presets, an
//! optional JSON config file, and command-line overrides, in that order of
//! precedence (later wins).

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hashchem::core::{EvaluatorKind, Params};
use hashchem::harness::{CampaignMode, CampaignSpec};

/// The three experiments from the paper, one command each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Hash evaluator, 50 accepted runs, extinct attempts discarded.
    Main,
    /// Uniform [0,1) random evaluator, exactly 100 runs, all kept.
    ControlUniform,
    /// Biased [0.2,1) random evaluator, 30 accepted runs.
    ControlBiased,
}

/// Fit-weighting interpretations to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSampling {
    Uniform,
    Log,
    Both,
}

/// JSON config file schema; unknown keys are rejected. Every key can also
/// be set by a command-line flag, which takes precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub num_types: Option<u32>,
    pub move_sigma: Option<f64>,
    pub neighbor_radius: Option<f64>,
    pub mutation_prob: Option<f64>,
    pub max_density: Option<u32>,
    pub fitness_modulus: Option<u64>,
    pub init_pop: Option<u32>,
    pub steps: Option<u32>,
    pub evaluator: Option<EvaluatorKind>,
    pub master_seed: Option<u64>,
    pub target_runs: Option<usize>,
    pub max_attempts: Option<usize>,
    pub parallelism: Option<usize>,
    pub keep_extinct: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub plot: Option<bool>,
    pub snapshot_ticks: Option<Vec<u32>>,
    pub fit_sampling: Option<String>,
}

/// Fully resolved configuration for a `run` invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub campaign: CampaignSpec,
    pub output_dir: PathBuf,
    pub plot: bool,
    pub snapshot_ticks: Vec<u32>,
    pub fit_sampling: FitSampling,
}

/// Everything the `run` subcommand may override, all optional.
#[derive(Debug, Default, clap::Args)]
pub struct RunOverrides {
    /// Experiment preset encoding one of the paper's campaigns
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed, decimal or 0x-hex (env HASHCHEM_SEED as fallback)
    #[arg(long, value_parser = parse_seed, allow_hyphen_values = false)]
    pub seed: Option<u64>,
    /// Ticks per run
    #[arg(long)]
    pub steps: Option<u32>,
    /// Accepted runs wanted (or total runs with --keep-extinct)
    #[arg(long)]
    pub target_runs: Option<usize>,
    /// Attempt cap when filtering out extinct runs
    #[arg(long)]
    pub max_attempts: Option<usize>,
    /// Fitness evaluator kind
    #[arg(long, value_parser = ["hash", "uniform", "biased"])]
    pub evaluator: Option<String>,
    /// Lower bound of the biased evaluator
    #[arg(long)]
    pub biased_lo: Option<f64>,
    /// Upper bound of the biased evaluator
    #[arg(long)]
    pub biased_hi: Option<f64>,
    /// Movement scale (half-normal sigma)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Neighborhood radius
    #[arg(long)]
    pub radius: Option<f64>,
    /// Mutation probability
    #[arg(long)]
    pub mu: Option<f64>,
    /// Maximum local density
    #[arg(long)]
    pub dmax: Option<u32>,
    /// Fitness modulus m in (h mod m)/m
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Number of individual entity types
    #[arg(long)]
    pub types: Option<u32>,
    /// Initial population
    #[arg(long)]
    pub init_pop: Option<u32>,
    /// Concurrent runs (default: available cores)
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Output directory
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Emit SVG charts and snapshots
    #[arg(long)]
    pub plot: bool,
    /// Ticks to snapshot when plotting (comma-separated)
    #[arg(long, value_delimiter = ',')]
    pub snapshot_ticks: Option<Vec<u32>>,
    /// Run exactly --target-runs attempts and keep extinct ones too
    #[arg(long)]
    pub keep_extinct: bool,
    /// Which fit-window weighting(s) to report in fits.json
    #[arg(long, value_enum)]
    pub fit_sampling: Option<FitSampling>,
}

/// Accepts `12345` or `0xdeadbeef`.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse::<u64>()
    };
    parsed.map_err(|_| format!("invalid seed `{s}`: expected decimal or 0x-hex u64"))
}

fn preset_base(preset: Preset) -> (Params, usize, CampaignMode) {
    match preset {
        Preset::Main => (Params::default(), 50, CampaignMode::FilterExtinct),
        Preset::ControlUniform => (
            Params { evaluator: EvaluatorKind::Uniform, ..Params::default() },
            100,
            CampaignMode::KeepAll,
        ),
        Preset::ControlBiased => (
            Params { evaluator: EvaluatorKind::BIASED_DEFAULT, ..Params::default() },
            30,
            CampaignMode::FilterExtinct,
        ),
    }
}

impl RunOverrides {
    pub fn resolve(&self) -> Result<RunConfig> {
        // 1) preset (default: main)
        let (mut params, mut target_runs, mut mode) =
            preset_base(self.preset.unwrap_or(Preset::Main));
        let mut master_seed: Option<u64> = None;
        let mut max_attempts: Option<usize> = None;
        let mut parallelism: Option<usize> = None;
        let mut output_dir = PathBuf::from("out");
        let mut plot = false;
        let mut snapshot_ticks: Vec<u32> = vec![30, 100, 300, 1000];
        let mut fit_sampling = FitSampling::Both;

        // 2) config file
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            let file: FileConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?;
            if let Some(v) = file.num_types {
                params.num_types = v;
            }
            if let Some(v) = file.move_sigma {
                params.move_sigma = v;
            }
            if let Some(v) = file.neighbor_radius {
                params.neighbor_radius = v;
            }
            if let Some(v) = file.mutation_prob {
                params.mutation_prob = v;
            }
            if let Some(v) = file.max_density {
                params.max_density = v;
            }
            if let Some(v) = file.fitness_modulus {
                params.fitness_modulus = v;
            }
            if let Some(v) = file.init_pop {
                params.init_pop = v;
            }
            if let Some(v) = file.steps {
                params.steps = v;
            }
            if let Some(v) = file.evaluator {
                params.evaluator = v;
            }
            if let Some(v) = file.master_seed {
                master_seed = Some(v);
            }
            if let Some(v) = file.target_runs {
                target_runs = v;
            }
            if let Some(v) = file.max_attempts {
                max_attempts = Some(v);
            }
            if let Some(v) = file.parallelism {
                parallelism = Some(v);
            }
            if let Some(v) = file.keep_extinct {
                mode = if v { CampaignMode::KeepAll } else { CampaignMode::FilterExtinct };
            }
            if let Some(v) = file.output_dir {
                output_dir = v;
            }
            if let Some(v) = file.plot {
                plot = v;
            }
            if let Some(v) = file.snapshot_ticks {
                snapshot_ticks = v;
            }
            if let Some(v) = file.fit_sampling {
                fit_sampling = match v.as_str() {
                    "uniform" => FitSampling::Uniform,
                    "log" => FitSampling::Log,
                    "both" => FitSampling::Both,
                    other => bail!("config: fit_sampling must be uniform|log|both, got `{other}`"),
                };
            }
        }

        // 3) command-line flags
        if let Some(v) = self.types {
            params.num_types = v;
        }
        if let Some(v) = self.sigma {
            params.move_sigma = v;
        }
        if let Some(v) = self.radius {
            params.neighbor_radius = v;
        }
        if let Some(v) = self.mu {
            params.mutation_prob = v;
        }
        if let Some(v) = self.dmax {
            params.max_density = v;
        }
        if let Some(v) = self.modulus {
            params.fitness_modulus = v;
        }
        if let Some(v) = self.init_pop {
            params.init_pop = v;
        }
        if let Some(v) = self.steps {
            params.steps = v;
        }
        if let Some(kind) = self.evaluator.as_deref() {
            params.evaluator = match kind {
                "hash" => EvaluatorKind::Hash,
                "uniform" => EvaluatorKind::Uniform,
                "biased" => EvaluatorKind::BIASED_DEFAULT,
                _ => unreachable!("clap validates evaluator values"),
            };
        }
        if self.biased_lo.is_some() || self.biased_hi.is_some() {
            let (mut lo, mut hi) = match params.evaluator {
                EvaluatorKind::Biased { lo, hi } => (lo, hi),
                _ => bail!("--biased-lo/--biased-hi require --evaluator biased"),
            };
            if let Some(v) = self.biased_lo {
                lo = v;
            }
            if let Some(v) = self.biased_hi {
                hi = v;
            }
            params.evaluator = EvaluatorKind::Biased { lo, hi };
        }
        if let Some(v) = self.target_runs {
            target_runs = v;
        }
        if let Some(v) = self.max_attempts {
            max_attempts = Some(v);
        }
        if let Some(v) = self.parallelism {
            parallelism = Some(v);
        }
        if self.keep_extinct {
            mode = CampaignMode::KeepAll;
        }
        if let Some(v) = &self.out {
            output_dir = v.clone();
        }
        if self.plot {
            plot = true;
        }
        if let Some(v) = &self.snapshot_ticks {
            snapshot_ticks = v.clone();
        }
        if let Some(v) = self.fit_sampling {
            fit_sampling = v;
        }

        // seed precedence: flag > config file > env > default
        let master_seed = match (self.seed, master_seed) {
            (Some(s), _) => s,
            (None, Some(s)) => s,
            (None, None) => match std::env::var("HASHCHEM_SEED") {
                Ok(raw) => parse_seed(raw.trim())
                    .map_err(|e| anyhow::anyhow!("HASHCHEM_SEED: {e}"))?,
                Err(_) => 42,
            },
        };

        params.validate()?;
        let parallelism = parallelism.unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        });
        if parallelism == 0 {
            bail!("parallelism must be >= 1");
        }
        if target_runs == 0 {
            bail!("target_runs must be >= 1");
        }

        let campaign = CampaignSpec {
            params,
            master_seed,
            target_runs,
            max_attempts: max_attempts.unwrap_or(target_runs * 10),
            parallelism,
            mode,
        };
        Ok(RunConfig { campaign, output_dir, plot, snapshot_ticks, fit_sampling })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0xFF").unwrap(), 255);
        assert_eq!(parse_seed("0Xff").unwrap(), 255);
        assert!(parse_seed("nope").is_err());
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn presets_encode_experiments() {
        let (p, runs, mode) = preset_base(Preset::Main);
        assert_eq!(p.evaluator, EvaluatorKind::Hash);
        assert_eq!((runs, mode), (50, CampaignMode::FilterExtinct));
        let (p, runs, mode) = preset_base(Preset::ControlUniform);
        assert_eq!(p.evaluator, EvaluatorKind::Uniform);
        assert_eq!((runs, mode), (100, CampaignMode::KeepAll));
        let (p, runs, mode) = preset_base(Preset::ControlBiased);
        assert_eq!(p.evaluator, EvaluatorKind::Biased { lo: 0.2, hi: 1.0 });
        assert_eq!((runs, mode), (30, CampaignMode::FilterExtinct));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let err = serde_json::from_str::<FileConfig>(r#"{"stepz": 10}"#).unwrap_err();
        assert!(err.to_string().contains("stepz"));
    }

    #[test]
    fn flag_overrides_beat_preset() {
        let overrides = RunOverrides {
            preset: Some(Preset::Main),
            steps: Some(10),
            target_runs: Some(1),
            seed: Some(7),
            parallelism: Some(1),
            ..RunOverrides::default()
        };
        let config = overrides.resolve().unwrap();
        assert_eq!(config.campaign.params.steps, 10);
        assert_eq!(config.campaign.target_runs, 1);
        assert_eq!(config.campaign.master_seed, 7);
        assert_eq!(config.campaign.max_attempts, 10);
    }
}
