use std::path::{Path, PathBuf};

use ordgamma::experiments::{HenonSweepConfig, MixedSegmentationConfig};
use ordgamma::GeneratorTag;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentTag {
    HenonSweep,
    MixedSegmentation,
    TextureMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextureConfig {
    /// Directory of PGM images; the synthetic corpus is generated when absent.
    pub images_dir: Option<PathBuf>,
    pub size: usize,
    pub seed: u64,
    pub dx: usize,
    pub dy: usize,
    pub tau_x: usize,
    pub tau_y: usize,
    pub generators: Vec<GeneratorTag>,
}

impl Default for TextureConfig {
    fn default() -> Self {
        TextureConfig {
            images_dir: None,
            size: 640,
            seed: 0,
            dx: 2,
            dy: 2,
            tau_x: 1,
            tau_y: 1,
            generators: GeneratorTag::EXPERIMENT.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentConfig {
    pub d: Option<usize>,
    pub tau: Option<usize>,
    pub g: Option<GeneratorTag>,
    pub stride: Option<usize>,
    pub window: Option<usize>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentTag>,
    pub out_dir: Option<PathBuf>,
    pub henon: HenonSweepConfig,
    pub mixed: MixedSegmentationConfig,
    pub texture: TextureConfig,
    pub segment: SegmentConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(ordgamma::Error::io(path, e)))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_config() {
        let c: ExperimentConfig = toml::from_str(
            r#"
experiment = "henon-sweep"
[henon]
epsilons = [0.0, 0.5]
realizations = 3
generators = ["log", "exp"]
form = "literal"
[segment]
threshold = 0.25
"#,
        )
        .unwrap();
        assert_eq!(c.experiment, Some(ExperimentTag::HenonSweep));
        assert_eq!(c.henon.realizations, 3);
        assert_eq!(c.henon.n, 100_000);
        assert_eq!(c.henon.generators, vec![GeneratorTag::Log, GeneratorTag::Exp]);
        assert_eq!(c.segment.threshold, Some(0.25));
        assert_eq!(c.texture.size, 640);
    }

    #[test]
    fn unknown_generator_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("[henon]\ngenerators = [\"cosh\"]").is_err());
    }
}
