use std::path::{Path, PathBuf};

use magspace_core::dichotomy::ExperimentOptions;
use magspace_core::fields::FieldSpec;
use magspace_core::io::read_scalar;
use magspace_core::spectral::SuiteConfig;
use magspace_core::{Error, GridSpec, Initializer, MinimizeOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub halfwidth: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            halfwidth: 12.0,
            points: 257,
        }
    }
}

/// Field description as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldConfig {
    Constant {
        strength: f64,
    },
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "unit_sigma")]
        sigma: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Bump {
        #[serde(default = "one")]
        amplitude: f64,
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Dipole {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "unit_sigma")]
        sigma: f64,
        half_separation: f64,
    },
    /// A scalar field file stem (`<path>.bin` + `<path>.toml`), relative to the config file.
    Custom {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

fn unit_sigma() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::Gaussian {
            amplitude: 1.0,
            sigma: unit_sigma(),
            center: [0.0, 0.0],
        }
    }
}

impl FieldConfig {
    pub fn to_spec(&self, base: &Path) -> Result<FieldSpec, Error> {
        Ok(match *self {
            FieldConfig::Constant { strength } => FieldSpec::Constant { strength },
            FieldConfig::Gaussian {
                amplitude,
                sigma,
                center,
            } => FieldSpec::Gaussian {
                amplitude,
                sigma,
                center,
            },
            FieldConfig::Bump {
                amplitude,
                radius,
                center,
            } => FieldSpec::Bump {
                amplitude,
                radius,
                center,
            },
            FieldConfig::Dipole {
                amplitude,
                sigma,
                half_separation,
            } => FieldSpec::Dipole {
                amplitude,
                sigma,
                half_separation,
            },
            FieldConfig::Custom { ref path } => FieldSpec::Custom(read_scalar(&base.join(path))?),
        })
    }
}

/// Vector potential used by `minimize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// Coulomb-gauge potential of the field.
    Coulomb,
    /// `B₀/2 (−y, x)`; constant fields only.
    Symmetric,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    ConstantGrowth,
    L1Energy,
    FluxBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub options: ExperimentOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: Preset::ConstantGrowth,
            options: ExperimentOptions::default(),
        }
    }
}

/// Everything a run needs. The echo written next to the outputs is this
/// structure after command-line overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Overrides every nested seed when set.
    pub seed: Option<u64>,
    pub radii: Option<Vec<f64>>,
    pub grid: GridConfig,
    pub field: FieldConfig,
    pub potential: Option<PotentialKind>,
    pub initial: Initializer,
    pub minimize: MinimizeOptions,
    pub suite: SuiteConfig,
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            radii: None,
            grid: GridConfig::default(),
            field: FieldConfig::default(),
            potential: None,
            initial: Initializer::Constant,
            minimize: MinimizeOptions::default(),
            suite: SuiteConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

pub const QUICK_POINTS: usize = 65;
pub const QUICK_TRIALS: usize = 20;

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Applies `--seed` and `--quick`, then pushes the seed into every nested consumer.
    pub fn resolve(mut self, seed: Option<u64>, quick: bool, subcommand: &str) -> Self {
        if let Some(s) = seed {
            self.seed = Some(s);
        }
        if let Some(s) = self.seed {
            self.suite.seed = s;
            self.experiment.options.seed = s;
            if let Initializer::RandomPerturbation { amplitude, .. } = self.initial {
                self.initial = Initializer::RandomPerturbation { amplitude, seed: s };
            }
        }
        if quick {
            self.grid.points = self.grid.points.min(QUICK_POINTS);
            self.suite.points = self.suite.points.min(QUICK_POINTS);
            self.suite.trials = self.suite.trials.min(QUICK_TRIALS);
            if subcommand == "experiment" && self.radii.is_none() {
                self.radii = Some(match self.experiment.preset {
                    Preset::ConstantGrowth => vec![6.0, 10.0],
                    Preset::L1Energy => vec![4.0, 8.0, 20.0, 40.0],
                    Preset::FluxBound => vec![2.0, 4.0],
                });
                if self.experiment.preset != Preset::ConstantGrowth {
                    let o = &mut self.experiment.options;
                    o.spacing = o.spacing.max(0.25);
                    o.field_halfwidth = Some(o.field_halfwidth.unwrap_or(8.0).min(8.0));
                }
            }
        }
        if subcommand == "experiment" && self.radii.is_none() {
            self.radii = Some(match self.experiment.preset {
                Preset::ConstantGrowth => vec![8.0, 12.0, 16.0, 24.0],
                Preset::L1Energy => vec![8.0, 16.0, 20.0, 30.0, 40.0, 60.0, 80.0],
                Preset::FluxBound => vec![2.0, 4.0, 8.0],
            });
        }
        self
    }

    pub fn grid(&self) -> Result<GridSpec, Error> {
        GridSpec::new(self.grid.halfwidth, self.grid.points)
    }

    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
