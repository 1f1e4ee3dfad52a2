//! Built-in case studies.

use crate::config::{AnalysisConfig, OptionsConfig, OutputsConfig, ProblemConfig, SeedConfig};
use crate::critical::lj_equilibria;
use crate::error::{Error, Result};

pub const PRESETS: [&str; 3] = ["lj2", "lj3", "schwarzschild-example"];

pub fn preset(name: &str) -> Result<AnalysisConfig> {
    let config = match name {
        "lj2" => AnalysisConfig {
            problem: ProblemConfig::LennardJones { n: 2 },
            seeds: Vec::new(),
            options: OptionsConfig::default(),
            outputs: OutputsConfig::default(),
        },
        "lj3" => AnalysisConfig {
            problem: ProblemConfig::LennardJones { n: 3 },
            // the equilateral minimum first, then the three collinear saddles
            seeds: lj_equilibria(3)?
                .into_iter()
                .filter(|o| o.label != "q05")
                .map(|o| SeedConfig {
                    control: o.label != "q04",
                    label: o.label.clone(),
                    coords: o.q0.to_vec(),
                })
                .rev()
                .collect(),
            options: OptionsConfig::default(),
            outputs: OutputsConfig::default(),
        },
        "schwarzschild-example" => AnalysisConfig {
            problem: ProblemConfig::Schwarzschild {
                n: 3,
                a: vec![-1.5, -1.0, -0.6],
                b: vec![0.5, 1.0 / 3.0, 0.2],
            },
            seeds: Vec::new(),
            options: OptionsConfig::default(),
            outputs: OutputsConfig::default(),
        },
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset `{name}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(config)
}
