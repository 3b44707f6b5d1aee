use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Sos,
    Reznick,
    Pfr,
    Rays,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    Gram,
    Reference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemArg {
    Light,
    Spin,
}

/// Settings shared by all subcommands. Every field can also come from the
/// `--config` TOML file under the same name (dashes or underscores).
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Flags {
    /// Certification hierarchy.
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Hierarchy level for detection (Reznick b or Pascal steps b').
    #[arg(long, global = true)]
    pub level: Option<usize>,
    /// Highest level tried when searching for a certificate.
    #[arg(long, global = true)]
    #[serde(alias = "b_max")]
    pub b_max: Option<usize>,
    /// Number of uniformly spaced line angles on [0, π).
    #[arg(long, global = true)]
    pub rays: Option<usize>,
    /// Normalization of light-witness problems.
    #[arg(long, global = true, value_enum)]
    pub norm: Option<NormArg>,
    /// Solver tolerance (certify, detect, hidden, reproduce) or residual
    /// tolerance (verify).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// A value below −threshold counts as detected.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Witness degree D for light detection from a state.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Physical system of a detect input; inferred from the file when absent.
    #[arg(long, global = true, value_enum)]
    pub system: Option<SystemArg>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for `reproduce` (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for `sample`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl Flags {
    /// Flags win over the config file field by field.
    pub fn over(self, file: Flags) -> Flags {
        Flags {
            method: self.method.or(file.method),
            level: self.level.or(file.level),
            b_max: self.b_max.or(file.b_max),
            rays: self.rays.or(file.rays),
            norm: self.norm.or(file.norm),
            tol: self.tol.or(file.tol),
            threshold: self.threshold.or(file.threshold),
            degree: self.degree.or(file.degree),
            system: self.system.or(file.system),
            out: self.out.or(file.out),
            jobs: self.jobs.or(file.jobs),
            seed: self.seed.or(file.seed),
        }
    }
}

pub fn load(path: &Path) -> Result<Flags> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Flags = toml::from_str("method = \"pfr\"\nb-max = 7\nrays = 16\nnorm = \"reference\"").unwrap();
        let flags = Flags {
            rays: Some(32),
            ..Flags::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.method, Some(MethodArg::Pfr));
        assert_eq!(merged.b_max, Some(7));
        assert_eq!(merged.rays, Some(32));
        assert_eq!(merged.norm, Some(NormArg::Reference));
        assert!(merged.level.is_none());
    }

    #[test]
    fn underscore_keys_and_unknown_keys() {
        let file: Flags = toml::from_str("b_max = 3").unwrap();
        assert_eq!(file.b_max, Some(3));
        assert!(toml::from_str::<Flags>("bogus = 1").is_err());
    }
}
