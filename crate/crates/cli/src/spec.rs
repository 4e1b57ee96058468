use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qspicb_core::{Convention, Error, QSPConfig, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Matrix,
    Dual,
    Verify,
    Oracle,
    Q1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pack {
    Part2,
    Part3,
}

impl From<Pack> for Convention {
    fn from(p: Pack) -> Self {
        match p {
            Pack::Part2 => Convention::Part2,
            Pack::Part3 => Convention::Part3,
        }
    }
}

/// A complete, reproducible description of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    #[serde(flatten)]
    pub config: QSPConfig,
    #[serde(with = "bits")]
    pub b: Vec<u8>,
    #[serde(default)]
    pub levi: Vec<usize>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Matrix, Output::Q1]
}

fn default_out() -> PathBuf {
    PathBuf::from(".")
}

mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_bits(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_bits(&s).map_err(serde::de::Error::custom)
    }
}

pub fn format_bits(b: &[u8]) -> String {
    b.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `"0,0,1"` or `"001"`.
pub fn parse_bits(s: &str) -> std::result::Result<Vec<u8>, String> {
    let parts: Vec<&str> = if s.contains(',') {
        s.split(',').map(str::trim).collect()
    } else {
        s.split("").filter(|x| !x.is_empty()).collect()
    };
    parts
        .iter()
        .map(|p| match *p {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(format!("b-sequence entry {p:?} is not 0 or 1")),
        })
        .collect()
}

/// A 0/1 sequence given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits(pub Vec<u8>);

fn parse_bit_arg(s: &str) -> std::result::Result<Bits, String> {
    parse_bits(s).map(Bits)
}

/// Module and output options shared by `compute`, `verify` and `module`.
#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// JSON run specification; other flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rank N of the quantum symmetric pair.
    #[arg(short = 'n', long = "rank")]
    pub rank: Option<usize>,
    /// The 0/1 sequence, e.g. `0,0,1`.
    #[arg(short, long, value_parser = parse_bit_arg)]
    pub b: Option<Bits>,
    /// Simple roots in the Levi subalgebra, e.g. `0,2`.
    #[arg(short, long, value_delimiter = ',')]
    pub levi: Option<Vec<usize>>,
    /// Coproduct convention; `part3` (the default) gives the positive basis.
    #[arg(long, value_enum)]
    pub convention: Option<Pack>,
    /// Constant term of the fixed-node generator (0 or 1).
    #[arg(long)]
    pub kappa: Option<u8>,
    /// Files to write (default `matrix,q1`).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub outputs: Option<Vec<Output>>,
    /// Output directory.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

impl SpecArgs {
    pub fn resolve(&self) -> Result<RunSpec> {
        let mut spec = match &self.config {
            Some(path) => read_spec(path)?,
            None => {
                let rank = self
                    .rank
                    .ok_or_else(|| Error::Config("--rank or --config is required".into()))?;
                let b = self
                    .b
                    .clone()
                    .map(|b| b.0)
                    .ok_or_else(|| Error::Config("--b or --config is required".into()))?;
                RunSpec {
                    config: QSPConfig::new(rank, Convention::Part3),
                    b,
                    levi: Vec::new(),
                    outputs: default_outputs(),
                    out: default_out(),
                }
            }
        };
        if let Some(n) = self.rank {
            spec.config.rank = n;
        }
        if let Some(b) = &self.b {
            spec.b = b.0.clone();
        }
        if let Some(l) = &self.levi {
            spec.levi = l.clone();
        }
        if let Some(c) = self.convention {
            spec.config.convention = c.into();
        }
        if let Some(k) = self.kappa {
            spec.config.kappa = k;
        }
        if let Some(o) = &self.outputs {
            spec.outputs = o.clone();
        }
        if let Some(o) = &self.out {
            spec.out = o.clone();
        }
        spec.config.validate()?;
        Ok(spec)
    }
}

fn read_spec(path: &Path) -> Result<RunSpec> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_strings() {
        assert_eq!(parse_bits("0,1,1"), Ok(vec![0, 1, 1]));
        assert_eq!(parse_bits("001"), Ok(vec![0, 0, 1]));
        assert!(parse_bits("0,2").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"N": 4, "b": "0,0", "levi": [0], "outputs": ["matrix", "dual"]}"#;
        let spec: RunSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.config.rank, 4);
        assert_eq!(spec.config.convention, Convention::Part3);
        assert_eq!(spec.b, vec![0, 0]);
        let back: RunSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
