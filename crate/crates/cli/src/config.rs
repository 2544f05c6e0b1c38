use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use latinapprox::{parse_ratio_str, CayleyTable, CellBox, GroupModel, Rational, Scalar};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Approximate,
    Loop,
    Probe,
    Realize,
    Complete,
    Tensor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorModeArg {
    Exact,
    Montecarlo,
}

/// Run options. Every flag has a config-file key of the same name.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    #[arg(skip)]
    pub command: Option<CommandName>,
    /// torus:D, cyclic:N, symmetric:K, cayley:PATH, real_line or affine.
    #[arg(long)]
    pub group: Option<String>,
    /// Cells per axis (approximate, loop, tensor) or in total (probe).
    #[arg(long)]
    pub cells: Option<usize>,
    /// Lower bound for the number of quasigroup elements per cell.
    #[arg(long = "t")]
    pub t: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Integer amalgam JSON for `realize`.
    #[arg(long)]
    pub amalgam: Option<PathBuf>,
    /// Partial Latin square (CSV or JSON) for `complete`.
    #[arg(long)]
    pub partial: Option<PathBuf>,
    /// Inner target `lo:hi` on the real line.
    #[arg(long, allow_hyphen_values = true)]
    pub inner: Option<String>,
    /// Window as `lo:hi` per axis, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<TensorModeArg>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunArgs {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("config {}", path.display()))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: &RunArgs) -> Self {
        overlay!(self, flags, command, group, cells, t, samples, seed, out, format, amalgam, partial, inner, window, mode);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells == Some(0) {
            bail!("field `cells`: must be at least 1");
        }
        if self.samples.unwrap_or(0) > 0 && self.seed.is_none() {
            bail!("field `seed`: required when `samples` is positive");
        }
        Ok(())
    }

    /// Explicit format, else CSV for a `.csv` output path, else JSON.
    pub fn format(&self) -> Format {
        match (self.format, &self.out) {
            (Some(f), _) => f,
            (None, Some(p)) if p.extension().is_some_and(|e| e == "csv") => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn require_cells(&self) -> Result<usize> {
        self.cells.context("field `cells`: missing")
    }

    pub fn require_group(&self) -> Result<&str> {
        self.group.as_deref().context("field `group`: missing")
    }
}

pub fn parse_group<T: Scalar>(spec: &str) -> Result<GroupModel<T>> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let number = || -> Result<usize> {
        arg.parse().with_context(|| format!("field `group`: `{spec}` needs a positive integer parameter"))
    };
    Ok(match kind {
        "torus" => GroupModel::torus(number()?),
        "cyclic" => GroupModel::cyclic(number()?),
        "symmetric" => GroupModel::finite(CayleyTable::symmetric(number()?)),
        "cayley" => {
            let text = std::fs::read_to_string(arg).with_context(|| format!("reading Cayley table {arg}"))?;
            GroupModel::finite(CayleyTable::from_csv(&text)?)
        }
        "real_line" => GroupModel::real_line(),
        "affine" => GroupModel::affine_line(),
        _ => bail!("field `group`: unknown group `{spec}`"),
    })
}

pub fn parse_box(field: &str, text: &str) -> Result<CellBox<Rational>> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in text.split(',') {
        let (a, b) = part
            .split_once(':')
            .with_context(|| format!("field `{field}`: expected lo:hi, got `{part}`"))?;
        let a = parse_ratio_str(a).with_context(|| format!("field `{field}`: bad number `{a}`"))?;
        let b = parse_ratio_str(b).with_context(|| format!("field `{field}`: bad number `{b}`"))?;
        if a >= b {
            bail!("field `{field}`: empty interval `{part}`");
        }
        lo.push(a);
        hi.push(b);
    }
    Ok(CellBox::new(lo, hi))
}

pub fn to_float_box(b: &CellBox<Rational>) -> CellBox<f64> {
    CellBox::new(b.lo.iter().map(Scalar::to_f64_lossy).collect(), b.hi.iter().map(Scalar::to_f64_lossy).collect())
}
