//! Study configuration: a JSON document, command-line overrides and the
//! per-study defaults they fall back to.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, CliResult};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Oracle,
    Semigroup,
    Composition,
    Parts,
    RatioLemma,
    RlDivergence,
    ElLimit,
    EnergyTerm,
    GradientCheck,
}

impl StudyKind {
    pub const ALL: [StudyKind; 9] = [
        StudyKind::Oracle,
        StudyKind::Semigroup,
        StudyKind::Composition,
        StudyKind::Parts,
        StudyKind::RatioLemma,
        StudyKind::RlDivergence,
        StudyKind::ElLimit,
        StudyKind::EnergyTerm,
        StudyKind::GradientCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Oracle => "oracle",
            StudyKind::Semigroup => "semigroup",
            StudyKind::Composition => "composition",
            StudyKind::Parts => "parts",
            StudyKind::RatioLemma => "ratio-lemma",
            StudyKind::RlDivergence => "rl-divergence",
            StudyKind::ElLimit => "el-limit",
            StudyKind::EnergyTerm => "energy-term",
            StudyKind::GradientCheck => "gradient-check",
        }
    }

    fn uses(self, p: Param) -> bool {
        use Param::*;
        use StudyKind::*;
        match self {
            Oracle => matches!(p, Alpha | Beta | GridSizes),
            Semigroup | Composition | Parts => matches!(p, GridSizes),
            RatioLemma | RlDivergence => matches!(p, Alpha | S | Center | Widths | NPoints),
            ElLimit | EnergyTerm => matches!(p, Gamma | Lambda | Mass | Center | Widths | NPoints),
            GradientCheck => matches!(p, Gamma | Lambda | Mass | GridSizes),
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    Alpha,
    Beta,
    S,
    Gamma,
    Lambda,
    Mass,
    Center,
    Widths,
    NPoints,
    GridSizes,
}

impl Param {
    fn key(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::S => "s",
            Param::Gamma => "gamma",
            Param::Lambda => "lambda",
            Param::Mass => "mass",
            Param::Center => "center",
            Param::Widths => "widths",
            Param::NPoints => "n_points",
            Param::GridSizes => "grid_sizes",
        }
    }
}

/// The JSON configuration document. Every field is optional; command-line
/// flags override it and per-study defaults fill the rest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: Option<StudyKind>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<u32>>,
    pub s: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub mass: Option<f64>,
    pub center: Option<f64>,
    pub widths: Option<Vec<f64>>,
    pub n_points: Option<usize>,
    pub grid_sizes: Option<Vec<usize>>,
}

impl StudyConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.display().to_string(),
            source,
        })
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: StudyConfig) -> StudyConfig {
        StudyConfig {
            study: self.study.or(base.study),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            s: self.s.or(base.s),
            gamma: self.gamma.or(base.gamma),
            lambda: self.lambda.or(base.lambda),
            mass: self.mass.or(base.mass),
            center: self.center.or(base.center),
            widths: self.widths.or(base.widths),
            n_points: self.n_points.or(base.n_points),
            grid_sizes: self.grid_sizes.or(base.grid_sizes),
        }
    }

    /// Validate against `kind` and fill defaults.
    pub fn resolve(self, kind: StudyKind) -> CliResult<Settings> {
        if let Some(other) = self.study {
            if other != kind {
                return Err(usage(format!(
                    "config names study {other} but {kind} was requested"
                )));
            }
        }
        let pick = |p: Param, given: bool| -> CliResult<bool> {
            match (kind.uses(p), given) {
                (false, true) => Err(usage(format!("{} does not apply to study {kind}", p.key()))),
                (used, _) => Ok(used),
            }
        };
        let mut out = Settings {
            study: kind,
            seed: self.seed.unwrap_or(0),
            alpha: None,
            beta: None,
            s: None,
            gamma: None,
            lambda: None,
            mass: None,
            center: None,
            widths: None,
            n_points: None,
            grid_sizes: None,
        };
        if pick(Param::Alpha, self.alpha.is_some())? {
            let v = self.alpha.unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
            each_in_open_unit(&v, "alpha")?;
            out.alpha = Some(v);
        }
        if pick(Param::Beta, self.beta.is_some())? {
            let v = self.beta.unwrap_or_else(|| vec![1, 2, 3]);
            non_empty(&v, "beta")?;
            if v.iter().any(|&b| b == 0 || b > 8) {
                return Err(usage("beta powers must lie in 1..=8"));
            }
            out.beta = Some(v);
        }
        if pick(Param::S, self.s.is_some())? {
            let default = match kind {
                StudyKind::RatioLemma => vec![0.25, 0.5, 0.75],
                _ => vec![0.5],
            };
            let v = self.s.unwrap_or(default);
            each_in_open_unit(&v, "s")?;
            out.s = Some(v);
        }
        if pick(Param::Gamma, self.gamma.is_some())? {
            let default = match kind {
                StudyKind::ElLimit => vec![0.1, 1.0, 5.0],
                _ => vec![1.0],
            };
            let v = self.gamma.unwrap_or(default);
            each_positive(&v, "gamma")?;
            out.gamma = Some(v);
        }
        if pick(Param::Lambda, self.lambda.is_some())? {
            let v = self.lambda.unwrap_or_else(|| vec![0.1]);
            each_positive(&v, "lambda")?;
            out.lambda = Some(v);
        }
        if pick(Param::Mass, self.mass.is_some())? {
            let m = self.mass.unwrap_or(1.0);
            each_positive(&[m], "mass")?;
            out.mass = Some(m);
        }
        if pick(Param::Center, self.center.is_some())? {
            let default = match kind {
                StudyKind::RatioLemma | StudyKind::RlDivergence => 0.3,
                _ => 1.0,
            };
            let c = self.center.unwrap_or(default);
            if !(c > 0.0 && c < HOST_END) {
                return Err(usage(format!("center must lie inside (0, {HOST_END})")));
            }
            out.center = Some(c);
        }
        if pick(Param::Widths, self.widths.is_some())? {
            let v = self
                .widths
                .unwrap_or_else(|| (0..8).map(|i| 0.1 * 0.5f64.powi(i)).collect());
            if v.is_empty() {
                return Err(usage("widths list is empty"));
            }
            if v.len() < 2 {
                return Err(usage(
                    "a width family needs at least two widths to fit a rate",
                ));
            }
            each_positive(&v, "widths")?;
            if !v.windows(2).all(|p| p[1] < p[0]) {
                return Err(usage("widths must be strictly decreasing"));
            }
            out.widths = Some(v);
        }
        if pick(Param::NPoints, self.n_points.is_some())? {
            let n = self.n_points.unwrap_or(513);
            if n < 5 || n.is_multiple_of(2) {
                return Err(usage("n_points must be odd and at least 5"));
            }
            out.n_points = Some(n);
        }
        if pick(Param::GridSizes, self.grid_sizes.is_some())? {
            let default = match kind {
                StudyKind::Oracle => vec![4097],
                StudyKind::GradientCheck => vec![17, 25],
                _ => vec![129, 257, 513, 1025, 2049],
            };
            let v = self.grid_sizes.unwrap_or(default);
            if v.is_empty() {
                return Err(usage("grid sizes list is empty"));
            }
            if !v.windows(2).all(|p| p[1] > p[0]) {
                return Err(usage("grid sizes must be strictly increasing"));
            }
            let (min, step) = match kind {
                StudyKind::Oracle | StudyKind::Composition => (5, 4),
                StudyKind::Semigroup => (5, 2),
                _ => (5, 1),
            };
            if v.iter().any(|&n| n < min || (n - 1) % step != 0) {
                return Err(usage(format!(
                    "grid sizes for {kind} must be at least {min} with n - 1 divisible by {step}"
                )));
            }
            if matches!(
                kind,
                StudyKind::Semigroup | StudyKind::Composition | StudyKind::Parts
            ) && v.len() < 2
            {
                return Err(usage(format!(
                    "{kind} needs at least two grid sizes to fit an order"
                )));
            }
            out.grid_sizes = Some(v);
        }
        Ok(out)
    }
}

/// Right end of the host interval `[0, HOST_END]` that window studies live on.
pub const HOST_END: f64 = 2.0;

/// A validated configuration. Parameters the study does not use stay `None`
/// and are left out of the report echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub study: StudyKind,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_sizes: Option<Vec<usize>>,
}

impl Settings {
    /// Defaults for `kind` with the given seed.
    pub fn defaults(kind: StudyKind, seed: u64) -> Self {
        StudyConfig {
            seed: Some(seed),
            ..StudyConfig::default()
        }
        .resolve(kind)
        .expect("defaults are valid")
    }

    pub(crate) fn list<T>(field: &Option<Vec<T>>) -> &[T] {
        field.as_deref().unwrap_or(&[])
    }
}

fn non_empty<T>(v: &[T], name: &str) -> CliResult<()> {
    if v.is_empty() {
        Err(usage(format!("{name} list is empty")))
    } else {
        Ok(())
    }
}

fn each_in_open_unit(v: &[f64], name: &str) -> CliResult<()> {
    non_empty(v, name)?;
    if v.iter().all(|&x| x > 0.0 && x < 1.0) {
        Ok(())
    } else {
        Err(usage(format!("every {name} must lie in (0, 1)")))
    }
}

fn each_positive(v: &[f64], name: &str) -> CliResult<()> {
    non_empty(v, name)?;
    if v.iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(usage(format!("every {name} must be positive and finite")))
    }
}
