//! Line-based `key = value` experiment configuration.
//!
//! `#` starts a comment. Keys are dotted lowercase identifiers; lists are
//! comma separated. Every key is consumed by exactly one field, so unknown
//! or misplaced keys are reported with their line number. Defaults are
//! resolved at parse time, which makes [`ExperimentConfig::to_config_string`]
//! an exact inverse of [`ExperimentConfig::parse`].

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::entropy::TestFunction;
use crate::error::{Error, Result};
use crate::estimators::WeightPhi;
use crate::levy_noise::{
    Atom, JumpCoefficient, LevyMeasure, MeasureKind, NoiseShape, PowerLaw, SpatialProfile,
};
use crate::solvers::{FluxModel, Grid1D, NumericalFlux};

use super::presets::InitialData;

/// Variance ratio used to pick the cut of a density measure when
/// `measure.cut` is not given.
pub const DEFAULT_CUT_RATIO: f64 = 1e-4;

/// Entropy-residual tolerance constant, calibrated on a resolution and
/// ensemble-size sweep of the entropy-check setup.
pub const DEFAULT_TOL_CONST: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ErrorRate,
    ContinuousDependence,
    BvMonotone,
    FractionalBv,
    EntropyCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::ErrorRate,
        ExperimentKind::ContinuousDependence,
        ExperimentKind::BvMonotone,
        ExperimentKind::FractionalBv,
        ExperimentKind::EntropyCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::ErrorRate => "error_rate",
            ExperimentKind::ContinuousDependence => "continuous_dependence",
            ExperimentKind::BvMonotone => "bv_monotone",
            ExperimentKind::FractionalBv => "fractional_bv",
            ExperimentKind::EntropyCheck => "entropy_check",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One `(u₀, F, η)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dataset {
    pub initial: InitialData,
    pub flux: FluxModel,
    pub noise: JumpCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// `σ_c = (1 + c) η_v`
    Noise,
    /// `G_c(u) = G(u) + c u`
    Flux,
}

impl SweepTarget {
    pub fn name(&self) -> &'static str {
        match self {
            SweepTarget::Noise => "noise",
            SweepTarget::Flux => "flux",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub target: SweepTarget,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyOptions {
    pub xi: f64,
    pub k_values: Vec<f64>,
    pub psi: TestFunction,
    /// `tol = tol_const · (dx + 1/√M)`.
    pub tol_const: f64,
    pub inject_expansion_shock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOptions {
    pub u_range: (f64, f64),
    pub n_u: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusOptions {
    /// Shifts `δ` in cells.
    pub delta_cells: Vec<usize>,
    pub radius: f64,
    pub besov_mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    pub slope_min: f64,
    pub slope_max: f64,
    pub bv_slack: f64,
    /// Number of standard errors added to every mean comparison.
    pub cushion: f64,
    pub max_relative_se: f64,
    pub exponent_min: f64,
    pub exponent_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: Grid1D,
    pub horizon: f64,
    /// Strictly increasing, ending at `horizon`.
    pub snapshots: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    pub cfl: f64,
    pub numerical_flux: NumericalFlux,
    pub max_dt: f64,
    /// Strictly decreasing viscosities.
    pub eps_list: Vec<f64>,
    pub u: Dataset,
    pub v: Option<Dataset>,
    pub measure: LevyMeasure,
    pub sweep: Option<Sweep>,
    pub weight: WeightPhi,
    pub entropy: EntropyOptions,
    pub distance: DistanceOptions,
    pub modulus: ModulusOptions,
    pub verdict: VerdictOptions,
    pub output_snapshots: bool,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Key/value pairs with their source lines, consumed field by field.
#[derive(Debug, Default)]
struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

fn config_error(line: Option<usize>, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'.')
        && !key.starts_with('.')
        && !key.ends_with('.')
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                config_error(
                    Some(line_no),
                    format!("expected `key = value`, got `{content}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_key(key) {
                return Err(config_error(Some(line_no), format!("invalid key `{key}`")));
            }
            if value.is_empty() {
                return Err(config_error(
                    Some(line_no),
                    format!("key `{key}` has an empty value"),
                ));
            }
            if let Some(prev) = raw.entries.get(key) {
                return Err(config_error(
                    Some(line_no),
                    format!(
                        "duplicate key `{key}` (first defined on line {})",
                        prev.line
                    ),
                ));
            }
            raw.entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line: line_no,
                },
            );
        }
        Ok(raw)
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Entry> {
        self.take(key).ok_or_else(|| self.missing(key))
    }

    /// Missing-key error, pointing at a likely misspelling when one exists.
    fn missing(&self, key: &str) -> Error {
        let near = self
            .entries
            .iter()
            .filter(|(k, _)| strsim::levenshtein(k, key) <= 2)
            .min_by_key(|(k, e)| (strsim::levenshtein(k, key), e.line));
        match near {
            Some((k, e)) => config_error(
                Some(e.line),
                format!(
                    "missing mandatory key `{key}`; unknown key `{k}` looks like a misspelling"
                ),
            ),
            None => config_error(None, format!("missing mandatory key `{key}`")),
        }
    }

    fn parse_entry<T>(
        key: &str,
        e: &Entry,
        what: &str,
        f: impl Fn(&str) -> Option<T>,
    ) -> Result<T> {
        f(&e.value).ok_or_else(|| {
            config_error(
                Some(e.line),
                format!("key `{key}`: expected {what}, got `{}`", e.value),
            )
        })
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|e| Self::parse_entry(key, &e, "a finite number", parse_f64))
            .transpose()
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|e| Self::parse_entry(key, &e, "a non-negative integer", |s| s.parse().ok()))
            .transpose()
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key)
            .map(|e| Self::parse_entry(key, &e, "a non-negative integer", |s| s.parse().ok()))
            .transpose()
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        Ok(self
            .take(key)
            .map(|e| {
                Self::parse_entry(key, &e, "`true` or `false`", |s| match s {
                    "true" => Some(true),
                    "false" => Some(false),
                    _ => None,
                })
            })
            .transpose()?
            .unwrap_or(default))
    }

    fn list_f64(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(key)
            .map(|e| {
                Self::parse_entry(key, &e, "a comma-separated list of numbers", |s| {
                    s.split(',').map(|p| parse_f64(p.trim())).collect()
                })
            })
            .transpose()
    }

    fn list_usize(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        self.take(key)
            .map(|e| {
                Self::parse_entry(key, &e, "a comma-separated list of integers", |s| {
                    s.split(',').map(|p| p.trim().parse().ok()).collect()
                })
            })
            .transpose()
    }

    fn string(&mut self, key: &str) -> Option<Entry> {
        self.take(key)
    }

    fn finish(self) -> Result<()> {
        if let Some((key, e)) = self.entries.iter().min_by_key(|(_, e)| e.line) {
            return Err(config_error(Some(e.line), format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn unknown_choice(key: &str, e: &Entry, choices: &[&str]) -> Error {
    config_error(
        Some(e.line),
        format!(
            "key `{key}`: unknown value `{}` (expected one of: {})",
            e.value,
            choices.join(", ")
        ),
    )
}

fn parse_initial(raw: &mut RawConfig, prefix: &str) -> Result<InitialData> {
    let kind_key = format!("{prefix}initial.kind");
    let e = raw.require(&kind_key)?;
    let key = |name: &str| format!("{prefix}initial.{name}");
    let data = match e.value.as_str() {
        "gaussian" => InitialData::Gaussian {
            amplitude: raw.f64_or(&key("amplitude"), 1.0)?,
            center: raw.f64_or(&key("center"), 0.0)?,
            width: raw.f64_or(&key("width"), 0.5)?,
        },
        "box" => InitialData::Box {
            amplitude: raw.f64_or(&key("amplitude"), 1.0)?,
            center: raw.f64_or(&key("center"), 0.0)?,
            width: raw.f64_or(&key("width"), 0.5)?,
        },
        "mollified_box" => InitialData::MollifiedBox {
            amplitude: raw.f64_or(&key("amplitude"), 1.0)?,
            center: raw.f64_or(&key("center"), 0.0)?,
            width: raw.f64_or(&key("width"), 0.5)?,
            smoothing: raw.f64_or(&key("smoothing"), 0.1)?,
        },
        "step" => InitialData::Step {
            left: raw.f64_or(&key("left"), 1.0)?,
            right: raw.f64_or(&key("right"), 0.0)?,
            position: raw.f64_or(&key("center"), 0.0)?,
        },
        "sign" => InitialData::Sign {
            amplitude: raw.f64_or(&key("amplitude"), 1.0)?,
        },
        "constant" => InitialData::Constant {
            value: raw.f64_or(&key("value"), 0.0)?,
        },
        _ => return Err(unknown_choice(&kind_key, &e, InitialData::KINDS)),
    };
    data.validate(&key(""))?;
    Ok(data)
}

fn parse_flux(raw: &mut RawConfig, prefix: &str) -> Result<FluxModel> {
    let kind_key = format!("{prefix}flux.kind");
    let e = raw.require(&kind_key)?;
    match e.value.as_str() {
        "burgers" => Ok(FluxModel::Burgers {
            drift: raw.f64_or(&format!("{prefix}flux.drift"), 0.0)?,
        }),
        "linear" => Ok(FluxModel::Linear {
            speed: raw.f64_or(&format!("{prefix}flux.speed"), 1.0)?,
        }),
        "zero" => Ok(FluxModel::zero()),
        _ => Err(unknown_choice(
            &kind_key,
            &e,
            &["burgers", "linear", "zero"],
        )),
    }
}

fn parse_noise(raw: &mut RawConfig, prefix: &str) -> Result<JumpCoefficient> {
    let kind_key = format!("{prefix}noise.kind");
    let e = raw.require(&kind_key)?;
    let key = |name: &str| format!("{prefix}noise.{name}");
    let base = match e.value.as_str() {
        "zero" => return Ok(JumpCoefficient::zero()),
        "linear" => JumpCoefficient::linear(raw.f64_or(&key("scale"), 0.2)?),
        "tanh" => JumpCoefficient::tanh(raw.f64_or(&key("scale"), 0.2)?),
        _ => return Err(unknown_choice(&kind_key, &e, &["zero", "linear", "tanh"])),
    };
    let lambda_star = raw.f64_or(&key("lambda_star"), base.scale.abs())?;
    let dep_key = key("x_dependence");
    let profile = match raw.string(&dep_key) {
        None => SpatialProfile::Uniform,
        Some(e) => match e.value.as_str() {
            "none" => SpatialProfile::Uniform,
            "bump" => SpatialProfile::Bump {
                center: raw.f64_or(&key("bump_center"), 0.0)?,
                width: raw.f64_or(&key("bump_width"), 1.0)?,
            },
            _ => return Err(unknown_choice(&dep_key, &e, &["none", "bump"])),
        },
    };
    let coeff = base.with_lambda_star(lambda_star).with_profile(profile);
    if coeff.scale != 0.0 {
        coeff.validate()?;
    }
    Ok(coeff)
}

fn parse_measure(raw: &mut RawConfig) -> Result<LevyMeasure> {
    let e = raw.require("measure.kind")?;
    let cut = raw.f64("measure.cut")?;
    let measure = match e.value.as_str() {
        "atomic" => {
            let ae = raw.require("measure.atoms")?;
            let atoms = RawConfig::parse_entry(
                "measure.atoms",
                &ae,
                "a list of `mark:weight` pairs",
                |s| {
                    s.split(',')
                        .map(|p| {
                            let (z, w) = p.trim().split_once(':')?;
                            Some(Atom {
                                mark: parse_f64(z.trim())?,
                                weight: parse_f64(w.trim())?,
                            })
                        })
                        .collect::<Option<Vec<_>>>()
                },
            )?;
            match cut {
                Some(c) => LevyMeasure::atomic(atoms, c),
                None => LevyMeasure::atomic_exact(atoms),
            }
        }
        "density" => {
            let law = PowerLaw {
                alpha: raw.f64_or("measure.alpha", 0.5)?,
                scale: raw.f64_or("measure.scale", 1.0)?,
                z_max: raw.f64_or("measure.z_max", 1.0)?,
                symmetric: raw.bool_or("measure.symmetric", true)?,
            };
            match cut {
                Some(c) => LevyMeasure::density(law, c),
                None => {
                    let provisional = LevyMeasure::density(law, law.z_max);
                    provisional.validate()?;
                    let c = provisional.auto_cut(DEFAULT_CUT_RATIO)?;
                    LevyMeasure::density(law, c)
                }
            }
        }
        _ => return Err(unknown_choice("measure.kind", &e, &["atomic", "density"])),
    };
    measure.validate()?;
    Ok(measure)
}

fn parse_dataset(raw: &mut RawConfig) -> Result<Dataset> {
    Ok(Dataset {
        initial: parse_initial(raw, "")?,
        flux: parse_flux(raw, "")?,
        noise: parse_noise(raw, "")?,
    })
}

/// `v.*` keys override the corresponding group of the first dataset.
fn parse_second_dataset(raw: &mut RawConfig, u: &Dataset) -> Result<Dataset> {
    Ok(Dataset {
        initial: if raw.has_prefix("v.initial.") {
            parse_initial(raw, "v.")?
        } else {
            u.initial
        },
        flux: if raw.has_prefix("v.flux.") {
            parse_flux(raw, "v.")?
        } else {
            u.flux
        },
        noise: if raw.has_prefix("v.noise.") {
            parse_noise(raw, "v.")?
        } else {
            u.noise
        },
    })
}

fn validation(parameter: &str, reason: impl Into<String>) -> Error {
    Error::Validation {
        parameter: parameter.to_string(),
        reason: reason.into(),
    }
}

/// Radius covering the data support at the horizon: initial support plus
/// the largest characteristic speed times `T`, capped at the half box.
fn default_radius(grid: &Grid1D, horizon: f64, datasets: &[&Dataset]) -> f64 {
    let half_box = 0.5 * grid.length();
    let mut radius: f64 = 0.0;
    for d in datasets {
        let u0 = d.initial.field(*grid);
        let support = grid
            .centers()
            .zip(u0.values())
            .filter(|(_, v)| v.abs() > 1e-8)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max);
        let (lo, hi) = (u0.min().min(0.0), u0.max().max(0.0));
        let speed = d.flux.lipschitz_bound(lo, hi);
        radius = radius.max(support + speed * horizon);
    }
    if radius <= 0.0 {
        radius = 0.5 * half_box;
    }
    radius.min(half_box)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::parse(text)?;
        let kind_entry = raw.require("kind")?;
        let kind = ExperimentKind::from_name(&kind_entry.value).ok_or_else(|| {
            let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            unknown_choice("kind", &kind_entry, &names)
        })?;

        let x_min = raw
            .require("grid.x_min")
            .and_then(|e| RawConfig::parse_entry("grid.x_min", &e, "a finite number", parse_f64))?;
        let x_max = raw
            .require("grid.x_max")
            .and_then(|e| RawConfig::parse_entry("grid.x_max", &e, "a finite number", parse_f64))?;
        let n_cells = raw.require("grid.n_cells").and_then(|e| {
            RawConfig::parse_entry("grid.n_cells", &e, "a positive integer", |s| {
                s.parse::<usize>().ok()
            })
        })?;
        let grid =
            Grid1D::new(x_min, x_max, n_cells).map_err(|e| validation("grid", e.to_string()))?;

        let horizon = raw.require("time.horizon").and_then(|e| {
            RawConfig::parse_entry("time.horizon", &e, "a finite number", parse_f64)
        })?;
        if !(horizon > 0.0) {
            return Err(validation(
                "time.horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        let snapshots = raw
            .list_f64("time.snapshots")?
            .unwrap_or_else(|| vec![horizon]);

        let paths = raw.usize("ensemble.paths")?.unwrap_or(64);
        let seed = raw.u64("ensemble.seed")?.unwrap_or(0);

        let cfl = raw.f64_or("solver.cfl", 0.9)?;
        let numerical_flux = match raw.string("solver.flux") {
            None => NumericalFlux::EngquistOsher,
            Some(e) => NumericalFlux::from_name(&e.value).ok_or_else(|| {
                unknown_choice(
                    "solver.flux",
                    &e,
                    &["engquist_osher", "godunov", "lax_friedrichs"],
                )
            })?,
        };
        let max_dt = raw.f64_or("solver.max_dt", 0.01)?;
        let eps_list = raw.list_f64("viscosity.eps")?.unwrap_or_else(|| vec![0.0]);

        let u = parse_dataset(&mut raw)?;
        let sweep = match raw.string("sweep.target") {
            None => None,
            Some(e) => {
                let target = match e.value.as_str() {
                    "noise" => SweepTarget::Noise,
                    "flux" => SweepTarget::Flux,
                    _ => return Err(unknown_choice("sweep.target", &e, &["noise", "flux"])),
                };
                let values = raw
                    .list_f64("sweep.values")?
                    .ok_or_else(|| raw.missing("sweep.values"))?;
                Some(Sweep { target, values })
            }
        };
        let v = if raw.has_prefix("v.")
            || (kind == ExperimentKind::ContinuousDependence && sweep.is_some())
        {
            Some(parse_second_dataset(&mut raw, &u)?)
        } else {
            None
        };
        let measure = parse_measure(&mut raw)?;

        let radius = match raw.f64("weight.radius")? {
            Some(r) => r,
            None => {
                let mut sets = vec![&u];
                if let Some(v) = &v {
                    sets.push(v);
                }
                default_radius(&grid, horizon, &sets)
            }
        };
        let weight = WeightPhi::new(radius, raw.f64_or("weight.decay", 1.0)?)?;

        let half = 0.5 * grid.length();
        let centre = 0.5 * (grid.x_min() + grid.x_max());
        let psi = match raw.list_f64("entropy.psi")? {
            None => TestFunction {
                amplitude: 1.0,
                t_center: 0.5 * horizon,
                t_halfwidth: 0.5 * horizon,
                x_center: centre,
                x_halfwidth: 0.5 * half,
            },
            Some(p) if p.len() == 5 => TestFunction {
                amplitude: p[0],
                t_center: p[1],
                t_halfwidth: p[2],
                x_center: p[3],
                x_halfwidth: p[4],
            },
            Some(_) => {
                return Err(validation(
                    "entropy.psi",
                    "expected `amplitude, t_center, t_halfwidth, x_center, x_halfwidth`",
                ))
            }
        };
        let entropy = EntropyOptions {
            xi: raw.f64_or("entropy.xi", 4.0 * grid.dx())?,
            k_values: raw
                .list_f64("entropy.k_values")?
                .unwrap_or_else(|| vec![-1.0, 0.0, 1.0]),
            psi,
            tol_const: raw.f64_or("entropy.tol_const", DEFAULT_TOL_CONST)?,
            inject_expansion_shock: raw.bool_or("entropy.inject_expansion_shock", false)?,
        };

        let distance = DistanceOptions {
            u_range: match raw.list_f64("distance.u_range")? {
                None => (-8.0, 8.0),
                Some(r) if r.len() == 2 => (r[0], r[1]),
                Some(_) => return Err(validation("distance.u_range", "expected `lo, hi`")),
            },
            n_u: raw.usize("distance.n_u")?.unwrap_or(1601),
        };

        let modulus = ModulusOptions {
            delta_cells: raw
                .list_usize("modulus.delta_cells")?
                .unwrap_or_else(|| vec![2, 4, 8, 16, 32, 64]),
            radius: raw.f64_or("modulus.radius", radius)?,
            besov_mu: raw.f64_or("besov.mu", 0.75)?,
        };

        let (slope_min, slope_max) = match (kind, sweep.as_ref().map(|s| s.target)) {
            (ExperimentKind::ContinuousDependence, Some(SweepTarget::Noise)) => (0.35, 0.65),
            (ExperimentKind::ContinuousDependence, Some(SweepTarget::Flux)) => (0.8, 1.2),
            _ => (0.35, 1.2),
        };
        let verdict = VerdictOptions {
            slope_min: raw.f64_or("verdict.slope_min", slope_min)?,
            slope_max: raw.f64_or("verdict.slope_max", slope_max)?,
            bv_slack: raw.f64_or("verdict.bv_slack", 0.05)?,
            cushion: raw.f64_or("verdict.cushion", 3.0)?,
            max_relative_se: raw.f64_or("verdict.max_relative_se", 0.2)?,
            exponent_min: raw.f64_or("verdict.exponent_min", 0.1)?,
            exponent_max: raw.f64_or("verdict.exponent_max", 1.0)?,
        };
        let output_snapshots = raw.bool_or("output.snapshots", false)?;
        raw.finish()?;

        let cfg = ExperimentConfig {
            kind,
            grid,
            horizon,
            snapshots,
            paths,
            seed,
            cfl,
            numerical_flux,
            max_dt,
            eps_list,
            u,
            v,
            measure,
            sweep,
            weight,
            entropy,
            distance,
            modulus,
            verdict,
            output_snapshots,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural checks that span several keys.
    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(validation(
                "ensemble.paths",
                format!("need at least 2 paths, got {}", self.paths),
            ));
        }
        if self.snapshots.is_empty()
            || self
                .snapshots
                .iter()
                .any(|&t| !(t >= 0.0 && t <= self.horizon))
            || self.snapshots.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(validation(
                "time.snapshots",
                "must be strictly increasing within [0, time.horizon]",
            ));
        }
        if self.snapshots.last() != Some(&self.horizon) {
            return Err(validation("time.snapshots", "must end at time.horizon"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(validation(
                "solver.cfl",
                format!("must lie in (0, 1], got {}", self.cfl),
            ));
        }
        if !(self.max_dt > 0.0) {
            return Err(validation("solver.max_dt", "must be positive"));
        }
        if self.eps_list.is_empty()
            || self.eps_list.iter().any(|&e| !(e >= 0.0))
            || self.eps_list.windows(2).any(|w| w[0] <= w[1])
        {
            return Err(validation(
                "viscosity.eps",
                "must be a non-empty, strictly decreasing list of non-negative values",
            ));
        }
        let single_eps = matches!(
            self.kind,
            ExperimentKind::ContinuousDependence
                | ExperimentKind::FractionalBv
                | ExperimentKind::EntropyCheck
        );
        if single_eps && self.eps_list.len() != 1 {
            return Err(validation(
                "viscosity.eps",
                format!("{} runs at a single viscosity", self.kind),
            ));
        }
        match self.kind {
            ExperimentKind::ContinuousDependence => {
                if self.v.is_none() {
                    return Err(validation(
                        "v",
                        "continuous_dependence needs a second dataset (`v.*` keys or a sweep)",
                    ));
                }
                let v = self.v.as_ref().unwrap_or(&self.u);
                if self.u.noise.is_x_dependent() || v.noise.is_x_dependent() {
                    return Err(validation(
                        "noise.x_dependence",
                        "continuous_dependence requires x-independent noise in both datasets",
                    ));
                }
                if let Some(s) = &self.sweep {
                    if s.values.len() < 2 || s.values.iter().any(|&c| !(c > 0.0)) {
                        return Err(validation(
                            "sweep.values",
                            "need at least two positive values",
                        ));
                    }
                    if s.target == SweepTarget::Noise && v.noise.is_zero() {
                        return Err(validation(
                            "sweep.target",
                            "noise sweep needs a non-zero noise",
                        ));
                    }
                    if s.target == SweepTarget::Noise {
                        let largest = s.values.iter().fold(0.0f64, |m, &c| m.max(c));
                        if v.noise.scale.abs() * (1.0 + largest) >= 1.0 {
                            return Err(validation(
                                "sweep.values",
                                "perturbed noise must keep a u-Lipschitz constant below 1",
                            ));
                        }
                    }
                }
            }
            ExperimentKind::BvMonotone => {
                if self.u.noise.is_x_dependent() {
                    return Err(validation(
                        "noise.x_dependence",
                        "bv_monotone requires x-independent noise",
                    ));
                }
            }
            ExperimentKind::FractionalBv => {
                let m = &self.modulus;
                if m.delta_cells.is_empty()
                    || m.delta_cells[0] == 0
                    || m.delta_cells.windows(2).any(|w| w[0] >= w[1])
                {
                    return Err(validation(
                        "modulus.delta_cells",
                        "must be a strictly increasing list of positive cell counts",
                    ));
                }
                if !(m.besov_mu > 0.0 && m.besov_mu < 1.0) {
                    return Err(validation(
                        "besov.mu",
                        format!("must lie in (0, 1), got {}", m.besov_mu),
                    ));
                }
                let largest = *m.delta_cells.last().unwrap_or(&0) as f64 * self.grid.dx();
                let reach = m.radius + largest;
                if !(m.radius > 0.0) || -reach < self.grid.x_min() || reach > self.grid.x_max() {
                    return Err(validation(
                        "modulus.radius",
                        format!(
                            "K_R enlarged by the largest shift ({reach}) must lie inside the box"
                        ),
                    ));
                }
            }
            ExperimentKind::EntropyCheck => {
                let e = &self.entropy;
                if !(e.xi > 0.0) {
                    return Err(validation("entropy.xi", "must be positive"));
                }
                if e.k_values.is_empty() {
                    return Err(validation("entropy.k_values", "must not be empty"));
                }
                if !(e.tol_const >= 0.0) {
                    return Err(validation("entropy.tol_const", "must be non-negative"));
                }
            }
            ExperimentKind::ErrorRate => {}
        }
        if !(self.distance.u_range.0 < self.distance.u_range.1) || self.distance.n_u < 2 {
            return Err(validation("distance", "need u_range lo < hi and n_u >= 2"));
        }
        Ok(())
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("kind", self.kind.name().into());
        kv("grid.x_min", self.grid.x_min().to_string());
        kv("grid.x_max", self.grid.x_max().to_string());
        kv("grid.n_cells", self.grid.n_cells().to_string());
        kv("time.horizon", self.horizon.to_string());
        kv("time.snapshots", join(&self.snapshots));
        kv("ensemble.paths", self.paths.to_string());
        kv("ensemble.seed", self.seed.to_string());
        kv("solver.cfl", self.cfl.to_string());
        kv("solver.flux", self.numerical_flux.name().into());
        kv("solver.max_dt", self.max_dt.to_string());
        kv("viscosity.eps", join(&self.eps_list));
        for (k, v) in dataset_pairs("", &self.u) {
            kv(&k, v);
        }
        if let Some(v) = &self.v {
            for (k, val) in dataset_pairs("v.", v) {
                kv(&k, val);
            }
        }
        match &self.measure.kind {
            MeasureKind::Atomic(atoms) => {
                kv("measure.kind", "atomic".into());
                let list: Vec<String> = atoms
                    .iter()
                    .map(|a| format!("{}:{}", a.mark, a.weight))
                    .collect();
                kv("measure.atoms", list.join(", "));
            }
            MeasureKind::Density(p) => {
                kv("measure.kind", "density".into());
                kv("measure.alpha", p.alpha.to_string());
                kv("measure.scale", p.scale.to_string());
                kv("measure.z_max", p.z_max.to_string());
                kv("measure.symmetric", p.symmetric.to_string());
            }
        }
        kv("measure.cut", self.measure.cut.to_string());
        if let Some(sw) = &self.sweep {
            kv("sweep.target", sw.target.name().into());
            kv("sweep.values", join(&sw.values));
        }
        kv("weight.radius", self.weight.radius.to_string());
        kv("weight.decay", self.weight.decay.to_string());
        let e = &self.entropy;
        kv("entropy.xi", e.xi.to_string());
        kv("entropy.k_values", join(&e.k_values));
        let p = &e.psi;
        kv(
            "entropy.psi",
            join(&[
                p.amplitude,
                p.t_center,
                p.t_halfwidth,
                p.x_center,
                p.x_halfwidth,
            ]),
        );
        kv("entropy.tol_const", e.tol_const.to_string());
        kv(
            "entropy.inject_expansion_shock",
            e.inject_expansion_shock.to_string(),
        );
        kv(
            "distance.u_range",
            join(&[self.distance.u_range.0, self.distance.u_range.1]),
        );
        kv("distance.n_u", self.distance.n_u.to_string());
        let cells: Vec<String> = self
            .modulus
            .delta_cells
            .iter()
            .map(|c| c.to_string())
            .collect();
        kv("modulus.delta_cells", cells.join(", "));
        kv("modulus.radius", self.modulus.radius.to_string());
        kv("besov.mu", self.modulus.besov_mu.to_string());
        let vd = &self.verdict;
        kv("verdict.slope_min", vd.slope_min.to_string());
        kv("verdict.slope_max", vd.slope_max.to_string());
        kv("verdict.bv_slack", vd.bv_slack.to_string());
        kv("verdict.cushion", vd.cushion.to_string());
        kv("verdict.max_relative_se", vd.max_relative_se.to_string());
        kv("verdict.exponent_min", vd.exponent_min.to_string());
        kv("verdict.exponent_max", vd.exponent_max.to_string());
        kv("output.snapshots", self.output_snapshots.to_string());
        s
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn dataset_pairs(prefix: &str, d: &Dataset) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = d
        .initial
        .config_pairs()
        .into_iter()
        .map(|(k, v)| (format!("{prefix}initial.{k}"), v))
        .collect();
    match d.flux {
        FluxModel::Burgers { drift } => {
            out.push((format!("{prefix}flux.kind"), "burgers".into()));
            out.push((format!("{prefix}flux.drift"), drift.to_string()));
        }
        FluxModel::Linear { speed } => {
            out.push((format!("{prefix}flux.kind"), "linear".into()));
            out.push((format!("{prefix}flux.speed"), speed.to_string()));
        }
    }
    let n = &d.noise;
    let shape = match n.shape {
        NoiseShape::Zero => "zero",
        NoiseShape::Linear => "linear",
        NoiseShape::Tanh => "tanh",
    };
    out.push((format!("{prefix}noise.kind"), shape.into()));
    if n.shape != NoiseShape::Zero {
        out.push((format!("{prefix}noise.scale"), n.scale.to_string()));
        out.push((
            format!("{prefix}noise.lambda_star"),
            n.lambda_star.to_string(),
        ));
        match n.profile {
            SpatialProfile::Uniform => {
                out.push((format!("{prefix}noise.x_dependence"), "none".into()))
            }
            SpatialProfile::Bump { center, width } => {
                out.push((format!("{prefix}noise.x_dependence"), "bump".into()));
                out.push((format!("{prefix}noise.bump_center"), center.to_string()));
                out.push((format!("{prefix}noise.bump_width"), width.to_string()));
            }
        }
    }
    out
}

/// Reads and parses a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text)
}
