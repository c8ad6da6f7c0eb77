//! Named initial data and the shipped experiment configs.

use crate::error::{Error, Result};
use crate::solvers::{Field, Grid1D};

/// Initial data presets, sampled at cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `a · exp(−(x−c)²/(2w²))`
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `a` on `|x − c| < w`, zero elsewhere.
    Box {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// [`InitialData::Box`] with both edges smoothed over `±smoothing`.
    MollifiedBox {
        amplitude: f64,
        center: f64,
        width: f64,
        smoothing: f64,
    },
    /// `left` for `x < position`, `right` otherwise; the periodic wrap adds
    /// the opposite jump at the box edge.
    Step {
        left: f64,
        right: f64,
        position: f64,
    },
    /// `a · sign(x)`
    Sign {
        amplitude: f64,
    },
    Constant {
        value: f64,
    },
}

/// C² smoothstep from 0 to 1 on `[−1, 1]`, the primitive of the normalized
/// bump `(35/32)(1 − s²)³`.
fn smoothstep(s: f64) -> f64 {
    if s <= -1.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let s2 = s * s;
        0.5 + 35.0 / 32.0 * s * (1.0 - s2 + 0.6 * s2 * s2 - s2 * s2 * s2 / 7.0)
    }
}

impl InitialData {
    pub const KINDS: &'static [&'static str] = &[
        "gaussian",
        "box",
        "mollified_box",
        "step",
        "sign",
        "constant",
    ];

    pub fn kind(&self) -> &'static str {
        match self {
            InitialData::Gaussian { .. } => "gaussian",
            InitialData::Box { .. } => "box",
            InitialData::MollifiedBox { .. } => "mollified_box",
            InitialData::Step { .. } => "step",
            InitialData::Sign { .. } => "sign",
            InitialData::Constant { .. } => "constant",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            InitialData::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let s = (x - center) / width;
                amplitude * (-0.5 * s * s).exp()
            }
            InitialData::Box {
                amplitude,
                center,
                width,
            } => {
                if (x - center).abs() < width {
                    amplitude
                } else {
                    0.0
                }
            }
            InitialData::MollifiedBox {
                amplitude,
                center,
                width,
                smoothing,
            } => {
                let d = x - center;
                amplitude
                    * (smoothstep((d + width) / smoothing) - smoothstep((d - width) / smoothing))
            }
            InitialData::Step {
                left,
                right,
                position,
            } => {
                if x < position {
                    left
                } else {
                    right
                }
            }
            InitialData::Sign { amplitude } => {
                if x > 0.0 {
                    amplitude
                } else if x < 0.0 {
                    -amplitude
                } else {
                    0.0
                }
            }
            InitialData::Constant { value } => value,
        }
    }

    pub fn field(&self, grid: Grid1D) -> Field {
        Field::from_fn(grid, |x| self.eval(x))
    }

    /// `prefix` is the config key prefix used in error messages.
    pub(crate) fn validate(&self, prefix: &str) -> Result<()> {
        let bad = |name: &str, reason: &str| Error::Validation {
            parameter: format!("{prefix}{name}"),
            reason: reason.to_string(),
        };
        match *self {
            InitialData::Gaussian { width, .. } | InitialData::Box { width, .. } => {
                if !(width > 0.0) {
                    return Err(bad("width", "must be positive"));
                }
            }
            InitialData::MollifiedBox {
                width, smoothing, ..
            } => {
                if !(width > 0.0) {
                    return Err(bad("width", "must be positive"));
                }
                if !(smoothing > 0.0 && smoothing <= width) {
                    return Err(bad("smoothing", "must lie in (0, width]"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Config keys below `initial.`, in canonical order.
    pub(crate) fn config_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("kind", self.kind().to_string())];
        match *self {
            InitialData::Gaussian {
                amplitude,
                center,
                width,
            }
            | InitialData::Box {
                amplitude,
                center,
                width,
            } => {
                out.push(("amplitude", amplitude.to_string()));
                out.push(("center", center.to_string()));
                out.push(("width", width.to_string()));
            }
            InitialData::MollifiedBox {
                amplitude,
                center,
                width,
                smoothing,
            } => {
                out.push(("amplitude", amplitude.to_string()));
                out.push(("center", center.to_string()));
                out.push(("width", width.to_string()));
                out.push(("smoothing", smoothing.to_string()));
            }
            InitialData::Step {
                left,
                right,
                position,
            } => {
                out.push(("left", left.to_string()));
                out.push(("right", right.to_string()));
                out.push(("center", position.to_string()));
            }
            InitialData::Sign { amplitude } => out.push(("amplitude", amplitude.to_string())),
            InitialData::Constant { value } => out.push(("value", value.to_string())),
        }
        out
    }
}

/// Shipped experiment configs, by name.
pub const EXPERIMENT_PRESETS: &[(&str, &str)] = &[
    ("error_rate", include_str!("../../configs/error_rate.conf")),
    (
        "continuous_dependence",
        include_str!("../../configs/continuous_dependence.conf"),
    ),
    (
        "continuous_dependence_flux",
        include_str!("../../configs/continuous_dependence_flux.conf"),
    ),
    (
        "bv_monotone",
        include_str!("../../configs/bv_monotone.conf"),
    ),
    (
        "bv_monotone_deterministic",
        include_str!("../../configs/bv_monotone_deterministic.conf"),
    ),
    (
        "fractional_bv",
        include_str!("../../configs/fractional_bv.conf"),
    ),
    (
        "entropy_check",
        include_str!("../../configs/entropy_check.conf"),
    ),
];

pub fn experiment_preset(name: &str) -> Option<&'static str> {
    EXPERIMENT_PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Human-readable catalogue for `levy-scl presets`.
pub fn catalogue() -> String {
    let mut s = String::new();
    s.push_str("initial.kind:  gaussian (amplitude, center, width)\n");
    s.push_str("               box (amplitude, center, width)\n");
    s.push_str("               mollified_box (amplitude, center, width, smoothing)\n");
    s.push_str("               step (left, right, center)\n");
    s.push_str("               sign (amplitude)\n");
    s.push_str("               constant (value)\n");
    s.push_str("flux.kind:     burgers (drift)  linear (speed)  zero\n");
    s.push_str("noise.kind:    zero  linear (scale, lambda_star)  tanh (scale, lambda_star)\n");
    s.push_str("               noise.x_dependence = none | bump (bump_center, bump_width)\n");
    s.push_str(
        "measure.kind:  atomic (atoms = z:w, ...)  density (alpha, scale, z_max, symmetric)\n",
    );
    s.push_str("               measure.cut optional\n");
    s.push_str("experiments:\n");
    for (name, _) in EXPERIMENT_PRESETS {
        s.push_str("  ");
        s.push_str(name);
        s.push('\n');
    }
    s
}
