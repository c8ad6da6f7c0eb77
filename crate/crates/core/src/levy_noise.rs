//! Lévy measures, jump coefficients and coupled realisations of the jump
//! part of a compensated Poisson random measure.
//!
//! Only jumps with `|z| >= κ` are simulated. Their compensator is applied as
//! a deterministic drift between events; jumps below the cut are dropped
//! together with their compensator, and the neglected variance
//! `∫_{|z|<κ} (|z| ∧ 1)² ν(dz)` is reported by [`LevyMeasure::small_jump_check`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance for density-measure mark integrals.
pub const MARK_QUADRATURE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub mark: f64,
    pub weight: f64,
}

/// Power-law intensity `scale · |z|^{-1-alpha}` on `0 < z <= z_max`, mirrored
/// to negative marks when `symmetric`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub alpha: f64,
    pub scale: f64,
    pub z_max: f64,
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Atomic(Vec<Atom>),
    Density(PowerLaw),
}

/// A Lévy measure together with the smallest simulated jump magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasure {
    pub kind: MeasureKind,
    pub cut: f64,
}

/// Output of [`LevyMeasure::small_jump_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallJumpReport {
    /// `∫_{|z|>0} (1 ∧ |z|²) ν(dz)`.
    pub total: f64,
    /// `∫_{|z|<κ} (|z| ∧ 1)² ν(dz)`, the variance dropped by truncation.
    pub neglected: f64,
}

impl PowerLaw {
    fn sides(&self) -> f64 {
        if self.symmetric {
            2.0
        } else {
            1.0
        }
    }

    /// One-sided `∫_0^{b} (z ∧ 1)² scale z^{-1-α} dz` for `b <= z_max`.
    fn truncated_second_moment(&self, b: f64) -> f64 {
        let a = self.alpha;
        let inner = b.min(1.0);
        let mut v = self.scale * inner.powf(2.0 - a) / (2.0 - a);
        if b > 1.0 {
            v += self.scale * (1.0 - b.powf(-a)) / a;
        }
        v
    }

    /// One-sided `∫_κ^{z_max} scale z^{-1-α} dz`.
    fn tail_mass(&self, kappa: f64) -> f64 {
        if kappa >= self.z_max {
            return 0.0;
        }
        self.scale * (kappa.powf(-self.alpha) - self.z_max.powf(-self.alpha)) / self.alpha
    }

    /// Inverse CDF of the normalised restriction to `[κ, z_max]`.
    fn inverse_cdf(&self, kappa: f64, p: f64) -> f64 {
        let a = self.alpha;
        let lo = kappa.powf(-a);
        let hi = self.z_max.powf(-a);
        (lo - p * (lo - hi)).powf(-1.0 / a).clamp(kappa, self.z_max)
    }
}

impl LevyMeasure {
    pub fn atomic(atoms: Vec<Atom>, cut: f64) -> Self {
        LevyMeasure {
            kind: MeasureKind::Atomic(atoms),
            cut,
        }
    }

    pub fn density(density: PowerLaw, cut: f64) -> Self {
        LevyMeasure {
            kind: MeasureKind::Density(density),
            cut,
        }
    }

    /// Atomic measure whose cut equals the smallest atom magnitude, so every
    /// atom is simulated and nothing is truncated.
    pub fn atomic_exact(atoms: Vec<Atom>) -> Self {
        let cut = atoms
            .iter()
            .map(|a| a.mark.abs())
            .fold(f64::INFINITY, f64::min);
        let cut = if cut.is_finite() { cut } else { 1.0 };
        Self::atomic(atoms, cut)
    }

    /// Structural checks plus the integrability condition on small jumps.
    pub fn validate(&self) -> Result<()> {
        if !(self.cut > 0.0 && self.cut.is_finite()) {
            return Err(Error::validation(
                "measure.cut",
                format!(
                    "truncation cut must be positive and finite, got {}",
                    self.cut
                ),
            ));
        }
        match &self.kind {
            MeasureKind::Atomic(atoms) => {
                for (i, a) in atoms.iter().enumerate() {
                    if !(a.weight > 0.0 && a.weight.is_finite()) {
                        return Err(Error::validation(
                            "measure.atoms",
                            format!("atom {i} has non-positive weight {}", a.weight),
                        ));
                    }
                    if !(a.mark != 0.0 && a.mark.is_finite()) {
                        return Err(Error::validation(
                            "measure.atoms",
                            format!(
                                "atom {i} has mark {} (marks must be finite and non-zero)",
                                a.mark
                            ),
                        ));
                    }
                }
            }
            MeasureKind::Density(d) => {
                if !(d.alpha > 0.0 && d.alpha < 2.0) {
                    return Err(Error::validation(
                        "measure.alpha",
                        format!(
                            "stability index must lie in (0, 2), got {}; ∫ (1 ∧ z²) ν(dz) diverges",
                            d.alpha
                        ),
                    ));
                }
                if !(d.scale > 0.0 && d.scale.is_finite()) {
                    return Err(Error::validation(
                        "measure.scale",
                        format!("density scale must be positive, got {}", d.scale),
                    ));
                }
                if !(d.z_max > 0.0 && d.z_max.is_finite()) {
                    return Err(Error::validation(
                        "measure.z_max",
                        format!("support bound must be positive and finite, got {}", d.z_max),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Returns `∫ (1 ∧ |z|²) ν(dz)` and the truncation-error proxy at the
    /// measure's own cut.
    pub fn small_jump_check(&self) -> Result<SmallJumpReport> {
        self.validate()?;
        let report = match &self.kind {
            MeasureKind::Atomic(atoms) => {
                let m = |z: f64| z.abs().min(1.0).powi(2);
                SmallJumpReport {
                    total: atoms.iter().map(|a| a.weight * m(a.mark)).sum(),
                    neglected: atoms
                        .iter()
                        .filter(|a| a.mark.abs() < self.cut)
                        .map(|a| a.weight * m(a.mark))
                        .sum(),
                }
            }
            MeasureKind::Density(d) => SmallJumpReport {
                total: d.sides() * d.truncated_second_moment(d.z_max),
                neglected: d.sides() * d.truncated_second_moment(self.cut.min(d.z_max)),
            },
        };
        if !report.total.is_finite() {
            return Err(Error::validation(
                "measure",
                "∫ (1 ∧ z²) ν(dz) is not finite",
            ));
        }
        Ok(report)
    }

    /// `λ_κ = ν({|z| >= κ})`.
    pub fn truncated_intensity(&self, kappa: f64) -> Result<f64> {
        if !(kappa > 0.0) {
            return Err(Error::argument(
                "kappa",
                format!("must be positive, got {kappa}"),
            ));
        }
        Ok(match &self.kind {
            MeasureKind::Atomic(atoms) => atoms
                .iter()
                .filter(|a| a.mark.abs() >= kappa)
                .map(|a| a.weight)
                .sum(),
            MeasureKind::Density(d) => d.sides() * d.tail_mass(kappa),
        })
    }

    /// Largest cut whose neglected variance is at most `ratio` times the
    /// retained one. Atomic measures get the smallest atom magnitude.
    pub fn auto_cut(&self, ratio: f64) -> Result<f64> {
        match &self.kind {
            MeasureKind::Atomic(atoms) => {
                let c = atoms
                    .iter()
                    .map(|a| a.mark.abs())
                    .fold(f64::INFINITY, f64::min);
                if c.is_finite() {
                    Ok(c)
                } else {
                    Ok(1.0)
                }
            }
            MeasureKind::Density(d) => {
                let probe = LevyMeasure::density(*d, 1.0);
                let total = probe.small_jump_check()?.total;
                // neglected(κ) = sides·scale·κ^{2-α}/(2-α) for κ <= 1
                let target = ratio / (1.0 + ratio) * total;
                let k =
                    (target * (2.0 - d.alpha) / (d.sides() * d.scale)).powf(1.0 / (2.0 - d.alpha));
                Ok(k.min(1.0).min(d.z_max))
            }
        }
    }

    /// `∫_{|z| >= κ} f(z) ν(dz)`: an exact sum for atomic measures, composite
    /// Gauss–Legendre in `log |z|` for densities.
    pub fn integrate_marks(&self, kappa: f64, f: &dyn Fn(f64) -> f64) -> Result<f64> {
        self.integrate_marks_split(kappa, f, &[])
    }

    /// [`integrate_marks`](Self::integrate_marks) with the density quadrature
    /// also split at the magnitudes `|z| = splits[i]`, where `f` has kinks.
    pub fn integrate_marks_split(
        &self,
        kappa: f64,
        f: &dyn Fn(f64) -> f64,
        splits: &[f64],
    ) -> Result<f64> {
        match &self.kind {
            MeasureKind::Atomic(atoms) => Ok(atoms
                .iter()
                .filter(|a| a.mark.abs() >= kappa)
                .map(|a| a.weight * f(a.mark))
                .sum()),
            MeasureKind::Density(d) => {
                if kappa >= d.z_max {
                    return Ok(0.0);
                }
                let (lo, hi) = (kappa.ln(), d.z_max.ln());
                let g = |s: f64| {
                    let z = s.exp();
                    let w = d.scale * (-d.alpha * s).exp();
                    let pos = f(z);
                    if d.symmetric {
                        w * (pos + f(-z))
                    } else {
                        w * pos
                    }
                };
                let mut breaks = vec![0.0];
                breaks.extend(
                    splits
                        .iter()
                        .filter(|&&z| z > 0.0 && z.is_finite())
                        .map(|z| z.ln()),
                );
                quadrature::integrate(&g, lo, hi, &breaks, MARK_QUADRATURE_TOL)
            }
        }
    }

    /// Draws the jumps of `N` restricted to `|z| >= κ` on `(0, horizon]`.
    pub fn sample_path<R: Rng + ?Sized>(
        &self,
        kappa: f64,
        horizon: f64,
        rng: &mut R,
    ) -> Result<JumpPath> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::argument(
                "horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        let intensity = self.truncated_intensity(kappa)?;
        if !intensity.is_finite() {
            return Err(Error::argument("kappa", "truncated intensity is infinite"));
        }
        if intensity == 0.0 {
            return JumpPath::new(horizon, kappa, Vec::new());
        }
        let count = Poisson::new(intensity * horizon)
            .map_err(|e| Error::Numerical(format!("poisson parameter: {e}")))?
            .sample(rng) as usize;

        loop {
            let mut times: Vec<f64> = (0..count)
                .map(|_| horizon * (1.0 - rng.random::<f64>()))
                .collect();
            times.sort_by(f64::total_cmp);
            if times.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let mut events = Vec::with_capacity(count);
            for t in times {
                events.push(JumpEvent {
                    time: t,
                    mark: self.sample_mark(kappa, intensity, rng),
                });
            }
            return JumpPath::new(horizon, kappa, events);
        }
    }

    fn sample_mark<R: Rng + ?Sized>(&self, kappa: f64, intensity: f64, rng: &mut R) -> f64 {
        match &self.kind {
            MeasureKind::Atomic(atoms) => {
                let target = rng.random::<f64>() * intensity;
                let mut acc = 0.0;
                let mut last = 0.0;
                for a in atoms.iter().filter(|a| a.mark.abs() >= kappa) {
                    acc += a.weight;
                    last = a.mark;
                    if target < acc {
                        return a.mark;
                    }
                }
                last
            }
            MeasureKind::Density(d) => {
                let z = d.inverse_cdf(kappa, rng.random::<f64>());
                if d.symmetric && rng.random::<bool>() {
                    -z
                } else {
                    z
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub mark: f64,
}

/// One realisation of the simulated jumps on `(0, horizon]`.
///
/// Immutable once built; every solver arm of an ensemble member replays the
/// same path.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    horizon: f64,
    cut: f64,
    events: Vec<JumpEvent>,
}

impl JumpPath {
    pub fn new(horizon: f64, cut: f64, events: Vec<JumpEvent>) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::argument(
                "horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        if !(cut > 0.0) {
            return Err(Error::argument(
                "cut",
                format!("must be positive, got {cut}"),
            ));
        }
        let mut prev = 0.0;
        for (j, e) in events.iter().enumerate() {
            if !(e.time > prev && e.time <= horizon) {
                return Err(Error::Contract(format!(
                    "event {j} at t = {} is not strictly increasing inside (0, {horizon}]",
                    e.time
                )));
            }
            if !(e.mark.abs() >= cut) {
                return Err(Error::Contract(format!(
                    "event {j} mark {} is below the cut {cut}",
                    e.mark
                )));
            }
            prev = e.time;
        }
        Ok(JumpPath {
            horizon,
            cut,
            events,
        })
    }

    /// A path with no events: the noise-free dynamics.
    pub fn empty(horizon: f64) -> Self {
        JumpPath {
            horizon,
            cut: 1.0,
            events: Vec::new(),
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cut(&self) -> f64 {
        self.cut
    }

    pub fn events(&self) -> &[JumpEvent] {
        &self.events
    }
}

/// What a derived random stream is used for. Each purpose gets its own
/// stream per path index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamPurpose {
    JumpPath = 1,
    InitialData = 2,
    Calibration = 3,
}

/// Deterministic per-path random streams derived from one master seed.
///
/// Streams share the ChaCha key built from the master seed and differ in the
/// 64-bit stream id `(path_index << 8) | purpose`, so they never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedDerivation {
    pub master_seed: u64,
}

impl SeedDerivation {
    pub fn new(master_seed: u64) -> Self {
        SeedDerivation { master_seed }
    }

    pub fn stream(&self, path_index: u64, purpose: StreamPurpose) -> ChaCha8Rng {
        assert!(path_index < 1 << 56, "path index {path_index} out of range");
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream((path_index << 8) | purpose as u64);
        rng
    }
}

/// Dependence of the jump amplitude on the state `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseShape {
    Zero,
    /// `u`
    Linear,
    /// `tanh(u)`, bounded.
    Tanh,
}

/// Spatial modulation `g(x)` of the jump amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialProfile {
    Uniform,
    /// `exp(-(x - center)² / (2 width²))`
    Bump {
        center: f64,
        width: f64,
    },
}

impl SpatialProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SpatialProfile::Uniform => 1.0,
            SpatialProfile::Bump { center, width } => {
                let s = (x - center) / width;
                (-0.5 * s * s).exp()
            }
        }
    }

    fn lipschitz(&self) -> f64 {
        match *self {
            SpatialProfile::Uniform => 0.0,
            SpatialProfile::Bump { width, .. } => 1.0 / (width * std::f64::consts::E.sqrt()),
        }
    }
}

/// Separable jump coefficient `η(x, u; z) = scale · g(x) · s(u) · (|z| ∧ 1)`.
///
/// `state_bound` is the state range `|u| <= state_bound` over which the
/// spatial Lipschitz constant of an x-dependent linear coefficient is
/// declared (the product `g(x)·u` is only Lipschitz in `x` on bounded
/// states).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCoefficient {
    pub shape: NoiseShape,
    pub scale: f64,
    pub lambda_star: f64,
    pub profile: SpatialProfile,
    pub state_bound: f64,
}

impl JumpCoefficient {
    pub fn zero() -> Self {
        JumpCoefficient {
            shape: NoiseShape::Zero,
            scale: 0.0,
            lambda_star: 0.5,
            profile: SpatialProfile::Uniform,
            state_bound: 10.0,
        }
    }

    /// `scale · u · (|z| ∧ 1)`, with `λ*` defaulting to `scale`.
    pub fn linear(scale: f64) -> Self {
        JumpCoefficient {
            shape: NoiseShape::Linear,
            scale,
            lambda_star: scale,
            profile: SpatialProfile::Uniform,
            state_bound: 10.0,
        }
    }

    pub fn tanh(scale: f64) -> Self {
        JumpCoefficient {
            shape: NoiseShape::Tanh,
            ..Self::linear(scale)
        }
    }

    pub fn with_profile(mut self, profile: SpatialProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_lambda_star(mut self, lambda_star: f64) -> Self {
        self.lambda_star = lambda_star;
        self
    }

    /// Same coefficient with the amplitude multiplied by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.shape == NoiseShape::Zero || self.scale == 0.0
    }

    pub fn is_x_dependent(&self) -> bool {
        !self.is_zero() && !matches!(self.profile, SpatialProfile::Uniform)
    }

    fn state_factor(&self, u: f64) -> f64 {
        match self.shape {
            NoiseShape::Zero => 0.0,
            NoiseShape::Linear => u,
            NoiseShape::Tanh => u.tanh(),
        }
    }

    /// `η(x, u; z) / (|z| ∧ 1)`.
    pub fn amplitude(&self, x: f64, u: f64) -> f64 {
        if self.shape == NoiseShape::Zero {
            return 0.0;
        }
        self.scale * self.profile.eval(x) * self.state_factor(u)
    }

    pub fn mark_factor(z: f64) -> f64 {
        z.abs().min(1.0)
    }

    pub fn eval(&self, x: f64, u: f64, z: f64) -> f64 {
        self.amplitude(x, u) * Self::mark_factor(z)
    }

    /// Declared Lipschitz constant in `u`.
    pub fn lipschitz_u(&self) -> f64 {
        self.lambda_star
    }

    /// Declared Lipschitz constant in `x` (0 when x-independent).
    pub fn lipschitz_x(&self) -> f64 {
        let sup_state = match self.shape {
            NoiseShape::Zero => 0.0,
            NoiseShape::Linear => self.state_bound,
            NoiseShape::Tanh => 1.0,
        };
        self.scale.abs() * self.profile.lipschitz() * sup_state
    }

    /// `g(x)` in `|η(x,u;z)| <= g(x)(1+|u|)(|z| ∧ 1)`.
    pub fn growth_envelope(&self, x: f64) -> f64 {
        if self.shape == NoiseShape::Zero {
            return 0.0;
        }
        self.scale.abs() * self.profile.eval(x)
    }

    /// Declared constants: `0 < λ* < 1` dominating the actual u-Lipschitz
    /// constant, finite state bound, positive bump width.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_star > 0.0 && self.lambda_star < 1.0) {
            return Err(Error::validation(
                "noise.lambda_star",
                format!("must lie in (0, 1), got {}", self.lambda_star),
            ));
        }
        if !self.scale.is_finite() {
            return Err(Error::validation("noise.scale", "must be finite"));
        }
        // sup_x g = 1 and both state factors are 1-Lipschitz
        let actual = if self.shape == NoiseShape::Zero {
            0.0
        } else {
            self.scale.abs()
        };
        if actual > self.lambda_star {
            return Err(Error::validation(
                "noise.scale",
                format!(
                    "u-Lipschitz constant {actual} exceeds declared lambda_star {}",
                    self.lambda_star
                ),
            ));
        }
        if let SpatialProfile::Bump { width, center } = self.profile {
            if !(width > 0.0 && width.is_finite() && center.is_finite()) {
                return Err(Error::validation(
                    "noise.bump_width",
                    format!("must be positive and finite, got {width}"),
                ));
            }
        }
        if !(self.state_bound > 0.0 && self.state_bound.is_finite()) {
            return Err(Error::validation(
                "noise.state_bound",
                "must be positive and finite",
            ));
        }
        Ok(())
    }

    /// Spot-checks the Lipschitz and growth inequalities on `samples`
    /// random `(x, y, u, v, z)` with `|u|, |v| <= state_bound` and
    /// `x, y ∈ [x_lo, x_hi]`. Returns the first violation found.
    pub fn check_assumptions<R: Rng + ?Sized>(
        &self,
        x_lo: f64,
        x_hi: f64,
        samples: usize,
        rng: &mut R,
    ) -> Result<()> {
        self.validate()?;
        let lam = self.lipschitz_u();
        let k = self.lipschitz_x();
        let b = self.state_bound;
        for _ in 0..samples {
            let x = x_lo + (x_hi - x_lo) * rng.random::<f64>();
            let y = x_lo + (x_hi - x_lo) * rng.random::<f64>();
            let u = b * (2.0 * rng.random::<f64>() - 1.0);
            let v = b * (2.0 * rng.random::<f64>() - 1.0);
            let z = 4.0 * (2.0 * rng.random::<f64>() - 1.0);
            let m = Self::mark_factor(z);
            let lhs = (self.eval(x, u, z) - self.eval(y, v, z)).abs();
            let rhs = (lam * (u - v).abs() + k * (x - y).abs()) * m;
            if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::validation(
                    "noise",
                    format!(
                        "Lipschitz bound fails at x={x}, y={y}, u={u}, v={v}, z={z}: {lhs} > {rhs}"
                    ),
                ));
            }
            let growth = self.growth_envelope(x) * (1.0 + u.abs()) * m;
            if self.eval(x, u, z).abs() > growth * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::validation(
                    "noise",
                    format!("growth bound fails at x={x}, u={u}, z={z}"),
                ));
            }
        }
        Ok(())
    }
}

/// `∫_{|z|>=κ} η(x, u; z) ν(dz)`, the drift removed between events.
pub fn compensator_integral(
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    kappa: f64,
    x: f64,
    u: f64,
) -> Result<f64> {
    if coeff.is_zero() {
        return Ok(0.0);
    }
    let amp = coeff.amplitude(x, u);
    if amp == 0.0 {
        return Ok(0.0);
    }
    Ok(amp * mark_moment(measure, kappa)?)
}

/// `∫_{|z|>=κ} (|z| ∧ 1) ν(dz)`; every shipped coefficient is separable, so
/// the compensator is this moment times the amplitude.
pub fn mark_moment(measure: &LevyMeasure, kappa: f64) -> Result<f64> {
    measure.integrate_marks(kappa, &JumpCoefficient::mark_factor)
}
