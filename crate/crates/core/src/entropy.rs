//! Smoothed-absolute-value entropies `β_ξ`, the associated entropy fluxes,
//! the nonlocal jump correction, the noise distance `D(η, σ)` and a discrete
//! entropy-inequality residual for simulated trajectories.

use crate::error::{Error, Result};
use crate::estimators::{ensemble_mean, EnsembleStat};
use crate::levy_noise::{JumpCoefficient, JumpPath, LevyMeasure};
use crate::quadrature;
use crate::solvers::{FluxModel, Grid1D, Record, RecordKind, Trajectory};

/// `sup_{|r|<=1} ||r| − β(r)|` for the cubic-spline base profile.
pub const M1: f64 = 3.0 / 8.0;
/// `sup_{|r|<=1} |β''(r)|` for the cubic-spline base profile.
pub const M2: f64 = 3.0 / 2.0;

/// Relative tolerance for [`EntropyFluxPair::flux`].
pub const ENTROPY_FLUX_TOL: f64 = 1e-9;

/// `β_ξ(r) = ξ β(r/ξ)` with the even convex C² base profile
/// `β'(s) = s(3 − s²)/2` on `|s| <= 1` and `β'(s) = sign(s)` outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyFamily {
    xi: f64,
}

impl EntropyFamily {
    pub fn new(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::argument("xi", format!("must be positive, got {xi}")));
        }
        Ok(EntropyFamily { xi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn beta(&self, r: f64) -> f64 {
        let s = r / self.xi;
        let a = s.abs();
        if a >= 1.0 {
            return r.abs() - M1 * self.xi;
        }
        // |s| − β(s), kept inside [0, M1] so both sandwich bounds survive rounding
        let gap = (a - 0.75 * a * a + 0.125 * a * a * a * a).clamp(0.0, M1);
        (r.abs() - self.xi * gap).max(0.0)
    }

    /// True when `a` and `b` lie on the same side outside `[−ξ, ξ]`, where
    /// `β_ξ` is affine.
    pub fn same_linear_piece(&self, a: f64, b: f64) -> bool {
        (a >= self.xi && b >= self.xi) || (a <= -self.xi && b <= -self.xi)
    }

    pub fn beta_prime(&self, r: f64) -> f64 {
        let s = r / self.xi;
        if s >= 1.0 {
            1.0
        } else if s <= -1.0 {
            -1.0
        } else {
            0.5 * s * (3.0 - s * s)
        }
    }

    /// Bregman gap `β(r) − β(w) − β'(w)(r − w)`, evaluated without
    /// cancellation: `β''` lives on `[−ξ, ξ]`, where `β` is the quartic
    /// `ξ(3s²/4 − s⁴/8)`, so the gap is the polynomial gap between the
    /// clipped ends plus the affine tail beyond the band.
    pub fn bregman(&self, w: f64, r: f64) -> f64 {
        let xi = self.xi;
        let a = w.clamp(-xi, xi);
        let c = r.clamp(-xi, xi);
        let s = a / xi;
        let e = (c - a) / xi;
        let inner = (c - a) * e * (0.75 * (1.0 - s * s) - 0.5 * s * e - 0.125 * e * e);
        let tail = (r - c) * (self.beta_prime(c) - self.beta_prime(a));
        inner.max(0.0) + tail.max(0.0)
    }

    pub fn beta_second(&self, r: f64) -> f64 {
        let s = r / self.xi;
        if s.abs() >= 1.0 {
            0.0
        } else {
            1.5 * (1.0 - s * s) / self.xi
        }
    }
}

/// Entropy flux pair for `β_ξ(· − k)`: `ζ(a) = ∫_k^a β_ξ'(σ − k) F'(σ) dσ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyFluxPair {
    pub flux: FluxModel,
    pub family: EntropyFamily,
}

impl EntropyFluxPair {
    pub fn new(flux: FluxModel, family: EntropyFamily) -> Self {
        EntropyFluxPair { flux, family }
    }

    /// `F^β(a, b) = ∫_b^a β_ξ'(σ − b) F'(σ) dσ`.
    ///
    /// Closed form for constant `F'`, otherwise adaptive Gauss–Legendre
    /// split at the kinks `b ± ξ` of `β_ξ''`.
    pub fn flux(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if let FluxModel::Linear { speed } = self.flux {
            return Ok(speed * self.family.beta(a - b));
        }
        let xi = self.family.xi;
        let f = |s: f64| self.family.beta_prime(s - b) * self.flux.derivative(s);
        quadrature::integrate(&f, b, a, &[b - xi, b + xi], ENTROPY_FLUX_TOL)
    }
}

/// `sign(a − b)(F(a) − F(b))`.
pub fn kruzkov_flux(flux: &FluxModel, a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        0.0
    } else {
        d.signum() * (flux.eval(a) - flux.eval(b))
    }
}

/// Nonlocal jump correction
/// `∫_{|z|>=κ} [β(u−k+η) − β(u−k) − η β'(u−k)] ν(dz)` with `η = η(x,u;z)`
/// and `κ` the measure's cut. Non-negative by convexity.
pub fn ito_correction(
    family: &EntropyFamily,
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    x: f64,
    u: f64,
    k: f64,
) -> Result<f64> {
    if coeff.is_zero() {
        return Ok(0.0);
    }
    let w = u - k;
    let integrand = |z: f64| family.bregman(w, w + coeff.eval(x, u, z));
    let splits = kink_marks(family, coeff, x, u, k);
    Ok(measure
        .integrate_marks_split(measure.cut, &integrand, &splits)?
        .max(0.0))
}

/// Mark magnitudes at which `u − k + η(x, u; z)` crosses `±ξ`; the coefficient
/// is `amplitude · (|z| ∧ 1)`, so these are `(±ξ − (u − k)) / amplitude`.
fn kink_marks(family: &EntropyFamily, coeff: &JumpCoefficient, x: f64, u: f64, k: f64) -> [f64; 2] {
    let amp = coeff.amplitude(x, u);
    let w = u - k;
    if amp == 0.0 {
        return [f64::NAN; 2];
    }
    [(family.xi() - w) / amp, (-family.xi() - w) / amp]
}

/// `∫_{|z|>=κ} [β(u−k+η) − β(u−k)] ν(dz)`, the compensator of the jump
/// part of `β(u − k)`.
fn compensated_increment(
    family: &EntropyFamily,
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    x: f64,
    u: f64,
    k: f64,
) -> Result<f64> {
    if coeff.is_zero() {
        return Ok(0.0);
    }
    let w = u - k;
    let d0 = family.beta_prime(w);
    let splits = kink_marks(family, coeff, x, u, k);
    measure.integrate_marks_split(
        measure.cut,
        &|z| {
            let eta = coeff.eval(x, u, z);
            eta * d0 + family.bregman(w, w + eta)
        },
        &splits,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDistance {
    pub value: f64,
    /// Grid state attaining the supremum; a value on the range edge means
    /// the supremum over all states may be larger.
    pub argmax_u: f64,
}

/// `sup_u ∫ (η(u;z) − σ(u;z))² / (1 + u²) ν(dz)` over `n_u` equispaced
/// states of `u_range`.
///
/// Both coefficients are separable in `(u, z)` with the same mark factor
/// `|z| ∧ 1`, so the mark integral is `∫ (1 ∧ z²) ν(dz)` over the full
/// measure (exact for both atomic and power-law measures).
pub fn noise_distance(
    eta: &JumpCoefficient,
    sigma: &JumpCoefficient,
    measure: &LevyMeasure,
    u_range: (f64, f64),
    n_u: usize,
) -> Result<NoiseDistance> {
    if eta.is_x_dependent() || sigma.is_x_dependent() {
        return Err(Error::Contract(
            "noise distance is defined for x-independent coefficients only".into(),
        ));
    }
    let (lo, hi) = u_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::argument(
            "u_range",
            format!("need lo < hi, got [{lo}, {hi}]"),
        ));
    }
    if n_u < 2 {
        return Err(Error::argument("n_u", "need at least two grid states"));
    }
    let moment = measure.small_jump_check()?.total;
    let mut best = NoiseDistance {
        value: f64::NEG_INFINITY,
        argmax_u: lo,
    };
    let h = (hi - lo) / (n_u - 1) as f64;
    for j in 0..n_u {
        let u = if j == n_u - 1 { hi } else { lo + j as f64 * h };
        let diff = eta.amplitude(0.0, u) - sigma.amplitude(0.0, u);
        let v = diff * diff / (1.0 + u * u) * moment;
        if v > best.value {
            best = NoiseDistance {
                value: v,
                argmax_u: u,
            };
        }
    }
    Ok(best)
}

/// Non-negative space-time test function
/// `ψ(t, x) = amplitude · B((t − t_c)/t_w) · B((x − x_c)/x_w)` with the C²
/// bump `B(s) = (1 − s²)³` on `|s| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub amplitude: f64,
    pub t_center: f64,
    pub t_halfwidth: f64,
    pub x_center: f64,
    pub x_halfwidth: f64,
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        q * q * q
    }
}

fn bump_prime(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        -6.0 * s * q * q
    }
}

impl TestFunction {
    pub fn zero() -> Self {
        TestFunction {
            amplitude: 0.0,
            t_center: 0.0,
            t_halfwidth: 1.0,
            x_center: 0.0,
            x_halfwidth: 1.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.amplitude
            * bump((t - self.t_center) / self.t_halfwidth)
            * bump((x - self.x_center) / self.x_halfwidth)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        self.amplitude
            * bump((t - self.t_center) / self.t_halfwidth)
            * bump_prime((x - self.x_center) / self.x_halfwidth)
            / self.x_halfwidth
    }

    fn check_support(&self, grid: &Grid1D, final_time: f64) -> Result<()> {
        if !(self.amplitude >= 0.0) {
            return Err(Error::Contract("test function must be non-negative".into()));
        }
        if !(self.t_halfwidth > 0.0 && self.x_halfwidth > 0.0) {
            return Err(Error::Contract(
                "test function widths must be positive".into(),
            ));
        }
        let dx = grid.dx();
        if self.x_center - self.x_halfwidth < grid.x_min() + dx
            || self.x_center + self.x_halfwidth > grid.x_max() - dx
        {
            return Err(Error::Contract(format!(
                "test function support [{}, {}] touches the boundary of [{}, {}]",
                self.x_center - self.x_halfwidth,
                self.x_center + self.x_halfwidth,
                grid.x_min(),
                grid.x_max()
            )));
        }
        if self.t_center + self.t_halfwidth > final_time * (1.0 + 1e-12) {
            return Err(Error::Contract(format!(
                "test function support ends at t = {} beyond the stored horizon {final_time}",
                self.t_center + self.t_halfwidth
            )));
        }
        Ok(())
    }
}

/// Discrete left-hand side of the stochastic entropy inequality for one
/// path and one constant `k`:
///
/// ```text
/// ∫ψ(0)β(u₀−k) + ∫∫ ∂_tψ β(u−k) + ζ(u)∂_xψ
///   + Σ_j ∫ [β(u(t_j−)+η−k) − β(u(t_j−)−k)] ψ(t_j)            (jumps)
///   − ∫∫∫ [β(u+η−k) − β(u−k)] ψ ν(dz)                         (compensator)
///   + ∫∫∫ [β(u+η−k) − β(u−k) − η β'(u−k)] ψ ν(dz)              (correction)
/// ```
///
/// evaluated on the dense step history of `traj`. Time integrals use the
/// left state of each step; `∂_tψ` enters as differences of `ψ` between
/// records so that the pre/post-jump pair at each event carries exactly the
/// jump term.
pub fn path_entropy_residual(
    traj: &Trajectory,
    pair: &EntropyFluxPair,
    psi: &TestFunction,
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    path: &JumpPath,
    k: f64,
) -> Result<f64> {
    if psi.is_zero() {
        return Ok(0.0);
    }
    let steps = &traj.steps;
    if steps.len() < 2 {
        return Err(Error::Contract(
            "entropy residual needs a dense step history (RecordMode::EveryStep)".into(),
        ));
    }
    let final_time = steps.last().map(|r| r.time).unwrap_or(0.0);
    psi.check_support(&traj.grid, final_time)?;

    let grid = traj.grid;
    let dx = grid.dx();
    let xs: Vec<f64> = grid.centers().collect();
    let beta = &pair.family;
    let events = path.events();
    let mut next_event = 0;

    let mut total: f64 = steps[0]
        .field
        .values()
        .iter()
        .zip(&xs)
        .map(|(&u, &x)| psi.eval(steps[0].time, x) * beta.beta(u - k))
        .sum::<f64>()
        * dx;

    for w in steps.windows(2) {
        let (a, b): (&Record, &Record) = (&w[0], &w[1]);
        if b.kind == RecordKind::PostJump {
            let event = events.get(next_event).ok_or_else(|| {
                Error::Contract("trajectory has more jumps than the supplied path".into())
            })?;
            if event.time != b.time {
                return Err(Error::Contract(format!(
                    "jump record at t = {} does not match path event at t = {}",
                    b.time, event.time
                )));
            }
            next_event += 1;
            let mut jump = 0.0;
            for ((&u, &x), _) in a.field.values().iter().zip(&xs).zip(b.field.values()) {
                let p = psi.eval(a.time, x);
                if p != 0.0 {
                    let eta = coeff.eval(x, u, event.mark);
                    jump += p * (beta.beta(u + eta - k) - beta.beta(u - k));
                }
            }
            total += jump * dx;
            continue;
        }

        let dt = b.time - a.time;
        let mut acc = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let (ua, ub) = (a.field.values()[i], b.field.values()[i]);
            let (pa, pb) = (psi.eval(a.time, x), psi.eval(b.time, x));
            acc += (pb - pa) * beta.beta(ub - k);
            if dt > 0.0 {
                let dpsi = psi.dx(a.time, x);
                if dpsi != 0.0 {
                    acc += dt * pair.flux(ua, k)? * dpsi;
                }
                if pa != 0.0 && !coeff.is_zero() {
                    let comp = compensated_increment(beta, coeff, measure, x, ua, k)?;
                    let corr = ito_correction(beta, coeff, measure, x, ua, k)?;
                    acc += dt * pa * (corr - comp);
                }
            }
        }
        total += acc * dx;
    }
    Ok(total)
}

/// Ensemble mean of [`path_entropy_residual`] for each constant in `ks`.
pub fn entropy_residual(
    trajectories: &[Trajectory],
    pair: &EntropyFluxPair,
    psi: &TestFunction,
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    paths: &[JumpPath],
    ks: &[f64],
) -> Result<Vec<EnsembleStat>> {
    if trajectories.len() != paths.len() {
        return Err(Error::Contract(format!(
            "{} trajectories but {} paths",
            trajectories.len(),
            paths.len()
        )));
    }
    ks.iter()
        .map(|&k| {
            let samples = trajectories
                .iter()
                .zip(paths)
                .map(|(traj, path)| path_entropy_residual(traj, pair, psi, coeff, measure, path, k))
                .collect::<Result<Vec<f64>>>()?;
            ensemble_mean(&samples)
        })
        .collect()
}

/// `ε ∫∫ β''(u) |u_x|²` with forward differences in space and the left
/// state of each time interval.
pub fn dissipation_functional(traj: &Trajectory, family: &EntropyFamily, epsilon: f64) -> f64 {
    let records = if traj.steps.len() >= 2 {
        &traj.steps
    } else {
        &traj.snapshots
    };
    let dx = traj.grid.dx();
    let mut total = 0.0;
    for w in records.windows(2) {
        let dt = w[1].time - w[0].time;
        if dt <= 0.0 {
            continue;
        }
        let v = w[0].field.values();
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            let grad = (v[(i + 1) % n] - v[i]) / dx;
            acc += family.beta_second(v[i]) * grad * grad;
        }
        total += dt * acc * dx;
    }
    epsilon * total
}
