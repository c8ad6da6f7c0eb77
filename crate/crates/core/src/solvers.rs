//! Finite-volume solver for the viscous (or inviscid) stochastic problem on
//! a uniform periodic grid.
//!
//! Each time step is Lie-split as hyperbolic → diffusion → compensator; jump
//! events are hit exactly by shortening the step that would cross them.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::levy_noise::{mark_moment, JumpCoefficient, JumpPath, LevyMeasure};

/// Uniform periodic grid on `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::argument(
                "grid",
                format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        if n_cells == 0 {
            return Err(Error::argument("n_cells", "must be positive"));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_cells,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(|i| self.center(i))
    }
}

/// Cell averages of the solution on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::Contract(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!(
                "non-finite initial value in cell {i}"
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.n_cells()],
        }
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Field {
            grid,
            values: grid.centers().map(f).collect(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `Σ u_i dx`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Contract(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    fn check_finite(&self, time: f64) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(cell) => Err(Error::BlowUp { time, cell }),
            None => Ok(()),
        }
    }
}

/// Physical flux. `Burgers { drift }` is `u²/2 + drift·u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxModel {
    Linear { speed: f64 },
    Burgers { drift: f64 },
}

impl FluxModel {
    pub fn zero() -> Self {
        FluxModel::Linear { speed: 0.0 }
    }

    pub fn burgers() -> Self {
        FluxModel::Burgers { drift: 0.0 }
    }

    /// `G(u) = F(u) + c·u`.
    pub fn with_added_drift(self, c: f64) -> Self {
        match self {
            FluxModel::Linear { speed } => FluxModel::Linear { speed: speed + c },
            FluxModel::Burgers { drift } => FluxModel::Burgers { drift: drift + c },
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            FluxModel::Linear { speed } => speed * u,
            FluxModel::Burgers { drift } => 0.5 * u * u + drift * u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            FluxModel::Linear { speed } => speed,
            FluxModel::Burgers { drift } => u + drift,
        }
    }

    /// `sup |F''|`; `None` would mean unbounded (no shipped flux is).
    pub fn second_bound(&self) -> Option<f64> {
        match self {
            FluxModel::Linear { .. } => Some(0.0),
            FluxModel::Burgers { .. } => Some(1.0),
        }
    }

    /// `sup |F'|` over the state range `[lo, hi]`.
    pub fn lipschitz_bound(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            FluxModel::Linear { speed } => speed.abs(),
            FluxModel::Burgers { .. } => self.derivative(lo).abs().max(self.derivative(hi).abs()),
        }
    }

    /// `‖F' − G'‖_∞` over all states (infinite when the difference grows).
    pub fn derivative_gap(&self, other: &FluxModel) -> f64 {
        match (*self, *other) {
            (FluxModel::Linear { speed: a }, FluxModel::Linear { speed: b }) => (a - b).abs(),
            (FluxModel::Burgers { drift: a }, FluxModel::Burgers { drift: b }) => (a - b).abs(),
            _ => f64::INFINITY,
        }
    }

    /// Minimiser of a convex flux (where `F' = 0`).
    fn sonic_point(&self) -> Option<f64> {
        match *self {
            FluxModel::Linear { .. } => None,
            FluxModel::Burgers { drift } => Some(-drift),
        }
    }

    fn godunov(&self, a: f64, b: f64) -> f64 {
        let (fa, fb) = (self.eval(a), self.eval(b));
        if a <= b {
            match self.sonic_point() {
                Some(s) => self.eval(s.clamp(a, b)),
                None => fa.min(fb),
            }
        } else {
            fa.max(fb)
        }
    }

    fn engquist_osher(&self, a: f64, b: f64) -> f64 {
        match *self {
            FluxModel::Linear { speed } => {
                if speed >= 0.0 {
                    speed * a
                } else {
                    speed * b
                }
            }
            FluxModel::Burgers { drift } => {
                let s = -drift;
                self.eval(a.max(s)) + self.eval(b.min(s)) - self.eval(s)
            }
        }
    }

    /// Local (Rusanov) form: the dissipation uses the largest wave speed of
    /// the two states.
    fn lax_friedrichs(&self, a: f64, b: f64) -> f64 {
        let alpha = self.lipschitz_bound(a.min(b), a.max(b));
        0.5 * (self.eval(a) + self.eval(b)) - 0.5 * alpha * (b - a)
    }
}

impl fmt::Display for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxModel::Linear { speed } => write!(f, "linear(speed={speed})"),
            FluxModel::Burgers { drift } => write!(f, "burgers(drift={drift})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericalFlux {
    EngquistOsher,
    Godunov,
    LaxFriedrichs,
}

impl NumericalFlux {
    pub fn name(&self) -> &'static str {
        match self {
            NumericalFlux::EngquistOsher => "engquist_osher",
            NumericalFlux::Godunov => "godunov",
            NumericalFlux::LaxFriedrichs => "lax_friedrichs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "engquist_osher" => Some(NumericalFlux::EngquistOsher),
            "godunov" => Some(NumericalFlux::Godunov),
            "lax_friedrichs" => Some(NumericalFlux::LaxFriedrichs),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordMode {
    /// Only the requested snapshot times.
    Snapshots,
    /// Every step, plus pre/post states at each jump.
    EveryStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub cfl: f64,
    pub numerical_flux: NumericalFlux,
    pub snapshot_times: Vec<f64>,
    /// Upper bound on the step, needed when the flux imposes none.
    pub max_dt: f64,
    pub record: RecordMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.0,
            cfl: 0.9,
            numerical_flux: NumericalFlux::EngquistOsher,
            snapshot_times: Vec::new(),
            max_dt: 0.01,
            record: RecordMode::Snapshots,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::argument(
                "epsilon",
                format!("must be >= 0, got {}", self.epsilon),
            ));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::argument(
                "cfl",
                format!("must lie in (0, 1], got {}", self.cfl),
            ));
        }
        if !(self.max_dt > 0.0) {
            return Err(Error::argument("max_dt", "must be positive"));
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(t >= 0.0 && t.is_finite()))
            || self.snapshot_times.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::argument(
                "snapshot_times",
                "must be finite, non-negative and strictly increasing",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Initial,
    Step,
    /// State just before a jump (left limit).
    PreJump,
    PostJump,
    Snapshot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub time: f64,
    pub kind: RecordKind,
    pub field: Field,
}

/// Output of [`solve`]: the requested snapshots and, in
/// [`RecordMode::EveryStep`], the dense step history.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub snapshots: Vec<Record>,
    pub steps: Vec<Record>,
}

impl Trajectory {
    /// Hand-built trajectory from a dense step history (used for
    /// constructed test cases such as stationary discontinuities).
    pub fn from_steps(grid: Grid1D, steps: Vec<Record>) -> Result<Self> {
        for w in steps.windows(2) {
            if w[1].time < w[0].time {
                return Err(Error::Contract("step records must be time-ordered".into()));
            }
        }
        for r in &steps {
            if r.field.grid != grid {
                return Err(Error::Contract("step record on a different grid".into()));
            }
        }
        Ok(Trajectory {
            grid,
            snapshots: Vec::new(),
            steps,
        })
    }

    pub fn snapshot_at(&self, time: f64) -> Option<&Field> {
        self.snapshots
            .iter()
            .find(|r| r.time == time)
            .map(|r| &r.field)
    }

    pub fn last_snapshot(&self) -> Option<&Field> {
        self.snapshots.last().map(|r| &r.field)
    }

    /// Writes the snapshots as CSV, one row per snapshot:
    /// `time,n_cells,x_min,x_max,u_0,...,u_{n-1}` with 17 significant digits.
    pub fn write_snapshots_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let n = self.grid.n_cells();
        write!(out, "time,n_cells,x_min,x_max")?;
        for i in 0..n {
            write!(out, ",u_{i}")?;
        }
        writeln!(out)?;
        for r in &self.snapshots {
            write!(
                out,
                "{},{},{},{}",
                fmt_f64(r.time),
                n,
                fmt_f64(self.grid.x_min()),
                fmt_f64(self.grid.x_max())
            )?;
            for v in r.field.values() {
                write!(out, ",{}", fmt_f64(*v))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Largest stable step for the explicit flux update on `field`.
pub fn cfl_limit(field: &Field, flux: &FluxModel) -> f64 {
    let speed = flux.lipschitz_bound(field.min(), field.max());
    if speed == 0.0 {
        f64::INFINITY
    } else {
        field.grid().dx() / speed
    }
}

/// Conservative monotone update `u_i ← u_i − (dt/dx)(H_{i+½} − H_{i−½})`.
pub fn hyperbolic_step(
    field: &Field,
    flux: &FluxModel,
    scheme: NumericalFlux,
    dt: f64,
) -> Result<Field> {
    let limit = cfl_limit(field, flux);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    let mut values = field.values.clone();
    hyperbolic_in_place(
        &field.values,
        &mut values,
        flux,
        scheme,
        dt / field.grid.dx(),
    );
    Ok(Field {
        grid: field.grid,
        values,
    })
}

fn hyperbolic_in_place(
    old: &[f64],
    new: &mut [f64],
    flux: &FluxModel,
    scheme: NumericalFlux,
    ratio: f64,
) {
    let n = old.len();
    if n == 1 {
        new[0] = old[0];
        return;
    }
    let numerical = |a: f64, b: f64| match scheme {
        NumericalFlux::EngquistOsher => flux.engquist_osher(a, b),
        NumericalFlux::Godunov => flux.godunov(a, b),
        NumericalFlux::LaxFriedrichs => flux.lax_friedrichs(a, b),
    };
    // interface i+½ sits between cell i and i+1 (periodic)
    let interface: Vec<f64> = (0..n)
        .map(|i| numerical(old[i], old[(i + 1) % n]))
        .collect();
    for i in 0..n {
        let left = interface[(i + n - 1) % n];
        new[i] = old[i] - ratio * (interface[i] - left);
    }
}

/// Backward-Euler heat step `(I − ε dt L) u_new = u_old`, `L` the periodic
/// second difference.
pub fn diffusion_step(field: &Field, epsilon: f64, dt: f64) -> Result<Field> {
    if !(epsilon >= 0.0) {
        return Err(Error::argument(
            "epsilon",
            format!("must be >= 0, got {epsilon}"),
        ));
    }
    if epsilon == 0.0 || dt == 0.0 {
        return Ok(field.clone());
    }
    let dx = field.grid.dx();
    let r = epsilon * dt / (dx * dx);
    let values = implicit_heat(&field.values, r)?;
    Ok(Field {
        grid: field.grid,
        values,
    })
}

/// Backward-Euler heat step, solved for the deviation from one cell value so
/// constant fields are reproduced exactly.
fn implicit_heat(values: &[f64], r: f64) -> Result<Vec<f64>> {
    let base = values[0];
    let shifted: Vec<f64> = values.iter().map(|v| v - base).collect();
    Ok(solve_periodic_heat(&shifted, r)?
        .into_iter()
        .map(|v| v + base)
        .collect())
}

/// Solves the symmetric cyclic system with diagonal `1 + 2r` and
/// off-diagonals `−r` (Sherman–Morrison around a Thomas sweep).
fn solve_periodic_heat(rhs: &[f64], r: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    match n {
        1 => return Ok(rhs.to_vec()),
        2 => {
            // both neighbours of each cell are the other cell
            let (a, b) = (1.0 + 2.0 * r, -2.0 * r);
            let det = a * a - b * b;
            return Ok(vec![
                (a * rhs[0] - b * rhs[1]) / det,
                (a * rhs[1] - b * rhs[0]) / det,
            ]);
        }
        _ => {}
    }
    let diag = 1.0 + 2.0 * r;
    let off = -r;
    // A = T + γ^{-1}·(γ e_0 + off e_{n-1})(γ e_0 + off e_{n-1})^T style split
    let gamma = -diag;
    let mut b = vec![diag; n];
    b[0] = diag - gamma;
    b[n - 1] = diag - off * off / gamma;

    let thomas = |d: &[f64]| -> Result<Vec<f64>> {
        let mut c_star = vec![0.0; n];
        let mut d_star = vec![0.0; n];
        c_star[0] = off / b[0];
        d_star[0] = d[0] / b[0];
        for i in 1..n {
            let m = b[i] - off * c_star[i - 1];
            if m == 0.0 || !m.is_finite() {
                return Err(Error::Numerical("singular tridiagonal pivot".into()));
            }
            c_star[i] = off / m;
            d_star[i] = (d[i] - off * d_star[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d_star[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d_star[i] - c_star[i] * x[i + 1];
        }
        Ok(x)
    };

    let y = thomas(rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = off;
    let q = thomas(&u)?;
    let v0 = 1.0;
    let vn = off / gamma;
    let denom = 1.0 + v0 * q[0] + vn * q[n - 1];
    if denom == 0.0 {
        return Err(Error::Numerical("singular cyclic correction".into()));
    }
    let factor = (v0 * y[0] + vn * y[n - 1]) / denom;
    Ok(y.iter().zip(&q).map(|(yi, qi)| yi - factor * qi).collect())
}

/// `u_i ← u_i + η(x_i, u_i; z)` at an event time.
pub fn jump_update(field: &Field, coeff: &JumpCoefficient, z: f64) -> Field {
    let mut out = field.clone();
    apply_jump(&mut out, coeff, z);
    out
}

fn apply_jump(field: &mut Field, coeff: &JumpCoefficient, z: f64) {
    if coeff.is_zero() {
        return;
    }
    let grid = field.grid;
    for (i, v) in field.values.iter_mut().enumerate() {
        *v += coeff.eval(grid.center(i), *v, z);
    }
}

/// `u_i ← u_i − dt ∫_{|z|>=κ} η(x_i, u_i; z) ν(dz)`.
pub fn compensator_update(
    field: &Field,
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    kappa: f64,
    dt: f64,
) -> Result<Field> {
    let mut out = field.clone();
    if coeff.is_zero() {
        return Ok(out);
    }
    let moment = mark_moment(measure, kappa)?;
    apply_compensator(&mut out, coeff, moment, dt);
    Ok(out)
}

fn apply_compensator(field: &mut Field, coeff: &JumpCoefficient, moment: f64, dt: f64) {
    if coeff.is_zero() || moment == 0.0 {
        return;
    }
    let grid = field.grid;
    for (i, v) in field.values.iter_mut().enumerate() {
        *v -= dt * moment * coeff.amplitude(grid.center(i), *v);
    }
}

/// Integrates from `u0` to the last snapshot time against the jump `path`.
///
/// The step is `min(cfl·dx/sup|F'|, max_dt)`, shortened to land exactly on
/// the next event or snapshot. A jump at `t_j` is applied after the step
/// ending at `t_j`, so a snapshot at `t_j` sees the post-jump state.
pub fn solve(
    u0: &Field,
    flux: &FluxModel,
    coeff: &JumpCoefficient,
    measure: &LevyMeasure,
    cfg: &SolverConfig,
    path: &JumpPath,
) -> Result<Trajectory> {
    cfg.validate()?;
    let horizon = cfg.snapshot_times.last().copied().unwrap_or(0.0);
    let noisy = !coeff.is_zero();
    if noisy && path.horizon() < horizon {
        return Err(Error::Contract(format!(
            "jump path horizon {} is shorter than the last snapshot {horizon}",
            path.horizon()
        )));
    }
    u0.check_finite(0.0)?;
    let moment = if noisy {
        mark_moment(measure, path.cut())?
    } else {
        0.0
    };
    let events: &[_] = if noisy { path.events() } else { &[] };
    let dense = cfg.record == RecordMode::EveryStep;

    let grid = *u0.grid();
    let dx = grid.dx();
    let mut traj = Trajectory {
        grid,
        snapshots: Vec::with_capacity(cfg.snapshot_times.len()),
        steps: Vec::new(),
    };
    let mut state = u0.clone();
    let mut scratch = state.values.clone();
    let mut t = 0.0;
    let mut next_event = 0;
    let mut next_snap = 0;

    if dense {
        traj.steps.push(Record {
            time: 0.0,
            kind: RecordKind::Initial,
            field: state.clone(),
        });
    }
    while next_snap < cfg.snapshot_times.len() && cfg.snapshot_times[next_snap] == 0.0 {
        traj.snapshots.push(Record {
            time: 0.0,
            kind: RecordKind::Snapshot,
            field: state.clone(),
        });
        next_snap += 1;
    }

    while next_snap < cfg.snapshot_times.len() {
        let snap_time = cfg.snapshot_times[next_snap];
        let event_time = events
            .get(next_event)
            .map(|e| e.time)
            .unwrap_or(f64::INFINITY);
        let target = snap_time.min(event_time);

        let mut dt = (cfg.cfl * cfl_limit(&state, flux)).min(cfg.max_dt);
        let hits_target = t + dt >= target;
        if hits_target {
            dt = target - t;
        }

        if dt > 0.0 {
            hyperbolic_in_place(
                &state.values,
                &mut scratch,
                flux,
                cfg.numerical_flux,
                dt / dx,
            );
            std::mem::swap(&mut state.values, &mut scratch);
            state.check_finite(t + dt)?;
            if cfg.epsilon > 0.0 {
                let r = cfg.epsilon * dt / (dx * dx);
                state.values = implicit_heat(&state.values, r)?;
                state.check_finite(t + dt)?;
            }
            apply_compensator(&mut state, coeff, moment, dt);
            state.check_finite(t + dt)?;
        }
        t = if hits_target { target } else { t + dt };

        let at_event = hits_target && t == event_time;
        if dense && (dt > 0.0 || at_event) {
            traj.steps.push(Record {
                time: t,
                kind: if at_event {
                    RecordKind::PreJump
                } else {
                    RecordKind::Step
                },
                field: state.clone(),
            });
        }
        if at_event {
            apply_jump(&mut state, coeff, events[next_event].mark);
            state.check_finite(t)?;
            next_event += 1;
            if dense {
                traj.steps.push(Record {
                    time: t,
                    kind: RecordKind::PostJump,
                    field: state.clone(),
                });
            }
        }
        if hits_target && t == snap_time {
            traj.snapshots.push(Record {
                time: t,
                kind: RecordKind::Snapshot,
                field: state.clone(),
            });
            next_snap += 1;
        }
    }
    Ok(traj)
}

/// Periodic discrete convolution of `u0` with the wrapped heat kernel
/// `(4πεt)^{-1/2} exp(−x²/4εt)`, normalised to unit discrete mass.
pub fn heat_kernel_solution(u0: &Field, epsilon: f64, t: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::argument("t", format!("must be positive, got {t}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::argument(
            "epsilon",
            format!("must be positive, got {epsilon}"),
        ));
    }
    let grid = *u0.grid();
    let n = grid.n_cells();
    let dx = grid.dx();
    let len = grid.length();
    let var = 2.0 * epsilon * t;
    let images = (6.0 * var.sqrt() / len).ceil() as i64 + 1;

    let mut kernel = vec![0.0; n];
    for (d, k) in kernel.iter_mut().enumerate() {
        let offset = d as f64 * dx;
        let mut acc = 0.0;
        for m in -images..=images {
            let y = offset + m as f64 * len;
            acc += (-y * y / (2.0 * var)).exp();
        }
        *k = acc;
    }
    let mass: f64 = kernel.iter().sum::<f64>() * dx;
    for k in &mut kernel {
        *k /= mass;
    }

    let src = u0.values();
    let values = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (j, v) in src.iter().enumerate() {
                acc += v * kernel[(i + n - j) % n];
            }
            acc * dx
        })
        .collect();
    Ok(Field { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_noise::{Atom, JumpEvent, SeedDerivation, StreamPurpose};
    use proptest::prelude::*;
    use rand::Rng;

    fn grid(n: usize) -> Grid1D {
        Grid1D::new(-1.0, 1.0, n).unwrap()
    }

    fn random_field(g: Grid1D, seed: u64) -> Field {
        let mut rng = SeedDerivation::new(seed).stream(0, StreamPurpose::Calibration);
        Field::new(
            g,
            (0..g.n_cells())
                .map(|_| 2.0 * rng.random::<f64>() - 1.0)
                .collect(),
        )
        .unwrap()
    }

    fn bv(f: &Field) -> f64 {
        let v = f.values();
        let n = v.len();
        (0..n).map(|i| (v[(i + 1) % n] - v[i]).abs()).sum()
    }

    fn atomic() -> LevyMeasure {
        LevyMeasure::atomic_exact(vec![Atom {
            mark: 1.0,
            weight: 2.0,
        }])
    }

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(-8.0, 8.0, 400).unwrap();
        assert_eq!(g.dx(), 0.04);
        assert!((g.center(0) + 7.98).abs() < 1e-14);
        assert!(Grid1D::new(1.0, 1.0, 4).is_err());
        assert!(Grid1D::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn constant_field_is_fixed_by_every_scheme() {
        let g = grid(32);
        let c = Field::from_fn(g, |_| 0.7);
        for scheme in [
            NumericalFlux::EngquistOsher,
            NumericalFlux::Godunov,
            NumericalFlux::LaxFriedrichs,
        ] {
            let out = hyperbolic_step(&c, &FluxModel::burgers(), scheme, 0.01).unwrap();
            assert_eq!(out, c);
        }
        assert_eq!(diffusion_step(&c, 0.3, 0.1).unwrap().values(), c.values());
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let f = Field::from_fn(grid(100), |x| x);
        let err =
            hyperbolic_step(&f, &FluxModel::burgers(), NumericalFlux::Godunov, 0.1).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
    }

    #[test]
    fn zero_viscosity_diffusion_is_identity() {
        let f = random_field(grid(17), 1);
        assert_eq!(diffusion_step(&f, 0.0, 0.5).unwrap(), f);
    }

    #[test]
    fn diffusion_damps_fourier_modes_by_the_discrete_symbol() {
        // eigenvector oracle: L sin(2πk x/L) = −μ_k sin(...), μ_k = 4/dx² sin²(πk/n)
        for n in [2usize, 3, 8, 64] {
            let g = Grid1D::new(0.0, 2.0, n).unwrap();
            let dx = g.dx();
            for k in 1..=(n / 2).max(1) {
                let f = Field::from_fn(g, |x| {
                    (2.0 * std::f64::consts::PI * k as f64 * x / 2.0).cos()
                });
                let (eps, dt) = (0.05, 0.2);
                let mu =
                    4.0 / (dx * dx) * (std::f64::consts::PI * k as f64 / n as f64).sin().powi(2);
                let factor = 1.0 / (1.0 + eps * dt * mu);
                let out = diffusion_step(&f, eps, dt).unwrap();
                for (a, b) in out.values().iter().zip(f.values()) {
                    assert!((a - factor * b).abs() < 1e-12, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn diffusion_preserves_mass_and_bounds() {
        for seed in 0..20 {
            let f = random_field(grid(53), seed);
            let out = diffusion_step(&f, 0.1, 0.3).unwrap();
            assert!((out.mass() - f.mass()).abs() < 1e-13);
            assert!(out.min() >= f.min() - 1e-14);
            assert!(out.max() <= f.max() + 1e-14);
            assert!(bv(&out) <= bv(&f) + 1e-12);
        }
    }

    #[test]
    fn jump_and_compensator_examples() {
        let g = grid(4);
        let f = Field::from_fn(g, |_| 2.0);
        let eta = JumpCoefficient::linear(0.2);
        assert_eq!(jump_update(&f, &JumpCoefficient::zero(), 1.0), f);
        let j = jump_update(&f, &eta, 1.0);
        assert!(j.values().iter().all(|&v| (v - 2.4).abs() < 1e-15));

        let one = Field::from_fn(g, |_| 1.0);
        let c = compensator_update(&one, &eta, &atomic(), 1.0, 0.1).unwrap();
        assert!(c.values().iter().all(|&v| (v - 0.96).abs() < 1e-15));
        let z = Field::zeros(g);
        assert_eq!(
            compensator_update(&z, &eta, &atomic(), 1.0, 0.1).unwrap(),
            z
        );
        assert_eq!(
            compensator_update(&one, &JumpCoefficient::zero(), &atomic(), 1.0, 0.1).unwrap(),
            one
        );
    }

    #[test]
    fn jump_gap_stays_within_lipschitz_band() {
        let g = grid(64);
        let eta = JumpCoefficient::linear(0.3);
        for seed in 0..10 {
            let a = random_field(g, seed);
            let b = random_field(g, seed + 100);
            for z in [0.2, 1.0, -3.0] {
                let (ja, jb) = (jump_update(&a, &eta, z), jump_update(&b, &eta, z));
                for i in 0..64 {
                    let pre = (a.values()[i] - b.values()[i]).abs();
                    let post = (ja.values()[i] - jb.values()[i]).abs();
                    assert!(post <= (1.0 + 0.3) * pre + 1e-14);
                    assert!(post >= (1.0 - 0.3) * pre - 1e-14);
                }
            }
        }
    }

    #[test]
    fn heat_kernel_limits() {
        let g = Grid1D::new(-8.0, 8.0, 400).unwrap();
        let u0 = Field::from_fn(g, |x| (-x * x / 0.5).exp());
        let tiny = heat_kernel_solution(&u0, 0.05, 1e-6).unwrap();
        let l1: f64 = tiny
            .values()
            .iter()
            .zip(u0.values())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * g.dx();
        assert!(l1 < 1e-6);
        let c = Field::from_fn(g, |_| 3.0);
        let out = heat_kernel_solution(&c, 0.05, 2.0).unwrap();
        assert!(out.values().iter().all(|v| (v - 3.0).abs() < 1e-12));
        assert!(heat_kernel_solution(&c, 0.05, 0.0).is_err());
    }

    #[test]
    fn heat_kernel_gaussian_closed_form() {
        let g = Grid1D::new(-8.0, 8.0, 400).unwrap();
        let (s, eps, t) = (0.5f64, 0.05, 0.5);
        let u0 = Field::from_fn(g, |x| (-x * x / (2.0 * s * s)).exp());
        let out = heat_kernel_solution(&u0, eps, t).unwrap();
        let var = s * s + 2.0 * eps * t;
        let amp = s / var.sqrt();
        for (x, v) in g.centers().zip(out.values()) {
            assert!((v - amp * (-x * x / (2.0 * var)).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn noise_free_solve_ignores_path_and_conserves_mass() {
        let g = Grid1D::new(-2.0, 2.0, 200).unwrap();
        let u0 = Field::from_fn(g, |x| if x.abs() < 0.5 { 1.0 } else { 0.0 });
        let cfg = SolverConfig {
            epsilon: 0.0,
            snapshot_times: vec![0.25, 0.5],
            ..SolverConfig::default()
        };
        let path = JumpPath::new(
            1.0,
            1.0,
            vec![JumpEvent {
                time: 0.3,
                mark: 1.0,
            }],
        )
        .unwrap();
        let a = solve(
            &u0,
            &FluxModel::burgers(),
            &JumpCoefficient::zero(),
            &atomic(),
            &cfg,
            &path,
        )
        .unwrap();
        let b = solve(
            &u0,
            &FluxModel::burgers(),
            &JumpCoefficient::zero(),
            &atomic(),
            &cfg,
            &JumpPath::empty(1.0),
        )
        .unwrap();
        assert_eq!(a, b);
        for r in &a.snapshots {
            assert!((r.field.mass() - u0.mass()).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_state_is_absorbing() {
        let g = grid(50);
        let u0 = Field::zeros(g);
        let cfg = SolverConfig {
            epsilon: 0.01,
            snapshot_times: vec![0.0, 0.5, 1.0],
            ..SolverConfig::default()
        };
        let mut rng = SeedDerivation::new(1).stream(0, StreamPurpose::JumpPath);
        let path = atomic().sample_path(1.0, 1.0, &mut rng).unwrap();
        let traj = solve(
            &u0,
            &FluxModel::burgers(),
            &JumpCoefficient::linear(0.2),
            &atomic(),
            &cfg,
            &path,
        )
        .unwrap();
        assert_eq!(traj.snapshots.len(), 3);
        for r in &traj.snapshots {
            assert!(r.field.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn jumps_are_applied_exactly_at_event_times() {
        let g = grid(8);
        let u0 = Field::from_fn(g, |_| 1.0);
        let path = JumpPath::new(
            1.0,
            1.0,
            vec![JumpEvent {
                time: 0.5,
                mark: 1.0,
            }],
        )
        .unwrap();
        let cfg = SolverConfig {
            snapshot_times: vec![0.5, 1.0],
            max_dt: 0.1,
            record: RecordMode::EveryStep,
            ..SolverConfig::default()
        };
        let eta = JumpCoefficient::linear(0.2);
        let traj = solve(&u0, &FluxModel::zero(), &eta, &atomic(), &cfg, &path).unwrap();
        let pre = traj
            .steps
            .iter()
            .find(|r| r.kind == RecordKind::PreJump)
            .unwrap();
        let post = traj
            .steps
            .iter()
            .find(|r| r.kind == RecordKind::PostJump)
            .unwrap();
        assert_eq!(pre.time, 0.5);
        assert_eq!(post.time, 0.5);
        let expected_pre = (1.0f64 - 0.1 * 0.4).powi(5);
        assert!((pre.field.values()[0] - expected_pre).abs() < 1e-14);
        assert!((post.field.values()[0] - 1.2 * expected_pre).abs() < 1e-14);
        assert_eq!(traj.snapshot_at(0.5).unwrap(), &post.field);
    }

    #[test]
    fn blow_up_reports_time_and_cell() {
        let g = grid(4);
        let mut values = vec![0.0; 4];
        values[2] = 1e308;
        let u0 = Field::new(g, values).unwrap();
        let cfg = SolverConfig {
            snapshot_times: vec![1.0],
            max_dt: 0.5,
            ..SolverConfig::default()
        };
        // huge jump amplitude overflows after the first event
        let path = JumpPath::new(
            1.0,
            1.0,
            vec![JumpEvent {
                time: 0.25,
                mark: 1.0,
            }],
        )
        .unwrap();
        let eta = JumpCoefficient::linear(0.9).with_lambda_star(0.95);
        let big = LevyMeasure::atomic_exact(vec![Atom {
            mark: 1.0,
            weight: 1e10,
        }]);
        let err = solve(&u0, &FluxModel::zero(), &eta, &big, &cfg, &path).unwrap_err();
        match err {
            Error::BlowUp { cell, .. } => assert_eq!(cell, 2),
            e => panic!("{e:?}"),
        }
    }

    proptest! {
        #[test]
        fn monotone_schemes_are_l1_contractive_and_tvd(
            a in prop::collection::vec(-2.0f64..2.0, 24),
            b in prop::collection::vec(-2.0f64..2.0, 24),
            scheme in prop::sample::select(vec![
                NumericalFlux::EngquistOsher, NumericalFlux::Godunov, NumericalFlux::LaxFriedrichs
            ]),
        ) {
            let g = grid(24);
            let fa = Field::new(g, a).unwrap();
            let fb = Field::new(g, b).unwrap();
            let flux = FluxModel::burgers();
            let dt = 0.9 * cfl_limit(&fa, &flux).min(cfl_limit(&fb, &flux));
            let sa = hyperbolic_step(&fa, &flux, scheme, dt).unwrap();
            let sb = hyperbolic_step(&fb, &flux, scheme, dt).unwrap();
            let d0: f64 = fa.values().iter().zip(fb.values()).map(|(x, y)| (x - y).abs()).sum();
            let d1: f64 = sa.values().iter().zip(sb.values()).map(|(x, y)| (x - y).abs()).sum();
            prop_assert!(d1 <= d0 + 1e-12);
            prop_assert!(bv(&sa) <= bv(&fa) + 1e-12);
            prop_assert!((sa.mass() - fa.mass()).abs() < 1e-12);
        }
    }
}
