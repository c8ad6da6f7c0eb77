//! Discrete norms, moduli of continuity, ensemble statistics and rate
//! fitting.

use crate::error::{Error, Result};
use crate::solvers::{Field, Grid1D};

/// `φ(x) = 1` for `|x| <= R`, `e^{−C(|x|−R)}` outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPhi {
    pub radius: f64,
    pub decay: f64,
}

impl WeightPhi {
    pub fn new(radius: f64, decay: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::validation(
                "weight.radius",
                format!("must be positive, got {radius}"),
            ));
        }
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::validation(
                "weight.decay",
                format!("must be positive, got {decay}"),
            ));
        }
        Ok(WeightPhi { radius, decay })
    }

    pub fn eval(&self, x: f64) -> f64 {
        weight_phi_eval(self, x)
    }

    pub fn sup_norm(&self) -> f64 {
        1.0
    }

    /// `∫_ℝ φ = 2R + 2/C`.
    pub fn l1_norm(&self) -> f64 {
        2.0 * self.radius + 2.0 / self.decay
    }
}

pub fn weight_phi_eval(w: &WeightPhi, x: f64) -> f64 {
    let excess = x.abs() - w.radius;
    if excess <= 0.0 {
        1.0
    } else {
        (-w.decay * excess).exp()
    }
}

/// Monte Carlo estimate of an expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStat {
    pub mean: f64,
    /// Sample standard deviation over `√n`; NaN for a single sample.
    pub std_error: f64,
    pub n_samples: usize,
}

/// Mean and standard error, summed in index order.
pub fn ensemble_mean(samples: &[f64]) -> Result<EnsembleStat> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::argument("samples", "empty sample"));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std_error = if n < 2 {
        f64::NAN
    } else {
        let ss: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum();
        (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
    };
    Ok(EnsembleStat {
        mean,
        std_error,
        n_samples: n,
    })
}

/// `Σ_i |u_{i+1} − u_i|` with periodic wrap.
pub fn bv_seminorm(f: &Field) -> f64 {
    let v = f.values();
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - v[i]).abs()).sum()
}

/// `(Σ_i |u_i|^p dx)^{1/p}`.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::argument("p", format!("must be at least 1, got {p}")));
    }
    let dx = f.grid().dx();
    if p == 1.0 {
        return Ok(f.values().iter().map(|u| u.abs()).sum::<f64>() * dx);
    }
    if p.is_infinite() {
        return Ok(f.values().iter().fold(0.0, |m: f64, u| m.max(u.abs())));
    }
    let s: f64 = f.values().iter().map(|u| u.abs().powf(p)).sum::<f64>() * dx;
    Ok(s.powf(1.0 / p))
}

/// `Σ_i |f_i − g_i| φ(x_i) dx`, with `φ ≡ 1` when no weight is given.
pub fn weighted_l1_distance(f: &Field, g: &Field, w: Option<&WeightPhi>) -> Result<f64> {
    f.check_same_grid(g)?;
    let grid = f.grid();
    let dx = grid.dx();
    let total: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .zip(grid.centers())
        .map(|((a, b), x)| (a - b).abs() * w.map_or(1.0, |w| w.eval(x)))
        .sum();
    Ok(total * dx)
}

/// Supremum over grid shifts of an ensemble-mean L¹ increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Shift in cells attaining the supremum.
    pub shift: isize,
}

fn largest_shift(grid: &Grid1D, delta: f64) -> Result<usize> {
    let dx = grid.dx();
    // tolerate δ given as an exact multiple of dx up to rounding
    let m = (delta / dx * (1.0 + 1e-12)).floor();
    if !(m >= 1.0) {
        return Err(Error::Contract(format!(
            "delta = {delta} is below the cell width {dx}; no resolvable shift"
        )));
    }
    Ok(m as usize)
}

fn shifted_increment(v: &[f64], m: isize, cells: &[usize], dx: f64) -> f64 {
    let n = v.len() as isize;
    cells
        .iter()
        .map(|&i| (v[(i as isize + m).rem_euclid(n) as usize] - v[i]).abs())
        .sum::<f64>()
        * dx
}

/// `sup_{|m| dx <= δ} E Σ_{|x_i| <= R} |u_{i+m} − u_i| dx` over the ensemble.
pub fn modulus_of_continuity(fields: &[Field], delta: f64, radius: f64) -> Result<ModulusEstimate> {
    let first = fields
        .first()
        .ok_or_else(|| Error::argument("fields", "empty ensemble"))?;
    for f in &fields[1..] {
        first.check_same_grid(f)?;
    }
    let grid = *first.grid();
    let max_shift = largest_shift(&grid, delta)?;
    let reach = radius + max_shift as f64 * grid.dx();
    if !(radius > 0.0) || -reach < grid.x_min() || reach > grid.x_max() {
        return Err(Error::Contract(format!(
            "K_R with R = {radius} enlarged by {} does not fit in [{}, {}]",
            max_shift as f64 * grid.dx(),
            grid.x_min(),
            grid.x_max()
        )));
    }
    let cells: Vec<usize> = (0..grid.n_cells())
        .filter(|&i| grid.center(i).abs() <= radius)
        .collect();
    let mut best = ModulusEstimate {
        value: 0.0,
        std_error: 0.0,
        shift: 0,
    };
    for s in 1..=max_shift as isize {
        for m in [s, -s] {
            let samples: Vec<f64> = fields
                .iter()
                .map(|f| shifted_increment(f.values(), m, &cells, grid.dx()))
                .collect();
            let stat = ensemble_mean(&samples)?;
            if stat.mean > best.value || best.shift == 0 {
                best = ModulusEstimate {
                    value: stat.mean,
                    std_error: stat.std_error,
                    shift: m,
                };
            }
        }
    }
    Ok(best)
}

/// Discrete mollifier `J_δ(m dx) ∝ (1 − (m dx/δ)²)³` on `|m| dx <= δ`,
/// normalized to `Σ_m J_δ(m dx) dx = 1`. Index `k` holds shift `k − M`.
pub fn mollifier_weights(grid: &Grid1D, delta: f64) -> Result<Vec<f64>> {
    let half = largest_shift(grid, delta)? as isize;
    let dx = grid.dx();
    let raw: Vec<f64> = (-half..=half)
        .map(|m| {
            let s = m as f64 * dx / delta;
            let q = (1.0 - s * s).max(0.0);
            q * q * q
        })
        .collect();
    let mass: f64 = raw.iter().sum::<f64>() * dx;
    Ok(raw.into_iter().map(|j| j / mass).collect())
}

/// `Σ_i Σ_m |h_{i+m} − h_{i−m}| J_δ(m dx) φ_i dx²` with periodic indexing;
/// `weight` holds `φ` at the cell centers.
pub fn mollified_increment(f: &Field, delta: f64, weight: &[f64]) -> Result<f64> {
    let grid = f.grid();
    if weight.len() != grid.n_cells() {
        return Err(Error::Contract(format!(
            "weight has {} entries for {} cells",
            weight.len(),
            grid.n_cells()
        )));
    }
    let j = mollifier_weights(grid, delta)?;
    let half = (j.len() / 2) as isize;
    let v = f.values();
    let n = v.len() as isize;
    let dx = grid.dx();
    let mut total = 0.0;
    for (i, &phi) in weight.iter().enumerate() {
        let i = i as isize;
        let mut acc = 0.0;
        for (k, &jm) in j.iter().enumerate() {
            let m = k as isize - half;
            let a = v[(i + m).rem_euclid(n) as usize];
            let b = v[(i - m).rem_euclid(n) as usize];
            acc += (a - b).abs() * jm;
        }
        total += acc * phi;
    }
    Ok(total * dx * dx)
}

/// `sup_δ δ^{−μ} sup_{1 <= m <= δ/dx} Σ_i |h_{i+m} − h_i| dx` over the
/// dyadic ladder `dx, 2dx, 4dx, …` capped by `δ_max`, which is always the
/// last rung.
pub fn besov_seminorm(f: &Field, mu: f64, delta_max: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::argument(
            "mu",
            format!("must lie in (0, 1), got {mu}"),
        ));
    }
    let grid = f.grid();
    let dx = grid.dx();
    largest_shift(grid, delta_max)?;
    let mut ladder = Vec::new();
    let mut d = dx;
    while d < delta_max * (1.0 - 1e-12) {
        ladder.push(d);
        d *= 2.0;
    }
    ladder.push(delta_max);

    let all: Vec<usize> = (0..grid.n_cells()).collect();
    let v = f.values();
    let mut increments = Vec::new();
    let mut best: f64 = 0.0;
    for delta in ladder {
        let m_max = largest_shift(grid, delta)?;
        while increments.len() < m_max {
            let m = increments.len() as isize + 1;
            increments.push(shifted_increment(v, m, &all, dx));
        }
        let inner = increments[..m_max].iter().fold(0.0f64, |a, &b| a.max(b));
        best = best.max(inner / delta.powf(mu));
    }
    Ok(best)
}

/// Least-squares line through `(log h, log e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 2 {
        return Err(Error::argument("points", "need at least two points"));
    }
    for &(h, e) in points {
        if !(h > 0.0 && h.is_finite()) || !(e > 0.0 && e.is_finite()) {
            return Err(Error::argument(
                "points",
                format!("abscissa and value must be positive, got ({h}, {e})"),
            ));
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::argument("points", "abscissae must not all coincide"));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        slope,
        intercept,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> Grid1D {
        Grid1D::new(-4.0, 4.0, n).unwrap()
    }

    fn random_field(g: Grid1D, rng: &mut ChaCha8Rng) -> Field {
        let v = (0..g.n_cells())
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        Field::new(g, v).unwrap()
    }

    #[test]
    fn bv_examples() {
        let g = grid(32);
        assert_eq!(bv_seminorm(&Field::from_fn(g, |_| 3.0)), 0.0);
        let mut v = vec![0.0; 32];
        v[7] = 1.25;
        assert_eq!(bv_seminorm(&Field::new(g, v).unwrap()), 2.5);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(g, &mut rng);
        let v = f.values();
        let mut oracle = (v[0] - v[31]).abs();
        for i in 1..32 {
            oracle += (v[i] - v[i - 1]).abs();
        }
        assert!((bv_seminorm(&f) - oracle).abs() < 1e-13);
    }

    #[test]
    fn lp_examples() {
        let g = grid(40);
        let c = Field::from_fn(g, |_| 2.0);
        for p in [1.0, 2.0, 3.5] {
            let exact = 2.0 * 8f64.powf(1.0 / p);
            assert!((lp_norm(&c, p).unwrap() - exact).abs() < 1e-12);
        }
        assert_eq!(lp_norm(&Field::zeros(g), 2.0).unwrap(), 0.0);
        assert!(matches!(lp_norm(&c, 0.5), Err(Error::Argument { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_field(g, &mut rng);
        let mut s = 0.0;
        for &u in f.values() {
            s += u.abs().powi(3) * g.dx();
        }
        assert!((lp_norm(&f, 3.0).unwrap() - s.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn weight_examples() {
        let w = WeightPhi::new(2.0, 1.0).unwrap();
        assert_eq!(weight_phi_eval(&w, 0.0), 1.0);
        assert_eq!(weight_phi_eval(&w, 2.0), 1.0);
        assert_eq!(weight_phi_eval(&w, -2.0), 1.0);
        assert!((weight_phi_eval(&w, 3.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert!(WeightPhi::new(0.0, 1.0).is_err());
    }

    #[test]
    fn weighted_distance_examples() {
        let g = Grid1D::new(-20.0, 20.0, 4000).unwrap();
        let f = Field::from_fn(g, |x| x.sin());
        assert_eq!(weighted_l1_distance(&f, &f, None).unwrap(), 0.0);

        let w = WeightPhi::new(1.5, 2.0).unwrap();
        let one = Field::from_fn(g, |_| 1.0);
        let zero = Field::zeros(g);
        let v = weighted_l1_distance(&one, &zero, Some(&w)).unwrap();
        assert!(
            (2.0 * 1.5 - 1e-12..=2.0 * 1.5 + 2.0 / 2.0 + 1e-12).contains(&v),
            "{v}"
        );

        let other = Grid1D::new(-20.0, 20.0, 10).unwrap();
        assert!(matches!(
            weighted_l1_distance(&f, &Field::zeros(other), None),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn modulus_examples() {
        let g = Grid1D::new(-4.0, 4.0, 800).unwrap();
        let c = vec![Field::from_fn(g, |_| 1.0); 3];
        assert_eq!(modulus_of_continuity(&c, 0.1, 1.0).unwrap().value, 0.0);

        let a = 0.7;
        let step = vec![Field::from_fn(g, |x| if x < 0.0 { a } else { 0.0 })];
        for delta in [0.01, 0.035, 0.1, 0.5] {
            let est = modulus_of_continuity(&step, delta, 2.0).unwrap();
            let shifts = (delta / g.dx() * (1.0 + 1e-12)).floor();
            let exact = a * shifts * g.dx();
            assert!(
                (est.value - exact).abs() < 1e-12,
                "{delta}: {} vs {exact}",
                est.value
            );
        }
        assert!(matches!(
            modulus_of_continuity(&step, 0.001, 1.0),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            modulus_of_continuity(&step, 0.5, 3.8),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn mollifier_mass_and_step_increment() {
        let g = Grid1D::new(-4.0, 4.0, 800).unwrap();
        for delta in [0.01, 0.05, 0.3] {
            let j = mollifier_weights(&g, delta).unwrap();
            let mass: f64 = j.iter().sum::<f64>() * g.dx();
            assert!((mass - 1.0).abs() < 1e-12);
        }
        let ones = vec![1.0; 800];
        assert_eq!(
            mollified_increment(&Field::from_fn(g, |_| 2.0), 0.1, &ones).unwrap(),
            0.0
        );

        // periodic step of height a (jumps at 0 and at the wrap): each shift
        // m contributes 2·a·2|m|dx of increment
        let a = 1.5;
        let delta = 0.1;
        let step = Field::from_fn(g, |x| if x < 0.0 { a } else { 0.0 });
        let j = mollifier_weights(&g, delta).unwrap();
        let half = (j.len() / 2) as isize;
        let mut expect_abs_z = 0.0;
        for (k, &jm) in j.iter().enumerate() {
            let z = (k as isize - half) as f64 * g.dx();
            expect_abs_z += 2.0 * z.abs() * jm * g.dx();
        }
        let got = mollified_increment(&step, delta, &ones).unwrap();
        assert!(
            (got - 2.0 * a * expect_abs_z).abs() < 1e-12 * got.max(1.0),
            "{got}"
        );
    }

    #[test]
    fn besov_examples() {
        let g = Grid1D::new(-4.0, 4.0, 1024).unwrap();
        assert_eq!(
            besov_seminorm(&Field::from_fn(g, |_| 1.0), 0.5, 0.25).unwrap(),
            0.0
        );
        let ind = Field::from_fn(g, |x| if x.abs() < 1.0 { 1.0 } else { 0.0 });
        let mu = 0.75;
        let delta_max = 32.0 * g.dx();
        let v = besov_seminorm(&ind, mu, delta_max).unwrap();
        let exact = 2.0 * delta_max.powf(1.0 - mu);
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
        let scaled = Field::from_fn(g, |x| if x.abs() < 1.0 { -3.0 } else { 0.0 });
        assert!((besov_seminorm(&scaled, mu, delta_max).unwrap() - 3.0 * v).abs() < 1e-12);
        assert!(besov_seminorm(&ind, 1.0, delta_max).is_err());
    }

    #[test]
    fn ensemble_examples() {
        let s = ensemble_mean(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std_error, s.n_samples), (1.0, 0.0, 4));
        let s = ensemble_mean(&[0.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.std_error), (1.0, 1.0));
        assert!(ensemble_mean(&[]).is_err());
        assert!(ensemble_mean(&[3.0]).unwrap().std_error.is_nan());

        use rand_distr::{Distribution, Normal};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(2.5, 1.3).unwrap();
        let xs: Vec<f64> = (0..20_000).map(|_| normal.sample(&mut rng)).collect();
        let s = ensemble_mean(&xs).unwrap();
        assert!((s.mean - 2.5).abs() < 4.0 * s.std_error);
        assert!((s.std_error - 1.3 / (20_000f64).sqrt()).abs() < 0.05 * s.std_error);
    }

    #[test]
    fn fit_rate_examples() {
        let f = fit_rate(&[(1.0, 1.0), (0.5, 0.5), (0.25, 0.25)]).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14 && f.max_residual < 1e-14);
        let f = fit_rate(&[(1.0, 1.0), (0.25, 0.5)]).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-14);
        assert!(fit_rate(&[(1.0, 0.0), (0.5, 1.0)]).is_err());
        assert!(fit_rate(&[(-1.0, 1.0), (0.5, 1.0)]).is_err());
        assert!(fit_rate(&[(0.5, 1.0), (0.5, 2.0)]).is_err());
        assert!(fit_rate(&[(0.5, 1.0)]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let h = 0.5f64.powi(k);
                let noise = rng.random::<f64>() * 2.0 - 1.0;
                (h, h.sqrt() * (1.0 + 0.01 * noise))
            })
            .collect();
        assert!((fit_rate(&pts).unwrap().slope - 0.5).abs() < 0.02);
    }

    proptest! {
        #[test]
        fn weighted_distance_triangle(seed in any::<u64>(), r in 0.1f64..3.0, c in 0.1f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid(64);
            let (a, b, d) = (random_field(g, &mut rng), random_field(g, &mut rng), random_field(g, &mut rng));
            let w = WeightPhi::new(r, c).unwrap();
            let ab = weighted_l1_distance(&a, &b, Some(&w)).unwrap();
            let bd = weighted_l1_distance(&b, &d, Some(&w)).unwrap();
            let ad = weighted_l1_distance(&a, &d, Some(&w)).unwrap();
            prop_assert!(ad <= ab + bd + 1e-12);
            prop_assert_eq!(ab, weighted_l1_distance(&b, &a, Some(&w)).unwrap());
        }

        #[test]
        fn modulus_is_monotone_and_bounded_by_bv(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = Grid1D::new(-4.0, 4.0, 128).unwrap();
            // supported well inside K_R
            let vals: Vec<f64> = (0..128)
                .map(|i| if g.center(i).abs() < 1.0 { rng.random::<f64>() } else { 0.0 })
                .collect();
            let f = vec![Field::new(g, vals).unwrap()];
            let bv = bv_seminorm(&f[0]);
            let mut prev = 0.0;
            for k in 1..=8 {
                let delta = k as f64 * g.dx();
                let w = modulus_of_continuity(&f, delta, 2.0).unwrap();
                prop_assert!(w.value >= prev);
                prop_assert!(w.value <= delta * bv + 1e-12);
                prev = w.value;
            }
        }

        #[test]
        fn besov_near_one_is_bounded_by_bv(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid(256);
            let f = random_field(g, &mut rng);
            let b = besov_seminorm(&f, 0.999, 64.0 * g.dx()).unwrap();
            prop_assert!(b <= bv_seminorm(&f) * (64.0 * g.dx()).powf(0.001) * (1.0 + 1e-12));
        }
    }
}
