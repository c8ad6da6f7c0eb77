//! Composite Gauss–Legendre quadrature with panel doubling.
//!
//! Every integral starts from one 16-node panel per piece and doubles the
//! panel count until two successive estimates agree to the requested
//! relative tolerance, for at most [`MAX_LEVEL`] doublings (65 536 nodes per
//! piece).

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub(crate) const NODES_PER_PANEL: usize = 16;
pub(crate) const MAX_LEVEL: u32 = 12;

/// Absolute floor below which relative changes are not meaningful.
const ABS_FLOOR: f64 = 1e-300;

fn legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES_PER_PANEL))
}

/// Nodes and weights on [-1, 1] via Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = legendre_rule();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut acc = 0.0;
        for &(x, w) in rule {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// Integrates `f` over `[a, b]`, splitting at the interior `breaks`, until
/// the relative change between successive refinements is at most `rel_tol`.
pub(crate) fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&c| c > lo && c < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut total = 0.0;
    for w in edges.windows(2) {
        total += integrate_piece(f, w[0], w[1], rel_tol)?;
    }
    Ok(sign * total)
}

fn integrate_piece(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut panels = 1;
    let mut prev = composite(f, a, b, panels);
    for _ in 0..MAX_LEVEL {
        panels *= 2;
        let next = composite(f, a, b, panels);
        if !next.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite quadrature estimate on [{a}, {b}]"
            )));
        }
        let scale = next.abs().max(ABS_FLOOR);
        if (next - prev).abs() <= rel_tol * scale || (next - prev).abs() <= ABS_FLOOR {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "quadrature on [{a}, {b}] did not reach relative tolerance {rel_tol:e} \
         after {MAX_LEVEL} refinements"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        let rule = gauss_legendre(16);
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let mut xs: Vec<f64> = rule.iter().map(|&(x, _)| x).collect();
        xs.sort_by(f64::total_cmp);
        for i in 0..8 {
            assert!((xs[i] + xs[15 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let v = integrate(&|x| x.powi(31) + x.powi(2), -1.0, 2.0, &[], 1e-14).unwrap();
        let exact = (2f64.powi(32) - 1.0) / 32.0 + 3.0;
        assert!((v - exact).abs() / exact < 1e-13);
    }

    #[test]
    fn kinks_are_handled_by_breaks() {
        let v = integrate(&|x: f64| x.abs(), -1.0, 3.0, &[0.0], 1e-12).unwrap();
        assert!((v - 5.0).abs() < 1e-13);
        let rev = integrate(&|x: f64| x.abs(), 3.0, -1.0, &[0.0], 1e-12).unwrap();
        assert!((rev + 5.0).abs() < 1e-13);
    }

    #[test]
    fn non_convergence_is_reported() {
        // 1/x on (0, 1] diverges; successive estimates keep growing.
        let err = integrate(&|x| 1.0 / x, 0.0, 1.0, &[], 1e-12).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }
}
