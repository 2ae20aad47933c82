//! Limsup/liminf estimators for the six relative growth indicators: order
//! and lower order, type and lower type, weak type and its upper companion,
//! plus the inverse-reparametrized forms.

use crate::error::{Error, Result};
use crate::scales::{composed_ratio, scale_eval, scale_inverse, GrowthScale};
use crate::tower::TowerReal;

/// Tail-fit acceptance: the 1/t fit must explain the tail this well before
/// its intercept is reported instead of the raw extremum.
const FIT_RMS_FACTOR: f64 = 0.01;

/// Radius grid linearized at iterated-log depth `q_anchor`:
/// r_j = exp^[q_anchor](t0 + j h).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GridSpec {
    pub q_anchor: u32,
    pub t0: f64,
    pub h: f64,
    pub j_count: usize,
}

impl GridSpec {
    pub fn new(q_anchor: u32, t0: f64, h: f64, j_count: usize) -> Result<Self> {
        if q_anchor == 0 || !(h > 0.0) || j_count == 0 {
            return Err(Error::Domain(
                "grid needs q_anchor >= 1, h > 0, and points".into(),
            ));
        }
        Ok(GridSpec {
            q_anchor,
            t0,
            h,
            j_count,
        })
    }

    /// Default indicator grid; oscillating scales should quadruple J.
    pub fn default_for(q: u32) -> Self {
        GridSpec {
            q_anchor: q.max(1),
            t0: 2.0,
            h: 0.5,
            j_count: 64,
        }
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.j_count)
            .map(|j| self.t0 + j as f64 * self.h)
            .collect()
    }

    pub fn radii(&self) -> Vec<TowerReal> {
        self.ts()
            .iter()
            .map(|&t| TowerReal::new(t).iter_exp(self.q_anchor))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    Rho,
    Lambda,
    Sigma,
    SigmaBar,
    Tau,
    TauBar,
}

impl IndicatorKind {
    /// Whether the indicator is a limsup (tail max) or liminf (tail min).
    pub fn is_limsup(self) -> bool {
        matches!(
            self,
            IndicatorKind::Rho | IndicatorKind::Sigma | IndicatorKind::TauBar
        )
    }
}

/// Degenerate-limit diagnosis: the ratio sequence is not stabilizing at a
/// positive finite value at this (p, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    TowardZero,
    TowardInfinity,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IndicatorEstimate {
    /// Reported limit value: the 1/t-fit intercept when the tail is cleanly
    /// convergent, otherwise the tail extremum.
    pub value: f64,
    /// Raw extremum over the tail window (max for limsup kinds, min for
    /// liminf kinds), always available as the conservative reading.
    pub tail_extremum: f64,
    /// Ratio sequence over the tail window.
    pub tail_values: Vec<f64>,
    /// Least-squares slope of tail ratios against 1/t.
    pub envelope_slope: f64,
    /// max - min over the tail window.
    pub spread: f64,
    pub kind: IndicatorKind,
    /// Set when the sequence is running off to 0 or infinity instead of
    /// stabilizing; `value` then repeats the tail extremum.
    pub divergence: Option<Divergence>,
}

/// Relative (p,q)-th order and lower order: limsup/liminf of
/// log^[p] alpha^{-1}(beta(r)) / log^[q] r over the grid.
pub fn rel_order(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    grid: &GridSpec,
) -> Result<(IndicatorEstimate, IndicatorEstimate)> {
    check_grid(grid)?;
    check_pq(p, q)?;
    let ts = grid.ts();
    let mut ratios = Vec::with_capacity(grid.j_count);
    for r in grid.radii() {
        let (num, den) = composed_ratio(alpha, beta, &r, p, q)?;
        ratios.push(num / den);
    }
    Ok(estimate_pair(
        &ts,
        &ratios,
        IndicatorKind::Rho,
        IndicatorKind::Lambda,
    ))
}

/// The shared ratio sequence of the type-family estimators:
/// iter_log(alpha^{-1} beta(r), p-1) / iter_log(r, q-1)^exponent.
fn type_ratios(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    exponent: f64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let mut ratios = Vec::with_capacity(grid.j_count);
    for r in grid.radii() {
        let composed = scale_inverse(alpha, &scale_eval(beta, &r)?)?;
        let v = composed.iter_log(p as i32 - 1)?.to_float()?;
        let u = r.iter_log(q as i32 - 1)?.t_pow(exponent)?.to_float()?;
        ratios.push(v / u);
    }
    Ok(ratios)
}

/// Relative (p,q)-th type (limsup) and lower type (liminf) against the
/// rho-th power of log^[q-1] r. `rho` comes from the caller: reusing a
/// ground-truth or separately estimated order avoids compounding error.
pub fn rel_type(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    rho: f64,
    grid: &GridSpec,
) -> Result<(IndicatorEstimate, IndicatorEstimate)> {
    check_grid(grid)?;
    check_pq(p, q)?;
    check_exponent(rho)?;
    let ratios = type_ratios(alpha, beta, p, q, rho, grid)?;
    Ok(estimate_pair(
        &grid.ts(),
        &ratios,
        IndicatorKind::Sigma,
        IndicatorKind::SigmaBar,
    ))
}

/// Relative (p,q)-th weak type (liminf) and its limsup companion against
/// the lambda-th power.
pub fn rel_weak_type(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    lambda: f64,
    grid: &GridSpec,
) -> Result<(IndicatorEstimate, IndicatorEstimate)> {
    check_grid(grid)?;
    check_pq(p, q)?;
    check_exponent(lambda)?;
    let ratios = type_ratios(alpha, beta, p, q, lambda, grid)?;
    let (tau_bar, tau) = estimate_pair(
        &grid.ts(),
        &ratios,
        IndicatorKind::TauBar,
        IndicatorKind::Tau,
    );
    Ok((tau, tau_bar))
}

/// Reparametrized estimator: the same indicators read off along the value
/// axis, R = beta(r), comparing log^[p-1] alpha^{-1}(R) against
/// (log^[q-1] beta^{-1}(R))^exponent. Traversing R through beta keeps the
/// sampling aligned with the scale's own growth (an independent R grid
/// undersamples oscillating scales).
pub fn rel_type_inverse_form(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    exponent: f64,
    kind: IndicatorKind,
    grid: &GridSpec,
) -> Result<IndicatorEstimate> {
    check_grid(grid)?;
    check_pq(p, q)?;
    check_exponent(exponent)?;
    let mut ratios = Vec::with_capacity(grid.j_count);
    for r in grid.radii() {
        let big_r = scale_eval(beta, &r)?;
        let x = scale_inverse(alpha, &big_r)?;
        let y = scale_inverse(beta, &big_r)?;
        let v = x.iter_log(p as i32 - 1)?.to_float()?;
        let u = y.iter_log(q as i32 - 1)?.t_pow(exponent)?.to_float()?;
        ratios.push(v / u);
    }
    let (hi, lo) = estimate_pair(&grid.ts(), &ratios, kind, kind);
    Ok(if kind.is_limsup() { hi } else { lo })
}

fn check_grid(grid: &GridSpec) -> Result<()> {
    if grid.j_count < 16 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 16 grid points, got {}",
            grid.j_count
        )));
    }
    Ok(())
}

fn check_pq(p: u32, q: u32) -> Result<()> {
    if p == 0 || q == 0 {
        return Err(Error::Domain("p and q must be positive".into()));
    }
    Ok(())
}

fn check_exponent(e: f64) -> Result<()> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Domain(format!(
            "indicator exponent must be positive and finite, got {e}"
        )));
    }
    Ok(())
}

/// Build the limsup/liminf estimate pair from one ratio sequence. Both
/// estimates share a single least-squares fit of the tail against 1/t, so
/// limsup >= liminf holds by construction.
fn estimate_pair(
    ts: &[f64],
    ratios: &[f64],
    limsup_kind: IndicatorKind,
    liminf_kind: IndicatorKind,
) -> (IndicatorEstimate, IndicatorEstimate) {
    let j = ratios.len();
    let w = 8usize.max(j / 4).min(j);
    let tail = &ratios[j - w..];
    let tail_ts = &ts[j - w..];
    let xs: Vec<f64> = tail_ts.iter().map(|&t| 1.0 / t).collect();

    let n = w as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = tail.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(tail) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = ybar - slope * xbar;
    let rms = (xs
        .iter()
        .zip(tail)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();

    let tail_max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let increasing = tail.windows(2).all(|p| p[1] > p[0]);
    let decreasing = tail.windows(2).all(|p| p[1] < p[0]);
    let accepted = rms <= FIT_RMS_FACTOR * intercept.abs().max(0.1);

    let divergence = if accepted && decreasing && intercept < 0.3 * tail_max {
        Some(Divergence::TowardZero)
    } else if !accepted && increasing && tail[w - 1] > 1.2 * tail[0] {
        Some(Divergence::TowardInfinity)
    } else {
        None
    };

    let make = |kind: IndicatorKind, extremum: f64| IndicatorEstimate {
        value: if divergence.is_none() && accepted {
            intercept
        } else {
            extremum
        },
        tail_extremum: extremum,
        tail_values: tail.to_vec(),
        envelope_slope: slope,
        spread: tail_max - tail_min,
        kind,
        divergence,
    };
    (make(limsup_kind, tail_max), make(liminf_kind, tail_min))
}
