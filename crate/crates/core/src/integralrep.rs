//! Convergence analysis for the growth-comparison integrals: given scales
//! alpha, beta and depths (p, q), the integrand is
//! F(r) / exp((log^[q-1] r)^A)^(k+1) with F = log^[p-2] alpha^{-1}(beta(r))
//! (log^[-1] = exp when p = 1). The module classifies convergence at a
//! given exponent k, brackets the critical exponent where the verdict
//! flips, and reads off the tail behavior of the associated ratio.
//!
//! Note the exponential-gap families put the flip at one less than the
//! type reading (e.g. F = e^{cr} against exp(r)^{k+1} flips at k = c - 1
//! while the type estimator reads c). Both numbers are computed as they
//! are; callers compare them explicitly.

use crate::error::{Error, Result};
use crate::indicators::GridSpec;
use crate::scales::{scale_eval, scale_inverse, GrowthScale};
use crate::tower::TowerReal;

/// Dead band around the linear-decay boundary: within it no verdict is
/// guessed. Shared by the divergence and convergence rules.
const DELTA: f64 = 0.05;
/// Certification octave budget: tail summation may extend the radius range
/// by up to this many doublings.
const MAX_OCTAVES: usize = 2000;
/// Panels per octave in the certified tail sum.
const PANELS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Indeterminate,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    /// Least-squares slope of the log-integrand against log r over the
    /// tail window; linear decay at slope -1 is the convergence boundary.
    pub decay_slope: f64,
    /// Estimated remaining tail integral beyond the grid, present when the
    /// verdict was reached by direct summation.
    pub tail_bound: Option<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TransitionResult {
    pub k_lo: f64,
    pub k_hi: f64,
    /// Every (k, verdict) probed, in evaluation order.
    pub verdict_table: Vec<(f64, ConvergenceVerdict)>,
    /// Set when an indeterminate band kept the bracket wider than the
    /// requested tolerance.
    pub indeterminate_limited: bool,
}

/// Tail behavior of ln F(r) - k (log^[q-1] r)^A, the log of the ratio the
/// convergence lemma bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioBehavior {
    TendsToZero,
    BoundedAway,
    Unbounded,
    Oscillatory,
}

/// (ln F(r), (log^[q-1] r)^A at level 0). ln F folds the p-2 outer logs
/// and the final ln into one iterated log of depth p-1.
fn log_parts(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    a_pow: f64,
    r: &TowerReal,
) -> Result<(f64, f64)> {
    if p == 0 || q == 0 {
        return Err(Error::Domain("p and q must be positive".into()));
    }
    if !(a_pow > 0.0) || !a_pow.is_finite() {
        return Err(Error::Domain(format!(
            "denominator exponent must be positive and finite, got {a_pow}"
        )));
    }
    let composed = scale_inverse(alpha, &scale_eval(beta, r)?)?;
    let ln_f = composed.iter_log(p as i32 - 1)?.to_float()?;
    let core = r.iter_log(q as i32 - 1)?.t_pow(a_pow)?.to_float()?;
    Ok((ln_f, core))
}

/// Log of the integrand at radius r: ln F(r) - (k+1) (log^[q-1] r)^A.
/// All arithmetic stays in the log domain, so the value is finite wherever
/// the iterated logs reduce to level 0.
pub fn integrand_log(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    a_pow: f64,
    k: f64,
    r: &TowerReal,
) -> Result<f64> {
    let (ln_f, core) = log_parts(alpha, beta, p, q, a_pow, r)?;
    Ok(ln_f - (k + 1.0) * core)
}

fn ln_radius(r: &TowerReal) -> Result<f64> {
    r.iter_log(1)?.to_float()
}

enum CertOutcome {
    /// Tail sum converged; the value estimates the remaining integral.
    Certified(f64),
    /// A sampled log-integrand was nonnegative: the integrand is not
    /// decaying out there, so no slope-based verdict may claim convergence.
    SawGrowth,
    /// Budget exhausted or evaluation failed beyond the grid; inconclusive.
    GaveUp,
}

/// Direct summation of the tail integral from r = e^{u0} onward, one
/// radius octave at a time: int e^{l(r)} dr = int e^{l(e^u) + u} du.
fn certify_tail(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    a_pow: f64,
    k: f64,
    u0: f64,
) -> CertOutcome {
    let ln2 = std::f64::consts::LN_2;
    let mut total = 0.0;
    for octave in 0..MAX_OCTAVES {
        let lo = u0 + octave as f64 * ln2;
        let h = ln2 / PANELS as f64;
        let mut inc = 0.0;
        for i in 0..=PANELS {
            let u = lo + i as f64 * h;
            let r = TowerReal::new(u).iter_exp(1);
            let l = match integrand_log(alpha, beta, p, q, a_pow, k, &r) {
                Ok(v) => v,
                Err(_) => return CertOutcome::GaveUp,
            };
            if l >= 0.0 {
                return CertOutcome::SawGrowth;
            }
            let w = if i == 0 || i == PANELS {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            inc += w * (l + u).min(600.0).exp();
        }
        inc *= h / 3.0;
        total += inc;
        if octave >= 7 && inc <= 1e-12 * total.max(1e-300) {
            return CertOutcome::Certified(total);
        }
    }
    CertOutcome::GaveUp
}

/// Convergence verdict for the integral at exponent k over the given grid.
/// Divergence is read from tail points refusing to decay below the r^{-1}
/// line; convergence needs either a certified tail sum or a decay slope
/// clear of the dead band with a non-increasing tail. Everything else is
/// Indeterminate.
pub fn classify(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    a_pow: f64,
    k: f64,
    grid: &GridSpec,
) -> Result<ConvergenceVerdict> {
    let radii = grid.radii();
    let mut us = Vec::with_capacity(radii.len());
    let mut ls = Vec::with_capacity(radii.len());
    for r in &radii {
        us.push(ln_radius(r)?);
        ls.push(integrand_log(alpha, beta, p, q, a_pow, k, r)?);
    }
    if us[0] <= 0.0 || us[us.len() - 1] < 10.0 * us[0] {
        return Err(Error::Domain(
            "classification grid must cover a decade of log r".into(),
        ));
    }

    let j = ls.len();
    let w = 8usize.max(j / 4).min(j);
    let tail_l = &ls[j - w..];
    let tail_u = &us[j - w..];

    let n = w as f64;
    let ubar = tail_u.iter().sum::<f64>() / n;
    let lbar = tail_l.iter().sum::<f64>() / n;
    let mut suu = 0.0;
    let mut sul = 0.0;
    for (u, l) in tail_u.iter().zip(tail_l) {
        suu += (u - ubar) * (u - ubar);
        sul += (u - ubar) * (l - lbar);
    }
    let slope = if suu > 0.0 { sul / suu } else { 0.0 };

    let diverging_points = tail_l
        .iter()
        .zip(tail_u)
        .filter(|(l, u)| **l >= -(1.0 - DELTA) * **u)
        .count();
    if diverging_points >= 3 {
        return Ok(ConvergenceVerdict {
            verdict: Verdict::Diverges,
            decay_slope: slope,
            tail_bound: None,
        });
    }

    let mut growth_beyond_grid = false;
    if slope <= -(1.0 + DELTA / 4.0) {
        match certify_tail(alpha, beta, p, q, a_pow, k, tail_u[w - 1]) {
            CertOutcome::Certified(bound) => {
                return Ok(ConvergenceVerdict {
                    verdict: Verdict::Converges,
                    decay_slope: slope,
                    tail_bound: Some(bound),
                });
            }
            CertOutcome::SawGrowth => growth_beyond_grid = true,
            CertOutcome::GaveUp => {}
        }
    }

    let non_increasing = tail_l
        .windows(2)
        .all(|p| p[1] <= p[0] + 1e-9 * (1.0 + p[0].abs()));
    if !growth_beyond_grid && slope <= -(1.0 + DELTA) && non_increasing {
        return Ok(ConvergenceVerdict {
            verdict: Verdict::Converges,
            decay_slope: slope,
            tail_bound: None,
        });
    }

    Ok(ConvergenceVerdict {
        verdict: Verdict::Indeterminate,
        decay_slope: slope,
        tail_bound: None,
    })
}

/// Bracket the critical exponent by bisection. The endpoints must classify
/// as Diverges (low) and Converges (high); an indeterminate band in the
/// middle is refined from both edges and reported via
/// `indeterminate_limited` when it keeps the bracket wider than `tol`.
#[allow(clippy::too_many_arguments)]
pub fn transition(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    a_pow: f64,
    k_range: (f64, f64),
    tol: f64,
    grid: &GridSpec,
) -> Result<TransitionResult> {
    let (mut lo, mut hi) = k_range;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::BadBracket(format!(
            "need k_lo < k_hi and tol > 0, got ({lo}, {hi}) at {tol}"
        )));
    }
    let mut table = Vec::new();
    let v_lo = classify(alpha, beta, p, q, a_pow, lo, grid)?;
    let lo_ok = v_lo.verdict == Verdict::Diverges;
    table.push((lo, v_lo));
    if !lo_ok {
        return Err(Error::BadBracket(format!(
            "integral does not diverge at k = {lo}"
        )));
    }
    let v_hi = classify(alpha, beta, p, q, a_pow, hi, grid)?;
    let hi_ok = v_hi.verdict == Verdict::Converges;
    table.push((hi, v_hi));
    if !hi_ok {
        return Err(Error::BadBracket(format!(
            "integral does not converge at k = {hi}"
        )));
    }

    let mut izone: Option<(f64, f64)> = None;
    for _ in 0..40 {
        if hi - lo <= tol {
            break;
        }
        let probe = match izone {
            None => 0.5 * (lo + hi),
            Some((ilo, ihi)) => {
                let gap_lo = ilo - lo;
                let gap_hi = hi - ihi;
                if gap_lo.max(gap_hi) <= 0.25 * tol {
                    break;
                }
                if gap_lo >= gap_hi {
                    0.5 * (lo + ilo)
                } else {
                    0.5 * (ihi + hi)
                }
            }
        };
        let v = classify(alpha, beta, p, q, a_pow, probe, grid)?;
        let verdict = v.verdict;
        table.push((probe, v));
        match verdict {
            Verdict::Diverges => lo = probe,
            Verdict::Converges => hi = probe,
            Verdict::Indeterminate => {
                izone = Some(match izone {
                    None => (probe, probe),
                    Some((a, b)) => (a.min(probe), b.max(probe)),
                });
            }
        }
    }

    Ok(TransitionResult {
        k_lo: lo,
        k_hi: hi,
        indeterminate_limited: hi - lo > tol,
        verdict_table: table,
    })
}

/// Tail behavior of the ratio F(r) / exp((log^[q-1] r)^A)^k, read in the
/// log domain over the grid's tail window.
pub fn lemma_ratio(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    p: u32,
    q: u32,
    a_pow: f64,
    k: f64,
    grid: &GridSpec,
) -> Result<RatioBehavior> {
    let radii = grid.radii();
    let mut rhos = Vec::with_capacity(radii.len());
    for r in &radii {
        let (ln_f, core) = log_parts(alpha, beta, p, q, a_pow, r)?;
        rhos.push(ln_f - k * core);
    }
    let j = rhos.len();
    let w = 8usize.max(j / 4).min(j);
    let tail = &rhos[j - w..];
    let first = tail[0];
    let last = tail[w - 1];
    let slack = |x: f64| 1e-9 * (1.0 + x.abs());
    let non_increasing = tail.windows(2).all(|p| p[1] <= p[0] + slack(p[0]));
    let non_decreasing = tail.windows(2).all(|p| p[1] >= p[0] - slack(p[0]));
    let bounded = tail.iter().all(|x| x.abs() <= 5.0);
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().cloned().fold(f64::INFINITY, f64::min);

    Ok(if non_increasing && last <= (-5.0f64).min(first - 1.0) {
        RatioBehavior::TendsToZero
    } else if non_decreasing && last >= 5.0f64.max(first + 1.0) {
        RatioBehavior::Unbounded
    } else if bounded && (non_increasing || non_decreasing || spread <= 0.5) {
        RatioBehavior::BoundedAway
    } else {
        RatioBehavior::Oscillatory
    })
}
