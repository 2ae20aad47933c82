//! Proximity, counting, and characteristic functions on circles: the
//! value-distribution growth data behind characteristic-derived scales.

use crate::error::{Error, Result};
use crate::models::FunctionModel;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Starting node count for the periodic trapezoid rule.
const QUAD_START: usize = 256;
/// Node-doubling cap.
const QUAD_CAP: usize = 1 << 20;
/// Convergence threshold (absolute and relative).
const QUAD_TOL: f64 = 1e-10;
/// |f - a| below this always marks a node for local subdivision.
const WINDOW_TOL: f64 = 1e-6;
/// |f - a| below this means an a-point sits on the contour.
const CONTOUR_TOL: f64 = 1e-12;
/// Angular half-width of the subdivision window around a marked node. The
/// integrand's log spike has curvature ~1/theta^2, so the trapezoid part
/// must only ever see the far tail of it.
const WINDOW_HALF: f64 = 1.0;
/// Absolute tolerance of one window's adaptive quadrature.
const CELL_TOL: f64 = 1e-13;

/// m, N, and their sum at one radius. `a = None` encodes the point at
/// infinity (poles).
#[derive(Debug, Clone, serde::Serialize)]
pub struct NevanlinnaBreakdown {
    pub proximity: f64,
    pub counting: f64,
    pub characteristic: f64,
    pub r: f64,
    pub a: Option<(f64, f64)>,
}

/// m(r, a) = mean of log+ |f| (a = None) or log+ 1/|f - a| over |z| = r.
///
/// Periodic trapezoid with node doubling from 256 nodes until successive
/// estimates agree to 1e-10 (absolute or relative). Nodes close to an
/// a-point (|f - a| small; 1/|f| small for poles) seed angular windows that
/// are integrated by adaptive subdivision instead, because the integrand's
/// log spike defeats equispaced sampling there. Entire models cannot spike
/// for a = infinity, so their (possibly huge) smooth growth is exempt.
pub fn proximity(model: &FunctionModel, r: f64, a: Option<Complex64>) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("proximity requires r > 0, got {r}")));
    }
    if a.is_none() {
        for p in model.pole_list() {
            if (p.norm() - r).abs() <= CONTOUR_TOL * r.max(1.0) {
                return Err(Error::SingularNode);
            }
        }
    }
    let entire = model.is_entire();
    // Integrand value plus "spike distance": how far f is from the target
    // value, the quantity whose smallness makes the integrand singular.
    let g = |theta: f64| -> Result<(f64, f64)> {
        let z = Complex64::from_polar(r, theta);
        match a {
            None => {
                let la = model.log_abs(z)?;
                if la == f64::INFINITY {
                    return Err(Error::SingularNode); // sampled a pole exactly
                }
                if !la.is_finite() {
                    return Ok((0.0, f64::INFINITY)); // zero on contour: log+ = 0
                }
                let dist = if entire { f64::INFINITY } else { (-la).exp() };
                if dist < CONTOUR_TOL {
                    return Err(Error::SingularNode);
                }
                Ok((la.max(0.0), dist))
            }
            Some(av) => {
                let w = model.eval(z)? - av;
                let dist = w.norm();
                if dist < CONTOUR_TOL {
                    return Err(Error::SingularNode);
                }
                Ok(((-dist.ln()).max(0.0), dist))
            }
        }
    };

    let mut n = QUAD_START;
    let mut prev: Option<f64> = None;
    loop {
        let est = level_estimate(&g, n)?;
        if let Some(p) = prev {
            let diff = (est - p).abs();
            if diff < QUAD_TOL || diff < QUAD_TOL * est.abs() {
                return Ok(est.max(0.0));
            }
        }
        if n >= QUAD_CAP {
            return Err(Error::NonConvergent);
        }
        prev = Some(est);
        n *= 2;
    }
}

/// One level: trapezoid outside the spike windows, adaptive quadrature on
/// each maximal run of window cells.
fn level_estimate<G>(g: &G, n: usize) -> Result<f64>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    let h = 2.0 * PI / n as f64;
    // Coarse grids widen the marking threshold so a spike narrower than the
    // node spacing is still caught by the nodes that merely come close.
    let mark_below = (100.0 * h).clamp(WINDOW_TOL, 0.1);
    let mut vals = Vec::with_capacity(n);
    let mut marked = Vec::new();
    for i in 0..n {
        let (v, dist) = g(i as f64 * h)?;
        if dist < mark_below {
            marked.push(i);
        }
        vals.push(v);
    }
    if marked.is_empty() {
        // Periodic trapezoid = plain node average.
        return Ok(vals.iter().sum::<f64>() / n as f64);
    }
    // Cells whose index lies within the window of any marked node.
    let reach = (WINDOW_HALF / h).ceil() as usize;
    let mut in_window = vec![false; n];
    for &j in &marked {
        for d in 0..=reach.min(n - 1) {
            in_window[(j + n - d) % n] = true;
            in_window[(j + d) % n] = true;
        }
    }
    if in_window.iter().all(|&w| w) {
        let (f0, _) = g(0.0)?;
        return Ok(adaptive_window(g, 0.0, 2.0 * PI, f0, f0)? / (2.0 * PI));
    }
    let mut sum = 0.0;
    // Walk maximal runs of window cells; trapezoid the rest.
    let start = (0..n)
        .find(|&i| !in_window[i])
        .expect("mixed window flags");
    let mut i = start;
    loop {
        if in_window[i] {
            let run_start = i;
            let mut j = i;
            while in_window[j % n] {
                j += 1;
            }
            let a = run_start as f64 * h;
            let b = j as f64 * h;
            let fa = vals[run_start % n];
            let fb = vals[j % n];
            sum += adaptive_window(g, a, b, fa, fb)?;
            i = j;
        } else {
            let v0 = vals[i % n];
            let v1 = vals[(i + 1) % n];
            sum += h * 0.5 * (v0 + v1);
            i += 1;
        }
        if i >= start + n {
            break;
        }
    }
    Ok(sum / (2.0 * PI))
}

/// Adaptive Simpson over one window. Depth 48 reaches features ~1e-13 of
/// the window width; anything narrower was already rejected as an a-point
/// on the contour.
fn adaptive_window<G>(g: &G, a: f64, b: f64, fa: f64, fb: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    let m = 0.5 * (a + b);
    let fm = g(m)?.0;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(g, a, m, b, fa, fm, fb, whole, CELL_TOL, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<G>(
    g: &G,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm)?.0;
    let frm = g(rm)?.0;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() < 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    Ok(simpson_rec(g, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_rec(g, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// N(r, a): the integrated counting function, evaluated exactly as a finite
/// sum over the jump radii: sum of m_j log(r / |z_j|) over a-points inside
/// the disk plus n(0, a) log r for a-points at the origin. `distinct`
/// collapses multiplicities to 1.
pub fn counting(
    model: &FunctionModel,
    r: f64,
    a: Option<Complex64>,
    distinct: bool,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("counting requires r > 0, got {r}")));
    }
    let pts = match model.apoints_in_disk(r, a)? {
        Some(pts) => pts,
        None => {
            return Err(Error::Domain(
                "counting needs an enumerable a-point set".into(),
            ))
        }
    };
    let pts = if distinct { dedupe(&pts) } else { pts };
    let mut n = 0.0;
    for p in &pts {
        let m = p.norm();
        if m < 1e-12 {
            n += r.ln(); // origin a-point: n(0,a) log r
        } else {
            n += (r / m).ln();
        }
    }
    Ok(n)
}

fn dedupe(pts: &[Complex64]) -> Vec<Complex64> {
    let mut reps: Vec<Complex64> = Vec::new();
    for p in pts {
        if !reps.iter().any(|q| (p - q).norm() < 1e-8) {
            reps.push(*p);
        }
    }
    reps
}

/// T(r) = m(r, infinity) + N(r, infinity); entire models skip the counting
/// term entirely.
pub fn characteristic(model: &FunctionModel, r: f64) -> Result<f64> {
    let m = proximity(model, r, None)?;
    if model.is_entire() {
        return Ok(m);
    }
    Ok(m + counting(model, r, None, false)?)
}

/// Full m/N/T record at one radius for one target value.
pub fn breakdown(
    model: &FunctionModel,
    r: f64,
    a: Option<Complex64>,
) -> Result<NevanlinnaBreakdown> {
    let m = proximity(model, r, a)?;
    let n = if a.is_none() && model.is_entire() {
        0.0
    } else {
        counting(model, r, a, false)?
    };
    Ok(NevanlinnaBreakdown {
        proximity: m,
        counting: n,
        characteristic: m + n,
        r,
        a: a.map(|v| (v.re, v.im)),
    })
}
