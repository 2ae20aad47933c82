//! Growth scales: positive continuous functions increasing to infinity,
//! with evaluation and inversion. Evaluation is exact tower arithmetic for
//! the iterated-exponential family and quadrature-backed for scales derived
//! from function models.

use crate::error::{Error, Result};
use crate::models::FunctionModel;
use crate::nevanlinna::characteristic;
use crate::tower::TowerReal;
use std::sync::Mutex;

/// Relative tolerance of the guarded-bisection inverse.
const INVERSE_TOL: f64 = 1e-10;
/// Points in the first characteristic-scale cache grid.
const DC_GRID: usize = 256;

#[derive(Debug)]
pub enum ScaleKind {
    /// alpha(x) = exp^[m](c * (log^[n] x)^a)
    Iterated { m: u32, n: u32, a: f64, c: f64 },
    /// beta(x) = exp(x * (2 + sin log x))
    SinLog,
    /// alpha(x) = M_f(x), the maximum modulus of the model.
    DerivedMaxMod { model: FunctionModel },
    /// alpha(x) = T_f(x), the characteristic of the model.
    DerivedCharacteristic { model: FunctionModel },
    /// Monotone samples with piecewise-cubic interpolation between them.
    TabulatedMonotone { xs: Vec<f64>, ys: Vec<f64> },
}

#[derive(Debug)]
pub struct GrowthScale {
    pub kind: ScaleKind,
    /// Smallest argument where the scale is defined, positive, increasing.
    pub x0: f64,
    /// Characteristic-scale sample cache: sorted (x, T) pairs, built on
    /// first inverse query and refined by every exact evaluation since.
    cache: Mutex<Vec<(f64, f64)>>,
}

impl Clone for GrowthScale {
    fn clone(&self) -> Self {
        GrowthScale {
            kind: match &self.kind {
                ScaleKind::Iterated { m, n, a, c } => ScaleKind::Iterated {
                    m: *m,
                    n: *n,
                    a: *a,
                    c: *c,
                },
                ScaleKind::SinLog => ScaleKind::SinLog,
                ScaleKind::DerivedMaxMod { model } => ScaleKind::DerivedMaxMod {
                    model: model.clone(),
                },
                ScaleKind::DerivedCharacteristic { model } => ScaleKind::DerivedCharacteristic {
                    model: model.clone(),
                },
                ScaleKind::TabulatedMonotone { xs, ys } => ScaleKind::TabulatedMonotone {
                    xs: xs.clone(),
                    ys: ys.clone(),
                },
            },
            x0: self.x0,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

/// exp^[n](0.01): the default domain threshold keeps every iterated log of
/// the argument at least 0.01, so deep-log scales stay positive.
fn iter_domain_floor(n: u32) -> f64 {
    let mut v = 0.01f64;
    for _ in 0..n {
        v = v.exp();
    }
    v
}

impl GrowthScale {
    pub fn iterated(m: u32, n: u32, a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !(c > 0.0) {
            return Err(Error::Domain(
                "iterated scale requires a > 0 and c > 0".into(),
            ));
        }
        let x0 = if n == 0 {
            1.0
        } else {
            3.0f64.max(iter_domain_floor(n))
        };
        Ok(GrowthScale {
            kind: ScaleKind::Iterated { m, n, a, c },
            x0,
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn sinlog() -> Self {
        GrowthScale {
            kind: ScaleKind::SinLog,
            x0: std::f64::consts::E,
            cache: Mutex::new(Vec::new()),
        }
    }

    pub fn derived_max_mod(model: FunctionModel) -> Result<Self> {
        model.validate()?;
        Ok(GrowthScale {
            kind: ScaleKind::DerivedMaxMod { model },
            x0: 1.0,
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn derived_characteristic(model: FunctionModel) -> Result<Self> {
        model.validate()?;
        Ok(GrowthScale {
            kind: ScaleKind::DerivedCharacteristic { model },
            x0: 1.0,
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Domain(
                "tabulated scale needs at least two sample pairs".into(),
            ));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain("tabulated xs must strictly increase".into()));
            }
        }
        for w in ys.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain("tabulated ys must strictly increase".into()));
            }
        }
        let x0 = xs[0];
        Ok(GrowthScale {
            kind: ScaleKind::TabulatedMonotone { xs, ys },
            x0,
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }
}

/// Evaluate the scale at a tower-represented argument.
pub fn scale_eval(scale: &GrowthScale, x: &TowerReal) -> Result<TowerReal> {
    let floor = TowerReal::new(scale.x0);
    if *x < floor {
        return Err(Error::BelowDomain {
            x: x.to_float().unwrap_or(f64::INFINITY),
            x0: scale.x0,
        });
    }
    match &scale.kind {
        ScaleKind::Iterated { m, n, a, c } => {
            let core = x.iter_log(*n as i32)?.t_pow(*a)?;
            let scaled = core.t_mul(&TowerReal::new(*c))?;
            Ok(scaled.iter_exp(*m))
        }
        ScaleKind::SinLog => {
            // exponent x (2 + sin log x); the phase needs log x at level 0
            let u = x.iter_log(1)?;
            if u.level() > 0 {
                return Err(Error::Domain(
                    "sin log phase is unresolvable at this magnitude".into(),
                ));
            }
            let factor = 2.0 + u.mantissa().sin();
            let exponent = x.t_mul(&TowerReal::new(factor))?;
            Ok(exponent.iter_exp(1))
        }
        ScaleKind::DerivedMaxMod { model } => {
            let r = level_zero(x)?;
            retry_off_circle(|rr| model.max_modulus(rr), r)
        }
        ScaleKind::DerivedCharacteristic { model } => {
            let r = level_zero(x)?;
            let t = dc_eval(scale, model, r)?;
            Ok(TowerReal::new(t))
        }
        ScaleKind::TabulatedMonotone { xs, ys } => {
            let v = level_zero(x)?;
            if v > *xs.last().unwrap() {
                return Err(Error::Domain(
                    "argument beyond the tabulated sample range".into(),
                ));
            }
            Ok(TowerReal::new(pchip_eval(xs, ys, v)))
        }
    }
}

/// Invert the scale: IteratedScale in closed form, everything else by
/// doubling bracket plus bisection to 1e-10 relative.
pub fn scale_inverse(scale: &GrowthScale, y: &TowerReal) -> Result<TowerReal> {
    match &scale.kind {
        ScaleKind::Iterated { m, n, a, c } => {
            let bottom = scale_eval(scale, &TowerReal::new(scale.x0))?;
            if *y < bottom {
                return Err(Error::BelowRange);
            }
            let core = y.iter_log(*m as i32)?.t_div(&TowerReal::new(*c))?;
            let root = core.t_pow(1.0 / *a)?;
            Ok(root.iter_exp(*n))
        }
        ScaleKind::DerivedCharacteristic { model } => dc_inverse(scale, model, y),
        _ => scale_inverse_bisect(scale, y),
    }
}

/// The generic bisection inverse, exposed so closed forms can be
/// cross-checked against it.
pub fn scale_inverse_bisect(scale: &GrowthScale, y: &TowerReal) -> Result<TowerReal> {
    let mut lo = TowerReal::new(scale.x0);
    let bottom = scale_eval(scale, &lo)?;
    if *y < bottom {
        return Err(Error::BelowRange);
    }
    if bottom == *y {
        return Ok(lo);
    }
    let two = TowerReal::new(2.0);
    let mut hi = lo.t_mul(&two)?;
    let mut grew = 0;
    while scale_eval(scale, &hi)? < *y {
        lo = hi;
        hi = hi.t_mul(&two)?;
        grew += 1;
        if grew > 4000 {
            return Err(Error::NonConvergent);
        }
    }
    bisect_to(scale, y, lo, hi)
}

fn bisect_to(
    scale: &GrowthScale,
    y: &TowerReal,
    mut lo: TowerReal,
    mut hi: TowerReal,
) -> Result<TowerReal> {
    for _ in 0..500 {
        if converged(&lo, &hi) {
            break;
        }
        let mid = midpoint(&lo, &hi)?;
        if mid <= lo || mid >= hi {
            break; // float resolution exhausted
        }
        if scale_eval(scale, &mid)? >= *y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    midpoint(&lo, &hi)
}

fn converged(lo: &TowerReal, hi: &TowerReal) -> bool {
    match hi.t_div(lo) {
        Ok(ratio) => match ratio.to_float() {
            Ok(v) => v - 1.0 <= INVERSE_TOL,
            Err(_) => false,
        },
        Err(_) => false,
    }
}

fn midpoint(lo: &TowerReal, hi: &TowerReal) -> Result<TowerReal> {
    if lo.level() == 0 && hi.level() == 0 && hi.mantissa() < 1e14 {
        Ok(TowerReal::new(0.5 * (lo.mantissa() + hi.mantissa())))
    } else {
        // geometric midpoint keeps tower levels tame
        lo.t_mul(hi)?.t_pow(0.5)
    }
}

fn level_zero(x: &TowerReal) -> Result<f64> {
    x.to_float().map_err(|_| Error::NonLevelZero)
}

/// Retry a circle computation once with the radius nudged off a modulus
/// collision; quadrature radii landing exactly on a pole or a-point modulus
/// are grid artifacts, not genuine requests.
fn retry_off_circle<F>(f: F, r: f64) -> Result<TowerReal>
where
    F: Fn(f64) -> Result<TowerReal>,
{
    match f(r) {
        Err(Error::PoleOnCircle { .. }) | Err(Error::OnCircle { .. }) | Err(Error::SingularNode) => {
            f(r * (1.0 + 1e-9))
        }
        other => other,
    }
}

fn retry_off_circle_f64<F>(f: F, r: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    match f(r) {
        Err(Error::PoleOnCircle { .. }) | Err(Error::OnCircle { .. }) | Err(Error::SingularNode) => {
            f(r * (1.0 + 1e-9))
        }
        other => other,
    }
}

/// Exact characteristic evaluation; every value funds the inverse cache.
fn dc_eval(scale: &GrowthScale, model: &FunctionModel, r: f64) -> Result<f64> {
    let t = retry_off_circle_f64(|rr| characteristic(model, rr), r)?;
    let mut cache = scale.cache.lock().unwrap();
    cache_insert(&mut cache, r, t);
    Ok(t)
}

fn cache_insert(cache: &mut Vec<(f64, f64)>, x: f64, t: f64) {
    let i = cache.partition_point(|(cx, _)| *cx < x);
    if i < cache.len() && (cache[i].0 - x).abs() <= 1e-12 * x.abs() {
        return;
    }
    if i > 0 && (cache[i - 1].0 - x).abs() <= 1e-12 * x.abs() {
        return;
    }
    // A non-monotone sample is quadrature noise; drop it.
    if i > 0 && cache[i - 1].1 >= t {
        return;
    }
    if i < cache.len() && cache[i].1 <= t {
        return;
    }
    cache.insert(i, (x, t));
}

/// Characteristic-scale inverse: a geometric sample grid seeds the cache,
/// interpolation proposes a bracket, and true evaluations tighten it to
/// 1e-10 relative. Each true evaluation lands in the cache, so repeated
/// queries refine the table on demand.
fn dc_inverse(scale: &GrowthScale, model: &FunctionModel, y: &TowerReal) -> Result<TowerReal> {
    let yv = y.to_float().map_err(|_| Error::NonLevelZero)?;
    let bottom = retry_off_circle_f64(|rr| characteristic(model, rr), scale.x0)?;
    if yv < bottom {
        return Err(Error::BelowRange);
    }
    {
        let mut cache = scale.cache.lock().unwrap();
        cache_insert(&mut cache, scale.x0, bottom);
        // Grow the sampled range until it covers y.
        let mut top = cache.last().unwrap().0;
        while cache.last().unwrap().1 < yv {
            top *= 2.0;
            if !top.is_finite() {
                return Err(Error::NonLevelZero);
            }
            let t = retry_off_circle_f64(|rr| characteristic(model, rr), top)?;
            cache_insert(&mut cache, top, t);
        }
        // First query: lay down the geometric base grid.
        if cache.len() < 8 {
            let lo = scale.x0.max(1e-6);
            let hi = cache.last().unwrap().0;
            let samples: Vec<f64> = (1..DC_GRID)
                .map(|i| lo * (hi / lo).powf(i as f64 / DC_GRID as f64))
                .collect();
            drop(cache);
            for x in samples {
                let t = retry_off_circle_f64(|rr| characteristic(model, rr), x)?;
                let mut cache = scale.cache.lock().unwrap();
                cache_insert(&mut cache, x, t);
            }
        }
    }
    // Bracket from the cache, then tighten with true evaluations.
    let (mut lo, mut hi) = {
        let cache = scale.cache.lock().unwrap();
        let i = cache.partition_point(|(_, t)| *t < yv);
        if i == 0 {
            (scale.x0, cache[0].0.max(scale.x0 * 2.0))
        } else if i == cache.len() {
            let last = cache.last().unwrap().0;
            (last, last * 2.0)
        } else {
            (cache[i - 1].0, cache[i].0)
        }
    };
    for _ in 0..200 {
        if hi / lo - 1.0 <= INVERSE_TOL {
            break;
        }
        let mid = if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let t = dc_eval(scale, model, mid)?;
        if t >= yv {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TowerReal::new(0.5 * (lo + hi)))
}

/// The order/type ratio components at one radius: numerator
/// log^[p] alpha^{-1}(beta(r)), denominator log^[q] r, both as floats.
pub fn composed_ratio(
    alpha: &GrowthScale,
    beta: &GrowthScale,
    r: &TowerReal,
    p: u32,
    q: u32,
) -> Result<(f64, f64)> {
    let beta_r = scale_eval(beta, r)?;
    let x = scale_inverse(alpha, &beta_r)?;
    let num = x.iter_log(p as i32)?.to_float()?;
    let den = r.iter_log(q as i32)?.to_float()?;
    Ok((num, den))
}

/// Fritsch-Carlson monotone cubic interpolation at x given strictly
/// increasing sample vectors.
pub(crate) fn pchip_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let slopes = pchip_slopes(xs, ys);
    let i = xs.partition_point(|&v| v <= x) - 1;
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * slopes[i] + h01 * ys[i + 1] + h11 * h * slopes[i + 1]
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    m[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), d[0], d.get(1).copied().unwrap_or(d[0]));
    m[n - 1] = endpoint_slope(
        h[n - 2],
        if n >= 3 { h[n - 3] } else { h[n - 2] },
        d[n - 2],
        if n >= 3 { d[n - 3] } else { d[n - 2] },
    );
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
