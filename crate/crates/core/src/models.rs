//! Symbolic representations of entire/meromorphic functions with pointwise
//! evaluation, maximum modulus on circles, and a-point counting. These are
//! the raw material for maximum-modulus and characteristic growth scales.

use crate::error::{Error, Result};
use crate::tower::TowerReal;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Points closer than this to a listed pole reject evaluation.
const POLE_EVAL_TOL: f64 = 1e-14;
/// Relative tolerance deciding that an a-point/pole modulus sits on a circle.
const ON_CIRCLE_TOL: f64 = 1e-12;
/// Circle nodes for the coarse max-modulus scan.
const MAXMOD_NODES: usize = 4096;
/// Enumeration guard for exp-power a-point listings.
const MAX_ENUMERATED: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionModel {
    /// Coefficients in ascending degree order.
    Polynomial { coeffs: Vec<Complex64> },
    /// f(z) = exp(c z^n), c > 0, n >= 1.
    ExpPower { c: f64, n: u32 },
    /// f(z) = exp^[k](z), k >= 1.
    ExpTower { k: u32 },
    /// f(z) = scale * prod(z - zero) / prod(z - pole).
    FactoredRational {
        zeros: Vec<Complex64>,
        poles: Vec<Complex64>,
        scale: Complex64,
    },
    Sum(Box<FunctionModel>, Box<FunctionModel>),
    Product(Box<FunctionModel>, Box<FunctionModel>),
}

impl FunctionModel {
    /// Structural invariants: non-empty polynomial, positive exp-power
    /// parameters, non-zero rational scale, zero/pole multisets disjoint.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionModel::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::Domain("polynomial needs coefficients".into()));
                }
            }
            FunctionModel::ExpPower { c, n } => {
                if !(*c > 0.0) || *n == 0 {
                    return Err(Error::Domain("exp-power requires c > 0, n >= 1".into()));
                }
            }
            FunctionModel::ExpTower { k } => {
                if *k == 0 {
                    return Err(Error::Domain("exp-tower requires k >= 1".into()));
                }
            }
            FunctionModel::FactoredRational { zeros, poles, scale } => {
                if scale.norm() == 0.0 {
                    return Err(Error::Domain("rational scale must be non-zero".into()));
                }
                for z in zeros {
                    if poles.iter().any(|p| (z - p).norm() < POLE_EVAL_TOL) {
                        return Err(Error::Domain(
                            "zero and pole lists must be disjoint".into(),
                        ));
                    }
                }
            }
            FunctionModel::Sum(l, r) | FunctionModel::Product(l, r) => {
                l.validate()?;
                r.validate()?;
            }
        }
        Ok(())
    }

    pub fn is_entire(&self) -> bool {
        self.pole_list().is_empty()
    }

    /// Poles with multiplicity (union over composite variants; cancellations
    /// are not simplified).
    pub fn pole_list(&self) -> Vec<Complex64> {
        match self {
            FunctionModel::FactoredRational { poles, .. } => poles.clone(),
            FunctionModel::Sum(l, r) | FunctionModel::Product(l, r) => {
                let mut v = l.pole_list();
                v.extend(r.pole_list());
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            FunctionModel::Polynomial { coeffs } => Ok(poly_eval(coeffs, z)),
            FunctionModel::ExpPower { c, n } => Ok((z.powu(*n) * *c).exp()),
            FunctionModel::ExpTower { k } => {
                let mut w = z;
                for _ in 0..*k {
                    w = w.exp();
                }
                Ok(w)
            }
            FunctionModel::FactoredRational { zeros, poles, scale } => {
                let mut den = Complex64::new(1.0, 0.0);
                for p in poles {
                    if (z - p).norm() < POLE_EVAL_TOL {
                        return Err(Error::Pole);
                    }
                    den *= z - p;
                }
                let mut num = *scale;
                for zr in zeros {
                    num *= z - zr;
                }
                Ok(num / den)
            }
            FunctionModel::Sum(l, r) => Ok(l.eval(z)? + r.eval(z)?),
            FunctionModel::Product(l, r) => Ok(l.eval(z)? * r.eval(z)?),
        }
    }

    /// ln |f(z)|, computed without forming |f| where a closed form avoids
    /// overflow (exp-power, products, rationals). May be +-infinity at
    /// zeros/poles; non-finite intermediate evaluation reports Overflow.
    pub fn log_abs(&self, z: Complex64) -> Result<f64> {
        match self {
            FunctionModel::ExpPower { c, n } => Ok(*c * z.powu(*n).re),
            FunctionModel::ExpTower { k } => {
                // ln|exp^[k](z)| = Re exp^[k-1](z)
                let mut w = z;
                for _ in 0..k - 1 {
                    w = w.exp();
                    if !w.re.is_finite() || !w.im.is_finite() {
                        return Err(Error::Overflow(
                            "exp tower exceeds float range on the circle".into(),
                        ));
                    }
                }
                Ok(w.re)
            }
            FunctionModel::FactoredRational { zeros, poles, scale } => {
                let mut s = scale.norm().ln();
                for zr in zeros {
                    s += (z - zr).norm().ln();
                }
                for p in poles {
                    s -= (z - p).norm().ln();
                }
                Ok(s)
            }
            FunctionModel::Product(l, r) => Ok(l.log_abs(z)? + r.log_abs(z)?),
            _ => {
                let w = self.eval(z)?;
                let n = w.norm();
                if n.is_finite() {
                    Ok(n.ln())
                } else {
                    Err(Error::Overflow(
                        "evaluation exceeds float range on the circle".into(),
                    ))
                }
            }
        }
    }

    /// M_f(r): exact tower closed forms for exp-power and exp-tower, circle
    /// sampling (4096 nodes) plus golden-section refinement otherwise.
    pub fn max_modulus(&self, r: f64) -> Result<TowerReal> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("max_modulus requires r > 0, got {r}")));
        }
        match self {
            FunctionModel::ExpPower { c, n } => {
                // Positivity on the positive real axis makes M(r) = e^{c r^n};
                // powi keeps the exponent mantissa exact at moderate r.
                let p = *c * r.powi(*n as i32);
                let e = if p.is_finite() {
                    TowerReal::new(p)
                } else {
                    TowerReal::new(r)
                        .t_pow(*n as f64)?
                        .t_mul(&TowerReal::new(*c))?
                };
                Ok(e.iter_exp(1))
            }
            FunctionModel::ExpTower { k } => Ok(TowerReal::new(r).iter_exp(*k)),
            _ => self.max_modulus_sampled(r),
        }
    }

    /// Generic sampling path for M_f(r); public so the closed forms can be
    /// cross-validated against it.
    pub fn max_modulus_sampled(&self, r: f64) -> Result<TowerReal> {
        for p in self.pole_list() {
            if (p.norm() - r).abs() <= ON_CIRCLE_TOL * r.max(1.0) {
                return Err(Error::PoleOnCircle { r });
            }
        }
        let g = |theta: f64| -> Result<f64> {
            self.log_abs(Complex64::from_polar(r, theta))
        };
        let mut best_i = 0usize;
        let mut best = f64::NEG_INFINITY;
        let step = 2.0 * PI / MAXMOD_NODES as f64;
        for i in 0..MAXMOD_NODES {
            let v = g(i as f64 * step)?;
            if v > best {
                best = v;
                best_i = i;
            }
        }
        // Golden-section refinement around the best node.
        let mut a = (best_i as f64 - 1.0) * step;
        let mut b = (best_i as f64 + 1.0) * step;
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = g(x1)?;
        let mut f2 = g(x2)?;
        for _ in 0..80 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = g(x2)?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = g(x1)?;
            }
        }
        let ln_max = best.max(f1).max(f2);
        if !ln_max.is_finite() {
            return Err(Error::Overflow("maximum modulus is not finite".into()));
        }
        Ok(TowerReal::new(ln_max).iter_exp(1))
    }

    /// a-points in |z| <= r as an explicit list with multiplicity, when the
    /// variant admits enumeration; None means only the winding count exists.
    /// `a = None` counts poles.
    pub fn apoints_in_disk(
        &self,
        r: f64,
        a: Option<Complex64>,
    ) -> Result<Option<Vec<Complex64>>> {
        let a = match a {
            None => {
                let pts = filter_disk(self.pole_list(), r)?;
                return Ok(Some(pts));
            }
            Some(a) => a,
        };
        match self {
            FunctionModel::Polynomial { coeffs } => {
                let mut shifted = coeffs.clone();
                shifted[0] -= a;
                trim_poly(&mut shifted);
                if shifted.is_empty() {
                    return Err(Error::Domain(
                        "polynomial is identically equal to a".into(),
                    ));
                }
                if shifted.len() == 1 {
                    return Ok(Some(Vec::new()));
                }
                let roots = durand_kerner(&shifted)?;
                Ok(Some(filter_disk(roots, r)?))
            }
            FunctionModel::FactoredRational { zeros, poles, scale } => {
                if a == Complex64::new(0.0, 0.0) {
                    return Ok(Some(filter_disk(zeros.clone(), r)?));
                }
                // scale * Z(z) - a * P(z) = 0 away from poles.
                let zs = poly_scale(&poly_from_roots(zeros), *scale);
                let ps = poly_scale(&poly_from_roots(poles), a);
                let mut diff = poly_sub(&zs, &ps);
                trim_poly(&mut diff);
                if diff.is_empty() {
                    return Err(Error::Domain("rational identically equal to a".into()));
                }
                if diff.len() == 1 {
                    return Ok(Some(Vec::new()));
                }
                let roots = durand_kerner(&diff)?;
                Ok(Some(filter_disk(roots, r)?))
            }
            FunctionModel::ExpPower { c, n } => {
                if a.norm() == 0.0 {
                    return Ok(Some(Vec::new())); // exp omits 0
                }
                // c z^n = Log a + 2 pi i k
                let la = a.norm().ln();
                let ta = a.arg();
                let reach = *c * r.powi(*n as i32);
                let kmax = ((reach + (la * la + ta * ta).sqrt()) / (2.0 * PI)).ceil() as i64 + 1;
                if kmax as usize * (*n as usize) > MAX_ENUMERATED {
                    return Err(Error::Overflow(
                        "too many a-points to enumerate in this disk".into(),
                    ));
                }
                let mut pts = Vec::new();
                for k in -kmax..=kmax {
                    let w = Complex64::new(la, ta + 2.0 * PI * k as f64) / *c;
                    let modulus = w.norm().powf(1.0 / *n as f64);
                    if modulus > r * (1.0 + ON_CIRCLE_TOL) {
                        continue;
                    }
                    if (modulus - r).abs() <= ON_CIRCLE_TOL * r.max(1.0) {
                        return Err(Error::OnCircle { r });
                    }
                    let base_arg = w.arg() / *n as f64;
                    for j in 0..*n {
                        let ang = base_arg + 2.0 * PI * j as f64 / *n as f64;
                        pts.push(Complex64::from_polar(modulus, ang));
                    }
                }
                Ok(Some(pts))
            }
            _ => Ok(None),
        }
    }

    /// Number of a-points (poles for `a = None`) in |z| <= r, with
    /// multiplicity unless `distinct`. Enumerable variants count their
    /// explicit lists; the rest go through the argument principle.
    pub fn count_in_disk(&self, r: f64, a: Option<Complex64>, distinct: bool) -> Result<usize> {
        if let Some(pts) = self.apoints_in_disk(r, a)? {
            if distinct {
                return Ok(count_distinct(&pts));
            }
            return Ok(pts.len());
        }
        if distinct {
            return Err(Error::Domain(
                "distinct counting needs an enumerable model".into(),
            ));
        }
        let a = a.expect("infinity case is always enumerable");
        let w = self.winding_number(r, a)?;
        let poles = filter_disk(self.pole_list(), r)?.len() as i64;
        let n = w + poles;
        if n < 0 {
            return Err(Error::NonIntegralWinding { winding: w as f64 });
        }
        Ok(n as usize)
    }

    /// Winding number of f(z) - a along |z| = r by adaptive argument
    /// tracking: segments are split until each argument increment is < pi/2,
    /// and the total must come out integral within 1e-6.
    pub fn winding_number(&self, r: f64, a: Complex64) -> Result<i64> {
        let w_at = |theta: f64| -> Result<Complex64> {
            let w = self.eval(Complex64::from_polar(r, theta))? - a;
            if w.norm() < 1e-12 * (1.0 + a.norm()) {
                return Err(Error::OnCircle { r });
            }
            Ok(w)
        };
        let n0 = 256usize;
        let mut nodes: Vec<(f64, Complex64)> = Vec::with_capacity(n0 + 1);
        for i in 0..n0 {
            let th = 2.0 * PI * i as f64 / n0 as f64;
            nodes.push((th, w_at(th)?));
        }
        nodes.push((2.0 * PI, nodes[0].1)); // close the loop exactly
        let mut total = 0.0f64;
        // Stack of segments still to account for.
        let mut stack: Vec<(f64, Complex64, f64, Complex64, u32)> = nodes
            .windows(2)
            .map(|p| (p[0].0, p[0].1, p[1].0, p[1].1, 0u32))
            .collect();
        while let Some((t1, w1, t2, w2, depth)) = stack.pop() {
            let dphi = (w2 / w1).arg();
            if dphi.abs() < PI / 2.0 {
                total += dphi;
                continue;
            }
            if depth >= 48 {
                return Err(Error::NonIntegralWinding {
                    winding: total / (2.0 * PI),
                });
            }
            let tm = 0.5 * (t1 + t2);
            let wm = w_at(tm)?;
            stack.push((t1, w1, tm, wm, depth + 1));
            stack.push((tm, wm, t2, w2, depth + 1));
        }
        let winding = total / (2.0 * PI);
        let rounded = winding.round();
        if (winding - rounded).abs() > 1e-6 {
            return Err(Error::NonIntegralWinding { winding });
        }
        Ok(rounded as i64)
    }
}

fn filter_disk(pts: Vec<Complex64>, r: f64) -> Result<Vec<Complex64>> {
    let tol = ON_CIRCLE_TOL * r.max(1.0);
    let mut out = Vec::new();
    for p in pts {
        let m = p.norm();
        if (m - r).abs() <= tol {
            return Err(Error::OnCircle { r });
        }
        if m < r {
            out.push(p);
        }
    }
    Ok(out)
}

fn count_distinct(pts: &[Complex64]) -> usize {
    let mut reps: Vec<Complex64> = Vec::new();
    for p in pts {
        if !reps.iter().any(|q| (p - q).norm() < 1e-8) {
            reps.push(*p);
        }
    }
    reps.len()
}

pub(crate) fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn trim_poly(coeffs: &mut Vec<Complex64>) {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    if coeffs.len() == 1 && coeffs[0].norm() == 0.0 {
        coeffs.clear(); // identically zero
    }
}

pub(crate) fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        coeffs = next;
    }
    coeffs
}

fn poly_scale(coeffs: &[Complex64], s: Complex64) -> Vec<Complex64> {
    coeffs.iter().map(|c| c * s).collect()
}

fn poly_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    out
}

/// All roots of the polynomial (ascending coefficients, degree >= 1) by
/// Durand-Kerner iteration with a Newton polish. Multiplicities appear as
/// coincident roots.
pub(crate) fn durand_kerner(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(Error::Domain("leading coefficient is zero".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let bound = 1.0 + monic
        .iter()
        .take(deg)
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| seed.powu(i as u32 + 1) * bound)
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let zi = roots[i];
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    den *= zi - zj;
                }
            }
            if den.norm() == 0.0 {
                // Coincident iterates; nudge apart.
                roots[i] += Complex64::new(1e-8, 1e-8);
                max_step = f64::MAX;
                continue;
            }
            let step = poly_eval(&monic, zi) / den;
            roots[i] = zi - step;
            max_step = max_step.max(step.norm() / (1.0 + zi.norm()));
        }
        if max_step < 1e-14 {
            break;
        }
    }
    // Newton polish against the original polynomial.
    let deriv: Vec<Complex64> = (1..coeffs.len())
        .map(|i| coeffs[i] * i as f64)
        .collect();
    for rt in roots.iter_mut() {
        for _ in 0..3 {
            let d = poly_eval(&deriv, *rt);
            if d.norm() < 1e-300 {
                break; // multiple root; keep the Durand-Kerner value
            }
            *rt -= poly_eval(coeffs, *rt) / d;
        }
        // Snap near-origin artifacts so origin multiplicities are exact.
        if rt.norm() < 1e-10 {
            *rt = Complex64::new(0.0, 0.0);
        }
    }
    Ok(roots)
}
