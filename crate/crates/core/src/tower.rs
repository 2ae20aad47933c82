//! Extended-range real arithmetic: a value is stored as (level, mantissa)
//! meaning `exp` applied `level` times to `mantissa`. This makes quantities
//! like exp^[q](t) or e^{r^2} at r = 10^4 exactly manipulable.

use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Normalization bound B. Level-0 mantissas satisfy |m| <= B, level >= 1
/// mantissas lie in (ln B, B]. Keeps mantissas where double-precision
/// log/exp stay accurate; the half-open ranges tile, so (level, mantissa)
/// in lexicographic order is a total order on positive values.
pub const NORMALIZATION_BOUND: f64 = 1e15;
const B: f64 = NORMALIZATION_BOUND;
const LN_B: f64 = 34.538776394910684; // (1e15f64).ln(), asserted in tests

const LN_F64_MAX: f64 = 709.782712893384;

/// Extended-range positive real (negatives representable at level 0 only).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TowerReal {
    level: u32,
    mantissa: f64,
}

fn normalize(mut level: u32, mut m: f64) -> TowerReal {
    debug_assert!(m.is_finite(), "tower mantissa must be finite");
    loop {
        if m > B {
            m = m.ln();
            level += 1;
        } else if level >= 1 && m <= LN_B {
            // Drop a level only when the result provably stays in bounds,
            // so boundary rounding cannot ping-pong.
            let e = m.exp();
            if e <= B {
                m = e;
                level -= 1;
            } else {
                break;
            }
        } else {
            break;
        }
    }
    TowerReal { level, mantissa: m }
}

impl TowerReal {
    /// Wrap a plain float. Panics on non-finite input (programmer error);
    /// use `try_new` for untrusted values.
    pub fn new(x: f64) -> Self {
        assert!(x.is_finite(), "TowerReal::new requires a finite value");
        normalize(0, x)
    }

    pub fn try_new(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(normalize(0, x))
        } else {
            Err(Error::Domain(format!("non-finite value {x}")))
        }
    }

    /// Construct from explicit (level, mantissa); the pair is normalized.
    pub fn from_parts(level: u32, mantissa: f64) -> Result<Self> {
        if mantissa.is_finite() {
            Ok(normalize(level, mantissa))
        } else {
            Err(Error::Domain(format!("non-finite mantissa {mantissa}")))
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn is_positive(&self) -> bool {
        self.level >= 1 || self.mantissa > 0.0
    }

    /// Reduce to a plain float, or Overflow when the value exceeds range.
    pub fn to_float(&self) -> Result<f64> {
        match self.level {
            0 => Ok(self.mantissa),
            1 if self.mantissa <= LN_F64_MAX => Ok(self.mantissa.exp()),
            _ => Err(Error::Overflow(format!(
                "tower value {self} exceeds float range"
            ))),
        }
    }

    /// k-fold exponential; pure level arithmetic, always representable.
    pub fn iter_exp(&self, k: u32) -> Self {
        normalize(self.level + k, self.mantissa)
    }

    /// k-fold natural logarithm. Every one of the k successive results must
    /// be strictly positive or the input is out of domain: each level's log
    /// must exist and the caller's contract is a positive chain, so e.g.
    /// a 1-fold log of 0.5 is rejected even though ln 0.5 is defined.
    /// Negative k delegates to `iter_exp`.
    pub fn iter_log(&self, k: i32) -> Result<Self> {
        if k < 0 {
            return Ok(self.iter_exp(k.unsigned_abs()));
        }
        let mut y = *self;
        for _ in 0..k {
            y = log_once(&y)?;
            if !y.is_positive() {
                return Err(Error::Domain(format!(
                    "iterated log reached the non-positive value {y}"
                )));
            }
        }
        Ok(y)
    }

    /// x^a via exp(a ln x) in level arithmetic; exact mantissa handling for
    /// level >= 1 inputs.
    pub fn t_pow(&self, a: f64) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::Domain(format!("t_pow of non-positive {self}")));
        }
        if !a.is_finite() {
            return Err(Error::Domain(format!("non-finite exponent {a}")));
        }
        if a == 0.0 {
            return Ok(TowerReal::new(1.0));
        }
        if a == 1.0 {
            return Ok(*self);
        }
        let l = log_once(self)?;
        Ok(mul_scalar(&l, a)?.iter_exp(1))
    }

    pub fn t_mul(&self, other: &Self) -> Result<Self> {
        if self.level == 0 && other.level == 0 {
            // |m| <= B each, so the product is finite.
            return Ok(TowerReal::new(self.mantissa * other.mantissa));
        }
        if !self.is_positive() || !other.is_positive() {
            return Err(Error::Domain(
                "t_mul requires positive operands at level >= 1".into(),
            ));
        }
        // Log-domain addition one level down.
        let a = log_once(self)?;
        let b = log_once(other)?;
        Ok(t_add_inner(&a, &b)?.iter_exp(1))
    }

    pub fn t_add(&self, other: &Self) -> Result<Self> {
        if (self.level >= 1 || other.level >= 1)
            && (!self.is_positive() || !other.is_positive())
        {
            return Err(Error::Domain(
                "t_add requires positive operands at level >= 1".into(),
            ));
        }
        t_add_inner(self, other)
    }

    /// x / y for positive operands, level-aware. Ratios that underflow the
    /// representable range come back as exact zero.
    pub fn t_div(&self, other: &Self) -> Result<Self> {
        if !self.is_positive() || !other.is_positive() {
            return Err(Error::Domain("t_div requires positive operands".into()));
        }
        if self.level == 0 && other.level == 0 {
            let q = self.mantissa / other.mantissa;
            if q.is_finite() {
                return Ok(TowerReal::new(q));
            }
            return Err(Error::Overflow("quotient exceeds float range".into()));
        }
        let lx = log_once(self)?;
        let ly = log_once(other)?;
        let d = sub_towers(&lx, &ly)?;
        match d {
            SubResult::Value(t) => Ok(t.iter_exp(1)),
            SubResult::NegativeHuge => Ok(TowerReal::new(0.0)),
        }
    }

    pub fn t_cmp(&self, other: &Self) -> Ordering {
        match (self.level, other.level) {
            (0, 0) => self
                .mantissa
                .partial_cmp(&other.mantissa)
                .expect("mantissas are finite"),
            // Normalized level >= 1 values exceed B, level-0 values do not.
            (0, _) => Ordering::Less,
            (_, 0) => Ordering::Greater,
            (a, b) if a != b => a.cmp(&b),
            _ => self
                .mantissa
                .partial_cmp(&other.mantissa)
                .expect("mantissas are finite"),
        }
    }
}

fn log_once(x: &TowerReal) -> Result<TowerReal> {
    if x.level >= 1 {
        return Ok(normalize(x.level - 1, x.mantissa));
    }
    if x.mantissa <= 0.0 {
        return Err(Error::Domain(format!("log of non-positive {}", x.mantissa)));
    }
    Ok(TowerReal::new(x.mantissa.ln()))
}

/// a * x for a plain scalar a.
fn mul_scalar(x: &TowerReal, a: f64) -> Result<TowerReal> {
    if x.level == 0 {
        let p = a * x.mantissa;
        if p.is_finite() {
            return Ok(TowerReal::new(p));
        }
        return Err(Error::Overflow("scalar product exceeds float range".into()));
    }
    if a == 0.0 {
        return Ok(TowerReal::new(0.0));
    }
    if a < 0.0 {
        return Err(Error::Overflow(
            "negative multiple of a huge tower value is not representable".into(),
        ));
    }
    // ln(a x) = ln a + ln x, with ln x one exact level down.
    let lx = log_once(x)?;
    Ok(add_f64(&lx, a.ln())?.iter_exp(1))
}

/// x + c for a plain float c; x at any level. For huge x the addend enters
/// through ln(x + c) = ln x + ln1p(c e^{-ln x}) and is absorbed once its
/// relative contribution falls below representable precision.
fn add_f64(x: &TowerReal, c: f64) -> Result<TowerReal> {
    if x.level == 0 {
        let s = x.mantissa + c;
        if s.is_finite() {
            return Ok(TowerReal::new(s));
        }
        return Err(Error::Overflow("sum exceeds float range".into()));
    }
    if x.level >= 2 {
        // Value exceeds e^B; any float addend is below 1e-16 relative.
        return Ok(*x);
    }
    let m = x.mantissa; // value = e^m, m in (ln B, B]
    let scaled = if m <= LN_F64_MAX { c * (-m).exp() } else { 0.0 };
    if scaled <= -1.0 {
        return Err(Error::Domain(
            "tower addition drove a positive value non-positive".into(),
        ));
    }
    Ok(normalize(1, m + scaled.ln_1p()))
}

fn t_add_inner(x: &TowerReal, y: &TowerReal) -> Result<TowerReal> {
    if x.level == 0 && y.level == 0 {
        let s = x.mantissa + y.mantissa;
        if s.is_finite() {
            return Ok(TowerReal::new(s));
        }
        return Err(Error::Overflow("sum exceeds float range".into()));
    }
    if x.level == 0 {
        return add_f64(y, x.mantissa);
    }
    if y.level == 0 {
        return add_f64(x, y.mantissa);
    }
    // Both huge. big * (1 + small/big); the ratio underflows to 0 unless
    // the operands are close.
    let (big, small) = if x.t_cmp(y) == Ordering::Less {
        (y, x)
    } else {
        (x, y)
    };
    let q = big.t_div(small).err_context_swap()?; // small/big <= 1
    let q = match q {
        Some(v) => v,
        None => return Ok(*big),
    };
    mul_scalar(big, 1.0 + q)
}

// Helper so t_add_inner can call t_div on (small, big) without recursing
// through the public positivity checks twice; returns the level-0 ratio
// as a float when representable, None when it underflowed to zero.
trait RatioExt {
    fn err_context_swap(self) -> Result<Option<f64>>;
}
impl RatioExt for Result<TowerReal> {
    fn err_context_swap(self) -> Result<Option<f64>> {
        // t_div was called as big.t_div(small); invert to small/big.
        let t = self?;
        match t.to_float() {
            Ok(v) if v > 0.0 => Ok(Some(1.0 / v)),
            Ok(_) => Ok(None),
            Err(_) => Ok(None), // big/small overflowed; small/big is ~0
        }
    }
}

enum SubResult {
    Value(TowerReal),
    /// x - y with y >> x beyond float range: a negative value too large in
    /// magnitude to represent; callers map it to underflow.
    NegativeHuge,
}

/// x - y where at least one operand has level >= 1 (both positive).
fn sub_towers(x: &TowerReal, y: &TowerReal) -> Result<SubResult> {
    if x.level == 0 && y.level == 0 {
        return Ok(SubResult::Value(TowerReal::new(x.mantissa - y.mantissa)));
    }
    match x.t_cmp(y) {
        Ordering::Equal => Ok(SubResult::Value(TowerReal::new(0.0))),
        Ordering::Less => {
            // -(y - x): representable only if y - x fits a float.
            match sub_towers(y, x)? {
                SubResult::Value(t) => match t.to_float() {
                    Ok(v) => Ok(SubResult::Value(TowerReal::new(-v))),
                    Err(_) => Ok(SubResult::NegativeHuge),
                },
                SubResult::NegativeHuge => unreachable!("y > x here"),
            }
        }
        Ordering::Greater => {
            if y.level == 0 {
                return Ok(SubResult::Value(add_f64(x, -y.mantissa)?));
            }
            if x.level > y.level {
                // y/x < e^-B: absorbed entirely.
                return Ok(SubResult::Value(*x));
            }
            // Same level l >= 1, mantissa_x > mantissa_y.
            if x.level == 1 {
                let (mx, my) = (x.mantissa, y.mantissa);
                // e^mx - e^my = e^mx (1 - e^{my-mx})
                let f = (my - mx).exp();
                if f >= 1.0 {
                    return Err(Error::Domain(
                        "subtraction of nearly equal huge values".into(),
                    ));
                }
                return Ok(SubResult::Value(normalize(1, mx + (-f).ln_1p())));
            }
            // Level >= 2: mantissas differ, the smaller is below relative
            // precision of the larger.
            Ok(SubResult::Value(*x))
        }
    }
}

impl PartialEq for TowerReal {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.mantissa == other.mantissa
    }
}
impl Eq for TowerReal {}

impl PartialOrd for TowerReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TowerReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t_cmp(other)
    }
}

impl std::fmt::Display for TowerReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "exp^[{}]({})", self.level, self.mantissa)
        }
    }
}

impl From<f64> for TowerReal {
    fn from(x: f64) -> Self {
        TowerReal::new(x)
    }
}
