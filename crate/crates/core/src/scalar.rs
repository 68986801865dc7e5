//! Scalar toolkit: Lambert W, nonlinearity descriptors and the envelope
//! `g(s) = s / f(s)` with its two monotone inverses.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
const HALLEY_MAX_ITER: usize = 50;

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let r = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * r / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = r / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

fn branch_point_series(p: f64) -> f64 {
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
}

/// Principal branch `W_0`, defined for `x >= -1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !(x >= -INV_E - 1e-15) {
        return Err(Error::OutOfDomain {
            what: "lambert_w0",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= -INV_E {
        return Ok(-1.0);
    }
    let guess = if x < -0.25 {
        branch_point_series((2.0 * (E * x + 1.0)).max(0.0).sqrt())
    } else if x < E {
        x.ln_1p() * 0.8
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, guess).max(-1.0))
}

/// Lower branch `W_{-1}`, defined for `-1/e <= x < 0`.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    if !(-INV_E - 1e-15..0.0).contains(&x) {
        return Err(Error::OutOfDomain {
            what: "lambert_wm1",
            value: x,
        });
    }
    if x <= -INV_E {
        return Ok(-1.0);
    }
    let guess = if x < -0.25 {
        branch_point_series(-(2.0 * (E * x + 1.0)).max(0.0).sqrt())
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, guess).min(-1.0))
}

/// One C¹ piece of a piecewise polynomial, valid from `knot` up to the next
/// knot (closed on the left). Coefficients are ascending in `t = s - knot`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub knot: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `e^s`
    Exp,
    /// `(1 + s)^p`
    Power(f64),
    /// `1 + s`
    Affine,
    /// `s - s^3`
    AllenCahn,
    /// Ascending coefficients.
    Polynomial(Vec<f64>),
    PiecewiseC1(Vec<Segment>),
    /// `1 + ln(1 + s)`
    LogOnePlus,
    /// `inner(clamp(s, lo, hi))`
    Truncated { inner: Box<Kind>, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    StrictlyConvex,
    Convex,
    NonConvex,
}

/// A scalar nonlinearity with the metadata the parameter machinery needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: Kind,
    convexity: Convexity,
    /// `f(s) >= c s` for some `c > 0`, i.e. `sup s/f(s) < inf`.
    superlinear: bool,
    /// `f(0) > 0` and `f` nondecreasing on `[0, inf)`.
    admissible: bool,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| k as f64 * a)
        .collect()
}

fn antiderivative_at(c: &[f64], t: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, &a)| acc * t + a / (k + 1) as f64)
        * t
}

fn trim(c: &[f64]) -> Vec<f64> {
    let mut v = c.to_vec();
    while v.len() > 1 && *v.last().unwrap() == 0.0 {
        v.pop();
    }
    v
}

/// Cauchy bound on the positive roots of a polynomial (0 for constants).
fn cauchy_bound(c: &[f64]) -> f64 {
    let c = trim(c);
    if c.len() < 2 {
        return 0.0;
    }
    let lead = *c.last().unwrap();
    1.0 + c[..c.len() - 1]
        .iter()
        .map(|a| (a / lead).abs())
        .fold(0.0, f64::max)
}

fn kind_eval(kind: &Kind, s: f64) -> (f64, f64, f64) {
    match kind {
        Kind::Exp => {
            let e = s.exp();
            (e, e, e)
        }
        Kind::Power(p) => {
            let b = 1.0 + s;
            (b.powf(*p), p * b.powf(p - 1.0), p * (p - 1.0) * b.powf(p - 2.0))
        }
        Kind::Affine => (1.0 + s, 1.0, 0.0),
        Kind::AllenCahn => (s - s * s * s, 1.0 - 3.0 * s * s, -6.0 * s),
        Kind::Polynomial(c) => {
            let d1 = derivative(c);
            let d2 = derivative(&d1);
            (horner(c, s), horner(&d1, s), horner(&d2, s))
        }
        Kind::PiecewiseC1(segs) => {
            let seg = segs
                .iter()
                .rev()
                .find(|g| s >= g.knot)
                .unwrap_or(&segs[0]);
            let t = s - seg.knot;
            let d1 = derivative(&seg.coeffs);
            let d2 = derivative(&d1);
            (horner(&seg.coeffs, t), horner(&d1, t), horner(&d2, t))
        }
        Kind::LogOnePlus => {
            let b = 1.0 + s;
            (1.0 + b.ln(), 1.0 / b, -1.0 / (b * b))
        }
        Kind::Truncated { inner, lo, hi } => {
            let c = s.clamp(*lo, *hi);
            let (v, d, dd) = kind_eval(inner, c);
            if s < *lo || s > *hi {
                (v, 0.0, 0.0)
            } else {
                (v, d, dd)
            }
        }
    }
}

fn kind_primitive(kind: &Kind, s: f64) -> f64 {
    match kind {
        Kind::Exp => s.exp_m1(),
        Kind::Power(p) => ((1.0 + s).powf(p + 1.0) - 1.0) / (p + 1.0),
        Kind::Affine => s + 0.5 * s * s,
        Kind::AllenCahn => 0.5 * s * s - 0.25 * s.powi(4),
        Kind::Polynomial(c) => antiderivative_at(c, s),
        Kind::PiecewiseC1(segs) => {
            let mut total = 0.0;
            for (i, g) in segs.iter().enumerate() {
                if s <= g.knot {
                    break;
                }
                let end = segs.get(i + 1).map_or(s, |n| n.knot.min(s));
                total += antiderivative_at(&g.coeffs, end - g.knot);
            }
            total
        }
        Kind::LogOnePlus => (1.0 + s) * (1.0 + s).ln(),
        Kind::Truncated { inner, lo, hi } => {
            let c = s.clamp(*lo, *hi);
            kind_primitive(inner, c) + kind_eval(inner, c).0 * (s - c)
        }
    }
}

fn kind_name(kind: &Kind) -> String {
    match kind {
        Kind::Exp => "exp".into(),
        Kind::Power(p) => format!("power:{p}"),
        Kind::Affine => "affine".into(),
        Kind::AllenCahn => "allen-cahn".into(),
        Kind::Polynomial(c) => {
            let parts: Vec<String> = c.iter().map(|a| a.to_string()).collect();
            format!("poly:{}", parts.join(","))
        }
        Kind::PiecewiseC1(segs) => format!("piecewise({} segments)", segs.len()),
        Kind::LogOnePlus => "log".into(),
        Kind::Truncated { inner, lo, hi } => format!("{}[{lo},{hi}]", kind_name(inner)),
    }
}

/// Classifies `f''` on `[0, upto]` by sampling; the tail beyond `upto` is
/// summarized by `tail_sign` (sign of `f''` for large `s`).
fn classify_samples(second: impl Fn(f64) -> f64, upto: f64, tail_sign: f64) -> Convexity {
    const N: usize = 4000;
    let tol = 1e-12;
    let mut zero_run = 0;
    let mut strict = true;
    for i in 0..=N {
        let s = upto * i as f64 / N as f64;
        let v = second(s);
        if v < -tol * (1.0 + s * s) {
            return Convexity::NonConvex;
        }
        if v.abs() <= tol * (1.0 + s * s) {
            zero_run += 1;
            if zero_run >= 2 {
                strict = false;
            }
        } else {
            zero_run = 0;
        }
    }
    if tail_sign < 0.0 {
        Convexity::NonConvex
    } else if tail_sign == 0.0 || !strict {
        Convexity::Convex
    } else {
        Convexity::StrictlyConvex
    }
}

/// Leading-coefficient sign of the second derivative of a polynomial.
fn tail_sign(c: &[f64]) -> f64 {
    let d2 = trim(&derivative(&derivative(c)));
    let lead = *d2.last().unwrap_or(&0.0);
    if lead > 0.0 {
        1.0
    } else if lead < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Nonlinearity {
    pub fn exp() -> Self {
        Nonlinearity {
            kind: Kind::Exp,
            convexity: Convexity::StrictlyConvex,
            superlinear: true,
            admissible: true,
        }
    }

    /// `(1 + s)^p`, `p >= 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Nonlinearity(format!("power exponent {p} must be >= 1")));
        }
        Ok(Nonlinearity {
            kind: Kind::Power(p),
            convexity: if p > 1.0 {
                Convexity::StrictlyConvex
            } else {
                Convexity::Convex
            },
            superlinear: true,
            admissible: true,
        })
    }

    pub fn affine() -> Self {
        Nonlinearity {
            kind: Kind::Affine,
            convexity: Convexity::Convex,
            superlinear: true,
            admissible: true,
        }
    }

    /// `s - s^3`; usable by Newton and the stability index only.
    pub fn allen_cahn() -> Self {
        Nonlinearity {
            kind: Kind::AllenCahn,
            convexity: Convexity::NonConvex,
            superlinear: false,
            admissible: false,
        }
    }

    /// `1 + ln(1 + s)`: admissible but sublinear.
    pub fn log_one_plus() -> Self {
        Nonlinearity {
            kind: Kind::LogOnePlus,
            convexity: Convexity::NonConvex,
            superlinear: false,
            admissible: true,
        }
    }

    /// Polynomial with ascending coefficients.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        let c = trim(coeffs);
        if c.is_empty() || c.iter().any(|a| !a.is_finite()) {
            return Err(Error::Nonlinearity("polynomial needs finite coefficients".into()));
        }
        let d1 = derivative(&c);
        let d2 = derivative(&d1);
        let reach = cauchy_bound(&d2).max(cauchy_bound(&d1)).max(cauchy_bound(&c)) + 1.0;
        let convexity = classify_samples(|s| horner(&d2, s), reach, tail_sign(&c));
        let lead = *c.last().unwrap();
        let admissible = c[0] > 0.0 && nondecreasing(|s| horner(&d1, s), reach, lead);
        let superlinear = admissible && c.len() >= 2;
        Ok(Nonlinearity {
            kind: Kind::Polynomial(c),
            convexity,
            superlinear,
            admissible,
        })
    }

    /// Piecewise polynomial, C¹ at every knot; the first knot must be 0.
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Nonlinearity("no segments".into()));
        }
        if segments[0].knot != 0.0 {
            return Err(Error::Nonlinearity("first knot must be 0".into()));
        }
        for w in segments.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if !(b.knot > a.knot) {
                return Err(Error::Nonlinearity("knots must increase".into()));
            }
            let t = b.knot - a.knot;
            let (va, da) = (horner(&a.coeffs, t), horner(&derivative(&a.coeffs), t));
            let (vb, db) = (horner(&b.coeffs, 0.0), horner(&derivative(&b.coeffs), 0.0));
            let scale = 1.0f64.max(va.abs()).max(da.abs());
            if (va - vb).abs() > 1e-12 * scale || (da - db).abs() > 1e-12 * scale {
                return Err(Error::Nonlinearity(format!(
                    "not C1 at knot {}: value {va} vs {vb}, slope {da} vs {db}",
                    b.knot
                )));
            }
        }
        let segments: Vec<Segment> = segments
            .into_iter()
            .map(|g| Segment {
                knot: g.knot,
                coeffs: trim(&g.coeffs),
            })
            .collect();
        let last = segments.last().unwrap();
        let reach = last.knot
            + cauchy_bound(&derivative(&derivative(&last.coeffs)))
                .max(cauchy_bound(&derivative(&last.coeffs)))
            + 1.0;
        let kind = Kind::PiecewiseC1(segments.clone());
        let convexity =
            classify_samples(|s| kind_eval(&kind, s).2, reach, tail_sign(&last.coeffs));
        let lead = *last.coeffs.last().unwrap();
        let admissible = segments[0].coeffs[0] > 0.0
            && nondecreasing(|s| kind_eval(&kind, s).1, reach, lead);
        let superlinear = admissible && last.coeffs.len() >= 2;
        Ok(Nonlinearity {
            kind,
            convexity,
            superlinear,
            admissible,
        })
    }

    /// Restricts the argument to `[lo, hi]`: values freeze and slopes vanish
    /// outside. The result is never admissible.
    pub fn truncated(&self, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || lo > 0.0 {
            return Err(Error::Nonlinearity(format!(
                "truncation interval [{lo}, {hi}] must contain 0 and be nondegenerate"
            )));
        }
        Ok(Nonlinearity {
            kind: Kind::Truncated {
                inner: Box::new(self.kind.clone()),
                lo,
                hi,
            },
            convexity: Convexity::NonConvex,
            superlinear: false,
            admissible: false,
        })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.convexity == Convexity::StrictlyConvex
    }

    pub fn is_superlinear(&self) -> bool {
        self.superlinear
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    pub fn name(&self) -> String {
        kind_name(&self.kind)
    }

    /// `(f(s), f'(s))`. Admissible kinds are defined on `s >= 0` only.
    pub fn evaluate(&self, s: f64) -> Result<(f64, f64)> {
        if self.admissible && s < 0.0 {
            return Err(Error::OutOfDomain {
                what: "nonlinearity",
                value: s,
            });
        }
        let (v, d, _) = kind_eval(&self.kind, s);
        if !v.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite("nonlinearity"));
        }
        Ok((v, d))
    }

    /// `(f, f', f'')` with admissible kinds continued below 0 by their
    /// tangent line at 0, which keeps iterates of the solvers well defined
    /// when they undershoot.
    pub fn eval_ext(&self, s: f64) -> (f64, f64, f64) {
        if self.admissible && s < 0.0 {
            let (v, d, _) = kind_eval(&self.kind, 0.0);
            (v + d * s, d, 0.0)
        } else {
            kind_eval(&self.kind, s)
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval_ext(s).0
    }

    pub fn slope(&self, s: f64) -> f64 {
        self.eval_ext(s).1
    }

    /// Primitive `F` with `F(0) = 0`, consistent with [`Nonlinearity::eval_ext`].
    pub fn primitive(&self, s: f64) -> f64 {
        if self.admissible && s < 0.0 {
            let (v, d, _) = kind_eval(&self.kind, 0.0);
            v * s + 0.5 * d * s * s
        } else {
            kind_primitive(&self.kind, s)
        }
    }

    /// `h(s) = f(s) - s f'(s)`; its root is the maximizer of `s/f(s)`.
    pub fn h(&self, s: f64) -> f64 {
        let (v, d, _) = self.eval_ext(s);
        v - s * d
    }

    /// `g(s) = s / f(s)`.
    pub fn g(&self, s: f64) -> f64 {
        s / self.value(s)
    }

    /// `f(s) = a + b s` exactly.
    pub fn is_affine(&self) -> bool {
        match &self.kind {
            Kind::Affine => true,
            Kind::Power(p) => *p == 1.0,
            Kind::Polynomial(c) => c.len() <= 2,
            Kind::PiecewiseC1(segs) => segs.len() == 1 && segs[0].coeffs.len() <= 2,
            _ => false,
        }
    }

    /// Slope of `f` for large `s` when `f` is eventually affine.
    fn asymptotic_slope(&self) -> Option<f64> {
        let last = match &self.kind {
            Kind::Affine => return Some(1.0),
            Kind::Power(p) if *p == 1.0 => return Some(1.0),
            Kind::Polynomial(c) => c.as_slice(),
            Kind::PiecewiseC1(segs) => segs.last().unwrap().coeffs.as_slice(),
            _ => return None,
        };
        (last.len() == 2).then(|| last[1])
    }
}

fn nondecreasing(slope: impl Fn(f64) -> f64, upto: f64, lead: f64) -> bool {
    const N: usize = 4000;
    lead >= 0.0
        && (0..=N).all(|i| {
            let s = upto * i as f64 / N as f64;
            slope(s) >= -1e-12 * (1.0 + s * s)
        })
}

impl FromStr for Nonlinearity {
    type Err = Error;

    /// Parses `exp`, `power:<p>`, `affine`, `allen-cahn`, `log` and
    /// `poly:<c0>,<c1>,...`. Piecewise specs need a file and are handled by
    /// [`crate::io::parse_nonlinearity`].
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let bad = |m: &str| Error::Nonlinearity(format!("{spec}: {m}"));
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("`{t}` is not a number")))
        };
        match (head, arg) {
            ("exp", None) => Ok(Nonlinearity::exp()),
            ("affine", None) => Ok(Nonlinearity::affine()),
            ("allen-cahn", None) => Ok(Nonlinearity::allen_cahn()),
            ("log", None) => Ok(Nonlinearity::log_one_plus()),
            ("power", Some(p)) => Nonlinearity::power(num(p)?),
            ("poly", Some(list)) => {
                let c = list.split(',').map(num).collect::<Result<Vec<_>>>()?;
                Nonlinearity::polynomial(&c)
            }
            ("piecewise", _) => Err(bad("piecewise nonlinearities are read from a file")),
            _ => Err(bad("unknown nonlinearity")),
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Bisection for an increasing predicate crossing: returns the point where
/// `phi` changes sign on `[lo, hi]`, assuming `phi(lo) <= 0 <= phi(hi)`.
fn bisect(mut lo: f64, mut hi: f64, phi: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * hi.abs().max(1e-300) {
            break;
        }
        if phi(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizer `s0` of `s/f(s)` together with the two branch inverses of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub s0: f64,
    pub lambda_cap: f64,
    f: Nonlinearity,
}

impl Envelope {
    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.f
    }

    fn check(&self, lambda: f64) -> Result<()> {
        if !(lambda > 0.0) || lambda > self.lambda_cap * (1.0 + 1e-14) {
            return Err(Error::OutOfDomain {
                what: "envelope parameter",
                value: lambda,
            });
        }
        Ok(())
    }

    /// Increasing branch: the solution of `s/f(s) = lambda` in `[0, s0]`.
    pub fn g1_inv(&self, lambda: f64) -> Result<f64> {
        self.check(lambda)?;
        if lambda >= self.lambda_cap {
            return Ok(self.s0);
        }
        if self.f.kind == Kind::Exp {
            return Ok(-lambert_w0(-lambda)?);
        }
        Ok(bisect(0.0, self.s0, |s| self.f.g(s) - lambda, 1e-15))
    }

    /// Decreasing branch: the solution of `s/f(s) = lambda` in `[s0, inf)`.
    pub fn g2_inv(&self, lambda: f64) -> Result<f64> {
        self.check(lambda)?;
        if lambda >= self.lambda_cap {
            return Ok(self.s0);
        }
        if self.f.kind == Kind::Exp {
            return Ok(-lambert_wm1(-lambda)?);
        }
        let mut hi = 2.0 * self.s0;
        while self.f.g(hi) > lambda {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NonFinite("envelope inverse"));
            }
        }
        Ok(bisect(self.s0, hi, |s| lambda - self.f.g(s), 1e-15))
    }
}

/// Root of `h = f - s f'` for a strictly convex, superlinear, admissible `f`.
pub fn critical_s0(f: &Nonlinearity) -> Result<Envelope> {
    if !f.is_admissible() {
        return Err(Error::NotAdmissible(f.name()));
    }
    if !f.is_strictly_convex() {
        return Err(Error::NotStrictlyConvex);
    }
    let (s0, cap) = match f.kind {
        Kind::Exp => (1.0, INV_E),
        Kind::Power(p) => {
            let s0 = 1.0 / (p - 1.0);
            (s0, s0 / f.value(s0))
        }
        _ => {
            if f.h(0.0) <= 0.0 {
                return Err(Error::NoCriticalPoint);
            }
            let mut hi = 1.0;
            while f.h(hi) > 0.0 {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::NoCriticalPoint);
                }
            }
            let s0 = bisect(0.0, hi, |s| -f.h(s), 1e-13);
            (s0, s0 / f.value(s0))
        }
    };
    Ok(Envelope {
        s0,
        lambda_cap: cap,
        f: f.clone(),
    })
}

/// `(g1_inv(lambda), g2_inv(lambda))`: every solution of the Gelfand problem
/// at `lambda` lies between these two levels.
pub fn envelope_bounds(e: &Envelope, lambda: f64) -> Result<(f64, f64)> {
    Ok((e.g1_inv(lambda)?, e.g2_inv(lambda)?))
}

pub fn lambda_star_upper_bound(e: &Envelope, lam_m: f64) -> f64 {
    lam_m * e.lambda_cap
}

/// `sup_{s > 0} s / f(s)` and, when attained, a maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupG {
    pub value: f64,
    pub argmax: Option<f64>,
}

/// Supremum of `s/f(s)` for any admissible `f`. Closed forms where known,
/// otherwise a logarithmic scan refined by golden-section search.
pub fn sup_g(f: &Nonlinearity) -> Result<SupG> {
    if !f.is_admissible() {
        return Err(Error::NotAdmissible(f.name()));
    }
    if !f.is_superlinear() {
        return Err(Error::Unbounded);
    }
    if let Ok(e) = critical_s0(f) {
        return Ok(SupG {
            value: e.lambda_cap,
            argmax: Some(e.s0),
        });
    }
    let limit = f.asymptotic_slope().map(|c| 1.0 / c);
    const PER_DECADE: usize = 200;
    let (lo_exp, hi_exp) = (-8.0, 8.0);
    let n = ((hi_exp - lo_exp) * PER_DECADE as f64) as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / n as f64))
        .collect();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &s) in grid.iter().enumerate() {
        let v = f.g(s);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    if best_i == n {
        return match limit {
            Some(l) => Ok(SupG {
                value: l,
                argmax: None,
            }),
            None => Err(Error::Unbounded),
        };
    }
    let (mut a, mut b) = (grid[best_i.saturating_sub(1)], grid[(best_i + 1).min(n)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        if b - a <= 1e-14 * b {
            break;
        }
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f.g(c) >= f.g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let s = 0.5 * (a + b);
    let value = f.g(s);
    match limit {
        Some(l) if l >= value => Ok(SupG {
            value: l,
            argmax: None,
        }),
        _ => Ok(SupG {
            value,
            argmax: Some(s),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(w: f64, x: f64) -> f64 {
        (w * w.exp() - x).abs()
    }

    #[test]
    fn lambert_special_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(-INV_E).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_wm1(-INV_E).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_wm1(-2.0 * (-2.0f64).exp()).unwrap() + 2.0).abs() < 1e-13);
    }

    #[test]
    fn lambert_wm1_against_bisection() {
        let x = -0.1;
        let w = lambert_wm1(x).unwrap();
        assert!(w < -1.0);
        assert!(residual(w, x) <= 1e-14);
        // w e^w is increasing on (-inf, -1) toward... decreasing in w there
        let oracle = bisect(-50.0, -1.0, |t| x - t * t.exp(), 1e-16);
        assert!((w - oracle).abs() < 1e-12);
    }

    #[test]
    fn lambert_domain_errors() {
        assert!(lambert_w0(-0.5).is_err());
        assert!(lambert_wm1(0.0).is_err());
        assert!(lambert_wm1(0.1).is_err());
        assert!(lambert_wm1(-0.5).is_err());
    }

    #[test]
    fn lambert_residual_contract() {
        for i in 0..2000 {
            let x = -INV_E + 1e-12 + (i as f64 / 2000.0).powi(3) * 50.0;
            let w = lambert_w0(x).unwrap();
            assert!(residual(w, x) <= 1e-14 * x.abs().max(1.0), "w0 {x}");
            if x < 0.0 {
                let w = lambert_wm1(x).unwrap();
                assert!(residual(w, x) <= 1e-14, "wm1 {x}");
            }
        }
        let w = lambert_wm1(-1e-200).unwrap();
        assert!(residual(w, -1e-200) <= 1e-14);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(Nonlinearity::exp().evaluate(0.0).unwrap(), (1.0, 1.0));
        let q = Nonlinearity::polynomial(&[1.0, 36.0, 24.0, -10.0, 1.0]).unwrap();
        assert_eq!(q.evaluate(0.0).unwrap(), (1.0, 36.0));
        assert!(Nonlinearity::exp().evaluate(-1.0).is_err());
        assert!(Nonlinearity::allen_cahn().evaluate(-1.0).is_ok());
    }

    fn example_piecewise() -> Nonlinearity {
        Nonlinearity::piecewise(vec![
            Segment {
                knot: 0.0,
                coeffs: vec![1.0, 0.0, 1.0],
            },
            Segment {
                knot: 1.0,
                coeffs: vec![2.0, 2.0],
            },
            Segment {
                knot: 2.0,
                coeffs: vec![4.0, 2.0, 1.0],
            },
        ])
        .unwrap()
    }

    #[test]
    fn piecewise_dispatch_and_c1_check() {
        let f = example_piecewise();
        assert_eq!(f.evaluate(1.5).unwrap(), (3.0, 2.0));
        assert_eq!(f.evaluate(1.0).unwrap(), (2.0, 2.0));
        assert_eq!(f.evaluate(3.0).unwrap(), (7.0, 4.0));
        assert_eq!(f.convexity(), Convexity::Convex);
        assert!(f.is_admissible() && f.is_superlinear());
        let jump = Nonlinearity::piecewise(vec![
            Segment {
                knot: 0.0,
                coeffs: vec![1.0, 2.0],
            },
            Segment {
                knot: 2.0,
                coeffs: vec![2.0, 2.0, 1.0],
            },
        ]);
        assert!(matches!(jump, Err(Error::Nonlinearity(_))));
    }

    #[test]
    fn primitives_match_quadrature() {
        let kinds = [
            Nonlinearity::exp(),
            Nonlinearity::power(2.5).unwrap(),
            Nonlinearity::affine(),
            Nonlinearity::allen_cahn(),
            Nonlinearity::log_one_plus(),
            Nonlinearity::polynomial(&[1.0, 36.0, 24.0, -10.0, 1.0]).unwrap(),
            example_piecewise(),
        ];
        for f in &kinds {
            for &s in &[0.3, 1.0, 1.7, 2.9] {
                let n = 20000;
                let h = s / n as f64;
                // composite Simpson
                let mut acc = f.value(0.0) + f.value(s);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * f.value(i as f64 * h);
                }
                let quad = acc * h / 3.0;
                assert!((quad - f.primitive(s)).abs() < 1e-9 * quad.abs().max(1.0), "{f} {s}");
            }
        }
    }

    #[test]
    fn convexity_classes() {
        assert_eq!(Nonlinearity::exp().convexity(), Convexity::StrictlyConvex);
        assert_eq!(
            Nonlinearity::polynomial(&[1.0, 36.0, 24.0, -10.0, 1.0])
                .unwrap()
                .convexity(),
            Convexity::NonConvex
        );
        let sq = Nonlinearity::polynomial(&[1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sq.convexity(), Convexity::StrictlyConvex);
        assert_eq!(
            Nonlinearity::polynomial(&[1.0, 1.0]).unwrap().convexity(),
            Convexity::Convex
        );
        assert!(!Nonlinearity::polynomial(&[1.0, -1.0, 1.0]).unwrap().is_admissible());
    }

    #[test]
    fn critical_points() {
        let e = critical_s0(&Nonlinearity::exp()).unwrap();
        assert_eq!((e.s0, e.lambda_cap), (1.0, INV_E));
        let e = critical_s0(&Nonlinearity::power(2.0).unwrap()).unwrap();
        assert_eq!((e.s0, e.lambda_cap), (1.0, 0.25));
        assert_eq!(
            critical_s0(&Nonlinearity::affine()).unwrap_err(),
            Error::NotStrictlyConvex
        );
        let f = Nonlinearity::polynomial(&[1.0, 0.0, 1.0]).unwrap();
        let e = critical_s0(&f).unwrap();
        assert!((e.s0 - 1.0).abs() < 1e-12);
        assert!(f.h(e.s0).abs() < 1e-10);
        assert_eq!(sup_g(&Nonlinearity::affine()).unwrap().value, 1.0);
        assert_eq!(sup_g(&Nonlinearity::log_one_plus()), Err(Error::Unbounded));
    }

    #[test]
    fn envelope_bounds_examples() {
        let e = critical_s0(&Nonlinearity::exp()).unwrap();
        let (lo, hi) = envelope_bounds(&e, INV_E).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        let lam = 0.5 * INV_E;
        let (lo, hi) = envelope_bounds(&e, lam).unwrap();
        let oracle = bisect(0.0, 1.0, |s| s * (-s).exp() - lam, 1e-16);
        assert!((lo - oracle).abs() < 1e-13);
        assert!(format!("{lo:.4}") == "0.2320");
        assert!((hi * (-hi).exp() - lam).abs() < 1e-15 && hi > 1.0);
        assert!(envelope_bounds(&e, 0.0).is_err());
        assert!(envelope_bounds(&e, 0.5).is_err());

        let p2 = critical_s0(&Nonlinearity::power(2.0).unwrap()).unwrap();
        let (lo, hi) = envelope_bounds(&p2, 0.125).unwrap();
        assert!(lo <= 1.0 && 1.0 <= hi);
        assert!((lambda_star_upper_bound(&p2, 0.5) - 0.125).abs() < 1e-16);
        assert!((lambda_star_upper_bound(&e, 0.5) - 0.5 * INV_E).abs() < 1e-16);
    }

    #[test]
    fn quartic_supremum() {
        let q = Nonlinearity::polynomial(&[1.0, 36.0, 24.0, -10.0, 1.0]).unwrap();
        let s = sup_g(&q).unwrap();
        let arg = s.argmax.unwrap();
        assert!(q.h(arg).abs() < 1e-6 * q.value(arg));
        for i in 1..10000 {
            let t = i as f64 * 1e-3;
            assert!(q.g(t) <= s.value + 1e-15);
        }
    }

    #[test]
    fn spec_strings() {
        for (spec, name) in [
            ("exp", "exp"),
            ("power:2", "power:2"),
            ("affine", "affine"),
            ("allen-cahn", "allen-cahn"),
            ("log", "log"),
            ("poly:1,36,24,-10,1", "poly:1,36,24,-10,1"),
        ] {
            assert_eq!(spec.parse::<Nonlinearity>().unwrap().name(), name);
        }
        assert!("power:x".parse::<Nonlinearity>().is_err());
        assert!("bogus".parse::<Nonlinearity>().is_err());
        assert!("power:0.5".parse::<Nonlinearity>().is_err());
    }
}
