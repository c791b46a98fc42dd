//! Closed forms along the antiferromagnetic critical curve: Beraha numbers,
//! loop weights, conformal weights, amplitudes, and the transition loci they
//! imply.

use crate::algebra::{QsRelation, Scalar};
use crate::error::{Error, Result};
use crate::graphs::Lattice;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Endpoint of the antiferromagnetic regime on the chromatic line, square lattice.
pub const QC_SQUARE: f64 = 3.0;
/// Same for the triangular lattice.
pub const QC_TRIANGULAR: f64 = 3.8196717312;

pub fn qc(lattice: Lattice) -> f64 {
    match lattice {
        Lattice::Square => QC_SQUARE,
        Lattice::Triangular => QC_TRIANGULAR,
    }
}

/// `B_t = 4 cos^2(pi / t)`.
pub fn beraha(t: f64) -> f64 {
    let c = (PI / t).cos();
    4.0 * c * c
}

const POLE_EPS: f64 = 1e-13;

/// Bulk and boundary loop weights `(n, n_s)` at `(t, r)`.
pub fn loop_weights(t: f64, r: f64) -> Result<(f64, f64)> {
    let n = -2.0 * (PI / t).cos();
    let a = r * (t - 1.0) * PI / t;
    let den = a.sin();
    if den.abs() < POLE_EPS {
        return Err(Error::Pole(format!("n_s has a pole at t={t}, r={r}")));
    }
    Ok((n, -(a - PI / t).sin() / den))
}

/// `Qs = n * n_s`.
pub fn boundary_weight(t: f64, r: f64) -> Result<f64> {
    let (n, ns) = loop_weights(t, r)?;
    Ok(n * ns)
}

/// Point `(t, r)` on the critical curve with its derived weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CftParams {
    pub t: f64,
    pub r: f64,
    pub n: f64,
    pub ns: f64,
    pub q: f64,
    pub qs: f64,
}

impl CftParams {
    pub fn new(t: f64, r: f64) -> Result<Self> {
        if t <= 2.0 {
            return Err(Error::InvalidSpec(format!("need t > 2, got {t}")));
        }
        let (n, ns) = loop_weights(t, r)?;
        Ok(CftParams {
            t,
            r,
            n,
            ns,
            q: n * n,
            qs: n * ns,
        })
    }

    pub fn e0(&self) -> f64 {
        1.0 - 1.0 / self.t
    }
}

pub fn central_charge(e0: f64) -> Result<f64> {
    if (1.0 - e0).abs() < 1e-15 {
        return Err(Error::Pole("central charge diverges at e0 = 1".into()));
    }
    if !(0.0..1.0).contains(&e0) {
        return Err(Error::InvalidSpec(format!("e0 = {e0} outside [0, 1)")));
    }
    Ok(1.0 - 6.0 * e0 * e0 / (1.0 - e0))
}

/// Coupling on the critical curve at parameter `e0`.
pub fn critical_v(lattice: Lattice, e0: f64) -> Result<f64> {
    match lattice {
        Lattice::Square if (0.0..=1.0).contains(&e0) => Ok(2.0 * (PI * e0).cos()),
        Lattice::Triangular if (0.0..=1.5).contains(&e0) => Ok(-1.0 + 2.0 * (2.0 * PI * e0 / 3.0).cos()),
        _ => Err(Error::InvalidSpec(format!("e0 = {e0} outside the {lattice} range"))),
    }
}

/// `h_L = (L^2 - 2 r L (t-1) + (r^2 - 1)(t-1)^2) / (4t)`.
pub fn conformal_weight(t: f64, r: f64, l: u32) -> f64 {
    let l = l as f64;
    let s = t - 1.0;
    (l * l - 2.0 * r * l * s + (r * r - 1.0) * s * s) / (4.0 * t)
}

/// Amplitude of the dominant `L`-leg eigenvalue as a polynomial in `(q, qs)`:
/// `D_0 = 1`, and for `L = 2m`, `D_L = qs * O_{m-1} - E_{m-1}` where
/// `E_k = U_{2k}(n/2)` and `O_k = U_{2k+1}(n/2) / n` are polynomials in `q = n^2`.
pub fn amplitude_d<T: Scalar>(l: u32, q: &T, qs: &T) -> T {
    assert!(l.is_multiple_of(2), "L must be even");
    if l == 0 {
        return T::one();
    }
    let mut e = T::one();
    let mut o = T::one();
    for _ in 1..l / 2 {
        let e_next = q.clone() * o.clone() - e;
        o = e_next.clone() - o;
        e = e_next;
    }
    qs.clone() * o - e
}

/// Amplitude of the leading eigenvalue in the sector where the outermost
/// winding cluster never touches the rim: `D_L` with `qs` replaced by `q - qs`.
pub fn amplitude_d_unblobbed<T: Scalar>(l: u32, q: &T, qs: &T) -> T {
    amplitude_d(l, q, &(q.clone() - qs.clone()))
}

/// Solves `n * n_s(t, r) = rel(B_t)` for `r` in `(0, t/(t-1))`.
///
/// `Qs(t, r) = -n cos(pi/t) + n sin(pi/t) cot(a)` with `a = r (t-1) pi / t`
/// is strictly increasing in `r` on that interval, so the root is unique and
/// is found by inverting the cotangent.
pub fn solve_r(t: f64, rel: &QsRelation) -> Result<f64> {
    if t <= 2.0 {
        return Err(Error::InvalidSpec(format!("need t > 2, got {t}")));
    }
    let q = beraha(t);
    let target = rel.eval_f64(q);
    if !target.is_finite() {
        return Err(Error::NoRoot(format!("relation is not finite at Q = {q}")));
    }
    let th = PI / t;
    let n = -2.0 * th.cos();
    let cot = (target + n * th.cos()) / (n * th.sin());
    let a = (1.0f64).atan2(cot);
    Ok(a * t / ((t - 1.0) * PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocusKind {
    /// Level crossing of two dominant sectors: part of an equimodular curve.
    CurveCrossing,
    /// Vanishing amplitude of the unique dominant sector.
    IsolatedPoint,
}

impl LocusKind {
    pub fn for_s(s: u32) -> Self {
        if s % 2 == 1 {
            LocusKind::CurveCrossing
        } else {
            LocusKind::IsolatedPoint
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionLocus {
    pub t: f64,
    pub r: f64,
    pub s: u32,
    #[serde(rename = "L")]
    pub l: u32,
    pub kind: LocusKind,
    #[serde(rename = "Q")]
    pub q: f64,
    /// `None` when `n_s` has a pole.
    #[serde(rename = "Qs", with = "infinite_as_string")]
    pub qs: Option<f64>,
    pub h: f64,
    /// Set on the `s = t` edge where the crossing bound is saturated.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub boundary: bool,
}

mod infinite_as_string {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => x.serialize(s),
            None => s.serialize_str("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum V {
            Num(f64),
            Str(String),
        }
        match V::deserialize(d)? {
            V::Num(x) => Ok(Some(x)),
            V::Str(s) if s == "inf" => Ok(None),
            V::Str(s) => Err(serde::de::Error::custom(format!("bad Qs `{s}`"))),
        }
    }
}

/// `h` at the locus: `(2 - t)/4` for crossings, `-(t-1)^2/(4t)` for zeros.
pub fn locus_h(t: f64, kind: LocusKind) -> f64 {
    match kind {
        LocusKind::CurveCrossing => (2.0 - t) / 4.0,
        LocusKind::IsolatedPoint => -(t - 1.0) * (t - 1.0) / (4.0 * t),
    }
}

fn locus(t: f64, s: u32, qs: Option<f64>) -> TransitionLocus {
    let kind = LocusKind::for_s(s);
    let l = match kind {
        LocusKind::CurveCrossing => s - 1,
        LocusKind::IsolatedPoint => s,
    };
    TransitionLocus {
        t,
        r: s as f64 / (t - 1.0),
        s,
        l,
        kind,
        q: beraha(t),
        qs,
        h: locus_h(t, kind),
        boundary: (s as f64 - t).abs() < 1e-9,
    }
}

/// Whether a locus is visible on a strip of width `w`: crossings need both
/// sectors `L` and `L + 2`, amplitude zeros need sector `L`.
pub fn visible_at_width(l: &TransitionLocus, w: usize) -> bool {
    let w2 = 2 * w as u32;
    match l.kind {
        LocusKind::CurveCrossing => l.l + 2 <= w2,
        LocusKind::IsolatedPoint => l.l <= w2,
    }
}

/// Loci at fixed `t`: `r = s/(t-1)` for `s = 1, 2, ...` up to `t`.
pub fn predict_fixed_t(t: f64, width: Option<usize>) -> Vec<TransitionLocus> {
    let mut out = Vec::new();
    let mut s = 1u32;
    while s as f64 <= t + 1e-9 {
        let r = s as f64 / (t - 1.0);
        let qs = boundary_weight(t, r).ok();
        let l = locus(t, s, qs);
        if width.is_none_or(|w| visible_at_width(&l, w)) {
            out.push(l);
        }
        s += 1;
    }
    out
}

/// Loci along a relation: for each `s`, the values of `t` in `(t_min, t_max)`
/// where `solve_r(t, rel) = s/(t-1)`.
pub fn predict_loci(rel: &QsRelation, t_min: f64, t_max: f64, width: Option<usize>) -> Result<Vec<TransitionLocus>> {
    let t_min = t_min.max(2.0 + 1e-9);
    if t_max <= t_min {
        return Ok(Vec::new());
    }
    let g = |t: f64, s: u32| -> f64 {
        match solve_r(t, rel) {
            Ok(r) => r * (t - 1.0) - s as f64,
            Err(_) => f64::NAN,
        }
    };
    let steps = (((t_max - t_min) * 2000.0).ceil() as usize).max(200);
    let grid: Vec<f64> = (0..=steps)
        .map(|i| t_min + (t_max - t_min) * i as f64 / steps as f64)
        .collect();
    let mut out = Vec::new();
    let s_max = t_max.floor() as u32;
    for s in 1..=s_max {
        let vals: Vec<f64> = grid.iter().map(|&t| g(t, s)).collect();
        for i in 0..steps {
            let (a, b) = (vals[i], vals[i + 1]);
            if !(a.is_finite() && b.is_finite()) {
                continue;
            }
            let root = if a == 0.0 {
                grid[i]
            } else if a * b < 0.0 {
                bisect(|t| g(t, s), grid[i], grid[i + 1], 1e-14)?
            } else {
                continue;
            };
            if (s as f64) > root + 1e-9 {
                continue;
            }
            let qs = rel.eval_f64(beraha(root));
            let l = locus(root, s, Some(qs));
            if width.is_none_or(|w| visible_at_width(&l, w)) {
                out.push(l);
            }
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.s.cmp(&b.s)));
    Ok(out)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Best rational approximation with denominator at most `max_den` by
/// continued fractions, accepted only within `tol`.
pub fn recognize_rational(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = y - a;
        if frac.abs() < 1e-300 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

/// Display helper: `p/q` or `p`.
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign of `D_L` along a relation, used to bracket amplitude zeros.
pub fn amplitude_along(l: u32, q: f64, rel: &QsRelation) -> f64 {
    amplitude_d(l, &q, &rel.eval_f64(q))
}

/// `Q = B_t` inverted: the Beraha index of `q` in `(0, 4)`.
pub fn beraha_index(q: f64) -> Option<f64> {
    if !(0.0..4.0).contains(&q) {
        return None;
    }
    let c = (q / 4.0).sqrt();
    Some(PI / c.acos())
}

/// `true` when `x` is within `tol` of a positive integer.
pub fn near_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol && x.round() > 0.0
}

/// Integer part of a positive rational as `u32`, if it fits.
pub fn rational_floor(r: &BigRational) -> Option<u32> {
    if r.is_negative() {
        return None;
    }
    r.floor().to_integer().to_u32()
}
