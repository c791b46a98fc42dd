//! All complex roots of exact univariate polynomials by Aberth–Ehrlich
//! iteration at adaptive binary precision, with per-root residual
//! certificates and real-axis clustering.

use crate::algebra::{BigComplex, UniPoly};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use rug::{Assign, Float};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::cmp::Ordering;
use std::f64::consts::PI;

pub const START_PREC: u32 = 128;
pub const MAX_PREC: u32 = 8192;

#[derive(Clone, Debug)]
pub struct Root {
    pub z: BigComplex,
    /// `|p(z)| / sum |a_i| |z|^i`.
    pub residual: f64,
    /// Number of roots (this one included) within the multiplicity scale.
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub degree: usize,
    /// Working precision in bits at which the certificates passed.
    pub precision: u32,
    /// SHA-256 of the primitive integer coefficients.
    pub digest: String,
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootRow {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.z.to_complex64()).collect()
    }

    pub fn rows(&self) -> Vec<RootRow> {
        self.roots
            .iter()
            .map(|r| {
                let z = r.z.to_complex64();
                RootRow {
                    re: z.re,
                    im: z.im,
                    residual: r.residual,
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,residual\n");
        for r in self.rows() {
            out.push_str(&format!("{:.17e},{:.17e},{:.3e}\n", r.re, r.im, r.residual));
        }
        out
    }

    pub fn real_clusters(&self, window: f64) -> Vec<Cluster> {
        real_clusters(&self.points(), window)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub count: usize,
}

/// Groups points with `|Im z| < window` whose real parts are chained by gaps
/// of at most `window`.
pub fn real_clusters(points: &[Complex64], window: f64) -> Vec<Cluster> {
    let mut xs: Vec<f64> = points
        .iter()
        .filter(|z| z.im.abs() < window)
        .map(|z| z.re)
        .collect();
    xs.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let mut j = i + 1;
        while j < xs.len() && xs[j] - xs[j - 1] <= window {
            j += 1;
        }
        let n = j - i;
        out.push(Cluster {
            center: xs[i..j].iter().sum::<f64>() / n as f64,
            count: n,
        });
        i = j;
    }
    out
}

pub fn polynomial_digest(coeffs: &[BigInt]) -> String {
    let mut h = Sha256::new();
    for c in coeffs {
        h.update(c.to_string().as_bytes());
        h.update(b",");
    }
    format!("{:x}", h.finalize())
}

#[derive(Clone)]
struct C {
    re: Float,
    im: Float,
}

impl C {
    fn new(prec: u32) -> Self {
        C {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    fn from_big(z: &BigComplex, prec: u32) -> Self {
        C {
            re: Float::with_val(prec, z.re()),
            im: Float::with_val(prec, z.im()),
        }
    }

    fn to_big(&self) -> BigComplex {
        BigComplex::new(self.re.clone(), self.im.clone())
    }

    fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }
}

struct Work {
    p: C,
    dp: C,
    t: Float,
    u: Float,
    s: Float,
    az: Float,
}

impl Work {
    fn new(prec: u32) -> Self {
        Work {
            p: C::new(prec),
            dp: C::new(prec),
            t: Float::new(prec),
            u: Float::new(prec),
            s: Float::new(prec),
            az: Float::new(prec),
        }
    }
}

/// `z <- z * w` using scratch `t` and `u`.
fn mul_into(z: &mut C, w: &C, t: &mut Float, u: &mut Float) {
    t.assign(&z.re * &w.re - &z.im * &w.im);
    u.assign(&z.re * &w.im + &z.im * &w.re);
    std::mem::swap(&mut z.re, t);
    std::mem::swap(&mut z.im, u);
}

/// `a / b` written into `out`.
fn div_into(out: &mut C, a: &C, b: &C, t: &mut Float, u: &mut Float) {
    u.assign(&b.re * &b.re + &b.im * &b.im);
    t.assign(&a.re * &b.re + &a.im * &b.im);
    out.im.assign(&a.im * &b.re - &a.re * &b.im);
    out.im /= &*u;
    out.re.assign(&*t / &*u);
}

struct Prepared {
    coeffs: Vec<Float>,
    abs: Vec<Float>,
}

fn prepare(ints: &[BigInt], prec: u32) -> Prepared {
    let coeffs: Vec<Float> = ints
        .iter()
        .map(|c| {
            let i: rug::Integer = c.to_string().parse().expect("integer");
            Float::with_val(prec, &i)
        })
        .collect();
    let abs = coeffs.iter().map(|c| Float::with_val(prec, c.abs_ref())).collect();
    Prepared { coeffs, abs }
}

/// Horner for `p`, `p'` and the certificate denominator at `z`.
fn horner(pp: &Prepared, z: &C, w: &mut Work) {
    let n = pp.coeffs.len() - 1;
    w.az.assign(z.re.hypot_ref(&z.im));
    w.p.re.assign(&pp.coeffs[n]);
    w.p.im.assign(0);
    w.dp.re.assign(0);
    w.dp.im.assign(0);
    w.s.assign(&pp.abs[n]);
    for i in (0..n).rev() {
        mul_into(&mut w.dp, z, &mut w.t, &mut w.u);
        w.dp.re += &w.p.re;
        w.dp.im += &w.p.im;
        mul_into(&mut w.p, z, &mut w.t, &mut w.u);
        w.p.re += &pp.coeffs[i];
        w.s *= &w.az;
        w.s += &pp.abs[i];
    }
}

fn certificate(w: &Work) -> f64 {
    if w.s.is_zero() {
        return 0.0;
    }
    let num = Float::with_val(w.s.prec(), w.p.re.hypot_ref(&w.p.im));
    Float::with_val(w.s.prec(), &num / &w.s).to_f64()
}

/// Newton-polygon radii: for each edge of the upper convex hull of
/// `(i, log|a_i|)` the roots of the corresponding monomial pair.
fn initial_points(ints: &[BigInt], prec: u32) -> Vec<C> {
    let n = ints.len() - 1;
    let logs: Vec<Option<f64>> = ints
        .iter()
        .map(|c| {
            if c.is_zero() {
                None
            } else {
                let i: rug::Integer = c.abs().to_string().parse().expect("integer");
                Some(Float::with_val(64, &i).ln().to_f64())
            }
        })
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for (i, l) in logs.iter().enumerate() {
        let Some(y) = *l else { continue };
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let (ya, yb) = (logs[a].unwrap(), logs[b].unwrap());
            let cross = (b as f64 - a as f64) * (y - ya) - (yb - ya) * (i as f64 - a as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut pts = Vec::with_capacity(n);
    let sigma = 0.7;
    for win in hull.windows(2) {
        let (a, b) = (win[0], win[1]);
        let k = b - a;
        let r = ((logs[a].unwrap() - logs[b].unwrap()) / k as f64).exp();
        for j in 0..k {
            let th = 2.0 * PI * j as f64 / k as f64 + 2.0 * PI * a as f64 / n as f64 + sigma;
            let z = BigComplex::from_f64(r * th.cos(), r * th.sin(), prec);
            pts.push(C::from_big(&z, prec));
        }
    }
    pts
}

fn cmp_roots(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Aberth sweeps at fixed precision until every root is frozen or progress
/// stops. Returns per-root certificates.
fn aberth(pp: &Prepared, zs: &mut [C], prec: u32, max_sweeps: usize) -> Vec<f64> {
    let n = zs.len();
    let floor = 2f64.powi(-(prec as i32) + 8) * (n as f64 + 1.0);
    let mut frozen = vec![false; n];
    let mut certs = vec![f64::INFINITY; n];
    for _ in 0..max_sweeps {
        let snapshot: &[C] = zs;
        let steps: Vec<(Option<C>, f64, bool)> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut w = Work::new(prec);
                let z = &snapshot[k];
                horner(pp, z, &mut w);
                let cert = certificate(&w);
                if frozen[k] || cert <= floor {
                    return (None, cert, true);
                }
                if w.dp.re.is_zero() && w.dp.im.is_zero() {
                    return (None, cert, false);
                }
                let mut ratio = C::new(prec);
                div_into(&mut ratio, &w.p, &w.dp, &mut w.t, &mut w.u);
                let mut sum = C::new(prec);
                let mut d = C::new(prec);
                for (j, zj) in snapshot.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    d.re.assign(&z.re - &zj.re);
                    d.im.assign(&z.im - &zj.im);
                    w.u.assign(&d.re * &d.re + &d.im * &d.im);
                    if w.u.is_zero() {
                        continue;
                    }
                    w.t.assign(&d.re / &w.u);
                    sum.re += &w.t;
                    w.t.assign(&d.im / &w.u);
                    sum.im -= &w.t;
                }
                // delta = ratio / (1 - ratio * sum)
                let mut den = ratio.clone();
                mul_into(&mut den, &sum, &mut w.t, &mut w.u);
                den.re = Float::with_val(prec, 1) - &den.re;
                den.im = -den.im;
                let mut delta = C::new(prec);
                if den.re.is_zero() && den.im.is_zero() {
                    delta = ratio;
                } else {
                    div_into(&mut delta, &ratio, &den, &mut w.t, &mut w.u);
                }
                let dz = Float::with_val(prec, delta.re.hypot_ref(&delta.im));
                let mz = Float::with_val(prec, z.re.hypot_ref(&z.im));
                let tiny = dz.to_f64() <= 2f64.powi(-(prec as i32) + 8) * mz.to_f64().max(1e-300);
                (Some(delta), cert, tiny)
            })
            .collect();
        let mut all_done = true;
        for (k, (delta, cert, done)) in steps.into_iter().enumerate() {
            certs[k] = cert;
            if let Some(d) = delta {
                zs[k].re -= &d.re;
                zs[k].im -= &d.im;
            }
            if done {
                frozen[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    let mut w = Work::new(prec);
    for (k, z) in zs.iter().enumerate() {
        horner(pp, z, &mut w);
        certs[k] = certificate(&w);
    }
    certs
}

/// All `deg p` roots of `p`, certified to `|p(z)| / sum |a_i||z|^i <= tol`.
pub fn find_roots(p: &UniPoly, tol: f64) -> Result<RootSet> {
    find_roots_from(p, tol, START_PREC)
}

/// As [`find_roots`], starting at `start_prec` bits.
pub fn find_roots_from(p: &UniPoly, tol: f64, start_prec: u32) -> Result<RootSet> {
    let deg = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::InvalidSpec("root finding needs degree >= 1".into()))?;
    let ints = p.integer_coefficients();
    let digest = polynomial_digest(&ints);
    let zeros_at_origin = ints.iter().take_while(|c| c.is_zero()).count();
    let core: Vec<BigInt> = ints[zeros_at_origin..].to_vec();
    let mut prec = start_prec.max(64);
    let mut roots: Vec<C> = Vec::new();
    let mut certs: Vec<f64> = Vec::new();
    if core.len() > 1 {
        roots = initial_points(&core, prec);
        let stable = tol.sqrt();
        let mut prev: Option<Vec<Complex64>> = None;
        loop {
            let pp = prepare(&core, prec);
            let sweeps = 200 + 4 * core.len();
            certs = aberth(&pp, &mut roots, prec, sweeps);
            let now: Vec<Complex64> = roots.iter().map(|z| z.to_big().to_complex64()).collect();
            // a tiny backward error alone says nothing when the coefficients
            // cancel catastrophically, so roots must also survive a doubling
            let settled = prev.as_ref().is_some_and(|old| {
                now.iter().all(|z| {
                    let d = old.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
                    d <= stable * z.norm().max(1.0)
                })
            });
            if settled && certs.iter().all(|&c| c <= tol) {
                break;
            }
            if prec >= MAX_PREC {
                return Err(Error::NoConvergence {
                    iterations: sweeps,
                });
            }
            prev = Some(now);
            prec *= 2;
            for z in roots.iter_mut() {
                z.set_prec(prec);
            }
        }
    }
    let mut out: Vec<Root> = roots
        .iter()
        .zip(&certs)
        .map(|(z, &c)| Root {
            z: z.to_big(),
            residual: c,
            multiplicity: 1,
        })
        .collect();
    for _ in 0..zeros_at_origin {
        out.push(Root {
            z: BigComplex::zero(prec),
            residual: 0.0,
            multiplicity: 1,
        });
    }
    let pts: Vec<Complex64> = out.iter().map(|r| r.z.to_complex64()).collect();
    let scale = tol.sqrt();
    for i in 0..out.len() {
        let m = pts
            .iter()
            .filter(|w| (*w - pts[i]).norm() <= scale * pts[i].norm().max(1.0))
            .count();
        out[i].multiplicity = m;
    }
    out.sort_by(|a, b| {
        cmp_roots(&a.z.to_complex64(), &b.z.to_complex64()).then_with(|| {
            a.z.re()
                .partial_cmp(b.z.re())
                .unwrap_or(Ordering::Equal)
                .then(a.z.im().partial_cmp(b.z.im()).unwrap_or(Ordering::Equal))
        })
    });
    Ok(RootSet {
        roots: out,
        degree: deg,
        precision: prec,
        digest,
        tol,
    })
}

/// Sum of the roots computed at the root set's precision, for checking
/// against `-a_{n-1}/a_n`.
pub fn root_sum(rs: &RootSet) -> BigComplex {
    let mut acc = BigComplex::zero(rs.precision);
    for r in &rs.roots {
        acc = acc + r.z.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Variable;

    #[test]
    fn quadratic() {
        let p = UniPoly::from_ints(&[3, -3, 1], Variable::Q);
        let rs = find_roots(&p, 1e-30).unwrap();
        let pts = rs.points();
        let s = 3f64.sqrt() / 2.0;
        assert!((pts[0] - Complex64::new(1.5, -s)).norm() < 1e-14);
        assert!((pts[1] - Complex64::new(1.5, s)).norm() < 1e-14);
    }

    #[test]
    fn integer_roots_and_zero() {
        let p = UniPoly::from_integer_roots(&[0, 0, 2, 3], Variable::Q);
        let rs = find_roots(&p, 1e-30).unwrap();
        let re: Vec<f64> = rs.points().iter().map(|z| z.re).collect();
        assert_eq!(rs.roots.len(), 4);
        assert!(re[0].abs() < 1e-30 && re[1].abs() < 1e-30);
        assert!((re[2] - 2.0).abs() < 1e-14 && (re[3] - 3.0).abs() < 1e-14);
        assert_eq!(rs.roots[0].multiplicity, 2);
    }

    #[test]
    fn clusters() {
        let pts = [
            Complex64::new(2.01, 0.0),
            Complex64::new(2.02, 0.0),
            Complex64::new(0.5, 3.0),
        ];
        let cs = real_clusters(&pts, 0.1);
        assert_eq!(cs.len(), 1);
        assert!((cs[0].center - 2.015).abs() < 1e-12 && cs[0].count == 2);
        assert!(real_clusters(&[], 0.1).is_empty());
    }
}
