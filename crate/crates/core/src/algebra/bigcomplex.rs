use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use rug::float::Round;
use rug::{Float, Integer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Minimum working precision in bits.
pub const MIN_PREC: u32 = 53;

/// Complex number at arbitrary binary precision.
///
/// Every value carries its own precision; binary operations produce a result
/// at the larger precision of the two operands.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

fn bigint_to_integer(n: &BigInt) -> Integer {
    let (sign, digits) = n.to_u32_digits();
    let mut i = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        i = -i;
    }
    i
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec()).max(MIN_PREC);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_complex(z: Complex64, prec: u32) -> Self {
        Self::from_f64(z.re, z.im, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        BigComplex {
            re: Float::with_val(prec, &bigint_to_integer(n)),
            im: Float::new(prec),
        }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        let num = Float::with_val(prec, &bigint_to_integer(r.numer()));
        let den = Float::with_val(prec, &bigint_to_integer(r.denom()));
        BigComplex {
            re: num / den,
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        BigComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let mut a = Float::with_val(prec, &self.re * &self.re);
        a += Float::with_val(prec, &self.im * &self.im);
        a
    }

    pub fn abs(&self) -> Float {
        let prec = self.prec();
        Float::with_val(prec, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn pow_u32(&self, e: u32) -> Self {
        let mut acc = BigComplex::from_f64(1.0, 0.0, self.prec());
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b.clone();
            }
            b = b.clone() * b;
            e >>= 1;
        }
        acc
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        let r = self.abs();
        if r.is_zero() {
            return BigComplex::zero(prec);
        }
        // sqrt((r + |re|) / 2) on the larger component avoids cancellation.
        let mut t = Float::with_val(prec, &r + self.re.clone().abs());
        t /= 2;
        t.sqrt_mut();
        let half = Float::with_val(prec, &self.im / &t) / 2;
        if !self.re.is_sign_negative() {
            BigComplex { re: t, im: half }
        } else {
            let mut im = t;
            if self.im.is_sign_negative() {
                im = -im;
            }
            BigComplex {
                re: half.abs(),
                im,
            }
        }
    }

    /// `e^{i theta}` scaled by `radius`.
    pub fn from_polar(radius: &Float, theta: &Float) -> Self {
        let prec = radius.prec().max(theta.prec());
        let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
        BigComplex {
            re: Float::with_val(prec, &c * radius),
            im: Float::with_val(prec, &s * radius),
        }
    }

    /// Ratio `|self| / scale` as an `f64`, safe against exponent overflow.
    pub fn abs_ratio(&self, scale: &Float) -> f64 {
        let r = self.abs();
        Float::with_val(r.prec(), &r / scale).to_f64()
    }
}

fn raise(f: &Float, prec: u32) -> Float {
    if f.prec() >= prec {
        f.clone()
    } else {
        Float::with_val_round(prec, f, Round::Nearest).0
    }
}

impl Add for BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: BigComplex) -> BigComplex {
        let prec = self.prec().max(rhs.prec());
        BigComplex {
            re: raise(&self.re, prec) + &rhs.re,
            im: raise(&self.im, prec) + &rhs.im,
        }
    }
}

impl Sub for BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: BigComplex) -> BigComplex {
        let prec = self.prec().max(rhs.prec());
        BigComplex {
            re: raise(&self.re, prec) - &rhs.re,
            im: raise(&self.im, prec) - &rhs.im,
        }
    }
}

impl Mul for BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: BigComplex) -> BigComplex {
        let prec = self.prec().max(rhs.prec());
        let a = raise(&self.re, prec);
        let b = raise(&self.im, prec);
        let re = Float::with_val(prec, &a * &rhs.re) - Float::with_val(prec, &b * &rhs.im);
        let im = Float::with_val(prec, &a * &rhs.im) + Float::with_val(prec, &b * &rhs.re);
        BigComplex { re, im }
    }
}

impl Div for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: BigComplex) -> BigComplex {
        let prec = self.prec().max(rhs.prec());
        let den = rhs.with_prec(prec).norm_sqr();
        let num = self.with_prec(prec) * rhs.conj();
        BigComplex {
            re: Float::with_val(prec, &num.re / &den),
            im: Float::with_val(prec, &num.im / &den),
        }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex64();
        write!(f, "{}{:+}i", z.re, z.im)
    }
}
