use super::{pow, BigComplex};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Which indeterminate a univariate polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variable {
    Q,
    /// `u = sqrt(Q)`, used after substituting relations containing `sqrt(Q)`.
    SqrtQ,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Q => "Q",
            Variable::SqrtQ => "u",
        }
    }
}

/// Dense univariate polynomial with rational coefficients, ascending order.
/// The coefficient vector never ends in a zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
    var: Variable,
}

impl UniPoly {
    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn new(coeffs: Vec<BigRational>, var: Variable) -> Self {
        UniPoly { coeffs, var }.normalize()
    }

    pub fn zero(var: Variable) -> Self {
        UniPoly { coeffs: vec![], var }
    }

    pub fn constant(c: BigRational, var: Variable) -> Self {
        Self::new(vec![c], var)
    }

    pub fn monomial(c: BigRational, deg: usize, var: Variable) -> Self {
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs, var)
    }

    pub fn from_ints(cs: &[i64], var: Variable) -> Self {
        Self::new(
            cs.iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
            var,
        )
    }

    pub fn from_bigints(cs: &[BigInt], var: Variable) -> Self {
        Self::new(
            cs.iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
            var,
        )
    }

    /// Monic polynomial with the given integer roots.
    pub fn from_integer_roots(roots: &[i64], var: Variable) -> Self {
        let mut p = Self::constant(BigRational::one(), var);
        for &r in roots {
            p = &p * &Self::from_ints(&[-r, 1], var);
        }
        p
    }

    pub fn var(&self) -> Variable {
        self.var
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect(), self.var)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
            self.var,
        )
    }

    /// Removes the factor `x^k` for the largest possible `k`; returns `k`.
    pub fn strip_zero_roots(&self) -> (Self, usize) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if self.is_zero() {
            return (self.clone(), 0);
        }
        (Self::new(self.coeffs[k..].to_vec(), self.var), k)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lead_inv = d.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(self.var), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot, self.var), Self::new(rem, self.var))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors (monic).
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Primitive integer coefficient vector proportional to `self`, with a
    /// positive leading coefficient.
    pub fn integer_coefficients(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|c| c / &content * &sign).collect()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * x + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    pub fn eval_big(&self, x: &BigComplex) -> BigComplex {
        let prec = x.prec();
        self.coeffs
            .iter()
            .rev()
            .fold(BigComplex::zero(prec), |acc, c| {
                acc * x.clone() + BigComplex::from_rational(c, prec)
            })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(BigRational::one(), self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Integer power of `x` evaluated exactly; used by tests and callers that
    /// need `p(x)` with `x` integral.
    pub fn eval_int(&self, x: i64) -> BigRational {
        let x = BigRational::from_integer(x.into());
        let mut acc = BigRational::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * pow(&x, i as u32);
        }
        acc
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        debug_assert_eq!(self.var, rhs.var);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigRational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
            self.var,
        )
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect(), self.var)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        debug_assert_eq!(self.var, rhs.var);
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.var);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out, self.var)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "{}", self.var.name())?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Serialized univariate polynomial: ascending coefficients as exact strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniPolyJson {
    pub var: String,
    pub coeffs: Vec<String>,
}

impl UniPoly {
    pub fn to_json(&self) -> UniPolyJson {
        UniPolyJson {
            var: self.var.name().to_string(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(json: &UniPolyJson) -> Option<Self> {
        let var = match json.var.as_str() {
            "Q" => Variable::Q,
            "u" => Variable::SqrtQ,
            _ => return None,
        };
        let coeffs = json
            .coeffs
            .iter()
            .map(|s| super::parse_rational(s))
            .collect::<Option<Vec<_>>>()?;
        Some(UniPoly::new(coeffs, var))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs, Variable::Q)
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = q(&[5, -3, 0, 2, 1]);
        let b = q(&[1, 1, 3]);
        let (qq, r) = a.div_rem(&b);
        assert_eq!(&(&qq * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = UniPoly::from_integer_roots(&[1, 2, 2, 3], Variable::Q);
        let b = UniPoly::from_integer_roots(&[2, 3, 5], Variable::Q);
        assert_eq!(a.gcd(&b), UniPoly::from_integer_roots(&[2, 3], Variable::Q));
        assert_eq!(a.squarefree_part(), UniPoly::from_integer_roots(&[1, 2, 3], Variable::Q));
    }

    #[test]
    fn integer_coefficients_are_primitive() {
        let p = q(&[2, 4, 6]).scale(&BigRational::new(1.into(), 3.into()));
        assert_eq!(p.integer_coefficients(), vec![1.into(), 2.into(), 3.into()]);
    }

    #[test]
    fn strip_zero_roots() {
        let (p, k) = q(&[0, 0, 3, 1]).strip_zero_roots();
        assert_eq!(k, 2);
        assert_eq!(p, q(&[3, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(q(&[3, -3, 1]).to_string(), "Q^2 - 3*Q + 3");
    }
}
