use super::{parse_rational, rational_to_f64, UniPoly, Variable};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// A relation `Qs = f(Q)` used to specialise bivariate polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QsRelation {
    /// `Qs = a*Q + b + c*sqrt(Q)`.
    Affine {
        a: BigRational,
        b: BigRational,
        c: BigRational,
    },
    /// `Qs` fixed, independent of `Q`.
    Constant(BigRational),
}

impl QsRelation {
    pub fn affine(a: BigRational, b: BigRational, c: BigRational) -> Self {
        QsRelation::Affine { a, b, c }
    }

    pub fn constant(b: BigRational) -> Self {
        QsRelation::Constant(b)
    }

    /// `Qs = Q`.
    pub fn identity() -> Self {
        Self::affine(BigRational::one(), BigRational::zero(), BigRational::zero())
    }

    /// `(a, b, c)` with the constant form mapped to `(0, b, 0)`.
    pub fn coefficients(&self) -> (BigRational, BigRational, BigRational) {
        match self {
            QsRelation::Affine { a, b, c } => (a.clone(), b.clone(), c.clone()),
            QsRelation::Constant(b) => (BigRational::zero(), b.clone(), BigRational::zero()),
        }
    }

    pub fn has_sqrt(&self) -> bool {
        matches!(self, QsRelation::Affine { c, .. } if !c.is_zero())
    }

    pub fn as_unipoly(&self, var: Variable) -> UniPoly {
        let (a, b, c) = self.coefficients();
        match var {
            Variable::Q => {
                assert!(c.is_zero(), "sqrt(Q) term needs the u = sqrt(Q) variable");
                UniPoly::new(vec![b, a], var)
            }
            Variable::SqrtQ => UniPoly::new(vec![b, c, a], var),
        }
    }

    /// Exact value for relations without a `sqrt(Q)` term.
    pub fn eval_rational(&self, q: &BigRational) -> Option<BigRational> {
        if self.has_sqrt() {
            return None;
        }
        let (a, b, _) = self.coefficients();
        Some(a * q + b)
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        let (a, b, c) = self.coefficients();
        let mut v = rational_to_f64(&a) * q + rational_to_f64(&b);
        if !c.is_zero() {
            v += rational_to_f64(&c) * q.sqrt();
        }
        v
    }

    /// Complex evaluation with the principal branch of `sqrt(Q)`.
    pub fn eval_complex(&self, q: Complex64) -> Complex64 {
        let (a, b, c) = self.coefficients();
        let mut v = q * rational_to_f64(&a) + rational_to_f64(&b);
        if !c.is_zero() {
            v += q.sqrt() * rational_to_f64(&c);
        }
        v
    }
}

impl FromStr for QsRelation {
    type Err = Error;

    /// Grammar: `Qs=<term>(±<term>)*` where a term is `<r>`, `<r>*Q`, `Q`,
    /// `Q/<d>`, `<r>*sqrtQ`, `sqrtQ` or `sqrtQ/<d>`, and `<r>` is an integer,
    /// fraction `p/q` or decimal. A relation without `Q` is a constant.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad relation `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let rhs = compact
            .strip_prefix("Qs=")
            .or_else(|| compact.strip_prefix("qs="))
            .ok_or_else(bad)?;
        if rhs.is_empty() {
            return Err(bad());
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in rhs.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && cur.is_empty() {
                neg ^= ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad());
        }
        terms.push((neg, cur));

        let (mut a, mut b, mut c) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
        let mut saw_q = false;
        for (neg, t) in terms {
            let (slot, coef) = if let Some((coef, var)) = split_var(&t) {
                saw_q = true;
                let target = if var == "Q" { &mut a } else { &mut c };
                (target, coef)
            } else {
                (&mut b, parse_rational(&t).ok_or_else(bad)?)
            };
            let coef = if neg { -coef } else { coef };
            *slot += coef;
        }
        if !saw_q {
            return Ok(QsRelation::Constant(b));
        }
        Ok(QsRelation::Affine { a, b, c })
    }
}

/// Recognises `r*Q`, `Q`, `Q/d` (and the same with `sqrtQ`).
fn split_var(t: &str) -> Option<(BigRational, &'static str)> {
    for var in ["sqrtQ", "Q"] {
        if t == var {
            return Some((BigRational::one(), var));
        }
        if let Some(coef) = t.strip_suffix(&format!("*{var}")) {
            return parse_rational(coef).map(|c| (c, var));
        }
        if let Some(den) = t.strip_prefix(&format!("{var}/")) {
            return parse_rational(den)
                .filter(|d| !d.is_zero())
                .map(|d| (d.recip(), var));
        }
    }
    None
}

impl fmt::Display for QsRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = self.coefficients();
        write!(f, "Qs=")?;
        let mut wrote = false;
        let mut term = |f: &mut fmt::Formatter<'_>, coef: &BigRational, var: &str| -> fmt::Result {
            if coef.is_zero() {
                return Ok(());
            }
            let sign = if coef.is_negative() { "-" } else if wrote { "+" } else { "" };
            let mag = coef.abs();
            match (var.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{sign}{mag}")?,
                (false, true) => write!(f, "{sign}{var}")?,
                (false, false) => write!(f, "{sign}{mag}*{var}")?,
            }
            wrote = true;
            Ok(())
        };
        term(f, &a, "Q")?;
        term(f, &b, "")?;
        term(f, &c, "sqrtQ")?;
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_table_relations() {
        let cases = [
            ("Qs=Q", (r(1, 1), r(0, 1), r(0, 1))),
            ("Qs=Q-1", (r(1, 1), r(-1, 1), r(0, 1))),
            ("Qs=Q-2", (r(1, 1), r(-2, 1), r(0, 1))),
            ("Qs=Q-sqrtQ", (r(1, 1), r(0, 1), r(-1, 1))),
            ("Qs=Q/2", (r(1, 2), r(0, 1), r(0, 1))),
            ("Qs=1/2*Q+3-2*sqrtQ", (r(1, 2), r(3, 1), r(-2, 1))),
        ];
        for (s, want) in cases {
            let rel: QsRelation = s.parse().unwrap();
            assert_eq!(rel.coefficients(), want, "{s}");
        }
        assert_eq!("Qs=2".parse::<QsRelation>().unwrap(), QsRelation::Constant(r(2, 1)));
        assert_eq!("Qs=3/2".parse::<QsRelation>().unwrap(), QsRelation::Constant(r(3, 2)));
        assert_eq!("Qs=-1".parse::<QsRelation>().unwrap(), QsRelation::Constant(r(-1, 1)));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["Q=Qs", "Qs=", "Qs=Q*", "Qs=foo", "Qs=Q/0"] {
            assert!(s.parse::<QsRelation>().is_err(), "{s}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["Qs=Q-2", "Qs=Q-sqrtQ", "Qs=1/2*Q", "Qs=0", "Qs=3/2"] {
            let rel: QsRelation = s.parse().unwrap();
            assert_eq!(rel.to_string(), s);
            assert_eq!(rel.to_string().parse::<QsRelation>().unwrap(), rel);
        }
    }

    #[test]
    fn complex_eval_uses_principal_branch() {
        let rel: QsRelation = "Qs=Q-sqrtQ".parse().unwrap();
        let v = rel.eval_complex(Complex64::new(-4.0, 0.0));
        assert!((v - Complex64::new(-4.0, -2.0)).norm() < 1e-14);
    }
}
