use super::{pow, BigComplex, QsRelation, Scalar, UniPoly, Variable};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Polynomial in `Q` and `Qs` with arbitrary-size integer coefficients.
///
/// Terms are keyed by the exponent pair `(dQ, dQs)`; zero coefficients are
/// never stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, dq: u32, dqs: u32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((dq, dqs), c);
        }
        BivariatePolynomial { terms }
    }

    /// The variable `Q`.
    pub fn q() -> Self {
        Self::monomial(1, 1, 0)
    }

    /// The variable `Qs`.
    pub fn qs() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigInt)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in iter {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, dq: u32, dqs: u32) -> BigInt {
        self.terms.get(&(dq, dqs)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, dq: u32, dqs: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((dq, dqs)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn degree_q(&self) -> Option<u32> {
        self.terms.keys().map(|(a, _)| *a).max()
    }

    pub fn degree_qs(&self) -> Option<u32> {
        self.terms.keys().map(|(_, b)| *b).max()
    }

    /// Multiplies by `c * Q^dq * Qs^dqs`.
    pub fn mul_monomial(&self, c: &BigInt, dq: u32, dqs: u32) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BivariatePolynomial {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), x)| ((a + dq, b + dqs), x * c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        self.mul_monomial(c, 0, 0)
    }

    /// Horner evaluation: inner Horner in `Qs` for every power of `Q`, outer
    /// Horner in `Q`. Exact for exact scalar types.
    pub fn eval<T: Scalar>(&self, q: &T, qs: &T) -> T {
        let mut by_q: BTreeMap<u32, Vec<(u32, &BigInt)>> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            by_q.entry(a).or_default().push((b, c));
        }
        let mut acc = T::zero();
        let mut prev_deg: Option<u32> = None;
        for (&a, row) in by_q.iter().rev() {
            if let Some(p) = prev_deg {
                acc = acc * pow(q, p - a);
            }
            acc = acc + horner_row(row, qs);
            prev_deg = Some(a);
        }
        if let Some(p) = prev_deg {
            acc = acc * pow(q, p);
        }
        acc
    }

    /// Evaluation at arbitrary precision; the result carries the larger of
    /// the two input precisions.
    pub fn eval_big(&self, q: &BigComplex, qs: &BigComplex) -> BigComplex {
        let prec = q.prec().max(qs.prec());
        let mut acc = BigComplex::zero(prec);
        for (&(a, b), c) in &self.terms {
            let term = q.pow_u32(a) * qs.pow_u32(b) * BigComplex::from_bigint(c, prec);
            acc = acc + term;
        }
        acc
    }

    /// Substitutes `Qs = rel(Q)`. For relations without a `sqrt(Q)` term the
    /// result is a polynomial in `Q`; otherwise it is a polynomial in
    /// `u = sqrt(Q)` obtained by setting `Q = u^2`.
    pub fn substitute_relation(&self, rel: &QsRelation) -> UniPoly {
        let var = if rel.has_sqrt() {
            Variable::SqrtQ
        } else {
            Variable::Q
        };
        let q_as = |exp: u32| -> UniPoly {
            match var {
                Variable::Q => UniPoly::monomial(BigRational::one(), exp as usize, var),
                Variable::SqrtQ => UniPoly::monomial(BigRational::one(), 2 * exp as usize, var),
            }
        };
        let rel_poly = rel.as_unipoly(var);
        // Horner in Qs: p = sum_j P_j(Q) Qs^j.
        let mut by_qs: BTreeMap<u32, UniPoly> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let t = q_as(a).scale(&BigRational::from_integer(c.clone()));
            let e = by_qs.entry(b).or_insert_with(|| UniPoly::zero(var));
            *e = &*e + &t;
        }
        let mut acc = UniPoly::zero(var);
        let mut prev: Option<u32> = None;
        for (&b, pj) in by_qs.iter().rev() {
            if let Some(p) = prev {
                for _ in 0..(p - b) {
                    acc = &acc * &rel_poly;
                }
            }
            acc = &acc + pj;
            prev = Some(b);
        }
        if let Some(p) = prev {
            for _ in 0..p {
                acc = &acc * &rel_poly;
            }
        }
        acc
    }

    /// `p(Q, Q)`: the polynomial with both variables identified.
    pub fn diagonal(&self) -> UniPoly {
        self.substitute_relation(&QsRelation::identity())
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            vars: vec!["Q".into(), "Qs".into()],
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| TermJson {
                    d_q: a,
                    d_qs: b,
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolynomialJson) -> Result<Self> {
        if json.vars != ["Q", "Qs"] {
            return Err(Error::Parse(format!("unexpected vars {:?}", json.vars)));
        }
        let mut p = Self::zero();
        for t in &json.terms {
            let c: BigInt = t
                .coef
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", t.coef)))?;
            p.add_term(t.d_q, t.d_qs, c);
        }
        Ok(p)
    }
}

fn horner_row<T: Scalar>(row: &[(u32, &BigInt)], x: &T) -> T {
    // row sorted ascending by exponent
    let mut acc = T::zero();
    let mut prev: Option<u32> = None;
    for &(b, c) in row.iter().rev() {
        if let Some(p) = prev {
            acc = acc * pow(x, p - b);
        }
        acc = acc + T::from_bigint(c);
        prev = Some(b);
    }
    if let Some(p) = prev {
        acc = acc * pow(x, p);
    }
    acc
}

/// Serialized form: `{"vars":["Q","Qs"],"terms":[{"dQ":..,"dQs":..,"coef":".."}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(rename = "dQ")]
    pub d_q: u32,
    #[serde(rename = "dQs")]
    pub d_qs: u32,
    pub coef: String,
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&BivariatePolynomial> for BivariatePolynomial {
    fn add_assign(&mut self, rhs: &BivariatePolynomial) {
        for (&(a, b), c) in &rhs.terms {
            self.add_term(a, b, c.clone());
        }
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &rhs.terms {
                out.add_term(a + x, b + y, c * d);
            }
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        BivariatePolynomial {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BivariatePolynomial {
            type Output = BivariatePolynomial;
            fn $m(self, rhs: BivariatePolynomial) -> BivariatePolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        -&self
    }
}

impl Zero for BivariatePolynomial {
    fn zero() -> Self {
        BivariatePolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for BivariatePolynomial {
    fn one() -> Self {
        BivariatePolynomial::one()
    }
}

impl Scalar for BivariatePolynomial {
    fn from_bigint(n: &BigInt) -> Self {
        BivariatePolynomial::constant(n.clone())
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in self.terms.iter().rev() {
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && (a > 0 || b > 0);
            if !unit {
                write!(f, "{mag}")?;
            }
            let mut sep = !unit;
            for (name, e) in [("Q", a), ("Qs", b)] {
                if e == 0 {
                    continue;
                }
                if sep {
                    write!(f, "*")?;
                }
                sep = true;
                if e == 1 {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn fig1() -> BivariatePolynomial {
        let q = BivariatePolynomial::q();
        let qs = BivariatePolynomial::qs();
        let quad = &(&(&q * &q) - &q.scale(&3.into())) + &BivariatePolynomial::constant(3);
        &(&quad * &qs) * &(&qs - &BivariatePolynomial::one())
    }

    #[test]
    fn eval_monomial() {
        let p = &BivariatePolynomial::q() * &BivariatePolynomial::qs();
        assert_eq!(p.eval(&2.0, &3.0), 6.0);
    }

    #[test]
    fn eval_fig1_at_three_two() {
        let v = fig1().eval(&BigRational::from_integer(3.into()), &BigRational::from_integer(2.into()));
        assert_eq!(v, BigRational::from_integer(6.into()));
    }

    #[test]
    fn eval_zero_polynomial() {
        let z = BivariatePolynomial::zero();
        assert_eq!(z.eval(&Complex64::new(1.3, -2.0), &Complex64::new(0.1, 7.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn no_zero_coefficients_stored() {
        let p = &BivariatePolynomial::q() - &BivariatePolynomial::q();
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn substitute_qs_minus_q() {
        let p = &BivariatePolynomial::qs() - &BivariatePolynomial::q();
        let u = p.substitute_relation(&"Qs=Q-2".parse().unwrap());
        assert_eq!(u, UniPoly::constant(BigRational::from_integer((-2).into()), Variable::Q));
    }

    #[test]
    fn substitute_fig1_into_q_minus_two() {
        let u = fig1().substitute_relation(&"Qs=Q-2".parse().unwrap());
        // (Q-2)(Q-3)(Q^2-3Q+3) = Q^4 - 8Q^3 + 24Q^2 - 33Q + 18
        let expected = UniPoly::from_ints(&[18, -33, 24, -8, 1], Variable::Q);
        assert_eq!(u, expected);
        assert_eq!(u.degree(), Some(4));
    }

    #[test]
    fn substitute_sqrt_relation() {
        let u = BivariatePolynomial::qs().substitute_relation(&"Qs=Q-sqrtQ".parse().unwrap());
        assert_eq!(u, UniPoly::from_ints(&[0, -1, 1], Variable::SqrtQ));
    }

    #[test]
    fn json_round_trip() {
        let p = fig1();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert!(s.contains("\"dQ\""));
        let back: PolynomialJson = serde_json::from_str(&s).unwrap();
        assert_eq!(BivariatePolynomial::from_json(&back).unwrap(), p);
    }

    #[test]
    fn display() {
        assert_eq!(fig1().to_string(), "Q^2*Qs^2 - Q^2*Qs - 3*Q*Qs^2 + 3*Q*Qs + 3*Qs^2 - 3*Qs");
    }

    fn small_poly() -> impl Strategy<Value = BivariatePolynomial> {
        prop::collection::vec(((0u32..4, 0u32..4), -20i64..20), 0..6)
            .prop_map(|ts| BivariatePolynomial::from_terms(ts.into_iter().map(|(k, c)| (k, BigInt::from(c)))))
    }

    proptest! {
        #[test]
        fn distributive(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
        }

        #[test]
        fn substitution_commutes_with_evaluation(
            p in small_poly(), a in -3i64..4, b in -3i64..4, x in -5i64..6,
        ) {
            let rel = QsRelation::affine(
                BigRational::from_integer(a.into()),
                BigRational::from_integer(b.into()),
                BigRational::zero(),
            );
            let q = BigRational::from_integer(x.into());
            let qs = rel.eval_rational(&q).unwrap();
            let lhs = p.substitute_relation(&rel).eval(&q);
            prop_assert_eq!(lhs, p.eval(&q, &qs));
        }

        #[test]
        fn sqrt_substitution_commutes_with_evaluation(p in small_poly(), c in -3i64..4, u in -4i64..5) {
            let rel = QsRelation::affine(BigRational::one(), BigRational::zero(), BigRational::from_integer(c.into()));
            let u = BigRational::from_integer(u.into());
            let q = &u * &u;
            let qs = &q + &u * BigRational::from_integer(c.into());
            let sub = p.substitute_relation(&rel);
            let at = if rel.has_sqrt() { &u } else { &q };
            prop_assert_eq!(sub.eval(at), p.eval(&q, &qs));
        }
    }
}
