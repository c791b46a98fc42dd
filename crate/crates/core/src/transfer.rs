//! Transfer operators: exact partition functions with cyclic closure, and
//! numeric sector operators with a fixed number of winding clusters.

use crate::algebra::{BivariatePolynomial, QsRelation, Scalar, UniPoly, Variable};
use crate::config::Guards;
use crate::connectivity::{ConnectivityState, DetachOutcome, JoinOutcome, StateBasis};
use crate::error::{Error, Result};
use crate::graphs::{AnnulusSpec, Coupling, Lattice};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

/// Cluster weights `(Q, Qs)` and edge coupling `v` in some ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights<T> {
    pub q: T,
    pub qs: T,
    pub v: T,
}

impl<T: Scalar> Weights<T> {
    pub fn new(q: T, qs: T, v: T) -> Self {
        Weights { q, qs, v }
    }

    fn coef(&self, c: Coef) -> T {
        match c {
            Coef::One => T::one(),
            Coef::V => self.v.clone(),
            Coef::Q => self.q.clone(),
            Coef::Qs => self.qs.clone(),
        }
    }
}

impl Weights<Complex64> {
    /// Resolves `v` from a coupling, using the principal square root of `q`
    /// for the symbolic couplings.
    pub fn complex(q: Complex64, qs: Complex64, coupling: &Coupling) -> Self {
        let v = match coupling {
            Coupling::Rational(r) => Complex64::new(crate::algebra::rational_to_f64(r), 0.0),
            Coupling::PlusSqrtQ => q.sqrt(),
            Coupling::MinusSqrtQ => -q.sqrt(),
        };
        Weights { q, qs, v }
    }
}

/// Monomial coefficient of an elementary transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coef {
    One,
    V,
    Q,
    Qs,
}

/// Elementary factor of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// Time-like edge at a site: either empty (the site starts a new vertex)
    /// or occupied (weight `v`).
    Time { site: usize, rim: bool },
    /// Space-like or diagonal edge between two sites.
    Join { a: usize, b: usize },
}

/// The elementary factors of one slice in application order.
pub fn slice_ops(spec: &AnnulusSpec) -> Vec<Op> {
    let w = spec.width;
    let mut ops = Vec::new();
    for i in 0..w {
        ops.push(Op::Time {
            site: i,
            rim: i + 1 == w,
        });
        if spec.lattice == Lattice::Triangular && i + 1 < w {
            ops.push(Op::Join { a: i, b: i + 1 });
        }
    }
    ops.extend(space_ops(w));
    ops
}

fn space_ops(w: usize) -> impl Iterator<Item = Op> {
    (0..w.saturating_sub(1)).map(|i| Op::Join { a: i, b: i + 1 })
}

/// Transitions of one state under one factor; forbidden terms are dropped.
pub fn transitions(s: &ConnectivityState, op: Op) -> Vec<(ConnectivityState, Coef)> {
    match op {
        Op::Time { site, rim } => {
            let mut out = vec![(s.clone(), Coef::V)];
            match s.detach(site, rim) {
                DetachOutcome::Kept(t) => out.push((t, Coef::One)),
                DetachOutcome::Closed { state, flagged } => {
                    out.push((state, if flagged { Coef::Qs } else { Coef::Q }))
                }
                DetachOutcome::Forbidden => {}
            }
            out
        }
        Op::Join { a, b } => {
            let mut out = vec![(s.clone(), Coef::One)];
            match s.join(a, b) {
                JoinOutcome::AlreadyJoined => out.push((s.clone(), Coef::V)),
                JoinOutcome::Merged(t) => out.push((t, Coef::V)),
                JoinOutcome::Forbidden => {}
            }
            out
        }
    }
}

fn apply_op<T: Scalar>(vec: BTreeMap<u128, T>, op: Op, w: &Weights<T>) -> BTreeMap<u128, T> {
    let mut out: BTreeMap<u128, T> = BTreeMap::new();
    for (code, x) in vec {
        let s = ConnectivityState::decode(code);
        for (t, c) in transitions(&s, op) {
            let term = x.clone() * w.coef(c);
            let e = out.entry(t.encode()).or_insert_with(T::zero);
            *e = e.clone() + term;
        }
    }
    out.retain(|_, x| !x.is_zero());
    out
}

fn check_exact_size(spec: &AnnulusSpec, guards: &Guards) -> Result<()> {
    spec.validate()?;
    if spec.width > guards.max_exact_width {
        return Err(Error::SizeGuard(format!(
            "exact computation limited to W <= {}, got W = {}",
            guards.max_exact_width, spec.width
        )));
    }
    if 2 * spec.width > crate::connectivity::MAX_SITES {
        return Err(Error::SizeGuard(format!("W = {} too wide for the state encoding", spec.width)));
    }
    Ok(())
}

/// Partition function of the strip at weights in any commutative ring,
/// computed on double-slice states and closed cyclically.
pub fn exact_partition_with<T: Scalar>(spec: &AnnulusSpec, w: &Weights<T>, guards: &Guards) -> Result<T> {
    spec.validate()?;
    let mut series = exact_partition_series(spec, w, guards, spec.length)?;
    Ok(series.pop().expect("length >= 2"))
}

/// `Z` for lengths `2..=n_max` at fixed width and weights, in one pass.
/// The length recorded in `spec` is ignored.
pub fn exact_partition_series<T: Scalar>(
    spec: &AnnulusSpec,
    w: &Weights<T>,
    guards: &Guards,
    n_max: usize,
) -> Result<Vec<T>> {
    check_exact_size(spec, guards)?;
    let width = spec.width;
    let m = 2 * width;
    let mem = |i: usize| m - 1 - i;
    let blocks: Vec<Vec<usize>> = (0..width).map(|i| vec![i, mem(i)]).collect();
    let flags: Vec<bool> = (0..width).map(|i| i + 1 == width).collect();
    let start = ConnectivityState::from_blocks(m, &blocks, &flags, &vec![false; width])?;
    let mut vec = BTreeMap::from([(start.encode(), T::one())]);
    for op in space_ops(width) {
        vec = apply_op(vec, op, w);
    }
    let ops = slice_ops(spec);
    let time_part = ops.len() - (width - 1);
    let mut out = Vec::new();
    for step in 1..=n_max {
        for &op in &ops[..time_part] {
            vec = apply_op(vec, op, w);
        }
        if step >= 2 {
            out.push(close(&vec, width, w));
        }
        if step < n_max {
            for &op in &ops[time_part..] {
                vec = apply_op(vec, op, w);
            }
        }
    }
    Ok(out)
}

fn close<T: Scalar>(vec: &BTreeMap<u128, T>, width: usize, w: &Weights<T>) -> T {
    let m = 2 * width;
    let mut total = T::zero();
    for (&code, x) in vec {
        let mut s = ConnectivityState::decode(code);
        for i in 0..width {
            if let JoinOutcome::Merged(t) = s.join(i, m - 1 - i) {
                s = t;
            }
        }
        let mut weight = T::one();
        for b in 0..s.block_count() {
            weight = weight * if s.is_flagged(b) { w.qs.clone() } else { w.q.clone() };
        }
        total = total + x.clone() * weight;
    }
    total
}

fn integer_v(spec: &AnnulusSpec) -> Result<BigInt> {
    match &spec.coupling {
        Coupling::Rational(r) if r.is_integer() => Ok(r.to_integer()),
        Coupling::Rational(r) => Err(Error::Unsupported(format!(
            "exact polynomial needs an integer coupling, got {r}"
        ))),
        _ => Err(Error::Unsupported(
            "symbolic coupling is only available in numeric sector mode".into(),
        )),
    }
}

/// `Z(Q, Qs; v)` as an exact polynomial (integer `v` only).
pub fn exact_partition(spec: &AnnulusSpec) -> Result<BivariatePolynomial> {
    exact_partition_guarded(spec, &Guards::default())
}

pub fn exact_partition_guarded(spec: &AnnulusSpec, guards: &Guards) -> Result<BivariatePolynomial> {
    let v = integer_v(spec)?;
    let w = Weights::new(
        BivariatePolynomial::q(),
        BivariatePolynomial::qs(),
        BivariatePolynomial::constant(v),
    );
    exact_partition_with(spec, &w, guards)
}

/// `Z` evaluated exactly at rational weights; the coupling must be rational.
pub fn exact_partition_rational(spec: &AnnulusSpec, q: &BigRational, qs: &BigRational, guards: &Guards) -> Result<BigRational> {
    let v = match &spec.coupling {
        Coupling::Rational(r) => r.clone(),
        _ => {
            return Err(Error::Unsupported(
                "symbolic coupling is only available in numeric sector mode".into(),
            ))
        }
    };
    exact_partition_with(spec, &Weights::new(q.clone(), qs.clone(), v), guards)
}

/// `Z` specialised along `Qs = rel(Q)`: a polynomial in `Q`, or in `u = sqrt(Q)`
/// when the relation has a square-root term.
pub fn exact_partition_relation(spec: &AnnulusSpec, rel: &QsRelation, guards: &Guards) -> Result<UniPoly> {
    let v = integer_v(spec)?;
    let (a, b, c) = rel.coefficients();
    let integral = [&a, &b, &c].iter().all(|x| x.is_integer());
    if !integral {
        return Ok(exact_partition_guarded(spec, guards)?.substitute_relation(rel));
    }
    let var = if rel.has_sqrt() { Variable::SqrtQ } else { Variable::Q };
    let q = match var {
        Variable::Q => DenseInt::monomial(1),
        Variable::SqrtQ => DenseInt::monomial(2),
    };
    let qs = match rel {
        QsRelation::Constant(k) => DenseInt::constant(k.to_integer()),
        QsRelation::Affine { .. } => {
            let mut p = q.clone() * DenseInt::constant(a.to_integer()) + DenseInt::constant(b.to_integer());
            if rel.has_sqrt() {
                p = p + DenseInt::monomial(1) * DenseInt::constant(c.to_integer());
            }
            p
        }
    };
    let z = exact_partition_with(spec, &Weights::new(q, qs, DenseInt::constant(v)), guards)?;
    Ok(UniPoly::from_bigints(&z.0, var))
}

/// Dense univariate integer polynomial, used as a fast ring for
/// specialised partition functions.
#[derive(Clone, Debug, PartialEq)]
struct DenseInt(Vec<BigInt>);

impl DenseInt {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn constant(c: BigInt) -> Self {
        DenseInt(vec![c]).trim()
    }

    fn monomial(d: usize) -> Self {
        let mut v = vec![BigInt::zero(); d + 1];
        v[d] = BigInt::one();
        DenseInt(v)
    }
}

impl Add for DenseInt {
    type Output = DenseInt;
    fn add(self, rhs: DenseInt) -> DenseInt {
        let (mut long, short) = if self.0.len() >= rhs.0.len() { (self, rhs) } else { (rhs, self) };
        for (x, y) in long.0.iter_mut().zip(short.0) {
            *x += y;
        }
        long.trim()
    }
}

impl Neg for DenseInt {
    type Output = DenseInt;
    fn neg(self) -> DenseInt {
        DenseInt(self.0.into_iter().map(|c| -c).collect())
    }
}

impl Sub for DenseInt {
    type Output = DenseInt;
    fn sub(self, rhs: DenseInt) -> DenseInt {
        self + (-rhs)
    }
}

impl Mul for DenseInt {
    type Output = DenseInt;
    fn mul(self, rhs: DenseInt) -> DenseInt {
        if self.0.is_empty() || rhs.0.is_empty() {
            return DenseInt(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        DenseInt(out).trim()
    }
}

impl Zero for DenseInt {
    fn zero() -> Self {
        DenseInt(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl One for DenseInt {
    fn one() -> Self {
        DenseInt(vec![BigInt::one()])
    }
}

impl Scalar for DenseInt {
    fn from_bigint(n: &BigInt) -> Self {
        DenseInt::constant(n.clone())
    }
}

/// Whether the outermost winding cluster of a sector state has touched the rim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlobMode {
    Blobbed,
    Unblobbed,
}

impl BlobMode {
    fn admits(self, s: &ConnectivityState) -> bool {
        match (self, s.outermost_bridge()) {
            (_, None) => true,
            (BlobMode::Blobbed, Some(b)) => s.is_flagged(b),
            (BlobMode::Unblobbed, Some(b)) => !s.is_flagged(b),
        }
    }
}

/// One-slice transfer operator on a sector, stored as its elementary factors.
///
/// The sector with no winding clusters has a single block, reported as
/// [`BlobMode::Blobbed`]; the unblobbed block there is empty.
#[derive(Clone, Debug)]
pub struct SectorOperator {
    pub width: usize,
    pub ell: usize,
    pub mode: BlobMode,
    /// Rim flags erased and no blob condition: the sector of the ordinary
    /// cyclic strip, valid only at `Qs = Q`.
    pub flagless: bool,
    universe: StateBasis,
    /// Universe indices of the states the slice acts on, in basis order.
    slice: Vec<usize>,
    slice_pos: HashMap<usize, usize>,
    /// Per factor and per universe state: targets and coefficients.
    factors: Vec<Vec<Vec<(u32, Coef)>>>,
}

impl SectorOperator {
    pub fn new(spec: &AnnulusSpec, ell: usize, mode: BlobMode) -> Result<Self> {
        Self::guarded(spec, ell, mode, &Guards::default())
    }

    pub fn guarded(spec: &AnnulusSpec, ell: usize, mode: BlobMode, guards: &Guards) -> Result<Self> {
        Self::build(spec, ell, mode, false, guards)
    }

    /// At `Qs = Q` the unblobbed block of sector `ell + 1` repeats part of the
    /// spectrum of the blobbed block of sector `ell`, with opposite amplitude.
    /// This operator carries the rest, with amplitude `D_2ell(Q, Q)`.
    pub fn flagless(spec: &AnnulusSpec, ell: usize, guards: &Guards) -> Result<Self> {
        Self::build(spec, ell, BlobMode::Blobbed, true, guards)
    }

    fn build(spec: &AnnulusSpec, ell: usize, mode: BlobMode, flagless: bool, guards: &Guards) -> Result<Self> {
        spec.validate_width()?;
        let width = spec.width;
        if ell > width {
            return Err(Error::SectorOutOfRange { ell, width });
        }
        if width > guards.max_sector_width {
            return Err(Error::SizeGuard(format!(
                "sector matrices limited to W <= {}, got W = {width}",
                guards.max_sector_width
            )));
        }
        if width > crate::connectivity::MAX_SITES {
            return Err(Error::SizeGuard(format!("W = {width} too wide for the state encoding")));
        }
        let ops = slice_ops(spec);
        let keep = |t: ConnectivityState| -> Option<ConnectivityState> {
            if flagless {
                Some(t.without_flags())
            } else {
                mode.admits(&t).then_some(t)
            }
        };
        let seeds: Vec<ConnectivityState> = sector_seeds(width, ell, mode).into_iter().filter_map(keep).collect();

        // phase-aware closure: inputs[f] are the states factor f acts on
        let mut slice_set: BTreeSet<u128> = seeds.iter().map(|s| s.encode()).collect();
        let mut frontier: Vec<u128> = slice_set.iter().copied().collect();
        let mut inputs: Vec<BTreeSet<u128>> = vec![BTreeSet::new(); ops.len()];
        while !frontier.is_empty() {
            let mut layer: BTreeSet<u128> = frontier.iter().copied().collect();
            for (f, &op) in ops.iter().enumerate() {
                let fresh: Vec<u128> = layer.iter().filter(|c| !inputs[f].contains(c)).copied().collect();
                inputs[f].extend(fresh.iter().copied());
                let mut next = BTreeSet::new();
                for code in fresh {
                    let s = ConnectivityState::decode(code);
                    for (t, _) in transitions(&s, op) {
                        if let Some(t) = keep(t) {
                            next.insert(t.encode());
                        }
                    }
                }
                layer = next;
            }
            frontier = layer.into_iter().filter(|c| slice_set.insert(*c)).collect();
        }

        let mut all: BTreeSet<u128> = slice_set.clone();
        for set in &inputs {
            all.extend(set.iter().copied());
        }
        let universe = StateBasis::from_states(all.iter().map(|&c| ConnectivityState::decode(c)));
        let slice: Vec<usize> = slice_set
            .iter()
            .map(|&c| universe.index_of(&ConnectivityState::decode(c)).unwrap())
            .collect();
        let slice_pos = slice.iter().enumerate().map(|(p, &u)| (u, p)).collect();
        let factors = ops
            .iter()
            .zip(&inputs)
            .map(|(&op, set)| {
                let mut table = vec![Vec::new(); universe.len()];
                for &code in set {
                    let s = ConnectivityState::decode(code);
                    let i = universe.index_of(&s).unwrap();
                    table[i] = transitions(&s, op)
                        .into_iter()
                        .filter_map(|(t, c)| keep(t).map(|t| (universe.index_of(&t).unwrap() as u32, c)))
                        .collect();
                }
                table
            })
            .collect();
        Ok(SectorOperator {
            width,
            ell,
            mode,
            flagless,
            universe,
            slice,
            slice_pos,
            factors,
        })
    }

    pub fn dim(&self) -> usize {
        self.slice.len()
    }

    pub fn state(&self, i: usize) -> &ConnectivityState {
        self.universe.get(self.slice[i])
    }

    pub fn states(&self) -> impl Iterator<Item = &ConnectivityState> {
        self.slice.iter().map(|&u| self.universe.get(u))
    }

    /// `y = T x` on the slice basis.
    pub fn apply<T: Scalar>(&self, w: &Weights<T>, x: &[T]) -> Vec<T> {
        let coefs = [Coef::One, Coef::V, Coef::Q, Coef::Qs].map(|c| w.coef(c));
        let idx = |c: Coef| match c {
            Coef::One => 0,
            Coef::V => 1,
            Coef::Q => 2,
            Coef::Qs => 3,
        };
        let mut y: Vec<Option<T>> = vec![None; self.universe.len()];
        for (p, &u) in self.slice.iter().enumerate() {
            if !x[p].is_zero() {
                y[u] = Some(x[p].clone());
            }
        }
        for table in &self.factors {
            let mut z: Vec<Option<T>> = vec![None; self.universe.len()];
            for (i, val) in y.into_iter().enumerate() {
                let Some(val) = val else { continue };
                for &(t, c) in &table[i] {
                    let term = val.clone() * coefs[idx(c)].clone();
                    let slot = &mut z[t as usize];
                    *slot = Some(match slot.take() {
                        Some(acc) => acc + term,
                        None => term,
                    });
                }
            }
            y = z;
        }
        let mut out = vec![T::zero(); self.dim()];
        for (u, val) in y.into_iter().enumerate() {
            if let Some(val) = val {
                let p = self.slice_pos[&u];
                out[p] = val;
            }
        }
        out
    }

    /// Dense matrix, `m[i][j]` = coefficient of state `i` in `T e_j`.
    pub fn dense<T: Scalar + Send + Sync>(&self, w: &Weights<T>) -> Vec<Vec<T>> {
        let n = self.dim();
        let cols: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                self.apply(w, &e)
            })
            .collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn dense_complex(&self, w: &Weights<Complex64>) -> nalgebra::DMatrix<Complex64> {
        let m = self.dense(w);
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j])
    }
}

/// Initial sector states: singletons with `ell` bridges.
fn sector_seeds(width: usize, ell: usize, mode: BlobMode) -> Vec<ConnectivityState> {
    let mut out = Vec::new();
    if ell == 0 {
        if mode == BlobMode::Blobbed {
            out.push(ConnectivityState::singletons(width, |i| i + 1 == width));
        }
        return out;
    }
    for mask in 0u32..(1 << width) {
        if mask.count_ones() as usize != ell {
            continue;
        }
        let mut s = ConnectivityState::singletons(width, |i| i + 1 == width);
        for i in 0..width {
            if mask >> i & 1 == 1 {
                s = s.with_bridge(s.block_of(i));
            }
        }
        let outer = s.outermost_bridge().unwrap();
        let s = match mode {
            BlobMode::Blobbed => s.with_flag(outer),
            BlobMode::Unblobbed => s,
        };
        if mode.admits(&s) {
            out.push(s);
        }
    }
    out
}

/// Convenience: dense complex sector matrix at the given weights.
pub fn sector_matrix(
    spec: &AnnulusSpec,
    ell: usize,
    mode: BlobMode,
    w: &Weights<Complex64>,
) -> Result<nalgebra::DMatrix<Complex64>> {
    Ok(SectorOperator::new(spec, ell, mode)?.dense_complex(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fk_bruteforce;
    use crate::graphs::build_annulus;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn matches_subset_expansion() {
        for spec in [
            AnnulusSpec::square(1, 3),
            AnnulusSpec::square(2, 2),
            AnnulusSpec::triangular(2, 3),
            AnnulusSpec::square(3, 2),
        ] {
            let g = build_annulus(&spec).unwrap();
            assert_eq!(exact_partition(&spec).unwrap(), fk_bruteforce(&g).unwrap(), "{spec:?}");
        }
    }

    #[test]
    fn series_matches_single_lengths() {
        let w = Weights::new(BigRational::new(7.into(), 3.into()), BigRational::new((-1).into(), 2.into()), BigRational::from_integer((-1).into()));
        for spec in [AnnulusSpec::square(2, 2), AnnulusSpec::triangular(3, 2)] {
            let series = exact_partition_series(&spec, &w, &Guards::default(), 6).unwrap();
            for (i, z) in series.iter().enumerate() {
                let one = AnnulusSpec { length: i + 2, ..spec.clone() };
                assert_eq!(*z, exact_partition_with(&one, &w, &Guards::default()).unwrap());
            }
        }
    }

    #[test]
    fn cycle_value() {
        let p = exact_partition(&AnnulusSpec::square(1, 3)).unwrap();
        assert_eq!(p.eval(&BigInt::from(5), &BigInt::from(3)), BigInt::from(6));
    }

    #[test]
    fn width_one_sector_entries() {
        let spec = AnnulusSpec::square(1, 4);
        let w = Weights::new(c(2.5), c(0.7), c(-1.3));
        let m0 = sector_matrix(&spec, 0, BlobMode::Blobbed, &w).unwrap();
        assert_eq!(m0.shape(), (1, 1));
        assert!((m0[(0, 0)] - c(0.7 - 1.3)).norm() < 1e-14);
        let m1 = sector_matrix(&spec, 1, BlobMode::Blobbed, &w).unwrap();
        assert!((m1[(0, 0)] - c(-1.3)).norm() < 1e-14);
        assert_eq!(SectorOperator::new(&spec, 1, BlobMode::Unblobbed).unwrap().dim(), 0);
        assert!(matches!(
            SectorOperator::new(&spec, 2, BlobMode::Blobbed),
            Err(Error::SectorOutOfRange { .. })
        ));
    }

    #[test]
    fn relation_specialisation_matches_substitution() {
        let spec = AnnulusSpec::triangular(2, 4);
        let rel: QsRelation = "Qs=Q-2".parse().unwrap();
        let fast = exact_partition_relation(&spec, &rel, &Guards::default()).unwrap();
        let slow = exact_partition(&spec).unwrap().substitute_relation(&rel);
        assert_eq!(fast, slow);
        let rel: QsRelation = "Qs=Q-sqrtQ".parse().unwrap();
        let fast = exact_partition_relation(&spec, &rel, &Guards::default()).unwrap();
        assert_eq!(fast, exact_partition(&spec).unwrap().substitute_relation(&rel));
    }

    #[test]
    fn size_guard() {
        assert!(matches!(exact_partition(&AnnulusSpec::square(5, 3)), Err(Error::SizeGuard(_))));
        let spec = AnnulusSpec::square(2, 3).with_coupling(Coupling::PlusSqrtQ);
        assert!(matches!(exact_partition(&spec), Err(Error::Unsupported(_))));
    }
}
