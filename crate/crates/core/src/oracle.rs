//! Exponential-time ground truth on tiny graphs: subset expansion, proper
//! colouring counts and loop counting on the medial graph.

use crate::algebra::{pow, BivariatePolynomial, Scalar};
use crate::config::{MAX_COLORINGS, MAX_FK_EDGES, MAX_LOOP_EDGES};
use crate::error::{Error, Result};
use crate::graphs::{Coupling, Graph};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Per-subset statistics of the cluster and loop pictures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetStats {
    /// Connected components of `(V, A)`, isolated vertices included.
    pub k: usize,
    /// Components containing a boundary vertex.
    pub k_s: usize,
    pub size: usize,
    pub loops: usize,
    pub boundary_loops: usize,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

fn clusters(g: &Graph, mask: u64) -> (Dsu, usize, usize) {
    let n = g.vertex_count();
    let mut dsu = Dsu::new(n);
    let mut k = n;
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if mask >> e & 1 == 1 && dsu.union(a, b) {
            k -= 1;
        }
    }
    let mut seen = vec![false; n];
    let mut k_s = 0;
    for &b in g.boundary() {
        let r = dsu.find(b);
        if !seen[r] {
            seen[r] = true;
            k_s += 1;
        }
    }
    (dsu, k, k_s)
}

/// Histogram of `(k - k_s, k_s, |A|)` over all edge subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FkTable {
    counts: BTreeMap<(u32, u32, u32), u64>,
}

impl FkTable {
    pub fn counts(&self) -> &BTreeMap<(u32, u32, u32), u64> {
        &self.counts
    }

    /// The expansion at integer coupling `v` as a polynomial in `(Q, Qs)`.
    pub fn polynomial(&self, v: &BigInt) -> BivariatePolynomial {
        let mut p = BivariatePolynomial::zero();
        for (&(bulk, bdry, a), &c) in &self.counts {
            p.add_term(bulk, bdry, BigInt::from(c) * num_traits::pow(v.clone(), a as usize));
        }
        p
    }

    pub fn eval<T: Scalar>(&self, q: &T, qs: &T, v: &T) -> T {
        let mut acc = T::zero();
        for (&(bulk, bdry, a), &c) in &self.counts {
            acc = acc + T::from_i64(c as i64) * pow(q, bulk) * pow(qs, bdry) * pow(v, a);
        }
        acc
    }
}

fn check_edge_cap(g: &Graph, cap: usize) -> Result<()> {
    if g.edges().len() > cap {
        return Err(Error::SizeGuard(format!(
            "{} edges exceeds the enumeration cap of {cap}",
            g.edges().len()
        )));
    }
    Ok(())
}

pub fn fk_table(g: &Graph) -> Result<FkTable> {
    check_edge_cap(g, MAX_FK_EDGES)?;
    let total = 1u64 << g.edges().len();
    let counts = (0..total)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<(u32, u32, u32), u64>, mask| {
            let (_, k, k_s) = clusters(g, mask);
            *acc.entry(((k - k_s) as u32, k_s as u32, mask.count_ones()))
                .or_default() += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, c) in b {
                *a.entry(key).or_default() += c;
            }
            a
        });
    Ok(FkTable { counts })
}

fn integer_coupling(c: &Coupling) -> Result<BigInt> {
    match c {
        Coupling::Rational(r) if r.is_integer() => Ok(r.to_integer()),
        Coupling::Rational(r) => Err(Error::Unsupported(format!(
            "polynomial output needs an integer coupling, got {r}"
        ))),
        _ => Err(Error::Unsupported(
            "symbolic coupling is only available numerically".into(),
        )),
    }
}

/// Subset expansion as an exact polynomial at the graph's (integer) coupling.
pub fn fk_bruteforce(g: &Graph) -> Result<BivariatePolynomial> {
    let v = integer_coupling(g.coupling())?;
    Ok(fk_table(g)?.polynomial(&v))
}

/// Subset expansion evaluated at numeric weights.
pub fn fk_value<T: Scalar>(g: &Graph, q: &T, qs: &T, v: &T) -> Result<T> {
    Ok(fk_table(g)?.eval(q, qs, v))
}

/// Number of proper colourings with bulk colours `1..=q` and boundary colours
/// `1..=qs`.
pub fn coloring_count(g: &Graph, q: u32, qs: u32) -> Result<BigInt> {
    if q == 0 || qs == 0 || qs > q {
        return Err(Error::InvalidSpec(format!(
            "need 1 <= Qs <= Q, got Q={q}, Qs={qs}"
        )));
    }
    let n = g.vertex_count();
    let space = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space > MAX_COLORINGS {
        return Err(Error::SizeGuard(format!("{q}^{n} colourings exceeds cap")));
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let limit: Vec<u32> = (0..n).map(|v| if g.is_boundary(v) { qs } else { q }).collect();
    let mut colour = vec![u32::MAX; n];

    fn go(v: usize, adj: &[Vec<usize>], limit: &[u32], colour: &mut [u32]) -> u64 {
        if v == colour.len() {
            return 1;
        }
        let mut total = 0;
        for c in 0..limit[v] {
            if adj[v].iter().all(|&u| colour[u] != c) {
                colour[v] = c;
                total += go(v + 1, adj, limit, colour);
            }
        }
        colour[v] = u32::MAX;
        total
    }

    Ok(BigInt::from(go(0, &adj, &limit, &mut colour)))
}

fn polygon_area(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        / 2.0
}

fn winding(pts: &[(f64, f64)], p: (f64, f64)) -> i64 {
    let n = pts.len();
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let a0 = (a.1 - p.1).atan2(a.0 - p.0);
        let b0 = (b.1 - p.1).atan2(b.0 - p.0);
        let mut d = b0 - a0;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Cluster and loop statistics of one subset, the loops found by walking the
/// faces of the embedded subgraph.
pub fn loop_subset_stats(g: &Graph, mask: u64) -> Result<SubsetStats> {
    let emb = g
        .embedding()
        .ok_or_else(|| Error::Unsupported("loop counting needs an annulus embedding".into()))?;
    let n = g.vertex_count();
    let edges = g.edges();
    let (mut dsu, k, k_s) = clusters(g, mask);
    let in_a = |e: usize| mask >> e & 1 == 1;
    let size = mask.count_ones() as usize;

    let mut loops = 0;
    let mut boundary_loops = 0;
    let mut touched = vec![false; n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        if in_a(e) {
            touched[a] = true;
            touched[b] = true;
        }
    }
    for (v, &seen) in touched.iter().enumerate().take(n) {
        if !seen {
            loops += 1;
            if g.is_boundary(v) {
                boundary_loops += 1;
            }
        }
    }

    // dart 2e runs first -> second endpoint, dart 2e+1 the reverse
    let head = |d: usize| {
        let (a, b) = edges[d / 2];
        if d.is_multiple_of(2) {
            b
        } else {
            a
        }
    };
    let mut used = vec![false; 2 * edges.len()];
    for start in 0..2 * edges.len() {
        if used[start] || !in_a(start / 2) {
            continue;
        }
        let mut pts = Vec::new();
        let mut on_walk = Vec::new();
        let mut d = start;
        loop {
            used[d] = true;
            let path = &emb.paths[d / 2];
            if d % 2 == 0 {
                pts.extend_from_slice(&path[..path.len() - 1]);
            } else {
                pts.extend(path.iter().rev().take(path.len() - 1));
            }
            let w = head(d);
            on_walk.push(w);
            let rot = &emb.rotation[w];
            let pos = rot.iter().position(|&x| x == d / 2).expect("edge in rotation");
            let next_edge = (1..=rot.len())
                .map(|i| rot[(pos + i) % rot.len()])
                .find(|&x| in_a(x))
                .expect("arrival edge is in A");
            d = if edges[next_edge].0 == w {
                2 * next_edge
            } else {
                2 * next_edge + 1
            };
            if d == start {
                break;
            }
        }
        loops += 1;
        let root = dsu.find(on_walk[0]);
        // faces lie to the right of the walk: bounded ones run clockwise
        let outer = polygon_area(&pts) >= -1e-9;
        let is_boundary = g.boundary().iter().any(|&u| {
            let inside = winding(&pts, emb.positions[u]) != 0 && !on_walk.contains(&u);
            if outer {
                inside || dsu.find(u) == root
            } else {
                inside
            }
        });
        if is_boundary {
            boundary_loops += 1;
        }
    }
    Ok(SubsetStats {
        k,
        k_s,
        size,
        loops,
        boundary_loops,
    })
}

/// Loop expansion of an embedded annulus graph at its (integer) coupling.
pub fn loop_bruteforce(g: &Graph) -> Result<BivariatePolynomial> {
    check_edge_cap(g, MAX_LOOP_EDGES)?;
    if g.embedding().is_none() {
        return Err(Error::Unsupported("loop counting needs an annulus embedding".into()));
    }
    let v = integer_coupling(g.coupling())?;
    let nv = g.vertex_count() as i64;
    let total = 1u64 << g.edges().len();
    let stats: Vec<SubsetStats> = (0..total)
        .into_par_iter()
        .map(|m| loop_subset_stats(g, m))
        .collect::<Result<_>>()?;
    let mut p = BivariatePolynomial::zero();
    for s in stats {
        let twice = nv + s.loops as i64 - s.size as i64;
        let bulk = twice / 2 - s.boundary_loops as i64;
        if twice % 2 != 0 || bulk < 0 {
            return Err(Error::InvalidGraph(format!(
                "loop weights are not polynomial: loops={}, |A|={}",
                s.loops, s.size
            )));
        }
        p.add_term(
            bulk as u32,
            s.boundary_loops as u32,
            num_traits::pow(v.clone(), s.size),
        );
    }
    Ok(p)
}

/// Exact value of the expansion at integer weights.
pub fn fk_integer_value(g: &Graph, q: i64, qs: i64) -> Result<BigInt> {
    let v = integer_coupling(g.coupling())?;
    let t = fk_table(g)?;
    let mut acc = BigInt::zero();
    for (&(bulk, bdry, a), &c) in t.counts() {
        acc += BigInt::from(c)
            * num_traits::pow(BigInt::from(q), bulk as usize)
            * num_traits::pow(BigInt::from(qs), bdry as usize)
            * num_traits::pow(v.clone(), a as usize);
    }
    Ok(acc)
}
