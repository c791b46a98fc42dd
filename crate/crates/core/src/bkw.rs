//! Limiting zero structure from sector spectra: equimodular curves, where
//! two dominant eigenvalues share a modulus, and isolated points, where the
//! amplitude of a unique dominant eigenvalue vanishes.

use crate::algebra::QsRelation;
use crate::config::Guards;
use crate::error::Result;
use crate::graphs::AnnulusSpec;
use crate::spectra::dense_eigenvalues;
use crate::theory::{self, amplitude_d, amplitude_d_unblobbed};
use crate::transfer::{BlobMode, SectorOperator, Weights};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Unique-dominance margin on the modulus ratio.
pub const DELTA: f64 = 1e-6;
/// Precision of edge and real-axis refinement in `q`.
pub const REFINE_TOL: f64 = 1e-8;

/// Eigenvalues of one invariant block, all sharing one amplitude.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub amplitude: Complex64,
}

/// Anything that yields contributing eigenvalues, grouped in blocks, at a
/// complex point. Block order must not depend on `q`.
pub trait SpectrumSource: Sync {
    fn blocks(&self, q: Complex64) -> Result<Vec<BlockSpectrum>>;
    /// `(ell, mode)` or any label for block `b`.
    fn label(&self, b: usize) -> (usize, BlobMode);
}

/// Sector blocks of an annulus with `Qs = rel(Q)`. Blocks whose amplitude
/// vanishes identically along the relation are dropped.
pub struct AnnulusSource {
    spec: AnnulusSpec,
    rel: QsRelation,
    ops: Vec<SectorOperator>,
}

fn block_amplitude(ell: usize, mode: BlobMode, q: Complex64, qs: Complex64) -> Complex64 {
    let l = 2 * ell as u32;
    match mode {
        BlobMode::Blobbed => amplitude_d(l, &q, &qs),
        BlobMode::Unblobbed => amplitude_d_unblobbed(l, &q, &qs),
    }
}

impl AnnulusSource {
    pub fn new(spec: &AnnulusSpec, rel: &QsRelation, guards: &Guards) -> Result<Self> {
        let probes = [
            Complex64::new(0.37, 0.11),
            Complex64::new(1.9, -0.7),
            Complex64::new(-2.3, 1.3),
        ];
        let mut ops = Vec::new();
        for mode in [BlobMode::Blobbed, BlobMode::Unblobbed] {
            for ell in 0..=spec.width {
                let op = SectorOperator::guarded(spec, ell, mode, guards)?;
                let structural_zero = probes
                    .iter()
                    .all(|&q| block_amplitude(ell, mode, q, rel.eval_complex(q)).norm() < 1e-12);
                if op.dim() > 0 && !structural_zero {
                    ops.push(op);
                }
            }
        }
        Ok(AnnulusSource {
            spec: spec.clone(),
            rel: rel.clone(),
            ops,
        })
    }
}

impl SpectrumSource for AnnulusSource {
    fn blocks(&self, q: Complex64) -> Result<Vec<BlockSpectrum>> {
        let qs = self.rel.eval_complex(q);
        let w = Weights::complex(q, qs, &self.spec.coupling);
        Ok(self
            .ops
            .iter()
            .map(|op| BlockSpectrum {
                eigenvalues: dense_eigenvalues(&op.dense_complex(&w)),
                amplitude: block_amplitude(op.ell, op.mode, q, qs),
            })
            .collect())
    }

    fn label(&self, b: usize) -> (usize, BlobMode) {
        (self.ops[b].ell, self.ops[b].mode)
    }
}

/// Dominant and runner-up among contributing eigenvalues.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Dominance {
    pub lambda1: Complex64,
    pub lambda2: Option<Complex64>,
    /// `|lambda2| / |lambda1|`, 0 with a single eigenvalue.
    pub ratio: f64,
    pub block: usize,
    pub index: usize,
    pub amplitude: Complex64,
}

fn same(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * a.norm().max(b.norm()).max(1e-300)
}

pub fn dominance(blocks: &[BlockSpectrum]) -> Option<Dominance> {
    let mut all: Vec<(Complex64, usize, usize)> = Vec::new();
    for (b, bl) in blocks.iter().enumerate() {
        for (i, &z) in bl.eigenvalues.iter().enumerate() {
            if z.norm() > 0.0 {
                all.push((z, b, i));
            }
        }
    }
    all.sort_by(|x, y| {
        y.0.norm()
            .total_cmp(&x.0.norm())
            .then(y.0.re.total_cmp(&x.0.re))
            .then(y.0.im.total_cmp(&x.0.im))
    });
    let &(l1, b, i) = all.first()?;
    let mut amplitude = Complex64::new(0.0, 0.0);
    for &(z, bb, _) in &all {
        if same(z, l1) {
            amplitude += blocks[bb].amplitude;
        }
    }
    let l2 = all.iter().map(|x| x.0).find(|&z| !same(z, l1));
    Some(Dominance {
        lambda1: l1,
        lambda2: l2,
        ratio: l2.map_or(0.0, |z| z.norm() / l1.norm()),
        block: b,
        index: i,
        amplitude,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Default for Region {
    fn default() -> Self {
        Region {
            re: (-1.0, 5.0),
            im: (-3.0, 3.0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Node {
    pub q: Complex64,
    pub dominance: Option<Dominance>,
    /// Dominant sector label, `L = 2 ell`.
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub mode: Option<BlobMode>,
}

/// Dominance data on a rectangular grid of `nx * ny` nodes.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceMap {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `ny` rows of `nx` nodes, imaginary part increasing.
    pub nodes: Vec<Node>,
}

impl DominanceMap {
    pub fn node(&self, i: usize, j: usize) -> &Node {
        &self.nodes[j * self.nx + i]
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        grid_point(&self.region, self.nx, self.ny, i, j)
    }
}

fn grid_point(r: &Region, nx: usize, ny: usize, i: usize, j: usize) -> Complex64 {
    let fx = if nx > 1 { i as f64 / (nx - 1) as f64 } else { 0.0 };
    let fy = if ny > 1 { j as f64 / (ny - 1) as f64 } else { 0.0 };
    Complex64::new(r.re.0 + (r.re.1 - r.re.0) * fx, r.im.0 + (r.im.1 - r.im.0) * fy)
}

pub fn dominance_grid<S: SpectrumSource>(src: &S, region: Region, nx: usize, ny: usize) -> DominanceMap {
    let nodes = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let q = grid_point(&region, nx, ny, k % nx, k / nx);
            let dominance = src.blocks(q).ok().and_then(|b| dominance(&b));
            let label = dominance.map(|d| src.label(d.block));
            Node {
                q,
                dominance,
                l: label.map(|x| 2 * x.0),
                mode: label.map(|x| x.1),
            }
        })
        .collect();
    DominanceMap { region, nx, ny, nodes }
}

/// Follows eigenvalue `index` of `block` from `a` to `b` by nearest matching.
fn track<S: SpectrumSource>(src: &S, block: usize, start: Complex64, a: Complex64, b: Complex64, steps: usize) -> Option<Complex64> {
    let mut cur = start;
    for k in 1..=steps {
        let q = a + (b - a) * (k as f64 / steps as f64);
        let bl = src.blocks(q).ok()?;
        cur = *bl[block]
            .eigenvalues
            .iter()
            .min_by(|x, y| (*x - cur).norm().total_cmp(&(*y - cur).norm()))?;
    }
    Some(cur)
}

const TRACK_STEPS: usize = 8;

fn still_dominant(tracked: Complex64, dom: &Dominance) -> bool {
    same(tracked, dom.lambda1) || tracked.norm() >= dom.lambda1.norm() * (1.0 - 1e-12)
}

/// Whether the dominant branch at `a` has been overtaken by `b`.
fn switches<S: SpectrumSource>(src: &S, a: Complex64, da: &Dominance, b: Complex64, db: &Dominance) -> bool {
    track(src, da.block, da.lambda1, a, b, TRACK_STEPS).is_some_and(|z| !still_dominant(z, db))
}

/// Point on segment `[a, b]` where the dominant branch at `a` is overtaken.
fn refine_switch<S: SpectrumSource>(src: &S, a: Complex64, b: Complex64) -> Option<Complex64> {
    let mut lo = a;
    let mut hi = b;
    let mut dlo = dominance(&src.blocks(lo).ok()?)?;
    while (hi - lo).norm() > REFINE_TOL {
        let mid = (lo + hi) * 0.5;
        let dm = dominance(&src.blocks(mid).ok()?)?;
        let tracked = track(src, dlo.block, dlo.lambda1, lo, mid, 2)?;
        if still_dominant(tracked, &dm) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * 0.5)
}

/// Polyline of an equimodular branch.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub id: usize,
    pub points: Vec<Complex64>,
}

/// Marching squares over the map: an edge is cut where the dominant branch at
/// one end is overtaken before the other; cut points are refined by
/// bisection and joined cell by cell into polylines.
pub fn trace_equimodular<S: SpectrumSource>(src: &S, map: &DominanceMap) -> Vec<Branch> {
    let (nx, ny) = (map.nx, map.ny);
    // edge ids: horizontal (i,j)-(i+1,j) -> j*(nx-1)+i; vertical offset after
    let h_id = |i: usize, j: usize| j * (nx - 1) + i;
    let v_id = |i: usize, j: usize| ny * (nx - 1) + j * nx + i;
    type Edge = (usize, (usize, usize), (usize, usize));
    let mut edges: Vec<Edge> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                edges.push((h_id(i, j), (i, j), (i + 1, j)));
            }
            if j + 1 < ny {
                edges.push((v_id(i, j), (i, j), (i, j + 1)));
            }
        }
    }
    let cuts: BTreeMap<usize, Complex64> = edges
        .par_iter()
        .filter_map(|&(id, p, r)| {
            let (na, nb) = (map.node(p.0, p.1), map.node(r.0, r.1));
            let (da, db) = (na.dominance?, nb.dominance?);
            if !switches(src, na.q, &da, nb.q, &db) && !switches(src, nb.q, &db, na.q, &da) {
                return None;
            }
            refine_switch(src, na.q, nb.q).map(|z| (id, z))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let ids = [h_id(i, j), v_id(i + 1, j), h_id(i, j + 1), v_id(i, j)];
            let hit: Vec<usize> = ids.into_iter().filter(|e| cuts.contains_key(e)).collect();
            let pairs: Vec<(usize, usize)> = match hit.len() {
                2 => vec![(hit[0], hit[1])],
                4 => {
                    let d = |a: usize, b: usize| (cuts[&a] - cuts[&b]).norm();
                    if d(hit[0], hit[1]) + d(hit[2], hit[3]) <= d(hit[0], hit[3]) + d(hit[1], hit[2]) {
                        vec![(hit[0], hit[1]), (hit[2], hit[3])]
                    } else {
                        vec![(hit[0], hit[3]), (hit[1], hit[2])]
                    }
                }
                3 => {
                    // pair the closest two
                    let d = |a: usize, b: usize| (cuts[&a] - cuts[&b]).norm();
                    let cands = [(hit[0], hit[1]), (hit[0], hit[2]), (hit[1], hit[2])];
                    vec![*cands.iter().min_by(|x, y| d(x.0, x.1).total_cmp(&d(y.0, y.1))).unwrap()]
                }
                _ => vec![],
            };
            for (a, b) in pairs {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    // open chains first, from their ends, then closed loops
    let mut starts: Vec<usize> = adj.iter().filter(|(_, n)| n.len() == 1).map(|(&k, _)| k).collect();
    starts.extend(cuts.keys().copied());
    for s in starts {
        if seen.contains(&s) {
            continue;
        }
        let mut chain = vec![s];
        seen.insert(s);
        let mut cur = s;
        loop {
            let next = adj
                .get(&cur)
                .and_then(|n| n.iter().find(|x| !seen.contains(*x)).copied());
            match next {
                Some(n) => {
                    seen.insert(n);
                    chain.push(n);
                    cur = n;
                }
                None => break,
            }
        }
        if let Some(n) = adj.get(&cur) {
            if chain.len() > 2 && n.contains(&s) {
                chain.push(s);
            }
        }
        out.push(Branch {
            id: out.len(),
            points: chain.iter().map(|e| cuts[e]).collect(),
        });
    }
    out
}

pub fn branches_to_csv(branches: &[Branch]) -> String {
    let mut s = String::from("branch_id,re,im\n");
    for b in branches {
        for z in &b.points {
            s.push_str(&format!("{},{:.12},{:.12}\n", b.id, z.re, z.im));
        }
    }
    s
}

/// Real points where a traced branch meets the real axis: cut points with
/// vanishing imaginary part and sign changes of `Im` along a polyline.
pub fn real_axis_hits(branches: &[Branch], tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for b in branches {
        for (k, z) in b.points.iter().enumerate() {
            if z.im.abs() <= tol {
                out.push(z.re);
            } else if let Some(w) = b.points.get(k + 1) {
                if w.im.abs() > tol && z.im.signum() != w.im.signum() {
                    out.push(z.re - z.im * (w.re - z.re) / (w.im - z.im));
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    out
}

/// Equimodular crossings on a real interval, sampled at `samples` points and
/// refined by bisection.
pub fn real_axis_crossings<S: SpectrumSource>(src: &S, interval: (f64, f64), samples: usize) -> Vec<f64> {
    let pts: Vec<Complex64> = (0..samples)
        .map(|k| Complex64::new(interval.0 + (interval.1 - interval.0) * k as f64 / (samples - 1) as f64, 0.0))
        .collect();
    let doms: Vec<Option<Dominance>> = pts
        .par_iter()
        .map(|&q| src.blocks(q).ok().and_then(|b| dominance(&b)))
        .collect();
    let mut out = Vec::new();
    for k in 0..samples - 1 {
        let (Some(da), Some(db)) = (doms[k], doms[k + 1]) else { continue };
        if switches(src, pts[k], &da, pts[k + 1], &db) || switches(src, pts[k + 1], &db, pts[k], &da) {
            if let Some(z) = refine_switch(src, pts[k], pts[k + 1]) {
                out.push(z.re);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct IsolatedPoint {
    pub q: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub mode: BlobMode,
    /// Beraha index `t` with `B_t = q`, when `q` lies in `(0, 4)`.
    pub t_estimate: Option<f64>,
    pub ratio: f64,
}

/// Zeros of the dominant amplitude on a real interval, kept where the
/// dominant eigenvalue is unique.
pub fn isolated_points(src: &AnnulusSource, interval: (f64, f64), samples: usize) -> Vec<IsolatedPoint> {
    let pts: Vec<f64> = (0..samples)
        .map(|k| interval.0 + (interval.1 - interval.0) * k as f64 / (samples - 1) as f64)
        .collect();
    let doms: Vec<Option<Dominance>> = pts
        .par_iter()
        .map(|&q| src.blocks(Complex64::new(q, 0.0)).ok().and_then(|b| dominance(&b)))
        .collect();
    let amp = |block: usize, q: f64| -> f64 {
        let (ell, mode) = src.label(block);
        let qc = Complex64::new(q, 0.0);
        block_amplitude(ell, mode, qc, src.rel.eval_complex(qc)).re
    };
    let mut out: Vec<IsolatedPoint> = Vec::new();
    for k in 0..samples - 1 {
        let (Some(da), Some(db)) = (doms[k], doms[k + 1]) else { continue };
        if da.block != db.block {
            continue;
        }
        let (fa, fb) = (amp(da.block, pts[k]), amp(da.block, pts[k + 1]));
        let root = if fa == 0.0 {
            pts[k]
        } else if fa * fb < 0.0 {
            match theory::bisect(|q| amp(da.block, q), pts[k], pts[k + 1], 1e-13) {
                Ok(r) => r,
                Err(_) => continue,
            }
        } else {
            continue;
        };
        let Some(d) = src.blocks(Complex64::new(root, 0.0)).ok().and_then(|b| dominance(&b)) else { continue };
        if d.block != da.block || d.ratio >= 1.0 - DELTA {
            continue;
        }
        if out.last().is_some_and(|p| (p.q - root).abs() < 1e-9) {
            continue;
        }
        let (ell, mode) = src.label(d.block);
        out.push(IsolatedPoint {
            q: root,
            l: 2 * ell,
            mode,
            t_estimate: theory::beraha_index(root),
            ratio: d.ratio,
        });
    }
    out
}

pub fn isolated_to_csv(points: &[IsolatedPoint]) -> String {
    let mut s = String::from("re,L,t_estimate\n");
    for p in points {
        let t = p.t_estimate.map_or("nan".to_string(), |t| format!("{t:.10}"));
        s.push_str(&format!("{:.12},{},{}\n", p.q, p.l, t));
    }
    s
}
