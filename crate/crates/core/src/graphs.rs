//! Annulus strip graphs and small fixture graphs.
//!
//! Vertex `(row, slice)` of a `W x N` strip has id `slice * W + row`. Rows are
//! free in the transverse direction, slices are periodic. Row `W - 1` is the
//! outer rim and forms the boundary set `V_s`.

use crate::algebra::parse_rational;
use crate::error::{Error, Result};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Square,
    Triangular,
}

impl FromStr for Lattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" | "sq" => Ok(Lattice::Square),
            "triangular" | "tri" => Ok(Lattice::Triangular),
            _ => Err(Error::Parse(format!("unknown lattice `{s}`"))),
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lattice::Square => "square",
            Lattice::Triangular => "triangular",
        })
    }
}

/// Uniform edge coupling `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coupling {
    Rational(BigRational),
    /// `v = +sqrt(Q)` (principal branch); numeric modes only.
    PlusSqrtQ,
    /// `v = -sqrt(Q)` (principal branch); numeric modes only.
    MinusSqrtQ,
}

impl Coupling {
    /// The chromatic line `v = -1`.
    pub fn chromatic() -> Self {
        Coupling::Rational(BigRational::from_integer((-1).into()))
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, Coupling::Rational(_))
    }
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling::chromatic()
    }
}

impl FromStr for Coupling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+sqrtQ" | "sqrtQ" => Ok(Coupling::PlusSqrtQ),
            "-sqrtQ" => Ok(Coupling::MinusSqrtQ),
            other => parse_rational(other)
                .map(Coupling::Rational)
                .ok_or_else(|| Error::Parse(format!("bad coupling `{other}`"))),
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Rational(r) => write!(f, "{r}"),
            Coupling::PlusSqrtQ => f.write_str("+sqrtQ"),
            Coupling::MinusSqrtQ => f.write_str("-sqrtQ"),
        }
    }
}

impl Serialize for Coupling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A `W x N` annulus strip with the boundary on the outer rim.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub lattice: Lattice,
    pub width: usize,
    pub length: usize,
    #[serde(default)]
    pub coupling: Coupling,
}

impl AnnulusSpec {
    pub fn new(lattice: Lattice, width: usize, length: usize) -> Self {
        AnnulusSpec {
            lattice,
            width,
            length,
            coupling: Coupling::chromatic(),
        }
    }

    pub fn square(width: usize, length: usize) -> Self {
        Self::new(Lattice::Square, width, length)
    }

    pub fn triangular(width: usize, length: usize) -> Self {
        Self::new(Lattice::Triangular, width, length)
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    /// Width-only validation, for callers that never build the full strip.
    pub fn validate_width(&self) -> Result<()> {
        if self.width < 1 {
            return Err(Error::InvalidSpec("width must be at least 1".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_width()?;
        if self.length < 1 {
            return Err(Error::InvalidSpec("circumference must be at least 1".into()));
        }
        if self.length == 1 {
            return Err(Error::InvalidSpec(
                "circumference 1 closes time-like edges into self-loops".into(),
            ));
        }
        Ok(())
    }

    pub fn vertex(&self, row: usize, slice: usize) -> usize {
        (slice % self.length) * self.width + row
    }

    pub fn rim_row(&self) -> usize {
        self.width - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.width * self.length
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    TimeLike,
    SpaceLike,
    Diagonal,
    Plain,
}

/// Planar drawing of an annulus strip: a rotation system plus a polyline per
/// edge. Row `i` sits on the circle of radius `1 + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    /// Per vertex: incident edge ids in counter-clockwise order.
    pub rotation: Vec<Vec<usize>>,
    /// Per edge: sampled points from its first to its second endpoint.
    pub paths: Vec<Vec<(f64, f64)>>,
    pub positions: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    kinds: Vec<EdgeKind>,
    boundary: Vec<usize>,
    coupling: Coupling,
    embedding: Option<Embedding>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, boundary: Vec<usize>) -> Result<Self> {
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
        }
        let mut boundary = boundary;
        boundary.sort_unstable();
        boundary.dedup();
        if boundary.iter().any(|&b| b >= n) {
            return Err(Error::InvalidGraph("boundary vertex out of range".into()));
        }
        let kinds = vec![EdgeKind::Plain; edges.len()];
        Ok(Graph {
            n,
            edges,
            kinds,
            boundary,
            coupling: Coupling::chromatic(),
            embedding: None,
        })
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_kinds(&self) -> &[EdgeKind] {
        &self.kinds
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// Relabels vertices by `perm[old] = new`. The embedding is dropped.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let boundary = self.boundary.iter().map(|&b| perm[b]).collect();
        Ok(Graph::new(self.n, edges, boundary)?.with_coupling(self.coupling.clone()))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            boundary: self.boundary.clone(),
            v: self.coupling.clone(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        Ok(Graph::new(
            json.n,
            json.edges.iter().map(|e| (e[0], e[1])).collect(),
            json.boundary.clone(),
        )?
        .with_coupling(json.v.clone()))
    }
}

/// `{"n":int,"edges":[[a,b],...],"boundary":[ids],"v":"-1"|"+sqrtQ"|"-sqrtQ"|rational}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub boundary: Vec<usize>,
    #[serde(default)]
    pub v: Coupling,
}

const ARC_SAMPLES: usize = 16;
const LINE_SAMPLES: usize = 4;

/// Builds the strip graph together with its planar drawing.
pub fn build_annulus(spec: &AnnulusSpec) -> Result<Graph> {
    spec.validate()?;
    let (w, n) = (spec.width, spec.length);
    let radius = |row: usize| 1.0 + row as f64;
    let angle = |slice: f64| 2.0 * PI * slice / n as f64;
    let polar = |r: f64, a: f64| (r * a.cos(), r * a.sin());

    let mut edges = Vec::new();
    let mut kinds = Vec::new();
    let mut paths = Vec::new();
    // local direction at each endpoint, in units of 45 degrees counter-clockwise
    // from the outward radial direction
    let mut dirs: Vec<(u8, u8)> = Vec::new();

    for j in 0..n {
        for row in 0..w {
            let a = spec.vertex(row, j);
            let b = spec.vertex(row, j + 1);
            edges.push((a, b));
            kinds.push(EdgeKind::TimeLike);
            let r = radius(row);
            paths.push(
                (0..=ARC_SAMPLES)
                    .map(|k| polar(r, angle(j as f64 + k as f64 / ARC_SAMPLES as f64)))
                    .collect(),
            );
            dirs.push((2, 6));
        }
        for row in 0..w.saturating_sub(1) {
            edges.push((spec.vertex(row, j), spec.vertex(row + 1, j)));
            kinds.push(EdgeKind::SpaceLike);
            let (r0, r1, a) = (radius(row), radius(row + 1), angle(j as f64));
            paths.push(
                (0..=LINE_SAMPLES)
                    .map(|k| polar(r0 + (r1 - r0) * k as f64 / LINE_SAMPLES as f64, a))
                    .collect(),
            );
            dirs.push((0, 4));
        }
        if spec.lattice == Lattice::Triangular {
            // (row, j+1) -- (row+1, j), every face split the same way
            for row in 0..w.saturating_sub(1) {
                edges.push((spec.vertex(row, j + 1), spec.vertex(row + 1, j)));
                kinds.push(EdgeKind::Diagonal);
                let (r0, r1) = (radius(row), radius(row + 1));
                paths.push(
                    (0..=LINE_SAMPLES)
                        .map(|k| {
                            let s = k as f64 / LINE_SAMPLES as f64;
                            polar(r0 + (r1 - r0) * s, angle(j as f64 + 1.0 - s))
                        })
                        .collect(),
                );
                dirs.push((7, 3));
            }
        }
    }

    let nv = spec.vertex_count();
    let mut incid: Vec<Vec<(u8, usize)>> = vec![Vec::new(); nv];
    for (e, (&(a, b), &(da, db))) in edges.iter().zip(&dirs).enumerate() {
        incid[a].push((da, e));
        incid[b].push((db, e));
    }
    let rotation = incid
        .into_iter()
        .map(|mut v| {
            v.sort_unstable();
            v.into_iter().map(|(_, e)| e).collect()
        })
        .collect();
    let positions = (0..nv)
        .map(|v| polar(radius(v % w), angle((v / w) as f64)))
        .collect();
    let boundary = (0..n).map(|j| spec.vertex(spec.rim_row(), j)).collect();

    let mut g = Graph::new(nv, edges, boundary)?.with_coupling(spec.coupling.clone());
    g.kinds = kinds;
    g.embedding = Some(Embedding {
        rotation,
        paths,
        positions,
    });
    Ok(g)
}

pub const FIXTURES: &[&str] = &[
    "fig1_square",
    "single_vertex_boundary",
    "single_edge_boundary",
    "triangle_all_boundary",
    "square_one_boundary",
    "path3_middle_bulk",
];

/// Small named graphs used as oracle ground truth.
pub fn fixture(name: &str) -> Result<Graph> {
    match name {
        // 4-cycle, two adjacent vertices on the boundary
        "fig1_square" => Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], vec![0, 1]),
        "single_vertex_boundary" => Graph::new(1, vec![], vec![0]),
        "single_edge_boundary" => Graph::new(2, vec![(0, 1)], vec![0, 1]),
        "triangle_all_boundary" => Graph::new(3, vec![(0, 1), (1, 2), (2, 0)], vec![0, 1, 2]),
        "square_one_boundary" => Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], vec![0]),
        "path3_middle_bulk" => Graph::new(3, vec![(0, 1), (1, 2)], vec![0, 2]),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_one_is_a_cycle() {
        let g = build_annulus(&AnnulusSpec::square(1, 3)).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.boundary(), &[0, 1, 2]);
    }

    #[test]
    fn edge_counts() {
        let sq = build_annulus(&AnnulusSpec::square(2, 3)).unwrap();
        assert_eq!((sq.vertex_count(), sq.edges().len(), sq.boundary().len()), (6, 9, 3));
        let tri = build_annulus(&AnnulusSpec::triangular(2, 3)).unwrap();
        assert_eq!((tri.vertex_count(), tri.edges().len()), (6, 12));
        let tri = build_annulus(&AnnulusSpec::triangular(4, 7)).unwrap();
        assert_eq!(tri.edges().len(), 7 * 4 + 7 * 3 + 7 * 3);
    }

    #[test]
    fn interior_degrees() {
        let spec = AnnulusSpec::square(5, 6);
        let g = build_annulus(&spec).unwrap();
        for j in 0..6 {
            for row in 1..4 {
                assert_eq!(g.degree(spec.vertex(row, j)), 4);
            }
        }
        let spec = AnnulusSpec::triangular(5, 6);
        let g = build_annulus(&spec).unwrap();
        for j in 0..6 {
            for row in 1..4 {
                assert_eq!(g.degree(spec.vertex(row, j)), 6);
            }
        }
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(build_annulus(&AnnulusSpec::square(0, 3)).is_err());
        assert!(build_annulus(&AnnulusSpec::square(2, 0)).is_err());
        assert!(build_annulus(&AnnulusSpec::square(2, 1)).is_err());
    }

    #[test]
    fn fixtures() {
        let g = fixture("fig1_square").unwrap();
        assert_eq!((g.vertex_count(), g.edges().len(), g.boundary().len()), (4, 4, 2));
        let g = fixture("single_vertex_boundary").unwrap();
        assert_eq!((g.vertex_count(), g.edges().len(), g.boundary().len()), (1, 0, 1));
        let g = fixture("single_edge_boundary").unwrap();
        assert_eq!((g.vertex_count(), g.edges().len(), g.boundary().len()), (2, 1, 2));
        assert_eq!(fixture("nope"), Err(Error::UnknownFixture("nope".into())));
        for name in FIXTURES {
            fixture(name).unwrap();
        }
    }

    #[test]
    fn rotation_lists_every_incidence() {
        let g = build_annulus(&AnnulusSpec::triangular(3, 4)).unwrap();
        let emb = g.embedding().unwrap();
        for v in 0..g.vertex_count() {
            assert_eq!(emb.rotation[v].len(), g.degree(v));
        }
    }

    #[test]
    fn json_round_trip() {
        let g = fixture("fig1_square").unwrap().with_coupling(Coupling::MinusSqrtQ);
        let s = serde_json::to_string(&g.to_json()).unwrap();
        assert!(s.contains("\"v\":\"-sqrtQ\""));
        let back = Graph::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(2, vec![(0, 0)], vec![0]).is_err());
        assert!(Graph::new(2, vec![(0, 2)], vec![0]).is_err());
    }
}
