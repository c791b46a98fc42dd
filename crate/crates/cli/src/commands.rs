use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use annulus_chromatic::algebra::{parse_rational, BivariatePolynomial, PolynomialJson, QsRelation, UniPoly, UniPolyJson};
use annulus_chromatic::bkw::{self, AnnulusSource, Region};
use annulus_chromatic::config::Guards;
use annulus_chromatic::graphs::{fixture, AnnulusSpec, Coupling, Graph, GraphJson, Lattice};
use annulus_chromatic::oracle::{coloring_count, fk_bruteforce, fk_value};
use annulus_chromatic::spectra::{extract_amplitudes, free_energy_scan, locate_cusps, AmplitudeOptions};
use annulus_chromatic::theory::{predict_fixed_t, predict_loci};
use annulus_chromatic::transfer::{exact_partition_guarded, exact_partition_relation};
use annulus_chromatic::zeros::{find_roots, polynomial_digest};

use crate::artifact::{csv_artifact, emit, json_artifact};
use crate::{selftest, CliError};

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Exact partition function of an annulus strip or a named fixture, as
    /// polynomial JSON.
    Chromatic(ChromaticArgs),
    /// Certified zeros of a specialised polynomial, as CSV.
    Zeros(ZerosArgs),
    /// Leading sector free energies along the critical curve at fixed t, as CSV.
    Scan(ScanArgs),
    /// Predicted transition loci, as JSON.
    Predict(PredictArgs),
    /// Equimodular curves, real crossings and isolated limit points.
    Curve(CurveArgs),
    /// Exact partition function of a small graph by subset enumeration.
    Oracle(OracleArgs),
    /// Fit eigenvalue amplitudes against exact partition functions.
    VerifyAmplitudes(AmplitudeArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ChromaticArgs {
    /// square | tri
    #[arg(long, default_value = "square")]
    pub lattice: String,
    /// Strip width.
    #[arg(long = "W")]
    #[serde(rename = "W")]
    pub w: Option<usize>,
    /// Strip length (number of slices around the annulus).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Specialise along a relation such as `Qs=Q-2`.
    #[arg(long)]
    pub relation: Option<String>,
    /// Use a named fixture graph instead of a strip.
    #[arg(long, conflicts_with_all = ["w", "n"])]
    pub fixture: Option<String>,
    /// Edge coupling: rational, `+sqrtQ` or `-sqrtQ`.
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub v: String,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Run the built-in checks and exit.
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ZerosArgs {
    #[arg(long, default_value = "square")]
    pub lattice: String,
    #[arg(long = "W")]
    #[serde(rename = "W")]
    pub w: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Relation `Qs = f(Q)`; required unless the input is univariate.
    #[arg(long)]
    pub relation: Option<String>,
    /// Polynomial JSON, as written by `chromatic`.
    #[arg(long, conflicts_with_all = ["w", "n"])]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub v: String,
    /// Bound on the relative backward error of every root.
    #[arg(long, default_value_t = 1e-20)]
    pub tol: f64,
    /// Gap used to group zeros near the real axis in the summary.
    #[arg(long, default_value_t = 0.05)]
    pub window: f64,
    /// Roots as `re,im,residual` CSV.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Summary JSON with precision, digest and real-axis clusters.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value = "square")]
    pub lattice: String,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long = "W")]
    #[serde(rename = "W")]
    pub w: Option<usize>,
    /// Grid `start:stop:count`.
    #[arg(long, default_value = "0.05:1.2:200")]
    pub r: String,
    /// Cusp estimates per sector, as JSON.
    #[arg(long)]
    pub cusps: Option<PathBuf>,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PredictArgs {
    /// Loci along a relation `Qs = f(Q)`.
    #[arg(long, conflicts_with = "t")]
    pub relation: Option<String>,
    /// Loci at a fixed t, one per winding number.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 12.0)]
    pub t_max: f64,
    /// Keep only loci visible at this strip width.
    #[arg(long = "W")]
    #[serde(rename = "W")]
    pub w: Option<usize>,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArgs {
    #[arg(long, default_value = "square")]
    pub lattice: String,
    #[arg(long = "W")]
    #[serde(rename = "W")]
    pub w: Option<usize>,
    #[arg(long, default_value = "Qs=Q-2")]
    pub relation: String,
    /// `re_min:re_max,im_min:im_max`
    #[arg(long, default_value = "-1:5,-3:3", allow_hyphen_values = true)]
    pub region: String,
    /// Grid nodes `NXxNY`.
    #[arg(long, default_value = "201x151")]
    pub resolution: String,
    /// Samples along the real axis for crossings and isolated points.
    #[arg(long, default_value_t = 4001)]
    pub samples: usize,
    /// Traced branches as `branch_id,re,im` CSV.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Isolated limit points as `re,L,t_estimate` CSV.
    #[arg(long)]
    pub isolated: Option<PathBuf>,
    /// Summary JSON.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    /// Graph JSON `{"n":..,"edges":[[a,b],..],"boundary":[..],"v":..}`.
    #[arg(long, conflicts_with = "fixture")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long = "Q", allow_hyphen_values = true)]
    #[serde(rename = "Q")]
    pub q: Option<String>,
    #[arg(long = "Qs", allow_hyphen_values = true)]
    #[serde(rename = "Qs")]
    pub qs: Option<String>,
    /// Overrides the coupling stored in the graph.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct AmplitudeArgs {
    #[arg(long, default_value = "square")]
    pub lattice: String,
    #[arg(long = "W", default_value_t = 2)]
    #[serde(rename = "W")]
    pub w: usize,
    #[arg(long = "Q", allow_hyphen_values = true)]
    #[serde(rename = "Q")]
    pub q: Option<String>,
    #[arg(long = "Qs", allow_hyphen_values = true)]
    #[serde(rename = "Qs")]
    pub qs: Option<String>,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub v: String,
    /// Largest accepted relative error of a dominant amplitude.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

pub fn run(cmd: &Command, guards: Guards, unsafe_sizes: bool) -> Result<(), CliError> {
    let mut config = serde_json::to_value(cmd).map_err(CliError::internal)?;
    if let Value::Object(m) = &mut config {
        m.insert("unsafe_sizes".into(), Value::Bool(unsafe_sizes));
    }
    let (name, wants_selftest) = match cmd {
        Command::Chromatic(a) => ("chromatic", a.selftest),
        Command::Zeros(a) => ("zeros", a.selftest),
        Command::Scan(a) => ("scan", a.selftest),
        Command::Predict(a) => ("predict", a.selftest),
        Command::Curve(a) => ("curve", a.selftest),
        Command::Oracle(a) => ("oracle", a.selftest),
        Command::VerifyAmplitudes(a) => ("verify-amplitudes", a.selftest),
    };
    if wants_selftest {
        return selftest::run(name);
    }
    match cmd {
        Command::Chromatic(a) => chromatic(a, &config, &guards),
        Command::Zeros(a) => zeros(a, &config, &guards),
        Command::Scan(a) => scan(a, &config, &guards),
        Command::Predict(a) => predict(a, &config),
        Command::Curve(a) => curve(a, &config, &guards),
        Command::Oracle(a) => oracle(a, &config),
        Command::VerifyAmplitudes(a) => verify_amplitudes(a, &config),
    }
}

fn lattice(s: &str) -> Result<Lattice, CliError> {
    Ok(s.parse()?)
}

fn relation(s: &str) -> Result<QsRelation, CliError> {
    Ok(s.parse()?)
}

fn coupling(s: &str) -> Result<Coupling, CliError> {
    Ok(s.parse()?)
}

fn rational(flag: &str, s: Option<&String>) -> Result<BigRational, CliError> {
    let s = s.ok_or_else(|| CliError::config(format!("--{flag} is required")))?;
    parse_rational(s).ok_or_else(|| CliError::config(format!("--{flag}: `{s}` is not a rational number")))
}

fn required<T: Copy>(flag: &str, v: Option<T>) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("--{flag} is required")))
}

fn finite(flag: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(format!("--{flag} must be finite")))
    }
}

/// `start:stop:count` with `start < stop` and `count >= 2`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::config(format!("bad range `{s}`, expected start:stop:count"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b && n >= 2) {
        return Err(bad());
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// `re_min:re_max,im_min:im_max`
pub fn parse_region(s: &str) -> Result<Region, CliError> {
    let bad = || CliError::config(format!("bad region `{s}`, expected re0:re1,im0:im1"));
    let pair = |p: &str| -> Option<(f64, f64)> {
        let (a, b) = p.split_once(':')?;
        let (a, b) = (a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?);
        (a.is_finite() && b.is_finite() && a < b).then_some((a, b))
    };
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok(Region {
        re: pair(re).ok_or_else(bad)?,
        im: pair(im).ok_or_else(bad)?,
    })
}

pub fn parse_resolution(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::config(format!("bad resolution `{s}`, expected NXxNY"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx: usize = a.trim().parse().map_err(|_| bad())?;
    let ny: usize = b.trim().parse().map_err(|_| bad())?;
    if nx < 2 || ny < 2 {
        return Err(bad());
    }
    Ok((nx, ny))
}

fn strip_spec(lat: &str, w: Option<usize>, n: Option<usize>, v: &str) -> Result<AnnulusSpec, CliError> {
    let lat = lattice(lat)?;
    let w = required("W", w)?;
    let n = required("N", n)?;
    let spec = AnnulusSpec::new(lat, w, n).with_coupling(coupling(v)?);
    spec.validate()?;
    Ok(spec)
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum PolynomialResult {
    Bivariate {
        vertices: usize,
        polynomial: PolynomialJson,
    },
    Univariate {
        vertices: usize,
        relation: String,
        degree: Option<usize>,
        coefficient_digest: String,
        polynomial: UniPolyJson,
    },
}

fn univariate(vertices: usize, rel: &str, p: &UniPoly) -> PolynomialResult {
    PolynomialResult::Univariate {
        vertices,
        relation: rel.to_string(),
        degree: p.degree(),
        coefficient_digest: polynomial_digest(&p.integer_coefficients()),
        polynomial: p.to_json(),
    }
}

fn chromatic(a: &ChromaticArgs, config: &Value, guards: &Guards) -> Result<(), CliError> {
    let rel = a.relation.as_deref().map(relation).transpose()?;
    let v = coupling(&a.v)?;
    let result = if let Some(name) = &a.fixture {
        let g = fixture(name)?.with_coupling(v);
        let p = fk_bruteforce(&g)?;
        match (&rel, &a.relation) {
            (Some(r), Some(s)) => univariate(g.vertex_count(), s, &p.substitute_relation(r)),
            _ => PolynomialResult::Bivariate {
                vertices: g.vertex_count(),
                polynomial: p.to_json(),
            },
        }
    } else {
        let spec = strip_spec(&a.lattice, a.w, a.n, &a.v)?;
        match (&rel, &a.relation) {
            (Some(r), Some(s)) => univariate(spec.vertex_count(), s, &exact_partition_relation(&spec, r, guards)?),
            _ => PolynomialResult::Bivariate {
                vertices: spec.vertex_count(),
                polynomial: exact_partition_guarded(&spec, guards)?.to_json(),
            },
        }
    };
    emit(a.output.as_deref(), &json_artifact(config, &result)?)
}

/// Accepts a `chromatic` artifact, its `result`, or a bare polynomial object.
fn read_polynomial(path: &Path, rel: Option<&QsRelation>) -> Result<UniPoly, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut node = &doc;
    for key in ["result", "polynomial"] {
        if let Some(inner) = node.get(key) {
            node = inner;
        }
    }
    let bad = |msg: &str| CliError::config(format!("{}: {msg}", path.display()));
    if node.get("coeffs").is_some() {
        let json: UniPolyJson = serde_json::from_value(node.clone()).map_err(|e| bad(&e.to_string()))?;
        return UniPoly::from_json(&json).ok_or_else(|| bad("unreadable univariate polynomial"));
    }
    let json: PolynomialJson = serde_json::from_value(node.clone()).map_err(|e| bad(&e.to_string()))?;
    let p = BivariatePolynomial::from_json(&json)?;
    let rel = rel.ok_or_else(|| bad("bivariate input needs --relation"))?;
    Ok(p.substitute_relation(rel))
}

#[derive(Serialize)]
struct ZerosSummary {
    degree: usize,
    roots: usize,
    precision: u32,
    max_residual: f64,
    coefficient_digest: String,
    real_clusters: Vec<annulus_chromatic::zeros::Cluster>,
}

fn zeros(a: &ZerosArgs, config: &Value, guards: &Guards) -> Result<(), CliError> {
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(CliError::config("--tol must lie in (0, 1)"));
    }
    if !(a.window > 0.0 && a.window.is_finite()) {
        return Err(CliError::config("--window must be positive"));
    }
    let rel = a.relation.as_deref().map(relation).transpose()?;
    let p = match &a.input {
        Some(path) => read_polynomial(path, rel.as_ref())?,
        None => {
            let spec = strip_spec(&a.lattice, a.w, a.n, &a.v)?;
            let rel = rel.ok_or_else(|| CliError::config("--relation is required"))?;
            exact_partition_relation(&spec, &rel, guards)?
        }
    };
    if p.degree().unwrap_or(0) == 0 {
        return Err(CliError::config("polynomial is constant"));
    }
    let rs = find_roots(&p, a.tol)?;
    emit(a.output.as_deref(), &csv_artifact(config, &rs.to_csv())?)?;
    if let Some(path) = &a.summary {
        let s = ZerosSummary {
            degree: rs.degree,
            roots: rs.roots.len(),
            precision: rs.precision,
            max_residual: rs.max_residual(),
            coefficient_digest: rs.digest.clone(),
            real_clusters: rs.real_clusters(a.window),
        };
        emit(Some(path), &json_artifact(config, &s)?)?;
    }
    Ok(())
}

fn scan(a: &ScanArgs, config: &Value, guards: &Guards) -> Result<(), CliError> {
    let lat = lattice(&a.lattice)?;
    let t = finite("t", required("t", a.t)?)?;
    if t <= 1.0 {
        return Err(CliError::config("--t must exceed 1"));
    }
    let w = required("W", a.w)?;
    if w == 0 {
        return Err(CliError::config("--W must be positive"));
    }
    let grid = parse_range(&a.r)?;
    let table = free_energy_scan(lat, w, t, &grid, guards)?;
    emit(a.output.as_deref(), &csv_artifact(config, &table.to_csv())?)?;
    if let Some(path) = &a.cusps {
        emit(Some(path), &json_artifact(config, &locate_cusps(&table))?)?;
    }
    Ok(())
}

fn predict(a: &PredictArgs, config: &Value) -> Result<(), CliError> {
    let t_min = finite("t-min", a.t_min)?;
    let t_max = finite("t-max", a.t_max)?;
    let loci = match (&a.relation, a.t) {
        (Some(r), None) => {
            let rel = relation(r)?;
            if t_max <= t_min {
                return Err(CliError::config("--t-max must exceed --t-min"));
            }
            predict_loci(&rel, t_min, t_max, a.w)?
        }
        (None, Some(t)) => {
            let t = finite("t", t)?;
            if t <= 1.0 {
                return Err(CliError::config("--t must exceed 1"));
            }
            predict_fixed_t(t, a.w)
        }
        _ => return Err(CliError::config("exactly one of --relation and --t is required")),
    };
    emit(a.output.as_deref(), &json_artifact(config, &loci)?)
}

#[derive(Serialize)]
struct CurveSummary {
    branches: usize,
    real_axis_hits: Vec<f64>,
    real_axis_crossings: Vec<f64>,
    isolated_points: Vec<bkw::IsolatedPoint>,
}

fn curve(a: &CurveArgs, config: &Value, guards: &Guards) -> Result<(), CliError> {
    let lat = lattice(&a.lattice)?;
    let w = required("W", a.w)?;
    let rel = relation(&a.relation)?;
    let region = parse_region(&a.region)?;
    let (nx, ny) = parse_resolution(&a.resolution)?;
    if a.samples < 2 {
        return Err(CliError::config("--samples must be at least 2"));
    }
    let spec = AnnulusSpec::new(lat, w, 2);
    spec.validate()?;
    let src = AnnulusSource::new(&spec, &rel, guards)?;
    let map = bkw::dominance_grid(&src, region, nx, ny);
    let branches = bkw::trace_equimodular(&src, &map);
    let iso = bkw::isolated_points(&src, region.re, a.samples);
    let summary = CurveSummary {
        branches: branches.len(),
        real_axis_hits: bkw::real_axis_hits(&branches, 1e-9),
        real_axis_crossings: if region.im.0 <= 0.0 && region.im.1 >= 0.0 {
            bkw::real_axis_crossings(&src, region.re, a.samples)
        } else {
            Vec::new()
        },
        isolated_points: iso.clone(),
    };
    if let Some(path) = &a.curves {
        emit(Some(path), &csv_artifact(config, &bkw::branches_to_csv(&branches))?)?;
    }
    if let Some(path) = &a.isolated {
        emit(Some(path), &csv_artifact(config, &bkw::isolated_to_csv(&iso))?)?;
    }
    emit(a.output.as_deref(), &json_artifact(config, &summary)?)
}

#[derive(Serialize)]
struct OracleResult {
    vertices: usize,
    edges: usize,
    value: String,
    /// Direct colouring count, when the point is a chromatic one.
    colorings: Option<String>,
}

fn oracle(a: &OracleArgs, config: &Value) -> Result<(), CliError> {
    let q = rational("Q", a.q.as_ref())?;
    let qs = rational("Qs", a.qs.as_ref())?;
    let mut g: Graph = match (&a.graph, &a.fixture) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let json: GraphJson =
                serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            Graph::from_json(&json)?
        }
        (None, Some(name)) => fixture(name)?,
        _ => return Err(CliError::config("exactly one of --graph and --fixture is required")),
    };
    if let Some(v) = &a.v {
        g = g.with_coupling(coupling(v)?);
    }
    let v = match g.coupling() {
        Coupling::Rational(r) => r.clone(),
        _ => return Err(CliError::config("the oracle needs a rational coupling")),
    };
    let value = fk_value(&g, &q, &qs, &v)?;
    let small = |r: &BigRational| -> Option<u32> {
        use num_traits::ToPrimitive;
        r.is_integer().then(|| r.to_integer().to_u32()).flatten()
    };
    let chromatic = v == BigRational::from_integer((-1).into());
    let colorings = match (chromatic, small(&q), small(&qs)) {
        (true, Some(qi), Some(si)) if si <= qi => coloring_count(&g, qi, si).ok().map(|c| c.to_string()),
        _ => None,
    };
    let result = OracleResult {
        vertices: g.vertex_count(),
        edges: g.edges().len(),
        value: value.to_string(),
        colorings,
    };
    emit(a.output.as_deref(), &json_artifact(config, &result)?)
}

#[derive(Serialize)]
struct AmplitudeReport {
    pass: bool,
    tol: f64,
    fit: annulus_chromatic::spectra::AmplitudeFit,
}

fn verify_amplitudes(a: &AmplitudeArgs, config: &Value) -> Result<(), CliError> {
    let lat = lattice(&a.lattice)?;
    let q = rational("Q", a.q.as_ref())?;
    let qs = rational("Qs", a.qs.as_ref())?;
    let v = coupling(&a.v)?;
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(CliError::config("--tol must be positive"));
    }
    let spec = AnnulusSpec::new(lat, a.w, 2).with_coupling(v);
    spec.validate()?;
    let fit = extract_amplitudes(&spec, &q, &qs, &AmplitudeOptions::default())?;
    let pass = !fit.failed && fit.dominant.iter().filter(|d| !d.shared).all(|d| d.rel_error <= a.tol);
    emit(a.output.as_deref(), &json_artifact(config, &AmplitudeReport { pass, tol: a.tol, fit })?)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::failed("amplitude check failed"))
    }
}
