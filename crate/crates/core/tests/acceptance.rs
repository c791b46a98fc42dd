//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. The two long-running checks (10 and 11) only
//! run with `cargo test --test acceptance -- --extended`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use annulus_chromatic::algebra::{BivariatePolynomial, QsRelation};
use annulus_chromatic::bkw::{
    dominance_grid, isolated_points, real_axis_crossings, real_axis_hits, trace_equimodular, AnnulusSource,
    BlockSpectrum, Region, SpectrumSource,
};
use annulus_chromatic::config::Guards;
use annulus_chromatic::graphs::{build_annulus, fixture, AnnulusSpec, Coupling, Graph, Lattice, FIXTURES};
use annulus_chromatic::oracle::{coloring_count, fk_bruteforce, loop_bruteforce};
use annulus_chromatic::spectra::{
    curve_weights, extract_amplitudes, free_energy, leading_arnoldi, locate_crossing, locate_cusps, scan_with, AmplitudeOptions,
    SectorFamily,
};
use annulus_chromatic::theory::{
    amplitude_d, beraha, boundary_weight, conformal_weight, predict_fixed_t, predict_loci, qc,
    recognize_rational, solve_r, LocusKind,
};
use annulus_chromatic::transfer::{exact_partition, exact_partition_relation, BlobMode, SectorOperator, Weights};
use annulus_chromatic::zeros::{find_roots, Cluster};
use annulus_chromatic::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn err(e: impl std::fmt::Display) -> Outcome {
    outcome(false, format!("error: {e}"))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return err(e),
        }
    };
}

fn report(id: &str, title: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = o.pass && in_time;
    let timing = if in_time {
        format!("{:.1}s", took.as_secs_f64())
    } else {
        format!("{:.1}s, over the {}s limit", took.as_secs_f64(), limit.as_secs())
    };
    println!(
        "criterion {id:>2} {}  {title} [{timing}] {}",
        if pass { "PASS" } else { "FAIL" },
        o.detail
    );
    pass
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn fig1_polynomial() -> BivariatePolynomial {
    let q = BivariatePolynomial::q();
    let qs = BivariatePolynomial::qs();
    let quad = &(&(&q * &q) - &q.scale(&BigInt::from(3))) + &BivariatePolynomial::constant(3);
    &(&quad * &qs) * &(&qs - &BivariatePolynomial::one())
}

fn c1() -> Outcome {
    let expect = fig1_polynomial();
    let fk = tri!(fixture("fig1_square").and_then(|g| fk_bruteforce(&g)));
    // the square strip W = 2, N = 2 is the same graph up to doubled time edges
    let tm = tri!(exact_partition(&AnnulusSpec::square(2, 2)));
    outcome(
        fk == expect && tm == expect,
        format!("fixture {}, strip W=2 N=2 {}", fk == expect, tm == expect),
    )
}

fn small_annuli(max_vertices: usize) -> Vec<AnnulusSpec> {
    let mut out = Vec::new();
    for lat in [Lattice::Square, Lattice::Triangular] {
        for w in 1..=max_vertices {
            for n in 2..=max_vertices {
                if w * n <= max_vertices {
                    out.push(AnnulusSpec::new(lat, w, n));
                }
            }
        }
    }
    out
}

fn eval_at(p: &BivariatePolynomial, q: u32, qs: u32) -> BigRational {
    p.eval(&BigRational::from_integer(q.into()), &BigRational::from_integer(qs.into()))
}

fn c2() -> Outcome {
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    for name in FIXTURES {
        graphs.push((name.to_string(), tri!(fixture(name))));
    }
    for spec in small_annuli(9) {
        let g = tri!(build_annulus(&spec));
        graphs.push((format!("{} W={} N={}", spec.lattice, spec.width, spec.length), g));
    }
    let mut points = 0;
    for (name, g) in &graphs {
        let p = tri!(fk_bruteforce(g));
        for q in 1..=4u32 {
            for qs in 1..=q {
                let c = tri!(coloring_count(g, q, qs));
                if eval_at(&p, q, qs) != BigRational::from_integer(c.clone()) {
                    return outcome(false, format!("{name} at Q={q} Qs={qs}: colourings {c}"));
                }
                points += 1;
            }
        }
    }
    let mut loops = 0;
    for lat in [Lattice::Square, Lattice::Triangular] {
        for n in [2, 3] {
            let g = tri!(build_annulus(&AnnulusSpec::new(lat, 2, n)));
            if tri!(fk_bruteforce(&g)) != tri!(loop_bruteforce(&g)) {
                return outcome(false, format!("loop expansion differs on {lat} W=2 N={n}"));
            }
            loops += 1;
        }
    }
    outcome(
        true,
        format!("{} graphs, {points} colouring points, {loops} loop identities", graphs.len()),
    )
}

/// Chromatic polynomial by deletion-contraction on a simple graph, as
/// ascending integer coefficients.
fn chromatic_dc(n: usize, edges: &[(usize, usize)]) -> Vec<BigInt> {
    let mut simple: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    simple.sort();
    simple.dedup();
    if simple.iter().any(|&(a, b)| a == b) {
        return vec![BigInt::zero()];
    }
    let Some(&(a, b)) = simple.last() else {
        let mut p = vec![BigInt::zero(); n + 1];
        p[n] = BigInt::one();
        return p;
    };
    let deleted: Vec<(usize, usize)> = simple[..simple.len() - 1].to_vec();
    // contract b into a and renumber the last vertex into b's slot
    let last = n - 1;
    let relabel = |x: usize| -> usize {
        let x = if x == b { a } else { x };
        if x == last { b } else { x }
    };
    let contracted: Vec<(usize, usize)> = deleted.iter().map(|&(x, y)| (relabel(x), relabel(y))).collect();
    let pd = chromatic_dc(n, &deleted);
    let pc = chromatic_dc(n - 1, &contracted);
    let mut out = pd;
    for (i, c) in pc.into_iter().enumerate() {
        out[i] -= c;
    }
    out
}

fn c3() -> Outcome {
    let cases = [(1, 3), (2, 2), (2, 3), (2, 4), (3, 2)];
    let mut checked = 0;
    for lat in [Lattice::Square, Lattice::Triangular] {
        for (w, n) in cases {
            let spec = AnnulusSpec::new(lat, w, n);
            let a = tri!(exact_partition(&spec));
            let b = tri!(build_annulus(&spec).and_then(|g| fk_bruteforce(&g)));
            if a != b {
                return outcome(false, format!("{lat} W={w} N={n} differs from subset sum"));
            }
            checked += 1;
        }
    }
    let mut chromatic = 0;
    for spec in small_annuli(8) {
        let g = tri!(build_annulus(&spec));
        let dc = chromatic_dc(g.vertex_count(), g.edges());
        let diag = tri!(exact_partition(&spec)).diagonal();
        let mut coeffs: Vec<BigRational> = dc.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if diag.coeffs() != coeffs.as_slice() {
            return outcome(
                false,
                format!("{} W={} N={}: diagonal differs", spec.lattice, spec.width, spec.length),
            );
        }
        chromatic += 1;
    }
    outcome(
        true,
        format!("{checked} subset-sum identities, {chromatic} chromatic polynomials"),
    )
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    let d: i64 = rng.gen_range(3..=11);
    let n: i64 = rng.gen_range(lo * d + 1..hi * d);
    rat(n, d)
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let opts = AmplitudeOptions::default();
    let mut worst_rel: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let mut compared = 0;
    let mut shared = 0;
    for w in [2, 3] {
        for _ in 0..5 {
            let q = random_rational(&mut rng, 0, 4);
            let qs = random_rational(&mut rng, -1, 4);
            let spec = AnnulusSpec::square(w, 2);
            let fit = tri!(extract_amplitudes(&spec, &q, &qs, &opts));
            if fit.failed {
                return outcome(false, format!("W={w} Q={q} Qs={qs}: fit failed, residual {:.1e}", fit.residual));
            }
            worst_res = worst_res.max(fit.residual);
            for d in &fit.dominant {
                if d.shared {
                    shared += 1;
                    continue;
                }
                compared += 1;
                worst_rel = worst_rel.max(d.rel_error);
            }
        }
    }
    outcome(
        worst_rel <= 1e-6 && worst_res < 1e-10,
        format!(
            "{compared} dominant amplitudes, worst relative error {worst_rel:.1e}, worst residual {worst_res:.1e}, {shared} shared eigenvalues skipped"
        ),
    )
}

const CUSP_MARGIN: f64 = 0.01;

fn c5() -> Outcome {
    let mut checked = 0;
    let mut skipped = Vec::new();
    let mut worst: f64 = 0.0;
    for t in [4.0, 5.0, 6.0] {
        for w in [4, 5, 6] {
            let spec = AnnulusSpec::square(w, 2);
            let fam = tri!(SectorFamily::new(&spec, BlobMode::Blobbed, &Guards::default()));
            let r_max = t / (t - 1.0);
            let grid: Vec<f64> = (0..200).map(|i| 0.02 + (r_max - 0.03) * i as f64 / 199.0).collect();
            let table = tri!(scan_with(&fam, t, &grid));
            let cusps: BTreeMap<usize, f64> = locate_cusps(&table)
                .into_iter()
                .map(|c| (c.l, c.r.into_iter().fold(f64::INFINITY, f64::min)))
                .collect();
            let mut l = 0;
            while l + 2 <= 2 * w {
                let r_star = (l as f64 + 1.0) / (t - 1.0);
                let cusp_lo = cusps[&l].min(cusps[&(l + 2)]);
                if r_star >= r_max || r_star >= cusp_lo - CUSP_MARGIN {
                    skipped.push(format!("t={t} W={w} L={l}"));
                    l += 2;
                    continue;
                }
                let hi = (r_star + 0.02).min(cusp_lo - CUSP_MARGIN / 2.0);
                let r = tri!(locate_crossing(&fam, t, l, (r_star - 0.02, hi)));
                let dev = (r - r_star).abs();
                worst = worst.max(dev);
                if dev > 1e-8 {
                    return outcome(false, format!("t={t} W={w} L={l}: crossing at {r}, expected {r_star}"));
                }
                checked += 1;
                l += 2;
            }
        }
    }
    outcome(
        checked > 0,
        format!(
            "{checked} crossings, worst deviation {worst:.1e}; in or past the cusp region: {}",
            skipped.join(", ")
        ),
    )
}

fn c6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at_infinity = Vec::new();
    for l in [2u32, 4, 6] {
        for t in 5..=12 {
            let t = t as f64;
            let q = beraha(t);
            let value = match boundary_weight(t, l as f64 / (t - 1.0)) {
                Ok(qs) => amplitude_d(l, &q, &qs),
                // Qs = inf: D_L is affine in Qs, so its zero there is a
                // vanishing Qs coefficient
                Err(Error::Pole(_)) => {
                    at_infinity.push(format!("L={l} t={t}"));
                    amplitude_d(l, &q, &1.0) - amplitude_d(l, &q, &0.0)
                }
                Err(e) => return err(e),
            };
            worst = worst.max(value.abs());
        }
    }
    let mut symbolic = true;
    for a in -2..=3 {
        for b in -2..=3 {
            let (q, qs) = (rat(2 * a + 1, 3), rat(b, 2));
            symbolic &= amplitude_d(2, &q, &qs) == &qs - BigRational::one();
        }
    }
    let one = QsRelation::constant(BigRational::one());
    let mut row = true;
    for t in 3..=12 {
        let t = t as f64;
        let r = tri!(solve_r(t, &one));
        let qs = tri!(boundary_weight(t, 2.0 / (t - 1.0)));
        row &= (r - 2.0 / (t - 1.0)).abs() < 1e-12 && (qs - 1.0).abs() < 1e-12;
    }
    outcome(
        worst <= 1e-12 && symbolic && row,
        format!(
            "max |D_L| {worst:.1e} (Qs = inf at {}); D_2 = Qs - 1 exactly: {symbolic}; Qs = 1 row: {row}",
            at_infinity.join(", ")
        ),
    )
}

fn c7() -> Outcome {
    let loci = predict_fixed_t(6.0, None);
    if loci.len() != 6 {
        return outcome(false, format!("{} loci", loci.len()));
    }
    let expect_qs = [Some(rat(0, 1)), Some(rat(1, 1)), Some(rat(3, 2)), Some(rat(2, 1)), Some(rat(3, 1)), None];
    for (i, l) in loci.iter().enumerate() {
        let r = recognize_rational(l.r, 100, 1e-12);
        let qs = l.qs.and_then(|x| recognize_rational(x, 100, 1e-12));
        let kind = if i % 2 == 0 { LocusKind::CurveCrossing } else { LocusKind::IsolatedPoint };
        if r != Some(rat(i as i64 + 1, 5)) || qs != expect_qs[i] || l.kind != kind {
            return outcome(false, format!("entry {i}: r={} Qs={:?} kind={:?}", l.r, l.qs, l.kind));
        }
    }
    outcome(true, "r = k/5 for k = 1..6 with Qs = 0, 1, 3/2, 2, 3, inf")
}

fn q_minus_2() -> QsRelation {
    "Qs=Q-2".parse().unwrap()
}

/// Loci along `Qs = Q - 2` visible at width 2 with `Q` below the lattice's `Q_c`.
fn predicted(lattice: Lattice) -> Result<Vec<f64>, Error> {
    let qc = qc(lattice);
    Ok(predict_loci(&q_minus_2(), 2.0, 40.0, Some(2))?
        .into_iter()
        .map(|l| l.q)
        .filter(|&q| q < qc - 1e-9)
        .collect())
}

fn near(xs: &[f64], x: f64, tol: f64) -> bool {
    xs.iter().any(|y| (y - x).abs() <= tol)
}

fn fmt_list(xs: &[f64]) -> String {
    let s: Vec<String> = xs.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", s.join(", "))
}

const FEATURE_TOL: f64 = 0.05;

fn c8(lattice: Lattice, clusters: &mut Vec<(Lattice, Vec<Cluster>)>) -> Outcome {
    let spec = AnnulusSpec::new(lattice, 2, 100);
    let p = tri!(exact_partition_relation(&spec, &q_minus_2(), &Guards::default()));
    let rs = tri!(find_roots(&p, 1e-20));
    let cl = rs.real_clusters(FEATURE_TOL);
    let centers: Vec<f64> = cl.iter().map(|c| c.center).collect();
    clusters.push((lattice, cl));
    let qc = qc(lattice);
    let loci = tri!(predicted(lattice));
    let certified = rs.max_residual() <= 1e-20;
    let shape = match lattice {
        Lattice::Triangular => {
            near(&centers, 2.0, FEATURE_TOL)
                && near(&centers, 3.0, FEATURE_TOL)
                && centers.iter().filter(|&&c| c < qc).all(|&c| near(&loci, c, FEATURE_TOL))
        }
        Lattice::Square => {
            let mut allowed = loci.clone();
            allowed.push(qc);
            near(&centers, 2.0, FEATURE_TOL)
                && near(&centers, qc, FEATURE_TOL)
                && centers.iter().filter(|&&c| c < qc + FEATURE_TOL).all(|&c| near(&allowed, c, FEATURE_TOL))
                && !centers.iter().any(|&c| c > qc + FEATURE_TOL && c < 3.9)
        }
    };
    outcome(
        certified && shape,
        format!(
            "degree {}, {} bits, max certificate {:.1e}, real clusters {}, predicted below Q_c {}",
            rs.degree,
            rs.precision,
            rs.max_residual(),
            fmt_list(&centers),
            fmt_list(&loci)
        ),
    )
}

fn c9(clusters: &[(Lattice, Vec<Cluster>)]) -> Outcome {
    let rel = q_minus_2();
    let mut details = Vec::new();
    let mut pass = true;
    for lattice in [Lattice::Triangular, Lattice::Square] {
        let qc = qc(lattice);
        let src = tri!(AnnulusSource::new(&AnnulusSpec::new(lattice, 2, 2), &rel, &Guards::default()));
        let map = dominance_grid(&src, Region::default(), 201, 151);
        let branches = trace_equimodular(&src, &map);
        let hits = real_axis_hits(&branches, 1e-9);
        let crossings = real_axis_crossings(&src, (1.5, 4.5), 3001);
        let isolated: Vec<f64> = isolated_points(&src, (1.5, 4.5), 3001).iter().map(|p| p.q).collect();
        let mut features = crossings.clone();
        features.extend(&isolated);
        let loci = tri!(predicted(lattice));
        let below: Vec<f64> = features.iter().copied().filter(|&q| q < qc - FEATURE_TOL).collect();
        let predicted_found = loci.iter().all(|&q| near(&features, q, FEATURE_TOL));
        let features_predicted = below.iter().all(|&q| near(&loci, q, FEATURE_TOL));
        let traced = hits
            .iter()
            .filter(|&&h| h > 1.5 && h < qc - FEATURE_TOL)
            .all(|&h| near(&crossings, h, FEATURE_TOL));
        let zeros_ok = clusters
            .iter()
            .filter(|(l, _)| *l == lattice)
            .flat_map(|(_, c)| c.iter())
            .filter(|c| c.center < qc + FEATURE_TOL)
            .all(|c| near(&features, c.center, FEATURE_TOL));
        pass &= predicted_found && features_predicted && traced && zeros_ok;
        details.push(format!(
            "{lattice}: {} branches, crossings {}, isolated {}, predicted {} [{}/{}/{}/{}]",
            branches.len(),
            fmt_list(&crossings),
            fmt_list(&isolated),
            fmt_list(&loci),
            predicted_found,
            features_predicted,
            traced,
            zeros_ok
        ));
    }
    outcome(pass, details.join("; "))
}

/// Leading eigenvalue of each ordinary cyclic sector at `Qs = Q`, with its
/// conjugate when complex.
struct LeadingSource {
    family: SectorFamily,
    coupling: Coupling,
}

impl LeadingSource {
    fn new(spec: &AnnulusSpec, guards: &Guards) -> Result<Self, Error> {
        Ok(LeadingSource {
            family: SectorFamily::flagless(spec, guards)?,
            coupling: spec.coupling.clone(),
        })
    }
}

impl SpectrumSource for LeadingSource {
    fn blocks(&self, q: Complex64) -> annulus_chromatic::Result<Vec<BlockSpectrum>> {
        let w = Weights::complex(q, q, &self.coupling);
        (0..=self.family.width())
            .map(|ell| {
                let lead = self.family.leading(ell, &w)?.unwrap_or_default();
                let mut eigenvalues = vec![lead];
                if lead.im.abs() > 1e-9 * lead.norm() {
                    eigenvalues.push(lead.conj());
                }
                Ok(BlockSpectrum {
                    eigenvalues,
                    amplitude: amplitude_d(2 * ell as u32, &q, &q),
                })
            })
            .collect()
    }

    fn label(&self, b: usize) -> (usize, BlobMode) {
        (b, BlobMode::Blobbed)
    }
}

fn c10() -> Outcome {
    let spec = AnnulusSpec::triangular(7, 2);
    let src = tri!(LeadingSource::new(&spec, &Guards::unchecked()));
    let xs = real_axis_crossings(&src, (3.40, 3.52), 25);
    let target = 3.4682618071;
    let best = xs.iter().copied().min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    match best {
        Some(x) => outcome((x - target).abs() <= 1e-6, format!("crossings {xs:?}, nearest {x:.10}")),
        None => outcome(false, "no equimodular crossing in [3.40, 3.52]"),
    }
}

/// Sector states the machine can hold: about 3.3 KB each for the factor
/// tables of one operator.
const STATE_BUDGET: u64 = 1_000_000;

/// Blobbed square-lattice sector size at width `w`: `C(2w - 1, w - 1)`.
fn blobbed_states(w: u64) -> u64 {
    (0..w - 1).fold(1u64, |acc, k| acc * (2 * w - 1 - k) / (k + 1))
}

fn c11() -> Outcome {
    let (t, r) = (6.0, 0.5);
    let wt = tri!(curve_weights(Lattice::Square, t, r));
    let mut widths = Vec::new();
    let mut out_of_budget = Vec::new();
    // -(W / pi) ln |lambda_L / lambda_0| for L = 2, 4
    let mut h_eff: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for w in 8..=14usize {
        if blobbed_states(w as u64) > STATE_BUDGET {
            out_of_budget.push(w);
            continue;
        }
        let spec = AnnulusSpec::square(w, 2);
        let mut lead = Vec::new();
        for ell in 0..=2 {
            let op = tri!(SectorOperator::guarded(&spec, ell, BlobMode::Blobbed, &Guards::unchecked()));
            lead.push(tri!(leading_arnoldi(&op, &wt, 60, 1e-14, 400)));
        }
        for k in 0..2 {
            let gap = free_energy(lead[k + 1], w) - free_energy(lead[0], w);
            h_eff[k].push(gap * (w * w) as f64 / std::f64::consts::PI);
        }
        widths.push(w);
    }
    if widths.len() < 2 {
        return outcome(false, format!("widths {out_of_budget:?} exceed {STATE_BUDGET} states"));
    }
    let xs: Vec<f64> = widths.iter().map(|&w| 1.0 / w as f64).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (k, ys) in h_eff.iter().enumerate() {
        let l = 2 * (k as u32 + 1);
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let h_fit = my - sxy / sxx * mx;
        let h = conformal_weight(t, r, l) - conformal_weight(t, r, 0);
        worst = worst.max(((h_fit - h) / h).abs());
        rows.push(format!("L={l}: fitted {h_fit:.5}, predicted {h:.5}"));
    }
    let missing = if out_of_budget.is_empty() {
        String::new()
    } else {
        format!("; W={out_of_budget:?} need more than {STATE_BUDGET} states and were not computed")
    };
    outcome(
        out_of_budget.is_empty() && worst <= 0.05,
        format!("W={widths:?}, {}; worst relative deviation {worst:.3}{missing}", rows.join(", ")),
    )
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let extended = args.iter().any(|a| a == "--extended");
    // positional arguments select criteria by id prefix, as test filters do
    let filters: Vec<&str> = args.iter().filter(|a| !a.starts_with('-')).map(String::as_str).collect();
    let wanted = |id: &str| filters.is_empty() || filters.iter().any(|f| id.starts_with(f));
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut ok = true;
    let mut run = |id: &str, title: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        if wanted(id) {
            ok &= report(id, title, limit, f);
        }
    };
    run("1", "boundary chromatic polynomial of the four-cycle", Duration::from_secs(1), &mut c1);
    run("2", "oracle triangle", min(1), &mut c2);
    run("3", "transfer matrix against oracles", min(2), &mut c3);
    run("4", "eigenvalue amplitudes", min(5), &mut c4);
    run("5", "exact finite-width crossings", min(10), &mut c5);
    run("6", "amplitude zeros", Duration::from_secs(10), &mut c6);
    run("7", "fixed t = 6 loci", Duration::from_secs(10), &mut c7);
    let mut clusters = Vec::new();
    run("8a", "zeros, triangular W=2 N=100 Qs=Q-2", min(10), &mut || {
        c8(Lattice::Triangular, &mut clusters)
    });
    run("8b", "zeros, square W=2 N=100 Qs=Q-2", min(10), &mut || c8(Lattice::Square, &mut clusters));
    run("9", "limiting curves against predictions and zeros", min(15), &mut || c9(&clusters));
    if extended {
        run("10", "Q_c at W=7, triangular, Qs=Q", min(600), &mut c10);
        run("11", "conformal weights from W=8..14", min(600), &mut c11);
    } else {
        for (id, title) in [("10", "Q_c at W=7"), ("11", "conformal weights from W=8..14")] {
            if wanted(id) {
                println!("criterion {id} SKIP  {title} (extended; pass --extended)");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
