//! Built-in checks behind `--selftest`, one set per subcommand.

use num_bigint::BigInt;
use num_rational::BigRational;

use annulus_chromatic::algebra::{BivariatePolynomial, QsRelation, UniPoly, Variable};
use annulus_chromatic::bkw::{self, AnnulusSource};
use annulus_chromatic::config::Guards;
use annulus_chromatic::graphs::{build_annulus, fixture, AnnulusSpec, Lattice, FIXTURES};
use annulus_chromatic::oracle::{coloring_count, fk_bruteforce, fk_integer_value};
use annulus_chromatic::spectra::{extract_amplitudes, free_energy_scan, locate_crossing, AmplitudeOptions, SectorFamily};
use annulus_chromatic::theory::{predict_fixed_t, predict_loci, LocusKind};
use annulus_chromatic::transfer::{exact_partition, exact_partition_guarded, BlobMode};
use annulus_chromatic::zeros::find_roots;
use annulus_chromatic::Error;

use crate::CliError;

type Check = (&'static str, fn() -> Result<(), String>);

pub fn run(command: &str) -> Result<(), CliError> {
    let checks: &[Check] = match command {
        "chromatic" => &[
            ("fig1 fixture polynomial", fig1),
            ("strip transfer equals subset sum", strip_vs_oracle),
            ("width guard", width_guard),
        ],
        "zeros" => &[("integer roots", integer_roots), ("strip polynomial roots", strip_roots)],
        "scan" => &[("finite free energies", scan_finite), ("first sector crossing", first_crossing)],
        "predict" => &[("fixed t = 6", fixed_t), ("loci along Qs = Q - 2", loci_q_minus_2)],
        "curve" => &[("triangular W = 2 real features", curve_features)],
        "oracle" => &[("fixtures against colourings", oracle_colorings)],
        "verify-amplitudes" => &[("square W = 2", amplitudes)],
        other => return Err(CliError::config(format!("no selftest for `{other}`"))),
    };
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("ok    {command}: {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL  {command}: {name}: {e}");
            }
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::failed(format!("{failed} selftest check(s) failed")))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fig1() -> Result<(), String> {
    let g = fixture("fig1_square").map_err(|e| e.to_string())?;
    let p = fk_bruteforce(&g).map_err(|e| e.to_string())?;
    let q = BivariatePolynomial::q();
    let qs = BivariatePolynomial::qs();
    let one = BivariatePolynomial::one();
    let quad = &(&(&q * &q) - &q.scale(&BigInt::from(3))) + &BivariatePolynomial::constant(3);
    let expect = &(&quad * &qs) * &(&qs - &one);
    ensure(p == expect, || format!("got {p}"))
}

fn strip_vs_oracle() -> Result<(), String> {
    for lat in [Lattice::Square, Lattice::Triangular] {
        let spec = AnnulusSpec::new(lat, 2, 3);
        let a = exact_partition(&spec).map_err(|e| e.to_string())?;
        let g = build_annulus(&spec).map_err(|e| e.to_string())?;
        let b = fk_bruteforce(&g).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{lat} W=2 N=3 differs"))?;
    }
    Ok(())
}

fn width_guard() -> Result<(), String> {
    match exact_partition_guarded(&AnnulusSpec::square(5, 2), &Guards::default()) {
        Err(Error::SizeGuard(_)) => Ok(()),
        other => Err(format!("expected a size guard, got {other:?}")),
    }
}

fn integer_roots() -> Result<(), String> {
    let p = UniPoly::from_integer_roots(&[2, 3, 3, -1], Variable::Q);
    let rs = find_roots(&p, 1e-20).map_err(|e| e.to_string())?;
    let mut xs: Vec<f64> = rs.points().iter().map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    let expect = [-1.0, 2.0, 3.0, 3.0];
    ensure(xs.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-9), || format!("{xs:?}"))
}

fn strip_roots() -> Result<(), String> {
    let spec = AnnulusSpec::new(Lattice::Triangular, 2, 6);
    let rel: QsRelation = "Qs=Q-2".parse().map_err(|e: Error| e.to_string())?;
    let p = exact_partition(&spec).map_err(|e| e.to_string())?.substitute_relation(&rel);
    ensure(p.eval_int(2) == BigRational::from_integer(0.into()), || "p(2) != 0".into())?;
    let rs = find_roots(&p, 1e-20).map_err(|e| e.to_string())?;
    ensure(rs.max_residual() <= 1e-20, || format!("residual {}", rs.max_residual()))?;
    ensure(rs.points().iter().any(|z| (z.re - 2.0).abs() < 1e-9 && z.im.abs() < 1e-9), || {
        "no root at 2".into()
    })
}

fn scan_finite() -> Result<(), String> {
    let grid: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let table = free_energy_scan(Lattice::Square, 2, 6.0, &grid, &Guards::default()).map_err(|e| e.to_string())?;
    ensure(!table.rows.is_empty(), || "empty table".into())?;
    ensure(table.rows.iter().all(|r| r.f.iter().all(|f| f.is_finite())), || {
        "non-finite free energy".into()
    })
}

fn first_crossing() -> Result<(), String> {
    let spec = AnnulusSpec::new(Lattice::Square, 4, 2);
    let fam = SectorFamily::new(&spec, BlobMode::Blobbed, &Guards::default()).map_err(|e| e.to_string())?;
    let r = locate_crossing(&fam, 6.0, 0, (0.15, 0.25)).map_err(|e| e.to_string())?;
    ensure((r - 0.2).abs() < 1e-9, || format!("crossing at {r}"))
}

fn fixed_t() -> Result<(), String> {
    let loci = predict_fixed_t(6.0, None);
    ensure(loci.len() == 6, || format!("{} loci", loci.len()))?;
    for (i, l) in loci.iter().enumerate() {
        let kind = if i % 2 == 0 { LocusKind::CurveCrossing } else { LocusKind::IsolatedPoint };
        ensure(l.kind == kind && (l.r * 5.0 - (i + 1) as f64).abs() < 1e-12, || {
            format!("locus {i}: {l:?}")
        })?;
    }
    ensure(loci[5].qs.is_none() && loci[5].boundary, || "s = t locus".into())
}

fn loci_q_minus_2() -> Result<(), String> {
    let rel: QsRelation = "Qs=Q-2".parse().map_err(|e: Error| e.to_string())?;
    let loci = predict_loci(&rel, 2.0, 12.0, None).map_err(|e| e.to_string())?;
    ensure(!loci.is_empty(), || "no loci".into())?;
    ensure(loci.iter().all(|l| (l.t - (2 * l.s + 2) as f64).abs() < 1e-9), || {
        format!("{loci:?}")
    })
}

fn curve_features() -> Result<(), String> {
    let rel: QsRelation = "Qs=Q-2".parse().map_err(|e: Error| e.to_string())?;
    let spec = AnnulusSpec::new(Lattice::Triangular, 2, 2);
    let src = AnnulusSource::new(&spec, &rel, &Guards::default()).map_err(|e| e.to_string())?;
    let xs = bkw::real_axis_crossings(&src, (1.5, 3.7), 881);
    let near = |xs: &[f64], x: f64| xs.iter().any(|y| (y - x).abs() < 1e-3);
    ensure(near(&xs, 2.0) && near(&xs, 2.0 + 2f64.sqrt()), || format!("crossings {xs:?}"))?;
    let iso: Vec<f64> = bkw::isolated_points(&src, (1.5, 3.7), 881).iter().map(|p| p.q).collect();
    let golden = (5.0 + 5f64.sqrt()) / 2.0;
    ensure(near(&iso, 3.0) && near(&iso, golden), || format!("isolated {iso:?}"))
}

fn oracle_colorings() -> Result<(), String> {
    for name in FIXTURES {
        let g = fixture(name).map_err(|e| e.to_string())?;
        for q in 1..=4u32 {
            for qs in 1..=q {
                let a = fk_integer_value(&g, q as i64, qs as i64).map_err(|e| e.to_string())?;
                let b = coloring_count(&g, q, qs).map_err(|e| e.to_string())?;
                ensure(a == b, || format!("{name} at ({q}, {qs}): {a} vs {b}"))?;
            }
        }
    }
    Ok(())
}

fn amplitudes() -> Result<(), String> {
    let q = BigRational::new(5.into(), 2.into());
    let qs = BigRational::new(7.into(), 10.into());
    let fit = extract_amplitudes(&AnnulusSpec::square(2, 2), &q, &qs, &AmplitudeOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(!fit.failed && fit.residual < 1e-10, || format!("residual {}", fit.residual))?;
    let worst = fit.dominant.iter().filter(|d| !d.shared).map(|d| d.rel_error).fold(0.0, f64::max);
    ensure(worst <= 1e-6, || format!("relative error {worst}"))
}
