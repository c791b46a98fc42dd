use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use annulus_chromatic::config::Guards;
use annulus_chromatic::graphs::{build_annulus, AnnulusSpec, Coupling, Lattice};
use annulus_chromatic::oracle::{coloring_count, fk_bruteforce, fk_value};
use annulus_chromatic::theory::{amplitude_d, amplitude_d_unblobbed};
use annulus_chromatic::transfer::{
    exact_partition, exact_partition_rational, exact_partition_series, sector_matrix, BlobMode, SectorOperator, Weights,
};

fn trace_pow(m: &DMatrix<Complex64>, n: usize) -> Complex64 {
    let mut p = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..n {
        p = &p * m;
    }
    p.trace()
}

/// `Z(N) = sum_ell D_2ell(Q, Qs) tr Tb^N + D_2ell(Q, Q - Qs) tr Tu^N`.
fn sector_sum(spec: &AnnulusSpec, w: &Weights<Complex64>, n: usize) -> Complex64 {
    let mut z = Complex64::new(0.0, 0.0);
    for ell in 0..=spec.width {
        let l = 2 * ell as u32;
        for mode in [BlobMode::Blobbed, BlobMode::Unblobbed] {
            let m = sector_matrix(spec, ell, mode, w).unwrap();
            if m.nrows() == 0 {
                continue;
            }
            let d = match mode {
                BlobMode::Blobbed => amplitude_d(l, &w.q, &w.qs),
                BlobMode::Unblobbed => amplitude_d_unblobbed(l, &w.q, &w.qs),
            };
            z += d * trace_pow(&m, n);
        }
    }
    z
}

fn lattice() -> impl Strategy<Value = Lattice> {
    prop_oneof![Just(Lattice::Square), Just(Lattice::Triangular)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn sector_decomposition_reproduces_exact(
        lat in lattice(),
        width in 1usize..4,
        q in (-3.0f64..4.0, -2.0f64..2.0),
        qs in (-3.0f64..4.0, -2.0f64..2.0),
    ) {
        let spec = AnnulusSpec::new(lat, width, 2);
        let w = Weights::complex(Complex64::new(q.0, q.1), Complex64::new(qs.0, qs.1), &Coupling::chromatic());
        let exact = exact_partition_series(&spec, &w, &Guards::default(), 7).unwrap();
        for (k, z) in exact.iter().enumerate() {
            let n = k + 2;
            let s = sector_sum(&spec, &w, n);
            prop_assert!((s - z).norm() <= 1e-8 * z.norm().max(1.0), "N={} exact {} sectors {}", n, z, s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn flagless_sectors_at_equal_weights(
        lat in lattice(),
        width in 1usize..4,
        q in (-3.0f64..4.0, -2.0f64..2.0),
    ) {
        let spec = AnnulusSpec::new(lat, width, 2);
        let q = Complex64::new(q.0, q.1);
        let w = Weights::complex(q, q, &Coupling::chromatic());
        let exact = exact_partition_series(&spec, &w, &Guards::default(), 6).unwrap();
        let mats: Vec<_> = (0..=width)
            .map(|ell| SectorOperator::flagless(&spec, ell, &Guards::default()).unwrap().dense_complex(&w))
            .collect();
        for (k, z) in exact.iter().enumerate() {
            let n = k + 2;
            let s: Complex64 = mats
                .iter()
                .enumerate()
                .map(|(ell, m)| amplitude_d(2 * ell as u32, &q, &q) * trace_pow(m, n))
                .sum();
            prop_assert!((s - z).norm() <= 1e-8 * z.norm().max(1.0), "N={} exact {} sectors {}", n, z, s);
        }
    }
}

#[test]
fn flagless_dimensions() {
    for w in 1..=5 {
        let spec = AnnulusSpec::triangular(w, 2);
        for ell in 0..=w {
            let b = SectorOperator::new(&spec, ell, BlobMode::Blobbed).unwrap().dim();
            let u = if ell < w { SectorOperator::new(&spec, ell + 1, BlobMode::Unblobbed).unwrap().dim() } else { 0 };
            assert_eq!(SectorOperator::flagless(&spec, ell, &Guards::default()).unwrap().dim(), b - u, "W={w} ell={ell}");
        }
    }
}

#[test]
fn cycle_with_boundary_rim() {
    let spec = AnnulusSpec::square(1, 3);
    let g = build_annulus(&spec).unwrap();
    assert_eq!(g.boundary().len(), 3);
    let three = BigRational::from_integer(3.into());
    let z = exact_partition_rational(&spec, &three, &three, &Guards::default()).unwrap();
    assert_eq!(z, BigRational::from_integer(coloring_count(&g, 3, 3).unwrap()));
    assert_eq!(z, BigRational::from_integer(6.into()));
}

#[test]
fn couplings_off_the_chromatic_line() {
    let two = Coupling::Rational(BigRational::from_integer(2.into()));
    let spec = AnnulusSpec::triangular(2, 3).with_coupling(two);
    let g = build_annulus(&spec).unwrap();
    assert_eq!(exact_partition(&spec).unwrap(), fk_bruteforce(&g).unwrap());

    let v = BigRational::new(2.into(), 3.into());
    let spec = AnnulusSpec::triangular(2, 3).with_coupling(Coupling::Rational(v.clone()));
    let g = build_annulus(&spec).unwrap();
    let (q, qs) = (BigRational::new(7.into(), 2.into()), BigRational::new(5.into(), 4.into()));
    let series = exact_partition_series(&spec, &Weights::new(q.clone(), qs.clone(), v.clone()), &Guards::default(), 3).unwrap();
    assert_eq!(series[1], fk_value(&g, &q, &qs, &v).unwrap());
}
