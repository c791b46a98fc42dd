use num_complex::Complex64;
use proptest::prelude::*;

use annulus_chromatic::algebra::{UniPoly, Variable};
use annulus_chromatic::zeros::{find_roots, root_sum};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn roots_sum_to_the_trace_and_close_under_conjugation(cs in prop::collection::vec(-20i64..21, 2..12), lead in 1i64..5) {
        let mut cs = cs;
        cs.push(lead);
        let p = UniPoly::from_ints(&cs, Variable::Q);
        let rs = find_roots(&p, 1e-20).unwrap();
        prop_assert_eq!(rs.roots.len(), cs.len() - 1);
        prop_assert!(rs.max_residual() <= 1e-20);

        let n = cs.len() - 1;
        let want = -(cs[n - 1] as f64) / lead as f64;
        let sum = root_sum(&rs).to_complex64();
        prop_assert!((sum - Complex64::new(want, 0.0)).norm() < 1e-9, "{} vs {}", sum, want);

        let pts = rs.points();
        for z in &pts {
            let best = pts.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8 * z.norm().max(1.0));
        }
    }
}

#[test]
fn wilkinson() {
    let roots: Vec<i64> = (1..=20).collect();
    let p = UniPoly::from_integer_roots(&roots, Variable::Q);
    let rs = find_roots(&p, 1e-20).unwrap();
    let mut re: Vec<f64> = rs.points().iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    for (k, x) in re.iter().enumerate() {
        assert!((x - (k + 1) as f64).abs() < 1e-10, "{x}");
    }
    for z in rs.points() {
        assert!(z.im.abs() < 1e-10);
    }
}
