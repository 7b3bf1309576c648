use num_complex::Complex64;
use oscillquad::dct::{dct1_forward, dct1_inverse};
use oscillquad::hockney::hockney_permutation;
use oscillquad::levin::{boundary_value, collocation_residual};
use oscillquad::{
    banded_lu_factor, cheb_eval, make_bessel_auto, make_exponential, manufactured, quadrature, BandedMatrix,
    ChebCoeffVector, LevinProblem, OscillatorSystem, Polynomial,
};
use proptest::prelude::*;

fn complex_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn system(kind: u8, omega: f64) -> OscillatorSystem {
    match kind {
        0 => make_exponential(&Polynomial::from_real(&[0.0, 1.0]), omega).unwrap(),
        1 => make_exponential(&Polynomial::from_real(&[0.3, 1.0, 0.0, 0.1]), omega).unwrap(),
        _ => make_bessel_auto(1, 2.0, omega).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dct_roundtrip(x in complex_vec(3..200)) {
        let back = dct1_inverse(&dct1_forward(&x).unwrap()).unwrap();
        let err = x.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * max_abs(&x).max(1e-300));
    }

    #[test]
    fn endpoint_values_are_coefficient_sums(c in complex_vec(1..40)) {
        let q = ChebCoeffVector::new(c.clone());
        let plus: Complex64 = c.iter().sum();
        let minus: Complex64 = c.iter().enumerate().map(|(n, v)| if n % 2 == 0 { *v } else { -v }).sum();
        prop_assert!((q.value_at_plus_one() - plus).norm() < 1e-12);
        prop_assert!((q.value_at_minus_one() - minus).norm() < 1e-12);
        prop_assert!((cheb_eval(&q, 1.0).unwrap() - plus).norm() < 1e-12);
        prop_assert!((cheb_eval(&q, -1.0).unwrap() - minus).norm() < 1e-12);
    }

    #[test]
    fn hockney_is_a_bijection(m in 1usize..5, half in 1usize..40) {
        let nu = 2 * half;
        let p = hockney_permutation(m, nu).unwrap();
        let mut seen = vec![false; m * nu];
        for i in 0..m * nu {
            let j = p.map(i);
            prop_assert!(!seen[j]);
            seen[j] = true;
            prop_assert_eq!(p.inverse_map(j), i);
        }
    }

    #[test]
    fn banded_lu_solves_diagonally_dominant_systems(
        n in 2usize..60, kl in 0usize..4, ku in 0usize..4, seed in any::<u64>()
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut a = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a.set(i, j, if i == j { v + 10.0 } else { v });
            }
        }
        let x: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let b = a.matvec(&x);
        let y = banded_lu_factor(&a).unwrap().solve(&b).unwrap();
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10 * max_abs(&x));
    }

    #[test]
    fn manufactured_problems_are_reproduced(
        kind in 0u8..3, half in 4usize..20, s in 0usize..3,
        log_omega in 1.3f64..3.0, seed in any::<u64>()
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let nu = 2 * half;
        let sys = system(kind, 10f64.powf(log_omega));
        let len = nu + 2 * s + 2;
        let p: Vec<ChebCoeffVector> = (0..sys.dim())
            .map(|_| {
                ChebCoeffVector::new(
                    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
                )
            })
            .collect();
        let man = manufactured(&sys, p, s).unwrap();
        let problem = LevinProblem::new(sys.clone(), man.amplitude.clone(), nu, s).unwrap();
        let r = quadrature(&problem).unwrap();
        prop_assert!((r.value - man.exact_value).norm() <= 1e-9 * (1.0 + r.value.norm()),
            "{:?}: {} vs {}", r.path, r.value, man.exact_value);
        prop_assert!((boundary_value(&sys, &r.coeffs) - r.value).norm() <= 1e-13 * (1.0 + r.value.norm()));
        let res = collocation_residual(&sys, &man.amplitude, &r.coeffs, nu).unwrap();
        prop_assert!(res <= 1e-8);
    }
}
