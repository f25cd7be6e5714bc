use std::f64::consts::PI;

use proptest::prelude::*;
use sectorsum_core::gamma::gamma;
use sectorsum_core::opsum::{self, OperatorSumProblem};
use sectorsum_core::{LinearOperator, MixedNormSpec, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_reflection(re in 0.05f64..0.95, im in -5.0f64..5.0) {
        let z = C64::new(re, im);
        let lhs = gamma(z).unwrap() * gamma(C64::new(1.0, 0.0) - z).unwrap();
        let rhs = C64::new(PI, 0.0) / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn diagonal_sum_inverse_is_reciprocal(
        a in prop::collection::vec((0.1f64..10.0, -0.6f64..0.6), 1..5),
        b in prop::collection::vec(0.1f64..10.0, 4),
    ) {
        let n = a.len();
        let da: Vec<C64> = a.iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
        let db: Vec<C64> = b[..n].iter().map(|&r| C64::new(r, 0.0)).collect();
        let p = OperatorSumProblem::new(
            LinearOperator::from_diagonal(&da, "a").unwrap(),
            LinearOperator::from_diagonal(&db, "b").unwrap(),
            MixedNormSpec::euclidean(),
        ).unwrap();
        let s = opsum::build_sum_inverse(&p).unwrap();
        for k in 0..n {
            let exact = C64::new(1.0, 0.0) / (da[k] + db[k]);
            prop_assert!((s.entries()[(k, k)] - exact).norm() <= 1e-8 * exact.norm());
        }
    }
}
