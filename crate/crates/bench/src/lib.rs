//! Fixtures shared by the benchmarks.

use num::{BigInt, BigRational};
use trirec::{heun_family, number, CoefficientFamily, HeunParams, IndicialRoot};

/// Heun family with `alpha = 1, beta = 1, gamma = 4, delta = 1, q = 2`.
pub fn heun_example() -> CoefficientFamily {
    let p = HeunParams {
        alpha: number::exact_int(1),
        beta: number::exact_int(1),
        gamma: number::exact_int(4),
        delta: number::exact_int(1),
        q: number::exact_int(2),
        root: IndicialRoot::Zero,
    };
    heun_family(&p).expect("no poles")
}

/// `A_n = 1/(n+1)`, `B_n = (4n+1)/(n+1)`.
pub fn b_dominant() -> CoefficientFamily {
    CoefficientFamily::from_json(r#"{"a_num":["1"],"a_den":["1","1"],"b_num":["1","4"],"b_den":["1","1"]}"#)
        .expect("valid family")
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
