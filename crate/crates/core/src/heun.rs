//! Confluent Heun recurrence families and the two-term hypergeometric
//! baseline obtained at `beta = 0`.

use num::{BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{self, Exact, C64};
use crate::recurrence::{CoefficientFamily, PolyN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IndicialRoot {
    /// `lambda = 0`
    #[default]
    #[serde(rename = "0")]
    Zero,
    /// `lambda = 1 - gamma`
    #[serde(rename = "1-gamma")]
    OneMinusGamma,
}

impl std::str::FromStr for IndicialRoot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(IndicialRoot::Zero),
            "1-gamma" | "1-γ" => Ok(IndicialRoot::OneMinusGamma),
            other => Err(Error::Parse(format!("indicial root must be 0 or 1-gamma, got {other:?}"))),
        }
    }
}

/// Parameters of `x(x-1)y'' + (beta x(x-1) + gamma(x-1) + delta x) y' + (alpha beta x - q) y = 0`
/// in its series form around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunParams {
    pub alpha: Exact,
    pub beta: Exact,
    pub gamma: Exact,
    pub delta: Exact,
    pub q: Exact,
    pub root: IndicialRoot,
}

impl HeunParams {
    pub fn lambda(&self) -> Exact {
        match self.root {
            IndicialRoot::Zero => Exact::zero(),
            IndicialRoot::OneMinusGamma => Exact::one() - &self.gamma,
        }
    }

    /// True when `gamma = 1`: both roots give the same series and the second
    /// solution is logarithmic.
    pub fn roots_coincide(&self) -> bool {
        self.gamma == Exact::one()
    }
}

fn nonneg_integer(z: &Exact) -> Option<u64> {
    if !z.im.is_zero() || !z.re.is_integer() || z.re.is_negative() {
        return None;
    }
    z.re.to_integer().try_into().ok()
}

pub fn heun_family(p: &HeunParams) -> Result<CoefficientFamily> {
    let one = Exact::one();
    let lam = p.lambda();
    // denominator (n + lambda + 1)(n + lambda + gamma)
    for (root, which) in [(-(&lam + &one), "a_den"), (-(&lam + &p.gamma), "a_den")] {
        if let Some(index) = nonneg_integer(&root) {
            return Err(Error::PoleAtIndex { index, which });
        }
    }
    let s = &p.gamma + &p.delta - &p.beta - &one;
    let a_num = PolyN::new(vec![&lam * (&lam + &s) - &p.q, &lam * Exact::from(BigRational::from_integer(2.into())) + &s, one.clone()]);
    let den = PolyN::new(vec![
        (&lam + &one) * (&lam + &p.gamma),
        &lam * Exact::from(BigRational::from_integer(2.into())) + &one + &p.gamma,
        one.clone(),
    ]);
    let b_num = PolyN::new(vec![&p.beta * (&lam + &p.alpha - &one), p.beta.clone()]);
    CoefficientFamily::new(a_num, den.clone(), b_num, den)
}

/// `(a, b, c)` of the hypergeometric series reached at `beta = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    /// Exact values when `a`, `b` are Gaussian rationals.
    pub exact: Option<(Exact, Exact, Exact)>,
}

/// `c = gamma`; `a`, `b` the roots of `z^2 - (gamma + delta - 1) z - q`.
pub fn hypergeometric_reduction(p: &HeunParams) -> Result<HypergeometricParams> {
    if !p.beta.is_zero() {
        return Err(Error::DomainError("hypergeometric reduction needs beta = 0".into()));
    }
    let s = &p.gamma + &p.delta - Exact::one();
    let four = Exact::from(BigRational::from_integer(4.into()));
    let disc = &s * &s + four * &p.q;
    let two = BigRational::from_integer(2.into());
    let exact = if disc.im.is_zero() {
        number::rational_sqrt(&disc.re).map(|r| {
            let r = Exact::from(r);
            let a = (&s + &r) / Exact::from(two.clone());
            let b = (&s - &r) / Exact::from(two.clone());
            (a, b, p.gamma.clone())
        })
    } else {
        None
    };
    let (a, b) = match &exact {
        Some((a, b, _)) => (number::to_c64(a), number::to_c64(b)),
        None => {
            let sf = number::to_c64(&s);
            let r = number::to_c64(&disc).sqrt();
            ((sf + r) * 0.5, (sf - r) * 0.5)
        }
    };
    Ok(HypergeometricParams { a, b, c: number::to_c64(&p.gamma), exact })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussVerdict {
    AbsolutelyConvergent,
    Divergent,
}

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Absolute convergence of `2F1(a, b; c; x)` on `|x| = 1`.
pub fn gauss_boundary_test(a: C64, b: C64, c: C64) -> Result<GaussVerdict> {
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Ok(GaussVerdict::AbsolutelyConvergent);
    }
    if is_nonpositive_integer(c) {
        return Err(Error::DomainError(format!("c = {c} is a nonpositive integer")));
    }
    Ok(if c.re > a.re + b.re { GaussVerdict::AbsolutelyConvergent } else { GaussVerdict::Divergent })
}

/// Two-term family `A_n = (n+a)(n+b) / ((n+c)(n+1))`, `B_n = 0`, whose
/// coefficients are those of `2F1(a, b; c; x)`.
pub fn hypergeometric_family(a: &Exact, b: &Exact, c: &Exact) -> Result<CoefficientFamily> {
    let one = Exact::one();
    let a_num = PolyN::new(vec![a * b, a + b, one.clone()]);
    let a_den = PolyN::new(vec![c.clone(), c + &one, one.clone()]);
    CoefficientFamily::new(a_num, a_den, PolyN::zero(), PolyN::new(vec![one]))
}

/// Same as [`heun_family`] but with parameters given as strings.
pub fn parse_params(alpha: &str, beta: &str, gamma: &str, delta: &str, q: &str, root: &str) -> Result<HeunParams> {
    Ok(HeunParams {
        alpha: number::parse_exact(alpha)?,
        beta: number::parse_exact(beta)?,
        gamma: number::parse_exact(gamma)?,
        delta: number::parse_exact(delta)?,
        q: number::parse_exact(q)?,
        root: root.parse()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, DiscRadius, Kind};
    use crate::number::{exact_int, exact_ratio};
    use crate::recurrence::normalize;

    fn params(alpha: i64, beta: i64, gamma: i64, delta: i64, q: i64) -> HeunParams {
        HeunParams {
            alpha: exact_int(alpha),
            beta: exact_int(beta),
            gamma: exact_int(gamma),
            delta: exact_int(delta),
            q: exact_int(q),
            root: IndicialRoot::Zero,
        }
    }

    #[test]
    fn example_family_polynomials() {
        let f = heun_family(&params(1, 1, 4, 1, 2)).unwrap();
        assert_eq!(f.a_num(), &PolyN::from_ints(&[-2, 3, 1]));
        assert_eq!(f.a_den(), &PolyN::from_ints(&[4, 5, 1]));
        assert_eq!(f.b_num(), &PolyN::from_ints(&[0, 1]));
        assert_eq!(f.coeff_a(0).unwrap(), exact_ratio(-1, 2));
    }

    #[test]
    fn b1_example() {
        // alpha = 1, beta = 2, gamma = 4: B_1 = 2 * 1 / 10
        let f = heun_family(&params(1, 2, 4, 1, 2)).unwrap();
        assert_eq!(f.coeff_b(1).unwrap(), exact_ratio(1, 5));
    }

    #[test]
    fn a0_vanishes_when_q_zero_and_balanced() {
        // q = 0 and beta + 1 = gamma + delta
        let f = heun_family(&params(3, 2, 2, 1, 0)).unwrap();
        assert_eq!(f.coeff_a(0).unwrap(), exact_int(0));
    }

    #[test]
    fn second_root_family() {
        let mut p = params(1, 1, 4, 1, 2);
        p.gamma = exact_ratio(7, 2);
        p.root = IndicialRoot::OneMinusGamma;
        let f = heun_family(&p).unwrap();
        // a_den = n^2 + (3 - gamma) n + (2 - gamma)
        assert_eq!(f.a_den().coeff(1), exact_ratio(-1, 2));
        assert_eq!(f.a_den().coeff(0), exact_ratio(-3, 2));
        let c = classify(&f);
        assert_eq!(c.kind, Kind::ADominant);
        assert_eq!(c.disc_radius, Some(DiscRadius::Finite { value: 1.0, exact: Some(BigRational::one()) }));
    }

    #[test]
    fn pole_for_nonpositive_gamma() {
        let e = heun_family(&params(1, 1, -3, 1, 2)).unwrap_err();
        assert_eq!(e, Error::PoleAtIndex { index: 3, which: "a_den" });
        // lambda = 1 - gamma with gamma = 4 puts a root at n = 2
        let mut p = params(1, 1, 4, 1, 2);
        p.root = IndicialRoot::OneMinusGamma;
        assert_eq!(heun_family(&p).unwrap_err(), Error::PoleAtIndex { index: 2, which: "a_den" });
    }

    #[test]
    fn beta_is_normalized_b() {
        let mut p = params(1, 1, 4, 1, 2);
        p.beta = exact_ratio(-3, 7);
        let nf = normalize(&heun_family(&p).unwrap()).unwrap();
        assert_eq!(nf.b_lead, p.beta);
        assert_eq!(nf.a_lead, exact_int(1));
    }

    #[test]
    fn beta_zero_is_two_term() {
        let f = heun_family(&params(1, 0, 4, 1, 2)).unwrap();
        assert!(f.b_num().is_zero());
        assert_eq!(classify(&f).kind, Kind::TwoTerm);
    }

    #[test]
    fn reduction_roots() {
        let h = hypergeometric_reduction(&params(1, 0, 1, 1, 2)).unwrap();
        let (a, b, c) = h.exact.unwrap();
        assert_eq!((a, b, c), (exact_int(2), exact_int(-1), exact_int(1)));
        let h = hypergeometric_reduction(&params(1, 0, 5, 1, 0)).unwrap();
        let (a, b, _) = h.exact.unwrap();
        assert_eq!((a, b), (exact_int(5), exact_int(0)));
        let h = hypergeometric_reduction(&params(1, 0, 2, 1, 1)).unwrap();
        assert!(h.exact.is_none());
        assert!((h.a * h.b + 1.0).norm() < 1e-12);
        assert!(hypergeometric_reduction(&params(1, 1, 2, 1, 1)).is_err());
    }

    #[test]
    fn reduction_family_matches_heun_family() {
        let p = params(1, 0, 1, 1, 2);
        let (a, b, c) = hypergeometric_reduction(&p).unwrap().exact.unwrap();
        let g = hypergeometric_family(&a, &b, &c).unwrap();
        let f = heun_family(&p).unwrap();
        for n in 0..50 {
            assert_eq!(f.coeff_a(n).unwrap(), g.coeff_a(n).unwrap());
        }
    }

    #[test]
    fn gauss_verdicts() {
        let c = |x: f64| C64::new(x, 0.0);
        assert_eq!(gauss_boundary_test(c(0.25), c(0.25), c(1.0)).unwrap(), GaussVerdict::AbsolutelyConvergent);
        assert_eq!(gauss_boundary_test(c(0.5), c(0.5), c(1.0)).unwrap(), GaussVerdict::Divergent);
        assert_eq!(gauss_boundary_test(c(0.0), c(3.0), c(1.0)).unwrap(), GaussVerdict::AbsolutelyConvergent);
        assert_eq!(gauss_boundary_test(c(-2.0), c(3.0), c(1.0)).unwrap(), GaussVerdict::AbsolutelyConvergent);
        assert!(gauss_boundary_test(c(0.5), c(0.5), c(-1.0)).is_err());
    }

    #[test]
    fn indicial_root_parse() {
        assert_eq!("0".parse::<IndicialRoot>().unwrap(), IndicialRoot::Zero);
        assert_eq!("1-gamma".parse::<IndicialRoot>().unwrap(), IndicialRoot::OneMinusGamma);
        assert!("2".parse::<IndicialRoot>().is_err());
    }
}
