//! Coefficient generation for `d_{n+1} = A_n d_n + B_n d_{n-1}`, `d_1 = A_0 d_0`,
//! evaluation of `sum d_n x^(n+lambda)` inside the disc with a rigorous tail
//! bound, and the modulus (majorant) sequences built from `|A_n|`, `|B_n|`.

use num::bigint::BigInt;
use num::{BigRational, Complex, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::number::{self, Exact, ScaledComplex, C64};
use crate::recurrence::{CoefficientFamily, PolyN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericMode {
    #[default]
    Exact,
    Float,
}

/// Exact generator in fraction-free form: `d_n = u_n / D_n` with `u_n` a
/// Gaussian integer and `D_n` a positive integer. Each step costs a few
/// multiplications by small integers and no gcd.
#[derive(Debug, Clone)]
pub struct ExactGenerator<'a> {
    family: &'a CoefficientFamily,
    n: u64,
    prev: Complex<BigInt>,
    cur: Complex<BigInt>,
    den: BigInt,
    // D_n / D_{n-1}
    last_step: BigInt,
}

impl<'a> ExactGenerator<'a> {
    pub fn new(family: &'a CoefficientFamily, d0: &Exact) -> Result<Self> {
        let (u0, q) = number::to_gaussian_over_int(d0);
        Ok(ExactGenerator {
            family,
            n: 0,
            prev: Complex::new(BigInt::zero(), BigInt::zero()),
            cur: u0,
            den: q,
            last_step: BigInt::one(),
        })
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    /// Moves from `d_n` to `d_{n+1}`.
    pub fn advance(&mut self) -> Result<()> {
        let n = self.n;
        self.family.check_a_defined(n, n)?;
        let (next, step) = if n == 0 {
            let (p, q) = self.family.coeff_a_gaussian(0);
            (p * &self.cur, q)
        } else {
            self.family.check_b_defined(n, n)?;
            let (p, r, l) = self.family.coeffs_over_common_den(n);
            let carried = Complex::new(&self.prev.re * &self.last_step, &self.prev.im * &self.last_step);
            (p * &self.cur + r * carried, l)
        };
        self.den *= &step;
        self.last_step = step;
        self.prev = std::mem::replace(&mut self.cur, next);
        self.n += 1;
        Ok(())
    }

    pub fn current(&self) -> Exact {
        let d = BigRational::from_integer(self.den.clone());
        Complex::new(
            BigRational::from_integer(self.cur.re.clone()) / &d,
            BigRational::from_integer(self.cur.im.clone()) / d,
        )
    }

    /// `log10 |u_n|`; the numerator part of `log10 |d_n|`.
    pub fn log10_abs_numer(&self) -> f64 {
        number::gaussian_log10_abs(&self.cur)
    }

    /// `log10 (D_n / D_{n-1})`.
    pub fn log10_last_step(&self) -> f64 {
        number::bigint_log10_abs(&self.last_step)
    }

    pub fn log10_abs_current(&self) -> f64 {
        self.log10_abs_numer() - number::bigint_log10_abs(&self.den)
    }
}

/// Double-precision generator with a shared decimal exponent for the two
/// live coefficients, rescaled whenever they drift far from unity.
#[derive(Debug, Clone)]
pub struct ScaledGenerator<'a> {
    family: &'a CoefficientFamily,
    n: u64,
    prev: C64,
    cur: C64,
    exp10: i64,
}

const RESCALE_HIGH: f64 = 1e200;
const RESCALE_LOW: f64 = 1e-200;

impl<'a> ScaledGenerator<'a> {
    pub fn new(family: &'a CoefficientFamily, d0: C64) -> Self {
        let s = ScaledComplex::new(d0, 0);
        ScaledGenerator { family, n: 0, prev: C64::new(0.0, 0.0), cur: s.mantissa, exp10: s.exp10 }
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    pub fn advance(&mut self) -> Result<()> {
        let n = self.n;
        self.family.check_a_defined(n, n)?;
        let next = if n == 0 {
            self.family.coeff_a_f64(0) * self.cur
        } else {
            self.family.check_b_defined(n, n)?;
            self.family.coeff_a_f64(n) * self.cur + self.family.coeff_b_f64(n) * self.prev
        };
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Overflow { index: n + 1 });
        }
        self.prev = std::mem::replace(&mut self.cur, next);
        self.n += 1;
        let big = self.cur.norm().max(self.prev.norm());
        if big > RESCALE_HIGH || (big < RESCALE_LOW && big > 0.0) {
            let k = big.log10().floor() as i64;
            let scale = number::pow10(-k);
            self.cur *= scale;
            self.prev *= scale;
            self.exp10 += k;
        }
        Ok(())
    }

    pub fn current(&self) -> ScaledComplex {
        ScaledComplex::new(self.cur, self.exp10)
    }
}

/// Generated coefficients in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Exact(Vec<Exact>),
    Scaled(Vec<ScaledComplex>),
}

impl Coefficients {
    pub fn len(&self) -> usize {
        match self {
            Coefficients::Exact(v) => v.len(),
            Coefficients::Scaled(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scaled(&self, n: usize) -> ScaledComplex {
        match self {
            Coefficients::Exact(v) => ScaledComplex::from_exact(&v[n]),
            Coefficients::Scaled(v) => v[n],
        }
    }

    pub fn exact(&self) -> Option<&[Exact]> {
        match self {
            Coefficients::Exact(v) => Some(v),
            Coefficients::Scaled(_) => None,
        }
    }
}

/// One evaluation (or coefficient-only generation) of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRun {
    pub lambda: C64,
    pub d: Coefficients,
    /// `sum_{n<=k} d_n x^(n+lambda)`; empty for coefficient-only runs.
    pub partial_sums: Vec<C64>,
    /// `sum_{n<=k} |d_n| |x|^n`; empty for coefficient-only runs.
    pub abs_partial_sums: Vec<f64>,
    pub truncation_error_bound: Option<f64>,
    pub converged: bool,
}

/// One CSV row of a run: `n, Re(d_n), Im(d_n), scale_exponent, S_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub scale_exponent: i64,
    pub s: f64,
}

impl SeriesRun {
    pub fn rows(&self) -> Vec<CoefficientRow> {
        (0..self.d.len())
            .map(|n| {
                let c = self.d.scaled(n);
                CoefficientRow {
                    n,
                    re: c.mantissa.re,
                    im: c.mantissa.im,
                    scale_exponent: c.exp10,
                    s: self.abs_partial_sums.get(n).copied().unwrap_or(f64::NAN),
                }
            })
            .collect()
    }
}

pub fn generate_exact(f: &CoefficientFamily, d0: &Exact, m: usize) -> Result<Vec<Exact>> {
    f.check_poles(m as u64)?;
    let mut gen = ExactGenerator::new(f, d0)?;
    let mut out = Vec::with_capacity(m + 1);
    out.push(gen.current());
    for _ in 0..m {
        gen.advance()?;
        out.push(gen.current());
    }
    Ok(out)
}

pub fn generate_scaled(f: &CoefficientFamily, d0: C64, m: usize) -> Result<Vec<ScaledComplex>> {
    f.check_poles(m as u64)?;
    let mut gen = ScaledGenerator::new(f, d0);
    let mut out = Vec::with_capacity(m + 1);
    out.push(gen.current());
    for _ in 0..m {
        gen.advance()?;
        out.push(gen.current());
    }
    Ok(out)
}

/// Coefficients `d_0..=d_m` only.
pub fn generate_coeffs(f: &CoefficientFamily, d0: &Exact, m: usize, mode: NumericMode) -> Result<SeriesRun> {
    let d = match mode {
        NumericMode::Exact => Coefficients::Exact(generate_exact(f, d0, m)?),
        NumericMode::Float => Coefficients::Scaled(generate_scaled(f, number::to_c64(d0), m)?),
    };
    Ok(SeriesRun {
        lambda: C64::new(0.0, 0.0),
        d,
        partial_sums: Vec::new(),
        abs_partial_sums: Vec::new(),
        truncation_error_bound: None,
        converged: false,
    })
}

/// Upper bound on `sup_{n >= n0} |num(n) / den(n)|` from coefficient moduli.
/// `None` when the bound is unavailable at `n0` (denominator bound not yet
/// positive, or the ratio is unbounded).
pub fn tail_sup_bound(num: &PolyN, den: &PolyN, n0: u64) -> Option<f64> {
    let Some(dn) = num.degree() else { return Some(0.0) };
    let t = den.degree()?;
    if dn > t || n0 == 0 {
        return None;
    }
    let n = n0 as f64;
    let abs = |p: &PolyN, j: usize| number::to_c64(&p.coeff(j)).norm();
    // sum_j |c_j| n^(j-t) and |d_t| - sum_{j<t} |d_j| n^(j-t), both monotone in n
    let top: f64 = (0..=dn).map(|j| abs(num, j) * n.powi(j as i32 - t as i32)).sum();
    let bottom = abs(den, t) - (0..t).map(|j| abs(den, j) * n.powi(j as i32 - t as i32)).sum::<f64>();
    if bottom <= 0.0 {
        return None;
    }
    Some(top / bottom * (1.0 + 1e-12))
}

/// Geometric rate `sigma` with `sigma^2 = a*sigma + b`, which dominates the term
/// moduli once `a + b < 1`.
fn geometric_rate(a: f64, b: f64) -> f64 {
    0.5 * (a + (a * a + 4.0 * b).sqrt())
}

/// Result of [`eval_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEval {
    /// `x^lambda * sum_{n<=M} d_n x^n`.
    pub value: C64,
    /// `sum_{n<=M} d_n x^n` in exact arithmetic (exact mode only).
    pub exact_sum: Option<Exact>,
    pub terms: usize,
    pub truncation_error_bound: f64,
    pub converged: bool,
    pub run: SeriesRun,
}

/// Sums `d_0 * sum d_n x^(n+lambda)` with `d_0 = 1` until the tail bound drops
/// below `tol`.
///
/// The tail bound: with `a >= sup_{k>=M} |A_k x|` and `b >= sup_{k>=M} |B_k x^2|`
/// and `a + b < 1`, the term moduli satisfy `|t_{M+k}| <= K sigma^k` where
/// `sigma^2 = a sigma + b` and `K = max(|t_M|, sigma |t_{M-1}|)`; the remainder is
/// at most `K sigma / (1 - sigma)`.
pub fn eval_series(
    f: &CoefficientFamily,
    lambda: C64,
    x: &Exact,
    tol: f64,
    m_max: usize,
    mode: NumericMode,
) -> Result<SeriesEval> {
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let class = classify(f);
    let radius = class
        .disc_radius
        .ok_or_else(|| Error::UnsupportedShape("no disc of convergence for this family".into()))?;
    let xc = number::to_c64(x);
    let x_abs = xc.norm();
    if !radius.contains(x) {
        return Err(Error::NotInDisc { x_abs, radius: radius.to_string() });
    }

    let prefactor = if lambda == C64::new(0.0, 0.0) {
        C64::new(1.0, 0.0)
    } else if x_abs == 0.0 {
        if lambda.re > 0.0 {
            C64::new(0.0, 0.0)
        } else {
            return Err(Error::DomainError("x^lambda is singular at x = 0".into()));
        }
    } else {
        xc.powc(lambda)
    };

    let mut exact_gen = match mode {
        NumericMode::Exact => Some(ExactGenerator::new(f, &Exact::one())?),
        NumericMode::Float => None,
    };
    let mut float_gen = match mode {
        NumericMode::Float => Some(ScaledGenerator::new(f, C64::new(1.0, 0.0))),
        NumericMode::Exact => None,
    };

    let mut exact_coeffs = Vec::new();
    let mut scaled_coeffs = Vec::new();
    let mut exact_sum = Exact::zero();
    let mut exact_pow = Exact::one();
    let mut float_sum = C64::new(0.0, 0.0);
    let mut x_pow = ScaledComplex::new(C64::new(1.0, 0.0), 0);
    let x_scaled = ScaledComplex::new(xc, 0);
    let mut partial_sums = Vec::new();
    let mut abs_partial_sums = Vec::new();
    let mut abs_sum = 0.0;
    let mut prev_term_abs = 0.0;
    let mut last_bound: Option<f64> = None;

    for n in 0..=m_max {
        let term_abs;
        match (&mut exact_gen, &mut float_gen) {
            (Some(g), _) => {
                let d = g.current();
                let term = &d * &exact_pow;
                term_abs = ScaledComplex::from_exact(&term).abs_times_pow(1.0, 0);
                exact_sum += &term;
                exact_coeffs.push(d);
                float_sum = number::to_c64(&exact_sum);
                exact_pow *= x;
            }
            (None, Some(g)) => {
                let d = g.current();
                let term = ScaledComplex::new(d.mantissa * x_pow.mantissa, d.exp10 + x_pow.exp10);
                term_abs = term.abs_times_pow(1.0, 0);
                float_sum += term.to_c64();
                scaled_coeffs.push(d);
                x_pow = ScaledComplex::new(x_pow.mantissa * x_scaled.mantissa, x_pow.exp10 + x_scaled.exp10);
            }
            _ => unreachable!(),
        }
        abs_sum += term_abs;
        partial_sums.push(prefactor * float_sum);
        abs_partial_sums.push(abs_sum);

        if n >= 1 {
            let a = tail_sup_bound(f.a_num(), f.a_den(), n as u64).map(|v| v * x_abs);
            let b = tail_sup_bound(f.b_num(), f.b_den(), n as u64).map(|v| v * x_abs * x_abs);
            if let (Some(a), Some(b)) = (a, b) {
                if a + b < 1.0 {
                    let sigma = geometric_rate(a, b);
                    let k = term_abs.max(sigma * prev_term_abs);
                    let bound = k * sigma / (1.0 - sigma) * prefactor.norm();
                    last_bound = Some(bound);
                    if bound <= tol {
                        return Ok(finish(
                            lambda, prefactor, float_sum, exact_gen.map(|_| exact_sum), exact_coeffs, scaled_coeffs,
                            partial_sums, abs_partial_sums, bound, true,
                        ));
                    }
                }
            }
        }
        prev_term_abs = term_abs;
        if n < m_max {
            if let Some(g) = exact_gen.as_mut() {
                g.advance()?;
            }
            if let Some(g) = float_gen.as_mut() {
                g.advance()?;
            }
        }
    }
    match last_bound {
        None => Err(Error::NoConvergenceWithinBudget { budget: m_max }),
        Some(bound) => Ok(finish(
            lambda, prefactor, float_sum, exact_gen.map(|_| exact_sum), exact_coeffs, scaled_coeffs, partial_sums,
            abs_partial_sums, bound, false,
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    lambda: C64,
    prefactor: C64,
    float_sum: C64,
    exact_sum: Option<Exact>,
    exact_coeffs: Vec<Exact>,
    scaled_coeffs: Vec<ScaledComplex>,
    partial_sums: Vec<C64>,
    abs_partial_sums: Vec<f64>,
    bound: f64,
    converged: bool,
) -> SeriesEval {
    let d = if exact_sum.is_some() { Coefficients::Exact(exact_coeffs) } else { Coefficients::Scaled(scaled_coeffs) };
    let terms = d.len() - 1;
    SeriesEval {
        value: prefactor * float_sum,
        exact_sum,
        terms,
        truncation_error_bound: bound,
        converged,
        run: SeriesRun {
            lambda,
            d,
            partial_sums,
            abs_partial_sums,
            truncation_error_bound: Some(bound),
            converged,
        },
    }
}

/// `S_k = sum_{n<=k} |d_n| x_abs^n` for `k = 0..=m`, with `d_0 = 1`.
pub fn abs_partial_sums(f: &CoefficientFamily, x_abs: f64, m: usize) -> Result<Vec<f64>> {
    if !(x_abs >= 0.0) {
        return Err(Error::DomainError(format!("x_abs must be nonnegative, got {x_abs}")));
    }
    f.check_poles(m as u64)?;
    let mut gen = ScaledGenerator::new(f, C64::new(1.0, 0.0));
    let mut out = Vec::with_capacity(m + 1);
    let mut s = 0.0;
    for n in 0..=m {
        s += gen.current().abs_times_pow(x_abs, n as u64);
        if !s.is_finite() {
            return Err(Error::Overflow { index: n as u64 });
        }
        out.push(s);
        if n < m {
            gen.advance()?;
        }
    }
    Ok(out)
}

/// The modulus sequences started at index `N`:
/// `c̄_0 = 1`, `c̄_1 = |A_N|`, `c̄_{k+1} = |A_{N+k}| c̄_k + |B_{N+k}| c̄_{k-1}`,
/// and `ĉ` the same sequence started at `N + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorantRun {
    pub n_start: u64,
    pub cbar: Vec<f64>,
    pub chat: Vec<f64>,
}

fn modulus_sequence(f: &CoefficientFamily, start: u64, m: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(m + 1);
    c.push(1.0);
    if m >= 1 {
        c.push(f.coeff_a_f64(start).norm());
    }
    for k in 1..m {
        let n = start + k as u64;
        let next = f.coeff_a_f64(n).norm() * c[k] + f.coeff_b_f64(n).norm() * c[k - 1];
        c.push(next);
    }
    c
}

fn check_shifted(f: &CoefficientFamily, start: u64, m: usize) -> Result<()> {
    if m >= 1 {
        f.check_a_defined(start, start + m as u64 - 1)?;
        if m >= 2 {
            f.check_b_defined(start + 1, start + m as u64 - 1)?;
        }
    }
    Ok(())
}

pub fn majorant_sequences(f: &CoefficientFamily, n_start: u64, m: usize) -> Result<MajorantRun> {
    check_shifted(f, n_start, m)?;
    check_shifted(f, n_start + 1, m)?;
    Ok(MajorantRun { n_start, cbar: modulus_sequence(f, n_start, m), chat: modulus_sequence(f, n_start + 1, m) })
}

/// Exact `|A_n|` for a real family.
pub(crate) fn abs_a_exact(f: &CoefficientFamily, n: u64) -> Result<BigRational> {
    Ok(f.coeff_a(n)?.re.abs())
}

pub(crate) fn abs_b_exact(f: &CoefficientFamily, n: u64) -> Result<BigRational> {
    Ok(f.coeff_b(n)?.re.abs())
}

/// Exact `c̄` sequence started at `n_start`, for real families.
pub fn majorant_exact(f: &CoefficientFamily, n_start: u64, m: usize) -> Result<Vec<BigRational>> {
    if !f.is_real() {
        return Err(Error::NotReal("exact moduli of complex coefficients are irrational in general".into()));
    }
    check_shifted(f, n_start, m)?;
    let mut c = vec![BigRational::one()];
    if m >= 1 {
        c.push(abs_a_exact(f, n_start)?);
    }
    for k in 1..m {
        let n = n_start + k as u64;
        let next = abs_a_exact(f, n)? * &c[k] + abs_b_exact(f, n)? * &c[k - 1];
        c.push(next);
    }
    Ok(c)
}

/// `sum_{i<=m} c̄_i x_abs^i`, accumulated in scaled form so it stays finite
/// for families with `|A| > 1`.
pub fn majorant_weighted_sum(f: &CoefficientFamily, n_start: u64, m: usize, x_abs: f64) -> Result<f64> {
    check_shifted(f, n_start, m)?;
    // e_i = c̄_i x^i obeys the same recurrence with |A x| and |B x^2|
    let mut prev = 1.0;
    let mut sum = 1.0;
    if m == 0 {
        return Ok(sum);
    }
    let mut cur = f.coeff_a_f64(n_start).norm() * x_abs;
    sum += cur;
    for k in 1..m {
        let n = n_start + k as u64;
        let next = f.coeff_a_f64(n).norm() * x_abs * cur + f.coeff_b_f64(n).norm() * x_abs * x_abs * prev;
        prev = cur;
        cur = next;
        sum += cur;
    }
    Ok(sum)
}
