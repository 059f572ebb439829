//! Polynomials in the index `n`, coefficient families `A_n`, `B_n` of the
//! recurrence `d_{n+1} = A_n d_n + B_n d_{n-1}`, and their monic normal form.

use num::bigint::BigInt;
use num::{BigRational, Complex, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{self, Exact, C64};

/// Integer roots above this bound are searched for lazily.
const ROOT_CACHE_LIMIT: u64 = 1_000_000;

/// Dense polynomial in `n` with exact Gaussian-rational coefficients, lowest
/// degree first. Trailing zeros are trimmed, so the zero polynomial has no
/// coefficients and no degree.
#[derive(Debug, Clone)]
pub struct PolyN {
    coeffs: Vec<Exact>,
    approx: Vec<C64>,
    // coeffs = int_coeffs / int_den
    int_coeffs: Vec<Complex<BigInt>>,
    int_den: BigInt,
}

impl PartialEq for PolyN {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl PolyN {
    pub fn new(mut coeffs: Vec<Exact>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let approx = coeffs.iter().map(number::to_c64).collect();
        let int_den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.re.denom()).lcm(c.im.denom()));
        let int_coeffs = coeffs
            .iter()
            .map(|c| {
                let re = c.re.numer() * (&int_den / c.re.denom());
                let im = c.im.numer() * (&int_den / c.im.denom());
                Complex::new(re, im)
            })
            .collect();
        PolyN { coeffs, approx, int_coeffs, int_den }
    }

    pub fn zero() -> Self {
        PolyN::new(Vec::new())
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        PolyN::new(coeffs.iter().map(|&c| number::exact_int(c)).collect())
    }

    pub fn from_rationals(coeffs: &[BigRational]) -> Self {
        PolyN::new(coeffs.iter().cloned().map(number::exact_real).collect())
    }

    pub fn coeffs(&self) -> &[Exact] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(number::is_real)
    }

    pub fn leading(&self) -> Option<&Exact> {
        self.coeffs.last()
    }

    /// Coefficient of `n^j` (zero beyond the degree).
    pub fn coeff(&self, j: usize) -> Exact {
        self.coeffs.get(j).cloned().unwrap_or_else(Exact::zero)
    }

    /// Exact value at an integer index.
    pub fn eval(&self, n: i64) -> Exact {
        let v = self.eval_scaled_int(n);
        let d = BigRational::from_integer(self.int_den.clone());
        Complex::new(BigRational::from_integer(v.re) / &d, BigRational::from_integer(v.im) / d)
    }

    /// `int_den * p(n)` as a Gaussian integer; the cheap exact path for long scans.
    pub fn eval_scaled_int(&self, n: i64) -> Complex<BigInt> {
        let n = BigInt::from(n);
        let mut acc = Complex::new(BigInt::zero(), BigInt::zero());
        for c in self.int_coeffs.iter().rev() {
            acc = Complex::new(&acc.re * &n + &c.re, &acc.im * &n + &c.im);
        }
        acc
    }

    /// Common denominator used by [`PolyN::eval_scaled_int`].
    pub fn int_den(&self) -> &BigInt {
        &self.int_den
    }

    pub fn eval_f64(&self, n: f64) -> C64 {
        self.approx.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * n + c)
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Option<PolyN> {
        let lead = self.leading()?.clone();
        Some(PolyN::new(self.coeffs.iter().map(|c| c / &lead).collect()))
    }

    pub fn scaled(&self, k: &Exact) -> PolyN {
        PolyN::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Upper bound on the modulus of every root (Cauchy).
    fn root_bound(&self) -> f64 {
        let lead = self.approx.last().map_or(1.0, |c| c.norm());
        let rest = self.approx[..self.approx.len().saturating_sub(1)]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
        1.0 + rest
    }

    fn vanishes_at(&self, n: u64) -> bool {
        self.eval_scaled_int(n as i64).is_zero()
    }

    /// Nonnegative integer roots in `[from, to]`, found by exact evaluation.
    pub fn nonneg_integer_roots(&self, from: u64, to: u64) -> Vec<u64> {
        if self.is_zero() {
            return (from..=to).collect();
        }
        let bound = self.root_bound().ceil();
        let hi = if bound < to as f64 { bound as u64 } else { to };
        (from..=hi).filter(|&n| self.vanishes_at(n)).collect()
    }
}

/// Coefficient family of `d_{n+1} = A_n d_n + B_n d_{n-1}` with
/// `A_n = a_num(n)/a_den(n)` and `B_n = b_num(n)/b_den(n)`. The recurrence
/// applies from `n = 1`; `d_1 = A_0 d_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    a_num: PolyN,
    a_den: PolyN,
    b_num: PolyN,
    b_den: PolyN,
    a_den_roots: Vec<u64>,
    b_den_roots: Vec<u64>,
}

impl CoefficientFamily {
    pub fn new(a_num: PolyN, a_den: PolyN, b_num: PolyN, b_den: PolyN) -> Result<Self> {
        if a_den.is_zero() || b_den.is_zero() {
            return Err(Error::DomainError("a_den and b_den must be nonzero polynomials".into()));
        }
        let a_den_roots = a_den.nonneg_integer_roots(0, ROOT_CACHE_LIMIT);
        let b_den_roots = b_den.nonneg_integer_roots(0, ROOT_CACHE_LIMIT);
        Ok(CoefficientFamily { a_num, a_den, b_num, b_den, a_den_roots, b_den_roots })
    }

    pub fn a_num(&self) -> &PolyN {
        &self.a_num
    }

    pub fn a_den(&self) -> &PolyN {
        &self.a_den
    }

    pub fn b_num(&self) -> &PolyN {
        &self.b_num
    }

    pub fn b_den(&self) -> &PolyN {
        &self.b_den
    }

    /// First index at which the three-term recurrence applies.
    pub fn n_min(&self) -> u64 {
        1
    }

    pub fn is_real(&self) -> bool {
        self.a_num.is_real() && self.a_den.is_real() && self.b_num.is_real() && self.b_den.is_real()
    }

    fn first_root(cached: &[u64], poly: &PolyN, from: u64, to: u64) -> Option<u64> {
        if to < from {
            return None;
        }
        if let Some(&r) = cached.iter().find(|&&r| r >= from && r <= to) {
            return Some(r);
        }
        if to > ROOT_CACHE_LIMIT {
            return poly.nonneg_integer_roots(from.max(ROOT_CACHE_LIMIT + 1), to).first().copied();
        }
        None
    }

    /// Checks that `A_n` is defined on `[from, to]`.
    pub fn check_a_defined(&self, from: u64, to: u64) -> Result<()> {
        match Self::first_root(&self.a_den_roots, &self.a_den, from, to) {
            Some(index) => Err(Error::PoleAtIndex { index, which: "a_den" }),
            None => Ok(()),
        }
    }

    /// Checks that `B_n` is defined on `[from, to]`.
    pub fn check_b_defined(&self, from: u64, to: u64) -> Result<()> {
        match Self::first_root(&self.b_den_roots, &self.b_den, from, to) {
            Some(index) => Err(Error::PoleAtIndex { index, which: "b_den" }),
            None => Ok(()),
        }
    }

    /// Checks every denominator used while generating `d_0..=d_m`.
    pub fn check_poles(&self, m: u64) -> Result<()> {
        if m == 0 {
            return Ok(());
        }
        self.check_a_defined(0, m - 1)?;
        self.check_b_defined(1, m - 1)
    }

    pub fn coeff_a(&self, n: u64) -> Result<Exact> {
        self.check_a_defined(n, n)?;
        Ok(self.a_num.eval(n as i64) / self.a_den.eval(n as i64))
    }

    pub fn coeff_b(&self, n: u64) -> Result<Exact> {
        self.check_b_defined(n, n)?;
        Ok(self.b_num.eval(n as i64) / self.b_den.eval(n as i64))
    }

    /// Double-precision `A_n`; callers check poles first.
    pub fn coeff_a_f64(&self, n: u64) -> C64 {
        let x = n as f64;
        self.a_num.eval_f64(x) / self.a_den.eval_f64(x)
    }

    pub fn coeff_b_f64(&self, n: u64) -> C64 {
        if self.b_num.is_zero() {
            return C64::new(0.0, 0.0);
        }
        let x = n as f64;
        self.b_num.eval_f64(x) / self.b_den.eval_f64(x)
    }

    /// `A_n` as `(P, Q)`, a Gaussian integer over a positive integer.
    pub(crate) fn coeff_a_gaussian(&self, n: u64) -> (Complex<BigInt>, BigInt) {
        ratio_as_gaussian(&self.a_num, &self.a_den, n)
    }

    /// `A_n` and `B_n` as Gaussian integers over a shared positive denominator:
    /// `(P, R, L)` with `A_n = P/L`, `B_n = R/L`.
    pub(crate) fn coeffs_over_common_den(&self, n: u64) -> (Complex<BigInt>, Complex<BigInt>, BigInt) {
        let (p, q) = ratio_as_gaussian(&self.a_num, &self.a_den, n);
        let (r, t) = ratio_as_gaussian(&self.b_num, &self.b_den, n);
        let l = q.lcm(&t);
        let p = scale_gaussian(&p, &(&l / &q));
        let r = scale_gaussian(&r, &(&l / &t));
        let g = p.re.gcd(&p.im).gcd(&r.re).gcd(&r.im).gcd(&l);
        if g.is_one() || g.is_zero() {
            (p, r, l)
        } else {
            (divide_gaussian(&p, &g), divide_gaussian(&r, &g), l / g)
        }
    }

    pub fn to_doc(&self) -> FamilyDoc {
        let strs = |p: &PolyN| p.coeffs().iter().map(number::format_exact).collect();
        FamilyDoc {
            a_num: strs(&self.a_num),
            a_den: strs(&self.a_den),
            b_num: strs(&self.b_num),
            b_den: strs(&self.b_den),
        }
    }

    pub fn from_doc(doc: &FamilyDoc) -> Result<Self> {
        let poly = |v: &[String]| -> Result<PolyN> {
            Ok(PolyN::new(v.iter().map(|s| number::parse_exact(s)).collect::<Result<_>>()?))
        };
        CoefficientFamily::new(poly(&doc.a_num)?, poly(&doc.a_den)?, poly(&doc.b_num)?, poly(&doc.b_den)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("family document serializes")
    }
}

/// JSON form of a family: coefficient strings in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub a_num: Vec<String>,
    pub a_den: Vec<String>,
    #[serde(default)]
    pub b_num: Vec<String>,
    pub b_den: Vec<String>,
}

fn scale_gaussian(z: &Complex<BigInt>, k: &BigInt) -> Complex<BigInt> {
    Complex::new(&z.re * k, &z.im * k)
}

fn divide_gaussian(z: &Complex<BigInt>, k: &BigInt) -> Complex<BigInt> {
    Complex::new(&z.re / k, &z.im / k)
}

/// `num(n)/den(n)` as `(g, q)` with `g` Gaussian integer and `q > 0`.
fn ratio_as_gaussian(num: &PolyN, den: &PolyN, n: u64) -> (Complex<BigInt>, BigInt) {
    let top = num.eval_scaled_int(n as i64);
    let bottom = den.eval_scaled_int(n as i64);
    // num(n)/den(n) = (top/num_den) / (bottom/den_den)
    let top = scale_gaussian(&top, den.int_den());
    let scale = num.int_den();
    if bottom.im.is_zero() {
        let q = bottom.re.abs() * scale;
        let g = if bottom.re.is_negative() { -top } else { top };
        (g, q)
    } else {
        let conj = bottom.conj();
        let g = top * conj;
        let q = (&bottom.re * &bottom.re + &bottom.im * &bottom.im) * scale;
        (g, q)
    }
}

/// Which coefficient carries the disc of convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `A_n` tends to a nonzero constant and `B_n` decays.
    ADominant,
    /// `B_n` tends to a nonzero constant and `A_n` decays.
    BDominant,
}

/// Family rewritten as `A_n = A * W(n)/w(n)` and `B_n = B * V(n)/v(n)` with
/// all four polynomials monic.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFamily {
    pub shape: Shape,
    /// Degree of the dominant coefficient's denominator.
    pub t: usize,
    pub a_lead: Exact,
    pub b_lead: Exact,
    a_num_monic: Option<PolyN>,
    a_den_monic: PolyN,
    b_num_monic: Option<PolyN>,
    b_den_monic: PolyN,
}

fn lead_ratio(num: &PolyN, den: &PolyN) -> Exact {
    match (num.leading(), den.leading()) {
        (Some(a), Some(b)) => a / b,
        _ => Exact::zero(),
    }
}

fn lower_coeffs(p: Option<&PolyN>) -> Vec<Exact> {
    match p {
        Some(p) => p.coeffs()[..p.coeffs().len() - 1].to_vec(),
        None => Vec::new(),
    }
}

/// Rewrites a family in monic form. Fails unless exactly one of `A_n`, `B_n`
/// tends to a nonzero constant while the other decays (a zero `B_n` counts as
/// decaying).
pub fn normalize(f: &CoefficientFamily) -> Result<NormalizedFamily> {
    let da_num = f.a_num().degree();
    let da_den = f.a_den().degree().expect("nonzero denominator");
    let db_num = f.b_num().degree();
    let db_den = f.b_den().degree().expect("nonzero denominator");

    let shape = if da_num == Some(da_den) && db_num.is_none_or(|d| d < db_den) {
        Shape::ADominant
    } else if db_num == Some(db_den) && da_num.is_none_or(|d| d < da_den) {
        Shape::BDominant
    } else {
        return Err(Error::UnsupportedShape(format!(
            "deg a_num = {}, deg a_den = {da_den}, deg b_num = {}, deg b_den = {db_den}",
            da_num.map_or("-inf".to_string(), |d| d.to_string()),
            db_num.map_or("-inf".to_string(), |d| d.to_string()),
        )));
    };
    let t = match shape {
        Shape::ADominant => da_den,
        Shape::BDominant => db_den,
    };
    Ok(NormalizedFamily {
        shape,
        t,
        a_lead: lead_ratio(f.a_num(), f.a_den()),
        b_lead: lead_ratio(f.b_num(), f.b_den()),
        a_num_monic: f.a_num().monic(),
        a_den_monic: f.a_den().monic().expect("nonzero"),
        b_num_monic: f.b_num().monic(),
        b_den_monic: f.b_den().monic().expect("nonzero"),
    })
}

impl NormalizedFamily {
    /// Lower coefficients of the monic numerator of `A_n` (Ω_j).
    pub fn omega_num(&self) -> Vec<Exact> {
        lower_coeffs(self.a_num_monic.as_ref())
    }

    /// Lower coefficients of the monic denominator of `A_n` (ω_j).
    pub fn omega_den(&self) -> Vec<Exact> {
        lower_coeffs(Some(&self.a_den_monic))
    }

    /// Lower coefficients of the monic numerator of `B_n` (Θ_j).
    pub fn theta_num(&self) -> Vec<Exact> {
        lower_coeffs(self.b_num_monic.as_ref())
    }

    /// Lower coefficients of the monic denominator of `B_n` (θ_j).
    pub fn theta_den(&self) -> Vec<Exact> {
        lower_coeffs(Some(&self.b_den_monic))
    }

    pub fn a_num_monic(&self) -> Option<&PolyN> {
        self.a_num_monic.as_ref()
    }

    pub fn a_den_monic(&self) -> &PolyN {
        &self.a_den_monic
    }

    pub fn b_num_monic(&self) -> Option<&PolyN> {
        self.b_num_monic.as_ref()
    }

    pub fn b_den_monic(&self) -> &PolyN {
        &self.b_den_monic
    }

    /// `A_n / A`, the monic ratio.
    pub fn a_bar(&self, n: u64) -> Exact {
        match &self.a_num_monic {
            Some(p) => p.eval(n as i64) / self.a_den_monic.eval(n as i64),
            None => Exact::zero(),
        }
    }

    /// `B_n / B`, the monic ratio.
    pub fn b_bar(&self, n: u64) -> Exact {
        match &self.b_num_monic {
            Some(p) => p.eval(n as i64) / self.b_den_monic.eval(n as i64),
            None => Exact::zero(),
        }
    }

    pub fn a_bar_f64(&self, n: u64) -> C64 {
        match &self.a_num_monic {
            Some(p) => p.eval_f64(n as f64) / self.a_den_monic.eval_f64(n as f64),
            None => C64::new(0.0, 0.0),
        }
    }

    pub fn b_bar_f64(&self, n: u64) -> C64 {
        match &self.b_num_monic {
            Some(p) => p.eval_f64(n as f64) / self.b_den_monic.eval_f64(n as f64),
            None => C64::new(0.0, 0.0),
        }
    }

    /// `A_n` rebuilt from the normal form.
    pub fn coeff_a(&self, n: u64) -> Exact {
        &self.a_lead * self.a_bar(n)
    }

    /// `B_n` rebuilt from the normal form.
    pub fn coeff_b(&self, n: u64) -> Exact {
        &self.b_lead * self.b_bar(n)
    }

    /// Sub-leading coefficients `(numerator, denominator)` of the dominant
    /// coefficient's monic parts: the pair compared to pick the proof branch.
    pub fn subleading_pair(&self) -> (Exact, Exact) {
        let (num, den) = match self.shape {
            Shape::ADominant => (self.a_num_monic.as_ref(), &self.a_den_monic),
            Shape::BDominant => (self.b_num_monic.as_ref(), &self.b_den_monic),
        };
        match self.t.checked_sub(1) {
            Some(j) => (num.map_or_else(Exact::zero, |p| p.coeff(j)), den.coeff(j)),
            None => (Exact::zero(), Exact::zero()),
        }
    }

    /// Degree gap between denominator and numerator of the decaying
    /// coefficient (`None` when that coefficient is identically zero).
    pub fn decay_order(&self) -> Option<usize> {
        let (num, den) = match self.shape {
            Shape::ADominant => (self.b_num_monic.as_ref(), &self.b_den_monic),
            Shape::BDominant => (self.a_num_monic.as_ref(), &self.a_den_monic),
        };
        Some(den.degree()? - num?.degree()?)
    }
}
