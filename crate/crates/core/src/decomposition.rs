//! Regrouping of the majorant series `sum c̄_i |x|^i` into sub-series `ȳ_τ`
//! indexed by the number of B-steps (or A-steps), plus Pochhammer utilities.
//!
//! A coefficient `c̄_i` is a sum over compositions of `i` into A-steps (size 1)
//! and B-steps (size 2). Reading from position 0, an A-step at position `p`
//! contributes `|A_{N+p}|` and a B-step starting at `p` contributes
//! `|B_{N+p+1}|`. With `|A_n| = |A| ā(n-N)` and `|B_n| = |B| b̄(n-N)`, the
//! degree-`i` part of `sum_τ η^τ ȳ_τ(z)` collects exactly those products.

use std::ops::{Add, Mul};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number;
use crate::recurrence::{normalize, CoefficientFamily, NormalizedFamily};
use crate::series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupMode {
    /// `τ` counts B-steps; `η = |B| x^2`, `z = |A| x`.
    #[default]
    GroupByB,
    /// `τ` counts A-steps; `η = |A| x`, `z = |B| x^2`.
    GroupByA,
}

/// `G_τ(0..=len)`: the coefficient of `z^j` in `ȳ_τ(z)`.
///
/// GroupByB: `j` counts A-steps, and the k-th B-step follows `j` A-steps at
/// position `j + 2k`. GroupByA: `j` counts B-steps, and the k-th A-step sits at
/// position `2j + k`.
fn y_coeffs<W, FA, FB>(abar: FA, bbar: FB, tau: usize, len: usize, mode: GroupMode) -> Vec<W>
where
    W: Clone + Zero + One + Add<Output = W> + for<'a> Mul<&'a W, Output = W>,
    FA: Fn(u64) -> W,
    FB: Fn(u64) -> W,
{
    // weight of a "free" step (the grouped-over kind) at running count j after k marked steps
    let free = |j: usize, k: usize| -> W {
        match mode {
            GroupMode::GroupByB => abar((j + 2 * k) as u64),
            GroupMode::GroupByA => bbar((2 * j + k + 1) as u64),
        }
    };
    // weight of the (k+1)-th marked step after j free steps
    let marked = |j: usize, k: usize| -> W {
        match mode {
            GroupMode::GroupByB => bbar((j + 2 * k + 1) as u64),
            GroupMode::GroupByA => abar((2 * j + k) as u64),
        }
    };
    let mut g = Vec::with_capacity(len + 1);
    g.push(W::one());
    for j in 1..=len {
        let next = g[j - 1].clone() * &free(j - 1, 0);
        g.push(next);
    }
    for k in 1..=tau {
        let h: Vec<W> = (0..=len).map(|j| g[j].clone() * &marked(j, k - 1)).collect();
        let mut gk = Vec::with_capacity(len + 1);
        gk.push(h[0].clone());
        for j in 1..=len {
            let next = gk[j - 1].clone() * &free(j - 1, k) + h[j].clone();
            gk.push(next);
        }
        g = gk;
    }
    g
}

struct Weights {
    abar: Vec<f64>,
    bbar: Vec<f64>,
    a_abs: f64,
    b_abs: f64,
}

/// `ā(k) = |A_{N+k}| / |A|`, `b̄(k) = |B_{N+k}| / |B|` for `k < len`, zero when
/// the leading constant is zero.
fn float_weights(f: &CoefficientFamily, nf: &NormalizedFamily, n_start: u64, len: usize) -> Result<Weights> {
    f.check_a_defined(n_start, n_start + len as u64)?;
    f.check_b_defined(n_start + 1, n_start + len as u64)?;
    let a_abs = number::to_c64(&nf.a_lead).norm();
    let b_abs = number::to_c64(&nf.b_lead).norm();
    let abar = (0..=len as u64)
        .map(|k| if a_abs == 0.0 { 0.0 } else { f.coeff_a_f64(n_start + k).norm() / a_abs })
        .collect();
    let bbar = (0..=len as u64)
        .map(|k| if b_abs == 0.0 || k == 0 { 0.0 } else { f.coeff_b_f64(n_start + k).norm() / b_abs })
        .collect();
    Ok(Weights { abar, bbar, a_abs, b_abs })
}

struct ExactWeights {
    abar: Vec<BigRational>,
    bbar: Vec<BigRational>,
    a_abs: BigRational,
    b_abs: BigRational,
}

fn exact_weights(f: &CoefficientFamily, nf: &NormalizedFamily, n_start: u64, len: usize) -> Result<ExactWeights> {
    if !f.is_real() {
        return Err(Error::NotReal("exact decomposition needs real coefficients".into()));
    }
    f.check_a_defined(n_start, n_start + len as u64)?;
    f.check_b_defined(n_start + 1, n_start + len as u64)?;
    let a_abs = nf.a_lead.re.abs();
    let b_abs = nf.b_lead.re.abs();
    let mut abar = Vec::with_capacity(len + 1);
    let mut bbar = Vec::with_capacity(len + 1);
    for k in 0..=len as u64 {
        abar.push(if a_abs.is_zero() { BigRational::zero() } else { series::abs_a_exact(f, n_start + k)? / &a_abs });
        bbar.push(if b_abs.is_zero() || k == 0 {
            BigRational::zero()
        } else {
            series::abs_b_exact(f, n_start + k)? / &b_abs
        });
    }
    Ok(ExactWeights { abar, bbar, a_abs, b_abs })
}

/// Degree range of `ȳ_τ` coefficients that can reach total degree `m`.
fn y_len(tau: usize, m: usize, mode: GroupMode) -> Option<usize> {
    match mode {
        GroupMode::GroupByB => m.checked_sub(2 * tau),
        GroupMode::GroupByA => m.checked_sub(tau).map(|r| r / 2),
    }
}

/// Total degree of the `z^j` term of `η^τ ȳ_τ(z)`.
fn degree_of(tau: usize, j: usize, mode: GroupMode) -> usize {
    match mode {
        GroupMode::GroupByB => j + 2 * tau,
        GroupMode::GroupByA => tau + 2 * j,
    }
}

/// The majorant series regrouped at one point `x_abs`, each inner sum
/// truncated at index `i_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub n_start: u64,
    pub mode: GroupMode,
    pub tau_max: usize,
    pub i_max: usize,
    /// Truncated `ȳ_τ(z)` for `τ = 0..=tau_max`.
    pub tables: Vec<f64>,
    pub eta: f64,
    pub z: f64,
}

impl Decomposition {
    /// `sum_τ η^τ ȳ_τ(z)`.
    pub fn total(&self) -> f64 {
        self.tables.iter().enumerate().map(|(t, y)| y * self.eta.powi(t as i32)).sum()
    }
}

fn eta_z(w: &Weights, x_abs: f64, mode: GroupMode) -> (f64, f64) {
    match mode {
        GroupMode::GroupByB => (w.b_abs * x_abs * x_abs, w.a_abs * x_abs),
        GroupMode::GroupByA => (w.a_abs * x_abs, w.b_abs * x_abs * x_abs),
    }
}

/// Largest coefficient position touched by a `ȳ_τ` table of length `i_max`.
fn positions_needed(tau: usize, i_max: usize, mode: GroupMode) -> usize {
    match mode {
        GroupMode::GroupByB => i_max + 2 * tau + 2,
        GroupMode::GroupByA => 2 * i_max + tau + 2,
    }
}

/// Truncated `ȳ_τ(z) = sum_{j<=i_max} G_τ(j) z^j` with weights starting at `N`.
pub fn subseries_y_tau(
    f: &CoefficientFamily,
    n_start: u64,
    tau: usize,
    z: f64,
    i_max: usize,
    mode: GroupMode,
) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::DomainError(format!("z must be nonnegative, got {z}")));
    }
    let nf = normalize(f)?;
    let w = float_weights(f, &nf, n_start, positions_needed(tau, i_max, mode))?;
    let g = y_coeffs(|k| w.abar[k as usize], |k| w.bbar[k as usize], tau, i_max, mode);
    Ok(horner_nonneg(&g, z))
}

fn horner_nonneg(g: &[f64], z: f64) -> f64 {
    let mut s = 0.0;
    let mut p = 1.0;
    for c in g {
        s += c * p;
        p *= z;
    }
    s
}

/// All tables `ȳ_0..ȳ_{tau_max}` at the point `x_abs`.
pub fn decompose(
    f: &CoefficientFamily,
    n_start: u64,
    x_abs: f64,
    tau_max: usize,
    i_max: usize,
    mode: GroupMode,
) -> Result<Decomposition> {
    if !(x_abs >= 0.0) {
        return Err(Error::DomainError(format!("x_abs must be nonnegative, got {x_abs}")));
    }
    let nf = normalize(f)?;
    let w = float_weights(f, &nf, n_start, positions_needed(tau_max, i_max, mode))?;
    let (eta, z) = eta_z(&w, x_abs, mode);
    let tables = (0..=tau_max)
        .map(|t| horner_nonneg(&y_coeffs(|k| w.abar[k as usize], |k| w.bbar[k as usize], t, i_max, mode), z))
        .collect();
    Ok(Decomposition { n_start, mode, tau_max, i_max, tables, eta, z })
}

/// Degree-by-degree comparison of `sum c̄_i x^i` against the regrouped form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n_start: u64,
    pub degree: usize,
    pub mode: GroupMode,
    pub exact: bool,
    /// `c̄_0..=c̄_M` from the modulus recurrence.
    pub lhs_coeffs: Vec<String>,
    /// Degree-`i` coefficients of `sum_τ η^τ ȳ_τ` matched by total degree.
    pub rhs_coeffs: Vec<String>,
    /// Largest coefficient-wise absolute difference.
    pub discrepancy: String,
    /// Both sides summed at `x_abs`, when given.
    pub lhs_total: Option<String>,
    pub rhs_total: Option<String>,
}

/// Exact RHS coefficients for degrees `0..=m`.
pub fn rhs_coeffs_exact(
    f: &CoefficientFamily,
    n_start: u64,
    m: usize,
    tau_max: usize,
    mode: GroupMode,
) -> Result<Vec<BigRational>> {
    let nf = normalize(f)?;
    let w = exact_weights(f, &nf, n_start, m + 1)?;
    let mut out = vec![BigRational::zero(); m + 1];
    for tau in 0..=tau_max {
        let Some(len) = y_len(tau, m, mode) else { continue };
        let g = y_coeffs(|k| w.abar[k as usize].clone(), |k| w.bbar[k as usize].clone(), tau, len, mode);
        for (j, gj) in g.iter().enumerate() {
            let (na, nb) = match mode {
                GroupMode::GroupByB => (j, tau),
                GroupMode::GroupByA => (tau, j),
            };
            let scale = num::pow(w.a_abs.clone(), na) * num::pow(w.b_abs.clone(), nb);
            out[degree_of(tau, j, mode)] += gj * scale;
        }
    }
    Ok(out)
}

/// Float RHS coefficients for degrees `0..=m`.
pub fn rhs_coeffs_f64(f: &CoefficientFamily, n_start: u64, m: usize, tau_max: usize, mode: GroupMode) -> Result<Vec<f64>> {
    let nf = normalize(f)?;
    let w = float_weights(f, &nf, n_start, m + 1)?;
    let mut out = vec![0.0; m + 1];
    for tau in 0..=tau_max {
        let Some(len) = y_len(tau, m, mode) else { continue };
        let g = y_coeffs(|k| w.abar[k as usize], |k| w.bbar[k as usize], tau, len, mode);
        for (j, gj) in g.iter().enumerate() {
            let (na, nb) = match mode {
                GroupMode::GroupByB => (j, tau),
                GroupMode::GroupByA => (tau, j),
            };
            out[degree_of(tau, j, mode)] += gj * w.a_abs.powi(na as i32) * w.b_abs.powi(nb as i32);
        }
    }
    Ok(out)
}

/// Compares `c̄_0..=c̄_M` with the regrouped sub-series. `tau_max` defaults to
/// the largest count any degree-`M` path can have; a smaller value cannot
/// match and is reported as [`Error::TruncationMismatch`].
pub fn decomposition_check(
    f: &CoefficientFamily,
    n_start: u64,
    m: usize,
    x_abs: Option<&BigRational>,
    mode: GroupMode,
    exact: bool,
    tau_max: Option<usize>,
) -> Result<DecompositionReport> {
    let needed = match mode {
        GroupMode::GroupByB => m / 2,
        GroupMode::GroupByA => m,
    };
    let tau_max = tau_max.unwrap_or(needed);
    if tau_max < needed {
        return Err(Error::TruncationMismatch {
            degree: m,
            reason: format!("tau_max = {tau_max} drops paths with up to {needed} grouped steps"),
        });
    }
    if exact {
        let lhs = series::majorant_exact(f, n_start, m)?;
        let rhs = rhs_coeffs_exact(f, n_start, m, tau_max, mode)?;
        let discrepancy = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).abs()).max().unwrap_or_else(BigRational::zero);
        let totals = x_abs.map(|x| {
            let sum = |c: &[BigRational]| {
                let mut s = BigRational::zero();
                let mut p = BigRational::one();
                for ci in c {
                    s += ci * &p;
                    p *= x;
                }
                number::format_rational(&s)
            };
            (sum(&lhs), sum(&rhs))
        });
        Ok(DecompositionReport {
            n_start,
            degree: m,
            mode,
            exact,
            lhs_coeffs: lhs.iter().map(number::format_rational).collect(),
            rhs_coeffs: rhs.iter().map(number::format_rational).collect(),
            discrepancy: number::format_rational(&discrepancy),
            lhs_total: totals.as_ref().map(|t| t.0.clone()),
            rhs_total: totals.map(|t| t.1),
        })
    } else {
        let lhs = series::majorant_sequences(f, n_start, m)?.cbar;
        let rhs = rhs_coeffs_f64(f, n_start, m, tau_max, mode)?;
        let discrepancy = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
        let totals = x_abs.map(|x| {
            let x = number::rat_to_f64(x);
            (number::fmt_f64(horner_nonneg(&lhs, x)), number::fmt_f64(horner_nonneg(&rhs, x)))
        });
        Ok(DecompositionReport {
            n_start,
            degree: m,
            mode,
            exact,
            lhs_coeffs: lhs.iter().map(|v| number::fmt_f64(*v)).collect(),
            rhs_coeffs: rhs.iter().map(|v| number::fmt_f64(*v)).collect(),
            discrepancy: number::fmt_f64(discrepancy),
            lhs_total: totals.as_ref().map(|t| t.0.clone()),
            rhs_total: totals.map(|t| t.1),
        })
    }
}

/// `(a)_n = a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: f64, n: u64) -> f64 {
    (0..n).map(|k| a + k as f64).product()
}

pub fn pochhammer_exact(a: &BigRational, n: u64) -> BigRational {
    let mut p = BigRational::one();
    let mut t = a.clone();
    for _ in 0..n {
        p *= &t;
        t += BigRational::one();
    }
    p
}

/// `(a)_n / (b)_n` as a product of the paired factors `(a+k)/(b+k)`.
pub fn pochhammer_ratio(a: f64, b: f64, n: u64) -> Result<f64> {
    let mut r = 1.0;
    for k in 0..n {
        let d = b + k as f64;
        if d == 0.0 {
            return Err(Error::ZeroDenominator { index: k });
        }
        r *= (a + k as f64) / d;
    }
    Ok(r)
}

pub fn pochhammer_ratio_exact(a: &BigRational, b: &BigRational, n: u64) -> Result<BigRational> {
    let mut r = BigRational::one();
    let mut ta = a.clone();
    let mut tb = b.clone();
    for k in 0..n {
        if tb.is_zero() {
            return Err(Error::ZeroDenominator { index: k });
        }
        r = r * &ta / &tb;
        ta += BigRational::one();
        tb += BigRational::one();
    }
    Ok(r)
}

/// Leading-order form `Γ(b)/Γ(a) n^(a-b)` of `(a)_n / (b)_n`.
pub fn pochhammer_ratio_asymptotic(a: f64, b: f64, n: f64) -> Result<f64> {
    let pole = |v: f64| v <= 0.0 && v.fract() == 0.0;
    if pole(a) || pole(b) {
        return Err(Error::DomainError(format!("gamma pole at a = {a} or b = {b}")));
    }
    let ga = statrs::function::gamma::gamma(a);
    let gb = statrs::function::gamma::gamma(b);
    Ok(gb / ga * n.powf(a - b))
}

/// First argument of the rising factorials in the Pochhammer tail bound:
/// `a = N + 2(r+1) - h + i_{2r}`.
fn tail_base(n: u64, h: u64, r: u64, i2r: u64) -> Result<BigInt> {
    let a = BigInt::from(n) + BigInt::from(2 * (r + 1)) - BigInt::from(h) + BigInt::from(i2r);
    if !a.is_positive() {
        return Err(Error::DomainError(format!("gamma pole: N + 2(r+1) - h + i_2r = {a} <= 0")));
    }
    Ok(a)
}

fn rising(a: &BigInt, n: u64) -> BigInt {
    (0..n).fold(BigInt::one(), |p, k| p * (a + BigInt::from(k)))
}

/// Right side of the tail bound,
/// `Γ(N+2(r+1)+i_{2r}) / (2 Γ(N+2(r+1)-h+i_{2r})) * i_next^(-h)`, exactly.
pub fn pochhammer_tail_bound(n: u64, h: u64, r: u64, i2r: u64, i_next: u64) -> Result<BigRational> {
    let a = tail_base(n, h, r, i2r)?;
    if i_next == 0 {
        return Err(Error::DomainError("i_next must be positive".into()));
    }
    Ok(BigRational::new(rising(&a, h), BigInt::from(2) * num::pow(BigInt::from(i_next), h as usize)))
}

/// Left side `(a)_{i_next} / (a+h)_{i_next}`, via the telescoped form
/// `(a)_h / (a + i_next)_h`.
pub fn pochhammer_tail_lhs(n: u64, h: u64, r: u64, i2r: u64, i_next: u64) -> Result<BigRational> {
    let a = tail_base(n, h, r, i2r)?;
    Ok(BigRational::new(rising(&a, h), rising(&(&a + BigInt::from(i_next)), h)))
}

/// Checks `LHS >= RHS` of the tail bound in exact arithmetic.
pub fn verify_pochhammer_tail_bound(n: u64, h: u64, r: u64, i2r: u64, i_next: u64) -> Result<bool> {
    Ok(pochhammer_tail_lhs(n, h, r, i2r, i_next)? >= pochhammer_tail_bound(n, h, r, i2r, i_next)?)
}

/// Smallest `i_next >= 1` from which the tail bound holds. The inequality
/// reduces to `2 i^h >= (a+i)_h`, whose right-to-left ratio decreases in `i`,
/// so it holds for every larger `i` as well.
pub fn tail_bound_threshold(n: u64, h: u64, r: u64, i2r: u64) -> Result<u64> {
    let a = tail_base(n, h, r, i2r)?;
    let holds = |i: u64| BigInt::from(2) * num::pow(BigInt::from(i), h as usize) >= rising(&(&a + BigInt::from(i)), h);
    if h == 0 {
        return Ok(1);
    }
    let mut hi = 1u64;
    while !holds(hi) {
        hi = hi.checked_mul(2).ok_or_else(|| Error::DomainError("threshold exceeds u64".into()))?;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(1);
    }
    // holds(hi), !holds(lo)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
