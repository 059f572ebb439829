//! Boundary diagnostics: inequality witnesses, the truncated harmonic lower
//! bound for the majorant series, and partial-sum growth scans on `|x| = R`.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classify::{subcase_of, Subcase};
use crate::decomposition::{pochhammer_exact, tail_bound_threshold};
use crate::error::{Error, Result};
use crate::number::{self, Exact};
use crate::recurrence::{normalize, CoefficientFamily, NormalizedFamily, Shape};
use crate::series;

/// Which leading constant sets the radius: `|A x| = 1` or `|B x^2| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Side::A),
            "b" => Ok(Side::B),
            other => Err(Error::Parse(format!("side must be a or b, got {other:?}"))),
        }
    }
}

/// How the step parameter `h` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HSource {
    /// Smallest integer exceeding the sub-leading gap (raised to 2 if needed).
    Gap,
    /// Found by scanning; valid on `[N, scan_limit]` only.
    Scan,
}

/// Parameters under which, for every `n` in `[N, scan_limit]`,
/// `|P̄_n| > 1 - h/n > 1 - eps` and `|S̄_n| > 1/(n + h0)`, where `P̄` is the
/// monic dominant coefficient and `S̄` the monic decaying one (`Ā`, `B̄` on the
/// A side and the other way round on the B side).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessParams {
    pub side: Side,
    pub subcase: Subcase,
    pub n: u64,
    pub h: u64,
    pub h0: u64,
    pub m: u64,
    #[serde(serialize_with = "ser_rational")]
    pub eps: BigRational,
    pub k: f64,
    pub scan_limit: u64,
    pub h_source: HSource,
    /// `min_n (|P̄_n| - (1 - h/n))` over the range.
    pub margin_dominant: String,
    /// `min_n (|S̄_n| - 1/(n + h0))` over the range.
    pub margin_decaying: String,
    /// Margins are exact rationals (real families) rather than decimals.
    pub margins_exact: bool,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&number::format_rational(r))
}

fn side_of(nf: &NormalizedFamily) -> Side {
    match nf.shape {
        Shape::ADominant => Side::A,
        Shape::BDominant => Side::B,
    }
}

/// Monic dominant and decaying coefficients at `n`.
fn bars(nf: &NormalizedFamily, n: u64) -> (Exact, Exact) {
    match nf.shape {
        Shape::ADominant => (nf.a_bar(n), nf.b_bar(n)),
        Shape::BDominant => (nf.b_bar(n), nf.a_bar(n)),
    }
}

fn big(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `|p| > 1 - h/n`, exactly; `n > h` assumed so the right side is positive.
fn dominant_holds(p_sq: &BigRational, n: u64, h: u64) -> bool {
    let lhs = p_sq * big(n * n);
    let d = big(n - h);
    lhs > &d * &d
}

/// `|s| > 1/(n + h0)`, exactly.
fn decaying_holds(s_sq: &BigRational, n: u64, h0: u64) -> bool {
    let k = big(n + h0);
    s_sq * &k * &k > BigRational::one()
}

struct Moduli {
    start: u64,
    p_sq: Vec<BigRational>,
    s_sq: Vec<BigRational>,
    p: Vec<Exact>,
    s: Vec<Exact>,
}

impl Moduli {
    fn new(f: &CoefficientFamily, nf: &NormalizedFamily, start: u64, end: u64) -> Result<Self> {
        f.check_a_defined(start, end)?;
        f.check_b_defined(start, end)?;
        let mut m = Moduli { start, p_sq: Vec::new(), s_sq: Vec::new(), p: Vec::new(), s: Vec::new() };
        for n in start..=end {
            let (p, s) = bars(nf, n);
            m.p_sq.push(number::norm_sqr(&p));
            m.s_sq.push(number::norm_sqr(&s));
            m.p.push(p);
            m.s.push(s);
        }
        Ok(m)
    }

    fn idx(&self, n: u64) -> usize {
        (n - self.start) as usize
    }
}

/// Smallest `h0 >= 1` with `|S̄_n| > 1/(n + h0)` on `[n_lo, n_hi]`.
fn smallest_h0(mods: &Moduli, n_lo: u64, n_hi: u64) -> Option<u64> {
    // need h0 > 1/|S̄_n| - n; estimate in floating point, then confirm exactly
    let mut est = 1i64;
    for n in n_lo..=n_hi {
        let s2 = &mods.s_sq[mods.idx(n)];
        if s2.is_zero() {
            return None;
        }
        let need = 1.0 / number::rat_to_f64(s2).sqrt() - n as f64;
        if need.is_finite() {
            est = est.max(need.floor() as i64 - 1);
        }
    }
    let mut h0 = est.max(1) as u64;
    // the estimate is within a couple of units; walk down then up to the exact minimum
    while h0 > 1 && (n_lo..=n_hi).all(|n| decaying_holds(&mods.s_sq[mods.idx(n)], n, h0 - 1)) {
        h0 -= 1;
    }
    while !(n_lo..=n_hi).all(|n| decaying_holds(&mods.s_sq[mods.idx(n)], n, h0)) {
        h0 += 1;
    }
    Some(h0)
}

/// Searches for a witness on `[N, scan_limit]` and returns the one with the
/// smallest `h`, then the smallest `N`. `N` must also satisfy `N > h` and
/// `h/N < eps`; `m` is the first index from which the Pochhammer tail bound
/// holds at `r = 1`, `i_{2r} = 0`.
pub fn find_witness(f: &CoefficientFamily, eps: &BigRational, scan_limit: u64, k: f64) -> Result<WitnessParams> {
    if !(eps.is_positive() && eps < &BigRational::one()) {
        return Err(Error::DomainError("eps must lie in (0, 1)".into()));
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::DomainError(format!("K must lie in (0, 1), got {k}")));
    }
    if f.b_num().is_zero() {
        return Err(Error::UnsupportedShape("two-term family has no witness".into()));
    }
    let nf = normalize(f)?;
    let not_found = |reason: String, first_violation: Option<u64>| Error::WitnessNotFound { scan_limit, reason, first_violation };
    if nf.decay_order() != Some(1) {
        return Err(not_found("the decaying coefficient is not of order 1/n".into(), None));
    }
    let subcase = subcase_of(&nf).unwrap_or(Subcase::NotApplicable);
    let (h_first, h_source) = match subcase {
        Subcase::Below => {
            let (num, den) = nf.subleading_pair();
            let gap = &den.re - &num.re;
            let h = (gap.floor().to_integer() + BigInt::one()).to_u64().unwrap_or(u64::MAX);
            (h.max(2), HSource::Gap)
        }
        _ => (2, HSource::Scan),
    };
    const H_SCAN: u64 = 64;

    let first_n = h_first + 1;
    if scan_limit <= h_first {
        return Err(not_found("scan limit below h".into(), None));
    }
    let mods = Moduli::new(f, &nf, first_n, scan_limit)?;
    let mut first_violation = None;
    for h in h_first..h_first + H_SCAN {
        // N > h and h/N < eps
        let n_eps = (big(h) / eps).floor().to_integer().to_u64().unwrap_or(u64::MAX).saturating_add(1);
        let mut n_lo = (h + 1).max(n_eps);
        if n_lo > scan_limit {
            break;
        }
        // last violation of either inequality on [n_lo, scan_limit]
        let mut last_bad = None;
        for n in (n_lo..=scan_limit).rev() {
            let i = mods.idx(n);
            if !dominant_holds(&mods.p_sq[i], n, h) || mods.s_sq[i].is_zero() {
                last_bad = Some(n);
                break;
            }
        }
        if let Some(bad) = last_bad {
            first_violation.get_or_insert(bad);
            n_lo = bad + 1;
            if n_lo > scan_limit {
                continue;
            }
        }
        let Some(h0) = smallest_h0(&mods, n_lo, scan_limit) else { continue };
        let m = tail_bound_threshold(n_lo, h, 1, 0)?;
        let (margin_dominant, margin_decaying, margins_exact) = margins(&mods, n_lo, scan_limit, h, h0);
        return Ok(WitnessParams {
            side: side_of(&nf),
            subcase,
            n: n_lo,
            h,
            h0,
            m,
            eps: eps.clone(),
            k,
            scan_limit,
            h_source: if h == h_first { h_source } else { HSource::Scan },
            margin_dominant,
            margin_decaying,
            margins_exact,
        });
    }
    Err(not_found(format!("no h in [{h_first}, {}) validates the range", h_first + H_SCAN), first_violation))
}

fn margins(mods: &Moduli, n_lo: u64, n_hi: u64, h: u64, h0: u64) -> (String, String, bool) {
    let real = (n_lo..=n_hi).all(|n| {
        let i = mods.idx(n);
        mods.p[i].im.is_zero() && mods.s[i].im.is_zero()
    });
    if real {
        let mut md: Option<BigRational> = None;
        let mut ms: Option<BigRational> = None;
        for n in n_lo..=n_hi {
            let i = mods.idx(n);
            let a = mods.p[i].re.abs() - (BigRational::one() - BigRational::new(BigInt::from(h), BigInt::from(n)));
            let b = mods.s[i].re.abs() - BigRational::new(BigInt::one(), BigInt::from(n + h0));
            md = Some(md.map_or(a.clone(), |v| v.min(a)));
            ms = Some(ms.map_or(b.clone(), |v| v.min(b)));
        }
        (number::format_rational(&md.unwrap()), number::format_rational(&ms.unwrap()), true)
    } else {
        let mut md = f64::INFINITY;
        let mut ms = f64::INFINITY;
        for n in n_lo..=n_hi {
            let i = mods.idx(n);
            let p = number::rat_to_f64(&mods.p_sq[i]).sqrt();
            let s = number::rat_to_f64(&mods.s_sq[i]).sqrt();
            md = md.min(p - (1.0 - h as f64 / n as f64));
            ms = ms.min(s - 1.0 / (n + h0) as f64);
        }
        (number::fmt_f64(md), number::fmt_f64(ms), false)
    }
}

/// Re-checks both inequalities of `w` on `[N, scan_limit]` in exact arithmetic.
pub fn verify_witness(f: &CoefficientFamily, w: &WitnessParams) -> Result<bool> {
    let nf = normalize(f)?;
    if side_of(&nf) != w.side || w.n <= w.h {
        return Ok(false);
    }
    if big(w.h) / big(w.n) >= w.eps {
        return Ok(false);
    }
    f.check_a_defined(w.n, w.scan_limit)?;
    f.check_b_defined(w.n, w.scan_limit)?;
    for n in w.n..=w.scan_limit {
        let (p, s) = bars(&nf, n);
        if !dominant_holds(&number::norm_sqr(&p), n, w.h) || !decaying_holds(&number::norm_sqr(&s), n, w.h0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sum_{j=m}^{M} 1/(offset + j)`.
pub fn harmonic_partial(m: u64, upper: u64, offset: i64) -> Result<f64> {
    if offset + (m as i64) <= 0 {
        return Err(Error::DomainError(format!("offset + m must be positive, got {}", offset + m as i64)));
    }
    Ok((m..=upper).rev().map(|j| 1.0 / (offset + j as i64) as f64).sum())
}

pub fn harmonic_partial_exact(m: u64, upper: u64, offset: i64) -> Result<BigRational> {
    if offset + (m as i64) <= 0 {
        return Err(Error::DomainError(format!("offset + m must be positive, got {}", offset + m as i64)));
    }
    Ok((m..=upper).map(|j| BigRational::new(BigInt::one(), BigInt::from(offset + j as i64))).sum())
}

/// `sum_{k=m}^{M} k^(-h)`, `m >= 1`.
pub fn power_tail_sum(m: u64, upper: u64, h: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::DomainError("power sum starts at k >= 1".into()));
    }
    Ok((m..=upper).rev().map(|k| (k as f64).powi(-(h as i32))).sum())
}

/// `sum_{k<terms} (a1)_k (a2)_k (a3)_k / ((b1)_k (b2)_k k!) x^k`.
pub fn pfq_3f2_partial(a: [f64; 3], b: [f64; 2], x: f64, terms: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::DomainError(format!("x must lie in [0, 1), got {x}")));
    }
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..terms {
        sum += term;
        let kf = k as f64;
        if k + 1 == terms {
            break;
        }
        let d = (b[0] + kf) * (b[1] + kf) * (kf + 1.0);
        if d == 0.0 {
            return Err(Error::ZeroDenominator { index: k as u64 });
        }
        term *= (a[0] + kf) * (a[1] + kf) * (a[2] + kf) / d * x;
    }
    Ok(sum)
}

/// Exact partial sum from Pochhammer products.
pub fn pfq_3f2_partial_exact(a: [&BigRational; 3], b: [&BigRational; 2], x: &BigRational, terms: usize) -> Result<BigRational> {
    if x.is_negative() || x >= &BigRational::one() {
        return Err(Error::DomainError("x must lie in [0, 1)".into()));
    }
    let one = BigRational::one();
    let mut sum = BigRational::zero();
    for k in 0..terms as u64 {
        let den = pochhammer_exact(b[0], k) * pochhammer_exact(b[1], k) * pochhammer_exact(&one, k);
        if den.is_zero() {
            return Err(Error::ZeroDenominator { index: k });
        }
        let num = pochhammer_exact(a[0], k) * pochhammer_exact(a[1], k) * pochhammer_exact(a[2], k);
        sum += num / den * num::pow(x.clone(), k as usize);
    }
    Ok(sum)
}

/// Parameters of the `3F2` factor at level `p` of the lower bound:
/// `(1, N+m+2p+2, N+m+2p+1+h0; N+m+2p+2-h, N+m+2p+2+h0)`.
pub fn witness_3f2_params(w: &WitnessParams, p: u64) -> ([f64; 3], [f64; 2]) {
    let base = (w.n + w.m + 2 * p) as f64;
    let (h, h0) = (w.h as f64, w.h0 as f64);
    ([1.0, base + 2.0, base + 1.0 + h0], [base + 2.0 - h, base + 2.0 + h0])
}

/// `η` at the boundary: `|B|/|A|^2` on the A side, `|A|/sqrt|B|` on the B side.
pub fn boundary_eta(f: &CoefficientFamily) -> Result<f64> {
    let nf = normalize(f)?;
    let a = number::to_c64(&nf.a_lead).norm();
    let b = number::to_c64(&nf.b_lead).norm();
    Ok(match nf.shape {
        Shape::ADominant => b / (a * a),
        Shape::BDominant => a / b.sqrt(),
    })
}

/// Truncated lower bound
/// `(1-K)(1-eps)^m / 2 * sum_{p=1}^{p_max} G_p η^(p+1) prod_{l<p} H(m, M, N+2l+1+h0) * sum_{k=m}^{M} k^(-h)`
/// with `G_p = Γ(N+m+2p+2) / ((N+m+2p+1+h0) Γ(N+m+2p+2-h))` and `H` the
/// harmonic partial sums. The `3F2` factor (>= 1) is dropped. Terms are
/// combined in log space; the result may be `inf` for very large inputs.
pub fn lower_bound_witness(w: &WitnessParams, eta: f64, p_max: u64, upper: u64) -> Result<f64> {
    Ok(lower_bound_witness_ln(w, eta, p_max, upper)?.exp())
}

/// Natural log of [`lower_bound_witness`]; `-inf` when it is zero.
pub fn lower_bound_witness_ln(w: &WitnessParams, eta: f64, p_max: u64, upper: u64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::DomainError(format!("eta must be positive, got {eta}")));
    }
    if p_max == 0 || upper < w.m {
        return Ok(f64::NEG_INFINITY);
    }
    let eps = number::rat_to_f64(&w.eps);
    let prefactor = (1.0 - w.k).ln() + w.m as f64 * (-eps).ln_1p() - std::f64::consts::LN_2;
    let power = power_tail_sum(w.m.max(1), upper, w.h)?.ln();
    let mut harmonic_ln = 0.0;
    let mut terms = Vec::with_capacity(p_max as usize);
    for p in 1..=p_max {
        let l = p - 1;
        harmonic_ln += harmonic_partial(w.m, upper, (w.n + 2 * l + 1 + w.h0) as i64)?.ln();
        let top = (w.n + w.m + 2 * p + 2) as f64;
        if top - w.h as f64 <= 0.0 {
            return Err(Error::DomainError("gamma pole in the lower-bound prefactor".into()));
        }
        // Γ(top)/Γ(top-h) = (top-h)_h
        let gamma_ln: f64 = (0..w.h).map(|j| (top - w.h as f64 + j as f64).ln()).sum();
        let g_ln = gamma_ln - ((w.n + w.m + 2 * p + 1 + w.h0) as f64).ln();
        terms.push(g_ln + (p + 1) as f64 * eta.ln() + harmonic_ln);
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok(prefactor + power + max + sum.ln())
}

/// Least-squares fit `S ≈ alpha ln M + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub alpha: f64,
    pub beta: f64,
}

pub fn fit_log(points: &[(f64, f64)]) -> Option<LogFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    Some(LogFit { alpha, beta: my - alpha * mx })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub m: usize,
    pub s_m: f64,
    pub s_2m: f64,
}

/// Partial sums `S_M = sum_{n<=M} |d_n| x_abs^n` at a list of checkpoints,
/// with `S_{2M}` alongside and a log fit over the top decade.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthScan {
    pub x_abs: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub fitted_model: Option<LogFit>,
}

impl GrowthScan {
    /// `S_{2M} - S_M` at each checkpoint.
    pub fn doubling_increments(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|c| c.s_2m - c.s_m).collect()
    }
}

pub fn growth_scan(f: &CoefficientFamily, x_abs: f64, checkpoints: &[usize]) -> Result<GrowthScan> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DomainError("checkpoints must be nonempty and strictly increasing".into()));
    }
    let top = *checkpoints.last().unwrap();
    let s = series::abs_partial_sums(f, x_abs, 2 * top)?;
    let checkpoints: Vec<Checkpoint> =
        checkpoints.iter().map(|&m| Checkpoint { m, s_m: s[m], s_2m: s[2 * m] }).collect();
    // top decade of checkpoints, falling back to all of them
    let lo = top as f64 / 10.0;
    let mut pts: Vec<(f64, f64)> = checkpoints.iter().filter(|c| c.m as f64 >= lo).map(|c| (c.m as f64, c.s_m)).collect();
    if pts.len() < 2 {
        pts = checkpoints.iter().map(|c| (c.m as f64, c.s_m)).collect();
    }
    Ok(GrowthScan { x_abs, checkpoints, fitted_model: fit_log(&pts) })
}

/// Growth scan on the circle `|A x| = 1` (side A) or `|B x^2| = 1` (side B).
pub fn boundary_scan(f: &CoefficientFamily, side: Side, checkpoints: &[usize]) -> Result<GrowthScan> {
    let nf = normalize(f)?;
    if side_of(&nf) != side {
        return Err(Error::DomainError(format!("family is not {side:?}-dominant")));
    }
    growth_scan(f, boundary_radius(&nf), checkpoints)
}

pub fn boundary_radius(nf: &NormalizedFamily) -> f64 {
    match nf.shape {
        Shape::ADominant => 1.0 / number::to_c64(&nf.a_lead).norm(),
        Shape::BDominant => 1.0 / number::to_c64(&nf.b_lead).norm().sqrt(),
    }
}
