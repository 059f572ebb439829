//! Decides which coefficient governs convergence, the radius of the disc of
//! convergence, and which branch of the boundary argument applies.

use std::fmt;

use num::{BigRational, One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::number::{self, Exact};
use crate::recurrence::{normalize, CoefficientFamily, NormalizedFamily, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// `A_n -> A != 0`, `B_n -> 0`: radius `1/|A|`.
    ADominant,
    /// `B_n -> B != 0`, `A_n -> 0`: radius `1/sqrt|B|`.
    BDominant,
    /// `B_n = 0`: the classical two-term (hypergeometric-type) case.
    TwoTerm,
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryVerdict {
    /// The absolute series diverges everywhere on the boundary circle.
    Diverges,
    /// Decided per parameter set by Gauss's test.
    GaussConditional,
    Unknown,
}

/// Branch of the boundary argument, fixed by comparing the sub-leading
/// coefficients of the dominant coefficient's monic numerator and denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    /// numerator sub-leading < denominator sub-leading
    Below,
    /// numerator sub-leading >= denominator sub-leading
    AtOrAbove,
    NotApplicable,
}

/// Extended nonnegative radius. `exact` is present whenever the radius is rational.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscRadius {
    Finite { value: f64, exact: Option<BigRational> },
    Infinite,
}

impl DiscRadius {
    pub fn value(&self) -> f64 {
        match self {
            DiscRadius::Finite { value, .. } => *value,
            DiscRadius::Infinite => f64::INFINITY,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            DiscRadius::Finite { exact, .. } => exact.as_ref(),
            DiscRadius::Infinite => None,
        }
    }

    /// Whether `|x| < radius`, decided exactly when both sides allow it.
    pub fn contains(&self, x: &Exact) -> bool {
        match self {
            DiscRadius::Infinite => true,
            DiscRadius::Finite { exact: Some(r), .. } => number::norm_sqr(x) < r * r,
            DiscRadius::Finite { value, .. } => number::to_c64(x).norm() < *value,
        }
    }
}

impl fmt::Display for DiscRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscRadius::Infinite => f.write_str("inf"),
            DiscRadius::Finite { exact: Some(r), .. } => f.write_str(&number::format_rational(r)),
            DiscRadius::Finite { value, .. } => f.write_str(&number::fmt_f64(*value)),
        }
    }
}

impl Serialize for DiscRadius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceClass {
    pub kind: Kind,
    /// `None` for unsupported shapes.
    pub disc_radius: Option<DiscRadius>,
    pub boundary_verdict: BoundaryVerdict,
    pub subcase: Subcase,
}

/// `|z|^(-1/power)` for `power` in {1, 2}, exact when the result is rational.
fn inverse_root_modulus(z: &Exact, power: u32) -> DiscRadius {
    if z.is_zero() {
        return DiscRadius::Infinite;
    }
    let sq = number::norm_sqr(z);
    let value = number::to_c64(z).norm().powf(-1.0 / power as f64);
    let modulus = number::rational_sqrt(&sq);
    let exact = match power {
        1 => modulus,
        _ => modulus.and_then(|m| number::rational_sqrt(&m)),
    }
    .map(|m| BigRational::one() / m);
    DiscRadius::Finite { value, exact }
}

/// Radius of the disc of convergence for a normalized family.
pub fn disc_radius(nf: &NormalizedFamily) -> DiscRadius {
    match nf.shape {
        Shape::ADominant => inverse_root_modulus(&nf.a_lead, 1),
        Shape::BDominant => inverse_root_modulus(&nf.b_lead, 2),
    }
}

/// Picks the boundary branch. Fails with `ComplexSubleading` when the compared
/// coefficients are not both real.
pub fn subcase_of(nf: &NormalizedFamily) -> Result<Subcase> {
    let (num, den) = nf.subleading_pair();
    if !(number::is_real(&num) && number::is_real(&den)) {
        return Err(Error::ComplexSubleading);
    }
    Ok(if num.re < den.re { Subcase::Below } else { Subcase::AtOrAbove })
}

pub fn classify(f: &CoefficientFamily) -> RecurrenceClass {
    if f.b_num().is_zero() {
        let da_den = f.a_den().degree().expect("nonzero denominator");
        let disc_radius = match f.a_num().degree() {
            None => DiscRadius::Infinite,
            Some(d) if d < da_den => DiscRadius::Infinite,
            Some(d) if d > da_den => DiscRadius::Finite { value: 0.0, exact: Some(BigRational::zero()) },
            Some(_) => {
                let lead = f.a_num().leading().unwrap() / f.a_den().leading().unwrap();
                inverse_root_modulus(&lead, 1)
            }
        };
        return RecurrenceClass {
            kind: Kind::TwoTerm,
            disc_radius: Some(disc_radius),
            boundary_verdict: BoundaryVerdict::GaussConditional,
            subcase: Subcase::NotApplicable,
        };
    }

    let nf = match normalize(f) {
        Ok(nf) => nf,
        Err(_) => {
            return RecurrenceClass {
                kind: Kind::Unsupported,
                disc_radius: None,
                boundary_verdict: BoundaryVerdict::Unknown,
                subcase: Subcase::NotApplicable,
            }
        }
    };
    let kind = match nf.shape {
        Shape::ADominant => Kind::ADominant,
        Shape::BDominant => Kind::BDominant,
    };
    // faster-than-1/n decay of the minor coefficient keeps the disc but voids
    // the lower bound used on the boundary
    let boundary_verdict = if nf.decay_order() == Some(1) {
        BoundaryVerdict::Diverges
    } else {
        BoundaryVerdict::Unknown
    };
    RecurrenceClass {
        kind,
        disc_radius: Some(disc_radius(&nf)),
        boundary_verdict,
        subcase: subcase_of(&nf).unwrap_or(Subcase::NotApplicable),
    }
}

/// Result of the empirical ratio test on exactly generated coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioScan {
    /// Step of the ratio: 1 for `|d_{n+1}/d_n|`, 2 for `|d_{n+2}/d_n|`.
    pub step: usize,
    /// `(n, ratio)` samples.
    pub samples: Vec<(u64, f64)>,
}

impl RatioScan {
    pub fn last(&self) -> Option<f64> {
        self.samples.last().map(|s| s.1)
    }

    /// Whether the ratio settled: the last `window` samples lie within relative
    /// distance `tol` of the final one. A ratio drifting to zero never settles.
    pub fn stabilized(&self, window: usize, tol: f64) -> bool {
        let Some(last) = self.last() else { return false };
        self.samples.len() >= window
            && last > 0.0
            && self.samples[self.samples.len() - window..].iter().all(|s| s.1.is_finite() && (s.1 - last).abs() <= tol * last)
    }
}

/// Ratio test on `d_n` generated in exact arithmetic up to `n_max`; the
/// ratio is converted to a double only at each sample point.
pub fn ratio_scan(f: &CoefficientFamily, step: usize, n_max: u64, sample_at: &[u64]) -> Result<RatioScan> {
    let mut gen = crate::series::ExactGenerator::new(f, &Exact::one())?;
    f.check_poles(n_max)?;
    // (log10|u_n|, log10(D_n/D_{n-1})) for the last `step + 1` indices; the
    // cumulative denominator is never formed in floating point
    let mut history: Vec<(f64, f64)> = Vec::with_capacity(step + 1);
    let mut samples = Vec::new();
    let mut next_sample = sample_at.iter().copied().filter(|&n| n + step as u64 <= n_max).peekable();
    for n in 0..=n_max {
        history.push((gen.log10_abs_numer(), gen.log10_last_step()));
        if history.len() > step + 1 {
            history.remove(0);
        }
        if let Some(&s) = next_sample.peek() {
            if n == s + step as u64 {
                let den: f64 = history[1..].iter().map(|h| h.1).sum();
                let ratio = 10f64.powf(history[step].0 - history[0].0 - den);
                samples.push((s, ratio));
                next_sample.next();
            }
        }
        if n < n_max {
            gen.advance()?;
        }
    }
    Ok(RatioScan { step, samples })
}
