//! Numeric building blocks: exact Gaussian rationals, their string forms, and
//! a scaled complex float that keeps a separate decimal exponent so long
//! recurrences never leave the representable range.

use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, Complex, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar: a complex number whose parts are arbitrary-precision rationals.
pub type Exact = Complex<BigRational>;

/// Double precision complex number.
pub type C64 = Complex<f64>;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn exact_int(v: i64) -> Exact {
    Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
}

pub fn exact_ratio(p: i64, q: i64) -> Exact {
    Complex::new(rat(p, q), BigRational::zero())
}

pub fn exact_real(r: BigRational) -> Exact {
    Complex::new(r, BigRational::zero())
}

pub fn is_real(z: &Exact) -> bool {
    z.im.is_zero()
}

/// `|z|^2`, exact.
pub fn norm_sqr(z: &Exact) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => {
            let (m, e) = rat_log2_parts(r.numer(), r.denom());
            m * (e as f64).exp2()
        }
    }
}

pub fn to_c64(z: &Exact) -> C64 {
    Complex::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Splits `x` into `(m, e)` with `x = m * 2^e` and `m` carrying the top 64 bits.
pub(crate) fn bigint_log2_parts(x: &BigInt) -> (f64, i64) {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = x >> shift;
    (top.to_f64().unwrap_or(0.0), shift as i64)
}

fn rat_log2_parts(num: &BigInt, den: &BigInt) -> (f64, i64) {
    let (mn, en) = bigint_log2_parts(num);
    let (md, ed) = bigint_log2_parts(den);
    (mn / md, en - ed)
}

/// `log10 |x|` for a big integer (`-inf` for zero).
pub fn bigint_log10_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = bigint_log2_parts(x);
    m.abs().log10() + e as f64 * LOG10_2
}

/// `log10 |z|` for a complex big integer.
pub fn gaussian_log10_abs(z: &Complex<BigInt>) -> f64 {
    let bits = z.re.bits().max(z.im.bits());
    let shift = bits.saturating_sub(64);
    let re = (&z.re >> shift).to_f64().unwrap_or(0.0);
    let im = (&z.im >> shift).to_f64().unwrap_or(0.0);
    let h = re.hypot(im);
    if h == 0.0 {
        return f64::NEG_INFINITY;
    }
    h.log10() + shift as f64 * LOG10_2
}

/// Writes a Gaussian rational as `g / q` with `g` a Gaussian integer and `q > 0`.
pub fn to_gaussian_over_int(z: &Exact) -> (Complex<BigInt>, BigInt) {
    let q = z.re.denom().lcm(z.im.denom());
    let re = z.re.numer() * (&q / z.re.denom());
    let im = z.im.numer() * (&q / z.im.denom());
    (Complex::new(re, im), q)
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Parses `"p"`, `"p/q"`, or a decimal literal such as `"-1.25e-3"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }

    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Parses a real or complex literal: `"3/4"`, `"0.5"`, `"1+2i"`, `"-i"`, `"1/2-3/4i"`.
pub fn parse_exact(s: &str) -> Result<Exact> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(exact_real(parse_rational(&t)?));
    };
    // The real/imaginary split is the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() {
        BigRational::zero()
    } else {
        parse_rational(re_str)?
    };
    let im = match im_str {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        other => parse_rational(other)?,
    };
    Ok(Complex::new(re, im))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_exact(z: &Exact) -> String {
    if z.im.is_zero() {
        return format_rational(&z.re);
    }
    let im = format_rational(&z.im.abs());
    let sign = if z.im.is_negative() { '-' } else { '+' };
    if z.re.is_zero() {
        if z.im.is_negative() {
            format!("-{im}i")
        } else {
            format!("{im}i")
        }
    } else {
        format!("{}{sign}{im}i", format_rational(&z.re))
    }
}

/// Decimal rendering of an exact rational with `digits` significant digits
/// (truncated, not rounded). Always deterministic.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let negative = r.is_negative();
    let a = r.abs();
    // exponent estimate, corrected below
    let mut e = (bigint_log10_abs(a.numer()) - bigint_log10_abs(a.denom())).floor() as i64;
    let ten = BigInt::from(10);
    let scaled = |e: i64| -> BigInt {
        let shift = digits as i64 - 1 - e;
        if shift >= 0 {
            (a.numer() * num::pow(ten.clone(), shift as usize)) / a.denom()
        } else {
            a.numer() / (a.denom() * num::pow(ten.clone(), (-shift) as usize))
        }
    };
    let mut m = scaled(e);
    let lower = num::pow(ten.clone(), digits - 1);
    let upper = num::pow(ten.clone(), digits);
    while m >= upper {
        e += 1;
        m = scaled(e);
    }
    while m < lower {
        e -= 1;
        m = scaled(e);
    }
    let ds = m.to_string();
    let (head, tail) = ds.split_at(1);
    let tail = tail.trim_end_matches('0');
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    if e != 0 {
        out.push_str(&format!("e{e}"));
    }
    out
}

/// Deterministic decimal string for a double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 || (1e-6..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A complex float `mantissa * 10^exp10`, used wherever coefficients can
/// leave double range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: C64,
    pub exp10: i64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { mantissa: Complex { re: 0.0, im: 0.0 }, exp10: 0 };

    /// Normalizes so the larger component of the mantissa lies in `[1, 10)`.
    pub fn new(mantissa: C64, exp10: i64) -> Self {
        let big = mantissa.re.abs().max(mantissa.im.abs());
        if big == 0.0 || !big.is_finite() {
            return ScaledComplex { mantissa, exp10: if big == 0.0 { 0 } else { exp10 } };
        }
        let shift = big.log10().floor() as i64;
        let mut s = ScaledComplex { mantissa: mantissa / pow10(shift), exp10: exp10 + shift };
        let big = s.mantissa.re.abs().max(s.mantissa.im.abs());
        if big >= 10.0 {
            s.mantissa /= 10.0;
            s.exp10 += 1;
        } else if big < 1.0 {
            s.mantissa *= 10.0;
            s.exp10 -= 1;
        }
        s
    }

    pub fn from_exact(z: &Exact) -> Self {
        if z.is_zero() {
            return Self::ZERO;
        }
        let l = norm_sqr(z);
        let log10_abs = 0.5 * (bigint_log10_abs(l.numer()) - bigint_log10_abs(l.denom()));
        let e = log10_abs.floor() as i64;
        // scale each part by 10^-e without leaving exact arithmetic for moderate e
        let part = |r: &BigRational| -> f64 {
            if r.is_zero() {
                return 0.0;
            }
            let (m, e2) = rat_log2_parts(r.numer(), r.denom());
            let lg = (e2 as f64) * LOG10_2 - e as f64;
            m * 10f64.powf(lg)
        };
        ScaledComplex::new(Complex::new(part(&z.re), part(&z.im)), e)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// `log10 |value|`, `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        let n = self.mantissa.norm();
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            n.log10() + self.exp10 as f64
        }
    }

    /// Value as a plain complex double; may overflow to infinity or underflow to zero.
    pub fn to_c64(&self) -> C64 {
        if self.exp10 > 400 {
            return self.mantissa * f64::INFINITY;
        }
        self.mantissa * pow10(self.exp10)
    }

    /// `|value| * r^power` as a double, computed in log space.
    pub fn abs_times_pow(&self, r: f64, power: u64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if power == 0 {
            return 10f64.powf(self.log10_abs());
        }
        if r == 0.0 {
            return 0.0;
        }
        10f64.powf(self.log10_abs() + power as f64 * r.log10())
    }
}

impl fmt::Display for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}i)e{}", self.mantissa.re, self.mantissa.im, self.exp10)
    }
}

pub(crate) fn pow10(k: i64) -> f64 {
    if k.abs() <= 300 {
        10f64.powi(k as i32)
    } else {
        10f64.powf(k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("-2.5E+2").unwrap(), rat(-250, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn parses_complex_forms() {
        let z = parse_exact("1/2-3/4i").unwrap();
        assert_eq!(z, Complex::new(rat(1, 2), rat(-3, 4)));
        assert_eq!(parse_exact("-i").unwrap(), Complex::new(rat(0, 1), rat(-1, 1)));
        assert_eq!(parse_exact("2i").unwrap(), Complex::new(rat(0, 1), rat(2, 1)));
        assert_eq!(parse_exact("1e-2+1e-1i").unwrap(), Complex::new(rat(1, 100), rat(1, 10)));
        assert_eq!(parse_exact("4").unwrap(), exact_int(4));
    }

    #[test]
    fn format_round_trips() {
        for s in ["1/2-3/4i", "-7", "5/3", "2i", "-1/3i", "4+i"] {
            let z = parse_exact(s).unwrap();
            assert_eq!(parse_exact(&format_exact(&z)).unwrap(), z);
        }
        assert_eq!(format_exact(&parse_exact("4+1i").unwrap()), "4+1i");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&rat(1, 3), 5), "3.3333e-1");
        assert_eq!(rational_to_decimal(&rat(-5, 2), 10), "-2.5");
        assert_eq!(rational_to_decimal(&rat(1000, 1), 4), "1e3");
        assert_eq!(rational_to_decimal(&rat(1, 1), 4), "1");
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    #[test]
    fn scaled_from_exact_matches_float() {
        let z = Complex::new(rat(123456, 7), rat(-1, 3));
        let s = ScaledComplex::from_exact(&z);
        let back = s.to_c64();
        assert!((back.re - 123456.0 / 7.0).abs() < 1e-9);
        assert!((back.im + 1.0 / 3.0).abs() < 1e-12);

        let huge = BigRational::from_integer(num::pow(BigInt::from(10), 500)) * rat(3, 1);
        let s = ScaledComplex::from_exact(&exact_real(huge));
        assert_eq!(s.exp10, 500);
        assert!((s.mantissa.re - 3.0).abs() < 1e-12);
    }
}
