//! Exact decimal strings for certificate coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{FsosError, Result};
use crate::fourier::Rational;

/// Significant digits kept when a float coefficient is written out.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to `sig` significant digits and prints it in plain positional
/// notation, without trailing zeros (`1.223`, `-0.000515`, `120`).
///
/// # Panics
/// On non-finite input.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(x.is_finite(), "non-finite coefficient {x}");
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i64 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    // value = 0.d1d2d3... * 10^(exp + 1)
    let point = exp + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-point) as usize));
        out.push_str(digits);
    } else if point as usize >= digits.len() {
        out.push_str(digits);
        out.extend(std::iter::repeat('0').take(point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

/// Parses `[-+]digits[.digits][(e|E)[-+]digits]` to an exact rational.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || FsosError::MalformedDecimal(s.to_string());
    let (body, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            if e.abs() > 4000 {
                return Err(bad());
            }
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, body) = match body.as_bytes().first() {
        Some(b'-') => (true, &body[1..]),
        Some(b'+') => (false, &body[1..]),
        _ => (false, body),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int}{frac}");
    let mut num: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    if negative {
        num = -num;
    }
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// `x` rounded to `sig` significant digits, as an exact rational.
pub fn round_to_rational(x: f64, sig: usize) -> Rational {
    parse_decimal(&format_sig(x, sig)).expect("formatter output parses")
}

/// Writes a rational whose denominator divides a power of ten; `None` otherwise.
pub fn exact_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        a += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        b += 1;
    }
    if !den.is_one() {
        return None;
    }
    let k = a.max(b);
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), k));
    let int = scaled.to_integer();
    let negative = int < BigInt::zero();
    let mut digits = int.magnitude().to_string();
    if k == 0 {
        return Some(if negative { format!("-{digits}") } else { digits });
    }
    if digits.len() <= k {
        digits = "0".repeat(k + 1 - digits.len()) + &digits;
    }
    let (ip, fp) = digits.split_at(digits.len() - k);
    let fp = fp.trim_end_matches('0');
    let body = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    Some(if negative { format!("-{body}") } else { body })
}
