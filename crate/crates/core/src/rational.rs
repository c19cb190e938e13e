//! Exact rational arithmetic helpers.
//!
//! Design energies, fields and couplers are kept as `Ratio<i64>` so that
//! spectral gaps like 0.1 compare exactly; floating point is confined to the
//! quantum simulator and the noise ensembles.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::Zero;

/// Exact rational used for energies, fields and couplers.
pub type Rat = Ratio<i64>;

/// Parse `"3"`, `"-1.25"` or `"11/10"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Rat::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad rational '{s}'")));
    }
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(Error::Parse(format!("bad rational '{s}'")));
    }
    let mut num: i64 = if int_part.is_empty() {
        0
    } else {
        int_part
            .parse()
            .map_err(|_| Error::Parse(format!("rational '{s}' out of range")))?
    };
    let mut den: i64 = 1;
    for c in frac_part.chars() {
        num = num
            .checked_mul(10)
            .and_then(|v| v.checked_add((c as u8 - b'0') as i64))
            .ok_or_else(|| Error::Parse(format!("rational '{s}' out of range")))?;
        den = den
            .checked_mul(10)
            .ok_or_else(|| Error::Parse(format!("rational '{s}' out of range")))?;
    }
    Ok(Rat::new(sign * num, den))
}

/// Render a rational exactly: as a terminating decimal when the reduced
/// denominator is `2^a 5^b`, otherwise as `p/q`.
pub fn format_rat(r: &Rat) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let mut den = *r.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let k = twos.max(fives);
    // Scale to denominator 10^k.
    let factor = 2i128.pow(k - twos) * 5i128.pow(k - fives);
    let scaled = (*r.numer() as i128) * factor;
    let neg = scaled < 0;
    let digits = scaled.unsigned_abs().to_string();
    let k = k as usize;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if k == 0 {
        out.push_str(&digits);
        return out;
    }
    if digits.len() > k {
        out.push_str(&digits[..digits.len() - k]);
        out.push('.');
        out.push_str(&digits[digits.len() - k..]);
    } else {
        out.push_str("0.");
        for _ in 0..k - digits.len() {
            out.push('0');
        }
        out.push_str(&digits);
    }
    // Trim trailing zeros of the fractional part.
    while out.ends_with('0') {
        out.pop();
    }
    if out.ends_with('.') {
        out.pop();
    }
    out
}

/// Least common multiple of two positive i64 values.
pub(crate) fn lcm_i64(a: i64, b: i64) -> Result<i64> {
    let g = gcd_i64(a, b);
    (a / g).checked_mul(b).ok_or(Error::CountOverflow)
}

pub(crate) fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Rational to f64 via exact integer conversion (safe for the magnitudes in scope).
pub fn rat_to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
