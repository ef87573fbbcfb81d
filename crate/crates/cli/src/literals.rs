//! Exact parsing of real and complex number literals.
//!
//! A component is a decimal (`2`, `-0.5`, `1.25e-3`) or a rational (`1/3`,
//! `-7/2`); every form denotes an exact rational, so converting to a ball at
//! any precision only pays one rounding. A complex literal is
//! `re`, `im i`, or `re+im i` with an optional space before the trailing
//! `i`/`I`; a bare `i` means an imaginary part of one.

use num_bigint::BigInt;

use hzeta::ball::RealBall;
use hzeta::complex::ComplexBall;

/// Exact rational value of a literal, as numerator and positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: BigInt,
    pub den: BigInt,
}

impl Rational {
    fn zero() -> Self {
        Rational { num: 0.into(), den: 1.into() }
    }

    fn one_signed(neg: bool) -> Self {
        Rational { num: if neg { (-1).into() } else { 1.into() }, den: 1.into() }
    }

    pub fn to_ball(&self, prec: u32) -> RealBall {
        RealBall::from_bigint_ratio(&self.num, &self.den, prec)
    }
}

fn parse_unsigned_int(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses one signed component: `p/q` or a decimal with optional exponent.
pub fn parse_real(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, s) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let s = s.trim_start();
    if let Some((p, q)) = s.split_once('/') {
        let num = parse_unsigned_int(p.trim())?;
        let den = parse_unsigned_int(q.trim())?;
        if den == BigInt::from(0) {
            return None;
        }
        return Some(Rational { num: if neg { -num } else { num }, den });
    }
    let (mant, e) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok().filter(|x| x.abs() <= 9999)?),
        None => (s, 0),
    };
    let (int, frac) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = e - frac.len() as i64;
    let ten = BigInt::from(10);
    let (num, den) = if shift >= 0 {
        (digits * ten.pow(shift as u32), BigInt::from(1))
    } else {
        (digits, ten.pow((-shift) as u32))
    };
    Some(Rational { num: if neg { -num } else { num }, den })
}

/// Splits `re+im i` at the last top-level sign: one preceded by a digit or
/// `.`, so exponent signs (`1e-3`) stay inside their component.
fn split_complex(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut split = None;
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        if b != b'+' && b != b'-' {
            continue;
        }
        let prev = s[..i].trim_end().bytes().last()?;
        if prev.is_ascii_digit() || prev == b'.' {
            split = Some(i);
        }
    }
    split
}

/// Parses a complex literal into exact rational parts.
pub fn parse_complex(s: &str) -> Option<(Rational, Rational)> {
    let s = s.trim();
    let imaginary = s.ends_with(['i', 'I']);
    if !imaginary {
        return Some((parse_real(s)?, Rational::zero()));
    }
    let body = s[..s.len() - 1].trim_end();
    let im_part = |t: &str| -> Option<Rational> {
        match t.trim() {
            "" | "+" => Some(Rational::one_signed(false)),
            "-" => Some(Rational::one_signed(true)),
            other => parse_real(other),
        }
    };
    match split_complex(body) {
        Some(i) => Some((parse_real(&body[..i])?, im_part(&body[i..])?)),
        None => Some((Rational::zero(), im_part(body)?)),
    }
}

/// Complex literal as a ball at the given precision.
pub fn complex_ball(s: &str, prec: u32) -> Option<ComplexBall> {
    let (re, im) = parse_complex(s)?;
    Some(ComplexBall::new(re.to_ball(prec), im.to_ball(prec)))
}
