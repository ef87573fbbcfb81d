//! Decimal presentation of balls, and an exact binary round-trip form.
//!
//! The decimal form is `m.mmm...e+X +/- r.re+Y`: the midpoint truncated
//! toward zero to the requested number of significant digits, and a radius
//! rounded up to two significant digits after absorbing the midpoint
//! truncation, so the printed interval still contains every point of the
//! original ball. Midpoints whose decimal exponent sits in a human range
//! are rendered positionally (`14.134...`, `0.00577...`) instead of in
//! scientific notation; the radius is always scientific.
//!
//! The binary form delegates to [`BigFloat`]'s `Display`/`from_hex_str`
//! pair, which is exact; `ball_to_hex`/`ball_from_hex` extend it to balls.

use num_bigint::BigUint;

use crate::ball::RealBall;
use crate::bigfloat::{BigFloat, Rounding};
use crate::complex::ComplexBall;

const LOG10_2: f64 = 0.301_029_995_663_981_2;

/// Largest power of ten we are willing to materialize while scaling.
/// Values with decimal exponents beyond this are unprintable in positional
/// or scientific decimal anyway; `decimal` falls back to the hex form.
const MAX_POW10: i64 = 100_000_000;

fn pow10(e: u64) -> BigUint {
    BigUint::from(10u32).pow(u32::try_from(e).expect("pow10 exponent checked by caller"))
}

/// `floor(v * 10^k)` and whether the product was an integer, for
/// `v = mant * 2^exp > 0`.
fn scale_floor(mant: &BigUint, exp: i64, k: i64) -> (BigUint, bool) {
    let mut num = mant * pow10(k.max(0) as u64);
    let mut den = pow10((-k).max(0) as u64);
    if exp >= 0 {
        num <<= exp as u64;
    } else {
        den <<= (-exp) as u64;
    }
    let d = &num / &den;
    let exact = &d * &den == num;
    (d, exact)
}

/// Truncates `mant * 2^exp` (positive) to `digits` significant decimal
/// digits. Returns the digit string, the decimal exponent X so that the
/// value is `d.igits * 10^X`, and whether the truncation was exact.
fn mid_digits(mant: &BigUint, exp: i64, digits: usize) -> Option<(String, i64, bool)> {
    let bitlen = mant.bits() as i64 + exp;
    let mut x = ((bitlen - 1) as f64 * LOG10_2).floor() as i64;
    loop {
        let k = digits as i64 - 1 - x;
        if k.unsigned_abs() > MAX_POW10 as u64 {
            return None;
        }
        let (d, exact) = scale_floor(mant, exp, k);
        let s = d.to_string();
        match s.len().cmp(&digits) {
            std::cmp::Ordering::Greater => x += 1,
            std::cmp::Ordering::Less => x -= 1,
            std::cmp::Ordering::Equal => return Some((s, x, exact)),
        }
    }
}

/// Renders a digit string with decimal exponent `x`, positionally when the
/// exponent is in a human range and scientifically otherwise.
fn assemble(neg: bool, digits_str: &str, x: i64) -> String {
    let sign = if neg { "-" } else { "" };
    let n = digits_str.len() as i64;
    if (-5..n).contains(&x) {
        if x >= 0 {
            let cut = (x + 1) as usize;
            let (int, frac) = digits_str.split_at(cut);
            if frac.is_empty() {
                format!("{sign}{int}")
            } else {
                format!("{sign}{int}.{frac}")
            }
        } else {
            format!("{sign}0.{}{}", "0".repeat((-x - 1) as usize), digits_str)
        }
    } else {
        let (head, rest) = digits_str.split_at(1);
        if rest.is_empty() {
            format!("{sign}{head}e{x:+}")
        } else {
            format!("{sign}{head}.{rest}e{x:+}")
        }
    }
}

/// Upper bound on `10^e`: exact for e >= 0, 64-bit round-up below.
fn pow10_up(e: i64) -> BigFloat {
    if e >= 0 {
        BigFloat::from_biguint(pow10(e as u64))
    } else {
        let q = BigFloat::from_biguint(pow10((-e) as u64));
        BigFloat::one().div(&q, 64, Rounding::Up).0
    }
}

/// Nonnegative finite `r` rounded up to two significant decimal digits,
/// rendered `r.re+Y`. Zero renders as `0`.
fn rad_string(r: &BigFloat) -> Option<String> {
    if r.is_zero() {
        return Some("0".to_string());
    }
    let (_, mant, exp) = r.parts().expect("finite nonzero");
    let bitlen = mant.bits() as i64 + exp;
    let mut y = ((bitlen - 1) as f64 * LOG10_2).floor() as i64;
    loop {
        let k = 1 - y;
        if k.unsigned_abs() > MAX_POW10 as u64 {
            return None;
        }
        // ceil(v * 10^(1-y)) via (num + den - 1) / den
        let mut num = mant * pow10(k.max(0) as u64);
        let mut den = pow10((-k).max(0) as u64);
        if exp >= 0 {
            num <<= exp as u64;
        } else {
            den <<= (-exp) as u64;
        }
        let r2 = (&num + &den - 1u32) / &den;
        let digits = r2.to_string();
        match digits.len().cmp(&2) {
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Less => y -= 1,
            std::cmp::Ordering::Equal => {
                return Some(format!("{}.{}e{:+}", &digits[..1], &digits[1..], y))
            }
        }
    }
}

/// Midpoint and radius columns of the decimal form, as separate strings.
///
/// The printed interval contains the ball: the midpoint is truncated toward
/// zero and the dropped part is folded into the printed radius, which is
/// rounded up. Balls whose exponents exceed the printable range fall back
/// to the hex forms of the two parts. The midpoint is always finite by
/// construction.
pub fn decimal_parts(x: &RealBall, digits: usize) -> (String, String) {
    let digits = digits.max(1);
    let hex_parts = |x: &RealBall| (x.mid().to_string(), x.rad().to_string());
    let mid = x.mid();
    let (mid_str, trunc_exp) = if mid.is_zero() {
        ("0".to_string(), None)
    } else {
        let (neg, mant, exp) = mid.parts().expect("midpoints are finite");
        match mid_digits(mant, exp, digits) {
            None => return hex_parts(x),
            Some((s, x10, exact)) => {
                let e = if exact { None } else { Some(x10 - digits as i64 + 1) };
                (assemble(neg, &s, x10), e)
            }
        }
    };
    if x.rad().is_inf() {
        return (mid_str, "inf".to_string());
    }
    // exactly 10^e bounds the dropped part; print it directly when it is
    // the whole radius, otherwise fold an upper bound into the sum
    let total = match trunc_exp {
        None => x.rad().clone(),
        Some(e) if x.rad().is_zero() => return (mid_str, format!("1.0e{e:+}")),
        Some(e) => x.rad().add(&pow10_up(e), 64, Rounding::Up).0,
    };
    match rad_string(&total) {
        Some(r) => (mid_str, r),
        None => hex_parts(x),
    }
}

/// Decimal form `<midpoint> +/- <radius>` of a real ball.
pub fn decimal(x: &RealBall, digits: usize) -> String {
    let (m, r) = decimal_parts(x, digits);
    format!("{m} +/- {r}")
}

/// Decimal form of a complex ball. A ball whose imaginary part is exactly
/// zero prints as its real part; otherwise both parts print in full.
pub fn decimal_complex(z: &ComplexBall, digits: usize) -> String {
    if z.im.mid().is_zero() && z.im.rad().is_zero() {
        decimal(&z.re, digits)
    } else {
        format!("({}) + ({})*I", decimal(&z.re, digits), decimal(&z.im, digits))
    }
}

/// Exact binary form `<mid_hex> +/- <rad_hex>`; round-trips through
/// [`ball_from_hex`] bit for bit.
pub fn ball_to_hex(x: &RealBall) -> String {
    format!("{} +/- {}", x.mid(), x.rad())
}

/// Parses the form produced by [`ball_to_hex`].
pub fn ball_from_hex(s: &str) -> Option<RealBall> {
    let (m, r) = s.split_once(" +/- ")?;
    let mid = BigFloat::from_hex_str(m.trim())?;
    let rad = BigFloat::from_hex_str(r.trim())?;
    if rad.is_negative() || rad.is_nan() {
        return None;
    }
    Some(RealBall::with_rad(mid, rad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ratio_ball(p: &str, q: &str, prec: u32) -> RealBall {
        let p: BigInt = p.parse().unwrap();
        let q: BigInt = q.parse().unwrap();
        RealBall::from_bigint_ratio(&p, &q, prec)
    }

    #[test]
    fn exact_small_values_print_positionally() {
        assert_eq!(decimal(&RealBall::from_f64(1.25), 3), "1.25 +/- 0");
        assert_eq!(decimal(&RealBall::from_f64(-0.5), 2), "-0.50 +/- 0");
        assert_eq!(decimal(&RealBall::from_i64(12345), 6), "12345.0 +/- 0");
        assert_eq!(decimal(&RealBall::zero(), 10), "0 +/- 0");
    }

    #[test]
    fn truncation_is_toward_zero_and_flagged_in_radius() {
        // 2/3 = 0.666...; printing 3 digits drops 6.66e-4 < 1e-3
        let x = RealBall::from_ratio(2, 3, 128);
        let s = decimal(&x, 3);
        assert!(s.starts_with("0.666 +/- "), "{s}");
        let rad: f64 = s.split(" +/- ").nth(1).unwrap().parse().unwrap();
        assert!(rad >= 6.6e-4 && rad <= 1.1e-3, "{s}");
    }

    #[test]
    fn euler_constant_prefix_matches_reference_digits() {
        // gamma to 39 digits as an exact ratio; 30-digit truncation
        let x = ratio_ball(
            "577215664901532860606512090082402431042",
            "1000000000000000000000000000000000000000",
            256,
        );
        let s = decimal(&x, 30);
        assert!(s.starts_with("0.577215664901532860606512090082 +/- "), "{s}");
    }

    #[test]
    fn large_and_tiny_exponents_go_scientific() {
        let big = ratio_ball("602214076000000000000000", "1", 128);
        assert_eq!(decimal(&big, 9), "6.02214076e+23 +/- 0");
        assert_eq!(decimal(&big, 5), "6.0221e+23 +/- 1.0e+19");
        let tiny = RealBall::from_f64(6.91e-13);
        assert!(decimal(&tiny, 2).starts_with("6.9e-13 +/- "));
        let edge = RealBall::from_f64(0.00001);
        assert!(decimal(&edge, 2).starts_with("0.000010 +/- "));
    }

    #[test]
    fn radius_rounds_up_to_two_digits() {
        // f64 literals sit a hair above the printed decimals; ceil absorbs it
        let x = RealBall::with_rad(BigFloat::one(), BigFloat::from_f64(3.14e-7));
        assert_eq!(decimal(&x, 4), "1.000 +/- 3.2e-7");
        let y = RealBall::with_rad(BigFloat::one(), BigFloat::from_f64(0.000985));
        assert_eq!(decimal(&y, 4), "1.000 +/- 9.9e-4");
        let z = RealBall::with_rad(BigFloat::one(), BigFloat::pow2(-10));
        assert_eq!(decimal(&z, 4), "1.000 +/- 9.8e-4");
    }

    #[test]
    fn printed_interval_contains_the_ball() {
        // decode the printed strings back to exact rationals and compare
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..200 {
            let m = next() as i64;
            let e = (next() % 60) as i64 - 30;
            let r = next() % (1u64 << 40);
            let x = RealBall::with_rad(
                BigFloat::from_i64(m).mul_2exp(e),
                BigFloat::from_u64(r).mul_2exp(e - 20),
            );
            let digits = 1 + (next() % 25) as usize;
            let s = decimal(&x, digits);
            let (mid_s, rad_s) = s.split_once(" +/- ").unwrap();
            let pm = parse_decimal(mid_s);
            let pr = parse_decimal(rad_s);
            // |x.mid - printed_mid| + x.rad <= printed_rad must hold
            let diff = pm.sub(&RealBall::exact(x.mid().clone()), 256).abs();
            let total = diff.add(&RealBall::exact(x.rad().clone()), 256);
            let slack = pr.sub(&total, 256);
            assert!(
                !slack.hi(64).is_negative(),
                "printed interval too small: {s} for {}",
                ball_to_hex(&x)
            );
        }
    }

    // test-only decimal parser: digits -> exact rational -> tight ball
    fn parse_decimal(s: &str) -> RealBall {
        let (mant_s, exp) = match s.split_once('e') {
            Some((m, e)) => (m, e.parse::<i64>().unwrap()),
            None => (s, 0),
        };
        let neg = mant_s.starts_with('-');
        let mant_s = mant_s.trim_start_matches(['-', '+']);
        let (int, frac) = match mant_s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mant_s, ""),
        };
        let digits: BigInt = format!("{int}{frac}").parse().unwrap();
        let digits = if neg { -digits } else { digits };
        let shift = exp - frac.len() as i64;
        let ten: BigInt = 10.into();
        if shift >= 0 {
            RealBall::from_bigint_ratio(&(digits * ten.pow(shift as u32)), &1.into(), 512)
        } else {
            RealBall::from_bigint_ratio(&digits, &ten.pow((-shift) as u32), 512)
        }
    }

    #[test]
    fn hex_form_round_trips() {
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            state
        };
        for _ in 0..100 {
            let x = RealBall::with_rad(
                BigFloat::from_i64(next() as i64).mul_2exp((next() % 200) as i64 - 100),
                BigFloat::from_u64(next() % (1 << 30)).mul_2exp(-(60 + (next() % 30) as i64)),
            );
            let s = ball_to_hex(&x);
            let y = ball_from_hex(&s).unwrap();
            assert_eq!(ball_to_hex(&y), s);
            assert!(y.contains(&x) && x.contains(&y));
        }
        assert_eq!(ball_from_hex("+0x3p-1 +/- +0x1p-30").unwrap().mid(), &BigFloat::from_f64(1.5));
        assert!(ball_from_hex("+0x3p-1 +/- -0x1p-30").is_none());
        assert!(ball_from_hex("garbage").is_none());
    }

    #[test]
    fn unbounded_balls_render_with_inf_radius() {
        assert_eq!(decimal(&RealBall::full(), 10), "0 +/- inf");
        // non-finite midpoints canonicalize to the full ball
        let inf = RealBall::with_rad(BigFloat::inf(false), BigFloat::zero());
        assert_eq!(decimal(&inf, 5), "0 +/- inf");
    }
}
