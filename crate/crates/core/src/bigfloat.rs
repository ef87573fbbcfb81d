//! Arbitrary-precision binary floating point with directed rounding.
//!
//! A finite value is `(-1)^neg * mant * 2^exp` with `mant` odd (trailing
//! zeros are folded into the exponent), so equal values have equal
//! representations. Every inexact operation rounds according to an explicit
//! [`Rounding`] mode and reports an error exponent `k` such that the result
//! differs from the exact value by at most `2^k`. The ball layer turns that
//! report into a radius contribution; nothing in this module ever guesses.

use num_bigint::BigUint;
use num_traits::{One, Zero as _};
use std::cmp::Ordering;

/// Rounding direction for scalar operations.
///
/// `Down`/`Up` are toward minus/plus infinity in value (not magnitude), so
/// `round_down(x) <= x <= round_up(x)` always holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
    Zero,
}

/// Exponents outside this range saturate to infinity (or zero below).
pub const EXP_LIMIT: i64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BigFloat {
    Zero,
    Finite { neg: bool, mant: BigUint, exp: i64 },
    Inf { neg: bool },
    Nan,
}

use BigFloat::*;

/// Result of a rounded operation: the value plus, when inexact, an exponent
/// `k` with `|result - exact| <= 2^k`.
pub type Rounded = (BigFloat, Option<i64>);

impl BigFloat {
    pub fn zero() -> Self {
        Zero
    }

    pub fn one() -> Self {
        Finite { neg: false, mant: BigUint::one(), exp: 0 }
    }

    pub fn nan() -> Self {
        Nan
    }

    pub fn inf(neg: bool) -> Self {
        Inf { neg }
    }

    /// `2^e`, exact.
    pub fn pow2(e: i64) -> Self {
        Finite { neg: false, mant: BigUint::one(), exp: e }
    }

    /// Builds a normalized value from raw parts.
    pub fn from_parts(neg: bool, mant: BigUint, exp: i64) -> Self {
        normalize(neg, mant, exp)
    }

    pub fn from_u64(v: u64) -> Self {
        if v == 0 {
            Zero
        } else {
            normalize(false, BigUint::from(v), 0)
        }
    }

    pub fn from_i64(v: i64) -> Self {
        if v == 0 {
            Zero
        } else {
            normalize(v < 0, BigUint::from(v.unsigned_abs()), 0)
        }
    }

    pub fn from_biguint(v: BigUint) -> Self {
        normalize(false, v, 0)
    }

    /// Exact conversion from an IEEE double.
    pub fn from_f64(v: f64) -> Self {
        if v.is_nan() {
            return Nan;
        }
        if v.is_infinite() {
            return Inf { neg: v < 0.0 };
        }
        if v == 0.0 {
            return Zero;
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        normalize(neg, BigUint::from(mant), exp)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Zero)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Zero | Finite { .. })
    }

    pub fn is_nan(&self) -> bool {
        matches!(self, Nan)
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Inf { .. })
    }

    /// True for negative finite values and negative infinity.
    pub fn is_negative(&self) -> bool {
        match self {
            Finite { neg, .. } | Inf { neg } => *neg,
            _ => false,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Finite { neg, .. } | Inf { neg } => !*neg,
            _ => false,
        }
    }

    /// Exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero/inf/nan.
    pub fn msb_exp(&self) -> Option<i64> {
        match self {
            Finite { mant, exp, .. } => Some(exp + mant.bits() as i64),
            _ => None,
        }
    }

    /// Number of significant bits in the mantissa (0 for non-finite/zero).
    pub fn mant_bits(&self) -> u64 {
        match self {
            Finite { mant, .. } => mant.bits(),
            _ => 0,
        }
    }

    pub fn neg(mut self) -> Self {
        match &mut self {
            Finite { neg, .. } | Inf { neg } => *neg = !*neg,
            _ => {}
        }
        self
    }

    pub fn abs(mut self) -> Self {
        match &mut self {
            Finite { neg, .. } | Inf { neg } => *neg = false,
            _ => {}
        }
        self
    }

    /// Exact scaling by `2^e` (saturates on exponent overflow).
    pub fn mul_2exp(&self, e: i64) -> Self {
        match self {
            Finite { neg, mant, exp } => normalize(*neg, mant.clone(), exp.saturating_add(e)),
            other => other.clone(),
        }
    }

    /// Value comparison; `None` when a NaN is involved.
    pub fn cmp_value(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Nan, _) | (_, Nan) => None,
            (Zero, Zero) => Some(Ordering::Equal),
            (Zero, b) => Some(if b.is_positive() { Ordering::Less } else { Ordering::Greater }),
            (a, Zero) => Some(if a.is_positive() { Ordering::Greater } else { Ordering::Less }),
            (Inf { neg: n1 }, Inf { neg: n2 }) => Some(n2.cmp(n1)),
            (Inf { neg }, _) => Some(if *neg { Ordering::Less } else { Ordering::Greater }),
            (_, Inf { neg }) => Some(if *neg { Ordering::Greater } else { Ordering::Less }),
            (Finite { neg: n1, .. }, Finite { neg: n2, .. }) if n1 != n2 => {
                Some(if *n1 { Ordering::Less } else { Ordering::Greater })
            }
            (a @ Finite { neg, .. }, b) => {
                let mag = cmp_mag_finite(a, b);
                Some(if *neg { mag.reverse() } else { mag })
            }
        }
    }

    /// Magnitude comparison of finite values (inf > finite, nan -> None).
    pub fn cmp_abs(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Nan, _) | (_, Nan) => None,
            (Zero, Zero) => Some(Ordering::Equal),
            (Zero, _) => Some(Ordering::Less),
            (_, Zero) => Some(Ordering::Greater),
            (Inf { .. }, Inf { .. }) => Some(Ordering::Equal),
            (Inf { .. }, _) => Some(Ordering::Greater),
            (_, Inf { .. }) => Some(Ordering::Less),
            (a, b) => Some(cmp_mag_finite(a, b)),
        }
    }

    /// Approximate conversion, saturating outside the f64 range. For
    /// heuristics (initial guesses, size estimates) only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Zero => 0.0,
            Nan => f64::NAN,
            Inf { neg } => {
                if *neg {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            Finite { neg, mant, exp } => {
                let bits = mant.bits();
                let (top, scale) = if bits > 53 {
                    ((mant >> (bits - 53)).to_u64_digits()[0], exp + (bits as i64 - 53))
                } else {
                    (mant.to_u64_digits()[0], *exp)
                };
                let mut v = top as f64;
                let mut e = scale;
                while e > 1023 {
                    v *= 2f64.powi(1023);
                    e -= 1023;
                    if v.is_infinite() {
                        break;
                    }
                }
                while e < -1074 {
                    v *= 2f64.powi(-1074);
                    e += 1074;
                    if v == 0.0 {
                        break;
                    }
                }
                let v = v * 2f64.powi(e as i32);
                if *neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// The exact integer value, when the number is one and fits in i64.
    /// The mantissa is kept odd, so a negative exponent means non-integral.
    pub fn to_i64_exact(&self) -> Option<i64> {
        match self {
            Zero => Some(0),
            Finite { neg, mant, exp } => {
                if *exp < 0 || mant.bits() as i64 + exp > 63 {
                    return None;
                }
                let v = (mant << (*exp as u64)).to_u64_digits();
                let v = *v.first().unwrap_or(&0) as i64;
                Some(if *neg { -v } else { v })
            }
            _ => None,
        }
    }

    /// Nearest integer as i64 (saturating); heuristic use only.
    pub fn round_to_i64(&self) -> i64 {
        let v = self.to_f64();
        if v.is_nan() {
            0
        } else if v >= i64::MAX as f64 {
            i64::MAX
        } else if v <= i64::MIN as f64 {
            i64::MIN
        } else {
            v.round() as i64
        }
    }

    /// Rounds to `prec` significant bits.
    pub fn round(&self, prec: u32, mode: Rounding) -> Rounded {
        match self {
            Finite { neg, mant, exp } => round_finite(*neg, mant.clone(), *exp, prec, mode, 0),
            other => (other.clone(), None),
        }
    }

    pub fn add(&self, other: &Self, prec: u32, mode: Rounding) -> Rounded {
        match (self, other) {
            (Nan, _) | (_, Nan) => (Nan, None),
            (Inf { neg: n1 }, Inf { neg: n2 }) => {
                if n1 == n2 {
                    (Inf { neg: *n1 }, None)
                } else {
                    (Nan, None)
                }
            }
            (inf @ Inf { .. }, _) | (_, inf @ Inf { .. }) => (inf.clone(), None),
            (Zero, b) => b.round(prec, mode),
            (a, Zero) => a.round(prec, mode),
            (a, b) => add_finite(a, b, prec, mode),
        }
    }

    pub fn sub(&self, other: &Self, prec: u32, mode: Rounding) -> Rounded {
        self.add(&other.clone().neg(), prec, mode)
    }

    pub fn mul(&self, other: &Self, prec: u32, mode: Rounding) -> Rounded {
        match (self, other) {
            (Nan, _) | (_, Nan) => (Nan, None),
            (Inf { .. }, Zero) | (Zero, Inf { .. }) => (Nan, None),
            (Inf { neg: n1 }, b) | (b, Inf { neg: n1 }) => (Inf { neg: n1 != &b.is_negative() }, None),
            (Zero, _) | (_, Zero) => (Zero, None),
            (Finite { neg: n1, mant: m1, exp: e1 }, Finite { neg: n2, mant: m2, exp: e2 }) => {
                round_finite(n1 != n2, m1 * m2, e1.saturating_add(*e2), prec, mode, 0)
            }
        }
    }

    pub fn mul_u64(&self, k: u64, prec: u32, mode: Rounding) -> Rounded {
        match self {
            Finite { neg, mant, exp } => {
                if k == 0 {
                    (Zero, None)
                } else {
                    round_finite(*neg, mant * k, *exp, prec, mode, 0)
                }
            }
            Zero => (Zero, None),
            other => (other.clone(), None),
        }
    }

    pub fn div(&self, other: &Self, prec: u32, mode: Rounding) -> Rounded {
        match (self, other) {
            (Nan, _) | (_, Nan) => (Nan, None),
            (Inf { .. }, Inf { .. }) => (Nan, None),
            (Zero, Zero) => (Nan, None),
            (_, Zero) => (Nan, None), // sign of the zero is unknowable here
            (Inf { neg }, b) => (Inf { neg: neg != &b.is_negative() }, None),
            (Zero, _) => (Zero, None),
            (_, Inf { .. }) => (Zero, None),
            (Finite { neg: n1, mant: m1, exp: e1 }, Finite { neg: n2, mant: m2, exp: e2 }) => {
                let b1 = m1.bits() as i64;
                let b2 = m2.bits() as i64;
                let s = (prec as i64 + 3 + b2 - b1).max(0) as u64;
                let num = m1 << s;
                let (q, r) = num_integer::Integer::div_rem(&num, m2);
                let exp = e1.saturating_sub(s as i64).saturating_sub(*e2);
                round_finite(n1 != n2, q, exp, prec, mode, if r.is_zero() { 0 } else { 1 })
            }
        }
    }

    pub fn div_u64(&self, k: u64, prec: u32, mode: Rounding) -> Rounded {
        if k == 0 {
            return (Nan, None);
        }
        match self {
            Finite { neg, mant, exp } => {
                let s = (prec as i64 + 3 + 64 - mant.bits() as i64).max(0) as u64;
                let num = mant << s;
                let (q, r) = num_integer::Integer::div_rem(&num, &BigUint::from(k));
                round_finite(*neg, q, exp.saturating_sub(s as i64), prec, mode, if r.is_zero() { 0 } else { 1 })
            }
            other => (other.clone(), None),
        }
    }

    /// Square root; negative input yields NaN.
    pub fn sqrt(&self, prec: u32, mode: Rounding) -> Rounded {
        match self {
            Zero => (Zero, None),
            Nan => (Nan, None),
            Inf { neg: false } => (Inf { neg: false }, None),
            Inf { neg: true } => (Nan, None),
            Finite { neg: true, .. } => (Nan, None),
            Finite { neg: false, mant, exp } => {
                let bits = mant.bits() as i64;
                let mut t = (2 * (prec as i64 + 3) - bits).max(0);
                if (exp - t) & 1 != 0 {
                    t += 1;
                }
                let m = mant << t as u64;
                let r = num_integer::Roots::sqrt(&m);
                let rem = &m - &r * &r;
                round_finite(false, r, (exp - t) / 2, prec, mode, if rem.is_zero() { 0 } else { 1 })
            }
        }
    }

    /// Exact mantissa/exponent view for serialization.
    pub fn parts(&self) -> Option<(bool, &BigUint, i64)> {
        match self {
            Finite { neg, mant, exp } => Some((*neg, mant, *exp)),
            _ => None,
        }
    }
}

fn normalize(neg: bool, mut mant: BigUint, mut exp: i64) -> BigFloat {
    if mant.is_zero() {
        return Zero;
    }
    let tz = mant.trailing_zeros().unwrap_or(0);
    if tz > 0 {
        mant >>= tz;
        exp = exp.saturating_add(tz as i64);
    }
    let msb = exp.saturating_add(mant.bits() as i64);
    if msb > EXP_LIMIT {
        return Inf { neg };
    }
    if msb < -EXP_LIMIT {
        return Zero;
    }
    Finite { neg, mant, exp }
}

/// Magnitude comparison of two finite nonzero values. Never materializes the
/// exponent gap: it aligns by mantissa width only.
fn cmp_mag_finite(a: &BigFloat, b: &BigFloat) -> Ordering {
    let (m1, e1) = match a {
        Finite { mant, exp, .. } => (mant, *exp),
        _ => unreachable!(),
    };
    let (m2, e2) = match b {
        Finite { mant, exp, .. } => (mant, *exp),
        _ => unreachable!(),
    };
    let msb1 = e1 + m1.bits() as i64;
    let msb2 = e2 + m2.bits() as i64;
    match msb1.cmp(&msb2) {
        Ordering::Equal => {
            // Same leading position: shift the shorter mantissa up.
            let w1 = m1.bits();
            let w2 = m2.bits();
            if w1 >= w2 {
                m1.cmp(&(m2 << (w1 - w2)))
            } else {
                (m1 << (w2 - w1)).cmp(m2)
            }
        }
        other => other,
    }
}

/// Core rounding. `sticky` in {-1, 0, +1} asserts a hidden tail of magnitude
/// strictly below one unit of `2^exp`, added to (+1) or subtracted from (-1)
/// the stated magnitude.
fn round_finite(neg: bool, mant: BigUint, exp: i64, prec: u32, mode: Rounding, sticky: i8) -> Rounded {
    debug_assert!(!mant.is_zero());
    let prec = prec.max(2) as i64;
    let nb = mant.bits() as i64;
    let shift = nb - prec;
    // Magnitude-increasing rounding corresponds to Up for positives, Down for
    // negatives.
    let mag_up = matches!((mode, neg), (Rounding::Up, false) | (Rounding::Down, true));
    let mag_down = matches!(
        (mode, neg),
        (Rounding::Down, false) | (Rounding::Up, true) | (Rounding::Zero, _)
    );

    if shift <= 0 {
        if sticky == 0 {
            return (normalize(neg, mant, exp), None);
        }
        let adjusted = if sticky > 0 {
            if mag_up {
                mant + 1u32
            } else {
                mant
            }
        } else if mag_down {
            if mant.is_one() {
                return (Zero, Some(exp));
            }
            mant - 1u32
        } else {
            mant
        };
        return (normalize(neg, adjusted, exp), Some(exp));
    }

    let shift = shift as u64;
    let low_nonzero = mant.trailing_zeros().unwrap_or(0) < shift;
    let mut q: BigUint = &mant >> shift;
    let lsb_exp = exp.saturating_add(shift as i64);
    if !low_nonzero && sticky == 0 {
        return (normalize(neg, q, lsb_exp), None);
    }
    // Tail sign: any nonzero dropped bits dominate the sub-unit sticky.
    let tail_positive = low_nonzero || sticky > 0;
    let mut err_exp = lsb_exp;
    match mode {
        _ if mag_up && tail_positive => q += 1u32,
        _ if mag_down && !tail_positive => q -= 1u32, // q >= 2^(prec-1) >= 2
        Rounding::Nearest => {
            if tail_positive && mant.bit(shift - 1) {
                q += 1u32;
            }
            if low_nonzero && sticky == 0 {
                err_exp = lsb_exp - 1;
            }
        }
        _ => {}
    }
    (normalize(neg, q, lsb_exp), Some(err_exp))
}

fn add_finite(a: &BigFloat, b: &BigFloat, prec: u32, mode: Rounding) -> Rounded {
    let (a, b) = if a.msb_exp() >= b.msb_exp() { (a, b) } else { (b, a) };
    let (an, am, ae) = match a {
        Finite { neg, mant, exp } => (*neg, mant, *exp),
        _ => unreachable!(),
    };
    let (bn, bm, be) = match b {
        Finite { neg, mant, exp } => (*neg, mant, *exp),
        _ => unreachable!(),
    };
    let a_msb = ae + am.bits() as i64;
    let b_msb = be + bm.bits() as i64;

    if b_msb.saturating_add(prec as i64 + 16) < a_msb {
        return add_far(an, am, ae, b, prec, mode);
    }

    // Exact path: the msb gap is at most prec+16, so the span is bounded by
    // the operands' own widths.
    let e = ae.min(be);
    let ma = am << (ae - e) as u64;
    let mb = bm << (be - e) as u64;
    if an == bn {
        round_finite(an, ma + mb, e, prec, mode, 0)
    } else {
        match ma.cmp(&mb) {
            Ordering::Equal => (Zero, None),
            Ordering::Greater => round_finite(an, ma - mb, e, prec, mode, 0),
            Ordering::Less => round_finite(bn, mb - ma, e, prec, mode, 0),
        }
    }
}

/// `a + b` when `|b|` sits entirely below the rounding position of `a`
/// (msb gap > prec+16). Truncates `a` to prec+16 bits, rescales with two
/// guard bits, and nudges by a few units so the result brackets the exact
/// sum in the requested direction. The nudge is always tiny against the
/// rescaled mantissa (prec+18 bits), so no borrow can empty it.
fn add_far(an: bool, am: &BigUint, ae: i64, b: &BigFloat, prec: u32, mode: Rounding) -> Rounded {
    let keep = prec as u64 + 16;
    let bits = am.bits();
    let drop_bits = bits.saturating_sub(keep);
    let hi: BigUint = am >> drop_bits;
    let hi_exp = ae + drop_bits as i64;
    let drop_nonzero = am.trailing_zeros().unwrap_or(0) < drop_bits;
    let same_sign = an == b.is_negative();

    // |b| < 2^(a_msb - prec - 16) = 2^(hi_exp - g) with g = keep - hi.bits();
    // dropped bits of a contribute < 2^hi_exp and only arise when g = 0.
    // After widening by g+2 bits, both tails are whole multiples of 4 units.
    let g = keep - hi.bits(); // 0 when truncation happened
    let mut hi2: BigUint = &hi << (g + 2);
    let exp2 = hi_exp - g as i64 - 2;

    let mag_up = matches!((mode, an), (Rounding::Up, false) | (Rounding::Down, true));
    let mag_down = matches!(
        (mode, an),
        (Rounding::Down, false) | (Rounding::Up, true) | (Rounding::Zero, _)
    );
    if same_sign {
        // tail in (0, 8) units of 2^exp2 (dropped part plus |b|)
        if mag_up {
            hi2 += 8u32;
        } else if !mag_down {
            hi2 += 4u32;
        }
    } else if drop_nonzero {
        let dropped = normalize(false, am - (&hi << drop_bits), ae);
        match dropped.cmp_abs(b).unwrap() {
            Ordering::Greater => {
                if mag_up {
                    hi2 += 4u32;
                }
            }
            Ordering::Less => {
                if mag_down {
                    hi2 -= 4u32;
                }
            }
            Ordering::Equal => {
                // dropped part and b cancel exactly
                let (v, e) = round_finite(an, hi, hi_exp, prec, mode, 0);
                return (v, e);
            }
        }
    } else {
        // tail = -|b| in (-4, 0) units
        if mag_down {
            hi2 -= 4u32;
        }
    }
    let (v, e) = round_finite(an, hi2, exp2, prec, mode, 0);
    (v, Some(e.unwrap_or(exp2).max(exp2 + 3).saturating_add(1)))
}

impl std::fmt::Display for BigFloat {
    /// Hex form `±0x<mant>p<exp>`; exact and round-trippable.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Zero => write!(f, "+0x0p+0"),
            Nan => write!(f, "nan"),
            Inf { neg: false } => write!(f, "+inf"),
            Inf { neg: true } => write!(f, "-inf"),
            Finite { neg, mant, exp } => {
                write!(f, "{}0x{:x}p{}{}", if *neg { '-' } else { '+' }, mant, if *exp < 0 { '-' } else { '+' }, exp.unsigned_abs())
            }
        }
    }
}

impl BigFloat {
    /// Parses the exact hex form produced by `Display`.
    pub fn from_hex_str(s: &str) -> Option<Self> {
        match s {
            "nan" => return Some(Nan),
            "+inf" => return Some(Inf { neg: false }),
            "-inf" => return Some(Inf { neg: true }),
            _ => {}
        }
        let (neg, rest) = match s.as_bytes().first()? {
            b'+' => (false, &s[1..]),
            b'-' => (true, &s[1..]),
            _ => (false, s),
        };
        let rest = rest.strip_prefix("0x")?;
        let p = rest.find('p')?;
        let mant = BigUint::parse_bytes(rest[..p].as_bytes(), 16)?;
        let exp: i64 = rest[p + 1..].parse().ok()?;
        if mant.is_zero() {
            return Some(Zero);
        }
        Some(normalize(neg, mant, exp))
    }
}
