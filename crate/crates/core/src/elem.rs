//! Elementary real functions on balls, plus the shared constants pi and
//! log 2.
//!
//! Every kernel works internally in ball arithmetic at a padded working
//! precision, so rounding errors land in the radius automatically; series
//! truncation tails are bounded explicitly and added to the radius at the
//! end. Monotone functions handle fat input balls through endpoints or a
//! derivative bound, never by guessing.
//!
//! Constants are cached at power-of-two precision levels: the value handed
//! out for a request depends only on the request itself, never on what was
//! computed earlier, so results are reproducible across runs and threads.

use crate::ball::{RealBall, RAD_PREC};
use crate::bigfloat::{BigFloat, Rounding};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Upper bound on |x|^n, computed cheaply by squaring.
pub fn pow_up(x: &BigFloat, n: u64) -> BigFloat {
    if n == 0 {
        return BigFloat::one();
    }
    let mut base = x.clone().abs();
    let mut acc: Option<BigFloat> = None;
    let mut n = n;
    loop {
        if n & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.mul(&base, RAD_PREC, Rounding::Up).0,
            });
        }
        n >>= 1;
        if n == 0 {
            break;
        }
        base = base.mul(&base, RAD_PREC, Rounding::Up).0;
    }
    acc.unwrap()
}

/// Sum of the first `terms` entries of `sum_{i>=0} sign^i (p/q)^(2i+1)/(2i+1)`
/// by exact integer binary splitting, with the geometric tail folded into the
/// radius. `sign` is +1 for atanh, -1 for atan. Requires 2p <= q.
fn arc_series_ratio(p: u64, q: u64, sign: i64, prec: u32) -> RealBall {
    assert!(p > 0 && 2 * p <= q);
    let ratio_bits = (q as f64 / p as f64).log2();
    let terms = ((prec as f64 + 8.0) / (2.0 * ratio_bits)).ceil() as u64 + 2;

    let p2 = BigInt::from(p) * BigInt::from(p) * sign;
    let q2 = BigUint::from(q) * BigUint::from(q);

    // S(a,b) = sum_{i=a}^{b-1} (sign p^2/q^2)^(i-a) / (2i+1)
    //        = T / (D * q2^(b-a-1)); returns (T, D, q2^(b-a), p2^(b-a)).
    struct Ctx {
        p2: BigInt,
        q2: BigUint,
    }
    fn split(c: &Ctx, a: u64, b: u64) -> (BigInt, BigUint, BigUint, BigInt) {
        if b - a == 1 {
            return (BigInt::one(), BigUint::from(2 * a + 1), c.q2.clone(), c.p2.clone());
        }
        let m = (a + b) / 2;
        let (t1, d1, qp1, pp1) = split(c, a, m);
        let (t2, d2, qp2, pp2) = split(c, m, b);
        let t = t1 * BigInt::from(d2.clone()) * BigInt::from(qp2.clone()) + &pp1 * t2 * BigInt::from(d1.clone());
        (t, d1 * d2, qp1 * qp2, pp1 * pp2)
    }
    let ctx = Ctx { p2, q2 };
    let (t, d, qp, _) = split(&ctx, 0, terms);

    // value = p*T / (q * D * q2^(terms-1)); q2^(terms-1) = qp / q2
    let num = t * BigInt::from(p);
    let den = BigInt::from(BigUint::from(q) * d * (qp / &ctx.q2));
    let main = RealBall::from_bigint_ratio(&num, &den, prec + 8);

    // |tail| <= (p/q)^(2*terms+1) / (1 - (p/q)^2) <= 2 (p/q)^(2*terms+1)
    let (r, _) = BigFloat::from_u64(p).div(&BigFloat::from_u64(q), RAD_PREC, Rounding::Up);
    let tail = pow_up(&r, 2 * terms + 1).mul_2exp(1);
    main.add_error(&tail).round_to(prec)
}

/// atanh(p/q) for 2p <= q, by binary splitting.
pub fn atanh_ratio(p: u64, q: u64, prec: u32) -> RealBall {
    arc_series_ratio(p, q, 1, prec)
}

/// atan(p/q) for 2p <= q, by binary splitting.
pub fn atan_ratio(p: u64, q: u64, prec: u32) -> RealBall {
    arc_series_ratio(p, q, -1, prec)
}

/// Cache level: requests are quantized so the returned value is a pure
/// function of the requested precision.
fn cache_level(prec: u32) -> u32 {
    (prec + 8).next_power_of_two().max(256)
}

fn cached_const(cache: &OnceLock<Mutex<HashMap<u32, RealBall>>>, prec: u32, compute: impl Fn(u32) -> RealBall) -> RealBall {
    let level = cache_level(prec);
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().unwrap();
    let v = guard.entry(level).or_insert_with(|| compute(level));
    v.round_to(prec)
}

static PI_CACHE: OnceLock<Mutex<HashMap<u32, RealBall>>> = OnceLock::new();
static LOG2_CACHE: OnceLock<Mutex<HashMap<u32, RealBall>>> = OnceLock::new();

/// pi as a ball at the given precision.
pub fn pi_ball(prec: u32) -> RealBall {
    cached_const(&PI_CACHE, prec, |level| {
        // pi = 16 atan(1/5) - 4 atan(1/239)
        let a = atan_ratio(1, 5, level + 16).mul_2exp(4);
        let b = atan_ratio(1, 239, level + 16).mul_2exp(2);
        a.sub(&b, level + 8).round_to(level)
    })
}

/// log 2 as a ball at the given precision.
pub fn log2_ball(prec: u32) -> RealBall {
    cached_const(&LOG2_CACHE, prec, |level| {
        // log 2 = 2 atanh(1/3)
        atanh_ratio(1, 3, level + 16).mul_2exp(1).round_to(level)
    })
}

/// exp at an exact midpoint; radius covers rounding and truncation only.
fn exp_point(m: &BigFloat, prec: u32) -> RealBall {
    if m.is_zero() {
        return RealBall::one();
    }
    let r = (integer_sqrt(prec as u64 + 32) as i64).clamp(4, 512);
    let wp = prec + 48 + r as u32;

    // x = k log2 + u, |u| <= 0.35 + slack
    let k = {
        let v = m.to_f64() / std::f64::consts::LN_2;
        if v.is_finite() {
            v.round().clamp(-(1i64 << 50) as f64, (1i64 << 50) as f64) as i64
        } else {
            return RealBall::full();
        }
    };
    let kb = 64 - k.unsigned_abs().leading_zeros();
    let u = if k == 0 {
        RealBall::exact(m.clone())
    } else {
        let l2 = log2_ball(wp + kb + 4);
        RealBall::exact(m.clone()).sub(&l2.mul_i64(k, wp + kb + 4), wp + 8)
    };

    // v = u / 2^r, exp(v) by Taylor, square r times
    let v = u.mul_2exp(-r);
    let terms = (wp as u64 / r as u64 + 2).max(4);
    let mut acc = RealBall::one();
    for i in (1..=terms).rev() {
        acc = acc.mul(&v, wp).div_u64(i, wp).add(&RealBall::one(), wp);
    }
    // |tail| <= |v|^(terms+1)/(terms+1)! * 1/(1-|v|) <= 2 |v|^(terms+1)
    let vub = v.upper_abs();
    if vub.cmp_value(&BigFloat::pow2(-1)) == Some(Ordering::Greater) {
        return RealBall::full(); // k estimate failed; cannot happen for finite f64 path
    }
    acc = acc.add_error(&pow_up(&vub, terms + 1).mul_2exp(1));
    for _ in 0..r {
        acc = acc.sqr(wp);
    }
    acc.mul_2exp(k).round_to(prec)
}

fn integer_sqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// exp over a ball.
pub fn exp_ball(x: &RealBall, prec: u32) -> RealBall {
    if !x.is_bounded() {
        return RealBall::full();
    }
    let r = x.rad();
    if r.is_zero() {
        return exp_point(x.mid(), prec);
    }
    if r.cmp_value(&BigFloat::from_f64(0.25)) != Some(Ordering::Greater) {
        // |exp(t) - exp(m)| <= exp(m)(e^|t-m| - 1) <= exp(m) * 1.3 r for r <= 1/4
        let base = exp_point(x.mid(), prec);
        let slack = base
            .upper_abs()
            .mul(r, RAD_PREC, Rounding::Up)
            .0
            .mul(&BigFloat::from_f64(1.3), RAD_PREC, Rounding::Up)
            .0;
        base.add_error(&slack)
    } else {
        let lo = exp_point(&x.lo(prec + 8), prec + 8);
        let hi = exp_point(&x.hi(prec + 8), prec + 8);
        RealBall::from_endpoints(&lo.lo(prec + 8), &hi.hi(prec + 8), prec)
    }
}

/// Precision above which log switches from the atanh series to a Newton
/// correction through exp.
const LOG_SERIES_CUTOFF: u32 = 4096;

/// log at an exact positive midpoint.
fn log_point(m: &BigFloat, prec: u32) -> RealBall {
    debug_assert!(m.is_positive() && m.is_finite());
    if *m == BigFloat::one() {
        return RealBall::zero();
    }
    let wp = prec + 32;
    if wp > LOG_SERIES_CUTOFF {
        // Newton through exp: y ~ log m at half precision, then
        // log m = y + log(1 + d), d = m exp(-y) - 1, |log(1+d) - d| <= d^2.
        let y = log_point(m, prec / 2 + 48);
        let ym = y.mid().clone();
        let e = exp_point(&ym.clone().neg(), wp + 8);
        let d = RealBall::exact(m.clone()).mul(&e, wp + 8).sub(&RealBall::one(), wp + 8);
        let dub = d.upper_abs();
        if dub.cmp_value(&BigFloat::pow2(-2)) == Some(Ordering::Greater) {
            // half-precision seed failed to land; should not happen
            return RealBall::full();
        }
        let d2 = dub.mul(&dub, RAD_PREC, Rounding::Up).0;
        return RealBall::exact(ym).add(&d, wp).add_error(&d2).round_to(prec);
    }

    // Reduce to u in (0.75, 1.5], so |z| = |u-1|/(u+1) <= 1/5.
    let bits = m.mant_bits() as i64;
    let exp = m.parts().unwrap().2;
    let mut e2 = exp + bits - 1;
    let mut u = m.mul_2exp(-e2);
    if u.cmp_value(&BigFloat::from_f64(1.5)) == Some(Ordering::Greater) {
        u = u.mul_2exp(-1);
        e2 += 1;
    }

    let num = RealBall::exact(u.sub(&BigFloat::one(), wp + 8, Rounding::Nearest).0);
    let den = RealBall::exact(u.add(&BigFloat::one(), wp + 8, Rounding::Nearest).0);
    let z = num.div(&den, wp);
    let zub = z.upper_abs();
    // log u = 2 atanh(z) = 2 z sum_{i>=0} z^(2i) / (2i+1)
    let per_term = -zub.to_f64().log2() * 2.0;
    let terms = ((wp as f64 / per_term).ceil() as u64 + 2).max(3);
    let w = z.sqr(wp);
    let mut acc = RealBall::zero();
    for i in (0..terms).rev() {
        acc = acc.mul(&w, wp).add(&RealBall::one().div_u64(2 * i + 1, wp), wp);
    }
    let mut lu = z.mul(&acc, wp).mul_2exp(1);
    // |tail| <= 2 |z|^(2T+1) / (1 - z^2) <= 3 |z|^(2T+1)
    let tail = pow_up(&zub, 2 * terms + 1).mul(&BigFloat::from_u64(3), RAD_PREC, Rounding::Up).0;
    lu = lu.add_error(&tail);

    if e2 != 0 {
        let kb = 64 - e2.unsigned_abs().leading_zeros();
        lu = lu.add(&log2_ball(wp + kb + 4).mul_i64(e2, wp + kb + 4), wp);
    }
    lu.round_to(prec)
}

/// log over a ball; full if any point is non-positive.
pub fn log_ball(x: &RealBall, prec: u32) -> RealBall {
    if !x.is_bounded() || !x.is_positive() {
        return RealBall::full();
    }
    if x.is_exact() {
        return log_point(x.mid(), prec);
    }
    // |log t - log m| <= r / min|x|
    let (rel, e) = x.rad().div(&x.lower_abs(), RAD_PREC, Rounding::Up);
    let rel = rel.add(&BigFloat::pow2(e.unwrap_or(i64::MIN / 2)), RAD_PREC, Rounding::Up).0;
    if rel.cmp_value(&BigFloat::pow2(-4)) != Some(Ordering::Greater) {
        log_point(x.mid(), prec).add_error(&rel)
    } else {
        let lo = log_point(&x.lo(prec + 8), prec + 8);
        let hi = log_point(&x.hi(prec + 8), prec + 8);
        RealBall::from_endpoints(&lo.lo(prec + 8), &hi.hi(prec + 8), prec)
    }
}

/// atan at an exact midpoint.
fn atan_point(m: &BigFloat, prec: u32) -> RealBall {
    if m.is_zero() {
        return RealBall::zero();
    }
    if m.is_negative() {
        return atan_point(&m.clone().neg(), prec).neg();
    }
    let wp = prec + 32;
    if m.cmp_value(&BigFloat::one()) == Some(Ordering::Greater) {
        // atan(m) = pi/2 - atan(1/m)
        let inv = RealBall::one().div(&RealBall::exact(m.clone()), wp);
        let inner = atan_point(inv.mid(), wp).add_error(inv.rad());
        return pi_ball(wp).mul_2exp(-1).sub(&inner, wp).round_to(prec);
    }
    // Halve via t <- t / (1 + sqrt(1 + t^2)) until small, then Taylor.
    let halvings = (integer_sqrt(wp as u64) / 2).clamp(3, 128) as u32;
    let mut t = RealBall::exact(m.clone());
    for _ in 0..halvings {
        let s = t.sqr(wp).add(&RealBall::one(), wp).sqrt(wp).add(&RealBall::one(), wp);
        t = t.div(&s, wp);
    }
    // |t| <= 2^-halvings
    let terms = (wp as u64 / (2 * halvings as u64) + 2).max(3);
    let w = t.sqr(wp);
    let mut acc = RealBall::zero();
    for i in (0..terms).rev() {
        let c = RealBall::one().div_u64(2 * i + 1, wp);
        let c = if i % 2 == 1 { c.neg() } else { c };
        acc = acc.mul(&w, wp).add(&c, wp);
    }
    let mut r = t.mul(&acc, wp);
    // alternating series: |tail| <= |t|^(2T+1)
    r = r.add_error(&pow_up(&t.upper_abs(), 2 * terms + 1));
    r.mul_2exp(halvings as i64).round_to(prec)
}

/// atan over a ball; |atan'| <= 1 so the input radius carries over.
pub fn atan_ball(x: &RealBall, prec: u32) -> RealBall {
    if !x.is_bounded() {
        return RealBall::full();
    }
    atan_point(x.mid(), prec).add_error(x.rad())
}

/// atanh over a ball; requires |x| < 1, else full.
pub fn atanh_ball(x: &RealBall, prec: u32) -> RealBall {
    if !x.is_bounded() || x.upper_abs().cmp_value(&BigFloat::one()) != Some(Ordering::Less) {
        return RealBall::full();
    }
    // atanh x = log((1+x)/(1-x)) / 2
    let wp = prec + 8;
    let num = RealBall::one().add(x, wp);
    let den = RealBall::one().sub(x, wp);
    log_ball(&num.div(&den, wp), wp).mul_2exp(-1).round_to(prec)
}

/// sin and cos at an exact midpoint.
fn sincos_point(m: &BigFloat, prec: u32) -> (RealBall, RealBall) {
    let r = (integer_sqrt(prec as u64 + 32) as i64).clamp(4, 512);
    let wp = prec + 48 + 2 * r as u32;

    // m = q (pi/2) + u, |u| <= pi/4 + slack
    let mb = m.msb_exp().unwrap_or(0).max(0) as u32;
    let pi_half = pi_ball(wp + mb + 8).mul_2exp(-1);
    let qf = m.to_f64() / (std::f64::consts::PI / 2.0);
    if !qf.is_finite() || qf.abs() > 9e15 {
        return (RealBall::full(), RealBall::full());
    }
    let q = qf.round() as i64;
    let u = RealBall::exact(m.clone()).sub(&pi_half.mul_i64(q, wp + mb + 8), wp + 8);
    if u.upper_abs().cmp_value(&BigFloat::one()) == Some(Ordering::Greater) {
        return (RealBall::full(), RealBall::full());
    }

    // sin(u/2^r) by Taylor, cos = sqrt(1-s^2), then double r times.
    let t = u.mul_2exp(-r);
    let terms = (wp as u64 / (2 * r as u64) + 2).max(3);
    let w = t.sqr(wp);
    // S = 1 - w/(2*3) (1 - w/(4*5) (1 - ...))
    let mut acc = RealBall::one();
    for i in (1..terms).rev() {
        let c = acc.mul(&w, wp).div_u64(2 * i, wp).div_u64(2 * i + 1, wp);
        acc = RealBall::one().sub(&c, wp);
    }
    let mut s = t.mul(&acc, wp).add_error(&pow_up(&t.upper_abs(), 2 * terms + 1));
    let mut c = RealBall::one().sub(&s.sqr(wp), wp).sqrt(wp);
    for _ in 0..r {
        let s2 = s.mul(&c, wp).mul_2exp(1);
        let c2 = RealBall::one().sub(&s.sqr(wp).mul_2exp(1), wp);
        s = s2;
        c = c2;
    }

    let (s, c) = match q.rem_euclid(4) {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    };
    (s.round_to(prec), c.round_to(prec))
}

/// sin and cos over a ball; both derivatives are bounded by 1.
pub fn sincos_ball(x: &RealBall, prec: u32) -> (RealBall, RealBall) {
    let unit = || RealBall::with_rad(BigFloat::zero(), BigFloat::one());
    if !x.is_bounded() {
        return (unit(), unit());
    }
    if x.rad().cmp_value(&BigFloat::from_f64(0.25)) == Some(Ordering::Greater) {
        return (unit(), unit());
    }
    let (s, c) = sincos_point(x.mid(), prec);
    (s.add_error(x.rad()), c.add_error(x.rad()))
}

pub fn sin_ball(x: &RealBall, prec: u32) -> RealBall {
    sincos_ball(x, prec).0
}

pub fn cos_ball(x: &RealBall, prec: u32) -> RealBall {
    sincos_ball(x, prec).1
}
