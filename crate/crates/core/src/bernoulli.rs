//! Bernoulli numbers, exact and as balls.
//!
//! Small indices come from tangent numbers: the triangle below computes
//! T_1..T_m with exact integer additions and small scalar multiplications,
//! and |B_2n| = 2n T_n / (2^2n (2^2n - 1)).
//!
//! The triangle is quadratic in the index with entries of quadratically
//! growing size, so the big enclosure tables that high-precision tail sums
//! need switch route: for 2k large against the working precision,
//! |B_2k| = 2 (2k)! zeta(2k) / (2 pi)^(2k) with the zeta sum truncated after
//! a handful of terms. Both the factorial and the power of 2 pi advance
//! incrementally across the table, one short multiplication per index.
//!
//! Exact values are cached process-wide, so any slice of the table is
//! independent of computation history. The environment variable
//! `HZETA_BERNOULLI_CACHE_MAX` caps the cached index; larger requests are
//! computed on the fly and not retained.

use crate::ball::RealBall;
use crate::bigfloat::BigFloat;
use crate::elem::pi_ball;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::{Mutex, OnceLock};

/// Tangent numbers T_1..T_m (1, 2, 16, 272, 7936, ...).
pub fn tangent_numbers(m: usize) -> Vec<BigUint> {
    if m == 0 {
        return vec![];
    }
    let mut t: Vec<BigUint> = Vec::with_capacity(m);
    t.push(BigUint::one());
    for k in 2..=m {
        let prev = t[k - 2].clone();
        t.push(prev * (k as u64 - 1));
    }
    for k in 2..=m {
        for j in k..=m {
            let a = &t[j - 2] * (j - k) as u64;
            let b = &t[j - 1] * (j - k + 2) as u64;
            t[j - 1] = a + b;
        }
    }
    t
}

/// B_2n as an exact rational, given the tangent number T_n.
fn even_bernoulli_from_tangent(n: usize, t: &BigUint) -> BigRational {
    let num = BigInt::from(t * (2 * n) as u64);
    let p = BigUint::one() << (2 * n);
    let den = BigInt::from(&p * (&p - 1u32));
    let v = BigRational::new(num, den);
    if n % 2 == 1 {
        v
    } else {
        -v
    }
}

/// Exact table B_0..B_n.
fn compute_table(n: usize) -> Vec<BigRational> {
    let m = n / 2;
    let tangents = tangent_numbers(m);
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one());
    if n >= 1 {
        out.push(BigRational::new(BigInt::from(-1), BigInt::from(2)));
    }
    for k in 2..=n {
        if k % 2 == 1 {
            out.push(BigRational::zero());
        } else {
            out.push(even_bernoulli_from_tangent(k / 2, &tangents[k / 2 - 1]));
        }
    }
    out
}

static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

fn cache_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("HZETA_BERNOULLI_CACHE_MAX")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(usize::MAX)
    })
}

/// Runs `f` on B_0..B_n without cloning the cached table.
fn with_table<R>(n: usize, cap: usize, f: impl FnOnce(&[BigRational]) -> R) -> R {
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    {
        let guard = cache.lock().unwrap();
        if guard.len() > n {
            return f(&guard[..=n]);
        }
    }
    let fresh = compute_table(n);
    if n <= cap {
        let mut guard = cache.lock().unwrap();
        if guard.len() <= n {
            *guard = fresh;
        }
        return f(&guard[..=n]);
    }
    f(&fresh)
}

fn table_with_cap(n: usize, cap: usize) -> Vec<BigRational> {
    with_table(n, cap, |t| t.to_vec())
}

/// Exact Bernoulli numbers B_0..B_n (cached).
pub fn bernoulli_table(n: usize) -> Vec<BigRational> {
    table_with_cap(n, cache_cap())
}

/// Exact B_n.
pub fn bernoulli(n: usize) -> BigRational {
    bernoulli_table(n).pop().unwrap()
}

/// B_n as a ball at the given precision.
pub fn bernoulli_ball(n: usize, prec: u32) -> RealBall {
    if n % 2 == 1 {
        return if n == 1 {
            RealBall::from_ratio(-1, 2, prec)
        } else {
            RealBall::zero()
        };
    }
    if n / 2 > zeta_route_min_k(prec) {
        return zeta_route_balls(n / 2, n, prec).pop().unwrap();
    }
    let b = bernoulli(n);
    RealBall::from_bigint_ratio(b.numer(), b.denom(), prec)
}

/// Balls for B_0..B_n at the given precision.
pub fn bernoulli_balls(n: usize, prec: u32) -> Vec<RealBall> {
    let k0 = zeta_route_min_k(prec);
    if n / 2 <= k0 {
        return exact_balls(n, prec);
    }
    let mut out = exact_balls(2 * k0 + 1, prec);
    out.extend(zeta_route_balls(k0 + 1, n, prec));
    out.truncate(n + 1);
    out
}

fn exact_balls(n: usize, prec: u32) -> Vec<RealBall> {
    with_table(n, cache_cap(), |table| {
        table
            .iter()
            .map(|b| {
                if b.is_zero() {
                    RealBall::zero()
                } else {
                    RealBall::from_bigint_ratio(b.numer(), b.denom(), prec)
                }
            })
            .collect()
    })
}

/// Smallest even-index half k for which the truncated-zeta route is used:
/// below it the zeta sum needs too many terms to beat the exact triangle.
fn zeta_route_min_k(prec: u32) -> usize {
    ((prec as usize + 40) / 16).max(64)
}

/// Balls for B_{2 k_lo}..B_n (with zero odd slots) via
/// |B_2k| = 2 (2k)! zeta(2k) / (2 pi)^(2k). Requires k_lo >= (prec+40)/16 so
/// the zeta sums stay short.
fn zeta_route_balls(k_lo: usize, n: usize, prec: u32) -> Vec<RealBall> {
    let wp = prec + 32;
    let k_hi = n / 2;

    // (2 k_lo)! exactly, then as a ball that advances by (2k-1)(2k) per step.
    let mut f = BigUint::one();
    for i in 2..=(2 * k_lo as u64) {
        f *= i;
    }
    let mut fact = RealBall::from_bigint_ratio(&BigInt::from(f), &BigInt::one(), wp);

    // (2 pi)^{-2k}, advanced by one multiplication per step.
    let two_pi_sq = {
        let p = pi_ball(wp + 8).mul_2exp(1);
        p.sqr(wp + 8)
    };
    let inv_two_pi_sq = RealBall::one().div(&two_pi_sq, wp);
    let mut inv_pow = RealBall::one();
    {
        // square-and-multiply for the starting exponent k_lo
        let mut base = inv_two_pi_sq.clone();
        let mut e = k_lo;
        while e > 0 {
            if e & 1 == 1 {
                inv_pow = inv_pow.mul(&base, wp);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(wp);
            }
        }
    }

    // Running powers j^{-2k} for odd j; even j are shifts of odd entries.
    // The truncation bound J(k) = 2^ceil((wp+8)/2k) shrinks as k grows, and
    // entries are dropped once j exceeds it for good.
    let j_bound = |k: usize| -> u64 { 1u64 << ((wp as usize + 8).div_ceil(2 * k)).min(40) };
    let j0 = j_bound(k_lo);
    let mut pows: Vec<(u64, RealBall)> = Vec::new();
    for j in (3..=j0).step_by(2) {
        let inv_j2 = RealBall::one().div(&RealBall::from_i64((j * j) as i64), wp);
        let mut p = RealBall::one();
        let mut base = inv_j2;
        let mut e = k_lo;
        while e > 0 {
            if e & 1 == 1 {
                p = p.mul(&base, wp);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(wp);
            }
        }
        pows.push((j, p));
    }
    let inv_sq: Vec<RealBall> = (0..=j0 / 2)
        .map(|h| {
            let j = 2 * h + 1;
            RealBall::one().div(&RealBall::from_i64((j * j) as i64), wp)
        })
        .collect();

    let mut out = Vec::with_capacity(2 * (k_hi - k_lo) + 2);
    for k in k_lo..=k_hi {
        if k > k_lo {
            fact = fact.mul_i64((2 * k as i64 - 1) * 2 * k as i64, wp);
            inv_pow = inv_pow.mul(&inv_two_pi_sq, wp);
            for (j, p) in pows.iter_mut() {
                *p = p.mul(&inv_sq[(*j / 2) as usize], wp);
            }
        }
        let jb = j_bound(k);
        pows.retain(|(j, _)| *j <= jb);

        // zeta(2k) = sum_{j<=J} j^{-2k} + R, 0 < R <= 2 (J+1)^{-2k} <= 2^{-wp-7}
        let mut z = RealBall::one();
        for j in 2..=jb {
            let tz = j.trailing_zeros() as i64;
            let q = j >> tz;
            let term = if q == 1 {
                RealBall::exact(BigFloat::pow2(-2 * k as i64 * tz))
            } else {
                let p = &pows.iter().find(|(pj, _)| *pj == q).unwrap().1;
                p.mul_2exp(-2 * k as i64 * tz)
            };
            z = z.add(&term, wp);
        }
        z = z.add_error(&BigFloat::pow2(-(wp as i64) - 7));

        let b = fact.mul(&z, wp).mul(&inv_pow, wp).mul_2exp(1);
        let b = if k % 2 == 1 { b } else { b.neg() };
        if k > k_lo {
            out.push(RealBall::zero());
        }
        out.push(b.round_to(prec));
    }
    if n % 2 == 1 {
        out.push(RealBall::zero());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{FromPrimitive, Signed};

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn tangent_sequence() {
        let t = tangent_numbers(6);
        let expect: Vec<u64> = vec![1, 2, 16, 272, 7936, 353792];
        assert_eq!(t, expect.into_iter().map(BigUint::from).collect::<Vec<_>>());
    }

    #[test]
    fn known_values() {
        let b = bernoulli_table(30);
        assert_eq!(b[0], BigRational::one());
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[12], rat(-691, 2730));
        assert_eq!(b[30], BigRational::new("8615841276005".parse().unwrap(), BigInt::from(14322)));
        for k in (3..30).step_by(2) {
            assert!(b[k].is_zero());
        }
    }

    #[test]
    fn defining_recurrence_holds() {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1, in exact arithmetic
        let n = 64;
        let b = bernoulli_table(n);
        for m in 1..n {
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for j in 0..=m {
                acc += BigRational::from(binom.clone()) * &b[j];
                // C(m+1, j+1) = C(m+1, j) (m+1-j)/(j+1)
                binom = binom * (m as i64 + 1 - j as i64) / (j as i64 + 1);
            }
            assert!(acc.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn matches_series_inversion_oracle() {
        // Independent construction: invert sum_k x^k/(k+1)! in exact rational
        // arithmetic; the inverse series has coefficients B_k/k!.
        let d = 16;
        let mut f: Vec<BigRational> = Vec::new();
        let mut fact = BigInt::one();
        for k in 0..d {
            fact *= k as i64 + 1;
            f.push(BigRational::new(BigInt::one(), fact.clone()));
        }
        // g = 1/f by the quotient recurrence
        let mut g: Vec<BigRational> = Vec::new();
        for k in 0..d {
            let mut acc = if k == 0 { BigRational::one() } else { BigRational::zero() };
            for j in 1..=k {
                acc -= f[j].clone() * &g[k - j];
            }
            g.push(acc / f[0].clone());
        }
        let b = bernoulli_table(d - 1);
        let mut fact = BigRational::one();
        for k in 0..d {
            if k > 1 {
                fact *= BigRational::from_i64(k as i64).unwrap();
            }
            assert_eq!(g[k].clone() * &fact, b[k], "B_{k}");
        }
    }

    #[test]
    fn magnitude_growth() {
        // |B_2n| ~ 2 (2n)!/(2 pi)^2n grows fast; sanity-check one large index
        let b = bernoulli(100);
        // B_100 ~ -2.838e78
        let approx = b.numer().to_string().len() as i64 - b.denom().to_string().len() as i64;
        assert!((78..=80).contains(&approx));
        assert!(b.is_negative());
    }

    #[test]
    fn cap_skips_caching_but_stays_correct() {
        let capped = table_with_cap(40, 10);
        let full = compute_table(40);
        assert_eq!(capped, full);
    }

    #[test]
    fn ball_conversion_contains_exact_value() {
        let ball = bernoulli_ball(12, 64);
        let exact = RealBall::from_ratio(-691, 2730, 256);
        assert!(ball.contains(&exact));
        let zero = bernoulli_ball(7, 64);
        assert!(zero.is_exact() && zero.mid().is_zero());
    }

    #[test]
    fn truncated_zeta_route_agrees_with_exact_route() {
        // prec 2048 puts the crossover near k = 130; indices past 260 take
        // the zeta route, which must still enclose the exact rationals.
        let prec = 2048;
        let k0 = zeta_route_min_k(prec);
        let n = 2 * k0 + 40;
        let routed = bernoulli_balls(n, prec);
        let exact = exact_balls(n, prec);
        assert_eq!(routed.len(), exact.len());
        for i in (2 * k0 - 6)..=n {
            if i % 2 == 1 {
                assert!(routed[i].is_exact() && routed[i].mid().is_zero());
                continue;
            }
            let diff = routed[i].sub(&exact[i], prec + 16);
            assert!(diff.contains_zero(), "B_{i} routes disagree");
            // relative tightness: radius within ~40 bits of the precision
            let rel = routed[i].rad().msb_exp().unwrap() - routed[i].mid().msb_exp().unwrap();
            assert!(rel < -(prec as i64) + 40, "B_{i} enclosure too wide: 2^{rel}");
        }
    }

    #[test]
    fn single_large_ball_matches_table_entry() {
        let prec = 2048;
        let k0 = zeta_route_min_k(prec);
        let n = 2 * k0 + 20;
        let single = bernoulli_ball(n, prec);
        let table = bernoulli_balls(n, prec);
        let diff = single.sub(&table[n], prec + 16);
        assert!(diff.contains_zero());
        assert!(bernoulli_ball(n + 1, prec).mid().is_zero());
    }
}
