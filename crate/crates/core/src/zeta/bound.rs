//! Rigorous upper bounds for the truncation remainder of the
//! Euler-Maclaurin evaluation.
//!
//! The remainder left after summing N power-sum terms and M tail terms is a
//! power series in x. Its k-th coefficient is bounded by the k-th coefficient
//! of
//!
//! ```text
//!   4 |(s+x)_{2M}| / (2pi)^{2M} * sum_k R_k x^k,
//!   R_k <= (K / k!) * J_k(N + alpha, sigma + 2M, C),
//! ```
//!
//! where `|(s+x)_{2M}|` is the coefficientwise-absolute-value series of the
//! rising factorial, `J_k(A, B, C)` is the integral of `t^-B (C + log t)^k`
//! over `[A, oo)`, and C and K absorb the effect of complex a and s. The
//! bound is valid whenever `alpha + N > 1` and `sigma + 2M > 1` hold for
//! every point of the input balls; otherwise every entry degrades to +inf.
//!
//! Everything here runs at a small fixed precision: only the leading bits of
//! a bound matter, and ball arithmetic keeps the upper endpoints valid no
//! matter how coarse the midpoints are.

use crate::ball::RealBall;
use crate::bigfloat::{BigFloat, Rounding};
use crate::complex::ComplexBall;
use crate::elem::{atan_ball, exp_ball, log_ball, pi_ball};
use crate::series::RealSeries;
use num_bigint::BigUint;
use num_traits::One;
use std::cmp::Ordering;

use super::EMParams;

/// Working precision for bound arithmetic.
pub const BOUND_PREC: u32 = 64;

/// Scalar ingredients of the remainder bound, kept as balls so that upper
/// and lower endpoints can be extracted where each is needed.
pub struct BoundContext {
    /// `N + alpha`; valid bounds require every point > 1.
    pub a: RealBall,
    /// `sigma + 2M`; valid bounds require every point > 1.
    pub b: RealBall,
    /// Nonnegative growth constant `log(1 + beta^2/A^2)/2 + atan(|beta|/A)`.
    pub c: RealBall,
    /// Prefactor `exp(max(0, tau * atan(beta/A))) >= 1`.
    pub k: RealBall,
}

fn bf_min(a: BigFloat, b: BigFloat) -> BigFloat {
    match a.cmp_value(&b) {
        Some(Ordering::Greater) => b,
        Some(_) => a,
        None => BigFloat::nan(),
    }
}

fn bf_max(a: BigFloat, b: BigFloat) -> BigFloat {
    match a.cmp_value(&b) {
        Some(Ordering::Less) => b,
        Some(_) => a,
        None => BigFloat::nan(),
    }
}

fn gt_one(x: &BigFloat) -> bool {
    x.cmp_value(&BigFloat::one()) == Some(Ordering::Greater)
}

fn ball_pow_u64(x: &RealBall, n: u64, prec: u32) -> RealBall {
    let mut acc = RealBall::one();
    let mut base = x.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base, prec);
        }
        e >>= 1;
        if e > 0 {
            base = base.sqr(prec);
        }
    }
    acc
}

/// Builds the bound context for parameters (N, M), or None when the
/// preconditions cannot be verified over the whole input balls.
pub fn bound_context(s: &ComplexBall, a: &ComplexBall, n: u64, m: u64) -> Option<BoundContext> {
    let bp = BOUND_PREC;
    if n > i64::MAX as u64 || m > (i64::MAX / 2) as u64 {
        return None;
    }
    let big_a = a.re.add(&RealBall::from_i64(n as i64), bp);
    let big_b = s.re.add(&RealBall::from_i64(2 * m as i64), bp);
    if !gt_one(&big_a.lo(bp)) || !gt_one(&big_b.lo(bp)) {
        return None;
    }

    // Exact form of C, and the cruder cap beta^2/(2A^2) + |beta|/A. Both are
    // upper bounds (log(1+u) <= u, atan(v) <= v), so the smaller upper
    // endpoint is kept; the lower endpoint comes from the exact form.
    let q = a.im.div(&big_a, bp);
    let q_abs = q.abs();
    let c_exact = log_ball(&q.sqr(bp).add(&RealBall::one(), bp), bp)
        .mul_2exp(-1)
        .add(&atan_ball(&q_abs, bp), bp);
    let c_quick = q.sqr(bp).mul_2exp(-1).add(&q_abs, bp);
    let c_lo = bf_max(BigFloat::zero(), c_exact.lo(bp));
    let c_hi = bf_min(c_exact.hi(bp), c_quick.hi(bp));
    let c = RealBall::from_endpoints(&c_lo, &c_hi, bp);

    // K = exp(max(0, tau * atan(beta/A))), clamped onto [0, oo) before
    // exponentiating so that K >= 1 holds structurally.
    let t = s.im.mul(&atan_ball(&q, bp), bp);
    let t_lo = bf_max(BigFloat::zero(), t.lo(bp));
    let t_hi = bf_max(BigFloat::zero(), t.hi(bp));
    let k = exp_ball(&RealBall::from_endpoints(&t_lo, &t_hi, bp), bp);

    Some(BoundContext { a: big_a, b: big_b, c, k })
}

/// Upper bounds on the integrals `J_k(A, B, C) = int_A^oo t^-B (C+log t)^k dt`
/// for k = 0..count, via the closed form
/// `J_k = L_k / ((B-1)^{k+1} A^{B-1})` with `L_0 = 1`,
/// `L_k = k L_{k-1} + jD^k`, `jD = (B-1)(C + log A)`.
///
/// Requires A > 1, B > 1, C >= 0 over the entire balls; violations yield
/// all-infinite entries.
pub fn j_sequence(a: &RealBall, b: &RealBall, c: &RealBall, count: usize) -> Vec<RealBall> {
    let bp = BOUND_PREC;
    if !gt_one(&a.lo(bp)) || !gt_one(&b.lo(bp)) || c.lo(bp).is_negative() {
        return vec![RealBall::full(); count];
    }
    let bm1 = b.sub(&RealBall::one(), bp);
    let log_a = log_ball(a, bp);
    let jd = bm1.mul(&c.add(&log_a, bp), bp);
    let a_pow = exp_ball(&bm1.mul(&log_a, bp), bp);

    let mut out = Vec::with_capacity(count);
    let mut l = RealBall::one();
    let mut jd_pow = RealBall::one();
    let mut denom = bm1.mul(&a_pow, bp);
    for k in 0..count {
        if k > 0 {
            jd_pow = jd_pow.mul(&jd, bp);
            l = l.mul_i64(k as i64, bp).add(&jd_pow, bp);
            denom = denom.mul(&bm1, bp);
        }
        out.push(l.div(&denom, bp));
    }
    out
}

/// Coefficientwise absolute-value majorant of the rising factorial jet
/// `(s+x)(s+1+x)...(s+2M-1+x) mod x^d`: entry i is an upper bound for the
/// magnitude of coefficient i. A balanced product tree keeps the enclosures
/// tight for large d; small d uses the linear-factor recurrence directly.
fn rising_majorant(s: &ComplexBall, two_m: u64, d: usize, prec: u32) -> Vec<BigFloat> {
    let jet = if two_m == 0 {
        vec![ComplexBall::one()]
    } else if d >= 16 {
        rising_tree(s, 0, two_m, d, prec)
    } else {
        let mut c = vec![ComplexBall::one()];
        for j in 0..two_m {
            let f = s.add(&ComplexBall::from_i64(j as i64, 0), prec);
            if c.len() < d {
                c.push(ComplexBall::zero());
            }
            for i in (1..c.len()).rev() {
                let t = c[i].mul(&f, prec);
                c[i] = t.add(&c[i - 1], prec);
            }
            c[0] = c[0].mul(&f, prec);
        }
        c
    };
    let mut out: Vec<BigFloat> = jet.iter().map(|z| z.upper_abs()).collect();
    out.resize(d, BigFloat::zero());
    out
}

fn rising_tree(s: &ComplexBall, j0: u64, j1: u64, d: usize, prec: u32) -> Vec<ComplexBall> {
    if j1 - j0 == 1 {
        let c0 = s.add(&ComplexBall::from_i64(j0 as i64, 0), prec);
        if d == 1 {
            return vec![c0];
        }
        return vec![c0, ComplexBall::one()];
    }
    let mid = j0 + (j1 - j0) / 2;
    let left = rising_tree(s, j0, mid, d, prec);
    let right = rising_tree(s, mid, j1, d, prec);
    // Truncated Cauchy product of the two halves.
    let len = (left.len() + right.len() - 1).min(d);
    let mut out = vec![ComplexBall::zero(); len];
    for (i, li) in left.iter().enumerate() {
        if i >= len {
            break;
        }
        for (j, rj) in right.iter().enumerate() {
            if i + j >= len {
                break;
            }
            let t = li.mul(rj, prec);
            out[i + j] = out[i + j].add(&t, prec);
        }
    }
    out
}

/// Per-coefficient remainder bound: entry k is an upper bound on the
/// absolute value of the k-th coefficient of the remainder series for the
/// given parameters. Precondition failure yields all-infinite entries, which
/// callers fold into radii to produce valid (if uninformative) enclosures.
pub fn remainder_bound(
    s: &ComplexBall,
    a: &ComplexBall,
    params: &EMParams,
    d: usize,
    prec: u32,
) -> RealSeries {
    let bp = prec.max(32);
    let Some(ctx) = bound_context(s, a, params.n, params.m) else {
        return RealSeries::from_coeffs(vec![RealBall::full(); d]);
    };
    let two_m = 2 * params.m;

    let js = j_sequence(&ctx.a, &ctx.b, &ctx.c, d);
    let k_up = ctx.k.upper_abs();

    // r[k] = upper bound of (K/k!) J_k.
    let mut fact = BigUint::one();
    let mut r = Vec::with_capacity(d);
    for k in 0..d {
        if k > 0 {
            fact *= BigUint::from(k);
        }
        let jk = js[k].upper_abs();
        let num = k_up.mul(&jk, bp, Rounding::Up).0;
        r.push(
            num.div(&BigFloat::from_biguint(fact.clone()), bp, Rounding::Up)
                .0,
        );
    }

    let rising = rising_majorant(s, two_m, d, bp);

    // 4 / (2 pi)^{2M}, upper endpoint.
    let two_pi = pi_ball(bp).mul_2exp(1);
    let pref = ball_pow_u64(&two_pi, two_m, bp)
        .recip(bp)
        .mul_2exp(2)
        .upper_abs();

    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let mut acc = BigFloat::zero();
        for i in 0..=k {
            let t = rising[i].mul(&r[k - i], bp, Rounding::Up).0;
            acc = acc.add(&t, bp, Rounding::Up).0;
        }
        out.push(RealBall::exact(acc.mul(&pref, bp, Rounding::Up).0));
    }
    RealSeries::from_coeffs(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::RealBall;

    fn ball_f64(x: f64) -> RealBall {
        RealBall::from_f64(x)
    }

    #[test]
    fn j0_closed_form() {
        // A=2, B=3, C=0: J_0 = 1/((B-1) A^{B-1}) = 1/8.
        let j = j_sequence(
            &RealBall::from_i64(2),
            &RealBall::from_i64(3),
            &RealBall::zero(),
            1,
        );
        assert!(j[0].contains_bf(&BigFloat::from_f64(0.125)));
        assert!(j[0].rad().to_f64() < 1e-9);
    }

    #[test]
    fn j1_integral_of_t_pow_minus2_log() {
        // A barely above 1, B=2, C=0: J_1 = (log A + 1)/A -> 1.
        let a = RealBall::from_ratio(1_048_577, 1_048_576, 64);
        let j = j_sequence(&a, &RealBall::from_i64(2), &RealBall::zero(), 2);
        let v = j[1].mid().to_f64();
        assert!((v - 1.0).abs() < 1e-4, "J_1 = {v}");
    }

    #[test]
    fn j3_matches_adaptive_quadrature() {
        // J_3(2, 4, 1/2) against direct numerical integration of
        // t^-4 (1/2 + log t)^3 over [2, T] plus an analytic tail bound.
        let f = |t: f64| t.powi(-4) * (0.5 + t.ln()).powi(3);
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, eps: f64) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (left + right - whole).abs() < eps {
                left + right
            } else {
                simpson(f, a, m, fa, flm, fm, eps * 0.5) + simpson(f, m, b, fm, frm, fb, eps * 0.5)
            }
        }
        let t_end = 1e5_f64;
        let quad = simpson(&f, 2.0, t_end, f(2.0), f(0.5 * (2.0 + t_end)), f(t_end), 1e-12);
        // Tail: integrand <= (1/2 + log t)^3 t^-4, integrated by parts bound.
        let tail_cap = (0.5 + t_end.ln()).powi(3) / t_end.powi(3);
        let j = j_sequence(
            &RealBall::from_i64(2),
            &RealBall::from_i64(4),
            &RealBall::from_ratio(1, 2, 64),
            4,
        );
        let v = j[3].mid().to_f64();
        assert!(
            (v - quad).abs() < 1e-6 * quad + tail_cap,
            "closed form {v} vs quadrature {quad}"
        );
        // The closed form is exact, so the ball must lie at or above the
        // truncated quadrature.
        assert!(j[3].hi(64).to_f64() >= quad);
    }

    #[test]
    fn preconditions_give_infinite_entries() {
        let j = j_sequence(
            &RealBall::from_ratio(1, 2, 64),
            &RealBall::from_i64(3),
            &RealBall::zero(),
            3,
        );
        assert!(j.iter().all(|b| !b.is_bounded()));

        // alpha + N <= 1.
        let s = ComplexBall::from_i64(2, 0);
        let a = ComplexBall::new(RealBall::from_ratio(1, 2, 64), RealBall::zero());
        assert!(bound_context(&s, &a, 0, 4).is_none());
        assert!(bound_context(&s, &a, 1, 4).is_some());
    }

    #[test]
    fn real_inputs_give_c_zero_k_one() {
        let s = ComplexBall::from_i64(-3, 0);
        let a = ComplexBall::from_i64(1, 0);
        let ctx = bound_context(&s, &a, 10, 5).unwrap();
        assert!(ctx.c.is_exact() && ctx.c.mid().is_zero());
        assert!(ctx.k.is_exact() && ctx.k.mid() == &BigFloat::one());
    }

    #[test]
    fn bound_decreases_in_n_and_m() {
        let s = ComplexBall::from_i64(2, 0);
        let a = ComplexBall::one();
        let small = remainder_bound(&s, &a, &EMParams { n: 10, m: 10, attained: true }, 1, 64);
        let large = remainder_bound(&s, &a, &EMParams { n: 20, m: 20, attained: true }, 1, 64);
        let bs = small.upper(0);
        let bl = large.upper(0);
        assert!(bl.cmp_value(&bs) == Some(Ordering::Less), "{} !< {}", bl.to_f64(), bs.to_f64());
        assert!(bs.is_finite() && !bs.is_zero());
    }

    #[test]
    fn rising_majorant_small_cases() {
        // (s+x)(s+1+x) at s=2: 6 + 5x + x^2.
        let s = ComplexBall::from_i64(2, 0);
        let m = rising_majorant(&s, 2, 3, 64);
        assert!((m[0].to_f64() - 6.0).abs() < 1e-12);
        assert!((m[1].to_f64() - 5.0).abs() < 1e-12);
        assert!((m[2].to_f64() - 1.0).abs() < 1e-12);
        // Tree path agrees with the sequential path.
        let seq = rising_majorant(&s, 40, 8, 64);
        let tree: Vec<BigFloat> = {
            let jet = rising_tree(&s, 0, 40, 8, 64);
            jet.iter().map(|z| z.upper_abs()).collect()
        };
        for i in 0..8 {
            let a = seq[i].to_f64();
            let b = tree[i].to_f64();
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "coeff {i}: {a} vs {b}");
        }
    }

    #[test]
    fn complex_context_quantities_are_sane() {
        // a = 2 + i, s = 1/2 + 3i: C > 0, K >= 1, both finite.
        let s = ComplexBall::new(ball_f64(0.5), RealBall::from_i64(3));
        let a = ComplexBall::from_i64(2, 1);
        let ctx = bound_context(&s, &a, 8, 6).unwrap();
        assert!(ctx.c.is_positive() && ctx.c.is_bounded());
        assert!(ctx.k.lo(64).cmp_value(&BigFloat::one()) != Some(Ordering::Less));
        let b = remainder_bound(&s, &a, &EMParams { n: 8, m: 6, attained: true }, 4, 64);
        for k in 0..4 {
            assert!(b.upper(k).is_finite());
        }
    }
}
