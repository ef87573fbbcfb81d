//! The Bernoulli tail stage of the Euler-Maclaurin evaluation:
//!
//! ```text
//!   T = (a+N)^{-(s+x)} [ 1/2 + sum_{j=1}^{M} B_{2j}/(2j)! (s+x)_{2j-1} (a+N)^{1-2j} ]
//! ```
//!
//! The bracketed sum is evaluated by binary splitting over the ratio factors
//!
//! ```text
//!   f_0 = (s+x) / (2 (a+N)),
//!   f_i = (s+2i-1+x)(s+2i+x) / ((2i+1)(2i+2) (a+N)^2),   i >= 1,
//! ```
//!
//! whose prefix products are exactly `(s+x)_{2j-1} / ((2j)! (a+N)^{2j-1})`.
//! A range of leaves carries a pair (P, R): the product of its factors and
//! the Bernoulli-weighted sum of prefix products. Ranges merge as
//! `(P1 P2, R1 + P1 R2)`, so the work is balanced and enclosures stay tight.

use crate::ball::RealBall;
use crate::bernoulli::bernoulli_balls;
use crate::bigfloat::BigFloat;
use crate::complex::ComplexBall;
use crate::series::BallSeries;

use super::power_sum::TermCtx;
use super::EMParams;

struct Split<'a> {
    s: &'a ComplexBall,
    /// `B_0 .. B_{2M}` at working precision; even indices are used.
    bern: &'a [RealBall],
    /// `1 / (2 (a+N))`.
    inv_2apn: ComplexBall,
    /// `1 / (a+N)^2`.
    inv_apn2: ComplexBall,
    d: usize,
    prec: u32,
}

impl Split<'_> {
    fn leaf(&self, i: u64) -> BallSeries {
        let prec = self.prec;
        if i == 0 {
            return BallSeries::from_coeffs(vec![self.s.clone(), ComplexBall::one()])
                .resize(self.d)
                .mul_scalar(&self.inv_2apn, prec);
        }
        let s2i = self.s.add(&ComplexBall::from_i64(2 * i as i64, 0), prec);
        let q0 = s2i.sub(&ComplexBall::one(), prec).mul(&s2i, prec);
        let q1 = s2i.mul_2exp(1).sub(&ComplexBall::one(), prec);
        let scale = self.inv_apn2.div_u64((2 * i + 1) * (2 * i + 2), prec);
        BallSeries::from_coeffs(vec![q0, q1, ComplexBall::one()])
            .resize(self.d)
            .mul_scalar(&scale, prec)
    }

    /// (P, R) over the leaf range [lo, hi).
    fn split(&self, lo: u64, hi: u64) -> (BallSeries, BallSeries) {
        if hi - lo == 1 {
            let p = self.leaf(lo);
            let r = p.mul_real(&self.bern[2 * (lo as usize + 1)], self.prec);
            return (p, r);
        }
        let mid = lo + (hi - lo) / 2;
        let (p1, r1) = self.split(lo, mid);
        let (p2, r2) = self.split(mid, hi);
        let p = p1.mul(&p2, self.d, self.prec);
        let r = r1.add(&p1.mul(&r2, self.d, self.prec), self.prec);
        (p, r)
    }
}

/// The tail jet `T mod x^d` for the given (N, M).
pub fn tail_binary_split(
    s: &ComplexBall,
    a: &ComplexBall,
    params: &EMParams,
    d: usize,
    prec: u32,
) -> BallSeries {
    assert!(d >= 1);
    assert!(params.n <= i64::MAX as u64 && params.m < u32::MAX as u64);
    let apn = a.add(&ComplexBall::from_i64(params.n as i64, 0), prec);
    let pref = TermCtx::new(s, d, prec).jet(&apn, None);
    let half = ComplexBall::from_real(RealBall::exact(BigFloat::pow2(-1)));
    if params.m == 0 {
        return pref.mul_scalar(&half, prec);
    }
    let bern = bernoulli_balls(2 * params.m as usize, prec);
    let sp = Split {
        s,
        bern: &bern,
        inv_2apn: apn.mul_2exp(1).recip(prec),
        inv_apn2: apn.sqr(prec).recip(prec),
        d,
        prec,
    };
    let (_, r) = sp.split(0, params.m);
    let inner = r.add(&BallSeries::constant(half, d), prec);
    pref.mul(&inner, d, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn params(n: u64, m: u64) -> EMParams {
        EMParams { n, m, attained: true }
    }

    fn overlaps(x: &ComplexBall, y: &ComplexBall) -> bool {
        x.sub(y, 256).contains_zero()
    }

    #[test]
    fn hand_value_one_tail_term() {
        // s=2, a=1, N=10, M=1, D=1:
        // T = 11^{-2} (1/2 + (1/6)(1/2!)(2/11)) = (1/121)(1/2 + 1/66) = 17/3993.
        let t = tail_binary_split(
            &ComplexBall::from_i64(2, 0),
            &ComplexBall::one(),
            &params(10, 1),
            1,
            128,
        );
        let expect = RealBall::from_ratio(17, 3993, 192);
        assert!(t.coeff(0).re.sub(&expect, 192).contains_zero());
        assert!(t.coeff(0).re.rad().to_f64() < 1e-30);
        assert!(t.coeff(0).im.contains_zero());
    }

    #[test]
    fn zero_tail_terms_is_half_prefactor() {
        let s = ComplexBall::from_i64(3, 2);
        let a = ComplexBall::one();
        let t = tail_binary_split(&s, &a, &params(7, 0), 3, 128);
        let apn = ComplexBall::from_i64(8, 0);
        let pref = TermCtx::new(&s, 3, 128).jet(&apn, None);
        for i in 0..3 {
            let half = pref.coeff(i).mul_2exp(-1);
            assert!(overlaps(&t.coeff(i), &half));
        }
    }

    #[test]
    fn matches_iterative_recurrence() {
        // Oracle: accumulate B_{2j}/(2j)! (s+x)_{2j-1} (a+N)^{1-2j} term by
        // term with an incrementally extended rising-factorial jet.
        let prec = 192;
        let d = 4;
        let (n, m) = (20u64, 16u64);
        let s = ComplexBall::new(
            RealBall::from_ratio(1, 2, prec),
            RealBall::from_i64(14),
        );
        let a = ComplexBall::one();

        let apn = ComplexBall::from_i64(n as i64 + 1, 0);
        let inv_apn2 = apn.sqr(prec).recip(prec);
        let bern = bernoulli_balls(2 * m as usize, prec);
        let mut rising = BallSeries::from_coeffs(vec![s.clone(), ComplexBall::one()]).resize(d);
        let mut scale = apn.recip(prec); // (a+N)^{1-2j} at j=1
        let mut fact = BigUint::from(2u32); // (2j)! at j=1
        let mut sum = BallSeries::zero(d);
        for j in 1..=m {
            if j > 1 {
                let s0 = s.add(&ComplexBall::from_i64(2 * j as i64 - 3, 0), prec);
                let s1 = s.add(&ComplexBall::from_i64(2 * j as i64 - 2, 0), prec);
                let lin0 = BallSeries::from_coeffs(vec![s0, ComplexBall::one()]).resize(d);
                let lin1 = BallSeries::from_coeffs(vec![s1, ComplexBall::one()]).resize(d);
                rising = rising.mul(&lin0, d, prec).mul(&lin1, d, prec);
                scale = scale.mul(&inv_apn2, prec);
                fact *= BigUint::from(2 * j - 1) * BigUint::from(2 * j);
            }
            let w = RealBall::one().div(
                &RealBall::exact(BigFloat::from_biguint(fact.clone())),
                prec,
            );
            let term = rising
                .mul_real(&bern[2 * j as usize], prec)
                .mul_real(&w, prec)
                .mul_scalar(&scale, prec);
            sum = sum.add(&term, prec);
        }
        let pref = TermCtx::new(&s, d, prec).jet(&apn, None);
        let half = ComplexBall::from_real(RealBall::exact(BigFloat::pow2(-1)));
        let inner = sum.add(&BallSeries::constant(half, d), prec);
        let oracle = pref.mul(&inner, d, prec);

        let t = tail_binary_split(&s, &a, &params(n, m), d, prec);
        for i in 0..d {
            assert!(overlaps(&t.coeff(i), &oracle.coeff(i)), "coefficient {i}");
            // The split result must not be much wider than the naive one.
            let rs = t.coeff(i).re.rad().to_f64().max(1e-300);
            let ro = oracle.coeff(i).re.rad().to_f64().max(1e-300);
            assert!(rs / ro < 1024.0, "coefficient {i} radius blowup {rs} vs {ro}");
        }
    }

    #[test]
    fn truncation_to_low_order_matches_high_order_prefix() {
        let s = ComplexBall::from_i64(3, 1);
        let a = ComplexBall::new(RealBall::from_ratio(1, 3, 128), RealBall::zero());
        let wide = tail_binary_split(&s, &a, &params(12, 9), 6, 160);
        let narrow = tail_binary_split(&s, &a, &params(12, 9), 2, 160);
        for i in 0..2 {
            assert!(overlaps(&wide.coeff(i), &narrow.coeff(i)));
        }
    }
}
