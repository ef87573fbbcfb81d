//! Real ball arithmetic: an interval `[mid - rad, mid + rad]` that certainly
//! contains the exact value. Midpoints carry the working precision; radii
//! live at a short fixed precision and are always rounded upward, so the
//! containment invariant survives every operation.
//!
//! Invalid operations (division by an interval containing zero, square roots
//! of possibly-negative input, overflowed exponents) degrade to the full
//! line `0 +/- inf` rather than panicking or producing NaN.

use crate::bigfloat::{BigFloat, Rounding};
use num_bigint::{BigInt, Sign};

/// Radius mantissa precision. Radii only need a couple of digits of headroom;
/// 30 bits keeps them cheap while the upward rounding keeps them honest.
pub const RAD_PREC: u32 = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct RealBall {
    mid: BigFloat,
    rad: BigFloat,
}

/// rad + 2^e when an operation reported error exponent e.
fn rad_err(rad: BigFloat, err: Option<i64>) -> BigFloat {
    match err {
        None => rad,
        Some(e) => rad.add(&BigFloat::pow2(e), RAD_PREC, Rounding::Up).0,
    }
}

fn rad_add(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.add(b, RAD_PREC, Rounding::Up).0
}

fn rad_mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
    // 0 * inf arises when an exact midpoint multiplies an infinite radius.
    if a.is_zero() || b.is_zero() {
        return BigFloat::zero();
    }
    a.mul(b, RAD_PREC, Rounding::Up).0
}

impl RealBall {
    fn make(mid: BigFloat, rad: BigFloat) -> Self {
        if !mid.is_finite() || rad.is_nan() || rad.is_negative() {
            return Self::full();
        }
        RealBall { mid, rad }
    }

    /// The whole real line: no information.
    pub fn full() -> Self {
        RealBall { mid: BigFloat::zero(), rad: BigFloat::inf(false) }
    }

    pub fn zero() -> Self {
        RealBall { mid: BigFloat::zero(), rad: BigFloat::zero() }
    }

    pub fn one() -> Self {
        Self::exact(BigFloat::one())
    }

    /// Ball with zero radius around a finite value.
    pub fn exact(v: BigFloat) -> Self {
        Self::make(v, BigFloat::zero())
    }

    pub fn from_i64(v: i64) -> Self {
        Self::exact(BigFloat::from_i64(v))
    }

    pub fn from_f64(v: f64) -> Self {
        Self::make(BigFloat::from_f64(v), BigFloat::zero())
    }

    pub fn with_rad(mid: BigFloat, rad: BigFloat) -> Self {
        Self::make(mid, rad)
    }

    /// Exact integer ratio `p/q` rounded to prec bits.
    pub fn from_ratio(p: i64, q: i64, prec: u32) -> Self {
        let (m, e) = BigFloat::from_i64(p).div(&BigFloat::from_i64(q), prec, Rounding::Nearest);
        Self::make(m, rad_err(BigFloat::zero(), e))
    }

    /// Big-integer ratio `p/q` rounded to prec bits; q must be nonzero.
    pub fn from_bigint_ratio(p: &BigInt, q: &BigInt, prec: u32) -> Self {
        let pf = BigFloat::from_parts(p.sign() == Sign::Minus, p.magnitude().clone(), 0);
        let qf = BigFloat::from_parts(q.sign() == Sign::Minus, q.magnitude().clone(), 0);
        let (m, e) = pf.div(&qf, prec, Rounding::Nearest);
        Self::make(m, rad_err(BigFloat::zero(), e))
    }

    pub fn mid(&self) -> &BigFloat {
        &self.mid
    }

    pub fn rad(&self) -> &BigFloat {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Finite radius (the ball carries information).
    pub fn is_bounded(&self) -> bool {
        self.rad.is_finite()
    }

    /// Lower endpoint, rounded down at prec.
    pub fn lo(&self, prec: u32) -> BigFloat {
        if !self.is_bounded() {
            return BigFloat::inf(true);
        }
        self.mid.sub(&self.rad, prec, Rounding::Down).0
    }

    /// Upper endpoint, rounded up at prec.
    pub fn hi(&self, prec: u32) -> BigFloat {
        if !self.is_bounded() {
            return BigFloat::inf(false);
        }
        self.mid.add(&self.rad, prec, Rounding::Up).0
    }

    /// Upper bound on |x| over the ball.
    pub fn upper_abs(&self) -> BigFloat {
        if !self.is_bounded() {
            return BigFloat::inf(false);
        }
        self.mid.clone().abs().add(&self.rad, RAD_PREC, Rounding::Up).0
    }

    /// Lower bound on |x| over the ball (zero if the ball straddles zero).
    pub fn lower_abs(&self) -> BigFloat {
        if !self.is_bounded() {
            return BigFloat::zero();
        }
        let v = self.mid.clone().abs().sub(&self.rad, RAD_PREC, Rounding::Down).0;
        if v.is_negative() {
            BigFloat::zero()
        } else {
            v
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lower_abs().is_zero()
    }

    /// Every point of the ball is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.mid.is_positive() && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_negative() && !self.contains_zero()
    }

    /// Certain containment of a point. False on borderline cases.
    pub fn contains_bf(&self, x: &BigFloat) -> bool {
        if !self.is_bounded() {
            return x.is_finite();
        }
        if !x.is_finite() {
            return false;
        }
        let d = self.mid.sub(x, RAD_PREC, Rounding::Up).0.abs();
        d.cmp_value(&self.rad) != Some(std::cmp::Ordering::Greater)
    }

    /// Certain containment of another ball. False on borderline cases.
    pub fn contains(&self, other: &RealBall) -> bool {
        if !self.is_bounded() {
            return true;
        }
        if !other.is_bounded() {
            return false;
        }
        let d = self.mid.sub(&other.mid, RAD_PREC, Rounding::Up).0.abs();
        let reach = rad_add(&d, &other.rad);
        reach.cmp_value(&self.rad) != Some(std::cmp::Ordering::Greater)
    }

    /// Smallest ball (up to rounding) covering `[lo, hi]`.
    pub fn from_endpoints(lo: &BigFloat, hi: &BigFloat, prec: u32) -> Self {
        if !lo.is_finite() || !hi.is_finite() || lo.cmp_value(hi) == Some(std::cmp::Ordering::Greater) {
            return Self::full();
        }
        let (sum, _) = lo.add(hi, prec + 4, Rounding::Nearest);
        let mid = sum.mul_2exp(-1).round(prec, Rounding::Nearest).0;
        let r1 = hi.sub(&mid, RAD_PREC, Rounding::Up).0;
        let r2 = mid.sub(lo, RAD_PREC, Rounding::Up).0;
        let rad = if r1.cmp_value(&r2) == Some(std::cmp::Ordering::Less) { r2 } else { r1 };
        Self::make(mid, rad)
    }

    pub fn neg(mut self) -> Self {
        self.mid = self.mid.neg();
        self
    }

    /// |x| as a ball.
    pub fn abs(&self) -> Self {
        if !self.is_bounded() {
            return Self::full();
        }
        if self.contains_zero() {
            let hi = self.upper_abs();
            Self::from_endpoints(&BigFloat::zero(), &hi, RAD_PREC.max(hi.mant_bits() as u32))
        } else {
            RealBall { mid: self.mid.clone().abs(), rad: self.rad.clone() }
        }
    }

    /// Exact scaling by 2^e.
    pub fn mul_2exp(&self, e: i64) -> Self {
        Self::make(self.mid.mul_2exp(e), self.rad.mul_2exp(e))
    }

    /// Widens the radius by 2^e (or by a given bound).
    pub fn add_error(&self, err: &BigFloat) -> Self {
        if err.is_negative() {
            return Self::full();
        }
        Self::make(self.mid.clone(), rad_add(&self.rad, err))
    }

    pub fn add(&self, rhs: &Self, prec: u32) -> Self {
        let (m, e) = self.mid.add(&rhs.mid, prec, Rounding::Nearest);
        Self::make(m, rad_err(rad_add(&self.rad, &rhs.rad), e))
    }

    pub fn sub(&self, rhs: &Self, prec: u32) -> Self {
        let (m, e) = self.mid.sub(&rhs.mid, prec, Rounding::Nearest);
        Self::make(m, rad_err(rad_add(&self.rad, &rhs.rad), e))
    }

    pub fn mul(&self, rhs: &Self, prec: u32) -> Self {
        if !self.is_bounded() || !rhs.is_bounded() {
            return Self::full();
        }
        let (m, e) = self.mid.mul(&rhs.mid, prec, Rounding::Nearest);
        // |x y - mx my| <= |mx| ry + |my| rx + rx ry
        let a1 = rad_mul(&self.mid.clone().abs().round(RAD_PREC, Rounding::Up).0, &rhs.rad);
        let a2 = rad_mul(&rhs.mid.clone().abs().round(RAD_PREC, Rounding::Up).0, &self.rad);
        let a3 = rad_mul(&self.rad, &rhs.rad);
        Self::make(m, rad_err(rad_add(&rad_add(&a1, &a2), &a3), e))
    }

    pub fn mul_i64(&self, k: i64, prec: u32) -> Self {
        let (m, e) = self.mid.mul(&BigFloat::from_i64(k), prec, Rounding::Nearest);
        let r = rad_mul(&self.rad, &BigFloat::from_u64(k.unsigned_abs()));
        Self::make(m, rad_err(r, e))
    }

    pub fn div_u64(&self, k: u64, prec: u32) -> Self {
        if k == 0 {
            return Self::full();
        }
        let (m, e) = self.mid.div_u64(k, prec, Rounding::Nearest);
        let (r, re) = self.rad.div_u64(k, RAD_PREC, Rounding::Up);
        debug_assert!(re.is_none() || r.is_positive() || r.is_zero());
        Self::make(m, rad_err(r, e))
    }

    /// Reciprocal; full if the ball touches zero.
    pub fn recip(&self, prec: u32) -> Self {
        let ylo = self.lower_abs();
        if ylo.is_zero() || !self.is_bounded() {
            return Self::full();
        }
        let (m, e) = BigFloat::one().div(&self.mid, prec, Rounding::Nearest);
        // |1/y - 1/my| <= ry / (|my| * ylo)
        let denom = self.mid.clone().abs().mul(&ylo, RAD_PREC, Rounding::Down).0;
        let (r, re) = self.rad.div(&denom, RAD_PREC, Rounding::Up);
        Self::make(m, rad_err(rad_err(r, re), e))
    }

    pub fn div(&self, rhs: &Self, prec: u32) -> Self {
        self.mul(&rhs.recip(prec + 2), prec)
    }

    /// Square of the ball (tighter than `mul(self, self)` is unnecessary;
    /// this is just a convenience alias).
    pub fn sqr(&self, prec: u32) -> Self {
        self.mul(self, prec)
    }

    /// Square root; full if any point of the ball is negative.
    pub fn sqrt(&self, prec: u32) -> Self {
        if !self.is_bounded() {
            return Self::full();
        }
        let lo = self.lo(prec + 4);
        if lo.is_negative() {
            return Self::full();
        }
        if self.is_exact() {
            let (m, e) = self.mid.sqrt(prec, Rounding::Nearest);
            return Self::make(m, rad_err(BigFloat::zero(), e));
        }
        let hi = self.hi(prec + 4);
        let slo = lo.sqrt(prec + 4, Rounding::Down).0;
        let shi = hi.sqrt(prec + 4, Rounding::Up).0;
        Self::from_endpoints(&slo, &shi, prec)
    }

    /// Re-rounds the midpoint to prec bits, folding the shift into the radius.
    pub fn round_to(&self, prec: u32) -> Self {
        let (m, e) = self.mid.round(prec, Rounding::Nearest);
        Self::make(m, rad_err(self.rad.clone(), e))
    }

    /// Midpoint of the union hull of two balls.
    pub fn union(&self, other: &Self, prec: u32) -> Self {
        if !self.is_bounded() || !other.is_bounded() {
            return Self::full();
        }
        let lo1 = self.lo(prec + 4);
        let lo2 = other.lo(prec + 4);
        let hi1 = self.hi(prec + 4);
        let hi2 = other.hi(prec + 4);
        let lo = if lo1.cmp_value(&lo2) == Some(std::cmp::Ordering::Greater) { lo2 } else { lo1 };
        let hi = if hi1.cmp_value(&hi2) == Some(std::cmp::Ordering::Less) { hi2 } else { hi1 };
        Self::from_endpoints(&lo, &hi, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(m: f64, r: f64) -> RealBall {
        RealBall::with_rad(BigFloat::from_f64(m), BigFloat::from_f64(r))
    }

    /// Checks y is in the ball by exact comparison of endpoints.
    fn assert_in(b: &RealBall, v: f64) {
        assert!(b.contains_bf(&BigFloat::from_f64(v)), "{v} not in {b:?}");
    }

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = ball(1.5, 0.25);
        let b = ball(-2.0, 0.125);
        // endpoint products of contained sample points stay inside
        for xa in [1.25, 1.5, 1.75] {
            for xb in [-2.125, -2.0, -1.875] {
                assert_in(&a.add(&b, 64), xa + xb);
                assert_in(&a.sub(&b, 64), xa - xb);
                assert_in(&a.mul(&b, 64), xa * xb);
                assert_in(&a.div(&b, 64), xa / xb);
            }
        }
    }

    #[test]
    fn rounding_error_goes_to_radius() {
        let third = RealBall::from_ratio(1, 3, 64);
        assert!(!third.is_exact());
        let three = third.mul_i64(3, 64);
        assert_in(&three, 1.0);
        // at higher precision the radius shrinks
        let tight = RealBall::from_ratio(1, 3, 256);
        assert!(tight.rad().cmp_value(third.rad()) == Some(std::cmp::Ordering::Less));
    }

    #[test]
    fn division_by_zero_straddling_ball_is_full() {
        let z = ball(0.1, 0.2);
        assert!(z.contains_zero());
        let q = RealBall::one().div(&z, 64);
        assert!(!q.is_bounded());
        // but a ball clear of zero divides fine
        let w = ball(0.1, 0.05);
        assert!(RealBall::one().div(&w, 64).is_bounded());
    }

    #[test]
    fn endpoints_bracket() {
        let x = RealBall::from_ratio(2, 7, 80);
        let lo = x.lo(80);
        let hi = x.hi(80);
        assert_eq!(lo.cmp_value(&hi), Some(std::cmp::Ordering::Less));
        let (p_lo, _) = lo.mul_u64(7, 120, Rounding::Nearest);
        let (p_hi, _) = hi.mul_u64(7, 120, Rounding::Nearest);
        let two = BigFloat::from_u64(2);
        assert_eq!(p_lo.cmp_value(&two), Some(std::cmp::Ordering::Less));
        assert_eq!(p_hi.cmp_value(&two), Some(std::cmp::Ordering::Greater));
    }

    #[test]
    fn sqrt_containment_and_domain() {
        let two = RealBall::from_i64(2);
        let r = two.sqrt(128);
        // the 128-bit enclosure is far tighter than f64; check through the square
        let sq = r.sqr(128);
        assert_in(&sq, 2.0);
        assert!(ball(std::f64::consts::SQRT_2, 1e-15).contains(&r));
        // fat ball
        let fat = ball(4.0, 1.0);
        let rf = fat.sqrt(64);
        for v in [3.0f64, 4.0, 5.0] {
            assert_in(&rf, v.sqrt());
        }
        // possibly negative -> full
        assert!(!ball(0.5, 1.0).sqrt(64).is_bounded());
    }

    #[test]
    fn abs_handles_straddle() {
        let s = ball(-0.25, 1.0);
        let a = s.abs();
        for v in [-1.25f64, -0.25, 0.0, 0.75] {
            assert_in(&a, v.abs());
        }
        let n = ball(-3.0, 0.5).abs();
        assert_in(&n, 3.25);
        assert!(!n.contains_zero());
    }

    #[test]
    fn containment_relations() {
        let big = ball(0.0, 2.0);
        let small = ball(0.5, 0.25);
        assert!(big.contains(&small));
        assert!(!small.contains(&big));
        assert!(RealBall::full().contains(&big));
        assert!(!big.contains(&RealBall::full()));
        assert!(big.contains_bf(&BigFloat::from_f64(-2.0)));
        assert!(!big.contains_bf(&BigFloat::from_f64(-2.5)));
    }

    #[test]
    fn union_covers_both() {
        let a = ball(1.0, 0.5);
        let b = ball(3.0, 0.25);
        let u = a.union(&b, 64);
        for v in [0.5f64, 1.5, 2.75, 3.25] {
            assert_in(&u, v);
        }
    }

    #[test]
    fn invalid_midpoints_degrade_to_full() {
        let huge = RealBall::exact(BigFloat::pow2(i64::MAX / 2)).mul(&RealBall::exact(BigFloat::pow2(i64::MAX / 2)), 64);
        assert!(!huge.is_bounded());
        let nan_mid = RealBall::with_rad(BigFloat::nan(), BigFloat::zero());
        assert!(!nan_mid.is_bounded());
    }

    #[test]
    fn signs() {
        assert!(ball(2.0, 1.0).is_positive());
        assert!(!ball(2.0, 2.5).is_positive());
        assert!(ball(-1.0, 0.5).is_negative());
        assert!(ball(0.0, 0.0).contains_zero());
        assert!(!RealBall::full().is_positive());
    }

    #[test]
    fn deterministic_results() {
        let a = RealBall::from_ratio(22, 7, 100);
        let b = RealBall::from_ratio(355, 113, 100);
        let x = a.mul(&b, 100).sub(&a.div(&b, 100), 100).sqrt(100);
        let y = a.mul(&b, 100).sub(&a.div(&b, 100), 100).sqrt(100);
        assert_eq!(x, y);
    }
}
