//! Complex ball arithmetic in rectangular form: independent real and
//! imaginary enclosures. The principal branch is used for log and powers;
//! a ball that straddles the branch cut degrades to a full enclosure of its
//! imaginary part rather than silently picking a sheet.

use crate::ball::{RealBall, RAD_PREC};
use crate::bigfloat::{BigFloat, Rounding};
use crate::elem::{atan_ball, exp_ball, log_ball, pi_ball, sincos_ball};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> Self {
        ComplexBall { re, im }
    }

    pub fn from_real(re: RealBall) -> Self {
        ComplexBall { re, im: RealBall::zero() }
    }

    pub fn zero() -> Self {
        Self::from_real(RealBall::zero())
    }

    pub fn one() -> Self {
        Self::from_real(RealBall::one())
    }

    pub fn i() -> Self {
        ComplexBall { re: RealBall::zero(), im: RealBall::one() }
    }

    pub fn full() -> Self {
        ComplexBall { re: RealBall::full(), im: RealBall::full() }
    }

    pub fn from_i64(re: i64, im: i64) -> Self {
        ComplexBall { re: RealBall::from_i64(re), im: RealBall::from_i64(im) }
    }

    pub fn is_bounded(&self) -> bool {
        self.re.is_bounded() && self.im.is_bounded()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_exact() && self.im.mid().is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn neg(self) -> Self {
        ComplexBall { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.clone().neg() }
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Self {
        ComplexBall { re: self.im.clone().neg(), im: self.re.clone() }
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        ComplexBall { re: self.re.mul_2exp(e), im: self.im.mul_2exp(e) }
    }

    pub fn add(&self, rhs: &Self, prec: u32) -> Self {
        ComplexBall { re: self.re.add(&rhs.re, prec), im: self.im.add(&rhs.im, prec) }
    }

    pub fn sub(&self, rhs: &Self, prec: u32) -> Self {
        ComplexBall { re: self.re.sub(&rhs.re, prec), im: self.im.sub(&rhs.im, prec) }
    }

    pub fn mul(&self, rhs: &Self, prec: u32) -> Self {
        let ac = self.re.mul(&rhs.re, prec);
        let bd = self.im.mul(&rhs.im, prec);
        let ad = self.re.mul(&rhs.im, prec);
        let bc = self.im.mul(&rhs.re, prec);
        ComplexBall { re: ac.sub(&bd, prec), im: ad.add(&bc, prec) }
    }

    pub fn mul_real(&self, rhs: &RealBall, prec: u32) -> Self {
        ComplexBall { re: self.re.mul(rhs, prec), im: self.im.mul(rhs, prec) }
    }

    pub fn mul_i64(&self, k: i64, prec: u32) -> Self {
        ComplexBall { re: self.re.mul_i64(k, prec), im: self.im.mul_i64(k, prec) }
    }

    pub fn div_u64(&self, k: u64, prec: u32) -> Self {
        ComplexBall { re: self.re.div_u64(k, prec), im: self.im.div_u64(k, prec) }
    }

    /// |z|^2 as a real ball.
    pub fn abs_sq(&self, prec: u32) -> RealBall {
        self.re.sqr(prec).add(&self.im.sqr(prec), prec)
    }

    /// Upper bound on |z| over the ball.
    pub fn upper_abs(&self) -> BigFloat {
        let a = self.re.upper_abs();
        let b = self.im.upper_abs();
        let s = a.mul(&a, RAD_PREC, Rounding::Up).0.add(&b.mul(&b, RAD_PREC, Rounding::Up).0, RAD_PREC, Rounding::Up).0;
        s.sqrt(RAD_PREC, Rounding::Up).0
    }

    /// Lower bound on |z| over the ball (zero if it may contain zero).
    pub fn lower_abs(&self) -> BigFloat {
        let a = self.re.lower_abs();
        let b = self.im.lower_abs();
        let s = a.mul(&a, RAD_PREC, Rounding::Down).0.add(&b.mul(&b, RAD_PREC, Rounding::Down).0, RAD_PREC, Rounding::Down).0;
        s.sqrt(RAD_PREC, Rounding::Down).0
    }

    /// Reciprocal via conj(z)/|z|^2; full if the ball touches zero.
    pub fn recip(&self, prec: u32) -> Self {
        let den = self.abs_sq(prec + 4);
        if !den.is_positive() {
            return Self::full();
        }
        self.conj().mul_real(&den.recip(prec + 4), prec)
    }

    pub fn div(&self, rhs: &Self, prec: u32) -> Self {
        self.mul(&rhs.recip(prec + 4), prec)
    }

    pub fn sqr(&self, prec: u32) -> Self {
        self.mul(self, prec)
    }

    /// Integer power by repeated squaring.
    pub fn pow_i64(&self, n: i64, prec: u32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let wp = prec + 8 + 2 * (64 - n.unsigned_abs().leading_zeros());
        let mut base = self.clone();
        let mut k = n.unsigned_abs();
        let mut acc: Option<ComplexBall> = None;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base, wp),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.sqr(wp);
        }
        let v = acc.unwrap();
        if n < 0 {
            v.recip(prec)
        } else {
            v.round_to(prec)
        }
    }

    /// exp(z) = e^re (cos im + i sin im).
    pub fn exp(&self, prec: u32) -> Self {
        let wp = prec + 8;
        let m = exp_ball(&self.re, wp);
        let (s, c) = sincos_ball(&self.im, wp);
        ComplexBall { re: m.mul(&c, prec), im: m.mul(&s, prec) }
    }

    /// Principal branch log. The imaginary part is the argument in
    /// (-pi, pi]; a ball straddling the negative real axis yields a full
    /// imaginary enclosure.
    pub fn log(&self, prec: u32) -> Self {
        if !self.is_bounded() || self.contains_zero() {
            return Self::full();
        }
        let wp = prec + 8;
        let re = log_ball(&self.abs_sq(wp + 8), wp).mul_2exp(-1);
        ComplexBall { re: re.round_to(prec), im: self.arg(prec) }
    }

    /// Argument in the principal branch.
    pub fn arg(&self, prec: u32) -> RealBall {
        let wp = prec + 8;
        if self.re.is_positive() {
            return atan_ball(&self.im.div(&self.re, wp), prec);
        }
        if self.im.is_positive() {
            // pi/2 - atan(re/im)
            let t = atan_ball(&self.re.div(&self.im, wp), wp);
            return pi_ball(wp).mul_2exp(-1).sub(&t, prec);
        }
        if self.im.is_negative() {
            let t = atan_ball(&self.re.div(&self.im, wp), wp);
            return pi_ball(wp).mul_2exp(-1).neg().sub(&t, prec);
        }
        RealBall::full()
    }

    /// z^w = exp(w log z), principal branch.
    pub fn pow(&self, w: &Self, prec: u32) -> Self {
        let wp = prec + 16;
        w.mul(&self.log(wp), wp).exp(prec)
    }

    pub fn round_to(&self, prec: u32) -> Self {
        ComplexBall { re: self.re.round_to(prec), im: self.im.round_to(prec) }
    }

    pub fn add_error(&self, err: &BigFloat) -> Self {
        ComplexBall { re: self.re.add_error(err), im: self.im.add_error(err) }
    }

    /// Certain containment of an exact complex point.
    pub fn contains_point(&self, re: &BigFloat, im: &BigFloat) -> bool {
        self.re.contains_bf(re) && self.im.contains_bf(im)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cb(re: f64, im: f64) -> ComplexBall {
        ComplexBall::new(RealBall::from_f64(re), RealBall::from_f64(im))
    }

    fn assert_near(z: &ComplexBall, re: f64, im: f64) {
        let w = z.add_error(&BigFloat::from_f64(1e-12));
        assert!(w.contains_point(&BigFloat::from_f64(re), &BigFloat::from_f64(im)), "({re}, {im}) not near {z:?}");
    }

    #[test]
    fn field_operations() {
        let a = cb(3.0, -4.0);
        let b = cb(-1.5, 2.0);
        assert_near(&a.mul(&b, 64), 3.5, 12.0);
        assert_near(&a.add(&b, 64), 1.5, -2.0);
        let q = a.div(&b, 64);
        assert_near(&q.mul(&b, 64), 3.0, -4.0);
        let r = a.recip(64);
        assert_near(&r.mul(&a, 64), 1.0, 0.0);
        // |a|^2 = 25
        assert!(a.abs_sq(64).contains_bf(&BigFloat::from_u64(25)));
    }

    #[test]
    fn division_by_zero_straddling_ball_is_full() {
        let z = ComplexBall::new(RealBall::with_rad(BigFloat::from_f64(0.1), BigFloat::from_f64(0.2)), RealBall::with_rad(BigFloat::from_f64(-0.1), BigFloat::from_f64(0.15)));
        assert!(z.contains_zero());
        assert!(!ComplexBall::one().div(&z, 64).is_bounded());
    }

    #[test]
    fn exp_log_round_trip() {
        for (re, im) in [(1.0, 2.0), (-0.5, 0.25), (3.0, -1.0), (0.0, 1.0), (2.0, 0.0)] {
            let z = cb(re, im);
            let back = z.exp(128).log(128);
            assert_near(&back, re, im);
        }
    }

    #[test]
    fn exp_of_imaginary_has_unit_modulus() {
        let z = ComplexBall::new(RealBall::zero(), RealBall::from_ratio(7, 3, 128));
        let e = z.exp(128);
        assert!(e.abs_sq(128).contains_bf(&BigFloat::one()));
    }

    #[test]
    fn arg_quadrants() {
        let quarter = pi_ball(80).mul_2exp(-2);
        // arg(1+i) = pi/4
        assert!(cb(1.0, 1.0).arg(72).sub(&quarter, 72).contains_bf(&BigFloat::zero()));
        // arg(-1+i) = 3 pi/4
        let a = cb(-1.0, 1.0).arg(72);
        assert!(a.sub(&quarter.mul_i64(3, 80), 72).contains_bf(&BigFloat::zero()));
        // arg(-1-i) = -3 pi/4
        let a = cb(-1.0, -1.0).arg(72);
        assert!(a.add(&quarter.mul_i64(3, 80), 72).contains_bf(&BigFloat::zero()));
        // negative real axis straddle: no information
        assert!(!cb(-1.0, 0.0).arg(72).is_bounded());
    }

    #[test]
    fn integer_powers_match_repeated_multiplication() {
        let z = ComplexBall::new(RealBall::from_ratio(2, 3, 96), RealBall::from_ratio(-1, 5, 96));
        let mut acc = ComplexBall::one();
        for _ in 0..7 {
            acc = acc.mul(&z, 96);
        }
        let p = z.pow_i64(7, 96);
        assert!(acc.contains(&p) || p.contains(&acc) || acc.sub(&p, 96).contains_zero());
        // negative power: z^-3 * z^3 contains 1
        let n = z.pow_i64(-3, 96).mul(&z.pow_i64(3, 96), 96);
        assert!(n.contains_point(&BigFloat::one(), &BigFloat::zero()));
    }

    #[test]
    fn pow_agrees_with_special_cases() {
        // i^2 = -1 via the transcendental route
        let m1 = ComplexBall::i().pow(&ComplexBall::from_i64(2, 0), 128);
        assert_near(&m1, -1.0, 0.0);
        // 2^(1/2) = sqrt(2)
        let h = ComplexBall::new(RealBall::from_ratio(1, 2, 128), RealBall::zero());
        let s = ComplexBall::from_i64(2, 0).pow(&h, 128);
        let s2 = s.sqr(128);
        assert!(s2.contains_point(&BigFloat::from_u64(2), &BigFloat::zero()));
    }

    #[test]
    fn conj_and_mul_i() {
        let z = cb(2.5, -3.5);
        assert_eq!(z.conj().conj(), z);
        let r = z.mul_i().mul_i().mul_i().mul_i();
        assert_eq!(r, z);
        // mul_i agrees with multiplication by the i ball
        let a = z.mul_i();
        let b = z.mul(&ComplexBall::i(), 64);
        assert!(b.contains(&a));
    }

    #[test]
    fn modulus_bounds() {
        let z = ComplexBall::new(RealBall::with_rad(BigFloat::from_f64(3.0), BigFloat::from_f64(0.1)), RealBall::with_rad(BigFloat::from_f64(4.0), BigFloat::from_f64(0.1)));
        let lo = z.lower_abs();
        let hi = z.upper_abs();
        assert!(lo.to_f64() > 4.8 && lo.to_f64() < 5.0);
        assert!(hi.to_f64() > 5.0 && hi.to_f64() < 5.2);
    }
}
