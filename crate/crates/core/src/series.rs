//! Truncated power series (jets) with ball coefficients.
//!
//! A series of order D holds coefficients of x^0..x^(D-1); all operations
//! truncate at the requested order, and the enclosure property is inherited
//! coefficientwise from ball arithmetic. The Moebius substitution
//! x -> x/(x-1) is carried out through an exact finite-difference scheme:
//! expanding (x/(x-1))^k shows the output coefficients are alternating
//! binomial sums of the input ones, which iterated differences compute with
//! additions only.

use crate::ball::RealBall;
use crate::bigfloat::{BigFloat, Rounding};
use crate::complex::ComplexBall;
use num_bigint::BigUint;
use num_traits::One;

#[derive(Clone, Debug)]
pub struct BallSeries {
    pub(crate) c: Vec<ComplexBall>,
}

#[derive(Clone, Debug)]
pub struct RealSeries {
    pub(crate) c: Vec<RealBall>,
}

impl BallSeries {
    pub fn zero(d: usize) -> Self {
        BallSeries { c: vec![ComplexBall::zero(); d] }
    }

    pub fn one(d: usize) -> Self {
        let mut s = Self::zero(d);
        if d > 0 {
            s.c[0] = ComplexBall::one();
        }
        s
    }

    pub fn constant(v: ComplexBall, d: usize) -> Self {
        let mut s = Self::zero(d);
        if d > 0 {
            s.c[0] = v;
        }
        s
    }

    /// The jet of the identity x around 0.
    pub fn x(d: usize) -> Self {
        let mut s = Self::zero(d);
        if d > 1 {
            s.c[1] = ComplexBall::one();
        }
        s
    }

    pub fn from_coeffs(c: Vec<ComplexBall>) -> Self {
        BallSeries { c }
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coeff(&self, k: usize) -> ComplexBall {
        self.c.get(k).cloned().unwrap_or_else(ComplexBall::zero)
    }

    pub fn coeffs(&self) -> &[ComplexBall] {
        &self.c
    }

    /// Pads with zeros or truncates to exactly d coefficients.
    pub fn resize(mut self, d: usize) -> Self {
        self.c.resize(d, ComplexBall::zero());
        self
    }

    pub fn neg(mut self) -> Self {
        for v in &mut self.c {
            *v = v.clone().neg();
        }
        self
    }

    pub fn add(&self, rhs: &Self, prec: u32) -> Self {
        let d = self.c.len().max(rhs.c.len());
        let mut out = Vec::with_capacity(d);
        for k in 0..d {
            out.push(self.coeff(k).add(&rhs.coeff(k), prec));
        }
        BallSeries { c: out }
    }

    pub fn sub(&self, rhs: &Self, prec: u32) -> Self {
        let d = self.c.len().max(rhs.c.len());
        let mut out = Vec::with_capacity(d);
        for k in 0..d {
            out.push(self.coeff(k).sub(&rhs.coeff(k), prec));
        }
        BallSeries { c: out }
    }

    /// Cauchy product truncated to order d.
    pub fn mul(&self, rhs: &Self, d: usize, prec: u32) -> Self {
        let mut out = vec![ComplexBall::zero(); d];
        for (i, a) in self.c.iter().enumerate().take(d) {
            if a.contains_zero() && a.upper_abs().is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if i + j >= d {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b, prec), prec);
            }
        }
        BallSeries { c: out }
    }

    pub fn mul_scalar(&self, s: &ComplexBall, prec: u32) -> Self {
        BallSeries { c: self.c.iter().map(|v| v.mul(s, prec)).collect() }
    }

    pub fn mul_real(&self, s: &RealBall, prec: u32) -> Self {
        BallSeries { c: self.c.iter().map(|v| v.mul_real(s, prec)).collect() }
    }

    /// Reciprocal series to order d.
    ///
    /// Running the quotient recurrence directly on balls loses the sign
    /// cancellations of the true inverse, and for inputs whose coefficients
    /// rival the constant term it inflates radii exponentially in the
    /// order. So the recurrence runs on midpoints only (numerically stable:
    /// rounding noise propagates through the true inverse, which decays),
    /// and the result q is certified in one pass against the full ball
    /// input: with residual R = 1 - self*q, the true reciprocal is
    /// q*(1 + R + R^2 + ...), and the geometric tail is bounded
    /// coefficientwise by the nonnegative majorant W = U/(1-U) built from
    /// upper bounds U on |R|. Degrades to full balls when the constant
    /// term cannot be bounded away from zero or the residual is too large
    /// to certify.
    pub fn inv(&self, d: usize, prec: u32) -> Self {
        if d == 0 {
            return BallSeries { c: vec![] };
        }
        let full = || BallSeries { c: vec![ComplexBall::full(); d] };
        if self.c.is_empty() || !self.coeff(0).abs_sq(prec).is_positive() {
            return full();
        }
        let exact_mid = |z: &ComplexBall| {
            ComplexBall::new(
                RealBall::exact(z.re.mid().clone()),
                RealBall::exact(z.im.mid().clone()),
            )
        };

        // midpoint recurrence; radii are stripped at every step
        let b: Vec<ComplexBall> = self.c.iter().take(d).map(exact_mid).collect();
        let q0 = exact_mid(&b[0].recip(prec));
        let mut q: Vec<ComplexBall> = Vec::with_capacity(d);
        q.push(q0.clone());
        for k in 1..d {
            let mut acc = ComplexBall::zero();
            for j in 1..=k.min(b.len() - 1) {
                acc = acc.sub(&b[j].mul(&q[k - j], prec), prec);
            }
            q.push(exact_mid(&acc.mul(&q0, prec)));
        }
        let qs = BallSeries { c: q };

        // residual against the true input, and upper bounds on |R|
        let r = BallSeries::one(d).sub(&self.mul(&qs, d, prec), prec);
        let u: Vec<BigFloat> = r.c.iter().map(|z| z.upper_abs()).collect();
        if u[0].cmp_value(&BigFloat::pow2(-1)) != Some(std::cmp::Ordering::Less) {
            return full();
        }

        // w = u/(1-u) by the positive recurrence
        // w_k = (u_k + sum_{j>=1} u_j w_(k-j)) / (1 - u_0), rounded up
        let up = Rounding::Up;
        let head = BigFloat::one().sub(&u[0], 32, Rounding::Down).0;
        let mut w: Vec<BigFloat> = Vec::with_capacity(d);
        for k in 0..d {
            let mut acc = u[k].clone();
            for j in 1..=k {
                acc = acc.add(&u[j].mul(&w[k - j], 32, up).0, 32, up).0;
            }
            w.push(acc.div(&head, 32, up).0);
        }

        // fold |q| (x) w into the radii
        let qa: Vec<BigFloat> = qs.c.iter().map(|z| z.upper_abs()).collect();
        let mut out = Vec::with_capacity(d);
        for (k, qk) in qs.c.iter().enumerate() {
            let mut err = BigFloat::zero();
            for j in 0..=k {
                err = err.add(&qa[j].mul(&w[k - j], 32, up).0, 32, up).0;
            }
            out.push(qk.add_error(&err));
        }
        BallSeries { c: out }
    }

    /// Quotient self/rhs to order d via the certified reciprocal; requires
    /// the constant term of rhs to exclude zero.
    pub fn div(&self, rhs: &Self, d: usize, prec: u32) -> Self {
        self.mul(&rhs.inv(d, prec), d, prec)
    }

    /// Termwise derivative (order drops by one).
    pub fn derivative(&self, prec: u32) -> Self {
        let mut out = Vec::with_capacity(self.c.len().saturating_sub(1));
        for k in 1..self.c.len() {
            out.push(self.c[k].mul_i64(k as i64, prec));
        }
        BallSeries { c: out }
    }

    /// Termwise antiderivative with zero constant term (order grows by one).
    pub fn integrate(&self, prec: u32) -> Self {
        let mut out = Vec::with_capacity(self.c.len() + 1);
        out.push(ComplexBall::zero());
        for (k, v) in self.c.iter().enumerate() {
            out.push(v.div_u64(k as u64 + 1, prec));
        }
        BallSeries { c: out }
    }

    /// exp of the jet via the differential recurrence
    /// g_k = (1/k) sum_{j=1..k} j f_j g_{k-j}.
    pub fn exp(&self, d: usize, prec: u32) -> Self {
        let mut g = Vec::with_capacity(d);
        if d == 0 {
            return BallSeries { c: g };
        }
        g.push(self.coeff(0).exp(prec));
        for k in 1..d {
            let mut acc = ComplexBall::zero();
            for j in 1..=k.min(self.c.len().saturating_sub(1)) {
                acc = acc.add(&self.c[j].mul_i64(j as i64, prec).mul(&g[k - j], prec), prec);
            }
            g.push(acc.div_u64(k as u64, prec));
        }
        BallSeries { c: g }
    }

    /// log of the jet: log f_0 + integral of f'/f. The constant term must
    /// exclude zero; branch selection follows the complex log of f_0.
    pub fn log(&self, d: usize, prec: u32) -> Self {
        if d == 0 {
            return BallSeries { c: vec![] };
        }
        let head = self.coeff(0).log(prec);
        let ratio = self.derivative(prec).div(self, d.saturating_sub(1), prec);
        let mut out = ratio.integrate(prec).resize(d);
        out.c[0] = head;
        out
    }

    /// Coefficientwise division by k! .
    pub fn borel(&self, prec: u32) -> Self {
        let mut fact = BigUint::one();
        let mut out = Vec::with_capacity(self.c.len());
        for (k, v) in self.c.iter().enumerate() {
            if k > 1 {
                fact *= BigUint::from(k);
            }
            if k <= 1 {
                out.push(v.clone());
            } else {
                let f = RealBall::exact(BigFloat::from_biguint(fact.clone())).recip(prec);
                out.push(v.mul_real(&f, prec));
            }
        }
        BallSeries { c: out }
    }

    /// Coefficientwise multiplication by k! (inverse of `borel`).
    pub fn borel_inv(&self, prec: u32) -> Self {
        let mut fact = BigUint::one();
        let mut out = Vec::with_capacity(self.c.len());
        for (k, v) in self.c.iter().enumerate() {
            if k > 1 {
                fact *= BigUint::from(k);
            }
            if k <= 1 {
                out.push(v.clone());
            } else {
                let f = RealBall::exact(BigFloat::from_biguint(fact.clone()));
                out.push(v.mul_real(&f, prec));
            }
        }
        BallSeries { c: out }
    }

    /// Alternating binomial (Euler) transform
    /// g_n = sum_k (-1)^k C(n,k) f_k, a self-inverse map, computed by
    /// iterated forward differences (additions only).
    pub fn binomial_transform(&self, prec: u32) -> Self {
        BallSeries { c: difference_transform(&self.c, prec) }
    }

    /// Substitutes x -> x/(x-1) and truncates to the input order. Since
    /// (x/(x-1))^k = (-1)^k x^k (1-x)^(-k), the output coefficients are
    /// g_0 = f_0 and g_n = -sum_j (-1)^j C(n-1,j) f_(j+1); self-inverse.
    pub fn compose_mobius(&self, prec: u32) -> Self {
        let d = self.c.len();
        if d <= 1 {
            return self.clone();
        }
        let shifted: Vec<ComplexBall> = self.c[1..].to_vec();
        let e = difference_transform(&shifted, prec);
        let mut out = Vec::with_capacity(d);
        out.push(self.c[0].clone());
        for v in e {
            out.push(v.neg());
        }
        BallSeries { c: out }
    }

    /// Upper bounds |f_k| as an exact-coefficient real series.
    pub fn majorant(&self) -> RealSeries {
        RealSeries { c: self.c.iter().map(|v| RealBall::exact(v.upper_abs())).collect() }
    }

    pub fn round_to(&self, prec: u32) -> Self {
        BallSeries { c: self.c.iter().map(|v| v.round_to(prec)).collect() }
    }
}

/// E[v]_m = sum_j (-1)^j C(m,j) v_j for every m, by iterated differences.
fn difference_transform(v: &[ComplexBall], prec: u32) -> Vec<ComplexBall> {
    let n = v.len();
    let mut row = v.to_vec();
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        out.push(row[0].clone());
        for j in 0..n - m - 1 {
            row[j] = row[j].sub(&row[j + 1], prec);
        }
    }
    out
}

impl RealSeries {
    pub fn zero(d: usize) -> Self {
        RealSeries { c: vec![RealBall::zero(); d] }
    }

    pub fn from_coeffs(c: Vec<RealBall>) -> Self {
        RealSeries { c }
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coeff(&self, k: usize) -> RealBall {
        self.c.get(k).cloned().unwrap_or_else(RealBall::zero)
    }

    pub fn coeffs(&self) -> &[RealBall] {
        &self.c
    }

    pub fn add(&self, rhs: &Self, prec: u32) -> Self {
        let d = self.c.len().max(rhs.c.len());
        RealSeries { c: (0..d).map(|k| self.coeff(k).add(&rhs.coeff(k), prec)).collect() }
    }

    pub fn mul(&self, rhs: &Self, d: usize, prec: u32) -> Self {
        let mut out = vec![RealBall::zero(); d];
        for (i, a) in self.c.iter().enumerate().take(d) {
            for (j, b) in rhs.c.iter().enumerate() {
                if i + j >= d {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b, prec), prec);
            }
        }
        RealSeries { c: out }
    }

    pub fn mul_scalar(&self, s: &RealBall, prec: u32) -> Self {
        RealSeries { c: self.c.iter().map(|v| v.mul(s, prec)).collect() }
    }

    /// Upper bound of coefficient k.
    pub fn upper(&self, k: usize) -> BigFloat {
        self.coeff(k).upper_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::RealBall;

    fn series(vals: &[(f64, f64)]) -> BallSeries {
        BallSeries::from_coeffs(
            vals.iter()
                .map(|&(re, im)| ComplexBall::new(RealBall::from_f64(re), RealBall::from_f64(im)))
                .collect(),
        )
    }

    fn assert_coeff_near(s: &BallSeries, k: usize, re: f64, im: f64) {
        let c = s.coeff(k).add_error(&BigFloat::from_f64(1e-10));
        assert!(
            c.contains_point(&BigFloat::from_f64(re), &BigFloat::from_f64(im)),
            "coeff {k}: expected ({re}, {im}), got {:?}",
            s.coeff(k)
        );
    }

    #[test]
    fn cauchy_product_small_case() {
        // (1 + 2x)(3 + x + x^2) = 3 + 7x + 3x^2 + 2x^3
        let a = series(&[(1.0, 0.0), (2.0, 0.0)]);
        let b = series(&[(3.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
        let p = a.mul(&b, 4, 64);
        for (k, v) in [3.0, 7.0, 3.0, 2.0].iter().enumerate() {
            assert_coeff_near(&p, k, *v, 0.0);
        }
    }

    #[test]
    fn long_reciprocal_radii_stay_near_working_precision() {
        // constant term 1/2 with unit higher coefficients: the naive ball
        // recurrence would inflate radii like 3^k, the certified route
        // must hold them near 2^-prec times the coefficient scale
        let d = 400;
        let prec = 256;
        let mut c = vec![ComplexBall::new(RealBall::from_ratio(1, 2, prec), RealBall::zero())];
        c.extend(std::iter::repeat_n(ComplexBall::one(), d - 1));
        let b = BallSeries::from_coeffs(c);
        let q = b.inv(d, prec);
        // true inverse of 1/2 + x/(1-x) is 2(1-x)/(1+x): 2, -4, 4, -4, ...
        assert_coeff_near(&q, 0, 2.0, 0.0);
        assert_coeff_near(&q, 1, -4.0, 0.0);
        assert_coeff_near(&q, 2, 4.0, 0.0);
        assert_coeff_near(&q, 3, -4.0, 0.0);
        for k in [50, 200, d - 1] {
            let r = q.coeff(k).re.rad().msb_exp().unwrap_or(i64::MIN);
            assert!(r < -(prec as i64) + 40, "coeff {k} radius 2^{r}");
            let sign = if k % 2 == 1 { -4.0 } else { 4.0 };
            assert_coeff_near(&q, k, sign, 0.0);
        }
        // containment double-check: b * inv(b) encloses 1
        let prod = b.mul(&q, d, prec);
        assert!(prod.coeff(0).sub(&ComplexBall::one(), prec).contains_zero());
        for k in [1, 100, d - 1] {
            assert!(prod.coeff(k).contains_zero());
        }
    }

    #[test]
    fn reciprocal_of_zero_constant_term_degrades_to_full() {
        let b = series(&[(0.0, 0.0), (1.0, 0.0)]);
        let q = b.inv(3, 64);
        assert!(!q.coeff(0).is_bounded());
        let almost = BallSeries::from_coeffs(vec![ComplexBall::new(
            RealBall::with_rad(BigFloat::from_f64(0.25), BigFloat::from_f64(0.5)),
            RealBall::zero(),
        )]);
        assert!(!almost.inv(2, 64).coeff(1).is_bounded());
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = series(&[(1.0, 0.5), (-2.0, 0.25), (0.125, -1.0), (3.0, 0.0)]);
        let b = series(&[(2.0, -1.0), (1.0, 1.0), (0.5, 0.5), (-0.25, 0.0)]);
        let p = a.mul(&b, 4, 96);
        let q = p.div(&b, 4, 96);
        for k in 0..4 {
            let d = q.coeff(k).sub(&a.coeff(k), 96);
            assert!(d.contains_zero(), "coeff {k}");
        }
    }

    #[test]
    fn division_by_zero_constant_term_degrades() {
        let a = BallSeries::one(3);
        let b = BallSeries::x(3);
        assert!(!a.div(&b, 3, 64).coeff(0).is_bounded());
    }

    #[test]
    fn exp_log_round_trip() {
        let f = series(&[(0.5, 0.25), (1.0, -0.5), (-0.25, 0.0), (2.0, 1.0)]);
        let g = f.exp(4, 128).log(4, 128);
        for k in 0..4 {
            assert!(g.coeff(k).sub(&f.coeff(k), 128).contains_zero(), "coeff {k}");
        }
    }

    #[test]
    fn exp_matches_elementary_series() {
        // exp(x) jet: coefficients 1/k!
        let e = BallSeries::x(6).exp(6, 96);
        let mut fact = 1.0;
        for k in 0..6 {
            if k > 0 {
                fact *= k as f64;
            }
            assert_coeff_near(&e, k, 1.0 / fact, 0.0);
        }
    }

    #[test]
    fn log_of_geometric_series() {
        // 1/(1-x) has log with coefficients 1/k
        let geo = BallSeries::from_coeffs(vec![ComplexBall::one(); 6]);
        let l = geo.log(6, 96);
        assert_coeff_near(&l, 0, 0.0, 0.0);
        for k in 1..6 {
            assert_coeff_near(&l, k, 1.0 / k as f64, 0.0);
        }
    }

    #[test]
    fn borel_round_trip_and_values() {
        let f = series(&[(1.0, 0.0), (1.0, 0.0), (4.0, 0.0), (36.0, 0.0)]);
        let b = f.borel(96);
        assert_coeff_near(&b, 2, 2.0, 0.0);
        assert_coeff_near(&b, 3, 6.0, 0.0);
        let back = b.borel_inv(96);
        for k in 0..4 {
            assert!(back.coeff(k).sub(&f.coeff(k), 96).contains_zero());
        }
    }

    #[test]
    fn binomial_transform_is_involution() {
        let f = series(&[(3.0, 1.0), (-1.0, 0.5), (2.0, -2.0), (0.25, 0.0), (5.0, 1.5)]);
        let tt = f.binomial_transform(96).binomial_transform(96);
        for k in 0..5 {
            assert!(tt.coeff(k).sub(&f.coeff(k), 96).contains_zero(), "coeff {k}");
        }
        // known case: f_k = 1 transforms to (1, 0, 0, ...)
        let ones = BallSeries::from_coeffs(vec![ComplexBall::one(); 5]);
        let t = ones.binomial_transform(96);
        assert_coeff_near(&t, 0, 1.0, 0.0);
        for k in 1..5 {
            assert_coeff_near(&t, k, 0.0, 0.0);
        }
    }

    #[test]
    fn mobius_composition_known_jets() {
        // identity: x -> x/(x-1) = -x - x^2 - x^3 - ...
        let m = BallSeries::x(5).compose_mobius(96);
        assert_coeff_near(&m, 0, 0.0, 0.0);
        for k in 1..5 {
            assert_coeff_near(&m, k, -1.0, 0.0);
        }
        // square: (x/(x-1))^2 = x^2 + 2x^3 + 3x^4 + ...
        let x2 = BallSeries::x(5).mul(&BallSeries::x(5), 5, 96);
        let m2 = x2.compose_mobius(96);
        for (k, v) in [0.0, 0.0, 1.0, 2.0, 3.0].iter().enumerate() {
            assert_coeff_near(&m2, k, *v, 0.0);
        }
        // constants are fixed
        let c = BallSeries::constant(ComplexBall::from_i64(7, -2), 4).compose_mobius(96);
        assert_coeff_near(&c, 0, 7.0, -2.0);
        for k in 1..4 {
            assert_coeff_near(&c, k, 0.0, 0.0);
        }
    }

    #[test]
    fn mobius_is_involution() {
        let f = series(&[(2.0, 0.0), (1.0, 1.0), (-0.5, 0.25), (3.0, -1.0), (0.125, 0.0), (-2.0, 0.5)]);
        let g = f.compose_mobius(128).compose_mobius(128);
        for k in 0..6 {
            assert!(g.coeff(k).sub(&f.coeff(k), 128).contains_zero(), "coeff {k}");
        }
    }

    #[test]
    fn mobius_agrees_with_horner_composition() {
        // direct composition with u = -x - x^2 - ... as an independent check
        let d = 8;
        let f = series(&[(1.0, 0.5), (0.25, -1.0), (2.0, 0.0), (-0.5, 0.125), (1.5, 1.5), (0.0, -2.0), (3.0, 0.75), (-1.0, 0.0)]);
        let mut u = BallSeries::zero(d);
        for k in 1..d {
            u.c[k] = ComplexBall::from_i64(-1, 0);
        }
        // Horner: g = (((f_{d-1} u + f_{d-2}) u + ...) u + f_0
        let mut g = BallSeries::constant(f.coeff(d - 1), d);
        for k in (0..d - 1).rev() {
            g = g.mul(&u, d, 128).add(&BallSeries::constant(f.coeff(k), d), 128);
        }
        let m = f.compose_mobius(128);
        for k in 0..d {
            assert!(m.coeff(k).sub(&g.coeff(k), 128).contains_zero(), "coeff {k}");
        }
    }

    #[test]
    fn derivative_integrate_inverse() {
        let f = series(&[(0.0, 0.0), (1.0, -1.0), (2.5, 0.5), (-0.75, 2.0)]);
        let g = f.derivative(96).integrate(96);
        for k in 0..4 {
            assert!(g.coeff(k).sub(&f.coeff(k), 96).contains_zero());
        }
    }

    #[test]
    fn majorant_dominates() {
        let f = series(&[(3.0, -4.0), (-1.0, 0.0), (0.5, 0.5)]);
        let m = f.majorant();
        assert!(m.upper(0).to_f64() >= 5.0 - 1e-9);
        assert!(m.upper(1).to_f64() >= 1.0 - 1e-9);
        // product majorant dominates coefficient magnitudes of the product
        let p = f.mul(&f, 3, 64);
        let mp = m.mul(&m, 3, 64);
        for k in 0..3 {
            assert!(mp.upper(k).to_f64() + 1e-9 >= p.coeff(k).upper_abs().to_f64() - p.coeff(k).re.rad().to_f64(), "coeff {k}");
        }
    }
}
