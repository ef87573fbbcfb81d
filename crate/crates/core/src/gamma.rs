//! Log-gamma enclosures on the right half-plane, as scalars and as jets in
//! a shift of the argument.
//!
//! The evaluation shifts `z` up by an integer K until the Stirling series
//! applies, then subtracts the factor logs:
//!
//! ```text
//!   log Gamma(z) = stirling(z+K) - sum_{j<K} Log(z+j)
//! ```
//!
//! with `stirling(w) = (w-1/2) Log w - w + log(2pi)/2
//! + sum_{j=1}^{J-1} B_{2j} / ((2j-1)(2j) w^{2j-1}) + R_J(w)`.
//!
//! For `Re w >= 0` the remainder obeys `|R_J(w)| <= pi |B_{2J}| / (2J |w|^{2J-1})`
//! (from the integral form of the remainder and `|u+w|^2 >= u^2 + |w|^2`),
//! so no argument-angle reduction is needed beyond keeping the real part
//! positive. Jets get their remainder coefficients from the Cauchy bound on
//! the disc of radius 1 around w: every coefficient is at most
//! `pi |B_{2J}| / (2J (|w|-1)^{2J-1})`.
//!
//! The factor-log sum is folded into one log of the product `P = prod (z+j)`
//! plus an exact multiple of 2 pi i. The multiple is the winding of the
//! partial products, recovered from an f64 accumulation of the factor
//! arguments: each factor lies in the right half-plane, so the true sum of
//! principal arguments differs from the principal argument of P by an exact
//! integer multiple of 2 pi, and the f64 estimate is off by far less than
//! pi. When the product ball touches the branch cut (possible for very wide
//! inputs), the logs are summed factor by factor instead.

use crate::ball::RealBall;
use crate::bernoulli::bernoulli_balls;
use crate::bigfloat::{BigFloat, Rounding};
use crate::complex::ComplexBall;
use crate::elem::{log_ball, pi_ball};
use crate::series::BallSeries;
use crate::zeta::ceil_log2;

/// Principal argument of the midpoint, safe against f64 overflow of the
/// components.
fn arg_f64(z: &ComplexBall) -> f64 {
    let re = z.re.mid();
    let im = z.im.mid();
    let e = re.msb_exp().unwrap_or(0).max(im.msb_exp().unwrap_or(0));
    im.mul_2exp(-e).to_f64().atan2(re.mul_2exp(-e).to_f64())
}

/// `sum_{j<k} log(z+j) mod x^d` for the jet variable x added to z:
/// constant term is the log sum, coefficient i is
/// `(-1)^{i+1}/i * sum_j (z+j)^{-i}`.
fn shift_sum_jet(z: &ComplexBall, k: u64, d: usize, prec: u32) -> BallSeries {
    let mut p = ComplexBall::one();
    let mut sum_arg = 0.0_f64;
    let mut pows = vec![ComplexBall::zero(); d];
    for j in 0..k {
        let zj = z.add(&ComplexBall::from_i64(j as i64, 0), prec);
        p = p.mul(&zj, prec);
        sum_arg += arg_f64(&zj);
        if d > 1 {
            let inv = zj.recip(prec);
            let mut q = inv.clone();
            for slot in pows.iter_mut().take(d).skip(1) {
                *slot = slot.add(&q, prec);
                q = q.mul(&inv, prec);
            }
        }
    }
    let logp = p.log(prec);
    let head = if logp.is_bounded() {
        let winding = ((sum_arg - arg_f64(&p)) / std::f64::consts::TAU).round() as i64;
        let two_pi_k = pi_ball(prec).mul_i64(2 * winding, prec);
        ComplexBall::new(logp.re.clone(), logp.im.add(&two_pi_k, prec))
    } else {
        // Wide input: the product straddles the branch cut. Each factor is
        // still in the right half-plane, so per-factor logs are safe.
        let mut acc = ComplexBall::zero();
        for j in 0..k {
            let zj = z.add(&ComplexBall::from_i64(j as i64, 0), prec);
            acc = acc.add(&zj.log(prec), prec);
        }
        acc
    };
    let mut c = Vec::with_capacity(d);
    c.push(head);
    for (i, v) in pows.into_iter().enumerate().take(d).skip(1) {
        let t = v.div_u64(i as u64, prec);
        c.push(if i % 2 == 1 { t } else { t.neg() });
    }
    BallSeries::from_coeffs(c)
}

/// Stirling expansion jet at w (which must already be large enough), with
/// the series remainder folded into every coefficient.
fn stirling_jet(w: &ComplexBall, d: usize, j_terms: usize, prec: u32) -> BallSeries {
    let two = BigFloat::from_i64(2);
    let margin_ok = w
        .re
        .sub(&RealBall::exact(BigFloat::one()), prec)
        .is_positive()
        && w.lower_abs().cmp_value(&two) == Some(std::cmp::Ordering::Greater);
    if !margin_ok {
        return BallSeries::from_coeffs(vec![ComplexBall::full(); d]);
    }

    let lw = w.log(prec);
    let invw = w.recip(prec);

    // Jet of Log(w+x): Log w + sum (-1)^{i+1}/(i w^i) x^i.
    let mut lw_jet = Vec::with_capacity(d);
    lw_jet.push(lw);
    let mut q = invw.clone();
    for i in 1..d {
        let t = q.div_u64(i as u64, prec);
        lw_jet.push(if i % 2 == 1 { t } else { t.neg() });
        q = q.mul(&invw, prec);
    }
    let lw_jet = BallSeries::from_coeffs(lw_jet);

    let half = ComplexBall::from_real(RealBall::exact(BigFloat::pow2(-1)));
    let lin = BallSeries::from_coeffs(vec![w.sub(&half, prec), ComplexBall::one()]).resize(d);
    let w_jet = BallSeries::from_coeffs(vec![w.clone(), ComplexBall::one()]).resize(d);
    let ln_2pi_half =
        ComplexBall::from_real(log_ball(&pi_ball(prec).mul_2exp(1), prec).mul_2exp(-1));
    let mut out = lin
        .mul(&lw_jet, d, prec)
        .sub(&w_jet, prec)
        .add(&BallSeries::constant(ln_2pi_half, d), prec);

    // Asymptotic series: sum_j B_{2j}/((2j-1)(2j)) w^{1-2j} (1+x/w)^{1-2j}.
    let bern = bernoulli_balls(2 * j_terms, prec);
    let invw2 = invw.sqr(prec);
    let mut wpow = invw.clone(); // w^{-(2j-1)}
    let mut acc = vec![ComplexBall::zero(); d];
    for j in 1..j_terms {
        let jj = j as u64;
        let q = wpow
            .mul_real(&bern[2 * j], prec)
            .div_u64((2 * jj - 1) * (2 * jj), prec);
        acc[0] = acc[0].add(&q, prec);
        let mut gi = ComplexBall::one();
        for (i, slot) in acc.iter_mut().enumerate().take(d).skip(1) {
            gi = gi
                .mul_i64(2 - 2 * j as i64 - i as i64, prec)
                .div_u64(i as u64, prec)
                .mul(&invw, prec);
            *slot = slot.add(&q.mul(&gi, prec), prec);
        }
        wpow = wpow.mul(&invw2, prec);
    }
    out = out.add(&BallSeries::from_coeffs(acc), prec);

    // Remainder: pi |B_{2J}| / (2J (|w|-1)^{2J-1}), one bound for every
    // coefficient via the Cauchy estimate on the unit disc around w.
    let wm1 = RealBall::exact(
        w.lower_abs()
            .sub(&BigFloat::one(), 64, Rounding::Down)
            .0,
    );
    let mut pw = RealBall::one();
    let mut b = wm1.recip(64);
    let mut e = (2 * j_terms - 1) as u64;
    while e > 0 {
        if e & 1 == 1 {
            pw = pw.mul(&b, 64);
        }
        e >>= 1;
        if e > 0 {
            b = b.sqr(64);
        }
    }
    let rem = pi_ball(64)
        .mul(&bern[2 * j_terms].abs(), 64)
        .div_u64(2 * j_terms as u64, 64)
        .mul(&pw, 64)
        .upper_abs();
    BallSeries::from_coeffs(out.coeffs().iter().map(|c| c.add_error(&rem)).collect())
}

/// Order-d jet of `log Gamma(z+x)`; requires `Re z > 0` over the whole ball
/// (anything else yields full balls).
pub fn log_gamma_jet(z: &ComplexBall, d: usize, prec: u32) -> BallSeries {
    assert!(d >= 1);
    if !z.is_bounded() || !z.re.is_positive() {
        return BallSeries::from_coeffs(vec![ComplexBall::full(); d]);
    }
    let wp = prec + 24 + ceil_log2(prec as u64 + 64);

    // Shift so |w| clears the Stirling threshold; when the imaginary part is
    // already large enough, only ensure a healthy real part.
    let re0 = z.re.mid().to_f64();
    let im0 = z.im.mid().to_f64().abs();
    let r_target = 12.0_f64.max(wp as f64 / 4.0);
    let re_needed = if im0 >= r_target { 4.0 } else { r_target };
    let k = (re_needed - re0).ceil().max(0.0).min(1e18) as u64;

    let j_terms = (0.15 * wp as f64).ceil() as usize + 2;
    let w = z.add(&ComplexBall::from_i64(k as i64, 0), wp);
    let mut out = stirling_jet(&w, d, j_terms, wp);
    if k > 0 {
        out = out.sub(&shift_sum_jet(z, k, d, wp), wp);
    }
    out.round_to(prec + 8)
}

/// Enclosure of `log Gamma(z)` (principal branch, continuous on the right
/// half-plane, real on the positive reals).
pub fn log_gamma(z: &ComplexBall, prec: u32) -> ComplexBall {
    log_gamma_jet(z, 1, prec).coeff(0)
}
